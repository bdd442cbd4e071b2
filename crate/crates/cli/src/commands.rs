use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use sqg_core::decay::{decay_experiment, DecayOutcome};
use sqg_core::lab::{default_eps0, estimate_constant, EnsembleSpec, LemmaId, LemmaParams};
use sqg_core::solver::io::write_snapshot;
use sqg_core::solver::{blowup_monitor, energy_ledger, smallness_gate, GateDecision, LedgerReport};
use sqg_core::{make_lattice, simulate, Amplitude, SolverConfig, SpectralField, SqgError, TrajectoryRecord};

use crate::config::{Overrides, RunConfig};
use crate::failure::Failure;
use crate::manifest::ManifestBuilder;

fn load(config: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, Failure> {
    let mut run = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    run.apply(overrides);
    Ok(run)
}

/// Resolved solver config and initial field. Writes the fitted `eps0` back
/// into `run` so the manifest echo is complete.
fn prepare(run: &mut RunConfig) -> Result<(SolverConfig, SpectralField), Failure> {
    let cfg = run.solver_config()?;
    run.solver.eps0 = Some(cfg.eps0);
    let lat = make_lattice(cfg.n, cfg.box_len)?;
    let theta0 = run.initial.data().build(&lat, cfg.alpha, cfg.eps0, cfg.seed)?;
    Ok((cfg, theta0))
}

fn out_dir(dir: &Path) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn write_norms(path: &Path, traj: &TrajectoryRecord) -> Result<(), Failure> {
    let mut w = BufWriter::new(File::create(path)?);
    traj.series.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_snapshots(dir: &Path, traj: &TrajectoryRecord, m: &mut ManifestBuilder) -> Result<(), Failure> {
    if traj.snapshots.is_empty() {
        return Ok(());
    }
    let sub = out_dir(&dir.join("snapshots"))?;
    for (i, s) in traj.snapshots.iter().enumerate() {
        let path = sub.join(format!("snap_{i:04}.txt"));
        let mut w = BufWriter::new(File::create(&path)?);
        write_snapshot(&mut w, &s.field, traj.alpha, s.t)?;
        w.flush()?;
        m.output(path);
    }
    Ok(())
}

fn echo(run: &RunConfig, cfg: Option<&SolverConfig>) -> serde_json::Value {
    json!({ "run": run, "solver": cfg })
}

/// One simulation with its ledger checks, shared by `simulate` and `sweep`.
struct SimOutcome {
    traj: TrajectoryRecord,
    gate: GateDecision,
    ledger: LedgerReport,
    verdicts: BTreeMap<String, bool>,
}

fn run_checked(run: &RunConfig, cfg: &SolverConfig, theta0: &SpectralField) -> Result<SimOutcome, SqgError> {
    let gate = smallness_gate(theta0, cfg)?;
    let traj = simulate(theta0, cfg)?;
    let ledger = energy_ledger(&traj, run.checks.tol_l2, run.checks.tol_h);
    let mut verdicts = BTreeMap::new();
    if run.checks.l2_ledger {
        verdicts.insert("l2_ledger".to_string(), ledger.l2.pass);
    }
    // the critical-norm estimates are only claimed for small data
    if gate.pass && run.checks.h_ledger {
        verdicts.insert("h_ledger".to_string(), ledger.h_crit.pass);
    }
    if gate.pass && run.checks.blowup_monitor {
        verdicts.insert("blowup_monitor".to_string(), blowup_monitor(&traj).bounded_by_initial_energy);
    }
    Ok(SimOutcome { traj, gate, ledger, verdicts })
}

pub fn simulate_cmd(config: Option<&Path>, overrides: &Overrides, out: &Path) -> Result<(), Failure> {
    let mut run = load(config, overrides)?;
    let (cfg, theta0) = prepare(&mut run)?;
    let dir = out_dir(out)?;
    let mut m = ManifestBuilder::new("simulate", echo(&run, Some(&cfg)));
    let norms = dir.join("norms.csv");

    let outcome = match run_checked(&run, &cfg, &theta0) {
        Ok(o) => o,
        Err(SqgError::Instability { time, reason, partial }) => {
            write_norms(&norms, &partial)?;
            m.output(norms);
            m.verdict("completed", false);
            let f = Failure::Instability(format!("simulation aborted at t = {time}: {reason}"));
            m.write(&dir, f.code())?;
            return Err(f);
        }
        Err(e) => return Err(e.into()),
    };
    m.verdict("completed", true);
    write_norms(&norms, &outcome.traj)?;
    m.output(norms);

    let report_path = dir.join("report.json");
    let monitor = blowup_monitor(&outcome.traj);
    write_json(
        &report_path,
        &json!({
            "gate": outcome.gate,
            "ledger": outcome.ledger,
            "steps": outcome.traj.steps,
            "min_dt": outcome.traj.min_dt,
            "max_dt": outcome.traj.max_dt,
            "max_pairing_ratio": outcome.traj.max_pairing_ratio,
            "blowup_monitor": {
                "d_h_end": monitor.d_h.last(),
                "continuation_guaranteed_until": monitor.continuation_guaranteed_until,
                "bounded_by_initial_energy": monitor.bounded_by_initial_energy,
            },
        }),
    )?;
    m.output(report_path);
    if run.checks.write_snapshots {
        write_snapshots(&dir, &outcome.traj, &mut m)?;
    }
    for (k, v) in &outcome.verdicts {
        m.verdict(k, *v);
    }
    let result = if m.all_pass() {
        Ok(())
    } else {
        let failed: Vec<&str> = m.verdicts().iter().filter(|(_, v)| !**v).map(|(k, _)| k.as_str()).collect();
        Err(Failure::Check(format!("failed checks: {}", failed.join(", "))))
    };
    m.write(&dir, result.as_ref().err().map_or(0, Failure::code))?;
    if result.is_ok() {
        let last = outcome.traj.series.last().expect("sampled");
        println!(
            "simulate: {} steps to t = {}, ‖θ‖_H^(2-2α) {:.6e} -> {:.6e}, gate {}",
            outcome.traj.steps,
            last.t,
            outcome.traj.series.first().expect("sampled").h_crit,
            last.h_crit,
            if outcome.gate.pass { "passed" } else { "failed" }
        );
    }
    result
}

/// Parses sample counts such as `200`, `1e4` or `1e6`.
pub fn parse_count(s: &str) -> Result<usize, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: `{s}`"))?;
    if !((1.0..=1e9).contains(&v) && v.fract() == 0.0) {
        return Err(format!("sample count must be a whole number in [1, 1e9], got `{s}`"));
    }
    Ok(v as usize)
}

fn default_count(id: LemmaId) -> usize {
    match id {
        LemmaId::Elementary => 1_000_000,
        LemmaId::ExpKernel => 10_000,
        _ => 200,
    }
}

pub struct VerifyArgs<'a> {
    pub ids: &'a [String],
    pub samples: Option<usize>,
    pub seed: u64,
    pub n: usize,
    pub alpha: f64,
    pub out: &'a Path,
}

pub fn verify_cmd(a: VerifyArgs<'_>) -> Result<(), Failure> {
    let mut ids: Vec<LemmaId> = Vec::new();
    for raw in a.ids.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        if raw == "all" {
            ids.extend(LemmaId::ALL);
        } else {
            ids.push(raw.parse().map_err(|e: SqgError| Failure::Usage(e.to_string()))?);
        }
    }
    if ids.is_empty() {
        return Err(Failure::Usage(format!(
            "no lemma selected; choose from {} or `all`",
            LemmaId::ALL.map(|i| i.as_str()).join(", ")
        )));
    }
    ids.dedup();
    if !(a.alpha > 0.0 && a.alpha < 0.5) {
        return Err(Failure::Usage(format!("alpha must lie in (0, 1/2), got {}", a.alpha)));
    }
    let lat = make_lattice(a.n, std::f64::consts::TAU)?;
    let params = LemmaParams::for_alpha(a.alpha);
    let dir = out_dir(a.out)?;
    let mut m = ManifestBuilder::new(
        "verify",
        json!({ "lemmas": ids, "samples": a.samples, "seed": a.seed, "n": a.n, "alpha": a.alpha }),
    );
    for id in ids {
        let count = a.samples.unwrap_or_else(|| default_count(id));
        let spec = EnsembleSpec::default_for(id, &params, &lat, count, a.seed);
        let report = estimate_constant(&spec, id, &params)?;
        let path = dir.join(format!("{id}.json"));
        write_json(&path, &report)?;
        m.output(path);
        m.verdict(id.as_str(), report.pass());
        println!(
            "{id}: {} samples, {} violations, max ratio {:.6e}{}",
            report.samples,
            report.violations,
            report.max_ratio,
            if report.degenerate { " (degenerate)" } else { "" }
        );
    }
    let result = if m.all_pass() { Ok(()) } else { Err(Failure::Check("violations found".into())) };
    m.write(&dir, result.as_ref().err().map_or(0, Failure::code))?;
    result
}

pub fn decay_cmd(config: Option<&Path>, overrides: &Overrides, force: bool, out: &Path) -> Result<(), Failure> {
    let mut run = load(config, overrides)?;
    if force {
        run.decay.force = true;
    }
    let (cfg, theta0) = prepare(&mut run)?;
    let dir = out_dir(out)?;
    let mut m = ManifestBuilder::new("decay", echo(&run, Some(&cfg)));

    let outcome: DecayOutcome = match decay_experiment(&cfg, &theta0, &run.decay) {
        Ok(o) => o,
        Err(e @ SqgError::GateFailed { .. }) => {
            m.verdict("smallness_gate", false);
            let f: Failure = e.into();
            m.write(&dir, f.code())?;
            return Err(f);
        }
        Err(SqgError::Instability { time, reason, partial }) => {
            let norms = dir.join("norms.csv");
            write_norms(&norms, &partial)?;
            m.output(norms);
            m.verdict("completed", false);
            let f = Failure::Instability(format!("simulation aborted at t = {time}: {reason}"));
            m.write(&dir, f.code())?;
            return Err(f);
        }
        Err(e) => return Err(e.into()),
    };
    let r = &outcome.report;
    let report_path = dir.join("decay_report.json");
    write_json(&report_path, r)?;
    m.output(report_path);
    let residuals = dir.join("residuals.csv");
    let mut w = BufWriter::new(File::create(&residuals)?);
    outcome.residuals.write_csv(&mut w)?;
    w.flush()?;
    drop(w);
    m.output(residuals);
    let norms = dir.join("norms.csv");
    write_norms(&norms, &outcome.trajectory)?;
    m.output(norms);
    if run.checks.write_snapshots {
        write_snapshots(&dir, &outcome.trajectory, &mut m)?;
    }

    // a forced run records the failed gate without letting it decide the exit code
    m.verdict("smallness_gate", r.gate.pass);
    for (k, v) in &r.verdicts {
        m.verdict(k, *v);
    }
    println!(
        "decay: terminal ratio {:.6e} (target {}), gate {}, {}",
        r.terminal_ratio,
        r.terminal_target,
        if r.gate.pass { "passed" } else { "failed (forced)" },
        if r.pass { "all diagnostics pass" } else { "some diagnostics fail" }
    );
    let result = if r.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = r.verdicts.iter().filter(|(_, v)| !**v).map(|(k, _)| k.as_str()).collect();
        Err(Failure::Check(format!("failed diagnostics: {}", failed.join(", "))))
    };
    m.write(&dir, result.as_ref().err().map_or(0, Failure::code))?;
    result
}

pub struct SweepArgs<'a> {
    pub config: Option<&'a Path>,
    pub overrides: &'a Overrides,
    pub alphas: &'a [f64],
    pub amplitudes: &'a [f64],
    pub ns: &'a [usize],
    pub out: &'a Path,
}

const SWEEP_HEADER: &str = "index,alpha,amplitude,n,status,steps,h_crit_0,terminal_ratio,terminal_l2_ratio,\
l2_slack,h_slack,d_h_end,gate_pass,checks_pass,message";

struct SweepPoint {
    alpha: f64,
    amplitude: Option<f64>,
    n: usize,
}

fn sweep_row(index: usize, p: &SweepPoint, base: &RunConfig, dir: &Path) -> (String, bool, Vec<PathBuf>) {
    let amp = p.amplitude.map_or("config".to_string(), |a| a.to_string());
    let head = format!("{index},{},{amp},{}", p.alpha, p.n);
    let mut run = base.clone();
    run.solver.alpha = p.alpha;
    run.solver.n = p.n;
    if let Some(f) = p.amplitude {
        run.initial.amplitude = Amplitude::RelativeToEps0 { fraction: f };
    }
    let fail = |status: &str, msg: String| {
        let msg = msg.replace([',', '\n'], ";");
        (format!("{head},{status},,,,,,,,,,{msg}"), false, Vec::new())
    };
    let (cfg, theta0) = match prepare(&mut run) {
        Ok(x) => x,
        Err(e) => return fail("error", e.to_string()),
    };
    match run_checked(&run, &cfg, &theta0) {
        Ok(o) => {
            let first = o.traj.series.first().expect("sampled");
            let last = o.traj.series.last().expect("sampled");
            let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
            let checks = o.verdicts.values().all(|&v| v);
            let norms = dir.join(format!("run_{index:03}_norms.csv"));
            let written = write_norms(&norms, &o.traj).is_ok();
            let row = format!(
                "{head},ok,{},{},{},{},{},{},{},{},{},{}",
                o.traj.steps,
                first.h_crit,
                ratio(last.h_crit, first.h_crit),
                ratio(last.l2, first.l2),
                o.ledger.l2.worst_slack,
                o.ledger.h_crit.worst_slack,
                last.d_h,
                o.gate.pass,
                checks,
                if written { "" } else { "could not write norms" }
            );
            (row, written, if written { vec![norms] } else { Vec::new() })
        }
        Err(e @ SqgError::Instability { .. }) => fail("unstable", e.to_string()),
        Err(e) => fail("error", e.to_string()),
    }
}

pub fn sweep_cmd(a: SweepArgs<'_>) -> Result<(), Failure> {
    let base = load(a.config, a.overrides)?;
    let alphas = if a.alphas.is_empty() { vec![base.solver.alpha] } else { a.alphas.to_vec() };
    let ns = if a.ns.is_empty() { vec![base.solver.n] } else { a.ns.to_vec() };
    let amps: Vec<Option<f64>> =
        if a.amplitudes.is_empty() { vec![None] } else { a.amplitudes.iter().copied().map(Some).collect() };
    let mut points = Vec::new();
    for &alpha in &alphas {
        for &amplitude in &amps {
            for &n in &ns {
                points.push(SweepPoint { alpha, amplitude, n });
            }
        }
    }
    if points.len() > 10_000 {
        return Err(Failure::Usage(format!("sweep of {} runs exceeds the 10000-run limit", points.len())));
    }

    // fit eps0 once per alpha before fanning out
    let mut fitted: BTreeMap<u64, f64> = BTreeMap::new();
    if base.solver.eps0.is_none() {
        for &alpha in &alphas {
            if alpha > 0.0 && alpha < 0.5 {
                fitted.insert(alpha.to_bits(), default_eps0(alpha, 0)?);
            }
        }
    }
    let dir = out_dir(a.out)?;
    let rows: Vec<(String, bool, Vec<PathBuf>)> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut run = base.clone();
            if let Some(e) = fitted.get(&p.alpha.to_bits()) {
                run.solver.eps0 = Some(*e);
            }
            sweep_row(i, p, &run, &dir)
        })
        .collect();

    let mut m = ManifestBuilder::new(
        "sweep",
        json!({ "base": base, "alpha": alphas, "amplitude": a.amplitudes, "n": ns }),
    );
    let csv = dir.join("sweep.csv");
    let mut w = BufWriter::new(File::create(&csv)?);
    writeln!(w, "{SWEEP_HEADER}")?;
    let mut errored = 0;
    for (i, (row, ok, files)) in rows.into_iter().enumerate() {
        writeln!(w, "{row}")?;
        if !ok {
            errored += 1;
        }
        m.verdict(&format!("run_{i:03}"), ok);
        for f in files {
            m.output(f);
        }
    }
    w.flush()?;
    drop(w);
    m.output(csv);
    println!("sweep: {} runs, {errored} errored", points.len());
    let result = if errored == 0 { Ok(()) } else { Err(Failure::Check(format!("{errored} sweep runs errored"))) };
    m.write(&dir, result.as_ref().err().map_or(0, Failure::code))?;
    result
}
