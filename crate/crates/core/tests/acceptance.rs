//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::time::{Duration, Instant};

use orlicz_stokes::harness::{run, Check, Experiment, ExperimentConfig, ExperimentReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(exp: Experiment, edit: impl FnOnce(&mut ExperimentConfig)) -> (ExperimentReport, Duration) {
    let mut cfg = ExperimentConfig::defaults(exp);
    edit(&mut cfg);
    let t = Instant::now();
    let rep = run(&cfg).unwrap_or_else(|e| panic!("{} failed to run: {e}", exp.name()));
    (rep, t.elapsed())
}

fn select<'a>(rep: &'a ExperimentReport, prefixes: &[&str]) -> Vec<&'a Check> {
    rep.checks.iter().filter(|c| prefixes.iter().any(|p| c.name.starts_with(p))).collect()
}

fn judge(checks: &[&Check], limit: Option<(Duration, Duration)>) -> Outcome {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let mut pass = !checks.is_empty() && failed.is_empty();
    let mut detail = format!("{} checks", checks.len());
    if let Some((took, max)) = limit {
        pass &= took <= max;
        detail.push_str(&format!(", {:.1} s (limit {} s)", took.as_secs_f64(), max.as_secs()));
    }
    if !failed.is_empty() {
        detail.push_str(&format!("; failing: {}", failed.join(" | ")));
    }
    Outcome { pass, detail }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn criterion_1() -> Outcome {
    let (rep, t) = timed(Experiment::NfuncVerify, |_| {});
    judge(&select(&rep, &["structural inequalities"]), Some((t, secs(10))))
}

fn criteria_2_3() -> (Outcome, Outcome) {
    let (rep, t) = timed(Experiment::HammerSweep, |_| {});
    let c2 = judge(&select(&rep, &["hammer ratios bounded", "Newtonian intervals collapse"]), Some((t, secs(30))));
    let c3 = judge(&select(&rep, &["shift/duality routes agree"]), None);
    (c2, c3)
}

fn criteria_4_5_6() -> (Outcome, Outcome, Outcome) {
    let (rep, t) = timed(Experiment::Convergence, |_| {});
    let c4 = judge(
        &select(&rep, &["Newtonian path matches direct solve p=2", "second-order convergence p=2"]),
        Some((t, secs(120))),
    );
    let c5 = judge(&select(&rep, &["V(Du) error decreases under refinement p=3", "divergence constraint p=3"]), None);
    let c6 = judge(&select(&rep, &["energy minimality"]), None);
    (c4, c5, c6)
}

fn criterion_7() -> Outcome {
    let mut checks = Vec::new();
    let mut slowest = Duration::ZERO;
    for p in [1.5, 2.0, 3.0] {
        let (rep, t) = timed(Experiment::Decay, |c| c.sweep.p = vec![p]);
        slowest = slowest.max(t);
        checks.extend(rep.checks);
    }
    let refs: Vec<&Check> = checks.iter().collect();
    let mut o = judge(&refs, Some((slowest, secs(300))));
    o.detail.push_str(" (slowest p)");
    o
}

fn criterion_8() -> Outcome {
    let (rep, _) = timed(Experiment::MainEstimate, |_| {});
    let checks = select(&rep, &["estimate ratio finite", "estimate ratio mesh-stable", "ratio invariant under doubling G"]);
    let mut o = judge(&checks, None);
    let recipes = ["smooth", "holder", "log"];
    o.pass &= recipes.iter().all(|r| checks.iter().any(|c| c.name.contains(r)));
    o
}

fn criterion_9() -> Outcome {
    let (rep, _) = timed(Experiment::HolderTransfer, |_| {});
    let mut o = judge(&select(&rep, &["Hoelder quotient of Du"]), None);
    if !rep.notes.is_empty() {
        o.detail.push_str(&format!(", {} ungated points", rep.notes.len()));
    }
    o
}

fn criterion_10() -> Outcome {
    let runs: [(Experiment, fn(&mut ExperimentConfig)); 4] = [
        (Experiment::NfuncVerify, |_| {}),
        (Experiment::HammerSweep, |c| {
            c.sweep.samples = 2000;
            c.sweep.write_pairs = true;
        }),
        (Experiment::NavierStokes, |_| {}),
        (Experiment::MainEstimate, |c| {
            c.sweep.p = vec![3.0];
            c.sweep.meshes = vec![32];
        }),
    ];
    let mut compared = 0;
    let mut differing = Vec::new();
    for (exp, edit) in runs {
        let mut cfg = ExperimentConfig::defaults(exp);
        edit(&mut cfg);
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            run(&cfg).unwrap().write(&cfg, d.path()).unwrap();
        }
        let mut names: Vec<_> = std::fs::read_dir(dirs[0].path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            let a = std::fs::read(dirs[0].path().join(&name)).unwrap();
            let b = std::fs::read(dirs[1].path().join(&name)).ok();
            compared += 1;
            if b.as_deref() != Some(&a[..]) {
                differing.push(format!("{}/{}", exp.name(), name.to_string_lossy()));
            }
        }
    }
    Outcome {
        pass: differing.is_empty() && compared > 0,
        detail: format!("{compared} files compared byte for byte; differing: {differing:?}"),
    }
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let t = Instant::now();
    results.push((1, "N-function suite", criterion_1()));
    let (c2, c3) = criteria_2_3();
    results.push((2, "stress equivalences on random pairs", c2));
    results.push((3, "shift and conjugation routes", c3));
    let (c4, c5, c6) = criteria_4_5_6();
    results.push((4, "Newtonian reduction", c4));
    results.push((5, "nonlinear manufactured solution", c5));
    results.push((6, "energy minimality", c6));
    results.push((7, "oscillation decay", criterion_7()));
    results.push((8, "main estimate structure", criterion_8()));
    results.push((9, "Hoelder transfer", criterion_9()));
    results.push((10, "determinism", criterion_10()));
    let mut all = true;
    for (k, name, o) in &results {
        all &= o.pass;
        println!("{} criterion {k:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("total {:.1} s", t.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
