use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orlicz-stokes"))
}

#[test]
fn nfunc_verify_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["nfunc-verify", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["nfunc_verify.csv", "checks.csv", "manifest.csv", "summary.txt", "config.toml"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let manifest = std::fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
    let header = manifest.lines().next().unwrap();
    assert_eq!(header, "experiment,config_sha256,modules,seed,file,file_sha256,bytes");
    assert!(manifest.lines().skip(1).all(|l| l.starts_with("nfunc-verify,")));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0 failed"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[sweep]\np = [0.5]\n").unwrap();
    let out = bin().args(["decay", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));

    std::fs::write(&cfg, "experiment = \"decay\"\n").unwrap();
    let out = bin().args(["convergence", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["decay", "--config", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    // a pure power law with p = 1.4 violates the growth needed by the convective term
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ns.toml");
    std::fs::write(&cfg, "[sweep]\np = [1.4]\n").unwrap();
    let out = bin().args(["navier-stokes", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    // rejecting p = 1.4 is the expected behavior, so this check passes
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("growth condition enforced p=1.4"));

    let cfg2 = dir.path().join("hs.toml");
    // at the default seed the Carreau p = 1.5 intervals widen by more than
    // 10% when the sample is doubled
    std::fs::write(&cfg2, "[sweep]\np = [1.5]\nkappa = [0.0]\nmodels = [\"carreau\"]\n").unwrap();
    let out = bin().args(["hammer-sweep", "--config"]).arg(&cfg2).arg("--out").arg(dir.path().join("h")).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "{stdout}");
    assert!(stdout.contains("[FAIL]"));
}

#[test]
fn print_config_reflects_flags() {
    let out = bin().args(["main-estimate", "--seed", "99", "--out", "somewhere", "--print-config"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("seed = 99"));
    assert!(text.contains("output_dir = \"somewhere\""));
    assert!(text.contains("experiment = \"main-estimate\""));
}

#[test]
fn seeds_change_sampled_outputs_only_through_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[sweep]\np = [3.0]\nkappa = [1.0]\nmodels = [\"carreau\"]\nsamples = 500\n").unwrap();
    let run = |seed: &str, sub: &str| {
        let o = dir.path().join(sub);
        bin().args(["hammer-sweep", "--threads", "1", "--seed", seed, "--config"]).arg(&cfg).arg("--out").arg(&o).output().unwrap();
        std::fs::read(o.join("hammer_summary.csv")).unwrap()
    };
    let a = run("1", "a");
    let b = run("1", "b");
    let c = run("2", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
}
