use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn robsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robsynth"))
        .args(args)
        .output()
        .expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("robsynth-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn arg(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn gen_arbiter(dir: &std::path::Path, n: &str, k: &str, i: &str) -> PathBuf {
    let spec = dir.join(format!("arbiter_{n}_{k}_{i}.qsf"));
    let o = robsynth(&["gen", "arbiter", n, k, i, "--out", arg(&spec)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    spec
}

#[test]
fn eval_prints_prefix_verdicts() {
    let o = robsynth(&["eval", "--formula", "[[p]] ^ <q>", "--word", "{p} {p,q} {q}"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\t{p}\tfalse\n1\t{p,q}\ttrue\n2\t{q}\tfalse\n");
}

#[test]
fn syntax_error_exits_2() {
    let o = robsynth(&["eval", "--formula", "[[p", "--word", "{p}"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:4"));
}

#[test]
fn unknown_criterion_exits_2() {
    let dir = scratch("unknown");
    let spec = gen_arbiter(&dir, "2", "2", "1");
    let o = robsynth(&["synth", arg(&spec), "--criterion", "Nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compile_formula_to_dump_and_dot() {
    let o = robsynth(&["compile", "--formula", "[[p]]", "--emit", "dump"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("vars p"));
    let o = robsynth(&["compile", "--formula", "[[p]]", "--emit", "dot"]);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn assume_true_arbiter_is_unrealizable() {
    let dir = scratch("unreal");
    let spec = gen_arbiter(&dir, "4", "3", "2");
    let o = robsynth(&["synth", arg(&spec), "--criterion", "AssumeTrue", "--stage", "mps"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("AssumeTrue"));
}

#[test]
fn expected_value_of_mps_controller() {
    let dir = scratch("expect");
    let spec = gen_arbiter(&dir, "4", "3", "2");
    let cnt = dir.join("len_burst.cnt");
    let o = robsynth(&[
        "synth",
        arg(&spec),
        "--criterion",
        "LenBurstInt",
        "--k",
        "1",
        "--b",
        "3",
        "--stage",
        "mps-controller",
        "--out",
        arg(&cnt),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let tra = dir.join("m.tra");
    let lab = dir.join("m.lab");
    let o = robsynth(&[
        "expect",
        arg(&cnt),
        "--prop",
        arg(&spec),
        "--tra",
        arg(&tra),
        "--lab",
        arg(&lab),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.835205\n");
    assert!(fs::read_to_string(&tra).unwrap().starts_with("STATES "));
    assert!(fs::read_to_string(&lab).unwrap().starts_with("#DECLARATION\ntarget\n#END\n"));
}

#[test]
fn identical_supervisors_are_must_equivalent() {
    let dir = scratch("dominance");
    let spec = gen_arbiter(&dir, "2", "2", "1");
    let sup = dir.join("a.sup");
    let o = robsynth(&["synth", arg(&spec), "--criterion", "BeCorrect", "--stage", "mps", "--out", arg(&sup)]);
    assert!(o.status.success());
    let o = robsynth(&["dominance", arg(&sup), arg(&sup), "--commit", arg(&spec)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "MustEquivalent\n");
}

#[test]
fn dominance_rejects_different_signatures() {
    let dir = scratch("mismatch");
    let a = gen_arbiter(&dir, "2", "2", "1");
    let b = gen_arbiter(&dir, "3", "2", "1");
    let sa = dir.join("a.sup");
    let sb = dir.join("b.sup");
    for (spec, sup) in [(&a, &sa), (&b, &sb)] {
        let o = robsynth(&["synth", arg(spec), "--criterion", "BeCorrect", "--stage", "mps", "--out", arg(sup)]);
        assert!(o.status.success());
    }
    let o = robsynth(&["dominance", arg(&sa), arg(&sb), "--commit", arg(&a)]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn simulate_appends_outputs_and_verdicts() {
    let dir = scratch("simulate");
    let spec = gen_arbiter(&dir, "2", "2", "1");
    let cnt = dir.join("c.cnt");
    let o = robsynth(&["synth", arg(&spec), "--criterion", "BeCurrentlyCorrect", "--out", arg(&cnt)]);
    assert!(o.status.success());
    let trace = dir.join("in.csv");
    fs::write(&trace, "r1,r2\n1,0\n0,1\n0,0\n").unwrap();
    let o = robsynth(&[
        "simulate",
        arg(&cnt),
        "--trace",
        arg(&trace),
        "--prop",
        "M=EP(!(a1 && a2))",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r1,r2,a1,a2,A,M"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with(",1")));

    fs::write(&trace, "r1,zz\n1,0\n").unwrap();
    let o = robsynth(&["simulate", arg(&cnt), "--trace", arg(&trace)]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn lattice_is_valid() {
    let o = robsynth(&["lattice", "--k", "1", "--b", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("lhs\trhs\tverdict\tcounterexample\n"));
    assert!(text.lines().skip(1).all(|l| l.split('\t').nth(2) == Some("VALID")));
    assert!(text.contains("AssumeFalse\tBeCorrect\tVALID"));
}

#[test]
fn output_is_deterministic() {
    let dir = scratch("determinism");
    let spec = gen_arbiter(&dir, "3", "2", "1");
    let run = |extra: &[&str]| {
        let mut args = vec!["synth", arg(&spec), "--criterion", "ResCntInt"];
        args.extend_from_slice(extra);
        stdout(&robsynth(&args))
    };
    let a = run(&[]);
    assert_eq!(a, run(&[]));
    assert_eq!(a, run(&["--sequential"]));
}

#[test]
fn minepump_generation_round_trips() {
    let dir = scratch("minepump");
    let spec = dir.join("mp.qsf");
    let o = robsynth(&["gen", "minepump", "8", "2", "6", "2", "--out", arg(&spec)]);
    assert!(o.status.success());
    let o = robsynth(&["compile", arg(&spec), "--part", "soft"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = robsynth(&["gen", "minepump", "0", "2", "6", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
