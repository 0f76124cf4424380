use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robsynth::analyze::{self, Trace};
use robsynth::casestudies::{arbiter, minepump, CaseStudy, MinepumpParams};
use robsynth::robust::{lower, Criterion};
use robsynth::synth::{self, Controller, Problem, SynthParams};
use robsynth::Exec;

fn controllers(cs: &CaseStudy, k: u64, b: u64) -> Vec<(String, Problem, Controller)> {
    let mut out = Vec::new();
    for c in Criterion::catalog(k, b) {
        let p = Problem::new(&lower(&cs.robust(c)).unwrap()).unwrap();
        let Ok(sup) = p.mps() else { continue };
        let h = synth::mphos(&sup, &p.soft, &SynthParams::default(), Exec::default()).unwrap();
        out.push((format!("{c} mps"), p.clone(), synth::det_by_order(&sup, &cs.order).unwrap()));
        out.push((format!("{c} mphos"), p, synth::det_by_order(&h, &cs.order).unwrap()));
    }
    out
}

#[test]
fn long_run_value_matches_simulation() {
    let cases = [
        (arbiter(4, 3, 2).unwrap(), 1, 3),
        (minepump(MinepumpParams::default()).unwrap(), 2, 8),
    ];
    for (cs, k, b) in &cases {
        for (name, p, cnt) in controllers(cs, *k, *b) {
            let m = analyze::build_dtmc(&cnt, &p.soft).unwrap();
            let exact = analyze::long_run_value(&m).unwrap();
            assert!((0.0..=1.0).contains(&exact));
            let sim = analyze::monte_carlo(&m, 8, 125_000, 7, Exec::default());
            assert!((exact - sim).abs() < 3e-3, "{} {name}: {exact} vs {sim}", cs.name);
            assert_eq!(sim, analyze::monte_carlo(&m, 8, 125_000, 7, Exec::Sequential));
        }
    }
}

#[test]
fn sequential_and_parallel_values_agree() {
    let cs = arbiter(4, 3, 2).unwrap();
    for (name, p, cnt) in controllers(&cs, 1, 3) {
        let m = analyze::build_dtmc(&cnt, &p.soft).unwrap();
        let a = analyze::long_run_value_with(&m, Exec::Parallel).unwrap();
        let s = analyze::long_run_value_with(&m, Exec::Sequential).unwrap();
        assert!((a - s).abs() < 1e-12, "{name}");
    }
}

/// Arbiter traces with at most `i` simultaneous requests.
fn respecting_trace(cs: &CaseStudy, i: usize, len: usize, rng: &mut ChaCha8Rng) -> Trace {
    let n = cs.inputs.len();
    let rows = (0..len)
        .map(|_| loop {
            let row: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            if row.iter().filter(|x| **x).count() <= i {
                break row;
            }
        })
        .collect();
    Trace::new(cs.inputs.clone(), rows).unwrap()
}

#[test]
fn commitment_holds_while_assumption_holds() {
    let cs = arbiter(4, 3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let traces: Vec<Trace> = (0..40).map(|_| respecting_trace(&cs, 2, 60, &mut rng)).collect();
    for (name, p, cnt) in controllers(&cs, 1, 3) {
        if name.starts_with("AssumeFalse") {
            continue;
        }
        let props = [("C".to_string(), p.soft.clone())];
        for t in &traces {
            let out = analyze::simulate(&cnt, t, &props).unwrap();
            let c = out.column("C").unwrap();
            assert!(c.iter().all(|x| *x), "{name} breaks the commitment at step {:?}", c.iter().position(|x| !x));
            let a = out.column("A").unwrap();
            assert!(a.iter().all(|x| *x), "{name}: indicator must track the assumption");
        }
    }
}

#[test]
fn minepump_never_floods_under_assumption() {
    let cs = minepump(MinepumpParams::default()).unwrap();
    let p = Problem::new(&lower(&cs.robust(Criterion::BeCorrect)).unwrap()).unwrap();
    let cnt = synth::det_by_order(&p.mps().unwrap(), &cs.order).unwrap();
    let a = analyze::simulate(
        &cnt,
        &Trace::new(cs.inputs.clone(), vec![vec![false; cs.inputs.len()]; 30]).unwrap(),
        &[("C".into(), p.soft.clone())],
    )
    .unwrap();
    assert!(a.column("C").unwrap().iter().all(|x| *x));
}
