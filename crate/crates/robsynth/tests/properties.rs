mod common;

use proptest::prelude::*;

use common::{formula_strategy, oracle_disagreement};
use robsynth::analyze::must_inputs;
use robsynth::ast::{desugar, parse_formula_unchecked, Formula};
use robsynth::compile::compile;
use robsynth::dfa::{Alphabet, BoolOp, Dfa};
use robsynth::synth::{self, IoSignature, Supervisor, SynthParams};
use robsynth::{Error, Exec};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Formulas over the game signature: input `p`, output `q`.
fn game_formula() -> impl Strategy<Value = Formula> {
    formula_strategy().prop_filter("free variables within {p, q}", |f| !f.free_vars().contains("x"))
}

/// Hard requirements: random automata over `{p, q}` with mostly accepting
/// states, or compiled formulas.
fn hard_dfa() -> impl Strategy<Value = Dfa> {
    let random = (2usize..9).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::bool::weighted(0.8), n),
            prop::collection::vec(0..n as u32, n * 4),
        )
            .prop_map(|(acc, next)| Dfa::from_parts(Alphabet::new(["p", "q"]).unwrap(), 0, acc, next).unwrap())
    });
    prop_oneof![
        3 => random,
        1 => game_formula().prop_map(|f| game_dfa(&f)),
    ]
}

fn game_io() -> IoSignature {
    IoSignature::new(&["p"], &["q"]).unwrap()
}

fn game_dfa(f: &Formula) -> Dfa {
    compile(f, &Alphabet::new(["p", "q"]).unwrap()).unwrap()
}

/// Every word of length 1..=max over `letters` letters.
fn words(letters: u32, max: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut layer = vec![Vec::new()];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<u32>| {
                (0..letters).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Winning states of the safety game on `hard`, by naive fixpoint over an
/// explicit state set. Letter `l = i | o << 1`.
fn naive_winning(hard: &Dfa) -> Vec<bool> {
    let n = hard.state_count();
    let mut win: Vec<bool> = (0..n).map(|s| hard.is_accepting(s as _)).collect();
    loop {
        let next: Vec<bool> = (0..n)
            .map(|s| win[s] && (0..2).all(|i| (0..2).any(|o| win[hard.step(s as _, i | o << 1) as usize])))
            .collect();
        if next == win {
            return win;
        }
        win = next;
    }
}

fn stays_winning(hard: &Dfa, win: &[bool], w: &[u32]) -> bool {
    let mut s = hard.initial();
    w.iter().all(|&l| {
        s = hard.step(s, l);
        win[s as usize]
    })
}

fn accepts(sup: &Supervisor, w: &[u32]) -> bool {
    sup.dfa().accepts(w).unwrap()
}

/// Brute-force must inputs: `ii` qualifies when every output completion
/// allowed by `sup` satisfies `commit`.
fn naive_must(sup: &Supervisor, commit: &Dfa, ii: &[u32]) -> bool {
    let n = ii.len();
    (0..1u32 << n).all(|outs| {
        let w: Vec<u32> = ii.iter().enumerate().map(|(j, &i)| i | (outs >> j & 1) << 1).collect();
        !accepts(sup, &w) || commit.accepts(&w).unwrap()
    })
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn printer_round_trips(f in formula_strategy()) {
        let text = f.to_string();
        prop_assert_eq!(parse_formula_unchecked(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn desugar_is_idempotent(f in formula_strategy()) {
        let d = desugar(&f);
        prop_assert!(d.is_core());
        prop_assert_eq!(desugar(&d), d);
    }

    #[test]
    fn desugar_preserves_language(f in formula_strategy()) {
        let alpha = common::free_alphabet(&f);
        prop_assert!(compile(&f, &alpha).unwrap().equivalent(&compile(&desugar(&f), &alpha).unwrap()).unwrap());
    }

    #[test]
    fn minimization_is_idempotent(f in formula_strategy()) {
        let d = compile(&f, &common::free_alphabet(&f)).unwrap();
        let m = d.minimize();
        prop_assert_eq!(m.state_count(), d.state_count());
        prop_assert!(m.equivalent(&d).unwrap());
        prop_assert_eq!(m.minimize().state_count(), m.state_count());
    }

    #[test]
    fn complement_laws(f in game_formula(), g in game_formula()) {
        let (a, b) = (game_dfa(&f), game_dfa(&g));
        prop_assert!(a.complement().complement().equivalent(&a).unwrap());
        prop_assert!(a.intersect(&a.complement()).unwrap().is_empty());
        let lhs = a.product(&b, BoolOp::And).unwrap().complement();
        let rhs = a.complement().product(&b.complement(), BoolOp::Or).unwrap();
        prop_assert!(lhs.equivalent(&rhs).unwrap());
    }

    #[test]
    fn chop_is_associative(f in game_formula(), g in game_formula(), h in game_formula()) {
        let left = Formula::chop(Formula::chop(f.clone(), g.clone()), h.clone());
        let right = Formula::chop(f, Formula::chop(g, h));
        prop_assert!(game_dfa(&left).equivalent(&game_dfa(&right)).unwrap());
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn compiler_agrees_with_oracle(f in formula_strategy()) {
        prop_assert_eq!(oracle_disagreement(&f, 5), None, "{}", f);
    }

    #[test]
    fn mps_is_the_maximal_safe_supervisor(hard in hard_dfa()) {
        prop_assume!(hard.state_count() <= 64);
        let win = naive_winning(&hard);
        let realizable = (0..2).all(|i| (0..2).any(|o| win[hard.step(hard.initial(), i | o << 1) as usize]));
        match synth::mps(&hard, &game_io()) {
            Err(Error::Unrealizable(_)) => prop_assert!(!realizable),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
            Ok(sup) => {
                prop_assert!(realizable);
                prop_assert!(sup.is_nonblocking());
                for w in words(4, 4) {
                    prop_assert_eq!(accepts(&sup, &w), stays_winning(&hard, &win, &w), "{:?}", w);
                    if accepts(&sup, &w) {
                        prop_assert!(hard.accepts(&w).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn mphos_and_determinization_refine(hard in hard_dfa(), g in game_formula()) {
        let Ok(sup) = synth::mps(&hard, &game_io()) else { return Ok(()) };
        let soft = game_dfa(&g);
        let params = SynthParams { horizon: 6, ..SynthParams::default() };
        let h = synth::mphos(&sup, &soft, &params, Exec::default()).unwrap();
        prop_assert!(sup.includes(&h).unwrap());
        prop_assert!(h.is_nonblocking());
        prop_assert_eq!(&h, &synth::mphos(&sup, &soft, &params, Exec::Sequential).unwrap());

        let c = synth::det_by_order(&h, &synth::parse_order("q").unwrap()).unwrap();
        let c = c.supervisor();
        prop_assert!(c.is_deterministic() && c.is_nonblocking());
        prop_assert!(h.includes(c).unwrap());
        for s in 0..c.state_count() as u32 {
            if s != c.reject() {
                for i in 0..2 {
                    prop_assert_eq!(c.allowed(s, i).len(), 1);
                }
            }
        }
    }

    #[test]
    fn must_inputs_match_brute_force(hard in hard_dfa(), g in game_formula()) {
        let Ok(sup) = synth::mps(&hard, &game_io()) else { return Ok(()) };
        let commit = game_dfa(&g);
        let must = must_inputs(&sup, &commit).unwrap();
        for ii in words(2, 4) {
            prop_assert_eq!(must.accepts(&ii).unwrap(), naive_must(&sup, &commit, &ii), "{:?}", ii);
        }
    }

    #[test]
    fn refinement_preserves_must_guarantees(hard in hard_dfa(), g in game_formula(), pos in any::<bool>()) {
        let Ok(sup) = synth::mps(&hard, &game_io()) else { return Ok(()) };
        let commit = game_dfa(&g);
        let order = synth::parse_order(if pos { "q" } else { "!q" }).unwrap();
        let c = synth::det_by_order(&sup, &order).unwrap();
        let c = c.supervisor();
        for ii in words(2, 5) {
            if naive_must(&sup, &commit, &ii) {
                prop_assert!(naive_must(c, &commit, &ii), "{:?}", ii);
            }
        }
        prop_assert!(must_inputs(c, &commit).unwrap().includes(&must_inputs(&sup, &commit).unwrap()).unwrap());
    }
}
