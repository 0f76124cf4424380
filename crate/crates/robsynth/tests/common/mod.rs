#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use robsynth::ast::{Bound, CmpOp, Formula, Prop};
use robsynth::compile::compile;
use robsynth::dfa::{Alphabet, Dfa};
use robsynth::semantics::Oracle;

/// Free variables drawn by the generators; `x` is also the bound name.
pub const VARS: [&str; 3] = ["p", "q", "x"];

pub fn prop_strategy() -> impl Strategy<Value = Prop> {
    let leaf = prop_oneof![
        6 => prop::sample::select(&VARS[..]).prop_map(Prop::var),
        1 => Just(Prop::True),
        1 => Just(Prop::False),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Prop::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Prop::Iff(Box::new(a), Box::new(b))),
        ]
    })
}

fn cmp() -> impl Strategy<Value = CmpOp> {
    prop::sample::select(vec![CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt])
}

fn bound() -> impl Strategy<Value = Bound> {
    (0u64..4).prop_map(Bound::Lit)
}

pub fn atom_strategy() -> impl Strategy<Value = Formula> {
    prop_oneof![
        prop_strategy().prop_map(Formula::Point),
        prop_strategy().prop_map(Formula::AllButLast),
        prop_strategy().prop_map(Formula::All),
        prop_strategy().prop_map(Formula::Unit),
        prop_strategy().prop_map(Formula::Ep),
        Just(Formula::True),
        Just(Formula::False),
        Just(Formula::Pt),
        Just(Formula::Ext),
        (cmp(), bound()).prop_map(|(o, c)| Formula::SLen(o, c)),
        (prop_strategy(), cmp(), bound()).prop_map(|(p, o, c)| Formula::SCount(p, o, c)),
        (prop_strategy(), cmp(), bound()).prop_map(|(p, o, c)| Formula::SDur(p, o, c)),
    ]
}

/// Formulas of depth at most 4 using every construct of the logic.
pub fn formula_strategy() -> impl Strategy<Value = Formula> {
    atom_strategy()
        .prop_recursive(3, 24, 2, |inner| {
            prop_oneof![
                3 => inner.clone().prop_map(Formula::not),
                3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
                5 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::chop(a, b)),
                2 => inner.clone().prop_map(|a| Formula::ex("x", a)),
                2 => inner.clone().prop_map(|a| Formula::all_q("x", a)),
                1 => inner.clone().prop_map(Formula::diamond),
                1 => inner.clone().prop_map(Formula::boxed),
                1 => inner.clone().prop_map(Formula::pref),
                1 => (inner, 1u64..3).prop_map(|(a, n)| Formula::kbounded(a, n)),
            ]
        })
        .prop_filter("depth at most 4", |f| f.depth() <= 4)
}

/// `count` formulas from a fixed seed.
pub fn sample_formulas(count: usize, seed: u8) -> Vec<Formula> {
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]);
    let mut runner = TestRunner::new_with_rng(Config::default(), rng);
    let strategy = formula_strategy();
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).expect("generator").current())
        .collect()
}

pub fn free_alphabet(f: &Formula) -> Alphabet {
    Alphabet::new(f.free_vars()).expect("small alphabet")
}

/// Accepting flag after each prefix of `letters`.
pub fn run_prefixes(d: &Dfa, letters: &[u32]) -> u64 {
    let mut s = d.initial();
    let mut bits = 0;
    for (i, &l) in letters.iter().enumerate() {
        s = d.step(s, l);
        bits |= (d.is_accepting(s) as u64) << i;
    }
    bits
}

/// First word (of length at most `len`) on which the compiled automaton and
/// the oracle disagree. Every word of length exactly `len` is enumerated;
/// its prefixes cover the shorter ones.
pub fn oracle_disagreement(f: &Formula, len: usize) -> Option<Vec<u32>> {
    let alpha = free_alphabet(f);
    let dfa = compile(f, &alpha).expect("compiles");
    let oracle = Oracle::new(f, &alpha).expect("oracle");
    let k = alpha.letter_count() as u64;
    let total = k.pow(len as u32);
    let mut letters = vec![0u32; len];
    for code in 0..total {
        let mut c = code;
        for l in letters.iter_mut() {
            *l = (c % k) as u32;
            c /= k;
        }
        let want = oracle.prefixes(&letters);
        let got = run_prefixes(&dfa, &letters);
        if want != got {
            let i = (want ^ got).trailing_zeros() as usize;
            return Some(letters[..=i].to_vec());
        }
    }
    None
}
