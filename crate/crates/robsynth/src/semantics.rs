//! Reference satisfaction relation, evaluated directly on words.
//!
//! Nothing here touches automata: this module is the independent oracle the
//! compiler is tested against. Two evaluators are provided. The recursive
//! functions ([`eval`], [`whole_word`], [`point_sat`]) follow the clauses
//! literally. [`Oracle`] computes the same relation for all subintervals at
//! once with bitset tables, which makes exhaustive cross-checks affordable.

use crate::ast::{desugar, Bound, CmpOp, Formula, Prop};
use crate::dfa::{Alphabet, Word};
use crate::error::{Error, Result};

/// Words of this length or more cannot be handled by [`Oracle`].
pub const ORACLE_MAX_LEN: usize = 64;

/// Letter valuations with named bits; later names shadow earlier ones.
struct Env {
    names: Vec<String>,
    letters: Vec<u64>,
}

impl Env {
    fn of(w: &Word) -> Env {
        Env {
            names: w.alphabet.vars().to_vec(),
            letters: w.letters.iter().map(|&l| l as u64).collect(),
        }
    }

    fn prop(&self, i: usize, p: &Prop) -> bool {
        let l = self.letters[i];
        p.eval(&|v: &str| {
            let bit = self.names.iter().rposition(|x| x == v).expect("variables checked");
            l >> bit & 1 == 1
        })
    }
}

fn check_word(w: &Word) -> Result<()> {
    if w.letters.is_empty() {
        return Err(Error::Invalid("words must be nonempty".into()));
    }
    let k = w.alphabet.letter_count() as u32;
    if w.letters.iter().any(|&l| l >= k) {
        return Err(Error::AlphabetMismatch("letter outside the alphabet".into()));
    }
    Ok(())
}

fn check_vars(alphabet: &Alphabet, vars: impl IntoIterator<Item = String>) -> Result<()> {
    for v in vars {
        if !alphabet.contains(&v) {
            return Err(Error::UnknownVariable(v));
        }
    }
    Ok(())
}

fn lit(b: &Bound) -> Result<u64> {
    b.value().ok_or_else(|| Error::UnknownConstant(b.to_string()))
}

/// Value of a propositional formula at position `i`.
pub fn eval_prop(w: &Word, i: usize, p: &Prop) -> Result<bool> {
    check_word(w)?;
    if i >= w.len() {
        return Err(Error::Invalid(format!("position {i} outside a word of length {}", w.len())));
    }
    let mut vars = std::collections::BTreeSet::new();
    p.vars(&mut vars);
    check_vars(&w.alphabet, vars)?;
    Ok(Env::of(w).prop(i, p))
}

/// `w, [b,e] ⊨ d`.
pub fn eval(w: &Word, b: usize, e: usize, d: &Formula) -> Result<bool> {
    check_word(w)?;
    if b > e || e >= w.len() {
        return Err(Error::Invalid(format!(
            "interval [{b},{e}] outside a word of length {}",
            w.len()
        )));
    }
    check_vars(&w.alphabet, d.free_vars())?;
    let mut env = Env::of(w);
    sat(&mut env, b, e, d)
}

/// `w ⊨ d`: the formula holds on the whole word.
pub fn whole_word(w: &Word, d: &Formula) -> Result<bool> {
    check_word(w)?;
    eval(w, 0, w.len() - 1, d)
}

/// `w, i ⊨ d`: the formula holds on the prefix interval `[0,i]`.
pub fn point_sat(w: &Word, i: usize, d: &Formula) -> Result<bool> {
    eval(w, 0, i, d)
}

fn sat(env: &mut Env, b: usize, e: usize, d: &Formula) -> Result<bool> {
    use Formula::*;
    Ok(match d {
        True => true,
        False => false,
        Pt => b == e,
        Ext => b < e,
        Point(p) => b == e && env.prop(b, p),
        AllButLast(p) => b < e && (b..e).all(|i| env.prop(i, p)),
        All(p) => (b..=e).all(|i| env.prop(i, p)),
        Unit(p) => e == b + 1 && env.prop(b, p),
        Ep(p) => env.prop(e, p),
        Chop(x, y) => {
            for i in b..=e {
                if sat(env, b, i, x)? && sat(env, i, e, y)? {
                    return Ok(true);
                }
            }
            false
        }
        Not(x) => !sat(env, b, e, x)?,
        And(x, y) => sat(env, b, e, x)? && sat(env, b, e, y)?,
        Or(x, y) => sat(env, b, e, x)? || sat(env, b, e, y)?,
        Implies(x, y) => !sat(env, b, e, x)? || sat(env, b, e, y)?,
        Iff(x, y) => sat(env, b, e, x)? == sat(env, b, e, y)?,
        Ex(v, x) => exists(env, b, e, v, x)?,
        AllQ(v, x) => !exists(env, b, e, v, &Formula::not((**x).clone()))?,
        SLen(op, c) => op.holds((e - b) as u64, lit(c)?),
        SCount(p, op, c) => op.holds((b..=e).filter(|&i| env.prop(i, p)).count() as u64, lit(c)?),
        SDur(p, op, c) => op.holds((b..e).filter(|&i| env.prop(i, p)).count() as u64, lit(c)?),
        Diamond(x) => {
            for i in b..=e {
                for j in i..=e {
                    if sat(env, i, j, x)? {
                        return Ok(true);
                    }
                }
            }
            false
        }
        Boxed(x) => {
            for i in b..=e {
                for j in i..=e {
                    if !sat(env, i, j, x)? {
                        return Ok(false);
                    }
                }
            }
            true
        }
        Pref(x) => {
            for i in b..=e {
                if !sat(env, b, i, x)? {
                    return Ok(false);
                }
            }
            true
        }
        KBounded(..) => sat(env, b, e, &desugar(d))?,
        Call(name, _) => return Err(Error::UnknownDefinition(name.clone())),
    })
}

/// Tries every valuation of `v` over all positions of the word.
fn exists(env: &mut Env, b: usize, e: usize, v: &str, body: &Formula) -> Result<bool> {
    let n = env.letters.len();
    if n >= 63 || env.names.len() >= 64 {
        return Err(Error::ResourceLimit("word too long for quantifier enumeration".into()));
    }
    let bit = env.names.len();
    env.names.push(v.to_string());
    let saved = env.letters.clone();
    let mut found = false;
    for m in 0..1u64 << n {
        for (i, l) in env.letters.iter_mut().enumerate() {
            *l = saved[i] & !(1 << bit) | ((m >> i) & 1) << bit;
        }
        match sat(env, b, e, body) {
            Ok(true) => {
                found = true;
                break;
            }
            Ok(false) => {}
            Err(err) => {
                env.letters = saved;
                env.names.pop();
                return Err(err);
            }
        }
    }
    env.letters = saved;
    env.names.pop();
    Ok(found)
}

/// Every word over `alphabet` of length `1..=max_len`, shortest first and
/// lexicographically (by letter index) within a length.
pub fn enumerate_words(alphabet: &Alphabet, max_len: usize) -> impl Iterator<Item = Word> + '_ {
    let k = alphabet.letter_count() as u64;
    (1..=max_len).flat_map(move |len| {
        let total = k.checked_pow(len as u32).expect("word count overflows u64");
        (0..total).map(move |mut x| {
            let mut letters = vec![0u32; len];
            for slot in letters.iter_mut().rev() {
                *slot = (x % k) as u32;
                x /= k;
            }
            Word::new(alphabet.clone(), letters)
        })
    })
}

#[derive(Debug, Clone)]
enum P {
    Const(bool),
    Var(usize),
    Not(Box<P>),
    And(Box<P>, Box<P>),
    Or(Box<P>, Box<P>),
}

impl P {
    fn eval(&self, l: u64) -> bool {
        match self {
            P::Const(c) => *c,
            P::Var(i) => l >> i & 1 == 1,
            P::Not(p) => !p.eval(l),
            P::And(a, b) => a.eval(l) && b.eval(l),
            P::Or(a, b) => a.eval(l) || b.eval(l),
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    True,
    Point(P),
    AllButLast(P),
    All(P),
    Unit(P),
    Chop(Box<Node>, Box<Node>),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Ex(usize, Box<Node>),
    SLen(CmpOp, u64),
    SCount(P, CmpOp, u64),
    SDur(P, CmpOp, u64),
}

/// Interval-table evaluator. `table(w)[b]` has bit `e` set iff the formula
/// holds on `[b,e]`.
#[derive(Debug, Clone)]
pub struct Oracle {
    alphabet: Alphabet,
    root: Node,
}

impl Oracle {
    pub fn new(d: &Formula, alphabet: &Alphabet) -> Result<Oracle> {
        check_vars(alphabet, d.free_vars())?;
        let mut names = alphabet.vars().to_vec();
        let root = lower(&desugar(d), &mut names)?;
        Ok(Oracle {
            alphabet: alphabet.clone(),
            root,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn table(&self, letters: &[u32]) -> Vec<u64> {
        assert!(
            !letters.is_empty() && letters.len() < ORACLE_MAX_LEN,
            "oracle words must have length 1..{ORACLE_MAX_LEN}"
        );
        let ls: Vec<u64> = letters.iter().map(|&l| l as u64).collect();
        table(&self.root, &ls)
    }

    /// Bit `i` set iff the formula holds on `[0,i]`.
    pub fn prefixes(&self, letters: &[u32]) -> u64 {
        self.table(letters)[0]
    }

    pub fn whole(&self, letters: &[u32]) -> bool {
        self.prefixes(letters) >> (letters.len() - 1) & 1 == 1
    }
}

fn lower_prop(p: &Prop, names: &[String]) -> Result<P> {
    let b = |x: &Prop| -> Result<Box<P>> { Ok(Box::new(lower_prop(x, names)?)) };
    Ok(match p {
        Prop::False => P::Const(false),
        Prop::True => P::Const(true),
        Prop::Var(v) => P::Var(
            names
                .iter()
                .rposition(|x| x == v)
                .ok_or_else(|| Error::UnknownVariable(v.clone()))?,
        ),
        Prop::Not(a) => P::Not(b(a)?),
        Prop::And(x, y) => P::And(b(x)?, b(y)?),
        Prop::Or(x, y) => P::Or(b(x)?, b(y)?),
        Prop::Implies(x, y) => P::Or(Box::new(P::Not(b(x)?)), b(y)?),
        Prop::Iff(x, y) => {
            let (x, y) = (lower_prop(x, names)?, lower_prop(y, names)?);
            P::Or(
                Box::new(P::And(Box::new(x.clone()), Box::new(y.clone()))),
                Box::new(P::And(Box::new(P::Not(Box::new(x))), Box::new(P::Not(Box::new(y))))),
            )
        }
    })
}

fn lower(d: &Formula, names: &mut Vec<String>) -> Result<Node> {
    use Formula as F;
    let b = |x: &Formula, names: &mut Vec<String>| -> Result<Box<Node>> { Ok(Box::new(lower(x, names)?)) };
    Ok(match d {
        F::True => Node::True,
        F::Point(p) => Node::Point(lower_prop(p, names)?),
        F::AllButLast(p) => Node::AllButLast(lower_prop(p, names)?),
        F::All(p) => Node::All(lower_prop(p, names)?),
        F::Unit(p) => Node::Unit(lower_prop(p, names)?),
        F::Chop(x, y) => Node::Chop(b(x, names)?, b(y, names)?),
        F::Not(x) => Node::Not(b(x, names)?),
        F::And(x, y) => Node::And(b(x, names)?, b(y, names)?),
        F::Or(x, y) => Node::Or(b(x, names)?, b(y, names)?),
        F::Ex(v, x) | F::AllQ(v, x) => {
            if names.len() >= 64 {
                return Err(Error::ResourceLimit("too many nested quantifiers".into()));
            }
            let bit = names.len();
            names.push(v.clone());
            let body = lower(x, names);
            names.pop();
            let body = body?;
            if matches!(d, F::Ex(..)) {
                Node::Ex(bit, Box::new(body))
            } else {
                Node::Not(Box::new(Node::Ex(bit, Box::new(Node::Not(Box::new(body))))))
            }
        }
        F::SLen(op, c) => Node::SLen(*op, lit(c)?),
        F::SCount(p, op, c) => Node::SCount(lower_prop(p, names)?, *op, lit(c)?),
        F::SDur(p, op, c) => Node::SDur(lower_prop(p, names)?, *op, lit(c)?),
        F::Call(name, _) => return Err(Error::UnknownDefinition(name.clone())),
        _ => unreachable!("desugared"),
    })
}

/// Bits `b..n` set.
fn from(b: usize, n: usize) -> u64 {
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    all & !((1u64 << b) - 1)
}

fn table(node: &Node, ls: &[u64]) -> Vec<u64> {
    let n = ls.len();
    let mut t = vec![0u64; n];
    match node {
        Node::True => (0..n).for_each(|b| t[b] = from(b, n)),
        Node::Point(p) => (0..n).filter(|&b| p.eval(ls[b])).for_each(|b| t[b] = 1 << b),
        Node::AllButLast(p) => {
            for b in 0..n {
                let mut e = b + 1;
                while e < n && p.eval(ls[e - 1]) {
                    t[b] |= 1 << e;
                    e += 1;
                }
            }
        }
        Node::All(p) => {
            for b in 0..n {
                let mut e = b;
                while e < n && p.eval(ls[e]) {
                    t[b] |= 1 << e;
                    e += 1;
                }
            }
        }
        Node::Unit(p) => {
            for b in 0..n.saturating_sub(1) {
                if p.eval(ls[b]) {
                    t[b] = 1 << (b + 1);
                }
            }
        }
        Node::Chop(x, y) => {
            let (tx, ty) = (table(x, ls), table(y, ls));
            for b in 0..n {
                let mut m = tx[b];
                while m != 0 {
                    let i = m.trailing_zeros() as usize;
                    t[b] |= ty[i];
                    m &= m - 1;
                }
            }
        }
        Node::Not(x) => {
            let tx = table(x, ls);
            (0..n).for_each(|b| t[b] = !tx[b] & from(b, n));
        }
        Node::And(x, y) => {
            let (tx, ty) = (table(x, ls), table(y, ls));
            (0..n).for_each(|b| t[b] = tx[b] & ty[b]);
        }
        Node::Or(x, y) => {
            let (tx, ty) = (table(x, ls), table(y, ls));
            (0..n).for_each(|b| t[b] = tx[b] | ty[b]);
        }
        Node::Ex(bit, x) => {
            let mut ls2 = ls.to_vec();
            for m in 0..1u64 << n {
                for i in 0..n {
                    ls2[i] = ls[i] & !(1 << bit) | ((m >> i) & 1) << bit;
                }
                let tx = table(x, &ls2);
                (0..n).for_each(|b| t[b] |= tx[b]);
            }
        }
        Node::SLen(op, c) => {
            for b in 0..n {
                for e in b..n {
                    if op.holds((e - b) as u64, *c) {
                        t[b] |= 1 << e;
                    }
                }
            }
        }
        Node::SCount(p, op, c) | Node::SDur(p, op, c) => {
            let mut prefix = vec![0u64; n + 1];
            for i in 0..n {
                prefix[i + 1] = prefix[i] + p.eval(ls[i]) as u64;
            }
            let dur = matches!(node, Node::SDur(..));
            for b in 0..n {
                for e in b..n {
                    let count = if dur { prefix[e] - prefix[b] } else { prefix[e + 1] - prefix[b] };
                    if op.holds(count, *c) {
                        t[b] |= 1 << e;
                    }
                }
            }
        }
    }
    t
}
