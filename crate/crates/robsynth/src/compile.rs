//! Formula to automaton translation.
//!
//! Every subformula is compiled over the alphabet of its own free variables
//! (ordered by their rank in the working variable order) and only widened
//! when combined with a sibling. Results are minimized and memoized.

use std::collections::HashMap;

use crate::ast::{desugar, Bound, Formula, Prop};
use crate::dfa::{Alphabet, Builder, Dfa, Word};
use crate::error::{Error, Result};

/// Compiles formulas to minimal automata, caching shared subformulas.
#[derive(Debug, Default)]
pub struct Compiler {
    memo: HashMap<(Formula, Vec<String>), Dfa>,
}

impl Compiler {
    pub fn new() -> Compiler {
        Compiler::default()
    }

    /// Number of cached subformula automata.
    pub fn cached(&self) -> usize {
        self.memo.len()
    }

    /// Minimal automaton over `env` accepting exactly the words satisfying `d`.
    pub fn compile(&mut self, d: &Formula, env: &Alphabet) -> Result<Dfa> {
        for v in d.free_vars() {
            if !env.contains(&v) {
                return Err(Error::UnknownVariable(v));
            }
        }
        let core = desugar(d);
        let mut order = env.vars().to_vec();
        let a = self.build(&core, &mut order)?;
        Ok(a.extend_to(env)?.minimize())
    }
}

/// One-shot compilation.
pub fn compile(d: &Formula, env: &Alphabet) -> Result<Dfa> {
    Compiler::new().compile(d, env)
}

/// Whether `d` holds on every nonempty word over `env`.
pub fn validity(d: &Formula, env: &Alphabet) -> Result<bool> {
    Ok(counterexample(d, env)?.is_none())
}

/// Shortest word violating `d`, if any.
pub fn counterexample(d: &Formula, env: &Alphabet) -> Result<Option<Word>> {
    let a = compile(d, env)?;
    Ok(a.complement().shortest_word().map(|w| Word::new(env.clone(), w)))
}

fn lit(b: &Bound) -> Result<u64> {
    b.value().ok_or_else(|| Error::UnknownConstant(b.to_string()))
}

/// Alphabet of `vars` sorted by rank in `order`.
fn ranked(vars: impl IntoIterator<Item = String>, order: &[String]) -> Result<Alphabet> {
    let mut vs: Vec<(usize, String)> = vars
        .into_iter()
        .map(|v| {
            let r = order.iter().rposition(|x| *x == v).ok_or_else(|| Error::UnknownVariable(v.clone()))?;
            Ok((r, v))
        })
        .collect::<Result<_>>()?;
    vs.sort();
    Alphabet::new(vs.into_iter().map(|(_, v)| v))
}

/// Truth table of a proposition over the letters of `alpha`.
fn prop_table(p: &Prop, alpha: &Alphabet) -> Vec<bool> {
    (0..alpha.letter_count() as u32)
        .map(|l| p.eval(&|v: &str| l >> alpha.index(v).expect("prop vars in alphabet") & 1 == 1))
        .collect()
}

/// Renames free occurrences of `from` to `to` in a core formula.
fn rename(d: &Formula, from: &str, to: &str) -> Formula {
    use Formula::*;
    let rp = |p: &Prop| p.rename(&|v: &str| (v == from).then(|| to.to_string()));
    let r = |x: &Formula| Box::new(rename(x, from, to));
    match d {
        Point(p) => Point(rp(p)),
        AllButLast(p) => AllButLast(rp(p)),
        All(p) => All(rp(p)),
        Unit(p) => Unit(rp(p)),
        SCount(p, op, c) => SCount(rp(p), *op, c.clone()),
        SDur(p, op, c) => SDur(rp(p), *op, c.clone()),
        Chop(a, b) => Chop(r(a), r(b)),
        And(a, b) => And(r(a), r(b)),
        Or(a, b) => Or(r(a), r(b)),
        Not(a) => Not(r(a)),
        Ex(v, _) | AllQ(v, _) if v == from => d.clone(),
        Ex(v, a) => Ex(v.clone(), r(a)),
        AllQ(v, a) => AllQ(v.clone(), r(a)),
        other => other.clone(),
    }
}

impl Compiler {
    fn build(&mut self, d: &Formula, order: &mut Vec<String>) -> Result<Dfa> {
        let alpha = ranked(d.free_vars(), order)?;
        let key = (d.clone(), alpha.vars().to_vec());
        if let Some(a) = self.memo.get(&key) {
            return Ok(a.clone());
        }
        let out = self.build_uncached(d, &alpha, order)?;
        debug_assert_eq!(out.alphabet(), &alpha);
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn widen(&mut self, x: &Formula, alpha: &Alphabet, order: &mut Vec<String>) -> Result<Dfa> {
        self.build(x, order)?.extend_to(alpha)
    }

    fn build_uncached(&mut self, d: &Formula, alpha: &Alphabet, order: &mut Vec<String>) -> Result<Dfa> {
        use Formula::*;
        let a = match d {
            True => return Ok(Dfa::universal(alpha)),
            Point(p) => {
                let t = prop_table(p, alpha);
                // 0 initial, 1 one good letter, 2 dead
                atom(alpha, 0u8, |&s| s == 1, |&s, l| if s == 0 && t[l] { 1 } else { 2 })?
            }
            AllButLast(p) => {
                let t = prop_table(p, alpha);
                // (letters read, saturating at 2; all but the last good; last good)
                atom(
                    alpha,
                    (0u8, true, false),
                    |&(n, ok, _)| n >= 2 && ok,
                    |&(n, ok, last), l| ((n + 1).min(2), ok && (n == 0 || last), t[l]),
                )?
            }
            All(p) => {
                let t = prop_table(p, alpha);
                atom(alpha, (false, true), |&(n, ok)| n && ok, |&(_, ok), l| (true, ok && t[l]))?
            }
            Unit(p) => {
                let t = prop_table(p, alpha);
                // (letters read, saturating at 3; first letter good)
                atom(
                    alpha,
                    (0u8, false),
                    |&(n, first)| n == 2 && first,
                    |&(n, first), l| ((n + 1).min(3), if n == 0 { t[l] } else { first }),
                )?
            }
            SLen(op, c) => {
                let c = lit(c)?;
                let cap = c.saturating_add(2);
                atom(alpha, 0u64, |&n| n >= 1 && op.holds(n - 1, c), |&n, _| (n + 1).min(cap))?
            }
            SCount(p, op, c) => {
                let t = prop_table(p, alpha);
                let c = lit(c)?;
                let cap = c.saturating_add(1);
                atom(
                    alpha,
                    (false, 0u64),
                    |&(n, k)| n && op.holds(k, c),
                    |&(_, k), l| (true, (k + t[l] as u64).min(cap)),
                )?
            }
            SDur(p, op, c) => {
                let t = prop_table(p, alpha);
                let c = lit(c)?;
                let cap = c.saturating_add(1);
                // (started; count of good letters before the last; last good)
                atom(
                    alpha,
                    (false, 0u64, false),
                    |&(n, k, _)| n && op.holds(k, c),
                    |&(n, k, last), l| (true, if n { (k + last as u64).min(cap) } else { 0 }, t[l]),
                )?
            }
            Not(x) => self.build(x, order)?.complement(),
            And(x, y) | Or(x, y) | Chop(x, y) => {
                let ax = self.widen(x, alpha, order)?;
                let ay = self.widen(y, alpha, order)?;
                match d {
                    And(..) => ax.intersect(&ay)?,
                    Or(..) => ax.union(&ay)?,
                    _ => ax.chop(&ay)?,
                }
            }
            Ex(v, x) | AllQ(v, x) => {
                let universal = matches!(d, AllQ(..));
                let (name, body) = if order.contains(v) {
                    let mut fresh = format!("{v}'");
                    while order.contains(&fresh) {
                        fresh.push('\'');
                    }
                    let body = rename(x, v, &fresh);
                    (fresh, body)
                } else {
                    (v.clone(), (**x).clone())
                };
                order.push(name.clone());
                let inner = self.build(&body, order);
                order.pop();
                let inner = inner?;
                if !inner.alphabet().contains(&name) {
                    inner
                } else if universal {
                    inner.complement().project_onto(alpha)?.complement()
                } else {
                    inner.project_onto(alpha)?
                }
            }
            Call(name, _) => return Err(Error::UnknownDefinition(name.clone())),
            _ => unreachable!("desugared formula"),
        };
        Ok(a.minimize())
    }
}

/// Deterministic automaton from a key-level transition function on letters.
fn atom<K, A, S>(alpha: &Alphabet, init: K, acc: A, succ: S) -> Result<Dfa>
where
    K: std::hash::Hash + Eq + Clone + Default,
    A: Fn(&K) -> bool,
    S: Fn(&K, usize) -> K,
{
    Builder::new(alpha.clone()).explore(init, acc, |k, l, out| *out = succ(k, l as usize))
}
