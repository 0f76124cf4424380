use std::collections::{BTreeSet, HashMap};

use super::{Arg, Bound, Formula, Prop, SpecFile};
use crate::error::{Error, Result};
use crate::robust::{self, Criterion};

/// A specification with all definitions inlined, constants folded and
/// indicator bindings turned into cascade constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Expanded {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub hard: Formula,
    pub soft: Formula,
    /// Resolved indicator definitions, in declaration order.
    pub indicators: Vec<(String, Formula)>,
}

impl Expanded {
    pub fn vars(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.outputs).cloned().collect()
    }

    pub fn indicator(&self, w: &str) -> Option<&Formula> {
        self.indicators.iter().find(|(x, _)| x == w).map(|(_, f)| f)
    }
}

/// Expands a parsed specification file.
pub fn expand(spec: &SpecFile) -> Result<Expanded> {
    let r = Resolver::new(spec)?;
    let mut indicators = Vec::new();
    for (w, f) in &spec.indicators {
        indicators.push((w.clone(), r.resolve_formula(f)?));
    }
    let block = |req: &super::Requirement| -> Result<Formula> {
        let body = req
            .formulas
            .iter()
            .map(|f| r.resolve_formula(f))
            .collect::<Result<Vec<_>>>()?;
        let body = Formula::all(body);
        let names: BTreeSet<&str> = indicators.iter().map(|(w, _)| w.as_str()).collect();
        let mut used: BTreeSet<String> = req.useind.iter().cloned().collect();
        used.extend(body.free_vars().into_iter().filter(|v| names.contains(v.as_str())));
        loop {
            let before = used.len();
            for (w, f) in &indicators {
                if used.contains(w) {
                    used.extend(f.free_vars().into_iter().filter(|v| names.contains(v.as_str())));
                }
            }
            if used.len() == before {
                break;
            }
        }
        let bindings: Vec<(Formula, String)> = indicators
            .iter()
            .filter(|(w, _)| used.contains(w))
            .map(|(w, f)| (f.clone(), w.clone()))
            .collect();
        robust::cascade(&body, &bindings)
    };
    let hard = block(&spec.hard)?;
    let soft = block(&spec.soft)?;
    let declared: BTreeSet<&String> = spec.inputs.iter().chain(&spec.outputs).collect();
    for f in [&hard, &soft] {
        for v in f.free_vars() {
            if !declared.contains(&v) {
                return Err(Error::UnknownVariable(v));
            }
        }
    }
    Ok(Expanded {
        name: spec.name.clone(),
        inputs: spec.inputs.clone(),
        outputs: spec.outputs.clone(),
        hard,
        soft,
        indicators,
    })
}

type Subst = HashMap<String, Arg>;

pub(crate) struct Resolver<'a> {
    spec: &'a SpecFile,
    consts: HashMap<&'a str, u64>,
}

impl<'a> Resolver<'a> {
    pub(crate) fn new(spec: &'a SpecFile) -> Result<Self> {
        let consts = spec
            .constants
            .iter()
            .map(|(n, v)| (n.as_str(), *v))
            .collect();
        Ok(Resolver { spec, consts })
    }

    pub(crate) fn resolve_formula(&self, f: &Formula) -> Result<Formula> {
        self.go(f, &Subst::new(), &mut Vec::new(), &[])
    }

    fn is_var(&self, v: &str) -> bool {
        self.spec.inputs.iter().chain(&self.spec.outputs).any(|x| x == v)
    }

    fn go(&self, f: &Formula, s: &Subst, stack: &mut Vec<String>, bound: &[String]) -> Result<Formula> {
        use Formula::*;
        let b1 = |x: &Formula, stack: &mut Vec<String>| -> Result<Box<Formula>> {
            Ok(Box::new(self.go(x, s, stack, bound)?))
        };
        Ok(match f {
            True | False | Pt | Ext => f.clone(),
            Point(p) => Point(self.prop(p, s)?),
            AllButLast(p) => AllButLast(self.prop(p, s)?),
            All(p) => All(self.prop(p, s)?),
            Unit(p) => Unit(self.prop(p, s)?),
            Ep(p) => Ep(self.prop(p, s)?),
            SLen(op, c) => SLen(*op, Bound::Lit(self.bound(c, s)?)),
            SCount(p, op, c) => SCount(self.prop(p, s)?, *op, Bound::Lit(self.bound(c, s)?)),
            SDur(p, op, c) => SDur(self.prop(p, s)?, *op, Bound::Lit(self.bound(c, s)?)),
            Not(a) => Not(b1(a, stack)?),
            Diamond(a) => Diamond(b1(a, stack)?),
            Boxed(a) => Boxed(b1(a, stack)?),
            Pref(a) => Pref(b1(a, stack)?),
            KBounded(a, n) => KBounded(b1(a, stack)?, Bound::Lit(self.bound(n, s)?)),
            Chop(a, b) => Chop(b1(a, stack)?, b1(b, stack)?),
            And(a, b) => And(b1(a, stack)?, b1(b, stack)?),
            Or(a, b) => Or(b1(a, stack)?, b1(b, stack)?),
            Implies(a, b) => Implies(b1(a, stack)?, b1(b, stack)?),
            Iff(a, b) => Iff(b1(a, stack)?, b1(b, stack)?),
            Ex(v, a) | AllQ(v, a) => {
                let mut inner = s.clone();
                inner.remove(v);
                let mut bound2 = bound.to_vec();
                bound2.push(v.clone());
                let body = Box::new(self.go(a, &inner, stack, &bound2)?);
                if matches!(f, Ex(..)) {
                    Ex(v.clone(), body)
                } else {
                    AllQ(v.clone(), body)
                }
            }
            Call(name, args) => {
                if args.is_empty() {
                    if let Some(a) = s.get(name) {
                        return match a {
                            Arg::Formula(g) => Ok(g.clone()),
                            Arg::Ident(x) => self.global(x, Vec::new(), stack, &[]),
                            Arg::Const(_) => Err(Error::BadArgument(format!(
                                "parameter `{name}` is a constant but used as a formula"
                            ))),
                        };
                    }
                }
                let args = args
                    .iter()
                    .map(|a| self.arg(a, s, stack, bound))
                    .collect::<Result<Vec<_>>>()?;
                self.global(name, args, stack, bound)?
            }
        })
    }

    fn arg(&self, a: &Arg, s: &Subst, stack: &mut Vec<String>, bound: &[String]) -> Result<Arg> {
        Ok(match a {
            Arg::Ident(x) => s.get(x).cloned().unwrap_or_else(|| Arg::Ident(x.clone())),
            Arg::Const(b) => Arg::Const(Bound::Lit(self.bound(b, s)?)),
            Arg::Formula(f) => Arg::Formula(self.go(f, s, stack, bound)?),
        })
    }

    fn global(&self, name: &str, args: Vec<Arg>, stack: &mut Vec<String>, bound: &[String]) -> Result<Formula> {
        if args.is_empty() && bound.iter().any(|b| b == name) {
            return Ok(Formula::Ep(Prop::var(name)));
        }
        if let Some(def) = self.spec.definitions.iter().find(|d| d.name == name) {
            if def.params.len() != args.len() {
                return Err(Error::Arity {
                    name: name.to_string(),
                    expected: def.params.len(),
                    got: args.len(),
                });
            }
            if stack.iter().any(|n| n == name) {
                return Err(Error::RecursiveDefinition(name.to_string()));
            }
            let sub: Subst = def.params.iter().cloned().zip(args).collect();
            stack.push(name.to_string());
            let out = self.go(&def.body, &sub, stack, &[]);
            stack.pop();
            return out;
        }
        if let Some(f) = self.builtin(name, &args, stack)? {
            return Ok(f);
        }
        if args.is_empty() && self.is_var(name) {
            return Ok(Formula::Ep(Prop::var(name)));
        }
        if args.is_empty() && !self.spec.definitions.is_empty() {
            return Err(Error::UnknownDefinition(name.to_string()));
        }
        if args.is_empty() {
            return Err(Error::UnknownVariable(name.to_string()));
        }
        Err(Error::UnknownDefinition(name.to_string()))
    }

    fn prop(&self, p: &Prop, s: &Subst) -> Result<Prop> {
        let bin = |a: &Prop, b: &Prop| -> Result<(Box<Prop>, Box<Prop>)> {
            Ok((Box::new(self.prop(a, s)?), Box::new(self.prop(b, s)?)))
        };
        Ok(match p {
            Prop::Var(v) => match s.get(v) {
                None => Prop::Var(v.clone()),
                Some(Arg::Ident(x)) => Prop::Var(x.clone()),
                Some(_) => {
                    return Err(Error::BadArgument(format!(
                        "parameter `{v}` is used as a proposition but bound to a non-variable"
                    )))
                }
            },
            Prop::Not(a) => Prop::not(self.prop(a, s)?),
            Prop::And(a, b) => {
                let (a, b) = bin(a, b)?;
                Prop::And(a, b)
            }
            Prop::Or(a, b) => {
                let (a, b) = bin(a, b)?;
                Prop::Or(a, b)
            }
            Prop::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                Prop::Implies(a, b)
            }
            Prop::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                Prop::Iff(a, b)
            }
            Prop::True | Prop::False => p.clone(),
        })
    }

    fn bound(&self, b: &Bound, s: &Subst) -> Result<u64> {
        match b {
            Bound::Lit(v) => Ok(*v),
            Bound::Name(n) => match s.get(n) {
                Some(Arg::Const(c)) => self.bound(c, &Subst::new()),
                Some(Arg::Ident(x)) => self.bound(&Bound::Name(x.clone()), &Subst::new()),
                Some(Arg::Formula(_)) => Err(Error::BadArgument(format!(
                    "parameter `{n}` is a formula but used as a constant"
                ))),
                None => self
                    .consts
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| Error::UnknownConstant(n.clone())),
            },
            Bound::Sub(a, c) => {
                let (x, y) = (self.bound(a, s)?, self.bound(c, s)?);
                x.checked_sub(y)
                    .ok_or_else(|| Error::NegativeConstant(format!("{b} = {x}-{y}")))
            }
        }
    }

    fn builtin(&self, name: &str, args: &[Arg], stack: &mut Vec<String>) -> Result<Option<Formula>> {
        let var = |i: usize| -> Result<String> {
            match &args[i] {
                Arg::Ident(x) => Ok(x.clone()),
                _ => Err(Error::BadArgument(format!(
                    "argument {} of `{name}` must be a variable",
                    i + 1
                ))),
            }
        };
        let num = |i: usize| -> Result<u64> {
            match &args[i] {
                Arg::Const(b) => self.bound(b, &Subst::new()),
                Arg::Ident(x) => self.bound(&Bound::Name(x.clone()), &Subst::new()),
                Arg::Formula(_) => Err(Error::BadArgument(format!(
                    "argument {} of `{name}` must be a constant",
                    i + 1
                ))),
            }
        };
        let mut formula = |i: usize| -> Result<Formula> {
            match &args[i] {
                Arg::Formula(f) => Ok(f.clone()),
                Arg::Ident(x) => self.global(x, Vec::new(), stack, &[]),
                Arg::Const(_) => Err(Error::BadArgument(format!(
                    "argument {} of `{name}` must be a formula",
                    i + 1
                ))),
            }
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Arity {
                    name: name.to_string(),
                    expected: n,
                    got: args.len(),
                })
            }
        };
        if let Some(c) = Criterion::from_parts(name, 1, 1) {
            let f = if c.has_parameters() {
                arity(3)?;
                let c = Criterion::from_parts(name, num(1)?, num(2)?)
                    .ok_or_else(|| Error::BadArgument(format!("`{name}` parameters must be positive")))?;
                c.formula(&var(0)?)
            } else {
                arity(1)?;
                c.formula(&var(0)?)
            };
            return Ok(Some(f));
        }
        let f = match name {
            "LocalErr" => {
                arity(1)?;
                robust::local_err(&var(0)?)
            }
            "CountErr" => {
                arity(2)?;
                robust::count_err(&var(0)?, num(1)?)
            }
            "BurstErr" => {
                arity(2)?;
                robust::burst_err(&var(0)?, num(1)?)
            }
            "HasBurstErr" => {
                arity(2)?;
                robust::has_burst_err(&var(0)?, num(1)?)
            }
            "HasNoRecovery" => {
                arity(2)?;
                robust::has_no_recovery(&var(0)?, num(1)?)
            }
            "RecoveryErr" => {
                arity(3)?;
                let (a, b) = (var(0)?, num(1)?);
                robust::recovery_err(&a, b, formula(2)?)
            }
            "NeverInPast" => {
                arity(1)?;
                robust::never_in_past(formula(0)?)
            }
            "NeverInSuffix" => {
                arity(1)?;
                robust::never_in_suffix(formula(0)?)
            }
            "NeverInPastLen" => {
                arity(2)?;
                let b = num(0)?;
                robust::never_in_past_len(b, formula(1)?)
            }
            "NeverInSuffixLen" => {
                arity(2)?;
                let b = num(0)?;
                robust::never_in_suffix_len(b, formula(1)?)
            }
            _ => return Ok(None),
        };
        Ok(Some(f))
    }
}
