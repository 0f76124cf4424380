//! Parameterized benchmark specifications: a synchronous bus arbiter and a
//! mine pump controller.

use crate::ast::{expand, Arg, Bound, CmpOp, Definition, Formula, Prop, Requirement, SpecFile};
use crate::error::{Error, Result};
use crate::robust::{Criterion, RobustSpec};
use crate::synth::{parse_order, IoSignature, Literal};

/// Name of the assumption indicator in generated specifications.
pub const INDICATOR: &str = "A";

/// An assumption-commitment pair with its signature, default output order
/// and the specification file it was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudy {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub assumption: Formula,
    pub commitment: Formula,
    pub order: Vec<Literal>,
    base: SpecFile,
    assume_def: String,
    commit_def: String,
}

impl CaseStudy {
    fn from_base(base: SpecFile, assume_def: &str, commit_def: &str, order: &str) -> Result<CaseStudy> {
        let mut probe = base.clone();
        probe.hard = Requirement {
            useind: vec![],
            formulas: vec![Formula::Call(assume_def.into(), vec![])],
        };
        probe.soft = Requirement {
            useind: vec![],
            formulas: vec![Formula::Call(commit_def.into(), vec![])],
        };
        let e = expand(&probe)?;
        Ok(CaseStudy {
            name: base.name.clone(),
            inputs: base.inputs.clone(),
            outputs: base.outputs.clone(),
            assumption: e.hard,
            commitment: e.soft,
            order: parse_order(order)?,
            base,
            assume_def: assume_def.into(),
            commit_def: commit_def.into(),
        })
    }

    pub fn io(&self) -> Result<IoSignature> {
        IoSignature::new(&self.inputs, &self.outputs)
    }

    pub fn robust(&self, criterion: Criterion) -> RobustSpec {
        RobustSpec {
            name: format!("{}-{}", self.name, criterion.name()),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            assumption: self.assumption.clone(),
            commitment: self.commitment.clone(),
            criterion,
            indicator: INDICATOR.into(),
        }
    }

    /// Specification file for the robust specification under `criterion`:
    /// the assumption is bound to indicator `A`, the hard requirement is
    /// `Rb(A) => Commit` and the soft requirement `Commit`.
    pub fn qsf(&self, criterion: Criterion) -> SpecFile {
        let mut spec = self.base.clone();
        spec.name = format!("{}-{}", self.name, criterion.name());
        spec.outputs.push(INDICATOR.into());
        spec.indicators = vec![(INDICATOR.into(), Formula::Call(self.assume_def.clone(), vec![]))];
        let mut args = vec![Arg::Ident(INDICATOR.into())];
        if let Some((k, b)) = criterion.params() {
            args.push(Arg::Const(Bound::Lit(k)));
            args.push(Arg::Const(Bound::Lit(b)));
        }
        let commit = Formula::Call(self.commit_def.clone(), vec![]);
        spec.hard = Requirement {
            useind: vec![INDICATOR.into()],
            formulas: vec![Formula::implies(Formula::Call(criterion.name().into(), args), commit.clone())],
        };
        spec.soft = Requirement {
            useind: vec![],
            formulas: vec![commit],
        };
        spec
    }
}

fn var(v: &str) -> Prop {
    Prop::var(v)
}

fn call(name: &str, args: &[&str]) -> Formula {
    Formula::Call(name.into(), args.iter().map(|a| Arg::Ident((*a).into())).collect())
}

fn name(c: &str) -> Bound {
    Bound::Name(c.into())
}

fn minus_one(c: &str) -> Bound {
    Bound::Sub(Box::new(name(c)), Box::new(Bound::Lit(1)))
}

fn dc(name: &str, params: &[&str], body: Formula) -> Definition {
    Definition {
        name: name.into(),
        params: params.iter().map(|p| (*p).into()).collect(),
        body,
    }
}

/// `true^<p>`.
fn now(p: Prop) -> Formula {
    Formula::Ep(p)
}

/// At most `i` of the variables are true.
pub fn atmost(vars: &[String], i: usize) -> Prop {
    let n = vars.len();
    let terms = (0..1u32 << n).filter(|m| m.count_ones() as usize <= i).map(|m| {
        Prop::all((0..n).map(|j| {
            if m >> j & 1 == 1 {
                var(&vars[j])
            } else {
                Prop::not(var(&vars[j]))
            }
        }))
    });
    Prop::any(terms)
}

/// `Arbiter(n,k,i)`: `n` cells, response within `k` cycles, at most `i`
/// simultaneous requests. Inputs `r1..rn`, outputs `a1..an`.
pub fn arbiter(n: usize, k: u64, i: usize) -> Result<CaseStudy> {
    if n == 0 || k == 0 || i > n {
        return Err(Error::BadArgument(format!("invalid arbiter parameters ({n},{k},{i})")));
    }
    let reqs: Vec<String> = (1..=n).map(|j| format!("r{j}")).collect();
    let acks: Vec<String> = (1..=n).map(|j| format!("a{j}")).collect();
    let mutex = Prop::all((0..n).flat_map(|x| {
        let acks = &acks;
        (x + 1..n).map(move |y| Prop::not(Prop::and(var(&acks[x]), var(&acks[y]))))
    }));
    let noloss = Prop::implies(
        Prop::any(reqs.iter().map(|r| var(r))),
        Prop::any(acks.iter().map(|a| var(a))),
    );
    let resp = Formula::implies(
        Formula::chop(
            Formula::True,
            Formula::and(Formula::All(var("req")), Formula::SLen(CmpOp::Eq, minus_one("k"))),
        ),
        Formula::chop(
            Formula::True,
            Formula::and(
                Formula::SCount(var("ack"), CmpOp::Gt, Bound::Lit(0)),
                Formula::SLen(CmpOp::Eq, minus_one("k")),
            ),
        ),
    );
    let mut commit = vec![call("Mutex", &[]), call("NoLoss", &[])];
    commit.extend((0..n).map(|j| call("NoSpurious", &[&acks[j], &reqs[j]])));
    commit.extend((0..n).map(|j| call("Resp", &[&reqs[j], &acks[j]])));
    let definitions = vec![
        dc("Mutex", &[], now(mutex)),
        dc("NoLoss", &[], now(noloss)),
        dc("NoSpurious", &["ack", "req"], now(Prop::implies(var("ack"), var("req")))),
        dc("Resp", &["req", "ack"], resp),
        dc("ArbAssume", &[], now(atmost(&reqs, i))),
        dc("ArbCommit", &[], Formula::all(commit)),
    ];
    let base = SpecFile {
        name: format!("arbiter_{n}_{k}_{i}"),
        inputs: reqs,
        outputs: acks.clone(),
        constants: vec![("k".into(), k)],
        definitions,
        ..SpecFile::default()
    };
    CaseStudy::from_base(base, "ArbAssume", "ArbCommit", &acks.join(" > "))
}

/// Parameters of `MinePump(w, epsilon, zeta, kappa)` plus the window of the
/// intermittency macro.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinepumpParams {
    /// Water may stay high for fewer than `w + 1` consecutive points.
    pub w: u64,
    /// Pump capacity.
    pub epsilon: u64,
    /// Minimum separation of methane leaks.
    pub zeta: u64,
    /// Maximum persistence of a methane leak.
    pub kappa: u64,
    /// Window of `KBOUNDED`.
    pub window: u64,
}

impl MinepumpParams {
    /// Window defaults to `w + 1`.
    pub fn new(w: u64, epsilon: u64, zeta: u64, kappa: u64) -> MinepumpParams {
        MinepumpParams {
            w,
            epsilon,
            zeta,
            kappa,
            window: w + 1,
        }
    }

    pub fn with_window(self, window: u64) -> MinepumpParams {
        MinepumpParams { window, ..self }
    }
}

impl Default for MinepumpParams {
    fn default() -> Self {
        MinepumpParams::new(8, 2, 6, 2)
    }
}

/// `MinePump(w,epsilon,zeta,kappa)`: inputs `HH2O`, `HCH4`; output `PumpOn`.
pub fn minepump(p: MinepumpParams) -> Result<CaseStudy> {
    if p.w == 0 || p.epsilon == 0 || p.zeta == 0 || p.kappa == 0 || p.window == 0 {
        return Err(Error::BadArgument("minepump parameters must be positive".into()));
    }
    let kb = |d: Formula| Formula::KBounded(Box::new(d), name("n"));
    let methane1 = kb(Formula::boxed(Formula::implies(
        Formula::chop(
            Formula::AllButLast(var("HCH4")),
            Formula::chop(Formula::AllButLast(Prop::not(var("HCH4"))), Formula::Point(var("HCH4"))),
        ),
        Formula::SLen(CmpOp::Gt, name("zeta")),
    )));
    let methane2 = kb(Formula::boxed(Formula::implies(
        Formula::All(var("HCH4")),
        Formula::SLen(CmpOp::Lt, name("kappa")),
    )));
    let pumpcap = kb(Formula::boxed(Formula::not(Formula::and(
        Formula::SLen(CmpOp::Eq, name("epsilon")),
        Formula::chop(
            Formula::All(Prop::and(var("PumpOn"), var("HH2O"))),
            Formula::Point(var("HH2O")),
        ),
    ))));
    let safety = kb(Formula::All(Prop::implies(
        Prop::or(var("HCH4"), Prop::not(var("HH2O"))),
        Prop::not(var("PumpOn")),
    )));
    let water = kb(Formula::not(Formula::diamond(Formula::and(
        Formula::All(var("HH2O")),
        Formula::SLen(CmpOp::Eq, name("w")),
    ))));
    let definitions = vec![
        dc("Methane1", &[], methane1),
        dc("Methane2", &[], methane2),
        dc("PumpCap", &[], pumpcap),
        dc("MineAssume", &[], Formula::all([call("Methane1", &[]), call("Methane2", &[]), call("PumpCap", &[])])),
        dc("Safety", &[], safety),
        dc("Water", &[], water),
        dc("MineCommit", &[], Formula::and(call("Safety", &[]), call("Water", &[]))),
    ];
    let base = SpecFile {
        name: format!("minepump_{}_{}_{}_{}", p.w, p.epsilon, p.zeta, p.kappa),
        inputs: vec!["HH2O".into(), "HCH4".into()],
        outputs: vec!["PumpOn".into()],
        constants: vec![
            ("w".into(), p.w),
            ("epsilon".into(), p.epsilon),
            ("zeta".into(), p.zeta),
            ("kappa".into(), p.kappa),
            ("n".into(), p.window),
        ],
        definitions,
        ..SpecFile::default()
    };
    CaseStudy::from_base(base, "MineAssume", "MineCommit", "PumpOn")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{expand, parse_spec};
    use crate::compile::compile;
    use crate::dfa::Alphabet;
    use crate::robust::lower;

    #[test]
    fn atmost_counts_subsets() {
        let vars: Vec<String> = (1..=4).map(|j| format!("r{j}")).collect();
        let p = atmost(&vars, 2);
        let sat = (0..16u32)
            .filter(|m| p.eval(&|v: &str| m >> (v[1..].parse::<u32>().unwrap() - 1) & 1 == 1))
            .count();
        assert_eq!(sat, 11);
    }

    #[test]
    fn generated_qsf_round_trips_to_lowering() {
        let cases = [arbiter(2, 2, 1).unwrap(), minepump(MinepumpParams::new(3, 1, 2, 1)).unwrap()];
        for cs in cases {
            for c in [Criterion::BeCorrect, Criterion::LenBurstInt(1, 3)] {
                let text = cs.qsf(c).to_string();
                let parsed = parse_spec(&text).unwrap();
                let e = expand(&parsed).unwrap();
                let l = lower(&cs.robust(c)).unwrap();
                assert_eq!(e.inputs, l.inputs);
                assert_eq!(e.outputs, l.outputs);
                let alpha = Alphabet::new(l.vars()).unwrap();
                let h1 = compile(&e.hard, &alpha).unwrap();
                let h2 = compile(&l.hard, &alpha).unwrap();
                assert!(h1.equivalent(&h2).unwrap(), "{}", cs.name);
            }
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(arbiter(0, 1, 0).is_err());
        assert!(arbiter(2, 1, 3).is_err());
        assert!(minepump(MinepumpParams::new(0, 1, 1, 1)).is_err());
    }

    #[test]
    fn arbiter_order_is_ack_sequence() {
        let cs = arbiter(3, 2, 1).unwrap();
        let names: Vec<String> = cs.order.iter().map(|l| l.to_string()).collect();
        assert_eq!(names, ["a1", "a2", "a3"]);
    }
}
