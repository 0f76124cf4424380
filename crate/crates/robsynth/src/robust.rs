//! Robustness criteria: error-type and error-scope combinators, the criteria
//! catalog, cascade composition, lowering of a robust specification to a
//! synthesis problem, and the implication-lattice verifier.

use std::fmt;
use std::str::FromStr;

use crate::ast::{CmpOp, Expanded, Formula, Prop};
use crate::compile::Compiler;
use crate::dfa::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::exec::Exec;

fn not_a(a: &str) -> Prop {
    Prop::not(Prop::var(a))
}

/// `true^<!A>`: the assumption fails at the current point.
pub fn local_err(a: &str) -> Formula {
    Formula::chop(Formula::True, Formula::Point(not_a(a)))
}

/// `scount !A > k`.
pub fn count_err(a: &str, k: u64) -> Formula {
    Formula::scount(not_a(a), CmpOp::Gt, k)
}

/// `[[!A]] && slen >= k`.
pub fn burst_err(a: &str, k: u64) -> Formula {
    Formula::and(Formula::All(not_a(a)), Formula::slen(CmpOp::Ge, k))
}

/// `<>(BurstErr(A,k))`.
pub fn has_burst_err(a: &str, k: u64) -> Formula {
    Formula::diamond(burst_err(a, k))
}

/// `[]([[A]] => slen < b-1)`: no run of `A` spans `b` points.
pub fn has_no_recovery(a: &str, b: u64) -> Formula {
    Formula::boxed(Formula::implies(
        Formula::All(Prop::var(a)),
        Formula::slen(CmpOp::Lt, b.saturating_sub(1)),
    ))
}

/// `Err && HasNoRecovery(A,b)`.
pub fn recovery_err(a: &str, b: u64, err: Formula) -> Formula {
    Formula::and(err, has_no_recovery(a, b))
}

/// `!<>Err`.
pub fn never_in_past(err: Formula) -> Formula {
    Formula::not(Formula::diamond(err))
}

/// `!(true^Err)`.
pub fn never_in_suffix(err: Formula) -> Formula {
    Formula::not(Formula::chop(Formula::True, err))
}

/// `!<>(slen <= b-1 && Err)`.
pub fn never_in_past_len(b: u64, err: Formula) -> Formula {
    Formula::not(Formula::diamond(Formula::and(
        Formula::slen(CmpOp::Le, b.saturating_sub(1)),
        err,
    )))
}

/// `!(true^((slen <= b-1) && Err))`.
pub fn never_in_suffix_len(b: u64, err: Formula) -> Formula {
    Formula::not(Formula::chop(
        Formula::True,
        Formula::and(Formula::slen(CmpOp::Le, b.saturating_sub(1)), err),
    ))
}

/// Pattern of assumption violation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ErrorType {
    LocalErr,
    CountErr(u64),
    BurstErr(u64),
    HasBurstErr(u64),
    Recovery(u64, Box<ErrorType>),
}

impl ErrorType {
    pub fn formula(&self, a: &str) -> Formula {
        match self {
            ErrorType::LocalErr => local_err(a),
            ErrorType::CountErr(k) => count_err(a, *k),
            ErrorType::BurstErr(k) => burst_err(a, *k),
            ErrorType::HasBurstErr(k) => has_burst_err(a, *k),
            ErrorType::Recovery(b, inner) => recovery_err(a, *b, inner.formula(a)),
        }
    }
}

/// Where violations are forbidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorScope {
    NeverInPast,
    NeverInSuffix,
    NeverInPastLen(u64),
    NeverInSuffixLen(u64),
}

impl ErrorScope {
    pub fn apply(self, err: Formula) -> Formula {
        match self {
            ErrorScope::NeverInPast => never_in_past(err),
            ErrorScope::NeverInSuffix => never_in_suffix(err),
            ErrorScope::NeverInPastLen(b) => never_in_past_len(b, err),
            ErrorScope::NeverInSuffixLen(b) => never_in_suffix_len(b, err),
        }
    }
}

/// Robustness criterion over an indicator variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    AssumeFalse,
    BeCorrect,
    BeCurrentlyCorrect,
    ResCnt(u64, u64),
    ResCntInt(u64, u64),
    ResBurst(u64, u64),
    ResBurstInt(u64, u64),
    LenCnt(u64, u64),
    LenCntInt(u64, u64),
    LenBurst(u64, u64),
    LenBurstInt(u64, u64),
    AssumeTrue,
}

pub const CRITERION_NAMES: [&str; 12] = [
    "AssumeFalse",
    "BeCorrect",
    "BeCurrentlyCorrect",
    "ResCnt",
    "ResCntInt",
    "ResBurst",
    "ResBurstInt",
    "LenCnt",
    "LenCntInt",
    "LenBurst",
    "LenBurstInt",
    "AssumeTrue",
];

impl Criterion {
    /// Builds a criterion from its catalog name; `k` and `b` are ignored for
    /// unparameterized criteria and must be positive otherwise.
    pub fn from_parts(name: &str, k: u64, b: u64) -> Option<Criterion> {
        use Criterion::*;
        let c = match name {
            "AssumeFalse" => AssumeFalse,
            "BeCorrect" => BeCorrect,
            "BeCurrentlyCorrect" => BeCurrentlyCorrect,
            "AssumeTrue" => AssumeTrue,
            _ => {
                if k == 0 || b == 0 {
                    return None;
                }
                match name {
                    "ResCnt" => ResCnt(k, b),
                    "ResCntInt" => ResCntInt(k, b),
                    "ResBurst" => ResBurst(k, b),
                    "ResBurstInt" => ResBurstInt(k, b),
                    "LenCnt" => LenCnt(k, b),
                    "LenCntInt" => LenCntInt(k, b),
                    "LenBurst" => LenBurst(k, b),
                    "LenBurstInt" => LenBurstInt(k, b),
                    _ => return None,
                }
            }
        };
        Some(c)
    }

    /// All twelve criteria in catalog order.
    pub fn catalog(k: u64, b: u64) -> Vec<Criterion> {
        CRITERION_NAMES
            .iter()
            .map(|n| Criterion::from_parts(n, k, b).expect("positive parameters"))
            .collect()
    }

    pub fn name(&self) -> &'static str {
        use Criterion::*;
        match self {
            AssumeFalse => "AssumeFalse",
            BeCorrect => "BeCorrect",
            BeCurrentlyCorrect => "BeCurrentlyCorrect",
            ResCnt(..) => "ResCnt",
            ResCntInt(..) => "ResCntInt",
            ResBurst(..) => "ResBurst",
            ResBurstInt(..) => "ResBurstInt",
            LenCnt(..) => "LenCnt",
            LenCntInt(..) => "LenCntInt",
            LenBurst(..) => "LenBurst",
            LenBurstInt(..) => "LenBurstInt",
            AssumeTrue => "AssumeTrue",
        }
    }

    pub fn params(&self) -> Option<(u64, u64)> {
        use Criterion::*;
        match *self {
            ResCnt(k, b) | ResCntInt(k, b) | ResBurst(k, b) | ResBurstInt(k, b) | LenCnt(k, b)
            | LenCntInt(k, b) | LenBurst(k, b) | LenBurstInt(k, b) => Some((k, b)),
            _ => None,
        }
    }

    pub fn has_parameters(&self) -> bool {
        self.params().is_some()
    }

    /// Whether the criterion tolerates violations that lie in the past
    /// (the "intermittent" criteria and the two extremes of the scale that
    /// look only at the current point).
    pub fn is_recoverable(&self) -> bool {
        use Criterion::*;
        matches!(
            self,
            BeCurrentlyCorrect | ResCntInt(..) | ResBurstInt(..) | LenCntInt(..) | LenBurstInt(..)
        )
    }

    /// The criterion formula over indicator `a`.
    pub fn formula(&self, a: &str) -> Formula {
        use Criterion::*;
        use ErrorScope as S;
        use ErrorType as E;
        let rec = |b: u64, e: E| E::Recovery(b, Box::new(e));
        match *self {
            AssumeFalse => Formula::False,
            BeCorrect => S::NeverInPast.apply(E::LocalErr.formula(a)),
            BeCurrentlyCorrect => S::NeverInSuffix.apply(E::LocalErr.formula(a)),
            ResCnt(k, b) => S::NeverInPast.apply(rec(b, E::CountErr(k)).formula(a)),
            ResCntInt(k, b) => S::NeverInSuffix.apply(rec(b, E::CountErr(k)).formula(a)),
            ResBurst(k, b) => S::NeverInPast.apply(rec(b, E::HasBurstErr(k)).formula(a)),
            ResBurstInt(k, b) => S::NeverInSuffix.apply(rec(b, E::HasBurstErr(k)).formula(a)),
            LenCnt(k, b) => S::NeverInPastLen(b).apply(E::CountErr(k).formula(a)),
            LenCntInt(k, b) => S::NeverInSuffixLen(b).apply(E::CountErr(k).formula(a)),
            LenBurst(k, b) => S::NeverInPastLen(b).apply(E::HasBurstErr(k).formula(a)),
            LenBurstInt(k, b) => S::NeverInSuffixLen(b).apply(E::HasBurstErr(k).formula(a)),
            AssumeTrue => Formula::True,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.params() {
            Some((k, b)) => write!(f, "{}({k},{b})", self.name()),
            None => write!(f, "{}", self.name()),
        }
    }
}

impl FromStr for Criterion {
    type Err = Error;

    /// Accepts `Name` (parameters default to 1 and 3) or `Name(k,b)`.
    fn from_str(s: &str) -> Result<Criterion> {
        let s = s.trim();
        let (name, k, b) = match s.find('(') {
            None => (s, 1, 3),
            Some(i) => {
                let inner = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::BadArgument(format!("malformed criterion `{s}`")))?;
                let nums: Vec<u64> = inner
                    .split(',')
                    .map(|x| x.trim().parse::<u64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::BadArgument(format!("malformed criterion `{s}`")))?;
                if nums.len() != 2 {
                    return Err(Error::BadArgument(format!("malformed criterion `{s}`")));
                }
                (&s[..i], nums[0], nums[1])
            }
        };
        Criterion::from_parts(name, k, b)
            .ok_or_else(|| Error::BadArgument(format!("unknown criterion `{s}`")))
    }
}

/// `D && pref(EP(w_1) <=> D_1) && ...` binding each indicator `w_i` to the
/// point-wise truth of `D_i`.
pub fn cascade(d: &Formula, bindings: &[(Formula, String)]) -> Result<Formula> {
    let mut out = d.clone();
    for (i, (di, w)) in bindings.iter().enumerate() {
        if bindings[..i].iter().any(|(_, x)| x == w) {
            return Err(Error::Duplicate(format!("indicator {w}")));
        }
        if di.free_vars().contains(w) {
            return Err(Error::BadArgument(format!(
                "indicator `{w}` occurs in the formula it is bound to"
            )));
        }
        let bind = Formula::pref(Formula::iff(Formula::Ep(Prop::var(w)), di.clone()));
        out = Formula::and(out, bind);
    }
    Ok(out)
}

/// A robust specification: assumption, commitment, criterion and the
/// indicator variable the criterion is stated over.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustSpec {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub assumption: Formula,
    pub commitment: Formula,
    pub criterion: Criterion,
    pub indicator: String,
}

/// Lowers a robust specification to a synthesis problem. The indicator is
/// appended to the outputs; the hard requirement is
/// `(Rb(A) => D_C) && pref(EP(A) <=> D_A)` and the soft requirement `D_C`.
pub fn lower(spec: &RobustSpec) -> Result<Expanded> {
    let a = &spec.indicator;
    if spec.inputs.contains(a)
        || spec.outputs.contains(a)
        || spec.assumption.free_vars().contains(a)
        || spec.commitment.free_vars().contains(a)
    {
        return Err(Error::BadArgument(format!(
            "indicator `{a}` collides with an existing variable"
        )));
    }
    let guarded = Formula::implies(spec.criterion.formula(a), spec.commitment.clone());
    let hard = cascade(&guarded, &[(spec.assumption.clone(), a.clone())])?;
    let mut outputs = spec.outputs.clone();
    outputs.push(a.clone());
    Ok(Expanded {
        name: spec.name.clone(),
        inputs: spec.inputs.clone(),
        outputs,
        hard,
        soft: spec.commitment.clone(),
        indicators: vec![(a.clone(), spec.assumption.clone())],
    })
}

/// The fourteen implication edges of the criteria lattice. The node holding
/// the equivalent pair ResBurst/LenBurst is represented by ResBurst; see
/// [`lattice_equivalences`].
pub fn lattice_edges(k: u64, b: u64) -> Vec<(Criterion, Criterion)> {
    use Criterion::*;
    vec![
        (AssumeFalse, BeCorrect),
        (BeCorrect, ResCnt(k, b)),
        (BeCorrect, BeCurrentlyCorrect),
        (ResCnt(k, b), LenCnt(k, b)),
        (ResCnt(k, b), ResCntInt(k, b)),
        (LenCnt(k, b), ResBurst(k, b)),
        (LenCnt(k, b), LenCntInt(k, b)),
        (ResCntInt(k, b), ResBurstInt(k, b)),
        (ResCntInt(k, b), LenCntInt(k, b)),
        (ResBurst(k, b), ResBurstInt(k, b)),
        (ResBurstInt(k, b), LenBurstInt(k, b)),
        (LenCntInt(k, b), LenBurstInt(k, b)),
        (LenBurstInt(k, b), AssumeTrue),
        (BeCurrentlyCorrect, AssumeTrue),
    ]
}

/// Pairs claimed equivalent in the lattice.
pub fn lattice_equivalences(k: u64, b: u64) -> Vec<(Criterion, Criterion)> {
    vec![(Criterion::ResBurst(k, b), Criterion::LenBurst(k, b))]
}

/// Outcome of checking one implication.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeRow {
    pub lhs: Criterion,
    pub rhs: Criterion,
    pub valid: bool,
    /// Shortest word satisfying `lhs` but not `rhs`, over the indicator.
    pub counterexample: Option<Word>,
}

/// Checks validity of `lhs => rhs` for every pair, with a counterexample word
/// for each failing pair.
pub fn lattice_check(pairs: &[(Criterion, Criterion)], indicator: &str, exec: Exec) -> Result<Vec<LatticeRow>> {
    let alpha = Alphabet::new([indicator])?;
    let rows = exec.map(pairs, |(lhs, rhs)| -> Result<LatticeRow> {
        let mut c = Compiler::new();
        let l = c.compile(&lhs.formula(indicator), &alpha)?;
        let r = c.compile(&rhs.formula(indicator), &alpha)?;
        let cex = l.difference_witness(&r)?;
        Ok(LatticeRow {
            lhs: *lhs,
            rhs: *rhs,
            valid: cex.is_none(),
            counterexample: cex.map(|letters| Word::new(alpha.clone(), letters)),
        })
    });
    rows.into_iter().collect()
}
