//! Formula data model for the interval logic, its canonical printer and the
//! desugaring of derived operators.

mod expand;
mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use expand::{expand, Expanded};
pub use parser::{parse_formula, parse_formula_unchecked, parse_spec};

/// Propositional formula evaluated at a single point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    False,
    True,
    Var(String),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: u64, rhs: u64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// Natural-number constant, possibly still symbolic before expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Lit(u64),
    Name(String),
    Sub(Box<Bound>, Box<Bound>),
}

impl Bound {
    pub fn value(&self) -> Option<u64> {
        match self {
            Bound::Lit(v) => Some(*v),
            _ => None,
        }
    }
}

/// Interval formula. The first block of variants is the core logic; the
/// second block holds surface forms removed by [`desugar`]; `Call` only
/// exists between parsing a specification file and [`expand`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    Point(Prop),
    AllButLast(Prop),
    All(Prop),
    Unit(Prop),
    Chop(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Ex(String, Box<Formula>),
    AllQ(String, Box<Formula>),
    SLen(CmpOp, Bound),
    SCount(Prop, CmpOp, Bound),
    SDur(Prop, CmpOp, Bound),

    False,
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Pt,
    Ext,
    Diamond(Box<Formula>),
    Boxed(Box<Formula>),
    Pref(Box<Formula>),
    Ep(Prop),
    KBounded(Box<Formula>, Bound),

    Call(String, Vec<Arg>),
}

/// Argument of a definition call.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Ident(String),
    Const(Bound),
    Formula(Formula),
}

impl Prop {
    pub fn var(name: &str) -> Prop {
        Prop::Var(name.to_string())
    }

    pub fn not(p: Prop) -> Prop {
        Prop::Not(Box::new(p))
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        Prop::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Prop, b: Prop) -> Prop {
        Prop::Implies(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn all(items: impl IntoIterator<Item = Prop>) -> Prop {
        items.into_iter().reduce(Prop::and).unwrap_or(Prop::True)
    }

    /// Left-nested disjunction; `False` when empty.
    pub fn any(items: impl IntoIterator<Item = Prop>) -> Prop {
        items.into_iter().reduce(Prop::or).unwrap_or(Prop::False)
    }

    /// Evaluates with a lookup for variable values.
    pub fn eval(&self, val: &impl Fn(&str) -> bool) -> bool {
        match self {
            Prop::False => false,
            Prop::True => true,
            Prop::Var(v) => val(v),
            Prop::Not(p) => !p.eval(val),
            Prop::And(a, b) => a.eval(val) && b.eval(val),
            Prop::Or(a, b) => a.eval(val) || b.eval(val),
            Prop::Implies(a, b) => !a.eval(val) || b.eval(val),
            Prop::Iff(a, b) => a.eval(val) == b.eval(val),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Prop::False | Prop::True => {}
            Prop::Var(v) => {
                out.insert(v.clone());
            }
            Prop::Not(p) => p.vars(out),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) | Prop::Iff(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    pub fn rename(&self, f: &impl Fn(&str) -> Option<String>) -> Prop {
        match self {
            Prop::Var(v) => Prop::Var(f(v).unwrap_or_else(|| v.clone())),
            Prop::Not(p) => Prop::not(p.rename(f)),
            Prop::And(a, b) => Prop::and(a.rename(f), b.rename(f)),
            Prop::Or(a, b) => Prop::or(a.rename(f), b.rename(f)),
            Prop::Implies(a, b) => Prop::implies(a.rename(f), b.rename(f)),
            Prop::Iff(a, b) => Prop::Iff(Box::new(a.rename(f)), Box::new(b.rename(f))),
            other => other.clone(),
        }
    }
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn chop(a: Formula, b: Formula) -> Formula {
        Formula::Chop(Box::new(a), Box::new(b))
    }

    pub fn diamond(f: Formula) -> Formula {
        Formula::Diamond(Box::new(f))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Boxed(Box::new(f))
    }

    pub fn pref(f: Formula) -> Formula {
        Formula::Pref(Box::new(f))
    }

    pub fn ex(v: &str, f: Formula) -> Formula {
        Formula::Ex(v.to_string(), Box::new(f))
    }

    pub fn all_q(v: &str, f: Formula) -> Formula {
        Formula::AllQ(v.to_string(), Box::new(f))
    }

    pub fn slen(op: CmpOp, c: u64) -> Formula {
        Formula::SLen(op, Bound::Lit(c))
    }

    pub fn scount(p: Prop, op: CmpOp, c: u64) -> Formula {
        Formula::SCount(p, op, Bound::Lit(c))
    }

    pub fn sdur(p: Prop, op: CmpOp, c: u64) -> Formula {
        Formula::SDur(p, op, Bound::Lit(c))
    }

    pub fn kbounded(f: Formula, n: u64) -> Formula {
        Formula::KBounded(Box::new(f), Bound::Lit(n))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Free propositional variables (bound quantifier variables excluded).
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        use Formula::*;
        match self {
            True | False | Pt | Ext | SLen(..) => {}
            Point(p) | AllButLast(p) | All(p) | Unit(p) | Ep(p) | SCount(p, ..) | SDur(p, ..) => {
                p.vars(out)
            }
            Not(a) | Diamond(a) | Boxed(a) | Pref(a) | KBounded(a, _) => a.collect_free(out),
            Chop(a, b) | And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Ex(v, body) | AllQ(v, body) => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
            Call(_, args) => {
                for a in args {
                    match a {
                        Arg::Formula(f) => f.collect_free(out),
                        Arg::Ident(_) | Arg::Const(_) => {}
                    }
                }
            }
        }
    }

    /// Nesting depth of formula operators (atoms have depth 1).
    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            Not(a) | Diamond(a) | Boxed(a) | Pref(a) | KBounded(a, _) | Ex(_, a) | AllQ(_, a) => {
                1 + a.depth()
            }
            Chop(a, b) | And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                1 + a.depth().max(b.depth())
            }
            _ => 1,
        }
    }

    pub fn is_core(&self) -> bool {
        use Formula::*;
        match self {
            True | Point(_) | AllButLast(_) | All(_) | Unit(_) | SLen(..) | SCount(..)
            | SDur(..) => true,
            Chop(a, b) | And(a, b) | Or(a, b) => a.is_core() && b.is_core(),
            Not(a) | Ex(_, a) | AllQ(_, a) => a.is_core(),
            _ => false,
        }
    }
}

/// Rewrites every derived operator into the core variants.
pub fn desugar(f: &Formula) -> Formula {
    use Formula::*;
    let d = |x: &Formula| Box::new(desugar(x));
    match f {
        True | Point(_) | AllButLast(_) | All(_) | Unit(_) | SLen(..) | SCount(..) | SDur(..) => {
            f.clone()
        }
        Chop(a, b) => Chop(d(a), d(b)),
        Not(a) => Not(d(a)),
        And(a, b) => And(d(a), d(b)),
        Or(a, b) => Or(d(a), d(b)),
        Ex(v, a) => Ex(v.clone(), d(a)),
        AllQ(v, a) => AllQ(v.clone(), d(a)),
        False => Formula::not(True),
        Implies(a, b) => Or(Box::new(Formula::not(desugar(a))), d(b)),
        Iff(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            Formula::and(
                Formula::or(Formula::not(a.clone()), b.clone()),
                Formula::or(Formula::not(b), a),
            )
        }
        Pt => Point(Prop::True),
        Ext => Formula::not(Point(Prop::True)),
        Diamond(a) => Formula::chop(True, Formula::chop(desugar(a), True)),
        Boxed(a) => Formula::not(Formula::chop(
            True,
            Formula::chop(Formula::not(desugar(a)), True),
        )),
        Pref(a) => Formula::not(Formula::chop(Formula::not(desugar(a)), True)),
        Ep(p) => Formula::chop(True, Point(p.clone())),
        KBounded(a, n) => {
            let a = desugar(a);
            let len_eq = SLen(CmpOp::Eq, n.clone());
            let short = Formula::or(Formula::not(SLen(CmpOp::Lt, n.clone())), a.clone());
            let long = Formula::or(
                Formula::not(Formula::chop(True, len_eq.clone())),
                Formula::chop(True, Formula::and(len_eq, a)),
            );
            Formula::and(short, long)
        }
        Call(name, args) => Call(
            name.clone(),
            args.iter()
                .map(|a| match a {
                    Arg::Formula(f) => Arg::Formula(desugar(f)),
                    other => other.clone(),
                })
                .collect(),
        ),
    }
}

// Printing. Precedence levels, loosest first: <=> 0, => 1, || 2, && 3,
// ^ 4, prefix/atoms 5. Binary && and || associate left, => and ^ right,
// <=> left.

fn prop_level(p: &Prop) -> u8 {
    match p {
        Prop::Iff(..) => 0,
        Prop::Implies(..) => 1,
        Prop::Or(..) => 2,
        Prop::And(..) => 3,
        _ => 5,
    }
}

fn write_prop(f: &mut fmt::Formatter<'_>, p: &Prop, min: u8) -> fmt::Result {
    let lvl = prop_level(p);
    if lvl < min {
        write!(f, "(")?;
        write_prop(f, p, 0)?;
        return write!(f, ")");
    }
    match p {
        Prop::False => write!(f, "false"),
        Prop::True => write!(f, "true"),
        Prop::Var(v) => write!(f, "{v}"),
        Prop::Not(a) => {
            write!(f, "!")?;
            write_prop(f, a, 5)
        }
        Prop::And(a, b) => bin_prop(f, a, "&&", b, 3, 4),
        Prop::Or(a, b) => bin_prop(f, a, "||", b, 2, 3),
        Prop::Implies(a, b) => bin_prop(f, a, "=>", b, 2, 1),
        Prop::Iff(a, b) => bin_prop(f, a, "<=>", b, 0, 1),
    }
}

fn bin_prop(f: &mut fmt::Formatter<'_>, a: &Prop, op: &str, b: &Prop, la: u8, lb: u8) -> fmt::Result {
    write_prop(f, a, la)?;
    write!(f, " {op} ")?;
    write_prop(f, b, lb)
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prop(f, self, 0)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Lit(v) => write!(f, "{v}"),
            Bound::Name(n) => write!(f, "{n}"),
            Bound::Sub(a, b) => {
                write!(f, "{a}-")?;
                match **b {
                    Bound::Sub(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
        }
    }
}

fn formula_level(x: &Formula) -> u8 {
    match x {
        Formula::Iff(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Chop(..) => 4,
        _ => 5,
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, x: &Formula, min: u8) -> fmt::Result {
    use Formula::*;
    let lvl = formula_level(x);
    if lvl < min {
        write!(f, "(")?;
        write_formula(f, x, 0)?;
        return write!(f, ")");
    }
    match x {
        True => write!(f, "true"),
        False => write!(f, "false"),
        Pt => write!(f, "pt"),
        Ext => write!(f, "ext"),
        Point(p) => write!(f, "<{p}>"),
        AllButLast(p) => write!(f, "[{p}]"),
        All(p) => write!(f, "[[{p}]]"),
        Unit(p) => write!(f, "{{{{{p}}}}}"),
        Ep(p) => write!(f, "EP({p})"),
        SLen(op, c) => write!(f, "slen {} {c}", op.symbol()),
        SCount(p, op, c) => {
            write!(f, "scount ")?;
            write_prop(f, p, 5)?;
            write!(f, " {} {c}", op.symbol())
        }
        SDur(p, op, c) => {
            write!(f, "sdur ")?;
            write_prop(f, p, 5)?;
            write!(f, " {} {c}", op.symbol())
        }
        Not(a) => {
            write!(f, "!")?;
            write_formula(f, a, 5)
        }
        Diamond(a) => {
            write!(f, "<>")?;
            write_formula(f, a, 5)
        }
        Boxed(a) => {
            write!(f, "[]")?;
            write_formula(f, a, 5)
        }
        Pref(a) => write!(f, "pref({a})"),
        KBounded(a, n) => write!(f, "KBOUNDED({a}, {n})"),
        Ex(v, a) => write!(f, "(ex {v}. {a})"),
        AllQ(v, a) => write!(f, "(all {v}. {a})"),
        Chop(a, b) => bin_formula(f, a, "^", b, 5, 4),
        And(a, b) => bin_formula(f, a, "&&", b, 3, 4),
        Or(a, b) => bin_formula(f, a, "||", b, 2, 3),
        Implies(a, b) => bin_formula(f, a, "=>", b, 2, 1),
        Iff(a, b) => bin_formula(f, a, "<=>", b, 0, 1),
        Call(name, args) => {
            write!(f, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                match a {
                    Arg::Ident(s) => write!(f, "{s}")?,
                    Arg::Const(c) => write!(f, "{c}")?,
                    Arg::Formula(g) => write!(f, "{g}")?,
                }
            }
            write!(f, ")")
        }
    }
}

fn bin_formula(
    f: &mut fmt::Formatter<'_>,
    a: &Formula,
    op: &str,
    b: &Formula,
    la: u8,
    lb: u8,
) -> fmt::Result {
    write_formula(f, a, la)?;
    if op == "^" {
        write!(f, "^")?;
    } else {
        write!(f, " {op} ")?;
    }
    write_formula(f, b, lb)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

/// A parsed specification file. Definitions, indicator bindings and
/// requirements are kept unexpanded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpecFile {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub constants: Vec<(String, u64)>,
    pub definitions: Vec<Definition>,
    pub indicators: Vec<(String, Formula)>,
    pub hard: Requirement,
    pub soft: Requirement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<String>,
    pub body: Formula,
}

/// Body of a `hardreq`/`softreq` block: imported indicators and a list of
/// formulas read as a conjunction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Requirement {
    pub useind: Vec<String>,
    pub formulas: Vec<Formula>,
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.name.is_empty() {
            writeln!(f, "#qsf \"{}\"", self.name)?;
            writeln!(f)?;
        }
        writeln!(f, "interface {{")?;
        if !self.inputs.is_empty() {
            writeln!(f, "    input {};", self.inputs.join(", "))?;
        }
        if !self.outputs.is_empty() {
            writeln!(f, "    output {};", self.outputs.join(", "))?;
        }
        if !self.constants.is_empty() {
            let cs: Vec<String> = self
                .constants
                .iter()
                .map(|(n, v)| format!("{n} = {v}"))
                .collect();
            writeln!(f, "    constant {};", cs.join(", "))?;
        }
        writeln!(f, "}}")?;
        if !self.definitions.is_empty() {
            writeln!(f)?;
            writeln!(f, "definitions {{")?;
            for d in &self.definitions {
                writeln!(f, "    dc {}({}) {{", d.name, d.params.join(", "))?;
                writeln!(f, "        {};", d.body)?;
                writeln!(f, "    }}")?;
            }
            writeln!(f, "}}")?;
        }
        if !self.indicators.is_empty() {
            writeln!(f)?;
            writeln!(f, "indefinitions {{")?;
            for (w, d) in &self.indicators {
                writeln!(f, "    {w} : {d};")?;
            }
            writeln!(f, "}}")?;
        }
        for (kw, req) in [("hardreq", &self.hard), ("softreq", &self.soft)] {
            writeln!(f)?;
            writeln!(f, "{kw} {{")?;
            if !req.useind.is_empty() {
                writeln!(f, "    useind {};", req.useind.join(", "))?;
            }
            for r in &req.formulas {
                writeln!(f, "    {r};")?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}
