//! Safety synthesis (maximally permissive supervisors), horizon-bounded
//! optimization of soft requirements, and determinization by output order.
//!
//! A supervisor is stored as an automaton over the alphabet `inputs ++
//! outputs`, so letter `l` splits as `l = i | o << |inputs|`. Accepting
//! states are the safe states (the initial state among them); every other
//! transition leads to the unique non-accepting sink `reject`.

use std::collections::HashMap;
use std::fmt;

use crate::ast::Expanded;
use crate::compile::Compiler;
use crate::dfa::{Alphabet, Builder, Dfa, State};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Partition of the variables into inputs and outputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IoSignature {
    inputs: Vec<String>,
    outputs: Vec<String>,
    alphabet: Alphabet,
}

impl IoSignature {
    pub fn new<S: Into<String> + Clone>(inputs: &[S], outputs: &[S]) -> Result<IoSignature> {
        let inputs: Vec<String> = inputs.iter().cloned().map(Into::into).collect();
        let outputs: Vec<String> = outputs.iter().cloned().map(Into::into).collect();
        let alphabet = Alphabet::new(inputs.iter().chain(&outputs).cloned())?;
        Ok(IoSignature {
            inputs,
            outputs,
            alphabet,
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    /// `inputs ++ outputs`.
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn input_count(&self) -> usize {
        1 << self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        1 << self.outputs.len()
    }

    #[inline]
    pub fn letter(&self, input: u32, output: u32) -> u32 {
        input | output << self.inputs.len()
    }

    #[inline]
    pub fn split(&self, letter: u32) -> (u32, u32) {
        let n = self.inputs.len();
        (letter & ((1 << n) - 1), letter >> n)
    }

    pub fn format_input(&self, i: u32) -> String {
        format_set(&self.inputs, i)
    }

    pub fn format_output(&self, o: u32) -> String {
        format_set(&self.outputs, o)
    }

    /// Re-expresses `d` over `inputs ++ outputs`.
    pub fn adapt(&self, d: &Dfa) -> Result<Dfa> {
        let da = d.alphabet();
        if da.len() != self.alphabet.len() || !da.is_subset_of(&self.alphabet) {
            return Err(Error::InterfaceMismatch(format!(
                "automaton over {da} but signature has inputs {:?} and outputs {:?}",
                self.inputs, self.outputs
            )));
        }
        d.extend_to(&self.alphabet)
    }
}

fn format_set(names: &[String], bits: u32) -> String {
    let vs: Vec<&str> = names
        .iter()
        .enumerate()
        .filter(|(j, _)| bits >> j & 1 == 1)
        .map(|(_, v)| v.as_str())
        .collect();
    format!("{{{}}}", vs.join(","))
}

/// Non-blocking automaton with a unique reject sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supervisor {
    dfa: Dfa,
    io: IoSignature,
    reject: State,
}

/// Supervisor allowing at most one output per state and input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Controller(Supervisor);

impl Supervisor {
    /// Normalizes an automaton whose accepting states are the safe ones:
    /// minimizes (keeping the initial flag) and guarantees a reject sink.
    /// The result need not be non-blocking; see [`Supervisor::is_nonblocking`].
    pub fn from_safe_dfa(dfa: &Dfa, io: &IoSignature) -> Result<Supervisor> {
        let d = io.adapt(dfa)?.minimize_exact();
        let rejects: Vec<State> = (0..d.state_count() as State).filter(|&s| !d.is_accepting(s)).collect();
        let (d, reject) = match rejects.as_slice() {
            [] => {
                let n = d.state_count();
                let k = d.letter_count();
                let mut next = d.table().to_vec();
                next.extend(std::iter::repeat_n(n as State, k));
                let mut acc = d.accepting().to_vec();
                acc.push(false);
                (Dfa::from_parts(d.alphabet().clone(), d.initial(), acc, next)?, n as State)
            }
            [r] => (d, *r),
            _ => return Err(Error::Invalid("supervisor has several reject states".into())),
        };
        if !d.is_accepting(d.initial()) {
            return Err(Error::Invalid("supervisor initial state rejects".into()));
        }
        if d.row(reject).iter().any(|&t| t != reject) {
            return Err(Error::Invalid("reject state is not a sink".into()));
        }
        Ok(Supervisor {
            dfa: d,
            io: io.clone(),
            reject,
        })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn io(&self) -> &IoSignature {
        &self.io
    }

    pub fn reject(&self) -> State {
        self.reject
    }

    pub fn initial(&self) -> State {
        self.dfa.initial()
    }

    pub fn state_count(&self) -> usize {
        self.dfa.state_count()
    }

    pub fn step(&self, s: State, input: u32, output: u32) -> State {
        self.dfa.step(s, self.io.letter(input, output))
    }

    /// Outputs allowed in `s` for `input`, in increasing order.
    pub fn allowed(&self, s: State, input: u32) -> Vec<u32> {
        (0..self.io.output_count() as u32)
            .filter(|&o| self.step(s, input, o) != self.reject)
            .collect()
    }

    pub fn is_nonblocking(&self) -> bool {
        (0..self.state_count() as State)
            .filter(|&s| s != self.reject)
            .all(|s| (0..self.io.input_count() as u32).all(|i| !self.allowed(s, i).is_empty()))
    }

    pub fn is_deterministic(&self) -> bool {
        (0..self.state_count() as State)
            .filter(|&s| s != self.reject)
            .all(|s| (0..self.io.input_count() as u32).all(|i| self.allowed(s, i).len() <= 1))
    }

    /// `L(other) ⊆ L(self)`: `self ≤_det other` when `other` refines `self`.
    pub fn includes(&self, other: &Supervisor) -> Result<bool> {
        if self.io != other.io {
            return Err(Error::InterfaceMismatch("supervisors over different signatures".into()));
        }
        self.dfa.includes(&other.dfa)
    }

    /// Whether every nonempty prefix of every run satisfies `d`.
    pub fn satisfies_invariant(&self, d: &Dfa) -> Result<bool> {
        self.io.adapt(d)?.includes(&self.dfa)
    }

    pub fn into_controller(self) -> Result<Controller> {
        if !self.is_deterministic() {
            return Err(Error::Invalid("supervisor is not deterministic".into()));
        }
        Ok(Controller(self))
    }

    /// Text form: `supervisor <kind>`, `inputs ..`, `outputs ..`,
    /// `reject <state>`, then the automaton dump.
    pub fn to_dump(&self, kind: &str) -> String {
        format!(
            "supervisor {kind}\ninputs {}\noutputs {}\nreject {}\n{}",
            self.io.inputs.join(" "),
            self.io.outputs.join(" "),
            self.reject,
            self.dfa.to_dump()
        )
    }

    pub fn from_dump(text: &str) -> Result<Supervisor> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let mut field = |key: &str| -> Result<Vec<String>> {
            let l = lines.next().ok_or_else(|| Error::Format(format!("missing `{key}` line")))?;
            let mut parts = l.split_whitespace();
            if parts.next() != Some(key) {
                return Err(Error::Format(format!("expected `{key}`, found `{l}`")));
            }
            Ok(parts.map(str::to_string).collect())
        };
        field("supervisor")?;
        let inputs = field("inputs")?;
        let outputs = field("outputs")?;
        let reject: State = field("reject")?
            .first()
            .and_then(|r| r.parse().ok())
            .ok_or_else(|| Error::Format("bad reject state".into()))?;
        let rest: Vec<&str> = lines.collect();
        let dfa = Dfa::from_dump(&rest.join("\n"))?;
        let io = IoSignature::new(&inputs, &outputs)?;
        if dfa.alphabet() != io.alphabet() {
            return Err(Error::InterfaceMismatch("automaton alphabet differs from the io lines".into()));
        }
        if reject as usize >= dfa.state_count() || dfa.is_accepting(reject) {
            return Err(Error::Format("reject state must be a non-accepting state".into()));
        }
        if (0..dfa.state_count() as State).any(|s| s != reject && !dfa.is_accepting(s)) {
            return Err(Error::Format("every state except reject must be accepting".into()));
        }
        if dfa.row(reject).iter().any(|&t| t != reject) {
            return Err(Error::Format("reject state is not a sink".into()));
        }
        Ok(Supervisor { dfa, io, reject })
    }
}

impl Controller {
    pub fn supervisor(&self) -> &Supervisor {
        &self.0
    }

    pub fn into_supervisor(self) -> Supervisor {
        self.0
    }

    /// The chosen output and successor, or `None` in the reject state.
    pub fn react(&self, s: State, input: u32) -> Option<(u32, State)> {
        let sup = &self.0;
        if s == sup.reject {
            return None;
        }
        sup.allowed(s, input).first().map(|&o| (o, sup.step(s, input, o)))
    }

    pub fn from_dump(text: &str) -> Result<Controller> {
        Supervisor::from_dump(text)?.into_controller()
    }

    pub fn to_dump(&self) -> String {
        self.0.to_dump("controller")
    }
}

impl fmt::Display for Supervisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dump("supervisor"))
    }
}

/// Value-iteration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub horizon: usize,
    pub discount: f64,
    pub delta: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            horizon: 50,
            discount: 0.9,
            delta: 1e-4,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::BadArgument("horizon must be at least 1".into()));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(Error::BadArgument("discount must lie in (0,1]".into()));
        }
        if !self.delta.is_finite() || self.delta < 0.0 {
            return Err(Error::BadArgument("delta must be a finite non-negative number".into()));
        }
        Ok(())
    }
}

/// Greatest set `G` of accepting states (the initial state counted as
/// accepting) such that from each state of `G` every input has an output
/// leading back into `G`.
pub fn winning_region(hard: &Dfa, io: &IoSignature) -> Result<Vec<bool>> {
    let d = io.adapt(hard)?;
    let n = d.state_count();
    let mut good: Vec<bool> = (0..n).map(|s| d.is_accepting(s as State) || s == d.initial() as usize).collect();
    let (ni, no) = (io.input_count() as u32, io.output_count() as u32);
    loop {
        let mut changed = false;
        for s in 0..n as State {
            if !good[s as usize] {
                continue;
            }
            let ok = (0..ni).all(|i| (0..no).any(|o| good[d.step(s, io.letter(i, o)) as usize]));
            if !ok {
                good[s as usize] = false;
                changed = true;
            }
        }
        if !changed {
            return Ok(good);
        }
    }
}

/// Maximally permissive supervisor keeping every prefix inside `L(hard)`.
pub fn mps(hard: &Dfa, io: &IoSignature) -> Result<Supervisor> {
    let d = io.adapt(hard)?;
    // a fresh initial copy makes "the empty prefix is safe" independent of
    // whether the initial state is re-entered later
    let n = d.state_count();
    let k = d.letter_count();
    let mut next = d.table().to_vec();
    next.extend_from_slice(d.row(d.initial()));
    let mut acc = d.accepting().to_vec();
    acc.push(true);
    let d = Dfa::from_parts(d.alphabet().clone(), n as State, acc, next)?;
    let good = winning_region(&d, io)?;
    if !good[d.initial() as usize] {
        return Err(Error::Unrealizable(
            "no controller keeps the hard requirement invariant".into(),
        ));
    }
    let reject = n as State + 1;
    let mut table = Vec::with_capacity((n + 2) * k);
    for s in 0..=n as State {
        if good[s as usize] {
            table.extend(d.row(s).iter().map(|&t| if good[t as usize] { t } else { reject }));
        } else {
            table.extend(std::iter::repeat_n(reject, k));
        }
    }
    table.extend(std::iter::repeat_n(reject, k));
    let mut accepting = good.clone();
    accepting.push(false);
    let raw = Dfa::from_parts(d.alphabet().clone(), n as State, accepting, table)?;
    Supervisor::from_safe_dfa(&raw, io)
}

/// Product of a supervisor with a soft-requirement monitor, restricted to
/// allowed transitions.
struct Game {
    io: IoSignature,
    /// `next[x * k + l]`; `State::MAX` marks a disallowed letter.
    next: Vec<State>,
    reward: Vec<bool>,
    states: usize,
}

fn game(sup: &Supervisor, soft: &Dfa) -> Result<Game> {
    let io = sup.io.clone();
    let soft = io.adapt(soft)?;
    let k = io.alphabet().letter_count();
    let mut index: HashMap<(State, State), State> = HashMap::new();
    let mut keys = vec![(sup.initial(), soft.initial())];
    index.insert(keys[0], 0);
    let mut next = Vec::new();
    let mut reward = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let (s, m) = keys[i];
        for l in 0..k as u32 {
            let t = sup.dfa.step(s, l);
            if t == sup.reject {
                next.push(State::MAX);
                reward.push(false);
                continue;
            }
            let mt = soft.step(m, l);
            let id = *index.entry((t, mt)).or_insert_with(|| {
                keys.push((t, mt));
                (keys.len() - 1) as State
            });
            if keys.len() > crate::dfa::STATE_CAP {
                return Err(Error::ResourceLimit("soft-requirement product too large".into()));
            }
            next.push(id);
            reward.push(soft.is_accepting(mt));
        }
        i += 1;
    }
    Ok(Game {
        io,
        next,
        reward,
        states: keys.len(),
    })
}

impl Game {
    fn score(&self, vals: &[f64], discount: f64, x: usize, l: usize) -> Option<f64> {
        let k = self.io.alphabet().letter_count();
        let t = self.next[x * k + l];
        (t != State::MAX).then(|| self.reward[x * k + l] as u8 as f64 + discount * vals[t as usize])
    }

    /// One Bellman round: mean over inputs of the best output score.
    fn round(&self, vals: &[f64], discount: f64, exec: Exec) -> Vec<f64> {
        let (ni, no) = (self.io.input_count() as u32, self.io.output_count() as u32);
        exec.map_range(self.states, |x| {
            let mut total = 0.0;
            for i in 0..ni {
                let best = (0..no)
                    .filter_map(|o| self.score(vals, discount, x, self.io.letter(i, o) as usize))
                    .fold(f64::NEG_INFINITY, f64::max);
                total += if best.is_finite() { best } else { 0.0 };
            }
            total / ni as f64
        })
    }
}

/// Values after `rounds` Bellman rounds from zero, for every product state.
pub fn mphos_values(sup: &Supervisor, soft: &Dfa, discount: f64, rounds: usize, exec: Exec) -> Result<Vec<f64>> {
    let g = game(sup, soft)?;
    let mut vals = vec![0.0; g.states];
    for _ in 0..rounds {
        vals = g.round(&vals, discount, exec);
    }
    Ok(vals)
}

/// Keeps, for every state and input, only the outputs whose horizon-bounded
/// expected count of soft-requirement hits is within `delta` of the best.
pub fn mphos(sup: &Supervisor, soft: &Dfa, params: &SynthParams, exec: Exec) -> Result<Supervisor> {
    params.validate()?;
    let g = game(sup, soft)?;
    let mut vals = vec![0.0; g.states];
    for _ in 0..params.horizon - 1 {
        vals = g.round(&vals, params.discount, exec);
    }
    let k = g.io.alphabet().letter_count();
    let (ni, no) = (g.io.input_count() as u32, g.io.output_count() as u32);
    let reject = g.states as State;
    let rows: Vec<Vec<State>> = exec.map_range(g.states, |x| {
        let mut row = vec![reject; k];
        for i in 0..ni {
            let scores: Vec<(u32, f64)> = (0..no)
                .filter_map(|o| {
                    let l = g.io.letter(i, o) as usize;
                    g.score(&vals, params.discount, x, l).map(|s| (o, s))
                })
                .collect();
            let best = scores.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            for (o, s) in scores {
                if s >= best - params.delta {
                    let l = g.io.letter(i, o) as usize;
                    row[l] = g.next[x * k + l];
                }
            }
        }
        row
    });
    let mut b = Builder::new(g.io.alphabet().clone());
    for row in &rows {
        let off = b.push_state(true)?;
        b.set_row(off, row);
    }
    let off = b.push_state(false)?;
    b.set_row(off, &vec![reject; k]);
    let raw = b.finish(0)?;
    Supervisor::from_safe_dfa(&raw, &g.io)
}

/// A synthesis problem: signature plus compiled hard and soft requirements.
#[derive(Debug, Clone)]
pub struct Problem {
    pub io: IoSignature,
    pub hard: Dfa,
    pub soft: Dfa,
}

impl Problem {
    pub fn new(e: &Expanded) -> Result<Problem> {
        let io = IoSignature::new(&e.inputs, &e.outputs)?;
        let mut c = Compiler::new();
        let hard = c.compile(&e.hard, io.alphabet())?;
        let soft = c.compile(&e.soft, io.alphabet())?;
        Ok(Problem { io, hard, soft })
    }

    pub fn mps(&self) -> Result<Supervisor> {
        mps(&self.hard, &self.io)
    }

    pub fn mphos(&self, params: &SynthParams, exec: Exec) -> Result<Supervisor> {
        mphos(&self.mps()?, &self.soft, params, exec)
    }
}

/// An output literal: variable name and preferred value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.positive { "" } else { "!" }, self.var)
    }
}

/// Parses `a1 > !a2 > a3` (also accepts commas or whitespace as separators).
pub fn parse_order(text: &str) -> Result<Vec<Literal>> {
    text.split(|c: char| c == '>' || c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (positive, var) = match t.strip_prefix('!') {
                Some(v) => (false, v),
                None => (true, t),
            };
            if var.is_empty() || !var.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::parse(1, 1, format!("bad literal `{t}`")));
            }
            Ok(Literal {
                var: var.to_string(),
                positive,
            })
        })
        .collect()
}

/// Outputs sorted from most to least preferred under `order`. Outputs not
/// mentioned are appended as negative literals in declaration order.
pub fn output_preference(io: &IoSignature, order: &[Literal]) -> Result<Vec<u32>> {
    let mut lits: Vec<(usize, bool)> = Vec::new();
    for l in order {
        let j = io
            .outputs
            .iter()
            .position(|o| *o == l.var)
            .ok_or_else(|| Error::UnknownVariable(l.var.clone()))?;
        if lits.iter().any(|&(x, _)| x == j) {
            return Err(Error::Duplicate(l.var.clone()));
        }
        lits.push((j, l.positive));
    }
    for j in 0..io.outputs.len() {
        if !lits.iter().any(|&(x, _)| x == j) {
            lits.push((j, false));
        }
    }
    let mut outs: Vec<u32> = (0..io.output_count() as u32).collect();
    outs.sort_by_key(|&o| {
        lits.iter()
            .map(|&(j, pos)| ((o >> j & 1 == 1) != pos) as u8)
            .collect::<Vec<u8>>()
    });
    Ok(outs)
}

/// Resolves non-determinism by keeping the most preferred allowed output.
pub fn det_by_order(sup: &Supervisor, order: &[Literal]) -> Result<Controller> {
    let io = &sup.io;
    let pref = output_preference(io, order)?;
    let k = io.alphabet().letter_count();
    let mut table = Vec::with_capacity(sup.state_count() * k);
    for s in 0..sup.state_count() as State {
        let mut row = vec![sup.reject; k];
        if s != sup.reject {
            for i in 0..io.input_count() as u32 {
                if let Some(&o) = pref.iter().find(|&&o| sup.step(s, i, o) != sup.reject) {
                    let l = io.letter(i, o) as usize;
                    row[l] = sup.dfa.row(s)[l];
                }
            }
        }
        table.extend(row);
    }
    let raw = Dfa::from_parts(
        io.alphabet().clone(),
        sup.initial(),
        sup.dfa.accepting().to_vec(),
        table,
    )?;
    Supervisor::from_safe_dfa(&raw, io)?.into_controller()
}

/// Whether strengthening the hard requirement can only shrink the maximally
/// permissive supervisor. Requires `L(hard1) ⊆ L(hard2)`.
pub fn must_monotone_check(hard1: &Dfa, hard2: &Dfa, io: &IoSignature) -> Result<bool> {
    let (h1, h2) = (io.adapt(hard1)?, io.adapt(hard2)?);
    if !h2.includes(&h1)? {
        return Err(Error::Invalid("the first requirement does not imply the second".into()));
    }
    let s1 = match mps(&h1, io) {
        Ok(s) => s,
        Err(Error::Unrealizable(_)) => return Ok(true),
        Err(e) => return Err(e),
    };
    let s2 = match mps(&h2, io) {
        Ok(s) => s,
        Err(Error::Unrealizable(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    s2.includes(&s1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_formula_unchecked;
    use crate::compile::compile;

    fn io(i: &[&str], o: &[&str]) -> IoSignature {
        IoSignature::new(i, o).unwrap()
    }

    fn hard(s: &str, io: &IoSignature) -> Dfa {
        compile(&parse_formula_unchecked(s).unwrap(), io.alphabet()).unwrap()
    }

    #[test]
    fn universal_spec_allows_everything() {
        let sig = io(&["r"], &["a", "b"]);
        let s = mps(&hard("true", &sig), &sig).unwrap();
        assert_eq!(s.state_count(), 2);
        for i in 0..2 {
            assert_eq!(s.allowed(s.initial(), i), vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn output_must_follow_input() {
        let sig = io(&["r"], &["a"]);
        let s = mps(&hard("[[r <=> a]]", &sig), &sig).unwrap();
        assert_eq!(s.allowed(s.initial(), 0), vec![0]);
        assert_eq!(s.allowed(s.initial(), 1), vec![1]);
        assert!(s.is_deterministic());
        assert!(s.satisfies_invariant(&hard("[[r <=> a]]", &sig)).unwrap());
        assert!(!s.satisfies_invariant(&hard("[[a]]", &sig)).unwrap());
    }

    #[test]
    fn prediction_is_unrealizable() {
        // the output would have to anticipate the next input
        let sig = io(&["r"], &["a"]);
        let err = mps(&hard("[]({{a}} <=> {{true}}^<r>)", &sig), &sig).unwrap_err();
        assert!(matches!(err, Error::Unrealizable(_)));
    }

    #[test]
    fn preference_order_example() {
        let sig = io(&[], &["o1", "o2"]);
        let order = parse_order("o1 > !o2").unwrap();
        // letters: bit0 = o1, bit1 = o2
        assert_eq!(output_preference(&sig, &order).unwrap(), vec![0b01, 0b11, 0b00, 0b10]);
    }

    #[test]
    fn unknown_literal_rejected() {
        let sig = io(&["r"], &["a"]);
        assert!(matches!(
            output_preference(&sig, &parse_order("zz").unwrap()),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn det_picks_preferred_output() {
        let sig = io(&["r"], &["a", "b"]);
        let s = mps(&hard("[[a || b]]", &sig), &sig).unwrap();
        let c = det_by_order(&s, &parse_order("!a > b").unwrap()).unwrap();
        assert!(c.supervisor().is_deterministic());
        assert!(c.supervisor().is_nonblocking());
        let (o, _) = c.react(c.supervisor().initial(), 0).unwrap();
        assert_eq!(o, 0b10);
        assert!(s.includes(c.supervisor()).unwrap());
    }

    #[test]
    fn mphos_with_trivial_soft_is_identity() {
        let sig = io(&["r"], &["a", "b"]);
        let s = mps(&hard("[[r => a]]", &sig), &sig).unwrap();
        let m = mphos(&s, &Dfa::universal(sig.alphabet()), &SynthParams::default(), Exec::Sequential).unwrap();
        assert!(m.dfa().equivalent(s.dfa()).unwrap());
    }

    #[test]
    fn mphos_prefers_soft_outputs() {
        let sig = io(&["r"], &["a"]);
        let s = mps(&hard("true", &sig), &sig).unwrap();
        let m = mphos(&s, &hard("<>(<a>)", &sig), &SynthParams::default(), Exec::Sequential).unwrap();
        assert!(s.includes(&m).unwrap());
        assert_eq!(m.allowed(m.initial(), 0), vec![1]);
    }

    #[test]
    fn monotone_check() {
        let sig = io(&["r"], &["p", "q"]);
        let h1 = hard("[[p && q]]", &sig);
        let h2 = hard("[[p]]", &sig);
        assert!(must_monotone_check(&h1, &h2, &sig).unwrap());
        assert!(must_monotone_check(&h2, &h2, &sig).unwrap());
        assert!(must_monotone_check(&h2, &h1, &sig).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let sig = io(&["r"], &["a"]);
        let s = mps(&hard("[[r => a]]", &sig), &sig).unwrap();
        let back = Supervisor::from_dump(&s.to_dump("supervisor")).unwrap();
        assert_eq!(back, s);
        assert!(Controller::from_dump(&s.to_dump("controller")).is_err());
    }
}
