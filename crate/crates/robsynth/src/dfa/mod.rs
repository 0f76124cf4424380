//! Explicit-state automata over valuations of an ordered variable set.
//!
//! A letter is a bit-vector: bit `j` is the value of the `j`-th variable of
//! the alphabet. Automata are total and stored as dense transition tables.
//! Languages only contain nonempty words: acceptance is read off the state
//! reached after at least one letter, so the flag of the initial state
//! matters only when the initial state is re-entered.

mod io;
mod minimize;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

pub use io::{cube_cover, parse_cube};

pub type State = u32;

/// Largest supported alphabet (2^MAX_VARS letters per state).
pub const MAX_VARS: usize = 20;

/// Largest number of states any construction may produce.
pub const STATE_CAP: usize = 1 << 20;

/// Upper bound on transition-table entries (states times letters).
pub const TABLE_CAP: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alphabet {
    vars: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(vars: I) -> Result<Alphabet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::Duplicate(v.clone()));
            }
        }
        if vars.len() > MAX_VARS {
            return Err(Error::ResourceLimit(format!(
                "{} variables exceed the alphabet limit of {MAX_VARS}",
                vars.len()
            )));
        }
        Ok(Alphabet { vars })
    }

    pub fn empty() -> Alphabet {
        Alphabet::default()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn letter_count(&self) -> usize {
        1 << self.vars.len()
    }

    pub fn index(&self, v: &str) -> Option<usize> {
        self.vars.iter().position(|x| x == v)
    }

    pub fn contains(&self, v: &str) -> bool {
        self.index(v).is_some()
    }

    pub fn is_subset_of(&self, other: &Alphabet) -> bool {
        self.vars.iter().all(|v| other.contains(v))
    }

    /// Letter with exactly the named variables set.
    pub fn letter<S: AsRef<str>>(&self, true_vars: &[S]) -> Result<u32> {
        let mut l = 0;
        for v in true_vars {
            let i = self
                .index(v.as_ref())
                .ok_or_else(|| Error::UnknownVariable(v.as_ref().to_string()))?;
            l |= 1 << i;
        }
        Ok(l)
    }

    /// Bit mask selecting the named variables.
    pub fn mask<S: AsRef<str>>(&self, vars: &[S]) -> Result<u32> {
        self.letter(vars)
    }

    pub fn true_vars(&self, letter: u32) -> Vec<&str> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| letter >> i & 1 == 1)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    pub fn format_letter(&self, letter: u32) -> String {
        format!("{{{}}}", self.true_vars(letter).join(","))
    }

    /// For every letter of `target`, the corresponding letter of `self`.
    /// Requires `self ⊆ target`.
    fn restriction_map(&self, target: &Alphabet) -> Result<Vec<u32>> {
        let pos: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                target.index(v).ok_or_else(|| {
                    Error::AlphabetMismatch(format!("`{v}` missing from the target alphabet"))
                })
            })
            .collect::<Result<_>>()?;
        Ok((0..target.letter_count() as u32)
            .map(|l| {
                pos.iter()
                    .enumerate()
                    .fold(0, |acc, (j, &t)| acc | ((l >> t) & 1) << j)
            })
            .collect())
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.vars.join(","))
    }
}

/// A nonempty word over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub alphabet: Alphabet,
    pub letters: Vec<u32>,
}

impl Word {
    pub fn new(alphabet: Alphabet, letters: Vec<u32>) -> Word {
        Word { alphabet, letters }
    }

    /// Builds a word from per-position lists of true variables.
    pub fn from_sets<S: AsRef<str>>(alphabet: &Alphabet, sets: &[&[S]]) -> Result<Word> {
        let letters = sets
            .iter()
            .map(|s| alphabet.letter(s))
            .collect::<Result<_>>()?;
        Ok(Word::new(alphabet.clone(), letters))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| self.alphabet.format_letter(*l))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    AndNot,
    Xor,
}

impl BoolOp {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::AndNot => a && !b,
            BoolOp::Xor => a != b,
        }
    }
}

/// Total deterministic automaton with a dense transition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: State,
    accepting: Vec<bool>,
    next: Vec<State>,
}

impl Dfa {
    /// Builds an automaton from a table laid out as `next[s * letters + l]`.
    pub fn from_parts(
        alphabet: Alphabet,
        initial: State,
        accepting: Vec<bool>,
        next: Vec<State>,
    ) -> Result<Dfa> {
        let n = accepting.len();
        if n == 0 || initial as usize >= n {
            return Err(Error::Format("automaton needs a valid initial state".into()));
        }
        if next.len() != n * alphabet.letter_count() {
            return Err(Error::Format("transition table has the wrong size".into()));
        }
        if next.iter().any(|&t| t as usize >= n) {
            return Err(Error::Format("transition to an unknown state".into()));
        }
        Ok(Dfa {
            alphabet,
            initial,
            accepting,
            next,
        })
    }

    /// Accepts every nonempty word.
    pub fn universal(alphabet: &Alphabet) -> Dfa {
        let k = alphabet.letter_count();
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            accepting: vec![false, true],
            next: vec![1; 2 * k],
        }
    }

    /// Accepts nothing.
    pub fn empty(alphabet: &Alphabet) -> Dfa {
        Dfa {
            alphabet: alphabet.clone(),
            initial: 0,
            accepting: vec![false],
            next: vec![0; alphabet.letter_count()],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.letter_count()
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn is_accepting(&self, s: State) -> bool {
        self.accepting[s as usize]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    #[inline]
    pub fn step(&self, s: State, letter: u32) -> State {
        self.next[(s as usize) * self.letter_count() + letter as usize]
    }

    /// Successors of `s`, indexed by letter.
    pub fn row(&self, s: State) -> &[State] {
        let k = self.letter_count();
        &self.next[s as usize * k..(s as usize + 1) * k]
    }

    pub fn table(&self) -> &[State] {
        &self.next
    }

    pub fn run(&self, letters: &[u32]) -> State {
        letters.iter().fold(self.initial, |s, &l| self.step(s, l))
    }

    pub fn accepts(&self, letters: &[u32]) -> Result<bool> {
        if letters.is_empty() {
            return Err(Error::Invalid("words must be nonempty".into()));
        }
        let k = self.letter_count() as u32;
        if letters.iter().any(|&l| l >= k) {
            return Err(Error::AlphabetMismatch("letter outside the alphabet".into()));
        }
        Ok(self.is_accepting(self.run(letters)))
    }

    pub fn accepts_word(&self, w: &Word) -> Result<bool> {
        if w.alphabet != self.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "word over {} but automaton over {}",
                w.alphabet, self.alphabet
            )));
        }
        self.accepts(&w.letters)
    }

    pub fn complement(&self) -> Dfa {
        let mut out = self.clone();
        for a in &mut out.accepting {
            *a = !*a;
        }
        out
    }

    /// Replaces the acceptance flags.
    pub fn with_accepting(&self, accepting: Vec<bool>) -> Result<Dfa> {
        if accepting.len() != self.state_count() {
            return Err(Error::Invalid("acceptance vector has the wrong size".into()));
        }
        let mut out = self.clone();
        out.accepting = accepting;
        Ok(out)
    }

    fn check_same(&self, other: &Dfa) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{} vs {}",
                self.alphabet, other.alphabet
            )));
        }
        Ok(())
    }

    /// Reachable synchronous product; not minimized.
    pub fn product(&self, other: &Dfa, op: BoolOp) -> Result<Dfa> {
        self.check_same(other)?;
        let k = self.letter_count();
        let (na, nb) = (self.state_count(), other.state_count());
        let mut builder = Builder::new(self.alphabet.clone());
        if na.saturating_mul(nb) <= 1 << 24 {
            let mut index = vec![u32::MAX; na * nb];
            let key = |a: State, b: State| a as usize * nb + b as usize;
            let mut pairs: Vec<(State, State)> = vec![(self.initial, other.initial)];
            index[key(self.initial, other.initial)] = 0;
            let mut i = 0;
            while i < pairs.len() {
                let (a, b) = pairs[i];
                let (ra, rb) = (self.row(a), other.row(b));
                let row = builder.push_state(op.apply(self.is_accepting(a), other.is_accepting(b)))?;
                for l in 0..k {
                    let kk = key(ra[l], rb[l]);
                    if index[kk] == u32::MAX {
                        index[kk] = pairs.len() as u32;
                        pairs.push((ra[l], rb[l]));
                    }
                    builder.next[row + l] = index[kk];
                }
                i += 1;
            }
            return builder.finish(0);
        }
        builder.explore(
            (self.initial, other.initial),
            |&(a, b)| op.apply(self.is_accepting(a), other.is_accepting(b)),
            |&(a, b), l, out: &mut (State, State)| *out = (self.step(a, l), other.step(b, l)),
        )
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, BoolOp::And)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, BoolOp::Or)
    }

    /// Same language over a larger (or reordered) alphabet; variables not in
    /// `self` are unconstrained.
    pub fn extend_to(&self, target: &Alphabet) -> Result<Dfa> {
        if *target == self.alphabet {
            return Ok(self.clone());
        }
        let map = self.alphabet.restriction_map(target)?;
        let n = self.state_count();
        let kt = target.letter_count();
        check_table(n, kt)?;
        let mut next = Vec::with_capacity(n * kt);
        for s in 0..n as State {
            let row = self.row(s);
            next.extend(map.iter().map(|&l| row[l as usize]));
        }
        Ok(Dfa {
            alphabet: target.clone(),
            initial: self.initial,
            accepting: self.accepting.clone(),
            next,
        })
    }

    /// Existential projection onto `keep ⊆ alphabet` (subset construction).
    pub fn project_onto(&self, keep: &Alphabet) -> Result<Dfa> {
        if !keep.is_subset_of(&self.alphabet) {
            return Err(Error::AlphabetMismatch(format!(
                "{keep} is not a subset of {}",
                self.alphabet
            )));
        }
        let kept: Vec<usize> = keep
            .vars()
            .iter()
            .map(|v| self.alphabet.index(v).expect("subset"))
            .collect();
        let dropped: Vec<usize> = (0..self.alphabet.len()).filter(|i| !kept.contains(i)).collect();
        // expansions[l] = all letters of self agreeing with the kept letter l
        let expansions: Vec<Vec<u32>> = (0..keep.letter_count() as u32)
            .map(|l| {
                let base = kept
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, &i)| acc | ((l >> j) & 1) << i);
                (0..1u32 << dropped.len())
                    .map(|m| {
                        dropped
                            .iter()
                            .enumerate()
                            .fold(base, |acc, (j, &i)| acc | ((m >> j) & 1) << i)
                    })
                    .collect()
            })
            .collect();
        let builder = Builder::new(keep.clone());
        builder.explore(
            vec![self.initial],
            |set: &Vec<State>| set.iter().any(|&s| self.is_accepting(s)),
            |set: &Vec<State>, l, out: &mut Vec<State>| {
                out.clear();
                for &s in set {
                    for &full in &expansions[l as usize] {
                        out.push(self.step(s, full));
                    }
                }
                out.sort_unstable();
                out.dedup();
            },
        )
    }

    /// Existentially projects out one variable.
    pub fn project(&self, var: &str) -> Result<Dfa> {
        if !self.alphabet.contains(var) {
            return Err(Error::UnknownVariable(var.to_string()));
        }
        let keep = Alphabet::new(self.alphabet.vars().iter().filter(|v| *v != var).cloned())?;
        self.project_onto(&keep)
    }

    /// One-point-overlap concatenation: accepts `w` iff some split point `i`
    /// has `w[0..=i]` in `self` and `w[i..]` in `other`.
    pub fn chop(&self, other: &Dfa) -> Result<Dfa> {
        self.check_same(other)?;
        let builder = Builder::new(self.alphabet.clone());
        // key[0] is the state of `self`; key[1..] the sorted set of `other`
        builder.explore(
            vec![self.initial],
            |key: &Vec<State>| key[1..].iter().any(|&s| other.is_accepting(s)),
            |key: &Vec<State>, l, out: &mut Vec<State>| {
                out.clear();
                let q = self.step(key[0], l);
                out.push(q);
                for &s in &key[1..] {
                    out.push(other.step(s, l));
                }
                if self.is_accepting(q) {
                    out.push(other.step(other.initial, l));
                }
                out[1..].sort_unstable();
                let mut w = 1;
                for r in 1..out.len() {
                    if w == 1 || out[r] != out[w - 1] {
                        out[w] = out[r];
                        w += 1;
                    }
                }
                out.truncate(w);
            },
        )
    }

    /// Restricts to states reachable from the initial state.
    pub fn trim(&self) -> Dfa {
        let reach = self.reachable();
        if reach.iter().all(|&r| r) {
            return self.clone();
        }
        let order: Vec<State> = (0..self.state_count() as State)
            .filter(|&s| reach[s as usize])
            .collect();
        self.renumber(&order)
    }

    /// Keeps the states listed in `order` (which must be closed under
    /// successors and contain the initial state), renumbered in that order.
    fn renumber(&self, order: &[State]) -> Dfa {
        let mut map = vec![u32::MAX; self.state_count()];
        for (i, &s) in order.iter().enumerate() {
            map[s as usize] = i as State;
        }
        let k = self.letter_count();
        let mut next = Vec::with_capacity(order.len() * k);
        for &s in order {
            next.extend(self.row(s).iter().map(|&t| map[t as usize]));
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            initial: map[self.initial as usize],
            accepting: order.iter().map(|&s| self.accepting[s as usize]).collect(),
            next,
        }
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let mut stack = vec![self.initial];
        seen[self.initial as usize] = true;
        while let Some(s) = stack.pop() {
            for &t in self.row(s) {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Shortest nonempty accepted word (length-lexicographically least among
    /// the shortest), if any.
    pub fn shortest_word(&self) -> Option<Vec<u32>> {
        let n = self.state_count();
        let k = self.letter_count() as u32;
        // parent[s] = (predecessor or u32::MAX for the initial root, letter)
        let mut parent: Vec<Option<(State, u32)>> = vec![None; n];
        let mut queue = VecDeque::new();
        for l in 0..k {
            let t = self.step(self.initial, l);
            if parent[t as usize].is_none() {
                parent[t as usize] = Some((u32::MAX, l));
                queue.push_back(t);
            }
        }
        while let Some(s) = queue.pop_front() {
            if self.is_accepting(s) {
                let mut word = Vec::new();
                let mut cur = s;
                loop {
                    let (p, l) = parent[cur as usize].expect("visited");
                    word.push(l);
                    if p == u32::MAX {
                        break;
                    }
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for l in 0..k {
                let t = self.step(s, l);
                if parent[t as usize].is_none() {
                    parent[t as usize] = Some((s, l));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_word().is_none()
    }

    /// Whether every nonempty word is accepted.
    pub fn is_universal(&self) -> bool {
        self.complement().is_empty()
    }

    /// Shortest word in `L(self) \ L(other)`.
    pub fn difference_witness(&self, other: &Dfa) -> Result<Option<Vec<u32>>> {
        self.check_same(other)?;
        Ok(self.product(other, BoolOp::AndNot)?.shortest_word())
    }

    /// `L(other) ⊆ L(self)`.
    pub fn includes(&self, other: &Dfa) -> Result<bool> {
        Ok(other.difference_witness(self)?.is_none())
    }

    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.product(other, BoolOp::Xor)?.is_empty())
    }
}

fn check_table(states: usize, letters: usize) -> Result<()> {
    if states > STATE_CAP || states.saturating_mul(letters) > TABLE_CAP {
        return Err(Error::ResourceLimit(format!(
            "{states} states over {letters} letters exceed the automaton size cap"
        )));
    }
    Ok(())
}

/// Incremental table construction used by products and subset constructions.
pub(crate) struct Builder {
    alphabet: Alphabet,
    k: usize,
    accepting: Vec<bool>,
    next: Vec<State>,
}

impl Builder {
    pub(crate) fn new(alphabet: Alphabet) -> Builder {
        let k = alphabet.letter_count();
        Builder {
            alphabet,
            k,
            accepting: Vec::new(),
            next: Vec::new(),
        }
    }

    /// Appends a state with an all-zero row; returns the row offset.
    pub(crate) fn push_state(&mut self, acc: bool) -> Result<usize> {
        check_table(self.accepting.len() + 1, self.k)?;
        self.accepting.push(acc);
        let off = self.next.len();
        self.next.resize(off + self.k, 0);
        Ok(off)
    }

    pub(crate) fn set_row(&mut self, off: usize, row: &[State]) {
        self.next[off..off + self.k].copy_from_slice(row);
    }

    pub(crate) fn finish(self, initial: State) -> Result<Dfa> {
        Dfa::from_parts(self.alphabet, initial, self.accepting, self.next)
    }

    /// Breadth-first exploration of a deterministic transition structure on
    /// hashable keys. State 0 is the initial key.
    pub(crate) fn explore<K, A, S>(mut self, init: K, acc: A, mut succ: S) -> Result<Dfa>
    where
        K: Hash + Eq + Clone + Default,
        A: Fn(&K) -> bool,
        S: FnMut(&K, u32, &mut K),
    {
        let mut index: HashMap<K, State> = HashMap::new();
        let mut keys: Vec<K> = vec![init.clone()];
        index.insert(init, 0);
        let mut buf = K::default();
        let mut i = 0;
        while i < keys.len() {
            let row = self.push_state(acc(&keys[i]))?;
            for l in 0..self.k as u32 {
                succ(&keys[i], l, &mut buf);
                let id = match index.get(&buf) {
                    Some(&id) => id,
                    None => {
                        let id = keys.len() as State;
                        if keys.len() >= STATE_CAP {
                            return Err(Error::ResourceLimit(format!(
                                "subset construction exceeded {STATE_CAP} states"
                            )));
                        }
                        index.insert(buf.clone(), id);
                        keys.push(buf.clone());
                        id
                    }
                };
                self.next[row + l as usize] = id;
            }
            i += 1;
        }
        self.finish(0)
    }
}
