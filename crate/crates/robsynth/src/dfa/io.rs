//! Text formats: a line-based dump with cube-labelled transitions, and DOT.

use std::fmt::Write as _;

use super::{Alphabet, Dfa, State};
use crate::error::{Error, Result};

/// Cube text for an alphabet without variables.
const EMPTY_CUBE: &str = "_";

/// Covers the outgoing transitions of `s` by cubes, one destination per
/// cube. A cube has one character per variable: `0`, `1` or `-`.
pub fn cube_cover(dfa: &Dfa, s: State) -> Vec<(String, State)> {
    let nv = dfa.alphabet().len();
    let row = dfa.row(s);
    let mut out = Vec::new();
    let mut cube = vec![b'-'; nv];
    cover(row, nv, 0, 0, &mut cube, &mut out);
    out.iter_mut()
        .filter(|(c, _)| c.is_empty())
        .for_each(|(c, _)| *c = EMPTY_CUBE.to_string());
    out
}

/// Letters of the subspace fixed on variables `< j` by `base`.
fn subspace(nv: usize, j: usize, base: u32) -> impl Iterator<Item = u32> {
    (0..1u32 << (nv - j)).map(move |m| base | (m << j))
}

fn cover(row: &[State], nv: usize, j: usize, base: u32, cube: &mut Vec<u8>, out: &mut Vec<(String, State)>) {
    let first = row[base as usize];
    if subspace(nv, j, base).all(|l| row[l as usize] == first) {
        out.push((String::from_utf8(cube.clone()).expect("ascii"), first));
        return;
    }
    let bit = 1u32 << j;
    let same = subspace(nv, j + 1, base).all(|l| row[l as usize] == row[(l | bit) as usize]);
    if same {
        cube[j] = b'-';
        cover(row, nv, j + 1, base, cube, out);
        return;
    }
    cube[j] = b'0';
    cover(row, nv, j + 1, base, cube, out);
    cube[j] = b'1';
    cover(row, nv, j + 1, base | bit, cube, out);
    cube[j] = b'-';
}

/// All letters matched by a cube over `nvars` variables.
pub fn parse_cube(text: &str, nvars: usize) -> Result<Vec<u32>> {
    if nvars == 0 && (text == EMPTY_CUBE || text.is_empty()) {
        return Ok(vec![0]);
    }
    if text.len() != nvars {
        return Err(Error::Format(format!(
            "cube `{text}` has {} positions, expected {nvars}",
            text.len()
        )));
    }
    let mut letters = vec![0u32];
    for (j, ch) in text.bytes().enumerate() {
        match ch {
            b'0' => {}
            b'1' => letters.iter_mut().for_each(|l| *l |= 1 << j),
            b'-' => {
                let set: Vec<u32> = letters.iter().map(|l| l | 1 << j).collect();
                letters.extend(set);
            }
            _ => return Err(Error::Format(format!("bad cube character `{}`", ch as char))),
        }
    }
    letters.sort_unstable();
    Ok(letters)
}

impl Dfa {
    /// Line-based dump:
    /// `dfa <states> <vars> <initial>`, `vars <names..>`, `acc <states..>`,
    /// then one `t <src> <cube> <dst>` line per cube.
    pub fn to_dump(&self) -> String {
        let mut s = String::new();
        let n = self.state_count();
        let _ = writeln!(s, "dfa {n} {} {}", self.alphabet().len(), self.initial());
        let _ = writeln!(s, "vars {}", self.alphabet().vars().join(" "));
        let acc: Vec<String> = (0..n)
            .filter(|&q| self.accepting()[q])
            .map(|q| q.to_string())
            .collect();
        let _ = writeln!(s, "acc {}", acc.join(" "));
        for q in 0..n as State {
            for (cube, t) in cube_cover(self, q) {
                let _ = writeln!(s, "t {q} {cube} {t}");
            }
        }
        s
    }

    /// Parses [`Dfa::to_dump`] output. Lines starting with `#` are skipped.
    pub fn from_dump(text: &str) -> Result<Dfa> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |i: usize, m: &str| Error::Format(format!("line {}: {m}", i + 1));
        let num = |i: usize, t: Option<&str>| -> Result<usize> {
            t.and_then(|x| x.parse().ok()).ok_or_else(|| bad(i, "expected a number"))
        };

        let (i, header) = lines.next().ok_or_else(|| Error::Format("empty automaton dump".into()))?;
        let mut h = header.split_whitespace();
        if h.next() != Some("dfa") {
            return Err(bad(i, "expected `dfa <states> <vars> <initial>`"));
        }
        let n = num(i, h.next())?;
        let nv = num(i, h.next())?;
        let init = num(i, h.next())?;

        let (i, vline) = lines.next().ok_or_else(|| Error::Format("missing `vars` line".into()))?;
        let mut v = vline.split_whitespace();
        if v.next() != Some("vars") {
            return Err(bad(i, "expected `vars`"));
        }
        let alphabet = Alphabet::new(v)?;
        if alphabet.len() != nv {
            return Err(bad(i, "variable count does not match the header"));
        }
        if n == 0 || n > super::STATE_CAP {
            return Err(bad(0, "state count out of range"));
        }
        super::check_table(n, alphabet.letter_count())?;

        let (i, aline) = lines.next().ok_or_else(|| Error::Format("missing `acc` line".into()))?;
        let mut a = aline.split_whitespace();
        if a.next() != Some("acc") {
            return Err(bad(i, "expected `acc`"));
        }
        let mut accepting = vec![false; n];
        for q in a {
            let q: usize = q.parse().map_err(|_| bad(i, "bad state"))?;
            *accepting.get_mut(q).ok_or_else(|| bad(i, "state out of range"))? = true;
        }

        let k = alphabet.letter_count();
        let mut next = vec![State::MAX; n * k];
        for (i, line) in lines {
            let mut t = line.split_whitespace();
            if t.next() != Some("t") {
                return Err(bad(i, "expected `t <src> <cube> <dst>`"));
            }
            let src = num(i, t.next())?;
            let cube = t.next().ok_or_else(|| bad(i, "missing cube"))?;
            let dst = num(i, t.next())?;
            if src >= n || dst >= n {
                return Err(bad(i, "state out of range"));
            }
            for l in parse_cube(cube, nv).map_err(|e| bad(i, &e.to_string()))? {
                let slot = &mut next[src * k + l as usize];
                if *slot != State::MAX && *slot != dst as State {
                    return Err(bad(i, "nondeterministic transition"));
                }
                *slot = dst as State;
            }
        }
        if next.contains(&State::MAX) {
            return Err(Error::Format("transition relation is not total".into()));
        }
        Dfa::from_parts(alphabet, init as State, accepting, next)
    }

    /// Graphviz rendering with cube labels written as literal conjunctions.
    pub fn to_dot(&self) -> String {
        let vars = self.alphabet().vars();
        let mut s = String::from("digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n");
        for q in 0..self.state_count() {
            let shape = if self.accepting()[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  {q} [shape={shape}];");
        }
        let _ = writeln!(s, "  init -> {};", self.initial());
        for q in 0..self.state_count() as State {
            for (cube, t) in cube_cover(self, q) {
                let lits: Vec<String> = cube
                    .bytes()
                    .zip(vars)
                    .filter_map(|(c, v)| match c {
                        b'0' => Some(format!("!{v}")),
                        b'1' => Some(v.clone()),
                        _ => None,
                    })
                    .collect();
                let label = if lits.is_empty() { "true".to_string() } else { lits.join("&") };
                let _ = writeln!(s, "  {q} -> {t} [label=\"{label}\"];");
            }
        }
        s.push_str("}\n");
        s
    }
}
