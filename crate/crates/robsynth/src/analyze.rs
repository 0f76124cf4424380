//! Post-synthesis analysis: must-dominance, long-run expected satisfaction
//! of a property under uniformly random inputs, and closed-loop simulation.

use std::collections::HashMap;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dfa::{Alphabet, BoolOp, Dfa, State, Word};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::synth::{Controller, Supervisor};

/// Largest block solved by dense LU; larger blocks are iterated.
pub const DENSE_LIMIT: usize = 2000;

/// Residual above which a linear solve is reported as a numerical failure.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

const ITERATION_LIMIT: usize = 1_000_000;

/// Input words for which every allowed output completion satisfies `commit`
/// at its last point.
pub fn must_inputs(sup: &Supervisor, commit: &Dfa) -> Result<Dfa> {
    let io = sup.io();
    let commit = io.adapt(commit)?;
    let bad = sup.dfa().product(&commit, BoolOp::AndNot)?;
    let inputs = Alphabet::new(io.inputs())?;
    Ok(bad.project_onto(&inputs)?.complement().minimize())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `MustInp(left) ⊋ MustInp(right)`.
    LeftDominates,
    /// `MustInp(left) ⊊ MustInp(right)`.
    RightDominates,
    MustEquivalent,
    Incomparable,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::LeftDominates => "LeftDominates",
            Relation::RightDominates => "RightDominates",
            Relation::MustEquivalent => "MustEquivalent",
            Relation::Incomparable => "Incomparable",
        })
    }
}

/// Must-dominance verdict with shortest witnesses of each non-inclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceResult {
    pub relation: Relation,
    /// In `MustInp(left)` but not in `MustInp(right)`.
    pub left_only: Option<Word>,
    /// In `MustInp(right)` but not in `MustInp(left)`.
    pub right_only: Option<Word>,
}

pub fn must_dominance(left: &Supervisor, right: &Supervisor, commit: &Dfa) -> Result<DominanceResult> {
    if left.io() != right.io() {
        return Err(Error::InterfaceMismatch("supervisors over different signatures".into()));
    }
    compare_must_inputs(&must_inputs(left, commit)?, &must_inputs(right, commit)?)
}

/// Dominance verdict from precomputed [`must_inputs`] automata.
pub fn compare_must_inputs(left: &Dfa, right: &Dfa) -> Result<DominanceResult> {
    let wrap = |w: Option<Vec<u32>>| w.map(|l| Word::new(left.alphabet().clone(), l));
    let left_only = wrap(left.difference_witness(right)?);
    let right_only = wrap(right.difference_witness(left)?);
    let relation = match (&left_only, &right_only) {
        (None, None) => Relation::MustEquivalent,
        (Some(_), None) => Relation::LeftDominates,
        (None, Some(_)) => Relation::RightDominates,
        (Some(_), Some(_)) => Relation::Incomparable,
    };
    Ok(DominanceResult {
        relation,
        left_only,
        right_only,
    })
}

/// Finite discrete-time Markov chain with a set of accepting states.
#[derive(Debug, Clone, PartialEq)]
pub struct Dtmc {
    pub initial: usize,
    /// Outgoing `(probability, target)` pairs, targets distinct.
    pub rows: Vec<Vec<(f64, usize)>>,
    pub accepting: Vec<bool>,
}

impl Dtmc {
    pub fn new(initial: usize, rows: Vec<Vec<(f64, usize)>>, accepting: Vec<bool>) -> Result<Dtmc> {
        let n = rows.len();
        if accepting.len() != n || initial >= n {
            return Err(Error::Invalid("chain dimensions disagree".into()));
        }
        for (s, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().map(|p| p.0).sum();
            if row.iter().any(|&(p, t)| p.is_nan() || p < 0.0 || t >= n) || (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Invalid(format!("row {s} is not a probability distribution")));
            }
        }
        Ok(Dtmc {
            initial,
            rows,
            accepting,
        })
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn transitions(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// MRMC-style `.tra` text with 1-based state numbers.
    pub fn to_tra(&self) -> String {
        let mut out = format!("STATES {}\nTRANSITIONS {}\n", self.states(), self.transitions());
        for (s, row) in self.rows.iter().enumerate() {
            let mut row = row.clone();
            row.sort_by_key(|p| p.1);
            for (p, t) in row {
                out.push_str(&format!("{} {} {}\n", s + 1, t + 1, p));
            }
        }
        out
    }

    /// MRMC-style `.lab` text labelling accepting states `target`.
    pub fn to_lab(&self) -> String {
        let mut out = String::from("#DECLARATION\ntarget\n#END\n");
        for (s, &a) in self.accepting.iter().enumerate() {
            if a {
                out.push_str(&format!("{} target\n", s + 1));
            }
        }
        out
    }
}

/// Closed loop of `cnt` and the monitor `prop` under independent uniform
/// inputs. State 0 is a fresh non-accepting initial state.
pub fn build_dtmc(cnt: &Controller, prop: &Dfa) -> Result<Dtmc> {
    let sup = cnt.supervisor();
    let io = sup.io();
    let prop = io.adapt(prop)?;
    let ni = io.input_count();
    let p = 1.0 / ni as f64;
    let mut index: HashMap<(State, State), usize> = HashMap::new();
    let mut keys: Vec<(State, State)> = Vec::new();
    let mut rows = Vec::new();
    let mut x = 0;
    while x <= keys.len() {
        let (c, m) = if x == 0 { (sup.initial(), prop.initial()) } else { keys[x - 1] };
        let mut row: Vec<(f64, usize)> = Vec::new();
        for i in 0..ni as u32 {
            let (o, c2) = cnt
                .react(c, i)
                .ok_or_else(|| Error::Invalid(format!("controller blocks in state {c}")))?;
            let m2 = prop.step(m, io.letter(i, o));
            let t = *index.entry((c2, m2)).or_insert_with(|| {
                keys.push((c2, m2));
                keys.len()
            });
            match row.iter_mut().find(|e| e.1 == t) {
                Some(e) => e.0 += p,
                None => row.push((p, t)),
            }
        }
        rows.push(row);
        if keys.len() > crate::dfa::STATE_CAP {
            return Err(Error::ResourceLimit("closed-loop chain too large".into()));
        }
        x += 1;
    }
    let mut accepting = vec![false];
    accepting.extend(keys.iter().map(|&(_, m)| prop.is_accepting(m)));
    Dtmc::new(0, rows, accepting)
}

/// Strongly connected components in reverse topological order (sinks first).
fn tarjan(m: &Dtmc, live: &[bool]) -> Vec<Vec<usize>> {
    let n = m.states();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in (0..n).filter(|&s| live[s]) {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut e)) = call.last_mut() {
            if let Some(&(_, w)) = m.rows[v].get(*e) {
                *e += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("scc stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

fn reachable(m: &Dtmc) -> Vec<bool> {
    let mut seen = vec![false; m.states()];
    let mut stack = vec![m.initial];
    seen[m.initial] = true;
    while let Some(s) = stack.pop() {
        for &(_, t) in &m.rows[s] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Solves `a x = b`, checking the residual.
fn dense_solve(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    let x = a.clone().lu().solve(&b).ok_or(Error::Numerical(f64::INFINITY))?;
    let r = (&a * &x - &b).amax();
    if r.is_nan() || r > RESIDUAL_TOLERANCE {
        return Err(Error::Numerical(r));
    }
    Ok(x)
}

/// Stationary distribution of the irreducible block `comp`.
fn stationary(m: &Dtmc, comp: &[usize], exec: Exec) -> Result<Vec<f64>> {
    let n = comp.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let pos: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    if n <= DENSE_LIMIT {
        // rows of (P^T - I), the last replaced by the normalization
        let mut a = DMatrix::<f64>::zeros(n, n);
        for (i, &s) in comp.iter().enumerate() {
            a[(i, i)] -= 1.0;
            for &(p, t) in &m.rows[s] {
                a[(pos[&t], i)] += p;
            }
        }
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = DVector::<f64>::zeros(n);
        b[n - 1] = 1.0;
        return Ok(dense_solve(a, b)?.iter().copied().collect());
    }
    // lazy power iteration: (I + P) / 2 has the same fixpoint and is aperiodic
    let incoming: Vec<Vec<(f64, usize)>> = {
        let mut inc = vec![Vec::new(); n];
        for (i, &s) in comp.iter().enumerate() {
            for &(p, t) in &m.rows[s] {
                inc[pos[&t]].push((p, i));
            }
        }
        inc
    };
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..ITERATION_LIMIT {
        let next = exec.map_range(n, |j| 0.5 * pi[j] + 0.5 * incoming[j].iter().map(|&(p, i)| p * pi[i]).sum::<f64>());
        let diff = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if diff < 1e-14 {
            break;
        }
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    let residual = (0..n)
        .map(|j| (incoming[j].iter().map(|&(p, i)| p * pi[i]).sum::<f64>() - pi[j]).abs())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::Numerical(residual));
    }
    Ok(pi)
}

/// Long-run average fraction of time spent in accepting states, starting
/// from the initial state.
pub fn long_run_value(m: &Dtmc) -> Result<f64> {
    long_run_value_with(m, Exec::default())
}

pub fn long_run_value_with(m: &Dtmc, exec: Exec) -> Result<f64> {
    let n = m.states();
    let live = reachable(m);
    let comps = tarjan(m, &live);
    let mut comp_of = vec![usize::MAX; n];
    for (c, comp) in comps.iter().enumerate() {
        for &s in comp {
            comp_of[s] = c;
        }
    }
    // value of every state: BSCC averages, then transient states
    let mut value = vec![f64::NAN; n];
    let bottom: Vec<bool> = comps
        .iter()
        .enumerate()
        .map(|(c, comp)| comp.iter().all(|&s| m.rows[s].iter().all(|&(_, t)| comp_of[t] == c)))
        .collect();
    let bsccs: Vec<&Vec<usize>> = comps.iter().zip(&bottom).filter(|p| *p.1).map(|p| p.0).collect();
    let averages: Vec<Result<f64>> = exec.map(&bsccs, |comp| {
        let pi = stationary(m, comp, Exec::Sequential)?;
        Ok(comp.iter().zip(&pi).filter(|p| m.accepting[*p.0]).map(|p| *p.1).sum())
    });
    for (comp, avg) in bsccs.iter().zip(averages) {
        let avg = avg?.clamp(0.0, 1.0);
        for &s in comp.iter() {
            value[s] = avg;
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&s| live[s] && value[s].is_nan()).collect();
    if !transient.is_empty() {
        let tpos: HashMap<usize, usize> = transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let t = transient.len();
        let rhs = |s: usize| -> f64 {
            m.rows[s]
                .iter()
                .filter(|e| !tpos.contains_key(&e.1))
                .map(|&(p, u)| p * value[u])
                .sum()
        };
        let solved: Vec<f64> = if t <= DENSE_LIMIT {
            let mut a = DMatrix::<f64>::identity(t, t);
            let mut b = DVector::<f64>::zeros(t);
            for (i, &s) in transient.iter().enumerate() {
                b[i] = rhs(s);
                for &(p, u) in &m.rows[s] {
                    if let Some(&j) = tpos.get(&u) {
                        a[(i, j)] -= p;
                    }
                }
            }
            dense_solve(a, b)?.iter().copied().collect()
        } else {
            // components are already in reverse topological order, so one
            // Gauss-Seidel sweep per component in that order converges
            let b: Vec<f64> = transient.iter().map(|&s| rhs(s)).collect();
            let mut x = vec![0.0; t];
            for comp in comps.iter().zip(&bottom).filter(|p| !*p.1).map(|p| p.0) {
                for _ in 0..ITERATION_LIMIT {
                    let mut diff: f64 = 0.0;
                    for &s in comp {
                        let i = tpos[&s];
                        let v = b[i] + m.rows[s].iter().filter_map(|&(p, u)| tpos.get(&u).map(|&j| p * x[j])).sum::<f64>();
                        diff = diff.max((v - x[i]).abs());
                        x[i] = v;
                    }
                    if diff < 1e-15 {
                        break;
                    }
                }
            }
            x
        };
        for (i, &s) in transient.iter().enumerate() {
            value[s] = solved[i].clamp(0.0, 1.0);
        }
    }
    Ok(value[m.initial] + 0.0)
}

/// Expected long-run satisfaction of `prop` by `cnt` under uniform inputs.
pub fn expected_value(cnt: &Controller, prop: &Dfa) -> Result<f64> {
    long_run_value(&build_dtmc(cnt, prop)?)
}

/// Monte-Carlo estimate of the long-run value: `runs` independent walks of
/// `steps` steps each, one ChaCha stream per walk.
pub fn monte_carlo(m: &Dtmc, runs: usize, steps: usize, seed: u64, exec: Exec) -> f64 {
    let cumulative: Vec<Vec<(f64, usize)>> = m
        .rows
        .iter()
        .map(|row| {
            let mut acc = 0.0;
            row.iter()
                .map(|&(p, t)| {
                    acc += p;
                    (acc, t)
                })
                .collect()
        })
        .collect();
    let hits = exec.map_range(runs, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut s = m.initial;
        let mut count = 0usize;
        for _ in 0..steps {
            let u: f64 = rng.gen();
            let row = &cumulative[s];
            s = row.iter().find(|e| u < e.0).unwrap_or(row.last().expect("nonempty row")).1;
            count += m.accepting[s] as usize;
        }
        count
    });
    hits.iter().sum::<usize>() as f64 / (runs * steps).max(1) as f64
}

/// A table of boolean columns, one row per time step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<bool>>,
}

impl Trace {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<bool>>) -> Result<Trace> {
        if rows.iter().any(|r| r.len() != columns.len()) {
            return Err(Error::Format("trace row width differs from the header".into()));
        }
        Ok(Trace { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<bool>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Reads CSV with a header row of names and rows of `0`/`1`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Trace> {
        let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let columns: Vec<String> = rd
            .headers()
            .map_err(|e| Error::Format(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            let row = rec
                .iter()
                .map(|v| match v {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(Error::Format(format!("trace value `{other}` is not 0 or 1"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            rows.push(row);
        }
        Trace::new(columns, rows)
    }

    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(writer);
        let io_err = |e: csv::Error| Error::Invalid(e.to_string());
        wr.write_record(&self.columns).map_err(io_err)?;
        for r in &self.rows {
            wr.write_record(r.iter().map(|&b| if b { "1" } else { "0" })).map_err(io_err)?;
        }
        wr.flush().map_err(|e| Error::Invalid(e.to_string()))
    }
}

/// Runs `cnt` on the input columns of `inputs`. The result has the inputs,
/// the outputs and one verdict column per property; a verdict at step `t`
/// is whether the property holds at `t` on the joint prefix.
pub fn simulate(cnt: &Controller, inputs: &Trace, props: &[(String, Dfa)]) -> Result<Trace> {
    let sup = cnt.supervisor();
    let io = sup.io();
    let mut sorted_cols = inputs.columns.clone();
    sorted_cols.sort();
    let mut sorted_io = io.inputs().to_vec();
    sorted_io.sort();
    if sorted_cols != sorted_io {
        return Err(Error::InterfaceMismatch(format!(
            "trace columns {:?} differ from controller inputs {:?}",
            inputs.columns,
            io.inputs()
        )));
    }
    let pick: Vec<usize> = io
        .inputs()
        .iter()
        .map(|v| inputs.columns.iter().position(|c| c == v).expect("checked"))
        .collect();
    let monitors: Vec<Dfa> = props.iter().map(|(_, d)| io.adapt(d)).collect::<Result<_>>()?;
    let mut columns: Vec<String> = io.inputs().iter().chain(io.outputs()).cloned().collect();
    columns.extend(props.iter().map(|(n, _)| n.clone()));
    let mut s = sup.initial();
    let mut ms: Vec<State> = monitors.iter().map(Dfa::initial).collect();
    let mut rows = Vec::with_capacity(inputs.rows.len());
    for row in &inputs.rows {
        let i = pick.iter().enumerate().fold(0u32, |acc, (b, &j)| acc | (row[j] as u32) << b);
        let (o, next) = cnt
            .react(s, i)
            .ok_or_else(|| Error::Invalid(format!("controller blocks in state {s}")))?;
        s = next;
        let l = io.letter(i, o);
        let mut out: Vec<bool> = (0..io.inputs().len()).map(|b| i >> b & 1 == 1).collect();
        out.extend((0..io.outputs().len()).map(|b| o >> b & 1 == 1));
        for (m, d) in ms.iter_mut().zip(&monitors) {
            *m = d.step(*m, l);
            out.push(d.is_accepting(*m));
        }
        rows.push(out);
    }
    Trace::new(columns, rows)
}
