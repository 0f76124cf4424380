use std::collections::{HashMap, VecDeque};

use super::{Dfa, State};

impl Dfa {
    /// Canonical minimal automaton of the (nonempty-word) language: the
    /// initial state is never accepting, and states are numbered in
    /// breadth-first order from the initial state, letters in increasing
    /// order. Equal languages give structurally equal results.
    pub fn minimize(&self) -> Dfa {
        let n = self.state_count();
        let k = self.letter_count();
        let mut next = Vec::with_capacity((n + 1) * k);
        next.extend_from_slice(self.table());
        next.extend_from_slice(self.row(self.initial()));
        let mut accepting = self.accepting().to_vec();
        accepting.push(false);
        let fresh = Dfa {
            alphabet: self.alphabet().clone(),
            initial: n as State,
            accepting,
            next,
        };
        fresh.minimize_exact()
    }

    /// Minimal automaton that also preserves the acceptance flag of the
    /// initial state (used for prefix-closed machines whose initial state
    /// counts as accepting).
    pub fn minimize_exact(&self) -> Dfa {
        let t = self.trim();
        let (blk, count) = refine(&t);
        quotient(&t, &blk, count)
    }
}

/// Letters whose columns coincide in every state behave identically for
/// refinement; returns one representative per class.
fn letter_classes(d: &Dfa) -> Vec<u32> {
    let n = d.state_count();
    let k = d.letter_count();
    let mut seen: HashMap<Vec<State>, u32> = HashMap::new();
    let mut reps = Vec::new();
    for l in 0..k {
        let col: Vec<State> = (0..n).map(|s| d.table()[s * k + l]).collect();
        seen.entry(col).or_insert_with(|| {
            reps.push(l as u32);
            l as u32
        });
    }
    reps
}

/// Hopcroft partition refinement over a trimmed automaton. Returns the
/// block of every state and the number of blocks.
fn refine(d: &Dfa) -> (Vec<u32>, usize) {
    let n = d.state_count();
    let k = d.letter_count();
    let classes = letter_classes(d);
    let c = classes.len();

    // inverse transitions per letter class, CSR layout
    let mut off = vec![0u32; c * n + 1];
    for (ci, &l) in classes.iter().enumerate() {
        for s in 0..n {
            let t = d.table()[s * k + l as usize] as usize;
            off[ci * n + t + 1] += 1;
        }
    }
    for i in 1..off.len() {
        off[i] += off[i - 1];
    }
    let mut fill = off.clone();
    let mut src = vec![0u32; c * n];
    for (ci, &l) in classes.iter().enumerate() {
        for s in 0..n {
            let t = d.table()[s * k + l as usize] as usize;
            let slot = &mut fill[ci * n + t];
            src[*slot as usize] = s as u32;
            *slot += 1;
        }
    }

    let mut elems: Vec<u32> = (0..n as u32).filter(|&s| d.is_accepting(s)).collect();
    let n_acc = elems.len();
    elems.extend((0..n as u32).filter(|&s| !d.is_accepting(s)));
    let mut loc = vec![0u32; n];
    for (i, &s) in elems.iter().enumerate() {
        loc[s as usize] = i as u32;
    }
    let mut blk = vec![0u32; n];
    let mut start = vec![0u32];
    let mut end = vec![n as u32];
    let mut marked = vec![0u32];
    let mut in_w = vec![false; c];
    let mut work: Vec<(u32, u32)> = Vec::new();
    if n_acc > 0 && n_acc < n {
        end[0] = n_acc as u32;
        start.push(n_acc as u32);
        end.push(n as u32);
        marked.push(0);
        in_w.extend(std::iter::repeat_n(false, c));
        for &s in &elems[n_acc..] {
            blk[s as usize] = 1;
        }
        let smaller = if n_acc <= n - n_acc { 0 } else { 1 };
        for ci in 0..c {
            in_w[smaller * c + ci] = true;
            work.push((smaller as u32, ci as u32));
        }
    }

    let mut splitter = Vec::new();
    let mut touched = Vec::new();
    while let Some((b, ci)) = work.pop() {
        let (b, ci) = (b as usize, ci as usize);
        in_w[b * c + ci] = false;
        splitter.clear();
        splitter.extend_from_slice(&elems[start[b] as usize..end[b] as usize]);
        touched.clear();
        for &t in &splitter {
            let base = ci * n + t as usize;
            for &s in &src[off[base] as usize..off[base + 1] as usize] {
                let bs = blk[s as usize] as usize;
                let pos = loc[s as usize];
                let mend = start[bs] + marked[bs];
                if pos < mend {
                    continue;
                }
                if marked[bs] == 0 {
                    touched.push(bs);
                }
                let other = elems[mend as usize];
                elems[mend as usize] = s;
                elems[pos as usize] = other;
                loc[s as usize] = mend;
                loc[other as usize] = pos;
                marked[bs] += 1;
            }
        }
        for &bs in &touched {
            let m = marked[bs];
            marked[bs] = 0;
            let size = end[bs] - start[bs];
            if m == size {
                continue;
            }
            let nb = start.len();
            start.push(start[bs]);
            end.push(start[bs] + m);
            marked.push(0);
            start[bs] += m;
            for i in start[nb]..end[nb] {
                blk[elems[i as usize] as usize] = nb as u32;
            }
            in_w.extend(std::iter::repeat_n(false, c));
            let smaller = if m <= size - m { nb } else { bs };
            for cj in 0..c {
                if in_w[bs * c + cj] {
                    in_w[nb * c + cj] = true;
                    work.push((nb as u32, cj as u32));
                } else {
                    in_w[smaller * c + cj] = true;
                    work.push((smaller as u32, cj as u32));
                }
            }
        }
    }
    (blk, start.len())
}

/// Quotient automaton, renumbered breadth-first from the initial block.
fn quotient(d: &Dfa, blk: &[u32], count: usize) -> Dfa {
    let k = d.letter_count();
    let mut rep = vec![u32::MAX; count];
    for (s, &b) in blk.iter().enumerate() {
        if rep[b as usize] == u32::MAX {
            rep[b as usize] = s as u32;
        }
    }
    let mut order = vec![u32::MAX; count];
    let mut seq = Vec::with_capacity(count);
    let init = blk[d.initial() as usize];
    order[init as usize] = 0;
    seq.push(init);
    let mut queue = VecDeque::from([init]);
    while let Some(b) = queue.pop_front() {
        for &t in d.row(rep[b as usize]) {
            let tb = blk[t as usize];
            if order[tb as usize] == u32::MAX {
                order[tb as usize] = seq.len() as u32;
                seq.push(tb);
                queue.push_back(tb);
            }
        }
    }
    let mut next = Vec::with_capacity(seq.len() * k);
    let mut accepting = Vec::with_capacity(seq.len());
    for &b in &seq {
        let r = rep[b as usize];
        accepting.push(d.is_accepting(r));
        next.extend(d.row(r).iter().map(|&t| order[blk[t as usize] as usize]));
    }
    Dfa {
        alphabet: d.alphabet().clone(),
        initial: 0,
        accepting,
        next,
    }
}
