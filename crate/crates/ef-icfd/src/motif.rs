//! Maximum-weight connected colorful subgraph.
//!
//! Given a vertex-weighted graph and a partition of its vertices into k
//! classes, find a connected subgraph picking exactly one vertex per
//! class and maximizing total weight. Solved by a subset dynamic program
//! over (vertex, class subset) states; the table is filled in increasing
//! order of subset size and the chosen splits are recorded for solution
//! recovery.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A graph with arbitrary-precision nonnegative vertex weights and
/// pairwise-disjoint vertex classes. Classes may be empty; vertices in no
/// class are never selected (but may not serve as connectors either —
/// the solution uses exactly one vertex per class and nothing else).
#[derive(Debug, Clone)]
pub struct ColoredWeightedGraph {
    pub vertex_count: usize,
    /// Unordered simple edges as index pairs.
    pub edges: Vec<(usize, usize)>,
    pub weights: Vec<BigUint>,
    pub classes: Vec<Vec<usize>>,
}

impl ColoredWeightedGraph {
    fn check(&self) -> Result<Vec<Vec<usize>>> {
        if self.weights.len() != self.vertex_count {
            return Err(Error::BadPartition(format!(
                "{} weights for {} vertices",
                self.weights.len(),
                self.vertex_count
            )));
        }
        let mut class_of = vec![usize::MAX; self.vertex_count];
        for (i, class) in self.classes.iter().enumerate() {
            for &v in class {
                if v >= self.vertex_count {
                    return Err(Error::BadPartition(format!("vertex {} out of range", v)));
                }
                if class_of[v] != usize::MAX {
                    return Err(Error::BadPartition(format!(
                        "vertex {} appears in classes {} and {}",
                        v, class_of[v], i
                    )));
                }
                class_of[v] = i;
            }
        }
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(x, y) in &self.edges {
            if x >= self.vertex_count || y >= self.vertex_count || x == y {
                return Err(Error::BadPartition(format!("bad edge ({}, {})", x, y)));
            }
            adj[x].push(y);
            adj[y].push(x);
        }
        Ok(adj)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifSolution {
    /// Sorted vertex indices, one per class.
    pub vertices: Vec<usize>,
    pub weight: BigUint,
}

/// Operation counters for the bound checks: number of table entries
/// filled and number of (split, neighbor) combinations examined.
#[derive(Debug, Clone, Copy, Default)]
pub struct MotifStats {
    pub table_entries: u64,
    pub split_steps: u64,
}

const MAX_CLASSES: usize = 24;

#[derive(Clone, Copy)]
enum Choice {
    Leaf,
    Split { sub: u32, via: u32 },
}

/// Dynamic program for the maximum-weight connected colorful subgraph,
/// with solution recovery. Returns `None` when no colorful connected
/// subgraph exists (in particular whenever some class is empty); `k = 0`
/// yields the empty subgraph of weight zero.
pub fn max_colorful_connected(
    g: &ColoredWeightedGraph,
) -> Result<(Option<MotifSolution>, MotifStats)> {
    let adj = g.check()?;
    let k = g.classes.len();
    let mut stats = MotifStats::default();
    if k == 0 {
        return Ok((
            Some(MotifSolution {
                vertices: vec![],
                weight: BigUint::zero(),
            }),
            stats,
        ));
    }
    if k > MAX_CLASSES {
        return Err(Error::GuardExceeded {
            task: "motif table".into(),
            needed: format!("2^{}", k),
            limit: 1 << MAX_CLASSES,
        });
    }
    if g.classes.iter().any(|c| c.is_empty()) {
        return Ok((None, stats));
    }
    let n = g.vertex_count;
    let full: u32 = (1u32 << k) - 1;
    // Vertices outside every class keep usize::MAX and are skipped.
    let mut class_of = vec![usize::MAX; n];
    for (i, class) in g.classes.iter().enumerate() {
        for &v in class {
            class_of[v] = i;
        }
    }

    let idx = |v: usize, s: u32| v * (full as usize + 1) + s as usize;
    let mut table: Vec<Option<BigUint>> = vec![None; n * (full as usize + 1)];
    let mut back: Vec<Choice> = vec![Choice::Leaf; n * (full as usize + 1)];

    // Masks in increasing order of popcount; singletons first.
    let mut masks: Vec<u32> = (1..=full).collect();
    masks.sort_by_key(|m| m.count_ones());

    for &s in &masks {
        for v in 0..n {
            stats.table_entries += 1;
            if class_of[v] == usize::MAX || s & (1 << class_of[v]) == 0 {
                continue; // v outside the classes of S: -infinity
            }
            if s.count_ones() == 1 {
                table[idx(v, s)] = Some(g.weights[v].clone());
                back[idx(v, s)] = Choice::Leaf;
                continue;
            }
            let mut best: Option<BigUint> = None;
            let mut best_choice = Choice::Leaf;
            // Proper nonempty subsets of s.
            let mut s1 = (s - 1) & s;
            while s1 != 0 {
                let s2 = s ^ s1;
                if let Some(own) = table[idx(v, s2)].clone() {
                    for &u in adj[v].iter().chain(std::iter::once(&v)) {
                        stats.split_steps += 1;
                        if let Some(other) = &table[idx(u, s1)] {
                            let cand = own.clone() + other;
                            if best.as_ref().map_or(true, |b| cand > *b) {
                                best = Some(cand);
                                best_choice = Choice::Split {
                                    sub: s1,
                                    via: u as u32,
                                };
                            }
                        }
                    }
                } else {
                    stats.split_steps += adj[v].len() as u64 + 1;
                }
                s1 = (s1 - 1) & s;
            }
            table[idx(v, s)] = best;
            back[idx(v, s)] = best_choice;
        }
    }

    let mut best_root: Option<usize> = None;
    for v in 0..n {
        if let Some(w) = &table[idx(v, full)] {
            let better = match best_root {
                None => true,
                Some(r) => *w > *table[idx(r, full)].as_ref().unwrap(),
            };
            if better {
                best_root = Some(v);
            }
        }
    }
    let Some(root) = best_root else {
        return Ok((None, stats));
    };
    let weight = table[idx(root, full)].clone().unwrap();

    // Recover the vertex set from the recorded split choices.
    let mut vertices = Vec::with_capacity(k);
    let mut stack = vec![(root, full)];
    while let Some((v, s)) = stack.pop() {
        match back[idx(v, s)] {
            Choice::Leaf => vertices.push(v),
            Choice::Split { sub, via } => {
                stack.push((via as usize, sub));
                stack.push((v, s ^ sub));
            }
        }
    }
    vertices.sort_unstable();
    debug_assert_eq!(vertices.len(), k);
    debug_assert_eq!(
        vertices.iter().map(|&v| g.weights[v].clone()).sum::<BigUint>(),
        weight
    );
    Ok((Some(MotifSolution { vertices, weight }), stats))
}

/// Exhaustive oracle with the same contract: enumerates every
/// one-vertex-per-class selection and keeps the connected maximum.
pub fn brute_force_motif(g: &ColoredWeightedGraph, guard: u64) -> Result<Option<MotifSolution>> {
    let adj = g.check()?;
    let k = g.classes.len();
    if k == 0 {
        return Ok(Some(MotifSolution {
            vertices: vec![],
            weight: BigUint::zero(),
        }));
    }
    if g.classes.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let combos: u64 = g
        .classes
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .unwrap_or(u64::MAX);
    if combos > guard {
        return Err(Error::GuardExceeded {
            task: "motif brute force".into(),
            needed: combos.to_string(),
            limit: guard,
        });
    }
    let mut best: Option<MotifSolution> = None;
    let mut pick = vec![0usize; k];
    loop {
        let selection: Vec<usize> = (0..k).map(|i| g.classes[i][pick[i]]).collect();
        if connected(&selection, &adj) {
            let weight: BigUint = selection.iter().map(|&v| g.weights[v].clone()).sum();
            if best.as_ref().map_or(true, |b| weight > b.weight) {
                let mut vertices = selection.clone();
                vertices.sort_unstable();
                best = Some(MotifSolution { vertices, weight });
            }
        }
        // Odometer over class choices.
        let mut i = 0;
        loop {
            if i == k {
                return Ok(best);
            }
            pick[i] += 1;
            if pick[i] < g.classes[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

fn connected(selection: &[usize], adj: &[Vec<usize>]) -> bool {
    if selection.len() <= 1 {
        return true;
    }
    let members: std::collections::BTreeSet<usize> = selection.iter().copied().collect();
    if members.len() != selection.len() {
        // Classes are disjoint so this cannot happen, but stay safe.
        return false;
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![selection[0]];
    seen.insert(selection[0]);
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if members.contains(&u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen.len() == members.len()
}
