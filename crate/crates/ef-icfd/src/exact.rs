//! Ground-truth brute-force solvers.
//!
//! These exist to be obviously correct: the exact fair-division solver
//! enumerates every p-subset of vertices and every assignment of the
//! chosen vertices to agents, and the vector-sum solver enumerates every
//! k-subset of vectors.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Setting};

pub const DEFAULT_EXACT_GUARD: u64 = 100_000_000;
pub const DEFAULT_VECTOR_SUM_GUARD: u64 = 10_000_000;

/// Inputs of the (k, M)-Vector-Sum problem: choose k of the vectors so
/// that they sum exactly to the target.
#[derive(Debug, Clone)]
pub struct VectorSumInstance {
    pub vectors: Vec<Vec<BigUint>>,
    pub target: Vec<BigUint>,
    pub k: usize,
}

impl VectorSumInstance {
    pub fn check(&self) -> Result<()> {
        let d = self.target.len();
        if d == 0 {
            return Err(Error::BadVectorSum("dimension must be positive".into()));
        }
        if self.k == 0 || self.k > self.vectors.len() {
            return Err(Error::BadVectorSum(format!(
                "k = {} out of range for {} vectors",
                self.k,
                self.vectors.len()
            )));
        }
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != d {
                return Err(Error::BadVectorSum(format!(
                    "vector {} has dimension {}, expected {}",
                    i,
                    v.len(),
                    d
                )));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.target.len()
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Exhaustive search for a valid, exactly envy-free allocation.
///
/// Enumerates p-subsets of vertices in lexicographic order, then every
/// function from the subset to the agents, pruning on connectivity
/// before the envy check. Returns the lexicographically first hit.
pub fn solve_exact(inst: &Instance, guard: u64) -> Result<Option<Allocation>> {
    let mut found = None;
    search_exact(inst, guard, &mut |alloc| {
        found = Some(alloc.clone());
        false // stop at the first allocation
    })?;
    Ok(found)
}

/// All valid and envy-free allocations, in enumeration order.
pub fn enumerate_ef(inst: &Instance, guard: u64) -> Result<Vec<Allocation>> {
    let mut all = Vec::new();
    search_exact(inst, guard, &mut |alloc| {
        all.push(alloc.clone());
        true
    })?;
    Ok(all)
}

fn search_exact(
    inst: &Instance,
    guard: u64,
    on_found: &mut dyn FnMut(&Allocation) -> bool,
) -> Result<()> {
    let m = inst.vertex_count();
    let n = inst.agent_count();
    let p = inst.p();

    if p == 0 {
        let empty = Allocation::empty();
        let ok = match inst.setting() {
            Setting::Optional => true,
            Setting::Mandatory => n == 0,
        };
        if ok {
            on_found(&empty);
        }
        return Ok(());
    }
    if n == 0 {
        return Ok(()); // p > 0 vertices cannot be allocated to nobody
    }
    if inst.setting() == Setting::Mandatory && n > p {
        return Ok(()); // pigeonhole
    }

    let assignments = (n as u64).checked_pow(p as u32).unwrap_or(u64::MAX);
    let work = binomial(m as u64, p as u64).saturating_mul(assignments);
    if work > guard {
        return Err(Error::GuardExceeded {
            task: "exact search".into(),
            needed: work.to_string(),
            limit: guard,
        });
    }

    let mut subset: Vec<usize> = (0..p).collect();
    loop {
        if !scan_assignments(inst, &subset, on_found) {
            return Ok(());
        }
        // Next lexicographic p-combination of [0, m).
        let mut i = p;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if subset[i] + 1 <= m - (p - i) {
                subset[i] += 1;
                for j in i + 1..p {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Tries every assignment of `subset` to agents; returns false if the
/// caller asked to stop.
fn scan_assignments(
    inst: &Instance,
    subset: &[usize],
    on_found: &mut dyn FnMut(&Allocation) -> bool,
) -> bool {
    let n = inst.agent_count();
    let p = subset.len();
    let mut assign = vec![0usize; p];
    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); n];
    loop {
        for b in &mut bundles {
            b.clear();
        }
        for (pos, &a) in assign.iter().enumerate() {
            bundles[a].push(subset[pos]);
        }
        if check_candidate(inst, &bundles) {
            let alloc = Allocation::from_indices(inst, &bundles);
            if !on_found(&alloc) {
                return false;
            }
        }
        // Odometer over agent assignments.
        let mut i = 0;
        loop {
            if i == p {
                return true;
            }
            assign[i] += 1;
            if assign[i] < n {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

fn check_candidate(inst: &Instance, bundles: &[Vec<usize>]) -> bool {
    if inst.setting() == Setting::Mandatory && bundles.iter().any(|b| b.is_empty()) {
        return false;
    }
    for b in bundles {
        if !inst.is_connected_subset(b) {
            return false;
        }
    }
    // Envy check last: connectivity rejects most candidates cheaply.
    let n = inst.agent_count();
    for i in 0..n {
        let own = inst.bundle_value_indices(i, &bundles[i]);
        for (j, other) in bundles.iter().enumerate() {
            if i != j && inst.bundle_value_indices(i, other) > own {
                return false;
            }
        }
    }
    true
}

/// Enumerates k-subsets of the vectors; returns the first index set
/// (1-based order of enumeration is lexicographic on indices) whose sum
/// equals the target.
pub fn solve_vector_sum(vs: &VectorSumInstance, guard: u64) -> Result<Option<Vec<usize>>> {
    vs.check()?;
    let n = vs.vectors.len();
    let k = vs.k;
    let work = binomial(n as u64, k as u64);
    if work > guard {
        return Err(Error::GuardExceeded {
            task: "vector-sum search".into(),
            needed: work.to_string(),
            limit: guard,
        });
    }
    let d = vs.dimension();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let mut sum = vec![BigUint::zero(); d];
        for &i in &subset {
            for (acc, x) in sum.iter_mut().zip(&vs.vectors[i]) {
                *acc += x;
            }
        }
        if sum == vs.target {
            return Ok(Some(subset));
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if subset[i] + 1 <= n - (k - i) {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}
