//! The parameterized approximation scheme.
//!
//! The solver guesses a bucket profile — a vertex coloring with `p`
//! colors, an assignment of colors to agents, and per-(agent, color)
//! level guesses — and runs a target-descent loop around a subroutine
//! that searches each agent's eligible vertices for a maximum-weight
//! connected colorful bundle. Any allocation it returns is valid and
//! eps-envy-free; with exhaustive colorings, a "no" answer certifies
//! that no valid and exactly envy-free allocation exists.

mod solve;

pub use solve::{solve_epas, SolveOptions, SolveOutcome, SolveStats};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{agent_types, Allocation, Instance};
use crate::motif::{max_colorful_connected, ColoredWeightedGraph};
use crate::numerics::{ApproxParams, Rational, LOG_OF_ZERO};

pub const DEFAULT_COLORING_GUARD: u64 = 10_000_000;
pub const DEFAULT_PROFILE_GUARD: u64 = 10_000_000;

/// Injective back-map from reduced-instance agents to original agents.
/// Agent ids are preserved by the reduction, so the map is the identity
/// on `kept`; `dropped` lists the discarded originals.
#[derive(Debug, Clone)]
pub struct ReductionBackMap {
    pub kept: Vec<String>,
    pub dropped: Vec<String>,
}

/// Caps the number of agents per type at `p + 1`, keeping the earliest
/// agents of each type in instance order. Graph, budget and valuations
/// are unchanged.
pub fn reduce_agents(inst: &Instance) -> (Instance, ReductionBackMap) {
    let types = agent_types(inst);
    let cap = inst.p() + 1;
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for class in &types.classes {
        for (rank, &a) in class.iter().enumerate() {
            if rank < cap {
                keep.push(a);
            } else {
                dropped.push(inst.agent_id(a).to_string());
            }
        }
    }
    keep.sort_unstable();
    let kept = keep.iter().map(|&a| inst.agent_id(a).to_string()).collect();
    (inst.with_agents(&keep), ReductionBackMap { kept, dropped })
}

/// Lifts a reduced-instance allocation back to the original agent set:
/// kept agents keep their bundles, dropped agents receive the empty
/// bundle.
pub fn lift_allocation(back: &ReductionBackMap, alloc: &Allocation) -> Result<Allocation> {
    for agent in alloc.bundles.keys() {
        if !back.kept.iter().any(|k| k == agent) {
            return Err(Error::UnknownAgent(agent.clone()));
        }
    }
    Ok(alloc.clone())
}

/// How colorings are produced: every function from vertices to `[p]`, or
/// seeded uniform draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColoringProvider {
    Exhaustive,
    Randomized { trials: u64, seed: u64 },
}

/// All `p^m` colorings (exhaustive; a superset of any perfect hash
/// family, so injectivity on every p-subset is guaranteed), or `trials`
/// reproducible uniform colorings.
pub fn colorings(m: usize, p: usize, provider: ColoringProvider, guard: u64) -> Result<Vec<Vec<u8>>> {
    match provider {
        ColoringProvider::Exhaustive => {
            let total = (p as u64)
                .checked_pow(m as u32)
                .filter(|&x| x <= guard)
                .ok_or_else(|| Error::GuardExceeded {
                    task: "exhaustive colorings".into(),
                    needed: format!("{}^{}", p, m),
                    limit: guard,
                })?;
            let mut out = Vec::with_capacity(total as usize);
            let mut cur = vec![0u8; m];
            if p == 0 {
                return Ok(if m == 0 { vec![vec![]] } else { vec![] });
            }
            loop {
                out.push(cur.clone());
                let mut i = m;
                loop {
                    if i == 0 {
                        return Ok(out);
                    }
                    i -= 1;
                    cur[i] += 1;
                    if (cur[i] as usize) < p {
                        break;
                    }
                    cur[i] = 0;
                }
            }
        }
        ColoringProvider::Randomized { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..trials)
                .map(|_| (0..m).map(|_| rng.gen_range(0..p) as u8).collect())
                .collect())
        }
    }
}

/// Failure probability bound of randomized color coding: each p-subset
/// is missed by all trials with probability at most
/// `(1 - p!/p^p)^trials`.
pub fn randomized_miss_bound(p: usize, trials: u64) -> Rational {
    let mut fact = BigUint::one();
    for i in 1..=p {
        fact *= BigUint::from(i);
    }
    let pow = BigUint::from(p).pow(p as u32);
    let hit = Rational::new(fact.into(), pow.into());
    let miss = Rational::one() - hit;
    let mut acc = Rational::one();
    for _ in 0..trials {
        acc *= &miss;
    }
    acc
}

/// The algorithm's guess structure: a coloring of the vertices with `p`
/// colors, an owner agent per color, and level guesses per
/// (agent, color) pair canonicalized so `levels[i][c] = t` whenever
/// agent `i` owns color `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketProfile {
    /// Color in `[0, p)` per vertex index.
    pub coloring: Vec<u8>,
    /// Owning agent index per color.
    pub assignment: Vec<usize>,
    /// `levels[agent][color]` in `[0, t]`.
    pub levels: Vec<Vec<i64>>,
}

impl BucketProfile {
    pub fn owned_colors(&self, agent: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &o)| o == agent)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn color_classes(&self, m: usize) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.assignment.len()];
        for v in 0..m {
            classes[self.coloring[v] as usize].push(v);
        }
        classes
    }
}

/// Profile validity: for every ordered pair of distinct agents `i != j`,
/// `sum over c in S_j with levels(i,c) != t of q^(-levels(i,c)) <= q`,
/// checked in exact rationals.
pub fn profile_is_valid(profile: &BucketProfile, params: &ApproxParams, n: usize) -> bool {
    let q_inv = params.q.recip();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut sum = Rational::zero();
            for (c, &owner) in profile.assignment.iter().enumerate() {
                if owner == j && profile.levels[i][c] != params.t {
                    sum += crate::numerics::pow_rational(&q_inv, profile.levels[i][c]);
                }
            }
            if sum > params.q {
                return false;
            }
        }
    }
    true
}

/// Integer weights for the profile-validity constraint with cleared
/// denominators: with `q = a/b` reduced, the constraint
/// `sum q^(-L) <= q` becomes `sum b^(L+1) a^(t-1-L) <= a^t`.
pub(crate) struct ValidityWeights {
    pub weights: Vec<BigUint>,
    pub bound: BigUint,
}

impl ValidityWeights {
    pub fn new(params: &ApproxParams) -> Self {
        let a = params.q.numer().to_biguint().expect("q > 1");
        let b = params.q.denom().to_biguint().expect("positive denominator");
        let t = params.t as u32;
        let weights = (0..params.t)
            .map(|lam| b.pow(lam as u32 + 1) * a.pow(t - 1 - lam as u32))
            .collect();
        ValidityWeights {
            weights,
            bound: a.pow(t),
        }
    }

    /// The pair constraint on one tuple of levels (entries equal to `t`
    /// contribute nothing).
    pub fn tuple_is_valid(&self, tuple: &[i64], t: i64) -> bool {
        let sum: BigUint = tuple
            .iter()
            .filter(|&&l| l != t)
            .map(|&l| self.weights[l as usize].clone())
            .sum();
        sum <= self.bound
    }

    /// Valid level tuples of the given length, lexicographic order.
    pub fn valid_tuples(&self, len: usize, t: i64, guard: u64) -> Result<Vec<Vec<i64>>> {
        (t as u64 + 1)
            .checked_pow(len as u32)
            .filter(|&x| x <= guard)
            .ok_or_else(|| Error::GuardExceeded {
                task: "level-tuple enumeration".into(),
                needed: format!("{}^{}", t + 1, len),
                limit: guard,
            })?;
        let mut out = Vec::new();
        let mut cur = vec![0i64; len];
        loop {
            if self.tuple_is_valid(&cur, t) {
                out.push(cur.clone());
            }
            let mut i = len;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] <= t {
                    break;
                }
                cur[i] = 0;
            }
        }
    }
}

/// Owner vectors (one agent per color) in lexicographic order; in the
/// mandatory setting only surjections are yielded.
pub(crate) fn assignments(p: usize, n: usize, surjective_only: bool) -> Vec<Vec<usize>> {
    if n == 0 {
        return if p == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; p];
    loop {
        let keep = if surjective_only {
            (0..n).all(|a| cur.contains(&a))
        } else {
            true
        };
        if keep {
            out.push(cur.clone());
        }
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < n {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Every valid bucket profile over the given coloring: all assignments
/// of colors to agents (surjections in the mandatory setting) paired
/// with every canonicalized level function passing the validity filter.
pub fn enumerate_profiles(
    inst: &Instance,
    params: &ApproxParams,
    coloring: &[u8],
    guard: u64,
) -> Result<Vec<BucketProfile>> {
    let n = inst.agent_count();
    let p = inst.p();
    debug_assert_eq!(coloring.len(), inst.vertex_count());
    let surjective = inst.setting() == crate::instance::Setting::Mandatory;
    let weights = ValidityWeights::new(params);
    let mut out = Vec::new();
    for owner in assignments(p, n, surjective) {
        // The validity constraint decomposes over ordered agent pairs
        // (i, j): it touches only the levels of i on colors owned by j.
        // Enumerate each block independently and take the product.
        let mut blocks: Vec<((usize, usize), Vec<Vec<i64>>)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let cols: Vec<usize> = (0..p).filter(|&c| owner[c] == j).collect();
                if cols.is_empty() {
                    continue;
                }
                let tuples = weights.valid_tuples(cols.len(), params.t, guard)?;
                blocks.push(((i, j), tuples));
            }
        }
        if blocks.iter().any(|(_, tuples)| tuples.is_empty()) {
            // Some pair constraint admits no levels: nothing to yield
            // for this assignment.
            continue;
        }
        let mut pick = vec![0usize; blocks.len()];
        loop {
            let mut levels = vec![vec![params.t; p]; n];
            for (b, ((i, j), tuples)) in blocks.iter().enumerate() {
                let tuple = &tuples[pick[b]];
                let mut slot = 0;
                for c in 0..p {
                    if owner[c] == *j {
                        levels[*i][c] = tuple[slot];
                        slot += 1;
                    }
                }
            }
            let profile = BucketProfile {
                coloring: coloring.to_vec(),
                assignment: owner.clone(),
                levels,
            };
            debug_assert!(profile_is_valid(&profile, params, n));
            out.push(profile);
            if out.len() as u64 > guard {
                return Err(Error::GuardExceeded {
                    task: "profile enumeration".into(),
                    needed: format!("> {}", guard),
                    limit: guard,
                });
            }
            let mut b = blocks.len();
            let done = loop {
                if b == 0 {
                    break true;
                }
                b -= 1;
                pick[b] += 1;
                if pick[b] < blocks[b].1.len() {
                    break false;
                }
                pick[b] = 0;
            };
            if done {
                break;
            }
        }
    }
    Ok(out)
}

/// Per-vertex eligibility: with `c` the color of `v`, every agent `i`
/// not owning `c` must satisfy
/// `ceil-log_q(u_i(v)) <= mu_i - levels(i, c)` or `u_i(v) = 0`.
pub fn eligible(
    inst: &Instance,
    params: &ApproxParams,
    profile: &BucketProfile,
    mu: &[i64],
    v: usize,
) -> bool {
    let c = profile.coloring[v] as usize;
    for i in 0..inst.agent_count() {
        if profile.assignment[c] == i {
            continue;
        }
        let value = inst.valuation(i, v);
        if value.is_zero() {
            continue;
        }
        if params.ceil_log_uint(value) > mu[i] - profile.levels[i][c] {
            return false;
        }
    }
    true
}

/// Result of one subroutine invocation: a full allocation as per-agent
/// bundles of vertex indices, or an agent whose target cannot be
/// attained under the profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubroutineOutcome {
    Allocation(Vec<Vec<usize>>),
    Fail(usize),
}

/// One pass of the per-profile subroutine: builds each agent's eligible
/// subgraph over its owned color classes, finds a maximum-weight
/// connected colorful bundle, and accepts when every agent's optimum
/// reaches its target exponent.
pub fn subroutine(
    inst: &Instance,
    params: &ApproxParams,
    profile: &BucketProfile,
    mu: &[i64],
) -> Result<SubroutineOutcome> {
    let n = inst.agent_count();
    let classes = profile.color_classes(inst.vertex_count());
    let mut bundles = Vec::with_capacity(n);
    for agent in 0..n {
        let owned = profile.owned_colors(agent);
        let vertices: Vec<usize> = owned
            .iter()
            .flat_map(|&c| classes[c].iter().copied())
            .filter(|&v| eligible(inst, params, profile, mu, v))
            .collect();
        let index_of = |v: usize| vertices.iter().position(|&x| x == v);
        let g = ColoredWeightedGraph {
            vertex_count: vertices.len(),
            edges: inst
                .edges()
                .iter()
                .filter_map(|&(x, y)| Some((index_of(x)?, index_of(y)?)))
                .collect(),
            weights: vertices
                .iter()
                .map(|&v| inst.valuation(agent, v).clone())
                .collect(),
            classes: owned
                .iter()
                .map(|&c| {
                    classes[c]
                        .iter()
                        .filter_map(|&v| index_of(v))
                        .collect::<Vec<_>>()
                })
                .collect(),
        };
        let (solution, _) = max_colorful_connected(&g)?;
        match solution {
            Some(sol) => {
                let level = if sol.weight.is_zero() {
                    LOG_OF_ZERO
                } else {
                    params.ceil_log_uint(&sol.weight)
                };
                if level < mu[agent] {
                    return Ok(SubroutineOutcome::Fail(agent));
                }
                bundles.push(sol.vertices.iter().map(|&i| vertices[i]).collect());
            }
            None => return Ok(SubroutineOutcome::Fail(agent)),
        }
    }
    Ok(SubroutineOutcome::Allocation(bundles))
}
