//! Main search loop of the approximation scheme.
//!
//! The search space per coloring is (assignment of colors to agents) x
//! (valid level functions) x (target-descent states). The inner loop is
//! kept allocation-free: bucket levels of all valuations are
//! precomputed as small integers, eligibility is evaluated on u64
//! vertex masks, and motif optima are cached per (agent, eligible mask)
//! within each assignment.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Setting};
use crate::motif::{max_colorful_connected, ColoredWeightedGraph};
use crate::numerics::{mu_init, ApproxParams, Rational, LOG_OF_ZERO};
use crate::verify::{verify, VerificationReport};

use super::{
    assignments, colorings, lift_allocation, reduce_agents, ColoringProvider, ValidityWeights,
    DEFAULT_COLORING_GUARD, DEFAULT_PROFILE_GUARD,
};

/// Level meaning "no connected colorful subgraph exists at all".
const INFEASIBLE: i64 = i64::MIN;
/// Valuation-zero sentinel in the precomputed bucket-level table; always
/// satisfies an eligibility threshold.
const ZERO_VALUE: i64 = i64::MIN / 2;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub provider: ColoringProvider,
    pub eps_prime_override: Option<Rational>,
    pub threads: usize,
    pub coloring_guard: u64,
    pub profile_guard: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            provider: ColoringProvider::Exhaustive,
            eps_prime_override: None,
            threads: 1,
            coloring_guard: DEFAULT_COLORING_GUARD,
            profile_guard: DEFAULT_PROFILE_GUARD,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SolveStats {
    pub colorings_tried: u64,
    pub assignments_tried: u64,
    pub profiles_enumerated: u64,
    pub subroutine_calls: u64,
    pub motif_solves: u64,
}

#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Found {
        allocation: Allocation,
        report: VerificationReport,
    },
    NoCertificate {
        statement: String,
        colorings_mode: String,
        trials: Option<u64>,
        seed: Option<u64>,
    },
}

#[derive(Default)]
struct SharedStats {
    colorings_tried: AtomicU64,
    assignments_tried: AtomicU64,
    profiles_enumerated: AtomicU64,
    subroutine_calls: AtomicU64,
    motif_solves: AtomicU64,
}

impl SharedStats {
    fn snapshot(&self) -> SolveStats {
        SolveStats {
            colorings_tried: self.colorings_tried.load(Ordering::Relaxed),
            assignments_tried: self.assignments_tried.load(Ordering::Relaxed),
            profiles_enumerated: self.profiles_enumerated.load(Ordering::Relaxed),
            subroutine_calls: self.subroutine_calls.load(Ordering::Relaxed),
            motif_solves: self.motif_solves.load(Ordering::Relaxed),
        }
    }
}

struct Ctx<'a> {
    inst: &'a Instance,
    params: &'a ApproxParams,
    /// Bucket level of every valuation: `logs[agent][vertex]`.
    logs: Vec<Vec<i64>>,
    mu0: i64,
    /// Valid level tuples indexed by block length (number of colors one
    /// agent owns).
    tuples_by_len: Vec<Vec<Vec<i64>>>,
    assignments: Vec<Vec<usize>>,
    stats: &'a SharedStats,
}

fn no_certificate(provider: ColoringProvider) -> SolveOutcome {
    let (mode, trials, seed) = match provider {
        ColoringProvider::Exhaustive => ("exhaustive".to_string(), None, None),
        ColoringProvider::Randomized { trials, seed } => {
            ("randomized".to_string(), Some(trials), Some(seed))
        }
    };
    SolveOutcome::NoCertificate {
        statement: "no valid and envy-free allocation exists".into(),
        colorings_mode: mode,
        trials,
        seed,
    }
}

/// Runs the full scheme: agent-count reduction (optional setting),
/// exact bucket parameters, and the profile search. Any returned
/// allocation is valid and eps-envy-free for the original instance;
/// with exhaustive colorings, a no-certificate means no valid and
/// exactly envy-free allocation exists.
pub fn solve_epas(
    inst: &Instance,
    eps: &Rational,
    opts: &SolveOptions,
) -> Result<(SolveOutcome, SolveStats)> {
    if *eps <= Rational::zero() {
        return Err(Error::NonPositiveEps(eps.to_string()));
    }
    let n = inst.agent_count();
    let p = inst.p();
    let stats = SolveStats::default();

    if inst.setting() == Setting::Mandatory && n > p {
        return Ok((no_certificate(opts.provider), stats));
    }
    if p == 0 {
        // Mandatory with n >= 1 was rejected above; the all-empty
        // allocation is valid and envy-free here.
        let allocation = Allocation::empty();
        let report = verify(inst, &allocation, eps)?;
        return Ok((SolveOutcome::Found { allocation, report }, stats));
    }
    if n == 0 {
        return Ok((no_certificate(opts.provider), stats));
    }
    if inst.vertex_count() > 64 {
        return Err(Error::TooManyVertices {
            m: inst.vertex_count(),
        });
    }

    let (reduced, back) = if inst.setting() == Setting::Optional {
        reduce_agents(inst)
    } else {
        (
            inst.clone(),
            super::ReductionBackMap {
                kept: inst.agents().to_vec(),
                dropped: vec![],
            },
        )
    };
    let params = ApproxParams::new(eps.clone(), p, opts.eps_prime_override.clone())?;
    let rn = reduced.agent_count();
    let m = reduced.vertex_count();

    (rn as u64)
        .checked_pow(p as u32)
        .filter(|&x| x <= opts.profile_guard)
        .ok_or_else(|| Error::GuardExceeded {
            task: "color-to-agent assignments".into(),
            needed: format!("{}^{}", rn, p),
            limit: opts.profile_guard,
        })?;

    let logs: Vec<Vec<i64>> = (0..rn)
        .map(|i| {
            (0..m)
                .map(|v| {
                    let u = reduced.valuation(i, v);
                    if u.is_zero() {
                        ZERO_VALUE
                    } else {
                        params.ceil_log_uint(u)
                    }
                })
                .collect()
        })
        .collect();
    let weights = ValidityWeights::new(&params);
    let mut tuples_by_len = vec![vec![vec![]]];
    for len in 1..=p {
        let all = weights.valid_tuples(len, params.t, opts.profile_guard)?;
        tuples_by_len.push(minimal_tuples(all, &weights, params.t));
    }

    let shared = SharedStats::default();
    let ctx = Ctx {
        inst: &reduced,
        params: &params,
        logs,
        mu0: mu_init(&reduced, &params),
        tuples_by_len,
        assignments: assignments(p, rn, reduced.setting() == Setting::Mandatory),
        stats: &shared,
    };

    let success = match opts.provider {
        ColoringProvider::Exhaustive => {
            (p as u64)
                .checked_pow(m as u32)
                .filter(|&x| x <= opts.coloring_guard)
                .ok_or_else(|| Error::GuardExceeded {
                    task: "exhaustive colorings".into(),
                    needed: format!("{}^{}", p, m),
                    limit: opts.coloring_guard,
                })?;
            if opts.threads > 1 {
                let mut parts = Vec::new();
                let _ = for_each_partition(m, p, &mut |color_of| {
                    parts.push(color_of.to_vec());
                    ControlFlow::Continue(())
                });
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(opts.threads)
                    .build()
                    .expect("thread pool");
                pool.install(|| {
                    use rayon::prelude::*;
                    parts
                        .par_iter()
                        .filter_map(|color_of| process_coloring(&ctx, color_of))
                        .find_first(|_| true)
                })
            } else {
                let mut found = None;
                let _ = for_each_partition(m, p, &mut |color_of| {
                    match process_coloring(&ctx, color_of) {
                        Some(bundles) => {
                            found = Some(bundles);
                            ControlFlow::Break(())
                        }
                        None => ControlFlow::Continue(()),
                    }
                });
                found
            }
        }
        ColoringProvider::Randomized { trials, seed } => {
            let all = colorings(
                m,
                p,
                ColoringProvider::Randomized { trials, seed },
                opts.coloring_guard,
            )?;
            all.iter()
                .find_map(|color_of| process_coloring(&ctx, color_of))
        }
    };

    let stats = shared.snapshot();
    match success {
        Some(bundles) => {
            let alloc_reduced = Allocation::from_indices(&reduced, &bundles);
            let allocation = lift_allocation(&back, &alloc_reduced)?;
            let report = verify(inst, &allocation, eps)?;
            debug_assert!(report.valid && report.eps_envy_free);
            Ok((SolveOutcome::Found { allocation, report }, stats))
        }
        None => Ok((no_certificate(opts.provider), stats)),
    }
}

/// Keeps only the pointwise-minimal valid level tuples.
///
/// The pair constraint is upward closed in the levels, while the descent
/// outcome is anti-monotone: lowering a level can only enlarge eligible
/// sets, which raises the attainable bucket levels at every round, so a
/// profile that succeeds still succeeds after any levels are lowered (as
/// long as the result stays valid). Every valid level function therefore
/// dominates a minimal one with the same or better outcome, and only the
/// minimal frontier needs to be searched. Since validity is upward
/// closed, a tuple is minimal exactly when every single-coordinate
/// decrement is invalid.
fn minimal_tuples(all: Vec<Vec<i64>>, weights: &ValidityWeights, t: i64) -> Vec<Vec<i64>> {
    all.into_iter()
        .filter(|tuple| {
            (0..tuple.len()).all(|c| {
                if tuple[c] == 0 {
                    return true;
                }
                let mut dec = tuple.clone();
                dec[c] -= 1;
                !weights.tuple_is_valid(&dec, t)
            })
        })
        .collect()
}

/// Streams the partitions of `[0, m)` into exactly `p` unordered
/// nonempty classes as restricted-growth color strings. Enumerating
/// unordered classes is enough: color permutations act on profiles by
/// relabeling and change nothing else.
fn for_each_partition(
    m: usize,
    p: usize,
    f: &mut dyn FnMut(&[u8]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    fn rec(
        color_of: &mut Vec<u8>,
        v: usize,
        used: usize,
        m: usize,
        p: usize,
        f: &mut dyn FnMut(&[u8]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if v == m {
            return if used == p {
                f(color_of)
            } else {
                ControlFlow::Continue(())
            };
        }
        if used + (m - v) < p {
            return ControlFlow::Continue(()); // cannot reach p classes
        }
        let limit = (used + 1).min(p);
        for c in 0..limit {
            color_of[v] = c as u8;
            let next_used = used.max(c + 1);
            rec(color_of, v + 1, next_used, m, p, f)?;
        }
        ControlFlow::Continue(())
    }
    if p > m {
        return ControlFlow::Continue(());
    }
    let mut color_of = vec![0u8; m];
    rec(&mut color_of, 0, 0, m, p, f)
}

/// Processes one coloring unit: every assignment and every valid level
/// function, with the target-descent loop per profile. Returns the
/// winning bundles on the reduced instance.
fn process_coloring(ctx: &Ctx<'_>, color_of: &[u8]) -> Option<Vec<Vec<usize>>> {
    let n = ctx.inst.agent_count();
    let p = ctx.inst.p();
    let m = ctx.inst.vertex_count();
    ctx.stats.colorings_tried.fetch_add(1, Ordering::Relaxed);

    let mut class_verts: Vec<Vec<usize>> = vec![Vec::new(); p];
    let mut class_mask = vec![0u64; p];
    for v in 0..m {
        let c = color_of[v] as usize;
        class_verts[c].push(v);
        class_mask[c] |= 1 << v;
    }

    for owner in &ctx.assignments {
        ctx.stats.assignments_tried.fetch_add(1, Ordering::Relaxed);
        let mut agent_colors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (c, &a) in owner.iter().enumerate() {
            agent_colors[a].push(c);
        }
        let mut search = AssignmentSearch {
            ctx,
            class_verts: &class_verts,
            agent_colors: &agent_colors,
            cache: HashMap::new(),
        };

        // If some agent has no connected colorful bundle even with every
        // vertex eligible, no level function or target can help: masks
        // only shrink during the descent.
        let feasible = (0..n).all(|j| {
            let full: u64 = agent_colors[j].iter().map(|&c| class_mask[c]).sum();
            search.motif_level(j, full) != INFEASIBLE
        });
        if !feasible {
            continue;
        }

        if let Some(bundles) = search.scan_levels() {
            return Some(bundles);
        }
    }
    None
}

struct AssignmentSearch<'a, 'c> {
    ctx: &'a Ctx<'c>,
    class_verts: &'a [Vec<usize>],
    agent_colors: &'a [Vec<usize>],
    /// (agent, eligible mask) -> bucket level of the motif optimum.
    cache: HashMap<(usize, u64), i64>,
}

impl AssignmentSearch<'_, '_> {
    /// Enumerates all valid level functions blockwise (the validity
    /// constraint decomposes over ordered agent pairs) and runs the
    /// descent on each.
    fn scan_levels(&mut self) -> Option<Vec<Vec<usize>>> {
        let n = self.ctx.inst.agent_count();
        let p = self.ctx.inst.p();
        let t = self.ctx.params.t;

        // Blocks: (observer agent i, columns owned by j) for i != j.
        let mut blocks: Vec<(usize, &[usize], &[Vec<i64>])> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || self.agent_colors[j].is_empty() {
                    continue;
                }
                let cols = &self.agent_colors[j];
                blocks.push((i, cols, &self.ctx.tuples_by_len[cols.len()]));
            }
        }
        if blocks.iter().any(|(_, _, tuples)| tuples.is_empty()) {
            return None;
        }

        let mut lam = vec![t; n * p];
        let mut pick = vec![0usize; blocks.len()];
        loop {
            for (b, (i, cols, tuples)) in blocks.iter().enumerate() {
                let tuple = &tuples[pick[b]];
                for (slot, &c) in cols.iter().enumerate() {
                    lam[i * p + c] = tuple[slot];
                }
            }
            self.ctx
                .stats
                .profiles_enumerated
                .fetch_add(1, Ordering::Relaxed);
            if let Some(mu) = self.descend(&lam) {
                return Some(self.reconstruct(&lam, &mu));
            }
            let mut b = blocks.len();
            loop {
                if b == 0 {
                    return None;
                }
                b -= 1;
                pick[b] += 1;
                if pick[b] < blocks[b].2.len() {
                    break;
                }
                pick[b] = 0;
            }
        }
    }

    /// Target descent. A failing agent's target drops directly to the
    /// bucket level its current optimum attains (equivalent to the
    /// one-by-one decrements: the same agent would keep failing at every
    /// intermediate value, and its own eligible set does not depend on
    /// its own target). A profile is abandoned as soon as some agent has
    /// no connected colorful bundle at all, since eligible sets only
    /// shrink as targets decrease.
    fn descend(&mut self, lam: &[i64]) -> Option<Vec<i64>> {
        let n = self.ctx.inst.agent_count();
        let mut mu = vec![self.ctx.mu0; n];
        loop {
            self.ctx
                .stats
                .subroutine_calls
                .fetch_add(1, Ordering::Relaxed);
            let mut changed = false;
            for j in 0..n {
                let mask = self.eligible_mask(j, lam, &mu);
                let level = self.motif_level(j, mask);
                if level == INFEASIBLE {
                    return None;
                }
                if level < mu[j] {
                    mu[j] = level;
                    changed = true;
                }
            }
            if !changed {
                return Some(mu);
            }
        }
    }

    fn eligible_mask(&self, j: usize, lam: &[i64], mu: &[i64]) -> u64 {
        let n = self.ctx.inst.agent_count();
        let p = self.ctx.inst.p();
        let logs = &self.ctx.logs;
        let mut mask = 0u64;
        for &c in &self.agent_colors[j] {
            'vertices: for &v in &self.class_verts[c] {
                for i in 0..n {
                    if i != j && logs[i][v] > mu[i] - lam[i * p + c] {
                        continue 'vertices;
                    }
                }
                mask |= 1 << v;
            }
        }
        mask
    }

    /// Bucket level of the maximum-weight connected colorful bundle of
    /// agent `j` within the eligible mask; cached per mask.
    fn motif_level(&mut self, j: usize, mask: u64) -> i64 {
        if let Some(&level) = self.cache.get(&(j, mask)) {
            return level;
        }
        let level = match self.solve_motif(j, mask) {
            None => INFEASIBLE,
            Some((_, weight_level)) => weight_level,
        };
        self.cache.insert((j, mask), level);
        level
    }

    fn solve_motif(&self, j: usize, mask: u64) -> Option<(Vec<usize>, i64)> {
        self.ctx.stats.motif_solves.fetch_add(1, Ordering::Relaxed);
        let inst = self.ctx.inst;
        let vertices: Vec<usize> = (0..inst.vertex_count()).filter(|&v| mask >> v & 1 == 1).collect();
        let mut local = vec![usize::MAX; inst.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let g = ColoredWeightedGraph {
            vertex_count: vertices.len(),
            edges: inst
                .edges()
                .iter()
                .filter(|&&(x, y)| local[x] != usize::MAX && local[y] != usize::MAX)
                .map(|&(x, y)| (local[x], local[y]))
                .collect(),
            weights: vertices
                .iter()
                .map(|&v| inst.valuation(j, v).clone())
                .collect(),
            classes: self.agent_colors[j]
                .iter()
                .map(|&c| {
                    self.class_verts[c]
                        .iter()
                        .filter(|&&v| local[v] != usize::MAX)
                        .map(|&v| local[v])
                        .collect()
                })
                .collect(),
        };
        let (solution, _) = max_colorful_connected(&g).expect("well-formed motif input");
        solution.map(|sol| {
            let level = if sol.weight.is_zero() {
                LOG_OF_ZERO
            } else {
                self.ctx.params.ceil_log_uint(&sol.weight)
            };
            (sol.vertices.iter().map(|&i| vertices[i]).collect(), level)
        })
    }

    /// Rebuilds the actual bundles once a fixpoint passes all targets.
    fn reconstruct(&mut self, lam: &[i64], mu: &[i64]) -> Vec<Vec<usize>> {
        let n = self.ctx.inst.agent_count();
        (0..n)
            .map(|j| {
                let mask = self.eligible_mask(j, lam, mu);
                let (bundle, level) = self
                    .solve_motif(j, mask)
                    .expect("descent fixpoint is feasible");
                debug_assert!(level >= mu[j]);
                bundle
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epas::{colorings, enumerate_profiles, reduce_agents, SubroutineOutcome};
    use crate::exact::{solve_exact, DEFAULT_EXACT_GUARD};
    use crate::gen::{gen_random, RandomSpec};
    use crate::numerics::parse_rational;
    use std::collections::BTreeMap;

    /// Literal transcription of the scheme for cross-checking: all
    /// colorings, all valid profiles, and a descent that lowers the
    /// failing agent's target by exactly one until it would pass -1.
    fn reference_solve(inst: &Instance, eps: &Rational) -> Option<Allocation> {
        let (reduced, back) = if inst.setting() == Setting::Optional {
            reduce_agents(inst)
        } else {
            (
                inst.clone(),
                crate::epas::ReductionBackMap {
                    kept: inst.agents().to_vec(),
                    dropped: vec![],
                },
            )
        };
        let p = reduced.p();
        let n = reduced.agent_count();
        if p == 0 {
            return match reduced.setting() {
                Setting::Optional => Some(Allocation::empty()),
                Setting::Mandatory if n == 0 => Some(Allocation::empty()),
                Setting::Mandatory => None,
            };
        }
        if n == 0 || (reduced.setting() == Setting::Mandatory && n > p) {
            return None;
        }
        let params = ApproxParams::new(eps.clone(), p, None).unwrap();
        let mu0 = mu_init(&reduced, &params);
        for coloring in colorings(
            reduced.vertex_count(),
            p,
            crate::epas::ColoringProvider::Exhaustive,
            u64::MAX,
        )
        .unwrap()
        {
            for profile in enumerate_profiles(&reduced, &params, &coloring, u64::MAX).unwrap() {
                let mut mu = vec![mu0; n];
                loop {
                    match crate::epas::subroutine(&reduced, &params, &profile, &mu).unwrap() {
                        SubroutineOutcome::Allocation(bundles) => {
                            let alloc = Allocation::from_indices(&reduced, &bundles);
                            return Some(
                                crate::epas::lift_allocation(&back, &alloc).unwrap(),
                            );
                        }
                        SubroutineOutcome::Fail(j) => {
                            mu[j] -= 1;
                            if mu[j] < crate::numerics::LOG_OF_ZERO {
                                break; // profile exhausted
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn spec(seed: u64, m: usize, n: usize, p: usize, setting: Setting) -> RandomSpec {
        RandomSpec {
            m,
            n,
            p,
            max_value: 10,
            edge_density: 0.5,
            num_types: n.max(1),
            seed,
            setting,
            connected: seed % 3 != 0,
        }
    }

    #[test]
    fn matches_reference_implementation() {
        let eps = parse_rational("4").unwrap();
        let opts = SolveOptions::default();
        for seed in 0..40u64 {
            let setting = if seed % 2 == 0 {
                Setting::Optional
            } else {
                Setting::Mandatory
            };
            let inst = gen_random(&spec(seed, 4 + (seed % 2) as usize, 2, 2, setting)).unwrap();
            let (outcome, _) = solve_epas(&inst, &eps, &opts).unwrap();
            let reference = reference_solve(&inst, &eps);
            match (&outcome, &reference) {
                (SolveOutcome::Found { allocation, .. }, Some(_)) => {
                    let r = verify(&inst, allocation, &eps).unwrap();
                    assert!(r.valid && r.eps_envy_free, "seed {}", seed);
                }
                (SolveOutcome::NoCertificate { .. }, None) => {}
                _ => panic!(
                    "seed {}: fast gave {:?}, reference gave {:?}",
                    seed,
                    matches!(outcome, SolveOutcome::Found { .. }),
                    reference.is_some()
                ),
            }
        }
    }

    #[test]
    fn agrees_with_exact_search() {
        let eps = parse_rational("10").unwrap();
        let opts = SolveOptions::default();
        for seed in 100..140u64 {
            let setting = if seed % 2 == 0 {
                Setting::Optional
            } else {
                Setting::Mandatory
            };
            let inst = gen_random(&spec(seed, 6, 2, 2, setting)).unwrap();
            let exact = solve_exact(&inst, DEFAULT_EXACT_GUARD).unwrap();
            let (outcome, _) = solve_epas(&inst, &eps, &opts).unwrap();
            match outcome {
                SolveOutcome::Found { allocation, report } => {
                    assert!(report.valid && report.eps_envy_free, "seed {}", seed);
                    let re = verify(&inst, &allocation, &eps).unwrap();
                    assert!(re.valid && re.eps_envy_free);
                }
                SolveOutcome::NoCertificate { .. } => {
                    assert!(exact.is_none(), "seed {}: missed an EF allocation", seed);
                }
            }
        }
    }

    #[test]
    fn randomized_and_threaded_paths() {
        let eps = parse_rational("4").unwrap();
        let inst = gen_random(&spec(7, 6, 2, 3, Setting::Optional)).unwrap();
        let base = solve_epas(&inst, &eps, &SolveOptions::default()).unwrap().0;
        let rand = solve_epas(
            &inst,
            &eps,
            &SolveOptions {
                provider: ColoringProvider::Randomized {
                    trials: 500,
                    seed: 1,
                },
                ..SolveOptions::default()
            },
        )
        .unwrap()
        .0;
        let par = solve_epas(
            &inst,
            &eps,
            &SolveOptions {
                threads: 2,
                ..SolveOptions::default()
            },
        )
        .unwrap()
        .0;
        for out in [&base, &rand, &par] {
            match out {
                SolveOutcome::Found { allocation, .. } => {
                    let r = verify(&inst, allocation, &eps).unwrap();
                    assert!(r.valid && r.eps_envy_free);
                }
                SolveOutcome::NoCertificate { .. } => panic!("expected an allocation"),
            }
        }
        // The parallel path returns the same allocation as the
        // sequential one (find_first preserves enumeration order).
        match (&base, &par) {
            (
                SolveOutcome::Found { allocation: a, .. },
                SolveOutcome::Found { allocation: b, .. },
            ) => assert_eq!(a, b),
            _ => unreachable!(),
        }
    }

    #[test]
    fn degenerate_cases() {
        let eps = parse_rational("4").unwrap();
        let opts = SolveOptions::default();
        let mk = |p: usize, setting: Setting, value: u64| {
            let vals: BTreeMap<String, BTreeMap<String, num_bigint::BigUint>> = ["A", "B"]
                .iter()
                .map(|a| {
                    (
                        a.to_string(),
                        [
                            ("x".to_string(), value.into()),
                            ("y".to_string(), value.into()),
                        ]
                        .into_iter()
                        .collect(),
                    )
                })
                .collect();
            Instance::new(
                vec!["x".into(), "y".into()],
                vec![("x".into(), "y".into())],
                vec!["A".into(), "B".into()],
                &vals,
                p,
                setting,
            )
            .unwrap()
        };
        // p = 0, optional: the all-empty allocation.
        let (out, _) = solve_epas(&mk(0, Setting::Optional, 5), &eps, &opts).unwrap();
        match out {
            SolveOutcome::Found { allocation, report } => {
                assert!(allocation.bundles.is_empty());
                assert!(report.valid && report.envy_free);
            }
            _ => panic!("expected the empty allocation"),
        }
        // p = 0, mandatory with agents: impossible.
        let (out, _) = solve_epas(&mk(0, Setting::Mandatory, 5), &eps, &opts).unwrap();
        assert!(matches!(out, SolveOutcome::NoCertificate { .. }));
        // Mandatory with n > p: pigeonhole.
        let (out, _) = solve_epas(&mk(1, Setting::Mandatory, 5), &eps, &opts).unwrap();
        assert!(matches!(out, SolveOutcome::NoCertificate { .. }));
        // M = 0: nobody values anything; any valid allocation works.
        let (out, _) = solve_epas(&mk(2, Setting::Mandatory, 0), &eps, &opts).unwrap();
        match out {
            SolveOutcome::Found { report, .. } => assert!(report.valid && report.envy_free),
            _ => panic!("expected an allocation for all-zero valuations"),
        }
        // eps must be positive.
        assert!(solve_epas(&mk(1, Setting::Optional, 5), &Rational::zero(), &opts).is_err());
    }
}
