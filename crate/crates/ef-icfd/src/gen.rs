//! Instance generators: the star-graph hardness construction from
//! vector-sum inputs, seeded random instances, and named graph shapes.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::VectorSumInstance;
use crate::instance::{Instance, Setting};

/// Builds the fair-division instance encoding a vector-sum question:
/// a star with center `c` and leaves `a1..ad`, `b1..bd`, `v1..vn`;
/// agents `A1..Ad`, `B1..Bd`, `C`; budget `p = 2d + k + 1`.
///
/// Agent `Al` values `vi` at `n^3 + w_i[l]`, the center at `n^3`, its
/// own anchor `al` at `(k+1)n^3 + t_l` and everything else at zero;
/// `Bl` mirrors this with subtractions; `C` values every vertex at 1.
pub fn gen_reduction(vs: &VectorSumInstance) -> Result<Instance> {
    vs.check()?;
    let d = vs.dimension();
    let n = vs.vectors.len();
    let k = vs.k;
    let n3 = BigUint::from(n).pow(3);
    let anchor = BigUint::from(k + 1) * &n3;
    for w in &vs.vectors {
        for entry in w {
            if *entry > n3 {
                return Err(Error::ReductionEntryTooLarge {
                    entry: entry.to_string(),
                    bound: n3.to_string(),
                });
            }
        }
    }
    for t in &vs.target {
        if *t > anchor {
            return Err(Error::ReductionEntryTooLarge {
                entry: t.to_string(),
                bound: anchor.to_string(),
            });
        }
    }

    let mut vertices = vec!["c".to_string()];
    let a_names: Vec<String> = (1..=d).map(|l| format!("a{}", l)).collect();
    let b_names: Vec<String> = (1..=d).map(|l| format!("b{}", l)).collect();
    let v_names: Vec<String> = (1..=n).map(|i| format!("v{}", i)).collect();
    vertices.extend(a_names.iter().cloned());
    vertices.extend(b_names.iter().cloned());
    vertices.extend(v_names.iter().cloned());
    let edges: Vec<(String, String)> = vertices[1..]
        .iter()
        .map(|leaf| ("c".to_string(), leaf.clone()))
        .collect();

    let mut agents: Vec<String> = (1..=d).map(|l| format!("A{}", l)).collect();
    agents.extend((1..=d).map(|l| format!("B{}", l)));
    agents.push("C".to_string());

    let mut valuations: BTreeMap<String, BTreeMap<String, BigUint>> = BTreeMap::new();
    for l in 0..d {
        let mut row_a = BTreeMap::new();
        let mut row_b = BTreeMap::new();
        row_a.insert("c".to_string(), n3.clone());
        row_b.insert("c".to_string(), n3.clone());
        for (j, name) in a_names.iter().enumerate() {
            let val_a = if j == l {
                &anchor + &vs.target[l]
            } else {
                BigUint::zero()
            };
            row_a.insert(name.clone(), val_a);
            row_b.insert(name.clone(), BigUint::zero());
        }
        for (j, name) in b_names.iter().enumerate() {
            let val_b = if j == l {
                &anchor - &vs.target[l]
            } else {
                BigUint::zero()
            };
            row_a.insert(name.clone(), BigUint::zero());
            row_b.insert(name.clone(), val_b);
        }
        for (i, name) in v_names.iter().enumerate() {
            row_a.insert(name.clone(), &n3 + &vs.vectors[i][l]);
            row_b.insert(name.clone(), &n3 - &vs.vectors[i][l]);
        }
        valuations.insert(format!("A{}", l + 1), row_a);
        valuations.insert(format!("B{}", l + 1), row_b);
    }
    let row_c: BTreeMap<String, BigUint> = vertices
        .iter()
        .map(|v| (v.clone(), BigUint::one()))
        .collect();
    valuations.insert("C".to_string(), row_c);

    Instance::new(
        vertices,
        edges,
        agents,
        &valuations,
        2 * d + k + 1,
        Setting::Optional,
    )
}

/// Parameters for the seeded random generator.
#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub max_value: u128,
    pub edge_density: f64,
    pub num_types: usize,
    pub seed: u64,
    pub setting: Setting,
    /// Base the graph on a random spanning tree so connected bundles are
    /// common; disable for disconnected-graph edge cases.
    pub connected: bool,
}

/// Reproducible random instance: given the same spec the output is
/// byte-identical.
pub fn gen_random(spec: &RandomSpec) -> Result<Instance> {
    if spec.m == 0 {
        return Err(Error::BadGenParams("m must be positive".into()));
    }
    if spec.p > spec.m {
        return Err(Error::BadGenParams(format!(
            "p = {} exceeds m = {}",
            spec.p, spec.m
        )));
    }
    if spec.num_types > spec.n || (spec.n > 0 && spec.num_types == 0) {
        return Err(Error::BadGenParams(format!(
            "num_types = {} out of range for n = {}",
            spec.num_types, spec.n
        )));
    }
    if !(0.0..=1.0).contains(&spec.edge_density) {
        return Err(Error::BadGenParams("edge_density must be in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vertices: Vec<String> = (1..=spec.m).map(|i| format!("v{}", i)).collect();
    let agents: Vec<String> = (1..=spec.n).map(|i| format!("A{}", i)).collect();

    let mut edges: Vec<(String, String)> = Vec::new();
    let mut present = vec![vec![false; spec.m]; spec.m];
    if spec.connected {
        for i in 1..spec.m {
            let j = rng.gen_range(0..i);
            present[j][i] = true;
            edges.push((vertices[j].clone(), vertices[i].clone()));
        }
    }
    for i in 0..spec.m {
        for j in i + 1..spec.m {
            if !present[i][j] && rng.gen_bool(spec.edge_density) {
                present[i][j] = true;
                edges.push((vertices[i].clone(), vertices[j].clone()));
            }
        }
    }

    // Distinct valuation rows, one per type.
    let mut rows: Vec<Vec<BigUint>> = Vec::new();
    for _ in 0..spec.num_types {
        let mut attempts = 0;
        loop {
            let row: Vec<BigUint> = (0..spec.m)
                .map(|_| BigUint::from(rng.gen_range(0..=spec.max_value)))
                .collect();
            if !rows.contains(&row) {
                rows.push(row);
                break;
            }
            attempts += 1;
            if attempts > 64 {
                return Err(Error::BadGenParams(format!(
                    "cannot draw {} distinct valuation rows with max_value = {}",
                    spec.num_types, spec.max_value
                )));
            }
        }
    }
    let mut valuations = BTreeMap::new();
    for (a, name) in agents.iter().enumerate() {
        // The first num_types agents pin one type each so every class is
        // nonempty; the rest draw uniformly.
        let ty = if a < spec.num_types {
            a
        } else {
            rng.gen_range(0..spec.num_types)
        };
        let row: BTreeMap<String, BigUint> = vertices
            .iter()
            .zip(&rows[ty])
            .map(|(v, val)| (v.clone(), val.clone()))
            .collect();
        valuations.insert(name.clone(), row);
    }

    Instance::new(vertices, edges, agents, &valuations, spec.p, spec.setting)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// K_{1,leaves}: center `c` plus that many leaves.
    Star { leaves: usize },
    Path { length: usize },
    Grid { rows: usize, cols: usize },
}

/// Deterministically labeled standard topologies.
pub fn gen_shape(shape: Shape) -> Result<(Vec<String>, Vec<(String, String)>)> {
    match shape {
        Shape::Star { leaves } => {
            let mut vertices = vec!["c".to_string()];
            let mut edges = Vec::new();
            for i in 1..=leaves {
                let leaf = format!("v{}", i);
                edges.push(("c".to_string(), leaf.clone()));
                vertices.push(leaf);
            }
            Ok((vertices, edges))
        }
        Shape::Path { length } => {
            if length == 0 {
                return Err(Error::BadGenParams("path length must be positive".into()));
            }
            let vertices: Vec<String> = (1..=length).map(|i| format!("v{}", i)).collect();
            let edges = (1..length)
                .map(|i| (format!("v{}", i), format!("v{}", i + 1)))
                .collect();
            Ok((vertices, edges))
        }
        Shape::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(Error::BadGenParams("grid dims must be positive".into()));
            }
            let name = |r: usize, c: usize| format!("v{}_{}", r + 1, c + 1);
            let mut vertices = Vec::new();
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    vertices.push(name(r, c));
                    if r + 1 < rows {
                        edges.push((name(r, c), name(r + 1, c)));
                    }
                    if c + 1 < cols {
                        edges.push((name(r, c), name(r, c + 1)));
                    }
                }
            }
            Ok((vertices, edges))
        }
    }
}
