//! Non-metric samplers: minimum-component distance and outer-min distances.
//!
//! For a distance `min(B_1, ..., B_q)` over disjoint coordinate blocks, each
//! block is sampled as its own GIRG with connection probability evaluated at
//! the *full* distance's volume of the block distance. An edge is kept only
//! in the block that realises the minimum block distance (lowest index on
//! ties). Given the positions, the kept block then carries exactly the target
//! probability and the blocks are independent, so the union has the exact
//! GIRG distribution.

use log::warn;
use rand::Rng;

use super::coupling::couple_to_cube;
use super::grid::{sample_tgirg_fast, BlockSampler, MAX_GRID_DIM};
use super::naive::sample_girg_naive;
use super::{check_weights_and_positions, draw_positions, edge_probability, EmbeddedGraph, GirgParams};
use crate::error::{Error, Result};
use crate::geometry::{DistanceSpec, Point, Topology};
use crate::graph::Graph;
use crate::weights::{sample_power_law_weights, WeightSequence, DEFAULT_W_MIN};

/// MCD-GIRG on the torus from `d` one-dimensional GIRGs sharing one weight
/// sequence. Weights are drawn from the power law with exponent `tau` unless given.
pub fn sample_mcd_girg<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    c: f64,
    tau: f64,
    alpha: f64,
    weights: Option<WeightSequence>,
    rng: &mut R,
) -> Result<EmbeddedGraph> {
    if d < 1 {
        return Err(Error::param("dimension must be at least 1"));
    }
    let params = GirgParams::new(tau, alpha, c, Topology::Torus, DistanceSpec::mcd(d))?;
    let weights = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::param(format!("{} weights for n = {n}", w.len())));
            }
            w
        }
        None => sample_power_law_weights(n, tau, DEFAULT_W_MIN, rng)?,
    };
    sample_mcd_girg_at(&params, &weights, None, rng)
}

/// MCD sampler with explicit parameters and optionally fixed positions.
pub fn sample_mcd_girg_at<R: Rng + ?Sized>(
    params: &GirgParams,
    weights: &WeightSequence,
    positions: Option<Vec<Point>>,
    rng: &mut R,
) -> Result<EmbeddedGraph> {
    params.validate()?;
    if !params.spec.is_mcd() {
        return Err(Error::param("MCD sampler requires an all-min distance"));
    }
    if params.topology != Topology::Torus {
        return Err(Error::param("MCD sampler is defined on the torus"));
    }
    sample_outer_min(params, weights, positions, rng)
}

/// Samples any Boolean-distance GIRG, choosing the fastest exact route.
pub fn sample_boolean_girg<R: Rng + ?Sized>(
    params: &GirgParams,
    weights: &WeightSequence,
    positions: Option<Vec<Point>>,
    rng: &mut R,
) -> Result<EmbeddedGraph> {
    params.validate()?;
    check_weights_and_positions(params.d, weights, positions.as_deref())?;
    if params.topology == Topology::Cube {
        let n = weights.len();
        let positions = positions.unwrap_or_else(|| draw_positions(n, params.d, rng));
        let torus = sample_boolean_girg(&params.with_topology(Topology::Torus), weights, Some(positions), rng)?;
        let graph = couple_to_cube(&torus, params, rng)?;
        return Ok(EmbeddedGraph { graph, ..torus });
    }
    let blocks = params.spec.outer_min_blocks();
    if blocks.len() == 1 {
        if params.spec.is_max_norm() && params.d <= 7 {
            return sample_tgirg_fast(params, weights, positions, rng);
        }
        warn!(
            "no fast sampler for distance {} in d = {}; using the quadratic sampler",
            params.spec, params.d
        );
        return sample_girg_naive(params, weights, positions, rng);
    }
    sample_outer_min(params, weights, positions, rng)
}

fn sample_outer_min<R: Rng + ?Sized>(
    params: &GirgParams,
    weights: &WeightSequence,
    positions: Option<Vec<Point>>,
    rng: &mut R,
) -> Result<EmbeddedGraph> {
    check_weights_and_positions(params.d, weights, positions.as_deref())?;
    let n = weights.len();
    let positions = positions.unwrap_or_else(|| draw_positions(n, params.d, rng));
    let blocks = params.spec.outer_min_blocks();
    let spec = &params.spec;
    let volume = |r: f64| spec.volume(r);
    let block_distances = |u: usize, v: usize| -> Vec<f64> {
        let (xu, xv) = (positions[u].coords(), positions[v].coords());
        blocks
            .iter()
            .map(|b| b.distance_between(Topology::Torus, xu, xv))
            .collect()
    };
    let is_argmin = |block: usize, u: usize, v: usize| {
        let dist = block_distances(u, v);
        let mine = dist[block];
        dist[..block].iter().all(|&r| r > mine) && dist[block + 1..].iter().all(|&r| r >= mine)
    };

    let mut edges = Vec::new();
    for (index, block) in blocks.iter().enumerate() {
        let coords = block.coordinates();
        if block.is_max_norm() && coords.len() <= MAX_GRID_DIM {
            let sampler = BlockSampler {
                positions: &positions,
                coords: &coords,
                weights,
                c: params.c,
                alpha: params.alpha,
                volume: &volume,
            };
            sampler.sample(rng, |u, v| {
                if is_argmin(index, u, v) {
                    edges.push((u, v));
                }
            });
        } else {
            warn!("block {block} has no fast sampler; enumerating all pairs for it");
            sample_block_naive(block, params, weights, &positions, rng, |u, v| {
                if is_argmin(index, u, v) {
                    edges.push((u, v));
                }
            });
        }
    }
    Ok(EmbeddedGraph {
        graph: Graph::from_edges(n, edges)?,
        positions,
        weights: weights.clone(),
    })
}

fn sample_block_naive<R: Rng + ?Sized, F: FnMut(usize, usize)>(
    block: &DistanceSpec,
    params: &GirgParams,
    weights: &WeightSequence,
    positions: &[Point],
    rng: &mut R,
    mut emit: F,
) {
    let n = weights.len();
    let total = weights.total();
    for u in 0..n {
        for v in (u + 1)..n {
            let r = block.distance_between(Topology::Torus, positions[u].coords(), positions[v].coords());
            let ratio = weights.get(u) * weights.get(v) / total;
            if rng.gen::<f64>() < edge_probability(params.c, params.alpha, ratio, params.spec.volume(r)) {
                emit(u, v);
            }
        }
    }
}
