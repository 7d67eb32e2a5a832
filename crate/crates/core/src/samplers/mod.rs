//! Random graph generators.
//!
//! GIRG samplers share one connection rule: vertices `u`, `v` with weights
//! `w_u`, `w_v` at Boolean distance `r` are joined with probability
//! `min{1, c * ((w_u * w_v / W) / Vol(r))^alpha}`, where `Vol` is the ball
//! volume of the distance function and `W` the total weight.
//!
//! [`sample_girg_naive`] evaluates every pair and is the reference for the
//! faster samplers:
//! * [`sample_tgirg_fast`]: max-norm on the torus, hierarchical cell grid.
//! * [`sample_mcd_girg`]: minimum-component distance from `d` one-dimensional runs.
//! * [`couple_to_cube`]: turns a torus sample into a cube sample by thinning edges.
//! * [`sample_boolean_girg`]: dispatches an arbitrary distance to the above.

mod baselines;
mod boolean;
mod coupling;
mod grid;
mod naive;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{random_coords, DistanceSpec, Point, Topology};
use crate::graph::Graph;
use crate::weights::WeightSequence;

pub use baselines::{
    sample_barabasi_albert, sample_chung_lu, sample_chung_lu_naive, sample_erdos_renyi,
};
pub use boolean::{sample_boolean_girg, sample_mcd_girg, sample_mcd_girg_at};
pub use coupling::couple_to_cube;
pub use grid::{sample_tgirg_fast, MAX_GRID_DIM};
pub use naive::sample_girg_naive;

#[derive(Debug, Clone, PartialEq)]
pub struct GirgParams {
    pub d: usize,
    pub tau: f64,
    pub alpha: f64,
    pub c: f64,
    pub topology: Topology,
    pub spec: DistanceSpec,
}

impl GirgParams {
    pub fn new(tau: f64, alpha: f64, c: f64, topology: Topology, spec: DistanceSpec) -> Result<Self> {
        let params = GirgParams {
            d: spec.dim(),
            tau,
            alpha,
            c,
            topology,
            spec,
        };
        params.validate()?;
        Ok(params)
    }

    /// Max-norm GIRG of dimension `d`.
    pub fn max_norm(d: usize, tau: f64, alpha: f64, c: f64, topology: Topology) -> Result<Self> {
        Self::new(tau, alpha, c, topology, DistanceSpec::max_norm(d))
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate(self.d)?;
        if !(self.alpha > 1.0) || self.alpha.is_nan() {
            return Err(Error::param(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::param(format!("c must be positive, got {}", self.c)));
        }
        if !(self.tau > 2.0) || !self.tau.is_finite() {
            return Err(Error::param(format!("tau must exceed 2, got {}", self.tau)));
        }
        Ok(())
    }

    pub fn with_c(&self, c: f64) -> Self {
        GirgParams { c, ..self.clone() }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        GirgParams {
            alpha,
            ..self.clone()
        }
    }

    pub fn with_topology(&self, topology: Topology) -> Self {
        GirgParams {
            topology,
            ..self.clone()
        }
    }
}

/// A sampled GIRG together with the positions and weights it was drawn from.
#[derive(Debug, Clone)]
pub struct EmbeddedGraph {
    pub graph: Graph,
    pub positions: Vec<Point>,
    pub weights: WeightSequence,
}

/// Connection probability from the weight ratio `w_u w_v / W` and the ball
/// volume at the pair's distance. Zero volume means probability 1.
#[inline]
pub(crate) fn edge_probability(c: f64, alpha: f64, weight_ratio: f64, volume: f64) -> f64 {
    if volume <= 0.0 {
        return 1.0;
    }
    let p = c * (weight_ratio / volume).powf(alpha);
    if p.is_nan() {
        1.0
    } else {
        p.min(1.0)
    }
}

pub fn connection_probability(
    params: &GirgParams,
    w_u: f64,
    w_v: f64,
    total_weight: f64,
    distance: f64,
) -> Result<f64> {
    if !(w_u > 0.0 && w_v > 0.0) {
        return Err(Error::param("weights must be positive"));
    }
    if total_weight < w_u + w_v {
        return Err(Error::param("total weight must be at least w_u + w_v"));
    }
    if !(distance >= 0.0) {
        return Err(Error::param("distance must be non-negative"));
    }
    let volume = params.spec.volume(distance);
    Ok(edge_probability(params.c, params.alpha, w_u * w_v / total_weight, volume))
}

pub(crate) fn check_weights_and_positions(
    d: usize,
    weights: &WeightSequence,
    positions: Option<&[Point]>,
) -> Result<()> {
    if weights.len() < 2 {
        return Err(Error::param("GIRG sampling needs at least two vertices"));
    }
    if let Some(pos) = positions {
        if pos.len() != weights.len() {
            return Err(Error::param(format!(
                "{} positions for {} weights",
                pos.len(),
                weights.len()
            )));
        }
        if let Some(p) = pos.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
    }
    Ok(())
}

pub(crate) fn draw_positions<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Vec<Point> {
    (0..n).map(|_| Point(random_coords(d, rng))).collect()
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Shared test helpers: analytic per-pair probabilities and empirical
    //! per-pair edge frequencies.
    use super::*;
    use crate::geometry::Topology;

    pub fn analytic_probabilities(
        params: &GirgParams,
        weights: &WeightSequence,
        positions: &[Point],
    ) -> Vec<f64> {
        let n = weights.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                let r = params
                    .spec
                    .distance_between(params.topology, positions[u].coords(), positions[v].coords());
                out.push(
                    connection_probability(params, weights.get(u), weights.get(v), weights.total(), r)
                        .unwrap(),
                );
            }
        }
        out
    }

    pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        u * (2 * n - u - 1) / 2 + (v - u - 1)
    }

    pub fn frequencies<F: FnMut(u64) -> Graph>(n: usize, runs: usize, mut sample: F) -> Vec<f64> {
        let mut counts = vec![0u32; n * (n - 1) / 2];
        for run in 0..runs {
            let g = sample(run as u64);
            for (u, v) in g.edges() {
                counts[pair_index(n, u, v)] += 1;
            }
        }
        counts.into_iter().map(|c| c as f64 / runs as f64).collect()
    }

    pub fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// Weights spread over several layers and c chosen so probabilities are
    /// neither all clamped nor all tiny.
    pub fn fixture(n: usize, spec: DistanceSpec, topology: Topology, seed: u64) -> (GirgParams, WeightSequence, Vec<Point>) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let params = GirgParams::new(2.5, 1.8, 2.0, topology, spec).unwrap();
        let weights = crate::weights::sample_power_law_weights(n, 2.5, 1.0, &mut rng).unwrap();
        let positions = draw_positions(n, params.d, &mut rng);
        (params, weights, positions)
    }
}
