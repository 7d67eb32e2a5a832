use rand::Rng;

use super::{edge_probability, EmbeddedGraph, GirgParams};
use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::graph::Graph;

/// Thins a torus GIRG into a cube GIRG on the same positions and weights:
/// each edge survives with probability `p_cube / p_torus`. Cube distances
/// dominate torus distances, so the ratio never exceeds one.
pub fn couple_to_cube<R: Rng + ?Sized>(
    embedded: &EmbeddedGraph,
    params: &GirgParams,
    rng: &mut R,
) -> Result<Graph> {
    params.validate()?;
    let n = embedded.graph.n();
    if embedded.positions.len() != n || embedded.weights.len() != n {
        return Err(Error::param("positions and weights must cover every vertex"));
    }
    let total = embedded.weights.total();
    let mut kept = Vec::with_capacity(embedded.graph.m());
    for (u, v) in embedded.graph.edges() {
        let (p_torus, p_cube) = pair_probabilities(embedded, params, total, u, v);
        if p_torus <= 0.0 {
            return Err(Error::Corrupted(format!(
                "edge {u}-{v} has zero torus connection probability"
            )));
        }
        if rng.gen::<f64>() <= p_cube / p_torus {
            kept.push((u, v));
        }
    }
    Graph::from_edges(n, kept)
}

/// `(p_torus, p_cube)` for one vertex pair.
pub(crate) fn pair_probabilities(
    embedded: &EmbeddedGraph,
    params: &GirgParams,
    total: f64,
    u: usize,
    v: usize,
) -> (f64, f64) {
    let (xu, xv) = (embedded.positions[u].coords(), embedded.positions[v].coords());
    let ratio = embedded.weights.get(u) * embedded.weights.get(v) / total;
    let spec = &params.spec;
    let torus = spec.distance_between(Topology::Torus, xu, xv);
    let cube = spec.distance_between(Topology::Cube, xu, xv);
    (
        edge_probability(params.c, params.alpha, ratio, spec.volume(torus)),
        edge_probability(params.c, params.alpha, ratio, spec.volume(cube)),
    )
}
