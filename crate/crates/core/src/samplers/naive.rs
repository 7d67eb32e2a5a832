use rand::Rng;

use super::{check_weights_and_positions, draw_positions, edge_probability, EmbeddedGraph, GirgParams};
use crate::error::Result;
use crate::geometry::Point;
use crate::graph::Graph;
use crate::weights::WeightSequence;

/// Quadratic reference sampler: draws positions (unless given) and flips one
/// coin per vertex pair. Works for every distance and both topologies.
pub fn sample_girg_naive<R: Rng + ?Sized>(
    params: &GirgParams,
    weights: &WeightSequence,
    positions: Option<Vec<Point>>,
    rng: &mut R,
) -> Result<EmbeddedGraph> {
    params.validate()?;
    check_weights_and_positions(params.d, weights, positions.as_deref())?;
    let n = weights.len();
    let positions = positions.unwrap_or_else(|| draw_positions(n, params.d, rng));
    let total = weights.total();
    let mut edges = Vec::new();
    for u in 0..n {
        let xu = positions[u].coords();
        let wu = weights.get(u);
        for v in (u + 1)..n {
            let r = params.spec.distance_between(params.topology, xu, positions[v].coords());
            let p = edge_probability(params.c, params.alpha, wu * weights.get(v) / total, params.spec.volume(r));
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(EmbeddedGraph {
        graph: Graph::from_edges(n, edges)?,
        positions,
        weights: weights.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::oracle::*;
    use super::*;
    use crate::geometry::{DistanceSpec, Topology};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vanishing_c_gives_empty_graph() {
        let params = GirgParams::max_norm(2, 2.5, 2.0, 1e-9, Topology::Torus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let w = crate::weights::sample_power_law_weights(100, 2.5, 1.0, &mut rng).unwrap();
            let g = sample_girg_naive(&params, &w, None, &mut rng).unwrap();
            assert_eq!(g.graph.m(), 0);
        }
    }

    #[test]
    fn needs_two_vertices() {
        let params = GirgParams::max_norm(1, 2.5, 2.0, 1.0, Topology::Torus).unwrap();
        let w = WeightSequence::new(vec![1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_girg_naive(&params, &w, None, &mut rng).is_err());
    }

    #[test]
    fn single_pair_frequency_matches_probability() {
        let params = GirgParams::new(2.5, 2.0, 1.0, Topology::Torus, DistanceSpec::mcd(2)).unwrap();
        let w = WeightSequence::new(vec![1.0, 1.5]).unwrap();
        let pos = vec![Point(vec![0.0, 0.1]), Point(vec![0.3, -0.35])];
        let expected = analytic_probabilities(&params, &w, &pos)[0];
        assert!(expected > 0.05 && expected < 0.95, "{expected}");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let freq = frequencies(2, 10_000, |_| {
            sample_girg_naive(&params, &w, Some(pos.clone()), &mut rng).unwrap().graph
        });
        assert!((freq[0] - expected).abs() < 0.02, "{} vs {expected}", freq[0]);
    }

    #[test]
    fn large_alpha_approaches_threshold_graph() {
        let c = 1.0;
        let params = GirgParams::max_norm(1, 2.5, 50.0, c, Topology::Torus).unwrap();
        let n = 200;
        let w = WeightSequence::new(vec![1.0; n]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = sample_girg_naive(&params, &w, None, &mut rng).unwrap();
        assert!(g.graph.m() > 0);
        let ratio = 1.0 / w.total();
        let within = g
            .graph
            .edges()
            .filter(|&(u, v)| {
                let r = params.spec.distance_between(Topology::Torus, g.positions[u].coords(), g.positions[v].coords());
                params.spec.volume(r) <= c.powf(1.0 / 50.0) * ratio * 1.1
            })
            .count();
        assert!(within as f64 >= 0.99 * g.graph.m() as f64);
    }

    #[test]
    fn deterministic_given_seed() {
        let params = GirgParams::max_norm(2, 2.5, 2.0, 1.0, Topology::Cube).unwrap();
        let w = WeightSequence::new(vec![1.0, 2.0, 3.0, 4.0, 1.0, 2.5]).unwrap();
        let a = sample_girg_naive(&params, &w, None, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = sample_girg_naive(&params, &w, None, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.positions, b.positions);
    }
}
