//! Erdős–Rényi, Barabási–Albert and Chung–Lu graphs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weights::WeightSequence;

/// Number of Bernoulli(p) failures before the next success.
fn geometric_skip<R: Rng + ?Sized>(log_miss: f64, rng: &mut R) -> f64 {
    let u = 1.0 - rng.gen::<f64>();
    (u.ln() / log_miss).floor()
}

/// G(n, p) with geometric skipping over the pair sequence.
pub fn sample_erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if n < 1 {
        return Err(Error::param("need at least one vertex"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let log_miss = (-p).ln_1p();
    let mut edges = Vec::new();
    // pairs (w, v) with w < v, walked row by row
    let mut v = 1usize;
    let mut w: isize = -1;
    while v < n {
        let skip = geometric_skip(log_miss, rng);
        w += 1 + skip.min((n as f64) * (n as f64)) as isize;
        while v < n && w >= v as isize {
            w -= v as isize;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Graph::from_edges(n, edges)
}

/// Preferential attachment from the complete graph `K_k`: each new vertex
/// picks `k` distinct targets with probability proportional to their degree.
pub fn sample_barabasi_albert<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Graph> {
    if k < 1 || n <= k {
        return Err(Error::param(format!("need n > k >= 1, got n = {n}, k = {k}")));
    }
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(k * (n - k) + k * k / 2);
    // every edge contributes both endpoints, so sampling from this list is degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * edges.capacity());
    for u in 0..k {
        for v in (u + 1)..k {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen = Vec::with_capacity(k);
    for v in k..n {
        chosen.clear();
        while chosen.len() < k {
            let target = if endpoints.is_empty() {
                rng.gen_range(0..v)
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

fn check_chung_lu(weights: &WeightSequence, c: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::param(format!("c must be positive, got {c}")));
    }
    if weights.is_empty() {
        return Err(Error::param("empty weight sequence"));
    }
    Ok(())
}

/// Reference Chung–Lu sampler: one coin per pair with probability `min{1, c w_u w_v / W}`.
pub fn sample_chung_lu_naive<R: Rng + ?Sized>(weights: &WeightSequence, c: f64, rng: &mut R) -> Result<Graph> {
    check_chung_lu(weights, c)?;
    let n = weights.len();
    let scale = c / weights.total();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = (scale * weights.get(u) * weights.get(v)).min(1.0);
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Chung–Lu sampler with the same distribution as [`sample_chung_lu_naive`],
/// in expected `O(n + m)` time: with weights sorted in decreasing order, the
/// pair probability only decreases along a row, so candidates are proposed
/// by geometric jumps under the current probability and thinned.
pub fn sample_chung_lu<R: Rng + ?Sized>(weights: &WeightSequence, c: f64, rng: &mut R) -> Result<Graph> {
    check_chung_lu(weights, c)?;
    let n = weights.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights.get(b).total_cmp(&weights.get(a)));
    let w: Vec<f64> = order.iter().map(|&v| weights.get(v)).collect();
    let scale = c / weights.total();
    let mut edges = Vec::new();
    for u in 0..n.saturating_sub(1) {
        let mut v = u + 1;
        let mut p = (scale * w[u] * w[v]).min(1.0);
        while v < n && p > 0.0 {
            if p < 1.0 {
                let skip = geometric_skip((-p).ln_1p(), rng);
                if skip >= (n - v) as f64 {
                    break;
                }
                v += skip as usize;
            }
            let q = (scale * w[u] * w[v]).min(1.0);
            if rng.gen::<f64>() < q / p {
                edges.push((order[u], order[v]));
            }
            p = q;
            v += 1;
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::weights::sample_power_law_weights;

    #[test]
    fn er_extremes() {
        let mut rng = rng_from_seed(1);
        assert_eq!(sample_erdos_renyi(50, 0.0, &mut rng).unwrap().m(), 0);
        assert_eq!(sample_erdos_renyi(50, 1.0, &mut rng).unwrap().m(), 50 * 49 / 2);
        assert!(sample_erdos_renyi(50, 1.5, &mut rng).is_err());
        assert_eq!(sample_erdos_renyi(1, 0.5, &mut rng).unwrap().m(), 0);
    }

    #[test]
    fn er_mean_edge_count() {
        // binomial(499500, 0.01): mean 4995, std of the mean over 100 runs ~ 7.03
        let mut rng = rng_from_seed(2);
        let runs = 100;
        let total: usize = (0..runs).map(|_| sample_erdos_renyi(1000, 0.01, &mut rng).unwrap().m()).sum();
        let mean = total as f64 / runs as f64;
        let sigma = (499_500.0f64 * 0.01 * 0.99).sqrt() / (runs as f64).sqrt();
        assert!((mean - 4995.0).abs() < 3.0 * sigma, "{mean}");
    }

    #[test]
    fn er_pair_frequencies_uniform() {
        let mut rng = rng_from_seed(3);
        let n = 8;
        let mut counts = vec![0usize; n * n];
        for _ in 0..20_000 {
            for (u, v) in sample_erdos_renyi(n, 0.3, &mut rng).unwrap().edges() {
                counts[u * n + v] += 1;
            }
        }
        for u in 0..n {
            for v in (u + 1)..n {
                let f = counts[u * n + v] as f64 / 20_000.0;
                assert!((f - 0.3).abs() < 0.02, "{u}-{v}: {f}");
            }
        }
    }

    #[test]
    fn ba_small_and_average_degree() {
        let mut rng = rng_from_seed(4);
        assert_eq!(sample_barabasi_albert(4, 3, &mut rng).unwrap(), Graph::complete(4));
        assert_eq!(sample_barabasi_albert(2, 1, &mut rng).unwrap(), Graph::complete(2));
        assert!(sample_barabasi_albert(3, 3, &mut rng).is_err());
        assert!(sample_barabasi_albert(3, 0, &mut rng).is_err());
        let g = sample_barabasi_albert(10_000, 3, &mut rng).unwrap();
        g.check_invariants().unwrap();
        let avg = g.average_degree();
        assert!((5.8..=6.0).contains(&avg), "{avg}");
    }

    #[test]
    fn ba_degree_tail_exponent() {
        let mut rng = rng_from_seed(5);
        let g = sample_barabasi_albert(100_000, 2, &mut rng).unwrap();
        let degrees: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
        let fit = crate::weights::fit_power_law_tail(&degrees).unwrap();
        assert!((2.6..=3.4).contains(&fit.tau), "{fit:?}");
    }

    #[test]
    fn chung_lu_clamp_and_pair() {
        let mut rng = rng_from_seed(6);
        let w = WeightSequence::new(vec![1.0; 10]).unwrap();
        assert_eq!(sample_chung_lu(&w, 10.0, &mut rng).unwrap().m(), 45);
        assert_eq!(sample_chung_lu_naive(&w, 10.0, &mut rng).unwrap().m(), 45);
        let w = WeightSequence::new(vec![1.0, 1.0]).unwrap();
        for sampler in [sample_chung_lu::<crate::seed::TaskRng>, sample_chung_lu_naive] {
            let hits = (0..20_000).filter(|_| sampler(&w, 0.5, &mut rng).unwrap().m() == 1).count();
            assert!((hits as f64 / 20_000.0 - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn chung_lu_fast_matches_pair_probabilities() {
        let mut rng = rng_from_seed(7);
        let w = sample_power_law_weights(12, 2.3, 1.0, &mut rng).unwrap();
        let c = 3.0;
        let runs = 20_000;
        let n = w.len();
        let mut counts = vec![0usize; n * n];
        for _ in 0..runs {
            for (u, v) in sample_chung_lu(&w, c, &mut rng).unwrap().edges() {
                counts[u * n + v] += 1;
            }
        }
        for u in 0..n {
            for v in (u + 1)..n {
                let p = (c * w.get(u) * w.get(v) / w.total()).min(1.0);
                let f = counts[u * n + v] as f64 / runs as f64;
                assert!((f - p).abs() < 0.03, "{u}-{v}: {f} vs {p}");
            }
        }
    }

    #[test]
    fn chung_lu_degree_proportional_to_weight() {
        let mut rng = rng_from_seed(8);
        let w = sample_power_law_weights(10_000, 2.5, 1.0, &mut rng).unwrap();
        let g = sample_chung_lu(&w, 1.0, &mut rng).unwrap();
        // least-squares slope of degree on weight through the origin, restricted
        // to weights where the clamp is inactive
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for v in 0..w.len() {
            let x = w.get(v);
            if x * w.max() / w.total() < 1.0 {
                sxy += x * g.degree(v) as f64;
                sxx += x * x;
            }
        }
        let slope = sxy / sxx;
        assert!((0.9..=1.1).contains(&slope), "{slope}");
    }
}
