//! Power-law weights, power-law tail fitting and degree-replicating weights.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_W_MIN: f64 = 1.0;
pub const MIN_FIT_VALUES: usize = 50;
pub const MIN_TAIL_SIZE: usize = 10;
/// Range that fitted exponents are clipped to before being used as `tau`.
pub const TAU_CLIP: (f64, f64) = (2.05, 2.95);

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    weights: Vec<f64>,
    total: f64,
}

impl WeightSequence {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("weight sequence is empty"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::param(format!("weights must be positive and finite, got {w}")));
        }
        let total = weights.iter().sum();
        Ok(WeightSequence { weights, total })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, v: usize) -> f64 {
        self.weights[v]
    }

    /// Sum of all weights, `W`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn min(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub tau: f64,
    pub x_min: f64,
    pub ks_distance: f64,
    pub tail_size: usize,
}

impl PowerLawFit {
    /// Exponent clipped into [`TAU_CLIP`] plus whether clipping happened.
    pub fn clipped_tau(&self) -> (f64, bool) {
        let clipped = self.tau.clamp(TAU_CLIP.0, TAU_CLIP.1);
        (clipped, clipped != self.tau)
    }
}

/// Inverse-CDF Pareto sampling: `w_min * U^(-1/(tau - 1))` with `U` uniform on `(0, 1]`.
pub fn pareto_from_uniform(u: f64, tau: f64, w_min: f64) -> f64 {
    w_min * u.powf(-1.0 / (tau - 1.0))
}

pub fn sample_power_law_weights<R: Rng + ?Sized>(
    n: usize,
    tau: f64,
    w_min: f64,
    rng: &mut R,
) -> Result<WeightSequence> {
    if n < 1 {
        return Err(Error::param("need at least one weight"));
    }
    if !(tau > 2.0) || !tau.is_finite() {
        return Err(Error::param(format!("power-law exponent must exceed 2, got {tau}")));
    }
    if !(w_min > 0.0) || !w_min.is_finite() {
        return Err(Error::param(format!("w_min must be positive, got {w_min}")));
    }
    let weights = (0..n)
        .map(|_| {
            // gen::<f64>() is in [0, 1); flip it to (0, 1]
            let u = 1.0 - rng.gen::<f64>();
            pareto_from_uniform(u, tau, w_min)
        })
        .collect();
    WeightSequence::new(weights)
}

/// Continuous power-law tail fit: MLE exponent for every candidate `x_min`
/// (each distinct value), choosing the candidate with the smallest
/// Kolmogorov-Smirnov distance on `[x_min, inf)`. Ties go to the smaller `x_min`.
pub fn fit_power_law_tail(values: &[f64]) -> Result<PowerLawFit> {
    if values.len() < MIN_FIT_VALUES {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs at least {MIN_FIT_VALUES} values, got {}",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::param(format!("power-law fit needs positive values, got {v}")));
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    if xs[0] == xs[xs.len() - 1] {
        return Err(Error::Degenerate("all values are equal".into()));
    }
    let n = xs.len();
    let logs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + logs[i];
    }

    let mut best: Option<PowerLawFit> = None;
    let mut k = 0;
    while k < n {
        let m = n - k;
        if m < MIN_TAIL_SIZE {
            break;
        }
        let log_xmin = logs[k];
        let log_sum = suffix[k] - m as f64 * log_xmin;
        let next = k + xs[k..].partition_point(|&x| x == xs[k]);
        if log_sum > 0.0 {
            let tau = 1.0 + m as f64 / log_sum;
            let bound = best.map_or(f64::INFINITY, |b| b.ks_distance);
            if let Some(ks) = tail_ks(&logs[k..], log_xmin, tau, bound) {
                best = Some(PowerLawFit {
                    tau,
                    x_min: xs[k],
                    ks_distance: ks,
                    tail_size: m,
                });
            }
        }
        k = next;
    }
    best.ok_or_else(|| {
        Error::InsufficientData(format!("no candidate x_min leaves a tail of at least {MIN_TAIL_SIZE} values"))
    })
}

/// KS distance of a sorted tail against the power-law CDF, or `None` as soon
/// as it is known not to beat `bound` strictly.
fn tail_ks(tail_logs: &[f64], log_xmin: f64, tau: f64, bound: f64) -> Option<f64> {
    let m = tail_logs.len();
    let gap = |i: usize| {
        let cdf = 1.0 - ((1.0 - tau) * (tail_logs[i] - log_xmin)).exp();
        let hi = (i + 1) as f64 / m as f64;
        let lo = i as f64 / m as f64;
        (hi - cdf).abs().max((lo - cdf).abs())
    };
    // a strided pass gives a cheap lower bound that rejects most candidates
    let stride = (m / 256).max(1);
    if stride > 1 {
        let mut sup = 0.0f64;
        for i in (0..m).step_by(stride) {
            sup = sup.max(gap(i));
            if sup >= bound {
                return None;
            }
        }
    }
    let mut sup = 0.0f64;
    for i in 0..m {
        sup = sup.max(gap(i));
        if sup >= bound {
            return None;
        }
    }
    Some(sup)
}

/// Degree sequence as weights; requires every vertex to have degree at least 1.
pub fn degree_replicating_weights(graph: &Graph) -> Result<WeightSequence> {
    if let Some(v) = (0..graph.n()).find(|&v| graph.degree(v) == 0) {
        return Err(Error::IsolatedVertex(v));
    }
    WeightSequence::new(graph.degrees().into_iter().map(|d| d as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{cycle, star};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_cdf_boundary() {
        assert_eq!(pareto_from_uniform(1.0, 2.5, 1.0), 1.0);
        assert_eq!(pareto_from_uniform(1.0, 2.7, 3.0), 3.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_power_law_weights(10, 2.0, 1.0, &mut rng).is_err());
        assert!(sample_power_law_weights(10, 1.5, 1.0, &mut rng).is_err());
        assert!(sample_power_law_weights(0, 2.5, 1.0, &mut rng).is_err());
        assert!(sample_power_law_weights(10, 2.5, 0.0, &mut rng).is_err());
        assert!(WeightSequence::new(vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn pareto_tail_probability() {
        // P(W > 10) = 10^(-(tau-1)) = 10^-1.5
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = sample_power_law_weights(100_000, 2.5, 1.0, &mut rng).unwrap();
        let frac = w.as_slice().iter().filter(|&&x| x > 10.0).count() as f64 / 1e5;
        assert!((frac - 10f64.powf(-1.5)).abs() < 0.003, "{frac}");
        assert!(w.min() >= 1.0);
        let sum: f64 = w.as_slice().iter().sum();
        assert!((w.total() - sum).abs() <= 1e-9 * sum);
    }

    #[test]
    fn pareto_sample_mean() {
        // mean (tau-1)/(tau-2) = 3 for tau = 2.5
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let w = sample_power_law_weights(1_000_000, 2.5, 1.0, &mut rng).unwrap();
        let mean = w.total() / w.len() as f64;
        assert!((mean - 3.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn generated_weights_match_pareto_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let w = sample_power_law_weights(100_000, 2.5, 1.0, &mut rng).unwrap();
        let mut xs = w.as_slice().to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let cdf = 1.0 - x.powf(-1.5);
                ((i + 1) as f64 / n - cdf).abs().max((i as f64 / n - cdf).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks <= 0.01, "{ks}");
    }

    #[test]
    fn fit_recovers_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let w = sample_power_law_weights(100_000, 2.5, 1.0, &mut rng).unwrap();
        let fit = fit_power_law_tail(w.as_slice()).unwrap();
        assert!((2.4..=2.6).contains(&fit.tau), "{fit:?}");
        assert!(fit.tail_size >= MIN_TAIL_SIZE);
        assert!((0.0..=1.0).contains(&fit.ks_distance));
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_power_law_tail(&[5.0; 60]), Err(Error::Degenerate(_))));
        assert!(matches!(fit_power_law_tail(&[1.0, 2.0]), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn fit_finds_tail_threshold_in_mixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut values: Vec<f64> = (0..5000).map(|_| rng.gen_range(1.0..10.0)).collect();
        let tail = sample_power_law_weights(5000, 2.5, 10.0, &mut rng).unwrap();
        values.extend_from_slice(tail.as_slice());
        let fit = fit_power_law_tail(&values).unwrap();
        assert!((8.0..=13.0).contains(&fit.x_min), "{fit:?}");
    }

    #[test]
    fn tail_size_counts_values_above_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let w = sample_power_law_weights(2000, 2.3, 1.0, &mut rng).unwrap();
        let fit = fit_power_law_tail(w.as_slice()).unwrap();
        let count = w.as_slice().iter().filter(|&&x| x >= fit.x_min).count();
        assert_eq!(count, fit.tail_size);
    }

    #[test]
    fn clipping() {
        let fit = PowerLawFit {
            tau: 3.4,
            x_min: 1.0,
            ks_distance: 0.1,
            tail_size: 20,
        };
        assert_eq!(fit.clipped_tau(), (2.95, true));
        let fit = PowerLawFit { tau: 2.5, ..fit };
        assert_eq!(fit.clipped_tau(), (2.5, false));
    }

    #[test]
    fn degree_weights() {
        let w = degree_replicating_weights(&cycle(5)).unwrap();
        assert_eq!(w.as_slice(), &[2.0; 5]);
        assert_eq!(w.total(), 10.0);
        let w = degree_replicating_weights(&star(4)).unwrap();
        assert_eq!(w.as_slice(), &[4.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(w.total(), 8.0);
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(degree_replicating_weights(&g), Err(Error::IsolatedVertex(2))));
    }
}
