//! Soft-margin SVM with a Gaussian RBF kernel, trained by sequential minimal
//! optimisation with maximal-violating-pair working set selection.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub const KKT_TOLERANCE: f64 = 1e-3;
pub const MAX_UPDATES: usize = 100_000;
/// Kernel row cache budget in bytes.
const CACHE_BYTES: usize = 64 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for every support vector, with `y_i` in `{-1, +1}`.
    pub dual_coefficients: Vec<f64>,
    /// Decision function is `sum coef_i K(sv_i, x) - rho`.
    pub rho: f64,
    pub gamma: f64,
    pub c_box: f64,
    /// Maximal KKT violation at termination.
    pub kkt_gap: f64,
    pub updates: usize,
    pub converged: bool,
}

#[inline]
pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

impl SvmModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(sv, &coef)| coef * rbf(sv, x, self.gamma))
            .sum::<f64>()
            - self.rho
    }

    /// Label 1 for a positive decision value, else 0.
    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.decision(x) > 0.0)
    }
}

/// Least-recently-used cache of kernel rows.
struct KernelCache<'a> {
    x: &'a [Vec<f64>],
    gamma: f64,
    rows: Vec<Option<Vec<f64>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    fn new(x: &'a [Vec<f64>], gamma: f64) -> Self {
        let n = x.len();
        let capacity = (CACHE_BYTES / (8 * n.max(1))).clamp(2, n.max(2));
        KernelCache {
            x,
            gamma,
            rows: vec![None; n],
            order: VecDeque::new(),
            capacity,
        }
    }

    fn row(&mut self, i: usize) -> &[f64] {
        if self.rows[i].is_some() {
            if let Some(pos) = self.order.iter().position(|&r| r == i) {
                self.order.remove(pos);
            }
        } else {
            if self.order.len() >= self.capacity {
                if let Some(old) = self.order.pop_front() {
                    self.rows[old] = None;
                }
            }
            let xi = &self.x[i];
            self.rows[i] = Some(self.x.iter().map(|xj| rbf(xi, xj, self.gamma)).collect());
        }
        self.order.push_back(i);
        self.rows[i].as_deref().unwrap()
    }
}

/// Trains on rows `x` with labels in `{0, 1}`.
pub fn train_svm_rbf(x: &[Vec<f64>], labels: &[u8], c_box: f64, gamma: f64) -> Result<SvmModel> {
    let n = x.len();
    if labels.len() != n {
        return Err(Error::param(format!("{n} rows but {} labels", labels.len())));
    }
    if !(c_box > 0.0 && gamma > 0.0) {
        return Err(Error::param("C and gamma must be positive"));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    if positives == 0 || positives == n {
        return Err(Error::Degenerate("training data has a single class".into()));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::param("labels must be 0 or 1"));
    }
    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut cache = KernelCache::new(x, gamma);
    let at_upper = |a: f64| a >= c_box;
    let at_lower = |a: f64| a <= 0.0;

    let mut updates = 0;
    let mut gap;
    loop {
        // i maximises -y G over I_up, j minimises it over I_low
        let mut i = usize::MAX;
        let mut g_max = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let up = if y[t] > 0.0 { !at_upper(alpha[t]) } else { !at_lower(alpha[t]) };
            let low = if y[t] > 0.0 { !at_lower(alpha[t]) } else { !at_upper(alpha[t]) };
            if up && v > g_max {
                g_max = v;
                i = t;
            }
            if low && v < g_min {
                g_min = v;
                j = t;
            }
        }
        gap = g_max - g_min;
        if gap <= KKT_TOLERANCE || i == usize::MAX || j == usize::MAX || updates >= MAX_UPDATES {
            break;
        }
        updates += 1;

        let k_ii = 1.0;
        let k_jj = 1.0;
        let k_ij = cache.row(i)[j];
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (k_ii + k_jj + 2.0 * k_ij * (y[i] * y[j])).max(1e-12);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c_box {
                    alpha[i] = c_box;
                    alpha[j] = c_box - diff;
                }
            } else if alpha[j] > c_box {
                alpha[j] = c_box;
                alpha[i] = c_box + diff;
            }
        } else {
            let quad = (k_ii + k_jj - 2.0 * k_ij).max(1e-12);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c_box {
                if alpha[i] > c_box {
                    alpha[i] = c_box;
                    alpha[j] = sum - c_box;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c_box {
                if alpha[j] > c_box {
                    alpha[j] = c_box;
                    alpha[i] = sum - c_box;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (d_i, d_j) = ((alpha[i] - old_i) * y[i], (alpha[j] - old_j) * y[j]);
        let row_i = cache.row(i).to_vec();
        let row_j = cache.row(j);
        for t in 0..n {
            // Q_ti = y_t y_i K_ti; summing the two terms first keeps the
            // update symmetric in (i, j)
            grad[t] += y[t] * (row_i[t] * d_i + row_j[t] * d_j);
        }
    }

    let mut upper_bound = f64::INFINITY;
    let mut lower_bound = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if at_upper(alpha[t]) {
            if y[t] < 0.0 {
                upper_bound = upper_bound.min(yg);
            } else {
                lower_bound = lower_bound.max(yg);
            }
        } else if at_lower(alpha[t]) {
            if y[t] > 0.0 {
                upper_bound = upper_bound.min(yg);
            } else {
                lower_bound = lower_bound.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (upper_bound + lower_bound) / 2.0
    };
    let (support_vectors, dual_coefficients) = (0..n)
        .filter(|&t| alpha[t] > 0.0)
        .map(|t| (x[t].clone(), alpha[t] * y[t]))
        .unzip();
    Ok(SvmModel {
        support_vectors,
        dual_coefficients,
        rho,
        gamma,
        c_box,
        kkt_gap: gap.max(0.0),
        updates,
        converged: gap <= KKT_TOLERANCE,
    })
}
