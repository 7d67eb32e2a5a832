//! Parameter estimation against a target network.
//!
//! GIRGs have two free parameters once the weights are fixed: `c` mostly
//! controls the average degree and `alpha` mostly controls clustering. Both
//! maps are monotone, so each is found by bisection while the other is held
//! fixed, alternating until neither moves.
//!
//! On the torus the ball volume of the distance between two uniform points is
//! itself uniform on `[0, 1]`, whatever the Boolean distance. The expected
//! degree then has a closed form, so the `c` search needs no sampling there.

mod model;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::features::{largest_connected_component, mean_local_clustering};
use crate::geometry::Topology;
use crate::graph::Graph;
use crate::samplers::{
    sample_barabasi_albert, sample_boolean_girg, sample_chung_lu, sample_erdos_renyi, GirgParams,
};
use crate::seed::{derive_seed, rng_from_seed};
use crate::weights::{
    fit_power_law_tail, sample_power_law_weights, PowerLawFit, WeightSequence,
    DEFAULT_W_MIN,
};

pub use model::{Diagnostics, FittedModel, FittedParams, GirgModelConfig, ModelKind, ModelSpec, WeightMode};

pub const C_RANGE: (f64, f64) = (1.0 / 1_048_576.0, 1_048_576.0);
pub const MAX_BRACKET_DOUBLINGS: usize = 60;
pub const C_REL_TOL: f64 = 0.01;
pub const ALPHA_RANGE: (f64, f64) = (1.01, 32.0);
pub const CLUSTERING_TOL: f64 = 0.01;
pub const INITIAL_ALPHA: f64 = 1.5;
pub const INITIAL_C: f64 = 1.0;
pub const MAX_ROUNDS: usize = 10;
pub const ALPHA_STEP_TOL: f64 = 0.05;
pub const C_STEP_TOL: f64 = 0.01;
/// Tolerances behind the `converged` flag of a fitted model.
pub const DEGREE_ACCEPT: f64 = 0.05;
pub const CLUSTERING_ACCEPT: f64 = 0.02;
/// Exponent used when a target's degree tail cannot be fitted.
pub const FALLBACK_TAU: f64 = 2.5;
/// Sampled probes average over enough graphs to cover this many vertices,
/// which keeps clustering noise well below [`CLUSTERING_TOL`].
pub const PROBE_VERTICES: usize = 10_000;

const MAX_BISECTIONS: usize = 60;
const CHUNG_LU_ROUNDS: usize = 5;

/// Statistics of a target network's largest connected component.
#[derive(Debug, Clone)]
pub struct FitTargets {
    pub n: usize,
    pub avg_degree: f64,
    pub mean_local_clustering: f64,
    pub tau_fit: Option<PowerLawFit>,
    pub degree_sequence: Vec<usize>,
}

impl FitTargets {
    pub fn from_graph(graph: &Graph) -> Result<Self> {
        let lcc = largest_connected_component(graph).graph;
        if lcc.n() < 3 {
            return Err(Error::InsufficientData(format!(
                "largest component has {} vertices",
                lcc.n()
            )));
        }
        let degree_sequence = lcc.degrees();
        let as_f64: Vec<f64> = degree_sequence.iter().map(|&d| d as f64).collect();
        let tau_fit = match fit_power_law_tail(&as_f64) {
            Ok(fit) => Some(fit),
            Err(e) => {
                debug!("degree tail fit failed: {e}");
                None
            }
        };
        Ok(FitTargets {
            n: lcc.n(),
            avg_degree: lcc.average_degree(),
            mean_local_clustering: mean_local_clustering(&lcc),
            tau_fit,
            degree_sequence,
        })
    }

    /// Clipped fitted exponent, or [`FALLBACK_TAU`] without a fit.
    pub fn tau(&self) -> f64 {
        self.tau_fit.map_or(FALLBACK_TAU, |f| f.clipped_tau().0)
    }

    pub fn m(&self) -> usize {
        self.degree_sequence.iter().sum::<usize>() / 2
    }

    /// Weight sequence for `mode`: fresh power-law draws or the degrees.
    pub fn weights(&self, mode: WeightMode, seed: u64) -> Result<WeightSequence> {
        match mode {
            WeightMode::PowerLaw => {
                sample_power_law_weights(self.n, self.tau(), DEFAULT_W_MIN, &mut rng_from_seed(seed))
            }
            WeightMode::DegreeReplicating => {
                if let Some(v) = self.degree_sequence.iter().position(|&d| d == 0) {
                    return Err(Error::IsolatedVertex(v));
                }
                WeightSequence::new(self.degree_sequence.iter().map(|&d| d as f64).collect())
            }
        }
    }
}

/// Sorted weights with prefix sums of `w` and of `w^alpha` (the latter as
/// running log-sum-exp to avoid overflow for large `alpha`).
struct SortedWeights {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
    log_prefix_pow: Vec<f64>,
}

impl SortedWeights {
    fn new(weights: &WeightSequence, alpha: f64) -> Self {
        let mut sorted = weights.as_slice().to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        let mut log_prefix_pow = Vec::with_capacity(sorted.len() + 1);
        prefix.push(0.0);
        log_prefix_pow.push(f64::NEG_INFINITY);
        for &w in &sorted {
            prefix.push(prefix.last().unwrap() + w);
            let prev: f64 = *log_prefix_pow.last().unwrap();
            let term = alpha * w.ln();
            let (hi, lo) = if prev > term { (prev, term) } else { (term, prev) };
            log_prefix_pow.push(hi + (lo - hi).exp().ln_1p());
        }
        SortedWeights {
            sorted,
            prefix,
            log_prefix_pow,
        }
    }

    /// Number of weights strictly below `t`.
    fn below(&self, t: f64) -> usize {
        self.sorted.partition_point(|&w| w < t)
    }
}

/// Probability of an edge between two uniform torus points whose weight
/// ratio is `x = w_u w_v / W`.
fn pair_expectation(x: f64, c: f64, alpha: f64) -> f64 {
    let v0 = x * c.powf(1.0 / alpha);
    if v0 >= 1.0 {
        1.0
    } else {
        (alpha * v0 - c * x.powf(alpha)) / (alpha - 1.0)
    }
}

/// Expected average degree of a torus GIRG with the given weights, in
/// `O(n log n)`. The closed form holds for every Boolean distance on the torus.
pub fn expected_avg_degree_tgirg(params: &GirgParams, weights: &WeightSequence) -> Result<f64> {
    params.validate()?;
    if params.topology != Topology::Torus {
        return Err(Error::param("closed-form expected degree needs the torus topology"));
    }
    let (c, alpha) = (params.c, params.alpha);
    let n = weights.len();
    let total = weights.total();
    let sw = SortedWeights::new(weights, alpha);
    let root_c = c.powf(1.0 / alpha);
    let linear = root_c * alpha / ((alpha - 1.0) * total);
    let power = c / (alpha - 1.0);
    let mut sum = 0.0;
    for &w in &sw.sorted {
        // partners at or above the threshold are joined with probability 1
        let k = sw.below(total / (root_c * w));
        let unclamped = linear * w * sw.prefix[k]
            - power * (alpha * (w / total).ln() + sw.log_prefix_pow[k]).exp();
        sum += unclamped + (n - k) as f64 - pair_expectation(w * w / total, c, alpha);
    }
    Ok((sum / n as f64).max(0.0))
}

/// Expected average degree of a Chung–Lu graph, `(1/n) sum_{u != v} min{1, c w_u w_v / W}`.
pub fn expected_avg_degree_chung_lu(weights: &WeightSequence, c: f64) -> f64 {
    let n = weights.len();
    let total = weights.total();
    let sw = SortedWeights::new(weights, 1.0);
    let mut sum = 0.0;
    for &w in &sw.sorted {
        let k = sw.below(total / (c * w));
        sum += c * w / total * sw.prefix[k] + (n - k) as f64 - (c * w * w / total).min(1.0);
    }
    sum / n as f64
}

/// Result of a one-parameter search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub value: f64,
    /// Number of function evaluations.
    pub iterations: usize,
    /// Function value at `value`.
    pub achieved: f64,
    pub converged: bool,
}

/// Bisection for an increasing `f` on `[lo, hi]` (in the search variable).
/// `f` receives the point and the probe index.
fn bisect<F>(mut f: F, target: f64, mut lo: f64, mut hi: f64, close: impl Fn(f64) -> bool, min_width: f64) -> Result<SearchOutcome>
where
    F: FnMut(f64, usize) -> Result<f64>,
{
    let mut probes = 0;
    let mut best: Option<(f64, f64)> = None;
    let consider = |x: f64, fx: f64, best: &mut Option<(f64, f64)>| {
        if best.is_none_or(|(_, fb)| (fx - target).abs() < (fb - target).abs()) {
            *best = Some((x, fx));
        }
    };
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid, probes)?;
        probes += 1;
        consider(mid, fm, &mut best);
        if close(fm) {
            return Ok(SearchOutcome {
                value: mid,
                iterations: probes,
                achieved: fm,
                converged: true,
            });
        }
        if fm < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < min_width {
            break;
        }
    }
    let (x, fx) = best.expect("at least one probe");
    Ok(SearchOutcome {
        value: x,
        iterations: probes,
        achieved: fx,
        converged: close(fx),
    })
}

/// Finds `c` such that the average degree of the model matches the target
/// within 1% relative. Uses the closed form on the torus and one sampled
/// graph per probe (seeded by probe index) on the cube.
pub fn fit_c(params: &GirgParams, weights: &WeightSequence, target_avg_degree: f64, seed: u64) -> Result<SearchOutcome> {
    let n = weights.len();
    if !(target_avg_degree > 0.0 && target_avg_degree < (n - 1) as f64) {
        return Err(Error::param(format!(
            "target average degree {target_avg_degree} outside (0, {})",
            n - 1
        )));
    }
    let measure = |log_c: f64, probe: usize| -> Result<f64> {
        let p = params.with_c(log_c.exp2());
        match p.topology {
            Topology::Torus => expected_avg_degree_tgirg(&p, weights),
            Topology::Cube => {
                let mut rng = rng_from_seed(derive_seed(seed, "c-probe", &[probe as u64]));
                Ok(sample_boolean_girg(&p, weights, None, &mut rng)?.graph.average_degree())
            }
        }
    };
    search_c(measure, target_avg_degree)
}

/// Bracket expansion then bisection on `log2 c`.
fn search_c<F>(mut measure: F, target: f64) -> Result<SearchOutcome>
where
    F: FnMut(f64, usize) -> Result<f64>,
{
    let (mut lo, mut hi) = (C_RANGE.0.log2(), C_RANGE.1.log2());
    let mut probe = 0;
    let mut eval = |x: f64, probe: &mut usize| {
        let v = measure(x, *probe);
        *probe += 1;
        v
    };
    let mut doublings = 0;
    while eval(lo, &mut probe)? > target {
        lo -= 1.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::Search(format!("no c small enough for average degree {target}")));
        }
    }
    while eval(hi, &mut probe)? < target {
        hi += 1.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::Search(format!("no c large enough for average degree {target}")));
        }
    }
    let offset = probe;
    let outcome = bisect(
        |x, i| measure(x, offset + i),
        target,
        lo,
        hi,
        |v| (v - target).abs() <= C_REL_TOL * target,
        1e-9,
    )?;
    Ok(SearchOutcome {
        value: outcome.value.exp2(),
        iterations: outcome.iterations + offset,
        ..outcome
    })
}

/// Mean local clustering of the largest component, together with the
/// whole-graph and component average degree, averaged over
/// `ceil(PROBE_VERTICES / n)` sampled graphs.
#[derive(Debug, Clone, Copy)]
struct SampleStats {
    clustering: f64,
    avg_degree: f64,
    lcc_avg_degree: f64,
}

fn sample_stats(params: &GirgParams, weights: &WeightSequence, seed: u64) -> Result<SampleStats> {
    let reps = PROBE_VERTICES.div_ceil(weights.len().max(1));
    let mut acc = SampleStats {
        clustering: 0.0,
        avg_degree: 0.0,
        lcc_avg_degree: 0.0,
    };
    for i in 0..reps {
        let s = if i == 0 { seed } else { derive_seed(seed, "replica", &[i as u64]) };
        let g = sample_boolean_girg(params, weights, None, &mut rng_from_seed(s))?.graph;
        let one = graph_stats(&g);
        acc.clustering += one.clustering / reps as f64;
        acc.avg_degree += one.avg_degree / reps as f64;
        acc.lcc_avg_degree += one.lcc_avg_degree / reps as f64;
    }
    Ok(acc)
}

fn graph_stats(g: &Graph) -> SampleStats {
    let lcc = largest_connected_component(g).graph;
    SampleStats {
        clustering: mean_local_clustering(&lcc),
        avg_degree: g.average_degree(),
        lcc_avg_degree: lcc.average_degree(),
    }
}

/// Finds `alpha` in `(1, 32]` matching the target mean local clustering
/// within 0.01, measuring one sampled graph per probe. An unattainable
/// target yields the nearest boundary with `converged = false`.
pub fn fit_alpha(params: &GirgParams, weights: &WeightSequence, target_clustering: f64, seed: u64) -> Result<SearchOutcome> {
    search_alpha(|alpha| Ok(params.with_alpha(alpha)), weights, target_clustering, seed)
}

/// Like [`fit_alpha`], but every probe first rescales `c` so the expected
/// average degree stays at `goal_degree`. With `c` fixed, clustering is not
/// monotone in `alpha`: near `alpha = 1` the graph turns dense and clustering
/// rises again. At fixed degree the dependence is monotone.
///
/// The rescaled `c` is `kappa` times the closed-form torus solution, so a
/// correction found by a sampled cube search carries over.
pub fn fit_alpha_at_degree(
    params: &GirgParams,
    weights: &WeightSequence,
    target_clustering: f64,
    goal_degree: f64,
    kappa: f64,
    seed: u64,
) -> Result<SearchOutcome> {
    let torus = params.with_topology(Topology::Torus);
    search_alpha(
        |alpha| {
            let t = torus.with_alpha(alpha);
            let c = search_c(|log_c, _| expected_avg_degree_tgirg(&t.with_c(log_c.exp2()), weights), goal_degree)?;
            Ok(params.with_alpha(alpha).with_c(c.value * kappa))
        },
        weights,
        target_clustering,
        seed,
    )
}

fn search_alpha<P>(probe_params: P, weights: &WeightSequence, target_clustering: f64, seed: u64) -> Result<SearchOutcome>
where
    P: Fn(f64) -> Result<GirgParams>,
{
    if !(target_clustering > 0.0 && target_clustering < 1.0) {
        return Err(Error::param(format!("target clustering {target_clustering} outside (0, 1)")));
    }
    let measure = |t: f64, probe: usize| -> Result<f64> {
        let alpha = 1.0 + t.exp();
        let s = derive_seed(seed, "alpha-probe", &[probe as u64]);
        Ok(sample_stats(&probe_params(alpha)?, weights, s)?.clustering)
    };
    let (lo, hi) = ((ALPHA_RANGE.0 - 1.0).ln(), (ALPHA_RANGE.1 - 1.0).ln());
    let close = |v: f64| (v - target_clustering).abs() <= CLUSTERING_TOL;
    // boundaries use their own probe indices past any bisection step
    let top = measure(hi, MAX_BISECTIONS)?;
    if top < target_clustering && !close(top) {
        return Ok(SearchOutcome {
            value: ALPHA_RANGE.1,
            iterations: 1,
            achieved: top,
            converged: false,
        });
    }
    let bottom = measure(lo, MAX_BISECTIONS + 1)?;
    if bottom > target_clustering && !close(bottom) {
        return Ok(SearchOutcome {
            value: ALPHA_RANGE.0,
            iterations: 2,
            achieved: bottom,
            converged: false,
        });
    }
    let outcome = bisect(measure, target_clustering, lo, hi, close, 1e-4)?;
    Ok(SearchOutcome {
        value: 1.0 + outcome.value.exp(),
        iterations: outcome.iterations + 2,
        ..outcome
    })
}

/// The weight sequence [`fit_girg`] holds fixed while fitting with `seed`.
pub fn fitting_weights(targets: &FitTargets, mode: WeightMode, seed: u64) -> Result<WeightSequence> {
    targets.weights(mode, derive_seed(seed, "weights", &[]))
}

/// Alternating `alpha` / `c` fit for one GIRG family. Never fails on
/// non-convergence; that is reported in the diagnostics.
pub fn fit_girg(id: &str, targets: &FitTargets, config: &GirgModelConfig, seed: u64) -> Result<FittedModel> {
    let weights = fitting_weights(targets, config.weights, seed)?;
    let mut params = GirgParams::new(targets.tau(), INITIAL_ALPHA, INITIAL_C, config.topology, config.spec.clone())?;
    let mut iterations = 0;
    let mut loop_converged = false;
    // the targets describe a largest component; the searches work on whole graphs
    let mut degree_ratio = 1.0;
    // sampled c over closed-form torus c; stays 1 on the torus
    let mut kappa = 1.0;
    let cap = (weights.len() - 2) as f64;
    for round in 0..MAX_ROUNDS {
        let goal = (targets.avg_degree * degree_ratio).min(cap);
        let a = fit_alpha_at_degree(
            &params,
            &weights,
            targets.mean_local_clustering,
            goal,
            kappa,
            derive_seed(seed, "alpha", &[]),
        )?;
        iterations += a.iterations;
        let with_alpha = params.with_alpha(a.value);
        let probe = sample_stats(&with_alpha, &weights, derive_seed(seed, "ratio", &[round as u64]))?;
        if probe.lcc_avg_degree > 0.0 {
            degree_ratio = probe.avg_degree / probe.lcc_avg_degree;
        }
        let goal = (targets.avg_degree * degree_ratio).min(cap);
        let c = fit_c(&with_alpha, &weights, goal, derive_seed(seed, "c", &[]))?;
        iterations += c.iterations;
        if config.topology != Topology::Torus {
            let t = with_alpha.with_topology(Topology::Torus);
            let analytic = search_c(|log_c, _| expected_avg_degree_tgirg(&t.with_c(log_c.exp2()), &weights), goal)?;
            kappa = c.value / analytic.value;
        }
        let next = with_alpha.with_c(c.value);
        let settled = (next.alpha - params.alpha).abs() <= ALPHA_STEP_TOL
            && (next.c - params.c).abs() <= C_STEP_TOL * params.c;
        debug!("{id} round {round}: alpha {:.4}, c {:.6}", next.alpha, next.c);
        params = next;
        if settled {
            loop_converged = true;
            break;
        }
    }
    let achieved = sample_stats(&params, &weights, derive_seed(seed, "final", &[]))?;
    let diagnostics = diagnostics(targets, iterations, achieved, loop_converged);
    if !diagnostics.converged {
        warn!(
            "{id}: fit did not converge (degree {:.3} vs {:.3}, clustering {:.4} vs {:.4})",
            diagnostics.achieved_avg_degree,
            diagnostics.target_avg_degree,
            diagnostics.achieved_clustering,
            diagnostics.target_clustering
        );
    }
    Ok(FittedModel {
        id: id.to_string(),
        n: targets.n,
        params: FittedParams::Girg {
            params,
            weights: config.weights,
        },
        diagnostics,
    })
}

fn within_tolerance(targets: &FitTargets, achieved: SampleStats) -> bool {
    (achieved.lcc_avg_degree - targets.avg_degree).abs() <= DEGREE_ACCEPT * targets.avg_degree
        && (achieved.clustering - targets.mean_local_clustering).abs() <= CLUSTERING_ACCEPT
}

fn diagnostics(targets: &FitTargets, iterations: usize, achieved: SampleStats, loop_converged: bool) -> Diagnostics {
    Diagnostics {
        iterations,
        target_avg_degree: targets.avg_degree,
        target_clustering: targets.mean_local_clustering,
        achieved_avg_degree: achieved.lcc_avg_degree,
        achieved_clustering: achieved.clustering,
        converged: loop_converged && within_tolerance(targets, achieved),
    }
}

/// Erdős–Rényi `p = 2m / (n (n - 1))`.
pub fn erdos_renyi_p(n: usize, m: usize) -> f64 {
    2.0 * m as f64 / (n as f64 * (n as f64 - 1.0))
}

/// Barabási–Albert `k = round(avg_degree / 2)`, at least 1.
pub fn barabasi_albert_k(avg_degree: f64) -> usize {
    ((avg_degree / 2.0).round() as usize).max(1)
}

/// Chung–Lu `c` matching an expected average degree via the closed form.
pub fn fit_chung_lu_c(weights: &WeightSequence, target_avg_degree: f64) -> Result<SearchOutcome> {
    let n = weights.len();
    if !(target_avg_degree > 0.0 && target_avg_degree < (n - 1) as f64) {
        return Err(Error::param(format!(
            "target average degree {target_avg_degree} outside (0, {})",
            n - 1
        )));
    }
    search_c(|log_c, _| Ok(expected_avg_degree_chung_lu(weights, log_c.exp2())), target_avg_degree)
}

/// Fits one baseline model.
pub fn fit_baseline(id: &str, kind: &ModelKind, targets: &FitTargets, seed: u64) -> Result<FittedModel> {
    let n = targets.n;
    let (params, iterations, converged) = match kind {
        ModelKind::ErdosRenyi => (FittedParams::ErdosRenyi { p: erdos_renyi_p(n, targets.m()) }, 0, true),
        ModelKind::BarabasiAlbert => (
            FittedParams::BarabasiAlbert {
                k: barabasi_albert_k(targets.avg_degree).min(n - 1),
            },
            0,
            true,
        ),
        ModelKind::ChungLu(mode) => {
            let weights = targets.weights(*mode, derive_seed(seed, "weights", &[]))?;
            let mut ratio = 1.0;
            let mut iterations = 0;
            let mut c = INITIAL_C;
            let mut converged = false;
            for round in 0..CHUNG_LU_ROUNDS {
                let goal = (targets.avg_degree * ratio).min((n - 2) as f64);
                let fit = fit_chung_lu_c(&weights, goal)?;
                iterations += fit.iterations;
                let settled = round > 0 && (fit.value - c).abs() <= C_STEP_TOL * c;
                c = fit.value;
                converged = fit.converged;
                if settled {
                    break;
                }
                let g = sample_chung_lu(&weights, c, &mut rng_from_seed(derive_seed(seed, "ratio", &[round as u64])))?;
                let s = graph_stats(&g);
                if s.lcc_avg_degree > 0.0 {
                    ratio = s.avg_degree / s.lcc_avg_degree;
                }
            }
            (
                FittedParams::ChungLu {
                    c,
                    tau: targets.tau(),
                    weights: *mode,
                },
                iterations,
                converged,
            )
        }
        ModelKind::Girg(_) => return Err(Error::param(format!("{id} is not a baseline model"))),
    };
    let mut model = FittedModel {
        id: id.to_string(),
        n,
        params,
        diagnostics: Diagnostics {
            iterations,
            target_avg_degree: targets.avg_degree,
            target_clustering: targets.mean_local_clustering,
            achieved_avg_degree: f64::NAN,
            achieved_clustering: f64::NAN,
            converged,
        },
    };
    let sample = generate(&model, targets, derive_seed(seed, "final", &[]))?;
    let achieved = graph_stats(&sample);
    model.diagnostics.achieved_avg_degree = achieved.lcc_avg_degree;
    model.diagnostics.achieved_clustering = achieved.clustering;
    Ok(model)
}

/// ER, BA, CL and CL-c fits for one target.
pub fn fit_baselines(targets: &FitTargets, seed: u64) -> Result<Vec<FittedModel>> {
    ["ER", "BA", "CL", "CL-c"]
        .iter()
        .map(|id| {
            let spec = ModelSpec::from_id(id)?;
            fit_baseline(id, &spec.kind, targets, derive_seed(seed, id, &[]))
        })
        .collect()
}

/// Fits any model to a target.
pub fn fit_model(spec: &ModelSpec, targets: &FitTargets, seed: u64) -> Result<FittedModel> {
    match &spec.kind {
        ModelKind::Girg(config) => fit_girg(&spec.id, targets, config, seed),
        other => fit_baseline(&spec.id, other, targets, seed),
    }
}

/// Draws one synthetic graph from a fitted model. Power-law weights are drawn
/// afresh from `seed`; degree-replicating weights come from the targets.
pub fn generate(model: &FittedModel, targets: &FitTargets, seed: u64) -> Result<Graph> {
    let mut rng = rng_from_seed(derive_seed(seed, "generate", &[]));
    let weight_seed = derive_seed(seed, "generate-weights", &[]);
    match &model.params {
        FittedParams::Girg { params, weights } => {
            let w = generation_weights(model, targets, *weights, weight_seed)?;
            Ok(sample_boolean_girg(params, &w, None, &mut rng)?.graph)
        }
        FittedParams::ErdosRenyi { p } => sample_erdos_renyi(model.n, *p, &mut rng),
        FittedParams::BarabasiAlbert { k } => sample_barabasi_albert(model.n, *k, &mut rng),
        FittedParams::ChungLu { c, weights, .. } => {
            let w = generation_weights(model, targets, *weights, weight_seed)?;
            sample_chung_lu(&w, *c, &mut rng)
        }
    }
}

fn generation_weights(model: &FittedModel, targets: &FitTargets, mode: WeightMode, seed: u64) -> Result<WeightSequence> {
    if targets.n != model.n {
        return Err(Error::param(format!(
            "model was fitted for n = {}, targets have n = {}",
            model.n, targets.n
        )));
    }
    targets.weights(mode, seed)
}
