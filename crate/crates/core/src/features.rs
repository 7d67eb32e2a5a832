//! Graph features computed on the largest connected component.
//!
//! Single-value features: `n`, `m`, `tau`, `diam`, `eff-diam`. Node
//! distributions (k-core number, local clustering, Katz, betweenness,
//! closeness, degree) are summarised by mean, median, first and third
//! quartile and population standard deviation, keyed `"{dist}-{stat}"`.
//!
//! Closeness is the *average distance* to all other vertices, not its
//! reciprocal: larger values mean more peripheral vertices.

use std::collections::VecDeque;

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::rng_from_seed;
use crate::stats::{mean, population_std, quantile_sorted};
use crate::weights::{fit_power_law_tail, PowerLawFit};

/// Above this size the standalone effective diameter uses sampled sources.
pub const EXACT_HISTOGRAM_LIMIT: usize = 20_000;
pub const SAMPLED_SOURCES: usize = 1_000;

pub const SINGLE_FEATURES: [&str; 5] = ["n", "m", "tau", "diam", "eff-diam"];
pub const DISTRIBUTIONS: [&str; 6] = ["k-core", "LCC", "Katz", "betw", "close", "degree"];
pub const SUMMARIES: [&str; 5] = ["mean", "median", "q1", "q3", "std"];

const KATZ_DAMPING: f64 = 0.9;
const KATZ_TOL: f64 = 1e-8;
const KATZ_MAX_ITER: usize = 1_000;
const POWER_ITERATIONS: usize = 100;
const SOURCE_CHUNKS: usize = 32;

/// Largest connected component with the original id of every new vertex.
#[derive(Debug, Clone)]
pub struct Component {
    pub graph: Graph,
    pub original: Vec<usize>,
}

/// Largest component, ties broken towards the component holding the
/// smallest vertex id. Vertices keep their relative order.
pub fn largest_connected_component(graph: &Graph) -> Component {
    let (labels, count) = graph.components();
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    // labels are numbered by smallest vertex, so the first maximum wins ties
    let best = (0..count).fold(0, |best, l| if sizes[l] > sizes[best] { l } else { best });
    let keep: Vec<usize> = (0..graph.n()).filter(|&v| labels[v] == best).collect();
    Component {
        graph: graph.induced_subgraph(&keep),
        original: keep,
    }
}

/// Fraction of connected neighbour pairs; 0 for vertices of degree below 2.
pub fn local_clustering_coefficients(graph: &Graph) -> Vec<f64> {
    let triangles = triangle_counts(graph);
    (0..graph.n())
        .map(|v| {
            let d = graph.degree(v) as f64;
            if d < 2.0 {
                0.0
            } else {
                triangles[v] as f64 / (d * (d - 1.0) / 2.0)
            }
        })
        .collect()
}

pub fn mean_local_clustering(graph: &Graph) -> f64 {
    mean(&local_clustering_coefficients(graph))
}

/// Triangles through each vertex, via degree-ordered edge orientation.
fn triangle_counts(graph: &Graph) -> Vec<u64> {
    let n = graph.n();
    let rank_less = |a: usize, b: usize| (graph.degree(a), a) < (graph.degree(b), b);
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|v| graph.neighbors(v).iter().copied().filter(|&u| rank_less(v, u)).collect())
        .collect();
    let mut count = vec![0u64; n];
    let mut mark = vec![usize::MAX; n];
    for v in 0..n {
        for &u in &forward[v] {
            mark[u] = v;
        }
        for &u in &forward[v] {
            for &w in &forward[u] {
                if mark[w] == v {
                    count[v] += 1;
                    count[u] += 1;
                    count[w] += 1;
                }
            }
        }
    }
    count
}

/// Core number of every vertex by bucket peeling in `O(n + m)`.
pub fn kcore_numbers(graph: &Graph) -> Vec<usize> {
    let n = graph.n();
    let mut degree = graph.degrees();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        order[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for i in 0..n {
        let v = order[i];
        for &u in graph.neighbors(v) {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree
}

/// Results of one BFS from every vertex.
#[derive(Debug, Clone)]
pub struct ShortestPathStats {
    /// Unnormalised betweenness, each unordered pair counted once.
    pub betweenness: Vec<f64>,
    /// Average distance to the other vertices.
    pub closeness: Vec<f64>,
    /// `histogram[h]` is the number of unordered pairs at distance `h`.
    pub histogram: Vec<u64>,
}

impl ShortestPathStats {
    pub fn diameter(&self) -> usize {
        self.histogram.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    pub fn effective_diameter(&self) -> usize {
        effective_from_histogram(&self.histogram)
    }
}

struct Partial {
    betweenness: Vec<f64>,
    distance_sums: Vec<u64>,
    histogram: Vec<u64>,
}

/// Brandes' accumulation plus distance sums and the distance histogram.
/// Sources are split into a fixed number of chunks whose partial results are
/// added in chunk order, so the output does not depend on thread scheduling.
pub fn shortest_path_stats(graph: &Graph) -> Result<ShortestPathStats> {
    let n = graph.n();
    if n >= 2 && !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let chunk = n.div_ceil(SOURCE_CHUNKS).max(1);
    let partials: Vec<Partial> = (0..n.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut part = Partial {
                betweenness: vec![0.0; n],
                distance_sums: vec![0; n],
                histogram: Vec::new(),
            };
            let mut work = BrandesWork::new(n);
            for s in c * chunk..((c + 1) * chunk).min(n) {
                work.run(graph, s, &mut part);
            }
            part
        })
        .collect();
    let mut betweenness = vec![0.0; n];
    let mut sums = vec![0u64; n];
    let mut histogram: Vec<u64> = Vec::new();
    for p in partials {
        for (b, x) in betweenness.iter_mut().zip(&p.betweenness) {
            *b += x;
        }
        for (s, x) in sums.iter_mut().zip(&p.distance_sums) {
            *s += x;
        }
        if histogram.len() < p.histogram.len() {
            histogram.resize(p.histogram.len(), 0);
        }
        for (h, x) in histogram.iter_mut().zip(&p.histogram) {
            *h += x;
        }
    }
    for b in betweenness.iter_mut() {
        *b /= 2.0;
    }
    for h in histogram.iter_mut() {
        *h /= 2;
    }
    let closeness = sums
        .iter()
        .map(|&s| if n < 2 { f64::NAN } else { s as f64 / (n - 1) as f64 })
        .collect();
    Ok(ShortestPathStats {
        betweenness,
        closeness,
        histogram,
    })
}

struct BrandesWork {
    dist: Vec<usize>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    stack: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BrandesWork {
    fn new(n: usize) -> Self {
        BrandesWork {
            dist: vec![usize::MAX; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            stack: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn run(&mut self, graph: &Graph, s: usize, out: &mut Partial) {
        for &v in &self.stack {
            self.dist[v] = usize::MAX;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
        }
        self.stack.clear();
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            let dv = self.dist[v];
            for &w in graph.neighbors(v) {
                if self.dist[w] == usize::MAX {
                    self.dist[w] = dv + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == dv + 1 {
                    self.sigma[w] += self.sigma[v];
                }
            }
        }
        let mut total = 0u64;
        for &v in &self.stack {
            let d = self.dist[v];
            total += d as u64;
            if out.histogram.len() <= d {
                out.histogram.resize(d + 1, 0);
            }
            out.histogram[d] += 1;
        }
        // the source itself sits at distance 0 and is not a pair
        out.histogram[0] -= 1;
        out.distance_sums[s] = total;
        for &w in self.stack.iter().rev() {
            let dw = self.dist[w];
            for &v in graph.neighbors(w) {
                if self.dist[v] + 1 == dw {
                    self.delta[v] += self.sigma[v] / self.sigma[w] * (1.0 + self.delta[w]);
                }
            }
            if w != s {
                out.betweenness[w] += self.delta[w];
            }
        }
    }
}

pub fn betweenness_centrality(graph: &Graph) -> Result<Vec<f64>> {
    Ok(shortest_path_stats(graph)?.betweenness)
}

/// Average distance from each vertex to all others. Needs `n >= 2`.
pub fn closeness_centrality(graph: &Graph) -> Result<Vec<f64>> {
    if graph.n() < 2 {
        return Err(Error::InsufficientData("closeness needs at least two vertices".into()));
    }
    Ok(shortest_path_stats(graph)?.closeness)
}

/// Katz centrality `sum_{k>=1} a^k A^k 1` with `a = 0.9 / lambda_max`.
/// `None` when the iteration does not converge or the graph has no edges.
pub fn katz_centrality(graph: &Graph) -> Option<Vec<f64>> {
    let n = graph.n();
    if graph.m() == 0 {
        return None;
    }
    let lambda = spectral_radius(graph);
    if !(lambda > 0.0) {
        return None;
    }
    let a = KATZ_DAMPING / lambda;
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..KATZ_MAX_ITER {
        for v in 0..n {
            next[v] = a * graph.neighbors(v).iter().map(|&u| x[u] + 1.0).sum::<f64>();
        }
        let diff = next.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let scale = next.iter().copied().fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if diff <= KATZ_TOL * scale {
            return Some(x);
        }
    }
    None
}

/// Largest adjacency eigenvalue by power iteration on `A + I`, which has the
/// same leading eigenvector but no oscillation on bipartite graphs.
fn spectral_radius(graph: &Graph) -> f64 {
    let n = graph.n();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        for v in 0..n {
            y[v] = x[v] + graph.neighbors(v).iter().map(|&u| x[u]).sum::<f64>();
        }
        let norm = y.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let estimate = norm - 1.0;
        for (xv, yv) in x.iter_mut().zip(&y) {
            *xv = yv / norm;
        }
        let converged = (estimate - lambda).abs() <= KATZ_TOL * estimate.abs();
        lambda = estimate;
        if converged {
            break;
        }
    }
    lambda
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Diameters {
    pub diameter: usize,
    pub effective: usize,
    /// Effective diameter estimated from sampled BFS sources.
    pub approximate: bool,
}

/// Exact diameter by eccentricity bounds, effective diameter from the full
/// distance histogram up to [`EXACT_HISTOGRAM_LIMIT`] vertices, otherwise
/// from [`SAMPLED_SOURCES`] random sources.
pub fn diameter_and_effective_diameter(graph: &Graph) -> Result<Diameters> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::InsufficientData("empty graph".into()));
    }
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let diameter = exact_diameter(graph);
    let (sources, approximate): (Vec<usize>, bool) = if n <= EXACT_HISTOGRAM_LIMIT {
        ((0..n).collect(), false)
    } else {
        let mut rng = rng_from_seed(n as u64);
        let mut picked = sample(&mut rng, n, SAMPLED_SOURCES).into_vec();
        picked.sort_unstable();
        (picked, true)
    };
    let mut histogram = vec![0u64; diameter + 1];
    let mut dist = vec![usize::MAX; n];
    for &s in &sources {
        bfs(graph, s, &mut dist);
        for &d in &dist {
            histogram[d] += 1;
        }
        histogram[0] -= 1;
    }
    Ok(Diameters {
        diameter,
        effective: effective_from_histogram(&histogram),
        approximate,
    })
}

/// Smallest `h` with at least 90% of the counted pairs at distance `<= h`.
fn effective_from_histogram(histogram: &[u64]) -> usize {
    let total: u64 = histogram.iter().sum();
    if total == 0 {
        return 0;
    }
    let mut cumulative = 0u64;
    for (h, &c) in histogram.iter().enumerate() {
        cumulative += c;
        if 10 * cumulative >= 9 * total {
            return h;
        }
    }
    histogram.len() - 1
}

fn bfs(graph: &Graph, s: usize, dist: &mut [usize]) -> usize {
    dist.fill(usize::MAX);
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    let mut last = s;
    while let Some(v) = queue.pop_front() {
        last = v;
        for &u in graph.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    last
}

/// Eccentricity bounding: every BFS tightens per-vertex lower and upper
/// eccentricity bounds; vertices whose upper bound cannot beat the best
/// known eccentricity are never searched.
fn exact_diameter(graph: &Graph) -> usize {
    let n = graph.n();
    let mut dist = vec![usize::MAX; n];
    let far = bfs(graph, 0, &mut dist);
    let mut lower = vec![0usize; n];
    let mut upper = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut best = 0;
    let mut next = Some(far);
    while let Some(v) = next {
        bfs(graph, v, &mut dist);
        done[v] = true;
        let ecc = dist.iter().copied().max().unwrap_or(0);
        best = best.max(ecc);
        for u in 0..n {
            let d = dist[u];
            lower[u] = lower[u].max(d).max(ecc.saturating_sub(d));
            upper[u] = upper[u].min(d + ecc);
            best = best.max(lower[u]);
        }
        next = (0..n)
            .filter(|&u| !done[u] && upper[u] > best)
            .max_by_key(|&u| (upper[u], std::cmp::Reverse(u)));
    }
    best
}

/// Named feature values; `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(String, Option<f64>)>,
}

impl FeatureVector {
    /// All keys in their canonical column order.
    pub fn keys() -> Vec<String> {
        let mut keys: Vec<String> = SINGLE_FEATURES.iter().map(|s| s.to_string()).collect();
        for dist in DISTRIBUTIONS {
            for stat in SUMMARIES {
                keys.push(format!("{dist}-{stat}"));
            }
        }
        keys
    }

    pub fn from_entries(entries: Vec<(String, Option<f64>)>) -> Self {
        FeatureVector { entries }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == key).and_then(|(_, v)| *v)
    }

    pub fn entries(&self) -> &[(String, Option<f64>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV cells for this vector, led by the graph id. Undefined values are `NA`.
    pub fn to_record(&self, id: &str) -> Vec<String> {
        std::iter::once(id.to_string())
            .chain(self.entries.iter().map(|(_, v)| format_value(*v)))
            .collect()
    }

    pub fn header(&self) -> Vec<String> {
        std::iter::once("graph".to_string())
            .chain(self.entries.iter().map(|(k, _)| k.clone()))
            .collect()
    }
}

pub(crate) fn format_value(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x}"),
        Some(x) if x.is_nan() => "NA".into(),
        Some(x) if x > 0.0 => "inf".into(),
        Some(_) => "-inf".into(),
        None => "NA".into(),
    }
}

fn summarize(values: Option<&[f64]>) -> [Option<f64>; 5] {
    let Some(values) = values.filter(|v| !v.is_empty()) else {
        return [None; 5];
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    [
        Some(mean(values)),
        Some(quantile_sorted(&sorted, 0.5)),
        Some(quantile_sorted(&sorted, 0.25)),
        Some(quantile_sorted(&sorted, 0.75)),
        Some(population_std(values)),
    ]
}

/// All features of `lcc`, which must be connected. `tau_fit` supplies the
/// degree exponent; without it `tau` is undefined.
pub fn extract_feature_vector(lcc: &Graph, tau_fit: Option<&PowerLawFit>) -> Result<FeatureVector> {
    let n = lcc.n();
    if n == 0 {
        return Err(Error::InsufficientData("empty graph".into()));
    }
    let paths = shortest_path_stats(lcc)?;
    let (diam, eff) = if n >= 2 {
        (Some(paths.diameter() as f64), Some(paths.effective_diameter() as f64))
    } else {
        (Some(0.0), Some(0.0))
    };
    let kcore: Vec<f64> = kcore_numbers(lcc).into_iter().map(|k| k as f64).collect();
    let clustering = local_clustering_coefficients(lcc);
    let katz = katz_centrality(lcc);
    if katz.is_none() {
        log::warn!("Katz centrality undefined for a graph with n = {n}, m = {}", lcc.m());
    }
    let degree: Vec<f64> = lcc.degrees().into_iter().map(|d| d as f64).collect();
    let closeness = (n >= 2).then_some(paths.closeness.as_slice());

    let mut entries: Vec<(String, Option<f64>)> = vec![
        ("n".into(), Some(n as f64)),
        ("m".into(), Some(lcc.m() as f64)),
        ("tau".into(), tau_fit.map(|f| f.tau)),
        ("diam".into(), diam),
        ("eff-diam".into(), eff),
    ];
    let dists: [Option<&[f64]>; 6] = [
        Some(&kcore),
        Some(&clustering),
        katz.as_deref(),
        Some(&paths.betweenness),
        closeness,
        Some(&degree),
    ];
    for (name, values) in DISTRIBUTIONS.iter().zip(dists) {
        for (stat, value) in SUMMARIES.iter().zip(summarize(values)) {
            entries.push((format!("{name}-{stat}"), value));
        }
    }
    Ok(FeatureVector { entries })
}

/// LCC extraction, degree exponent fit and feature extraction in one go.
/// A failed exponent fit leaves `tau` undefined.
pub fn graph_features(graph: &Graph) -> Result<FeatureVector> {
    let lcc = largest_connected_component(graph).graph;
    let degrees: Vec<f64> = lcc.degrees().into_iter().map(|d| d as f64).collect();
    let fit = fit_power_law_tail(&degrees).ok();
    extract_feature_vector(&lcc, fit.as_ref())
}
