//! End-to-end workflow: fit, generate, extract features, clean, classify.
//!
//! Every stage persists its artifacts under the output directory and skips
//! items whose artifact already exists and parses. Per-item errors are
//! collected as [`Failure`]s and never abort a stage.
//!
//! Layout (with `<r>` the replicate index):
//! ```text
//! out/fitted/<network>/<model>.txt          fitted parameters, key = value
//! out/synthetic/<network>/<model>.r<r>.edges
//! out/features/real/<network>.csv
//! out/features/<model>/<network>.r<r>.csv
//! out/cleaned/<model>.r<r>.csv              cleaned real + synthetic matrix
//! out/cleaned/<model>.r<r>.report.csv       dropped columns
//! out/rates/<model>.r<r>.csv                subset, rate
//! out/results.csv                           models x subsets
//! out/failures.csv
//! ```
//!
//! Seeds: every task seed is `derive_seed(master, stage, [name_id(network),
//! name_id(model), replicate])`; probes inside the fit derive further from it.

mod config;
mod edgelist;

pub use config::{subset_keys, ModelEntry, RunConfig, SelfTestConfig, DEFAULT_MODELS, DEFAULT_SUBSETS};
pub use edgelist::{format_edge_list, parse_edge_list, read_edge_list, write_edge_list, ReadStats};

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use log::{info, warn};
use rayon::prelude::*;

use crate::classifier::misclassification_rate;
use crate::cleaning::{clean, default_priority, CleaningReport, FeatureMatrix};
use crate::error::{Error, Result};
use crate::features::{format_value, graph_features};
use crate::fitting::{fit_c, fit_model, generate, FitTargets, FittedModel, ModelKind, ModelSpec};
use crate::samplers::{sample_boolean_girg, GirgParams};
use crate::seed::{derive_seed, name_id, rng_from_seed};
use crate::weights::{sample_power_law_weights, DEFAULT_W_MIN};

const REAL_PREFIX: &str = "real:";

/// Writes through a temporary file so an interrupted run never leaves a
/// truncated artifact behind.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn matrix_bytes(m: &FeatureMatrix) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    m.write_csv(&mut buf)?;
    Ok(buf)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub stage: String,
    pub item: String,
    pub error: String,
}

/// Outcome of one or more stages.
#[derive(Debug, Default)]
pub struct StageReport {
    pub computed: usize,
    pub reused: usize,
    pub failures: Vec<Failure>,
}

impl StageReport {
    pub fn merge(&mut self, other: StageReport) {
        self.computed += other.computed;
        self.reused += other.reused;
        self.failures.extend(other.failures);
    }

    pub fn failures_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["stage", "item", "error"])?;
        for f in &self.failures {
            w.write_record([&f.stage, &f.item, &f.error])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Corrupted(e.to_string()))?).unwrap_or_default())
    }
}

/// Thread-safe collector used while a stage runs.
struct Tally {
    stage: &'static str,
    computed: AtomicUsize,
    reused: AtomicUsize,
    failures: Mutex<Vec<Failure>>,
}

impl Tally {
    fn new(stage: &'static str) -> Self {
        Tally {
            stage,
            computed: AtomicUsize::new(0),
            reused: AtomicUsize::new(0),
            failures: Mutex::new(Vec::new()),
        }
    }

    /// Runs `task` unless `exists` says the artifact is already valid.
    fn item(&self, item: &str, exists: impl FnOnce() -> bool, task: impl FnOnce() -> Result<()>) {
        if exists() {
            self.reused.fetch_add(1, Ordering::Relaxed);
            return;
        }
        match task() {
            Ok(()) => {
                self.computed.fetch_add(1, Ordering::Relaxed);
            }
            Err(e) => self.fail(item, &e),
        }
    }

    fn fail(&self, item: &str, e: &Error) {
        warn!("{} {item}: {e}", self.stage);
        self.failures.lock().unwrap().push(Failure {
            stage: self.stage.to_string(),
            item: item.to_string(),
            error: e.to_string(),
        });
    }

    fn finish(self) -> StageReport {
        let mut failures = self.failures.into_inner().unwrap();
        // worker order is not deterministic
        failures.sort_by(|a, b| a.item.cmp(&b.item));
        let report = StageReport {
            computed: self.computed.into_inner(),
            reused: self.reused.into_inner(),
            failures,
        };
        info!(
            "{}: {} computed, {} reused, {} failed",
            self.stage,
            report.computed,
            report.reused,
            report.failures.len()
        );
        report
    }
}

/// Misclassification rates, rows = models (and replicates), columns = subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub subsets: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

impl ResultsTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(std::iter::once("model").chain(self.subsets.iter().map(String::as_str)))?;
        for (model, cells) in &self.rows {
            w.write_record(std::iter::once(model.clone()).chain(cells.iter().map(|v| format_value(*v))))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Corrupted(e.to_string()))?;
        Ok(String::from_utf8(bytes).unwrap_or_default())
    }

    pub fn get(&self, model: &str, subset: &str) -> Option<f64> {
        let col = self.subsets.iter().position(|s| s == subset)?;
        self.rows.iter().find(|(m, _)| m == model).and_then(|(_, c)| c[col])
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    pub name: String,
    pub path: PathBuf,
}

/// Regular, non-hidden files of `dir`, sorted by name.
pub fn list_networks(dir: &Path) -> Result<Vec<Network>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut nets = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let file_name = entry.file_name().to_string_lossy().to_string();
        if !path.is_file() || file_name.starts_with('.') {
            continue;
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or(file_name);
        nets.push(Network { name, path });
    }
    nets.sort_by(|a, b| a.name.cmp(&b.name));
    if let Some(w) = nets.windows(2).find(|w| w[0].name == w[1].name) {
        return Err(Error::Config(format!("two input files share the network name {}", w[0].name)));
    }
    Ok(nets)
}

pub struct Pipeline {
    pub config: RunConfig,
}

impl Pipeline {
    pub fn new(config: RunConfig) -> Self {
        Pipeline { config }
    }

    fn out(&self) -> &Path {
        &self.config.out
    }

    fn fitted_path(&self, net: &str, model: &str) -> PathBuf {
        self.out().join("fitted").join(net).join(format!("{model}.txt"))
    }

    fn synthetic_path(&self, net: &str, model: &str, r: usize) -> PathBuf {
        self.out().join("synthetic").join(net).join(format!("{model}.r{r}.edges"))
    }

    fn real_features_path(&self, net: &str) -> PathBuf {
        self.out().join("features").join("real").join(format!("{net}.csv"))
    }

    fn synthetic_features_path(&self, net: &str, model: &str, r: usize) -> PathBuf {
        self.out().join("features").join(model).join(format!("{net}.r{r}.csv"))
    }

    fn cleaned_path(&self, model: &str, r: usize) -> PathBuf {
        self.out().join("cleaned").join(format!("{model}.r{r}.csv"))
    }

    fn report_path(&self, model: &str, r: usize) -> PathBuf {
        self.out().join("cleaned").join(format!("{model}.r{r}.report.csv"))
    }

    fn rates_path(&self, model: &str, r: usize) -> PathBuf {
        self.out().join("rates").join(format!("{model}.r{r}.csv"))
    }

    pub fn results_path(&self) -> PathBuf {
        self.out().join("results.csv")
    }

    pub fn networks(&self) -> Result<Vec<Network>> {
        let nets = list_networks(&self.config.input)?;
        if nets.is_empty() {
            return Err(Error::Config(format!("no networks in {}", self.config.input.display())));
        }
        Ok(nets)
    }

    fn row_label(model: &str, r: usize) -> String {
        if r == 0 {
            model.to_string()
        } else {
            format!("{model}#r{r}")
        }
    }

    fn task_seed(&self, stage: &str, net: &str, model: &str, r: usize) -> u64 {
        derive_seed(self.config.seed, stage, &[name_id(net), name_id(model), r as u64])
    }

    fn targets(net: &Network) -> Result<FitTargets> {
        FitTargets::from_graph(&read_edge_list(&net.path)?)
    }

    fn load_fitted(path: &Path) -> Result<FittedModel> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FittedModel::from_record(&text)
    }

    pub fn fit(&self) -> Result<StageReport> {
        let nets = self.networks()?;
        let tally = Tally::new("fit");
        nets.par_iter().for_each(|net| {
            let pending: Vec<&ModelSpec> = self
                .config
                .models
                .iter()
                .filter(|m| {
                    let valid = Self::load_fitted(&self.fitted_path(&net.name, &m.id)).is_ok();
                    if valid {
                        tally.reused.fetch_add(1, Ordering::Relaxed);
                    }
                    !valid
                })
                .collect();
            if pending.is_empty() {
                return;
            }
            let targets = match Self::targets(net) {
                Ok(t) => t,
                Err(e) => {
                    for m in pending {
                        tally.fail(&format!("{}/{}", net.name, m.id), &e);
                    }
                    return;
                }
            };
            pending.par_iter().for_each(|m| {
                let item = format!("{}/{}", net.name, m.id);
                tally.item(
                    &item,
                    || false,
                    || {
                        let seed = self.task_seed("fit", &net.name, &m.id, 0);
                        let fitted = fit_model(m, &targets, seed)?;
                        write_atomic(&self.fitted_path(&net.name, &m.id), fitted.to_record().as_bytes())
                    },
                );
            });
        });
        Ok(tally.finish())
    }

    pub fn generate(&self) -> Result<StageReport> {
        let nets = self.networks()?;
        let tally = Tally::new("generate");
        let reps = self.config.replicates;
        nets.par_iter().for_each(|net| {
            let mut targets: Option<Result<FitTargets>> = None;
            for m in &self.config.models {
                for r in 0..reps {
                    let path = self.synthetic_path(&net.name, &m.id, r);
                    let item = format!("{}/{}#r{r}", net.name, m.id);
                    tally.item(
                        &item,
                        || read_edge_list(&path).is_ok(),
                        || {
                            let fitted = Self::load_fitted(&self.fitted_path(&net.name, &m.id))?;
                            let t = targets.get_or_insert_with(|| Self::targets(net));
                            let t = t.as_ref().map_err(|e| Error::InsufficientData(e.to_string()))?;
                            let seed = self.task_seed("generate", &net.name, &m.id, r);
                            write_edge_list(&generate(&fitted, t, seed)?, &path)
                        },
                    );
                }
            }
        });
        Ok(tally.finish())
    }

    pub fn features(&self) -> Result<StageReport> {
        let nets = self.networks()?;
        let tally = Tally::new("features");
        let mut jobs: Vec<(String, PathBuf, PathBuf)> = Vec::new();
        for net in &nets {
            jobs.push((net.name.clone(), net.path.clone(), self.real_features_path(&net.name)));
            for m in &self.config.models {
                for r in 0..self.config.replicates {
                    jobs.push((
                        format!("{}/{}#r{r}", net.name, m.id),
                        self.synthetic_path(&net.name, &m.id, r),
                        self.synthetic_features_path(&net.name, &m.id, r),
                    ));
                }
            }
        }
        jobs.par_iter().for_each(|(item, graph_path, out)| {
            tally.item(
                item,
                || FeatureMatrix::read_csv_file(out).is_ok_and(|m| m.n_rows() == 1),
                || {
                    let fv = graph_features(&read_edge_list(graph_path)?)?;
                    let m = FeatureMatrix::from_vectors(&[(item.clone(), fv)])?;
                    write_atomic(out, &matrix_bytes(&m)?)
                },
            );
        });
        Ok(tally.finish())
    }

    /// Real and synthetic rows for one model replicate, restricted to networks
    /// that have both.
    fn assemble(&self, nets: &[Network], model: &str, r: usize) -> Result<FeatureMatrix> {
        let mut stacked: Option<FeatureMatrix> = None;
        let mut synthetic_rows = Vec::new();
        let mut used = 0;
        for net in nets {
            let (Ok(real), Ok(syn)) = (
                FeatureMatrix::read_csv_file(&self.real_features_path(&net.name)),
                FeatureMatrix::read_csv_file(&self.synthetic_features_path(&net.name, model, r)),
            ) else {
                continue;
            };
            let real = relabel(&real, &format!("{REAL_PREFIX}{}", net.name))?;
            stacked = Some(match stacked {
                None => real,
                Some(s) => s.vstack(&real)?,
            });
            synthetic_rows.push(relabel(&syn, &format!("{model}:{}", net.name))?);
            used += 1;
        }
        let mut out = stacked.ok_or_else(|| Error::InsufficientData(format!("no feature rows for {model}")))?;
        for s in &synthetic_rows {
            out = out.vstack(s)?;
        }
        if used < nets.len() {
            warn!("{model}#r{r}: only {used} of {} networks have features", nets.len());
        }
        Ok(out)
    }

    pub fn clean(&self) -> Result<StageReport> {
        let nets = self.networks()?;
        let tally = Tally::new("clean");
        for m in &self.config.models {
            for r in 0..self.config.replicates {
                let (path, report) = (self.cleaned_path(&m.id, r), self.report_path(&m.id, r));
                tally.item(
                    &Self::row_label(&m.id, r),
                    || {
                        FeatureMatrix::read_csv_file(&path).is_ok()
                            && std::fs::read_to_string(&report).is_ok_and(|t| CleaningReport::from_csv(&t).is_ok())
                    },
                    || {
                        let matrix = self.assemble(&nets, &m.id, r)?;
                        let (cleaned, dropped) = clean(&matrix, &default_priority())?;
                        write_atomic(&report, dropped.to_csv()?.as_bytes())?;
                        write_atomic(&path, &matrix_bytes(&cleaned)?)
                    },
                );
            }
        }
        Ok(tally.finish())
    }

    fn rates_for(&self, model: &str, r: usize) -> Result<Vec<Option<f64>>> {
        let matrix = FeatureMatrix::read_csv_file(&self.cleaned_path(model, r))?;
        let report_path = self.report_path(model, r);
        let text = std::fs::read_to_string(&report_path).map_err(|e| Error::io(&report_path, e))?;
        let report = CleaningReport::from_csv(&text)?;
        let (real_idx, syn_idx): (Vec<usize>, Vec<usize>) =
            (0..matrix.n_rows()).partition(|&i| matrix.rows()[i].starts_with(REAL_PREFIX));
        let real = select_rows(&matrix, &real_idx)?;
        let synthetic = select_rows(&matrix, &syn_idx)?;
        let per_class = real.n_rows().min(synthetic.n_rows());
        if per_class < 2 {
            return Err(Error::InsufficientData(format!(
                "{model}: {per_class} graphs per class, need at least 2"
            )));
        }
        let mut classifier = self.config.classifier.clone();
        if per_class < classifier.folds {
            warn!("{model}: {per_class} graphs per class, using {per_class} folds");
            classifier.folds = per_class;
        }
        self.config
            .feature_subsets
            .par_iter()
            .map(|subset| {
                // a feature grouped away by correlation cleaning is replaced
                // by the member of its group that survived
                let mut keys: Vec<String> = Vec::new();
                for k in subset_keys(subset)? {
                    let rep = report.representative(&k).to_string();
                    if matrix.column_index(&rep).is_some() && !keys.contains(&rep) {
                        keys.push(rep);
                    }
                }
                if keys.is_empty() {
                    info!("{model}: subset {subset:?} removed by cleaning");
                    return Ok(None);
                }
                let seed = derive_seed(
                    self.config.seed,
                    "classify",
                    &[name_id(model), r as u64, name_id(subset)],
                );
                misclassification_rate(&real, &synthetic, &keys, &classifier, seed).map(Some)
            })
            .collect()
    }

    fn read_rates(&self, path: &Path) -> Result<Vec<Option<f64>>> {
        let table = FeatureMatrix::read_csv_file(path)?;
        if table.columns() != self.config.feature_subsets.as_slice() || table.n_rows() != 1 {
            return Err(Error::Corrupted(format!("{} does not match the configured subsets", path.display())));
        }
        Ok(table.row(0).to_vec())
    }

    /// Computes missing rate files and assembles the results table.
    pub fn classify(&self) -> Result<(ResultsTable, StageReport)> {
        let tally = Tally::new("classify");
        let mut rows = Vec::new();
        for m in &self.config.models {
            for r in 0..self.config.replicates {
                let label = Self::row_label(&m.id, r);
                let path = self.rates_path(&m.id, r);
                tally.item(
                    &label,
                    || self.read_rates(&path).is_ok(),
                    || {
                        let rates = self.rates_for(&m.id, r)?;
                        let table = FeatureMatrix::new(
                            vec![label.clone()],
                            self.config.feature_subsets.clone(),
                            vec![rates],
                        )?;
                        write_atomic(&path, &matrix_bytes(&table)?)
                    },
                );
                let cells = self
                    .read_rates(&path)
                    .unwrap_or_else(|_| vec![None; self.config.feature_subsets.len()]);
                rows.push((label, cells));
            }
        }
        let table = ResultsTable {
            subsets: self.config.feature_subsets.clone(),
            rows,
        };
        write_atomic(&self.results_path(), table.to_csv()?.as_bytes())?;
        Ok((table, tally.finish()))
    }

    /// All stages in order; also writes `failures.csv`.
    pub fn run_all(&self) -> Result<(ResultsTable, StageReport)> {
        let mut report = self.fit()?;
        report.merge(self.generate()?);
        report.merge(self.features()?);
        report.merge(self.clean()?);
        let (table, r) = self.classify()?;
        report.merge(r);
        self.write_failures(&report)?;
        Ok((table, report))
    }

    pub fn write_failures(&self, report: &StageReport) -> Result<()> {
        write_atomic(&self.out().join("failures.csv"), report.failures_csv()?.as_bytes())
    }
}

pub fn run_pipeline(config: RunConfig) -> Result<(ResultsTable, StageReport)> {
    Pipeline::new(config).run_all()
}

fn relabel(m: &FeatureMatrix, label: &str) -> Result<FeatureMatrix> {
    if m.n_rows() != 1 {
        return Err(Error::Corrupted(format!("expected one feature row for {label}")));
    }
    FeatureMatrix::new(vec![label.to_string()], m.columns().to_vec(), vec![m.row(0).to_vec()])
}

fn select_rows(m: &FeatureMatrix, idx: &[usize]) -> Result<FeatureMatrix> {
    FeatureMatrix::new(
        idx.iter().map(|&i| m.rows()[i].clone()).collect(),
        m.columns().to_vec(),
        idx.iter().map(|&i| m.row(i).to_vec()).collect(),
    )
}

/// Samples the self-test targets into `<out>/self-test/networks` and points
/// the config at them, with the self-test family as the only model.
pub fn prepare_self_test(config: &mut RunConfig) -> Result<()> {
    let st = config.self_test.clone();
    let spec = ModelSpec::from_id(&st.model)?;
    let ModelKind::Girg(girg) = &spec.kind else {
        return Err(Error::Config(format!("self-test model {} is not a GIRG", st.model)));
    };
    let dir = config.out.join("self-test").join("networks");
    let master = config.seed;
    (0..st.networks).into_par_iter().try_for_each(|i| -> Result<()> {
        let path = dir.join(format!("st{i:03}.edges"));
        if read_edge_list(&path).is_ok() {
            return Ok(());
        }
        let seed = derive_seed(master, "self-test", &[i as u64]);
        let weights = sample_power_law_weights(st.n, st.tau, DEFAULT_W_MIN, &mut rng_from_seed(derive_seed(seed, "weights", &[])))?;
        let params = GirgParams::new(st.tau, st.alpha, 1.0, girg.topology, girg.spec.clone())?;
        let c = fit_c(&params, &weights, st.avg_degree, derive_seed(seed, "c", &[]))?.value;
        let g = sample_boolean_girg(&params.with_c(c), &weights, None, &mut rng_from_seed(derive_seed(seed, "sample", &[])))?;
        write_edge_list(&g.graph, &path)
    })?;
    config.input = dir;
    config.models = vec![spec];
    config.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_csv_has_header() {
        let mut r = StageReport::default();
        assert_eq!(r.failures_csv().unwrap(), "stage,item,error\n");
        r.failures.push(Failure {
            stage: "fit".into(),
            item: "a/ER".into(),
            error: "bad, worse".into(),
        });
        assert!(r.failures_csv().unwrap().ends_with("fit,a/ER,\"bad, worse\"\n"));
    }

    #[test]
    fn results_csv_layout() {
        let t = ResultsTable {
            subsets: vec!["LCC".into(), "n,m".into()],
            rows: vec![("ER".into(), vec![Some(0.05), None])],
        };
        assert_eq!(t.to_csv().unwrap(), "model,LCC,\"n,m\"\nER,0.05,NA\n");
        assert_eq!(t.get("ER", "LCC"), Some(0.05));
    }
}
