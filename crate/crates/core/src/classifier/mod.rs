//! Real-vs-synthetic classification: standardisation, stratified
//! cross-validation and grid search over an RBF-SVM.

mod svm;

pub use svm::{rbf, train_svm_rbf, SvmModel, KKT_TOLERANCE, MAX_UPDATES};

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::cleaning::FeatureMatrix;
use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, TaskRng};
use crate::stats::{mean, population_std};

pub const DEFAULT_FOLDS: usize = 10;

/// `2^-5, 2^-3, ..., 2^15`
pub fn default_c_grid() -> Vec<f64> {
    (-5..=15).step_by(2).map(|e| 2f64.powi(e)).collect()
}

/// `2^-15, 2^-13, ..., 2^3`
pub fn default_gamma_grid() -> Vec<f64> {
    (-15..=3).step_by(2).map(|e| 2f64.powi(e)).collect()
}

/// Per-feature affine map fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Population mean and std per column. Panics on an empty `train`.
    pub fn fit(train: &[Vec<f64>]) -> Self {
        assert!(!train.is_empty(), "standardizer needs training rows");
        let cols = train[0].len();
        let (means, stds) = (0..cols)
            .map(|j| {
                let col: Vec<f64> = train.iter().map(|r| r[j]).collect();
                (mean(&col), population_std(&col))
            })
            .unzip();
        Standardizer { means, stds }
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&x, (&m, &s))| if s > 0.0 { (x - m) / s } else { 0.0 })
            .collect()
    }

    pub fn apply(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply_row(r)).collect()
    }
}

/// Returns `(train', apply_to', params)`; constant columns become zeros.
pub fn standardize(train: &[Vec<f64>], apply_to: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Standardizer) {
    let s = Standardizer::fit(train);
    (s.apply(train), s.apply(apply_to), s)
}

/// SVM together with the scaling it was trained under.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub standardizer: Standardizer,
    pub svm: SvmModel,
}

impl Classifier {
    pub fn train(x: &[Vec<f64>], y: &[u8], c_box: f64, gamma: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InsufficientData("no training rows".into()));
        }
        let standardizer = Standardizer::fit(x);
        let svm = train_svm_rbf(&standardizer.apply(x), y, c_box, gamma)?;
        Ok(Classifier { standardizer, svm })
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        self.svm.predict(&self.standardizer.apply_row(row))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: Vec<String>,
    pub x: Vec<Vec<f64>>,
    /// 0 for real graphs, 1 for synthetic ones.
    pub y: Vec<u8>,
}

impl LabeledDataset {
    pub fn new(features: Vec<String>, x: Vec<Vec<f64>>, y: Vec<u8>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::param(format!("{} rows but {} labels", x.len(), y.len())));
        }
        if x.iter().any(|r| r.len() != features.len()) {
            return Err(Error::param("row width differs from feature count"));
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::param("dataset contains non-finite values"));
        }
        Ok(LabeledDataset { features, x, y })
    }

    /// Stacks `real` (label 0) over `synthetic` (label 1) restricted to `subset`.
    pub fn from_collections(real: &FeatureMatrix, synthetic: &FeatureMatrix, subset: &[String]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::InsufficientData("empty feature subset".into()));
        }
        if real.n_rows() != synthetic.n_rows() {
            return Err(Error::param(format!(
                "collections differ in size: {} real, {} synthetic",
                real.n_rows(),
                synthetic.n_rows()
            )));
        }
        let mut x = Vec::with_capacity(2 * real.n_rows());
        let mut y = Vec::with_capacity(2 * real.n_rows());
        for (label, m) in [(0u8, real), (1u8, synthetic)] {
            let cols = subset
                .iter()
                .map(|k| m.column_index(k).ok_or_else(|| Error::param(format!("missing feature column {k}"))))
                .collect::<Result<Vec<_>>>()?;
            for r in 0..m.n_rows() {
                x.push(cols.iter().map(|&c| m.get(r, c).unwrap_or(f64::NAN)).collect());
                y.push(label);
            }
        }
        Self::new(subset.to_vec(), x, y)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn rows(&self, idx: &[usize]) -> (Vec<Vec<f64>>, Vec<u8>) {
        (idx.iter().map(|&i| self.x[i].clone()).collect(), idx.iter().map(|&i| self.y[i]).collect())
    }
}

/// Fold index per row. Each class is shuffled and dealt round-robin, the
/// counter carrying over between classes so fold sizes differ by at most one
/// overall as well. The class of row 0 is dealt first, which makes the
/// assignment invariant under swapping the labels.
pub fn stratified_folds(y: &[u8], folds: usize, rng: &mut TaskRng) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::param("need at least 2 folds"));
    }
    let first = y.first().copied().unwrap_or(0);
    let mut assignment = vec![0; y.len()];
    let mut next = 0;
    for class in [first, 1 - first] {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        if members.len() < folds {
            return Err(Error::InsufficientData(format!(
                "class {class} has {} rows, fewer than {folds} folds",
                members.len()
            )));
        }
        members.shuffle(rng);
        for i in members {
            assignment[i] = next;
            next = (next + 1) % folds;
        }
    }
    Ok(assignment)
}

fn cv_with_folds(data: &LabeledDataset, assignment: &[usize], folds: usize, c_box: f64, gamma: f64) -> Result<f64> {
    let accuracies = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] != f).collect();
            let test: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] == f).collect();
            let (tx, ty) = data.rows(&train);
            let model = Classifier::train(&tx, &ty, c_box, gamma)?;
            let correct = test.iter().filter(|&&i| model.predict(&data.x[i]) == data.y[i]).count();
            Ok(correct as f64 / test.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(accuracies.iter().sum::<f64>() / folds as f64)
}

/// Mean test accuracy over stratified folds.
pub fn cross_validate(data: &LabeledDataset, c_box: f64, gamma: f64, folds: usize, rng: &mut TaskRng) -> Result<f64> {
    let assignment = stratified_folds(&data.y, folds, rng)?;
    cv_with_folds(data, &assignment, folds, c_box, gamma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResult {
    pub c_box: f64,
    pub gamma: f64,
    pub accuracy: f64,
}

/// Every grid cell is scored on one shared fold split. Ties go to the
/// smaller C, then the smaller gamma.
pub fn grid_search(
    data: &LabeledDataset,
    c_grid: &[f64],
    gamma_grid: &[f64],
    folds: usize,
    rng: &mut TaskRng,
) -> Result<GridResult> {
    if c_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::param("empty parameter grid"));
    }
    let assignment = stratified_folds(&data.y, folds, rng)?;
    let cells: Vec<(f64, f64)> = c_grid.iter().flat_map(|&c| gamma_grid.iter().map(move |&g| (c, g))).collect();
    let scored = cells
        .par_iter()
        .map(|&(c, g)| cv_with_folds(data, &assignment, folds, c, g).map(|a| GridResult { c_box: c, gamma: g, accuracy: a }))
        .collect::<Result<Vec<_>>>()?;
    let best = scored
        .into_iter()
        .reduce(|best, r| {
            let better = r.accuracy > best.accuracy
                || (r.accuracy == best.accuracy
                    && (r.c_box < best.c_box || (r.c_box == best.c_box && r.gamma < best.gamma)));
            if better {
                r
            } else {
                best
            }
        })
        .unwrap();
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    pub folds: usize,
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            folds: DEFAULT_FOLDS,
            c_grid: default_c_grid(),
            gamma_grid: default_gamma_grid(),
        }
    }
}

/// `1 - best CV accuracy` of telling `real` from `synthetic` on `subset`.
/// The grid-search accuracy doubles as the reported one.
pub fn misclassification_rate(
    real: &FeatureMatrix,
    synthetic: &FeatureMatrix,
    subset: &[String],
    config: &ClassifierConfig,
    seed: u64,
) -> Result<f64> {
    let data = LabeledDataset::from_collections(real, synthetic, subset)?;
    let mut rng = rng_from_seed(seed);
    let best = grid_search(&data, &config.c_grid, &config.gamma_grid, config.folds, &mut rng)?;
    Ok((1.0 - best.accuracy).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn gaussian(rng: &mut TaskRng) -> f64 {
        let (u, v): (f64, f64) = (1.0 - rng.gen::<f64>(), rng.gen());
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }

    fn dataset(n: usize, shift: f64, seed: u64) -> LabeledDataset {
        let mut rng = rng_from_seed(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let label = (i % 2) as u8;
            let s = if label == 1 { shift } else { 0.0 };
            x.push(vec![s + gaussian(&mut rng), gaussian(&mut rng), 3.0]);
            y.push(label);
        }
        LabeledDataset::new(vec!["a".into(), "b".into(), "k".into()], x, y).unwrap()
    }

    #[test]
    fn standardize_example() {
        let train = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let (t, a, s) = standardize(&train, &[vec![3.0, 7.0]]);
        assert_eq!(t, vec![vec![-1.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(a, vec![vec![1.0, 0.0]]);
        assert_eq!(s.stds, vec![1.0, 0.0]);
    }

    #[test]
    fn separable_accuracy_is_one() {
        let data = dataset(60, 10.0, 4);
        let acc = cross_validate(&data, 1.0, 1.0, 10, &mut rng_from_seed(1)).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn noise_accuracy_near_half() {
        let data = dataset(200, 0.0, 5);
        let acc = cross_validate(&data, 1.0, 1.0, 10, &mut rng_from_seed(2)).unwrap();
        assert!((0.35..=0.65).contains(&acc), "{acc}");
    }

    #[test]
    fn small_class_is_rejected() {
        let data = dataset(10, 1.0, 6);
        assert!(matches!(
            cross_validate(&data, 1.0, 1.0, 10, &mut rng_from_seed(0)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn constant_column_does_not_change_predictions() {
        let data = dataset(40, 1.5, 7);
        let narrow: Vec<Vec<f64>> = data.x.iter().map(|r| r[..2].to_vec()).collect();
        let a = Classifier::train(&data.x, &data.y, 2.0, 0.5).unwrap();
        let b = Classifier::train(&narrow, &data.y, 2.0, 0.5).unwrap();
        for (wide, thin) in data.x.iter().zip(&narrow) {
            assert_eq!(a.predict(wide), b.predict(thin));
        }
    }

    #[test]
    fn grid_single_cell_and_determinism() {
        let data = dataset(40, 1.0, 8);
        let one = grid_search(&data, &[2.0], &[0.25], 5, &mut rng_from_seed(3)).unwrap();
        assert_eq!((one.c_box, one.gamma), (2.0, 0.25));
        let g1 = grid_search(&data, &[0.5, 8.0], &[0.125, 2.0], 5, &mut rng_from_seed(3)).unwrap();
        let g2 = grid_search(&data, &[0.5, 8.0], &[0.125, 2.0], 5, &mut rng_from_seed(3)).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn grid_ties_prefer_small_parameters() {
        let data = dataset(40, 20.0, 9);
        let best = grid_search(&data, &[4.0, 1.0], &[1.0, 0.5], 5, &mut rng_from_seed(1)).unwrap();
        assert_eq!((best.accuracy, best.c_box, best.gamma), (1.0, 1.0, 0.5));
    }

    fn matrix(prefix: &str, rows: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix::new(
            (0..rows.len()).map(|i| format!("{prefix}{i}")).collect(),
            vec!["f".into(), "g".into()],
            rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn copies_are_indistinguishable_and_shifts_separable() {
        let mut rng = rng_from_seed(10);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| vec![gaussian(&mut rng), gaussian(&mut rng)]).collect();
        let shifted: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] + 100.0, r[1]]).collect();
        let real = matrix("r", rows.clone());
        let config = ClassifierConfig::default();
        let subset = vec!["f".to_string(), "g".to_string()];
        let copy = misclassification_rate(&real, &matrix("s", rows), &subset, &config, 1).unwrap();
        assert!(copy >= 0.4, "{copy}");
        let shift = misclassification_rate(&real, &matrix("s", shifted), &subset, &config, 1).unwrap();
        assert_eq!(shift, 0.0);
    }

    #[test]
    fn label_swap_keeps_rate() {
        let data = dataset(40, 0.8, 11);
        let swapped = LabeledDataset {
            y: data.y.iter().map(|&l| 1 - l).collect(),
            ..data.clone()
        };
        let (cg, gg) = (vec![0.5, 4.0, 64.0], vec![0.0625, 0.5, 4.0]);
        let a = grid_search(&data, &cg, &gg, 5, &mut rng_from_seed(5)).unwrap();
        let b = grid_search(&swapped, &cg, &gg, 5, &mut rng_from_seed(5)).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn folds_are_balanced(n0 in 10usize..40, n1 in 10usize..40, folds in 2usize..10, seed in any::<u64>()) {
            let mut y = vec![0u8; n0];
            y.extend(std::iter::repeat_n(1u8, n1));
            let a = stratified_folds(&y, folds, &mut rng_from_seed(seed)).unwrap();
            for class in [0u8, 1] {
                let mut counts = vec![0usize; folds];
                for (i, &f) in a.iter().enumerate() {
                    if y[i] == class {
                        counts[f] += 1;
                    }
                }
                let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
                prop_assert!(hi - lo <= 1);
            }
        }
    }
}
