//! Feature matrix reduction before classification.
//!
//! Three cleaners, each dropping whole columns:
//! * numerical: any undefined or infinite cell,
//! * variation: normalised coefficient of variation `s / (|mean| sqrt(c - 1))`
//!   below a threshold, with `s` the sample standard deviation over `c` rows,
//! * correlation: features joined by `|Spearman| > 0.99` form groups (connected
//!   components), of which only the highest-priority feature survives.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use log::info;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{format_value, FeatureVector};
use crate::stats::{average_ranks, mean, pearson, sample_std};

pub const VARIATION_THRESHOLD: f64 = 0.01;
pub const CORRELATION_THRESHOLD: f64 = 0.99;

/// Rows are graphs, columns are features; `None` marks an undefined cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<String>,
    columns: Vec<String>,
    values: Vec<Vec<Option<f64>>>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<String>, columns: Vec<String>, values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if values.len() != rows.len() {
            return Err(Error::param(format!("{} row labels for {} rows", rows.len(), values.len())));
        }
        if let Some((i, r)) = values.iter().enumerate().find(|(_, r)| r.len() != columns.len()) {
            return Err(Error::param(format!(
                "row {i} has {} cells, expected {}",
                r.len(),
                columns.len()
            )));
        }
        Ok(FeatureMatrix { rows, columns, values })
    }

    /// One row per `(graph id, features)`; all vectors must share their keys.
    pub fn from_vectors(vectors: &[(String, FeatureVector)]) -> Result<Self> {
        let columns: Vec<String> = match vectors.first() {
            Some((_, v)) => v.entries().iter().map(|(k, _)| k.clone()).collect(),
            None => FeatureVector::keys(),
        };
        let mut values = Vec::with_capacity(vectors.len());
        for (id, v) in vectors {
            if v.entries().len() != columns.len() || v.entries().iter().zip(&columns).any(|((k, _), c)| k != c) {
                return Err(Error::param(format!("feature keys of {id} differ from the first row")));
            }
            values.push(v.entries().iter().map(|(_, x)| *x).collect());
        }
        Self::new(vectors.iter().map(|(id, _)| id.clone()).collect(), columns, values)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row][col]
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        &self.values[row]
    }

    pub fn column(&self, col: usize) -> Vec<Option<f64>> {
        self.values.iter().map(|r| r[col]).collect()
    }

    pub fn column_index(&self, key: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == key)
    }

    /// Column as plain numbers; undefined cells become NaN.
    pub fn column_values(&self, col: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[col].unwrap_or(f64::NAN)).collect()
    }

    /// Keeps the listed column indices in the given order.
    pub fn select(&self, cols: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            rows: self.rows.clone(),
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
            values: self.values.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
        }
    }

    /// Keeps the named columns that exist, in the given order.
    pub fn select_keys(&self, keys: &[String]) -> FeatureMatrix {
        let cols: Vec<usize> = keys.iter().filter_map(|k| self.column_index(k)).collect();
        self.select(&cols)
    }

    /// Stacks the rows of `other` below these rows.
    pub fn vstack(&self, other: &FeatureMatrix) -> Result<FeatureMatrix> {
        if self.columns != other.columns {
            return Err(Error::param("cannot stack matrices with different columns"));
        }
        let mut out = self.clone();
        out.rows.extend(other.rows.iter().cloned());
        out.values.extend(other.values.iter().cloned());
        Ok(out)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(std::iter::once("graph").chain(self.columns.iter().map(String::as_str)))?;
        for (id, row) in self.rows.iter().zip(&self.values) {
            w.write_record(std::iter::once(id.clone()).chain(row.iter().map(|v| format_value(*v))))?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<csv>".into(),
            source: e,
        })?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<FeatureMatrix> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        let mut values = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            let mut it = record.iter();
            rows.push(it.next().unwrap_or_default().to_string());
            let row: Result<Vec<Option<f64>>> = it.map(|cell| parse_cell(cell, line + 2)).collect();
            values.push(row?);
        }
        Self::new(rows, columns, values)
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv_file(path: &Path) -> Result<FeatureMatrix> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

fn parse_cell(cell: &str, line: usize) -> Result<Option<f64>> {
    match cell.trim() {
        "" | "NA" | "nan" | "NaN" => Ok(None),
        "inf" => Ok(Some(f64::INFINITY)),
        "-inf" => Ok(Some(f64::NEG_INFINITY)),
        t => t.parse::<f64>().map(Some).map_err(|_| Error::Parse {
            path: "<csv>".into(),
            line,
            msg: format!("not a number: {t:?}"),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Numerical,
    Variation,
    Correlation,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Numerical => "numerical",
            Rule::Variation => "variation",
            Rule::Correlation => "correlation",
        })
    }
}

/// One dropped column with the statistic that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dropped {
    pub column: String,
    pub rule: Rule,
    pub value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CleaningReport {
    pub dropped: Vec<Dropped>,
}

impl CleaningReport {
    /// CSV with columns `column,rule,value,detail`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["column", "rule", "value", "detail"])?;
        for d in &self.dropped {
            w.write_record([d.column.clone(), d.rule.to_string(), format_value(d.value), d.detail.clone()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Corrupted(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut dropped = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            let field = |i: usize| record.get(i).unwrap_or_default();
            let rule = match field(1) {
                "numerical" => Rule::Numerical,
                "variation" => Rule::Variation,
                "correlation" => Rule::Correlation,
                other => {
                    return Err(Error::Parse {
                        path: "<report>".into(),
                        line: line + 2,
                        msg: format!("unknown rule {other:?}"),
                    })
                }
            };
            dropped.push(Dropped {
                column: field(0).to_string(),
                rule,
                value: parse_cell(field(2), line + 2)?,
                detail: field(3).to_string(),
            });
        }
        Ok(CleaningReport { dropped })
    }

    /// Surviving column that stands in for `column` after correlation
    /// grouping, or `column` itself if it was not grouped away.
    pub fn representative<'a>(&'a self, column: &'a str) -> &'a str {
        self.dropped
            .iter()
            .find(|d| d.column == column && d.rule == Rule::Correlation)
            .and_then(|d| d.detail.strip_prefix(GROUPED_WITH))
            .unwrap_or(column)
    }
}

const GROUPED_WITH: &str = "grouped with ";

/// Drops every column with an undefined or non-finite cell.
pub fn numerical_clean(matrix: &FeatureMatrix) -> Result<(FeatureMatrix, Vec<Dropped>)> {
    if matrix.n_rows() == 0 {
        return Err(Error::InsufficientData("empty feature matrix".into()));
    }
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for col in 0..matrix.n_cols() {
        match matrix.column(col).into_iter().find(|v| !v.is_some_and(f64::is_finite)) {
            None => keep.push(col),
            Some(bad) => dropped.push(Dropped {
                column: matrix.columns[col].clone(),
                rule: Rule::Numerical,
                value: bad,
                detail: "undefined or infinite value".into(),
            }),
        }
    }
    if keep.is_empty() {
        return Err(Error::Degenerate("numerical cleaning dropped every column".into()));
    }
    Ok((matrix.select(&keep), dropped))
}

/// Normalised coefficient of variation of one column.
pub fn normalized_cv(values: &[f64]) -> Option<f64> {
    let mu = mean(values);
    if mu == 0.0 || !mu.is_finite() {
        return None;
    }
    Some(sample_std(values) / (mu.abs() * ((values.len() - 1) as f64).sqrt()))
}

/// Drops columns whose normalised coefficient of variation is below `threshold`.
pub fn variation_clean(matrix: &FeatureMatrix, threshold: f64) -> Result<(FeatureMatrix, Vec<Dropped>)> {
    if matrix.n_rows() < 2 {
        return Err(Error::InsufficientData("variation cleaning needs at least two rows".into()));
    }
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for col in 0..matrix.n_cols() {
        let name = &matrix.columns[col];
        match normalized_cv(&matrix.column_values(col)) {
            Some(ncv) if ncv >= threshold => keep.push(col),
            Some(ncv) => dropped.push(Dropped {
                column: name.clone(),
                rule: Rule::Variation,
                value: Some(ncv),
                detail: format!("normalised coefficient of variation below {threshold}"),
            }),
            None => {
                info!("dropping {name}: zero mean, coefficient of variation undefined");
                dropped.push(Dropped {
                    column: name.clone(),
                    rule: Rule::Variation,
                    value: None,
                    detail: "zero mean".into(),
                });
            }
        }
    }
    Ok((matrix.select(&keep), dropped))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::param(format!("lengths {} and {} differ", xs.len(), ys.len())));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData("Spearman correlation needs at least three values".into()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
        .ok_or_else(|| Error::Degenerate("zero rank variance".into()))
}

/// Groups features by `|Spearman| > threshold` (transitively) and keeps the
/// one listed first in `priority` from every group. Survivors keep their
/// input order.
pub fn correlation_group(
    matrix: &FeatureMatrix,
    priority: &[String],
    threshold: f64,
) -> Result<(FeatureMatrix, Vec<Dropped>)> {
    let rank_of: Vec<usize> = matrix
        .columns
        .iter()
        .map(|c| {
            priority
                .iter()
                .position(|p| p == c)
                .ok_or_else(|| Error::param(format!("priority list does not cover {c}")))
        })
        .collect::<Result<_>>()?;
    let k = matrix.n_cols();
    let ranks: Vec<Vec<f64>> = (0..k).map(|c| average_ranks(&matrix.column_values(c))).collect();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| ((a + 1)..k).map(move |b| (a, b))).collect();
    let strong: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            let rho = pearson(&ranks[a], &ranks[b])?;
            (rho.abs() > threshold).then_some((a, b, rho))
        })
        .collect();

    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for &(a, b, _) in &strong {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let roots: Vec<usize> = (0..k).map(|c| find(&mut parent, c)).collect();
    let mut leader = vec![usize::MAX; k];
    for c in 0..k {
        let r = roots[c];
        if leader[r] == usize::MAX || rank_of[c] < rank_of[leader[r]] {
            leader[r] = c;
        }
    }
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for c in 0..k {
        let l = leader[roots[c]];
        if l == c {
            keep.push(c);
        } else {
            let rho = strong
                .iter()
                .filter(|&&(a, b, _)| a == c || b == c)
                .map(|&(_, _, r)| r)
                .max_by(|x, y| x.abs().total_cmp(&y.abs()));
            dropped.push(Dropped {
                column: matrix.columns[c].clone(),
                rule: Rule::Correlation,
                value: rho,
                detail: format!("{GROUPED_WITH}{}", matrix.columns[l]),
            });
        }
    }
    Ok((matrix.select(&keep), dropped))
}

/// Default priority: canonical feature order.
pub fn default_priority() -> Vec<String> {
    FeatureVector::keys()
}

/// Numerical, variation and correlation cleaning in sequence.
pub fn clean(matrix: &FeatureMatrix, priority: &[String]) -> Result<(FeatureMatrix, CleaningReport)> {
    let mut report = CleaningReport::default();
    let (m, d) = numerical_clean(matrix)?;
    report.dropped.extend(d);
    let (m, d) = variation_clean(&m, VARIATION_THRESHOLD)?;
    report.dropped.extend(d);
    let (m, d) = correlation_group(&m, priority, CORRELATION_THRESHOLD)?;
    report.dropped.extend(d);
    Ok((m, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(columns: &[&str], cols: Vec<Vec<Option<f64>>>) -> FeatureMatrix {
        let n = cols[0].len();
        let values = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        FeatureMatrix::new(
            (0..n).map(|i| format!("g{i}")).collect(),
            columns.iter().map(|s| s.to_string()).collect(),
            values,
        )
        .unwrap()
    }

    fn some(xs: &[f64]) -> Vec<Option<f64>> {
        xs.iter().map(|&x| Some(x)).collect()
    }

    fn names(m: &FeatureMatrix) -> Vec<&str> {
        m.columns().iter().map(String::as_str).collect()
    }

    #[test]
    fn numerical_examples() {
        let mut with_nan = some(&(0..100).map(f64::from).collect::<Vec<_>>());
        with_nan[17] = None;
        let mut with_inf = some(&(0..100).map(f64::from).collect::<Vec<_>>());
        with_inf[3] = Some(f64::INFINITY);
        let ok = some(&(0..100).map(|i| i as f64 * 2.0).collect::<Vec<_>>());
        let m = matrix(&["a", "b", "c"], vec![with_nan, ok.clone(), with_inf]);
        let (out, dropped) = numerical_clean(&m).unwrap();
        assert_eq!(names(&out), ["b"]);
        assert_eq!(dropped.len(), 2);
        let clean = matrix(&["b"], vec![ok]);
        assert_eq!(numerical_clean(&clean).unwrap().0, clean);
        let all_bad = matrix(&["a"], vec![vec![None, Some(1.0)]]);
        assert!(numerical_clean(&all_bad).is_err());
    }

    #[test]
    fn variation_examples() {
        let m = matrix(
            &["const", "pair", "zero"],
            vec![some(&[3.0, 3.0]), some(&[1.0, 2.0]), some(&[-1.0, 1.0])],
        );
        assert!((normalized_cv(&[1.0, 2.0]).unwrap() - 0.5f64.sqrt() / 1.5).abs() < 1e-12);
        let (out, dropped) = variation_clean(&m, VARIATION_THRESHOLD).unwrap();
        assert_eq!(names(&out), ["pair"]);
        assert_eq!(dropped[0].value, Some(0.0));
        assert_eq!(dropped[1].detail, "zero mean");
        assert!(variation_clean(&matrix(&["x"], vec![some(&[1.0])]), 0.01).is_err());
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    fn swap_blocks(v: &mut [f64], range: std::ops::Range<usize>, s: usize) {
        let mut i = range.start;
        while i + 2 * s <= range.end {
            for j in i..i + s {
                v.swap(j, j + s);
            }
            i += 2 * s;
        }
    }

    #[test]
    fn chain_is_grouped_transitively() {
        let a: Vec<f64> = (0..100).map(f64::from).collect();
        let mut b = a.clone();
        swap_blocks(&mut b, 0..40, 5);
        let mut c = b.clone();
        swap_blocks(&mut c, 50..90, 5);
        let ab = spearman(&a, &b).unwrap();
        let bc = spearman(&b, &c).unwrap();
        let ac = spearman(&a, &c).unwrap();
        assert!(ab > 0.99 && bc > 0.99 && ac < 0.99, "{ab} {bc} {ac}");
        let m = matrix(&["A", "B", "C"], vec![some(&a), some(&b), some(&c)]);
        let priority: Vec<String> = ["B", "C", "A"].iter().map(|s| s.to_string()).collect();
        let (out, dropped) = correlation_group(&m, &priority, CORRELATION_THRESHOLD).unwrap();
        assert_eq!(names(&out), ["B"]);
        assert_eq!(dropped.len(), 2);
        let report = CleaningReport { dropped };
        let back = CleaningReport::from_csv(&report.to_csv().unwrap()).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.representative("A"), "B");
        assert_eq!(back.representative("B"), "B");
        assert_eq!(back.representative("Z"), "Z");
    }

    #[test]
    fn grouping_examples() {
        let a: Vec<f64> = (0..20).map(f64::from).collect();
        let noise: Vec<f64> = (0..20).map(|i| ((i * 7919) % 23) as f64).collect();
        let m = matrix(
            &["x", "noise", "x2", "x3"],
            vec![
                some(&a),
                some(&noise),
                some(&a.iter().map(|v| v * v).collect::<Vec<_>>()),
                some(&a.iter().map(|v| -v.powi(3)).collect::<Vec<_>>()),
            ],
        );
        let priority: Vec<String> = ["x3", "noise", "x", "x2"].iter().map(|s| s.to_string()).collect();
        let (out, _) = correlation_group(&m, &priority, CORRELATION_THRESHOLD).unwrap();
        assert_eq!(names(&out), ["noise", "x3"]);
        let m2 = out.clone();
        assert_eq!(correlation_group(&m2, &priority, CORRELATION_THRESHOLD).unwrap().0, out);
        assert!(correlation_group(&m, &priority[..2], CORRELATION_THRESHOLD).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let m = matrix(&["a", "b"], vec![vec![Some(1.5), None], vec![Some(f64::INFINITY), Some(-2.0)]]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "graph,a,b\ng0,1.5,inf\ng1,NA,-2\n");
        assert_eq!(FeatureMatrix::read_csv(&buf[..]).unwrap(), m);
        assert!(FeatureMatrix::read_csv("graph,a\ng0,xyz\n".as_bytes()).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = FeatureMatrix> {
        (3usize..12, 1usize..6).prop_flat_map(|(rows, cols)| {
            proptest::collection::vec(
                proptest::collection::vec(
                    prop_oneof![
                        8 => (-5i32..20).prop_map(|v| Some(v as f64)),
                        1 => Just(None),
                        1 => Just(Some(f64::INFINITY)),
                    ],
                    cols,
                ),
                rows,
            )
            .prop_map(move |values| {
                FeatureMatrix::new(
                    (0..rows).map(|i| format!("r{i}")).collect(),
                    (0..cols).map(|i| format!("f{i}")).collect(),
                    values,
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn cleaners_are_idempotent_and_order_preserving(m in arb_matrix()) {
            let priority: Vec<String> = (0..m.n_cols()).rev().map(|i| format!("f{i}")).collect();
            if let Ok((once, _)) = numerical_clean(&m) {
                let (twice, d) = numerical_clean(&once).unwrap();
                prop_assert_eq!(&twice, &once);
                prop_assert!(d.is_empty());
                let idx: Vec<usize> = once.columns().iter().map(|c| m.column_index(c).unwrap()).collect();
                prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));

                let (v1, _) = variation_clean(&once, VARIATION_THRESHOLD).unwrap();
                let (v2, _) = variation_clean(&v1, VARIATION_THRESHOLD).unwrap();
                // dropping columns does not change the statistics of the others
                prop_assert_eq!(&v2, &v1);

                let (g1, _) = correlation_group(&v1, &priority, CORRELATION_THRESHOLD).unwrap();
                let (g2, _) = correlation_group(&g1, &priority, CORRELATION_THRESHOLD).unwrap();
                prop_assert_eq!(&g2, &g1);
                // survivors are pairwise below the threshold
                for a in 0..g1.n_cols() {
                    for b in (a + 1)..g1.n_cols() {
                        if let Ok(rho) = spearman(&g1.column_values(a), &g1.column_values(b)) {
                            prop_assert!(rho.abs() <= CORRELATION_THRESHOLD);
                        }
                    }
                }
            }
        }
    }
}
