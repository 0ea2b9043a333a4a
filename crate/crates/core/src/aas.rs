//! Algorithm-selection harness: ERT aggregation, single-best and
//! virtual-best baselines, feature-cost accounting, distance-based
//! selectors, leave-out cross-validation and the usual scores.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::ela::FeatureVector;
use crate::error::{Error, Result};
use crate::math::{euclidean, mean, median, sqrt};

pub const DEFAULT_PENALTY: f64 = 10.0;

/// Label attached to reports produced with cost-sensitive voting.
pub const COST_SENSITIVE_CONVENTION: &str =
    "relative-regret voting: cost(a) = (ert(a) - min ert) / mean ert per training instance";

/// One optimizer run on one problem instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerformanceRecord {
    pub fid: String,
    pub iid: String,
    pub algorithm: String,
    pub run: u64,
    pub evaluations: u64,
    pub success: bool,
    pub budget: u64,
}

impl PerformanceRecord {
    pub fn validate(&self) -> Result<()> {
        if self.evaluations == 0 || self.budget == 0 {
            return Err(Error::InvalidPerformance(format!(
                "{}/{}/{} run {}: evaluations and budget must be positive",
                self.fid, self.iid, self.algorithm, self.run
            )));
        }
        if self.evaluations > self.budget {
            return Err(Error::InvalidPerformance(format!(
                "{}/{}/{} run {}: {} evaluations exceed budget {}",
                self.fid, self.iid, self.algorithm, self.run, self.evaluations, self.budget
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InstanceKey {
    pub fid: String,
    pub iid: String,
}

impl InstanceKey {
    pub fn new(fid: impl Into<String>, iid: impl Into<String>) -> Self {
        Self { fid: fid.into(), iid: iid.into() }
    }
}

/// Evaluations spent over all runs divided by the number of successful
/// runs; infinite without a success.
pub fn compute_ert(records: &[PerformanceRecord]) -> f64 {
    let successes = records.iter().filter(|r| r.success).count();
    if successes == 0 {
        return f64::INFINITY;
    }
    let total: u64 = records.iter().map(|r| r.evaluations).sum();
    total as f64 / successes as f64
}

/// Replaces an infinite ERT by `budget * runs * penalty`.
pub fn impute_ert(ert: f64, budget: u64, runs: usize, penalty: f64) -> f64 {
    if ert.is_finite() {
        ert
    } else {
        budget as f64 * runs as f64 * penalty
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErtCell {
    pub ert: f64,
    pub runs: usize,
    pub successes: usize,
    pub total_evaluations: u64,
    pub min_evaluations: u64,
    pub budget: u64,
    pub imputed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationEntry {
    pub fid: String,
    pub iid: String,
    pub algorithm: String,
    pub budget: u64,
    pub runs: usize,
    pub penalty: f64,
    pub value: f64,
}

/// ERT per (instance, algorithm). Every instance carries every algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ErtTable {
    instances: Vec<InstanceKey>,
    algorithms: Vec<String>,
    /// `cells[i][a]` for instance `i` and algorithm `a`.
    cells: Vec<Vec<ErtCell>>,
}

impl ErtTable {
    pub fn from_records(records: &[PerformanceRecord]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidPerformance("no performance records".into()));
        }
        let mut groups: BTreeMap<(InstanceKey, String), Vec<&PerformanceRecord>> = BTreeMap::new();
        for r in records {
            r.validate()?;
            groups
                .entry((InstanceKey::new(r.fid.clone(), r.iid.clone()), r.algorithm.clone()))
                .or_default()
                .push(r);
        }
        let instances: Vec<InstanceKey> = groups.keys().map(|k| k.0.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let algorithms: Vec<String> = groups.keys().map(|k| k.1.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let mut cells = Vec::with_capacity(instances.len());
        for inst in &instances {
            let mut row = Vec::with_capacity(algorithms.len());
            for alg in &algorithms {
                let runs = groups.get(&(inst.clone(), alg.clone())).ok_or_else(|| {
                    Error::InvalidPerformance(format!("no runs of {alg} on {}/{}", inst.fid, inst.iid))
                })?;
                let mut seen = BTreeSet::new();
                for r in runs {
                    if !seen.insert(r.run) {
                        return Err(Error::InvalidPerformance(format!(
                            "duplicate run {} of {alg} on {}/{}",
                            r.run, inst.fid, inst.iid
                        )));
                    }
                }
                let owned: Vec<PerformanceRecord> = runs.iter().map(|r| (*r).clone()).collect();
                row.push(ErtCell {
                    ert: compute_ert(&owned),
                    runs: owned.len(),
                    successes: owned.iter().filter(|r| r.success).count(),
                    total_evaluations: owned.iter().map(|r| r.evaluations).sum(),
                    min_evaluations: owned.iter().map(|r| r.evaluations).min().unwrap_or(0),
                    budget: owned.iter().map(|r| r.budget).max().unwrap_or(0),
                    imputed: false,
                });
            }
            cells.push(row);
        }
        Ok(Self { instances, algorithms, cells })
    }

    /// Builds a table straight from ERT values, `erts[i][a]`.
    pub fn from_erts(instances: Vec<InstanceKey>, algorithms: Vec<String>, erts: &[Vec<f64>]) -> Result<Self> {
        if instances.is_empty() || algorithms.is_empty() {
            return Err(Error::InvalidPerformance("empty table".into()));
        }
        let distinct_i: BTreeSet<_> = instances.iter().collect();
        let distinct_a: BTreeSet<_> = algorithms.iter().collect();
        if distinct_i.len() != instances.len() || distinct_a.len() != algorithms.len() {
            return Err(Error::InvalidPerformance("duplicate instance or algorithm".into()));
        }
        if erts.len() != instances.len() || erts.iter().any(|r| r.len() != algorithms.len()) {
            return Err(Error::InvalidPerformance("ERT matrix shape mismatch".into()));
        }
        if erts.iter().flatten().any(|&e| e.is_nan() || e <= 0.0) {
            return Err(Error::InvalidPerformance("ERT values must be positive".into()));
        }
        // keep the sorted layout that from_records produces
        let mut order: Vec<usize> = (0..instances.len()).collect();
        order.sort_by(|&a, &b| instances[a].cmp(&instances[b]));
        let mut aorder: Vec<usize> = (0..algorithms.len()).collect();
        aorder.sort_by(|&a, &b| algorithms[a].cmp(&algorithms[b]));
        let cells = order
            .iter()
            .map(|&i| {
                aorder
                    .iter()
                    .map(|&a| ErtCell {
                        ert: erts[i][a],
                        runs: 1,
                        successes: usize::from(erts[i][a].is_finite()),
                        total_evaluations: 0,
                        min_evaluations: 0,
                        budget: 0,
                        imputed: false,
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            instances: order.iter().map(|&i| instances[i].clone()).collect(),
            algorithms: aorder.iter().map(|&a| algorithms[a].clone()).collect(),
            cells,
        })
    }

    pub fn instances(&self) -> &[InstanceKey] {
        &self.instances
    }

    pub fn algorithms(&self) -> &[String] {
        &self.algorithms
    }

    pub fn cell(&self, instance: usize, algorithm: usize) -> &ErtCell {
        &self.cells[instance][algorithm]
    }

    pub fn ert(&self, instance: usize, algorithm: usize) -> f64 {
        self.cells[instance][algorithm].ert
    }

    pub fn instance_index(&self, key: &InstanceKey) -> Option<usize> {
        self.instances.binary_search(key).ok()
    }

    pub fn algorithm_index(&self, name: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a == name)
    }

    pub fn is_imputed(&self) -> bool {
        self.cells.iter().flatten().all(|c| c.ert.is_finite())
    }

    /// Replaces every infinite ERT; the log lists each replacement.
    pub fn impute(&self, penalty: f64) -> Result<(ErtTable, Vec<ImputationEntry>)> {
        if !(penalty >= 1.0) || !penalty.is_finite() {
            return Err(Error::InvalidArgument(format!("penalty must be >= 1, got {penalty}")));
        }
        let mut out = self.clone();
        let mut log = Vec::new();
        for (i, row) in out.cells.iter_mut().enumerate() {
            for (a, c) in row.iter_mut().enumerate() {
                if c.ert.is_finite() {
                    continue;
                }
                if c.budget == 0 {
                    return Err(Error::InvalidPerformance(format!(
                        "cannot impute {}/{}/{} without a budget",
                        self.instances[i].fid, self.instances[i].iid, self.algorithms[a]
                    )));
                }
                c.ert = impute_ert(c.ert, c.budget, c.runs, penalty);
                c.imputed = true;
                log.push(ImputationEntry {
                    fid: self.instances[i].fid.clone(),
                    iid: self.instances[i].iid.clone(),
                    algorithm: self.algorithms[a].clone(),
                    budget: c.budget,
                    runs: c.runs,
                    penalty,
                    value: c.ert,
                });
            }
        }
        Ok((out, log))
    }

    fn require_imputed(&self) -> Result<()> {
        if self.is_imputed() {
            Ok(())
        } else {
            Err(Error::InvalidPerformance("table contains infinite ERTs; impute first".into()))
        }
    }

    /// Per-instance best algorithm index; ties go to the smaller name.
    pub fn best_algorithms(&self) -> Vec<usize> {
        self.cells.iter().map(|row| argmin(row.iter().map(|c| c.ert))).collect()
    }
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for (i, v) in values.enumerate() {
        if v < best_v || i == 0 {
            best = i;
            best_v = v;
        }
    }
    best
}

/// Algorithm with the smallest mean ERT over all instances.
pub fn sbs(table: &ErtTable) -> Result<String> {
    table.require_imputed()?;
    let n = table.instances.len() as f64;
    let means = (0..table.algorithms.len()).map(|a| table.cells.iter().map(|r| r[a].ert).sum::<f64>() / n);
    Ok(table.algorithms[argmin(means)].clone())
}

/// Per-instance minimum ERT over algorithms.
pub fn vbs_performance(table: &ErtTable) -> Result<Vec<f64>> {
    table.require_imputed()?;
    Ok(table
        .cells
        .iter()
        .map(|r| r.iter().map(|c| c.ert).fold(f64::INFINITY, f64::min))
        .collect())
}

/// Charges the `n` initial-design evaluations on top of each selection.
pub fn feature_cost_adjust(perf: &[f64], n: u64) -> Vec<f64> {
    perf.iter().map(|p| p + n as f64).collect()
}

/// `(sbs - model) / (sbs - vbs)`.
pub fn gap_closure(sbs_mean: f64, vbs_mean: f64, model_mean: f64) -> Result<f64> {
    if !(sbs_mean > vbs_mean) || !sbs_mean.is_finite() || !vbs_mean.is_finite() {
        return Err(Error::Degenerate(format!(
            "gap closure undefined for SBS mean {sbs_mean} and VBS mean {vbs_mean}"
        )));
    }
    Ok((sbs_mean - model_mean) / (sbs_mean - vbs_mean))
}

/// Unweighted mean of per-class F1 scores; `confusion[true][predicted]`.
pub fn f1_macro(confusion: &[Vec<u64>]) -> f64 {
    let k = confusion.len();
    if k == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let predicted: u64 = confusion.iter().map(|r| r[c]).sum();
        let actual: u64 = confusion[c].iter().sum();
        let precision = if predicted > 0 { tp / predicted as f64 } else { 0.0 };
        let recall = if actual > 0 { tp / actual as f64 } else { 0.0 };
        if precision + recall > 0.0 {
            total += 2.0 * precision * recall / (precision + recall);
        }
    }
    total / k as f64
}

/// Feature rows aligned with instances, optionally carrying a group label
/// for leave-group-out evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub instances: Vec<InstanceKey>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub groups: Option<Vec<String>>,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>, instances: Vec<InstanceKey>, rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if rows.len() != instances.len() {
            return Err(Error::InvalidArgument("one feature row per instance required".into()));
        }
        if rows.iter().any(|r| r.len() != names.len()) {
            return Err(Error::InvalidArgument("feature row width differs from the header".into()));
        }
        if instances.iter().collect::<BTreeSet<_>>().len() != instances.len() {
            return Err(Error::InvalidArgument("duplicate instance in feature matrix".into()));
        }
        if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("feature values must be finite or missing".into()));
        }
        Ok(Self { names, instances, rows, groups: None })
    }

    /// Columns follow the first vector's feature order.
    pub fn from_vectors(instances: Vec<InstanceKey>, vectors: &[FeatureVector]) -> Result<Self> {
        let names: Vec<String> = vectors.first().map(|v| v.names().map(String::from).collect()).unwrap_or_default();
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != names.len() || v.names().zip(&names).any(|(a, b)| a != b) {
                return Err(Error::InvalidArgument("feature vectors carry different feature sets".into()));
            }
            rows.push(v.iter().map(|(_, f)| f.value()).collect());
        }
        Self::new(names, instances, rows)
    }

    pub fn with_groups(mut self, groups: Vec<String>) -> Result<Self> {
        if groups.len() != self.instances.len() {
            return Err(Error::InvalidArgument("one group label per instance required".into()));
        }
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn subset(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            names: self.names.clone(),
            instances: idx.iter().map(|&i| self.instances[i].clone()).collect(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            groups: self.groups.as_ref().map(|g| idx.iter().map(|&i| g[i].clone()).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    #[default]
    Knn,
    NearestCentroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectorParams {
    pub kind: SelectorKind,
    pub k: usize,
    pub cost_sensitive: bool,
}

impl Default for SelectorParams {
    fn default() -> Self {
        Self { kind: SelectorKind::Knn, k: 1, cost_sensitive: false }
    }
}

/// A trained feature-to-algorithm mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorModel {
    pub params: SelectorParams,
    pub algorithms: Vec<String>,
    pub feature_names: Vec<String>,
    /// Indices into `feature_names` of the columns used for distances.
    pub kept: Vec<usize>,
    /// Constant or entirely missing training columns.
    pub dropped: Vec<String>,
    pub medians: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// Missing training values replaced by the column median.
    pub imputed_values: usize,
    pub train: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Relative regret of each algorithm on each training instance.
    pub costs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub fn train_selector(features: &FeatureMatrix, table: &ErtTable, params: SelectorParams) -> Result<SelectorModel> {
    table.require_imputed()?;
    let n = features.len();
    if params.k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if n < params.k || n == 0 {
        return Err(Error::InvalidArgument(format!("{n} training instances for k = {}", params.k)));
    }
    let table_rows: Vec<usize> = features
        .instances
        .iter()
        .map(|key| {
            table.instance_index(key).ok_or_else(|| {
                Error::InvalidPerformance(format!("no performance data for {}/{}", key.fid, key.iid))
            })
        })
        .collect::<Result<_>>()?;
    let best = table.best_algorithms();
    let labels: Vec<usize> = table_rows.iter().map(|&t| best[t]).collect();
    let mut costs = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &t in &table_rows {
        let erts: Vec<f64> = (0..table.algorithms.len()).map(|a| table.ert(t, a)).collect();
        let lo = erts.iter().copied().fold(f64::INFINITY, f64::min);
        let m = mean(&erts);
        costs.push(erts.iter().map(|e| (e - lo) / m).collect());
        weights.push((m - lo) / m);
    }

    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let (mut medians, mut means, mut sds) = (Vec::new(), Vec::new(), Vec::new());
    let mut imputed_values = 0;
    for (j, name) in features.names.iter().enumerate() {
        let present: Vec<f64> = features.rows.iter().filter_map(|r| r[j]).collect();
        if present.is_empty() {
            dropped.push(name.clone());
            continue;
        }
        let med = median(&present);
        let col: Vec<f64> = features.rows.iter().map(|r| r[j].unwrap_or(med)).collect();
        let mu = mean(&col);
        let var = col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n as f64;
        let sd = sqrt(var);
        if !(sd > 0.0) || !sd.is_finite() {
            dropped.push(name.clone());
            continue;
        }
        imputed_values += n - present.len();
        kept.push(j);
        medians.push(med);
        means.push(mu);
        sds.push(sd);
    }
    let mut model = SelectorModel {
        params,
        algorithms: table.algorithms.clone(),
        feature_names: features.names.clone(),
        kept,
        dropped,
        medians,
        means,
        sds,
        imputed_values,
        train: Vec::new(),
        labels,
        costs,
        weights,
    };
    model.train = features.rows.iter().map(|r| model.standardize(r)).collect::<Result<_>>()?;
    Ok(model)
}

impl SelectorModel {
    fn standardize(&self, row: &[Option<f64>]) -> Result<Vec<f64>> {
        if row.len() != self.feature_names.len() {
            return Err(Error::InvalidArgument(format!(
                "query has {} features, model expects {}",
                row.len(),
                self.feature_names.len()
            )));
        }
        self.kept
            .iter()
            .enumerate()
            .map(|(c, &j)| {
                let v = (row[j].unwrap_or(self.medians[c]) - self.means[c]) / self.sds[c];
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite(j))
                }
            })
            .collect()
    }

    /// Index into `algorithms` of the predicted algorithm.
    pub fn predict_index(&self, row: &[Option<f64>]) -> Result<usize> {
        let q = self.standardize(row)?;
        Ok(match self.params.kind {
            SelectorKind::Knn => self.vote_knn(&q),
            SelectorKind::NearestCentroid => self.nearest_centroid(&q),
        })
    }

    pub fn predict(&self, row: &[Option<f64>]) -> Result<&str> {
        Ok(&self.algorithms[self.predict_index(row)?])
    }

    fn vote_knn(&self, q: &[f64]) -> usize {
        let mut order: Vec<(f64, usize)> = self.train.iter().enumerate().map(|(i, t)| (euclidean(q, t), i)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let neighbors = &order[..self.params.k];
        let mut score = vec![0.0; self.algorithms.len()];
        for &(_, i) in neighbors {
            if self.params.cost_sensitive {
                for (s, c) in score.iter_mut().zip(&self.costs[i]) {
                    *s += c;
                }
            } else {
                score[self.labels[i]] -= 1.0;
            }
        }
        argmin(score.into_iter())
    }

    fn nearest_centroid(&self, q: &[f64]) -> usize {
        let dims = self.kept.len();
        let mut best = (f64::INFINITY, 0);
        for a in 0..self.algorithms.len() {
            let members: Vec<usize> = (0..self.train.len()).filter(|&i| self.labels[i] == a).collect();
            if members.is_empty() {
                continue;
            }
            let weighted = self.params.cost_sensitive && members.iter().any(|&i| self.weights[i] > 0.0);
            let w = |i: usize| if weighted { self.weights[i] } else { 1.0 };
            let total: f64 = members.iter().map(|&i| w(i)).sum();
            let mut centroid = vec![0.0; dims];
            for &i in &members {
                for (c, v) in centroid.iter_mut().zip(&self.train[i]) {
                    *c += w(i) * v / total;
                }
            }
            let d = euclidean(q, &centroid);
            if d < best.0 {
                best = (d, a);
            }
        }
        best.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvScheme {
    LeaveIidOut,
    LeaveFidOut,
    LeaveGroupOut,
}

impl CvScheme {
    pub fn name(&self) -> &'static str {
        match self {
            CvScheme::LeaveIidOut => "leave_iid_out",
            CvScheme::LeaveFidOut => "leave_fid_out",
            CvScheme::LeaveGroupOut => "leave_group_out",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvOptions {
    pub penalty: f64,
    /// Initial-design evaluations charged per selection; 0 disables.
    pub feature_cost: u64,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self { penalty: DEFAULT_PENALTY, feature_cost: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub fid: String,
    pub iid: String,
    pub group: Option<String>,
    pub fold: String,
    pub selected: String,
    pub best: String,
    pub selected_ert: f64,
    /// `selected_ert` plus the feature cost.
    pub model_ert: f64,
    pub vbs_ert: f64,
    pub sbs_ert: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instances: usize,
    pub sbs_mean: f64,
    pub vbs_mean: f64,
    pub model_mean: f64,
    /// `None` when the SBS mean does not exceed the VBS mean.
    pub gap_closure: Option<f64>,
}

impl Summary {
    pub fn of(selections: &[&Selection]) -> Self {
        let m = |f: fn(&Selection) -> f64| mean(&selections.iter().map(|s| f(s)).collect::<Vec<_>>());
        let (sbs_mean, vbs_mean, model_mean) = (m(|s| s.sbs_ert), m(|s| s.vbs_ert), m(|s| s.model_ert));
        Self {
            instances: selections.len(),
            sbs_mean,
            vbs_mean,
            model_mean,
            gap_closure: gap_closure(sbs_mean, vbs_mean, model_mean).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub key: String,
    pub test: Vec<InstanceKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub scheme: CvScheme,
    pub params: SelectorParams,
    pub options: CvOptions,
    pub cost_sensitive_convention: Option<String>,
    pub algorithms: Vec<String>,
    pub sbs: String,
    pub pooled: Summary,
    /// Keyed by group label when groups are present, else by fid.
    pub per_group: BTreeMap<String, Summary>,
    pub folds: Vec<Fold>,
    pub selections: Vec<Selection>,
    /// `confusion[best][selected]` in `algorithms` order.
    pub confusion: Vec<Vec<u64>>,
    pub f1_macro: f64,
    pub imputation: Vec<ImputationEntry>,
}

fn fold_keys(features: &FeatureMatrix, scheme: CvScheme) -> Result<Vec<String>> {
    Ok(match scheme {
        CvScheme::LeaveIidOut => features.instances.iter().map(|k| k.iid.clone()).collect(),
        CvScheme::LeaveFidOut => features.instances.iter().map(|k| k.fid.clone()).collect(),
        CvScheme::LeaveGroupOut => features
            .groups
            .clone()
            .ok_or_else(|| Error::InvalidFolds("leave_group_out needs group labels".into()))?,
    })
}

/// Partition of row indices into folds, ordered by fold key.
pub fn make_folds(features: &FeatureMatrix, scheme: CvScheme) -> Result<Vec<(String, Vec<usize>)>> {
    let keys = fold_keys(features, scheme)?;
    let mut folds: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        folds.entry(k).or_default().push(i);
    }
    if folds.len() < 2 {
        return Err(Error::InvalidFolds(format!(
            "{} yields {} fold(s); at least 2 are required",
            scheme.name(),
            folds.len()
        )));
    }
    Ok(folds.into_iter().collect())
}

/// Trains on all folds but one and predicts the held-out instances, for
/// every fold. Infinite ERTs are imputed with `options.penalty` first.
pub fn cross_validate(
    features: &FeatureMatrix,
    table: &ErtTable,
    scheme: CvScheme,
    params: SelectorParams,
    options: CvOptions,
) -> Result<CvReport> {
    let (table, imputation) = table.impute(options.penalty)?;
    let feature_keys: BTreeSet<&InstanceKey> = features.instances.iter().collect();
    if feature_keys.len() != table.instances.len() || table.instances.iter().any(|k| !feature_keys.contains(k)) {
        return Err(Error::InvalidArgument(
            "features and performance data must cover the same instances".into(),
        ));
    }
    let folds = make_folds(features, scheme)?;
    let sbs_name = sbs(&table)?;
    let sbs_idx = table.algorithm_index(&sbs_name).unwrap_or(0);
    let vbs = vbs_performance(&table)?;
    let best = table.best_algorithms();

    let mut selections: Vec<Option<Selection>> = vec![None; features.len()];
    let mut fold_info = Vec::with_capacity(folds.len());
    for (key, test) in &folds {
        let train_idx: Vec<usize> = (0..features.len()).filter(|i| !test.contains(i)).collect();
        if train_idx.is_empty() {
            return Err(Error::InvalidFolds(format!("fold {key} leaves no training instances")));
        }
        let model = train_selector(&features.subset(&train_idx), &table, params)
            .map_err(|e| match e {
                Error::InvalidArgument(m) => Error::InvalidFolds(format!("fold {key}: {m}")),
                other => other,
            })?;
        for &i in test {
            let t = table.instance_index(&features.instances[i]).unwrap_or(0);
            let a = model.predict_index(&features.rows[i])?;
            let selected_ert = table.ert(t, a);
            selections[i] = Some(Selection {
                fid: features.instances[i].fid.clone(),
                iid: features.instances[i].iid.clone(),
                group: features.groups.as_ref().map(|g| g[i].clone()),
                fold: key.clone(),
                selected: table.algorithms[a].clone(),
                best: table.algorithms[best[t]].clone(),
                selected_ert,
                model_ert: feature_cost_adjust(&[selected_ert], options.feature_cost)[0],
                vbs_ert: vbs[t],
                sbs_ert: table.ert(t, sbs_idx),
            });
        }
        fold_info.push(Fold {
            key: key.clone(),
            test: test.iter().map(|&i| features.instances[i].clone()).collect(),
        });
    }
    let selections: Vec<Selection> = selections.into_iter().flatten().collect();

    let k = table.algorithms.len();
    let mut confusion = vec![vec![0u64; k]; k];
    for s in &selections {
        let (b, p) = (table.algorithm_index(&s.best), table.algorithm_index(&s.selected));
        if let (Some(b), Some(p)) = (b, p) {
            confusion[b][p] += 1;
        }
    }
    let mut by_group: BTreeMap<String, Vec<&Selection>> = BTreeMap::new();
    for s in &selections {
        let g = s.group.clone().unwrap_or_else(|| s.fid.clone());
        by_group.entry(g).or_default().push(s);
    }
    let all: Vec<&Selection> = selections.iter().collect();
    Ok(CvReport {
        scheme,
        params,
        options,
        cost_sensitive_convention: params.cost_sensitive.then(|| COST_SENSITIVE_CONVENTION.to_string()),
        algorithms: table.algorithms.clone(),
        sbs: sbs_name,
        pooled: Summary::of(&all),
        per_group: by_group.into_iter().map(|(g, v)| (g, Summary::of(&v))).collect(),
        folds: fold_info,
        f1_macro: f1_macro(&confusion),
        confusion,
        selections,
        imputation,
    })
}
