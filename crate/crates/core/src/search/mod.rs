//! Exhaustive extremal searches over trees with a fixed degree sequence.
//!
//! Prüfer rank ranges are decoded by a rayon pool of `jobs` workers, each
//! returning the set of canonical codes it saw; the union is evaluated in
//! code order, so the result does not depend on how the work was split.

mod partition;
pub mod random;
mod verify;

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::nodal::{self, NodalError, DEFAULT_TAU_REL};
use crate::perturb;
use crate::spectral::{self, SpectralError};
use crate::tree::{
    self, build_caterpillar, CanonicalCode, CaterpillarSpec, DegreeSequence, MultisetPermutations,
    RootedBoundaryTree, Tree, TreeError, Vertex,
};

pub use partition::{explore_partitions, partitions_csv, PartitionRow, CSV_HEADER};
pub use verify::{verify_suite, CheckResult, Suite, VerifyConfig, VerifyReport};

pub const DEFAULT_CAP: u128 = 10_000_000;
pub const DEFAULT_TIE_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("{count} labeled decodings exceed the cap of {cap}; try the caterpillar search")]
    CapExceeded { count: u128, cap: u128 },
    #[error("no caterpillar realizes {0}")]
    NoCaterpillar(DegreeSequence),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Nodal(#[from] NodalError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub jobs: usize,
    pub cap: u128,
    /// Relative tolerance for co-minimizers.
    pub tie_rel: f64,
    /// Relative zero threshold for Fiedler-vector entries.
    pub tau_rel: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cap: DEFAULT_CAP,
            tie_rel: DEFAULT_TIE_REL,
            tau_rel: DEFAULT_TAU_REL,
        }
    }
}

impl SearchOptions {
    pub fn serial() -> Self {
        SearchOptions {
            jobs: 1,
            ..Self::default()
        }
    }

    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .expect("thread pool")
            .install(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchKind {
    MinTree,
    MinCat,
    MinRooted,
}

/// One member of an argmin set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimizer {
    pub code: CanonicalCode,
    pub value: f64,
    pub edges: Vec<(Vertex, Vertex)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<Vertex>,
    /// Non-pendant degrees in path order, for caterpillars.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spine_degrees: Option<Vec<usize>>,
    pub is_caterpillar: bool,
    /// Monotone caterpillar shape around the characteristic set for
    /// unrooted searches, minimal rooted shape for rooted ones.
    pub shape_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characteristic: Option<nodal::CharacteristicSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub kind: SearchKind,
    pub sequence: DegreeSequence,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w0: Option<f64>,
    pub minimizers: Vec<Minimizer>,
    pub min_value: f64,
    pub all_caterpillars: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_theorem1_shape: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_minimal_shape_rooted: Option<bool>,
    pub instance_count: usize,
    #[serde(skip)]
    pub elapsed: f64,
}

/// Indices of the entries within `tie_rel` (relative) of the minimum.
fn argmin_indices(values: &[f64], tie_rel: f64) -> Vec<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (0..values.len())
        .filter(|&i| values[i] <= min + tie_rel * min.abs())
        .collect()
}

fn spine_degrees(t: &Tree) -> Option<Vec<usize>> {
    t.spine().map(|s| s.iter().map(|&v| t.degree(v)).collect())
}

/// Canonical codes of every tree with degree multiset `seq`, decoded in
/// parallel over disjoint Prüfer rank ranges.
pub fn unique_tree_codes(
    seq: &DegreeSequence,
    opts: &SearchOptions,
) -> Result<Vec<CanonicalCode>, SearchError> {
    let seq = seq.clone().validated()?.sorted();
    let total = tree::labeled_count(&seq);
    if total > opts.cap {
        return Err(SearchError::CapExceeded {
            count: total,
            cap: opts.cap,
        });
    }
    let chunks = (opts.jobs.max(1) as u128) * 8;
    let chunk = total.div_ceil(chunks).max(1024);
    let starts: Vec<u128> = (0..total.div_ceil(chunk)).map(|i| i * chunk).collect();
    let merged: BTreeSet<CanonicalCode> = opts.install(|| {
        starts
            .par_iter()
            .map(|&s| tree::unique_codes_in_range(&seq, s, chunk.min(total - s)))
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    });
    Ok(merged.into_iter().collect())
}

/// Every tree with `seq` and its algebraic connectivity, in code order.
pub fn tree_scan(
    seq: &DegreeSequence,
    opts: &SearchOptions,
) -> Result<Vec<(CanonicalCode, Tree, f64)>, SearchError> {
    let codes = unique_tree_codes(seq, opts)?;
    opts.install(|| {
        codes
            .into_par_iter()
            .map(|code| {
                let t = tree::tree_from_code(&code)?;
                let alpha = spectral::algebraic_connectivity(&t)?.value;
                Ok((code, t, alpha))
            })
            .collect()
    })
}

fn tree_minimizer(
    code: CanonicalCode,
    t: &Tree,
    value: f64,
    opts: &SearchOptions,
) -> Result<Minimizer, SearchError> {
    let analysis = nodal::analyze(t, opts.tau_rel)?;
    Ok(Minimizer {
        code,
        value,
        edges: t.edges().into_iter().map(|(u, v, _)| (u, v)).collect(),
        root: None,
        spine_degrees: spine_degrees(t),
        is_caterpillar: t.is_caterpillar(),
        shape_ok: perturb::is_theorem1_shape(t, &analysis),
        characteristic: Some(analysis.charset),
    })
}

fn tree_report(
    kind: SearchKind,
    seq: &DegreeSequence,
    scan: Vec<(CanonicalCode, Tree, f64)>,
    opts: &SearchOptions,
    started: Instant,
) -> Result<SearchReport, SearchError> {
    let values: Vec<f64> = scan.iter().map(|e| e.2).collect();
    let mut minimizers = argmin_indices(&values, opts.tie_rel)
        .into_iter()
        .map(|i| tree_minimizer(scan[i].0.clone(), &scan[i].1, scan[i].2, opts))
        .collect::<Result<Vec<_>, _>>()?;
    minimizers.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.code.cmp(&b.code)));
    Ok(SearchReport {
        kind,
        sequence: seq.clone().sorted(),
        w0: None,
        min_value: minimizers[0].value,
        all_caterpillars: minimizers.iter().all(|m| m.is_caterpillar),
        all_theorem1_shape: Some(minimizers.iter().all(|m| m.shape_ok)),
        all_minimal_shape_rooted: None,
        instance_count: scan.len(),
        minimizers,
        elapsed: started.elapsed().as_secs_f64(),
    })
}

/// Exact argmin of α over all unlabeled trees with degree multiset `seq`.
pub fn min_alpha_tree(seq: &DegreeSequence, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    let started = Instant::now();
    let scan = tree_scan(seq, opts)?;
    tree_report(SearchKind::MinTree, seq, scan, opts, started)
}

/// Distinct orders of the non-pendant degrees along a spine, one per
/// reversal pair (the lexicographically smaller one), sorted.
pub fn spine_arrangements(seq: &DegreeSequence) -> Vec<Vec<usize>> {
    MultisetPermutations::new(seq.interior_degrees())
        .filter(|a| {
            let rev: Vec<usize> = a.iter().rev().copied().collect();
            *a <= rev
        })
        .collect()
}

/// Argmin of α over the caterpillars with degree multiset `seq`.
pub fn min_alpha_caterpillar(
    seq: &DegreeSequence,
    opts: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    let started = Instant::now();
    let seq = seq.clone().validated()?;
    if seq.pendant_count() < 2 {
        return Err(SearchError::NoCaterpillar(seq));
    }
    let arrangements = spine_arrangements(&seq);
    let scan: Vec<(CanonicalCode, Tree, f64)> = opts.install(|| {
        arrangements
            .into_par_iter()
            .map(|arr| {
                let t = build_caterpillar(&CaterpillarSpec::new(arr))?;
                let alpha = spectral::algebraic_connectivity(&t)?.value;
                Ok((t.canonical_code(), t, alpha))
            })
            .collect::<Result<_, SearchError>>()
    })?;
    let mut report = tree_report(SearchKind::MinCat, &seq, scan, opts, started)?;
    for m in &mut report.minimizers {
        m.spine_degrees = m.spine_degrees.take().map(|mut s| {
            let rev: Vec<usize> = s.iter().rev().copied().collect();
            if rev < s {
                s = rev;
            }
            s
        });
    }
    Ok(report)
}

/// Every rooted tree with `seq` (boundary weight `w0`) and its first
/// Dirichlet eigenvalue, in rooted-code order.
pub fn rooted_scan(
    seq: &DegreeSequence,
    w0: f64,
    opts: &SearchOptions,
) -> Result<Vec<(CanonicalCode, RootedBoundaryTree, f64)>, SearchError> {
    let seq = seq.clone().validated()?;
    let total = tree::labeled_count(&seq);
    if total > opts.cap {
        return Err(SearchError::CapExceeded {
            count: total,
            cap: opts.cap,
        });
    }
    let rooted = tree::enumerate_rooted_trees(&seq, w0)?;
    opts.install(|| {
        rooted
            .into_par_iter()
            .map(|rbt| {
                let nu = spectral::dirichlet_nu(&rbt)?.value;
                Ok((rbt.canonical_code(), rbt, nu))
            })
            .collect()
    })
}

/// Argmin of the first Dirichlet eigenvalue over rooted trees with `seq`.
pub fn min_nu_rooted(
    seq: &DegreeSequence,
    w0: f64,
    opts: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    let started = Instant::now();
    let scan = rooted_scan(seq, w0, opts)?;
    let values: Vec<f64> = scan.iter().map(|e| e.2).collect();
    let mut minimizers: Vec<Minimizer> = argmin_indices(&values, opts.tie_rel)
        .into_iter()
        .map(|i| {
            let (code, rbt, nu) = &scan[i];
            let t = rbt.tree();
            Minimizer {
                code: code.clone(),
                value: *nu,
                edges: t.edges().into_iter().map(|(u, v, _)| (u, v)).collect(),
                root: Some(rbt.root()),
                spine_degrees: spine_degrees(t),
                is_caterpillar: t.is_caterpillar(),
                shape_ok: perturb::is_minimal_shape_rooted(rbt),
                characteristic: None,
            }
        })
        .collect();
    minimizers.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.code.cmp(&b.code)));
    Ok(SearchReport {
        kind: SearchKind::MinRooted,
        sequence: seq.clone().sorted(),
        w0: Some(w0),
        min_value: minimizers[0].value,
        all_caterpillars: minimizers.iter().all(|m| m.is_caterpillar),
        all_theorem1_shape: None,
        all_minimal_shape_rooted: Some(minimizers.iter().all(|m| m.shape_ok)),
        instance_count: scan.len(),
        minimizers,
        elapsed: started.elapsed().as_secs_f64(),
    })
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Serializes `value` to JSON with every float rounded to 12 significant
/// digits.
pub fn rounded_json<T: Serialize>(value: &T) -> serde_json::Value {
    fn walk(v: serde_json::Value) -> serde_json::Value {
        use serde_json::Value;
        match v {
            Value::Number(n) if n.is_f64() => {
                let x = round_sig(n.as_f64().unwrap());
                serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
            }
            Value::Array(items) => Value::Array(items.into_iter().map(walk).collect()),
            Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, walk(v))).collect()),
            other => other,
        }
    }
    walk(serde_json::to_value(value).expect("serializable report"))
}
