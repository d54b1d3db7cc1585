//! Property suites checking the structure theorems against exhaustive
//! enumeration and seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::random::{random_rooted_caterpillar, random_rooted_tree, random_tree};
use super::{argmin_indices, min_alpha_caterpillar, min_alpha_tree, rooted_scan, SearchOptions};
use crate::nodal;
use crate::perturb::{self, PerturbKind, PerturbationRecord, DEFAULT_STRICT_MARGIN};
use crate::spectral;
use crate::tree::{self, RootedBoundaryTree, Tree, Vertex};

/// Boundary weights swept by the rooted suites.
pub const BOUNDARY_WEIGHTS: [f64; 3] = [1.0, 1.5, 3.0];
/// Exhaustive part of the split suite stops at this many vertices.
pub const SPLIT_EXHAUSTIVE_MAX: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorem1,
    Lemma2,
    Lemma5,
    Perturb,
    Glue,
    Split,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Theorem1,
        Suite::Lemma2,
        Suite::Lemma5,
        Suite::Perturb,
        Suite::Glue,
        Suite::Split,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Lemma2 => "lemma2",
            Suite::Lemma5 => "lemma5",
            Suite::Perturb => "perturb",
            Suite::Glue => "glue",
            Suite::Split => "split",
            Suite::All => "all",
        }
    }

    fn salt(self) -> u64 {
        Suite::EACH.iter().position(|&s| s == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub nmax: usize,
    pub samples: usize,
    pub rng_seed: u64,
    pub strict_margin: f64,
    pub opts: SearchOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            nmax: 8,
            samples: 100,
            rng_seed: 0,
            strict_margin: DEFAULT_STRICT_MARGIN,
            opts: SearchOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    /// First failing instance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub nmax: usize,
    pub samples: usize,
    pub rng_seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Case outcome: `Err` carries the counterexample dump.
type Outcome = Result<(), Value>;

struct Check {
    result: CheckResult,
}

impl Check {
    fn new(name: impl Into<String>) -> Self {
        Check {
            result: CheckResult {
                name: name.into(),
                passed: true,
                cases: 0,
                failures: 0,
                counterexample: None,
            },
        }
    }

    fn record(&mut self, outcome: Outcome) {
        self.result.cases += 1;
        if let Err(dump) = outcome {
            self.result.passed = false;
            self.result.failures += 1;
            self.result.counterexample.get_or_insert(dump);
        }
    }

    fn extend(mut self, outcomes: impl IntoIterator<Item = Outcome>) -> Self {
        outcomes.into_iter().for_each(|o| self.record(o));
        self
    }

    fn done(self) -> CheckResult {
        self.result
    }
}

fn edges_json(t: &Tree) -> Value {
    let edges: Vec<Value> = t
        .edges()
        .into_iter()
        .map(|(u, v, w)| if w == 1.0 { json!([u, v]) } else { json!([u, v, w]) })
        .collect();
    Value::Array(edges)
}

fn rooted_json(rbt: &RootedBoundaryTree) -> Value {
    json!({
        "code": rbt.canonical_code(),
        "root": rbt.root(),
        "w0": rbt.boundary_weight(),
        "edges": edges_json(rbt.tree()),
    })
}

fn sequences(lo: usize, hi: usize) -> Vec<tree::DegreeSequence> {
    (lo..=hi).flat_map(tree::all_tree_sequences).collect()
}

/// Runs one suite (or all of them). Random draws come from a ChaCha8
/// stream seeded by `rng_seed` and the suite, so `all` repeats the
/// individual suites exactly.
pub fn verify_suite(suite: Suite, cfg: &VerifyConfig) -> VerifyReport {
    let checks = match suite {
        Suite::All => Suite::EACH.iter().flat_map(|&s| run(s, cfg)).collect(),
        s => run(s, cfg),
    };
    VerifyReport {
        suite,
        nmax: cfg.nmax,
        samples: cfg.samples,
        rng_seed: cfg.rng_seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn run(suite: Suite, cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ suite.salt());
    match suite {
        Suite::Theorem1 => caterpillar_minimizers(cfg),
        Suite::Lemma2 => monotone_eigenvectors(cfg),
        Suite::Lemma5 => rooted_minimizers(cfg),
        Suite::Perturb => perturbations(cfg, &mut rng),
        Suite::Glue => gluing(cfg, &mut rng),
        Suite::Split => split(cfg, &mut rng),
        Suite::All => unreachable!(),
    }
}

fn caterpillar_minimizers(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut caterpillar = Check::new("theorem1_caterpillar");
    let mut shape = Check::new("theorem1_shape");
    let mut consistency = Check::new("caterpillar_consistency");
    for seq in sequences(2, cfg.nmax) {
        let full = match min_alpha_tree(&seq, &cfg.opts) {
            Ok(r) => r,
            Err(e) => {
                let dump = json!({ "sequence": seq, "error": e.to_string() });
                caterpillar.record(Err(dump.clone()));
                shape.record(Err(dump));
                continue;
            }
        };
        for m in &full.minimizers {
            let dump = || json!({ "sequence": seq, "minimizer": m });
            caterpillar.record(if m.is_caterpillar { Ok(()) } else { Err(dump()) });
            shape.record(if m.shape_ok { Ok(()) } else { Err(dump()) });
        }
        consistency.record(match min_alpha_caterpillar(&seq, &cfg.opts) {
            Ok(cat) if (cat.min_value - full.min_value).abs() <= 1e-10 * full.min_value => Ok(()),
            Ok(cat) => Err(json!({
                "sequence": seq,
                "min_tree": full.min_value,
                "min_caterpillar": cat.min_value,
            })),
            Err(e) => Err(json!({ "sequence": seq, "error": e.to_string() })),
        });
    }
    vec![caterpillar.done(), shape.done(), consistency.done()]
}

fn monotone_eigenvectors(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for w0 in BOUNDARY_WEIGHTS {
        let outcomes: Vec<Outcome> = cfg.opts.install(|| {
            sequences(2, cfg.nmax)
                .into_par_iter()
                .flat_map_iter(|seq| {
                    let rooted = tree::enumerate_rooted_trees(&seq, w0).unwrap_or_default();
                    rooted.into_iter().map(move |rbt| {
                        match spectral::dirichlet_nu(&rbt) {
                            Ok(p) if nodal::check_monotone_paths(&rbt, &p.vector, cfg.opts.tau_rel) => Ok(()),
                            Ok(p) => Err(json!({ "tree": rooted_json(&rbt), "nu": p.value, "vector": p.vector })),
                            Err(e) => Err(json!({ "tree": rooted_json(&rbt), "error": e.to_string() })),
                        }
                    })
                })
                .collect()
        });
        out.push(Check::new(format!("lemma2_monotone_w0={w0}")).extend(outcomes).done());
    }
    out
}

fn rooted_minimizers(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for w0 in BOUNDARY_WEIGHTS {
        let outcomes: Vec<Outcome> = sequences(2, cfg.nmax)
            .into_iter()
            .map(|seq| {
                let scan = rooted_scan(&seq, w0, &cfg.opts)
                    .map_err(|e| json!({ "sequence": seq, "w0": w0, "error": e.to_string() }))?;
                let values: Vec<f64> = scan.iter().map(|e| e.2).collect();
                let argmin = argmin_indices(&values, cfg.opts.tie_rel);
                let shaped: Vec<usize> = (0..scan.len())
                    .filter(|&i| perturb::is_minimal_shape_rooted(&scan[i].1))
                    .collect();
                if argmin == shaped {
                    return Ok(());
                }
                let describe = |idx: &[usize]| -> Vec<Value> {
                    idx.iter()
                        .map(|&i| json!({ "tree": rooted_json(&scan[i].1), "nu": scan[i].2 }))
                        .collect()
                };
                Err(json!({
                    "sequence": seq,
                    "w0": w0,
                    "argmin": describe(&argmin),
                    "minimal_shape": describe(&shaped),
                }))
            })
            .collect();
        out.push(Check::new(format!("lemma5_iff_w0={w0}")).extend(outcomes).done());
    }
    out
}

/// Legal (P1) moves `(w, vi, vj)` on a rooted caterpillar.
fn p1_moves(rbt: &RootedBoundaryTree) -> Vec<(Vertex, Vertex, Vertex)> {
    let Ok(trunk) = rbt.trunk() else {
        return Vec::new();
    };
    let t = rbt.tree();
    let root = rbt.root();
    let mut moves = Vec::new();
    for w in (0..t.n()).filter(|&w| w != root && t.is_pendant(w)) {
        let vi = t.neighbors(w)[0].0;
        if !trunk.contains(&vi) || (vi == root && rbt.boundary_edge() == Some(w)) {
            continue;
        }
        for &vj in &trunk {
            if vj != w && rbt.height(vj) > rbt.height(vi) {
                moves.push((w, vi, vj));
            }
        }
    }
    moves
}

fn record_dump(rec: &PerturbationRecord, before: &RootedBoundaryTree, after: &RootedBoundaryTree) -> Value {
    json!({ "record": rec, "before": rooted_json(before), "after": rooted_json(after) })
}

fn perturbations(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let nmax = cfg.nmax.max(4);
    let margin = cfg.strict_margin;
    let mut p1 = Check::new("p1_strict_decrease");
    let mut p2 = Check::new("p2_strict_decrease");
    let mut degrees = Check::new("degree_bookkeeping");
    let mut attempts = 0;
    while p1.result.cases < cfg.samples && attempts < 100 * cfg.samples.max(1) {
        attempts += 1;
        let n = rng.gen_range(4..=nmax);
        let w0 = *BOUNDARY_WEIGHTS.choose(rng).unwrap();
        let rbt = random_rooted_caterpillar(rng, n, w0);
        let Some(&(w, vi, vj)) = p1_moves(&rbt).choose(rng) else {
            continue;
        };
        let outcome = perturb::perturb_p1(&rbt, w, vi, vj)
            .map_err(|e| json!({ "tree": rooted_json(&rbt), "move": [w, vi, vj], "error": e.to_string() }))
            .and_then(|after| {
                // One move shifts a unit of degree from vi to vj.
                let t = rbt.tree();
                let expected: Vec<usize> = (0..t.n())
                    .map(|v| t.degree(v) + usize::from(v == vj) - usize::from(v == vi))
                    .collect();
                let got: Vec<usize> = (0..after.n()).map(|v| after.tree().degree(v)).collect();
                degrees.record(if got == expected {
                    Ok(())
                } else {
                    Err(json!({ "before": rooted_json(&rbt), "after": rooted_json(&after) }))
                });
                let rec = PerturbationRecord::measure(PerturbKind::P1, &rbt, &after, vec![((w, vi), (w, vj))])
                    .map_err(|e| json!({ "error": e.to_string() }))?;
                if rec.strictly_decreased(margin) {
                    Ok(())
                } else {
                    Err(record_dump(&rec, &rbt, &after))
                }
            });
        p1.record(outcome);
    }
    attempts = 0;
    while p2.result.cases < cfg.samples && attempts < 100 * cfg.samples.max(1) {
        attempts += 1;
        let n = rng.gen_range(3..=nmax - 1);
        let w0 = *BOUNDARY_WEIGHTS.choose(rng).unwrap();
        let rbt = random_rooted_caterpillar(rng, n, w0);
        let Ok(trunk) = rbt.trunk() else {
            continue;
        };
        let candidates: Vec<Vertex> = trunk.into_iter().filter(|&v| v != rbt.root()).collect();
        let Some(&vj) = candidates.choose(rng) else {
            continue;
        };
        let outcome = perturb::perturb_p2(&rbt, vj)
            .map_err(|e| json!({ "tree": rooted_json(&rbt), "vj": vj, "error": e.to_string() }))
            .and_then(|after| {
                let t = rbt.tree();
                let mut expected: Vec<usize> = (0..t.n()).map(|v| t.degree(v) + usize::from(v == vj)).collect();
                expected.push(1);
                let got: Vec<usize> = (0..after.n()).map(|v| after.tree().degree(v)).collect();
                degrees.record(if got == expected {
                    Ok(())
                } else {
                    Err(json!({ "before": rooted_json(&rbt), "after": rooted_json(&after) }))
                });
                let rec = PerturbationRecord::measure(PerturbKind::P2, &rbt, &after, vec![((vj, t.n()), (vj, t.n()))])
                    .map_err(|e| json!({ "error": e.to_string() }))?;
                if rec.strictly_decreased(margin) {
                    Ok(())
                } else {
                    Err(record_dump(&rec, &rbt, &after))
                }
            });
        p2.record(outcome);
    }
    vec![p1.done(), p2.done(), degrees.done()]
}

fn gluing(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let nmax = cfg.nmax.max(2);
    let mut inequality = Check::new("glue_inequality");
    let mut strict = Check::new("glue_strict");
    for _ in 0..cfg.samples {
        let (n1, n2) = (rng.gen_range(2..=nmax), rng.gen_range(2..=nmax));
        let a = random_rooted_tree(rng, n1);
        let b = random_rooted_tree(rng, n2);
        let t = perturb::glue(&a, &b);
        let values = (|| -> Result<(f64, f64, f64), spectral::SpectralError> {
            Ok((
                spectral::dirichlet_nu(&a)?.value,
                spectral::dirichlet_nu(&b)?.value,
                spectral::algebraic_connectivity(&t)?.value,
            ))
        })();
        let (nu1, nu2, alpha) = match values {
            Ok(v) => v,
            Err(e) => {
                inequality.record(Err(json!({ "error": e.to_string() })));
                continue;
            }
        };
        let dump = || {
            json!({ "t1": rooted_json(&a), "t2": rooted_json(&b), "nu1": nu1, "nu2": nu2, "alpha": alpha })
        };
        let max = nu1.max(nu2);
        inequality.record(if alpha <= max + 1e-10 { Ok(()) } else { Err(dump()) });
        if (nu1 - nu2).abs() > 1e-8 {
            strict.record(if alpha < max { Ok(()) } else { Err(dump()) });
        }
    }
    // Two rooted paths with two interior vertices glue to the 5-path, where
    // equality holds.
    let mut equality = Check::new("glue_equality_case");
    let half = RootedBoundaryTree::new(Tree::path(3), 0).expect("rooted path");
    let five = perturb::glue(&half, &half);
    let outcome = (|| {
        let nu = spectral::dirichlet_nu(&half).ok()?.value;
        let alpha = spectral::algebraic_connectivity(&five).ok()?.value;
        Some((nu, alpha))
    })();
    equality.record(match outcome {
        Some((nu, alpha)) if (alpha - nu).abs() <= 1e-10 && five.canonical_code() == Tree::path(5).canonical_code() => Ok(()),
        other => Err(json!({ "values": other.map(|(nu, alpha)| json!({ "nu": nu, "alpha": alpha })) })),
    });
    vec![inequality.done(), strict.done(), equality.done()]
}

fn split_case(t: &Tree, tau_rel: f64) -> Outcome {
    let fail = |msg: String| json!({ "edges": edges_json(t), "error": msg });
    let analysis = nodal::analyze(t, tau_rel).map_err(|e| fail(e.to_string()))?;
    let split = nodal::geometric_split(t, &analysis).map_err(|e| fail(e.to_string()))?;
    let (r1, r2) = nodal::verify_split(&split, analysis.alpha).map_err(|e| fail(e.to_string()))?;
    let weights_ok = [split.w1, split.w2].iter().flatten().all(|&w| w >= 1.0);
    if r1 <= 1e-8 && r2 <= 1e-8 && weights_ok {
        Ok(())
    } else {
        Err(json!({
            "edges": edges_json(t),
            "alpha": analysis.alpha,
            "characteristic": analysis.charset,
            "residuals": [r1, r2],
            "weights": [split.w1, split.w2],
        }))
    }
}

fn split(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let tau_rel = cfg.opts.tau_rel;
    let exhaustive: Vec<Outcome> = cfg.opts.install(|| {
        sequences(2, cfg.nmax.min(SPLIT_EXHAUSTIVE_MAX))
            .into_par_iter()
            .flat_map_iter(|seq| {
                let trees = tree::enumerate_trees(&seq).unwrap_or_default();
                trees.into_iter().map(move |t| split_case(&t, tau_rel))
            })
            .collect()
    });
    let nmax = cfg.nmax.max(2);
    let sampled: Vec<Tree> = (0..cfg.samples)
        .map(|_| {
            let n = rng.gen_range(2..=nmax);
            random_tree(rng, n)
        })
        .collect();
    let random: Vec<Outcome> = cfg.opts.install(|| sampled.par_iter().map(|t| split_case(t, tau_rel)).collect());
    vec![
        Check::new("split_exhaustive").extend(exhaustive).done(),
        Check::new("split_random").extend(random).done(),
    ]
}
