//! Data for the open degree-partition question: for every spine arrangement
//! of a caterpillar, where the characteristic set falls and how the
//! non-pendant degrees split between the two sides.

use rayon::prelude::*;
use serde::Serialize;

use super::{round_sig, spine_arrangements, SearchError, SearchOptions};
use crate::nodal::{self, CharacteristicSet};
use crate::spectral;
use crate::tree::{build_caterpillar, CaterpillarSpec, DegreeSequence, Vertex};

pub const CSV_HEADER: &str =
    "sequence,arrangement,alpha,charset_kind,charset_pos,left_degrees,right_degrees";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionRow {
    pub sequence: DegreeSequence,
    pub arrangement: Vec<usize>,
    pub alpha: f64,
    pub charset_kind: &'static str,
    /// Spine index of the characteristic vertex, `i.5` for the edge between
    /// spine indices `i` and `i + 1`, empty when the spine is empty.
    pub charset_pos: String,
    /// Non-pendant degrees on the non-negative side, moving outward. The
    /// characteristic vertex is on neither side.
    pub left_degrees: Vec<usize>,
    pub right_degrees: Vec<usize>,
}

/// One row per spine arrangement (up to reversal), sorted by α and then by
/// arrangement.
pub fn explore_partitions(
    seq: &DegreeSequence,
    opts: &SearchOptions,
) -> Result<Vec<PartitionRow>, SearchError> {
    let seq = seq.clone().validated()?.sorted();
    if seq.pendant_count() < 2 {
        return Err(SearchError::NoCaterpillar(seq));
    }
    let arrangements = spine_arrangements(&seq);
    let mut rows: Vec<PartitionRow> = opts.install(|| {
        arrangements
            .into_par_iter()
            .map(|arr| row(&seq, arr, opts.tau_rel))
            .collect::<Result<_, _>>()
    })?;
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then_with(|| a.arrangement.cmp(&b.arrangement)));
    Ok(rows)
}

fn row(seq: &DegreeSequence, arrangement: Vec<usize>, tau_rel: f64) -> Result<PartitionRow, SearchError> {
    let t = build_caterpillar(&CaterpillarSpec::new(arrangement.clone()))?;
    let k = arrangement.len();
    let analysis = nodal::analyze(&t, tau_rel)?;
    let split = nodal::geometric_split(&t, &analysis)?;
    // Spine vertices carry ids 0..k in path order.
    let on_spine = |v: Vertex| v < k;
    let charset_pos = match analysis.charset {
        CharacteristicSet::Vertex(c) if on_spine(c) => c.to_string(),
        CharacteristicSet::Edge { neg, pos } if on_spine(neg) && on_spine(pos) => {
            format!("{}.5", neg.min(pos))
        }
        _ => String::new(),
    };
    let anchors = analysis.charset.ids();
    let side = |origins: Vec<Vertex>| -> Vec<usize> {
        let mut spine: Vec<(usize, Vertex)> = origins
            .into_iter()
            .filter(|&v| on_spine(v))
            .map(|v| (anchors.iter().map(|&a| a.abs_diff(v)).min().unwrap_or(0), v))
            .collect();
        spine.sort_unstable();
        spine.into_iter().map(|(_, v)| arrangement[v]).collect()
    };
    // The characteristic vertex is the root of both sides, so it is in
    // neither interior; edge endpoints are interior to their own side.
    let left_degrees = side(split.t1.interior_origins());
    let right_degrees = side(split.t2.interior_origins());
    Ok(PartitionRow {
        sequence: seq.clone(),
        arrangement,
        alpha: spectral::algebraic_connectivity(&t)?.value,
        charset_kind: analysis.charset.kind(),
        charset_pos,
        left_degrees,
        right_degrees,
    })
}

fn join(items: &[usize]) -> String {
    items.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("|")
}

/// CSV text with a header line; floats carry 12 significant digits.
pub fn partitions_csv(rows: &[PartitionRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for r in rows {
        w.write_record([
            join(r.sequence.degrees()),
            join(&r.arrangement),
            round_sig(r.alpha).to_string(),
            r.charset_kind.to_string(),
            r.charset_pos.clone(),
            join(&r.left_degrees),
            join(&r.right_degrees),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII fields")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> DegreeSequence {
        s.parse().unwrap()
    }

    fn spine_multiset_ok(r: &PartitionRow) {
        let mut all = r.left_degrees.clone();
        all.extend(&r.right_degrees);
        if r.charset_kind == "vertex" && !r.charset_pos.is_empty() {
            all.push(r.arrangement[r.charset_pos.parse::<usize>().unwrap()]);
        }
        all.sort_unstable();
        let mut spine = r.arrangement.clone();
        spine.sort_unstable();
        assert_eq!(all, spine, "{r:?}");
    }

    #[test]
    fn six_path_has_central_edge() {
        let rows = explore_partitions(&seq("2,2,2,2,1,1"), &SearchOptions::serial()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].charset_kind, "edge");
        assert_eq!(rows[0].charset_pos, "1.5");
        assert_eq!(rows[0].left_degrees, vec![2, 2]);
        assert_eq!(rows[0].right_degrees, vec![2, 2]);
        assert!((rows[0].alpha - spectral::path_alpha(6)).abs() < 1e-12);
    }

    #[test]
    fn rows_partition_the_spine() {
        for s in ["3,2,2,2,1,1,1", "4,3,2,1,1,1,1,1", "3,3,3,1,1,1,1,1", "2,1,1", "3,1,1,1"] {
            let rows = explore_partitions(&seq(s), &SearchOptions::serial())
                .unwrap_or_else(|e| panic!("{s}: {e}"));
            for w in rows.windows(2) {
                assert!(w[0].alpha <= w[1].alpha);
            }
            rows.iter().for_each(spine_multiset_ok);
        }
    }

    #[test]
    fn three_arrangements_for_432() {
        let rows = explore_partitions(&seq("4,3,2,1,1,1,1,1"), &SearchOptions::serial()).unwrap();
        assert_eq!(rows.len(), 3);
        let csv = partitions_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with(CSV_HEADER));
        for line in csv.lines().skip(1) {
            assert_eq!(line.split(',').count(), 7);
        }
    }

    #[test]
    fn single_edge_row() {
        let rows = explore_partitions(&seq("1,1"), &SearchOptions::serial()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].charset_pos, "");
        assert!(rows[0].left_degrees.is_empty() && rows[0].right_degrees.is_empty());
    }
}
