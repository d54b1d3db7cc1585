//! Edge-list text format: one edge per line, `u v [w]`, whitespace-separated,
//! 0-based ids, optional positive weight (default 1). Lines starting with `#`
//! and blank lines are ignored.

use std::fmt::Write;

use thiserror::Error;

use super::{Tree, TreeError, Vertex};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("not a tree: {0}")]
    NotATree(#[from] TreeError),
}

pub fn parse_edge_list(text: &str) -> Result<Tree, EdgeListError> {
    let mut edges: Vec<(Vertex, Vertex, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| EdgeListError::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected `u v [w]`, got {line:?}")));
        }
        let u: Vertex = fields[0]
            .parse()
            .map_err(|e| err(format!("bad vertex {:?}: {e}", fields[0])))?;
        let v: Vertex = fields[1]
            .parse()
            .map_err(|e| err(format!("bad vertex {:?}: {e}", fields[1])))?;
        let w = match fields.get(2) {
            Some(s) => {
                let w: f64 = s.parse().map_err(|e| err(format!("bad weight {s:?}: {e}")))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(err(format!("weight must be positive, got {w}")));
                }
                w
            }
            None => 1.0,
        };
        edges.push((u, v, w));
    }
    let n = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
    Ok(Tree::from_weighted_edges(n, &edges)?)
}

/// Writes `u v` per edge, adding the weight only when it is not 1.
pub fn write_edge_list(tree: &Tree) -> String {
    let mut out = String::new();
    for (u, v, w) in tree.edges() {
        if w == 1.0 {
            writeln!(out, "{u} {v}").unwrap();
        } else {
            writeln!(out, "{u} {v} {w}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_weights() {
        let t = parse_edge_list("# a path\n0 1\n1 2 2.5\n\n2 3\n").unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.weight(1, 2), Some(2.5));
        assert_eq!(t.weight(0, 1), Some(1.0));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse_edge_list("0 x\n"), Err(EdgeListError::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("0 1 -2\n"), Err(EdgeListError::Parse { .. })));
        assert!(matches!(parse_edge_list("0 1 2 3\n"), Err(EdgeListError::Parse { .. })));
    }

    #[test]
    fn cycle_is_not_a_tree() {
        let err = parse_edge_list("0 1\n1 2\n2 0\n").unwrap_err();
        assert!(matches!(err, EdgeListError::NotATree(_)));
    }

    #[test]
    fn writes_weights_only_when_needed() {
        let t = Tree::from_weighted_edges(3, &[(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        assert_eq!(write_edge_list(&t), "0 1\n1 2 3\n");
    }
}
