//! Agglomerative clustering over a similarity matrix.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::similarity::SimMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Similarity of the most similar cross pair.
    Single,
    /// Similarity of the least similar cross pair.
    #[default]
    Complete,
    /// Mean similarity over all cross pairs.
    Average,
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::InvalidArgument(format!("unknown linkage `{other}`"))),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        })
    }
}

/// One merge step. Leaves are clusters `0..n`; the cluster created by merge
/// `k` gets id `n + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
}

type Key<'a> = (&'a [String], &'a [String]);

struct Cluster {
    id: usize,
    members: Vec<usize>,
    /// Sorted leaf labels; the tie-break key.
    key: Vec<String>,
}

fn linkage_value(m: &SimMatrix, a: &Cluster, b: &Cluster, linkage: Linkage) -> f64 {
    let cross = a.members.iter().flat_map(|&i| b.members.iter().map(move |&j| m.get(i, j)));
    match linkage {
        Linkage::Single => cross.fold(f64::NEG_INFINITY, f64::max),
        Linkage::Complete => cross.fold(f64::INFINITY, f64::min),
        Linkage::Average => {
            let n = (a.members.len() * b.members.len()) as f64;
            cross.sum::<f64>() / n
        }
    }
}

/// Repeatedly merges the two clusters with the highest linkage similarity.
/// Ties go to the pair whose sorted leaf labels come first lexicographically.
pub fn agglomerate(m: &SimMatrix, linkage: Linkage) -> Dendrogram {
    let n = m.len();
    let mut clusters: Vec<Cluster> =
        (0..n).map(|i| Cluster { id: i, members: vec![i], key: vec![m.labels[i].clone()] }).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    while clusters.len() > 1 {
        // (similarity, tie-break key, x, y)
        let mut best: Option<(f64, Key<'_>, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let (a, b) = (&clusters[x], &clusters[y]);
                let s = linkage_value(m, a, b, linkage);
                let key = if a.key <= b.key { (&a.key[..], &b.key[..]) } else { (&b.key[..], &a.key[..]) };
                let better = match &best {
                    None => true,
                    Some((bs, bk, ..)) => s > *bs || (s == *bs && key < *bk),
                };
                if better {
                    best = Some((s, key, x, y));
                }
            }
        }
        let (similarity, _, x, y) = best.expect("at least two clusters");
        let b = clusters.remove(y);
        let a = clusters.remove(x);
        let (first, second) = if a.key <= b.key { (a, b) } else { (b, a) };
        merges.push(Merge { left: first.id, right: second.id, similarity });
        let mut members = first.members;
        members.extend(second.members);
        let mut key = first.key;
        key.extend(second.key);
        key.sort();
        clusters.push(Cluster { id: n + merges.len() - 1, members, key });
    }
    Dendrogram { leaves: m.labels.clone(), merges }
}

impl Dendrogram {
    /// Indented tree, root first. Inner nodes show the merge similarity.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let n = self.leaves.len();
        if n == 0 {
            return out;
        }
        let root = if self.merges.is_empty() { 0 } else { n + self.merges.len() - 1 };
        self.render_node(root, 0, &mut out);
        out
    }

    fn render_node(&self, id: usize, indent: usize, out: &mut String) {
        let n = self.leaves.len();
        let pad = "  ".repeat(indent);
        if id < n {
            writeln!(out, "{pad}- {}", self.leaves[id]).unwrap();
        } else {
            let m = &self.merges[id - n];
            writeln!(out, "{pad}+ {:.4}", m.similarity).unwrap();
            self.render_node(m.left, indent + 1, out);
            self.render_node(m.right, indent + 1, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(labels: &[&str], values: Vec<Vec<f64>>) -> SimMatrix {
        SimMatrix { labels: labels.iter().map(|s| s.to_string()).collect(), values }
    }

    #[test]
    fn single_item() {
        let d = agglomerate(&matrix(&["A"], vec![vec![1.0]]), Linkage::Complete);
        assert!(d.merges.is_empty());
        assert_eq!(d.render(), "- A\n");
    }

    #[test]
    fn two_blocks() {
        let m = matrix(
            &["A", "B", "C", "D"],
            vec![
                vec![1.0, 0.5, 0.0, 0.0],
                vec![0.5, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.25],
                vec![0.0, 0.0, 0.25, 1.0],
            ],
        );
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let d = agglomerate(&m, linkage);
            let sims: Vec<f64> = d.merges.iter().map(|m| m.similarity).collect();
            assert_eq!(sims, vec![0.5, 0.25, 0.0]);
            assert_eq!((d.merges[0].left, d.merges[0].right), (0, 1));
            assert_eq!((d.merges[2].left, d.merges[2].right), (4, 5));
        }
    }

    #[test]
    fn ties_break_by_label() {
        let m = matrix(&["b", "a", "c"], vec![vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]);
        let d = agglomerate(&m, Linkage::Complete);
        assert_eq!((d.merges[0].left, d.merges[0].right), (1, 0));
        assert_eq!((d.merges[1].left, d.merges[1].right), (3, 2));
    }

    #[test]
    fn average_differs_from_extremes() {
        let m = matrix(
            &["x", "y", "z"],
            vec![vec![1.0, 0.9, 0.2], vec![0.9, 1.0, 0.6], vec![0.2, 0.6, 1.0]],
        );
        let last = |l| agglomerate(&m, l).merges[1].similarity;
        assert_eq!(last(Linkage::Single), 0.6);
        assert_eq!(last(Linkage::Complete), 0.2);
        assert!((last(Linkage::Average) - 0.4).abs() < 1e-12);
    }
}
