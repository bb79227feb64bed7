//! Per-level out-degree lists (the tree parametrization) and their text format.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A planar forest on levels `0..=N`, stored as the out-degree of every vertex
/// below level `N`, level by level and left to right.
///
/// Level 0 holds the single root, so the forest is one tree. Level sizes are
/// implied: `k_0 = 1`, `k_{n+1} = sum of the out-degrees at level n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Forest {
    degrees: Vec<Vec<usize>>,
}

impl Forest {
    /// Validates and wraps out-degree lists for levels `0..N`.
    pub fn new(degrees: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(first) = degrees.first() {
            if first.len() != 1 {
                return Err(Error::InvalidForest(format!("level 0 must hold one vertex, got {}", first.len())));
            }
        }
        for n in 0..degrees.len() {
            let next: usize = degrees[n].iter().sum();
            if next == 0 {
                return Err(Error::EmptyLevel(n + 1));
            }
            if let Some(row) = degrees.get(n + 1) {
                if row.len() != next {
                    return Err(Error::InvalidForest(format!(
                        "level {} has {} vertices but level {n} has {next} children",
                        n + 1,
                        row.len()
                    )));
                }
            }
        }
        Ok(Forest { degrees })
    }

    /// The chain with one vertex per level.
    pub fn chain(levels: usize) -> Self {
        Forest { degrees: vec![vec![1]; levels] }
    }

    /// Number of levels above the root (`N`).
    pub fn levels(&self) -> usize {
        self.degrees.len()
    }

    /// `k_n` for `n` in `0..=N`.
    pub fn level_size(&self, n: usize) -> usize {
        match n {
            0 => 1,
            _ => self.degrees[n - 1].iter().sum(),
        }
    }

    /// `[k_0, ..., k_N]`.
    pub fn sizes(&self) -> Vec<usize> {
        (0..=self.levels()).map(|n| self.level_size(n)).collect()
    }

    /// Out-degrees at level `n < N`.
    pub fn out_degrees(&self, n: usize) -> &[usize] {
        &self.degrees[n]
    }

    pub fn degree_lists(&self) -> &[Vec<usize>] {
        &self.degrees
    }

    /// `F = sum over vertices below level N of (out-degree + 1)`, the triangle count.
    pub fn triangle_count(&self) -> usize {
        self.degrees.iter().flatten().map(|d| d + 1).sum()
    }

    /// Index of the first child of each vertex at level `n < N`.
    pub fn child_starts(&self, n: usize) -> Vec<usize> {
        let mut acc = 0;
        self.degrees[n]
            .iter()
            .map(|&d| {
                let s = acc;
                acc += d;
                s
            })
            .collect()
    }

    /// Position at level `n - 1` of the parent of vertex `pos` at level `n >= 1`.
    pub fn parent_position(&self, n: usize, pos: usize) -> usize {
        let mut acc = 0;
        for (i, &d) in self.degrees[n - 1].iter().enumerate() {
            acc += d;
            if pos < acc {
                return i;
            }
        }
        panic!("vertex {pos} is not on level {n}");
    }

    /// Restriction to levels `0..=levels`.
    pub fn truncate(&self, levels: usize) -> Result<Self> {
        if levels > self.levels() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate a forest of {} levels to {levels}",
                self.levels()
            )));
        }
        Ok(Forest { degrees: self.degrees[..levels].to_vec() })
    }

    /// Line-based text form: a header `N k_0 ... k_N`, then one line of
    /// out-degrees per level below `N`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let sizes = self.sizes();
        write!(out, "{}", self.levels()).unwrap();
        for k in sizes {
            write!(out, " {k}").unwrap();
        }
        out.push('\n');
        for row in &self.degrees {
            let line: Vec<String> = row.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let header = parse_row(header, 1)?;
        let (&n, sizes) = header.split_first().ok_or(Error::Parse { line: 1, msg: "empty header".into() })?;
        if sizes.len() != n + 1 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares N = {n} but lists {} level sizes", sizes.len()),
            });
        }
        let mut degrees = Vec::with_capacity(n);
        for (level, &size) in sizes.iter().enumerate().take(n) {
            let (idx, line) = lines.next().ok_or(Error::Parse {
                line: level + 2,
                msg: format!("missing out-degrees for level {level}"),
            })?;
            let row = parse_row(line, idx + 1)?;
            if row.len() != size {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("level {level} should list {size} out-degrees"),
                });
            }
            degrees.push(row);
        }
        if let Some((idx, line)) = lines.next() {
            if !line.trim().is_empty() {
                return Err(Error::Parse { line: idx + 1, msg: "trailing data".into() });
            }
        }
        let forest = Forest::new(degrees)?;
        if forest.sizes() != sizes {
            return Err(Error::Parse { line: 1, msg: "level sizes disagree with the out-degrees".into() });
        }
        Ok(forest)
    }
}

fn parse_row(line: &str, line_no: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse { line: line_no, msg: format!("{tok:?}: {e}") })
        })
        .collect()
}
