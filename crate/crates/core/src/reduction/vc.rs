use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VcError {
    #[error("line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("edge {index} ({u}, {v}): {detail}")]
    Invalid { index: usize, u: u32, v: u32, detail: String },
    #[error("budget k = {k} exceeds n = {n}")]
    BudgetTooLarge { k: u32, n: u32 },
}

/// A Vertex Cover instance over vertices `1..=n`. Edge `j` (1-based, in input
/// order) is `edges[j - 1]`, stored with the smaller endpoint first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcInstance {
    pub n: u32,
    pub edges: Vec<(u32, u32)>,
    pub k: u32,
}

impl VcInstance {
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>, k: u32) -> Result<Self, VcError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (index, (u, v)) in edges.into_iter().enumerate() {
            let invalid = |detail: &str| VcError::Invalid {
                index: index + 1,
                u,
                v,
                detail: detail.into(),
            };
            if u == v {
                return Err(invalid("self-loop"));
            }
            if u == 0 || v == 0 || u > n || v > n {
                return Err(invalid("endpoint outside 1..=n"));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(invalid("duplicate edge"));
            }
            out.push(e);
        }
        if k > n {
            return Err(VcError::BudgetTooLarge { k, n });
        }
        Ok(Self { n, edges: out, k })
    }

    pub fn m(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn with_k(&self, k: u32) -> Result<Self, VcError> {
        Self::new(self.n, self.edges.iter().copied(), k)
    }

    /// Whether `v` (1-based) is an endpoint of edge `j` (1-based).
    pub fn incident(&self, v: u32, j: u32) -> bool {
        let (a, b) = self.edges[(j - 1) as usize];
        a == v || b == v
    }

    pub fn is_cover(&self, w: &[u32]) -> bool {
        self.first_uncovered(w).is_none()
    }

    /// 1-based index of the first edge not covered by `w`.
    pub fn first_uncovered(&self, w: &[u32]) -> Option<u32> {
        self.edges
            .iter()
            .position(|(a, b)| !w.contains(a) && !w.contains(b))
            .map(|j| j as u32 + 1)
    }

    /// Adds isolated vertices until `n + 1` is a power of two.
    pub fn padded(&self) -> Self {
        let n = (self.n + 1).next_power_of_two() - 1;
        Self { n, ..self.clone() }
    }

    pub fn is_padded(&self) -> bool {
        (self.n + 1).is_power_of_two()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for VcInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.n, self.m(), self.k)?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Text format: a header line `n m k`, then `m` lines `u v` with 1-based
/// endpoints. Blank lines and lines starting with `#` are ignored.
impl FromStr for VcInstance {
    type Err = VcError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let numbers = |line: usize, l: &str, want: usize| -> Result<Vec<u32>, VcError> {
            let parsed: Result<Vec<u32>, _> = l.split_whitespace().map(str::parse::<u32>).collect();
            let parsed = parsed.map_err(|e| VcError::Parse {
                line,
                detail: format!("{e} in `{l}`"),
            })?;
            if parsed.len() != want {
                return Err(VcError::Parse {
                    line,
                    detail: format!("expected {want} integers, found {}", parsed.len()),
                });
            }
            Ok(parsed)
        };
        let (hline, header) = lines.next().ok_or(VcError::Parse {
            line: 1,
            detail: "missing header `n m k`".into(),
        })?;
        let h = numbers(hline, header, 3)?;
        let (n, m, k) = (h[0], h[1], h[2]);
        let mut edges = Vec::with_capacity(m as usize);
        let mut last = hline;
        for _ in 0..m {
            let (line, l) = lines.next().ok_or(VcError::Parse {
                line: last + 1,
                detail: format!("expected {m} edge lines, found {}", edges.len()),
            })?;
            let e = numbers(line, l, 2)?;
            edges.push((line, (e[0], e[1])));
            last = line;
        }
        if let Some((line, _)) = lines.next() {
            return Err(VcError::Parse {
                line,
                detail: "trailing content after the edge list".into(),
            });
        }
        Self::new(n, edges.iter().map(|(_, e)| *e), k).map_err(|err| match err {
            VcError::Invalid { index, detail, .. } => VcError::Parse {
                line: edges[index - 1].0,
                detail,
            },
            other => VcError::Parse { line: hline, detail: other.to_string() },
        })
    }
}
