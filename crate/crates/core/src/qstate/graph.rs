use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Simple undirected graph on vertices `0..n_vertices`.
///
/// The text format used on disk is 1-based:
///
/// ```text
/// n 3
/// e 1 2
/// e 1 3
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    n_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl GraphSpec {
    /// Edges are 0-based vertex pairs in either order.
    pub fn new(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop on vertex {}", a + 1)));
            }
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::invalid(format!(
                    "edge {{{}, {}}} outside 1..={n_vertices}",
                    a + 1,
                    b + 1
                )));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::invalid(format!("duplicate edge {{{}, {}}}", a + 1, b + 1)));
            }
        }
        Ok(Self {
            n_vertices,
            edges: set,
        })
    }

    /// Star with vertex 0 as centre and `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|leaf| (0, leaf)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("ring needs at least 3 vertices"));
        }
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n_vertices)
            .filter(|&u| u != v && self.has_edge(u, v))
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Stabilizer generator `K_v = X_v ∏_{u∈N(v)} Z_u`.
    pub fn generator(&self, v: usize) -> PauliString {
        let mut ops = vec![0u8; self.n_vertices];
        ops[v] = 1;
        for u in self.neighbors(v) {
            ops[u] = 3;
        }
        PauliString::from_ops(ops)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_num = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("expected a positive integer, found `{s}`"),
                })
            };
            match fields.as_slice() {
                ["n", v] if n.is_none() => n = Some(parse_num(v)?),
                ["n", _] => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "vertex count given twice".into(),
                    })
                }
                ["e", a, b] => {
                    let (a, b) = (parse_num(a)?, parse_num(b)?);
                    if a == 0 || b == 0 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "vertices are numbered from 1".into(),
                        });
                    }
                    if n.is_none() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "edge before the `n <vertices>` line".into(),
                        });
                    }
                    edges.push((a - 1, b - 1, line_no));
                }
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unrecognised line `{line}`"),
                    })
                }
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 1,
            message: "missing `n <vertices>` line".into(),
        })?;
        let mut graph = Self::new(n, std::iter::empty())?;
        for (a, b, line) in edges {
            let mut set = graph.edges.clone();
            let bad = a == b || a >= n || b >= n || !set.insert((a.min(b), a.max(b)));
            if bad {
                return Err(Error::Parse {
                    line,
                    message: format!("invalid edge {{{}, {}}}", a + 1, b + 1),
                });
            }
            graph.edges = set;
        }
        Ok(graph)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n_vertices);
        for (a, b) in self.edges() {
            let _ = writeln!(out, "e {} {}", a + 1, b + 1);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let g = GraphSpec::parse("# star\nn 4\ne 1 2\ne 1 3\ne 1 4\n").unwrap();
        assert_eq!(g, GraphSpec::star(4).unwrap());
        assert_eq!(GraphSpec::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(GraphSpec::new(3, [(0, 0)]).is_err());
        assert!(GraphSpec::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(GraphSpec::new(2, [(0, 2)]).is_err());
        match GraphSpec::parse("n 3\ne 1 2\ne 2 5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(GraphSpec::parse("e 1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn star_generators() {
        let g = GraphSpec::star(3).unwrap();
        assert_eq!(g.generator(0).ops(), &[1, 3, 3]);
        assert_eq!(g.generator(2).ops(), &[3, 0, 1]);
    }
}
