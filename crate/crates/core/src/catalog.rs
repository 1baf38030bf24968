//! Concrete instances with independently computable witness sizes.

use std::collections::VecDeque;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Tolerance, C64, ONE};
use crate::span_program::{Input, Part, SpanProgram};

/// OR on `n` bits: `A` is the all-ones row, `tau = 1`, and `x_j = 1` makes
/// coordinate `j` available.
pub fn build_or(n: usize) -> SpanProgram {
    assert!(n >= 1, "OR needs at least one input bit");
    let parts = (0..n).map(|_| Part::single_letter(1, 2, 1)).collect();
    let a = ComplexMatrix::from_element(1, n, ONE);
    let tau = ComplexVector::from_element(1, ONE);
    SpanProgram::new(2, parts, 0, 0, tau, a).expect("OR program is valid")
}

/// AND on `n` bits.
///
/// `x_j = 0` exposes nothing, `x_j = 1` exposes `|j>`; `V = C^n`,
/// `A = I`, `tau` is the all-ones vector.
pub fn build_and(n: usize) -> SpanProgram {
    assert!(n >= 1, "AND needs at least one input bit");
    let parts = (0..n).map(|_| Part::single_letter(1, 2, 1)).collect();
    let a = ComplexMatrix::identity(n, n);
    let tau = ComplexVector::from_element(n, ONE);
    SpanProgram::new(2, parts, 0, 0, tau, a).expect("AND program is valid")
}

/// Graph with one potential edge per input bit and terminals `s`, `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub s: usize,
    pub t: usize,
}

impl GraphSpec {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>, s: usize, t: usize) -> Result<Self> {
        let g = GraphSpec {
            vertices,
            edges,
            s,
            t,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.s >= self.vertices || self.t >= self.vertices {
            return bad(format!("terminals ({}, {}) outside {} vertices", self.s, self.t, self.vertices));
        }
        if self.s == self.t {
            return bad("terminals must differ".into());
        }
        if self.edges.is_empty() {
            return bad("graph has no potential edges".into());
        }
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u >= self.vertices || v >= self.vertices {
                return bad(format!("edge {i} ({u}, {v}) references a missing vertex"));
            }
            if u == v {
                return bad(format!("edge {i} is a self-loop"));
            }
            let dup = self.edges[..i]
                .iter()
                .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u));
            if dup {
                return bad(format!("edge {i} ({u}, {v}) is repeated"));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let g: GraphSpec = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Path `0 - 1 - ... - k` with `s = 0`, `t = k`.
    pub fn path(k: usize) -> Self {
        let edges = (0..k).map(|i| (i, i + 1)).collect();
        GraphSpec::new(k + 1, edges, 0, k).expect("path graph is valid")
    }

    fn present(&self, x: &Input) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .zip(x.letters())
            .filter(|(_, &b)| b == 1)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Hop distance from `s` to `t` over present edges.
    pub fn shortest_path(&self, x: &Input) -> Option<usize> {
        let mut adj = vec![Vec::new(); self.vertices];
        for (u, v) in self.present(x) {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut dist = vec![usize::MAX; self.vertices];
        dist[self.s] = 0;
        let mut queue = VecDeque::from([self.s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        (dist[self.t] != usize::MAX).then_some(dist[self.t])
    }

    /// Size of the smallest `s`-`t` edge cut in the potential-edge graph,
    /// by exhaustive search over vertex bipartitions.
    pub fn min_cut(&self) -> usize {
        let others: Vec<usize> = (0..self.vertices).filter(|&v| v != self.s && v != self.t).collect();
        (0..1u64 << others.len())
            .map(|mask| {
                let mut side = vec![false; self.vertices];
                side[self.s] = true;
                for (i, &v) in others.iter().enumerate() {
                    side[v] = mask >> i & 1 == 1;
                }
                self.edges.iter().filter(|&&(u, v)| side[u] != side[v]).count()
            })
            .min()
            .unwrap_or(0)
    }
}

/// st-connectivity: edge `j = (u, v)` maps to `|u> - |v>`, `tau = |s> - |t>`.
pub fn build_stconn(g: &GraphSpec) -> SpanProgram {
    let n = g.edges.len();
    let parts = (0..n).map(|_| Part::single_letter(1, 2, 1)).collect();
    let mut a = ComplexMatrix::zeros(g.vertices, n);
    for (j, &(u, v)) in g.edges.iter().enumerate() {
        a[(u, j)] = ONE;
        a[(v, j)] = -ONE;
    }
    let mut tau = ComplexVector::zeros(g.vertices);
    tau[g.s] = ONE;
    tau[g.t] = -ONE;
    SpanProgram::new(2, parts, 0, 0, tau, a).expect("st-connectivity program is valid")
}

/// Effective resistance between `s` and `t` over the present edges,
/// `(e_s - e_t)^T L^+ (e_s - e_t)`; infinite when they are disconnected.
pub fn effective_resistance(g: &GraphSpec, x: &Input) -> f64 {
    if g.shortest_path(x).is_none() {
        return f64::INFINITY;
    }
    let lap = laplacian(g, x).map(|v| C64::new(v, 0.0));
    let mut b = ComplexVector::zeros(g.vertices);
    b[g.s] = ONE;
    b[g.t] = -ONE;
    // the minimum-norm least-squares solution is L^+ b
    let (phi, _) = linalg::least_squares(&lap, &b, Tolerance::default())
        .expect("Laplacian entries are finite");
    (phi[g.s] - phi[g.t]).re
}

/// A few small graphs used by tests and examples.
pub fn small_graphs() -> Vec<(String, GraphSpec)> {
    vec![
        ("edge".into(), GraphSpec::new(2, vec![(0, 1)], 0, 1).unwrap()),
        (
            "two_routes".into(),
            GraphSpec::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3)], 0, 3).unwrap(),
        ),
        ("path3".into(), GraphSpec::path(3)),
        (
            "triangle".into(),
            GraphSpec::new(3, vec![(0, 1), (1, 2), (0, 2)], 0, 2).unwrap(),
        ),
        (
            "bridge".into(),
            GraphSpec::new(4, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)], 0, 3).unwrap(),
        ),
        (
            "k4_plus".into(),
            GraphSpec::new(
                5,
                vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)],
                0,
                4,
            )
            .unwrap(),
        ),
    ]
}

/// Unit-weight Laplacian of the present edges (real, dense).
pub fn laplacian(g: &GraphSpec, x: &Input) -> DMatrix<f64> {
    let mut lap = DMatrix::<f64>::zeros(g.vertices, g.vertices);
    for (u, v) in g.present(x) {
        lap[(u, u)] += 1.0;
        lap[(v, v)] += 1.0;
        lap[(u, v)] -= 1.0;
        lap[(v, u)] -= 1.0;
    }
    lap
}
