//! Reference oracles computed without the library's linear algebra.

#![allow(dead_code)]

use spanq::catalog::GraphSpec;
use spanq::span_program::{Input, WitnessKind};

/// Dense Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-12, "singular system");
        for r in col + 1..n {
            let f = a[r][col] / d;
            if f != 0.0 {
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

/// Connected-component label of every node.
pub fn components(nodes: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..nodes).collect();
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    (0..nodes).map(|i| find(&mut parent, i)).collect()
}

/// Effective conductance between `s` and `t` of a unit-weight multigraph;
/// zero when they are disconnected.
pub fn conductance(nodes: usize, edges: &[(usize, usize)], s: usize, t: usize) -> f64 {
    let comp = components(nodes, edges);
    if comp[s] != comp[t] {
        return 0.0;
    }
    // unknown potentials: nodes in the component other than s, t
    let free: Vec<usize> = (0..nodes)
        .filter(|&v| comp[v] == comp[s] && v != s && v != t)
        .collect();
    let pos = |v: usize| free.iter().position(|&f| f == v);
    let k = free.len();
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for &(u, v) in edges {
        if u == v {
            continue;
        }
        for (p, q) in [(u, v), (v, u)] {
            if let Some(i) = pos(p) {
                a[i][i] += 1.0;
                match pos(q) {
                    Some(j) => a[i][j] -= 1.0,
                    None if q == s => b[i] += 1.0,
                    None => {}
                }
            }
        }
    }
    let phi = if k > 0 { gauss_solve(a, b) } else { vec![] };
    let potential = |v: usize| {
        if v == s {
            1.0
        } else if v == t {
            0.0
        } else {
            pos(v).map_or(0.0, |i| phi[i])
        }
    };
    edges
        .iter()
        .map(|&(u, v)| {
            if u == s {
                1.0 - potential(v)
            } else if v == s {
                1.0 - potential(u)
            } else {
                0.0
            }
        })
        .sum()
}

/// Witness kind and size of st-connectivity on `g` at `x`: effective
/// resistance of the present edges, or effective conductance of the absent
/// edges once present-edge components are merged.
pub fn stconn_oracle(g: &GraphSpec, x: &Input) -> (WitnessKind, f64) {
    let present: Vec<(usize, usize)> = g
        .edges
        .iter()
        .zip(x.letters())
        .filter(|(_, &a)| a == 1)
        .map(|(&e, _)| e)
        .collect();
    let c = conductance(g.vertices, &present, g.s, g.t);
    if c > 0.0 {
        return (WitnessKind::Positive, 1.0 / c);
    }
    let comp = components(g.vertices, &present);
    let absent: Vec<(usize, usize)> = g
        .edges
        .iter()
        .zip(x.letters())
        .filter(|(&(u, v), &a)| a == 0 && comp[u] != comp[v])
        .map(|(&(u, v), _)| (comp[u], comp[v]))
        .collect();
    (
        WitnessKind::Negative,
        conductance(g.vertices, &absent, comp[g.s], comp[g.t]),
    )
}

/// OR_n: `1/|x|` for nonzero `x`, `n` for the all-zero input.
pub fn or_oracle(x: &Input) -> (WitnessKind, f64) {
    let m = x.weight();
    if m > 0 {
        (WitnessKind::Positive, 1.0 / m as f64)
    } else {
        (WitnessKind::Negative, x.letters().len() as f64)
    }
}

/// Graphs with at most six vertices used for exhaustive checks.
pub fn test_graphs() -> Vec<(String, GraphSpec)> {
    let mut out = spanq::catalog::small_graphs();
    let extra = [
        ("k4", 4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 0, 3),
        ("hexagon_chord", 6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)], 0, 3),
        ("ladder", 6, vec![(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)], 0, 5),
        ("path5", 6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)], 0, 5),
    ];
    for (name, v, e, s, t) in extra {
        out.push((name.to_string(), GraphSpec::new(v, e, s, t).unwrap()));
    }
    out
}
