//! Transportation simplex: exact linear minimization over
//! `{X >= 0, X 1 = r, Xᵀ 1 = c}`.
//!
//! Northwest-corner start, MODI potentials, Bland's rule for both the entering
//! and the leaving cell. The basis always holds `n + m - 1` cells forming a
//! spanning tree of the bipartite row/column graph, degenerate zeros included.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TransportSolution {
    pub plan: DMatrix<f64>,
    pub objective: f64,
    pub pivots: usize,
    /// Most negative reduced cost at termination (>= -tolerance when optimal).
    pub min_reduced_cost: f64,
}

pub fn transportation_lmo(cost: &DMatrix<f64>, r: &[f64], c: &[f64]) -> Result<TransportSolution> {
    let (n, m) = cost.shape();
    if r.len() != n || c.len() != m || n == 0 || m == 0 {
        return Err(Error::precondition("marginal lengths must match the cost matrix"));
    }
    let (sr, sc): (f64, f64) = (r.iter().sum(), c.iter().sum());
    if (sr - sc).abs() > 1e-9 * sr.abs().max(1.0) {
        return Err(Error::precondition(format!(
            "marginal sums differ: {sr} vs {sc}"
        )));
    }
    if r.iter().chain(c).any(|&x| x < 0.0) {
        return Err(Error::precondition("marginals must be nonnegative"));
    }

    let mut x = DMatrix::<f64>::zeros(n, m);
    let mut basic = vec![false; n * m];
    let mut basis: Vec<(usize, usize)> = Vec::with_capacity(n + m - 1);

    // northwest corner
    let (mut rs, mut cd) = (r.to_vec(), c.to_vec());
    let (mut i, mut j) = (0, 0);
    loop {
        let q = rs[i].min(cd[j]);
        x[(i, j)] = q;
        basic[i * m + j] = true;
        basis.push((i, j));
        rs[i] -= q;
        cd[j] -= q;
        if i == n - 1 && j == m - 1 {
            break;
        }
        if (rs[i] <= cd[j] && i < n - 1) || j == m - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    debug_assert_eq!(basis.len(), n + m - 1);

    let scale = cost.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let tol = 1e-12 * scale;
    let max_pivots = 50 * (n * m) + 1000;
    let mut pivots = 0;

    loop {
        let (u, v) = potentials(cost, &basis, n, m);
        let mut entering = None;
        let mut min_reduced = 0.0f64;
        for ii in 0..n {
            for jj in 0..m {
                if basic[ii * m + jj] {
                    continue;
                }
                let d = cost[(ii, jj)] - u[ii] - v[jj];
                min_reduced = min_reduced.min(d);
                if entering.is_none() && d < -tol {
                    entering = Some((ii, jj));
                }
            }
        }
        let Some((ei, ej)) = entering else {
            for val in x.iter_mut() {
                if *val < 0.0 {
                    *val = 0.0;
                }
            }
            let objective = x.component_mul(cost).sum();
            return Ok(TransportSolution {
                plan: x,
                objective,
                pivots,
                min_reduced_cost: min_reduced,
            });
        };
        if pivots == max_pivots {
            return Err(Error::invariant(format!(
                "transportation simplex exceeded {max_pivots} pivots"
            )));
        }
        pivots += 1;

        let path = tree_path(&basis, n, m, ei, ej);
        // path[0] touches row ei and gets -, then signs alternate
        let mut theta = f64::INFINITY;
        let mut leaving: Option<(usize, usize)> = None;
        for (k, &(pi, pj)) in path.iter().enumerate() {
            if k % 2 == 0 {
                let val = x[(pi, pj)];
                let better = match leaving {
                    None => true,
                    Some(l) => val < theta || (val == theta && (pi, pj) < l),
                };
                if better {
                    theta = val;
                    leaving = Some((pi, pj));
                }
            }
        }
        let theta = theta.max(0.0);
        let leaving = leaving.expect("cycle always has a minus cell");
        for (k, &(pi, pj)) in path.iter().enumerate() {
            if k % 2 == 0 {
                x[(pi, pj)] -= theta;
            } else {
                x[(pi, pj)] += theta;
            }
        }
        x[(ei, ej)] = theta;
        x[leaving] = 0.0;
        basic[leaving.0 * m + leaving.1] = false;
        basic[ei * m + ej] = true;
        let pos = basis.iter().position(|&b| b == leaving).unwrap();
        basis[pos] = (ei, ej);
    }
}

/// Row potentials `u` and column potentials `v` with `u_i + v_j = c_ij` on the basis.
fn potentials(cost: &DMatrix<f64>, basis: &[(usize, usize)], n: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    let adj = adjacency(basis, n, m);
    let mut pot = vec![f64::NAN; n + m];
    pot[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        for &(other, (i, j)) in &adj[node] {
            if pot[other].is_nan() {
                // node is a row iff node < n
                pot[other] = cost[(i, j)] - pot[node];
                queue.push_back(other);
            }
        }
    }
    (pot[..n].to_vec(), pot[n..].to_vec())
}

fn adjacency(basis: &[(usize, usize)], n: usize, m: usize) -> Vec<Vec<(usize, (usize, usize))>> {
    let mut adj = vec![Vec::new(); n + m];
    for &(i, j) in basis {
        adj[i].push((n + j, (i, j)));
        adj[n + j].push((i, (i, j)));
    }
    adj
}

/// Basis cells on the tree path from row `ei` to column `ej`, starting at the row end.
fn tree_path(basis: &[(usize, usize)], n: usize, m: usize, ei: usize, ej: usize) -> Vec<(usize, usize)> {
    let adj = adjacency(basis, n, m);
    let mut prev: Vec<Option<(usize, (usize, usize))>> = vec![None; n + m];
    let mut seen = vec![false; n + m];
    seen[ei] = true;
    let mut queue = VecDeque::from([ei]);
    while let Some(node) = queue.pop_front() {
        if node == n + ej {
            break;
        }
        for &(other, cell) in &adj[node] {
            if !seen[other] {
                seen[other] = true;
                prev[other] = Some((node, cell));
                queue.push_back(other);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = n + ej;
    while node != ei {
        let (p, cell) = prev[node].expect("basis is a spanning tree");
        path.push(cell);
        node = p;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_cost_returns_northwest_corner() {
        let cost = DMatrix::zeros(2, 3);
        let s = transportation_lmo(&cost, &[0.5, 0.5], &[1.0 / 3.0; 3]).unwrap();
        assert_eq!(s.pivots, 0);
        assert!((s.plan[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.plan[(0, 1)] - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(s.plan[(0, 2)], 0.0);
    }

    #[test]
    fn two_by_two_picks_the_diagonal() {
        let cost = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = transportation_lmo(&cost, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(s.plan, DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]));
        let anti = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let s = transportation_lmo(&anti, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(s.plan, DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
        assert!(s.pivots >= 1);
    }

    #[test]
    fn singleton_polytope() {
        let cost = DMatrix::from_row_slice(2, 1, &[3.0, -7.0]);
        let s = transportation_lmo(&cost, &[0.5, 0.5], &[1.0]).unwrap();
        assert_eq!(s.plan, DMatrix::from_row_slice(2, 1, &[0.5, 0.5]));
    }

    #[test]
    fn rejects_mismatched_marginals() {
        let cost = DMatrix::zeros(2, 2);
        assert!(transportation_lmo(&cost, &[0.5, 0.5], &[0.5, 0.6]).is_err());
    }

    #[test]
    fn degenerate_instance_reaches_optimality() {
        // permutation-like costs with uniform marginals are highly degenerate
        let n = 5;
        let cost = DMatrix::from_fn(n, n, |i, j| if (i + 2) % n == j { -1.0 } else { ((i * 7 + j * 3) % 5) as f64 });
        let r = vec![1.0 / n as f64; n];
        let s = transportation_lmo(&cost, &r, &r).unwrap();
        assert!(s.min_reduced_cost >= -1e-9);
        for i in 0..n {
            assert!((s.plan.row(i).sum() - 0.2).abs() < 1e-12);
            assert!((s.plan.column(i).sum() - 0.2).abs() < 1e-12);
        }
        assert!((s.objective - (-1.0)).abs() < 1e-12);
    }
}
