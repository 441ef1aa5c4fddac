//! Cut norm `max_{S,T} |Σ_{i∈S, j∈T} M_ij|`, exact by subset enumeration or
//! heuristic by alternating local search.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest smaller-side dimension handled by exact enumeration.
pub const EXACT_CUT_LIMIT: usize = 22;
pub const HEURISTIC_RESTARTS: usize = 20;

/// Gray-code column sums are recomputed from scratch this often to bound drift.
const RESYNC_PERIOD: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutMode {
    Exact,
    Heuristic { seed: u64 },
    /// Exact within [`EXACT_CUT_LIMIT`], heuristic beyond.
    Auto { seed: u64 },
}

/// A rectangle witnessing the cut norm (or, when `exact` is false, a lower bound on it).
#[derive(Clone, Debug, PartialEq)]
pub struct CutNorm {
    pub value: f64,
    /// Signed sum over the rectangle; `value == sum.abs()`.
    pub sum: f64,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub exact: bool,
}

pub fn cut_norm(m: &DMatrix<f64>, mode: CutMode) -> Result<CutNorm> {
    let (n, k) = m.shape();
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::precondition("cut norm of a matrix with non-finite entries"));
    }
    let small = n.min(k);
    match mode {
        CutMode::Exact if small > EXACT_CUT_LIMIT => Err(Error::precondition(format!(
            "exact cut norm needs min dimension <= {EXACT_CUT_LIMIT}, got {small}"
        ))),
        CutMode::Exact => Ok(exact(m)),
        CutMode::Auto { .. } if small <= EXACT_CUT_LIMIT => Ok(exact(m)),
        CutMode::Heuristic { seed } | CutMode::Auto { seed } => Ok(heuristic(m, seed)),
    }
}

pub fn rectangle_sum(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[(i, j)]).sum::<f64>())
        .sum()
}

fn exact(m: &DMatrix<f64>) -> CutNorm {
    let transpose = m.nrows() > m.ncols();
    let work = if transpose { m.transpose() } else { m.clone() };
    let (k, cols) = work.shape();
    let scale = work.iter().map(|x| x.abs()).sum::<f64>();
    let eps = 1e-12 * scale.max(f64::MIN_POSITIVE);

    let mut sums = vec![0.0f64; cols];
    let mut in_set = vec![false; k];
    // best: (value, subset as sorted indices, positive?)
    let mut best_value = 0.0f64;
    let mut best_set: Vec<usize> = Vec::new();
    let mut best_positive = true;

    let total: u64 = 1u64 << k;
    for step in 0..total {
        if step > 0 {
            let bit = step.trailing_zeros() as usize;
            in_set[bit] = !in_set[bit];
            if step % RESYNC_PERIOD == 0 {
                for (j, s) in sums.iter_mut().enumerate() {
                    *s = (0..k).filter(|&i| in_set[i]).map(|i| work[(i, j)]).sum();
                }
            } else {
                let sign = if in_set[bit] { 1.0 } else { -1.0 };
                for (j, s) in sums.iter_mut().enumerate() {
                    *s += sign * work[(bit, j)];
                }
            }
        }
        let pos: f64 = sums.iter().filter(|&&s| s > 0.0).sum();
        let neg: f64 = -sums.iter().filter(|&&s| s < 0.0).sum::<f64>();
        for (value, positive) in [(pos, true), (neg, false)] {
            if value > best_value + eps {
                best_value = value;
                best_set = (0..k).filter(|&i| in_set[i]).collect();
                best_positive = positive;
            } else if value >= best_value - eps && value > 0.0 {
                let set: Vec<usize> = (0..k).filter(|&i| in_set[i]).collect();
                let better = match set.cmp(&best_set) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal => positive && !best_positive,
                    std::cmp::Ordering::Greater => false,
                };
                if better {
                    best_value = best_value.max(value);
                    best_set = set;
                    best_positive = positive;
                }
            }
        }
    }

    let other: Vec<usize> = (0..cols)
        .filter(|&j| {
            let s: f64 = best_set.iter().map(|&i| work[(i, j)]).sum();
            if best_positive {
                s > 0.0
            } else {
                s < 0.0
            }
        })
        .collect();
    let (rows, cols) = if transpose { (other, best_set) } else { (best_set, other) };
    let sum = rectangle_sum(m, &rows, &cols);
    CutNorm {
        value: sum.abs(),
        sum,
        rows,
        cols,
        exact: true,
    }
}

/// Random starts, then alternate the optimal column set for the current rows
/// and the optimal row set for the current columns. A fixed point is a local
/// optimum under flipping any single row or column.
fn heuristic(m: &DMatrix<f64>, seed: u64) -> CutNorm {
    let (n, k) = m.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = CutNorm {
        value: 0.0,
        sum: 0.0,
        rows: Vec::new(),
        cols: Vec::new(),
        exact: false,
    };
    for _ in 0..HEURISTIC_RESTARTS {
        let start: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        for sign in [1.0, -1.0] {
            let mut rows = start.clone();
            let mut value = f64::NEG_INFINITY;
            loop {
                let cols: Vec<bool> = (0..k)
                    .map(|j| sign * (0..n).filter(|&i| rows[i]).map(|i| m[(i, j)]).sum::<f64>() > 0.0)
                    .collect();
                let row_sums: Vec<f64> = (0..n)
                    .map(|i| sign * (0..k).filter(|&j| cols[j]).map(|j| m[(i, j)]).sum::<f64>())
                    .collect();
                let next_rows: Vec<bool> = row_sums.iter().map(|&s| s > 0.0).collect();
                let next_value: f64 = row_sums.iter().filter(|&&s| s > 0.0).sum();
                if next_value <= value + 1e-15 * value.abs().max(1.0) {
                    break;
                }
                value = next_value;
                rows = next_rows;
            }
            let row_idx: Vec<usize> = (0..n).filter(|&i| rows[i]).collect();
            let col_idx: Vec<usize> = (0..k)
                .filter(|&j| sign * row_idx.iter().map(|&i| m[(i, j)]).sum::<f64>() > 0.0)
                .collect();
            let sum = rectangle_sum(m, &row_idx, &col_idx);
            if sum.abs() > best.value {
                best = CutNorm {
                    value: sum.abs(),
                    sum,
                    rows: row_idx,
                    cols: col_idx,
                    exact: false,
                };
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: every pair of subsets.
    fn brute(m: &DMatrix<f64>) -> f64 {
        let (n, k) = m.shape();
        let mut best = 0.0f64;
        for s in 0u32..1 << n {
            for t in 0u32..1 << k {
                let mut sum = 0.0;
                for i in 0..n {
                    for j in 0..k {
                        if s >> i & 1 == 1 && t >> j & 1 == 1 {
                            sum += m[(i, j)];
                        }
                    }
                }
                best = best.max(f64::abs(sum));
            }
        }
        best
    }

    #[test]
    fn examples() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let c = cut_norm(&m, CutMode::Exact).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!((c.rows.clone(), c.cols.clone()), (vec![0], vec![0]));
        assert_eq!(c.sum, 1.0);
        let v = DMatrix::from_row_slice(2, 1, &[0.5, 0.5]);
        assert_eq!(cut_norm(&v, CutMode::Exact).unwrap().value, 1.0);
        let z = cut_norm(&DMatrix::zeros(3, 4), CutMode::Exact).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(z.rows.is_empty());
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let k = rng.gen_range(1..=6);
            let m = DMatrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0));
            let c = cut_norm(&m, CutMode::Exact).unwrap();
            assert!((c.value - brute(&m)).abs() < 1e-12);
            assert!((rectangle_sum(&m, &c.rows, &c.cols) - c.sum).abs() < 1e-15);
        }
    }

    #[test]
    fn resync_keeps_large_enumerations_accurate() {
        let m = DMatrix::from_fn(14, 3, |i, j| ((i * 3 + j) as f64 * 1.3).sin() * 1e3);
        let c = cut_norm(&m, CutMode::Exact).unwrap();
        assert!((rectangle_sum(&m, &c.rows, &c.cols).abs() - c.value).abs() == 0.0);
        // transposed problem has the same norm
        let t = cut_norm(&m.transpose(), CutMode::Exact).unwrap();
        assert!((c.value - t.value).abs() < 1e-9);
    }

    #[test]
    fn heuristic_is_a_lower_bound_and_often_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tight = 0;
        for seed in 0..50 {
            let m = DMatrix::from_fn(6, 7, |_, _| rng.gen_range(-1.0..1.0));
            let h = cut_norm(&m, CutMode::Heuristic { seed }).unwrap();
            let e = cut_norm(&m, CutMode::Exact).unwrap();
            assert!(!h.exact);
            assert!(h.value <= e.value + 1e-12);
            if e.value - h.value < 1e-12 {
                tight += 1;
            }
        }
        assert!(tight >= 40, "heuristic tight on only {tight} of 50");
    }

    #[test]
    fn size_cap() {
        let big = DMatrix::zeros(23, 23);
        assert!(cut_norm(&big, CutMode::Exact).is_err());
        assert!(!cut_norm(&big, CutMode::Auto { seed: 0 }).unwrap().exact);
        assert!(cut_norm(&DMatrix::zeros(23, 22), CutMode::Auto { seed: 0 }).unwrap().exact);
    }
}
