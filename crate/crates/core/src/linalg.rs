//! Dense symmetric eigensolver and the singular-value helpers built on it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Off-diagonal Frobenius threshold, relative to the Frobenius norm of the input.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(values) Vᵀ` with eigenvalues sorted ascending;
/// eigenvectors are the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Cyclic Jacobi rotations. Deterministic: the rotation order is fixed row by row.
pub fn symmetric_eigen(matrix: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::precondition("eigensolver needs a square matrix"));
    }
    let mut a = matrix.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();
    let threshold = JACOBI_TOLERANCE * if scale > 0.0 { scale } else { 1.0 };

    let off = |a: &DMatrix<f64>| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    s += a[(p, q)] * a[(p, q)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence {
                what: "Jacobi eigensolver",
                iterations: sweeps,
                residual: off(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = idx.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// One singular triplet `m v = sigma u`.
#[derive(Clone, Debug)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub left: DVector<f64>,
    pub right: DVector<f64>,
}

/// Singular triplets from the eigen-decomposition of the smaller Gram matrix,
/// sorted by decreasing singular value. Triplets with sigma below `floor` are dropped
/// (their singular vectors are numerically meaningless).
pub fn singular_triplets(m: &DMatrix<f64>, floor: f64) -> Result<Vec<SingularTriplet>> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    let transpose = rows < cols;
    let gram = if transpose { m * m.transpose() } else { m.transpose() * m };
    let eig = symmetric_eigen(&gram)?;
    let mut out = Vec::new();
    for k in (0..eig.values.len()).rev() {
        let sigma = eig.values[k].max(0.0).sqrt();
        if sigma <= floor {
            continue;
        }
        let vec = eig.vectors.column(k).into_owned();
        let (left, right) = if transpose {
            let right = m.transpose() * &vec / sigma;
            (vec, right)
        } else {
            let left = m * &vec / sigma;
            (left, vec)
        };
        out.push(SingularTriplet { sigma, left, right });
    }
    Ok(out)
}

/// Size up to which [`spectral_norm`] cross-checks power iteration with Jacobi.
pub const CROSS_CHECK_LIMIT: usize = 50;
const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITERS: usize = 100_000;

/// Largest singular value with a unit singular pair.
pub fn top_singular(m: &DMatrix<f64>) -> Result<SingularTriplet> {
    let (rows, cols) = m.shape();
    let zero = || SingularTriplet {
        sigma: 0.0,
        left: unit(rows),
        right: unit(cols),
    };
    if m.iter().all(|&x| x == 0.0) {
        return Ok(zero());
    }
    let power = power_top(m)?;
    if rows.min(cols) <= CROSS_CHECK_LIMIT {
        let exact = singular_triplets(m, 0.0)?;
        if let Some(best) = exact.into_iter().next() {
            // power iteration may stall in an invariant subspace; Jacobi wins on disagreement
            if best.sigma > power.sigma * (1.0 + 1e-9) || power.sigma.is_nan() {
                return Ok(best);
            }
        }
    }
    Ok(power)
}

pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(top_singular(m)?.sigma)
}

/// Like [`top_singular`], but small matrices go straight to Jacobi. Used in
/// solver inner loops, where the cross-check would always defer to Jacobi anyway.
pub fn top_singular_fast(m: &DMatrix<f64>) -> Result<SingularTriplet> {
    let (rows, cols) = m.shape();
    if rows.min(cols) > CROSS_CHECK_LIMIT || m.iter().all(|&x| x == 0.0) {
        return top_singular(m);
    }
    let first = singular_triplets(m, 0.0)?.into_iter().next();
    Ok(first.unwrap_or(SingularTriplet {
        sigma: 0.0,
        left: unit(rows),
        right: unit(cols),
    }))
}

pub fn spectral_norm_fast(m: &DMatrix<f64>) -> Result<f64> {
    Ok(top_singular_fast(m)?.sigma)
}

fn unit(n: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    if n > 0 {
        v[0] = 1.0;
    }
    v
}

/// Power iteration on MᵀM: all-ones start, then a restart orthogonal to the first result.
fn power_top(m: &DMatrix<f64>) -> Result<SingularTriplet> {
    let cols = m.ncols();
    let first = power_from(m, DVector::from_element(cols, 1.0))?;
    let mut alt = DVector::from_fn(cols, |i, _| {
        // deterministic, not aligned with any coordinate pattern
        let x = ((i as f64 + 1.0) * 0.618_033_988_749_895).fract();
        x - 0.5
    });
    let proj = alt.dot(&first.right);
    alt -= &first.right * proj;
    let second = if alt.norm() > 1e-12 { Some(power_from(m, alt)?) } else { None };
    Ok(match second {
        Some(s) if s.sigma > first.sigma => s,
        _ => first,
    })
}

fn power_from(m: &DMatrix<f64>, start: DVector<f64>) -> Result<SingularTriplet> {
    let mt = m.transpose();
    let mut v = start;
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::invariant("zero start vector in power iteration"));
    }
    v /= norm;
    let mut sigma_sq = 0.0;
    for it in 0..POWER_MAX_ITERS {
        let mv = m * &v;
        let w = &mt * &mv;
        let wn = w.norm();
        if wn == 0.0 {
            // start vector lies in the kernel
            return Ok(SingularTriplet {
                sigma: 0.0,
                left: unit(m.nrows()),
                right: v,
            });
        }
        let next = mv.norm_squared();
        v = w / wn;
        if it > 0 && (next - sigma_sq).abs() <= POWER_TOLERANCE * next {
            sigma_sq = next;
            let sigma = sigma_sq.sqrt();
            let left = m * &v / sigma;
            let left_norm = left.norm();
            return Ok(SingularTriplet {
                sigma,
                left: left / left_norm,
                right: v,
            });
        }
        sigma_sq = next;
    }
    Err(Error::NonConvergence {
        what: "power iteration",
        iterations: POWER_MAX_ITERS,
        residual: sigma_sq,
    })
}
