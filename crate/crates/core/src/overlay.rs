//! Fractional and signed overlays: validation, projections, composition and
//! certificates built from matched quotients or matched main spectra.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Rational};
use crate::linalg::{singular_triplets, spectral_norm_fast};
use crate::refine::{color_refine, path_equivalent, quotient_match, quotient_with, PathSpectrum};

pub const MARGINAL_TOL: f64 = 1e-10;
pub const NEGATIVITY_TOL: f64 = 1e-12;
pub const SPECTRAL_TOL: f64 = 1e-9;

pub const DYKSTRA_TOL: f64 = 1e-11;
pub const DYKSTRA_MAX_ROUNDS: usize = 10_000;

/// Feasibility diagnostics of an overlay matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// Largest absolute deviation of a row or column sum from its marginal.
    pub marginal: f64,
    /// Magnitude of the most negative entry, 0 if none.
    pub negativity: f64,
    /// Amount by which the spectral norm exceeds 1/sqrt(nm), 0 if none.
    pub spectral_excess: f64,
}

pub fn marginal_residual(x: &DMatrix<f64>, r: &[f64], c: &[f64]) -> f64 {
    let rows = x.row_iter().zip(r).map(|(row, &t)| (row.sum() - t).abs());
    let cols = x.column_iter().zip(c).map(|(col, &t)| (col.sum() - t).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

fn negativity(x: &DMatrix<f64>) -> f64 {
    x.iter().fold(0.0f64, |acc, &v| acc.max(-v))
}

fn spectral_excess(x: &DMatrix<f64>) -> Result<f64> {
    let radius = 1.0 / ((x.nrows() * x.ncols()) as f64).sqrt();
    Ok((spectral_norm_fast(x)? - radius).max(0.0))
}

pub fn residuals(x: &DMatrix<f64>, r: &[f64], c: &[f64]) -> Result<Residuals> {
    Ok(Residuals {
        marginal: marginal_residual(x, r, c),
        negativity: negativity(x),
        spectral_excess: spectral_excess(x)?,
    })
}

pub fn uniform_marginal(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn check_shape(x: &DMatrix<f64>, r: &[f64], c: &[f64]) -> Result<()> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::precondition("overlay must have at least one row and column"));
    }
    if x.nrows() != r.len() || x.ncols() != c.len() {
        return Err(Error::precondition(format!(
            "overlay is {}x{} but marginals have lengths {} and {}",
            x.nrows(),
            x.ncols(),
            r.len(),
            c.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::precondition("overlay has non-finite entries"));
    }
    Ok(())
}

/// Nonnegative coupling with prescribed row and column marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalOverlay {
    x: DMatrix<f64>,
    row: Vec<f64>,
    col: Vec<f64>,
}

impl FractionalOverlay {
    pub fn new(x: DMatrix<f64>, row: Vec<f64>, col: Vec<f64>) -> Result<Self> {
        check_shape(&x, &row, &col)?;
        let marginal = marginal_residual(&x, &row, &col);
        if marginal > MARGINAL_TOL {
            return Err(Error::precondition(format!(
                "overlay marginals off by {marginal:e}"
            )));
        }
        let neg = negativity(&x);
        if neg > NEGATIVITY_TOL {
            return Err(Error::precondition(format!(
                "overlay has an entry of {:e}",
                -neg
            )));
        }
        Ok(FractionalOverlay { x, row, col })
    }

    /// Overlay of two unweighted graphs: marginals 1/n and 1/m.
    pub fn for_graphs(x: DMatrix<f64>) -> Result<Self> {
        let (n, m) = x.shape();
        Self::new(x, uniform_marginal(n), uniform_marginal(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.x
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col
    }

    pub fn residuals(&self) -> Result<Residuals> {
        residuals(&self.x, &self.row, &self.col)
    }

    /// Overlay of (G, H) from overlays of (G, B) and (B, H):
    /// `Z_ij = Σ_b X1_ib X2_bj / w_b` with `w` the shared marginal of B.
    /// For unweighted B this is `p · X1 · X2`.
    pub fn compose(&self, other: &FractionalOverlay) -> Result<FractionalOverlay> {
        if self.x.ncols() != other.x.nrows() {
            return Err(Error::precondition("inner overlay dimensions differ"));
        }
        let shared = self
            .col
            .iter()
            .zip(&other.row)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        if shared > MARGINAL_TOL {
            return Err(Error::precondition("overlays disagree on the middle marginal"));
        }
        let mut scaled = other.x.clone();
        for (b, w) in self.col.iter().enumerate() {
            let factor = if *w > 0.0 { 1.0 / w } else { 0.0 };
            scaled.row_mut(b).scale_mut(factor);
        }
        let z = &self.x * scaled;
        FractionalOverlay::new(z, self.row.clone(), other.col.clone())
    }

    /// A graph overlay is also a signed overlay (its spectral norm is at most 1/sqrt(nm)).
    pub fn to_signed(&self) -> Result<SignedOverlay> {
        SignedOverlay::new(self.x.clone())
    }
}

/// Coupling with uniform marginals whose spectral norm is at most 1/sqrt(nm).
/// Entries may be negative.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedOverlay {
    x: DMatrix<f64>,
}

impl SignedOverlay {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        let (n, m) = x.shape();
        check_shape(&x, &uniform_marginal(n), &uniform_marginal(m))?;
        let marginal = marginal_residual(&x, &uniform_marginal(n), &uniform_marginal(m));
        if marginal > MARGINAL_TOL {
            return Err(Error::precondition(format!(
                "signed overlay marginals off by {marginal:e}"
            )));
        }
        let excess = spectral_excess(&x)?;
        if excess > SPECTRAL_TOL {
            return Err(Error::precondition(format!(
                "signed overlay exceeds the spectral radius by {excess:e}"
            )));
        }
        Ok(SignedOverlay { x })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.x
    }

    pub fn residuals(&self) -> Result<Residuals> {
        let (n, m) = self.x.shape();
        residuals(&self.x, &uniform_marginal(n), &uniform_marginal(m))
    }

    /// `p · X1 · X2` with `p` the middle order.
    pub fn compose(&self, other: &SignedOverlay) -> Result<SignedOverlay> {
        let p = self.x.ncols();
        if p != other.x.nrows() {
            return Err(Error::precondition("inner overlay dimensions differ"));
        }
        SignedOverlay::new(&self.x * &other.x * p as f64)
    }
}

pub fn uniform_overlay(n: usize, m: usize) -> Result<FractionalOverlay> {
    if n == 0 || m == 0 {
        return Err(Error::precondition("overlay dimensions must be positive"));
    }
    FractionalOverlay::for_graphs(DMatrix::from_element(n, m, 1.0 / (n * m) as f64))
}

fn check_sums(r: &[f64], c: &[f64]) -> Result<()> {
    let (sr, sc): (f64, f64) = (r.iter().sum(), c.iter().sum());
    if (sr - sc).abs() > MARGINAL_TOL {
        return Err(Error::precondition(format!(
            "marginal sums differ: {sr} vs {sc}"
        )));
    }
    Ok(())
}

/// Euclidean projection onto `{X 1 = r, Xᵀ 1 = c}`.
pub fn project_marginals(mat: &DMatrix<f64>, r: &[f64], c: &[f64]) -> Result<DMatrix<f64>> {
    check_shape(mat, r, c)?;
    check_sums(r, c)?;
    let (n, m) = mat.shape();
    let a: Vec<f64> = (0..n).map(|i| r[i] - mat.row(i).sum()).collect();
    let b: Vec<f64> = (0..m).map(|j| c[j] - mat.column(j).sum()).collect();
    let s = r.iter().sum::<f64>() - mat.sum();
    let (nf, mf) = (n as f64, m as f64);
    Ok(DMatrix::from_fn(n, m, |i, j| {
        mat[(i, j)] + a[i] / mf + b[j] / nf - s / (nf * mf)
    }))
}

/// Euclidean projection onto the transportation polytope by Dykstra's algorithm
/// alternating the affine marginal projection and clamping at zero.
pub fn dykstra_transportation(mat: &DMatrix<f64>, r: &[f64], c: &[f64]) -> Result<FractionalOverlay> {
    check_shape(mat, r, c)?;
    check_sums(r, c)?;
    if r.iter().chain(c).any(|&v| v < 0.0) {
        return Err(Error::precondition("marginals must be nonnegative"));
    }
    let (n, m) = mat.shape();
    let mut x = mat.clone();
    let mut p = DMatrix::<f64>::zeros(n, m);
    let mut q = DMatrix::<f64>::zeros(n, m);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let y = project_marginals(&(&x + &p), r, c)?;
        p = &x + &p - &y;
        let shifted = &y + &q;
        let next = shifted.map(|v| v.max(0.0));
        q = shifted - &next;
        let change = (&next - &x).amax();
        x = next;
        let marginal = marginal_residual(&x, r, c);
        if change < DYKSTRA_TOL && marginal < DYKSTRA_TOL {
            break;
        }
        if rounds == DYKSTRA_MAX_ROUNDS {
            if marginal <= MARGINAL_TOL {
                break;
            }
            return Err(Error::NonConvergence {
                what: "Dykstra projection onto the transportation polytope",
                iterations: rounds,
                residual: marginal,
            });
        }
    }
    FractionalOverlay::new(x, r.to_vec(), c.to_vec())
        .map_err(|e| Error::invariant(format!("Dykstra output failed validation: {e}")))
}

/// Euclidean projection onto `{‖X‖₂ ≤ radius}`: singular values above the
/// radius are clamped to it.
pub fn project_spectral_ball(mat: &DMatrix<f64>, radius: f64) -> Result<DMatrix<f64>> {
    if !(radius > 0.0) {
        return Err(Error::precondition("spectral radius must be positive"));
    }
    let mut out = mat.clone();
    for t in singular_triplets(mat, radius)? {
        out -= &t.left * t.right.transpose() * (t.sigma - radius);
    }
    Ok(out)
}

/// Euclidean projection onto the signed-overlay set by Dykstra's algorithm.
///
/// After the marginal projection, `X = U + Y` with `U` the uniform overlay
/// (a single singular value equal to the radius, vectors along the all-ones
/// directions) and `Y` mapping the orthogonal complements into each other.
/// Clamping only touches `Y` and keeps the marginals, so the iteration
/// settles in about two rounds.
pub fn dykstra_signed(mat: &DMatrix<f64>) -> Result<SignedOverlay> {
    let (n, m) = mat.shape();
    let (r, c) = (uniform_marginal(n), uniform_marginal(m));
    check_shape(mat, &r, &c)?;
    let radius = 1.0 / ((n * m) as f64).sqrt();
    let mut x = mat.clone();
    let mut p = DMatrix::<f64>::zeros(n, m);
    let mut q = DMatrix::<f64>::zeros(n, m);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let y = project_marginals(&(&x + &p), &r, &c)?;
        p = &x + &p - &y;
        let shifted = &y + &q;
        let next = project_spectral_ball(&shifted, radius)?;
        q = shifted - &next;
        let change = (&next - &x).amax();
        x = next;
        let marginal = marginal_residual(&x, &r, &c);
        if change < DYKSTRA_TOL && marginal < DYKSTRA_TOL {
            break;
        }
        if rounds == DYKSTRA_MAX_ROUNDS {
            if marginal <= MARGINAL_TOL {
                break;
            }
            return Err(Error::NonConvergence {
                what: "Dykstra projection onto signed overlays",
                iterations: rounds,
                residual: marginal,
            });
        }
    }
    SignedOverlay::new(x).map_err(|e| Error::invariant(format!("Dykstra output failed validation: {e}")))
}

/// Block-uniform overlay from matched stable colorings, in exact arithmetic:
/// `X[u][v] = 1 / (n |D|)` when the class of `u` is matched to the class `D` of `v`.
/// Returns `None` when the quotients do not match.
pub fn tree_certificate_exact(g: &Graph, h: &Graph) -> Result<Option<Vec<Vec<Rational>>>> {
    let (n, m) = (g.vertex_count(), h.vertex_count());
    if n == 0 || m == 0 {
        return Err(Error::precondition("graphs must be nonempty"));
    }
    let (cg, ch) = (color_refine(g), color_refine(h));
    let (qg, qh) = (quotient_with(g, &cg)?, quotient_with(h, &ch)?);
    let Some(pi) = quotient_match(&qg, &qh, n, m) else {
        return Ok(None);
    };
    let sizes_h: Vec<usize> = ch.classes().iter().map(Vec::len).collect();
    let x = (0..n)
        .map(|u| {
            let d = pi[cg.colors[u]];
            (0..m)
                .map(|v| {
                    if ch.colors[v] == d {
                        Rational::new(BigInt::from(1), BigInt::from(n * sizes_h[d]))
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    Ok(Some(x))
}

/// [`tree_certificate_exact`] as a validated floating-point overlay.
pub fn tree_certificate(g: &Graph, h: &Graph) -> Result<Option<FractionalOverlay>> {
    let Some(exact) = tree_certificate_exact(g, h)? else {
        return Ok(None);
    };
    let (n, m) = (g.vertex_count(), h.vertex_count());
    let x = DMatrix::from_fn(n, m, |i, j| crate::graph::to_f64(&exact[i][j]));
    FractionalOverlay::for_graphs(x).map(Some)
}

/// Signed overlay pairing the all-ones projections of matched main eigenspaces:
/// `X = (1/sqrt(nm)) Σ p_k q_kᵀ / (‖p_k‖ ‖q_k‖)`. Returns `None` when the spectra differ.
pub fn path_certificate(sg: &PathSpectrum, sh: &PathSpectrum, tol: f64) -> Result<Option<SignedOverlay>> {
    if !path_equivalent(sg, sh, tol) {
        return Ok(None);
    }
    let (n, m) = (sg.order, sh.order);
    if n == 0 || m == 0 {
        return Err(Error::precondition("graphs must be nonempty"));
    }
    let mut x = DMatrix::<f64>::zeros(n, m);
    for (p, q) in sg.projections.iter().zip(&sh.projections) {
        let scale = 1.0 / (p.norm() * q.norm());
        x += p * q.transpose() * scale;
    }
    x /= ((n * m) as f64).sqrt();
    // matched weights agree only within tol; the projection removes that drift
    dykstra_signed(&x).map(Some)
}

/// One-line header with dimensions, marginals and residuals, then one CSV row per matrix row.
pub fn certificate_to_csv(x: &DMatrix<f64>, row: &[f64], col: &[f64], res: &Residuals) -> String {
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
    let mut out = format!(
        "# rows={} cols={} row_marginal={} col_marginal={} marginal_residual={:e} negativity={:e} spectral_excess={:e}\n",
        x.nrows(),
        x.ncols(),
        join(row),
        join(col),
        res.marginal,
        res.negativity,
        res.spectral_excess
    );
    for i in 0..x.nrows() {
        let line: Vec<String> = x.row(i).iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// Matrix and marginals read back from [`certificate_to_csv`] output.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub matrix: DMatrix<f64>,
    pub row_marginal: Vec<f64>,
    pub col_marginal: Vec<f64>,
}

pub fn certificate_from_csv(text: &str) -> Result<Certificate> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty certificate"))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(1, "missing '#' header"))?;
    let mut rows = None;
    let mut cols = None;
    let mut row_marginal = None;
    let mut col_marginal = None;
    let floats = |s: &str| -> Result<Vec<f64>> {
        s.split(';')
            .map(|t| t.parse::<f64>().map_err(|e| Error::parse(1, format!("bad marginal {t:?}: {e}"))))
            .collect()
    };
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("bad header field {field:?}")))?;
        match key {
            "rows" => rows = Some(value.parse::<usize>().map_err(|e| Error::parse(1, e.to_string()))?),
            "cols" => cols = Some(value.parse::<usize>().map_err(|e| Error::parse(1, e.to_string()))?),
            "row_marginal" => row_marginal = Some(floats(value)?),
            "col_marginal" => col_marginal = Some(floats(value)?),
            _ => {}
        }
    }
    let (Some(n), Some(m)) = (rows, cols) else {
        return Err(Error::parse(1, "header lacks rows= or cols="));
    };
    let row_marginal = row_marginal.unwrap_or_else(|| uniform_marginal(n));
    let col_marginal = col_marginal.unwrap_or_else(|| uniform_marginal(m));
    if row_marginal.len() != n || col_marginal.len() != m {
        return Err(Error::parse(1, "marginal lengths disagree with rows/cols"));
    }
    let mut matrix = DMatrix::zeros(n, m);
    let mut seen = 0;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if seen == n {
            return Err(Error::parse(idx + 1, "more rows than declared"));
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != m {
            return Err(Error::parse(idx + 1, format!("expected {m} values, found {}", cells.len())));
        }
        for (j, cell) in cells.iter().enumerate() {
            matrix[(seen, j)] = cell
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(idx + 1, format!("bad value {cell:?}: {e}")))?;
        }
        seen += 1;
    }
    if seen != n {
        return Err(Error::parse(0, format!("expected {n} rows, found {seen}")));
    }
    Ok(Certificate {
        matrix,
        row_marginal,
        col_marginal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use crate::graph::rational;
    use crate::refine::{path_spectrum, DEFAULT_SPECTRUM_TOL};

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).amax() <= tol
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(uniform_overlay(1, 1).unwrap().matrix()[(0, 0)], 1.0);
        let u = uniform_overlay(2, 1).unwrap();
        assert_eq!(u.matrix(), &DMatrix::from_element(2, 1, 0.5));
        let u = uniform_overlay(2, 2).unwrap();
        assert_eq!(u.matrix(), &DMatrix::from_element(2, 2, 0.25));
        assert!(u.to_signed().is_ok());
        assert!(uniform_overlay(0, 2).is_err());
    }

    #[test]
    fn marginal_projection_examples() {
        let u = uniform_overlay(3, 4).unwrap();
        let r = uniform_marginal(3);
        let c = uniform_marginal(4);
        assert!(close(&project_marginals(u.matrix(), &r, &c).unwrap(), u.matrix(), 1e-16));
        let z = project_marginals(&DMatrix::zeros(3, 4), &r, &c).unwrap();
        assert!(close(&z, u.matrix(), 1e-16));
        let bump = DVector::from_vec(vec![0.3, -0.1, 0.2]) * DVector::from_vec(vec![1.0, 0.5, -2.0, 0.1]).transpose();
        let moved = project_marginals(&(u.matrix() + bump), &r, &c).unwrap();
        assert!(marginal_residual(&moved, &r, &c) < 1e-14);
        assert!(project_marginals(&DMatrix::zeros(2, 2), &[0.5, 0.5], &[0.5, 0.6]).is_err());
    }

    #[test]
    fn marginal_projection_is_orthogonal() {
        // the correction must be orthogonal to every zero-marginal direction
        let r = [0.2, 0.3, 0.5];
        let c = [0.6, 0.4];
        let mat = DMatrix::from_row_slice(3, 2, &[1.0, -2.0, 0.5, 0.25, 3.0, 0.0]);
        let x = project_marginals(&mat, &r, &c).unwrap();
        let diff = &mat - &x;
        let direction = DMatrix::from_row_slice(3, 2, &[1.0, -1.0, -1.0, 1.0, 0.0, 0.0]);
        assert!(diff.component_mul(&direction).sum().abs() < 1e-14);
    }

    #[test]
    fn dykstra_transportation_examples() {
        let r = uniform_marginal(3);
        let u = uniform_overlay(3, 3).unwrap();
        let same = dykstra_transportation(u.matrix(), &r, &r).unwrap();
        assert!(close(same.matrix(), u.matrix(), 1e-12));

        let mut m = u.matrix().clone();
        m[(1, 2)] = -5.0;
        let x = dykstra_transportation(&m, &r, &r).unwrap();
        assert!(x.residuals().unwrap().marginal <= MARGINAL_TOL);
        assert!(x.matrix().iter().all(|&v| v >= -NEGATIVITY_TOL));
        assert!(x.matrix()[(1, 2)].abs() < 1e-12);

        let col = dykstra_transportation(&DMatrix::from_row_slice(2, 1, &[7.0, -3.0]), &[0.5, 0.5], &[1.0]).unwrap();
        assert!(close(col.matrix(), &DMatrix::from_element(2, 1, 0.5), 1e-12));
    }

    #[test]
    fn dykstra_transportation_is_the_nearest_point() {
        // compare against every vertex and a fine grid of the 2x2 polytope
        let m = DMatrix::from_row_slice(2, 2, &[0.9, -0.4, 0.1, 0.3]);
        let x = dykstra_transportation(&m, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let d = (x.matrix() - &m).norm();
        for k in 0..=1000 {
            let t = 0.5 * k as f64 / 1000.0;
            let y = DMatrix::from_row_slice(2, 2, &[t, 0.5 - t, 0.5 - t, t]);
            assert!(d <= (&y - &m).norm() + 1e-12);
        }
    }

    #[test]
    fn spectral_ball_examples() {
        let half = DMatrix::<f64>::identity(2, 2) * 0.5;
        let p = project_spectral_ball(&half, 0.25).unwrap();
        assert!(close(&p, &(DMatrix::identity(2, 2) * 0.25), 1e-14));
        let small = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, -0.05]);
        assert!(close(&project_spectral_ball(&small, 0.25).unwrap(), &small, 1e-15));
        assert_eq!(project_spectral_ball(&DMatrix::zeros(2, 3), 1.0).unwrap(), DMatrix::zeros(2, 3));
        assert!(project_spectral_ball(&small, 0.0).is_err());
    }

    #[test]
    fn dykstra_signed_examples() {
        let u = uniform_overlay(3, 5).unwrap();
        let s = dykstra_signed(u.matrix()).unwrap();
        assert!(close(s.matrix(), u.matrix(), 1e-12));
        let forced = dykstra_signed(&DMatrix::from_row_slice(2, 1, &[4.0, -1.0])).unwrap();
        assert!(close(forced.matrix(), &DMatrix::from_element(2, 1, 0.5), 1e-12));
        let perm = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]) / 3.0;
        assert!(close(dykstra_signed(&perm).unwrap().matrix(), &perm, 1e-12));
    }

    #[test]
    fn dykstra_signed_clamps_large_inputs() {
        let m = DMatrix::from_fn(4, 6, |i, j| ((3 * i + 5 * j) as f64).sin());
        let s = dykstra_signed(&m).unwrap();
        let res = s.residuals().unwrap();
        assert!(res.marginal <= MARGINAL_TOL && res.spectral_excess <= SPECTRAL_TOL);
        // idempotent on its own output
        assert!(close(dykstra_signed(s.matrix()).unwrap().matrix(), s.matrix(), 1e-11));
    }

    #[test]
    fn compose_examples() {
        let a = uniform_overlay(2, 3).unwrap();
        let b = uniform_overlay(3, 4).unwrap();
        assert!(close(a.compose(&b).unwrap().matrix(), uniform_overlay(2, 4).unwrap().matrix(), 1e-15));

        let x = FractionalOverlay::for_graphs(DMatrix::from_row_slice(2, 2, &[0.4, 0.1, 0.1, 0.4])).unwrap();
        let id = FractionalOverlay::for_graphs(DMatrix::identity(2, 2) / 2.0).unwrap();
        assert!(close(x.compose(&id).unwrap().matrix(), x.matrix(), 1e-15));

        let p = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let q = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let po = FractionalOverlay::for_graphs(&p / 3.0).unwrap();
        let qo = FractionalOverlay::for_graphs(&q / 3.0).unwrap();
        assert!(close(po.compose(&qo).unwrap().matrix(), &(&p * &q / 3.0), 1e-15));

        let ps = po.to_signed().unwrap();
        assert!(close(ps.compose(&qo.to_signed().unwrap()).unwrap().matrix(), &(&p * &q / 3.0), 1e-15));
        assert!(a.compose(&a).is_err());
    }

    #[test]
    fn tree_certificate_commutes_exactly() {
        let check = |g: &Graph, h: &Graph| {
            let x = tree_certificate_exact(g, h).unwrap().expect("quotients match");
            let (n, m) = (g.vertex_count(), h.vertex_count());
            let nn = rational(n as i64, 1);
            let mm = rational(m as i64, 1);
            for i in 0..n {
                for j in 0..m {
                    let ax: Rational = g.neighbors(i).map(|k| x[k][j].clone()).sum();
                    let xb: Rational = h.neighbors(j).map(|k| x[i][k].clone()).sum();
                    assert_eq!(&mm * ax, &nn * xb);
                }
            }
        };
        check(&Graph::complete(2), &Graph::cycle(4));
        check(&Graph::cycle(6), &Graph::cycle(3).disjoint_union(&Graph::cycle(3)));
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)]).unwrap();
        check(&g, &g);
        check(&g, &g.blow_up(2).unwrap());

        let k2c4 = tree_certificate(&Graph::complete(2), &Graph::cycle(4)).unwrap().unwrap();
        assert!(close(k2c4.matrix(), &DMatrix::from_element(2, 4, 0.125), 1e-15));
        assert!(tree_certificate(&Graph::path(2), &Graph::complete(3)).unwrap().is_none());
    }

    #[test]
    fn path_certificate_examples() {
        let spec = |g: &Graph| path_spectrum(g, DEFAULT_SPECTRUM_TOL).unwrap();
        let (k2, c4) = (Graph::complete(2), Graph::cycle(4));
        let x = path_certificate(&spec(&k2), &spec(&c4), DEFAULT_SPECTRUM_TOL).unwrap().unwrap();
        assert!(close(x.matrix(), &DMatrix::from_element(2, 4, 0.125), 1e-12));

        let k1 = Graph::empty(1);
        let x = path_certificate(&spec(&k1), &spec(&k1), DEFAULT_SPECTRUM_TOL).unwrap().unwrap();
        assert!((x.matrix()[(0, 0)] - 1.0).abs() < 1e-12);

        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)]).unwrap();
        let x = path_certificate(&spec(&g), &spec(&g), DEFAULT_SPECTRUM_TOL).unwrap().unwrap();
        let a = g.adjacency();
        let obj = &a * x.matrix() * 5.0 - x.matrix() * &a * 5.0;
        assert!(obj.amax() < 1e-9);
        assert!(path_certificate(&spec(&k2), &spec(&Graph::complete(3)), DEFAULT_SPECTRUM_TOL)
            .unwrap()
            .is_none());
    }

    #[test]
    fn csv_round_trip() {
        let x = FractionalOverlay::new(
            DMatrix::from_row_slice(2, 3, &[0.1, 0.2, 0.3, 0.2, 0.1, 0.1]),
            vec![0.6, 0.4],
            vec![0.3, 0.3, 0.4],
        )
        .unwrap();
        let text = certificate_to_csv(x.matrix(), x.row_marginal(), x.col_marginal(), &x.residuals().unwrap());
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("# rows=2 cols=3 "));
        let back = certificate_from_csv(&text).unwrap();
        assert_eq!(&back.matrix, x.matrix());
        assert_eq!(back.row_marginal, x.row_marginal());
        assert_eq!(back.col_marginal, x.col_marginal());

        let bad = "# rows=2 cols=2\n0.5,0\n0,x\n";
        match certificate_from_csv(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
