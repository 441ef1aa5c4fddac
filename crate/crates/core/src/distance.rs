//! Tree, path, cut and color distances. Every solver returns a feasible
//! certificate together with the objective it attains there.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::cutnorm::{cut_norm, CutMode, CutNorm, EXACT_CUT_LIMIT};
use crate::error::{Error, Result};
use crate::graph::{to_f64, Graph, Rational, WeightedGraph};
use crate::hom::hom_path;
use crate::linalg::{spectral_norm, top_singular_fast};
use crate::overlay::{
    certificate_to_csv, dykstra_signed, dykstra_transportation, path_certificate, residuals, tree_certificate,
    uniform_marginal, uniform_overlay, FractionalOverlay, Residuals, SignedOverlay, MARGINAL_TOL,
};
use crate::refine::{path_spectrum, quotient, weighted_match, DEFAULT_SPECTRUM_TOL};
use crate::transport::transportation_lmo;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// The value is the distance itself.
    Exact,
    /// The value is attained by the certificate, so the distance is at most this.
    Upper,
    /// The inner cut norm was only estimated from below, so the value bounds nothing.
    Estimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    TreeCut,
    TreeSpectral,
    PathSpectral,
    CutDistance,
    ColorDistance,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub value: f64,
    pub bound: Bound,
    pub objective_kind: ObjectiveKind,
    /// A proven lower bound on the distance (0 when nothing better is known).
    pub lower_bound: f64,
    #[serde(serialize_with = "matrix_rows")]
    pub certificate: DMatrix<f64>,
    pub row_marginal: Vec<f64>,
    pub col_marginal: Vec<f64>,
    pub iterations: usize,
    pub residuals: Residuals,
    /// False when some phase stopped at the iteration cap.
    pub converged: bool,
    /// Last Frank-Wolfe duality gap, when Frank-Wolfe ran.
    pub gap: Option<f64>,
    pub seed: u64,
    /// Whether every cut norm behind the value was computed exactly.
    pub inner_exact: bool,
    pub notes: Vec<String>,
}

fn matrix_rows<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

impl DistanceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn certificate_csv(&self) -> String {
        certificate_to_csv(&self.certificate, &self.row_marginal, &self.col_marginal, &self.residuals)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-6,
            max_iters: 5000,
            restarts: 3,
            seed: 0,
        }
    }
}

/// Default number of starts for [`cut_distance_upper`].
pub const CUT_DISTANCE_RESTARTS: usize = 10;

impl SolverOptions {
    pub fn for_cut_distance() -> Self {
        SolverOptions {
            restarts: CUT_DISTANCE_RESTARTS,
            ..Self::default()
        }
    }
}

/// Stop a phase after this many iterations without improving the best value.
const STALL_WINDOW: usize = 200;
const GOLDEN_STEPS: usize = 40;
/// Local projected-gradient steps per start in [`cut_distance_upper`].
const CUT_LOCAL_STEPS: usize = 60;
const PERMUTATION_SEARCH_LIMIT: usize = 8;

/// `M = m·A·X − n·X·B` for `n = v(G)`, `m = v(H)`.
pub fn objective_matrix(g: &Graph, h: &Graph, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Problem::new(g, h)?.objective_checked(x)
}

/// `‖M‖_□ / (nm)`.
pub fn cut_objective(g: &Graph, h: &Graph, x: &DMatrix<f64>, mode: CutMode) -> Result<CutNorm> {
    let p = Problem::new(g, h)?;
    let mut c = cut_norm(&p.objective_checked(x)?, mode)?;
    c.value /= p.nf * p.mf;
    c.sum /= p.nf * p.mf;
    Ok(c)
}

/// `‖M‖₂ / sqrt(nm)`.
pub fn spectral_objective(g: &Graph, h: &Graph, x: &DMatrix<f64>) -> Result<f64> {
    let p = Problem::new(g, h)?;
    Ok(spectral_norm(&p.objective_checked(x)?)? / (p.nf * p.mf).sqrt())
}

struct Problem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    nf: f64,
    mf: f64,
}

impl Problem {
    fn new(g: &Graph, h: &Graph) -> Result<Self> {
        if g.vertex_count() == 0 || h.vertex_count() == 0 {
            return Err(Error::precondition("graphs must be nonempty"));
        }
        Ok(Problem {
            a: g.adjacency(),
            b: h.adjacency(),
            nf: g.vertex_count() as f64,
            mf: h.vertex_count() as f64,
        })
    }

    fn shape(&self) -> (usize, usize) {
        (self.a.nrows(), self.b.nrows())
    }

    fn objective_checked(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.shape() != self.shape() {
            return Err(Error::precondition(format!(
                "overlay is {}x{}, expected {}x{}",
                x.nrows(),
                x.ncols(),
                self.a.nrows(),
                self.b.nrows()
            )));
        }
        Ok(self.objective(x))
    }

    fn objective(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.a * x * self.mf - x * &self.b * self.nf
    }

    fn spectral(&self, m: &DMatrix<f64>) -> Result<f64> {
        Ok(top_singular_fast(m)?.sigma / (self.nf * self.mf).sqrt())
    }

    /// Value and subgradient of `X ↦ ‖M(X)‖₂ / sqrt(nm)`.
    fn spectral_step(&self, x: &DMatrix<f64>) -> Result<(f64, DMatrix<f64>)> {
        let t = top_singular_fast(&self.objective(x))?;
        let uv = &t.left * t.right.transpose();
        let g = (&self.a * &uv * self.mf - &uv * &self.b * self.nf) / (self.nf * self.mf).sqrt();
        Ok((t.sigma / (self.nf * self.mf).sqrt(), g))
    }

    /// Value and subgradient of `X ↦ ‖M(X)‖_□ / (nm)` from the maximizing rectangle.
    fn cut_step(&self, x: &DMatrix<f64>, seed: u64) -> Result<(f64, DMatrix<f64>, bool)> {
        let c = cut_norm(&self.objective(x), CutMode::Auto { seed })?;
        let (n, m) = self.shape();
        let mut s = DMatrix::<f64>::zeros(n, m);
        for &i in &c.rows {
            for &j in &c.cols {
                s[(i, j)] = 1.0;
            }
        }
        let sign = if c.sum < 0.0 { -1.0 } else { 1.0 };
        let g = (&self.a * &s * self.mf - &s * &self.b * self.nf) * (sign / (self.nf * self.mf));
        Ok((c.value / (self.nf * self.mf), g, c.exact))
    }
}

fn edge_density(g: &Graph) -> Rational {
    let n = g.vertex_count();
    Rational::new(BigInt::from(2 * g.edge_count()), BigInt::from(n * n))
}

/// `|t(K_2, G) − t(K_2, H)|`, a lower bound on every tree and path objective:
/// summing all entries of `M` gives `nm (t(K_2,G) − t(K_2,H))` for any overlay.
pub fn edge_density_gap(g: &Graph, h: &Graph) -> f64 {
    to_f64(&(edge_density(g) - edge_density(h))).abs()
}

/// `max_{ℓ ≤ 6} |t(P_ℓ,G) − t(P_ℓ,H)| / ℓ`, a lower bound on the spectral path
/// distance by the path counting inequality, hence also on the spectral tree distance.
pub fn path_density_gap(g: &Graph, h: &Graph) -> f64 {
    let (n, m) = (g.vertex_count(), h.vertex_count());
    (1..=6usize)
        .map(|ell| {
            let tg = Rational::new(hom_path(ell, g), BigInt::from(n).pow(ell as u32 + 1));
            let th = Rational::new(hom_path(ell, h), BigInt::from(m).pow(ell as u32 + 1));
            to_f64(&(tg - th)).abs() / ell as f64
        })
        .fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn report(
    kind: ObjectiveKind,
    x: DMatrix<f64>,
    r: Vec<f64>,
    c: Vec<f64>,
    value: f64,
    bound: Bound,
    lower_bound: f64,
    iterations: usize,
    converged: bool,
    gap: Option<f64>,
    seed: u64,
    inner_exact: bool,
    notes: Vec<String>,
) -> Result<DistanceReport> {
    let residuals = residuals(&x, &r, &c)?;
    Ok(DistanceReport {
        value,
        bound,
        objective_kind: kind,
        lower_bound: if bound == Bound::Estimate { lower_bound } else { lower_bound.min(value) },
        certificate: x,
        row_marginal: r,
        col_marginal: c,
        iterations,
        residuals,
        converged,
        gap,
        seed,
        inner_exact,
        notes,
    })
}

fn graph_marginals(g: &Graph, h: &Graph) -> (Vec<f64>, Vec<f64>) {
    (uniform_marginal(g.vertex_count()), uniform_marginal(h.vertex_count()))
}

/// A vertex of the transportation polytope for a random cost, mixed with the product overlay.
fn random_start(rng: &mut ChaCha8Rng, r: &[f64], c: &[f64]) -> Result<DMatrix<f64>> {
    let (n, m) = (r.len(), c.len());
    let cost = DMatrix::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
    let vertex = transportation_lmo(&cost, r, c)?.plan;
    let theta: f64 = rng.gen_range(0.5..1.0);
    let product = DMatrix::from_fn(n, m, |i, j| r[i] * c[j]);
    Ok(vertex * theta + product * (1.0 - theta))
}

struct Descent {
    x: DMatrix<f64>,
    value: f64,
    iterations: usize,
    capped: bool,
    inner_exact: bool,
}

/// Projected subgradient with normalized steps `η_t = ‖X0‖_F / sqrt(t)` and
/// best-iterate tracking. Stops at `target`, after [`STALL_WINDOW`] iterations
/// without improvement, or at `max_iters` (then `capped`).
fn projected_subgradient<E, P>(
    x0: DMatrix<f64>,
    max_iters: usize,
    target: f64,
    mut eval: E,
    mut project: P,
) -> Result<Descent>
where
    E: FnMut(&DMatrix<f64>, usize) -> Result<(f64, DMatrix<f64>, bool)>,
    P: FnMut(&DMatrix<f64>) -> Result<DMatrix<f64>>,
{
    let scale = x0.norm();
    let mut x = x0.clone();
    let mut best = Descent {
        x: x0,
        value: f64::INFINITY,
        iterations: 0,
        capped: false,
        inner_exact: true,
    };
    let mut since_best = 0;
    for t in 1..=max_iters.max(1) {
        let (value, g, exact) = eval(&x, t)?;
        best.iterations = t;
        if value < best.value {
            let improved = value < best.value - 1e-12;
            best.value = value;
            best.x = x.clone();
            best.inner_exact = exact;
            if improved {
                since_best = 0;
            }
        } else {
            since_best += 1;
        }
        let gn = g.norm();
        if best.value <= target || gn == 0.0 || since_best >= STALL_WINDOW {
            return Ok(best);
        }
        if t == max_iters {
            break;
        }
        let step = scale / (t as f64).sqrt() / gn;
        x = project(&(&x - g * step))?;
    }
    best.capped = true;
    Ok(best)
}

struct FrankWolfe {
    x: DMatrix<f64>,
    value: f64,
    lower: f64,
    gap: f64,
    iterations: usize,
    capped: bool,
}

fn frank_wolfe(p: &Problem, x0: DMatrix<f64>, opts: &SolverOptions, lower: f64) -> Result<FrankWolfe> {
    let (n, m) = p.shape();
    let (r, c) = (uniform_marginal(n), uniform_marginal(m));
    let mut x = x0;
    let mut mx = p.objective(&x);
    let mut lower = lower;
    let mut gap = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    for it in 1..=opts.max_iters.max(1) {
        let (value, g) = p.spectral_step(&x)?;
        if value < best - 1e-12 {
            best = value;
            since_best = 0;
        } else {
            since_best += 1;
        }
        let s = transportation_lmo(&g, &r, &c)?.plan;
        gap = g.component_mul(&(&x - &s)).sum();
        lower = lower.max(value - gap);
        if gap <= opts.tol || value - lower <= opts.tol || since_best >= STALL_WINDOW {
            return Ok(FrankWolfe { x, value, lower, gap, iterations: it, capped: false });
        }
        let ms = p.objective(&s);
        let phi = |gamma: f64| p.spectral(&(&mx * (1.0 - gamma) + &ms * gamma));
        let (gamma, v) = golden_section(phi)?;
        if v < value {
            x = &x * (1.0 - gamma) + s * gamma;
            mx = &mx * (1.0 - gamma) + ms * gamma;
        } else {
            // the line search found nothing; a nonsmooth kink, handled by the polish phase
            return Ok(FrankWolfe { x, value, lower, gap, iterations: it, capped: false });
        }
    }
    let value = p.spectral(&mx)?;
    Ok(FrankWolfe { x, value, lower, gap, iterations: opts.max_iters, capped: true })
}

/// Minimizes a convex function on [0, 1]; returns the best evaluated point.
fn golden_section<F: Fn(f64) -> Result<f64>>(f: F) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_STEPS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let f1 = f(1.0)?;
    let mut best = if fc < fd { (c, fc) } else { (d, fd) };
    if f1 < best.1 {
        best = (1.0, f1);
    }
    Ok(best)
}

fn zero_certificate_report(
    kind: ObjectiveKind,
    g: &Graph,
    h: &Graph,
    x: DMatrix<f64>,
    value: f64,
    seed: u64,
    note: &str,
) -> Result<DistanceReport> {
    let (r, c) = graph_marginals(g, h);
    report(kind, x, r, c, value, Bound::Exact, 0.0, 0, true, None, seed, true, vec![note.into()])
}

/// Spectral tree distance `inf_X ‖M(X)‖₂ / sqrt(nm)` over fractional overlays.
pub fn tree_dist_spectral(g: &Graph, h: &Graph, opts: &SolverOptions) -> Result<DistanceReport> {
    let p = Problem::new(g, h)?;
    if let Some(x) = tree_certificate(g, h)? {
        let value = spectral_objective(g, h, x.matrix())?;
        return zero_certificate_report(
            ObjectiveKind::TreeSpectral,
            g,
            h,
            x.into_matrix(),
            value,
            opts.seed,
            "zero certificate from matched quotients",
        );
    }
    let (r, c) = graph_marginals(g, h);
    let mut lower = path_density_gap(g, h).max(edge_density_gap(g, h));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<FrankWolfe> = None;
    let mut iterations = 0;
    let mut capped = false;
    for restart in 0..opts.restarts.max(1) {
        let start = if restart == 0 {
            uniform_overlay(r.len(), c.len())?.into_matrix()
        } else {
            random_start(&mut rng, &r, &c)?
        };
        let run = frank_wolfe(&p, start, opts, lower)?;
        iterations += run.iterations;
        capped |= run.capped;
        lower = lower.max(run.lower);
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
        if best.as_ref().unwrap().value - lower <= opts.tol {
            break;
        }
    }
    let fw = best.expect("at least one restart");
    let mut x = fw.x;
    if fw.value - lower > opts.tol {
        let polish = projected_subgradient(
            x.clone(),
            opts.max_iters,
            lower + opts.tol,
            |x, _| p.spectral_step(x).map(|(v, g)| (v, g, true)),
            |y| Ok(dykstra_transportation(y, &r, &c)?.into_matrix()),
        )?;
        iterations += polish.iterations;
        capped |= polish.capped;
        if polish.value < fw.value {
            x = polish.x;
        }
    }
    let value = spectral_objective(g, h, &x)?;
    let notes = vec!["frank-wolfe from the uniform overlay, then random starts".into()];
    report(
        ObjectiveKind::TreeSpectral,
        x,
        r,
        c,
        value,
        Bound::Upper,
        lower,
        iterations,
        !capped,
        Some(fw.gap),
        opts.seed,
        true,
        notes,
    )
}

/// Cut-norm tree distance `inf_X ‖M(X)‖_□ / (nm)` over fractional overlays.
pub fn tree_dist_cutnorm(g: &Graph, h: &Graph, opts: &SolverOptions) -> Result<DistanceReport> {
    let p = Problem::new(g, h)?;
    if let Some(x) = tree_certificate(g, h)? {
        let value = cut_objective(g, h, x.matrix(), CutMode::Auto { seed: opts.seed })?.value;
        return zero_certificate_report(
            ObjectiveKind::TreeCut,
            g,
            h,
            x.into_matrix(),
            value,
            opts.seed,
            "zero certificate from matched quotients",
        );
    }
    let (r, c) = graph_marginals(g, h);
    let lower = edge_density_gap(g, h);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<Descent> = None;
    let mut iterations = 0;
    let mut capped = false;
    for restart in 0..opts.restarts.max(1) {
        let start = if restart == 0 {
            uniform_overlay(r.len(), c.len())?.into_matrix()
        } else {
            random_start(&mut rng, &r, &c)?
        };
        let seed = opts.seed;
        let run = projected_subgradient(
            start,
            opts.max_iters,
            lower + opts.tol,
            |x, t| p.cut_step(x, seed.wrapping_add(t as u64)),
            |y| Ok(dykstra_transportation(y, &r, &c)?.into_matrix()),
        )?;
        iterations += run.iterations;
        capped |= run.capped;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
        if best.as_ref().unwrap().value - lower <= opts.tol {
            break;
        }
    }
    let best = best.expect("at least one restart");
    let evaluated = cut_objective(g, h, &best.x, CutMode::Auto { seed: opts.seed })?;
    let bound = if evaluated.exact { Bound::Upper } else { Bound::Estimate };
    let mut notes = vec!["projected subgradient from the uniform overlay, then random starts".to_string()];
    if !evaluated.exact {
        notes.push(format!(
            "objective exceeds the exact cut-norm size {EXACT_CUT_LIMIT}; heuristic inner maximization"
        ));
    }
    report(
        ObjectiveKind::TreeCut,
        best.x,
        r,
        c,
        evaluated.value,
        bound,
        lower,
        iterations,
        !capped,
        None,
        opts.seed,
        evaluated.exact,
        notes,
    )
}

/// Spectral path distance: like the spectral tree distance but over signed overlays.
pub fn path_dist_spectral(g: &Graph, h: &Graph, opts: &SolverOptions) -> Result<DistanceReport> {
    let p = Problem::new(g, h)?;
    let (sg, sh) = (path_spectrum(g, DEFAULT_SPECTRUM_TOL)?, path_spectrum(h, DEFAULT_SPECTRUM_TOL)?);
    if let Some(x) = path_certificate(&sg, &sh, DEFAULT_SPECTRUM_TOL)? {
        let value = spectral_objective(g, h, x.matrix())?;
        return zero_certificate_report(
            ObjectiveKind::PathSpectral,
            g,
            h,
            x.into_matrix(),
            value,
            opts.seed,
            "zero certificate from matched main spectra",
        );
    }
    let (r, c) = graph_marginals(g, h);
    let lower = path_density_gap(g, h).max(edge_density_gap(g, h));

    // fractional overlays are signed overlays, so the tree solution is a valid start
    let tree = tree_dist_spectral(g, h, opts)?;
    let tree_start = FractionalOverlay::for_graphs(tree.certificate.clone())?.to_signed()?;
    let uniform = uniform_overlay(r.len(), c.len())?.to_signed()?;
    let mut starts: Vec<SignedOverlay> = vec![tree_start, uniform];
    starts.sort_by(|a, b| {
        let fa = p.spectral(&p.objective(a.matrix())).unwrap_or(f64::INFINITY);
        let fb = p.spectral(&p.objective(b.matrix())).unwrap_or(f64::INFINITY);
        fa.total_cmp(&fb)
    });
    let start = starts.swap_remove(0).into_matrix();
    let run = projected_subgradient(
        start,
        opts.max_iters,
        lower + opts.tol,
        |x, _| p.spectral_step(x).map(|(v, g)| (v, g, true)),
        |y| Ok(dykstra_signed(y)?.into_matrix()),
    )?;
    let value = spectral_objective(g, h, &run.x)?;
    let notes = vec!["projected subgradient over signed overlays, started from the tree certificate".into()];
    report(
        ObjectiveKind::PathSpectral,
        run.x,
        r,
        c,
        value,
        Bound::Upper,
        lower,
        run.iterations + tree.iterations,
        !run.capped && tree.converged,
        None,
        opts.seed,
        true,
        notes,
    )
}

/// `d_□(G, H, X)` with its witness rectangle; rows and columns are index pairs `(i, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutAt {
    pub value: f64,
    pub sum: f64,
    pub rows: Vec<(usize, usize)>,
    pub cols: Vec<(usize, usize)>,
    pub exact: bool,
}

/// `max_{Q,R} |Σ_{iu∈Q, jv∈R} X_iu X_jv (β_ij(G) − β_uv(H))|`, restricted to
/// the support of `X` (other index pairs contribute nothing).
pub fn d_cut_at(g: &WeightedGraph, h: &WeightedGraph, x: &FractionalOverlay, mode: CutMode) -> Result<CutAt> {
    let (n, m) = (g.vertex_count(), h.vertex_count());
    if x.matrix().shape() != (n, m) {
        return Err(Error::precondition("overlay shape does not match the weighted graphs"));
    }
    let (r, c) = (g.weight_fractions(), h.weight_fractions());
    let drift = x
        .row_marginal()
        .iter()
        .zip(&r)
        .chain(x.col_marginal().iter().zip(&c))
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    if drift > MARGINAL_TOL {
        return Err(Error::precondition("overlay marginals are not the vertex-weight fractions"));
    }
    d_cut_raw(&g.beta_f64(), &h.beta_f64(), x.matrix(), mode)
}

fn d_cut_raw(bg: &DMatrix<f64>, bh: &DMatrix<f64>, x: &DMatrix<f64>, mode: CutMode) -> Result<CutAt> {
    let (n, m) = x.shape();
    let support: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..m).map(move |u| (i, u)))
        .filter(|&(i, u)| x[(i, u)] > 0.0)
        .collect();
    let d = DMatrix::from_fn(support.len(), support.len(), |p, q| {
        let (i, u) = support[p];
        let (j, v) = support[q];
        x[(i, u)] * x[(j, v)] * (bg[(i, j)] - bh[(u, v)])
    });
    if matches!(mode, CutMode::Exact) && support.len() > EXACT_CUT_LIMIT {
        return Err(Error::precondition(format!(
            "overlay support {} exceeds the exact cut-norm size {EXACT_CUT_LIMIT}",
            support.len()
        )));
    }
    let cn = cut_norm(&d, mode)?;
    Ok(CutAt {
        value: cn.value,
        sum: cn.sum,
        rows: cn.rows.iter().map(|&p| support[p]).collect(),
        cols: cn.cols.iter().map(|&q| support[q]).collect(),
        exact: cn.exact,
    })
}

/// Gradient in `X` of the signed rectangle sum that `cut` witnesses.
fn rectangle_gradient(bg: &DMatrix<f64>, bh: &DMatrix<f64>, x: &DMatrix<f64>, cut: &CutAt) -> DMatrix<f64> {
    let sign = if cut.sum < 0.0 { -1.0 } else { 1.0 };
    let mut g = DMatrix::<f64>::zeros(x.nrows(), x.ncols());
    for &(k, w) in &cut.rows {
        g[(k, w)] += cut.cols.iter().map(|&(j, v)| x[(j, v)] * (bg[(k, j)] - bh[(w, v)])).sum::<f64>();
    }
    for &(k, w) in &cut.cols {
        g[(k, w)] += cut.rows.iter().map(|&(i, u)| x[(i, u)] * (bg[(i, k)] - bh[(u, w)])).sum::<f64>();
    }
    g * sign
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    out.push(perm.clone());
    // Heap's algorithm
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            out.push(perm.clone());
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    out
}

fn uniform_alpha(w: &WeightedGraph) -> bool {
    w.alpha().iter().all(|a| a == w.alpha_at(0))
}

/// Upper bound on the cut distance of weighted graphs by multistart local search
/// over fractional overlays, plus an exhaustive permutation search for small
/// equal-order graphs with uniform vertex weights.
pub fn cut_distance_upper(g: &WeightedGraph, h: &WeightedGraph, opts: &SolverOptions) -> Result<DistanceReport> {
    let (n, m) = (g.vertex_count(), h.vertex_count());
    let (r, c) = (g.weight_fractions(), h.weight_fractions());
    let (bg, bh) = (g.beta_f64(), h.beta_f64());
    let mode = |seed: u64| CutMode::Auto { seed };

    // |t(K_2,G) − t(K_2,H)|: the full rectangle of any overlay
    let lower = {
        let t = |w: &WeightedGraph| {
            let f = w.normalized();
            let mut s = Rational::from_integer(BigInt::from(0));
            for i in 0..f.vertex_count() {
                for j in 0..f.vertex_count() {
                    s += f.alpha_at(i) * f.alpha_at(j) * f.beta(i, j);
                }
            }
            s
        };
        to_f64(&(t(g) - t(h))).abs()
    };

    struct Best {
        x: DMatrix<f64>,
        cut: CutAt,
    }
    let mut best: Option<Best> = None;
    let consider = |best: &mut Option<Best>, x: DMatrix<f64>, seed: u64| -> Result<()> {
        let cut = d_cut_raw(&bg, &bh, &x, mode(seed))?;
        if best.as_ref().is_none_or(|b| cut.value < b.cut.value) {
            *best = Some(Best { x, cut });
        }
        Ok(())
    };
    let mut notes = Vec::new();
    let mut iterations = 0;

    let product = DMatrix::from_fn(n, m, |i, j| r[i] * c[j]);
    consider(&mut best, product, opts.seed)?;
    let singleton = n == 1 || m == 1;

    if !singleton {
        if let Some(pi) = weighted_match(g, h) {
            let x = DMatrix::from_fn(n, m, |i, j| if pi[i] == j { r[i] } else { 0.0 });
            consider(&mut best, x, opts.seed)?;
            notes.push("weighted isomorphism overlay".into());
        }
        if n == m && n <= PERMUTATION_SEARCH_LIMIT && uniform_alpha(g) && uniform_alpha(h) {
            for perm in permutations(n) {
                let x = DMatrix::from_fn(n, n, |i, j| if perm[i] == j { 1.0 / n as f64 } else { 0.0 });
                consider(&mut best, x, opts.seed)?;
                iterations += 1;
            }
            notes.push("exhaustive permutation search".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let local_steps = CUT_LOCAL_STEPS.min(opts.max_iters.max(1));
        for restart in 0..opts.restarts {
            if best.as_ref().is_some_and(|b| b.cut.value <= lower + 1e-15) {
                break;
            }
            let seed = opts.seed.wrapping_add(restart as u64);
            let start = random_start(&mut rng, &r, &c)?;
            let scale = start.norm();
            let mut x = start;
            for t in 1..=local_steps {
                let cut = d_cut_raw(&bg, &bh, &x, mode(seed))?;
                iterations += 1;
                let grad = rectangle_gradient(&bg, &bh, &x, &cut);
                consider(&mut best, x.clone(), seed)?;
                let gn = grad.norm();
                if gn == 0.0 {
                    break;
                }
                let step = scale / (t as f64).sqrt() / gn;
                x = dykstra_transportation(&(&x - grad * step), &r, &c)?.into_matrix();
            }
        }
    }

    let best = best.expect("the product overlay is always considered");
    let exact = best.cut.exact;
    let bound = if !exact {
        Bound::Estimate
    } else if singleton || best.cut.value == 0.0 {
        Bound::Exact
    } else {
        Bound::Upper
    };
    if singleton {
        notes.push("singleton overlay polytope".into());
    }
    report(
        ObjectiveKind::CutDistance,
        best.x,
        r,
        c,
        best.cut.value,
        bound,
        lower,
        iterations,
        true,
        None,
        opts.seed,
        exact,
        notes,
    )
}

/// Cut distance of the color-refinement quotients.
pub fn color_distance(g: &Graph, h: &Graph, opts: &SolverOptions) -> Result<DistanceReport> {
    let mut rep = cut_distance_upper(&quotient(g)?, &quotient(h)?, opts)?;
    rep.objective_kind = ObjectiveKind::ColorDistance;
    Ok(rep)
}
