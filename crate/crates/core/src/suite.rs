//! Experiment suites. Each one draws its instances from per-instance PRNG
//! streams split off the root seed, checks an inequality or identity on every
//! instance, and emits one CSV row per check.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cutnorm::{cut_norm, CutMode};
use crate::distance::{
    color_distance, cut_objective, path_dist_spectral, spectral_objective, tree_dist_cutnorm, tree_dist_spectral,
    Bound, SolverOptions,
};
use crate::error::{Error, Result};
use crate::generate::{figure1_graph, gnp_with, random_tree};
use crate::graph::{rational, to_f64, Graph, Rational, WeightedGraph};
use crate::hom::{brute_force_hom, enumerate_trees, hom_path, hom_tree};
use crate::inversion::verify_inversion;
use crate::overlay::{uniform_marginal, FractionalOverlay};
use crate::refine::{cr_equivalent, path_equivalent, path_spectrum, quotient, DEFAULT_SPECTRUM_TOL};
use crate::transport::transportation_lmo;

pub const SUITES: [&str; 9] = [
    "oracle-hom",
    "quotient-hom",
    "blowup-zero",
    "path-counting",
    "norm-sandwich",
    "hierarchy",
    "fig1-separation",
    "inversion",
    "composition",
];

/// Rows and failures of one suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub name: String,
    pub seed: u64,
    pub header: String,
    pub rows: Vec<String>,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str, seed: u64, header: &str) -> Self {
        SuiteOutcome {
            name: name.into(),
            seed,
            header: header.into(),
            rows: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn file_name(&self) -> String {
        format!("{}-{}.csv", self.name, self.seed)
    }

    pub fn csv(&self) -> String {
        let mut out = self.header.clone();
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    /// Appends a row; a failing check is also recorded with a reproduction hint.
    fn record(&mut self, pass: bool, what: impl Display, fields: &[String]) {
        let mut row = vec![self.seed.to_string()];
        row.extend_from_slice(fields);
        row.push(pass.to_string());
        self.rows.push(row.join(","));
        if !pass {
            self.failures.push(format!(
                "{what} (reproduce: homdist verify --suite {} --seed {})",
                self.name, self.seed
            ));
        }
    }
}

/// Runs a suite in memory.
pub fn evaluate_suite(name: &str, seed: u64) -> Result<SuiteOutcome> {
    match name {
        "oracle-hom" => oracle_hom(seed),
        "quotient-hom" => quotient_hom(seed),
        "blowup-zero" => blowup_zero(seed),
        "path-counting" => path_counting(seed),
        "norm-sandwich" => norm_sandwich(seed),
        "hierarchy" => hierarchy(seed),
        "fig1-separation" => fig1_separation(seed),
        "inversion" => inversion(seed),
        "composition" => composition(seed),
        _ => Err(Error::precondition(format!(
            "unknown suite {name:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

/// Runs a suite and writes `<suite>-<seed>.csv` into `out`.
pub fn run_suite(name: &str, seed: u64, out: &Path) -> Result<(SuiteOutcome, PathBuf)> {
    let outcome = evaluate_suite(name, seed)?;
    std::fs::create_dir_all(out)?;
    let path = out.join(outcome.file_name());
    std::fs::write(&path, outcome.csv())?;
    Ok((outcome, path))
}

/// Independent stream for instance `index` of a suite.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Compact edge-list encoding without commas: `n:u-v u-v ...`.
pub fn encode(g: &Graph) -> String {
    let edges: Vec<String> = g.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
    format!("{}:{}", g.vertex_count(), edges.join(" "))
}

pub fn random_graph<R: Rng>(rng: &mut R, min: usize, max: usize) -> Graph {
    let n = rng.gen_range(min..=max);
    let p = rng.gen_range(0.15..0.85);
    gnp_with(n, p, rng).expect("probability is in range")
}

/// A random overlay for unweighted graphs: uniform, a polytope vertex, or a mixture.
pub fn random_overlay<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<FractionalOverlay> {
    let (r, c) = (uniform_marginal(n), uniform_marginal(m));
    let uniform = DMatrix::from_element(n, m, 1.0 / (n * m) as f64);
    let cost = DMatrix::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
    let vertex = transportation_lmo(&cost, &r, &c)?.plan;
    let x = match rng.gen_range(0..3) {
        0 => uniform,
        1 => vertex,
        _ => {
            let t = rng.gen::<f64>();
            vertex * t + uniform * (1.0 - t)
        }
    };
    FractionalOverlay::for_graphs(x)
}

/// Options used by the suites: fewer iterations than the interactive default,
/// since every check holds for any feasible certificate.
pub fn suite_options(seed: u64) -> SolverOptions {
    SolverOptions {
        max_iters: 400,
        restarts: 2,
        seed,
        ..SolverOptions::default()
    }
}

fn path_density(ell: usize, g: &Graph) -> Rational {
    Rational::new(hom_path(ell, g), BigInt::from(g.vertex_count()).pow(ell as u32 + 1))
}

fn oracle_hom(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("oracle-hom", seed, "seed,instance,tree,graph,hom_tree,brute_force,pass");
    let trees = enumerate_trees(5)?;
    for inst in 0..200u64 {
        let g = random_graph(&mut instance_rng(seed, inst), 1, 5).as_weighted();
        for t in &trees {
            let a = hom_tree(t, &g)?;
            let b = brute_force_hom(t, &g)?;
            out.record(
                a == b,
                format_args!("instance {inst}: hom mismatch for tree {}", encode(t)),
                &[inst.to_string(), encode(t), encode_weighted(&g), a.to_string(), b.to_string()],
            );
        }
    }
    Ok(out)
}

fn encode_weighted(g: &WeightedGraph) -> String {
    let n = g.vertex_count();
    let edges: Vec<String> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| *g.beta(u, v) == rational(1, 1))
        .map(|(u, v)| format!("{u}-{v}"))
        .collect();
    format!("{n}:{}", edges.join(" "))
}

fn quotient_hom(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new(
        "quotient-hom",
        seed,
        "seed,instance,tree,graph,hom_graph,hom_quotient,pass",
    );
    for inst in 0..100u64 {
        let mut rng = instance_rng(seed, inst);
        let t = random_tree(rng.gen_range(1..=6), &mut rng);
        let g = random_graph(&mut rng, 1, 10);
        let a = hom_tree(&t, &g.as_weighted())?;
        let b = hom_tree(&t, &quotient(&g)?)?;
        out.record(
            a == b,
            format_args!("instance {inst}: quotient changed hom"),
            &[inst.to_string(), encode(&t), encode(&g), a.to_string(), b.to_string()],
        );
    }
    Ok(out)
}

/// Smallest adjacency bitmask over all relabelings; equal iff isomorphic.
fn canonical_mask(slots: &[(usize, usize)], perms: &[Vec<usize>], adj: &[Vec<bool>]) -> u64 {
    perms
        .iter()
        .map(|p| {
            slots
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| adj[p[u]][p[v]])
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .min()
        .unwrap_or(0)
}

/// Non-isomorphic pairs on at most `max_order` vertices with equal main
/// spectra, found by enumerating every graph. Pairs are ranked: those color
/// refinement separates first, then equal orders, then graphs with edges.
///
/// Grouping uses the exact normalized walk counts `t(P_l)` for `l < 2·max_order`,
/// which pin down the main spectrum of both graphs; the float spectra are
/// compared afterwards as a cross-check.
pub fn cospectral_pairs(max_order: usize) -> Result<Vec<(Graph, Graph)>> {
    let mut groups: BTreeMap<Vec<Rational>, Vec<Graph>> = BTreeMap::new();
    for n in 1..=max_order {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let perms = permutations(n);
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u64..1 << slots.len() {
            let edges: Vec<(usize, usize)> =
                slots.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph::from_edges(n, &edges)?;
            let adj: Vec<Vec<bool>> = (0..n).map(|u| (0..n).map(|v| g.has_edge(u, v)).collect()).collect();
            if !seen.insert(canonical_mask(&slots, &perms, &adj)) {
                continue;
            }
            let key = (0..2 * max_order).map(|l| path_density(l, &g)).collect();
            groups.entry(key).or_default().push(g);
        }
    }
    let mut ranked = Vec::new();
    for group in groups.values() {
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                let (a, b) = (&group[i], &group[j]);
                let (sa, sb) = (path_spectrum(a, DEFAULT_SPECTRUM_TOL)?, path_spectrum(b, DEFAULT_SPECTRUM_TOL)?);
                if !path_equivalent(&sa, &sb, DEFAULT_SPECTRUM_TOL) {
                    return Err(Error::invariant("equal walk counts but different main spectra"));
                }
                let rank = pair_rank(a, b)?;
                ranked.push((rank, a.clone(), b.clone()));
            }
        }
    }
    ranked.sort_by_key(|r| r.0);
    Ok(ranked.into_iter().map(|(_, a, b)| (a, b)).collect())
}

fn blowup_zero(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("blowup-zero", seed, "seed,instance,kind,g,h,value,bound,pass");
    let opts = suite_options(seed);
    for inst in 0..20u64 {
        let g = random_graph(&mut instance_rng(seed, inst), 1, 8);
        for k in [2, 3] {
            let b = g.blow_up(k)?;
            for (kind, rep) in [
                ("tree-spec", tree_dist_spectral(&g, &b, &opts)?),
                ("tree-cut", tree_dist_cutnorm(&g, &b, &opts)?),
                ("color", color_distance(&g, &b, &opts)?),
            ] {
                out.record(
                    rep.value <= 1e-6,
                    format_args!("instance {inst}: {kind} distance to blow-up {k} is {}", rep.value),
                    &[inst.to_string(), kind.into(), encode(&g), format!("blowup{k}"), rep.value.to_string(), bound_name(rep.bound)],
                );
            }
        }
    }
    let mut pairs = vec![(Graph::complete(2), Graph::cycle(4))];
    let found = cospectral_pairs(6)?;
    let mut rng = instance_rng(seed, 1000);
    let best = found.iter().map(|(a, b)| pair_rank(a, b)).collect::<Result<Vec<_>>>()?;
    let cut = best.iter().filter(|&&r| Some(&r) <= best.get(4)).count();
    let pool = &found[..cut];
    for _ in 0..5.min(pool.len()) {
        pairs.push(pool[rng.gen_range(0..pool.len())].clone());
    }
    if found.len() < 5 {
        out.failures.push(format!("only {} co-spectral pairs found", found.len()));
    }
    for (i, (g, h)) in pairs.iter().enumerate() {
        let rep = path_dist_spectral(g, h, &opts)?;
        out.record(
            rep.value <= 1e-6,
            format_args!("pair {i}: path distance {}", rep.value),
            &[format!("p{i}"), "path-spec".into(), encode(g), encode(h), rep.value.to_string(), bound_name(rep.bound)],
        );
    }
    Ok(out)
}

fn pair_rank(a: &Graph, b: &Graph) -> Result<(bool, bool, bool)> {
    Ok((
        cr_equivalent(a, b)?,
        a.vertex_count() != b.vertex_count(),
        a.edge_count() == 0 || b.edge_count() == 0,
    ))
}

fn bound_name(b: Bound) -> String {
    match b {
        Bound::Exact => "exact",
        Bound::Upper => "upper",
        Bound::Estimate => "estimate",
    }
    .into()
}

fn path_counting(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new(
        "path-counting",
        seed,
        "seed,instance,g,h,ell,delta_t,path_value,rhs,pass",
    );
    let opts = suite_options(seed);
    for inst in 0..50u64 {
        let mut rng = instance_rng(seed, inst);
        let g = random_graph(&mut rng, 2, 12);
        let h = random_graph(&mut rng, 2, 12);
        let rep = path_dist_spectral(&g, &h, &opts)?;
        for ell in 1..=6 {
            let delta = to_f64(&(path_density(ell, &g) - path_density(ell, &h))).abs();
            let rhs = ell as f64 * rep.value + 1e-6;
            out.record(
                delta <= rhs,
                format_args!("instance {inst}, ell {ell}: {delta} > {rhs}"),
                &[inst.to_string(), encode(&g), encode(&h), ell.to_string(), delta.to_string(), rep.value.to_string(), rhs.to_string()],
            );
        }
    }
    Ok(out)
}

/// Roundoff allowance for `cut_obj ≤ spec_obj`, which holds with equality for constant objectives.
pub const SANDWICH_ROUNDOFF: f64 = 1e-12;

fn norm_sandwich(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new(
        "norm-sandwich",
        seed,
        "seed,instance,g,h,cut_obj,spec_obj,four_sqrt_cut,pass",
    );
    for inst in 0..100u64 {
        let mut rng = instance_rng(seed, inst);
        let g = random_graph(&mut rng, 1, 8);
        let h = random_graph(&mut rng, 1, 8);
        let x = random_overlay(&mut rng, g.vertex_count(), h.vertex_count())?;
        let cut = cut_objective(&g, &h, x.matrix(), CutMode::Exact)?.value;
        let spec = spectral_objective(&g, &h, x.matrix())?;
        let upper = 4.0 * cut.sqrt();
        let pass = cut <= spec + SANDWICH_ROUNDOFF && spec <= upper + 1e-9;
        out.record(
            pass,
            format_args!("instance {inst}: cut {cut}, spectral {spec}"),
            &[inst.to_string(), encode(&g), encode(&h), cut.to_string(), spec.to_string(), upper.to_string()],
        );
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn hierarchy(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("hierarchy", seed, "seed,instance,check,g,h,lhs,rhs,pass");
    let opts = suite_options(seed);
    for inst in 0..50u64 {
        let mut rng = instance_rng(seed, inst);
        let g = random_graph(&mut rng, 2, 8);
        let h = random_graph(&mut rng, 2, 8);
        let tree = tree_dist_spectral(&g, &h, &opts)?;
        let tree_obj = spectral_objective(&g, &h, &tree.certificate)?;
        let path = path_dist_spectral(&g, &h, &opts)?;
        out.record(
            path.value <= tree_obj + 1e-6,
            format_args!("instance {inst}: path {} above tree certificate {tree_obj}", path.value),
            &[inst.to_string(), "path<=tree".into(), encode(&g), encode(&h), path.value.to_string(), tree_obj.to_string()],
        );
    }
    for inst in 0..50u64 {
        let mut rng = instance_rng(seed, 100 + inst);
        let n = rng.gen_range(1..=5);
        let g = gnp_with(n, 0.5, &mut rng)?;
        let h = gnp_with(n, 0.5, &mut rng)?;
        let (a, b) = (g.adjacency(), h.adjacency());
        let mut all_equal = true;
        for perm in permutations(n) {
            let p = DMatrix::from_fn(n, n, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
            let lhs = cut_objective(&g, &h, &(&p / n as f64), CutMode::Exact)?.value;
            let rhs = cut_norm(&(&a - &p * &b * p.transpose()), CutMode::Exact)?.value / (n * n) as f64;
            all_equal &= lhs == rhs;
        }
        out.record(
            all_equal,
            format_args!("instance {inst}: permutation identity fails"),
            &[format!("q{inst}"), "permutation-identity".into(), encode(&g), encode(&h), n.to_string(), "all".into()],
        );
    }
    Ok(out)
}

pub const FIG1_COLOR_DISTANCE: (i64, i64) = (16, 135);

fn fig1_separation(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("fig1-separation", seed, "seed,check,value,reference,pass");
    let k3 = Graph::complete(3);
    let qk3 = quotient(&k3)?;
    let ok = qk3.vertex_count() == 1 && *qk3.alpha_at(0) == rational(3, 1) && *qk3.beta(0, 0) == rational(2, 3);
    out.record(ok, "quotient of K_3", &["quotient-k3".into(), format!("alpha={} loop={}", qk3.alpha_at(0), qk3.beta(0, 0)), "alpha=3 loop=2/3".into()]);

    let g10 = figure1_graph(10)?;
    let q = quotient(&g10)?;
    let mut off: Vec<Rational> = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).map(|(i, j)| q.beta(i, j).clone()).collect();
    off.sort();
    let want = vec![rational(4, 5), rational(9, 10), rational(1, 1)];
    let shown: Vec<String> = off.iter().map(|r| r.to_string()).collect();
    out.record(off == want, "quotient of the n=10 example", &["quotient-g10".into(), shown.join(" "), "4/5 9/10 1".into()]);

    let opts = suite_options(seed);
    let col = color_distance(&g10, &k3, &SolverOptions { restarts: 10, ..opts })?;
    let exact = FIG1_COLOR_DISTANCE.0 as f64 / FIG1_COLOR_DISTANCE.1 as f64;
    out.record(
        col.bound == Bound::Exact && (col.value - exact).abs() <= 1e-12,
        format_args!("color distance {}", col.value),
        &["color-distance".into(), col.value.to_string(), "16/135".into()],
    );
    out.record(col.value >= 2.0 / 27.0, "color distance below 2/27", &["color-lower".into(), col.value.to_string(), "2/27".into()]);

    let t10 = tree_dist_cutnorm(&g10, &k3, &opts)?;
    out.record(
        t10.value <= exact + 0.02,
        format_args!("tree distance {} at n=10", t10.value),
        &["tree-cut-10".into(), t10.value.to_string(), (exact + 0.02).to_string()],
    );
    let t40 = tree_dist_cutnorm(&figure1_graph(40)?, &k3, &opts)?;
    out.record(
        t40.value < t10.value,
        format_args!("tree distance {} at n=40 not below {}", t40.value, t10.value),
        &["tree-cut-40".into(), t40.value.to_string(), t10.value.to_string()],
    );
    Ok(out)
}

/// Random weighted graph on `v` vertices with positive weights and all
/// denominators at most 10, normalized to total weight 1.
pub fn random_weighted<R: Rng>(rng: &mut R, v: usize) -> Result<WeightedGraph> {
    let denom = rng.gen_range(v as i64..=10);
    let mut parts = vec![1i64; v];
    for _ in 0..denom - v as i64 {
        parts[rng.gen_range(0..v)] += 1;
    }
    let alpha: Vec<(i64, i64)> = parts.iter().map(|&p| (p, denom)).collect();
    let mut beta = vec![vec![(0i64, 1i64); v]; v];
    for i in 0..v {
        for j in i..v {
            let q = rng.gen_range(1..=10);
            let w = (rng.gen_range(0..=q), q);
            beta[i][j] = w;
            beta[j][i] = w;
        }
    }
    WeightedGraph::from_ratios(&alpha, &beta)
}

fn inversion(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("inversion", seed, "seed,instance,v,n,achieved,bound,pass");
    for inst in 0..20u64 {
        let mut rng = instance_rng(seed, inst);
        let v = rng.gen_range(1..=4);
        let h = random_weighted(&mut rng, v)?;
        for n in [2 * v, 4 * v, 8 * v] {
            match verify_inversion(&h, n) {
                Ok(rep) => out.record(
                    rep.inner_exact,
                    format_args!("instance {inst}, n {n}: inexact inner cut norm"),
                    &[inst.to_string(), v.to_string(), n.to_string(), rep.achieved.to_string(), rep.bound.to_string()],
                ),
                Err(e @ Error::Invariant(_)) => out.record(
                    false,
                    format_args!("instance {inst}, n {n}: {e}"),
                    &[inst.to_string(), v.to_string(), n.to_string(), "nan".into(), "nan".into()],
                ),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn composition(seed: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("composition", seed, "seed,instance,kind,o1,o2,composed,pass");
    let opts = suite_options(seed);
    for inst in 0..50u64 {
        let mut rng = instance_rng(seed, inst);
        let g = random_graph(&mut rng, 1, 6);
        let b = random_graph(&mut rng, 1, 6);
        let h = random_graph(&mut rng, 1, 6);
        let cut = |x: &DMatrix<f64>, l: &Graph, r: &Graph| cut_objective(l, r, x, CutMode::Exact).map(|c| c.value);

        let (x1, x2) = (tree_dist_cutnorm(&g, &b, &opts)?.certificate, tree_dist_cutnorm(&b, &h, &opts)?.certificate);
        let z = FractionalOverlay::for_graphs(x1.clone())?.compose(&FractionalOverlay::for_graphs(x2.clone())?)?;
        let (o1, o2, o12) = (cut(&x1, &g, &b)?, cut(&x2, &b, &h)?, cut(z.matrix(), &g, &h)?);
        out.record(
            o12 <= o1 + o2 + 1e-9,
            format_args!("instance {inst}: tree-cut {o12} > {o1} + {o2}"),
            &[inst.to_string(), "tree-cut".into(), o1.to_string(), o2.to_string(), o12.to_string()],
        );

        let (x1, x2) = (tree_dist_spectral(&g, &b, &opts)?.certificate, tree_dist_spectral(&b, &h, &opts)?.certificate);
        let z = FractionalOverlay::for_graphs(x1.clone())?.compose(&FractionalOverlay::for_graphs(x2.clone())?)?;
        let (o1, o2, o12) = (
            spectral_objective(&g, &b, &x1)?,
            spectral_objective(&b, &h, &x2)?,
            spectral_objective(&g, &h, z.matrix())?,
        );
        out.record(
            o12 <= o1 + o2 + 1e-9,
            format_args!("instance {inst}: tree-spec {o12} > {o1} + {o2}"),
            &[inst.to_string(), "tree-spec".into(), o1.to_string(), o2.to_string(), o12.to_string()],
        );

        let (x1, x2) = (path_dist_spectral(&g, &b, &opts)?.certificate, path_dist_spectral(&b, &h, &opts)?.certificate);
        let z = crate::overlay::SignedOverlay::new(x1.clone())?.compose(&crate::overlay::SignedOverlay::new(x2.clone())?)?;
        let (o1, o2, o12) = (
            spectral_objective(&g, &b, &x1)?,
            spectral_objective(&b, &h, &x2)?,
            spectral_objective(&g, &h, z.matrix())?,
        );
        out.record(
            o12 <= o1 + o2 + 1e-9,
            format_args!("instance {inst}: path-spec {o12} > {o1} + {o2}"),
            &[inst.to_string(), "path-spec".into(), o1.to_string(), o2.to_string(), o12.to_string()],
        );
    }
    Ok(out)
}
