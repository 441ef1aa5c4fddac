//! Approximate inversion of color refinement: from a weighted graph `H` and a
//! scale `n`, build a simple graph on `n²` vertices whose quotient is close to `H`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cutnorm::CutMode;
use crate::distance::d_cut_at;
use crate::error::{Error, Result};
use crate::graph::{to_f64, Graph, Rational, WeightedGraph};
use crate::overlay::FractionalOverlay;
use crate::refine::{color_refine, quotient_with, Coloring};

/// Class sizes and the degree matrix of the graph to build.
///
/// `degrees[i][j]` is the number of neighbors a vertex of class `i` has in class
/// `j`, where class `i` has `n * s[i]` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InversionPlan {
    pub n: usize,
    pub s: Vec<usize>,
    pub degrees: Vec<Vec<usize>>,
}

impl InversionPlan {
    pub fn class_size(&self, i: usize) -> usize {
        self.n * self.s[i]
    }

    /// Indices of the classes that receive vertices.
    pub fn active(&self) -> Vec<usize> {
        (0..self.s.len()).filter(|&i| self.s[i] > 0).collect()
    }

    /// Checks every integer condition the construction needs; the error names the first failure.
    pub fn check(&self) -> Result<()> {
        let k = self.s.len();
        if self.s.iter().sum::<usize>() != self.n {
            return Err(Error::invariant("class sizes do not sum to n"));
        }
        for i in 0..k {
            let ni = self.class_size(i);
            if self.s[i] == 0 {
                if (0..k).any(|j| self.degrees[i][j] != 0 || self.degrees[j][i] != 0) {
                    return Err(Error::invariant(format!("empty class {i} has degrees")));
                }
                continue;
            }
            let d = self.degrees[i][i];
            if d >= ni || !(d * ni).is_multiple_of(2) {
                return Err(Error::invariant(format!(
                    "class {i}: internal degree {d} on {ni} vertices is not realizable"
                )));
            }
            for j in 0..k {
                if i == j || self.s[j] == 0 {
                    continue;
                }
                let nj = self.class_size(j);
                if self.degrees[i][j] > nj || self.degrees[i][j] * ni != self.degrees[j][i] * nj {
                    return Err(Error::invariant(format!(
                        "classes {i},{j}: degrees {} and {} are not biregular",
                        self.degrees[i][j], self.degrees[j][i]
                    )));
                }
            }
        }
        let active = self.active();
        let sums: Vec<usize> = active.iter().map(|&i| self.degrees[i].iter().sum()).collect();
        for a in 0..sums.len() {
            for b in a + 1..sums.len() {
                if sums[a] == sums[b] {
                    return Err(Error::invariant(format!(
                        "classes {} and {} share row sum {}",
                        active[a], active[b], sums[a]
                    )));
                }
            }
        }
        Ok(())
    }
}

fn int(x: usize) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn to_usize(x: &Rational) -> usize {
    x.to_integer().to_usize().expect("nonnegative integer")
}

/// Rounds `n·α` to integers summing to `n` with every error below 1.
///
/// Walks the entries in order; when the already-fixed entries overshoot
/// (positive running discrepancy) the next one is rounded down, otherwise up.
pub fn round_vertex_weights(alpha: &[Rational], n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::precondition("n must be positive"));
    }
    if alpha.is_empty() || alpha.iter().any(Signed::is_negative) {
        return Err(Error::precondition("weights must be a nonempty nonnegative vector"));
    }
    if alpha.iter().fold(Rational::zero(), |a, b| a + b) != int(1) {
        return Err(Error::precondition("weights must sum to 1"));
    }
    let nn = int(n);
    let mut discrepancy = Rational::zero();
    let mut s = Vec::with_capacity(alpha.len());
    for a in alpha {
        let target = a * &nn;
        let pick = if discrepancy.is_positive() { target.floor() } else { target.ceil() };
        discrepancy += &pick - &target;
        s.push(to_usize(&pick));
    }
    debug_assert!(discrepancy.is_zero());
    Ok(s)
}

/// Off-diagonal degrees: for each pair the grid `k / (n·gcd(s_u, s_v))` point
/// nearest to `β_uv`, ties toward smaller `k`; then `M_uv = k·s_v/g`, `M_vu = k·s_u/g`.
pub fn round_edge_weights(h: &WeightedGraph, s: &[usize], n: usize) -> Result<Vec<Vec<usize>>> {
    let k = h.vertex_count();
    if s.len() != k {
        return Err(Error::precondition("one class size per vertex of H is required"));
    }
    let mut m = vec![vec![0usize; k]; k];
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    for u in 0..k {
        for v in u + 1..k {
            if s[u] == 0 || s[v] == 0 {
                continue;
            }
            let g = s[u].gcd(&s[v]);
            let x = h.beta(u, v) * int(n * g);
            // round half down
            let steps = to_usize(&(x - &half).ceil().max(Rational::zero()));
            m[u][v] = steps * s[v] / g;
            m[v][u] = steps * s[u] / g;
        }
    }
    Ok(m)
}

/// Internal degrees: classes in increasing size order take the realizable value
/// nearest to `β_uu·N_u` whose row sum differs from all rows fixed so far.
pub fn choose_diagonals(h: &WeightedGraph, s: &[usize], n: usize, offdiag: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let k = h.vertex_count();
    if n < 2 * k {
        return Err(Error::precondition(format!("n = {n} must be at least 2·v(H) = {}", 2 * k)));
    }
    let mut m = offdiag.to_vec();
    let mut order: Vec<usize> = (0..k).filter(|&u| s[u] > 0).collect();
    order.sort_by_key(|&u| (s[u], u));
    let mut fixed: Vec<usize> = Vec::new();
    for u in order {
        let size = n * s[u];
        let target = h.beta(u, u) * int(size);
        let mut candidates: Vec<usize> = (0..size).filter(|c| (c * size).is_multiple_of(2)).collect();
        candidates.sort_by(|a, b| {
            let da = (int(*a) - &target).abs();
            let db = (int(*b) - &target).abs();
            da.cmp(&db).then(a.cmp(b))
        });
        let others: usize = (0..k).filter(|&v| v != u).map(|v| m[u][v]).sum();
        let choice = candidates
            .into_iter()
            .find(|c| !fixed.contains(&(c + others)))
            .ok_or_else(|| Error::invariant(format!("no admissible internal degree for class {u}")))?;
        let deviation = (int(choice) - &target).abs();
        if deviation > int(2 * k - 1) {
            return Err(Error::invariant(format!(
                "class {u}: internal degree {choice} is {deviation} away from its target"
            )));
        }
        m[u][u] = choice;
        fixed.push(choice + others);
    }
    Ok(m)
}

/// `d`-regular circulant on `size` vertices: offsets ±1..±⌊d/2⌋, plus `size/2` when `d` is odd.
pub fn build_regular(size: usize, d: usize) -> Result<Vec<(usize, usize)>> {
    if d >= size.max(1) || !(d * size).is_multiple_of(2) {
        return Err(Error::precondition(format!("no {d}-regular graph on {size} vertices")));
    }
    let mut edges = Vec::with_capacity(size * d / 2);
    for i in 0..size {
        for off in 1..=d / 2 {
            edges.push((i, (i + off) % size));
        }
    }
    if d % 2 == 1 {
        for i in 0..size / 2 {
            edges.push((i, i + size / 2));
        }
    }
    Ok(edges)
}

/// Bipartite graph with left degree `d1` and right degree `d2`:
/// left vertex `i` is joined to right vertices `(i·d1 + t) mod s2` for `t < d1`.
pub fn build_biregular(s1: usize, s2: usize, d1: usize, d2: usize) -> Result<Vec<(usize, usize)>> {
    if d1 * s1 != d2 * s2 || d1 > s2 || d2 > s1 {
        return Err(Error::precondition(format!(
            "no ({d1},{d2})-biregular graph on {s1}+{s2} vertices"
        )));
    }
    let mut edges = Vec::with_capacity(s1 * d1);
    for i in 0..s1 {
        for t in 0..d1 {
            edges.push((i, (i * d1 + t) % s2));
        }
    }
    Ok(edges)
}

/// The graph together with the plan and its class coloring (in plan order,
/// classes with `s = 0` skipped).
#[derive(Clone, Debug)]
pub struct Inversion {
    pub graph: Graph,
    pub plan: InversionPlan,
    pub coloring: Coloring,
}

pub fn invert(h: &WeightedGraph, n: usize) -> Result<Inversion> {
    let k = h.vertex_count();
    if n < 2 * k {
        return Err(Error::precondition(format!("n = {n} must be at least 2·v(H) = {}", 2 * k)));
    }
    let h = h.normalized();
    let s = round_vertex_weights(h.alpha(), n)?;
    let offdiag = round_edge_weights(&h, &s, n)?;
    let degrees = choose_diagonals(&h, &s, n, &offdiag)?;
    let plan = InversionPlan { n, s, degrees };
    plan.check()?;

    let active = plan.active();
    let mut offset = vec![0usize; k];
    let mut colors = Vec::with_capacity(n * n);
    let mut next = 0;
    for (c, &u) in active.iter().enumerate() {
        offset[u] = next;
        next += plan.class_size(u);
        colors.extend(std::iter::repeat_n(c, plan.class_size(u)));
    }
    debug_assert_eq!(next, n * n);

    let mut edges = Vec::new();
    for (a, &u) in active.iter().enumerate() {
        for &(x, y) in &build_regular(plan.class_size(u), plan.degrees[u][u])? {
            edges.push((offset[u] + x, offset[u] + y));
        }
        for &v in &active[a + 1..] {
            let block = build_biregular(plan.class_size(u), plan.class_size(v), plan.degrees[u][v], plan.degrees[v][u])?;
            for &(x, y) in &block {
                edges.push((offset[u] + x, offset[v] + y));
            }
        }
    }
    let graph = Graph::from_edges(n * n, &edges)?;

    // degree audit against the plan
    for (c, &u) in active.iter().enumerate() {
        for x in offset[u]..offset[u] + plan.class_size(u) {
            let mut counts = vec![0usize; active.len()];
            for y in graph.neighbors(x) {
                counts[colors[y]] += 1;
            }
            for (d, &v) in active.iter().enumerate() {
                if counts[d] != plan.degrees[u][v] {
                    return Err(Error::invariant(format!(
                        "vertex {x} of class {c} has {} neighbors in class {d}, planned {}",
                        counts[d], plan.degrees[u][v]
                    )));
                }
            }
        }
    }
    let coloring = Coloring { colors, rounds: 0 };
    let refined = color_refine(&graph);
    if !same_partition(&refined.colors, &coloring.colors) {
        return Err(Error::invariant("color refinement does not recover the planned classes"));
    }
    Ok(Inversion { graph, plan, coloring })
}

fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut map = std::collections::HashMap::new();
    let mut back = std::collections::HashMap::new();
    a.iter().zip(b).all(|(x, y)| *map.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Coupling of row masses `s_i/n` (classes with `s_i > 0` only) and column
/// masses `α_i`: the diagonal takes `min(s_i/n, α_i)`, then the leftover masses
/// are paired in northwest-corner order. Exact arithmetic.
pub fn diagonal_overlay_exact(s: &[usize], n: usize, alpha: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    if s.len() != alpha.len() {
        return Err(Error::precondition("class sizes and weights differ in length"));
    }
    if s.iter().sum::<usize>() != n || alpha.iter().fold(Rational::zero(), |a, b| a + b) != int(1) {
        return Err(Error::precondition("row and column masses must both sum to 1"));
    }
    let k = s.len();
    let rows: Vec<Rational> = s.iter().map(|&x| Rational::new(BigInt::from(x), BigInt::from(n))).collect();
    let mut x = vec![vec![Rational::zero(); k]; k];
    let mut row_left = Vec::with_capacity(k);
    let mut col_left = Vec::with_capacity(k);
    for i in 0..k {
        let d = rows[i].clone().min(alpha[i].clone());
        row_left.push(&rows[i] - &d);
        col_left.push(&alpha[i] - &d);
        x[i][i] = d;
    }
    let (mut i, mut j) = (0, 0);
    while i < k && j < k {
        if row_left[i].is_zero() {
            i += 1;
            continue;
        }
        if col_left[j].is_zero() {
            j += 1;
            continue;
        }
        let q = row_left[i].clone().min(col_left[j].clone());
        x[i][j] += &q;
        row_left[i] -= &q;
        col_left[j] -= &q;
    }
    let active: Vec<usize> = (0..k).filter(|&i| s[i] > 0).collect();
    Ok(active.iter().map(|&i| x[i].clone()).collect())
}

pub fn diagonal_overlay(s: &[usize], n: usize, alpha: &[Rational]) -> Result<FractionalOverlay> {
    let exact = diagonal_overlay_exact(s, n, alpha)?;
    let rows = exact.len();
    let cols = alpha.len();
    let x = nalgebra::DMatrix::from_fn(rows, cols, |i, j| to_f64(&exact[i][j]));
    let row_marginal = s.iter().filter(|&&v| v > 0).map(|&v| v as f64 / n as f64).collect();
    let col_marginal = alpha.iter().map(to_f64).collect();
    FractionalOverlay::new(x, row_marginal, col_marginal)
}

#[derive(Clone, Debug, Serialize)]
pub struct InversionReport {
    pub n: usize,
    pub v: usize,
    /// `d_□` of the quotient and `H` at the diagonal overlay.
    pub achieved: f64,
    /// `3 v/n + (v/n)²/4`.
    pub bound: f64,
    pub inner_exact: bool,
    pub plan: InversionPlan,
}

pub fn inversion_bound(v: usize, n: usize) -> f64 {
    let r = v as f64 / n as f64;
    3.0 * r + 0.25 * r * r
}

/// Builds the graph, takes its quotient in plan order and checks the cut
/// distance upper bound from the diagonal overlay against `3 v/n + (v/n)²/4`.
pub fn verify_inversion(h: &WeightedGraph, n: usize) -> Result<InversionReport> {
    let inv = invert(h, n)?;
    let hn = h.normalized();
    let q = quotient_with(&inv.graph, &inv.coloring)?;
    let x = diagonal_overlay(&inv.plan.s, n, hn.alpha())?;
    let cut = d_cut_at(&q, &hn, &x, CutMode::Auto { seed: 0 })?;
    let v = h.vertex_count();
    let rep = InversionReport {
        n,
        v,
        achieved: cut.value,
        bound: inversion_bound(v, n),
        inner_exact: cut.exact,
        plan: inv.plan,
    };
    if !(rep.achieved <= rep.bound) {
        return Err(Error::invariant(format!(
            "inversion bound violated: {} > {} for plan {:?}",
            rep.achieved, rep.bound, rep.plan
        )));
    }
    Ok(rep)
}
