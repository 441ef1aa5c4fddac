//! Color refinement, equitable quotients and the main spectrum of a graph.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::graph::{Graph, Rational, WeightedGraph};
use crate::linalg::symmetric_eigen;

/// Stable coloring produced by color refinement.
///
/// Color ids are dense (`0..class_count`) and canonical: in every round the
/// distinct signatures (previous color, sorted neighbor colors) are sorted and
/// numbered in that order, so isomorphic graphs receive identical histograms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub rounds: usize,
}

impl Coloring {
    pub fn class_count(&self) -> usize {
        self.colors.iter().copied().max().map_or(0, |c| c + 1)
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// True when every two vertices of equal color have equally many neighbors of each color.
    pub fn is_equitable(&self, g: &Graph) -> bool {
        let k = self.class_count();
        let mut reference: Vec<Option<Vec<usize>>> = vec![None; k];
        for v in 0..g.vertex_count() {
            let mut counts = vec![0usize; k];
            for w in g.neighbors(v) {
                counts[self.colors[w]] += 1;
            }
            match &reference[self.colors[v]] {
                None => reference[self.colors[v]] = Some(counts),
                Some(r) if *r != counts => return false,
                Some(_) => {}
            }
        }
        true
    }
}

pub fn color_refine(g: &Graph) -> Coloring {
    let n = g.vertex_count();
    let mut colors = vec![0usize; n];
    let mut classes = usize::from(n > 0);
    let mut rounds = 0;
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).map(|w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut ids: BTreeMap<&(usize, Vec<usize>), usize> = BTreeMap::new();
        for s in &signatures {
            ids.insert(s, 0);
        }
        for (i, id) in ids.values_mut().enumerate() {
            *id = i;
        }
        let next: Vec<usize> = signatures.iter().map(|s| ids[s]).collect();
        let count = ids.len();
        if count == classes {
            // stable: the new ids induce the same partition
            return Coloring {
                colors: next,
                rounds,
            };
        }
        classes = count;
        colors = next;
        rounds += 1;
    }
}

/// Quotient by the stable coloring: one vertex per class with weight |C| and
/// edge weight M_CD / |D|.
pub fn quotient(g: &Graph) -> Result<WeightedGraph> {
    quotient_with(g, &color_refine(g))
}

/// Quotient by a given partition, which must be equitable.
pub fn quotient_with(g: &Graph, coloring: &Coloring) -> Result<WeightedGraph> {
    let classes = coloring.classes();
    let k = classes.len();
    let mut counts = vec![vec![0usize; k]; k];
    for (c, members) in classes.iter().enumerate() {
        for (idx, &v) in members.iter().enumerate() {
            let mut row = vec![0usize; k];
            for w in g.neighbors(v) {
                row[coloring.colors[w]] += 1;
            }
            if idx == 0 {
                counts[c] = row;
            } else if counts[c] != row {
                return Err(Error::invariant(format!(
                    "partition is not equitable: vertex {v} differs from its class {c}"
                )));
            }
        }
    }
    for c in 0..k {
        for d in 0..k {
            if classes[c].len() * counts[c][d] != classes[d].len() * counts[d][c] {
                return Err(Error::invariant(format!(
                    "edge counts between classes {c} and {d} disagree"
                )));
            }
        }
    }
    let alpha = classes
        .iter()
        .map(|m| Rational::from_integer(BigInt::from(m.len())))
        .collect();
    let beta = (0..k)
        .map(|c| {
            (0..k)
                .map(|d| Rational::new(BigInt::from(counts[c][d]), BigInt::from(classes[d].len())))
                .collect()
        })
        .collect();
    WeightedGraph::new(alpha, beta)
}

/// Whether color refinement fails to distinguish `g` and `h`.
///
/// Equal orders: refine the disjoint union and compare the per-graph color
/// histograms. Different orders: compare normalized quotients.
pub fn cr_equivalent(g: &Graph, h: &Graph) -> Result<bool> {
    let (n, m) = (g.vertex_count(), h.vertex_count());
    if n != m {
        let (qg, qh) = (quotient(g)?, quotient(h)?);
        return Ok(quotient_match(&qg, &qh, n, m).is_some());
    }
    let union = g.disjoint_union(h);
    let coloring = color_refine(&union);
    let mut left = coloring.colors[..n].to_vec();
    let mut right = coloring.colors[n..].to_vec();
    left.sort_unstable();
    right.sort_unstable();
    Ok(left == right)
}

/// Class bijection `pi` (indexed by classes of `qg`) with equal size fractions
/// and equal edge weights, found by backtracking.
pub fn quotient_match(
    qg: &WeightedGraph,
    qh: &WeightedGraph,
    n_g: usize,
    n_h: usize,
) -> Option<Vec<usize>> {
    let k = qg.vertex_count();
    if k != qh.vertex_count() {
        return None;
    }
    let ng = Rational::from_integer(BigInt::from(n_g));
    let nh = Rational::from_integer(BigInt::from(n_h));
    let frac_g: Vec<Rational> = qg.alpha().iter().map(|a| a / &ng).collect();
    let frac_h: Vec<Rational> = qh.alpha().iter().map(|a| a / &nh).collect();
    match_weighted(qg, qh, &frac_g, &frac_h)
}

/// Isomorphism of weighted graphs up to normalization of vertex weights.
pub fn weighted_match(g: &WeightedGraph, h: &WeightedGraph) -> Option<Vec<usize>> {
    if g.vertex_count() != h.vertex_count() {
        return None;
    }
    let (tg, th) = (g.total_weight(), h.total_weight());
    let frac_g: Vec<Rational> = g.alpha().iter().map(|a| a / &tg).collect();
    let frac_h: Vec<Rational> = h.alpha().iter().map(|a| a / &th).collect();
    match_weighted(g, h, &frac_g, &frac_h)
}

fn match_weighted(
    g: &WeightedGraph,
    h: &WeightedGraph,
    frac_g: &[Rational],
    frac_h: &[Rational],
) -> Option<Vec<usize>> {
    let k = g.vertex_count();
    // pruning key: (own fraction, loop weight, sorted multiset of (fraction, weight) to others)
    let key = |w: &WeightedGraph, frac: &[Rational], c: usize| {
        let mut row: Vec<(Rational, Rational)> = (0..k)
            .filter(|&d| d != c)
            .map(|d| (frac[d].clone(), w.beta(c, d).clone()))
            .collect();
        row.sort();
        (frac[c].clone(), w.beta(c, c).clone(), row)
    };
    let keys_g: Vec<_> = (0..k).map(|c| key(g, frac_g, c)).collect();
    let keys_h: Vec<_> = (0..k).map(|c| key(h, frac_h, c)).collect();
    let candidates: Vec<Vec<usize>> = (0..k)
        .map(|c| (0..k).filter(|&d| keys_g[c] == keys_h[d]).collect())
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let mut pi = vec![usize::MAX; k];
    let mut used = vec![false; k];
    fn search(
        c: usize,
        g: &WeightedGraph,
        h: &WeightedGraph,
        candidates: &[Vec<usize>],
        pi: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if c == pi.len() {
            return true;
        }
        for &d in &candidates[c] {
            if used[d] {
                continue;
            }
            if (0..c).any(|c2| g.beta(c, c2) != h.beta(d, pi[c2])) {
                continue;
            }
            pi[c] = d;
            used[d] = true;
            if search(c + 1, g, h, candidates, pi, used) {
                return true;
            }
            used[d] = false;
        }
        pi[c] = usize::MAX;
        false
    }
    if search(0, g, h, &candidates, &mut pi, &mut used) {
        Some(pi)
    } else {
        None
    }
}

pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-8;

/// Main spectrum: adjacency eigenvalues whose eigenspace is not orthogonal to
/// the all-ones vector, normalized by v(G), with the normalized squared norm of
/// that projection.
#[derive(Clone, Debug)]
pub struct PathSpectrum {
    /// `(lambda / n, |p|^2 / n)` sorted by the first component.
    pub entries: Vec<(f64, f64)>,
    /// Projection `p` of the all-ones vector onto each kept eigenspace, aligned with `entries`.
    pub projections: Vec<DVector<f64>>,
    pub order: usize,
}

impl PathSpectrum {
    /// Σ w · lambda^ell, which reproduces t(P_ell, G).
    pub fn path_density(&self, ell: usize) -> f64 {
        self.entries
            .iter()
            .map(|&(l, w)| w * l.powi(ell as i32))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_hat,w_hat\n");
        for (l, w) in &self.entries {
            out.push_str(&format!("{l},{w}\n"));
        }
        out
    }
}

pub fn path_spectrum(g: &Graph, tol: f64) -> Result<PathSpectrum> {
    if !(tol > 0.0) {
        return Err(Error::precondition("spectrum tolerance must be positive"));
    }
    let n = g.vertex_count();
    let eig = symmetric_eigen(&g.adjacency())?;
    let ones = DVector::from_element(n, 1.0);
    let mut entries = Vec::new();
    let mut projections = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= tol {
            end += 1;
        }
        let mut p = DVector::zeros(n);
        for k in start..end {
            let col = eig.vectors.column(k);
            p += col * col.dot(&ones);
        }
        let weight = p.norm_squared();
        if weight > tol * n as f64 {
            let lambda = eig.values[start..end].iter().sum::<f64>() / (end - start) as f64;
            entries.push((lambda / n as f64, weight / n as f64));
            projections.push(p);
        }
        start = end;
    }
    Ok(PathSpectrum {
        entries,
        projections,
        order: n,
    })
}

/// Pairs sorted entries one to one; equal iff every pair is within `tol` in both coordinates.
pub fn path_equivalent(a: &PathSpectrum, b: &PathSpectrum, tol: f64) -> bool {
    a.entries.len() == b.entries.len()
        && a
            .entries
            .iter()
            .zip(&b.entries)
            .all(|(x, y)| (x.0 - y.0).abs() <= tol && (x.1 - y.1).abs() <= tol)
}

/// Histogram (sorted class sizes) of a coloring; handy for reports.
pub fn class_sizes(c: &Coloring) -> Vec<usize> {
    let mut sizes: Vec<usize> = c.classes().iter().map(Vec::len).collect();
    sizes.sort_unstable();
    sizes
}
