//! Seeded graph generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, which produces the
//! same stream on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::inversion::{build_biregular, build_regular};

/// Erdős–Rényi graph: one uniform draw in [0, 1) per pair `u < v` in
/// lexicographic order, edge iff the draw is below `p`.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gnp_with(n, p, &mut rng)
}

pub fn gnp_with<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::precondition(format!("edge probability {p} outside [0, 1]")));
    }
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                g.set_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// Random `d`-regular graph: the circulant, then `10·e` attempted double-edge swaps.
pub fn gen_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    regular_with(n, d, &mut rng)
}

pub fn regular_with<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<Graph> {
    let mut edges = build_regular(n, d)?;
    let mut g = Graph::from_edges(n, &edges)?;
    if edges.len() < 2 {
        return Ok(g);
    }
    for _ in 0..10 * edges.len() {
        let i = rng.gen_range(0..edges.len());
        let j = rng.gen_range(0..edges.len());
        let (a, b) = edges[i];
        let (c, d) = if rng.gen_bool(0.5) { edges[j] } else { (edges[j].1, edges[j].0) };
        // replace a-b, c-d by a-d, c-b
        if i == j || a == c || a == d || b == c || b == d || g.has_edge(a, d) || g.has_edge(c, b) {
            continue;
        }
        g.clear_edge(a, b);
        g.clear_edge(c, d);
        g.set_edge(a, d);
        g.set_edge(c, b);
        edges[i] = (a, d);
        edges[j] = (c, b);
    }
    Ok(g)
}

/// Three parts of size `n`: parts one and two completely joined, part three
/// joined to them by `(n−1)`- and `(n−2)`-regular bipartite graphs.
pub fn figure1_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::precondition("the three-part example needs n >= 3"));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            edges.push((u, n + v));
        }
    }
    for (u, v) in build_biregular(n, n, n - 1, n - 1)? {
        edges.push((u, 2 * n + v));
    }
    for (u, v) in build_biregular(n, n, n - 2, n - 2)? {
        edges.push((n + u, 2 * n + v));
    }
    Graph::from_edges(3 * n, &edges)
}

/// A uniformly random labeled tree on `n` vertices via a random Prüfer sequence.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    if n <= 1 {
        return Graph::empty(n);
    }
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let seq: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut g = Graph::empty(n);
    for &x in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always remains");
        g.set_edge(labels[leaf], labels[x]);
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    g.set_edge(labels[rest[0]], labels[rest[1]]);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::rational;
    use crate::refine::quotient;

    #[test]
    fn gnp_extremes_and_determinism() {
        assert_eq!(gen_gnp(6, 0.0, 3).unwrap().edge_count(), 0);
        assert_eq!(gen_gnp(6, 1.0, 3).unwrap(), Graph::complete(6));
        assert_eq!(gen_gnp(9, 0.4, 17).unwrap(), gen_gnp(9, 0.4, 17).unwrap());
        assert!(gen_gnp(3, 1.5, 0).is_err());
    }

    #[test]
    fn regular_examples() {
        for seed in 0..10 {
            let g = gen_regular(6, 2, seed).unwrap();
            assert!((0..6).all(|u| g.degree(u) == 2));
            assert_eq!(gen_regular(4, 3, seed).unwrap(), Graph::complete(4));
            let h = gen_regular(12, 5, seed).unwrap();
            assert!((0..12).all(|u| h.degree(u) == 5));
        }
        assert!(gen_regular(5, 3, 0).is_err());
    }

    #[test]
    fn figure1_examples() {
        let g = figure1_graph(10).unwrap();
        assert_eq!(g.vertex_count(), 30);
        assert!((0..10).all(|u| g.degree(u) == 19));
        assert!((10..20).all(|u| g.degree(u) == 18));
        assert!((20..30).all(|u| g.degree(u) == 17));
        let q = quotient(&g).unwrap();
        let mut off = Vec::new();
        for i in 0..3 {
            assert_eq!(q.beta(i, i), &rational(0, 1));
            for j in i + 1..3 {
                off.push(q.beta(i, j).clone());
            }
        }
        off.sort();
        assert_eq!(off, vec![rational(4, 5), rational(9, 10), rational(1, 1)]);
        assert_eq!(figure1_graph(3).unwrap().vertex_count(), 9);
        assert!(figure1_graph(2).is_err());
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..10 {
            assert!(random_tree(n, &mut rng).is_tree());
        }
    }
}
