//! Exact homomorphism numbers and densities from trees and paths.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{Graph, Rational, WeightedGraph};

/// Upper bound on the number of maps enumerated by [`brute_force_hom`].
pub const BRUTE_FORCE_LIMIT: u128 = 100_000_000;

/// Anything with a total vertex weight that densities are normalized by.
pub trait HomTarget {
    fn total_weight(&self) -> Rational;
}

impl HomTarget for Graph {
    fn total_weight(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.vertex_count()))
    }
}

impl HomTarget for WeightedGraph {
    fn total_weight(&self) -> Rational {
        WeightedGraph::total_weight(self)
    }
}

/// hom(T, H) for a tree `T` by rooted dynamic programming from vertex 0.
pub fn hom_tree(tree: &Graph, target: &WeightedGraph) -> Result<Rational> {
    if !tree.is_tree() {
        return Err(Error::precondition("pattern is not a tree"));
    }
    let k = target.vertex_count();
    let n = tree.vertex_count();

    // BFS order from the root; children are processed before their parent.
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    order.push(0);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for v in tree.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                order.push(v);
            }
        }
    }

    let mut table: Vec<Vec<Rational>> = vec![Vec::new(); n];
    for &u in order.iter().rev() {
        let mut f: Vec<Rational> = target.alpha().to_vec();
        for c in tree.neighbors(u).filter(|&c| parent[c] == u) {
            let child = &table[c];
            for (w, fw) in f.iter_mut().enumerate() {
                let mut s = Rational::zero();
                for (w2, fc) in child.iter().enumerate() {
                    let b = target.beta(w, w2);
                    if !b.is_zero() && !fc.is_zero() {
                        s += b * fc;
                    }
                }
                *fw *= s;
            }
            table[c] = Vec::new();
        }
        table[u] = f;
    }
    debug_assert_eq!(table[0].len(), k);
    Ok(table[0].iter().fold(Rational::zero(), |acc, x| acc + x))
}

/// hom(P_ell, G) = 1ᵀ A^ell 1, the number of walks with `ell` edges.
pub fn hom_path(ell: usize, g: &Graph) -> BigInt {
    let n = g.vertex_count();
    let mut v = vec![BigInt::one(); n];
    for _ in 0..ell {
        v = (0..n)
            .map(|u| g.neighbors(u).fold(BigInt::zero(), |acc, w| acc + &v[w]))
            .collect();
    }
    v.into_iter().sum()
}

/// t(F, H) = count / (total weight of H)^{v(F)}.
pub fn density<T: HomTarget + ?Sized>(pattern: &Graph, target: &T, count: &Rational) -> Rational {
    let denom = num_traits::pow(target.total_weight(), pattern.vertex_count());
    count / denom
}

/// Direct enumeration of all v(H)^{v(F)} maps. Independent of [`hom_tree`].
pub fn brute_force_hom(pattern: &Graph, target: &WeightedGraph) -> Result<Rational> {
    let n = pattern.vertex_count();
    let k = target.vertex_count();
    let maps = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if maps > BRUTE_FORCE_LIMIT {
        return Err(Error::precondition(format!(
            "brute force over {k}^{n} maps exceeds the limit of {BRUTE_FORCE_LIMIT}"
        )));
    }
    let edges = pattern.edges();
    let mut phi = vec![0usize; n];
    let mut total = Rational::zero();
    loop {
        let mut term = Rational::one();
        for &(u, v) in &edges {
            let b = target.beta(phi[u], phi[v]);
            if b.is_zero() {
                term = Rational::zero();
                break;
            }
            term *= b;
        }
        if !term.is_zero() {
            for &w in &phi {
                term *= target.alpha_at(w);
            }
            total += term;
        }
        // mixed-radix increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(total);
            }
            phi[i] += 1;
            if phi[i] < k {
                break;
            }
            phi[i] = 0;
            i += 1;
        }
    }
}

/// All free trees on 1..=max_vertices vertices, one per isomorphism class,
/// ordered by vertex count and then by canonical code.
pub fn enumerate_trees(max_vertices: usize) -> Result<Vec<Graph>> {
    if !(1..=8).contains(&max_vertices) {
        return Err(Error::precondition("tree enumeration supports 1 to 8 vertices"));
    }
    let mut out = vec![Graph::empty(1)];
    if max_vertices >= 2 {
        out.push(Graph::complete(2));
    }
    for n in 3..=max_vertices {
        let mut classes: BTreeMap<String, Graph> = BTreeMap::new();
        let mut seq = vec![0usize; n - 2];
        loop {
            let tree = prufer_decode(&seq, n);
            classes.entry(canonical_tree_code(&tree)).or_insert(tree);
            let mut i = 0;
            loop {
                if i == seq.len() {
                    break;
                }
                seq[i] += 1;
                if seq[i] < n {
                    break;
                }
                seq[i] = 0;
                i += 1;
            }
            if i == seq.len() {
                break;
            }
        }
        out.extend(classes.into_values());
    }
    Ok(out)
}

fn prufer_decode(seq: &[usize], n: usize) -> Graph {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut g = Graph::empty(n);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("Prüfer decoding always has a leaf");
        g.set_edge(leaf, x);
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    g.set_edge(rest[0], rest[1]);
    g
}

/// Canonical string of a free tree: AHU encoding rooted at the center,
/// the smaller of the two encodings for bicentral trees.
pub fn canonical_tree_code(tree: &Graph) -> String {
    let n = tree.vertex_count();
    if n == 1 {
        return "()".into();
    }
    // peel leaves to find the center
    let mut degree: Vec<usize> = (0..n).map(|u| tree.degree(u)).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&u| degree[u] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &u in &layer {
            for v in tree.neighbors(u) {
                if degree[v] > 1 {
                    degree[v] -= 1;
                    if degree[v] == 1 {
                        next.push(v);
                    }
                }
            }
            degree[u] = 0;
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| rooted_code(tree, c, usize::MAX))
        .min()
        .unwrap()
}

fn rooted_code(tree: &Graph, u: usize, parent: usize) -> String {
    let mut kids: Vec<String> = tree
        .neighbors(u)
        .filter(|&v| v != parent)
        .map(|v| rooted_code(tree, v, u))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}
