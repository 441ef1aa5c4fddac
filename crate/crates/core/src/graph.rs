//! Simple graphs, weighted graphs, their text formats and the blow-up.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Simple undirected graph with a dense 0/1 adjacency matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::precondition(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::precondition(format!("loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::precondition(format!("duplicate edge ({u},{v})")));
            }
            g.set_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set_edge(u, v);
            }
        }
        g
    }

    /// Path with `len` edges (on `len + 1` vertices).
    pub fn path(len: usize) -> Self {
        let mut g = Graph::empty(len + 1);
        for u in 0..len {
            g.set_edge(u, u + 1);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least 3 vertices");
        let mut g = Graph::empty(n);
        for u in 0..n {
            g.set_edge(u, (u + 1) % n);
        }
        g
    }

    /// Star with one center (vertex 0) and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let mut g = Graph::empty(leaves + 1);
        for v in 1..=leaves {
            g.set_edge(0, v);
        }
        g
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = Graph::empty(self.n + other.n);
        for (u, v) in self.edges() {
            g.set_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.set_edge(self.n + u, self.n + v);
        }
        g
    }

    pub(crate) fn set_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
    }

    pub(crate) fn clear_edge(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = false;
        self.adj[v * self.n + u] = false;
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[u * self.n..(u + 1) * self.n];
        row.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u * self.n..(u + 1) * self.n]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |u, v| if self.has_edge(u, v) { 1.0 } else { 0.0 })
    }

    pub fn is_tree(&self) -> bool {
        if self.n == 0 || self.edge_count() != self.n - 1 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Relabels vertices: vertex `v` of `self` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.set_edge(perm[u], perm[v]);
        }
        g
    }

    /// Every vertex replaced by `k` copies; copy `i` of vertex `u` gets index `u * k + i`.
    pub fn blow_up(&self, k: usize) -> Result<Graph> {
        if k == 0 {
            return Err(Error::precondition("blow-up factor must be at least 1"));
        }
        let mut g = Graph::empty(self.n * k);
        for (u, v) in self.edges() {
            for i in 0..k {
                for j in 0..k {
                    g.set_edge(u * k + i, v * k + j);
                }
            }
        }
        Ok(g)
    }

    pub fn as_weighted(&self) -> WeightedGraph {
        let beta = (0..self.n)
            .map(|u| {
                (0..self.n)
                    .map(|v| {
                        if self.has_edge(u, v) {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        WeightedGraph {
            alpha: vec![Rational::one(); self.n],
            beta,
        }
    }

    pub fn parse(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header line \"n m\""))?;
        let (n, m) = parse_pair(header_line, header)?;
        if n == 0 {
            return Err(Error::parse(header_line, "graph must have at least one vertex"));
        }
        let mut g = Graph::empty(n);
        let mut count = 0;
        for (line, content) in lines {
            if count == m {
                return Err(Error::parse(line, format!("more than the declared {m} edges")));
            }
            let (u, v) = parse_pair(line, content)?;
            if u >= n || v >= n {
                return Err(Error::parse(
                    line,
                    format!("vertex index out of range in edge {u} {v} (n = {n})"),
                ));
            }
            if u == v {
                return Err(Error::parse(line, format!("loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::parse(line, format!("duplicate edge {u} {v}")));
            }
            g.set_edge(u, v);
            count += 1;
        }
        if count != m {
            return Err(Error::parse(
                0,
                format!("header declares {m} edges but {count} were given"),
            ));
        }
        Ok(g)
    }

    /// Text form with normalized edges (`u < v`, sorted).
    pub fn serialize(&self) -> String {
        let edges = self.edges();
        let mut out = format!("{} {}\n", self.n, edges.len());
        for (u, v) in edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let mut it = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it
            .next()
            .ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
        tok.parse::<usize>()
            .map_err(|_| Error::parse(line, format!("invalid {what} {tok:?}")))
    };
    let a = next("first integer")?;
    let b = next("second integer")?;
    if it.next().is_some() {
        return Err(Error::parse(line, "expected exactly two integers"));
    }
    Ok((a, b))
}

/// Weighted graph with positive vertex weights and symmetric edge weights in `[0, 1]`.
/// Diagonal entries of `beta` are loop weights.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightedGraph {
    alpha: Vec<Rational>,
    beta: Vec<Vec<Rational>>,
}

impl WeightedGraph {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Vec<Rational>>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::precondition("weighted graph needs at least one vertex"));
        }
        if beta.len() != n || beta.iter().any(|row| row.len() != n) {
            return Err(Error::precondition(format!("beta must be a {n}x{n} matrix")));
        }
        for (u, a) in alpha.iter().enumerate() {
            if !a.is_positive() {
                return Err(Error::precondition(format!("alpha[{u}] = {a} is not positive")));
            }
        }
        for u in 0..n {
            for v in 0..n {
                let b = &beta[u][v];
                if b.is_negative() || *b > Rational::one() {
                    return Err(Error::precondition(format!(
                        "beta[{u}][{v}] = {b} outside [0, 1]"
                    )));
                }
                if beta[v][u] != *b {
                    return Err(Error::precondition(format!("beta not symmetric at ({u},{v})")));
                }
            }
        }
        Ok(WeightedGraph { alpha, beta })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(alpha: &[(i64, i64)], beta: &[Vec<(i64, i64)>]) -> Result<Self> {
        let r = |&(p, q): &(i64, i64)| Rational::new(BigInt::from(p), BigInt::from(q));
        WeightedGraph::new(
            alpha.iter().map(r).collect(),
            beta.iter().map(|row| row.iter().map(r).collect()).collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn alpha_at(&self, u: usize) -> &Rational {
        &self.alpha[u]
    }

    pub fn beta(&self, u: usize, v: usize) -> &Rational {
        &self.beta[u][v]
    }

    pub fn beta_rows(&self) -> &[Vec<Rational>] {
        &self.beta
    }

    pub fn total_weight(&self) -> Rational {
        self.alpha.iter().fold(Rational::zero(), |acc, a| acc + a)
    }

    /// Vertex weights scaled to sum to one.
    pub fn normalized(&self) -> WeightedGraph {
        let total = self.total_weight();
        WeightedGraph {
            alpha: self.alpha.iter().map(|a| a / &total).collect(),
            beta: self.beta.clone(),
        }
    }

    /// Vertex-weight fractions `alpha_u / alpha_G` as floats.
    pub fn weight_fractions(&self) -> Vec<f64> {
        let total = self.total_weight();
        self.alpha.iter().map(|a| to_f64(&(a / &total))).collect()
    }

    pub fn beta_f64(&self) -> DMatrix<f64> {
        let n = self.vertex_count();
        DMatrix::from_fn(n, n, |u, v| to_f64(&self.beta[u][v]))
    }

    pub fn parse(text: &str) -> Result<WeightedGraph> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::parse(0, "expected a JSON object"))?;
        let alpha = obj
            .get("alpha")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(0, "missing array \"alpha\""))?
            .iter()
            .enumerate()
            .map(|(i, v)| rational_from_json(v).map_err(|m| Error::parse(0, format!("alpha[{i}]: {m}"))))
            .collect::<Result<Vec<_>>>()?;
        let beta_rows = obj
            .get("beta")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(0, "missing array \"beta\""))?;
        let mut beta = Vec::with_capacity(beta_rows.len());
        for (i, row) in beta_rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::parse(0, format!("beta[{i}] is not an array")))?;
            beta.push(
                row.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        rational_from_json(v)
                            .map_err(|m| Error::parse(0, format!("beta[{i}][{j}]: {m}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        WeightedGraph::new(alpha, beta)
    }

    /// JSON text with every rational written as `"p/q"`.
    pub fn serialize(&self) -> String {
        let fmt = |r: &Rational| format!("\"{}/{}\"", r.numer(), r.denom());
        let alpha: Vec<String> = self.alpha.iter().map(fmt).collect();
        let rows: Vec<String> = self
            .beta
            .iter()
            .map(|row| format!("[{}]", row.iter().map(fmt).collect::<Vec<_>>().join(", ")))
            .collect();
        format!(
            "{{\n  \"alpha\": [{}],\n  \"beta\": [\n    {}\n  ]\n}}\n",
            alpha.join(", "),
            rows.join(",\n    ")
        )
    }
}

fn rational_from_json(v: &Value) -> std::result::Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(format!("expected a string or number, got {other}")),
    }
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.93"` into an exact rational.
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(format!("not a rational number: {s:?}"));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_small_graphs() {
        let k3 = Graph::parse("3 3\n0 1\n0 2\n1 2").unwrap();
        assert_eq!(k3, Graph::complete(3));
        let k2 = Graph::parse("2 1\n0 1").unwrap();
        assert_eq!(k2, Graph::complete(2));
        let c4 = Graph::parse("4 4\n0 1\n1 2\n2 3\n3 0").unwrap();
        assert_eq!(c4, Graph::cycle(4));
    }

    #[test]
    fn parse_errors_name_the_line() {
        match Graph::parse("3 2\n0 1\n1 0") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Graph::parse("3 1\n0 3"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse("3 1\n1 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse("3 1\n1 x"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse("3 2\n0 1"), Err(Error::Parse { .. })));
        assert!(matches!(Graph::parse(""), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn serializer_normalizes_edges() {
        let g = Graph::parse("4 4\n3 0\n1 0\n2 1\n3 2\n").unwrap();
        assert_eq!(g.serialize(), "4 4\n0 1\n0 3\n1 2\n2 3\n");
        let text = g.serialize();
        assert_eq!(Graph::parse(&text).unwrap().serialize(), text);
    }

    #[test]
    fn weighted_examples() {
        let q = WeightedGraph::parse(r#"{"alpha": ["3"], "beta": [["2/3"]]}"#).unwrap();
        assert_eq!(q.alpha()[0], rational(3, 1));
        assert_eq!(*q.beta(0, 0), rational(2, 3));

        let star = WeightedGraph::parse(r#"{"alpha": [1, 3], "beta": [[0, 1], [1, 0]]}"#).unwrap();
        assert_eq!(star.total_weight(), rational(4, 1));

        let k1 = WeightedGraph::parse(r#"{"alpha": ["1"], "beta": [["0"]]}"#).unwrap();
        assert_eq!(k1, Graph::complete(1).as_weighted());

        let dec = WeightedGraph::parse(r#"{"alpha": ["0.5", "1/2"], "beta": [["0.93", "0"], ["0", "1"]]}"#).unwrap();
        assert_eq!(*dec.beta(0, 0), rational(93, 100));
        assert_eq!(dec.alpha()[0], dec.alpha()[1]);
    }

    #[test]
    fn weighted_validation() {
        assert!(WeightedGraph::parse(r#"{"alpha": ["1","1"], "beta": [["0","1/2"],["1/3","0"]]}"#).is_err());
        assert!(WeightedGraph::parse(r#"{"alpha": ["1"], "beta": [["3/2"]]}"#).is_err());
        assert!(WeightedGraph::parse(r#"{"alpha": ["0"], "beta": [["0"]]}"#).is_err());
        assert!(WeightedGraph::parse(r#"{"alpha": ["-1"], "beta": [["0"]]}"#).is_err());
        assert!(WeightedGraph::parse(r#"{"beta": [["0"]]}"#).is_err());
    }

    #[test]
    fn weighted_round_trip() {
        let g = WeightedGraph::from_ratios(&[(1, 2), (3, 7)], &[vec![(0, 1), (2, 3)], vec![(2, 3), (1, 1)]]).unwrap();
        let text = g.serialize();
        assert!(text.contains("\"1/2\""));
        assert_eq!(WeightedGraph::parse(&text).unwrap(), g);
    }

    #[test]
    fn as_weighted_examples() {
        let k2 = Graph::complete(2).as_weighted();
        assert_eq!(k2.alpha(), &[rational(1, 1), rational(1, 1)]);
        assert_eq!(*k2.beta(0, 1), rational(1, 1));
        assert_eq!(*k2.beta(0, 0), rational(0, 1));
        let c4 = Graph::cycle(4).as_weighted();
        assert_eq!(c4.total_weight(), rational(4, 1));
        assert_eq!(*c4.beta(0, 2), rational(0, 1));
    }

    #[test]
    fn blow_up_examples() {
        let k22 = Graph::complete(2).blow_up(2).unwrap();
        assert_eq!(k22.edge_count(), 4);
        assert!((0..4).all(|u| k22.degree(u) == 2));
        assert!(!k22.has_edge(0, 1) && !k22.has_edge(2, 3));

        let g = Graph::cycle(5);
        assert_eq!(g.blow_up(1).unwrap(), g);

        let k222 = Graph::complete(3).blow_up(2).unwrap();
        assert_eq!(k222.edge_count(), 12);
        for u in 0..6 {
            for v in 0..6 {
                assert_eq!(k222.has_edge(u, v), u / 2 != v / 2);
            }
        }
        assert!(Graph::complete(2).blow_up(0).is_err());
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut g = Graph::empty(n);
                let mut it = bits.into_iter();
                for u in 0..n {
                    for v in u + 1..n {
                        if it.next().unwrap() {
                            g.set_edge(u, v);
                        }
                    }
                }
                g
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn graph_text_round_trip(g in arb_graph(9)) {
            prop_assert_eq!(Graph::parse(&g.serialize()).unwrap(), g);
        }
    }

    proptest! {
        #[test]
        fn blow_up_composes(g in arb_graph(6), a in 1usize..=3, b in 1usize..=3) {
            let twice = g.blow_up(a).unwrap().blow_up(b).unwrap();
            let once = g.blow_up(a * b).unwrap();
            // (u*a + i)*b + j  corresponds to  u*(ab) + (i*b + j): identical block order.
            prop_assert_eq!(twice, once);
        }
    }
}
