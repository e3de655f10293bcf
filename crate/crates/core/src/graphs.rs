//! Grassmann, q-Kneser and Johnson graphs with deterministic vertex order.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gfarith::Field;
use crate::projlinalg::{
    enumerate_subspaces, enumerate_subspaces_capped, gaussian_binomial, intersect_dim, LinalgError,
    Subspace,
};

/// Vertex count up to which adjacency is stored as a packed bit matrix.
pub const DENSE_ADJACENCY_LIMIT: usize = 1 << 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertices have different parameters")]
    ParamMismatch,
    #[error("{0:?} is not an m-subset of 1..=n")]
    BadSubset(Vec<u32>),
    #[error("bad dimensions n={n}, m={m}")]
    BadDim { n: usize, m: usize },
    #[error("graph with {count} vertices exceeds the cap {cap}")]
    SizeLimitExceeded { count: BigUint, cap: u64 },
    #[error("edge ({0}, {1}) is out of range or a loop")]
    BadEdge(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Grassmann,
    Qkneser,
    Johnson,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Vertex {
    Subspace(Subspace),
    Set(Vec<u32>),
    Index(usize),
}

impl Vertex {
    pub fn as_subspace(&self) -> Option<&Subspace> {
        match self {
            Vertex::Subspace(s) => Some(s),
            _ => None,
        }
    }

    pub fn key(&self) -> String {
        match self {
            Vertex::Subspace(s) => s.code_string(),
            Vertex::Set(a) => a.iter().join(","),
            Vertex::Index(i) => i.to_string(),
        }
    }
}

/// Symmetric 0/1 matrix packed into `u64` words, one padded row per vertex.
#[derive(Debug, Clone)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> BitMatrix {
        let words = n.div_ceil(64);
        BitMatrix { n, words, bits: vec![0; n * words] }
    }

    fn from_rows(n: usize, rows: Vec<Vec<u64>>) -> BitMatrix {
        let words = n.div_ceil(64);
        BitMatrix { n, words, bits: rows.into_iter().flatten().collect() }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[derive(Debug, Clone)]
enum Adjacency {
    Dense(BitMatrix),
    OnDemand,
}

/// An immutable graph whose vertex `i` is the `i`-th item of a fixed enumeration.
#[derive(Debug, Clone)]
pub struct GraphHandle {
    family: Family,
    q: Option<u32>,
    n: usize,
    m: usize,
    vertices: Vec<Vertex>,
    field: Option<Field>,
    adjacency: Adjacency,
    index: HashMap<Vertex, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub family: Family,
    pub q: Option<u32>,
    pub n: usize,
    pub m: usize,
    pub vertices: usize,
    pub edges: u64,
    pub regular_degree: Option<usize>,
}

pub fn grassmann_adjacent(field: &Field, a: &Subspace, b: &Subspace) -> Result<bool, GraphError> {
    if a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
        return Err(GraphError::ParamMismatch);
    }
    Ok(a != b && intersect_dim(field, a, b)? + 1 == a.dim())
}

pub fn kneser_adjacent(field: &Field, a: &Subspace, b: &Subspace) -> Result<bool, GraphError> {
    if a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
        return Err(GraphError::ParamMismatch);
    }
    Ok(a.dim() > 0 && intersect_dim(field, a, b)? == 0)
}

fn check_subset(a: &[u32], n: usize, m: usize) -> Result<(), GraphError> {
    let sorted_distinct = a.windows(2).all(|w| w[0] < w[1]);
    if a.len() != m || !sorted_distinct || a.iter().any(|&x| x == 0 || x as usize > n) {
        return Err(GraphError::BadSubset(a.to_vec()));
    }
    Ok(())
}

/// Adjacency in `J(n, m)`; subsets are sorted lists of elements of `1..=n`.
pub fn johnson_adjacent(a: &[u32], b: &[u32], n: usize) -> Result<bool, GraphError> {
    let m = a.len();
    check_subset(a, n, m)?;
    check_subset(b, n, m)?;
    let common = a.iter().filter(|x| b.contains(x)).count();
    Ok(m > 0 && common + 1 == m)
}

impl GraphHandle {
    pub fn grassmann(field: &Field, n: usize, m: usize, cap: u64) -> Result<GraphHandle, GraphError> {
        let vertices = enumerate_capped(field, n, m, cap)?;
        Ok(Self::from_subspaces(Family::Grassmann, field, n, m, vertices))
    }

    pub fn qkneser(field: &Field, n: usize, m: usize, cap: u64) -> Result<GraphHandle, GraphError> {
        let vertices = enumerate_capped(field, n, m, cap)?;
        Ok(Self::from_subspaces(Family::Qkneser, field, n, m, vertices))
    }

    pub fn johnson(n: usize, m: usize, cap: u64) -> Result<GraphHandle, GraphError> {
        if m == 0 || m > n {
            return Err(GraphError::BadDim { n, m });
        }
        let count = binomial(n as u64, m as u64);
        if count > cap as u128 {
            return Err(GraphError::SizeLimitExceeded { count: BigUint::from(count), cap });
        }
        let vertices: Vec<Vertex> = (1..=n as u32).combinations(m).map(Vertex::Set).collect();
        let adj = |a: &Vertex, b: &Vertex| match (a, b) {
            (Vertex::Set(x), Vertex::Set(y)) => johnson_adjacent(x, y, n).expect("valid subsets"),
            _ => unreachable!(),
        };
        let adjacency = materialize(&vertices, adj);
        Ok(Self::assemble(Family::Johnson, None, n, m, vertices, None, adjacency))
    }

    /// A q-Kneser or Grassmann graph induced on the given `m`-subspaces of `F_q^n`.
    pub fn from_subspaces(
        family: Family,
        field: &Field,
        n: usize,
        m: usize,
        subspaces: Vec<Subspace>,
    ) -> GraphHandle {
        assert!(matches!(family, Family::Grassmann | Family::Qkneser));
        let vertices: Vec<Vertex> = subspaces.into_iter().map(Vertex::Subspace).collect();
        let adjacency = if vertices.len() <= DENSE_ADJACENCY_LIMIT {
            materialize(&vertices, |a, b| subspace_adjacent(family, field, a, b))
        } else {
            Adjacency::OnDemand
        };
        Self::assemble(family, Some(field.order()), n, m, vertices, Some(field.clone()), adjacency)
    }

    /// A plain graph on `0..n` given by its edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<GraphHandle, GraphError> {
        let mut bits = BitMatrix::new(n);
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(GraphError::BadEdge(a, b));
            }
            bits.set(a, b);
            bits.set(b, a);
        }
        let vertices = (0..n).map(Vertex::Index).collect();
        Ok(Self::assemble(Family::Custom, None, n, 0, vertices, None, Adjacency::Dense(bits)))
    }

    fn assemble(
        family: Family,
        q: Option<u32>,
        n: usize,
        m: usize,
        vertices: Vec<Vertex>,
        field: Option<Field>,
        adjacency: Adjacency,
    ) -> GraphHandle {
        let index = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        GraphHandle { family, q, n, m, vertices, field, adjacency, index }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn q(&self) -> Option<u32> {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> Option<&Field> {
        self.field.as_ref()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn index_of_subspace(&self, s: &Subspace) -> Option<usize> {
        self.index_of(&Vertex::Subspace(s.clone()))
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        match &self.adjacency {
            Adjacency::Dense(bits) => bits.get(i, j),
            Adjacency::OnDemand => {
                let field = self.field.as_ref().expect("on-demand graphs carry a field");
                subspace_adjacent(self.family, field, &self.vertices[i], &self.vertices[j])
            }
        }
    }

    /// Packed adjacency, computing it if the graph stores only a predicate.
    pub fn bit_matrix(&self) -> BitMatrix {
        match &self.adjacency {
            Adjacency::Dense(bits) => bits.clone(),
            Adjacency::OnDemand => {
                let field = self.field.as_ref().expect("on-demand graphs carry a field");
                match materialize(&self.vertices, |a, b| subspace_adjacent(self.family, field, a, b)) {
                    Adjacency::Dense(bits) => bits,
                    Adjacency::OnDemand => unreachable!(),
                }
            }
        }
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.adjacent(i, j)).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        match &self.adjacency {
            Adjacency::Dense(bits) => bits.row(i).iter().map(|w| w.count_ones() as usize).sum(),
            Adjacency::OnDemand => self.neighbors(i).len(),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.len()).into_par_iter().map(|i| self.degree(i)).collect()
    }

    pub fn edge_count(&self) -> u64 {
        self.degrees().iter().map(|&d| d as u64).sum::<u64>() / 2
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let degrees = self.degrees();
        let first = *degrees.first()?;
        degrees.iter().all(|&d| d == first).then_some(first)
    }

    pub fn summary(&self) -> GraphSummary {
        let degrees = self.degrees();
        let regular_degree = match degrees.first() {
            Some(&d) if degrees.iter().all(|&x| x == d) => Some(d),
            _ => None,
        };
        GraphSummary {
            family: self.family,
            q: self.q,
            n: self.n,
            m: self.m,
            vertices: self.len(),
            edges: degrees.iter().map(|&d| d as u64).sum::<u64>() / 2,
            regular_degree,
        }
    }
}

fn enumerate_capped(field: &Field, n: usize, m: usize, cap: u64) -> Result<Vec<Subspace>, GraphError> {
    match enumerate_subspaces_capped(field, n, m, cap) {
        Ok(it) => Ok(it.collect()),
        Err(LinalgError::EnumerationCapExceeded { count, cap }) => Err(GraphError::SizeLimitExceeded { count, cap }),
        Err(e) => Err(e.into()),
    }
}

fn subspace_adjacent(family: Family, field: &Field, a: &Vertex, b: &Vertex) -> bool {
    let (Some(a), Some(b)) = (a.as_subspace(), b.as_subspace()) else {
        unreachable!("subspace graph with non-subspace vertex");
    };
    match family {
        Family::Grassmann => grassmann_adjacent(field, a, b),
        Family::Qkneser => kneser_adjacent(field, a, b),
        _ => unreachable!(),
    }
    .expect("vertices share parameters")
}

fn materialize(vertices: &[Vertex], adj: impl Fn(&Vertex, &Vertex) -> bool + Sync) -> Adjacency {
    let n = vertices.len();
    if n > DENSE_ADJACENCY_LIMIT {
        return Adjacency::OnDemand;
    }
    let words = n.div_ceil(64);
    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0u64; words];
            for j in 0..n {
                if i != j && adj(&vertices[i], &vertices[j]) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    Adjacency::Dense(BitMatrix::from_rows(n, rows))
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Degree of every vertex of `J_q(n, m)`: `q [m]_q [n-m]_q`.
pub fn valency(q: u64, n: u64, m: u64) -> Result<BigUint, GraphError> {
    if m == 0 || m >= n {
        return Err(GraphError::BadDim { n: n as usize, m: m as usize });
    }
    Ok(BigUint::from(q) * gaussian_binomial(m, 1, q) * gaussian_binomial(n - m, 1, q))
}

/// All subspaces of dimension `dim t + 1` containing `t`, in sorted order.
pub fn pencil_clique(field: &Field, t: &Subspace, n: usize) -> Result<Vec<Subspace>, GraphError> {
    if t.ambient_dim() != n || t.dim() >= n {
        return Err(GraphError::BadDim { n, m: t.dim() + 1 });
    }
    let mut out = BTreeSet::new();
    for point in enumerate_subspaces(field, n, 1)? {
        let v = &point.rows()[0];
        if !t.contains_vector(field, v) {
            out.insert(t.join(field, v));
        }
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfarith::FieldCtx;
    use crate::projlinalg::{rref, unit_vector, DEFAULT_ENUM_CAP};

    fn f(p: u64, e: u32) -> Field {
        FieldCtx::new(p, e, 1).unwrap().base().clone()
    }

    fn span(field: &Field, n: usize, idx: &[usize]) -> Subspace {
        let rows: Vec<Vec<u32>> = idx.iter().map(|&i| unit_vector(n, i)).collect();
        rref(field, &rows).unwrap()
    }

    #[test]
    fn adjacency_predicates() {
        let field = f(2, 1);
        let a = span(&field, 4, &[0, 1]);
        let b = span(&field, 4, &[1, 2]);
        let c = span(&field, 4, &[2, 3]);
        assert!(!grassmann_adjacent(&field, &a, &a).unwrap());
        assert!(grassmann_adjacent(&field, &a, &b).unwrap());
        assert!(!grassmann_adjacent(&field, &a, &c).unwrap());
        assert!(!kneser_adjacent(&field, &a, &a).unwrap());
        assert!(kneser_adjacent(&field, &a, &c).unwrap());
        let p = span(&field, 4, &[0]);
        let r = span(&field, 4, &[3]);
        assert!(kneser_adjacent(&field, &p, &r).unwrap());
        assert_eq!(grassmann_adjacent(&field, &a, &p).unwrap_err(), GraphError::ParamMismatch);
    }

    #[test]
    fn johnson_predicate() {
        assert!(johnson_adjacent(&[1, 2], &[1, 3], 4).unwrap());
        assert!(!johnson_adjacent(&[1, 2], &[3, 4], 4).unwrap());
        assert!(!johnson_adjacent(&[1, 2], &[1, 2], 4).unwrap());
        assert!(johnson_adjacent(&[1, 5], &[1, 2], 4).is_err());
        assert!(johnson_adjacent(&[2, 1], &[1, 3], 4).is_err());
    }

    #[test]
    fn grassmann_j2_4_2() {
        let g = GraphHandle::grassmann(&f(2, 1), 4, 2, DEFAULT_ENUM_CAP).unwrap();
        let s = g.summary();
        assert_eq!(s.vertices, 35);
        assert_eq!(s.regular_degree, Some(18));
        assert_eq!(s.edges, 35 * 18 / 2);
    }

    #[test]
    fn fano_lines_form_k7() {
        let g = GraphHandle::grassmann(&f(2, 1), 3, 2, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.regular_degree(), Some(6));
    }

    #[test]
    fn qkneser_k2_4_2_brute_force_degree() {
        let field = f(2, 1);
        let g = GraphHandle::qkneser(&field, 4, 2, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(g.len(), 35);
        // count lines disjoint from a line by point sets
        for i in 0..g.len() {
            let pts_i = g.vertex(i).as_subspace().unwrap().points(&field);
            let disjoint = (0..g.len())
                .filter(|&j| {
                    let pts_j = g.vertex(j).as_subspace().unwrap().points(&field);
                    !pts_i.iter().any(|p| pts_j.contains(p))
                })
                .count();
            assert_eq!(g.degree(i), disjoint);
        }
        // every 2-space of F_2^4 is disjoint from q^4 = 16 others
        assert_eq!(g.regular_degree(), Some(16));
    }

    #[test]
    fn johnson_graph_counts() {
        let g = GraphHandle::johnson(6, 3, 1000).unwrap();
        assert_eq!(g.len(), 20);
        assert_eq!(g.regular_degree(), Some(9));
        assert!(GraphHandle::johnson(6, 3, 10).is_err());
    }

    #[test]
    fn valency_formula() {
        assert_eq!(valency(2, 4, 2).unwrap(), BigUint::from(18u32));
        assert_eq!(valency(2, 4, 1).unwrap(), BigUint::from(14u32));
        assert!(valency(2, 4, 4).is_err());
        let g = GraphHandle::grassmann(&f(2, 1), 4, 1, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!(g.regular_degree(), Some(14));
        for (q, n, m) in [(3, 4, 2), (4, 4, 2), (2, 5, 3), (3, 4, 3)] {
            let (p, e) = crate::gfarith::prime_power(q).unwrap();
            let g = GraphHandle::grassmann(&f(p, e), n, m, DEFAULT_ENUM_CAP).unwrap();
            let d = valency(q, n as u64, m as u64).unwrap();
            assert_eq!(BigUint::from(g.regular_degree().unwrap()), d, "({q},{n},{m})");
        }
    }

    #[test]
    fn pencils() {
        let field = f(2, 1);
        let t = span(&field, 4, &[0]);
        let lines = pencil_clique(&field, &t, 4).unwrap();
        assert_eq!(lines.len(), 7);
        for (a, b) in lines.iter().tuple_combinations() {
            assert!(grassmann_adjacent(&field, a, b).unwrap());
        }
        // maximal: no other line of the space contains t
        let all: Vec<Subspace> = enumerate_subspaces(&field, 4, 2).unwrap().collect();
        let through = all.iter().filter(|s| s.contains(&field, &t)).count();
        assert_eq!(through, 7);

        let points = pencil_clique(&field, &Subspace::zero(4), 4).unwrap();
        assert_eq!(points.len(), 15);

        let f3 = f(3, 1);
        let t3 = span(&f3, 4, &[2]);
        assert_eq!(pencil_clique(&f3, &t3, 4).unwrap().len(), 13);
        assert!(pencil_clique(&f3, &Subspace::whole(4), 4).is_err());
    }

    #[test]
    fn custom_graph_edges() {
        let g = GraphHandle::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(g.regular_degree(), Some(2));
        assert!(g.adjacent(4, 0));
        assert!(GraphHandle::from_edges(3, &[(1, 1)]).is_err());
    }
}
