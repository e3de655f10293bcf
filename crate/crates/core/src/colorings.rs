//! Explicit colorings of Grassmann, q-Kneser and Johnson graphs, and a
//! verifier producing [`ColoringReport`]s.
//!
//! * Moore coloring: an `m`-space of `F_q^n ≅ F_{q^n}` gets the projective
//!   class of the Moore determinant of any of its bases.
//! * Hawtin coloring (`q = 2^e`, `n` even, lines only): a line of
//!   `V = F_{q^(n-1)} × F_q` is sent to an `e`-space of `F_2^((n-1)e)` by the
//!   map `g`, then colored by a point-pencil coloring of the binary Kneser
//!   graph.
//! * Point-pencil coloring of `K_q(N, m)`: the least nonzero vector of
//!   `s ∩ span(e_1, ..., e_{N-m+1})`.
//! * Johnson sum coloring: element sum mod `n`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gfarith::{from_digits, prime_power, to_digits, Field, FieldCtx, FieldElement, FieldError, Level};
use crate::graphs::{johnson_adjacent, Family, GraphError, GraphHandle, Vertex};
use crate::projlinalg::{
    gaussian_binomial_u64, normalize_projective, rank, vector_code, LinalgError, ProjectivePoint, Subspace,
};
use crate::spreads::{classify_class, classify_coloring, ParallelismSummary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("q = {0} is not a power of two")]
    OddCharacteristic(u64),
    #[error("n = {0} must be even and at least 2")]
    OddN(usize),
    #[error("the two vectors are linearly dependent")]
    DependentPair,
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("coloring does not apply to this graph: {0}")]
    WrongGraph(String),
    #[error("expected {expected} colors, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Moore,
    Hawtin,
    KneserPoint,
    JohnsonSum,
    Dsatur,
    Custom,
}

/// A total map from vertex indices to color identifiers.
#[derive(Debug, Clone)]
pub struct Coloring {
    method: Method,
    graph: Arc<GraphHandle>,
    color_of: Vec<u64>,
    palette_bound: u64,
}

impl Coloring {
    pub fn new(
        graph: Arc<GraphHandle>,
        method: Method,
        color_of: Vec<u64>,
        palette_bound: u64,
    ) -> Result<Coloring, ColoringError> {
        if color_of.len() != graph.len() {
            return Err(ColoringError::WrongLength { expected: graph.len(), found: color_of.len() });
        }
        Ok(Coloring { method, graph, color_of, palette_bound })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn graph(&self) -> &GraphHandle {
        &self.graph
    }

    pub fn colors(&self) -> &[u64] {
        &self.color_of
    }

    pub fn color(&self, v: usize) -> u64 {
        self.color_of[v]
    }

    pub fn palette_bound(&self) -> u64 {
        self.palette_bound
    }

    /// Vertex lists keyed by color, in increasing color order.
    pub fn classes(&self) -> BTreeMap<u64, Vec<usize>> {
        let mut out: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (v, &c) in self.color_of.iter().enumerate() {
            out.entry(c).or_default().push(v);
        }
        out
    }

    pub fn colors_used(&self) -> usize {
        self.classes().len()
    }

    /// Dense renumbering `0..colors_used` in increasing color-code order.
    pub fn dense(&self) -> Vec<usize> {
        let rank: BTreeMap<u64, usize> =
            self.classes().keys().enumerate().map(|(i, &c)| (c, i)).collect();
        self.color_of.iter().map(|c| rank[c]).collect()
    }

    /// `(vertex_index, vertex_rref, color_code)` rows.
    pub fn csv_rows(&self) -> Vec<(usize, String, u64)> {
        self.graph
            .vertices()
            .iter()
            .zip(&self.color_of)
            .enumerate()
            .map(|(i, (v, &c))| (i, v.key(), c))
            .collect()
    }
}

/// Top-field element with coefficient vector `row` over `F_q`.
pub fn lift_row(ctx: &FieldCtx, row: &[u32]) -> u32 {
    from_digits(row, ctx.q())
}

/// Moore-determinant color of an `m`-space of `F_q^d`, identified with `F_{q^d}`.
pub fn moore_color(ctx: &FieldCtx, s: &Subspace) -> Result<ProjectivePoint, ColoringError> {
    let d = ctx.d() as usize;
    if s.ambient_dim() != d || s.dim() == 0 {
        return Err(ColoringError::WrongGraph(format!(
            "{}-space of F_q^{} under an extension of degree {d}",
            s.dim(),
            s.ambient_dim()
        )));
    }
    moore_color_of_basis(ctx, s.rows())
}

/// Moore color computed from an arbitrary basis given as coordinate rows.
pub fn moore_color_of_basis(ctx: &FieldCtx, basis: &[Vec<u32>]) -> Result<ProjectivePoint, ColoringError> {
    let xs: Vec<FieldElement> = basis
        .iter()
        .map(|r| ctx.element(Level::Top, lift_row(ctx, r)))
        .collect::<Result<_, _>>()?;
    let det = ctx.moore_det(&xs)?;
    let coords = to_digits(det.code(), ctx.q(), ctx.d() as usize);
    normalize_projective(ctx.base(), &coords).map_err(|_| ColoringError::Linalg(LinalgError::DependentInput))
}

/// Point-pencil color of an `m`-space `s` of `F_q^N`: the least nonzero
/// vector of `s ∩ span(e_1, ..., e_{N-m+1})`, first coordinate most significant.
pub fn kneser_point_color(field: &Field, s: &Subspace, m: usize) -> ProjectivePoint {
    let n = s.ambient_dim();
    assert!(s.dim() == m && m >= 1 && n >= m, "bad point-pencil parameters");
    let q = field.order();
    let best = s
        .vectors(field)
        .into_iter()
        .filter(|v| v[n - m + 1..].iter().all(|&x| x == 0) && v.iter().any(|&x| x != 0))
        .min_by_key(|v| vector_code(v, q))
        .expect("an m-space always meets an (N-m+1)-space nontrivially");
    normalize_projective(field, &best).expect("nonzero")
}

/// Color of a Johnson-graph vertex: the sum of its elements mod `n`.
pub fn johnson_sum_color(a: &[u32], n: usize) -> Result<u64, ColoringError> {
    // reuse the subset validation of the adjacency predicate
    johnson_adjacent(a, a, n)?;
    Ok(a.iter().map(|&x| x as u64).sum::<u64>() % n as u64)
}

/// A vector `(x, x_1)` of `V = F_{q^(n-1)} × F_q`, both parts as codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VVector {
    pub x: u32,
    pub x1: u32,
}

/// The image `E = {α²A + αB : α ∈ F_q}` of a line under `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EImage {
    /// `(x_1 y + y_1 x)^(q+1)`
    pub a: FieldElement,
    /// `x y^q + x^q y`
    pub b: FieldElement,
    /// Top-field codes of `α²A + αB`, indexed by the code of `α`.
    pub members: Vec<u32>,
    pub as_subspace: Subspace,
}

impl EImage {
    /// Members as `F_2` coordinate vectors.
    pub fn member_vectors(&self) -> Vec<Vec<u32>> {
        let len = self.as_subspace.ambient_dim();
        self.members.iter().map(|&c| to_digits(c, 2, len)).collect()
    }
}

/// The map `g(x̄, ȳ) = (x_1 y + y_1 x)^(q+1) + x y^q + x^q y` on
/// `V = F_{q^(n-1)} × F_q`, `q = 2^e`, `n` even.
///
/// Coordinates of `V` as `F_q^n`: the `n-1` polynomial-basis coefficients of
/// `x`, then `x_1`.
#[derive(Debug, Clone)]
pub struct HawtinMap {
    ctx: FieldCtx,
    n: usize,
}

impl HawtinMap {
    pub fn new(q: u64, n: usize) -> Result<HawtinMap, ColoringError> {
        let (p, e) = prime_power(q).ok_or(ColoringError::NotPrimePower(q))?;
        if p != 2 {
            return Err(ColoringError::OddCharacteristic(q));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(ColoringError::OddN(n));
        }
        let ctx = FieldCtx::new(2, e, (n - 1) as u32)?;
        Ok(HawtinMap { ctx, n })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn q(&self) -> u32 {
        self.ctx.q()
    }

    pub fn e(&self) -> usize {
        self.ctx.e() as usize
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `(n-1)e` of the binary space the images live in.
    pub fn image_dim(&self) -> usize {
        (self.n - 1) * self.e()
    }

    /// Size of the point-pencil palette on `K_2((n-1)e, e)`: `2^((n-2)e+1) - 1`.
    pub fn palette_bound(&self) -> u64 {
        gaussian_binomial_u64((self.image_dim() - self.e() + 1) as u64, 1, 2)
    }

    pub fn split(&self, v: &[u32]) -> VVector {
        assert_eq!(v.len(), self.n);
        VVector { x: lift_row(&self.ctx, &v[..self.n - 1]), x1: v[self.n - 1] }
    }

    pub fn join(&self, v: VVector) -> Vec<u32> {
        let mut out = to_digits(v.x, self.q(), self.n - 1);
        out.push(v.x1);
        out
    }

    #[inline]
    fn parts(&self, x: VVector, y: VVector) -> (u32, u32) {
        let top = self.ctx.top();
        let q = self.q() as u64;
        let t = top.add(top.mul(x.x1, y.x), top.mul(y.x1, x.x));
        let a = top.pow(t, q + 1);
        let b = top.add(top.mul(x.x, top.pow(y.x, q)), top.mul(top.pow(x.x, q), y.x));
        (a, b)
    }

    pub fn g(&self, x: VVector, y: VVector) -> u32 {
        let (a, b) = self.parts(x, y);
        self.ctx.top().add(a, b)
    }

    pub fn image(&self, x: VVector, y: VVector) -> Result<EImage, ColoringError> {
        if rank(self.ctx.base(), &[self.join(x), self.join(y)]) < 2 {
            return Err(ColoringError::DependentPair);
        }
        let top = self.ctx.top();
        let (a, b) = self.parts(x, y);
        let members: Vec<u32> = (0..self.q())
            .map(|alpha| top.add(top.mul(top.mul(alpha, alpha), a), top.mul(alpha, b)))
            .collect();
        let len = self.image_dim();
        let vectors: Vec<Vec<u32>> = members.iter().map(|&c| to_digits(c, 2, len)).collect();
        let as_subspace = Subspace::span(self.ctx.prime_field(), len, &vectors)?;
        debug_assert_eq!(as_subspace.dim(), self.e());
        Ok(EImage {
            a: self.ctx.element(Level::Top, a)?,
            b: self.ctx.element(Level::Top, b)?,
            members,
            as_subspace,
        })
    }

    /// Image of a line of `V`, computed from its two RREF rows.
    pub fn image_of(&self, s: &Subspace) -> Result<EImage, ColoringError> {
        if s.dim() != 2 || s.ambient_dim() != self.n {
            return Err(ColoringError::WrongGraph(format!("{}-space of F_q^{}", s.dim(), s.ambient_dim())));
        }
        self.image(self.split(&s.rows()[0]), self.split(&s.rows()[1]))
    }

    pub fn color(&self, s: &Subspace) -> Result<ProjectivePoint, ColoringError> {
        let image = self.image_of(s)?;
        Ok(kneser_point_color(self.ctx.prime_field(), &image.as_subspace, self.e()))
    }
}

fn graph_field(graph: &GraphHandle) -> Result<&Field, ColoringError> {
    graph.field().ok_or_else(|| ColoringError::WrongGraph("graph has no field".into()))
}

fn subspaces(graph: &GraphHandle) -> impl IndexedParallelIterator<Item = &Subspace> {
    graph.vertices().par_iter().map(|v| v.as_subspace().expect("subspace vertices"))
}

/// Moore coloring of `J_q(n, m)` with `ctx` of degree `d = n` over `F_q`.
pub fn moore_coloring(graph: Arc<GraphHandle>, ctx: &FieldCtx) -> Result<Coloring, ColoringError> {
    if graph.family() != Family::Grassmann || graph.q() != Some(ctx.q()) || graph.n() != ctx.d() as usize {
        return Err(ColoringError::WrongGraph("Moore coloring needs J_q(n, m) with F_{q^n}".into()));
    }
    let q = ctx.q();
    let colors = subspaces(&graph)
        .map(|s| moore_color(ctx, s).map(|p| p.code(q)))
        .collect::<Result<Vec<_>, _>>()?;
    let bound = gaussian_binomial_u64(graph.n() as u64, 1, q as u64);
    Coloring::new(graph, Method::Moore, colors, bound)
}

pub fn hawtin_coloring(graph: Arc<GraphHandle>, map: &HawtinMap) -> Result<Coloring, ColoringError> {
    if graph.family() != Family::Grassmann || graph.m() != 2 || graph.n() != map.n() || graph.q() != Some(map.q())
    {
        return Err(ColoringError::WrongGraph("Hawtin coloring needs J_q(n, 2) matching the map".into()));
    }
    let colors = subspaces(&graph)
        .map(|s| map.color(s).map(|p| p.code(2)))
        .collect::<Result<Vec<_>, _>>()?;
    Coloring::new(graph, Method::Hawtin, colors, map.palette_bound())
}

pub fn kneser_point_coloring(graph: Arc<GraphHandle>) -> Result<Coloring, ColoringError> {
    if graph.family() != Family::Qkneser {
        return Err(ColoringError::WrongGraph("point-pencil coloring needs K_q(N, m)".into()));
    }
    let field = graph_field(&graph)?;
    let (n, m, q) = (graph.n(), graph.m(), field.order());
    let colors = subspaces(&graph).map(|s| kneser_point_color(field, s, m).code(q)).collect();
    let bound = gaussian_binomial_u64((n - m + 1) as u64, 1, q as u64);
    Coloring::new(graph, Method::KneserPoint, colors, bound)
}

pub fn johnson_sum_coloring(graph: Arc<GraphHandle>) -> Result<Coloring, ColoringError> {
    if graph.family() != Family::Johnson {
        return Err(ColoringError::WrongGraph("sum coloring needs J(n, m)".into()));
    }
    let n = graph.n();
    let colors = graph
        .vertices()
        .iter()
        .map(|v| match v {
            Vertex::Set(a) => johnson_sum_color(a, n),
            _ => unreachable!(),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Coloring::new(graph, Method::JohnsonSum, colors, n as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphRef {
    pub family: Family,
    pub q: Option<u32>,
    pub n: usize,
    pub m: usize,
    pub vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub color: u64,
    /// Position in the dense renumbering.
    pub index: usize,
    pub size: usize,
    pub is_partial_spread: Option<bool>,
    pub is_spread: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringReport {
    pub method: Method,
    pub graph: GraphRef,
    pub valid: bool,
    pub colors_used: usize,
    pub palette_bound: u64,
    pub lower_bound: Option<u64>,
    pub classes: Vec<ClassReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_edge: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<ParallelismSummary>,
}

/// Clique-size lower bound on the chromatic number known for the family.
pub fn family_lower_bound(graph: &GraphHandle) -> Option<u64> {
    let (n, m) = (graph.n() as u64, graph.m() as u64);
    match graph.family() {
        Family::Grassmann if m < n => Some(gaussian_binomial_u64(n - m + 1, 1, graph.q()? as u64)),
        Family::Johnson if m < n => Some(n - m + 1),
        _ => None,
    }
}

/// First monochromatic edge `(i, j)`, `i < j`, in index order.
pub fn find_conflict(c: &Coloring) -> Option<[usize; 2]> {
    let g = c.graph();
    (0..g.len()).into_par_iter().find_map_first(|i| {
        (i + 1..g.len()).find(|&j| c.color(i) == c.color(j) && g.adjacent(i, j)).map(|j| [i, j])
    })
}

pub fn verify_coloring(c: &Coloring) -> ColoringReport {
    let g = c.graph();
    let witness_edge = find_conflict(c);
    let lines = g.m() == 2 && matches!(g.family(), Family::Grassmann | Family::Qkneser);
    let classes = c
        .classes()
        .into_iter()
        .enumerate()
        .map(|(index, (color, members))| {
            let verdict = lines.then(|| {
                let field = g.field().expect("subspace graphs carry a field");
                let class: Vec<Subspace> =
                    members.iter().map(|&v| g.vertex(v).as_subspace().expect("subspace").clone()).collect();
                classify_class(field, g.n(), &class).expect("all vertices are lines")
            });
            ClassReport {
                color,
                index,
                size: members.len(),
                is_partial_spread: verdict.as_ref().map(|v| v.is_partial_spread),
                is_spread: verdict.as_ref().map(|v| v.is_spread),
            }
        })
        .collect::<Vec<_>>();
    let parallelism = lines.then(|| classify_coloring(c).expect("line coloring"));
    ColoringReport {
        method: c.method(),
        graph: GraphRef { family: g.family(), q: g.q(), n: g.n(), m: g.m(), vertices: g.len() },
        valid: witness_edge.is_none(),
        colors_used: classes.len(),
        palette_bound: c.palette_bound(),
        lower_bound: family_lower_bound(g),
        classes,
        witness_edge,
        parallelism,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::pencil_clique;
    use crate::projlinalg::{enumerate_subspaces, rref, DEFAULT_ENUM_CAP};
    use itertools::Itertools;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::HashSet;

    fn grassmann(q: u64, n: usize, m: usize) -> (FieldCtx, Arc<GraphHandle>) {
        let (p, e) = prime_power(q).unwrap();
        let ctx = FieldCtx::new(p, e, n as u32).unwrap();
        let g = GraphHandle::grassmann(ctx.base(), n, m, DEFAULT_ENUM_CAP).unwrap();
        (ctx, Arc::new(g))
    }

    fn random_invertible(rng: &mut StdRng, field: &Field, m: usize) -> Vec<Vec<u32>> {
        loop {
            let mat: Vec<Vec<u32>> =
                (0..m).map(|_| (0..m).map(|_| rng.gen_range(0..field.order())).collect()).collect();
            if rank(field, &mat) == m {
                return mat;
            }
        }
    }

    #[test]
    fn moore_on_points_is_injective() {
        let (ctx, g) = grassmann(3, 3, 1);
        let c = moore_coloring(g.clone(), &ctx).unwrap();
        assert_eq!(c.colors_used(), g.len());
        for (i, v) in g.vertices().iter().enumerate() {
            let s = v.as_subspace().unwrap();
            assert_eq!(c.color(i), vector_code(&s.rows()[0], 3));
        }
    }

    #[test]
    fn moore_j2_4_2_is_proper_and_golden() {
        let (ctx, g) = grassmann(2, 4, 2);
        let c = moore_coloring(g, &ctx).unwrap();
        let report = verify_coloring(&c);
        assert!(report.valid);
        assert!(report.colors_used <= 15);
        assert!(report.colors_used >= 7);
        assert_eq!(report.palette_bound, 15);
        assert_eq!(report.lower_bound, Some(7));
        assert_eq!(report.colors_used, 15, "golden color count for J_2(4,2)");
    }

    #[test]
    fn moore_basis_independence() {
        let mut rng = StdRng::seed_from_u64(7);
        let (ctx, g) = grassmann(3, 4, 2);
        for v in g.vertices().iter().take(40) {
            let s = v.as_subspace().unwrap();
            let expect = moore_color(&ctx, s).unwrap();
            for _ in 0..20 {
                let mix = random_invertible(&mut rng, ctx.base(), 2);
                let basis: Vec<Vec<u32>> = mix.iter().map(|c| s.combine(ctx.base(), c)).collect();
                assert_eq!(moore_color_of_basis(&ctx, &basis).unwrap(), expect);
            }
        }
    }

    #[test]
    fn moore_rejects_mismatched_graph() {
        let (ctx, _) = grassmann(2, 4, 2);
        let (_, other) = grassmann(2, 5, 2);
        assert!(moore_coloring(other, &ctx).is_err());
    }

    #[test]
    fn kneser_point_color_examples() {
        let f2 = FieldCtx::new(2, 1, 1).unwrap().base().clone();
        let s = rref(&f2, &[vec![0, 1, 1, 0], vec![0, 0, 1, 0]]).unwrap();
        // s lies inside span(e1, e2, e3) for N = 4, m = 2
        assert_eq!(kneser_point_color(&f2, &s, 2).coords(), &[0, 0, 1, 0]);

        let k7 = Arc::new(GraphHandle::qkneser(&f2, 3, 1, DEFAULT_ENUM_CAP).unwrap());
        let c = kneser_point_coloring(k7).unwrap();
        let r = verify_coloring(&c);
        assert!(r.valid);
        assert_eq!(r.colors_used, 7);

        for (n, m) in [(4, 2), (6, 2)] {
            let g = Arc::new(GraphHandle::qkneser(&f2, n, m, DEFAULT_ENUM_CAP).unwrap());
            let c = kneser_point_coloring(g.clone()).unwrap();
            let r = verify_coloring(&c);
            assert!(r.valid, "K_2({n},{m})");
            let bound = (1u64 << (n - m + 1)) - 1;
            assert_eq!(c.palette_bound(), bound);
            assert!(r.colors_used as u64 <= bound);
        }
    }

    #[test]
    fn g_vanishes_on_the_diagonal() {
        for (q, n) in [(2, 4), (4, 4), (2, 6)] {
            let map = HawtinMap::new(q, n).unwrap();
            for x in 0..map.ctx().top().order() {
                for x1 in 0..map.q() {
                    let v = VVector { x, x1 };
                    assert_eq!(map.g(v, v), 0);
                }
            }
        }
    }

    #[test]
    fn hawtin_preconditions() {
        assert_eq!(HawtinMap::new(3, 4).unwrap_err(), ColoringError::OddCharacteristic(3));
        assert_eq!(HawtinMap::new(4, 5).unwrap_err(), ColoringError::OddN(5));
        assert_eq!(HawtinMap::new(6, 4).unwrap_err(), ColoringError::NotPrimePower(6));
        let map = HawtinMap::new(4, 4).unwrap();
        let x = VVector { x: 5, x1: 1 };
        let y = VVector { x: map.ctx().top().mul(5, 2), x1: 2 };
        assert_eq!(map.image(x, y).unwrap_err(), ColoringError::DependentPair);
    }

    /// Brute force: g over every pair of vectors in the span equals the set E.
    fn check_image(map: &HawtinMap, s: &Subspace) {
        let image = map.image_of(s).unwrap();
        let members: HashSet<u32> = image.members.iter().copied().collect();
        assert_eq!(members.len(), map.q() as usize);
        assert_eq!(image.members[0], 0);
        for (&a, &b) in members.iter().cartesian_product(members.iter()) {
            assert!(members.contains(&(a ^ b)));
        }
        let base = map.ctx().base();
        let vecs = s.vectors(base);
        for z in &vecs {
            for w in &vecs {
                assert!(members.contains(&map.g(map.split(z), map.split(w))));
            }
        }
        assert_eq!(image.as_subspace.dim(), map.e());
    }

    #[test]
    fn hawtin_image_is_an_e_space_exhaustive_q2() {
        let map = HawtinMap::new(2, 4).unwrap();
        let lines: Vec<Subspace> = enumerate_subspaces(map.ctx().base(), 4, 2).unwrap().collect();
        assert_eq!(lines.len(), 35);
        for s in &lines {
            check_image(&map, s);
        }
    }

    #[test]
    fn hawtin_image_sampled_q4() {
        let map = HawtinMap::new(4, 4).unwrap();
        for s in enumerate_subspaces(map.ctx().base(), 4, 2).unwrap().step_by(7) {
            check_image(&map, &s);
        }
    }

    #[test]
    fn hawtin_pencils_map_to_spreads() {
        let map = HawtinMap::new(2, 4).unwrap();
        let base = map.ctx().base();
        let f2 = map.ctx().prime_field();
        for point in enumerate_subspaces(base, 4, 1).unwrap() {
            let lines = pencil_clique(base, &point, 4).unwrap();
            let images: Vec<Subspace> = lines.iter().map(|l| map.image_of(l).unwrap().as_subspace).collect();
            for (a, b) in images.iter().tuple_combinations() {
                assert_eq!(crate::projlinalg::intersect_dim(f2, a, b).unwrap(), 0);
            }
            assert_eq!(images.iter().collect::<HashSet<_>>().len(), 7);
        }
    }

    #[test]
    fn g_is_onto_for_fixed_x() {
        let map = HawtinMap::new(2, 4).unwrap();
        let order = map.ctx().top().order();
        for x in 0..order {
            for x1 in 0..2 {
                if x == 0 && x1 == 0 {
                    continue;
                }
                let xv = VVector { x, x1 };
                let hit: HashSet<u32> =
                    (0..order).flat_map(|y| (0..2).map(move |y1| VVector { x: y, x1: y1 })).map(|y| map.g(xv, y)).collect();
                assert_eq!(hit.len(), order as usize);
            }
        }
    }

    #[test]
    fn hawtin_j2_4_uses_seven_spreads() {
        let map = HawtinMap::new(2, 4).unwrap();
        let g = Arc::new(GraphHandle::grassmann(map.ctx().base(), 4, 2, DEFAULT_ENUM_CAP).unwrap());
        let c = hawtin_coloring(g, &map).unwrap();
        let r = verify_coloring(&c);
        assert!(r.valid);
        assert_eq!(r.colors_used, 7);
        assert_eq!(r.palette_bound, 7);
        assert!(r.classes.iter().all(|k| k.size == 5 && k.is_spread == Some(true)));
        assert!(r.parallelism.unwrap().is_parallelism);
    }

    #[test]
    fn johnson_sum() {
        assert_eq!(johnson_sum_color(&[1, 2], 4).unwrap(), 3);
        assert_eq!(johnson_sum_color(&[1, 2, 3], 5).unwrap(), 1);
        assert!(johnson_sum_color(&[1, 9], 4).is_err());
        for n in 2..=7 {
            for m in 1..=3.min(n) {
                let g = Arc::new(GraphHandle::johnson(n, m, 1000).unwrap());
                let r = verify_coloring(&johnson_sum_coloring(g).unwrap());
                assert!(r.valid, "J({n},{m})");
            }
        }
    }

    #[test]
    fn verifier_reports_witness_and_injective() {
        let g = Arc::new(GraphHandle::grassmann(FieldCtx::new(2, 1, 1).unwrap().base(), 3, 2, 100).unwrap());
        let constant = Coloring::new(g.clone(), Method::Custom, vec![0; 7], 1).unwrap();
        let r = verify_coloring(&constant);
        assert!(!r.valid);
        assert_eq!(r.witness_edge, Some([0, 1]));
        let injective = Coloring::new(g.clone(), Method::Custom, (0..7).collect(), 7).unwrap();
        let r = verify_coloring(&injective);
        assert!(r.valid);
        assert_eq!(r.colors_used, 7);
        assert!(Coloring::new(g, Method::Custom, vec![0; 3], 1).is_err());
    }

    #[test]
    fn csv_rows_and_dense_renumbering() {
        let (ctx, g) = grassmann(2, 4, 2);
        let c = moore_coloring(g, &ctx).unwrap();
        let rows = c.csv_rows();
        assert_eq!(rows.len(), 35);
        assert_eq!(rows[0].1, "1,0,0,0,0,1,0,0");
        let dense = c.dense();
        assert_eq!(*dense.iter().max().unwrap() + 1, c.colors_used());
    }

    #[test]
    fn random_recombination_sanity() {
        let mut rng = StdRng::seed_from_u64(1);
        let (ctx, g) = grassmann(2, 5, 3);
        let s = g.vertex(17).as_subspace().unwrap();
        let expect = moore_color(&ctx, s).unwrap();
        for _ in 0..50 {
            let mix = random_invertible(&mut rng, ctx.base(), 3);
            let basis: Vec<Vec<u32>> = mix.iter().map(|c| s.combine(ctx.base(), c)).collect();
            assert_eq!(moore_color_of_basis(&ctx, &basis).unwrap(), expect);
        }
    }
}
