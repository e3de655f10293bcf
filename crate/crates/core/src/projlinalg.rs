//! Linear algebra over `F_q`: canonical subspaces, enumeration,
//! intersections, projective points and flattening between tower levels.

use std::fmt;

use itertools::{Combinations, Itertools};
use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gfarith::{to_digits, Field, FieldCtx, FieldElement, FieldError, Level};

/// Default refusal threshold for subspace enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("rows span the zero space")]
    ZeroSpace,
    #[error("the zero vector has no projective point")]
    ZeroVector,
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("row of length {found}, expected {expected}")]
    RowLength { expected: usize, found: usize },
    #[error("entry {0} is not a field element")]
    BadEntry(u32),
    #[error("input vectors are linearly dependent")]
    DependentInput,
    #[error("no {m}-dimensional subspaces of an {n}-dimensional space")]
    BadDim { n: usize, m: usize },
    #[error("enumeration of {count} subspaces exceeds the cap {cap}")]
    EnumerationCapExceeded { count: BigUint, cap: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Reduces `rows` to RREF in place, dropping zero rows. Returns pivot columns.
pub fn rref_in_place(field: &Field, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv(rows[r][col]).expect("nonzero pivot");
        if inv != 1 {
            for x in rows[r].iter_mut() {
                *x = field.mul(*x, inv);
            }
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row[col..ncols].iter_mut().zip(&pivot[col..ncols]) {
                *x = field.sub(*x, field.mul(factor, y));
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(field: &Field, rows: &[Vec<u32>]) -> usize {
    let mut work = rows.to_vec();
    rref_in_place(field, &mut work).len()
}

/// An `m`-dimensional subspace of `F_q^n`, stored as its unique RREF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient_dim: usize,
    rows: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Subspace {
        Subspace { ambient_dim: n, rows: Vec::new() }
    }

    pub fn whole(n: usize) -> Subspace {
        let rows = (0..n).map(|i| unit_vector(n, i)).collect();
        Subspace { ambient_dim: n, rows }
    }

    /// Row space of `rows`, which may be redundant.
    pub fn span(field: &Field, n: usize, rows: &[Vec<u32>]) -> Result<Subspace, LinalgError> {
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::RowLength { expected: n, found: row.len() });
            }
            if let Some(&bad) = row.iter().find(|&&x| !field.contains(x)) {
                return Err(LinalgError::BadEntry(bad));
            }
        }
        let mut work = rows.to_vec();
        rref_in_place(field, &mut work);
        Ok(Subspace { ambient_dim: n, rows: work })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("RREF rows are nonzero"))
            .collect()
    }

    pub fn contains_vector(&self, field: &Field, v: &[u32]) -> bool {
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        rank(field, &rows) == self.dim()
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, field: &Field, other: &Subspace) -> bool {
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        rank(field, &rows) == self.dim()
    }

    pub fn join(&self, field: &Field, v: &[u32]) -> Subspace {
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        rref_in_place(field, &mut rows);
        Subspace { ambient_dim: self.ambient_dim, rows }
    }

    /// All `q^m` vectors of the subspace. Vector `t` has coefficient digits
    /// of `t` (first basis row most significant).
    pub fn vectors(&self, field: &Field) -> Vec<Vec<u32>> {
        let q = field.order();
        let m = self.dim();
        let total = (q as u64).pow(m as u32);
        (0..total)
            .map(|t| {
                let mut coeffs = to_digits(t as u32, q, m);
                coeffs.reverse();
                self.combine(field, &coeffs)
            })
            .collect()
    }

    pub fn combine(&self, field: &Field, coeffs: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.ambient_dim];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(row) {
                *o = field.add(*o, field.mul(c, x));
            }
        }
        out
    }

    /// The `(q^m - 1)/(q - 1)` projective points of the subspace.
    pub fn points(&self, field: &Field) -> Vec<ProjectivePoint> {
        self.vectors(field)
            .into_iter()
            .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
            .map(|coords| ProjectivePoint { coords })
            .collect()
    }

    /// `m` rows of `n` integer codes, row-major, comma-separated.
    pub fn code_string(&self) -> String {
        self.rows.iter().flatten().join(",")
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code_string())
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.code_string())
    }
}

/// RREF of a nonzero set of rows.
pub fn rref(field: &Field, rows: &[Vec<u32>]) -> Result<Subspace, LinalgError> {
    let n = rows.first().ok_or(LinalgError::ZeroSpace)?.len();
    let s = Subspace::span(field, n, rows)?;
    if s.dim() == 0 {
        return Err(LinalgError::ZeroSpace);
    }
    Ok(s)
}

pub fn intersect_dim(field: &Field, a: &Subspace, b: &Subspace) -> Result<usize, LinalgError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(LinalgError::AmbientMismatch(a.ambient_dim, b.ambient_dim));
    }
    let mut rows = a.rows.clone();
    rows.extend_from_slice(&b.rows);
    Ok(a.dim() + b.dim() - rank(field, &rows))
}

pub fn unit_vector(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Number of `m`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: u64, m: u64, q: u64) -> BigUint {
    if m > n {
        return BigUint::default();
    }
    let q = BigUint::from(q);
    let one = BigUint::one();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..m {
        num *= q.pow((n - i) as u32) - &one;
        den *= q.pow((i + 1) as u32) - &one;
    }
    num / den
}

/// `gaussian_binomial` narrowed to `u64`; panics on overflow.
pub fn gaussian_binomial_u64(n: u64, m: u64, q: u64) -> u64 {
    u64::try_from(gaussian_binomial(n, m, q)).expect("gaussian binomial exceeds u64")
}

/// Deterministic stream over the `m`-subspaces of `F_q^n`: pivot profiles
/// in lexicographic order, then free entries as a base-`q` counter whose
/// first free position (row-major) is the most significant digit.
pub struct SubspaceIter<'f> {
    field: &'f Field,
    n: usize,
    profiles: Combinations<std::ops::Range<usize>>,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    counter: u64,
    limit: u64,
}

impl<'f> SubspaceIter<'f> {
    fn load(&mut self, pivots: Vec<usize>) {
        self.free = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| (c + 1..self.n).filter(|j| !pivots.contains(j)).map(move |j| (r, j)))
            .collect();
        self.counter = 0;
        self.limit = (self.field.order() as u64).pow(self.free.len() as u32);
        self.pivots = pivots;
    }
}

impl Iterator for SubspaceIter<'_> {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        while self.counter >= self.limit {
            let next = self.profiles.next()?;
            self.load(next);
        }
        let q = self.field.order() as u64;
        let mut rows: Vec<Vec<u32>> = self.pivots.iter().map(|&c| unit_vector(self.n, c)).collect();
        let mut t = self.counter;
        for &(r, j) in self.free.iter().rev() {
            rows[r][j] = (t % q) as u32;
            t /= q;
        }
        self.counter += 1;
        Some(Subspace { ambient_dim: self.n, rows })
    }
}

pub fn enumerate_subspaces(field: &Field, n: usize, m: usize) -> Result<SubspaceIter<'_>, LinalgError> {
    if m == 0 || m > n {
        return Err(LinalgError::BadDim { n, m });
    }
    Ok(SubspaceIter {
        field,
        n,
        profiles: (0..n).combinations(m),
        pivots: Vec::new(),
        free: Vec::new(),
        counter: 0,
        limit: 0,
    })
}

/// Like [`enumerate_subspaces`], refusing when the count exceeds `cap`.
pub fn enumerate_subspaces_capped(
    field: &Field,
    n: usize,
    m: usize,
    cap: u64,
) -> Result<SubspaceIter<'_>, LinalgError> {
    let count = gaussian_binomial(n as u64, m as u64, field.order() as u64);
    if count > BigUint::from(cap) {
        return Err(LinalgError::EnumerationCapExceeded { count, cap });
    }
    enumerate_subspaces(field, n, m)
}

/// A nonzero vector scaled so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    coords: Vec<u32>,
}

impl ProjectivePoint {
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    /// Integer code with the first coordinate most significant.
    pub fn code(&self, q: u32) -> u64 {
        vector_code(&self.coords, q)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.coords.iter().join(","))
    }
}

/// Integer code of a vector, first coordinate most significant.
pub fn vector_code(v: &[u32], q: u32) -> u64 {
    v.iter().fold(0u64, |acc, &x| acc * q as u64 + x as u64)
}

pub fn normalize_projective(field: &Field, v: &[u32]) -> Result<ProjectivePoint, LinalgError> {
    let lead = *v.iter().find(|&&x| x != 0).ok_or(LinalgError::ZeroVector)?;
    let inv = field.inv(lead).expect("nonzero lead");
    Ok(ProjectivePoint { coords: v.iter().map(|&x| field.mul(inv, x)).collect() })
}

/// Coefficients of `a` over the next level down, constant term first.
pub fn flatten(ctx: &FieldCtx, a: FieldElement) -> Vec<FieldElement> {
    ctx.coeffs(a)
}

/// Coordinates of `a` over `F_p`, lower tower level first.
pub fn flatten_to_prime(ctx: &FieldCtx, a: FieldElement) -> Vec<u32> {
    let len = match a.level() {
        Level::Prime => 1,
        Level::Base => ctx.e(),
        Level::Top => ctx.e() * ctx.d(),
    } as usize;
    to_digits(a.code(), ctx.p(), len)
}

/// The `F_q`-span of top-field elements, or the `F_p`-span of middle-field
/// elements, as a subspace of flattened coordinate vectors.
pub fn element_span_to_subspace(ctx: &FieldCtx, xs: &[FieldElement]) -> Result<Subspace, LinalgError> {
    let level = xs.first().ok_or(LinalgError::ZeroSpace)?.level();
    let lower = level.below().ok_or(FieldError::LevelMismatch(level, Level::Base))?;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        if x.level() != level {
            return Err(FieldError::LevelMismatch(level, x.level()).into());
        }
        rows.push(flatten(ctx, x).iter().map(FieldElement::code).collect::<Vec<_>>());
    }
    let s = rref(ctx.field(lower), &rows)?;
    if s.dim() < xs.len() {
        return Err(LinalgError::DependentInput);
    }
    Ok(s)
}
