//! Partial spreads, spreads and line parallelisms.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::colorings::Coloring;
use crate::gfarith::Field;
use crate::projlinalg::{gaussian_binomial_u64, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpreadError {
    #[error("expected lines of F_q^{n}, found a {dim}-space of F_q^{ambient}")]
    DimMismatch { n: usize, dim: usize, ambient: usize },
    #[error("coloring is not a coloring of lines (m = {0})")]
    NotLines(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpreadVerdict {
    pub size: usize,
    pub points_covered: u64,
    pub is_partial_spread: bool,
    pub is_spread: bool,
}

/// Classifies a set of lines of `PG(n-1, q)` by counting how often each
/// projective point is covered.
pub fn classify_class(field: &Field, n: usize, lines: &[Subspace]) -> Result<SpreadVerdict, SpreadError> {
    let mut cover: HashMap<Vec<u32>, u32> = HashMap::new();
    for line in lines {
        if line.dim() != 2 || line.ambient_dim() != n {
            return Err(SpreadError::DimMismatch { n, dim: line.dim(), ambient: line.ambient_dim() });
        }
        for p in line.points(field) {
            *cover.entry(p.coords().to_vec()).or_default() += 1;
        }
    }
    let is_partial_spread = cover.values().all(|&c| c == 1);
    let total = gaussian_binomial_u64(n as u64, 1, field.order() as u64);
    let points_covered = cover.len() as u64;
    Ok(SpreadVerdict {
        size: lines.len(),
        points_covered,
        is_partial_spread,
        is_spread: is_partial_spread && points_covered == total,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParallelismSummary {
    pub classes: usize,
    pub spread_classes: usize,
    pub non_spread_classes: usize,
    pub is_parallelism: bool,
}

pub fn classify_coloring(c: &Coloring) -> Result<ParallelismSummary, SpreadError> {
    let g = c.graph();
    let field = match g.field() {
        Some(f) if g.m() == 2 => f,
        _ => return Err(SpreadError::NotLines(g.m())),
    };
    let mut spread_classes = 0;
    let classes = c.classes();
    for members in classes.values() {
        let lines: Vec<Subspace> = members
            .iter()
            .map(|&v| g.vertex(v).as_subspace().expect("subspace vertex").clone())
            .collect();
        if classify_class(field, g.n(), &lines)?.is_spread {
            spread_classes += 1;
        }
    }
    Ok(ParallelismSummary {
        classes: classes.len(),
        spread_classes,
        non_spread_classes: classes.len() - spread_classes,
        is_parallelism: spread_classes == classes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{moore_coloring, Method};
    use crate::gfarith::FieldCtx;
    use crate::graphs::GraphHandle;
    use crate::projlinalg::{intersect_dim, rref, unit_vector, DEFAULT_ENUM_CAP};
    use crate::oracle::greedy_dsatur;
    use itertools::Itertools;
    use std::sync::Arc;

    fn f2() -> Field {
        FieldCtx::new(2, 1, 1).unwrap().base().clone()
    }

    fn line(field: &Field, n: usize, a: usize, b: usize) -> Subspace {
        rref(field, &[unit_vector(n, a), unit_vector(n, b)]).unwrap()
    }

    #[test]
    fn single_and_overlapping_lines() {
        let field = f2();
        let v = classify_class(&field, 4, &[line(&field, 4, 0, 1)]).unwrap();
        assert!(v.is_partial_spread && !v.is_spread);
        assert_eq!(v.points_covered, 3);
        let whole = classify_class(&field, 2, &[line(&field, 2, 0, 1)]).unwrap();
        assert!(whole.is_spread);
        let v = classify_class(&field, 4, &[line(&field, 4, 0, 1), line(&field, 4, 1, 2)]).unwrap();
        assert!(!v.is_partial_spread);
        let point = rref(&field, &[unit_vector(4, 0)]).unwrap();
        assert!(classify_class(&field, 4, &[point]).is_err());
    }

    #[test]
    fn injective_coloring_has_no_spreads() {
        let field = f2();
        let g = Arc::new(GraphHandle::grassmann(&field, 4, 2, DEFAULT_ENUM_CAP).unwrap());
        let c = Coloring::new(g, Method::Custom, (0..35).collect(), 35).unwrap();
        let s = classify_coloring(&c).unwrap();
        assert_eq!(s.spread_classes, 0);
        assert!(!s.is_parallelism);
    }

    #[test]
    fn moore_j2_4_2_spread_summary() {
        let ctx = FieldCtx::new(2, 1, 4).unwrap();
        let g = Arc::new(GraphHandle::grassmann(ctx.base(), 4, 2, DEFAULT_ENUM_CAP).unwrap());
        let s = classify_coloring(&moore_coloring(g, &ctx).unwrap()).unwrap();
        assert_eq!(s.classes, 15);
        assert_eq!((s.spread_classes, s.non_spread_classes), (0, 15), "golden");
    }

    #[test]
    fn points_are_not_lines() {
        let field = f2();
        let g = Arc::new(GraphHandle::grassmann(&field, 4, 1, DEFAULT_ENUM_CAP).unwrap());
        let c = Coloring::new(g, Method::Custom, (0..15).collect(), 15).unwrap();
        assert_eq!(classify_coloring(&c).unwrap_err(), SpreadError::NotLines(1));
    }

    #[test]
    fn independent_sets_are_partial_spreads() {
        let field = f2();
        for n in [4, 5] {
            let g = Arc::new(GraphHandle::grassmann(&field, n, 2, DEFAULT_ENUM_CAP).unwrap());
            let (colors, _) = greedy_dsatur(&g);
            let c = Coloring::new(g.clone(), Method::Dsatur, colors.iter().map(|&c| c as u64).collect(), 0).unwrap();
            for members in c.classes().values() {
                let lines: Vec<Subspace> =
                    members.iter().map(|&v| g.vertex(v).as_subspace().unwrap().clone()).collect();
                let pairwise = lines.iter().tuple_combinations().all(|(a, b)| intersect_dim(&field, a, b).unwrap() == 0);
                assert!(pairwise);
                assert!(classify_class(&field, n, &lines).unwrap().is_partial_spread);
            }
        }
    }
}
