//! Serializable reports behind the command-line tool: formula tables,
//! chromatic bounds for Grassmann graphs, and the induced Kneser subgraph
//! spanned by the images of the Hawtin map.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::colorings::{hawtin_coloring, moore_coloring, verify_coloring, ColoringError, HawtinMap};
use crate::gfarith::{prime_power, FieldCtx, FieldError};
use crate::graphs::{pencil_clique, valency, Family, GraphError, GraphHandle, GraphSummary};
use crate::oracle::{exact_chromatic, greedy_dsatur, max_clique, OracleError, DEFAULT_EXACT_CAP, DEFAULT_NODE_BUDGET};
use crate::projlinalg::{enumerate_subspaces_capped, gaussian_binomial, LinalgError, Subspace, DEFAULT_ENUM_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub enum_cap: u64,
    pub exact_cap: usize,
    pub node_budget: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { enum_cap: DEFAULT_ENUM_CAP, exact_cap: DEFAULT_EXACT_CAP, node_budget: DEFAULT_NODE_BUDGET }
    }
}

/// Failures split by how a caller should react: fix the input, or raise a cap.
#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("limit exceeded: {0}")]
    Cap(String),
}

impl From<FieldError> for ReportError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::SizeLimitExceeded { .. } => ReportError::Cap(e.to_string()),
            _ => ReportError::Config(e.to_string()),
        }
    }
}

impl From<LinalgError> for ReportError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::EnumerationCapExceeded { .. } => ReportError::Cap(e.to_string()),
            LinalgError::Field(f) => f.into(),
            _ => ReportError::Config(e.to_string()),
        }
    }
}

impl From<GraphError> for ReportError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::SizeLimitExceeded { .. } => ReportError::Cap(e.to_string()),
            GraphError::Linalg(l) => l.into(),
            _ => ReportError::Config(e.to_string()),
        }
    }
}

impl From<ColoringError> for ReportError {
    fn from(e: ColoringError) -> Self {
        match e {
            ColoringError::Field(f) => f.into(),
            ColoringError::Linalg(l) => l.into(),
            ColoringError::Graph(g) => g.into(),
            _ => ReportError::Config(e.to_string()),
        }
    }
}

impl From<OracleError> for ReportError {
    fn from(e: OracleError) -> Self {
        ReportError::Cap(e.to_string())
    }
}

fn big(n: u64, m: u64, q: u64) -> Result<u128, ReportError> {
    u128::try_from(gaussian_binomial(n, m, q)).map_err(|_| ReportError::Cap("value exceeds 128 bits".into()))
}

/// Splits `q` and checks `1 <= m < n`.
pub fn check_params(q: u64, n: usize, m: usize) -> Result<(u64, u32), ReportError> {
    let (p, e) = prime_power(q).ok_or_else(|| ReportError::Config(format!("q = {q} is not a prime power")))?;
    if m == 0 || m >= n {
        return Err(ReportError::Config(format!("requires 1 <= m < n, got n = {n}, m = {m}")));
    }
    Ok((p, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HawtinInfo {
    /// `binom(n-1, 1)_q`, the clique lower bound for lines.
    pub lower: u128,
    /// `2^((n-2)e+1) - 1`, colors available to the Hawtin coloring.
    pub palette: u128,
    /// `2 binom(n-1, 1)_q`; the palette is strictly below it.
    pub strict_bound: u128,
    pub twice_lower_minus_one: u128,
    pub palette_below_strict_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfoReport {
    pub q: u64,
    pub n: usize,
    pub m: usize,
    pub vertices: u128,
    pub valency: u128,
    pub lower: u128,
    pub upper: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hawtin: Option<HawtinInfo>,
}

/// Closed-form quantities for `J_q(n, m)`; no enumeration.
pub fn info(q: u64, n: usize, m: usize) -> Result<InfoReport, ReportError> {
    let (p, e) = check_params(q, n, m)?;
    let (nn, mm) = (n as u64, m as u64);
    let valency = u128::try_from(valency(q, nn, mm)?).map_err(|_| ReportError::Cap("valency exceeds 128 bits".into()))?;
    let hawtin = (p == 2 && m == 2 && n.is_multiple_of(2))
        .then(|| -> Result<HawtinInfo, ReportError> {
            let lower = big(nn - 1, 1, q)?;
            let palette = big((nn - 2) * e as u64 + 1, 1, 2)?;
            Ok(HawtinInfo {
                lower,
                palette,
                strict_bound: 2 * lower,
                twice_lower_minus_one: 2 * lower - 1,
                palette_below_strict_bound: palette < 2 * lower,
            })
        })
        .transpose()?;
    Ok(InfoReport {
        q,
        n,
        m,
        vertices: big(nn, mm, q)?,
        valency,
        lower: big(nn - mm + 1, 1, q)?,
        upper: big(nn, 1, q)?,
        hawtin,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsSummary {
    pub lower: usize,
    pub upper: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<usize>,
    pub nodes_expanded: u64,
    pub budget_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub graph: GraphSummary,
    pub formulas: InfoReport,
    pub pencil_clique: usize,
    pub clique: usize,
    pub clique_approximate: bool,
    pub greedy_colors: usize,
    pub moore_colors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hawtin_colors: Option<usize>,
    pub bounds: BoundsSummary,
}

/// Oracle bounds on `χ(J_q(n, m))` next to the closed-form values.
pub fn bounds(q: u64, n: usize, m: usize, exact: bool, caps: Caps) -> Result<BoundsReport, ReportError> {
    let formulas = info(q, n, m)?;
    let (p, e) = check_params(q, n, m)?;
    let ctx = FieldCtx::new(p, e, n as u32)?;
    let field = ctx.base();
    let graph = Arc::new(GraphHandle::grassmann(field, n, m, caps.enum_cap)?);

    let t = Subspace::span(field, n, &graph.vertex(0).as_subspace().expect("subspace").rows()[..m - 1])?;
    let pencil: Vec<usize> = pencil_clique(field, &t, n)?
        .iter()
        .map(|s| graph.index_of_subspace(s).expect("pencil lines are vertices"))
        .collect();

    let moore = verify_coloring(&moore_coloring(graph.clone(), &ctx)?);
    let hawtin_colors = match HawtinMap::new(q, n) {
        Ok(map) if m == 2 => Some(verify_coloring(&hawtin_coloring(graph.clone(), &map)?).colors_used),
        _ => None,
    };
    let (_, greedy) = greedy_dsatur(&graph);
    let clique = max_clique(&graph, caps.node_budget, Some(&pencil));
    let upper_known = [Some(greedy), Some(moore.colors_used), hawtin_colors].into_iter().flatten().min().unwrap();

    let summary = if exact {
        let b = exact_chromatic(&graph, caps.node_budget, caps.exact_cap, Some(&clique.clique))?;
        BoundsSummary {
            lower: b.lower,
            upper: b.upper.min(upper_known),
            exact: b.exact,
            nodes_expanded: b.nodes_expanded + clique.nodes_expanded,
            budget_hit: b.budget_hit,
        }
    } else {
        BoundsSummary {
            lower: clique.size,
            upper: upper_known,
            exact: (clique.size == upper_known && !clique.approximate).then_some(upper_known),
            nodes_expanded: clique.nodes_expanded,
            budget_hit: clique.approximate,
        }
    };
    Ok(BoundsReport {
        graph: graph.summary(),
        formulas,
        pencil_clique: pencil.len(),
        clique: clique.size,
        clique_approximate: clique.approximate,
        greedy_colors: greedy,
        moore_colors: moore.colors_used,
        hawtin_colors,
        bounds: summary,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedReport {
    pub q: u64,
    pub n: usize,
    pub e: usize,
    /// Ambient `K_2(kneser_n, kneser_m)` the images live in.
    pub kneser_n: usize,
    pub kneser_m: usize,
    pub source_lines: usize,
    pub image_vertices: usize,
    pub image_edges: u64,
    pub clique_lower: usize,
    pub clique_approximate: bool,
    pub greedy_upper: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<usize>,
    pub nodes_expanded: u64,
    /// `binom(n-1, 1)_q`, the lower bound for `χ(J_q(n, 2))`.
    pub grassmann_lower: u128,
    pub hawtin_colors_used: usize,
    pub hawtin_palette: u64,
}

/// Builds the subgraph of `K_2((n-1)e, e)` induced by all images of lines
/// of `V` under the Hawtin map and bounds its chromatic number.
pub fn induced(q: u64, n: usize, caps: Caps) -> Result<InducedReport, ReportError> {
    let map = HawtinMap::new(q, n)?;
    let base = map.ctx().base();
    let f2 = map.ctx().prime_field();
    let lines: Vec<Subspace> = enumerate_subspaces_capped(base, n, 2, caps.enum_cap)?.collect();
    let mut images = BTreeSet::new();
    for line in &lines {
        images.insert(map.image_of(line)?.as_subspace);
    }
    let images: Vec<Subspace> = images.into_iter().collect();
    let graph = GraphHandle::from_subspaces(Family::Qkneser, f2, map.image_dim(), map.e(), images);

    // lines through one point map to pairwise trivially meeting images
    let point = Subspace::span(base, n, &lines[0].rows()[..1])?;
    let seed: BTreeSet<usize> = pencil_clique(base, &point, n)?
        .iter()
        .map(|l| graph.index_of_subspace(&map.image_of(l).expect("line").as_subspace).expect("image vertex"))
        .collect();
    let seed: Vec<usize> = seed.into_iter().collect();

    let clique = max_clique(&graph, caps.node_budget, Some(&seed));
    let (_, greedy) = greedy_dsatur(&graph);
    let mut nodes = clique.nodes_expanded;
    let exact = if graph.len() <= caps.exact_cap {
        let b = exact_chromatic(&graph, caps.node_budget, caps.exact_cap, Some(&clique.clique))?;
        nodes += b.nodes_expanded;
        b.exact
    } else {
        None
    };

    let grassmann = Arc::new(GraphHandle::grassmann(base, n, 2, caps.enum_cap)?);
    let hawtin = verify_coloring(&hawtin_coloring(grassmann, &map)?);
    Ok(InducedReport {
        q,
        n,
        e: map.e(),
        kneser_n: map.image_dim(),
        kneser_m: map.e(),
        source_lines: lines.len(),
        image_vertices: graph.len(),
        image_edges: graph.edge_count(),
        clique_lower: clique.size,
        clique_approximate: clique.approximate,
        greedy_upper: greedy,
        exact,
        nodes_expanded: nodes,
        grassmann_lower: big(n as u64 - 1, 1, q)?,
        hawtin_colors_used: hawtin.colors_used,
        hawtin_palette: map.palette_bound(),
    })
}
