//! Ground-truth chromatic machinery for small graphs: DSATUR, maximum
//! clique and exact chromatic number by branch and bound.
//!
//! Everything here is deterministic and budgeted in search nodes, never in
//! wall-clock time.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::graphs::GraphHandle;

pub const DEFAULT_EXACT_CAP: usize = 64;
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {vertices} vertices, above the exact-search cap {cap}")]
    ExactCapExceeded { vertices: usize, cap: usize },
}

/// Adjacency rows as bitsets.
#[derive(Debug, Clone)]
struct Bits {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl Bits {
    fn of(g: &GraphHandle) -> Bits {
        let m = g.bit_matrix();
        Bits { n: g.len(), rows: (0..g.len()).map(|i| m.row(i).to_vec()).collect() }
    }

    #[inline]
    fn adj(&self, i: usize, j: usize) -> bool {
        (self.rows[i][j / 64] >> (j % 64)) & 1 == 1
    }

    fn degree(&self, i: usize) -> usize {
        self.rows[i].iter().map(|w| w.count_ones() as usize).sum()
    }

    fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.adj(i, j))
    }
}

/// DSATUR: repeatedly color the vertex with the most distinct neighbor
/// colors, ties broken by degree and then by lowest index.
pub fn greedy_dsatur(g: &GraphHandle) -> (Vec<usize>, usize) {
    let bits = Bits::of(g);
    let n = bits.n;
    let degree: Vec<usize> = (0..n).map(|i| bits.degree(i)).collect();
    let mut color = vec![usize::MAX; n];
    // seen[v] = bitset of colors present among v's neighbors
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut used = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v] == usize::MAX)
            .max_by(|&a, &b| {
                let sa = seen[a].iter().filter(|&&x| x).count();
                let sb = seen[b].iter().filter(|&&x| x).count();
                sa.cmp(&sb).then(degree[a].cmp(&degree[b])).then(b.cmp(&a))
            })
            .expect("uncolored vertex");
        let c = (0..).find(|&c| !seen[v].get(c).copied().unwrap_or(false)).unwrap();
        color[v] = c;
        used = used.max(c + 1);
        for u in bits.neighbors(v) {
            if seen[u].len() <= c {
                seen[u].resize(c + 1, false);
            }
            seen[u][c] = true;
        }
    }
    (color, used)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueResult {
    pub clique: Vec<usize>,
    pub size: usize,
    /// Search stopped on the node budget; `clique` is the best found.
    pub approximate: bool,
    pub nodes_expanded: u64,
}

/// Maximum clique by branch and bound with greedy-coloring bounds. `seed`
/// is a known clique used as the initial incumbent.
pub fn max_clique(g: &GraphHandle, budget: u64, seed: Option<&[usize]>) -> CliqueResult {
    let bits = Bits::of(g);
    let n = bits.n;
    let mut best: Vec<usize> = seed.map(<[usize]>::to_vec).unwrap_or_default();
    debug_assert!(best.iter().enumerate().all(|(i, &a)| best[i + 1..].iter().all(|&b| bits.adj(a, b))));
    if best.is_empty() && n > 0 {
        best.push(0);
    }
    // candidates ordered by degree descending, then index
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| bits.degree(b).cmp(&bits.degree(a)).then(a.cmp(&b)));

    let mut search = CliqueSearch { bits: &bits, best, nodes: 0, budget, hit: false };
    let mut current = Vec::new();
    search.expand(&mut current, order);
    let CliqueSearch { mut best, nodes, hit, .. } = search;
    best.sort_unstable();
    CliqueResult { size: best.len(), clique: best, approximate: hit, nodes_expanded: nodes }
}

struct CliqueSearch<'a> {
    bits: &'a Bits,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    hit: bool,
}

impl CliqueSearch<'_> {
    /// Greedy sequential coloring of `cands`; returns them sorted by color
    /// with the color bound of each.
    fn color_sort(&self, cands: &[usize]) -> Vec<(usize, usize)> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cands {
            match classes.iter_mut().find(|cl| cl.iter().all(|&u| !self.bits.adj(u, v))) {
                Some(cl) => cl.push(v),
                None => classes.push(vec![v]),
            }
        }
        classes
            .into_iter()
            .enumerate()
            .flat_map(|(k, cl)| cl.into_iter().map(move |v| (v, k + 1)))
            .collect()
    }

    fn expand(&mut self, current: &mut Vec<usize>, cands: Vec<usize>) {
        let mut ordered = self.color_sort(&cands);
        while let Some((v, bound)) = ordered.pop() {
            if current.len() + bound <= self.best.len() {
                return;
            }
            if self.nodes >= self.budget {
                self.hit = true;
                return;
            }
            self.nodes += 1;
            current.push(v);
            let next: Vec<usize> =
                ordered.iter().map(|&(u, _)| u).filter(|&u| self.bits.adj(v, u)).collect();
            if next.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            if self.hit {
                return;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChromaticBounds {
    pub lower: usize,
    pub upper: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<usize>,
    pub nodes_expanded: u64,
    pub budget_hit: bool,
    #[serde(skip)]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
    /// A coloring achieving `upper`.
    #[serde(skip)]
    pub coloring: Vec<usize>,
}

/// Exact chromatic number by iterative deepening on the number of colors.
///
/// Each `k`-colorability test is a DSATUR-ordered backtracking search that
/// grows color classes (independent sets), with a maximum clique precolored
/// and new colors opened only in increasing order.
pub fn exact_chromatic(
    g: &GraphHandle,
    budget: u64,
    cap: usize,
    seed_clique: Option<&[usize]>,
) -> Result<ChromaticBounds, OracleError> {
    if g.len() > cap {
        return Err(OracleError::ExactCapExceeded { vertices: g.len(), cap });
    }
    let start = Instant::now();
    let mut notes = Vec::new();
    if g.is_empty() {
        return Ok(ChromaticBounds {
            lower: 0,
            upper: 0,
            exact: Some(0),
            nodes_expanded: 0,
            budget_hit: false,
            notes,
            elapsed: start.elapsed(),
            coloring: Vec::new(),
        });
    }
    let clique = max_clique(g, budget, seed_clique);
    let mut nodes = clique.nodes_expanded;
    let mut budget_hit = clique.approximate;
    let mut lower = clique.size;
    notes.push(format!("clique of size {}", clique.size));
    let (mut best, mut upper) = greedy_dsatur(g);
    notes.push(format!("dsatur uses {upper} colors"));

    let bits = Bits::of(g);
    let mut exact = (lower == upper).then_some(upper);
    let mut k = lower;
    while exact.is_none() && k < upper {
        let remaining = budget.saturating_sub(nodes);
        let mut search = KColor::new(&bits, k, remaining);
        let found = search.run(&clique.clique);
        nodes += search.nodes;
        match found {
            Some(colors) => {
                best = colors;
                upper = k;
                exact = Some(k);
            }
            None if search.hit => {
                budget_hit = true;
                notes.push(format!("budget exhausted while testing {k} colors"));
                break;
            }
            None => {
                notes.push(format!("{k} colors refuted"));
                k += 1;
                lower = k;
            }
        }
    }
    if exact.is_none() && lower == upper {
        exact = Some(upper);
    }
    Ok(ChromaticBounds {
        lower,
        upper,
        exact,
        nodes_expanded: nodes,
        budget_hit,
        notes,
        elapsed: start.elapsed(),
        coloring: best,
    })
}

struct KColor<'a> {
    bits: &'a Bits,
    k: usize,
    color: Vec<usize>,
    // count[v][c] = neighbors of v currently colored c
    count: Vec<Vec<u32>>,
    sat: Vec<usize>,
    degree: Vec<usize>,
    nodes: u64,
    budget: u64,
    hit: bool,
}

const NONE: usize = usize::MAX;

impl<'a> KColor<'a> {
    fn new(bits: &'a Bits, k: usize, budget: u64) -> Self {
        let n = bits.n;
        KColor {
            bits,
            k,
            color: vec![NONE; n],
            count: vec![vec![0; k]; n],
            sat: vec![0; n],
            degree: (0..n).map(|i| bits.degree(i)).collect(),
            nodes: 0,
            budget,
            hit: false,
        }
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.color[v] = c;
        for u in 0..self.bits.n {
            if self.bits.adj(v, u) {
                if self.count[u][c] == 0 {
                    self.sat[u] += 1;
                }
                self.count[u][c] += 1;
            }
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.color[v];
        self.color[v] = NONE;
        for u in 0..self.bits.n {
            if self.bits.adj(v, u) {
                self.count[u][c] -= 1;
                if self.count[u][c] == 0 {
                    self.sat[u] -= 1;
                }
            }
        }
    }

    fn run(&mut self, clique: &[usize]) -> Option<Vec<usize>> {
        if clique.len() > self.k {
            return None;
        }
        for (c, &v) in clique.iter().enumerate() {
            self.assign(v, c);
        }
        let ok = self.solve(clique.len(), clique.len());
        ok.then(|| self.color.clone())
    }

    fn pick(&self) -> Option<usize> {
        (0..self.bits.n).filter(|&v| self.color[v] == NONE).max_by(|&a, &b| {
            self.sat[a].cmp(&self.sat[b]).then(self.degree[a].cmp(&self.degree[b])).then(b.cmp(&a))
        })
    }

    fn solve(&mut self, colored: usize, used: usize) -> bool {
        if colored == self.bits.n {
            return true;
        }
        let v = self.pick().expect("uncolored vertex remains");
        if self.sat[v] >= self.k {
            return false;
        }
        // colors beyond `used` are interchangeable, so only the first is tried
        for c in 0..self.k.min(used + 1) {
            if self.count[v][c] != 0 {
                continue;
            }
            if self.nodes >= self.budget {
                self.hit = true;
                return false;
            }
            self.nodes += 1;
            self.assign(v, c);
            if self.solve(colored + 1, used.max(c + 1)) {
                return true;
            }
            self.unassign(v);
            if self.hit {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfarith::FieldCtx;
    use crate::graphs::{pencil_clique, valency};
    use crate::projlinalg::{rref, unit_vector, DEFAULT_ENUM_CAP};
    use proptest::prelude::*;

    fn proper(g: &GraphHandle, colors: &[usize]) -> bool {
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| !g.adjacent(i, j) || colors[i] != colors[j]))
    }

    /// Tries every assignment in `k^|V|`.
    fn brute_colorable(g: &GraphHandle, k: usize) -> bool {
        let n = g.len();
        if n == 0 {
            return true;
        }
        if k == 0 {
            return false;
        }
        let total = (k as u64).pow(n as u32);
        (0..total).any(|mut t| {
            let colors: Vec<usize> = (0..n)
                .map(|_| {
                    let c = (t % k as u64) as usize;
                    t /= k as u64;
                    c
                })
                .collect();
            proper(g, &colors)
        })
    }

    fn brute_chromatic(g: &GraphHandle) -> usize {
        (0..=g.len()).find(|&k| brute_colorable(g, k)).unwrap()
    }

    fn cycle(n: usize) -> GraphHandle {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        GraphHandle::from_edges(n, &edges).unwrap()
    }

    fn complete(n: usize) -> GraphHandle {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        GraphHandle::from_edges(n, &edges).unwrap()
    }

    fn f2() -> crate::gfarith::Field {
        FieldCtx::new(2, 1, 1).unwrap().base().clone()
    }

    #[test]
    fn trivial_graphs() {
        let empty = GraphHandle::from_edges(6, &[]).unwrap();
        assert_eq!(greedy_dsatur(&empty).1, 1);
        assert_eq!(max_clique(&empty, 1000, None).size, 1);
        let k7 = complete(7);
        assert_eq!(greedy_dsatur(&k7).1, 7);
        assert_eq!(max_clique(&k7, 1000, None).size, 7);
        let c5 = cycle(5);
        let b = exact_chromatic(&c5, 10_000, 64, None).unwrap();
        assert_eq!(b.exact, Some(3));
        assert_eq!(exact_chromatic(&GraphHandle::from_edges(0, &[]).unwrap(), 10, 64, None).unwrap().exact, Some(0));
    }

    #[test]
    fn fano_lines() {
        let g = GraphHandle::grassmann(&f2(), 3, 2, DEFAULT_ENUM_CAP).unwrap();
        let (colors, used) = greedy_dsatur(&g);
        assert!(proper(&g, &colors));
        assert_eq!(used, 7);
        assert_eq!(exact_chromatic(&g, DEFAULT_NODE_BUDGET, 64, None).unwrap().exact, Some(7));
    }

    #[test]
    fn j2_4_2() {
        let field = f2();
        let g = GraphHandle::grassmann(&field, 4, 2, DEFAULT_ENUM_CAP).unwrap();
        let (colors, used) = greedy_dsatur(&g);
        assert!(proper(&g, &colors));
        assert!(used <= 19);
        let clique = max_clique(&g, DEFAULT_NODE_BUDGET, None);
        assert!(!clique.approximate);
        assert_eq!(clique.size, 7);

        let t = rref(&field, &[unit_vector(4, 0)]).unwrap();
        let pencil: Vec<usize> =
            pencil_clique(&field, &t, 4).unwrap().iter().map(|s| g.index_of_subspace(s).unwrap()).collect();
        let b = exact_chromatic(&g, DEFAULT_NODE_BUDGET, 64, Some(&pencil)).unwrap();
        assert_eq!(b.exact, Some(7));
        assert!(proper(&g, &b.coloring));
        assert_eq!(b.coloring.iter().max().unwrap() + 1, 7);
    }

    #[test]
    fn grassmann_bounds_sandwich() {
        for (p, e, n, m) in [(2, 1, 5, 2), (3, 1, 4, 2), (2, 1, 5, 3)] {
            let field = FieldCtx::new(p, e, 1).unwrap().base().clone();
            let g = GraphHandle::grassmann(&field, n, m, DEFAULT_ENUM_CAP).unwrap();
            let q = field.order() as u64;
            let (colors, used) = greedy_dsatur(&g);
            assert!(proper(&g, &colors));
            let d: u64 = valency(q, n as u64, m as u64).unwrap().try_into().unwrap();
            assert!(used as u64 <= d + 1);
            let clique = max_clique(&g, 200_000, None);
            let lower = crate::projlinalg::gaussian_binomial_u64((n - m + 1) as u64, 1, q);
            assert!(clique.size as u64 >= lower);
        }
    }

    #[test]
    fn cap_and_budget() {
        let g = GraphHandle::grassmann(&f2(), 5, 2, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(
            exact_chromatic(&g, 100, 64, None).unwrap_err(),
            OracleError::ExactCapExceeded { vertices: 155, cap: 64 }
        );
        let b = exact_chromatic(&g, 50, 200, None).unwrap();
        assert!(b.budget_hit);
        assert!(b.lower <= b.upper);
        assert_eq!(b.exact, None);
    }

    #[test]
    fn bounds_json_shape() {
        let b = exact_chromatic(&cycle(5), 10_000, 64, None).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, format!(r#"{{"lower":3,"upper":3,"exact":3,"nodes_expanded":{},"budget_hit":false}}"#, b.nodes_expanded));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn exact_matches_brute_force(n in 1usize..=9, mask in proptest::collection::vec(any::<bool>(), 36)) {
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .zip(mask.iter())
                .filter(|(_, &keep)| keep)
                .map(|(e, _)| e)
                .collect();
            let g = GraphHandle::from_edges(n, &edges).unwrap();
            let b = exact_chromatic(&g, DEFAULT_NODE_BUDGET, 64, None).unwrap();
            prop_assert_eq!(b.exact, Some(brute_chromatic(&g)));
            prop_assert!(proper(&g, &b.coloring));
            let (colors, used) = greedy_dsatur(&g);
            prop_assert!(proper(&g, &colors));
            prop_assert!(used >= b.exact.unwrap());
        }
    }
}
