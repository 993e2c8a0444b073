//! Vertex colorings: proper-coloring checks, cheap bounds on χ and an exact
//! backtracking solver that produces a canonical (lexicographically least)
//! witness, so that two parties solving the same graph agree bit for bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Default refusal threshold for [`ChromaticSolver`].
pub const DEFAULT_MAX_ORDER: usize = 24;
/// The exact search works on 64-bit vertex and color masks.
pub const SOLVER_ORDER_LIMIT: usize = 64;
/// Above this order [`clique_lower`] falls back to a greedy clique.
pub const EXACT_CLIQUE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("coloring covers {actual} vertices, graph has {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("vertex {vertex} has color {color}, outside palette of size {palette}")]
    ColorOutOfPalette { vertex: usize, color: usize, palette: usize },
    #[error("graph of order {order} exceeds the solver limit of {max_order} vertices")]
    OrderGuard { order: usize, max_order: usize },
    #[error("graph is not {0}-colorable")]
    NotColorable(usize),
}

/// Vertex `v` (1-based) gets `colors[v - 1]`, a value in `0..palette`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<usize>,
    palette: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, palette: usize) -> Result<Self, ColoringError> {
        if let Some((v, &c)) = colors.iter().enumerate().find(|(_, &c)| c >= palette) {
            return Err(ColoringError::ColorOutOfPalette { vertex: v + 1, color: c, palette });
        }
        Ok(Self { colors, palette })
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn color_of(&self, vertex: usize) -> usize {
        self.colors[vertex - 1]
    }

    pub fn distinct_colors(&self) -> usize {
        let mut seen = vec![false; self.palette];
        self.colors.iter().for_each(|&c| seen[c] = true);
        seen.into_iter().filter(|&s| s).count()
    }

    /// Sizes of the nonempty color classes, largest first.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.palette];
        self.colors.iter().for_each(|&c| sizes[c] += 1);
        sizes.retain(|&s| s > 0);
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

pub fn is_proper(g: &Graph, c: &Coloring) -> Result<bool, ColoringError> {
    if c.len() != g.order() {
        return Err(ColoringError::LengthMismatch { expected: g.order(), actual: c.len() });
    }
    Ok(g.edges().all(|(i, j)| c.color_of(i) != c.color_of(j)))
}

/// Greedy DSATUR coloring: repeatedly colors the vertex with the most
/// distinctly colored neighbours, breaking ties by degree and then by lowest
/// label, using the smallest free color. The palette is the number of colors
/// used.
pub fn dsatur_upper(g: &Graph) -> Coloring {
    let m = g.order();
    let mut colors: Vec<Option<usize>> = vec![None; m];
    let mut neighbour_colors: Vec<Vec<bool>> = vec![vec![false; m]; m];
    let mut saturation = vec![0usize; m];
    let degree: Vec<usize> = (1..=m).map(|v| g.degree(v)).collect();

    for _ in 0..m {
        let v = (0..m)
            .filter(|&v| colors[v].is_none())
            .max_by(|&a, &b| saturation[a].cmp(&saturation[b]).then(degree[a].cmp(&degree[b])).then(b.cmp(&a)))
            .expect("an uncolored vertex remains");
        let c = (0..m).find(|&c| !neighbour_colors[v][c]).expect("m colors always suffice");
        colors[v] = Some(c);
        for u in 0..m {
            if g.adjacent(v, u) && !neighbour_colors[u][c] {
                neighbour_colors[u][c] = true;
                saturation[u] += 1;
            }
        }
    }
    let colors: Vec<usize> = colors.into_iter().map(|c| c.expect("all colored")).collect();
    let palette = colors.iter().max().map_or(0, |&c| c + 1);
    Coloring::new(colors, palette).expect("palette covers every color")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueBound {
    pub size: usize,
    /// 1-based labels of a complete subgraph of `size` vertices.
    pub vertices: Vec<usize>,
    /// False when the greedy fallback produced the witness.
    pub exact: bool,
}

pub fn clique_lower(g: &Graph) -> CliqueBound {
    if g.order() <= EXACT_CLIQUE_LIMIT {
        let adj: Vec<u64> = (0..g.order()).map(|v| g.neighbor_mask(v)).collect();
        let mut best = 0u64;
        bron_kerbosch(&adj, 0, (1u64 << g.order()) - 1, 0, &mut best);
        CliqueBound { size: best.count_ones() as usize, vertices: mask_members(best), exact: true }
    } else {
        let vertices = greedy_clique(g);
        CliqueBound { size: vertices.len(), vertices, exact: false }
    }
}

fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, best: &mut u64) {
    if p == 0 && x == 0 {
        if r.count_ones() > best.count_ones() {
            *best = r;
        }
        return;
    }
    if r.count_ones() + p.count_ones() <= best.count_ones() {
        return;
    }
    let pivot = iter_bits(p | x).max_by_key(|&u| (adj[u] & p).count_ones()).expect("p | x nonempty");
    for v in iter_bits(p & !adj[pivot]) {
        bron_kerbosch(adj, r | 1 << v, p & adj[v], x & adj[v], best);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

fn greedy_clique(g: &Graph) -> Vec<usize> {
    let m = g.order();
    let mut best: Vec<usize> = vec![1];
    for start in 0..m {
        let mut clique = vec![start];
        let mut cand: Vec<usize> = (0..m).filter(|&u| g.adjacent(start, u)).collect();
        while !cand.is_empty() {
            let pick = *cand
                .iter()
                .max_by(|&&a, &&b| {
                    let da = cand.iter().filter(|&&u| g.adjacent(a, u)).count();
                    let db = cand.iter().filter(|&&u| g.adjacent(b, u)).count();
                    da.cmp(&db).then(b.cmp(&a))
                })
                .expect("nonempty");
            clique.push(pick);
            cand.retain(|&u| u != pick && g.adjacent(pick, u));
        }
        if clique.len() > best.len() {
            clique.sort_unstable();
            best = clique.into_iter().map(|v| v + 1).collect();
        }
    }
    best
}

/// Brooks' bound, taken per connected component: Δ + 1 for complete graphs
/// and odd cycles, Δ otherwise.
pub fn brooks_bound(g: &Graph) -> usize {
    g.components()
        .iter()
        .map(|comp| {
            let s = comp.len();
            let delta = comp.iter().map(|&v| g.degree(v)).max().unwrap_or(0);
            let edges = comp.iter().map(|&v| g.degree(v)).sum::<usize>() / 2;
            let complete = edges == s * (s - 1) / 2;
            let odd_cycle = s >= 3 && s % 2 == 1 && comp.iter().all(|&v| g.degree(v) == 2);
            if complete || odd_cycle {
                delta + 1
            } else {
                delta
            }
        })
        .max()
        .unwrap_or(0)
}

/// Lexicographically least proper coloring with colors `0..k`, if any.
/// Order-`m` graphs with `m >= 1` are never 0-colorable.
///
/// # Panics
///
/// Panics on graphs above [`SOLVER_ORDER_LIMIT`] vertices.
pub fn is_k_colorable(g: &Graph, k: usize) -> Option<Coloring> {
    Search::new(g).canonical(k)
}

/// Whether any proper coloring with colors `0..k` exists. Cheaper than
/// [`is_k_colorable`] since no canonical witness is built.
pub fn has_k_coloring(g: &Graph, k: usize) -> bool {
    Search::new(g).feasible(k)
}

pub fn canonical_coloring(g: &Graph, n: usize) -> Result<Coloring, ColoringError> {
    if g.order() > SOLVER_ORDER_LIMIT {
        return Err(ColoringError::OrderGuard { order: g.order(), max_order: SOLVER_ORDER_LIMIT });
    }
    is_k_colorable(g, n).ok_or(ColoringError::NotColorable(n))
}

/// How the impossibility of an `(n - 1)`-coloring was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refutation {
    /// n = 1: no nonempty graph has a 0-coloring.
    EmptyPalette,
    /// A clique of size n was exhibited.
    Clique,
    /// Exhaustive search found no (n - 1)-coloring.
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaticCertificate {
    pub n: usize,
    /// Canonical coloring with palette `n`, using all `n` colors.
    pub witness: Coloring,
    pub infeasibility_checked: bool,
    pub refutation: Refutation,
}

/// Exact chromatic number with an order guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChromaticSolver {
    max_order: usize,
}

impl Default for ChromaticSolver {
    fn default() -> Self {
        Self { max_order: DEFAULT_MAX_ORDER }
    }
}

impl ChromaticSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Values above [`SOLVER_ORDER_LIMIT`] are clamped to it.
    pub fn with_max_order(max_order: usize) -> Self {
        Self { max_order: max_order.min(SOLVER_ORDER_LIMIT) }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn chromatic_number(&self, g: &Graph) -> Result<ChromaticCertificate, ColoringError> {
        if g.order() > self.max_order {
            return Err(ColoringError::OrderGuard { order: g.order(), max_order: self.max_order });
        }
        let lower = clique_lower(g).size.max(1);
        let upper = dsatur_upper(g).distinct_colors().min(brooks_bound(g)).max(lower);
        let search = Search::new(g);
        let n = (lower..=upper).find(|&k| search.feasible(k)).unwrap_or(upper);
        let witness = search.canonical(n).ok_or(ColoringError::NotColorable(n))?;
        let refutation = if n == 1 {
            Refutation::EmptyPalette
        } else if n == lower {
            Refutation::Clique
        } else {
            Refutation::Search
        };
        Ok(ChromaticCertificate { n, witness, infeasibility_checked: true, refutation })
    }
}

pub fn chromatic_number(g: &Graph) -> Result<ChromaticCertificate, ColoringError> {
    ChromaticSolver::default().chromatic_number(g)
}

fn iter_bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

fn mask_members(mask: u64) -> Vec<usize> {
    iter_bits(mask).map(|v| v + 1).collect()
}

fn lowest_bit(mask: u64) -> u64 {
    mask & mask.wrapping_neg()
}

/// Backtracking k-coloring over bitmask domains with forward checking.
///
/// Colors never used so far are interchangeable, so only the smallest of them
/// is ever tried. Connected components are completed independently, so a
/// hard component is never re-solved while backtracking inside another.
struct Search {
    order: usize,
    adj: Vec<u64>,
    components: Vec<u64>,
}

struct Partial {
    domains: Vec<u64>,
    colors: Vec<usize>,
    colored: u64,
    used: u64,
}

impl Search {
    fn new(g: &Graph) -> Self {
        assert!(g.order() <= SOLVER_ORDER_LIMIT, "exact search is limited to {SOLVER_ORDER_LIMIT} vertices");
        let adj: Vec<u64> = (0..g.order()).map(|v| g.neighbor_mask(v)).collect();
        let components = g.components().iter().map(|c| c.iter().fold(0u64, |m, &v| m | 1 << (v - 1))).collect();
        Self { order: g.order(), adj, components }
    }

    fn start(&self, k: usize) -> Option<Partial> {
        if k == 0 {
            return None;
        }
        // A palette larger than the order never helps.
        let k = k.min(self.order);
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Some(Partial { domains: vec![full; self.order], colors: vec![0; self.order], colored: 0, used: 0 })
    }

    /// Colors `v` with `c`, pruning `c` from uncolored neighbours. Returns the
    /// undo trail, or `None` (with domains restored) on a wipe-out.
    fn assign(&self, st: &mut Partial, v: usize, c: usize) -> Option<Vec<(usize, u64)>> {
        let bit = 1u64 << c;
        let mut trail = Vec::new();
        for u in iter_bits(self.adj[v] & !st.colored) {
            if st.domains[u] & bit != 0 {
                trail.push((u, st.domains[u]));
                st.domains[u] &= !bit;
                if st.domains[u] == 0 {
                    Self::undo(st, &trail);
                    return None;
                }
            }
        }
        st.colored |= 1 << v;
        st.used |= bit;
        st.colors[v] = c;
        Some(trail)
    }

    fn undo(st: &mut Partial, trail: &[(usize, u64)]) {
        for &(u, d) in trail.iter().rev() {
            st.domains[u] = d;
        }
    }

    /// Completes the partial coloring if possible; `st` is left unchanged.
    fn extend(&self, st: &mut Partial) -> bool {
        self.components.iter().all(|&comp| {
            let open = comp & !st.colored;
            let used = iter_bits(comp & st.colored).fold(0u64, |u, v| u | 1 << st.colors[v]);
            open == 0 || self.extend_within(st, open, used)
        })
    }

    /// Colors every vertex of `open`, all inside one component whose colored
    /// vertices use the colors in `used`.
    fn extend_within(&self, st: &mut Partial, open: u64, used: u64) -> bool {
        if open == 0 {
            return true;
        }
        // Smallest domain first, then most open neighbours, then lowest label.
        let v = iter_bits(open)
            .min_by_key(|&v| (st.domains[v].count_ones(), std::cmp::Reverse((self.adj[v] & open).count_ones()), v))
            .expect("open is nonempty");
        let dom = st.domains[v];
        let (colored, all_used) = (st.colored, st.used);
        for c in iter_bits((dom & used) | lowest_bit(dom & !used)) {
            if let Some(trail) = self.assign(st, v, c) {
                let ok = self.extend_within(st, open & !(1 << v), used | 1 << c);
                Self::undo(st, &trail);
                st.colored = colored;
                st.used = all_used;
                if ok {
                    return true;
                }
            }
        }
        false
    }

    fn feasible(&self, k: usize) -> bool {
        match self.start(k) {
            Some(mut st) => self.extend(&mut st),
            None => false,
        }
    }

    /// Lexicographically least k-coloring: fix vertices in label order, each
    /// to the smallest color that still admits a completion. In that coloring
    /// no vertex exceeds the largest earlier color by more than one.
    fn canonical(&self, k: usize) -> Option<Coloring> {
        let mut st = self.start(k)?;
        if !self.extend(&mut st) {
            return None;
        }
        for v in 0..self.order {
            let (colored, used) = (st.colored, st.used);
            let dom = st.domains[v];
            let mut fixed = false;
            for c in iter_bits((dom & used) | lowest_bit(dom & !used)) {
                if let Some(trail) = self.assign(&mut st, v, c) {
                    if self.extend(&mut st) {
                        fixed = true;
                        break;
                    }
                    Self::undo(&mut st, &trail);
                    st.colored = colored;
                    st.used = used;
                }
            }
            assert!(fixed, "a completion existed before fixing vertex {}", v + 1);
        }
        Some(Coloring::new(st.colors, k).expect("colors drawn from 0..k"))
    }
}
