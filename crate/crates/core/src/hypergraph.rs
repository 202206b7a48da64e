//! Finite hypergraphs: edge cores and polychromatic colourings built by
//! peeling disjoint transversals.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertices are `0..vertex_count`. JSON form: `{"V": 5, "edges": [[0, 1], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteHypergraph {
    #[serde(rename = "V")]
    vertex_count: usize,
    edges: Vec<BTreeSet<usize>>,
}

impl FiniteHypergraph {
    pub fn new(vertex_count: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let h = Self { vertex_count, edges: edges.into_iter().map(|e| e.into_iter().collect()).collect() };
        h.validate()?;
        Ok(h)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: Self = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_empty() {
                return Err(Error::InvalidHypergraph(format!("edge {i} is empty")));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= self.vertex_count) {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {i} has vertex {v} out of range 0..{}",
                    self.vertex_count
                )));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[BTreeSet<usize>] {
        &self.edges
    }
}

/// `e′`: the intersection of `e` with every edge meeting it in at least `k`
/// vertices. `e` always takes part, so `e′ ⊆ e`.
pub fn edge_core(h: &FiniteHypergraph, e: usize, k: usize) -> BTreeSet<usize> {
    let base = &h.edges[e];
    let mut core = base.clone();
    for f in &h.edges {
        if base.intersection(f).count() >= k {
            core.retain(|v| f.contains(v));
        }
    }
    core
}

/// A pair of edges whose cores are distinct yet share at least `k` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreClash {
    pub e1: usize,
    pub e2: usize,
    pub shared: usize,
}

/// Checks that distinct cores always share fewer than `k` vertices.
pub fn core_disjointness_check(h: &FiniteHypergraph, k: usize) -> std::result::Result<(), CoreClash> {
    let cores: Vec<_> = (0..h.edges.len()).map(|e| edge_core(h, e, k)).collect();
    for e1 in 0..cores.len() {
        for e2 in e1 + 1..cores.len() {
            if cores[e1] != cores[e2] {
                let shared = cores[e1].intersection(&cores[e2]).count();
                if shared >= k {
                    return Err(CoreClash { e1, e2, shared });
                }
            }
        }
    }
    Ok(())
}

/// Colouring produced by [`peel_transversals`]. Colours are `1..=t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Peeling {
    /// Colour of every vertex; redundant vertices get colour 1.
    pub colours: Vec<usize>,
    /// `transversals[i]` is `V_{i+1}`.
    pub transversals: Vec<Vec<usize>>,
    pub redundant: Vec<usize>,
}

impl Peeling {
    /// Every edge of `h` sees each of the `t` colours.
    pub fn is_polychromatic(&self, h: &FiniteHypergraph) -> bool {
        let t = self.transversals.len();
        h.edges.iter().all(|e| {
            let seen: BTreeSet<usize> = e.iter().map(|&v| self.colours[v]).collect();
            (1..=t).all(|c| seen.contains(&c))
        })
    }
}

/// Peels `t` disjoint transversals of the core hypergraph `{e′}`.
///
/// Each transversal is a greedy hitting set over still-unused vertices (most
/// unhit cores first, lowest index on ties) followed by a reverse pass that
/// drops vertices not needed, leaving them for later colours.
pub fn peel_transversals(h: &FiniteHypergraph, k: usize, t: usize) -> Result<Peeling> {
    if k == 0 || t == 0 {
        return Err(Error::InvalidHypergraph("k and t must be positive".into()));
    }
    let mut cores: Vec<BTreeSet<usize>> = Vec::new();
    for e in 0..h.edges.len() {
        let c = edge_core(h, e, k);
        if c.len() < t {
            return Err(Error::InfeasibleCore { edge: e, size: c.len(), needed: t });
        }
        if !cores.contains(&c) {
            cores.push(c);
        }
    }
    let mut used = vec![false; h.vertex_count];
    let mut transversals = Vec::with_capacity(t);
    for colour in 1..=t {
        let mut hit = vec![false; cores.len()];
        let mut chosen = Vec::new();
        while hit.iter().any(|&x| !x) {
            let best = (0..h.vertex_count)
                .filter(|&v| !used[v])
                .map(|v| (cores.iter().zip(&hit).filter(|(c, &x)| !x && c.contains(&v)).count(), v))
                .filter(|&(gain, _)| gain > 0)
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            let Some((_, v)) = best else {
                return Err(Error::PeelingFailed { colour });
            };
            used[v] = true;
            chosen.push(v);
            for (c, x) in cores.iter().zip(hit.iter_mut()) {
                *x |= c.contains(&v);
            }
        }
        for i in (0..chosen.len()).rev() {
            let v = chosen[i];
            let still_hit = cores.iter().all(|c| c.iter().any(|u| *u != v && chosen.contains(u)));
            if still_hit {
                chosen.remove(i);
                used[v] = false;
            }
        }
        chosen.sort_unstable();
        transversals.push(chosen);
    }
    let mut colours = vec![1; h.vertex_count];
    for (i, tr) in transversals.iter().enumerate() {
        for &v in tr {
            colours[v] = i + 1;
        }
    }
    let redundant = (0..h.vertex_count).filter(|&v| !used[v]).collect();
    Ok(Peeling { colours, transversals, redundant })
}
