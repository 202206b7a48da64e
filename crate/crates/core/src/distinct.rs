//! Subsets with pairwise distinct N-distances, extracted from finite sets
//! that crowd toward an accumulation point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::norm::Norm;

/// Largest input accepted by [`brute_force_distinct_subset`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

const RATIO: f64 = 1.0 / 3.0;
// Relative slack so that exact thirds survive rounding.
const SLACK: f64 = 1.0 + 1e-12;

/// Points converging to `y` with ratio at most 1/3.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractingSequence {
    pub y: Vec2,
    pub pts: Vec<Vec2>,
}

impl ContractingSequence {
    /// Checks the 1/3-contraction invariant and that no point equals `y`.
    pub fn is_valid(&self, norm: &Norm) -> bool {
        let d: Vec<f64> = self.pts.iter().map(|&p| norm.dist(p, self.y)).collect();
        d.iter().all(|&r| r > 0.0) && d.windows(2).all(|w| w[1] <= RATIO * SLACK * w[0])
    }
}

/// Guesses the accumulation point as the input point whose third nearest
/// neighbour is closest, then chains the rest toward it.
///
/// Heuristic: when the true limit is not itself in the set the guess lands
/// on one of the innermost samples and the chain loses its tail. Use
/// [`select_contracting_towards`] when the limit is known.
pub fn select_contracting(points: &[Vec2], norm: &Norm) -> Result<ContractingSequence> {
    if points.len() < 4 {
        return Err(Error::NoAccumulation);
    }
    let mut best = (f64::INFINITY, 0);
    for (i, &p) in points.iter().enumerate() {
        let mut d: Vec<f64> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &o)| norm.dist(p, o))
            .collect();
        d.sort_by(f64::total_cmp);
        if d[2] < best.0 {
            best = (d[2], i);
        }
    }
    select_contracting_towards(points, points[best.1], norm)
}

/// Greedy longest chain toward a given `y`: start from the farthest point and
/// repeatedly take the farthest remaining one within a third of the previous
/// distance. Fewer than three chained points is reported as `NoAccumulation`.
pub fn select_contracting_towards(points: &[Vec2], y: Vec2, norm: &Norm) -> Result<ContractingSequence> {
    let mut by_dist: Vec<(f64, Vec2)> = points
        .iter()
        .map(|&p| (norm.dist(p, y), p))
        .filter(|&(d, _)| d > 0.0)
        .collect();
    by_dist.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.lex_cmp(&b.1)));
    let mut pts = Vec::new();
    let mut bound = f64::INFINITY;
    for (d, p) in by_dist {
        if d <= bound {
            pts.push(p);
            bound = RATIO * SLACK * d;
        }
    }
    if pts.len() < 3 {
        return Err(Error::NoAccumulation);
    }
    Ok(ContractingSequence { y, pts })
}

/// Outcome of [`red_blue_filter`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilterOutcome {
    /// Red points in sequence order; pairwise distances distinct.
    pub red: Vec<Vec2>,
    /// Sequence indices classified blue.
    pub blue: Vec<usize>,
    /// Sequence indices removed as duplicates on some sphere.
    pub dropped: Vec<usize>,
}

/// Walks the sequence; at each surviving `zⁱ` later survivors are grouped by
/// their distance to `zⁱ` (ε-equal distances chain into one class) and only
/// the first of each class is kept. `zⁱ` is blue when some class had two or
/// more members.
pub fn red_blue_filter(cs: &ContractingSequence, norm: &Norm, eps: f64) -> FilterOutcome {
    let n = cs.pts.len();
    let mut alive = vec![true; n];
    let mut blue = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..n {
        if !alive[i] {
            continue;
        }
        let mut later: Vec<(f64, usize)> = (i + 1..n)
            .filter(|&k| alive[k])
            .map(|k| (norm.dist(cs.pts[i], cs.pts[k]), k))
            .collect();
        later.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut is_blue = false;
        let mut start = 0;
        while start < later.len() {
            let mut end = start + 1;
            while end < later.len() && later[end].0 - later[end - 1].0 <= eps {
                end += 1;
            }
            if end - start > 1 {
                is_blue = true;
                let keep = later[start..end].iter().map(|&(_, k)| k).min().unwrap();
                for &(_, k) in &later[start..end] {
                    if k != keep {
                        alive[k] = false;
                        dropped.push(k);
                    }
                }
            }
            start = end;
        }
        if is_blue {
            blue.push(i);
        }
    }
    dropped.sort_unstable();
    let red = (0..n)
        .filter(|&i| alive[i] && !blue.contains(&i))
        .map(|i| cs.pts[i])
        .collect();
    FilterOutcome { red, blue, dropped }
}

/// All `n(n-1)/2` distances of `points`.
pub fn pairwise_distances(points: &[Vec2], norm: &Norm) -> Vec<f64> {
    let mut d = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d.push(norm.dist(points[i], points[j]));
        }
    }
    d
}

/// True when no two pairs are at ε-equal distance.
pub fn distances_distinct(points: &[Vec2], norm: &Norm, eps: f64) -> bool {
    let mut d = pairwise_distances(points, norm);
    d.sort_by(f64::total_cmp);
    d.windows(2).all(|w| w[1] - w[0] > eps)
}

/// First violation `(i, k1, j, k2)` of: `‖xⁱ - x^{k1}‖ = ‖xʲ - x^{k2}‖` with
/// `i < k1`, `j < k2` forces `i = j`.
pub fn index_property_violation(
    cs: &ContractingSequence,
    norm: &Norm,
    eps: f64,
) -> Option<(usize, usize, usize, usize)> {
    let n = cs.pts.len();
    let pairs: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |k| (i, k)))
        .map(|(i, k)| (i, k, norm.dist(cs.pts[i], cs.pts[k])))
        .collect();
    for &(i, k1, a) in &pairs {
        for &(j, k2, b) in &pairs {
            if i < j && (a - b).abs() <= eps {
                return Some((i, k1, j, k2));
            }
        }
    }
    None
}

/// Maximum subset of `points` with pairwise distinct distances, by
/// exhaustive branch and bound. Stops early once `target` points are found.
pub fn brute_force_distinct_subset(
    points: &[Vec2],
    norm: &Norm,
    eps: f64,
    target: Option<usize>,
) -> Result<Vec<Vec2>> {
    if points.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { limit: BRUTE_FORCE_LIMIT, actual: points.len() });
    }
    let n = points.len();
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| norm.dist(points[i], points[j])).collect())
        .collect();
    let mut search = Search {
        dist: &dist,
        eps,
        target: target.unwrap_or(n).min(n),
        chosen: Vec::new(),
        used: Vec::new(),
        best: Vec::new(),
    };
    search.run(0);
    Ok(search.best.iter().map(|&i| points[i]).collect())
}

struct Search<'a> {
    dist: &'a [Vec<f64>],
    eps: f64,
    target: usize,
    chosen: Vec<usize>,
    used: Vec<f64>,
    best: Vec<usize>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.best.len() >= self.target
    }

    fn run(&mut self, next: usize) {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        let n = self.dist.len();
        for c in next..n {
            if self.done() || self.chosen.len() + (n - c) <= self.best.len() {
                return;
            }
            let fresh: Vec<f64> = self.chosen.iter().map(|&o| self.dist[c][o]).collect();
            let clash = fresh.iter().enumerate().any(|(a, &x)| {
                x <= self.eps
                    || fresh[..a].iter().any(|&y| (x - y).abs() <= self.eps)
                    || self.used.iter().any(|&y| (x - y).abs() <= self.eps)
            });
            if clash {
                continue;
            }
            let mark = self.used.len();
            self.used.extend(&fresh);
            self.chosen.push(c);
            self.run(c + 1);
            self.chosen.pop();
            self.used.truncate(mark);
        }
    }
}
