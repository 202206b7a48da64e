//! Finite prefixes of the geometric progression `G(q) = {0, 1, 1+q, 1+q+q², …}`,
//! verification of N-isometric copies, and the direction/extension calculus
//! for copies under a polygonal norm.
//!
//! Index conventions: the `i`-th element of `G(q)` is `(1 - qⁱ)/(1 - q)`, so
//! index 0 is the point 0. A sequence with `include_zero = false` holds the
//! indices `1..=n`; with `include_zero = true` it holds `0..n`. A `scale`
//! other than 1 stands for the dilated set `scale·G(q)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Segment, Vec2};
use crate::norm::{Norm, PolygonalNorm};

/// Position of the `i`-th element of `G(q)`.
pub fn gp_position(q: f64, i: usize) -> f64 {
    (1.0 - q.powi(i as i32)) / (1.0 - q)
}

/// Distance between elements `i` and `j` of `G(q)`; index 0 is the point 0.
pub fn gp_distance(q: f64, i: usize, j: usize) -> f64 {
    (q.powi(i as i32) - q.powi(j as i32)).abs() / (1.0 - q)
}

/// The first `n` elements of `G(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoProgression {
    pub q: f64,
    pub n: usize,
}

impl GeoProgression {
    pub fn new(q: f64, n: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::PreconditionViolated(format!("q must lie in (0, 1), got {q}")));
        }
        if n < 2 {
            return Err(Error::PreconditionViolated(format!("prefix length must be >= 2, got {n}")));
        }
        Ok(Self { q, n })
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| gp_position(self.q, i)).collect()
    }
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

fn one() -> f64 {
    1.0
}

/// An ordered candidate copy in the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneSequence {
    pub q: f64,
    pub include_zero: bool,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
    pub points: Vec<Vec2>,
}

impl PlaneSequence {
    pub fn new(q: f64, include_zero: bool, points: Vec<Vec2>) -> Self {
        Self { q, include_zero, scale: 1.0, points }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// `G(q)` index of the `j`-th point.
    pub fn index_of(&self, j: usize) -> usize {
        if self.include_zero {
            j
        } else {
            j + 1
        }
    }

    /// Target N-distance between the `a`-th and `b`-th points.
    pub fn target_distance(&self, a: usize, b: usize) -> f64 {
        self.scale * gp_distance(self.q, self.index_of(a), self.index_of(b))
    }
}

/// Outcome of [`verify_copy`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyVerdict {
    pub accepted: bool,
    pub max_deviation: f64,
}

/// Checks every pairwise N-distance of `seq` against the progression.
pub fn verify_copy(
    norm: &Norm,
    g: &GeoProgression,
    seq: &PlaneSequence,
    tol: f64,
) -> Result<CopyVerdict> {
    if seq.points.len() != g.n {
        return Err(Error::LengthMismatch { expected: g.n, actual: seq.points.len() });
    }
    if seq.q != g.q {
        return Err(Error::PreconditionViolated(format!(
            "sequence ratio {} differs from progression ratio {}",
            seq.q, g.q
        )));
    }
    if seq.points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut worst = 0.0f64;
    for a in 0..seq.points.len() {
        for b in a + 1..seq.points.len() {
            let d = norm.dist(seq.points[a], seq.points[b]);
            worst = worst.max((d - seq.target_distance(a, b)).abs());
        }
    }
    Ok(CopyVerdict { accepted: worst <= tol, max_deviation: worst })
}

/// A facet `k` and sign `sigma` with `‖zⁱ - zʲ‖ = sigma·⟨zⁱ - zʲ, v_k⟩` for all `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionWitness {
    pub k: usize,
    pub sigma: i8,
}

/// All direction witnesses of a copy together with its extrapolated limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Direction {
    pub witnesses: Vec<DirectionWitness>,
    pub limit: Vec2,
}

/// Finds every `(k, sigma)` witnessing the direction of a copy of
/// `G(q) \ {0}` (points in index order `1..=n`).
///
/// The limit point continues the last step geometrically:
/// `y = zⁿ - (zⁿ⁻¹ - zⁿ)·q/(1 - q)`.
pub fn find_direction(poly: &PolygonalNorm, seq: &[Vec2], q: f64) -> Result<Direction> {
    if seq.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, actual: seq.len() });
    }
    let eps = poly.eps();
    let mut witnesses = Vec::new();
    for k in 0..poly.facet_count() {
        let v = poly.facet(k).v;
        for sigma in [1i8, -1] {
            let holds = (0..seq.len()).all(|i| {
                (i + 1..seq.len()).all(|j| {
                    let d = seq[i] - seq[j];
                    let n = poly.eval(d);
                    (n - f64::from(sigma) * d.dot(v)).abs() <= eps * n.max(1.0)
                })
            });
            if holds {
                witnesses.push(DirectionWitness { k, sigma });
            }
        }
    }
    if witnesses.is_empty() {
        return Err(Error::NoWitness);
    }
    let n = seq.len();
    let limit = seq[n - 1] - (seq[n - 2] - seq[n - 1]) * (q / (1.0 - q));
    Ok(Direction { witnesses, limit })
}

/// One translated side `z¹ + scale·I` completing a copy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extension {
    pub witness: DirectionWitness,
    pub segment: Segment,
}

/// Segments of points that complete a copy of `scale·(G(q) \ {0})` (index
/// order `1..=n`) to a copy of `scale·G(q)`. One segment per witness; two
/// when the step direction points at a vertex of the unit disc.
///
/// Each segment is self-checked at both endpoints and the midpoint.
pub fn extension_segment(
    poly: &PolygonalNorm,
    seq: &[Vec2],
    q: f64,
    scale: f64,
) -> Result<Vec<Extension>> {
    let dir = find_direction(poly, seq, q)?;
    let u = (seq[0] - seq[1]) * (1.0 / (q * scale));
    let eps = poly.eps();
    let norm = Norm::Polygonal(poly.clone());
    let g = GeoProgression::new(q, seq.len() + 1)?;
    let mut out = Vec::new();
    for w in dir.witnesses {
        let f = poly.facet(w.k);
        if (f64::from(w.sigma) * u.dot(f.v) - 1.0).abs() > 1e3 * eps {
            continue;
        }
        let side = f.side(w.sigma);
        let segment = Segment::new(seq[0] + side.a * scale, seq[0] + side.b * scale);
        for t in [0.0, 0.5, 1.0] {
            let mut pts = Vec::with_capacity(seq.len() + 1);
            pts.push(segment.point_at(t));
            pts.extend_from_slice(seq);
            let check = PlaneSequence::new(q, true, pts).scaled(scale);
            let verdict = verify_copy(&norm, &g, &check, 10.0 * eps)?;
            if !verdict.accepted {
                return Err(Error::SelfCheckFailed(format!(
                    "extension point at t = {t} misses by {}",
                    verdict.max_deviation
                )));
            }
        }
        out.push(Extension { witness: w, segment });
    }
    if out.is_empty() {
        return Err(Error::NoWitness);
    }
    Ok(out)
}

/// Builds a copy of `scale·(G(q) \ {0})` with `fractions.len() + 1` points
/// starting at `start`: each step `zⁱ - zⁱ⁺¹ = scale·qⁱ·u` uses a point `u`
/// of side `(k, sigma)` at the given fraction along it. Non-collinear unless
/// all fractions agree.
pub fn staircase_copy(
    poly: &PolygonalNorm,
    k: usize,
    sigma: i8,
    q: f64,
    scale: f64,
    start: Vec2,
    fractions: &[f64],
) -> Vec<Vec2> {
    let side = poly.facet(k).side(sigma);
    let mut pts = vec![start];
    let mut z = start;
    for (i, &f) in fractions.iter().enumerate() {
        let u = side.point_at(f);
        z = z - u * (scale * q.powi(i as i32 + 1));
        pts.push(z);
    }
    pts
}
