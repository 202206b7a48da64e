//! ℓp bisectors `{x : ‖x - y¹‖_p = ‖x - y²‖_p}` traced numerically, with
//! linearity detection and intersection counting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Vec2, Window};
use crate::norm::lp_norm;

pub const DEFAULT_STEP: f64 = 0.05;
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;

const BISECTION_ROUNDS: usize = 200;
const NEWTON_ROUNDS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectorSpec {
    pub p: f64,
    pub y1: Vec2,
    pub y2: Vec2,
}

impl BisectorSpec {
    pub fn new(p: f64, y1: Vec2, y2: Vec2) -> Result<Self> {
        let b = Self { p, y1, y2 };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidBisector(format!("p must lie in (1, inf), got {}", self.p)));
        }
        if !self.y1.is_finite() || !self.y2.is_finite() {
            return Err(Error::NonFinite);
        }
        if (self.y2 - self.y1).euclid() <= crate::DEFAULT_EPS {
            return Err(Error::InvalidBisector("y1 and y2 coincide".into()));
        }
        Ok(())
    }

    /// The same point pair, ignoring order.
    pub fn same_pair(&self, other: &BisectorSpec) -> bool {
        self.p == other.p
            && ((self.y1 == other.y1 && self.y2 == other.y2) || (self.y1 == other.y2 && self.y2 == other.y1))
    }
}

/// `‖x - y¹‖_p - ‖x - y²‖_p`.
pub fn bisector_residual(b: &BisectorSpec, x: Vec2) -> f64 {
    lp_norm(b.p, x - b.y1) - lp_norm(b.p, x - b.y2)
}

fn lp_gradient(p: f64, x: Vec2) -> Vec2 {
    let n = lp_norm(p, x);
    let g = |c: f64| c.signum() * (c.abs() / n).powf(p - 1.0);
    Vec2::new(g(x.x), g(x.y))
}

fn residual_gradient(b: &BisectorSpec, x: Vec2) -> Vec2 {
    lp_gradient(b.p, x - b.y1) - lp_gradient(b.p, x - b.y2)
}

/// Sample points of a bisector, one per scanline, split into runs of
/// consecutive scanlines that found a root.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BisectorTrace {
    pub spec: BisectorSpec,
    pub chains: Vec<Vec<Vec2>>,
    pub scanlines: usize,
    /// Scanlines that crossed the window without a sign change.
    pub rootless: usize,
    pub max_residual: f64,
}

impl BisectorTrace {
    pub fn points(&self) -> Vec<Vec2> {
        self.chains.concat()
    }
}

fn check_window(window: &Window, step: f64) -> Result<()> {
    if window.is_degenerate() {
        return Err(Error::InvalidBisector("degenerate window".into()));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidBisector(format!("step must be positive, got {step}")));
    }
    Ok(())
}

/// Scanlines run along the chord `y¹ → y²` and are spaced `step` apart
/// perpendicular to it; the residual changes sign along each scanline at
/// most once, so the root is bracketed by the clipped endpoints and bisected.
pub fn trace_bisector(b: &BisectorSpec, window: &Window, step: f64) -> Result<BisectorTrace> {
    b.validate()?;
    check_window(window, step)?;
    let chord = b.y2 - b.y1;
    let d = chord * (1.0 / chord.euclid());
    let nrm = d.perp();
    let mid = b.y1.lerp(b.y2, 0.5);
    let corners = [
        window.min,
        window.max,
        Vec2::new(window.min.x, window.max.y),
        Vec2::new(window.max.x, window.min.y),
    ];
    let offs = corners.map(|c| (c - mid).dot(nrm));
    let lo = (offs.iter().copied().fold(f64::INFINITY, f64::min) / step).ceil() as i64;
    let hi = (offs.iter().copied().fold(f64::NEG_INFINITY, f64::max) / step).floor() as i64;
    let roots: Vec<Option<Vec2>> = (lo..=hi)
        .into_par_iter()
        .map(|k| {
            let origin = mid + nrm * (k as f64 * step);
            let (t0, t1) = window.clip_line(origin, d)?;
            root_on_segment(b, origin + d * t0, origin + d * t1)
        })
        .collect();
    let mut chains = Vec::new();
    let mut current: Vec<Vec2> = Vec::new();
    let mut rootless = 0;
    let mut max_residual = 0.0f64;
    for r in &roots {
        match r {
            Some(x) => {
                max_residual = max_residual.max(bisector_residual(b, *x).abs());
                current.push(*x);
            }
            None => {
                rootless += 1;
                if !current.is_empty() {
                    chains.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        chains.push(current);
    }
    Ok(BisectorTrace { spec: *b, chains, scanlines: roots.len(), rootless, max_residual })
}

fn root_on_segment(b: &BisectorSpec, mut a: Vec2, mut c: Vec2) -> Option<Vec2> {
    let mut fa = bisector_residual(b, a);
    let fc = bisector_residual(b, c);
    if fa == 0.0 {
        return Some(a);
    }
    if fc == 0.0 {
        return Some(c);
    }
    if fa.signum() == fc.signum() {
        return None;
    }
    for _ in 0..BISECTION_ROUNDS {
        let m = a.lerp(c, 0.5);
        if m == a || m == c {
            break;
        }
        let fm = bisector_residual(b, m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            c = m;
        }
    }
    Some(a.lerp(c, 0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Linearity {
    pub linear: bool,
    pub max_deviation: f64,
}

/// Fits a total-least-squares line and compares the worst perpendicular
/// distance with `eps·diameter`.
pub fn linearity_test(points: &[Vec2], diameter: f64, eps: f64) -> Result<Linearity> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, actual: points.len() });
    }
    let n = points.len() as f64;
    let c = points.iter().fold(Vec2::ZERO, |acc, &p| acc + p) * (1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &p in points {
        let r = p - c;
        sxx += r.x * r.x;
        sxy += r.x * r.y;
        syy += r.y * r.y;
    }
    // Principal axis angle of the scatter matrix.
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let normal = Vec2::new(-theta.sin(), theta.cos());
    let max_deviation = points
        .iter()
        .map(|&p| (p - c).dot(normal).abs())
        .fold(0.0, f64::max);
    Ok(Linearity { linear: max_deviation <= eps * diameter, max_deviation })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Intersections {
    pub count: usize,
    pub points: Vec<Vec2>,
    /// `(|r₁|, |r₂|)` at each reported point.
    pub residuals: Vec<(f64, f64)>,
}

/// Crossings of the two traced polylines, each polished by Newton's method on
/// the residual pair and kept only if both residuals are within `eps`.
/// Points closer than `2·step` are merged.
pub fn count_intersections(
    b1: &BisectorSpec,
    b2: &BisectorSpec,
    window: &Window,
    step: f64,
    eps: f64,
) -> Result<Intersections> {
    if b1.same_pair(b2) {
        return Err(Error::InvalidBisector("both bisectors come from the same point pair".into()));
    }
    let t1 = trace_bisector(b1, window, step)?;
    let t2 = trace_bisector(b2, window, step)?;
    let mut candidates = Vec::new();
    for c1 in &t1.chains {
        for s1 in c1.windows(2) {
            for c2 in &t2.chains {
                for s2 in c2.windows(2) {
                    if let Some(x) = segment_crossing(s1[0], s1[1], s2[0], s2[1]) {
                        candidates.push(x);
                    }
                }
            }
        }
    }
    let mut points: Vec<Vec2> = Vec::new();
    let mut residuals = Vec::new();
    for x0 in candidates {
        let Some(x) = polish(b1, b2, x0) else { continue };
        let r = (bisector_residual(b1, x).abs(), bisector_residual(b2, x).abs());
        if r.0 > eps || r.1 > eps || !window.contains(x) {
            continue;
        }
        if points.iter().any(|&p| (p - x).euclid() < 2.0 * step) {
            continue;
        }
        points.push(x);
        residuals.push(r);
    }
    Ok(Intersections { count: points.len(), points, residuals })
}

fn segment_crossing(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Option<Vec2> {
    let r = b - a;
    let s = d - c;
    let den = r.cross(s);
    if den == 0.0 {
        return None;
    }
    let t = (c - a).cross(s) / den;
    let u = (c - a).cross(r) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then(|| a + r * t)
}

fn polish(b1: &BisectorSpec, b2: &BisectorSpec, mut x: Vec2) -> Option<Vec2> {
    for _ in 0..NEWTON_ROUNDS {
        let f = Vec2::new(bisector_residual(b1, x), bisector_residual(b2, x));
        if f.x == 0.0 && f.y == 0.0 {
            break;
        }
        let g1 = residual_gradient(b1, x);
        let g2 = residual_gradient(b2, x);
        let det = g1.cross(g2);
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = Vec2::new(f.x * g2.y - f.y * g1.y, g1.x * f.y - g2.x * f.x) * (1.0 / det);
        let next = x - dx;
        if !next.is_finite() {
            return None;
        }
        if next == x {
            break;
        }
        x = next;
    }
    x.is_finite().then_some(x)
}
