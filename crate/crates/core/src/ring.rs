//! Countable-palette colouring of the plane by nested N-balls around the
//! origin, built from an unbounded point set.
//!
//! Radii follow `r₁ = 1`, `r_{i+1} = r_i + ‖xⁱ - x⁰‖` where each anchor `xⁱ`
//! is a point of the set with `‖xⁱ - x⁰‖ > 2·r_i`. The `i`-th ring
//! `B_i \ B_{i-1}` receives colour `ψ(i)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::norm::{AxisSymmetry, Norm};

/// Triangular schedule `ψ(k(k-1)/2 + i) = i` for `1 ≤ i ≤ k`; takes every
/// positive value infinitely often.
pub fn psi(j: u64) -> u64 {
    assert!(j >= 1, "psi is defined on positive integers");
    // Largest k with k(k-1)/2 < j.
    let mut k = ((2.0 * j as f64).sqrt()) as u64;
    while k * (k + 1) / 2 < j {
        k += 1;
    }
    while k > 1 && k * (k - 1) / 2 >= j {
        k -= 1;
    }
    j - k * (k - 1) / 2
}

/// Source of points of an unbounded set `M`.
pub trait PointSampler {
    /// The base point `x⁰`.
    fn base(&self) -> Vec2;

    /// Some point `x` of the set with `‖x - base‖ > radius`, or `None` when
    /// the set does not reach that far.
    fn beyond(&self, norm: &Norm, radius: f64) -> Option<Vec2>;

    fn name(&self) -> String;
}

/// `{0, 1, 2, 4, 8, …}` on the x-axis.
#[derive(Clone, Copy, Debug, Default)]
pub struct PowersOfTwo;

impl PointSampler for PowersOfTwo {
    fn base(&self) -> Vec2 {
        Vec2::ZERO
    }

    fn beyond(&self, norm: &Norm, radius: f64) -> Option<Vec2> {
        (0..1023)
            .map(|e| Vec2::new(2f64.powi(e), 0.0))
            .find(|&p| norm.dist(p, self.base()) > radius)
    }

    fn name(&self) -> String {
        "powers-of-two".into()
    }
}

/// The bounded set `G(q)` on the x-axis, truncated to `terms` elements.
#[derive(Clone, Copy, Debug)]
pub struct GeometricSet {
    pub q: f64,
    pub terms: usize,
}

impl PointSampler for GeometricSet {
    fn base(&self) -> Vec2 {
        Vec2::ZERO
    }

    fn beyond(&self, norm: &Norm, radius: f64) -> Option<Vec2> {
        (0..self.terms)
            .map(|i| Vec2::new(crate::progression::gp_position(self.q, i), 0.0))
            .find(|&p| norm.dist(p, self.base()) > radius)
    }

    fn name(&self) -> String {
        format!("geometric:{}", self.q)
    }
}

/// An explicit finite list; the first entry is the base point.
#[derive(Clone, Debug)]
pub struct PointList(pub Vec<Vec2>);

impl PointSampler for PointList {
    fn base(&self) -> Vec2 {
        self.0[0]
    }

    fn beyond(&self, norm: &Norm, radius: f64) -> Option<Vec2> {
        self.0.iter().copied().find(|&p| norm.dist(p, self.base()) > radius)
    }

    fn name(&self) -> String {
        "list".into()
    }
}

/// Nested-ball colouring. `radii[i - 1]` is `r_i`; `anchors[0]` is `x⁰` and
/// `anchors[i]` produced `r_{i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RingColouring {
    #[serde(skip)]
    norm: Norm,
    radii: Vec<f64>,
    anchors: Vec<Vec2>,
}

impl RingColouring {
    /// Builds `rings` rings (at least one).
    pub fn build(norm: &Norm, sampler: &dyn PointSampler, rings: usize) -> Result<Self> {
        let mut rc = Self { norm: norm.clone(), radii: vec![1.0], anchors: vec![sampler.base()] };
        rc.grow(sampler, rings.max(1))?;
        Ok(rc)
    }

    fn grow(&mut self, sampler: &dyn PointSampler, rings: usize) -> Result<()> {
        while self.radii.len() < rings {
            let r = *self.radii.last().expect("at least one ring");
            let x = sampler
                .beyond(&self.norm, 2.0 * r)
                .ok_or(Error::SamplerExhausted { radius: 2.0 * r })?;
            let d = self.norm.dist(x, self.anchors[0]);
            self.anchors.push(x);
            self.radii.push(r + d);
        }
        Ok(())
    }

    /// A colouring with at least `rings` rings that agrees with `self` on
    /// the existing ones.
    pub fn extended(&self, sampler: &dyn PointSampler, rings: usize) -> Result<Self> {
        let mut rc = self.clone();
        rc.grow(sampler, rings)?;
        Ok(rc)
    }

    /// Extends until the last radius is at least `radius`.
    pub fn covering(&self, sampler: &dyn PointSampler, radius: f64) -> Result<Self> {
        let mut rc = self.clone();
        while *rc.radii.last().unwrap() < radius {
            let next = rc.radii.len() + 1;
            rc.grow(sampler, next)?;
        }
        Ok(rc)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn anchors(&self) -> &[Vec2] {
        &self.anchors
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    /// 1-based ring index `i` with `r_{i-1} < ‖p‖ ≤ r_i` (`r₀ = 0`).
    pub fn ring_of(&self, p: Vec2) -> Result<usize> {
        let n = self.norm.eval(p);
        let last = *self.radii.last().unwrap();
        if n > last {
            return Err(Error::OutOfRange { norm: n, radius: last });
        }
        Ok(self.radii.partition_point(|&r| r < n) + 1)
    }

    pub fn colour(&self, p: Vec2) -> Result<u64> {
        self.ring_of(p).map(|i| psi(i as u64))
    }

    /// Checks that a copy `y⁰, y¹, …` of the anchors meets the rings as the
    /// nested-ball argument predicts: if `y⁰ ∈ B_i` then
    /// `y^{i+j} ∈ B_{i+j+1} \ B_{i+j}` for every available `j ≥ 0`.
    pub fn check_copy_meets_rings(&self, copy: &[Vec2]) -> Result<RingReport> {
        if copy.is_empty() || copy.len() > self.anchors.len() {
            return Err(Error::CorrespondenceMismatch(format!(
                "copy has {} points, anchors {}",
                copy.len(),
                self.anchors.len()
            )));
        }
        for (j, (&y, &x)) in copy.iter().zip(&self.anchors).enumerate() {
            let dy = self.norm.dist(y, copy[0]);
            let dx = self.norm.dist(x, self.anchors[0]);
            if (dy - dx).abs() > 1e-9 * dx.max(1.0) {
                return Err(Error::CorrespondenceMismatch(format!(
                    "point {j}: distance to base {dy}, anchor distance {dx}"
                )));
            }
        }
        let point_rings = copy
            .iter()
            .map(|&y| self.ring_of(y))
            .collect::<Result<Vec<_>>>()?;
        let base_ring = point_rings[0];
        let mut violations = Vec::new();
        for idx in base_ring..copy.len() {
            if point_rings[idx] != idx + 1 {
                violations.push(idx);
            }
        }
        let mut rings_met = point_rings.clone();
        rings_met.sort_unstable();
        rings_met.dedup();
        Ok(RingReport { base_ring, point_rings, rings_met, violations })
    }
}

/// Ring membership of a copy of the anchor set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RingReport {
    pub base_ring: usize,
    pub point_rings: Vec<usize>,
    pub rings_met: Vec<usize>,
    /// Indices `i + j` whose ring differs from the predicted `i + j + 1`.
    pub violations: Vec<usize>,
}

impl RingReport {
    pub fn as_predicted(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A rigid motion `p ↦ A·p + shift` with `A` a signed axis permutation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RigidMotion {
    pub linear: AxisSymmetry,
    pub shift: Vec2,
}

impl RigidMotion {
    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.linear.apply(p) + self.shift
    }
}
