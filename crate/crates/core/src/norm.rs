//! Norm evaluation for ℓp and polygonal norms, and the facet calculus of
//! polygonal unit discs.
//!
//! A polygonal unit disc `P` with `2m` vertices has `m` pairs of opposite
//! sides. For the `k`-th pair we store the functional `v` whose level lines
//! `⟨x, v⟩ = ±1` carry the two sides, the side vector `w` and its N-length.
//! The norm is then `‖x‖ = max_k |⟨x, v_k⟩|`.
//!
//! Facet indices are 0-based throughout the crate. Side `k` (for `k < m`) runs
//! from `vertices[k]` to `vertices[k + 1]`; its opposite side is the negated
//! pair.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Segment, Vec2, DEFAULT_EPS};

/// Facet data for one pair of opposite sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FacetData {
    /// Functional with `⟨p, v⟩ = 1` on the chosen side and `-1` on the opposite one.
    pub v: Vec2,
    /// Side vector from `start` to `end`.
    pub w: Vec2,
    /// N-length of `w`.
    pub lambda: f64,
    pub start: Vec2,
    pub end: Vec2,
}

impl FacetData {
    /// The side of this pair on which `⟨·, v⟩ = sigma`.
    pub fn side(&self, sigma: i8) -> Segment {
        if sigma >= 0 {
            Segment::new(self.start, self.end)
        } else {
            Segment::new(-self.start, -self.end)
        }
    }
}

/// A norm whose unit disc is a centrally symmetric convex polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalNorm {
    vertices: Vec<Vec2>,
    facets: Vec<FacetData>,
    eps: f64,
}

impl PolygonalNorm {
    /// Builds the norm from the full counter-clockwise vertex list.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        Self::with_tolerance(vertices, DEFAULT_EPS)
    }

    pub fn with_tolerance(vertices: Vec<Vec2>, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidNorm(format!("tolerance must be positive, got {eps}")));
        }
        let n = vertices.len();
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidNorm(format!(
                "need an even number of at least 4 vertices, got {n}"
            )));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = vertices.iter().map(|v| v.euclid()).fold(0.0, f64::max);
        if scale <= eps {
            return Err(Error::DegenerateSide { index: 0 });
        }
        let m = n / 2;
        for i in 0..m {
            if (vertices[i] + vertices[i + m]).euclid() > eps * scale.max(1.0) {
                return Err(Error::NotCentrallySymmetric { index: i });
            }
        }
        for i in 0..n {
            if (vertices[(i + 1) % n] - vertices[i]).euclid() <= eps * scale.max(1.0) {
                return Err(Error::DegenerateSide { index: i });
            }
        }
        for i in 0..n {
            let a = vertices[(i + 1) % n] - vertices[i];
            let b = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            if a.cross(b) <= eps * scale * scale {
                return Err(Error::NotConvex { index: (i + 1) % n });
            }
        }
        // Convex turns alone allow a polygon that winds twice; the angle sum rules it out.
        let winding: f64 = (0..n)
            .map(|i| {
                let a = vertices[(i + 1) % n] - vertices[i];
                let b = vertices[(i + 2) % n] - vertices[(i + 1) % n];
                a.cross(b).atan2(a.dot(b))
            })
            .sum();
        if (winding - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::NotConvex { index: 0 });
        }

        let mut facets = Vec::with_capacity(m);
        for k in 0..m {
            let (a, b) = (vertices[k], vertices[k + 1]);
            let w = b - a;
            // Outward normal of a counter-clockwise edge.
            let normal = Vec2::new(w.y, -w.x);
            let offset = a.dot(normal);
            if offset <= eps * scale {
                return Err(Error::InvalidNorm("origin is not strictly inside the polygon".into()));
            }
            let v = normal * (1.0 / offset);
            facets.push(FacetData { v, w, lambda: 0.0, start: a, end: b });
        }
        let mut norm = Self { vertices, facets, eps };
        for k in 0..m {
            norm.facets[k].lambda = norm.eval(norm.facets[k].w);
        }
        Ok(norm)
    }

    /// Square `[-1, 1]²`, the unit disc of ℓ∞. Side 0 is `x = 1`.
    pub fn linf() -> Self {
        Self::new(vec![
            Vec2::new(1.0, -1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, 1.0),
            Vec2::new(-1.0, -1.0),
        ])
        .expect("square is a valid unit disc")
    }

    /// Diamond, the unit disc of ℓ1.
    pub fn l1() -> Self {
        Self::new(vec![
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ])
        .expect("diamond is a valid unit disc")
    }

    /// Regular polygon with `sides` vertices on the Euclidean unit circle,
    /// the first one at angle `phase` (radians).
    pub fn regular(sides: usize, phase: f64) -> Result<Self> {
        let verts = (0..sides)
            .map(|j| {
                let a = phase + std::f64::consts::TAU * j as f64 / sides as f64;
                Vec2::new(a.cos(), a.sin())
            })
            .collect::<Vec<_>>();
        // Make central symmetry exact rather than accurate to rounding.
        let half = sides / 2;
        let verts = (0..sides)
            .map(|j| if j < half { verts[j] } else { -verts[j - half] })
            .collect();
        Self::new(verts)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn facets(&self) -> &[FacetData] {
        &self.facets
    }

    pub fn facet(&self, k: usize) -> &FacetData {
        &self.facets[k]
    }

    /// Number of side pairs `m`.
    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    #[inline]
    pub fn eval(&self, x: Vec2) -> f64 {
        self.facets
            .iter()
            .map(|f| x.dot(f.v).abs())
            .fold(0.0, f64::max)
    }

    /// All facet indices attaining the maximum in `max_k |⟨x, v_k⟩|`. Two
    /// indices are returned when `x` points at a vertex (within tolerance).
    pub fn facet_index(&self, x: Vec2) -> Result<Vec<usize>> {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = self.eval(x);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let cut = norm - self.eps * norm;
        Ok(self
            .facets
            .iter()
            .enumerate()
            .filter(|(_, f)| x.dot(f.v).abs() >= cut)
            .map(|(k, _)| k)
            .collect())
    }

    /// Facet pairs `(k, sigma)` whose side `⟨·, v_k⟩ = sigma` contains the
    /// direction of `x`, i.e. `‖x‖ = sigma·⟨x, v_k⟩`.
    pub fn sides_containing(&self, x: Vec2) -> Result<Vec<(usize, i8)>> {
        Ok(self
            .facet_index(x)?
            .into_iter()
            .map(|k| (k, if x.dot(self.facets[k].v) >= 0.0 { 1 } else { -1 }))
            .collect())
    }

    /// Smallest N-length of a side, `λ = min_k λ_k`.
    pub fn min_side_length(&self) -> f64 {
        self.facets
            .iter()
            .map(|f| f.lambda)
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks that two vectors realising their norm on the same facet `k`
    /// have a sum realising its norm on that facet too.
    pub fn sum_direction_check(&self, k: usize, x1: Vec2, x2: Vec2) -> Result<bool> {
        let f = self
            .facets
            .get(k)
            .ok_or_else(|| Error::PreconditionViolated(format!("facet {k} out of range")))?;
        for x in [x1, x2] {
            let n = self.eval(x);
            if (n - x.dot(f.v)).abs() > self.eps * n.max(1.0) {
                return Err(Error::PreconditionViolated(format!(
                    "{x} does not attain its norm on facet {k} with positive sign"
                )));
            }
        }
        let s = x1 + x2;
        let n = self.eval(s);
        Ok((n - s.dot(f.v)).abs() <= self.eps * n.max(1.0))
    }
}

/// An ℓp norm (`1 < p < ∞`) or a polygonal norm.
#[derive(Clone, Debug, PartialEq)]
pub enum Norm {
    Lp(f64),
    Polygonal(PolygonalNorm),
}

impl Norm {
    /// ℓp norm; `p = 1` and `p = ∞` become the equivalent polygonal norms.
    pub fn lp(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidNorm(format!("p must satisfy 1 <= p <= inf, got {p}")));
        }
        if p == 1.0 {
            Ok(Norm::Polygonal(PolygonalNorm::l1()))
        } else if p.is_infinite() {
            Ok(Norm::Polygonal(PolygonalNorm::linf()))
        } else {
            Ok(Norm::Lp(p))
        }
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        PolygonalNorm::new(vertices).map(Norm::Polygonal)
    }

    #[inline]
    pub fn eval(&self, x: Vec2) -> f64 {
        match self {
            Norm::Lp(p) => lp_norm(*p, x),
            Norm::Polygonal(poly) => poly.eval(x),
        }
    }

    #[inline]
    pub fn dist(&self, a: Vec2, b: Vec2) -> f64 {
        self.eval(a - b)
    }

    pub fn as_polygonal(&self) -> Option<&PolygonalNorm> {
        match self {
            Norm::Polygonal(p) => Some(p),
            Norm::Lp(_) => None,
        }
    }

    /// The signed axis permutations that preserve the norm.
    pub fn axis_symmetries(&self) -> Vec<AxisSymmetry> {
        let all = AxisSymmetry::all();
        match self {
            Norm::Lp(_) => all.to_vec(),
            Norm::Polygonal(poly) => all
                .into_iter()
                .filter(|s| {
                    poly.vertices().iter().all(|&v| {
                        let image = s.apply(v);
                        (poly.eval(image) - 1.0).abs() <= 1e-9
                            && poly.vertices().iter().any(|&u| (u - image).euclid() <= 1e-9)
                    })
                })
                .collect(),
        }
    }

    pub fn to_spec(&self) -> NormSpec {
        match self {
            Norm::Lp(p) => NormSpec::Lp { p: *p },
            Norm::Polygonal(poly) => NormSpec::Polygon {
                vertices: poly.vertices().to_vec(),
            },
        }
    }

    pub fn from_spec(spec: &NormSpec) -> Result<Self> {
        match spec {
            NormSpec::Lp { p } => Norm::lp(*p),
            NormSpec::Polygon { vertices } => Norm::polygon(vertices.clone()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: NormSpec =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Norm::from_spec(&spec)
    }
}

/// Signed axis permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisSymmetry {
    pub swap: bool,
    pub flip_x: bool,
    pub flip_y: bool,
}

impl AxisSymmetry {
    pub const IDENTITY: AxisSymmetry = AxisSymmetry { swap: false, flip_x: false, flip_y: false };

    pub fn all() -> [AxisSymmetry; 8] {
        let mut out = [Self::IDENTITY; 8];
        for (i, s) in out.iter_mut().enumerate() {
            *s = AxisSymmetry { swap: i & 4 != 0, flip_x: i & 1 != 0, flip_y: i & 2 != 0 };
        }
        out
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        let v = if self.swap { Vec2::new(v.y, v.x) } else { v };
        Vec2::new(
            if self.flip_x { -v.x } else { v.x },
            if self.flip_y { -v.y } else { v.y },
        )
    }
}

pub(crate) fn lp_norm(p: f64, x: Vec2) -> f64 {
    let (a, b) = (x.x.abs(), x.y.abs());
    if p == 2.0 {
        return a.hypot(b);
    }
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    let (a, b) = (a / m, b / m);
    m * (a.powf(p) + b.powf(p)).powf(1.0 / p)
}

/// JSON description of a norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NormSpec {
    Lp {
        #[serde(deserialize_with = "de_real")]
        p: f64,
    },
    Polygon {
        #[serde(deserialize_with = "de_points")]
        vertices: Vec<Vec2>,
    },
}

/// A real given either as a JSON number or as a decimal string.
#[derive(Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Num(f64),
    Str(String),
}

impl RealRepr {
    fn value<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            RealRepr::Num(x) => Ok(x),
            RealRepr::Str(s) => {
                let t = s.trim();
                match t.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                    _ => t
                        .parse::<f64>()
                        .map_err(|_| E::custom(format!("not a real number: {s:?}"))),
                }
            }
        }
    }
}

fn de_real<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    RealRepr::deserialize(d)?.value()
}

fn de_points<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec2>, D::Error> {
    let raw: Vec<[RealRepr; 2]> = Vec::deserialize(d)?;
    raw.into_iter()
        .map(|[x, y]| Ok(Vec2::new(x.value()?, y.value()?)))
        .collect()
}
