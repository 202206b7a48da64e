//! Helpers shared by integration tests. Nothing here calls into the search
//! code: norms are recomputed from polygon vertices and progression
//! distances from the closed form.

#![allow(dead_code)]

use minkowski_ramsey::norm::Norm;
use minkowski_ramsey::oracle::ColouringOracle;
use minkowski_ramsey::Vec2;

/// Gauge of a centrally symmetric polygon given by its vertices in order.
pub fn gauge(vertices: &[(f64, f64)], x: (f64, f64)) -> f64 {
    let n = vertices.len();
    let mut best: f64 = 0.0;
    for i in 0..n {
        let (ax, ay) = vertices[i];
        let (bx, by) = vertices[(i + 1) % n];
        // Outward normal of the edge a→b, scaled so that ⟨a, nrm⟩ = 1.
        let (nx, ny) = (by - ay, ax - bx);
        let h = ax * nx + ay * ny;
        best = best.max((x.0 * nx + x.1 * ny) / h);
    }
    best
}

/// `|q^i - q^j| / (1 - q)`, the distance between positions `i` and `j` of `G(q)`.
pub fn g_distance(q: f64, i: usize, j: usize) -> f64 {
    (q.powi(i as i32) - q.powi(j as i32)).abs() / (1.0 - q)
}

/// Largest gap between pairwise distances of `pts` and those of a copy of
/// `G(q)` scaled by `scale`, with positions starting at `first`.
pub fn copy_deviation(vertices: &[(f64, f64)], pts: &[Vec2], q: f64, scale: f64, first: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let d = gauge(vertices, (pts[a].x - pts[b].x, pts[a].y - pts[b].y));
            worst = worst.max((d - scale * g_distance(q, a + first, b + first)).abs());
        }
    }
    worst
}

pub fn vertex_pairs(norm: &Norm) -> Vec<(f64, f64)> {
    norm.as_polygonal().expect("polygonal norm").vertices().iter().map(|v| (v.x, v.y)).collect()
}

/// Two families of parallel bands overlaid as a checkerboard.
pub struct Lattice {
    pub a: Vec2,
    pub b: Vec2,
    pub w1: f64,
    pub w2: f64,
    pub o1: f64,
    pub o2: f64,
}

impl Lattice {
    pub fn new(t1: f64, t2: f64, w1: f64, w2: f64, o1: f64, o2: f64) -> Self {
        Self { a: Vec2::new(t1.cos(), t1.sin()), b: Vec2::new(t2.cos(), t2.sin()), w1, w2, o1, o2 }
    }
}

impl ColouringOracle for Lattice {
    fn colour(&self, p: Vec2) -> u8 {
        let s = (p.dot(self.a) / self.w1 + self.o1).floor() + (p.dot(self.b) / self.w2 + self.o2).floor();
        s.rem_euclid(2.0) as u8
    }

    fn name(&self) -> String {
        "lattice".into()
    }
}

/// Parity of `floor(‖p - c‖ / w)` in a given norm.
pub struct Annuli {
    pub norm: Norm,
    pub c: Vec2,
    pub w: f64,
}

impl ColouringOracle for Annuli {
    fn colour(&self, p: Vec2) -> u8 {
        (self.norm.dist(p, self.c) / self.w).floor().rem_euclid(2.0) as u8
    }

    fn name(&self) -> String {
        "annuli".into()
    }
}
