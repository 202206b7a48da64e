//! Two-colourings of the plane queried point by point.
//!
//! Oracles are named by short strings such as `stripes:0.05,30`; [`parse`]
//! builds one and [`ColouringOracle::name`] gives back a string that parses
//! to the same colouring.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::norm::Norm;
use crate::ring::{psi, PowersOfTwo, RingColouring};

/// A pure colouring `ℝ² → {0, 1}`.
pub trait ColouringOracle: Sync {
    fn colour(&self, p: Vec2) -> u8;
    fn name(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constant(pub u8);

impl ColouringOracle for Constant {
    fn colour(&self, _: Vec2) -> u8 {
        self.0
    }

    fn name(&self) -> String {
        format!("constant:{}", self.0)
    }
}

/// Colour 1 iff `a·x + b·y + c > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ColouringOracle for HalfPlane {
    fn colour(&self, p: Vec2) -> u8 {
        u8::from(self.a * p.x + self.b * p.y + self.c > 0.0)
    }

    fn name(&self) -> String {
        format!("half-plane:{},{},{}", self.a, self.b, self.c)
    }
}

/// Parallel bands of the given width; the band index grows along the
/// direction at `angle_deg` from the x-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stripes {
    pub width: f64,
    pub angle_deg: f64,
}

impl ColouringOracle for Stripes {
    fn colour(&self, p: Vec2) -> u8 {
        let (s, c) = self.angle_deg.to_radians().sin_cos();
        let band = ((p.x * c + p.y * s) / self.width).floor();
        (band.rem_euclid(2.0)) as u8
    }

    fn name(&self) -> String {
        format!("stripes:{},{}", self.width, self.angle_deg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkerboard {
    pub cell: f64,
}

impl ColouringOracle for Checkerboard {
    fn colour(&self, p: Vec2) -> u8 {
        let s = (p.x / self.cell).floor() + (p.y / self.cell).floor();
        s.rem_euclid(2.0) as u8
    }

    fn name(&self) -> String {
        format!("checkerboard:{}", self.cell)
    }
}

/// Parity of the ring colouring built from the powers-of-two anchors.
#[derive(Clone, Debug)]
pub struct RingParity {
    rings: RingColouring,
}

/// Enough rings to cover any point a search will reach.
const RING_PARITY_RINGS: usize = 40;

impl RingParity {
    pub fn new(norm: &Norm) -> Result<Self> {
        Ok(Self { rings: RingColouring::build(norm, &PowersOfTwo, RING_PARITY_RINGS)? })
    }
}

impl ColouringOracle for RingParity {
    fn colour(&self, p: Vec2) -> u8 {
        // Beyond the last ring counts as colour 0.
        self.rings.ring_of(p).map_or(0, |i| (psi(i as u64) % 2) as u8)
    }

    fn name(&self) -> String {
        "ring-parity".into()
    }
}

fn params(name: &str, args: Option<&str>, defaults: &[f64]) -> Result<Vec<f64>> {
    let Some(args) = args else { return Ok(defaults.to_vec()) };
    let vals = args
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::UnknownOracle(format!("{name}: {e}")))?;
    if vals.len() != defaults.len() || vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::UnknownOracle(format!(
            "{name} takes {} finite parameters, got `{args}`",
            defaults.len()
        )));
    }
    Ok(vals)
}

/// Builds an oracle from `kind[:p1,p2,…]`. `ring-parity` needs the norm.
pub fn parse(spec: &str, norm: &Norm) -> Result<Box<dyn ColouringOracle>> {
    let (kind, args) = match spec.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a)),
        None => (spec.trim(), None),
    };
    Ok(match kind {
        "constant" => {
            let c = params(kind, args, &[0.0])?[0];
            if c != 0.0 && c != 1.0 {
                return Err(Error::UnknownOracle(format!("constant colour must be 0 or 1, got {c}")));
            }
            Box::new(Constant(c as u8))
        }
        "half-plane" => {
            let v = params(kind, args, &[0.0, 1.0, 0.0])?;
            if v[0] == 0.0 && v[1] == 0.0 {
                return Err(Error::UnknownOracle("half-plane needs a nonzero normal".into()));
            }
            Box::new(HalfPlane { a: v[0], b: v[1], c: v[2] })
        }
        "stripes" => {
            let v = params(kind, args, &[1.0, 0.0])?;
            if v[0] <= 0.0 {
                return Err(Error::UnknownOracle("stripe width must be positive".into()));
            }
            Box::new(Stripes { width: v[0], angle_deg: v[1] })
        }
        "checkerboard" => {
            let v = params(kind, args, &[1.0])?;
            if v[0] <= 0.0 {
                return Err(Error::UnknownOracle("cell size must be positive".into()));
            }
            Box::new(Checkerboard { cell: v[0] })
        }
        "ring-parity" => {
            if args.is_some() {
                return Err(Error::UnknownOracle("ring-parity takes no parameters".into()));
            }
            Box::new(RingParity::new(norm)?)
        }
        _ => return Err(Error::UnknownOracle(spec.to_string())),
    })
}

/// Names accepted by [`parse`], without parameters.
pub const BUILTINS: [&str; 5] = ["constant", "half-plane", "stripes", "checkerboard", "ring-parity"];
