//! Search for a monochromatic N-isometric copy of a `G(q)` prefix under a
//! two-colouring oracle, for polygonal norms with `q < λ/(1+λ)`.
//!
//! The search follows the segment argument constructively:
//!
//! 1. Segments `Jᵢ` around multiples of a facet midpoint either carry one
//!    colour in every segment, which yields a copy directly, or one of them
//!    is monochromatic.
//! 2. A short copy is inscribed in that segment, then extended one point at a
//!    time. Each extension tries the side segment of Lemma-8 type; a side
//!    without the copy's colour is monochromatic in the other colour and a
//!    new copy goes into it. Side facets repeat eventually, and sliding the
//!    copy along the repeated side grows a monochromatic segment until a
//!    longer copy fits.
//!
//! Colours of whole segments are only ever sampled. Every claim is kept with
//! the copy it extends, so a point that contradicts a claim completes that
//! copy instead, and any returned copy has had every point queried.

mod ladder;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::{Segment, Vec2};
use crate::norm::{Norm, NormSpec, PolygonalNorm};
use crate::oracle::ColouringOracle;
use crate::progression::{gp_position, verify_copy, GeoProgression, PlaneSequence};

pub const DEFAULT_DENSITY: usize = 64;
pub const DENSITY_CAP: usize = 1024;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub q: f64,
    /// Number of points of the prefix `{0, 1, 1 + q, …}`.
    pub n: usize,
    /// Samples per segment at the first attempt.
    pub density: usize,
    pub density_cap: usize,
    pub tol: f64,
    /// Alternation and sliding rounds allowed per extension.
    pub max_iterations: usize,
    /// The copy is sought at scale `q^(s-1)`.
    pub s: u32,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(q: f64, n: usize) -> Self {
        Self {
            q,
            n,
            density: DEFAULT_DENSITY,
            density_cap: DENSITY_CAP,
            tol: crate::DEFAULT_EPS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            s: 1,
            seed: 0,
        }
    }

    /// Same search with every length multiplied by `q^(s-1)`.
    pub fn rescaled(&self, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::PreconditionViolated("scale index s must be at least 1".into()));
        }
        Ok(Self { s, ..self.clone() })
    }

    pub fn scale(&self) -> f64 {
        self.q.powi(self.s as i32 - 1)
    }
}

/// The polygonal norm behind `norm` if `cfg` is admissible for it.
pub fn check_precondition<'a>(norm: &'a Norm, cfg: &SearchConfig) -> Result<&'a PolygonalNorm> {
    let poly = norm.as_polygonal().ok_or_else(|| {
        Error::PreconditionViolated("the search needs a polygonal norm".into())
    })?;
    let lambda = poly.min_side_length();
    let bound = lambda / (1.0 + lambda);
    if !(cfg.q > 0.0 && cfg.q < bound) {
        return Err(Error::PreconditionViolated(format!(
            "q = {} outside (0, λ/(1+λ)) = (0, {bound}) for λ = {lambda}",
            cfg.q
        )));
    }
    if cfg.n < 2 {
        return Err(Error::PreconditionViolated(format!("prefix length {} < 2", cfg.n)));
    }
    if cfg.density < 2 || cfg.density_cap < cfg.density {
        return Err(Error::PreconditionViolated(format!(
            "density {} must be at least 2 and at most the cap {}",
            cfg.density, cfg.density_cap
        )));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::PreconditionViolated("tolerance must be positive".into()));
    }
    Ok(poly)
}

/// A segment whose samples all showed `colour`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub endpoints: [Vec2; 2],
    pub colour: u8,
    pub facet: usize,
    pub length: f64,
    pub provenance: String,
}

/// A verified monochromatic copy of `scale·G(q)` restricted to its first
/// `points.len()` elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyCertificate {
    #[serde(flatten)]
    pub points: PlaneSequence,
    pub norm: NormSpec,
    pub oracle: String,
    pub colour: u8,
    pub tolerance: f64,
    pub max_deviation: f64,
    /// `distances[i][j] = ‖pᵢ - pⱼ‖_N` as checked.
    pub distances: Vec<Vec<f64>>,
    pub trace_id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Restart {
    pub density: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Step1Record {
    pub x: Vec2,
    pub facet: usize,
    pub tau: f64,
    pub segments: Vec<SegmentRecord>,
    /// Index of the monochromatic `Jᵢ`, if one was needed.
    pub seed_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaseRecord {
    pub level: usize,
    pub colour: u8,
    pub points: Vec<Vec2>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlideRecord {
    pub facet: usize,
    pub host_length: f64,
    pub new_length: f64,
    /// `ρ·(λ_k - q/(1-q))`.
    pub expected_growth: f64,
}

/// One extension from a copy of `G(q)` indices `level..n` to `level-1..n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub rho: f64,
    pub colour_in: u8,
    pub segments: Vec<SegmentRecord>,
    pub facets: Vec<usize>,
    pub cycle: Option<[usize; 2]>,
    pub slides: Vec<SlideRecord>,
    pub outcome: String,
    pub colour_out: u8,
    pub points_out: Vec<Vec2>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchTrace {
    pub norm: NormSpec,
    pub oracle: String,
    pub config: SearchConfig,
    pub restarts: Vec<Restart>,
    pub density: usize,
    pub step1: Step1Record,
    pub base: Option<BaseRecord>,
    pub levels: Vec<LevelRecord>,
    pub self_checks: usize,
    pub queries: usize,
}

impl SearchTrace {
    /// Short content hash, stable across runs.
    pub fn id(&self) -> String {
        let json = serde_json::to_vec(self).expect("trace serializes");
        hex::encode(&Sha256::digest(json)[..8])
    }

    pub fn segments(&self) -> impl Iterator<Item = &SegmentRecord> {
        self.step1
            .segments
            .iter()
            .chain(self.levels.iter().flat_map(|l| l.segments.iter()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub certificate: CopyCertificate,
    pub trace: SearchTrace,
}

/// Runs the search, doubling the sampling density whenever an attempt ends
/// inconclusively, up to the cap.
pub fn find_copy(norm: &Norm, oracle: &dyn ColouringOracle, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let poly = check_precondition(norm, cfg)?;
    let mut restarts = Vec::new();
    let mut density = cfg.density;
    loop {
        let mut run = Run::new(poly, norm, oracle, cfg, density);
        match run.search() {
            Ok(points) => {
                let mut trace = run.trace;
                trace.restarts = restarts;
                return run_certificate(norm, oracle, cfg, points, trace);
            }
            Err(Error::Inconclusive { reason, .. }) => {
                restarts.push(Restart { density, reason: reason.clone() });
                if density >= cfg.density_cap {
                    return Err(Error::Inconclusive { density, reason });
                }
                density = (density * 2).min(cfg.density_cap);
            }
            Err(e) => return Err(e),
        }
    }
}

fn run_certificate(
    norm: &Norm,
    oracle: &dyn ColouringOracle,
    cfg: &SearchConfig,
    points: Vec<Vec2>,
    trace: SearchTrace,
) -> Result<SearchOutcome> {
    let seq = PlaneSequence::new(cfg.q, true, points).scaled(cfg.scale());
    let g = GeoProgression::new(cfg.q, cfg.n)?;
    let verdict = verify_copy(norm, &g, &seq, cfg.tol)?;
    let colours: Vec<u8> = seq.points.iter().map(|&p| oracle.colour(p)).collect();
    if !verdict.accepted || colours.iter().any(|&c| c != colours[0]) {
        return Err(Error::SelfCheckFailed(format!(
            "final copy failed its check (deviation {}, colours {colours:?})",
            verdict.max_deviation
        )));
    }
    let distances = seq
        .points
        .iter()
        .map(|&a| seq.points.iter().map(|&b| norm.dist(a, b)).collect())
        .collect();
    let certificate = CopyCertificate {
        points: seq,
        norm: norm.to_spec(),
        oracle: oracle.name(),
        colour: colours[0],
        tolerance: cfg.tol,
        max_deviation: verdict.max_deviation,
        distances,
        trace_id: trace.id(),
    };
    Ok(SearchOutcome { certificate, trace })
}

/// Collinear copy of `rho·(G(q) \ {0})` indices `1..=count` inside `seg`,
/// accumulating at its lexicographically greater endpoint.
pub fn inscribe_copy(norm: &Norm, seg: &Segment, q: f64, count: usize, rho: f64) -> Result<PlaneSequence> {
    let (g, h) = seg.lex_endpoints();
    let len = norm.dist(g, h);
    let needed = rho * q / (1.0 - q);
    if len < needed {
        return Err(Error::SegmentTooShort { length: len, needed });
    }
    let u = (h - g) * (1.0 / len);
    let points = (1..=count)
        .map(|i| g + u * (rho * q.powi(i as i32) / (1.0 - q)))
        .collect();
    Ok(PlaneSequence::new(q, false, points).scaled(rho))
}

/// Outcome of the first stage.
#[derive(Clone, Debug, PartialEq)]
pub enum Step1 {
    /// Points of one colour, one from every `Jᵢ`: already a full copy.
    Copy { points: Vec<Vec2>, colour: u8 },
    /// A segment `Jᵢ` whose samples miss one colour.
    Segment { record: SegmentRecord, index: usize },
}

/// Samples `Jᵢ = pos(i)·x + t·w` for `|t| ≤ τ·qⁱ/2` around the midpoint `x`
/// of facet 0, scaled by `cfg.scale()`.
pub fn step1_find_mono_segment(
    poly: &PolygonalNorm,
    oracle: &dyn ColouringOracle,
    cfg: &SearchConfig,
    density: usize,
    rng: &mut ChaCha8Rng,
) -> (Step1, Step1Record) {
    let f = poly.facet(0);
    let x = f.side(1).midpoint();
    let tau = 0.5;
    let scale = cfg.scale();
    let mut record = Step1Record { x, facet: 0, tau, ..Default::default() };
    let mut samples = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let c = x * (scale * gp_position(cfg.q, i));
        let half = f.w * (scale * tau * cfg.q.powi(i as i32) / 2.0);
        let seg = Segment::new(c + half, c - half);
        let pts = sample_segment(&seg, density, rng);
        let cols = query_all(oracle, &pts);
        samples.push((seg, pts, cols));
    }
    for colour in [0u8, 1] {
        let picks: Option<Vec<Vec2>> = samples
            .iter()
            .map(|(_, pts, cols)| cols.iter().position(|&c| c == colour).map(|j| pts[j]))
            .collect();
        if let Some(points) = picks {
            return (Step1::Copy { points, colour }, record);
        }
    }
    let (index, (seg, _, cols)) = samples
        .iter()
        .enumerate()
        .find(|(_, (_, _, cols))| cols.iter().all(|&c| c == cols[0]))
        .expect("some segment misses a colour");
    let rec = SegmentRecord {
        endpoints: [seg.a, seg.b],
        colour: cols[0],
        facet: 0,
        length: Norm::Polygonal(poly.clone()).dist(seg.a, seg.b),
        provenance: format!("step1:J{index}"),
    };
    record.segments.push(rec.clone());
    record.seed_index = Some(index);
    (Step1::Segment { record: rec, index }, record)
}

/// Both endpoints plus `density - 2` jittered interior points, one per
/// stratum, in order along the segment.
pub fn sample_segment(seg: &Segment, density: usize, rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    let inner = density.saturating_sub(2);
    let mut pts = Vec::with_capacity(inner + 2);
    pts.push(seg.a);
    for j in 0..inner {
        let t = (j as f64 + rng.gen::<f64>()) / inner as f64;
        pts.push(seg.point_at(t));
    }
    pts.push(seg.b);
    pts
}

fn query_all(oracle: &dyn ColouringOracle, pts: &[Vec2]) -> Vec<u8> {
    pts.par_iter().map(|&p| oracle.colour(p)).collect()
}

/// Mutable state of one attempt at a fixed density.
struct Run<'a> {
    poly: &'a PolygonalNorm,
    norm: &'a Norm,
    oracle: &'a dyn ColouringOracle,
    cfg: &'a SearchConfig,
    density: usize,
    rng: ChaCha8Rng,
    trace: SearchTrace,
}

impl<'a> Run<'a> {
    fn new(
        poly: &'a PolygonalNorm,
        norm: &'a Norm,
        oracle: &'a dyn ColouringOracle,
        cfg: &'a SearchConfig,
        density: usize,
    ) -> Self {
        let trace = SearchTrace {
            norm: norm.to_spec(),
            oracle: oracle.name(),
            config: cfg.clone(),
            restarts: Vec::new(),
            density,
            step1: Step1Record::default(),
            base: None,
            levels: Vec::new(),
            self_checks: 0,
            queries: 0,
        };
        Self {
            poly,
            norm,
            oracle,
            cfg,
            density,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            trace,
        }
    }

    fn colour(&mut self, p: Vec2) -> u8 {
        self.trace.queries += 1;
        self.oracle.colour(p)
    }

    fn sample(&mut self, seg: &Segment) -> (Vec<Vec2>, Vec<u8>) {
        let pts = sample_segment(seg, self.density, &mut self.rng);
        let cols = query_all(self.oracle, &pts);
        self.trace.queries += pts.len();
        (pts, cols)
    }

    fn inconclusive(&self, reason: impl Into<String>) -> Error {
        Error::Inconclusive { density: self.density, reason: reason.into() }
    }

    /// Explicit check of a copy of `G(q)` indices `level..n`.
    fn confirm(&mut self, level: usize, points: &[Vec2]) -> Result<Option<u8>> {
        let rho = self.cfg.scale() * self.cfg.q.powi(level as i32);
        let seq = PlaneSequence::new(self.cfg.q, true, points.to_vec()).scaled(rho);
        let g = GeoProgression::new(self.cfg.q, points.len().max(2))?;
        if points.len() >= 2 && !verify_copy(self.norm, &g, &seq, self.cfg.tol)?.accepted {
            return Ok(None);
        }
        let first = self.colour(points[0]);
        for &p in &points[1..] {
            if self.colour(p) != first {
                return Ok(None);
            }
        }
        Ok(Some(first))
    }

    fn search(&mut self) -> Result<Vec<Vec2>> {
        let (step1, record) =
            step1_find_mono_segment(self.poly, self.oracle, self.cfg, self.density, &mut self.rng);
        self.trace.queries += self.cfg.n * self.density;
        self.trace.step1 = record;
        let seed = match step1 {
            Step1::Copy { points, .. } => {
                return match self.confirm(0, &points)? {
                    Some(_) => Ok(points),
                    None => Err(self.inconclusive("step-1 picks do not form a copy")),
                };
            }
            Step1::Segment { record, .. } => record,
        };
        let (level, mut points, mut colour) = self.base_copy(&seed)?;
        for s in (1..=level).rev() {
            let (next, c) = ladder::extend(self, s, points, colour)?;
            points = next;
            colour = c;
        }
        Ok(points)
    }

    /// Longest copy of a `G(q)` tail that fits in the seed and is
    /// monochromatic when queried; a single point always qualifies.
    fn base_copy(&mut self, seed: &SegmentRecord) -> Result<(usize, Vec<Vec2>, u8)> {
        let seg = Segment::new(seed.endpoints[0], seed.endpoints[1]);
        let (q, n) = (self.cfg.q, self.cfg.n);
        for s in 1..n {
            let rho = self.cfg.scale() * q.powi(s as i32 - 1);
            let Ok(copy) = inscribe_copy(self.norm, &seg, q, n - s, rho) else { continue };
            if let Some(colour) = self.confirm(s, &copy.points)? {
                self.trace.base = Some(BaseRecord { level: s, colour, points: copy.points.clone() });
                return Ok((s, copy.points, colour));
            }
        }
        let p = seg.midpoint();
        let colour = self.colour(p);
        self.trace.base = Some(BaseRecord { level: n - 1, colour, points: vec![p] });
        Ok((n - 1, vec![p], colour))
    }
}
