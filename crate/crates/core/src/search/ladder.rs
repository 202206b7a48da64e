//! One rung of the search: extend a monochromatic copy of `G(q)` indices
//! `s..n` by the point of index `s - 1`.
//!
//! Every segment the search believes monochromatic is a [`Region`] that
//! remembers the copy it would complete. When a query inside a region
//! disagrees with its claimed colour, the disagreeing point completes that
//! copy, after the copy's own points have been checked the same way. So a
//! wrong belief never leads to a wrong answer, only to an earlier one.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::geom::{Segment, Vec2};
use crate::progression::extension_segment;

use super::{inscribe_copy, LevelRecord, Run, SegmentRecord, SlideRecord};

/// A copy whose points all lie in `origin` (or were queried directly).
struct CopyNode {
    points: Vec<Vec2>,
    colour: u8,
    origin: Option<Rc<Region>>,
}

enum Region {
    /// A translated side of the unit disc: every point completes `parent`.
    Side { parent: Rc<CopyNode> },
    /// The union of the last chain side over all slides of `start`.
    Swept(Swept),
}

struct Swept {
    host: Rc<Region>,
    host_colour: u8,
    /// Copy inscribed in the host at slide offset 0.
    start: Vec<Vec2>,
    /// Chain sides `E₁..E_p` at offset 0.
    sides: Vec<Segment>,
    /// Copies inscribed in `E₁..E_{p-1}` at offset 0.
    copies: Vec<Vec<Vec2>>,
    /// N-unit slide direction.
    dir: Vec2,
    t_max: f64,
    colour: u8,
}

impl Region {
    fn claimed(&self) -> u8 {
        match self {
            Region::Side { parent } => 1 - parent.colour,
            Region::Swept(sw) => sw.colour,
        }
    }
}

struct Side {
    seg: Segment,
    facet: usize,
    sigma: i8,
}

type Found = Option<Vec<Vec2>>;

struct Ladder<'r, 'a> {
    run: &'r mut Run<'a>,
    s: usize,
    rho: f64,
    /// Points of the copy being extended.
    m: usize,
    record: LevelRecord,
}

pub(super) fn extend(run: &mut Run<'_>, s: usize, points: Vec<Vec2>, colour: u8) -> Result<(Vec<Vec2>, u8)> {
    let rho = run.cfg.scale() * run.cfg.q.powi(s as i32 - 1);
    let record = LevelRecord {
        level: s,
        rho,
        colour_in: colour,
        segments: Vec::new(),
        facets: Vec::new(),
        cycle: None,
        slides: Vec::new(),
        outcome: String::new(),
        colour_out: colour,
        points_out: Vec::new(),
    };
    let m = points.len();
    let mut lad = Ladder { run, s, rho, m, record };
    let start = Rc::new(CopyNode { points, colour, origin: None });
    let (outcome, found) = lad.climb(start)?;
    let (points, colour) = lad.finish(found)?;
    lad.record.outcome = outcome.into();
    lad.record.colour_out = colour;
    lad.record.points_out = points.clone();
    lad.run.trace.levels.push(lad.record);
    Ok((points, colour))
}

impl Ladder<'_, '_> {
    fn q(&self) -> f64 {
        self.run.cfg.q
    }

    /// Length a segment needs to hold the extended copy.
    fn need(&self) -> f64 {
        let q = self.q();
        self.rho * (1.0 - q.powi(self.m as i32)) / (1.0 - q)
    }

    fn finish(&mut self, found: Vec<Vec2>) -> Result<(Vec<Vec2>, u8)> {
        match self.run.confirm(self.s - 1, &found)? {
            Some(c) => Ok((found, c)),
            None => Err(self.run.inconclusive(format!(
                "level {} produced a copy that failed its explicit check",
                self.s
            ))),
        }
    }

    fn tick(&self, count: &mut usize) -> Result<()> {
        *count += 1;
        if *count > self.run.cfg.max_iterations {
            return Err(Error::IterationLimit(self.run.cfg.max_iterations));
        }
        Ok(())
    }

    fn climb(&mut self, start: Rc<CopyNode>) -> Result<(&'static str, Vec<Vec2>)> {
        let mut current = start;
        // (copy, chosen side region, its segment, facet) per stage.
        let mut stages: Vec<(Rc<CopyNode>, Rc<Region>, Segment, usize)> = Vec::new();
        let mut rounds = 0;
        loop {
            self.tick(&mut rounds)?;
            let label = format!("level{}:stage{}", self.s, stages.len());
            let (region, side) = match self.try_sides(&current, &label)? {
                Ok(found) => return Ok(("extended", found)),
                Err(chosen) => chosen,
            };
            self.record.facets.push(side.facet);
            if self.run.norm.dist(side.seg.a, side.seg.b) >= self.need() {
                return Ok(("inscribed", self.inscribe_final(&region, &side.seg)?));
            }
            if let Some(j1) = stages.iter().position(|st| st.3 == side.facet) {
                let j2 = stages.len();
                self.record.cycle = Some([j1, j2]);
                stages.push((current, region, side.seg, side.facet));
                return self.slide(&stages[j1..]);
            }
            let copy = inscribe_copy(self.run.norm, &side.seg, self.q(), self.m, self.rho)?;
            let next = Rc::new(CopyNode {
                points: copy.points,
                colour: region.claimed(),
                origin: Some(region.clone()),
            });
            stages.push((current, region, side.seg, side.facet));
            current = next;
        }
    }

    /// Samples every extension side of `node`. Returns a completed copy, or
    /// the first side (all samples of the other colour) to continue from.
    fn try_sides(
        &mut self,
        node: &Rc<CopyNode>,
        label: &str,
    ) -> Result<std::result::Result<Vec<Vec2>, (Rc<Region>, Side)>> {
        let sides = self.extension_sides(node)?;
        let mut chosen = None;
        for (i, side) in sides.into_iter().enumerate() {
            let region = Rc::new(Region::Side { parent: node.clone() });
            if let Some(found) = self.sample_side(&region, node, &side, &format!("{label}:side{i}"))? {
                return Ok(Ok(found));
            }
            if chosen.is_none() {
                chosen = Some((region, side));
            }
        }
        Ok(Err(chosen.expect("a copy has at least one extension side")))
    }

    fn extension_sides(&self, node: &CopyNode) -> Result<Vec<Side>> {
        let poly = self.run.poly;
        if node.points.len() == 1 {
            let z = node.points[0];
            return Ok((0..poly.facet_count())
                .flat_map(|k| [1i8, -1].map(|sigma| (k, sigma)))
                .map(|(facet, sigma)| {
                    let side = poly.facet(facet).side(sigma);
                    Side { seg: Segment::new(z + side.a * self.rho, z + side.b * self.rho), facet, sigma }
                })
                .collect());
        }
        match extension_segment(poly, &node.points, self.q(), self.rho) {
            Ok(exts) => Ok(exts
                .into_iter()
                .map(|e| Side { seg: e.segment, facet: e.witness.k, sigma: e.witness.sigma })
                .collect()),
            Err(e @ (Error::SelfCheckFailed(_) | Error::NoWitness)) => {
                Err(self.run.inconclusive(format!("extension of a level-{} copy: {e}", self.s)))
            }
            Err(e) => Err(e),
        }
    }

    fn sample_side(&mut self, region: &Rc<Region>, parent: &CopyNode, side: &Side, label: &str) -> Result<Found> {
        let (pts, cols) = self.run.sample(&side.seg);
        for (&x, &c) in pts.iter().zip(&cols) {
            if parent.points.len() >= 2 {
                self.sum_direction_check(side, x, parent.points[0], parent.points[1])?;
            }
            if let Some(found) = self.resolve_point(region, x, Some(c))? {
                return Ok(Some(found));
            }
        }
        self.push_record(&side.seg, region.claimed(), side.facet, label.to_string());
        Ok(None)
    }

    fn sum_direction_check(&mut self, side: &Side, x: Vec2, z1: Vec2, z2: Vec2) -> Result<()> {
        let sg = f64::from(side.sigma);
        let ok = self.run.poly.sum_direction_check(side.facet, (x - z1) * sg, (z1 - z2) * sg);
        self.run.trace.self_checks += 1;
        match ok {
            Ok(true) => Ok(()),
            Ok(false) | Err(_) => Err(self.run.inconclusive(format!(
                "sum-direction check failed on facet {} at {x}",
                side.facet
            ))),
        }
    }

    fn push_record(&mut self, seg: &Segment, colour: u8, facet: usize, provenance: String) {
        let length = self.run.norm.dist(seg.a, seg.b);
        self.record.segments.push(SegmentRecord {
            endpoints: [seg.a, seg.b],
            colour,
            facet,
            length,
            provenance,
        });
    }

    /// Puts the extended copy into a region long enough for it, its last
    /// point on the lexicographically greater endpoint.
    fn inscribe_final(&mut self, region: &Rc<Region>, seg: &Segment) -> Result<Vec<Vec2>> {
        let q = self.q();
        let (g, h) = seg.lex_endpoints();
        let u = (h - g) * (1.0 / self.run.norm.dist(g, h));
        let tail = q.powi(self.m as i32);
        let points: Vec<Vec2> = (0..=self.m)
            .map(|i| g + u * (self.rho * (q.powi(i as i32) - tail) / (1.0 - q)))
            .collect();
        let node = Rc::new(CopyNode { points, colour: region.claimed(), origin: Some(region.clone()) });
        Ok(match self.resolve_copy(&node)? {
            Some(found) => found,
            None => node.points.clone(),
        })
    }

    /// Sliding phase. `cycle[0]` holds the host side; the remaining stages
    /// form the chain that returns to the host's facet.
    fn slide(&mut self, cycle: &[(Rc<CopyNode>, Rc<Region>, Segment, usize)]) -> Result<(&'static str, Vec<Vec2>)> {
        let p = cycle.len() - 1;
        let facet = cycle[0].3;
        let lambda = self.run.poly.facet(facet).lambda;
        let q = self.q();
        let copy_len = self.rho * q / (1.0 - q);
        let mut host = cycle[0].1.clone();
        let mut host_seg = cycle[0].2;
        let mut start = cycle[1].0.points.clone();
        let mut sides: Vec<Segment> = cycle[1..].iter().map(|st| st.2).collect();
        let mut copies: Vec<Vec<Vec2>> = cycle[2..].iter().map(|st| st.0.points.clone()).collect();
        let mut rounds = 0;
        loop {
            self.tick(&mut rounds)?;
            let (g, h) = host_seg.lex_endpoints();
            let host_len = self.run.norm.dist(g, h);
            let dir = (h - g) * (1.0 / host_len);
            let t_max = (host_len - copy_len).max(0.0);
            let last = sides[p - 1];
            let (lo, hi) = if (last.b - last.a).dot(dir) >= 0.0 { (last.a, last.b) } else { (last.b, last.a) };
            let swept_seg = Segment::new(lo, hi + dir * t_max);
            let host_colour = host.claimed();
            let colour = if p % 2 == 0 { host_colour } else { 1 - host_colour };
            let swept = Rc::new(Region::Swept(Swept {
                host: host.clone(),
                host_colour,
                start: start.clone(),
                sides: sides.clone(),
                copies: copies.clone(),
                dir,
                t_max,
                colour,
            }));
            let label = format!("level{}:slide{}", self.s, rounds);
            let (pts, cols) = self.run.sample(&swept_seg);
            for (&x, &c) in pts.iter().zip(&cols) {
                if let Some(found) = self.resolve_point(&swept, x, Some(c))? {
                    return Ok(("resolved", found));
                }
            }
            let new_len = self.run.norm.dist(swept_seg.a, swept_seg.b);
            self.record.slides.push(SlideRecord {
                facet,
                host_length: host_len,
                new_length: new_len,
                expected_growth: self.rho * lambda - copy_len,
            });
            self.push_record(&swept_seg, colour, facet, format!("{label}:host"));
            if new_len >= self.need() {
                return Ok(("slid", self.inscribe_final(&swept, &swept_seg)?));
            }

            // Rebuild the chain from a copy at the greater end of the new host.
            host = swept;
            host_seg = swept_seg;
            let first = inscribe_copy(self.run.norm, &host_seg, q, self.m, self.rho)?;
            let mut prev = Rc::new(CopyNode {
                points: first.points.clone(),
                colour: host.claimed(),
                origin: Some(host.clone()),
            });
            start = first.points;
            sides.clear();
            copies.clear();
            for i in 1..=p {
                let chain_label = format!("{label}:chain{i}");
                let (region, side) = match self.try_sides(&prev, &chain_label)? {
                    Ok(found) => return Ok(("extended", found)),
                    Err(chosen) => chosen,
                };
                if side.facet != cycle[i].3 {
                    return Err(Error::SelfCheckFailed(format!(
                        "slide chain left the facet cycle at step {i}: {} instead of {}",
                        side.facet, cycle[i].3
                    )));
                }
                sides.push(side.seg);
                if i < p {
                    let c = inscribe_copy(self.run.norm, &side.seg, q, self.m, self.rho)?;
                    copies.push(c.points.clone());
                    prev = Rc::new(CopyNode {
                        points: c.points,
                        colour: region.claimed(),
                        origin: Some(region),
                    });
                }
            }
        }
    }

    /// `None` when `x` has the region's claimed colour; otherwise a copy one
    /// point longer than the region's parent, with all points checked.
    fn resolve_point(&mut self, region: &Rc<Region>, x: Vec2, seen: Option<u8>) -> Result<Found> {
        let c = match seen {
            Some(c) => c,
            None => self.run.colour(x),
        };
        if c == region.claimed() {
            return Ok(None);
        }
        match &**region {
            Region::Side { parent } => {
                let parent = parent.clone();
                if let Some(found) = self.resolve_copy(&parent)? {
                    return Ok(Some(found));
                }
                let mut pts = Vec::with_capacity(parent.points.len() + 1);
                pts.push(x);
                pts.extend_from_slice(&parent.points);
                Ok(Some(pts))
            }
            Region::Swept(sw) => {
                let side = unroll(sw, x);
                self.resolve_point(&side, x, Some(c))
            }
        }
    }

    /// `None` when every point of `node` agrees with its region's claim.
    fn resolve_copy(&mut self, node: &Rc<CopyNode>) -> Result<Found> {
        let Some(region) = node.origin.clone() else { return Ok(None) };
        for &y in &node.points {
            if let Some(found) = self.resolve_point(&region, y, None)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
}

/// The chain translated by the slide offset whose last side holds `x`,
/// returned as that side's region.
fn unroll(sw: &Swept, x: Vec2) -> Rc<Region> {
    let last = sw.sides[sw.sides.len() - 1];
    let dd = sw.dir.dot(sw.dir);
    let along = (x - last.a).dot(sw.dir) / dd;
    let span = (last.b - last.a).dot(sw.dir) / dd;
    let (lo, hi) = (span.min(0.0), span.max(0.0));
    let t0 = (along - hi).max(0.0);
    let t1 = (along - lo).min(sw.t_max);
    let t = (0.5 * (t0 + t1)).clamp(0.0, sw.t_max);
    let shift = sw.dir * t;
    let mut prev = Rc::new(CopyNode {
        points: sw.start.iter().map(|&p| p + shift).collect(),
        colour: sw.host_colour,
        origin: Some(sw.host.clone()),
    });
    for copy in &sw.copies {
        let region = Rc::new(Region::Side { parent: prev.clone() });
        prev = Rc::new(CopyNode {
            points: copy.iter().map(|&p| p + shift).collect(),
            colour: 1 - prev.colour,
            origin: Some(region),
        });
    }
    Rc::new(Region::Side { parent: prev })
}
