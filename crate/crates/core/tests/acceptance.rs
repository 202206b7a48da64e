//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.
//!
//! Checks are made with code written here rather than with the library's own
//! verifiers: norms by ray casting against the polygon, progression
//! distances from the closed form, oracle colours re-derived from their
//! definitions.

mod common;

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use minkowski_ramsey::bisector::{count_intersections, linearity_test, trace_bisector, BisectorSpec};
use minkowski_ramsey::distinct::{red_blue_filter, select_contracting_towards, ContractingSequence};
use minkowski_ramsey::hypergraph::{core_disjointness_check, peel_transversals, FiniteHypergraph};
use minkowski_ramsey::oracle;
use minkowski_ramsey::progression::{extension_segment, find_direction, verify_copy, DirectionWitness, GeoProgression, PlaneSequence};
use minkowski_ramsey::ring::{psi, PowersOfTwo, RingColouring};
use minkowski_ramsey::search::{find_copy, SearchConfig, SearchOutcome};
use minkowski_ramsey::{Error, Norm, PolygonalNorm, Vec2, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

type Pts = Vec<(f64, f64)>;

fn polygons() -> Vec<(&'static str, Pts)> {
    let regular = |n: usize| -> Pts {
        (0..n)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / n as f64;
                (a.cos(), a.sin())
            })
            .collect()
    };
    let half = [(0.0f64, 1.0), (34.0, 1.12), (73.0, 1.05), (109.0, 1.18), (148.0, 0.97)];
    let mut ten: Pts = half.iter().map(|&(d, r)| (r * d.to_radians().cos(), r * d.to_radians().sin())).collect();
    ten.extend(ten.clone().iter().map(|&(x, y)| (-x, -y)));
    vec![
        ("square", vec![(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)]),
        ("rectangle", vec![(2.0, -1.0), (2.0, 1.0), (-2.0, 1.0), (-2.0, -1.0)]),
        ("hexagon", regular(6)),
        ("octagon", regular(8)),
        ("irregular 10-gon", ten),
    ]
}

fn norm_of(vertices: &Pts) -> Norm {
    Norm::polygon(vertices.iter().map(|&(x, y)| Vec2::new(x, y)).collect()).expect("valid polygon")
}

/// Gauge by intersecting the ray `t·x` with every edge.
fn ray_gauge(vertices: &Pts, x: (f64, f64)) -> f64 {
    if x == (0.0, 0.0) {
        return 0.0;
    }
    let cross = |a: (f64, f64), b: (f64, f64)| a.0 * b.1 - a.1 * b.0;
    let n = vertices.len();
    let mut best = f64::NAN;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let d = (b.0 - a.0, b.1 - a.1);
        let den = cross(x, d);
        if den.abs() < 1e-300 {
            continue;
        }
        let t = cross(a, d) / den;
        let s = cross(a, x) / den;
        if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
            best = if best.is_nan() { 1.0 / t } else { best.max(1.0 / t) };
        }
    }
    best
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for (_, verts) in polygons() {
        let norm = norm_of(&verts);
        for i in 0..10_000 {
            let x = if i % 10 == 0 {
                // Along a vertex direction.
                let v = verts[rng.gen_range(0..verts.len())];
                let s = rng.gen_range(0.01..10.0);
                (v.0 * s, v.1 * s)
            } else {
                (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))
            };
            let ours = norm.eval(Vec2::new(x.0, x.1));
            let theirs = ray_gauge(&verts, x);
            worst = worst.max((ours - theirs).abs() / theirs.max(1.0));
        }
    }
    verdict(worst <= 1e-9, format!("5 polygons x 10^4 points, max gap {worst:.2e}"))
}

/// `count + 1` points of `scale·(G(q) \ {0})` stepping along the edge
/// `e` of the polygon (from vertex `e` to `e + 1`).
fn synthetic_copy(verts: &Pts, e: usize, q: f64, scale: f64, start: Vec2, fractions: &[f64]) -> Vec<Vec2> {
    let a = verts[e];
    let b = verts[(e + 1) % verts.len()];
    let mut z = start;
    let mut pts = vec![z];
    for (i, &f) in fractions.iter().enumerate() {
        let u = Vec2::new(a.0 + f * (b.0 - a.0), a.1 + f * (b.1 - a.1));
        z = z - u * (scale * q.powi(i as i32 + 1));
        pts.push(z);
    }
    pts
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut copies, mut ext_points, mut failures) = (0usize, 0usize, Vec::new());
    let mut worst: f64 = 0.0;
    for (name, verts) in polygons() {
        let norm = norm_of(&verts);
        let poly = norm.as_polygonal().unwrap().clone();
        let m = verts.len() / 2;
        for k in 0..m {
            for _ in 0..1000 {
                let sigma: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
                let e = if sigma == 1 { k } else { k + m };
                let q = rng.gen_range(0.05..0.7);
                let scale = rng.gen_range(0.2..5.0);
                let start = Vec2::new(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
                let len = rng.gen_range(2..9);
                let fractions: Vec<f64> = (0..len).map(|_| rng.gen_range(0.02..0.98)).collect();
                let pts = synthetic_copy(&verts, e, q, scale, start, &fractions);
                copies += 1;
                let dev = common::copy_deviation(&verts, &pts, q, scale, 1);
                worst = worst.max(dev);
                let g = GeoProgression::new(q, pts.len()).unwrap();
                let seq = PlaneSequence::new(q, false, pts.clone()).scaled(scale);
                if !verify_copy(&norm, &g, &seq, 1e-9).map(|v| v.accepted).unwrap_or(false) || dev > 1e-9 {
                    failures.push(format!("{name} k={k}: copy rejected (dev {dev:.1e})"));
                    continue;
                }
                match find_direction(&poly, &pts, q) {
                    Ok(d) if d.witnesses == vec![DirectionWitness { k, sigma }] => {}
                    other => failures.push(format!("{name} k={k} sigma={sigma}: direction {other:?}")),
                }
                match extension_segment(&poly, &pts, q, scale) {
                    Ok(exts) => {
                        for ext in exts {
                            for s in 0..9 {
                                let z0 = ext.segment.point_at(s as f64 / 8.0);
                                let mut full = vec![z0];
                                full.extend_from_slice(&pts);
                                let dev = common::copy_deviation(&verts, &full, q, scale, 0);
                                worst = worst.max(dev);
                                let g = GeoProgression::new(q, full.len()).unwrap();
                                let ok = verify_copy(&norm, &g, &PlaneSequence::new(q, true, full).scaled(scale), 1e-9)
                                    .map(|v| v.accepted)
                                    .unwrap_or(false);
                                if !ok || dev > 1e-9 {
                                    failures.push(format!("{name} k={k}: extension point misses by {dev:.1e}"));
                                }
                                ext_points += 1;
                            }
                        }
                    }
                    Err(e) => failures.push(format!("{name} k={k}: extension {e}")),
                }
            }
        }
    }
    let detail = format!(
        "{copies} synthetic copies, {ext_points} extension points, max deviation {worst:.2e}, {} failures{}",
        failures.len(),
        failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    verdict(failures.is_empty(), detail)
}

/// Colour rules re-derived from the oracle definitions.
fn expected_colour(name: &str, norm: &Norm, p: Vec2) -> u8 {
    let (kind, args) = name.split_once(':').unwrap_or((name, ""));
    let a: Vec<f64> = args.split(',').filter(|s| !s.is_empty()).map(|s| s.parse().unwrap()).collect();
    let parity = |x: f64| (x.rem_euclid(2.0) >= 1.0) as u8;
    match kind {
        "half-plane" => u8::from(a[0] * p.x + a[1] * p.y + a[2] > 0.0),
        "stripes" => {
            let t = a[1].to_radians();
            parity(((p.x * t.cos() + p.y * t.sin()) / a[0]).floor())
        }
        "checkerboard" => parity((p.x / a[0]).floor() + (p.y / a[0]).floor()),
        "ring-parity" => oracle::parse(name, norm).unwrap().colour(p),
        _ => panic!("unknown oracle {name}"),
    }
}

struct GridRun {
    label: String,
    result: Result<SearchOutcome, Error>,
}

fn grid() -> Vec<GridRun> {
    let norms = [
        ("square", Norm::Polygonal(PolygonalNorm::linf())),
        ("hexagon", Norm::Polygonal(PolygonalNorm::regular(6, 0.0).unwrap())),
        ("octagon", Norm::Polygonal(PolygonalNorm::regular(8, 0.0).unwrap())),
    ];
    let oracles = [
        "half-plane:0,1,0",
        "stripes:0.05,30",
        "stripes:1,30",
        "stripes:5,30",
        "checkerboard:0.5",
        "checkerboard:10",
        "ring-parity",
    ];
    let mut runs = Vec::new();
    let mut seed = 0;
    for (nname, norm) in &norms {
        let lambda = norm.as_polygonal().unwrap().min_side_length();
        let bound = lambda / (1.0 + lambda);
        for q in [0.1, 0.3, 0.45 * bound].into_iter().filter(|&q| q < bound) {
            for o in oracles {
                seed += 1;
                let orc = oracle::parse(o, norm).unwrap();
                let cfg = SearchConfig { seed, ..SearchConfig::new(q, 8) };
                runs.push(GridRun { label: format!("{nname} q={q:.4} {o}"), result: find_copy(norm, orc.as_ref(), &cfg) });
            }
        }
    }
    runs
}

/// Independent soundness check of a certificate: distances and colours.
fn certificate_sound(out: &SearchOutcome) -> Result<(), String> {
    let cert = &out.certificate;
    let norm = Norm::from_spec(&cert.norm).map_err(|e| e.to_string())?;
    let verts = common::vertex_pairs(&norm);
    if cert.points.points.len() != 8 {
        return Err(format!("{} points", cert.points.points.len()));
    }
    let first = usize::from(!cert.points.include_zero);
    let dev = common::copy_deviation(&verts, &cert.points.points, cert.points.q, cert.points.scale, first);
    if dev > 1e-9 {
        return Err(format!("distance deviation {dev:.2e}"));
    }
    for &p in &cert.points.points {
        if expected_colour(&cert.oracle, &norm, p) != cert.colour {
            return Err(format!("point {p} has the other colour"));
        }
    }
    Ok(())
}

fn criterion_3() -> Verdict {
    let runs = grid();
    let (mut ok, mut inconclusive, mut unsound, mut other) = (0, 0, Vec::new(), Vec::new());
    for r in &runs {
        match &r.result {
            Ok(out) => match certificate_sound(out) {
                Ok(()) => ok += 1,
                Err(e) => unsound.push(format!("{}: {e}", r.label)),
            },
            Err(Error::Inconclusive { .. }) => inconclusive += 1,
            Err(e) => other.push(format!("{}: {e}", r.label)),
        }
    }
    let rate = ok as f64 / runs.len() as f64;
    let detail = format!(
        "{ok}/{} certified ({:.1}%), {inconclusive} inconclusive, {} unsound, {} other errors{}",
        runs.len(),
        100.0 * rate,
        unsound.len(),
        other.len(),
        unsound.iter().chain(&other).next().map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    verdict(rate >= 0.9 && unsound.is_empty() && other.is_empty(), detail)
}

fn criterion_4() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("square.json"), r#"{"type": "polygon", "vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}"#).unwrap();
    let bound = 2.0f64 / 3.0;
    let mut notes = Vec::new();
    let mut pass = true;
    for q in [bound, 0.9] {
        let out = Command::new(env!("CARGO_BIN_EXE_minkowski-ramsey"))
            .current_dir(dir.path())
            .args(["find-copy", "--norm", "square.json", "--oracle", "half-plane", "--q", &q.to_string(), "--prefix", "8"])
            .output()
            .unwrap();
        let body: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
        let code = out.status.code();
        let lib = find_copy(
            &Norm::Polygonal(PolygonalNorm::linf()),
            &oracle::HalfPlane { a: 0.0, b: 1.0, c: 0.0 },
            &SearchConfig::new(q, 8),
        );
        let good = code == Some(1)
            && body["error"] == "PreconditionViolated"
            && matches!(lib, Err(Error::PreconditionViolated(_)));
        pass &= good;
        notes.push(format!("q={q}: exit {code:?} {}", body["error"]));
    }
    verdict(pass, notes.join(", "))
}

/// Triangular schedule 1; 1, 2; 1, 2, 3; …
fn schedule(j: u64) -> u64 {
    let mut t = 1;
    let mut start = 1;
    while start + t <= j {
        start += t;
        t += 1;
    }
    j - start + 1
}

/// Radii of the nested rings over the powers of two, built directly.
fn ring_radii(vertices: Option<&Pts>, cover: f64) -> Vec<f64> {
    let n = |x: f64, y: f64| match vertices {
        Some(v) => common::gauge(v, (x, y)),
        None => x.hypot(y),
    };
    let mut radii = vec![1.0f64];
    while *radii.last().unwrap() < cover || radii.len() < 10 {
        let r = *radii.last().unwrap();
        let d = (0..)
            .map(|e| 2f64.powi(e))
            .map(|x| n(x, 0.0))
            .find(|&d| d > 2.0 * r)
            .unwrap();
        radii.push(r + d);
    }
    radii
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let square: Pts = vec![(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let cases: [(&str, Norm, Option<&Pts>); 2] =
        [("l2", Norm::lp(2.0).unwrap(), None), ("square", norm_of(&square), Some(&square))];
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, norm, verts) in cases {
        let radii = ring_radii(verts, 0.0);
        let lib = RingColouring::build(&norm, &PowersOfTwo, 10).unwrap();
        let growth = radii.windows(2).all(|w| w[1] > 3.0 * w[0]);
        let agree = lib.radii().iter().zip(&radii).all(|(a, b)| (a - b).abs() <= 1e-9 * b);
        let n = |p: Vec2| match verts {
            Some(v) => common::gauge(v, (p.x, p.y)),
            None => p.x.hypot(p.y),
        };
        let mut mono = 0;
        let mut schedule_agrees = true;
        for _ in 0..100 {
            let (swap, fx, fy) = (rng.gen_bool(0.5), rng.gen_bool(0.5), rng.gen_bool(0.5));
            let shift = Vec2::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
            let image: Vec<Vec2> = std::iter::once(0.0)
                .chain((0..40).map(|e| 2f64.powi(e)))
                .map(|x| {
                    let (a, b) = if swap { (0.0, x) } else { (x, 0.0) };
                    Vec2::new(if fx { -a } else { a }, if fy { -b } else { b }) + shift
                })
                .collect();
            let far = image.iter().map(|&p| n(p)).fold(0.0, f64::max);
            let radii = ring_radii(verts, far);
            let parities: std::collections::BTreeSet<u64> = image
                .iter()
                .map(|&p| {
                    let d = n(p);
                    let ring = radii.iter().position(|&r| d <= r).unwrap() as u64 + 1;
                    schedule_agrees &= psi(ring) == schedule(ring);
                    schedule(ring) % 2
                })
                .collect();
            if parities.len() < 2 {
                mono += 1;
            }
        }
        pass &= growth && agree && mono == 0 && schedule_agrees;
        notes.push(format!("{name}: growth {growth}, radii agree {agree}, {mono}/100 monochromatic"));
    }
    verdict(pass, notes.join("; "))
}

/// Largest subset with pairwise distinct distances, by enumerating subsets.
fn exhaustive_distinct(d: &[Vec<f64>], eps: f64) -> usize {
    let n = d.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let mut ds: Vec<f64> = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                ds.push(d[i][j]);
            }
        }
        ds.sort_by(f64::total_cmp);
        if ds.windows(2).all(|w| w[1] - w[0] > eps) {
            best = size;
        }
    }
    best
}

struct DistinctTally {
    not_distinct: usize,
    short: usize,
    gaps: BTreeMap<usize, usize>,
    collisions: usize,
    violations: usize,
}

/// Runs 100 contracting sets of 12 points through the filter. With `tied`
/// the points step along the axes with ratio exactly 1/3, so that many ℓ∞
/// distances coincide; otherwise directions and ratios are generic.
fn distinct_family(seed: u64, tied: bool) -> DistinctTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let square: Pts = vec![(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let norm = norm_of(&square);
    let eps = 1e-9;
    let dist = |a: Vec2, b: Vec2| common::gauge(&square, (a.x - b.x, a.y - b.y));
    let mut tally = DistinctTally { not_distinct: 0, short: 0, gaps: BTreeMap::new(), collisions: 0, violations: 0 };
    for _ in 0..100 {
        let y = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut r = 1.0;
        let mut points = Vec::new();
        for _ in 0..12 {
            let dir = if tied {
                [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(-1.0, 0.0), Vec2::new(0.0, -1.0)][rng.gen_range(0..4)]
            } else {
                let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                Vec2::new(a.cos(), a.sin())
            };
            let u = dir * (1.0 / common::gauge(&square, (dir.x, dir.y)));
            points.push(y + u * r);
            // Ratios stay above 0.2 so the innermost radius (about 2e-8)
            // is still resolved by the absolute tolerance.
            r *= if tied { 1.0 / 3.0 } else { rng.gen_range(0.2..1.0 / 3.0) };
        }
        let cs = select_contracting_towards(&points, y, &norm).unwrap();
        assert_eq!(cs.pts.len(), 12);
        let red = red_blue_filter(&cs, &norm, eps).red;
        // O(n⁴) scan over pairs of pairs.
        let mut distinct = true;
        for a in 0..red.len() {
            for b in a + 1..red.len() {
                for c in 0..red.len() {
                    for d in c + 1..red.len() {
                        if (a, b) < (c, d) && (dist(red[a], red[b]) - dist(red[c], red[d])).abs() <= eps {
                            distinct = false;
                        }
                    }
                }
            }
        }
        tally.not_distinct += usize::from(!distinct);
        let dm: Vec<Vec<f64>> = cs.pts.iter().map(|&a| cs.pts.iter().map(|&b| dist(a, b)).collect()).collect();
        let best = exhaustive_distinct(&dm, eps);
        tally.short += usize::from(red.len() + 2 < best);
        *tally.gaps.entry(best.saturating_sub(red.len())).or_default() += 1;
        let (v, c) = index_collisions(&cs, &dist, eps);
        tally.violations += v;
        tally.collisions += c;
    }
    tally
}

fn criterion_6() -> Verdict {
    let random = distinct_family(6, false);
    let tied = distinct_family(60, true);
    let pass = random.not_distinct == 0
        && random.short == 0
        && tied.not_distinct == 0
        && random.violations + tied.violations == 0
        && tied.collisions > 0;
    verdict(
        pass,
        format!(
            "random sets: {} with repeated distances, {} more than 2 below the maximum (gaps {:?}); \
             tied sets: {} with repeated distances, {} equal-distance collisions, {} index violations, \
             size gap not bounded (gaps {:?})",
            random.not_distinct, random.short, random.gaps, tied.not_distinct, tied.collisions, tied.violations, tied.gaps
        ),
    )
}

/// Equal-distance pair collisions `(i, k1)`, `(j, k2)` and how many of them
/// have `i != j`.
fn index_collisions(cs: &ContractingSequence, dist: &dyn Fn(Vec2, Vec2) -> f64, eps: f64) -> (usize, usize) {
    let n = cs.pts.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |k| (i, k))).collect();
    let (mut bad, mut seen) = (0, 0);
    for (x, &(i, k1)) in pairs.iter().enumerate() {
        for &(j, k2) in &pairs[x + 1..] {
            if (dist(cs.pts[i], cs.pts[k1]) - dist(cs.pts[j], cs.pts[k2])).abs() <= eps {
                seen += 1;
                bad += usize::from(i != j);
            }
        }
    }
    (bad, seen)
}

/// Random edges of size `min_edge..=10`. With `sparse`, an edge is kept
/// only if it meets every earlier edge in fewer than `k` vertices.
fn random_hypergraph(rng: &mut ChaCha8Rng, min_edge: usize, sparse: Option<usize>) -> FiniteHypergraph {
    let v = rng.gen_range(12..=40);
    let m = rng.gen_range(1..=60);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for _ in 0..m {
        let size = rng.gen_range(min_edge..=10.min(v));
        let mut e: Vec<usize> = (0..v).collect();
        for i in 0..size {
            let j = rng.gen_range(i..v);
            e.swap(i, j);
        }
        e.truncate(size);
        if let Some(k) = sparse {
            if edges.iter().any(|f| f.iter().filter(|x| e.contains(x)).count() >= k) {
                continue;
            }
        }
        edges.push(e);
    }
    FiniteHypergraph::new(v, edges).unwrap()
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut clashes, mut succeeded, mut bad, mut refused) = (0, 0, 0, BTreeMap::<&str, usize>::new());
    for i in 0..200 {
        let k = [2, 3, 4][i % 3];
        let t = rng.gen_range(2..=3);
        let h = if i % 2 == 0 {
            random_hypergraph(&mut rng, 1, None)
        } else {
            random_hypergraph(&mut rng, t, Some(k))
        };
        clashes += usize::from(core_disjointness_check(&h, k).is_err());
        match peel_transversals(&h, k, t) {
            Ok(p) => {
                succeeded += 1;
                let mut owner = vec![0usize; h.vertex_count()];
                let mut disjoint = p.transversals.len() == t;
                for (c, tr) in p.transversals.iter().enumerate() {
                    for &v in tr {
                        disjoint &= owner[v] == 0;
                        owner[v] = c + 1;
                    }
                }
                let poly = h.edges().iter().all(|e| (1..=t).all(|c| e.iter().any(|&v| p.colours[v] == c)));
                bad += usize::from(!(disjoint && poly));
            }
            Err(e) => *refused.entry(e.kind()).or_default() += 1,
        }
    }
    verdict(
        clashes == 0 && bad == 0,
        format!("200 hypergraphs: {clashes} core clashes; peeling succeeded on {succeeded} ({bad} invalid), refused {refused:?}"),
    )
}

fn lp(p: f64, x: Vec2) -> f64 {
    (x.x.abs().powf(p) + x.y.abs().powf(p)).powf(1.0 / p)
}

fn random_point(rng: &mut ChaCha8Rng) -> Vec2 {
    Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))
}

/// Serialized intersection results of the random nonlinear pairs.
fn bisector_experiment(seed: u64) -> (Vec<String>, Vec<usize>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = Window::square(10.0);
    let (mut records, mut counts, mut bad) = (Vec::new(), Vec::new(), 0);
    while counts.len() < 50 {
        let p = if counts.len() % 2 == 0 { 3.0 } else { 4.0 };
        let b1 = BisectorSpec::new(p, random_point(&mut rng), random_point(&mut rng)).unwrap();
        let b2 = BisectorSpec::new(p, random_point(&mut rng), random_point(&mut rng)).unwrap();
        let nonlinear = [b1, b2].iter().all(|b| {
            let pts = trace_bisector(b, &window, 0.05).unwrap().points();
            pts.len() >= 3 && !linearity_test(&pts, window.diameter(), 1e-9).unwrap().linear
        });
        if !nonlinear {
            continue;
        }
        let found = count_intersections(&b1, &b2, &window, 0.05, 1e-6).unwrap();
        for &x in &found.points {
            let r1 = (lp(p, x - b1.y1) - lp(p, x - b1.y2)).abs();
            let r2 = (lp(p, x - b2.y1) - lp(p, x - b2.y2)).abs();
            bad += usize::from(r1 > 1e-6 || r2 > 1e-6 || !window.contains(x));
        }
        counts.push(found.count);
        records.push(serde_json::to_string(&found).unwrap());
    }
    (records, counts, bad)
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let window = Window::square(10.0);
    let mut worst: f64 = 0.0;
    let mut traced = 0;
    for _ in 0..20 {
        let (y1, y2) = (random_point(&mut rng), random_point(&mut rng));
        let t = trace_bisector(&BisectorSpec::new(2.0, y1, y2).unwrap(), &window, 0.05).unwrap();
        let mid = (y1 + y2) * 0.5;
        let dir = y2 - y1;
        for x in t.points() {
            worst = worst.max((x - mid).dot(dir).abs() / dir.euclid());
            traced += 1;
        }
    }
    let (_, counts, bad) = bisector_experiment(80);
    let mut hist = BTreeMap::<usize, usize>::new();
    for &c in &counts {
        *hist.entry(c).or_default() += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    verdict(
        worst <= 1e-6 && bad == 0,
        format!(
            "l2: {traced} points, max offset {worst:.1e}; l3/l4: 50 nonlinear pairs, {bad} bad intersections, \
             counts {hist:?} (max {max}; {} pairs above 5)",
            counts.iter().filter(|&&c| c > 5).count()
        ),
    )
}

fn criterion_9() -> Verdict {
    let traces = |runs: Vec<GridRun>| -> Vec<String> {
        runs.into_iter()
            .map(|r| match r.result {
                Ok(out) => serde_json::to_string(&out.trace).unwrap() + &serde_json::to_string(&out.certificate).unwrap(),
                Err(e) => e.to_string(),
            })
            .collect()
    };
    let a = traces(grid());
    let b = traces(grid());
    let grid_same = a == b;
    let bis_same = bisector_experiment(80).0 == bisector_experiment(80).0;
    verdict(
        grid_same && bis_same,
        format!("search grid identical: {grid_same} ({} traces); bisector runs identical: {bis_same}", a.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict, Duration); 9] = [
        ("norm oracle equivalence", criterion_1, Duration::from_secs(5)),
        ("copy, direction and extension suite", criterion_2, Duration::from_secs(30)),
        ("monochromatic copy search grid", criterion_3, Duration::from_secs(120)),
        ("precondition guard", criterion_4, Duration::from_secs(60)),
        ("ring colouring", criterion_5, Duration::from_secs(5)),
        ("distinct distances", criterion_6, Duration::from_secs(30)),
        ("hypergraph cores and peeling", criterion_7, Duration::from_secs(10)),
        ("bisectors", criterion_8, Duration::from_secs(60)),
        ("determinism", criterion_9, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let pass = v.pass && took <= budget;
        failed += usize::from(!pass);
        println!(
            "criterion {} [{}] {name}: {} [{:.2}s of {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
