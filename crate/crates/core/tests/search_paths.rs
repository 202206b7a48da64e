//! Colourings that push the search past the first extension: alternating
//! sides, facet cycles, sliding and resolution of contradicted regions.

mod common;

use common::{copy_deviation, vertex_pairs, Annuli, Lattice};
use minkowski_ramsey::norm::{Norm, PolygonalNorm};
use minkowski_ramsey::oracle::ColouringOracle;
use minkowski_ramsey::search::{find_copy, SearchConfig, SearchOutcome};
use minkowski_ramsey::Vec2;

fn octagon() -> Norm {
    Norm::Polygonal(PolygonalNorm::regular(8, 0.0).unwrap())
}

fn run(norm: &Norm, oracle: &dyn ColouringOracle, q: f64, n: usize, seed: u64) -> SearchOutcome {
    let cfg = SearchConfig { seed, density: 16, ..SearchConfig::new(q, n) };
    let out = find_copy(norm, oracle, &cfg).unwrap();
    let cert = &out.certificate;
    assert_eq!(cert.points.points.len(), n);
    for p in &cert.points.points {
        assert_eq!(oracle.colour(*p), cert.colour);
    }
    let first = usize::from(!cert.points.include_zero);
    let dev = copy_deviation(&vertex_pairs(norm), &cert.points.points, q, cert.points.scale, first);
    assert!(dev <= 1e-9, "deviation {dev}");
    out
}

fn check_slides(out: &SearchOutcome) -> usize {
    let mut count = 0;
    for level in &out.trace.levels {
        for s in &level.slides {
            let growth = s.new_length - s.host_length;
            assert!((growth - s.expected_growth).abs() <= 1e-9, "{growth} vs {}", s.expected_growth);
            assert!(s.expected_growth > 0.0);
            count += 1;
        }
        if !level.slides.is_empty() {
            assert!(level.cycle.is_some());
        }
    }
    count
}

#[test]
fn lattice_slides_once_then_extends() {
    let norm = octagon();
    let o = Lattice::new(1.3221041519399515, 1.210622561867121, 1.077766682974421, 0.98219133268234, 0.7173081681004106, 0.9694379341154823);
    let out = run(&norm, &o, 0.4372861361695044, 5, 206);
    assert_eq!(check_slides(&out), 1);
    assert!(out.trace.levels.iter().any(|l| l.facets.len() >= 3));
}

#[test]
fn annuli_resolve_contradicted_region() {
    let norm = octagon();
    let o = Annuli { norm: octagon(), c: Vec2::new(-0.48924058098820833, 1.3533816531192775), w: 0.012447939752377513 };
    let out = run(&norm, &o, 0.42181509657735056, 8, 334);
    assert_eq!(out.trace.levels[0].outcome, "resolved");
    assert_eq!(check_slides(&out), 3);
}

#[test]
fn fine_lattice_resolves_after_slide() {
    let norm = octagon();
    let o = Lattice::new(4.217147515844729, 5.929453392299376, 0.10848969727117229, 0.0024231156123578684, 0.4511265705301414, 0.9015850716427535);
    let out = run(&norm, &o, 0.3788725250615787, 9, 930);
    assert!(out.trace.levels.iter().any(|l| l.outcome == "resolved"));
    assert_eq!(check_slides(&out), 1);
}

#[test]
fn annuli_inscribe_in_square() {
    let norm = Norm::Polygonal(PolygonalNorm::linf());
    let o = Annuli { norm: Norm::Polygonal(PolygonalNorm::regular(6, 0.0).unwrap()), c: Vec2::new(0.636124911943516, 1.180413718952626), w: 0.13217921511678574 };
    let out = run(&norm, &o, 0.348605000138919, 6, 1704);
    assert_eq!(out.trace.levels.last().unwrap().outcome, "inscribed");
}

#[test]
fn reruns_are_identical() {
    let norm = octagon();
    let o = Annuli { norm: octagon(), c: Vec2::new(-0.48924058098820833, 1.3533816531192775), w: 0.012447939752377513 };
    let a = run(&norm, &o, 0.42181509657735056, 8, 334);
    let b = run(&norm, &o, 0.42181509657735056, 8, 334);
    assert_eq!(a.trace.id(), b.trace.id());
    assert_eq!(a.certificate.points, b.certificate.points);
}

#[test]
fn long_slide_chain_at_low_density() {
    let norm = octagon();
    let o = Annuli { norm: octagon(), c: Vec2::new(0.2036751429718917, -0.43540445012073725), w: 0.01157658355627467 };
    let cfg = SearchConfig { seed: 854, density: 4, ..SearchConfig::new(0.4437663759227491, 10) };
    let out = find_copy(&norm, &o, &cfg).unwrap();
    assert_eq!(check_slides(&out), 12);
    for p in &out.certificate.points.points {
        assert_eq!(o.colour(*p), out.certificate.colour);
    }
    let dev = copy_deviation(&vertex_pairs(&norm), &out.certificate.points.points, cfg.q, out.certificate.points.scale, usize::from(!out.certificate.points.include_zero));
    assert!(dev <= 1e-9);
}
