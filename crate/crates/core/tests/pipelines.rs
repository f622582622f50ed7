use zerosum_core::bounds::{conjecture_evidence, evaluate_bounds, parse_csv, to_csv, BoundsOptions, Shape};
use zerosum_core::constructions::ConstructionKind;
use zerosum_core::geometry::{greedy_reorder, Zonotope};
use zerosum_core::lattice::GroundSet;
use zerosum_core::support::{davenport_support_dp1, Dp1Options};
use zerosum_core::zerosum::{davenport_support_k_small, is_minimal_zero_sum, SearchBudget, Strategy, ZsSequence};

#[test]
fn support_enumeration_matches_search_on_unit_cube() {
    let g = GroundSet::cube(1, 3);
    let dp1 = davenport_support_dp1(&g, &Dp1Options::default()).unwrap();
    let dfs = davenport_support_k_small(&g, 4, &SearchBudget::default()).unwrap();
    assert_eq!(dfs.value, 10);
    assert_eq!(dp1.value, dfs.value);
}

#[test]
fn emitted_constructions_reparse_and_reverify() {
    for (kind, m) in [
        (ConstructionKind::Box2, 7),
        (ConstructionKind::DiskS1, 11),
        (ConstructionKind::DiskS2, 12),
        (ConstructionKind::Box3, 4),
        (ConstructionKind::Ball3, 30),
    ] {
        let c = kind.build(m).unwrap();
        assert!(c.is_valid(), "{kind:?} {m}");
        let s = ZsSequence::parse_text(&c.sequence.to_text()).unwrap();
        assert_eq!(s, c.sequence);
        assert!(is_minimal_zero_sum(&s, Strategy::Auto).unwrap().minimal);
        let r = greedy_reorder(&s).unwrap();
        assert_eq!(r.partial_sums.len() as u64, s.len());
        assert!(r.partial_sums.last().unwrap().is_zero());
        assert!(s.len() <= Zonotope::new(s.support()).unwrap().lattice_count());
    }
}

#[test]
fn bounds_tables_are_consistent_and_roundtrip() {
    let quick = BoundsOptions { enumerate: false, ..Default::default() };
    for (shape, d, ms) in [(Shape::Box, 2, 2..=30), (Shape::Ball, 2, 1..=40), (Shape::Box, 3, 2..=12), (Shape::Ball, 3, 1..=30), (Shape::Box, 1, 1..=9)] {
        let rows = evaluate_bounds(shape, d, ms, &quick).unwrap();
        for r in &rows {
            assert!(r.consistent(), "{r:?}");
        }
        let text = to_csv(&rows);
        assert_eq!(to_csv(&parse_csv(&text).unwrap()), text);
    }
}

#[test]
fn box_rows_carry_enumerated_values() {
    let rows = evaluate_bounds(Shape::Box, 2, 2..=9, &BoundsOptions::default()).unwrap();
    for r in &rows {
        assert_eq!(r.get("support-dp1"), r.get("4m2-q"), "m={}", r.m);
        assert!(r.consistent());
    }
}

#[test]
fn evidence_tables() {
    let e = conjecture_evidence(3, 9, &SearchBudget::default());
    assert_eq!(e.box2[0].dfs_d, Some(4));
    assert_eq!(e.box2[1].dfs_d3, Some(13));
    assert!(e.box2.iter().all(|r| r.matches));
    assert_eq!(e.disk.len(), 5);
    assert!(e.disk.iter().all(|r| r.nondecreasing));
}
