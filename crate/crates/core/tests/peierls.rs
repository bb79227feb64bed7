mod common;

use lorentzian_ising::gw::sample_spine_forest;
use lorentzian_ising::lattice::{enumerate_forests, Forest, Triangulation};
use lorentzian_ising::peierls::{enumerate_contours, peierls_series, separates, spine_edge, survivors_statistic};
use lorentzian_ising::rng::stream_rng;

#[test]
fn contours_match_the_naive_oracle_on_enumerated_instances() {
    for f in enumerate_forests(2, 3).unwrap() {
        let t = Triangulation::from_forest(&f);
        let ours = enumerate_contours(&t, 8).unwrap();
        assert_eq!(ours.counts, common::naive_separating_cycles(&t, 8), "{:?}", f.degree_lists());
        for c in &ours.contours {
            assert!(separates(&t, c));
            assert_eq!(c.winding, 1);
        }
    }
}

#[test]
fn contours_match_the_naive_oracle_on_samples() {
    let mut rng = stream_rng(21, 0);
    for _ in 0..5 {
        let t = Triangulation::from(&sample_spine_forest(&mut rng, 3).unwrap());
        if t.triangle_count() > 30 {
            continue;
        }
        assert_eq!(enumerate_contours(&t, 10).unwrap().counts, common::naive_separating_cycles(&t, 10));
    }
}

#[test]
fn every_contour_crosses_the_spine() {
    let mut rng = stream_rng(22, 0);
    for _ in 0..10 {
        let sf = sample_spine_forest(&mut rng, 3).unwrap();
        let t = Triangulation::from(&sf);
        let spine: Vec<usize> = (0..3).map(|n| spine_edge(&t, &sf.spine_positions(), n)).collect();
        for c in enumerate_contours(&t, 8).unwrap().contours {
            assert!(c.crossed.iter().any(|e| spine.contains(e)));
        }
    }
}

/// Vertices at level `r - n` with a descendant at level `r + n`, by walking
/// parents up from every vertex at level `r + n`.
fn survivors_oracle(f: &Forest, r: usize, n: usize) -> usize {
    let mut ancestors: Vec<usize> = (0..f.level_size(r + n))
        .map(|mut pos| {
            for level in (r - n + 1..=r + n).rev() {
                pos = f.parent_position(level, pos);
            }
            pos
        })
        .collect();
    ancestors.sort_unstable();
    ancestors.dedup();
    ancestors.len()
}

#[test]
fn survivors_statistic_matches_parent_walks() {
    let mut rng = stream_rng(23, 0);
    for _ in 0..100 {
        let f = sample_spine_forest(&mut rng, 10).unwrap().forest();
        for r in 1..=5 {
            for n in 0..=r.min(10 - r) {
                assert_eq!(survivors_statistic(&f, r, n).unwrap(), survivors_oracle(&f, r, n));
            }
        }
    }
}

#[test]
fn survivors_on_the_spine_are_at_least_one() {
    let mut rng = stream_rng(24, 0);
    for _ in 0..100 {
        let f = sample_spine_forest(&mut rng, 8).unwrap().forest();
        assert!(survivors_statistic(&f, 4, 4).unwrap() >= 1);
    }
}

#[test]
fn series_matches_direct_sums() {
    let counts = [0u64, 0, 1, 3, 7, 12, 20];
    for beta in [0.2, 0.8, 1.5] {
        let s = peierls_series(&counts, beta);
        let direct: f64 = counts.iter().enumerate().map(|(n, &c)| c as f64 * (-2.0 * beta * n as f64).exp()).sum();
        assert!((s.total - direct).abs() < 1e-12);
    }
    assert!(peierls_series(&counts, 1.5).total_below_one());
    assert!(!peierls_series(&counts, 0.2).total_below_one());
}
