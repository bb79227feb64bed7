mod common;

use lorentzian_ising::gw::sample_spine_forest;
use lorentzian_ising::lattice::{enumerate_forests, Triangulation};
use lorentzian_ising::percolation::{
    annealed_reach_curve, count_salg_paths, is_locally_geodesic, max_open_reach, salg_paths, sample_open_set, shortcut,
};
use lorentzian_ising::rng::stream_rng;
use rand::Rng;

#[test]
fn salg_counts_match_filtered_self_avoiding_paths() {
    for f in enumerate_forests(2, 3).unwrap() {
        let t = Triangulation::from_forest(&f);
        for n in 0..=4 {
            let sa = common::self_avoiding_paths(&t, n);
            let expected = sa.iter().filter(|p| common::has_no_chord(&t, p)).count() as u64;
            assert_eq!(count_salg_paths(&t, n).unwrap(), expected);
            assert!(expected <= sa.len() as u64);
            for p in salg_paths(&t, n).unwrap() {
                assert!(is_locally_geodesic(&t, &p).unwrap());
            }
        }
    }
}

#[test]
fn locally_geodesic_paths_touch_at_most_two_path_vertices() {
    let mut rng = stream_rng(31, 0);
    for _ in 0..20 {
        let t = Triangulation::from(&sample_spine_forest(&mut rng, 4).unwrap());
        for p in salg_paths(&t, 4).unwrap() {
            for &v in &p {
                let nb = common::simple_neighbors(&t, v);
                assert!(p.iter().filter(|w| nb.contains(w)).count() <= 2);
            }
        }
    }
}

#[test]
fn open_paths_shortcut_to_open_locally_geodesic_paths() {
    let mut rng = stream_rng(32, 0);
    let mut checked = 0;
    for _ in 0..300 {
        let t = Triangulation::from(&sample_spine_forest(&mut rng, 6).unwrap());
        let opens = sample_open_set(&t, 0.4, &mut rng);
        let Some(reach) = max_open_reach(&t, &opens) else { continue };
        let cut = shortcut(&t, &reach.certificate).unwrap();
        assert!(is_locally_geodesic(&t, &cut).unwrap());
        assert!(cut.len() <= reach.certificate.len());
        assert!(cut.iter().all(|&v| opens.is_open(v)));
        assert_eq!(cut.first(), reach.certificate.first());
        assert_eq!(cut.last(), reach.certificate.last());
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn opening_a_vertex_never_lowers_the_reach() {
    let mut rng = stream_rng(33, 0);
    for _ in 0..200 {
        let t = Triangulation::from(&sample_spine_forest(&mut rng, 6).unwrap());
        let mut opens = sample_open_set(&t, 0.3, &mut rng);
        let before = max_open_reach(&t, &opens).map_or(-1, |r| r.level as i64);
        let v = rng.gen_range(0..t.vertex_count());
        opens.set_open(v, true);
        let after = max_open_reach(&t, &opens).map_or(-1, |r| r.level as i64);
        assert!(after >= before);
    }
}

#[test]
fn reach_probability_decays_in_n_at_moderate_beta() {
    let trials = 10_000;
    let rows = annealed_reach_curve(&[10, 30], &[0.1], trials, 34).unwrap();
    let (a, b) = (&rows[0], &rows[1]);
    assert!(b.reach_count <= a.reach_count);
    let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!(a.estimate - b.estimate > 3.0 * se, "{a:?} {b:?}");
}

#[test]
fn curves_are_monotone_and_reproducible() {
    let levels = [1, 3, 6];
    let betas = [0.05, 0.2, 0.5];
    let rows = annealed_reach_curve(&levels, &betas, 500, 35).unwrap();
    assert_eq!(rows, annealed_reach_curve(&levels, &betas, 500, 35).unwrap());
    for (i, r) in rows.iter().enumerate() {
        if i % levels.len() > 0 {
            assert!(r.reach_count <= rows[i - 1].reach_count);
        }
        if i >= levels.len() {
            assert!(r.reach_count >= rows[i - levels.len()].reach_count);
        }
    }
}
