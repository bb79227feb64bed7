//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use lorentzian_ising::gw::sample_spine_forest;
use lorentzian_ising::ising::{
    conditional_spin_prob, gibbs_exact, glauber_sweep, local_field, root_plus_probability, BoundaryCondition,
    ChainConfig, IsingModel,
};
use lorentzian_ising::lattice::{
    enumerate_forests, enumerate_triangulations, triangulation_to_forest, Forest, Triangulation,
};
use lorentzian_ising::peierls::{enumerate_contours, flip_inside};
use lorentzian_ising::percolation::{annealed_reach_curve, open_probability};
use lorentzian_ising::rng::stream_rng;
use lorentzian_ising::stats::total_variation;
use lorentzian_ising::surgery::{
    collapse_horizontal_edge, insert_pairs_tracked, insertion_sites, random_modification, reconstruction_bound,
    reconstruction_frequency, Insertion, PathNeighborhood, Reference, SurgeryParams,
};

const SEED: u64 = 20_240_601;

struct Suite {
    failed: Vec<usize>,
}

impl Suite {
    fn record(&mut self, id: usize, title: &str, pass: bool, detail: String, started: Instant) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2}. {title}: {detail} ({:.1} s)", started.elapsed().as_secs_f64());
        if !pass {
            self.failed.push(id);
        }
    }
}

fn level_size_law(s: &mut Suite) {
    let started = Instant::now();
    let trials = 100_000;
    let mut rng = stream_rng(SEED, 1);
    let mut hist = vec![0usize; 400];
    for _ in 0..trials {
        let k = sample_spine_forest(&mut rng, 5).unwrap().forest().level_size(5);
        hist[k.min(399)] += 1;
    }
    let tv = total_variation(&hist, common::level_five_pmf);
    let secs = started.elapsed().as_secs_f64();
    s.record(
        1,
        "level-size law of k_5",
        tv < 0.015 && secs < 60.0,
        format!("TV = {tv:.5} (< 0.015) over {trials} samples, {secs:.1} s (< 60 s)"),
        started,
    );
}

fn triangle_identity(t: &Triangulation) -> bool {
    let f = t.forest();
    let by_degrees: usize = f.degree_lists().iter().flatten().map(|&d| d + 1).sum();
    by_degrees == t.triangle_count() && t.triangles().len() == t.triangle_count()
}

fn codec(s: &mut Suite) {
    let started = Instant::now();
    let mut failures = 0usize;
    let mut rng = stream_rng(SEED, 2);
    for _ in 0..10_000 {
        let f = sample_spine_forest(&mut rng, 8).unwrap().forest();
        let t = Triangulation::from_forest(&f);
        if triangulation_to_forest(&t).ok().as_ref() != Some(&f) || !triangle_identity(&t) {
            failures += 1;
        }
    }
    let mut enumerated = 0;
    for levels in 1..=2 {
        for f in enumerate_forests(levels, 5).unwrap() {
            enumerated += 1;
            let t = Triangulation::from_forest(&f);
            if triangulation_to_forest(&t).ok().as_ref() != Some(&f) || !triangle_identity(&t) {
                failures += 1;
            }
        }
    }
    s.record(
        2,
        "forest/triangulation round trip and triangle count",
        failures == 0,
        format!("{failures} failures over 10000 samples and {enumerated} enumerated"),
        started,
    );
}

fn measure_consistency(s: &mut Suite) {
    let started = Instant::now();
    let weighted = enumerate_triangulations(2, 4, std::f64::consts::LN_2).unwrap();
    let z: f64 = weighted.iter().map(|(_, w)| w).sum();
    let product: Vec<f64> = weighted.iter().map(|(t, _)| common::branching_weight(t.forest())).collect();
    let zp: f64 = product.iter().sum();
    let worst = weighted
        .iter()
        .zip(&product)
        .map(|((_, w), p)| (w / z - p / zp).abs())
        .fold(0.0, f64::max);
    s.record(
        3,
        "critical weights match the branching product form",
        worst < 1e-12,
        format!("max |diff| = {worst:.2e} (< 1e-12) over {} triangulations", weighted.len()),
        started,
    );
}

fn peierls_mechanics(s: &mut Suite) {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut contours = 0usize;
    let mut instances = 0usize;
    let mut max_root_plus = 0.0f64;
    for levels in 1..=3 {
        for f in enumerate_forests(levels, 4).unwrap() {
            let t = Triangulation::from_forest(&f);
            if t.vertex_count() > 20 {
                continue;
            }
            instances += 1;
            let m = IsingModel::new(&t).unwrap();
            let found = enumerate_contours(&t, 10).unwrap().contours;
            for beta in [0.3, 1.0] {
                let g = gibbs_exact(&m, beta, &BoundaryCondition::Minus).unwrap();
                if beta == 1.0 {
                    max_root_plus = max_root_plus.max(g.root_plus());
                }
                let all_minus = m.uniform_state(-1, &BoundaryCondition::Minus, beta).unwrap();
                for c in &found {
                    let inside = flip_inside(&m, &all_minus, c).unwrap();
                    let ratio = g.probability_of(&inside) / g.probability_of(&all_minus);
                    let expected = (-2.0 * beta * c.len() as f64).exp();
                    worst = worst.max((ratio / expected - 1.0).abs());
                    contours += 1;
                }
            }
        }
    }
    s.record(
        4,
        "Peierls ratio exp(-2 beta |gamma|) and minus-boundary bias",
        worst < 1e-12 && max_root_plus < 0.5,
        format!(
            "max rel. error {worst:.2e} (< 1e-12) on {contours} contour checks, {instances} instances; \
             max P(root +) at beta 1 = {max_root_plus:.4} (< 1/2)"
        ),
        started,
    );
}

fn disagreement(s: &mut Suite) {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for d in 3..=10 {
        for beta in [0.1, 0.5] {
            let tv = common::extreme_conditional_tv(d, beta);
            let ours = open_probability(d, beta);
            let via_conditionals = conditional_spin_prob(d as i64, beta) - conditional_spin_prob(-(d as i64), beta);
            let target = (beta * d as f64).tanh();
            worst = worst.max((tv - target).abs()).max((ours - tv).abs()).max((via_conditionals - tv).abs());
        }
    }
    s.record(
        5,
        "extreme conditionals differ by tanh(beta d)",
        worst < 1e-12,
        format!("max |diff| = {worst:.2e} (< 1e-12)"),
        started,
    );
}

fn glauber(s: &mut Suite) {
    let started = Instant::now();
    // 12 vertices, 9 of them free
    let t = Triangulation::from_forest(&Forest::new(vec![vec![2], vec![1, 2], vec![1, 1, 1], vec![1, 1, 1]]).unwrap());
    assert!(t.vertex_count() <= 12);
    let m = IsingModel::new(&t).unwrap();
    let bc = BoundaryCondition::Explicit(vec![1, -1, 1]);
    let beta = 0.4;
    let exact = gibbs_exact(&m, beta, &bc).unwrap();
    let mut state = m.uniform_state(1, &bc, beta).unwrap();
    let mut rng = stream_rng(SEED, 6);
    let sweeps = 1_000_000;
    let mut plus = vec![0u64; m.free_count()];
    for _ in 0..sweeps {
        glauber_sweep(&m, &mut state, &mut rng);
        for (v, c) in plus.iter_mut().enumerate() {
            *c += u64::from(state.spin(v) == 1);
        }
    }
    let marg_err = (0..m.free_count())
        .map(|v| (plus[v] as f64 / sweeps as f64 - exact.marginal_plus(v)).abs())
        .fold(0.0, f64::max);

    // detailed balance on every enumerated instance of at most 10 vertices
    let mut balance_err = 0.0f64;
    let mut checked = 0usize;
    for levels in 1..=3 {
        for f in enumerate_forests(levels, 3).unwrap() {
            let t = Triangulation::from_forest(&f);
            if t.vertex_count() > 10 {
                continue;
            }
            let m = IsingModel::new(&t).unwrap();
            let bc = BoundaryCondition::Explicit((0..m.boundary_count()).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect());
            let g = gibbs_exact(&m, 0.7, &bc).unwrap();
            for c in 0..1u64 << m.free_count() {
                let st = m.state_from_bits(c, &bc, 0.7).unwrap();
                for v in 0..m.free_count() {
                    let p: f64 = conditional_spin_prob(local_field(&m, &st, v), 0.7);
                    let (away, back) = if st.spin(v) == 1 { (1.0 - p, p) } else { (p, 1.0 - p) };
                    let lhs = g.probability(c) * away;
                    let rhs = g.probability(c ^ (1 << v)) * back;
                    balance_err = balance_err.max((lhs - rhs).abs());
                    checked += 1;
                }
            }
        }
    }
    s.record(
        6,
        "Glauber marginals and detailed balance",
        marg_err < 0.01 && balance_err < 1e-15,
        format!(
            "max marginal error {marg_err:.4} (< 0.01) after {sweeps} sweeps; \
             max balance defect {balance_err:.1e} over {checked} moves"
        ),
        started,
    );
}

fn percolation_decay(s: &mut Suite) {
    let started = Instant::now();
    let trials = 10_000;
    let betas = [0.02, 0.05, 0.1];
    let rows = annealed_reach_curve(&[10, 30], &betas, trials, SEED).unwrap();
    let at = |beta: f64, n: usize| rows.iter().find(|r| r.beta == beta && r.levels == n).unwrap();
    let (r10, r30) = (at(0.02, 10), at(0.02, 30));
    let gap = r10.estimate - r30.estimate;
    let se = (r10.stderr.powi(2) + r30.stderr.powi(2)).sqrt();
    let decay = gap > 0.0 && gap > 3.0 * se;
    let monotone = [10, 30].iter().all(|&n| betas.windows(2).all(|w| at(w[0], n).reach_count <= at(w[1], n).reach_count));
    s.record(
        7,
        "reach probability decays in N at beta 0.02",
        decay && monotone,
        format!(
            "N=10: {}/{trials}, N=30: {}/{trials}, gap {gap:.4} vs 3 se {:.4}; coupled counts monotone in beta: {monotone}",
            r10.reach_count,
            r30.reach_count,
            3.0 * se
        ),
        started,
    );
}

fn crossover(s: &mut Suite) {
    let started = Instant::now();
    let mut rng = stream_rng(SEED, 8);
    let t = Triangulation::from(&sample_spine_forest(&mut rng, 20).unwrap());
    let m = IsingModel::new(&t).unwrap();
    let config = ChainConfig::default();
    let hot = root_plus_probability(&m, 0.05, &BoundaryCondition::Minus, &config, SEED).unwrap();
    let cold = root_plus_probability(&m, 2.0, &BoundaryCondition::Minus, &config, SEED).unwrap();
    let gap = hot.mean - cold.mean;
    let se = (hot.stderr.powi(2) + cold.stderr.powi(2)).sqrt();
    s.record(
        8,
        "minus-boundary root magnetization: beta 2.0 below beta 0.05",
        gap > 3.0 * se,
        format!(
            "P(+) = {:.4} +- {:.4} at 0.05, {:.4} +- {:.4} at 2.0; gap {gap:.4} vs 3 se {:.4} ({} vertices)",
            hot.mean,
            hot.stderr,
            cold.mean,
            cold.stderr,
            3.0 * se,
            t.vertex_count()
        ),
        started,
    );
}

fn surgery(s: &mut Suite) {
    let started = Instant::now();
    // insert/collapse round trips
    let mut round_trips = 0usize;
    let mut failures = 0usize;
    for levels in 1..=2 {
        for f in enumerate_forests(levels, 5).unwrap() {
            let t = Triangulation::from_forest(&f);
            for v in 0..t.vertex_count() {
                let Ok(sites) = insertion_sites(&t, v) else { continue };
                for site in sites {
                    round_trips += 1;
                    let out = insert_pairs_tracked(&t, &Insertion::single(v, site.up_index, site.down_index)).unwrap();
                    let left = t2_site(&out.triangulation, out.chain[0]);
                    let back = collapse_horizontal_edge(&out.triangulation, left).unwrap();
                    if back.triangulation != t || out.triangulation.triangle_count() != t.triangle_count() + 2 {
                        failures += 1;
                    }
                }
            }
        }
    }

    // reconstruction frequency on fixtures with n = 1, 2, 3
    let params = SurgeryParams { threshold: 8, insert_count: 10 };
    let class = enumerate_forests(3, 4).unwrap();
    let attempts = 1_000_000;
    let mut recon_ok = true;
    let mut recon = Vec::new();
    for n in 1..=3 {
        let (t, path) = common::reconstruction_fixture(&class, n, params.threshold);
        let g = PathNeighborhood::from_path(&t, &path).unwrap();
        let (_, out) = random_modification(&t, &g, &params, &mut stream_rng(SEED, 90 + n as u64)).unwrap();
        let est = reconstruction_frequency(
            &out.triangulation,
            Reference { triangulation: &t, path: &path },
            &params,
            attempts,
            SEED + n as u64,
        );
        let bound = reconstruction_bound(&g.degrees(), params.insert_count);
        recon_ok &= est.mean >= bound - 3.0 * est.stderr;
        recon.push(format!("n={n}: {:.2e} >= {bound:.2e}", est.mean));
    }

    // overcounting on an exhaustive tiny class
    let small = SurgeryParams { threshold: 8, insert_count: 2 };
    let forests: Vec<Forest> = enumerate_forests(2, 5).unwrap();
    let tally = common::overcount_tally(&forests, 2, &small);
    let mut worst = 0.0f64;
    let mut over = 0usize;
    let mut over_paper = 0usize;
    for ((_, degrees), &count) in &tally {
        let ratio = count as f64 / common::overcount_bound(degrees, small.insert_count);
        worst = worst.max(ratio);
        over += usize::from(ratio > 1.0);
        let paper_form: f64 = degrees.iter().map(|&d| 12.0 * (d + 10) as f64).product();
        over_paper += usize::from(count as f64 > paper_form);
    }
    let pass = failures == 0 && recon_ok && over == 0 && over_paper == 0;
    s.record(
        9,
        "surgery round trips, reconstruction frequency, overcounting",
        pass,
        format!(
            "{failures} round-trip failures of {round_trips}; reconstruction over {attempts} attempts [{}]; \
             overcount max count/bound {worst:.3} over {} classes (k=2), {over_paper} above prod 12(d+10)",
            recon.join(", "),
            tally.len()
        ),
        started,
    );
}

/// Horizontal edge to the right of `v`.
fn t2_site(t: &Triangulation, v: usize) -> usize {
    let site = t.site(v);
    t.horizontal_edge(site.level, site.index)
}

fn contour_oracle(s: &mut Suite) {
    let started = Instant::now();
    let mut rng = stream_rng(SEED, 10);
    let mut mismatches = 0usize;
    let mut summary = Vec::new();
    for _ in 0..3 {
        let t = loop {
            let t = Triangulation::from(&sample_spine_forest(&mut rng, 3).unwrap());
            if t.triangle_count() <= 30 {
                break t;
            }
        };
        let ours = enumerate_contours(&t, 12).unwrap().counts;
        let naive = common::naive_separating_cycles(&t, 12);
        mismatches += usize::from(ours != naive);
        summary.push(format!("F={} total {}", t.triangle_count(), naive.iter().sum::<u64>()));
    }
    s.record(
        10,
        "contour enumeration matches the naive cycle oracle",
        mismatches == 0,
        format!("{mismatches} mismatching instances of 3 [{}]", summary.join(", ")),
        started,
    );
}

fn main() -> ExitCode {
    let mut suite = Suite { failed: Vec::new() };
    level_size_law(&mut suite);
    codec(&mut suite);
    measure_consistency(&mut suite);
    peierls_mechanics(&mut suite);
    disagreement(&mut suite);
    glauber(&mut suite);
    percolation_decay(&mut suite);
    crossover(&mut suite);
    surgery(&mut suite);
    contour_oracle(&mut suite);
    if suite.failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {:?}", suite.failed);
        ExitCode::FAILURE
    }
}
