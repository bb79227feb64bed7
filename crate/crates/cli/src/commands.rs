use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use lorentzian_ising::gw::{level_size_pmf, offspring_pmf, sample_spine_forest};
use lorentzian_ising::ising::{gibbs_exact, root_plus_probability, BoundaryCondition, ChainConfig, IsingModel};
use lorentzian_ising::lattice::{critical_weights, enumerate_forests, strip_count, Forest, Triangulation};
use lorentzian_ising::peierls::{enumerate_contours, peierls_series};
use lorentzian_ising::percolation::{annealed_reach_curve, salg_paths};
use lorentzian_ising::rng::stream_rng;
use lorentzian_ising::stats::total_variation;
use lorentzian_ising::surgery::{
    collapse_horizontal_edge, insert_pairs_tracked, insertion_sites, random_modification, reconstruction_bound,
    reconstruction_frequency, Insertion, PathNeighborhood, Reference, SurgeryParams,
};
use lorentzian_ising::Exact;

use crate::output::{destination, Report};
use crate::Common;

/// Stream used to draw the instance a single-instance experiment runs on.
const INSTANCE_STREAM: u64 = u64::MAX;
const STATS_CHUNK: usize = 1000;
/// Largest free-spin count for which scans also report the exact value.
const SCAN_EXACT_MAX: usize = 16;

#[derive(Serialize)]
struct Config<'a, A: Serialize> {
    command: &'a str,
    #[serde(flatten)]
    common: &'a Common,
    #[serde(flatten)]
    args: &'a A,
}

fn emit<A: Serialize, R: Serialize>(c: &Common, command: &str, version: u32, args: &A, rows: &[R]) -> Result<()> {
    let config = Config { command, common: c, args };
    let dest = destination(c.out.as_deref(), c.out_dir.as_deref(), command, c.format);
    Report { schema: command, version, config: &config }.write(rows, c.format, dest.as_deref())
}

/// The triangulation from `--forest`, or one sampled with `levels` levels.
fn instance(c: &Common, forest: Option<&Path>, levels: usize) -> Result<Triangulation> {
    let f = match forest {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Forest::from_text(&text)?
        }
        None => sample_spine_forest(&mut stream_rng(c.seed, INSTANCE_STREAM), levels)?.forest(),
    };
    Ok(Triangulation::from_forest(&f))
}

fn check_betas(betas: &[f64]) -> Result<()> {
    ensure!(!betas.is_empty(), "empty beta grid");
    if let Some(b) = betas.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
        bail!("beta = {b} must be finite and non-negative");
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, visible_alias = "n", default_value_t = 10)]
    levels: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Discard samples with a level wider than this.
    #[arg(long)]
    width_cap: Option<usize>,
    /// Also write every kept triangulation in the forest text format.
    #[arg(long)]
    forest_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct HistogramRow {
    level: usize,
    size: usize,
    count: usize,
}

pub fn sample(c: &Common, a: SampleArgs) -> Result<()> {
    ensure!(a.levels > 0, "--levels must be positive");
    let forests: Vec<Forest> = (0..a.trials)
        .into_par_iter()
        .map(|i| sample_spine_forest(&mut stream_rng(c.seed, i as u64), a.levels).map(|s| s.forest()))
        .collect::<lorentzian_ising::Result<_>>()?;
    let kept: Vec<(usize, &Forest)> = forests
        .iter()
        .enumerate()
        .filter(|(_, f)| a.width_cap.is_none_or(|cap| f.sizes().iter().all(|&k| k <= cap)))
        .collect();
    if let Some(dir) = &a.forest_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (i, f) in &kept {
            let path = dir.join(format!("sample-{i:06}.txt"));
            fs::write(&path, f.to_text()).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let mut rows = Vec::new();
    for level in 0..=a.levels {
        let mut counts = std::collections::BTreeMap::new();
        for (_, f) in &kept {
            *counts.entry(f.level_size(level)).or_insert(0) += 1;
        }
        rows.extend(counts.into_iter().map(|(size, count)| HistogramRow { level, size, count }));
    }
    eprintln!("kept {} of {} samples", kept.len(), a.trials);
    emit(c, "sample", 1, &a, &rows)
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[arg(long, visible_alias = "n", default_value_t = 5)]
    levels: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
}

#[derive(Serialize)]
struct StatsRow {
    level: usize,
    trials: usize,
    tv_distance: f64,
    mean: f64,
    exact_mean: f64,
    max_size: usize,
}

pub fn stats(c: &Common, a: StatsArgs) -> Result<()> {
    ensure!(a.levels > 0 && a.trials > 0, "--levels and --trials must be positive");
    let chunks = a.trials.div_ceil(STATS_CHUNK);
    let sizes: Vec<Vec<usize>> = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let mut rng = stream_rng(c.seed, ch as u64);
            let len = STATS_CHUNK.min(a.trials - ch * STATS_CHUNK);
            (0..len)
                .map(|_| sample_spine_forest(&mut rng, a.levels).map(|s| s.forest().sizes()))
                .collect::<lorentzian_ising::Result<Vec<_>>>()
        })
        .collect::<lorentzian_ising::Result<Vec<_>>>()?
        .concat();
    let mut rows = Vec::with_capacity(a.levels);
    for level in 1..=a.levels {
        let max_size = sizes.iter().map(|s| s[level]).max().unwrap_or(0);
        let mut hist = vec![0usize; max_size + 1];
        for s in &sizes {
            hist[s[level]] += 1;
        }
        let tv = total_variation(&hist, |k| if k == 0 { 0.0 } else { level_size_pmf::<f64>(level, k).unwrap_or(0.0) });
        let mean = sizes.iter().map(|s| s[level] as f64).sum::<f64>() / a.trials as f64;
        rows.push(StatsRow { level, trials: a.trials, tv_distance: tv, mean, exact_mean: (1 + 2 * level) as f64, max_size });
    }
    emit(c, "stats", 1, &a, &rows)
}

#[derive(Debug, Args, Serialize)]
pub struct IsingScanArgs {
    /// Levels of the sampled instance (ignored with --forest).
    #[arg(long, visible_alias = "n", default_value_t = 6)]
    levels: usize,
    /// Triangulation in the forest text format.
    #[arg(long)]
    forest: Option<PathBuf>,
    #[arg(long, conflicts_with = "beta_grid")]
    beta: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,1,2")]
    beta_grid: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    sweeps: usize,
    #[arg(long, default_value_t = 1_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 4)]
    replicas: usize,
    #[arg(long, default_value_t = 32)]
    batches: usize,
}

#[derive(Serialize)]
struct ScanRow {
    beta: f64,
    bc: &'static str,
    estimate: f64,
    stderr: f64,
    samples: usize,
    exact: Option<f64>,
}

pub fn ising_scan(c: &Common, a: IsingScanArgs) -> Result<()> {
    let betas = a.beta.map_or_else(|| a.beta_grid.clone(), |b| vec![b]);
    check_betas(&betas)?;
    let t = instance(c, a.forest.as_deref(), a.levels)?;
    let m = IsingModel::new(&t)?;
    let config = ChainConfig { sweeps: a.sweeps, burn_in: a.burn_in, replicas: a.replicas, batches: a.batches, ..Default::default() };
    let mut rows = Vec::new();
    for &beta in &betas {
        for (name, bc) in [("plus", BoundaryCondition::Plus), ("minus", BoundaryCondition::Minus)] {
            let est = root_plus_probability(&m, beta, &bc, &config, c.seed)?;
            let exact = if m.free_count() <= SCAN_EXACT_MAX {
                Some(gibbs_exact(&m, beta, &bc)?.root_plus())
            } else {
                None
            };
            rows.push(ScanRow { beta, bc: name, estimate: est.mean, stderr: est.stderr, samples: est.samples, exact });
        }
    }
    emit(c, "ising-scan", 1, &a, &rows)
}

#[derive(Debug, Args, Serialize)]
pub struct ContoursArgs {
    #[arg(long, visible_alias = "n", default_value_t = 3)]
    levels: usize,
    #[arg(long)]
    forest: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    max_length: usize,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    beta_grid: Vec<f64>,
}

#[derive(Serialize)]
struct ContourRow {
    beta: f64,
    n: usize,
    count: u64,
    partial_sum: f64,
}

pub fn contours(c: &Common, a: ContoursArgs) -> Result<()> {
    check_betas(&a.beta_grid)?;
    let t = instance(c, a.forest.as_deref(), a.levels)?;
    let counts = enumerate_contours(&t, a.max_length)?.counts;
    let mut rows = Vec::new();
    for &beta in &a.beta_grid {
        let series = peierls_series(&counts, beta);
        rows.extend(series.rows.into_iter().map(|r| ContourRow { beta, n: r.n, count: r.count, partial_sum: r.partial_sum }));
    }
    emit(c, "contours", 1, &a, &rows)
}

#[derive(Debug, Args, Serialize)]
pub struct PercolationArgs {
    /// Target levels N (comma separated).
    #[arg(long, visible_alias = "n", value_delimiter = ',', default_value = "5,10,20")]
    levels: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    beta_grid: Vec<f64>,
    #[arg(long, default_value_t = 1_000)]
    trials: usize,
}

pub fn percolation(c: &Common, a: PercolationArgs) -> Result<()> {
    check_betas(&a.beta_grid)?;
    let rows = annealed_reach_curve(&a.levels, &a.beta_grid, a.trials, c.seed)?;
    emit(c, "percolation", 1, &a, &rows)
}

#[derive(Debug, Args, Serialize)]
pub struct SurgeryArgs {
    /// Levels of the enumerated class used for fixtures.
    #[arg(long, visible_alias = "n", default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value_t = 4)]
    width_cap: usize,
    /// Reconstruction attempts per fixture.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    threshold: usize,
    #[arg(long, default_value_t = 10)]
    insert_count: usize,
    /// Longest fixture path.
    #[arg(long, default_value_t = 3)]
    max_path: usize,
}

#[derive(Serialize)]
struct SelftestRow {
    check: &'static str,
    n: Option<usize>,
    value: f64,
    bound: Option<f64>,
    pass: bool,
}

pub fn surgery(c: &Common, a: SurgeryArgs) -> Result<()> {
    ensure!(a.trials > 0 && a.insert_count > 0, "--trials and --insert-count must be positive");
    let class = enumerate_forests(a.levels, a.width_cap)?;
    let mut failures = 0usize;
    for f in &class {
        let t = Triangulation::from_forest(f);
        for v in 0..t.vertex_count() {
            let Ok(sites) = insertion_sites(&t, v) else { continue };
            for s in sites {
                let out = insert_pairs_tracked(&t, &Insertion::single(v, s.up_index, s.down_index))?;
                let site = out.triangulation.site(out.chain[0]);
                let e = out.triangulation.horizontal_edge(site.level, site.index);
                if collapse_horizontal_edge(&out.triangulation, e)?.triangulation != t {
                    failures += 1;
                }
            }
        }
    }
    let mut rows = vec![SelftestRow { check: "round-trip-failures", n: None, value: failures as f64, bound: None, pass: failures == 0 }];
    let params = SurgeryParams { threshold: a.threshold, insert_count: a.insert_count };
    for n in 1..=a.max_path {
        let Some((t, path)) = fixture(&class, n, a.threshold)? else {
            rows.push(SelftestRow { check: "reconstruction-no-fixture", n: Some(n), value: 0.0, bound: None, pass: false });
            continue;
        };
        let g = PathNeighborhood::from_path(&t, &path)?;
        let (_, out) = random_modification(&t, &g, &params, &mut stream_rng(c.seed, INSTANCE_STREAM - n as u64))?;
        let est =
            reconstruction_frequency(&out.triangulation, Reference { triangulation: &t, path: &path }, &params, a.trials, c.seed);
        let bound = reconstruction_bound(&g.degrees(), a.insert_count);
        // One-sided test against the bound, with the variance it implies.
        let slack = 3.0 * (bound * (1.0 - bound) / a.trials as f64).sqrt();
        rows.push(SelftestRow {
            check: "reconstruction-frequency",
            n: Some(n),
            value: est.mean,
            bound: Some(bound),
            pass: est.mean >= bound - slack,
        });
    }
    emit(c, "surgery-selftest", 1, &a, &rows)
}

/// A path of `n` edges whose endpoint is its only vertex at or above the
/// threshold, preferring small degrees elsewhere.
fn fixture(class: &[Forest], n: usize, threshold: usize) -> Result<Option<(Triangulation, Vec<usize>)>> {
    let mut best: Option<(usize, Triangulation, Vec<usize>)> = None;
    for f in class {
        let t = Triangulation::from_forest(f);
        for p in salg_paths(&t, n)? {
            let g = PathNeighborhood::from_path(&t, &p)?;
            if g.qualifying(threshold) != [n] {
                continue;
            }
            let cost: usize = g.degrees()[..n].iter().product();
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, t.clone(), p));
            }
        }
    }
    Ok(best.map(|(_, t, p)| (t, p)))
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    /// Largest number of levels to enumerate.
    #[arg(long, visible_alias = "n", default_value_t = 2)]
    levels: usize,
    #[arg(long, default_value_t = 4)]
    width_cap: usize,
}

#[derive(Serialize)]
struct OracleRow {
    levels: usize,
    width_cap: usize,
    triangulations: usize,
    expected_count: u64,
    codec_failures: usize,
    max_weight_diff: f64,
    critical_mass: String,
}

pub fn oracle(c: &Common, a: OracleArgs) -> Result<()> {
    let mut rows = Vec::new();
    for levels in 1..=a.levels {
        let forests = enumerate_forests(levels, a.width_cap)?;
        let ts: Vec<Triangulation> = forests.iter().map(Triangulation::from_forest).collect();
        let codec_failures = ts.iter().zip(&forests).filter(|(t, f)| t.to_forest().ok().as_ref() != Some(*f)).count();
        let exact = critical_weights(&ts);
        let z: Exact = exact.iter().sum();
        let product: Vec<f64> =
            forests.iter().map(|f| f.degree_lists().iter().flatten().map(|&k| offspring_pmf::<f64>(k)).product()).collect();
        let zp: f64 = product.iter().sum();
        let zf: f64 = exact.iter().map(to_f64).sum();
        let max_weight_diff =
            exact.iter().zip(&product).map(|(w, p)| (to_f64(w) / zf - p / zp).abs()).fold(0.0, f64::max);
        rows.push(OracleRow {
            levels,
            width_cap: a.width_cap,
            triangulations: forests.len(),
            expected_count: expected_count(levels, a.width_cap),
            codec_failures,
            max_weight_diff,
            critical_mass: z.to_string(),
        });
    }
    emit(c, "oracle", 1, &a, &rows)
}

fn to_f64(q: &Exact) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Sum over level sizes `1 = k_0, k_1..k_N <= cap` of the product of strip counts.
fn expected_count(levels: usize, cap: usize) -> u64 {
    fn rec(prev: usize, left: usize, cap: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        (1..=cap).map(|k| strip_count(prev, k) * rec(k, left - 1, cap)).sum()
    }
    rec(1, levels, cap)
}
