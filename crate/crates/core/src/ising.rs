//! Ising Gibbs measures on a finite triangulation.
//!
//! For a triangulation with `L` levels the spins on levels `0..L` are free and
//! level `L` carries the boundary condition. The Hamiltonian is ferromagnetic,
//! `H = -sum sigma_v sigma_w`, over every edge with at least one free endpoint;
//! horizontal loops (a level with one vertex) contribute a constant and are
//! left out.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Triangulation, VertexId};
use crate::rng::stream_rng;
use crate::scalar::Real;
use crate::stats::{batch_means, Estimate};

/// Largest free-spin count [`gibbs_exact`] will enumerate.
pub const EXACT_MAX_SPINS: usize = 22;

pub type Spin = i8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryCondition {
    Plus,
    Minus,
    Explicit(Vec<Spin>),
}

impl BoundaryCondition {
    fn resolve(&self, len: usize) -> Result<Vec<Spin>> {
        match self {
            BoundaryCondition::Plus => Ok(vec![1; len]),
            BoundaryCondition::Minus => Ok(vec![-1; len]),
            BoundaryCondition::Explicit(v) => {
                if v.len() != len {
                    return Err(Error::SpinMismatch(format!("boundary has {} spins, expected {len}", v.len())));
                }
                check_spins(v)?;
                Ok(v.clone())
            }
        }
    }

    /// The same condition with every spin reversed.
    pub fn flipped(&self) -> Self {
        match self {
            BoundaryCondition::Plus => BoundaryCondition::Minus,
            BoundaryCondition::Minus => BoundaryCondition::Plus,
            BoundaryCondition::Explicit(v) => BoundaryCondition::Explicit(v.iter().map(|s| -s).collect()),
        }
    }
}

fn check_spins(v: &[Spin]) -> Result<()> {
    match v.iter().find(|&&s| s != 1 && s != -1) {
        Some(s) => Err(Error::SpinMismatch(format!("spin value {s}"))),
        None => Ok(()),
    }
}

/// Interaction structure of a triangulation, with free vertices numbered first.
#[derive(Debug, Clone)]
pub struct IsingModel<'a> {
    t: &'a Triangulation,
    free: usize,
    edges: Vec<(VertexId, VertexId)>,
    neighbors: Vec<Vec<VertexId>>,
}

impl<'a> IsingModel<'a> {
    pub fn new(t: &'a Triangulation) -> Result<Self> {
        if t.levels() == 0 {
            return Err(Error::InvalidArgument("the Ising model needs a boundary level above the root".into()));
        }
        let free = t.vertex_count_through(t.levels() - 1);
        let edges: Vec<_> = t
            .edges()
            .iter()
            .filter(|e| !e.is_loop() && (e.a < free || e.b < free))
            .map(|e| (e.a, e.b))
            .collect();
        let mut neighbors = vec![Vec::new(); free];
        for &(a, b) in &edges {
            if a < free {
                neighbors[a].push(b);
            }
            if b < free {
                neighbors[b].push(a);
            }
        }
        Ok(IsingModel { t, free, edges, neighbors })
    }

    pub fn triangulation(&self) -> &Triangulation {
        self.t
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn boundary_count(&self) -> usize {
        self.t.vertex_count() - self.free
    }

    /// Interacting pairs, with multiplicity.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Interacting neighbours of free vertex `v`, with multiplicity.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[v]
    }

    /// State with every free spin equal to `value`.
    pub fn uniform_state(&self, value: Spin, bc: &BoundaryCondition, beta: f64) -> Result<SpinState> {
        SpinState::new(self, vec![value; self.free], bc, beta)
    }

    /// State whose free spins are read from the bits of `config` (bit set = +1).
    pub fn state_from_bits(&self, config: u64, bc: &BoundaryCondition, beta: f64) -> Result<SpinState> {
        let spins = (0..self.free).map(|i| if config >> i & 1 == 1 { 1 } else { -1 }).collect();
        SpinState::new(self, spins, bc, beta)
    }
}

/// Spins on every vertex of the triangulation plus the inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    spins: Vec<Spin>,
    free: usize,
    pub beta: f64,
}

impl SpinState {
    pub fn new(model: &IsingModel<'_>, free_spins: Vec<Spin>, bc: &BoundaryCondition, beta: f64) -> Result<Self> {
        if free_spins.len() != model.free {
            return Err(Error::SpinMismatch(format!(
                "{} free spins given, the model has {}",
                free_spins.len(),
                model.free
            )));
        }
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::InvalidArgument(format!("beta = {beta} must be non-negative")));
        }
        check_spins(&free_spins)?;
        let mut spins = free_spins;
        spins.extend(bc.resolve(model.boundary_count())?);
        Ok(SpinState { spins, free: model.free, beta })
    }

    pub fn spin(&self, v: VertexId) -> Spin {
        self.spins[v]
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn free_spins(&self) -> &[Spin] {
        &self.spins[..self.free]
    }

    pub fn boundary(&self) -> &[Spin] {
        &self.spins[self.free..]
    }

    /// Free spins packed as bits (bit set = +1).
    pub fn bits(&self) -> u64 {
        self.free_spins()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Sets a free spin.
    pub fn set(&mut self, v: VertexId, s: Spin) -> Result<()> {
        if v >= self.free {
            return Err(Error::BoundaryVertex(v));
        }
        check_spins(&[s])?;
        self.spins[v] = s;
        Ok(())
    }
}

/// `H = -sum over interacting pairs of sigma_v sigma_w`.
pub fn energy(model: &IsingModel<'_>, state: &SpinState) -> Result<i64> {
    if state.spins.len() != model.t.vertex_count() || state.free != model.free {
        return Err(Error::SpinMismatch("state does not belong to this model".into()));
    }
    Ok(energy_unchecked(model, &state.spins))
}

fn energy_unchecked(model: &IsingModel<'_>, spins: &[Spin]) -> i64 {
    -model.edges.iter().map(|&(a, b)| i64::from(spins[a] * spins[b])).sum::<i64>()
}

/// `S_v`, the sum of the spins interacting with free vertex `v`.
pub fn local_field(model: &IsingModel<'_>, state: &SpinState, v: VertexId) -> i64 {
    model.neighbors[v].iter().map(|&w| i64::from(state.spins[w])).sum()
}

/// `P(sigma_v = +1 | S_v) = e^{beta S} / (e^{beta S} + e^{-beta S})`.
pub fn conditional_spin_prob<T: Real>(s_v: i64, beta: T) -> T {
    let x = T::from_f64(-2.0 * s_v as f64) * beta;
    T::one() / (T::one() + x.exp())
}

/// Exact Gibbs distribution over the free spins, indexed by bit pattern.
#[derive(Debug, Clone)]
pub struct ExactGibbs<T> {
    probs: Vec<T>,
    free: usize,
}

/// Enumerates all `2^n` free configurations. `n` is capped at [`EXACT_MAX_SPINS`].
pub fn gibbs_exact<T: Real>(model: &IsingModel<'_>, beta: T, bc: &BoundaryCondition) -> Result<ExactGibbs<T>> {
    let n = model.free;
    if n > EXACT_MAX_SPINS {
        return Err(Error::GuardExceeded { what: "free spins", limit: EXACT_MAX_SPINS, got: n });
    }
    let mut spins = vec![0 as Spin; model.t.vertex_count()];
    spins[n..].copy_from_slice(&bc.resolve(model.boundary_count())?);
    let energies: Vec<i64> = (0..1u64 << n)
        .map(|config| {
            for (i, s) in spins[..n].iter_mut().enumerate() {
                *s = if config >> i & 1 == 1 { 1 } else { -1 };
            }
            energy_unchecked(model, &spins)
        })
        .collect();
    // shift by the ground-state energy to keep the weights finite
    let e_min = *energies.iter().min().expect("at least one configuration");
    let weights: Vec<T> = energies
        .iter()
        .map(|&e| (-beta * T::from_f64((e - e_min) as f64)).exp())
        .collect();
    let z = weights.iter().fold(T::zero(), |acc, &w| acc + w);
    Ok(ExactGibbs { probs: weights.into_iter().map(|w| w / z).collect(), free: n })
}

impl<T: Real> ExactGibbs<T> {
    pub fn free_count(&self) -> usize {
        self.free
    }

    /// Probabilities indexed by the bit pattern of the free spins.
    pub fn probabilities(&self) -> &[T] {
        &self.probs
    }

    pub fn probability(&self, config: u64) -> T {
        self.probs[config as usize]
    }

    pub fn probability_of(&self, state: &SpinState) -> T {
        self.probability(state.bits())
    }

    /// `P(sigma_v = +1)` for a free vertex `v`.
    pub fn marginal_plus(&self, v: VertexId) -> T {
        self.event_probability(|c| c >> v & 1 == 1)
    }

    pub fn root_plus(&self) -> T {
        self.marginal_plus(0)
    }

    pub fn event_probability(&self, event: impl Fn(u64) -> bool) -> T {
        self.probs
            .iter()
            .enumerate()
            .filter(|(c, _)| event(*c as u64))
            .fold(T::zero(), |acc, (_, &p)| acc + p)
    }
}

/// Heat-bath update of free vertex `v` driven by the uniform `u`.
pub fn heat_bath_update(model: &IsingModel<'_>, state: &mut SpinState, v: VertexId, u: f64) {
    let p = conditional_spin_prob(local_field(model, state, v), state.beta);
    state.spins[v] = if u < p { 1 } else { -1 };
}

/// One sequential heat-bath pass over the free vertices. Boundary spins are never touched.
pub fn glauber_sweep<R: Rng + ?Sized>(model: &IsingModel<'_>, state: &mut SpinState, rng: &mut R) {
    for v in 0..model.free {
        let u: f64 = rng.gen();
        heat_bath_update(model, state, v, u);
    }
}

/// Starting configuration for Monte Carlo chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// Every free spin equal to the (majority) boundary spin.
    #[default]
    Boundary,
    /// Independent uniform spins.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ChainConfig {
    /// Measured sweeps per replica (after burn-in).
    pub sweeps: usize,
    pub burn_in: usize,
    pub replicas: usize,
    /// Batches per replica for the batch-means error.
    pub batches: usize,
    pub init: InitialState,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { sweeps: 10_000, burn_in: 1_000, replicas: 4, batches: 32, init: InitialState::Boundary }
    }
}

/// Monte Carlo estimate of `P(sigma_root = +1)` with a batch-means standard
/// error. Replica `r` uses RNG stream `r` of `seed`; results do not depend on
/// the number of worker threads.
pub fn root_plus_probability(
    model: &IsingModel<'_>,
    beta: f64,
    bc: &BoundaryCondition,
    config: &ChainConfig,
    seed: u64,
) -> Result<Estimate> {
    if config.replicas == 0 || config.batches == 0 || config.sweeps < config.batches {
        return Err(Error::InvalidArgument("need at least one replica and one sweep per batch".into()));
    }
    let boundary = bc.resolve(model.boundary_count())?;
    let majority: i64 = boundary.iter().map(|&s| i64::from(s)).sum();
    let init_spin: Spin = if majority >= 0 { 1 } else { -1 };
    let per_replica: Vec<Vec<f64>> = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let free = match config.init {
                InitialState::Boundary => vec![init_spin; model.free],
                InitialState::Random => (0..model.free).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect(),
            };
            let mut state = SpinState::new(model, free, bc, beta).expect("validated boundary");
            for _ in 0..config.burn_in {
                glauber_sweep(model, &mut state, &mut rng);
            }
            let series: Vec<f64> = (0..config.sweeps)
                .map(|_| {
                    glauber_sweep(model, &mut state, &mut rng);
                    f64::from(u8::from(state.spins[0] == 1))
                })
                .collect();
            batch_means(&series, config.batches)
        })
        .collect();
    Ok(Estimate::from_samples(&per_replica.concat()))
}
