//! Time evolution of the chain, `ẍ = ω₀²·H·x`.
//!
//! Two independent routes: exact modal superposition, and velocity-Verlet
//! integration. Energy is `½m‖ẋ‖² - ½k·xᵀHx`, which is non-negative because
//! `H` is negative semidefinite.

use serde::{Deserialize, Serialize};

use crate::chain::ChainConfig;
use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::spectra::{self, ModeShape};

/// Largest allowed `dt·ω_max`.
pub const STABILITY_BOUND: f64 = 0.5;
/// Default step is this fraction of `1/ω_max`.
pub const DEFAULT_DT_FACTOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl InitialState {
    pub fn at_rest(positions: Vec<f64>) -> Self {
        let velocities = vec![0.0; positions.len()];
        Self {
            positions,
            velocities,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::at_rest(vec![0.0; n])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryState {
    pub time: f64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub chain: ChainConfig,
    pub dt: f64,
    pub steps: usize,
    pub initial: InitialState,
}

fn check_len(cfg: &ChainConfig, v: &[f64]) -> Result<()> {
    if v.len() != cfg.n() {
        return Err(Error::DimensionMismatch {
            left: cfg.n(),
            right: v.len(),
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fastest closed-form angular frequency of the chain.
pub fn omega_max(cfg: &ChainConfig) -> f64 {
    spectra::spectrum(cfg).max_frequency()
}

pub fn default_dt(cfg: &ChainConfig) -> f64 {
    DEFAULT_DT_FACTOR / omega_max(cfg)
}

/// `ω₀²·H`, the matrix of the linear force law.
fn force_matrix(cfg: &ChainConfig) -> RealMatrix {
    let w2 = cfg.omega0() * cfg.omega0();
    cfg.coupling_matrix().to_f64().map(|h| h * w2)
}

/// `ẍ = ω₀²·H·x` with `H` chosen by topology.
pub fn acceleration(cfg: &ChainConfig, x: &[f64]) -> Result<Vec<f64>> {
    check_len(cfg, x)?;
    force_matrix(cfg).matvec(x)
}

/// `½m‖ẋ‖² - ½k·xᵀHx`.
pub fn total_energy(cfg: &ChainConfig, positions: &[f64], velocities: &[f64]) -> Result<f64> {
    check_len(cfg, positions)?;
    check_len(cfg, velocities)?;
    let hx = cfg.coupling_matrix().to_f64().matvec(positions)?;
    Ok(0.5 * cfg.mass() * dot(velocities, velocities) - 0.5 * cfg.spring_k() * dot(positions, &hx))
}

/// `m·Σẋ_i`.
pub fn total_momentum(cfg: &ChainConfig, velocities: &[f64]) -> f64 {
    cfg.mass() * velocities.iter().sum::<f64>()
}

/// Initial state projected onto the orthonormal mode basis; evaluates the
/// exact solution at any time.
#[derive(Debug, Clone)]
pub struct ModalEvolution {
    cfg: ChainConfig,
    modes: Vec<ModeShape>,
    omegas: Vec<f64>,
    amplitudes: Vec<f64>,
    rates: Vec<f64>,
}

impl ModalEvolution {
    pub fn new(cfg: &ChainConfig, initial: &InitialState) -> Result<Self> {
        check_len(cfg, &initial.positions)?;
        check_len(cfg, &initial.velocities)?;
        let modes = spectra::modes(cfg.topology(), cfg.n())?;
        let omegas = modes
            .iter()
            .map(|m| cfg.omega0() * (-m.eigenvalue).max(0.0).sqrt())
            .collect();
        let amplitudes = modes
            .iter()
            .map(|m| dot(&m.components, &initial.positions))
            .collect();
        let rates = modes
            .iter()
            .map(|m| dot(&m.components, &initial.velocities))
            .collect();
        Ok(Self {
            cfg: *cfg,
            modes,
            omegas,
            amplitudes,
            rates,
        })
    }

    /// Each modal coordinate evolves as `a·cos ωt + (b/ω)·sin ωt`, or
    /// `a + b·t` for a zero-frequency mode.
    pub fn state_at(&self, t: f64) -> TrajectoryState {
        let n = self.cfg.n();
        let mut positions = vec![0.0; n];
        let mut velocities = vec![0.0; n];
        for (((mode, &w), &a), &b) in self
            .modes
            .iter()
            .zip(&self.omegas)
            .zip(&self.amplitudes)
            .zip(&self.rates)
        {
            let (q, qdot) = if w > 0.0 {
                let (s, c) = (w * t).sin_cos();
                (a * c + b / w * s, -a * w * s + b * c)
            } else {
                (a + b * t, b)
            };
            for ((x, v), &e) in positions
                .iter_mut()
                .zip(&mut velocities)
                .zip(&mode.components)
            {
                *x += q * e;
                *v += qdot * e;
            }
        }
        let energy = total_energy(&self.cfg, &positions, &velocities)
            .expect("lengths fixed at construction");
        TrajectoryState {
            time: t,
            positions,
            velocities,
            energy,
        }
    }
}

/// Exact state at time `t` by modal superposition.
pub fn analytic_evolution(
    cfg: &ChainConfig,
    initial: &InitialState,
    t: f64,
) -> Result<TrajectoryState> {
    Ok(ModalEvolution::new(cfg, initial)?.state_at(t))
}

impl SimulationConfig {
    pub fn new(chain: ChainConfig, dt: f64, steps: usize, initial: InitialState) -> Result<Self> {
        let sim = Self {
            chain,
            dt,
            steps,
            initial,
        };
        sim.validate()?;
        Ok(sim)
    }

    pub fn validate(&self) -> Result<()> {
        check_len(&self.chain, &self.initial.positions)?;
        check_len(&self.chain, &self.initial.velocities)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        let w = omega_max(&self.chain);
        if self.dt * w >= STABILITY_BOUND {
            return Err(Error::UnstableTimeStep {
                dt: self.dt,
                omega_max: w,
                bound: STABILITY_BOUND,
            });
        }
        Ok(())
    }
}

/// Velocity-Verlet integration, calling `visit` on each of the
/// `steps + 1` states in order. State `i` is at time `i·dt`.
pub fn verlet_run(sim: &SimulationConfig, mut visit: impl FnMut(&TrajectoryState)) -> Result<()> {
    sim.validate()?;
    let cfg = &sim.chain;
    let force = force_matrix(cfg);
    let dt = sim.dt;

    let mut state = TrajectoryState {
        time: 0.0,
        positions: sim.initial.positions.clone(),
        velocities: sim.initial.velocities.clone(),
        energy: total_energy(cfg, &sim.initial.positions, &sim.initial.velocities)?,
    };
    let mut acc = force.matvec(&state.positions)?;
    visit(&state);

    for step in 1..=sim.steps {
        for ((x, v), a) in state.positions.iter_mut().zip(&state.velocities).zip(&acc) {
            *x += dt * v + 0.5 * dt * dt * a;
        }
        let next = force.matvec(&state.positions)?;
        for ((v, a0), a1) in state.velocities.iter_mut().zip(&acc).zip(&next) {
            *v += 0.5 * dt * (a0 + a1);
        }
        acc = next;
        state.time = step as f64 * dt;
        state.energy = total_energy(cfg, &state.positions, &state.velocities)?;
        visit(&state);
    }
    Ok(())
}

pub fn verlet_simulate(sim: &SimulationConfig) -> Result<Vec<TrajectoryState>> {
    let mut states = Vec::with_capacity(sim.steps + 1);
    verlet_run(sim, |s| states.push(s.clone()))?;
    Ok(states)
}

/// Largest `|E_i - E_0|` over a trajectory, relative to `|E_0|` (absolute
/// when `E_0 = 0`).
pub fn relative_energy_drift(states: &[TrajectoryState]) -> f64 {
    let Some(first) = states.first() else {
        return 0.0;
    };
    let e0 = first.energy;
    let worst = states
        .iter()
        .map(|s| (s.energy - e0).abs())
        .fold(0.0, f64::max);
    if e0 == 0.0 {
        worst
    } else {
        worst / e0.abs()
    }
}

/// Largest position difference between `states` and the exact solution at
/// the same times.
pub fn max_deviation_from_analytic(
    cfg: &ChainConfig,
    initial: &InitialState,
    states: &[TrajectoryState],
) -> Result<f64> {
    let exact = ModalEvolution::new(cfg, initial)?;
    Ok(states
        .iter()
        .map(|s| {
            let e = exact.state_at(s.time);
            s.positions
                .iter()
                .zip(&e.positions)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max))
}
