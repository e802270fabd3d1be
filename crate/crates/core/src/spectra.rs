//! Closed-form normal-mode spectra of the ring and the open chain.
//!
//! Sign convention: `H·v = λ·v` with `λ = -ω²/ω₀²`, so every eigenvalue is
//! non-positive and frequencies `ω = ω₀·√(-λ)` are non-negative.
//!
//! Each eigenvalue is listed once: ring modes are `k = 0..n`, open-chain
//! modes are `k = 1..=n`.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::chain::{ChainConfig, Topology};
use crate::error::{Error, Result};

pub const DEFAULT_CLUSTER_REL_TOL: f64 = 1e-8;
const REFLECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub topology: Topology,
    pub n: usize,
    pub omega0: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `frequencies[i]` belongs to `eigenvalues[i]`.
    pub frequencies: Vec<f64>,
    /// `mode_indices[i]` is the `k` label of `eigenvalues[i]`.
    pub mode_indices: Vec<usize>,
    /// Groups of positions into `eigenvalues` with equal value.
    pub degeneracy_clusters: Vec<Vec<usize>>,
}

/// One entry of the serialized spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRecord {
    pub k: usize,
    pub lambda: f64,
    pub omega: f64,
    pub degeneracy_class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeShape {
    pub mode_index: usize,
    pub eigenvalue: f64,
    /// Unit 2-norm, first nonzero component positive.
    pub components: Vec<f64>,
}

/// `-4·sin²(x)`, with `+0.0` rather than `-0.0` at `x = 0`.
fn minus_four_sin_sq(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        -4.0 * s * s
    }
}

fn assemble(cfg: &ChainConfig, modes: Vec<(usize, f64, f64)>) -> Spectrum {
    let mut modes = modes;
    // ties keep the smaller k first
    modes.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let eigenvalues: Vec<f64> = modes.iter().map(|m| m.1).collect();
    let degeneracy_clusters = cluster_sorted(&eigenvalues, DEFAULT_CLUSTER_REL_TOL);
    Spectrum {
        topology: cfg.topology(),
        n: cfg.n(),
        omega0: cfg.omega0(),
        frequencies: modes.iter().map(|m| m.2).collect(),
        mode_indices: modes.iter().map(|m| m.0).collect(),
        eigenvalues,
        degeneracy_clusters,
    }
}

fn require(cfg: &ChainConfig, topology: Topology) -> Result<()> {
    if cfg.topology() != topology {
        return Err(Error::InvalidConfig(format!(
            "expected a {topology} chain, got {}",
            cfg.topology()
        )));
    }
    Ok(())
}

/// `λ_k = -4 sin²(kπ/n)`, `ω_k = 2ω₀|sin(kπ/n)|`, `k = 0..n`.
pub fn circular_spectrum(cfg: &ChainConfig) -> Result<Spectrum> {
    require(cfg, Topology::Circular)?;
    let n = cfg.n();
    let modes = (0..n)
        .map(|k| {
            // k and n-k share the same value; use the smaller argument for both
            let s = (k.min(n - k) as f64 * PI / n as f64).sin();
            (k, minus_four_sin_sq(s), 2.0 * cfg.omega0() * s.abs())
        })
        .collect();
    Ok(assemble(cfg, modes))
}

/// `λ_k = -4 sin²(kπ/(2(n+1)))`, `ω_k = 2ω₀ sin(kπ/(2(n+1)))`, `k = 1..=n`.
pub fn linear_spectrum(cfg: &ChainConfig) -> Result<Spectrum> {
    require(cfg, Topology::Linear)?;
    let n = cfg.n();
    let modes = (1..=n)
        .map(|k| {
            let s = (k as f64 * PI / (2.0 * (n as f64 + 1.0))).sin();
            (k, minus_four_sin_sq(s), 2.0 * cfg.omega0() * s)
        })
        .collect();
    Ok(assemble(cfg, modes))
}

pub fn spectrum(cfg: &ChainConfig) -> Spectrum {
    match cfg.topology() {
        Topology::Circular => circular_spectrum(cfg),
        Topology::Linear => linear_spectrum(cfg),
    }
    .expect("topology matches by construction")
}

fn canonical(mode_index: usize, eigenvalue: f64, mut v: Vec<f64>) -> ModeShape {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = v
        .iter()
        .find(|x| x.abs() > 1e-12 * norm)
        .map_or(1.0, |x| x.signum());
    for x in &mut v {
        *x *= sign / norm;
    }
    ModeShape {
        mode_index,
        eigenvalue,
        components: v,
    }
}

/// Real orthonormal modes of the ring, ordered by `k`.
///
/// For `0 < k < n/2` mode `k` is the cosine wave `cos(2πkj/n)` and mode
/// `n-k` the sine wave `sin(2πkj/n)`; `k = 0` and (even `n`) `k = n/2` are
/// single real vectors.
pub fn circular_modes(n: usize) -> Result<Vec<ModeShape>> {
    let cfg = ChainConfig::with_omega0(Topology::Circular, n, 1.0)?;
    let spec = circular_spectrum(&cfg)?;
    let mut lambda = vec![0.0; n];
    for (&k, &l) in spec.mode_indices.iter().zip(&spec.eigenvalues) {
        lambda[k] = l;
    }
    // reduce k·j mod n before scaling so large arguments stay exact
    let wave = |k: usize, f: fn(f64) -> f64| -> Vec<f64> {
        (0..n)
            .map(|j| f(2.0 * PI * ((k * j) % n) as f64 / n as f64))
            .collect()
    };
    Ok((0..n)
        .map(|k| {
            let v = if 2 * k <= n {
                wave(k, f64::cos)
            } else {
                wave(n - k, f64::sin)
            };
            canonical(k, lambda[k], v)
        })
        .collect())
}

/// Standing-wave modes of the open chain, `v_j ∝ sin(kjπ/(n+1))` for
/// `j = 1..=n`, ordered by `k = 1..=n`.
pub fn linear_modes(n: usize) -> Result<Vec<ModeShape>> {
    let cfg = ChainConfig::with_omega0(Topology::Linear, n, 1.0)?;
    let spec = linear_spectrum(&cfg)?;
    let mut lambda = vec![0.0; n + 1];
    for (&k, &l) in spec.mode_indices.iter().zip(&spec.eigenvalues) {
        lambda[k] = l;
    }
    let period = 2 * (n + 1);
    Ok((1..=n)
        .map(|k| {
            let v = (1..=n)
                .map(|j| (PI * ((k * j) % period) as f64 / (n as f64 + 1.0)).sin())
                .collect();
            canonical(k, lambda[k], v)
        })
        .collect())
}

pub fn modes(topology: Topology, n: usize) -> Result<Vec<ModeShape>> {
    match topology {
        Topology::Circular => circular_modes(n),
        Topology::Linear => linear_modes(n),
    }
}

fn cluster_sorted(eigenvalues: &[f64], rel_tol: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &l) in eigenvalues.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if (l - eigenvalues[i - 1]).abs() < rel_tol * l.abs().max(1.0) => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Groups neighbouring eigenvalues whose gap is below `rel_tol·max(1, |λ|)`.
pub fn degeneracy_clusters(spectrum: &Spectrum, rel_tol: f64) -> Vec<Vec<usize>> {
    cluster_sorted(&spectrum.eigenvalues, rel_tol)
}

pub fn multiplicities(clusters: &[Vec<usize>]) -> Vec<usize> {
    clusters.iter().map(Vec::len).collect()
}

/// Whether the eigenvalue multiset is invariant under `λ ↦ -4 - λ`.
pub fn spectral_reflection_check(spectrum: &Spectrum) -> bool {
    reflection_symmetric(&spectrum.eigenvalues)
}

/// Same test on any ascending list of eigenvalues.
pub fn reflection_symmetric(sorted: &[f64]) -> bool {
    // the map reverses order, so the reflected list is ascending when reversed
    sorted
        .iter()
        .zip(sorted.iter().rev().map(|l| -4.0 - l))
        .all(|(a, b)| (a - b).abs() < REFLECTION_TOL)
}

impl Spectrum {
    /// Modes in `k` order, tagged with their degeneracy cluster.
    pub fn records(&self) -> Vec<ModeRecord> {
        let mut class = vec![0; self.eigenvalues.len()];
        for (c, members) in self.degeneracy_clusters.iter().enumerate() {
            for &i in members {
                class[i] = c;
            }
        }
        let mut records: Vec<ModeRecord> = (0..self.eigenvalues.len())
            .map(|i| ModeRecord {
                k: self.mode_indices[i],
                lambda: self.eigenvalues[i],
                omega: self.frequencies[i],
                degeneracy_class: class[i],
            })
            .collect();
        records.sort_by_key(|r| r.k);
        records
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with header `k,lambda,omega`, rows in `k` order.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "k,lambda,omega")?;
        for r in self.records() {
            writeln!(out, "{},{:?},{:?}", r.k, r.lambda, r.omega)?;
        }
        Ok(())
    }
}
