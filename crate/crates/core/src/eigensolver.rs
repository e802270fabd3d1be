//! Numerical eigenvalue oracles for real symmetric matrices.
//!
//! Nothing here knows about closed-form chain spectra. Two unrelated
//! algorithms are provided so they can check each other:
//!
//! * Jacobi rotations for any dense symmetric matrix;
//! * Sturm-sequence bisection for symmetric tridiagonal matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-12;
const SKIP_ROTATION_BELOW: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Number of full sweeps performed.
    pub iterations: usize,
    /// Frobenius norm of the off-diagonal part at return.
    pub off_diagonal_residual: f64,
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let x = a[i * n + j];
            sum += 2.0 * x * x;
        }
    }
    sum.sqrt()
}

struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
}

/// Rotation in the `(p, q)` plane that annihilates `a[p][q]`, or `None` when
/// the entry is already negligible.
fn plan_rotation(a: &[f64], n: usize, p: usize, q: usize) -> Option<(Rotation, f64)> {
    let apq = a[p * n + q];
    if apq.abs() < SKIP_ROTATION_BELOW {
        return None;
    }
    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    let t = if theta.is_finite() && theta.abs() < 1e150 {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.5 / theta
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    Some((Rotation { p, q, c, s: t * c }, t * apq))
}

/// Applies one round of disjoint rotations: rows first (`Jᵀ·A`), then
/// columns (`·J`). The pairs are disjoint, so each `(p, q)` block only sees
/// its own rotation and is set from the closed-form 2×2 update.
fn apply_round(a: &mut [f64], n: usize, rotations: &[(Rotation, f64)]) {
    for (r, _) in rotations {
        let (head, tail) = a.split_at_mut(r.q * n);
        let row_p = &mut head[r.p * n..(r.p + 1) * n];
        let row_q = &mut tail[..n];
        for (xp, xq) in row_p.iter_mut().zip(row_q.iter_mut()) {
            let (vp, vq) = (*xp, *xq);
            *xp = r.c * vp - r.s * vq;
            *xq = r.s * vp + r.c * vq;
        }
    }
    for row in a.chunks_exact_mut(n) {
        for (r, _) in rotations {
            let (vp, vq) = (row[r.p], row[r.q]);
            row[r.p] = r.c * vp - r.s * vq;
            row[r.q] = r.s * vp + r.c * vq;
        }
    }
}

/// Eigenvalues of a real symmetric matrix by Jacobi rotations.
///
/// Each sweep visits every off-diagonal pair once, in round-robin
/// (tournament) order: `n - 1` rounds of up to `n / 2` disjoint pairs, with
/// index 0 fixed and the rest cycled one seat per round. The order is fixed,
/// so results are bit-for-bit reproducible.
///
/// Converged when the off-diagonal Frobenius norm drops below
/// `tol · ‖a‖_F`. Fails with [`Error::NoConvergence`] after
/// [`MAX_SWEEPS`] sweeps.
pub fn jacobi_eigenvalues(a: &RealMatrix, tol: f64) -> Result<EigenResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidTolerance(tol));
    }
    let asym = a.max_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let n = a.side();
    let threshold = tol * a.frobenius_norm();
    let mut work = a.clone();
    let data = work.data_mut();

    // odd n gets a dummy seat; pairs touching it are skipped
    let seats = n + n % 2;
    let mut order: Vec<usize> = (0..seats).collect();
    let mut round = Vec::with_capacity(seats / 2);

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(data, n);
    while off >= threshold && off > 0.0 {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for _ in 1..seats {
            round.clear();
            for i in 0..seats / 2 {
                let (x, y) = (order[i], order[seats - 1 - i]);
                if x >= n || y >= n {
                    continue;
                }
                let (p, q) = (x.min(y), x.max(y));
                round.extend(plan_rotation(data, n, p, q));
            }
            let diag: Vec<(f64, f64)> = round
                .iter()
                .map(|(r, shift)| (data[r.p * n + r.p] - shift, data[r.q * n + r.q] + shift))
                .collect();
            apply_round(data, n, &round);
            for ((r, _), (app, aqq)) in round.iter().zip(diag) {
                data[r.p * n + r.p] = app;
                data[r.q * n + r.q] = aqq;
                data[r.p * n + r.q] = 0.0;
                data[r.q * n + r.p] = 0.0;
            }
            order[1..].rotate_right(1);
        }
        sweeps += 1;
        off = off_diagonal_norm(data, n);
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| data[i * n + i]).collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(EigenResult {
        eigenvalues,
        iterations: sweeps,
        off_diagonal_residual: off,
    })
}

/// Number of eigenvalues strictly below `x`, from the sign pattern of the
/// LDLᵀ pivots of `T - x·1`.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut pivot = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 {
            0.0
        } else {
            offdiag[i - 1] * offdiag[i - 1]
        };
        pivot = if i == 0 { d - x } else { (d - x) - e2 / pivot };
        if pivot == 0.0 {
            // perturb off an exact zero pivot so the next ratio stays finite
            pivot = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_interval(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// All eigenvalues of the symmetric tridiagonal matrix with main diagonal
/// `diag` and off-diagonal `offdiag`, located by bisection to an interval
/// width below `tol`. Ascending.
pub fn sturm_eigenvalues(diag: &[f64], offdiag: &[f64], tol: f64) -> Result<Vec<f64>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidTolerance(tol));
    }
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if offdiag.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            left: n - 1,
            right: offdiag.len(),
        });
    }
    let (lo, hi) = gershgorin_interval(diag, offdiag);
    // widen slightly so the endpoints are strict bounds
    let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);

    let eigenvalues = (0..n)
        .map(|k| {
            // smallest x with count(x) > k brackets the (k+1)-th eigenvalue
            let mut a = lo;
            let mut b = hi;
            while b - a >= tol {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(diag, offdiag, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect();
    Ok(eigenvalues)
}

/// `‖a·v - λ·v‖∞ / ‖v‖₂`.
pub fn residual(a: &RealMatrix, lambda: f64, v: &[f64]) -> Result<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let av = a.matvec(v)?;
    let worst = av
        .iter()
        .zip(v)
        .map(|(avi, vi)| (avi - lambda * vi).abs())
        .fold(0.0, f64::max);
    Ok(worst / norm)
}
