//! Chebyshev polynomials of the second kind with exact integer coefficients.
//!
//! Two normalisations are used:
//!
//! * `U_n`, the standard one: `U_0 = 1`, `U_1 = 2x`, `U_n = 2x·U_{n-1} - U_{n-2}`;
//! * `P_n(x) = U_n(x/2)`, the characteristic polynomials of the path
//!   adjacency matrix: `P_0 = 1`, `P_1 = x`, `P_n = x·P_{n-1} - P_{n-2}`.
//!
//! `P_n` keeps every coefficient an integer even for matrix arguments, so
//! matrix polynomials are always evaluated through `P_n`.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Int, IntMatrix};

/// Integer-coefficient polynomial, `coefficients()[i]` multiplies `x^i`.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has no
/// coefficients at all.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Int>", into = "Vec<Int>")]
pub struct Polynomial {
    coefficients: Vec<Int>,
}

impl From<Vec<Int>> for Polynomial {
    fn from(coefficients: Vec<Int>) -> Self {
        Self::new(coefficients)
    }
}

impl From<Polynomial> for Vec<Int> {
    fn from(p: Polynomial) -> Self {
        p.coefficients
    }
}

impl Polynomial {
    pub fn new(mut coefficients: Vec<Int>) -> Self {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Int) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Self::new(vec![0, 1])
    }

    pub fn coefficients(&self) -> &[Int] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Int {
        self.coefficients.last().copied().unwrap_or(0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let len = self.coefficients.len().max(other.coefficients.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coefficients.get(i).copied().unwrap_or(0);
                let b = other.coefficients.get(i).copied().unwrap_or(0);
                a.checked_sub(b)
                    .ok_or(Error::Overflow("polynomial difference"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }

    /// `factor · x · self`
    fn times_scaled_x(&self, factor: Int) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coefficients.len() + 1);
        coeffs.push(0);
        for &c in &self.coefficients {
            coeffs.push(
                c.checked_mul(factor)
                    .ok_or(Error::Overflow("polynomial product"))?,
            );
        }
        Ok(Self::new(coeffs))
    }

    /// `self(factor · x)`
    pub fn compose_scaled(&self, factor: Int) -> Result<Self> {
        let mut power: Int = 1;
        let mut coeffs = Vec::with_capacity(self.coefficients.len());
        for (i, &c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                power = power
                    .checked_mul(factor)
                    .ok_or(Error::Overflow("argument rescaling"))?;
            }
            coeffs.push(
                c.checked_mul(power)
                    .ok_or(Error::Overflow("argument rescaling"))?,
            );
        }
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.unsigned_abs();
            match (i, mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, 1) => f.write_str("x")?,
                (1, _) => write!(f, "{mag}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

fn three_term(n: usize, x_scale: Int) -> Result<Polynomial> {
    let mut prev = Polynomial::constant(1);
    if n == 0 {
        return Ok(prev);
    }
    let mut curr = Polynomial::x().compose_scaled(x_scale)?;
    for _ in 1..n {
        let next = curr.times_scaled_x(x_scale)?.sub(&prev)?;
        prev = std::mem::replace(&mut curr, next);
    }
    Ok(curr)
}

/// `P_n` from `P_n = x·P_{n-1} - P_{n-2}`.
pub fn p_poly_recurrence(n: usize) -> Result<Polynomial> {
    three_term(n, 1)
}

/// Exact `C(n, k)` by the multiplicative formula; every partial product is
/// itself a binomial coefficient, so each division is exact.
pub fn binomial(n: u64, k: u64) -> Result<Int> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut c: Int = 1;
    for i in 1..=k {
        c = c
            .checked_mul(Int::from(n - k + i))
            .ok_or(Error::Overflow("binomial coefficient"))?
            / Int::from(i);
    }
    Ok(c)
}

/// `P_n(x) = Σ_k (-1)^k C(n-k, k) x^(n-2k)`, `k = 0..=⌊n/2⌋`.
pub fn p_poly_explicit(n: usize) -> Result<Polynomial> {
    let mut coeffs = vec![0; n + 1];
    for k in 0..=n / 2 {
        let c = binomial((n - k) as u64, k as u64)?;
        coeffs[n - 2 * k] = if k % 2 == 0 { c } else { -c };
    }
    Ok(Polynomial::new(coeffs))
}

/// `U_n` from `U_n = 2x·U_{n-1} - U_{n-2}`.
pub fn u_poly(n: usize) -> Result<Polynomial> {
    three_term(n, 2)
}

/// Horner evaluation of `p` at `x`.
///
/// A finite `x` is an exact dyadic rational `m / 2^s`, so the Horner
/// recurrence is carried out exactly in integers and rounded once at the
/// end. Plain `f64` Horner on these coefficients loses about
/// `ε·Σ|c_i|`, which is already ~1e-8 for `U_20` near its roots.
pub fn eval_scalar(p: &Polynomial, x: f64) -> f64 {
    let coeffs = p.coefficients();
    let Some(degree) = coeffs.len().checked_sub(1) else {
        return 0.0;
    };
    if !x.is_finite() {
        return coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64);
    }
    let (mantissa, exponent, sign) = x.integer_decode();
    let m = BigInt::from(sign) * BigInt::from(mantissa);
    let (m, shift) = if exponent >= 0 {
        (m << exponent as usize, 0usize)
    } else {
        (m, (-exponent) as usize)
    };
    // acc_j = Σ_{i ≥ j} c_i m^(i-j) 2^(shift·(degree-i)), p(x) = acc_0 / 2^(shift·degree)
    let mut acc = BigInt::from(coeffs[degree]);
    for (j, &c) in coeffs.iter().enumerate().rev().skip(1) {
        acc = acc * &m + (BigInt::from(c) << (shift * (degree - j)));
    }
    let denom = BigInt::one() << (shift * degree);
    BigRational::new(acc, denom).to_f64().unwrap_or(f64::NAN)
}

/// `Σ c_i a^i` in exact integer arithmetic (Horner form). Overflow is
/// reported, never wrapped.
pub fn eval_matrix(p: &Polynomial, a: &IntMatrix) -> Result<IntMatrix> {
    let n = a.side();
    let mut acc = IntMatrix::zeros(n);
    for &c in p.coefficients().iter().rev() {
        acc = acc.matmul(a)?.add(&IntMatrix::identity(n).scale(c)?)?;
    }
    Ok(acc)
}

/// Roots of `U_n`: `cos(kπ/(n+1))` for `k = 1..=n`, descending.
pub fn u_roots(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| (k as f64 * PI / (n as f64 + 1.0)).cos())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::shifted_linear_matrix;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn poly(c: &[Int]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn recurrence_small_degrees() {
        assert_eq!(p_poly_recurrence(0).unwrap(), poly(&[1]));
        assert_eq!(p_poly_recurrence(1).unwrap(), poly(&[0, 1]));
        assert_eq!(p_poly_recurrence(2).unwrap(), poly(&[-1, 0, 1]));
        assert_eq!(p_poly_recurrence(3).unwrap(), poly(&[0, -2, 0, 1]));
    }

    #[test]
    fn explicit_small_degrees() {
        assert_eq!(p_poly_explicit(2).unwrap(), poly(&[-1, 0, 1]));
        assert_eq!(p_poly_explicit(4).unwrap(), poly(&[1, 0, -3, 0, 1]));
    }

    #[test]
    fn recurrence_and_binomial_sum_agree() {
        for n in 0..=32 {
            let r = p_poly_recurrence(n).unwrap();
            assert_eq!(r, p_poly_explicit(n).unwrap(), "n = {n}");
            assert_eq!(r.degree(), Some(n));
            assert_eq!(r.leading_coefficient(), 1);
        }
    }

    #[test]
    fn u_small_degrees() {
        assert_eq!(u_poly(1).unwrap(), poly(&[0, 2]));
        assert_eq!(u_poly(2).unwrap(), poly(&[-1, 0, 4]));
        assert_eq!(u_poly(3).unwrap(), poly(&[0, -4, 0, 8]));
        assert_eq!(
            p_poly_recurrence(2).unwrap().compose_scaled(2).unwrap(),
            u_poly(2).unwrap()
        );
    }

    #[test]
    fn u_is_p_at_doubled_argument() {
        for n in 0..=32 {
            let u = u_poly(n).unwrap();
            let p2 = p_poly_recurrence(n).unwrap().compose_scaled(2).unwrap();
            assert!(u.sub(&p2).unwrap().is_zero(), "n = {n}");
            assert_eq!(u.degree(), Some(n));
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(64, 32).unwrap(), 1_832_624_140_942_590_534);
    }

    #[test]
    fn scalar_evaluation() {
        assert_eq!(eval_scalar(&u_poly(3).unwrap(), 0.0), 0.0);
        assert_eq!(eval_scalar(&Polynomial::constant(1), 123.4), 1.0);
        assert_eq!(eval_scalar(&Polynomial::zero(), 2.0), 0.0);
        let theta: f64 = 0.3;
        assert_abs_diff_eq!(
            eval_scalar(&u_poly(5).unwrap(), theta.cos()),
            (6.0 * theta).sin() / theta.sin(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn matrix_evaluation() {
        let h3 = shifted_linear_matrix(3).unwrap();
        assert_eq!(
            eval_matrix(&p_poly_recurrence(1).unwrap(), &h3).unwrap(),
            h3
        );
        let p2 = eval_matrix(&p_poly_recurrence(2).unwrap(), &h3).unwrap();
        assert_eq!(
            p2,
            IntMatrix::from_rows(vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap()
        );
        let any = IntMatrix::from_fn(4, |i, j| (3 * i + j) as Int - 5);
        assert!(eval_matrix(&Polynomial::constant(1), &any)
            .unwrap()
            .is_identity());
    }

    #[test]
    fn matrix_evaluation_reports_overflow() {
        let big = IntMatrix::identity(2).scale(1 << 40).unwrap();
        let p = poly(&[0, 0, 0, 0, 1]);
        assert_eq!(
            eval_matrix(&p, &big),
            Err(Error::Overflow("matrix product"))
        );
    }

    #[test]
    fn roots_small_cases() {
        let r2 = u_roots(2);
        assert_abs_diff_eq!(r2[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r2[1], -0.5, epsilon = 1e-15);
        let r3 = u_roots(3);
        let h = 2.0f64.sqrt() / 2.0;
        for (got, want) in r3.iter().zip([h, 0.0, -h]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        assert_eq!(u_roots(1).len(), 1);
        assert_abs_diff_eq!(u_roots(1)[0], 0.0, epsilon = 1e-16);
    }

    #[test]
    fn roots_are_roots() {
        for n in 1..=64 {
            let u = u_poly(n).unwrap();
            let roots = u_roots(n);
            assert_eq!(roots.len(), n);
            assert!(roots.windows(2).all(|w| w[0] > w[1]));
            assert!(roots.iter().all(|r| r.abs() < 1.0));
            for r in roots {
                assert!(eval_scalar(&u, r).abs() < 1e-10, "n = {n}, root {r}");
            }
        }
    }

    #[test]
    fn display() {
        assert_eq!(p_poly_recurrence(4).unwrap().to_string(), "x^4 - 3x^2 + 1");
        assert_eq!(u_poly(1).unwrap().to_string(), "2x");
        assert_eq!(poly(&[-1]).to_string(), "-1");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    #[test]
    fn json_is_coefficient_array() {
        let p = p_poly_recurrence(2).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[-1,0,1]");
        assert_eq!(serde_json::from_str::<Polynomial>("[-1,0,1,0]").unwrap(), p);
    }

    proptest! {
        #[test]
        fn u_matches_trig_form(n in 0usize..=20, theta in 0.01f64..(PI - 0.01)) {
            let u = u_poly(n).unwrap();
            let lhs = eval_scalar(&u, theta.cos()) * theta.sin();
            prop_assert!((lhs - ((n as f64 + 1.0) * theta).sin()).abs() < 1e-10);
        }

        #[test]
        fn scalar_u_equals_p_at_twice_x(n in 0usize..=24, x in -1.0f64..1.0) {
            let u = eval_scalar(&u_poly(n).unwrap(), x);
            let p = eval_scalar(&p_poly_recurrence(n).unwrap(), 2.0 * x);
            prop_assert!((u - p).abs() <= 1e-9 * (1.0 + u.abs()));
        }
    }
}
