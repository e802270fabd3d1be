//! The commutant of the open-chain coupling matrix.
//!
//! With `𝓗 = H_l + 2·1` (the path adjacency matrix), a matrix commutes with
//! `H_l` exactly when it commutes with `𝓗`, and the commuting matrices are
//! the span of `P_0(𝓗), …, P_{n-1}(𝓗)`. This module builds that basis,
//! expands matrices in it with exact rational coefficients, and checks the
//! surrounding structural facts on concrete sizes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::chebyshev::{eval_matrix, p_poly_recurrence};
use crate::error::{Error, Result};
use crate::matrix::{Int, IntMatrix};
use crate::operators::{commutator, linear_coupling_matrix, shifted_linear_matrix};

/// Largest `n` accepted by the exact-arithmetic routines.
pub const EXACT_CAP: usize = 30;

fn check_range(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewMasses(n));
    }
    if n > EXACT_CAP {
        return Err(Error::ExactCapExceeded { n, cap: EXACT_CAP });
    }
    Ok(())
}

fn serialize_rationals<S: Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutantDecomposition {
    pub n: usize,
    /// `m = Σ coefficients[i]·P_i(𝓗)`; serialized as `"p/q"` strings.
    #[serde(serialize_with = "serialize_rationals")]
    pub coefficients: Vec<BigRational>,
    /// True iff the expansion reproduces the input exactly.
    pub residual_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Decomposition {
    InSpan(CommutantDecomposition),
    NotInSpan {
        n: usize,
        /// Nonzero entries of `[H_l, m]`.
        nonzero_commutator_entries: usize,
    },
}

impl Decomposition {
    pub fn in_span(&self) -> Option<&CommutantDecomposition> {
        match self {
            Decomposition::InSpan(d) => Some(d),
            Decomposition::NotInSpan { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub cross_sum: bool,
    pub symmetric: bool,
    pub persymmetric: bool,
}

impl StructuralReport {
    pub fn all(&self) -> bool {
        self.cross_sum && self.symmetric && self.persymmetric
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionProbe {
    pub n: usize,
    /// Dimension of `{M : [H_l, M] = 0}`.
    pub dimension: usize,
    pub trials: usize,
    /// Sampled commuting matrices whose expansion was exact.
    pub decomposed: usize,
}

impl DimensionProbe {
    pub fn passed(&self) -> bool {
        self.dimension == self.n && self.decomposed == self.trials
    }
}

/// `[P_0(𝓗), …, P_{n-1}(𝓗)]` for the `n`-site open chain.
pub fn commutant_basis(n: usize) -> Result<Vec<IntMatrix>> {
    check_range(n)?;
    let h = shifted_linear_matrix(n)?;
    (0..n)
        .map(|i| eval_matrix(&p_poly_recurrence(i)?, &h))
        .collect()
}

fn to_rational(x: Int) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Expands `m` in the commutant basis, or reports that it does not commute
/// with `H_l(n)`.
///
/// The first row of `P_i(𝓗)` vanishes beyond column `i` and is nonzero at
/// column `i`, so the coefficients follow from the first row of `m` by back
/// substitution. The full expansion is then compared with `m` entry by entry.
pub fn decompose(m: &IntMatrix, n: usize) -> Result<Decomposition> {
    if m.side() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: m.side(),
        });
    }
    check_range(n)?;
    let comm = commutator(&linear_coupling_matrix(n)?, m)?;
    if !comm.is_zero() {
        return Ok(Decomposition::NotInSpan {
            n,
            nonzero_commutator_entries: comm.count_nonzero(),
        });
    }

    let basis = commutant_basis(n)?;
    let mut coefficients = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut rhs = to_rational(m.get(0, i));
        for j in i + 1..n {
            rhs -= &coefficients[j] * to_rational(basis[j].get(0, i));
        }
        let pivot = basis[i].get(0, i);
        debug_assert_ne!(pivot, 0);
        coefficients[i] = rhs / to_rational(pivot);
    }

    let residual_zero = (0..n).all(|r| {
        (0..n).all(|c| {
            let sum: BigRational = coefficients
                .iter()
                .zip(&basis)
                .map(|(coef, b)| coef * to_rational(b.get(r, c)))
                .sum();
            sum == to_rational(m.get(r, c))
        })
    });

    Ok(Decomposition::InSpan(CommutantDecomposition {
        n,
        coefficients,
        residual_zero,
    }))
}

/// Checks `M_{i-1,j} + M_{i+1,j} = M_{i,j-1} + M_{i,j+1}` at every position
/// (out-of-range terms are zero, which is entry `(i, j)` of `[𝓗, M] = 0`),
/// plus symmetry about both diagonals.
pub fn structural_checks(m: &IntMatrix) -> StructuralReport {
    let n = m.side();
    let at = |i: isize, j: isize| -> Int {
        if (0..n as isize).contains(&i) && (0..n as isize).contains(&j) {
            m.get(i as usize, j as usize)
        } else {
            0
        }
    };
    let cross_sum = (0..n as isize).all(|i| {
        (0..n as isize).all(|j| at(i - 1, j) + at(i + 1, j) == at(i, j - 1) + at(i, j + 1))
    });
    StructuralReport {
        cross_sum,
        symmetric: m.is_symmetric(),
        persymmetric: m.is_persymmetric(),
    }
}

/// `P_n(𝓗(n)) == 0` exactly.
pub fn cayley_hamilton_check(n: usize) -> Result<bool> {
    check_range(n)?;
    let h = shifted_linear_matrix(n)?;
    Ok(eval_matrix(&p_poly_recurrence(n)?, &h)?.is_zero())
}

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row.
fn rref(rows: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut().skip(c) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact rank of a list of integer vectors.
pub fn rank(vectors: &[Vec<Int>]) -> usize {
    let Some(ncols) = vectors.first().map(Vec::len) else {
        return 0;
    };
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| to_rational(x)).collect())
        .collect();
    rref(&mut rows, ncols).len()
}

/// Integer basis of `{M : [H_l(n), M] = 0}`, each element flattened row-major
/// and scaled to coprime integer entries.
pub fn commuting_nullspace(n: usize) -> Result<Vec<IntMatrix>> {
    if n < 2 {
        return Err(Error::TooFewMasses(n));
    }
    let h = linear_coupling_matrix(n)?;
    let dim = n * n;
    // row (i, j) of the system is entry (i, j) of H·M - M·H
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(dim);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![BigRational::zero(); dim];
            for k in 0..n {
                let hik = h.get(i, k);
                if hik != 0 {
                    row[k * n + j] += to_rational(hik);
                }
                let hkj = h.get(k, j);
                if hkj != 0 {
                    row[i * n + k] -= to_rational(hkj);
                }
            }
            rows.push(row);
        }
    }
    let pivots = rref(&mut rows, dim);
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();

    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); dim];
            v[f] = BigRational::one();
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            let ints = integer_direction(&v);
            let entries = ints
                .iter()
                .map(|x| x.to_i128().ok_or(Error::Overflow("nullspace basis")))
                .collect::<Result<Vec<_>>>()?;
            IntMatrix::from_rows(entries.chunks(n).map(<[Int]>::to_vec).collect())
        })
        .collect()
}

/// Scales a rational vector to the primitive integer vector along it.
fn integer_direction(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = scaled
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return scaled;
    }
    scaled.into_iter().map(|x| x / &gcd).collect()
}

/// Solves `[H_l, M] = 0` exactly, samples `trials` random integer
/// combinations of the solution basis, and expands each in the commutant
/// basis.
pub fn commutant_dimension_probe(n: usize, trials: usize, seed: u64) -> Result<DimensionProbe> {
    check_range(n)?;
    let null = commuting_nullspace(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decomposed = 0;
    for _ in 0..trials {
        let mut sample = IntMatrix::zeros(n);
        for b in &null {
            let weight: Int = rng.gen_range(-9..=9);
            sample = sample.add(&b.scale(weight)?)?;
        }
        if let Decomposition::InSpan(d) = decompose(&sample, n)? {
            if d.residual_zero {
                decomposed += 1;
            }
        }
    }
    Ok(DimensionProbe {
        n,
        dimension: null.len(),
        trials,
        decomposed,
    })
}

/// Coefficients as plain integers when every one is integral.
pub fn integer_coefficients(d: &CommutantDecomposition) -> Option<Vec<Int>> {
    d.coefficients
        .iter()
        .map(|c| c.is_integer().then(|| c.to_integer().to_i128()).flatten())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{exchange_matrix, shift_matrix};

    #[test]
    fn basis_small_cases() {
        let b2 = commutant_basis(2).unwrap();
        assert!(b2[0].is_identity());
        assert_eq!(
            b2[1],
            IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap()
        );
        let b3 = commutant_basis(3).unwrap();
        assert_eq!(b3[2], exchange_matrix(3).unwrap());
    }

    #[test]
    fn basis_commutes_with_chain() {
        let h = linear_coupling_matrix(5).unwrap();
        for b in commutant_basis(5).unwrap() {
            assert!(commutator(&h, &b).unwrap().is_zero());
        }
    }

    #[test]
    fn basis_first_rows_are_unit_vectors() {
        for n in 2..=12 {
            for (i, b) in commutant_basis(n).unwrap().iter().enumerate() {
                let expected: Vec<Int> = (0..n).map(|j| Int::from(j == i)).collect();
                assert_eq!(b.row(0), expected.as_slice());
            }
        }
    }

    #[test]
    fn cap_enforced() {
        assert_eq!(
            commutant_basis(31),
            Err(Error::ExactCapExceeded {
                n: 31,
                cap: EXACT_CAP
            })
        );
        assert!(cayley_hamilton_check(64).is_err());
        assert!(cayley_hamilton_check(30).unwrap());
        assert_eq!(commutant_basis(1), Err(Error::TooFewMasses(1)));
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&exchange_matrix(3).unwrap(), 3).unwrap();
        let d = d.in_span().unwrap();
        assert!(d.residual_zero);
        assert_eq!(integer_coefficients(d).unwrap(), vec![0, 0, 1]);

        let d = decompose(&IntMatrix::identity(4), 4).unwrap();
        assert_eq!(
            integer_coefficients(d.in_span().unwrap()).unwrap(),
            vec![1, 0, 0, 0]
        );

        match decompose(&shift_matrix(4).unwrap(), 4).unwrap() {
            Decomposition::NotInSpan {
                nonzero_commutator_entries,
                ..
            } => assert!(nonzero_commutator_entries > 0),
            other => panic!("shift should not commute: {other:?}"),
        }
    }

    #[test]
    fn decompose_rejects_wrong_side() {
        assert_eq!(
            decompose(&IntMatrix::identity(3), 4),
            Err(Error::DimensionMismatch { left: 4, right: 3 })
        );
    }

    #[test]
    fn decompose_json() {
        let d = decompose(&exchange_matrix(3).unwrap(), 3).unwrap();
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"status":"in_span","n":3,"coefficients":["0","0","1"],"residual_zero":true}"#
        );
        let d = decompose(&shift_matrix(3).unwrap(), 3).unwrap();
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(v["status"], "not_in_span");
    }

    #[test]
    fn structural_examples() {
        let all = StructuralReport {
            cross_sum: true,
            symmetric: true,
            persymmetric: true,
        };
        assert_eq!(structural_checks(&exchange_matrix(4).unwrap()), all);
        assert!(!structural_checks(&shift_matrix(4).unwrap()).cross_sum);
        assert_eq!(structural_checks(&IntMatrix::identity(3)), all);
    }

    #[test]
    fn cross_sum_agrees_with_commutator() {
        let h = shifted_linear_matrix(4).unwrap();
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = IntMatrix::from_fn(4, |_, _| rng.gen_range(-2..=2));
            let commutes = commutator(&h, &m).unwrap().is_zero();
            assert_eq!(structural_checks(&m).cross_sum, commutes);
        }
    }

    #[test]
    fn cayley_hamilton_small() {
        for n in 2..=20 {
            assert!(cayley_hamilton_check(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn nullspace_dimension_small() {
        assert_eq!(commuting_nullspace(2).unwrap().len(), 2);
        let probe = commutant_dimension_probe(4, 5, 7).unwrap();
        assert_eq!(probe.dimension, 4);
        assert!(probe.passed());
        let probe = commutant_dimension_probe(2, 3, 1).unwrap();
        assert_eq!(probe.dimension, 2);
        assert!(probe.passed());
    }

    #[test]
    fn rank_of_dependent_set() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn linear_combination_round_trip() {
        let m = exchange_matrix(3)
            .unwrap()
            .scale(2)
            .unwrap()
            .sub(&IntMatrix::identity(3).scale(3).unwrap())
            .unwrap();
        let d = decompose(&m, 3).unwrap();
        assert_eq!(
            integer_coefficients(d.in_span().unwrap()).unwrap(),
            vec![-3, 0, 2]
        );
    }
}
