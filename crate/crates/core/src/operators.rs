//! The structural operators of the chain, all with exact integer entries.
//!
//! Indices are 0-based throughout. Where the usual 1-based description of an
//! operator differs, the translation is noted on the constructor.

use crate::error::{Error, Result};
use crate::matrix::{Int, IntMatrix, Scalar, SquareMatrix};

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::TooFewMasses(n))
    } else {
        Ok(())
    }
}

/// Coupling matrix of the ring: `-2` on the diagonal, `+1` for each
/// nearest neighbour with wrap-around.
///
/// Couplings are accumulated, so at `n = 2` the neighbour on either side is
/// the same mass and the off-diagonal entry is `2`. This keeps
/// `H_c = T + T⁻¹ - 2·1` true for every `n`.
pub fn circular_coupling_matrix(n: usize) -> Result<IntMatrix> {
    check_n(n)?;
    let mut h = IntMatrix::zeros(n);
    for i in 0..n {
        h.set(i, i, -2);
        let right = (i + 1) % n;
        let left = (i + n - 1) % n;
        h.set(i, right, h.get(i, right) + 1);
        h.set(i, left, h.get(i, left) + 1);
    }
    Ok(h)
}

/// Tridiagonal Toeplitz `(1, -2, 1)` coupling matrix of the open chain.
pub fn linear_coupling_matrix(n: usize) -> Result<IntMatrix> {
    check_n(n)?;
    Ok(IntMatrix::from_fn(n, |i, j| match i.abs_diff(j) {
        0 => -2,
        1 => 1,
        _ => 0,
    }))
}

/// Cyclic shift `T`: `T[i][j] = 1` iff `i = (j + 1) mod n`, so `T e_j = e_{j+1}`.
pub fn shift_matrix(n: usize) -> Result<IntMatrix> {
    check_n(n)?;
    Ok(IntMatrix::from_fn(n, |i, j| Int::from(i == (j + 1) % n)))
}

/// Exchange matrix `J`: ones on the anti-diagonal, `J[i][j] = 1` iff `i + j = n - 1`.
pub fn exchange_matrix(n: usize) -> Result<IntMatrix> {
    check_n(n)?;
    Ok(IntMatrix::from_fn(n, |i, j| Int::from(i + j == n - 1)))
}

/// Alternating sign matrix `S = diag(+1, -1, +1, ...)`, `S[i][i] = (-1)^i`.
///
/// In 1-based terms the last entry is `(-1)^(n+1)`.
pub fn sign_matrix(n: usize) -> Result<IntMatrix> {
    check_n(n)?;
    let signs: Vec<Int> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    Ok(IntMatrix::diagonal(&signs))
}

/// `𝓗 = H_l + 2·1`, the adjacency matrix of the path graph on `n` vertices.
pub fn shifted_linear_matrix(n: usize) -> Result<IntMatrix> {
    linear_coupling_matrix(n)?.add(&IntMatrix::identity(n).scale(2)?)
}

/// `[a, b] = ab - ba`.
pub fn commutator<T: Scalar>(a: &SquareMatrix<T>, b: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// `{a, b} = ab + ba`.
pub fn anticommutator<T: Scalar>(
    a: &SquareMatrix<T>,
    b: &SquareMatrix<T>,
) -> Result<SquareMatrix<T>> {
    a.matmul(b)?.add(&b.matmul(a)?)
}

/// Builds the ring coupling as `T + Tᵀ - 2·1`, using `T⁻¹ = Tᵀ` for the
/// permutation `T`.
pub fn reconstruct_circular_from_shift(n: usize) -> Result<IntMatrix> {
    let t = shift_matrix(n)?;
    t.add(&t.transpose())?
        .sub(&IntMatrix::identity(n).scale(2)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[Int]]) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn circular_small_cases() {
        assert_eq!(
            circular_coupling_matrix(3).unwrap(),
            m(&[&[-2, 1, 1], &[1, -2, 1], &[1, 1, -2]])
        );
        assert_eq!(
            circular_coupling_matrix(2).unwrap(),
            m(&[&[-2, 2], &[2, -2]])
        );
        for n in 2..20 {
            let h = circular_coupling_matrix(n).unwrap();
            assert!(h.rows().all(|r| r.iter().sum::<Int>() == 0));
            assert!(h.is_symmetric());
        }
    }

    #[test]
    fn linear_small_cases() {
        assert_eq!(linear_coupling_matrix(2).unwrap(), m(&[&[-2, 1], &[1, -2]]));
        assert_eq!(
            linear_coupling_matrix(3).unwrap(),
            m(&[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]])
        );
        assert_eq!(linear_coupling_matrix(5).unwrap().trace().unwrap(), -10);
    }

    #[test]
    fn shift_small_cases() {
        assert_eq!(
            shift_matrix(3).unwrap(),
            m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]])
        );
        assert_eq!(shift_matrix(2).unwrap(), m(&[&[0, 1], &[1, 0]]));
        assert!(shift_matrix(4).unwrap().pow(4).unwrap().is_identity());
        // T e_j = e_{j+1 mod n}
        let t = shift_matrix(5).unwrap().to_f64();
        for j in 0..5 {
            let mut e = vec![0.0; 5];
            e[j] = 1.0;
            let te = t.matvec(&e).unwrap();
            assert_eq!(te[(j + 1) % 5], 1.0);
            assert_eq!(te.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn exchange_small_cases() {
        assert_eq!(
            exchange_matrix(3).unwrap(),
            m(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]])
        );
        let j5 = exchange_matrix(5).unwrap();
        assert!(j5.matmul(&j5).unwrap().is_identity());
        assert_eq!(exchange_matrix(2).unwrap(), shift_matrix(2).unwrap());
    }

    #[test]
    fn sign_small_cases() {
        assert_eq!(
            sign_matrix(4).unwrap(),
            IntMatrix::diagonal(&[1, -1, 1, -1])
        );
        assert_eq!(sign_matrix(3).unwrap(), IntMatrix::diagonal(&[1, -1, 1]));
        for n in 2..10 {
            let s = sign_matrix(n).unwrap();
            assert!(s.matmul(&s).unwrap().is_identity());
        }
    }

    #[test]
    fn constructors_reject_single_mass() {
        for ctor in [
            circular_coupling_matrix,
            linear_coupling_matrix,
            shift_matrix,
            exchange_matrix,
            sign_matrix,
            reconstruct_circular_from_shift,
        ] {
            assert_eq!(ctor(1), Err(Error::TooFewMasses(1)));
            assert_eq!(ctor(0), Err(Error::TooFewMasses(0)));
        }
    }

    #[test]
    fn commutator_examples() {
        let hc = circular_coupling_matrix(4).unwrap();
        let t4 = shift_matrix(4).unwrap();
        assert!(commutator(&hc, &t4).unwrap().is_zero());
        let j3 = exchange_matrix(3).unwrap();
        let t3 = shift_matrix(3).unwrap();
        assert!(!commutator(&j3, &t3).unwrap().is_zero());
        let hl = linear_coupling_matrix(4).unwrap();
        assert!(commutator(&hl, &exchange_matrix(4).unwrap())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn anticommutator_examples() {
        let s5 = sign_matrix(5).unwrap();
        let hl5 = linear_coupling_matrix(5).unwrap();
        assert_eq!(anticommutator(&hl5, &s5).unwrap(), s5.scale(-4).unwrap());
        let s4 = sign_matrix(4).unwrap();
        let hc4 = circular_coupling_matrix(4).unwrap();
        assert_eq!(anticommutator(&hc4, &s4).unwrap(), s4.scale(-4).unwrap());
        let s3 = sign_matrix(3).unwrap();
        assert_eq!(
            anticommutator(&IntMatrix::identity(3), &s3).unwrap(),
            s3.scale(2).unwrap()
        );
    }

    #[test]
    fn algebra_rejects_mismatched_sides() {
        let a = IntMatrix::identity(2);
        let b = IntMatrix::identity(3);
        assert_eq!(
            commutator(&a, &b),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        );
        assert!(anticommutator(&a, &b).is_err());
    }

    #[test]
    fn reconstruction_matches_direct_construction() {
        assert_eq!(
            reconstruct_circular_from_shift(2).unwrap(),
            m(&[&[-2, 2], &[2, -2]])
        );
        for n in 2..=64 {
            let r = reconstruct_circular_from_shift(n).unwrap();
            assert!(r.is_symmetric());
            assert_eq!(r, circular_coupling_matrix(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn shifted_linear_is_path_adjacency() {
        assert_eq!(
            shifted_linear_matrix(3).unwrap(),
            m(&[&[0, 1, 0], &[1, 0, 1], &[0, 1, 0]])
        );
    }
}
