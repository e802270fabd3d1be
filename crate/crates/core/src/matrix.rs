//! Dense square matrices over exact integers or `f64`.
//!
//! Integer matrices use `i128` with checked arithmetic: every product and sum
//! either yields the exact value or an [`Error::Overflow`]. Equality of two
//! integer matrices is therefore an exact identity test.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact integer entry type for structural operators.
pub type Int = i128;

pub type IntMatrix = SquareMatrix<Int>;
pub type RealMatrix = SquareMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Int,
    Float,
}

pub trait Scalar: Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    const KIND: ScalarKind;
    const ZERO: Self;
    const ONE: Self;

    fn checked_add(self, rhs: Self) -> Option<Self>;
    fn checked_sub(self, rhs: Self) -> Option<Self>;
    fn checked_mul(self, rhs: Self) -> Option<Self>;
    fn neg(self) -> Self;
}

impl Scalar for Int {
    const KIND: ScalarKind = ScalarKind::Int;
    const ZERO: Self = 0;
    const ONE: Self = 1;

    fn checked_add(self, rhs: Self) -> Option<Self> {
        i128::checked_add(self, rhs)
    }
    fn checked_sub(self, rhs: Self) -> Option<Self> {
        i128::checked_sub(self, rhs)
    }
    fn checked_mul(self, rhs: Self) -> Option<Self> {
        i128::checked_mul(self, rhs)
    }
    fn neg(self) -> Self {
        -self
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    fn checked_add(self, rhs: Self) -> Option<Self> {
        Some(self + rhs)
    }
    fn checked_sub(self, rhs: Self) -> Option<Self> {
        Some(self - rhs)
    }
    fn checked_mul(self, rhs: Self) -> Option<Self> {
        Some(self * rhs)
    }
    fn neg(self) -> Self {
        -self
    }
}

/// Row-major dense `side × side` matrix.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix<T> {
    side: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(side: usize) -> Self {
        Self {
            side,
            data: vec![T::ZERO; side * side],
        }
    }

    pub fn identity(side: usize) -> Self {
        Self::from_fn(side, |i, j| if i == j { T::ONE } else { T::ZERO })
    }

    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(side * side);
        for i in 0..side {
            for j in 0..side {
                data.push(f(i, j));
            }
        }
        Self { side, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let side = rows.len();
        let mut data = Vec::with_capacity(side * side);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != side {
                return Err(Error::Ragged {
                    row,
                    expected: side,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Self { side, data })
    }

    pub fn diagonal(values: &[T]) -> Self {
        Self::from_fn(
            values.len(),
            |i, j| if i == j { values[i] } else { T::ZERO },
        )
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn kind(&self) -> ScalarKind {
        T::KIND
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.side + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.side + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.side..(i + 1) * self.side]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.side.max(1)).take(self.side)
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.rows().map(<[T]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.side, |i, j| self.get(j, i))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SquareMatrix<U> {
        SquareMatrix {
            side: self.side,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn trace(&self) -> Result<T> {
        (0..self.side).try_fold(T::ZERO, |acc, i| {
            acc.checked_add(self.get(i, i))
                .ok_or(Error::Overflow("trace"))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == T::ZERO)
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&x| x != T::ZERO).count()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.side)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.side).all(|i| (i + 1..self.side).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Symmetry about the anti-diagonal: `m[i][j] == m[n-1-j][n-1-i]` (0-based).
    pub fn is_persymmetric(&self) -> bool {
        let n = self.side;
        (0..n).all(|i| (0..n).all(|j| self.get(i, j) == self.get(n - 1 - j, n - 1 - i)))
    }

    fn check_same_side(&self, other: &Self) -> Result<()> {
        if self.side != other.side {
            return Err(Error::DimensionMismatch {
                left: self.side,
                right: other.side,
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        what: &'static str,
        f: impl Fn(T, T) -> Option<T>,
    ) -> Result<Self> {
        self.check_same_side(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b).ok_or(Error::Overflow(what)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            side: self.side,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "matrix sum", T::checked_add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "matrix difference", T::checked_sub)
    }

    pub fn scale(&self, factor: T) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|&x| {
                x.checked_mul(factor)
                    .ok_or(Error::Overflow("matrix scaling"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            side: self.side,
            data,
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_side(other)?;
        let n = self.side;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == T::ZERO {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    let term = a.checked_mul(b).ok_or(Error::Overflow("matrix product"))?;
                    *o = o
                        .checked_add(term)
                        .ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exponent: u32) -> Result<Self> {
        let mut result = Self::identity(self.side);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(result)
    }
}

impl SquareMatrix<Int> {
    pub fn to_f64(&self) -> RealMatrix {
        self.map(|x| x as f64)
    }
}

impl SquareMatrix<f64> {
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.side {
            return Err(Error::DimensionMismatch {
                left: self.side,
                right: v.len(),
            });
        }
        Ok(self
            .rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.side;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

impl<T: Scalar> fmt::Debug for SquareMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Wire form: `{"side": n, "kind": "int"|"float", "rows": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixWire<T> {
    side: usize,
    kind: ScalarKind,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar + Serialize> Serialize for SquareMatrix<T> {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            side: self.side,
            kind: T::KIND,
            rows: self.to_rows(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for SquareMatrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = MatrixWire::<T>::deserialize(deserializer)?;
        if wire.kind != T::KIND {
            return Err(D::Error::custom(format!(
                "expected a {:?} matrix, found kind {:?}",
                T::KIND,
                wire.kind
            )));
        }
        if wire.rows.len() != wire.side {
            return Err(D::Error::custom(format!(
                "side is {} but {} rows were given",
                wire.side,
                wire.rows.len()
            )));
        }
        SquareMatrix::from_rows(wire.rows).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_overflow_is_reported() {
        let big = IntMatrix::from_fn(2, |_, _| i128::MAX / 2);
        assert_eq!(big.matmul(&big), Err(Error::Overflow("matrix product")));
    }

    #[test]
    fn pow_zero_is_identity() {
        let m = IntMatrix::from_fn(3, |i, j| (i + 2 * j) as Int);
        assert!(m.pow(0).unwrap().is_identity());
        assert_eq!(m.pow(3).unwrap(), m.matmul(&m).unwrap().matmul(&m).unwrap());
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = IntMatrix::from_rows(vec![vec![1, 2], vec![3]]).unwrap_err();
        assert!(matches!(err, Error::Ragged { row: 1, .. }));
    }

    #[test]
    fn json_shape() {
        let m = IntMatrix::from_rows(vec![vec![-2, 1], vec![1, -2]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"side":2,"kind":"int","rows":[[-2,1],[1,-2]]}"#);
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);

        let f = RealMatrix::identity(1);
        assert_eq!(
            serde_json::to_string(&f).unwrap(),
            r#"{"side":1,"kind":"float","rows":[[1.0]]}"#
        );
    }

    #[test]
    fn json_kind_and_side_checked() {
        let float = r#"{"side":1,"kind":"float","rows":[[1]]}"#;
        assert!(serde_json::from_str::<IntMatrix>(float).is_err());
        let short = r#"{"side":2,"kind":"int","rows":[[1,0]]}"#;
        assert!(serde_json::from_str::<IntMatrix>(short).is_err());
    }
}
