//! Exact linear algebra over Q for valuation vectors: coordinates with
//! respect to a basis of the value group, orders, l-adic splitting of
//! rationals, and rational rank. No floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// A valuation value in coordinates of a chosen basis: a length-n vector of
/// exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentVector(pub Vec<Rat>);

impl ExponentVector {
    pub fn from_ints(v: &[i64]) -> Self {
        ExponentVector(v.iter().map(|&x| Rat::from(BigInt::from(x))).collect())
    }

    pub fn from_bigints(v: &[BigInt]) -> Self {
        ExponentVector(v.iter().map(|x| Rat::from(x.clone())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A rank-n set of n integer valuation vectors (the valuations of chosen
/// monomials pi_1, ..., pi_n). Q-linear independence is checked at
/// construction.
#[derive(Debug, Clone)]
pub struct ValuationBasis {
    vectors: Vec<Vec<BigInt>>,
}

impl ValuationBasis {
    pub fn new(vectors: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = vectors.len();
        if n == 0 || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::Precondition(
                "basis must consist of n vectors of length n".into(),
            ));
        }
        let rows: Vec<ExponentVector> = vectors
            .iter()
            .map(|v| ExponentVector::from_bigints(v))
            .collect();
        if rational_rank(&rows) != n {
            return Err(Error::RankDeficient);
        }
        Ok(ValuationBasis { vectors })
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }
}

/// The unique rational coordinates c with sum_j c_j * basis_j = v.
pub fn coordinates(v: &ExponentVector, basis: &ValuationBasis) -> Result<ExponentVector> {
    let n = basis.n();
    if v.len() != n {
        return Err(Error::Precondition(format!(
            "vector length {} does not match basis rank {}",
            v.len(),
            n
        )));
    }
    // Solve M c = v where column j of M is basis_j.
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rat::from(basis.vectors[j][i].clone()))
                .collect()
        })
        .collect();
    let mut rhs: Vec<Rat> = v.0.clone();
    for col in 0..n {
        let pr = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .expect("basis has full rank");
        m.swap(col, pr);
        rhs.swap(col, pr);
        let pivot = m[col][col].clone();
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &pivot;
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] = &m[r][c] - t;
                }
                let t = &f * &rhs[col];
                rhs[r] = &rhs[r] - t;
            }
        }
    }
    let coords = (0..n).map(|i| &rhs[i] / &m[i][i]).collect();
    Ok(ExponentVector(coords))
}

/// Order of an element given its coordinates: the lcm of the denominators.
pub fn order_of(coords: &ExponentVector) -> BigInt {
    let mut acc = BigInt::one();
    for r in &coords.0 {
        acc = acc.lcm(r.denom());
    }
    acc
}

/// Split r = x / (l^y * z) with gcd(z, l) = 1, z > 0; y is the exact l-adic
/// valuation of the denominator.
pub fn l_adic_split(r: &Rat, l: u64) -> (BigInt, u32, BigInt) {
    let x = r.numer().clone();
    let mut z = r.denom().clone();
    let lb = BigInt::from(l);
    let mut y = 0u32;
    while (&z % &lb).is_zero() {
        z /= &lb;
        y += 1;
    }
    (x, y, z)
}

/// Rank of the rational matrix by exact fraction-free (Bareiss) elimination
/// after clearing denominators rowwise.
pub fn rational_rank(rows: &[ExponentVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let mut d = BigInt::one();
            for r in &row.0 {
                d = d.lcm(r.denom());
            }
            row.0
                .iter()
                .map(|r| r.numer() * (&d / r.denom()))
                .collect()
        })
        .collect();
    let nrows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        let pr = match (row..nrows).find(|&r| !m[r][col].is_zero()) {
            Some(pr) => pr,
            None => continue,
        };
        m.swap(row, pr);
        for r in row + 1..nrows {
            for c in col + 1..ncols {
                let t = &m[row][col] * &m[r][c] - &m[r][col] * &m[row][c];
                m[r][c] = &t / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        row += 1;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn basis(vs: &[&[i64]]) -> ValuationBasis {
        ValuationBasis::new(
            vs.iter()
                .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn coordinates_examples() {
        let id = basis(&[&[1, 0], &[0, 1]]);
        let v = ExponentVector::from_ints(&[3, -2]);
        assert_eq!(coordinates(&v, &id).unwrap(), ExponentVector::from_ints(&[3, -2]));

        let b = basis(&[&[2, 0], &[1, 1]]);
        let v = ExponentVector::from_ints(&[1, 0]);
        let c = coordinates(&v, &b).unwrap();
        assert_eq!(c.0, vec![rat(1, 2), rat(0, 1)]);

        let z = ExponentVector::from_ints(&[0, 0]);
        assert_eq!(coordinates(&z, &b).unwrap().0, vec![rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn rank_deficient_basis_rejected() {
        assert!(matches!(
            ValuationBasis::new(vec![
                vec![BigInt::from(1), BigInt::from(2)],
                vec![BigInt::from(2), BigInt::from(4)],
            ]),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn order_of_examples() {
        let c = ExponentVector(vec![rat(3, 4), rat(1, 6)]);
        assert_eq!(order_of(&c), BigInt::from(12));
        let c = ExponentVector(vec![rat(2, 1), rat(5, 1)]);
        assert_eq!(order_of(&c), BigInt::from(1));
        let c = ExponentVector(vec![rat(1, 2)]);
        assert_eq!(order_of(&c), BigInt::from(2));
    }

    #[test]
    fn l_adic_split_examples() {
        let (x, y, z) = l_adic_split(&rat(5, 12), 2);
        assert_eq!((x, y, z), (BigInt::from(5), 2, BigInt::from(3)));
        let (x, y, z) = l_adic_split(&rat(7, 5), 2);
        assert_eq!((x, y, z), (BigInt::from(7), 0, BigInt::from(5)));
        let (x, y, z) = l_adic_split(&rat(-3, 8), 2);
        assert_eq!((x, y, z), (BigInt::from(-3), 3, BigInt::from(1)));
    }

    #[test]
    fn rational_rank_examples() {
        assert_eq!(
            rational_rank(&[
                ExponentVector::from_ints(&[1, 0]),
                ExponentVector::from_ints(&[0, 1]),
            ]),
            2
        );
        assert_eq!(
            rational_rank(&[
                ExponentVector::from_ints(&[1, 2]),
                ExponentVector::from_ints(&[2, 4]),
            ]),
            1
        );
        assert_eq!(rational_rank(&[]), 0);
    }

    #[test]
    fn rank_invariant_under_scaling_and_swaps() {
        let rows = vec![
            ExponentVector(vec![rat(1, 2), rat(3, 1), rat(0, 1)]),
            ExponentVector(vec![rat(2, 3), rat(1, 7), rat(5, 1)]),
            ExponentVector(vec![rat(7, 6), rat(22, 7), rat(5, 1)]),
        ];
        let r = rational_rank(&rows);
        let scaled: Vec<ExponentVector> = rows
            .iter()
            .map(|row| ExponentVector(row.0.iter().map(|x| x * rat(-7, 3)).collect()))
            .collect();
        assert_eq!(rational_rank(&scaled), r);
        let swapped = vec![rows[2].clone(), rows[0].clone(), rows[1].clone()];
        assert_eq!(rational_rank(&swapped), r);
        // the third row is the sum of the first two
        assert_eq!(r, 2);
    }
}
