//! Exact nullspaces of rational matrices.
//!
//! Rows are first cleared of denominators, then reduced by fraction-free
//! Gauss–Jordan elimination: each update `row ← a·row - b·pivot_row` stays in
//! the integers, and every updated row is divided by its content to keep
//! entries small. Pivots are chosen by smallest bit size.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nullspace {
    pub rank: usize,
    pub ncols: usize,
    /// Pivot column of each nonzero row of the reduced form.
    pub pivots: Vec<usize>,
    /// One primitive integer vector per free column, in column order.
    pub basis: Vec<Vec<BigInt>>,
}

impl Nullspace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Index of the basis vector whose largest entry has the fewest bits,
    /// ties going to the lowest index.
    pub fn smallest_vector_index(&self) -> Option<usize> {
        self.basis
            .iter()
            .enumerate()
            .min_by_key(|(i, v)| (max_bits(v), *i))
            .map(|(i, _)| i)
    }
}

pub fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.bits()).max().unwrap_or(0)
}

/// Divides `v` by the gcd of its entries (no-op for the zero vector).
pub fn make_primitive(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// Scales a rational row to a primitive integer row with the same kernel.
pub fn integer_row(row: &[ExactRational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let mut out: Vec<BigInt> = row.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    make_primitive(&mut out);
    out
}

/// Exact nullspace of the matrix whose rows are `rows` (each of length `ncols`).
pub fn nullspace(rows: &[Vec<ExactRational>], ncols: usize) -> Nullspace {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "ragged matrix");
            integer_row(r)
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pi) = (r..nrows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| (m[i][c].bits(), i))
        else {
            continue;
        };
        m.swap(r, pi);
        let pivot_row = m[r].clone();
        let a = &pivot_row[c];
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let b = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * a - &b * y;
            }
            make_primitive(row);
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let basis = (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| kernel_vector(&m[..rank], &pivots, f, ncols))
        .collect();
    Nullspace {
        rank,
        ncols,
        pivots,
        basis,
    }
}

/// Kernel vector with free column `f` set and every other free column zero.
fn kernel_vector(reduced: &[Vec<BigInt>], pivots: &[usize], f: usize, ncols: usize) -> Vec<BigInt> {
    let l = reduced
        .iter()
        .zip(pivots)
        .filter(|(row, _)| !row[f].is_zero())
        .fold(BigInt::one(), |l, (row, &c)| l.lcm(&row[c].abs()));
    let mut v = vec![BigInt::zero(); ncols];
    v[f] = l.clone();
    for (row, &c) in reduced.iter().zip(pivots) {
        if !row[f].is_zero() {
            v[c] = -(&row[f] * (&l / &row[c]));
        }
    }
    make_primitive(&mut v);
    v
}

/// `M·v` for a rational matrix and an integer vector.
pub fn apply(rows: &[Vec<ExactRational>], v: &[BigInt]) -> Vec<ExactRational> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(v)
                .filter(|(_, x)| !x.is_zero())
                .fold(ExactRational::zero(), |acc, (a, x)| acc + a * x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<ExactRational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
            .collect()
    }

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_kernel() {
        let m = ints(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.basis, vec![bi(&[-2, 1, 0]), bi(&[-3, 0, 1])]);
        assert_eq!(ns.smallest_vector_index(), Some(0));
    }

    #[test]
    fn rational_rows() {
        let m = vec![vec![rat(1, 2), rat(-1, 3)]];
        let ns = nullspace(&m, 2);
        assert_eq!(ns.basis, vec![bi(&[2, 3])]);
    }

    #[test]
    fn full_rank_and_empty() {
        let ns = nullspace(&ints(&[&[1, 0], &[0, 1]]), 2);
        assert_eq!(ns.dimension(), 0);
        assert_eq!(ns.smallest_vector_index(), None);
        let ns = nullspace(&[], 2);
        assert_eq!(ns.rank, 0);
        assert_eq!(ns.basis, vec![bi(&[1, 0]), bi(&[0, 1])]);
    }

    #[test]
    fn primitive_scaling() {
        let mut v = bi(&[4, -6, 0, 10]);
        make_primitive(&mut v);
        assert_eq!(v, bi(&[2, -3, 0, 5]));
        assert_eq!(integer_row(&[rat(1, 4), rat(1, 6)]), bi(&[3, 2]));
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(
            entries in proptest::collection::vec(-6i64..=6, 12..=12),
            nrows in 1usize..=4,
        ) {
            let ncols = 12 / nrows.max(1);
            let m: Vec<Vec<ExactRational>> = entries
                .chunks(ncols)
                .take(nrows)
                .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
                .collect();
            let ns = nullspace(&m, ncols);
            prop_assert_eq!(ns.rank + ns.dimension(), ncols);
            for v in &ns.basis {
                prop_assert!(v.iter().any(|x| !x.is_zero()));
                prop_assert!(apply(&m, v).iter().all(|x| x.is_zero()));
            }
        }
    }
}
