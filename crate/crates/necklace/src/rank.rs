//! Exact rank of rational matrices by fraction-free elimination.
//!
//! Rows are cleared to integers, then eliminated Bareiss-style with the
//! pivot chosen as the smallest nonzero entry in the column; rows are
//! renormalized by their gcd after each step to bound growth. All arithmetic
//! is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::Scalar;

/// Clears denominators and divides by the row gcd.
fn integer_row(row: &[Scalar]) -> Vec<BigInt> {
    let mut lcm = BigInt::from(1);
    for c in row {
        lcm = lcm.lcm(c.denom());
    }
    let mut out: Vec<BigInt> = row.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let mut g = BigInt::zero();
    for v in &out {
        g = g.gcd(v);
    }
    if !g.is_zero() && g != BigInt::from(1) {
        for v in &mut out {
            *v /= &g;
        }
    }
    out
}

fn normalize_row(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for v in row.iter() {
        g = g.gcd(v);
    }
    if !g.is_zero() && g != BigInt::from(1) {
        for v in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// Exact rank over the rationals.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0usize;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // smallest nonzero pivot keeps intermediate entries small
        let mut pivot: Option<usize> = None;
        for i in r..nrows {
            if !m[i][c].is_zero()
                && pivot.is_none_or(|p| m[i][c].abs() < m[p][c].abs())
            {
                pivot = Some(i);
            }
        }
        let Some(p) = pivot else { continue };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let prow = &head[r];
        let pv = prow[c].clone();
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..ncols {
                row[j] = &row[j] * &pv - &prow[j] * &f;
            }
            normalize_row(row);
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_integer(n.into())
    }

    fn sr(n: i64, d: i64) -> Scalar {
        Scalar::new(n.into(), d.into())
    }

    #[test]
    fn rank_basic() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[vec![s(0), s(0)]]), 0);
        assert_eq!(rank(&[vec![s(1), s(2)], vec![s(2), s(4)]]), 1);
        assert_eq!(rank(&[vec![s(1), s(2)], vec![s(3), s(4)]]), 2);
        assert_eq!(
            rank(&[
                vec![sr(1, 2), sr(1, 3)],
                vec![sr(3, 2), s(1)],
                vec![s(0), s(7)]
            ]),
            2
        );
    }

    #[test]
    fn rank_matches_float_free_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(1..6usize);
            let k = rng.random_range(1..6usize);
            // random rank-deficient matrix: product of n x r and r x k
            let r = rng.random_range(0..=n.min(k));
            let a: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..r).map(|_| rng.random_range(-3..4)).collect())
                .collect();
            let b: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..k).map(|_| rng.random_range(-3..4)).collect())
                .collect();
            let m: Vec<Vec<Scalar>> = (0..n)
                .map(|i| {
                    (0..k)
                        .map(|j| s((0..r).map(|t| a[i][t] * b[t][j]).sum()))
                        .collect()
                })
                .collect();
            assert!(rank(&m) <= r);
        }
    }
}
