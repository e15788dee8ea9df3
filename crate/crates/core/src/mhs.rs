//! Exact (alternating) multiple harmonic sums.
//!
//! `H_n(s)` sums over `n >= k_1 > ... > k_r >= 1`, the star version
//! `H*_n(s)` over `n >= k_1 >= ... >= k_r >= 1`, of
//! `prod sgn(s_i)^{k_i} / k_i^{|s_i|}`.
//!
//! The evaluators work on whole prefix rows `[H_0(s), H_1(s), ..., H_n(s)]`
//! built from the row of `Trunc(s)`, so one pass costs `O(n * depth)`
//! rational operations and every prefix value comes for free. The
//! identity checkers need `H_{k-1}(tail)` for all `k <= n`, which is exactly
//! such a row.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::compositions::SignedComposition;
use crate::error::{Error, Result};

pub type ExactRational = BigRational;

/// Largest number of index tuples the brute-force oracle will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumKind {
    /// Strict inequalities, `H_n`.
    Strict,
    /// Weak inequalities, `H*_n`.
    Star,
}

/// `sgn(e)^k / k^{|e|}`.
pub fn entry_term(e: i64, k: u64) -> ExactRational {
    let den = BigInt::from(k).pow(e.unsigned_abs() as u32);
    let num = if e < 0 && k % 2 == 1 {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    BigRational::new(num, den)
}

/// Per-task memo of prefix rows keyed by composition and sum kind.
///
/// Rows are stored for every suffix that was needed, so evaluating many
/// compositions sharing tails (as identity grids do) reuses work.
#[derive(Debug, Default)]
pub struct MhsCache {
    rows: HashMap<(SumKind, SignedComposition), Vec<ExactRational>>,
}

impl MhsCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `[X_0(s), ..., X_n(s)]` for `X = H` or `H*`.
    pub fn prefix_row(&mut self, kind: SumKind, n: u64, s: &SignedComposition) -> &[ExactRational] {
        self.ensure(kind, n as usize, s);
        &self.rows[&(kind, s.clone())][..=n as usize]
    }

    pub fn value(&mut self, kind: SumKind, n: u64, s: &SignedComposition) -> ExactRational {
        self.prefix_row(kind, n, s)[n as usize].clone()
    }

    fn ensure(&mut self, kind: SumKind, n: usize, s: &SignedComposition) {
        let key = (kind, s.clone());
        let have = self.rows.get(&key).map_or(0, |r| r.len());
        if have > n {
            return;
        }
        if s.is_empty() {
            self.rows.insert(key, vec![BigRational::one(); n + 1]);
            return;
        }
        let tail = s.truncated();
        self.ensure(kind, n, &tail);
        let lead = s.entries()[0];
        let mut row = self.rows.remove(&key).unwrap_or_default();
        if row.is_empty() {
            row.push(BigRational::zero());
        }
        let inner = &self.rows[&(kind, tail)];
        let mut acc = row.last().cloned().expect("row has index 0");
        for k in row.len()..=n {
            let inner_val = match kind {
                SumKind::Strict => &inner[k - 1],
                SumKind::Star => &inner[k],
            };
            if !inner_val.is_zero() {
                acc += entry_term(lead, k as u64) * inner_val;
            }
            row.push(acc.clone());
        }
        self.rows.insert(key, row);
    }
}

/// Exact `H_n(s)`.
pub fn mhs(n: u64, s: &SignedComposition) -> ExactRational {
    MhsCache::new().value(SumKind::Strict, n, s)
}

/// Exact `H*_n(s)`.
pub fn mhs_star(n: u64, s: &SignedComposition) -> ExactRational {
    MhsCache::new().value(SumKind::Star, n, s)
}

fn tuple_count(kind: SumKind, n: u64, depth: usize) -> BigUint {
    let d = BigUint::from(depth);
    match kind {
        SumKind::Strict => binomial(BigUint::from(n), d),
        SumKind::Star => {
            if depth == 0 {
                BigUint::one()
            } else {
                binomial(BigUint::from(n) + &d - 1u32, d)
            }
        }
    }
}

fn brute_force(kind: SumKind, n: u64, s: &SignedComposition) -> Result<ExactRational> {
    let count = tuple_count(kind, n, s.depth());
    if count > BigUint::from(BRUTE_FORCE_LIMIT) {
        return Err(Error::TooManyTuples {
            count: count.to_string(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    fn walk(
        kind: SumKind,
        entries: &[i64],
        upper: u64,
        partial: &ExactRational,
        total: &mut ExactRational,
    ) {
        let Some((&e, rest)) = entries.split_first() else {
            *total += partial;
            return;
        };
        for k in 1..=upper {
            let next_upper = match kind {
                SumKind::Strict => k - 1,
                SumKind::Star => k,
            };
            walk(kind, rest, next_upper, &(partial * entry_term(e, k)), total);
        }
    }
    let mut total = BigRational::zero();
    walk(kind, s.entries(), n, &BigRational::one(), &mut total);
    Ok(total)
}

/// Literal nested-loop evaluation of `H_n(s)`; refuses more than
/// [`BRUTE_FORCE_LIMIT`] index tuples.
pub fn mhs_bruteforce(n: u64, s: &SignedComposition) -> Result<ExactRational> {
    brute_force(SumKind::Strict, n, s)
}

/// Literal nested-loop evaluation of `H*_n(s)`.
pub fn mhs_star_bruteforce(n: u64, s: &SignedComposition) -> Result<ExactRational> {
    brute_force(SumKind::Star, n, s)
}

/// `A_{n,k} = (-1)^{k-1} C(n,k) / C(n+k,k)`; zero for `k > n`.
pub fn binom_a(n: u64, k: u64) -> ExactRational {
    assert!(k >= 1, "A_{{n,k}} needs k >= 1");
    if k > n {
        return BigRational::zero();
    }
    let num = binomial(BigInt::from(n), BigInt::from(k));
    let den = binomial(BigInt::from(n + k), BigInt::from(k));
    let v = BigRational::new(num, den);
    if k % 2 == 1 {
        v
    } else {
        -v
    }
}

/// `[0, A_{n,1}, ..., A_{n,n}]` via the running product
/// `C(n,k)/C(n+k,k) = prod_{i<=k} (n-i+1)/(n+i)`.
pub fn binom_a_row(n: u64) -> Vec<ExactRational> {
    let mut row = Vec::with_capacity(n as usize + 1);
    row.push(BigRational::zero());
    let mut ratio = BigRational::one();
    for k in 1..=n {
        ratio *= BigRational::new(BigInt::from(n - k + 1), BigInt::from(n + k));
        row.push(if k % 2 == 1 {
            ratio.clone()
        } else {
            -ratio.clone()
        });
    }
    row
}

/// Nearest-ish double of an exact rational.
pub fn to_f64(x: &ExactRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fallback for magnitudes the direct conversion rejects.
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let num = x.numer().abs();
    let den = x.denom().clone();
    let shift = num.bits() as i64 - den.bits() as i64;
    let scaled = if shift > 60 {
        BigRational::new(num, den << (shift - 60) as usize)
    } else {
        BigRational::new(num << (60 - shift) as usize, den)
    };
    sign * scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi((shift - 60) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn comp(v: &[i64]) -> SignedComposition {
        SignedComposition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(mhs(2, &comp(&[2, 1])), q(1, 4));
        assert_eq!(mhs(0, &SignedComposition::empty()), q(1, 1));
        assert_eq!(mhs(2, &comp(&[-2])), q(-3, 4));
        assert_eq!(mhs_star(2, &comp(&[2, 1])), q(11, 8));
        assert_eq!(mhs_star(3, &comp(&[2])), q(49, 36));
        assert_eq!(mhs_star(0, &SignedComposition::empty()), q(1, 1));
    }

    #[test]
    fn below_depth_is_zero() {
        assert!(mhs(1, &comp(&[1, 1])).is_zero());
        assert!(mhs(2, &comp(&[3, -1, 2])).is_zero());
        assert!(mhs_bruteforce(1, &comp(&[1, 1])).unwrap().is_zero());
    }

    #[test]
    fn star_of_twos_at_one() {
        for a in 0..6 {
            assert_eq!(mhs_star(1, &comp(&vec![2; a])), q(1, 1));
        }
    }

    #[test]
    fn depth_one_star_equals_plain() {
        for e in [-3, -1, 1, 2, 5] {
            for n in 0..7 {
                assert_eq!(mhs(n, &comp(&[e])), mhs_star(n, &comp(&[e])));
            }
        }
    }

    #[test]
    fn bruteforce_small() {
        assert_eq!(mhs_bruteforce(2, &comp(&[2, 1])).unwrap(), q(1, 4));
        assert_eq!(
            mhs_bruteforce(5, &SignedComposition::empty()).unwrap(),
            q(1, 1)
        );
        assert_eq!(mhs_star_bruteforce(2, &comp(&[2, 1])).unwrap(), q(11, 8));
    }

    #[test]
    fn bruteforce_guard() {
        let err = mhs_bruteforce(1000, &comp(&[1, 1, 1, 1])).unwrap_err();
        assert!(matches!(err, Error::TooManyTuples { .. }));
        assert!(mhs_star_bruteforce(200, &comp(&[1, 1, 1, 1])).is_err());
        assert!(mhs_bruteforce(200, &comp(&[1, 1])).is_ok());
    }

    #[test]
    fn cache_extends_rows() {
        let mut cache = MhsCache::new();
        let s = comp(&[2, -1, 3]);
        let short = cache.value(SumKind::Star, 4, &s);
        let long = cache.value(SumKind::Star, 9, &s);
        assert_eq!(short, mhs_star(4, &s));
        assert_eq!(long, mhs_star(9, &s));
        let row = cache.prefix_row(SumKind::Strict, 6, &s).to_vec();
        for (k, v) in row.iter().enumerate() {
            assert_eq!(*v, mhs_bruteforce(k as u64, &s).unwrap());
        }
    }

    #[test]
    fn binomial_weights() {
        assert_eq!(binom_a(1, 1), q(1, 2));
        assert_eq!(binom_a(2, 2), q(-1, 6));
        assert!(binom_a(3, 4).is_zero());
        for n in 1..15 {
            let row = binom_a_row(n);
            for k in 1..=n {
                assert_eq!(row[k as usize], binom_a(n, k));
            }
        }
    }

    #[test]
    fn binomial_weights_tend_to_sign() {
        // Exact gaps at n = 10^4 are about k^2/n: 1e-4, 4e-4, ..., 2.5e-3.
        for k in 1..=5u64 {
            let target = if k % 2 == 1 { 1.0 } else { -1.0 };
            let gap = (to_f64(&binom_a(10_000, k)) - target).abs();
            assert!(gap < 1e-2, "k={k} gap={gap}");
            assert!(gap < (k * k) as f64 / 10_000.0);
        }
    }

    #[test]
    fn h_two_increases_below_zeta_two() {
        let s = comp(&[2]);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        let row = MhsCache::new().prefix_row(SumKind::Strict, 60, &s).to_vec();
        for w in row.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(to_f64(&row[60]) < zeta2);
    }

    #[test]
    fn float_conversion_of_huge_fractions() {
        let big = BigRational::new(BigInt::from(3) << 2000usize, BigInt::from(7) << 2000usize);
        assert!((to_f64(&big) - 3.0 / 7.0).abs() < 1e-15);
        let tiny = BigRational::new(BigInt::one(), BigInt::from(10).pow(200));
        assert!((to_f64(&tiny) / 1e-200 - 1.0).abs() < 1e-12);
    }
}
