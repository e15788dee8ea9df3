//! Merge/substitution rewriting of the condensation of a star spec, and
//! exact checks of the resulting binomial-sum identity for `H*_n`.
//!
//! For a spec with condensation `(2a_1, c_1, ..., c_r, 2a_{r+1})` every
//! subset `I` of separators is merged (`,c_t,` becomes `+c_t+`) while every
//! separator outside `I` is substituted (`,c_t,` becomes
//! `+j_t, x_t, i_t+` with `i_t >= 1`, `j_t >= 2`, `i_t + j_t + |x_t| = c_t`).
//! Each rewritten composition contributes
//! `2^{1 + |complement| + sum l(x_t)} * sum_{k<=n} H_{k-1}(tail) A_{n,k} / k^phi`
//! where `phi` is its first entry and `tail` the rest.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::compositions::{expand_spec, pow2, SignedComposition, StarSpec};
use crate::error::{Error, Result};
use crate::mhs::{binom_a_row, ExactRational, MhsCache, SumKind};
use crate::serde_util::rational_string;

/// The rewrite chosen for one substituted separator `c_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Substitution {
    /// 1-based separator index `t`.
    pub separator: usize,
    pub i: u64,
    pub j: u64,
    pub x: Vec<u64>,
}

/// One summand of the binomial-sum expansion of `H*_n(s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaTerm {
    /// Exponent `e` of the coefficient `2^e`, i.e. `1 + |complement| + sum l(x_t)`.
    pub coeff_exponent: usize,
    /// Leading entry of the rewritten condensation.
    pub phi: u64,
    /// Remaining entries (all positive).
    pub tail: SignedComposition,
    /// Merged separators, 1-based, ascending.
    pub subset: Vec<usize>,
    /// Substitutions for the separators not in `subset`, ascending `t`.
    pub choices: Vec<Substitution>,
}

/// All compositions of `m` into positive parts, lexicographic.
pub fn compositions_of(m: u64) -> Vec<Vec<u64>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=m {
        for mut rest in compositions_of(m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Admissible `(i, j, x)` for one separator, ordered by `i`, then `j`, then `x`.
pub fn substitution_choices(separator: usize, c: u64) -> Vec<Substitution> {
    let mut out = Vec::new();
    for i in 1..c {
        for j in 2..=c.saturating_sub(i) {
            for x in compositions_of(c - i - j) {
                out.push(Substitution { separator, i, j, x });
            }
        }
    }
    out
}

fn rewrite(spec: &StarSpec, subset_mask: u64, choices: &[Substitution]) -> KappaTerm {
    let blocks = spec.two_blocks();
    let mut entries: Vec<u64> = Vec::new();
    let mut current = 2 * blocks[0];
    let mut pending = choices.iter();
    let mut subset = Vec::new();
    for (idx, &c) in spec.separators().iter().enumerate() {
        let next_block = 2 * blocks[idx + 1];
        if subset_mask >> idx & 1 == 1 {
            subset.push(idx + 1);
            current += c + next_block;
        } else {
            let sub = pending
                .next()
                .expect("one choice per substituted separator");
            debug_assert_eq!(sub.separator, idx + 1);
            entries.push(current + sub.j);
            entries.extend(&sub.x);
            current = sub.i + next_block;
        }
    }
    entries.push(current);
    let phi = entries[0];
    let tail = SignedComposition::new(entries[1..].iter().map(|&e| e as i64).collect())
        .expect("tail entries are positive");
    let x_len: usize = choices.iter().map(|s| s.x.len()).sum();
    KappaTerm {
        coeff_exponent: 1 + choices.len() + x_len,
        phi,
        tail,
        subset,
        choices: choices.to_vec(),
    }
}

/// Enumerates every `(I, substitution choices)` pair in canonical order:
/// subsets by ascending bitmask (bit `t-1` set means `t` is merged), then
/// the choices with the last substituted separator varying fastest.
///
/// The empty spec yields no terms; see [`rhs_thm23`].
pub fn kappa_terms(spec: &StarSpec) -> Vec<KappaTerm> {
    if spec.is_degenerate() {
        return Vec::new();
    }
    let r = spec.r();
    let per_separator: Vec<Vec<Substitution>> = spec
        .separators()
        .iter()
        .enumerate()
        .map(|(idx, &c)| substitution_choices(idx + 1, c))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << r) {
        let complement: Vec<usize> = (0..r).filter(|idx| mask >> idx & 1 == 0).collect();
        if complement.iter().any(|&idx| per_separator[idx].is_empty()) {
            continue;
        }
        // Odometer over the choice lists of the substituted separators.
        let mut odometer = vec![0usize; complement.len()];
        'choices: loop {
            let picked: Vec<Substitution> = complement
                .iter()
                .zip(&odometer)
                .map(|(&idx, &o)| per_separator[idx][o].clone())
                .collect();
            out.push(rewrite(spec, mask, &picked));
            for pos in (0..complement.len()).rev() {
                odometer[pos] += 1;
                if odometer[pos] < per_separator[complement[pos]].len() {
                    continue 'choices;
                }
                odometer[pos] = 0;
            }
            break;
        }
    }
    out
}

/// `sum_{k=1}^n H_{k-1}(tail) * A_{n,k} / k^exponent`, with `a_row` from
/// [`binom_a_row`].
pub fn binomial_sum(
    n: u64,
    exponent: u64,
    tail: &SignedComposition,
    a_row: &[ExactRational],
    cache: &mut MhsCache,
) -> ExactRational {
    let h_row = cache.prefix_row(SumKind::Strict, n, tail);
    let mut total = BigRational::zero();
    for k in 1..=n as usize {
        let h = &h_row[k - 1];
        if h.is_zero() {
            continue;
        }
        let den = BigInt::from(k).pow(exponent as u32);
        total += h * &a_row[k] / BigRational::from_integer(den);
    }
    total
}

/// Right-hand side of the binomial-sum identity for `H*_n(s)`.
///
/// For the empty spec the identity degenerates; the value `1 = H*_n(())` is
/// returned by convention.
pub fn rhs_thm23(n: u64, spec: &StarSpec) -> ExactRational {
    rhs_thm23_with(n, spec, &mut MhsCache::new())
}

pub fn rhs_thm23_with(n: u64, spec: &StarSpec, cache: &mut MhsCache) -> ExactRational {
    assert!(n >= 1, "n must be positive");
    if spec.is_degenerate() {
        return BigRational::one();
    }
    let a_row = binom_a_row(n);
    let mut total = BigRational::zero();
    for term in kappa_terms(spec) {
        let inner = binomial_sum(n, term.phi, &term.tail, &a_row, cache);
        total += BigRational::from_integer(pow2(term.coeff_exponent)) * inner;
    }
    total
}

/// Right-hand side for `({2}^a, c, {2}^b)` written out directly in the
/// two-block form (independent of the subset enumeration):
/// `2 sum A/k^{2a+2b+c} + 4 sum_{i+j+|x|=c} 2^{l(x)} sum H_{k-1}(x, i+2b) A / k^{2a+j}`.
pub fn rhs_two_block(n: u64, a: u64, b: u64, c: u64) -> ExactRational {
    assert!(n >= 1 && c >= 2);
    let mut cache = MhsCache::new();
    let a_row = binom_a_row(n);
    let two = |e: usize| BigRational::from_integer(pow2(e));
    let mut total = two(1)
        * binomial_sum(
            n,
            2 * a + 2 * b + c,
            &SignedComposition::empty(),
            &a_row,
            &mut cache,
        );
    for i in 1..c {
        for j in 2..=(c - i) {
            for x in compositions_of(c - i - j) {
                let mut entries: Vec<i64> = x.iter().map(|&e| e as i64).collect();
                entries.push((i + 2 * b) as i64);
                let tail = SignedComposition::new(entries).expect("positive");
                total += two(2 + x.len()) * binomial_sum(n, 2 * a + j, &tail, &a_row, &mut cache);
            }
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm23Report {
    pub spec: String,
    pub n: u64,
    #[serde(serialize_with = "rational_string")]
    pub lhs: ExactRational,
    #[serde(serialize_with = "rational_string")]
    pub rhs: ExactRational,
    pub equal: bool,
    pub term_count: usize,
    /// Set for the empty spec, where the right side is `1` by convention.
    pub degenerate: bool,
}

/// Compares `H*_n(expand_spec(spec))` with the binomial-sum side exactly.
pub fn verify_thm23(n: u64, spec: &StarSpec) -> Thm23Report {
    verify_thm23_with(n, spec, &mut MhsCache::new())
}

pub fn verify_thm23_with(n: u64, spec: &StarSpec, cache: &mut MhsCache) -> Thm23Report {
    let lhs = cache.value(SumKind::Star, n, &expand_spec(spec));
    let rhs = rhs_thm23_with(n, spec, cache);
    Thm23Report {
        spec: spec.to_string(),
        n,
        equal: lhs == rhs,
        lhs,
        rhs,
        term_count: kappa_terms(spec).len(),
        degenerate: spec.is_degenerate(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma21Report {
    pub n: u64,
    pub a: u64,
    pub c: u64,
    pub v: SignedComposition,
    #[serde(serialize_with = "rational_string")]
    pub lhs: ExactRational,
    #[serde(serialize_with = "rational_string")]
    pub rhs: ExactRational,
    pub equal: bool,
    /// Number of nonempty `x` summed on the right.
    pub term_count: usize,
}

/// Checks
///
/// ```text
/// n^{-c} sum H_{k-1}(v) A/k^a = sum H_{k-1}(v) A/k^{a+c}
///   + sum_{j + |x| = a + c, j >= 0, x_last > a} 2^{l(x)} sum H_{k-1}(x, v) A / k^j
/// ```
///
/// where `x` ranges over nonempty compositions (the `x = ()` summand is the
/// first term on the right).
pub fn lemma21_check(n: u64, a: u64, c: u64, v: &SignedComposition) -> Result<Lemma21Report> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if c == 0 {
        return Err(Error::InvalidArgument("c must be positive".into()));
    }
    if v.entries().iter().any(|&e| e < 0) {
        return Err(Error::InvalidArgument(
            "v must have positive entries".into(),
        ));
    }
    let mut cache = MhsCache::new();
    let a_row = binom_a_row(n);
    let n_pow = BigRational::from_integer(BigInt::from(n).pow(c as u32));
    let lhs = binomial_sum(n, a, v, &a_row, &mut cache) / n_pow;
    let mut rhs = binomial_sum(n, a + c, v, &a_row, &mut cache);
    let mut term_count = 0;
    for size in 1..=(a + c) {
        let j = a + c - size;
        for x in compositions_of(size) {
            if *x.last().expect("nonempty") <= a {
                continue;
            }
            term_count += 1;
            let xs =
                SignedComposition::new(x.iter().map(|&e| e as i64).collect()).expect("positive");
            let weight = BigRational::from_integer(pow2(x.len()));
            rhs += weight * binomial_sum(n, j, &xs.concat(v), &a_row, &mut cache);
        }
    }
    Ok(Lemma21Report {
        n,
        a,
        c,
        v: v.clone(),
        equal: lhs == rhs,
        lhs,
        rhs,
        term_count,
    })
}
