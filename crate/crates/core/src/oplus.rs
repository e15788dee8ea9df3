//! Alternating Euler sum expansions of `zeta*(s)` for star-shaped `s`.
//!
//! Two generators produce the same term multiset when every `c_t >= 3`:
//!
//! - [`expand_oplus`] folds the atom pattern
//!   `(-(2a_1+2)) o 1^{o(c_1-3)} o (2a_2+3) o ... o 1^{o(c_r-3)} o (2a_{r+1}+1)`
//!   with every choice of comma or O-plus at each slot;
//! - [`expand_kappa_limit`] negates the leading entry of every rewritten
//!   condensation from [`kappa_terms`].
//!
//! Every term carries coefficient `-2^{depth}`.

use num_traits::Signed;

use crate::compositions::{merge_terms, pow2, SignedComposition, StarSpec, Term};
use crate::error::{Error, Result};
use crate::string_ops::kappa_terms;

/// `alpha (+) beta = sgn(alpha) sgn(beta) (|alpha| + |beta|)`.
pub fn oplus(alpha: i64, beta: i64) -> i64 {
    assert!(
        alpha != 0 && beta != 0,
        "O-plus is defined on nonzero integers"
    );
    let magnitude = alpha.abs() + beta.abs();
    if (alpha < 0) == (beta < 0) {
        magnitude
    } else {
        -magnitude
    }
}

fn check_separators(spec: &StarSpec) -> Result<()> {
    match spec.separators().iter().enumerate().find(|(_, &c)| c < 3) {
        Some((idx, &value)) => Err(Error::SeparatorBelowThree {
            index: idx + 1,
            value,
        }),
        None => Ok(()),
    }
}

/// The atom list whose comma/O-plus foldings index the expansion.
pub fn build_pattern(spec: &StarSpec) -> Result<Vec<i64>> {
    if spec.r() == 0 {
        return Err(Error::NoSeparators);
    }
    check_separators(spec)?;
    let a = spec.two_blocks();
    let r = spec.r();
    let mut atoms = vec![-(2 * a[0] as i64 + 2)];
    for (t, &c) in spec.separators().iter().enumerate() {
        atoms.extend(std::iter::repeat_n(1, (c - 3) as usize));
        let next = 2 * a[t + 1] as i64;
        atoms.push(if t + 1 < r { next + 3 } else { next + 1 });
    }
    Ok(atoms)
}

/// Folds `atoms` using O-plus at every slot whose bit is set in `mask`
/// (bit `i` is the slot between atoms `i` and `i+1`) and commas elsewhere.
pub fn fold_pattern(atoms: &[i64], mask: u64) -> SignedComposition {
    let mut entries = vec![atoms[0]];
    for (slot, &atom) in atoms[1..].iter().enumerate() {
        if mask >> slot & 1 == 1 {
            let last = entries.last_mut().expect("nonempty");
            *last = oplus(*last, atom);
        } else {
            entries.push(atom);
        }
    }
    SignedComposition::new(entries).expect("atoms are nonzero")
}

/// Unmerged comma/O-plus terms, one per choice, in mask order.
pub fn expand_oplus_raw(spec: &StarSpec) -> Result<Vec<Term>> {
    let atoms = build_pattern(spec)?;
    let slots = atoms.len() - 1;
    if slots >= 63 {
        return Err(Error::InvalidArgument(format!(
            "pattern has {} atoms; 2^{slots} foldings is too many to enumerate",
            atoms.len()
        )));
    }
    Ok((0..1u64 << slots)
        .map(|mask| {
            let p = fold_pattern(&atoms, mask);
            Term::new(-pow2(p.depth()), p)
        })
        .collect())
}

/// `zeta*(s) = -sum_p 2^{l(p)} zeta(p)` over all comma/O-plus foldings,
/// merged and in canonical order. Needs `r >= 1` and every `c_t >= 3`.
pub fn expand_oplus(spec: &StarSpec) -> Result<Vec<Term>> {
    Ok(merge_terms(expand_oplus_raw(spec)?))
}

/// The limit form: one term `-2^{e} zeta(-phi, tail...)` per rewritten
/// condensation. Defined for `c_t >= 2`.
pub fn expand_kappa_limit(spec: &StarSpec) -> Vec<Term> {
    merge_terms(kappa_terms(spec).into_iter().map(|t| {
        let mut entries = vec![-(t.phi as i64)];
        entries.extend_from_slice(t.tail.entries());
        Term::new(
            -pow2(t.coeff_exponent),
            SignedComposition::new(entries).expect("nonzero entries"),
        )
    }))
}

/// Both lists are assumed canonically merged.
pub fn equal_as_term_multisets(a: &[Term], b: &[Term]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Checks the shape every emitted term must have: a single negative entry in
/// first position, the given total weight, and coefficient `-2^{depth}`.
pub fn term_shape_ok(term: &Term, weight: u64) -> bool {
    let e = term.composition.entries();
    !e.is_empty()
        && e[0] < 0
        && e[1..].iter().all(|&x| x > 0)
        && term.composition.weight() == weight
        && term.coefficient.is_negative()
        && term.coefficient.abs() == pow2(term.composition.depth())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compositions::expand_spec;
    use num_bigint::BigInt;

    fn spec(a: &[u64], c: &[u64]) -> StarSpec {
        StarSpec::new(a.to_vec(), c.to_vec()).unwrap()
    }

    fn terms(list: &[(i64, &[i64])]) -> Vec<Term> {
        merge_terms(list.iter().map(|(c, p)| {
            Term::new(
                BigInt::from(*c),
                SignedComposition::new(p.to_vec()).unwrap(),
            )
        }))
    }

    #[test]
    fn oplus_values() {
        assert_eq!(oplus(-16, 7), -23);
        assert_eq!(oplus(7, 7), 14);
        assert_eq!(oplus(-1, -1), 2);
        assert_eq!(oplus(3, -2), -5);
    }

    #[test]
    fn patterns() {
        assert_eq!(
            build_pattern(&spec(&[7, 2, 3], &[3, 3])).unwrap(),
            vec![-16, 7, 7]
        );
        assert_eq!(
            build_pattern(&spec(&[3, 2, 5], &[3, 4])).unwrap(),
            vec![-8, 7, 1, 11]
        );
        assert_eq!(build_pattern(&spec(&[0, 0], &[3])).unwrap(), vec![-2, 1]);
    }

    #[test]
    fn pattern_rejects_small_separators() {
        let err = build_pattern(&spec(&[0, 0, 0], &[3, 2])).unwrap_err();
        assert_eq!(err, Error::SeparatorBelowThree { index: 2, value: 2 });
        assert!(err.to_string().contains("c_j >= 3"));
        assert_eq!(
            build_pattern(&StarSpec::twos(4)).unwrap_err(),
            Error::NoSeparators
        );
    }

    #[test]
    fn first_displayed_expansion() {
        let got = expand_oplus(&spec(&[7, 2, 3], &[3, 3])).unwrap();
        let want = terms(&[
            (-8, &[-16, 7, 7]),
            (-4, &[-23, 7]),
            (-4, &[-16, 14]),
            (-2, &[-30]),
        ]);
        assert_eq!(got, want);
        let rendered: Vec<String> = got.iter().map(|t| t.to_string()).collect();
        assert!(rendered.contains(&"-8*z(b16,7,7)".to_string()));
    }

    #[test]
    fn second_displayed_expansion() {
        let got = expand_oplus(&spec(&[3, 2, 5], &[3, 4])).unwrap();
        let want = terms(&[
            (-16, &[-8, 7, 1, 11]),
            (-8, &[-8, 7, 12]),
            (-8, &[-8, 8, 11]),
            (-8, &[-15, 1, 11]),
            (-4, &[-15, 12]),
            (-4, &[-16, 11]),
            (-4, &[-8, 19]),
            (-2, &[-27]),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn smallest_spec_both_forms() {
        let want = terms(&[(-4, &[-2, 1]), (-2, &[-3])]);
        let s = spec(&[0, 0], &[3]);
        assert_eq!(expand_oplus(&s).unwrap(), want);
        assert_eq!(expand_kappa_limit(&s), want);
    }

    #[test]
    fn kappa_limit_with_two_separators() {
        let got = expand_kappa_limit(&spec(&[0, 0, 0], &[2, 2]));
        assert_eq!(got, terms(&[(-2, &[-4])]));
    }

    #[test]
    fn forms_agree_on_worked_specs() {
        for s in [spec(&[7, 2, 3], &[3, 3]), spec(&[3, 2, 5], &[3, 4])] {
            assert!(equal_as_term_multisets(
                &expand_oplus(&s).unwrap(),
                &expand_kappa_limit(&s)
            ));
        }
    }

    #[test]
    fn multiset_comparison() {
        let x = expand_oplus(&spec(&[1, 1], &[4])).unwrap();
        assert!(equal_as_term_multisets(&x, &x));
        let mut y = x.clone();
        y[0].coefficient += 1;
        assert!(!equal_as_term_multisets(&x, &y));
        assert!(!equal_as_term_multisets(&x, &x[1..]));
    }

    #[test]
    fn term_shapes() {
        let s = spec(&[1, 0, 2], &[5, 4]);
        let w = expand_spec(&s).weight();
        let raw = expand_oplus_raw(&s).unwrap();
        assert_eq!(raw.len(), 1 << (build_pattern(&s).unwrap().len() - 1));
        assert_eq!(merge_terms(raw.clone()).len(), raw.len());
        for t in raw.iter().chain(&expand_kappa_limit(&s)) {
            assert!(term_shape_ok(t, w), "{t}");
        }
    }
}
