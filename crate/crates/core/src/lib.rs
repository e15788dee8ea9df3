//! Exact multiple harmonic sums and the binomial-sum / alternating Euler sum
//! identity families for multiple zeta star values of the shape
//! `({2}^{a_1}, c_1, ..., {2}^{a_r}, c_r, {2}^{a_{r+1}})`.

pub mod compositions;
pub mod error;
pub mod mhs;
pub mod numeric;
pub mod oplus;
mod serde_util;
pub mod string_ops;

pub use compositions::{
    expand_spec, merge_terms, parse_signed_composition, parse_star_spec, SignedComposition,
    StarSpec, Term,
};
pub use error::{Error, ParseError, Result};
pub use mhs::{
    binom_a, binom_a_row, mhs, mhs_bruteforce, mhs_star, mhs_star_bruteforce, ExactRational,
    MhsCache, SumKind,
};
pub use numeric::{
    lemma42_decay, verify_thm12_numeric, zeta_numeric, zeta_star_numeric, DecayRow, NumericResult,
    Thm12NumericReport,
};
pub use oplus::{build_pattern, equal_as_term_multisets, expand_kappa_limit, expand_oplus, oplus};
pub use string_ops::{
    kappa_terms, lemma21_check, rhs_thm23, verify_thm23, KappaTerm, Lemma21Report, Thm23Report,
};
