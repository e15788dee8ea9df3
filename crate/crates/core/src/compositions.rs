//! Signed compositions, star-shaped specs and Euler-sum terms.
//!
//! Text grammars:
//!
//! - compositions: comma separated nonzero integers; a negative entry is
//!   written `-16` or `b16` ("bar"), and is always printed as `b16`.
//! - star specs: comma separated tokens where `2^k` (or a bare `2`) is a run
//!   of 2s, any other integer `c >= 3` is a separator, and `(c)` is an
//!   explicit separator for any `c >= 2`. Adjacent 2-runs add up; a missing
//!   run between separators has length 0.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, ParseError, Result};

/// A finite sequence of nonzero integers, the argument of `H_n`, `H*_n`,
/// `zeta` and `zeta*`. Negative entries stand for barred (alternating)
/// arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SignedComposition(Vec<i64>);

impl SignedComposition {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if let Some(pos) = entries.iter().position(|&e| e == 0) {
            return Err(Error::InvalidArgument(format!(
                "composition entry {} is zero",
                pos + 1
            )));
        }
        Ok(SignedComposition(entries))
    }

    pub fn empty() -> Self {
        SignedComposition(Vec::new())
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<i64> {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of entries, `l(s)`.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Sum of absolute values, `|s|`.
    pub fn weight(&self) -> u64 {
        self.0.iter().map(|e| e.unsigned_abs()).sum()
    }

    /// Composition with the first entry dropped.
    pub fn truncated(&self) -> SignedComposition {
        SignedComposition(self.0.iter().skip(1).copied().collect())
    }

    /// `s` followed by `rest`.
    pub fn concat(&self, rest: &SignedComposition) -> SignedComposition {
        let mut v = self.0.clone();
        v.extend_from_slice(&rest.0);
        SignedComposition(v)
    }
}

impl fmt::Display for SignedComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if *e < 0 {
                write!(f, "b{}", e.unsigned_abs())?;
            } else {
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SignedComposition {
    type Err = ParseError;

    fn from_str(text: &str) -> std::result::Result<Self, ParseError> {
        parse_signed_composition(text)
    }
}

fn split_tokens(text: &str) -> std::result::Result<Vec<&str>, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .enumerate()
        .map(|(i, tok)| {
            let tok = tok.trim();
            if tok.is_empty() {
                Err(ParseError::EmptyToken { position: i + 1 })
            } else {
                Ok(tok)
            }
        })
        .collect()
}

fn parse_unsigned(token: &str, digits: &str) -> std::result::Result<u64, ParseError> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::Malformed {
            token: token.to_string(),
        });
    }
    digits.parse::<u64>().map_err(|_| ParseError::Malformed {
        token: token.to_string(),
    })
}

pub fn parse_signed_composition(text: &str) -> std::result::Result<SignedComposition, ParseError> {
    let mut entries = Vec::new();
    for tok in split_tokens(text)? {
        let (negative, digits) = if let Some(rest) = tok.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = tok.strip_prefix('b') {
            (true, rest)
        } else {
            (false, tok)
        };
        let magnitude = parse_unsigned(tok, digits)?;
        if magnitude == 0 {
            return Err(ParseError::ZeroEntry {
                token: tok.to_string(),
            });
        }
        let magnitude = i64::try_from(magnitude).map_err(|_| ParseError::Malformed {
            token: tok.to_string(),
        })?;
        entries.push(if negative { -magnitude } else { magnitude });
    }
    Ok(SignedComposition(entries))
}

/// The shape `({2}^{a_1}, c_1, ..., {2}^{a_r}, c_r, {2}^{a_{r+1}})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StarSpec {
    two_blocks: Vec<u64>,
    separators: Vec<u64>,
}

impl StarSpec {
    pub fn new(two_blocks: Vec<u64>, separators: Vec<u64>) -> Result<Self> {
        if two_blocks.len() != separators.len() + 1 {
            return Err(Error::InvalidSpec(format!(
                "{} 2-blocks for {} separators (need exactly one more block)",
                two_blocks.len(),
                separators.len()
            )));
        }
        if let Some((i, c)) = separators.iter().enumerate().find(|(_, &c)| c < 2) {
            return Err(Error::InvalidSpec(format!(
                "separator c_{} = {} < 2",
                i + 1,
                c
            )));
        }
        Ok(StarSpec {
            two_blocks,
            separators,
        })
    }

    /// `{2}^a` with no separators.
    pub fn twos(a: u64) -> Self {
        StarSpec {
            two_blocks: vec![a],
            separators: Vec::new(),
        }
    }

    pub fn two_blocks(&self) -> &[u64] {
        &self.two_blocks
    }

    pub fn separators(&self) -> &[u64] {
        &self.separators
    }

    /// Number of separators `r`.
    pub fn r(&self) -> usize {
        self.separators.len()
    }

    /// True for the empty composition (`r = 0`, `a_1 = 0`).
    pub fn is_degenerate(&self) -> bool {
        self.separators.is_empty() && self.two_blocks[0] == 0
    }

    /// `(2a_1, c_1, ..., 2a_r, c_r, 2a_{r+1})`.
    pub fn condensation(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(2 * self.separators.len() + 1);
        for (a, c) in self.two_blocks.iter().zip(&self.separators) {
            out.push(2 * a);
            out.push(*c);
        }
        out.push(2 * self.two_blocks[self.separators.len()]);
        out
    }

    pub fn weight(&self) -> u64 {
        2 * self.two_blocks.iter().sum::<u64>() + self.separators.iter().sum::<u64>()
    }
}

/// Unrolls a spec into its literal entry list.
pub fn expand_spec(spec: &StarSpec) -> SignedComposition {
    let mut entries = Vec::new();
    for (t, a) in spec.two_blocks.iter().enumerate() {
        entries.extend(std::iter::repeat_n(2i64, *a as usize));
        if let Some(c) = spec.separators.get(t) {
            entries.push(*c as i64);
        }
    }
    SignedComposition(entries)
}

impl fmt::Display for StarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_degenerate() {
            return f.write_str("2^0");
        }
        let mut parts = Vec::new();
        for (t, a) in self.two_blocks.iter().enumerate() {
            if *a > 0 {
                parts.push(format!("2^{a}"));
            }
            if let Some(c) = self.separators.get(t) {
                if *c == 2 {
                    parts.push("(2)".to_string());
                } else {
                    parts.push(c.to_string());
                }
            }
        }
        f.write_str(&parts.join(","))
    }
}

impl FromStr for StarSpec {
    type Err = ParseError;

    fn from_str(text: &str) -> std::result::Result<Self, ParseError> {
        parse_star_spec(text)
    }
}

pub fn parse_star_spec(text: &str) -> std::result::Result<StarSpec, ParseError> {
    let mut two_blocks = vec![0u64];
    let mut separators = Vec::new();
    for tok in split_tokens(text)? {
        let malformed = || ParseError::Malformed {
            token: tok.to_string(),
        };
        if let Some((base, exp)) = tok.split_once('^') {
            if parse_unsigned(tok, base.trim())? != 2 {
                return Err(ParseError::CaretBase {
                    token: tok.to_string(),
                });
            }
            let run = parse_unsigned(tok, exp.trim())?;
            let last = two_blocks.last_mut().expect("at least one block");
            *last = last.checked_add(run).ok_or_else(malformed)?;
        } else if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let c = parse_unsigned(tok, inner.trim())?;
            if c < 2 {
                return Err(ParseError::SeparatorTooSmall {
                    token: tok.to_string(),
                    value: c,
                });
            }
            separators.push(c);
            two_blocks.push(0);
        } else {
            let value = parse_unsigned(tok, tok)?;
            match value {
                2 => *two_blocks.last_mut().expect("at least one block") += 1,
                v if v < 2 => {
                    return Err(ParseError::SeparatorTooSmall {
                        token: tok.to_string(),
                        value: v,
                    })
                }
                v => {
                    separators.push(v);
                    two_blocks.push(0);
                }
            }
        }
    }
    Ok(StarSpec {
        two_blocks,
        separators,
    })
}

/// One summand `coefficient * zeta(composition)` of an Euler-sum expansion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub coefficient: BigInt,
    pub composition: SignedComposition,
}

impl Term {
    pub fn new(coefficient: BigInt, composition: SignedComposition) -> Self {
        Term {
            coefficient,
            composition,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*z({})", self.coefficient, self.composition)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Term", 2)?;
        st.serialize_field("coefficient", &self.coefficient.to_string())?;
        st.serialize_field("composition", &self.composition)?;
        st.end()
    }
}

/// Sums coefficients of equal compositions, drops zeros, and sorts by
/// composition.
pub fn merge_terms<I: IntoIterator<Item = Term>>(terms: I) -> Vec<Term> {
    let mut acc: BTreeMap<SignedComposition, BigInt> = BTreeMap::new();
    for t in terms {
        *acc.entry(t.composition).or_insert_with(BigInt::zero) += t.coefficient;
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(composition, coefficient)| Term {
            coefficient,
            composition,
        })
        .collect()
}

/// `2^e` as a big integer.
pub(crate) fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}
