use num_rational::BigRational;
use serde::Serializer;

/// Exact rationals go out as `"p/q"` (or `"p"`) strings.
pub fn rational_string<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
