//! Serialization of complex values as `[re, im]` pairs.

use serde::ser::{SerializeSeq, Serializer};

use crate::linalg::{CMatrix3, C64};

pub fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn complex<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(pair(z))
}

pub fn complex_array<S: Serializer>(v: &[C64; 3], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(pair))
}

pub fn complex_vec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(pair))
}

pub fn complex_option_array<S: Serializer>(
    v: &Option<[C64; 3]>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(a) => complex_array(a, s),
        None => s.serialize_none(),
    }
}

/// A 3×3 complex matrix as a list of its columns.
pub fn complex_columns<S: Serializer>(m: &CMatrix3, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(3))?;
    for k in 0..3 {
        let col: Vec<[f64; 2]> = m.column(k).iter().map(pair).collect();
        seq.serialize_element(&col)?;
    }
    seq.end()
}
