//! Sparse multi-index rational arrays and their JSON form.
//!
//! JSON layout: `{"shape": [n0, n1, ...], "entries": [[i0, i1, ..., "p/q"], ...]}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{LinalgError, Rational, SparseMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalTensor {
    shape: Vec<usize>,
    entries: BTreeMap<Vec<usize>, Rational>,
}

impl RationalTensor {
    pub fn zeros(shape: Vec<usize>) -> Self {
        RationalTensor { shape, entries: BTreeMap::new() }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.entries.iter()
    }

    pub fn get(&self, idx: &[usize]) -> Rational {
        self.entries.get(idx).cloned().unwrap_or_default()
    }

    /// Sets an entry; zero removes it.
    pub fn set(&mut self, idx: Vec<usize>, value: Rational) -> Result<(), LinalgError> {
        self.check_index(&idx)?;
        if value.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, value);
        }
        Ok(())
    }

    /// Adds to an entry.
    pub fn add_at(&mut self, idx: Vec<usize>, value: &Rational) -> Result<(), LinalgError> {
        let cur = self.get(&idx);
        self.set(idx, cur + value)
    }

    fn check_index(&self, idx: &[usize]) -> Result<(), LinalgError> {
        if idx.len() != self.shape.len() || idx.iter().zip(&self.shape).any(|(i, n)| i >= n) {
            return Err(LinalgError::Shape(format!("index {idx:?} outside shape {:?}", self.shape)));
        }
        Ok(())
    }

    pub fn from_matrix(m: &SparseMatrix) -> Self {
        let entries = m.triplets().map(|(i, j, x)| (vec![i, j], x.clone())).collect();
        RationalTensor { shape: vec![m.nrows(), m.ncols()], entries }
    }

    pub fn to_matrix(&self) -> Result<SparseMatrix, LinalgError> {
        if self.shape.len() != 2 {
            return Err(LinalgError::Shape(format!("expected rank-2 tensor, got {:?}", self.shape)));
        }
        Ok(SparseMatrix::from_triplets(
            self.shape[0],
            self.shape[1],
            self.entries.iter().map(|(k, x)| (k[0], k[1], x.clone())),
        ))
    }

    /// Stacks equally shaped matrices along a new leading index.
    pub fn from_matrices(ms: &[SparseMatrix], rows: usize, cols: usize) -> Self {
        let mut entries = BTreeMap::new();
        for (k, m) in ms.iter().enumerate() {
            for (i, j, x) in m.triplets() {
                entries.insert(vec![k, i, j], x.clone());
            }
        }
        RationalTensor { shape: vec![ms.len(), rows, cols], entries }
    }

    /// Inverse of [`RationalTensor::from_matrices`].
    pub fn to_matrices(&self) -> Result<Vec<SparseMatrix>, LinalgError> {
        if self.shape.len() != 3 {
            return Err(LinalgError::Shape(format!("expected rank-3 tensor, got {:?}", self.shape)));
        }
        let mut trip: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); self.shape[0]];
        for (k, x) in &self.entries {
            trip[k[0]].push((k[1], k[2], x.clone()));
        }
        Ok(trip
            .into_iter()
            .map(|t| SparseMatrix::from_triplets(self.shape[1], self.shape[2], t))
            .collect())
    }
}

struct Entry<'a>(&'a [usize], &'a Rational);

impl Serialize for Entry<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len() + 1))?;
        for i in self.0 {
            seq.serialize_element(i)?;
        }
        seq.serialize_element(&self.1.to_string())?;
        seq.end()
    }
}

impl Serialize for RationalTensor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            shape: &'a [usize],
            entries: Vec<Entry<'a>>,
        }
        Wire {
            shape: &self.shape,
            entries: self.entries.iter().map(|(k, v)| Entry(k, v)).collect(),
        }
        .serialize(s)
    }
}

struct OwnedEntry(Vec<usize>, Rational);

impl<'de> Deserialize<'de> for OwnedEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OwnedEntry;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of indices followed by a rational string")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<OwnedEntry, A::Error> {
                let mut idx = Vec::new();
                loop {
                    let item: Option<serde_json::Value> = seq.next_element()?;
                    match item {
                        Some(serde_json::Value::Number(n)) => idx.push(
                            n.as_u64().ok_or_else(|| de::Error::custom("negative index"))? as usize,
                        ),
                        Some(serde_json::Value::String(s)) => {
                            let r = s.parse::<Rational>().map_err(de::Error::custom)?;
                            if seq.next_element::<serde_json::Value>()?.is_some() {
                                return Err(de::Error::custom("value must be last"));
                            }
                            return Ok(OwnedEntry(idx, r));
                        }
                        _ => return Err(de::Error::custom("malformed tensor entry")),
                    }
                }
            }
        }
        d.deserialize_seq(V)
    }
}

impl<'de> Deserialize<'de> for RationalTensor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            shape: Vec<usize>,
            entries: Vec<OwnedEntry>,
        }
        let w = Wire::deserialize(d)?;
        let mut t = RationalTensor::zeros(w.shape);
        for OwnedEntry(idx, x) in w.entries {
            t.add_at(idx, &x).map_err(de::Error::custom)?;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::q;

    #[test]
    fn json_round_trip() {
        let mut t = RationalTensor::zeros(vec![2, 3, 4]);
        t.set(vec![1, 2, 3], q(-5, 7)).unwrap();
        t.set(vec![0, 0, 0], q(1, 1)).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"shape":[2,3,4],"entries":[[0,0,0,"1"],[1,2,3,"-5/7"]]}"#);
        let back: RationalTensor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = r#"{"shape":[2],"entries":[[5,"1"]]}"#;
        assert!(serde_json::from_str::<RationalTensor>(bad).is_err());
    }

    #[test]
    fn no_explicit_zeros() {
        let mut t = RationalTensor::zeros(vec![2]);
        t.set(vec![0], q(1, 1)).unwrap();
        t.add_at(vec![0], &q(-1, 1)).unwrap();
        assert_eq!(t.nnz(), 0);
    }
}
