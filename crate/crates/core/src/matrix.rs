//! Dense-semantics matrices over Gaussian rationals with a sparse carrier.
//!
//! Entries are stored as a sorted list of `(flattened index, value)` pairs
//! with no explicit zeros; the flattening is row-major, which is also the
//! coordinate convention used by all span computations.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, Rational};

pub type SparseVec = Vec<(u32, ExactScalar)>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: u32,
    cols: u32,
    entries: SparseVec,
}

impl ExactMatrix {
    pub fn zero(rows: u32, cols: u32) -> Self {
        ExactMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(d: u32) -> Self {
        let entries = (0..d).map(|i| (i * d + i, ExactScalar::ONE)).collect();
        ExactMatrix { rows: d, cols: d, entries }
    }

    /// Builds from a dense row-major entry list.
    pub fn from_dense(rows: u32, cols: u32, dense: Vec<ExactScalar>) -> Result<Self> {
        if dense.len() != (rows as usize) * (cols as usize) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                dense.len()
            )));
        }
        let entries = dense
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u32, v))
            .collect();
        Ok(ExactMatrix { rows, cols, entries })
    }

    /// Builds from integer entries, row-major.
    pub fn from_ints(rows: u32, cols: u32, dense: &[i64]) -> Self {
        Self::from_dense(rows, cols, dense.iter().map(|n| ExactScalar::from_int(*n)).collect())
            .expect("length checked by caller")
    }

    pub fn from_sparse(rows: u32, cols: u32, mut entries: SparseVec) -> Self {
        entries.retain(|(_, v)| !v.is_zero());
        entries.sort_by_key(|(i, _)| *i);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0), "duplicate indices");
        debug_assert!(entries.iter().all(|(i, _)| *i < rows * cols));
        ExactMatrix { rows, cols, entries }
    }

    pub fn diagonal(values: &[ExactScalar]) -> Self {
        let d = values.len() as u32;
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u32 * d + i as u32, v.clone()))
            .collect();
        ExactMatrix { rows: d, cols: d, entries }
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &SparseVec {
        &self.entries
    }

    pub fn into_entries(self) -> SparseVec {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: u32, c: u32) -> ExactScalar {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.cols + c;
        match self.entries.binary_search_by_key(&idx, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => ExactScalar::ZERO,
        }
    }

    fn same_shape(&self, other: &ExactMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_shape(other)?;
        let mut out: SparseVec = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (ia, va) = &self.entries[i];
            let (ib, vb) = &other.entries[j];
            match ia.cmp(ib) {
                std::cmp::Ordering::Less => {
                    out.push((*ia, va.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*ib, vb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = va.add(vb);
                    if !s.is_zero() {
                        out.push((*ia, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.entries[i..]);
        out.extend(other.entries[j..].iter().cloned());
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, entries: out })
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.add(&other.scale(&ExactScalar::from_int(-1)))
    }

    pub fn scale(&self, s: &ExactScalar) -> ExactMatrix {
        if s.is_zero() {
            return ExactMatrix::zero(self.rows, self.cols);
        }
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(i, v)| (*i, v.mul(s))).collect(),
        }
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} · {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        // Sparse row-times-row accumulation.
        let mut acc: BTreeMap<u32, ExactScalar> = BTreeMap::new();
        for (ia, va) in &self.entries {
            let (r, k) = (ia / self.cols, ia % self.cols);
            // other's row k occupies indices [k*cols, (k+1)*cols)
            let start = other
                .entries
                .partition_point(|(i, _)| *i < k * other.cols);
            for (ib, vb) in &other.entries[start..] {
                if ib / other.cols != k {
                    break;
                }
                let c = ib % other.cols;
                let idx = r * other.cols + c;
                let term = va.mul(vb);
                match acc.get_mut(&idx) {
                    Some(cur) => *cur = cur.add(&term),
                    None => {
                        acc.insert(idx, term);
                    }
                }
            }
        }
        let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(ExactMatrix { rows: self.rows, cols: other.cols, entries })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ExactMatrix {
        let mut entries: SparseVec = self
            .entries
            .iter()
            .map(|(i, v)| {
                let (r, c) = (i / self.cols, i % self.cols);
                (c * self.rows + r, v.conj())
            })
            .collect();
        entries.sort_by_key(|(i, _)| *i);
        ExactMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn kron(&self, other: &ExactMatrix) -> ExactMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries: SparseVec = Vec::with_capacity(self.entries.len() * other.entries.len());
        for (ia, va) in &self.entries {
            let (ra, ca) = (ia / self.cols, ia % self.cols);
            for (ib, vb) in &other.entries {
                let (rb, cb) = (ib / other.cols, ib % other.cols);
                let r = ra * other.rows + rb;
                let c = ca * other.cols + cb;
                entries.push((r * cols + c, va.mul(vb)));
            }
        }
        entries.sort_by_key(|(i, _)| *i);
        ExactMatrix { rows, cols, entries }
    }

    pub fn trace(&self) -> Result<ExactScalar> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("trace of non-square matrix".into()));
        }
        let mut t = ExactScalar::ZERO;
        for (i, v) in &self.entries {
            if i / self.cols == i % self.cols {
                t = t.add(v);
            }
        }
        Ok(t)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.is_square() && self.adjoint() == *self
    }

    pub fn is_normal(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let adj = self.adjoint();
        self.mul(&adj).unwrap() == adj.mul(self).unwrap()
    }

    pub fn commutator(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn commutes_with(&self, other: &ExactMatrix) -> Result<bool> {
        Ok(self.commutator(other)?.is_zero())
    }

    pub fn to_dense(&self) -> Vec<ExactScalar> {
        let mut dense = vec![ExactScalar::ZERO; (self.rows * self.cols) as usize];
        for (i, v) in &self.entries {
            dense[*i as usize] = v.clone();
        }
        dense
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

// Wire format: {"rows":r,"cols":c,"entries":[["reN/reD","imN/imD"],...]}
// dense row-major, integers as decimal strings; round-trips exactly.
impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("ExactMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        let dense: Vec<(String, String)> =
            self.to_dense().iter().map(|v| v.to_frac_pair()).collect();
        st.serialize_field("entries", &dense)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: u32,
            cols: u32,
            entries: Vec<(String, String)>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.entries.len() != (raw.rows as usize) * (raw.cols as usize) {
            return Err(D::Error::custom(format!(
                "matrix entries length {} does not match {}x{}",
                raw.entries.len(),
                raw.rows,
                raw.cols
            )));
        }
        let dense = raw
            .entries
            .iter()
            .map(|(re, im)| ExactScalar::parse_frac_pair(re, im))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| D::Error::custom(e.to_string()))?;
        ExactMatrix::from_dense(raw.rows, raw.cols, dense)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// 2x2 Pauli X.
pub fn pauli_x() -> ExactMatrix {
    ExactMatrix::from_ints(2, 2, &[0, 1, 1, 0])
}

/// 2x2 Pauli Y.
pub fn pauli_y() -> ExactMatrix {
    ExactMatrix::from_sparse(
        2,
        2,
        vec![(1, ExactScalar::i().neg()), (2, ExactScalar::i())],
    )
}

/// 2x2 Pauli Z.
pub fn pauli_z() -> ExactMatrix {
    ExactMatrix::from_ints(2, 2, &[1, 0, 0, -1])
}

/// Embeds a single-site operator at `site` on an `n`-site chain of qubits
/// by padding with identities on the other tensor legs.
pub fn site_operator(op: &ExactMatrix, site: u32, n: u32) -> ExactMatrix {
    assert!(site < n);
    let mut m = ExactMatrix::identity(1);
    for s in 0..n {
        let leg = if s == site { op.clone() } else { ExactMatrix::identity(2) };
        m = m.kron(&leg);
    }
    m
}

/// Kronecker product of per-site 2x2 operators.
pub fn tensor_chain(ops: &[ExactMatrix]) -> ExactMatrix {
    let mut m = ExactMatrix::identity(1);
    for op in ops {
        m = m.kron(op);
    }
    m
}

/// Scales a matrix by the rational 1/k.
pub fn scale_by_inverse_int(m: &ExactMatrix, k: i64) -> ExactMatrix {
    m.scale(&ExactScalar::from_rational(Rational::new(1, k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_relations() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        let id = ExactMatrix::identity(2);
        assert_eq!(x.mul(&x).unwrap(), id);
        assert_eq!(y.mul(&y).unwrap(), id);
        assert_eq!(x.mul(&y).unwrap(), z.scale(&ExactScalar::i()));
        assert!(!x.commutes_with(&z).unwrap());
        assert!(x.is_self_adjoint());
        assert!(y.is_self_adjoint());
    }

    #[test]
    fn adjoint_involutive_and_kron_dims() {
        let y = pauli_y();
        assert_eq!(y.adjoint().adjoint(), y);
        let k = pauli_x().kron(&pauli_z());
        assert_eq!((k.rows(), k.cols()), (4, 4));
        assert_eq!(k.get(0, 2), ExactScalar::ONE);
        assert_eq!(k.get(1, 3), ExactScalar::from_int(-1));
        let a = site_operator(&pauli_z(), 0, 2);
        let b = site_operator(&pauli_z(), 1, 2);
        assert!(a.commutes_with(&b).unwrap());
    }

    #[test]
    fn mul_matches_dense_reference() {
        // 3x3 with fractions; compare against a naive dense product.
        let a = ExactMatrix::from_dense(
            3,
            3,
            (0..9)
                .map(|i| ExactScalar::new(Rational::new(i - 4, 3), Rational::new(i, 7)))
                .collect(),
        )
        .unwrap();
        let b = a.adjoint();
        let fast = a.mul(&b).unwrap();
        let (ad, bd) = (a.to_dense(), b.to_dense());
        for r in 0..3u32 {
            for c in 0..3u32 {
                let mut s = ExactScalar::ZERO;
                for k in 0..3u32 {
                    s = s.add(&ad[(r * 3 + k) as usize].mul(&bd[(k * 3 + c) as usize]));
                }
                assert_eq!(fast.get(r, c), s);
            }
        }
        assert!(fast.is_self_adjoint());
    }

    #[test]
    fn json_roundtrip_exact() {
        let m = pauli_y().kron(&ExactMatrix::from_dense(
            1,
            1,
            vec![ExactScalar::new(Rational::new(-7, 12), Rational::new(5, 9))],
        )
        .unwrap());
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"rows\":2"));
        let back: ExactMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn json_rejects_bad_length() {
        let s = r#"{"rows":2,"cols":2,"entries":[["1/1","0/1"]]}"#;
        assert!(serde_json::from_str::<ExactMatrix>(s).is_err());
    }
}
