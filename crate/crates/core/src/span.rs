//! Canonical linear spans of sparse coordinate vectors.
//!
//! A `RowSpan` keeps its rows in reduced echelon form with respect to the
//! ambient coordinate order: pivots strictly increasing, leading coefficient
//! one, pivot coordinates eliminated from every other row. Two spans are
//! equal as subspaces iff they are equal row-for-row, which is what makes
//! algebra and context equality decidable.

use crate::matrix::SparseVec;
use crate::scalar::ExactScalar;

/// `a - c·b` over sparse vectors. The monic eliminations of echelon form
/// make c = ±1 overwhelmingly common, so those skip the multiplication.
pub fn sub_scaled(a: &SparseVec, b: &SparseVec, c: &ExactScalar) -> SparseVec {
    let one = c.is_one();
    let minus_one = !one && !c.re.is_zero() && c.im.is_zero() && {
        let m = c.re.clone();
        m.is_negative() && m.neg().is_one()
    };
    let scaled = |vb: &ExactScalar| -> ExactScalar {
        if one {
            vb.clone()
        } else if minus_one {
            vb.neg()
        } else {
            vb.mul(c)
        }
    };
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ia, va) = &a[i];
        let (ib, vb) = &b[j];
        match ia.cmp(ib) {
            std::cmp::Ordering::Less => {
                out.push((*ia, va.clone()));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                let t = scaled(vb).neg();
                if !t.is_zero() {
                    out.push((*ib, t));
                }
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let t = va.sub(&scaled(vb));
                if !t.is_zero() {
                    out.push((*ia, t));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    for (ib, vb) in &b[j..] {
        let t = scaled(vb).neg();
        if !t.is_zero() {
            out.push((*ib, t));
        }
    }
    out
}

pub fn scale_vec(a: &SparseVec, c: &ExactScalar) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, v)| (*i, v.mul(c))).collect()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RowSpan {
    dim: u32,
    rows: Vec<SparseVec>, // reduced echelon form, sorted by pivot
}

impl RowSpan {
    pub fn new(dim: u32) -> Self {
        RowSpan { dim, rows: Vec::new() }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    fn pivot(row: &SparseVec) -> u32 {
        row[0].0
    }

    /// Index of the row with the given pivot, if any.
    fn row_with_pivot(&self, coord: u32) -> Option<usize> {
        self.rows.binary_search_by_key(&coord, Self::pivot).ok()
    }

    /// Fully reduces `v` against the span; the returned residue has no
    /// pivot coordinates. The second component lists `(row, coefficient)`
    /// pairs such that `v = residue + Σ coeff·row`.
    pub fn reduce_with_coords(&self, v: &SparseVec) -> (SparseVec, Vec<(usize, ExactScalar)>) {
        let mut v = v.clone();
        let mut coords = Vec::new();
        let mut pos = 0;
        while pos < v.len() {
            let coord = v[pos].0;
            if let Some(r) = self.row_with_pivot(coord) {
                let c = v[pos].1.clone();
                v = sub_scaled(&v, &self.rows[r], &c);
                coords.push((r, c));
                // entries before pos are untouched: rows have no
                // coordinates below their pivot
            } else {
                pos += 1;
            }
        }
        (v, coords)
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_with_coords(v).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Expansion coefficients of `v` in the canonical basis, dense by row
    /// index; `None` if `v` is outside the span.
    pub fn coords_of(&self, v: &SparseVec) -> Option<Vec<ExactScalar>> {
        let (res, coords) = self.reduce_with_coords(v);
        if !res.is_empty() {
            return None;
        }
        let mut dense = vec![ExactScalar::ZERO; self.rows.len()];
        for (r, c) in coords {
            dense[r] = dense[r].add(&c);
        }
        Some(dense)
    }

    /// Inserts `v`; returns true when the span grows.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let res = self.reduce(v);
        if res.is_empty() {
            return false;
        }
        let lead = res[0].1.clone();
        let res = scale_vec(&res, &lead.recip());
        let pivot = Self::pivot(&res);
        // eliminate the new pivot from existing rows
        for row in &mut self.rows {
            if let Ok(p) = row.binary_search_by_key(&pivot, |(i, _)| *i) {
                let c = row[p].1.clone();
                *row = sub_scaled(row, &res, &c);
            }
        }
        let at = self.rows.partition_point(|r| Self::pivot(r) < pivot);
        self.rows.insert(at, res);
        true
    }

    pub fn insert_all<'a>(&mut self, vs: impl IntoIterator<Item = &'a SparseVec>) {
        for v in vs {
            self.insert(v);
        }
    }

    pub fn from_vecs(dim: u32, vs: &[SparseVec]) -> Self {
        let mut s = RowSpan::new(dim);
        s.insert_all(vs.iter());
        s
    }

    pub fn is_subspace_of(&self, other: &RowSpan) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &RowSpan) -> RowSpan {
        let mut s = self.clone();
        s.insert_all(other.rows.iter());
        s
    }

    /// Exact intersection of two spans.
    pub fn intersect(&self, other: &RowSpan) -> RowSpan {
        self.intersect_with_meta(&SpanMeta::of(self), other, &SpanMeta::of(other))
    }

    /// Exact intersection with precomputed support metadata (callers doing
    /// many intersections against the same spans reuse the metadata).
    ///
    /// Any vector of the intersection is supported inside the common
    /// support mask, and in a reduced basis each row's pivot appears in no
    /// other row, so rows whose pivot escapes the mask cannot contribute.
    /// Dropping them shrinks the mask, which is iterated to a fixpoint;
    /// the kernel of the residue matrix of the surviving rows (eliminated
    /// with coefficient trackers attached) then spans the intersection.
    pub fn intersect_with_meta(
        &self,
        my_meta: &SpanMeta,
        other: &RowSpan,
        their_meta: &SpanMeta,
    ) -> RowSpan {
        debug_assert_eq!(self.dim, other.dim);
        let mut mask = my_meta.support.intersection(&their_meta.support);
        let mut kept_self_ix: Vec<usize> = (0..self.rows.len()).collect();
        let mut kept_other_ix: Vec<usize> = (0..other.rows.len()).collect();
        loop {
            let before = (kept_self_ix.len(), kept_other_ix.len());
            kept_self_ix.retain(|&r| mask.contains(Self::pivot(&self.rows[r]) as usize));
            kept_other_ix.retain(|&r| mask.contains(Self::pivot(&other.rows[r]) as usize));
            if (kept_self_ix.len(), kept_other_ix.len()) == before {
                break;
            }
            let mut sup = crate::bits::BitSet::new(self.dim as usize);
            for &r in &kept_self_ix {
                sup.union_with(&my_meta.row_supports[r]);
            }
            let mut sup_o = crate::bits::BitSet::new(self.dim as usize);
            for &r in &kept_other_ix {
                sup_o.union_with(&their_meta.row_supports[r]);
            }
            sup.intersect_with(&sup_o);
            mask = sup;
        }
        let kept_self: Vec<&SparseVec> = kept_self_ix.iter().map(|&r| &self.rows[r]).collect();
        let kept_other: Vec<&SparseVec> =
            kept_other_ix.iter().map(|&r| &other.rows[r]).collect();

        // tiny instances skip the component machinery
        if kept_self.len() + kept_other.len() <= 8 {
            let mut out = RowSpan::new(self.dim);
            intersect_group(&kept_self, &kept_other, self.dim, &mut out);
            return out;
        }
        // The coordinates of the surviving rows split into connected
        // support components (union-find over shared coordinates, rows of
        // both sides together). A vector of either span decomposes uniquely
        // over the components, so the intersection is the direct sum of the
        // per-component intersections — each a small elimination. The rows
        // are grouped by the union-find root of their leading coordinate,
        // with roots chosen per-row (flat arrays, no hashing).
        let total_rows = kept_self.len() + kept_other.len();
        let mut parent: Vec<u32> = (0..total_rows as u32).collect();
        fn find(parent: &mut [u32], mut i: u32) -> u32 {
            while parent[i as usize] != i {
                parent[i as usize] = parent[parent[i as usize] as usize];
                i = parent[i as usize];
            }
            i
        }
        // owner[c] = first row that touched coordinate c, to union through
        let mut owner: Vec<i32> = vec![-1; self.dim as usize];
        for (ri, row) in kept_self.iter().chain(kept_other.iter()).enumerate() {
            for (c, _) in row.iter() {
                let prev = owner[*c as usize];
                if prev < 0 {
                    owner[*c as usize] = ri as i32;
                } else {
                    let a = find(&mut parent, ri as u32);
                    let b = find(&mut parent, prev as u32);
                    if a != b {
                        parent[a.max(b) as usize] = a.min(b);
                    }
                }
            }
        }
        // group rows by root, keeping pivot order within each side
        let mut group_of_root: Vec<i32> = vec![-1; total_rows];
        let mut groups: Vec<(Vec<&SparseVec>, Vec<&SparseVec>)> = Vec::new();
        let mut row_group = |ri: usize, parent: &mut [u32], groups_len: usize| -> usize {
            let root = find(parent, ri as u32) as usize;
            if group_of_root[root] < 0 {
                group_of_root[root] = groups_len as i32;
            }
            group_of_root[root] as usize
        };
        for (ri, row) in kept_self.iter().enumerate() {
            let g = row_group(ri, &mut parent, groups.len());
            if g == groups.len() {
                groups.push((Vec::new(), Vec::new()));
            }
            groups[g].0.push(row);
        }
        for (k, row) in kept_other.iter().enumerate() {
            let g = row_group(kept_self.len() + k, &mut parent, groups.len());
            if g == groups.len() {
                groups.push((Vec::new(), Vec::new()));
            }
            groups[g].1.push(row);
        }

        let mut out = RowSpan::new(self.dim);
        for (left, right) in &groups {
            if left.is_empty() || right.is_empty() {
                continue;
            }
            intersect_group(left, right, self.dim, &mut out);
        }
        out
    }

    /// Union support of all rows, as a sorted coordinate list. A cheap
    /// necessary condition for subspace containment.
    pub fn support(&self) -> Vec<u32> {
        let mut coords: Vec<u32> =
            self.rows.iter().flat_map(|r| r.iter().map(|(i, _)| *i)).collect();
        coords.sort_unstable();
        coords.dedup();
        coords
    }
}

/// Tracker elimination for one group of rows: combinations of `left` lying
/// in the span of `right` are appended to `out`.
fn intersect_group(left: &[&SparseVec], right: &[&SparseVec], dim: u32, out: &mut RowSpan) {
    let target = RowSpan { dim, rows: right.iter().map(|r| (*r).clone()).collect() };
    let n = left.len() as u32;
    let mut elim = RowSpan::new(dim + n);
    let mut kernel_combos: Vec<SparseVec> = Vec::new();
    for (i, row) in left.iter().enumerate() {
        let mut aug = target.reduce(row);
        aug.push((dim + i as u32, ExactScalar::ONE));
        let res = elim.reduce(&aug);
        if res.is_empty() || res[0].0 >= dim {
            // residue part vanished: tracker holds the combination
            kernel_combos.push(res);
        } else {
            elim.insert(&res);
        }
    }
    for combo in kernel_combos {
        let mut w: SparseVec = Vec::new();
        for (idx, c) in combo {
            debug_assert!(idx >= dim);
            let j = (idx - dim) as usize;
            w = sub_scaled(&w, left[j], &c.neg());
        }
        out.insert(&w);
    }
}

/// Precomputed support data for a span: the union support and per-row
/// supports as bit sets over the coordinate space.
pub struct SpanMeta {
    pub support: crate::bits::BitSet,
    pub row_supports: Vec<crate::bits::BitSet>,
}

impl SpanMeta {
    pub fn of(span: &RowSpan) -> SpanMeta {
        let dim = span.dim() as usize;
        let row_supports: Vec<crate::bits::BitSet> = span
            .rows()
            .iter()
            .map(|r| crate::bits::BitSet::from_indices(dim, r.iter().map(|(i, _)| *i as usize)))
            .collect();
        let mut support = crate::bits::BitSet::new(dim);
        for s in &row_supports {
            support.union_with(s);
        }
        SpanMeta { support, row_supports }
    }
}

/// Incremental dependency detector: feeds vectors one at a time and, when a
/// vector is dependent on the ones already fed, returns its expansion
/// coefficients over them. Used for minimal polynomials and tensor quotients.
pub struct LinearSolver {
    dim: u32,
    count: u32,
    elim: RowSpan,
}

impl LinearSolver {
    pub fn new(dim: u32, max_vectors: u32) -> Self {
        LinearSolver { dim, count: 0, elim: RowSpan::new(dim + max_vectors) }
    }

    /// Returns `None` if `v` was independent (and absorbs it); otherwise the
    /// coefficients `c` with `v = Σ cᵢ·vᵢ` over previously absorbed vectors.
    pub fn insert_tracked(&mut self, v: &SparseVec) -> Option<Vec<ExactScalar>> {
        let mut aug = v.clone();
        aug.push((self.dim + self.count, ExactScalar::ONE));
        let res = self.elim.reduce(&aug);
        if !res.is_empty() && res[0].0 < self.dim {
            self.elim.insert(&res);
            self.count += 1;
            return None;
        }
        // the tracker for the current vector has coefficient 1; the rest
        // encode -cᵢ
        let mut coeffs = vec![ExactScalar::ZERO; self.count as usize];
        for (idx, c) in &res {
            let j = idx - self.dim;
            if j < self.count {
                coeffs[j as usize] = c.neg();
            }
        }
        Some(coeffs)
    }

    pub fn rank(&self) -> usize {
        self.elim.rank()
    }
}
