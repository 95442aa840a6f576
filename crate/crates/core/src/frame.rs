//! Alexandrov up-set frames of finite posets: open enumeration, supercompact
//! opens, frame maps induced by monotone maps (with their left adjoints),
//! and points as completely prime filters.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::poset::{FinitePoset, MonotoneMap};

pub const DEFAULT_FRAME_BOUND: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct UpSetFrame {
    pub base: Arc<FinitePoset>,
    opens: Vec<BitSet>,
    supercompact: Vec<Option<usize>>, // Some(p) iff the open equals ↑p
}

impl UpSetFrame {
    pub fn opens(&self) -> &[BitSet] {
        &self.opens
    }

    pub fn len(&self) -> usize {
        self.opens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opens.is_empty()
    }

    /// The witness element when the open is supercompact (a principal up-set).
    pub fn supercompact_witness(&self, open_idx: usize) -> Option<usize> {
        self.supercompact[open_idx]
    }

    pub fn index_of(&self, open: &BitSet) -> Option<usize> {
        self.opens.binary_search(open).ok()
    }

    pub fn is_up_closed(&self, set: &BitSet) -> bool {
        is_up_closed(&self.base, set)
    }
}

pub fn is_up_closed(p: &FinitePoset, set: &BitSet) -> bool {
    set.iter().all(|x| p.up_set(x).is_subset_of(set))
}

/// All up-closed subsets of `p`, refusing to enumerate past `bound`.
pub fn up_frame(p: &Arc<FinitePoset>, bound: usize) -> Result<UpSetFrame> {
    let n = p.len();
    let basics: Vec<BitSet> = (0..n).map(|x| p.up_set(x).clone()).collect();
    // union-closure of {∅} ∪ basics reaches every up-set
    let mut seen: BTreeSet<BitSet> = BTreeSet::new();
    seen.insert(BitSet::new(n));
    let mut frontier: Vec<BitSet> = vec![BitSet::new(n)];
    while let Some(u) = frontier.pop() {
        for b in &basics {
            let v = u.union(b);
            if !seen.contains(&v) {
                if seen.len() >= bound {
                    return Err(Error::FrameTooLarge { bound });
                }
                seen.insert(v.clone());
                frontier.push(v);
            }
        }
    }
    let opens: Vec<BitSet> = seen.into_iter().collect();
    let supercompact = opens
        .iter()
        .map(|u| (0..n).find(|x| basics[*x] == *u))
        .collect();
    Ok(UpSetFrame { base: p.clone(), opens, supercompact })
}

/// The inverse-image frame map Up(Q) → Up(P) of a monotone map f: P → Q,
/// tabulated on all opens of Q.
pub fn preimage_frame_map(f: &MonotoneMap, frame_q: &UpSetFrame, frame_p: &UpSetFrame) -> Result<Vec<usize>> {
    if frame_q.base.as_ref() != f.cod.as_ref() || frame_p.base.as_ref() != f.dom.as_ref() {
        return Err(Error::InvalidInput("frame bases do not match the map".into()));
    }
    frame_q
        .opens()
        .iter()
        .map(|u| {
            let pre = BitSet::from_indices(
                f.dom.len(),
                (0..f.dom.len()).filter(|p| u.contains(f.apply(*p))),
            );
            frame_p
                .index_of(&pre)
                .ok_or_else(|| Error::Internal("preimage of an up-set not an up-set".into()))
        })
        .collect()
}

/// Checks that the tabulated map preserves ⊥, ⊤, binary unions and binary
/// intersections (on a finite frame this pins down a frame homomorphism).
pub fn verify_frame_map(map: &[usize], frame_q: &UpSetFrame, frame_p: &UpSetFrame) -> bool {
    let find = |b: &BitSet, fr: &UpSetFrame| fr.index_of(b).expect("closed family");
    let empty_q = find(&BitSet::new(frame_q.base.len()), frame_q);
    let full_q = find(&BitSet::full(frame_q.base.len()), frame_q);
    if !frame_p.opens()[map[empty_q]].is_empty()
        || frame_p.opens()[map[full_q]] != BitSet::full(frame_p.base.len())
    {
        return false;
    }
    for (i, u) in frame_q.opens().iter().enumerate() {
        for (j, v) in frame_q.opens().iter().enumerate() {
            let join = find(&u.union(v), frame_q);
            let meet = find(&u.intersection(v), frame_q);
            let pu = &frame_p.opens()[map[i]];
            let pv = &frame_p.opens()[map[j]];
            if frame_p.opens()[map[join]] != pu.union(pv)
                || frame_p.opens()[map[meet]] != pu.intersection(pv)
            {
                return false;
            }
        }
    }
    true
}

/// Left adjoint of the inverse-image frame map: U ↦ ↑f(U), verified against
/// the adjunction law L(U) ⊆ V ⟺ U ⊆ f⁻¹(V) on all pairs of opens.
pub fn frame_map_left_adjoint(
    f: &MonotoneMap,
    frame_p: &UpSetFrame,
    frame_q: &UpSetFrame,
) -> Result<Vec<usize>> {
    let preimage = preimage_frame_map(f, frame_q, frame_p)?;
    let mut adj = Vec::with_capacity(frame_p.len());
    for u in frame_p.opens() {
        let mut up_image = BitSet::new(f.cod.len());
        for p in u.iter() {
            up_image.union_with(f.cod.up_set(f.apply(p)));
        }
        let idx = frame_q
            .index_of(&up_image)
            .ok_or_else(|| Error::Internal("up-closure of image not an open".into()))?;
        adj.push(idx);
    }
    for (iu, u) in frame_p.opens().iter().enumerate() {
        for (iv, _) in frame_q.opens().iter().enumerate() {
            let lhs = frame_q.opens()[adj[iu]].is_subset_of(&frame_q.opens()[iv]);
            let rhs = u.is_subset_of(&frame_p.opens()[preimage[iv]]);
            if lhs != rhs {
                return Err(Error::Internal("frame adjunction law failed".into()));
            }
        }
    }
    Ok(adj)
}

/// A point of the frame: an element together with its completely prime
/// filter {U : p ∈ U}, presented as a bit set over the open indices.
pub struct FramePoint {
    pub element: usize,
    pub filter: BitSet,
}

/// The points of an up-set frame. Each principal filter is verified to be a
/// frame map to the two-element frame.
pub fn frame_points(frame: &UpSetFrame) -> Vec<FramePoint> {
    let n = frame.base.len();
    (0..n)
        .map(|p| {
            let filter = BitSet::from_indices(
                frame.len(),
                (0..frame.len()).filter(|i| frame.opens()[*i].contains(p)),
            );
            assert!(
                filter_is_frame_map(frame, &filter),
                "principal filter of {p} is not a frame map"
            );
            FramePoint { element: p, filter }
        })
        .collect()
}

/// Does the indicator of `filter` preserve ⊥, ⊤, binary meets and joins as a
/// map into the two-element frame?
pub fn filter_is_frame_map(frame: &UpSetFrame, filter: &BitSet) -> bool {
    let n = frame.base.len();
    let empty = frame.index_of(&BitSet::new(n)).expect("empty open");
    let full = frame.index_of(&BitSet::full(n)).expect("full open");
    if filter.contains(empty) || !filter.contains(full) {
        return false;
    }
    for i in 0..frame.len() {
        for j in 0..frame.len() {
            let u = &frame.opens()[i];
            let v = &frame.opens()[j];
            let join = frame.index_of(&u.union(v)).expect("join open");
            let meet = frame.index_of(&u.intersection(v)).expect("meet open");
            let (fi, fj) = (filter.contains(i), filter.contains(j));
            if filter.contains(join) != (fi || fj) || filter.contains(meet) != (fi && fj) {
                return false;
            }
        }
    }
    true
}

/// Is a family of bit sets a topology: contains ∅ and the total set, closed
/// under binary union and intersection?
pub fn family_is_topology(universe: usize, family: &[BitSet]) -> bool {
    let set: BTreeSet<&BitSet> = family.iter().collect();
    if !set.contains(&BitSet::new(universe)) || !set.contains(&BitSet::full(universe)) {
        return false;
    }
    for u in family {
        for v in family {
            if !set.contains(&u.union(v)) || !set.contains(&u.intersection(v)) {
                return false;
            }
        }
    }
    true
}

/// DOT rendering of the frame's inclusion order (covers only).
pub fn frame_to_dot(frame: &UpSetFrame, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {name} {{");
    let _ = writeln!(s, "  rankdir=BT;");
    for (i, u) in frame.opens().iter().enumerate() {
        let members: Vec<String> = u.iter().map(|x| x.to_string()).collect();
        let style = if frame.supercompact_witness(i).is_some() { ", style=bold" } else { "" };
        let _ = writeln!(s, "  o{i} [label=\"{{{}}}\"{style}];", members.join(","));
    }
    for (i, u) in frame.opens().iter().enumerate() {
        for (j, v) in frame.opens().iter().enumerate() {
            if i != j && u.is_subset_of(v) && u != v {
                let between = frame.opens().iter().enumerate().any(|(k, w)| {
                    k != i && k != j && u.is_subset_of(w) && w.is_subset_of(v) && w != u && w != v
                });
                if !between {
                    let _ = writeln!(s, "  o{i} -> o{j};");
                }
            }
        }
    }
    s.push_str("}\n");
    s
}
