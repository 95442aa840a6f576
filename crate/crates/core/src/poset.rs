//! Finite posets, monotone maps, Galois adjoints and fibered products.
//!
//! Relations are stored explicitly as bit rows; every construction verifies
//! reflexivity, antisymmetry and transitivity up front, and adjoints are
//! re-checked against the adjunction law on all pairs before being returned.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::bits::BitSet;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinitePoset {
    n: usize,
    up: Vec<BitSet>, // up[p] = { q : p ≤ q }
}

impl FinitePoset {
    pub fn new(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let up: Vec<BitSet> = (0..n)
            .map(|p| BitSet::from_indices(n, (0..n).filter(|q| leq(p, *q))))
            .collect();
        let poset = FinitePoset { n, up };
        poset.verify()?;
        Ok(poset)
    }

    fn verify(&self) -> Result<()> {
        for p in 0..self.n {
            if !self.up[p].contains(p) {
                return Err(Error::InvalidPoset(format!("not reflexive at {p}")));
            }
            for q in self.up[p].iter() {
                if q != p && self.up[q].contains(p) {
                    return Err(Error::InvalidPoset(format!("antisymmetry fails at {p},{q}")));
                }
                if !self.up[q].is_subset_of(&self.up[p]) {
                    return Err(Error::InvalidPoset(format!("transitivity fails at {p},{q}")));
                }
            }
        }
        Ok(())
    }

    /// Reflexive-transitive closure of the given strict pairs; errors if the
    /// result is not antisymmetric.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut up: Vec<BitSet> = (0..n).map(|p| BitSet::from_indices(n, [p])).collect();
        for (a, b) in pairs {
            up[*a].insert(*b);
        }
        // transitive closure (iterate to fixpoint)
        loop {
            let mut changed = false;
            for p in 0..n {
                let mut acc = up[p].clone();
                for q in up[p].iter() {
                    acc.union_with(&up[q]);
                }
                if acc != up[p] {
                    up[p] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let poset = FinitePoset { n, up };
        poset.verify()?;
        Ok(poset)
    }

    pub fn chain(n: usize) -> Self {
        Self::new(n, |p, q| p <= q).expect("chain")
    }

    pub fn antichain(n: usize) -> Self {
        Self::new(n, |p, q| p == q).expect("antichain")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn le(&self, p: usize, q: usize) -> bool {
        self.up[p].contains(q)
    }

    pub fn up_set(&self, p: usize) -> &BitSet {
        &self.up[p]
    }

    pub fn down_set(&self, p: usize) -> BitSet {
        BitSet::from_indices(self.n, (0..self.n).filter(|q| self.le(*q, p)))
    }

    pub fn opposite(&self) -> FinitePoset {
        FinitePoset::new(self.n, |p, q| self.le(q, p)).expect("opposite of a poset")
    }

    pub fn product(&self, other: &FinitePoset) -> FinitePoset {
        let m = other.n;
        FinitePoset::new(self.n * m, |a, b| {
            let (p1, q1) = (a / m, a % m);
            let (p2, q2) = (b / m, b % m);
            self.le(p1, p2) && other.le(q1, q2)
        })
        .expect("product of posets")
    }

    /// Induced sub-poset on the given (deduplicated, ordered) elements.
    pub fn induced(&self, elements: &[usize]) -> FinitePoset {
        FinitePoset::new(elements.len(), |a, b| self.le(elements[a], elements[b]))
            .expect("induced sub-poset")
    }

    /// Covering pairs (p, q): p < q with nothing in between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.n {
            for q in self.up[p].iter() {
                if q == p {
                    continue;
                }
                let between = (0..self.n)
                    .any(|r| r != p && r != q && self.le(p, r) && self.le(r, q));
                if !between {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Least element of the subset, if it exists.
    pub fn least_of(&self, candidates: &BitSet) -> Option<usize> {
        let mut best: Option<usize> = None;
        for p in candidates.iter() {
            if candidates.is_subset_of(&self.up[p]) {
                best = Some(p);
                break;
            }
        }
        best
    }

    pub fn minimal_elements(&self, candidates: &BitSet) -> Vec<usize> {
        candidates
            .iter()
            .filter(|p| candidates.iter().all(|q| q == *p || !self.le(q, *p)))
            .collect()
    }

    pub fn bottom(&self) -> Option<usize> {
        (0..self.n).find(|p| self.up[*p].count() == self.n)
    }

    /// Hasse diagram in DOT format.
    pub fn to_dot(&self, name: &str, labels: &[String]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {name} {{");
        let _ = writeln!(s, "  rankdir=BT;");
        for p in 0..self.n {
            let label = labels.get(p).cloned().unwrap_or_else(|| p.to_string());
            let _ = writeln!(s, "  n{p} [label=\"{label}\"];");
        }
        for (p, q) in self.covers() {
            let _ = writeln!(s, "  n{p} -> n{q};");
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug)]
pub struct MonotoneMap {
    pub dom: Arc<FinitePoset>,
    pub cod: Arc<FinitePoset>,
    image: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(dom: Arc<FinitePoset>, cod: Arc<FinitePoset>, image: Vec<usize>) -> Result<Self> {
        if image.len() != dom.len() {
            return Err(Error::NotMonotone("image length mismatch".into()));
        }
        for (p, i) in image.iter().enumerate() {
            if *i >= cod.len() {
                return Err(Error::NotMonotone(format!("image of {p} out of range")));
            }
        }
        for p in 0..dom.len() {
            for q in dom.up_set(p).iter() {
                if !cod.le(image[p], image[q]) {
                    return Err(Error::NotMonotone(format!(
                        "{p} ≤ {q} but f({p}) ≰ f({q})"
                    )));
                }
            }
        }
        Ok(MonotoneMap { dom, cod, image })
    }

    pub fn identity(p: Arc<FinitePoset>) -> Self {
        let image = (0..p.len()).collect();
        MonotoneMap { dom: p.clone(), cod: p, image }
    }

    pub fn apply(&self, p: usize) -> usize {
        self.image[p]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn compose(&self, then: &MonotoneMap) -> Result<MonotoneMap> {
        if self.cod.as_ref() != then.dom.as_ref() {
            return Err(Error::NotMonotone("composition domain mismatch".into()));
        }
        let image = self.image.iter().map(|p| then.image[*p]).collect();
        MonotoneMap::new(self.dom.clone(), then.cod.clone(), image)
    }

    /// Order dual of this map.
    pub fn opposite(&self) -> MonotoneMap {
        MonotoneMap {
            dom: Arc::new(self.dom.opposite()),
            cod: Arc::new(self.cod.opposite()),
            image: self.image.clone(),
        }
    }

    /// Two-cluster DOT rendering with mapping edges.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {name} {{");
        let _ = writeln!(s, "  rankdir=BT; compound=true;");
        let _ = writeln!(s, "  subgraph cluster_dom {{ label=\"dom\";");
        for p in 0..self.dom.len() {
            let _ = writeln!(s, "    d{p} [label=\"{p}\"];");
        }
        for (p, q) in self.dom.covers() {
            let _ = writeln!(s, "    d{p} -> d{q};");
        }
        let _ = writeln!(s, "  }}");
        let _ = writeln!(s, "  subgraph cluster_cod {{ label=\"cod\";");
        for p in 0..self.cod.len() {
            let _ = writeln!(s, "    c{p} [label=\"{p}\"];");
        }
        for (p, q) in self.cod.covers() {
            let _ = writeln!(s, "    c{p} -> c{q};");
        }
        let _ = writeln!(s, "  }}");
        for p in 0..self.dom.len() {
            let _ = writeln!(s, "  d{p} -> c{} [style=dashed, constraint=false];", self.image[p]);
        }
        s.push_str("}\n");
        s
    }
}

/// Left adjoint of a monotone map, if it exists: l(q) is the least element
/// of { p : q ≤ f(p) }. The adjunction law l(q) ≤ p ⟺ q ≤ f(p) is verified
/// exhaustively before the map is returned.
pub fn left_adjoint(f: &MonotoneMap) -> Option<MonotoneMap> {
    let dom = &f.dom;
    let cod = &f.cod;
    let mut image = Vec::with_capacity(cod.len());
    for q in 0..cod.len() {
        let candidates = BitSet::from_indices(
            dom.len(),
            (0..dom.len()).filter(|p| cod.le(q, f.apply(*p))),
        );
        {
            let p0 = dom.least_of(&candidates)?;
            image.push(p0)
        }
    }
    let l = MonotoneMap::new(cod.clone(), dom.clone(), image).ok()?;
    // exhaustive adjunction law
    for q in 0..cod.len() {
        for p in 0..dom.len() {
            if dom.le(l.apply(q), p) != cod.le(q, f.apply(p)) {
                return None;
            }
        }
    }
    Some(l)
}

/// Right adjoint, as the order dual of the left adjoint.
pub fn right_adjoint(f: &MonotoneMap) -> Option<MonotoneMap> {
    let l = left_adjoint(&f.opposite())?;
    MonotoneMap::new(f.cod.clone(), f.dom.clone(), l.image().to_vec()).ok()
}

/// Full and faithful for posets: f(x) ≤ f(y) ⟺ x ≤ y.
pub fn is_order_embedding(f: &MonotoneMap) -> bool {
    for x in 0..f.dom.len() {
        for y in 0..f.dom.len() {
            if f.cod.le(f.apply(x), f.apply(y)) != f.dom.le(x, y) {
                return false;
            }
        }
    }
    true
}

/// Checks that `l ⊣ f` and then decides whether the adjunction unit is an
/// isomorphism, i.e. f(l(q)) = q for all q.
pub fn unit_is_identity(f: &MonotoneMap, l: &MonotoneMap) -> Result<bool> {
    if l.dom.as_ref() != f.cod.as_ref() || l.cod.as_ref() != f.dom.as_ref() {
        return Err(Error::NotAdjointPair("domain/codomain mismatch".into()));
    }
    for q in 0..f.cod.len() {
        for p in 0..f.dom.len() {
            if f.dom.le(l.apply(q), p) != f.cod.le(q, f.apply(p)) {
                return Err(Error::NotAdjointPair(format!(
                    "adjunction law fails at q={q}, p={p}"
                )));
            }
        }
    }
    Ok((0..f.cod.len()).all(|q| f.apply(l.apply(q)) == q))
}

/// Pullback of two monotone maps with common codomain: pairs (p, q) with
/// f(p) = g(q), ordered componentwise.
pub struct FiberedProduct {
    pub poset: Arc<FinitePoset>,
    pub pairs: Vec<(usize, usize)>,
    pub proj_left: MonotoneMap,
    pub proj_right: MonotoneMap,
}

pub fn fibered_product(f: &MonotoneMap, g: &MonotoneMap) -> Result<FiberedProduct> {
    if f.cod.as_ref() != g.cod.as_ref() {
        return Err(Error::NotMonotone("fibered product requires a shared codomain".into()));
    }
    let mut pairs = Vec::new();
    for p in 0..f.dom.len() {
        for q in 0..g.dom.len() {
            if f.apply(p) == g.apply(q) {
                pairs.push((p, q));
            }
        }
    }
    let poset = Arc::new(
        FinitePoset::new(pairs.len(), |a, b| {
            f.dom.le(pairs[a].0, pairs[b].0) && g.dom.le(pairs[a].1, pairs[b].1)
        })
        .expect("componentwise order"),
    );
    let proj_left = MonotoneMap::new(
        poset.clone(),
        f.dom.clone(),
        pairs.iter().map(|(p, _)| *p).collect(),
    )?;
    let proj_right = MonotoneMap::new(
        poset.clone(),
        g.dom.clone(),
        pairs.iter().map(|(_, q)| *q).collect(),
    )?;
    Ok(FiberedProduct { poset, pairs, proj_left, proj_right })
}
