//! The external spectrum bundle of a context fragment: one classical
//! spectrum fiber per context, restriction maps along inclusions, the
//! admissible-open topology, global-section (KS-map) search, and the
//! state ↔ functional-family correspondence.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::Character;
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::fragment::ContextFragment;
use crate::matrix::ExactMatrix;
use crate::scalar::{ExactScalar, Rational};

pub struct SpectrumBundle {
    fragment: Arc<ContextFragment>,
    fibers: Vec<Vec<Character>>,
    /// (x, y) for x ≤ y, x ≠ y: the map fiber(y) → fiber(x) restricting a
    /// character of the larger context to the smaller one.
    restrictions: HashMap<(usize, usize), Vec<usize>>,
}

impl SpectrumBundle {
    pub fn new(fragment: Arc<ContextFragment>, hints: &[ExactScalar]) -> Result<Self> {
        let fibers: Vec<Vec<Character>> = fragment
            .contexts()
            .iter()
            .map(|c| c.primitive_idempotents(hints))
            .collect::<Result<_>>()?;
        let order = fragment.order().clone();
        let mut restrictions = HashMap::new();
        for x in 0..fragment.len() {
            for y in order.up_set(x).iter() {
                if y == x {
                    continue;
                }
                let map = restriction_between(&fragment, &fibers, x, y)?;
                restrictions.insert((x, y), map);
            }
        }
        let bundle = SpectrumBundle { fragment, fibers, restrictions };
        bundle.verify_functorial()?;
        Ok(bundle)
    }

    pub fn fragment(&self) -> &Arc<ContextFragment> {
        &self.fragment
    }

    pub fn fiber(&self, x: usize) -> &[Character] {
        &self.fibers[x]
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(|f| f.len()).collect()
    }

    pub fn total_points(&self) -> usize {
        self.fibers.iter().map(|f| f.len()).sum()
    }

    /// The restriction fiber(y) → fiber(x) for x ≤ y (identity when x = y).
    pub fn restriction(&self, x: usize, y: usize) -> Vec<usize> {
        if x == y {
            return (0..self.fibers[x].len()).collect();
        }
        self.restrictions[&(x, y)].clone()
    }

    /// Restrictions must compose along chains x ≤ y ≤ z.
    fn verify_functorial(&self) -> Result<()> {
        let order = self.fragment.order();
        for x in 0..self.fragment.len() {
            for y in order.up_set(x).iter() {
                for z in order.up_set(y).iter() {
                    if x == y || y == z {
                        continue;
                    }
                    let xy = self.restriction(x, y);
                    let yz = self.restriction(y, z);
                    let xz = self.restriction(x, z);
                    for phi in 0..self.fibers[z].len() {
                        if xy[yz[phi]] != xz[phi] {
                            return Err(Error::Internal(format!(
                                "restriction functoriality fails along {x} ≤ {y} ≤ {z}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Is the per-context selection an admissible open: for every x ≤ y,
    /// the restriction-preimage of U_x lies inside U_y?
    pub fn is_admissible(&self, open: &[BitSet]) -> bool {
        let order = self.fragment.order();
        for x in 0..self.fragment.len() {
            for y in order.up_set(x).iter() {
                if y == x {
                    continue;
                }
                let r = self.restriction(x, y);
                for (phi, target) in r.iter().enumerate() {
                    if open[x].contains(*target) && !open[y].contains(phi) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Enumerates every admissible open; errors when the candidate count
    /// 2^total_points exceeds the bound.
    pub fn enumerate_admissible(&self, bound: usize) -> Result<Vec<Vec<BitSet>>> {
        let total = self.total_points();
        if total >= usize::BITS as usize || (1usize << total) > bound {
            return Err(Error::SizeBound(format!(
                "2^{total} candidate opens exceed the bound {bound}"
            )));
        }
        let sizes = self.fiber_sizes();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << total) {
            let mut open = Vec::with_capacity(sizes.len());
            let mut off = 0;
            for s in &sizes {
                let mut b = BitSet::new(*s);
                for k in 0..*s {
                    if mask >> (off + k) & 1 == 1 {
                        b.insert(k);
                    }
                }
                off += s;
                open.push(b);
            }
            if self.is_admissible(&open) {
                out.push(open);
            }
        }
        Ok(out)
    }

    /// Are the admissible opens closed under union and intersection and do
    /// they contain the empty and total selections? (They form a topology;
    /// this re-verifies it exhaustively for an enumerated family.)
    pub fn family_is_topology(&self, family: &[Vec<BitSet>]) -> bool {
        let key = |open: &[BitSet]| -> Vec<BitSet> { open.to_vec() };
        let set: std::collections::BTreeSet<Vec<BitSet>> =
            family.iter().map(|o| key(o)).collect();
        let sizes = self.fiber_sizes();
        let empty: Vec<BitSet> = sizes.iter().map(|s| BitSet::new(*s)).collect();
        let full: Vec<BitSet> = sizes.iter().map(|s| BitSet::full(*s)).collect();
        if !set.contains(&empty) || !set.contains(&full) {
            return false;
        }
        for a in family {
            for b in family {
                let union: Vec<BitSet> =
                    a.iter().zip(b.iter()).map(|(x, y)| x.union(y)).collect();
                let meet: Vec<BitSet> =
                    a.iter().zip(b.iter()).map(|(x, y)| x.intersection(y)).collect();
                if !set.contains(&union) || !set.contains(&meet) {
                    return false;
                }
            }
        }
        true
    }

    /// Depth-first search for a global section: one character per context,
    /// compatible under every restriction. Deterministic node order
    /// (contexts by index, characters ascending).
    pub fn ks_search(&self) -> KsOutcome {
        let mut section = vec![usize::MAX; self.fragment.len()];
        let mut explored = 0u64;
        let found = self.dfs(0, &mut section, &mut explored, &mut None);
        KsOutcome {
            section: found,
            explored,
            exhausted: true,
        }
    }

    /// All global sections (up to `cap`), in DFS order.
    pub fn ks_sections(&self, cap: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut section = vec![usize::MAX; self.fragment.len()];
        let mut explored = 0u64;
        self.dfs(0, &mut section, &mut explored, &mut Some((&mut out, cap)));
        out
    }

    fn dfs(
        &self,
        x: usize,
        section: &mut Vec<usize>,
        explored: &mut u64,
        collect: &mut Option<(&mut Vec<Vec<usize>>, usize)>,
    ) -> Option<Vec<usize>> {
        if x == self.fragment.len() {
            if let Some((out, cap)) = collect {
                if out.len() < *cap {
                    out.push(section.clone());
                }
                return None;
            }
            return Some(section.clone());
        }
        let order = self.fragment.order();
        'phi: for phi in 0..self.fibers[x].len() {
            *explored += 1;
            // compatibility with already assigned comparable contexts
            for y in 0..x {
                if order.le(y, x) && self.restriction(y, x)[phi] != section[y] {
                    continue 'phi;
                }
                if order.le(x, y) && self.restriction(x, y)[section[y]] != phi {
                    continue 'phi;
                }
            }
            section[x] = phi;
            if let Some(result) = self.dfs(x + 1, section, explored, collect) {
                section[x] = usize::MAX;
                return Some(result);
            }
            section[x] = usize::MAX;
            if let Some((out, cap)) = collect {
                if out.len() >= *cap {
                    return None;
                }
            }
        }
        None
    }

    /// Clustered DOT: one cluster per fiber, restriction edges along
    /// covering relations.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {name} {{");
        let _ = writeln!(s, "  rankdir=BT; compound=true;");
        for (x, fiber) in self.fibers.iter().enumerate() {
            let _ = writeln!(s, "  subgraph cluster_{x} {{ label=\"C{x}\";");
            for phi in 0..fiber.len() {
                let _ = writeln!(s, "    f{x}_{phi} [label=\"φ{phi}\"];");
            }
            let _ = writeln!(s, "  }}");
        }
        for (x, y) in self.fragment.order().covers() {
            let r = self.restriction(x, y);
            for (phi, target) in r.iter().enumerate() {
                let _ = writeln!(s, "  f{y}_{phi} -> f{x}_{target} [style=dashed];");
            }
        }
        s.push_str("}\n");
        s
    }
}

/// For each character of the larger context, the unique character of the
/// smaller whose idempotent dominates it (e_small · e_large = e_large).
fn restriction_between(
    fragment: &ContextFragment,
    fibers: &[Vec<Character>],
    x: usize,
    y: usize,
) -> Result<Vec<usize>> {
    let mut map = Vec::with_capacity(fibers[y].len());
    for phi in &fibers[y] {
        let mut found = None;
        for (k, psi) in fibers[x].iter().enumerate() {
            let prod = psi.idempotent.mul(&phi.idempotent)?;
            if prod == phi.idempotent {
                if found.is_some() {
                    return Err(Error::Internal(format!(
                        "two dominating characters between contexts {x} ≤ {y}"
                    )));
                }
                found = Some(k);
            }
        }
        map.push(found.ok_or_else(|| {
            Error::Internal(format!("no dominating character between contexts {x} ≤ {y}"))
        })?);
    }
    let _ = fragment;
    Ok(map)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KsOutcome {
    /// A section (character index per context), if one exists.
    pub section: Option<Vec<usize>>,
    /// Nodes visited by the exhaustive search.
    pub explored: u64,
    /// The search ran to completion, so `section: None` certifies absence.
    pub exhausted: bool,
}

/// A density matrix: self-adjoint, trace one, positive semidefinite. The
/// PSD certificate is an exact Schur-complement recursion (a zero diagonal
/// pivot forces a zero row; a negative pivot refutes).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantumState {
    density: ExactMatrix,
}

impl QuantumState {
    pub fn from_density(density: ExactMatrix) -> Result<Self> {
        if !density.is_self_adjoint() {
            return Err(Error::NotSelfAdjoint);
        }
        if density.trace()? != ExactScalar::ONE {
            return Err(Error::InvalidInput("density trace is not one".into()));
        }
        if !hermitian_psd(&density)? {
            return Err(Error::InvalidInput("density is not positive semidefinite".into()));
        }
        Ok(QuantumState { density })
    }

    /// ρ = b*·b normalized by its trace: positive by construction (the
    /// factorization is the witness), then re-verified.
    pub fn from_factor(b: &ExactMatrix) -> Result<Self> {
        let gram = b.adjoint().mul(b)?;
        let tr = gram.trace()?;
        if tr.is_zero() {
            return Err(Error::InvalidInput("zero factor".into()));
        }
        let density = gram.scale(&tr.recip());
        Self::from_density(density)
    }

    pub fn density(&self) -> &ExactMatrix {
        &self.density
    }

    pub fn dim(&self) -> u32 {
        self.density.rows()
    }

    /// ⟨a⟩ = tr(ρ·a).
    pub fn expectation(&self, a: &ExactMatrix) -> Result<ExactScalar> {
        self.density.mul(a)?.trace()
    }
}

/// Exact positive-semidefiniteness for a Hermitian matrix.
fn hermitian_psd(h: &ExactMatrix) -> Result<bool> {
    let d = h.rows();
    let mut m: Vec<Vec<ExactScalar>> = (0..d)
        .map(|r| (0..d).map(|c| h.get(r, c)).collect())
        .collect();
    let mut size = d as usize;
    while size > 0 {
        let pivot = m[0][0].clone();
        if !pivot.is_real() {
            return Ok(false);
        }
        if pivot.re.is_negative() {
            return Ok(false);
        }
        if pivot.re.is_zero() {
            // PSD forces the whole first row/column to vanish
            if m[0].iter().any(|v| !v.is_zero()) || m.iter().any(|row| !row[0].is_zero()) {
                return Ok(false);
            }
            m = shrink(m);
            size -= 1;
            continue;
        }
        // Schur complement of the pivot
        let inv = pivot.recip();
        let mut next: Vec<Vec<ExactScalar>> = Vec::with_capacity(size - 1);
        for r in 1..size {
            let mut row = Vec::with_capacity(size - 1);
            for c in 1..size {
                let adj = m[r][0].mul(&inv).mul(&m[0][c]);
                row.push(m[r][c].sub(&adj));
            }
            next.push(row);
        }
        m = next;
        size -= 1;
    }
    Ok(true)
}

fn shrink(m: Vec<Vec<ExactScalar>>) -> Vec<Vec<ExactScalar>> {
    m.into_iter().skip(1).map(|row| row.into_iter().skip(1).collect()).collect()
}

/// The per-context tabulation of a ↦ tr(ρ·a) on the fragment's contexts.
#[derive(Clone, Debug)]
pub struct StateFamily {
    /// values[x][k] = functional value on basis element k of context x.
    pub values: Vec<Vec<ExactScalar>>,
}

/// Tabulates the state over all contexts and verifies naturality: the
/// functional of a smaller context is the restriction of the functional of
/// any larger one.
pub fn restrict_state(rho: &QuantumState, fragment: &ContextFragment) -> Result<StateFamily> {
    if rho.dim() != fragment.ambient().ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state on {} vs ambient {}",
            rho.dim(),
            fragment.ambient().ambient_dim()
        )));
    }
    let mut values = Vec::with_capacity(fragment.len());
    for c in fragment.contexts() {
        let vals: Vec<ExactScalar> = (0..c.dim())
            .map(|k| rho.expectation(&c.basis_matrix(k)))
            .collect::<Result<_>>()?;
        values.push(vals);
    }
    let family = StateFamily { values };
    verify_naturality(&family, fragment)?;
    Ok(family)
}

/// Naturality: for x ≤ y, evaluating the family of y on each basis element
/// of x (expanded in y's basis) reproduces the family of x.
fn verify_naturality(family: &StateFamily, fragment: &ContextFragment) -> Result<()> {
    let order = fragment.order();
    for x in 0..fragment.len() {
        for y in order.up_set(x).iter() {
            if y == x {
                continue;
            }
            let cx = fragment.context(x);
            let cy = fragment.context(y);
            for k in 0..cx.dim() {
                let m = cx.basis_matrix(k);
                let coords = cy
                    .coords_of(&m)
                    .ok_or_else(|| Error::Internal("inclusion without membership".into()))?;
                let mut via_y = ExactScalar::ZERO;
                for (c, v) in coords.iter().zip(&family.values[y]) {
                    via_y = via_y.add(&c.mul(v));
                }
                if via_y != family.values[x][k] {
                    return Err(Error::Internal(format!(
                        "naturality fails along contexts {x} ≤ {y}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A quasi-state assembled from a consistent family: a functional on the
/// union of the fragment's contexts, linear on each context.
#[derive(Debug)]
pub struct QuasiState<'a> {
    fragment: &'a ContextFragment,
    family: StateFamily,
}

/// Verifies consistency (shared elements get equal values through every
/// context), positivity on character idempotents and unitality, then wraps
/// the family as a quasi-state.
pub fn quasi_state_from_family<'a>(
    family: StateFamily,
    fragment: &'a ContextFragment,
    hints: &[ExactScalar],
) -> Result<QuasiState<'a>> {
    if family.values.len() != fragment.len() {
        return Err(Error::InvalidInput("family length mismatch".into()));
    }
    for (x, c) in fragment.contexts().iter().enumerate() {
        if family.values[x].len() != c.dim() {
            return Err(Error::InvalidInput(format!("family at context {x} has wrong arity")));
        }
    }
    // pairwise consistency on intersections
    for x in 0..fragment.len() {
        for y in 0..fragment.len() {
            if x >= y {
                continue;
            }
            let meet = fragment.context(x).intersect(fragment.context(y))?;
            for k in 0..meet.dim() {
                let m = meet.basis_matrix(k);
                let vx = eval_in_context(&family, fragment, x, &m)?;
                let vy = eval_in_context(&family, fragment, y, &m)?;
                if vx != vy {
                    return Err(Error::InconsistentFamily { left: x, right: y });
                }
            }
        }
    }
    // unitality via the bottom context
    let bottom = fragment.bottom();
    let one = ExactMatrix::identity(fragment.ambient().ambient_dim());
    if eval_in_context(&family, fragment, bottom, &one)? != ExactScalar::ONE {
        return Err(Error::InvalidInput("family is not unital".into()));
    }
    // positivity: values on character idempotents lie in [0, 1]
    for (x, c) in fragment.contexts().iter().enumerate() {
        for ch in c.primitive_idempotents(hints)? {
            let v = eval_in_context(&family, fragment, x, &ch.idempotent)?;
            if !v.is_real()
                || v.re.is_negative()
                || v.re.cmp(&Rational::ONE) == std::cmp::Ordering::Greater
            {
                return Err(Error::InvalidInput(format!(
                    "family value on an idempotent of context {x} is outside [0,1]"
                )));
            }
        }
    }
    Ok(QuasiState { fragment, family })
}

fn eval_in_context(
    family: &StateFamily,
    fragment: &ContextFragment,
    x: usize,
    m: &ExactMatrix,
) -> Result<ExactScalar> {
    let coords = fragment
        .context(x)
        .coords_of(m)
        .ok_or_else(|| Error::InvalidInput("element outside the context".into()))?;
    let mut acc = ExactScalar::ZERO;
    for (c, v) in coords.iter().zip(&family.values[x]) {
        acc = acc.add(&c.mul(v));
    }
    Ok(acc)
}

impl QuasiState<'_> {
    /// μ(m) for m in some context of the fragment; linear on each context,
    /// with μ(x + iy) = μ(x) + iμ(y) for self-adjoint x, y.
    pub fn eval(&self, m: &ExactMatrix) -> Option<ExactScalar> {
        for x in 0..self.fragment.len() {
            if self.fragment.context(x).member(m).ok()? {
                return eval_in_context(&self.family, self.fragment, x, m).ok();
            }
        }
        // split into Hermitian parts and try again
        let adj = m.adjoint();
        let re = m.add(&adj).ok()?.scale(&ExactScalar::from_rational(Rational::new(1, 2)));
        let im = m
            .sub(&adj)
            .ok()?
            .scale(&ExactScalar::new(Rational::ZERO, Rational::new(-1, 2)));
        if re == *m {
            return None;
        }
        let (vr, vi) = (self.eval(&re)?, self.eval(&im)?);
        Some(vr.add(&vi.mul(&ExactScalar::i())))
    }

    pub fn family(&self) -> &StateFamily {
        &self.family
    }
}
