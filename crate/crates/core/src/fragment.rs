//! Finite, intersection-closed fragments of the poset of commutative
//! subalgebras of an ambient algebra, generated from a finite set of normal
//! elements: every commuting subset of the generators is span-closed into a
//! context, the family is closed under pairwise intersection (and optionally
//! under intersection with distinguished subalgebras), and the inclusion
//! order is materialized as a finite poset.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{span_close, StarAlgebra};
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::matrix::{pauli_x, pauli_y, pauli_z, tensor_chain, ExactMatrix};
use crate::poset::{FinitePoset, MonotoneMap};
use crate::span::{RowSpan, SpanMeta};

pub const DEFAULT_FRAGMENT_BOUND: usize = 10_000;

#[derive(Clone, Debug)]
pub struct ContextFragment {
    ambient: StarAlgebra,
    contexts: Vec<StarAlgebra>,
    order: Arc<FinitePoset>,
    provenance: Vec<ExactMatrix>,
    index: HashMap<RowSpan, usize>,
}

impl ContextFragment {
    pub fn ambient(&self) -> &StarAlgebra {
        &self.ambient
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn context(&self, i: usize) -> &StarAlgebra {
        &self.contexts[i]
    }

    pub fn contexts(&self) -> &[StarAlgebra] {
        &self.contexts
    }

    pub fn order(&self) -> &Arc<FinitePoset> {
        &self.order
    }

    pub fn provenance(&self) -> &[ExactMatrix] {
        &self.provenance
    }

    pub fn index_of(&self, algebra: &StarAlgebra) -> Option<usize> {
        self.index.get(algebra.span()).copied()
    }

    /// Index of the trivial context ℂ·1.
    pub fn bottom(&self) -> usize {
        self.order.bottom().expect("fragment has a least context")
    }

    /// Re-verifies the fragment laws from scratch: the order matches
    /// algebraic inclusion elementwise, the family is intersection-closed,
    /// the trivial context is the bottom element, and each member is
    /// commutative and closed.
    pub fn verify(&self) -> Result<()> {
        let scalars = StarAlgebra::scalars(self.ambient.ambient_dim());
        if self.index_of(&scalars) != Some(self.bottom()) {
            return Err(Error::Internal("bottom context is not ℂ·1".into()));
        }
        for (i, c) in self.contexts.iter().enumerate() {
            c.verify_closed()?;
            if !c.is_commutative() {
                return Err(Error::Internal(format!("context {i} not commutative")));
            }
            for (j, d) in self.contexts.iter().enumerate() {
                let included = d.contains_algebra(c)?;
                if self.order.le(i, j) != included {
                    return Err(Error::Internal(format!(
                        "order/inclusion mismatch at ({i},{j})"
                    )));
                }
                if self.index_of(&c.intersect(d)?).is_none() {
                    return Err(Error::Internal(format!(
                        "intersection of {i},{j} missing from the fragment"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_dot(&self, name: &str) -> String {
        let labels: Vec<String> =
            self.contexts.iter().enumerate().map(|(i, c)| format!("C{i} (dim {})", c.dim())).collect();
        self.order.to_dot(name, &labels)
    }

    pub fn dump(&self) -> FragmentDump {
        FragmentDump {
            ambient_dim: self.ambient.ambient_dim(),
            ambient_basis: self.ambient.basis_dump(),
            generators: self.provenance.clone(),
            contexts: self.contexts.iter().map(|c| c.basis_dump()).collect(),
            covering_pairs: self.order.covers(),
        }
    }

    pub fn from_dump(dump: &FragmentDump) -> Result<ContextFragment> {
        let d = dump.ambient_dim;
        let ambient = StarAlgebra::from_basis(d, &dump.ambient_basis)?;
        let contexts = dump
            .contexts
            .iter()
            .map(|basis| StarAlgebra::from_basis(d, basis))
            .collect::<Result<Vec<_>>>()?;
        let frag = assemble_fragment(ambient, contexts, dump.generators.clone())?;
        let mut expected = frag.order.covers();
        let mut given = dump.covering_pairs.clone();
        expected.sort_unstable();
        given.sort_unstable();
        if expected != given {
            return Err(Error::InvalidInput(
                "covering pairs in the dump do not match the recomputed order".into(),
            ));
        }
        Ok(frag)
    }
}

/// Serialized form: contexts as basis lists, order as covering pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FragmentDump {
    pub ambient_dim: u32,
    pub ambient_basis: Vec<ExactMatrix>,
    pub generators: Vec<ExactMatrix>,
    pub contexts: Vec<Vec<ExactMatrix>>,
    pub covering_pairs: Vec<(usize, usize)>,
}

/// Inclusion relation among contexts: up[i] = { j : Cᵢ ⊆ Cⱼ }, computed
/// with a dimension/support prefilter before exact reduction.
fn inclusion_bitsets(contexts: &[StarAlgebra], d: u32) -> Result<Vec<BitSet>> {
    let n = contexts.len();
    let masks: Vec<BitSet> = contexts
        .iter()
        .map(|c| {
            BitSet::from_indices((d * d) as usize, c.span().support().iter().map(|i| *i as usize))
        })
        .collect();
    let mut up = vec![BitSet::new(n); n];
    for i in 0..n {
        for j in 0..n {
            if contexts[i].dim() > contexts[j].dim() || !masks[i].is_subset_of(&masks[j]) {
                continue;
            }
            if contexts[j].contains_algebra(&contexts[i])? {
                up[i].insert(j);
            }
        }
    }
    Ok(up)
}

/// Builds the inclusion poset for a deduplicated context family and wraps
/// everything into a fragment.
fn assemble_fragment(
    ambient: StarAlgebra,
    contexts: Vec<StarAlgebra>,
    provenance: Vec<ExactMatrix>,
) -> Result<ContextFragment> {
    let d = ambient.ambient_dim();
    let n = contexts.len();
    let mut index = HashMap::with_capacity(n);
    for (i, c) in contexts.iter().enumerate() {
        if index.insert(c.span().clone(), i).is_some() {
            return Err(Error::Internal("duplicate context in fragment".into()));
        }
    }
    let up = inclusion_bitsets(&contexts, d)?;
    let order = Arc::new(FinitePoset::new(n, |i, j| up[i].contains(j))?);
    Ok(ContextFragment { ambient, contexts, order, provenance, index })
}

/// Row metadata for the cheap meet bound: pivots plus span supports.
struct ContextMeta {
    pivots: Vec<u32>,
    meta: SpanMeta,
}

impl ContextMeta {
    fn of(c: &StarAlgebra) -> Self {
        let pivots: Vec<u32> = c.span().rows().iter().map(|r| r[0].0).collect();
        ContextMeta { pivots, meta: SpanMeta::of(c.span()) }
    }
}

/// Upper bound on dim(Cᵢ ∩ Cⱼ) by the support-mask fixpoint: rows whose
/// pivot escapes the common mask cannot contribute to the intersection, and
/// dropping them shrinks the mask.
fn meet_dim_upper_bound(a: &ContextMeta, b: &ContextMeta) -> usize {
    let mut mask = a.meta.support.intersection(&b.meta.support);
    let mut kept_a: Vec<usize> = (0..a.pivots.len()).collect();
    let mut kept_b: Vec<usize> = (0..b.pivots.len()).collect();
    loop {
        let before = (kept_a.len(), kept_b.len());
        kept_a.retain(|&r| mask.contains(a.pivots[r] as usize));
        kept_b.retain(|&r| mask.contains(b.pivots[r] as usize));
        if (kept_a.len(), kept_b.len()) == before {
            return kept_a.len().min(kept_b.len());
        }
        let mut sup = BitSet::new(mask.len());
        for &r in &kept_a {
            sup.union_with(&a.meta.row_supports[r]);
        }
        let mut sup_b = BitSet::new(mask.len());
        for &r in &kept_b {
            sup_b.union_with(&b.meta.row_supports[r]);
        }
        sup.intersect_with(&sup_b);
        mask.intersect_with(&sup);
    }
}

/// Builds a fragment from a generating set: enumerates all commuting subsets
/// of the generators, span-closes each, deduplicates, and closes under
/// pairwise intersections (and intersections with `distinguished` algebras,
/// when given) to a fixpoint.
pub fn build_fragment(
    ambient: &StarAlgebra,
    generators: &[ExactMatrix],
    bound: usize,
) -> Result<ContextFragment> {
    build_fragment_closed(ambient, generators, &[], bound)
}

pub fn build_fragment_closed(
    ambient: &StarAlgebra,
    generators: &[ExactMatrix],
    distinguished: &[StarAlgebra],
    bound: usize,
) -> Result<ContextFragment> {
    let d = ambient.ambient_dim();
    let mut gens: Vec<ExactMatrix> = Vec::new();
    for g in generators {
        if g.rows() != d || g.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "generator {}x{} for ambient {}",
                g.rows(),
                g.cols(),
                d
            )));
        }
        if !g.is_normal() {
            return Err(Error::NonNormalGenerator(format!(
                "generator #{} of the fragment",
                gens.len()
            )));
        }
        if !ambient.member(g)? {
            return Err(Error::InvalidInput("generator outside the ambient algebra".into()));
        }
        if !gens.contains(g) {
            gens.push(g.clone());
        }
    }
    for a in distinguished {
        if a.ambient_dim() != d {
            return Err(Error::AmbientMismatch("distinguished algebra".into()));
        }
    }

    let k = gens.len();
    let mut commute = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            commute[i][j] = gens[i].commutes_with(&gens[j])?;
        }
    }

    let mut contexts: Vec<StarAlgebra> = Vec::new();
    let mut seen: HashMap<RowSpan, usize> = HashMap::new();
    let mut push = |c: StarAlgebra, contexts: &mut Vec<StarAlgebra>| -> Option<usize> {
        if seen.contains_key(c.span()) {
            return None;
        }
        seen.insert(c.span().clone(), contexts.len());
        contexts.push(c);
        Some(contexts.len() - 1)
    };

    // all commuting subsets by ascending-index DFS (∅ first), carrying the
    // span closure along the tree: closure(S ∪ {g}) = closure(S) ∨ ⟨g⟩
    let singletons: Vec<StarAlgebra> =
        gens.iter().map(|g| span_close(std::slice::from_ref(g), d)).collect::<Result<_>>()?;
    let mut clique_count = 0usize;
    let mut stack: Vec<(Vec<usize>, StarAlgebra)> = vec![(vec![], StarAlgebra::scalars(d))];
    while let Some((s, algebra)) = stack.pop() {
        clique_count += 1;
        if clique_count > bound {
            return Err(Error::FragmentTooLarge { bound });
        }
        push(algebra.clone(), &mut contexts);
        if contexts.len() > bound {
            return Err(Error::FragmentTooLarge { bound });
        }
        let start = s.last().map_or(0, |m| m + 1);
        for next in (start..k).rev() {
            if s.iter().all(|i| commute[*i][next]) {
                let mut s2 = s.clone();
                s2.push(next);
                let extended = algebra.join(&singletons[next])?;
                stack.push((s2, extended));
            }
        }
    }

    // Closure under pairwise intersections (and distinguished
    // intersections), each unordered pair visited once. Most pairs are
    // settled without exact elimination: when the down-set of the pair in
    // the inclusion order has a greatest member m and the support-mask
    // bound already caps dim(Cᵢ ∩ Cⱼ) at dim(Cₘ), the meet is m.
    let up0 = inclusion_bitsets(&contexts, d)?;
    let n0 = contexts.len();
    let grow = |sets: &[BitSet], n: usize| -> Vec<BitSet> {
        sets.iter().map(|s| BitSet::from_indices(n, s.iter())).collect()
    };
    let mut up = grow(&up0, n0);
    let mut down: Vec<BitSet> = (0..n0)
        .map(|i| BitSet::from_indices(n0, (0..n0).filter(|&k| up[k].contains(i))))
        .collect();
    let mut meta: Vec<ContextMeta> = contexts.iter().map(ContextMeta::of).collect();

    let mut extend = |c: StarAlgebra,
                      contexts: &mut Vec<StarAlgebra>,
                      up: &mut Vec<BitSet>,
                      down: &mut Vec<BitSet>,
                      meta: &mut Vec<ContextMeta>|
     -> Result<Option<usize>> {
        let Some(idx) = push(c, contexts) else {
            return Ok(None);
        };
        let n = contexts.len();
        *up = grow(up, n);
        *down = grow(down, n);
        let mut my_up = BitSet::new(n);
        let mut my_down = BitSet::new(n);
        my_up.insert(idx);
        my_down.insert(idx);
        for j in 0..idx {
            if contexts[j].contains_algebra(&contexts[idx])? {
                my_up.insert(j);
                down[j].insert(idx);
            }
            if contexts[idx].contains_algebra(&contexts[j])? {
                my_down.insert(j);
                up[j].insert(idx);
            }
        }
        up.push(my_up);
        down.push(my_down);
        meta.push(ContextMeta::of(&contexts[idx]));
        Ok(Some(idx))
    };

    let mut frontier: Vec<usize> = (0..contexts.len()).collect();
    while !frontier.is_empty() {
        let mut fresh = Vec::new();
        for f in 0..frontier.len() {
            let i = frontier[f];
            for j in 0..i {
                // common lower bounds in the inclusion order
                let candidates = down[i].intersection(&down[j]);
                let greatest = candidates
                    .iter()
                    .find(|&m| candidates.iter().all(|k| up[k].contains(m)));
                if let Some(m) = greatest {
                    if meet_dim_upper_bound(&meta[i], &meta[j]) == contexts[m].dim() {
                        // Cₘ ⊆ Cᵢ ∩ Cⱼ and the bound pins the dimension:
                        // the meet is the member m
                        continue;
                    }
                }
                let meet_span = contexts[i].span().intersect_with_meta(
                    &meta[i].meta,
                    contexts[j].span(),
                    &meta[j].meta,
                );
                let meet = StarAlgebra::from_span_unchecked(d, meet_span);
                if let Some(idx) =
                    extend(meet, &mut contexts, &mut up, &mut down, &mut meta)?
                {
                    fresh.push(idx);
                }
                if contexts.len() > bound {
                    return Err(Error::FragmentTooLarge { bound });
                }
            }
            for a in distinguished {
                let meet = contexts[i].intersect(a)?;
                if let Some(idx) =
                    extend(meet, &mut contexts, &mut up, &mut down, &mut meta)?
                {
                    fresh.push(idx);
                }
            }
        }
        frontier = fresh;
    }

    assemble_fragment(ambient.clone(), contexts, gens)
}

/// The complete context poset of the diagonal algebra ℂⁿ: one context per
/// set partition of the n points, ordered by refinement-induced inclusion.
pub fn partition_contexts(n: u32) -> Result<ContextFragment> {
    if n == 0 || n > 8 {
        return Err(Error::SizeBound(format!("partition_contexts supports 1..=8, got {n}")));
    }
    let ambient_basis: Vec<ExactMatrix> = (0..n)
        .map(|i| {
            ExactMatrix::from_sparse(n, n, vec![(i * n + i, crate::scalar::ExactScalar::ONE)])
        })
        .collect();
    let ambient = StarAlgebra::from_basis(n, &ambient_basis)?;

    let mut contexts = Vec::new();
    for partition in set_partitions(n as usize) {
        let indicators: Vec<ExactMatrix> = partition
            .iter()
            .map(|block| {
                let entries = block
                    .iter()
                    .map(|i| ((*i as u32) * n + *i as u32, crate::scalar::ExactScalar::ONE))
                    .collect();
                ExactMatrix::from_sparse(n, n, entries)
            })
            .collect();
        contexts.push(StarAlgebra::from_basis(n, &indicators)?);
    }
    assemble_fragment(ambient, contexts, ambient_basis)
}

/// Set partitions of {0..n−1} via restricted growth strings, in
/// lexicographic order of the strings (the single-block partition first).
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().fold(Vec::<Vec<usize>>::new(), |mut acc, &b| {
            while acc.len() <= b {
                acc.push(vec![]);
            }
            acc
        });
        let mut blocks = blocks;
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(blocks);
        // next restricted growth string
        let mut i = n as i64 - 1;
        loop {
            if i <= 0 {
                return out;
            }
            let max_prefix = rgs[..i as usize].iter().max().copied().unwrap_or(0);
            if rgs[i as usize] <= max_prefix {
                rgs[i as usize] += 1;
                for j in (i as usize + 1)..n {
                    rgs[j] = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// The monotone restriction map C ↦ C ∩ A between fragments.
pub fn restriction_map(
    frag_b: &ContextFragment,
    a: &StarAlgebra,
    frag_a: &ContextFragment,
) -> Result<MonotoneMap> {
    let mut image = Vec::with_capacity(frag_b.len());
    for (i, c) in frag_b.contexts().iter().enumerate() {
        let meet = c.intersect(a)?;
        let target = frag_a.index_of(&meet).ok_or(Error::TargetNotClosed { context: i })?;
        image.push(target);
    }
    MonotoneMap::new(frag_b.order().clone(), frag_a.order().clone(), image)
        .map_err(|e| Error::Internal(format!("restriction map not monotone: {e}")))
}

/// Single-qubit Pauli generators {X, Y, Z}.
pub fn pauli_m2_generators() -> Vec<ExactMatrix> {
    vec![pauli_x(), pauli_y(), pauli_z()]
}

/// The nine two-qubit observables of the magic square: rows
/// (X⊗1, 1⊗X, X⊗X), (1⊗Y, Y⊗1, Y⊗Y), (X⊗Y, Y⊗X, Z⊗Z).
pub fn mermin_peres_generators() -> Vec<ExactMatrix> {
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let id = ExactMatrix::identity(2);
    vec![
        tensor_chain(&[x.clone(), id.clone()]),
        tensor_chain(&[id.clone(), x.clone()]),
        tensor_chain(&[x.clone(), x.clone()]),
        tensor_chain(&[id.clone(), y.clone()]),
        tensor_chain(&[y.clone(), id.clone()]),
        tensor_chain(&[y.clone(), y.clone()]),
        tensor_chain(&[x.clone(), y.clone()]),
        tensor_chain(&[y.clone(), x.clone()]),
        tensor_chain(&[z.clone(), z.clone()]),
    ]
}

pub fn pauli_m2_fragment() -> Result<ContextFragment> {
    build_fragment(&StarAlgebra::full(2), &pauli_m2_generators(), DEFAULT_FRAGMENT_BOUND)
}

pub fn mermin_peres_fragment() -> Result<ContextFragment> {
    build_fragment(&StarAlgebra::full(4), &mermin_peres_generators(), DEFAULT_FRAGMENT_BOUND)
}
