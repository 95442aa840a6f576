//! The descent analysis for a two-interval cover: builds one master context
//! fragment over the cover's total algebra, carves the sub-fragments of the
//! two legs and their overlap, forms the fibered product of the restriction
//! maps, and decides whether the comparison map admits a (full and faithful)
//! left adjoint — the order-theoretic content of locality and strong
//! locality. Ring-level descent (injectivity of the balanced tensor product
//! into each context) and coseparatedness (surjectivity onto the fibered
//! product) complete the report.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::StarAlgebra;
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::fragment::{build_fragment_closed, ContextFragment};
use crate::geometry::{Diamond, Interval};
use crate::matrix::{ExactMatrix, SparseVec};
use crate::net::Net;
use crate::poset::{
    fibered_product, is_order_embedding, left_adjoint, unit_is_identity, FiberedProduct,
    MonotoneMap,
};
use crate::span::RowSpan;

/// How a cover was named, for reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum CoverLabel {
    Intervals { k: Interval, i: Interval, j: Interval },
    BulkDiamond { diamond: Diamond, i: Interval, j: Interval },
}

pub struct CoverInstance {
    pub label: CoverLabel,
    pub total: StarAlgebra,
    pub leg_i: StarAlgebra,
    pub leg_j: StarAlgebra,
    pub overlap: StarAlgebra,
    pub master: Arc<ContextFragment>,
    /// Master indices of the contexts contained in each distinguished algebra.
    pub sub_i: Vec<usize>,
    pub sub_j: Vec<usize>,
    pub sub_0: Vec<usize>,
    /// Per master context: the master indices of its three intersections.
    restrict_i: Vec<usize>,
    restrict_j: Vec<usize>,
}

/// The classification of a cover per the descent verdict.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    StronglyLocalCover,
    LocalNotStrong,
    NonLocal,
}

pub fn classify(adjoint_exists: bool, unit_iso: bool) -> Classification {
    match (adjoint_exists, unit_iso) {
        (false, _) => Classification::NonLocal,
        (true, false) => Classification::LocalNotStrong,
        (true, true) => Classification::StronglyLocalCover,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum DescentWitness {
    /// A pair of fragment contexts with no commutative upper bound.
    NoUpperBound {
        left_context: Vec<ExactMatrix>,
        right_context: Vec<ExactMatrix>,
        non_commuting: Option<(ExactMatrix, ExactMatrix)>,
    },
    /// An upper set with several minimal elements and no least one.
    NoLeastUpperBound {
        left_context: Vec<ExactMatrix>,
        right_context: Vec<ExactMatrix>,
        minimal_dims: Vec<usize>,
    },
    /// r(∨(q)) ≠ q: the unit fails at this fibered-product element.
    UnitNotIdentity {
        left_context: Vec<ExactMatrix>,
        right_context: Vec<ExactMatrix>,
        image_left: Vec<ExactMatrix>,
        image_right: Vec<ExactMatrix>,
    },
    /// A matching pair not hit by any master context.
    NotCoseparated {
        left_context: Vec<ExactMatrix>,
        right_context: Vec<ExactMatrix>,
    },
    /// η_D not injective: tensor dimension exceeds the image dimension.
    RingDescent {
        context_dim: usize,
        tensor_dim: usize,
        image_dim: usize,
    },
}

impl DescentWitness {
    /// Re-runs the recorded violation through the algebra layer.
    pub fn replay(&self, d: u32) -> bool {
        match self {
            DescentWitness::NoUpperBound { non_commuting: Some((a, b)), .. } => {
                !a.commutes_with(b).unwrap_or(true)
            }
            DescentWitness::NoUpperBound { left_context, right_context, .. } => {
                // the join of the two contexts fails to be commutative
                let gens: Vec<ExactMatrix> =
                    left_context.iter().chain(right_context).cloned().collect();
                crate::algebra::span_close(&gens, d)
                    .map(|j| !j.is_commutative())
                    .unwrap_or(false)
            }
            DescentWitness::UnitNotIdentity {
                left_context,
                right_context,
                image_left,
                image_right,
            } => {
                // the images genuinely differ from the original pair
                let orig_l = StarAlgebra::from_basis(d, left_context);
                let img_l = StarAlgebra::from_basis(d, image_left);
                let orig_r = StarAlgebra::from_basis(d, right_context);
                let img_r = StarAlgebra::from_basis(d, image_right);
                match (orig_l, img_l, orig_r, img_r) {
                    (Ok(a), Ok(b), Ok(c), Ok(e)) => a != b || c != e,
                    _ => false,
                }
            }
            DescentWitness::RingDescent { tensor_dim, image_dim, .. } => {
                tensor_dim != image_dim
            }
            _ => true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingDescentResult {
    pub context: usize,
    pub context_dim: usize,
    pub leg_i_dim: usize,
    pub leg_j_dim: usize,
    pub overlap_dim: usize,
    pub tensor_dim: usize,
    pub image_dim: usize,
    pub injective: bool,
    /// dim·dim/dim of the legs over the overlap, when the division is exact
    /// (valid under freeness; used as a cross-check only).
    pub free_formula_dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DescentReport {
    pub label: CoverLabel,
    pub master_contexts: usize,
    pub fibered_product_size: usize,
    pub adjoint_exists: bool,
    pub adjoint_is_join: bool,
    pub adjoint_full_faithful: bool,
    pub unit_iso: bool,
    pub ring_descent_monic: bool,
    pub ring_details: Vec<RingDescentResult>,
    pub coseparated: bool,
    pub classification: Classification,
    pub witnesses: Vec<DescentWitness>,
    /// The generating set of the master fragment, for provenance.
    pub fragment_generators: usize,
}

/// Caches shared across covers: master fragments keyed by their generating
/// data, joins keyed by operand spans.
#[derive(Default)]
pub struct DescentEngine {
    fragment_cache: HashMap<FragmentKey, Arc<ContextFragment>>,
    join_cache: HashMap<(RowSpan, RowSpan), StarAlgebra>,
}

#[derive(PartialEq, Eq, Hash)]
struct FragmentKey {
    ambient: RowSpan,
    generators: Vec<ExactMatrix>,
    distinguished: Vec<RowSpan>,
}

impl DescentEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// The master fragment from the generators alone, shared across covers
    /// with the same generating set.
    fn base_fragment(
        &mut self,
        total: &StarAlgebra,
        generators: &[ExactMatrix],
        bound: usize,
    ) -> Result<Arc<ContextFragment>> {
        let key = FragmentKey {
            ambient: total.span().clone(),
            generators: generators.to_vec(),
            distinguished: Vec::new(),
        };
        if let Some(f) = self.fragment_cache.get(&key) {
            return Ok(f.clone());
        }
        let frag = Arc::new(build_fragment_closed(total, generators, &[], bound)?);
        self.fragment_cache.insert(key, frag.clone());
        Ok(frag)
    }

    /// A master fragment additionally closed under intersections with the
    /// cover's distinguished algebras (only needed when the base fragment
    /// is not already closed).
    fn closed_fragment(
        &mut self,
        total: &StarAlgebra,
        generators: &[ExactMatrix],
        distinguished: &[StarAlgebra],
        bound: usize,
    ) -> Result<Arc<ContextFragment>> {
        let key = FragmentKey {
            ambient: total.span().clone(),
            generators: generators.to_vec(),
            distinguished: distinguished.iter().map(|a| a.span().clone()).collect(),
        };
        if let Some(f) = self.fragment_cache.get(&key) {
            return Ok(f.clone());
        }
        let frag =
            Arc::new(build_fragment_closed(total, generators, distinguished, bound)?);
        self.fragment_cache.insert(key, frag.clone());
        Ok(frag)
    }

    fn join(&mut self, a: &StarAlgebra, b: &StarAlgebra) -> Result<StarAlgebra> {
        let key = (a.span().clone(), b.span().clone());
        if let Some(j) = self.join_cache.get(&key) {
            return Ok(j.clone());
        }
        let j = a.join(b)?;
        self.join_cache.insert(key, j.clone());
        Ok(j)
    }

    /// Builds the cover instance for K = I ∪ J on a net. Extra normal
    /// generators may enlarge the master fragment (e.g. to make a chosen
    /// context such as ⟨Z⊗Z⟩ available for ring descent).
    pub fn cover_from_net(
        &mut self,
        net: &Net,
        k: Interval,
        i: Interval,
        j: Interval,
        extra_generators: &[ExactMatrix],
        bound: usize,
    ) -> Result<CoverInstance> {
        if !k.is_covered_by(&i, &j) {
            return Err(Error::InvalidInput(format!("{i:?} ∪ {j:?} does not cover {k:?}")));
        }
        let total = net.algebra(&k).clone();
        let leg_i = net.algebra(&i).clone();
        let leg_j = net.algebra(&j).clone();
        let overlap = net.algebra(&i.intersect(&j)).clone();
        let mut generators: Vec<ExactMatrix> = Vec::new();
        for g in net.generators_of(&i).iter().chain(net.generators_of(&j)).chain(extra_generators)
        {
            if !generators.contains(g) {
                generators.push(g.clone());
            }
        }
        let label = CoverLabel::Intervals { k, i, j };
        self.assemble(label, total, leg_i, leg_j, overlap, generators, bound)
    }

    /// The boundary-net cover of a bulk diamond: legs are the boundary
    /// algebras of the two null projections, the overlap comes from the
    /// equalizer interval, and the total is A(I) ∨ A(J).
    pub fn boundary_cover(
        &mut self,
        boundary: &Net,
        diamond: Diamond,
        bound: usize,
    ) -> Result<CoverInstance> {
        let n = boundary.sites();
        if !crate::net::diamond_admissible(&diamond, n) {
            return Err(Error::OutOfBounds(format!(
                "diamond {diamond:?} has clipped projections on {n} sites"
            )));
        }
        let (i, j, meet) = diamond.null_projections(n)?;
        let sites: BTreeSet<u32> = i.sites().chain(j.sites()).collect();
        let total = boundary.union_algebra(&sites)?;
        let leg_i = boundary.algebra(&i).clone();
        let leg_j = boundary.algebra(&j).clone();
        let overlap = boundary.algebra(&meet).clone();
        let generators = boundary.union_generators(&sites);
        let label = CoverLabel::BulkDiamond { diamond, i, j };
        self.assemble(label, total, leg_i, leg_j, overlap, generators, bound)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        &mut self,
        label: CoverLabel,
        total: StarAlgebra,
        leg_i: StarAlgebra,
        leg_j: StarAlgebra,
        overlap: StarAlgebra,
        generators: Vec<ExactMatrix>,
        bound: usize,
    ) -> Result<CoverInstance> {
        let base = self.base_fragment(&total, &generators, bound)?;
        match Self::carve(&label, &total, &leg_i, &leg_j, &overlap, base) {
            Err(Error::TargetNotClosed { .. }) => {
                let distinguished = [leg_i.clone(), leg_j.clone(), overlap.clone()];
                let master =
                    self.closed_fragment(&total, &generators, &distinguished, bound)?;
                Self::carve(&label, &total, &leg_i, &leg_j, &overlap, master)
            }
            other => other,
        }
    }

    fn carve(
        label: &CoverLabel,
        total: &StarAlgebra,
        leg_i: &StarAlgebra,
        leg_j: &StarAlgebra,
        overlap: &StarAlgebra,
        master: Arc<ContextFragment>,
    ) -> Result<CoverInstance> {
        let n = master.len();
        let mut restrict_i = Vec::with_capacity(n);
        let mut restrict_j = Vec::with_capacity(n);
        let mut sub_i = Vec::new();
        let mut sub_j = Vec::new();
        let mut sub_0 = Vec::new();
        for (idx, c) in master.contexts().iter().enumerate() {
            let ci = c.intersect(leg_i)?;
            let cj = c.intersect(leg_j)?;
            let c0 = c.intersect(overlap)?;
            let pi = master.index_of(&ci).ok_or(Error::TargetNotClosed { context: idx })?;
            let pj = master.index_of(&cj).ok_or(Error::TargetNotClosed { context: idx })?;
            let p0 = master.index_of(&c0).ok_or(Error::TargetNotClosed { context: idx })?;
            restrict_i.push(pi);
            restrict_j.push(pj);
            if pi == idx {
                sub_i.push(idx);
            }
            if pj == idx {
                sub_j.push(idx);
            }
            if p0 == idx {
                sub_0.push(idx);
            }
        }
        Ok(CoverInstance {
            label: label.clone(),
            total: total.clone(),
            leg_i: leg_i.clone(),
            leg_j: leg_j.clone(),
            overlap: overlap.clone(),
            master,
            sub_i,
            sub_j,
            sub_0,
            restrict_i,
            restrict_j,
        })
    }

    /// The descent data: the fibered product of the two restriction maps
    /// and the comparison map r(C) = (C ∩ A(I), C ∩ A(J)) into it.
    pub fn build_descent(&mut self, cover: &CoverInstance) -> Result<DescentData> {
        let master_order = cover.master.order().clone();
        let sub_i_poset = Arc::new(master_order.induced(&cover.sub_i));
        let sub_j_poset = Arc::new(master_order.induced(&cover.sub_j));
        let sub_0_poset = Arc::new(master_order.induced(&cover.sub_0));

        let pos_in = |list: &[usize], x: usize| -> usize {
            list.iter().position(|y| *y == x).expect("restriction lands in the sub-fragment")
        };
        let res_i = MonotoneMap::new(
            sub_i_poset.clone(),
            sub_0_poset.clone(),
            cover
                .sub_i
                .iter()
                .map(|&c| {
                    let meet = cover.master.context(c).intersect(&cover.overlap)?;
                    Ok(pos_in(&cover.sub_0, cover.master.index_of(&meet).expect("closed")))
                })
                .collect::<Result<Vec<_>>>()?,
        )
        .map_err(|e| Error::Internal(format!("restriction to the overlap: {e}")))?;
        let res_j = MonotoneMap::new(
            sub_j_poset.clone(),
            sub_0_poset.clone(),
            cover
                .sub_j
                .iter()
                .map(|&c| {
                    let meet = cover.master.context(c).intersect(&cover.overlap)?;
                    Ok(pos_in(&cover.sub_0, cover.master.index_of(&meet).expect("closed")))
                })
                .collect::<Result<Vec<_>>>()?,
        )
        .map_err(|e| Error::Internal(format!("restriction to the overlap: {e}")))?;

        let fp = fibered_product(&res_i, &res_j)?;

        // r: master → FP, with the two legs agreeing on the overlap
        let mut image = Vec::with_capacity(cover.master.len());
        for c in 0..cover.master.len() {
            let pi = pos_in(&cover.sub_i, cover.restrict_i[c]);
            let pj = pos_in(&cover.sub_j, cover.restrict_j[c]);
            let q = fp
                .pairs
                .iter()
                .position(|p| *p == (pi, pj))
                .ok_or_else(|| Error::Internal("descent legs disagree on the overlap".into()))?;
            image.push(q);
        }
        let r = MonotoneMap::new(master_order, fp.poset.clone(), image)
            .map_err(|e| Error::Internal(format!("descent map not monotone: {e}")))?;

        Ok(DescentData { sub_i_poset, sub_j_poset, sub_0_poset, fp, r })
    }

    /// Full analysis of a cover.
    pub fn analyze(&mut self, cover: &CoverInstance) -> Result<DescentReport> {
        let data = self.build_descent(cover)?;
        let fp = &data.fp;
        let r = &data.r;
        let mut witnesses = Vec::new();

        let adjoint = left_adjoint(r);
        let adjoint_exists = adjoint.is_some();
        let mut adjoint_is_join = adjoint_exists;
        let mut unit_iso = false;
        let mut adjoint_full_faithful = false;

        match &adjoint {
            Some(l) => {
                // the adjoint must send each pair to the algebraic join
                for q in 0..fp.poset.len() {
                    let (pi, pj) = fp.pairs[q];
                    let c1 = cover.master.context(cover.sub_i[pi]);
                    let c2 = cover.master.context(cover.sub_j[pj]);
                    let join = self.join(c1, c2)?;
                    if cover.master.context(l.apply(q)) != &join {
                        adjoint_is_join = false;
                    }
                }
                unit_iso = unit_is_identity(r, l)?;
                adjoint_full_faithful = is_order_embedding(l);
                if !unit_iso {
                    // record the first failing element
                    for q in 0..fp.poset.len() {
                        if r.apply(l.apply(q)) != q {
                            let (pi, pj) = fp.pairs[q];
                            let (ipi, ipj) = fp.pairs[r.apply(l.apply(q))];
                            witnesses.push(DescentWitness::UnitNotIdentity {
                                left_context: cover
                                    .master
                                    .context(cover.sub_i[pi])
                                    .basis_dump(),
                                right_context: cover
                                    .master
                                    .context(cover.sub_j[pj])
                                    .basis_dump(),
                                image_left: cover
                                    .master
                                    .context(cover.sub_i[ipi])
                                    .basis_dump(),
                                image_right: cover
                                    .master
                                    .context(cover.sub_j[ipj])
                                    .basis_dump(),
                            });
                            break;
                        }
                    }
                }
            }
            None => {
                // find a witnessing pair: least upper bound missing
                'outer: for q in 0..fp.poset.len() {
                    let (pi, pj) = fp.pairs[q];
                    let ci = cover.sub_i[pi];
                    let cj = cover.sub_j[pj];
                    let candidates = BitSet::from_indices(
                        cover.master.len(),
                        (0..cover.master.len()).filter(|&p| {
                            cover.master.order().le(ci, p) && cover.master.order().le(cj, p)
                        }),
                    );
                    let c1 = cover.master.context(ci);
                    let c2 = cover.master.context(cj);
                    if candidates.is_empty() {
                        let non_commuting = first_non_commuting(c1, c2)?;
                        witnesses.push(DescentWitness::NoUpperBound {
                            left_context: c1.basis_dump(),
                            right_context: c2.basis_dump(),
                            non_commuting,
                        });
                        break 'outer;
                    }
                    if cover.master.order().least_of(&candidates).is_none() {
                        let minimal_dims = cover
                            .master
                            .order()
                            .minimal_elements(&candidates)
                            .iter()
                            .map(|&m| cover.master.context(m).dim())
                            .collect();
                        witnesses.push(DescentWitness::NoLeastUpperBound {
                            left_context: c1.basis_dump(),
                            right_context: c2.basis_dump(),
                            minimal_dims,
                        });
                        break 'outer;
                    }
                }
            }
        }

        // coseparatedness: r surjective onto the fibered product
        let mut hit = BitSet::new(fp.poset.len());
        for c in 0..cover.master.len() {
            hit.insert(r.apply(c));
        }
        let coseparated = hit.count() == fp.poset.len();
        if !coseparated {
            for q in 0..fp.poset.len() {
                if !hit.contains(q) {
                    let (pi, pj) = fp.pairs[q];
                    witnesses.push(DescentWitness::NotCoseparated {
                        left_context: cover.master.context(cover.sub_i[pi]).basis_dump(),
                        right_context: cover.master.context(cover.sub_j[pj]).basis_dump(),
                    });
                    break;
                }
            }
        }

        // ring descent on every master context
        let mut ring_details = Vec::with_capacity(cover.master.len());
        let mut ring_descent_monic = true;
        for c in 0..cover.master.len() {
            let detail = self.ring_descent(cover, c)?;
            if !detail.injective {
                ring_descent_monic = false;
                witnesses.push(DescentWitness::RingDescent {
                    context_dim: detail.context_dim,
                    tensor_dim: detail.tensor_dim,
                    image_dim: detail.image_dim,
                });
            }
            ring_details.push(detail);
        }

        let classification = classify(adjoint_exists, unit_iso);
        Ok(DescentReport {
            label: cover.label.clone(),
            master_contexts: cover.master.len(),
            fibered_product_size: fp.poset.len(),
            adjoint_exists,
            adjoint_is_join,
            adjoint_full_faithful,
            unit_iso,
            ring_descent_monic,
            ring_details,
            coseparated,
            classification,
            witnesses,
            fragment_generators: cover.master.provenance().len(),
        })
    }

    /// η_D: (D ∩ A(I)) ⊗_{D ∩ A(I∩J)} (D ∩ A(J)) → D. The balanced tensor
    /// product is the quotient of the plain tensor product by the relations
    /// x·c ⊗ y − x ⊗ c·y over basis triples; injectivity is decided by
    /// comparing its dimension with the dimension of the image span.
    pub fn ring_descent(&mut self, cover: &CoverInstance, d_idx: usize) -> Result<RingDescentResult> {
        let d_ctx = cover.master.context(d_idx);
        let c1 = cover.master.context(cover.restrict_i[d_idx]).clone();
        let c2 = cover.master.context(cover.restrict_j[d_idx]).clone();
        let c0 = d_ctx.intersect(&cover.overlap)?;

        let (n1, n2, n0) = (c1.dim(), c2.dim(), c0.dim());
        let plain = (n1 * n2) as u32;

        // degenerate legs: the balanced tensor product of a unital algebra
        // with itself over itself is the algebra (x ⊗ y = 1 ⊗ xy), and the
        // image span of products is the algebra too
        if c1 == c2 && c1.span() == c0.span() {
            return Ok(RingDescentResult {
                context: d_idx,
                context_dim: d_ctx.dim(),
                leg_i_dim: n1,
                leg_j_dim: n2,
                overlap_dim: n0,
                tensor_dim: n1,
                image_dim: n1,
                injective: true,
                free_formula_dim: Some(n1),
            });
        }

        // image span {b₁·b₂} inside D
        let mut image = RowSpan::new(d_ctx.ambient_dim() * d_ctx.ambient_dim());
        for x in 0..n1 {
            for y in 0..n2 {
                let prod = c1.basis_matrix(x).mul(&c2.basis_matrix(y))?;
                image.insert(prod.entries());
            }
        }
        let image_dim = image.rank();

        // relation span inside the plain tensor product; since η maps the
        // tensor product onto the image, tensor_dim ≥ image_dim always, so
        // the relation rank saturates at n1·n2 − image_dim and the sweep can
        // stop as soon as it gets there
        let saturation = n1 * n2 - image_dim;
        let mut relations = RowSpan::new(plain);
        'sweep: for c in 0..n0 {
            let cm = c0.basis_matrix(c);
            // expansion of x·c in c1's basis and c·y in c2's basis
            let left_mul: Vec<Vec<crate::scalar::ExactScalar>> = (0..n1)
                .map(|x| {
                    c1.coords_of(&c1.basis_matrix(x).mul(&cm)?)
                        .ok_or_else(|| Error::Internal("x·c escaped the left leg".into()))
                })
                .collect::<Result<_>>()?;
            let right_mul: Vec<Vec<crate::scalar::ExactScalar>> = (0..n2)
                .map(|y| {
                    c2.coords_of(&cm.mul(&c2.basis_matrix(y))?)
                        .ok_or_else(|| Error::Internal("c·y escaped the right leg".into()))
                })
                .collect::<Result<_>>()?;
            for x in 0..n1 {
                for y in 0..n2 {
                    let mut rel: SparseVec = Vec::new();
                    for (k, coef) in left_mul[x].iter().enumerate() {
                        if !coef.is_zero() {
                            rel.push(((k * n2 + y) as u32, coef.clone()));
                        }
                    }
                    for (l, coef) in right_mul[y].iter().enumerate() {
                        if !coef.is_zero() {
                            let idx = (x * n2 + l) as u32;
                            rel = crate::span::sub_scaled(
                                &rel,
                                &vec![(idx, crate::scalar::ExactScalar::ONE)],
                                coef,
                            );
                        }
                    }
                    relations.insert(&rel);
                    if relations.rank() == saturation {
                        break 'sweep;
                    }
                }
            }
        }
        let tensor_dim = n1 * n2 - relations.rank();

        // cross-check under freeness: n1·n2/n0 when it divides evenly
        let free_formula_dim =
            if n0 > 0 && (n1 * n2) % n0 == 0 { Some(n1 * n2 / n0) } else { None };

        Ok(RingDescentResult {
            context: d_idx,
            context_dim: d_ctx.dim(),
            leg_i_dim: n1,
            leg_j_dim: n2,
            overlap_dim: n0,
            tensor_dim,
            image_dim,
            injective: tensor_dim == image_dim,
            free_formula_dim,
        })
    }
}

fn first_non_commuting(
    c1: &StarAlgebra,
    c2: &StarAlgebra,
) -> Result<Option<(ExactMatrix, ExactMatrix)>> {
    Ok(c1
        .commutes_witness(c2)?
        .map(|(a, b)| (c1.basis_matrix(a), c2.basis_matrix(b))))
}

pub struct DescentData {
    pub sub_i_poset: Arc<crate::poset::FinitePoset>,
    pub sub_j_poset: Arc<crate::poset::FinitePoset>,
    pub sub_0_poset: Arc<crate::poset::FinitePoset>,
    pub fp: FiberedProduct,
    pub r: MonotoneMap,
}

/// Decides the spectral-side dimension of the balanced tensor product: the
/// number of pairs of characters of the two legs agreeing on the overlap.
/// For split semisimple commutative algebras this equals the tensor
/// dimension; the descent tests use it as an independent oracle.
pub fn character_pair_count(
    c1: &StarAlgebra,
    c2: &StarAlgebra,
    c0: &StarAlgebra,
) -> Result<usize> {
    let chars1 = c1.primitive_idempotents(&[])?;
    let chars2 = c2.primitive_idempotents(&[])?;
    let chars0 = c0.primitive_idempotents(&[])?;
    let restrict = |e_big: &ExactMatrix| -> Result<usize> {
        for (k, ch) in chars0.iter().enumerate() {
            if ch.idempotent.mul(e_big)? == *e_big {
                return Ok(k);
            }
        }
        Err(Error::Internal("no dominating character on the overlap".into()))
    };
    let mut count = 0;
    for a in &chars1 {
        let ra = restrict(&a.idempotent)?;
        for b in &chars2 {
            if ra == restrict(&b.idempotent)? {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::span_close;
    use crate::matrix::{pauli_z, site_operator};
    use crate::net::{broken_additivity_net, constant_net, majorana_chain, spin_chain};
    use crate::poset::right_adjoint;

    fn iv(lo: u32, hi: u32) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn degenerate_cover_is_strongly_local() {
        let net = spin_chain(2).unwrap();
        let mut eng = DescentEngine::new();
        let k = iv(0, 1);
        let cover = eng.cover_from_net(&net, k, k, k, &[], 10_000).unwrap();
        let report = eng.analyze(&cover).unwrap();
        assert!(report.adjoint_exists);
        assert!(report.unit_iso);
        assert_eq!(report.classification, Classification::StronglyLocalCover);
        assert!(report.coseparated);
        // degenerate cover: the fibered product is the diagonal
        assert_eq!(report.fibered_product_size, report.master_contexts);
    }

    #[test]
    fn spin_chain_disjoint_cover() {
        let net = spin_chain(2).unwrap();
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 1), iv(0, 0), iv(1, 1), &[], 10_000)
            .unwrap();
        // overlap is empty: the fibered product collapses to the plain product
        assert_eq!(cover.sub_0.len(), 1);
        let data = eng.build_descent(&cover).unwrap();
        assert_eq!(data.fp.poset.len(), cover.sub_i.len() * cover.sub_j.len());
        let report = eng.analyze(&cover).unwrap();
        assert!(report.adjoint_exists);
        assert!(report.adjoint_is_join);
        assert!(report.unit_iso);
        assert_eq!(report.unit_iso, report.adjoint_full_faithful);
        assert!(report.ring_descent_monic);
        assert!(report.coseparated);
        assert_eq!(report.classification, Classification::StronglyLocalCover);
    }

    #[test]
    fn spin_chain_overlapping_cover() {
        let net = spin_chain(3).unwrap();
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 2), iv(0, 1), iv(1, 2), &[], 10_000)
            .unwrap();
        let report = eng.analyze(&cover).unwrap();
        assert_eq!(report.classification, Classification::StronglyLocalCover);
        assert!(report.adjoint_is_join);
        assert!(report.ring_descent_monic);
        assert!(report.coseparated);
    }

    #[test]
    fn majorana_disjoint_cover_is_non_local() {
        let net = majorana_chain(2).unwrap();
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 1), iv(0, 0), iv(1, 1), &[], 10_000)
            .unwrap();
        let report = eng.analyze(&cover).unwrap();
        assert!(!report.adjoint_exists);
        assert_eq!(report.classification, Classification::NonLocal);
        // the witness replays: a genuinely non-commuting pair
        let w = report
            .witnesses
            .iter()
            .find(|w| matches!(w, DescentWitness::NoUpperBound { .. }))
            .expect("witness recorded");
        assert!(w.replay(4));
        // majorana covers are not coseparated either
        assert!(!report.coseparated);
    }

    #[test]
    fn constant_commutative_net_is_local_not_strong() {
        let z = span_close(&[pauli_z()], 2).unwrap();
        let net = constant_net(&z, 2).unwrap();
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 1), iv(0, 0), iv(1, 1), &[], 10_000)
            .unwrap();
        let report = eng.analyze(&cover).unwrap();
        assert!(report.adjoint_exists);
        assert!(!report.unit_iso);
        assert!(!report.adjoint_full_faithful);
        assert_eq!(report.classification, Classification::LocalNotStrong);
        // the unit failure is witnessed and coseparatedness fails too
        assert!(report
            .witnesses
            .iter()
            .any(|w| matches!(w, DescentWitness::UnitNotIdentity { .. })));
        assert!(!report.coseparated);
    }

    #[test]
    fn constant_noncommutative_net_is_non_local() {
        let net = constant_net(&StarAlgebra::full(2), 2).unwrap();
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 1), iv(0, 0), iv(1, 1), &[], 10_000)
            .unwrap();
        let report = eng.analyze(&cover).unwrap();
        assert_eq!(report.classification, Classification::NonLocal);
    }

    #[test]
    fn ring_descent_zz_context() {
        // D = ⟨Z⊗Z⟩ on the disjoint cover of the 2-site spin chain: legs are
        // trivial, the tensor product has dimension 1 < dim D = 2, so the
        // descent morphism is monic but not onto
        let net = spin_chain(2).unwrap();
        let zz = site_operator(&pauli_z(), 0, 2)
            .mul(&site_operator(&pauli_z(), 1, 2))
            .unwrap();
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 1), iv(0, 0), iv(1, 1), std::slice::from_ref(&zz), 10_000)
            .unwrap();
        let zz_ctx = span_close(&[zz], 4).unwrap();
        let d_idx = cover.master.index_of(&zz_ctx).expect("⟨Z⊗Z⟩ in the master fragment");
        let detail = eng.ring_descent(&cover, d_idx).unwrap();
        assert_eq!(detail.leg_i_dim, 1);
        assert_eq!(detail.leg_j_dim, 1);
        assert_eq!(detail.tensor_dim, 1);
        assert_eq!(detail.image_dim, 1);
        assert_eq!(detail.context_dim, 2);
        assert!(detail.injective);

        // D = ⟨Z⊗1, 1⊗Z⟩: legs ⟨Z⟩ and ⟨Z⟩, tensor dimension 4 = dim D
        let z0 = site_operator(&pauli_z(), 0, 2);
        let z1 = site_operator(&pauli_z(), 1, 2);
        let joint = span_close(&[z0, z1], 4).unwrap();
        let d_idx = cover.master.index_of(&joint).unwrap();
        let detail = eng.ring_descent(&cover, d_idx).unwrap();
        assert_eq!(detail.tensor_dim, 4);
        assert_eq!(detail.image_dim, 4);
        assert!(detail.injective);

        // trivial context: 1 = 1
        let detail = eng.ring_descent(&cover, cover.master.bottom()).unwrap();
        assert_eq!(detail.tensor_dim, 1);
        assert!(detail.injective);
    }

    #[test]
    fn tensor_dimension_matches_character_count() {
        // independent oracle: compatible character pairs
        let net = spin_chain(3).unwrap();
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 2), iv(0, 1), iv(1, 2), &[], 10_000)
            .unwrap();
        for d_idx in 0..cover.master.len() {
            let detail = eng.ring_descent(&cover, d_idx).unwrap();
            let c1 = cover.master.context(cover.restrict_i[d_idx]);
            let c2 = cover.master.context(cover.restrict_j[d_idx]);
            let c0 = cover
                .master
                .context(d_idx)
                .intersect(&cover.overlap)
                .unwrap();
            let oracle = character_pair_count(c1, c2, &c0).unwrap();
            assert_eq!(detail.tensor_dim, oracle, "context {d_idx}");
        }
    }

    #[test]
    fn broken_additivity_cover_fails_coseparatedness() {
        let net = broken_additivity_net().unwrap();
        assert!(net.check_local().holds);
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 2), iv(0, 1), iv(1, 2), &[], 10_000)
            .unwrap();
        let report = eng.analyze(&cover).unwrap();
        // the pair (⟨Z₁⟩, ⟨X₁⟩) has no commutative upper bound
        assert!(!report.adjoint_exists);
        assert_eq!(report.classification, Classification::NonLocal);
        assert!(!report.coseparated);
        assert!(report
            .witnesses
            .iter()
            .any(|w| matches!(w, DescentWitness::NotCoseparated { .. })));
    }

    #[test]
    fn boundary_descent_spin_chain() {
        let boundary = spin_chain(3).unwrap();
        let mut eng = DescentEngine::new();
        // boundary-row diamond: degenerate cover, trivially strong
        let d0 = Diamond::new(iv(1, 1), 0).unwrap();
        let cover = eng.boundary_cover(&boundary, d0, 10_000).unwrap();
        let report = eng.analyze(&cover).unwrap();
        assert_eq!(report.classification, Classification::StronglyLocalCover);

        // the point diamond at (1,1): disjoint single-site projections
        let d1 = Diamond::new(iv(1, 1), 1).unwrap();
        let cover = eng.boundary_cover(&boundary, d1, 10_000).unwrap();
        let report = eng.analyze(&cover).unwrap();
        assert_eq!(report.classification, Classification::StronglyLocalCover);
        assert!(report.ring_descent_monic);
    }

    #[test]
    fn boundary_descent_majorana_non_local() {
        let boundary = majorana_chain(3).unwrap();
        let mut eng = DescentEngine::new();
        let d1 = Diamond::new(iv(1, 1), 1).unwrap();
        let cover = eng.boundary_cover(&boundary, d1, 10_000).unwrap();
        let report = eng.analyze(&cover).unwrap();
        assert_eq!(report.classification, Classification::NonLocal);
    }

    #[test]
    fn additive_einstein_nets_decompose_over_interval_covers() {
        // A(K) = A(I∖J) ∨ A(I∩J) ∨ A(J∖I), the three parts pairwise
        // commuting with pairwise trivial intersections
        for n in [2u32, 3] {
            let net = spin_chain(n).unwrap();
            for (k, i, j) in net.all_covers() {
                let left = i.difference(&j).unwrap();
                let meet = i.intersect(&j);
                let right = j.difference(&i).unwrap();
                let parts: Vec<&StarAlgebra> =
                    [left, meet, right].iter().map(|iv| net.algebra(iv)).collect();
                let rebuilt = parts[0].join(parts[1]).unwrap().join(parts[2]).unwrap();
                assert_eq!(&rebuilt, net.algebra(&k), "decomposition of {k:?}");
                for a in 0..3 {
                    for b in 0..a {
                        assert!(parts[a].commutes(parts[b]).unwrap());
                        assert!(parts[a].intersect(parts[b]).unwrap().is_trivial());
                    }
                }
            }
        }
    }

    #[test]
    fn strongly_local_cover_lifts_to_presheaf_adjoint_triple() {
        // the poset-level shadow of the topos statement: over a strongly
        // local cover, the join map ∨ : FP → master induces a Kan triple
        // whose hom-set bijections hold on sampled presheaves and which is
        // fully faithful at both ends
        use crate::poset::left_adjoint;
        use crate::presheaf::{
            kan_extensions, natural_transformations, restrict_along, transpose_lan,
            transpose_lan_inverse, SetPresheaf, Variance,
        };
        let net = spin_chain(2).unwrap();
        let mut eng = DescentEngine::new();
        let cover = eng
            .cover_from_net(&net, iv(0, 1), iv(0, 0), iv(1, 1), &[], 10_000)
            .unwrap();
        let data = eng.build_descent(&cover).unwrap();
        let join_map = left_adjoint(&data.r).expect("strongly local cover");
        assert!(is_order_embedding(&join_map));

        // sampled presheaf over the fibered-product poset
        let fp = join_map.dom.clone();
        let mut fibers = vec![1usize; fp.len()];
        fibers[0] = 2;
        let mut actions = std::collections::HashMap::new();
        for x in 0..fp.len() {
            for y in fp.up_set(x).iter() {
                if y != x {
                    actions.insert((x, y), vec![0; fibers[x]]);
                }
            }
        }
        let f = SetPresheaf::new(fp, Variance::Covariant, fibers, actions).unwrap();
        let kan = kan_extensions(&f, &join_map).unwrap();
        // full faithfulness of Lan along an embedding: the canonical
        // insertion F(q) → (Lan F)(∨ q) is bijective fiberwise
        for q in 0..join_map.dom.len() {
            let img = join_map.apply(q);
            let pos = kan.lan_members[img].iter().position(|p| *p == q).unwrap();
            let mut classes: Vec<usize> =
                (0..f.fiber(q)).map(|v| kan.lan_classes[img][&(pos, v)]).collect();
            classes.sort_unstable();
            classes.dedup();
            assert_eq!(classes.len(), f.fiber(q));
            assert_eq!(kan.lan.fiber(img), f.fiber(q));
        }
        // hom-set bijection against a constant presheaf on the master poset
        let g = SetPresheaf::constant(join_map.cod.clone(), Variance::Covariant, 2);
        let lhs = natural_transformations(&kan.lan, &g);
        let rhs = natural_transformations(&f, &restrict_along(&g, &join_map).unwrap());
        assert_eq!(lhs.len(), rhs.len());
        for eta in &lhs {
            let t = transpose_lan(&kan, &f, &join_map, eta);
            assert!(rhs.contains(&t));
            assert_eq!(&transpose_lan_inverse(&kan, &g, &join_map, &t).unwrap(), eta);
        }
        // and both outer functors of the triple are embeddings together
        let h = right_adjoint(&data.r);
        if let Some(h) = h {
            assert_eq!(is_order_embedding(&join_map), is_order_embedding(&h));
        }
    }

    #[test]
    fn locality_checkers_agree_with_descent_on_builtins() {
        // Every two-interval cover classifies consistently with the net
        // checkers: local nets never classify non_local, and strong locality
        // matches strongly_local_cover on every cover.
        let mut eng = DescentEngine::new();
        for (net, strong) in [
            (spin_chain(2).unwrap(), true),
            (spin_chain(3).unwrap(), true),
            (majorana_chain(2).unwrap(), false),
        ] {
            let local = net.check_local().holds;
            let mut all_adjoint = true;
            let mut all_unit = true;
            for (k, i, j) in net.all_covers() {
                let cover = eng.cover_from_net(&net, k, i, j, &[], 10_000).unwrap();
                let report = eng.analyze(&cover).unwrap();
                all_adjoint &= report.adjoint_exists;
                all_unit &= report.unit_iso;
                assert_eq!(report.unit_iso, report.adjoint_full_faithful);
            }
            assert_eq!(all_adjoint, local, "adjoint existence ⟺ locality");
            assert_eq!(all_adjoint && all_unit, strong);
        }
    }
}
