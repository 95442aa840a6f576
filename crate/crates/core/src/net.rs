//! Nets of algebras over the intervals of a discrete spatial line, their
//! axiom checkers (isotony, locality, strong locality, Einstein causality,
//! additivity), Cauchy-row restriction of diamond-indexed nets, and the
//! trivial bulk net over a boundary.
//!
//! Built-in nets: the Pauli spin chain (Einstein causal), the Jordan–Wigner
//! Majorana chain (the non-local counterexample) and constant nets. Interval
//! algebras of the built-ins are constructed directly from their monomial
//! bases (products of generators), which agrees with the generic span
//! closure — an equality the test suite re-checks on small chains.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{span_close, StarAlgebra};
use crate::error::{Error, Result};
use crate::fragment::{build_fragment, ContextFragment};
use crate::geometry::{Diamond, Interval};
use crate::matrix::{pauli_x, pauli_y, pauli_z, site_operator, tensor_chain, ExactMatrix};
use crate::span::RowSpan;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum NetKind {
    SpinChain,
    MajoranaChain,
    Constant,
    Custom,
}

#[derive(Clone, Debug)]
pub struct Net {
    kind: NetKind,
    sites: u32,
    ambient: StarAlgebra,
    assignment: BTreeMap<Interval, StarAlgebra>,
    generators: BTreeMap<Interval, Vec<ExactMatrix>>,
}

impl Net {
    pub fn kind(&self) -> NetKind {
        self.kind
    }

    pub fn sites(&self) -> u32 {
        self.sites
    }

    pub fn ambient(&self) -> &StarAlgebra {
        &self.ambient
    }

    pub fn algebra(&self, i: &Interval) -> &StarAlgebra {
        &self.assignment[i]
    }

    pub fn generators_of(&self, i: &Interval) -> &[ExactMatrix] {
        &self.generators[i]
    }

    /// All intervals including the empty one, in canonical order.
    pub fn intervals(&self) -> Vec<Interval> {
        self.assignment.keys().copied().collect()
    }

    pub fn nonempty_intervals(&self) -> Vec<Interval> {
        self.assignment.keys().copied().filter(|i| !i.is_empty()).collect()
    }

    /// Pairs of disjoint (spacelike separated) intervals, lexicographic.
    pub fn disjoint_pairs(&self) -> Vec<(Interval, Interval)> {
        let ivs = self.nonempty_intervals();
        let mut out = Vec::new();
        for a in &ivs {
            for b in &ivs {
                if let (Some((_, ahi)), Some((blo, _))) = (a.bounds(), b.bounds()) {
                    if ahi < blo {
                        out.push((*a, *b));
                    }
                }
            }
        }
        out
    }

    /// Two-interval covers of k: pairs (i, j) with i starting at k's left
    /// end, j ending at k's right end, overlapping or abutting.
    pub fn covers_of(&self, k: &Interval) -> Vec<(Interval, Interval)> {
        let Some((klo, khi)) = k.bounds() else {
            return vec![];
        };
        let mut out = Vec::new();
        for c in klo..=khi {
            for d in klo..=khi {
                if d <= c + 1 {
                    let i = Interval::new(klo, c).expect("in range");
                    let j = Interval::new(d, khi).expect("in range");
                    if k.is_covered_by(&i, &j) {
                        out.push((i, j));
                    }
                }
            }
        }
        out
    }

    /// All (k, i, j) covers across the net.
    pub fn all_covers(&self) -> Vec<(Interval, Interval, Interval)> {
        let mut out = Vec::new();
        for k in self.nonempty_intervals() {
            for (i, j) in self.covers_of(&k) {
                out.push((k, i, j));
            }
        }
        out
    }

    /// Isotony: I ⊆ J implies A(I) ⊆ A(J), checked basis-for-basis.
    pub fn verify_isotony(&self) -> Result<()> {
        for (i, a) in &self.assignment {
            for (j, b) in &self.assignment {
                if j.contains(i) && !b.contains_algebra(a)? {
                    return Err(Error::Internal(format!("isotony fails: {i:?} ⊆ {j:?}")));
                }
            }
        }
        Ok(())
    }

    /// Per-interval context fragments from the net's generators.
    pub fn fragments(&self, bound: usize) -> Result<BTreeMap<Interval, Arc<ContextFragment>>> {
        let mut out = BTreeMap::new();
        for (i, a) in &self.assignment {
            let frag = build_fragment(a, &self.generators[i], bound)?;
            out.insert(*i, Arc::new(frag));
        }
        Ok(out)
    }

    /// Locality: spacelike separated interval algebras commute elementwise.
    pub fn check_local(&self) -> LocalityVerdict {
        for (i, j) in self.disjoint_pairs() {
            let (a, b) = (self.algebra(&i), self.algebra(&j));
            if let Some((bi, bj)) = a.commutes_witness(b).expect("same ambient") {
                return LocalityVerdict {
                    holds: false,
                    witness: Some(CommutationWitness {
                        left_interval: i,
                        right_interval: j,
                        left: a.basis_matrix(bi),
                        right: b.basis_matrix(bj),
                    }),
                };
            }
        }
        LocalityVerdict { holds: true, witness: None }
    }

    /// Strong locality over the supplied fragments: for disjoint (I, J) and
    /// contexts C₁ ⊆ A(I), C₂ ⊆ A(J), the join is commutative and restricts
    /// back onto each factor.
    pub fn check_strongly_local(
        &self,
        fragments: &BTreeMap<Interval, Arc<ContextFragment>>,
    ) -> Result<StrongLocalityVerdict> {
        let local = self.check_local();
        if !local.holds {
            let w = local.witness.expect("witness accompanies failure");
            return Err(Error::NotLocal(format!(
                "intervals {:?}, {:?} fail to commute",
                w.left_interval, w.right_interval
            )));
        }
        for (i, j) in self.disjoint_pairs() {
            let (fi, fj) = (&fragments[&i], &fragments[&j]);
            for c1 in fi.contexts() {
                for c2 in fj.contexts() {
                    let join = c1.join(c2)?;
                    if !join.is_commutative() {
                        return Ok(StrongLocalityVerdict {
                            holds: false,
                            witness: Some(StrongLocalityWitness {
                                left_interval: i,
                                right_interval: j,
                                left_context: c1.basis_dump(),
                                right_context: c2.basis_dump(),
                                failure: StrongLocalityFailure::JoinNotCommutative,
                            }),
                        });
                    }
                    let back1 = join.intersect(self.algebra(&i))?;
                    let back2 = join.intersect(self.algebra(&j))?;
                    if back1 != *c1 || back2 != *c2 {
                        return Ok(StrongLocalityVerdict {
                            holds: false,
                            witness: Some(StrongLocalityWitness {
                                left_interval: i,
                                right_interval: j,
                                left_context: c1.basis_dump(),
                                right_context: c2.basis_dump(),
                                failure: StrongLocalityFailure::RestrictionMismatch,
                            }),
                        });
                    }
                }
            }
        }
        Ok(StrongLocalityVerdict { holds: true, witness: None })
    }

    /// Einstein causality: disjoint algebras commute and their join has the
    /// dimension of the tensor product (so multiplication identifies the
    /// abstract tensor product with the join).
    pub fn check_einstein_causal(&self) -> EinsteinVerdict {
        for (i, j) in self.disjoint_pairs() {
            let (a, b) = (self.algebra(&i), self.algebra(&j));
            if let Some((bi, bj)) = a.commutes_witness(b).expect("same ambient") {
                return EinsteinVerdict {
                    holds: false,
                    witness: Some(EinsteinWitness::NonCommuting(CommutationWitness {
                        left_interval: i,
                        right_interval: j,
                        left: a.basis_matrix(bi),
                        right: b.basis_matrix(bj),
                    })),
                };
            }
            let join = a.join(b).expect("same ambient");
            if join.dim() != a.dim() * b.dim() {
                return EinsteinVerdict {
                    holds: false,
                    witness: Some(EinsteinWitness::DimensionDefect {
                        left_interval: i,
                        right_interval: j,
                        left_dim: a.dim(),
                        right_dim: b.dim(),
                        join_dim: join.dim(),
                    }),
                };
            }
        }
        EinsteinVerdict { holds: true, witness: None }
    }

    /// Additivity: for every interval K and two-interval cover K = I ∪ J,
    /// A(I) ∨ A(J) = A(K) by canonical basis equality.
    pub fn check_additive(&self) -> AdditivityVerdict {
        for (k, i, j) in self.all_covers() {
            let join = self.algebra(&i).join(self.algebra(&j)).expect("same ambient");
            if join != *self.algebra(&k) {
                return AdditivityVerdict {
                    holds: false,
                    witness: Some(AdditivityWitness {
                        k,
                        i,
                        j,
                        join_dim: join.dim(),
                        k_dim: self.algebra(&k).dim(),
                    }),
                };
            }
        }
        AdditivityVerdict { holds: true, witness: None }
    }

    /// The union-of-sites algebra, using the monomial fast path for the
    /// built-in chains and generic span closure otherwise.
    pub fn union_algebra(&self, sites: &BTreeSet<u32>) -> Result<StarAlgebra> {
        match self.kind {
            NetKind::SpinChain => Ok(pauli_sites_algebra(self.sites, sites)),
            NetKind::MajoranaChain => Ok(majorana_sites_algebra(self.sites, sites)),
            _ => {
                let mut gens: Vec<ExactMatrix> = Vec::new();
                for (iv, gs) in &self.generators {
                    if iv.sites().all(|x| sites.contains(&x)) {
                        for g in gs {
                            if !gens.contains(g) {
                                gens.push(g.clone());
                            }
                        }
                    }
                }
                span_close(&gens, self.ambient.ambient_dim())
            }
        }
    }

    /// Generators attached to any interval contained in the site set.
    pub fn union_generators(&self, sites: &BTreeSet<u32>) -> Vec<ExactMatrix> {
        let mut gens: Vec<ExactMatrix> = Vec::new();
        for (iv, gs) in &self.generators {
            if !iv.is_empty() && iv.sites().all(|x| sites.contains(&x)) {
                for g in gs {
                    if !gens.contains(g) {
                        gens.push(g.clone());
                    }
                }
            }
        }
        gens
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CommutationWitness {
    pub left_interval: Interval,
    pub right_interval: Interval,
    pub left: ExactMatrix,
    pub right: ExactMatrix,
}

impl CommutationWitness {
    /// Replays the witness: true when the violation reproduces.
    pub fn replay(&self) -> bool {
        !self.left.commutes_with(&self.right).unwrap_or(true)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalityVerdict {
    pub holds: bool,
    pub witness: Option<CommutationWitness>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum StrongLocalityFailure {
    JoinNotCommutative,
    RestrictionMismatch,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrongLocalityWitness {
    pub left_interval: Interval,
    pub right_interval: Interval,
    pub left_context: Vec<ExactMatrix>,
    pub right_context: Vec<ExactMatrix>,
    pub failure: StrongLocalityFailure,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrongLocalityVerdict {
    pub holds: bool,
    pub witness: Option<StrongLocalityWitness>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum EinsteinWitness {
    NonCommuting(CommutationWitness),
    DimensionDefect {
        left_interval: Interval,
        right_interval: Interval,
        left_dim: usize,
        right_dim: usize,
        join_dim: usize,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EinsteinVerdict {
    pub holds: bool,
    pub witness: Option<EinsteinWitness>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdditivityWitness {
    pub k: Interval,
    pub i: Interval,
    pub j: Interval,
    pub join_dim: usize,
    pub k_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdditivityVerdict {
    pub holds: bool,
    pub witness: Option<AdditivityWitness>,
}

/// Single-site Pauli operators on an n-site chain.
pub fn chain_paulis(site: u32, n: u32) -> [ExactMatrix; 3] {
    [
        site_operator(&pauli_x(), site, n),
        site_operator(&pauli_y(), site, n),
        site_operator(&pauli_z(), site, n),
    ]
}

/// Jordan–Wigner Majorana operators: c_{2i} = Z⊗…⊗Z⊗X⊗1⊗…,
/// c_{2i+1} = Z⊗…⊗Z⊗Y⊗1⊗….
pub fn majorana_operator(k: u32, n: u32) -> ExactMatrix {
    let site = k / 2;
    let head = if k.is_multiple_of(2) { pauli_x() } else { pauli_y() };
    let ops: Vec<ExactMatrix> = (0..n)
        .map(|s| {
            if s < site {
                pauli_z()
            } else if s == site {
                head.clone()
            } else {
                ExactMatrix::identity(2)
            }
        })
        .collect();
    tensor_chain(&ops)
}

/// Span of all Pauli strings supported on the given sites (identity on the
/// rest): the full matrix algebra on those tensor legs.
fn pauli_sites_algebra(n: u32, sites: &BTreeSet<u32>) -> StarAlgebra {
    let d = 1u32 << n;
    let mut span = RowSpan::new(d * d);
    let singles = [ExactMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
    let site_list: Vec<u32> = sites.iter().copied().collect();
    let strings = 4usize.pow(site_list.len() as u32);
    for code in 0..strings {
        let mut c = code;
        let ops: Vec<ExactMatrix> = (0..n)
            .map(|s| {
                if site_list.contains(&s) {
                    let pick = c % 4;
                    c /= 4;
                    singles[pick].clone()
                } else {
                    ExactMatrix::identity(2)
                }
            })
            .collect();
        span.insert(tensor_chain(&ops).entries());
    }
    StarAlgebra::from_span_unchecked(d, span)
}

/// Span of all ordered products of the Majorana operators attached to the
/// given sites.
fn majorana_sites_algebra(n: u32, sites: &BTreeSet<u32>) -> StarAlgebra {
    let d = 1u32 << n;
    let indices: Vec<u32> = sites.iter().flat_map(|s| [2 * s, 2 * s + 1]).collect();
    let mut span = RowSpan::new(d * d);
    span.insert(ExactMatrix::identity(d).entries());
    for mask in 0u32..(1 << indices.len()) {
        let mut m = ExactMatrix::identity(d);
        for (pos, k) in indices.iter().enumerate() {
            if mask >> pos & 1 == 1 {
                m = m.mul(&majorana_operator(*k, n)).expect("square");
            }
        }
        span.insert(m.entries());
    }
    StarAlgebra::from_span_unchecked(d, span)
}

fn interval_map<F>(
    sites: u32,
    mut make: F,
) -> (BTreeMap<Interval, StarAlgebra>, BTreeMap<Interval, Vec<ExactMatrix>>)
where
    F: FnMut(&Interval) -> (StarAlgebra, Vec<ExactMatrix>),
{
    let mut assignment = BTreeMap::new();
    let mut generators = BTreeMap::new();
    let mut all: Vec<Interval> = vec![Interval::Empty];
    for lo in 0..sites {
        for hi in lo..sites {
            all.push(Interval::new(lo, hi).expect("in range"));
        }
    }
    for iv in all {
        let (a, g) = make(&iv);
        assignment.insert(iv, a);
        generators.insert(iv, g);
    }
    (assignment, generators)
}

/// The Pauli spin chain on n sites: A([a,b]) is generated by the single-site
/// Paulis of sites a..=b. Einstein causal.
pub fn spin_chain(n: u32) -> Result<Net> {
    if n == 0 || n > 6 {
        return Err(Error::SizeBound(format!("spin_chain supports 1..=6 sites, got {n}")));
    }
    let d = 1u32 << n;
    let (assignment, generators) = interval_map(n, |iv| {
        let sites: BTreeSet<u32> = iv.sites().collect();
        let gens: Vec<ExactMatrix> =
            iv.sites().flat_map(|s| chain_paulis(s, n).into_iter()).collect();
        (pauli_sites_algebra(n, &sites), gens)
    });
    let ambient = assignment[&full_interval(n)].clone();
    debug_assert_eq!(ambient.dim(), (d * d) as usize);
    let net = Net { kind: NetKind::SpinChain, sites: n, ambient, assignment, generators };
    net.verify_isotony()?;
    Ok(net)
}

/// The Jordan–Wigner Majorana chain on n sites: A([a,b]) is generated by
/// the Majorana operators of sites a..=b. Not local.
pub fn majorana_chain(n: u32) -> Result<Net> {
    if n == 0 || n > 5 {
        return Err(Error::SizeBound(format!("majorana_chain supports 1..=5 sites, got {n}")));
    }
    let (assignment, generators) = interval_map(n, |iv| {
        let sites: BTreeSet<u32> = iv.sites().collect();
        let gens: Vec<ExactMatrix> = iv
            .sites()
            .flat_map(|s| [majorana_operator(2 * s, n), majorana_operator(2 * s + 1, n)])
            .collect();
        (majorana_sites_algebra(n, &sites), gens)
    });
    let ambient = assignment[&full_interval(n)].clone();
    let net = Net { kind: NetKind::MajoranaChain, sites: n, ambient, assignment, generators };
    net.verify_isotony()?;
    Ok(net)
}

/// A(I) = M for every nonempty I. Normal generators for fragment building
/// are derived from the Hermitian parts of M's basis.
pub fn constant_net(m: &StarAlgebra, n: u32) -> Result<Net> {
    if n == 0 || n > 8 {
        return Err(Error::SizeBound(format!("constant_net supports 1..=8 sites, got {n}")));
    }
    let gens = hermitian_generators(m);
    let scalars = StarAlgebra::scalars(m.ambient_dim());
    let (assignment, generators) = interval_map(n, |iv| {
        if iv.is_empty() {
            (scalars.clone(), vec![])
        } else {
            (m.clone(), gens.clone())
        }
    });
    let net = Net {
        kind: NetKind::Constant,
        sites: n,
        ambient: m.clone(),
        assignment,
        generators,
    };
    net.verify_isotony()?;
    Ok(net)
}

/// Self-adjoint generators spanning the same algebra: the Hermitian parts
/// b + b* and i(b* − b) of each basis element.
pub fn hermitian_generators(m: &StarAlgebra) -> Vec<ExactMatrix> {
    let ident = ExactMatrix::identity(m.ambient_dim());
    let mut out: Vec<ExactMatrix> = Vec::new();
    for b in m.basis_matrices() {
        let adj = b.adjoint();
        let re = b.add(&adj).expect("shape");
        let im = adj.sub(&b).expect("shape").scale(&crate::scalar::ExactScalar::i());
        for g in [re, im] {
            if g.is_zero() || g == ident || out.contains(&g) {
                continue;
            }
            debug_assert!(g.is_self_adjoint());
            out.push(g);
        }
    }
    out
}

/// A custom net from explicit per-interval generator lists. Unlisted
/// intervals inherit the union of the generators of their listed
/// subintervals, so isotony holds by construction (and is still verified).
pub fn custom_net(
    sites: u32,
    ambient_dim: u32,
    listed: &[(Interval, Vec<ExactMatrix>)],
) -> Result<Net> {
    if sites == 0 || sites > 8 {
        return Err(Error::SizeBound(format!("custom net supports 1..=8 sites, got {sites}")));
    }
    for (iv, gens) in listed {
        if let Some((_, hi)) = iv.bounds() {
            if hi >= sites {
                return Err(Error::OutOfBounds(format!("interval {iv:?} on {sites} sites")));
            }
        }
        for g in gens {
            if g.rows() != ambient_dim || g.cols() != ambient_dim {
                return Err(Error::DimensionMismatch("custom generator shape".into()));
            }
        }
    }
    let (assignment, generators) = {
        let mut assignment = BTreeMap::new();
        let mut generators = BTreeMap::new();
        let mut all: Vec<Interval> = vec![Interval::Empty];
        for lo in 0..sites {
            for hi in lo..sites {
                all.push(Interval::new(lo, hi)?);
            }
        }
        for iv in all {
            let mut gens: Vec<ExactMatrix> = Vec::new();
            for (liv, lgens) in listed {
                if iv.contains(liv) && !liv.is_empty() {
                    for g in lgens {
                        if !gens.contains(g) {
                            gens.push(g.clone());
                        }
                    }
                }
            }
            let a = span_close(&gens, ambient_dim)?;
            assignment.insert(iv, a);
            generators.insert(iv, gens);
        }
        (assignment, generators)
    };
    let ambient = assignment[&full_interval(sites)].clone();
    let net =
        Net { kind: NetKind::Custom, sites, ambient, assignment, generators };
    net.verify_isotony()?;
    Ok(net)
}

/// A local but not additive net: A([0,1]) = ⟨Z₀, Z₁⟩ and A([1,2]) = ⟨X₁, Z₂⟩
/// with A([1,1]) trivial. All disjoint interval pairs commute, yet the cover
/// ([0,1], [1,2]) of [0,2] admits no join of the contexts ⟨Z₁⟩ and ⟨X₁⟩, so
/// descent fails and the restriction map is not surjective onto the
/// fibered product.
pub fn broken_additivity_net() -> Result<Net> {
    let n = 3u32;
    let z0 = site_operator(&pauli_z(), 0, n);
    let z1 = site_operator(&pauli_z(), 1, n);
    let x1 = site_operator(&pauli_x(), 1, n);
    let z2 = site_operator(&pauli_z(), 2, n);
    custom_net(
        n,
        1 << n,
        &[
            (Interval::new(0, 0)?, vec![z0.clone()]),
            (Interval::new(2, 2)?, vec![z2.clone()]),
            (Interval::new(0, 1)?, vec![z0, z1]),
            (Interval::new(1, 2)?, vec![x1, z2]),
        ],
    )
}

pub fn full_interval(sites: u32) -> Interval {
    Interval::new(0, sites - 1).expect("nonempty line")
}

/// A net indexed by abstract diamonds (axis interval + axis row).
#[derive(Clone, Debug)]
pub struct DiamondNet {
    pub sites: u32,
    pub height: u32,
    ambient: StarAlgebra,
    assignment: BTreeMap<Diamond, StarAlgebra>,
    generators: BTreeMap<Diamond, Vec<ExactMatrix>>,
}

impl DiamondNet {
    pub fn ambient(&self) -> &StarAlgebra {
        &self.ambient
    }

    pub fn diamonds(&self) -> Vec<Diamond> {
        self.assignment.keys().copied().collect()
    }

    pub fn algebra(&self, d: &Diamond) -> Option<&StarAlgebra> {
        self.assignment.get(d)
    }

    pub fn generators_of(&self, d: &Diamond) -> Option<&Vec<ExactMatrix>> {
        self.generators.get(d)
    }
}

/// Is the diamond's causal shadow entirely on the n-site boundary line?
/// Edge diamonds whose null projections would clamp off the line are not
/// indexed: clamping would assign overlapping boundary algebras to
/// spacelike-separated bulk points, an artifact of the finite line.
pub fn diamond_admissible(d: &Diamond, n: u32) -> bool {
    match d.axis.bounds() {
        None => false,
        Some((lo, hi)) => lo >= d.row && hi + d.row < n,
    }
}

/// The trivial bulk net over a boundary net: A⁺(O) = A(I) ∨ A(J) for the
/// null projections (I, J) of the diamond O, indexed over the admissible
/// diamonds with axis rows 0..height.
pub fn trivial_bulk_net(boundary: &Net, height: u32) -> Result<DiamondNet> {
    if height == 0 {
        return Err(Error::SizeBound("bulk net needs height ≥ 1".into()));
    }
    let n = boundary.sites();
    let mut assignment = BTreeMap::new();
    let mut generators = BTreeMap::new();
    for row in 0..height {
        for lo in 0..n {
            for hi in lo..n {
                let diamond = Diamond::new(Interval::new(lo, hi)?, row)?;
                if !diamond_admissible(&diamond, n) {
                    continue;
                }
                let (i, j, _) = diamond.null_projections(n)?;
                let sites: BTreeSet<u32> = i.sites().chain(j.sites()).collect();
                let algebra = boundary.union_algebra(&sites)?;
                let gens = boundary.union_generators(&sites);
                assignment.insert(diamond, algebra);
                generators.insert(diamond, gens);
            }
        }
    }
    Ok(DiamondNet {
        sites: n,
        height,
        ambient: boundary.ambient().clone(),
        assignment,
        generators,
    })
}

/// Restriction of a diamond-indexed net to a Cauchy row. The causal
/// development shrinks with the row: the restriction lives on the
/// n − 2·row sites whose diamonds at that row are admissible, reindexed
/// from zero. A|(I) = A(diamond with axis I at the row), the diamond being
/// the double causal complement of the interval embedded at that row.
pub fn restrict_to_cauchy(net2d: &DiamondNet, row: u32) -> Result<Net> {
    if row >= net2d.height {
        return Err(Error::OutOfBounds(format!(
            "row {row} outside bulk height {}",
            net2d.height
        )));
    }
    let n = net2d.sites;
    if n <= 2 * row {
        return Err(Error::OutOfBounds(format!(
            "row {row} has an empty causal development on {n} sites"
        )));
    }
    let m = n - 2 * row;
    let mut assignment = BTreeMap::new();
    let mut generators = BTreeMap::new();
    assignment.insert(Interval::Empty, StarAlgebra::scalars(net2d.ambient.ambient_dim()));
    generators.insert(Interval::Empty, vec![]);
    for lo in 0..m {
        for hi in lo..m {
            let iv = Interval::new(lo, hi)?;
            let diamond = Diamond::new(Interval::new(lo + row, hi + row)?, row)?;
            let a = net2d
                .algebra(&diamond)
                .ok_or_else(|| Error::InvalidInput(format!("bulk net lacks {diamond:?}")))?;
            assignment.insert(iv, a.clone());
            generators.insert(iv, net2d.generators_of(&diamond).cloned().unwrap_or_default());
        }
    }
    let ambient = net2d.ambient.clone();
    let net = Net { kind: NetKind::Custom, sites: m, ambient, assignment, generators };
    net.verify_isotony()?;
    Ok(net)
}
