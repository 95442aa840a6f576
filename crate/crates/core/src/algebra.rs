//! Unital *-closed subalgebras of d×d matrices, in canonical form.
//!
//! An algebra is represented by the reduced echelon span of its elements
//! under the row-major flattening of matrix coordinates, so equality of
//! algebras is plain structural equality. Closure under products is built
//! by a worklist: every vector that enlarges the span is multiplied against
//! all current representatives until the dimension stabilizes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ExactMatrix, SparseVec};
use crate::scalar::{ExactScalar, Rational};
use crate::span::{LinearSolver, RowSpan};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StarAlgebra {
    d: u32,
    span: RowSpan,
}

impl StarAlgebra {
    /// The scalars ℂ·1 inside d×d matrices.
    pub fn scalars(d: u32) -> StarAlgebra {
        span_close(&[], d).expect("scalar algebra")
    }

    /// The full matrix algebra M_d.
    pub fn full(d: u32) -> StarAlgebra {
        let mut span = RowSpan::new(d * d);
        for i in 0..d * d {
            span.insert(&vec![(i, ExactScalar::ONE)]);
        }
        StarAlgebra { d, span }
    }

    /// Wraps a span the caller guarantees to be unital and closed under
    /// products and adjoints (monomial constructions); `verify_closed`
    /// re-checks the guarantee and the test suite compares these against
    /// generic span closure.
    pub fn from_span_unchecked(d: u32, span: RowSpan) -> StarAlgebra {
        debug_assert_eq!(span.dim(), d * d);
        StarAlgebra { d, span }
    }

    pub fn ambient_dim(&self) -> u32 {
        self.d
    }

    /// Linear dimension of the algebra.
    pub fn dim(&self) -> usize {
        self.span.rank()
    }

    pub fn span(&self) -> &RowSpan {
        &self.span
    }

    pub fn basis_vec(&self, i: usize) -> &SparseVec {
        &self.span.rows()[i]
    }

    pub fn basis_matrix(&self, i: usize) -> ExactMatrix {
        ExactMatrix::from_sparse(self.d, self.d, self.span.rows()[i].clone())
    }

    pub fn basis_matrices(&self) -> Vec<ExactMatrix> {
        (0..self.dim()).map(|i| self.basis_matrix(i)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 1
    }

    /// Membership of a matrix in the linear span.
    pub fn member(&self, m: &ExactMatrix) -> Result<bool> {
        if m.rows() != self.d || m.cols() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "member: {}x{} in ambient {}",
                m.rows(),
                m.cols(),
                self.d
            )));
        }
        Ok(self.span.contains(m.entries()))
    }

    /// Expansion of a member in the canonical basis.
    pub fn coords_of(&self, m: &ExactMatrix) -> Option<Vec<ExactScalar>> {
        self.span.coords_of(m.entries())
    }

    pub fn contains_algebra(&self, other: &StarAlgebra) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(other.span.is_subspace_of(&self.span))
    }

    fn check_ambient(&self, other: &StarAlgebra) -> Result<()> {
        if self.d != other.d {
            return Err(Error::AmbientMismatch(format!("{} vs {}", self.d, other.d)));
        }
        Ok(())
    }

    /// Exact intersection; again a unital *-closed algebra.
    pub fn intersect(&self, other: &StarAlgebra) -> Result<StarAlgebra> {
        self.check_ambient(other)?;
        if self == other {
            return Ok(self.clone());
        }
        let span = self.span.intersect(&other.span);
        Ok(StarAlgebra { d: self.d, span })
    }

    /// Smallest subalgebra containing both: span closure of the union.
    /// Products within each (already closed) operand are skipped.
    pub fn join(&self, other: &StarAlgebra) -> Result<StarAlgebra> {
        self.check_ambient(other)?;
        if self.contains_algebra(other)? {
            return Ok(self.clone());
        }
        if other.contains_algebra(self)? {
            return Ok(other.clone());
        }
        let d = self.d;
        // when both operands are commutative and commute with each other,
        // so does the whole closure, and one multiplication order suffices
        let commuting =
            self.commutes(other)? && self.is_commutative() && other.is_commutative();
        let mut span = self.span.sum(&other.span);
        // representatives tagged by origin: 0 = left, 1 = right, 2 = new
        let mut reps: Vec<(SparseVec, u8)> = self
            .span
            .rows()
            .iter()
            .map(|r| (r.clone(), 0u8))
            .chain(other.span.rows().iter().map(|r| (r.clone(), 1u8)))
            .collect();
        let mut processed = 0;
        while processed < reps.len() {
            let k = processed;
            let (row_k, tag_k) = reps[k].clone();
            let mk = ExactMatrix::from_sparse(d, d, row_k);
            let len_now = reps.len();
            for j in 0..len_now {
                if commuting && j > k {
                    continue;
                }
                let (ref row_j, tag_j) = reps[j];
                // both inside the same closed operand: product already there
                if tag_k == tag_j && tag_k != 2 {
                    continue;
                }
                let mj = ExactMatrix::from_sparse(d, d, row_j.clone());
                let products = if commuting {
                    vec![mk.mul(&mj)?]
                } else {
                    vec![mk.mul(&mj)?, mj.mul(&mk)?]
                };
                for prod in products {
                    if span.insert(prod.entries()) {
                        reps.push((prod.into_entries(), 2));
                    }
                }
            }
            processed += 1;
            if span.rank() > (d * d) as usize {
                return Err(Error::Internal("join closure exceeded ambient dimension".into()));
            }
        }
        Ok(StarAlgebra { d, span })
    }

    /// Elementwise commutation test; `Some((i, j))` is the first pair of
    /// basis indices (lexicographic) that fails to commute.
    pub fn commutes_witness(&self, other: &StarAlgebra) -> Result<Option<(usize, usize)>> {
        self.check_ambient(other)?;
        for i in 0..self.dim() {
            let a = self.basis_matrix(i);
            for j in 0..other.dim() {
                let b = other.basis_matrix(j);
                if !a.commutes_with(&b)? {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    pub fn commutes(&self, other: &StarAlgebra) -> Result<bool> {
        Ok(self.commutes_witness(other)?.is_none())
    }

    pub fn is_commutative(&self) -> bool {
        self.commutes_witness(self).expect("same ambient").is_none()
    }

    /// Re-verifies the defining closure properties from scratch.
    pub fn verify_closed(&self) -> Result<()> {
        if !self.span.contains(ExactMatrix::identity(self.d).entries()) {
            return Err(Error::Internal("algebra does not contain the identity".into()));
        }
        for i in 0..self.dim() {
            let a = self.basis_matrix(i);
            if !self.span.contains(a.adjoint().entries()) {
                return Err(Error::Internal(format!("basis element {i} has adjoint outside")));
            }
            for j in 0..self.dim() {
                let p = a.mul(&self.basis_matrix(j))?;
                if !self.span.contains(p.entries()) {
                    return Err(Error::Internal(format!("product of basis {i},{j} outside")));
                }
            }
        }
        Ok(())
    }

    /// Decomposes a commutative algebra into its primitive idempotents and
    /// the characters they induce.
    pub fn primitive_idempotents(
        &self,
        eigenvalue_hints: &[ExactScalar],
    ) -> Result<Vec<Character>> {
        if !self.is_commutative() {
            return Err(Error::NotCommutative);
        }
        let mut candidates = default_eigenvalue_candidates();
        for h in eigenvalue_hints {
            if !candidates.contains(h) {
                candidates.push(h.clone());
            }
        }

        let mut blocks = vec![ExactMatrix::identity(self.d)];
        for bi in 0..self.dim() {
            let a = self.basis_matrix(bi);
            let mut next = Vec::with_capacity(blocks.len());
            for e in &blocks {
                next.extend(split_block(&a, e, &candidates, self.d)?);
            }
            blocks = next;
        }

        if blocks.len() != self.dim() {
            return Err(Error::Internal(format!(
                "expected {} primitive idempotents, found {}",
                self.dim(),
                blocks.len()
            )));
        }
        verify_idempotent_family(&blocks, self.d)?;

        let mut chars = Vec::with_capacity(blocks.len());
        for e in blocks {
            let mut values = Vec::with_capacity(self.dim());
            for bi in 0..self.dim() {
                let a = self.basis_matrix(bi);
                values.push(eigenvalue_on(&a, &e)?);
            }
            let ch = Character { idempotent: e, values };
            ch.verify(self)?;
            chars.push(ch);
        }
        Ok(chars)
    }

    /// Serializable basis listing.
    pub fn basis_dump(&self) -> Vec<ExactMatrix> {
        self.basis_matrices()
    }

    /// Rebuilds from a basis listing, re-echelonizing and re-verifying the
    /// closure properties (inputs may come from untrusted dumps).
    pub fn from_basis(d: u32, basis: &[ExactMatrix]) -> Result<StarAlgebra> {
        let mut span = RowSpan::new(d * d);
        span.insert(ExactMatrix::identity(d).entries());
        for m in basis {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch("basis entry shape".into()));
            }
            span.insert(m.entries());
        }
        let alg = StarAlgebra { d, span };
        alg.verify_closed()?;
        Ok(alg)
    }
}

fn default_eigenvalue_candidates() -> Vec<ExactScalar> {
    let i = ExactScalar::i();
    vec![
        ExactScalar::ZERO,
        ExactScalar::ONE,
        ExactScalar::from_int(-1),
        i.clone(),
        i.neg(),
        ExactScalar::from_int(2),
        ExactScalar::from_int(-2),
        ExactScalar::from_rational(Rational::new(1, 2)),
        ExactScalar::from_rational(Rational::new(-1, 2)),
    ]
}

/// Splits an idempotent block under the action of `a` into the spectral
/// idempotents of `a` restricted to that block.
fn split_block(
    a: &ExactMatrix,
    e: &ExactMatrix,
    candidates: &[ExactScalar],
    d: u32,
) -> Result<Vec<ExactMatrix>> {
    // minimal polynomial of a on the block: first dependence among e, ae, a²e, ...
    let max = d + 1;
    let mut solver = LinearSolver::new(d * d, max + 1);
    let mut power = e.clone();
    let mut coeffs = None;
    for _ in 0..=max {
        if let Some(c) = solver.insert_tracked(power.entries()) {
            coeffs = Some(c);
            break;
        }
        power = a.mul(&power)?;
    }
    let coeffs = coeffs.ok_or_else(|| Error::Internal("minimal polynomial not found".into()))?;
    // monic m(x) = x^k − Σ coeffs[i]·x^i
    let k = coeffs.len();
    let mut poly = vec![ExactScalar::ZERO; k + 1];
    poly[k] = ExactScalar::ONE;
    for (i, c) in coeffs.iter().enumerate() {
        poly[i] = c.neg();
    }

    let roots = split_roots(&poly, candidates).map_err(|residual| {
        Error::NotSplitOverGaussianRationals {
            element: format!("matrix with {} nonzero entries", a.entries().len()),
            residual_degree: residual,
        }
    })?;

    if roots.len() <= 1 {
        return Ok(vec![e.clone()]);
    }

    // Lagrange idempotents: e_t = Π_{s≠t} (a − λ_s)·e / (λ_t − λ_s)
    let mut out = Vec::with_capacity(roots.len());
    for (t, lt) in roots.iter().enumerate() {
        let mut f = e.clone();
        for (s, ls) in roots.iter().enumerate() {
            if s == t {
                continue;
            }
            let af = a.mul(&f)?;
            let num = af.sub(&f.scale(ls))?;
            f = num.scale(&lt.sub(ls).recip());
        }
        let f2 = f.mul(&f)?;
        if f2 != f || f.is_zero() {
            return Err(Error::Internal("spectral projector is not idempotent".into()));
        }
        out.push(f);
    }
    Ok(out)
}

/// Distinct roots of a monic polynomial drawn from the candidate list, in
/// candidate order; `Err(residual_degree)` when candidates do not exhaust it.
fn split_roots(
    poly: &[ExactScalar],
    candidates: &[ExactScalar],
) -> std::result::Result<Vec<ExactScalar>, usize> {
    let mut p = poly.to_vec();
    let mut roots = Vec::new();
    'outer: while p.len() > 1 {
        for cand in candidates {
            if eval_poly(&p, cand).is_zero() {
                p = deflate(&p, cand);
                if !roots.contains(cand) {
                    roots.push(cand.clone());
                }
                continue 'outer;
            }
        }
        return Err(p.len() - 1);
    }
    Ok(roots)
}

fn eval_poly(poly: &[ExactScalar], x: &ExactScalar) -> ExactScalar {
    let mut acc = ExactScalar::ZERO;
    for c in poly.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Synthetic division by (x − r); the remainder must vanish.
fn deflate(poly: &[ExactScalar], r: &ExactScalar) -> Vec<ExactScalar> {
    let n = poly.len() - 1;
    let mut out = vec![ExactScalar::ZERO; n];
    let mut carry = ExactScalar::ZERO;
    for i in (0..=n).rev() {
        let v = poly[i].add(&carry);
        if i == 0 {
            debug_assert!(v.is_zero(), "deflation by a non-root");
        } else {
            out[i - 1] = v.clone();
            carry = v.mul(r);
        }
    }
    out
}

fn verify_idempotent_family(blocks: &[ExactMatrix], d: u32) -> Result<()> {
    let mut sum = ExactMatrix::zero(d, d);
    for (i, e) in blocks.iter().enumerate() {
        if e.mul(e)? != *e {
            return Err(Error::Internal(format!("block {i} not idempotent")));
        }
        for (j, f) in blocks.iter().enumerate() {
            if i != j && !e.mul(f)?.is_zero() {
                return Err(Error::Internal(format!("blocks {i},{j} not orthogonal")));
            }
        }
        sum = sum.add(e)?;
    }
    if sum != ExactMatrix::identity(d) {
        return Err(Error::Internal("idempotents do not sum to the identity".into()));
    }
    Ok(())
}

/// The scalar λ with a·e = λ·e, if it exists.
fn eigenvalue_on(a: &ExactMatrix, e: &ExactMatrix) -> Result<ExactScalar> {
    let prod = a.mul(e)?;
    let (i0, v0) = &e.entries()[0];
    let lam = match prod.entries().binary_search_by_key(i0, |(i, _)| *i) {
        Ok(pos) => prod.entries()[pos].1.div(v0),
        Err(_) => ExactScalar::ZERO,
    };
    if prod != e.scale(&lam) {
        return Err(Error::Internal("element does not act as a scalar on the block".into()));
    }
    Ok(lam)
}

/// A character of a commutative algebra, realized by its primitive
/// idempotent together with the values on the canonical basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Character {
    pub idempotent: ExactMatrix,
    pub values: Vec<ExactScalar>,
}

impl Character {
    /// Evaluates φ on a member of the context.
    pub fn eval(&self, context: &StarAlgebra, m: &ExactMatrix) -> Result<ExactScalar> {
        let coords = context
            .coords_of(m)
            .ok_or_else(|| Error::InvalidInput("element outside the context".into()))?;
        let mut acc = ExactScalar::ZERO;
        for (c, v) in coords.iter().zip(&self.values) {
            acc = acc.add(&c.mul(v));
        }
        Ok(acc)
    }

    /// Re-verifies the character laws: e² = e, e ≠ 0, e* = e, a·e = φ(a)·e
    /// for every basis element, and φ(1) = 1.
    pub fn verify(&self, context: &StarAlgebra) -> Result<()> {
        let e = &self.idempotent;
        if e.is_zero() || e.mul(e)? != *e {
            return Err(Error::Internal("character idempotent invalid".into()));
        }
        if !e.is_self_adjoint() {
            return Err(Error::Internal("character idempotent not self-adjoint".into()));
        }
        for (bi, v) in self.values.iter().enumerate() {
            let a = context.basis_matrix(bi);
            if a.mul(e)? != e.scale(v) {
                return Err(Error::Internal(format!("character law fails on basis {bi}")));
            }
        }
        let one = self.eval(context, &ExactMatrix::identity(context.ambient_dim()))?;
        if !one.is_one() {
            return Err(Error::Internal("character is not unital".into()));
        }
        Ok(())
    }
}

/// The smallest unital *-closed subalgebra of M_d containing the generators.
pub fn span_close(generators: &[ExactMatrix], d: u32) -> Result<StarAlgebra> {
    for g in generators {
        if g.rows() != d || g.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "generator is {}x{} in ambient {}",
                g.rows(),
                g.cols(),
                d
            )));
        }
    }
    let mut seeds: Vec<SparseVec> = Vec::with_capacity(2 * generators.len() + 1);
    for g in generators {
        seeds.push(g.entries().clone());
        seeds.push(g.adjoint().into_entries());
    }
    close_from_vecs(d, seeds.iter())
}

/// Worklist closure from seed vectors (identity always included). When the
/// seeds pairwise commute, everything in the closure does, so products are
/// formed in one order only.
fn close_from_vecs<'a>(
    d: u32,
    seeds: impl Iterator<Item = &'a SparseVec>,
) -> Result<StarAlgebra> {
    let mut span = RowSpan::new(d * d);
    let mut reps: Vec<SparseVec> = Vec::new();
    let ident = ExactMatrix::identity(d);
    if span.insert(ident.entries()) {
        reps.push(ident.entries().clone());
    }
    for s in seeds {
        if span.insert(s) {
            reps.push(s.clone());
        }
    }
    let mats: Vec<ExactMatrix> =
        reps.iter().map(|r| ExactMatrix::from_sparse(d, d, r.clone())).collect();
    let mut commuting = true;
    'outer: for (a, ma) in mats.iter().enumerate() {
        for mb in mats.iter().take(a) {
            if !ma.commutes_with(mb)? {
                commuting = false;
                break 'outer;
            }
        }
    }
    let mut mats = mats;
    let mut processed = 0;
    while processed < mats.len() {
        let k = processed;
        let mk = mats[k].clone();
        let len_now = mats.len();
        for j in 0..len_now {
            if commuting && j > k {
                continue;
            }
            let mj = mats[j].clone();
            let products = if commuting {
                vec![mk.mul(&mj)?]
            } else {
                vec![mk.mul(&mj)?, mj.mul(&mk)?]
            };
            for prod in products {
                if span.insert(prod.entries()) {
                    mats.push(prod);
                }
            }
        }
        processed += 1;
        if span.rank() > (d * d) as usize {
            return Err(Error::Internal("span closure exceeded ambient dimension".into()));
        }
    }
    Ok(StarAlgebra { d, span })
}
