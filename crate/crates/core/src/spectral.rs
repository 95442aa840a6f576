//! The spectral lattice of a finite-dimensional commutative algebra: the
//! Boolean lattice of sub-sums of its primitive idempotents, with the basic
//! opens d(a) carved out by strict positivity of character values.

use crate::algebra::{Character, StarAlgebra};
use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::scalar::Rational;

/// Lattice elements are bit masks over the atoms (so dim ≤ 64 contexts).
#[derive(Clone, Debug)]
pub struct SpectralLattice {
    context: StarAlgebra,
    atoms: Vec<Character>,
}

impl SpectralLattice {
    pub fn new(context: &StarAlgebra, hints: &[crate::scalar::ExactScalar]) -> Result<Self> {
        let atoms = context.primitive_idempotents(hints)?;
        if atoms.len() > 64 {
            return Err(Error::SizeBound("spectral lattice beyond 64 atoms".into()));
        }
        Ok(SpectralLattice { context: context.clone(), atoms })
    }

    pub fn atoms(&self) -> &[Character] {
        &self.atoms
    }

    pub fn context(&self) -> &StarAlgebra {
        &self.context
    }

    pub fn top(&self) -> u64 {
        if self.atoms.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms.len()) - 1
        }
    }

    pub fn bottom(&self) -> u64 {
        0
    }

    pub fn join(&self, a: u64, b: u64) -> u64 {
        a | b
    }

    pub fn meet(&self, a: u64, b: u64) -> u64 {
        a & b
    }

    pub fn leq(&self, a: u64, b: u64) -> bool {
        a & !b == 0
    }

    /// Number of lattice elements (2^atoms).
    pub fn size(&self) -> u128 {
        1u128 << self.atoms.len()
    }

    /// The element realized as a matrix: the sum of its atoms.
    pub fn element_matrix(&self, mask: u64) -> ExactMatrix {
        let d = self.context.ambient_dim();
        let mut m = ExactMatrix::zero(d, d);
        for (i, atom) in self.atoms.iter().enumerate() {
            if mask >> i & 1 == 1 {
                m = m.add(&atom.idempotent).expect("same shape");
            }
        }
        m
    }

    /// The basic open d(a): the atoms where the (real) character value of
    /// the self-adjoint element a is strictly positive.
    pub fn d_of(&self, a: &ExactMatrix) -> Result<u64> {
        if !a.is_self_adjoint() {
            return Err(Error::NotSelfAdjoint);
        }
        if !self.context.member(a)? {
            return Err(Error::InvalidInput("element outside the context".into()));
        }
        let mut mask = 0u64;
        for (i, atom) in self.atoms.iter().enumerate() {
            let v = atom.eval(&self.context, a)?;
            if !v.is_real() {
                return Err(Error::Internal("self-adjoint element with complex value".into()));
            }
            if v.re.is_positive() {
                mask |= 1 << i;
            }
        }
        Ok(mask)
    }

    /// Verifies the five defining relations of the basic opens on every pair
    /// from the test set: d(1) = ⊤, d(a) ∧ d(−a) = ⊥, d(−b²) = ⊥,
    /// d(a+b) ≤ d(a) ∨ d(b), d(ab) = (d(a)∧d(b)) ∨ (d(−a)∧d(−b)).
    pub fn verify_relations(&self, test_set: &[ExactMatrix]) -> Result<()> {
        let one = ExactMatrix::identity(self.context.ambient_dim());
        if self.d_of(&one)? != self.top() {
            return Err(Error::Internal("d(1) ≠ ⊤".into()));
        }
        for a in test_set {
            let na = a.scale(&crate::scalar::ExactScalar::from_int(-1));
            if self.meet(self.d_of(a)?, self.d_of(&na)?) != self.bottom() {
                return Err(Error::Internal("d(a) ∧ d(−a) ≠ ⊥".into()));
            }
            let neg_sq = a.mul(a)?.scale(&crate::scalar::ExactScalar::from_int(-1));
            if self.d_of(&neg_sq)? != self.bottom() {
                return Err(Error::Internal("d(−a²) ≠ ⊥".into()));
            }
            for b in test_set {
                let nb = b.scale(&crate::scalar::ExactScalar::from_int(-1));
                let sum = a.add(b)?;
                if !self.leq(self.d_of(&sum)?, self.join(self.d_of(a)?, self.d_of(b)?)) {
                    return Err(Error::Internal("d(a+b) ≰ d(a) ∨ d(b)".into()));
                }
                let prod = a.mul(b)?;
                let lhs = self.d_of(&prod)?;
                let rhs = self.join(
                    self.meet(self.d_of(a)?, self.d_of(b)?),
                    self.meet(self.d_of(&na)?, self.d_of(&nb)?),
                );
                if lhs != rhs {
                    return Err(Error::Internal("d(ab) relation fails".into()));
                }
            }
        }
        Ok(())
    }

    /// At finite dimension the covering relation "for all rational q > 0
    /// there is a finite U₀ ⊆ U with d(a − q) ≤ ⋁U₀" collapses to
    /// d(a) ≤ ⋁U. Checks the equivalence by quantifying q over the spectral
    /// gaps of a (one representative below each distinct positive value).
    pub fn covering_relation_collapses(&self, a: &ExactMatrix, u: &[u64]) -> Result<bool> {
        let union = u.iter().fold(0u64, |acc, m| acc | m);
        let collapse = self.leq(self.d_of(a)?, union);

        // distinct positive character values of a
        let mut positives: Vec<Rational> = Vec::new();
        for atom in &self.atoms {
            let v = atom.eval(&self.context, a)?;
            if v.re.is_positive() && !positives.contains(&v.re) {
                positives.push(v.re.clone());
            }
        }
        positives.sort();
        // representatives: half of the smallest positive, midpoints between
        // consecutive positives, and one above the largest
        let mut reps: Vec<Rational> = Vec::new();
        let half = Rational::new(1, 2);
        if let Some(first) = positives.first() {
            reps.push(first.mul(&half));
        }
        for w in positives.windows(2) {
            reps.push(w[0].add(&w[1]).mul(&half));
        }
        if let Some(last) = positives.last() {
            reps.push(last.add(&Rational::ONE));
        } else {
            reps.push(Rational::ONE);
        }

        let quantified = reps.iter().all(|q| {
            let shifted = a
                .sub(&ExactMatrix::identity(self.context.ambient_dim())
                    .scale(&crate::scalar::ExactScalar::from_rational(q.clone())))
                .expect("shape");
            let d_shift = self.d_of(&shifted).expect("self-adjoint shift");
            // finite U₀ ⊆ U may as well be all of U at finite size
            self.leq(d_shift, union)
        });
        Ok(collapse == quantified)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::span_close;
    use crate::matrix::{pauli_z, site_operator};
    use crate::scalar::ExactScalar;

    #[test]
    fn trivial_context_lattice() {
        let lat = SpectralLattice::new(&StarAlgebra::scalars(2), &[]).unwrap();
        assert_eq!(lat.size(), 2);
        let one = ExactMatrix::identity(2);
        assert_eq!(lat.d_of(&one).unwrap(), lat.top());
        assert_eq!(lat.d_of(&one.scale(&ExactScalar::from_int(-1))).unwrap(), lat.bottom());
        assert_eq!(lat.d_of(&ExactMatrix::zero(2, 2)).unwrap(), lat.bottom());
    }

    #[test]
    fn z_context_lattice() {
        let c = span_close(&[pauli_z()], 2).unwrap();
        let lat = SpectralLattice::new(&c, &[]).unwrap();
        assert_eq!(lat.size(), 4);
        let dz = lat.d_of(&pauli_z()).unwrap();
        assert_eq!(dz.count_ones(), 1);
        // d(Z) is the atom with value +1
        let atom_idx = dz.trailing_zeros() as usize;
        assert_eq!(
            lat.atoms()[atom_idx].eval(&c, &pauli_z()).unwrap(),
            ExactScalar::ONE
        );
        let tests = vec![
            ExactMatrix::identity(2),
            pauli_z(),
            pauli_z().scale(&ExactScalar::from_int(-1)),
            ExactMatrix::zero(2, 2),
        ];
        lat.verify_relations(&tests).unwrap();
    }

    #[test]
    fn relations_on_two_site_diagonal() {
        let z0 = site_operator(&pauli_z(), 0, 2);
        let z1 = site_operator(&pauli_z(), 1, 2);
        let c = span_close(&[z0.clone(), z1.clone()], 4).unwrap();
        let lat = SpectralLattice::new(&c, &[]).unwrap();
        assert_eq!(lat.size(), 16);
        let zz = z0.mul(&z1).unwrap();
        let tests = vec![
            ExactMatrix::identity(4),
            z0.clone(),
            z1.clone(),
            zz,
            z0.add(&z1).unwrap(),
            ExactMatrix::zero(4, 4),
        ];
        lat.verify_relations(&tests).unwrap();
    }

    #[test]
    fn covering_relation_collapse() {
        let c = span_close(&[pauli_z()], 2).unwrap();
        let lat = SpectralLattice::new(&c, &[]).unwrap();
        let subsets: Vec<u64> = (0..4).collect();
        for a in [pauli_z(), ExactMatrix::identity(2), ExactMatrix::zero(2, 2)] {
            for u1 in &subsets {
                for u2 in &subsets {
                    assert!(lat.covering_relation_collapses(&a, &[*u1, *u2]).unwrap());
                }
            }
        }
    }

    #[test]
    fn non_self_adjoint_rejected() {
        let c = span_close(&[pauli_z()], 2).unwrap();
        let lat = SpectralLattice::new(&c, &[]).unwrap();
        let iz = pauli_z().scale(&ExactScalar::i());
        assert!(matches!(lat.d_of(&iz), Err(Error::NotSelfAdjoint)));
    }
}
