//! Shared helpers for the acceptance suite: a deterministic RNG, a naive
//! dense linear-algebra oracle independent of the span machinery, and a
//! catalog of small posets.

use bohrnet_core::matrix::ExactMatrix;
use bohrnet_core::poset::FinitePoset;
use bohrnet_core::scalar::{ExactScalar, Rational};

/// xorshift64*, deterministic across platforms.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// Dense linear independence test over the Gaussian rationals, independent
/// of the RowSpan implementation: textbook Gaussian elimination on a dense
/// matrix of flattened coordinates.
pub struct NaiveSpan {
    cols: usize,
    rows: Vec<Vec<ExactScalar>>,
}

impl NaiveSpan {
    pub fn new(cols: usize) -> Self {
        NaiveSpan { cols, rows: Vec::new() }
    }

    fn reduce(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        let mut v = v.to_vec();
        for row in &self.rows {
            let pivot = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if !v[pivot].is_zero() {
                let c = v[pivot].div(&row[pivot]);
                for k in 0..self.cols {
                    v[k] = v[k].sub(&c.mul(&row[k]));
                }
            }
        }
        v
    }

    /// Returns true when the vector enlarged the span.
    pub fn insert(&mut self, v: &[ExactScalar]) -> bool {
        let r = self.reduce(v);
        if r.iter().all(|x| x.is_zero()) {
            return false;
        }
        self.rows.push(r);
        true
    }

    pub fn contains(&self, v: &[ExactScalar]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Naive unital *-closure of a generating set, dense arithmetic throughout.
pub fn naive_star_closure(generators: &[ExactMatrix], d: u32) -> Vec<ExactMatrix> {
    let mut span = NaiveSpan::new((d * d) as usize);
    let mut members: Vec<ExactMatrix> = Vec::new();
    let push = |m: ExactMatrix, span: &mut NaiveSpan, members: &mut Vec<ExactMatrix>| {
        if span.insert(&m.to_dense()) {
            members.push(m);
        }
    };
    push(ExactMatrix::identity(d), &mut span, &mut members);
    for g in generators {
        push(g.clone(), &mut span, &mut members);
        push(g.adjoint(), &mut span, &mut members);
    }
    let mut k = 0;
    while k < members.len() {
        let snapshot = members.len();
        for i in 0..snapshot {
            let p = members[k].mul(&members[i]).unwrap();
            let q = members[i].mul(&members[k]).unwrap();
            push(p, &mut span, &mut members);
            push(q, &mut span, &mut members);
        }
        k += 1;
    }
    members
}

/// Same span of matrices, decided naively by mutual containment.
pub fn naive_same_span(a: &[ExactMatrix], b: &[ExactMatrix], d: u32) -> bool {
    let mut sa = NaiveSpan::new((d * d) as usize);
    for m in a {
        sa.insert(&m.to_dense());
    }
    let mut sb = NaiveSpan::new((d * d) as usize);
    for m in b {
        sb.insert(&m.to_dense());
    }
    sa.rank() == sb.rank()
        && b.iter().all(|m| sa.contains(&m.to_dense()))
        && a.iter().all(|m| sb.contains(&m.to_dense()))
}

/// A random exact Gaussian-rational matrix with small entries.
pub fn random_matrix(rng: &mut Rng, d: u32) -> ExactMatrix {
    let dense: Vec<ExactScalar> = (0..d * d)
        .map(|_| {
            let num = rng.below(7) as i64 - 3;
            let den = rng.below(3) as i64 + 1;
            let inum = rng.below(7) as i64 - 3;
            ExactScalar::new(Rational::new(num, den), Rational::new(inum, den))
        })
        .collect();
    ExactMatrix::from_dense(d, d, dense).unwrap()
}

/// All labeled posets on n elements (n small), via brute force over
/// antisymmetric relations closed under transitivity.
pub fn all_labeled_posets(n: usize) -> Vec<FinitePoset> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |b| a != *b).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let chosen: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, p)| *p)
            .collect();
        // quick transitivity+antisymmetry filter through the constructor;
        // only accept relations that are already transitively closed so each
        // poset appears exactly once
        if let Ok(p) = FinitePoset::new(n, |a, b| a == b || chosen.contains(&(a, b))) {
            out.push(p);
        }
    }
    out
}

/// A fixed generator set of named small posets (size ≤ 5, modest width).
pub fn poset_catalog() -> Vec<FinitePoset> {
    vec![
        FinitePoset::chain(1),
        FinitePoset::chain(2),
        FinitePoset::chain(3),
        FinitePoset::chain(4),
        FinitePoset::chain(5),
        FinitePoset::antichain(2),
        FinitePoset::antichain(3),
        // V: one bottom, two tops
        FinitePoset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap(),
        // Λ: two bottoms, one top
        FinitePoset::from_pairs(3, &[(0, 2), (1, 2)]).unwrap(),
        // diamond
        FinitePoset::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap(),
        // 2 × 2 grid plus a top
        FinitePoset::from_pairs(5, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]).unwrap(),
        // zigzag (fence) on 4
        FinitePoset::from_pairs(4, &[(0, 1), (2, 1), (2, 3)]).unwrap(),
    ]
}

/// All monotone maps P → Q as image vectors.
pub fn all_monotone_maps(p: &FinitePoset, q: &FinitePoset) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = (q.len() as u64).pow(p.len() as u32);
    for code in 0..total {
        let mut c = code;
        let image: Vec<usize> = (0..p.len())
            .map(|_| {
                let v = (c % q.len() as u64) as usize;
                c /= q.len() as u64;
                v
            })
            .collect();
        let monotone = (0..p.len()).all(|a| {
            p.up_set(a).iter().all(|b| q.le(image[a], image[b]))
        });
        if monotone {
            out.push(image);
        }
    }
    out
}
