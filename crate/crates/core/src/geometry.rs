//! Discrete 1+1-dimensional causal geometry: intervals on a spatial line,
//! grid regions with causal complements, diamonds over a Cauchy row, and the
//! null projections used by boundary nets.
//!
//! Two grid points are spacelike separated when |Δx| > |Δt|; lightlike
//! coincidence counts as causally related. The causal complement drops the
//! interior operation of the continuum definition: on a discrete grid the
//! pointwise-spacelike set already satisfies the Galois law O ⊆ O″.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval of sites on an N-site line, or the empty interval.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Interval {
    Empty,
    Span { lo: u32, hi: u32 },
}

impl Interval {
    pub fn new(lo: u32, hi: u32) -> Result<Interval> {
        if lo > hi {
            return Err(Error::OutOfBounds(format!("interval [{lo},{hi}]")));
        }
        Ok(Interval::Span { lo, hi })
    }

    /// Like `new`, but clamps to `[0, n)` and returns Empty when the clamp
    /// leaves nothing (used by null projections of clipped diamonds).
    pub fn clamped(lo: i64, hi: i64, n: u32) -> Interval {
        let lo = lo.max(0);
        let hi = hi.min(n as i64 - 1);
        if lo > hi {
            Interval::Empty
        } else {
            Interval::Span { lo: lo as u32, hi: hi as u32 }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Interval::Empty)
    }

    pub fn bounds(&self) -> Option<(u32, u32)> {
        match self {
            Interval::Empty => None,
            Interval::Span { lo, hi } => Some((*lo, *hi)),
        }
    }

    pub fn len(&self) -> u32 {
        match self {
            Interval::Empty => 0,
            Interval::Span { lo, hi } => hi - lo + 1,
        }
    }

    pub fn contains_site(&self, x: u32) -> bool {
        match self {
            Interval::Empty => false,
            Interval::Span { lo, hi } => *lo <= x && x <= *hi,
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = u32> {
        let (lo, hi) = match self {
            Interval::Empty => (1, 0),
            Interval::Span { lo, hi } => (*lo, *hi + 1),
        };
        lo..hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        match (self.bounds(), other.bounds()) {
            (Some((a, b)), Some((c, d))) => {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    Interval::Span { lo, hi }
                } else {
                    Interval::Empty
                }
            }
            _ => Interval::Empty,
        }
    }

    pub fn contains(&self, other: &Interval) -> bool {
        match (other.bounds(), self.bounds()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((c, d)), Some((a, b))) => a <= c && d <= b,
        }
    }

    /// No shared site. Abutting closed intervals that share an endpoint site
    /// are NOT disjoint.
    pub fn is_disjoint_from(&self, other: &Interval) -> bool {
        self.intersect(other).is_empty()
    }

    /// Do the two intervals cover this one, site for site, with a contiguous
    /// union?
    pub fn is_covered_by(&self, i: &Interval, j: &Interval) -> bool {
        let mine: BTreeSet<u32> = self.sites().collect();
        let theirs: BTreeSet<u32> = i.sites().chain(j.sites()).collect();
        mine == theirs
    }

    /// Set difference as plain removal of sites; the result must again be an
    /// interval (true whenever `other` covers a prefix or suffix).
    pub fn difference(&self, other: &Interval) -> Result<Interval> {
        let remaining: Vec<u32> = self.sites().filter(|x| !other.contains_site(*x)).collect();
        if remaining.is_empty() {
            return Ok(Interval::Empty);
        }
        let (lo, hi) = (remaining[0], *remaining.last().expect("nonempty"));
        if (hi - lo + 1) as usize != remaining.len() {
            return Err(Error::OutOfBounds("difference is not contiguous".into()));
        }
        Interval::new(lo, hi)
    }
}

pub fn spacelike(p: (u32, u32), q: (u32, u32)) -> bool {
    let dx = (p.0 as i64 - q.0 as i64).abs();
    let dt = (p.1 as i64 - q.1 as i64).abs();
    dx > dt
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GridShape {
    pub width: u32,
    pub height: u32,
}

/// A set of points (x, t) on a bounded grid.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GridRegion {
    pub shape: GridShape,
    points: BTreeSet<(u32, u32)>,
}

impl GridRegion {
    pub fn empty(shape: GridShape) -> Self {
        GridRegion { shape, points: BTreeSet::new() }
    }

    pub fn full(shape: GridShape) -> Self {
        let points = (0..shape.width)
            .flat_map(|x| (0..shape.height).map(move |t| (x, t)))
            .collect();
        GridRegion { shape, points }
    }

    pub fn from_points(shape: GridShape, pts: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let points: BTreeSet<(u32, u32)> = pts.into_iter().collect();
        for (x, t) in &points {
            if *x >= shape.width || *t >= shape.height {
                return Err(Error::OutOfBounds(format!("point ({x},{t})")));
            }
        }
        Ok(GridRegion { shape, points })
    }

    pub fn points(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.points.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: (u32, u32)) -> bool {
        self.points.contains(&p)
    }

    pub fn is_subset_of(&self, other: &GridRegion) -> bool {
        self.points.is_subset(&other.points)
    }

    /// All grid points spacelike separated from every point of the region.
    pub fn causal_complement(&self) -> GridRegion {
        let pts = (0..self.shape.width)
            .flat_map(|x| (0..self.shape.height).map(move |t| (x, t)))
            .filter(|p| self.points.iter().all(|q| spacelike(*p, *q)));
        GridRegion { shape: self.shape, points: pts.collect() }
    }

    pub fn double_complement(&self) -> GridRegion {
        self.causal_complement().causal_complement()
    }

    pub fn is_causally_complete(&self) -> bool {
        self.double_complement() == *self
    }

    /// 4-neighbor connectedness (vacuously true for the empty region).
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.points.iter().next().copied() else {
            return true;
        };
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some((x, t)) = stack.pop() {
            let mut push = |p: (u32, u32)| {
                if self.points.contains(&p) && seen.insert(p) {
                    stack.push(p);
                }
            };
            if x > 0 {
                push((x - 1, t));
            }
            push((x + 1, t));
            if t > 0 {
                push((x, t - 1));
            }
            push((x, t + 1));
        }
        seen.len() == self.points.len()
    }

    /// ASCII rendering, boundary row at the bottom.
    pub fn to_ascii(&self) -> String {
        let mut s = String::new();
        for t in (0..self.shape.height).rev() {
            for x in 0..self.shape.width {
                s.push(if self.contains((x, t)) { '#' } else { '.' });
            }
            let _ = writeln!(s);
        }
        s
    }
}

/// A causal diamond given abstractly by its spacelike axis and axis row.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Diamond {
    pub axis: Interval,
    pub row: u32,
}

impl Diamond {
    pub fn new(axis: Interval, row: u32) -> Result<Diamond> {
        if axis.is_empty() {
            return Err(Error::OutOfBounds("diamond with empty axis".into()));
        }
        Ok(Diamond { axis, row })
    }

    /// Materializes the diamond on a grid, clipped to the grid bounds:
    /// { (x,t) : lo + |t − row| ≤ x ≤ hi − |t − row| }.
    pub fn region(&self, shape: GridShape) -> Result<GridRegion> {
        let (lo, hi) = self.axis.bounds().ok_or(Error::NotADiamond)?;
        if hi >= shape.width || self.row >= shape.height {
            return Err(Error::OutOfBounds(format!(
                "diamond axis [{lo},{hi}] at row {} exceeds {}x{}",
                self.row, shape.width, shape.height
            )));
        }
        let mut pts = Vec::new();
        for t in 0..shape.height {
            let d = (t as i64 - self.row as i64).abs();
            let xlo = lo as i64 + d;
            let xhi = hi as i64 - d;
            for x in xlo.max(0)..=xhi.min(shape.width as i64 - 1) {
                pts.push((x as u32, t));
            }
        }
        GridRegion::from_points(shape, pts)
    }

    /// Null projections onto the boundary row t = 0 of an N-site line:
    /// the intervals swept by the two null directions, clamped to the line,
    /// plus the equalizer interval I ∩ J.
    pub fn null_projections(&self, n: u32) -> Result<(Interval, Interval, Interval)> {
        let (lo, hi) = self.axis.bounds().ok_or(Error::NotADiamond)?;
        let t = self.row as i64;
        let i = Interval::clamped(lo as i64 - t, hi as i64 - t, n);
        let j = Interval::clamped(lo as i64 + t, hi as i64 + t, n);
        if i.is_empty() && j.is_empty() {
            return Err(Error::OutOfBounds("diamond projects entirely off the line".into()));
        }
        Ok((i, j, i.intersect(&j)))
    }
}

/// Causal completeness of a diamond, decided in a laterally padded
/// embedding: on a bounded grid a diamond whose axis touches a side edge
/// loses its wedge witnesses and O″ overshoots, so the check shifts the
/// axis one column inward on a grid two columns wider (the discrete stand-in
/// for the plane extending beyond the interval).
pub fn diamond_causally_complete(d: &Diamond, shape: GridShape) -> Result<bool> {
    let (lo, hi) = d.axis.bounds().ok_or(Error::NotADiamond)?;
    let padded = GridShape { width: shape.width + 2, height: shape.height };
    let shifted = Diamond::new(Interval::new(lo + 1, hi + 1)?, d.row)?;
    Ok(shifted.region(padded)?.is_causally_complete())
}

/// Recognizes a region as an (unclipped) diamond and returns it.
pub fn as_diamond(region: &GridRegion) -> Result<Diamond> {
    if region.is_empty() {
        return Err(Error::NotADiamond);
    }
    // the axis is the widest row; reconstruct and compare
    let mut best: Option<(u32, u32, u32)> = None; // (lo, hi, row)
    for t in 0..region.shape.height {
        let row: Vec<u32> =
            region.points().filter(|(_, pt)| *pt == t).map(|(x, _)| x).collect();
        if row.is_empty() {
            continue;
        }
        let (lo, hi) = (row[0], *row.last().expect("nonempty"));
        if best.is_none_or(|(blo, bhi, _)| hi - lo > bhi - blo) {
            best = Some((lo, hi, t));
        }
    }
    let (lo, hi, row) = best.ok_or(Error::NotADiamond)?;
    let diamond = Diamond::new(Interval::new(lo, hi)?, row)?;
    if diamond.region(region.shape)? == *region {
        Ok(diamond)
    } else {
        Err(Error::NotADiamond)
    }
}

/// Embeds an interval at a grid row as a one-row region.
pub fn interval_region(interval: &Interval, shape: GridShape, row: u32) -> Result<GridRegion> {
    GridRegion::from_points(shape, interval.sites().map(|x| (x, row)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const S5: GridShape = GridShape { width: 5, height: 5 };

    #[test]
    fn spacelike_examples() {
        assert!(spacelike((0, 0), (3, 1)));
        assert!(!spacelike((0, 0), (1, 1))); // lightlike
        assert!(!spacelike((2, 5), (2, 5))); // coincident
    }

    #[test]
    fn complement_of_empty_and_full() {
        assert_eq!(GridRegion::empty(S5).causal_complement(), GridRegion::full(S5));
        assert_eq!(GridRegion::full(S5).causal_complement(), GridRegion::empty(S5));
    }

    #[test]
    fn single_point_complement_is_wedges_and_double_is_diamond() {
        let o = GridRegion::from_points(S5, [(2, 2)]).unwrap();
        let c = o.causal_complement();
        // the two side wedges |x−2| > |t−2|
        for x in 0..5u32 {
            for t in 0..5u32 {
                let expected = (x as i64 - 2).abs() > (t as i64 - 2).abs();
                assert_eq!(c.contains((x, t)), expected);
            }
        }
        let dd = o.double_complement();
        let full_diamond = Diamond::new(Interval::new(2, 2).unwrap(), 2).unwrap();
        assert_eq!(dd, full_diamond.region(S5).unwrap());
    }

    #[test]
    fn complement_is_antitone_and_triple_equals_single() {
        // sampled regions on a 4x4 grid
        let shape = GridShape { width: 4, height: 4 };
        let regions: Vec<GridRegion> = (0..40u64)
            .map(|seed| {
                let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
                let pts = (0..16).filter(|i| {
                    s ^= s << 13;
                    s ^= s >> 7;
                    s ^= s << 17;
                    s.wrapping_add(*i) % 3 == 0
                });
                let pts: Vec<(u32, u32)> = pts.map(|i| (i as u32 % 4, i as u32 / 4)).collect();
                GridRegion::from_points(shape, pts).unwrap()
            })
            .collect();
        for o in &regions {
            for p in &regions {
                if o.is_subset_of(p) {
                    assert!(p.causal_complement().is_subset_of(&o.causal_complement()));
                }
            }
            let c = o.causal_complement();
            assert_eq!(c.double_complement(), c, "O‴ = O′");
            assert!(o.is_subset_of(&o.double_complement()));
        }
    }

    #[test]
    fn diamond_examples() {
        // single-site interval at its own row is a single point
        let d = Diamond::new(Interval::new(2, 2).unwrap(), 0).unwrap();
        assert_eq!(d.region(S5).unwrap().len(), 1);
        // the maximal diamond over the full line (rows above row 0 shrink)
        let d = Diamond::new(Interval::new(0, 4).unwrap(), 0).unwrap();
        let r = d.region(GridShape { width: 5, height: 5 }).unwrap();
        assert_eq!(r.len(), 5 + 3 + 1);
        // [1,3] at row 2 on a 5x5 grid: rows of 3, 1, 1 points, causally
        // complete in place (one column of side clearance at the axis row)
        let d = Diamond::new(Interval::new(1, 3).unwrap(), 2).unwrap();
        let r = d.region(S5).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.is_causally_complete());
        assert!(r.is_connected());
    }

    #[test]
    fn diamonds_causally_complete_exhaustive_n8() {
        for n in 1..=8u32 {
            let shape = GridShape { width: n, height: n };
            for lo in 0..n {
                for hi in lo..n {
                    for row in 0..n {
                        let d = Diamond::new(Interval::new(lo, hi).unwrap(), row).unwrap();
                        assert!(
                            diamond_causally_complete(&d, shape).unwrap(),
                            "diamond [{lo},{hi}]@{row} on {n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn edge_touching_diamond_is_incomplete_unpadded() {
        // the wedge witnesses of [0,2]@1 are clipped off a 5-wide grid, so
        // the in-place double complement overshoots
        let d = Diamond::new(Interval::new(0, 2).unwrap(), 1).unwrap();
        let r = d.region(S5).unwrap();
        assert!(!r.is_causally_complete());
        assert!(diamond_causally_complete(&d, S5).unwrap());
    }

    #[test]
    fn disjoint_diamonds_are_spacelike() {
        let d1 = Diamond::new(Interval::new(0, 1).unwrap(), 2).unwrap();
        let d2 = Diamond::new(Interval::new(3, 4).unwrap(), 2).unwrap();
        let (r1, r2) = (d1.region(S5).unwrap(), d2.region(S5).unwrap());
        for p in r1.points() {
            for q in r2.points() {
                assert!(spacelike(p, q));
            }
        }
    }

    #[test]
    fn null_projection_examples() {
        // single boundary point projects to itself
        let d = Diamond::new(Interval::new(2, 2).unwrap(), 0).unwrap();
        let (i, j, meet) = d.null_projections(5).unwrap();
        assert_eq!(i, Interval::new(2, 2).unwrap());
        assert_eq!(j, i);
        assert_eq!(meet, i);
        // axis [1,3] at row 1: I = [0,2], J = [2,4], I∩J = [2,2]
        let d = Diamond::new(Interval::new(1, 3).unwrap(), 1).unwrap();
        let (i, j, meet) = d.null_projections(5).unwrap();
        assert_eq!(i, Interval::new(0, 2).unwrap());
        assert_eq!(j, Interval::new(2, 4).unwrap());
        assert_eq!(meet, Interval::new(2, 2).unwrap());
        // a boundary-row diamond: I = J = its interval
        let d = Diamond::new(Interval::new(1, 3).unwrap(), 0).unwrap();
        let (i, j, _) = d.null_projections(5).unwrap();
        assert_eq!(i, j);
        assert_eq!(i, Interval::new(1, 3).unwrap());
    }

    #[test]
    fn region_diamond_recognition() {
        let d = Diamond::new(Interval::new(1, 3).unwrap(), 1).unwrap();
        let r = d.region(S5).unwrap();
        assert_eq!(as_diamond(&r).unwrap(), d);
        let not = GridRegion::from_points(S5, [(0, 0), (4, 4)]).unwrap();
        assert!(as_diamond(&not).is_err());
    }

    #[test]
    fn interval_set_operations() {
        let i = Interval::new(0, 2).unwrap();
        let j = Interval::new(1, 3).unwrap();
        let k = Interval::new(0, 3).unwrap();
        assert!(k.is_covered_by(&i, &j));
        assert!(k.is_covered_by(&i, &Interval::new(3, 3).unwrap())); // abutting pieces still cover
        assert!(!k.is_covered_by(&Interval::new(0, 0).unwrap(), &Interval::new(2, 3).unwrap()));
        assert_eq!(i.difference(&j).unwrap(), Interval::new(0, 0).unwrap());
        assert_eq!(i.intersect(&j), Interval::new(1, 2).unwrap());
        assert!(Interval::new(0, 0).unwrap().is_disjoint_from(&Interval::new(1, 1).unwrap()));
        assert!(!i.is_disjoint_from(&j));
        assert_eq!(i.difference(&k).unwrap(), Interval::Empty);
    }
}
