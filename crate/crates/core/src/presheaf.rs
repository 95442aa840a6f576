//! Finite-set-valued functors on finite posets and their pointwise Kan
//! extensions along monotone maps, together with enumeration of natural
//! transformations and the transposition maps of the adjunctions
//! Lan_f ⊣ f* ⊣ Ran_f.
//!
//! Functors are stored covariantly; a contravariant presheaf is handled as a
//! covariant functor on the opposite poset via the variance flag.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poset::{FinitePoset, MonotoneMap};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// A functor `base → Set` with finite fibers `{0..size}`. For the covariant
/// variance, `action(x, y)` (for x ≤ y) maps fiber(x) → fiber(y); for the
/// contravariant variance it maps fiber(y) → fiber(x).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetPresheaf {
    pub base: Arc<FinitePoset>,
    pub variance: Variance,
    fibers: Vec<usize>,
    actions: HashMap<(usize, usize), Vec<usize>>, // key (x, y) with x ≤ y, x ≠ y
}

impl SetPresheaf {
    /// Builds from actions on all strict comparable pairs; verifies identity
    /// and composition laws (functoriality).
    pub fn new(
        base: Arc<FinitePoset>,
        variance: Variance,
        fibers: Vec<usize>,
        actions: HashMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self> {
        let ps = SetPresheaf { base, variance, fibers, actions };
        ps.verify()?;
        Ok(ps)
    }

    /// Builds from actions on covering edges only, composing along chains;
    /// fails if different factorizations disagree.
    pub fn from_cover_actions(
        base: Arc<FinitePoset>,
        variance: Variance,
        fibers: Vec<usize>,
        cover_actions: HashMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self> {
        let covers = base.covers();
        for (x, y) in cover_actions.keys() {
            if !covers.contains(&(*x, *y)) {
                return Err(Error::InvalidInput(format!("({x},{y}) is not a covering edge")));
            }
        }
        let mut actions: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        // propagate along chains in topological layers: iterate until stable
        let edge = |x: usize, y: usize, acts: &HashMap<(usize, usize), Vec<usize>>| {
            acts.get(&(x, y)).cloned()
        };
        for (x, y) in &covers {
            actions.insert((*x, *y), cover_actions[&(*x, *y)].clone());
        }
        loop {
            let mut changed = false;
            for x in 0..base.len() {
                for y in base.up_set(x).iter() {
                    if y == x || actions.contains_key(&(x, y)) {
                        continue;
                    }
                    // find z with x ≤ z ≤ y, both pieces known
                    for z in 0..base.len() {
                        if z != x && z != y && base.le(x, z) && base.le(z, y) {
                            if let (Some(a), Some(b)) = (edge(x, z, &actions), edge(z, y, &actions))
                            {
                                let composite = match variance {
                                    Variance::Covariant => a.iter().map(|v| b[*v]).collect(),
                                    Variance::Contravariant => b.iter().map(|v| a[*v]).collect(),
                                };
                                actions.insert((x, y), composite);
                                changed = true;
                                break;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Self::new(base, variance, fibers, actions)
    }

    pub fn constant(base: Arc<FinitePoset>, variance: Variance, size: usize) -> Self {
        let n = base.len();
        let mut actions = HashMap::new();
        for x in 0..n {
            for y in base.up_set(x).iter() {
                if y != x {
                    actions.insert((x, y), (0..size).collect());
                }
            }
        }
        SetPresheaf { base: base.clone(), variance, fibers: vec![size; n], actions }
    }

    /// The representable covariant functor Hom(c, −): singleton fiber above
    /// every x ≥ c, empty below.
    pub fn representable(base: Arc<FinitePoset>, c: usize) -> Self {
        let n = base.len();
        let fibers: Vec<usize> = (0..n).map(|x| usize::from(base.le(c, x))).collect();
        let mut actions = HashMap::new();
        for x in 0..n {
            for y in base.up_set(x).iter() {
                if y != x {
                    let v = if fibers[x] == 1 { vec![0] } else { vec![] };
                    actions.insert((x, y), v);
                }
            }
        }
        SetPresheaf { base, variance: Variance::Covariant, fibers, actions }
    }

    pub fn fiber(&self, x: usize) -> usize {
        self.fibers[x]
    }

    pub fn fibers(&self) -> &[usize] {
        &self.fibers
    }

    /// Action along x ≤ y (identity when x = y).
    pub fn action(&self, x: usize, y: usize) -> Vec<usize> {
        if x == y {
            return (0..self.fibers[x]).collect();
        }
        self.actions[&(x, y)].clone()
    }

    fn verify(&self) -> Result<()> {
        let base = &self.base;
        for x in 0..base.len() {
            for y in base.up_set(x).iter() {
                if y == x {
                    continue;
                }
                let a = self
                    .actions
                    .get(&(x, y))
                    .ok_or_else(|| Error::InvalidInput(format!("missing action {x} ≤ {y}")))?;
                let (src, dst) = match self.variance {
                    Variance::Covariant => (self.fibers[x], self.fibers[y]),
                    Variance::Contravariant => (self.fibers[y], self.fibers[x]),
                };
                if a.len() != src || a.iter().any(|v| *v >= dst) {
                    return Err(Error::InvalidInput(format!("action {x} ≤ {y} ill-typed")));
                }
                for z in base.up_set(y).iter() {
                    if z == y || z == x {
                        continue;
                    }
                    let b = &self.actions[&(y, z)];
                    let c = &self.actions[&(x, z)];
                    let composed: Vec<usize> = match self.variance {
                        Variance::Covariant => a.iter().map(|v| b[*v]).collect(),
                        Variance::Contravariant => b.iter().map(|v| a[*v]).collect(),
                    };
                    if composed != *c {
                        return Err(Error::InvalidInput(format!(
                            "functoriality fails along {x} ≤ {y} ≤ {z}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Reinterprets over the opposite poset with flipped variance.
    pub fn dualize(&self) -> SetPresheaf {
        let variance = match self.variance {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        };
        let base = Arc::new(self.base.opposite());
        let actions = self.actions.iter().map(|((x, y), a)| ((*y, *x), a.clone())).collect();
        SetPresheaf { base, variance, fibers: self.fibers.clone(), actions }
    }
}

/// Union-find for zig-zag colimit classes.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let r = self.find(self.0[i]);
            self.0[i] = r;
        }
        self.0[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, for deterministic representatives
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Colimit of a covariant functor restricted to the sub-poset `members`:
/// disjoint union of fibers modulo the zig-zag closure of the actions.
/// Returns (class count, class index per (member position, fiber element)).
pub fn sub_colimit(f: &SetPresheaf, members: &[usize]) -> (usize, HashMap<(usize, usize), usize>) {
    debug_assert_eq!(f.variance, Variance::Covariant);
    let mut offsets = Vec::with_capacity(members.len());
    let mut total = 0;
    for m in members {
        offsets.push(total);
        total += f.fiber(*m);
    }
    let mut uf = UnionFind::new(total);
    for (i, x) in members.iter().enumerate() {
        for (j, y) in members.iter().enumerate() {
            if *x != *y && f.base.le(*x, *y) {
                let act = f.action(*x, *y);
                for v in 0..f.fiber(*x) {
                    uf.union(offsets[i] + v, offsets[j] + act[v]);
                }
            }
        }
    }
    // canonical class numbering in order of least member
    let mut class_of: HashMap<usize, usize> = HashMap::new();
    let mut result = HashMap::new();
    let mut next = 0;
    for (i, x) in members.iter().enumerate() {
        for v in 0..f.fiber(*x) {
            let root = uf.find(offsets[i] + v);
            let class = *class_of.entry(root).or_insert_with(|| {
                let c = next;
                next += 1;
                c
            });
            result.insert((i, v), class);
        }
    }
    (next, result)
}

/// Limit of a covariant functor restricted to `members`: matching tuples
/// under the actions, enumerated in lexicographic order.
pub fn sub_limit(f: &SetPresheaf, members: &[usize]) -> Vec<Vec<usize>> {
    debug_assert_eq!(f.variance, Variance::Covariant);
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for (i, x) in members.iter().enumerate() {
        let mut next = Vec::new();
        for t in &tuples {
            'v: for v in 0..f.fiber(*x) {
                // consistency with already-chosen components
                for (j, y) in members.iter().enumerate().take(i) {
                    if f.base.le(*y, *x) && f.action(*y, *x)[t[j]] != v {
                        continue 'v;
                    }
                    if f.base.le(*x, *y) && f.action(*x, *y)[v] != t[j] {
                        continue 'v;
                    }
                }
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        tuples = next;
    }
    tuples
}

/// Pointwise Kan extensions of a covariant functor along f: P → Q.
/// `Lan(q)` is the colimit over {p : f(p) ≤ q}; `Ran(q)` the limit over
/// {p : q ≤ f(p)}.
pub struct KanExtensions {
    pub lan: SetPresheaf,
    pub ran: SetPresheaf,
    /// For each q: the comma members of Lan and the class map ((pos, elt) → class).
    pub lan_members: Vec<Vec<usize>>,
    pub lan_classes: Vec<HashMap<(usize, usize), usize>>,
    /// For each q: the comma members of Ran and the matching tuples.
    pub ran_members: Vec<Vec<usize>>,
    pub ran_tuples: Vec<Vec<Vec<usize>>>,
}

pub fn kan_extensions(f: &SetPresheaf, map: &MonotoneMap) -> Result<KanExtensions> {
    if f.variance != Variance::Covariant {
        return Err(Error::InvalidInput(
            "kan_extensions expects a covariant functor; dualize first".into(),
        ));
    }
    if map.dom.as_ref() != f.base.as_ref() {
        return Err(Error::InvalidInput("map domain does not match the functor base".into()));
    }
    let q_poset = &map.cod;
    let nq = q_poset.len();

    let mut lan_members = Vec::with_capacity(nq);
    let mut lan_classes = Vec::with_capacity(nq);
    let mut lan_fibers = Vec::with_capacity(nq);
    let mut ran_members = Vec::with_capacity(nq);
    let mut ran_tuples = Vec::with_capacity(nq);
    let mut ran_fibers = Vec::with_capacity(nq);

    for q in 0..nq {
        let lm: Vec<usize> =
            (0..map.dom.len()).filter(|p| q_poset.le(map.apply(*p), q)).collect();
        let (count, classes) = sub_colimit(f, &lm);
        lan_fibers.push(count);
        lan_members.push(lm);
        lan_classes.push(classes);

        let rm: Vec<usize> =
            (0..map.dom.len()).filter(|p| q_poset.le(q, map.apply(*p))).collect();
        let tuples = sub_limit(f, &rm);
        ran_fibers.push(tuples.len());
        ran_members.push(rm);
        ran_tuples.push(tuples);
    }

    // actions q ≤ q'
    let mut lan_actions = HashMap::new();
    let mut ran_actions = HashMap::new();
    for q in 0..nq {
        for q2 in q_poset.up_set(q).iter() {
            if q2 == q {
                continue;
            }
            // Lan: members(q) ⊆ members(q2); class of (p, v) maps forward
            let act: Vec<usize> = {
                let mut v = vec![0; lan_fibers[q]];
                for (pos, p) in lan_members[q].iter().enumerate() {
                    let pos2 = lan_members[q2].iter().position(|r| r == p).expect("monotone comma");
                    for elt in 0..f.fiber(*p) {
                        v[lan_classes[q][&(pos, elt)]] = lan_classes[q2][&(pos2, elt)];
                    }
                }
                v
            };
            lan_actions.insert((q, q2), act);
            // Ran: members(q2) ⊆ members(q); project tuples
            let act: Vec<usize> = ran_tuples[q]
                .iter()
                .map(|t| {
                    let proj: Vec<usize> = ran_members[q2]
                        .iter()
                        .map(|p| {
                            let pos = ran_members[q].iter().position(|r| r == p).expect("comma");
                            t[pos]
                        })
                        .collect();
                    ran_tuples[q2].iter().position(|u| *u == proj).expect("projection matches")
                })
                .collect();
            ran_actions.insert((q, q2), act);
        }
    }

    let lan = SetPresheaf::new(q_poset.clone(), Variance::Covariant, lan_fibers, lan_actions)?;
    let ran = SetPresheaf::new(q_poset.clone(), Variance::Covariant, ran_fibers, ran_actions)?;
    Ok(KanExtensions { lan, ran, lan_members, lan_classes, ran_members, ran_tuples })
}

/// Restriction f*G of a covariant functor G on Q along f: P → Q.
pub fn restrict_along(g: &SetPresheaf, map: &MonotoneMap) -> Result<SetPresheaf> {
    if map.cod.as_ref() != g.base.as_ref() {
        return Err(Error::InvalidInput("map codomain does not match".into()));
    }
    let p_poset = &map.dom;
    let fibers: Vec<usize> = (0..p_poset.len()).map(|p| g.fiber(map.apply(p))).collect();
    let mut actions = HashMap::new();
    for x in 0..p_poset.len() {
        for y in p_poset.up_set(x).iter() {
            if y != x {
                actions.insert((x, y), g.action(map.apply(x), map.apply(y)));
            }
        }
    }
    SetPresheaf::new(p_poset.clone(), Variance::Covariant, fibers, actions)
}

/// All natural transformations F ⇒ G (same base, covariant), as one
/// component map per element; enumerated in lexicographic order.
pub fn natural_transformations(f: &SetPresheaf, g: &SetPresheaf) -> Vec<Vec<Vec<usize>>> {
    assert_eq!(f.base.as_ref(), g.base.as_ref());
    let n = f.base.len();
    let mut out = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::with_capacity(n);
    fn component_maps(src: usize, dst: usize) -> Vec<Vec<usize>> {
        // all maps {0..src} → {0..dst}, lexicographic
        if src == 0 {
            return vec![vec![]];
        }
        if dst == 0 {
            return vec![]; // no maps from a nonempty set into the empty set
        }
        let mut maps = vec![vec![]];
        for _ in 0..src {
            let mut next = Vec::new();
            for m in &maps {
                for v in 0..dst {
                    let mut m2 = m.clone();
                    m2.push(v);
                    next.push(m2);
                }
            }
            maps = next;
        }
        maps
    }
    fn rec(
        x: usize,
        n: usize,
        f: &SetPresheaf,
        g: &SetPresheaf,
        components: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if x == n {
            out.push(components.clone());
            return;
        }
        'cand: for cand in component_maps(f.fiber(x), g.fiber(x)) {
            // naturality against already fixed components
            for y in 0..x {
                if f.base.le(y, x) {
                    let (fa, ga) = (f.action(y, x), g.action(y, x));
                    for v in 0..f.fiber(y) {
                        if cand[fa[v]] != ga[components[y][v]] {
                            continue 'cand;
                        }
                    }
                }
                if f.base.le(x, y) {
                    let (fa, ga) = (f.action(x, y), g.action(x, y));
                    for v in 0..f.fiber(x) {
                        if components[y][fa[v]] != ga[cand[v]] {
                            continue 'cand;
                        }
                    }
                }
            }
            components.push(cand);
            rec(x + 1, n, f, g, components, out);
            components.pop();
        }
    }
    rec(0, n, f, g, &mut components, &mut out);
    out
}

/// Transpose of η: Lan_f F ⇒ G across Lan_f ⊣ f*: the component at p sends
/// v to η_{f(p)} of the class of (p, v).
pub fn transpose_lan(
    kan: &KanExtensions,
    f: &SetPresheaf,
    map: &MonotoneMap,
    eta: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    (0..map.dom.len())
        .map(|p| {
            let q = map.apply(p);
            let pos = kan.lan_members[q].iter().position(|r| *r == p).expect("p in comma of f(p)");
            (0..f.fiber(p)).map(|v| eta[q][kan.lan_classes[q][&(pos, v)]]).collect()
        })
        .collect()
}

/// Transpose of θ: F ⇒ f*G back across Lan_f ⊣ f*: the component at q sends
/// the class of (p, v) to G(f(p) ≤ q)(θ_p(v)). Returns None if ill-defined
/// (which would falsify the adjunction).
pub fn transpose_lan_inverse(
    kan: &KanExtensions,
    g: &SetPresheaf,
    map: &MonotoneMap,
    theta: &[Vec<usize>],
) -> Option<Vec<Vec<usize>>> {
    let nq = map.cod.len();
    let mut eta = Vec::with_capacity(nq);
    for q in 0..nq {
        let mut comp = vec![usize::MAX; kan.lan.fiber(q)];
        for (pos, p) in kan.lan_members[q].iter().enumerate() {
            let act = g.action(map.apply(*p), q);
            for v in 0..theta[*p].len() {
                let target = act[theta[*p][v]];
                let class = kan.lan_classes[q][&(pos, v)];
                if comp[class] != usize::MAX && comp[class] != target {
                    return None;
                }
                comp[class] = target;
            }
        }
        if comp.contains(&usize::MAX) {
            return None;
        }
        eta.push(comp);
    }
    Some(eta)
}

/// Transpose of θ: f*G ⇒ F across f* ⊣ Ran_f: the component at q sends y to
/// the matching tuple (θ_p(G(q ≤ f(p))(y)))_p.
pub fn transpose_ran(
    kan: &KanExtensions,
    g: &SetPresheaf,
    map: &MonotoneMap,
    theta: &[Vec<usize>],
) -> Option<Vec<Vec<usize>>> {
    let nq = map.cod.len();
    let mut psi = Vec::with_capacity(nq);
    for q in 0..nq {
        let mut comp = Vec::with_capacity(g.fiber(q));
        for y in 0..g.fiber(q) {
            let tuple: Vec<usize> = kan.ran_members[q]
                .iter()
                .map(|p| theta[*p][g.action(q, map.apply(*p))[y]])
                .collect();
            let idx = kan.ran_tuples[q].iter().position(|t| *t == tuple)?;
            comp.push(idx);
        }
        psi.push(comp);
    }
    Some(psi)
}

/// Transpose of ψ: G ⇒ Ran_f F back: the component at p sends y to the
/// p-component of the tuple ψ_{f(p)}(y).
pub fn transpose_ran_inverse(
    kan: &KanExtensions,
    g: &SetPresheaf,
    map: &MonotoneMap,
    psi: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    (0..map.dom.len())
        .map(|p| {
            let q = map.apply(p);
            let pos = kan.ran_members[q].iter().position(|r| *r == p).expect("p in comma");
            (0..g.fiber(q)).map(|y| kan.ran_tuples[q][psi[q][y]][pos]).collect()
        })
        .collect()
}
