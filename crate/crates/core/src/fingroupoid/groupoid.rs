//! Finite groupoids, their morphisms, weak fibre products and the Morita
//! test by enumeration.

use std::collections::HashMap;

use serde::Serialize;

use super::group::FiniteGroup;
use super::FinError;

/// Arrows are numbered `0..arrows()`. `compose(f, g)` is `f ∘ g` and is
/// defined exactly when `source(f) == target(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    objects: usize,
    source: Vec<usize>,
    target: Vec<usize>,
    unit: Vec<usize>,
    inverse: Vec<usize>,
    /// Arrows out of each object, ascending.
    out: Vec<Vec<usize>>,
    /// Position of each arrow in `out[source]`.
    rank: Vec<usize>,
    /// `f ∘ g` is stored at `offset[g] + rank[f]`.
    offset: Vec<usize>,
    comp: Vec<usize>,
}

const MISSING: usize = usize::MAX;

/// A functor given on objects and arrows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupoidMorphism {
    pub objects: Vec<usize>,
    pub arrows: Vec<usize>,
}

impl FiniteGroupoid {
    /// Builds a groupoid and checks every axiom exhaustively.
    pub fn new(
        objects: usize,
        source: Vec<usize>,
        target: Vec<usize>,
        unit: Vec<usize>,
        inverse: Vec<usize>,
        comp: HashMap<(usize, usize), usize>,
    ) -> Result<Self, FinError> {
        let mut x = FiniteGroupoid::skeleton(objects, source, target, unit, inverse)?;
        let mut pairs: Vec<((usize, usize), usize)> = comp.into_iter().collect();
        pairs.sort_unstable();
        for ((f, g), fg) in pairs {
            let Some(slot) = x.slot(f, g) else {
                return Err(FinError::structure("groupoid", "composition defined on a non-composable pair", vec![f, g]));
            };
            x.comp[slot] = fg;
        }
        x.validate()?;
        Ok(x)
    }

    /// Builds the composition table from a function on composable pairs.
    pub fn from_fn(
        objects: usize,
        source: Vec<usize>,
        target: Vec<usize>,
        unit: Vec<usize>,
        inverse: Vec<usize>,
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, FinError> {
        let mut x = FiniteGroupoid::skeleton(objects, source, target, unit, inverse)?;
        for g in 0..x.arrows() {
            for (i, &f) in x.out[x.target[g]].iter().enumerate() {
                x.comp[x.offset[g] + i] = compose(f, g);
            }
        }
        x.validate()?;
        Ok(x)
    }

    /// Checks table shapes and ranges and lays out an empty composition table.
    fn skeleton(
        objects: usize,
        source: Vec<usize>,
        target: Vec<usize>,
        unit: Vec<usize>,
        inverse: Vec<usize>,
    ) -> Result<Self, FinError> {
        let n = source.len();
        let err = |axiom: &str, tuple: Vec<usize>| Err(FinError::structure("groupoid", axiom, tuple));
        if target.len() != n || inverse.len() != n || unit.len() != objects {
            return err("table lengths disagree", vec![]);
        }
        for f in 0..n {
            if source[f] >= objects || target[f] >= objects {
                return err("source/target out of range", vec![f]);
            }
            if inverse[f] >= n {
                return err("inverse out of range", vec![f]);
            }
        }
        let out = index_by(&source, objects);
        let mut rank = vec![0; n];
        for list in &out {
            for (i, &f) in list.iter().enumerate() {
                rank[f] = i;
            }
        }
        let mut offset = Vec::with_capacity(n);
        let mut total = 0;
        for &t in &target {
            offset.push(total);
            total += out[t].len();
        }
        Ok(FiniteGroupoid { objects, source, target, unit, inverse, out, rank, offset, comp: vec![MISSING; total] })
    }

    fn slot(&self, f: usize, g: usize) -> Option<usize> {
        let n = self.arrows();
        (f < n && g < n && self.source[f] == self.target[g]).then(|| self.offset[g] + self.rank[f])
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn arrows(&self) -> usize {
        self.source.len()
    }

    pub fn source(&self, f: usize) -> usize {
        self.source[f]
    }

    pub fn target(&self, f: usize) -> usize {
        self.target[f]
    }

    pub fn unit(&self, x: usize) -> usize {
        self.unit[x]
    }

    pub fn inverse(&self, f: usize) -> usize {
        self.inverse[f]
    }

    pub fn compose(&self, f: usize, g: usize) -> Option<usize> {
        self.slot(f, g).map(|s| self.comp[s]).filter(|&fg| fg != MISSING)
    }

    /// `f ∘ g` for a pair known to be composable.
    fn c(&self, f: usize, g: usize) -> usize {
        self.comp[self.offset[g] + self.rank[f]]
    }

    /// Arrows out of `x`.
    pub fn out_of(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[x].iter().copied()
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        self.out_of(x).filter(|&f| self.target[f] == y).collect()
    }

    fn validate(&self) -> Result<(), FinError> {
        let n = self.arrows();
        let err = |axiom: &str, tuple: Vec<usize>| Err(FinError::structure("groupoid", axiom, tuple));
        for x in 0..self.objects {
            let u = self.unit[x];
            if u >= n || self.source[u] != x || self.target[u] != x {
                return err("unit has wrong endpoints", vec![x]);
            }
        }
        for g in 0..n {
            for &f in &self.out[self.target[g]] {
                let fg = self.c(f, g);
                if fg == MISSING {
                    return err("composition missing", vec![f, g]);
                }
                if fg >= n || self.source[fg] != self.source[g] || self.target[fg] != self.target[f] {
                    return err("composite has wrong endpoints", vec![f, g, fg]);
                }
            }
        }
        for g in 0..n {
            for &f in &self.out[self.target[g]] {
                let fg = self.c(f, g);
                for &e in &self.out[self.target[f]] {
                    if self.c(self.c(e, f), g) != self.c(e, fg) {
                        return err("associativity", vec![e, f, g]);
                    }
                }
            }
        }
        for f in 0..n {
            let (s, t) = (self.source[f], self.target[f]);
            if self.c(f, self.unit[s]) != f || self.c(self.unit[t], f) != f {
                return err("unit law", vec![f]);
            }
            let fi = self.inverse[f];
            if self.source[fi] != t || self.target[fi] != s {
                return err("inverse has wrong endpoints", vec![f]);
            }
            if self.c(f, fi) != self.unit[t] || self.c(fi, f) != self.unit[s] {
                return err("inverse law", vec![f]);
            }
        }
        Ok(())
    }

    /// Order of the isotropy group of each object.
    pub fn isotropy_orders(&self) -> Vec<usize> {
        let mut out = vec![0; self.objects];
        for f in 0..self.arrows() {
            if self.source[f] == self.target[f] {
                out[self.source[f]] += 1;
            }
        }
        out
    }

    /// Connected components as a label per object.
    pub fn orbit_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.objects];
        let mut next = 0;
        for x in 0..self.objects {
            if label[x] != usize::MAX {
                continue;
            }
            let mut stack = vec![x];
            label[x] = next;
            while let Some(y) = stack.pop() {
                for &f in &self.out[y] {
                    if label[self.target[f]] == usize::MAX {
                        label[self.target[f]] = next;
                        stack.push(self.target[f]);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_labels().iter().copied().max().map_or(0, |m| m + 1)
    }

    // Builders.

    /// `K ⋉ S` for an action `act[k][x]`. Arrow `(k, x)` has index
    /// `k * |S| + x` and goes from `x` to `k·x`.
    pub fn action_groupoid(k: &FiniteGroup, set: usize, act: &[Vec<usize>]) -> Result<Self, FinError> {
        if act.len() != k.order() || act.iter().any(|r| r.len() != set || r.iter().any(|&y| y >= set)) {
            return Err(FinError::structure("action groupoid", "action table has the wrong shape", vec![]));
        }
        let n = k.order() * set;
        let source = (0..n).map(|f| f % set).collect();
        let target = (0..n).map(|f| act[f / set][f % set]).collect();
        let unit = (0..set).map(|x| k.identity() * set + x).collect();
        let inverse = (0..n)
            .map(|f| {
                let (g, x) = (f / set, f % set);
                k.inv(g) * set + act[g][x]
            })
            .collect();
        FiniteGroupoid::from_fn(set, source, target, unit, inverse, |f, g| {
            k.mul(f / set, g / set) * set + g % set
        })
    }

    /// `BG`: one object, arrows `G`.
    pub fn classifying(g: &FiniteGroup) -> Self {
        let act = vec![vec![0]; g.order()];
        FiniteGroupoid::action_groupoid(g, 1, &act).expect("BG")
    }

    /// Only identity arrows.
    pub fn discrete(n: usize) -> Self {
        let act = vec![(0..n).collect()];
        FiniteGroupoid::action_groupoid(&FiniteGroup::trivial(), n, &act).expect("discrete groupoid")
    }

    /// Exactly one arrow `(i, j): j -> i` for each ordered pair.
    pub fn pair(n: usize) -> Self {
        let m = n * n;
        let source = (0..m).map(|f| f % n).collect();
        let target = (0..m).map(|f| f / n).collect();
        let unit = (0..n).map(|x| x * n + x).collect();
        let inverse = (0..m).map(|f| (f % n) * n + f / n).collect();
        FiniteGroupoid::from_fn(n, source, target, unit, inverse, |f, g| (f / n) * n + g % n)
            .expect("pair groupoid")
    }

    /// Product groupoid; object `(x, y)` is `x * |Y0| + y`, arrow `(f, g)` is
    /// `f * |Y1| + g`.
    pub fn product(&self, other: &FiniteGroupoid) -> Self {
        let (o2, a2) = (other.objects, other.arrows());
        let n = self.arrows() * a2;
        let source = (0..n).map(|f| self.source[f / a2] * o2 + other.source[f % a2]).collect();
        let target = (0..n).map(|f| self.target[f / a2] * o2 + other.target[f % a2]).collect();
        let unit = (0..self.objects * o2).map(|x| self.unit[x / o2] * a2 + other.unit[x % o2]).collect();
        let inverse = (0..n).map(|f| self.inverse[f / a2] * a2 + other.inverse[f % a2]).collect();
        FiniteGroupoid::from_fn(self.objects * o2, source, target, unit, inverse, |f, g| {
            self.c(f / a2, g / a2) * a2 + other.c(f % a2, g % a2)
        })
        .expect("product of groupoids")
    }
}

fn index_by(map: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); size];
    for (i, &v) in map.iter().enumerate() {
        if v < size {
            out[v].push(i);
        }
    }
    out
}

impl GroupoidMorphism {
    pub fn identity(x: &FiniteGroupoid) -> Self {
        GroupoidMorphism { objects: (0..x.objects).collect(), arrows: (0..x.arrows()).collect() }
    }

    /// Checks functoriality, reporting the first offending arrow or pair.
    pub fn check(&self, x: &FiniteGroupoid, y: &FiniteGroupoid) -> Result<(), FinError> {
        let err = |what: &str, t: Vec<usize>| Err(FinError::Morphism(format!("{what} at {t:?}")));
        if self.objects.len() != x.objects || self.arrows.len() != x.arrows() {
            return err("wrong table sizes", vec![]);
        }
        if self.objects.iter().any(|&o| o >= y.objects) || self.arrows.iter().any(|&a| a >= y.arrows()) {
            return err("image out of range", vec![]);
        }
        for f in 0..x.arrows() {
            let a = self.arrows[f];
            if y.source[a] != self.objects[x.source[f]] || y.target[a] != self.objects[x.target[f]] {
                return err("endpoints not preserved", vec![f]);
            }
        }
        for o in 0..x.objects {
            if self.arrows[x.unit[o]] != y.unit[self.objects[o]] {
                return err("units not preserved", vec![o]);
            }
        }
        for g in 0..x.arrows() {
            for f in x.out_of(x.target[g]) {
                if y.compose(self.arrows[f], self.arrows[g]) != Some(self.arrows[x.c(f, g)]) {
                    return err("composition not preserved", vec![f, g]);
                }
            }
        }
        Ok(())
    }
}

/// The weak fibre product together with its tuple indexing.
#[derive(Clone, Debug)]
pub struct WeakFibreProduct {
    pub groupoid: FiniteGroupoid,
    /// Object `i` is the triple `(x, k, y)`.
    pub object_tuples: Vec<(usize, usize, usize)>,
    /// Arrow `i` is the triple `(f, k, g)`.
    pub arrow_tuples: Vec<(usize, usize, usize)>,
    pub object_index: HashMap<(usize, usize, usize), usize>,
    pub arrow_index: HashMap<(usize, usize, usize), usize>,
}

/// `X ×_Z^(w) Y` for `phi: X -> Z`, `psi: Y -> Z`.
///
/// Objects `(x, k, y)` with `k: phi(x) -> psi(y)`; arrows `(f, k, g)` with
/// `k: phi(s f) -> psi(s g)`, going to `(t f, psi(g) ∘ k ∘ phi(f)^-1, t g)`.
pub fn weak_fibre_product(
    x: &FiniteGroupoid,
    phi: &GroupoidMorphism,
    y: &FiniteGroupoid,
    psi: &GroupoidMorphism,
    z: &FiniteGroupoid,
) -> Result<WeakFibreProduct, FinError> {
    phi.check(x, z)?;
    psi.check(y, z)?;
    let mut object_tuples = Vec::new();
    for a in 0..x.objects {
        for k in 0..z.arrows() {
            if z.source[k] != phi.objects[a] {
                continue;
            }
            for b in 0..y.objects {
                if psi.objects[b] == z.target[k] {
                    object_tuples.push((a, k, b));
                }
            }
        }
    }
    let object_index: HashMap<_, _> = object_tuples.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut arrow_tuples = Vec::new();
    for f in 0..x.arrows() {
        for k in 0..z.arrows() {
            if z.source[k] != phi.objects[x.source[f]] {
                continue;
            }
            for g in 0..y.arrows() {
                if psi.objects[y.source[g]] == z.target[k] {
                    arrow_tuples.push((f, k, g));
                }
            }
        }
    }
    let arrow_index: HashMap<_, _> = arrow_tuples.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let moved = |f: usize, k: usize, g: usize| {
        let k1 = z.c(k, z.inverse[phi.arrows[f]]);
        z.c(psi.arrows[g], k1)
    };
    let source = arrow_tuples.iter().map(|&(f, k, g)| object_index[&(x.source[f], k, y.source[g])]).collect();
    let target = arrow_tuples
        .iter()
        .map(|&(f, k, g)| object_index[&(x.target[f], moved(f, k, g), y.target[g])])
        .collect();
    let unit = object_tuples.iter().map(|&(a, k, b)| arrow_index[&(x.unit[a], k, y.unit[b])]).collect();
    let inverse = arrow_tuples
        .iter()
        .map(|&(f, k, g)| arrow_index[&(x.inverse[f], moved(f, k, g), y.inverse[g])])
        .collect();
    let groupoid = FiniteGroupoid::from_fn(object_tuples.len(), source, target, unit, inverse, |p, q| {
        let (f2, _, g2) = arrow_tuples[p];
        let (f1, k1, g1) = arrow_tuples[q];
        arrow_index[&(x.c(f2, f1), k1, y.c(g2, g1))]
    })?;
    Ok(WeakFibreProduct { groupoid, object_tuples, arrow_tuples, object_index, arrow_index })
}

/// Report of [`check_morita`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoritaReport {
    pub essentially_surjective: bool,
    pub fully_faithful: bool,
    /// An object of the target not isomorphic to any image object.
    pub missed_object: Option<usize>,
    /// A pair `(x, x')` on which the hom-set map is not bijective.
    pub bad_pair: Option<(usize, usize)>,
}

impl MoritaReport {
    pub fn is_morita(&self) -> bool {
        self.essentially_surjective && self.fully_faithful
    }
}

/// Essential surjectivity by orbit reachability and full faithfulness by
/// comparing hom-sets pairwise.
pub fn check_morita(x: &FiniteGroupoid, y: &FiniteGroupoid, phi: &GroupoidMorphism) -> Result<MoritaReport, FinError> {
    phi.check(x, y)?;
    let labels = y.orbit_labels();
    let hit: std::collections::BTreeSet<usize> = phi.objects.iter().map(|&o| labels[o]).collect();
    let missed_object = (0..y.objects).find(|&o| !hit.contains(&labels[o]));

    let mut bad_pair = None;
    'outer: for a in 0..x.objects {
        for b in 0..x.objects {
            let here = x.hom(a, b);
            let there = y.hom(phi.objects[a], phi.objects[b]);
            let mut images: Vec<usize> = here.iter().map(|&f| phi.arrows[f]).collect();
            images.sort_unstable();
            images.dedup();
            if images.len() != here.len() || images.len() != there.len() {
                bad_pair = Some((a, b));
                break 'outer;
            }
        }
    }
    Ok(MoritaReport {
        essentially_surjective: missed_object.is_none(),
        fully_faithful: bad_pair.is_none(),
        missed_object,
        bad_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_validate() {
        let z3 = FiniteGroup::cyclic(3);
        let act: Vec<Vec<usize>> = (0..3).map(|k| (0..3).map(|x| (k + x) % 3).collect()).collect();
        let g = FiniteGroupoid::action_groupoid(&z3, 3, &act).unwrap();
        assert_eq!(g.arrows(), 9);
        assert_eq!(g.isotropy_orders(), vec![1, 1, 1]);
        assert_eq!(g.orbit_count(), 1);
        assert_eq!(FiniteGroupoid::classifying(&z3).isotropy_orders(), vec![3]);
        assert_eq!(FiniteGroupoid::pair(3).isotropy_orders(), vec![1, 1, 1]);
        assert_eq!(FiniteGroupoid::discrete(2).orbit_count(), 2);
        let p = FiniteGroupoid::pair(2).product(&FiniteGroupoid::classifying(&FiniteGroup::cyclic(2)));
        assert_eq!(p.arrows(), 8);
        assert_eq!(p.isotropy_orders(), vec![2, 2]);
    }

    #[test]
    fn broken_composition_reports_triple() {
        let base = FiniteGroupoid::classifying(&FiniteGroup::cyclic(2));
        let mut comp = HashMap::new();
        for f in 0..2 {
            for g in 0..2 {
                comp.insert((f, g), base.compose(f, g).unwrap());
            }
        }
        comp.insert((1, 1), 1);
        let err = FiniteGroupoid::new(1, vec![0, 0], vec![0, 0], vec![0], vec![0, 1], comp).unwrap_err();
        assert!(matches!(err, FinError::Structure { .. }));
    }

    #[test]
    fn fibre_product_examples() {
        let d = FiniteGroupoid::discrete(3);
        let id = GroupoidMorphism::identity(&d);
        let w = weak_fibre_product(&d, &id, &d, &id, &d).unwrap();
        assert_eq!(w.groupoid.objects(), 3);
        assert!(w.object_tuples.iter().all(|&(a, _, b)| a == b));

        // pt ×_BG pt: |G| objects, trivial isotropy
        let z3 = FiniteGroup::cyclic(3);
        let bg = FiniteGroupoid::classifying(&z3);
        let pt = FiniteGroupoid::discrete(1);
        let to_bg = GroupoidMorphism { objects: vec![0], arrows: vec![0] };
        let w = weak_fibre_product(&pt, &to_bg, &pt, &to_bg, &bg).unwrap();
        assert_eq!(w.groupoid.objects(), 3);
        assert_eq!(w.groupoid.isotropy_orders(), vec![1, 1, 1]);

        // constant maps into different components: empty
        let z = FiniteGroupoid::discrete(2);
        let c0 = GroupoidMorphism { objects: vec![0], arrows: vec![0] };
        let c1 = GroupoidMorphism { objects: vec![1], arrows: vec![1] };
        let w = weak_fibre_product(&pt, &c0, &pt, &c1, &z).unwrap();
        assert_eq!(w.groupoid.objects(), 0);
        assert_eq!(w.groupoid.arrows(), 0);
    }

    #[test]
    fn morita_examples() {
        let p = FiniteGroupoid::pair(2);
        assert!(check_morita(&p, &p, &GroupoidMorphism::identity(&p)).unwrap().is_morita());
        let pt = FiniteGroupoid::discrete(1);
        let incl = GroupoidMorphism { objects: vec![0], arrows: vec![0] };
        assert!(check_morita(&pt, &p, &incl).unwrap().is_morita());
        let bg = FiniteGroupoid::classifying(&FiniteGroup::cyclic(2));
        let proj = GroupoidMorphism { objects: vec![0], arrows: vec![0, 0] };
        let rep = check_morita(&bg, &pt, &proj).unwrap();
        assert!(rep.essentially_surjective);
        assert!(!rep.fully_faithful);
    }

    #[test]
    fn non_functor_rejected() {
        let bg = FiniteGroupoid::classifying(&FiniteGroup::cyclic(2));
        let bad = GroupoidMorphism { objects: vec![0], arrows: vec![1, 1] };
        assert!(matches!(bad.check(&bg, &bg), Err(FinError::Morphism(_))));
    }
}
