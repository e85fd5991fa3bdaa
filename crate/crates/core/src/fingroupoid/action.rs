//! Crossed-module actions on finite groupoids.

use std::collections::BTreeSet;

use serde::Serialize;

use super::crossed::FiniteCrossedModule;
use super::group::FiniteGroup;
use super::groupoid::{check_morita, weak_fibre_product, FiniteGroupoid, GroupoidMorphism};
use super::FinError;

/// `g0[g][x] = g·x`, `g1[g][f] = g*f`, `h1[h][f] = h*f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedAction {
    pub g0: Vec<Vec<usize>>,
    pub g1: Vec<Vec<usize>>,
    pub h1: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionViolation {
    pub equation: String,
    pub tuple: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionReport {
    pub passed: bool,
    pub instances_checked: usize,
    pub violation: Option<ActionViolation>,
}

struct Checker {
    count: usize,
}

impl Checker {
    fn check(&mut self, ok: bool, equation: &str, tuple: &[usize], detail: &str) -> Result<(), ActionViolation> {
        self.count += 1;
        if ok {
            Ok(())
        } else {
            Err(ActionViolation { equation: equation.into(), tuple: tuple.to_vec(), detail: detail.into() })
        }
    }
}

fn check_shapes(cm: &FiniteCrossedModule, x: &FiniteGroupoid, a: &CrossedAction) -> Result<(), FinError> {
    let shape = |t: &[Vec<usize>], rows: usize, cols: usize, bound: usize| {
        t.len() == rows && t.iter().all(|r| r.len() == cols && r.iter().all(|&v| v < bound))
    };
    let (o, n) = (x.objects(), x.arrows());
    if !shape(&a.g0, cm.g.order(), o, o) {
        return Err(FinError::structure("action", "G action on objects has the wrong shape", vec![]));
    }
    if !shape(&a.g1, cm.g.order(), n, n) {
        return Err(FinError::structure("action", "G action on arrows has the wrong shape", vec![]));
    }
    if !shape(&a.h1, cm.h.order(), n, n) {
        return Err(FinError::structure("action", "H action on arrows has the wrong shape", vec![]));
    }
    Ok(())
}

/// Checks the group-action laws, then functor1, functor2, natural1,
/// natural2 and conjugation over every tuple, stopping at the first failure.
pub fn validate_action(cm: &FiniteCrossedModule, x: &FiniteGroupoid, a: &CrossedAction) -> Result<ActionReport, FinError> {
    check_shapes(cm, x, a)?;
    let mut c = Checker { count: 0 };
    let outcome = run_checks(&mut c, cm, x, a);
    Ok(ActionReport { passed: outcome.is_ok(), instances_checked: c.count, violation: outcome.err() })
}

fn group_action_laws(
    c: &mut Checker,
    k: &FiniteGroup,
    table: &[Vec<usize>],
    size: usize,
    label: &str,
) -> Result<(), ActionViolation> {
    for p in 0..size {
        c.check(table[k.identity()][p] == p, "action", &[k.identity(), p], &format!("identity acts trivially ({label})"))?;
    }
    for u in k.elements() {
        for v in k.elements() {
            for p in 0..size {
                let ok = table[k.mul(u, v)][p] == table[u][table[v][p]];
                c.check(ok, "action", &[u, v, p], &format!("(uv)·p = u·(v·p) ({label})"))?;
            }
        }
    }
    Ok(())
}

fn run_checks(c: &mut Checker, cm: &FiniteCrossedModule, x: &FiniteGroupoid, a: &CrossedAction) -> Result<(), ActionViolation> {
    let (g, h) = (&cm.g, &cm.h);
    group_action_laws(c, g, &a.g0, x.objects(), "G on objects")?;
    group_action_laws(c, g, &a.g1, x.arrows(), "G on arrows")?;
    group_action_laws(c, h, &a.h1, x.arrows(), "H on arrows")?;

    for gg in g.elements() {
        for o in 0..x.objects() {
            let ok = a.g1[gg][x.unit(o)] == x.unit(a.g0[gg][o]);
            c.check(ok, "functor1", &[gg, o], "g*u(x) = u(g·x)")?;
        }
        for f in 0..x.arrows() {
            let ok = a.g0[gg][x.source(f)] == x.source(a.g1[gg][f]) && a.g0[gg][x.target(f)] == x.target(a.g1[gg][f]);
            c.check(ok, "functor1", &[gg, f], "g·s(f) = s(g*f), g·t(f) = t(g*f)")?;
        }
    }
    for gg in g.elements() {
        for f2 in 0..x.arrows() {
            for f1 in x.out_of(x.target(f2)).collect::<Vec<_>>() {
                let f12 = x.compose(f1, f2).expect("composable");
                let ok = x.compose(a.g1[gg][f1], a.g1[gg][f2]) == Some(a.g1[gg][f12]);
                c.check(ok, "functor2", &[gg, f1, f2], "g*(f1∘f2) = (g*f1)∘(g*f2)")?;
            }
        }
    }
    for hh in h.elements() {
        for f in 0..x.arrows() {
            let hf = a.h1[hh][f];
            let ok = x.source(hf) == x.source(f) && x.target(hf) == a.g0[cm.del[hh]][x.target(f)];
            c.check(ok, "natural1", &[hh, f], "s(h*f) = s(f), t(h*f) = ∂(h)·t(f)")?;
        }
    }
    for hh in h.elements() {
        for f in 0..x.arrows() {
            let hf = a.h1[hh][f];
            let left = x.compose(a.h1[hh][x.unit(x.target(f))], f);
            let right = x.compose(a.g1[cm.del[hh]][f], a.h1[hh][x.unit(x.source(f))]);
            let ok = left == Some(hf) && right == Some(hf);
            c.check(ok, "natural2", &[hh, f], "h*f = (h*u(t f))∘f = (∂(h)*f)∘(h*u(s f))")?;
        }
    }
    for gg in g.elements() {
        for hh in h.elements() {
            for f in 0..x.arrows() {
                let ok = a.g1[gg][a.h1[hh][f]] == a.h1[cm.act(gg, hh)][a.g1[gg][f]];
                c.check(ok, "conjugation", &[gg, hh, f], "g*(h*f) = ᵍh*(g*f)")?;
            }
        }
    }
    Ok(())
}

fn ensure_valid(cm: &FiniteCrossedModule, x: &FiniteGroupoid, a: &CrossedAction) -> Result<(), FinError> {
    let rep = validate_action(cm, x, a)?;
    match rep.violation {
        None => Ok(()),
        Some(v) => Err(FinError::Precondition(format!("action fails {} at {:?}", v.equation, v.tuple))),
    }
}

/// First object whose `∂(H)`-orbit differs from `t(s⁻¹(x))`, if any.
pub fn leafwise_witness(cm: &FiniteCrossedModule, x: &FiniteGroupoid, a: &CrossedAction) -> Option<usize> {
    (0..x.objects()).find(|&o| {
        let orbit: BTreeSet<usize> = cm.image().iter().map(|&d| a.g0[d][o]).collect();
        let reach: BTreeSet<usize> = x.out_of(o).map(|f| x.target(f)).collect();
        orbit != reach
    })
}

/// Whether `∂(H)·x = t(s⁻¹(x))` for every object. This orbit equality
/// stands in for local leafwise transitivity in the finite setting.
pub fn leafwise_transitive(cm: &FiniteCrossedModule, x: &FiniteGroupoid, a: &CrossedAction) -> bool {
    leafwise_witness(cm, x, a).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub free_on_objects: bool,
    pub leafwise_transitive: bool,
    pub arrow_stabilizers_in_kernel: bool,
    pub regular: bool,
    /// `(g, x)` with `g ≠ 1` and `g·x = x`.
    pub fixed_object: Option<(usize, usize)>,
    pub non_transitive_object: Option<usize>,
    /// `(h, f)` with `h*f = f` and `∂(h) ≠ 1`.
    pub bad_stabilizer: Option<(usize, usize)>,
    pub note: String,
}

pub fn regular_action(cm: &FiniteCrossedModule, x: &FiniteGroupoid, a: &CrossedAction) -> RegularityReport {
    let e = cm.g.identity();
    let fixed_object = cm
        .g
        .elements()
        .filter(|&g| g != e)
        .find_map(|g| (0..x.objects()).find(|&o| a.g0[g][o] == o).map(|o| (g, o)));
    let non_transitive_object = leafwise_witness(cm, x, a);
    let bad_stabilizer = cm
        .h
        .elements()
        .filter(|&h| cm.del[h] != e)
        .find_map(|h| (0..x.arrows()).find(|&f| a.h1[h][f] == f).map(|f| (h, f)));
    let regular = fixed_object.is_none() && non_transitive_object.is_none() && bad_stabilizer.is_none();
    RegularityReport {
        free_on_objects: fixed_object.is_none(),
        leafwise_transitive: non_transitive_object.is_none(),
        arrow_stabilizers_in_kernel: bad_stabilizer.is_none(),
        regular,
        fixed_object,
        non_transitive_object,
        bad_stabilizer,
        note: "leafwise transitivity is checked as orbit equality; finite models have no tangent data".into(),
    }
}

/// `G ×^H R` together with the class map `(g, f) -> [g, f]`.
#[derive(Clone, Debug)]
pub struct ReducedGroupoid {
    pub groupoid: FiniteGroupoid,
    /// `class[g * |R1| + f]` is the arrow `[g, f]`.
    pub class: Vec<usize>,
    /// A representative `(g, f)` of each arrow.
    pub representatives: Vec<(usize, usize)>,
    r_arrows: usize,
}

impl ReducedGroupoid {
    pub fn class_of(&self, g: usize, f: usize) -> usize {
        self.class[g * self.r_arrows + f]
    }

    /// `ψ: R -> G ×^H R`, identity on objects, `f -> [1, f]`.
    pub fn quotient_map(&self, cm: &FiniteCrossedModule, r: &FiniteGroupoid) -> GroupoidMorphism {
        let n = r.arrows();
        GroupoidMorphism {
            objects: (0..r.objects()).collect(),
            arrows: (0..n).map(|f| self.class_of(cm.g.identity(), f)).collect(),
        }
    }
}

/// First `(h, f)` with `h ≠ 1` and `h*f = f`.
pub fn freeness_witness(cm: &FiniteCrossedModule, r: &FiniteGroupoid, a: &CrossedAction) -> Option<(usize, usize)> {
    cm.h
        .elements()
        .filter(|&h| h != cm.h.identity())
        .find_map(|h| (0..r.arrows()).find(|&f| a.h1[h][f] == f).map(|f| (h, f)))
}

/// Arrows `(G × R1)/H` under `h·(g, f) = (g ∂(h)⁻¹, h*f)`, with
/// `s[g,f] = s(f)`, `t[g,f] = g·t(f)`, `u(x) = [1, u(x)]`,
/// `[g,f]∘[g',f'] = [gg', (g'⁻¹*f)∘f']` and `[g,f]⁻¹ = [g⁻¹, g*f⁻¹]`.
pub fn reduction_groupoid(cm: &FiniteCrossedModule, r: &FiniteGroupoid, a: &CrossedAction) -> Result<ReducedGroupoid, FinError> {
    ensure_valid(cm, r, a)?;
    if let Some((h, f)) = freeness_witness(cm, r, a) {
        return Err(FinError::NotFree { h, f });
    }
    let (g, n) = (&cm.g, r.arrows());
    let idx = |gg: usize, f: usize| gg * n + f;
    let mut class = vec![usize::MAX; g.order() * n];
    let mut representatives = Vec::new();
    for gg in g.elements() {
        for f in 0..n {
            if class[idx(gg, f)] != usize::MAX {
                continue;
            }
            let id = representatives.len();
            representatives.push((gg, f));
            for h in cm.h.elements() {
                let g2 = g.mul(gg, g.inv(cm.del[h]));
                class[idx(g2, a.h1[h][f])] = id;
            }
        }
    }
    let source: Vec<usize> = representatives.iter().map(|&(_, f)| r.source(f)).collect();
    let target: Vec<usize> = representatives.iter().map(|&(gg, f)| a.g0[gg][r.target(f)]).collect();
    for gg in g.elements() {
        for f in 0..n {
            let c = class[idx(gg, f)];
            if source[c] != r.source(f) || target[c] != a.g0[gg][r.target(f)] {
                return Err(FinError::structure("reduction", "source/target not constant on classes", vec![gg, f]));
            }
        }
    }
    let compose_rep = |(g1, f1): (usize, usize), (g2, f2): (usize, usize)| -> Option<usize> {
        let moved = a.g1[g.inv(g2)][f1];
        r.compose(moved, f2).map(|c| class[idx(g.mul(g1, g2), c)])
    };
    // Well-definedness: every pair of representatives of composable classes
    // must give the same class.
    for p in 0..g.order() * n {
        for q in 0..g.order() * n {
            let (c1, c2) = (class[p], class[q]);
            if source[c1] != target[c2] {
                continue;
            }
            let via_reps = compose_rep(representatives[c1], representatives[c2]);
            let direct = compose_rep((p / n, p % n), (q / n, q % n));
            if via_reps.is_none() || via_reps != direct {
                return Err(FinError::structure("reduction", "composition depends on representatives", vec![p, q]));
            }
        }
    }
    let unit = (0..r.objects()).map(|o| class[idx(g.identity(), r.unit(o))]).collect();
    let inverse = representatives
        .iter()
        .map(|&(gg, f)| class[idx(g.inv(gg), a.g1[gg][r.inverse(f)])])
        .collect();
    let groupoid = FiniteGroupoid::from_fn(r.objects(), source, target, unit, inverse, |c1, c2| {
        compose_rep(representatives[c1], representatives[c2]).expect("checked above")
    })?;
    Ok(ReducedGroupoid { groupoid, class, representatives, r_arrows: n })
}

/// `G•`: objects `G`, arrows `(h, g): g -> ∂(h) g` at index `h * |G| + g`.
pub fn two_group_groupoid(cm: &FiniteCrossedModule) -> FiniteGroupoid {
    let act: Vec<Vec<usize>> = cm
        .h
        .elements()
        .map(|h| cm.g.elements().map(|g| cm.g.mul(cm.del[h], g)).collect())
        .collect();
    FiniteGroupoid::action_groupoid(&cm.h, cm.g.order(), &act).expect("G• is a groupoid")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrincipalReport {
    pub essentially_surjective: bool,
    pub invariance_found: bool,
    pub canonical_map_morita: bool,
    pub principal: bool,
    /// `gamma[g * |R0| + x]` for the transformation that made the canonical
    /// map Morita, or the first coherent one found.
    pub gamma: Option<Vec<usize>>,
    pub note: String,
}

/// Cap on the number of coherent transformations tried in condition (3).
pub const GAMMA_LIMIT: usize = 100_000;

/// Principality of `psi: R -> Q` for the action `a` on `R`.
///
/// Checks (1) essential surjectivity, (2) a transformation `γ(g, x):
/// ψ(x) -> ψ(g·x)` with `γ(1,x) = u`, `γ(h, g·x)∘γ(g, x) = γ(hg, x)` and
/// naturality over `G• × R•`, and (3) that the induced map
/// `G• × R• -> R ×_Q R` is Morita for some such `γ`.
pub fn check_principal(
    cm: &FiniteCrossedModule,
    r: &FiniteGroupoid,
    a: &CrossedAction,
    q: &FiniteGroupoid,
    psi: &GroupoidMorphism,
) -> Result<PrincipalReport, FinError> {
    ensure_valid(cm, r, a)?;
    psi.check(r, q)?;
    let labels = q.orbit_labels();
    let hit: BTreeSet<usize> = psi.objects.iter().map(|&o| labels[o]).collect();
    let essentially_surjective = (0..q.objects()).all(|o| hit.contains(&labels[o]));

    let (g, h) = (&cm.g, &cm.h);
    let (o, n) = (r.objects(), r.arrows());
    let var = |gg: usize, x: usize| gg * o + x;
    let nv = g.order() * o;
    let domains: Vec<Vec<usize>> = (0..nv)
        .map(|v| {
            let (gg, x) = (v / o, v % o);
            if gg == g.identity() {
                vec![q.unit(psi.objects[x])]
            } else {
                q.hom(psi.objects[x], psi.objects[a.g0[gg][x]])
            }
        })
        .collect();
    // Constraints keyed by the largest variable they mention.
    enum C {
        Cocycle { a: usize, b: usize, c: usize },
        Natural { b: usize, c: usize, left: usize, right: usize },
    }
    let mut by_var: Vec<Vec<C>> = (0..nv).map(|_| Vec::new()).collect();
    for hh in g.elements() {
        for gg in g.elements() {
            for x in 0..o {
                let (va, vb, vc) = (var(hh, a.g0[gg][x]), var(gg, x), var(g.mul(hh, gg), x));
                by_var[va.max(vb).max(vc)].push(C::Cocycle { a: va, b: vb, c: vc });
            }
        }
    }
    for hh in h.elements() {
        for gg in g.elements() {
            for f in 0..n {
                let vb = var(gg, r.source(f));
                let vc = var(g.mul(cm.del[hh], gg), r.target(f));
                let left = psi.arrows[a.h1[hh][a.g1[gg][f]]];
                by_var[vb.max(vc)].push(C::Natural { b: vb, c: vc, left, right: psi.arrows[f] });
            }
        }
    }
    let holds = |c: &C, gamma: &[usize]| match *c {
        C::Cocycle { a, b, c } => q.compose(gamma[a], gamma[b]) == Some(gamma[c]),
        C::Natural { b, c, left, right } => q.compose(left, gamma[b]) == q.compose(gamma[c], right),
    };

    // Condition (3) setup, independent of γ.
    let gb = two_group_groupoid(cm);
    let src = gb.product(r);
    let fib = weak_fibre_product(r, psi, r, psi, q)?;
    let tau_is_morita = |gamma: &[usize]| -> bool {
        let mut objects = Vec::with_capacity(src.objects());
        for v in 0..nv {
            let (gg, x) = (v / o, v % o);
            match fib.object_index.get(&(x, gamma[v], a.g0[gg][x])) {
                Some(&i) => objects.push(i),
                None => return false,
            }
        }
        let mut arrows = Vec::with_capacity(src.arrows());
        for p in 0..src.arrows() {
            let (hg, f) = (p / n, p % n);
            let (hh, gg) = (hg / g.order(), hg % g.order());
            let key = (f, gamma[var(gg, r.source(f))], a.h1[hh][a.g1[gg][f]]);
            match fib.arrow_index.get(&key) {
                Some(&i) => arrows.push(i),
                None => return false,
            }
        }
        let tau = GroupoidMorphism { objects, arrows };
        check_morita(&src, &fib.groupoid, &tau).map(|rep| rep.is_morita()).unwrap_or(false)
    };

    let mut gamma = vec![usize::MAX; nv];
    let mut choice = vec![0usize; nv];
    let mut first: Option<Vec<usize>> = None;
    let mut winner: Option<Vec<usize>> = None;
    let mut tried = 0usize;
    let mut v = 0usize;
    'search: loop {
        if v == nv {
            tried += 1;
            if first.is_none() {
                first = Some(gamma.clone());
            }
            if tau_is_morita(&gamma) {
                winner = Some(gamma.clone());
                break;
            }
            if tried >= GAMMA_LIMIT || nv == 0 {
                break;
            }
            v -= 1;
            choice[v] += 1;
        }
        loop {
            if choice[v] < domains[v].len() {
                gamma[v] = domains[v][choice[v]];
                if by_var[v].iter().all(|c| holds(c, &gamma)) {
                    v += 1;
                    if v < nv {
                        choice[v] = 0;
                    }
                    continue 'search;
                }
                choice[v] += 1;
            } else {
                gamma[v] = usize::MAX;
                if v == 0 {
                    break 'search;
                }
                v -= 1;
                choice[v] += 1;
            }
        }
    }
    let invariance_found = first.is_some();
    let canonical_map_morita = winner.is_some();
    let mut note = "the atlas/representability clause has no finite analogue; only essential surjectivity is checked".to_string();
    if !canonical_map_morita && tried >= GAMMA_LIMIT {
        note.push_str(&format!("; search stopped after {GAMMA_LIMIT} coherent transformations"));
    }
    Ok(PrincipalReport {
        essentially_surjective,
        invariance_found,
        canonical_map_morita,
        principal: essentially_surjective && canonical_map_morita,
        gamma: winner.or(first),
        note,
    })
}

/// Isotropy order of each object.
pub fn isotropy_report(x: &FiniteGroupoid) -> Vec<usize> {
    x.isotropy_orders()
}

/// `Y = D(R0 × R0) ×_{R×R} (G• × R•)` along `(x, x') -> (x, x')` and
/// `((h, g), f) -> (f, h*(g*f))`. Its isotropy is trivial exactly when `H`
/// acts freely on arrows.
pub fn obstruction_groupoid(cm: &FiniteCrossedModule, r: &FiniteGroupoid, a: &CrossedAction) -> Result<FiniteGroupoid, FinError> {
    ensure_valid(cm, r, a)?;
    let (o, n) = (r.objects(), r.arrows());
    let d = FiniteGroupoid::discrete(o * o);
    let rr = r.product(r);
    let d_map = GroupoidMorphism { objects: (0..o * o).collect(), arrows: (0..o * o).map(|p| rr.unit(p)).collect() };
    let gb = two_group_groupoid(cm);
    let src = gb.product(r);
    let go = cm.g.order();
    let objects = (0..src.objects()).map(|v| (v % o) * o + a.g0[v / o][v % o]).collect();
    let arrows = (0..src.arrows())
        .map(|p| {
            let (hg, f) = (p / n, p % n);
            let (hh, gg) = (hg / go, hg % go);
            f * n + a.h1[hh][a.g1[gg][f]]
        })
        .collect();
    let act_map = GroupoidMorphism { objects, arrows };
    Ok(weak_fibre_product(&d, &d_map, &src, &act_map, &rr)?.groupoid)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// `Z = {h : h*u(x) = u(x) for all x}`.
    pub z: Vec<usize>,
    pub quotient_order: usize,
    /// `iso[c * |X0| + x] = h*u(x)` for a representative `h` of coset `c`.
    pub iso: Vec<usize>,
}

/// Looks for `X ≅ H/Z ⋉ X0`, `([h], x) -> h*u(x)`, verified exactly.
pub fn classify_action_groupoid(
    cm: &FiniteCrossedModule,
    x: &FiniteGroupoid,
    a: &CrossedAction,
) -> Result<Option<Classification>, FinError> {
    ensure_valid(cm, x, a)?;
    if let Some(o) = leafwise_witness(cm, x, a) {
        return Err(FinError::Precondition(format!("action is not leafwise transitive at object {o}")));
    }
    if !cm.g.is_abelian() || !cm.h.is_abelian() {
        return Err(FinError::Precondition("crossed module is not abelian".into()));
    }
    let o = x.objects();
    let z: Vec<usize> = cm.h.elements().filter(|&h| (0..o).all(|p| a.h1[h][x.unit(p)] == x.unit(p))).collect();
    let (quot, proj) = cm.h.quotient(&z)?;
    let mut reps = vec![usize::MAX; quot.order()];
    for h in cm.h.elements() {
        if reps[proj[h]] == usize::MAX {
            reps[proj[h]] = h;
        }
    }
    let act: Vec<Vec<usize>> = reps.iter().map(|&h| (0..o).map(|p| a.g0[cm.del[h]][p]).collect()).collect();
    // The induced action must be well defined on cosets.
    for h in cm.h.elements() {
        if (0..o).any(|p| a.g0[cm.del[h]][p] != act[proj[h]][p]) {
            return Ok(None);
        }
    }
    let normal_form = FiniteGroupoid::action_groupoid(&quot, o, &act)?;
    let iso: Vec<usize> = (0..normal_form.arrows()).map(|p| a.h1[reps[p / o]][x.unit(p % o)]).collect();
    if iso.iter().collect::<BTreeSet<_>>().len() != x.arrows() || iso.len() != x.arrows() {
        return Ok(None);
    }
    let phi = GroupoidMorphism { objects: (0..o).collect(), arrows: iso.clone() };
    if phi.check(&normal_form, x).is_err() {
        return Ok(None);
    }
    Ok(Some(Classification { z, quotient_order: quot.order(), iso }))
}
