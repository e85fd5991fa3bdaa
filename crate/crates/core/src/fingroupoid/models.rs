//! Small named models.

use super::action::CrossedAction;
use super::crossed::FiniteCrossedModule;
use super::group::FiniteGroup;
use super::groupoid::FiniteGroupoid;

/// A crossed module, a groupoid and an action of the one on the other.
#[derive(Clone, Debug)]
pub struct FiniteModel {
    pub cm: FiniteCrossedModule,
    pub groupoid: FiniteGroupoid,
    pub action: CrossedAction,
}

/// `ℤ/n -> ℤ/m` acting on `ℤ/n ⋉ ℤ/m`, where `ℤ/n` acts on `ℤ/m` through
/// reduction. Arrow `(k, x): x -> k + x` has index `k * m + x`;
/// `h*(k, x) = (h + k, x)` and `g*(k, x) = (k, g + x)`.
pub fn reduction_model(n: usize, m: usize) -> FiniteModel {
    let cm = FiniteCrossedModule::cyclic_reduction(n, m).expect("m divides n");
    let act: Vec<Vec<usize>> = (0..n).map(|k| (0..m).map(|x| (k + x) % m).collect()).collect();
    let groupoid = FiniteGroupoid::action_groupoid(&cm.h, m, &act).expect("action groupoid");
    let arrows = n * m;
    let g0 = (0..m).map(|g| (0..m).map(|x| (g + x) % m).collect()).collect();
    let g1 = (0..m)
        .map(|g| (0..arrows).map(|f| (f / m) * m + (g + f % m) % m).collect())
        .collect();
    let h1 = (0..n)
        .map(|h| (0..arrows).map(|f| ((h + f / m) % n) * m + f % m).collect())
        .collect();
    FiniteModel { cm, groupoid, action: CrossedAction { g0, g1, h1 } }
}

/// `ℤ/n -> ℤ/n` identity acting on `ℤ/n ⋉ pt`: `G` fixes everything and
/// `H` translates arrows.
pub fn translation_on_point(n: usize) -> FiniteModel {
    let cm = FiniteCrossedModule::identity(FiniteGroup::cyclic(n));
    let groupoid = FiniteGroupoid::classifying(&cm.h);
    let g0 = vec![vec![0]; n];
    let g1 = vec![(0..n).collect(); n];
    let h1 = (0..n).map(|h| (0..n).map(|f| (h + f) % n).collect()).collect();
    FiniteModel { cm, groupoid, action: CrossedAction { g0, g1, h1 } }
}

/// `ℤ/n -> ℤ/m` acting on `ℤ/m ⋉ ℤ/m` with `h*(k, x) = (∂h + k, x)`;
/// not free on arrows when `n > m`.
pub fn reduced_translation_model(n: usize, m: usize) -> FiniteModel {
    let cm = FiniteCrossedModule::cyclic_reduction(n, m).expect("m divides n");
    let act: Vec<Vec<usize>> = (0..m).map(|k| (0..m).map(|x| (k + x) % m).collect()).collect();
    let groupoid = FiniteGroupoid::action_groupoid(&cm.g, m, &act).expect("action groupoid");
    let arrows = m * m;
    let g0 = (0..m).map(|g| (0..m).map(|x| (g + x) % m).collect()).collect();
    let g1 = (0..m)
        .map(|g| (0..arrows).map(|f| (f / m) * m + (g + f % m) % m).collect())
        .collect();
    let h1 = (0..n)
        .map(|h| (0..arrows).map(|f| ((h % m + f / m) % m) * m + f % m).collect())
        .collect();
    FiniteModel { cm, groupoid, action: CrossedAction { g0, g1, h1 } }
}

/// `∂: H -> G` with `G` abelian acting on `G ⋉ G`: arrow `(k, x): x -> k + x`
/// has index `k * |G| + x`, `g*(k, x) = (k, g + x)` and
/// `h*(k, x) = (∂h + k, x)`. Free on arrows iff `∂` is injective.
pub fn boundary_translation(cm: FiniteCrossedModule) -> FiniteModel {
    assert!(cm.g.is_abelian(), "boundary_translation needs abelian G");
    let g = &cm.g;
    let m = g.order();
    let act: Vec<Vec<usize>> = g.elements().map(|k| g.elements().map(|x| g.mul(k, x)).collect()).collect();
    let groupoid = FiniteGroupoid::action_groupoid(g, m, &act).expect("action groupoid");
    let arrows = m * m;
    let g0 = act.clone();
    let g1 = g.elements().map(|a| (0..arrows).map(|f| (f / m) * m + g.mul(a, f % m)).collect()).collect();
    let h1 = cm
        .h
        .elements()
        .map(|h| (0..arrows).map(|f| g.mul(cm.del[h], f / m) * m + f % m).collect())
        .collect();
    FiniteModel { cm, groupoid, action: CrossedAction { g0, g1, h1 } }
}

/// `ℤ/n -> 1` acting trivially on the one-arrow groupoid.
pub fn trivial_on_point(n: usize) -> FiniteModel {
    let cm = FiniteCrossedModule::trivial_boundary(n);
    let groupoid = FiniteGroupoid::discrete(1);
    let action = CrossedAction { g0: vec![vec![0]], g1: vec![vec![0]], h1: vec![vec![0]; n] };
    FiniteModel { cm, groupoid, action }
}

/// `1 -> ℤ/n` translating the objects of the discrete groupoid on `ℤ/n`.
pub fn free_translation(n: usize) -> FiniteModel {
    let cm = FiniteCrossedModule::group(FiniteGroup::cyclic(n));
    let groupoid = FiniteGroupoid::discrete(n);
    let shift: Vec<Vec<usize>> = (0..n).map(|g| (0..n).map(|x| (g + x) % n).collect()).collect();
    let action = CrossedAction { g0: shift.clone(), g1: shift, h1: vec![(0..n).collect()] };
    FiniteModel { cm, groupoid, action }
}

/// `1 -> G` acting trivially on the one-arrow groupoid.
pub fn group_on_point(g: FiniteGroup) -> FiniteModel {
    let n = g.order();
    let cm = FiniteCrossedModule::group(g);
    let groupoid = FiniteGroupoid::discrete(1);
    let action = CrossedAction { g0: vec![vec![0]; n], g1: vec![vec![0]; n], h1: vec![vec![0]] };
    FiniteModel { cm, groupoid, action }
}

/// The trivial crossed module acting on the pair groupoid.
pub fn trivial_on_pair(n: usize) -> FiniteModel {
    let cm = FiniteCrossedModule::group(FiniteGroup::trivial());
    let groupoid = FiniteGroupoid::pair(n);
    let ids: Vec<usize> = (0..n * n).collect();
    let action = CrossedAction { g0: vec![(0..n).collect()], g1: vec![ids.clone()], h1: vec![ids] };
    FiniteModel { cm, groupoid, action }
}
