//! Finite crossed modules, their morphisms and the three Morita moves.

use std::collections::BTreeSet;

use serde::Serialize;

use super::group::FiniteGroup;
use super::FinError;

/// `del: H -> G` and `alpha[g][h]` is `ᵍh`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCrossedModule {
    pub g: FiniteGroup,
    pub h: FiniteGroup,
    pub del: Vec<usize>,
    pub alpha: Vec<Vec<usize>>,
}

impl FiniteCrossedModule {
    pub fn new(g: FiniteGroup, h: FiniteGroup, del: Vec<usize>, alpha: Vec<Vec<usize>>) -> Result<Self, FinError> {
        let cm = FiniteCrossedModule { g, h, del, alpha };
        cm.validate()?;
        Ok(cm)
    }

    /// Trivial `alpha`; valid only when `H` is abelian and central data agree.
    pub fn with_trivial_action(g: FiniteGroup, h: FiniteGroup, del: Vec<usize>) -> Result<Self, FinError> {
        let alpha = vec![h.elements().collect(); g.order()];
        FiniteCrossedModule::new(g, h, del, alpha)
    }

    /// `ℤ/n -> ℤ/m` reduction mod `m` (requires `m | n`), trivial action.
    pub fn cyclic_reduction(n: usize, m: usize) -> Result<Self, FinError> {
        if m == 0 || !n.is_multiple_of(m) {
            return Err(FinError::Precondition(format!("{m} does not divide {n}")));
        }
        let del = (0..n).map(|x| x % m).collect();
        FiniteCrossedModule::with_trivial_action(FiniteGroup::cyclic(m), FiniteGroup::cyclic(n), del)
    }

    /// `ℤ/n -> 1`.
    pub fn trivial_boundary(n: usize) -> Self {
        FiniteCrossedModule::with_trivial_action(FiniteGroup::trivial(), FiniteGroup::cyclic(n), vec![0; n])
            .expect("central extension of the trivial group")
    }

    /// `1 -> G`.
    pub fn group(g: FiniteGroup) -> Self {
        let alpha = vec![vec![0]; g.order()];
        FiniteCrossedModule::new(g, FiniteGroup::trivial(), vec![0], alpha).expect("group as crossed module")
    }

    /// Identity `G -> G` with the conjugation action.
    pub fn identity(g: FiniteGroup) -> Self {
        let alpha = g
            .elements()
            .map(|a| g.elements().map(|b| g.mul(g.mul(a, b), g.inv(a))).collect())
            .collect();
        let del = g.elements().collect();
        FiniteCrossedModule::new(g.clone(), g, del, alpha).expect("identity crossed module")
    }

    pub fn act(&self, g: usize, h: usize) -> usize {
        self.alpha[g][h]
    }

    /// Homomorphism, automorphism and Peiffer checks.
    pub fn validate(&self) -> Result<(), FinError> {
        let (g, h) = (&self.g, &self.h);
        let err = |what: &str, t: Vec<usize>| Err(FinError::structure("crossed module", what, t));
        if !h.is_hom(g, &self.del) {
            return err("del is not a homomorphism", vec![]);
        }
        if self.alpha.len() != g.order() || self.alpha.iter().any(|r| r.len() != h.order()) {
            return err("alpha table has the wrong shape", vec![]);
        }
        for a in g.elements() {
            let row = &self.alpha[a];
            let distinct: BTreeSet<usize> = row.iter().copied().collect();
            if distinct.len() != h.order() || !h.is_hom(h, row) {
                return err("alpha(g) is not an automorphism", vec![a]);
            }
        }
        if self.alpha[g.identity()] != h.elements().collect::<Vec<_>>() {
            return err("alpha(1) is not the identity", vec![]);
        }
        for a in g.elements() {
            for b in g.elements() {
                for x in h.elements() {
                    if self.alpha[g.mul(a, b)][x] != self.alpha[a][self.alpha[b][x]] {
                        return err("alpha is not a homomorphism", vec![a, b, x]);
                    }
                }
            }
        }
        for a in g.elements() {
            for x in h.elements() {
                if self.del[self.alpha[a][x]] != g.mul(g.mul(a, self.del[x]), g.inv(a)) {
                    return err("Peiffer: del(ᵍh) = g del(h) g⁻¹", vec![a, x]);
                }
            }
        }
        for x in h.elements() {
            for y in h.elements() {
                if self.alpha[self.del[x]][y] != h.mul(h.mul(x, y), h.inv(x)) {
                    return err("Peiffer: ^del(h) h' = h h' h⁻¹", vec![x, y]);
                }
            }
        }
        Ok(())
    }

    pub fn image(&self) -> Vec<usize> {
        self.del.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.h.elements().filter(|&x| self.del[x] == self.g.identity()).collect()
    }

    pub fn preimage(&self, elems: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = elems.iter().copied().collect();
        self.h.elements().filter(|&x| set.contains(&self.del[x])).collect()
    }
}

/// `(phi_g, phi_h)` between two crossed modules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossedMorphism {
    pub phi_g: Vec<usize>,
    pub phi_h: Vec<usize>,
}

impl CrossedMorphism {
    pub fn identity(cm: &FiniteCrossedModule) -> Self {
        CrossedMorphism { phi_g: cm.g.elements().collect(), phi_h: cm.h.elements().collect() }
    }

    pub fn check(&self, from: &FiniteCrossedModule, to: &FiniteCrossedModule) -> Result<(), FinError> {
        if !from.g.is_hom(&to.g, &self.phi_g) || !from.h.is_hom(&to.h, &self.phi_h) {
            return Err(FinError::Morphism("components are not homomorphisms".into()));
        }
        for x in from.h.elements() {
            if self.phi_g[from.del[x]] != to.del[self.phi_h[x]] {
                return Err(FinError::Morphism(format!("square does not commute at h={x}")));
            }
        }
        for a in from.g.elements() {
            for x in from.h.elements() {
                if self.phi_h[from.act(a, x)] != to.act(self.phi_g[a], self.phi_h[x]) {
                    return Err(FinError::Morphism(format!("action not preserved at (g,h)=({a},{x})")));
                }
            }
        }
        Ok(())
    }
}

/// Result of the Morita criteria for a crossed-module morphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossedMoritaReport {
    /// `G' = del'(H') phi_G(G)`.
    pub jointly_surjective: bool,
    /// `H -> H' ×_G' G`, `h -> (phi_H h, del h)` is bijective.
    pub fibre_bijective: bool,
    /// Induced maps on `ker del` and `coker del` are bijective.
    pub kernel_cokernel_iso: bool,
}

impl CrossedMoritaReport {
    pub fn is_morita(&self) -> bool {
        self.jointly_surjective && self.fibre_bijective
    }
}

pub fn check_crossed_morita(
    from: &FiniteCrossedModule,
    to: &FiniteCrossedModule,
    m: &CrossedMorphism,
) -> Result<CrossedMoritaReport, FinError> {
    m.check(from, to)?;
    let (g2, h2) = (&to.g, &to.h);
    let mut covered = BTreeSet::new();
    for y in h2.elements() {
        for a in from.g.elements() {
            covered.insert(g2.mul(to.del[y], m.phi_g[a]));
        }
    }
    let jointly_surjective = covered.len() == g2.order();

    let fibre_size = h2
        .elements()
        .map(|y| from.g.elements().filter(|&a| to.del[y] == m.phi_g[a]).count())
        .sum::<usize>();
    let images: BTreeSet<(usize, usize)> = from.h.elements().map(|x| (m.phi_h[x], from.del[x])).collect();
    let fibre_bijective = images.len() == from.h.order() && fibre_size == from.h.order();

    Ok(CrossedMoritaReport {
        jointly_surjective,
        fibre_bijective,
        kernel_cokernel_iso: kernel_cokernel_iso(from, to, m),
    })
}

fn kernel_cokernel_iso(from: &FiniteCrossedModule, to: &FiniteCrossedModule, m: &CrossedMorphism) -> bool {
    let k1 = from.kernel();
    let k2 = to.kernel();
    let k_img: BTreeSet<usize> = k1.iter().map(|&x| m.phi_h[x]).collect();
    if k_img.len() != k1.len() || k1.len() != k2.len() {
        return false;
    }
    // coker is G / del(H) as a set of cosets; del(H) is normal by Peiffer.
    let (Ok((_, p1)), Ok((_, p2))) = (from.g.quotient(&from.image()), to.g.quotient(&to.image())) else {
        return false;
    };
    let n1 = p1.iter().max().map_or(0, |v| v + 1);
    let n2 = p2.iter().max().map_or(0, |v| v + 1);
    let mut induced = vec![usize::MAX; n1];
    for a in from.g.elements() {
        let c = p2[m.phi_g[a]];
        if induced[p1[a]] != usize::MAX && induced[p1[a]] != c {
            return false;
        }
        induced[p1[a]] = c;
    }
    let distinct: BTreeSet<usize> = induced.iter().copied().collect();
    n1 == n2 && distinct.len() == n2
}

/// A moved crossed module with its connecting morphism and verification.
#[derive(Clone, Debug)]
pub struct MoveOutcome {
    pub module: FiniteCrossedModule,
    pub morphism: CrossedMorphism,
    /// `true` when the morphism points from `module` to the input.
    pub into_input: bool,
    pub report: CrossedMoritaReport,
}

/// Restriction to `G' ⊆ G` with `del(H) G' = G`; `H' = del⁻¹(G')`.
pub fn restrict(cm: &FiniteCrossedModule, sub: &[usize]) -> Result<MoveOutcome, FinError> {
    let (g2, embed_g) = cm.g.subgroup(sub)?;
    let products: BTreeSet<usize> = cm
        .image()
        .iter()
        .flat_map(|&d| embed_g.iter().map(move |&s| (d, s)))
        .map(|(d, s)| cm.g.mul(d, s))
        .collect();
    if products.len() != cm.g.order() {
        return Err(FinError::Precondition("del(H) G' does not cover G".into()));
    }
    let h_sub = cm.preimage(&embed_g);
    let (h2, embed_h) = cm.h.subgroup(&h_sub)?;
    let g_pos = |x: usize| embed_g.binary_search(&x).expect("image lies in G'");
    let h_pos = |x: usize| embed_h.binary_search(&x).expect("H' is stable");
    let del = embed_h.iter().map(|&x| g_pos(cm.del[x])).collect();
    let alpha = embed_g
        .iter()
        .map(|&a| embed_h.iter().map(|&x| h_pos(cm.act(a, x))).collect())
        .collect();
    let module = FiniteCrossedModule::new(g2, h2, del, alpha)?;
    let morphism = CrossedMorphism { phi_g: embed_g, phi_h: embed_h };
    let report = check_crossed_morita(&module, cm, &morphism)?;
    Ok(MoveOutcome { module, morphism, into_input: true, report })
}

/// Pullback along a surjective homomorphism `phi: Ĝ -> G`.
///
/// `Ĥ = H ×_G Ĝ`, `del̂(h, ĝ) = ĝ`, `ĝ·(h, ĝ') = (phi(ĝ)·h, ĝ ĝ' ĝ⁻¹)`.
pub fn extend(cm: &FiniteCrossedModule, cover: &FiniteGroup, phi: &[usize]) -> Result<MoveOutcome, FinError> {
    if !cover.is_hom(&cm.g, phi) {
        return Err(FinError::Precondition("extension map is not a homomorphism".into()));
    }
    if phi.iter().collect::<BTreeSet<_>>().len() != cm.g.order() {
        return Err(FinError::Precondition("extension map is not surjective".into()));
    }
    let pairs: Vec<(usize, usize)> = cm
        .h
        .elements()
        .flat_map(|x| cover.elements().map(move |c| (x, c)))
        .filter(|&(x, c)| cm.del[x] == phi[c])
        .collect();
    let pos = |p: (usize, usize)| pairs.binary_search(&p).expect("fibre product is closed");
    let table = pairs
        .iter()
        .map(|&(x, c)| pairs.iter().map(|&(y, d)| pos((cm.h.mul(x, y), cover.mul(c, d)))).collect())
        .collect();
    let h_hat = FiniteGroup::from_table(table)?;
    let del = pairs.iter().map(|&(_, c)| c).collect();
    let alpha = cover
        .elements()
        .map(|c| {
            pairs
                .iter()
                .map(|&(x, d)| pos((cm.act(phi[c], x), cover.mul(cover.mul(c, d), cover.inv(c)))))
                .collect()
        })
        .collect();
    let module = FiniteCrossedModule::new(cover.clone(), h_hat, del, alpha)?;
    let morphism = CrossedMorphism { phi_g: phi.to_vec(), phi_h: pairs.iter().map(|&(x, _)| x).collect() };
    let report = check_crossed_morita(&module, cm, &morphism)?;
    Ok(MoveOutcome { module, morphism, into_input: true, report })
}

/// Quotient by a normal `N ⊆ del(H)`.
///
/// `H` is divided by a normal, `G`-stable `K` that `del` maps isomorphically
/// onto `N`. Dividing by all of `del⁻¹(N)` would also kill `ker del`, so the
/// comparison map could not be Morita unless `ker del ∩ del⁻¹(N)` is trivial.
/// Returns a precondition error when no such `K` exists.
pub fn quotient(cm: &FiniteCrossedModule, normal: &[usize]) -> Result<MoveOutcome, FinError> {
    if !cm.g.is_normal(normal) {
        return Err(FinError::Precondition("N is not a normal subgroup of G".into()));
    }
    let img: BTreeSet<usize> = cm.image().into_iter().collect();
    if normal.iter().any(|n| !img.contains(n)) {
        return Err(FinError::Precondition("N is not contained in del(H)".into()));
    }
    let k = find_lift(cm, normal).ok_or_else(|| {
        FinError::Precondition("no G-stable normal subgroup of H maps isomorphically onto N".into())
    })?;
    let (g_bar, pg) = cm.g.quotient(normal)?;
    let (h_bar, ph) = cm.h.quotient(&k)?;
    let reps_h = representatives(&ph);
    let reps_g = representatives(&pg);
    let del = reps_h.iter().map(|&x| pg[cm.del[x]]).collect();
    let alpha = reps_g
        .iter()
        .map(|&a| reps_h.iter().map(|&x| ph[cm.act(a, x)]).collect())
        .collect();
    let module = FiniteCrossedModule::new(g_bar, h_bar, del, alpha)?;
    let morphism = CrossedMorphism { phi_g: pg, phi_h: ph };
    let report = check_crossed_morita(cm, &module, &morphism)?;
    Ok(MoveOutcome { module, morphism, into_input: false, report })
}

/// The literal quotient `(G/N, H/del⁻¹(N))`, for comparison with [`quotient`].
pub fn quotient_by_full_preimage(cm: &FiniteCrossedModule, normal: &[usize]) -> Result<MoveOutcome, FinError> {
    let pre = cm.preimage(normal);
    let (g_bar, pg) = cm.g.quotient(normal)?;
    let (h_bar, ph) = cm.h.quotient(&pre)?;
    let reps_h = representatives(&ph);
    let reps_g = representatives(&pg);
    let del = reps_h.iter().map(|&x| pg[cm.del[x]]).collect();
    let alpha = reps_g
        .iter()
        .map(|&a| reps_h.iter().map(|&x| ph[cm.act(a, x)]).collect())
        .collect();
    let module = FiniteCrossedModule::new(g_bar, h_bar, del, alpha)?;
    let morphism = CrossedMorphism { phi_g: pg, phi_h: ph };
    let report = check_crossed_morita(cm, &module, &morphism)?;
    Ok(MoveOutcome { module, morphism, into_input: false, report })
}

fn representatives(proj: &[usize]) -> Vec<usize> {
    let n = proj.iter().max().map_or(0, |v| v + 1);
    let mut reps = vec![usize::MAX; n];
    for (x, &c) in proj.iter().enumerate() {
        if reps[c] == usize::MAX {
            reps[c] = x;
        }
    }
    reps
}

/// Searches preimages of a generating set of `N` for a lift `K`.
fn find_lift(cm: &FiniteCrossedModule, normal: &[usize]) -> Option<Vec<usize>> {
    let gens = cm.g.generators_of(normal);
    let choices: Vec<Vec<usize>> = gens.iter().map(|&n| cm.preimage(&[n])).collect();
    let mut idx = vec![0usize; gens.len()];
    loop {
        let picked: Vec<usize> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        let k = cm.h.generated(&picked);
        if k.len() == normal.len()
            && cm.h.is_normal(&k)
            && cm.g.elements().all(|a| k.iter().all(|&x| k.binary_search(&cm.act(a, x)).is_ok()))
        {
            return Some(k);
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return None;
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Requested Morita moves; each present entry is attempted independently.
#[derive(Clone, Debug, Default)]
pub struct MoveSpec {
    pub restrict: Option<Vec<usize>>,
    pub extend: Option<(FiniteGroup, Vec<usize>)>,
    pub quotient: Option<Vec<usize>>,
}

#[derive(Debug)]
pub struct MovesReport {
    pub restricted: Option<Result<MoveOutcome, FinError>>,
    pub extended: Option<Result<MoveOutcome, FinError>>,
    pub quotient: Option<Result<MoveOutcome, FinError>>,
}

pub fn finite_morita_moves(cm: &FiniteCrossedModule, spec: &MoveSpec) -> MovesReport {
    MovesReport {
        restricted: spec.restrict.as_ref().map(|s| restrict(cm, s)),
        extended: spec.extend.as_ref().map(|(c, phi)| extend(cm, c, phi)),
        quotient: spec.quotient.as_ref().map(|n| quotient(cm, n)),
    }
}
