use stacky_core::fingroupoid::models::*;
use stacky_core::fingroupoid::*;

#[test]
fn action_validation() {
    let m = translation_on_point(2);
    assert!(validate_action(&m.cm, &m.groupoid, &m.action).unwrap().passed);

    let m = reduction_model(4, 2);
    assert!(validate_action(&m.cm, &m.groupoid, &m.action).unwrap().passed);

    let mut broken = m.action.clone();
    broken.h1 = vec![(0..m.groupoid.arrows()).collect(); 4];
    let rep = validate_action(&m.cm, &m.groupoid, &broken).unwrap();
    let v = rep.violation.unwrap();
    assert_eq!(v.equation, "natural1");
    assert_ne!(m.cm.del[v.tuple[0]], 0);

    let mut malformed = m.action.clone();
    malformed.g0.pop();
    assert!(matches!(validate_action(&m.cm, &m.groupoid, &malformed), Err(FinError::Structure { .. })));
}

#[test]
fn leafwise_transitivity() {
    let m = reduction_model(4, 2);
    assert!(leafwise_transitive(&m.cm, &m.groupoid, &m.action));
    let m = trivial_on_pair(2);
    assert!(!leafwise_transitive(&m.cm, &m.groupoid, &m.action));
    // discrete groupoid: transitive iff del(H) fixes objects
    let m = free_translation(3);
    assert!(leafwise_transitive(&m.cm, &m.groupoid, &m.action));
}

#[test]
fn regularity() {
    let m = reduction_model(2, 2);
    assert!(regular_action(&m.cm, &m.groupoid, &m.action).regular);

    let m = translation_on_point(2);
    let rep = regular_action(&m.cm, &m.groupoid, &m.action);
    assert!(!rep.free_on_objects && !rep.regular);

    // Z/2 identity acting trivially on the point: h = 1 fixes the only
    // arrow but is not in ker del.
    let cm = FiniteCrossedModule::identity(FiniteGroup::cyclic(2));
    let groupoid = FiniteGroupoid::discrete(1);
    let action = CrossedAction { g0: vec![vec![0]; 2], g1: vec![vec![0]; 2], h1: vec![vec![0]; 2] };
    let rep = regular_action(&cm, &groupoid, &action);
    assert_eq!(rep.bad_stabilizer, Some((1, 0)));
    assert!(!rep.regular);
}

#[test]
fn reduction_examples() {
    let m = translation_on_point(2);
    let red = reduction_groupoid(&m.cm, &m.groupoid, &m.action).unwrap();
    assert_eq!((red.groupoid.objects(), red.groupoid.arrows()), (1, 2));

    let m = reduction_model(4, 2);
    let red = reduction_groupoid(&m.cm, &m.groupoid, &m.action).unwrap();
    assert_eq!((red.groupoid.objects(), red.groupoid.arrows()), (2, 4));

    let m = trivial_on_point(2);
    let err = reduction_groupoid(&m.cm, &m.groupoid, &m.action).unwrap_err();
    assert_eq!(err, FinError::NotFree { h: 1, f: 0 });
}

#[test]
fn principal_examples() {
    let m = translation_on_point(2);
    let red = reduction_groupoid(&m.cm, &m.groupoid, &m.action).unwrap();
    let psi = red.quotient_map(&m.cm, &m.groupoid);
    let rep = check_principal(&m.cm, &m.groupoid, &m.action, &red.groupoid, &psi).unwrap();
    assert!(rep.principal, "{rep:?}");

    // identity with a nontrivial G: the canonical map is not Morita
    let m = group_on_point(FiniteGroup::cyclic(2));
    let id = GroupoidMorphism::identity(&m.groupoid);
    let rep = check_principal(&m.cm, &m.groupoid, &m.action, &m.groupoid, &id).unwrap();
    assert!(rep.invariance_found);
    assert!(!rep.canonical_map_morita && !rep.principal);

    // pt -> BG
    let g = FiniteGroup::cyclic(3);
    let m = group_on_point(g.clone());
    let bg = FiniteGroupoid::classifying(&g);
    let psi = GroupoidMorphism { objects: vec![0], arrows: vec![0] };
    let rep = check_principal(&m.cm, &m.groupoid, &m.action, &bg, &psi).unwrap();
    assert!(rep.principal);
}

#[test]
fn principal_on_every_free_model() {
    for m in [reduction_model(4, 2), reduction_model(2, 2), reduction_model(6, 3), translation_on_point(3), free_translation(3)] {
        let red = reduction_groupoid(&m.cm, &m.groupoid, &m.action).unwrap();
        let psi = red.quotient_map(&m.cm, &m.groupoid);
        let rep = check_principal(&m.cm, &m.groupoid, &m.action, &red.groupoid, &psi).unwrap();
        assert!(rep.principal, "{rep:?}");
    }
}

#[test]
fn isotropy_and_obstruction() {
    assert_eq!(isotropy_report(&FiniteGroupoid::pair(3)), vec![1, 1, 1]);
    assert_eq!(isotropy_report(&FiniteGroupoid::classifying(&FiniteGroup::cyclic(4))), vec![4]);

    for m in [trivial_on_point(2), reduced_translation_model(4, 2)] {
        assert!(reduction_groupoid(&m.cm, &m.groupoid, &m.action).is_err());
        let y = obstruction_groupoid(&m.cm, &m.groupoid, &m.action).unwrap();
        assert!(isotropy_report(&y).iter().any(|&k| k >= 2));
    }
    for m in [reduction_model(4, 2), translation_on_point(2)] {
        let y = obstruction_groupoid(&m.cm, &m.groupoid, &m.action).unwrap();
        assert!(isotropy_report(&y).iter().all(|&k| k == 1));
    }
}

#[test]
fn morita_moves() {
    let cm = FiniteCrossedModule::cyclic_reduction(4, 2).unwrap();
    let spec = MoveSpec {
        restrict: Some(vec![0, 1]),
        extend: Some((cm.g.clone(), vec![0, 1])),
        quotient: Some(vec![0, 1]),
    };
    let rep = finite_morita_moves(&cm, &spec);
    assert!(rep.restricted.unwrap().unwrap().report.is_morita());
    assert!(rep.extended.unwrap().unwrap().report.is_morita());
    assert!(matches!(rep.quotient.unwrap(), Err(FinError::Precondition(_))));
}

#[test]
fn classification() {
    let m = reduction_model(4, 2);
    let c = classify_action_groupoid(&m.cm, &m.groupoid, &m.action).unwrap().unwrap();
    assert_eq!(c.z, vec![0]);
    assert_eq!(c.iso, (0..8).collect::<Vec<_>>());

    let m = reduced_translation_model(4, 2);
    let c = classify_action_groupoid(&m.cm, &m.groupoid, &m.action).unwrap().unwrap();
    assert_eq!(c.z, vec![0, 2]);
    assert_eq!(c.quotient_order, 2);

    let m = trivial_on_pair(2);
    assert!(matches!(classify_action_groupoid(&m.cm, &m.groupoid, &m.action), Err(FinError::Precondition(_))));
}
