
use rings::*;
use sgmod::functor::{double_dual_map, dual, hom, tensor};
use sgmod::properties::{is_flat, is_injective, is_isomorphic, is_projective, min_generators};
use sgmod::{Caps, FiniteModule, ModuleMap, ResidueMatrix, RingMatrix};

#[test]
fn presentations() {
    let z4 = zmod(4);
    let m = cyclic(&z4, vec![2]);
    assert_eq!(m.order(), 2);
    let d = truncated(2);
    let m = cyclic(&d, var(&d, "x"));
    assert_eq!(m.order(), 2);
    let caps = Caps::default();
    assert!(is_isomorphic(&m, &principal(&d, var(&d, "x")), &caps).unwrap().is_yes());
    let none = FiniteModule::cokernel_of_matrix(&d, &RingMatrix::new(0, 1, vec![]).unwrap()).unwrap();
    assert!(is_isomorphic(&none, &FiniteModule::regular(&d), &caps).unwrap().is_yes());
}

#[test]
fn kernels_and_images() {
    let z4 = zmod(4);
    let reg = FiniteModule::regular(&z4);
    let two = ModuleMap::new(&reg, &reg, ResidueMatrix::from_rows(4, 1, &[[2]]).unwrap()).unwrap();
    assert_eq!(two.kernel_order().unwrap(), 2);
    assert_eq!(two.image_order().unwrap(), 2);
    let id = ModuleMap::identity(&reg);
    assert_eq!(id.kernel_order().unwrap(), 1);
    assert!(id.is_isomorphism().unwrap());

    let d = truncated(2);
    let dreg = FiniteModule::regular(&d);
    let x = d.mult_matrix(&var(&d, "x"));
    let mx = ModuleMap::new(&dreg, &dreg, x).unwrap();
    let k = mx.kernel().unwrap();
    let i = mx.image().unwrap();
    assert_eq!((k.source().order(), i.source().order()), (2, 2));
    assert!(k.then(&mx).unwrap().is_zero());
    assert!(i.factor_through(&k).is_ok());
}

#[test]
fn hom_tensor_dual_examples() {
    let caps = Caps::default();
    let z4 = zmod(4);
    let reg = FiniteModule::regular(&z4);
    let k = cyclic(&z4, vec![2]);
    assert_eq!(hom(&reg, &k, &caps).unwrap().order(), 2);
    assert_eq!(hom(&k, &reg, &caps).unwrap().order(), 2);
    assert_eq!(hom(&FiniteModule::zero(&z4), &k, &caps).unwrap().order(), 1);
    assert_eq!(tensor(&k, &reg, &caps).unwrap().order(), 2);
    assert_eq!(tensor(&k, &k, &caps).unwrap().order(), 2);
    assert_eq!(tensor(&k, &FiniteModule::zero(&z4), &caps).unwrap().order(), 1);
    let rstar = dual(&reg).unwrap().module;
    assert!(is_isomorphic(&rstar, &reg, &caps).unwrap().is_yes());
    assert_eq!(dual(&k).unwrap().module.order(), 2);
    assert_eq!(dual(&FiniteModule::zero(&z4)).unwrap().module.order(), 1);
}

#[test]
fn projective_injective_flat_examples() {
    let caps = Caps::default();
    let d = truncated(2);
    let x = principal(&d, var(&d, "x"));
    assert!(is_projective(&x, &caps).unwrap().is_no());
    assert!(is_injective(&x, &caps).unwrap().is_no());
    assert!(is_flat(&x, &caps).unwrap().is_no());
    assert!(is_flat(&FiniteModule::regular(&d), &caps).unwrap().is_yes());
    assert!(is_injective(&FiniteModule::regular(&zmod(4)), &caps).unwrap().is_yes());
    assert!(is_injective(&FiniteModule::regular(&square_zero()), &caps).unwrap().is_no());
    let z6 = zmod(6);
    assert!(is_projective(&principal(&z6, vec![3]), &caps).unwrap().is_yes());
    assert!(is_flat(&principal(&z6, vec![3]), &caps).unwrap().is_yes());
}

#[test]
fn isomorphism_examples() {
    let caps = Caps::default();
    let z4 = zmod(4);
    let k = cyclic(&z4, vec![2]);
    assert!(is_isomorphic(&k, &k, &caps).unwrap().is_yes());
    assert!(!is_isomorphic(&k, &FiniteModule::regular(&z4), &caps).unwrap().is_yes());
    let r = truncated(4);
    let x = principal(&r, var(&r, "x"));
    let x3 = principal(&r, power(&r, "x", 3));
    assert!(matches!(
        is_isomorphic(&x, &x3, &caps).unwrap().into_certificate().disproof,
        Some(sgmod::Disproof::InvariantMismatch { left: 8, right: 2, .. })
    ));
    // R/(x) and R/(y) have equal orders but different annihilators
    let s = square_zero();
    let (a, b) = (cyclic(&s, var(&s, "x")), cyclic(&s, var(&s, "y")));
    assert!(is_isomorphic(&a, &b, &caps).unwrap().into_certificate().is_no());
    let xy = FiniteModule::ideal(&s, &[var(&s, "x"), var(&s, "y")]).unwrap();
    let k = sgmod::homological::residue_module(&s, &caps).unwrap();
    assert!(is_isomorphic(&xy, &k.direct_sum(&k).unwrap().sum, &caps).unwrap().is_yes());
}

#[test]
fn generator_counts() {
    let caps = Caps::default();
    let d = truncated(2);
    assert_eq!(min_generators(&FiniteModule::free(&d, 3), &caps).unwrap(), 3);
    assert_eq!(min_generators(&principal(&d, var(&d, "x")), &caps).unwrap(), 1);
    assert_eq!(min_generators(&FiniteModule::zero(&d), &caps).unwrap(), 0);
    let s = square_zero();
    let m = FiniteModule::ideal(&s, &[var(&s, "x"), var(&s, "y")]).unwrap();
    assert_eq!(min_generators(&m, &caps).unwrap(), 2);
}

#[test]
fn double_dual_is_an_isomorphism() {
    let s = square_zero();
    for m in [cyclic(&s, var(&s, "x")), FiniteModule::regular(&s), FiniteModule::free(&s, 2)] {
        let d1 = dual(&m).unwrap();
        let d2 = dual(&d1.module).unwrap();
        assert_eq!(d1.module.order(), m.order());
        assert!(double_dual_map(&d1, &d2).unwrap().is_isomorphism().unwrap());
    }
}
