use num::complex::Complex64 as C;
use proptest::prelude::*;

use syz::affine_base::{double, exchange_structures, AffineBase, BasePair, Sheet, SingularPoint, Structure, Topology};
use syz::catalog::{self, Example};
use syz::rational::{q, qi, Pt, Q};
use syz::superpotential::{weight, DiscClass, EnergyScalar, LaurentElement};
use syz::tropical::{rays_for_base, trace_ray_doubled, RayEnd};
use syz::wallcross::{corrected_gluing_double, corrected_gluing_single, cross_wall_element, involution_compatible, Support, Wall};
use syz::geom;

fn rational() -> impl Strategy<Value = Q> {
    (0i64..12, 1i64..5).prop_map(|(n, d)| q(n, d))
}

fn scalar() -> impl Strategy<Value = EnergyScalar> {
    prop::collection::vec((-3i64..4, rational()), 0..3).prop_map(|t| EnergyScalar::from_terms(t.into_iter().map(|(c, a)| (qi(c), a)).collect()))
}

fn element() -> impl Strategy<Value = LaurentElement> {
    prop::collection::vec((prop::collection::vec(-2i64..3, 2), scalar()), 0..4).prop_map(|t| LaurentElement::from_terms(2, t))
}

fn wall() -> Wall {
    let f = LaurentElement::one(2).add(&LaurentElement::q_monomial(vec![0, -1], qi(1)));
    Wall::new(Support::Ray { origin: Pt::zero(), direction: Pt::ints(0, 1) }, vec![1, 0], f).unwrap()
}

proptest! {
    #[test]
    fn ring_axioms(a in element(), b in element(), c in element()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&LaurentElement::one(2)), a.clone());
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn evaluation_is_multiplicative(a in element(), b in element(), x in 0.3..2.0f64, y in 0.3..2.0f64, t in 0.0..std::f64::consts::TAU, qv in 0.1..0.9f64) {
        let p = [C::from_polar(x, t), C::new(y, 0.5)];
        let lhs = a.mul(&b).evaluate(&p, qv).unwrap();
        let rhs = a.evaluate(&p, qv).unwrap() * b.evaluate(&p, qv).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn wall_crossing_is_a_ring_map(a in element(), b in element(), sign in prop::sample::select(vec![1i64, -1])) {
        let w = wall();
        let n = qi(6);
        let lhs = cross_wall_element(&w, &a.mul(&b), sign, Some(&n)).unwrap();
        let rhs = cross_wall_element(&w, &a, sign, Some(&n)).unwrap().mul(&cross_wall_element(&w, &b, sign, Some(&n)).unwrap()).truncate(&n);
        prop_assert_eq!(lhs, rhs);
        let back = cross_wall_element(&w, &cross_wall_element(&w, &a, sign, Some(&n)).unwrap(), -sign, Some(&n)).unwrap();
        prop_assert_eq!(back, a.truncate(&n));
    }

    #[test]
    fn only_the_double_gluing_is_symmetric(n in 1i64..400, d in 1i64..60) {
        let eps = q(n, d);
        prop_assert!(!involution_compatible(&corrected_gluing_single(&eps).unwrap()));
        prop_assert!(involution_compatible(&corrected_gluing_double(&eps).unwrap()));
    }

    #[test]
    fn maslov_index_is_even(k in 0u32..50, e in prop::collection::vec(-3i64..4, 1..3)) {
        let m = DiscClass::new(e, qi(1), k).maslov_index();
        prop_assert_eq!(m % 2, 0);
        prop_assert_eq!(m, 2 * k);
    }

    #[test]
    fn cp1_weights_multiply_to_q_lambda(n in 1i64..40, d in 1i64..9, frac in 1i64..99) {
        let lambda = q(n, d);
        let t = &lambda * q(frac, 100);
        let b1 = DiscClass::new(vec![1], t.clone(), 1);
        let b2 = DiscClass::new(vec![-1], &lambda - &t, 1);
        let prod = weight(&b1).unwrap().mul(&weight(&b2).unwrap());
        prop_assert_eq!(prod, LaurentElement::scalar(1, EnergyScalar::q_pow(lambda)));
    }

    #[test]
    fn exchange_is_an_involution(l in rational(), g in rational()) {
        let l = l + qi(1);
        let g = g + qi(1);
        let circle = |s| {
            let mut b = AffineBase::interval(l.clone(), g.clone());
            b.topology = Topology::Circle;
            b.structure = s;
            b
        };
        let p = BasePair::new(circle(Structure::Symplectic), circle(Structure::Complex));
        let x = exchange_structures(&p).unwrap();
        let lx = x.symplectic_base.lengths.clone().unwrap();
        prop_assert_eq!((lx.symplectic, lx.complex), (g.clone(), l.clone()));
        prop_assert_eq!(exchange_structures(&x).unwrap(), p);
    }

    #[test]
    fn doubling_an_interval_doubles_lengths(l in rational(), g in rational()) {
        let (l, g) = (l + qi(1), g + qi(1));
        let d = double(&AffineBase::interval(l.clone(), g.clone()), vec![]).unwrap().lengths().unwrap();
        prop_assert_eq!((d.symplectic, d.complex), (l * qi(2), g * qi(2)));
    }

    #[test]
    fn rays_are_primitive_and_stay_in_the_base(
        xs in prop::collection::vec((1i64..8, 1i64..8, prop::sample::select(vec![[1i64, 0], [0, 1], [1, 1], [1, -1], [2, 1], [1, 2]]), any::<bool>()), 1..5),
    ) {
        let square = vec![Pt::ints(0, 0), Pt::ints(8, 0), Pt::ints(8, 8), Pt::ints(0, 8)];
        let mut pts: Vec<SingularPoint> = vec![];
        for (x, y, v, flip) in xs {
            let p = Pt::ints(x, y);
            if pts.iter().any(|s| s.position == p) {
                continue;
            }
            let d = if flip { Pt::from_int_vec([-v[0], -v[1]]) } else { Pt::from_int_vec(v) };
            let (t, _) = geom::exit_param(&square, &p, &d).unwrap();
            pts.push(SingularPoint::new(p.clone(), v, p.add(&d.scale(&t))));
        }
        let base = AffineBase::disc(Structure::Symplectic, square.clone(), pts, 0);
        prop_assume!(base.validate().is_ok());
        for r in rays_for_base(&base, None).unwrap() {
            prop_assert!(syz::rational::is_primitive(r.direction));
            for c in &r.crossings {
                prop_assert!(syz::rational::is_primitive(c.after));
            }
            for t in &r.trace {
                prop_assert!(geom::inside_closed(&square, &t.point));
            }
        }
    }
}

/// On the doubled res-e1 complex chart, mirroring a ray's origin mirrors the ray.
#[test]
fn involution_acts_on_rays() {
    let Example::DoubledPair(p) = catalog::load("k3-double").unwrap() else { panic!() };
    let d = &p.complex_base;
    for id in d.point_ids() {
        for s in [1, -1] {
            let a = trace_ray_doubled(d, id, s, None).unwrap();
            let b = trace_ray_doubled(d, id.mirror(), s, None).unwrap();
            assert_eq!(a.trace.len(), b.trace.len(), "{id} {s}");
            for (x, y) in a.trace.iter().zip(&b.trace) {
                assert_eq!(x.point, y.point);
                let flipped = match x.sheet {
                    Sheet::Seam => Sheet::Seam,
                    other => other.flip(),
                };
                assert_eq!(y.sheet, flipped);
            }
            let mirror_end = |e: &RayEnd| match e {
                RayEnd::HeadOn { target } => RayEnd::HeadOn { target: target.mirror() },
                RayEnd::SeamCut { cut } => RayEnd::SeamCut { cut: cut.mirror() },
                other => other.clone(),
            };
            assert_eq!(b.end, mirror_end(&a.end));
        }
    }
}
