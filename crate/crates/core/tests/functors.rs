use std::collections::BTreeMap;
use std::sync::Arc;

use meshrep::derived::{cone, normal_form, ChainMap, Complex, DerivedObject};
use meshrep::functors::{coxeter_minus, coxeter_plus, reflect_minus, reflect_plus, serre, transport, transport_steps, FunctorTag};
use meshrep::linalg::Field;
use meshrep::rep::{interval_module, interval_sum, random_line_rep, Interval, Rep, RepMap};
use meshrep::shapes::{LineQuiver, Poset, Step};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn iv(q: &LineQuiver, i: usize, j: usize) -> Complex {
    Complex::from_rep(&interval_module(q, Field::Rationals, Interval::new(i, j)).unwrap(), 0)
}

#[test]
fn reflect_examples() {
    let q = LineQuiver::linear(2);
    let (q2, c) = reflect_plus(&q, 2, &iv(&q, 2, 2)).unwrap();
    assert_eq!(q2.code(), "B");
    assert_eq!(normal_form(&q2, &c), DerivedObject::single(Interval::new(2, 2), -1));
    let (_, c) = reflect_plus(&q, 2, &iv(&q, 1, 2)).unwrap();
    assert_eq!(normal_form(&q2, &c), DerivedObject::single(Interval::new(1, 1), 0));
    let (q3, back) = reflect_minus(&q2, 2, &c).unwrap();
    assert_eq!(q3, q);
    assert_eq!(normal_form(&q, &back), DerivedObject::single(Interval::new(1, 2), 0));
}

#[test]
fn coxeter_and_serre_on_projective() {
    let q = LineQuiver::linear(3);
    let p1 = iv(&q, 1, 3);
    let c = coxeter_plus(&q, &p1).unwrap();
    assert_eq!(normal_form(&q, &c), DerivedObject::single(Interval::new(1, 1), -1));
    assert_eq!(normal_form(&q, &serre(&q, &p1).unwrap()), DerivedObject::single(Interval::new(1, 1), 0));
    let back = coxeter_minus(&q, &c).unwrap();
    assert_eq!(normal_form(&q, &back), DerivedObject::single(Interval::new(1, 3), 0));
}

fn zero(q: &LineQuiver) -> Complex {
    Complex::zero(Arc::new(q.poset()), Field::Rationals)
}

#[test]
fn reflect_minus_inverts_the_first_example() {
    let q2 = LineQuiver::parse("1<-2").unwrap();
    let x = iv(&q2, 2, 2).shift(-1);
    let (q, back) = reflect_minus(&q2, 2, &x).unwrap();
    assert_eq!(q, LineQuiver::linear(2));
    assert_eq!(normal_form(&q, &back), DerivedObject::single(Interval::new(2, 2), 0));
    assert!(reflect_plus(&q2, 2, &x).is_err());
}

#[test]
fn functors_kill_zero() {
    for q in LineQuiver::all_orientations(3) {
        for f in FunctorTag::all_for(&q) {
            let out = f.apply(&q, &zero(&q)).unwrap();
            assert!(out.is_acyclic(), "{f} on {q}");
        }
    }
}

#[test]
fn reflections_invert_on_all_intervals_of_a3() {
    let q = LineQuiver::linear(3);
    for (i, j) in [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)] {
        let (q2, y) = reflect_plus(&q, 3, &iv(&q, i, j)).unwrap();
        let (q3, z) = reflect_minus(&q2, 3, &y).unwrap();
        assert_eq!(q3, q);
        assert_eq!(normal_form(&q, &z), DerivedObject::single(Interval::new(i, j), 0));
    }
}

#[test]
fn coxeter_inverse_on_intervals() {
    for n in 1..=5 {
        for q in LineQuiver::all_orientations(n) {
            for ivl in Interval::all(n) {
                let x = iv(&q, ivl.i, ivl.j);
                let y = coxeter_minus(&q, &coxeter_plus(&q, &x).unwrap()).unwrap();
                assert_eq!(normal_form(&q, &y), DerivedObject::single(ivl, 0), "{q} {ivl}");
            }
        }
    }
}

#[test]
fn transport_round_trips() {
    let a2 = LineQuiver::linear(2);
    let b = LineQuiver::parse("1<-2").unwrap();
    let x = iv(&a2, 1, 2);
    assert_eq!(transport_steps(&a2, &b).unwrap(), [Step::Minus(1)]);
    assert_eq!(normal_form(&b, &transport(&a2, &b, &x).unwrap()), normal_form(&b, &reflect_minus(&a2, 1, &x).unwrap().1));
    assert_eq!(normal_form(&a2, &transport(&a2, &a2, &x).unwrap()), normal_form(&a2, &x));
    assert!(transport(&a2, &LineQuiver::linear(3), &x).is_err());
    for n in 1..=4 {
        for q in LineQuiver::all_orientations(n) {
            for q2 in LineQuiver::all_orientations(n) {
                for ivl in Interval::all(n) {
                    let x = iv(&q, ivl.i, ivl.j);
                    let back = transport(&q2, &q, &transport(&q, &q2, &x).unwrap()).unwrap();
                    assert_eq!(normal_form(&q, &back), DerivedObject::single(ivl, 0), "{q} -> {q2} on {ivl}");
                }
            }
        }
    }
}

#[test]
fn serre_sends_projectives_to_injectives() {
    let q = LineQuiver::linear(3);
    let x = Complex::from_rep(&interval_sum(&q, Field::Rationals, &[Interval::new(1, 3), Interval::new(2, 3), Interval::new(3, 3)]), 0);
    let s = serre(&q, &x).unwrap();
    // P1 + P2 + P3 goes to I1 + I2 + I3
    let expected = Complex::from_rep(&interval_sum(&q, Field::Rationals, &[Interval::new(1, 1), Interval::new(1, 2), Interval::new(1, 3)]), 0);
    assert_eq!(normal_form(&q, &s), normal_form(&q, &expected));
    assert!(serre(&q, &zero(&q)).unwrap().is_acyclic());
}

/// `φ: X -> Y` packaged as one complex over `Q x [2]`.
fn as_arrow(q: &LineQuiver, x: &Complex, y: &Complex, phi: &ChainMap) -> Complex {
    let shape = Arc::new(q.poset().product(&Poset::chain(2)));
    let sh = shape.clone();
    let field = x.field();
    let side = |r: usize| if r == 0 { x } else { y };
    Complex::build(
        shape,
        field,
        x.lo().min(y.lo()),
        x.hi().max(y.hi()),
        |i, v| side(v % 2).dim(i, v / 2),
        |i, e| {
            let (s, t) = sh.hasse()[e];
            if s % 2 == t % 2 {
                side(s % 2).map_between(i, s / 2, t / 2)
            } else {
                phi.comp(x, y, i, s / 2)
            }
        },
        |i, v| side(v % 2).diff(i, v / 2),
    )
}

fn at(q: &LineQuiver, z: &Complex, r: usize) -> Complex {
    let obj: Vec<usize> = (0..q.n()).map(|p| p * 2 + r).collect();
    z.restrict(Arc::new(q.poset()), &obj)
}

fn arrow_part(q: &LineQuiver, z: &Complex) -> ChainMap {
    let mut comps = BTreeMap::new();
    for i in z.degrees() {
        comps.insert(i, (0..q.n()).map(|p| z.map_between(i, p * 2, p * 2 + 1)).collect());
    }
    ChainMap { comps }
}

fn random_map(x: &Rep, y: &Rep, rng: &mut ChaCha8Rng) -> RepMap {
    let basis = x.hom_space(y).unwrap();
    basis.iter().fold(x.zero_map(y), |acc, b| acc.add(&b.scale(rng.gen_range(-2..=2))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functors_preserve_cones(n in 1usize..=4, mask in any::<u32>(), pick in any::<u32>(), seed in any::<u64>()) {
        let qs = LineQuiver::all_orientations(n);
        let q = &qs[mask as usize % qs.len()];
        let tags = FunctorTag::all_for(q);
        let tag = &tags[pick as usize % tags.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = Field::Rationals;
        let (xr, yr) = (random_line_rep(q, field, 2, &mut rng), random_line_rep(q, field, 2, &mut rng));
        let f = random_map(&xr, &yr, &mut rng);
        let (x, y, phi) = (Complex::from_rep(&xr, 0), Complex::from_rep(&yr, 0), ChainMap::from_rep_map(&f, 0));
        let q2 = tag.target(q).unwrap();

        let fz = tag.apply_first(q, &as_arrow(q, &x, &y, &phi), &Arc::new(Poset::chain(2))).unwrap();
        let (fx, fy, fphi) = (at(&q2, &fz, 0), at(&q2, &fz, 1), arrow_part(&q2, &fz));
        prop_assert!(fphi.check(&fx, &fy).is_ok());
        prop_assert_eq!(normal_form(&q2, &fx), normal_form(&q2, &tag.apply(q, &x).unwrap()));
        let lhs = normal_form(&q2, &cone(&fx, &fy, &fphi));
        let rhs = normal_form(&q2, &tag.apply(q, &cone(&x, &y, &phi)).unwrap());
        prop_assert_eq!(lhs, rhs, "{} on {}", tag, q);
    }
}
