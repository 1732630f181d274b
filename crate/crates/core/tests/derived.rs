use std::collections::BTreeMap;

use meshrep::derived::*;
use meshrep::functors::point;
use meshrep::linalg::{Field, Matrix};
use meshrep::rep::{decompose, ext1, interval_module, interval_sum_rep, random_interval_sum, random_line_rep, Interval, Multiset, Rep};
use meshrep::shapes::LineQuiver;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const Q: Field = Field::Rationals;

fn rep(q: &LineQuiver, i: usize, j: usize) -> Rep {
    interval_module(q, Q, Interval::new(i, j)).unwrap()
}

fn iv(q: &LineQuiver, i: usize, j: usize, deg: i64) -> Complex {
    Complex::from_rep(&rep(q, i, j), deg)
}

fn nf(pairs: &[(i64, usize, usize)]) -> DerivedObject {
    let mut out: BTreeMap<i64, Multiset> = BTreeMap::new();
    for &(d, i, j) in pairs {
        out.entry(d).or_default().add(Interval::new(i, j), 1);
    }
    DerivedObject(out)
}

/// A random complex with modules in degrees 0 and 1, as a direct sum.
fn random_complex(q: &LineQuiver, rng: &mut ChaCha8Rng) -> Complex {
    let a = Complex::from_rep(&random_line_rep(q, Q, 2, rng), 0);
    let b = Complex::from_rep(&random_line_rep(q, Q, 2, rng), 1);
    Complex::direct_sum(&[&a, &b])
}

#[test]
fn shift_examples() {
    let q = LineQuiver::linear(3);
    let x = iv(&q, 1, 2, 0);
    assert_eq!(x.shift(0), x);
    assert_eq!(x.shift(1), iv(&q, 1, 2, 1));
    let c = cone(&iv(&q, 2, 3, 0), &iv(&q, 1, 3, 0), &ChainMap::zero());
    assert_eq!(c.shift(1).shift(-1), c);
    assert_eq!(normal_form(&q, &c.shift(2)), normal_form(&q, &c).shift(2));
}

#[test]
fn cone_examples() {
    let q = LineQuiver::linear(3);
    let x = iv(&q, 1, 2, 0);
    assert!(cone(&x, &x, &ChainMap::identity(&x)).is_acyclic());
    assert!(normal_form(&q, &cone(&x, &x, &ChainMap::identity(&x))).is_zero());

    let y = iv(&q, 2, 3, 0);
    assert_eq!(normal_form(&q, &cone(&x, &y, &ChainMap::zero())), nf(&[(0, 2, 3), (1, 1, 2)]));

    let (sub, whole) = (rep(&q, 2, 3), rep(&q, 1, 3));
    let incl = sub.hom_space(&whole).unwrap();
    assert_eq!(incl.len(), 1);
    let f = ChainMap::from_rep_map(&incl[0], 0);
    let (cs, cw) = (Complex::from_rep(&sub, 0), Complex::from_rep(&whole, 0));
    f.check(&cs, &cw).unwrap();
    let c = cone(&cs, &cw, &f);
    assert_eq!(normal_form(&q, &c), nf(&[(0, 1, 1)]));
    let (fib, _) = fiber(&cs, &cw, &f);
    assert_eq!(normal_form(&q, &fib), nf(&[(-1, 1, 1)]));
}

#[test]
fn cone_rejects_non_chain_maps() {
    let q = LineQuiver::linear(2);
    let (x, y) = (iv(&q, 1, 2, 0), iv(&q, 2, 2, 0));
    // the identity at vertex 1 and zero at vertex 2 is not natural
    let bad = ChainMap { comps: BTreeMap::from([(0, vec![Matrix::identity(Q, 1), Matrix::zeros(Q, 1, 1)])]) };
    assert!(bad.check(&x, &iv(&q, 1, 2, 0)).is_err());
    assert!(ChainMap::zero().check(&x, &y).is_ok());
}

#[test]
fn normalize_examples() {
    let q = LineQuiver::linear(3);
    let m = interval_sum_rep(&q, Q, &Multiset(BTreeMap::from([(Interval::new(1, 2), 2), (Interval::new(3, 3), 1)])));
    assert_eq!(normal_form(&q, &Complex::from_rep(&m, 0)), DerivedObject(BTreeMap::from([(0, decompose(&q, &m))])));
    assert!(normal_form(&q, &Complex::zero(iv(&q, 1, 1, 0).shape().clone(), Q)).is_zero());
    assert_eq!(nf(&[(1, 1, 2), (0, 3, 3)]).to_string(), "ΣM[1,2] + M[3,3]");
    assert_eq!(DerivedObject::new().to_string(), "0");
}

#[test]
fn derived_hom_examples() {
    let q = LineQuiver::linear(3);
    for i in 1..=3 {
        for j in i..=3 {
            assert!(derived_hom_dim(&q, &iv(&q, i, j, 0), &iv(&q, i, j, 0), 0) >= 1);
            for (k, l) in [(1, 1), (1, 3), (2, 3)] {
                assert_eq!(derived_hom_dim(&q, &iv(&q, i, j, 0), &iv(&q, k, l, 2), 0), 0);
            }
        }
    }
    assert_eq!(derived_hom_dim(&q, &iv(&q, 1, 1, 0), &iv(&q, 2, 3, 1), 0), 1);
    assert_eq!(derived_hom_dim(&q, &iv(&q, 1, 1, 0), &iv(&q, 2, 3, 0), 1), 1);
    assert_eq!(derived_hom_dim(&q, &iv(&q, 2, 3, 0), &iv(&q, 1, 3, 0), 0), 1);
}

fn in_degree_zero(ms: Multiset) -> DerivedObject {
    if ms.is_empty() {
        DerivedObject::new()
    } else {
        DerivedObject(BTreeMap::from([(0, ms)]))
    }
}

fn point_k(deg: i64) -> Complex {
    Complex::from_rep(&Rep::indicator(point(), Q, &[true]), deg)
}

#[test]
fn bicartesian_examples() {
    let k = point_k(0);
    let id = ChainMap::identity(&k);
    assert!(is_bicartesian(&k, &k, &k, &k, &id, &id, &id, &id));

    // X -> cone(id_X) -> ΣX with the zero corner
    let q = LineQuiver::linear(2);
    let x = iv(&q, 1, 2, 0);
    let cx = cone(&x, &x, &ChainMap::identity(&x));
    let incl = cone_inclusion(&x, &x, &cx);
    let sx = x.shift(1);
    let proj = ChainMap {
        comps: BTreeMap::from([(1, (0..2).map(|v| Matrix::identity(Q, sx.dim(1, v))).collect())]),
    };
    proj.check(&cx, &sx).unwrap();
    let zero = Complex::zero(x.shape().clone(), Q);
    let z = ChainMap::zero();
    assert!(is_bicartesian(&x, &cx, &zero, &sx, &incl, &z, &proj, &z));

    // k -> k ⊕ k -> 0 leaves homology k
    let empty = Complex::zero(point(), Q);
    assert!(!is_bicartesian(&k, &k, &k, &empty, &id, &id, &z, &z));
    // a corner moved by one degree is not bicartesian either
    assert!(!is_bicartesian(&k, &k, &k, &point_k(1), &id, &id, &z, &z));
}

/// `Hom_D(X, Σ^d Y)` from summand pairs: Hom in equal degrees, Ext^1 one step up.
fn oracle_hom(q: &LineQuiver, x: &DerivedObject, y: &DerivedObject, d: i64) -> usize {
    let mut total = 0;
    for (&i, mx) in &x.0 {
        for (&j, my) in &y.0 {
            for (a, ma) in mx.iter() {
                for (b, mb) in my.iter() {
                    let (ra, rb) = (rep(q, a.i, a.j), rep(q, b.i, b.j));
                    let per = match j + d - i {
                        0 => ra.hom_dim(&rb).unwrap(),
                        1 => ext1(q, &ra, &rb).unwrap(),
                        _ => 0,
                    };
                    total += per * ma * mb;
                }
            }
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn acyclic_extensions_keep_the_normal_form(n in 1usize..=4, mask in any::<u32>(), seed in any::<u64>()) {
        let qs = LineQuiver::all_orientations(n);
        let q = &qs[mask as usize % qs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, ms) = random_interval_sum(q, Q, 2, &mut rng);
        let x = Complex::from_rep(&m, 0);
        prop_assert_eq!(normal_form(q, &x), in_degree_zero(ms));
        let a = random_complex(q, &mut rng);
        let b = Complex::from_rep(&random_line_rep(q, Q, 2, &mut rng), -1);
        let noise = [cone(&a, &a, &ChainMap::identity(&a)), cone(&b, &b, &ChainMap::identity(&b)).shift(3)];
        let ext = Complex::direct_sum(&[&x, &noise[0], &noise[1]]);
        prop_assert_eq!(normal_form(q, &ext), normal_form(q, &x));
        prop_assert_eq!(normal_form(q, &ext.minimized()), normal_form(q, &x));
    }

    #[test]
    fn hom_dims_are_shift_invariant(n in 1usize..=4, mask in any::<u32>(), seed in any::<u64>(), d in -2i64..=2, k in -2i64..=2) {
        let qs = LineQuiver::all_orientations(n);
        let q = &qs[mask as usize % qs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_complex(q, &mut rng), random_complex(q, &mut rng));
        let h = derived_hom_dim(q, &x, &y, d);
        prop_assert_eq!(derived_hom_dim(q, &x.shift(k), &y.shift(k), d), h);
        prop_assert_eq!(derived_hom_dim(q, &x, &y.shift(k), d - k), h);
        prop_assert_eq!(h, oracle_hom(q, &normal_form(q, &x), &normal_form(q, &y), d));
    }
}
