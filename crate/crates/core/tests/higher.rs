use std::collections::BTreeMap;

use meshrep::derived::Complex;
use meshrep::higher::*;
use meshrep::linalg::{Field, Matrix};
use meshrep::rep::{interval_module, random_line_rep, Interval};
use meshrep::shapes::{InducedAlpha, LineQuiver, MeshVertex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P: Field = Field::DEFAULT;

fn v(k: i64, l: i64) -> MeshVertex {
    MeshVertex::new(k, l)
}

fn g(dims: &[(i64, usize)]) -> Graded {
    Graded::new(dims.iter().copied())
}

/// A two-term base `X1 -> X2` concentrated in degree 0.
fn base2(a: usize, b: usize, m: Matrix) -> Base {
    let (x1, x2) = (g(&[(0, a)]), g(&[(0, b)]));
    let f = GradedMap::build(&x1, &x2, |_| m.clone());
    Base { field: P, values: vec![x1, x2], maps: vec![f] }
}

#[test]
fn zero_base_fills_to_zero() {
    for n in 1..=4 {
        let t = fill_base(&Base::zero(n, P)).unwrap();
        assert!(t.values().values().all(|x| x.is_zero()));
        assert!(is_distinguished(&t).distinguished);
    }
}

#[test]
fn identity_fills_with_zero_third_term() {
    let t = fill_base(&base2(1, 1, Matrix::identity(P, 1))).unwrap();
    assert!(t.value(v(1, 1)).unwrap().is_zero());
    assert_eq!(t.value(v(1, 2)).unwrap(), &g(&[(1, 1)]));
    assert_eq!(t.value(v(2, 1)).unwrap(), &g(&[(1, 1)]));
}

#[test]
fn projective_triangle_values() {
    // standard triangle of M[1,2] over 1 -> 2, frozen by hand
    let q = LineQuiver::linear(2);
    let x = Complex::from_rep(&interval_module(&q, P, Interval::new(1, 2)).unwrap(), 0);
    let t = standard_triangle(&q, &x).unwrap();
    let row = |k: i64| (1..=2).map(|l| t.value(v(k, l)).unwrap().to_string()).collect::<Vec<_>>().join(" | ");
    assert_eq!(row(0), "k | k");
    assert_eq!(row(1), "0 | k[1]");
    assert_eq!(row(2), "k[1] | 0");
    assert_eq!(row(-1), "k[-1] | 0");
    assert!(t.validate().is_ok());
}

/// Ranks of the graded pieces of a map.
fn rank(m: &GradedMap, i: i64) -> usize {
    m.0.get(&i).map_or(0, |x| x.rank())
}

#[test]
fn two_triangles_are_mapping_cone_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let b = Base::random(2, P, 3, &mut rng);
        let t = fill_base(&b).unwrap();
        let f = &b.maps[0];
        let (x1, x2) = (&b.values[0], &b.values[1]);
        // dim C_i = dim coker f_i + dim ker f_{i-1}
        let c = t.value(v(1, 1)).unwrap();
        for i in -1..=3 {
            let want = x2.dim(i) - rank(f, i) + x1.dim(i - 1) - rank(f, i - 1);
            assert_eq!(c.dim(i), want, "cone dimension in degree {i}");
        }
        // X1 -> X2 -> C -> ΣX1 -> ΣX2 is exact, the last map being Σf under phi
        let phi1 = t.phi(v(0, 1)).unwrap();
        let phi2 = t.phi(v(0, 2)).unwrap();
        let a = t.arrow(v(0, 2), v(1, 1)).unwrap();
        let fv = t.value(v(1, 2)).unwrap();
        let bmap = phi1.after(t.arrow(v(1, 1), v(1, 2)).unwrap(), P, c, fv, &x1.shift(1));
        let last = t.map_le(v(1, 2), v(2, 1)).unwrap();
        let inv1 = phi1.inverse(fv, &x1.shift(1)).unwrap();
        let sf = phi2.after(&last.after(&inv1, P, &x1.shift(1), fv, t.value(v(2, 1)).unwrap()), P, &x1.shift(1), t.value(v(2, 1)).unwrap(), &x2.shift(1));
        assert_eq!(sf, f.shift(1));
        for i in -1..=3 {
            assert_eq!(x2.dim(i) - rank(a, i), rank(f, i), "exact at X2, degree {i}");
            assert_eq!(c.dim(i) - rank(&bmap, i), rank(a, i), "exact at C, degree {i}");
            assert_eq!(x1.dim(i - 1) - rank(f, i - 1), rank(&bmap, i), "exact at ΣX1, degree {i}");
        }
    }
}

fn random_standard(n: usize, rng: &mut ChaCha8Rng) -> NTriangle {
    let qs = LineQuiver::all_orientations(n);
    let q = &qs[rand::Rng::gen_range(rng, 0..qs.len())];
    let x = Complex::from_rep(&random_line_rep(q, P, 2, rng), 0);
    standard_triangle(q, &x).unwrap()
}

#[test]
fn flip_twice_is_a_period_translation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=3 {
        let t = random_standard(n, &mut rng);
        let ff = t.flip().unwrap().flip().unwrap();
        let mut tt = t.clone();
        for _ in 0..=n {
            tt = tt.translate_inv().unwrap();
        }
        assert_eq!(ff, tt);
    }
}

#[test]
fn translation_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 2..=4 {
        let t = random_standard(n, &mut rng);
        assert_eq!(t.translate().unwrap().translate_inv().unwrap(), t);
        assert_eq!(t.translate_inv().unwrap().translate().unwrap(), t);
        // without a model the new column is rebuilt through phi, which agrees up to isomorphism
        let free = t.forget_model().translate().unwrap().translate_inv().unwrap();
        assert_eq!(free.values(), t.values());
        assert!(is_distinguished(&free).distinguished);
    }
}

#[test]
fn identity_extends_to_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 2..=4 {
        let b = Base::random(n, P, 2, &mut rng);
        let t = fill_base(&b).unwrap();
        let ids: Vec<GradedMap> = b.values.iter().map(|x| GradedMap::identity(P, x)).collect();
        let mu = extend_morphism(&t, &t, &ids).unwrap();
        for (w, m) in &mu.comps {
            assert_eq!(m, &GradedMap::identity(P, t.value(*w).unwrap()), "at {w}");
        }
    }
}

#[test]
fn identity_alpha_is_restriction_to_itself() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = fill_base(&Base::random(3, P, 2, &mut rng)).unwrap();
    assert_eq!(t.inverse_image(&InducedAlpha::identity(3)).unwrap(), t);
}

#[test]
fn sign_is_visible_only_against_the_model() {
    let q = LineQuiver::linear(2);
    let x = Complex::from_rep(&interval_module(&q, Field::Rationals, Interval::new(1, 2)).unwrap(), 0);
    let t = standard_triangle(&q, &x).unwrap();
    let signed = t.flip().unwrap();
    let unsigned = t.flip_unsigned().unwrap();
    assert_eq!(canonical_mismatch(&signed).unwrap(), None);
    assert!(canonical_mismatch(&unsigned).unwrap().unwrap().starts_with("phi"));
    // both are isomorphic to standard triangles as data over a field
    assert!(is_distinguished(&signed).distinguished);
    assert!(is_distinguished(&unsigned).distinguished);
}

#[test]
fn corrupted_triangles_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 2..=4 {
        let t = fill_base(&Base::random(n, P, 2, &mut rng)).unwrap();
        for l in 1..=n as i64 {
            let c = t.corrupt(v(0, l), 0);
            assert!(c.validate().is_ok());
            let verdict = is_distinguished(&c);
            assert!(!verdict.distinguished, "corruption at (0,{l}) accepted");
            assert!(verdict.reason.is_some());
        }
    }
}

#[test]
fn invalid_data_is_not_a_triangle() {
    let t = fill_base(&base2(1, 1, Matrix::identity(P, 1))).unwrap();
    let mut values = t.values().clone();
    values.insert(v(0, 0), g(&[(0, 1)]));
    let broken = NTriangle::from_parts(2, P, t.window, values, t.arrows().clone(), t.phis().clone());
    assert!(broken.validate().unwrap_err().contains("boundary"));
    assert!(!is_distinguished(&broken).distinguished);
    let mut phi: BTreeMap<MeshVertex, GradedMap> = t.phis().clone();
    for p in phi.values_mut() {
        *p = GradedMap(p.0.keys().map(|&i| (i, Matrix::zeros(P, 1, 1))).collect());
    }
    let broken = NTriangle::from_parts(2, P, t.window, t.values().clone(), t.arrows().clone(), phi);
    assert!(broken.validate().is_err());
}

#[test]
fn small_stc_battery() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=4 {
        let r = stc_suite(n, 10, P, 2, &mut rng);
        assert!(r.ok(), "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn filled_bases_are_distinguished(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = Base::random(n, P, 2, &mut rng);
        let t = fill_base(&b).unwrap();
        prop_assert_eq!(t.base(), b);
        prop_assert!(t.validate().is_ok());
        prop_assert!(is_distinguished(&t.random_isomorphic(&mut rng)).distinguished);
    }

    #[test]
    fn extension_keeps_the_restriction(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = fill_base(&Base::random(n, P, 2, &mut rng)).unwrap().forget_model();
        let big = t.extended(t.window.kmin - 2, t.window.kmax + 2).unwrap();
        prop_assert!(big.validate().is_ok());
        for w in t.window.vertices() {
            prop_assert_eq!(big.value(w), t.value(w));
        }
        for (k, e) in t.arrows() {
            prop_assert_eq!(big.arrow(k.0, k.1), Some(e));
        }
    }
}
