use meshrep::linalg::{Field, Matrix};
use meshrep::rep::{
    decompose, ext1, injective, interval_module, interval_sum_rep, projective, random_interval_sum, random_line_rep,
    simple, Interval, Multiset,
};
use meshrep::shapes::LineQuiver;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn decompose_recovers_hidden_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for code in ["FFB", "BFB", "FF", "BBFF"] {
        let q = LineQuiver::parse(code).unwrap();
        for field in [Field::Rationals, Field::prime(5).unwrap(), Field::prime(2).unwrap()] {
            let (x, ms) = random_interval_sum(&q, field, 2, &mut rng);
            assert_eq!(decompose(&q, &x), ms, "{code} {field}");
        }
    }
}

#[test]
fn interval_hom_dims() {
    let q = LineQuiver::parse("F").unwrap();
    let f = Field::Rationals;
    let s1 = interval_module(&q, f, Interval::new(1, 1)).unwrap();
    let p1 = interval_module(&q, f, Interval::new(1, 2)).unwrap();
    let s2 = interval_module(&q, f, Interval::new(2, 2)).unwrap();
    assert_eq!(s2.hom_dim(&p1).unwrap(), 1);
    assert_eq!(p1.hom_dim(&s1).unwrap(), 1);
    assert_eq!(s1.hom_dim(&p1).unwrap(), 0);
    assert!(p1.is_isomorphic(&p1));
    assert!(!s1.is_isomorphic(&s2));
}

const QQ: Field = Field::Rationals;

fn m(q: &LineQuiver, i: usize, j: usize) -> meshrep::rep::Rep {
    interval_module(q, QQ, Interval::new(i, j)).unwrap()
}

#[test]
fn interval_modules_have_interval_support() {
    let a3 = LineQuiver::linear(3);
    assert_eq!(m(&a3, 1, 3).dims(), [1, 1, 1]);
    assert!(m(&a3, 1, 3).maps().iter().all(|x| x.is_identity()));
    assert_eq!(m(&a3, 2, 2).dims(), [0, 1, 0]);
    let b = LineQuiver::parse("1<-2").unwrap();
    assert_eq!(m(&b, 1, 2).dims(), [1, 1]);
    assert!(m(&b, 1, 2).map_between(1, 0).unwrap().is_identity());
}

#[test]
fn hom_examples() {
    let a3 = LineQuiver::linear(3);
    assert_eq!(m(&a3, 1, 3).hom_dim(&m(&a3, 1, 1)).unwrap(), 1);
    assert_eq!(m(&a3, 1, 1).hom_dim(&m(&a3, 1, 3)).unwrap(), 0);
    for q in LineQuiver::all_orientations(3) {
        for iv in Interval::all(3) {
            let x = interval_module(&q, QQ, iv).unwrap();
            assert_eq!(x.hom_dim(&x).unwrap(), 1, "{q} {iv}");
        }
    }
}

#[test]
fn ext_examples() {
    let a3 = LineQuiver::linear(3);
    assert_eq!(ext1(&a3, &m(&a3, 1, 1), &m(&a3, 2, 3)).unwrap(), 1);
    assert_eq!(ext1(&a3, &m(&a3, 1, 3), &m(&a3, 1, 3)).unwrap(), 0);
    for v in 1..=3 {
        let p = interval_module(&a3, QQ, projective(&a3, v)).unwrap();
        for iv in Interval::all(3) {
            assert_eq!(ext1(&a3, &p, &interval_module(&a3, QQ, iv).unwrap()).unwrap(), 0);
        }
    }
}

#[test]
fn projectives_injectives_simples() {
    let a3 = LineQuiver::linear(3);
    assert_eq!(projective(&a3, 1), Interval::new(1, 3));
    assert_eq!(injective(&a3, 1), Interval::new(1, 1));
    assert_eq!(injective(&a3, 3), Interval::new(1, 3));
    let v = LineQuiver::parse("1<-2->3").unwrap();
    assert_eq!(projective(&v, 2), Interval::new(1, 3));
    assert_eq!(projective(&v, 1), Interval::new(1, 1));
    for q in LineQuiver::all_orientations(4) {
        for w in 1..=4 {
            assert_eq!(simple(w), Interval::new(w, w));
            let p = projective(&q, w);
            assert!((1..=4).all(|u| p.contains(u) == q.leq(w, u)), "{q} P{w}");
            let i = injective(&q, w);
            assert!((1..=4).all(|u| i.contains(u) == q.leq(u, w)), "{q} I{w}");
        }
    }
}

#[test]
fn decompose_examples() {
    let a2 = LineQuiver::linear(2);
    let shape = std::sync::Arc::new(a2.poset());
    let id = meshrep::rep::Rep::new(shape.clone(), QQ, vec![1, 1], vec![Matrix::identity(QQ, 1)]).unwrap();
    assert_eq!(decompose(&a2, &id).to_string(), "M[1,2]");
    let zero = meshrep::rep::Rep::new(shape, QQ, vec![1, 1], vec![Matrix::zeros(QQ, 1, 1)]).unwrap();
    assert_eq!(decompose(&a2, &zero).to_string(), "M[1,1] + M[2,2]");
    let a3 = LineQuiver::linear(3);
    let shape = std::sync::Arc::new(a3.poset());
    let x = meshrep::rep::Rep::new(
        shape,
        QQ,
        vec![1, 2, 1],
        vec![Matrix::from_rows(QQ, &[&[1], &[0]]), Matrix::from_rows(QQ, &[&[0, 1]])],
    )
    .unwrap();
    assert_eq!(decompose(&a3, &x).to_string(), "M[1,2] + M[2,3]");
}

/// `m[i,j] = r(i,j) - r(i-1,j) - r(i,j+1) + r(i-1,j+1)` for the linear orientation,
/// with `r(a,b)` the rank of `X(a) -> X(b)` and `r = 0` off the quiver.
fn inclusion_exclusion(x: &meshrep::rep::Rep, n: usize) -> Multiset {
    let r = |a: usize, b: usize| -> usize {
        if a == 0 || b > n {
            return 0;
        }
        x.map_between(a - 1, b - 1).map_or(0, |mat| mat.rank())
    };
    let mut out = Multiset::new();
    for iv in Interval::all(n) {
        let (i, j) = (iv.i, iv.j);
        let mult = (r(i, j) + r(i - 1, j + 1)) as i64 - (r(i - 1, j) + r(i, j + 1)) as i64;
        assert!(mult >= 0);
        if mult > 0 {
            out.add(iv, mult as usize);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decompose_matches_rank_formula(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = LineQuiver::linear(n);
        let x = random_line_rep(&q, Field::DEFAULT, 3, &mut rng);
        prop_assert_eq!(decompose(&q, &x), inclusion_exclusion(&x, n));
    }

    #[test]
    fn decompose_is_a_certified_partition(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qs = LineQuiver::all_orientations(n);
        let q = &qs[(seed as usize) % qs.len()];
        let x = random_line_rep(q, Field::DEFAULT, 2, &mut rng);
        let ms = decompose(q, &x);
        let mut dims = vec![0; n];
        for (iv, k) in ms.iter() {
            for (v, d) in dims.iter_mut().enumerate() {
                if iv.contains(v + 1) {
                    *d += k;
                }
            }
        }
        prop_assert_eq!(dims.as_slice(), x.dims());
        let y = interval_sum_rep(q, Field::DEFAULT, &ms);
        let iso = x.isomorphism(&y).expect("decomposition is isomorphic");
        prop_assert!(x.is_morphism(&y, &iso) && iso.is_invertible());
    }
}
