use meshrep::shapes::*;
use proptest::prelude::*;

fn q(s: &str) -> LineQuiver {
    LineQuiver::parse(s).unwrap()
}

fn v(k: i64, l: i64) -> MeshVertex {
    MeshVertex::new(k, l)
}

#[test]
fn reflect_quiver_examples() {
    assert_eq!(q("1->2").reflect(2).unwrap(), q("1<-2"));
    assert_eq!(q("1->2<-3").reflect(2).unwrap(), q("1<-2->3"));
    assert_eq!(LineQuiver::linear(3).reflect(3).unwrap(), q("1->2<-3"));
    assert!(LineQuiver::linear(3).reflect(2).is_err());
}

#[test]
fn admissible_sequence_examples() {
    assert_eq!(LineQuiver::linear(2).admissible_sequence(), [2, 1]);
    assert_eq!(LineQuiver::linear(3).admissible_sequence(), [3, 2, 1]);
    assert_eq!(q("1<-2").admissible_sequence(), [1, 2]);
}

#[test]
fn mesh_maps_examples() {
    assert_eq!(mesh_map_f(3, v(0, 1)).unwrap(), v(1, 3));
    assert_eq!(mesh_map_t(3, v(0, 2)).unwrap(), v(-1, 2));
    assert_eq!(mesh_map_s(3, v(1, 2)).unwrap(), v(2, 2));
    assert!(mesh_map_f(3, v(0, 5)).is_err());
}

#[test]
fn embedding_examples() {
    let a3 = Embedding::canonical(&LineQuiver::linear(3));
    assert_eq!((1..=3).map(|l| a3.vertex(l)).collect::<Vec<_>>(), [v(0, 1), v(0, 2), v(0, 3)]);
    let vq = Embedding::canonical(&q("1<-2->3"));
    assert_eq!((1..=3).map(|l| vq.vertex(l)).collect::<Vec<_>>(), [v(1, 1), v(0, 2), v(0, 3)]);
    assert_eq!(vq.quiver(), q("1<-2->3"));
    // reflecting at the sink 1 lands on the linear embedding
    let r = vq.reflect_at(1).unwrap();
    assert_eq!(r, a3);
    assert!(satisfies_reflection_hypothesis(&vq, &r, 1));
}

#[test]
fn symmetry_group_examples() {
    let g = SymmetryGroup::new(3);
    assert_eq!(g.mul(g.f(), g.f()), g.normal_form(-4, 0));
    let x = g.normal_form(5, 1);
    assert_eq!(g.mul(g.identity(), x), x);
    assert_eq!(g.pow(g.s(), 4), g.pow(g.f(), 2));
    assert_eq!(g.structure(), GroupStructure::ZPlusZ2);
    let g4 = SymmetryGroup::new(4);
    assert_eq!(g4.structure(), GroupStructure::Z);
    assert_eq!(g4.generator_exponent(g4.mul(g4.f(), g4.pow(g4.t(), 2))), Some(1));
}

#[test]
fn twisted_arrow_examples() {
    assert_eq!(twisted_arrow(&Poset::chain(2)).objects, [(0, 0), (0, 1), (1, 1)]);
    assert_eq!(twisted_arrow(&Poset::antichain(2)).objects.len(), 2);
    assert_eq!(twisted_arrow(&LineQuiver::linear(3).poset()).objects.len(), 6);
}

#[test]
fn sieve_examples() {
    let a1 = LineQuiver::linear(1);
    assert_eq!(sieve_of_diagonal(&a1), [(1, 1)]);
    assert_eq!(cosieve_of_diagonal(&a1), [(1, 1)]);
    let a3 = LineQuiver::linear(3);
    assert_eq!(sieve_of_diagonal(&a3), [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]);
    let mut co = cosieve_of_diagonal(&a3);
    co.sort();
    assert_eq!(co, [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]);
}

#[test]
fn induced_alpha_examples() {
    let id = InducedAlpha::identity(3);
    for w in MeshWindow::canonical(3).vertices() {
        assert_eq!(id.apply(w), w);
    }
    let a = InducedAlpha::new(1, 2, vec![2]).unwrap();
    assert_eq!(a.apply(v(0, 1)), v(0, 2));
    for k in -3..=3 {
        assert!(a.apply(v(k, 0)).is_boundary(2));
        assert!(a.apply(v(k, 2)).is_boundary(2));
    }
    assert!(InducedAlpha::new(2, 3, vec![3, 1]).is_err());
}

#[test]
fn mesh_order_and_poset_agree() {
    let w = MeshWindow::new(2, -1, 2);
    let p = w.poset();
    for (i, a) in w.vertices().into_iter().enumerate() {
        for (j, b) in w.vertices().into_iter().enumerate() {
            assert_eq!(p.leq(i, j), a.leq(&b));
        }
    }
}

fn monotone(m: usize, n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=n, m).prop_map(|mut x| {
        x.sort_unstable();
        x
    })
}

proptest! {
    #[test]
    fn mesh_maps_are_order_automorphisms(n in 1usize..=8, k1 in -6i64..6, k2 in -6i64..6, l1 in 0i64..9, l2 in 0i64..9) {
        let top = n as i64 + 1;
        let (a, b) = (v(k1, l1.min(top)), v(k2, l2.min(top)));
        for map in [mesh_map_f, mesh_map_t, mesh_map_s] {
            prop_assert_eq!(map(n, a).unwrap().leq(&map(n, b).unwrap()), a.leq(&b));
        }
        let ft = mesh_map_f(n, mesh_map_t(n, a).unwrap()).unwrap();
        let tf = mesh_map_t(n, mesh_map_f(n, a).unwrap()).unwrap();
        prop_assert_eq!(ft, mesh_map_s(n, a).unwrap());
        prop_assert_eq!(tf, ft);
        prop_assert_eq!(mesh_map_f_inv(n, mesh_map_f(n, a).unwrap()).unwrap(), a);
        // f^2 = t^{-(n+1)}
        let ff = mesh_map_f(n, mesh_map_f(n, a).unwrap()).unwrap();
        prop_assert_eq!(ff, v(a.k + n as i64 + 1, a.l));
        // (tf)^{n+1} = f^{n-1}
        let (mut x, mut y) = (a, a);
        for _ in 0..=n {
            x = mesh_map_s(n, x).unwrap();
        }
        for _ in 0..n - 1 {
            y = mesh_map_f(n, y).unwrap();
        }
        prop_assert_eq!(x, y);
        let g = SymmetryGroup::new(n);
        prop_assert_eq!(g.pow(g.s(), n as i64 + 1), g.pow(g.f(), n as i64 - 1));
        prop_assert_eq!(g.apply(g.s(), a), mesh_map_s(n, a).unwrap());
    }

    #[test]
    fn admissible_sequences_are_sink_sequences(n in 1usize..=7, mask in any::<u32>()) {
        let qs = LineQuiver::all_orientations(n);
        let q0 = &qs[mask as usize % qs.len()];
        let mut cur = q0.clone();
        for a in q0.admissible_sequence() {
            prop_assert!(cur.is_sink(a));
            cur = cur.reflect(a).unwrap();
        }
        prop_assert_eq!(&cur, q0);
        let e = Embedding::canonical(q0);
        for a in q0.sinks() {
            prop_assert!(satisfies_reflection_hypothesis(&e, &e.reflect_at(a).unwrap(), a));
            prop_assert_eq!(e.reflect_at(a).unwrap().quiver(), q0.reflect(a).unwrap());
        }
    }

    #[test]
    fn induced_alpha_is_functorial(
        (m, n, p, av, bv) in (1usize..=5, 1usize..=5, 1usize..=5)
            .prop_flat_map(|(m, n, p)| (Just(m), Just(n), Just(p), monotone(m, n), monotone(n, p)))
    ) {
        let a = InducedAlpha::new(m, n, av).unwrap();
        let b = InducedAlpha::new(n, p, bv).unwrap();
        let ba = a.then(&b);
        for w in MeshWindow::canonical(m).vertices() {
            prop_assert_eq!(ba.apply(w), b.apply(a.apply(w)));
            prop_assert!(a.apply(w).l >= 0 && a.apply(w).l <= n as i64 + 1);
        }
    }
}
