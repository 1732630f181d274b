use meshrep::ar::{build_ar, mesh_orbit_count};
use meshrep::derived::{normal_form, Complex};
use meshrep::functors::{coxeter_plus, serre, transport};
use meshrep::linalg::Field;
use meshrep::rep::{interval_module, random_line_rep, Interval};
use meshrep::shapes::{Embedding, LineQuiver, MeshVertex, MeshWindow};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn projective_diagram_a3() {
    let q = LineQuiver::linear(3);
    let x = Complex::from_rep(&interval_module(&q, Field::Rationals, Interval::new(1, 3)).unwrap(), 0);
    let d = build_ar(&q, &x, MeshWindow::canonical(3)).unwrap();
    let dims = |v: MeshVertex| {
        let c = d.value(v).unwrap();
        (c.lo()..=c.hi()).map(|i| (i, c.homology_dim(i, 0))).filter(|p| p.1 > 0).collect::<Vec<_>>()
    };
    assert_eq!(dims(MeshVertex::new(0, 3)), vec![(0, 1)]);
    assert!(dims(MeshVertex::new(1, 2)).is_empty());
    assert!(dims(MeshVertex::new(2, 1)).is_empty());
    assert!(d.check_boundary().ok());
    assert!(d.check_squares().ok(), "{:?}", d.check_squares().failures);
    assert!(d.check_flip_sigma().ok(), "{:?}", d.check_flip_sigma().failures);
}

#[test]
fn random_diagrams_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=5 {
        for q in LineQuiver::all_orientations(n) {
            let x = Complex::from_rep(&random_line_rep(&q, Field::prime(5).unwrap(), 2, &mut rng), 0);
            let d = build_ar(&q, &x, MeshWindow::canonical(n)).unwrap();
            assert!(d.check_boundary().ok());
            assert!(d.check_squares().ok(), "{q}");
            assert!(d.check_flip_sigma().ok(), "{q}");
            let back = d.restrict_embedding(&Embedding::canonical(&q)).unwrap();
            assert_eq!(normal_form(&q, &back), normal_form(&q, &x), "{q}");
            let s = serre(&q, &x).unwrap();
            let emb = Embedding::canonical(&q);
            let sv: Vec<MeshVertex> = (1..=n).map(|l| meshrep::shapes::mesh_map_s(n, emb.vertex(l)).unwrap()).collect();
            let via = d.restrict_to(&q, &sv).unwrap();
            assert_eq!(normal_form(&q, &via), normal_form(&q, &s), "serre shift {q}");
        }
    }
}

#[test]
fn orbit_counts() {
    assert_eq!(mesh_orbit_count(1), 1);
    assert_eq!(mesh_orbit_count(3), 6);
    assert_eq!(mesh_orbit_count(5), 15);
}

/// Homology dimensions per degree at `v`.
fn graded(d: &meshrep::ar::ARDiagram, v: MeshVertex) -> Vec<(i64, usize)> {
    let c = d.value(v).unwrap();
    c.degrees().map(|i| (i, c.homology_dim(i, 0))).filter(|p| p.1 > 0).collect()
}

#[test]
fn coxeter_is_translation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=4 {
        for q in LineQuiver::all_orientations(n) {
            let w = MeshWindow::canonical(n);
            let x = Complex::from_rep(&random_line_rep(&q, Field::DEFAULT, 2, &mut rng), 0);
            let d = build_ar(&q, &x, w).unwrap();
            let dc = build_ar(&q, &coxeter_plus(&q, &x).unwrap(), w).unwrap();
            for v in w.vertices().into_iter().filter(|v| v.k > w.kmin) {
                assert_eq!(graded(&dc, v), graded(&d, MeshVertex::new(v.k - 1, v.l)), "{q} at {v}");
            }
        }
    }
}

#[test]
fn diagrams_do_not_depend_on_orientation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=4 {
        let qs = LineQuiver::all_orientations(n);
        let w = MeshWindow::canonical(n);
        for q in &qs {
            let x = Complex::from_rep(&random_line_rep(q, Field::DEFAULT, 2, &mut rng), 0);
            let d = build_ar(q, &x, w).unwrap();
            for q2 in &qs {
                let d2 = build_ar(q2, &transport(q, q2, &x).unwrap(), w).unwrap();
                for v in w.vertices() {
                    assert_eq!(graded(&d2, v), graded(&d, v), "{q} vs {q2} at {v}");
                }
            }
        }
    }
}

#[test]
fn corrupted_diagrams_fail_their_checks() {
    let q = LineQuiver::parse("FB").unwrap();
    let x = Complex::from_rep(&interval_module(&q, Field::Rationals, Interval::new(1, 3)).unwrap(), 0);
    let w = MeshWindow::canonical(3);
    let mut d = build_ar(&q, &x, w).unwrap();
    d.corrupt(MeshVertex::new(1, 2));
    assert!(!d.check_squares().ok());
    let mut d = build_ar(&q, &x, w).unwrap();
    d.corrupt(MeshVertex::new(1, 0));
    assert!(!d.check_boundary().ok());
}

#[test]
fn zero_module_gives_zero_diagram() {
    let q = LineQuiver::linear(3);
    let x = Complex::zero(std::sync::Arc::new(q.poset()), Field::Rationals);
    let d = build_ar(&q, &x, MeshWindow::canonical(3)).unwrap();
    assert!(MeshWindow::canonical(3).vertices().into_iter().all(|v| graded(&d, v).is_empty()));
}
