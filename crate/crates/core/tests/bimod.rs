use meshrep::bimod::*;
use meshrep::derived::{normal_form, Complex};
use meshrep::functors::{serre, FunctorTag};
use meshrep::linalg::Field;
use meshrep::rep::{interval_module, Interval};
use meshrep::shapes::{LineQuiver, MeshWindow};

const Q: Field = Field::Rationals;

fn indecomposables(q: &LineQuiver) -> Vec<Complex> {
    Interval::all(q.n()).into_iter().map(|iv| Complex::from_rep(&interval_module(q, Q, iv).unwrap(), 0)).collect()
}

#[test]
fn golden_patterns() {
    let a3 = LineQuiver::linear(3);
    assert_eq!(line_identity(&a3, Q).support_pattern(), ["k k k", "0 k k", "0 0 k"]);
    assert_eq!(line_duality(&a3, Q).support_pattern(), ["k 0 0", "k k 0", "k k k"]);
    let v = LineQuiver::parse("1<-2->3").unwrap();
    assert_eq!(line_identity(&v, Q).support_pattern(), ["k 0 0", "k k k", "0 0 k"]);
    assert_eq!(line_duality(&v, Q).support_pattern(), ["k k 0", "0 k 0", "0 k k"]);
}

#[test]
fn dual_of_identity() {
    for q in LineQuiver::all_orientations(3) {
        let i = line_identity(&q, Q);
        assert!(linear_dual(&i).quasi_isomorphic(&line_duality(&q, Q)));
        assert!(linear_dual(&linear_dual(&i)).quasi_isomorphic(&i));
    }
}

#[test]
fn nakayama_is_serre() {
    for n in 1..=4 {
        for q in LineQuiver::all_orientations(n) {
            let d = line_duality(&q, Q);
            for x in indecomposables(&q) {
                let got = apply_kernel(&d, &x).unwrap();
                assert_eq!(normal_form(&q, &got), normal_form(&q, &serre(&q, &x).unwrap()), "{q}");
            }
            let c = coxeter_bimodule(&q, true, Q).unwrap().shift(1);
            assert!(c.quasi_isomorphic(&d), "{q}");
        }
    }
}

#[test]
fn kernels_agree_with_functors() {
    for n in 1..=3 {
        for q in LineQuiver::all_orientations(n) {
            for tag in FunctorTag::all_for(&q) {
                let k = kernel(&tag, &q, Q).unwrap();
                let q2 = tag.target(&q).unwrap();
                for x in indecomposables(&q) {
                    let a = apply_kernel(&k, &x).unwrap();
                    let b = tag.apply(&q, &x).unwrap();
                    assert_eq!(normal_form(&q2, &a), normal_form(&q2, &b), "{tag} on {q}");
                }
            }
        }
    }
}

#[test]
fn bar_matches_cancel() {
    for q in LineQuiver::all_orientations(3) {
        let d = line_duality(&q, Q);
        let i = line_identity(&q, Q);
        let a = cancel_tensor(&d, &d).unwrap();
        let b = bar_tensor_oracle(&d, &d).unwrap();
        assert!(a.quasi_isomorphic(&b));
        assert!(cancel_tensor(&i, &d).unwrap().quasi_isomorphic(&d));
    }
}

#[test]
fn picard_small() {
    for n in 2..=3 {
        let r = picard_check(&LineQuiver::linear(n), Q).unwrap();
        assert!(r.ok(), "{:?}", r);
    }
}

#[test]
fn square_d4() {
    let (tb, td) = square_d4_bimodule(Q);
    assert_eq!(tb.support_pattern(), ["k k k k k", "0 k 0 k k", "0 0 k k k", "0 0 0 0 k"]);
    assert_eq!(td.support_pattern(), ["k k k k", "k 0 k k", "0 k k k", "0 0 0 k"]);
    let r = tilting_check(&td, None);
    assert!(r.ok(), "{r:?}");
}

#[test]
fn ar_bimodule_small() {
    for q in LineQuiver::all_orientations(3) {
        let d = ar_constructor(&q, MeshWindow::canonical(3), Q).unwrap();
        assert!(d.check_boundary().ok());
        assert!(d.check_squares().ok());
        let t = mesh_hom_table(&d);
        for u in &t.vertices {
            assert_eq!(t.get(*u, *u), Some(1), "{q}: End({u})");
        }
    }
}
