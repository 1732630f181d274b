use meshrep::ar::build_ar;
use meshrep::bimod::{coxeter_bimodule, square_d4_bimodule};
use meshrep::derived::{normal_form, Complex};
use meshrep::higher::{fill_base, is_distinguished, Base};
use meshrep::io::*;
use meshrep::linalg::Field;
use meshrep::rep::{interval_module, interval_sum, random_line_rep, Interval};
use meshrep::shapes::{LineQuiver, MeshVertex, MeshWindow};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const Q: Field = Field::Rationals;

fn tiny_diagram() -> meshrep::ar::ARDiagram {
    let q = LineQuiver::linear(1);
    let x = Complex::from_rep(&interval_module(&q, Q, Interval::new(1, 1)).unwrap(), 0);
    build_ar(&q, &x, MeshWindow::new(1, 0, 1)).unwrap()
}

#[test]
fn rep_and_complex_round_trip() {
    let q = LineQuiver::parse("1<-2->3").unwrap();
    let x = interval_sum(&q, Q, &[Interval::new(1, 2), Interval::new(2, 3), Interval::new(3, 3)]);
    let doc = rep_to_json(&x, Some(&q));
    assert_eq!(schema_of(&doc), Some(SCHEMA_REP));
    assert_eq!(rep_from_json(&doc).unwrap(), x);

    let a = Complex::from_rep(&x, -1);
    let c = Complex::direct_sum(&[&a, &Complex::from_rep(&interval_module(&q, Q, Interval::new(2, 2)).unwrap(), 2)]);
    let doc = complex_to_json(&c, Some(&q));
    assert_eq!(complex_from_json(&doc).unwrap(), c);
    assert_eq!(module_from_json(&rep_to_json(&x, None)).unwrap(), Complex::from_rep(&x, 0));
}

#[test]
fn schema_mismatch_is_reported() {
    let q = LineQuiver::linear(2);
    let doc = rep_to_json(&interval_module(&q, Q, Interval::new(1, 2)).unwrap(), Some(&q));
    match complex_from_json(&doc) {
        Err(IoError::Schema { expected, found }) => {
            assert_eq!(expected, SCHEMA_COMPLEX);
            assert_eq!(found, SCHEMA_REP);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(rep_from_json(&json!({"schema": SCHEMA_REP, "dims": [1]})).is_err());
    assert!(base_from_json(&json!({})).is_err());
}

#[test]
fn malformed_matrices_are_rejected() {
    let q = LineQuiver::linear(2);
    let mut doc = rep_to_json(&interval_module(&q, Q, Interval::new(1, 2)).unwrap(), Some(&q));
    doc["dims"] = json!([2, 1]);
    assert!(rep_from_json(&doc).is_err());
}

#[test]
fn bimodule_round_trip_and_csv() {
    let q = LineQuiver::linear(2);
    let m = coxeter_bimodule(&q, true, Q).unwrap();
    let doc = bimodule_to_json(&m);
    assert_eq!(schema_of(&doc), Some(SCHEMA_BIMODULE));
    let back = bimodule_from_json(&doc).unwrap();
    assert_eq!(back.dim_table(), m.dim_table());
    assert_eq!(bimodule_csv(&back), bimodule_csv(&m));
    let (tb, _) = square_d4_bimodule(Q);
    let csv = bimodule_csv(&tb);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("degree,left,right,dim"));
    assert!(lines.all(|l| l.split(',').count() == 4 && !l.ends_with(",0")));
}

#[test]
fn base_and_triangle_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=3 {
        let b = Base::random(n, Q, 2, &mut rng);
        let doc = base_to_json(&b);
        assert_eq!(base_from_json(&doc).unwrap(), b);
        let t = fill_base(&b).unwrap();
        let back = triangle_from_json(&triangle_to_json(&t)).unwrap();
        assert_eq!(back, t.forget_model());
        assert!(is_distinguished(&back).distinguished);
    }
}

#[test]
fn triangle_documents_are_validated() {
    let t = fill_base(&Base::random(2, Q, 1, &mut ChaCha8Rng::seed_from_u64(1))).unwrap();
    let mut doc = triangle_to_json(&t);
    doc["window"]["n"] = json!(5);
    assert!(triangle_from_json(&doc).is_err());
    let mut doc = triangle_to_json(&t);
    doc["values"] = json!([{"v": {"k": 99, "l": 1}, "dims": {"0": 1}}]);
    assert!(triangle_from_json(&doc).is_err());
}

#[test]
fn dot_rendering_is_frozen() {
    let dot = ar_to_dot(&tiny_diagram(), RenderOptions::default());
    let expected = "\
digraph ar {
  node [shape=plaintext];
  \"0,0\" [label=\"0\", pos=\"0,0!\"];
  \"0,1\" [label=\"k\", pos=\"1,1!\"];
  \"0,2\" [label=\"0\", pos=\"2,2!\"];
  \"1,0\" [label=\"0\", pos=\"2,0!\"];
  \"1,1\" [label=\"k[1]\", pos=\"3,1!\"];
  \"1,2\" [label=\"0\", pos=\"4,2!\"];
  \"0,0\" -> \"0,1\";
  \"0,1\" -> \"0,2\";
  \"0,1\" -> \"1,0\";
  \"0,2\" -> \"1,1\";
  \"1,0\" -> \"1,1\";
  \"1,1\" -> \"1,2\";
}
";
    assert_eq!(dot, expected);
}

#[test]
fn tikz_and_json_hide_the_boundary() {
    let d = tiny_diagram();
    let opts = RenderOptions { hide_boundary: true };
    assert_eq!(
        ar_to_tikz(&d, opts),
        "\\begin{tikzpicture}[x=0.9cm, y=1.2cm]\n  \\node (v0_1) at (1,1) {$k$};\n  \\node (v1_1) at (3,1) {$k[1]$};\n\\end{tikzpicture}\n"
    );
    let doc = ar_to_json(&d, opts);
    assert_eq!(schema_of(&doc), Some(SCHEMA_AR));
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(doc["vertices"][1]["value"], "k[1]");
    assert!(to_pretty(&doc).ends_with("}\n"));
}

#[test]
fn zero_module_renders_zeros() {
    let q = LineQuiver::linear(3);
    let d = build_ar(&q, &Complex::zero(std::sync::Arc::new(q.poset()), Q), MeshWindow::canonical(3)).unwrap();
    let labels = ar_labels(&d);
    assert_eq!(labels.len(), MeshWindow::canonical(3).vertices().len());
    assert!(labels.values().all(|l| l == "0"));
}

#[test]
fn point_valued_labels() {
    let q = LineQuiver::linear(3);
    let x = Complex::from_rep(&interval_module(&q, Q, Interval::new(1, 3)).unwrap(), 0);
    let d = build_ar(&q, &x, MeshWindow::canonical(3)).unwrap();
    let labels = ar_labels(&d);
    assert_eq!(labels[&MeshVertex::new(0, 1)], "k");
    assert!(labels.iter().filter(|(v, _)| v.is_boundary(3)).all(|(_, l)| l == "0"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_reps_round_trip(n in 1usize..=5, mask in any::<u32>(), seed in any::<u64>(), prime in any::<bool>()) {
        let qs = LineQuiver::all_orientations(n);
        let q = &qs[mask as usize % qs.len()];
        let field = if prime { Field::prime(7).unwrap() } else { Q };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_line_rep(q, field, 3, &mut rng);
        let back = rep_from_json(&rep_to_json(&x, Some(q))).unwrap();
        prop_assert_eq!(&back, &x);
        let text = serde_json::to_string(&rep_to_json(&x, None)).unwrap();
        let reread: serde_json::Value = serde_json::from_str(&text).unwrap();
        let c = module_from_json(&reread).unwrap();
        prop_assert_eq!(normal_form(q, &c), normal_form(q, &Complex::from_rep(&x, 0)));
    }
}
