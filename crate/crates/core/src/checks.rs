//! Verification suites, one per property family.
//!
//! Every suite returns a [`CheckReport`] with a one-line summary and the first
//! counterexample found. Randomized suites draw from a ChaCha stream seeded by
//! [`CheckConfig::seed`], so a fixed configuration gives identical output.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ar::{build_ar, hammock};
use crate::bimod::{
    apply_kernel, apr_tilt, ar_constructor, bar_tensor_oracle, cancel_tensor, coxeter_bimodule, iter_tilt, kernel,
    line_duality, line_identity, mesh_hom_table, picard_check, square_d4_bimodule, tilting_check, yoneda_window,
    Bimodule,
};
use crate::derived::{derived_hom_dim, normal_form, Complex};
use crate::functors::{coxeter_plus_seq, reflect_minus, reflect_plus, serre, FunctorTag};
use crate::higher::stc_suite;
use crate::linalg::Field;
use crate::rep::{decompose, interval_module, random_interval_sum, random_line_rep, Interval, Multiset};
use crate::shapes::{mesh_map_s, Embedding, LineQuiver, MeshVertex, MeshWindow};

/// Named suites, in acceptance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Census,
    Ar,
    Reflections,
    FracCy,
    SerreDuality,
    Nakayama,
    Kernels,
    D4Square,
    Tilting,
    Picard,
    Mesh,
    Yoneda,
    Stc,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Census,
        Suite::Ar,
        Suite::Reflections,
        Suite::FracCy,
        Suite::SerreDuality,
        Suite::Nakayama,
        Suite::Kernels,
        Suite::D4Square,
        Suite::Tilting,
        Suite::Picard,
        Suite::Mesh,
        Suite::Yoneda,
        Suite::Stc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Census => "census",
            Suite::Ar => "ar",
            Suite::Reflections => "reflections",
            Suite::FracCy => "frac-cy",
            Suite::SerreDuality => "serre-duality",
            Suite::Nakayama => "nakayama",
            Suite::Kernels => "kernels",
            Suite::D4Square => "d4-square",
            Suite::Tilting => "tilting",
            Suite::Picard => "picard",
            Suite::Mesh => "mesh",
            Suite::Yoneda => "yoneda",
            Suite::Stc => "stc",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Default level range.
    pub fn default_range(&self) -> (usize, usize) {
        match self {
            Suite::Census => (1, 6),
            Suite::Ar | Suite::Reflections | Suite::SerreDuality | Suite::Mesh => (1, 5),
            Suite::FracCy => (2, 6),
            Suite::Nakayama | Suite::Kernels | Suite::Tilting | Suite::Yoneda => (1, 4),
            Suite::Picard | Suite::Stc => (2, 4),
            Suite::D4Square => (3, 3),
        }
    }

    pub fn run(&self, cfg: &CheckConfig) -> CheckReport {
        let (lo, hi) = self.default_range();
        let (lo, hi) = (cfg.n_min.unwrap_or(lo).max(1), cfg.n_max.unwrap_or(hi));
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut r = CheckReport::new(*self);
        match self {
            Suite::Census => census(&mut r, lo, hi, cfg, &mut rng),
            Suite::Ar => ar_suite(&mut r, lo, hi, cfg, &mut rng),
            Suite::Reflections => reflections(&mut r, lo, hi),
            Suite::FracCy => frac_cy(&mut r, lo, hi),
            Suite::SerreDuality => serre_duality(&mut r, lo, hi),
            Suite::Nakayama => nakayama(&mut r, lo, hi),
            Suite::Kernels => kernels(&mut r, lo, hi, cfg, &mut rng),
            Suite::D4Square => golden(&mut r),
            Suite::Tilting => tilting(&mut r, lo, hi),
            Suite::Picard => picard(&mut r, lo, hi),
            Suite::Mesh => mesh(&mut r, lo, hi),
            Suite::Yoneda => yoneda(&mut r, lo, hi),
            Suite::Stc => stc(&mut r, lo.max(2), hi, cfg, &mut rng),
        }
        r
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Knobs shared by all suites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Field for randomized data; the census always uses `Q` and `F_5`.
    pub field: Field,
    pub seed: u64,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    /// Overrides the per-suite sample count.
    pub samples: Option<usize>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { field: Field::DEFAULT, seed: 0, n_min: None, n_max: None, samples: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: Suite,
    pub cases: usize,
    pub failures: usize,
    pub summary: Vec<String>,
    pub counterexample: Option<String>,
}

impl CheckReport {
    fn new(suite: Suite) -> CheckReport {
        CheckReport { suite, cases: 0, failures: 0, summary: Vec::new(), counterexample: None }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) -> bool {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(what());
            }
        }
        ok
    }

    fn note(&mut self, s: String) {
        self.summary.push(s);
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}/{} cases", self.suite, self.cases - self.failures, self.cases)?;
        for s in &self.summary {
            write!(f, "\n  {s}")?;
        }
        if let Some(c) = &self.counterexample {
            write!(f, "\n  first counterexample: {c}")?;
        }
        Ok(())
    }
}

fn indecomposables(q: &LineQuiver, field: Field) -> Vec<(Interval, Complex)> {
    Interval::all(q.n())
        .into_iter()
        .map(|iv| (iv, Complex::from_rep(&interval_module(q, field, iv).expect("interval in range"), 0)))
        .collect()
}

fn census<R: Rng>(r: &mut CheckReport, lo: usize, hi: usize, cfg: &CheckConfig, rng: &mut R) {
    let samples = cfg.samples.unwrap_or(200);
    for field in [Field::Rationals, Field::prime(5).expect("prime")] {
        for n in lo..=hi {
            let qs = LineQuiver::all_orientations(n);
            r.check(Interval::all(n).len() == n * (n + 1) / 2, || format!("n={n}: interval count"));
            for q in &qs {
                let reps: Vec<_> = Interval::all(n).into_iter().map(|iv| (iv, interval_module(q, field, iv).unwrap())).collect();
                for (a, x) in &reps {
                    r.check(decompose(q, x) == Multiset::single(*a), || format!("{q} {field}: decompose {a}"));
                    r.check(x.hom_dim(x).unwrap() == 1, || format!("{q} {field}: End {a} is not k"));
                    for (b, y) in &reps {
                        if a < b {
                            r.check(!x.is_isomorphic(y), || format!("{q} {field}: {a} ≅ {b}"));
                        }
                    }
                }
            }
            for s in 0..samples {
                let q = &qs[s % qs.len()];
                let (x, ms) = random_interval_sum(q, field, 2, rng);
                let got = decompose(q, &x);
                r.check(got == ms, || format!("{q} {field}: hidden {ms}, decomposed {got}"));
            }
        }
        r.note(format!("{field}: n = {lo}..{hi}, {samples} hidden sums per n"));
    }
}

/// A random complex with modules in degrees 0 and 1.
fn random_complex<R: Rng>(q: &LineQuiver, field: Field, rng: &mut R) -> Complex {
    let a = Complex::from_rep(&random_line_rep(q, field, 2, rng), 0);
    let b = Complex::from_rep(&random_line_rep(q, field, 1, rng), 1);
    Complex::direct_sum(&[&a, &b])
}

fn ar_suite<R: Rng>(r: &mut CheckReport, lo: usize, hi: usize, cfg: &CheckConfig, rng: &mut R) {
    let samples = cfg.samples.unwrap_or(5);
    let mut diagrams = 0;
    for n in lo..=hi {
        for q in LineQuiver::all_orientations(n) {
            for _ in 0..samples {
                let x = random_complex(&q, cfg.field, rng);
                let d = match build_ar(&q, &x, MeshWindow::canonical(n)) {
                    Ok(d) => d,
                    Err(e) => {
                        r.check(false, || format!("{q}: {e}"));
                        continue;
                    }
                };
                diagrams += 1;
                let b = d.check_boundary();
                r.check(b.ok(), || format!("{q}: boundary {:?}", b.failures.first()));
                let s = d.check_squares();
                r.check(s.ok(), || format!("{q}: square {:?}", s.failures.first()));
                let f = d.check_flip_sigma();
                r.check(f.ok(), || format!("{q}: flip vs suspension {:?}", f.failures.first()));
                let back = d.restrict_embedding(&Embedding::canonical(&q)).expect("embedding in window");
                r.check(normal_form(&q, &back) == normal_form(&q, &x), || format!("{q}: restriction to i_Q differs from X"));
            }
        }
    }
    r.note(format!("{diagrams} diagrams, n = {lo}..{hi}, field {}", cfg.field));
}

fn reflections(r: &mut CheckReport, lo: usize, hi: usize) {
    let field = Field::Rationals;
    for n in lo..=hi {
        for q in LineQuiver::all_orientations(n) {
            let ind = indecomposables(&q, field);
            for a in q.sinks() {
                for (iv, x) in &ind {
                    let (q2, y) = reflect_plus(&q, a, x).unwrap();
                    let (q3, z) = reflect_minus(&q2, a, &y).unwrap();
                    r.check(q3 == q && normal_form(&q, &z) == normal_form(&q, x), || format!("{q}: s-s+ at {a} on {iv}"));
                }
            }
            for a in q.sources() {
                for (iv, x) in &ind {
                    let (q2, y) = reflect_minus(&q, a, x).unwrap();
                    let (q3, z) = reflect_plus(&q2, a, &y).unwrap();
                    r.check(q3 == q && normal_form(&q, &z) == normal_form(&q, x), || format!("{q}: s+s- at {a} on {iv}"));
                }
            }
            let sinks = q.sinks();
            for (i, &a) in sinks.iter().enumerate() {
                for &b in &sinks[i + 1..] {
                    for (iv, x) in &ind {
                        let (qa, xa) = reflect_plus(&q, a, x).unwrap();
                        let (qab, xab) = reflect_plus(&qa, b, &xa).unwrap();
                        let (qb, xb) = reflect_plus(&q, b, x).unwrap();
                        let (qba, xba) = reflect_plus(&qb, a, &xb).unwrap();
                        r.check(qab == qba && normal_form(&qab, &xab) == normal_form(&qba, &xba), || {
                            format!("{q}: sinks {a}, {b} do not commute on {iv}")
                        });
                    }
                }
            }
            let seqs = q.all_admissible_sequences();
            for (iv, x) in &ind {
                let first = normal_form(&q, &coxeter_plus_seq(&q, &seqs[0], x).unwrap());
                for s in &seqs[1..] {
                    let other = normal_form(&q, &coxeter_plus_seq(&q, s, x).unwrap());
                    r.check(other == first, || format!("{q}: Coxeter along {s:?} differs on {iv}"));
                }
            }
        }
    }
    r.note(format!("n = {lo}..{hi}, all orientations, sinks, sources and admissible sequences"));
}

fn iterate(q: &LineQuiver, x: &Complex, k: usize) -> Complex {
    (0..k).fold(x.clone(), |acc, _| serre(q, &acc).unwrap().minimized())
}

fn frac_cy(r: &mut CheckReport, lo: usize, hi: usize) {
    let field = Field::Rationals;
    for n in lo..=hi {
        let mut count = 0;
        for q in LineQuiver::all_orientations(n) {
            for (iv, x) in indecomposables(&q, field) {
                let lhs = normal_form(&q, &iterate(&q, &x, n + 1));
                let rhs = normal_form(&q, &x.shift(n as i64 - 1));
                r.check(lhs == rhs, || format!("{q}: S^{}({iv}) = {lhs}, Σ^{}({iv}) = {rhs}", n + 1, n - 1));
                count += 1;
            }
        }
        r.note(format!(
            "S^{} ≅ Σ^{} on {}·window indecomposables ({count} over {} orientations)",
            n + 1,
            n - 1,
            n * (n + 1) / 2,
            1 << (n - 1)
        ));
        if n == 3 {
            let q = LineQuiver::linear(3);
            let witness = indecomposables(&q, field).into_iter().find(|(_, x)| {
                normal_form(&q, &iterate(&q, x, 2)) != normal_form(&q, &x.shift(1))
            });
            let found = r.check(witness.is_some(), || "n=3: S^2 ≅ Σ on every indecomposable".into());
            if let (true, Some((iv, _))) = (found, witness) {
                r.note(format!("S^2 ≇ Σ at n = 3, witness {iv}"));
            }
        }
    }
}

fn serre_duality(r: &mut CheckReport, lo: usize, hi: usize) {
    let field = Field::Rationals;
    for n in lo..=hi {
        let mut pairs = 0;
        for q in LineQuiver::all_orientations(n) {
            let objs: Vec<(String, Complex)> = indecomposables(&q, field)
                .into_iter()
                .flat_map(|(iv, x)| (-1..=1).map(move |d| (format!("{iv}[{d}]"), x.shift(d))))
                .collect();
            let sx: Vec<Complex> = objs.iter().map(|(_, x)| serre(&q, x).unwrap().reshape(x.shape().clone())).collect();
            for (i, (nx, x)) in objs.iter().enumerate() {
                for (ny, y) in &objs {
                    let a = derived_hom_dim(&q, x, y, 0);
                    let b = derived_hom_dim(&q, y, &sx[i], 0);
                    r.check(a == b, || format!("{q}: hom({nx},{ny}) = {a}, hom({ny},S {nx}) = {b}"));
                    pairs += 1;
                }
            }
        }
        r.note(format!("n = {n}: {pairs} pairs of shifted intervals"));
    }
}

fn nakayama(r: &mut CheckReport, lo: usize, hi: usize) {
    let field = Field::Rationals;
    for n in lo..=hi {
        for q in LineQuiver::all_orientations(n) {
            let d = line_duality(&q, field);
            for (iv, x) in indecomposables(&q, field) {
                let got = normal_form(&q, &apply_kernel(&d, &x).unwrap());
                let want = normal_form(&q, &serre(&q, &x).unwrap());
                r.check(got == want, || format!("{q}: D ⊗ {iv} = {got}, S {iv} = {want}"));
            }
            let c = coxeter_bimodule(&q, true, field).unwrap().shift(1);
            r.check(c.quasi_isomorphic(&d), || format!("{q}: ΣC⁺ differs from D at {:?}", c.first_difference(&d)));
        }
    }
    r.note(format!("n = {lo}..{hi}, all orientations"));
}

fn kernels<R: Rng>(r: &mut CheckReport, lo: usize, hi: usize, cfg: &CheckConfig, rng: &mut R) {
    let field = Field::Rationals;
    let mut tags = 0;
    for n in lo..=hi {
        for q in LineQuiver::all_orientations(n) {
            let i = line_identity(&q, field);
            let mut all = FunctorTag::all_for(&q);
            all.extend([FunctorTag::Tau, FunctorTag::TauInv]);
            let ind = indecomposables(&q, field);
            for tag in &all {
                let k = kernel(tag, &q, field).unwrap();
                let q2 = tag.target(&q).unwrap();
                tags += 1;
                for (iv, x) in &ind {
                    let a = normal_form(&q2, &apply_kernel(&k, x).unwrap());
                    let b = normal_form(&q2, &tag.apply(&q, x).unwrap());
                    r.check(a == b, || format!("{q}: kernel of {tag} on {iv} gives {a}, functor gives {b}"));
                }
                let ik = cancel_tensor(&line_identity(&q2, field), &k).unwrap();
                r.check(ik.quasi_isomorphic(&k), || format!("{q}: I ⊗ T({tag}) differs from T"));
                let ki = cancel_tensor(&k, &i).unwrap();
                r.check(ki.quasi_isomorphic(&k), || format!("{q}: T({tag}) ⊗ I differs from T"));
            }
            for a in q.sinks() {
                let (tp, tm) = apr_tilt(&q, a, field).unwrap();
                let q2 = q.reflect(a).unwrap();
                let mp = cancel_tensor(&tm, &tp).unwrap();
                r.check(mp.quasi_isomorphic(&i), || format!("{q}: T⁻ ⊗ T⁺ at {a} is not I_Q"));
                let pm = cancel_tensor(&tp, &tm).unwrap();
                r.check(pm.quasi_isomorphic(&line_identity(&q2, field)), || format!("{q}: T⁺ ⊗ T⁻ at {a} is not I_Q'"));
            }
        }
    }
    r.note(format!("{tags} kernels checked on all indecomposables, n = {lo}..{hi}"));
    let samples = cfg.samples.unwrap_or(100);
    let nmax = hi.min(3);
    for s in 0..samples {
        let n = 1 + s % nmax;
        let qs = LineQuiver::all_orientations(n);
        let q = &qs[rng.gen_range(0..qs.len())];
        let pool = [
            line_identity(q, cfg.field),
            line_duality(q, cfg.field),
            coxeter_bimodule(q, true, cfg.field).unwrap(),
            coxeter_bimodule(q, false, cfg.field).unwrap(),
        ];
        let m = pool[rng.gen_range(0..pool.len())].shift(rng.gen_range(-1..=1));
        let x = random_complex(q, cfg.field, rng);
        let nb = Bimodule::from_left_module(m.right.clone(), &x).unwrap();
        let a = cancel_tensor(&m, &nb).unwrap();
        let b = bar_tensor_oracle(&m, &nb).unwrap();
        r.check(a.quasi_isomorphic(&b), || format!("{q}: cancel and bar tensors differ on sample {s}"));
        let p = &pool[rng.gen_range(0..pool.len())];
        let a = cancel_tensor(&m, p).unwrap();
        let b = bar_tensor_oracle(&m, p).unwrap();
        r.check(a.quasi_isomorphic(&b), || format!("{q}: cancel and bar tensors differ on bimodule sample {s}"));
    }
    r.note(format!("{samples} random pairs against the bar complex, field {}", cfg.field));
}

/// Support patterns of the displayed diagrams, rows indexed by the second variable.
pub const GOLDEN_IDENTITY_A3: [&str; 3] = ["k k k", "0 k k", "0 0 k"];
pub const GOLDEN_DUALITY_A3: [&str; 3] = ["k 0 0", "k k 0", "k k k"];
pub const GOLDEN_IDENTITY_V3: [&str; 3] = ["k 0 0", "k k k", "0 0 k"];
pub const GOLDEN_DUALITY_V3: [&str; 3] = ["k k 0", "0 k 0", "0 k k"];
/// Columns `x y z p w` of the extended square, rows `x y z w`.
pub const GOLDEN_SQUARE_B: [&str; 4] = ["k k k k k", "0 k 0 k k", "0 0 k k k", "0 0 0 0 k"];
/// Columns `y z p w` of the `D_4` quiver.
pub const GOLDEN_SQUARE_D4: [&str; 4] = ["k k k k", "k 0 k k", "0 k k k", "0 0 0 k"];

fn golden(r: &mut CheckReport) {
    let field = Field::Rationals;
    let a3 = LineQuiver::linear(3);
    let v = LineQuiver::parse("1<-2->3").expect("quiver");
    let cases: [(&str, Vec<String>, &[&str]); 6] = [
        ("identity A3", line_identity(&a3, field).support_pattern(), &GOLDEN_IDENTITY_A3),
        ("duality A3", line_duality(&a3, field).support_pattern(), &GOLDEN_DUALITY_A3),
        ("identity 1<-2->3", line_identity(&v, field).support_pattern(), &GOLDEN_IDENTITY_V3),
        ("duality 1<-2->3", line_duality(&v, field).support_pattern(), &GOLDEN_DUALITY_V3),
        ("square pushout", square_d4_bimodule(field).0.support_pattern(), &GOLDEN_SQUARE_B),
        ("square to D4", square_d4_bimodule(field).1.support_pattern(), &GOLDEN_SQUARE_D4),
    ];
    for (name, got, want) in cases {
        r.check(got == want, || format!("{name}: got {got:?}, expected {want:?}"));
    }
    let (_, td) = square_d4_bimodule(field);
    let t = tilting_check(&td, None);
    r.check(t.ok(), || format!("square to D4 is not tilting: {t:?}"));
    r.note("identity and duality of A3 and 1<-2->3, square and D4 kernels".into());
}

fn tilting(r: &mut CheckReport, lo: usize, hi: usize) {
    let field = Field::Rationals;
    for n in lo..=hi {
        let qs = LineQuiver::all_orientations(n);
        for q in &qs {
            for q2 in &qs {
                let t = iter_tilt(q2, q, field).unwrap();
                let inv = iter_tilt(q, q2, field).unwrap();
                let rep = tilting_check(&t, Some(&inv));
                r.check(rep.ok(), || format!("T({q2},{q}): {rep:?}"));
            }
        }
        r.note(format!("n = {n}: {} kernels T(Q',Q)", qs.len() * qs.len()));
    }
}

fn picard(r: &mut CheckReport, lo: usize, hi: usize) {
    let field = Field::Rationals;
    for n in lo..=hi {
        for q in LineQuiver::all_orientations(n) {
            match picard_check(&q, field) {
                Ok(p) => {
                    r.check(p.ok(), || format!("{q}: {}", p.failures.join("; ")));
                }
                Err(e) => {
                    r.check(false, || format!("{q}: {e}"));
                }
            }
        }
        r.note(format!("n = {n}: (ΣI)^{} ≅ D^{}, commutation, exponent grid", n - 1, n + 1));
    }
}

fn mesh(r: &mut CheckReport, lo: usize, hi: usize) {
    let field = Field::Rationals;
    for n in lo..=hi {
        let qs = LineQuiver::all_orientations(n);
        for q in &qs {
            let d = match ar_constructor(q, MeshWindow::canonical(n), field) {
                Ok(d) => d,
                Err(e) => {
                    r.check(false, || format!("{q}: {e}"));
                    continue;
                }
            };
            let s = d.check_squares();
            r.check(s.ok(), || format!("{q}: square {:?}", s.failures.first()));
            let t = mesh_hom_table(&d);
            for (a, u) in t.vertices.iter().enumerate() {
                for (b, v) in t.vertices.iter().enumerate() {
                    let x = t.dims[a][b];
                    let reach = hammock(n, *u, *v);
                    r.check(x == usize::from(reach), || format!("{q}: hom({u},{v}) = {x}, mesh reachability {reach}"));
                }
            }
        }
        r.note(format!("n = {n}: {} AR constructors", qs.len()));
    }
}

fn yoneda(r: &mut CheckReport, lo: usize, hi: usize) {
    let field = Field::Rationals;
    for n in lo..=hi {
        let w = MeshWindow::canonical(n);
        let mut first: Option<Vec<Vec<usize>>> = None;
        for q in LineQuiver::all_orientations(n) {
            let d = ar_constructor(&q, w, field).unwrap();
            let u = yoneda_window(&d);
            let at = |a: MeshVertex, b: MeshVertex| u.get(a, b).expect("window vertex");
            let e = Embedding::canonical(&q);
            for a in 1..=n {
                for b in 1..=n {
                    let got = at(e.vertex(a), e.vertex(b));
                    let want = usize::from(q.leq(b, a));
                    r.check(got == want, || format!("{q}: U(i{a}, i{b}) = {got}, I_Q = {want}"));
                }
            }
            for k in w.kmin..=w.kmax {
                for l in [0, n as i64 + 1] {
                    let v = MeshVertex::new(k, l);
                    r.check(at(v, v) == 0, || format!("{q}: U({v},{v}) nonzero"));
                }
            }
            for &x in &u.vertices {
                for &y in &u.vertices {
                    let sy = mesh_map_s(n, y).expect("level");
                    if !w.contains(sy) {
                        continue;
                    }
                    let (a, b) = (at(x, y), at(sy, x));
                    r.check(a == b, || format!("{q}: dim U({x},{y}) = {a}, dim U(s {y}, {x}) = {b}"));
                }
            }
            match &first {
                None => first = Some(u.dims.clone()),
                Some(f) => {
                    r.check(*f == u.dims, || format!("{q}: window table depends on the orientation"));
                }
            }
        }
        r.note(format!("n = {n}: restriction to i_Q, boundary, Serre twist, orientation independence"));
    }
}

fn stc<R: Rng>(r: &mut CheckReport, lo: usize, hi: usize, cfg: &CheckConfig, rng: &mut R) {
    let samples = cfg.samples.unwrap_or(100);
    for n in lo..=hi {
        let seed: u64 = rng.gen();
        let mut local = ChaCha8Rng::seed_from_u64(seed);
        let rep = stc_suite(n, samples, cfg.field, 2, &mut local);
        r.cases += 1;
        if !rep.ok() {
            r.failures += 1;
            if r.counterexample.is_none() {
                r.counterexample = Some(format!("n={n}: {}", rep.failures.first().cloned().unwrap_or_else(|| format!("{rep:?}"))));
            }
        }
        r.note(format!(
            "n = {n}: STC0 {}/{s}, STC1 {}/{s}, STC2 {}/{s}, STC3 {}/{s}, corrupted rejected {}/{s}, unsigned flip caught {}/{}",
            rep.stc0,
            rep.stc1,
            rep.stc2,
            rep.stc3,
            rep.corrupt_rejected,
            rep.sign_detected,
            rep.sign_eligible,
            s = samples
        ));
    }
}
