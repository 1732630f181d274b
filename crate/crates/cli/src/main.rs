//! `meshrep`: command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check or verification fails (the first
//! counterexample is printed), 2 on usage or input errors.

mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use meshrep::ar::build_ar;
use meshrep::bimod::{
    apply_kernel, apr_tilt, ar_constructor, bar_tensor_oracle, cancel_tensor, coxeter_bimodule, iter_tilt,
    line_duality, mesh_hom_table, tilting_check, Bimodule,
};
use meshrep::checks::{CheckConfig, Suite};
use meshrep::derived::{normal_form, Complex};
use meshrep::functors::{coxeter_minus, coxeter_plus, reflect_minus, reflect_plus, serre, serre_inv, transport};
use meshrep::higher::{fill_base, is_distinguished, Base};
use meshrep::io::{
    ar_to_dot, ar_to_json, ar_to_tikz, base_from_json, bimodule_csv, bimodule_from_json, bimodule_to_json,
    complex_to_json, to_pretty, triangle_from_json, triangle_to_dot, triangle_to_json, RenderOptions,
};
use meshrep::linalg::Field;
use meshrep::shapes::{LineQuiver, MeshWindow};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use input::{parse_quiver, read_json, ModuleArgs};

#[derive(Parser, Debug)]
#[command(name = "meshrep", version, about = "Exact computations with representations of type A quivers")]
struct Cli {
    /// Ground field: `Q`, `F_p` or a prime; inline modules default to `Q`,
    /// checks to `F_32003`
    #[arg(long, global = true)]
    field: Option<String>,
    /// Seed for randomized commands; `MESHREP_SEED` takes precedence
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result to a file instead of stdout
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Interval decomposition of a module, or of the homology of a complex
    Decompose {
        #[command(flatten)]
        module: ModuleArgs,
    },
    /// Reflection functor at a sink (`R+`) or, with `--minus`, at a source
    Reflect {
        #[command(flatten)]
        module: ModuleArgs,
        /// Vertex to reflect at
        #[arg(long)]
        at: usize,
        #[arg(long)]
        minus: bool,
        #[arg(long)]
        json: bool,
    },
    /// Coxeter functor `Φ+` (or `Φ-` with `--minus`), iterated `--power` times
    Coxeter {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        minus: bool,
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[arg(long)]
        json: bool,
    },
    /// Serre functor (or its inverse), iterated `--power` times
    Serre {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        inverse: bool,
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[arg(long)]
        json: bool,
    },
    /// Tensor with the duality bimodule `D_Q`
    Nakayama {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        json: bool,
    },
    /// Transport along reflections to another orientation
    Transport {
        #[command(flatten)]
        module: ModuleArgs,
        /// Target orientation
        #[arg(long)]
        to: String,
        #[arg(long)]
        json: bool,
    },
    /// Coherent AR diagram of a module on a window of the mesh
    ArQuiver {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, value_enum, default_value_t = ArFormat::Dot)]
        format: ArFormat,
        /// Leave out the boundary rows
        #[arg(long)]
        hide_boundary: bool,
        /// First column of the window (default -1)
        #[arg(long, allow_hyphen_values = true)]
        kmin: Option<i64>,
        /// Last column of the window (default n+2)
        #[arg(long, allow_hyphen_values = true)]
        kmax: Option<i64>,
    },
    /// Canceling tensor product of two bimodule documents
    Tensor {
        left: PathBuf,
        right: PathBuf,
        /// Use the bar construction instead of the canceling product
        #[arg(long)]
        bar: bool,
        #[arg(long, value_enum, default_value_t = BimodFormat::Pattern)]
        format: BimodFormat,
    },
    /// Tilting kernels and their tilting checks
    Tilt {
        #[arg(value_enum)]
        kind: TiltKind,
        /// Source orientation
        #[arg(long, short = 'q', default_value = "F")]
        quiver: String,
        /// Sink for `apr`
        #[arg(long)]
        at: Option<usize>,
        /// Target orientation for `iter`
        #[arg(long)]
        to: Option<String>,
        /// `T-` for `apr`, `C-` for `coxeter`
        #[arg(long)]
        minus: bool,
        #[arg(long, value_enum, default_value_t = BimodFormat::Pattern)]
        format: BimodFormat,
    },
    /// Run a verification suite (`all` runs every suite)
    Check {
        suite: String,
        /// Single level; sets both --n-min and --n-max
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Samples for randomized suites
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Higher triangles: fill a base, or verify a triangle document
    Triangle {
        #[command(subcommand)]
        action: TriangleCmd,
    },
}

#[derive(Subcommand, Debug)]
enum TriangleCmd {
    /// Fill a base `X1 -> ... -> Xn` to a standard triangle
    Fill {
        /// Base document; a random base is drawn when absent
        #[arg(long)]
        base: Option<PathBuf>,
        /// Length of a random base
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Largest graded dimension of a random base
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long, value_enum, default_value_t = TriFormat::Json)]
        format: TriFormat,
    },
    /// Decide whether a triangle document is distinguished
    Verify { triangle: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ArFormat {
    Dot,
    Tikz,
    Json,
    /// Hom-dimension table of the AR constructor of the quiver
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BimodFormat {
    /// Support pattern, rows indexed by the right variable
    Pattern,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TiltKind {
    Apr,
    Iter,
    Coxeter,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TriFormat {
    Json,
    Dot,
}

/// What a command produced: text, and whether its check passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, passed: true }
    }
}

fn parse_field(s: &Option<String>, default: Field) -> Result<Field> {
    match s {
        Some(s) => Field::parse(s).with_context(|| format!("bad field '{s}'")),
        None => Ok(default),
    }
}

fn seed(flag: u64) -> Result<u64> {
    match std::env::var("MESHREP_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!("MESHREP_SEED must be an unsigned integer, got '{v}'")),
        Err(_) => Ok(flag),
    }
}

fn lines(parts: impl IntoIterator<Item = String>) -> String {
    let mut s: String = parts.into_iter().collect::<Vec<_>>().join("\n");
    s.push('\n');
    s
}

fn module_output(q: &LineQuiver, c: &Complex, json: bool) -> String {
    if json {
        to_pretty(&complex_to_json(c, Some(q)))
    } else {
        lines([format!("quiver: {q}"), normal_form(q, c).to_string()])
    }
}

fn bimod_output(m: &Bimodule, format: BimodFormat) -> String {
    match format {
        BimodFormat::Pattern => lines(m.support_pattern()),
        BimodFormat::Json => to_pretty(&bimodule_to_json(m)),
        BimodFormat::Csv => bimodule_csv(m),
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let inline_field = parse_field(&cli.field, Field::Rationals)?;
    Ok(match &cli.cmd {
        Cmd::Decompose { module } => {
            let (q, c) = module.load(inline_field)?;
            Outcome::ok(lines([normal_form(&q, &c).to_string()]))
        }
        Cmd::Reflect { module, at, minus, json } => {
            let (q, c) = module.load(inline_field)?;
            let (q2, y) = if *minus { reflect_minus(&q, *at, &c)? } else { reflect_plus(&q, *at, &c)? };
            Outcome::ok(module_output(&q2, &y, *json))
        }
        Cmd::Coxeter { module, minus, power, json } => {
            let (q, mut c) = module.load(inline_field)?;
            for _ in 0..*power {
                c = if *minus { coxeter_minus(&q, &c)? } else { coxeter_plus(&q, &c)? }.minimized();
            }
            Outcome::ok(module_output(&q, &c, *json))
        }
        Cmd::Serre { module, inverse, power, json } => {
            let (q, mut c) = module.load(inline_field)?;
            for _ in 0..*power {
                c = if *inverse { serre_inv(&q, &c)? } else { serre(&q, &c)? }.minimized();
            }
            Outcome::ok(module_output(&q, &c, *json))
        }
        Cmd::Nakayama { module, json } => {
            let (q, c) = module.load(inline_field)?;
            let y = apply_kernel(&line_duality(&q, c.field()), &c)?.reshape(c.shape().clone());
            Outcome::ok(module_output(&q, &y, *json))
        }
        Cmd::Transport { module, to, json } => {
            let (q, c) = module.load(inline_field)?;
            let q2 = parse_quiver(to)?;
            if q2.n() != q.n() {
                bail!("cannot transport from {q} to {q2}");
            }
            Outcome::ok(module_output(&q2, &transport(&q, &q2, &c)?, *json))
        }
        Cmd::ArQuiver { module, format, hide_boundary, kmin, kmax } => {
            let opts = RenderOptions { hide_boundary: *hide_boundary };
            let (q, c) = if module.is_empty() {
                let q = parse_quiver(module.quiver.as_deref().unwrap_or("F"))?;
                let c = Complex::zero(std::sync::Arc::new(q.poset()), inline_field);
                (q, c)
            } else {
                module.load(inline_field)?
            };
            let n = q.n() as i64;
            let (lo, hi) = (kmin.unwrap_or(-1), kmax.unwrap_or(n + 2));
            if lo > hi {
                bail!("empty window {lo}..{hi}");
            }
            let window = MeshWindow::new(q.n(), lo, hi);
            let text = match format {
                ArFormat::Csv => mesh_hom_table(&ar_constructor(&q, window, c.field())?).to_csv(),
                _ => {
                    let d = build_ar(&q, &c, window)?;
                    match format {
                        ArFormat::Dot => ar_to_dot(&d, opts),
                        ArFormat::Tikz => ar_to_tikz(&d, opts),
                        _ => to_pretty(&ar_to_json(&d, opts)),
                    }
                }
            };
            Outcome::ok(text)
        }
        Cmd::Tensor { left, right, bar, format } => {
            let a = bimodule_from_json(&read_json(left)?)?;
            let b = bimodule_from_json(&read_json(right)?)?;
            let m = if *bar { bar_tensor_oracle(&a, &b)? } else { cancel_tensor(&a, &b)? };
            Outcome::ok(bimod_output(&m.minimized(), *format))
        }
        Cmd::Tilt { kind, quiver, at, to, minus, format } => {
            let q = parse_quiver(quiver)?;
            let (t, inverse) = match kind {
                TiltKind::Apr => {
                    let a = at.ok_or_else(|| anyhow!("apr needs --at <sink>"))?;
                    if !q.is_sink(a) {
                        bail!("{a} is not a sink of {q}");
                    }
                    let (plus, minus_t) = apr_tilt(&q, a, inline_field)?;
                    if *minus {
                        (minus_t, Some(plus))
                    } else {
                        (plus, Some(minus_t))
                    }
                }
                TiltKind::Iter => {
                    let q2 = parse_quiver(to.as_deref().ok_or_else(|| anyhow!("iter needs --to <orientation>"))?)?;
                    if q2.n() != q.n() {
                        bail!("{q} and {q2} have different sizes");
                    }
                    (iter_tilt(&q2, &q, inline_field)?, Some(iter_tilt(&q, &q2, inline_field)?))
                }
                TiltKind::Coxeter => {
                    (coxeter_bimodule(&q, !minus, inline_field)?, Some(coxeter_bimodule(&q, *minus, inline_field)?))
                }
            };
            let rep = tilting_check(&t, inverse.as_ref());
            let mut text = bimod_output(&t, *format);
            if matches!(format, BimodFormat::Pattern) {
                text.push_str(&format!(
                    "perfect {} rigid {} generator {} invertible {}\n",
                    rep.perfect, rep.rigid, rep.generator, rep.invertible
                ));
            }
            Outcome { text, passed: rep.ok() }
        }
        Cmd::Check { suite, n, n_min, n_max, samples } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![Suite::parse(suite).ok_or_else(|| {
                    let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                    anyhow!("unknown suite '{suite}' (expected one of: all, {})", names.join(", "))
                })?]
            };
            let cfg = CheckConfig {
                field: parse_field(&cli.field, Field::DEFAULT)?,
                seed: seed(cli.seed)?,
                n_min: n.or(*n_min),
                n_max: n.or(*n_max),
                samples: *samples,
            };
            let reports: Vec<_> = suites.iter().map(|s| s.run(&cfg)).collect();
            Outcome {
                text: lines(reports.iter().map(|r| r.to_string())),
                passed: reports.iter().all(|r| r.passed()),
            }
        }
        Cmd::Triangle { action } => match action {
            TriangleCmd::Fill { base, n, max_dim, format } => {
                let b = match base {
                    Some(path) => base_from_json(&read_json(path)?)?,
                    None => {
                        if *n == 0 {
                            bail!("--n must be positive");
                        }
                        let field = parse_field(&cli.field, Field::DEFAULT)?;
                        Base::random(*n, field, *max_dim, &mut ChaCha8Rng::seed_from_u64(seed(cli.seed)?))
                    }
                };
                b.check()?;
                let t = fill_base(&b)?;
                Outcome::ok(match format {
                    TriFormat::Json => to_pretty(&triangle_to_json(&t)),
                    TriFormat::Dot => triangle_to_dot(&t, RenderOptions::default()),
                })
            }
            TriangleCmd::Verify { triangle } => {
                let t = triangle_from_json(&read_json(triangle)?)?;
                let v = is_distinguished(&t);
                let text = match &v.reason {
                    None => lines(["distinguished".to_string()]),
                    Some(r) => lines(["not distinguished".to_string(), format!("first counterexample: {r}")]),
                };
                Outcome { text, passed: v.distinguished }
            }
        },
    })
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|o| emit(&cli, &o.text).map(|_| o.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
