//! Module input: JSON documents or inline dimension vectors and matrices.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::Args;
use meshrep::derived::Complex;
use meshrep::io::module_from_json;
use meshrep::linalg::{Field, Matrix};
use meshrep::rep::{interval_sum, Interval, Rep};
use meshrep::shapes::LineQuiver;
use serde_json::Value;

#[derive(Args, Debug, Clone, Default)]
pub struct ModuleArgs {
    /// Representation or complex JSON document (`-` for stdin)
    #[arg(long, short = 'i', value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Orientation, e.g. `FFB` or `1->2<-3`; defaults to the linear one
    #[arg(long, short = 'q')]
    pub quiver: Option<String>,
    /// Dimension vector, comma separated
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<usize>,
    /// Matrix on the edge between `i` and `i+1`, in edge order; rows separated
    /// by `;`, entries by spaces or commas. Omit all maps for zero maps.
    #[arg(long = "map", allow_hyphen_values = true)]
    pub maps: Vec<String>,
    /// Direct sum of intervals, e.g. `1-2,2-3` or `M[1,2]+M[2,3]`
    #[arg(long)]
    pub intervals: Option<String>,
    /// Homological degree of an inline module
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub degree: i64,
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_quiver(s: &str) -> Result<LineQuiver> {
    LineQuiver::parse(s).with_context(|| format!("bad orientation '{s}'"))
}

/// Parses `"1 0; 0 1"` style matrices of a known size; `-` or an empty string is zero.
pub fn parse_matrix(field: Field, s: &str, rows: usize, cols: usize) -> Result<Matrix> {
    let t = s.trim();
    if t == "-" || t.is_empty() {
        return Ok(Matrix::zeros(field, rows, cols));
    }
    let parsed: Vec<Vec<String>> = t
        .split(';')
        .map(|r| r.split(|c: char| c == ',' || c.is_whitespace()).filter(|x| !x.is_empty()).map(String::from).collect())
        .collect();
    if parsed.len() != rows || parsed.iter().any(|r| r.len() != cols) {
        bail!("matrix '{s}' should be {rows}x{cols}");
    }
    let entries: Vec<String> = parsed.into_iter().flatten().collect();
    Ok(Matrix::from_strings(field, rows, cols, &entries)?)
}

fn parse_intervals(s: &str) -> Result<Vec<Interval>> {
    let bad = || anyhow::anyhow!("bad interval list '{s}'");
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    let mut out = Vec::new();
    if s.contains('[') {
        for part in s.split('+') {
            let inner = part.trim().strip_prefix("M[").and_then(|x| x.strip_suffix(']')).ok_or_else(bad)?;
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            out.push(Interval::new(num(a)?, num(b)?));
        }
    } else {
        for part in s.split(',') {
            let (a, b) = part.split_once('-').unwrap_or((part, part));
            out.push(Interval::new(num(a)?, num(b)?));
        }
    }
    Ok(out)
}

/// The orientation whose path order is the shape of `c`.
fn quiver_of(c: &Complex) -> Option<LineQuiver> {
    let n = c.shape().len();
    if n == 0 {
        return None;
    }
    LineQuiver::all_orientations(n).into_iter().find(|q| q.poset() == **c.shape())
}

impl ModuleArgs {
    /// No module was specified at all.
    pub fn is_empty(&self) -> bool {
        self.input.is_none() && self.dims.is_empty() && self.intervals.is_none()
    }

    pub fn load(&self, field: Field) -> Result<(LineQuiver, Complex)> {
        if let Some(path) = &self.input {
            if !self.dims.is_empty() || self.intervals.is_some() || !self.maps.is_empty() {
                bail!("--input cannot be combined with inline module data");
            }
            let c = module_from_json(&read_json(path)?)?;
            let q = quiver_of(&c).context("the document's shape is not a line quiver")?;
            if let Some(code) = &self.quiver {
                if parse_quiver(code)? != q {
                    bail!("--quiver {code} does not match the document's orientation {q}");
                }
            }
            return Ok((q, c.shift(self.degree)));
        }
        let n = if let Some(code) = &self.quiver {
            parse_quiver(code)?.n()
        } else if !self.dims.is_empty() {
            self.dims.len()
        } else if let Some(s) = &self.intervals {
            parse_intervals(s)?.iter().map(|iv| iv.j).max().unwrap_or(1)
        } else {
            bail!("no module given: use --input, --dims or --intervals")
        };
        let q = match &self.quiver {
            Some(code) => parse_quiver(code)?,
            None => LineQuiver::linear(n),
        };
        let rep = if let Some(s) = &self.intervals {
            if !self.dims.is_empty() {
                bail!("--intervals cannot be combined with --dims");
            }
            let ivs = parse_intervals(s)?;
            if let Some(bad) = ivs.iter().find(|iv| iv.i < 1 || iv.i > iv.j || iv.j > n) {
                bail!("interval {bad} does not fit {q}");
            }
            interval_sum(&q, field, &ivs)
        } else {
            self.inline_rep(&q, field)?
        };
        Ok((q, Complex::from_rep(&rep, self.degree)))
    }

    fn inline_rep(&self, q: &LineQuiver, field: Field) -> Result<Rep> {
        let n = q.n();
        if self.dims.len() != n {
            bail!("{} dimensions given for a quiver with {n} vertices", self.dims.len());
        }
        let arrows = q.arrows();
        if !self.maps.is_empty() && self.maps.len() != arrows.len() {
            bail!("{} maps given for {} edges", self.maps.len(), arrows.len());
        }
        let shape = Arc::new(q.poset());
        let mut maps = vec![None; arrows.len()];
        for (edge, &(s, t)) in arrows.iter().enumerate() {
            let (rows, cols) = (self.dims[t - 1], self.dims[s - 1]);
            let text = self.maps.get(edge).map_or("-", String::as_str);
            let m = parse_matrix(field, text, rows, cols).with_context(|| format!("edge {s} -> {t}"))?;
            let e = shape.arrow(s - 1, t - 1).expect("edge of the quiver");
            maps[e] = Some(m);
        }
        let maps = maps.into_iter().map(|m| m.expect("every edge filled")).collect();
        Ok(Rep::new(shape, field, self.dims.clone(), maps)?)
    }
}
