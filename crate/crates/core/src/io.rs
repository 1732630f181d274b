//! File formats: versioned JSON documents, DOT and TikZ renderings, CSV tables.
//!
//! Every JSON document carries a `"schema"` string naming its kind and version.
//! Arrow matrices are keyed by their endpoints so that documents do not depend
//! on the internal ordering of covering relations. Renderings list vertices
//! and edges in sorted order, so equal inputs give byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::ar::{value_table, ARDiagram};
use crate::bimod::{carrier, BimodError, Bimodule};
use crate::derived::{Complex, ComplexError};
use crate::higher::{phi_domain, window_arrows, Base, Graded, GradedMap, NTriangle};
use crate::linalg::{Field, LinalgError, Matrix};
use crate::rep::{Rep, RepError};
use crate::shapes::{mesh_map_f, LineQuiver, MeshVertex, MeshWindow, Poset, ShapeError};

pub const SCHEMA_REP: &str = "meshrep.rep/1";
pub const SCHEMA_COMPLEX: &str = "meshrep.complex/1";
pub const SCHEMA_BIMODULE: &str = "meshrep.bimodule/1";
pub const SCHEMA_BASE: &str = "meshrep.base/1";
pub const SCHEMA_TRIANGLE: &str = "meshrep.triangle/1";
pub const SCHEMA_AR: &str = "meshrep.ar/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected schema '{expected}', found '{found}'")]
    Schema { expected: String, found: String },
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Bimod(#[from] BimodError),
}

fn malformed(s: impl Into<String>) -> IoError {
    IoError::Malformed(s.into())
}

/// The `"schema"` field of a JSON document, if any.
pub fn schema_of(doc: &Value) -> Option<&str> {
    doc.get("schema").and_then(Value::as_str)
}

fn expect_schema(doc: &Value, expected: &str) -> Result<(), IoError> {
    let found = schema_of(doc).unwrap_or("");
    if found != expected {
        return Err(IoError::Schema { expected: expected.into(), found: found.into() });
    }
    Ok(())
}

fn tagged(schema: &str, body: impl Serialize) -> Value {
    let mut v = serde_json::to_value(body).expect("serializable");
    let obj = v.as_object_mut().expect("documents are objects");
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), Value::String(schema.into()));
    out.append(obj);
    Value::Object(out)
}

#[derive(Serialize, Deserialize)]
struct ShapeWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quiver: Option<String>,
    labels: Vec<String>,
    relations: Vec<(usize, usize)>,
}

impl ShapeWire {
    fn of(p: &Poset) -> ShapeWire {
        ShapeWire { quiver: None, labels: p.labels().to_vec(), relations: p.hasse().to_vec() }
    }

    fn load(&self) -> Result<Arc<Poset>, IoError> {
        if let Some(code) = &self.quiver {
            let q = LineQuiver::parse(code)?;
            if q.n() != self.labels.len() {
                return Err(malformed(format!("quiver {code} does not have {} vertices", self.labels.len())));
            }
            return Ok(Arc::new(q.poset()));
        }
        if self.relations.iter().any(|&(a, b)| a >= self.labels.len() || b >= self.labels.len()) {
            return Err(malformed("relation out of range"));
        }
        Ok(Arc::new(Poset::generated(self.labels.clone(), &self.relations)?))
    }
}

#[derive(Serialize, Deserialize)]
struct ArrowWire {
    s: usize,
    t: usize,
    m: Value,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    dims: Vec<usize>,
    arrows: Vec<ArrowWire>,
    /// `C_i(v) -> C_{i-1}(v)`; empty in the lowest degree.
    diffs: Vec<Value>,
}

#[derive(Serialize, Deserialize)]
struct ChainWire {
    lo: i64,
    terms: Vec<TermWire>,
}

fn arrows_wire(shape: &Poset, maps: impl Fn(usize) -> Matrix) -> Vec<ArrowWire> {
    shape.hasse().iter().enumerate().map(|(e, &(s, t))| ArrowWire { s, t, m: maps(e).to_json() }).collect()
}

fn load_arrows(shape: &Poset, field: Field, wire: &[ArrowWire]) -> Result<Vec<Matrix>, IoError> {
    let mut out: Vec<Option<Matrix>> = vec![None; shape.hasse().len()];
    for a in wire {
        let e = shape.arrow(a.s, a.t).ok_or_else(|| malformed(format!("{} -> {} is not a covering arrow", a.s, a.t)))?;
        out[e] = Some(Matrix::from_json(field, &a.m)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(e, m)| m.ok_or_else(|| malformed(format!("missing arrow {:?}", shape.hasse()[e]))))
        .collect()
}

fn chain_wire(c: &Complex) -> ChainWire {
    let shape = c.shape().clone();
    let terms = if c.is_zero() {
        vec![]
    } else {
        c.degrees()
            .map(|i| TermWire {
                dims: (0..shape.len()).map(|v| c.dim(i, v)).collect(),
                arrows: arrows_wire(&shape, |e| c.arrow_map(i, e)),
                diffs: if i == c.lo() { vec![] } else { (0..shape.len()).map(|v| c.diff(i, v).to_json()).collect() },
            })
            .collect()
    };
    ChainWire { lo: if c.is_zero() { 0 } else { c.lo() }, terms }
}

fn load_chain(shape: Arc<Poset>, field: Field, w: &ChainWire) -> Result<Complex, IoError> {
    let mut dims = Vec::new();
    let mut maps = Vec::new();
    let mut diffs = Vec::new();
    for (d, t) in w.terms.iter().enumerate() {
        if t.dims.len() != shape.len() {
            return Err(malformed(format!("degree {} has {} dimensions", w.lo + d as i64, t.dims.len())));
        }
        maps.push(load_arrows(&shape, field, &t.arrows)?);
        diffs.push(if d == 0 {
            t.dims.iter().map(|&k| Matrix::zeros(field, 0, k)).collect()
        } else {
            t.diffs.iter().map(|m| Matrix::from_json(field, m)).collect::<Result<Vec<_>, _>>()?
        });
        dims.push(t.dims.clone());
    }
    if dims.is_empty() {
        return Ok(Complex::zero(shape, field));
    }
    Ok(Complex::from_raw(shape, field, w.lo, dims, maps, diffs)?)
}

fn field_of(s: &str) -> Result<Field, IoError> {
    Ok(Field::parse(s)?)
}

#[derive(Serialize, Deserialize)]
struct RepDoc {
    field: String,
    shape: ShapeWire,
    dims: Vec<usize>,
    arrows: Vec<ArrowWire>,
}

fn shape_wire(p: &Poset, q: Option<&LineQuiver>) -> ShapeWire {
    let mut w = ShapeWire::of(p);
    w.quiver = q.map(LineQuiver::code);
    w
}

/// A representation; pass the line quiver when the shape is its path order.
pub fn rep_to_json(x: &Rep, q: Option<&LineQuiver>) -> Value {
    tagged(
        SCHEMA_REP,
        RepDoc {
            field: x.field().to_string(),
            shape: shape_wire(x.shape(), q),
            dims: x.dims().to_vec(),
            arrows: arrows_wire(x.shape(), |e| x.arrow_map(e).clone()),
        },
    )
}

pub fn rep_from_json(doc: &Value) -> Result<Rep, IoError> {
    expect_schema(doc, SCHEMA_REP)?;
    let d: RepDoc = serde_json::from_value(doc.clone())?;
    let field = field_of(&d.field)?;
    let shape = d.shape.load()?;
    let maps = load_arrows(&shape, field, &d.arrows)?;
    Ok(Rep::new(shape, field, d.dims, maps)?)
}

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    field: String,
    shape: ShapeWire,
    #[serde(flatten)]
    chain: ChainWire,
}

pub fn complex_to_json(c: &Complex, q: Option<&LineQuiver>) -> Value {
    tagged(SCHEMA_COMPLEX, ComplexDoc { field: c.field().to_string(), shape: shape_wire(c.shape(), q), chain: chain_wire(c) })
}

pub fn complex_from_json(doc: &Value) -> Result<Complex, IoError> {
    expect_schema(doc, SCHEMA_COMPLEX)?;
    let d: ComplexDoc = serde_json::from_value(doc.clone())?;
    load_chain(d.shape.load()?, field_of(&d.field)?, &d.chain)
}

/// Reads a complex document, or a representation document placed in degree 0.
pub fn module_from_json(doc: &Value) -> Result<Complex, IoError> {
    match schema_of(doc) {
        Some(SCHEMA_REP) => Ok(Complex::from_rep(&rep_from_json(doc)?, 0)),
        _ => complex_from_json(doc),
    }
}

#[derive(Serialize, Deserialize)]
struct BimodDoc {
    field: String,
    left: ShapeWire,
    right: ShapeWire,
    /// Over `left x right^op`, elements `(a, b)` at index `a * |right| + b`.
    #[serde(flatten)]
    chain: ChainWire,
}

pub fn bimodule_to_json(m: &Bimodule) -> Value {
    tagged(
        SCHEMA_BIMODULE,
        BimodDoc {
            field: m.field().to_string(),
            left: ShapeWire::of(&m.left),
            right: ShapeWire::of(&m.right),
            chain: chain_wire(&m.complex),
        },
    )
}

pub fn bimodule_from_json(doc: &Value) -> Result<Bimodule, IoError> {
    expect_schema(doc, SCHEMA_BIMODULE)?;
    let d: BimodDoc = serde_json::from_value(doc.clone())?;
    let (left, right) = (d.left.load()?, d.right.load()?);
    let c = load_chain(carrier(&left, &right), field_of(&d.field)?, &d.chain)?;
    Ok(Bimodule::new(left, right, c)?)
}

/// Homology dimension table of a bimodule, one row per `(degree, a, b)` with nonzero entry.
pub fn bimodule_csv(m: &Bimodule) -> String {
    let mut out = String::from("degree,left,right,dim\n");
    let c = &m.complex;
    for i in c.degrees() {
        let dims = c.homology_dims(i);
        for a in 0..m.left.len() {
            for b in 0..m.right.len() {
                let d = dims[m.index(a, b)];
                if d > 0 {
                    let _ = writeln!(out, "{i},\"{}\",\"{}\",{d}", m.left.label(a), m.right.label(b));
                }
            }
        }
    }
    out
}

type GradedMapWire = Vec<(i64, Value)>;

fn graded_map_wire(m: &GradedMap) -> GradedMapWire {
    m.0.iter().map(|(&i, x)| (i, x.to_json())).collect()
}

/// Reads a graded map and checks every component against `src -> tgt`.
fn load_graded_map(field: Field, w: &GradedMapWire, src: &Graded, tgt: &Graded, what: &str) -> Result<GradedMap, IoError> {
    let mut out = BTreeMap::new();
    for (i, v) in w {
        let m = Matrix::from_json(field, v)?;
        if (m.rows(), m.cols()) != (tgt.dim(*i), src.dim(*i)) {
            return Err(malformed(format!("{what}: component in degree {i} is {}x{}", m.rows(), m.cols())));
        }
        if m.rows() > 0 && m.cols() > 0 {
            out.insert(*i, m);
        }
    }
    Ok(GradedMap(out))
}

#[derive(Serialize, Deserialize)]
struct BaseDoc {
    field: String,
    values: Vec<Graded>,
    maps: Vec<GradedMapWire>,
}

pub fn base_to_json(b: &Base) -> Value {
    tagged(
        SCHEMA_BASE,
        BaseDoc { field: b.field.to_string(), values: b.values.clone(), maps: b.maps.iter().map(graded_map_wire).collect() },
    )
}

pub fn base_from_json(doc: &Value) -> Result<Base, IoError> {
    expect_schema(doc, SCHEMA_BASE)?;
    let d: BaseDoc = serde_json::from_value(doc.clone())?;
    let field = field_of(&d.field)?;
    if d.values.is_empty() || d.maps.len() + 1 != d.values.len() {
        return Err(malformed(format!("{} values need {} maps", d.values.len(), d.values.len().saturating_sub(1))));
    }
    let maps = d
        .maps
        .iter()
        .enumerate()
        .map(|(l, w)| load_graded_map(field, w, &d.values[l], &d.values[l + 1], &format!("map {}", l + 1)))
        .collect::<Result<_, _>>()?;
    Ok(Base { field, values: d.values, maps })
}

#[derive(Serialize, Deserialize)]
struct TriValue {
    v: MeshVertex,
    dims: Graded,
}

#[derive(Serialize, Deserialize)]
struct TriArrow {
    from: MeshVertex,
    to: MeshVertex,
    map: GradedMapWire,
}

#[derive(Serialize, Deserialize)]
struct TriPhi {
    v: MeshVertex,
    map: GradedMapWire,
}

#[derive(Serialize, Deserialize)]
struct TriangleDoc {
    n: usize,
    field: String,
    window: MeshWindow,
    values: Vec<TriValue>,
    arrows: Vec<TriArrow>,
    phi: Vec<TriPhi>,
}

/// The homotopy-category data of a triangle; a remembered coherent diagram is dropped.
pub fn triangle_to_json(t: &NTriangle) -> Value {
    tagged(
        SCHEMA_TRIANGLE,
        TriangleDoc {
            n: t.n,
            field: t.field.to_string(),
            window: t.window,
            values: t.values().iter().filter(|(_, g)| !g.is_zero()).map(|(&v, g)| TriValue { v, dims: g.clone() }).collect(),
            arrows: t
                .arrows()
                .iter()
                .filter(|(_, m)| !m.0.is_empty())
                .map(|(&(from, to), m)| TriArrow { from, to, map: graded_map_wire(m) })
                .collect(),
            phi: t.phis().iter().filter(|(_, m)| !m.0.is_empty()).map(|(&v, m)| TriPhi { v, map: graded_map_wire(m) }).collect(),
        },
    )
}

pub fn triangle_from_json(doc: &Value) -> Result<NTriangle, IoError> {
    expect_schema(doc, SCHEMA_TRIANGLE)?;
    let d: TriangleDoc = serde_json::from_value(doc.clone())?;
    let field = field_of(&d.field)?;
    let w = d.window;
    if w.n != d.n || d.n == 0 || w.kmin > w.kmax {
        return Err(malformed("window does not match n"));
    }
    let mut values = BTreeMap::new();
    for x in d.values {
        if !w.contains(x.v) {
            return Err(malformed(format!("value at {} outside the window", x.v)));
        }
        values.insert(x.v, x.dims);
    }
    let value = |v: MeshVertex| values.get(&v).cloned().unwrap_or_default();
    let edges: Vec<(MeshVertex, MeshVertex)> = window_arrows(&w);
    let mut arrows = BTreeMap::new();
    for a in &d.arrows {
        if !edges.contains(&(a.from, a.to)) {
            return Err(malformed(format!("{} -> {} is not an arrow of the window", a.from, a.to)));
        }
        let m = load_graded_map(field, &a.map, &value(a.from), &value(a.to), &format!("arrow {} -> {}", a.from, a.to))?;
        arrows.insert((a.from, a.to), m);
    }
    let dom = phi_domain(&w);
    let mut phi = BTreeMap::new();
    for p in &d.phi {
        if !dom.contains(&p.v) {
            return Err(malformed(format!("phi at {} outside its domain", p.v)));
        }
        let src = value(mesh_map_f(d.n, p.v)?);
        let m = load_graded_map(field, &p.map, &src, &value(p.v).shift(1), &format!("phi at {}", p.v))?;
        phi.insert(p.v, m);
    }
    Ok(NTriangle::from_parts(d.n, field, w, values, arrows, phi))
}

/// Options shared by the diagram renderers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Leave out the boundary rows `l = 0` and `l = n + 1`.
    pub hide_boundary: bool,
}

/// Labels of all window vertices: normal forms in the interior, `0` on the boundary.
pub fn ar_labels(d: &ARDiagram) -> BTreeMap<MeshVertex, String> {
    if d.r_shape.len() == 1 {
        // values are complexes of vector spaces
        return d
            .window
            .vertices()
            .into_iter()
            .map(|v| {
                let c = d.value(v).expect("in window");
                (v, Graded::new(c.degrees().map(|i| (i, c.homology_dim(i, 0)))).to_string())
            })
            .collect();
    }
    let table = value_table(d);
    d.window
        .vertices()
        .into_iter()
        .map(|v| {
            let label = match table.as_ref().and_then(|t| t.get(&v)) {
                Some(nf) => nf.to_string(),
                None if v.is_boundary(d.n()) => "0".to_string(),
                None => {
                    let c = d.value(v).expect("in window");
                    if c.is_acyclic() {
                        "0".to_string()
                    } else {
                        format!("dim {}", c.homology_size())
                    }
                }
            };
            (v, label)
        })
        .collect()
}

fn visible(n: usize, opts: RenderOptions, v: MeshVertex) -> bool {
    !(opts.hide_boundary && v.is_boundary(n))
}

fn sorted_edges(w: &MeshWindow, n: usize, opts: RenderOptions) -> Vec<(MeshVertex, MeshVertex)> {
    let mut e: Vec<_> = window_arrows(w).into_iter().filter(|(a, b)| visible(n, opts, *a) && visible(n, opts, *b)).collect();
    e.sort();
    e
}

fn dot_id(v: MeshVertex) -> String {
    format!("\"{},{}\"", v.k, v.l)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Mesh layout: column `k` and level `l` sit at `(2k + l, l)`.
fn position(v: MeshVertex) -> (i64, i64) {
    (2 * v.k + v.l, v.l)
}

fn dot_graph(name: &str, w: &MeshWindow, labels: &BTreeMap<MeshVertex, String>, opts: RenderOptions, extra: &[String]) -> String {
    let n = w.n;
    let mut out = format!("digraph {name} {{\n  node [shape=plaintext];\n");
    for (v, label) in labels {
        if visible(n, opts, *v) {
            let (x, y) = position(*v);
            let _ = writeln!(out, "  {} [label=\"{}\", pos=\"{x},{y}!\"];", dot_id(*v), dot_escape(label));
        }
    }
    for (a, b) in sorted_edges(w, n, opts) {
        let _ = writeln!(out, "  {} -> {};", dot_id(a), dot_id(b));
    }
    for line in extra {
        let _ = writeln!(out, "  {line}");
    }
    out.push_str("}\n");
    out
}

pub fn ar_to_dot(d: &ARDiagram, opts: RenderOptions) -> String {
    dot_graph("ar", &d.window, &ar_labels(d), opts, &[])
}

fn tikz_name(v: MeshVertex) -> String {
    format!("v{}_{}", v.k, v.l).replace('-', "m")
}

fn tikz_label(s: &str) -> String {
    s.replace("Σ^", "\\Sigma^").replace('Σ', "\\Sigma ")
}

pub fn ar_to_tikz(d: &ARDiagram, opts: RenderOptions) -> String {
    let n = d.n();
    let mut out = String::from("\\begin{tikzpicture}[x=0.9cm, y=1.2cm]\n");
    for (v, label) in ar_labels(d) {
        if visible(n, opts, v) {
            let (x, y) = position(v);
            let _ = writeln!(out, "  \\node ({}) at ({x},{y}) {{${}$}};", tikz_name(v), tikz_label(&label));
        }
    }
    for (a, b) in sorted_edges(&d.window, n, opts) {
        let _ = writeln!(out, "  \\draw[->] ({}) -- ({});", tikz_name(a), tikz_name(b));
    }
    out.push_str("\\end{tikzpicture}\n");
    out
}

#[derive(Serialize)]
struct ArVertexWire {
    k: i64,
    l: i64,
    value: String,
}

#[derive(Serialize)]
struct ArDoc {
    quiver: String,
    field: String,
    window: MeshWindow,
    vertices: Vec<ArVertexWire>,
    arrows: Vec<(MeshVertex, MeshVertex)>,
}

/// Vertex labels and arrows of a diagram; an export format, not read back.
pub fn ar_to_json(d: &ARDiagram, opts: RenderOptions) -> Value {
    let n = d.n();
    tagged(
        SCHEMA_AR,
        ArDoc {
            quiver: d.q.code(),
            field: d.complex.field().to_string(),
            window: d.window,
            vertices: ar_labels(d)
                .into_iter()
                .filter(|(v, _)| visible(n, opts, *v))
                .map(|(v, value)| ArVertexWire { k: v.k, l: v.l, value })
                .collect(),
            arrows: sorted_edges(&d.window, n, opts),
        },
    )
}

/// Triangle rendering: graded dimensions at vertices, arrow ranks on edges,
/// dashed `phi` edges from `f v` to `v`.
pub fn triangle_to_dot(t: &NTriangle, opts: RenderOptions) -> String {
    let labels: BTreeMap<MeshVertex, String> = t.values().iter().map(|(&v, g)| (v, g.to_string())).collect();
    let mut extra = Vec::new();
    for (v, m) in t.phis() {
        let fv = mesh_map_f(t.n, *v).expect("level");
        if !m.0.is_empty() && visible(t.n, opts, *v) && visible(t.n, opts, fv) {
            extra.push(format!("{} -> {} [style=dashed, label=\"phi\"];", dot_id(fv), dot_id(*v)));
        }
    }
    dot_graph("triangle", &t.window, &labels, opts, &extra)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}
