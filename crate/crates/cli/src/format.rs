//! JSON documents for k-graphs and representation graphs.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use kpmod_core::{
    validate_kgraph, validate_rep, KGraph, KGraphReport, RawCoreEdge, RawCoreVertex, RawEdge, RawKGraph, RawRep,
    RawSquare, RepKGraph, RepReport,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("schema error at `{pointer}`: {message}")]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError { pointer: pointer.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseRef {
    /// Relative to the directory of the referring document.
    Path(String),
    Inline(RawKGraph),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    KGraph(RawKGraph),
    RepGraph { base: BaseRef, rep: RawRep },
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("`{path}`: {source}")]
    Schema { path: PathBuf, source: SchemaError },
    #[error("`{path}` is not a k-graph: {source}")]
    InvalidKGraph { path: PathBuf, source: KGraphReport },
    #[error("`{path}` is not a representation graph: {source}")]
    InvalidRep { path: PathBuf, source: RepReport },
    #[error("`{0}` is a {1} document")]
    WrongKind(PathBuf, &'static str),
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

struct Obj<'a> {
    map: &'a Map<String, Value>,
    at: String,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, at: &str) -> Result<Self, SchemaError> {
        v.as_object().map(|map| Obj { map, at: at.to_string() }).ok_or_else(|| schema(at, "expected an object"))
    }

    fn ptr(&self, key: &str) -> String {
        format!("{}/{}", self.at, escape(key))
    }

    fn only(&self, allowed: &[&str]) -> Result<(), SchemaError> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(schema(self.ptr(k), "unexpected key")),
            None => Ok(()),
        }
    }

    fn get(&self, key: &str) -> Result<&'a Value, SchemaError> {
        self.map.get(key).ok_or_else(|| schema(self.ptr(key), "missing key"))
    }

    fn string(&self, key: &str) -> Result<String, SchemaError> {
        self.get(key)?.as_str().map(String::from).ok_or_else(|| schema(self.ptr(key), "expected a string"))
    }

    fn uint(&self, key: &str) -> Result<usize, SchemaError> {
        self.get(key)?
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| schema(self.ptr(key), "expected a nonnegative integer"))
    }

    fn array(&self, key: &str) -> Result<&'a Vec<Value>, SchemaError> {
        self.get(key)?.as_array().ok_or_else(|| schema(self.ptr(key), "expected an array"))
    }
}

fn string_at(v: &Value, at: &str) -> Result<String, SchemaError> {
    v.as_str().map(String::from).ok_or_else(|| schema(at, "expected a string"))
}

fn check_unique<'a>(ids: impl Iterator<Item = (&'a str, String)>) -> Result<(), SchemaError> {
    let mut seen = HashSet::new();
    for (id, at) in ids {
        if !seen.insert(id) {
            return Err(schema(at, format!("duplicate id `{id}`")));
        }
    }
    Ok(())
}

fn parse_kgraph(v: &Value, at: &str, with_kind: bool) -> Result<RawKGraph, SchemaError> {
    let o = Obj::new(v, at)?;
    if with_kind {
        o.only(&["kind", "k", "vertices", "edges", "squares"])?;
    } else {
        o.only(&["k", "vertices", "edges", "squares"])?;
    }
    let k = o.uint("k")?;
    if k == 0 {
        return Err(schema(o.ptr("k"), "rank must be positive"));
    }
    let vertices: Vec<String> = o
        .array("vertices")?
        .iter()
        .enumerate()
        .map(|(i, x)| string_at(x, &format!("{}/{i}", o.ptr("vertices"))))
        .collect::<Result<_, _>>()?;
    check_unique(vertices.iter().enumerate().map(|(i, x)| (x.as_str(), format!("{}/{i}", o.ptr("vertices")))))?;
    let known: HashSet<&str> = vertices.iter().map(String::as_str).collect();
    let mut edges = Vec::new();
    for (i, e) in o.array("edges")?.iter().enumerate() {
        let eo = Obj::new(e, &format!("{}/{i}", o.ptr("edges")))?;
        eo.only(&["id", "color", "src", "rng"])?;
        let edge =
            RawEdge { id: eo.string("id")?, color: eo.uint("color")?, src: eo.string("src")?, rng: eo.string("rng")? };
        if edge.color == 0 || edge.color > k {
            return Err(schema(eo.ptr("color"), format!("colour must lie in 1..={k}")));
        }
        for (key, name) in [("src", &edge.src), ("rng", &edge.rng)] {
            if !known.contains(name.as_str()) {
                return Err(schema(eo.ptr(key), format!("unknown vertex `{name}`")));
            }
        }
        edges.push(edge);
    }
    check_unique(edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), format!("{}/{i}/id", o.ptr("edges")))))?;
    let edge_ids: HashSet<&str> = edges.iter().map(|e| e.id.as_str()).collect();
    let mut squares = Vec::new();
    for (i, s) in o.array("squares")?.iter().enumerate() {
        let sat = format!("{}/{i}", o.ptr("squares"));
        let pair = |v: &Value, at: &str| -> Result<[String; 2], SchemaError> {
            match v.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok([string_at(a, &format!("{at}/0"))?, string_at(b, &format!("{at}/1"))?]),
                _ => Err(schema(at, "expected [inner, outer]")),
            }
        };
        let square: RawSquare = match s.as_array().map(Vec::as_slice) {
            Some([a, b]) => [pair(a, &format!("{sat}/0"))?, pair(b, &format!("{sat}/1"))?],
            _ => return Err(schema(sat, "expected two paths")),
        };
        for (p, path) in square.iter().enumerate() {
            for (j, id) in path.iter().enumerate() {
                if !edge_ids.contains(id.as_str()) {
                    return Err(schema(format!("{sat}/{p}/{j}"), format!("unknown edge `{id}`")));
                }
            }
        }
        squares.push(square);
    }
    Ok(RawKGraph { k, vertices, edges, squares })
}

fn parse_rep(o: &Obj<'_>) -> Result<RawRep, SchemaError> {
    let mut core_vertices = Vec::new();
    for (i, v) in o.array("core_vertices")?.iter().enumerate() {
        let vo = Obj::new(v, &format!("{}/{i}", o.ptr("core_vertices")))?;
        vo.only(&["id", "alpha"])?;
        core_vertices.push(RawCoreVertex { id: vo.string("id")?, alpha: vo.string("alpha")? });
    }
    check_unique(
        core_vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), format!("{}/{i}/id", o.ptr("core_vertices")))),
    )?;
    let known: HashSet<&str> = core_vertices.iter().map(|v| v.id.as_str()).collect();
    let mut core_edges = Vec::new();
    for (i, e) in o.array("core_edges")?.iter().enumerate() {
        let eo = Obj::new(e, &format!("{}/{i}", o.ptr("core_edges")))?;
        eo.only(&["id", "alpha_edge", "color", "src", "rng"])?;
        let color = match eo.map.get("color") {
            None => None,
            Some(_) => Some(eo.uint("color")?),
        };
        let edge = RawCoreEdge {
            id: eo.string("id")?,
            alpha_edge: eo.string("alpha_edge")?,
            color,
            src: eo.string("src")?,
            rng: eo.string("rng")?,
        };
        for (key, name) in [("src", &edge.src), ("rng", &edge.rng)] {
            if !known.contains(name.as_str()) {
                return Err(schema(eo.ptr(key), format!("unknown core vertex `{name}`")));
            }
        }
        core_edges.push(edge);
    }
    check_unique(
        core_edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), format!("{}/{i}/id", o.ptr("core_edges")))),
    )?;
    Ok(RawRep { core_vertices, core_edges })
}

/// Checks that every label of `rep` names something in `base`.
pub fn check_labels(rep: &RawRep, base: &RawKGraph) -> Result<(), SchemaError> {
    let vertices: HashSet<&str> = base.vertices.iter().map(String::as_str).collect();
    let edges: HashSet<&str> = base.edges.iter().map(|e| e.id.as_str()).collect();
    for (i, v) in rep.core_vertices.iter().enumerate() {
        if !vertices.contains(v.alpha.as_str()) {
            return Err(schema(format!("/core_vertices/{i}/alpha"), format!("unknown base vertex `{}`", v.alpha)));
        }
    }
    for (i, e) in rep.core_edges.iter().enumerate() {
        if !edges.contains(e.alpha_edge.as_str()) {
            return Err(schema(format!("/core_edges/{i}/alpha_edge"), format!("unknown base edge `{}`", e.alpha_edge)));
        }
    }
    Ok(())
}

pub fn parse_document(text: &str) -> Result<Document, SchemaError> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    let o = Obj::new(&v, "")?;
    match o.string("kind")?.as_str() {
        "kgraph" => Ok(Document::KGraph(parse_kgraph(&v, "", true)?)),
        "repgraph" => {
            o.only(&["kind", "base", "core_vertices", "core_edges"])?;
            let base = match o.get("base")? {
                Value::String(p) => BaseRef::Path(p.clone()),
                inline @ Value::Object(_) => BaseRef::Inline(parse_kgraph(inline, "/base", false)?),
                _ => return Err(schema("/base", "expected a path or an inline k-graph")),
            };
            let rep = parse_rep(&o)?;
            if let BaseRef::Inline(g) = &base {
                check_labels(&rep, g)?;
            }
            Ok(Document::RepGraph { base, rep })
        }
        other => Err(schema("/kind", format!("unknown kind `{other}`"))),
    }
}

fn kgraph_value(g: &RawKGraph) -> Map<String, Value> {
    let edges: Vec<Value> =
        g.edges.iter().map(|e| json!({"id": e.id, "color": e.color, "src": e.src, "rng": e.rng})).collect();
    let mut m = Map::new();
    m.insert("k".into(), json!(g.k));
    m.insert("vertices".into(), json!(g.vertices));
    m.insert("edges".into(), Value::Array(edges));
    m.insert("squares".into(), json!(g.squares));
    m
}

pub fn document_value(doc: &Document) -> Value {
    match doc {
        Document::KGraph(g) => {
            let mut m = kgraph_value(g);
            m.insert("kind".into(), json!("kgraph"));
            Value::Object(m)
        }
        Document::RepGraph { base, rep } => {
            let base = match base {
                BaseRef::Path(p) => json!(p),
                BaseRef::Inline(g) => Value::Object(kgraph_value(g)),
            };
            let vertices: Vec<Value> =
                rep.core_vertices.iter().map(|v| json!({"id": v.id, "alpha": v.alpha})).collect();
            let edges: Vec<Value> = rep
                .core_edges
                .iter()
                .map(|e| {
                    let mut m = BTreeMap::from([
                        ("id", json!(e.id)),
                        ("alpha_edge", json!(e.alpha_edge)),
                        ("src", json!(e.src)),
                        ("rng", json!(e.rng)),
                    ]);
                    if let Some(c) = e.color {
                        m.insert("color", json!(c));
                    }
                    json!(m)
                })
                .collect();
            json!({"kind": "repgraph", "base": base, "core_vertices": vertices, "core_edges": edges})
        }
    }
}

/// Key-sorted, two-space indented, newline-terminated.
pub fn emit_document(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&document_value(doc)).expect("documents serialize");
    s.push('\n');
    s
}

pub fn kgraph_to_raw(g: &KGraph) -> RawKGraph {
    RawKGraph {
        k: g.k(),
        vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
        edges: g
            .edge_ids()
            .map(|e| {
                let d = g.edge(e);
                RawEdge {
                    id: g.edge_name(e).into(),
                    color: d.color + 1,
                    src: g.vertex_name(d.src).into(),
                    rng: g.vertex_name(d.rng).into(),
                }
            })
            .collect(),
        squares: g.squares().iter().map(|sq| sq.map(|p| p.map(|e| g.edge_name(e).to_string()))).collect(),
    }
}

pub fn rep_to_raw(d: &RepKGraph) -> RawRep {
    let g = d.base();
    RawRep {
        core_vertices: d
            .core()
            .map(|c| RawCoreVertex { id: d.name(c).into(), alpha: g.vertex_name(d.core_alpha(c)).into() })
            .collect(),
        core_edges: d
            .core_edges()
            .iter()
            .map(|e| RawCoreEdge {
                id: e.name.clone(),
                alpha_edge: g.edge_name(e.label).into(),
                color: None,
                src: d.name(e.src).into(),
                rng: d.name(e.rng).into(),
            })
            .collect(),
    }
}

pub fn read_document(path: &Path) -> Result<Document, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
    parse_document(&text).map_err(|source| LoadError::Schema { path: path.into(), source })
}

fn build_kgraph(raw: &RawKGraph, path: &Path) -> Result<Arc<KGraph>, LoadError> {
    validate_kgraph(raw).map(Arc::new).map_err(|source| LoadError::InvalidKGraph { path: path.into(), source })
}

pub fn resolve_base(base: &BaseRef, doc_path: &Path) -> Result<(RawKGraph, PathBuf), LoadError> {
    match base {
        BaseRef::Inline(g) => Ok((g.clone(), doc_path.into())),
        BaseRef::Path(p) => {
            let path = doc_path.parent().unwrap_or(Path::new(".")).join(p);
            match read_document(&path)? {
                Document::KGraph(g) => Ok((g, path)),
                Document::RepGraph { .. } => Err(LoadError::WrongKind(path, "repgraph")),
            }
        }
    }
}

pub fn load_kgraph(path: &Path) -> Result<Arc<KGraph>, LoadError> {
    match read_document(path)? {
        Document::KGraph(raw) => build_kgraph(&raw, path),
        Document::RepGraph { .. } => Err(LoadError::WrongKind(path.into(), "repgraph")),
    }
}

pub fn load_rep(path: &Path) -> Result<RepKGraph, LoadError> {
    match read_document(path)? {
        Document::RepGraph { base, rep } => build_rep(&base, &rep, path),
        Document::KGraph(_) => Err(LoadError::WrongKind(path.into(), "kgraph")),
    }
}

pub fn build_rep(base: &BaseRef, rep: &RawRep, path: &Path) -> Result<RepKGraph, LoadError> {
    let (raw_base, base_path) = resolve_base(base, path)?;
    check_labels(rep, &raw_base).map_err(|source| LoadError::Schema { path: path.into(), source })?;
    let g = build_kgraph(&raw_base, &base_path)?;
    validate_rep(g, rep).map_err(|source| LoadError::InvalidRep { path: path.into(), source })
}

/// A self-contained document for `d`, with the base inlined.
pub fn rep_document(d: &RepKGraph) -> Document {
    Document::RepGraph { base: BaseRef::Inline(kgraph_to_raw(d.base())), rep: rep_to_raw(d) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kpmod_core::fixtures;

    #[test]
    fn kgraph_round_trip() {
        let doc = Document::KGraph(fixtures::raw_torus());
        let text = emit_document(&doc);
        assert_eq!(parse_document(&text).unwrap(), doc);
        assert_eq!(emit_document(&parse_document(&text).unwrap()), text);
    }

    #[test]
    fn missing_squares_is_located() {
        let text = r#"{"kind": "kgraph", "k": 1, "vertices": ["v"], "edges": []}"#;
        assert_eq!(parse_document(text).unwrap_err().pointer, "/squares");
    }

    #[test]
    fn unknown_label_is_located() {
        let mut rep = fixtures::raw_two_cycle();
        rep.core_edges[1].alpha_edge = "nope".into();
        let doc = Document::RepGraph { base: BaseRef::Inline(fixtures::raw_one_loop()), rep };
        let err = parse_document(&emit_document(&doc)).unwrap_err();
        assert_eq!(err.pointer, "/core_edges/1/alpha_edge");
    }

    #[test]
    fn structural_errors_are_located() {
        let cases = [
            (r#"[]"#, ""),
            (r#"{"kind": "graph"}"#, "/kind"),
            (r#"{"kind": "kgraph", "k": 0, "vertices": [], "edges": [], "squares": []}"#, "/k"),
            (r#"{"kind": "kgraph", "k": 1, "vertices": ["v", "v"], "edges": [], "squares": []}"#, "/vertices/1"),
            (
                r#"{"kind": "kgraph", "k": 1, "vertices": ["v"], "edges": [{"id": "l", "color": 2, "src": "v", "rng": "v"}], "squares": []}"#,
                "/edges/0/color",
            ),
            (r#"{"kind": "kgraph", "k": 1, "vertices": ["v"], "edges": [], "squares": [], "extra": 1}"#, "/extra"),
            (
                r#"{"kind": "kgraph", "k": 2, "vertices": ["v"], "edges": [], "squares": [[["a", "b"], ["b"]]]}"#,
                "/squares/0/1",
            ),
        ];
        for (text, pointer) in cases {
            assert_eq!(parse_document(text).unwrap_err().pointer, pointer, "{text}");
        }
    }

    #[test]
    fn rep_documents_rebuild() {
        for (name, d) in fixtures::all_reps() {
            let doc = rep_document(&d);
            let text = emit_document(&doc);
            let Document::RepGraph { base, rep } = parse_document(&text).unwrap() else { panic!("{name}") };
            let back = build_rep(&base, &rep, Path::new("inline.json")).unwrap();
            assert!(back.is_isomorphic(&d), "{name}");
        }
    }
}
