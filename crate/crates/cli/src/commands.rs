//! Command-line surface: argument parsing, dispatch and reports.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use kpmod_core::{
    act_element, annihilator_ball, base_point_independent, indecomposability_verdict, is_simple, presentation,
    submodule_witness, universal_cover_ball, validate_kgraph, validate_rep, CoreId, Field, GroupClass, RepKGraph,
    Verdict, VertexPartition,
};
use serde_json::{json, Value};

use crate::dot;
use crate::expr;
use crate::format::{self, Document, LoadError};

#[derive(Debug, Parser)]
#[command(name = "kpmod", version, about = "Exact computation with k-graphs, representation graphs and their modules")]
pub struct Cli {
    /// Scalar field: `q` for the rationals or `fp:P` for a prime field.
    #[arg(long, global = true, default_value = "q")]
    pub field: String,
    /// Write the report to PATH instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a k-graph or representation graph document.
    Validate { file: PathBuf },
    /// Quotient by the walk-language relation or by a partition file.
    Quotient {
        file: PathBuf,
        /// `sim` or a JSON file listing blocks of core vertex ids.
        #[arg(long, default_value = "sim")]
        by: String,
    },
    /// Whether the walk-language relation is trivial.
    Irreducible { file: PathBuf },
    /// Whether the module over the representation graph is simple.
    Simple { file: PathBuf },
    /// Apply an algebra element to a vector.
    Act {
        file: PathBuf,
        #[arg(long)]
        elem: String,
        #[arg(long)]
        vec: String,
    },
    /// Presentation and class of the fundamental group of the core.
    Pi1 {
        file: PathBuf,
        #[arg(long)]
        base: Option<String>,
    },
    /// Indecomposability verdict for the component.
    Verdict { file: PathBuf },
    /// A ball in the universal cover of the core.
    CoverBall {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        radius: i64,
        #[arg(long)]
        base: Option<String>,
    },
    /// Annihilator of the cover module among short loops.
    Ann {
        file: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long, allow_negative_numbers = true)]
        radius: i64,
        #[arg(long)]
        base: Option<String>,
    },
    /// Whether two representation graphs lie in one connected component.
    SameComponent { a: PathBuf, b: PathBuf },
    /// Graphviz export; with `--radius`, of a cover ball.
    Dot {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        radius: Option<i64>,
        #[arg(long)]
        base: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: i32, text: String, json: Value) -> Self {
        Report { code, text, json }
    }
}

struct Failure {
    message: String,
    pointer: Option<String>,
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        let pointer = match &e {
            LoadError::Schema { source, .. } => Some(source.pointer.clone()),
            _ => None,
        };
        Failure { message: e.to_string(), pointer }
    }
}

fn fail(message: impl ToString) -> Failure {
    Failure { message: message.to_string(), pointer: None }
}

/// Exit status 0 on success or a positive answer, 1 on a negative answer, 2 on errors.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = Field::parse(&cli.field).map_err(fail).and_then(|field| dispatch(&cli.command, field));
    let (code, stdout, stderr) = match result {
        Ok(r) => {
            let body = if cli.json { pretty(&r.json) } else { r.text };
            (r.code, body, String::new())
        }
        Err(f) => {
            let body =
                if cli.json { pretty(&json!({"error": f.message, "pointer": f.pointer})) } else { String::new() };
            (2, body, format!("error: {}\n", f.message))
        }
    };
    if let (Some(path), 0 | 1) = (&cli.out, code) {
        if let Err(e) = std::fs::write(path, &stdout) {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: cannot write `{}`: {e}\n", path.display()),
            };
        }
        return Outcome { code, stdout: String::new(), stderr };
    }
    Outcome { code, stdout, stderr }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn lines(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}

fn core_vertex(d: &RepKGraph, name: &Option<String>) -> Result<CoreId, Failure> {
    match name {
        None => Ok(CoreId(0)),
        Some(n) => d.core_id(n).ok_or_else(|| fail(format!("unknown core vertex `{n}`"))),
    }
}

fn dispatch(cmd: &Command, field: Field) -> Result<Report, Failure> {
    match cmd {
        Command::Validate { file } => validate(file),
        Command::Quotient { file, by } => quotient(file, by),
        Command::Irreducible { file } => {
            let d = format::load_rep(file)?;
            let ok = d.is_irreducible();
            let pair = witness_pair(&d);
            let mut text = lines(&[("irreducible", ok.to_string())]);
            if let Some((u, v)) = &pair {
                text += &lines(&[("witness", format!("({u}, {v})"))]);
            }
            Ok(Report::new(i32::from(!ok), text, json!({"irreducible": ok, "witness": pair.map(|(u, v)| [u, v])})))
        }
        Command::Simple { file } => {
            let d = format::load_rep(file)?;
            let ok = is_simple(&d);
            let pair = witness_pair(&d);
            let mut text = lines(&[("simple", ok.to_string())]);
            if let Some((u, v)) = &pair {
                text += &lines(&[("witness", format!("({u}, {v})")), ("submodule generated by", format!("{u} - {v}"))]);
            }
            Ok(Report::new(i32::from(!ok), text, json!({"simple": ok, "witness": pair.map(|(u, v)| [u, v])})))
        }
        Command::Act { file, elem, vec } => {
            let d = format::load_rep(file)?;
            let a = expr::parse_element(d.base_arc(), field, elem).map_err(fail)?;
            let x = expr::parse_vector(&d, field, vec).map_err(fail)?;
            let y = act_element(&d, &a, &x).map_err(fail)?;
            let out = y.to_string(&d);
            Ok(Report::new(0, lines(&[("result", out.clone())]), json!({"element": a.to_string(), "result": out})))
        }
        Command::Pi1 { file, base } => {
            let d = format::load_rep(file)?;
            let y = core_vertex(&d, base)?;
            let group = presentation(&d, y);
            let p = group.presentation();
            let class = group.classify();
            let relators: Vec<String> = p.relators.iter().map(|r| p.word_to_string(r)).collect();
            let text = lines(&[
                ("base", d.name(y).to_string()),
                ("generators", format!("{} ({})", p.generators.len(), p.generators.join(", "))),
                ("relators", format!("{} ({})", relators.len(), relators.join("; "))),
                ("presentation", p.to_string()),
                ("class", class.to_string()),
            ]);
            let json = json!({
                "base": d.name(y),
                "generators": p.generators,
                "relators": relators,
                "class": class.to_string(),
            });
            Ok(Report::new(0, text, json))
        }
        Command::Verdict { file } => {
            let d = format::load_rep(file)?;
            let v = indecomposability_verdict(&d);
            let (code, class) = match &v {
                Verdict::Indecomposable(c) => (0, c),
                Verdict::Unknown(c) => (1, c),
            };
            let json = json!({
                "indecomposable": code == 0,
                "class": class.to_string(),
                "presentation": match class { GroupClass::Unknown(p) => Some(p.to_string()), _ => None },
            });
            Ok(Report::new(code, lines(&[("verdict", v.to_string())]), json))
        }
        Command::CoverBall { file, radius, base } => {
            let d = format::load_rep(file)?;
            let y = core_vertex(&d, base)?;
            let ball = universal_cover_ball(&d, y, *radius).map_err(fail)?;
            let boundary = (0..ball.nodes().len()).filter(|&i| ball.is_boundary(i)).count();
            let text = lines(&[
                ("base", d.name(y).to_string()),
                ("radius", ball.radius().to_string()),
                ("vertices", ball.nodes().len().to_string()),
                ("edges", ball.edges().len().to_string()),
                ("boundary", boundary.to_string()),
                ("decided", ball.decided().to_string()),
            ]);
            let nodes: Vec<Value> = (0..ball.nodes().len())
                .map(|i| {
                    let n = &ball.nodes()[i];
                    json!({
                        "vertex": d.name(n.vertex),
                        "element": ball.element_string(&n.element),
                        "dist": n.dist,
                        "boundary": ball.is_boundary(i),
                    })
                })
                .collect();
            let edges: Vec<Value> = ball
                .edges()
                .iter()
                .map(|e| json!({"src": e.src, "rng": e.rng, "edge": d.core_edges()[e.edge].name}))
                .collect();
            let json = json!({
                "base": d.name(y),
                "radius": ball.radius(),
                "decided": ball.decided(),
                "nodes": nodes,
                "edges": edges,
            });
            Ok(Report::new(0, text, json))
        }
        Command::Ann { file, length, radius, base } => {
            let d = format::load_rep(file)?;
            let y = core_vertex(&d, base)?;
            let ball = universal_cover_ball(&d, y, *radius).map_err(fail)?;
            let ann = annihilator_ball(&d, &ball, *length, field).map_err(fail)?;
            let independent = base_point_independent(&d, &ball, *length, field).map_err(fail)?;
            let sums = ann.f_class_sums_vanish(&d, &ball).map_err(fail)?;
            let g = d.base();
            let basis: Vec<String> = ann
                .basis
                .iter()
                .map(|v| {
                    let terms: Vec<String> = v
                        .iter()
                        .zip(&ann.walks)
                        .filter(|(c, _)| !c.is_zero())
                        .map(|(c, w)| format!("{c}*({})", w.display(g)))
                        .collect();
                    terms.join(" + ")
                })
                .collect();
            let mut text = lines(&[
                ("length", length.to_string()),
                ("radius", ball.radius().to_string()),
                ("loops", ann.walks.len().to_string()),
                ("kernel dimension", basis.len().to_string()),
                ("base-point independent", independent.to_string()),
                ("f-class sums vanish", sums.to_string()),
            ]);
            for b in &basis {
                text += &format!("  {b}\n");
            }
            let json = json!({
                "length": length,
                "radius": ball.radius(),
                "loops": ann.walks.iter().map(|w| w.display(g).to_string()).collect::<Vec<_>>(),
                "basis": basis,
                "base_point_independent": independent,
                "f_class_sums_vanish": sums,
            });
            Ok(Report::new(i32::from(!(independent && sums)), text, json))
        }
        Command::SameComponent { a, b } => {
            let (da, db) = (format::load_rep(a)?, format::load_rep(b)?);
            let same = da.same_component(&db).map_err(|_| fail("the two graphs have different bases"))?;
            Ok(Report::new(
                i32::from(!same),
                lines(&[("same component", same.to_string())]),
                json!({"same_component": same}),
            ))
        }
        Command::Dot { file, radius, base } => {
            let text = match format::read_document(file)? {
                Document::KGraph(raw) => {
                    dot::kgraph_dot(&validate_kgraph(&raw).map_err(|e| fail(format!("not a k-graph: {e}")))?)
                }
                Document::RepGraph { base: b, rep } => {
                    let d = format::build_rep(&b, &rep, file)?;
                    match radius {
                        None => dot::rep_dot(&d),
                        Some(r) => {
                            let ball = universal_cover_ball(&d, core_vertex(&d, base)?, *r).map_err(fail)?;
                            dot::ball_dot(&d, &ball)
                        }
                    }
                }
            };
            Ok(Report::new(0, text.clone(), json!({"dot": text})))
        }
    }
}

fn witness_pair(d: &RepKGraph) -> Option<(String, String)> {
    submodule_witness(d).map(|(u, v)| (d.name(u).to_string(), d.name(v).to_string()))
}

fn validate(file: &Path) -> Result<Report, Failure> {
    let doc = format::read_document(file)?;
    let (kind, violations, summary) = match &doc {
        Document::KGraph(raw) => match validate_kgraph(raw) {
            Ok(g) => (
                "kgraph",
                Vec::new(),
                vec![
                    ("k", g.k().to_string()),
                    ("vertices", g.vertex_count().to_string()),
                    ("edges", g.edge_count().to_string()),
                    ("squares", g.squares().len().to_string()),
                ],
            ),
            Err(r) => ("kgraph", r.0.iter().map(ToString::to_string).collect(), Vec::new()),
        },
        Document::RepGraph { base, rep } => {
            let (raw_base, _) = format::resolve_base(base, file)?;
            format::check_labels(rep, &raw_base).map_err(|source| LoadError::Schema { path: file.into(), source })?;
            match validate_kgraph(&raw_base) {
                Err(r) => ("repgraph", r.0.iter().map(|v| format!("base: {v}")).collect(), Vec::new()),
                Ok(g) => match validate_rep(std::sync::Arc::new(g), rep) {
                    Ok(d) => (
                        "repgraph",
                        Vec::new(),
                        vec![
                            ("core vertices", d.core_len().to_string()),
                            ("core edges", d.core_edges().len().to_string()),
                        ],
                    ),
                    Err(r) => ("repgraph", r.0.iter().map(ToString::to_string).collect(), Vec::new()),
                },
            }
        }
    };
    let ok = violations.is_empty();
    let mut text = lines(&[("valid", ok.to_string()), ("kind", kind.to_string())]);
    text += &summary.iter().map(|(k, v)| format!("{k}: {v}\n")).collect::<String>();
    for v in &violations {
        text += &format!("violation: {v}\n");
    }
    let summary_json: serde_json::Map<String, Value> =
        summary.iter().map(|(k, v)| (k.replace(' ', "_"), json!(v.parse::<usize>().unwrap_or_default()))).collect();
    let json = json!({"valid": ok, "kind": kind, "summary": summary_json, "violations": violations});
    Ok(Report::new(i32::from(!ok), text, json))
}

fn read_partition(d: &RepKGraph, path: &Path) -> Result<VertexPartition, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(format!("cannot read `{}`: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| fail(format!("`{}`: invalid JSON: {e}", path.display())))?;
    let located = |pointer: String, message: &str| Failure {
        message: format!("`{}`: {message} at `{pointer}`", path.display()),
        pointer: Some(pointer),
    };
    let blocks = v.as_array().ok_or_else(|| located(String::new(), "expected an array of blocks"))?;
    let mut out = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let members = b.as_array().ok_or_else(|| located(format!("/{i}"), "expected an array of core vertex ids"))?;
        let mut block = Vec::new();
        for (j, m) in members.iter().enumerate() {
            let id = m
                .as_str()
                .and_then(|s| d.core_id(s))
                .ok_or_else(|| located(format!("/{i}/{j}"), "unknown core vertex"))?;
            block.push(id);
        }
        out.push(block);
    }
    VertexPartition::new(d.core_len(), out).map_err(fail)
}

fn quotient(file: &Path, by: &str) -> Result<Report, Failure> {
    let d = format::load_rep(file)?;
    let p = if by == "sim" { d.sim_relation() } else { read_partition(&d, Path::new(by))? };
    let blocks: Vec<Vec<String>> =
        p.blocks().iter().map(|b| b.iter().map(|&c| d.name(c).to_string()).collect()).collect();
    match d.quotient(&p) {
        Ok(q) => {
            let doc = format::rep_document(&q);
            let json =
                json!({"core_vertices": q.core_len(), "blocks": blocks, "document": format::document_value(&doc)});
            Ok(Report::new(0, format::emit_document(&doc), json))
        }
        Err(e) => Ok(Report::new(
            1,
            lines(&[("admissible", "false".into()), ("witness", e.to_string())]),
            json!({"admissible": false, "witness": e.to_string()}),
        )),
    }
}
