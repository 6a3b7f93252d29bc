//! `balmaps`: command-line front end for balanced maps.
//!
//! Every subcommand prints one JSON document on stdout. Domain errors print a
//! JSON object on stderr and exit with status 1; usage errors exit with 2.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use balanced_maps::balance::{is_globally_balanced, is_locally_balanced, is_locally_balanced_thurston, OrientedMap};
use balanced_maps::cubic::{
    classify_real, trace_curve, trace_pullback, Branch, CubicModel, CubicParams, Interval, PostCriticalCurve,
    RealConfig, DEFAULT_GRID,
};
use balanced_maps::enrich::{for_each_enrichment, insert_dots, perfect_matching, pipeline, DotGraph, PipelineReport};
use balanced_maps::export::{model_to_svg, to_dot, to_svg_circular, traced_to_svg};
use balanced_maps::ops::{
    applicable_operations, balanced_cut, balanced_move_at, edge_contract, face_collapse, face_insert,
    find_simple_pieces, murasugi_sum, tangle_cut, vertex_expand, InsertSite, Rectangle,
};
use balanced_maps::perm;
use balanced_maps::real_enum::{catalan_rho, noncrossing_matchings, nongeneric_reachability, real_gb_graph, verify_real_theorem};
use balanced_maps::surface_map::{Map, MapJson};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "balmaps", version, about = "Balanced maps: balance checks, enrichment, monodromy, operations and the cubic family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a file holds a valid rotation system and report its counts.
    Validate { map: PathBuf },
    /// Balance conditions.
    Balance {
        #[command(subcommand)]
        action: BalanceCommand,
    },
    /// Dots, matching and the enrichment used by the labeling.
    Enrich {
        map: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        /// List every enrichment compatible with the dot counts, up to --limit.
        #[arg(long)]
        all_matchings: bool,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Admissible labeling of the enriched map, with its passport.
    Label {
        map: PathBuf,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Monodromy permutations in cycle notation, with the checks they pass.
    Monodromy {
        map: PathBuf,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Operations between balanced graphs.
    Op {
        #[command(subcommand)]
        op: OpCommand,
    },
    /// Enumerate the real generic balanced graphs of a degree.
    EnumerateReal {
        #[arg(long)]
        degree: usize,
        /// Check local balance of every graph in both colorings.
        #[arg(long)]
        verify: bool,
        /// Also check every edge-contraction descendant.
        #[arg(long)]
        descendants: bool,
        /// Write one JSON and one SVG file per graph here.
        #[arg(long)]
        emit_dir: Option<PathBuf>,
    },
    /// Number of real generic balanced graphs of a degree.
    Catalan {
        #[arg(long)]
        degree: u32,
    },
    /// The cubic family.
    Cubic {
        #[command(subcommand)]
        action: CubicCommand,
    },
    /// Render a map as DOT, SVG or normalized JSON.
    Export {
        map: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BalanceCommand {
    /// Global and local balance for the map's coloring.
    Check {
        map: PathBuf,
        /// Use the planar positive-cycle criterion instead of multicycles.
        #[arg(long)]
        thurston: bool,
        /// Include the violating multicycle, if any.
        #[arg(long)]
        witness: bool,
    },
}

#[derive(Subcommand)]
enum OpCommand {
    /// Applicable operations.
    List { map: PathBuf },
    /// Contract the saddle-connection of a dart.
    Contract {
        map: PathBuf,
        #[arg(long)]
        dart: usize,
    },
    /// Split a corner; `--part` lists the darts going to the first new corner.
    Expand {
        map: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        part: Vec<usize>,
    },
    /// Collapse the simple piece with this index in `op pieces`.
    Collapse {
        map: PathBuf,
        #[arg(long)]
        piece: usize,
    },
    /// Simple pieces of the map.
    Pieces { map: PathBuf },
    /// Insert a simple piece on the edge of a dart or at a corner split `vertex,start,size`.
    Insert {
        map: PathBuf,
        #[arg(long, conflicts_with = "corner")]
        edge: Option<usize>,
        #[arg(long, value_delimiter = ',', num_args = 3)]
        corner: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1)]
        f: usize,
    },
    /// Balanced move along the saddle-connection of a dart.
    Move {
        map: PathBuf,
        #[arg(long)]
        dart: usize,
        #[arg(long)]
        mirror: bool,
    },
    /// Cut along a curve given by its crossing darts, left to right.
    Cut {
        map: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        curve: Vec<usize>,
        /// Tangle cut: one-face color surplus on each side.
        #[arg(long)]
        tangle: bool,
    },
    /// Murasugi sum of two maps along rectangles `e1,e2` of each.
    Sum {
        map: PathBuf,
        other: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 2, required = true)]
        rect1: Vec<usize>,
        #[arg(long, value_delimiter = ',', num_args = 2, required = true)]
        rect2: Vec<usize>,
    },
    /// Reach every balanced non-generic real graph from generic ones by contractions.
    Reachability {
        #[arg(long, value_enum, default_value_t = Source::Generic)]
        from: Source,
        #[arg(long)]
        degree: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Generic,
}

#[derive(Subcommand)]
enum CubicCommand {
    /// Combinatorial model of a real configuration.
    Classify {
        #[arg(long)]
        branch: Branch,
        #[arg(long, allow_hyphen_values = true)]
        interval: Interval,
    },
    /// Pull back the post-critical curve numerically.
    Trace {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        /// Imaginary part of c; non-zero values need `--method lift`.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        c_im: f64,
        #[arg(long)]
        branch: Branch,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Method::Grid)]
        method: Method,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Marching squares on the real line's preimage.
    Grid,
    /// Root tracking along a polygonal post-critical curve.
    Lift,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Svg,
    Json,
}

/// A failure reported as JSON on stderr.
struct Failure {
    code: u8,
    body: Value,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Failure { code: 2, body: json!({ "error": "Usage", "message": message.to_string() }) }
    }

    fn io(path: &Path, e: impl Display) -> Self {
        Failure { code: 1, body: json!({ "error": "Io", "message": format!("{}: {e}", path.display()) }) }
    }

    /// A domain error; `error` is the innermost variant name of its serialized form.
    fn domain<E: Serialize + Display>(e: E) -> Self {
        let detail = serde_json::to_value(&e).unwrap_or(Value::Null);
        let chain = variant_chain(&detail);
        let kind = chain.last().cloned().unwrap_or_else(|| "Error".into());
        Failure { code: 1, body: json!({ "error": kind, "chain": chain, "message": e.to_string(), "detail": detail }) }
    }
}

fn is_variant(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

fn variant_chain(v: &Value) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = v;
    loop {
        match cur {
            Value::String(s) if is_variant(s) && !s.contains(' ') => {
                out.push(s.clone());
                return out;
            }
            Value::Object(m) if m.len() == 1 => {
                let (k, inner) = m.iter().next().unwrap();
                if !is_variant(k) {
                    return out;
                }
                out.push(k.clone());
                cur = inner;
            }
            _ => return out,
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read_json(path: &Path) -> Result<MapJson, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 1,
        body: json!({ "error": "InvalidJson", "message": format!("{}: {e}", path.display()) }),
    })
}

fn load(path: &Path) -> Result<(OrientedMap, MapJson), Failure> {
    let j = read_json(path)?;
    let om = OrientedMap::from_json(&j).map_err(Failure::domain)?;
    Ok((om, j))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("serializable output")
}

fn with_type(om: &OrientedMap) -> Value {
    json!({ "type": is_globally_balanced(&om.map).ok().map(to_value), "map": to_value(om.to_json()) })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { map } => validate(&map),
        Command::Balance { action: BalanceCommand::Check { map, thurston, witness } } => balance_check(&map, thurston, witness),
        Command::Enrich { map, m, all_matchings, limit } => enrich_cmd(&map, m, all_matchings, limit),
        Command::Label { map, m } => label_cmd(&map, m),
        Command::Monodromy { map, m } => monodromy_cmd(&map, m),
        Command::Op { op } => op_cmd(op),
        Command::EnumerateReal { degree, verify, descendants, emit_dir } => enumerate_real(degree, verify, descendants, emit_dir),
        Command::Catalan { degree } => {
            if degree < 2 {
                return Err(Failure::usage("--degree must be at least 2"));
            }
            Ok(serde_json::from_str(&catalan_rho(degree).to_string()).expect("an integer is a JSON number"))
        }
        Command::Cubic { action } => cubic_cmd(action),
        Command::Export { map, format, out } => export_cmd(&map, format, out),
    }
}

fn validate(path: &Path) -> Outcome {
    let j = read_json(path)?;
    let map: Map = j.to_map().map_err(Failure::domain)?;
    let colorable = OrientedMap::from_json(&j).is_ok();
    Ok(json!({
        "valid": true,
        "vertices": map.vertex_count(),
        "edges": map.edge_count(),
        "faces": map.face_count(),
        "euler_characteristic": map.euler_characteristic(),
        "genus": map.genus(),
        "corners": map.corners().len(),
        "two_colorable": colorable,
    }))
}

fn balance_check(path: &Path, thurston: bool, witness: bool) -> Outcome {
    let (om, _) = load(path)?;
    let global = match is_globally_balanced(&om.map) {
        Ok(t) => t,
        Err(failure) => {
            return Ok(json!({ "globally_balanced": false, "failure": to_value(&failure), "reason": failure.to_string(), "balanced": false }))
        }
    };
    let verdict = if thurston { is_locally_balanced_thurston(&om) } else { is_locally_balanced(&om) }.map_err(Failure::domain)?;
    let mut out = json!({
        "globally_balanced": true,
        "type": to_value(global),
        "criterion": if thurston { "positive-cycles" } else { "multicycles" },
        "locally_balanced": verdict.balanced,
        "balanced": verdict.balanced,
    });
    if witness {
        out["witness"] = to_value(&verdict.witness);
    }
    Ok(out)
}

fn report(path: &Path, m: Option<usize>) -> Result<(OrientedMap, PipelineReport), Failure> {
    let (om, _) = load(path)?;
    let r = pipeline(&om, m).map_err(Failure::domain)?;
    Ok((om, r))
}

fn enrich_cmd(path: &Path, m: Option<usize>, all: bool, limit: usize) -> Outcome {
    let (om, _) = load(path)?;
    let dm = insert_dots(&om, m).map_err(Failure::domain)?;
    let dg = DotGraph::new(&dm);
    let matching = perfect_matching(&dg).map_err(Failure::domain)?;
    let r = pipeline(&om, Some(dm.m)).map_err(Failure::domain)?;
    let mut out = json!({
        "m": dm.m,
        "dots": dm.dots,
        "dots_a": r.dots_a,
        "dots_b": r.dots_b,
        "matching": matching.iter().map(|&(a, b)| json!([dg.a_dots[a], dg.b_dots[b]])).collect::<Vec<_>>(),
        "enrichment": to_value(&r.enrichment),
        "enrichments_tried": r.tried,
        "enriched": with_type(&r.enriched),
    });
    if all {
        let mut list = Vec::new();
        let mut truncated = false;
        for_each_enrichment(&dm, |e| {
            if list.len() == limit {
                truncated = true;
                return ControlFlow::Break(());
            }
            list.push(to_value(e));
            ControlFlow::Continue(())
        });
        out["all_enrichments"] = json!({ "count": list.len(), "truncated": truncated, "enrichments": list });
    }
    Ok(out)
}

fn label_cmd(path: &Path, m: Option<usize>) -> Outcome {
    let (_, r) = report(path, m)?;
    let mut j = r.labeled.om.to_json();
    j.labels = Some(r.labeled.labeling.labels.iter().map(|l| l.to_string()).collect());
    Ok(json!({
        "m": r.labeled.labeling.m,
        "labels": r.labeled.labeling.labels,
        "passport": to_value(&r.passport),
        "map": to_value(j),
    }))
}

fn monodromy_cmd(path: &Path, m: Option<usize>) -> Outcome {
    let (om, r) = report(path, m)?;
    let c = &r.constellation;
    Ok(json!({
        "degree": c.d,
        "permutations": c.cycle_notation(),
        "product": perm::cycle_notation(&c.product()),
        "product_is_identity": perm::is_identity(&c.product()),
        "transitive": perm::is_transitive(c.d, &c.perms),
        "passport": to_value(&r.passport),
        "passport_genus": r.passport.genus(),
        "surface_genus": om.map.genus(),
    }))
}

fn op_cmd(op: OpCommand) -> Outcome {
    match op {
        OpCommand::List { map } => {
            let (om, _) = load(&map)?;
            Ok(to_value(applicable_operations(&om)))
        }
        OpCommand::Pieces { map } => {
            let (om, _) = load(&map)?;
            Ok(to_value(find_simple_pieces(&om.map)))
        }
        OpCommand::Contract { map, dart } => {
            let (om, _) = load(&map)?;
            let c = edge_contract(&om, dart).map_err(Failure::domain)?;
            let mut out = with_type(&c.map);
            out["vertex"] = json!(c.vertex);
            out["part"] = json!(c.part);
            Ok(out)
        }
        OpCommand::Expand { map, vertex, part } => {
            let (om, _) = load(&map)?;
            let e = vertex_expand(&om, vertex, &part).map_err(Failure::domain)?;
            let mut out = with_type(&e.map);
            out["edge"] = json!(e.edge);
            Ok(out)
        }
        OpCommand::Collapse { map, piece } => {
            let (om, _) = load(&map)?;
            let pieces = find_simple_pieces(&om.map);
            let p = pieces.get(piece).ok_or_else(|| Failure::usage(format!("the map has {} simple pieces", pieces.len())))?;
            let c = face_collapse(&om, p).map_err(Failure::domain)?;
            let mut out = with_type(&c.map);
            out["site"] = to_value(&c.site);
            Ok(out)
        }
        OpCommand::Insert { map, edge, corner, f } => {
            let (om, _) = load(&map)?;
            let site = match (edge, corner) {
                (Some(dart), None) => InsertSite::Edge { dart },
                (None, Some(c)) => InsertSite::Corner { vertex: c[0], start: c[1], size: c[2] },
                _ => return Err(Failure::usage("give exactly one of --edge DART or --corner VERTEX,START,SIZE")),
            };
            let out = face_insert(&om, &site, f).map_err(Failure::domain)?;
            Ok(with_type(&out))
        }
        OpCommand::Move { map, dart, mirror } => {
            let (om, _) = load(&map)?;
            let out = balanced_move_at(&om, dart, mirror).map_err(Failure::domain)?;
            Ok(with_type(&out))
        }
        OpCommand::Cut { map, curve, tangle } => {
            let (om, _) = load(&map)?;
            let (l, r) = if tangle { tangle_cut(&om, &curve) } else { balanced_cut(&om, &curve) }.map_err(Failure::domain)?;
            Ok(json!({ "left": with_type(&l), "right": with_type(&r) }))
        }
        OpCommand::Sum { map, other, rect1, rect2 } => {
            let (a, _) = load(&map)?;
            let (b, _) = load(&other)?;
            let s = murasugi_sum(&a, Rectangle { e1: rect1[0], e2: rect1[1] }, &b, Rectangle { e1: rect2[0], e2: rect2[1] })
                .map_err(Failure::domain)?;
            let mut out = with_type(&s.map);
            out["seam"] = json!(s.seam);
            Ok(out)
        }
        OpCommand::Reachability { from: Source::Generic, degree } => {
            let r = nongeneric_reachability(degree).map_err(Failure::domain)?;
            Ok(to_value(r))
        }
    }
}

fn enumerate_real(degree: usize, verify: bool, descendants: bool, emit_dir: Option<PathBuf>) -> Outcome {
    if degree < 2 {
        return Err(Failure::usage("--degree must be at least 2"));
    }
    if let Some(dir) = &emit_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    let mut graphs = 0;
    let mut balanced = 0;
    let mut files = Vec::new();
    for (i, m) in noncrossing_matchings(degree).enumerate() {
        let om = real_gb_graph(&m);
        graphs += 1;
        if verify {
            let ok = [om.clone(), om.flipped()]
                .iter()
                .map(|x| is_locally_balanced(x).map(|v| v.balanced))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::domain)?;
            if ok.iter().all(|&b| b) {
                balanced += 1;
            }
        }
        if let Some(dir) = &emit_dir {
            let stem = format!("real_d{degree}_{i:04}");
            let jp = dir.join(format!("{stem}.json"));
            let sp = dir.join(format!("{stem}.svg"));
            write(&jp, &serde_json::to_string_pretty(&om.to_json()).expect("serializable map"))?;
            write(&sp, &to_svg_circular(&om, None))?;
            files.push(jp.display().to_string());
            files.push(sp.display().to_string());
        }
    }
    let mut out = json!({ "degree": degree, "graphs": graphs });
    if verify {
        out["locally_balanced"] = json!(balanced);
        out["summary"] = json!(format!("{balanced}/{graphs} locally balanced"));
    }
    if descendants {
        out["descendants"] = to_value(verify_real_theorem(degree, true).map_err(Failure::domain)?);
    }
    if emit_dir.is_some() {
        out["files"] = json!(files);
    }
    Ok(out)
}

fn model_json(model: &CubicModel) -> Value {
    let mut j = model.om.to_json();
    j.labels = Some(model.labels.iter().map(|l| l.to_string()).collect());
    json!({
        "edges": model.labeled_edges().iter().map(|(u, v)| json!([u.to_string(), v.to_string()])).collect::<Vec<_>>(),
        "map": to_value(j),
    })
}

fn cubic_cmd(action: CubicCommand) -> Outcome {
    match action {
        CubicCommand::Classify { branch, interval } => {
            let config = RealConfig { branch, interval };
            let mut out = model_json(&classify_real(config));
            out["config"] = json!(config.to_string());
            Ok(out)
        }
        CubicCommand::Trace { c, c_im, branch, grid, method, svg } => {
            let cc = Complex64::new(c, c_im);
            let params = CubicParams::from_c(branch, cc).map_err(Failure::domain)?;
            let real = c_im == 0.0;
            if method == Method::Grid && !real {
                return Err(Failure::usage("the grid tracer needs real c; use --method lift"));
            }
            let (model, picture) = match method {
                Method::Grid => {
                    let traced = trace_pullback(&params, grid).map_err(Failure::domain)?;
                    let critical = [("c".to_string(), c), ("0".to_string(), 0.0), ("1".to_string(), 1.0), ("inf".to_string(), params.z_inf().re)];
                    let picture = traced_to_svg(&traced, &critical);
                    (traced.model, picture)
                }
                Method::Lift => {
                    let curve = if real { PostCriticalCurve::real_line(&params) } else { polygon_through(&params) };
                    let model = trace_curve(&params, &curve).map_err(Failure::domain)?;
                    let picture = model_to_svg(&model);
                    (model, picture)
                }
            };
            let mut out = model_json(&model);
            out["a"] = json!([params.a.re, params.a.im]);
            out["z_inf"] = json!([params.z_inf().re, params.z_inf().im]);
            if let Some(interval) = real.then(|| Interval::of(c)).flatten() {
                let config = RealConfig { branch, interval };
                out["config"] = json!(config.to_string());
                out["agrees_with_model"] = json!(model.is_labeled_isomorphic(&classify_real(config)));
            }
            if let Some(path) = svg {
                write(&path, &picture)?;
                out["svg"] = json!(path.display().to_string());
            }
            Ok(out)
        }
    }
}

/// `∞ → 0 → 1 → v → ∞` with rays along the negative axis and away from 1;
/// a Jordan curve whenever the critical value `v` is not real.
fn polygon_through(params: &CubicParams) -> PostCriticalCurve {
    let v = params.critical_value();
    let out = v - 1.0;
    PostCriticalCurve {
        points: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), v],
        first_ray: Complex64::new(-1.0, 0.0),
        last_ray: out / out.norm(),
    }
}

fn export_cmd(path: &Path, format: Format, out: Option<PathBuf>) -> Outcome {
    let (om, j) = load(path)?;
    let labels = j.labels.as_deref();
    let text = match format {
        Format::Dot => to_dot(&om, labels),
        Format::Svg => to_svg_circular(&om, labels),
        Format::Json => {
            let mut k = om.to_json();
            k.labels = j.labels.clone();
            serde_json::to_string_pretty(&k).expect("serializable map") + "\n"
        }
    };
    match out {
        Some(p) => {
            write(&p, &text)?;
            Ok(json!({ "written": p.display().to_string(), "bytes": text.len() }))
        }
        None => Ok(Value::String(text)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            let text = match v {
                Value::String(text) => text,
                v => serde_json::to_string_pretty(&v).expect("serializable output") + "\n",
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", serde_json::to_string_pretty(&f.body).expect("serializable error"));
            ExitCode::from(f.code)
        }
    }
}
