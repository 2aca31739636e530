//! `topos4` command-line front end.
//!
//! Every command prints one JSON line (a run report) unless a DOT graph or
//! plain text is requested. Exit codes: 0 pass or value, 1 property refuted,
//! 2 input error, 3 resource cap, 4 verification failure.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use topos4::algebra::{validates, AlgebraError, Validity, DEFAULT_LETTER_CAP};
use topos4::constructions::cantor::CantorLabeling;
use topos4::constructions::interval::interval_construction_with;
use topos4::constructions::qstage::q_stage_with;
use topos4::constructions::{
    cantor_to_lalpha, cgfp_select, tcomb_labeling, verify_comb_pmorphism, verify_interval_lemmas, ConstructionError,
    EnumerationFamily,
};
use topos4::formula::godel_translate;
use topos4::frames::{make_cluster, make_fork, truncated_tree, FiniteFrame, FrameError, FrameJson, FrameMap, MorphismCheck, S4Check};
use topos4::genspace::{
    check_interior_map, glue, GeneralStructure, GluingSpec, GluingSpecJson, InteriorCheck, SpaceError, StructureJson,
};
use topos4::{parse, Formula, Rational, Subset};

#[derive(Parser)]
#[command(name = "topos4", version, about = "Finite topological semantics for S4")]
struct Cli {
    /// Report format: JSON report, DOT graph, or plain text.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Directory for emitted artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive validity of a formula on a general frame or space.
    Validity {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
        /// Letter cap (default: TOPOS4_CAP, else 4).
        #[arg(long)]
        max_letters: Option<usize>,
    },
    /// Build a named structure and run its verifier.
    Construct {
        #[command(subcommand)]
        kind: Construct,
    },
    /// Glue parts along a shared structure.
    Glue {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Select witnesses for a refutation.
    Cgfp {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
        /// Valuation as JSON `{"p": [worlds]}`; found by search when absent.
        #[arg(long)]
        valuation: Option<String>,
        #[arg(long)]
        world: Option<usize>,
        /// Worlds kept from the start.
        #[arg(long, value_delimiter = ',')]
        seed_worlds: Vec<usize>,
    },
    /// Goedel translation of an intuitionistic formula.
    Translate { formula: String },
    /// General frame <-> general space.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Property checkers.
    Check {
        #[command(subcommand)]
        kind: Check,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Frame,
    Space,
}

#[derive(Subcommand)]
enum Construct {
    Tcomb {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Enumerations as JSON `[[worlds], ...]`, one per world.
        #[arg(long)]
        theta: Option<String>,
    },
    Interval {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        removal_depth: Option<usize>,
    },
    CantorLalpha {
        #[arg(long)]
        b: usize,
        #[arg(long)]
        depth: usize,
    },
    Fork {
        #[arg(long)]
        alpha: usize,
    },
    Cluster {
        #[arg(long)]
        size: usize,
    },
    Tree {
        #[arg(long, default_value_t = 2)]
        branching: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        limits: bool,
    },
    Qstage {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        stages: usize,
    },
}

#[derive(Subcommand)]
enum Check {
    S4 {
        #[arg(long)]
        frame: PathBuf,
    },
    Pmorphism(MapArgs),
    Interior(MapArgs),
    Descriptive {
        #[arg(long)]
        structure: PathBuf,
    },
    Connected {
        #[arg(long)]
        structure: PathBuf,
    },
    WellConnected {
        #[arg(long)]
        structure: PathBuf,
    },
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// Image of each source point, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    map: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Verdict {
    Pass,
    Fail,
    Valid,
    Refuted,
    Value,
}

struct Outcome {
    verdict: Verdict,
    counterexample: Option<Value>,
    details: Value,
    /// DOT graph or text rendering, when the command has one.
    graph: Option<String>,
    text: Option<String>,
}

impl Outcome {
    fn new(verdict: Verdict, details: Value) -> Self {
        Outcome { verdict, counterexample: None, details, graph: None, text: None }
    }
    fn graph(mut self, dot: String) -> Self {
        self.graph = Some(dot);
        self
    }
    fn witness(mut self, w: Value) -> Self {
        self.counterexample = Some(w);
        self
    }
}

enum Failure {
    Input(anyhow::Error),
    Cap(anyhow::Error),
    Verification { message: String, witness: Value },
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        if is_cap(&e) {
            Failure::Cap(e)
        } else {
            Failure::Input(e)
        }
    }
}

fn is_cap(e: &anyhow::Error) -> bool {
    let algebra = |a: &AlgebraError| matches!(a, AlgebraError::CapExceeded { .. } | AlgebraError::TooManyAtoms(_) | AlgebraError::TooLarge(_));
    let frame = |f: &FrameError| matches!(f, FrameError::TooLarge(_));
    let space = |s: &SpaceError| match s {
        SpaceError::Algebra(a) => algebra(a),
        SpaceError::Frame(f) => frame(f),
        _ => false,
    };
    e.chain().any(|c| {
        c.downcast_ref::<AlgebraError>().is_some_and(algebra)
            || c.downcast_ref::<FrameError>().is_some_and(frame)
            || c.downcast_ref::<SpaceError>().is_some_and(space)
            || c.downcast_ref::<ConstructionError>().is_some_and(|k| match k {
                ConstructionError::Algebra(a) => algebra(a),
                ConstructionError::Frame(f) => frame(f),
                ConstructionError::Space(s) => space(s),
                _ => false,
            })
    })
}

/// Hashes everything a run depends on.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> anyhow::Result<String> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn structure(&mut self, path: &Path) -> anyhow::Result<GeneralStructure> {
        let j: StructureJson = serde_json::from_str(&self.read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        Ok(GeneralStructure::from_json(&j)?)
    }

    fn frame(&mut self, path: &Path) -> anyhow::Result<FiniteFrame> {
        Ok(self.structure(path)?.frame())
    }
}

fn cap(flag: Option<usize>) -> anyhow::Result<usize> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match std::env::var("TOPOS4_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!("TOPOS4_CAP must be a number, got {v:?}")),
        Err(_) => Ok(DEFAULT_LETTER_CAP),
    }
}

fn formula(text: &str) -> anyhow::Result<Formula> {
    parse(text).map_err(|e| anyhow!("{e}"))
}

fn worlds(s: Subset) -> Vec<usize> {
    s.iter().collect()
}

fn valuation_json(v: &topos4::algebra::Valuation) -> Value {
    v.assignment.iter().map(|(p, &a)| (p.clone(), json!(worlds(a)))).collect::<serde_json::Map<_, _>>().into()
}

fn parse_valuation(text: &str) -> anyhow::Result<topos4::algebra::Valuation> {
    let raw: std::collections::BTreeMap<String, Vec<usize>> = serde_json::from_str(text).context("valuation JSON")?;
    Ok(raw.into_iter().fold(topos4::algebra::Valuation::new(), |v, (p, ws)| v.with(&p, Subset::from_iter(ws))))
}

fn write_artifact(out: &Option<PathBuf>, name: &str, body: &str) -> anyhow::Result<Option<String>> {
    let Some(dir) = out else { return Ok(None) };
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(Some(path.display().to_string()))
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let out = &cli.out;
    match &cli.command {
        Command::Validity { structure, formula: text, max_letters } => {
            let s = inputs.structure(structure)?;
            let phi = formula(text)?;
            let cap = cap(*max_letters)?;
            match validates(s.field(), &phi, cap).map_err(anyhow::Error::from)? {
                Validity::Valid => Ok(Outcome::new(Verdict::Valid, json!({ "formula": phi.to_string(), "cap": cap }))),
                Validity::Refuted { valuation, world } => Ok(Outcome::new(Verdict::Refuted, json!({ "formula": phi.to_string(), "cap": cap }))
                    .witness(json!({ "valuation": valuation_json(&valuation), "world": world, "label": s.frame().label(world) }))),
            }
        }
        Command::Construct { kind } => construct(kind, inputs, out),
        Command::Glue { spec } => {
            let j: GluingSpecJson = serde_json::from_str(&inputs.read(spec)?).context("gluing spec JSON")?;
            let spec = GluingSpec::from_json(&j).map_err(anyhow::Error::from)?;
            let g = glue(&spec).map_err(anyhow::Error::from)?;
            let check = check_interior_map(&g.rho, &g.sum, &g.structure);
            if check != InteriorCheck::Pass {
                return Err(Failure::Verification { message: "quotient map is not interior".into(), witness: json!(check) });
            }
            let artifact = serde_json::to_string(&g.structure.to_json()).map_err(anyhow::Error::from)?;
            let dot = g.structure.to_dot("glued");
            let files = [write_artifact(out, "glued.json", &artifact)?, write_artifact(out, "glued.dot", &dot)?];
            Ok(Outcome::new(
                Verdict::Pass,
                json!({ "points": g.structure.size(), "rho": g.rho, "interior": check, "structure": g.structure.to_json(), "files": files }),
            )
            .graph(dot))
        }
        Command::Cgfp { structure, formula: text, valuation, world, seed_worlds } => {
            let s = inputs.structure(structure)?;
            let phi = formula(text)?;
            let (val, w) = match valuation {
                Some(v) => {
                    let val = parse_valuation(v)?;
                    let w = world.ok_or_else(|| anyhow!("--world is required with --valuation"))?;
                    (val, w)
                }
                None => match validates(s.field(), &phi, cap(None)?).map_err(anyhow::Error::from)? {
                    Validity::Refuted { valuation, world: found } => (valuation, world.unwrap_or(found)),
                    Validity::Valid => {
                        return Ok(Outcome::new(Verdict::Valid, json!({ "formula": phi.to_string(), "reason": "nothing to refute" })))
                    }
                },
            };
            let seed = Subset::from_iter(seed_worlds.iter().copied());
            let r = cgfp_select(&s, &phi, &val, w, seed).map_err(anyhow::Error::from)?;
            let f = s.frame();
            let details = json!({
                "world": w,
                "valuation": valuation_json(&val),
                "kept": worlds(r.kept_worlds),
                "kept_labels": r.kept_worlds.iter().map(|v| f.label(v)).collect::<Vec<_>>(),
                "witnesses": r.witness_log,
                "enlarged": r.enlarged,
                "atoms": r.restricted_field().atoms().len(),
                "restricted": r.restricted.to_json(),
            });
            if let Some((psi, v)) = &r.truth_failure {
                return Err(Failure::Verification { message: "truth lemma fails".into(), witness: json!({ "subformula": psi, "world": v }) });
            }
            if !r.refutes {
                return Err(Failure::Verification { message: "restriction no longer refutes".into(), witness: details });
            }
            Ok(Outcome::new(Verdict::Pass, details))
        }
        Command::Translate { formula: text } => {
            let phi = formula(text)?;
            let t = godel_translate(&phi).map_err(|e| anyhow!("{e}"))?;
            let mut o = Outcome::new(Verdict::Value, json!({ "input": phi.to_string(), "translation": t.to_string() }));
            o.text = Some(t.to_string());
            Ok(o)
        }
        Command::Convert { input, to } => {
            let s = inputs.structure(input)?;
            let converted = match to {
                Target::Frame => s.to_frame(),
                Target::Space => s.to_space(),
            }
            .map_err(anyhow::Error::from)?;
            let artifact = converted.to_json();
            write_artifact(out, "converted.json", &serde_json::to_string(&artifact).map_err(anyhow::Error::from)?)?;
            Ok(Outcome::new(Verdict::Value, json!({ "structure": artifact })).graph(converted.to_dot("converted")))
        }
        Command::Check { kind } => check(kind, inputs),
    }
}

fn construct(kind: &Construct, inputs: &mut Inputs, out: &Option<PathBuf>) -> Result<Outcome, Failure> {
    let frame_outcome = |f: FiniteFrame, name: &str| -> Result<Outcome, Failure> {
        let dot = f.to_dot(name);
        let j = f.to_json();
        write_artifact(out, &format!("{name}.json"), &serde_json::to_string(&j).map_err(anyhow::Error::from)?)?;
        write_artifact(out, &format!("{name}.dot"), &dot)?;
        Ok(Outcome::new(Verdict::Value, json!({ "frame": j, "s4": f.is_s4() })).graph(dot))
    };
    match kind {
        Construct::Tcomb { frame, depth, theta } => {
            let f = inputs.frame(frame)?;
            let theta = match theta {
                Some(t) => EnumerationFamily { sequences: serde_json::from_str(t).context("theta JSON")? },
                None => EnumerationFamily::cyclic(&f),
            };
            let m = tcomb_labeling(&f, &theta, *depth).map_err(anyhow::Error::from)?;
            let report = verify_comb_pmorphism(&m, &f);
            let artifact = m.to_json();
            write_artifact(out, "tcomb.json", &serde_json::to_string(&artifact).map_err(anyhow::Error::from)?)?;
            verified(report.forth_violation.is_none() && report.back_violation.is_none(), json!({ "labeling": artifact, "report": report }))
                .map(|o| o.graph(m.to_dot()))
        }
        Construct::Interval { depth, removal_depth } => {
            if *depth > 6 {
                return Err(Failure::Cap(anyhow!("interval depth {depth} above the limit of 6")));
            }
            let c = interval_construction_with::<Rational>(*depth, removal_depth.unwrap_or((*depth).min(2)).min(4));
            let report = verify_interval_lemmas(&c);
            let artifact = c.to_json();
            write_artifact(out, "interval.json", &serde_json::to_string(&artifact).map_err(anyhow::Error::from)?)?;
            verified(report.pass, json!({ "construction": artifact, "report": report }))
        }
        Construct::CantorLalpha { b, depth } => {
            if *depth > 12 || b.pow(*depth as u32) > 1 << 16 {
                return Err(Failure::Cap(anyhow!("target tree too large")));
            }
            let c: CantorLabeling = cantor_to_lalpha(*b, *depth).map_err(anyhow::Error::from)?;
            let report = c.verify();
            let artifact = c.to_json();
            write_artifact(out, "cantor.json", &serde_json::to_string(&artifact).map_err(anyhow::Error::from)?)?;
            verified(report.pass, json!({ "labeling": artifact, "report": report }))
        }
        Construct::Fork { alpha } => frame_outcome(make_fork(*alpha).map_err(anyhow::Error::from)?, "fork"),
        Construct::Cluster { size } => frame_outcome(make_cluster(*size).map_err(anyhow::Error::from)?, "cluster"),
        Construct::Tree { branching, depth, limits } => {
            let t = truncated_tree(*branching, *depth, *limits).map_err(anyhow::Error::from)?;
            frame_outcome(t.to_frame().map_err(anyhow::Error::from)?, "tree")
        }
        Construct::Qstage { frame, stages } => {
            let f = inputs.frame(frame)?;
            let s = q_stage_with::<Rational>(&f, &EnumerationFamily::cyclic(&f), *stages).map_err(anyhow::Error::from)?;
            let report = s.report();
            let listing: Vec<Value> = s.listing().into_iter().map(|(x, l)| json!([x, l])).collect();
            write_artifact(out, "qstage.json", &serde_json::to_string(&listing).map_err(anyhow::Error::from)?)?;
            verified(report.pass, json!({ "points": listing, "report": report }))
        }
    }
}

fn verified(pass: bool, details: Value) -> Result<Outcome, Failure> {
    if pass {
        Ok(Outcome::new(Verdict::Pass, details))
    } else {
        Err(Failure::Verification { message: "construction failed its verifier".into(), witness: details["report"].clone() })
    }
}

fn check(kind: &Check, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let verdict = |b: bool| if b { Verdict::Pass } else { Verdict::Fail };
    match kind {
        Check::S4 { frame } => {
            let j: StructureJson = serde_json::from_str(&inputs.read(frame)?).context("structure JSON")?;
            let f = match j {
                StructureJson::Frame { worlds, relation, labels, .. } => {
                    FiniteFrame::from_json(&FrameJson { worlds, relation, labels }).map_err(anyhow::Error::from)?
                }
                space => GeneralStructure::from_json(&space).map_err(anyhow::Error::from)?.frame(),
            };
            Ok(match f.check_s4() {
                S4Check::Pass => Outcome::new(Verdict::Pass, json!({ "worlds": f.size() })),
                S4Check::Fail { missing } => Outcome::new(Verdict::Fail, json!({ "worlds": f.size() })).witness(json!({ "missing": missing })),
            })
        }
        Check::Pmorphism(m) => {
            let (s, t) = (inputs.frame(&m.source)?, inputs.frame(&m.target)?);
            let fm = FrameMap::new(s, t, m.map.clone()).map_err(anyhow::Error::from)?;
            let r = fm.check_p_morphism();
            let o = Outcome::new(verdict(r == MorphismCheck::Pass), json!({ "onto": fm.is_onto() }));
            Ok(if r == MorphismCheck::Pass { o } else { o.witness(json!(r)) })
        }
        Check::Interior(m) => {
            let (s, t) = (inputs.structure(&m.source)?, inputs.structure(&m.target)?);
            let r = check_interior_map(&m.map, &s, &t);
            if let InteriorCheck::BadMap { reason } = &r {
                return Err(Failure::Input(anyhow!("{reason}")));
            }
            let o = Outcome::new(verdict(r == InteriorCheck::Pass), json!({}));
            Ok(if r == InteriorCheck::Pass { o } else { o.witness(json!(r)) })
        }
        Check::Descriptive { structure } => {
            let r = inputs.structure(structure)?.check_descriptive();
            Ok(Outcome::new(verdict(r.is_descriptive()), json!(r)))
        }
        Check::Connected { structure } => {
            let s = inputs.structure(structure)?;
            let c = s.field().is_connected();
            let clopen = s.field().clopens().into_iter().find(|a| !a.is_empty() && *a != s.field().carrier());
            let o = Outcome::new(verdict(c), json!({ "path_connected": s.frame().is_path_connected() }));
            Ok(match clopen {
                Some(a) => o.witness(json!({ "clopen": worlds(a) })),
                None => o,
            })
        }
        Check::WellConnected { structure } => {
            let s = inputs.structure(structure)?;
            let wc = s.field().is_well_connected();
            Ok(Outcome::new(verdict(wc), json!({ "rooted": s.frame().is_rooted(), "connected": s.field().is_connected() })))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validity { .. } => "validity",
        Command::Construct { .. } => "construct",
        Command::Glue { .. } => "glue",
        Command::Cgfp { .. } => "cgfp",
        Command::Translate { .. } => "translate",
        Command::Convert { .. } => "convert",
        Command::Check { .. } => "check",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut inputs = Inputs { hasher: Sha256::new() };
    for a in std::env::args().skip(1) {
        inputs.hasher.update(a.as_bytes());
        inputs.hasher.update([0]);
    }
    let start = Instant::now();
    let result = run(&cli, &mut inputs);
    let timing_ms = start.elapsed().as_millis() as u64;
    let digest = hex::encode(inputs.hasher.finalize());
    let name = command_name(&cli.command);
    let report = |verdict: Value, counterexample: Option<Value>, details: Value| {
        json!({ "command": name, "inputs": digest, "verdict": verdict, "counterexample": counterexample, "timing_ms": timing_ms, "details": details })
    };
    let (line, code) = match result {
        Ok(o) => {
            let code = match o.verdict {
                Verdict::Fail | Verdict::Refuted => 1,
                _ => 0,
            };
            match (cli.format, &o.graph, &o.text) {
                (Format::Dot, Some(g), _) => {
                    emit(g);
                    return ExitCode::from(code);
                }
                (Format::Text, _, Some(t)) => {
                    emit(&format!("{t}\n"));
                    return ExitCode::from(code);
                }
                (Format::Json, _, _) => {}
                _ => {
                    eprintln!("error: no {} rendering for this command", if cli.format == Format::Dot { "DOT" } else { "text" });
                    return ExitCode::from(2);
                }
            }
            (report(json!(o.verdict), o.counterexample, o.details), code)
        }
        Err(Failure::Input(e)) => (report(json!("error"), None, json!({ "error": format!("{e:#}") })), 2),
        Err(Failure::Cap(e)) => (report(json!("cap_exceeded"), None, json!({ "error": format!("{e:#}") })), 3),
        Err(Failure::Verification { message, witness }) => (report(json!("verification_failed"), Some(witness), json!({ "error": message })), 4),
    };
    emit(&format!("{line}\n"));
    ExitCode::from(code)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}
