//! `ncix`: validate, convert, and analyze network codes with link errors
//! and index codes with side-information errors.
//!
//! Exit codes: 0 success / positive verdict; 1 negative verdict or invalid
//! input code (witness printed); 2 parse or usage error; 3 resource limit
//! exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ncix_core::code::{IndexCode, IndexCodeRepr, NetworkCode};
use ncix_core::equiv;
use ncix_core::field::Symbol;
use ncix_core::icsie::{self, OptMode};
use ncix_core::model::{self, IndexInstance, NetworkInstance};
use ncix_core::ncle::{self, Quantification};
use ncix_core::{fixtures, format, Error, Limits};

const ENV_LIMIT: &str = "NCIX_ENUM_LIMIT";

#[derive(Parser)]
#[command(name = "ncix", version, about = "Error-resilient network/index code toolkit")]
struct Cli {
    /// Enumeration limit (default 2^20; env NCIX_ENUM_LIMIT overrides)
    #[arg(long, global = true)]
    limit: Option<u64>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Output::Human)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Reachable,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OptModeArg {
    Linear,
    Nonlinear,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Structural validation of a network instance file
    ValidateNc {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Structural validation of an index instance file
    ValidateIc {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Delivery and robustness validation of a network code
    ValidateNcle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        /// Base-input quantification for robustness checks
        #[arg(long, value_enum, default_value_t = ModeArg::Reachable)]
        mode: ModeArg,
    },
    /// Validity of an index code against its confusion set
    ValidateIcsie {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        code: PathBuf,
    },
    /// Instance and code conversions
    #[command(subcommand)]
    Convert(ConvertCommand),
    /// Structural and coding-theoretic analyses
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Bundled example files
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Subcommand)]
enum ConvertCommand {
    /// Network instance to index instance
    Nc2ic {
        #[arg(long)]
        instance: PathBuf,
        /// Write the converted instance here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Index instance to network instance (split, partition, rewrite)
    Ic2nc {
        #[arg(long)]
        graph: PathBuf,
        /// Write the network instance here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the rewritten index instance here
        #[arg(long)]
        modified: Option<PathBuf>,
    },
    /// Network code to index code on the converted instance
    CodeNc2ic {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Index code (length |E|) to network code
    CodeIc2nc {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        /// Fixed codeword, comma-separated symbols (default: image of 0)
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend a code on an index instance to its rewritten instance
    CodeExtend {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Restrict a network code back to a code on the original index instance
    CodeRestrict {
        #[arg(long)]
        graph: PathBuf,
        /// Network code on the instance `convert ic2nc` produces
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Search for a minimum message set certifying codelength savings
    Cycles {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Exact optimal codelength
    OptLength {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = OptModeArg::Both)]
        mode: OptModeArg,
    },
    /// Materialize the confusion set with per-receiver tags
    ConfusionSet {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Check that the all-links receiver would be redundant
    TAll {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Redundant-link analysis on a network instance
    Redundant {
        #[arg(long)]
        instance: PathBuf,
        /// Restrict to one edge (exit 1 if it is not redundant)
        #[arg(long)]
        edge: Option<String>,
    },
    /// Independent-component analysis on an index instance
    Independent {
        #[arg(long)]
        graph: PathBuf,
        /// Restrict to one edge-part message (exit 1 if not independent)
        #[arg(long)]
        message: Option<String>,
    },
    /// Enumerate the error-free instances a budgeted instance reduces to
    Conventional {
        #[arg(long)]
        instance: PathBuf,
        /// Also check each derived instance admits an error-free code
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Names and kinds of all bundled fixtures
    List,
    /// Write fixtures to disk
    Emit {
        /// Fixture name, or all of them when omitted
        name: Option<String>,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = resolve_limits(cli.limit);
    match run(&cli.command, &limits, cli.output) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse(_) | Error::UnknownId(_) => 2u8,
                Error::LimitExceeded { .. } => 3u8,
                _ => 1u8,
            })
        }
    }
}

fn resolve_limits(flag: Option<u64>) -> Limits {
    if let Some(l) = flag {
        return Limits::new(l);
    }
    if let Ok(text) = std::env::var(ENV_LIMIT) {
        if let Ok(l) = text.parse::<u64>() {
            return Limits::new(l);
        }
    }
    Limits::default()
}

struct Report {
    exit: u8,
    human: String,
    json: Value,
}

fn run(command: &Command, limits: &Limits, output: Output) -> Result<u8, Error> {
    let report = dispatch(command, limits)?;
    match output {
        Output::Human => print!("{}", report.human),
        Output::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report.json).expect("reports serialize")
        ),
    }
    Ok(report.exit)
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<NetworkInstance, Error> {
    format::parse_network_instance(&read_file(path)?)
}

fn load_index(path: &Path) -> Result<IndexInstance, Error> {
    format::parse_index_instance(&read_file(path)?)
}

fn load_network_code(path: &Path, q: usize) -> Result<NetworkCode, Error> {
    let (code, code_q) = format::parse_network_code(&read_file(path)?)?;
    if code_q as usize != q {
        return Err(Error::Parse(format!(
            "code is over a field of size {code_q}, instance uses {q}"
        )));
    }
    Ok(code)
}

fn load_index_code(path: &Path, q: usize) -> Result<IndexCode, Error> {
    let (code, code_q) = format::parse_index_code(&read_file(path)?)?;
    if code_q as usize != q {
        return Err(Error::Parse(format!(
            "code is over a field of size {code_q}, instance uses {q}"
        )));
    }
    Ok(code)
}

fn dispatch(command: &Command, limits: &Limits) -> Result<Report, Error> {
    match command {
        Command::ValidateNc { instance } => {
            let inst = load_network(instance)?;
            let v = model::validate_network_instance(&inst);
            Ok(verdict_report("network instance", &v))
        }
        Command::ValidateIc { graph } => {
            let inst = load_index(graph)?;
            let v = model::validate_index_instance(&inst);
            Ok(verdict_report("index instance", &v))
        }
        Command::ValidateNcle {
            instance,
            code,
            mode,
        } => {
            let inst = load_network(instance)?;
            let code = load_network_code(code, inst.field.q())?;
            let quant = match mode {
                ModeArg::Reachable => Quantification::Reachable,
                ModeArg::All => Quantification::All,
            };
            let report = ncle::validate_ncle(&inst, &code, quant, limits)?;
            Ok(ncle_report(&report))
        }
        Command::ValidateIcsie { graph, code } => {
            let inst = load_index(graph)?;
            let code = load_index_code(code, inst.field.q())?;
            let outcome = icsie::validate_icsie(&inst, &code, limits)?;
            Ok(icsie_report(&inst, &outcome))
        }
        Command::Convert(c) => dispatch_convert(c, limits),
        Command::Analyze(a) => dispatch_analyze(a, limits),
        Command::Fixtures(f) => dispatch_fixtures(f),
    }
}

fn verdict_report(what: &str, v: &model::Verdict) -> Report {
    let mut human = String::new();
    if v.valid() {
        human.push_str(&format!("{what}: valid\n"));
    } else {
        human.push_str(&format!("{what}: invalid\n"));
        for viol in &v.violations {
            human.push_str(&format!("  violation: {viol}\n"));
        }
    }
    for w in &v.warnings {
        human.push_str(&format!("  warning: {w}\n"));
    }
    Report {
        exit: u8::from(!v.valid()),
        human,
        json: json!({
            "valid": v.valid(),
            "violations": v.violations,
            "warnings": v.warnings,
        }),
    }
}

fn ncle_report(report: &ncle::RobustnessReport) -> Report {
    let mut human = String::new();
    human.push_str(&format!(
        "network code: {}\n",
        if report.valid() { "valid" } else { "invalid" }
    ));
    for f in &report.delivery_failures {
        human.push_str(&format!(
            "  delivery failure at terminal {}: sources {:?} decode to {:?}, expected {:?}\n",
            f.terminal, f.x_s, f.got, f.expected
        ));
    }
    for (id, o) in report.edge_outcomes.iter().chain(&report.terminal_outcomes) {
        if let Some(w) = &o.witness {
            human.push_str(&format!(
                "  {id}: output changes under corruption {:?} -> {:?} (outputs {:?} -> {:?})\n",
                w.base, w.corrupted, w.base_output, w.corrupted_output
            ));
        }
    }
    let function_json = |pairs: &[(String, ncle::ResistanceOutcome)]| -> Vec<Value> {
        pairs
            .iter()
            .map(|(id, o)| {
                json!({
                    "id": id,
                    "passes": o.passes,
                    "bases_checked": o.bases_checked,
                    "patterns_checked": o.patterns_checked,
                    "witness": o.witness.as_ref().map(|w| json!({
                        "base": w.base,
                        "corrupted": w.corrupted,
                        "base_output": w.base_output,
                        "corrupted_output": w.corrupted_output,
                    })),
                })
            })
            .collect()
    };
    Report {
        exit: u8::from(!report.valid()),
        human,
        json: json!({
            "valid": report.valid(),
            "delivery_failures": report.delivery_failures.iter().map(|f| json!({
                "terminal": f.terminal,
                "x_s": f.x_s,
                "expected": f.expected,
                "got": f.got,
            })).collect::<Vec<_>>(),
            "edges": function_json(&report.edge_outcomes),
            "terminals": function_json(&report.terminal_outcomes),
        }),
    }
}

fn icsie_report(inst: &IndexInstance, outcome: &icsie::IcsieOutcome) -> Report {
    match outcome {
        icsie::IcsieOutcome::Valid => Report {
            exit: 0,
            human: "index code: valid\n".into(),
            json: json!({"valid": true}),
        },
        icsie::IcsieOutcome::Invalid(w) => {
            let mut human = String::new();
            human.push_str("index code: invalid\n");
            human.push_str(&format!(
                "  witness difference z = {} (receivers: {})\n",
                vec_str(&w.z),
                w.receivers.join(", ")
            ));
            if let Some(x) = &w.x {
                human.push_str(&format!("  collides at message x = {}\n", vec_str(x)));
            }
            // re-verify the witness against the set definition
            let members = icsie::confusion_membership(inst, &w.z);
            human.push_str(&format!(
                "  witness re-verified in confusion set: {}\n",
                !members.is_empty()
            ));
            Report {
                exit: 1,
                human,
                json: json!({
                    "valid": false,
                    "witness": {
                        "z": w.z,
                        "x": w.x,
                        "receivers": w.receivers,
                        "reverified": !members.is_empty(),
                    },
                }),
            }
        }
    }
}

fn vec_str(v: &[Symbol]) -> String {
    format!(
        "({})",
        v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    )
}

fn dispatch_convert(command: &ConvertCommand, limits: &Limits) -> Result<Report, Error> {
    match command {
        ConvertCommand::Nc2ic { instance, out } => {
            let inst = load_network(instance)?;
            let (ic, report) = equiv::nc_to_ic_instance(&inst)?;
            let doc = format::index_instance_to_doc(&ic);
            if let Some(path) = out {
                write_file(path, &format::to_json_pretty(&doc))?;
            }
            let mut human = format!(
                "converted: {} messages, {} receivers, target codelength {}\n",
                ic.n(),
                ic.receivers.len(),
                report.target_codelength
            );
            for r in &ic.receivers {
                human.push_str(&format!(
                    "  {}: wants {} side {} delta {}\n",
                    r.id,
                    list_str(&r.wants),
                    list_str(&r.side_info),
                    r.delta
                ));
            }
            Ok(Report {
                exit: 0,
                human,
                json: json!({
                    "instance": serde_json::to_value(&doc).unwrap(),
                    "message_layout": report.message_layout,
                    "receiver_layout": report.receiver_layout,
                    "target_codelength": report.target_codelength,
                }),
            })
        }
        ConvertCommand::Ic2nc {
            graph,
            out,
            modified,
        } => {
            let inst = load_index(graph)?;
            let (net, report) = equiv::ic_to_nc_instance(&inst, limits)?;
            let doc = format::network_instance_to_doc(&net);
            if let Some(path) = out {
                write_file(path, &format::to_json_pretty(&doc))?;
            }
            if let Some(path) = modified {
                let mdoc = format::index_instance_to_doc(&report.modify.modified);
                write_file(path, &format::to_json_pretty(&mdoc))?;
            }
            let mut human = format!(
                "partition: edge part {} / source part {}\n",
                list_str(&report.partition.e_messages),
                list_str(&report.partition.s_messages)
            );
            for step in &report.modify.steps {
                human.push_str(&format!(
                    "  case {}: added {} (paired with {}), re-pointed {}\n",
                    step.case, step.fresh_message, step.paired_with, step.repointed
                ));
            }
            for (dup, orig) in &report.modify.duplicated_links {
                human.push_str(&format!("  duplicated link: {dup} -> {orig}\n"));
            }
            human.push_str(&format!(
                "network: {} nodes, {} edges, {} terminals\n",
                net.nodes.len(),
                net.edges.len(),
                net.terminals.len()
            ));
            for e in &net.edges {
                human.push_str(&format!(
                    "  edge {}: {} -> {} delta {}\n",
                    e.id, e.tail, e.head, e.delta
                ));
            }
            Ok(Report {
                exit: 0,
                human,
                json: json!({
                    "network": serde_json::to_value(&doc).unwrap(),
                    "modified": serde_json::to_value(&format::index_instance_to_doc(&report.modify.modified)).unwrap(),
                    "partition": {
                        "e_messages": report.partition.e_messages,
                        "s_messages": report.partition.s_messages,
                    },
                    "duplicated_links": report.modify.duplicated_links,
                    "added_messages": report.modify.added_messages,
                    "deleted_edges": report.modify.deleted_edges,
                    "added_edges": report.modify.added_edges,
                    "steps": serde_json::to_value(&report.modify.steps).unwrap(),
                }),
            })
        }
        ConvertCommand::CodeNc2ic {
            instance,
            code,
            out,
        } => {
            let inst = load_network(instance)?;
            let code = load_network_code(code, inst.field.q())?;
            let ic = equiv::nc_code_to_ic_code(&inst, &code, limits)?;
            let (converted, _) = equiv::nc_to_ic_instance(&inst)?;
            let doc = format::index_code_to_doc(&ic, inst.field.q() as u64);
            if let Some(path) = out {
                write_file(path, &format::to_json_pretty(&doc))?;
            }
            let human = describe_index_code(&ic, &converted.messages, Some(&inst));
            Ok(Report {
                exit: 0,
                human,
                json: json!({"code": serde_json::to_value(&doc).unwrap()}),
            })
        }
        ConvertCommand::CodeIc2nc {
            instance,
            code,
            sigma,
            out,
        } => {
            let inst = load_network(instance)?;
            let code = load_index_code(code, inst.field.q())?;
            let sigma = sigma.as_deref().map(parse_symbols).transpose()?;
            let net_code = equiv::ic_code_to_nc_code(&inst, &code, sigma, limits)?;
            let doc = format::network_code_to_doc(&net_code, inst.field.q() as u64);
            if let Some(path) = out {
                write_file(path, &format::to_json_pretty(&doc))?;
            }
            let human = describe_network_code(&inst, &net_code);
            Ok(Report {
                exit: 0,
                human,
                json: json!({"code": serde_json::to_value(&doc).unwrap()}),
            })
        }
        ConvertCommand::CodeExtend { graph, code, out } => {
            let inst = load_index(graph)?;
            let code = load_index_code(code, inst.field.q())?;
            let (_, report) = equiv::ic_to_nc_instance(&inst, limits)?;
            let extended = equiv::extend_ic_code(&inst, &code, &report.modify, limits)?;
            let doc = format::index_code_to_doc(&extended, inst.field.q() as u64);
            if let Some(path) = out {
                write_file(path, &format::to_json_pretty(&doc))?;
            }
            let human = describe_index_code(&extended, &report.modify.modified.messages, None);
            Ok(Report {
                exit: 0,
                human,
                json: json!({"code": serde_json::to_value(&doc).unwrap()}),
            })
        }
        ConvertCommand::CodeRestrict { graph, code, out } => {
            let inst = load_index(graph)?;
            let (net, report) = equiv::ic_to_nc_instance(&inst, limits)?;
            let net_code = load_network_code(code, inst.field.q())?;
            let restricted =
                equiv::restrict_nc_code_to_ic_code(&net, &net_code, &report, &inst, limits)?;
            let doc = format::index_code_to_doc(&restricted, inst.field.q() as u64);
            if let Some(path) = out {
                write_file(path, &format::to_json_pretty(&doc))?;
            }
            let human = describe_index_code(&restricted, &inst.messages, None);
            Ok(Report {
                exit: 0,
                human,
                json: json!({"code": serde_json::to_value(&doc).unwrap()}),
            })
        }
    }
}

fn parse_symbols(text: &str) -> Result<Vec<Symbol>, Error> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<Symbol>()
                .map_err(|e| Error::Parse(format!("bad symbol `{p}`: {e}")))
        })
        .collect()
}

fn list_str(items: &[String]) -> String {
    format!("{{{}}}", items.join(","))
}

/// Prints each component of a linear code as a sum of messages; for a
/// code converted from a network the edge's own message is listed first.
fn describe_index_code(
    code: &IndexCode,
    messages: &[String],
    network: Option<&NetworkInstance>,
) -> String {
    let mut out = format!("index code: n = {}, length = {}\n", code.n, code.length);
    match &code.repr {
        IndexCodeRepr::Linear { matrix } => {
            for j in 0..code.length {
                let own = network.and_then(|net| {
                    let s_count = net.messages().len();
                    (j < net.edges.len()).then_some(s_count + j)
                });
                let mut terms: Vec<String> = Vec::new();
                if let Some(own_row) = own {
                    if matrix[own_row][j] != 0 {
                        terms.push(term_str(matrix[own_row][j], &messages[own_row]));
                    }
                }
                for (i, row) in matrix.iter().enumerate() {
                    if Some(i) == own {
                        continue;
                    }
                    if row[j] != 0 {
                        terms.push(term_str(row[j], &messages[i]));
                    }
                }
                let label = match network {
                    Some(net) if j < net.edges.len() => format!("B({})", net.edges[j].id),
                    _ => format!("c{}", j + 1),
                };
                out.push_str(&format!(
                    "  {label} = {}\n",
                    if terms.is_empty() {
                        "0".into()
                    } else {
                        terms.join(" + ")
                    }
                ));
            }
        }
        IndexCodeRepr::Table { rows } => {
            out.push_str(&format!("  table code with {} rows\n", rows.len()));
        }
    }
    out
}

fn term_str(coeff: Symbol, message: &str) -> String {
    if coeff == 1 {
        message.to_string()
    } else {
        format!("{coeff}*{message}")
    }
}

fn describe_network_code(inst: &NetworkInstance, code: &NetworkCode) -> String {
    let mut out = String::from("network code:\n");
    for (edge, f) in &code.encoders {
        let inputs = inst
            .input_set(edge)
            .map(|s| s.ids().to_vec())
            .unwrap_or_default();
        match f.as_linear(&inst.field) {
            Some(coeffs) => {
                let terms: Vec<String> = coeffs
                    .iter()
                    .zip(&inputs)
                    .filter(|(&c, _)| c != 0)
                    .map(|(&c, id)| term_str(c, id))
                    .collect();
                out.push_str(&format!(
                    "  X({edge}) = {}\n",
                    if terms.is_empty() {
                        "0".into()
                    } else {
                        terms.join(" + ")
                    }
                ));
            }
            None => out.push_str(&format!("  X({edge}) = table over {}\n", list_str(&inputs))),
        }
    }
    for (terminal, d) in &code.decoders {
        out.push_str(&format!(
            "  D({terminal}): {} inputs -> {} outputs\n",
            d.arity(),
            d.output_count()
        ));
    }
    out
}

fn dispatch_analyze(command: &AnalyzeCommand, limits: &Limits) -> Result<Report, Error> {
    match command {
        AnalyzeCommand::Cycles { graph } => {
            let inst = load_index(graph)?;
            match icsie::find_delta_s_cycle(&inst, limits)? {
                Some(w) => Ok(Report {
                    exit: 0,
                    human: format!(
                        "cycle found: B = {}\n  receivers: {}\n  certificate: {}\n",
                        list_str(&w.messages),
                        w.receivers.join(", "),
                        w.certificate
                            .iter()
                            .map(|(r, c)| format!("{r}:{c}"))
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                    json: json!({
                        "acyclic": false,
                        "messages": w.messages,
                        "receivers": w.receivers,
                        "certificate": w.certificate,
                    }),
                }),
                None => Ok(Report {
                    exit: 0,
                    human: "acyclic: no qualifying message set exists\n".into(),
                    json: json!({"acyclic": true}),
                }),
            }
        }
        AnalyzeCommand::OptLength { graph, mode } => {
            let inst = load_index(graph)?;
            let mut human = String::new();
            let mut obj = serde_json::Map::new();
            let modes: &[OptMode] = match mode {
                OptModeArg::Linear => &[OptMode::Linear],
                OptModeArg::Nonlinear => &[OptMode::Nonlinear],
                OptModeArg::Both => &[OptMode::Linear, OptMode::Nonlinear],
            };
            for m in modes {
                let r = icsie::optimal_codelength(&inst, *m, limits)?;
                let name = match m {
                    OptMode::Linear => "linear",
                    OptMode::Nonlinear => "nonlinear",
                };
                human.push_str(&format!("{name}: optimal codelength {}\n", r.n_opt));
                obj.insert(name.into(), json!(r.n_opt));
            }
            Ok(Report {
                exit: 0,
                human,
                json: Value::Object(obj),
            })
        }
        AnalyzeCommand::ConfusionSet { graph } => {
            let inst = load_index(graph)?;
            let c = icsie::confusion_set(&inst, limits)?;
            let mut human = format!("confusion set: {} vectors\n", c.len());
            for (z, tags) in c.vectors.iter().zip(&c.tags) {
                human.push_str(&format!("  {} [{}]\n", vec_str(z), tags.join(",")));
            }
            Ok(Report {
                exit: 0,
                human,
                json: json!({
                    "size": c.len(),
                    "vectors": c.vectors,
                    "tags": c.tags,
                }),
            })
        }
        AnalyzeCommand::TAll { graph } => {
            let inst = load_index(graph)?;
            let split = model::split_multi_demand_receivers(&inst);
            let partition = model::find_unicast_acyclic_partition(&split, limits)?;
            let redundant = equiv::check_t_all_redundant(&split, &partition, limits)?;
            Ok(Report {
                exit: u8::from(!redundant),
                human: format!(
                    "all-links receiver redundant: {redundant} (edge part {})\n",
                    list_str(&partition.e_messages)
                ),
                json: json!({
                    "redundant": redundant,
                    "e_messages": partition.e_messages,
                    "s_messages": partition.s_messages,
                }),
            })
        }
        AnalyzeCommand::Redundant { instance, edge } => {
            let inst = load_network(instance)?;
            let targets: Vec<String> = match edge {
                Some(e) => vec![e.clone()],
                None => inst.edges.iter().map(|e| e.id.clone()).collect(),
            };
            let mut human = String::new();
            let mut results = Vec::new();
            let mut all_true = true;
            for e in &targets {
                let verdict = ncle::is_redundant_link(&inst, e, limits)?;
                all_true &= verdict;
                human.push_str(&format!("{e}: {}\n", if verdict { "redundant" } else { "not redundant" }));
                results.push(json!({"edge": e, "redundant": verdict}));
            }
            let exit = if edge.is_some() && !all_true { 1 } else { 0 };
            Ok(Report {
                exit,
                human,
                json: Value::Array(results),
            })
        }
        AnalyzeCommand::Independent { graph, message } => {
            let inst = load_index(graph)?;
            let split = model::split_multi_demand_receivers(&inst);
            let partition = model::find_unicast_acyclic_partition(&split, limits)?;
            let target = partition.e_messages.len();
            let targets: Vec<String> = match message {
                Some(m) => vec![m.clone()],
                None => partition.e_messages.clone(),
            };
            let mut human = format!("target codelength: {target}\n");
            let mut results = Vec::new();
            let mut all_true = true;
            for m in &targets {
                let verdict =
                    icsie::is_independent_component(&split, &partition, m, target, limits)?;
                all_true &= verdict;
                human.push_str(&format!(
                    "{m}: {}\n",
                    if verdict { "independent" } else { "not independent" }
                ));
                results.push(json!({"message": m, "independent": verdict}));
            }
            let exit = if message.is_some() && !all_true { 1 } else { 0 };
            Ok(Report {
                exit,
                human,
                json: Value::Array(results),
            })
        }
        AnalyzeCommand::Conventional { instance, check } => {
            let inst = load_network(instance)?;
            let derived = ncle::derive_conventional_instances(&inst, limits)?;
            let mut human = format!("{} derived instance(s)\n", derived.len());
            let mut results = Vec::new();
            let mut all_feasible = true;
            for (i, d) in derived.iter().enumerate() {
                let edges: Vec<String> = d.edges.iter().map(|e| e.id.clone()).collect();
                if *check {
                    let feasible = ncle::ncle_feasible(d, limits)?;
                    all_feasible &= feasible;
                    human.push_str(&format!(
                        "  [{i}] edges {} -> error-free code exists: {feasible}\n",
                        list_str(&edges)
                    ));
                    results.push(json!({"edges": edges, "feasible": feasible}));
                } else {
                    human.push_str(&format!("  [{i}] edges {}\n", list_str(&edges)));
                    results.push(json!({"edges": edges}));
                }
            }
            Ok(Report {
                exit: u8::from(*check && !all_feasible),
                human,
                json: Value::Array(results),
            })
        }
    }
}

fn dispatch_fixtures(command: &FixturesCommand) -> Result<Report, Error> {
    match command {
        FixturesCommand::List => {
            let mut human = String::new();
            let mut items = Vec::new();
            for (name, kind, _) in fixtures::FIXTURES {
                human.push_str(&format!("{name}\t{kind}\n"));
                items.push(json!({"name": name, "kind": kind}));
            }
            Ok(Report {
                exit: 0,
                human,
                json: Value::Array(items),
            })
        }
        FixturesCommand::Emit { name, dir } => {
            let names: Vec<&str> = match name {
                Some(n) => {
                    if fixtures::raw(n).is_none() {
                        return Err(Error::UnknownId(n.clone()));
                    }
                    vec![n.as_str()]
                }
                None => fixtures::names(),
            };
            let mut human = String::new();
            let mut written = Vec::new();
            for n in names {
                let path = dir.join(format!("{n}.json"));
                write_file(&path, fixtures::raw(n).unwrap())?;
                human.push_str(&format!("wrote {}\n", path.display()));
                written.push(json!(path.display().to_string()));
            }
            Ok(Report {
                exit: 0,
                human,
                json: Value::Array(written),
            })
        }
    }
}
