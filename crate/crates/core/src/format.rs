//! Self-describing JSON file formats for instances and codes, and JSON
//! views of analysis reports.
//!
//! Every document carries `format_version` (currently 1) and a `kind`
//! discriminator. Symbols are element codes `0..q-1`; tables are indexed
//! lexicographically with the first input most significant; generator
//! matrices have one row per message in declaration order.

use serde::{Deserialize, Serialize};

use crate::code::{
    IndexCode, IndexCodeRepr, LocalFunction, MultiFunction, NetworkCode, ProceduralDecoder,
};
use crate::field::make_field;
use crate::model::{
    Edge, IndexInstance, NetworkInstance, Receiver, SourceNode, Terminal,
};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

pub const KIND_NETWORK_INSTANCE: &str = "network-instance";
pub const KIND_INDEX_INSTANCE: &str = "index-instance";
pub const KIND_NETWORK_CODE: &str = "network-code";
pub const KIND_INDEX_CODE: &str = "index-code";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkInstanceDoc {
    pub format_version: u32,
    pub kind: String,
    pub q: u64,
    pub nodes: Vec<String>,
    pub sources: Vec<SourceDoc>,
    pub edges: Vec<EdgeDoc>,
    pub terminals: Vec<TerminalDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceDoc {
    pub node: String,
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub delta: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TerminalDoc {
    pub node: String,
    pub demands: Vec<String>,
    pub delta: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexInstanceDoc {
    pub format_version: u32,
    pub kind: String,
    pub q: u64,
    pub messages: Vec<String>,
    pub receivers: Vec<ReceiverDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReceiverDoc {
    pub id: String,
    pub wants: Vec<String>,
    #[serde(default)]
    pub side_info: Vec<String>,
    #[serde(default)]
    pub delta: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalFunctionDoc {
    Linear(Vec<u8>),
    Table { arity: usize, outputs: Vec<u8> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiFunctionDoc {
    LinearRows(Vec<Vec<u8>>),
    Table { arity: usize, rows: Vec<Vec<u8>> },
    Procedural(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkCodeDoc {
    pub format_version: u32,
    pub kind: String,
    pub q: u64,
    pub encoders: Vec<EncoderDoc>,
    pub decoders: Vec<DecoderDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncoderDoc {
    pub edge: String,
    pub function: LocalFunctionDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecoderDoc {
    pub terminal: String,
    pub function: MultiFunctionDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexCodeReprDoc {
    Linear(Vec<Vec<u8>>),
    Table(Vec<Vec<u8>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexCodeDoc {
    pub format_version: u32,
    pub kind: String,
    pub q: u64,
    pub n: usize,
    pub length: usize,
    pub code: IndexCodeReprDoc,
}

fn check_header(version: u32, kind: &str, expected: &str) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported format_version {version} (expected {FORMAT_VERSION})"
        )));
    }
    if kind != expected {
        return Err(Error::Parse(format!(
            "document kind is `{kind}`, expected `{expected}`"
        )));
    }
    Ok(())
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_network_instance(text: &str) -> Result<NetworkInstance> {
    let doc: NetworkInstanceDoc = from_json(text)?;
    network_instance_from_doc(&doc)
}

pub fn network_instance_from_doc(doc: &NetworkInstanceDoc) -> Result<NetworkInstance> {
    check_header(doc.format_version, &doc.kind, KIND_NETWORK_INSTANCE)?;
    Ok(NetworkInstance {
        field: make_field(doc.q)?,
        nodes: doc.nodes.clone(),
        edges: doc
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id.clone(),
                tail: e.tail.clone(),
                head: e.head.clone(),
                delta: e.delta,
            })
            .collect(),
        sources: doc
            .sources
            .iter()
            .map(|s| SourceNode {
                node: s.node.clone(),
                messages: s.messages.clone(),
            })
            .collect(),
        terminals: doc
            .terminals
            .iter()
            .map(|t| Terminal {
                node: t.node.clone(),
                demands: t.demands.clone(),
                delta: t.delta,
            })
            .collect(),
    })
}

pub fn network_instance_to_doc(inst: &NetworkInstance) -> NetworkInstanceDoc {
    NetworkInstanceDoc {
        format_version: FORMAT_VERSION,
        kind: KIND_NETWORK_INSTANCE.into(),
        q: inst.field.q() as u64,
        nodes: inst.nodes.clone(),
        sources: inst
            .sources
            .iter()
            .map(|s| SourceDoc {
                node: s.node.clone(),
                messages: s.messages.clone(),
            })
            .collect(),
        edges: inst
            .edges
            .iter()
            .map(|e| EdgeDoc {
                id: e.id.clone(),
                tail: e.tail.clone(),
                head: e.head.clone(),
                delta: e.delta,
            })
            .collect(),
        terminals: inst
            .terminals
            .iter()
            .map(|t| TerminalDoc {
                node: t.node.clone(),
                demands: t.demands.clone(),
                delta: t.delta,
            })
            .collect(),
    }
}

pub fn parse_index_instance(text: &str) -> Result<IndexInstance> {
    let doc: IndexInstanceDoc = from_json(text)?;
    index_instance_from_doc(&doc)
}

pub fn index_instance_from_doc(doc: &IndexInstanceDoc) -> Result<IndexInstance> {
    check_header(doc.format_version, &doc.kind, KIND_INDEX_INSTANCE)?;
    Ok(IndexInstance {
        field: make_field(doc.q)?,
        messages: doc.messages.clone(),
        receivers: doc
            .receivers
            .iter()
            .map(|r| Receiver {
                id: r.id.clone(),
                wants: r.wants.clone(),
                side_info: r.side_info.clone(),
                delta: r.delta,
            })
            .collect(),
    })
}

pub fn index_instance_to_doc(inst: &IndexInstance) -> IndexInstanceDoc {
    IndexInstanceDoc {
        format_version: FORMAT_VERSION,
        kind: KIND_INDEX_INSTANCE.into(),
        q: inst.field.q() as u64,
        messages: inst.messages.clone(),
        receivers: inst
            .receivers
            .iter()
            .map(|r| ReceiverDoc {
                id: r.id.clone(),
                wants: r.wants.clone(),
                side_info: r.side_info.clone(),
                delta: r.delta,
            })
            .collect(),
    }
}

fn local_function_from_doc(doc: &LocalFunctionDoc, q: usize) -> Result<LocalFunction> {
    match doc {
        LocalFunctionDoc::Linear(coeffs) => {
            check_symbols(coeffs, q)?;
            Ok(LocalFunction::Linear {
                coeffs: coeffs.clone(),
            })
        }
        LocalFunctionDoc::Table { arity, outputs } => {
            check_symbols(outputs, q)?;
            let expected = crate::field::vector_space_size(q, *arity);
            if outputs.len() as u128 != expected {
                return Err(Error::Parse(format!(
                    "table has {} outputs, expected q^arity = {expected}",
                    outputs.len()
                )));
            }
            Ok(LocalFunction::Table {
                arity: *arity,
                outputs: outputs.clone(),
            })
        }
    }
}

fn local_function_to_doc(f: &LocalFunction) -> LocalFunctionDoc {
    match f {
        LocalFunction::Linear { coeffs } => LocalFunctionDoc::Linear(coeffs.clone()),
        LocalFunction::Table { arity, outputs } => LocalFunctionDoc::Table {
            arity: *arity,
            outputs: outputs.clone(),
        },
    }
}

fn multi_function_from_doc(doc: &MultiFunctionDoc, q: usize) -> Result<MultiFunction> {
    match doc {
        MultiFunctionDoc::LinearRows(rows) => {
            for r in rows {
                check_symbols(r, q)?;
            }
            Ok(MultiFunction::Linear { rows: rows.clone() })
        }
        MultiFunctionDoc::Table { arity, rows } => {
            let expected = crate::field::vector_space_size(q, *arity);
            if rows.len() as u128 != expected {
                return Err(Error::Parse(format!(
                    "table has {} rows, expected q^arity = {expected}",
                    rows.len()
                )));
            }
            for r in rows {
                check_symbols(r, q)?;
            }
            Ok(MultiFunction::Table {
                arity: *arity,
                rows: rows.clone(),
            })
        }
        MultiFunctionDoc::Procedural(name) => ProceduralDecoder::from_name(name)
            .map(MultiFunction::Procedural)
            .ok_or_else(|| Error::Parse(format!("unknown procedural decoder `{name}`"))),
    }
}

fn multi_function_to_doc(f: &MultiFunction) -> MultiFunctionDoc {
    match f {
        MultiFunction::Linear { rows } => MultiFunctionDoc::LinearRows(rows.clone()),
        MultiFunction::Table { arity, rows } => MultiFunctionDoc::Table {
            arity: *arity,
            rows: rows.clone(),
        },
        MultiFunction::Procedural(p) => MultiFunctionDoc::Procedural(p.name().into()),
    }
}

fn check_symbols(symbols: &[u8], q: usize) -> Result<()> {
    if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= q) {
        return Err(Error::Parse(format!(
            "symbol {bad} is out of range for field size {q}"
        )));
    }
    Ok(())
}

pub fn parse_network_code(text: &str) -> Result<(NetworkCode, u64)> {
    let doc: NetworkCodeDoc = from_json(text)?;
    check_header(doc.format_version, &doc.kind, KIND_NETWORK_CODE)?;
    let q = make_field(doc.q)?.q();
    Ok((
        NetworkCode {
            encoders: doc
                .encoders
                .iter()
                .map(|e| Ok((e.edge.clone(), local_function_from_doc(&e.function, q)?)))
                .collect::<Result<_>>()?,
            decoders: doc
                .decoders
                .iter()
                .map(|d| Ok((d.terminal.clone(), multi_function_from_doc(&d.function, q)?)))
                .collect::<Result<_>>()?,
        },
        doc.q,
    ))
}

pub fn network_code_to_doc(code: &NetworkCode, q: u64) -> NetworkCodeDoc {
    NetworkCodeDoc {
        format_version: FORMAT_VERSION,
        kind: KIND_NETWORK_CODE.into(),
        q,
        encoders: code
            .encoders
            .iter()
            .map(|(id, f)| EncoderDoc {
                edge: id.clone(),
                function: local_function_to_doc(f),
            })
            .collect(),
        decoders: code
            .decoders
            .iter()
            .map(|(id, f)| DecoderDoc {
                terminal: id.clone(),
                function: multi_function_to_doc(f),
            })
            .collect(),
    }
}

pub fn parse_index_code(text: &str) -> Result<(IndexCode, u64)> {
    let doc: IndexCodeDoc = from_json(text)?;
    check_header(doc.format_version, &doc.kind, KIND_INDEX_CODE)?;
    let q = make_field(doc.q)?.q();
    let repr = match &doc.code {
        IndexCodeReprDoc::Linear(matrix) => {
            if matrix.len() != doc.n {
                return Err(Error::Parse(format!(
                    "generator has {} rows, expected n = {}",
                    matrix.len(),
                    doc.n
                )));
            }
            for row in matrix {
                check_symbols(row, q)?;
                if row.len() != doc.length {
                    return Err(Error::Parse(format!(
                        "generator row has {} entries, expected length = {}",
                        row.len(),
                        doc.length
                    )));
                }
            }
            IndexCodeRepr::Linear {
                matrix: matrix.clone(),
            }
        }
        IndexCodeReprDoc::Table(rows) => {
            let expected = crate::field::vector_space_size(q, doc.n);
            if rows.len() as u128 != expected {
                return Err(Error::Parse(format!(
                    "table has {} rows, expected q^n = {expected}",
                    rows.len()
                )));
            }
            for row in rows {
                check_symbols(row, q)?;
                if row.len() != doc.length {
                    return Err(Error::Parse(format!(
                        "codeword has {} symbols, expected length = {}",
                        row.len(),
                        doc.length
                    )));
                }
            }
            IndexCodeRepr::Table { rows: rows.clone() }
        }
    };
    Ok((
        IndexCode {
            n: doc.n,
            length: doc.length,
            repr,
        },
        doc.q,
    ))
}

pub fn index_code_to_doc(code: &IndexCode, q: u64) -> IndexCodeDoc {
    IndexCodeDoc {
        format_version: FORMAT_VERSION,
        kind: KIND_INDEX_CODE.into(),
        q,
        n: code.n,
        length: code.length,
        code: match &code.repr {
            IndexCodeRepr::Linear { matrix } => IndexCodeReprDoc::Linear(matrix.clone()),
            IndexCodeRepr::Table { rows } => IndexCodeReprDoc::Table(rows.clone()),
        },
    }
}

/// Any parseable document.
#[derive(Debug, Clone)]
pub enum AnyDoc {
    Network(NetworkInstance),
    Index(IndexInstance),
    NetworkCode(NetworkCode, u64),
    IndexCode(IndexCode, u64),
}

/// Parses a document by its `kind` field.
pub fn parse_any(text: &str) -> Result<AnyDoc> {
    #[derive(Deserialize)]
    struct Probe {
        kind: String,
    }
    let probe: Probe = from_json(text)?;
    match probe.kind.as_str() {
        KIND_NETWORK_INSTANCE => Ok(AnyDoc::Network(parse_network_instance(text)?)),
        KIND_INDEX_INSTANCE => Ok(AnyDoc::Index(parse_index_instance(text)?)),
        KIND_NETWORK_CODE => {
            let (c, q) = parse_network_code(text)?;
            Ok(AnyDoc::NetworkCode(c, q))
        }
        KIND_INDEX_CODE => {
            let (c, q) = parse_index_code(text)?;
            Ok(AnyDoc::IndexCode(c, q))
        }
        other => Err(Error::Parse(format!("unknown document kind `{other}`"))),
    }
}

pub fn to_json_pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
