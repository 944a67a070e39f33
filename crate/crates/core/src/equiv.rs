//! Instance and code conversion between the network-coding and
//! index-coding sides, in both directions.
//!
//! Network → index is a direct relabeling: one message per source message
//! and per link, one receiver per link and per terminal. Index → network
//! first splits multi-demand receivers, then partitions messages into an
//! edge-like part and a source-like part, then rewrites the graph until
//! every message/receiver incidence is network-shaped, and finally reads
//! the network off the rewritten graph. Codes convert alongside, with an
//! extension step (one extra component per rewrite) and a restriction
//! step (dropping the added components) linking codes on the original
//! graph to codes on the rewritten one.

use std::collections::{HashMap, HashSet};

use crate::code::{
    canonical_decoder_at, IndexCode, IndexCodeRepr, LocalFunction, MultiFunction, NetworkCode,
    ReceiverContext,
};
use crate::field::{vector_space_size, Symbol};
use crate::icsie::{confusion_membership, validate_icsie};
use crate::model::{
    fresh_id, validate_index_instance, validate_network_instance, Edge, IndexInstance, InputSet,
    MessageId, NetworkInstance, Partition, Receiver, ReceiverId, SourceNode, Terminal,
};
use crate::ncle::{validate_ncle, Quantification};
use crate::{Error, Limits, Result};

/// Layout bookkeeping for a network → index conversion.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct NcToIcReport {
    /// Source messages first, then one message per edge, in declared order.
    pub message_layout: Vec<MessageId>,
    /// One receiver per edge, then one per terminal.
    pub receiver_layout: Vec<ReceiverId>,
    /// The codelength the equivalence targets: the number of links.
    pub target_codelength: usize,
}

/// Converts a network instance to its index instance: each link becomes a
/// message and a receiver wanting it with the link's inputs as side
/// information; each terminal becomes a receiver wanting its demands with
/// its incoming links as side information. No all-links receiver is
/// emitted.
pub fn nc_to_ic_instance(inst: &NetworkInstance) -> Result<(IndexInstance, NcToIcReport)> {
    let verdict = validate_network_instance(inst);
    if !verdict.valid() {
        return Err(Error::InvalidInstance(verdict.violations.join("; ")));
    }
    Ok(nc_to_ic_instance_unchecked(inst))
}

/// [`nc_to_ic_instance`] without the validity gate; used for feasibility
/// analysis on reduced instances that may violate structural rules.
pub fn nc_to_ic_instance_unchecked(inst: &NetworkInstance) -> (IndexInstance, NcToIcReport) {
    let mut messages = inst.messages();
    messages.extend(inst.edges.iter().map(|e| e.id.clone()));
    let mut receivers = Vec::new();
    for edge in &inst.edges {
        let side = match inst.input_set(&edge.id).unwrap() {
            InputSet::Messages(ms) => ms,
            InputSet::Edges(es) => es,
        };
        receivers.push(Receiver {
            id: edge.id.clone(),
            wants: vec![edge.id.clone()],
            side_info: side,
            delta: edge.delta,
        });
    }
    for t in &inst.terminals {
        receivers.push(Receiver {
            id: t.node.clone(),
            wants: t.demands.clone(),
            side_info: inst.terminal_inputs(&t.node),
            delta: t.delta,
        });
    }
    let report = NcToIcReport {
        message_layout: messages.clone(),
        receiver_layout: receivers.iter().map(|r| r.id.clone()).collect(),
        target_codelength: inst.edges.len(),
    };
    (
        IndexInstance {
            field: inst.field.clone(),
            messages,
            receivers,
        },
        report,
    )
}

/// Verdict of the structural conditions a network-shaped index instance
/// must satisfy.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Prop1Report {
    /// (condition number, description) pairs.
    pub violations: Vec<(u8, String)>,
    /// Terminal-side mixed holdings are repairable by rewriting, so they
    /// are reported as warnings rather than violations.
    pub warnings: Vec<String>,
}

impl Prop1Report {
    pub fn satisfied(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks: (1) the subgraph on edge-part messages and their receivers is
/// acyclic; (2) every edge-part message is wanted by exactly one
/// receiver; (3) no link receiver holds both a source-part and an
/// edge-part message.
pub fn check_proposition1(inst: &IndexInstance, partition: &Partition) -> Prop1Report {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let e_set: HashSet<&str> = partition.e_messages.iter().map(|m| m.as_str()).collect();
    let link_ids: HashSet<&String> = partition.e_receivers.values().collect();

    // condition 1: cycle among edge-part messages via their receivers
    if dependency_order(inst, &partition.e_messages, &partition.e_receivers).is_none() {
        violations.push((
            1,
            "edge-part messages and their receivers contain a directed cycle".into(),
        ));
    }

    for m in &partition.e_messages {
        let wanters = inst.wanters(m);
        if wanters.len() != 1 {
            violations.push((
                2,
                format!("edge-part message `{m}` is wanted by {} receivers", wanters.len()),
            ));
        }
    }

    for r in &inst.receivers {
        let holds_s = r.side_info.iter().any(|m| !e_set.contains(m.as_str()));
        let holds_e = r.side_info.iter().any(|m| e_set.contains(m.as_str()));
        if holds_s && holds_e {
            if link_ids.contains(&r.id) {
                violations.push((
                    3,
                    format!(
                        "link receiver `{}` holds both source-part and edge-part messages",
                        r.id
                    ),
                ));
            } else {
                warnings.push(format!(
                    "terminal receiver `{}` holds both source-part and edge-part messages",
                    r.id
                ));
            }
        }
    }

    Prop1Report {
        violations,
        warnings,
    }
}

/// True when the all-links receiver would be redundant: every difference
/// vector that is zero on the source part and nonzero on the edge part
/// already meets some existing receiver's confusion conditions.
pub fn check_t_all_redundant(
    inst: &IndexInstance,
    partition: &Partition,
    limits: &Limits,
) -> Result<bool> {
    let n = inst.n();
    let total = vector_space_size(inst.field.q(), n);
    limits.check(total)?;
    let s_idx: Vec<usize> = partition
        .s_messages
        .iter()
        .filter_map(|m| inst.message_index(m))
        .collect();
    let e_idx: Vec<usize> = partition
        .e_messages
        .iter()
        .filter_map(|m| inst.message_index(m))
        .collect();
    for idx in 0..total as usize {
        let z = inst.field.vector_from_index(idx, n);
        let zero_on_s = s_idx.iter().all(|&i| z[i] == 0);
        let nonzero_on_e = e_idx.iter().any(|&i| z[i] != 0);
        if zero_on_s && nonzero_on_e && confusion_membership(inst, &z).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Converts a valid network code to an index code on the converted
/// instance: the component for edge `e` maps a message to the edge's own
/// symbol plus its global transfer map applied to the source part. Linear
/// codes stay linear.
pub fn nc_code_to_ic_code(
    inst: &NetworkInstance,
    code: &NetworkCode,
    limits: &Limits,
) -> Result<IndexCode> {
    let report = validate_ncle(inst, code, Quantification::Reachable, limits)?;
    if !report.valid() {
        return Err(Error::InvalidNetworkCode(describe_ncle_failure(&report)));
    }
    nc_code_to_ic_code_unchecked(inst, code, limits)
}

fn nc_code_to_ic_code_unchecked(
    inst: &NetworkInstance,
    code: &NetworkCode,
    limits: &Limits,
) -> Result<IndexCode> {
    let s_count = inst.messages().len();
    let e_count = inst.edges.len();
    let n = s_count + e_count;
    if let Some(rows) = crate::code::linear_global_rows(inst, code) {
        let mut matrix = vec![vec![0u8; e_count]; n];
        for (j, row) in rows.iter().enumerate() {
            for (i, &c) in row.iter().enumerate() {
                matrix[i][j] = c;
            }
            matrix[s_count + j][j] = 1;
        }
        return Ok(IndexCode::linear(matrix));
    }
    let tables = crate::code::global_tables(inst, code, limits)?;
    let total = vector_space_size(inst.field.q(), n);
    limits.check(total)?;
    let field = &inst.field;
    let mut rows = Vec::with_capacity(total as usize);
    for idx in 0..total as usize {
        let x = field.vector_from_index(idx, n);
        let s_index = field.vector_index(&x[..s_count]);
        let row: Vec<Symbol> = (0..e_count)
            .map(|j| field.add(x[s_count + j], tables[j][s_index]))
            .collect();
        rows.push(row);
    }
    Ok(IndexCode {
        n,
        length: e_count,
        repr: IndexCodeRepr::Table { rows },
    })
}

fn describe_ncle_failure(report: &crate::ncle::RobustnessReport) -> String {
    if let Some(f) = report.delivery_failures.first() {
        return format!(
            "terminal `{}` decodes {:?} instead of {:?} at source assignment {:?}",
            f.terminal, f.got, f.expected, f.x_s
        );
    }
    for (id, o) in report.edge_outcomes.iter().chain(&report.terminal_outcomes) {
        if !o.passes {
            return format!("function for `{id}` is not resistant to its declared budget");
        }
    }
    "network code is invalid".into()
}

/// Converts a valid index code of length `|E|` back to a network code by
/// fixing one codeword and reading each encoder/decoder off the
/// receivers' canonical decoders. `sigma` defaults to the image of the
/// zero message.
pub fn ic_code_to_nc_code(
    inst: &NetworkInstance,
    ic: &IndexCode,
    sigma: Option<Vec<Symbol>>,
    limits: &Limits,
) -> Result<NetworkCode> {
    let (converted, _) = nc_to_ic_instance(inst)?;
    if ic.length != inst.edges.len() {
        return Err(Error::WrongLength {
            expected: inst.edges.len(),
            got: ic.length,
        });
    }
    if ic.n != converted.n() {
        return Err(Error::DimensionMismatch(format!(
            "index code is over {} messages, converted instance has {}",
            ic.n,
            converted.n()
        )));
    }
    match validate_icsie(&converted, ic, limits)? {
        crate::icsie::IcsieOutcome::Valid => {}
        crate::icsie::IcsieOutcome::Invalid(w) => {
            return Err(Error::InvalidIndexCode(format!(
                "confusable difference {:?} is not separated",
                w.z
            )));
        }
    }
    let field = &inst.field;
    let sigma = match sigma {
        Some(s) => {
            if s.len() != ic.length {
                return Err(Error::DimensionMismatch(format!(
                    "codeword has {} symbols, code has length {}",
                    s.len(),
                    ic.length
                )));
            }
            s
        }
        None => ic.encode(field, &vec![0; ic.n])?,
    };

    // every source assignment must extend to exactly one full message
    // encoding to sigma
    let s_count = inst.messages().len();
    let total = vector_space_size(field.q(), ic.n);
    limits.check(total)?;
    let s_total = vector_space_size(field.q(), s_count) as usize;
    let mut extension_count = vec![0usize; s_total];
    for idx in 0..total as usize {
        let x = field.vector_from_index(idx, ic.n);
        if ic.encode(field, &x)? == sigma {
            extension_count[field.vector_index(&x[..s_count])] += 1;
        }
    }
    if let Some(bad) = extension_count.iter().position(|&c| c != 1) {
        return Err(Error::NonUniqueExtension {
            x_s: field.vector_from_index(bad, s_count),
        });
    }

    let msg_pos: HashMap<&str, usize> = converted
        .messages
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_str(), i))
        .collect();
    let mut encoders = Vec::new();
    for edge in &inst.edges {
        let r = converted.receiver(&edge.id).unwrap();
        let ctx = ReceiverContext {
            want_indices: vec![msg_pos[edge.id.as_str()]],
            side_indices: r.side_info.iter().map(|m| msg_pos[m.as_str()]).collect(),
            delta: r.delta,
        };
        let table = canonical_decoder_at(field, ic, &ctx, &sigma, limits)?;
        let MultiFunction::Table { arity, rows } = table else {
            unreachable!("canonical decoders are tables")
        };
        encoders.push((
            edge.id.clone(),
            LocalFunction::Table {
                arity,
                outputs: rows.into_iter().map(|r| r[0]).collect(),
            },
        ));
    }
    let mut decoders = Vec::new();
    for t in &inst.terminals {
        let r = converted.receiver(&t.node).unwrap();
        let ctx = ReceiverContext {
            want_indices: t.demands.iter().map(|d| msg_pos[d.as_str()]).collect(),
            side_indices: r.side_info.iter().map(|m| msg_pos[m.as_str()]).collect(),
            delta: r.delta,
        };
        decoders.push((
            t.node.clone(),
            canonical_decoder_at(field, ic, &ctx, &sigma, limits)?,
        ));
    }
    Ok(NetworkCode { encoders, decoders })
}

/// One detected problematic incidence, labeled with its case number.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CaseInstance {
    pub case: u8,
    pub participants: Vec<String>,
}

/// How a rewrite repaired an incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RewriteKind {
    /// A fresh message/receiver pair relaying a source-part message
    /// (cases 1, 2, 3 and their receiver-side analogues, and case 7).
    Relay,
    /// A duplicated link: a fresh message/receiver pair copying an
    /// existing link receiver (cases 4, 5, 6).
    Duplicate,
}

/// One rewrite application.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RewriteStep {
    pub case: u8,
    pub kind: RewriteKind,
    pub fresh_message: MessageId,
    pub fresh_receiver: ReceiverId,
    /// The message the fresh one stands in for: the relayed source-part
    /// message, or the duplicated edge-part message.
    pub paired_with: MessageId,
    pub repointed: ReceiverId,
    pub deleted_edge: (ReceiverId, MessageId),
    pub added_edge: (ReceiverId, MessageId),
}

/// Everything [`modify_side_info_graph`] produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifyReport {
    pub modified: IndexInstance,
    /// Edge-part messages of the modified graph, in declaration order.
    pub e_prime: Vec<MessageId>,
    /// Receiver wanting each edge-part message.
    pub e_receivers: HashMap<MessageId, ReceiverId>,
    /// (duplicate, original) pairs, in creation order.
    pub duplicated_links: Vec<(MessageId, MessageId)>,
    pub added_messages: Vec<MessageId>,
    pub added_receivers: Vec<ReceiverId>,
    pub deleted_edges: Vec<(ReceiverId, MessageId)>,
    pub added_edges: Vec<(ReceiverId, MessageId)>,
    pub steps: Vec<RewriteStep>,
}

struct Engine {
    inst: IndexInstance,
    e_messages: Vec<MessageId>,
    e_set: HashSet<MessageId>,
    link_receivers: HashSet<ReceiverId>,
    wanter_of: HashMap<MessageId, ReceiverId>,
    taken: HashSet<String>,
}

enum Pending {
    Relay {
        case: u8,
        source: MessageId,
        holder: ReceiverId,
    },
    Dup {
        case: u8,
        message: MessageId,
        repoint: ReceiverId,
    },
    Mixed {
        receiver: ReceiverId,
        source: MessageId,
    },
}

impl Engine {
    fn new(inst: &IndexInstance, partition: &Partition) -> Self {
        let mut taken: HashSet<String> = inst.messages.iter().cloned().collect();
        taken.extend(inst.receivers.iter().map(|r| r.id.clone()));
        Engine {
            inst: inst.clone(),
            e_messages: partition.e_messages.clone(),
            e_set: partition.e_messages.iter().cloned().collect(),
            link_receivers: partition.e_receivers.values().cloned().collect(),
            wanter_of: partition.e_receivers.clone(),
            taken,
        }
    }

    fn is_link(&self, id: &str) -> bool {
        self.link_receivers.contains(id)
    }

    fn holders_split(&self, m: &str) -> (Vec<&Receiver>, Vec<&Receiver>) {
        self.inst
            .holders(m)
            .into_iter()
            .partition(|r| self.is_link(&r.id))
    }

    fn find_pending(&self) -> Result<Option<Pending>> {
        // source-part messages held by terminal receivers
        for m in &self.inst.messages {
            if self.e_set.contains(m) {
                continue;
            }
            let (links, terms) = self.holders_split(m);
            if terms.is_empty() {
                continue;
            }
            let case = if !links.is_empty() {
                3
            } else if terms.len() == 1 {
                1
            } else {
                2
            };
            return Ok(Some(Pending::Relay {
                case,
                source: m.clone(),
                holder: terms[0].id.clone(),
            }));
        }
        // edge-part messages, upstream-first
        let order = dependency_order(&self.inst, &self.e_messages, &self.wanter_of)
            .ok_or_else(|| {
                Error::InvalidInstance(
                    "edge-part messages and their receivers contain a directed cycle".into(),
                )
            })?;
        for m in &order {
            let (links, terms) = self.holders_split(m);
            if !links.is_empty() && !terms.is_empty() {
                return Ok(Some(Pending::Dup {
                    case: 4,
                    message: m.clone(),
                    repoint: links[0].id.clone(),
                }));
            }
            if links.len() >= 2 {
                let lead = &links[0];
                if let Some(diff) = links[1..]
                    .iter()
                    .find(|r| r.side_info != lead.side_info)
                {
                    return Ok(Some(Pending::Dup {
                        case: 5,
                        message: m.clone(),
                        repoint: diff.id.clone(),
                    }));
                }
            }
            if terms.len() >= 2 {
                let lead = &terms[0];
                if let Some(diff) = terms[1..]
                    .iter()
                    .find(|r| r.side_info != lead.side_info || r.delta != lead.delta)
                {
                    return Ok(Some(Pending::Dup {
                        case: 6,
                        message: m.clone(),
                        repoint: diff.id.clone(),
                    }));
                }
            }
        }
        // link receivers holding both kinds
        for r in &self.inst.receivers {
            if !self.is_link(&r.id) {
                continue;
            }
            let holds_e = r.side_info.iter().any(|m| self.e_set.contains(m));
            if !holds_e {
                continue;
            }
            if let Some(s) = r.side_info.iter().find(|m| !self.e_set.contains(*m)) {
                return Ok(Some(Pending::Mixed {
                    receiver: r.id.clone(),
                    source: s.clone(),
                }));
            }
        }
        Ok(None)
    }

    fn add_fresh(&mut self, base: &str, side: Vec<MessageId>, delta: usize) -> MessageId {
        let id = fresh_id(base, &self.taken);
        self.taken.insert(id.clone());
        self.inst.messages.push(id.clone());
        self.inst.receivers.push(Receiver {
            id: id.clone(),
            wants: vec![id.clone()],
            side_info: side,
            delta,
        });
        self.e_messages.push(id.clone());
        self.e_set.insert(id.clone());
        self.link_receivers.insert(id.clone());
        self.wanter_of.insert(id.clone(), id.clone());
        id
    }

    fn repoint(&mut self, receiver: &str, from: &str, to: &str) {
        let r = self
            .inst
            .receivers
            .iter_mut()
            .find(|r| r.id == receiver)
            .expect("repointed receiver exists");
        let slot = r
            .side_info
            .iter_mut()
            .find(|m| m.as_str() == from)
            .expect("repointed edge exists");
        *slot = to.to_string();
    }
}

/// Orders edge-part messages so that any message appearing in another's
/// receiver side information comes first. `None` if the dependencies are
/// cyclic.
fn dependency_order(
    inst: &IndexInstance,
    e_messages: &[MessageId],
    wanter_of: &HashMap<MessageId, ReceiverId>,
) -> Option<Vec<MessageId>> {
    let e_pos: HashMap<&str, usize> = e_messages
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_str(), i))
        .collect();
    let deps: Vec<Vec<usize>> = e_messages
        .iter()
        .map(|m| {
            let Some(rid) = wanter_of.get(m) else {
                return Vec::new();
            };
            let Some(r) = inst.receiver(rid) else {
                return Vec::new();
            };
            r.side_info
                .iter()
                .filter_map(|s| e_pos.get(s.as_str()).copied())
                .collect()
        })
        .collect();
    let mut remaining: Vec<usize> = (0..e_messages.len()).collect();
    let mut placed = vec![false; e_messages.len()];
    let mut order = Vec::with_capacity(e_messages.len());
    while !remaining.is_empty() {
        let next = remaining
            .iter()
            .position(|&i| deps[i].iter().all(|&d| placed[d]))?;
        let idx = remaining.remove(next);
        placed[idx] = true;
        order.push(e_messages[idx].clone());
    }
    Some(order)
}

/// Lists every currently problematic incidence without rewriting,
/// ordered by case number and then by the engine's processing order.
pub fn classify_problematic_cases(
    inst: &IndexInstance,
    partition: &Partition,
) -> Result<Vec<CaseInstance>> {
    let engine = Engine::new(inst, partition);
    let mut out = Vec::new();
    for m in &engine.inst.messages {
        if engine.e_set.contains(m) {
            continue;
        }
        let (links, terms) = engine.holders_split(m);
        if terms.is_empty() {
            continue;
        }
        let case = if !links.is_empty() {
            3
        } else if terms.len() == 1 {
            1
        } else {
            2
        };
        let mut participants = vec![m.clone()];
        participants.extend(links.iter().map(|r| r.id.clone()));
        participants.extend(terms.iter().map(|r| r.id.clone()));
        out.push(CaseInstance { case, participants });
    }
    let order = dependency_order(&engine.inst, &engine.e_messages, &engine.wanter_of)
        .ok_or_else(|| {
            Error::InvalidInstance(
                "edge-part messages and their receivers contain a directed cycle".into(),
            )
        })?;
    for m in &order {
        let (links, terms) = engine.holders_split(m);
        let case = if !links.is_empty() && !terms.is_empty() {
            4
        } else if links.len() >= 2 && links[1..].iter().any(|r| r.side_info != links[0].side_info)
        {
            5
        } else if terms.len() >= 2
            && terms[1..]
                .iter()
                .any(|r| r.side_info != terms[0].side_info || r.delta != terms[0].delta)
        {
            6
        } else {
            continue;
        };
        let mut participants = vec![m.clone()];
        participants.extend(links.iter().map(|r| r.id.clone()));
        participants.extend(terms.iter().map(|r| r.id.clone()));
        out.push(CaseInstance { case, participants });
    }
    for r in &engine.inst.receivers {
        if !engine.is_link(&r.id) {
            continue;
        }
        let holds_e = r.side_info.iter().any(|m| engine.e_set.contains(m));
        let s_held: Vec<&MessageId> = r
            .side_info
            .iter()
            .filter(|m| !engine.e_set.contains(*m))
            .collect();
        if holds_e && !s_held.is_empty() {
            let mut participants = vec![r.id.clone()];
            participants.extend(s_held.into_iter().cloned());
            out.push(CaseInstance {
                case: 7,
                participants,
            });
        }
    }
    out.sort_by_key(|c| c.case);
    Ok(out)
}

/// Rewrites the graph until no problematic incidence remains. Terminal
/// holdings of source-part messages become fresh relay links; contested
/// edge-part messages get duplicated links; mixed link receivers get
/// relay links for their source-part holdings. The iteration cap only
/// trips on an engine bug.
pub fn modify_side_info_graph(
    inst: &IndexInstance,
    partition: &Partition,
) -> Result<ModifyReport> {
    assert!(
        inst.is_single_demand(),
        "rewriting requires a single-demand instance"
    );
    let mut engine = Engine::new(inst, partition);
    let cap = 10 * (inst.messages.len() + inst.receivers.len());
    let mut steps = Vec::new();
    let mut duplicated = Vec::new();
    let mut iterations = 0;
    loop {
        let Some(pending) = engine.find_pending()? else {
            break;
        };
        iterations += 1;
        if iterations > cap {
            return Err(Error::IterationCapExceeded);
        }
        match pending {
            Pending::Relay {
                case,
                source,
                holder,
            } => {
                let fresh = engine.add_fresh(&source, vec![source.clone()], 0);
                engine.repoint(&holder, &source, &fresh);
                steps.push(RewriteStep {
                    case,
                    kind: RewriteKind::Relay,
                    fresh_message: fresh.clone(),
                    fresh_receiver: fresh.clone(),
                    paired_with: source.clone(),
                    repointed: holder.clone(),
                    deleted_edge: (holder.clone(), source),
                    added_edge: (holder, fresh),
                });
            }
            Pending::Dup {
                case,
                message,
                repoint,
            } => {
                let wanter_id = engine.wanter_of[&message].clone();
                let wanter = engine.inst.receiver(&wanter_id).unwrap();
                let side = wanter.side_info.clone();
                let delta = wanter.delta;
                let fresh = engine.add_fresh(&message, side, delta);
                engine.repoint(&repoint, &message, &fresh);
                duplicated.push((fresh.clone(), message.clone()));
                steps.push(RewriteStep {
                    case,
                    kind: RewriteKind::Duplicate,
                    fresh_message: fresh.clone(),
                    fresh_receiver: fresh.clone(),
                    paired_with: message.clone(),
                    repointed: repoint.clone(),
                    deleted_edge: (repoint.clone(), message),
                    added_edge: (repoint, fresh),
                });
            }
            Pending::Mixed { receiver, source } => {
                let fresh = engine.add_fresh(&source, vec![source.clone()], 0);
                engine.repoint(&receiver, &source, &fresh);
                steps.push(RewriteStep {
                    case: 7,
                    kind: RewriteKind::Relay,
                    fresh_message: fresh.clone(),
                    fresh_receiver: fresh.clone(),
                    paired_with: source.clone(),
                    repointed: receiver.clone(),
                    deleted_edge: (receiver.clone(), source),
                    added_edge: (receiver, fresh),
                });
            }
        }
    }
    Ok(ModifyReport {
        modified: engine.inst,
        e_prime: engine.e_messages,
        e_receivers: engine.wanter_of,
        duplicated_links: duplicated,
        added_messages: steps.iter().map(|s| s.fresh_message.clone()).collect(),
        added_receivers: steps.iter().map(|s| s.fresh_receiver.clone()).collect(),
        deleted_edges: steps.iter().map(|s| s.deleted_edge.clone()).collect(),
        added_edges: steps.iter().map(|s| s.added_edge.clone()).collect(),
        steps,
    })
}

/// Undoes every rewrite, returning the graph the engine started from
/// (the split instance).
pub fn reduce_modified(report: &ModifyReport) -> IndexInstance {
    let mut inst = report.modified.clone();
    for step in report.steps.iter().rev() {
        let (receiver, original) = &step.deleted_edge;
        if let Some(r) = inst.receivers.iter_mut().find(|r| &r.id == receiver) {
            if let Some(slot) = r
                .side_info
                .iter_mut()
                .find(|m| *m == &step.fresh_message)
            {
                *slot = original.clone();
            }
        }
        inst.receivers.retain(|r| r.id != step.fresh_receiver);
        inst.messages.retain(|m| m != &step.fresh_message);
    }
    inst
}

/// Full index → network conversion bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcToNcReport {
    pub split: IndexInstance,
    /// Split receiver id → original receiver id.
    pub split_origin: HashMap<ReceiverId, ReceiverId>,
    pub partition: Partition,
    pub modify: ModifyReport,
}

/// Converts an index instance to the corresponding network instance:
/// split multi-demand receivers, partition, rewrite, then read the
/// network off the rewritten graph (link receivers become edges grouped
/// into nodes by identical side information; terminal receivers merge
/// into terminals by identical side information and budget).
pub fn ic_to_nc_instance(
    inst: &IndexInstance,
    limits: &Limits,
) -> Result<(NetworkInstance, IcToNcReport)> {
    let verdict = validate_index_instance(inst);
    if !verdict.valid() {
        return Err(Error::InvalidInstance(verdict.violations.join("; ")));
    }
    let (split, split_origin) = split_with_origin(inst);
    let partition = crate::model::find_unicast_acyclic_partition(&split, limits)?;
    let modify = modify_side_info_graph(&split, &partition)?;
    let network = reconstruct_network(&modify, &split_origin)?;
    Ok((
        network,
        IcToNcReport {
            split,
            split_origin,
            partition,
            modify,
        },
    ))
}

fn split_with_origin(inst: &IndexInstance) -> (IndexInstance, HashMap<ReceiverId, ReceiverId>) {
    let split = crate::model::split_multi_demand_receivers(inst);
    let mut origin = HashMap::new();
    let mut cursor = 0;
    for r in &inst.receivers {
        let count = r.wants.len().max(1);
        for _ in 0..count {
            origin.insert(split.receivers[cursor].id.clone(), r.id.clone());
            cursor += 1;
        }
    }
    (split, origin)
}

fn reconstruct_network(
    modify: &ModifyReport,
    split_origin: &HashMap<ReceiverId, ReceiverId>,
) -> Result<NetworkInstance> {
    let inst = &modify.modified;
    let e_set: HashSet<&str> = modify.e_prime.iter().map(|m| m.as_str()).collect();
    let msg_pos: HashMap<&str, usize> = inst
        .messages
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_str(), i))
        .collect();
    let link_ids: HashSet<&String> = modify.e_receivers.values().collect();

    // link receivers: side info must be homogeneous
    #[derive(PartialEq)]
    enum Kind {
        FromSource,
        FromNode,
    }
    let mut edge_kind: HashMap<&str, Kind> = HashMap::new();
    for e in &modify.e_prime {
        let r = inst.receiver(&modify.e_receivers[e]).unwrap();
        if r.side_info.is_empty() {
            return Err(Error::InvalidInstance(format!(
                "link receiver `{}` has no side information; the corresponding link would have no inputs",
                r.id
            )));
        }
        let e_kinds: Vec<bool> = r
            .side_info
            .iter()
            .map(|m| e_set.contains(m.as_str()))
            .collect();
        if e_kinds.iter().all(|&k| k) {
            edge_kind.insert(e.as_str(), Kind::FromNode);
        } else if e_kinds.iter().all(|&k| !k) {
            edge_kind.insert(e.as_str(), Kind::FromSource);
        } else {
            return Err(Error::InvalidInstance(format!(
                "link receiver `{}` still holds mixed message kinds after rewriting",
                r.id
            )));
        }
    }

    let mut taken: HashSet<String> = inst.messages.iter().cloned().collect();

    // terminals: group terminal receivers by (side info, delta)
    let mut terminal_groups: Vec<(Vec<MessageId>, usize, Vec<&Receiver>)> = Vec::new();
    for r in &inst.receivers {
        if link_ids.contains(&r.id) {
            continue;
        }
        if r.side_info.is_empty() {
            return Err(Error::InvalidInstance(format!(
                "terminal receiver `{}` has no side information; the corresponding terminal would have no incoming links",
                r.id
            )));
        }
        if r.side_info.iter().any(|m| !e_set.contains(m.as_str())) {
            return Err(Error::InvalidInstance(format!(
                "terminal receiver `{}` still holds a source-part message after rewriting",
                r.id
            )));
        }
        match terminal_groups
            .iter_mut()
            .find(|(side, delta, _)| side == &r.side_info && *delta == r.delta)
        {
            Some((_, _, members)) => members.push(r),
            None => terminal_groups.push((r.side_info.clone(), r.delta, vec![r])),
        }
    }
    let mut terminals = Vec::new();
    let mut terminal_node_of_group: Vec<String> = Vec::new();
    for (side, delta, members) in &terminal_groups {
        let origins: Vec<&ReceiverId> = members
            .iter()
            .map(|r| split_origin.get(&r.id).unwrap_or(&r.id))
            .collect();
        let base = if origins.iter().all(|o| *o == origins[0]) {
            origins[0].clone()
        } else {
            members[0].id.clone()
        };
        let node = if taken.contains(&base) {
            fresh_id(&base, &taken)
        } else {
            base
        };
        taken.insert(node.clone());
        let mut demands = Vec::new();
        for r in members {
            for w in &r.wants {
                if !demands.contains(w) {
                    demands.push(w.clone());
                }
            }
        }
        terminals.push(Terminal {
            node: node.clone(),
            demands,
            delta: *delta,
        });
        terminal_node_of_group.push(node);
        let _ = side;
    }

    // internal nodes: group edge-fed link receivers by exact side info
    let mut internal_groups: Vec<(Vec<MessageId>, String)> = Vec::new();
    let mut source_groups: Vec<(Vec<MessageId>, Vec<&str>)> = Vec::new(); // (owned, member edges)
    let mut tail_of: HashMap<&str, String> = HashMap::new();
    let mut counter = 0usize;
    for e in &modify.e_prime {
        let r = inst.receiver(&modify.e_receivers[e]).unwrap();
        match edge_kind[e.as_str()] {
            Kind::FromNode => {
                let node = match internal_groups.iter().find(|(side, _)| side == &r.side_info) {
                    Some((_, node)) => node.clone(),
                    None => {
                        counter += 1;
                        let mut name = format!("n{counter}");
                        while taken.contains(&name) {
                            name.push('\'');
                        }
                        taken.insert(name.clone());
                        internal_groups.push((r.side_info.clone(), name.clone()));
                        name
                    }
                };
                tail_of.insert(e.as_str(), node);
            }
            Kind::FromSource => {
                match source_groups.iter_mut().find(|(owned, _)| owned == &r.side_info) {
                    Some((_, members)) => members.push(e.as_str()),
                    None => source_groups.push((r.side_info.clone(), vec![e.as_str()])),
                }
            }
        }
    }
    // orphan source-part messages owned by nobody become their own sources
    let covered: HashSet<String> = source_groups
        .iter()
        .flat_map(|(owned, _)| owned.iter().cloned())
        .collect();
    for m in &inst.messages {
        if !e_set.contains(m.as_str()) && !covered.contains(m.as_str()) {
            source_groups.push((vec![m.clone()], Vec::new()));
        }
    }
    // stable source order: by owned-message declaration indices
    source_groups.sort_by_key(|(owned, _)| {
        owned
            .iter()
            .map(|m| msg_pos[m.as_str()])
            .collect::<Vec<_>>()
    });
    let mut sources = Vec::new();
    let mut source_counter = 0usize;
    for (owned, members) in &source_groups {
        source_counter += 1;
        let mut name = format!("u{source_counter}");
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        for e in members {
            tail_of.insert(e, name.clone());
        }
        sources.push(SourceNode {
            node: name,
            messages: owned.clone(),
        });
    }

    // heads: the unique consumer of each edge-part message
    let mut head_of: HashMap<&str, String> = HashMap::new();
    let mut chain_of: HashMap<&str, (usize, usize)> = HashMap::new(); // (chain id, position)
    let mut chains: Vec<Vec<MessageId>> = Vec::new();
    for (side, node) in &internal_groups {
        let chain_id = chains.len();
        for (pos, m) in side.iter().enumerate() {
            if head_of.insert(m.as_str(), node.clone()).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "link `{m}` is consumed by more than one node after rewriting"
                )));
            }
            chain_of.insert(m.as_str(), (chain_id, pos));
        }
        chains.push(side.clone());
    }
    for ((side, _, _), node) in terminal_groups.iter().zip(&terminal_node_of_group) {
        let chain_id = chains.len();
        for (pos, m) in side.iter().enumerate() {
            if head_of.insert(m.as_str(), node.clone()).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "link `{m}` is consumed by more than one node after rewriting"
                )));
            }
            chain_of.insert(m.as_str(), (chain_id, pos));
        }
        chains.push(side.clone());
    }
    let mut dummy_counter = 0usize;
    let mut dummies = Vec::new();
    for e in &modify.e_prime {
        if !head_of.contains_key(e.as_str()) {
            dummy_counter += 1;
            let mut name = format!("d{dummy_counter}");
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            head_of.insert(e.as_str(), name.clone());
            dummies.push(name);
        }
    }

    // edge declaration order: earliest-declared message whose chain
    // predecessors are all placed
    let mut placed: HashSet<&str> = HashSet::new();
    let mut edge_order: Vec<&str> = Vec::new();
    while edge_order.len() < modify.e_prime.len() {
        let next = modify
            .e_prime
            .iter()
            .map(|m| m.as_str())
            .find(|m| {
                if placed.contains(m) {
                    return false;
                }
                match chain_of.get(m) {
                    None => true,
                    Some(&(chain, pos)) => chains[chain][..pos]
                        .iter()
                        .all(|p| placed.contains(p.as_str())),
                }
            })
            .expect("consumer chains are disjoint, so some edge is always ready");
        placed.insert(next);
        edge_order.push(next);
    }

    let edges: Vec<Edge> = edge_order
        .iter()
        .map(|e| {
            let r = inst.receiver(&modify.e_receivers[*e]).unwrap();
            Edge {
                id: (*e).to_string(),
                tail: tail_of[e].clone(),
                head: head_of[e].clone(),
                delta: r.delta,
            }
        })
        .collect();

    let mut nodes: Vec<String> = sources.iter().map(|s| s.node.clone()).collect();
    nodes.extend(internal_groups.iter().map(|(_, n)| n.clone()));
    nodes.extend(dummies);
    nodes.extend(terminals.iter().map(|t| t.node.clone()));

    Ok(NetworkInstance {
        field: inst.field.clone(),
        nodes,
        edges,
        sources,
        terminals,
    })
}

/// Extends a valid code on the original graph to one on the rewritten
/// graph: one extra component per rewrite, pairing the fresh message with
/// the message it stands in for.
pub fn extend_ic_code(
    original: &IndexInstance,
    code: &IndexCode,
    modify: &ModifyReport,
    limits: &Limits,
) -> Result<IndexCode> {
    match validate_icsie(original, code, limits)? {
        crate::icsie::IcsieOutcome::Valid => {}
        crate::icsie::IcsieOutcome::Invalid(w) => {
            return Err(Error::InvalidIndexCode(format!(
                "confusable difference {:?} is not separated on the original graph",
                w.z
            )));
        }
    }
    let field = &original.field;
    let modified = &modify.modified;
    let n_new = modified.n();
    let pos: HashMap<&str, usize> = modified
        .messages
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_str(), i))
        .collect();
    let pairs: Vec<(usize, usize)> = modify
        .steps
        .iter()
        .map(|s| (pos[s.fresh_message.as_str()], pos[s.paired_with.as_str()]))
        .collect();
    match &code.repr {
        IndexCodeRepr::Linear { matrix } => {
            let mut out = vec![vec![0u8; code.length + pairs.len()]; n_new];
            for (i, row) in matrix.iter().enumerate() {
                out[i][..code.length].copy_from_slice(row);
            }
            for (j, &(fresh, paired)) in pairs.iter().enumerate() {
                out[fresh][code.length + j] = 1;
                out[paired][code.length + j] = 1;
            }
            Ok(IndexCode::linear(out))
        }
        IndexCodeRepr::Table { rows } => {
            let total = vector_space_size(field.q(), n_new);
            limits.check(total)?;
            let mut out = Vec::with_capacity(total as usize);
            for idx in 0..total as usize {
                let x = field.vector_from_index(idx, n_new);
                let mut row = rows[field.vector_index(&x[..code.n])].clone();
                for &(fresh, paired) in &pairs {
                    row.push(field.add(x[fresh], x[paired]));
                }
                out.push(row);
            }
            Ok(IndexCode {
                n: n_new,
                length: code.length + pairs.len(),
                repr: IndexCodeRepr::Table { rows: out },
            })
        }
    }
}

/// True when the first map factors through the second: equal outputs of
/// `via` always yield equal outputs of `dependent`.
pub fn check_functional_dependence(dependent: &[Symbol], via: &[Symbol]) -> bool {
    debug_assert_eq!(dependent.len(), via.len());
    let mut image: HashMap<Symbol, Symbol> = HashMap::new();
    for (&d, &v) in dependent.iter().zip(via) {
        match image.entry(v) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(d);
            }
            std::collections::hash_map::Entry::Occupied(e) => {
                if *e.get() != d {
                    return false;
                }
            }
        }
    }
    true
}

/// Converts a valid network code on the rewritten graph's network down to
/// an index code on the original graph: build the full converted code,
/// check that every duplicated link's global map factors through its
/// original's, then keep only the components of the original links.
pub fn restrict_nc_code_to_ic_code(
    network: &NetworkInstance,
    code: &NetworkCode,
    report: &IcToNcReport,
    original: &IndexInstance,
    limits: &Limits,
) -> Result<IndexCode> {
    let ncle_report = validate_ncle(network, code, Quantification::Reachable, limits)?;
    if !ncle_report.valid() {
        return Err(Error::InvalidNetworkCode(describe_ncle_failure(&ncle_report)));
    }
    let tables = crate::code::global_tables(network, code, limits)?;
    let edge_pos: HashMap<&str, usize> = network
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), i))
        .collect();
    for (dup, orig) in &report.modify.duplicated_links {
        let d = &tables[edge_pos[dup.as_str()]];
        let o = &tables[edge_pos[orig.as_str()]];
        if !check_functional_dependence(d, o) {
            return Err(Error::DependenceViolated {
                dup: dup.clone(),
                orig: orig.clone(),
            });
        }
    }

    let full = nc_code_to_ic_code_unchecked(network, code, limits)?;
    let (converted, _) = nc_to_ic_instance_unchecked(network);
    let full_pos: HashMap<&str, usize> = converted
        .messages
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_str(), i))
        .collect();
    // keep the components of the original edge-part messages, in the
    // original partition order
    let kept: Vec<usize> = report
        .partition
        .e_messages
        .iter()
        .map(|e| edge_pos[e.as_str()])
        .collect();

    let restricted = match &full.repr {
        IndexCodeRepr::Linear { matrix } => {
            let mut out = vec![vec![0u8; kept.len()]; original.n()];
            for (i, m) in original.messages.iter().enumerate() {
                let row = &matrix[full_pos[m.as_str()]];
                for (j, &col) in kept.iter().enumerate() {
                    out[i][j] = row[col];
                }
            }
            // components of original links must not involve fresh messages
            for step in &report.modify.steps {
                let row = &matrix[full_pos[step.fresh_message.as_str()]];
                for &col in &kept {
                    if row[col] != 0 {
                        return Err(Error::InvalidIndexCode(format!(
                            "component for a kept link depends on added message `{}`",
                            step.fresh_message
                        )));
                    }
                }
            }
            IndexCode::linear(out)
        }
        IndexCodeRepr::Table { rows } => {
            let field = &original.field;
            let total = vector_space_size(field.q(), original.n());
            limits.check(total)?;
            let mut out = Vec::with_capacity(total as usize);
            for idx in 0..total as usize {
                let x = field.vector_from_index(idx, original.n());
                let mut embedded = vec![0u8; converted.messages.len()];
                for (i, m) in original.messages.iter().enumerate() {
                    embedded[full_pos[m.as_str()]] = x[i];
                }
                let row = &rows[field.vector_index(&embedded)];
                out.push(kept.iter().map(|&c| row[c]).collect());
            }
            IndexCode {
                n: original.n(),
                length: kept.len(),
                repr: IndexCodeRepr::Table { rows: out },
            }
        }
    };

    match validate_icsie(original, &restricted, limits)? {
        crate::icsie::IcsieOutcome::Valid => Ok(restricted),
        crate::icsie::IcsieOutcome::Invalid(w) => Err(Error::InvalidIndexCode(format!(
            "restricted code fails on the original graph at difference {:?}",
            w.z
        ))),
    }
}
