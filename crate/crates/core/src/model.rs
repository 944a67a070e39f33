//! Data model and structural validation for network coding instances and
//! index coding instances (side-information graphs).
//!
//! Identifiers are opaque strings; index positions derive from declaration
//! order throughout. Instances are immutable after construction and all
//! operations here are pure.

use std::collections::{HashMap, HashSet};

use crate::field::{FieldSpec, SymbolVector};
use crate::{Limits, Result};

pub type NodeId = String;
pub type EdgeId = String;
pub type MessageId = String;
pub type ReceiverId = String;

/// A directed link with its error-resistance budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: NodeId,
    pub head: NodeId,
    pub delta: usize,
}

/// A source node together with the messages it owns, in declared order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceNode {
    pub node: NodeId,
    pub messages: Vec<MessageId>,
}

/// A terminal node with its demand set and error-resistance budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terminal {
    pub node: NodeId,
    pub demands: Vec<MessageId>,
    pub delta: usize,
}

/// A network coding instance: DAG, source messages, terminal demands, and
/// the per-edge / per-terminal error-resistance vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkInstance {
    pub field: FieldSpec,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<Edge>,
    pub sources: Vec<SourceNode>,
    pub terminals: Vec<Terminal>,
}

/// The ordered inputs of an edge's tail node: incoming edges for internal
/// nodes, owned messages for source nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSet {
    Messages(Vec<MessageId>),
    Edges(Vec<EdgeId>),
}

impl InputSet {
    pub fn len(&self) -> usize {
        match self {
            InputSet::Messages(v) => v.len(),
            InputSet::Edges(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The referenced ids, regardless of kind.
    pub fn ids(&self) -> &[String] {
        match self {
            InputSet::Messages(v) => v,
            InputSet::Edges(v) => v,
        }
    }
}

/// One receiver of an index coding instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receiver {
    pub id: ReceiverId,
    pub wants: Vec<MessageId>,
    pub side_info: Vec<MessageId>,
    pub delta: usize,
}

/// An index coding instance: a side-information graph plus the
/// per-receiver error-resistance vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexInstance {
    pub field: FieldSpec,
    pub messages: Vec<MessageId>,
    pub receivers: Vec<Receiver>,
}

/// Split of an index instance's messages into a network-edge-like part
/// `E` (unicast, induced subgraph acyclic) and the remaining part `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub e_messages: Vec<MessageId>,
    pub s_messages: Vec<MessageId>,
    /// For each message in `e_messages`, the id of its unique receiver.
    pub e_receivers: HashMap<MessageId, ReceiverId>,
    pub t_receivers: Vec<ReceiverId>,
}

/// Outcome of a structural validation: valid iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl Verdict {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl NetworkInstance {
    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn source_at(&self, node: &str) -> Option<&SourceNode> {
        self.sources.iter().find(|s| s.node == node)
    }

    pub fn terminal_at(&self, node: &str) -> Option<&Terminal> {
        self.terminals.iter().find(|t| t.node == node)
    }

    /// Incoming edges of a node, in edge declaration order.
    pub fn in_edges(&self, node: &str) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.head == node).collect()
    }

    /// Outgoing edges of a node, in edge declaration order.
    pub fn out_edges(&self, node: &str) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.tail == node).collect()
    }

    /// The source message list `S`, in declaration order (first occurrence
    /// wins if ownership overlaps).
    pub fn messages(&self) -> Vec<MessageId> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for s in &self.sources {
            for m in &s.messages {
                if seen.insert(m.clone()) {
                    out.push(m.clone());
                }
            }
        }
        out
    }

    /// `In(e)`: ordered inputs of the tail of `e`.
    pub fn input_set(&self, edge_id: &str) -> Option<InputSet> {
        let edge = self.edge(edge_id)?;
        if let Some(src) = self.source_at(&edge.tail) {
            Some(InputSet::Messages(src.messages.clone()))
        } else {
            Some(InputSet::Edges(
                self.in_edges(&edge.tail).iter().map(|e| e.id.clone()).collect(),
            ))
        }
    }

    /// `In(t)`: ordered incoming edges of a terminal node.
    pub fn terminal_inputs(&self, node: &str) -> Vec<EdgeId> {
        self.in_edges(node).iter().map(|e| e.id.clone()).collect()
    }

    /// `δ_v`: the smallest error-resistance budget among a node's outgoing
    /// edges, or `None` if the node has no outgoing edges.
    pub fn node_delta(&self, node: &str) -> Option<usize> {
        self.out_edges(node).iter().map(|e| e.delta).min()
    }

    /// Node ids in a topological order (stable: ready nodes are taken in
    /// declaration order), or the id of a node on a cycle.
    pub fn topo_order(&self) -> std::result::Result<Vec<NodeId>, NodeId> {
        let idx: HashMap<&str, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            if let Some(&h) = idx.get(e.head.as_str()) {
                indegree[h] += 1;
            }
        }
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut done = vec![false; self.nodes.len()];
        loop {
            let Some(next) = (0..self.nodes.len()).find(|&i| !done[i] && indegree[i] == 0)
            else {
                break;
            };
            done[next] = true;
            order.push(self.nodes[next].clone());
            for e in &self.edges {
                if e.tail == self.nodes[next] {
                    if let Some(&h) = idx.get(e.head.as_str()) {
                        indegree[h] -= 1;
                    }
                }
            }
        }
        if order.len() == self.nodes.len() {
            Ok(order)
        } else {
            let stuck = (0..self.nodes.len()).find(|&i| !done[i]).unwrap();
            Err(self.nodes[stuck].clone())
        }
    }

    /// Renames non-terminal nodes to content-derived names so that two
    /// instances that differ only in internal node labels compare equal.
    /// Sources become `s:<owned messages>`, internal nodes
    /// `v:<incoming edge ids>`, terminals keep their id (it is carried
    /// into and out of the index-coding side).
    pub fn canonical_form(&self) -> NetworkInstance {
        let mut rename: HashMap<NodeId, NodeId> = HashMap::new();
        let mut used: HashSet<NodeId> = HashSet::new();
        for node in &self.nodes {
            let base = if self.terminal_at(node).is_some() {
                node.clone()
            } else if let Some(src) = self.source_at(node) {
                format!("s:{}", src.messages.join(","))
            } else {
                let ins = self.in_edges(node);
                if !ins.is_empty() {
                    format!(
                        "v:{}",
                        ins.iter().map(|e| e.id.as_str()).collect::<Vec<_>>().join(",")
                    )
                } else {
                    let outs = self.out_edges(node);
                    if !outs.is_empty() {
                        format!(
                            "u:{}",
                            outs.iter().map(|e| e.id.as_str()).collect::<Vec<_>>().join(",")
                        )
                    } else {
                        format!("iso:{node}")
                    }
                }
            };
            let mut name = base.clone();
            let mut k = 2;
            while !used.insert(name.clone()) {
                name = format!("{base}#{k}");
                k += 1;
            }
            rename.insert(node.clone(), name);
        }
        let mut nodes: Vec<NodeId> = self.nodes.iter().map(|n| rename[n].clone()).collect();
        nodes.sort();
        let mut sources: Vec<SourceNode> = self
            .sources
            .iter()
            .map(|s| SourceNode {
                node: rename[&s.node].clone(),
                messages: s.messages.clone(),
            })
            .collect();
        sources.sort_by(|a, b| a.node.cmp(&b.node));
        let mut terminals: Vec<Terminal> = self
            .terminals
            .iter()
            .map(|t| Terminal {
                node: rename[&t.node].clone(),
                demands: t.demands.clone(),
                delta: t.delta,
            })
            .collect();
        terminals.sort_by(|a, b| a.node.cmp(&b.node));
        NetworkInstance {
            field: self.field.clone(),
            nodes,
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    id: e.id.clone(),
                    tail: rename[&e.tail].clone(),
                    head: rename[&e.head].clone(),
                    delta: e.delta,
                })
                .collect(),
            sources,
            terminals,
        }
    }

    /// Equality up to internal node labels (edge ids, message ids,
    /// terminal ids, declaration orders, and deltas all significant).
    pub fn structurally_eq(&self, other: &NetworkInstance) -> bool {
        self.canonical_form() == other.canonical_form()
    }
}

impl IndexInstance {
    pub fn n(&self) -> usize {
        self.messages.len()
    }

    pub fn message_index(&self, id: &str) -> Option<usize> {
        self.messages.iter().position(|m| m == id)
    }

    pub fn receiver(&self, id: &str) -> Option<&Receiver> {
        self.receivers.iter().find(|r| r.id == id)
    }

    /// Indices (into `messages`) of a receiver's side information.
    pub fn side_indices(&self, r: &Receiver) -> Vec<usize> {
        r.side_info
            .iter()
            .filter_map(|m| self.message_index(m))
            .collect()
    }

    /// Indices (into `messages`) of a receiver's wanted messages.
    pub fn want_indices(&self, r: &Receiver) -> Vec<usize> {
        r.wants.iter().filter_map(|m| self.message_index(m)).collect()
    }

    /// Sub-vector of `x` at a receiver's side-information coordinates.
    pub fn side_subvector(&self, r: &Receiver, x: &[u8]) -> SymbolVector {
        self.side_indices(r).iter().map(|&i| x[i]).collect()
    }

    /// Receivers wanting a given message.
    pub fn wanters(&self, message: &str) -> Vec<&Receiver> {
        self.receivers
            .iter()
            .filter(|r| r.wants.iter().any(|w| w == message))
            .collect()
    }

    /// Receivers holding a given message as side information.
    pub fn holders(&self, message: &str) -> Vec<&Receiver> {
        self.receivers
            .iter()
            .filter(|r| r.side_info.iter().any(|m| m == message))
            .collect()
    }

    /// True when every receiver wants exactly one message.
    pub fn is_single_demand(&self) -> bool {
        self.receivers.iter().all(|r| r.wants.len() == 1)
    }
}

/// Structural validation of a network instance.
pub fn validate_network_instance(inst: &NetworkInstance) -> Verdict {
    let mut v = Vec::new();
    let warnings = Vec::new();

    let mut node_set = HashSet::new();
    for n in &inst.nodes {
        if !node_set.insert(n.clone()) {
            v.push(format!("duplicate node id `{n}`"));
        }
    }
    let mut edge_set = HashSet::new();
    for e in &inst.edges {
        if !edge_set.insert(e.id.clone()) {
            v.push(format!("duplicate edge id `{}`", e.id));
        }
        if node_set.contains(&e.id) {
            v.push(format!("edge id `{}` collides with a node id", e.id));
        }
        for endpoint in [&e.tail, &e.head] {
            if !node_set.contains(endpoint) {
                v.push(format!("edge `{}` references unknown node `{endpoint}`", e.id));
            }
        }
    }
    let mut message_set = HashSet::new();
    for s in &inst.sources {
        if !node_set.contains(&s.node) {
            v.push(format!("source entry references unknown node `{}`", s.node));
        }
        for m in &s.messages {
            if !message_set.insert(m.clone()) {
                v.push(format!("message `{m}` owned more than once"));
            }
            if edge_set.contains(m) {
                v.push(format!("message id `{m}` collides with an edge id"));
            }
            if node_set.contains(m) {
                v.push(format!("message id `{m}` collides with a node id"));
            }
        }
    }
    let source_nodes: HashSet<&str> = inst.sources.iter().map(|s| s.node.as_str()).collect();
    if source_nodes.len() != inst.sources.len() {
        v.push("a node appears more than once in the source list".into());
    }
    let terminal_nodes: HashSet<&str> = inst.terminals.iter().map(|t| t.node.as_str()).collect();
    if terminal_nodes.len() != inst.terminals.len() {
        v.push("a node appears more than once in the terminal list".into());
    }

    for s in &inst.sources {
        if !inst.in_edges(&s.node).is_empty() {
            v.push(format!("source node `{}` has incoming edges", s.node));
        }
    }
    for t in &inst.terminals {
        if !node_set.contains(&t.node) {
            v.push(format!("terminal entry references unknown node `{}`", t.node));
        }
        if !inst.out_edges(&t.node).is_empty() {
            v.push(format!("terminal node `{}` has outgoing edges", t.node));
        }
        if t.demands.is_empty() {
            v.push(format!("terminal `{}` demands nothing", t.node));
        }
        let mut seen = HashSet::new();
        for d in &t.demands {
            if !message_set.contains(d) {
                v.push(format!(
                    "terminal `{}` demands `{d}`, which is not a source message",
                    t.node
                ));
            }
            if !seen.insert(d) {
                v.push(format!("terminal `{}` demands `{d}` twice", t.node));
            }
        }
        if inst.terminal_inputs(&t.node).is_empty() {
            v.push(format!("terminal `{}` has no incoming edges", t.node));
        }
    }

    if let Err(node) = inst.topo_order() {
        v.push(format!("graph is not acyclic (cycle through `{node}`)"));
    }

    for e in &inst.edges {
        match inst.input_set(&e.id) {
            Some(set) if set.is_empty() => {
                v.push(format!("edge `{}` has an empty input set", e.id));
            }
            _ => {}
        }
    }

    Verdict {
        violations: v,
        warnings,
    }
}

/// Structural validation of an index instance.
pub fn validate_index_instance(inst: &IndexInstance) -> Verdict {
    let mut v = Vec::new();
    let warnings = Vec::new();

    let mut message_set = HashSet::new();
    for m in &inst.messages {
        if !message_set.insert(m.clone()) {
            v.push(format!("duplicate message id `{m}`"));
        }
    }
    let mut receiver_set = HashSet::new();
    for r in &inst.receivers {
        if !receiver_set.insert(r.id.clone()) {
            v.push(format!("duplicate receiver id `{}`", r.id));
        }
        if r.wants.is_empty() {
            v.push(format!("receiver `{}` wants nothing", r.id));
        }
        let mut wants_seen = HashSet::new();
        for w in &r.wants {
            if !message_set.contains(w) {
                v.push(format!("receiver `{}` wants unknown message `{w}`", r.id));
            }
            if !wants_seen.insert(w) {
                v.push(format!("receiver `{}` wants `{w}` twice", r.id));
            }
        }
        let mut side_seen = HashSet::new();
        for m in &r.side_info {
            if !message_set.contains(m) {
                v.push(format!(
                    "receiver `{}` holds unknown message `{m}` as side information",
                    r.id
                ));
            }
            if !side_seen.insert(m) {
                v.push(format!("receiver `{}` holds `{m}` twice", r.id));
            }
            if wants_seen.contains(m) {
                v.push(format!(
                    "receiver `{}` both wants and holds `{m}`",
                    r.id
                ));
            }
        }
    }

    Verdict {
        violations: v,
        warnings,
    }
}

/// Picks an id based on `base` that does not collide with anything in
/// `taken`, by appending prime marks.
pub fn fresh_id(base: &str, taken: &HashSet<String>) -> String {
    let mut candidate = format!("{base}'");
    while taken.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Rewrites every multi-demand receiver into one receiver per wanted
/// message, with identical side information and delta. Order: original
/// receiver order, then wanted-message order. Single-demand receivers
/// keep their ids; split receivers get `<id>:<message>` ids
/// (collision-extended with prime marks if needed).
pub fn split_multi_demand_receivers(inst: &IndexInstance) -> IndexInstance {
    let mut taken: HashSet<String> = inst.receivers.iter().map(|r| r.id.clone()).collect();
    let mut receivers = Vec::new();
    for r in &inst.receivers {
        if r.wants.len() <= 1 {
            receivers.push(r.clone());
            continue;
        }
        for w in &r.wants {
            let base = format!("{}:{}", r.id, w);
            let id = if taken.contains(&base) {
                fresh_id(&base, &taken)
            } else {
                base
            };
            taken.insert(id.clone());
            receivers.push(Receiver {
                id,
                wants: vec![w.clone()],
                side_info: r.side_info.clone(),
                delta: r.delta,
            });
        }
    }
    IndexInstance {
        field: inst.field.clone(),
        messages: inst.messages.clone(),
        receivers,
    }
}

/// Finds the maximum-cardinality set of unicast messages whose induced
/// subgraph (messages, their unique wanting receivers, and the connecting
/// edges) is acyclic, preferring the lexicographically smallest kept set
/// (by declaration index) among ties. Requires a single-demand instance.
pub fn find_unicast_acyclic_partition(
    inst: &IndexInstance,
    limits: &Limits,
) -> Result<Partition> {
    assert!(
        inst.is_single_demand(),
        "partition requires a single-demand instance"
    );
    // unicast messages in declaration order
    let unicast: Vec<usize> = (0..inst.messages.len())
        .filter(|&i| inst.wanters(&inst.messages[i]).len() == 1)
        .collect();
    let u = unicast.len();
    limits.check(crate::field::vector_space_size(2, u))?;

    // adjacency among unicast candidates: m -> m' iff the receiver
    // wanting m holds m'
    let holds: Vec<Vec<usize>> = unicast
        .iter()
        .map(|&mi| {
            let r = inst.wanters(&inst.messages[mi])[0];
            r.side_info
                .iter()
                .filter_map(|s| inst.message_index(s))
                .filter_map(|si| unicast.iter().position(|&x| x == si))
                .collect()
        })
        .collect();

    let acyclic = |kept: &[usize]| -> bool {
        // Kahn over the induced sub-digraph; `kept` indexes into `unicast`
        let in_kept: Vec<bool> = {
            let mut flags = vec![false; u];
            for &k in kept {
                flags[k] = true;
            }
            flags
        };
        let mut indeg = vec![0usize; u];
        for &k in kept {
            for &h in &holds[k] {
                if in_kept[h] {
                    indeg[h] += 1;
                }
            }
        }
        let mut removed = 0;
        let mut queue: Vec<usize> = kept.iter().copied().filter(|&k| indeg[k] == 0).collect();
        while let Some(k) = queue.pop() {
            removed += 1;
            for &h in &holds[k] {
                if in_kept[h] {
                    indeg[h] -= 1;
                    if indeg[h] == 0 {
                        queue.push(h);
                    }
                }
            }
        }
        removed == kept.len()
    };

    // Largest kept set first; ties prefer the lexicographically smallest
    // EXCLUDED set (by declaration index), so earlier-declared messages
    // are dropped first. Converted instances declare source messages
    // before edge messages, which makes the edge part win its ties.
    let mut chosen: Vec<usize> = Vec::new();
    'sizes: for size in (0..=u).rev() {
        let mut excluded: Vec<usize> = (0..u - size).collect();
        loop {
            let kept: Vec<usize> = (0..u).filter(|i| !excluded.contains(i)).collect();
            if acyclic(&kept) {
                chosen = kept;
                break 'sizes;
            }
            if !crate::field::next_combination(&mut excluded, u) {
                break;
            }
        }
    }

    let kept_message_indices: HashSet<usize> = chosen.iter().map(|&k| unicast[k]).collect();
    let mut e_messages = Vec::new();
    let mut s_messages = Vec::new();
    let mut e_receivers = HashMap::new();
    for (i, m) in inst.messages.iter().enumerate() {
        if kept_message_indices.contains(&i) {
            e_messages.push(m.clone());
            e_receivers.insert(m.clone(), inst.wanters(m)[0].id.clone());
        } else {
            s_messages.push(m.clone());
        }
    }
    let e_receiver_ids: HashSet<&String> = e_receivers.values().collect();
    let t_receivers = inst
        .receivers
        .iter()
        .filter(|r| !e_receiver_ids.contains(&r.id))
        .map(|r| r.id.clone())
        .collect();

    Ok(Partition {
        e_messages,
        s_messages,
        e_receivers,
        t_receivers,
    })
}

/// Equality of index instances up to a renaming of message ids given by
/// `message_map` (identity where absent). Message declaration order is
/// significant; receivers are matched as a multiset of
/// (wants, side info, delta) triples with mapped ids.
pub fn index_isomorphic(
    a: &IndexInstance,
    b: &IndexInstance,
    message_map: &HashMap<MessageId, MessageId>,
) -> bool {
    let map = |m: &MessageId| -> MessageId {
        message_map.get(m).cloned().unwrap_or_else(|| m.clone())
    };
    if a.field.q() != b.field.q() {
        return false;
    }
    let mapped_messages: Vec<MessageId> = a.messages.iter().map(map).collect();
    if mapped_messages != b.messages {
        return false;
    }
    if a.receivers.len() != b.receivers.len() {
        return false;
    }
    let key = |wants: &[MessageId], side: &[MessageId], delta: usize| {
        (
            wants.to_vec(),
            side.to_vec(),
            delta,
        )
    };
    let mut from_a: Vec<_> = a
        .receivers
        .iter()
        .map(|r| {
            key(
                &r.wants.iter().map(map).collect::<Vec<_>>(),
                &r.side_info.iter().map(map).collect::<Vec<_>>(),
                r.delta,
            )
        })
        .collect();
    let mut from_b: Vec<_> = b
        .receivers
        .iter()
        .map(|r| key(&r.wants, &r.side_info, r.delta))
        .collect();
    from_a.sort();
    from_b.sort();
    from_a == from_b
}
