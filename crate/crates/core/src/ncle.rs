//! Network-code analysis: per-function error resistance, whole-code
//! validation (delivery plus robustness), redundant links, and the
//! derivation of conventional error-free instances.

use std::collections::BTreeSet;

use crate::code::{eval_global, MultiFunction, NetworkCode};
use crate::field::{
    enumerate_error_patterns, error_pattern_count, vector_space_size, Symbol, SymbolVector,
};
use crate::model::{EdgeId, InputSet, NetworkInstance, NodeId, SourceNode, Terminal};
use crate::{Error, Limits, Result};

/// How robustness quantifies base inputs: over the values actually induced
/// by some source assignment, or over the whole input space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantification {
    #[default]
    Reachable,
    All,
}

/// Witness that a function changes output under an admissible corruption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResistanceWitness {
    pub base: SymbolVector,
    pub corrupted: SymbolVector,
    pub base_output: Vec<Symbol>,
    pub corrupted_output: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResistanceOutcome {
    pub passes: bool,
    pub witness: Option<ResistanceWitness>,
    pub bases_checked: usize,
    pub patterns_checked: usize,
}

/// Checks `f(x) = f(x̃)` for every base `x` and every `x̃` within Hamming
/// distance `delta` of it.
pub fn check_error_resistance(
    field: &crate::field::FieldSpec,
    f: &MultiFunction,
    delta: usize,
    bases: &[SymbolVector],
    limits: &Limits,
) -> Result<ResistanceOutcome> {
    let arity = f.arity();
    let patterns = enumerate_error_patterns(field, arity, delta, limits)?;
    limits.check((bases.len() as u128).saturating_mul(patterns.len() as u128))?;
    for base in bases {
        let expected = f.eval(field, base)?;
        for p in &patterns {
            let corrupted = field.vec_add(base, p);
            let got = f.eval(field, &corrupted)?;
            if got != expected {
                return Ok(ResistanceOutcome {
                    passes: false,
                    witness: Some(ResistanceWitness {
                        base: base.clone(),
                        corrupted,
                        base_output: expected,
                        corrupted_output: got,
                    }),
                    bases_checked: bases.len(),
                    patterns_checked: patterns.len(),
                });
            }
        }
    }
    Ok(ResistanceOutcome {
        passes: true,
        witness: None,
        bases_checked: bases.len(),
        patterns_checked: patterns.len(),
    })
}

/// A delivery failure: a source assignment for which a terminal decodes
/// the wrong demand vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryFailure {
    pub terminal: NodeId,
    pub x_s: SymbolVector,
    pub expected: SymbolVector,
    pub got: SymbolVector,
}

/// Per-function verdicts for a full code validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustnessReport {
    pub delivery_failures: Vec<DeliveryFailure>,
    pub edge_outcomes: Vec<(EdgeId, ResistanceOutcome)>,
    pub terminal_outcomes: Vec<(NodeId, ResistanceOutcome)>,
}

impl RobustnessReport {
    pub fn valid(&self) -> bool {
        self.delivery_failures.is_empty()
            && self.edge_outcomes.iter().all(|(_, o)| o.passes)
            && self.terminal_outcomes.iter().all(|(_, o)| o.passes)
    }
}

/// Validates a network code: (a) delivery — every terminal decodes its
/// demands from error-free inputs for every source assignment (the
/// success criterion the node-processing model implies), and (b)
/// robustness — every encoder and decoder tolerates corruptions up to its
/// declared budget.
pub fn validate_ncle(
    inst: &NetworkInstance,
    code: &NetworkCode,
    quantification: Quantification,
    limits: &Limits,
) -> Result<RobustnessReport> {
    code.check_shape(inst)?;
    let field = &inst.field;
    let messages = inst.messages();
    let s_count = messages.len();
    let total = vector_space_size(field.q(), s_count);
    limits.check(total)?;

    let msg_pos: std::collections::HashMap<&str, usize> = messages
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_str(), i))
        .collect();

    // one sweep over all source assignments: delivery plus reachable bases
    let mut delivery_failures = Vec::new();
    let mut edge_bases: Vec<BTreeSet<SymbolVector>> = vec![BTreeSet::new(); inst.edges.len()];
    let mut term_bases: Vec<BTreeSet<SymbolVector>> = vec![BTreeSet::new(); inst.terminals.len()];
    for idx in 0..total as usize {
        let x_s = field.vector_from_index(idx, s_count);
        let edge_values = eval_global(inst, code, &x_s)?;
        for (ei, edge) in inst.edges.iter().enumerate() {
            let inputs = gather_inputs(inst, &edge.id, &x_s, &edge_values, &msg_pos);
            edge_bases[ei].insert(inputs);
        }
        for (ti, t) in inst.terminals.iter().enumerate() {
            let inputs: SymbolVector = inst
                .terminal_inputs(&t.node)
                .iter()
                .map(|e| edge_values[inst.edge_index(e).unwrap()])
                .collect();
            let decoder = code.decoder(&t.node).unwrap();
            let got = decoder.eval(field, &inputs)?;
            let expected: SymbolVector = t
                .demands
                .iter()
                .map(|d| x_s[msg_pos[d.as_str()]])
                .collect();
            if got != expected && delivery_failures.iter().all(|f: &DeliveryFailure| f.terminal != t.node) {
                delivery_failures.push(DeliveryFailure {
                    terminal: t.node.clone(),
                    x_s: x_s.clone(),
                    expected,
                    got,
                });
            }
            term_bases[ti].insert(inputs);
        }
    }

    let mut edge_outcomes = Vec::new();
    for (ei, edge) in inst.edges.iter().enumerate() {
        let f = MultiFunction::from_local(code.encoder(&edge.id).unwrap());
        let bases: Vec<SymbolVector> = match quantification {
            Quantification::Reachable => edge_bases[ei].iter().cloned().collect(),
            Quantification::All => all_inputs(field, f.arity(), limits)?,
        };
        let outcome = check_error_resistance(field, &f, edge.delta, &bases, limits)?;
        edge_outcomes.push((edge.id.clone(), outcome));
    }
    let mut terminal_outcomes = Vec::new();
    for (ti, t) in inst.terminals.iter().enumerate() {
        let d = code.decoder(&t.node).unwrap();
        let bases: Vec<SymbolVector> = match quantification {
            Quantification::Reachable => term_bases[ti].iter().cloned().collect(),
            Quantification::All => all_inputs(field, d.arity(), limits)?,
        };
        let outcome = check_error_resistance(field, d, t.delta, &bases, limits)?;
        terminal_outcomes.push((t.node.clone(), outcome));
    }

    Ok(RobustnessReport {
        delivery_failures,
        edge_outcomes,
        terminal_outcomes,
    })
}

fn gather_inputs(
    inst: &NetworkInstance,
    edge_id: &str,
    x_s: &[Symbol],
    edge_values: &[Symbol],
    msg_pos: &std::collections::HashMap<&str, usize>,
) -> SymbolVector {
    match inst.input_set(edge_id).unwrap() {
        InputSet::Messages(ms) => ms.iter().map(|m| x_s[msg_pos[m.as_str()]]).collect(),
        InputSet::Edges(es) => es
            .iter()
            .map(|e| edge_values[inst.edge_index(e).unwrap()])
            .collect(),
    }
}

fn all_inputs(
    field: &crate::field::FieldSpec,
    arity: usize,
    limits: &Limits,
) -> Result<Vec<SymbolVector>> {
    Ok(crate::field::enumerate_vectors(field, arity, limits)?.collect())
}

/// The instance with one edge removed (the edge disappears from the graph
/// and hence from every derived input set).
pub fn remove_edge(inst: &NetworkInstance, edge_id: &str) -> Result<NetworkInstance> {
    if inst.edge(edge_id).is_none() {
        return Err(Error::UnknownId(edge_id.to_string()));
    }
    Ok(NetworkInstance {
        field: inst.field.clone(),
        nodes: inst.nodes.clone(),
        edges: inst
            .edges
            .iter()
            .filter(|e| e.id != edge_id)
            .cloned()
            .collect(),
        sources: inst.sources.clone(),
        terminals: inst.terminals.clone(),
    })
}

/// True when some code with the declared budgets exists for the instance:
/// the equivalent index instance admits a code of length `|E|` (the
/// optimum can never be shorter for instances of this shape).
pub fn ncle_feasible(inst: &NetworkInstance, limits: &Limits) -> Result<bool> {
    let (converted, _) = crate::equiv::nc_to_ic_instance_unchecked(inst);
    let opt = crate::icsie::optimal_codelength(
        &converted,
        crate::icsie::OptMode::Nonlinear,
        limits,
    )?;
    Ok(opt.n_opt == inst.edges.len())
}

/// True when removing the edge preserves feasibility.
pub fn is_redundant_link(
    inst: &NetworkInstance,
    edge_id: &str,
    limits: &Limits,
) -> Result<bool> {
    let reduced = remove_edge(inst, edge_id)?;
    ncle_feasible(&reduced, limits)
}

/// Every instance obtained by deleting, at each node, exactly
/// `min(2δ_v, |In(v)|)` inputs (incoming edges, or owned messages at a
/// source), and at each terminal `min(2δ_t, |In(t)|)` incoming edges,
/// with all budgets reset to zero. `δ_v` is the smallest budget among the
/// node's outgoing edges.
pub fn derive_conventional_instances(
    inst: &NetworkInstance,
    limits: &Limits,
) -> Result<Vec<NetworkInstance>> {
    // per node: the list of alternative deletion sets
    enum Target {
        EdgeIn(Vec<EdgeId>),
        Owned(NodeId, Vec<crate::model::MessageId>),
    }
    let mut choices: Vec<Vec<Target>> = Vec::new();
    let mut cost: u128 = 1;
    for node in &inst.nodes {
        let delta = if let Some(t) = inst.terminal_at(node) {
            Some(t.delta)
        } else {
            inst.node_delta(node)
        };
        let Some(delta) = delta else { continue };
        let (inputs, is_source): (Vec<String>, bool) = if let Some(src) = inst.source_at(node) {
            (src.messages.clone(), true)
        } else {
            (
                inst.in_edges(node).iter().map(|e| e.id.clone()).collect(),
                false,
            )
        };
        let k = (2 * delta).min(inputs.len());
        if k == 0 {
            continue;
        }
        let combs = crate::field::combinations(inputs.len(), k);
        cost = cost.saturating_mul(combs.len() as u128);
        limits.check(cost)?;
        choices.push(
            combs
                .into_iter()
                .map(|c| {
                    let picked: Vec<String> = c.iter().map(|&i| inputs[i].clone()).collect();
                    if is_source {
                        Target::Owned(node.clone(), picked)
                    } else {
                        Target::EdgeIn(picked)
                    }
                })
                .collect(),
        );
    }

    let mut selections: Vec<Vec<&Target>> = vec![Vec::new()];
    for group in &choices {
        let mut next = Vec::with_capacity(selections.len() * group.len());
        for partial in &selections {
            for t in group {
                let mut s = partial.clone();
                s.push(t);
                next.push(s);
            }
        }
        selections = next;
    }

    let mut out = Vec::with_capacity(selections.len());
    for selection in selections {
        let mut removed_edges: std::collections::HashSet<&str> = Default::default();
        let mut removed_owned: std::collections::HashMap<&str, std::collections::HashSet<&str>> =
            Default::default();
        for t in selection {
            match t {
                Target::EdgeIn(edges) => {
                    removed_edges.extend(edges.iter().map(|e| e.as_str()));
                }
                Target::Owned(node, msgs) => {
                    removed_owned
                        .entry(node.as_str())
                        .or_default()
                        .extend(msgs.iter().map(|m| m.as_str()));
                }
            }
        }
        out.push(NetworkInstance {
            field: inst.field.clone(),
            nodes: inst.nodes.clone(),
            edges: inst
                .edges
                .iter()
                .filter(|e| !removed_edges.contains(e.id.as_str()))
                .map(|e| crate::model::Edge {
                    delta: 0,
                    ..e.clone()
                })
                .collect(),
            sources: inst
                .sources
                .iter()
                .map(|s| SourceNode {
                    node: s.node.clone(),
                    messages: s
                        .messages
                        .iter()
                        .filter(|m| {
                            removed_owned
                                .get(s.node.as_str())
                                .is_none_or(|set| !set.contains(m.as_str()))
                        })
                        .cloned()
                        .collect(),
                })
                .collect(),
            terminals: inst
                .terminals
                .iter()
                .map(|t| Terminal {
                    node: t.node.clone(),
                    demands: t.demands.clone(),
                    delta: 0,
                })
                .collect(),
        });
    }
    Ok(out)
}

/// Cost of the conventional-instance enumeration, for pre-checks.
pub fn conventional_choice_count(inst: &NetworkInstance) -> u128 {
    let mut cost: u128 = 1;
    for node in &inst.nodes {
        let delta = if let Some(t) = inst.terminal_at(node) {
            Some(t.delta)
        } else {
            inst.node_delta(node)
        };
        let Some(delta) = delta else { continue };
        let len = if let Some(src) = inst.source_at(node) {
            src.messages.len()
        } else {
            inst.in_edges(node).len()
        };
        let k = (2 * delta).min(len);
        cost = cost.saturating_mul(crate::field::binomial(len, k).max(1));
    }
    cost
}

/// Number of corruption patterns a resistance check visits; exposed so
/// callers can display the work done.
pub fn resistance_pattern_count(q: usize, arity: usize, delta: usize) -> u128 {
    error_pattern_count(q, arity, delta)
}
