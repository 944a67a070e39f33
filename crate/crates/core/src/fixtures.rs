//! Bundled example instances and codes, embedded at compile time.
//!
//! `fig2` is a two-source twelve-link multicast network whose terminal
//! decoder tolerates one erroneous input; `fig4a` is a four-message index
//! instance whose conversion to a network requires two duplicated links
//! (`fig4b` is the rewritten graph, `fig4c` the resulting network).
//! `two-cycle` and `acyclic-chain` are minimal index instances for cycle
//! analysis.

use crate::code::{IndexCode, NetworkCode};
use crate::format;
use crate::model::{IndexInstance, NetworkInstance};
use crate::{Error, Result};

/// (name, kind, raw JSON) for every bundled fixture.
pub const FIXTURES: &[(&str, &str, &str)] = &[
    (
        "fig2",
        format::KIND_NETWORK_INSTANCE,
        include_str!("../fixtures/fig2.json"),
    ),
    (
        "fig2-code",
        format::KIND_NETWORK_CODE,
        include_str!("../fixtures/fig2-code.json"),
    ),
    (
        "fig4a",
        format::KIND_INDEX_INSTANCE,
        include_str!("../fixtures/fig4a.json"),
    ),
    (
        "fig4a-code",
        format::KIND_INDEX_CODE,
        include_str!("../fixtures/fig4a-code.json"),
    ),
    (
        "fig4b",
        format::KIND_INDEX_INSTANCE,
        include_str!("../fixtures/fig4b.json"),
    ),
    (
        "fig4b-code",
        format::KIND_INDEX_CODE,
        include_str!("../fixtures/fig4b-code.json"),
    ),
    (
        "fig4c",
        format::KIND_NETWORK_INSTANCE,
        include_str!("../fixtures/fig4c.json"),
    ),
    (
        "fig4c-code",
        format::KIND_NETWORK_CODE,
        include_str!("../fixtures/fig4c-code.json"),
    ),
    (
        "two-cycle",
        format::KIND_INDEX_INSTANCE,
        include_str!("../fixtures/two-cycle.json"),
    ),
    (
        "acyclic-chain",
        format::KIND_INDEX_INSTANCE,
        include_str!("../fixtures/acyclic-chain.json"),
    ),
];

pub fn names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(n, _, _)| *n).collect()
}

pub fn raw(name: &str) -> Option<&'static str> {
    FIXTURES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, _, text)| *text)
}

pub fn kind(name: &str) -> Option<&'static str> {
    FIXTURES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, k, _)| *k)
}

pub fn network(name: &str) -> Result<NetworkInstance> {
    let text = raw(name).ok_or_else(|| Error::UnknownId(name.to_string()))?;
    format::parse_network_instance(text)
}

pub fn index(name: &str) -> Result<IndexInstance> {
    let text = raw(name).ok_or_else(|| Error::UnknownId(name.to_string()))?;
    format::parse_index_instance(text)
}

pub fn network_code(name: &str) -> Result<NetworkCode> {
    let text = raw(name).ok_or_else(|| Error::UnknownId(name.to_string()))?;
    format::parse_network_code(text).map(|(c, _)| c)
}

pub fn index_code(name: &str) -> Result<IndexCode> {
    let text = raw(name).ok_or_else(|| Error::UnknownId(name.to_string()))?;
    format::parse_index_code(text).map(|(c, _)| c)
}
