//! JSON documents for arenas, strategies and standalone colour conditions.
//!
//! Identifiers are strings; probabilities are rational strings (`"1/3"`).
//! In transitions and strategy tables `*` stands for "every action" /
//! "every signal" / "every memory state". Strategy table entries are applied
//! in document order, so a later entry overrides an earlier wildcard.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, ArenaBuilder, Side, WILDCARD};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Distribution};
use crate::strategy::{observations, Observation, Strategy, StrategyKind};

/// Reserved signal id for the observation preceding any signal.
pub const BLANK: &str = "blank";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArenaDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub vertices: Vec<VertexDoc>,
    pub eve_actions: Vec<EveActionDoc>,
    pub adam_actions: Vec<AdamActionDoc>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colour: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eve_signal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adam_signal: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EveActionDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eve_signal: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamActionDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adam_signal: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub eve: String,
    pub adam: String,
    pub to: Vec<TargetDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDoc {
    pub vertex: String,
    pub prob: String,
}

fn malformed(e: serde_json::Error) -> Error {
    Error::Malformed(format!("{e} (line {}, column {})", e.line(), e.column()))
}

pub fn parse_arena(text: &str) -> Result<Arena> {
    let doc: ArenaDoc = serde_json::from_str(text).map_err(malformed)?;
    arena_from_doc(&doc)
}

pub fn arena_from_doc(doc: &ArenaDoc) -> Result<Arena> {
    let mut b = ArenaBuilder::new();
    for v in &doc.vertices {
        b.vertex(
            &v.id,
            v.colour.as_deref(),
            v.eve_signal.as_deref(),
            v.adam_signal.as_deref(),
        );
    }
    for a in &doc.eve_actions {
        b.eve_action(&a.id, a.eve_signal.as_deref());
    }
    for a in &doc.adam_actions {
        b.adam_action(&a.id, a.adam_signal.as_deref());
    }
    for t in &doc.transitions {
        let to = t
            .to
            .iter()
            .map(|target| Ok((target.vertex.as_str(), parse_rational(&target.prob)?)))
            .collect::<Result<Vec<_>>>()?;
        b.transition(&t.from, &t.eve, &t.adam, to);
    }
    b.build()
}

/// Canonical document: every transition triple spelled out, no wildcards.
pub fn arena_to_doc(arena: &Arena) -> ArenaDoc {
    let sig = |side: Side, s: Option<usize>| s.map(|s| arena.signal_name(side, s).to_owned());
    let vertices = (0..arena.vertex_count())
        .map(|v| VertexDoc {
            id: arena.vertex_name(v).to_owned(),
            colour: arena.colour_of(v).map(|c| arena.colours()[c].clone()),
            eve_signal: sig(Side::Eve, arena.vertex_signal(Side::Eve, v)),
            adam_signal: sig(Side::Adam, arena.vertex_signal(Side::Adam, v)),
        })
        .collect();
    let eve_actions = (0..arena.action_count(Side::Eve))
        .map(|x| EveActionDoc {
            id: arena.action_name(Side::Eve, x).to_owned(),
            eve_signal: sig(Side::Eve, arena.action_signal(Side::Eve, x)),
        })
        .collect();
    let adam_actions = (0..arena.action_count(Side::Adam))
        .map(|y| AdamActionDoc {
            id: arena.action_name(Side::Adam, y).to_owned(),
            adam_signal: sig(Side::Adam, arena.action_signal(Side::Adam, y)),
        })
        .collect();
    let mut transitions = Vec::new();
    for v in 0..arena.vertex_count() {
        for x in 0..arena.action_count(Side::Eve) {
            for y in 0..arena.action_count(Side::Adam) {
                transitions.push(TransitionDoc {
                    from: arena.vertex_name(v).to_owned(),
                    eve: arena.action_name(Side::Eve, x).to_owned(),
                    adam: arena.action_name(Side::Adam, y).to_owned(),
                    to: arena
                        .transition(v, x, y)
                        .iter()
                        .map(|(&t, w)| TargetDoc {
                            vertex: arena.vertex_name(t).to_owned(),
                            prob: format_rational(w),
                        })
                        .collect(),
                });
            }
        }
    }
    ArenaDoc {
        name: None,
        description: None,
        vertices,
        eve_actions,
        adam_actions,
        transitions,
    }
}

pub fn arena_to_json(arena: &Arena) -> String {
    serde_json::to_string_pretty(&arena_to_doc(arena)).expect("arena documents serialise")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDoc {
    pub side: Side,
    pub kind: StrategyKind,
    pub memory: Vec<String>,
    pub init: BTreeMap<String, String>,
    pub update: Vec<TableEntryDoc>,
    pub act: Vec<TableEntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntryDoc {
    pub signal: String,
    pub memory: String,
    pub to: BTreeMap<String, String>,
}

pub fn parse_strategy(text: &str, arena: &Arena) -> Result<Strategy> {
    let doc: StrategyDoc = serde_json::from_str(text).map_err(malformed)?;
    strategy_from_doc(&doc, arena)
}

pub fn strategy_from_doc(doc: &StrategyDoc, arena: &Arena) -> Result<Strategy> {
    let side = doc.side;
    let m = doc.memory.len();
    let mem_index = |name: &str| {
        doc.memory
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownIdentifier(name.to_owned()))
    };
    let dist = |table: &BTreeMap<String, String>, lookup: &dyn Fn(&str) -> Result<usize>| {
        let entries = table
            .iter()
            .map(|(k, p)| Ok((lookup(k)?, parse_rational(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(entries)
    };
    let init = dist(&doc.init, &mem_index)?;
    let slots = arena.signal_count(side) + 1;
    let observation_slots = |signal: &str| -> Result<Vec<usize>> {
        match signal {
            WILDCARD => Ok((0..slots).collect()),
            BLANK => Ok(vec![0]),
            s => arena
                .signal_index(side, s)
                .map(|i| vec![i + 1])
                .ok_or_else(|| Error::UnknownIdentifier(s.to_owned())),
        }
    };
    let memory_slots = |name: &str| -> Result<Vec<usize>> {
        if name == WILDCARD {
            Ok((0..m).collect())
        } else {
            Ok(vec![mem_index(name)?])
        }
    };
    let action_index = |name: &str| {
        arena
            .action_index(side, name)
            .ok_or_else(|| Error::UnknownIdentifier(name.to_owned()))
    };
    let mut update = vec![None; slots * m];
    for e in &doc.update {
        let d = dist(&e.to, &mem_index)?;
        for o in observation_slots(&e.signal)? {
            for k in memory_slots(&e.memory)? {
                update[o * m + k] = Some(d.clone());
            }
        }
    }
    let mut act = vec![None; slots * m];
    for e in &doc.act {
        let d = dist(&e.to, &action_index)?;
        for o in observation_slots(&e.signal)? {
            for k in memory_slots(&e.memory)? {
                act[o * m + k] = Some(d.clone());
            }
        }
    }
    let complete = |table: Vec<Option<Distribution<usize>>>, what: &str| {
        table
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| {
                    let o = i / m;
                    let signal = if o == 0 { BLANK } else { arena.signal_name(side, o - 1) };
                    Error::NonTotal(format!("{what} missing for ({signal}, {})", doc.memory[i % m]))
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    let update = complete(update, "update")?;
    let act = complete(act, "act")?;
    Strategy::new(arena, side, doc.kind, doc.memory.clone(), init, update, act)
}

pub fn strategy_to_doc(strategy: &Strategy, arena: &Arena) -> StrategyDoc {
    let side = strategy.side();
    let names = strategy.memory_names();
    let obs_name = |o: Observation| match o {
        None => BLANK.to_owned(),
        Some(s) => arena.signal_name(side, s).to_owned(),
    };
    let mut update = Vec::new();
    let mut act = Vec::new();
    for o in observations(arena, side) {
        for m in 0..strategy.memory_size() {
            update.push(TableEntryDoc {
                signal: obs_name(o),
                memory: names[m].clone(),
                to: strategy
                    .update_dist(o, m)
                    .iter()
                    .map(|(&k, w)| (names[k].clone(), format_rational(w)))
                    .collect(),
            });
            act.push(TableEntryDoc {
                signal: obs_name(o),
                memory: names[m].clone(),
                to: strategy
                    .act_dist(o, m)
                    .iter()
                    .map(|(&a, w)| (arena.action_name(side, a).to_owned(), format_rational(w)))
                    .collect(),
            });
        }
    }
    StrategyDoc {
        side,
        kind: strategy.kind(),
        memory: names.to_vec(),
        init: strategy
            .init()
            .iter()
            .map(|(&k, w)| (names[k].clone(), format_rational(w)))
            .collect(),
        update,
        act,
    }
}

pub fn strategy_to_json(strategy: &Strategy, arena: &Arena) -> String {
    serde_json::to_string_pretty(&strategy_to_doc(strategy, arena)).expect("strategy documents serialise")
}

/// A colour universe with a condition string, for conditions that are not
/// tied to an arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub colours: Vec<String>,
    pub condition: String,
}

pub fn parse_condition_doc(text: &str) -> Result<ConditionDoc> {
    serde_json::from_str(text).map_err(malformed)
}
