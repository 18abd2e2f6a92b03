//! Explicit finite labeled transition systems.
//!
//! States are identified by canonical names (the serialized model-level
//! state) and interned to dense indices. The alphabet is stored explicitly:
//! it is a superset of the transition labels and decides synchronization in
//! products.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::action::{Action, ActionDoc};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ActionId(pub u32);

#[derive(Clone, Debug)]
pub struct Lts {
    names: Vec<String>,
    name_idx: HashMap<String, StateId>,
    actions: Vec<Action>,
    action_idx: HashMap<Action, ActionId>,
    initial: StateId,
    adj: Vec<Vec<(ActionId, StateId)>>,
    alphabet: BTreeSet<Action>,
}

impl Lts {
    /// Build from explicit parts. Transition endpoints must name declared
    /// states; the alphabet is extended with all transition labels.
    pub fn from_parts(
        states: Vec<String>,
        initial: &str,
        transitions: Vec<(String, Action, String)>,
        alphabet: BTreeSet<Action>,
    ) -> Result<Lts> {
        let mut builder = LtsBuilder::new();
        for name in &states {
            builder.add_state(name.clone());
        }
        let initial = builder
            .lookup(initial)
            .ok_or_else(|| Error::UnknownState(initial.to_string()))?;
        for (from, action, to) in transitions {
            let f = builder.lookup(&from).ok_or(Error::UnknownState(from))?;
            let t = builder.lookup(&to).ok_or(Error::UnknownState(to))?;
            builder.add_transition(f, action, t);
        }
        Ok(builder.finish(initial, alphabet))
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.names.len() as u32).map(StateId)
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s.0 as usize]
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.name_idx.get(name).copied()
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.actions[id.0 as usize]
    }

    pub fn action_id(&self, a: &Action) -> Option<ActionId> {
        self.action_idx.get(a).copied()
    }

    pub fn transitions_from(&self, s: StateId) -> &[(ActionId, StateId)] {
        &self.adj[s.0 as usize]
    }

    pub fn num_transitions(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn alphabet(&self) -> &BTreeSet<Action> {
        &self.alphabet
    }

    /// No two transitions share source and label with distinct targets.
    /// Returns the offending state and label otherwise.
    pub fn check_label_deterministic(&self) -> Result<()> {
        for (i, row) in self.adj.iter().enumerate() {
            for w in row.windows(2) {
                if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
                    return Err(Error::Nondeterministic {
                        state: self.names[i].clone(),
                        action: self.actions[w[0].0 .0 as usize].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Unique successor under a label, for deterministic systems.
    pub fn step(&self, s: StateId, a: &Action) -> Option<StateId> {
        let aid = self.action_id(a)?;
        self.transitions_from(s)
            .iter()
            .find(|(id, _)| *id == aid)
            .map(|(_, t)| *t)
    }

    pub fn to_doc(&self) -> LtsDoc {
        LtsDoc {
            states: self.names.clone(),
            initial: self.names[self.initial.0 as usize].clone(),
            transitions: self
                .adj
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter().map(move |(a, t)| TransitionDoc {
                        from: self.names[i].clone(),
                        action: ActionDoc::from_action(&self.actions[a.0 as usize]),
                        to: self.names[t.0 as usize].clone(),
                    })
                })
                .collect(),
            alphabet: Some(self.alphabet.iter().map(ActionDoc::from_action).collect()),
        }
    }

    pub fn from_doc(doc: &LtsDoc) -> Result<Lts> {
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for (i, t) in doc.transitions.iter().enumerate() {
            let action = t
                .action
                .to_action()
                .map_err(|m| Error::invalid(format!("transition {i}: {m}")))?;
            transitions.push((t.from.clone(), action, t.to.clone()));
        }
        let mut alphabet = BTreeSet::new();
        if let Some(docs) = &doc.alphabet {
            for (i, d) in docs.iter().enumerate() {
                alphabet.insert(
                    d.to_action()
                        .map_err(|m| Error::invalid(format!("alphabet entry {i}: {m}")))?,
                );
            }
        }
        Lts::from_parts(doc.states.clone(), &doc.initial, transitions, alphabet)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Lts> {
        let doc: LtsDoc =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("model JSON: {e}")))?;
        Lts::from_doc(&doc)
    }
}

/// Incremental construction with interning, used by the explorer.
pub struct LtsBuilder {
    names: Vec<String>,
    name_idx: HashMap<String, StateId>,
    actions: Vec<Action>,
    action_idx: HashMap<Action, ActionId>,
    adj: Vec<Vec<(ActionId, StateId)>>,
}

impl LtsBuilder {
    pub fn new() -> LtsBuilder {
        LtsBuilder {
            names: Vec::new(),
            name_idx: HashMap::new(),
            actions: Vec::new(),
            action_idx: HashMap::new(),
            adj: Vec::new(),
        }
    }

    pub fn add_state(&mut self, name: String) -> StateId {
        if let Some(&id) = self.name_idx.get(&name) {
            return id;
        }
        let id = StateId(self.names.len() as u32);
        self.name_idx.insert(name.clone(), id);
        self.names.push(name);
        self.adj.push(Vec::new());
        id
    }

    pub fn lookup(&self, name: &str) -> Option<StateId> {
        self.name_idx.get(name).copied()
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn intern_action(&mut self, a: Action) -> ActionId {
        if let Some(&id) = self.action_idx.get(&a) {
            return id;
        }
        let id = ActionId(self.actions.len() as u32);
        self.action_idx.insert(a.clone(), id);
        self.actions.push(a);
        id
    }

    pub fn add_transition(&mut self, from: StateId, action: Action, to: StateId) {
        let aid = self.intern_action(action);
        self.adj[from.0 as usize].push((aid, to));
    }

    pub fn finish(mut self, initial: StateId, mut alphabet: BTreeSet<Action>) -> Lts {
        for a in &self.actions {
            alphabet.insert(a.clone());
        }
        // Canonical transition order: by action, then target.
        for row in &mut self.adj {
            let actions = &self.actions;
            row.sort_by(|x, y| {
                actions[x.0 .0 as usize]
                    .cmp(&actions[y.0 .0 as usize])
                    .then(x.1.cmp(&y.1))
            });
            row.dedup();
        }
        Lts {
            names: self.names,
            name_idx: self.name_idx,
            actions: self.actions,
            action_idx: self.action_idx,
            initial,
            adj: self.adj,
            alphabet,
        }
    }
}

impl Default for LtsBuilder {
    fn default() -> Self {
        LtsBuilder::new()
    }
}

/// The JSON model exchange format. `alphabet` is optional on input and
/// defaults to the transition labels.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct LtsDoc {
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<TransitionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<ActionDoc>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TransitionDoc {
    pub from: String,
    pub action: ActionDoc,
    pub to: String,
}
