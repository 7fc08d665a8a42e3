//! IRI interning.
//!
//! Every IRI seen by a store is mapped to a dense `EntityId` so that the
//! big indexes (link graph, type index, ...) work on `u32`s instead of
//! strings. Ids are dense from 0 in first-seen order, and the mapping is
//! bijective: `resolve(intern(s)) == s`.

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

/// Dense identifier for an interned IRI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bidirectional IRI ↔ id table. Each string is stored once.
#[derive(Debug, Default, Clone)]
pub struct InternTable {
    entries: IndexSet<Box<str>>,
}

impl InternTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `iri`, returning its id. Idempotent: the same text always
    /// yields the same id.
    pub fn intern(&mut self, iri: &str) -> EntityId {
        if let Some(idx) = self.entries.get_index_of(iri) {
            return EntityId(idx as u32);
        }
        let (idx, _) = self.entries.insert_full(Box::from(iri));
        EntityId(idx as u32)
    }

    /// Looks up an already-interned IRI.
    pub fn get(&self, iri: &str) -> Option<EntityId> {
        self.entries.get_index_of(iri).map(|i| EntityId(i as u32))
    }

    /// Returns the IRI text for `id`.
    ///
    /// Panics if `id` was not produced by this table.
    pub fn resolve(&self, id: EntityId) -> &str {
        self.entries
            .get_index(id.index())
            .expect("EntityId out of range for this intern table")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Iterates `(id, iri)` pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (EntityId, &str)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, s)| (EntityId(i as u32), s.as_ref()))
    }
}
