//! Name-keyed tables of interchangeable strategies.

use std::collections::BTreeMap;

use crate::kripke::{self, KripkeStructure};

pub struct Registry<T: ?Sized> {
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Registry {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: ?Sized> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replaces any strategy previously registered under `name`.
    pub fn register(&mut self, name: &'static str, strategy: Box<T>) {
        self.entries.insert(name, strategy);
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.entries.get(name).map(|b| &**b)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

/// Serializes a model in one output format.
pub trait ModelEmitter {
    fn emit(&self, model: &KripkeStructure) -> String;
}

pub struct JsonEmitter;

impl ModelEmitter for JsonEmitter {
    fn emit(&self, model: &KripkeStructure) -> String {
        kripke::to_json(model)
    }
}

pub struct DotEmitter;

impl ModelEmitter for DotEmitter {
    fn emit(&self, model: &KripkeStructure) -> String {
        kripke::to_dot(model)
    }
}

pub fn model_emitters() -> Registry<dyn ModelEmitter> {
    let mut r: Registry<dyn ModelEmitter> = Registry::new();
    r.register("json", Box::new(JsonEmitter));
    r.register("dot", Box::new(DotEmitter));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_name() {
        let r = model_emitters();
        assert_eq!(r.names().collect::<Vec<_>>(), ["dot", "json"]);
        assert!(r.get("xml").is_none());
        let m = KripkeStructure::new([(0, Default::default())], &[0], [(0, 0)]).unwrap();
        assert!(r.get("dot").unwrap().emit(&m).starts_with("digraph"));
        assert_eq!(r.get("json").unwrap().emit(&m), kripke::to_json(&m));
    }
}
