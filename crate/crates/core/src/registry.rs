//! Name-keyed registries of interchangeable strategies (inclusion families, linear solvers,
//! boundary data, run checks).

use std::sync::Arc;

use crate::error::{Error, Result};

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(String, Arc<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry { kind, entries: Vec::new() }
    }

    /// Registers `item` under `name`, replacing any previous entry of that name.
    pub fn register(&mut self, name: &str, item: Arc<T>) {
        self.entries.retain(|(n, _)| n != name);
        self.entries.push((name.to_string(), item));
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| Arc::clone(v))
            .ok_or_else(|| Error::UnknownName {
                kind: self.kind,
                name: name.to_string(),
                supported: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_lists_supported() {
        let mut r: Registry<str> = Registry::new("thing");
        r.register("a", Arc::from("x"));
        r.register("b", Arc::from("y"));
        assert_eq!(&*r.get("b").unwrap(), "y");
        let msg = r.get("c").unwrap_err().to_string();
        assert!(msg.contains("a, b"), "{msg}");
    }
}
