//! Name-keyed registries of interchangeable strategies.
//!
//! Each algorithm family in the crate (labeling schemes, interval complexes,
//! `L(n)` enumerators) is a trait; implementations are registered under a
//! stable name and looked up at runtime, e.g. from a CLI flag.

use thiserror::Error;

/// Something that can be registered by name.
pub trait Named {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} '{name}' (known: {known})")]
pub struct UnknownStrategy {
    pub kind: &'static str,
    pub name: String,
    pub known: String,
}

/// Ordered collection of boxed strategies. Registration order is preserved so
/// listings are deterministic.
pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry { kind, entries: Vec::new() }
    }

    /// Adds `item`, replacing any entry with the same name.
    pub fn register(&mut self, item: Box<T>) {
        if let Some(slot) = self.entries.iter_mut().find(|e| e.name() == item.name()) {
            *slot = item;
        } else {
            self.entries.push(item);
        }
    }

    pub fn with(mut self, item: Box<T>) -> Self {
        self.register(item);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T, UnknownStrategy> {
        self.entries.iter().find(|e| e.name() == name).map(|b| b.as_ref()).ok_or_else(|| UnknownStrategy {
            kind: self.kind,
            name: name.to_string(),
            known: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Hello(&'static str);

    impl Named for Hello {
        fn name(&self) -> &'static str {
            self.0
        }
    }

    impl Greeter for Hello {
        fn greet(&self) -> String {
            format!("hello from {}", self.0)
        }
    }

    #[test]
    fn lookup_and_replace() {
        let mut r: Registry<dyn Greeter> = Registry::new("greeter");
        r.register(Box::new(Hello("a")));
        r.register(Box::new(Hello("b")));
        r.register(Box::new(Hello("a")));
        assert_eq!(r.names(), vec!["a", "b"]);
        assert_eq!(r.get("b").unwrap().greet(), "hello from b");
        let err = r.get("zzz").err().unwrap();
        assert_eq!(err.to_string(), "unknown greeter 'zzz' (known: a, b)");
    }
}
