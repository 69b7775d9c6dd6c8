//! Name-keyed collections of interchangeable algorithm variants.

use crate::error::{Error, Result};

pub trait Named {
    fn name(&self) -> &'static str;
}

/// Strategies in registration order, looked up by name.
pub struct Registry<T: ?Sized + Named> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Registry {
            entries: Vec::new(),
        }
    }
}

impl<T: ?Sized + Named> Registry<T> {
    /// Adds a strategy, replacing any existing one of the same name.
    pub fn register(&mut self, strategy: Box<T>) {
        match self
            .entries
            .iter()
            .position(|s| s.name() == strategy.name())
        {
            Some(i) => self.entries[i] = strategy,
            None => self.entries.push(strategy),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownStrategy {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Plain(&'static str);

    impl Named for Plain {
        fn name(&self) -> &'static str {
            self.0
        }
    }

    impl Greeter for Plain {
        fn greet(&self) -> String {
            format!("hi from {}", self.0)
        }
    }

    #[test]
    fn lookup_and_replace() {
        let mut r: Registry<dyn Greeter> = Registry::default();
        r.register(Box::new(Plain("a")));
        r.register(Box::new(Plain("b")));
        r.register(Box::new(Plain("a")));
        assert_eq!(r.names(), vec!["a", "b"]);
        assert_eq!(r.get("b").unwrap().greet(), "hi from b");
        let err = r.get("c").err().unwrap().to_string();
        assert!(err.contains("a, b"), "{err}");
    }
}
