use super::{DeciderError, Version};

/// Per-thread record of the preomp loops currently executing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ThreadContext {
    stack: Vec<Version>,
}

impl ThreadContext {
    pub fn new() -> ThreadContext {
        ThreadContext::default()
    }

    pub fn enter(&mut self, chosen: Version) {
        self.stack.push(chosen);
    }

    pub fn exit(&mut self) -> Result<Version, DeciderError> {
        self.stack.pop().ok_or(DeciderError::Unbalanced)
    }

    /// Number of enclosing loops running their parallel version.
    pub fn active_parallel_depth(&self) -> usize {
        self.stack
            .iter()
            .filter(|&&v| v == Version::Parallel)
            .count()
    }

    pub fn outer_active(&self) -> bool {
        self.active_parallel_depth() > 0
    }

    /// Number of enclosing preomp loops of either version.
    pub fn nesting(&self) -> usize {
        self.stack.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enter_exit() {
        let mut c = ThreadContext::new();
        c.enter(Version::Parallel);
        assert!(c.outer_active());
        c.exit().unwrap();
        assert!(!c.outer_active());
        c.enter(Version::Serial);
        assert!(!c.outer_active());
        c.exit().unwrap();
        assert_eq!(c.exit(), Err(DeciderError::Unbalanced));
    }
}
