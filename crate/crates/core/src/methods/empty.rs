use crate::engine::{History, Method, Oracle, Query};
use crate::Result;

/// The method that never moves: it re-queries the last answered point and
/// leaves all progress to the politician.
#[derive(Clone, Copy, Debug, Default)]
pub struct EmptyMethod;

impl EmptyMethod {
    pub fn new() -> Self {
        Self
    }
}

impl Method for EmptyMethod {
    fn name(&self) -> String {
        "empty".into()
    }

    fn next_query(&mut self, history: &History, _oracle: &Oracle<'_>) -> Result<Query> {
        let y = history.last().expect("history is nonempty");
        if y.is_stationary() {
            return Ok(Query::Stationary);
        }
        Ok(Query::Point(y.point.clone()))
    }
}
