//! Configuration events and numeric observables.

use serde::{Deserialize, Serialize};

use crate::graph::VertexId;

/// A predicate on edge configurations.
///
/// Set-valued atoms are existential: `Conn(S, T)` holds when some vertex of
/// `S` is connected to some vertex of `T`, so either side being empty makes it
/// false and a shared vertex makes it true.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventExpr {
    /// Undirected connection between two vertex sets.
    Conn(Vec<VertexId>, Vec<VertexId>),
    /// Directed reachability from some source to some target.
    Reach(Vec<VertexId>, Vec<VertexId>),
    /// `|C(v)| >= k` (out-reachable set on directed graphs, `v` included).
    ClusterAtLeast(VertexId, usize),
    EdgeOpen(usize),
    /// Adding an open edge on the pair changes the inner event. Existing edges
    /// joining the pair are treated as closed on both sides of the comparison.
    Pivotal((VertexId, VertexId), Box<EventExpr>),
    Not(Box<EventExpr>),
    And(Vec<EventExpr>),
    Or(Vec<EventExpr>),
}

impl EventExpr {
    pub fn conn(s: &[&str], t: &[&str]) -> Self {
        EventExpr::Conn(ids(s), ids(t))
    }

    pub fn reach(s: &[&str], t: &[&str]) -> Self {
        EventExpr::Reach(ids(s), ids(t))
    }

    /// Connection in the graph's own sense: `Reach` when directed.
    pub fn link(directed: bool, s: &[&str], t: &[&str]) -> Self {
        if directed {
            Self::reach(s, t)
        } else {
            Self::conn(s, t)
        }
    }

    pub fn link_sets(directed: bool, s: Vec<VertexId>, t: Vec<VertexId>) -> Self {
        if directed {
            EventExpr::Reach(s, t)
        } else {
            EventExpr::Conn(s, t)
        }
    }

    pub fn pivotal(u: &str, v: &str, inner: EventExpr) -> Self {
        EventExpr::Pivotal((u.to_string(), v.to_string()), Box::new(inner))
    }

    /// The certain event.
    pub fn always() -> Self {
        EventExpr::And(Vec::new())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        EventExpr::Not(Box::new(self))
    }

    pub fn and(self, other: EventExpr) -> Self {
        match self {
            EventExpr::And(mut xs) => {
                xs.push(other);
                EventExpr::And(xs)
            }
            x => EventExpr::And(vec![x, other]),
        }
    }

    pub fn or(self, other: EventExpr) -> Self {
        EventExpr::Or(vec![self, other])
    }

    pub fn contains_pivotal(&self) -> bool {
        match self {
            EventExpr::Pivotal(..) => true,
            EventExpr::Not(x) => x.contains_pivotal(),
            EventExpr::And(xs) | EventExpr::Or(xs) => xs.iter().any(EventExpr::contains_pivotal),
            _ => false,
        }
    }
}

fn ids(s: &[&str]) -> Vec<VertexId> {
    s.iter().map(|v| v.to_string()).collect()
}

/// Product of an optional cluster-size factor and indicator factors. The empty
/// product is the constant 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumExpr {
    pub cluster_size: Option<VertexId>,
    pub indicators: Vec<EventExpr>,
}

impl NumExpr {
    pub fn one() -> Self {
        NumExpr::default()
    }

    pub fn cluster_size(v: &str) -> Self {
        NumExpr { cluster_size: Some(v.to_string()), indicators: Vec::new() }
    }

    pub fn indicator(ev: EventExpr) -> Self {
        NumExpr { cluster_size: None, indicators: vec![ev] }
    }

    pub fn times(mut self, ev: EventExpr) -> Self {
        self.indicators.push(ev);
        self
    }
}
