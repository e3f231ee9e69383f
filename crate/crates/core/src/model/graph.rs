use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense index of a node inside a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Length (in time-steps) and vehicle capacity of a directed road segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeAttr {
    pub length: u32,
    pub capacity: u32,
}

/// Directed plant layout.
///
/// Nodes are addressed by [`NodeId`]; the external string names are kept in
/// `names` so that files and reports can refer back to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    hubs: BTreeSet<NodeId>,
    edges: BTreeMap<(NodeId, NodeId), EdgeAttr>,
    adjacency: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Builds a graph; callers are expected to have checked referential
    /// integrity (see `Instance::from_file`).
    pub fn new(
        names: Vec<String>,
        hubs: BTreeSet<NodeId>,
        edges: BTreeMap<(NodeId, NodeId), EdgeAttr>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); names.len()];
        for &(a, b) in edges.keys() {
            adjacency[a.0].push(b);
        }
        Self {
            names,
            hubs,
            edges,
            adjacency,
        }
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.names.len()).map(NodeId)
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|x| x == name).map(NodeId)
    }

    pub fn hubs(&self) -> &BTreeSet<NodeId> {
        &self.hubs
    }

    pub fn is_hub(&self, n: NodeId) -> bool {
        self.hubs.contains(&n)
    }

    pub fn edges(&self) -> &BTreeMap<(NodeId, NodeId), EdgeAttr> {
        &self.edges
    }

    pub fn edge(&self, from: NodeId, to: NodeId) -> Option<EdgeAttr> {
        self.edges.get(&(from, to)).copied()
    }

    /// Successors of `n`, sorted by node index.
    pub fn successors(&self, n: NodeId) -> &[NodeId] {
        &self.adjacency[n.0]
    }

    pub fn longest_edge(&self) -> u32 {
        self.edges.values().map(|e| e.length).max().unwrap_or(0)
    }

    /// Shortest directed path length from `a` to `b`, or `None` if `b` is
    /// unreachable.
    pub fn shortest_path_length(&self, a: NodeId, b: NodeId) -> Option<u32> {
        self.distances_from(a)[b.0]
    }

    /// Single-source shortest path lengths (Dijkstra over edge lengths).
    pub fn distances_from(&self, src: NodeId) -> Vec<Option<u32>> {
        let mut dist: Vec<Option<u32>> = vec![None; self.node_count()];
        let mut heap = BinaryHeap::new();
        dist[src.0] = Some(0);
        heap.push(Reverse((0u32, src)));
        while let Some(Reverse((d, n))) = heap.pop() {
            if dist[n.0].is_some_and(|best| d > best) {
                continue;
            }
            for &m in self.successors(n) {
                let nd = d + self.edges[&(n, m)].length;
                if dist[m.0].is_none_or(|cur| nd < cur) {
                    dist[m.0] = Some(nd);
                    heap.push(Reverse((nd, m)));
                }
            }
        }
        dist
    }

    /// True if every node reaches every other node along directed edges.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let forward = self.reach(NodeId(0), false);
        let backward = self.reach(NodeId(0), true);
        forward.iter().all(|&r| r) && backward.iter().all(|&r| r)
    }

    fn reach(&self, src: NodeId, reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([src]);
        seen[src.0] = true;
        while let Some(n) = queue.pop_front() {
            let next: Vec<NodeId> = if reverse {
                self.edges
                    .keys()
                    .filter(|(_, b)| *b == n)
                    .map(|(a, _)| *a)
                    .collect()
            } else {
                self.successors(n).to_vec()
            };
            for m in next {
                if !seen[m.0] {
                    seen[m.0] = true;
                    queue.push_back(m);
                }
            }
        }
        seen
    }
}
