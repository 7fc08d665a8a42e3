//! Compressed sparse page-link graph.
//!
//! Out-edges are stored CSR-style (one offsets array, one flat targets
//! array); in-degrees are kept as a separate array since they back both the
//! {IL} ranking and the basic-set filter. Node ids are intern ids, so the
//! arrays are sized by the intern table, not by the number of linked pages.

use crate::intern::EntityId;

#[derive(Debug, Clone, Default)]
pub struct LinkGraph {
    offsets: Vec<u64>,
    targets: Vec<u32>,
    in_degree: Vec<u32>,
}

impl LinkGraph {
    /// Builds the graph from an edge list. Duplicate `(source, target)` pairs
    /// are collapsed: the page-link dataset records at most one link per
    /// article pair, and in-link counts are defined over distinct sources.
    pub fn from_edges(node_count: usize, mut edges: Vec<(u32, u32)>) -> LinkGraph {
        edges.sort_unstable();
        edges.dedup();

        let mut offsets = vec![0u64; node_count + 1];
        for &(src, _) in &edges {
            offsets[src as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut targets = Vec::with_capacity(edges.len());
        let mut in_degree = vec![0u32; node_count];
        for (_, dst) in edges {
            targets.push(dst);
            in_degree[dst as usize] += 1;
        }
        LinkGraph {
            offsets,
            targets,
            in_degree,
        }
    }

    pub fn node_count(&self) -> usize {
        self.in_degree.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.targets.len() as u64
    }

    /// Out-neighbors of `node`; empty for ids outside the graph.
    pub fn out_neighbors(&self, node: EntityId) -> &[u32] {
        let i = node.index();
        if i + 1 >= self.offsets.len() {
            return &[];
        }
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn out_degree(&self, node: EntityId) -> u32 {
        self.out_neighbors(node).len() as u32
    }

    /// Number of distinct articles linking to `node`; 0 for ids outside the
    /// graph.
    pub fn in_degree(&self, node: EntityId) -> u32 {
        self.in_degree.get(node.index()).copied().unwrap_or(0)
    }

    pub(crate) fn raw_parts(&self) -> (&[u64], &[u32], &[u32]) {
        (&self.offsets, &self.targets, &self.in_degree)
    }

    pub(crate) fn from_raw_parts(
        offsets: Vec<u64>,
        targets: Vec<u32>,
        in_degree: Vec<u32>,
    ) -> LinkGraph {
        LinkGraph {
            offsets,
            targets,
            in_degree,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn in_degrees_are_hand_countable() {
        // {A→B, C→B}: in-degree of B is 2.
        let g = LinkGraph::from_edges(3, vec![(0, 1), (2, 1)]);
        assert_eq!(g.in_degree(EntityId(1)), 2);
        assert_eq!(g.in_degree(EntityId(0)), 0);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = LinkGraph::from_edges(2, vec![(0, 1), (0, 1), (0, 1)]);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.in_degree(EntityId(1)), 1);
    }

    #[test]
    fn degree_sums_match_edge_count() {
        let edges = vec![(0, 1), (0, 2), (1, 2), (3, 0), (2, 0)];
        let g = LinkGraph::from_edges(4, edges);
        let total_in: u64 = (0..4).map(|i| g.in_degree(EntityId(i)) as u64).sum();
        let total_out: u64 = (0..4).map(|i| g.out_degree(EntityId(i)) as u64).sum();
        assert_eq!(total_in, g.edge_count());
        assert_eq!(total_out, g.edge_count());
    }

    #[test]
    fn out_of_range_ids_are_degree_zero() {
        let g = LinkGraph::from_edges(2, vec![(0, 1)]);
        assert_eq!(g.in_degree(EntityId(99)), 0);
        assert!(g.out_neighbors(EntityId(99)).is_empty());
    }
}
