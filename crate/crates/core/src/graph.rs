use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph order must be at least 1")]
    EmptyGraph,
    #[error("vertex {vertex} outside 1..={order}")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

/// Simple undirected labeled graph on vertices `1..=order`.
///
/// Adjacency is kept as one bit row per vertex; each unordered pair is set in
/// both rows, so symmetry holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    order: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl Graph {
    pub fn empty(order: usize) -> Result<Self, GraphError> {
        if order == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let stride = order.div_ceil(64);
        Ok(Self { order, stride, rows: vec![0; order * stride] })
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(order)?;
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn complete(order: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(order)?;
        for i in 2..=order {
            for j in 1..i {
                g.set(i - 1, j - 1, true);
            }
        }
        Ok(g)
    }

    /// The cycle 1-2-...-order-1. Orders below 3 give a path.
    pub fn cycle(order: usize) -> Result<Self, GraphError> {
        let mut g = Self::path(order)?;
        if order >= 3 {
            g.add_edge(order, 1)?;
        }
        Ok(g)
    }

    pub fn path(order: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(order)?;
        for v in 1..order {
            g.add_edge(v, v + 1)?;
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v == 0 || v > self.order {
            Err(GraphError::VertexOutOfRange { vertex: v, order: self.order })
        } else {
            Ok(())
        }
    }

    // 0-based, unchecked.
    fn set(&mut self, a: usize, b: usize, on: bool) {
        let (wa, ba) = (a * self.stride + b / 64, b % 64);
        let (wb, bb) = (b * self.stride + a / 64, a % 64);
        if on {
            self.rows[wa] |= 1 << ba;
            self.rows[wb] |= 1 << bb;
        } else {
            self.rows[wa] &= !(1 << ba);
            self.rows[wb] &= !(1 << bb);
        }
    }

    // 0-based, unchecked.
    pub(crate) fn adjacent(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.stride + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<(), GraphError> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        self.set(i - 1, j - 1, true);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> Result<(), GraphError> {
        self.check(i)?;
        self.check(j)?;
        if i != j {
            self.set(i - 1, j - 1, false);
        }
        Ok(())
    }

    /// False for out-of-range labels and for `i == j`.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && (1..=self.order).contains(&i) && (1..=self.order).contains(&j) && self.adjacent(i - 1, j - 1)
    }

    /// Edges as `(i, j)` with `i > j`, in below-diagonal serialization order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (2..=self.order).flat_map(move |i| (1..i).filter(move |&j| self.adjacent(i - 1, j - 1)).map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        assert!((1..=self.order).contains(&v), "vertex {v} out of range");
        let row = &self.rows[(v - 1) * self.stride..v * self.stride];
        row.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (1..=self.order).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Neighbourhood of 0-based vertex `a` as a mask over 0-based labels.
    /// Only valid for graphs of order at most 64.
    pub(crate) fn neighbor_mask(&self, a: usize) -> u64 {
        debug_assert!(self.order <= 64);
        self.rows[a]
    }

    /// Connected components as sorted lists of 1-based labels, ordered by
    /// their smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for start in 0..self.order {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v + 1);
                for u in 0..self.order {
                    if !seen[u] && self.adjacent(v, u) {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        let mut g = Graph::empty(3).unwrap();
        assert_eq!(g.add_edge(2, 2), Err(GraphError::SelfLoop(2)));
        assert_eq!(g.add_edge(4, 1), Err(GraphError::VertexOutOfRange { vertex: 4, order: 3 }));
        assert_eq!(Graph::empty(0), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn edges_come_out_in_row_order() {
        let g = Graph::from_edges(4, &[(1, 4), (3, 2), (1, 2)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(2, 1), (3, 2), (4, 1)]);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(4, 1) && g.has_edge(1, 4));
    }

    #[test]
    fn wide_graphs_span_several_words() {
        let mut g = Graph::empty(130).unwrap();
        g.add_edge(130, 1).unwrap();
        g.add_edge(65, 64).unwrap();
        assert!(g.has_edge(1, 130));
        assert!(g.has_edge(64, 65));
        assert_eq!(g.degree(130), 1);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(65, 64), (130, 1)]);
        g.remove_edge(1, 130).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn components_and_degrees() {
        let g = Graph::from_edges(5, &[(1, 2), (4, 5)]).unwrap();
        assert_eq!(g.components(), vec![vec![1, 2], vec![3], vec![4, 5]]);
        assert!(!g.is_connected());
        assert_eq!(Graph::cycle(5).unwrap().max_degree(), 2);
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
    }
}
