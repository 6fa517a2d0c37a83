//! Small undirected graphs used for links, dual graphs and spanning trees.

/// An undirected graph whose arcs index into `nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph<N> {
    nodes: Vec<N>,
    arcs: Vec<(usize, usize)>,
}

impl<N> Graph<N> {
    pub fn new(nodes: Vec<N>, arcs: Vec<(usize, usize)>) -> Self {
        debug_assert!(arcs.iter().all(|&(a, b)| a < nodes.len() && b < nodes.len()));
        Graph { nodes, arcs }
    }

    pub fn nodes(&self) -> &[N] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.nodes.len());
        for &(a, b) in &self.arcs {
            uf.union(a, b);
        }
        uf.labels().1
    }

    /// A graph with no nodes counts as disconnected.
    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Dense component labels in order of first appearance, and their count.
    pub fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut map = vec![usize::MAX; n];
        let mut out = Vec::with_capacity(n);
        let mut count = 0;
        for x in 0..n {
            let r = self.find(x);
            if map[r] == usize::MAX {
                map[r] = count;
                count += 1;
            }
            out.push(map[r]);
        }
        (out, count)
    }
}
