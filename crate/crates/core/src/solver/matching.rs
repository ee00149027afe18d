use std::collections::VecDeque;

use crate::graph::{Graph, Vertex, VertexSet};

/// Maximum-cardinality matching as sorted `(u, v)` pairs with `u < v`.
///
/// With `between = Some((a, b))` only edges with one end in `a` and the other
/// in `b` may be used.
pub fn max_matching(g: &Graph, between: Option<(&VertexSet, &VertexSet)>) -> Vec<(Vertex, Vertex)> {
    let adj: Vec<Vec<Vertex>> = match between {
        None => g.adjacency_lists(),
        Some((a, b)) => (0..g.n())
            .map(|u| {
                g.neighbors(u)
                    .filter(|&v| (a.contains(u) && b.contains(v)) || (b.contains(u) && a.contains(v)))
                    .collect()
            })
            .collect(),
    };
    pairs(&maximum_matching(&adj, None))
}

/// Converts a mate array into sorted pairs.
pub fn pairs(mate: &[Option<Vertex>]) -> Vec<(Vertex, Vertex)> {
    mate.iter()
        .enumerate()
        .filter_map(|(u, &m)| m.filter(|&v| u < v).map(|v| (u, v)))
        .collect()
}

/// Edmonds' blossom algorithm on adjacency lists. `initial` seeds the search
/// with an existing matching (it must be valid); otherwise a greedy matching
/// is used. Returns the mate of every vertex.
pub fn maximum_matching(adj: &[Vec<Vertex>], initial: Option<&[Option<Vertex>]>) -> Vec<Option<Vertex>> {
    let n = adj.len();
    let mut mate: Vec<Option<Vertex>> = match initial {
        Some(m) => m.to_vec(),
        None => {
            let mut m = vec![None; n];
            for u in 0..n {
                if m[u].is_none() {
                    if let Some(&v) = adj[u].iter().find(|&&v| v != u && m[v].is_none()) {
                        m[u] = Some(v);
                        m[v] = Some(u);
                    }
                }
            }
            m
        }
    };
    let mut blossom = Blossom::new(n);
    for root in 0..n {
        if mate[root].is_none() {
            if let Some(end) = blossom.find_path(adj, &mate, root) {
                blossom.augment(&mut mate, end);
            }
        }
    }
    mate
}

struct Blossom {
    parent: Vec<Option<Vertex>>,
    base: Vec<Vertex>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<Vertex>,
}

impl Blossom {
    fn new(n: usize) -> Self {
        Self {
            parent: vec![None; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&self, mate: &[Option<Vertex>], mut a: Vertex, mut b: Vertex) -> Vertex {
        let mut seen = vec![false; mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            match mate[a] {
                None => break,
                Some(m) => a = self.parent[m].expect("outer vertex has a parent"),
            }
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[mate[b].expect("inner path")].expect("outer vertex has a parent");
        }
    }

    fn mark_path(&mut self, mate: &[Option<Vertex>], mut v: Vertex, b: Vertex, mut child: Vertex) {
        while self.base[v] != b {
            let m = mate[v].expect("path vertex matched");
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = Some(child);
            child = m;
            v = self.parent[m].expect("outer vertex has a parent");
        }
    }

    fn find_path(&mut self, adj: &[Vec<Vertex>], mate: &[Option<Vertex>], root: Vertex) -> Option<Vertex> {
        let n = adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = None);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.queue.clear();
        self.used[root] = true;
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in &adj[v] {
                if to == v || self.base[v] == self.base[to] || mate[v] == Some(to) {
                    continue;
                }
                let to_is_outer = to == root || mate[to].is_some_and(|m| self.parent[m].is_some());
                if to_is_outer {
                    let cur = self.lca(mate, v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(mate, v, cur, to);
                    self.mark_path(mate, to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to].is_none() {
                    self.parent[to] = Some(v);
                    match mate[to] {
                        None => return Some(to),
                        Some(m) => {
                            self.used[m] = true;
                            self.queue.push_back(m);
                        }
                    }
                }
            }
        }
        None
    }

    fn augment(&self, mate: &mut [Option<Vertex>], mut v: Vertex) {
        loop {
            let pv = self.parent[v].expect("augmenting path");
            let ppv = mate[pv];
            mate[v] = Some(pv);
            mate[pv] = Some(v);
            match ppv {
                None => break,
                Some(next) => v = next,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_gnp;

    fn brute(g: &Graph) -> usize {
        fn rec(edges: &[(usize, usize)], used: u32) -> usize {
            match edges.split_first() {
                None => 0,
                Some((&(u, v), rest)) => {
                    let skip = rec(rest, used);
                    if used >> u & 1 == 0 && used >> v & 1 == 0 {
                        skip.max(1 + rec(rest, used | 1 << u | 1 << v))
                    } else {
                        skip
                    }
                }
            }
        }
        let edges: Vec<_> = g.edges().collect();
        rec(&edges, 0)
    }

    fn assert_matching(g: &Graph, m: &[(usize, usize)]) {
        let mut seen = vec![false; g.n()];
        for &(u, v) in m {
            assert!(g.has_edge(u, v));
            assert!(!seen[u] && !seen[v]);
            seen[u] = true;
            seen[v] = true;
        }
    }

    #[test]
    fn small_examples() {
        let m3 = Graph::from_edges(6, &[(0, 1), (2, 3), (4, 5)]);
        assert_eq!(max_matching(&m3, None).len(), 3);
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(max_matching(&star, None).len(), 1);
        let mut k33 = Graph::new(6);
        for u in 0..3 {
            for v in 3..6 {
                k33.add_edge(u, v);
            }
        }
        let a = VertexSet::range(0, 3);
        let b = VertexSet::range(3, 6);
        let m = max_matching(&k33, Some((&a, &b)));
        assert_eq!(m.len(), 3);
        assert!(m.iter().all(|&(u, v)| u < 3 && v >= 3));
    }

    #[test]
    fn odd_cycles_need_blossoms() {
        // Two triangles joined by a path: greedy can get stuck, blossoms fix it.
        let g = Graph::from_edges(
            8,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 5)],
        );
        assert_eq!(max_matching(&g, None).len(), 4);
        assert_eq!(max_matching(&Graph::cycle(9), None).len(), 4);
    }

    #[test]
    fn restricted_to_crossing_edges() {
        let g = Graph::complete(6);
        let a = VertexSet::range(0, 2);
        let b = VertexSet::range(2, 6);
        let m = max_matching(&g, Some((&a, &b)));
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|&(u, _)| u < 2));
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..60 {
            let g = sample_gnp(11, 0.15 + 0.01 * seed as f64, seed).unwrap();
            let m = max_matching(&g, None);
            assert_matching(&g, &m);
            assert_eq!(m.len(), brute(&g), "seed {seed}");
        }
    }
}
