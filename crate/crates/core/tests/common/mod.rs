//! Slow, independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use monocycle::allocation::AllocationResult;
use monocycle::reduced::ReducedGraph;
use monocycle::{ColoredGraph, Graph, VertexSet};

/// Can the vertices of `block` be arranged as one monochromatic cycle
/// (single vertices and single edges included)? Tries every cyclic order.
pub fn block_is_cycle(g: &ColoredGraph, block: &[usize]) -> bool {
    match block.len() {
        0 => false,
        1 => true,
        2 => g.has_edge(block[0], block[1]),
        _ => (0..g.r()).any(|c| {
            let mut order = vec![block[0]];
            let mut rest = block[1..].to_vec();
            extend_cycle(g, c, &mut order, &mut rest)
        }),
    }
}

fn extend_cycle(g: &ColoredGraph, c: usize, order: &mut Vec<usize>, rest: &mut Vec<usize>) -> bool {
    let last = *order.last().unwrap();
    if rest.is_empty() {
        return g.color_of(last, order[0]) == Some(c);
    }
    for i in 0..rest.len() {
        let v = rest[i];
        if g.color_of(last, v) != Some(c) {
            continue;
        }
        rest.swap_remove(i);
        order.push(v);
        if extend_cycle(g, c, order, rest) {
            return true;
        }
        order.pop();
        rest.push(v);
        let k = rest.len() - 1;
        rest.swap(i, k);
    }
    false
}

/// Minimum number of blocks over all set partitions of `V(g)` into
/// cycle-realisable blocks, by enumerating restricted growth strings.
pub fn oracle_min_partition(g: &ColoredGraph) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    let mut memo: HashMap<u32, bool> = HashMap::new();
    let mut label = vec![0usize; n];
    let mut best = n;
    enumerate(g, 1, 1, &mut label, &mut memo, &mut best);
    best
}

fn enumerate(
    g: &ColoredGraph,
    i: usize,
    blocks: usize,
    label: &mut [usize],
    memo: &mut HashMap<u32, bool>,
    best: &mut usize,
) {
    let n = g.n();
    if i == n {
        if blocks >= *best {
            return;
        }
        let mut masks = vec![0u32; blocks];
        for (v, &b) in label.iter().enumerate() {
            masks[b] |= 1 << v;
        }
        let ok = masks.iter().all(|&m| {
            *memo.entry(m).or_insert_with(|| {
                let vs: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
                block_is_cycle(g, &vs)
            })
        });
        if ok {
            *best = blocks;
        }
        return;
    }
    for b in 0..=blocks {
        if b == blocks && blocks + 1 >= *best {
            continue;
        }
        label[i] = b;
        enumerate(g, i + 1, blocks.max(b + 1), label, memo, best);
    }
}

pub fn brute_independence(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20);
    (0u32..1 << n)
        .filter(|&m| (0..n).all(|a| m >> a & 1 == 0 || (a + 1..n).all(|b| m >> b & 1 == 0 || !g.has_edge(a, b))))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn brute_matching(g: &Graph) -> usize {
    fn go(g: &Graph, used: &mut Vec<bool>, from: usize) -> usize {
        let n = g.n();
        let Some(a) = (from..n).find(|&a| !used[a]) else {
            return 0;
        };
        used[a] = true;
        let mut best = go(g, used, a + 1);
        for b in a + 1..n {
            if !used[b] && g.has_edge(a, b) {
                used[b] = true;
                best = best.max(1 + go(g, used, a + 1));
                used[b] = false;
            }
        }
        used[a] = false;
        best
    }
    go(g, &mut vec![false; g.n()], 0)
}

/// Number of vertices of `x` adjacent (any colour) to every vertex of `s`.
pub fn brute_common_degree(g: &ColoredGraph, s: &[usize], x: &VertexSet) -> usize {
    x.iter().filter(|&v| s.iter().all(|&u| g.has_edge(u, v))).count()
}

/// All `k`-subsets of `pool` in lexicographic order.
pub fn subsets(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(pool: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..pool.len() {
            if pool.len() - i < k - cur.len() {
                break;
            }
            cur.push(pool[i]);
            go(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    go(pool, k, 0, &mut cur, &mut out);
    out
}

/// `k`-sets outside `X ∪ Y` whose common degree into `X` leaves
/// `(1 ± α) p^k |X|`.
pub fn deviant_outside(
    g: &ColoredGraph,
    x: &VertexSet,
    y: &VertexSet,
    k: usize,
    alpha: f64,
    p: f64,
) -> Vec<Vec<usize>> {
    let pool: Vec<usize> = (0..g.n()).filter(|&v| !x.contains(v) && !y.contains(v)).collect();
    let expect = p.powi(k as i32) * x.len() as f64;
    subsets(&pool, k)
        .into_iter()
        .filter(|s| {
            let d = brute_common_degree(g, s, x) as f64;
            d < (1.0 - alpha) * expect || d > (1.0 + alpha) * expect
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smallest p-density over `A' ⊆ A`, `B' ⊆ B` with `|A'| = ⌈ε|A|⌉`,
/// `|B'| = ⌈ε|B|⌉`, enumerating both sides. For a fixed `B'` the sparsest
/// `A'` of size `a` averages the `a` smallest degrees, which can only grow
/// with `a`, so the smallest admissible sizes give the global minimum.
/// Returns `None` when the enumeration would be too large.
pub fn brute_min_density(g: &Graph, p: f64, a: &[usize], b: &[usize], eps: f64, cap: f64) -> Option<f64> {
    let sa = ((eps * a.len() as f64 - 1e-9).ceil() as usize).clamp(1, a.len());
    let sb = ((eps * b.len() as f64 - 1e-9).ceil() as usize).clamp(1, b.len());
    if binomial(a.len(), sa) * binomial(b.len(), sb) > cap {
        return None;
    }
    let bs = subsets(b, sb);
    let mut best = f64::INFINITY;
    for xs in subsets(a, sa) {
        for ys in &bs {
            let e = xs
                .iter()
                .map(|&u| ys.iter().filter(|&&v| g.has_edge(u, v)).count())
                .sum::<usize>();
            best = best.min(e as f64 / (p * (sa * sb) as f64));
        }
    }
    Some(best)
}

/// Independent check of every blueprint postcondition; returns the first
/// failure.
pub fn check_allocation(res: &AllocationResult, r: &ReducedGraph, x: &[usize], m: usize) -> Result<(), String> {
    let t = r.t();
    if res.sizes != x {
        return Err("sizes differ".into());
    }
    let total: usize = x.iter().sum();
    let mut start = vec![0usize; t + 1];
    for i in 0..t {
        start[i + 1] = start[i] + x[i];
    }
    let cluster = |v: usize| (0..t).find(|&i| v < start[i + 1]).unwrap();
    let mut count = vec![0usize; total];
    for c in &res.cycles {
        for &v in &c.vertices {
            if v >= total {
                return Err(format!("vertex {v} out of range"));
            }
            count[v] += 1;
        }
    }
    if let Some(v) = res.isolated {
        count[v] += 1;
    }
    if count.iter().any(|&k| k != 1) {
        return Err("H does not use every vertex exactly once".into());
    }
    if res.cycles.len() != r.components().len() {
        return Err("one cycle per component expected".into());
    }
    const NONE: usize = usize::MAX;
    let mut adj = vec![[NONE; 2]; total];
    for c in &res.cycles {
        let vs = &c.vertices;
        if vs.len() < 4 {
            return Err("cycle too short to be triangle-free".into());
        }
        for q in 0..vs.len() {
            let (a, b) = (vs[q], vs[(q + 1) % vs.len()]);
            for (u, w) in [(a, b), (b, a)] {
                let slot = adj[u].iter().position(|&z| z == NONE).ok_or("Δ(H) > 2")?;
                adj[u][slot] = w;
            }
        }
    }
    let nbrs = |v: usize| adj[v].into_iter().filter(|&z| z != NONE);
    for v in 0..total {
        let [a, b] = adj[v];
        if a != NONE && b != NONE && (a == b || adj[a].contains(&b)) {
            return Err(format!("triangle or repeated edge at {v}"));
        }
    }
    for c in &res.cycles {
        let comp: HashSet<(usize, usize)> = r.components()[c.component].edges.iter().copied().collect();
        let mut seen = HashSet::new();
        let vs = &c.vertices;
        for q in 0..vs.len() {
            let (i, j) = (cluster(vs[q]), cluster(vs[(q + 1) % vs.len()]));
            let e = (i.min(j), i.max(j));
            if !comp.contains(&e) {
                return Err(format!("H-edge between clusters {i},{j} outside its component"));
            }
            seen.insert(e);
        }
        if seen != comp {
            return Err("component edge without an H-edge".into());
        }
    }
    let matching: HashSet<(usize, usize)> = r.matching().ok_or("no matching")?.iter().copied().collect();
    let along = |i: usize, j: usize| matching.contains(&(i.min(j), i.max(j)));
    for (i, buf) in res.buffers.iter().enumerate() {
        if 50 * buf.len() < x[i] {
            return Err(format!("buffer {i} below |X_i|/50"));
        }
        for &v in buf {
            if cluster(v) != i {
                return Err("buffer vertex outside its cluster".into());
            }
            for y in nbrs(v) {
                if !along(i, cluster(y)) {
                    return Err("buffer first neighbourhood leaves R'".into());
                }
                for z in nbrs(y) {
                    if !along(cluster(y), cluster(z)) {
                        return Err("buffer second neighbourhood leaves R'".into());
                    }
                }
            }
        }
    }
    for &(i, j) in &matching {
        let p = res
            .paths
            .iter()
            .find(|p| p.edge == (i, j))
            .ok_or("missing matching path")?;
        let vs = res.path_vertices(p);
        if (45 * vs.len()) < 4 * m {
            return Err(format!("path {i}-{j} shorter than 4m/45"));
        }
        for w in vs.windows(2) {
            let (a, b) = (cluster(w[0]), cluster(w[1]));
            if !((a, b) == (i, j) || (a, b) == (j, i)) || !adj[w[0]].contains(&w[1]) {
                return Err(format!("path {i}-{j} does not alternate along H"));
            }
        }
    }
    Ok(())
}

/// Monochromatic components (with at least one edge) by union-find.
pub fn component_count(g: &ColoredGraph) -> usize {
    let n = g.n();
    let mut total = 0;
    for c in 0..g.r() {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], v: usize) -> usize {
            let mut v = v;
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        let mut touched = vec![false; n];
        for (a, b, col) in g.edges() {
            if col == c {
                touched[a] = true;
                touched[b] = true;
                let (x, y) = (find(&mut parent, a), find(&mut parent, b));
                parent[x] = y;
            }
        }
        let roots: HashSet<usize> = (0..n).filter(|&v| touched[v]).map(|v| find(&mut parent, v)).collect();
        total += roots.len();
    }
    total
}
