use crate::error::{Error, Result};
use crate::graph::Graph;

/// Exact independence number for graphs on at most 64 vertices.
pub fn independence_number(g: &Graph) -> Result<usize> {
    Ok(max_independent_set(g)?.len())
}

/// A maximum independent set, as sorted vertex ids.
pub fn max_independent_set(g: &Graph) -> Result<Vec<usize>> {
    let n = g.n();
    if n > 64 {
        return Err(Error::ExactnessUnavailable(format!(
            "independence number is exact only up to 64 vertices, got {n}"
        )));
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).fold(0u64, |acc, w| acc | 1 << w))
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0u64;
    search(&adj, all, 0, &mut best);
    Ok(bits(best))
}

fn bits(mut m: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

fn search(adj: &[u64], mut cand: u64, mut chosen: u64, best: &mut u64) {
    // Vertices of degree at most one inside the candidate set can always be
    // taken: any optimum can be rearranged to contain them.
    loop {
        let mut progressed = false;
        let mut c = cand;
        while c != 0 {
            let v = c.trailing_zeros() as usize;
            c &= c - 1;
            if cand >> v & 1 == 0 {
                continue;
            }
            if (adj[v] & cand).count_ones() <= 1 {
                chosen |= 1 << v;
                cand &= !(adj[v] | 1 << v);
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    if cand == 0 {
        if chosen.count_ones() > best.count_ones() {
            *best = chosen;
        }
        return;
    }
    if chosen.count_ones() + greedy_cover_bound(adj, cand) <= best.count_ones() {
        return;
    }
    // Branch on a maximum-degree candidate.
    let mut v = 0;
    let mut deg = 0;
    let mut c = cand;
    while c != 0 {
        let u = c.trailing_zeros() as usize;
        c &= c - 1;
        let d = (adj[u] & cand).count_ones();
        if d > deg {
            deg = d;
            v = u;
        }
    }
    search(adj, cand & !(adj[v] | 1 << v), chosen | 1 << v, best);
    search(adj, cand & !(1 << v), chosen, best);
}

/// Upper bound on the independence number of `cand`: the number of cliques in
/// a greedy clique cover.
fn greedy_cover_bound(adj: &[u64], mut cand: u64) -> u32 {
    let mut cliques = 0;
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        let mut clique_cand = adj[v] & cand;
        cand &= !(1 << v);
        while clique_cand != 0 {
            let u = clique_cand.trailing_zeros() as usize;
            clique_cand &= adj[u];
            cand &= !(1 << u);
        }
        cliques += 1;
    }
    cliques
}
