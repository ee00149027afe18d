mod common;

use proptest::prelude::*;

use monocycle::absorption::{fine_absorb_with, FineOptions, PreconditionPolicy};
use monocycle::embed::{embed_blueprint, Blueprint, EmbedBudget};
use monocycle::prob::{check_pair_density, chernoff_bound, find_bad_set};
use monocycle::reduced::choose_components;
use monocycle::regularity::{is_regular_pair, RegularityMode};
use monocycle::solver::{independence_number, max_matching, min_mono_cycle_partition, SolveBudget};
use monocycle::{
    color_edges, common_neighborhood, sample_gnp, verify_partition, ColoredGraph, ColoringStrategy, Cycle, CycleCover,
    Graph, VertexSet,
};

/// A coloured graph on `n` vertices: one entry per pair, `None` = no edge.
fn colored(n: usize, r: usize, slots: &[Option<u8>]) -> ColoredGraph {
    let mut g = ColoredGraph::new(n, r);
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            if let Some(c) = slots[k] {
                g.add_edge(a, b, c as usize % r).unwrap();
            }
            k += 1;
        }
    }
    g
}

fn arb_colored(max_n: usize, max_r: usize) -> impl Strategy<Value = ColoredGraph> {
    (1..=max_n, 1..=max_r).prop_flat_map(|(n, r)| {
        proptest::collection::vec(proptest::option::weighted(0.6, 0..r as u8), n * (n - 1) / 2)
            .prop_map(move |slots| colored(n, r, &slots))
    })
}

fn arb_plain(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits[k] {
                        g.add_edge(a, b);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_matches_enumeration(g in arb_colored(7, 3)) {
        let sol = min_mono_cycle_partition(&g, &SolveBudget::default()).unwrap();
        prop_assert!(verify_partition(&g, &sol.cover).valid);
        prop_assert_eq!(sol.cover.len(), sol.count);
        prop_assert!(sol.count <= g.n());
        prop_assert_eq!(sol.count, common::oracle_min_partition(&g));
    }

    #[test]
    fn adding_edges_never_increases_the_optimum(g in arb_colored(8, 2), extra in proptest::collection::vec((0usize..8, 0usize..8, 0usize..2), 1..6)) {
        let before = min_mono_cycle_partition(&g, &SolveBudget::default()).unwrap().count;
        let mut h = g.clone();
        for (a, b, c) in extra {
            if a < h.n() && b < h.n() && a != b && !h.has_edge(a, b) {
                h.add_edge(a, b, c % h.r()).unwrap();
            }
        }
        let after = min_mono_cycle_partition(&h, &SolveBudget::default()).unwrap().count;
        prop_assert!(after <= before);
    }

    #[test]
    fn hamiltonian_recoloured_to_one_colour_needs_one_cycle(perm in Just((0..9).collect::<Vec<usize>>()).prop_shuffle(), g in arb_plain(9)) {
        let n = g.n();
        let order: Vec<usize> = perm.into_iter().filter(|&v| v < n).collect();
        let mut h = g.clone();
        for i in 0..n {
            h.add_edge(order[i], order[(i + 1) % n]);
        }
        let mono = ColoredGraph::monochromatic(&h, 2, 1);
        let sol = min_mono_cycle_partition(&mono, &SolveBudget::default()).unwrap();
        prop_assert_eq!(sol.count, 1);
    }

    #[test]
    fn verify_partition_matches_the_definition(
        g in arb_colored(8, 2),
        labels in proptest::collection::vec(0usize..4, 8),
        colour in proptest::collection::vec(proptest::option::of(0usize..2), 4),
        shuffle in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let n = g.n();
        let mut cycles = Vec::new();
        let mut expected = true;
        for b in 0..4 {
            let vs: Vec<usize> = shuffle.iter().copied().filter(|&v| v < n && labels[v] == b).collect();
            if vs.is_empty() {
                continue;
            }
            let c = colour[b];
            let ok = match (vs.len(), c) {
                (1, None) => true,
                (1, Some(_)) | (_, None) => false,
                (2, Some(c)) => g.color_of(vs[0], vs[1]) == Some(c),
                (k, Some(c)) => (0..k).all(|i| g.color_of(vs[i], vs[(i + 1) % k]) == Some(c)),
            };
            expected &= ok;
            cycles.push(Cycle::new(vs, c));
        }
        let cover = CycleCover::new(cycles);
        prop_assert_eq!(verify_partition(&g, &cover).valid, expected);
        // Dropping a nonempty block leaves some vertex uncovered.
        if cover.len() > 1 {
            let partial = CycleCover::new(cover.cycles()[1..].to_vec());
            prop_assert!(!verify_partition(&g, &partial).valid);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_colour_classes_partition_edges(n in 1usize..60, p in 0.0f64..=1.0, seed in any::<u64>(), r in 1usize..5) {
        let a = sample_gnp(n, p, seed).unwrap();
        prop_assert_eq!(&a, &sample_gnp(n, p, seed).unwrap());
        let g = color_edges(&a, r, &ColoringStrategy::UniformRandom, seed).unwrap();
        prop_assert_eq!(&g, &color_edges(&a, r, &ColoringStrategy::UniformRandom, seed).unwrap());
        let per: usize = (0..r).map(|c| g.color_edge_count(c)).sum();
        prop_assert_eq!(per, a.edge_count());
        prop_assert_eq!(g.edge_count(), a.edge_count());
        for (u, v, c) in g.edges() {
            prop_assert!(a.has_edge(u, v));
            prop_assert!(c < r);
        }
    }

    #[test]
    fn common_neighbourhood_is_the_intersection(g in arb_colored(12, 2), s in proptest::collection::btree_set(0usize..12, 1..4), x in proptest::collection::btree_set(0usize..12, 0..12)) {
        let n = g.n();
        let s: Vec<usize> = s.into_iter().filter(|&v| v < n).collect();
        prop_assume!(!s.is_empty());
        let x = VertexSet::from_iter_dedup(x.into_iter().filter(|&v| v < n));
        let got = common_neighborhood(&g, &VertexSet::from_iter_dedup(s.iter().copied()), &x).unwrap();
        let want: Vec<usize> = x.iter().filter(|&v| s.iter().all(|&u| g.has_edge(u, v))).collect();
        prop_assert_eq!(got.as_slice(), &want[..]);
    }

    #[test]
    fn pair_density_is_symmetric(seed in any::<u64>(), p in 0.05f64..1.0, alpha in 0.0f64..1.0) {
        let g = ColoredGraph::monochromatic(&sample_gnp(40, 0.4, seed).unwrap(), 1, 0);
        let (x, y) = (VertexSet::range(0, 15), VertexSet::range(15, 40));
        let a = check_pair_density(&g, &x, &y, p, alpha).unwrap();
        let b = check_pair_density(&g, &y, &x, p, alpha).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn chernoff_is_monotone(n in 1usize..1000, p in 0.0f64..1.0, alpha in 0.01f64..1.4, dn in 1usize..100, dp in 0.0f64..0.5, da in 0.0f64..0.09) {
        let base = chernoff_bound(n, p, alpha).unwrap();
        prop_assert!(chernoff_bound(n + dn, p, alpha).unwrap() <= base);
        prop_assert!(chernoff_bound(n, (p + dp).min(1.0), alpha).unwrap() <= base);
        prop_assert!(chernoff_bound(n, p, alpha + da).unwrap() <= base);
    }

    #[test]
    fn bad_set_leaves_no_deviant_set(g in arb_colored(16, 1), xs in 1usize..8, k in 1usize..=3, alpha in 0.1f64..0.9, p in 0.1f64..0.9) {
        let n = g.n();
        prop_assume!(n > xs + k);
        let x = VertexSet::range(0, xs);
        let rep = find_bad_set(&g, &x, k, alpha, p).unwrap();
        prop_assert!(rep.y.is_disjoint(&x));
        prop_assert!(common::deviant_outside(&g, &x, &rep.y, k, alpha, p).is_empty());
    }

    #[test]
    fn independence_and_matching_are_exact(g in arb_plain(12)) {
        prop_assert_eq!(independence_number(&g).unwrap(), common::brute_independence(&g));
        let m = max_matching(&g, None);
        prop_assert_eq!(m.len(), common::brute_matching(&g));
        let mut used = vec![false; g.n()];
        for &(a, b) in &m {
            prop_assert!(g.has_edge(a, b));
            prop_assert!(!used[a] && !used[b]);
            used[a] = true;
            used[b] = true;
        }
    }

    #[test]
    fn crossing_matching_stays_across(g in arb_plain(12), split in 1usize..11) {
        let n = g.n();
        prop_assume!(split < n);
        let (a, b) = (VertexSet::range(0, split), VertexSet::range(split, n));
        let m = max_matching(&g, Some((&a, &b)));
        let mut crossing = Graph::new(n);
        for (u, v) in g.edges() {
            if (u < split) != (v < split) {
                crossing.add_edge(u, v);
            }
        }
        prop_assert_eq!(m.len(), common::brute_matching(&crossing));
        for &(u, v) in &m {
            prop_assert!((u < split) != (v < split));
        }
    }

    #[test]
    fn choose_components_meets_its_guarantees(g in arb_colored(14, 3), gamma_frac in 0.05f64..1.0) {
        let t = g.n();
        let d = g.plain().min_degree();
        prop_assume!(d > 0);
        let delta = d as f64 / t as f64;
        let gamma = gamma_frac * delta;
        let rg = choose_components(&g, delta, gamma).unwrap();
        let r = g.r();
        prop_assert!(common::component_count(rg.graph()) as f64 <= (r * r) as f64 / gamma + 1e-9);
        prop_assert!(rg.graph().plain().min_degree() as f64 >= (delta - gamma) * t as f64 - 1e-9);
        for (u, v, c) in rg.graph().edges() {
            prop_assert_eq!(g.color_of(u, v), Some(c));
        }
    }

    #[test]
    fn slices_of_regular_pairs_stay_regular(seed in any::<u64>(), na in 4usize..10, nb in 4usize..10, eps in 0.2f64..0.5, keep_a in 0usize..5, keep_b in 0usize..5) {
        let n = na + nb;
        let host = sample_gnp(n, 0.7, seed).unwrap();
        let mut g = Graph::new(n);
        for (u, v) in host.edges() {
            if (u < na) != (v < na) {
                g.add_edge(u, v);
            }
        }
        let (a, b) = (VertexSet::range(0, na), VertexSet::range(na, n));
        let probe = is_regular_pair(&g, 0.7, &a, &b, eps, 1.0, &RegularityMode::Exhaustive).unwrap();
        prop_assume!(probe.min_density.is_finite());
        let d = probe.min_density + eps;
        prop_assert!(is_regular_pair(&g, 0.7, &a, &b, eps, d, &RegularityMode::Exhaustive).unwrap().regular);
        for alpha in [0.5, 2.0 / 3.0] {
            let ka = ((alpha * na as f64).ceil() as usize + keep_a).min(na);
            let kb = ((alpha * nb as f64).ceil() as usize + keep_b).min(nb);
            let sa = VertexSet::range(na - ka, na);
            let sb = VertexSet::range(na, na + kb);
            prop_assert!(is_regular_pair(&g, 0.7, &sa, &sb, eps / alpha, d, &RegularityMode::Exhaustive).unwrap().regular);
        }
    }

    #[test]
    fn embeddings_are_bijective_and_edge_preserving(seed in any::<u64>(), half in 2usize..8, q in 0.5f64..1.0) {
        // A 2·half-cycle alternating between two clusters of size `half`.
        let k = 2 * half;
        let bp = Blueprint {
            cluster: (0..k).map(|i| i % 2).collect(),
            edges: (0..k).map(|i| (i, (i + 1) % k, Some(0))).collect(),
        };
        let n = k + 3;
        let host = sample_gnp(n, q, seed).unwrap();
        let g = color_edges(&host, 2, &ColoringStrategy::RoundRobin, seed).unwrap();
        let clusters = vec![VertexSet::range(0, half), VertexSet::range(half, k)];
        if let Ok(e) = embed_blueprint(&bp, &g, &clusters, &EmbedBudget::default()) {
            let mut seen = vec![false; n];
            for (h, &v) in e.psi.iter().enumerate() {
                prop_assert!(clusters[bp.cluster[h]].contains(v));
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
            for &(u, v, c) in &bp.edges {
                prop_assert_eq!(g.color_of(e.psi[u], e.psi[v]), c);
            }
        }
    }

    #[test]
    fn fine_absorb_output_stays_inside_and_small(seed in any::<u64>(), wn in 1usize..6, un in 10usize..40, q in 0.3f64..1.0) {
        let n = wn + un;
        let host = sample_gnp(n, q, seed).unwrap();
        let g = color_edges(&host, 2, &ColoringStrategy::UniformRandom, seed).unwrap();
        let (w, u) = (VertexSet::range(0, wn), VertexSet::range(wn, n));
        let opts = FineOptions { policy: PreconditionPolicy::Report, ..FineOptions::default() };
        let (cover, rep) = fine_absorb_with(&g, &u, &w, wn.max(2), 2, &opts).unwrap();
        let forbidden = u.union(&w).complement(n);
        prop_assert!(monocycle::verify_cover(&g, &cover, &w, &forbidden).valid);
        prop_assert!(cover.vertex_count() <= 3 * wn);
        prop_assert_eq!(rep.cycles, cover.len());
    }

    #[test]
    fn edge_lists_and_covers_round_trip(g in arb_colored(10, 3)) {
        let back = ColoredGraph::parse(&g.to_edge_list()).unwrap();
        prop_assert_eq!(&back, &g);
        let sol = min_mono_cycle_partition(&g, &SolveBudget::default()).unwrap();
        let json = sol.cover.to_json().unwrap();
        prop_assert_eq!(CycleCover::from_json(&json).unwrap(), sol.cover);
    }
}
