use fiedler_core::nodal::{self, DEFAULT_TAU_REL};
use fiedler_core::perturb::{self, DEFAULT_STRICT_MARGIN};
use fiedler_core::search::random::{random_rooted_caterpillar, random_rooted_tree, random_tree};
use fiedler_core::spectral;
use fiedler_core::tree::io::{parse_edge_list, write_edge_list};
use fiedler_core::tree::{build_caterpillar, CaterpillarSpec, RootedBoundaryTree, Tree, Vertex};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tree_strategy(max_n: usize) -> impl Strategy<Value = Tree> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| random_tree(&mut ChaCha8Rng::seed_from_u64(seed), n))
}

fn relabel(t: &Tree, perm: &[Vertex]) -> Tree {
    let edges: Vec<_> = t.edges().into_iter().map(|(u, v, _)| (perm[u], perm[v])).collect();
    Tree::from_edges(t.n(), &edges).unwrap()
}

/// Backtracking isomorphism test on adjacency matrices.
fn isomorphic(a: &Tree, b: &Tree) -> bool {
    let n = a.n();
    if n != b.n() || a.degree_sequence() != b.degree_sequence() {
        return false;
    }
    let adj = |t: &Tree| {
        let mut m = vec![vec![false; n]; n];
        for (u, v, _) in t.edges() {
            m[u][v] = true;
            m[v][u] = true;
        }
        m
    };
    let (ma, mb) = (adj(a), adj(b));
    fn extend(i: usize, map: &mut Vec<usize>, used: &mut [bool], a: &Tree, b: &Tree, ma: &[Vec<bool>], mb: &[Vec<bool>]) -> bool {
        if i == map.capacity() {
            return true;
        }
        for j in 0..used.len() {
            if used[j] || a.degree(i) != b.degree(j) {
                continue;
            }
            if (0..i).any(|k| ma[i][k] != mb[j][map[k]]) {
                continue;
            }
            used[j] = true;
            map.push(j);
            if extend(i + 1, map, used, a, b, ma, mb) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
        false
    }
    extend(0, &mut Vec::with_capacity(n), &mut vec![false; n], a, b, &ma, &mb)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_code_is_invariant_under_relabeling(t in tree_strategy(12), seed in any::<u64>()) {
        let mut perm: Vec<Vertex> = (0..t.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(t.canonical_code(), relabel(&t, &perm).canonical_code());
    }

    #[test]
    fn canonical_code_decides_isomorphism(a in tree_strategy(8), b in tree_strategy(8)) {
        if a.n() == b.n() {
            prop_assert_eq!(a.canonical_code() == b.canonical_code(), isomorphic(&a, &b));
        }
    }

    #[test]
    fn edge_list_round_trip(t in tree_strategy(15)) {
        let back = parse_edge_list(&write_edge_list(&t)).unwrap();
        prop_assert_eq!(back.canonical_code(), t.canonical_code());
    }

    #[test]
    fn rayleigh_matrix_and_edge_forms_agree(t in tree_strategy(12), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..t.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = spectral::rayleigh(&spectral::laplacian(&t), &f).unwrap();
        let b = spectral::edge_rayleigh(&t, &f).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn dirichlet_eigenvalue_interlaces(t in tree_strategy(12), root_seed in any::<usize>()) {
        // The Dirichlet matrix is a principal submatrix of L, so its
        // smallest eigenvalue lies between 0 and α.
        let root = root_seed % t.n();
        let nu = spectral::dirichlet_nu(&RootedBoundaryTree::new(t.clone(), root).unwrap()).unwrap().value;
        let alpha = spectral::algebraic_connectivity(&t).unwrap().value;
        prop_assert!(nu > 0.0);
        prop_assert!(nu <= alpha + 1e-10);
    }

    #[test]
    fn caterpillar_builder_realizes_the_spine(spine in prop::collection::vec(2usize..6, 0..7)) {
        let spec = CaterpillarSpec::new(spine.clone());
        let t = build_caterpillar(&spec).unwrap();
        prop_assert!(t.is_caterpillar());
        prop_assert!(spec.realizes(&t.degree_sequence()));
        if !spine.is_empty() {
            let degrees: Vec<usize> = t.spine().unwrap().iter().map(|&v| t.degree(v)).collect();
            let rev: Vec<usize> = spine.iter().rev().copied().collect();
            prop_assert!(degrees == spine || degrees == rev);
        }
    }

    #[test]
    fn branches_partition_the_other_vertices(t in tree_strategy(12), r in any::<usize>(), u in any::<usize>()) {
        let (root, u) = (r % t.n(), u % t.n());
        let branches = t.branches_at(root, u).unwrap();
        let mut seen: Vec<Vertex> = branches.concat();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), branches.iter().map(Vec::len).sum::<usize>());
        for b in &branches {
            prop_assert!(t.induces_connected(b));
            prop_assert!(!b.contains(&u));
        }
        if u == root {
            prop_assert_eq!(branches.len(), t.degree(u));
            prop_assert_eq!(seen.len(), t.n() - 1);
        } else {
            prop_assert_eq!(branches.len(), t.degree(u) - 1);
        }
    }

    #[test]
    fn split_reproduces_alpha(t in tree_strategy(12)) {
        let a = nodal::analyze(&t, DEFAULT_TAU_REL).unwrap();
        prop_assert!(t.induces_connected(&a.domain_pos));
        prop_assert!(t.induces_connected(&a.domain_neg));
        let split = nodal::geometric_split(&t, &a).unwrap();
        let (r1, r2) = nodal::verify_split(&split, a.alpha).unwrap();
        prop_assert!(r1 <= 1e-8 && r2 <= 1e-8, "residuals {} {}", r1, r2);
        for w in [split.w1, split.w2].into_iter().flatten() {
            prop_assert!(w >= 1.0);
        }
    }

    #[test]
    fn p2_strictly_decreases(seed in any::<u64>(), n in 3usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rbt = random_rooted_caterpillar(&mut rng, n, 1.0);
        let trunk = rbt.trunk().unwrap();
        for &vj in trunk.iter().filter(|&&v| v != rbt.root()) {
            let after = perturb::perturb_p2(&rbt, vj).unwrap();
            let rec = perturb::PerturbationRecord::measure(perturb::PerturbKind::P2, &rbt, &after, vec![]).unwrap();
            prop_assert!(rec.strictly_decreased(DEFAULT_STRICT_MARGIN), "{:?}", rec);
        }
    }

    #[test]
    fn p1_strictly_decreases(seed in any::<u64>(), n in 4usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rbt = random_rooted_caterpillar(&mut rng, n, 1.5);
        let trunk = rbt.trunk().unwrap();
        let t = rbt.tree();
        for w in (0..n).filter(|&w| w != rbt.root() && t.is_pendant(w)) {
            let vi = t.neighbors(w)[0].0;
            if !trunk.contains(&vi) || (vi == rbt.root() && rbt.boundary_edge() == Some(w)) {
                continue;
            }
            for &vj in trunk.iter().filter(|&&vj| vj != w && rbt.height(vj) > rbt.height(vi)) {
                let after = perturb::perturb_p1(&rbt, w, vi, vj).unwrap();
                prop_assert_eq!(after.n(), n);
                prop_assert_eq!(after.boundary_weight(), 1.5);
                let rec = perturb::PerturbationRecord::measure(perturb::PerturbKind::P1, &rbt, &after, vec![]).unwrap();
                prop_assert!(rec.strictly_decreased(DEFAULT_STRICT_MARGIN), "{:?}", rec);
            }
        }
    }

    #[test]
    fn gluing_inequality(seed in any::<u64>(), n1 in 2usize..9, n2 in 2usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_rooted_tree(&mut rng, n1);
        let b = random_rooted_tree(&mut rng, n2);
        let t = perturb::glue(&a, &b);
        prop_assert_eq!(t.n(), n1 + n2 - 1);
        let nu1 = spectral::dirichlet_nu(&a).unwrap().value;
        let nu2 = spectral::dirichlet_nu(&b).unwrap().value;
        let alpha = spectral::algebraic_connectivity(&t).unwrap().value;
        prop_assert!(alpha <= nu1.max(nu2) + 1e-10);
        if (nu1 - nu2).abs() > 1e-8 {
            prop_assert!(alpha < nu1.max(nu2));
        }
    }
}

#[test]
fn spider_rearrangement_lowers_nu_and_keeps_degrees() {
    // Spider with legs of length 2, rooted at the end of leg 0.
    let spider = Tree::spider(&[2, 2, 2]);
    let leaf = (0..spider.n()).find(|&v| spider.is_pendant(v)).unwrap();
    let rbt = RootedBoundaryTree::new(spider.clone(), leaf).unwrap();
    let nu = spectral::dirichlet_nu(&rbt).unwrap();
    let f = spectral::with_root_zero(&rbt, &nu.vector);
    let others: Vec<Vertex> = (0..spider.n())
        .filter(|&v| v != leaf && spider.is_pendant(v))
        .collect();
    let x = spider.path_between(leaf, others[0]);
    let y = spider.path_between(leaf, others[1]);
    let after = perturb::rearrange_branches(&rbt, &f, &x, &y).unwrap();
    assert_eq!(after.tree().degree_sequence(), spider.degree_sequence());
    assert!(after.tree().is_caterpillar());
    let after_nu = spectral::dirichlet_nu(&after).unwrap().value;
    assert!(after_nu < nu.value * (1.0 - DEFAULT_STRICT_MARGIN));
}
