use dendro::omega::{enumerate_maps, faces_of};
use dendro::operads::{enumerate_operad_maps, omega_operad};
use dendro::trees::{graft, Tree};
use proptest::prelude::*;

/// Builds a tree from vertex arities; vertex k > 0 sits on the free leaf
/// picked by `picks[k]`. Names carry the given prefix.
fn build(prefix: &str, arities: &[usize], picks: &[usize]) -> Tree {
    let e = |i: usize| format!("{}e{}", prefix, i);
    let mut spec = Vec::new();
    let mut free = vec![0usize];
    let mut next = 1;
    for (k, &a) in arities.iter().enumerate() {
        if free.is_empty() {
            break;
        }
        let out = free.remove(picks[k] % free.len());
        let ins: Vec<String> = (0..a).map(|j| e(next + j)).collect();
        free.extend(next..next + a);
        next += a;
        spec.push((format!("{}v{}", prefix, k), e(out), ins));
    }
    Tree::new(&e(0), &spec).unwrap()
}

fn shape(max_vertices: usize, max_arity: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (0..=max_vertices).prop_flat_map(move |n| (prop::collection::vec(0..=max_arity, n), prop::collection::vec(0..64usize, n)))
}

/// Renames every edge and vertex, reorders vertices and permutes inputs.
fn scramble(t: &Tree, seed: &[usize]) -> Tree {
    let mut spec = t.spec();
    let edges: Vec<String> = t.edges().to_vec();
    let mut order: Vec<usize> = (0..edges.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, seed[i % seed.len().max(1)] % (i + 1));
    }
    let ren = |s: &str| format!("x{}", order[edges.iter().position(|e| e == s).unwrap()]);
    for (k, v) in spec.iter_mut().enumerate() {
        v.0 = format!("w{}", seed.get(k).copied().unwrap_or(0) * 31 + k);
        v.1 = ren(&v.1);
        let r = seed.get(k).copied().unwrap_or(0);
        if !v.2.is_empty() {
            let rot = r % v.2.len();
            v.2.rotate_left(rot);
        }
        if r % 2 == 1 {
            v.2.reverse();
        }
        v.2 = v.2.iter().map(|s| ren(s)).collect();
    }
    if let Some(&r) = seed.first() {
        let n = spec.len().max(1);
        spec.rotate_left(r % n);
    }
    Tree::new(&ren(&edges[0]), &spec).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1200))]

    #[test]
    fn canonical_code_is_an_invariant((ar, pk) in shape(7, 3), seed in prop::collection::vec(0..1000usize, 1..12)) {
        let t = build("", &ar, &pk);
        let s = scramble(&t, &seed);
        prop_assert_eq!(t.canonical_code(), s.canonical_code());
        let (c, _) = s.canonical_form();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.canonical_code(), t.canonical_code());
        let back = Tree::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.canonical_code(), t.canonical_code());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn grafting_is_associative(
        (a1, p1) in shape(3, 3), (a2, p2) in shape(3, 3), (a3, p3) in shape(3, 3),
        i in 0..16usize, j in 0..16usize,
    ) {
        let (s, r, u) = (build("s", &a1, &p1), build("r", &a2, &p2), build("u", &a3, &p3));
        let (sl, rl) = (s.leaves(), r.leaves());
        prop_assume!(!sl.is_empty() && !rl.is_empty() && r.degree() > 0);
        let a = s.edge_name(sl[i % sl.len()]).to_string();
        let b = r.edge_name(rl[j % rl.len()]).to_string();
        let left = graft(&graft(&s, &a, &r).unwrap(), &b, &u).unwrap();
        let right = graft(&s, &a, &graft(&r, &b, &u).unwrap()).unwrap();
        prop_assert_eq!(left.canonical_code(), right.canonical_code());
        prop_assert_eq!(left.num_edges(), s.num_edges() + r.num_edges() + u.num_edges() - 2);
        prop_assert_eq!(left.degree(), s.degree() + r.degree() + u.degree());
    }

    #[test]
    fn faces_drop_one_vertex_or_edge((ar, pk) in shape(4, 3)) {
        let t = build("", &ar, &pk);
        prop_assume!(t.degree() > 0);
        for f in faces_of(&t).unwrap() {
            prop_assert!(f.is_monic());
            prop_assert!(f.source.degree() + 1 == t.degree());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operad_maps_match_omega_maps((a1, p1) in shape(2, 2), (a2, p2) in shape(2, 2)) {
        let (s, t) = (build("s", &a1, &p1), build("t", &a2, &p2));
        let omega = enumerate_maps(&s, &t).len();
        let operad = enumerate_operad_maps(&omega_operad(&s), &omega_operad(&t)).len();
        prop_assert_eq!(omega, operad, "{} -> {}", s, t);
    }
}
