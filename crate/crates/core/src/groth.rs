//! The dendroidal Grothendieck construction over a finite poset with meets.
//!
//! A poset with all finite meets is a cartesian category with unique
//! products, so N_d(S)_T is the set of edge labellings with
//! meet(inputs) ≤ output at every vertex (the top element on nullary ones).

use crate::dsets::{DSet, Universe};
use crate::fincat::FinCat;
use crate::nerve::{asa_map, check_presheaf_map, dendroidal_nerve, nerve_map};
use crate::operads::{ass, make_asa, FiniteOperad};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct MeetPoset {
    pub cat: FinCat,
    /// le[a][b] iff a ≤ b (an arrow a → b).
    pub le: Vec<Vec<bool>>,
    pub meet: Vec<Vec<usize>>,
    pub top: usize,
}

impl MeetPoset {
    pub fn new(cat: FinCat) -> Result<MeetPoset, String> {
        let n = cat.num_objects();
        let mut le = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                match cat.hom(a, b).len() {
                    0 => {}
                    1 => le[a][b] = true,
                    _ => return Err(format!("{}: not thin", cat.name)),
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && le[a][b] && le[b][a] {
                    return Err(format!("{}: not antisymmetric", cat.name));
                }
            }
        }
        let glb = |lower: &dyn Fn(usize) -> bool| -> Option<usize> {
            let cands: Vec<usize> = (0..n).filter(|&c| lower(c)).collect();
            cands.iter().copied().find(|&c| cands.iter().all(|&d| le[d][c]))
        };
        let top = glb(&|_| true).map(|_| ()).and_then(|_| (0..n).find(|&t| (0..n).all(|a| le[a][t]))).ok_or("no top element")?;
        let mut meet = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                meet[a][b] = glb(&|c| le[c][a] && le[c][b]).ok_or_else(|| format!("{}: no meet of {} and {}", cat.name, a, b))?;
            }
        }
        Ok(MeetPoset { cat, le, meet, top })
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top, |a, b| self.meet[a][b])
    }
}

/// A contravariant diagram S → truncated dendroidal sets.
pub struct Diagram {
    pub s: MeetPoset,
    pub values: Vec<DSet>,
    /// maps[(a, b)] for a ≤ b: X(b) → X(a), per shape.
    pub maps: HashMap<(usize, usize), Vec<Vec<usize>>>,
}

impl Diagram {
    pub fn map(&self, a: usize, b: usize) -> &[Vec<usize>] {
        &self.maps[&(a, b)]
    }

    /// Naturality of every map and contravariant functoriality.
    pub fn validate(&self) -> Vec<String> {
        let n = self.s.cat.num_objects();
        let mut bad = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if !self.s.le[a][b] {
                    continue;
                }
                let Some(m) = self.maps.get(&(a, b)) else {
                    bad.push(format!("no map for {} ≤ {}", a, b));
                    continue;
                };
                for e in check_presheaf_map(&self.values[b], &self.values[a], m) {
                    bad.push(format!("{} ≤ {}: {}", a, b, e));
                }
                if a == b && m.iter().any(|row| row.iter().enumerate().any(|(i, &x)| i != x)) {
                    bad.push(format!("identity at {} acts nontrivially", a));
                }
                for c in 0..n {
                    if self.s.le[b][c] {
                        let (ab, bc, ac) = (&self.maps[&(a, b)], &self.maps[&(b, c)], &self.maps[&(a, c)]);
                        if (0..ab.len()).any(|t| (0..bc[t].len()).any(|x| ab[t][bc[t][x]] != ac[t][x])) {
                            bad.push(format!("composite {} ≤ {} ≤ {} differs", a, b, c));
                        }
                    }
                }
            }
        }
        bad
    }
}

/// inn(t): the meet of the leaf labels.
pub fn inn_object(s: &MeetPoset, tree: &crate::trees::Tree, t: &[usize]) -> usize {
    s.meet_all(tree.leaves().into_iter().map(|l| t[l]))
}

/// inn(α): inn(t) → inn(α*t), as its (source, target) pair.
pub fn inn_map(s: &MeetPoset, alpha: &crate::omega::OmegaMap, t: &[usize]) -> (usize, usize) {
    let a = inn_object(s, &alpha.target, t);
    let pulled: Vec<usize> = alpha.edge_map.iter().map(|&e| t[e]).collect();
    let b = inn_object(s, &alpha.source, &pulled);
    debug_assert!(s.le[a][b]);
    (a, b)
}

/// Labellings of T forming dendrices of N_d(S).
pub fn nerve_labellings(s: &MeetPoset, tree: &crate::trees::Tree) -> Vec<Vec<usize>> {
    let n = s.cat.num_objects();
    let mut out = Vec::new();
    let mut cur = vec![0; tree.num_edges()];
    fn rec(s: &MeetPoset, tree: &crate::trees::Tree, n: usize, e: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if e == cur.len() {
            if tree.vertices().iter().all(|v| s.le[s.meet_all(v.inputs.iter().map(|&i| cur[i]))][cur[v.out]]) {
                out.push(cur.clone());
            }
            return;
        }
        for c in 0..n {
            cur[e] = c;
            rec(s, tree, n, e + 1, cur, out);
        }
    }
    rec(s, tree, n, 0, &mut cur, &mut out);
    out
}

/// An element (t, x) of (∫_S X)_T: x lists x(r) for the arrows r into T in
/// the order of `Groth::arrows_into`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrothEl {
    pub t: Vec<usize>,
    pub x: Vec<u32>,
}

pub struct Groth {
    pub set: DSet,
    pub elements: Vec<Vec<GrothEl>>,
    pub arrows_into: Vec<Vec<usize>>,
}

/// ∫_S X on the universe of the diagram's values.
pub fn groth(d: &Diagram) -> Groth {
    let uni = d.values[0].uni.clone();
    let s = &d.s;
    // arrows into T, larger sources first
    let arrows_into: Vec<Vec<usize>> = (0..uni.len())
        .map(|t| {
            let mut v: Vec<usize> = (0..uni.len()).flat_map(|r| uni.hom(r, t).iter().copied()).collect();
            v.sort_by_key(|&m| (std::cmp::Reverse(uni.degree(uni.maps[m].src)), m));
            v
        })
        .collect();
    let pos: Vec<HashMap<usize, usize>> =
        arrows_into.iter().map(|v| v.iter().enumerate().map(|(i, &m)| (m, i)).collect()).collect();
    // generating arrows into each shape
    let gens: Vec<Vec<usize>> = (0..uni.len())
        .map(|r| {
            let mut g: Vec<usize> = uni.faces[r].clone();
            g.extend(uni.degeneracies.iter().flatten().copied().filter(|&s| uni.maps[s].tgt == r));
            g.extend(uni.hom(r, r).iter().copied().filter(|&m| m != uni.identity[r]));
            g
        })
        .collect();
    let leaves: Vec<Vec<usize>> = uni.trees.iter().map(|t| t.leaves()).collect();
    let inv: HashMap<(usize, usize), Vec<Vec<Vec<u32>>>> = d
        .maps
        .iter()
        .map(|(&(a, b), m)| {
            let per: Vec<Vec<Vec<u32>>> = (0..uni.len())
                .map(|t| {
                    let mut v = vec![Vec::new(); d.values[a].sizes[t]];
                    for (x, &y) in m[t].iter().enumerate() {
                        v[y].push(x as u32);
                    }
                    v
                })
                .collect();
            ((a, b), per)
        })
        .collect();
    let elements: Vec<Vec<GrothEl>> = crate::par::map_range(uni.len(), |t| {
        let mut out = Vec::new();
        for lab in nerve_labellings(s, &uni.trees[t]) {
            let vars = &arrows_into[t];
            let inn: Vec<usize> = vars
                .iter()
                .map(|&r| s.meet_all(leaves[uni.maps[r].src].iter().map(|&l| lab[uni.maps[r].edge_map[l]])))
                .collect();
            // constraints per variable: (generator α into src(r), partner variable)
            let cons: Vec<Vec<(usize, usize)>> = vars
                .iter()
                .map(|&r| {
                    let src = uni.maps[r].src;
                    let mut c = Vec::new();
                    for r2 in 0..uni.len() {
                        for &a in uni.hom(r2, src) {
                            if gens[src].contains(&a) {
                                c.push((a, pos[t][&uni.compose(r, a)]));
                            }
                        }
                    }
                    c
                })
                .collect();
            let mut incoming: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); vars.len()];
            for (i, cs) in cons.iter().enumerate() {
                for &(a, j) in cs {
                    incoming[j].push((i, a, j));
                }
            }
            // visit variables outward from the identity so each has an assigned parent
            let mut order = vec![pos[t][&uni.identity[t]]];
            let mut parent = vec![None; vars.len()];
            let mut seen = vec![false; vars.len()];
            seen[order[0]] = true;
            let mut q = 0;
            while q < order.len() {
                let i = order[q];
                q += 1;
                for &(a, j) in &cons[i] {
                    if !seen[j] {
                        seen[j] = true;
                        parent[j] = Some((i, a));
                        order.push(j);
                    }
                }
            }
            assert_eq!(order.len(), vars.len(), "generators reach every arrow");
            let mut cur = vec![u32::MAX; vars.len()];
            let ctx = Csp { d, uni: &uni, inv: &inv, vars, inn: &inn, cons: &cons, incoming: &incoming, order: &order, parent: &parent, lab: &lab };
            ctx.run(0, &mut cur, &mut out);
        }
        out
    });
    let set = DSet::build(
        &uni,
        "∫X",
        elements.clone(),
        |e| format!("{:?}|{:?}", e.t, e.x),
        |m, e| {
            let um = &uni.maps[m];
            let t = um.edge_map.iter().map(|&x| e.t[x]).collect();
            let x = arrows_into[um.src].iter().map(|&r| e.x[pos[um.tgt][&uni.compose(m, r)]]).collect();
            GrothEl { t, x }
        },
    );
    Groth { set, elements, arrows_into }
}

struct Csp<'a> {
    d: &'a Diagram,
    uni: &'a Universe,
    inv: &'a HashMap<(usize, usize), Vec<Vec<Vec<u32>>>>,
    vars: &'a [usize],
    inn: &'a [usize],
    cons: &'a [Vec<(usize, usize)>],
    incoming: &'a [Vec<(usize, usize, usize)>],
    order: &'a [usize],
    parent: &'a [Option<(usize, usize)>],
    lab: &'a [usize],
}

impl Csp<'_> {
    // α*(x(r)) = X(inn α)(x(r∘α))
    fn ok(&self, i: usize, v: usize, cur: &[u32]) -> bool {
        let (d, uni, inn) = (self.d, self.uni, self.inn);
        let xs = &d.values[inn[i]];
        for &(a, j) in &self.cons[i] {
            if cur[j] == u32::MAX && j != i {
                continue;
            }
            let xj = if j == i { v } else { cur[j] as usize };
            if xs.res(a, v) != d.map(inn[i], inn[j])[uni.maps[a].src][xj] {
                return false;
            }
        }
        for &(k, a, _) in &self.incoming[i] {
            if cur[k] == u32::MAX || k == i {
                continue;
            }
            if d.values[inn[k]].res(a, cur[k] as usize) != d.map(inn[k], inn[i])[uni.maps[a].src][v] {
                return false;
            }
        }
        true
    }

    fn run(&self, depth: usize, cur: &mut Vec<u32>, out: &mut Vec<GrothEl>) {
        if depth == self.order.len() {
            out.push(GrothEl { t: self.lab.to_vec(), x: cur.clone() });
            return;
        }
        let i = self.order[depth];
        let src = self.uni.maps[self.vars[i]].src;
        let cands: Vec<u32> = match self.parent[i] {
            None => (0..self.d.values[self.inn[i]].sizes[src] as u32).collect(),
            Some((p, a)) => {
                let y = self.d.values[self.inn[p]].res(a, cur[p] as usize);
                self.inv[&(self.inn[p], self.inn[i])][src][y].clone()
            }
        };
        for v in cands {
            if self.ok(i, v as usize, cur) {
                cur[i] = v;
                self.run(depth + 1, cur, out);
            }
        }
        cur[i] = u32::MAX;
    }
}

/// The proof chain for coskeletality: two elements with the same k-skeleton
/// first agree on t, then on x. Returns violations.
pub fn check_proof_chain(g: &Groth, k: usize, max_degree: usize) -> Vec<String> {
    let uni = &g.set.uni;
    let mut bad = Vec::new();
    for t in 0..uni.len() {
        if uni.degree(t) <= k || uni.degree(t) > max_degree {
            continue;
        }
        let gens = crate::dsets::skeleton_generators(uni, t, k);
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for (i, _) in g.elements[t].iter().enumerate() {
            let key: Vec<usize> = gens.iter().map(|&m| g.set.res(m, i)).collect();
            if let Some(&j) = seen.get(&key) {
                let (a, b) = (&g.elements[t][i], &g.elements[t][j]);
                if a.t != b.t {
                    bad.push(format!("shape {}: equal skeleta but different labellings", uni.code(t)));
                } else if a.x != b.x {
                    bad.push(format!("shape {}: equal skeleta and labellings but different x", uni.code(t)));
                }
            } else {
                seen.insert(key, i);
            }
        }
    }
    bad
}

/// A named corpus entry: a poset and As_A values with maps induced by
/// functions between the colour sets.
pub struct DiagramSpec {
    pub name: &'static str,
    pub poset: FinCat,
    /// colour-set size at every object
    pub sets: Vec<usize>,
    /// for a ≤ b, the function A_b → A_a
    pub funs: Vec<((usize, usize), Vec<usize>)>,
}

fn op_for(k: usize, max_arity: usize) -> FiniteOperad {
    if k == 1 {
        ass(max_arity)
    } else {
        let names: Vec<String> = (0..k).map(|i| ((b'p' + i as u8) as char).to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        make_asa(&refs, max_arity)
    }
}

/// Realize a spec on a universe.
pub fn realize(spec: &DiagramSpec, uni: &Arc<Universe>) -> Result<Diagram, String> {
    let s = MeetPoset::new(spec.poset.clone())?;
    let ar = uni.max_edges.saturating_sub(1).max(1);
    let ops: Vec<FiniteOperad> = spec.sets.iter().map(|&k| op_for(k, ar)).collect();
    let values: Vec<DSet> = ops.iter().map(|p| dendroidal_nerve(p, uni)).collect::<Result<_, _>>()?;
    let n = s.cat.num_objects();
    let mut maps = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            if !s.le[a][b] {
                continue;
            }
            let f: Vec<usize> = if a == b {
                (0..spec.sets[a]).collect()
            } else {
                spec.funs.iter().find(|(k, _)| *k == (a, b)).map(|(_, f)| f.clone()).ok_or(format!("{}: no function for {} ≤ {}", spec.name, a, b))?
            };
            let m = asa_map(spec.sets[b], spec.sets[a], &ops[b], &ops[a], &f);
            maps.insert((a, b), nerve_map(&m, &values[b], &values[a], &ops[b], &ops[a]));
        }
    }
    Ok(Diagram { s, values, maps })
}

/// The shipped diagrams: posets with at most three objects.
pub fn corpus() -> Vec<DiagramSpec> {
    use crate::fincat::fixtures::poset;
    vec![
        DiagramSpec { name: "point-pq", poset: poset("1", &["s"], &[]), sets: vec![2], funs: vec![] },
        DiagramSpec { name: "arrow-const", poset: poset("2", &["s0", "s1"], &[(0, 1)]), sets: vec![1, 1], funs: vec![((0, 1), vec![0])] },
        DiagramSpec { name: "arrow-pick", poset: poset("2", &["s0", "s1"], &[(0, 1)]), sets: vec![2, 1], funs: vec![((0, 1), vec![0])] },
        DiagramSpec { name: "arrow-collapse", poset: poset("2", &["s0", "s1"], &[(0, 1)]), sets: vec![1, 2], funs: vec![((0, 1), vec![0, 0])] },
        DiagramSpec {
            name: "chain3",
            poset: poset("3", &["s0", "s1", "s2"], &[(0, 1), (1, 2), (0, 2)]),
            sets: vec![1, 2, 1],
            funs: vec![((0, 1), vec![0, 0]), ((1, 2), vec![1]), ((0, 2), vec![0])],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsets::{check_coskeletal, check_inner_kan};
    use crate::omega::{inner_face, outer_face};
    use crate::trees::example_t3;

    #[test]
    fn inn_examples() {
        let s = MeetPoset::new(crate::fincat::fixtures::poset("3", &["0", "1", "2"], &[(0, 1), (1, 2), (0, 2)])).unwrap();
        assert_eq!(s.top, 2);
        let t = example_t3();
        // a,b,c,d,e,f in preorder: a b d e f c
        let lab: Vec<usize> = t.edges().iter().map(|e| match e.as_str() { "d" => 1, "e" => 2, "f" => 1, "b" => 1, _ => 2 }).collect();
        assert_eq!(inn_object(&s, &t, &lab), 1);
        let f = inner_face(&t, "b").unwrap();
        let (a, b) = inn_map(&s, &f, &lab);
        assert_eq!(a, b);
        let o = outer_face(&t, "w").unwrap();
        let (a, b) = inn_map(&s, &o, &lab);
        assert!(s.le[a][b]);
    }

    #[test]
    fn terminal_index_recovers_value() {
        let u = Universe::new(2, 4);
        let d = realize(&corpus()[0], &u).unwrap();
        assert!(d.validate().is_empty());
        let g = groth(&d);
        assert_eq!(g.set.sizes, d.values[0].sizes);
        assert!(g.set.check_functoriality().is_empty());
    }

    #[test]
    fn preserves_kan_and_coskeletality() {
        let u = Universe::new(3, 4);
        for spec in corpus() {
            let d = realize(&spec, &u).unwrap();
            assert!(d.validate().is_empty(), "{}", spec.name);
            let g = groth(&d);
            assert!(check_inner_kan(&g.set, 3, false).ok(), "{}", spec.name);
            assert!(check_coskeletal(&g.set, 2, 3).ok(), "{}", spec.name);
            assert!(check_proof_chain(&g, 2, 3).is_empty());
        }
    }
}
