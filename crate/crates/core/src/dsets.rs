//! Truncated dendroidal sets: presheaves on the full subcategory of Ω
//! spanned by trees with at most `max_degree` vertices and `max_edges`
//! edges. That subcategory is closed under faces and degeneracies.
//!
//! Every arrow of the truncation gets an id, and a presheaf stores its
//! restriction along every arrow as a table.

use crate::omega::{degeneracies_of, enumerate_maps, faces_of, OmegaMap};
use crate::par;
use crate::trees::{all_trees, linear, Tree};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::Hash;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UMap {
    pub src: usize,
    pub tgt: usize,
    pub edge_map: Vec<usize>,
}

pub struct Universe {
    pub max_degree: usize,
    pub max_edges: usize,
    pub trees: Vec<Tree>,
    code_index: HashMap<String, usize>,
    pub maps: Vec<UMap>,
    hom: Vec<Vec<Vec<usize>>>,
    map_index: HashMap<(usize, usize, Vec<usize>), usize>,
    pub identity: Vec<usize>,
    pub faces: Vec<Vec<usize>>,
    pub degeneracies: Vec<Vec<usize>>,
    monic: Vec<bool>,
}

impl Universe {
    pub fn new(max_degree: usize, max_edges: usize) -> Arc<Universe> {
        let trees = all_trees(max_degree, max_edges, max_edges);
        let code_index: HashMap<String, usize> =
            trees.iter().enumerate().map(|(i, t)| (t.canonical_code(), i)).collect();
        let n = trees.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|r| (0..n).map(move |t| (r, t))).collect();
        let found = par::map(&pairs, |&(r, t)| {
            enumerate_maps(&trees[r], &trees[t]).into_iter().map(|m| m.edge_map).collect::<Vec<_>>()
        });
        let mut maps = Vec::new();
        let mut hom = vec![vec![Vec::new(); n]; n];
        let mut map_index = HashMap::new();
        for (&(r, t), ems) in pairs.iter().zip(found) {
            for em in ems {
                hom[r][t].push(maps.len());
                map_index.insert((r, t, em.clone()), maps.len());
                maps.push(UMap { src: r, tgt: t, edge_map: em });
            }
        }
        let identity = (0..n).map(|t| map_index[&(t, t, (0..trees[t].num_edges()).collect::<Vec<_>>())]).collect();
        let monic = maps
            .iter()
            .map(|m| {
                let s: HashSet<usize> = m.edge_map.iter().copied().collect();
                s.len() == m.edge_map.len()
            })
            .collect();
        let mut u = Universe {
            max_degree,
            max_edges,
            trees,
            code_index,
            maps,
            hom,
            map_index,
            identity,
            faces: Vec::new(),
            degeneracies: Vec::new(),
            monic,
        };
        u.faces = (0..n)
            .map(|t| {
                if u.trees[t].is_trivial() {
                    return Vec::new();
                }
                faces_of(&u.trees[t]).unwrap().iter().map(|f| u.normalize(f).expect("faces stay in the universe")).collect()
            })
            .collect();
        u.degeneracies = (0..n)
            .map(|t| degeneracies_of(&u.trees[t]).iter().filter_map(|s| u.normalize(s)).collect())
            .collect();
        Arc::new(u)
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }
    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
    pub fn tree_index(&self, t: &Tree) -> Option<usize> {
        self.code_index.get(&t.canonical_code()).copied()
    }
    pub fn index_of_code(&self, code: &str) -> Option<usize> {
        self.code_index.get(code).copied()
    }
    pub fn degree(&self, t: usize) -> usize {
        self.trees[t].degree()
    }
    pub fn hom(&self, r: usize, t: usize) -> &[usize] {
        &self.hom[r][t]
    }
    pub fn is_monic(&self, m: usize) -> bool {
        self.monic[m]
    }
    pub fn is_iso(&self, m: usize) -> bool {
        let u = &self.maps[m];
        self.monic[m] && u.src == u.tgt
    }
    pub fn lookup(&self, src: usize, tgt: usize, em: &[usize]) -> Option<usize> {
        self.map_index.get(&(src, tgt, em.to_vec())).copied()
    }
    /// g ∘ f.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        let (mg, mf) = (&self.maps[g], &self.maps[f]);
        debug_assert_eq!(mf.tgt, mg.src);
        let em: Vec<usize> = mf.edge_map.iter().map(|&e| mg.edge_map[e]).collect();
        self.map_index[&(mf.src, mg.tgt, em)]
    }
    pub fn omega_map(&self, m: usize) -> OmegaMap {
        let u = &self.maps[m];
        OmegaMap { source: self.trees[u.src].clone(), target: self.trees[u.tgt].clone(), edge_map: u.edge_map.clone() }
    }
    /// The id of the arrow between canonical representatives corresponding
    /// to an arbitrary arrow of Ω.
    pub fn normalize(&self, m: &OmegaMap) -> Option<usize> {
        let s = self.tree_index(&m.source)?;
        let t = self.tree_index(&m.target)?;
        let (cs, bs) = m.source.canonical_form();
        let (ct, bt) = m.target.canonical_form();
        debug_assert_eq!(cs, self.trees[s]);
        debug_assert_eq!(ct, self.trees[t]);
        let mut inv = vec![0; bt.len()];
        for (k, &x) in bt.iter().enumerate() {
            inv[x] = k;
        }
        let em: Vec<usize> = bs.iter().map(|&e| inv[m.edge_map[e]]).collect();
        self.lookup(s, t, &em)
    }
    /// γ with ψ = g ∘ γ, for a mono g.
    pub fn factor_through_mono(&self, g: usize, psi: usize) -> Option<usize> {
        let (mg, mp) = (&self.maps[g], &self.maps[psi]);
        if mg.tgt != mp.tgt {
            return None;
        }
        let mut inv = HashMap::new();
        for (k, &x) in mg.edge_map.iter().enumerate() {
            inv.insert(x, k);
        }
        let em: Option<Vec<usize>> = mp.edge_map.iter().map(|e| inv.get(e).copied()).collect();
        self.lookup(mp.src, mg.src, &em?)
    }
    pub fn monos_into(&self, t: usize) -> Vec<usize> {
        (0..self.len()).flat_map(|r| self.hom[r][t].iter().copied()).filter(|&m| self.monic[m]).collect()
    }
    /// One mono per subobject of T of the given degree.
    pub fn subobjects(&self, t: usize, degree: usize) -> Vec<usize> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for m in self.monos_into(t) {
            if self.degree(self.maps[m].src) != degree {
                continue;
            }
            if seen.insert(self.omega_map(m).sub_key()) {
                out.push(m);
            }
        }
        out
    }
    pub fn linear_index(&self, n: usize) -> Option<usize> {
        self.tree_index(&linear(n))
    }
    pub fn code(&self, t: usize) -> String {
        self.trees[t].canonical_code()
    }
    pub fn total_maps(&self) -> usize {
        self.maps.len()
    }
    /// Write an arrow as a composite of faces, an isomorphism and
    /// degeneracies, rightmost applied first.
    pub fn decompose(&self, m: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = m;
        // peel degeneracies off the source
        'outer: loop {
            let src = self.maps[cur].src;
            for &s in &self.degeneracies[src] {
                let ms = &self.maps[s];
                // cur factors through s iff it identifies the two edges s identifies
                let k = self.omega_map(s).kernel();
                let pair: Vec<usize> = (0..k.len()).filter(|&i| (0..i).any(|j| k[j] == k[i])).collect();
                let i = pair[0];
                let j = (0..i).find(|&j| k[j] == k[i]).unwrap();
                let em = &self.maps[cur].edge_map;
                if em[i] == em[j] {
                    let mut rest = vec![usize::MAX; self.trees[ms.tgt].num_edges()];
                    for (e, &x) in ms.edge_map.iter().enumerate() {
                        rest[x] = em[e];
                    }
                    if let Some(r) = self.lookup(ms.tgt, self.maps[cur].tgt, &rest) {
                        out.push(s);
                        cur = r;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        let mut faces = Vec::new();
        'faces: loop {
            let tgt = self.maps[cur].tgt;
            if self.is_iso(cur) {
                break;
            }
            for &f in &self.faces[tgt] {
                if let Some(g) = self.factor_through_mono(f, cur) {
                    faces.push(f);
                    cur = g;
                    continue 'faces;
                }
            }
            panic!("arrow {} does not decompose", m);
        }
        out.push(cur);
        out.extend(faces.into_iter().rev());
        out
    }
}

/// A truncated dendroidal set.
#[derive(Clone)]
pub struct DSet {
    pub uni: Arc<Universe>,
    pub name: String,
    pub sizes: Vec<usize>,
    pub labels: Vec<Vec<String>>,
    /// restrict[m][x] = m*(x) for x in X_tgt(m).
    pub restrict: Vec<Vec<u32>>,
}

impl DSet {
    /// Build from explicit elements and their restriction rule.
    pub fn build<E, L, A>(uni: &Arc<Universe>, name: &str, elems: Vec<Vec<E>>, label: L, act: A) -> DSet
    where
        E: Eq + Hash + Clone + Send + Sync,
        L: Fn(&E) -> String,
        A: Fn(usize, &E) -> E + Sync + Send,
    {
        let index: Vec<HashMap<&E, u32>> =
            elems.iter().map(|xs| xs.iter().enumerate().map(|(i, x)| (x, i as u32)).collect()).collect();
        let restrict = par::map_range(uni.total_maps(), |m| {
            let um = &uni.maps[m];
            elems[um.tgt]
                .iter()
                .map(|x| {
                    let y = act(m, x);
                    *index[um.src].get(&y).unwrap_or_else(|| panic!("restriction leaves the presheaf along arrow {}", m))
                })
                .collect()
        });
        DSet {
            uni: uni.clone(),
            name: name.to_string(),
            sizes: elems.iter().map(|x| x.len()).collect(),
            labels: elems.iter().map(|xs| xs.iter().map(&label).collect()).collect(),
            restrict,
        }
    }

    pub fn res(&self, m: usize, x: usize) -> usize {
        self.restrict[m][x] as usize
    }

    pub fn size_of(&self, t: &Tree) -> usize {
        self.uni.tree_index(t).map_or(0, |i| self.sizes[i])
    }

    /// Functoriality on every composable pair and identities; returns
    /// counterexamples.
    pub fn check_functoriality(&self) -> Vec<String> {
        let u = &self.uni;
        let mut bad = Vec::new();
        for t in 0..u.len() {
            let id = u.identity[t];
            if (0..self.sizes[t]).any(|x| self.res(id, x) != x) {
                bad.push(format!("identity of {} acts nontrivially", u.code(t)));
            }
        }
        let rows = par::map_range(u.total_maps(), |g| {
            let mut v = Vec::new();
            let s = u.maps[g].src;
            for r in 0..u.len() {
                for &f in u.hom(r, s) {
                    let gf = u.compose(g, f);
                    for x in 0..self.sizes[u.maps[g].tgt] {
                        if self.res(gf, x) != self.res(f, self.res(g, x)) {
                            v.push(format!("(g∘f)* ≠ f*g* for arrows {} and {}", g, f));
                            break;
                        }
                    }
                }
            }
            v
        });
        bad.extend(rows.into_iter().flatten());
        bad
    }

    /// Sub-presheaf generated by the given (tree, element) pairs, returned as
    /// a membership table.
    pub fn generated(&self, gens: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let u = &self.uni;
        let mut member: Vec<Vec<bool>> = self.sizes.iter().map(|&n| vec![false; n]).collect();
        for &(t, x) in gens {
            for r in 0..u.len() {
                for &m in u.hom(r, t) {
                    member[r][self.res(m, x)] = true;
                }
            }
        }
        member
    }

    /// The sub-presheaf given by a membership table, reindexed.
    pub fn sub(&self, name: &str, member: &[Vec<bool>]) -> DSet {
        let keep: Vec<Vec<usize>> =
            member.iter().map(|row| row.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()).collect();
        let mut newix: Vec<HashMap<usize, u32>> = Vec::new();
        for k in &keep {
            newix.push(k.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect());
        }
        let restrict = (0..self.uni.total_maps())
            .map(|m| {
                let um = &self.uni.maps[m];
                keep[um.tgt].iter().map(|&x| newix[um.src][&self.res(m, x)]).collect()
            })
            .collect();
        DSet {
            uni: self.uni.clone(),
            name: name.to_string(),
            sizes: keep.iter().map(|k| k.len()).collect(),
            labels: keep.iter().enumerate().map(|(t, k)| k.iter().map(|&x| self.labels[t][x].clone()).collect()).collect(),
            restrict,
        }
    }

    /// Elements of X whose restrictions match, shape by shape.
    pub fn same_as(&self, other: &DSet) -> bool {
        self.sizes == other.sizes && self.labels == other.labels && self.restrict == other.restrict
    }

    pub fn to_json(&self) -> serde_json::Value {
        let u = &self.uni;
        let mut cells = BTreeMap::new();
        for t in 0..u.len() {
            cells.insert(u.code(t), self.labels[t].clone());
        }
        let mut actions = Vec::new();
        for t in 0..u.len() {
            let mut gens: Vec<usize> = u.faces[t].clone();
            gens.extend(u.degeneracies[t].iter().copied());
            gens.extend(u.hom(t, t).iter().copied().filter(|&m| m != u.identity[t]));
            for g in gens {
                let um = &u.maps[g];
                let (from, to) = if u.degeneracies[t].contains(&g) { (um.tgt, um.src) } else { (um.tgt, um.src) };
                actions.push(serde_json::json!({
                    "from": u.code(from),
                    "to": u.code(to),
                    "map": um.edge_map,
                    "table": self.restrict[g],
                }));
            }
        }
        serde_json::json!({
            "name": self.name,
            "degree": u.max_degree,
            "max_edges": u.max_edges,
            "cells": cells,
            "actions": actions,
        })
    }

    /// Rebuild from generator tables; arrows are decomposed into faces,
    /// isomorphisms and degeneracies.
    pub fn from_json(v: &serde_json::Value) -> Result<DSet, String> {
        let d = v["degree"].as_u64().ok_or("missing `degree`")? as usize;
        let me = v["max_edges"].as_u64().ok_or("missing `max_edges`")? as usize;
        let uni = Universe::new(d, me);
        let cells = v["cells"].as_object().ok_or("missing `cells`")?;
        let mut labels = vec![Vec::new(); uni.len()];
        for (code, xs) in cells {
            let t = uni.index_of_code(code).ok_or_else(|| format!("cells: unknown shape {}", code))?;
            labels[t] = xs
                .as_array()
                .ok_or("cells must be arrays")?
                .iter()
                .map(|x| x.as_str().map(|s| s.to_string()).ok_or("labels must be strings"))
                .collect::<Result<_, _>>()?;
        }
        let mut tables: HashMap<usize, Vec<u32>> = HashMap::new();
        for (k, a) in v["actions"].as_array().ok_or("missing `actions`")?.iter().enumerate() {
            let from = uni.index_of_code(a["from"].as_str().ok_or("action.from")?).ok_or(format!("actions[{}]: unknown shape", k))?;
            let to = uni.index_of_code(a["to"].as_str().ok_or("action.to")?).ok_or(format!("actions[{}]: unknown shape", k))?;
            let em: Vec<usize> = serde_json::from_value(a["map"].clone()).map_err(|e| format!("actions[{}].map: {}", k, e))?;
            let table: Vec<u32> = serde_json::from_value(a["table"].clone()).map_err(|e| format!("actions[{}].table: {}", k, e))?;
            let m = uni.lookup(to, from, &em).ok_or(format!("actions[{}]: not an arrow", k))?;
            if table.len() != labels[from].len() || table.iter().any(|&x| x as usize >= labels[to].len()) {
                return Err(format!("actions[{}]: table has the wrong size", k));
            }
            tables.insert(m, table);
        }
        let sizes: Vec<usize> = labels.iter().map(|l| l.len()).collect();
        let mut restrict = Vec::with_capacity(uni.total_maps());
        for m in 0..uni.total_maps() {
            if m == uni.identity[uni.maps[m].src] {
                restrict.push((0..sizes[uni.maps[m].src] as u32).collect());
                continue;
            }
            let parts = uni.decompose(m);
            let tgt = uni.maps[m].tgt;
            let mut cur: Vec<u32> = (0..sizes[tgt] as u32).collect();
            for &g in parts.iter().rev() {
                if g == uni.identity[uni.maps[g].src] {
                    continue;
                }
                let t = tables.get(&g).ok_or_else(|| format!("no table for generator arrow {:?}", uni.maps[g]))?;
                cur = cur.iter().map(|&x| t[x as usize]).collect();
            }
            restrict.push(cur);
        }
        let name = v["name"].as_str().unwrap_or("").to_string();
        Ok(DSet { uni, name, sizes, labels, restrict })
    }
}

/// Ω[T]: maps into T with precomposition.
pub fn representable(uni: &Arc<Universe>, t: usize) -> DSet {
    let elems: Vec<Vec<usize>> = (0..uni.len()).map(|r| uni.hom(r, t).to_vec()).collect();
    DSet::build(
        uni,
        &format!("Ω[{}]", uni.code(t)),
        elems,
        |&m| format!("{:?}", uni.maps[m].edge_map),
        |a, &f| uni.compose(f, a),
    )
}

/// The boundary of Ω[T] as a membership table over Ω[T].
pub fn boundary(uni: &Arc<Universe>, t: usize) -> (DSet, Vec<Vec<bool>>) {
    let rep = representable(uni, t);
    let gens: Vec<(usize, usize)> = uni.faces[t]
        .iter()
        .map(|&f| (uni.maps[f].src, uni.hom(uni.maps[f].src, t).iter().position(|&m| m == f).unwrap()))
        .collect();
    let member = rep.generated(&gens);
    (rep, member)
}

/// Faces of T except the inner face at edge `e`, which must be inner.
pub fn horn_generators(uni: &Universe, t: usize, e: usize) -> Option<Vec<usize>> {
    if !uni.trees[t].is_inner(e) {
        return None;
    }
    let skip = uni.faces[t].iter().position(|&f| {
        let m = &uni.maps[f];
        uni.degree(m.src) + 1 == uni.degree(t) && !m.edge_map.contains(&e) && m.edge_map.len() + 1 == uni.trees[t].num_edges()
    })?;
    Some(uni.faces[t].iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &f)| f).collect())
}

/// Λ^e[T] as a membership table over Ω[T].
pub fn inner_horn(uni: &Arc<Universe>, t: usize, e: usize) -> Option<(DSet, Vec<Vec<bool>>)> {
    let gens = horn_generators(uni, t, e)?;
    let rep = representable(uni, t);
    let g: Vec<(usize, usize)> = gens
        .iter()
        .map(|&f| (uni.maps[f].src, uni.hom(uni.maps[f].src, t).iter().position(|&m| m == f).unwrap()))
        .collect();
    let member = rep.generated(&g);
    Some((rep, member))
}

/// Compatible families of X on the sub-presheaf of Ω[T] generated by the
/// monos `gens`: one element of X per generator, agreeing on overlaps.
pub fn compatible_families(x: &DSet, t: usize, gens: &[usize]) -> Vec<Vec<usize>> {
    let u = &x.uni;
    // constraints: (i, α, j, β) with α*x_i = β*x_j, j < i
    let mut cons: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); gens.len()];
    for psi in u.monos_into(t) {
        let facts: Vec<(usize, usize)> =
            gens.iter().enumerate().filter_map(|(i, &g)| u.factor_through_mono(g, psi).map(|a| (i, a))).collect();
        for w in 1..facts.len() {
            let (j, b) = facts[0];
            let (i, a) = facts[w];
            if i > j {
                cons[i].push((a, j, b));
            } else {
                cons[j].push((b, i, a));
            }
        }
    }
    for c in cons.iter_mut() {
        c.sort();
        c.dedup();
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; gens.len()];
    fam_rec(x, gens, &cons, 0, &mut cur, &mut out);
    out
}

fn fam_rec(x: &DSet, gens: &[usize], cons: &[Vec<(usize, usize, usize)>], i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if i == gens.len() {
        out.push(cur.clone());
        return;
    }
    let s = x.uni.maps[gens[i]].src;
    for v in 0..x.sizes[s] {
        cur[i] = v;
        if cons[i].iter().all(|&(a, j, b)| x.res(a, v) == x.res(b, cur[j])) {
            fam_rec(x, gens, cons, i + 1, cur, out);
        }
    }
}

/// Number of elements of X_T restricting to each family.
fn fillers(x: &DSet, t: usize, gens: &[usize]) -> HashMap<Vec<usize>, usize> {
    let mut h: HashMap<Vec<usize>, usize> = HashMap::new();
    for el in 0..x.sizes[t] {
        let key: Vec<usize> = gens.iter().map(|&g| x.res(g, el)).collect();
        *h.entry(key).or_default() += 1;
    }
    h
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct KanReport {
    pub horns: usize,
    pub families: usize,
    pub filler_histogram: BTreeMap<usize, usize>,
    pub failures: Vec<String>,
}

impl KanReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Inner Kan condition for every tree of degree 2..=D and inner edge.
pub fn check_inner_kan(x: &DSet, max_degree: usize, strict: bool) -> KanReport {
    let u = &x.uni;
    let horns: Vec<(usize, usize)> = (0..u.len())
        .filter(|&t| (2..=max_degree).contains(&u.degree(t)))
        .flat_map(|t| u.trees[t].inner_edges().into_iter().map(move |e| (t, e)))
        .collect();
    let parts = par::map(&horns, |&(t, e)| {
        let gens = horn_generators(u, t, e).unwrap();
        let fams = compatible_families(x, t, &gens);
        let fill = fillers(x, t, &gens);
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        let mut fails = Vec::new();
        for f in &fams {
            let n = fill.get(f).copied().unwrap_or(0);
            *hist.entry(n).or_default() += 1;
            if n == 0 || (strict && n != 1) {
                fails.push(format!(
                    "shape {} edge {}: horn {:?} has {} fillers",
                    u.code(t),
                    u.trees[t].edge_name(e),
                    f.iter().zip(&gens).map(|(&v, &g)| x.labels[u.maps[g].src][v].clone()).collect::<Vec<_>>(),
                    n
                ));
            }
        }
        (fams.len(), hist, fails)
    });
    let mut rep = KanReport { horns: horns.len(), ..Default::default() };
    for (n, h, f) in parts {
        rep.families += n;
        for (k, v) in h {
            *rep.filler_histogram.entry(k).or_default() += v;
        }
        rep.failures.extend(f);
    }
    rep
}

/// Monos of degree k generating Sk_k(Ω[T]).
pub fn skeleton_generators(uni: &Universe, t: usize, k: usize) -> Vec<usize> {
    uni.subobjects(t, k)
}

/// X is k-coskeletal up to the truncation: for every T of degree k+1..=D,
/// restriction X_T → (families on Sk_k Ω[T]) is a bijection.
pub fn check_coskeletal(x: &DSet, k: usize, max_degree: usize) -> KanReport {
    let u = &x.uni;
    let shapes: Vec<usize> = (0..u.len()).filter(|&t| u.degree(t) > k && u.degree(t) <= max_degree).collect();
    let parts = par::map(&shapes, |&t| {
        let gens = skeleton_generators(u, t, k);
        let fams = compatible_families(x, t, &gens);
        let fill = fillers(x, t, &gens);
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        let mut fails = Vec::new();
        for f in &fams {
            let n = fill.get(f).copied().unwrap_or(0);
            *hist.entry(n).or_default() += 1;
            if n != 1 {
                fails.push(format!("shape {}: a {}-skeletal boundary has {} fillers", u.code(t), k, n));
            }
        }
        (fams.len(), hist, fails)
    });
    let mut rep = KanReport { horns: shapes.len(), ..Default::default() };
    for (n, h, f) in parts {
        rep.families += n;
        for (k, v) in h {
            *rep.filler_histogram.entry(k).or_default() += v;
        }
        rep.failures.extend(f);
    }
    rep
}

/// coSk_k(X): shapes of degree ≤ k keep X, larger shapes get the
/// compatible families on their k-skeleton.
pub fn coskeleton(x: &DSet, k: usize) -> DSet {
    let u = x.uni.clone();
    #[derive(Clone, PartialEq, Eq, Hash)]
    enum El {
        Low(usize),
        Fam(Vec<usize>),
    }
    let gens: Vec<Vec<usize>> = (0..u.len()).map(|t| if u.degree(t) > k { skeleton_generators(&u, t, k) } else { Vec::new() }).collect();
    let elems: Vec<Vec<El>> = (0..u.len())
        .map(|t| {
            if u.degree(t) <= k {
                (0..x.sizes[t]).map(El::Low).collect()
            } else {
                compatible_families(x, t, &gens[t]).into_iter().map(El::Fam).collect()
            }
        })
        .collect();
    // value of a family over T along an arrow β into T from a shape of degree ≤ k
    let low = |t: usize, fam: &[usize], beta: usize| -> usize {
        for (i, &g) in gens[t].iter().enumerate() {
            if let Some(gm) = u.factor_through_mono(g, beta) {
                return x.res(gm, fam[i]);
            }
        }
        panic!("arrow does not factor through the skeleton");
    };
    let uu = u.clone();
    let labels_src = x.labels.clone();
    DSet::build(
        &u,
        &format!("coSk{}({})", k, x.name),
        elems,
        |e| match e {
            El::Low(i) => format!("x{}", i),
            El::Fam(f) => format!("{:?}", f),
        },
        |m, e| {
            let um = &uu.maps[m];
            match e {
                El::Low(i) if uu.degree(um.src) <= k => El::Low(x.res(m, *i)),
                El::Low(i) => El::Fam(gens[um.src].iter().map(|&g| x.res(uu.compose(m, g), *i)).collect()),
                El::Fam(f) => {
                    if uu.degree(um.src) <= k {
                        El::Low(low(um.tgt, f, m))
                    } else {
                        El::Fam(gens[um.src].iter().map(|&g| low(um.tgt, f, uu.compose(m, g))).collect())
                    }
                }
            }
        },
    )
    .with_labels_from(&labels_src, k)
}

impl DSet {
    fn with_labels_from(mut self, labels: &[Vec<String>], k: usize) -> DSet {
        for t in 0..self.uni.len() {
            if self.uni.degree(t) <= k {
                self.labels[t] = labels[t].clone();
            }
        }
        self
    }
}

/// Sk_k(X) as a sub-presheaf.
pub fn skeleton(x: &DSet, k: usize) -> DSet {
    let gens: Vec<(usize, usize)> = (0..x.uni.len())
        .filter(|&t| x.uni.degree(t) <= k)
        .flat_map(|t| (0..x.sizes[t]).map(move |e| (t, e)))
        .collect();
    let member = x.generated(&gens);
    x.sub(&format!("Sk{}({})", k, x.name), &member)
}

/// All presheaf maps A → X, each as a per-shape table.
pub fn presheaf_maps(a: &DSet, x: &DSet) -> Vec<Vec<Vec<usize>>> {
    let u = &a.uni;
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by_key(|&t| std::cmp::Reverse(u.degree(t)));
    let mut out = Vec::new();
    let mut cur: Vec<Vec<usize>> = a.sizes.iter().map(|&n| vec![usize::MAX; n]).collect();
    pm_rec(a, x, &order, 0, 0, &mut cur, &mut out);
    out
}

fn pm_rec(a: &DSet, x: &DSet, order: &[usize], si: usize, el: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
    let u = &a.uni;
    if si == order.len() {
        out.push(cur.clone());
        return;
    }
    let t = order[si];
    if el == a.sizes[t] {
        // naturality along arrows between already assigned shapes
        for &s in &order[..=si] {
            for &m in u.hom(t, s).iter().chain(u.hom(s, t)) {
                let um = &u.maps[m];
                if !order[..=si].contains(&um.src) || !order[..=si].contains(&um.tgt) {
                    continue;
                }
                for y in 0..a.sizes[um.tgt] {
                    if cur[um.src][a.res(m, y)] != x.res(m, cur[um.tgt][y]) {
                        return;
                    }
                }
            }
        }
        pm_rec(a, x, order, si + 1, 0, cur, out);
        return;
    }
    // forced by a restriction from an assigned shape of higher degree?
    for &s in &order[..si] {
        for &m in u.hom(t, s) {
            for y in 0..a.sizes[s] {
                if a.res(m, y) == el {
                    let v = x.res(m, cur[s][y]);
                    cur[t][el] = v;
                    pm_rec(a, x, order, si, el + 1, cur, out);
                    cur[t][el] = usize::MAX;
                    return;
                }
            }
        }
    }
    for v in 0..x.sizes[t] {
        cur[t][el] = v;
        pm_rec(a, x, order, si, el + 1, cur, out);
    }
    cur[t][el] = usize::MAX;
}

/// The restriction to linear trees: simplices of dimension n are the
/// elements over L_n, with vertex i of Δ[n] the edge at height n−i
/// (vertex 0 is the top leaf, vertex n the root).
#[derive(Clone, Debug)]
pub struct SSet {
    pub sizes: Vec<usize>,
    /// face[n][i][x] = d_i x for x ∈ X_n.
    pub face: Vec<Vec<Vec<usize>>>,
    /// degen[n][i][x] = s_i x for x ∈ X_n.
    pub degen: Vec<Vec<Vec<usize>>>,
    pub labels: Vec<Vec<String>>,
}

fn linear_map(uni: &Universe, from: usize, to: usize, f: impl Fn(usize) -> usize) -> usize {
    let s = uni.linear_index(from).unwrap();
    let t = uni.linear_index(to).unwrap();
    // edge index of canonical L_n at height h is h (root 0)
    let em: Vec<usize> = (0..=from).map(|h| to - f(from - h)).collect();
    uni.lookup(s, t, &em).expect("simplicial operator is an arrow")
}

pub fn simplicial_restriction(x: &DSet) -> SSet {
    let u = &x.uni;
    let top = (0..=u.max_degree).take_while(|&n| u.linear_index(n).is_some()).last().unwrap_or(0);
    let mut sizes = Vec::new();
    let mut labels = Vec::new();
    let mut face = Vec::new();
    let mut degen = Vec::new();
    for n in 0..=top {
        let t = u.linear_index(n).unwrap();
        sizes.push(x.sizes[t]);
        labels.push(x.labels[t].clone());
        let mut fs = Vec::new();
        if n > 0 {
            for i in 0..=n {
                let m = linear_map(u, n - 1, n, |j| if j < i { j } else { j + 1 });
                fs.push((0..x.sizes[t]).map(|e| x.res(m, e)).collect());
            }
        }
        face.push(fs);
        let mut ds = Vec::new();
        if n < top {
            for i in 0..=n {
                let m = linear_map(u, n + 1, n, |j| if j <= i { j } else { j - 1 });
                ds.push((0..x.sizes[t]).map(|e| x.res(m, e)).collect());
            }
        }
        degen.push(ds);
    }
    SSet { sizes, face, degen, labels }
}

impl SSet {
    /// Simplicial identities on the stored range.
    pub fn check_identities(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let top = self.sizes.len() - 1;
        for n in 2..=top {
            for x in 0..self.sizes[n] {
                for j in 0..=n {
                    for i in 0..j {
                        if self.face[n - 1][i][self.face[n][j][x]] != self.face[n - 1][j - 1][self.face[n][i][x]] {
                            bad.push(format!("d_{} d_{} ≠ d_{} d_{} in dimension {}", i, j, j - 1, i, n));
                        }
                    }
                }
            }
        }
        for n in 0..top {
            for x in 0..self.sizes[n] {
                for i in 0..=n {
                    let s = self.degen[n][i][x];
                    if self.face[n + 1][i][s] != x || self.face[n + 1][i + 1][s] != x {
                        bad.push(format!("d s_{} ≠ id in dimension {}", i, n));
                    }
                }
            }
        }
        bad
    }

    /// Inner horns Λ^1[2] fill (uniquely when `strict`).
    pub fn check_inner_kan_2(&self, strict: bool) -> Vec<String> {
        let mut bad = Vec::new();
        if self.sizes.len() < 3 {
            return bad;
        }
        for f in 0..self.sizes[1] {
            for g in 0..self.sizes[1] {
                if self.face[1][0][f] != self.face[1][1][g] {
                    continue;
                }
                let n = (0..self.sizes[2]).filter(|&s| self.face[2][2][s] == f && self.face[2][0][s] == g).count();
                if n == 0 || (strict && n != 1) {
                    bad.push(format!("horn ({}, {}) has {} fillers", f, g, n));
                }
            }
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::inner_face;
    use crate::trees::{corolla, example_t3, linear, unit_tree};

    fn uni() -> Arc<Universe> {
        Universe::new(3, 6)
    }

    #[test]
    fn representable_counts() {
        let u = uni();
        let c2 = u.tree_index(&corolla(2)).unwrap();
        let r = representable(&u, c2);
        assert_eq!(r.size_of(&unit_tree("x")), 3);
        assert_eq!(r.size_of(&corolla(1)), 3);
        assert_eq!(r.size_of(&corolla(2)), 2);
        assert!(r.check_functoriality().is_empty());
        let bar = representable(&u, u.tree_index(&linear(0)).unwrap());
        for (t, tree) in u.trees.iter().enumerate() {
            let linear_shape = tree.vertices().iter().all(|v| v.inputs.len() == 1);
            assert_eq!(bar.sizes[t], if linear_shape { 1 } else { 0 }, "{}", tree.canonical_code());
        }
    }

    #[test]
    fn decompose_recovers_maps() {
        let u = Universe::new(2, 4);
        for m in 0..u.total_maps() {
            let parts = u.decompose(m);
            let mut acc = parts[0];
            for &p in &parts[1..] {
                acc = u.compose(p, acc);
            }
            assert_eq!(acc, m);
        }
    }

    #[test]
    fn boundary_and_skeleton() {
        let u = uni();
        let t3 = u.tree_index(&example_t3()).unwrap();
        let (rep, member) = boundary(&u, t3);
        assert!(member[t3].iter().all(|&b| !b));
        let sk = skeleton(&rep, 2);
        let bd = rep.sub("bd", &member);
        assert!(sk.same_as(&DSet { name: sk.name.clone(), ..bd.clone() }));
        let c2 = u.tree_index(&corolla(2)).unwrap();
        let (_, m2) = boundary(&u, c2);
        let bar = u.tree_index(&linear(0)).unwrap();
        assert_eq!(m2[bar].iter().filter(|&&b| b).count(), 3);
        for t in 0..u.len() {
            if u.degree(t) == 0 || u.degree(t) > 3 {
                continue;
            }
            let (rep, member) = boundary(&u, t);
            let sk = skeleton(&rep, u.degree(t) - 1);
            let bd = rep.sub(&sk.name, &member);
            assert!(sk.same_as(&bd), "{}", u.code(t));
        }
    }

    #[test]
    fn horn_contents() {
        let u = uni();
        let t = example_t3();
        let ti = u.tree_index(&t).unwrap();
        let ct = u.trees[ti].clone();
        let b = ct.inner_edges()[0];
        let gens = horn_generators(&u, ti, b).unwrap();
        assert_eq!(gens.len(), 3);
        assert!(horn_generators(&u, u.tree_index(&corolla(2)).unwrap(), 0).is_none());
        let f = inner_face(&ct, ct.edge_name(b)).unwrap();
        assert!(!gens.contains(&u.normalize(&f).unwrap()));
    }

    #[test]
    fn representable_t3_has_unique_inner_fillers() {
        let u = uni();
        let t3 = u.tree_index(&example_t3()).unwrap();
        let rep = representable(&u, t3);
        let r = check_inner_kan(&rep, 3, true);
        assert!(r.ok(), "{:?}", r.failures);
        assert!(r.families > 0);
    }

    #[test]
    fn simplicial_shadow_of_representable() {
        let u = uni();
        let l2 = u.linear_index(2).unwrap();
        let s = simplicial_restriction(&representable(&u, l2));
        // Δ[2]: monotone maps [n] → [2]
        assert_eq!(&s.sizes[..4], &[3, 6, 10, 15]);
        assert!(s.check_identities().is_empty());
    }

    #[test]
    fn yoneda_on_representables() {
        let u = Universe::new(2, 3);
        let l1 = u.linear_index(1).unwrap();
        let x = representable(&u, u.linear_index(2).unwrap());
        let a = representable(&u, l1);
        let maps = presheaf_maps(&a, &x);
        assert_eq!(maps.len(), x.sizes[l1]);
        let id_pos = u.hom(l1, l1).iter().position(|&m| m == u.identity[l1]).unwrap();
        let images: HashSet<usize> = maps.iter().map(|m| m[l1][id_pos]).collect();
        assert_eq!(images.len(), maps.len());
    }

    #[test]
    fn coskeleton_is_coskeletal_and_json_roundtrips() {
        let u = Universe::new(3, 5);
        let l2 = u.linear_index(2).unwrap();
        let rep = representable(&u, l2);
        let c = coskeleton(&rep, 2);
        assert!(c.check_functoriality().is_empty());
        assert!(check_coskeletal(&c, 2, 3).ok());
        let back = DSet::from_json(&rep.to_json()).unwrap();
        assert!(back.same_as(&DSet { name: back.name.clone(), ..rep.clone() }));
    }
}
