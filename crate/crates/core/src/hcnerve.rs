//! The W-construction on tree operads and explicit dendrices of the
//! homotopy coherent nerve of categories, up to degree 3.
//!
//! A dendrex of shape T assigns a category to every edge and, to every
//! subtree σ with at least one vertex, a functor H^{int σ} → Fun(∏ leaves, root).
//! Since H^k is a contractible groupoid such a functor is stored as one
//! functor per cube vertex plus isomorphisms from the origin.

use crate::fincat::{
    check_functor, check_nat_iso, compose_i, enumerate_functors, enumerate_nat_isos, identity_nat, product_cat,
    vcompose, vinverse, whisker_left, whisker_right, Components, FinCat, Functor,
};
use crate::omega::{faces_of, OmegaMap, VImage};
use crate::trees::{Tree, TreeJson};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, BTreeSet};

/// Root and preorder leaves of the subtree spanned by a vertex set.
pub fn span(t: &Tree, verts: &[usize]) -> (usize, Vec<usize>) {
    let set: BTreeSet<usize> = verts.iter().copied().collect();
    let root = verts
        .iter()
        .map(|&v| t.vertices()[v].out)
        .find(|&e| t.consumer(e).map_or(true, |c| !set.contains(&c)))
        .expect("nonempty vertex set");
    let mut leaves = Vec::new();
    fn walk(t: &Tree, set: &BTreeSet<usize>, e: usize, out: &mut Vec<usize>) {
        match t.producer(e) {
            Some(v) if set.contains(&v) => {
                for &i in &t.vertices()[v].inputs {
                    walk(t, set, i, out);
                }
            }
            _ => out.push(e),
        }
    }
    walk(t, &set, root, &mut leaves);
    (root, leaves)
}

/// Vertices of σ lying above the edge e.
fn above(t: &Tree, verts: &[usize], e: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![e];
    while let Some(x) = stack.pop() {
        if let Some(v) = t.producer(x).filter(|v| verts.contains(v)) {
            out.push(v);
            stack.extend(t.vertices()[v].inputs.iter().copied());
        }
    }
    out.sort();
    out
}

/// One operation of WΩ^π(T): a subtree and its inner edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WOp {
    pub root: usize,
    pub verts: Vec<usize>,
    pub leaves: Vec<usize>,
    pub inner: Vec<usize>,
}

pub struct WOperad {
    pub tree: Tree,
    pub ops: Vec<WOp>,
}

/// A cube coordinate assignment as a bitmask over the inner edges.
pub type Mask = usize;

fn restrict_mask(from: &[usize], mask: Mask, to: &[usize]) -> Mask {
    to.iter().enumerate().filter(|&(_, e)| from.iter().position(|f| f == e).is_some_and(|j| mask >> j & 1 == 1)).map(|(k, _)| 1 << k).sum()
}

impl WOperad {
    /// Operations of arity ≥ 0 with at least one vertex; units are implicit.
    pub fn new(t: &Tree) -> WOperad {
        let mut ops: Vec<WOp> = t
            .all_subtrees()
            .into_iter()
            .filter(|s| !s.verts.is_empty())
            .map(|s| {
                let mut verts = s.verts.clone();
                verts.sort();
                let (root, leaves) = span(t, &verts);
                WOp { root, inner: t.sub_inner_edges(&verts), verts, leaves }
            })
            .collect();
        ops.sort_by(|a, b| (a.verts.len(), &a.verts).cmp(&(b.verts.len(), &b.verts)));
        WOperad { tree: t.clone(), ops }
    }

    pub fn find(&self, root: &str, leaves: &[&str]) -> Option<usize> {
        let r = self.tree.edge_index(root)?;
        let ls: Option<Vec<usize>> = leaves.iter().map(|l| self.tree.edge_index(l)).collect();
        let mut ls = ls?;
        ls.sort();
        self.ops.iter().position(|o| {
            let mut m = o.leaves.clone();
            m.sort();
            o.root == r && m == ls
        })
    }

    /// The operation category H^{int σ}.
    pub fn op_category(&self, k: usize) -> FinCat {
        crate::fincat::hypercube(self.ops[k].inner.len())
    }

    /// σ ∘_i ρ on objects: the result operation and the object map of the
    /// functor H^{int σ} × H^{int ρ} → H^{int σ∘ρ}; the new coordinate is 1.
    pub fn compose(&self, s: usize, i: usize, r: usize) -> Option<(usize, impl Fn(Mask, Mask) -> Mask)> {
        let (os, or) = (&self.ops[s], &self.ops[r]);
        let e = *os.leaves.get(i)?;
        if or.root != e {
            return None;
        }
        let mut verts: Vec<usize> = os.verts.iter().chain(&or.verts).copied().collect();
        verts.sort();
        let k = self.ops.iter().position(|o| o.verts == verts)?;
        let inner = self.ops[k].inner.clone();
        let (si, ri) = (os.inner.clone(), or.inner.clone());
        let f = move |a: Mask, b: Mask| {
            inner
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    let on = if *x == e {
                        true
                    } else if let Some(p) = si.iter().position(|y| y == x) {
                        a >> p & 1 == 1
                    } else {
                        let p = ri.iter().position(|y| y == x).unwrap();
                        b >> p & 1 == 1
                    };
                    (on as usize) << j
                })
                .sum()
        };
        Some((k, f))
    }

    /// Sequential and parallel associativity on every composable triple,
    /// checked on all cube objects.
    pub fn check_associativity(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let n = self.ops.len();
        let cube = |k: usize| 1usize << self.ops[k].inner.len();
        for a in 0..n {
            for i in 0..self.ops[a].leaves.len() {
                for b in 0..n {
                    let Some((ab, fab)) = self.compose(a, i, b) else { continue };
                    // sequential: (a ∘_i b) ∘_{i+j} c = a ∘_i (b ∘_j c)
                    for j in 0..self.ops[b].leaves.len() {
                        for c in 0..n {
                            let Some((l, fl)) = self.compose(ab, i + j, c) else { continue };
                            let Some((bc, fbc)) = self.compose(b, j, c) else { continue };
                            let Some((r, fr)) = self.compose(a, i, bc) else { continue };
                            if l != r {
                                bad.push(format!("sequential associativity changes the operation at {:?}", (a, i, b, j, c)));
                                continue;
                            }
                            for x in 0..cube(a) {
                                for y in 0..cube(b) {
                                    for z in 0..cube(c) {
                                        if fl(fab(x, y), z) != fr(x, fbc(y, z)) {
                                            bad.push(format!("sequential associativity fails on objects at {:?}", (a, i, b, j, c)));
                                        }
                                    }
                                }
                            }
                        }
                    }
                    // parallel: (a ∘_i b) ∘_{k'} c = (a ∘_k c) ∘_i b for k > i
                    let nb = self.ops[b].leaves.len();
                    for k in i + 1..self.ops[a].leaves.len() {
                        for c in 0..n {
                            let Some((l, fl)) = self.compose(ab, k + nb - 1, c) else { continue };
                            let Some((ac, fac)) = self.compose(a, k, c) else { continue };
                            let Some((r, fr)) = self.compose(ac, i, b) else { continue };
                            if l != r {
                                bad.push(format!("parallel associativity changes the operation at {:?}", (a, i, b, k, c)));
                                continue;
                            }
                            for x in 0..cube(a) {
                                for y in 0..cube(b) {
                                    for z in 0..cube(c) {
                                        if fl(fab(x, y), z) != fr(fac(x, z), y) {
                                            bad.push(format!("parallel associativity fails on objects at {:?}", (a, i, b, k, c)));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        bad
    }
}

/// The value of a dendrex on one subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comp {
    pub root: usize,
    pub leaves: Vec<usize>,
    pub inner: Vec<usize>,
    /// funs[ε]: ∏ leaves → root at cube vertex ε.
    pub funs: Vec<Functor>,
    /// isos[ε]: funs[0] ⇒ funs[ε]; isos[0] is the identity.
    pub isos: Vec<Components>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WDendrex {
    pub tree: Tree,
    pub cats: Vec<FinCat>,
    pub comps: BTreeMap<Vec<usize>, Comp>,
}

/// The named fields of a dendrex of degree ≤ 3.
#[derive(Clone, Debug)]
pub enum CaseView<'a> {
    Unit { x: &'a FinCat },
    Corolla { f: &'a Functor },
    Two { f1: &'a Functor, f2: &'a Functor, g: &'a Functor, phi: &'a Components },
    Chain(Three<'a>),
    Fork(Three<'a>),
}

/// Degree-3 fields. Chain: ψ₁: K ⇒ F₁∘G₂, ψ₂: K ⇒ G₁∘F₃. Fork: ψ₁: K ⇒ G₂∘F₂,
/// ψ₂: K ⇒ G₁∘F₃.
#[derive(Clone, Debug)]
pub struct Three<'a> {
    pub f: [&'a Functor; 3],
    pub g1: &'a Functor,
    pub phi1: &'a Components,
    pub g2: &'a Functor,
    pub phi2: &'a Components,
    pub k: &'a Functor,
    pub psi1: &'a Components,
    pub psi2: &'a Components,
}

struct Ctx<'a> {
    tree: &'a Tree,
    cats: &'a [FinCat],
    comps: &'a BTreeMap<Vec<usize>, Comp>,
}

impl Ctx<'_> {
    fn leaf_cats(&self, leaves: &[usize]) -> Vec<&FinCat> {
        leaves.iter().map(|&l| &self.cats[l]).collect()
    }

    fn arrow(&self, key: &[usize], a: Mask, b: Mask) -> Option<Components> {
        let c = &self.comps[key];
        let d = &self.cats[c.root];
        Some(vcompose(d, &c.isos[b], &vinverse(d, &c.isos[a])?))
    }

    /// σ split at an inner edge: (lower key, upper key, position of e).
    fn split(&self, key: &[usize], e: usize) -> (Vec<usize>, Vec<usize>, usize) {
        let up = above(self.tree, key, e);
        let low: Vec<usize> = key.iter().copied().filter(|v| !up.contains(v)).collect();
        let pos = self.comps[&low].leaves.iter().position(|&l| l == e).unwrap();
        (low, up, pos)
    }

    /// F_ε forced by the coordinate of e being 1.
    fn forced_functor(&self, key: &[usize], inner: &[usize], e: usize, mask: Mask) -> Functor {
        let (low, up, pos) = self.split(key, e);
        let (cl, cu) = (&self.comps[&low], &self.comps[&up]);
        let xs = self.leaf_cats(&cl.leaves);
        let ys = self.leaf_cats(&cu.leaves);
        let fl = &cl.funs[restrict_mask(inner, mask, &cl.inner)];
        let fu = &cu.funs[restrict_mask(inner, mask, &cu.inner)];
        compose_i(&xs, fl, pos, &ys, fu).1
    }

    /// x(a → b) forced when both a and b put e at 1.
    fn forced_arrow(&self, key: &[usize], inner: &[usize], e: usize, a: Mask, b: Mask) -> Option<Components> {
        let (low, up, pos) = self.split(key, e);
        let (cl, cu) = (&self.comps[&low], &self.comps[&up]);
        let xs = self.leaf_cats(&cl.leaves);
        let ys = self.leaf_cats(&cu.leaves);
        let (la, lb) = (restrict_mask(inner, a, &cl.inner), restrict_mask(inner, b, &cl.inner));
        let (ua, ub) = (restrict_mask(inner, a, &cu.inner), restrict_mask(inner, b, &cu.inner));
        let alpha = self.arrow(&low, la, lb)?;
        let beta = self.arrow(&up, ua, ub)?;
        let d = &self.cats[cl.root];
        let right = whisker_right(&xs, &alpha, pos, &ys, &cu.funs[ub]);
        let left = whisker_left(&xs, &cl.funs[la], pos, &ys, &beta);
        Some(vcompose(d, &right, &left))
    }
}

impl WDendrex {
    fn ctx(&self) -> Ctx<'_> {
        Ctx { tree: &self.tree, cats: &self.cats, comps: &self.comps }
    }

    pub fn degree(&self) -> usize {
        self.tree.degree()
    }

    pub fn comp(&self, verts: &[&str]) -> Option<&Comp> {
        let mut k: Vec<usize> = verts.iter().map(|v| self.tree.vertex_index(v)).collect::<Option<_>>()?;
        k.sort();
        self.comps.get(&k)
    }

    /// Empty iff all functors and isos are well typed and the dendrex is a
    /// map of operads out of WΩ(T).
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let t = &self.tree;
        if self.cats.len() != t.num_edges() {
            return vec!["one category per edge is required".into()];
        }
        for (i, c) in self.cats.iter().enumerate() {
            for v in c.validate() {
                bad.push(format!("category on {}: {}", t.edge_name(i), v));
            }
        }
        let wo = WOperad::new(t);
        for op in &wo.ops {
            if !self.comps.contains_key(&op.verts) {
                bad.push(format!("missing component for vertices {:?}", self.names(&op.verts)));
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        let ctx = self.ctx();
        for (key, c) in &self.comps {
            let label = self.names(key).join(",");
            let n = 1usize << c.inner.len();
            if c.funs.len() != n || c.isos.len() != n {
                bad.push(format!("component {{{}}}: cube has the wrong size", label));
                continue;
            }
            let xs = ctx.leaf_cats(&c.leaves);
            let p = product_cat(&xs);
            let d = &self.cats[c.root];
            let mut typed = true;
            for (m, f) in c.funs.iter().enumerate() {
                if let Err(e) = check_functor(&p, d, f) {
                    bad.push(format!("component {{{}}} at {:b}: {}", label, m, e));
                    typed = false;
                }
            }
            if !typed {
                continue;
            }
            if c.isos[0] != identity_nat(d, &c.funs[0]) {
                bad.push(format!("component {{{}}}: iso at the origin is not the identity", label));
            }
            for m in 1..n {
                if let Err(e) = check_nat_iso(&p, d, &c.funs[0], &c.funs[m], &c.isos[m]) {
                    bad.push(format!("component {{{}}} at {:b}: {}", label, m, e));
                    typed = false;
                }
            }
            if !typed {
                continue;
            }
            // operad map: coordinate e at 1 is the composite
            for (j, &e) in c.inner.iter().enumerate() {
                let face: Vec<Mask> = (0..n).filter(|m| m >> j & 1 == 1).collect();
                for &m in &face {
                    if c.funs[m] != ctx.forced_functor(key, &c.inner, e, m) {
                        bad.push(format!(
                            "component {{{}}}: functor at {:b} is not the ∘_{} composite",
                            label,
                            m,
                            t.edge_name(e)
                        ));
                    }
                }
                let base = face[0];
                for &m in &face[1..] {
                    let got = ctx.arrow(key, base, m);
                    let want = ctx.forced_arrow(key, &c.inner, e, base, m);
                    if got != want {
                        let at = got
                            .zip(want)
                            .and_then(|(g, w)| g.iter().zip(&w).position(|(a, b)| a != b))
                            .map(|o| p.objects[o].clone())
                            .unwrap_or_default();
                        bad.push(format!(
                            "component {{{}}}: square through ∘_{} fails at object {}",
                            label,
                            t.edge_name(e),
                            at
                        ));
                    }
                }
            }
        }
        bad
    }

    fn names(&self, verts: &[usize]) -> Vec<String> {
        verts.iter().map(|&v| self.tree.vertices()[v].name.clone()).collect()
    }

    /// α*(x) for any arrow α into the shape of x.
    pub fn face_action(&self, alpha: &OmegaMap) -> Result<WDendrex, String> {
        if alpha.target != self.tree {
            return Err("arrow does not land in the dendrex shape".into());
        }
        let r = &alpha.source;
        let images = alpha.vertex_images().map_err(|e| e.to_string())?;
        let cats: Vec<FinCat> = alpha.edge_map.iter().map(|&e| self.cats[e].clone()).collect();
        let mut comps = BTreeMap::new();
        for op in WOperad::new(r).ops {
            let mut u: BTreeSet<usize> = BTreeSet::new();
            for &v in &op.verts {
                if let VImage::Op { verts, .. } = &images[v] {
                    u.extend(verts.iter().copied());
                }
            }
            let n = 1usize << op.inner.len();
            if u.is_empty() {
                let c = &cats[op.root];
                let id = Functor::identity(c);
                comps.insert(
                    op.verts.clone(),
                    Comp {
                        root: op.root,
                        leaves: op.leaves.clone(),
                        inner: op.inner.clone(),
                        isos: vec![identity_nat(c, &id); n],
                        funs: vec![id; n],
                    },
                );
                continue;
            }
            let key: Vec<usize> = u.into_iter().collect();
            let src = self.comps.get(&key).ok_or("image subtree has no component")?;
            let pos: Vec<usize> = op
                .leaves
                .iter()
                .map(|&l| src.leaves.iter().position(|&x| x == alpha.edge_map[l]).ok_or("leaves do not match"))
                .collect::<Result<_, _>>()?;
            let cube = |m: Mask| -> Mask {
                src.inner
                    .iter()
                    .enumerate()
                    .filter(|&(_, f)| op.inner.iter().enumerate().any(|(k, &e)| alpha.edge_map[e] == *f && m >> k & 1 == 1))
                    .map(|(j, _)| 1 << j)
                    .sum()
            };
            let p_new = product_cat(&op.leaves.iter().map(|&l| &cats[l]).collect::<Vec<_>>());
            let p_old = product_cat(&src.leaves.iter().map(|&l| &self.cats[l]).collect::<Vec<_>>());
            let perm_obj: Vec<usize> = (0..p_new.num_objects())
                .map(|o| {
                    let tn = p_new.obj_tuple(o);
                    let mut t = vec![0; tn.len()];
                    for (j, &p) in pos.iter().enumerate() {
                        t[p] = tn[j];
                    }
                    p_old.obj_of(&t)
                })
                .collect();
            let perm_mor: Vec<usize> = (0..p_new.num_morphisms())
                .map(|o| {
                    let tn = p_new.mor_tuple(o);
                    let mut t = vec![0; tn.len()];
                    for (j, &p) in pos.iter().enumerate() {
                        t[p] = tn[j];
                    }
                    p_old.mor_of(&t)
                })
                .collect();
            let funs = (0..n)
                .map(|m| {
                    let f = &src.funs[cube(m)];
                    Functor { obj: perm_obj.iter().map(|&o| f.obj[o]).collect(), mor: perm_mor.iter().map(|&k| f.mor[k]).collect() }
                })
                .collect();
            let isos = (0..n).map(|m| perm_obj.iter().map(|&o| src.isos[cube(m)][o]).collect()).collect();
            comps.insert(op.verts.clone(), Comp { root: op.root, leaves: op.leaves, inner: op.inner, funs, isos });
        }
        Ok(WDendrex { tree: r.clone(), cats, comps })
    }

    /// Named fields for the shapes of the case analysis.
    pub fn view(&self) -> Option<CaseView<'_>> {
        let t = &self.tree;
        let single = |v: usize| &self.comps[&vec![v]].funs[0];
        match t.degree() {
            0 => Some(CaseView::Unit { x: &self.cats[0] }),
            1 => Some(CaseView::Corolla { f: single(0) }),
            2 => {
                let full = &self.comps[&vec![0, 1]];
                Some(CaseView::Two { f1: single(0), f2: single(1), g: &full.funs[0], phi: &full.isos[1] })
            }
            3 => {
                let full = &self.comps[&vec![0, 1, 2]];
                let (e1, e2) = (full.inner[0], full.inner[1]);
                let bottom = t.consumer(e1).unwrap();
                let v1 = t.producer(e1).unwrap();
                let v2 = t.producer(e2).unwrap();
                let key = |a: usize, b: usize| {
                    let mut k = vec![a, b];
                    k.sort();
                    k
                };
                let chain = t.consumer(e2) == Some(v1);
                let (g1k, g2k) = if chain { (key(bottom, v1), key(v1, v2)) } else { (key(bottom, v1), key(bottom, v2)) };
                let (c1, c2) = (&self.comps[&g1k], &self.comps[&g2k]);
                let three = Three {
                    f: [single(bottom), single(v1), single(v2)],
                    g1: &c1.funs[0],
                    phi1: &c1.isos[1],
                    g2: &c2.funs[0],
                    phi2: &c2.isos[1],
                    k: &full.funs[0],
                    psi1: &full.isos[1],
                    psi2: &full.isos[2],
                };
                Some(if chain { CaseView::Chain(three) } else { CaseView::Fork(three) })
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let t = &self.tree;
        let cats: serde_json::Map<String, serde_json::Value> =
            (0..t.num_edges()).map(|e| (t.edge_name(e).to_string(), self.cats[e].to_json())).collect();
        let comps: Vec<serde_json::Value> = self
            .comps
            .iter()
            .map(|(k, c)| {
                serde_json::json!({
                    "vertices": self.names(k),
                    "functors": c.funs,
                    "isos": c.isos,
                })
            })
            .collect();
        let case = match self.view() {
            Some(CaseView::Unit { .. }) => "edge",
            Some(CaseView::Corolla { .. }) => "corolla",
            Some(CaseView::Two { .. }) => "two",
            Some(CaseView::Chain(_)) => "chain",
            Some(CaseView::Fork(_)) => "fork",
            None => "other",
        };
        serde_json::json!({ "case": case, "tree": t.to_json(), "cats": cats, "components": comps })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<WDendrex, String> {
        let tj: TreeJson = serde_json::from_value(v["tree"].clone()).map_err(|e| format!("tree: {}", e))?;
        let tree = Tree::from_json(&tj).map_err(|e| format!("tree: {}", e))?;
        let cmap = v["cats"].as_object().ok_or("missing `cats`")?;
        let cats: Vec<FinCat> = tree
            .edges()
            .iter()
            .map(|e| {
                let c = cmap.get(e).ok_or_else(|| format!("cats: no category for edge {}", e))?;
                FinCat::from_json(c).map_err(|x| format!("cats.{}: {}", e, x))
            })
            .collect::<Result<_, _>>()?;
        let mut comps = BTreeMap::new();
        for (i, c) in v["components"].as_array().ok_or("missing `components`")?.iter().enumerate() {
            let names: Vec<String> = serde_json::from_value(c["vertices"].clone()).map_err(|e| format!("components[{}]: {}", i, e))?;
            let mut key: Vec<usize> = names
                .iter()
                .map(|n| tree.vertex_index(n).ok_or(format!("components[{}]: unknown vertex {}", i, n)))
                .collect::<Result<_, _>>()?;
            key.sort();
            let funs: Vec<Functor> = serde_json::from_value(c["functors"].clone()).map_err(|e| format!("components[{}].functors: {}", i, e))?;
            let isos: Vec<Components> = serde_json::from_value(c["isos"].clone()).map_err(|e| format!("components[{}].isos: {}", i, e))?;
            let (root, leaves) = span(&tree, &key);
            comps.insert(key.clone(), Comp { root, leaves, inner: tree.sub_inner_edges(&key), funs, isos });
        }
        Ok(WDendrex { tree, cats, comps })
    }
}

/// Choice of (G, θ: G ⇒ C) at the origin of a component's cube.
pub trait Twist {
    fn choose(&mut self, key: &[usize], p: &FinCat, d: &FinCat, c: &Functor) -> (Functor, Components);
}

/// G = C and θ = id.
pub struct Strict;

impl Twist for Strict {
    fn choose(&mut self, _: &[usize], _: &FinCat, d: &FinCat, c: &Functor) -> (Functor, Components) {
        (c.clone(), identity_nat(d, c))
    }
}

/// Random conjugation: θ_p: G(p) → C(p) is a random isomorphism and
/// G(f) = θ_q⁻¹ C(f) θ_p.
pub struct Conjugate(pub StdRng);

impl Conjugate {
    pub fn seeded(seed: u64) -> Conjugate {
        Conjugate(StdRng::seed_from_u64(seed))
    }
}

impl Twist for Conjugate {
    fn choose(&mut self, _: &[usize], p: &FinCat, d: &FinCat, c: &Functor) -> (Functor, Components) {
        let theta: Vec<usize> = (0..p.num_objects())
            .map(|o| {
                let target = c.obj[o];
                let isos: Vec<usize> = (0..d.num_objects()).flat_map(|y| d.isos(y, target)).collect();
                isos[self.0.random_range(0..isos.len())]
            })
            .collect();
        let obj: Vec<usize> = theta.iter().map(|&th| d.src(th)).collect();
        let mor = (0..p.num_morphisms())
            .map(|f| {
                let (a, b) = (p.src(f), p.tgt(f));
                let inv = d.inverse(theta[b]).unwrap();
                d.c(inv, d.c(c.mor[f], theta[a]))
            })
            .collect();
        (Functor { obj, mor }, theta)
    }
}

/// Build a dendrex from edge categories, one functor per vertex, and a
/// twist choosing the origin of every cube.
pub fn assemble(tree: &Tree, cats: Vec<FinCat>, vertex_funs: &[Functor], twist: &mut dyn Twist) -> Result<WDendrex, String> {
    let wo = WOperad::new(tree);
    let mut comps: BTreeMap<Vec<usize>, Comp> = BTreeMap::new();
    for op in &wo.ops {
        let n = 1usize << op.inner.len();
        let d = &cats[op.root];
        if op.inner.is_empty() {
            let f = vertex_funs[op.verts[0]].clone();
            let id = identity_nat(d, &f);
            comps.insert(op.verts.clone(), Comp { root: op.root, leaves: op.leaves.clone(), inner: vec![], funs: vec![f], isos: vec![id] });
            continue;
        }
        let ctx = Ctx { tree, cats: &cats, comps: &comps };
        let mut funs = vec![Functor { obj: vec![], mor: vec![] }; n];
        for (m, f) in funs.iter_mut().enumerate().skip(1) {
            let j = m.trailing_zeros() as usize;
            *f = ctx.forced_functor(&op.verts, &op.inner, op.inner[j], m);
        }
        let xs: Vec<&FinCat> = op.leaves.iter().map(|&l| &cats[l]).collect();
        let p = product_cat(&xs);
        let (g, theta) = twist.choose(&op.verts, &p, d, &funs[1]);
        funs[0] = g;
        // partial component so forced arrows on this cube can be read
        let mut isos = vec![Vec::new(); n];
        isos[0] = identity_nat(d, &funs[0]);
        isos[1] = theta;
        let e0 = op.inner[0];
        // forced arrows only need funs and the lower components
        let mut tmp = comps.clone();
        tmp.insert(op.verts.clone(), Comp { root: op.root, leaves: op.leaves.clone(), inner: op.inner.clone(), funs: funs.clone(), isos: isos.clone() });
        let ctx = Ctx { tree, cats: &cats, comps: &tmp };
        for m in 2..n {
            if m & 1 == 1 {
                let a = ctx.forced_arrow(&op.verts, &op.inner, e0, 1, m).ok_or("non-invertible component")?;
                isos[m] = vcompose(d, &a, &isos[1]);
            }
        }
        for m in 2..n {
            if m & 1 == 0 {
                let l = m.trailing_zeros() as usize;
                let el = op.inner[l];
                let b = 1 | (1 << l);
                let via = vcompose(d, &ctx.forced_arrow(&op.verts, &op.inner, e0, 1, b).ok_or("non-invertible")?, &isos[1]);
                let back = ctx.forced_arrow(&op.verts, &op.inner, el, 1 << l, b).ok_or("non-invertible")?;
                let eta_l = vcompose(d, &vinverse(d, &back).ok_or("non-invertible")?, &via);
                isos[m] = if m == 1 << l {
                    eta_l
                } else {
                    vcompose(d, &ctx.forced_arrow(&op.verts, &op.inner, el, 1 << l, m).ok_or("non-invertible")?, &eta_l)
                };
            }
        }
        comps.insert(op.verts.clone(), Comp { root: op.root, leaves: op.leaves.clone(), inner: op.inner.clone(), funs, isos });
    }
    Ok(WDendrex { tree: tree.clone(), cats, comps })
}

/// Faces of the shape with the restricted records.
pub fn boundary_family(x: &WDendrex) -> Vec<(OmegaMap, WDendrex)> {
    faces_of(&x.tree).unwrap_or_default().into_iter().map(|f| {
        let r = x.face_action(&f).expect("faces act");
        (f, r)
    }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReconstructError {
    NotDegreeThree,
    MissingFace(String),
    Incompatible(String),
}

impl std::fmt::Display for ReconstructError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReconstructError::NotDegreeThree => write!(f, "the shape must have three vertices"),
            ReconstructError::MissingFace(s) => write!(f, "no record for face {}", s),
            ReconstructError::Incompatible(s) => write!(f, "incompatible family: {}", s),
        }
    }
}

fn find_face<'a>(family: &'a [(OmegaMap, WDendrex)], want: &OmegaMap) -> Option<&'a WDendrex> {
    family.iter().find(|(f, _)| f.same_arrow(want)).map(|(_, r)| r)
}

/// The unique degree-3 dendrex with the given faces, or None when the
/// square condition fails.
pub fn reconstruct_from_2skeleton(t: &Tree, family: &[(OmegaMap, WDendrex)]) -> Result<Option<WDendrex>, ReconstructError> {
    if t.degree() != 3 {
        return Err(ReconstructError::NotDegreeThree);
    }
    let faces = faces_of(t).unwrap();
    let mut recs = Vec::new();
    for f in &faces {
        let r = find_face(family, f).ok_or_else(|| ReconstructError::MissingFace(crate::omega::face_label(t, f)))?;
        if r.tree != f.source {
            return Err(ReconstructError::Incompatible("record shape differs from the face".into()));
        }
        recs.push((f, r));
    }
    // edge categories from any face containing the edge
    let mut cats: Vec<Option<FinCat>> = vec![None; t.num_edges()];
    for (f, r) in &recs {
        for (e, &img) in f.edge_map.iter().enumerate() {
            match &cats[img] {
                None => cats[img] = Some(r.cats[e].clone()),
                Some(c) if *c != r.cats[e] => return Err(ReconstructError::Incompatible(format!("category on {}", t.edge_name(img)))),
                _ => {}
            }
        }
    }
    let cats: Vec<FinCat> = cats.into_iter().collect::<Option<_>>().ok_or(ReconstructError::Incompatible("uncovered edge".into()))?;
    // proper components: pulled back along a face with identical cube
    let wo = WOperad::new(t);
    let mut comps: BTreeMap<Vec<usize>, Comp> = BTreeMap::new();
    let top: Vec<usize> = vec![0, 1, 2];
    for op in wo.ops.iter().filter(|o| o.verts != top) {
        let mut found: Option<Comp> = None;
        for (f, r) in &recs {
            let Ok(images) = f.vertex_images() else { continue };
            // a face realizes op if op is the image of a subtree of R vertex by vertex
            let pre: Vec<usize> = (0..f.source.degree())
                .filter(|&v| matches!(&images[v], VImage::Op { verts, .. } if verts.iter().all(|w| op.verts.contains(w))))
                .collect();
            let covered: BTreeSet<usize> = pre
                .iter()
                .flat_map(|&v| match &images[v] {
                    VImage::Op { verts, .. } => verts.clone(),
                    _ => vec![],
                })
                .collect();
            if covered != op.verts.iter().copied().collect() || pre.len() != op.verts.len() {
                continue;
            }
            let mut key = pre.clone();
            key.sort();
            let Some(c) = r.comps.get(&key) else { continue };
            let c = Comp { root: f.edge_map[c.root], leaves: c.leaves.iter().map(|&l| f.edge_map[l]).collect(), inner: op.inner.clone(), funs: c.funs.clone(), isos: c.isos.clone() };
            if c.leaves != op.leaves {
                continue;
            }
            match &found {
                None => found = Some(c),
                Some(prev) if *prev != c => {
                    return Err(ReconstructError::Incompatible(format!("two faces disagree on the component over {:?}", op.verts)))
                }
                _ => {}
            }
        }
        comps.insert(op.verts.clone(), found.ok_or_else(|| ReconstructError::Incompatible(format!("no face covers {:?}", op.verts)))?);
    }
    // top component: origin and Face arrows from the inner faces
    let top_op = wo.ops.iter().find(|o| o.verts == top).unwrap();
    let d = &cats[top_op.root];
    let n = 4;
    let mut funs = vec![Functor { obj: vec![], mor: vec![] }; n];
    let mut isos: Vec<Option<Components>> = vec![None; n];
    let ctx = Ctx { tree: t, cats: &cats, comps: &comps };
    for m in 1..n {
        let j = m.trailing_zeros() as usize;
        funs[m] = ctx.forced_functor(&top, &top_op.inner, top_op.inner[j], m);
    }
    let mut origin: Option<Functor> = None;
    for j in 0..top_op.inner.len() {
        // the inner face contracting the other edge keeps coordinate e
        let other = top_op.inner[1 - j];
        let f = crate::omega::inner_face(t, t.edge_name(other)).unwrap();
        let r = find_face(family, &f).unwrap();
        let full: Vec<usize> = (0..r.tree.degree()).collect();
        let rc = &r.comps[&full];
        // R's leaves map onto T's top leaves; reorder to T's preorder
        let pos: Vec<usize> = rc.leaves.iter().map(|&l| top_op.leaves.iter().position(|&x| x == f.edge_map[l]).unwrap()).collect();
        let p_r = product_cat(&rc.leaves.iter().map(|&l| &r.cats[l]).collect::<Vec<_>>());
        let p_t = product_cat(&top_op.leaves.iter().map(|&l| &cats[l]).collect::<Vec<_>>());
        let to_r: Vec<usize> = (0..p_t.num_objects())
            .map(|o| {
                let tt = p_t.obj_tuple(o);
                p_r.obj_of(&pos.iter().map(|&p| tt[p]).collect::<Vec<_>>())
            })
            .collect();
        let to_r_mor: Vec<usize> = (0..p_t.num_morphisms())
            .map(|o| {
                let tt = p_t.mor_tuple(o);
                p_r.mor_of(&pos.iter().map(|&p| tt[p]).collect::<Vec<_>>())
            })
            .collect();
        let k = Functor { obj: to_r.iter().map(|&o| rc.funs[0].obj[o]).collect(), mor: to_r_mor.iter().map(|&o| rc.funs[0].mor[o]).collect() };
        match &origin {
            None => origin = Some(k),
            Some(prev) if *prev != k => return Err(ReconstructError::Incompatible("the inner faces disagree on the origin functor".into())),
            _ => {}
        }
        isos[1 << j] = Some(to_r.iter().map(|&o| rc.isos[1][o]).collect());
    }
    funs[0] = origin.unwrap();
    isos[0] = Some(identity_nat(d, &funs[0]));
    let mut tmp = comps.clone();
    tmp.insert(
        top.clone(),
        Comp {
            root: top_op.root,
            leaves: top_op.leaves.clone(),
            inner: top_op.inner.clone(),
            funs: funs.clone(),
            isos: isos.iter().map(|x| x.clone().unwrap_or_else(|| identity_nat(d, &funs[0]))).collect(),
        },
    );
    let ctx = Ctx { tree: t, cats: &cats, comps: &tmp };
    // the two routes to the far corner
    let (e0, e1) = (top_op.inner[0], top_op.inner[1]);
    let r0 = ctx.forced_arrow(&top, &top_op.inner, e0, 1, 3).map(|a| vcompose(d, &a, isos[1].as_ref().unwrap()));
    let r1 = ctx.forced_arrow(&top, &top_op.inner, e1, 2, 3).map(|a| vcompose(d, &a, isos[2].as_ref().unwrap()));
    let (Some(r0), Some(r1)) = (r0, r1) else { return Ok(None) };
    if r0 != r1 {
        return Ok(None);
    }
    isos[3] = Some(r0);
    comps.insert(
        top.clone(),
        Comp { root: top_op.root, leaves: top_op.leaves.clone(), inner: top_op.inner.clone(), funs, isos: isos.into_iter().map(|x| x.unwrap()).collect() },
    );
    let x = WDendrex { tree: t.clone(), cats, comps };
    if !x.validate().is_empty() {
        return Ok(None);
    }
    for (f, r) in &recs {
        if x.face_action(f).as_ref() != Ok(*r) {
            return Err(ReconstructError::Incompatible(format!("face {} does not match", crate::omega::face_label(t, f))));
        }
    }
    Ok(Some(x))
}

/// Brute force: the number of valid degree-3 dendrices with the given faces,
/// searching every choice of isomorphisms on the top cube.
pub fn count_completions(x_template: &WDendrex, family: &[(OmegaMap, WDendrex)]) -> usize {
    let top: Vec<usize> = vec![0, 1, 2];
    let c = &x_template.comps[&top];
    let xs: Vec<&FinCat> = c.leaves.iter().map(|&l| &x_template.cats[l]).collect();
    let p = product_cat(&xs);
    let d = &x_template.cats[c.root];
    let mut count = 0;
    // functors at every cube vertex range over those with the right faces; the
    // origin is pinned by the inner faces, the rest by the operad law, so
    // search all functors only at the origin and all isos everywhere
    let origins: Vec<Functor> = if p.num_morphisms() <= 64 { enumerate_functors(&p, d) } else { vec![c.funs[0].clone()] };
    for g in origins {
        let i1 = enumerate_nat_isos(&p, d, &g, &c.funs[1]);
        let i2 = enumerate_nat_isos(&p, d, &g, &c.funs[2]);
        let i3 = enumerate_nat_isos(&p, d, &g, &c.funs[3]);
        for a in &i1 {
            for b in &i2 {
                for z in &i3 {
                    let mut y = x_template.clone();
                    let cc = y.comps.get_mut(&top).unwrap();
                    cc.funs[0] = g.clone();
                    cc.isos = vec![identity_nat(d, &g), a.clone(), b.clone(), z.clone()];
                    if !y.validate().is_empty() {
                        continue;
                    }
                    if family.iter().all(|(f, r)| y.face_action(f).as_ref() == Ok(r)) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

pub mod fixtures {
    use super::*;
    use crate::fincat::fixtures as cats;
    use crate::trees::Tree;

    /// The degree-3 shapes used by the fixture corpus.
    pub fn shapes() -> Vec<Tree> {
        vec![
            Tree::named("a", &[("u", "a", &["b"]), ("v", "b", &["c"]), ("w", "c", &["d"])]).unwrap(),
            Tree::named("a", &[("u", "a", &["b", "e"]), ("v", "b", &["c"]), ("w", "c", &["d"])]).unwrap(),
            Tree::named("a", &[("u", "a", &["b"]), ("v", "b", &["c", "e"]), ("w", "c", &["d"])]).unwrap(),
            Tree::named("a", &[("u", "a", &["b", "c"]), ("v", "b", &["d"]), ("w", "c", &["e"])]).unwrap(),
            Tree::named("a", &[("u", "a", &["b", "c"]), ("v", "b", &["d", "e"]), ("w", "c", &[])]).unwrap(),
            Tree::named("a", &[("u", "a", &["b"]), ("v", "b", &["c"]), ("w", "c", &[])]).unwrap(),
        ]
    }

    /// A functor chosen among all functors from the product of `ins` to `out`.
    fn pick(ins: &[&FinCat], out: &FinCat, seed: u64) -> Functor {
        let p = product_cat(ins);
        let all = enumerate_functors(&p, out);
        let mut rng = StdRng::seed_from_u64(seed);
        all[rng.random_range(0..all.len())].clone()
    }

    /// A degree-3 dendrex on `shape`; categories drawn from a small corpus.
    pub fn build(shape: &Tree, cat_seed: u64, twist_seed: u64) -> WDendrex {
        let pool = [cats::group_z2(), cats::h(), cats::group_z2(), cats::h(), cats::star(), cats::arrow()];
        let mut rng = StdRng::seed_from_u64(cat_seed);
        let cats: Vec<FinCat> = (0..shape.num_edges()).map(|_| pool[rng.random_range(0..pool.len())].clone()).collect();
        let funs: Vec<Functor> = shape
            .vertices()
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let ins: Vec<&FinCat> = v.inputs.iter().map(|&i| &cats[i]).collect();
                pick(&ins, &cats[v.out], cat_seed * 101 + k as u64)
            })
            .collect();
        assemble(shape, cats, &funs, &mut Conjugate::seeded(twist_seed)).expect("fixture assembles")
    }

    /// At least twenty degree-3 dendrices.
    pub fn degree3() -> Vec<WDendrex> {
        let mut out = Vec::new();
        for (s, shape) in shapes().iter().enumerate() {
            for k in 0..4u64 {
                out.push(build(shape, 7 * s as u64 + k, 1000 + 13 * s as u64 + k));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::{inner_face, outer_face};
    use crate::trees::example_t3;

    #[test]
    fn w_operad_of_t3() {
        let t = example_t3();
        let w = WOperad::new(&t);
        let s = w.find("a", &["d", "e", "f", "c"]).unwrap();
        assert_eq!(w.ops[s].inner, vec![t.edge_index("b").unwrap()]);
        assert_eq!(w.op_category(s).num_objects(), 2);
        let top = w.find("a", &["b", "c"]).unwrap();
        assert!(w.ops[top].inner.is_empty());
        let up = w.find("b", &["d", "e", "f"]).unwrap();
        let (k, f) = w.compose(top, 0, up).unwrap();
        assert_eq!(k, s);
        assert_eq!(f(0, 0), 1);
        assert!(w.check_associativity().is_empty());
    }

    #[test]
    fn fixtures_validate_and_faces_act() {
        for x in fixtures::degree3() {
            assert!(x.validate().is_empty(), "{:?}", x.validate());
            for (_, r) in boundary_family(&x) {
                assert!(r.validate().is_empty());
            }
        }
    }

    #[test]
    fn case_views() {
        let x = fixtures::build(&fixtures::shapes()[0], 3, 4);
        assert!(matches!(x.view(), Some(CaseView::Chain(_))));
        let y = fixtures::build(&fixtures::shapes()[3], 3, 4);
        assert!(matches!(y.view(), Some(CaseView::Fork(_))));
        let t = &y.tree;
        let two = y.face_action(&outer_face(t, "w").unwrap()).unwrap();
        assert!(matches!(two.view(), Some(CaseView::Two { .. })));
        let inner = y.face_action(&inner_face(t, "c").unwrap()).unwrap();
        let Some(CaseView::Two { g, .. }) = inner.view() else { panic!() };
        let Some(CaseView::Fork(th)) = y.view() else { panic!() };
        assert_eq!(g.obj.len(), th.k.obj.len());
    }

    #[test]
    fn roundtrip_reconstruction() {
        for x in fixtures::degree3().iter().take(8) {
            let fam = boundary_family(x);
            let r = reconstruct_from_2skeleton(&x.tree, &fam).unwrap();
            assert_eq!(r.as_ref(), Some(x));
        }
    }

    #[test]
    fn json_roundtrip() {
        let x = fixtures::build(&fixtures::shapes()[4], 1, 2);
        assert_eq!(WDendrex::from_json(&x.to_json()).unwrap(), x);
    }
}
