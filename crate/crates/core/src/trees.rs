//! Finite non-planar rooted trees with named edges.
//!
//! Storage is a planar representative: edges and vertices are kept in
//! preorder from the root, and each vertex keeps its inputs in the order they
//! were given. Isomorphism questions go through [`Tree::canonical_code`].

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("edge `{0}` is the output of more than one vertex")]
    DoubleOutput(String),
    #[error("edge `{0}` is an input of more than one vertex")]
    DoubleInput(String),
    #[error("root `{0}` is used as a vertex input")]
    RootIsInput(String),
    #[error("edge `{0}` is not reachable from the root")]
    Disconnected(String),
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("`{0}` is not a leaf")]
    NotALeaf(String),
    #[error("`{0}` is not an inner edge")]
    NotInner(String),
    #[error("vertex `{0}` is adjacent to {1} inner edges, cutting needs exactly one")]
    NotOuter(String, usize),
    #[error("vertex `{0}` has arity {1}, a degeneracy needs a unary vertex")]
    NotUnary(String, usize),
    #[error("the tree | has no faces")]
    NoFaces,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub name: String,
    pub out: usize,
    pub inputs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    edges: Vec<String>,
    vertices: Vec<Vertex>,
    producer: Vec<Option<usize>>,
    consumer: Vec<Option<usize>>,
}

/// A subtree given by its vertex set (sorted) and its leaves in the order
/// they are met in the ambient preorder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sub {
    pub root: usize,
    pub verts: Vec<usize>,
    pub leaves: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub out: String,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub root: String,
    pub vertices: Vec<VertexJson>,
}

impl Tree {
    /// Build from `(name, out, inputs)` triples.
    pub fn new(root: &str, spec: &[(String, String, Vec<String>)]) -> Result<Tree, TreeError> {
        let mut by_out: HashMap<&str, usize> = HashMap::new();
        let mut by_in: HashMap<&str, usize> = HashMap::new();
        let mut names = HashSet::new();
        for (k, (name, out, ins)) in spec.iter().enumerate() {
            if !names.insert(name.as_str()) {
                return Err(TreeError::DuplicateVertex(name.clone()));
            }
            if by_out.insert(out.as_str(), k).is_some() {
                return Err(TreeError::DoubleOutput(out.clone()));
            }
            for i in ins {
                if by_in.insert(i.as_str(), k).is_some() {
                    return Err(TreeError::DoubleInput(i.clone()));
                }
            }
        }
        if by_in.contains_key(root) {
            return Err(TreeError::RootIsInput(root.to_string()));
        }
        let mut edges = Vec::new();
        let mut order = Vec::new();
        let mut stack = vec![root.to_string()];
        let mut seen = HashSet::new();
        while let Some(e) = stack.pop() {
            if !seen.insert(e.clone()) {
                return Err(TreeError::Disconnected(e));
            }
            if let Some(&k) = by_out.get(e.as_str()) {
                order.push(k);
                for i in spec[k].2.iter().rev() {
                    stack.push(i.clone());
                }
            }
            edges.push(e);
        }
        for (_, out, ins) in spec {
            for e in std::iter::once(out).chain(ins.iter()) {
                if !seen.contains(e) {
                    return Err(TreeError::Disconnected(e.clone()));
                }
            }
        }
        let index: HashMap<&str, usize> =
            edges.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
        let vertices: Vec<Vertex> = order
            .iter()
            .map(|&k| Vertex {
                name: spec[k].0.clone(),
                out: index[spec[k].1.as_str()],
                inputs: spec[k].2.iter().map(|i| index[i.as_str()]).collect(),
            })
            .collect();
        Ok(Tree::from_indexed(edges, vertices))
    }

    /// Convenience constructor; vertices are named after their output edge.
    pub fn from_io(root: &str, spec: &[(&str, &[&str])]) -> Result<Tree, TreeError> {
        let full: Vec<_> = spec
            .iter()
            .map(|(o, ins)| (o.to_string(), o.to_string(), ins.iter().map(|s| s.to_string()).collect()))
            .collect();
        Tree::new(root, &full)
    }

    pub fn named(root: &str, spec: &[(&str, &str, &[&str])]) -> Result<Tree, TreeError> {
        let full: Vec<_> = spec
            .iter()
            .map(|(n, o, ins)| (n.to_string(), o.to_string(), ins.iter().map(|s| s.to_string()).collect()))
            .collect();
        Tree::new(root, &full)
    }

    fn from_indexed(edges: Vec<String>, vertices: Vec<Vertex>) -> Tree {
        let mut producer = vec![None; edges.len()];
        let mut consumer = vec![None; edges.len()];
        for (k, v) in vertices.iter().enumerate() {
            producer[v.out] = Some(k);
            for &i in &v.inputs {
                consumer[i] = Some(k);
            }
        }
        Tree { edges, vertices, producer, consumer }
    }

    pub fn spec(&self) -> Vec<(String, String, Vec<String>)> {
        self.vertices
            .iter()
            .map(|v| {
                (
                    v.name.clone(),
                    self.edges[v.out].clone(),
                    v.inputs.iter().map(|&i| self.edges[i].clone()).collect(),
                )
            })
            .collect()
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            root: self.edges[0].clone(),
            vertices: self
                .spec()
                .into_iter()
                .map(|(n, o, i)| VertexJson { name: if n == o { None } else { Some(n) }, out: o, inputs: i })
                .collect(),
        }
    }

    pub fn from_json(j: &TreeJson) -> Result<Tree, TreeError> {
        let spec: Vec<_> = j
            .vertices
            .iter()
            .map(|v| (v.name.clone().unwrap_or_else(|| v.out.clone()), v.out.clone(), v.inputs.clone()))
            .collect();
        Tree::new(&j.root, &spec)
    }

    pub fn edges(&self) -> &[String] {
        &self.edges
    }
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn degree(&self) -> usize {
        self.vertices.len()
    }
    pub fn root(&self) -> usize {
        0
    }
    pub fn root_name(&self) -> &str {
        &self.edges[0]
    }
    pub fn edge_name(&self, e: usize) -> &str {
        &self.edges[e]
    }
    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e == name)
    }
    pub fn producer(&self, e: usize) -> Option<usize> {
        self.producer[e]
    }
    pub fn consumer(&self, e: usize) -> Option<usize> {
        self.consumer[e]
    }
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .or_else(|| self.edge_index(name).and_then(|e| self.producer[e]))
    }
    pub fn is_leaf(&self, e: usize) -> bool {
        self.producer[e].is_none()
    }
    pub fn is_inner(&self, e: usize) -> bool {
        self.producer[e].is_some() && self.consumer[e].is_some()
    }
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.is_leaf(e)).collect()
    }
    pub fn inner_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.is_inner(e)).collect()
    }
    pub fn arity(&self, v: usize) -> usize {
        self.vertices[v].inputs.len()
    }
    pub fn is_trivial(&self) -> bool {
        self.vertices.is_empty()
    }
    /// Inner edges adjacent to a vertex.
    pub fn adjacent_inner(&self, v: usize) -> Vec<usize> {
        let vx = &self.vertices[v];
        std::iter::once(vx.out).chain(vx.inputs.iter().copied()).filter(|&e| self.is_inner(e)).collect()
    }
    pub fn is_corolla(&self) -> bool {
        self.vertices.len() == 1
    }

    fn code_at(&self, e: usize) -> String {
        match self.producer[e] {
            None => "*".to_string(),
            Some(v) => {
                let mut cs: Vec<String> = self.vertices[v].inputs.iter().map(|&i| self.code_at(i)).collect();
                cs.sort();
                format!("({})", cs.concat())
            }
        }
    }

    pub fn canonical_code(&self) -> String {
        self.code_at(0)
    }

    /// A canonically named representative of the isomorphism class, together
    /// with the map from its edges to the edges of `self`.
    pub fn canonical_form(&self) -> (Tree, Vec<usize>) {
        let mut edges = Vec::new();
        let mut back = Vec::new();
        let mut verts: Vec<(usize, Vec<usize>)> = Vec::new();
        self.canon_walk(0, &mut edges, &mut back, &mut verts);
        let vertices = verts
            .into_iter()
            .enumerate()
            .map(|(k, (out, inputs))| Vertex { name: format!("v{}", k), out, inputs })
            .collect();
        (Tree::from_indexed(edges, vertices), back)
    }

    fn canon_walk(
        &self,
        e: usize,
        edges: &mut Vec<String>,
        back: &mut Vec<usize>,
        verts: &mut Vec<(usize, Vec<usize>)>,
    ) -> usize {
        let me = edges.len();
        edges.push(format!("e{}", me));
        back.push(e);
        if let Some(v) = self.producer[e] {
            let slot = verts.len();
            verts.push((me, Vec::new()));
            let mut kids: Vec<(String, usize)> =
                self.vertices[v].inputs.iter().map(|&i| (self.code_at(i), i)).collect();
            kids.sort_by(|a, b| a.0.cmp(&b.0));
            let mut ins = Vec::new();
            for (_, i) in kids {
                ins.push(self.canon_walk(i, edges, back, verts));
            }
            verts[slot].1 = ins;
        }
        me
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_form().0 == *self
    }

    /// Subtree with the given root and leaf set, as a sorted vertex list.
    /// `Some(vec![])` is the identity case `leaves == [root]`.
    pub fn subtree_vertices(&self, root: usize, leaves: &[usize]) -> Option<Vec<usize>> {
        let want: BTreeSet<usize> = leaves.iter().copied().collect();
        if want.len() != leaves.len() {
            return None;
        }
        if leaves == [root] {
            return Some(Vec::new());
        }
        let mut verts = Vec::new();
        let mut found = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(e) = stack.pop() {
            if want.contains(&e) && !(e == root) {
                found.insert(e);
                continue;
            }
            match self.producer[e] {
                None => return None,
                Some(v) => {
                    verts.push(v);
                    stack.extend(self.vertices[v].inputs.iter().copied());
                }
            }
        }
        if found != want {
            return None;
        }
        verts.sort();
        Some(verts)
    }

    /// All subtrees with at least one vertex rooted at `e`.
    pub fn subtrees_at(&self, e: usize) -> Vec<Sub> {
        let v = match self.producer[e] {
            None => return Vec::new(),
            Some(v) => v,
        };
        let mut acc: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![v], Vec::new())];
        for &i in &self.vertices[v].inputs {
            let above = self.subtrees_at(i);
            let mut next = Vec::new();
            for (vs, ls) in &acc {
                let mut l = ls.clone();
                l.push(i);
                next.push((vs.clone(), l));
                for s in &above {
                    let mut vv = vs.clone();
                    vv.extend(s.verts.iter().copied());
                    let mut ll = ls.clone();
                    ll.extend(s.leaves.iter().copied());
                    next.push((vv, ll));
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|(mut verts, leaves)| {
                verts.sort();
                Sub { root: e, verts, leaves }
            })
            .collect()
    }

    pub fn all_subtrees(&self) -> Vec<Sub> {
        (0..self.edges.len()).flat_map(|e| self.subtrees_at(e)).collect()
    }

    /// Inner edges of the subtree spanned by a vertex set.
    pub fn sub_inner_edges(&self, verts: &[usize]) -> Vec<usize> {
        let set: HashSet<usize> = verts.iter().copied().collect();
        let mut out: Vec<usize> = verts
            .iter()
            .flat_map(|&v| self.vertices[v].inputs.iter().copied())
            .filter(|&e| self.producer[e].map_or(false, |p| set.contains(&p)))
            .collect();
        out.sort();
        out
    }

    /// The subtree as a standalone tree, edges keep their names.
    pub fn subtree(&self, root: &str, leaves: &[&str]) -> Option<Tree> {
        let r = self.edge_index(root)?;
        let ls: Option<Vec<usize>> = leaves.iter().map(|l| self.edge_index(l)).collect();
        let verts = self.subtree_vertices(r, &ls?)?;
        Some(self.restrict_to(r, &verts))
    }

    pub fn restrict_to(&self, root: usize, verts: &[usize]) -> Tree {
        let spec: Vec<_> = verts
            .iter()
            .map(|&v| {
                let vx = &self.vertices[v];
                (
                    vx.name.clone(),
                    self.edges[vx.out].clone(),
                    vx.inputs.iter().map(|&i| self.edges[i].clone()).collect(),
                )
            })
            .collect();
        Tree::new(&self.edges[root], &spec).expect("subtree of a valid tree")
    }

    /// T/e: contract the inner edge e.
    pub fn contract(&self, e: usize) -> Result<Tree, TreeError> {
        if !self.is_inner(e) {
            return Err(TreeError::NotInner(self.edges[e].clone()));
        }
        let upper = self.producer[e].unwrap();
        let lower = self.consumer[e].unwrap();
        let mut spec = Vec::new();
        for (k, vx) in self.vertices.iter().enumerate() {
            if k == upper {
                continue;
            }
            let mut ins = Vec::new();
            for &i in &vx.inputs {
                if i == e {
                    ins.extend(self.vertices[upper].inputs.iter().map(|&j| self.edges[j].clone()));
                } else {
                    ins.push(self.edges[i].clone());
                }
            }
            let name = if k == lower {
                format!("{}∘_{}{}", vx.name, self.edges[e], self.vertices[upper].name)
            } else {
                vx.name.clone()
            };
            spec.push((name, self.edges[vx.out].clone(), ins));
        }
        Tree::new(&self.edges[0], &spec)
    }

    /// T/v: cut a vertex adjacent to exactly one inner edge.
    pub fn cut(&self, v: usize) -> Result<Tree, TreeError> {
        let inner = self.adjacent_inner(v);
        if inner.len() != 1 {
            return Err(TreeError::NotOuter(self.vertices[v].name.clone(), inner.len()));
        }
        let vx = &self.vertices[v];
        let keep: Vec<usize> = (0..self.vertices.len()).filter(|&k| k != v).collect();
        let root = if vx.out == 0 { inner[0] } else { 0 };
        if vx.out == 0 {
            let verts: Vec<usize> = keep;
            let r = root;
            let sub = self.subtree_reach(r);
            let vs: Vec<usize> = verts.into_iter().filter(|k| sub.contains(k)).collect();
            Ok(self.restrict_to(r, &vs))
        } else {
            Ok(self.restrict_to(0, &keep))
        }
    }

    fn subtree_reach(&self, e: usize) -> HashSet<usize> {
        let mut out = HashSet::new();
        let mut stack = vec![e];
        while let Some(x) = stack.pop() {
            if let Some(v) = self.producer[x] {
                out.insert(v);
                stack.extend(self.vertices[v].inputs.iter().copied());
            }
        }
        out
    }

    /// T\v for a unary vertex v: the output edge is merged into the input
    /// edge, which keeps its name.
    pub fn delete_unary(&self, v: usize) -> Result<Tree, TreeError> {
        let vx = &self.vertices[v];
        if vx.inputs.len() != 1 {
            return Err(TreeError::NotUnary(vx.name.clone(), vx.inputs.len()));
        }
        let (inp, out) = (vx.inputs[0], vx.out);
        let ren = |e: usize| if e == out { self.edges[inp].clone() } else { self.edges[e].clone() };
        let spec: Vec<_> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != v)
            .map(|(_, w)| (w.name.clone(), ren(w.out), w.inputs.iter().map(|&i| ren(i)).collect()))
            .collect();
        Tree::new(&ren(0), &spec)
    }

    /// Rename edges through a function; vertex names are kept.
    pub fn rename_edges<F: Fn(&str) -> String>(&self, f: F) -> Tree {
        let edges = self.edges.iter().map(|e| f(e)).collect();
        Tree::from_indexed(edges, self.vertices.clone())
    }

    /// Same tree with the inputs of vertex `v` listed in another order.
    pub fn permute_inputs(&self, v: usize, perm: &[usize]) -> Tree {
        let mut spec = self.spec();
        let ins = spec[v].2.clone();
        spec[v].2 = perm.iter().map(|&p| ins[p].clone()).collect();
        Tree::new(&self.edges[0], &spec).expect("permuting inputs keeps a tree valid")
    }
}

impl std::fmt::Display for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.vertices.is_empty() {
            return write!(f, "|{}", self.edges[0]);
        }
        let parts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| {
                let ins: Vec<&str> = v.inputs.iter().map(|&i| self.edges[i].as_str()).collect();
                format!("{}:{}<-[{}]", v.name, self.edges[v.out], ins.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn corolla(n: usize) -> Tree {
    let leaves: Vec<String> = (1..=n).map(|i| format!("l{}", i)).collect();
    Tree::new("r", &[("v".to_string(), "r".to_string(), leaves)]).unwrap()
}

pub fn linear(n: usize) -> Tree {
    let spec: Vec<_> = (1..=n)
        .map(|k| (format!("v{}", k), format!("e{}", k - 1), vec![format!("e{}", k)]))
        .collect();
    Tree::new("e0", &spec).unwrap()
}

pub fn unit_tree(edge: &str) -> Tree {
    Tree::new(edge, &[]).unwrap()
}

/// Graft `r` onto the leaf `at` of `s`. Edge and vertex names of `r` that
/// clash with `s` get a `#k` suffix, the smallest k that is free.
pub fn graft(s: &Tree, at: &str, r: &Tree) -> Result<Tree, TreeError> {
    let a = s.edge_index(at).ok_or_else(|| TreeError::UnknownEdge(at.to_string()))?;
    if !s.is_leaf(a) {
        return Err(TreeError::NotALeaf(at.to_string()));
    }
    let taken: HashSet<&str> = s.edges.iter().map(|e| e.as_str()).collect();
    let vtaken: HashSet<&str> = s.vertices.iter().map(|v| v.name.as_str()).collect();
    let mut used: HashSet<String> = taken.iter().map(|x| x.to_string()).collect();
    let mut ren: HashMap<usize, String> = HashMap::new();
    ren.insert(0, at.to_string());
    for (i, e) in r.edges.iter().enumerate().skip(1) {
        ren.insert(i, fresh(e, &mut used));
    }
    let mut vused: HashSet<String> = vtaken.iter().map(|x| x.to_string()).collect();
    let mut spec = s.spec();
    for v in &r.vertices {
        spec.push((
            fresh(&v.name, &mut vused),
            ren[&v.out].clone(),
            v.inputs.iter().map(|i| ren[i].clone()).collect(),
        ));
    }
    Tree::new(s.root_name(), &spec)
}

fn fresh(name: &str, used: &mut HashSet<String>) -> String {
    if used.insert(name.to_string()) {
        return name.to_string();
    }
    let mut k = 1;
    loop {
        let cand = format!("{}#{}", name, k);
        if used.insert(cand.clone()) {
            return cand;
        }
        k += 1;
    }
}

/// The tree drawn in the running example: root a, v with inputs b and c,
/// w above b with three leaves, and a stump u on c.
pub fn example_t3() -> Tree {
    Tree::named(
        "a",
        &[("v", "a", &["b", "c"]), ("w", "b", &["d", "e", "f"]), ("u", "c", &[])],
    )
    .unwrap()
}

/// Every tree (canonical representative) with at most `max_degree`
/// vertices, at most `max_edges` edges and vertex arity at most `max_arity`,
/// sorted by degree, edge count and code.
pub fn all_trees(max_degree: usize, max_edges: usize, max_arity: usize) -> Vec<Tree> {
    let mut seen: HashMap<String, Tree> = HashMap::new();
    let start = unit_tree("e0").canonical_form().0;
    seen.insert(start.canonical_code(), start.clone());
    let mut frontier = vec![start];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for t in &frontier {
            for l in t.leaves() {
                for n in 0..=max_arity {
                    if t.num_edges() + n > max_edges {
                        break;
                    }
                    let g = graft(t, &t.edges[l].clone(), &corolla(n)).unwrap();
                    let (c, _) = g.canonical_form();
                    let code = c.canonical_code();
                    if !seen.contains_key(&code) {
                        seen.insert(code, c.clone());
                        next.push(c);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Tree> = seen.into_values().collect();
    out.sort_by(|a, b| {
        (a.degree(), a.num_edges(), a.canonical_code()).cmp(&(b.degree(), b.num_edges(), b.canonical_code()))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corolla_and_linear_shapes() {
        let c2 = corolla(2);
        assert_eq!((c2.degree(), c2.num_edges(), c2.leaves().len()), (1, 3, 2));
        let c0 = corolla(0);
        assert_eq!((c0.degree(), c0.num_edges(), c0.leaves().len()), (1, 1, 0));
        assert_eq!(corolla(1).canonical_code(), linear(1).canonical_code());
        let l0 = linear(0);
        assert_eq!((l0.degree(), l0.num_edges()), (0, 1));
        assert_eq!(l0.leaves(), vec![0]);
        let l2 = linear(2);
        assert_eq!((l2.num_edges(), l2.degree(), l2.inner_edges().len()), (3, 2, 1));
        for n in 0..=6 {
            assert_eq!(linear(n).degree(), n);
        }
    }

    #[test]
    fn graft_builds_t3() {
        let s = graft(&corolla(2), "l1", &corolla(3)).unwrap();
        let t = graft(&s, "l2", &corolla(0)).unwrap();
        let t3 = example_t3();
        assert_eq!(t.canonical_code(), t3.canonical_code());
        assert_eq!(t.degree(), 3);
        let names: BTreeSet<&str> = t3.inner_edges().iter().map(|&e| t3.edge_name(e)).collect();
        assert_eq!(names, ["b", "c"].into_iter().collect());
        assert_eq!(t.inner_edges().len(), 2);
    }

    #[test]
    fn graft_edge_cases() {
        let s = corolla(2);
        let g = graft(&s, "l1", &linear(0)).unwrap();
        assert_eq!(g.canonical_code(), s.canonical_code());
        let l2 = graft(&corolla(1), "l1", &corolla(1)).unwrap();
        assert_eq!(l2.canonical_code(), linear(2).canonical_code());
        assert_eq!(graft(&s, "r", &corolla(1)), Err(TreeError::NotALeaf("r".into())));
        // names of the grafted tree that clash get suffixed
        let clash = graft(&corolla(1), "l1", &corolla(1)).unwrap();
        assert!(clash.edges().iter().any(|e| e == "l1#1"));
    }

    #[test]
    fn canonical_code_ignores_input_order() {
        let a = example_t3();
        let b = Tree::named("a", &[("v", "a", &["c", "b"]), ("w", "b", &["f", "d", "e"]), ("u", "c", &[])]).unwrap();
        assert_eq!(a.canonical_code(), b.canonical_code());
        assert_ne!(corolla(2).canonical_code(), linear(2).canonical_code());
    }

    #[test]
    fn subtree_queries_on_t3() {
        let t = example_t3();
        let s = t.subtree("a", &["d", "e", "f", "c"]).unwrap();
        assert_eq!(s.degree(), 2);
        assert_eq!(s.inner_edges().iter().map(|&e| s.edge_name(e)).collect::<Vec<_>>(), vec!["b"]);
        let one = t.subtree("a", &["b", "c"]).unwrap();
        assert_eq!(one.degree(), 1);
        assert!(one.inner_edges().is_empty());
        // v together with the stump u has the single leaf b
        let vu = t.subtree("a", &["b"]).unwrap();
        assert_eq!(vu.degree(), 2);
        assert!(t.subtree("a", &["d"]).is_none());
    }

    #[test]
    fn structural_ops() {
        let t = example_t3();
        let b = t.edge_index("b").unwrap();
        let tb = t.contract(b).unwrap();
        assert_eq!(tb.degree(), 2);
        let merged = tb.vertex_index("a").unwrap();
        assert_eq!(tb.arity(merged), 4);
        let c = t.edge_index("c").unwrap();
        let tc = t.contract(c).unwrap();
        assert_eq!(tc.arity(tc.vertex_index("a").unwrap()), 1);
        let w = t.vertex_index("w").unwrap();
        assert_eq!(t.cut(w).unwrap().degree(), 2);
        let v = t.vertex_index("v").unwrap();
        assert!(matches!(t.cut(v), Err(TreeError::NotOuter(_, 2))));
        let u = t.vertex_index("u").unwrap();
        let tu = t.cut(u).unwrap();
        assert!(tu.is_leaf(tu.edge_index("c").unwrap()));
        assert_eq!(tu.degree(), 2);
    }

    #[test]
    fn json_roundtrip() {
        let t = example_t3();
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back = Tree::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn enumeration_counts() {
        let ts = all_trees(2, 4, 3);
        assert!(ts.iter().all(|t| t.is_canonical()));
        let codes: HashSet<String> = ts.iter().map(|t| t.canonical_code()).collect();
        assert_eq!(codes.len(), ts.len());
        // |, C0..C3, and the degree-2 trees with at most 4 edges
        assert_eq!(ts.iter().filter(|t| t.degree() == 1).count(), 4);
    }
}
