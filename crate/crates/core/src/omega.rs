//! Arrows of Ω as maps of free operads.
//!
//! Ω(T) has at most one operation per signature, so an arrow R → T is
//! determined by where it sends edges. The vertex images are derived from
//! the edge map and checked when a map is built.

use crate::trees::{Tree, TreeError};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("edge map has length {0}, source has {1} edges")]
    Arity(usize, usize),
    #[error("vertex `{0}` has no image operation in the target")]
    NoImage(String),
    #[error("cannot compose: target of the first map is not the source of the second")]
    Boundary,
}

/// Image of a source vertex in Ω(target).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VImage {
    Unit(usize),
    Op { root: usize, verts: Vec<usize>, leaves: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaMap {
    pub source: Tree,
    pub target: Tree,
    pub edge_map: Vec<usize>,
}

/// Identifies a mono up to isomorphism of its source: the image edges and
/// the vertex sets of the image operations.
pub type SubKey = (Vec<usize>, Vec<Vec<usize>>);

fn image_of(t: &Tree, out: usize, ins: &[usize]) -> Option<VImage> {
    if let Some(verts) = t.subtree_vertices(out, ins) {
        if verts.is_empty() {
            return Some(VImage::Unit(out));
        }
        return Some(VImage::Op { root: out, verts, leaves: ins.to_vec() });
    }
    None
}

impl OmegaMap {
    pub fn new(source: Tree, target: Tree, edge_map: Vec<usize>) -> Result<OmegaMap, MapError> {
        if edge_map.len() != source.num_edges() {
            return Err(MapError::Arity(edge_map.len(), source.num_edges()));
        }
        let m = OmegaMap { source, target, edge_map };
        m.vertex_images()?;
        Ok(m)
    }

    /// Build from names: every source edge name is sent to a target edge name.
    pub fn from_names(source: Tree, target: Tree, f: impl Fn(&str) -> String) -> Result<OmegaMap, MapError> {
        let em: Result<Vec<usize>, MapError> = source
            .edges()
            .iter()
            .map(|e| {
                let img = f(e);
                target.edge_index(&img).ok_or(MapError::Tree(TreeError::UnknownEdge(img)))
            })
            .collect();
        OmegaMap::new(source, target, em?)
    }

    pub fn identity(t: &Tree) -> OmegaMap {
        OmegaMap { source: t.clone(), target: t.clone(), edge_map: (0..t.num_edges()).collect() }
    }

    pub fn vertex_images(&self) -> Result<Vec<VImage>, MapError> {
        self.source
            .vertices()
            .iter()
            .map(|v| {
                let ins: Vec<usize> = v.inputs.iter().map(|&i| self.edge_map[i]).collect();
                image_of(&self.target, self.edge_map[v.out], &ins).ok_or_else(|| MapError::NoImage(v.name.clone()))
            })
            .collect()
    }

    pub fn is_monic(&self) -> bool {
        let s: BTreeSet<usize> = self.edge_map.iter().copied().collect();
        s.len() == self.edge_map.len()
    }

    pub fn is_epic(&self) -> bool {
        let s: BTreeSet<usize> = self.edge_map.iter().copied().collect();
        s.len() == self.target.num_edges()
    }

    pub fn is_iso(&self) -> bool {
        self.is_monic() && self.is_epic() && self.source.degree() == self.target.degree()
    }

    /// degree(target) − degree(source).
    pub fn degree_shift(&self) -> isize {
        self.target.degree() as isize - self.source.degree() as isize
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &OmegaMap) -> Result<OmegaMap, MapError> {
        compose(self, f)
    }

    pub fn named_edge_map(&self) -> BTreeMap<String, String> {
        self.source
            .edges()
            .iter()
            .zip(&self.edge_map)
            .map(|(e, &i)| (e.clone(), self.target.edge_name(i).to_string()))
            .collect()
    }

    /// Image of a mono, up to automorphisms of the source.
    pub fn sub_key(&self) -> SubKey {
        let mut es: Vec<usize> = self.edge_map.clone();
        es.sort();
        es.dedup();
        let mut vs: Vec<Vec<usize>> = self
            .vertex_images()
            .expect("valid map")
            .into_iter()
            .filter_map(|im| match im {
                VImage::Op { verts, .. } => Some(verts),
                VImage::Unit(_) => None,
            })
            .collect();
        vs.sort();
        (es, vs)
    }

    /// Which source edges are identified, as a partition in first-occurrence
    /// normal form.
    pub fn kernel(&self) -> Vec<usize> {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        self.edge_map
            .iter()
            .map(|&e| {
                let n = seen.len();
                *seen.entry(e).or_insert(n)
            })
            .collect()
    }

    /// Same arrow: equal targets, isomorphic sources, equal edge maps by name.
    pub fn same_arrow(&self, other: &OmegaMap) -> bool {
        self.target == other.target
            && self.source.canonical_code() == other.source.canonical_code()
            && self.named_edge_map() == other.named_edge_map()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let images: Vec<serde_json::Value> = self
            .vertex_images()
            .expect("valid map")
            .iter()
            .zip(self.source.vertices())
            .map(|(im, v)| match im {
                VImage::Unit(e) => serde_json::json!({"vertex": v.name, "unit": self.target.edge_name(*e)}),
                VImage::Op { verts, leaves, .. } => serde_json::json!({
                    "vertex": v.name,
                    "subtree": verts.iter().map(|&k| self.target.vertices()[k].name.clone()).collect::<Vec<_>>(),
                    "leaves": leaves.iter().map(|&l| self.target.edge_name(l).to_string()).collect::<Vec<_>>(),
                }),
            })
            .collect();
        serde_json::json!({
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "edge_map": self.named_edge_map(),
            "vertex_images": images,
        })
    }
}

pub fn compose(g: &OmegaMap, f: &OmegaMap) -> Result<OmegaMap, MapError> {
    if f.target != g.source {
        return Err(MapError::Boundary);
    }
    let em = f.edge_map.iter().map(|&e| g.edge_map[e]).collect();
    OmegaMap::new(f.source.clone(), g.target.clone(), em)
}

pub fn inner_face(t: &Tree, e: &str) -> Result<OmegaMap, MapError> {
    let ei = t.edge_index(e).ok_or_else(|| TreeError::UnknownEdge(e.to_string()))?;
    let src = t.contract(ei)?;
    OmegaMap::from_names(src, t.clone(), |x| x.to_string())
}

pub fn outer_face(t: &Tree, v: &str) -> Result<OmegaMap, MapError> {
    let vi = t.vertex_index(v).ok_or_else(|| TreeError::UnknownVertex(v.to_string()))?;
    let src = t.cut(vi)?;
    OmegaMap::from_names(src, t.clone(), |x| x.to_string())
}

/// | → T picking one edge.
pub fn edge_inclusion(t: &Tree, e: &str) -> Result<OmegaMap, MapError> {
    let ei = t.edge_index(e).ok_or_else(|| TreeError::UnknownEdge(e.to_string()))?;
    OmegaMap::new(crate::trees::unit_tree(e), t.clone(), vec![ei])
}

/// All faces of T, in a fixed order: inner faces, outer faces, then edge
/// inclusions when T is a corolla.
pub fn faces_of(t: &Tree) -> Result<Vec<OmegaMap>, MapError> {
    if t.is_trivial() {
        return Err(MapError::Tree(TreeError::NoFaces));
    }
    if t.is_corolla() {
        return t.edges().iter().map(|e| edge_inclusion(t, e)).collect();
    }
    let mut out = Vec::new();
    for e in t.inner_edges() {
        out.push(inner_face(t, t.edge_name(e))?);
    }
    for (k, v) in t.vertices().iter().enumerate() {
        if t.adjacent_inner(k).len() == 1 {
            out.push(outer_face(t, &v.name)?);
        }
    }
    Ok(out)
}

/// Label of a face, used for horns and reports.
pub fn face_label(t: &Tree, f: &OmegaMap) -> String {
    if f.source.is_trivial() {
        return format!("edge:{}", t.edge_name(f.edge_map[0]));
    }
    let image: BTreeSet<usize> = f.edge_map.iter().copied().collect();
    if image.len() + 1 == t.num_edges() {
        if let Some(e) = (0..t.num_edges()).find(|e| !image.contains(e) && t.is_inner(*e)) {
            return format!("inner:{}", t.edge_name(e));
        }
    }
    let covered: BTreeSet<usize> = f.sub_key().1.into_iter().flatten().collect();
    let missing: Vec<&str> =
        (0..t.degree()).filter(|k| !covered.contains(k)).map(|k| t.vertices()[k].name.as_str()).collect();
    format!("outer:{}", missing.join(","))
}

pub fn degeneracy(t: &Tree, v: &str) -> Result<OmegaMap, MapError> {
    let vi = t.vertex_index(v).ok_or_else(|| TreeError::UnknownVertex(v.to_string()))?;
    let tgt = t.delete_unary(vi)?;
    let vx = &t.vertices()[vi];
    let (out, inp) = (t.edge_name(vx.out).to_string(), t.edge_name(vx.inputs[0]).to_string());
    OmegaMap::from_names(t.clone(), tgt, |x| if x == out { inp.clone() } else { x.to_string() })
}

pub fn degeneracies_of(t: &Tree) -> Vec<OmegaMap> {
    t.vertices()
        .iter()
        .filter(|v| v.inputs.len() == 1)
        .map(|v| degeneracy(t, &v.name).expect("unary vertex"))
        .collect()
}

/// Every operad map Ω(R) → Ω(T).
pub fn enumerate_maps(r: &Tree, t: &Tree) -> Vec<OmegaMap> {
    let mut out = Vec::new();
    let mut em = vec![usize::MAX; r.num_edges()];
    for x in 0..t.num_edges() {
        em[0] = x;
        extend(r, t, 0, &mut em, &mut out, false);
    }
    out
}

/// Only the injective maps; same search with units and repeated edges pruned.
pub fn enumerate_monos(r: &Tree, t: &Tree) -> Vec<OmegaMap> {
    let mut out = Vec::new();
    let mut em = vec![usize::MAX; r.num_edges()];
    if r.num_edges() > t.num_edges() {
        return out;
    }
    for x in 0..t.num_edges() {
        em[0] = x;
        extend(r, t, 0, &mut em, &mut out, true);
    }
    out
}

fn extend(r: &Tree, t: &Tree, v: usize, em: &mut Vec<usize>, out: &mut Vec<OmegaMap>, mono: bool) {
    if v == r.degree() {
        out.push(OmegaMap { source: r.clone(), target: t.clone(), edge_map: em.clone() });
        return;
    }
    let vx = &r.vertices()[v];
    let x = em[vx.out];
    let n = vx.inputs.len();
    if n == 1 && !mono {
        em[vx.inputs[0]] = x;
        extend(r, t, v + 1, em, out, mono);
    }
    for sub in t.subtrees_at(x) {
        if sub.leaves.len() != n {
            continue;
        }
        if mono && sub.leaves.iter().any(|l| em[..].contains(l)) {
            continue;
        }
        for perm in permutations(n) {
            for (k, &i) in vx.inputs.iter().enumerate() {
                em[i] = sub.leaves[perm[k]];
            }
            extend(r, t, v + 1, em, out, mono);
        }
        for &i in &vx.inputs {
            em[i] = usize::MAX;
        }
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k - 1 {
        heap(k - 1, a, out);
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    heap(k - 1, a, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{corolla, example_t3, linear, unit_tree};

    #[test]
    fn inner_faces_of_t3() {
        let t = example_t3();
        let fb = inner_face(&t, "b").unwrap();
        assert_eq!(fb.source.degree(), 2);
        let merged = fb.source.vertex_index("a").unwrap();
        let ins: BTreeSet<&str> =
            fb.source.vertices()[merged].inputs.iter().map(|&i| fb.source.edge_name(i)).collect();
        assert_eq!(ins, ["c", "d", "e", "f"].into_iter().collect());
        assert_eq!(fb.source.vertices()[merged].name, "v∘_bw");
        let imgs = fb.vertex_images().unwrap();
        assert!(matches!(&imgs[merged], VImage::Op { verts, .. } if verts.len() == 2));
        let fc = inner_face(&t, "c").unwrap();
        let m = fc.source.vertex_index("a").unwrap();
        assert_eq!(fc.source.arity(m), 1);
        assert!(inner_face(&corolla(2), "l1").is_err());
    }

    #[test]
    fn outer_faces_of_t3() {
        let t = example_t3();
        let fw = outer_face(&t, "w").unwrap();
        let names: BTreeSet<&str> = fw.source.vertices().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["u", "v"].into_iter().collect());
        assert!(outer_face(&t, "v").is_err());
        let fu = outer_face(&t, "u").unwrap();
        assert!(fu.source.is_leaf(fu.source.edge_index("c").unwrap()));
        assert_eq!(fu.source.degree(), 2);
    }

    #[test]
    fn face_counts() {
        assert_eq!(faces_of(&corolla(2)).unwrap().len(), 3);
        assert_eq!(faces_of(&example_t3()).unwrap().len(), 4);
        assert_eq!(faces_of(&linear(2)).unwrap().len(), 3);
        assert!(faces_of(&linear(0)).is_err());
    }

    #[test]
    fn degeneracies() {
        let s = degeneracy(&linear(1), "v1").unwrap();
        assert!(s.target.is_trivial());
        let t = Tree::named("r", &[("x", "r", &["f"]), ("v", "f", &["e"])]).unwrap();
        let s = degeneracy(&t, "v").unwrap();
        let m = s.named_edge_map();
        assert_eq!((m["e"].as_str(), m["f"].as_str()), ("e", "e"));
        assert!(degeneracy(&corolla(2), "v").is_err());
    }

    #[test]
    fn composition_examples() {
        let t = example_t3();
        let fw = outer_face(&t, "w").unwrap();
        let inc = edge_inclusion(&fw.source, "b").unwrap();
        let c = compose(&fw, &inc).unwrap();
        assert_eq!(c.named_edge_map()["b"], "b");
        assert!(compose(&OmegaMap::identity(&t), &fw).unwrap() == fw);
        let sigma = degeneracy(&linear(1), "v1").unwrap();
        let d = OmegaMap::new(unit_tree("e0"), linear(1), vec![0]).unwrap();
        let id = compose(&sigma, &d).unwrap();
        assert!(id.is_iso());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_maps(&linear(0), &corolla(2)).len(), 3);
        assert_eq!(enumerate_maps(&corolla(1), &corolla(1)).len(), 3);
        assert_eq!(enumerate_maps(&corolla(2), &corolla(2)).len(), 2);
    }

    #[test]
    fn monos_agree_with_filter() {
        let t = example_t3();
        for r in crate::trees::all_trees(3, 6, 3) {
            let a: BTreeSet<Vec<usize>> =
                enumerate_maps(&r, &t).into_iter().filter(|m| m.is_monic()).map(|m| m.edge_map).collect();
            let b: BTreeSet<Vec<usize>> = enumerate_monos(&r, &t).into_iter().map(|m| m.edge_map).collect();
            assert_eq!(a, b);
        }
    }
}
