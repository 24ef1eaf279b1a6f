//! Finite categories, functors and natural transformations, finite
//! products, and the interval H.
//!
//! Products are materialized. Object and morphism indices of a product are
//! mixed-radix with the first factor least significant.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatError {
    #[error("category `{0}`: {1}")]
    Law(String, String),
    #[error("functor: {0}")]
    Functor(String),
    #[error("natural transformation: {0}")]
    Nat(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mor {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<Mor>,
    pub identity: Vec<usize>,
    /// comp[g][f] = g ∘ f when tgt(f) = src(g).
    comp: Vec<Vec<Option<usize>>>,
    hom: Vec<Vec<Vec<usize>>>,
    /// Factor sizes when this is a product: (objects, morphisms) per factor.
    factors: Vec<(usize, usize)>,
}

impl FinCat {
    /// Build from morphisms and a composition rule; identities are the
    /// listed morphism indices.
    pub fn new<F>(name: &str, objects: Vec<String>, morphisms: Vec<Mor>, identity: Vec<usize>, rule: F) -> Result<FinCat, CatError>
    where
        F: Fn(usize, usize) -> Option<usize>,
    {
        let n = morphisms.len();
        let mut comp = vec![vec![None; n]; n];
        for g in 0..n {
            for f in 0..n {
                if morphisms[f].tgt == morphisms[g].src {
                    comp[g][f] = rule(g, f);
                }
            }
        }
        let c = FinCat::assemble(name, objects, morphisms, identity, comp, Vec::new());
        let bad = c.validate();
        if let Some(b) = bad.first() {
            return Err(CatError::Law(name.to_string(), b.clone()));
        }
        Ok(c)
    }

    fn assemble(
        name: &str,
        objects: Vec<String>,
        morphisms: Vec<Mor>,
        identity: Vec<usize>,
        comp: Vec<Vec<Option<usize>>>,
        factors: Vec<(usize, usize)>,
    ) -> FinCat {
        let no = objects.len();
        let mut hom = vec![vec![Vec::new(); no]; no];
        for (k, m) in morphisms.iter().enumerate() {
            hom[m.src][m.tgt].push(k);
        }
        FinCat { name: name.to_string(), objects, morphisms, identity, comp, hom, factors }
    }

    /// Build from a list of (g, f, g∘f) triples.
    pub fn from_table(name: &str, objects: Vec<String>, morphisms: Vec<Mor>, identity: Vec<usize>, table: &[(usize, usize, usize)]) -> Result<FinCat, CatError> {
        let mut map: HashMap<(usize, usize), usize> = table.iter().map(|&(g, f, h)| ((g, f), h)).collect();
        for (o, &i) in identity.iter().enumerate() {
            for (k, m) in morphisms.iter().enumerate() {
                if m.src == o {
                    map.entry((k, i)).or_insert(k);
                }
                if m.tgt == o {
                    map.entry((i, k)).or_insert(k);
                }
            }
        }
        FinCat::new(name, objects, morphisms, identity, |g, f| map.get(&(g, f)).copied())
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }
    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }
    pub fn src(&self, f: usize) -> usize {
        self.morphisms[f].src
    }
    pub fn tgt(&self, f: usize) -> usize {
        self.morphisms[f].tgt
    }
    pub fn id(&self, o: usize) -> usize {
        self.identity[o]
    }
    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.hom[a][b]
    }
    /// g ∘ f.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp[g][f]
    }
    pub fn c(&self, g: usize, f: usize) -> usize {
        self.comp[g][f].unwrap_or_else(|| panic!("{}: {} ∘ {} not composable", self.name, self.morphisms[g].name, self.morphisms[f].name))
    }
    pub fn inverse(&self, f: usize) -> Option<usize> {
        let (a, b) = (self.src(f), self.tgt(f));
        self.hom[b][a].iter().copied().find(|&g| self.comp[g][f] == Some(self.identity[a]) && self.comp[f][g] == Some(self.identity[b]))
    }
    pub fn is_iso(&self, f: usize) -> bool {
        self.inverse(f).is_some()
    }
    pub fn is_groupoid(&self) -> bool {
        (0..self.num_morphisms()).all(|f| self.is_iso(f))
    }
    pub fn isos(&self, a: usize, b: usize) -> Vec<usize> {
        self.hom[a][b].iter().copied().filter(|&f| self.is_iso(f)).collect()
    }
    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }
    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    /// Every violated law, empty for a category.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let n = self.num_morphisms();
        for (o, &i) in self.identity.iter().enumerate() {
            if self.src(i) != o || self.tgt(i) != o {
                bad.push(format!("identity of {} has wrong ends", self.objects[o]));
            }
        }
        for g in 0..n {
            for f in 0..n {
                if self.tgt(f) != self.src(g) {
                    continue;
                }
                match self.comp[g][f] {
                    None => bad.push(format!("{} ∘ {} undefined", self.morphisms[g].name, self.morphisms[f].name)),
                    Some(h) => {
                        if self.src(h) != self.src(f) || self.tgt(h) != self.tgt(g) {
                            bad.push(format!("{} ∘ {} has wrong ends", self.morphisms[g].name, self.morphisms[f].name));
                        }
                    }
                }
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        for f in 0..n {
            if self.comp[f][self.id(self.src(f))] != Some(f) || self.comp[self.id(self.tgt(f))][f] != Some(f) {
                bad.push(format!("unit law fails at {}", self.morphisms[f].name));
            }
        }
        for f in 0..n {
            for &g in self.hom[self.tgt(f)].iter().flatten() {
                for &h in self.hom[self.tgt(g)].iter().flatten() {
                    let l = self.c(self.c(h, g), f);
                    let r = self.c(h, self.c(g, f));
                    if l != r {
                        bad.push(format!(
                            "associativity fails at ({}, {}, {})",
                            self.morphisms[h].name, self.morphisms[g].name, self.morphisms[f].name
                        ));
                    }
                }
            }
        }
        bad
    }

    pub fn opposite(&self) -> FinCat {
        let morphisms = self.morphisms.iter().map(|m| Mor { name: m.name.clone(), src: m.tgt, tgt: m.src }).collect();
        let n = self.num_morphisms();
        let mut comp = vec![vec![None; n]; n];
        for g in 0..n {
            for f in 0..n {
                comp[g][f] = self.comp[f][g];
            }
        }
        FinCat::assemble(&format!("{}^op", self.name), self.objects.clone(), morphisms, self.identity.clone(), comp, Vec::new())
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn obj_tuple(&self, o: usize) -> Vec<usize> {
        split_radix(o, self.factors.iter().map(|f| f.0))
    }
    pub fn mor_tuple(&self, m: usize) -> Vec<usize> {
        split_radix(m, self.factors.iter().map(|f| f.1))
    }
    pub fn obj_of(&self, t: &[usize]) -> usize {
        join_radix(t, self.factors.iter().map(|f| f.0))
    }
    pub fn mor_of(&self, t: &[usize]) -> usize {
        join_radix(t, self.factors.iter().map(|f| f.1))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut table = Vec::new();
        for g in 0..self.num_morphisms() {
            for f in 0..self.num_morphisms() {
                if let Some(h) = self.comp[g][f] {
                    table.push([g, f, h]);
                }
            }
        }
        serde_json::json!({
            "name": self.name,
            "objects": self.objects,
            "morphisms": self.morphisms,
            "identities": self.identity,
            "comp": table,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<FinCat, CatError> {
        #[derive(Deserialize)]
        struct J {
            #[serde(default)]
            name: String,
            objects: Vec<String>,
            morphisms: Vec<Mor>,
            identities: Vec<usize>,
            comp: Vec<(usize, usize, usize)>,
        }
        let j: J = serde_json::from_value(v.clone()).map_err(|e| CatError::Shape(e.to_string()))?;
        let (no, nm) = (j.objects.len(), j.morphisms.len());
        if j.identities.len() != no
            || j.identities.iter().any(|&i| i >= nm)
            || j.morphisms.iter().any(|m| m.src >= no || m.tgt >= no)
            || j.comp.iter().any(|&(a, b, c)| a >= nm || b >= nm || c >= nm)
        {
            return Err(CatError::Shape("index out of range".into()));
        }
        FinCat::from_table(&j.name, j.objects, j.morphisms, j.identities, &j.comp)
    }
}

fn split_radix(mut x: usize, radices: impl Iterator<Item = usize>) -> Vec<usize> {
    radices
        .map(|r| {
            let d = x % r;
            x /= r;
            d
        })
        .collect()
}

fn join_radix(t: &[usize], radices: impl Iterator<Item = usize>) -> usize {
    let mut acc = 0;
    let mut mul = 1;
    for (d, r) in t.iter().zip(radices) {
        acc += d * mul;
        mul *= r;
    }
    acc
}

/// Cartesian product; the empty product is the terminal category.
pub fn product_cat(cats: &[&FinCat]) -> FinCat {
    let no: usize = cats.iter().map(|c| c.num_objects()).product();
    let nm: usize = cats.iter().map(|c| c.num_morphisms()).product();
    let factors: Vec<(usize, usize)> = cats.iter().map(|c| (c.num_objects(), c.num_morphisms())).collect();
    let orad = || factors.iter().map(|f| f.0);
    let mrad = || factors.iter().map(|f| f.1);
    let objects: Vec<String> = (0..no)
        .map(|o| {
            let t = split_radix(o, orad());
            if cats.len() == 1 {
                return cats[0].objects[t[0]].clone();
            }
            format!("({})", t.iter().zip(cats).map(|(&x, c)| c.objects[x].clone()).collect::<Vec<_>>().join(","))
        })
        .collect();
    let morphisms: Vec<Mor> = (0..nm)
        .map(|m| {
            let t = split_radix(m, mrad());
            let name = if cats.is_empty() {
                "id".to_string()
            } else if cats.len() == 1 {
                cats[0].morphisms[t[0]].name.clone()
            } else {
                format!("({})", t.iter().zip(cats).map(|(&x, c)| c.morphisms[x].name.clone()).collect::<Vec<_>>().join(","))
            };
            let src: Vec<usize> = t.iter().zip(cats).map(|(&x, c)| c.src(x)).collect();
            let tgt: Vec<usize> = t.iter().zip(cats).map(|(&x, c)| c.tgt(x)).collect();
            Mor { name, src: join_radix(&src, orad()), tgt: join_radix(&tgt, orad()) }
        })
        .collect();
    let identity: Vec<usize> = (0..no)
        .map(|o| {
            let t = split_radix(o, orad());
            let ids: Vec<usize> = t.iter().zip(cats).map(|(&x, c)| c.id(x)).collect();
            join_radix(&ids, mrad())
        })
        .collect();
    let tuples: Vec<Vec<usize>> = (0..nm).map(|m| split_radix(m, mrad())).collect();
    let mut comp = vec![vec![None; nm]; nm];
    for g in 0..nm {
        for f in 0..nm {
            if morphisms[f].tgt != morphisms[g].src {
                continue;
            }
            let h: Vec<usize> = tuples[g].iter().zip(&tuples[f]).zip(cats).map(|((&a, &b), c)| c.c(a, b)).collect();
            comp[g][f] = Some(join_radix(&h, mrad()));
        }
    }
    let name = if cats.is_empty() { "*".to_string() } else { cats.iter().map(|c| c.name.clone()).collect::<Vec<_>>().join("×") };
    FinCat::assemble(&name, objects, morphisms, identity, comp, factors)
}

pub fn terminal() -> FinCat {
    product_cat(&[])
}

/// Indiscrete category: exactly one morphism between any two objects.
pub fn indiscrete(name: &str, objects: &[&str]) -> FinCat {
    let n = objects.len();
    let mut morphisms = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let nm = if a == b { format!("id_{}", objects[a]) } else { format!("{}→{}", objects[a], objects[b]) };
            morphisms.push(Mor { name: nm, src: a, tgt: b });
        }
    }
    let identity = (0..n).map(|a| a * n + a).collect();
    FinCat::new(name, objects.iter().map(|s| s.to_string()).collect(), morphisms, identity, |g, f| {
        let (a, _) = (f / n, f % n);
        let c = g % n;
        Some(a * n + c)
    })
    .expect("indiscrete category")
}

/// H^k; object tuples in {0,1}^k.
pub fn hypercube(k: usize) -> FinCat {
    let h = interval().cat;
    let hs: Vec<&FinCat> = (0..k).map(|_| &h).collect();
    let mut c = product_cat(&hs);
    c.name = format!("H^{}", k);
    c
}

/// A functor as object and morphism maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Functor {
    pub obj: Vec<usize>,
    pub mor: Vec<usize>,
}

impl Functor {
    pub fn identity(c: &FinCat) -> Functor {
        Functor { obj: (0..c.num_objects()).collect(), mor: (0..c.num_morphisms()).collect() }
    }
    /// `self ∘ f`.
    pub fn after(&self, f: &Functor) -> Functor {
        Functor { obj: f.obj.iter().map(|&o| self.obj[o]).collect(), mor: f.mor.iter().map(|&m| self.mor[m]).collect() }
    }
    /// The constant functor at an object.
    pub fn constant(c: &FinCat, d: &FinCat, o: usize) -> Functor {
        Functor { obj: vec![o; c.num_objects()], mor: vec![d.id(o); c.num_morphisms()] }
    }
}

pub fn check_functor(c: &FinCat, d: &FinCat, f: &Functor) -> Result<(), CatError> {
    if f.obj.len() != c.num_objects() || f.mor.len() != c.num_morphisms() {
        return Err(CatError::Shape("functor tables have the wrong size".into()));
    }
    for (k, m) in c.morphisms.iter().enumerate() {
        let fm = f.mor[k];
        if fm >= d.num_morphisms() || d.src(fm) != f.obj[m.src] || d.tgt(fm) != f.obj[m.tgt] {
            return Err(CatError::Functor(format!("image of {} has the wrong ends", m.name)));
        }
    }
    for (o, &i) in c.identity.iter().enumerate() {
        if f.mor[i] != d.id(f.obj[o]) {
            return Err(CatError::Functor(format!("identity of {} not preserved", c.objects[o])));
        }
    }
    for g in 0..c.num_morphisms() {
        for f0 in 0..c.num_morphisms() {
            if let Some(h) = c.compose(g, f0) {
                if d.compose(f.mor[g], f.mor[f0]) != Some(f.mor[h]) {
                    return Err(CatError::Functor(format!(
                        "composite {} ∘ {} not preserved",
                        c.morphisms[g].name, c.morphisms[f0].name
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Every functor C → D, by backtracking over morphism images.
pub fn enumerate_functors(c: &FinCat, d: &FinCat) -> Vec<Functor> {
    let mut out = Vec::new();
    let no = c.num_objects();
    let total = d.num_objects().pow(no as u32);
    for code in 0..total {
        let obj = split_radix(code, std::iter::repeat(d.num_objects()).take(no));
        let mut mor = vec![usize::MAX; c.num_morphisms()];
        for (o, &i) in c.identity.iter().enumerate() {
            mor[i] = d.id(obj[o]);
        }
        functor_rec(c, d, &obj, 0, &mut mor, &mut out);
    }
    out
}

fn functor_rec(c: &FinCat, d: &FinCat, obj: &[usize], k: usize, mor: &mut Vec<usize>, out: &mut Vec<Functor>) {
    if k == c.num_morphisms() {
        out.push(Functor { obj: obj.to_vec(), mor: mor.clone() });
        return;
    }
    if mor[k] != usize::MAX && c.identity.contains(&k) {
        if consistent(c, d, k, mor) {
            functor_rec(c, d, obj, k + 1, mor, out);
        }
        return;
    }
    let m = &c.morphisms[k];
    for &x in d.hom(obj[m.src], obj[m.tgt]) {
        mor[k] = x;
        if consistent(c, d, k, mor) {
            functor_rec(c, d, obj, k + 1, mor, out);
        }
    }
    mor[k] = usize::MAX;
}

/// Check composites among assigned morphisms that involve `k`.
fn consistent(c: &FinCat, d: &FinCat, k: usize, mor: &[usize]) -> bool {
    let n = c.num_morphisms();
    for g in 0..n {
        for f in 0..n {
            if let Some(h) = c.compose(g, f) {
                if g != k && f != k && h != k {
                    continue;
                }
                if mor[g] == usize::MAX || mor[f] == usize::MAX || mor[h] == usize::MAX {
                    continue;
                }
                if d.compose(mor[g], mor[f]) != Some(mor[h]) {
                    return false;
                }
            }
        }
    }
    true
}

/// A natural transformation F ⇒ G: one component per object of the source.
pub type Components = Vec<usize>;

pub fn check_nat(c: &FinCat, d: &FinCat, f: &Functor, g: &Functor, comps: &[usize]) -> Result<(), CatError> {
    if comps.len() != c.num_objects() {
        return Err(CatError::Shape("wrong number of components".into()));
    }
    for (o, &a) in comps.iter().enumerate() {
        if a >= d.num_morphisms() || d.src(a) != f.obj[o] || d.tgt(a) != g.obj[o] {
            return Err(CatError::Nat(format!("component at {} has the wrong ends", c.objects[o])));
        }
    }
    for (k, m) in c.morphisms.iter().enumerate() {
        if d.compose(comps[m.tgt], f.mor[k]) != d.compose(g.mor[k], comps[m.src]) {
            return Err(CatError::Nat(format!("naturality square fails at {}", m.name)));
        }
    }
    Ok(())
}

pub fn check_nat_iso(c: &FinCat, d: &FinCat, f: &Functor, g: &Functor, comps: &[usize]) -> Result<(), CatError> {
    check_nat(c, d, f, g, comps)?;
    for (o, &a) in comps.iter().enumerate() {
        if !d.is_iso(a) {
            return Err(CatError::Nat(format!("component at {} is not invertible", c.objects[o])));
        }
    }
    Ok(())
}

pub fn identity_nat(d: &FinCat, f: &Functor) -> Components {
    f.obj.iter().map(|&o| d.id(o)).collect()
}

/// Vertical composite β ∘ α.
pub fn vcompose(d: &FinCat, beta: &[usize], alpha: &[usize]) -> Components {
    beta.iter().zip(alpha).map(|(&b, &a)| d.c(b, a)).collect()
}

pub fn vinverse(d: &FinCat, alpha: &[usize]) -> Option<Components> {
    alpha.iter().map(|&a| d.inverse(a)).collect()
}

/// Every natural isomorphism F ⇒ G.
pub fn enumerate_nat_isos(c: &FinCat, d: &FinCat, f: &Functor, g: &Functor) -> Vec<Components> {
    let mut out = Vec::new();
    let mut comps = vec![usize::MAX; c.num_objects()];
    nat_rec(c, d, f, g, 0, &mut comps, &mut out);
    out
}

fn nat_rec(c: &FinCat, d: &FinCat, f: &Functor, g: &Functor, o: usize, comps: &mut Vec<usize>, out: &mut Vec<Components>) {
    if o == c.num_objects() {
        out.push(comps.clone());
        return;
    }
    for a in d.isos(f.obj[o], g.obj[o]) {
        comps[o] = a;
        let ok = c.morphisms.iter().enumerate().all(|(k, m)| {
            m.src > o || m.tgt > o || d.compose(comps[m.tgt], f.mor[k]) == d.compose(g.mor[k], comps[m.src])
        });
        if ok {
            nat_rec(c, d, f, g, o + 1, comps, out);
        }
    }
    comps[o] = usize::MAX;
}

/// F₁ ∘_i F₂ for F₁ : X₁×…×Xₙ → X and F₂ : Y₁×…×Yₘ → Xᵢ. Returns the
/// new source product and the composite.
pub fn compose_i(xs: &[&FinCat], f1: &Functor, i: usize, ys: &[&FinCat], f2: &Functor) -> (FinCat, Functor) {
    let mut srcs: Vec<&FinCat> = xs[..i].to_vec();
    srcs.extend_from_slice(ys);
    srcs.extend_from_slice(&xs[i + 1..]);
    let p = product_cat(&srcs);
    let px = product_cat(xs);
    let py = product_cat(ys);
    let m = ys.len();
    let obj = (0..p.num_objects())
        .map(|o| {
            let t = p.obj_tuple(o);
            let y = py.obj_of(&t[i..i + m]);
            let mut u = t[..i].to_vec();
            u.push(f2.obj[y]);
            u.extend_from_slice(&t[i + m..]);
            f1.obj[px.obj_of(&u)]
        })
        .collect();
    let mor = (0..p.num_morphisms())
        .map(|k| {
            let t = p.mor_tuple(k);
            let y = py.mor_of(&t[i..i + m]);
            let mut u = t[..i].to_vec();
            u.push(f2.mor[y]);
            u.extend_from_slice(&t[i + m..]);
            f1.mor[px.mor_of(&u)]
        })
        .collect();
    (p, Functor { obj, mor })
}

/// φ ∘_i F₂: components of φ at (x_<i, F₂(y), x_>i).
pub fn whisker_right(xs: &[&FinCat], phi: &[usize], i: usize, ys: &[&FinCat], f2: &Functor) -> Components {
    let px = product_cat(xs);
    let py = product_cat(ys);
    let m = ys.len();
    let mut srcs: Vec<&FinCat> = xs[..i].to_vec();
    srcs.extend_from_slice(ys);
    srcs.extend_from_slice(&xs[i + 1..]);
    let p = product_cat(&srcs);
    (0..p.num_objects())
        .map(|o| {
            let t = p.obj_tuple(o);
            let mut u = t[..i].to_vec();
            u.push(f2.obj[py.obj_of(&t[i..i + m])]);
            u.extend_from_slice(&t[i + m..]);
            phi[px.obj_of(&u)]
        })
        .collect()
}

/// F₁ ∘_i ψ: F₁ applied to (id, ψ(y), id).
pub fn whisker_left(xs: &[&FinCat], f1: &Functor, i: usize, ys: &[&FinCat], psi: &[usize]) -> Components {
    let px = product_cat(xs);
    let py = product_cat(ys);
    let m = ys.len();
    let mut srcs: Vec<&FinCat> = xs[..i].to_vec();
    srcs.extend_from_slice(ys);
    srcs.extend_from_slice(&xs[i + 1..]);
    let p = product_cat(&srcs);
    (0..p.num_objects())
        .map(|o| {
            let t = p.obj_tuple(o);
            let mut u: Vec<usize> = t[..i].iter().zip(xs).map(|(&x, c)| c.id(x)).collect();
            u.push(psi[py.obj_of(&t[i..i + m])]);
            u.extend(t[i + m..].iter().zip(&xs[i + 1..]).map(|(&x, c)| c.id(x)));
            f1.mor[px.mor_of(&u)]
        })
        .collect()
}

/// The interval H with ∨, the points 0 and 1 and the augmentation ε.
#[derive(Clone, Debug)]
pub struct Interval {
    pub cat: FinCat,
    /// ∨ : H × H → H.
    pub vee: Functor,
    pub zero: Functor,
    pub one: Functor,
    pub eps: Functor,
}

pub fn interval() -> Interval {
    let cat = indiscrete("H", &["0", "1"]);
    let hh = product_cat(&[&cat, &cat]);
    let n = 2;
    let obj: Vec<usize> = (0..4).map(|o| {
        let t = hh.obj_tuple(o);
        t[0].max(t[1])
    }).collect();
    let mor = (0..hh.num_morphisms())
        .map(|m| {
            let (s, t) = (hh.src(m), hh.tgt(m));
            obj[s] * n + obj[t]
        })
        .collect();
    let vee = Functor { obj, mor };
    let zero = Functor { obj: vec![0], mor: vec![cat.id(0)] };
    let one = Functor { obj: vec![1], mor: vec![cat.id(1)] };
    let eps = Functor { obj: vec![0, 0], mor: vec![0; 4] };
    Interval { cat, vee, zero, one, eps }
}

impl Interval {
    /// Every failing law, by name.
    pub fn check_laws(&self) -> Vec<String> {
        let h = &self.cat;
        let mut bad = Vec::new();
        let hh = product_cat(&[h, h]);
        if check_functor(&hh, h, &self.vee).is_err() {
            bad.push("∨ is not a functor".into());
        }
        let star = terminal();
        for (name, f) in [("0", &self.zero), ("1", &self.one)] {
            if check_functor(&star, h, f).is_err() {
                bad.push(format!("{} is not a functor", name));
            }
        }
        if check_functor(h, &star, &self.eps).is_err() {
            bad.push("ε is not a functor".into());
        }
        let v = |a: usize, b: usize| self.vee.mor[hh.mor_of(&[a, b])];
        let z = self.zero.mor[0];
        let o = self.one.mor[0];
        for a in 0..h.num_morphisms() {
            for b in 0..h.num_morphisms() {
                for c in 0..h.num_morphisms() {
                    if v(v(a, b), c) != v(a, v(b, c)) {
                        bad.push(format!("∨ not associative at ({}, {}, {})", a, b, c));
                    }
                }
            }
            if v(z, a) != a || v(a, z) != a {
                bad.push(format!("0 not neutral at {}", h.morphisms[a].name));
            }
            if v(o, a) != o || v(a, o) != o {
                bad.push(format!("1 not absorbing at {}", h.morphisms[a].name));
            }
        }
        if self.eps.after(&self.zero) != Functor::identity(&star) || self.eps.after(&self.one) != Functor::identity(&star) {
            bad.push("ε∘0 or ε∘1 is not the identity".into());
        }
        bad
    }
}

/// Shipped fixtures.
pub mod fixtures {
    use super::*;

    pub fn star() -> FinCat {
        terminal()
    }

    pub fn h() -> FinCat {
        interval().cat
    }

    /// 0 → 1.
    pub fn arrow() -> FinCat {
        poset("arrow", &["0", "1"], &[(0, 1)])
    }

    /// Two objects; every hom set has two elements; all maps invertible.
    pub fn groupoid2() -> FinCat {
        let z2 = group_z2();
        let mut g = product_cat(&[&z2, &h()]);
        g.name = "Z2×H".into();
        g.objects = vec!["a".into(), "b".into()];
        g
    }

    /// 0 ≤ 1 ≤ 2.
    pub fn poset3() -> FinCat {
        poset("[2]", &["0", "1", "2"], &[(0, 1), (1, 2), (0, 2)])
    }

    /// Three objects, two parallel maps 0 ⇉ 1 followed by one map 1 → 2.
    pub fn fork() -> FinCat {
        let objects = vec!["0".into(), "1".into(), "2".into()];
        let m = |n: &str, s, t| Mor { name: n.into(), src: s, tgt: t };
        let morphisms = vec![
            m("id0", 0, 0), m("id1", 1, 1), m("id2", 2, 2),
            m("f", 0, 1), m("g", 0, 1), m("h", 1, 2), m("hf", 0, 2), m("hg", 0, 2),
        ];
        FinCat::from_table("fork", objects, morphisms, vec![0, 1, 2], &[(5, 3, 6), (5, 4, 7)]).expect("fork")
    }

    /// One object, automorphism group Z/2.
    pub fn group_z2() -> FinCat {
        let m = |n: &str| Mor { name: n.into(), src: 0, tgt: 0 };
        FinCat::from_table("Z2", vec!["*".into()], vec![m("e"), m("s")], vec![0], &[(1, 1, 0)]).expect("Z2")
    }

    /// A poset given by its non-identity relations (transitively closed).
    pub fn poset(name: &str, objects: &[&str], rel: &[(usize, usize)]) -> FinCat {
        let n = objects.len();
        let mut morphisms: Vec<Mor> = (0..n).map(|o| Mor { name: format!("id{}", objects[o]), src: o, tgt: o }).collect();
        for &(a, b) in rel {
            morphisms.push(Mor { name: format!("{}≤{}", objects[a], objects[b]), src: a, tgt: b });
        }
        let find = |a: usize, b: usize, ms: &[Mor]| ms.iter().position(|m| m.src == a && m.tgt == b);
        let ms = morphisms.clone();
        FinCat::new(name, objects.iter().map(|s| s.to_string()).collect(), morphisms, (0..n).collect(), |g, f| {
            find(ms[f].src, ms[g].tgt, &ms)
        })
        .expect("poset")
    }

    pub fn all() -> Vec<FinCat> {
        vec![star(), h(), arrow(), groupoid2(), poset3()]
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fixtures_are_categories() {
        for c in all().iter().chain([fork(), group_z2()].iter()) {
            assert!(c.validate().is_empty(), "{}", c.name);
        }
        assert!(groupoid2().is_groupoid());
        assert_eq!(groupoid2().num_morphisms(), 8);
    }

    #[test]
    fn interval_laws() {
        let i = interval();
        assert!(i.check_laws().is_empty());
        assert_eq!(i.cat.num_morphisms(), 4);
        assert!(i.cat.is_groupoid());
        let hh = product_cat(&[&i.cat, &i.cat]);
        assert_eq!(i.vee.obj[hh.obj_of(&[0, 1])], 1);
        assert_eq!(i.vee.obj[hh.obj_of(&[0, 0])], 0);
    }

    #[test]
    fn products_and_cubes() {
        let t = product_cat(&[]);
        assert_eq!((t.num_objects(), t.num_morphisms()), (1, 1));
        let h = h();
        assert_eq!(product_cat(&[&h, &h]).num_morphisms(), 16);
        let c0 = hypercube(0);
        assert_eq!((c0.num_objects(), c0.num_morphisms()), (1, 1));
        let c2 = hypercube(2);
        assert_eq!((c2.num_objects(), c2.num_morphisms()), (4, 16));
        assert!(c2.validate().is_empty());
        let (a, b) = (c2.obj_of(&[0, 0]), c2.obj_of(&[1, 1]));
        let diag = c2.hom(a, b)[0];
        assert_eq!(c2.hom(a, b).len(), 1);
        let mid = c2.obj_of(&[1, 0]);
        let mid2 = c2.obj_of(&[0, 1]);
        assert_eq!(c2.c(c2.hom(mid, b)[0], c2.hom(a, mid)[0]), diag);
        assert_eq!(c2.c(c2.hom(mid2, b)[0], c2.hom(a, mid2)[0]), diag);
    }

    #[test]
    fn nat_iso_checks() {
        let g = groupoid2();
        let id = Functor::identity(&g);
        assert!(check_nat_iso(&g, &g, &id, &id, &identity_nat(&g, &id)).is_ok());
        let isos = enumerate_nat_isos(&g, &g, &id, &id);
        // the centre of Z/2 acts at each object, naturality ties the two
        assert_eq!(isos.len(), 2);
        let mut bad = identity_nat(&g, &id);
        bad[0] = g.hom(0, 0).iter().copied().find(|&m| m != g.id(0)).unwrap();
        let err = check_nat_iso(&g, &g, &id, &id, &bad).unwrap_err();
        assert!(matches!(err, CatError::Nat(ref s) if s.contains("naturality")));
    }

    #[test]
    fn whiskering_keeps_isos_valid() {
        let g = groupoid2();
        let a = arrow();
        let fs = enumerate_functors(&a, &g);
        assert!(!fs.is_empty());
        for f1 in enumerate_functors(&g, &g) {
            for phi in enumerate_nat_isos(&g, &g, &f1, &f1) {
                for f2 in &fs {
                    let (p, comp) = compose_i(&[&g], &f1, 0, &[&a], f2);
                    let w = whisker_right(&[&g], &phi, 0, &[&a], f2);
                    assert!(check_nat_iso(&p, &g, &comp, &comp, &w).is_ok());
                }
            }
        }
        for f in &fs {
            let id = Functor::identity(&g);
            for psi in enumerate_nat_isos(&a, &g, f, f) {
                let w = whisker_left(&[&g], &id, 0, &[&a], &psi);
                let (p, comp) = compose_i(&[&g], &id, 0, &[&a], f);
                assert!(check_nat_iso(&p, &g, &comp, &comp, &w).is_ok());
            }
        }
    }

    #[test]
    fn functor_enumeration() {
        // functors [1] → [2] are pairs i ≤ j
        assert_eq!(enumerate_functors(&arrow(), &poset3()).len(), 6);
        for f in enumerate_functors(&group_z2(), &groupoid2()) {
            assert!(check_functor(&group_z2(), &groupoid2(), &f).is_ok());
        }
        assert_eq!(enumerate_functors(&group_z2(), &groupoid2()).len(), 4);
    }
}
