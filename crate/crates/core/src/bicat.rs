//! Finite bicategories (classical and unbiased with strict unit), their
//! homomorphisms, and the translation to dendrices of shape | and C₁ of the
//! dendroidal weak 2-category.
//!
//! Conventions: ψ(f, g) is "first f, then g" (written g·f), so the
//! associator reads α: ψ(f, ψ(g, h)) ⇒ ψ(ψ(f, g), h), λ: ψ(f, Id) ⇒ f and
//! ρ: ψ(Id, f) ⇒ f. Unbiased data is indexed by signatures of
//! As_A ⊗ Ω(L_k): a chain of 0-cells, a level per input and an output level,
//! level 0 at the root.

use crate::dsets::SSet;
use crate::fincat::{
    check_functor, check_nat_iso, enumerate_functors, enumerate_nat_isos, identity_nat, product_cat, vcompose, vinverse,
    Components, FinCat, Functor, Mor,
};
use crate::hcnerve::{assemble, Twist, WDendrex};
use crate::operads::splice_chain;
use crate::trees::Tree;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

// ---------------------------------------------------------------------------
// products and whiskering over a list of categories

/// Products of a fixed list of categories, keyed by factor indices.
pub struct Prods<'a> {
    cats: &'a [FinCat],
    cache: RefCell<HashMap<Vec<usize>, Rc<FinCat>>>,
}

fn splice(xs: &[usize], i: usize, ys: &[usize]) -> Vec<usize> {
    let mut v = xs[..i].to_vec();
    v.extend_from_slice(ys);
    v.extend_from_slice(&xs[i + 1..]);
    v
}

impl<'a> Prods<'a> {
    pub fn new(cats: &'a [FinCat]) -> Prods<'a> {
        Prods { cats, cache: RefCell::new(HashMap::new()) }
    }

    pub fn get(&self, key: &[usize]) -> Rc<FinCat> {
        if let Some(p) = self.cache.borrow().get(key) {
            return p.clone();
        }
        let fs: Vec<&FinCat> = key.iter().map(|&k| &self.cats[k]).collect();
        let p = Rc::new(product_cat(&fs));
        self.cache.borrow_mut().insert(key.to_vec(), p.clone());
        p
    }

    pub fn cat(&self, k: usize) -> &FinCat {
        &self.cats[k]
    }

    /// F₁ ∘_i F₂.
    pub fn comp_i(&self, xs: &[usize], f1: &Functor, i: usize, ys: &[usize], f2: &Functor) -> Functor {
        let (p, px, py) = (self.get(&splice(xs, i, ys)), self.get(xs), self.get(ys));
        let m = ys.len();
        let obj = (0..p.num_objects())
            .map(|o| {
                let t = p.obj_tuple(o);
                let mut u = t[..i].to_vec();
                u.push(f2.obj[py.obj_of(&t[i..i + m])]);
                u.extend_from_slice(&t[i + m..]);
                f1.obj[px.obj_of(&u)]
            })
            .collect();
        let mor = (0..p.num_morphisms())
            .map(|k| {
                let t = p.mor_tuple(k);
                let mut u = t[..i].to_vec();
                u.push(f2.mor[py.mor_of(&t[i..i + m])]);
                u.extend_from_slice(&t[i + m..]);
                f1.mor[px.mor_of(&u)]
            })
            .collect();
        Functor { obj, mor }
    }

    /// φ ∘_i F₂.
    pub fn wr(&self, xs: &[usize], phi: &[usize], i: usize, ys: &[usize], f2: &Functor) -> Components {
        let (p, px, py) = (self.get(&splice(xs, i, ys)), self.get(xs), self.get(ys));
        let m = ys.len();
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

    /// F₁ ∘_i ψ.
    pub fn wl(&self, xs: &[usize], f1: &Functor, i: usize, ys: &[usize], psi: &[usize]) -> Components {
        let (p, px, py) = (self.get(&splice(xs, i, ys)), self.get(xs), self.get(ys));
        let m = ys.len();
        (0..p.num_objects())
            .map(|o| {
                let t = p.obj_tuple(o);
                let mut u: Vec<usize> = t[..i].iter().zip(xs).map(|(&x, &c)| self.cats[c].id(x)).collect();
                u.push(psi[py.obj_of(&t[i..i + m])]);
                u.extend(t[i + m..].iter().zip(&xs[i + 1..]).map(|(&x, &c)| self.cats[c].id(x)));
                f1.mor[px.mor_of(&u)]
            })
            .collect()
    }

    /// Horizontal composite μ ∘_i ν: F₁ ∘_i F₂ ⇒ G₁ ∘_i G₂ for μ: F₁ ⇒ G₁, ν: F₂ ⇒ G₂.
    #[allow(clippy::too_many_arguments)]
    pub fn hcomp(&self, xs: &[usize], f1: &Functor, mu: &[usize], i: usize, ys: &[usize], g2: &Functor, nu: &[usize], d: usize) -> Components {
        let a = self.wl(xs, f1, i, ys, nu);
        let b = self.wr(xs, mu, i, ys, g2);
        vcompose(&self.cats[d], &b, &a)
    }
}

// ---------------------------------------------------------------------------
// signatures

/// A signature of As_A ⊗ Ω(L_k): chain a₀…aₙ, input levels, output level.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LSig {
    pub chain: Vec<usize>,
    pub ins: Vec<usize>,
    pub out: usize,
}

impl LSig {
    pub fn pure(chain: &[usize], l: usize) -> LSig {
        LSig { chain: chain.to_vec(), ins: vec![l; chain.len() - 1], out: l }
    }

    pub fn arity(&self) -> usize {
        self.ins.len()
    }

    pub fn is_unit(&self) -> bool {
        self.arity() == 1 && self.ins[0] == self.out
    }

    pub fn is_pure(&self) -> bool {
        self.ins.iter().all(|&l| l == self.out)
    }

    pub fn admissible(&self) -> bool {
        self.ins.iter().all(|&l| l >= self.out)
    }

    pub fn compose(&self, i: usize, rho: &LSig) -> Option<LSig> {
        if i >= self.arity()
            || rho.out != self.ins[i]
            || rho.chain[0] != self.chain[i]
            || rho.chain[rho.chain.len() - 1] != self.chain[i + 1]
        {
            return None;
        }
        Some(LSig { chain: splice_chain(&self.chain, i, &rho.chain), ins: splice(&self.ins, i, &rho.ins), out: self.out })
    }

    pub fn name(&self) -> String {
        let ch: Vec<String> = self.chain.iter().map(|a| a.to_string()).collect();
        let ls: Vec<String> = self.ins.iter().map(|a| a.to_string()).collect();
        format!("{}[{}→{}]", ch.join("-"), ls.join(","), self.out)
    }

    fn to_json(&self) -> Value {
        json!({"chain": self.chain, "ins": self.ins, "out": self.out})
    }

    fn from_json(v: &Value) -> Result<LSig, String> {
        let get = |k: &str| -> Result<Vec<usize>, String> {
            serde_json::from_value(v.get(k).cloned().unwrap_or(Value::Null)).map_err(|e| format!("signature.{}: {}", k, e))
        };
        let out = v.get("out").and_then(|x| x.as_u64()).ok_or("signature.out missing")? as usize;
        let s = LSig { chain: get("chain")?, ins: get("ins")?, out };
        if s.chain.is_empty() || s.chain.len() != s.ins.len() + 1 {
            return Err("signature: chain and levels disagree".into());
        }
        Ok(s)
    }
}

/// All admissible signatures over n 0-cells with the given number of
/// levels and arity at most `arity`.
pub fn signatures(n: usize, levels: usize, arity: usize) -> Vec<LSig> {
    let mut out = Vec::new();
    for chain in crate::operads::chains(n, arity) {
        let k = chain.len() - 1;
        for o in 0..levels {
            let span = levels - o;
            for code in 0..span.pow(k as u32) {
                let mut c = code;
                let ins = (0..k)
                    .map(|_| {
                        let l = o + c % span;
                        c /= span;
                        l
                    })
                    .collect();
                out.push(LSig { chain: chain.clone(), ins, out: o });
            }
        }
    }
    out.sort();
    out
}

pub type PhiKey = (LSig, usize, LSig);

// ---------------------------------------------------------------------------
// unbiased cells

/// Functors Ψ_σ and associator isos φ_{σ,i,ρ}: Ψ_{σ∘_iρ} ⇒ Ψ_σ ∘_i Ψ_ρ for
/// every admissible signature of arity at most `arity`. The category of the
/// colour (a, b, l) is `cats[(a·n + b)·levels + l]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cells {
    pub n: usize,
    pub levels: usize,
    pub arity: usize,
    pub cats: Vec<FinCat>,
    pub psi: BTreeMap<LSig, Functor>,
    pub phi: BTreeMap<PhiKey, Components>,
}

impl Cells {
    pub fn colour(&self, a: usize, b: usize, l: usize) -> usize {
        (a * self.n + b) * self.levels + l
    }

    pub fn ins(&self, s: &LSig) -> Vec<usize> {
        (0..s.arity()).map(|k| self.colour(s.chain[k], s.chain[k + 1], s.ins[k])).collect()
    }

    pub fn out(&self, s: &LSig) -> usize {
        self.colour(s.chain[0], s.chain[s.chain.len() - 1], s.out)
    }

    pub fn signatures(&self) -> Vec<LSig> {
        signatures(self.n, self.levels, self.arity)
    }

    /// Every (σ, i, ρ) with σ of positive arity and all three arities bounded.
    pub fn composites(&self) -> Vec<PhiKey> {
        let sigs = self.signatures();
        let mut by_out: HashMap<(usize, usize, usize), Vec<&LSig>> = HashMap::new();
        for s in &sigs {
            by_out.entry((s.chain[0], s.chain[s.chain.len() - 1], s.out)).or_default().push(s);
        }
        let mut out = Vec::new();
        for s in &sigs {
            for i in 0..s.arity() {
                for r in by_out.get(&(s.chain[i], s.chain[i + 1], s.ins[i])).into_iter().flatten() {
                    if s.arity() + r.arity() > self.arity + 1 {
                        continue;
                    }
                    out.push((s.clone(), i, (*r).clone()));
                }
            }
        }
        out
    }

    pub fn prods(&self) -> Prods<'_> {
        Prods::new(&self.cats)
    }

    /// Typing, strict units and the two degree-3 coherence laws.
    pub fn validate(&self) -> Vec<String> {
        let p = self.prods();
        let mut bad = Vec::new();
        let sigs = self.signatures();
        for s in &sigs {
            let Some(f) = self.psi.get(s) else {
                bad.push(format!("missing functor for {}", s.name()));
                continue;
            };
            let src = p.get(&self.ins(s));
            if let Err(e) = check_functor(&src, &self.cats[self.out(s)], f) {
                bad.push(format!("Ψ {}: {}", s.name(), e));
            } else if s.is_unit() && *f != Functor::identity(&self.cats[self.out(s)]) {
                bad.push(format!("unary Ψ {} is not the identity", s.name()));
            }
        }
        let known: std::collections::BTreeSet<&LSig> = sigs.iter().collect();
        for s in self.psi.keys() {
            if !known.contains(s) {
                bad.push(format!("populated signature {} is not admissible", s.name()));
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        let comps = self.composites();
        for (s, i, r) in &comps {
            let t = s.compose(*i, r).unwrap();
            let key = (s.clone(), *i, r.clone());
            let Some(phi) = self.phi.get(&key) else {
                bad.push(format!("missing φ for {} ∘_{} {}", s.name(), i, r.name()));
                continue;
            };
            let target = p.comp_i(&self.ins(s), &self.psi[s], *i, &self.ins(r), &self.psi[r]);
            let d = &self.cats[self.out(s)];
            if let Err(e) = check_nat_iso(&p.get(&self.ins(&t)), d, &self.psi[&t], &target, phi) {
                bad.push(format!("φ {} ∘_{} {}: {}", s.name(), i, r.name(), e));
            } else if (s.is_unit() || r.is_unit()) && *phi != identity_nat(d, &self.psi[&t]) {
                bad.push(format!("φ {} ∘_{} {} involves a unit but is not the identity", s.name(), i, r.name()));
            }
        }
        if self.phi.len() != comps.len() {
            bad.push(format!("{} associator entries for {} composites", self.phi.len(), comps.len()));
        }
        if !bad.is_empty() {
            return bad;
        }
        bad.extend(self.coherence(&p, &comps));
        bad
    }

    fn coherence(&self, p: &Prods, comps: &[PhiKey]) -> Vec<String> {
        let mut bad = Vec::new();
        let mut into: HashMap<(usize, usize, usize), Vec<&LSig>> = HashMap::new();
        for s in self.psi.keys() {
            into.entry((s.chain[0], s.chain[s.chain.len() - 1], s.out)).or_default().push(s);
        }
        let slot = |s: &LSig, j: usize| (s.chain[j], s.chain[j + 1], s.ins[j]);
        for (s, i, r) in comps {
            let sr = s.compose(*i, r).unwrap();
            let d = &self.cats[self.out(s)];
            let phi_sr = &self.phi[&(s.clone(), *i, r.clone())];
            // σ ∘_i (ρ ∘_j τ)
            for j in 0..r.arity() {
                for t in into.get(&slot(r, j)).into_iter().flatten() {
                    let rt = r.compose(j, t).unwrap();
                    let (Some(a1), Some(b1)) = (self.phi.get(&(sr.clone(), i + j, (*t).clone())), self.phi.get(&(s.clone(), *i, rt.clone()))) else {
                        continue;
                    };
                    let Some(b2) = self.phi.get(&(r.clone(), j, (*t).clone())) else { continue };
                    let a2 = p.wr(&self.ins(&sr), phi_sr, i + j, &self.ins(t), &self.psi[t]);
                    let b2 = p.wl(&self.ins(s), &self.psi[s], *i, &self.ins(&rt), b2);
                    if vcompose(d, &a2, a1) != vcompose(d, &b2, b1) {
                        bad.push(format!("sequential coherence fails for {} ∘_{} {} ∘_{} {}", s.name(), i, r.name(), j, t.name()));
                    }
                }
            }
            // σ ∘_{i,j} (ρ, τ) with i < j
            let m = r.arity();
            for j in i + 1..s.arity() {
                for t in into.get(&slot(s, j)).into_iter().flatten() {
                    let st = s.compose(j, t).unwrap();
                    let (Some(a1), Some(b1), Some(phi_st)) = (
                        self.phi.get(&(sr.clone(), j + m - 1, (*t).clone())),
                        self.phi.get(&(st.clone(), *i, r.clone())),
                        self.phi.get(&(s.clone(), j, (*t).clone())),
                    ) else {
                        continue;
                    };
                    let a2 = p.wr(&self.ins(&sr), phi_sr, j + m - 1, &self.ins(t), &self.psi[t]);
                    let b2 = p.wr(&self.ins(&st), phi_st, *i, &self.ins(r), &self.psi[r]);
                    if vcompose(d, &a2, a1) != vcompose(d, &b2, b1) {
                        bad.push(format!("parallel coherence fails for {} ∘_({},{}) ({}, {})", s.name(), i, j, r.name(), t.name()));
                    }
                }
            }
        }
        bad
    }

    pub fn to_json(&self) -> Value {
        json!({
            "objects": self.n,
            "levels": self.levels,
            "arity": self.arity,
            "cats": self.cats.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "psi": self.psi.iter().map(|(s, f)| json!({"sig": s.to_json(), "obj": f.obj, "mor": f.mor})).collect::<Vec<_>>(),
            "phi": self.phi.iter().map(|((s, i, r), c)| json!({"sigma": s.to_json(), "i": i, "rho": r.to_json(), "components": c})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Cells, String> {
        let num = |k: &str| v.get(k).and_then(|x| x.as_u64()).map(|x| x as usize).ok_or(format!("cells.{} missing", k));
        let cats = v
            .get("cats")
            .and_then(|c| c.as_array())
            .ok_or("cells.cats missing")?
            .iter()
            .enumerate()
            .map(|(k, c)| FinCat::from_json(c).map_err(|e| format!("cells.cats[{}]: {}", k, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut psi = BTreeMap::new();
        for (k, e) in v.get("psi").and_then(|c| c.as_array()).ok_or("cells.psi missing")?.iter().enumerate() {
            let s = LSig::from_json(e.get("sig").unwrap_or(&Value::Null)).map_err(|x| format!("cells.psi[{}]: {}", k, x))?;
            let obj = serde_json::from_value(e["obj"].clone()).map_err(|x| format!("cells.psi[{}].obj: {}", k, x))?;
            let mor = serde_json::from_value(e["mor"].clone()).map_err(|x| format!("cells.psi[{}].mor: {}", k, x))?;
            psi.insert(s, Functor { obj, mor });
        }
        let mut phi = BTreeMap::new();
        for (k, e) in v.get("phi").and_then(|c| c.as_array()).ok_or("cells.phi missing")?.iter().enumerate() {
            let s = LSig::from_json(&e["sigma"]).map_err(|x| format!("cells.phi[{}]: {}", k, x))?;
            let r = LSig::from_json(&e["rho"]).map_err(|x| format!("cells.phi[{}]: {}", k, x))?;
            let i = e["i"].as_u64().ok_or(format!("cells.phi[{}].i missing", k))? as usize;
            let c = serde_json::from_value(e["components"].clone()).map_err(|x| format!("cells.phi[{}]: {}", k, x))?;
            phi.insert((s, i, r), c);
        }
        let cells = Cells { n: num("objects")?, levels: num("levels")?, arity: num("arity")?, cats, psi, phi };
        if cells.cats.len() != cells.n * cells.n * cells.levels {
            return Err("cells.cats: wrong number of categories".into());
        }
        Ok(cells)
    }
}

// ---------------------------------------------------------------------------
// small evaluation helpers

fn comps_at(p: &Prods, key: &[usize], c: &[usize], xs: &[usize]) -> usize {
    c[p.get(key).obj_of(xs)]
}

fn fun_obj(p: &Prods, key: &[usize], f: &Functor, xs: &[usize]) -> usize {
    f.obj[p.get(key).obj_of(xs)]
}

fn fun_mor(p: &Prods, key: &[usize], f: &Functor, us: &[usize]) -> usize {
    f.mor[p.get(key).mor_of(us)]
}

/// F(id, …, u, …, id) with u in slot i and identities on the objects xs.
fn fun_slot(p: &Prods, key: &[usize], f: &Functor, xs: &[usize], i: usize, u: usize) -> usize {
    let us: Vec<usize> = xs.iter().zip(key).enumerate().map(|(j, (&x, &c))| if j == i { u } else { p.cat(c).id(x) }).collect();
    fun_mor(p, key, f, &us)
}

fn product_functor(pa: &FinCat, pb: &FinCat, funs: &[&Functor]) -> Functor {
    let obj = (0..pa.num_objects())
        .map(|o| pb.obj_of(&pa.obj_tuple(o).iter().zip(funs).map(|(&x, f)| f.obj[x]).collect::<Vec<_>>()))
        .collect();
    let mor = (0..pa.num_morphisms())
        .map(|m| pb.mor_of(&pa.mor_tuple(m).iter().zip(funs).map(|(&x, f)| f.mor[x]).collect::<Vec<_>>()))
        .collect();
    Functor { obj, mor }
}

/// Every tuple of indices below the given bounds, first index fastest.
fn tuples(bounds: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = bounds.iter().product();
    (0..total)
        .map(|mut c| {
            bounds
                .iter()
                .map(|&b| {
                    let r = c % b;
                    c /= b;
                    r
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// classical bicategories

#[derive(Clone, Debug, PartialEq)]
pub struct Classical {
    pub name: String,
    pub objects: Vec<String>,
    /// Hom(a, b) at a·n + b.
    pub homs: Vec<FinCat>,
    /// ψ: Hom(a, b) × Hom(b, c) → Hom(a, c).
    pub comp: BTreeMap<(usize, usize, usize), Functor>,
    /// Id_a as an object of Hom(a, a).
    pub unit: Vec<usize>,
    /// α over Hom(a, b) × Hom(b, c) × Hom(c, d).
    pub assoc: BTreeMap<(usize, usize, usize, usize), Components>,
    /// λ over Hom(a, b) at a·n + b.
    pub lunit: Vec<Components>,
    /// ρ over Hom(a, b) at a·n + b.
    pub runit: Vec<Components>,
}

struct Ops<'a> {
    b: &'a Classical,
    p: Prods<'a>,
}

#[derive(Clone, Debug, PartialEq)]
enum Ex {
    Leaf(usize),
    Unit(usize),
    Comp(Box<Ex>, Box<Ex>),
}

fn comb(items: Vec<Ex>, a: usize) -> Ex {
    let mut it = items.into_iter();
    match it.next() {
        None => Ex::Unit(a),
        Some(first) => it.fold(first, |acc, x| Ex::Comp(Box::new(acc), Box::new(x))),
    }
}

impl<'a> Ops<'a> {
    fn new(b: &'a Classical) -> Ops<'a> {
        Ops { b, p: Prods::new(&b.homs) }
    }
    fn h(&self, a: usize, b: usize) -> usize {
        a * self.b.objects.len() + b
    }
    fn hom(&self, a: usize, b: usize) -> &FinCat {
        &self.b.homs[self.h(a, b)]
    }
    fn po(&self, a: usize, b: usize, c: usize, x: usize, y: usize) -> usize {
        fun_obj(&self.p, &[self.h(a, b), self.h(b, c)], &self.b.comp[&(a, b, c)], &[x, y])
    }
    fn pm(&self, a: usize, b: usize, c: usize, u: usize, v: usize) -> usize {
        fun_mor(&self.p, &[self.h(a, b), self.h(b, c)], &self.b.comp[&(a, b, c)], &[u, v])
    }
    #[allow(clippy::too_many_arguments)]
    fn al(&self, a: usize, b: usize, c: usize, d: usize, f: usize, g: usize, h: usize) -> usize {
        comps_at(&self.p, &[self.h(a, b), self.h(b, c), self.h(c, d)], &self.b.assoc[&(a, b, c, d)], &[f, g, h])
    }

    fn ends(&self, e: &Ex, chain: &[usize]) -> (usize, usize) {
        match e {
            Ex::Leaf(j) => (chain[*j], chain[j + 1]),
            Ex::Unit(a) => (*a, *a),
            Ex::Comp(l, r) => (self.ends(l, chain).0, self.ends(r, chain).1),
        }
    }

    fn val(&self, e: &Ex, chain: &[usize], xs: &[usize]) -> usize {
        match e {
            Ex::Leaf(j) => xs[*j],
            Ex::Unit(a) => self.b.unit[*a],
            Ex::Comp(l, r) => {
                let (a, b) = self.ends(l, chain);
                let c = self.ends(r, chain).1;
                self.po(a, b, c, self.val(l, chain, xs), self.val(r, chain, xs))
            }
        }
    }

    /// ψ(n1, n2) → normal form, for normal n1, n2.
    fn join(&self, n1: &Ex, n2: &Ex, chain: &[usize], xs: &[usize]) -> (usize, Ex) {
        let (a, b) = self.ends(n1, chain);
        match (n1, n2) {
            (_, Ex::Unit(_)) => (self.b.lunit[self.h(a, b)][self.val(n1, chain, xs)], n1.clone()),
            (Ex::Unit(_), _) => {
                let (_, c) = self.ends(n2, chain);
                (self.b.runit[self.h(a, c)][self.val(n2, chain, xs)], n2.clone())
            }
            (_, Ex::Leaf(_)) => {
                let c = self.ends(n2, chain).1;
                let v = self.po(a, b, c, self.val(n1, chain, xs), self.val(n2, chain, xs));
                (self.hom(a, c).id(v), Ex::Comp(Box::new(n1.clone()), Box::new(n2.clone())))
            }
            (_, Ex::Comp(m, g)) => {
                let c = self.ends(m, chain).1;
                let d = self.ends(g, chain).1;
                let (v1, vm, vg) = (self.val(n1, chain, xs), self.val(m, chain, xs), self.val(g, chain, xs));
                let alpha = self.al(a, b, c, d, v1, vm, vg);
                let (j, nf) = self.join(n1, m, chain, xs);
                let step = self.pm(a, c, d, j, self.hom(c, d).id(vg));
                (self.hom(a, d).c(step, alpha), Ex::Comp(Box::new(nf), g.clone()))
            }
        }
    }

    /// The canonical arrow from an expression to its normal form.
    fn can(&self, e: &Ex, chain: &[usize], xs: &[usize]) -> (usize, Ex) {
        match e {
            Ex::Leaf(_) | Ex::Unit(_) => {
                let (a, b) = self.ends(e, chain);
                (self.hom(a, b).id(self.val(e, chain, xs)), e.clone())
            }
            Ex::Comp(l, r) => {
                let (a, b) = self.ends(l, chain);
                let c = self.ends(r, chain).1;
                let (cl, nl) = self.can(l, chain, xs);
                let (cr, nr) = self.can(r, chain, xs);
                let u = self.pm(a, b, c, cl, cr);
                let (j, nf) = self.join(&nl, &nr, chain, xs);
                (self.hom(a, c).c(j, u), nf)
            }
        }
    }
}

impl Classical {
    pub fn n(&self) -> usize {
        self.objects.len()
    }

    /// Empty iff the data is well typed and satisfies pentagon and triangle.
    pub fn validate(&self) -> Vec<String> {
        let n = self.n();
        let mut bad = Vec::new();
        if self.homs.len() != n * n || self.unit.len() != n || self.lunit.len() != n * n || self.runit.len() != n * n {
            return vec!["sizes of homs, units or unitors do not match the objects".into()];
        }
        for (k, h) in self.homs.iter().enumerate() {
            for v in h.validate() {
                bad.push(format!("Hom({}, {}): {}", self.objects[k / n], self.objects[k % n], v));
            }
        }
        for a in 0..n {
            if self.unit[a] >= self.homs[a * n + a].num_objects() {
                bad.push(format!("unit of {} is not an object", self.objects[a]));
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        let o = Ops::new(self);
        let h = |a, b| a * n + b;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    match self.comp.get(&(a, b, c)) {
                        None => bad.push(format!("missing composition ({}, {}, {})", a, b, c)),
                        Some(f) => {
                            if let Err(e) = check_functor(&o.p.get(&[h(a, b), h(b, c)]), &self.homs[h(a, c)], f) {
                                bad.push(format!("composition ({}, {}, {}): {}", a, b, c, e));
                            }
                        }
                    }
                }
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        for (a, b, c, d) in tuples(&[n, n, n, n]).into_iter().map(|t| (t[0], t[1], t[2], t[3])) {
            let key = [h(a, b), h(b, c), h(c, d)];
            let lhs = o.p.comp_i(&[h(a, b), h(b, d)], &self.comp[&(a, b, d)], 1, &[h(b, c), h(c, d)], &self.comp[&(b, c, d)]);
            let rhs = o.p.comp_i(&[h(a, c), h(c, d)], &self.comp[&(a, c, d)], 0, &[h(a, b), h(b, c)], &self.comp[&(a, b, c)]);
            match self.assoc.get(&(a, b, c, d)) {
                None => bad.push(format!("missing associator ({}, {}, {}, {})", a, b, c, d)),
                Some(al) => {
                    if let Err(e) = check_nat_iso(&o.p.get(&key), &self.homs[h(a, d)], &lhs, &rhs, al) {
                        bad.push(format!("associator ({}, {}, {}, {}): {}", a, b, c, d, e));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let hab = &self.homs[h(a, b)];
                let with_unit = |left: bool| {
                    let (key, ub) = if left { ([h(a, b), h(b, b)], self.unit[b]) } else { ([h(a, a), h(a, b)], self.unit[a]) };
                    let cf = &self.comp[&if left { (a, b, b) } else { (a, a, b) }];
                    let uc = &self.homs[if left { h(b, b) } else { h(a, a) }];
                    let obj = (0..hab.num_objects())
                        .map(|x| fun_obj(&o.p, &key, cf, &if left { [x, ub] } else { [ub, x] }))
                        .collect();
                    let mor = (0..hab.num_morphisms())
                        .map(|u| fun_mor(&o.p, &key, cf, &if left { [u, uc.id(ub)] } else { [uc.id(ub), u] }))
                        .collect();
                    Functor { obj, mor }
                };
                let id = Functor::identity(hab);
                if let Err(e) = check_nat_iso(hab, hab, &with_unit(true), &id, &self.lunit[h(a, b)]) {
                    bad.push(format!("left unitor on Hom({}, {}): {}", self.objects[a], self.objects[b], e));
                }
                if let Err(e) = check_nat_iso(hab, hab, &with_unit(false), &id, &self.runit[h(a, b)]) {
                    bad.push(format!("right unitor on Hom({}, {}): {}", self.objects[a], self.objects[b], e));
                }
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        let name = |a: usize, b: usize, x: usize| self.homs[h(a, b)].objects[x].clone();
        for t in tuples(&[n, n, n, n, n]) {
            let (a, b, c, d, e) = (t[0], t[1], t[2], t[3], t[4]);
            let bounds = [h(a, b), h(b, c), h(c, d), h(d, e)].map(|k| self.homs[k].num_objects());
            for x in tuples(&bounds) {
                let (f, g, hh, k) = (x[0], x[1], x[2], x[3]);
                let hae = o.hom(a, e);
                let l1 = o.al(a, b, c, e, f, g, o.po(c, d, e, hh, k));
                let l2 = o.al(a, c, d, e, o.po(a, b, c, f, g), hh, k);
                let r1 = o.pm(a, b, e, o.hom(a, b).id(f), o.al(b, c, d, e, g, hh, k));
                let r2 = o.al(a, b, d, e, f, o.po(b, c, d, g, hh), k);
                let r3 = o.pm(a, d, e, o.al(a, b, c, d, f, g, hh), o.hom(d, e).id(k));
                if hae.c(l2, l1) != hae.c(r3, hae.c(r2, r1)) {
                    bad.push(format!("pentagon fails at ({}, {}, {}, {})", name(a, b, f), name(b, c, g), name(c, d, hh), name(d, e, k)));
                }
            }
        }
        for (a, b, c) in tuples(&[n, n, n]).into_iter().map(|t| (t[0], t[1], t[2])) {
            for x in tuples(&[self.homs[h(a, b)].num_objects(), self.homs[h(b, c)].num_objects()]) {
                let (f, g) = (x[0], x[1]);
                let ub = self.unit[b];
                let lhs = o.hom(a, c).c(
                    o.pm(a, b, c, self.lunit[h(a, b)][f], o.hom(b, c).id(g)),
                    o.al(a, b, b, c, f, ub, g),
                );
                let rhs = o.pm(a, b, c, o.hom(a, b).id(f), self.runit[h(b, c)][g]);
                if lhs != rhs {
                    bad.push(format!("triangle fails at ({}, {})", name(a, b, f), name(b, c, g)));
                }
            }
        }
        bad
    }
}

fn parse<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> Result<T, String> {
    serde_json::from_value(v.clone()).map_err(|e| format!("{}: {}", what, e))
}

impl Classical {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "objects": self.objects,
            "homs": self.homs.iter().map(|h| h.to_json()).collect::<Vec<_>>(),
            "comp": self.comp.iter().map(|(k, f)| json!({"objects": [k.0, k.1, k.2], "obj": f.obj, "mor": f.mor})).collect::<Vec<_>>(),
            "unit": self.unit,
            "assoc": self.assoc.iter().map(|(k, c)| json!({"objects": [k.0, k.1, k.2, k.3], "components": c})).collect::<Vec<_>>(),
            "lunit": self.lunit,
            "runit": self.runit,
        })
    }

    pub fn from_json(v: &Value) -> Result<Classical, String> {
        let homs = v["homs"]
            .as_array()
            .ok_or("missing `homs`")?
            .iter()
            .enumerate()
            .map(|(k, h)| FinCat::from_json(h).map_err(|e| format!("homs[{}]: {}", k, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut comp = BTreeMap::new();
        for (k, e) in v["comp"].as_array().ok_or("missing `comp`")?.iter().enumerate() {
            let o: [usize; 3] = parse(&e["objects"], &format!("comp[{}].objects", k))?;
            comp.insert((o[0], o[1], o[2]), Functor { obj: parse(&e["obj"], &format!("comp[{}].obj", k))?, mor: parse(&e["mor"], &format!("comp[{}].mor", k))? });
        }
        let mut assoc = BTreeMap::new();
        for (k, e) in v["assoc"].as_array().ok_or("missing `assoc`")?.iter().enumerate() {
            let o: [usize; 4] = parse(&e["objects"], &format!("assoc[{}].objects", k))?;
            assoc.insert((o[0], o[1], o[2], o[3]), parse(&e["components"], &format!("assoc[{}].components", k))?);
        }
        Ok(Classical {
            name: v["name"].as_str().unwrap_or("").to_string(),
            objects: parse(&v["objects"], "objects")?,
            homs,
            comp,
            unit: parse(&v["unit"], "unit")?,
            assoc,
            lunit: parse(&v["lunit"], "lunit")?,
            runit: parse(&v["runit"], "runit")?,
        })
    }
}

/// Unbiased form: Ψ is the left-bracketed composite, Ψ of a nullary chain
/// is the unit, and φ is the canonical coherence arrow.
pub fn classical_to_unbiased(b: &Classical, arity: usize) -> Cells {
    let n = b.n();
    let o = Ops::new(b);
    let mut cells = Cells { n, levels: 1, arity, cats: b.homs.clone(), psi: BTreeMap::new(), phi: BTreeMap::new() };
    for s in cells.signatures() {
        let key = cells.ins(&s);
        let pr = o.p.get(&key);
        let ch = &s.chain;
        let fold_obj = |xs: &[usize]| o.val(&comb((0..xs.len()).map(Ex::Leaf).collect(), ch[0]), ch, xs);
        let obj = (0..pr.num_objects()).map(|x| fold_obj(&pr.obj_tuple(x))).collect();
        let mor = (0..pr.num_morphisms())
            .map(|m| {
                let us = pr.mor_tuple(m);
                match us.len() {
                    0 => o.hom(ch[0], ch[0]).id(b.unit[ch[0]]),
                    _ => (1..us.len()).fold(us[0], |acc, j| o.pm(ch[0], ch[j], ch[j + 1], acc, us[j])),
                }
            })
            .collect();
        cells.psi.insert(s, Functor { obj, mor });
    }
    for (s, i, r) in cells.composites() {
        let t = s.compose(i, &r).unwrap();
        let m = r.arity();
        let pr = o.p.get(&cells.ins(&t));
        let (a, z) = (t.chain[0], t.chain[t.chain.len() - 1]);
        let e1 = comb((0..t.arity()).map(Ex::Leaf).collect(), a);
        let slots: Vec<Ex> = (0..s.arity())
            .map(|j| match j.cmp(&i) {
                std::cmp::Ordering::Less => Ex::Leaf(j),
                std::cmp::Ordering::Equal => comb((i..i + m).map(Ex::Leaf).collect(), s.chain[i]),
                std::cmp::Ordering::Greater => Ex::Leaf(j + m - 1),
            })
            .collect();
        let e2 = comb(slots, a);
        let hom = o.hom(a, z);
        let comps = (0..pr.num_objects())
            .map(|x| {
                let xs = pr.obj_tuple(x);
                let (c1, n1) = o.can(&e1, &t.chain, &xs);
                let (c2, n2) = o.can(&e2, &t.chain, &xs);
                debug_assert_eq!(o.val(&n1, &t.chain, &xs), o.val(&n2, &t.chain, &xs));
                hom.c(hom.inverse(c2).expect("coherence arrows are invertible"), c1)
            })
            .collect();
        cells.phi.insert((s, i, r), comps);
    }
    cells
}

// ---------------------------------------------------------------------------
// homomorphisms of unbiased bicategories

/// f on 0-cells, F on hom categories, and θ_τ: Ψ^B_{fτ} ∘ F^τ ⇒ F ∘ Ψ^A_τ
/// for every chain τ (the identity on unary chains).
#[derive(Clone, Debug, PartialEq)]
pub struct Hom {
    pub f: Vec<usize>,
    /// F on Hom(a, b) at a·n + b.
    pub fun: Vec<Functor>,
    pub theta: BTreeMap<Vec<usize>, Components>,
}

impl Hom {
    pub fn to_json(&self) -> Value {
        json!({
            "f": self.f,
            "fun": self.fun.iter().map(|f| json!({"obj": f.obj, "mor": f.mor})).collect::<Vec<_>>(),
            "theta": self.theta.iter().map(|(c, t)| json!({"chain": c, "components": t})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Hom, String> {
        let fun = v["fun"]
            .as_array()
            .ok_or("missing `fun`")?
            .iter()
            .enumerate()
            .map(|(k, e)| Ok(Functor { obj: parse(&e["obj"], &format!("fun[{}].obj", k))?, mor: parse(&e["mor"], &format!("fun[{}].mor", k))? }))
            .collect::<Result<Vec<_>, String>>()?;
        let mut theta = BTreeMap::new();
        for (k, e) in v["theta"].as_array().ok_or("missing `theta`")?.iter().enumerate() {
            theta.insert(parse(&e["chain"], &format!("theta[{}].chain", k))?, parse(&e["components"], &format!("theta[{}].components", k))?);
        }
        Ok(Hom { f: parse(&v["f"], "f")?, fun, theta })
    }
}

struct HomCtx<'a> {
    a: &'a Cells,
    b: &'a Cells,
    pa: Prods<'a>,
    pb: Prods<'a>,
}

impl<'a> HomCtx<'a> {
    fn new(a: &'a Cells, b: &'a Cells) -> HomCtx<'a> {
        HomCtx { a, b, pa: a.prods(), pb: b.prods() }
    }

    fn fchain(f: &[usize], c: &[usize]) -> Vec<usize> {
        c.iter().map(|&x| f[x]).collect()
    }

    fn fx(&self, h: &Hom, chain: &[usize], xs: &[usize]) -> Vec<usize> {
        xs.iter().enumerate().map(|(j, &x)| h.fun[chain[j] * self.a.n + chain[j + 1]].obj[x]).collect()
    }

    /// θ_σ @ (…Ψ^A_ρ…) ∘ Ψ^B_{fσ}(…θ_ρ…) ∘ φ^B at F(x).
    fn rhs(&self, h: &Hom, s: &LSig, i: usize, r: &LSig, theta_s: &[usize], theta_r: &[usize], xs: &[usize]) -> usize {
        let t = s.compose(i, r).unwrap();
        let m = r.arity();
        let fx = self.fx(h, &t.chain, xs);
        let (fs, fr) = (LSig::pure(&Self::fchain(&h.f, &s.chain), 0), LSig::pure(&Self::fchain(&h.f, &r.chain), 0));
        let ft = fs.compose(i, &fr).unwrap();
        let b1 = comps_at(&self.pb, &self.b.ins(&ft), &self.b.phi[&(fs.clone(), i, fr.clone())], &fx);
        let mut mid = fx[..i].to_vec();
        mid.push(fun_obj(&self.pb, &self.b.ins(&fr), &self.b.psi[&fr], &fx[i..i + m]));
        mid.extend_from_slice(&fx[i + m..]);
        let tr = comps_at(&self.pa, &self.a.ins(r), theta_r, &xs[i..i + m]);
        let b2 = fun_slot(&self.pb, &self.b.ins(&fs), &self.b.psi[&fs], &mid, i, tr);
        let mut ys = xs[..i].to_vec();
        ys.push(fun_obj(&self.pa, &self.a.ins(r), &self.a.psi[r], &xs[i..i + m]));
        ys.extend_from_slice(&xs[i + m..]);
        let b3 = comps_at(&self.pa, &self.a.ins(s), theta_s, &ys);
        let d = &self.b.cats[self.b.out(&ft)];
        d.c(b3, d.c(b2, b1))
    }

    fn phi_a(&self, h: &Hom, s: &LSig, i: usize, r: &LSig, xs: &[usize]) -> usize {
        let t = s.compose(i, r).unwrap();
        let (a0, z) = (t.chain[0], t.chain[t.chain.len() - 1]);
        h.fun[a0 * self.a.n + z].mor[comps_at(&self.pa, &self.a.ins(&t), &self.a.phi[&(s.clone(), i, r.clone())], xs)]
    }
}

fn check_cells_pair(a: &Cells, b: &Cells) -> Result<(), String> {
    if a.levels != 1 || b.levels != 1 {
        return Err("homomorphisms need cells with one level".into());
    }
    if a.arity != b.arity {
        return Err("source and target are truncated at different arities".into());
    }
    Ok(())
}

/// Empty iff h is a homomorphism A → B.
pub fn validate_hom(a: &Cells, b: &Cells, h: &Hom) -> Vec<String> {
    if let Err(e) = check_cells_pair(a, b) {
        return vec![e];
    }
    let mut bad = Vec::new();
    if h.f.len() != a.n || h.f.iter().any(|&x| x >= b.n) || h.fun.len() != a.n * a.n {
        return vec!["object map or functor list has the wrong size".into()];
    }
    for x in 0..a.n {
        for y in 0..a.n {
            if let Err(e) = check_functor(&a.cats[x * a.n + y], &b.cats[h.f[x] * b.n + h.f[y]], &h.fun[x * a.n + y]) {
                bad.push(format!("F on Hom({}, {}): {}", x, y, e));
            }
        }
    }
    if !bad.is_empty() {
        return bad;
    }
    let c = HomCtx::new(a, b);
    for ch in crate::operads::chains(a.n, a.arity) {
        let s = LSig::pure(&ch, 0);
        let Some(th) = h.theta.get(&ch) else {
            bad.push(format!("missing θ for {}", s.name()));
            continue;
        };
        let fs = LSig::pure(&HomCtx::fchain(&h.f, &ch), 0);
        let (ka, kb) = (a.ins(&s), b.ins(&fs));
        let (pa, pb) = (c.pa.get(&ka), c.pb.get(&kb));
        let funs: Vec<&Functor> = (0..s.arity()).map(|j| &h.fun[ch[j] * a.n + ch[j + 1]]).collect();
        let lhs = b.psi[&fs].after(&product_functor(&pa, &pb, &funs));
        let rhs = h.fun[ch[0] * a.n + ch[ch.len() - 1]].after(&a.psi[&s]);
        let d = &b.cats[b.out(&fs)];
        if let Err(e) = check_nat_iso(&pa, d, &lhs, &rhs, th) {
            bad.push(format!("θ {}: {}", s.name(), e));
        } else if s.arity() == 1 && *th != identity_nat(d, &lhs) {
            bad.push(format!("θ {} is not the identity", s.name()));
        }
    }
    if !bad.is_empty() {
        return bad;
    }
    for (s, i, r) in a.composites() {
        let t = s.compose(i, &r).unwrap();
        let pt = c.pa.get(&a.ins(&t));
        let d = &b.cats[b.out(&LSig::pure(&HomCtx::fchain(&h.f, &t.chain), 0))];
        for x in 0..pt.num_objects() {
            let xs = pt.obj_tuple(x);
            let lhs = d.c(c.phi_a(h, &s, i, &r, &xs), h.theta[&t.chain][x]);
            let rhs = c.rhs(h, &s, i, &r, &h.theta[&s.chain], &h.theta[&r.chain], &xs);
            if lhs != rhs {
                bad.push(format!("homomorphism axiom fails for {} ∘_{} {}", s.name(), i, r.name()));
                break;
            }
        }
    }
    bad
}

/// Fill θ on chains of arity ≥ 3 from the axiom at σ = (a₀, a_{k−1}, a_k),
/// i = 0, ρ = (a₀ … a_{k−1}). Arities 0, 1 and 2 must be present.
pub fn extend_hom(a: &Cells, b: &Cells, h: &mut Hom) {
    let c = HomCtx::new(a, b);
    let mut chs = crate::operads::chains(a.n, a.arity);
    chs.sort_by_key(|ch| ch.len());
    for ch in chs.into_iter().filter(|ch| ch.len() >= 4) {
        let k = ch.len() - 1;
        let s = LSig::pure(&[ch[0], ch[k - 1], ch[k]], 0);
        let r = LSig::pure(&ch[..k], 0);
        let t = LSig::pure(&ch, 0);
        let pt = c.pa.get(&a.ins(&t));
        let d = &b.cats[b.out(&LSig::pure(&HomCtx::fchain(&h.f, &ch), 0))];
        let comps = (0..pt.num_objects())
            .map(|x| {
                let xs = pt.obj_tuple(x);
                let rhs = c.rhs(h, &s, 0, &r, &h.theta[&s.chain], &h.theta[&r.chain], &xs);
                d.c(d.inverse(c.phi_a(h, &s, 0, &r, &xs)).expect("φ is invertible"), rhs)
            })
            .collect();
        h.theta.insert(ch, comps);
    }
}

/// Every homomorphism A → B.
pub fn enumerate_homs(a: &Cells, b: &Cells) -> Vec<Hom> {
    if check_cells_pair(a, b).is_err() {
        return Vec::new();
    }
    let n = a.n;
    let c = HomCtx::new(a, b);
    let mut out = Vec::new();
    for f in tuples(&vec![b.n; n]) {
        let fun_choices: Vec<Vec<Functor>> = (0..n * n)
            .map(|k| enumerate_functors(&a.cats[k], &b.cats[f[k / n] * b.n + f[k % n]]))
            .collect();
        for fsel in tuples(&fun_choices.iter().map(|v| v.len()).collect::<Vec<_>>()) {
            let fun: Vec<Functor> = fsel.iter().enumerate().map(|(k, &j)| fun_choices[k][j].clone()).collect();
            let low: Vec<Vec<usize>> = crate::operads::chains(n, 2.min(a.arity)).into_iter().filter(|ch| ch.len() != 2).collect();
            let h0 = Hom { f: f.clone(), fun: fun.clone(), theta: BTreeMap::new() };
            let options: Vec<Vec<Components>> = low
                .iter()
                .map(|ch| {
                    let s = LSig::pure(ch, 0);
                    let fs = LSig::pure(&HomCtx::fchain(&f, ch), 0);
                    let (pa, pb) = (c.pa.get(&a.ins(&s)), c.pb.get(&b.ins(&fs)));
                    let funs: Vec<&Functor> = (0..s.arity()).map(|j| &fun[ch[j] * n + ch[j + 1]]).collect();
                    let lhs = b.psi[&fs].after(&product_functor(&pa, &pb, &funs));
                    let rhs = fun[ch[0] * n + ch[ch.len() - 1]].after(&a.psi[&s]);
                    enumerate_nat_isos(&pa, &b.cats[b.out(&fs)], &lhs, &rhs)
                })
                .collect();
            for sel in tuples(&options.iter().map(|v| v.len()).collect::<Vec<_>>()) {
                let mut h = h0.clone();
                for (k, ch) in low.iter().enumerate() {
                    h.theta.insert(ch.clone(), options[k][sel[k]].clone());
                }
                for x in 0..n {
                    for y in 0..n {
                        let d = &b.cats[f[x] * b.n + f[y]];
                        h.theta.insert(vec![x, y], identity_nat(d, &fun[x * n + y]));
                    }
                }
                extend_hom(a, b, &mut h);
                if validate_hom(a, b, &h).is_empty() {
                    out.push(h);
                }
            }
        }
    }
    out
}

pub fn identity_hom(a: &Cells) -> Hom {
    let fun: Vec<Functor> = a.cats.iter().map(Functor::identity).collect();
    let theta = crate::operads::chains(a.n, a.arity)
        .into_iter()
        .map(|ch| {
            let s = LSig::pure(&ch, 0);
            let c = identity_nat(&a.cats[a.out(&s)], &a.psi[&s]);
            (ch, c)
        })
        .collect();
    Hom { f: (0..a.n).collect(), fun, theta }
}

/// h2 ∘ h1.
pub fn compose_homs(a: &Cells, b: &Cells, c: &Cells, h1: &Hom, h2: &Hom) -> Hom {
    let n = a.n;
    let f: Vec<usize> = h1.f.iter().map(|&x| h2.f[x]).collect();
    let fun = (0..n * n).map(|k| h2.fun[h1.f[k / n] * b.n + h1.f[k % n]].after(&h1.fun[k])).collect();
    let (pa, pb) = (a.prods(), b.prods());
    let theta = h1
        .theta
        .iter()
        .map(|(ch, th1)| {
            let s = LSig::pure(ch, 0);
            let pt = pa.get(&a.ins(&s));
            let f1 = HomCtx::fchain(&h1.f, ch);
            let ka = b.ins(&LSig::pure(&f1, 0));
            let f2 = &h2.fun[f1[0] * b.n + f1[f1.len() - 1]];
            let d = &c.cats[c.out(&LSig::pure(&HomCtx::fchain(&h2.f, &f1), 0))];
            let comps = (0..pt.num_objects())
                .map(|x| {
                    let xs = pt.obj_tuple(x);
                    let fx: Vec<usize> = xs.iter().enumerate().map(|(j, &o)| h1.fun[ch[j] * n + ch[j + 1]].obj[o]).collect();
                    let t2 = comps_at(&pb, &ka, &h2.theta[&f1], &fx);
                    d.c(f2.mor[th1[x]], t2)
                })
                .collect();
            (ch.clone(), comps)
        })
        .collect();
    Hom { f, fun, theta }
}

// ---------------------------------------------------------------------------
// dendrices of shape C₁: unbiased data on two levels

/// Level 1 carries the source, level 0 the target pulled back along f.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeDendrex {
    pub f: Vec<usize>,
    pub source: Cells,
    pub target: Cells,
    pub mixed: Cells,
}

fn unary(a: usize, b: usize) -> LSig {
    LSig { chain: vec![a, b], ins: vec![1], out: 0 }
}

fn is_mixed(s: &LSig) -> bool {
    s.out == 0 && s.ins.contains(&1)
}

fn edge_cats(a: &Cells, b: &Cells, f: &[usize]) -> Vec<FinCat> {
    let n = a.n;
    let mut cats = Vec::with_capacity(2 * n * n);
    for x in 0..n {
        for y in 0..n {
            cats.push(b.cats[f[x] * b.n + f[y]].clone());
            cats.push(a.cats[x * n + y].clone());
        }
    }
    cats
}

impl EdgeDendrex {
    pub fn validate(&self) -> Vec<String> {
        let (a, b, m) = (&self.source, &self.target, &self.mixed);
        if let Err(e) = check_cells_pair(a, b) {
            return vec![e];
        }
        if self.f.len() != a.n || self.f.iter().any(|&x| x >= b.n) {
            return vec!["object map has the wrong size".into()];
        }
        if m.n != a.n || m.levels != 2 || m.arity != a.arity {
            return vec!["mixed cells have the wrong shape".into()];
        }
        if m.cats != edge_cats(a, b, &self.f) {
            return vec!["mixed categories do not match source and target".into()];
        }
        let mut bad = m.validate();
        if !bad.is_empty() {
            return bad;
        }
        let down = |s: &LSig| -> (LSig, &Cells) {
            if s.out == 1 {
                (LSig::pure(&s.chain, 0), a)
            } else {
                (LSig::pure(&HomCtx::fchain(&self.f, &s.chain), 0), b)
            }
        };
        for (s, f) in &m.psi {
            if s.is_pure() {
                let (t, c) = down(s);
                if c.psi[&t] != *f {
                    bad.push(format!("boundary functor differs at {}", s.name()));
                }
            }
        }
        for ((s, i, r), c) in &m.phi {
            if s.is_pure() && r.is_pure() && s.out == r.out {
                let ((t1, cells), (t2, _)) = (down(s), down(r));
                if cells.phi[&(t1, *i, t2)] != *c {
                    bad.push(format!("boundary associator differs at {} ∘_{} {}", s.name(), i, r.name()));
                }
            }
        }
        bad
    }

    pub fn to_json(&self) -> Value {
        json!({"f": self.f, "source": self.source.to_json(), "target": self.target.to_json(), "mixed": self.mixed.to_json()})
    }

    pub fn from_json(v: &Value) -> Result<EdgeDendrex, String> {
        Ok(EdgeDendrex {
            f: serde_json::from_value(v["f"].clone()).map_err(|e| format!("f: {}", e))?,
            source: Cells::from_json(&v["source"]).map_err(|e| format!("source: {}", e))?,
            target: Cells::from_json(&v["target"]).map_err(|e| format!("target: {}", e))?,
            mixed: Cells::from_json(&v["mixed"]).map_err(|e| format!("mixed: {}", e))?,
        })
    }
}

/// The dendrex of shape C₁ of a homomorphism.
pub fn phi_hom(a: &Cells, b: &Cells, h: &Hom) -> EdgeDendrex {
    let n = a.n;
    let mut m = Cells { n, levels: 2, arity: a.arity, cats: edge_cats(a, b, &h.f), psi: BTreeMap::new(), phi: BTreeMap::new() };
    let pm = Prods::new(&m.cats);
    let pb = b.prods();
    let g_obj = |s: &LSig, xs: &[usize]| -> Vec<usize> {
        xs.iter().enumerate().map(|(j, &x)| if s.ins[j] == 1 { h.fun[s.chain[j] * n + s.chain[j + 1]].obj[x] } else { x }).collect()
    };
    for s in m.signatures() {
        if s.out == 1 {
            m.psi.insert(s.clone(), a.psi[&LSig::pure(&s.chain, 0)].clone());
            continue;
        }
        let fs = LSig::pure(&HomCtx::fchain(&h.f, &s.chain), 0);
        let pr = pm.get(&m.ins(&s));
        let kb = b.ins(&fs);
        let obj = (0..pr.num_objects()).map(|x| fun_obj(&pb, &kb, &b.psi[&fs], &g_obj(&s, &pr.obj_tuple(x)))).collect();
        let mor = (0..pr.num_morphisms())
            .map(|u| {
                let us: Vec<usize> = pr
                    .mor_tuple(u)
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| if s.ins[j] == 1 { h.fun[s.chain[j] * n + s.chain[j + 1]].mor[x] } else { x })
                    .collect();
                fun_mor(&pb, &kb, &b.psi[&fs], &us)
            })
            .collect();
        m.psi.insert(s, Functor { obj, mor });
    }
    let pa = a.prods();
    for (s, i, r) in m.composites() {
        let t = s.compose(i, &r).unwrap();
        let comps = if s.out == 1 {
            a.phi[&(LSig::pure(&s.chain, 0), i, LSig::pure(&r.chain, 0))].clone()
        } else {
            let (fs, fr) = (LSig::pure(&HomCtx::fchain(&h.f, &s.chain), 0), LSig::pure(&HomCtx::fchain(&h.f, &r.chain), 0));
            let ft = fs.compose(i, &fr).unwrap();
            let phib = &b.phi[&(fs.clone(), i, fr.clone())];
            let pr = pm.get(&m.ins(&t));
            let d = &b.cats[b.out(&fs)];
            let k = r.arity();
            (0..pr.num_objects())
                .map(|x| {
                    let xs = pr.obj_tuple(x);
                    let gx = g_obj(&t, &xs);
                    let b1 = comps_at(&pb, &b.ins(&ft), phib, &gx);
                    if r.out == 0 {
                        return b1;
                    }
                    let ra = LSig::pure(&r.chain, 0);
                    let tr = comps_at(&pa, &a.ins(&ra), &h.theta[&r.chain], &xs[i..i + k]);
                    let mut mid = gx[..i].to_vec();
                    mid.push(fun_obj(&pb, &b.ins(&fr), &b.psi[&fr], &gx[i..i + k]));
                    mid.extend_from_slice(&gx[i + k..]);
                    d.c(fun_slot(&pb, &b.ins(&fs), &b.psi[&fs], &mid, i, tr), b1)
                })
                .collect()
        };
        m.phi.insert((s, i, r), comps);
    }
    EdgeDendrex { f: h.f.clone(), source: a.clone(), target: b.clone(), mixed: m }
}

/// F from the unary mixed functors and θ from the associators that lower
/// one input at a time. Both lowering orders must agree.
pub fn recover_hom(y: &EdgeDendrex) -> Result<Hom, String> {
    let m = &y.mixed;
    let n = m.n;
    let p = m.prods();
    let fun: Vec<Functor> = (0..n * n).map(|k| m.psi[&unary(k / n, k % n)].clone()).collect();
    let mut theta = BTreeMap::new();
    for ch in crate::operads::chains(n, m.arity) {
        let k = ch.len() - 1;
        let u = unary(ch[0], ch[k]);
        let r1 = LSig::pure(&ch, 1);
        let r10 = LSig { chain: ch.clone(), ins: vec![1; k], out: 0 };
        let alpha = &m.phi[&(u.clone(), 0, r1.clone())];
        let pr = p.get(&m.ins(&r10));
        let d = &m.cats[m.out(&r10)];
        let lower = |order: &[usize], xs: &[usize]| -> usize {
            let mut ins = vec![1; k];
            let mut cur = xs.to_vec();
            let mut acc = d.id(fun_obj(&p, &m.ins(&r10), &m.psi[&r10], xs));
            for &j in order {
                let before = LSig { chain: ch.clone(), ins: ins.clone(), out: 0 };
                ins[j] = 0;
                let after = LSig { chain: ch.clone(), ins: ins.clone(), out: 0 };
                let beta = comps_at(&p, &m.ins(&before), &m.phi[&(after, j, unary(ch[j], ch[j + 1]))], &cur);
                acc = d.c(beta, acc);
                cur[j] = fun[ch[j] * n + ch[j + 1]].obj[cur[j]];
            }
            acc
        };
        let fwd: Vec<usize> = (0..k).collect();
        let bwd: Vec<usize> = (0..k).rev().collect();
        let mut comps = Vec::with_capacity(pr.num_objects());
        for x in 0..pr.num_objects() {
            let xs = pr.obj_tuple(x);
            let g = lower(&fwd, &xs);
            if g != lower(&bwd, &xs) {
                return Err(format!("lowering orders disagree on chain {:?}", ch));
            }
            let gi = d.inverse(g).ok_or("non-invertible associator")?;
            comps.push(d.c(alpha[x], gi));
        }
        theta.insert(ch, comps);
    }
    Ok(Hom { f: y.f.clone(), fun, theta })
}

// ---------------------------------------------------------------------------
// left homotopy

/// μ_τ: Ψ^{y₂}_τ ⇒ Ψ^{y₁}_τ on every mixed signature; the identity elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub mu: BTreeMap<LSig, Components>,
}

impl Witness {
    pub fn to_json(&self) -> Value {
        Value::Array(self.mu.iter().map(|(s, c)| json!({"sig": s.to_json(), "components": c})).collect())
    }
}

fn mu_of<'a>(w: &'a BTreeMap<LSig, Components>, ids: &'a BTreeMap<LSig, Components>, s: &LSig) -> &'a Components {
    w.get(s).unwrap_or_else(|| &ids[s])
}

/// Check that μ is a witness between y₁ and y₂.
pub fn check_witness(y1: &EdgeDendrex, y2: &EdgeDendrex, w: &Witness) -> Vec<String> {
    let m = &y1.mixed;
    let p = m.prods();
    let ids: BTreeMap<LSig, Components> =
        m.psi.iter().filter(|(s, _)| !is_mixed(s)).map(|(s, f)| (s.clone(), identity_nat(&m.cats[m.out(s)], f))).collect();
    let mut bad = Vec::new();
    for s in m.signatures().into_iter().filter(is_mixed) {
        match w.mu.get(&s) {
            None => bad.push(format!("witness misses {}", s.name())),
            Some(c) => {
                if let Err(e) = check_nat_iso(&p.get(&m.ins(&s)), &m.cats[m.out(&s)], &y2.mixed.psi[&s], &m.psi[&s], c) {
                    bad.push(format!("μ {}: {}", s.name(), e));
                }
            }
        }
    }
    if !bad.is_empty() {
        return bad;
    }
    for (s, i, r) in m.composites() {
        let t = s.compose(i, &r).unwrap();
        if !is_mixed(&t) && !is_mixed(&s) && !is_mixed(&r) {
            continue;
        }
        let d = &m.cats[m.out(&s)];
        let key = (s.clone(), i, r.clone());
        let lhs = vcompose(d, &m.phi[&key], mu_of(&w.mu, &ids, &t));
        let h = p.hcomp(&m.ins(&s), &y2.mixed.psi[&s], mu_of(&w.mu, &ids, &s), i, &m.ins(&r), &m.psi[&r], mu_of(&w.mu, &ids, &r), m.out(&s));
        let rhs = vcompose(d, &h, &y2.mixed.phi[&key]);
        if lhs != rhs {
            bad.push(format!("witness condition fails at {} ∘_{} {}", s.name(), i, r.name()));
            break;
        }
    }
    bad
}

/// A witness that y₁ and y₂ are left homotopic, if one exists. Errors when
/// the endpoints differ.
pub fn left_homotopic(y1: &EdgeDendrex, y2: &EdgeDendrex) -> Result<Option<Witness>, String> {
    if y1.source != y2.source || y1.target != y2.target {
        return Err("edges have different endpoints".into());
    }
    if y1.f != y2.f {
        return Ok(None);
    }
    let m = &y1.mixed;
    let n = m.n;
    let p = m.prods();
    let ids: BTreeMap<LSig, Components> =
        m.psi.iter().filter(|(s, _)| !is_mixed(s)).map(|(s, f)| (s.clone(), identity_nat(&m.cats[m.out(s)], f))).collect();
    let mut mixed: Vec<LSig> = m.signatures().into_iter().filter(|s| is_mixed(s) && s.arity() > 1).collect();
    mixed.sort_by_key(|s| s.ins.iter().filter(|&&l| l == 1).count());
    let units: Vec<Vec<Components>> = (0..n * n)
        .map(|k| {
            let u = unary(k / n, k % n);
            enumerate_nat_isos(&m.cats[2 * k + 1], &m.cats[2 * k], &y2.mixed.psi[&u], &m.psi[&u])
        })
        .collect();
    for sel in tuples(&units.iter().map(|v| v.len()).collect::<Vec<_>>()) {
        let mut mu: BTreeMap<LSig, Components> = BTreeMap::new();
        for (k, &j) in sel.iter().enumerate() {
            mu.insert(unary(k / n, k % n), units[k][j].clone());
        }
        for t in &mixed {
            let k = t.ins.iter().position(|&l| l == 1).unwrap();
            let mut lowered = t.clone();
            lowered.ins[k] = 0;
            let u = unary(t.chain[k], t.chain[k + 1]);
            let key = (lowered.clone(), k, u.clone());
            let d = &m.cats[m.out(t)];
            let h = p.hcomp(&m.ins(&lowered), &y2.mixed.psi[&lowered], mu_of(&mu, &ids, &lowered), k, &m.ins(&u), &m.psi[&u], &mu[&u], m.out(t));
            let inv = vinverse(d, &m.phi[&key]).expect("φ is invertible");
            let c = vcompose(d, &inv, &vcompose(d, &h, &y2.mixed.phi[&key]));
            mu.insert(t.clone(), c);
        }
        let w = Witness { mu };
        if check_witness(y1, y2, &w).is_empty() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Conjugate the mixed part of y by random isomorphisms ν_τ: Ψ'_τ ⇒ Ψ_τ.
/// With `keep_objects` the components are automorphisms. Returns the new
/// edge and ν as a witness for (y, y').
pub fn transport(y: &EdgeDendrex, seed: u64, keep_objects: bool) -> (EdgeDendrex, Witness) {
    let mut rng = StdRng::seed_from_u64(seed);
    let m = &y.mixed;
    let p = m.prods();
    let mut out = y.clone();
    let mut nu = BTreeMap::new();
    for s in m.signatures().into_iter().filter(is_mixed) {
        let pr = p.get(&m.ins(&s));
        let d = &m.cats[m.out(&s)];
        let f = &m.psi[&s];
        let c: Vec<usize> = (0..pr.num_objects())
            .map(|x| {
                let tgt = f.obj[x];
                let isos: Vec<usize> =
                    if keep_objects { d.isos(tgt, tgt) } else { (0..d.num_objects()).flat_map(|o| d.isos(o, tgt)).collect() };
                isos[rng.random_range(0..isos.len())]
            })
            .collect();
        let obj = c.iter().map(|&th| d.src(th)).collect();
        let mor = (0..pr.num_morphisms())
            .map(|u| {
                let (a, b) = (pr.morphisms[u].src, pr.morphisms[u].tgt);
                d.c(d.inverse(c[b]).unwrap(), d.c(f.mor[u], c[a]))
            })
            .collect();
        out.mixed.psi.insert(s.clone(), Functor { obj, mor });
        nu.insert(s, c);
    }
    let ids: BTreeMap<LSig, Components> =
        m.psi.iter().filter(|(s, _)| !is_mixed(s)).map(|(s, f)| (s.clone(), identity_nat(&m.cats[m.out(s)], f))).collect();
    for (s, i, r) in m.composites() {
        let t = s.compose(i, &r).unwrap();
        if !is_mixed(&t) && !is_mixed(&s) && !is_mixed(&r) {
            continue;
        }
        let d = &m.cats[m.out(&s)];
        let key = (s.clone(), i, r.clone());
        let h = p.hcomp(&m.ins(&s), &out.mixed.psi[&s], mu_of(&nu, &ids, &s), i, &m.ins(&r), &m.psi[&r], mu_of(&nu, &ids, &r), m.out(&s));
        let c = vcompose(d, &vinverse(d, &h).unwrap(), &vcompose(d, &m.phi[&key], mu_of(&nu, &ids, &t)));
        out.mixed.phi.insert(key, c);
    }
    (out, Witness { mu: nu })
}

// ---------------------------------------------------------------------------
// homotopy categories

#[derive(Clone, Debug)]
pub struct Ho {
    pub cat: FinCat,
    /// Morphism of `cat` for every input edge.
    pub edge_class: Vec<usize>,
}

/// ho of the sub-presheaf spanned by the given vertices and edges. The
/// identities and all composites must be present up to homotopy.
pub fn homotopy_category(vertices: &[Cells], edges: &[EdgeDendrex]) -> Result<Ho, String> {
    let find = |c: &Cells| vertices.iter().position(|v| v == c);
    let mut ends = Vec::with_capacity(edges.len());
    for (k, y) in edges.iter().enumerate() {
        let bad = y.validate();
        if !bad.is_empty() {
            return Err(format!("edge {} is invalid: {}", k, bad[0]));
        }
        let s = find(&y.source).ok_or(format!("edge {}: source is not a listed vertex", k))?;
        let t = find(&y.target).ok_or(format!("edge {}: target is not a listed vertex", k))?;
        ends.push((s, t));
    }
    // (source, target, members)
    let mut classes: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut edge_class = Vec::with_capacity(edges.len());
    for (k, y) in edges.iter().enumerate() {
        let mut hit = None;
        for (c, (s, t, mem)) in classes.iter().enumerate() {
            if (*s, *t) == ends[k] && left_homotopic(&edges[mem[0]], y)?.is_some() {
                hit = Some(c);
                break;
            }
        }
        let c = hit.unwrap_or_else(|| {
            classes.push((ends[k].0, ends[k].1, Vec::new()));
            classes.len() - 1
        });
        classes[c].2.push(k);
        edge_class.push(c);
    }
    let class_of = |y: &EdgeDendrex, s: usize, t: usize| -> Result<usize, String> {
        for (c, (cs, ct, mem)) in classes.iter().enumerate() {
            if (*cs, *ct) == (s, t) && left_homotopic(&edges[mem[0]], y)?.is_some() {
                return Ok(c);
            }
        }
        Err(format!("no listed edge {} → {} is homotopic to the required one", s, t))
    };
    let identity: Vec<usize> =
        vertices.iter().enumerate().map(|(v, a)| class_of(&phi_hom(a, a, &identity_hom(a)), v, v)).collect::<Result<_, _>>()?;
    let homs: Vec<Hom> = edges.iter().map(recover_hom).collect::<Result<_, _>>()?;
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    for (c1, (s1, t1, m1)) in classes.iter().enumerate() {
        for (c2, (s2, t2, m2)) in classes.iter().enumerate() {
            if t1 != s2 {
                continue;
            }
            let mut got = None;
            for &e1 in m1 {
                for &e2 in m2 {
                    let (a, b, c) = (&vertices[*s1], &vertices[*t1], &vertices[*t2]);
                    let h = compose_homs(a, b, c, &homs[e1], &homs[e2]);
                    let k = class_of(&phi_hom(a, c, &h), *s1, *t2)?;
                    if got.is_some_and(|g| g != k) {
                        return Err(format!("composition of classes {} and {} depends on representatives", c1, c2));
                    }
                    got = Some(k);
                }
            }
            table.insert((c1, c2), got.unwrap());
        }
    }
    let objects = (0..vertices.len()).map(|v| format!("v{}", v)).collect();
    let morphisms = classes.iter().map(|(s, t, m)| Mor { name: format!("[e{}]", m[0]), src: *s, tgt: *t }).collect();
    let cat = FinCat::new("ho", objects, morphisms, identity, |g, f| table.get(&(f, g)).copied()).map_err(|e| e.to_string())?;
    Ok(Ho { cat, edge_class })
}

/// ho of a simplicial set: f ~ g iff some 2-simplex has faces (s₀ y, g, f).
pub fn ho_of_sset(s: &SSet) -> Result<FinCat, String> {
    if s.sizes.len() < 3 {
        return Err("need simplices up to dimension 2".into());
    }
    let (n1, n2) = (s.sizes[1], s.sizes[2]);
    let (tgt, src) = (&s.face[1][0], &s.face[1][1]);
    let s0 = &s.degen[0][0];
    let mut parent: Vec<usize> = (0..n1).collect();
    fn root(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for z in 0..n2 {
        let (d0, d1, d2) = (s.face[2][0][z], s.face[2][1][z], s.face[2][2][z]);
        if d0 == s0[tgt[d2]] {
            let (a, b) = (root(&mut parent, d1), root(&mut parent, d2));
            parent[a] = b;
        }
    }
    let mut cls = vec![usize::MAX; n1];
    let mut reps = Vec::new();
    for e in 0..n1 {
        let r = root(&mut parent, e);
        if cls[r] == usize::MAX {
            cls[r] = reps.len();
            reps.push(r);
        }
        cls[e] = cls[r];
    }
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    for z in 0..n2 {
        let (g, h, f) = (cls[s.face[2][0][z]], cls[s.face[2][1][z]], cls[s.face[2][2][z]]);
        if let Some(&old) = table.get(&(f, g)) {
            if old != h {
                return Err("composition is not well defined".into());
            }
        }
        table.insert((f, g), h);
    }
    let objects = (0..s.sizes[0]).map(|x| s.labels.first().and_then(|l| l.get(x).cloned()).unwrap_or(format!("{}", x))).collect();
    let morphisms = reps
        .iter()
        .map(|&r| Mor { name: s.labels.get(1).and_then(|l| l.get(r).cloned()).unwrap_or(format!("{}", r)), src: src[r], tgt: tgt[r] })
        .collect();
    let identity = (0..s.sizes[0]).map(|x| cls[s0[x]]).collect();
    FinCat::new("ho", objects, morphisms, identity, |g, f| table.get(&(f, g)).copied()).map_err(|e| e.to_string())
}

/// An isomorphism of categories c → d, by brute force.
pub fn find_isomorphism(c: &FinCat, d: &FinCat) -> Option<Functor> {
    if c.num_objects() != d.num_objects() || c.num_morphisms() != d.num_morphisms() {
        return None;
    }
    let bij = |v: &[usize], n: usize| {
        let mut seen = vec![false; n];
        v.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    };
    enumerate_functors(c, d).into_iter().find(|f| bij(&f.obj, d.num_objects()) && bij(&f.mor, d.num_morphisms()))
}

// ---------------------------------------------------------------------------
// cross-check against the homotopy coherent nerve

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

/// Chain of the composite of the vertices in `verts`.
fn chain_of(t: &Tree, chains: &[Vec<usize>], verts: &[usize]) -> Vec<usize> {
    let (root, _) = crate::hcnerve::span(t, verts);
    let v = t.producer(root).expect("root of a nonempty span has a producer");
    let mut ch = chains[v].clone();
    for (j, &e) in t.vertices()[v].inputs.iter().enumerate().rev() {
        if t.producer(e).is_some_and(|w| verts.contains(&w)) {
            ch = splice_chain(&ch, j, &chain_of(t, chains, &above(t, verts, e)));
        }
    }
    ch
}

struct PhiTwist<'a> {
    cells: &'a Cells,
    tree: &'a Tree,
    chains: &'a [Vec<usize>],
}

impl Twist for PhiTwist<'_> {
    fn choose(&mut self, key: &[usize], _: &FinCat, _: &FinCat, _: &Functor) -> (Functor, Components) {
        let t = self.tree;
        let e0 = t.sub_inner_edges(key)[0];
        let up = above(t, key, e0);
        let low: Vec<usize> = key.iter().copied().filter(|v| !up.contains(v)).collect();
        let pos = crate::hcnerve::span(t, &low).1.iter().position(|&l| l == e0).unwrap();
        let s = LSig::pure(&chain_of(t, self.chains, key), 0);
        let (sl, su) = (LSig::pure(&chain_of(t, self.chains, &low), 0), LSig::pure(&chain_of(t, self.chains, &up), 0));
        (self.cells.psi[&s].clone(), self.cells.phi[&(sl, pos, su)].clone())
    }
}

/// The dendrex of the homotopy coherent nerve of a planar tree labelled by
/// chains of 0-cells, one per vertex.
pub fn unbiased_dendrex(cells: &Cells, tree: &Tree, chains: &[Vec<usize>]) -> Result<WDendrex, String> {
    if cells.levels != 1 || chains.len() != tree.degree() {
        return Err("one chain per vertex over one-level cells is required".into());
    }
    for (v, ch) in chains.iter().enumerate() {
        if ch.len() != tree.arity(v) + 1 || ch.iter().any(|&a| a >= cells.n) {
            return Err(format!("chain of vertex {} does not fit its arity", v));
        }
    }
    if tree.leaves().len() > cells.arity {
        return Err("tree has more leaves than the truncation arity".into());
    }
    let mut cats = Vec::with_capacity(tree.num_edges());
    for e in 0..tree.num_edges() {
        let pair = tree.producer(e).map(|v| (chains[v][0], chains[v][chains[v].len() - 1]));
        let used = tree.consumer(e).map(|v| {
            let j = tree.vertices()[v].inputs.iter().position(|&i| i == e).unwrap();
            (chains[v][j], chains[v][j + 1])
        });
        let (a, b) = match (pair, used) {
            (Some(p), Some(u)) if p != u => return Err(format!("labels disagree on edge {}", tree.edge_name(e))),
            (Some(p), _) => p,
            (None, Some(u)) => u,
            (None, None) => return Err("the unit tree has no vertices".into()),
        };
        cats.push(cells.cats[cells.colour(a, b, 0)].clone());
    }
    let funs: Vec<Functor> = chains.iter().map(|ch| cells.psi[&LSig::pure(ch, 0)].clone()).collect();
    assemble(tree, cats, &funs, &mut PhiTwist { cells, tree, chains })
}

/// Mismatches between the cube corners of x at one inner edge at length 1
/// and the associators of the cells for the split at that edge.
pub fn check_against_cells(cells: &Cells, chains: &[Vec<usize>], x: &WDendrex) -> Vec<String> {
    let t = &x.tree;
    let mut bad = Vec::new();
    for (key, c) in &x.comps {
        for (l, &e) in c.inner.iter().enumerate() {
            let up = above(t, key, e);
            let low: Vec<usize> = key.iter().copied().filter(|v| !up.contains(v)).collect();
            let pos = crate::hcnerve::span(t, &low).1.iter().position(|&q| q == e).unwrap();
            let (sl, su) = (LSig::pure(&chain_of(t, chains, &low), 0), LSig::pure(&chain_of(t, chains, &up), 0));
            if c.isos[1 << l] != cells.phi[&(sl, pos, su)] {
                bad.push(format!("component {:?} disagrees with φ at edge {}", key, t.edge_name(e)));
            }
        }
    }
    bad
}

/// A random chain labelling of a planar tree over n 0-cells.
pub fn random_labelling(tree: &Tree, n: usize, rng: &mut StdRng) -> Option<Vec<Vec<usize>>> {
    fn go(t: &Tree, v: usize, a: usize, z: usize, n: usize, rng: &mut StdRng, out: &mut Vec<Vec<usize>>) -> bool {
        let k = t.arity(v);
        if k == 0 && a != z {
            return false;
        }
        let mut ch = vec![a];
        ch.extend((1..k).map(|_| rng.random_range(0..n)));
        if k > 0 {
            ch.push(z);
        }
        out[v] = ch.clone();
        t.vertices()[v].inputs.iter().enumerate().all(|(j, &e)| match t.producer(e) {
            Some(w) => go(t, w, ch[j], ch[j + 1], n, rng, out),
            None => true,
        })
    }
    let v = tree.producer(tree.root())?;
    for _ in 0..100 {
        let mut out = vec![Vec::new(); tree.degree()];
        let (a, z) = (rng.random_range(0..n), rng.random_range(0..n));
        if go(tree, v, a, z, n, rng, &mut out) {
            return Some(out);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// fixtures

pub mod fixtures {
    use super::*;
    use crate::fincat::{fixtures::group_z2, indiscrete};

    fn binary(p: &FinCat, obj: impl Fn(usize, usize) -> usize, mor: impl Fn(usize, usize) -> usize) -> Functor {
        Functor {
            obj: (0..p.num_objects()).map(|o| {
                let t = p.obj_tuple(o);
                obj(t[0], t[1])
            }).collect(),
            mor: (0..p.num_morphisms()).map(|m| {
                let t = p.mor_tuple(m);
                mor(t[0], t[1])
            }).collect(),
        }
    }

    /// One object, hom category the discrete {e, s}, composition XOR.
    pub fn strict_z2() -> Classical {
        let m = |n: &str, o| Mor { name: n.into(), src: o, tgt: o };
        let h = FinCat::from_table("{e,s}", vec!["e".into(), "s".into()], vec![m("e", 0), m("s", 1)], vec![0, 1], &[]).expect("discrete");
        let p = product_cat(&[&h, &h]);
        let comp = binary(&p, |x, y| x ^ y, |u, v| u ^ v);
        let p3 = product_cat(&[&h, &h, &h]);
        Classical {
            name: "strict-z2".into(),
            objects: vec!["x".into()],
            homs: vec![h],
            comp: BTreeMap::from([((0, 0, 0), comp)]),
            unit: vec![0],
            assoc: BTreeMap::from([((0, 0, 0, 0), (0..p3.num_objects()).map(|o| p3.obj_tuple(o).iter().fold(0, |a, &b| a ^ b)).collect())]),
            lunit: vec![vec![0, 1]],
            runit: vec![vec![0, 1]],
        }
    }

    /// Hom categories Z/2 with λ = ρ = the generator and α = id, on n objects.
    pub fn twisted(n: usize) -> Classical {
        let z = group_z2();
        let p = product_cat(&[&z, &z]);
        let comp = binary(&p, |_, _| 0, |u, v| u ^ v);
        let mut b = Classical {
            name: format!("twisted-unit-{}", n),
            objects: (0..n).map(|a| format!("x{}", a)).collect(),
            homs: vec![z; n * n],
            comp: BTreeMap::new(),
            unit: vec![0; n],
            assoc: BTreeMap::new(),
            lunit: vec![vec![1]; n * n],
            runit: vec![vec![1]; n * n],
        };
        for t in tuples(&[n, n, n]) {
            b.comp.insert((t[0], t[1], t[2]), comp.clone());
        }
        for t in tuples(&[n, n, n, n]) {
            b.assoc.insert((t[0], t[1], t[2], t[3]), vec![0]);
        }
        b
    }

    pub fn twisted_unit() -> Classical {
        twisted(1)
    }

    /// Hom category indiscrete on {e, s}, composition XOR; all
    /// constraints are the unique arrows.
    pub fn chaotic_z2() -> Classical {
        let h = indiscrete("chaotic{e,s}", &["e", "s"]);
        let p = product_cat(&[&h, &h]);
        // morphism a→b has index 2a + b
        let comp = binary(&p, |x, y| x ^ y, |u, v| 2 * ((u / 2) ^ (v / 2)) + ((u % 2) ^ (v % 2)));
        let p3 = product_cat(&[&h, &h, &h]);
        let x3: Vec<usize> = (0..p3.num_objects()).map(|o| p3.obj_tuple(o).iter().fold(0, |a, &b| a ^ b) * 3).collect();
        Classical {
            name: "chaotic-z2".into(),
            objects: vec!["x".into()],
            homs: vec![h],
            comp: BTreeMap::from([((0, 0, 0), comp)]),
            unit: vec![0],
            assoc: BTreeMap::from([((0, 0, 0, 0), x3)]),
            lunit: vec![vec![0, 3]],
            runit: vec![vec![0, 3]],
        }
    }

    /// `twisted_unit` with α replaced by the generator; breaks the pentagon.
    pub fn broken_pentagon() -> Classical {
        let mut b = twisted_unit();
        b.name = "broken-pentagon".into();
        b.assoc.insert((0, 0, 0, 0), vec![1]);
        b
    }

    pub fn all() -> Vec<Classical> {
        vec![strict_z2(), twisted_unit(), twisted(2), chaotic_z2()]
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fixtures_are_bicategories() {
        for b in all() {
            assert!(b.validate().is_empty(), "{}: {:?}", b.name, b.validate());
        }
    }

    #[test]
    fn broken_pentagon_is_named() {
        let bad = broken_pentagon().validate();
        assert!(bad.iter().any(|s| s == "pentagon fails at (*, *, *, *)"), "{:?}", bad);
    }

    #[test]
    fn unbiased_forms_validate() {
        for b in all() {
            let c = classical_to_unbiased(&b, 3);
            assert!(c.validate().is_empty(), "{}: {:?}", b.name, c.validate());
        }
    }

    #[test]
    fn unit_twist_shows_in_phi() {
        let c = classical_to_unbiased(&twisted_unit(), 3);
        // Ψ(Ψ₀, x) ≅ x through ρ
        let s = LSig::pure(&[0, 0, 0], 0);
        let r = LSig::pure(&[0], 0);
        assert_eq!(c.phi[&(s, 0, r)], vec![1]);
    }

    #[test]
    fn broken_cells_fail_coherence() {
        let mut c = classical_to_unbiased(&twisted(2), 3);
        let key = c.phi.keys().find(|(s, _, r)| s.arity() == 2 && r.arity() == 2).unwrap().clone();
        let d = &c.cats[c.out(&key.0)];
        let v: Vec<usize> = c.phi[&key].iter().map(|&m| d.c(1, m)).collect();
        c.phi.insert(key, v);
        assert!(c.validate().iter().any(|s| s.contains("coherence")));
    }

    #[test]
    fn json_roundtrip() {
        let c = classical_to_unbiased(&twisted(2), 2);
        assert_eq!(Cells::from_json(&c.to_json()).unwrap(), c);
        for b in all() {
            assert_eq!(Classical::from_json(&b.to_json()).unwrap(), b);
        }
        let h = &enumerate_homs(&c, &c)[0];
        assert_eq!(&Hom::from_json(&h.to_json()).unwrap(), h);
        let y = phi_hom(&c, &c, h);
        assert_eq!(EdgeDendrex::from_json(&y.to_json()).unwrap(), y);
    }

    #[test]
    fn hc_nerve_dendrices_from_unbiased_cells() {
        let mut rng = StdRng::seed_from_u64(7);
        for b in [twisted(2), strict_z2()] {
            let c = classical_to_unbiased(&b, 4);
            for t in crate::hcnerve::fixtures::shapes() {
                if t.leaves().len() > 4 {
                    continue;
                }
                let lab = random_labelling(&t, b.n(), &mut rng).unwrap();
                let x = unbiased_dendrex(&c, &t, &lab).unwrap();
                assert!(x.validate().is_empty(), "{:?}", x.validate());
                assert!(check_against_cells(&c, &lab, &x).is_empty());
                for (_, f) in crate::hcnerve::boundary_family(&x) {
                    assert!(f.validate().is_empty());
                }
            }
        }
    }

    #[test]
    fn broken_cells_give_invalid_dendrices() {
        let mut c = classical_to_unbiased(&twisted_unit(), 4);
        let bin = LSig::pure(&[0, 0, 0], 0);
        c.phi.get_mut(&(bin.clone(), 0, bin)).unwrap().iter_mut().for_each(|m| *m ^= 1);
        let t = crate::trees::Tree::from_io("r", &[("r", &["a", "b"]), ("a", &["c", "d"]), ("b", &["e", "f"])]).unwrap();
        let lab = vec![vec![0, 0, 0]; 3];
        let x = unbiased_dendrex(&c, &t, &lab).unwrap();
        assert!(x.validate().is_empty());
        assert!(!check_against_cells(&c, &lab, &x).is_empty());
    }

    #[test]
    fn homs_roundtrip_and_compose() {
        let (a, b) = (classical_to_unbiased(&strict_z2(), 3), classical_to_unbiased(&twisted_unit(), 3));
        for (x, y) in [(&a, &b), (&b, &a), (&a, &a), (&b, &b)] {
            let hs = enumerate_homs(x, y);
            assert!(!hs.is_empty());
            for h in &hs {
                let e = phi_hom(x, y, h);
                assert!(e.validate().is_empty(), "{:?}", e.validate());
                assert_eq!(&recover_hom(&e).unwrap(), h);
            }
        }
        let id = identity_hom(&b);
        assert!(validate_hom(&b, &b, &id).is_empty());
        for h in enumerate_homs(&a, &b) {
            for g in enumerate_homs(&b, &b) {
                assert!(validate_hom(&a, &b, &compose_homs(&a, &b, &b, &h, &g)).is_empty());
            }
        }
    }

    #[test]
    fn transported_edges_are_homotopic() {
        let (a, b) = (classical_to_unbiased(&strict_z2(), 3), classical_to_unbiased(&twisted_unit(), 3));
        let h = &enumerate_homs(&a, &b)[0];
        let y = phi_hom(&a, &b, h);
        for seed in 0..3 {
            let (z, w) = transport(&y, seed, seed % 2 == 0);
            assert!(z.validate().is_empty());
            assert!(check_witness(&y, &z, &w).is_empty());
            assert!(left_homotopic(&y, &z).unwrap().is_some());
            assert!(left_homotopic(&phi_hom(&a, &b, &recover_hom(&z).unwrap()), &z).unwrap().is_some());
        }
    }

    #[test]
    fn different_object_maps_are_not_homotopic() {
        let b = classical_to_unbiased(&twisted(2), 2);
        let hs = enumerate_homs(&b, &b);
        let h1 = hs.iter().find(|h| h.f == vec![0, 1]).unwrap();
        let h2 = hs.iter().find(|h| h.f == vec![1, 0]).unwrap();
        assert_eq!(left_homotopic(&phi_hom(&b, &b, h1), &phi_hom(&b, &b, h2)).unwrap(), None);
    }

    #[test]
    fn ho_of_a_nerve() {
        use crate::fincat::fixtures::fork;
        let c = fork();
        let p = crate::operads::category_operad(&c);
        let uni = crate::dsets::Universe::new(2, 3);
        let x = crate::nerve::dendroidal_nerve(&p, &uni).unwrap();
        let s = crate::dsets::simplicial_restriction(&x);
        let h = ho_of_sset(&s).unwrap();
        assert!(find_isomorphism(&h, &c).is_some());
    }

    /// h2 ~ h1 iff an icon κ: F₂ ⇒ F₁ carries θ₂ to θ₁.
    fn icon_related(a: &Cells, b: &Cells, h1: &Hom, h2: &Hom) -> bool {
        if h1.f != h2.f {
            return false;
        }
        let n = a.n;
        let (pa, pb) = (a.prods(), b.prods());
        let kappas: Vec<Vec<Components>> = (0..n * n)
            .map(|k| enumerate_nat_isos(&a.cats[k], &b.cats[h1.f[k / n] * b.n + h1.f[k % n]], &h2.fun[k], &h1.fun[k]))
            .collect();
        tuples(&kappas.iter().map(|v| v.len()).collect::<Vec<_>>()).into_iter().any(|sel| {
            let kap = |x: usize, y: usize| &kappas[x * n + y][sel[x * n + y]];
            h1.theta.keys().all(|ch| {
                let s = LSig::pure(ch, 0);
                let fs = LSig::pure(&ch.iter().map(|&c| h1.f[c]).collect::<Vec<_>>(), 0);
                let pr = pa.get(&a.ins(&s));
                let d = &b.cats[b.out(&fs)];
                (0..pr.num_objects()).all(|x| {
                    let xs = pr.obj_tuple(x);
                    let top = fun_obj(&pa, &a.ins(&s), &a.psi[&s], &xs);
                    let lhs = d.c(kap(ch[0], ch[ch.len() - 1])[top], h2.theta[ch][x]);
                    let us: Vec<usize> = (0..s.arity()).map(|j| kap(ch[j], ch[j + 1])[xs[j]]).collect();
                    let rhs = d.c(h1.theta[ch][x], fun_mor(&pb, &b.ins(&fs), &b.psi[&fs], &us));
                    lhs == rhs
                })
            })
        })
    }

    #[test]
    fn homotopy_classes_are_icon_orbits() {
        let (a, b) = (classical_to_unbiased(&strict_z2(), 3), classical_to_unbiased(&twisted_unit(), 3));
        for (x, y) in [(&a, &b), (&b, &b), (&a, &a), (&b, &a)] {
            let hs = enumerate_homs(x, y);
            let es: Vec<EdgeDendrex> = hs.iter().map(|h| phi_hom(x, y, h)).collect();
            for i in 0..hs.len() {
                for j in 0..hs.len() {
                    let by_icon = icon_related(x, y, &hs[i], &hs[j]);
                    let by_filler = left_homotopic(&es[i], &es[j]).unwrap().is_some();
                    assert_eq!(by_icon, by_filler, "homs {} and {}", i, j);
                }
            }
        }
    }
}
