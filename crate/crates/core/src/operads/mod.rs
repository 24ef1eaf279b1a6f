//! Finite coloured operads as explicit tables.
//!
//! Operads here are truncated at a maximal arity: composites whose arity
//! would exceed it are simply not stored, and every law is checked only on
//! instances that stay inside the bound.

pub mod tensor;

use crate::omega::permutations;
use crate::par;
use crate::trees::Tree;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sig {
    pub inputs: Vec<usize>,
    pub output: usize,
}

impl Sig {
    pub fn new(inputs: Vec<usize>, output: usize) -> Sig {
        Sig { inputs, output }
    }
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
    /// Signature of the composite σ ∘_i ρ, if the colours match.
    pub fn compose(&self, i: usize, rho: &Sig) -> Option<Sig> {
        if self.inputs.get(i) != Some(&rho.output) {
            return None;
        }
        let mut ins = self.inputs[..i].to_vec();
        ins.extend_from_slice(&rho.inputs);
        ins.extend_from_slice(&self.inputs[i + 1..]);
        Some(Sig::new(ins, self.output))
    }
    pub fn permute(&self, tau: &[usize]) -> Sig {
        Sig::new(tau.iter().map(|&k| self.inputs[k]).collect(), self.output)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Op {
    pub name: String,
    pub sig: Sig,
}

/// `(a∘b)[k] = a[b[k]]`.
pub fn perm_compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&k| a[k]).collect()
}

pub fn perm_inverse(a: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len()];
    for (k, &x) in a.iter().enumerate() {
        out[x] = k;
    }
    out
}

/// Equivariance of ∘_i: (p·τ) ∘_i (q·τ') = (p ∘_{τ(i)} q)·ρ. Returns (τ(i), ρ).
pub fn block_perm(tau: &[usize], i: usize, tau2: &[usize]) -> (usize, Vec<usize>) {
    let m = tau2.len();
    let j = tau[i];
    let pos = |x: usize| if x < j { x } else { x + m - 1 };
    let mut rho = Vec::with_capacity(tau.len() + m - 1);
    for &t in &tau[..i] {
        rho.push(pos(t));
    }
    for &t in tau2 {
        rho.push(j + t);
    }
    for &t in &tau[i + 1..] {
        rho.push(pos(t));
    }
    (j, rho)
}

/// A planar (non-symmetric) operad.
#[derive(Clone, Debug)]
pub struct PlanarOperad {
    pub colours: Vec<String>,
    pub ops: Vec<Op>,
    pub by_sig: HashMap<Sig, Vec<usize>>,
    pub units: Vec<usize>,
    pub comp: HashMap<(usize, usize, usize), usize>,
    pub max_arity: usize,
}

impl PlanarOperad {
    /// Tabulate ∘_i from a composition rule returning the result's index.
    pub fn build<F>(colours: Vec<String>, ops: Vec<Op>, units: Vec<usize>, max_arity: usize, rule: F) -> PlanarOperad
    where
        F: Fn(usize, usize, usize) -> Option<usize> + Sync + Send,
    {
        let by_sig = index_sigs(&ops);
        let mut by_out: HashMap<usize, Vec<usize>> = HashMap::new();
        for (k, o) in ops.iter().enumerate() {
            by_out.entry(o.sig.output).or_default().push(k);
        }
        let rows = par::map_range(ops.len(), |p| {
            let mut row = Vec::new();
            let sp = &ops[p].sig;
            for (i, c) in sp.inputs.iter().enumerate() {
                for &q in by_out.get(c).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if sp.arity() + ops[q].sig.arity() - 1 > max_arity {
                        continue;
                    }
                    if let Some(r) = rule(p, i, q) {
                        row.push(((p, i, q), r));
                    }
                }
            }
            row
        });
        let comp = rows.into_iter().flatten().collect();
        PlanarOperad { colours, ops, by_sig, units, comp, max_arity }
    }
}

fn index_sigs(ops: &[Op]) -> HashMap<Sig, Vec<usize>> {
    let mut by_sig: HashMap<Sig, Vec<usize>> = HashMap::new();
    for (k, o) in ops.iter().enumerate() {
        by_sig.entry(o.sig.clone()).or_default().push(k);
    }
    by_sig
}

/// A finite symmetric coloured operad.
#[derive(Clone, Debug)]
pub struct FiniteOperad {
    pub name: String,
    pub colours: Vec<String>,
    pub ops: Vec<Op>,
    pub by_sig: HashMap<Sig, Vec<usize>>,
    pub units: Vec<usize>,
    pub comp: HashMap<(usize, usize, usize), usize>,
    pub sym: HashMap<(usize, Vec<usize>), usize>,
    pub max_arity: usize,
    /// Set for Ω(T): the operad is free on the vertices of this tree, with
    /// `gens[v]` the generator of vertex v.
    pub free_on: Option<(Tree, Vec<usize>)>,
    /// For symmetrized operads: (planar op, permutation) of every op.
    pub planar_of: Option<Vec<(usize, Vec<usize>)>>,
}

impl FiniteOperad {
    pub fn ops_of(&self, sig: &Sig) -> &[usize] {
        self.by_sig.get(sig).map(|v| v.as_slice()).unwrap_or(&[])
    }
    pub fn colour_index(&self, name: &str) -> Option<usize> {
        self.colours.iter().position(|c| c == name)
    }
    pub fn arity(&self, p: usize) -> usize {
        self.ops[p].sig.arity()
    }
    pub fn compose(&self, p: usize, i: usize, q: usize) -> Option<usize> {
        self.comp.get(&(p, i, q)).copied()
    }
    pub fn act(&self, p: usize, tau: &[usize]) -> Option<usize> {
        if tau.iter().enumerate().all(|(k, &t)| k == t) {
            return Some(p);
        }
        self.sym.get(&(p, tau.to_vec())).copied()
    }
    pub fn is_symmetric(&self) -> bool {
        self.ops.iter().enumerate().all(|(p, o)| {
            permutations(o.sig.arity()).iter().all(|t| self.act(p, t).is_some())
        })
    }

    /// Operad with only trivial symmetric structure.
    pub fn from_planar(name: &str, p: PlanarOperad) -> FiniteOperad {
        FiniteOperad {
            name: name.to_string(),
            colours: p.colours,
            ops: p.ops,
            by_sig: p.by_sig,
            units: p.units,
            comp: p.comp,
            sym: HashMap::new(),
            max_arity: p.max_arity,
            free_on: None,
            planar_of: None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut comp: Vec<[usize; 4]> = self.comp.iter().map(|(&(p, i, q), &r)| [p, i, q, r]).collect();
        comp.sort();
        let mut sym: Vec<(usize, Vec<usize>, usize)> =
            self.sym.iter().map(|((p, t), &r)| (*p, t.clone(), r)).collect();
        sym.sort();
        serde_json::json!({
            "name": self.name,
            "colours": self.colours,
            "ops": self.ops.iter().map(|o| serde_json::json!({
                "name": o.name, "in": o.sig.inputs, "out": o.sig.output})).collect::<Vec<_>>(),
            "units": self.units,
            "max_arity": self.max_arity,
            "comp": comp,
            "sym": sym,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<FiniteOperad, String> {
        #[derive(Deserialize)]
        struct J {
            #[serde(default)]
            name: String,
            colours: Vec<String>,
            ops: Vec<JOp>,
            units: Vec<usize>,
            max_arity: usize,
            comp: Vec<[usize; 4]>,
            #[serde(default)]
            sym: Vec<(usize, Vec<usize>, usize)>,
        }
        #[derive(Deserialize)]
        struct JOp {
            name: String,
            #[serde(rename = "in")]
            inputs: Vec<usize>,
            out: usize,
        }
        let j: J = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        let nc = j.colours.len();
        let ops: Vec<Op> = j.ops.into_iter().map(|o| Op { name: o.name, sig: Sig::new(o.inputs, o.out) }).collect();
        let bad = |x: usize, n: usize, what: &str| if x >= n { Err(format!("{} index {} out of range", what, x)) } else { Ok(()) };
        for o in &ops {
            bad(o.sig.output, nc, "colour")?;
            for &c in &o.sig.inputs {
                bad(c, nc, "colour")?;
            }
        }
        if j.units.len() != nc {
            return Err("need one unit per colour".into());
        }
        for &u in &j.units {
            bad(u, ops.len(), "op")?;
        }
        for t in &j.comp {
            for &x in [t[0], t[2], t[3]].iter() {
                bad(x, ops.len(), "op")?;
            }
        }
        for (p, _, r) in &j.sym {
            bad(*p, ops.len(), "op")?;
            bad(*r, ops.len(), "op")?;
        }
        Ok(FiniteOperad {
            name: j.name,
            colours: j.colours,
            by_sig: index_sigs(&ops),
            ops,
            units: j.units,
            comp: j.comp.iter().map(|t| ((t[0], t[1], t[2]), t[3])).collect(),
            sym: j.sym.into_iter().map(|(p, t, r)| ((p, t), r)).collect(),
            max_arity: j.max_arity,
            free_on: None,
            planar_of: None,
        })
    }
}

/// Free symmetrization: operations are pairs (planar op p, τ) with
/// signature p's signature permuted by τ.
pub fn symmetrize(name: &str, p: &PlanarOperad) -> FiniteOperad {
    let mut ops = Vec::new();
    let mut planar_of = Vec::new();
    let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut perms_by_arity: Vec<Vec<Vec<usize>>> = Vec::new();
    for n in 0..=p.max_arity {
        perms_by_arity.push(permutations(n));
    }
    for (k, o) in p.ops.iter().enumerate() {
        for tau in &perms_by_arity[o.sig.arity()] {
            let is_id = tau.iter().enumerate().all(|(a, &b)| a == b);
            let name = if is_id { o.name.clone() } else { format!("{}·{:?}", o.name, tau) };
            index.insert((k, tau.clone()), ops.len());
            ops.push(Op { name, sig: o.sig.permute(tau) });
            planar_of.push((k, tau.clone()));
        }
    }
    let units = p.units.iter().map(|&u| index[&(u, vec![0])]).collect();
    let by_sig = index_sigs(&ops);
    let mut by_out: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, o) in ops.iter().enumerate() {
        by_out.entry(o.sig.output).or_default().push(k);
    }
    let rows = par::map_range(ops.len(), |a| {
        let (pa, ta) = &planar_of[a];
        let mut row = Vec::new();
        for (i, c) in ops[a].sig.inputs.iter().enumerate() {
            for &b in by_out.get(c).map(|v| v.as_slice()).unwrap_or(&[]) {
                let (pb, tb) = &planar_of[b];
                let (j, rho) = block_perm(ta, i, tb);
                if let Some(&r) = p.comp.get(&(*pa, j, *pb)) {
                    row.push(((a, i, b), index[&(r, rho)]));
                }
            }
        }
        row
    });
    let comp = rows.into_iter().flatten().collect();
    let mut sym = HashMap::new();
    for (a, (pa, ta)) in planar_of.iter().enumerate() {
        for t in &perms_by_arity[ta.len()] {
            if t.iter().enumerate().all(|(x, &y)| x == y) {
                continue;
            }
            sym.insert((a, t.clone()), index[&(*pa, perm_compose(ta, t))]);
        }
    }
    FiniteOperad {
        name: name.to_string(),
        colours: p.colours.clone(),
        ops,
        by_sig,
        units,
        comp,
        sym,
        max_arity: p.max_arity,
        free_on: None,
        planar_of: Some(planar_of),
    }
}

/// Splice chain `b` into position i of chain `a` (a_i = b_0, a_{i+1} = b_last).
pub fn splice_chain(a: &[usize], i: usize, b: &[usize]) -> Vec<usize> {
    let mut out = a[..i].to_vec();
    out.extend_from_slice(b);
    out.extend_from_slice(&a[i + 2..]);
    out
}

/// Colours of As_A: pairs (x, y) encoded as x·|A| + y.
pub fn pair_colour(k: usize, x: usize, y: usize) -> usize {
    x * k + y
}

/// Chains a_0 … a_n over {0..k}, n ≤ max_arity, in length then
/// lexicographic order.
pub fn chains(k: usize, max_arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = (0..k).map(|a| vec![a]).collect();
    for _ in 0..=max_arity {
        out.extend(level.iter().cloned());
        let mut next = Vec::new();
        for c in &level {
            for a in 0..k {
                let mut d = c.clone();
                d.push(a);
                next.push(d);
            }
        }
        level = next;
    }
    out
}

pub fn chain_sig(k: usize, chain: &[usize]) -> Sig {
    let ins = chain.windows(2).map(|w| pair_colour(k, w[0], w[1])).collect();
    Sig::new(ins, pair_colour(k, chain[0], chain[chain.len() - 1]))
}

/// Signatures of arity n that are composable chains.
pub fn admissible_signatures(k: usize, n: usize) -> Vec<Sig> {
    chains(k, n).into_iter().filter(|c| c.len() == n + 1).map(|c| chain_sig(k, &c)).collect()
}

/// The planar operad As^π_A, one operation per composable chain.
pub fn asa_planar(names: &[&str], max_arity: usize) -> PlanarOperad {
    let k = names.len();
    let mut colours = Vec::new();
    for x in names {
        for y in names {
            colours.push(format!("({},{})", x, y));
        }
    }
    let cs = chains(k, max_arity);
    let index: HashMap<Vec<usize>, usize> = cs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let ops: Vec<Op> = cs
        .iter()
        .map(|c| Op {
            name: format!("[{}]", c.iter().map(|&a| names[a]).collect::<Vec<_>>().join(",")),
            sig: chain_sig(k, c),
        })
        .collect();
    let mut units = vec![0; k * k];
    for x in 0..k {
        for y in 0..k {
            units[pair_colour(k, x, y)] = index[&vec![x, y]];
        }
    }
    PlanarOperad::build(colours, ops, units, max_arity, |p, i, q| {
        index.get(&splice_chain(&cs[p], i, &cs[q])).copied()
    })
}

/// As_A: the free symmetrization of As^π_A.
pub fn make_asa(names: &[&str], max_arity: usize) -> FiniteOperad {
    symmetrize(&format!("As_{{{}}}", names.join(",")), &asa_planar(names, max_arity))
}

/// The symmetric associative operad: As_A with A a point.
pub fn ass(max_arity: usize) -> FiniteOperad {
    let mut o = symmetrize("Ass", &asa_planar(&["*"], max_arity));
    o.colours = vec!["*".into()];
    o
}

/// Ω^π(T) for the stored planar structure of T: units plus one operation
/// per subtree, leaves in preorder.
pub fn omega_planar(t: &Tree) -> (PlanarOperad, Vec<usize>) {
    let colours: Vec<String> = t.edges().to_vec();
    let mut ops = Vec::new();
    let mut key: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut subs = Vec::new();
    for e in 0..t.num_edges() {
        key.insert((e, Vec::new()), ops.len());
        ops.push(Op { name: format!("id_{}", t.edge_name(e)), sig: Sig::new(vec![e], e) });
        subs.push((e, Vec::new(), vec![e]));
    }
    let units: Vec<usize> = (0..t.num_edges()).collect();
    for s in t.all_subtrees() {
        let name = s.verts.iter().map(|&v| t.vertices()[v].name.clone()).collect::<Vec<_>>().join("+");
        key.insert((s.root, s.verts.clone()), ops.len());
        ops.push(Op { name, sig: Sig::new(s.leaves.clone(), s.root) });
        subs.push((s.root, s.verts, s.leaves));
    }
    let gens: Vec<usize> = t
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, vx)| key[&(vx.out, vec![v])])
        .collect();
    let max_arity = ops.iter().map(|o| o.sig.arity()).max().unwrap_or(1);
    let p = PlanarOperad::build(colours, ops, units, max_arity, |p, _i, q| {
        let (r, vp, _) = &subs[p];
        let (_, vq, _) = &subs[q];
        if vp.is_empty() {
            return Some(q);
        }
        if vq.is_empty() {
            return Some(p);
        }
        let mut vs: Vec<usize> = vp.iter().chain(vq.iter()).copied().collect();
        vs.sort();
        key.get(&(*r, vs)).copied()
    });
    (p, gens)
}

/// Ω(T) as a symmetric operad.
pub fn omega_operad(t: &Tree) -> FiniteOperad {
    let (p, gens) = omega_planar(t);
    let mut o = symmetrize(&format!("Omega({})", t.canonical_code()), &p);
    let planar_of = o.planar_of.clone().unwrap();
    let lookup: HashMap<(usize, Vec<usize>), usize> =
        planar_of.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let sym_gens = gens
        .iter()
        .map(|&g| lookup[&(g, (0..p.ops[g].sig.arity()).collect::<Vec<_>>())])
        .collect();
    o.free_on = Some((t.clone(), sym_gens));
    o
}

/// A finite category as an operad with only unary operations.
pub fn category_operad(c: &crate::fincat::FinCat) -> FiniteOperad {
    let ops = c
        .morphisms
        .iter()
        .map(|m| Op { name: m.name.clone(), sig: Sig::new(vec![m.src], m.tgt) })
        .collect();
    let p = PlanarOperad::build(c.objects.clone(), ops, c.identity.clone(), 1, |g, _, f| c.compose(g, f));
    FiniteOperad::from_planar(&c.name, p)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OperadMap {
    pub colour_map: Vec<usize>,
    pub op_map: Vec<usize>,
}

/// Check that a pair of tables is an operad map.
pub fn check_operad_map(p: &FiniteOperad, q: &FiniteOperad, m: &OperadMap) -> Vec<String> {
    let mut bad = Vec::new();
    for (a, o) in p.ops.iter().enumerate() {
        let want = Sig::new(o.sig.inputs.iter().map(|&c| m.colour_map[c]).collect(), m.colour_map[o.sig.output]);
        if q.ops[m.op_map[a]].sig != want {
            bad.push(format!("op {} lands on the wrong signature", o.name));
        }
    }
    for (c, &u) in p.units.iter().enumerate() {
        if m.op_map[u] != q.units[m.colour_map[c]] {
            bad.push(format!("unit of colour {} not preserved", p.colours[c]));
        }
    }
    for (&(a, i, b), &r) in &p.comp {
        if q.compose(m.op_map[a], i, m.op_map[b]) != Some(m.op_map[r]) {
            bad.push(format!("composition ({}, {}, {}) not preserved", p.ops[a].name, i, p.ops[b].name));
        }
    }
    for ((a, t), &r) in &p.sym {
        if q.act(m.op_map[*a], t) != Some(m.op_map[r]) {
            bad.push(format!("action of {:?} on {} not preserved", t, p.ops[*a].name));
        }
    }
    bad
}

/// Per-vertex data of a map Ω(T) → Q: a colour per edge and, for each
/// vertex, an operation of Q on the vertex's inputs in stored order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FreeMap {
    pub colours: Vec<usize>,
    pub ops: Vec<usize>,
}

/// All maps Ω(T) → Q, described by their generator images.
pub fn free_maps(t: &Tree, q: &FiniteOperad) -> Vec<FreeMap> {
    let mut by_out: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, o) in q.ops.iter().enumerate() {
        by_out.entry((o.sig.output, o.sig.arity())).or_default().push(k);
    }
    let mut out = Vec::new();
    let mut cols = vec![usize::MAX; t.num_edges()];
    let mut ops = vec![usize::MAX; t.degree()];
    for c in 0..q.colours.len() {
        cols[0] = c;
        free_rec(t, q, &by_out, 0, &mut cols, &mut ops, &mut out);
    }
    out.sort();
    out
}

fn free_rec(
    t: &Tree,
    q: &FiniteOperad,
    by_out: &HashMap<(usize, usize), Vec<usize>>,
    v: usize,
    cols: &mut Vec<usize>,
    ops: &mut Vec<usize>,
    out: &mut Vec<FreeMap>,
) {
    if v == t.degree() {
        out.push(FreeMap { colours: cols.clone(), ops: ops.clone() });
        return;
    }
    let vx = &t.vertices()[v];
    let key = (cols[vx.out], vx.inputs.len());
    for &o in by_out.get(&key).map(|x| x.as_slice()).unwrap_or(&[]) {
        for (k, &i) in vx.inputs.iter().enumerate() {
            cols[i] = q.ops[o].sig.inputs[k];
        }
        ops[v] = o;
        free_rec(t, q, by_out, v + 1, cols, ops, out);
    }
}

/// Value of a free map on the subtree with the given vertices rooted at
/// `root`, with inputs listed in `leaves` order. `None` when a composite
/// falls outside Q's arity bound.
pub fn eval_free(t: &Tree, q: &FiniteOperad, x: &FreeMap, root: usize, verts: &[usize], leaves: &[usize]) -> Option<usize> {
    if verts.is_empty() {
        return Some(q.units[x.colours[root]]);
    }
    let (op, pre) = eval_pre(t, q, x, root, verts)?;
    let tau: Vec<usize> = leaves.iter().map(|l| pre.iter().position(|p| p == l).unwrap()).collect();
    q.act(op, &tau)
}

fn eval_pre(t: &Tree, q: &FiniteOperad, x: &FreeMap, e: usize, verts: &[usize]) -> Option<(usize, Vec<usize>)> {
    let v = t.producer(e).filter(|v| verts.contains(v));
    match v {
        None => Some((q.units[x.colours[e]], vec![e])),
        Some(v) => {
            let mut op = x.ops[v];
            let ins = &t.vertices()[v].inputs;
            let mut parts: Vec<Vec<usize>> = Vec::new();
            let mut subs = Vec::new();
            for &i in ins {
                if t.producer(i).map_or(false, |w| verts.contains(&w)) {
                    let s = eval_pre(t, q, x, i, verts)?;
                    parts.push(s.1.clone());
                    subs.push(Some(s.0));
                } else {
                    parts.push(vec![i]);
                    subs.push(None);
                }
            }
            for (k, s) in subs.iter().enumerate().rev() {
                if let Some(s) = s {
                    op = q.compose(op, k, *s)?;
                }
            }
            Some((op, parts.concat()))
        }
    }
}

/// Every operad map P → Q.
pub fn enumerate_operad_maps(p: &FiniteOperad, q: &FiniteOperad) -> Vec<OperadMap> {
    if let Some((t, _)) = &p.free_on {
        return free_maps(t, q).into_iter().filter_map(|x| extend_free(p, q, t, &x)).collect();
    }
    let mut out = Vec::new();
    let nc = p.colours.len();
    let total = q.colours.len().pow(nc as u32);
    for code in 0..total {
        let mut cm = Vec::with_capacity(nc);
        let mut c = code;
        for _ in 0..nc {
            cm.push(c % q.colours.len());
            c /= q.colours.len();
        }
        let mut om = vec![usize::MAX; p.ops.len()];
        ops_rec(p, q, &cm, 0, &mut om, &mut out);
    }
    out.sort();
    out
}

fn ops_rec(p: &FiniteOperad, q: &FiniteOperad, cm: &[usize], a: usize, om: &mut Vec<usize>, out: &mut Vec<OperadMap>) {
    if a == p.ops.len() {
        let m = OperadMap { colour_map: cm.to_vec(), op_map: om.clone() };
        if check_operad_map(p, q, &m).is_empty() {
            out.push(m);
        }
        return;
    }
    let s = &p.ops[a].sig;
    let want = Sig::new(s.inputs.iter().map(|&c| cm[c]).collect(), cm[s.output]);
    for &b in q.ops_of(&want) {
        om[a] = b;
        ops_rec(p, q, cm, a + 1, om, out);
    }
}

fn extend_free(p: &FiniteOperad, q: &FiniteOperad, t: &Tree, x: &FreeMap) -> Option<OperadMap> {
    let planar_of = p.planar_of.as_ref()?;
    let mut op_map = Vec::with_capacity(p.ops.len());
    for (a, (pk, _)) in planar_of.iter().enumerate() {
        let s = &p.ops[a].sig;
        // the first planar ops of Ω^π(T) are the units, one per edge
        let verts: Vec<usize> = if *pk < t.num_edges() { Vec::new() } else { t.subtree_vertices(s.output, &s.inputs)? };
        op_map.push(eval_free(t, q, x, s.output, &verts, &s.inputs)?);
    }
    Some(OperadMap { colour_map: x.colours.clone(), op_map })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: String,
    pub detail: String,
}

/// Exhaustive check of units, both associativity laws and equivariance on
/// every instance inside the arity bound.
pub fn validate_operad(o: &FiniteOperad) -> Vec<Violation> {
    let mut by_out: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, op) in o.ops.iter().enumerate() {
        by_out.entry(op.sig.output).or_default().push(k);
    }
    let empty: Vec<usize> = Vec::new();
    let outs = |c: usize| by_out.get(&c).unwrap_or(&empty);
    let name = |k: usize| o.ops[k].name.clone();
    let mut viol: Vec<Violation> = Vec::new();
    for (c, &u) in o.units.iter().enumerate() {
        if o.ops[u].sig != Sig::new(vec![c], c) {
            viol.push(Violation { law: "unit".into(), detail: format!("unit of {} has the wrong signature", o.colours[c]) });
        }
    }
    let rows = par::map_range(o.ops.len(), |p| {
        let mut v = Vec::new();
        let sp = &o.ops[p].sig;
        let n = sp.arity();
        if o.compose(o.units[sp.output], 0, p) != Some(p) {
            v.push(Violation { law: "unit".into(), detail: format!("1 ∘_0 {} ≠ {}", name(p), name(p)) });
        }
        for i in 0..n {
            if o.compose(p, i, o.units[sp.inputs[i]]) != Some(p) {
                v.push(Violation { law: "unit".into(), detail: format!("{} ∘_{} 1 ≠ {}", name(p), i, name(p)) });
            }
        }
        for i in 0..n {
            for &q in outs(sp.inputs[i]) {
                let m = o.arity(q);
                if n + m - 1 > o.max_arity {
                    continue;
                }
                let pq = match o.compose(p, i, q) {
                    Some(x) => x,
                    None => {
                        v.push(Violation { law: "closure".into(), detail: format!("({}, {}, {}) missing", name(p), i, name(q)) });
                        continue;
                    }
                };
                if o.ops[pq].sig != sp.compose(i, &o.ops[q].sig).unwrap() {
                    v.push(Violation { law: "signature".into(), detail: format!("({}, {}, {})", name(p), i, name(q)) });
                    continue;
                }
                // sequential: (p ∘_i q) ∘_{i+j} r = p ∘_i (q ∘_j r)
                for j in 0..m {
                    for &r in outs(o.ops[q].sig.inputs[j]) {
                        let ar = o.arity(r);
                        if n + m + ar - 2 > o.max_arity || m + ar - 1 > o.max_arity {
                            continue;
                        }
                        let lhs = o.compose(pq, i + j, r);
                        let rhs = o.compose(q, j, r).and_then(|qr| o.compose(p, i, qr));
                        if lhs.is_none() || lhs != rhs {
                            v.push(Violation {
                                law: "sequential associativity".into(),
                                detail: format!("({}, {}, {}, {}, {})", name(p), i, name(q), j, name(r)),
                            });
                        }
                    }
                }
                // parallel: (p ∘_k r) ∘_i q = (p ∘_i q) ∘_{k+m-1} r for i < k
                for k in i + 1..n {
                    for &r in outs(sp.inputs[k]) {
                        let ar = o.arity(r);
                        if n + m + ar - 2 > o.max_arity || n + ar - 1 > o.max_arity {
                            continue;
                        }
                        let lhs = o.compose(p, k, r).and_then(|pr| o.compose(pr, i, q));
                        let rhs = o.compose(pq, k + m - 1, r);
                        if lhs.is_none() || lhs != rhs {
                            v.push(Violation {
                                law: "parallel associativity".into(),
                                detail: format!("({}, {}, {}, {}, {})", name(p), i, name(q), k, name(r)),
                            });
                        }
                    }
                }
            }
        }
        // equivariance of the action and of ∘_i
        let perms = permutations(n);
        for t in &perms {
            let pt = match o.act(p, t) {
                Some(x) => x,
                None => {
                    if !o.sym.is_empty() {
                        v.push(Violation { law: "action".into(), detail: format!("{}·{:?} missing", name(p), t) });
                    }
                    continue;
                }
            };
            if o.ops[pt].sig != sp.permute(t) {
                v.push(Violation { law: "action".into(), detail: format!("{}·{:?} has the wrong signature", name(p), t) });
            }
            for t2 in &perms {
                if o.act(pt, t2) != o.act(p, &perm_compose(t, t2)) {
                    v.push(Violation { law: "action".into(), detail: format!("({}·{:?})·{:?}", name(p), t, t2) });
                }
            }
            for i in 0..n {
                for &q in outs(o.ops[pt].sig.inputs[i]) {
                    let m = o.arity(q);
                    if n + m - 1 > o.max_arity {
                        continue;
                    }
                    for t2 in &permutations(m) {
                        let qt = match o.act(q, t2) {
                            Some(x) => x,
                            None => continue,
                        };
                        let (j, rho) = block_perm(t, i, t2);
                        let lhs = o.compose(pt, i, qt);
                        let rhs = o.compose(p, j, q).and_then(|x| o.act(x, &rho));
                        if lhs != rhs {
                            v.push(Violation {
                                law: "equivariance".into(),
                                detail: format!("({}·{:?}) ∘_{} ({}·{:?})", name(p), t, i, name(q), t2),
                            });
                        }
                    }
                }
            }
        }
        v
    });
    viol.extend(rows.into_iter().flatten());
    viol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{corolla, example_t3, linear};

    fn sig_of(o: &FiniteOperad, ins: &[&str], out: &str) -> Sig {
        Sig::new(ins.iter().map(|c| o.colour_index(c).unwrap()).collect(), o.colour_index(out).unwrap())
    }

    #[test]
    fn asa_examples() {
        let o = make_asa(&["p", "q"], 3);
        assert_eq!(o.ops_of(&sig_of(&o, &["(p,q)", "(q,p)"], "(p,p)")).len(), 1);
        assert_eq!(o.ops_of(&sig_of(&o, &["(p,q)", "(p,q)"], "(p,q)")).len(), 0);
        assert_eq!(o.ops_of(&sig_of(&o, &[], "(p,p)")).len(), 1);
        let rep = validate_operad(&o);
        assert!(rep.is_empty(), "{:?}", &rep[..rep.len().min(3)]);
    }

    #[test]
    fn admissible_counts() {
        for k in 1..=3 {
            for n in 0..=4 {
                assert_eq!(admissible_signatures(k, n).len(), k.pow(n as u32 + 1));
            }
        }
    }

    #[test]
    fn omega_t3_ops() {
        let o = omega_operad(&example_t3());
        assert_eq!(o.ops_of(&sig_of(&o, &["b", "c"], "a")).len(), 1);
        let big = o.ops_of(&sig_of(&o, &["d", "e", "f", "c"], "a"));
        assert_eq!(big.len(), 1);
        assert_eq!(o.ops[big[0]].name, "v+w");
        let rep = validate_operad(&o);
        assert!(rep.is_empty(), "{:?}", &rep[..rep.len().min(3)]);
        let c2 = omega_operad(&corolla(2));
        let a = c2.ops_of(&sig_of(&c2, &["l1", "l2"], "r"));
        let b = c2.ops_of(&sig_of(&c2, &["l2", "l1"], "r"));
        assert_eq!((a.len(), b.len()), (1, 1));
        assert_eq!(c2.act(a[0], &[1, 0]), Some(b[0]));
    }

    #[test]
    fn corrupted_table_is_reported() {
        let mut o = omega_operad(&linear(2));
        let key = *o.comp.keys().find(|&&(p, _, q)| p >= 3 && q >= 3).unwrap();
        let r = o.comp[&key];
        o.comp.insert(key, (r + 1) % o.ops.len());
        let rep = validate_operad(&o);
        assert!(!rep.is_empty());
    }

    #[test]
    fn map_enumeration_examples() {
        let q = make_asa(&["p", "q"], 3);
        assert_eq!(enumerate_operad_maps(&omega_operad(&linear(0)), &q).len(), 4);
        assert_eq!(enumerate_operad_maps(&omega_operad(&corolla(1)), &q).len(), 4);
        assert_eq!(enumerate_operad_maps(&omega_operad(&corolla(2)), &ass(3)).len(), 2);
        for m in enumerate_operad_maps(&omega_operad(&corolla(2)), &ass(3)) {
            assert!(check_operad_map(&omega_operad(&corolla(2)), &ass(3), &m).is_empty());
        }
    }

    #[test]
    fn generic_enumeration_matches_free_path() {
        let p = omega_operad(&corolla(2));
        let q = omega_operad(&linear(1));
        let fast = enumerate_operad_maps(&p, &q);
        let mut slow_p = p.clone();
        slow_p.free_on = None;
        let slow = enumerate_operad_maps(&slow_p, &q);
        assert_eq!(fast, slow);
    }
}
