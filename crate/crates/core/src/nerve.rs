//! Dendroidal nerves of finite operads.

use crate::dsets::{DSet, Universe};
use crate::omega::VImage;
use crate::operads::tensor::{bv_tensor_asa_c1_symmetric, split};
use crate::operads::{chains, check_operad_map, eval_free, free_maps, make_asa, pair_colour, FiniteOperad, FreeMap, OperadMap};
use std::collections::HashMap;
use std::sync::Arc;

fn label(p: &FiniteOperad, x: &FreeMap) -> String {
    if x.ops.is_empty() {
        return p.colours[x.colours[0]].clone();
    }
    x.ops.iter().map(|&o| p.ops[o].name.as_str()).collect::<Vec<_>>().join(",")
}

/// N_d(P) truncated to the universe. Fails when a composite needed for a
/// restriction exceeds the arity bound of P.
pub fn dendroidal_nerve(p: &FiniteOperad, uni: &Arc<Universe>) -> Result<DSet, String> {
    let elems: Vec<Vec<FreeMap>> = uni.trees.iter().map(|t| free_maps(t, p)).collect();
    let mut missing = false;
    let images: Vec<Vec<VImage>> = (0..uni.total_maps())
        .map(|m| uni.omega_map(m).vertex_images().expect("universe arrows are valid"))
        .collect();
    // probe once for arity overflow before building tables
    for m in 0..uni.total_maps() {
        let tgt = uni.maps[m].tgt;
        let t = &uni.trees[tgt];
        for x in &elems[tgt] {
            for im in &images[m] {
                if let VImage::Op { root, verts, leaves } = im {
                    if eval_free(t, p, x, *root, verts, leaves).is_none() {
                        missing = true;
                    }
                }
            }
            if missing {
                return Err(format!("{}: composites exceed arity bound {}", p.name, p.max_arity));
            }
        }
    }
    Ok(DSet::build(
        uni,
        &format!("N({})", p.name),
        elems,
        |x| label(p, x),
        |m, x| {
            let um = &uni.maps[m];
            let t = &uni.trees[um.tgt];
            let colours: Vec<usize> = um.edge_map.iter().map(|&e| x.colours[e]).collect();
            let ops = images[m]
                .iter()
                .map(|im| match im {
                    VImage::Unit(e) => p.units[x.colours[*e]],
                    VImage::Op { root, verts, leaves } => eval_free(t, p, x, *root, verts, leaves).unwrap(),
                })
                .collect();
            FreeMap { colours, ops }
        },
    ))
}

/// The presheaf map N_d(f): N_d(P) → N_d(Q), per shape.
pub fn nerve_map(f: &OperadMap, np: &DSet, nq: &DSet, p: &FiniteOperad, q: &FiniteOperad) -> Vec<Vec<usize>> {
    let uni = &np.uni;
    (0..uni.len())
        .map(|t| {
            let src = free_maps(&uni.trees[t], p);
            let tgt = free_maps(&uni.trees[t], q);
            let ix: HashMap<&FreeMap, usize> = tgt.iter().enumerate().map(|(i, x)| (x, i)).collect();
            debug_assert_eq!(src.len(), np.sizes[t]);
            debug_assert_eq!(tgt.len(), nq.sizes[t]);
            src.iter()
                .map(|x| {
                    let y = FreeMap {
                        colours: x.colours.iter().map(|&c| f.colour_map[c]).collect(),
                        ops: x.ops.iter().map(|&o| f.op_map[o]).collect(),
                    };
                    ix[&y]
                })
                .collect()
        })
        .collect()
}

/// Naturality of a per-shape map between presheaves.
pub fn check_presheaf_map(a: &DSet, x: &DSet, phi: &[Vec<usize>]) -> Vec<String> {
    let uni = &a.uni;
    let mut bad = Vec::new();
    for m in 0..uni.total_maps() {
        let um = &uni.maps[m];
        for y in 0..a.sizes[um.tgt] {
            if phi[um.src][a.res(m, y)] != x.res(m, phi[um.tgt][y]) {
                bad.push(format!("not natural along {} → {}", uni.code(um.src), uni.code(um.tgt)));
                break;
            }
        }
    }
    bad
}

/// N_d of the tensor As_A ⊗ Ω(C₁).
pub fn nerve_of_tensor(names: &[&str], uni: &Arc<Universe>) -> Result<DSet, String> {
    let t = bv_tensor_asa_c1_symmetric(names, uni.max_edges.saturating_sub(1).max(1));
    dendroidal_nerve(&t, uni)
}

/// The projection As_A ⊗ Ω(C₁) → As_A forgetting levels, with both operads.
pub fn tensor_projection(names: &[&str], max_arity: usize) -> (FiniteOperad, FiniteOperad, OperadMap) {
    let ten = bv_tensor_asa_c1_symmetric(names, max_arity);
    let asa = make_asa(names, max_arity);
    let tp = ten.planar_of.as_ref().expect("symmetrized");
    let ap = asa.planar_of.as_ref().expect("symmetrized");
    let back: HashMap<(usize, Vec<usize>), usize> = ap.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    // planar As_A op by signature, read off the symmetric op with identity permutation
    let mut planar_by_sig = HashMap::new();
    for (i, (pl, tau)) in ap.iter().enumerate() {
        if tau.iter().enumerate().all(|(k, &x)| k == x) {
            planar_by_sig.insert(asa.ops[i].sig.clone(), *pl);
        }
    }
    let colour_map: Vec<usize> = (0..ten.colours.len()).map(|c| split(2, c).0).collect();
    let op_map = (0..ten.ops.len())
        .map(|o| {
            let (pl, tau) = &tp[o];
            // the planar tensor op is the (pl, id) symmetric op
            let id_op = tp.iter().position(|(q, t)| q == pl && t.iter().enumerate().all(|(k, &x)| k == x)).unwrap();
            let s = &ten.ops[id_op].sig;
            let proj = crate::operads::Sig::new(s.inputs.iter().map(|&c| colour_map[c]).collect(), colour_map[s.output]);
            back[&(planar_by_sig[&proj], tau.clone())]
        })
        .collect();
    let f = OperadMap { colour_map, op_map };
    debug_assert!(check_operad_map(&ten, &asa, &f).is_empty());
    (ten, asa, f)
}

/// The map As_A → As_B induced by a function f: A → B.
pub fn asa_map(ka: usize, kb: usize, a: &FiniteOperad, b: &FiniteOperad, f: &[usize]) -> OperadMap {
    let ca = chains(ka, a.max_arity);
    let cb: HashMap<Vec<usize>, usize> = chains(kb, b.max_arity).into_iter().enumerate().map(|(i, c)| (c, i)).collect();
    let back: HashMap<&(usize, Vec<usize>), usize> =
        b.planar_of.as_ref().expect("symmetrized").iter().enumerate().map(|(i, k)| (k, i)).collect();
    let colour_map = (0..ka * ka).map(|c| pair_colour(kb, f[c / ka], f[c % ka])).collect();
    let op_map = a
        .planar_of
        .as_ref()
        .expect("symmetrized")
        .iter()
        .map(|(p, tau)| {
            let img: Vec<usize> = ca[*p].iter().map(|&x| f[x]).collect();
            back[&(cb[&img], tau.clone())]
        })
        .collect();
    OperadMap { colour_map, op_map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsets::{check_coskeletal, check_inner_kan, simplicial_restriction};
    use crate::operads::ass;
    use crate::trees::corolla;

    #[test]
    fn small_counts() {
        let u = Universe::new(2, 4);
        let asa = make_asa(&["p", "q"], 3);
        let n = dendroidal_nerve(&asa, &u).unwrap();
        assert_eq!(n.sizes[u.linear_index(0).unwrap()], 4);
        assert_eq!(simplicial_restriction(&n).sizes[0], 4);
        let a = dendroidal_nerve(&ass(3), &u).unwrap();
        assert_eq!(a.size_of(&corolla(2)), 2);
        assert!(a.check_functoriality().is_empty());
    }

    #[test]
    fn ass_nerve_is_strict_and_coskeletal() {
        let u = Universe::new(3, 5);
        let n = dendroidal_nerve(&ass(4), &u).unwrap();
        let k = check_inner_kan(&n, 3, true);
        assert!(k.ok(), "{:?}", k.failures);
        assert!(check_coskeletal(&n, 2, 3).ok());
    }

    #[test]
    fn tensor_nerve_and_projection() {
        let u = Universe::new(2, 4);
        let n = nerve_of_tensor(&["x", "y"], &u).unwrap();
        assert_eq!(n.sizes[u.linear_index(0).unwrap()], 8);
        let (ten, asa, f) = tensor_projection(&["x", "y"], 3);
        assert!(check_operad_map(&ten, &asa, &f).is_empty());
        let nt = dendroidal_nerve(&ten, &u).unwrap();
        let na = dendroidal_nerve(&asa, &u).unwrap();
        let phi = nerve_map(&f, &nt, &na, &ten, &asa);
        assert!(check_presheaf_map(&nt, &na, &phi).is_empty());
    }
}
