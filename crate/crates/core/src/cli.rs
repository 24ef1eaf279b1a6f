//! Batch command-line surface. Every command prints one JSON report; the
//! exit code is 0 when all checks pass, 1 when violations were found and 2
//! on input errors.

use crate::bicat::{self, Cells, Classical, EdgeDendrex, Hom};
use crate::dsets::{check_coskeletal, check_inner_kan, simplicial_restriction, DSet, Universe};
use crate::hcnerve::{boundary_family, reconstruct_from_2skeleton, WDendrex};
use crate::omega::{enumerate_maps, face_label, faces_of};
use crate::operads::tensor::{bv_tensor_asa_c1, bv_tensor_oracle, compare_with_oracle};
use crate::operads::{validate_operad, FiniteOperad};
use crate::trees::{corolla, example_t3, graft, linear, unit_tree, Tree, TreeJson};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "dendro", about = "Dendroidal sets, operads and weak 2-categories on finite data")]
pub struct Cli {
    /// Seed for randomized choices.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of counterexamples listed in a report.
    #[arg(long, global = true, default_value_t = 20)]
    pub max_witnesses: usize,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    #[command(subcommand)]
    Tree(TreeCmd),
    #[command(subcommand)]
    Omega(OmegaCmd),
    #[command(subcommand)]
    Operad(OperadCmd),
    #[command(subcommand)]
    Dset(DsetCmd),
    #[command(subcommand)]
    Groth(GrothCmd),
    #[command(subcommand)]
    Wcat1(WcatCmd),
    #[command(subcommand)]
    Bicat(BicatCmd),
}

#[derive(Subcommand, Debug)]
pub enum TreeCmd {
    /// Canonical code and canonical representative.
    Canon { tree: String },
    /// All faces with their labels.
    Faces { tree: String },
    /// Graft r onto the leaf `at` of s.
    Graft { s: String, at: String, r: String },
}

#[derive(Subcommand, Debug)]
pub enum OmegaCmd {
    /// All maps R → T in Ω.
    Enum { r: String, t: String },
}

#[derive(Subcommand, Debug)]
pub enum OperadCmd {
    /// Check units, associativity and equivariance.
    Validate { operad: String },
    /// The dendroidal nerve on a finite universe of trees.
    Nerve {
        operad: String,
        #[arg(long = "D", default_value_t = 3)]
        max_degree: usize,
        #[arg(long = "M", default_value_t = 4)]
        max_edges: usize,
    },
    /// As_A ⊗ Ω(C₁) in closed form.
    #[command(name = "tensor-asA-c1")]
    TensorAsaC1 {
        #[arg(long, value_delimiter = ',', default_value = "p,q")]
        colours: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
    /// Compare the closed form with the rewriting oracle.
    TensorOracle {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum DsetCmd {
    /// Inner Kan condition up to degree D.
    Kan {
        dset: String,
        #[arg(long = "D", default_value_t = 3)]
        max_degree: usize,
        #[arg(long)]
        strict: bool,
    },
    /// k-coskeletality up to degree D.
    Coskeletal {
        dset: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "D", default_value_t = 3)]
        max_degree: usize,
    },
    /// The simplicial set along Δ ⊂ Ω.
    Restrict { dset: String },
}

#[derive(Subcommand, Debug)]
pub enum GrothCmd {
    /// Sizes of ∫_S X for a shipped diagram (or `all`).
    Build {
        name: String,
        #[arg(long = "D", default_value_t = 3)]
        max_degree: usize,
        #[arg(long = "M", default_value_t = 4)]
        max_edges: usize,
    },
    /// Inner Kan and 2-coskeletal checks on ∫_S X.
    Check {
        name: String,
        #[arg(long = "D", default_value_t = 3)]
        max_degree: usize,
        #[arg(long = "M", default_value_t = 4)]
        max_edges: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum WcatCmd {
    Validate { dendrex: String },
    /// Restrict along the face with the given label.
    Face { dendrex: String, label: String },
    /// Rebuild a degree-3 record from its faces.
    Reconstruct { dendrex: String },
}

#[derive(Subcommand, Debug)]
pub enum BicatCmd {
    /// Validate a classical bicategory or unbiased cells.
    Validate { file: String },
    /// Unbiased cells of a classical bicategory.
    Unbias {
        file: String,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
    /// The dendrex of shape C₁ of a homomorphism A → B.
    Phi {
        a: String,
        b: String,
        /// Homomorphism file; without it, the enumerated hom `--index`.
        #[arg(long)]
        hom: Option<String>,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
    /// The homomorphism of a dendrex of shape C₁.
    Recover { edge: String },
    /// Decide left homotopy and print a witness.
    Homotopic { y1: String, y2: String },
    /// Homotopy category on the images of all homomorphisms between the inputs.
    Ho {
        files: Vec<String>,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
}

pub struct Report {
    pub code: i32,
    pub body: Value,
}

fn input(msg: impl Into<String>) -> Report {
    Report { code: 2, body: json!({"error": msg.into()}) }
}

fn verdict(ok: bool, body: Value) -> Report {
    Report { code: if ok { 0 } else { 1 }, body }
}

type R<T> = Result<T, Report>;

/// A path as given, else relative to $DENDRO_CORPUS, with or without `.json`.
fn resolve(arg: &str) -> R<PathBuf> {
    let p = PathBuf::from(arg);
    if p.exists() {
        return Ok(p);
    }
    if let Ok(dir) = std::env::var("DENDRO_CORPUS") {
        for cand in [PathBuf::from(&dir).join(arg), PathBuf::from(&dir).join(format!("{}.json", arg))] {
            if cand.exists() {
                return Ok(cand);
            }
        }
    }
    Err(input(format!("{}: no such file", arg)))
}

fn load(arg: &str) -> R<Value> {
    let p = resolve(arg)?;
    let s = std::fs::read_to_string(&p).map_err(|e| input(format!("{}: {}", p.display(), e)))?;
    serde_json::from_str(&s).map_err(|e| input(format!("{}: line {}, column {}: {}", p.display(), e.line(), e.column(), e)))
}

fn at<T>(arg: &str, r: Result<T, String>) -> R<T> {
    r.map_err(|e| input(format!("{}: {}", arg, e)))
}

/// Named shapes (`eta`, `C<n>`, `L<n>`, `T3`) or a tree file.
fn load_tree(arg: &str) -> R<Tree> {
    let num = |s: &str| s.parse::<usize>().ok();
    match arg {
        "eta" => return Ok(unit_tree("e")),
        "T3" => return Ok(example_t3()),
        _ => {}
    }
    if let Some(n) = arg.strip_prefix('C').and_then(num) {
        return Ok(corolla(n));
    }
    if let Some(n) = arg.strip_prefix('L').and_then(num) {
        return Ok(linear(n));
    }
    let v = load(arg)?;
    let tj: TreeJson = at(arg, serde_json::from_value(v).map_err(|e| e.to_string()))?;
    at(arg, Tree::from_json(&tj).map_err(|e| e.to_string()))
}

fn load_dset(arg: &str) -> R<DSet> {
    let v = load(arg)?;
    at(arg, DSet::from_json(&v))
}

fn load_cells(arg: &str, arity: usize) -> R<Cells> {
    let v = load(arg)?;
    if v.get("psi").is_some() {
        return at(arg, Cells::from_json(&v));
    }
    let b = at(arg, Classical::from_json(&v))?;
    let bad = b.validate();
    if !bad.is_empty() {
        return Err(input(format!("{}: not a bicategory: {}", arg, bad[0])));
    }
    Ok(bicat::classical_to_unbiased(&b, arity))
}

fn load_edge(arg: &str) -> R<EdgeDendrex> {
    let v = load(arg)?;
    at(arg, EdgeDendrex::from_json(&v))
}

fn truncate<T: Clone>(v: &[T], n: usize) -> Vec<T> {
    v.iter().take(n).cloned().collect()
}

fn universe(d: usize, m: usize) -> R<std::sync::Arc<Universe>> {
    if d > 4 || m > 6 {
        return Err(input("universe bounds are limited to D ≤ 4 and M ≤ 6"));
    }
    Ok(Universe::new(d, m))
}

fn tree_cmd(c: &TreeCmd) -> R<Report> {
    Ok(match c {
        TreeCmd::Canon { tree } => {
            let t = load_tree(tree)?;
            let (canon, _) = t.canonical_form();
            verdict(true, json!({"code": t.canonical_code(), "canonical": canon.to_json()}))
        }
        TreeCmd::Faces { tree } => {
            let t = load_tree(tree)?;
            let fs = faces_of(&t).map_err(|e| input(e.to_string()))?;
            let list: Vec<Value> = fs.iter().map(|f| json!({"label": face_label(&t, f), "map": f.to_json()})).collect();
            verdict(true, json!({"count": list.len(), "faces": list}))
        }
        TreeCmd::Graft { s, at: leaf, r } => {
            let (s, r) = (load_tree(s)?, load_tree(r)?);
            let g = graft(&s, leaf, &r).map_err(|e| input(e.to_string()))?;
            verdict(true, json!({"tree": g.to_json(), "code": g.canonical_code()}))
        }
    })
}

fn operad_cmd(c: &OperadCmd, w: usize) -> R<Report> {
    let load_op = |arg: &str| -> R<FiniteOperad> {
        let v = load(arg)?;
        at(arg, FiniteOperad::from_json(&v))
    };
    Ok(match c {
        OperadCmd::Validate { operad } => {
            let o = load_op(operad)?;
            let v = validate_operad(&o);
            verdict(v.is_empty(), json!({"operations": o.ops.len(), "violations": v.len(), "witnesses": truncate(&v, w)}))
        }
        OperadCmd::Nerve { operad, max_degree, max_edges } => {
            let o = load_op(operad)?;
            let u = universe(*max_degree, *max_edges)?;
            let x = crate::nerve::dendroidal_nerve(&o, &u).map_err(input)?;
            verdict(true, x.to_json())
        }
        OperadCmd::TensorAsaC1 { colours, max_arity } => {
            let names: Vec<&str> = colours.iter().map(|s| s.as_str()).collect();
            verdict(true, bv_tensor_asa_c1(&names, *max_arity).to_json())
        }
        OperadCmd::TensorOracle { k, max_arity, depth } => {
            let o = bv_tensor_oracle(*k, *max_arity, *depth).map_err(|e| input(e.to_string()))?;
            let (checked, bad) = compare_with_oracle(&o);
            let wit: Vec<Value> = bad.iter().take(w).map(|(s, n, cf)| json!({"signature": format!("{:?}", s), "oracle_count": n, "closed_form": cf})).collect();
            verdict(bad.is_empty(), json!({"signatures": checked, "disagreements": bad.len(), "witnesses": wit}))
        }
    })
}

fn dset_cmd(c: &DsetCmd, w: usize) -> R<Report> {
    Ok(match c {
        DsetCmd::Kan { dset, max_degree, strict } => {
            let x = load_dset(dset)?;
            let r = check_inner_kan(&x, *max_degree, *strict);
            verdict(r.ok(), json!({"horns": r.horns, "families": r.families, "fillers": r.filler_histogram, "failures": r.failures.len(), "witnesses": truncate(&r.failures, w)}))
        }
        DsetCmd::Coskeletal { dset, k, max_degree } => {
            let x = load_dset(dset)?;
            let r = check_coskeletal(&x, *k, *max_degree);
            verdict(r.ok(), json!({"shapes": r.horns, "families": r.families, "fillers": r.filler_histogram, "failures": r.failures.len(), "witnesses": truncate(&r.failures, w)}))
        }
        DsetCmd::Restrict { dset } => {
            let s = simplicial_restriction(&load_dset(dset)?);
            let bad = s.check_identities();
            verdict(
                bad.is_empty(),
                json!({"sizes": s.sizes, "face": s.face, "degen": s.degen, "labels": s.labels, "violations": truncate(&bad, w)}),
            )
        }
    })
}

fn groth_cmd(c: &GrothCmd, w: usize) -> R<Report> {
    let (name, d, m, check) = match c {
        GrothCmd::Build { name, max_degree, max_edges } => (name, *max_degree, *max_edges, false),
        GrothCmd::Check { name, max_degree, max_edges } => (name, *max_degree, *max_edges, true),
    };
    let u = universe(d, m)?;
    let specs: Vec<_> = crate::groth::corpus().into_iter().filter(|s| name == "all" || s.name == name).collect();
    if specs.is_empty() {
        return Err(input(format!("no shipped diagram named {}", name)));
    }
    let mut ok = true;
    let mut out = Vec::new();
    for spec in &specs {
        let dg = crate::groth::realize(spec, &u).map_err(input)?;
        let g = crate::groth::groth(&dg);
        let mut e = json!({"name": spec.name, "sizes": g.set.sizes});
        if check {
            let kan = check_inner_kan(&g.set, d, false);
            let cosk = check_coskeletal(&g.set, 2, d);
            let chain = crate::groth::check_proof_chain(&g, 2, d);
            ok &= kan.ok() && cosk.ok() && chain.is_empty();
            e["inner_kan"] = json!(kan.ok());
            e["coskeletal"] = json!(cosk.ok());
            e["witnesses"] = json!(truncate(&[kan.failures, cosk.failures, chain].concat(), w));
        }
        out.push(e);
    }
    Ok(verdict(ok, json!({"diagrams": out})))
}

fn wcat_cmd(c: &WcatCmd, w: usize) -> R<Report> {
    let load_w = |arg: &str| -> R<WDendrex> {
        let v = load(arg)?;
        at(arg, WDendrex::from_json(&v))
    };
    Ok(match c {
        WcatCmd::Validate { dendrex } => {
            let bad = load_w(dendrex)?.validate();
            verdict(bad.is_empty(), json!({"violations": bad.len(), "witnesses": truncate(&bad, w)}))
        }
        WcatCmd::Face { dendrex, label } => {
            let x = load_w(dendrex)?;
            let fs = faces_of(&x.tree).map_err(|e| input(e.to_string()))?;
            let f = fs.iter().find(|f| face_label(&x.tree, f) == *label).ok_or_else(|| {
                let labels: Vec<String> = fs.iter().map(|f| face_label(&x.tree, f)).collect();
                input(format!("no face labelled {}; faces: {}", label, labels.join(", ")))
            })?;
            let r = x.face_action(f).map_err(input)?;
            verdict(true, r.to_json())
        }
        WcatCmd::Reconstruct { dendrex } => {
            let x = load_w(dendrex)?;
            let fam = boundary_family(&x);
            match reconstruct_from_2skeleton(&x.tree, &fam) {
                Err(e) => return Err(input(e.to_string())),
                Ok(None) => verdict(false, json!({"reconstructed": false})),
                Ok(Some(y)) => verdict(y == x, json!({"reconstructed": true, "equal": y == x, "record": y.to_json()})),
            }
        }
    })
}

fn bicat_cmd(c: &BicatCmd, w: usize) -> R<Report> {
    Ok(match c {
        BicatCmd::Validate { file } => {
            let v = load(file)?;
            let bad = if v.get("psi").is_some() {
                at(file, Cells::from_json(&v))?.validate()
            } else {
                at(file, Classical::from_json(&v))?.validate()
            };
            verdict(bad.is_empty(), json!({"violations": bad.len(), "witnesses": truncate(&bad, w)}))
        }
        BicatCmd::Unbias { file, arity } => {
            let cells = load_cells(file, *arity)?;
            let bad = cells.validate();
            verdict(bad.is_empty(), cells.to_json())
        }
        BicatCmd::Phi { a, b, hom, index, arity } => {
            let (ca, cb) = (load_cells(a, *arity)?, load_cells(b, *arity)?);
            let h = match hom {
                Some(p) => {
                    let v = load(p)?;
                    let h = at(p, Hom::from_json(&v))?;
                    let bad = bicat::validate_hom(&ca, &cb, &h);
                    if !bad.is_empty() {
                        return Ok(verdict(false, json!({"violations": bad.len(), "witnesses": truncate(&bad, w)})));
                    }
                    h
                }
                None => {
                    let hs = bicat::enumerate_homs(&ca, &cb);
                    hs.get(*index).cloned().ok_or_else(|| input(format!("only {} homomorphisms", hs.len())))?
                }
            };
            verdict(true, bicat::phi_hom(&ca, &cb, &h).to_json())
        }
        BicatCmd::Recover { edge } => {
            let y = load_edge(edge)?;
            let bad = y.validate();
            if !bad.is_empty() {
                return Ok(verdict(false, json!({"violations": bad.len(), "witnesses": truncate(&bad, w)})));
            }
            match bicat::recover_hom(&y) {
                Ok(h) => verdict(bicat::validate_hom(&y.source, &y.target, &h).is_empty(), h.to_json()),
                Err(e) => verdict(false, json!({"error": e})),
            }
        }
        BicatCmd::Homotopic { y1, y2 } => {
            let (a, b) = (load_edge(y1)?, load_edge(y2)?);
            for (n, y) in [(y1, &a), (y2, &b)] {
                let bad = y.validate();
                if !bad.is_empty() {
                    return Err(input(format!("{}: invalid edge: {}", n, bad[0])));
                }
            }
            match bicat::left_homotopic(&a, &b).map_err(input)? {
                Some(wt) => verdict(true, json!({"homotopic": true, "witness": wt.to_json()})),
                None => verdict(false, json!({"homotopic": false})),
            }
        }
        BicatCmd::Ho { files, arity } => {
            let vs: Vec<Cells> = files.iter().map(|f| load_cells(f, *arity)).collect::<R<_>>()?;
            let mut edges = Vec::new();
            for a in &vs {
                for b in &vs {
                    edges.extend(bicat::enumerate_homs(a, b).iter().map(|h| bicat::phi_hom(a, b, h)));
                }
            }
            match bicat::homotopy_category(&vs, &edges) {
                Ok(ho) => verdict(true, json!({"edges": edges.len(), "classes": ho.cat.num_morphisms(), "category": ho.cat.to_json(), "edge_class": ho.edge_class})),
                Err(e) => verdict(false, json!({"error": e})),
            }
        }
    })
}

/// Parse and run; returns the exit code and the report text.
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) { 0 } else { 2 };
            return (code, e.to_string());
        }
    };
    let w = cli.max_witnesses;
    let r = match &cli.cmd {
        Cmd::Tree(c) => tree_cmd(c),
        Cmd::Omega(OmegaCmd::Enum { r, t }) => (|| {
            let (r, t) = (load_tree(r)?, load_tree(t)?);
            let ms = enumerate_maps(&r, &t);
            let mut maps: Vec<Value> = ms.iter().map(|m| m.to_json()).collect();
            maps.sort_by_key(|v| v.to_string());
            Ok(verdict(true, json!({"count": maps.len(), "maps": maps})))
        })(),
        Cmd::Operad(c) => operad_cmd(c, w),
        Cmd::Dset(c) => dset_cmd(c, w),
        Cmd::Groth(c) => groth_cmd(c, w),
        Cmd::Wcat1(c) => wcat_cmd(c, w),
        Cmd::Bicat(c) => bicat_cmd(c, w),
    };
    let rep = r.unwrap_or_else(|e| e);
    (rep.code, serde_json::to_string_pretty(&rep.body).expect("json"))
}
