use serde_json::Value;
use std::path::PathBuf;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(args: &[&str]) -> (i32, Value) {
    std::env::set_var("DENDRO_CORPUS", corpus());
    let mut argv = vec!["dendro"];
    argv.extend_from_slice(args);
    let (code, out) = dendro::cli::run(argv);
    let v = serde_json::from_str(&out).unwrap_or(Value::String(out));
    (code, v)
}

#[test]
fn omega_enum_counts() {
    let (c, v) = run(&["omega", "enum", "C1", "C1"]);
    assert_eq!(c, 0);
    assert_eq!(v["count"], 3);
    let (_, v) = run(&["omega", "enum", "eta", "C2"]);
    assert_eq!(v["count"], 3);
}

#[test]
fn tree_commands() {
    let (c, v) = run(&["tree", "canon", "tree_t3"]);
    assert_eq!(c, 0);
    let (_, w) = run(&["tree", "canon", "T3"]);
    assert_eq!(v["code"], w["code"]);
    let (c, v) = run(&["tree", "faces", "T3"]);
    assert_eq!(c, 0);
    assert_eq!(v["count"], 4);
    let (c, v) = run(&["tree", "graft", "T3", "d", "C2"]);
    assert_eq!(c, 0);
    assert_eq!(v["code"], "(((**)**)())");
    let (c, _) = run(&["tree", "graft", "T3", "zz", "C2"]);
    assert_eq!(c, 2);
}

#[test]
fn operads_validate() {
    assert_eq!(run(&["operad", "validate", "asA_pq"]).0, 0);
    assert_eq!(run(&["operad", "validate", "ass3.json"]).0, 0);
    let (c, v) = run(&["operad", "tensor-oracle", "--k", "1", "--max-arity", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["disagreements"], 0);
}

#[test]
fn broken_operad_exits_one() {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(corpus().join("ass3.json")).unwrap()).unwrap();
    // Redirect one composite to another operation of the same profile.
    let ops = v["ops"].clone();
    let ops = ops.as_array().unwrap();
    let profile = |k: usize| (ops[k]["in"].clone(), ops[k]["out"].clone());
    let comp = v["comp"].as_array_mut().unwrap();
    let (e, other) = comp
        .iter_mut()
        .find_map(|e| {
            let r = e[3].as_u64().unwrap() as usize;
            let other = (0..ops.len()).find(|&k| k != r && profile(k) == profile(r))?;
            Some((e, other))
        })
        .unwrap();
    e[3] = Value::from(other);
    let p = std::env::temp_dir().join(format!("dendro-broken-{}.json", std::process::id()));
    std::fs::write(&p, v.to_string()).unwrap();
    let (c, r) = run(&["operad", "validate", p.to_str().unwrap()]);
    std::fs::remove_file(&p).ok();
    assert_eq!(c, 1, "{}", r);
    assert!(r["violations"].as_u64().unwrap() > 0);
}

#[test]
fn dset_commands() {
    let (c, v) = run(&["dset", "kan", "nerve_fork", "--D", "2"]);
    assert_eq!(c, 0);
    assert_eq!(v["failures"], 0);
    assert_eq!(run(&["dset", "coskeletal", "nerve_fork", "--D", "2"]).0, 0);
    assert_eq!(run(&["dset", "restrict", "nerve_fork"]).0, 0);
}

#[test]
fn groth_commands() {
    let (c, v) = run(&["groth", "build", "all", "--D", "2", "--M", "3"]);
    assert_eq!(c, 0);
    assert!(v["diagrams"].as_array().unwrap().len() >= 4);
    assert_eq!(run(&["groth", "check", "point-pq", "--D", "3", "--M", "4"]).0, 0);
    assert_eq!(run(&["groth", "build", "nonesuch"]).0, 2);
}

#[test]
fn wcat1_commands() {
    assert_eq!(run(&["wcat1", "validate", "w3_first"]).0, 0);
    let (c, v) = run(&["wcat1", "reconstruct", "w3_first"]);
    assert_eq!(c, 0);
    assert_eq!(v["equal"], true);
    assert_eq!(run(&["wcat1", "face", "w3_first", "inner:b"]).0, 0);
    assert_eq!(run(&["wcat1", "face", "w3_first", "bogus"]).0, 2);
}

#[test]
fn bicat_commands() {
    assert_eq!(run(&["bicat", "validate", "bicat_strict_z2"]).0, 0);
    let (c, v) = run(&["bicat", "validate", "bicat_broken_pentagon"]);
    assert_eq!(c, 1);
    assert!(v["witnesses"][0].as_str().unwrap().starts_with("pentagon"));
    let (c, v) = run(&["bicat", "validate", "bicat_broken_pentagon", "--max-witnesses", "1"]);
    assert_eq!(c, 1);
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 1);
    assert_eq!(run(&["bicat", "unbias", "bicat_twisted_unit"]).0, 0);
    let (c, edge) = run(&["bicat", "phi", "bicat_strict_z2", "bicat_twisted_unit", "--hom", "hom_strict_twisted"]);
    assert_eq!(c, 0);
    let shipped: Value = serde_json::from_str(&std::fs::read_to_string(corpus().join("edge_strict_twisted.json")).unwrap()).unwrap();
    assert_eq!(edge, shipped);
    let (c, h) = run(&["bicat", "recover", "edge_strict_twisted"]);
    assert_eq!(c, 0);
    let hom: Value = serde_json::from_str(&std::fs::read_to_string(corpus().join("hom_strict_twisted.json")).unwrap()).unwrap();
    assert_eq!(h, hom);
    let (c, v) = run(&["bicat", "homotopic", "edge_strict_twisted", "edge_strict_twisted"]);
    assert_eq!(c, 0);
    assert_eq!(v["homotopic"], true);
    let (c, v) = run(&["bicat", "ho", "bicat_strict_z2", "bicat_twisted_unit"]);
    assert_eq!(c, 0);
    assert_eq!(v["edges"], 11);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["bicat", "validate", "missing.json"]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    let p = std::env::temp_dir().join(format!("dendro-bad-{}.json", std::process::id()));
    std::fs::write(&p, "{\"root\": \"a\",\n \"vertices\": [}").unwrap();
    let (c, v) = run(&["tree", "canon", p.to_str().unwrap()]);
    std::fs::remove_file(&p).ok();
    assert_eq!(c, 2);
    assert!(v["error"].as_str().unwrap().contains("line 2"), "{}", v);
}
