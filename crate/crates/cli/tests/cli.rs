use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dlsim::{parse_concept, parse_kb, Backend, Engine, SimilarityReport};
use tempfile::NamedTempFile;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn family() -> PathBuf {
    fixture("family.dlkb")
}

fn kb_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn dlsim(args: &[&str], kb: &Path) -> Output {
    let (cmd, rest) = args.split_first().unwrap();
    Command::new(env!("CARGO_BIN_EXE_dlsim")).arg(cmd).arg(kb).args(rest).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn check_family() {
    let o = dlsim(&["check"], &family());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "consistent, 10 definitions, 35 assertions, 10 individuals\n");
}

#[test]
fn check_reports_cycles_and_inconsistency() {
    let cyclic = kb_file("A := A and B\n");
    let o = dlsim(&["check"], cyclic.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cycl"));

    let bad = kb_file("A := B and not B\nA(a)\n");
    let o = dlsim(&["check"], bad.path());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("inconsistent"));

    let empty = kb_file("");
    let o = dlsim(&["check"], empty.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "consistent, 0 definitions, 0 assertions, 0 individuals\n");
}

#[test]
fn missing_file_and_parse_errors_exit_2() {
    let o = dlsim(&["check"], Path::new("/nonexistent/kb.dlkb"));
    assert_eq!(code(&o), 2);
    let broken = kb_file("A := and\n");
    let o = dlsim(&["check"], broken.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:"));
}

#[test]
fn subsumption_exit_codes() {
    let kb = fixture("fathers.dlkb");
    assert_eq!(code(&dlsim(&["subsumes", "Father", "Parent"], &kb)), 0);
    assert_eq!(code(&dlsim(&["subsumes", "Parent", "Father"], &kb)), 1);
    assert_eq!(code(&dlsim(&["subsumes", "Bottom", "Father and not Father"], &kb)), 0);
    assert_eq!(code(&dlsim(&["subsumes", "Father and", "Parent"], &kb)), 2);
}

#[test]
fn retrieval_formats() {
    let o = dlsim(&["retrieve", "Father"], &family());
    assert_eq!(stdout(&o), "Antonio\nAntonioB\nLeonardo\n");
    let o = dlsim(&["retrieve", "Bottom"], &family());
    assert_eq!((code(&o), stdout(&o)), (0, String::new()));
    let o = dlsim(&["retrieve", "Grandparent", "--format", "json"], &family());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, serde_json::json!({"concept": "Grandparent", "backend": "canonical", "members": ["Antonio", "AntonioB"]}));
    let o = dlsim(&["retrieve", "Grandparent", "--backend", "entail", "--format", "csv"], &family());
    assert_eq!(stdout(&o), "individual\nAntonio\nAntonioB\n");
}

#[test]
fn msc_output() {
    let o = dlsim(&["msc", "Claudia", "--depth", "0"], &family());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    assert!(first.contains("Woman") && first.contains("Sibling"), "{first}");
    assert!(text.lines().nth(1).unwrap().contains("Claudia"));

    let kb = kb_file("R(a, b)\n");
    let o = dlsim(&["msc", "b"], kb.path());
    assert_eq!(stdout(&o).lines().next(), Some("Top"));
    assert_eq!(code(&dlsim(&["msc", "nobody"], &family())), 2);
    assert_eq!(code(&dlsim(&["msc", "Claudia", "--depth", "deep"], &family())), 2);
}

#[test]
fn sim_text() {
    let o = dlsim(&["sim", "Grandparent", "Father"], &family());
    assert_eq!(stdout(&o), "0.6667\next (2, 3, 2)\nextension_computations 3, msc_computations 0\n");
    let o = dlsim(&["sim", "ind:Claudia", "ind:Claudia"], &family());
    assert!(stdout(&o).starts_with("1.0000\n"));
    let o = dlsim(&["sim", "Woman", "Bottom"], &family());
    assert!(stdout(&o).starts_with("0.0000\n"));
    let o = dlsim(&["sim", "Claudia", "Tiziana"], &family());
    assert!(stdout(&o).starts_with("0.5000\next (2, 1, 1)\n"));
}

#[test]
fn sim_json_round_trips() {
    let kb = parse_kb(&std::fs::read_to_string(family()).unwrap()).unwrap();
    let e = Engine::new(&kb).unwrap();
    let c = |s: &str| parse_concept(s).unwrap();
    let cases = [
        (vec!["sim", "Grandparent", "Father"], e.sim_concepts(&c("Grandparent"), &c("Father"), Backend::Canonical)),
        (
            vec!["sim", "Claudia", "Woman", "--depth", "1", "--backend", "entail"],
            e.sim_individual_concept("Claudia", &c("Woman"), Some(1), Backend::Entail),
        ),
    ];
    for (mut args, want) in cases {
        args.extend(["--format", "json"]);
        let o = dlsim(&args, &family());
        let got: SimilarityReport = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(got, want.unwrap());
    }
}

#[test]
fn sim_ambiguity_needs_prefix() {
    let kb = kb_file("A(A)\nB(b)\n");
    let o = dlsim(&["sim", "A", "B"], kb.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ind:A"));
    assert_eq!(code(&dlsim(&["sim", "concept:A", "B"], kb.path())), 0);
    assert_eq!(code(&dlsim(&["sim", "ind:A", "B"], kb.path())), 0);
    assert_eq!(code(&dlsim(&["sim", "ind:zz", "B"], kb.path())), 2);
}

fn read_matrix(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    let labels = rows[0].iter().skip(1).map(String::from).collect();
    let values = rows[1..].iter().map(|row| row.iter().skip(1).map(|v| v.parse().unwrap()).collect()).collect();
    (labels, values)
}

#[test]
fn matrix_csv() {
    let o = dlsim(&["matrix", "Grandparent", "Father", "exists HasChild.Woman", "--format", "csv"], &family());
    let (labels, values) = read_matrix(&stdout(&o));
    assert_eq!(labels, ["Grandparent", "Father", "exists HasChild.Woman"]);
    assert_eq!(values[0][1], 2.0 / 3.0);
    for (i, row) in values.iter().enumerate() {
        assert_eq!(row[i], 1.0);
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, values[j][i]);
        }
    }
    let o = dlsim(&["matrix", "Father", "--format", "csv"], &family());
    assert_eq!(read_matrix(&stdout(&o)).1, vec![vec![1.0]]);
    assert_eq!(code(&dlsim(&["matrix", "Father", "ind:nobody"], &family())), 2);
}

const BLOCKS: &str = "P(a)\nP(b)\nQ(a)\nQ(b)\nR(c)\nR(d)\nS(c)\nS(d)\nS(e)\n";

#[test]
fn cluster_two_blocks() {
    let kb = kb_file(BLOCKS);
    let o = dlsim(&["cluster", "P", "Q", "R", "S", "--format", "json"], kb.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let merges = v["merges"].as_array().unwrap();
    let sims: Vec<f64> = merges.iter().map(|m| m["similarity"].as_f64().unwrap()).collect();
    // P and Q coincide; R = {c, d} sits inside S = {c, d, e}, giving |R| / |S|.
    assert_eq!(sims, vec![1.0, 2.0 / 3.0, 0.0]);
    assert_eq!((merges[0]["left"].as_u64(), merges[0]["right"].as_u64()), (Some(0), Some(1)));
    assert_eq!(v["linkage"], "complete");
}

#[test]
fn cluster_text_and_single_leaf() {
    let kb = kb_file(BLOCKS);
    let o = dlsim(&["cluster", "P"], kb.path());
    assert_eq!(stdout(&o), "- P\n");
    let o = dlsim(&["cluster", "P", "Q", "R", "S", "--linkage", "average"], kb.path());
    let text = stdout(&o);
    assert!(text.starts_with("merge 0: 0 + 1 at 1.0000\n"), "{text}");
    assert!(text.contains("+ 0.0000\n  + 1.0000\n    - P\n    - Q\n"), "{text}");
    assert_eq!(code(&dlsim(&["cluster", "P", "--linkage", "ward"], kb.path())), 2);
}

#[test]
fn gen_is_seeded() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_dlsim")).args(["gen", "--seed", seed, "--individuals", "5"]).output().unwrap()
    };
    let (a, b, c) = (run("4"), run("4"), run("5"));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let kb = parse_kb(&stdout(&a)).unwrap();
    assert!(kb.individuals().len() <= 5);
    let missing = Command::new(env!("CARGO_BIN_EXE_dlsim")).arg("gen").output().unwrap();
    assert_eq!(code(&missing), 2);
}
