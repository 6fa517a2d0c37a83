use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use plcat::enrichment::enrich;
use plcat::io::to_text;
use plcat::reduction::toy_gadget;
use plcat::standard;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        let sb = Sandbox {
            dir: tempfile::tempdir().unwrap(),
        };
        sb.write("triangle.txt", &to_text(&standard::triangle()));
        sb.write("sphere.txt", &to_text(&standard::tetrahedron_boundary()));
        sb.write("wedge.txt", &to_text(&standard::vertex_wedge()));
        sb
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.path(name), text).unwrap();
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_plcat"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .unwrap()
    }

    fn json(&self, args: &[&str]) -> (i32, Value) {
        let out = self.run(args);
        let code = out.status.code().unwrap();
        let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
        (code, v)
    }

    /// Runs a command writing to `--out`, then verifies the artifact.
    fn emit_and_verify(&self, name: &str, args: &[&str]) -> (i32, i32) {
        let mut full = args.to_vec();
        full.extend(["--out", name]);
        let code = self.run(&full).status.code().unwrap();
        let verified = self.run(&["verify", name]).status.code().unwrap();
        (code, verified)
    }
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn collapse_exit_codes() {
    let sb = Sandbox::new();
    let (code, v) = sb.json(&["collapse", "triangle.txt"]);
    assert_eq!(code, 0);
    assert_eq!(v["kind"], "collapse");
    assert_eq!(v["collapsible"], true);
    assert_eq!(sb.json(&["collapse", "sphere.txt"]).0, 1);
    sb.write("bad.txt", "t a b\n");
    let out = sb.run(&["collapse", "bad.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    assert_eq!(sb.run(&["collapse", "missing.txt"]).status.code(), Some(2));
}

#[test]
fn shell_commands() {
    let sb = Sandbox::new();
    let (code, v) = sb.json(&["shell", "sphere.txt", "--find-shelling"]);
    assert_eq!(code, 0);
    assert_eq!(v["order"].as_array().unwrap().len(), 4);

    let (code, v) = sb.json(&["shell", "wedge.txt", "--hachimori"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "no");
    assert!(v["reason"].as_str().unwrap().contains("link"));

    let (code, v) = sb.json(&["shell", "triangle.txt", "--hachimori"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["witness"], serde_json::json!([]));

    sb.write("mixed.txt", "t a b c\ne c d\n");
    assert_eq!(
        sb.run(&["shell", "mixed.txt", "--find-shelling"]).status.code(),
        Some(2)
    );
}

#[test]
fn plgcat_commands() {
    let sb = Sandbox::new();
    let (code, v) = sb.json(&["plgcat", "triangle.txt"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "exactly_1");
    assert_eq!(v["interval"], serde_json::json!([1, 1]));

    let (_, v) = sb.json(&["plgcat", "sphere.txt"]);
    assert_eq!(v["interval"], serde_json::json!([2, 2]));
    assert!(v["cover_certificate"].is_object());

    let kp = enrich(&toy_gadget(1).complex);
    sb.write("enriched.json", &serde_json::to_string(&kp.to_doc()).unwrap());
    let out = sb.run(&["plgcat", "enriched.json"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("enriched"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["interval"][0], 2);
    assert!(v["search"]["enriched"].is_object());
    assert!(!v["evidence"].as_array().unwrap().is_empty());

    sb.write("two.txt", "v a\nv b\n");
    assert_eq!(sb.run(&["plgcat", "two.txt"]).status.code(), Some(2));
}

#[test]
fn emitted_certificates_verify() {
    let sb = Sandbox::new();
    assert_eq!(sb.emit_and_verify("c1.json", &["collapse", "triangle.txt"]), (0, 0));
    assert_eq!(sb.emit_and_verify("c2.json", &["collapse", "sphere.txt"]), (1, 0));
    assert_eq!(
        sb.emit_and_verify("s1.json", &["shell", "sphere.txt", "--find-shelling"]),
        (0, 0)
    );
    assert_eq!(
        sb.emit_and_verify("h1.json", &["shell", "sphere.txt", "--hachimori"]),
        (0, 0)
    );
    assert_eq!(sb.emit_and_verify("p1.json", &["plgcat", "sphere.txt"]), (0, 0));
    assert_eq!(sb.emit_and_verify("p2.json", &["plgcat", "triangle.txt"]), (0, 0));

    let mut v = read(&sb.path("p1.json"));
    v["cover_certificate"]["pieces"][1] = serde_json::json!([["1", "2", "3"]]);
    sb.write("tampered.json", &v.to_string());
    assert_eq!(sb.run(&["verify", "tampered.json"]).status.code(), Some(1));

    let mut v = read(&sb.path("h1.json"));
    v["witness"] = serde_json::json!([]);
    sb.write("tampered2.json", &v.to_string());
    assert_eq!(sb.run(&["verify", "tampered2.json"]).status.code(), Some(1));

    sb.write("unknown.json", r#"{"kind": "nothing"}"#);
    assert_eq!(sb.run(&["verify", "unknown.json"]).status.code(), Some(2));
}

#[test]
fn reduce_commands() {
    let sb = Sandbox::new();
    sb.write(
        "phi.cnf",
        "c (x or not y or z) and (not x or not y or t)\np cnf 4 2\n1 -2 3 0\n-1 -2 4 0\n",
    );
    let out = sb.run(&["reduce", "phi.cnf", "--gadget", "toy", "--out", "out"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["gadget.json", "enriched.json", "report.json", "timings.json"] {
        assert!(sb.path("out").join(f).exists(), "{f} missing");
    }
    let report = read(&sb.path("out/report.json"));
    assert_eq!(report["passed"], true);
    let m = &report["metadata"];
    assert_eq!(m["n"], 4);
    assert_eq!(m["enriched_triangles"], 19 * m["gadget_triangles"].as_u64().unwrap());

    // a gadget whose second sphere repeats the first
    let mut gadget = read(&sb.path("out/gadget.json"));
    gadget["named_subcomplexes"]["sphere:2"] = gadget["named_subcomplexes"]["sphere:1"].clone();
    sb.write("bad_gadget.json", &gadget.to_string());
    let out = sb.run(&["reduce", "phi.cnf", "--gadget", "bad_gadget.json", "--out", "bad"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(read(&sb.path("bad/report.json"))["passed"], false);

    sb.write("two.cnf", "p cnf 3 1\n1 2 0\n");
    assert_eq!(
        sb.run(&["reduce", "two.cnf", "--gadget", "toy", "--out", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sb.run(&["reduce", "phi.cnf", "--gadget", "toy"]).status.code(), Some(2));
}

#[test]
fn random_and_info() {
    let sb = Sandbox::new();
    let a = sb.run(&["--seed", "11", "random", "complex", "--connected"]).stdout;
    assert_eq!(a, sb.run(&["--seed", "11", "random", "complex", "--connected"]).stdout);
    assert_ne!(a, sb.run(&["--seed", "12", "random", "complex", "--connected"]).stdout);
    sb.write("r.json", &String::from_utf8(a).unwrap());
    let (code, v) = sb.json(&["info", "r.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["connected"], true);

    let cnf = sb
        .run(&["--seed", "3", "random", "cnf", "--vars", "4", "--clauses", "6"])
        .stdout;
    assert!(String::from_utf8(cnf).unwrap().starts_with("p cnf 4 6\n"));

    let (_, v) = sb.json(&["info", "sphere.txt"]);
    assert_eq!(v["betti"], serde_json::json!([1, 0, 1]));
}
