use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_elp-resolve"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("elp-resolve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn analyze_text_has_the_r14_row() {
    let running = data("running_example.lp");
    let out = run(&["analyze", p(&running), "--text"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text
        .lines()
        .any(|l| l == "cgr(r14) | r14 | {r14,r15},{r14,r16} | ~h ; ~t,~-t"));
}

#[test]
fn analyze_exit_codes() {
    let empty = temp_file("empty.lp", "");
    assert_eq!(run(&["analyze", p(&empty)]).status.code(), Some(0));
    let symmetric = data("symmetric.lp");
    assert_eq!(run(&["analyze", p(&symmetric)]).status.code(), Some(2));
    let broken = temp_file("broken.lp", "a :- b.\nc :- \n");
    let out = run(&["analyze", p(&broken)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let missing = PathBuf::from("/nonexistent/file.lp");
    assert_eq!(run(&["analyze", p(&missing)]).status.code(), Some(3));
}

#[test]
fn analyze_json_is_byte_stable() {
    let running = data("running_example.lp");
    let a = run(&["analyze", p(&running), "--json"]);
    let b = run(&["analyze", p(&running), "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["groups"].as_array().unwrap().len(), 8);
    assert_eq!(v["groups"][0]["anchor"], "r10");
    assert_eq!(
        v["groups"][7]["extensions"],
        serde_json::json!(["~h", "~t,~-t"])
    );
}

#[test]
fn graph_json_lists_five_cliques() {
    let running = data("running_example.lp");
    let out = run(&["graph", p(&running), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut weights: Vec<u64> = v["cliques"]
        .as_array()
        .unwrap()
        .iter()
        .map(|q| q["weight"].as_u64().unwrap())
        .collect();
    weights.sort();
    assert_eq!(weights, [1, 2, 2, 4, 5]);

    let empty = temp_file("empty-graph.lp", "");
    let out = run(&["graph", p(&empty), "--dot"]);
    assert_eq!(stdout(&out), "graph lambda {\n}\n");
}

/// Checks the statement shapes the exporter uses against the DOT grammar:
/// `graph ID { stmt* }` with node and `--` edge statements carrying
/// quoted attributes.
fn is_dot(text: &str) -> bool {
    let mut lines = text.lines();
    if lines.next() != Some("graph lambda {") || !text.ends_with("}\n") {
        return false;
    }
    let quoted = |s: &str| {
        s.len() >= 2 && s.starts_with('"') && s.ends_with('"') && !s[1..s.len() - 1].contains('"')
    };
    let attrs = |s: &str| {
        s.strip_prefix("[label=")
            .and_then(|r| r.strip_suffix("];"))
            .is_some_and(quoted)
    };
    lines.filter(|l| *l != "}").all(|l| {
        let l = l.trim();
        let Some((head, rest)) = l.split_once(" [") else {
            return false;
        };
        let rest = format!("[{rest}");
        let head_ok = match head.split_once(" -- ") {
            Some((a, b)) => quoted(a) && quoted(b),
            None => quoted(head),
        };
        head_ok && attrs(&rest)
    })
}

#[test]
fn graph_dot_is_well_formed() {
    let running = data("running_example.lp");
    let out = run(&["graph", p(&running), "--dot"]);
    let text = stdout(&out);
    assert!(is_dot(&text), "{text}");
    assert!(text.contains("\"r14\" -- \"r14\" [label=\"~t,~-t\"];"));
}

#[test]
fn scripted_resolution() {
    let running = data("running_example.lp");
    let script = data("guided_script.json");
    let out = run(&["resolve", p(&running), "--script", p(&script)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        std::fs::read_to_string(data("running_example_resolved.lp")).unwrap()
    );

    let clean = temp_file("clean.lp", "a :- b.\n-a :- -b.\n");
    let empty = temp_file("empty-script.json", "[]");
    let out = run(&["resolve", p(&clean), "--script", p(&empty)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "a :- b.\n-a :- -b.\n");

    let partial = temp_file(
        "partial.json",
        r#"[{"extension":"~f","targets":["r10","r6","r11","r13"]}]"#,
    );
    let out = run(&["resolve", p(&running), "--script", p(&partial)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_script_steps_exit_4_with_the_index() {
    let running = data("running_example.lp");
    let bad = temp_file(
        "bad.json",
        r#"[{"extension":"c","targets":["r2","r4"]},{"extension":"~f","targets":["r2"]}]"#,
    );
    let out = run(&["resolve", p(&running), "--script", p(&bad)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step 1"));
}

#[test]
fn saved_sessions_load_into_the_server() {
    let running = data("running_example.lp");
    let saved = temp_file("saved.json", "");
    let out = run(&["resolve", p(&running), "--suggest", "--save", p(&saved)]);
    assert_eq!(out.status.code(), Some(0));
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    assert!(!file["history"].as_array().unwrap().is_empty());

    let mut child = bin()
        .args(["serve", "--port", "0", "--session", p(&saved)])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut reader = BufReader::new(child.stdout.take().unwrap());
    let (mut first, mut second) = (String::new(), String::new());
    reader.read_line(&mut first).unwrap();
    reader.read_line(&mut second).unwrap();
    let port: u16 = first.trim().rsplit(':').next().unwrap().parse().unwrap();
    let id = second.trim().strip_prefix("session ").unwrap();
    let program = http_get(port, &format!("/sessions/{id}/program"));
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(program.starts_with("HTTP/1.1 200"), "{program}");
    assert!(program.ends_with(&stdout(&out)));
}

#[test]
fn interactive_prompt_loop() {
    let running = data("running_example.lp");
    let mut child = bin()
        .args(["resolve", p(&running), "--interactive-tty"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"~f r10 r6 r11 r13\nbogus r1\nu\ns\ns\ns\ns\ns\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let prompts = String::from_utf8(out.stderr).unwrap();
    assert!(prompts.starts_with("cgr(r10) [r10]: ~f (5)\n"));
    assert!(prompts.contains("rejected:"));
    assert!(prompts.contains("no conflicts left"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn uniform_command() {
    let resolved = data("running_example_resolved.lp");
    let out = run(&["uniform", p(&resolved), "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 contradictory"));
    let running = data("running_example.lp");
    assert_eq!(run(&["uniform", p(&running)]).status.code(), Some(7));
}

fn http_get(port: u16, path: &str) -> String {
    let mut s = TcpStream::connect(("127.0.0.1", port)).unwrap();
    write!(
        s,
        "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut response = String::new();
    s.read_to_string(&mut response).unwrap();
    response
}

#[test]
fn serve_on_an_os_assigned_port() {
    let static_dir = temp_file("index.html", "<h1>ui</h1>");
    let mut child = bin()
        .args([
            "serve",
            "--port",
            "0",
            "--static-dir",
            p(static_dir.parent().unwrap()),
        ])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut first = String::new();
    BufReader::new(child.stdout.as_mut().unwrap())
        .read_line(&mut first)
        .unwrap();
    let port: u16 = first.trim().rsplit(':').next().unwrap().parse().unwrap();
    assert_ne!(port, 0);

    let health = http_get(port, "/health");
    assert!(health.starts_with("HTTP/1.1 200"), "{health}");
    assert!(health.ends_with("ok"));
    let page = http_get(port, "/index.html");
    assert!(page.contains("<h1>ui</h1>"));
    child.kill().unwrap();
    child.wait().unwrap();
}

#[test]
fn serve_reports_bind_failure() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let out = run(&["serve", "--port", &port]);
    assert_eq!(out.status.code(), Some(5));
}
