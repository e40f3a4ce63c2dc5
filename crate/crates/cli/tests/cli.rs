use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_threatlens"));
    c.env_remove("THREATLENS_PORT")
        .env_remove("THREATLENS_BUNDLE")
        .env("RUST_LOG", "warn");
    c
}

fn samples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/samples")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn train_both(dir: &Path) -> PathBuf {
    let bundle = dir.join("bundle.json");
    let spam = samples().join("spam_sample.csv");
    let phish = samples().join("phishing_sample.csv");
    let o = run(&["train", "--task", "spam", "--dataset", spam.to_str().unwrap(), "-o", bundle.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&[
        "train", "--task", "url", "--dataset", phish.to_str().unwrap(), "-o", bundle.to_str().unwrap(),
        "--min-samples-leaf", "1", "--n-trees", "10",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    bundle
}

#[test]
fn train_prints_table_with_seed() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("b.json");
    let spam = samples().join("spam_sample.csv");
    let o = run(&["train", "--task", "spam", "--dataset", spam.to_str().unwrap(), "-o", bundle.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("seed       42\n"), "{out}");
    assert!(out.contains("split      16 train / 4 test\n"), "{out}");
    for key in ["accuracy", "precision", "recall", "f1", "roc_auc"] {
        let line = out.lines().find(|l| l.starts_with(key)).unwrap();
        let value = line.split_whitespace().nth(1).unwrap();
        assert_eq!(value.split('.').nth(1).unwrap().len(), 4, "{line}");
    }
}

#[test]
fn json_mode_is_one_document_and_evaluate_matches_train() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("b.json");
    let spam = samples().join("spam_sample.csv");
    let args = ["--json", "--seed", "7", "train", "--task", "spam", "--dataset", spam.to_str().unwrap(), "-o", bundle.to_str().unwrap()];
    let trained = run(&args);
    assert_eq!(code(&trained), 0);
    let doc: Value = serde_json::from_str(stdout(&trained).trim()).unwrap();
    assert_eq!(stdout(&trained).lines().count(), 1);
    assert_eq!(doc["seed"], 7);

    let again = run(&args);
    let doc_again: Value = serde_json::from_str(stdout(&again).trim()).unwrap();
    assert_eq!(doc["metrics"], doc_again["metrics"]);

    let eval = run(&["--json", "--seed", "7", "evaluate", "--task", "spam", "--dataset", spam.to_str().unwrap(), "--bundle", bundle.to_str().unwrap()]);
    assert_eq!(code(&eval), 0);
    let eval_doc: Value = serde_json::from_str(stdout(&eval).trim()).unwrap();
    assert_eq!(doc["metrics"], eval_doc["metrics"]);
    assert_eq!(doc["test_size"], eval_doc["test_size"]);
}

#[test]
fn training_a_second_task_keeps_the_first_model() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = train_both(dir.path());
    let text = run(&["classify", "--bundle", bundle.to_str().unwrap(), "--text", "free prize"]);
    assert_eq!(code(&text), 0);
    let url = run(&["classify", "--bundle", bundle.to_str().unwrap(), "--url", "http://bit.ly/3xYz"]);
    assert_eq!(code(&url), 0);
    let v: Value = serde_json::from_str(stdout(&url).trim()).unwrap();
    assert_eq!(stdout(&url).lines().count(), 1);
    for key in ["input_echo", "verdict", "score", "model_version", "latency_ms", "imputed_feature_count"] {
        assert!(v.get(key).is_some(), "{key} missing in {v}");
    }
}

#[test]
fn ingestion_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    let o = run(&["train", "--task", "spam", "--dataset", "/nonexistent.csv", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).is_empty());
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());

    // A spam file is not a phishing file.
    let spam = samples().join("spam_sample.csv");
    let o = run(&["train", "--task", "url", "--dataset", spam.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let corrupt = dir.path().join("corrupt.json");
    std::fs::write(&corrupt, "{\"format_version\":1").unwrap();
    let o = run(&["classify", "--bundle", corrupt.to_str().unwrap(), "--text", "x"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn training_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("single.csv");
    std::fs::write(&single, "label,text\nham,a b\nham,c d\nham,e f\nham,g h\nham,i j\n").unwrap();
    let out = dir.path().join("b.json");
    let o = run(&["train", "--task", "spam", "--dataset", single.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(!out.exists());
}

#[test]
fn evaluate_missing_model_or_schema_mismatch_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("b.json");
    let spam = samples().join("spam_sample.csv");
    let phish = samples().join("phishing_sample.csv");
    run(&["train", "--task", "spam", "--dataset", spam.to_str().unwrap(), "-o", bundle.to_str().unwrap()]);
    let o = run(&["evaluate", "--task", "url", "--dataset", phish.to_str().unwrap(), "--bundle", bundle.to_str().unwrap()]);
    assert_eq!(code(&o), 3);

    let both = train_both(dir.path());
    let other = dir.path().join("other.csv");
    let mut csv = String::from("url,length_url,nb_dots,status\n");
    for i in 0..10 {
        let status = if i % 2 == 0 { "phishing" } else { "legitimate" };
        csv.push_str(&format!("http://h{i}.com,{},{},{status}\n", 10 + i, i % 3));
    }
    std::fs::write(&other, csv).unwrap();
    let o = run(&["evaluate", "--task", "url", "--dataset", other.to_str().unwrap(), "--bundle", both.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("SchemaMismatch"));
}

#[test]
fn classify_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = train_both(dir.path());
    let b = bundle.to_str().unwrap();
    assert_eq!(code(&run(&["classify", "--bundle", b, "--text", ""])), 2);
    assert_eq!(code(&run(&["classify", "--bundle", b, "--url", "http://"])), 2);
    assert_eq!(code(&run(&["classify", "--bundle", b, "--url", "u", "--text", "t"])), 64);
    assert_eq!(code(&run(&["classify", "--bundle", b])), 64);
    assert_eq!(code(&run(&["classify", "--text", "hi"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn http_get(port: u16, path: &str) -> Option<String> {
    let mut s = TcpStream::connect(("127.0.0.1", port)).ok()?;
    s.set_read_timeout(Some(Duration::from_secs(2))).ok()?;
    write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut out = String::new();
    s.read_to_string(&mut out).ok()?;
    Some(out)
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn spawn_serve(args: &[&str]) -> Server {
    Server(
        bin()
            .args(args)
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    )
}

#[test]
fn serve_answers_health_and_stops_on_interrupt() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = train_both(dir.path());
    let port = free_port();
    let start = Instant::now();
    let mut server = spawn_serve(&["--json", "serve", "--bundle", bundle.to_str().unwrap(), "--port", &port.to_string()]);

    let mut line = String::new();
    BufReader::new(server.0.stdout.as_mut().unwrap()).read_line(&mut line).unwrap();
    let doc: Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(doc["listening"], format!("127.0.0.1:{port}"));

    let resp = loop {
        if let Some(r) = http_get(port, "/api/v1/health") {
            break r;
        }
        assert!(start.elapsed() < Duration::from_secs(2), "no health response within 2 s");
        std::thread::sleep(Duration::from_millis(20));
    };
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(start.elapsed() < Duration::from_secs(2));

    let busy = run(&["serve", "--bundle", bundle.to_str().unwrap(), "--port", &port.to_string()]);
    assert_eq!(code(&busy), 4);

    let kill = Command::new("kill").args(["-INT", &server.0.id().to_string()]).status().unwrap();
    assert!(kill.success());
    let status = server.0.wait().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn serve_with_unloadable_bundle_exits_2() {
    let o = run(&["serve", "--bundle", "/nonexistent/bundle.json", "--port", &free_port().to_string()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn classify_through_a_running_service() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = train_both(dir.path());
    let port = free_port();
    let config = dir.path().join("threatlens.toml");
    std::fs::write(&config, format!("listen = \"127.0.0.1:{port}\"\nbundle_path = {:?}\n", bundle.to_str().unwrap())).unwrap();
    let mut server = spawn_serve(&["--config", config.to_str().unwrap(), "serve"]);
    let mut line = String::new();
    BufReader::new(server.0.stdout.as_mut().unwrap()).read_line(&mut line).unwrap();
    assert!(line.contains(&port.to_string()), "{line}");

    let url = format!("http://127.0.0.1:{port}");
    let remote = run(&["classify", "--server", &url, "--text", "claim your free prize now"]);
    assert_eq!(code(&remote), 0, "{}", String::from_utf8_lossy(&remote.stderr));
    let local = run(&["classify", "--bundle", bundle.to_str().unwrap(), "--text", "claim your free prize now"]);
    let r: Value = serde_json::from_str(stdout(&remote).trim()).unwrap();
    let l: Value = serde_json::from_str(stdout(&local).trim()).unwrap();
    assert_eq!(r["verdict"], l["verdict"]);
    assert_eq!(r["score"], l["score"]);
    assert_eq!(r["model_version"], l["model_version"]);

    assert_eq!(code(&run(&["classify", "--server", &url, "--text", " "])), 2);
    drop(server);
    let unreachable = run(&["classify", "--server", &url, "--text", "hi"]);
    assert_eq!(code(&unreachable), 69);
}
