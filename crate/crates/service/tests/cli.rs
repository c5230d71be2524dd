use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use emotrans_core::synthetic::{oracle_corpus, separable_dataset, OracleConfig, SeparableConfig};
use serde_json::Value;

fn emotrans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emotrans")).args(args).output().unwrap()
}

fn emotrans_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_emotrans"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(emotrans(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(emotrans(&["train", "--corpus"]).status.code(), Some(2));
    assert_eq!(emotrans(&["train", "--corpus", "c", "--direction", "x2y", "--out", "m"]).status.code(), Some(2));
    assert_eq!(emotrans(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_corpus_is_a_domain_error() {
    let out = emotrans(&["train", "--corpus", "/nonexistent/corpus.jsonl", "--direction", "t2e", "--out", "m.bin"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FileNotFound"));
}

#[test]
fn live_provider_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = emotrans(&["synthesize", "--provider", "live", "--out", p(&dir.path().join("c.jsonl"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corpus_to_translation_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    oracle_corpus(&OracleConfig { sentences: 100, ..OracleConfig::default() }).save(&corpus).unwrap();

    let stats = stdout_json(&emotrans(&["stats", "--corpus", p(&corpus)]));
    assert_eq!(stats["instance_count"], 100);

    let splits = dir.path().join("splits");
    let counts = stdout_json(&emotrans(&["split", "--corpus", p(&corpus), "--seed", "3", "--out-dir", p(&splits)]));
    assert_eq!((counts["train"].as_u64(), counts["test"].as_u64()), (Some(80), Some(10)));

    let model = dir.path().join("t2e.bin");
    let train = emotrans(&["train", "--corpus", p(&corpus), "--direction", "t2e", "--out", p(&model)]);
    let summary = stdout_json(&train);
    assert!(summary["model_id"].as_str().unwrap().starts_with("t2e-"));
    assert_eq!(summary["log_likelihoods"].as_array().unwrap().len(), 11);

    let out = emotrans_stdin(&["translate", "--model", p(&model)], "hello\n");
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
    let out = emotrans_stdin(&["translate", "--model", p(&model)], "my dog\nthe cat\n");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "🐶\n🐱\n");
}

#[test]
fn evaluate_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let (hyp, reference) = (dir.path().join("hyp.txt"), dir.path().join("ref.txt"));
    std::fs::write(&hyp, "🐱🐶\n").unwrap();
    std::fs::write(&reference, "🐱🐶🐟\n").unwrap();
    let out = emotrans(&["evaluate", "bleu", "--hyp", p(&hyp), "--ref", p(&reference), "--max-n", "1"]);
    let b1 = stdout_json(&out)["b1"].as_f64().unwrap();
    assert!((b1 - (-0.5f64).exp()).abs() < 1e-12);

    let items = dir.path().join("items.jsonl");
    std::fs::write(
        &items,
        "{\"item_id\":\"q1\",\"input\":\"dog\",\"system\":\"🐶\",\"other\":\"🐕\"}\n\
         {\"item_id\":\"q2\",\"input\":\"cat\",\"system\":\"🐱\",\"other\":\"🐈\"}\n",
    )
    .unwrap();
    let tasks = dir.path().join("tasks.jsonl");
    let out = emotrans(&["evaluate", "build-tasks", "--items", p(&items), "--seed", "1", "--out", p(&tasks)]);
    assert_eq!(stdout_json(&out)["tasks"], 2);
    let task_lines: Vec<Value> =
        std::fs::read_to_string(&tasks).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let mut judgments = String::new();
    for t in &task_lines {
        let system = if t["a_is_system"].as_bool().unwrap() { "A" } else { "B" };
        for e in ["e1", "e2", "e3"] {
            judgments.push_str(&format!(
                "{{\"item_id\":{},\"evaluator_id\":\"{e}\",\"choice\":\"{system}\"}}\n",
                t["item_id"]
            ));
        }
    }
    let jpath = dir.path().join("judgments.jsonl");
    std::fs::write(&jpath, judgments).unwrap();
    let out = emotrans(&["evaluate", "prefs", "--tasks", p(&tasks), "--judgments", p(&jpath)]);
    assert_eq!(stdout_json(&out)["system_rate"], 1.0);
}

#[test]
fn transfer_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = separable_dataset(&SeparableConfig::default());
    let write = |name: &str, recs: &[emotrans_core::transfer::LabeledRecord]| {
        let path = dir.path().join(name);
        let body: String = recs.iter().map(|r| format!("{}\t{}\n", r.text, r.label)).collect();
        std::fs::write(&path, body).unwrap();
        path
    };
    let (train, test) = (write("train.tsv", data.train()), write("test.tsv", data.test()));
    let out = emotrans(&[
        "transfer",
        "--train",
        p(&train),
        "--test",
        p(&test),
        "--labels",
        "ag_news",
        "--mode",
        "fewshot",
        "--k",
        "10",
        "--runs",
        "5",
    ]);
    let report = stdout_json(&out);
    assert_eq!(report["per_run"].as_array().unwrap().len(), 5);
    assert!(report["mean"].as_f64().unwrap() >= 0.9);
    let out = emotrans(&["transfer", "--train", p(&train), "--test", p(&test), "--labels", "sentiment"]);
    assert_eq!(out.status.code(), Some(1));
}

fn http_get(port: u16, path: &str) -> Option<(u16, String)> {
    let mut stream = TcpStream::connect(("127.0.0.1", port)).ok()?;
    write!(stream, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut response = String::new();
    stream.read_to_string(&mut response).ok()?;
    let status = response.split_whitespace().nth(1)?.parse().ok()?;
    Some((status, response.split("\r\n\r\n").nth(1).unwrap_or("").to_string()))
}

#[test]
fn serve_answers_health_on_port_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    oracle_corpus(&OracleConfig { sentences: 60, ..OracleConfig::default() }).save(&corpus).unwrap();
    let mut models = Vec::new();
    for d in ["t2e", "e2t"] {
        let path = dir.path().join(format!("{d}.bin"));
        assert!(emotrans(&["train", "--corpus", p(&corpus), "--direction", d, "--out", p(&path)]).status.success());
        models.push(path);
    }
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_emotrans"))
        .args(["serve", "--bind", "127.0.0.1:1", "--t2e-model", p(&models[0]), "--e2t-model", p(&models[1])])
        .env("PORT", port.to_string())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    stderr.read_line(&mut line).unwrap();
    assert!(line.contains(&format!(":{port}")), "{line}");

    let deadline = Instant::now() + Duration::from_secs(20);
    let mut health = None;
    while Instant::now() < deadline {
        match http_get(port, "/api/health") {
            Some((200, body)) => {
                health = Some(body);
                break;
            }
            _ => std::thread::sleep(Duration::from_millis(50)),
        }
    }
    child.kill().unwrap();
    child.wait().unwrap();
    let health: Value = serde_json::from_str(&health.expect("server became ready")).unwrap();
    assert_eq!(health["status"], "ok");
}
