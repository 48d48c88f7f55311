use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_narrowtoa"))
        .args(args)
        .env("NARROWTOA_OUT", root)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn generate_attack_receive_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let out = run(&["generate", "--seed", "3"], root);
    assert!(out.status.success());
    let pkt = root.join("packets/packet_0000.bin");
    assert!(pkt.exists() && root.join("packets/packet_0000.bits.txt").exists());

    let cfg = root.join("ngd.json");
    std::fs::write(&cfg, r#"{"type":"ngd","delta_t":6.2e-8,"center_freq":0.0}"#).unwrap();
    let attacked = root.join("attacked.bin");
    let out = run(
        &[
            "attack",
            pkt.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            attacked.to_str().unwrap(),
        ],
        root,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["parameters"]["type"], "ngd");

    let bits = root.join("packets/packet_0000.bits.txt");
    let receive = |sig: &Path| {
        let out = run(
            &[
                "receive",
                sig.to_str().unwrap(),
                "--template",
                pkt.to_str().unwrap(),
                "--bits",
                bits.to_str().unwrap(),
            ],
            root,
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        json(&out)
    };
    let clean = receive(&pkt);
    let hit = receive(&attacked);
    assert_eq!(clean["toa"]["valid"], true);
    assert!(
        hit["toa"]["toa_seconds"].as_f64().unwrap() < clean["toa"]["toa_seconds"].as_f64().unwrap()
    );
}

#[test]
fn experiment_writes_results_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "experiment",
            "--preset",
            "exp2-random",
            "--packets",
            "3",
            "--check",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "records.jsonl",
        "summary.json",
        "config.toml",
        "metrics.csv",
        "correlation_trace.csv",
    ] {
        assert!(dir.path().join("exp2-random").join(f).exists(), "{f}");
    }
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "id = \"x\"\nn_packets = 0\nphy = \"LE1M\"\nmaster_seed = 1\n[payload]\nkind = \"none\"\n",
    )
    .unwrap();
    let out = run(
        &["experiment", "--config", bad.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));

    let strict = dir.path().join("strict.toml");
    std::fs::write(
        &strict,
        "id = \"strict\"\nn_packets = 2\nphy = \"LE1M\"\nmaster_seed = 1\n[payload]\nkind = \"none\"\n[check]\nmean_advance_m = [100.0, 200.0]\n",
    )
    .unwrap();
    let out = run(
        &[
            "experiment",
            "--config",
            strict.to_str().unwrap(),
            "--check",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));

    let out = run(
        &["receive", "missing.bin", "--template", "missing.bin"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
