//! Drives the command-line front end in-process from a run configuration,
//! the same way the `pointsource` binary does.
//!
//!     cargo run --example cli_config

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("pointsource-cli");
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("run.json");
    std::fs::write(
        &config,
        r#"{"command": "verify", "kind": "pole2", "n_k": 4, "trials": 5, "seed": 3, "out": "verdicts.jsonl",
            "tolerances": {"recovery": 1e-9}}"#,
    )?;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = pointsource::cli::run(
        ["pointsource", "--config", config.to_str().unwrap()],
        &mut out,
        &mut err,
    );
    println!("exit {code}\nsummary: {}", String::from_utf8_lossy(&out));
    println!("verdicts in {}", dir.join("verdicts.jsonl").display());

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = pointsource::cli::run(["pointsource", "branchcut", "--zk", "0.3+0.9i"], &mut out, &mut err);
    print!("exit {code}\n{}", String::from_utf8_lossy(&out));
    Ok(())
}
