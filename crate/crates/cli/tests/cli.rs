use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiral-blocks"))
        .args(args)
        .env_remove("CHIRAL_BLOCKS_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn circle_spectrum() {
    let o = run(&["spectrum", "--k", "0", "--max-level", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let levels = v["levels"].as_array().unwrap();
    let lambdas: Vec<u64> = levels.iter().map(|l| l["lambda"].as_u64().unwrap()).collect();
    assert_eq!(lambdas, [1, 4, 9, 16]);
    assert!(levels.iter().all(|l| l["dim"] == 2));
}

#[test]
fn six_sphere_spectrum() {
    let o = run(&["spectrum", "--k", "1", "--max-level", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let dims: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(3).unwrap().to_string()).collect();
    assert_eq!(dims, ["20", "90", "252"]);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["spectrum", "--k", "0", "--max-level", "0"]).status.code(), Some(1));
    assert_eq!(run(&["blocks", "--k", "1", "--lambda", "1"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--k", "x"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn block_dimensions() {
    let o = run(&["blocks", "--k", "1", "--lambda", "0", "--max-level", "1", "--trunc", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["dim"], 1);
    assert_eq!(v["unit"], "pi^{2k+1}");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    let o = run(&["blocks", "--k", "0", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["dim"], 0);
    assert_eq!(json(&o)["N"], 3);
    assert_eq!(json(&o)["D"], 4);
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "--suite", "stokes", "--k", "0", "--trials", "100", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let s = &json(&o)["suites"][0];
    assert_eq!((s["trials"].as_u64(), s["passed"].as_u64()), (Some(100), Some(100)));

    let o = run(&["verify", "--suite", "projective", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let s = &json(&o)["suites"][0];
    assert_eq!((s["trials"].as_u64(), s["passed"].as_u64()), (Some(50), Some(50)));
}

#[test]
fn reports_are_identical_across_thread_counts() {
    let base = ["verify", "--suite", "all", "--k", "0", "--trials", "20"];
    let one = run(&[&base[..], &["--threads", "1"]].concat());
    let four = run(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);

    let a = run(&["split", "--k", "0", "--max-level", "3", "--threads", "1"]);
    let b = run(&["split", "--k", "0", "--max-level", "3", "--threads", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_out_path() {
    let dir = std::env::temp_dir().join(format!("chiral-blocks-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    let out = dir.join("report.csv");
    std::fs::write(
        &cfg,
        format!("# spectrum run\nk=0\nmax-level=2\nformat=csv\nmode=crosscheck\nout={}\n", out.display()),
    )
    .unwrap();
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--max-level", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].ends_with("gram_min_eig_f64"));
    // 17 significant digits
    let x = lines[1].rsplit(',').next().unwrap();
    assert_eq!(x.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn split_report_schema() {
    let o = run(&["split", "--k", "0", "--max-level", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let level = &json(&o)["levels"][0];
    assert_eq!(level["dim"], 2);
    assert_eq!(level["dim_chiral"], 1);
    assert_eq!(level["gram_unit"], "pi^{n/2}");
}
