//! End-to-end tests of the `seglab` binary: determinism, exit codes, file
//! outputs, and the synth -> segment -> eval pipeline.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seglab"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("seglab-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn seglab");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn synth_pc(dir: &Path, image: &str, truth: &str, size: u32, seed: u64) {
    run_ok(bin().args([
        "synth",
        "pc",
        "--regions",
        "2",
        "--size",
        &size.to_string(),
        "--seed",
        &seed.to_string(),
        "--image",
        dir.join(image).to_str().unwrap(),
        "--truth",
        dir.join(truth).to_str().unwrap(),
    ]));
}

#[test]
fn synth_is_file_identical_across_runs() {
    let dir = tmp_dir("synth-det");
    synth_pc(&dir, "a.pgm", "a_gt.pgm", 32, 5);
    synth_pc(&dir, "b.pgm", "b_gt.pgm", 32, 5);
    assert_eq!(
        std::fs::read(dir.join("a.pgm")).unwrap(),
        std::fs::read(dir.join("b.pgm")).unwrap()
    );
    assert_eq!(
        std::fs::read(dir.join("a_gt.pgm")).unwrap(),
        std::fs::read(dir.join("b_gt.pgm")).unwrap()
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn synth_junction_emits_requested_classes() {
    let dir = tmp_dir("synth-junction");
    run_ok(bin().args([
        "synth",
        "junction",
        "--regions",
        "5",
        "--size",
        "96",
        "--image",
        dir.join("j.pgm").to_str().unwrap(),
        "--truth",
        dir.join("j_gt.pgm").to_str().unwrap(),
    ]));
    let truth = seglab::io::load_label_map(dir.join("j_gt.pgm")).unwrap();
    assert_eq!(truth.max_label(), Some(4));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn synth_rects_noiseless_has_four_flat_regions() {
    let dir = tmp_dir("synth-rects");
    run_ok(bin().args([
        "synth",
        "rects",
        "--size",
        "48",
        "--sigmas",
        "0,0,0,0",
        "--image",
        dir.join("r.ppm").to_str().unwrap(),
        "--truth",
        dir.join("r_gt.pgm").to_str().unwrap(),
    ]));
    let truth = seglab::io::load_label_map(dir.join("r_gt.pgm")).unwrap();
    assert_eq!(truth.max_label(), Some(3));
    let image = seglab::io::load_image(dir.join("r.ppm")).unwrap();
    assert_eq!(image.channels(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn segment_twice_is_byte_identical() {
    let dir = tmp_dir("segment-det");
    synth_pc(&dir, "img.pgm", "gt.pgm", 32, 3);
    for out in ["one", "two"] {
        run_ok(bin().args([
            "segment",
            "--input",
            dir.join("img.pgm").to_str().unwrap(),
            "--labels",
            "2",
            "--seed",
            "7",
            "--max-iters",
            "60",
            "--output",
            dir.join(format!("{out}.png")).to_str().unwrap(),
            "--diagnostics",
            dir.join(format!("{out}.csv")).to_str().unwrap(),
        ]));
    }
    for ext in ["png", "pgm", "csv"] {
        assert_eq!(
            std::fs::read(dir.join(format!("one.{ext}"))).unwrap(),
            std::fs::read(dir.join(format!("two.{ext}"))).unwrap(),
            "{ext} outputs differ between identical runs"
        );
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn segment_pipeline_recovers_phantom() {
    let dir = tmp_dir("pipeline");
    synth_pc(&dir, "img.pgm", "gt.pgm", 48, 1);
    run_ok(bin().args([
        "segment",
        "--input",
        dir.join("img.pgm").to_str().unwrap(),
        "--labels",
        "2",
        "--seed",
        "1",
        "--output",
        dir.join("labels.png").to_str().unwrap(),
        "--soft-fields",
        dir.join("soft").to_str().unwrap(),
    ]));
    assert!(dir.join("soft/label_0.pgm").exists());
    assert!(dir.join("soft/label_1.pgm").exists());
    let out = run_ok(bin().args([
        "eval",
        "--pred",
        dir.join("labels.pgm").to_str().unwrap(),
        "--truth",
        dir.join("gt.pgm").to_str().unwrap(),
        "--json",
    ]));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("\"pixel_accuracy\":1.000000"),
        "expected perfect recovery, got {text}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_matches_on_identical_and_permuted_maps() {
    let dir = tmp_dir("eval");
    synth_pc(&dir, "img.pgm", "gt.pgm", 24, 2);
    // identical maps score 1.0 everywhere
    let out = run_ok(bin().args([
        "eval",
        "--pred",
        dir.join("gt.pgm").to_str().unwrap(),
        "--truth",
        dir.join("gt.pgm").to_str().unwrap(),
    ]));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("precision 1.000000"));
    assert!(text.contains("f_measure 1.000000"));

    // a permuted prediction scores identically to the unpermuted one
    let truth = seglab::io::load_label_map(dir.join("gt.pgm")).unwrap();
    let permuted = seglab::LabelMap::from_vec(
        truth.width(),
        truth.height(),
        truth.data().iter().map(|&l| 1 - l).collect(),
    )
    .unwrap();
    seglab::io::write_label_map(&permuted, dir.join("perm.pgm")).unwrap();
    let out2 = run_ok(bin().args([
        "eval",
        "--pred",
        dir.join("perm.pgm").to_str().unwrap(),
        "--truth",
        dir.join("gt.pgm").to_str().unwrap(),
    ]));
    assert_eq!(out.stdout, out2.stdout);

    // CSV append writes a header once
    for _ in 0..2 {
        run_ok(bin().args([
            "eval",
            "--pred",
            dir.join("gt.pgm").to_str().unwrap(),
            "--truth",
            dir.join("gt.pgm").to_str().unwrap(),
            "--csv",
            dir.join("scores.csv").to_str().unwrap(),
        ]));
    }
    let csv = std::fs::read_to_string(dir.join("scores.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "precision,recall,f_measure,pixel_accuracy");
    assert_eq!(lines[1], lines[2]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_input_exits_3_and_names_the_path() {
    let out = bin()
        .args([
            "segment",
            "--input",
            "/nonexistent/missing_image.pgm",
            "--labels",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing_image.pgm"), "stderr: {err}");
}

#[test]
fn usage_errors_exit_2() {
    // clap-level: unknown flag
    let out = bin().args(["segment", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // parameter-level: labels < 2
    let out = bin()
        .args(["segment", "--input", "x.pgm", "--labels", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // eval size mismatch
    let dir = tmp_dir("mismatch");
    synth_pc(&dir, "a.pgm", "a_gt.pgm", 24, 1);
    synth_pc(&dir, "b.pgm", "b_gt.pgm", 32, 1);
    let out = bin()
        .args([
            "eval",
            "--pred",
            dir.join("a_gt.pgm").to_str().unwrap(),
            "--truth",
            dir.join("b_gt.pgm").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn thread_cap_env_var_is_honored() {
    let dir = tmp_dir("threads");
    synth_pc(&dir, "img.pgm", "gt.pgm", 24, 4);
    let mut cmd = bin();
    cmd.env("SEGLAB_THREADS", "1").args([
        "segment",
        "--input",
        dir.join("img.pgm").to_str().unwrap(),
        "--labels",
        "2",
        "--max-iters",
        "30",
        "--output",
        dir.join("capped.png").to_str().unwrap(),
    ]);
    run_ok(&mut cmd);
    // and a bad value is a usage error
    let out = bin()
        .env("SEGLAB_THREADS", "zero")
        .args(["eval", "--pred", "a", "--truth", "b"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn diagnostics_csv_matches_golden_schema() {
    let dir = tmp_dir("golden");
    synth_pc(&dir, "img.pgm", "gt.pgm", 16, 9);
    run_ok(bin().args([
        "segment",
        "--input",
        dir.join("img.pgm").to_str().unwrap(),
        "--labels",
        "2",
        "--seed",
        "9",
        "--max-iters",
        "5",
        "--output",
        dir.join("labels.png").to_str().unwrap(),
        "--diagnostics",
        dir.join("diag.csv").to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(dir.join("diag.csv")).unwrap();
    let golden = include_str!("golden/diag_16x16_seed9.csv");
    assert_eq!(csv, golden, "diagnostics CSV drifted from the golden file");
    std::fs::remove_dir_all(&dir).ok();
}
