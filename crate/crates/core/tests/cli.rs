use std::ffi::OsStr;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn ctsev<S: AsRef<OsStr> + std::fmt::Debug>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctsev"))
        .args(args)
        .env_remove("CTSEV_THREADS")
        .output()
        .expect("spawn ctsev")
}

fn ok<S: AsRef<OsStr> + std::fmt::Debug>(args: &[S]) -> Output {
    let out = ctsev(args);
    assert!(
        out.status.success(),
        "ctsev {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small labeled corpus: `per_class` scans per class of 9 slices at 96 px.
fn corpus(dir: &Path, per_class: usize) -> PathBuf {
    let root = dir.join("corpus");
    ok(&[
        "phantom", "-o", s(&root), "--per-class", &per_class.to_string(), "--seed", "3", "--slices", "9",
        "--size", "96",
    ]);
    root
}

fn featurize(root: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<&OsStr> = extra.iter().map(OsStr::new).collect();
    let (scans, masks, labels) = (root.join("scans"), root.join("lung_masks"), root.join("manifest.csv"));
    for a in ["featurize", "--scan-root"] {
        args.push(OsStr::new(a));
    }
    args.push(scans.as_os_str());
    args.push(OsStr::new("--mask-root"));
    args.push(masks.as_os_str());
    args.push(OsStr::new("--labels"));
    args.push(labels.as_os_str());
    args.push(OsStr::new("-o"));
    args.push(out.as_os_str());
    ok(&args)
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

#[test]
fn segment_writes_one_row_per_slice() {
    let tmp = tempfile::tempdir().unwrap();
    let root = corpus(tmp.path(), 1);
    let scan = root.join("scans/ph0000");
    let out = tmp.path().join("seg");
    let debug = tmp.path().join("debug");
    ok(&[
        "segment", s(&scan), "--masks", s(&root.join("lung_masks/ph0000")), "-o", s(&out), "--write-masks",
        "--debug-dir", s(&debug),
    ]);
    let rates = fs::read_to_string(out.join("rates.csv")).unwrap();
    let mut lines = rates.lines();
    assert_eq!(lines.next().unwrap(), "slice_index,retained,left_rate,right_rate");
    assert_eq!(lines.count(), 9);
    assert_eq!(fs::read_dir(out.join("infection_masks")).unwrap().count(), 9);
    let names: Vec<String> = fs::read_dir(&debug)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    for suffix in ["_seg_img.png", "_ct_hyper.png", "_vessel_mask.png", "_infection_mask.png"] {
        assert!(names.iter().any(|n| n.ends_with(suffix)), "no {suffix} in {names:?}");
    }
    assert!(out.join("config.txt").exists());
}

#[test]
fn missing_scan_directory_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ctsev(&["segment", s(&tmp.path().join("nope")), "-o", s(&tmp.path().join("o"))]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("scan directory not found"), "{err}");
}

#[test]
fn invalid_arguments_exit_with_one() {
    assert_eq!(ctsev(&["train", "--features", "x.csv", "--model", "forest", "-o", "m"]).status.code(), Some(1));
    assert_eq!(ctsev(&["--threads", "0", "phantom", "-o", "/nonexistent/x"]).status.code(), Some(1));
    assert_eq!(ctsev(&["--set", "infection.sigma=-1", "phantom", "-o", "/nonexistent/x"]).status.code(), Some(1));
}

#[test]
fn featurize_one_row_per_scan_and_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let root = corpus(tmp.path(), 3);
    let a = tmp.path().join("a/features.csv");
    let b = tmp.path().join("b/features.csv");
    featurize(&root, &a, &[]);
    featurize(&root, &b, &["--threads", "1"]);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 1 + 12);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 82);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn fully_gated_scans_are_listed_as_exclusions() {
    let tmp = tempfile::tempdir().unwrap();
    let root = corpus(tmp.path(), 1);
    let out = tmp.path().join("features.csv");
    let res = featurize(&root, &out, &["--set", "gate.min_mask_area=1e9", "--set", "gate.large_area_fraction=1"]);
    assert!(String::from_utf8_lossy(&res.stdout).contains("4 excluded"));
    let ex = fs::read_to_string(tmp.path().join("features_exclusions.csv")).unwrap();
    assert_eq!(ex.lines().next().unwrap(), "id,reason");
    assert_eq!(ex.lines().count(), 5);
    assert!(ex.contains("ph0000,no retained slices"));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1);
}

#[test]
fn train_predict_and_evaluate() {
    let tmp = tempfile::tempdir().unwrap();
    let root = corpus(tmp.path(), 5);
    let features = tmp.path().join("features.csv");
    featurize(&root, &features, &[]);

    let m1 = tmp.path().join("m1/ert.model");
    let m2 = tmp.path().join("m2/ert.model");
    ok(&["train", "--features", s(&features), "--model", "ert", "-o", s(&m1)]);
    ok(&["--threads", "3", "train", "--features", s(&features), "--model", "ert", "-o", s(&m2)]);
    assert_eq!(digest(&m1), digest(&m2));

    let pred = tmp.path().join("pred.csv");
    ok(&["predict", "--model", s(&m1), "--features", s(&features), "-o", s(&pred)]);
    let text = fs::read_to_string(&pred).unwrap();
    assert_eq!(text.lines().next().unwrap(), "id,class,score_1,score_2,score_3,score_4");
    assert_eq!(text.lines().count(), 21);

    // a WAM file that agrees with the labels scores perfectly
    let labels = fs::read_to_string(root.join("manifest.csv")).unwrap();
    let mut wam = String::from("id,mean_score,class\n");
    for line in labels.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        wam.push_str(&format!("{},{}.0,{}\n", f[0], f[1], f[1]));
    }
    let wam_path = tmp.path().join("wam.csv");
    fs::write(&wam_path, wam).unwrap();
    let ev = tmp.path().join("ev");
    let out = ok(&[
        "evaluate", "--features", s(&features), "--models", "knn", "--test-size", "8", "--wam", s(&wam_path), "-o",
        s(&ev),
    ]);
    let report = fs::read_to_string(ev.join("report.csv")).unwrap();
    let f1_row = report.lines().find(|l| l.starts_with("F1 score")).unwrap();
    assert!(f1_row.ends_with(",1.000000"), "{f1_row}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("Precision"));
    assert_eq!(fs::read_to_string(ev.join("test_ids.csv")).unwrap().lines().count(), 9);
    assert!(ev.join("confusion_wam.csv").exists());
    assert!(ev.join("models/knn.model").exists());
}

#[test]
fn wam_subcommand_from_rates() {
    let tmp = tempfile::tempdir().unwrap();
    let root = corpus(tmp.path(), 1);
    let seg = tmp.path().join("seg/ph0003");
    ok(&["segment", s(&root.join("scans/ph0003")), "--masks", s(&root.join("lung_masks/ph0003")), "-o", s(&seg)]);
    let out = tmp.path().join("wam.csv");
    ok(&["wam", "--rates", s(&seg.join("rates.csv")), "-o", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "id,mean_score,class");
    assert!(text.lines().nth(1).unwrap().starts_with("ph0003,"));
}

#[test]
fn config_file_is_echoed_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let root = corpus(tmp.path(), 1);
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# test\ninfection.sigma = 2\nhyperbolization.c = 0.7\n").unwrap();
    let out = tmp.path().join("seg");
    ok(&[
        "--config", s(&cfg), "--set", "hyperbolization.c=0.9", "segment", s(&root.join("scans/ph0000")), "-o",
        s(&out),
    ]);
    let echo = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(echo.contains("infection.sigma = 2"), "{echo}");
    assert!(echo.contains("hyperbolization.c = 0.9"), "{echo}");
    assert!(!echo.contains("threads"));
}
