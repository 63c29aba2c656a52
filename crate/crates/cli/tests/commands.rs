use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use evrgbd::io::{load_events, load_tagged, save_depth_png, save_events, save_tagged, TaggedFile};
use evrgbd::patterns::PatternManifest;
use evrgbd::recon::DepthFrame;
use evrgbd::simulator::{Edge, EventRecord, EventStream, Polarity};
use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn evrgbd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evrgbd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = evrgbd(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn summary_value(summary: &str, key: &str) -> String {
    summary
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {summary}"))
        .to_string()
}

fn scene(name: &str) -> String {
    configs()
        .join("scenes")
        .join(format!("{name}.toml"))
        .to_str()
        .unwrap()
        .to_string()
}

/// Runs `simulate` for a plane and returns the output directory.
fn simulate_plane(extra: &[&str]) -> TempDir {
    let dir = TempDir::new().unwrap();
    let plane = scene("plane");
    let mut args = vec!["simulate", "--scene", &plane, "--out", path(dir.path())];
    args.extend_from_slice(extra);
    ok(&args);
    dir
}

#[test]
fn patterns_mode_four_writes_seventy_entries() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&[
        "patterns",
        "--mode",
        "4",
        "--n",
        "23",
        "--out",
        path(dir.path()),
    ]);
    assert!(stdout.contains("70 entries"), "{stdout}");
    let m = PatternManifest::load(dir.path().join("manifest.json")).unwrap();
    assert_eq!(m.entries.len(), 70);
    assert!(m.coverage.is_some());
    for e in &m.entries {
        assert!(dir.path().join(&e.bitmap).is_file());
    }
    assert!(dir.path().join("run.toml").is_file());
    assert!(!dir.path().join("dmd_000.png").exists());
}

#[test]
fn patterns_mode_one_and_diamond_bitmaps() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "patterns",
        "--mode",
        "1",
        "--diamond",
        "--out",
        path(dir.path()),
    ]);
    let m = PatternManifest::load(dir.path().join("manifest.json")).unwrap();
    assert_eq!(m.entries.len(), 4);
    assert!(m.coverage.is_none());
    for i in 0..4 {
        assert!(dir.path().join(format!("dmd_{i:03}.png")).is_file());
    }
}

#[test]
fn patterns_rejects_zero_lines() {
    let dir = TempDir::new().unwrap();
    let out = evrgbd(&[
        "patterns",
        "--mode",
        "2",
        "--n",
        "0",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));
}

#[test]
fn patterns_rejects_bad_mode() {
    let dir = TempDir::new().unwrap();
    let out = evrgbd(&["patterns", "--mode", "5", "--out", path(dir.path())]);
    assert!(!out.status.success());
}

#[test]
fn simulate_single_line_has_two_rising_edges() {
    let dir = simulate_plane(&["--mode", "2", "--n", "1"]);
    let stream = load_events(dir.path().join("events.evst")).unwrap();
    let rising = stream
        .triggers
        .iter()
        .filter(|t| t.edge == Edge::Rising)
        .count();
    assert_eq!(rising, 2);
    assert!(dir.path().join("patterns/manifest.json").is_file());
    assert!(dir.path().join("run.toml").is_file());
}

#[test]
fn simulate_is_byte_identical_under_a_seed() {
    let noisy = [
        "--mode",
        "2",
        "--n",
        "5",
        "--background-rate",
        "100000",
        "--drop-probability",
        "0.1",
        "--seed",
        "7",
    ];
    let a = simulate_plane(&noisy);
    let b = simulate_plane(&noisy);
    let read = |d: &TempDir| std::fs::read(d.path().join("events.evst")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn simulate_event_count_matches_lit_pixels() {
    let dir = simulate_plane(&["--mode", "4", "--n", "23"]);
    let stream = load_events(dir.path().join("events.evst")).unwrap();

    // Counting oracle: every lit pixel of each depth line fires K_max ON
    // events in each of the three channel blocks on a white plane.
    let b = evrgbd::geometry::CalibrationBundle::reference();
    let scene = evrgbd::simulator::SceneModel::load(scene("plane")).unwrap();
    let (patterns, _) =
        evrgbd::patterns::generate_line_pattern((912, 1140), 23, 2, (56, 856)).unwrap();
    let lit: usize = patterns
        .iter()
        .map(|p| {
            evrgbd::simulator::lit_pixels(
                &scene,
                &b.camera,
                &b.projector,
                &b.extrinsics,
                p,
                evrgbd::Execution::Sequential,
            )
            .len()
        })
        .sum();
    assert!(lit > 0);
    assert_eq!(stream.on_event_count(), lit * 4 * 3);
}

#[test]
fn simulate_reports_missing_scene() {
    let dir = TempDir::new().unwrap();
    let out = evrgbd(&[
        "simulate",
        "--scene",
        "/nonexistent/scene.toml",
        "--out",
        path(dir.path()),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("scene"));
}

#[test]
fn tag_simulated_stream_tags_nearly_everything() {
    let dir = simulate_plane(&["--mode", "4", "--n", "23"]);
    let d = dir.path();
    let out = d.join("tagged");
    let stdout = ok(&[
        "tag",
        "--events",
        path(&d.join("events.evst")),
        "--manifest",
        path(&d.join("patterns/manifest.json")),
        "--out",
        path(&out),
    ]);
    let stats = json(&out.join("tag_stats.json"));
    let stream = load_events(d.join("events.evst")).unwrap();
    let tagged = stats["tagged"].as_u64().unwrap() as f64;
    assert!(tagged >= 0.99 * stream.on_event_count() as f64, "{stdout}");
    let file = load_tagged(out.join("tagged.evtg")).unwrap();
    assert_eq!(file.events.len() as f64, tagged);
}

#[test]
fn tag_without_triggers_rejects_everything() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(&["patterns", "--mode", "2", "--n", "3", "--out", path(d)]);
    let events = (0..100)
        .map(|i| EventRecord {
            x: i % 640,
            y: i % 480,
            t: i as u64 * 10,
            polarity: Polarity::On,
        })
        .collect();
    let stream = EventStream {
        width: 640,
        height: 480,
        start_time: 0,
        events,
        triggers: vec![],
    };
    save_events(d.join("bare.evst"), &stream).unwrap();
    ok(&[
        "tag",
        "--events",
        path(&d.join("bare.evst")),
        "--manifest",
        path(&d.join("manifest.json")),
        "--out",
        path(&d.join("t")),
    ]);
    let stats = json(&d.join("t/tag_stats.json"));
    assert_eq!(stats["tagged"], 0);
    assert_eq!(stats["idle"], 100);
}

#[test]
fn tag_rejects_corrupted_magic() {
    let dir = simulate_plane(&["--mode", "2", "--n", "1"]);
    let d = dir.path();
    let mut bytes = std::fs::read(d.join("events.evst")).unwrap();
    bytes[0] ^= 0xFF;
    std::fs::write(d.join("bad.evst"), bytes).unwrap();
    let out = evrgbd(&[
        "tag",
        "--events",
        path(&d.join("bad.evst")),
        "--manifest",
        path(&d.join("patterns/manifest.json")),
        "--out",
        path(&d.join("t")),
    ]);
    assert!(!out.status.success());
}

fn tagged_plane(target_us: &str) -> TempDir {
    let dir = simulate_plane(&["--mode", "4", "--n", "23", "--target-us", target_us]);
    let d = dir.path();
    ok(&[
        "tag",
        "--events",
        path(&d.join("events.evst")),
        "--manifest",
        path(&d.join("patterns/manifest.json")),
        "--out",
        path(d),
    ]);
    dir
}

fn frame_sets(dir: &Path) -> usize {
    json(&dir.join("windows.json")).as_array().unwrap().len()
}

#[test]
fn reconstruct_one_padded_sequence_is_one_frame() {
    let dir = tagged_plane("17230");
    let d = dir.path();
    let frames = d.join("frames");
    for window in ["17230", "1000000"] {
        ok(&[
            "reconstruct",
            "--tagged",
            path(&d.join("tagged.evtg")),
            "--window-us",
            window,
            "--out",
            path(&frames),
        ]);
        assert_eq!(frame_sets(&frames), 1, "window {window}");
    }
    for name in [
        "frame_0000_depth.png",
        "frame_0000_color.png",
        "frame_0000_temporal.png",
        "frame_0000.ply",
    ] {
        assert!(frames.join(name).is_file(), "{name}");
    }
    ok(&[
        "reconstruct",
        "--tagged",
        path(&d.join("tagged.evtg")),
        "--window-us",
        "8000",
        "--out",
        path(&d.join("f8")),
    ]);
    assert_eq!(frame_sets(&d.join("f8")), 3);
}

#[test]
fn reconstruct_empty_file_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let file = TaggedFile {
        width: 640,
        height: 480,
        start_time: 0,
        events: vec![],
    };
    save_tagged(d.join("empty.evtg"), &file).unwrap();
    let stdout = ok(&[
        "reconstruct",
        "--tagged",
        path(&d.join("empty.evtg")),
        "--window-us",
        "1000",
        "--out",
        path(&d.join("f")),
    ]);
    assert!(stdout.starts_with("0 frame set"), "{stdout}");
    assert_eq!(frame_sets(&d.join("f")), 0);
}

fn depth_png(dir: &Path, name: &str, w: usize, h: usize, f: impl Fn(usize, usize) -> f64) {
    let mut frame = DepthFrame::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            frame.set(x, y, f(x, y));
        }
    }
    save_depth_png(dir.join(name), &frame).unwrap();
}

#[test]
fn evaluate_identical_dirs_is_perfect() {
    let dir = tagged_plane("17230");
    let d = dir.path();
    let frames = d.join("frames");
    ok(&[
        "reconstruct",
        "--tagged",
        path(&d.join("tagged.evtg")),
        "--window-us",
        "17230",
        "--out",
        path(&frames),
    ]);
    ok(&[
        "evaluate",
        "--frames",
        path(&frames),
        "--gt",
        path(&frames),
        "--out",
        path(d),
    ]);
    let m = json(&d.join("metrics.json"));
    let f = &m["frames"][0];
    assert_eq!(f["fill_rate"], 100.0);
    assert_eq!(f["rmse"], 0.0);
    assert_eq!(f["psnr"], "inf");
    assert_eq!(f["window"], serde_json::json!([0, 17230]));
}

#[test]
fn evaluate_half_coverage() {
    let dir = TempDir::new().unwrap();
    let (frames, gt) = (dir.path().join("frames"), dir.path().join("gt"));
    std::fs::create_dir_all(&frames).unwrap();
    std::fs::create_dir_all(&gt).unwrap();
    depth_png(&gt, "gt_depth.png", 8, 4, |_, _| 1500.0);
    depth_png(&frames, "frame_0000_depth.png", 8, 4, |x, _| {
        if x < 4 {
            1500.0
        } else {
            0.0
        }
    });
    depth_png(&frames, "frame_0001_depth.png", 8, 4, |_, y| {
        if y < 2 {
            1510.0
        } else {
            0.0
        }
    });
    let stdout = ok(&["evaluate", "--frames", path(&frames), "--gt", path(&gt)]);
    let m = json(&frames.join("metrics.json"));
    assert_eq!(m["frames"][0]["fill_rate"], 50.0);
    assert_eq!(m["frames"][1]["fill_rate"], 50.0);
    assert_eq!(m["frames"][1]["rmse"], 10.0);
    assert_eq!(m["summary"]["frames"], 2);
    assert!(stdout.contains("fill_rate: 50.0000"), "{stdout}");
}

#[test]
fn evaluate_errors() {
    let dir = TempDir::new().unwrap();
    let (frames, gt) = (dir.path().join("frames"), dir.path().join("gt"));
    std::fs::create_dir_all(&frames).unwrap();
    std::fs::create_dir_all(&gt).unwrap();
    depth_png(&frames, "frame_0000_depth.png", 8, 4, |_, _| 1500.0);
    let none = evrgbd(&["evaluate", "--frames", path(&frames), "--gt", path(&gt)]);
    assert!(!none.status.success());
    assert!(String::from_utf8_lossy(&none.stderr).contains("no frame"));

    depth_png(&gt, "gt_depth.png", 4, 4, |_, _| 1500.0);
    let dims = evrgbd(&["evaluate", "--frames", path(&frames), "--gt", path(&gt)]);
    assert!(!dims.status.success());
}

#[test]
fn oracle_writes_ground_truth() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&[
        "oracle",
        "--scene",
        &scene("sphere"),
        "--mode",
        "2",
        "--n",
        "45",
        "--out",
        path(dir.path()),
    ]);
    for name in [
        "gt_depth.png",
        "gt_depth_full.png",
        "gt_color.png",
        "run.toml",
    ] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let full = evrgbd::io::load_depth_png(dir.path().join("gt_depth_full.png")).unwrap();
    assert_eq!(full.get(320, 240), 1200.0);
    assert!(stdout.contains("307200 pixels with depth"), "{stdout}");
}

fn pipeline(config: &str, extra: &[&str]) -> (TempDir, String) {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join(config);
    let mut args = vec![
        "pipeline",
        "--config",
        path(&cfg),
        "--out",
        path(dir.path()),
    ];
    args.extend_from_slice(extra);
    let stdout = ok(&args);
    (dir, stdout)
}

#[test]
fn pipeline_plane_summary() {
    let (dir, summary) = pipeline("plane.toml", &[]);
    let fr: f64 = summary_value(&summary, "fill_rate").parse().unwrap();
    let rmse: f64 = summary_value(&summary, "rmse").parse().unwrap();
    assert!(fr > 95.0, "{summary}");
    assert!(rmse < 10.0, "{summary}");
    assert_eq!(summary_value(&summary, "psnr"), "inf");
    let d = dir.path();
    for name in [
        "run.toml",
        "events.evst",
        "tagged.evtg",
        "metrics.json",
        "summary.txt",
        "gt/gt_depth.png",
        "frames/frame_0000_depth.png",
        "patterns/manifest.json",
    ] {
        assert!(d.join(name).is_file(), "{name}");
    }

    // The resolved config reproduces the run.
    let (_, again) = pipeline("plane.toml", &[]);
    assert_eq!(summary, again);
    let (_, replay) = {
        let dir2 = TempDir::new().unwrap();
        let out = ok(&[
            "pipeline",
            "--config",
            path(&d.join("run.toml")),
            "--out",
            path(dir2.path()),
        ]);
        (dir2, out)
    };
    assert_eq!(summary, replay);
}

#[test]
fn pipeline_fewer_lines_fill_faster() {
    let fr = |n: &str, target: &str| {
        let (dir, _) = pipeline(
            "plane.toml",
            &[
                "--mode",
                "3",
                "--n",
                n,
                "--target-us",
                target,
                "--window-us",
                "8000",
            ],
        );
        json(&dir.path().join("metrics.json"))["frames"][0]["fill_rate"]
            .as_f64()
            .unwrap()
    };
    let (fr23, fr45) = (fr("23", "7400"), fr("45", "12570"));
    assert!(fr23 > fr45, "FR23 {fr23} FR45 {fr45}");
}

#[test]
fn pipeline_noisy_seed_is_reproducible() {
    let (_, a) = pipeline("staircase_noisy.toml", &["--seed", "11"]);
    let (_, b) = pipeline("staircase_noisy.toml", &["--seed", "11"]);
    assert_eq!(a, b);
    assert_eq!(summary_value(&a, "frames"), "2");
}

#[test]
fn pipeline_stops_at_first_failing_stage() {
    let dir = TempDir::new().unwrap();
    let out = evrgbd(&[
        "pipeline",
        "--scene",
        &scene("plane"),
        "--calibration",
        "/nonexistent.toml",
        "--out",
        path(dir.path()),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("calibration"));
}
