use std::path::Path;
use std::process::{Command, Output};

use surfacenav::narrate::describe_stats;
use surfacenav::plotdata::{
    dataset_stats, generate_sample, parse_dataset, Format, KindHint, SampleConfig, SampleKind,
};

fn surfacenav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surfacenav"))
        .args(args)
        .output()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn stats_output_matches_library_panel() {
    let out = surfacenav(&["--sample", "spectral", "--stats", "--script", "/dev/null"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let d = generate_sample(SampleKind::Spectral, &SampleConfig::spectral()).unwrap();
    let expected = format!("{}\n", describe_stats(&d, &dataset_stats(&d).unwrap()));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn default_tour_transcript_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for p in [&a, &b] {
        let out = surfacenav(&["--sample", "sinusoidal", "--transcript", path_str(p)]);
        assert!(out.status.success());
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let steps = String::from_utf8(text)
        .unwrap()
        .matches(r#""type":"autoplayStep""#)
        .count();
    assert_eq!(steps, 1024);
}

#[test]
fn tour_wav_lasts_one_interval_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("tour.wav");
    let out = surfacenav(&[
        "--sample",
        "sinusoidal",
        "--wav",
        path_str(&wav),
        "--sample-rate",
        "8000",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let reader = hound::WavReader::open(&wav).unwrap();
    let seconds = reader.duration() as f64 / reader.spec().sample_rate as f64;
    let expected = 1024.0 * 0.125;
    assert!((seconds - expected).abs() / expected < 0.01, "{seconds}");
}

#[test]
fn export_writes_a_parseable_file() {
    let dir = tempfile::tempdir().unwrap();
    for (fmt, format) in [("csv", Format::Csv), ("json", Format::Json)] {
        let target = dir.path().join(format!("out.{fmt}"));
        let out = surfacenav(&[
            "--sample",
            "spectral",
            "--export",
            fmt,
            path_str(&target),
            "--script",
            "/dev/null",
        ]);
        assert!(out.status.success());
        let back = parse_dataset(&std::fs::read(&target).unwrap(), format, KindHint::Auto).unwrap();
        let d = generate_sample(SampleKind::Spectral, &SampleConfig::spectral()).unwrap();
        assert!(back.canonical_eq(&d));
    }
}

#[test]
fn input_file_round_trips_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("levels.csv");
    std::fs::write(&input, "0,1,0\n0,2,1\n1,3,0\n1,4,1\n").unwrap();
    let out = surfacenav(&[
        "--input",
        path_str(&input),
        "--stats",
        "--script",
        "/dev/null",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.starts_with("Dataset: levels (surface)\n"),
        "{stdout}"
    );
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad_script = dir.path().join("bad.script");
    std::fs::write(&bad_script, "move sideways\n").unwrap();
    let bad_csv = dir.path().join("bad.csv");
    std::fs::write(&bad_csv, "1,2\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec![],
        vec!["--sample", "sinusoidal", "--input", "x.csv"],
        vec!["--input", "/nonexistent/data.csv"],
        vec!["--input", path_str(&bad_csv)],
        vec!["--sample", "spectral", "--script", path_str(&bad_script)],
        vec!["--sample", "spectral", "--intelligent"],
        vec!["--sample", "spectral", "--bins", "0"],
        vec!["--sample", "spectral", "--export", "xml", "out.xml"],
    ];
    for args in cases {
        let out = surfacenav(&args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty(), "{args:?} printed nothing");
    }
}
