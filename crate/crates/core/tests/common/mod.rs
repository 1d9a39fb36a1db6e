#![allow(dead_code)]

use std::path::{Path, PathBuf};

use clap::Parser;
use surfacenav::cli::{run, Args};

pub const FIXTURES: [&str; 5] = [
    "walk_spectral",
    "tour_surface",
    "review_lock",
    "axes_verbosity",
    "mute_export",
];

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// CLI arguments from the script's leading `# args:` line, with `--input`
/// resolved against the fixtures directory.
pub fn fixture_args(name: &str) -> Vec<String> {
    let script = fixtures_dir().join(format!("{name}.script"));
    let text = std::fs::read_to_string(&script).unwrap();
    let header = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# args:"))
        .unwrap();
    let mut args = vec!["surfacenav".to_string()];
    let mut words = header.split_whitespace();
    while let Some(w) = words.next() {
        args.push(w.to_string());
        if w == "--input" {
            args.push(
                fixtures_dir()
                    .join(words.next().unwrap())
                    .display()
                    .to_string(),
            );
        }
    }
    args.push("--script".into());
    args.push(script.display().to_string());
    args
}

/// Replays a fixture through the CLI driver and returns its transcript.
pub fn replay(name: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("transcript.jsonl");
    let mut args = fixture_args(name);
    args.push("--transcript".into());
    args.push(out.display().to_string());
    run(&Args::parse_from(args), &mut std::io::sink()).unwrap();
    std::fs::read_to_string(out).unwrap()
}

pub fn golden_path(name: &str) -> PathBuf {
    fixtures_dir().join(format!("{name}.golden"))
}

/// Double-double value `hi + lo`, enough precision to serve as ground truth
/// for f64 statistics.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn from(v: f64) -> Self {
        Dd(v, 0.0)
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.0 + o.0;
        let bb = s - self.0;
        let err = (self.0 - (s - bb)) + (o.0 - bb);
        Dd::norm(s, err + self.1 + o.1)
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let err = self.0.mul_add(o.0, -p);
        Dd::norm(p, err + self.0 * o.1 + self.1 * o.0)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q = self.0 / d;
        let r = self.add(Dd::from(q).mul(Dd::from(d)).neg());
        Dd::norm(q, r.0 / d)
    }

    fn norm(hi: f64, lo: f64) -> Dd {
        let s = hi + lo;
        Dd(s, lo - (s - hi))
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }
}

/// Brute-force statistics: direct central moments carried in double-double.
#[derive(Debug, Clone, PartialEq)]
pub struct Brute {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub mode: Option<f64>,
    pub variance: f64,
    pub std_dev: f64,
    pub range: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

pub fn brute_stats(values: &[f64]) -> Brute {
    let n = values.len() as f64;
    let mut sum = Dd::from(0.0);
    for &v in values {
        sum = sum.add(Dd::from(v));
    }
    let mean = sum.div_f64(n);
    let (mut m2, mut m3, mut m4) = (Dd::from(0.0), Dd::from(0.0), Dd::from(0.0));
    for &v in values {
        let d = Dd::from(v).add(mean.neg());
        let d2 = d.mul(d);
        m2 = m2.add(d2);
        m3 = m3.add(d2.mul(d));
        m4 = m4.add(d2.mul(d2));
    }
    let (m2, m3, m4) = (
        m2.div_f64(n).value(),
        m3.div_f64(n).value(),
        m4.div_f64(n).value(),
    );
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = s.len();
    let median = if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    };
    let mut mode = None;
    let mut best = 1;
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j < k && s[j] == s[i] {
            j += 1;
        }
        if j - i > best {
            best = j - i;
            mode = Some(s[i]);
        }
        i = j;
    }
    let variance = if k > 1 { m2 * n / (n - 1.0) } else { 0.0 };
    Brute {
        count: k,
        min: s[0],
        max: s[k - 1],
        mean: mean.value(),
        median,
        mode,
        variance,
        std_dev: variance.sqrt(),
        range: s[k - 1] - s[0],
        skewness: (m2 > 0.0).then(|| m3 / m2.powf(1.5)),
        kurtosis: (m2 > 0.0).then(|| m4 / (m2 * m2) - 3.0),
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
