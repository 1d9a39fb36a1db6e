mod common;

use proptest::prelude::*;
use surfacenav::plotdata::{
    build_surface_grid, compute_stats, detect_header, export, generate_sample, parse_dataset,
    validate, AxisLabel, Dataset, DatasetKind, Format, KindHint, Point3, SampleConfig, SampleKind,
};

use common::{brute_stats as brute, rel_close as close};

fn rel_close(a: f64, b: f64) -> bool {
    close(a, b, 1e-9)
}

#[test]
fn skewed_fixture_matches_oracle() {
    let values = [1.0, 1.0, 2.0, 4.0];
    let b = brute(&values);
    let s = compute_stats(&values).unwrap();
    assert!(rel_close(s.mean, b.mean));
    assert_eq!(s.median, 1.5);
    assert_eq!(b.mode, Some(1.0));
    assert!(rel_close(s.variance, b.variance));
    assert!(rel_close(s.skewness.unwrap(), b.skewness.unwrap()));
    assert!((b.skewness.unwrap() - 0.8165).abs() < 5e-5);
    assert!(rel_close(s.kurtosis.unwrap(), b.kurtosis.unwrap()));
    assert!((b.kurtosis.unwrap() + 1.0).abs() < 1e-12);
}

fn label_strategy() -> impl Strategy<Value = AxisLabel> {
    (
        "[A-Za-z][A-Za-z0-9 ]{0,10}[A-Za-z0-9]",
        prop::option::of("[A-Za-z%/]{1,4}"),
    )
        .prop_map(|(name, unit)| AxisLabel::new(name, unit.unwrap_or_default()))
}

fn value_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        (-1e6..1e6f64).prop_map(|v| v.round()),
        (-1.0..1.0f64).prop_map(|v| v * 1e-9),
        (-1.0..1.0f64).prop_map(|v| v * 1e20),
    ]
}

fn point_dataset() -> impl Strategy<Value = Dataset> {
    (
        prop::collection::vec(
            (value_strategy(), value_strategy(), value_strategy()),
            1..60,
        ),
        [label_strategy(), label_strategy(), label_strategy()],
        "[a-z]{0,8}",
    )
        .prop_map(|(pts, labels, name)| {
            let pts = pts
                .into_iter()
                .map(|(x, y, z)| Point3::new(x, y, z))
                .collect();
            Dataset::from_points(DatasetKind::Point, pts, labels, name).unwrap()
        })
}

fn surface_dataset() -> impl Strategy<Value = Dataset> {
    (
        2usize..7,
        2usize..7,
        -5.0..5.0f64,
        [label_strategy(), label_strategy(), label_strategy()],
    )
        .prop_flat_map(|(nx, nz, shift, labels)| {
            prop::collection::vec(value_strategy(), nx * nz).prop_map(move |ys| {
                let mut pts = Vec::new();
                for i in 0..nx {
                    for j in 0..nz {
                        pts.push(Point3::new(
                            i as f64 * 0.5 + shift,
                            ys[i * nz + j],
                            j as f64 - shift,
                        ));
                    }
                }
                Dataset::from_points(DatasetKind::Surface, pts, labels.clone(), "grid").unwrap()
            })
        })
}

fn any_dataset() -> impl Strategy<Value = Dataset> {
    prop_oneof![point_dataset(), surface_dataset()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip_csv_and_json(d in any_dataset()) {
        let csv = parse_dataset(&export(&d, Format::Csv), Format::Csv, KindHint::from(d.kind)).unwrap();
        prop_assert!(csv.canonical_eq(&d));
        let json = parse_dataset(&export(&d, Format::Json), Format::Json, KindHint::Auto).unwrap();
        prop_assert!(json.canonical_eq(&d));
        prop_assert_eq!(&json.source_name, &d.source_name);
    }

    #[test]
    fn json_export_equals_direct_construction(d in point_dataset()) {
        let direct = serde_json::json!({
            "axes": d.labels().iter().map(|l| serde_json::json!({"name": l.name, "unit": l.unit})).collect::<Vec<_>>(),
            "points": d.points.iter().map(|p| vec![p.x, p.y, p.z]).collect::<Vec<_>>(),
            "kind": "point",
            "source_name": d.source_name,
        });
        let exported: serde_json::Value = serde_json::from_slice(&export(&d, Format::Json)).unwrap();
        prop_assert_eq!(exported, direct);
    }

    #[test]
    fn stats_match_brute_force(values in prop::collection::vec(prop_oneof![-1e3..1e3f64, (0i32..20).prop_map(f64::from)], 1..500)) {
        let s = compute_stats(&values).unwrap();
        let b = brute(&values);
        prop_assert!(rel_close(s.mean, b.mean));
        prop_assert_eq!(s.median, b.median);
        prop_assert!(rel_close(s.variance, b.variance));
        prop_assert!(rel_close(s.std_dev * s.std_dev, s.variance) || s.variance < 1e-300);
        prop_assert_eq!(s.range, b.range);
        prop_assert_eq!(s.mode, b.mode);
        match (s.skewness, b.skewness) {
            (Some(a), Some(e)) => prop_assert!(rel_close(a, e), "{a} vs {e}"),
            (a, e) => prop_assert_eq!(a, e),
        }
        match (s.kurtosis, b.kurtosis) {
            (Some(a), Some(e)) => prop_assert!(rel_close(a, e), "{a} vs {e}"),
            (a, e) => prop_assert_eq!(a, e),
        }
    }

    #[test]
    fn header_detection_is_order_insensitive(cells in prop::collection::vec(prop_oneof!["-?[0-9]{1,4}(\\.[0-9]{1,3})?", "[A-Za-z]{1,6}"], 3)) {
        let refs: Vec<&str> = cells.iter().map(String::as_str).collect();
        let expected = cells.iter().any(|c| c.parse::<f64>().is_err());
        let mut rev = refs.clone();
        rev.reverse();
        prop_assert_eq!(detect_header(&refs).is_header, expected);
        prop_assert_eq!(detect_header(&rev).is_header, expected);
    }

    #[test]
    fn grid_builds_iff_complete_lattice(
        nx in 1usize..5, nz in 1usize..5,
        drop in prop::collection::vec(any::<bool>(), 16),
    ) {
        let mut pts = Vec::new();
        for i in 0..nx {
            for j in 0..nz {
                if !drop[(i * 4 + j) % 16] || nx * nz < 4 {
                    pts.push(Point3::new(i as f64, (i * j) as f64, j as f64));
                }
            }
        }
        let distinct = |f: fn(&Point3) -> f64| {
            let mut v: Vec<f64> = pts.iter().map(f).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v.len()
        };
        let (dx, dz) = (distinct(|p| p.x), distinct(|p| p.z));
        let complete = pts.len() >= 4 && dx >= 2 && dz >= 2 && pts.len() == dx * dz;
        prop_assert_eq!(build_surface_grid(&pts).is_ok(), complete);
    }

    #[test]
    fn samples_always_validate(nx in 2usize..40, nz in 2usize..40, amp in -5.0..5.0f64, spectral in any::<bool>()) {
        let kind = if spectral { SampleKind::Spectral } else { SampleKind::Sinusoidal };
        let d = generate_sample(kind, &SampleConfig { nx, nz, amplitude: amp }).unwrap();
        prop_assert_eq!(d.points.len(), nx * nz);
        prop_assert!(validate(&d).is_valid());
    }
}

#[test]
fn spectral_lattice_cell_count_matches_oracle() {
    let d = generate_sample(SampleKind::Spectral, &SampleConfig::spectral()).unwrap();
    let mut xs: Vec<f64> = d.points.iter().map(|p| p.x).collect();
    let mut zs: Vec<f64> = d.points.iter().map(|p| p.z).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    assert_eq!(d.points.len(), 3116);
    assert_eq!((xs.len(), zs.len()), (82, 38));
    let grid = build_surface_grid(&d.points).unwrap();
    assert_eq!(grid.cell_count(), (xs.len() - 1) * (zs.len() - 1));
}

#[test]
fn complete_surface_validates_against_independent_lattice_check() {
    let d = generate_sample(
        SampleKind::Sinusoidal,
        &SampleConfig {
            nx: 7,
            nz: 5,
            amplitude: 2.0,
        },
    )
    .unwrap();
    let grid = d.grid.as_ref().unwrap();
    for p in &d.points {
        let i = grid.xs.iter().position(|&x| x == p.x).unwrap();
        let j = grid.zs.iter().position(|&z| z == p.z).unwrap();
        assert_eq!(grid.height(i, j), p.y);
    }
    assert!(validate(&d).is_valid());
}

#[test]
fn header_fixtures_with_and_without_labels() {
    let with = parse_dataset(
        b"Wavelength (nm),Intensity (AU),Time (min)\n1,2,3\n",
        Format::Csv,
        KindHint::Auto,
    )
    .unwrap();
    assert_eq!(with.points.len(), 1);
    assert_eq!(with.axes[1].name, "Intensity");
    let without = parse_dataset(b"1,2,3\n4,5,6\n", Format::Csv, KindHint::Auto).unwrap();
    assert_eq!(without.points.len(), 2);
    assert_eq!(without.axes[2].name, "Z");
    let partial = parse_dataset(b"time,2,3\n4,5,6\n", Format::Csv, KindHint::Auto).unwrap();
    assert_eq!(partial.points.len(), 1);
    assert_eq!(partial.axes[0].name, "time");
    assert_eq!(partial.axes[1].name, "Y");
}

#[test]
fn auto_kind_selects_surface_for_lattices() {
    let d = parse_dataset(b"0,1,0\n0,2,1\n1,3,0\n1,4,1\n", Format::Csv, KindHint::Auto).unwrap();
    assert_eq!(d.kind, DatasetKind::Surface);
    let d = parse_dataset(b"0,1,0\n0,2,1\n1,3,0\n", Format::Csv, KindHint::Auto).unwrap();
    assert_eq!(d.kind, DatasetKind::Point);
    assert!(parse_dataset(b"0,1,0\n0,2,1\n1,3,0\n", Format::Csv, KindHint::Surface).is_err());
}
