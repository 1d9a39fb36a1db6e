use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfacenav::navgrid::{
    build_segment_index, cycle_axis, element_position, elements, jump_segment, segment_of, step,
    Direction, NavConfig, NavEvent, NavMode, NavState, SegmentIndex,
};
use surfacenav::plotdata::{
    generate_sample, Axis, AxisLabel, Dataset, DatasetKind, Point3, SampleConfig, SampleKind,
};

const DIRS: [Direction; 4] = [
    Direction::Up,
    Direction::Down,
    Direction::Left,
    Direction::Right,
];

fn points_dataset(points: Vec<Point3>) -> Dataset {
    Dataset::from_points(DatasetKind::Point, points, AxisLabel::defaults(), "p").unwrap()
}

fn grid_dataset(nx: usize, nz: usize) -> Dataset {
    generate_sample(
        SampleKind::Sinusoidal,
        &SampleConfig {
            nx,
            nz,
            amplitude: 1.0,
        },
    )
    .unwrap()
}

fn dataset_strategy() -> impl Strategy<Value = (Dataset, NavMode)> {
    let coord = prop_oneof![(0i32..6).prop_map(f64::from), -50.0..50.0f64];
    let points =
        prop::collection::vec((coord.clone(), coord.clone(), coord), 1..80).prop_map(|v| {
            (
                points_dataset(
                    v.into_iter()
                        .map(|(x, y, z)| Point3::new(x, y, z))
                        .collect(),
                ),
                NavMode::Point,
            )
        });
    let grids = (2usize..9, 2usize..9, any::<bool>()).prop_map(|(nx, nz, surface)| {
        let mode = if surface {
            NavMode::Surface
        } else {
            NavMode::Point
        };
        (grid_dataset(nx, nz), mode)
    });
    prop_oneof![points, grids]
}

fn axis_strategy() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

fn state_at(index: &SegmentIndex, seg: usize, ord: usize) -> NavState {
    NavState {
        segment_index: seg,
        cursor: ord,
        focus: index.member(seg, ord),
        ..NavState::initial(index)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn segments_partition_elements((d, mode) in dataset_strategy(), axis in axis_strategy(), bins in 1usize..20) {
        let index = build_segment_index(&d, mode, axis, &NavConfig { default_bins: bins }).unwrap();
        let all = elements(&d, mode).unwrap();
        let mut seen = HashSet::new();
        for seg in &index.segments {
            prop_assert!(!seg.members.is_empty());
            for m in &seg.members {
                prop_assert!(seen.insert(*m), "element in two segments");
                let v = element_position(&d, *m).get(axis);
                prop_assert!(seg.lo <= v && v <= seg.hi);
            }
        }
        prop_assert_eq!(seen.len(), all.len());
        prop_assert!(index.len() <= bins);
        for w in index.segments.windows(2) {
            prop_assert!(w[0].hi <= w[1].lo);
        }
    }

    #[test]
    fn segment_of_matches_linear_scan((d, mode) in dataset_strategy(), axis in axis_strategy()) {
        let index = build_segment_index(&d, mode, axis, &NavConfig::default()).unwrap();
        for e in elements(&d, mode).unwrap() {
            let scan = index.segments.iter().enumerate().find_map(|(s, seg)| {
                seg.members.iter().position(|m| *m == e).map(|o| (s, o))
            });
            prop_assert_eq!(segment_of(&index, e).ok(), scan);
        }
    }

    #[test]
    fn moves_confined_and_reversible((d, mode) in dataset_strategy(), axis in axis_strategy(), seed in any::<u64>()) {
        let index = build_segment_index(&d, mode, axis, &NavConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seg = rng.gen_range(0..index.len());
        let ord = rng.gen_range(0..index.segments[seg].len());
        let state = state_at(&index, seg, ord);
        for dir in DIRS {
            let (next, events) = step(&state, dir, &index);
            prop_assert_eq!(next.segment_index, state.segment_index);
            if events == vec![NavEvent::BoundaryHit(dir)] {
                prop_assert_eq!(&next, &state);
            } else {
                prop_assert_eq!(&events, &vec![NavEvent::FocusChanged]);
                prop_assert_ne!(next.focus, state.focus);
                let (back, _) = step(&next, dir.opposite(), &index);
                prop_assert_eq!(&back, &state);
            }
        }
    }

    #[test]
    fn axis_cycle_has_period_three_and_keeps_focus((d, mode) in dataset_strategy(), seed in any::<u64>()) {
        let config = NavConfig::default();
        let index = build_segment_index(&d, mode, Axis::Y, &config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seg = rng.gen_range(0..index.len());
        let ord = rng.gen_range(0..index.segments[seg].len());
        let start = state_at(&index, seg, ord);
        let mut state = start.clone();
        let mut axes = Vec::new();
        for _ in 0..3 {
            let (next, idx, _) = cycle_axis(&state, &d, &config).unwrap();
            prop_assert_eq!(next.focus, start.focus);
            prop_assert_eq!(idx.member(next.segment_index, next.cursor), start.focus);
            axes.push(next.active_axis);
            state = next;
        }
        prop_assert_eq!(axes, vec![Axis::Z, Axis::X, Axis::Y]);
        prop_assert_eq!(state, start);
    }

    #[test]
    fn jump_transitions((d, mode) in dataset_strategy(), axis in axis_strategy(), seed in any::<u64>()) {
        let index = build_segment_index(&d, mode, axis, &NavConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seg = rng.gen_range(0..index.len());
        let ord = rng.gen_range(0..index.segments[seg].len());
        let state = state_at(&index, seg, ord);
        for delta in [-1isize, 1] {
            let (next, events) = jump_segment(&state, delta, &index);
            let target = seg as isize + delta;
            if target < 0 || target >= index.len() as isize {
                prop_assert_eq!(&next, &state);
                prop_assert!(matches!(events[..], [NavEvent::BoundaryHit(_)]));
            } else {
                prop_assert_eq!(next.segment_index, target as usize);
                prop_assert_eq!(next.cursor, 0);
                prop_assert_eq!(next.focus, index.member(target as usize, 0));
            }
        }
    }
}

#[test]
fn uniform_binning_matches_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts: Vec<Point3> = (0..1000)
        .map(|_| {
            Point3::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(-3.0..3.0),
            )
        })
        .collect();
    let d = points_dataset(pts.clone());
    let index = build_segment_index(&d, NavMode::Point, Axis::Y, &NavConfig::default()).unwrap();

    let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
    let min = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / 12.0;
    let mut expected: Vec<Vec<usize>> = vec![Vec::new(); 12];
    for (i, y) in ys.iter().enumerate() {
        let mut b = 11;
        for k in 0..12 {
            let hi = if k == 11 {
                max
            } else {
                min + width * (k + 1) as f64
            };
            if *y < hi || (k == 11 && *y <= hi) {
                b = k;
                break;
            }
        }
        expected[b].push(i);
    }
    expected.retain(|b| !b.is_empty());
    assert_eq!(index.len(), expected.len());
    for (seg, want) in index.segments.iter().zip(&expected) {
        let mut got: Vec<usize> = seg
            .members
            .iter()
            .map(|m| match m {
                surfacenav::Element::Point(i) => *i,
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        got.sort();
        assert_eq!(&got, want);
    }
}

#[test]
fn members_ordered_by_orthogonal_axes() {
    let d = grid_dataset(6, 5);
    let index = build_segment_index(&d, NavMode::Point, Axis::Y, &NavConfig::default()).unwrap();
    for seg in &index.segments {
        let keys: Vec<(f64, f64)> = seg
            .members
            .iter()
            .map(|m| {
                let p = element_position(&d, *m);
                (p.x, p.z)
            })
            .collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn spectral_y_has_twelve_segments() {
    let d = generate_sample(SampleKind::Spectral, &SampleConfig::spectral()).unwrap();
    let index = build_segment_index(&d, NavMode::Point, Axis::Y, &NavConfig::default()).unwrap();
    assert_eq!(index.len(), 12);
    assert_eq!(index.element_count(), 82 * 38);
}
