use nalgebra::{DMatrix, Vector3};
use proptest::prelude::*;

use super::*;
use crate::geometry::{build_rectification, CalibrationBundle, RectifiedRig};
use crate::patterns::{
    build_sequence, generate_line_pattern, Channel, DepthSet, PatternImage, SequenceMode, Timing,
    DEFAULT_LINE_WIDTH, DEFAULT_SPAN,
};
use crate::simulator::{
    ground_truth_color, ground_truth_depth, presets, render_events, NoiseConfig, Primitive,
    SceneModel,
};
use crate::tagger::{init_tagger, process_stream, TaggedEvent};

const DIMS: (usize, usize) = (640, 480);
const ALL: (u64, u64) = (0, u64::MAX);

fn ev(x: u16, y: u16, t: u64, depth: f64, channel: Option<Channel>) -> TaggedEvent {
    TaggedEvent {
        x,
        y,
        t,
        depth,
        channel,
        disparity: if depth > 0.0 { 1.0 } else { 0.0 },
        column: if depth > 0.0 { 1 } else { 0 },
    }
}

fn reference_rig() -> (CalibrationBundle, RectifiedRig) {
    let b = CalibrationBundle::reference();
    let (rig, _) = build_rectification(&b.camera, &b.projector, &b.extrinsics).unwrap();
    (b, rig)
}

fn scan(scene: &SceneModel, mode: SequenceMode, n: usize) -> Vec<TaggedEvent> {
    let b = CalibrationBundle::reference();
    let (rig, lut) = build_rectification(&b.camera, &b.projector, &b.extrinsics).unwrap();
    let depth = mode.uses_depth().then(|| {
        let (patterns, columns) =
            generate_line_pattern((912, 1140), n, DEFAULT_LINE_WIDTH, DEFAULT_SPAN).unwrap();
        DepthSet { patterns, columns }
    });
    let color = matches!(mode, SequenceMode::ColorOnly | SequenceMode::DepthThenColor)
        .then(|| PatternImage::solid(912, 1140));
    let seq = build_sequence(mode, depth, color, Timing::default()).unwrap();
    let noise = NoiseConfig::noiseless();
    let stream =
        render_events(scene, &b.camera, &b.projector, &b.extrinsics, &seq, &noise).unwrap();
    let mut state = init_tagger(&rig, &lut, &seq).unwrap();
    process_stream(&mut state, &stream).unwrap().0
}

#[test]
fn single_event_frame() {
    let f = accumulate_depth(
        &[ev(3, 4, 10, 1500.0, None)],
        DIMS,
        ALL,
        DepthPolicy::Median,
    );
    assert_eq!(f.data_pixel_count(), 1);
    assert_eq!(f.get(3, 4), 1500.0);
}

#[test]
fn policies_combine_samples() {
    let events = [ev(1, 1, 0, 1400.0, None), ev(1, 1, 5, 1600.0, None)];
    let at = |p| accumulate_depth(&events, DIMS, ALL, p).get(1, 1);
    assert_eq!(at(DepthPolicy::Mean), 1500.0);
    assert_eq!(at(DepthPolicy::Median), 1500.0);
    assert_eq!(at(DepthPolicy::Last), 1600.0);
    let three = [
        ev(1, 1, 0, 1400.0, None),
        ev(1, 1, 1, 9000.0, None),
        ev(1, 1, 2, 1500.0, None),
    ];
    assert_eq!(
        accumulate_depth(&three, DIMS, ALL, DepthPolicy::Median).get(1, 1),
        1500.0
    );
}

#[test]
fn windows_are_half_open() {
    let events = [ev(0, 0, 99, 1000.0, None), ev(1, 0, 100, 1000.0, None)];
    let f = accumulate_depth(&events, DIMS, (0, 100), DepthPolicy::Last);
    assert_eq!((f.get(0, 0), f.get(1, 0)), (1000.0, 0.0));
    assert_eq!(f.window, (0, 100));
    assert_eq!(frame_windows(&events, 0, 100), vec![(0, 100), (100, 200)]);
    assert_eq!(frame_windows(&events, 0, 1000), vec![(0, 1000)]);
    assert!(frame_windows(&[], 0, 1000).is_empty());
}

#[test]
fn color_transfer_inverse() {
    let mut events = Vec::new();
    for (ch, k) in [(Channel::Red, 4), (Channel::Green, 2)] {
        events.extend((0..k).map(|i| ev(5, 5, i, 0.0, Some(ch))));
    }
    let f = accumulate_color(&events, DIMS, ALL, 4);
    assert_eq!(f.get(5, 5), Some([255, 128, 0]));
    assert_eq!(f.get(6, 5), None);
    assert_eq!(f.data[5 * 640 + 6], [0, 0, 0]);
    assert_eq!(f.valid_count(), 1);
    assert_eq!(accumulate_color(&[], DIMS, ALL, 4).valid_count(), 0);
}

#[test]
fn plane_scan_is_within_quantization() {
    let tagged = scan(&presets::plane(1500.0), SequenceMode::DepthOnly, 45);
    let frame = accumulate_depth(&tagged, DIMS, ALL, DepthPolicy::Median);
    let gt = ground_truth_depth(
        &presets::plane(1500.0),
        &CalibrationBundle::reference().camera,
    );
    let diffs: Vec<f64> = frame
        .data
        .iter()
        .zip(&gt.data)
        .filter(|(f, _)| **f > 0.0)
        .map(|(f, g)| f - g)
        .collect();
    assert!(diffs.len() > 5000);
    let rmse = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    // One rectified pixel of disparity at 1.5 m is Z² / (f·B) ≈ 16 mm.
    let (_, rig) = reference_rig();
    let one_px = 1500.0 * 1500.0 / (rig.focal * rig.baseline);
    assert!(rmse < one_px, "rmse {rmse} vs {one_px}");
}

#[test]
fn checker_colors_round_trip() {
    let scene = presets::checker24(1500.0);
    let tagged = scan(&scene, SequenceMode::ColorOnly, 0);
    let frame = accumulate_color(&tagged, DIMS, ALL, 4);
    let gt = ground_truth_color(&scene, &CalibrationBundle::reference().camera);
    assert!(frame.valid_count() > 50_000);
    for i in (0..frame.data.len()).filter(|&i| frame.mask[i]) {
        assert_eq!(frame.data[i], gt.data[i]);
    }
}

#[test]
fn temporal_map_has_ordered_bands() {
    let tagged = scan(&presets::plane(1500.0), SequenceMode::DepthOnly, 45);
    let map = temporal_map(&tagged, DIMS, ALL);
    let mut values: Vec<u16> = map.data.iter().copied().filter(|&v| v > 0).collect();
    values.sort_unstable();
    values.dedup();
    assert_eq!(values, (1..=45).collect::<Vec<u16>>());
    for row in map.data.chunks(640) {
        let seen: Vec<u16> = row.iter().copied().filter(|&v| v > 0).collect();
        assert!(seen.windows(2).all(|w| w[0] <= w[1]));
    }
    assert!(temporal_map(&[], DIMS, ALL).data.iter().all(|&v| v == 0));
    let single: Vec<TaggedEvent> = tagged.iter().filter(|e| e.column == 7).copied().collect();
    let map = temporal_map(&single, DIMS, ALL);
    assert!(map.data.iter().all(|&v| v == 0 || v == 7));
}

#[test]
fn optical_axis_point() {
    let (b, rig) = reference_rig();
    let mut depth = DepthFrame::zeros(640, 480);
    depth.set(320, 240, 1500.0);
    let cloud = build_point_cloud(&depth, &ColorFrame::empty(640, 480), &rig, &b.camera).unwrap();
    assert_eq!(cloud.len(), 1);
    let p = cloud.points[0];
    assert!(p.x.abs() < 1e-9 && p.y.abs() < 1e-9 && (p.z - 1500.0).abs() < 1e-9);
    assert_eq!(p.rgb, [255; 3]);

    let empty = build_point_cloud(
        &DepthFrame::zeros(640, 480),
        &ColorFrame::empty(640, 480),
        &rig,
        &b.camera,
    )
    .unwrap();
    assert!(empty.is_empty());
    assert!(build_point_cloud(&depth, &ColorFrame::empty(10, 10), &rig, &b.camera).is_err());
}

#[test]
fn tilted_plane_cloud_is_planar() {
    let (b, rig) = reference_rig();
    let scene = SceneModel::new(vec![Primitive::Plane {
        point: [0.0, 0.0, 1500.0],
        normal: [0.3, -0.2, -1.0],
        albedo: [1.0; 3],
        patches: None,
    }]);
    let depth = ground_truth_depth(&scene, &b.camera);
    let color = ground_truth_color(&scene, &b.camera);
    let cloud = build_point_cloud(&depth, &color, &rig, &b.camera).unwrap();
    assert_eq!(cloud.len(), 640 * 480);
    // Least-squares plane through the centroid: smallest singular vector.
    let n = cloud.len() as f64;
    let c = cloud
        .points
        .iter()
        .fold(Vector3::zeros(), |a, p| a + Vector3::new(p.x, p.y, p.z))
        / n;
    let m = DMatrix::from_fn(cloud.len(), 3, |i, j| {
        let p = cloud.points[i];
        [p.x, p.y, p.z][j] - c[j]
    });
    let sv = m.svd(false, false).singular_values;
    let rms = sv.min() / n.sqrt();
    assert!(rms < 1.0, "plane residual {rms} mm");
    for p in cloud.points.iter().step_by(997) {
        let [u, v] = b.camera.project(&Vector3::new(p.x, p.y, p.z)).unwrap();
        assert!((u - u.round()).abs() < 1e-6 && (v - v.round()).abs() < 1e-6);
    }
}

fn arb_event() -> impl Strategy<Value = TaggedEvent> {
    (
        0u16..8,
        0u16..8,
        0u64..1000,
        0u8..4,
        prop::bool::ANY,
        500.0f64..3000.0,
    )
        .prop_map(|(x, y, t, c, has_depth, d)| {
            let channel = Channel::from_code(c).unwrap();
            ev(x, y, t, if has_depth { d } else { 0.0 }, channel)
        })
}

fn sorted(mut v: Vec<TaggedEvent>) -> Vec<TaggedEvent> {
    v.sort_by_key(|e| e.t);
    v
}

proptest! {
    #[test]
    fn last_policy_windows_concatenate(
        events in prop::collection::vec(arb_event(), 0..200).prop_map(sorted),
        split in 0u64..1000,
    ) {
        let dims = (8, 8);
        let whole = accumulate_depth(&events, dims, (0, 1000), DepthPolicy::Last);
        let a = accumulate_depth(&events, dims, (0, split), DepthPolicy::Last);
        let b = accumulate_depth(&events, dims, (split, 1000), DepthPolicy::Last);
        let joined: Vec<f64> = a.data.iter().zip(&b.data)
            .map(|(&x, &y)| if y != 0.0 { y } else { x })
            .collect();
        prop_assert_eq!(joined, whole.data);
    }

    #[test]
    fn channel_permutation_commutes(
        events in prop::collection::vec(arb_event(), 0..200),
        k_max in 1u32..6,
    ) {
        // Cyclic shift R -> G -> B -> R.
        let shift = |c: Option<Channel>| c.map(|c| Channel::ALL[(c.index() + 1) % 3]);
        let moved: Vec<TaggedEvent> = events.iter()
            .map(|e| TaggedEvent { channel: shift(e.channel), ..*e })
            .collect();
        let a = accumulate_color(&events, (8, 8), ALL, k_max);
        let b = accumulate_color(&moved, (8, 8), ALL, k_max);
        prop_assert_eq!(&a.mask, &b.mask);
        for (pa, pb) in a.data.iter().zip(&b.data) {
            prop_assert_eq!([pa[2], pa[0], pa[1]], *pb);
        }
    }

    #[test]
    fn frames_are_non_negative(events in prop::collection::vec(arb_event(), 0..200)) {
        for p in [DepthPolicy::Last, DepthPolicy::Mean, DepthPolicy::Median] {
            let f = accumulate_depth(&events, (8, 8), ALL, p);
            prop_assert!(f.data.iter().all(|&d| d >= 0.0));
        }
        let c = accumulate_color(&events, (8, 8), ALL, 4);
        for (px, m) in c.data.iter().zip(&c.mask) {
            prop_assert!(*m || *px == [0, 0, 0]);
        }
    }
}
