use std::io::Cursor;

use proptest::prelude::*;

use super::*;
use crate::patterns::{Channel, PatternImage};
use crate::recon::{ColorFrame, ColoredPoint, DepthFrame, PointCloud, TemporalMap};
use crate::simulator::{Edge, EventRecord, EventStream, Polarity, TriggerRecord};
use crate::tagger::TaggedEvent;

fn sample_stream() -> EventStream {
    EventStream {
        width: 640,
        height: 480,
        start_time: 17,
        events: vec![
            EventRecord {
                x: 1,
                y: 2,
                t: 100,
                polarity: Polarity::On,
            },
            EventRecord {
                x: 639,
                y: 479,
                t: 235,
                polarity: Polarity::Off,
            },
        ],
        triggers: vec![
            TriggerRecord {
                t: 0,
                edge: Edge::Rising,
            },
            TriggerRecord {
                t: 235,
                edge: Edge::Falling,
            },
        ],
    }
}

#[test]
fn event_binary_layout() {
    let mut buf = Vec::new();
    write_events(&mut buf, &sample_stream()).unwrap();
    assert_eq!(buf.len(), HEADER_BYTES + 4 * EVENT_RECORD_BYTES);
    assert_eq!(&buf[..4], b"EVST");
    // First record is the rising edge at t = 0.
    assert_eq!(
        &buf[HEADER_BYTES..HEADER_BYTES + 14],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]
    );
    assert_eq!(
        read_events(&mut Cursor::new(&buf)).unwrap(),
        sample_stream()
    );
}

#[test]
fn bad_headers_are_rejected() {
    let mut buf = Vec::new();
    write_events(&mut buf, &sample_stream()).unwrap();
    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(matches!(
        read_events(&mut Cursor::new(&bad)),
        Err(crate::Error::Format(_))
    ));
    let mut bad = buf.clone();
    bad[4] = 9;
    assert!(read_events(&mut Cursor::new(&bad)).is_err());
    assert!(read_events(&mut Cursor::new(&buf[..buf.len() - 3])).is_err());
    // A raw stream is not a tagged file.
    assert!(read_tagged(&mut Cursor::new(&buf)).is_err());
}

#[test]
fn event_csv_round_trip() {
    let mut buf = Vec::new();
    write_events_csv(&mut buf, &sample_stream()).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("x,y,t,polarity,kind\n0,0,0,,trigger_rising\n"));
    let back = read_events_csv(Cursor::new(buf), 640, 480).unwrap();
    assert_eq!(back.events, sample_stream().events);
    assert_eq!(back.triggers, sample_stream().triggers);
}

fn tagged_sample() -> TaggedFile {
    TaggedFile {
        width: 640,
        height: 480,
        start_time: 0,
        events: vec![
            TaggedEvent {
                x: 3,
                y: 4,
                t: 5,
                depth: 1500.25,
                channel: None,
                disparity: 93.5,
                column: 7,
            },
            TaggedEvent {
                x: 0,
                y: 0,
                t: 9,
                depth: 0.0,
                channel: Some(Channel::Blue),
                disparity: 0.0,
                column: 0,
            },
        ],
    }
}

#[test]
fn tagged_round_trips() {
    let mut buf = Vec::new();
    write_tagged(&mut buf, &tagged_sample()).unwrap();
    assert_eq!(buf.len(), HEADER_BYTES + 2 * TAGGED_RECORD_BYTES);
    assert_eq!(
        read_tagged(&mut Cursor::new(&buf)).unwrap(),
        tagged_sample()
    );

    let mut csv = Vec::new();
    write_tagged_csv(&mut csv, &tagged_sample().events).unwrap();
    assert_eq!(
        read_tagged_csv(Cursor::new(csv)).unwrap(),
        tagged_sample().events
    );
}

#[test]
fn png_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = PatternImage::from_fn(13, 7, |x, y| (x * 3 + y) % 5 == 0);
    save_pattern_png(dir.path().join("p.png"), &p).unwrap();
    assert_eq!(load_pattern_png(dir.path().join("p.png")).unwrap(), p);

    let mut d = DepthFrame::zeros(5, 3);
    d.set(1, 1, 1499.6);
    d.set(4, 2, 70_000.0);
    save_depth_png(dir.path().join("d.png"), &d).unwrap();
    let back = load_depth_png(dir.path().join("d.png")).unwrap();
    assert_eq!(
        (back.get(1, 1), back.get(4, 2), back.get(0, 0)),
        (1500.0, 65535.0, 0.0)
    );

    let mut c = ColorFrame::empty(4, 2);
    c.set(0, 0, [255, 128, 0]);
    c.set(3, 1, [1, 2, 3]);
    save_color_png(dir.path().join("c.png"), &c).unwrap();
    assert_eq!(load_color_png(dir.path().join("c.png")).unwrap(), c);

    let t = TemporalMap {
        width: 3,
        height: 2,
        data: vec![0, 1, 45, 200, 3, 0],
    };
    save_temporal_png(dir.path().join("t.png"), &t).unwrap();
    assert_eq!(load_temporal_png(dir.path().join("t.png")).unwrap(), t);
    let too_big = TemporalMap {
        width: 1,
        height: 1,
        data: vec![300],
    };
    assert!(save_temporal_png(dir.path().join("x.png"), &too_big).is_err());

    assert!(load_depth_png(dir.path().join("c.png")).is_err());
}

#[test]
fn ply_round_trip() {
    let cloud = PointCloud {
        points: vec![
            ColoredPoint {
                x: 0.0,
                y: -1.5,
                z: 1500.125,
                rgb: [255, 0, 7],
            },
            ColoredPoint {
                x: 1e-7,
                y: 3.0,
                z: 2.0,
                rgb: [1, 2, 3],
            },
        ],
    };
    let mut buf = Vec::new();
    write_ply(&mut buf, &cloud).unwrap();
    assert!(String::from_utf8_lossy(&buf).contains("element vertex 2\n"));
    assert_eq!(read_ply(Cursor::new(buf)).unwrap(), cloud);
    assert!(read_ply(Cursor::new(
        b"ply\nformat binary_little_endian 1.0\n".to_vec()
    ))
    .is_err());
}

fn arb_stream() -> impl Strategy<Value = EventStream> {
    let events = prop::collection::vec((0u16..64, 0u16..48, 0u64..10_000, any::<bool>()), 0..100);
    let triggers = prop::collection::vec((0u64..10_000, 1u64..300), 0..20);
    (events, triggers).prop_map(|(ev, tr)| {
        let mut events: Vec<EventRecord> = ev
            .into_iter()
            .map(|(x, y, t, on)| EventRecord {
                x,
                y,
                t,
                polarity: if on { Polarity::On } else { Polarity::Off },
            })
            .collect();
        events.sort_by_key(|e| e.t);
        let mut starts: Vec<u64> = tr.iter().map(|t| t.0 * 40).collect();
        starts.sort_unstable();
        let triggers = starts
            .iter()
            .zip(&tr)
            .flat_map(|(&s, &(_, len))| {
                [
                    TriggerRecord {
                        t: s,
                        edge: Edge::Rising,
                    },
                    TriggerRecord {
                        t: s + len,
                        edge: Edge::Falling,
                    },
                ]
            })
            .collect::<Vec<_>>();
        let mut triggers = triggers;
        triggers.sort_by_key(|t| t.t);
        EventStream {
            width: 64,
            height: 48,
            start_time: 0,
            events,
            triggers,
        }
    })
}

proptest! {
    #[test]
    fn event_files_round_trip(stream in arb_stream()) {
        let mut buf = Vec::new();
        write_events(&mut buf, &stream).unwrap();
        let back = read_events(&mut Cursor::new(&buf)).unwrap();
        prop_assert_eq!(&back, &stream);
        let mut again = Vec::new();
        write_events(&mut again, &back).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn tagged_files_round_trip_through_f32(depth in 200.0f64..5000.0, disparity in 1.0f64..200.0) {
        let file = TaggedFile {
            width: 10,
            height: 10,
            start_time: 3,
            events: vec![TaggedEvent { x: 1, y: 2, t: 3, depth, channel: Some(Channel::Green), disparity, column: 4 }],
        };
        let mut buf = Vec::new();
        write_tagged(&mut buf, &file).unwrap();
        let back = read_tagged(&mut Cursor::new(&buf)).unwrap();
        prop_assert_eq!(back.events[0].depth, depth as f32 as f64);
        prop_assert_eq!(back.events[0].disparity, disparity as f32 as f64);
        let mut again = Vec::new();
        write_tagged(&mut again, &back).unwrap();
        prop_assert_eq!(buf, again);
    }
}
