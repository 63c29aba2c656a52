//! Raw event stream files.
//!
//! Binary layout, little-endian:
//!
//! | offset | type    | field                          |
//! |-------:|---------|--------------------------------|
//! | 0      | [u8; 4] | magic `EVST`                   |
//! | 4      | u16     | version (1)                    |
//! | 6      | u16     | sensor width                   |
//! | 8      | u16     | sensor height                  |
//! | 10     | u64     | start time, µs                 |
//! | 18     | u64     | record count                   |
//! | 26     | records | 14 bytes each                  |
//!
//! Record: `x: u16, y: u16, t: u64, polarity: u8 (1 = ON, 0 = OFF),
//! kind: u8 (0 = event, 1 = trigger rising, 2 = trigger falling)`. Trigger
//! records have `x = y = polarity = 0`. Records are time-ordered; at equal
//! timestamps triggers come first.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use super::{read_header, write_header, Header};
use crate::simulator::{Edge, EventRecord, EventStream, Polarity, TriggerRecord};
use crate::{Error, Result};

pub const EVENT_MAGIC: [u8; 4] = *b"EVST";
pub const EVENT_VERSION: u16 = 1;
pub const EVENT_RECORD_BYTES: usize = 14;

enum Record {
    Event(EventRecord),
    Trigger(TriggerRecord),
}

/// Triggers and events merged by time, triggers first on ties.
fn merged(stream: &EventStream) -> impl Iterator<Item = Record> + '_ {
    let mut e = stream.events.iter().peekable();
    let mut t = stream.triggers.iter().peekable();
    std::iter::from_fn(move || match (e.peek(), t.peek()) {
        (Some(ev), Some(tr)) if ev.t < tr.t => e.next().copied().map(Record::Event),
        (_, Some(_)) => t.next().copied().map(Record::Trigger),
        (Some(_), None) => e.next().copied().map(Record::Event),
        (None, None) => None,
    })
}

pub fn write_events<W: Write>(w: &mut W, stream: &EventStream) -> Result<()> {
    write_header(
        w,
        &Header {
            magic: EVENT_MAGIC,
            version: EVENT_VERSION,
            width: stream.width,
            height: stream.height,
            start_time: stream.start_time,
            count: (stream.events.len() + stream.triggers.len()) as u64,
        },
    )?;
    for r in merged(stream) {
        let (x, y, t, polarity, kind) = match r {
            Record::Event(e) => (e.x, e.y, e.t, (e.polarity == Polarity::On) as u8, 0u8),
            Record::Trigger(tr) => (0, 0, tr.t, 0, if tr.edge == Edge::Rising { 1 } else { 2 }),
        };
        w.write_u16::<LE>(x)?;
        w.write_u16::<LE>(y)?;
        w.write_u64::<LE>(t)?;
        w.write_u8(polarity)?;
        w.write_u8(kind)?;
    }
    Ok(())
}

pub fn read_events<R: Read>(r: &mut R) -> Result<EventStream> {
    let h = read_header(r, EVENT_MAGIC, EVENT_VERSION)?;
    let mut stream = EventStream {
        width: h.width,
        height: h.height,
        start_time: h.start_time,
        ..EventStream::default()
    };
    for i in 0..h.count {
        let x = r.read_u16::<LE>()?;
        let y = r.read_u16::<LE>()?;
        let t = r.read_u64::<LE>()?;
        let polarity = r.read_u8()?;
        let kind = r.read_u8()?;
        match kind {
            0 => {
                if x >= h.width || y >= h.height {
                    return Err(Error::Format(format!(
                        "record {i}: pixel ({x}, {y}) outside {}x{}",
                        h.width, h.height
                    )));
                }
                stream.events.push(EventRecord {
                    x,
                    y,
                    t,
                    polarity: match polarity {
                        1 => Polarity::On,
                        0 => Polarity::Off,
                        p => return Err(Error::Format(format!("record {i}: polarity {p}"))),
                    },
                });
            }
            1 | 2 => stream.triggers.push(TriggerRecord {
                t,
                edge: if kind == 1 {
                    Edge::Rising
                } else {
                    Edge::Falling
                },
            }),
            k => return Err(Error::Format(format!("record {i}: unknown kind {k}"))),
        }
    }
    Ok(stream)
}

pub fn save_events(path: impl AsRef<Path>, stream: &EventStream) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_events(&mut w, stream)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_events(path: impl AsRef<Path>) -> Result<EventStream> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_events(&mut BufReader::new(file))
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    x: u16,
    y: u16,
    t: u64,
    polarity: String,
    kind: String,
}

/// CSV mirror of the binary file, one row per record. The sensor size and
/// start time are not stored.
pub fn write_events_csv<W: Write>(w: W, stream: &EventStream) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for r in merged(stream) {
        let row = match r {
            Record::Event(e) => CsvRow {
                x: e.x,
                y: e.y,
                t: e.t,
                polarity: if e.polarity == Polarity::On {
                    "ON"
                } else {
                    "OFF"
                }
                .into(),
                kind: "event".into(),
            },
            Record::Trigger(tr) => CsvRow {
                x: 0,
                y: 0,
                t: tr.t,
                polarity: String::new(),
                kind: match tr.edge {
                    Edge::Rising => "trigger_rising",
                    Edge::Falling => "trigger_falling",
                }
                .into(),
            },
        };
        csv.serialize(row)
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_events_csv<R: Read>(r: R, width: u16, height: u16) -> Result<EventStream> {
    let mut stream = EventStream {
        width,
        height,
        ..EventStream::default()
    };
    for (i, row) in csv::Reader::from_reader(r)
        .deserialize::<CsvRow>()
        .enumerate()
    {
        let row = row.map_err(|e| Error::Format(e.to_string()))?;
        match row.kind.as_str() {
            "event" => stream.events.push(EventRecord {
                x: row.x,
                y: row.y,
                t: row.t,
                polarity: match row.polarity.as_str() {
                    "ON" => Polarity::On,
                    "OFF" => Polarity::Off,
                    p => return Err(Error::Format(format!("row {i}: polarity `{p}`"))),
                },
            }),
            "trigger_rising" => stream.triggers.push(TriggerRecord {
                t: row.t,
                edge: Edge::Rising,
            }),
            "trigger_falling" => stream.triggers.push(TriggerRecord {
                t: row.t,
                edge: Edge::Falling,
            }),
            k => return Err(Error::Format(format!("row {i}: kind `{k}`"))),
        }
    }
    Ok(stream)
}
