//! Tagged event files.
//!
//! Same 26-byte header as raw event files with magic `EVTG`, followed by
//! 23-byte little-endian records: `x: u16, y: u16, t: u64, depth_mm: f32,
//! channel: u8 (0 = none, 1..=3 = R, G, B), disparity: f32, column: u16
//! (1-based depth pattern, 0 = none)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use super::{read_header, write_header, Header};
use crate::patterns::Channel;
use crate::tagger::TaggedEvent;
use crate::{Error, Result};

pub const TAGGED_MAGIC: [u8; 4] = *b"EVTG";
pub const TAGGED_VERSION: u16 = 1;
pub const TAGGED_RECORD_BYTES: usize = 23;

/// Tagged events with the sensor geometry they came from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TaggedFile {
    pub width: u16,
    pub height: u16,
    pub start_time: u64,
    pub events: Vec<TaggedEvent>,
}

pub fn write_tagged<W: Write>(w: &mut W, file: &TaggedFile) -> Result<()> {
    write_header(
        w,
        &Header {
            magic: TAGGED_MAGIC,
            version: TAGGED_VERSION,
            width: file.width,
            height: file.height,
            start_time: file.start_time,
            count: file.events.len() as u64,
        },
    )?;
    for e in &file.events {
        w.write_u16::<LE>(e.x)?;
        w.write_u16::<LE>(e.y)?;
        w.write_u64::<LE>(e.t)?;
        w.write_f32::<LE>(e.depth as f32)?;
        w.write_u8(Channel::code(e.channel))?;
        w.write_f32::<LE>(e.disparity as f32)?;
        w.write_u16::<LE>(e.column)?;
    }
    Ok(())
}

pub fn read_tagged<R: Read>(r: &mut R) -> Result<TaggedFile> {
    let h = read_header(r, TAGGED_MAGIC, TAGGED_VERSION)?;
    let mut events = Vec::with_capacity(h.count.min(1 << 24) as usize);
    for i in 0..h.count {
        let x = r.read_u16::<LE>()?;
        let y = r.read_u16::<LE>()?;
        let t = r.read_u64::<LE>()?;
        let depth = r.read_f32::<LE>()? as f64;
        let code = r.read_u8()?;
        let disparity = r.read_f32::<LE>()? as f64;
        let column = r.read_u16::<LE>()?;
        let channel = Channel::from_code(code)
            .ok_or_else(|| Error::Format(format!("record {i}: channel code {code}")))?;
        if x >= h.width || y >= h.height {
            return Err(Error::Format(format!(
                "record {i}: pixel ({x}, {y}) out of bounds"
            )));
        }
        events.push(TaggedEvent {
            x,
            y,
            t,
            depth,
            channel,
            disparity,
            column,
        });
    }
    Ok(TaggedFile {
        width: h.width,
        height: h.height,
        start_time: h.start_time,
        events,
    })
}

pub fn save_tagged(path: impl AsRef<Path>, file: &TaggedFile) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_tagged(&mut w, file)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_tagged(path: impl AsRef<Path>) -> Result<TaggedFile> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_tagged(&mut BufReader::new(f))
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    x: u16,
    y: u16,
    t: u64,
    depth_mm: f64,
    channel: String,
    disparity: f64,
    column: u16,
}

pub fn write_tagged_csv<W: Write>(w: W, events: &[TaggedEvent]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for e in events {
        csv.serialize(CsvRow {
            x: e.x,
            y: e.y,
            t: e.t,
            depth_mm: e.depth,
            channel: e.channel.map_or(String::new(), |c| c.to_string()),
            disparity: e.disparity,
            column: e.column,
        })
        .map_err(|e| Error::Format(e.to_string()))?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_tagged_csv<R: Read>(r: R) -> Result<Vec<TaggedEvent>> {
    csv::Reader::from_reader(r)
        .deserialize::<CsvRow>()
        .enumerate()
        .map(|(i, row)| {
            let row = row.map_err(|e| Error::Format(e.to_string()))?;
            let channel = match row.channel.as_str() {
                "" => None,
                "R" => Some(Channel::Red),
                "G" => Some(Channel::Green),
                "B" => Some(Channel::Blue),
                c => return Err(Error::Format(format!("row {i}: channel `{c}`"))),
            };
            Ok(TaggedEvent {
                x: row.x,
                y: row.y,
                t: row.t,
                depth: row.depth_mm,
                channel,
                disparity: row.disparity,
                column: row.column,
            })
        })
        .collect()
}
