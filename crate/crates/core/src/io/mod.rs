//! File formats: binary/CSV event streams, PNG frames and PLY clouds.

mod events;
mod images;
mod ply;
mod tagged;

use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

pub use events::{
    load_events, read_events, read_events_csv, save_events, write_events, write_events_csv,
    EVENT_MAGIC, EVENT_RECORD_BYTES, EVENT_VERSION,
};
pub use images::{
    load_color_png, load_depth_png, load_pattern_png, load_temporal_png, save_color_png,
    save_depth_png, save_pattern_png, save_temporal_png,
};
pub use ply::{load_ply, read_ply, save_ply, write_ply};
pub use tagged::{
    load_tagged, read_tagged, read_tagged_csv, save_tagged, write_tagged, write_tagged_csv,
    TaggedFile, TAGGED_MAGIC, TAGGED_RECORD_BYTES, TAGGED_VERSION,
};

use crate::{Error, Result};

/// Bytes before the first record of either binary stream format.
pub const HEADER_BYTES: usize = 26;

struct Header {
    magic: [u8; 4],
    version: u16,
    width: u16,
    height: u16,
    start_time: u64,
    count: u64,
}

fn write_header<W: Write>(w: &mut W, h: &Header) -> Result<()> {
    w.write_all(&h.magic)?;
    w.write_u16::<LE>(h.version)?;
    w.write_u16::<LE>(h.width)?;
    w.write_u16::<LE>(h.height)?;
    w.write_u64::<LE>(h.start_time)?;
    w.write_u64::<LE>(h.count)?;
    Ok(())
}

fn read_header<R: Read>(r: &mut R, magic: [u8; 4], version: u16) -> Result<Header> {
    let mut m = [0u8; 4];
    r.read_exact(&mut m)?;
    if m != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(&magic)
        )));
    }
    let v = r.read_u16::<LE>()?;
    if v != version {
        return Err(Error::Format(format!(
            "unsupported version {v}, expected {version}"
        )));
    }
    Ok(Header {
        magic: m,
        version: v,
        width: r.read_u16::<LE>()?,
        height: r.read_u16::<LE>()?,
        start_time: r.read_u64::<LE>()?,
        count: r.read_u64::<LE>()?,
    })
}

#[cfg(test)]
mod tests;
