//! ASCII PLY point clouds: `x y z` in mm (camera frame) and `red green blue`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::recon::{ColoredPoint, PointCloud};
use crate::{Error, Result};

pub fn write_ply<W: Write>(w: &mut W, cloud: &PointCloud) -> Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", cloud.len())?;
    for p in ["x", "y", "z"] {
        writeln!(w, "property double {p}")?;
    }
    for p in ["red", "green", "blue"] {
        writeln!(w, "property uchar {p}")?;
    }
    writeln!(w, "end_header")?;
    for p in &cloud.points {
        writeln!(
            w,
            "{} {} {} {} {} {}",
            p.x, p.y, p.z, p.rgb[0], p.rgb[1], p.rgb[2]
        )?;
    }
    Ok(())
}

/// Reads files produced by [`write_ply`].
pub fn read_ply<R: BufRead>(r: R) -> Result<PointCloud> {
    let mut lines = r.lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Format("truncated PLY".into()))?
            .map_err(Error::from)
    };
    if next()? != "ply" || next()? != "format ascii 1.0" {
        return Err(Error::Format("not an ASCII PLY file".into()));
    }
    let mut count = None;
    loop {
        let line = next()?;
        if line == "end_header" {
            break;
        }
        if let Some(n) = line.strip_prefix("element vertex ") {
            count = Some(
                n.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Format(e.to_string()))?,
            );
        }
    }
    let count = count.ok_or_else(|| Error::Format("PLY without vertex element".into()))?;
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let line = next()?;
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Format(format!("PLY vertex {i}: `{line}`"));
        if f.len() != 6 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let byte = |s: &str| s.parse::<u8>().map_err(|_| bad());
        points.push(ColoredPoint {
            x: num(f[0])?,
            y: num(f[1])?,
            z: num(f[2])?,
            rgb: [byte(f[3])?, byte(f[4])?, byte(f[5])?],
        });
    }
    Ok(PointCloud { points })
}

pub fn save_ply(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_ply(&mut w, cloud)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_ply(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_ply(BufReader::new(f))
}
