//! Diamond-pixel DMD compensation.
//!
//! Display model: native mirror `(r, c)` lights the surface position
//! `x = c + 0.5·(r mod 2)`, `y = r / 2`. Those positions form a square
//! lattice rotated by 45°, addressed by the integer pair
//! `(i, j) = (x + y, x - y)`. A logical pixel `(px, py)` is placed at
//! `(i, j) = (px, py) + offset`, with the offset chosen so the logical grid
//! center lands on the DMD center. Logical pixels that fall outside the
//! mirror array are dropped.

use super::PatternImage;

#[derive(Clone, Copy, Debug)]
struct LatticeOffset {
    di: i64,
    dj: i64,
}

impl LatticeOffset {
    fn new(logical: (usize, usize), native: (usize, usize)) -> Self {
        let (lx0, ly0) = ((logical.0 / 2) as i64, (logical.1 / 2) as i64);
        let r0 = ((native.1 / 2) & !1) as i64;
        let c0 = (native.0 / 2) as i64;
        let (x0, y0) = (c0, r0 / 2);
        Self {
            di: x0 + y0 - lx0,
            dj: x0 - y0 - ly0,
        }
    }
}

/// Native mirror `(c, r)` that displays logical pixel `(px, py)`.
fn logical_to_native(off: LatticeOffset, px: usize, py: usize) -> (i64, i64) {
    let i = px as i64 + off.di;
    let j = py as i64 + off.dj;
    let r = i - j;
    let c = (i + j).div_euclid(2);
    (c, r)
}

/// Logical pixel displayed by native mirror `(c, r)`.
fn native_to_logical(off: LatticeOffset, c: usize, r: usize) -> (i64, i64) {
    let x2 = 2 * c as i64 + (r as i64 & 1);
    let i = (x2 + r as i64) / 2;
    let j = (x2 - r as i64) / 2;
    (i - off.di, j - off.dj)
}

/// Remaps a logical-grid pattern onto the diamond mirror array so that the
/// projected image is the logical pattern rotated by 45°.
pub fn diamond_compensate(p: &PatternImage, native: (usize, usize)) -> PatternImage {
    let off = LatticeOffset::new((p.width(), p.height()), native);
    let mut out = PatternImage::blank(native.0, native.1);
    for (px, py) in p.on_pixels() {
        let (c, r) = logical_to_native(off, px, py);
        if c >= 0 && r >= 0 {
            out.set(c as usize, r as usize, true);
        }
    }
    out
}

/// What a native bitmap looks like on the surface, expressed on the
/// (45°-rotated) logical grid.
pub fn diamond_render(native: &PatternImage, logical: (usize, usize)) -> PatternImage {
    let off = LatticeOffset::new(logical, (native.width(), native.height()));
    let mut out = PatternImage::blank(logical.0, logical.1);
    for (c, r) in native.on_pixels() {
        let (px, py) = native_to_logical(off, c, r);
        if px >= 0 && py >= 0 {
            out.set(px as usize, py as usize, true);
        }
    }
    out
}

/// Whether logical pixel `(px, py)` has a mirror on the native array.
pub fn diamond_displayable(
    logical: (usize, usize),
    native: (usize, usize),
    px: usize,
    py: usize,
) -> bool {
    let off = LatticeOffset::new(logical, native);
    let (c, r) = logical_to_native(off, px, py);
    c >= 0 && r >= 0 && (c as usize) < native.0 && (r as usize) < native.1
}
