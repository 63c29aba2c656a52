use bitvec::prelude::*;

/// Binary projector image, row-major, one bit per pixel.
#[derive(Clone, PartialEq, Eq)]
pub struct PatternImage {
    width: usize,
    height: usize,
    bits: BitVec<u64, Lsb0>,
    on_count: usize,
}

impl std::fmt::Debug for PatternImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PatternImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("on_pixel_count", &self.on_count)
            .finish()
    }
}

impl PatternImage {
    pub fn blank(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: bitvec![u64, Lsb0; 0; width * height],
            on_count: 0,
        }
    }

    pub fn solid(width: usize, height: usize) -> Self {
        let mut p = Self::blank(width, height);
        p.fill_rect(0, 0, width, height);
        p
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn on_pixel_count(&self) -> usize {
        self.on_count
    }

    pub fn is_blank(&self) -> bool {
        self.on_count == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.bits[y * self.width + x]
    }

    /// Sets a pixel; out-of-grid coordinates are ignored.
    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        if x >= self.width || y >= self.height {
            return;
        }
        let idx = y * self.width + x;
        let was = self.bits.replace(idx, on);
        match (was, on) {
            (false, true) => self.on_count += 1,
            (true, false) => self.on_count -= 1,
            _ => {}
        }
    }

    /// Turns on the clipped rectangle `[x, x+w) × [y, y+h)`.
    pub fn fill_rect(&mut self, x: usize, y: usize, w: usize, h: usize) {
        for yy in y..(y + h).min(self.height) {
            for xx in x..(x + w).min(self.width) {
                self.set(xx, yy, true);
            }
        }
    }

    /// `(x, y)` of every ON pixel in row-major order.
    pub fn on_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits.iter_ones().map(move |i| (i % w, i / w))
    }

    /// Bitwise OR into `self`. Panics on dimension mismatch.
    pub fn union_with(&mut self, other: &PatternImage) {
        assert_eq!((self.width, self.height), (other.width, other.height));
        self.bits |= other.bits.as_bitslice();
        self.on_count = self.bits.count_ones();
    }

    /// Row-major pixel values, 0 or 1.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits.iter().map(|b| u8::from(*b)).collect()
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut p = Self::blank(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    p.set(x, y, true);
                }
            }
        }
        p
    }
}
