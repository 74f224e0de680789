//! Z-order (Morton) codes addressing cells of a virtual quadtree over the unit
//! space.
//!
//! A code at level `l` is `2*l` bits: two bits per descent, appended at the low
//! end. Quadrants are numbered along the Z curve read like text — `0` north-west,
//! `1` north-east, `2` south-west, `3` south-east — so at any one level the
//! numeric order of codes traces the curve.

use std::cmp::Ordering;
use std::fmt;

use crate::model::Mbr;

/// Deepest level codes support; cells at this level have side `2^-16`.
pub const MAX_LEVEL: u8 = 16;

/// Number of children of an internal quadtree node.
pub const CHILDREN: usize = 4;

/// A quadtree cell address: level plus `2*level` path bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MortonCode {
    level: u8,
    bits: u64,
}

impl MortonCode {
    /// The root cell, covering the whole unit space.
    pub fn root() -> Self {
        Self { level: 0, bits: 0 }
    }

    /// Rebuilds a code from stored parts. Panics on out-of-range values,
    /// which only a corrupt snapshot can produce.
    pub fn from_parts(level: u8, bits: u64) -> Self {
        assert!(level <= MAX_LEVEL, "level {level} exceeds {MAX_LEVEL}");
        assert!(bits >> (2 * level as u32) == 0, "bits 0x{bits:x} do not fit level {level}");
        Self { level, bits }
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    /// Raw path bits; meaningful together with [`Self::level`].
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Child in the given quadrant (`0..4`, Z order).
    pub fn child(&self, quadrant: u8) -> Self {
        debug_assert!(quadrant < CHILDREN as u8);
        debug_assert!(self.level < MAX_LEVEL, "cannot descend below level {MAX_LEVEL}");
        Self { level: self.level + 1, bits: (self.bits << 2) | u64::from(quadrant) }
    }

    /// Enclosing cell one level up; `None` at the root.
    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self { level: self.level - 1, bits: self.bits >> 2 })
    }

    /// Code of the cell at `level` whose column is counted from the west edge
    /// and whose row is counted from the north edge.
    pub fn from_cell(level: u8, col: u32, row: u32) -> Self {
        assert!(level <= MAX_LEVEL);
        assert!(col < 1 << level && row < 1 << level);
        // Row bits land on the odd positions, column bits on the even ones, so
        // each 2-bit group is `2*row_bit + col_bit` — the Z quadrant number.
        Self { level, bits: spread(row) << 1 | spread(col) }
    }

    /// Inverse of [`Self::from_cell`]: `(col, row)` of this cell at its level.
    pub fn to_cell(&self) -> (u32, u32) {
        (compact(self.bits), compact(self.bits >> 1))
    }

    /// The rectangle this cell covers. Cell corners are dyadic rationals, so
    /// the result is exact in floating point.
    pub fn region(&self) -> Mbr {
        let (col, row) = self.to_cell();
        let side = 1.0 / f64::from(1u32 << self.level);
        let x_min = f64::from(col) * side;
        let y_max = 1.0 - f64::from(row) * side;
        Mbr::new(x_min, y_max - side, x_min + side, y_max)
            .expect("cell corners are within the unit space")
    }

    /// Sort key aligning codes of different levels on one Z curve.
    fn curve_position(&self) -> u64 {
        self.bits << (2 * (MAX_LEVEL - self.level) as u32)
    }
}

impl Ord for MortonCode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.curve_position().cmp(&other.curve_position()).then(self.level.cmp(&other.level))
    }
}

impl PartialOrd for MortonCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MortonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "root")
        } else {
            write!(f, "{:0width$b}", self.bits, width = 2 * self.level as usize)
        }
    }
}

/// Spaces the low 16 bits of `v` out to the even bit positions.
fn spread(v: u32) -> u64 {
    let mut x = u64::from(v) & 0xFFFF;
    x = (x | x << 8) & 0x00FF_00FF;
    x = (x | x << 4) & 0x0F0F_0F0F;
    x = (x | x << 2) & 0x3333_3333;
    x = (x | x << 1) & 0x5555_5555;
    x
}

/// Inverse of [`spread`]: collects the even bit positions into the low 16 bits.
fn compact(v: u64) -> u32 {
    let mut x = v & 0x5555_5555;
    x = (x | x >> 1) & 0x3333_3333;
    x = (x | x >> 2) & 0x0F0F_0F0F;
    x = (x | x >> 4) & 0x00FF_00FF;
    x = (x | x >> 8) & 0x0000_FFFF;
    x as u32
}
