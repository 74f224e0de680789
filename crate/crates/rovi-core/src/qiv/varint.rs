//! Little-endian base-128 varints and delta coding for sorted id lists.

use std::io::{self, Read, Write};

/// Writes `v` as an LEB128 varint (7 payload bits per byte, low group first).
pub fn write_varint(out: &mut impl Write, mut v: u64) -> io::Result<()> {
    loop {
        let byte = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            return out.write_all(&[byte]);
        }
        out.write_all(&[byte | 0x80])?;
    }
}

/// Reads one varint; errors on EOF or an encoding longer than a u64 allows.
pub fn read_varint(input: &mut impl Read) -> io::Result<u64> {
    let mut v = 0u64;
    let mut shift = 0u32;
    loop {
        let mut byte = [0u8; 1];
        input.read_exact(&mut byte)?;
        let b = byte[0];
        if shift >= 63 && b > 1 {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "varint overflows u64"));
        }
        v |= u64::from(b & 0x7F) << shift;
        if b & 0x80 == 0 {
            return Ok(v);
        }
        shift += 7;
    }
}

/// Delta-encodes a strictly increasing id list: first id absolute, then gaps.
pub fn write_id_list(out: &mut impl Write, ids: &[u64]) -> io::Result<()> {
    let mut prev = 0u64;
    for (i, &id) in ids.iter().enumerate() {
        debug_assert!(i == 0 || id > prev, "ids must be strictly increasing");
        let delta = if i == 0 { id } else { id - prev };
        write_varint(out, delta)?;
        prev = id;
    }
    Ok(())
}

/// Decodes `count` delta-encoded ids written by [`write_id_list`].
pub fn read_id_list(input: &mut impl Read, count: usize) -> io::Result<Vec<u64>> {
    let mut ids = Vec::with_capacity(count);
    let mut prev = 0u64;
    for i in 0..count {
        let delta = read_varint(input)?;
        let id = if i == 0 {
            delta
        } else {
            prev.checked_add(delta).ok_or_else(|| {
                io::Error::new(io::ErrorKind::InvalidData, "id list delta overflows u64")
            })?
        };
        ids.push(id);
        prev = id;
    }
    Ok(ids)
}
