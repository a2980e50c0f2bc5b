//! Bit-exact serialized container for compressed segments, and the flat raw
//! segment exchange format.
//!
//! Container layout, all little-endian:
//!
//! ```text
//! magic "ADCR" | version u16 | N u32 | C u16 | Fs f32 | u u16 | d u16
//! | protected_count u32 | y_length u32          (28-byte header)
//! protected indices     protected_count x u32, ascending
//! verbatim values       protected_count x C x f32, index-major
//! low-rate data y       C x y_length x f32, channel-major
//! ```
//!
//! Raw segments: `N u32 | C u16 | Fs f32` followed by `C x N` f32 samples,
//! channel-major.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{CompressedSegment, RationalRate, Segment};

pub const MAGIC: [u8; 4] = *b"ADCR";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 28;

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, offset: 0 }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.offset + n > self.bytes.len() {
            return Err(Error::format(
                self.offset,
                format!("truncated stream while reading {what}"),
            ));
        }
        let slice = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(slice)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

/// Serialize to the container layout. Fails if a rate part or the channel
/// count overflows its 16-bit header field.
pub fn serialize(c: &CompressedSegment) -> Result<Vec<u8>> {
    if c.rate.numerator() > u16::MAX as u32 || c.rate.denominator() > u16::MAX as u32 {
        return Err(Error::parameter("rate parts must fit in 16 bits"));
    }
    if c.channels > u16::MAX as usize {
        return Err(Error::parameter("channel count must fit in 16 bits"));
    }
    if c.original_length > u32::MAX as usize
        || c.y_len > u32::MAX as usize
        || c.protected_indices.len() > u32::MAX as usize
    {
        return Err(Error::parameter("lengths must fit in 32 bits"));
    }
    let p = c.protected_indices.len();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * p + 4 * p * c.channels + 4 * c.y.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(c.original_length as u32).to_le_bytes());
    out.extend_from_slice(&(c.channels as u16).to_le_bytes());
    out.extend_from_slice(&(c.sample_rate as f32).to_le_bytes());
    out.extend_from_slice(&(c.rate.numerator() as u16).to_le_bytes());
    out.extend_from_slice(&(c.rate.denominator() as u16).to_le_bytes());
    out.extend_from_slice(&(p as u32).to_le_bytes());
    out.extend_from_slice(&(c.y_len as u32).to_le_bytes());
    for &idx in &c.protected_indices {
        out.extend_from_slice(&idx.to_le_bytes());
    }
    for &v in &c.verbatim {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &v in &c.y {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parse a container byte stream.
///
/// This checks byte-level structure only (magic, version, counts consistent
/// with the stream length, sane segment geometry). Semantic consistency of
/// the metadata is the reconstruction step's concern, so that a damaged but
/// parseable container can still be recovered by interpolation.
pub fn deserialize(bytes: &[u8]) -> Result<CompressedSegment> {
    let mut r = Reader::new(bytes);
    let magic = r.take(4, "magic")?;
    if magic != MAGIC {
        return Err(Error::format(0, "bad magic (not an ADCR container)"));
    }
    let version = r.u16("version")?;
    if version != VERSION {
        return Err(Error::format(4, format!("unsupported version {version}")));
    }
    let n = r.u32("segment length")? as usize;
    let channels = r.u16("channel count")? as usize;
    let fs_offset = r.offset;
    let fs = r.f32("sample rate")?;
    let u = r.u16("rate numerator")?;
    let d = r.u16("rate denominator")?;
    let protected_count = r.u32("protected count")? as usize;
    let y_len = r.u32("y length")? as usize;

    if n < 2 {
        return Err(Error::format(6, format!("segment length {n} below minimum 2")));
    }
    if channels == 0 {
        return Err(Error::format(10, "zero channels"));
    }
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::format(fs_offset, format!("invalid sample rate {fs}")));
    }

    // the payload size is fully determined by the header; checking it up
    // front also bounds the allocations below
    let expected = HEADER_LEN as u64
        + 4 * (protected_count as u64 + protected_count as u64 * channels as u64
            + y_len as u64 * channels as u64);
    if bytes.len() as u64 != expected {
        return Err(Error::format(
            HEADER_LEN,
            format!("payload is {} bytes, header implies {expected}", bytes.len()),
        ));
    }

    let mut protected_indices = Vec::with_capacity(protected_count);
    for _ in 0..protected_count {
        protected_indices.push(r.u32("protected index")?);
    }
    let mut verbatim = Vec::with_capacity(protected_count * channels);
    for _ in 0..protected_count * channels {
        verbatim.push(r.f32("verbatim sample")?);
    }
    let mut y = Vec::with_capacity(y_len * channels);
    for _ in 0..y_len * channels {
        y.push(r.f32("low-rate sample")?);
    }

    if u == 0 || d == 0 {
        return Err(Error::format(14, format!("rate {u}/{d} has a zero part")));
    }
    Ok(CompressedSegment {
        y,
        y_len,
        protected_indices,
        verbatim,
        rate: RationalRate::new(u as u32, d as u32)?,
        original_length: n,
        channels,
        sample_rate: fs as f64,
    })
}

/// Write a container file.
pub fn write_container(path: &Path, c: &CompressedSegment) -> Result<()> {
    fs::write(path, serialize(c)?)?;
    Ok(())
}

/// Read a container file.
pub fn read_container(path: &Path) -> Result<CompressedSegment> {
    deserialize(&fs::read(path)?)
}

/// Serialize a raw segment to the flat exchange format.
pub fn serialize_raw(segment: &Segment) -> Vec<u8> {
    let n = segment.num_samples();
    let c = segment.num_channels();
    let mut out = Vec::with_capacity(10 + 4 * n * c);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(c as u16).to_le_bytes());
    out.extend_from_slice(&(segment.sample_rate() as f32).to_le_bytes());
    for &v in segment.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parse the flat raw segment format.
pub fn deserialize_raw(bytes: &[u8]) -> Result<Segment> {
    let mut r = Reader::new(bytes);
    let n = r.u32("segment length")? as usize;
    let channels = r.u16("channel count")? as usize;
    let fs = r.f32("sample rate")?;
    let mut data = Vec::with_capacity(n * channels);
    for _ in 0..n * channels {
        data.push(r.f32("sample")?);
    }
    if r.offset != bytes.len() {
        return Err(Error::format(r.offset, "trailing bytes after raw segment"));
    }
    Segment::new(channels, n, fs as f64, data)
}

/// Write a raw segment file.
pub fn write_raw_segment(path: &Path, segment: &Segment) -> Result<()> {
    fs::write(path, serialize_raw(segment))?;
    Ok(())
}

/// Read a raw segment file.
pub fn read_raw_segment(path: &Path) -> Result<Segment> {
    deserialize_raw(&fs::read(path)?)
}
