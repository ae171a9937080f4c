use super::ClickRecord;
use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};

pub const CLICK_MAGIC: [u8; 8] = *b"QFCLICKS";
pub const CLICK_VERSION: u16 = 1;
const HEADER_LEN: usize = 16;
const RECORD_LEN: usize = 9;

/// Binary click file: 8-byte magic, u16 version, 6 reserved bytes, then one
/// `(u8 channel, u64 timestamp_ps)` little-endian record per click.
pub fn write_clicks<W: Write>(writer: W, clicks: &[ClickRecord]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let mut header = [0u8; HEADER_LEN];
    header[..8].copy_from_slice(&CLICK_MAGIC);
    header[8..10].copy_from_slice(&CLICK_VERSION.to_le_bytes());
    w.write_all(&header)?;
    for c in clicks {
        w.write_all(&[c.channel])?;
        w.write_all(&c.timestamp.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_clicks<R: Read>(reader: R) -> Result<Vec<ClickRecord>> {
    let mut r = BufReader::new(reader);
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(|_| Error::Format("truncated header".into()))?;
    if header[..8] != CLICK_MAGIC {
        return Err(Error::Format("not a click file".into()));
    }
    let version = u16::from_le_bytes([header[8], header[9]]);
    if version != CLICK_VERSION {
        return Err(Error::Format(format!("unsupported click file version {version}")));
    }
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() % RECORD_LEN != 0 {
        return Err(Error::Format("trailing partial record".into()));
    }
    body.chunks_exact(RECORD_LEN)
        .map(|rec| {
            let channel = rec[0];
            if !(1..=3).contains(&channel) {
                return Err(Error::Format(format!("invalid channel {channel}")));
            }
            let timestamp = u64::from_le_bytes(rec[1..].try_into().expect("8 bytes"));
            Ok(ClickRecord { channel, timestamp })
        })
        .collect()
}

pub fn write_clicks_csv<W: Write>(writer: W, clicks: &[ClickRecord]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "channel,timestamp_ps")?;
    for c in clicks {
        writeln!(w, "{},{}", c.channel, c.timestamp)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_clicks_csv<R: Read>(reader: R) -> Result<Vec<ClickRecord>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("channel")) {
            continue;
        }
        let bad = || Error::Format(format!("line {}: expected channel,timestamp_ps", i + 1));
        let (c, t) = line.split_once(',').ok_or_else(bad)?;
        let channel: u8 = c.trim().parse().map_err(|_| bad())?;
        let timestamp: u64 = t.trim().parse().map_err(|_| bad())?;
        if !(1..=3).contains(&channel) {
            return Err(Error::Format(format!("line {}: invalid channel {channel}", i + 1)));
        }
        out.push(ClickRecord { channel, timestamp });
    }
    Ok(out)
}
