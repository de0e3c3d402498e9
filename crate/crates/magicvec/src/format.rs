//! Binary state files.
//!
//! Both formats share an 8-byte little-endian header:
//!
//! | bytes | field                          |
//! |-------|--------------------------------|
//! | 0..4  | magic, `MVEC` or `MRHO`        |
//! | 4     | format version (`1`)           |
//! | 5     | local dimension `d`            |
//! | 6..8  | number of sites `N`, `u16`     |
//!
//! `MVEC` is followed by the `d^N` amplitudes, `MRHO` by the `d^N × d^N`
//! density matrix in column-major order. Complex entries are stored as
//! interleaved `f64` pairs `(re, im)`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use magicvec_core::{Complex64, DensityMatrix, StateVector};

pub const VERSION: u8 = 1;
pub const STATE_MAGIC: &[u8; 4] = b"MVEC";
pub const RHO_MAGIC: &[u8; 4] = b"MRHO";

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub magic: [u8; 4],
    pub version: u8,
    pub local_dim: u8,
    pub sites: u16,
}

impl Header {
    fn write(&self, w: &mut impl Write) -> io::Result<()> {
        w.write_all(&self.magic)?;
        w.write_all(&[self.version, self.local_dim])?;
        w.write_all(&self.sites.to_le_bytes())
    }

    fn read(r: &mut impl Read, expected: &[u8; 4]) -> io::Result<Self> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        let magic = [buf[0], buf[1], buf[2], buf[3]];
        if &magic != expected {
            return Err(invalid(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&magic),
                String::from_utf8_lossy(expected)
            )));
        }
        if buf[4] != VERSION {
            return Err(invalid(format!("unsupported format version {}", buf[4])));
        }
        Ok(Self {
            magic,
            version: buf[4],
            local_dim: buf[5],
            sites: u16::from_le_bytes([buf[6], buf[7]]),
        })
    }

    fn side(&self) -> io::Result<usize> {
        let d = usize::from(self.local_dim);
        if d != 2 && d != 3 {
            return Err(invalid(format!("local dimension {d} is not 2 or 3")));
        }
        d.checked_pow(u32::from(self.sites))
            .filter(|&n| n <= 1 << 40)
            .ok_or_else(|| invalid("state too large"))
    }
}

fn write_complex(w: &mut impl Write, data: &[Complex64]) -> io::Result<()> {
    for c in data {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_complex(r: &mut impl Read, len: usize) -> io::Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(len);
    let mut buf = [0u8; 16];
    for _ in 0..len {
        r.read_exact(&mut buf).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => invalid("payload is truncated"),
            _ => e,
        })?;
        let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
        out.push(Complex64::new(re, im));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(invalid("trailing bytes after payload"));
    }
    Ok(out)
}

fn sites_u16(sites: usize) -> io::Result<u16> {
    u16::try_from(sites).map_err(|_| invalid("too many sites for the file header"))
}

pub fn write_state(w: &mut impl Write, psi: &StateVector) -> io::Result<()> {
    Header {
        magic: *STATE_MAGIC,
        version: VERSION,
        local_dim: psi.local_dim() as u8,
        sites: sites_u16(psi.sites())?,
    }
    .write(w)?;
    write_complex(w, psi.amplitudes())
}

pub fn read_state(r: &mut impl Read) -> io::Result<StateVector> {
    let h = Header::read(r, STATE_MAGIC)?;
    let amps = read_complex(r, h.side()?)?;
    StateVector::from_amplitudes(usize::from(h.local_dim), usize::from(h.sites), amps)
        .map_err(|e| invalid(e.to_string()))
}

pub fn write_density(w: &mut impl Write, rho: &DensityMatrix) -> io::Result<()> {
    Header {
        magic: *RHO_MAGIC,
        version: VERSION,
        local_dim: rho.local_dim() as u8,
        sites: sites_u16(rho.sites())?,
    }
    .write(w)?;
    write_complex(w, rho.column_major())
}

pub fn read_density(r: &mut impl Read) -> io::Result<DensityMatrix> {
    let h = Header::read(r, RHO_MAGIC)?;
    let side = h.side()?;
    let data = read_complex(r, side * side)?;
    DensityMatrix::from_column_major(usize::from(h.local_dim), usize::from(h.sites), data)
        .map_err(|e| invalid(e.to_string()))
}

fn with_path<T>(path: &Path, r: io::Result<T>) -> io::Result<T> {
    r.map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

pub fn save_state(path: &Path, psi: &StateVector) -> io::Result<()> {
    with_path(path, (|| {
        let mut w = BufWriter::new(File::create(path)?);
        write_state(&mut w, psi)?;
        w.flush()
    })())
}

pub fn load_state(path: &Path) -> io::Result<StateVector> {
    with_path(path, File::open(path).and_then(|f| read_state(&mut BufReader::new(f))))
}

pub fn save_density(path: &Path, rho: &DensityMatrix) -> io::Result<()> {
    with_path(path, (|| {
        let mut w = BufWriter::new(File::create(path)?);
        write_density(&mut w, rho)?;
        w.flush()
    })())
}

pub fn load_density(path: &Path) -> io::Result<DensityMatrix> {
    with_path(path, File::open(path).and_then(|f| read_density(&mut BufReader::new(f))))
}

/// `1.0 MiB`-style byte count.
pub fn human_bytes(bytes: usize) -> String {
    const UNITS: [&str; 5] = ["B", "KiB", "MiB", "GiB", "TiB"];
    let mut value = bytes as f64;
    let mut unit = 0;
    while value >= 1024.0 && unit + 1 < UNITS.len() {
        value /= 1024.0;
        unit += 1;
    }
    if unit == 0 {
        format!("{bytes} B")
    } else {
        format!("{value:.1} {}", UNITS[unit])
    }
}
