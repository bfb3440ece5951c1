//! ADC data cube: complex baseband samples over (frame, antenna, fast time).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::config::RadarConfig;
use crate::error::{Error, Result};

/// Magic bytes at the start of a serialized cube.
pub const CUBE_MAGIC: [u8; 4] = *b"VWCB";
/// Current cube file format version.
pub const CUBE_VERSION: u16 = 1;

/// Complex ADC samples indexed `(frame m, antenna v, fast-time n)`,
/// stored slowest-to-fastest in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdcCube {
    config: RadarConfig,
    data: Vec<Complex64>,
}

impl AdcCube {
    /// All-zero cube with the dimensions of `config`.
    pub fn zeroed(config: RadarConfig) -> Result<Self> {
        config.validate()?;
        let len = config.sample_count();
        Ok(Self {
            config,
            data: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    /// Wrap existing samples. The sample count must match the config and
    /// every sample must be finite.
    pub fn from_data(config: RadarConfig, data: Vec<Complex64>) -> Result<Self> {
        config.validate()?;
        if data.len() != config.sample_count() {
            return Err(Error::Cube(format!(
                "sample count {} does not match config dimensions {}x{}x{}",
                data.len(),
                config.ns,
                config.nv,
                config.nf
            )));
        }
        if let Some(idx) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Cube(format!("non-finite sample at flat index {idx}")));
        }
        Ok(Self { config, data })
    }

    pub fn config(&self) -> &RadarConfig {
        &self.config
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn index(&self, m: usize, v: usize, n: usize) -> usize {
        (m * self.config.nv + v) * self.config.nf + n
    }

    #[inline]
    pub fn get(&self, m: usize, v: usize, n: usize) -> Complex64 {
        self.data[self.index(m, v, n)]
    }

    /// One frame as a `(v, n)` row-major slice of length `nv * nf`.
    pub fn frame(&self, m: usize) -> &[Complex64] {
        let stride = self.config.nv * self.config.nf;
        &self.data[m * stride..(m + 1) * stride]
    }

    /// Copy of the cube multiplied by a complex scalar.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            config: self.config.clone(),
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Sub-cube covering frames `[start, start + count)`.
    pub fn slice_frames(&self, start: usize, count: usize) -> Result<Self> {
        if count < 2 || start + count > self.config.ns {
            return Err(Error::Cube(format!(
                "frame slice [{start}, {}) out of range for ns = {} (need >= 2 frames)",
                start + count,
                self.config.ns
            )));
        }
        let stride = self.config.nv * self.config.nf;
        Ok(Self {
            config: self.config.with_ns(count),
            data: self.data[start * stride..(start + count) * stride].to_vec(),
        })
    }

    /// Serialize: 16-byte header (magic, version u16, ns u32, nv u16, nf u32,
    /// little endian) followed by interleaved `(re, im)` float32 samples in
    /// `(m, v, n)` order.
    pub fn write_to(&self, writer: &mut impl Write) -> Result<()> {
        writer.write_all(&CUBE_MAGIC)?;
        writer.write_all(&CUBE_VERSION.to_le_bytes())?;
        writer.write_all(&(self.config.ns as u32).to_le_bytes())?;
        writer.write_all(&(self.config.nv as u16).to_le_bytes())?;
        writer.write_all(&(self.config.nf as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.data.len() * 8);
        for z in &self.data {
            buf.extend_from_slice(&(z.re as f32).to_le_bytes());
            buf.extend_from_slice(&(z.im as f32).to_le_bytes());
        }
        writer.write_all(&buf)?;
        Ok(())
    }

    /// Deserialize a cube written by [`AdcCube::write_to`]. The header
    /// dimensions must match `config` exactly.
    pub fn read_from(reader: &mut impl Read, config: RadarConfig) -> Result<Self> {
        config.validate()?;
        let mut header = [0u8; 16];
        reader.read_exact(&mut header)?;
        if header[0..4] != CUBE_MAGIC {
            return Err(Error::Cube("bad magic, not a cube file".into()));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != CUBE_VERSION {
            return Err(Error::Cube(format!(
                "unsupported cube version {version}, expected {CUBE_VERSION}"
            )));
        }
        let ns = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
        let nv = u16::from_le_bytes(header[10..12].try_into().unwrap()) as usize;
        let nf = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        if ns != config.ns || nv != config.nv || nf != config.nf {
            return Err(Error::Cube(format!(
                "file dimensions {ns}x{nv}x{nf} do not match config {}x{}x{}",
                config.ns, config.nv, config.nf
            )));
        }
        let count = ns * nv * nf;
        let mut bytes = vec![0u8; count * 8];
        reader.read_exact(&mut bytes)?;
        let mut data = Vec::with_capacity(count);
        for chunk in bytes.chunks_exact(8) {
            let re = f32::from_le_bytes(chunk[0..4].try_into().unwrap()) as f64;
            let im = f32::from_le_bytes(chunk[4..8].try_into().unwrap()) as f64;
            data.push(Complex64::new(re, im));
        }
        Self::from_data(config, data)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = BufWriter::new(File::create(path)?);
        self.write_to(&mut writer)
    }

    pub fn load(path: impl AsRef<Path>, config: RadarConfig) -> Result<Self> {
        let mut reader = BufReader::new(File::open(path)?);
        Self::read_from(&mut reader, config)
    }

    /// Header-only peek at the dimensions of a cube file.
    pub fn peek_dims(path: impl AsRef<Path>) -> Result<(usize, usize, usize)> {
        let mut reader = BufReader::new(File::open(path)?);
        let mut header = [0u8; 16];
        reader.read_exact(&mut header)?;
        if header[0..4] != CUBE_MAGIC {
            return Err(Error::Cube("bad magic, not a cube file".into()));
        }
        let ns = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
        let nv = u16::from_le_bytes(header[10..12].try_into().unwrap()) as usize;
        let nf = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        Ok((ns, nv, nf))
    }
}
