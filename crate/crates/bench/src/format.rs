//! On-disk formats.
//!
//! Signals and datasets share one little-endian binary layout:
//!
//! ```text
//! header:  version u64 | N u64 | M u64 | Q u64 | dt f64
//! record:  J u64 | J × (amplitude, phase, damping, frequency) f64
//!          | M × mask index u32 (one-based, increasing)
//!          | N × (re, im) f64 clean signal
//!          | M × (re, im) f64 measurements
//! ```
//!
//! A single signal is a file with `Q = 1`. A reconstruction is written as a
//! record with `J = 0` whose signal block holds the estimate. Masks on their
//! own are stored as JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use hankel_core::signal::{ExponentialComponent, ExponentialModel};
use hankel_core::{Pattern, SamplingMask, C64};
use serde::{Deserialize, Serialize};

use crate::error::{format_err, Result};

pub const FORMAT_VERSION: u64 = 1;

/// Upper bound on the component count accepted when reading, so a corrupt
/// file cannot request a huge allocation.
const MAX_COMPONENTS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub version: u64,
    /// Signal length `N`.
    pub n: u64,
    /// Measurements per record `M`.
    pub m: u64,
    /// Record count `Q`.
    pub count: u64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// `(amplitude, phase, damping, frequency)` per component.
    pub params: Vec<[f64; 4]>,
    /// One-based sampled indices.
    pub mask: Vec<u32>,
    /// Clean signal, or the estimate in a reconstruction file.
    pub x: Vec<C64>,
    /// Measurements at the mask positions.
    pub y: Vec<C64>,
}

impl Record {
    pub fn from_model(model: Option<&ExponentialModel>, mask: &SamplingMask, x: Vec<C64>, y: Vec<C64>) -> Self {
        let params = model
            .map(|m| {
                m.components()
                    .iter()
                    .map(|c| [c.amplitude, c.phase, c.damping, c.frequency])
                    .collect()
            })
            .unwrap_or_default();
        Self {
            params,
            mask: mask.indices_one_based(),
            x,
            y,
        }
    }

    /// The stored model, or `None` for a record without parameters.
    pub fn model(&self, dt: f64) -> Result<Option<ExponentialModel>> {
        if self.params.is_empty() {
            return Ok(None);
        }
        let components = self
            .params
            .iter()
            .map(|&[a, phi, tau, f]| ExponentialComponent::new(a, phi, tau, f))
            .collect::<hankel_core::Result<Vec<_>>>()?;
        Ok(Some(ExponentialModel::new(components, dt)?))
    }

    /// The mask as a [`SamplingMask`]. The binary layout does not store the
    /// pattern that produced it, so the caller supplies the label.
    pub fn sampling_mask(&self, pattern: Pattern) -> Result<SamplingMask> {
        Ok(SamplingMask::from_one_based(self.x.len(), &self.mask, pattern)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: Header,
    pub records: Vec<Record>,
}

impl Dataset {
    /// Builds a dataset and its header, checking that every record has the
    /// same `N` and `M`.
    pub fn new(dt: f64, records: Vec<Record>) -> Result<Self> {
        let first = records.first().ok_or_else(|| format_err("a dataset needs at least one record"))?;
        let (n, m) = (first.x.len(), first.mask.len());
        for (i, r) in records.iter().enumerate() {
            check_record(r, n, m).map_err(|e| format_err(format!("record {i}: {e}")))?;
        }
        Ok(Self {
            header: Header {
                version: FORMAT_VERSION,
                n: n as u64,
                m: m as u64,
                count: records.len() as u64,
                dt,
            },
            records,
        })
    }
}

fn check_record(r: &Record, n: usize, m: usize) -> std::result::Result<(), String> {
    if r.x.len() != n {
        return Err(format!("signal has {} samples, expected {n}", r.x.len()));
    }
    if r.mask.len() != m || r.y.len() != m {
        return Err(format!(
            "mask has {} and measurements {} entries, expected {m}",
            r.mask.len(),
            r.y.len()
        ));
    }
    if r.mask.first().is_some_and(|&i| i == 0)
        || r.mask.last().is_some_and(|&i| i as usize > n)
        || r.mask.windows(2).any(|w| w[0] >= w[1])
    {
        return Err("mask indices must be one-based, increasing and at most N".into());
    }
    Ok(())
}

fn put_u64(w: &mut impl Write, v: u64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn put_complex(w: &mut impl Write, v: &[C64]) -> Result<()> {
    for c in v {
        put_f64(w, c.re)?;
        put_f64(w, c.im)?;
    }
    Ok(())
}

fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => format_err("file ends inside a record"),
        _ => e.into(),
    })?;
    Ok(buf)
}

fn get_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(take(r)?))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_le_bytes(take(r)?))
}

fn get_complex(r: &mut impl Read, len: usize) -> Result<Vec<C64>> {
    (0..len)
        .map(|_| Ok(C64::new(get_f64(r)?, get_f64(r)?)))
        .collect()
}

pub fn write_dataset(w: &mut impl Write, ds: &Dataset) -> Result<()> {
    let h = &ds.header;
    put_u64(w, h.version)?;
    put_u64(w, h.n)?;
    put_u64(w, h.m)?;
    put_u64(w, h.count)?;
    put_f64(w, h.dt)?;
    for rec in &ds.records {
        put_u64(w, rec.params.len() as u64)?;
        for p in rec.params.iter().flatten() {
            put_f64(w, *p)?;
        }
        for &i in &rec.mask {
            w.write_all(&i.to_le_bytes())?;
        }
        put_complex(w, &rec.x)?;
        put_complex(w, &rec.y)?;
    }
    Ok(())
}

pub fn read_dataset(r: &mut impl Read) -> Result<Dataset> {
    let header = Header {
        version: get_u64(r)?,
        n: get_u64(r)?,
        m: get_u64(r)?,
        count: get_u64(r)?,
        dt: get_f64(r)?,
    };
    if header.version != FORMAT_VERSION {
        return Err(format_err(format!(
            "format version {} is not supported (expected {FORMAT_VERSION})",
            header.version
        )));
    }
    if header.m > header.n || header.count == 0 {
        return Err(format_err(format!(
            "header N={} M={} Q={} is inconsistent",
            header.n, header.m, header.count
        )));
    }
    let (n, m) = (header.n as usize, header.m as usize);
    let mut records = Vec::new();
    for i in 0..header.count {
        let j = get_u64(r)?;
        if j > MAX_COMPONENTS {
            return Err(format_err(format!("record {i} claims {j} components")));
        }
        let params = (0..j)
            .map(|_| Ok([get_f64(r)?, get_f64(r)?, get_f64(r)?, get_f64(r)?]))
            .collect::<Result<Vec<_>>>()?;
        let mask = (0..m)
            .map(|_| Ok(u32::from_le_bytes(take(r)?)))
            .collect::<Result<Vec<_>>>()?;
        let x = get_complex(r, n)?;
        let y = get_complex(r, m)?;
        let rec = Record { params, mask, x, y };
        check_record(&rec, n, m).map_err(|e| format_err(format!("record {i}: {e}")))?;
        records.push(rec);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(format_err("trailing bytes after the last record"));
    }
    Ok(Dataset { header, records })
}

pub fn write_dataset_file(path: &Path, ds: &Dataset) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dataset(&mut w, ds)?;
    w.flush()?;
    Ok(())
}

pub fn read_dataset_file(path: &Path) -> Result<Dataset> {
    read_dataset(&mut BufReader::new(File::open(path)?))
}

/// JSON form of a sampling mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskFile {
    pub n: usize,
    pub pattern: Pattern,
    pub rate: f64,
    pub seed: u64,
    /// One-based sampled indices.
    pub indices: Vec<u32>,
}

impl MaskFile {
    pub fn new(mask: &SamplingMask, seed: u64) -> Self {
        Self {
            n: mask.n(),
            pattern: mask.pattern(),
            rate: mask.rate(),
            seed,
            indices: mask.indices_one_based(),
        }
    }

    pub fn mask(&self) -> Result<SamplingMask> {
        Ok(SamplingMask::from_one_based(self.n, &self.indices, self.pattern)?)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
