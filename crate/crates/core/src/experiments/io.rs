//! Binary snapshots, grid sidecars and convergence reports.
//!
//! Snapshot layout (little endian): magic `CGLS`, version `u32`, order `d`
//! as `u32`, `d` extents as `u64`, time `f64`, component count `u32`, then
//! for each component the column-major `(re, im)` pairs as `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::convergence::ConvergenceReport;
use crate::error::{Error, Result};
use crate::tensor::ComplexTensor;
use crate::C64;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"CGLS";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub fields: Vec<ComplexTensor>,
}

pub fn write_snapshot(path: &Path, time: f64, fields: &[ComplexTensor]) -> Result<()> {
    let Some(first) = fields.first() else {
        return Err(Error::Snapshot("no components to write".into()));
    };
    if fields.iter().any(|f| f.shape() != first.shape()) {
        return Err(Error::Snapshot("components have different shapes".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(first.order() as u32).to_le_bytes())?;
    for &n in first.shape() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    w.write_all(&time.to_le_bytes())?;
    w.write_all(&(fields.len() as u32).to_le_bytes())?;
    for f in fields {
        for z in f.data() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Snapshot(format!("truncated file: {e}")))?;
    Ok(buf)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = BufReader::new(File::open(path)?);
    if &read_array::<4>(&mut r)? != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let order = u32::from_le_bytes(read_array(&mut r)?) as usize;
    if order == 0 || order > 16 {
        return Err(Error::Snapshot(format!("implausible order {order}")));
    }
    let shape = (0..order)
        .map(|_| Ok(u64::from_le_bytes(read_array(&mut r)?) as usize))
        .collect::<Result<Vec<_>>>()?;
    let time = f64::from_le_bytes(read_array(&mut r)?);
    let count = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let len = shape
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| Error::Snapshot("extent overflow".into()))?;
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            let re = f64::from_le_bytes(read_array(&mut r)?);
            let im = f64::from_le_bytes(read_array(&mut r)?);
            data.push(C64::new(re, im));
        }
        fields.push(ComplexTensor::new(shape.clone(), data)?);
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Snapshot(format!("{} trailing bytes", rest.len())));
    }
    Ok(Snapshot { time, fields })
}

/// One line per direction: `x<μ>` followed by the node coordinates.
pub fn write_grid_sidecar(path: &Path, nodes: &[Vec<f64>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (mu, xs) in nodes.iter().enumerate() {
        write!(w, "x{}", mu + 1)?;
        for x in xs {
            write!(w, " {x:?}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_sidecar(path: &Path) -> Result<Vec<Vec<f64>>> {
    std::fs::read_to_string(path)?
        .lines()
        .map(|line| {
            line.split_whitespace()
                .skip(1)
                .map(|t| t.parse::<f64>().map_err(|e| Error::Snapshot(format!("grid value '{t}': {e}"))))
                .collect()
        })
        .collect()
}

pub fn report_csv(report: &ConvergenceReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        w.serialize(row).map_err(|e| Error::Io(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Snapshot(e.to_string()))
}

pub fn report_json(report: &ConvergenceReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn write_report_csv(path: &Path, report: &ConvergenceReport) -> Result<()> {
    std::fs::write(path, report_csv(report)?)?;
    Ok(())
}

pub fn write_report_json(path: &Path, report: &ConvergenceReport) -> Result<()> {
    std::fs::write(path, report_json(report)?)?;
    Ok(())
}
