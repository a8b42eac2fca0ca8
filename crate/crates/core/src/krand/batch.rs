use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::krand::sampler::{IidSampler, KWiseSampler, KWiseSpec, Sampler};

/// How a batch was produced; enough to regenerate it bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Iid { n: usize, seed: u64, batch: u64 },
    Kwise { spec: KWiseSpec, seed: u64, batch: u64 },
    Expanded { base: Box<Provenance>, copies: usize, seed: u64 },
}

/// Row-major matrix of samples (rows are samples, columns coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    format: String,
    layout: String,
    shape: [usize; 2],
    provenance: Provenance,
}

pub(crate) fn fill_rows(sampler: &impl Sampler, count: usize) -> Vec<f64> {
    let cols = sampler.dim();
    let mut data = vec![0.0; count * cols];
    if cols > 0 {
        data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| sampler.sample_into(i as u64, row));
    }
    data
}

/// `count` samples of the `k`-wise family, batch 0.
pub fn sample_kwise(spec: KWiseSpec, seed: u64, count: usize) -> Result<SampleBatch> {
    sample_kwise_batch(spec, seed, 0, count)
}

pub fn sample_kwise_batch(spec: KWiseSpec, seed: u64, batch: u64, count: usize) -> Result<SampleBatch> {
    let s = KWiseSampler::new(spec, seed, batch)?;
    Ok(SampleBatch {
        rows: count,
        cols: spec.n,
        data: fill_rows(&s, count),
        provenance: Provenance::Kwise { spec, seed, batch },
    })
}

/// `count` samples of `n` iid standard Gaussians, batch 0.
pub fn sample_iid(n: usize, seed: u64, count: usize) -> SampleBatch {
    sample_iid_batch(n, seed, 0, count)
}

pub fn sample_iid_batch(n: usize, seed: u64, batch: u64, count: usize) -> SampleBatch {
    let s = IidSampler::new(n, seed, batch);
    SampleBatch { rows: count, cols: n, data: fill_rows(&s, count), provenance: Provenance::Iid { n, seed, batch } }
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.data[i * self.cols + j])
    }

    /// Sidecar path used by [`SampleBatch::write_binary`]: `<path>.json`.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }

    /// Little-endian `f64` matrix plus a JSON sidecar with shape and provenance.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(self.data.len() * 8);
        for v in &self.data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(path, bytes)?;
        let side = Sidecar {
            format: "f64-le".into(),
            layout: "row-major".into(),
            shape: [self.rows, self.cols],
            provenance: self.provenance.clone(),
        };
        std::fs::write(Self::sidecar_path(path), serde_json::to_string_pretty(&side)? + "\n")?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(Self::sidecar_path(path))?)?;
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let [rows, cols] = side.shape;
        if bytes.len() != rows * cols * 8 {
            return Err(invalid(format!("{} bytes do not match shape {rows}x{cols}", bytes.len())));
        }
        let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self { rows, cols, data, provenance: side.provenance })
    }

    /// CSV with header `x0,x1,...`; floats use shortest round-trip form.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let header: Vec<String> = (0..self.cols).map(|j| format!("x{j}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krand::{FieldSpec, Target};

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.bin");
        let spec = KWiseSpec { k: 2, field: FieldSpec::Prime(65537), n: 3, target: Target::Gaussian };
        let b = sample_kwise(spec, 3, 17).unwrap();
        b.write_binary(&path).unwrap();
        let back = SampleBatch::read_binary(&path).unwrap();
        assert_eq!(b, back);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let b = sample_iid(2, 1, 3);
        let mut out = Vec::new();
        b.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("x0,x1\n"));
        let v: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(v, b.data[0]);
    }
}
