//! On-disk formats: grid dumps, decomposition dumps, CSV exports and heatmaps.
//!
//! All binary data is little-endian.

use std::path::Path;

use ndarray::{Array2, IxDyn};
use sha2::{Digest, Sha256};
use waveleton_core::diagnostics::{DiagnosticsRecord, Label};
use waveleton_core::mra::{MraDecomposition, WaveletSpec};
use waveleton_core::phasespace::{Boundary, PhaseGrid, WignerState};

use crate::error::{RunError, RunResult};

pub const WIGR_MAGIC: &[u8; 4] = b"WIGR";
pub const MRAD_MAGIC: &[u8; 4] = b"MRAD";
pub const FORMAT_VERSION: u32 = 1;
/// magic, version, n_q, n_p, then four f64 bounds.
pub const WIGR_HEADER_LEN: usize = 48;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> RunResult<()> {
    std::fs::write(path, bytes).map_err(|e| RunError::io(path, e))
}

pub fn read_file(path: &Path) -> RunResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| RunError::io(path, e))
}

pub fn encode_wigr(w: &WignerState) -> Vec<u8> {
    let g = &w.grid;
    let mut out = Vec::with_capacity(WIGR_HEADER_LEN + 8 * w.values.len());
    out.extend_from_slice(WIGR_MAGIC);
    for v in [FORMAT_VERSION, g.n_q as u32, g.n_p as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for b in [g.q_min, g.q_max, g.p_min, g.p_max] {
        out.extend_from_slice(&b.to_le_bytes());
    }
    for v in w.values.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Contents of a grid dump.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDump {
    pub n_q: usize,
    pub n_p: usize,
    pub bounds: [f64; 4],
    pub values: Array2<f64>,
}

impl GridDump {
    pub fn into_state(self, boundary: Boundary, hbar: f64, mass: f64, time: f64) -> RunResult<WignerState> {
        let [q_min, q_max, p_min, p_max] = self.bounds;
        let grid = PhaseGrid { n_q: self.n_q, n_p: self.n_p, q_min, q_max, p_min, p_max, boundary };
        Ok(WignerState::new(grid, self.values, hbar, mass, time)?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    file: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> RunResult<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| RunError::format(self.file, format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> RunResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> RunResult<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> RunResult<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64s(&mut self, n: usize) -> RunResult<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| RunError::format(self.file, "block too large"))?)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }

    fn magic(&mut self, want: &[u8; 4]) -> RunResult<()> {
        if self.take(4)? != want {
            return Err(RunError::format(self.file, format!("bad magic, expected {}", String::from_utf8_lossy(want))));
        }
        let version = self.u32()?;
        if version != FORMAT_VERSION {
            return Err(RunError::format(self.file, format!("unsupported version {version}")));
        }
        Ok(())
    }

    fn finish(&self) -> RunResult<()> {
        if self.pos != self.bytes.len() {
            return Err(RunError::format(self.file, format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }
}

/// `file` only labels errors.
pub fn decode_wigr(bytes: &[u8], file: &Path) -> RunResult<GridDump> {
    let mut r = Reader { bytes, pos: 0, file };
    r.magic(WIGR_MAGIC)?;
    let n_q = r.u32()? as usize;
    let n_p = r.u32()? as usize;
    let bounds = [r.f64()?, r.f64()?, r.f64()?, r.f64()?];
    let values = r.f64s(n_q * n_p)?;
    r.finish()?;
    let values = Array2::from_shape_vec((n_q, n_p), values).map_err(|e| RunError::format(file, e.to_string()))?;
    Ok(GridDump { n_q, n_p, bounds, values })
}

/// Header `MRAD`, version, i_c, finest level, filter id, rank and shape,
/// block count; then each block as a u64 length followed by its values
/// (approximation first, then `D_j` coarse to fine).
pub fn encode_mrad(d: &MraDecomposition) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MRAD_MAGIC);
    let shape = d.shape();
    let mut head = vec![FORMAT_VERSION, d.coarsest_level as u32, d.finest_level() as u32, d.wavelet.filter_id(), shape.len() as u32];
    head.extend(shape.iter().map(|&n| n as u32));
    let blocks = d.blocks();
    head.push(blocks.len() as u32);
    for v in head {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for b in &blocks {
        out.extend_from_slice(&(b.len() as u64).to_le_bytes());
        for v in b {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_mrad(bytes: &[u8], file: &Path) -> RunResult<MraDecomposition> {
    let mut r = Reader { bytes, pos: 0, file };
    r.magic(MRAD_MAGIC)?;
    let coarsest = r.u32()? as usize;
    let finest = r.u32()? as usize;
    let wavelet = WaveletSpec::from_filter_id(r.u32()?)?;
    let rank = r.u32()? as usize;
    if rank == 0 || rank > 4 {
        return Err(RunError::format(file, format!("rank {rank}")));
    }
    let shape: Vec<usize> = (0..rank).map(|_| r.u32().map(|v| v as usize)).collect::<RunResult<_>>()?;
    let count = r.u32()? as usize;
    if finest < coarsest || count != finest - coarsest + 1 {
        return Err(RunError::format(file, format!("{count} blocks for levels {coarsest}..={finest}")));
    }
    let mut blocks = Vec::with_capacity(count);
    for _ in 0..count {
        let n = r.u64()? as usize;
        blocks.push(r.f64s(n)?);
    }
    r.finish()?;
    let d = MraDecomposition::from_blocks(&shape, coarsest, finest - coarsest, wavelet, &blocks)?;
    debug_assert_eq!(d.coeffs.raw_dim(), IxDyn(&shape));
    Ok(d)
}

/// `q,p,W` rows, q outer.
pub fn snapshot_csv(w: &WignerState) -> String {
    let mut s = String::from("q,p,W\n");
    for ((i, k), v) in w.values.indexed_iter() {
        s.push_str(&format!("{},{},{}\n", w.grid.q(i), w.grid.p(k), v));
    }
    s
}

/// Diverging map: zero is mid-gray, positive values run to red and
/// negative ones to blue, scaled by `max|W|`.
pub fn diverging_rgb(t: f64) -> [u8; 3] {
    let t = t.clamp(-1.0, 1.0);
    let hot = (128.0 + 127.0 * t.abs()).round() as u8;
    let cold = (128.0 * (1.0 - t.abs())).round() as u8;
    if t >= 0.0 {
        [hot, cold, cold]
    } else {
        [cold, cold, hot]
    }
}

/// Binary PPM with `q` left to right and `p` bottom to top.
pub fn heatmap_ppm(w: &WignerState) -> Vec<u8> {
    let (nq, np) = w.grid.shape();
    let scale = w.max_abs();
    let mut out = format!("P6\n{nq} {np}\n255\n").into_bytes();
    for k in (0..np).rev() {
        for i in 0..nq {
            let t = if scale > 0.0 { w.values[[i, k]] / scale } else { 0.0 };
            out.extend_from_slice(&diverging_rgb(t));
        }
    }
    out
}

pub const DIAGNOSTICS_HEADER: [&str; 7] = ["t", "norm", "purity", "entropy", "negativity", "localization", "label"];

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DIAGNOSTICS_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.time.to_string(),
            r.norm.to_string(),
            r.purity.to_string(),
            r.entropy.to_string(),
            r.negativity.to_string(),
            r.localization.to_string(),
            r.label.name().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

/// Reads records back; `count` is not stored and must be supplied.
pub fn parse_diagnostics_csv(text: &str, count: usize, file: &Path) -> RunResult<Vec<DiagnosticsRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| RunError::format(file, e.to_string()))?;
    if header.iter().ne(DIAGNOSTICS_HEADER) {
        return Err(RunError::format(file, "unexpected diagnostics columns"));
    }
    let mut out = Vec::new();
    for (row, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| RunError::format(file, e.to_string()))?;
        let num = |i: usize| -> RunResult<f64> {
            rec[i].parse().map_err(|_| RunError::format(file, format!("row {}: bad {}", row + 1, DIAGNOSTICS_HEADER[i])))
        };
        out.push(DiagnosticsRecord {
            time: num(0)?,
            norm: num(1)?,
            purity: num(2)?,
            entropy: num(3)?,
            negativity: num(4)?,
            localization: num(5)?,
            count,
            label: Label::from_name(&rec[6])?,
        });
    }
    Ok(out)
}
