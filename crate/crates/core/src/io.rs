//! Plain-text and binary output formats.
//!
//! CSV files carry a header row and use Rust's shortest round-trip float
//! formatting, so identical values always produce identical bytes. Heatmaps
//! are binary 8-bit PGM (`P5`) with the highest P at the top row.

use std::io::{self, Read, Write};

use ndarray::Array2;
use num_complex::Complex64;

use crate::classical::WebHistogram;
use crate::fockspace::{FloquetOperator, FockVector};
use crate::grid::GridSpec;
use crate::params::PhasePoint;
use crate::protocol::{OverlapRecord, QGrid};

pub fn write_web_csv<W: Write>(mut w: W, hist: &WebHistogram) -> io::Result<()> {
    writeln!(w, "x_index,p_index,count")?;
    for ix in 0..hist.grid.nx {
        for ip in 0..hist.grid.np {
            writeln!(w, "{ix},{ip},{}", hist.count(ix, ip))?;
        }
    }
    Ok(())
}

/// One CSV row per record; `o_reconstructed` is left empty at singular indices.
pub fn write_overlap_csv<W: Write>(
    mut w: W,
    records: &[OverlapRecord],
    reconstructed: &[Option<f64>],
) -> io::Result<()> {
    writeln!(w, "n,re_cross,im_cross,O,P_g,P_g_prime,det,O_reconstructed")?;
    for (r, rec) in records.iter().zip(reconstructed) {
        write!(
            w,
            "{},{},{},{},{},{},{},",
            r.n, r.cross.re, r.cross.im, r.overlap, r.p_g, r.p_g_prime, r.det
        )?;
        match rec {
            Some(o) => writeln!(w, "{o}")?,
            None => writeln!(w)?,
        }
    }
    Ok(())
}

/// `X,P,Q` at cell centres; masked cells are written as `nan`.
pub fn write_q_csv<W: Write>(mut w: W, q: &QGrid) -> io::Result<()> {
    writeln!(w, "X,P,Q")?;
    for ix in 0..q.grid.nx {
        for ip in 0..q.grid.np {
            let c = q.grid.center(ix, ip);
            if q.masked[ix * q.grid.np + ip] {
                writeln!(w, "{},{},nan", c.x, c.p)?;
            } else {
                writeln!(w, "{},{},{}", c.x, c.p, q.value(ix, ip))?;
            }
        }
    }
    Ok(())
}

pub fn write_state_csv<W: Write>(mut w: W, psi: &FockVector) -> io::Result<()> {
    writeln!(w, "n,re,im")?;
    for (n, c) in psi.amplitudes.iter().enumerate() {
        writeln!(w, "{n},{},{}", c.re, c.im)?;
    }
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(mut w: W, rows: &[(u64, PhasePoint, f64)]) -> io::Result<()> {
    writeln!(w, "n,X,P,leakage")?;
    for (n, pp, leak) in rows {
        writeln!(w, "{n},{},{},{leak}", pp.x, pp.p)?;
    }
    Ok(())
}

/// Grey levels for cell values laid out `[ix * np + ip]`.
pub fn write_pgm<W: Write>(mut w: W, grid: &GridSpec, levels: &[u8]) -> io::Result<()> {
    write!(w, "P5\n{} {}\n255\n", grid.nx, grid.np)?;
    let mut row = vec![0u8; grid.nx];
    for ip in (0..grid.np).rev() {
        for (ix, px) in row.iter_mut().enumerate() {
            *px = levels[ix * grid.np + ip];
        }
        w.write_all(&row)?;
    }
    Ok(())
}

/// `255·ln(1+c)/ln(1+max)`.
pub fn log_levels(counts: &[u64]) -> Vec<u8> {
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![0; counts.len()];
    }
    let denom = (1.0 + max as f64).ln();
    counts
        .iter()
        .map(|&c| ((1.0 + c as f64).ln() / denom * 255.0).round() as u8)
        .collect()
}

/// `255·v/max`.
pub fn linear_levels(values: &[f64]) -> Vec<u8> {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|&v| (v.max(0.0) / max * 255.0).round() as u8)
        .collect()
}

const OPERATOR_MAGIC: &[u8; 8] = b"DKHOFLQ1";

/// Binary operator dump: the 8-byte magic `DKHOFLQ1`, then little-endian
/// `u64 N`, `f64 κ`, `f64 η`, `f64 θ`, then `N²` row-major `(re, im)` `f64` pairs.
pub fn write_operator<W: Write>(mut w: W, f: &FloquetOperator) -> io::Result<()> {
    w.write_all(OPERATOR_MAGIC)?;
    w.write_all(&(f.dim() as u64).to_le_bytes())?;
    for v in [f.kappa, f.eta, f.theta] {
        w.write_all(&v.to_le_bytes())?;
    }
    for z in f.matrix.iter() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_operator<R: Read>(mut r: R) -> io::Result<FloquetOperator> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != OPERATOR_MAGIC {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "not a Floquet operator dump",
        ));
    }
    let mut buf = [0u8; 8];
    let mut next_f64 = |r: &mut R| -> io::Result<f64> {
        r.read_exact(&mut buf)?;
        Ok(f64::from_le_bytes(buf))
    };
    let mut nb = [0u8; 8];
    r.read_exact(&mut nb)?;
    let n = u64::from_le_bytes(nb) as usize;
    let kappa = next_f64(&mut r)?;
    let eta = next_f64(&mut r)?;
    let theta = next_f64(&mut r)?;
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re = next_f64(&mut r)?;
        let im = next_f64(&mut r)?;
        data.push(Complex64::new(re, im));
    }
    let matrix = Array2::from_shape_vec((n, n), data)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    Ok(FloquetOperator {
        matrix,
        kappa,
        eta,
        theta,
    })
}
