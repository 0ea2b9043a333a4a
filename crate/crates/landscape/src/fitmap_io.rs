//! Binary PGM export of fitness maps and CSV export of point clouds.

use std::path::Path;

use landscape_core::fitmap::{CloudRecord, FitnessMap};

use crate::error::Result;
use crate::fmt_f64;

/// Gray level of a pixel: round(254 * v), so the best value is black and
/// the worst a light gray; empty pixels are white (255).
pub fn gray(pixel: Option<f64>) -> u8 {
    match pixel {
        Some(v) => (254.0 * v.clamp(0.0, 1.0)).round() as u8,
        None => 255,
    }
}

/// P5 bytes; the top image row holds the largest vertical coordinate.
pub fn to_pgm(map: &FitnessMap) -> Vec<u8> {
    let r = map.resolution();
    let mut out = format!("P5\n{r} {r}\n255\n").into_bytes();
    out.reserve(r * r);
    for iy in (0..r).rev() {
        for ix in 0..r {
            out.push(gray(map.get(ix, iy)));
        }
    }
    out
}

pub fn write_pgm(path: &Path, map: &FitnessMap) -> Result<()> {
    crate::write_file(path, &to_pgm(map))
}

pub fn cloud_to_csv(records: &[CloudRecord], dim: usize) -> String {
    let k = records.first().map_or(0, |r| r.neighbors.len());
    let mut header: Vec<String> = (0..dim).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    for m in 1..=k {
        header.extend((0..dim).map(|j| format!("n{m}_x{j}")));
        header.push(format!("n{m}_y"));
    }
    let mut out = header.join(",");
    out.push('\n');
    for rec in records {
        let fields: Vec<String> = rec.values.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
