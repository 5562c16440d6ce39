//! Artifact writers: CSV field dumps, PGM heatmaps, content hashes.
//!
//! CSV files carry one header line and one row per lattice node, in node-id
//! order. Tick-valued quantities are printed in cost units with nine decimal
//! places (full tick precision) so identical fields serialize to identical
//! bytes regardless of worker count; unreachable values print as `inf`.
//!
//! Heatmaps are binary PGM (P5, maxval 255). Finite values map linearly onto
//! gray levels 0..=254 over the [min, max] range recorded in the image
//! comment; gray 255 is reserved as the sentinel for infinite values. Images
//! cover the first two axes of the lattice; higher-dimensional fields are
//! sliced at the midpoint of every remaining axis. Row 0 is the highest
//! second-axis coordinate so the image reads like a conventional plot.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::clearance::{ClearanceField, EnvelopeMap};
use crate::cost::{self, INF};
use crate::error::Result;
use crate::reach::CostField;
use crate::scene::Lattice;

/// Fixed-precision rendering of a tick count in cost units.
pub fn fmt_ticks(ticks: u64) -> String {
    if ticks == INF {
        "inf".to_string()
    } else {
        format!("{:.9}", ticks as f64 / cost::TICKS_PER_UNIT)
    }
}

fn fmt_coords(out: &mut String, lattice: &Lattice, node: usize) {
    for c in lattice.coords(node) {
        let _ = write!(out, "{c},");
    }
}

/// Cost field dump: coordinates, value, backpointer node id (empty if none).
pub fn write_cost_csv(path: &Path, lattice: &Lattice, field: &CostField) -> Result<()> {
    let dim = lattice.shape.len();
    let mut s = String::new();
    for a in 0..dim {
        let _ = write!(s, "x{a},");
    }
    s.push_str("value,backpointer\n");
    for id in 0..lattice.node_count() {
        fmt_coords(&mut s, lattice, id);
        let _ = write!(s, "{},", fmt_ticks(field.ticks[id]));
        if let Some((bp, _, _)) = field.backpointer[id] {
            let _ = write!(s, "{bp}");
        }
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

/// Clearance dump: coordinates, clearance, witness node id (empty if none).
pub fn write_clearance_csv(path: &Path, lattice: &Lattice, cf: &ClearanceField) -> Result<()> {
    let dim = lattice.shape.len();
    let mut s = String::new();
    for a in 0..dim {
        let _ = write!(s, "x{a},");
    }
    s.push_str("clearance,witness\n");
    for id in 0..lattice.node_count() {
        fmt_coords(&mut s, lattice, id);
        let _ = write!(s, "{},", fmt_ticks(cf.clr_ticks(id)));
        if let Some(w) = cf.witness[id] {
            let _ = write!(s, "{w}");
        }
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

/// Envelope dump: coordinates, rho_min, rho_max, jump, flags.
pub fn write_envelope_csv(path: &Path, lattice: &Lattice, em: &EnvelopeMap) -> Result<()> {
    let dim = lattice.shape.len();
    let mut s = String::new();
    for a in 0..dim {
        let _ = write!(s, "x{a},");
    }
    s.push_str("rho_min,rho_max,jump,envelope,boundary_adjacent\n");
    for id in 0..lattice.node_count() {
        fmt_coords(&mut s, lattice, id);
        let _ = write!(
            s,
            "{},{},{},{},{}",
            fmt_ticks(em.rho_min[id]),
            fmt_ticks(em.rho_max[id]),
            fmt_ticks(em.jump[id]),
            u8::from(em.envelope[id]),
            u8::from(em.boundary_adjacent[id]),
        );
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

/// Node ids of the 2D slice used for heatmaps: all of axes 0 and 1, remaining
/// axes pinned at their middle index. Returned in (row, col) raster order with
/// row 0 at the top (largest axis-1 coordinate).
fn heatmap_slice(lattice: &Lattice) -> (usize, usize, Vec<usize>) {
    let shape = &lattice.shape;
    let (w, h) = (shape[0], shape[1]);
    let mut index = vec![0usize; shape.len()];
    for (a, &n) in shape.iter().enumerate().skip(2) {
        index[a] = n / 2;
    }
    let mut ids = Vec::with_capacity(w * h);
    for row in 0..h {
        index[1] = h - 1 - row;
        for col in 0..w {
            index[0] = col;
            ids.push(lattice.id_of(&index));
        }
    }
    (w, h, ids)
}

/// Write a tick-valued per-node field as a PGM heatmap (see module docs).
pub fn write_pgm(path: &Path, lattice: &Lattice, ticks: &[u64]) -> Result<()> {
    let (w, h, ids) = heatmap_slice(lattice);
    let finite: Vec<u64> = ids.iter().map(|&i| ticks[i]).filter(|&t| t != INF).collect();
    let lo = finite.iter().copied().min().unwrap_or(0);
    let hi = finite.iter().copied().max().unwrap_or(0);
    let span = (hi - lo).max(1) as f64;
    let mut buf = Vec::with_capacity(64 + w * h);
    buf.extend_from_slice(
        format!(
            "P5\n# range {} {} sentinel 255\n{w} {h}\n255\n",
            fmt_ticks(lo),
            fmt_ticks(hi)
        )
        .as_bytes(),
    );
    for &id in &ids {
        let t = ticks[id];
        let g = if t == INF {
            255
        } else {
            (((t - lo) as f64 / span) * 254.0).round() as u8
        };
        buf.push(g);
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Write a boolean per-node mask as a PGM image (0 = clear, 255 = set).
pub fn write_pgm_mask(path: &Path, lattice: &Lattice, mask: &[bool]) -> Result<()> {
    let (w, h, ids) = heatmap_slice(lattice);
    let mut buf = Vec::with_capacity(32 + w * h);
    buf.extend_from_slice(format!("P5\n{w} {h}\n255\n").as_bytes());
    for &id in &ids {
        buf.push(if mask[id] { 255 } else { 0 });
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Hex-encoded SHA-256 of a byte slice.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Hex-encoded SHA-256 of a file's contents.
pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reach::{self, SourceSpec};
    use crate::scene::{build_lattice, builtin_scene};
    use crate::systems::builtin_system;

    fn small_setup() -> (Lattice, crate::reach::PrimitiveGraph) {
        let sys = builtin_system("galaga").unwrap();
        let scene = builtin_scene("galaga-corner").unwrap();
        let lat = build_lattice(&scene, &[0.25, 0.25]).unwrap();
        let graph = reach::build_graph(&sys, &lat, 0.25).unwrap();
        (lat, graph)
    }

    #[test]
    fn cost_csv_shape_and_header() {
        let (lat, graph) = small_setup();
        let field = reach::cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cost.csv");
        write_cost_csv(&path, &lat, &field).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x0,x1,value,backpointer");
        assert_eq!(lines.count(), lat.node_count());
    }

    #[test]
    fn csv_marks_source_zero_and_unreachable_inf() {
        let (lat, graph) = small_setup();
        let field = reach::cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let src = match field.source {
            SourceSpec::Forward(s) => s,
            _ => unreachable!(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cost.csv");
        write_cost_csv(&path, &lat, &field).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let row = text.lines().nth(1 + src).unwrap();
        assert!(row.contains(",0.000000000,"));
        // Nodes below the source are unreachable (the system only moves up).
        assert!(text.contains(",inf,"));
    }

    #[test]
    fn pgm_header_and_sentinel() {
        let (lat, graph) = small_setup();
        let field = reach::cost_from(&graph, &lat, &[-0.5, -1.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cost.pgm");
        write_pgm(&path, &lat, &field.ticks).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n"));
        let header_end = bytes
            .windows(5)
            .position(|w| w == b"\n255\n")
            .map(|p| p + 5)
            .unwrap();
        assert_eq!(bytes.len() - header_end, lat.shape[0] * lat.shape[1]);
        // The scene has unreachable nodes, so the sentinel gray must appear.
        assert!(bytes[header_end..].contains(&255));
    }

    #[test]
    fn mask_pgm_is_binary() {
        let (lat, _) = small_setup();
        let mask: Vec<bool> = (0..lat.node_count()).map(|i| i % 3 == 0).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.pgm");
        write_pgm_mask(&path, &lat, &mask).unwrap();
        let bytes = fs::read(&path).unwrap();
        let header_end = bytes
            .windows(5)
            .position(|w| w == b"\n255\n")
            .map(|p| p + 5)
            .unwrap();
        assert!(bytes[header_end..].iter().all(|&b| b == 0 || b == 255));
    }

    #[test]
    fn sha256_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn fmt_ticks_fixed_precision() {
        assert_eq!(fmt_ticks(0), "0.000000000");
        assert_eq!(fmt_ticks(1_500_000_000), "1.500000000");
        assert_eq!(fmt_ticks(INF), "inf");
    }
}
