//! Map files and PGM images.
//!
//! A map file has three header lines (`width_m <v>`, `height_m <v>`,
//! `resolution <v>`) followed by one text row per grid row, northmost row
//! first: `#` is occupied, `.` is free.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{CellPos, GridGeometry, GroundTruthMap, Occupancy, OccupancyGrid};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const PGM_UNKNOWN: u8 = 127;
pub const PGM_FREE: u8 = 255;
pub const PGM_OCCUPIED: u8 = 0;
/// Trajectory overlay shade.
pub const PGM_PATH: u8 = 64;

const HEADER_KEYS: [&str; 3] = ["width_m", "height_m", "resolution"];

pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruthMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ground_truth(&text)
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruthMap> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let mut header = [0.0f64; 3];
    for (slot, key) in header.iter_mut().zip(HEADER_KEYS) {
        let (line, content) = lines.next().ok_or(Error::MapParse {
            line: 0,
            message: format!("missing header `{key}`"),
        })?;
        let mut parts = content
            .split(|c: char| c.is_whitespace() || c == '=' || c == ':')
            .filter(|s| !s.is_empty());
        let (k, v) = (parts.next(), parts.next());
        if k != Some(key) || parts.next().is_some() {
            return Err(Error::MapParse {
                line,
                message: format!("expected `{key} <value>`"),
            });
        }
        *slot = v
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .ok_or_else(|| Error::MapParse {
                line,
                message: format!("`{key}` must be a positive number"),
            })?;
    }
    let [width_m, height_m, resolution] = header;
    let cols = (width_m / resolution).round() as usize;
    let rows = (height_m / resolution).round() as usize;
    if (cols as f64 * resolution - width_m).abs() > 1e-6 || (rows as f64 * resolution - height_m).abs() > 1e-6 {
        return Err(Error::MapParse {
            line: 3,
            message: "extent is not a whole number of cells".into(),
        });
    }

    let mut occupied = vec![false; cols * rows];
    let mut seen_rows = 0usize;
    for (line, content) in lines {
        if content.is_empty() && seen_rows == rows {
            continue;
        }
        if seen_rows == rows {
            return Err(Error::MapParse {
                line,
                message: format!("more than {rows} rows"),
            });
        }
        let chars: Vec<char> = content.chars().collect();
        if chars.len() != cols {
            return Err(Error::MapParse {
                line,
                message: format!("row has {} cells, expected {cols}", chars.len()),
            });
        }
        let row = rows - 1 - seen_rows;
        for (col, ch) in chars.into_iter().enumerate() {
            occupied[row * cols + col] = match ch {
                '#' => true,
                '.' => false,
                other => {
                    return Err(Error::MapParse {
                        line,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            };
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(Error::MapParse {
            line: 3 + seen_rows,
            message: format!("expected {rows} rows, found {seen_rows}"),
        });
    }
    let geometry = GridGeometry {
        cols,
        rows,
        resolution,
        origin: Point::default(),
    };
    GroundTruthMap::new(geometry, occupied)
}

/// Text of a map shipped with the crate (`museum` or `library`).
pub fn bundled_map(name: &str) -> Option<&'static str> {
    match name {
        "museum" => Some(include_str!("../../maps/museum.map")),
        "library" => Some(include_str!("../../maps/library.map")),
        _ => None,
    }
}

/// Writes the grid as a binary PGM, northmost row first, with an optional
/// polyline drawn over it.
pub fn write_pgm(grid: &OccupancyGrid, overlay: &[Point], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let g = grid.geometry();
    let mut pixels: Vec<u8> = grid
        .cells()
        .iter()
        .map(|c| match c {
            Occupancy::Unknown => PGM_UNKNOWN,
            Occupancy::Free => PGM_FREE,
            Occupancy::Occupied => PGM_OCCUPIED,
        })
        .collect();
    for w in overlay.windows(2) {
        super::traverse(g, w[0], w[1], |c: CellPos| {
            pixels[g.index(c)] = PGM_PATH;
            true
        });
    }
    if let [only] = overlay {
        if let Some(c) = g.cell_of(*only) {
            pixels[g.index(c)] = PGM_PATH;
        }
    }

    let mut out = Vec::with_capacity(pixels.len() + 32);
    write!(out, "P5\n{} {}\n255\n", g.cols, g.rows).expect("write to vec");
    for row in (0..g.rows).rev() {
        out.extend_from_slice(&pixels[row * g.cols..(row + 1) * g.cols]);
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
