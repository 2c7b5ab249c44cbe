//! Map file formats.
//!
//! Plain text: a `width height` header line followed by `height` rows of
//! exactly `width` characters, `.` for free and `#` for obstacle.
//!
//! Binary PGM (`P5`, maxval <= 255): gray values below half of maxval
//! (below 128 for the usual maxval of 255) are obstacles.

use std::fmt::Write as _;
use std::path::Path;

use super::OccupancyGrid;
use crate::error::{Error, Location, Result};

pub fn load_map(path: impl AsRef<Path>) -> Result<OccupancyGrid> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_map(&bytes)
}

/// Parses either supported format, dispatching on the leading magic bytes.
pub fn parse_map(bytes: &[u8]) -> Result<OccupancyGrid> {
    if bytes.first() == Some(&b'P') {
        parse_pgm(bytes)
    } else {
        parse_text(bytes)
    }
}

fn parse_err(location: Location, message: impl Into<String>) -> Error {
    Error::MapParse {
        location,
        message: message.into(),
    }
}

fn parse_text(bytes: &[u8]) -> Result<OccupancyGrid> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| parse_err(Location::Byte(e.valid_up_to()), "text map is not valid UTF-8"))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(Location::Line(1), "missing `width height` header"))?;
    let mut fields = header.split_whitespace();
    let mut dim = |name: &str| -> Result<usize> {
        fields
            .next()
            .ok_or_else(|| parse_err(Location::Line(1), format!("header is missing {name}")))?
            .parse::<usize>()
            .map_err(|_| parse_err(Location::Line(1), format!("header {name} is not a count")))
    };
    let width = dim("width")?;
    let height = dim("height")?;
    if fields.next().is_some() {
        return Err(parse_err(Location::Line(1), "header has trailing fields"));
    }
    if width == 0 || height == 0 {
        return Err(parse_err(Location::Line(1), "dimensions must be positive"));
    }

    let mut cells = Vec::with_capacity(width * height);
    for row in 0..height {
        let line_no = row + 2;
        let line = lines
            .next()
            .ok_or_else(|| parse_err(Location::Line(line_no), format!("expected {height} rows, found {row}")))?;
        let n = line.chars().count();
        if n != width {
            return Err(parse_err(
                Location::Line(line_no),
                format!("row {} has {n} cells, expected {width}", row + 1),
            ));
        }
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '.' => cells.push(false),
                '#' => cells.push(true),
                other => {
                    return Err(parse_err(
                        Location::Line(line_no),
                        format!("row {} column {}: unexpected character {other:?}", row + 1, col + 1),
                    ))
                }
            }
        }
    }
    if let Some((extra, _)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(
            Location::Line(height + 2 + extra),
            "unexpected content after the last row",
        ));
    }
    OccupancyGrid::from_cells(width, height, cells)
}

/// Header tokenizer for PGM: whitespace-separated tokens with `#` comments.
struct PgmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmHeader<'_> {
    fn token(&mut self) -> Result<(usize, &[u8])> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
                None => return Err(parse_err(Location::Byte(self.pos), "truncated PGM header")),
            }
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        Ok((start, &self.bytes[start..self.pos]))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let (at, tok) = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(Location::Byte(at), format!("PGM {what} is not a number")))
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<OccupancyGrid> {
    let mut header = PgmHeader { bytes, pos: 0 };
    let (_, magic) = header.token()?;
    if magic != b"P5" {
        return Err(parse_err(
            Location::Byte(0),
            format!(
                "unsupported magic number {:?} (only binary PGM `P5` is supported)",
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval_at = header.pos;
    let maxval = header.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(parse_err(Location::Byte(maxval_at), "dimensions must be positive"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(parse_err(
            Location::Byte(maxval_at),
            format!("maxval {maxval} unsupported (must be 1..=255)"),
        ));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let data_start = header.pos + 1;
    let needed = width * height;
    let data = bytes.get(data_start..).unwrap_or(&[]);
    if data.len() < needed {
        return Err(parse_err(
            Location::Byte(bytes.len()),
            format!("raster truncated: need {needed} bytes, found {}", data.len()),
        ));
    }
    let threshold = maxval.div_ceil(2);
    let cells = data[..needed].iter().map(|&g| usize::from(g) < threshold).collect();
    OccupancyGrid::from_cells(width, height, cells)
}

/// Serializes a grid in the plain-text format.
pub fn write_text_map(grid: &OccupancyGrid) -> String {
    let mut out = String::with_capacity((grid.width() + 1) * (grid.height() + 1));
    let _ = writeln!(out, "{} {}", grid.width(), grid.height());
    for row in grid.cells().chunks(grid.width()) {
        out.extend(row.iter().map(|&c| if c { '#' } else { '.' }));
        out.push('\n');
    }
    out
}
