//! Text maps: one row per line, `#` obstacle, `.` free, `S` start, `P` point
//! of interest. A 3-D map is a stack of congruent layers separated by blank
//! lines.

use super::ParseError;
use crate::domain::OccupancyGrid;

pub fn parse_map(text: &str) -> Result<OccupancyGrid, ParseError> {
    // (first line number, rows) per layer
    let mut layers: Vec<(usize, Vec<(usize, &str)>)> = Vec::new();
    let mut current: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if !current.is_empty() {
                layers.push((current[0].0, std::mem::take(&mut current)));
            }
        } else {
            current.push((i + 1, line));
        }
    }
    if !current.is_empty() {
        layers.push((current[0].0, current));
    }
    let Some((_, first)) = layers.first() else {
        return Err(ParseError::at(1, 1, "map is empty"));
    };
    let ny = first.len();
    let nx = first[0].1.chars().count();

    let mut occupied = Vec::with_capacity(nx * ny * layers.len());
    let mut start = None;
    let mut poi = None;
    for (first_line, rows) in &layers {
        if rows.len() != ny {
            return Err(ParseError::at(
                *first_line,
                1,
                format!(
                    "layer has {} rows, expected {ny}; layers must be congruent",
                    rows.len()
                ),
            ));
        }
        for &(lineno, row) in rows {
            let width = row.chars().count();
            if width != nx {
                return Err(ParseError::at(
                    lineno,
                    width.min(nx) + 1,
                    format!("row has {width} cells, expected {nx}; rows must be rectangular"),
                ));
            }
            for (col, ch) in row.chars().enumerate() {
                let cell = occupied.len();
                match ch {
                    '#' => occupied.push(true),
                    '.' => occupied.push(false),
                    'S' => {
                        if start.is_some() {
                            return Err(ParseError::at(
                                lineno,
                                col + 1,
                                "second 'S'; a map needs exactly one start",
                            ));
                        }
                        start = Some(cell);
                        occupied.push(false);
                    }
                    'P' => {
                        if poi.is_some() {
                            return Err(ParseError::at(
                                lineno,
                                col + 1,
                                "second 'P'; a map allows at most one point of interest",
                            ));
                        }
                        poi = Some(cell);
                        occupied.push(false);
                    }
                    other => {
                        return Err(ParseError::at(
                            lineno,
                            col + 1,
                            format!("unexpected character {other:?}; use '#', '.', 'S' or 'P'"),
                        ))
                    }
                }
            }
        }
    }
    let start =
        start.ok_or_else(|| ParseError::at(1, 1, "no 'S'; a map needs exactly one start"))?;
    let dims = if layers.len() == 1 {
        vec![nx, ny]
    } else {
        vec![nx, ny, layers.len()]
    };
    OccupancyGrid::new(dims, occupied, start, poi).map_err(|e| ParseError::at(1, 1, e.to_string()))
}

pub fn write_map(grid: &OccupancyGrid) -> String {
    let [nx, ny, nz] = grid.extent();
    let mut layers = Vec::with_capacity(nz);
    for z in 0..nz {
        let mut rows = Vec::with_capacity(ny);
        for y in 0..ny {
            let row: String = (0..nx)
                .map(|x| {
                    let cell = grid.cell([x, y, z]);
                    if cell == grid.start() {
                        'S'
                    } else if Some(cell) == grid.poi() {
                        'P'
                    } else if grid.is_occupied(cell) {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect();
            rows.push(row);
        }
        layers.push(rows.join("\n"));
    }
    let mut out = layers.join("\n\n");
    out.push('\n');
    out
}
