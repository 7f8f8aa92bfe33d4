//! Reward grids as CSV: one comma-separated row of values per map row, layers
//! separated by blank lines. Values on obstacle cells are read but ignored.

use super::{Error, ParseError};
use crate::domain::{OccupancyGrid, PlanningGraph};
use crate::reward::RewardMap;

/// Parses a reward grid congruent with `grid` into per-cell values.
pub fn parse_reward_cells(text: &str, grid: &OccupancyGrid) -> Result<Vec<f64>, ParseError> {
    let [nx, ny, nz] = grid.extent();
    let mut values = Vec::with_capacity(grid.cell_count());
    let mut rows_in_layer = 0;
    let mut layers = 0;
    let mut last_line = 1;
    for (i, raw) in text.split('\n').enumerate() {
        let lineno = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if rows_in_layer > 0 {
                if rows_in_layer != ny {
                    return Err(ParseError::at(
                        lineno,
                        1,
                        format!("layer has {rows_in_layer} rows, map has {ny}"),
                    ));
                }
                rows_in_layer = 0;
                layers += 1;
            }
            continue;
        }
        last_line = lineno;
        if layers >= nz {
            return Err(ParseError::at(lineno, 1, format!("more than {nz} layers")));
        }
        if rows_in_layer >= ny {
            return Err(ParseError::at(
                lineno,
                1,
                format!("layer has more than {ny} rows"),
            ));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != nx {
            return Err(ParseError::at(
                lineno,
                1,
                format!("row has {} values, map has {nx} columns", fields.len()),
            ));
        }
        for (col, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                ParseError::at(
                    lineno,
                    col + 1,
                    format!("{:?} is not a number", field.trim()),
                )
            })?;
            let cell = values.len();
            if !grid.is_occupied(cell) && !(0.0..=1.0).contains(&v) {
                return Err(ParseError::at(
                    lineno,
                    col + 1,
                    format!("reward {v} is outside [0, 1]"),
                ));
            }
            values.push(v);
        }
        rows_in_layer += 1;
    }
    if rows_in_layer > 0 {
        layers += 1;
    }
    if values.len() != grid.cell_count() || (rows_in_layer != 0 && rows_in_layer != ny) {
        return Err(ParseError::at(
            last_line,
            1,
            format!(
                "reward grid has {} values over {layers} layers, map has {} cells",
                values.len(),
                grid.cell_count()
            ),
        ));
    }
    Ok(values)
}

/// Parses a reward grid and keeps the values of free cells, in vertex order.
pub fn parse_rewards(
    text: &str,
    grid: &OccupancyGrid,
    graph: &PlanningGraph,
    gamma: f64,
    file: &str,
) -> Result<RewardMap, Error> {
    let cells = parse_reward_cells(text, grid).map_err(|source| Error::Parse {
        file: file.to_owned(),
        source,
    })?;
    let per_vertex = graph.vertices().iter().map(|v| cells[v.cell]).collect();
    RewardMap::new(per_vertex, gamma).map_err(|e| Error::invariant("rewards", e))
}

/// Writes per-vertex rewards as a grid; obstacle cells get 0.
pub fn write_rewards(grid: &OccupancyGrid, graph: &PlanningGraph, rewards: &RewardMap) -> String {
    let [nx, ny, nz] = grid.extent();
    let mut layers = Vec::with_capacity(nz);
    for z in 0..nz {
        let rows: Vec<String> = (0..ny)
            .map(|y| {
                (0..nx)
                    .map(|x| {
                        graph
                            .vertex_of_cell(grid.cell([x, y, z]))
                            .map_or(0.0, |v| rewards.get(v))
                            .to_string()
                    })
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        layers.push(rows.join("\n"));
    }
    let mut out = layers.join("\n\n");
    out.push('\n');
    out
}
