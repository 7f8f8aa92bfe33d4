//! Deterministic SVG rendering of a grid, its reward field and planned paths.

use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::{OccupancyGrid, Path, PlanningGraph};
use crate::planners::PlannerKind;
use crate::reward::RewardMap;

const CELL: usize = 32;
const OBSTACLE: &str = "#d62728";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("3-D maps need a layer to render")]
    LayerRequired,
    #[error("layer {layer} is outside the map's {depth} layers")]
    LayerOutOfRange { layer: usize, depth: usize },
}

fn stroke(kind: PlannerKind) -> (&'static str, &'static str) {
    match kind {
        PlannerKind::Exact => ("#1f4e9c", ""),
        PlannerKind::Approximate => ("#ff7f0e", " stroke-dasharray=\"6 4\""),
        PlannerKind::Stay => ("#6a3d9a", ""),
    }
}

/// White at reward 0 shading to green at reward 1.
fn reward_fill(r: f64) -> String {
    let r = r.clamp(0.0, 1.0);
    let mix = |target: f64| (255.0 + (target - 255.0) * r).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(34.0), mix(160.0), mix(60.0))
}

fn centre(c: [usize; 3]) -> (usize, usize) {
    (c[0] * CELL + CELL / 2, c[1] * CELL + CELL / 2)
}

/// Renders one layer of `grid` with reward shading and path overlays.
/// Paths are drawn in their top-down projection.
pub fn render_svg(
    grid: &OccupancyGrid,
    graph: &PlanningGraph,
    rewards: Option<&RewardMap>,
    paths: &[(PlannerKind, &Path)],
    layer: Option<usize>,
) -> Result<String, RenderError> {
    let [nx, ny, nz] = grid.extent();
    let z = match (grid.ndim(), layer) {
        (2, _) => 0,
        (_, None) => return Err(RenderError::LayerRequired),
        (_, Some(l)) if l >= nz => {
            return Err(RenderError::LayerOutOfRange {
                layer: l,
                depth: nz,
            })
        }
        (_, Some(l)) => l,
    };
    let (w, h) = (nx * CELL, ny * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    s.push_str("<g id=\"cells\" stroke=\"#cccccc\" stroke-width=\"1\">\n");
    for y in 0..ny {
        for x in 0..nx {
            let cell = grid.cell([x, y, z]);
            let fill = if grid.is_occupied(cell) {
                OBSTACLE.to_owned()
            } else {
                let r = match (rewards, graph.vertex_of_cell(cell)) {
                    (Some(map), Some(v)) => map.get(v),
                    _ => 0.0,
                };
                reward_fill(r)
            };
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\"/>",
                x * CELL,
                y * CELL
            );
        }
    }
    s.push_str("</g>\n");

    for (i, (kind, path)) in paths.iter().enumerate() {
        let (color, dash) = stroke(*kind);
        let name = format!("{kind:?}").to_lowercase();
        if path.len() == 1 {
            let (cx, cy) = centre(graph.vertex(path.origin()).coord);
            let _ = writeln!(
                s,
                "<circle class=\"path {name}\" id=\"path{i}\" cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"{dash}/>",
                CELL / 3
            );
            continue;
        }
        let points: Vec<String> = path
            .vertices()
            .iter()
            .map(|&v| {
                let (px, py) = centre(graph.vertex(v).coord);
                format!("{px},{py}")
            })
            .collect();
        let _ = writeln!(
            s,
            "<polyline class=\"path {name}\" id=\"path{i}\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\" stroke-linejoin=\"round\"{dash}/>",
            points.join(" ")
        );
    }

    let start = grid.coord(grid.start());
    if start[2] == z {
        let (cx, cy) = centre(start);
        let _ = writeln!(
            s,
            "<circle id=\"start\" cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"#000000\"/>",
            CELL / 5
        );
    }
    if let Some(poi) = grid.poi() {
        let c = grid.coord(poi);
        if c[2] == z {
            let (cx, cy) = centre(c);
            let _ = writeln!(s, "<polygon id=\"poi\" points=\"{}\" fill=\"#ffd700\" stroke=\"#000000\" stroke-width=\"1\"/>", star(cx, cy));
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn star(cx: usize, cy: usize) -> String {
    let (outer, inner) = (CELL as f64 * 0.4, CELL as f64 * 0.16);
    (0..10)
        .map(|k| {
            let radius = if k % 2 == 0 { outer } else { inner };
            let angle = std::f64::consts::PI * (k as f64 / 5.0) - std::f64::consts::FRAC_PI_2;
            format!(
                "{:.1},{:.1}",
                cx as f64 + radius * angle.cos(),
                cy as f64 + radius * angle.sin()
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}
