//! Browser bindings for the planner. Each export takes map text and a JSON
//! config and returns JSON; the `*_inner` functions hold the logic so they can
//! be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use riskplan::io::commands::{plan_scenario, Scenario};
use riskplan::io::{parse_map, render_svg, Config};
use riskplan::oracles::count_simple_paths;
use riskplan::planners::PlannerKind;
use riskplan::risk::PathElement;
use riskplan::{grid_to_graph, PlanMode};

/// Exhaustive planning in the page stops after this many paths.
pub const BROWSER_PATH_CAP: u64 = 2_000_000;

fn scenario(
    map: &str,
    config: &str,
    tortuosity: Option<f64>,
    gamma: Option<f64>,
) -> Result<Scenario, String> {
    let config = if config.trim().is_empty() {
        None
    } else {
        Some(config)
    };
    let mut sc = Scenario::from_text(map, config, None, gamma).map_err(|e| e.to_string())?;
    // there is no clock to enforce a time budget in the browser
    sc.config.limits.max_time = None;
    sc.config.limits.max_paths = sc.config.limits.max_paths.min(BROWSER_PATH_CAP);
    if let Some(w) = tortuosity {
        if !(w.is_finite() && w >= 0.0) {
            return Err("tortuosity weight must be a non-negative number".into());
        }
        let elements = &mut sc.config.risk.path_elements;
        match elements
            .iter_mut()
            .find(|e| matches!(e, PathElement::Tortuosity { .. }))
        {
            Some(PathElement::Tortuosity { weight, .. }) => *weight = w,
            _ => elements.push(PathElement::Tortuosity {
                weight: w,
                risk_per_turn: 0.1,
            }),
        }
    }
    Ok(sc)
}

fn parse_mode(mode: &str) -> Result<PlanMode, String> {
    match mode {
        "exact" => Ok(PlanMode::Exact),
        "approx" => Ok(PlanMode::Approximate),
        other => Err(format!("unknown mode {other:?}; use exact or approx")),
    }
}

fn result_value(json: &str) -> Value {
    serde_json::from_str(json).expect("result JSON re-parses")
}

pub fn plan_inner(
    map: &str,
    config: &str,
    mode: &str,
    tortuosity: Option<f64>,
    gamma: Option<f64>,
) -> Result<String, String> {
    let sc = scenario(map, config, tortuosity, gamma)?;
    let outcome = plan_scenario(&sc, parse_mode(mode)?, true).map_err(|e| e.to_string())?;
    Ok(json!({
        "result": result_value(&outcome.json),
        "svg": outcome.svg,
    })
    .to_string())
}

/// Runs both planners and draws both paths on one map.
pub fn compare_inner(
    map: &str,
    config: &str,
    tortuosity: Option<f64>,
    gamma: Option<f64>,
) -> Result<String, String> {
    let sc = scenario(map, config, tortuosity, gamma)?;
    let exact = plan_scenario(&sc, PlanMode::Exact, false).map_err(|e| e.to_string())?;
    let approx = plan_scenario(&sc, PlanMode::Approximate, false).map_err(|e| e.to_string())?;
    let mut overlays = Vec::new();
    for (file, kind) in [
        (&exact.result, PlannerKind::Exact),
        (&approx.result, PlannerKind::Approximate),
    ] {
        let path = file
            .resolve_path(&sc.grid, &sc.graph)
            .map_err(|e| e.to_string())?;
        let kind = if file.planner == PlannerKind::Stay {
            PlannerKind::Stay
        } else {
            kind
        };
        overlays.push((kind, path));
    }
    let refs: Vec<_> = overlays.iter().map(|(k, p)| (*k, p)).collect();
    let layer = (sc.grid.ndim() == 3).then_some(0);
    let svg = render_svg(&sc.grid, &sc.graph, Some(&sc.rewards), &refs, layer)
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "exact": result_value(&exact.json),
        "approx": result_value(&approx.json),
        "gap": exact.result.utility.value - approx.result.utility.value,
        "svg": svg,
    })
    .to_string())
}

pub fn count_inner(map: &str, config: &str) -> Result<String, String> {
    let grid = parse_map(map).map_err(|e| format!("map: {e}"))?;
    let config = if config.trim().is_empty() {
        Config::default()
    } else {
        Config::from_json(config, "config").map_err(|e| e.to_string())?
    };
    let graph = grid_to_graph(&grid, config.connectivity).map_err(|e| e.to_string())?;
    let cap = config.limits.max_paths.min(BROWSER_PATH_CAP);
    let c = count_simple_paths(&graph, graph.start(), Some(cap));
    Ok(
        json!({ "count": c.count, "truncated": c.truncated, "vertices": graph.vertex_count() })
            .to_string(),
    )
}

fn opt(x: f64) -> Option<f64> {
    (!x.is_nan()).then_some(x)
}

/// Plans in `mode` ("exact" or "approx"). Pass NaN for `tortuosity` or
/// `gamma` to keep the configured value.
#[wasm_bindgen]
pub fn plan(
    map: &str,
    config: &str,
    mode: &str,
    tortuosity: f64,
    gamma: f64,
) -> Result<String, JsError> {
    plan_inner(map, config, mode, opt(tortuosity), opt(gamma)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare(map: &str, config: &str, tortuosity: f64, gamma: f64) -> Result<String, JsError> {
    compare_inner(map, config, opt(tortuosity), opt(gamma)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn count(map: &str, config: &str) -> Result<String, JsError> {
    count_inner(map, config).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAP: &str = "S....\n.##..\n..P..\n";

    #[test]
    fn plan_returns_result_and_svg() {
        let out: Value =
            serde_json::from_str(&plan_inner(MAP, "", "approx", None, None).unwrap()).unwrap();
        assert_eq!(out["result"]["mode"], "approx");
        assert!(out["svg"].as_str().unwrap().starts_with("<svg"));
    }

    #[test]
    fn compare_draws_both() {
        let out: Value =
            serde_json::from_str(&compare_inner(MAP, "", Some(0.5), Some(0.9)).unwrap()).unwrap();
        assert!(out["gap"].as_f64().unwrap() >= -1e-9);
        assert_eq!(out["exact"]["config"]["gamma"], 0.9);
        let svg = out["svg"].as_str().unwrap();
        assert_eq!(svg.matches("class=\"path").count(), 2);
    }

    #[test]
    fn tortuosity_slider_adds_missing_element() {
        let cfg = r#"{"risk": {"path_elements": []}}"#;
        let out: Value =
            serde_json::from_str(&plan_inner(MAP, cfg, "exact", Some(2.0), None).unwrap()).unwrap();
        assert_eq!(
            out["result"]["config"]["risk"]["path_elements"][0]["weight"],
            2.0
        );
    }

    #[test]
    fn errors_are_messages() {
        assert!(plan_inner("S.\nS.\n", "", "exact", None, None)
            .unwrap_err()
            .contains("start"));
        assert!(plan_inner(MAP, "", "fast", None, None).is_err());
        assert!(plan_inner(MAP, "", "exact", Some(-1.0), None).is_err());
        assert!(plan_inner("S..\n", "", "exact", None, None)
            .unwrap_err()
            .contains("'P'"));
    }

    #[test]
    fn counts_paths() {
        let out: Value = serde_json::from_str(&count_inner("S.\n", "").unwrap()).unwrap();
        assert_eq!(out["count"], 1);
    }
}
