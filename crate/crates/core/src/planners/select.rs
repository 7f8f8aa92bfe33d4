use super::{finish, preference, Candidate, MinRiskEnsemble, PlanMode, PlanResult, PlannerKind};
use crate::reward::{utility, RewardMap};
use crate::risk::RiskEvaluator;

/// Picks the highest-utility path of the ensemble, falling back to the unit
/// path at the start when no ensemble path strictly beats it.
pub fn max_utility_select(
    ensemble: &MinRiskEnsemble,
    rewards: &RewardMap,
    risk: &RiskEvaluator,
) -> PlanResult {
    let mut best: Option<Candidate> = None;
    for (_, entry) in ensemble.iter() {
        let (u, _) = utility(&entry.path, rewards, risk);
        let better = best.as_ref().is_none_or(|b| {
            preference(
                u.value,
                entry.path.vertices(),
                b.utility.value,
                b.path.vertices(),
            )
            .is_lt()
        });
        if better {
            best = Some(Candidate {
                path: entry.path.clone(),
                utility: u,
            });
        }
    }
    let mut result = finish(
        best,
        risk,
        rewards,
        PlanMode::Approximate,
        PlannerKind::Approximate,
    );
    result.stats.ensemble_size = Some(ensemble.len() as u64);
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{grid_to_graph, Connectivity, OccupancyGrid, Path};
    use crate::planners::risk_aware_dijkstra;
    use crate::risk::RiskModel;

    fn setup() -> (OccupancyGrid, crate::domain::PlanningGraph) {
        let grid = OccupancyGrid::empty_2d(4, 4);
        let graph = grid_to_graph(&grid, Connectivity::Orthogonal).unwrap();
        (grid, graph)
    }

    #[test]
    fn zero_rewards_stay() {
        let (grid, graph) = setup();
        let model = RiskModel::default();
        let risk = RiskEvaluator::new(&model, &graph, &grid);
        let (ens, _) = risk_aware_dijkstra(&risk).unwrap();
        let rewards = RewardMap::zeros(16, 1.0).unwrap();
        let res = max_utility_select(&ens, &rewards, &risk);
        assert_eq!(res.planner, PlannerKind::Stay);
        assert_eq!(res.path, Path::unit(0));
    }

    #[test]
    fn rewarding_start_stays() {
        let (grid, graph) = setup();
        let model = RiskModel::default();
        let risk = RiskEvaluator::new(&model, &graph, &grid);
        let (ens, _) = risk_aware_dijkstra(&risk).unwrap();
        let mut r = vec![0.0; 16];
        r[0] = 1.0;
        let rewards = RewardMap::new(r, 1.0).unwrap();
        let res = max_utility_select(&ens, &rewards, &risk);
        assert_eq!(res.planner, PlannerKind::Stay);
        assert_eq!(res.utility.reward, 1.0);
    }

    #[test]
    fn utility_matches_exhaustive_scan_of_ensemble() {
        let (grid, graph) = setup();
        let model = RiskModel::default();
        let risk = RiskEvaluator::new(&model, &graph, &grid);
        let (ens, _) = risk_aware_dijkstra(&risk).unwrap();
        let rewards =
            RewardMap::new((0..16).map(|i| ((i * 7) % 11) as f64 / 10.0).collect(), 1.0).unwrap();
        let res = max_utility_select(&ens, &rewards, &risk);
        let best = ens
            .iter()
            .map(|(_, e)| utility(&e.path, &rewards, &risk).0.value)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(res.utility.value, best);
    }

    #[test]
    fn empty_ensemble_stays() {
        let grid = OccupancyGrid::empty_2d(1, 1);
        let graph = grid_to_graph(&grid, Connectivity::Orthogonal).unwrap();
        let model = RiskModel::default();
        let risk = RiskEvaluator::new(&model, &graph, &grid);
        let (ens, _) = risk_aware_dijkstra(&risk).unwrap();
        let rewards = RewardMap::zeros(1, 1.0).unwrap();
        assert_eq!(
            max_utility_select(&ens, &rewards, &risk).planner,
            PlannerKind::Stay
        );
    }
}
