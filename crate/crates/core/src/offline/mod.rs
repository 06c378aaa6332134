//! Offline optimal allocation.

mod exhaustive;
mod flow;

pub use exhaustive::{enumerate_optima, solve_exhaustive, solve_exhaustive_with, ExhaustiveLimits};
pub use flow::{
    build_flow_network, flow_memory_estimate, solve_min_cost_flow, Arc, FlowNetwork, SINK, SOURCE,
};

use serde::{Deserialize, Serialize};

use crate::model::{Allocation, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OfflineMethod {
    /// Min-cost flow on an instance whose budgets never bind; exact.
    Flow,
    /// Exhaustive search; exact.
    Exhaustive,
    /// Min-cost flow with time budgets dropped; an upper bound on the optimum.
    RelaxedFlow,
}

impl OfflineMethod {
    pub fn is_exact(self) -> bool {
        !matches!(self, OfflineMethod::RelaxedFlow)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OfflineMethod::Flow => "flow",
            OfflineMethod::Exhaustive => "exhaustive",
            OfflineMethod::RelaxedFlow => "relaxed-flow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineSolution {
    pub allocation: Allocation,
    pub method: OfflineMethod,
}

impl OfflineSolution {
    pub fn exact(&self) -> bool {
        self.method.is_exact()
    }

    pub fn utility(&self) -> f64 {
        self.allocation.total_utility()
    }
}

pub fn solve_offline(instance: &Instance) -> OfflineSolution {
    solve_offline_with(instance, ExhaustiveLimits::default())
}

/// Flow when no budget can bind, otherwise exhaustive search if the
/// instance is small enough, otherwise the budget-relaxed flow.
pub fn solve_offline_with(instance: &Instance, limits: ExhaustiveLimits) -> OfflineSolution {
    if instance.budgets_non_binding() {
        return OfflineSolution {
            allocation: solve_min_cost_flow(&build_flow_network(instance)),
            method: OfflineMethod::Flow,
        };
    }
    if limits.admits(instance) {
        if let Ok(allocation) = solve_exhaustive_with(instance, limits) {
            return OfflineSolution {
                allocation,
                method: OfflineMethod::Exhaustive,
            };
        }
    }
    OfflineSolution {
        allocation: solve_min_cost_flow(&build_flow_network(instance)),
        method: OfflineMethod::RelaxedFlow,
    }
}
