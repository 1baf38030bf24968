use std::collections::BTreeMap;
use std::ops::AddAssign;

use serde::Serialize;

/// Running count of oracle invocations, attributed to the subroutine that
/// spent them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryLedger {
    total: u64,
    breakdown: BTreeMap<String, u64>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, label: &str, queries: u64) {
        self.total += queries;
        *self.breakdown.entry(label.to_string()).or_insert(0) += queries;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn breakdown(&self) -> &BTreeMap<String, u64> {
        &self.breakdown
    }

    pub fn get(&self, label: &str) -> u64 {
        self.breakdown.get(label).copied().unwrap_or(0)
    }

    /// `label=count` pairs joined by `;`, in label order.
    pub fn breakdown_string(&self) -> String {
        self.breakdown
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl AddAssign<&QueryLedger> for QueryLedger {
    fn add_assign(&mut self, rhs: &QueryLedger) {
        for (label, count) in &rhs.breakdown {
            self.charge(label, *count);
        }
    }
}
