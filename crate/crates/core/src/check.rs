use serde::Serialize;

/// Outcome of one named identity checked over some number of instances.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>) -> Self {
        CheckResult { name: name.into(), instances: 0, failures: Vec::new() }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(witness());
        }
    }

    pub fn fail(&mut self, witness: String) {
        self.instances += 1;
        self.failures.push(witness);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.instances > 0
    }
}

pub fn all_passed(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.passed())
}
