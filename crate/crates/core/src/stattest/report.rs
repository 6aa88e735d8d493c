use serde::{Deserialize, Serialize};

/// Fixed 17-significant-digit decimal form used by every CSV writer.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// One statistic compared against one threshold.
///
/// `upper_bound` components pass when `statistic <= threshold`; the others
/// (p-value style) pass when `statistic >= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    #[serde(default = "yes")]
    pub upper_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    pub pass: bool,
}

fn yes() -> bool {
    true
}

impl Component {
    /// Passes iff `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            upper_bound: true,
            p_value: None,
            parameter: None,
            note: None,
            pass: statistic <= threshold,
        }
    }

    /// Passes iff `statistic >= threshold`.
    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self { upper_bound: false, pass: statistic >= threshold, ..Self::at_most(name, statistic, threshold) }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p_value = Some(p);
        self
    }

    pub fn with_parameter(mut self, v: f64) -> Self {
        self.parameter = Some(v);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Same comparison with a new verdict forced by the caller.
    pub fn forced(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn renamed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}.{}", self.name);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub sample_size: usize,
    pub components: Vec<Component>,
    pub verdict: Verdict,
}

impl TestReport {
    pub fn new(kind: impl Into<String>, sample_size: usize, components: Vec<Component>) -> Self {
        let verdict = Verdict::from_bool(components.iter().all(|c| c.pass));
        Self { kind: kind.into(), case: None, seed: None, sample_size, components, verdict }
    }

    pub fn with_case(mut self, case: impl Into<String>) -> Self {
        self.case = Some(case.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// Components of all reports concatenated, names prefixed by `prefix.i`.
    pub fn merge(kind: impl Into<String>, parts: Vec<(String, TestReport)>) -> Self {
        let n = parts.iter().map(|p| p.1.sample_size).max().unwrap_or(0);
        let comps = parts.into_iter().flat_map(|(p, r)| r.components.into_iter().map(move |c| c.renamed(&p))).collect();
        TestReport::new(kind, n, comps)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| !c.pass)
    }
}

/// Outcome of repeating a randomized report over independent seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub case: String,
    pub seeds: Vec<u64>,
    pub failures: usize,
    pub allowed_failures: usize,
    pub runs: Vec<TestReport>,
    pub verdict: Verdict,
}

impl StabilityReport {
    pub fn new(case: impl Into<String>, runs: Vec<TestReport>, allowed_failures: usize) -> Self {
        let failures = runs.iter().filter(|r| !r.passed()).count();
        Self {
            case: case.into(),
            seeds: runs.iter().filter_map(|r| r.seed).collect(),
            failures,
            allowed_failures,
            runs,
            verdict: Verdict::from_bool(failures <= allowed_failures),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_is_conjunction_of_components() {
        let r = TestReport::new("k", 10, vec![Component::at_most("a", 1.0, 2.0), Component::at_least("p", 0.5, 0.01)]);
        assert!(r.passed());
        let r = TestReport::new("k", 10, vec![Component::at_most("a", 3.0, 2.0), Component::at_least("p", 0.5, 0.01)]);
        assert!(!r.passed());
        assert_eq!(r.failing().count(), 1);
    }

    #[test]
    fn stability_allows_budgeted_failures() {
        let bad = TestReport::new("k", 1, vec![Component::at_most("a", 3.0, 2.0)]);
        let good = TestReport::new("k", 1, vec![Component::at_most("a", 1.0, 2.0)]);
        let s = StabilityReport::new("c", vec![bad.clone(), good.clone(), good.clone()], 1);
        assert!(s.passed());
        let s = StabilityReport::new("c", vec![bad.clone(), bad, good], 1);
        assert!(!s.passed());
    }
}
