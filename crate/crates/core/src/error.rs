use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter for {family}: {detail}")]
    InvalidParameter { family: &'static str, detail: String },

    #[error("{primitive}: argument {value} outside domain {domain}")]
    Domain { primitive: String, value: f64, domain: String },

    #[error("{map}: intermediate point ({x}, {y}) outside the inverse's domain")]
    IntermediateDomain { map: String, x: f64, y: f64 },

    #[error("sample {index}: {source}")]
    SampleDomain { index: usize, source: Box<Error> },

    #[error("insufficient sample: {n} < {min}")]
    InsufficientSample { n: usize, min: usize },

    #[error("degenerate binning: {0}")]
    DegenerateBinning(String),

    #[error("schedule too short: {len} values, need at least 3")]
    ScheduleTooShort { len: usize },

    #[error("unknown key '{key}'")]
    UnknownKey { key: String, suggestions: Vec<String> },

    #[error("path is not down-right monotone at step {0}")]
    NotDownRight(usize),

    #[error("lattice: {0}")]
    Lattice(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(primitive: impl Into<String>, value: f64, domain: impl ToString) -> Self {
        Error::Domain { primitive: primitive.into(), value, domain: domain.to_string() }
    }

    /// Unknown registry key with the closest known keys as suggestions.
    pub fn unknown_key<'a>(key: &str, known: impl IntoIterator<Item = &'a str>) -> Self {
        let mut scored: Vec<(usize, &str)> = known.into_iter().map(|k| (edit_distance(key, k), k)).collect();
        scored.sort();
        let suggestions = scored.into_iter().take(3).map(|(_, k)| k.to_string()).collect();
        Error::UnknownKey { key: key.to_string(), suggestions }
    }
}

fn edit_distance(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suggestions_rank_by_edit_distance() {
        let e = Error::unknown_key("p31x", ["p31a", "c54b", "ztl-R01", "p31b"]);
        match e {
            Error::UnknownKey { suggestions, .. } => {
                assert_eq!(&suggestions[..2], &["p31a".to_string(), "p31b".to_string()]);
            }
            _ => unreachable!(),
        }
    }
}
