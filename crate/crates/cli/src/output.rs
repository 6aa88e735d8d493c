//! Report files: atomic writes and the CSV layout of test reports.

use std::io::Write;
use std::path::{Path, PathBuf};

use polymer_core::stattest::report::sig17;
use polymer_core::TestReport;

use crate::CliError;

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory and a rename, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(&path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(&path, e))?;
    tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
    Ok(path)
}

pub const REPORT_CSV_HEADER: &str = "case,seed,kind,component,statistic,threshold,upper_bound,p_value,parameter,pass";

fn opt(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

/// One CSV row per component.
pub fn report_rows(r: &TestReport, out: &mut String) {
    for c in &r.components {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.case.as_deref().unwrap_or(""),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.kind,
            c.name,
            sig17(c.statistic),
            sig17(c.threshold),
            c.upper_bound,
            opt(c.p_value),
            opt(c.parameter),
            c.pass
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use polymer_core::Component;

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_atomic(dir.path(), "a.json", "first").unwrap();
        write_atomic(dir.path(), "a.json", "second").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn rows_use_seventeen_digits() {
        let r = TestReport::new("k", 10, vec![Component::at_most("d", 0.1, 1.0 / 3.0)]).with_case("c").with_seed(4);
        let mut s = String::new();
        report_rows(&r, &mut s);
        assert_eq!(s, "c,4,k,d,1.0000000000000001e-1,3.3333333333333331e-1,true,,,true\n");
    }
}
