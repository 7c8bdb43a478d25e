//! Report formatting and small line-oriented file readers.

use std::fmt::Display;
use std::fmt::Write as _;
use std::path::Path;

use ugcbench_core::corpus_io::read_corpus;
use ugcbench_core::{Error, Result};

/// Appends one aligned `key value` report line.
pub fn kv(out: &mut String, key: &str, value: impl Display) {
    let _ = writeln!(out, "{key:<22}{value}");
}

/// Writes a pretty-printed JSON document with a trailing newline.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads one finite float per non-empty line.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let lines = read_corpus(path)?;
    let mut values = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("expected a number, found {trimmed:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("non-finite value {trimmed}"),
            });
        }
        values.push(v);
    }
    Ok(values)
}

/// Reads one binary label per non-empty line; accepts `0`/`1` and
/// `false`/`true`.
pub fn read_labels(path: &Path) -> Result<Vec<bool>> {
    let lines = read_corpus(path)?;
    let mut labels = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let label = match line.trim() {
            "" => continue,
            "0" | "false" => false,
            "1" | "true" => true,
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected 0 or 1, found {other:?}"),
                })
            }
        };
        labels.push(label);
    }
    Ok(labels)
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn kv_aligns_keys() {
        let mut out = String::new();
        kv(&mut out, "metric", "xsim_error_rate");
        kv(&mut out, "k", 4);
        assert_eq!(out, "metric                xsim_error_rate\nk                     4\n");
    }

    #[test]
    fn value_files_reject_junk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        fs::write(&path, "1.5\n\n 2 \n").unwrap();
        assert_eq!(read_values(&path).unwrap(), vec![1.5, 2.0]);
        fs::write(&path, "1.5\nbanana\n").unwrap();
        let err = read_values(&path).unwrap_err();
        assert!(err.to_string().contains("banana"), "{err}");
        fs::write(&path, "inf\n").unwrap();
        assert!(read_values(&path).is_err());
    }

    #[test]
    fn label_files_accept_both_spellings() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.txt");
        fs::write(&path, "1\nfalse\ntrue\n0\n").unwrap();
        assert_eq!(read_labels(&path).unwrap(), vec![true, false, true, false]);
        fs::write(&path, "2\n").unwrap();
        assert!(read_labels(&path).is_err());
    }

    #[test]
    fn mean_sd_of_constant_and_spread() {
        assert_eq!(mean_sd(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0]);
        assert!((m - 2.0).abs() < 1e-12);
        assert!((s - 1.0).abs() < 1e-12);
    }
}
