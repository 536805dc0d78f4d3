//! Whitespace-separated plot data.

use super::adapt::LevelRecord;
use super::config::ProblemKind;
use crate::error::{Error, Result};
use std::fmt::Write;
use std::path::Path;

pub fn csv_header(kind: ProblemKind) -> &'static str {
    match kind {
        ProblemKind::Distributed => "Dofs dkalpha Asbou Nasbou esti",
        ProblemKind::Neumann => "Dofs H1error Asbou Nasbou lextra lower",
        ProblemKind::UnitSquarePoisson => "Dofs H1error esti",
    }
}

fn num(v: f64) -> String {
    format!("{:.11e}", v)
}

pub fn csv_string(records: &[LevelRecord], kind: ProblemKind) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut s = String::from(csv_header(kind));
    s.push('\n');
    for r in records {
        let cols = match kind {
            ProblemKind::Distributed => vec![num(r.error), num(r.asbou), num(r.nasbou), num(r.esti)],
            ProblemKind::Neumann => {
                vec![num(r.error), num(r.asbou), num(r.nasbou), num(r.lextra), num(r.lower.max(0.0))]
            }
            ProblemKind::UnitSquarePoisson => vec![num(r.error), num(r.esti)],
        };
        let _ = writeln!(s, "{} {}", r.dofs, cols.join(" "));
    }
    Ok(s)
}

pub fn emit_csv(records: &[LevelRecord], kind: ProblemKind, path: &Path) -> Result<()> {
    let s = csv_string(records, kind)?;
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(dofs: usize) -> LevelRecord {
        LevelRecord {
            level: 0,
            dofs,
            error: 0.5,
            esti: 0.25,
            nasbou: 2.0,
            asbou: 1.0,
            lextra: 0.1,
            lower: -0.3,
            eta: 0.4,
            kappa: 6.0,
            compactness: 0.1,
            energy_error: 0.5,
            delta_term: 0.0,
            newton_iters: 1,
            residual: 0.0,
            residual_scale: 1.0,
            triangles: 8,
        }
    }

    #[test]
    fn empty_records_rejected_without_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        assert!(matches!(emit_csv(&[], ProblemKind::Distributed, &p), Err(Error::EmptyRecords)));
        assert!(!p.exists());
    }

    #[test]
    fn one_record_gives_two_lines() {
        let s = csv_string(&[record(12)], ProblemKind::Distributed).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines, vec!["Dofs dkalpha Asbou Nasbou esti", "12 5.00000000000e-1 1.00000000000e0 2.00000000000e0 2.50000000000e-1"]);
    }

    #[test]
    fn neumann_lower_is_clamped() {
        let s = csv_string(&[record(3)], ProblemKind::Neumann).unwrap();
        assert!(s.lines().nth(1).unwrap().ends_with(" 0.00000000000e0"));
    }
}
