//! One-time scaling of the indicators against a reference run.

use crate::error::{Error, Result};
use std::path::Path;

/// `s` multiplies every bound; `C_M` enters the general upper bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub s: f64,
    pub c_m: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration { s: 1.0, c_m: 1.0 }
    }
}

impl Calibration {
    /// Chooses `s` so that `s·η` equals the error on the last (finest) level.
    /// `levels` holds `(error, η)` pairs in refinement order.
    pub fn from_reference(levels: &[(f64, f64)]) -> Result<Self> {
        let &(err, eta) = levels
            .last()
            .ok_or_else(|| Error::MissingReference("reference run has no levels".into()))?;
        if !(err.is_finite() && eta.is_finite() && eta > 0.0 && err > 0.0) {
            return Err(Error::MissingReference(format!("unusable finest level: error {err}, estimator {eta}")));
        }
        Ok(Calibration { s: err / eta, c_m: 1.0 })
    }

    pub fn to_text(&self) -> String {
        format!("s={:.17e}\nC_M={:.17e}\n", self.s, self.c_m)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut s = None;
        let mut c_m = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("calibration line without '=': {line}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("calibration value is not a number: {line}")))?;
            match k.trim() {
                "s" => s = Some(v),
                "C_M" => c_m = Some(v),
                other => return Err(Error::InvalidConfig(format!("unknown calibration key {other}"))),
            }
        }
        match (s, c_m) {
            (Some(s), Some(c_m)) if s > 0.0 && c_m > 0.0 => Ok(Calibration { s, c_m }),
            _ => Err(Error::InvalidConfig("calibration needs positive s and C_M".into())),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_of_finest_level() {
        let c = Calibration::from_reference(&[(1.0, 1.0), (0.2, 0.4)]).unwrap();
        assert_eq!(c.s, 0.5);
        assert_eq!(c.c_m, 1.0);
        assert!(Calibration::from_reference(&[]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = Calibration { s: 0.123456789, c_m: 1.0 };
        assert_eq!(Calibration::parse(&c.to_text()).unwrap(), c);
        assert!(Calibration::parse("s=abc\nC_M=1").is_err());
        assert!(Calibration::parse("s=1").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cal.txt");
        let c = Calibration { s: 2.5, c_m: 1.0 };
        c.save(&p).unwrap();
        assert_eq!(Calibration::load(&p).unwrap(), c);
    }
}
