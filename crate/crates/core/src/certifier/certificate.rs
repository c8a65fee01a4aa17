//! The certificate document: one `key: value` pair per line, floats at 17
//! significant digits so that parsing restores them exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::CertifyParams;
use crate::caps::degree_factor;
use crate::highdim::round_up;
use crate::{Error, Result};

pub const CERTIFICATE_KEYS: [&str; 8] = [
    "rho",
    "delta",
    "target",
    "boxes_checked",
    "max_box_bound",
    "certified_bound",
    "fp_slack",
    "passed",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub rho: f64,
    pub delta: f64,
    pub target: f64,
    pub boxes_checked: u64,
    /// Largest density bound over all boxes.
    pub max_box_bound: f64,
    /// `max_box_bound * 8 rho / (-rho^2 + 4 rho - 3) * (1 + fp_slack)`.
    pub certified_bound: f64,
    pub fp_slack: f64,
    pub passed: bool,
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Certificate {
    pub(crate) fn new(params: &CertifyParams, boxes_checked: u64, max_box_bound: f64) -> Self {
        let certified_bound = Self::bound_for(params.rho, max_box_bound, params.fp_slack);
        Certificate {
            rho: params.rho,
            delta: params.delta,
            target: params.target,
            boxes_checked,
            max_box_bound,
            certified_bound,
            fp_slack: params.fp_slack,
            passed: certified_bound < params.target,
        }
    }

    fn bound_for(rho: f64, max_box_bound: f64, fp_slack: f64) -> f64 {
        max_box_bound * degree_factor(rho) * (1.0 + fp_slack)
    }

    /// Checks the internal consistency of a parsed certificate.
    pub fn is_consistent(&self) -> bool {
        let bound = Self::bound_for(self.rho, self.max_box_bound, self.fp_slack);
        bound.to_bits() == self.certified_bound.to_bits() && self.passed == (bound < self.target)
    }

    pub fn emit(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rho: {}", float(self.rho));
        let _ = writeln!(s, "delta: {}", float(self.delta));
        let _ = writeln!(s, "target: {}", float(self.target));
        let _ = writeln!(s, "boxes_checked: {}", self.boxes_checked);
        let _ = writeln!(s, "max_box_bound: {}", float(self.max_box_bound));
        let _ = writeln!(s, "certified_bound: {}", float(self.certified_bound));
        let _ = writeln!(s, "fp_slack: {}", float(self.fp_slack));
        let _ = writeln!(s, "passed: {}", self.passed);
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values: [Option<&str>; 8] = [None; 8];
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key: value`", lineno + 1)))?;
            let slot = CERTIFICATE_KEYS
                .iter()
                .position(|k| *k == key.trim())
                .ok_or_else(|| Error::Parse(format!("line {}: unknown key `{}`", lineno + 1, key.trim())))?;
            if values[slot].replace(value.trim()).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key `{}`", lineno + 1, key.trim())));
            }
        }
        let get = |i: usize| values[i].ok_or_else(|| Error::Parse(format!("missing key `{}`", CERTIFICATE_KEYS[i])));
        let f = |i: usize| -> Result<f64> {
            get(i)?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{}: {e}", CERTIFICATE_KEYS[i])))
        };
        Ok(Certificate {
            rho: f(0)?,
            delta: f(1)?,
            target: f(2)?,
            boxes_checked: get(3)?
                .parse()
                .map_err(|e| Error::Parse(format!("boxes_checked: {e}")))?,
            max_box_bound: f(4)?,
            certified_bound: f(5)?,
            fp_slack: f(6)?,
            passed: get(7)?
                .parse()
                .map_err(|e| Error::Parse(format!("passed: {e}")))?,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.emit())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `CERTIFIED k3 < <bound> (rho=<r>, delta=<d>, boxes=<n>)` or `FAILED`.
    /// The displayed bound is rounded up at the sixth decimal.
    pub fn summary_line(&self) -> String {
        if self.passed {
            format!(
                "CERTIFIED k3 < {:.6} (rho={}, delta={}, boxes={})",
                round_up(self.certified_bound, 6),
                self.rho,
                self.delta,
                self.boxes_checked
            )
        } else {
            "FAILED".to_string()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Certificate {
        Certificate::new(
            &CertifyParams {
                rho: 1.755,
                delta: 0.0005,
                target: 13.955,
                fp_slack: 1e-9,
            },
            757_112_310,
            0.933_139_1,
        )
    }

    #[test]
    fn emits_expected_layout() {
        let c = sample();
        let text = c.emit();
        let keys: Vec<&str> = text.lines().map(|l| l.split_once(':').unwrap().0).collect();
        assert_eq!(keys, CERTIFICATE_KEYS);
        assert!(text.starts_with("rho: 1.7549999999999999e0\ndelta: 5.0000000000000001e-4\n"));
        assert!(text.ends_with("passed: true\n"));
        assert!(c.is_consistent());
        assert!(c.summary_line().starts_with("CERTIFIED k3 < 13.9"));
        assert!(c.summary_line().ends_with("(rho=1.755, delta=0.0005, boxes=757112310)"));
    }

    #[test]
    fn failing_certificate() {
        let mut c = sample();
        c.target = 13.90;
        c.passed = c.certified_bound < c.target;
        assert!(!c.passed);
        assert_eq!(c.summary_line(), "FAILED");
        let inf = Certificate::new(
            &CertifyParams {
                rho: 1.755,
                delta: 0.1,
                target: 14.0,
                fp_slack: 0.0,
            },
            10,
            f64::INFINITY,
        );
        assert!(!inf.passed);
        assert_eq!(Certificate::parse(&inf.emit()).unwrap(), inf);
    }

    #[test]
    fn parse_errors() {
        let text = sample().emit();
        assert!(Certificate::parse(&text.replace("passed: true", "passed: maybe")).is_err());
        assert!(Certificate::parse(&text.replace("rho:", "rhox:")).is_err());
        assert!(Certificate::parse(&format!("{text}rho: 1\n")).is_err());
        let missing: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(Certificate::parse(&missing).is_err());
        assert!(Certificate::parse("garbage").is_err());
    }

    proptest! {
        #[test]
        fn round_trips_bit_exactly(
            rho in 1.0001f64..2.9999,
            delta in 1e-5f64..0.1,
            target in 1.0f64..100.0,
            boxes in 0u64..u64::MAX,
            max in 0.0f64..2.0,
            slack in 0.0f64..1e-6,
        ) {
            let c = Certificate::new(&CertifyParams { rho, delta, target, fp_slack: slack }, boxes, max);
            let back = Certificate::parse(&c.emit()).unwrap();
            prop_assert_eq!(back, c);
            prop_assert_eq!(back.certified_bound.to_bits(), c.certified_bound.to_bits());
            prop_assert!(back.is_consistent());
        }
    }
}
