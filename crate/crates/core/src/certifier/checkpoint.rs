//! Resumable certification state.
//!
//! Floats are stored as their IEEE bit patterns so a resumed run continues
//! from exactly the same reduction state.

use std::path::Path;

use super::grid::SlabSummary;
use super::{CertifyParams, CornerRule};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct CheckpointState {
    pub rho_bits: u64,
    pub delta_bits: u64,
    pub target_bits: u64,
    pub fp_slack_bits: u64,
    pub rule: CornerRule,
    pub boxes_per_axis: usize,
    /// First slab not yet processed.
    pub next_slab: usize,
    pub boxes_done: u64,
    pub max_bits: u64,
    pub worst: [usize; 3],
    pub unbounded: u64,
}

impl CheckpointState {
    pub fn fresh(params: &CertifyParams, rule: CornerRule, boxes_per_axis: usize) -> Self {
        CheckpointState {
            rho_bits: params.rho.to_bits(),
            delta_bits: params.delta.to_bits(),
            target_bits: params.target.to_bits(),
            fp_slack_bits: params.fp_slack.to_bits(),
            rule,
            boxes_per_axis,
            next_slab: 0,
            boxes_done: 0,
            max_bits: f64::NEG_INFINITY.to_bits(),
            worst: [0; 3],
            unbounded: 0,
        }
    }

    /// Folds in a summary of slabs that follow everything absorbed so far.
    pub fn absorb(&mut self, s: &SlabSummary) {
        self.boxes_done += s.boxes;
        self.unbounded += s.unbounded;
        if s.boxes > 0 && s.max > f64::from_bits(self.max_bits) {
            self.max_bits = s.max.to_bits();
            self.worst = s.worst;
        }
    }

    pub fn check_matches(
        &self,
        path: &Path,
        params: &CertifyParams,
        rule: CornerRule,
        boxes_per_axis: usize,
    ) -> Result<()> {
        let expected = Self::fresh(params, rule, boxes_per_axis);
        let same = self.rho_bits == expected.rho_bits
            && self.delta_bits == expected.delta_bits
            && self.target_bits == expected.target_bits
            && self.fp_slack_bits == expected.fp_slack_bits
            && self.rule == rule
            && self.boxes_per_axis == boxes_per_axis
            && self.next_slab <= boxes_per_axis;
        if same {
            Ok(())
        } else {
            Err(Error::Checkpoint {
                path: path.to_path_buf(),
                reason: "checkpoint was written for different parameters".into(),
            })
        }
    }

    pub fn emit(&self) -> String {
        format!(
            "rho_bits: {:016x}\ndelta_bits: {:016x}\ntarget_bits: {:016x}\nfp_slack_bits: {:016x}\n\
             rule: {}\nboxes_per_axis: {}\nnext_slab: {}\nboxes_done: {}\nmax_bits: {:016x}\n\
             worst: {} {} {}\nunbounded: {}\n",
            self.rho_bits,
            self.delta_bits,
            self.target_bits,
            self.fp_slack_bits,
            self.rule.name(),
            self.boxes_per_axis,
            self.next_slab,
            self.boxes_done,
            self.max_bits,
            self.worst[0],
            self.worst[1],
            self.worst[2],
            self.unbounded
        )
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut map = std::collections::HashMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line.split_once(':').ok_or_else(|| format!("malformed line `{line}`"))?;
            map.insert(k.trim(), v.trim());
        }
        let get = |k: &str| map.get(k).copied().ok_or_else(|| format!("missing `{k}`"));
        let hex = |k: &str| -> std::result::Result<u64, String> {
            u64::from_str_radix(get(k)?, 16).map_err(|e| format!("{k}: {e}"))
        };
        let int = |k: &str| -> std::result::Result<u64, String> {
            get(k)?.parse::<u64>().map_err(|e| format!("{k}: {e}"))
        };
        let worst: Vec<usize> = get("worst")?
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| format!("worst: {e}")))
            .collect::<std::result::Result<_, _>>()?;
        let worst: [usize; 3] = worst.try_into().map_err(|_| "worst: expected three indices".to_string())?;
        Ok(CheckpointState {
            rho_bits: hex("rho_bits")?,
            delta_bits: hex("delta_bits")?,
            target_bits: hex("target_bits")?,
            fp_slack_bits: hex("fp_slack_bits")?,
            rule: CornerRule::from_name(get("rule")?).ok_or("rule: unknown corner rule")?,
            boxes_per_axis: int("boxes_per_axis")? as usize,
            next_slab: int("next_slab")? as usize,
            boxes_done: int("boxes_done")?,
            max_bits: hex("max_bits")?,
            worst,
            unbounded: int("unbounded")?,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|reason| Error::Checkpoint {
            path: path.to_path_buf(),
            reason,
        })
    }

    /// Writes through a temporary file and a rename so a crash never leaves
    /// a torn checkpoint.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        std::fs::write(&tmp, self.emit())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}
