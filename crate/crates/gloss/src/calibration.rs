//! Generator amplitudes as a flat `key = value` file.

use std::path::Path;

use anyhow::{bail, Context};
use gloss_core::eval::Calibration;

const KEYS: [&str; 5] = [
    "sim1_shift",
    "sim2_shift",
    "sim2_correlation",
    "sim3_shift",
    "sim4_shift",
];

/// Parses `key = value` lines; `#` starts a comment. Missing keys keep the defaults.
pub fn parse(text: &str) -> anyhow::Result<Calibration> {
    let mut cal = Calibration::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key = value", i + 1))?;
        let key = key.trim();
        let v: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("line {}: bad number for {key}", i + 1))?;
        if !v.is_finite() {
            bail!("line {}: {key} must be finite", i + 1);
        }
        match key {
            "sim1_shift" => cal.sim1_shift = v,
            "sim2_shift" => cal.sim2_shift = v,
            "sim2_correlation" => cal.sim2_correlation = v,
            "sim3_shift" => cal.sim3_shift = v,
            "sim4_shift" => cal.sim4_shift = v,
            other => bail!("line {}: unknown key {other:?} (known: {})", i + 1, KEYS.join(", ")),
        }
    }
    if !(0.0..1.0).contains(&cal.sim2_correlation) {
        bail!("sim2_correlation must lie in [0, 1)");
    }
    Ok(cal)
}

pub fn load(path: &Path) -> anyhow::Result<Calibration> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

pub fn render(cal: &Calibration) -> String {
    format!(
        "# mean-shift amplitudes calibrated to the target Bayes errors\n\
         sim1_shift = {}\n\
         sim2_shift = {}\n\
         sim2_correlation = {}\n\
         sim3_shift = {}\n\
         sim4_shift = {}\n",
        cal.sim1_shift, cal.sim2_shift, cal.sim2_correlation, cal.sim3_shift, cal.sim4_shift
    )
}
