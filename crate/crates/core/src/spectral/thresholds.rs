use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelFamily;

/// Largest delays for which the sufficient and necessary conditions hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub sufficient: f64,
    pub necessary: f64,
}

pub fn closed_form_threshold(family: KernelFamily, gamma: f64) -> Result<Thresholds> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    match family {
        KernelFamily::NonlocalWeakGeneric => {
            let necessary = (1.0 + gamma) / 4.0;
            let sufficient = if gamma <= 1.0 { necessary } else { gamma / (1.0 + gamma) };
            Ok(Thresholds { sufficient, necessary })
        }
        KernelFamily::NonlocalStrongGeneric => {
            let necessary = 4.0 * (1.0 + gamma) / 27.0;
            let sufficient = if gamma <= 0.8 {
                necessary
            } else {
                gamma * (1.0 - (gamma / (1.0 + gamma)).sqrt())
            };
            Ok(Thresholds { sufficient, necessary })
        }
        other => Err(Error::UnsupportedFamily {
            family: other.to_string(),
            operation: "closed_form_threshold",
        }),
    }
}

/// Speeds c ≥ 2 admitting a monotone front for the local point delay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpeedSet {
    AllSpeeds,
    Interval { min: f64, max: f64 },
    Empty,
}

impl SpeedSet {
    pub fn contains(&self, c: f64) -> bool {
        match *self {
            SpeedSet::AllSpeeds => c >= 2.0,
            SpeedSet::Interval { min, max } => c >= min && c <= max,
            SpeedSet::Empty => false,
        }
    }
}

pub fn speed_interval_discrete(gamma: f64, tau: f64) -> Result<SpeedSet> {
    if !(gamma > 0.0 && tau > 0.0) {
        return Err(Error::invalid(format!("need gamma > 0 and tau > 0, got {gamma}, {tau}")));
    }
    let l = ((1.0 + gamma) / gamma).ln();
    if tau <= gamma * l {
        return Ok(SpeedSet::AllSpeeds);
    }
    let radicand = 1.0 / gamma - l / tau;
    if radicand <= 0.0 {
        return Ok(SpeedSet::Empty);
    }
    let max = l / (tau * radicand.sqrt());
    if max >= 2.0 {
        Ok(SpeedSet::Interval { min: 2.0, max })
    } else {
        Ok(SpeedSet::Empty)
    }
}
