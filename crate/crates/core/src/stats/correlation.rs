use std::fmt;

use serde::{Deserialize, Serialize};

use super::dist::student_t_two_sided_p;
use super::StatsError;
use crate::timeseries::WeeklySeries;

/// Significance stars: `**` for p < 0.001, `*` for 0.001 <= p < 0.05,
/// `ns` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stars {
    #[serde(rename = "ns")]
    Ns,
    #[serde(rename = "*")]
    One,
    #[serde(rename = "**")]
    Two,
}

impl Stars {
    pub fn for_p(p: f64) -> Stars {
        if p < 0.001 {
            Stars::Two
        } else if p < 0.05 {
            Stars::One
        } else {
            Stars::Ns
        }
    }
}

impl fmt::Display for Stars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stars::Ns => write!(f, "ns"),
            Stars::One => write!(f, "*"),
            Stars::Two => write!(f, "**"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
    pub stars: Stars,
}

/// Sample Pearson correlation with a two-sided p-value from
/// `t = r sqrt((n-2)/(1-r^2))` against Student-t with n-2 degrees of freedom.
pub fn correlate(x: &WeeklySeries, y: &WeeklySeries) -> Result<CorrelationResult, StatsError> {
    if x.start() != y.start() || x.len() != y.len() {
        return Err(StatsError::Misaligned {
            a: x.id().to_string(),
            b: y.id().to_string(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooShort { len: n, needed: 3 });
    }

    let mx = x.values().iter().sum::<f64>() / n as f64;
    let my = y.values().iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.values().iter().zip(y.values()) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance {
            id: x.id().to_string(),
        });
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance {
            id: y.id().to_string(),
        });
    }

    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let dof = n - 2;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * ((dof as f64) / (1.0 - r * r)).sqrt();
        student_t_two_sided_p(t, dof)
    };
    Ok(CorrelationResult {
        r,
        p_value,
        n,
        stars: Stars::for_p(p_value),
    })
}
