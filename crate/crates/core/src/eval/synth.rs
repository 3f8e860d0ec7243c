use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::timeseries::{align_panel, rescale_0_100, Panel, WeekIndex, WeeklySeries};

/// A Gaussian bump: center week, height, width (standard deviation in weeks).
pub type Peak = (f64, f64, f64);

/// Parameters of the synthetic benchmark panel.
///
/// Cases are a sum of Gaussian waves. Media rises sharply to an early peak
/// that precedes the first case wave, then decays exponentially. Three term
/// groups follow the cases curve, the media curve, and an unrelated smooth
/// background curve respectively, each with per-term amplitude, offset, and
/// noise.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub weeks: usize,
    pub start: WeekIndex,
    pub wave_peaks: Vec<Peak>,
    /// (center week, height, rise width, decay constant in weeks).
    pub media_peak: (f64, f64, f64, f64),
    pub cluster_sizes: (usize, usize, usize),
    /// Per-week noise standard deviation added to each term, on the 0-100
    /// scale of the base curves.
    pub noise_sd: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            weeks: 120,
            start: WeekIndex::new(2020, 1).expect("valid week"),
            wave_peaks: vec![(30.0, 800.0, 6.0), (85.0, 1000.0, 8.0)],
            media_peak: (22.0, 600.0, 3.0, 12.0),
            cluster_sizes: (8, 8, 8),
            noise_sd: 3.0,
        }
    }
}

/// True cluster labels of the generated terms, for agreement checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthTruth {
    pub labels: BTreeMap<String, u32>,
    pub seed: u64,
    pub cluster_sizes: (usize, usize, usize),
}

fn gaussian_bump(t: f64, center: f64, height: f64, width: f64) -> f64 {
    height * (-((t - center) / width).powi(2) / 2.0).exp()
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn to_0_100(values: &[f64]) -> Vec<f64> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| 100.0 * (v - min) / (max - min)).collect()
}

/// Deterministic synthetic panel with known cluster structure.
///
/// Terms are rescaled to 0-100 like real search-volume exports. With
/// `noise_sd = 0` all terms within a group become identical after rescaling,
/// since the per-term amplitude and offset are affine.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<(Panel, SynthTruth), EvalError> {
    if spec.weeks < 52 {
        return Err(EvalError::BadSpec(format!(
            "need at least 52 weeks, got {}",
            spec.weeks
        )));
    }
    let (n1, n2, n3) = spec.cluster_sizes;
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(EvalError::BadSpec("cluster sizes must be positive".into()));
    }
    if spec.wave_peaks.is_empty() {
        return Err(EvalError::BadSpec("need at least one case wave".into()));
    }
    if !spec.noise_sd.is_finite() || spec.noise_sd < 0.0 {
        return Err(EvalError::BadSpec("noise_sd must be nonnegative".into()));
    }
    let (m_center, m_height, m_width, m_decay) = spec.media_peak;
    if m_width <= 0.0 || m_decay <= 0.0 {
        return Err(EvalError::BadSpec("media width and decay must be positive".into()));
    }
    for &(_, height, width) in &spec.wave_peaks {
        if height <= 0.0 || width <= 0.0 {
            return Err(EvalError::BadSpec("wave heights and widths must be positive".into()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weeks = spec.weeks;

    let cases: Vec<f64> = (0..weeks)
        .map(|t| {
            spec.wave_peaks
                .iter()
                .map(|&(c, h, w)| gaussian_bump(t as f64, c, h, w))
                .sum()
        })
        .collect();
    let media: Vec<f64> = (0..weeks)
        .map(|t| {
            let t = t as f64;
            if t <= m_center {
                gaussian_bump(t, m_center, m_height, m_width)
            } else {
                m_height * (-(t - m_center) / m_decay).exp()
            }
        })
        .collect();

    // Smooth background curve, independent of cases and media: a smoothed
    // seeded random walk.
    let raw_walk: Vec<f64> = {
        let mut acc = 0.0;
        (0..weeks)
            .map(|_| {
                acc += gauss(&mut rng);
                acc
            })
            .collect()
    };
    let window = 9usize;
    let background: Vec<f64> = (0..weeks)
        .map(|t| {
            let lo = t.saturating_sub(window / 2);
            let hi = (t + window / 2 + 1).min(weeks);
            raw_walk[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();

    let bases = [to_0_100(&cases), to_0_100(&media), to_0_100(&background)];

    let mut terms = Vec::new();
    let mut labels = BTreeMap::new();
    for (cluster, &size) in [n1, n2, n3].iter().enumerate() {
        let base = &bases[cluster];
        let cluster_id = cluster as u32 + 1;
        for i in 0..size {
            let id = format!("term_c{}_{:02}", cluster_id, i + 1);
            let amplitude = rng.random_range(0.5..1.5);
            let offset = rng.random_range(0.0..10.0);
            let values: Vec<f64> = base
                .iter()
                .map(|v| {
                    amplitude * v + offset + spec.noise_sd * gauss(&mut rng)
                })
                .collect();
            let series = WeeklySeries::new(&id, spec.start, values)?;
            let (rescaled, _) = rescale_0_100(&series)?;
            labels.insert(id, cluster_id);
            terms.push(rescaled);
        }
    }

    let panel = align_panel(
        terms,
        Some(WeeklySeries::new("media", spec.start, media)?),
        Some(WeeklySeries::new("cases", spec.start, cases)?),
    )?;
    Ok((
        panel,
        SynthTruth {
            labels,
            seed: spec.seed,
            cluster_sizes: spec.cluster_sizes,
        },
    ))
}
