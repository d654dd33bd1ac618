//! Per-move measurements and the game-level indicators: mean move time per
//! arm and the Pearson correlation of the two arms' move-time series.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::motion::{ArmId, MoveMetrics};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("duplicate move {index} for {arm}")]
    DuplicateIndex { arm: ArmId, index: usize },
    #[error("move {index} for {arm} recorded after move {last}")]
    OutOfOrder {
        arm: ArmId,
        index: usize,
        last: usize,
    },
    #[error("no moves were recorded")]
    EmptyGame,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum StatsError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("at least two pairs are required")]
    TooShort,
    #[error("a series has zero variance")]
    ZeroVariance,
}

/// Sample Pearson correlation coefficient, two-pass.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatsError::TooShort);
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UndefinedReason {
    #[serde(rename = "fewer than 2 pairs")]
    FewerThanTwoPairs,
    #[serde(rename = "zero variance")]
    ZeroVariance,
}

impl UndefinedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UndefinedReason::FewerThanTwoPairs => "fewer than 2 pairs",
            UndefinedReason::ZeroVariance => "zero variance",
        }
    }
}

/// Correlation between the arms' move times, or why it has no value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Correlation {
    Defined(f64),
    Undefined { undefined: UndefinedReason },
}

impl Correlation {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Correlation::Defined(r) => Some(r),
            Correlation::Undefined { .. } => None,
        }
    }
}

/// Pairs the i-th White move with the i-th Black move; an unmatched
/// trailing move is dropped.
pub fn paired_correlation(white: &[f64], black: &[f64]) -> Correlation {
    let n = white.len().min(black.len());
    match pearson(&white[..n], &black[..n]) {
        Ok(r) => Correlation::Defined(r),
        Err(StatsError::ZeroVariance) => Correlation::Undefined {
            undefined: UndefinedReason::ZeroVariance,
        },
        Err(_) => Correlation::Undefined {
            undefined: UndefinedReason::FewerThanTwoPairs,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub per_move: Vec<MoveMetrics>,
    pub mean_white: Option<f64>,
    pub mean_black: Option<f64>,
    pub r12: Correlation,
    pub total_path_white: f64,
    pub total_path_black: f64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Running {
    count: usize,
    duration: f64,
    path: f64,
    last_index: Option<usize>,
}

/// Accumulates move metrics as a game is played.
#[derive(Clone, Debug, Default)]
pub struct MetricsRecorder {
    per_move: Vec<MoveMetrics>,
    white: Running,
    black: Running,
}

impl MetricsRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, m: MoveMetrics) -> Result<(), MetricsError> {
        let running = match m.arm {
            ArmId::Mr1 => &mut self.white,
            ArmId::Mr2 => &mut self.black,
        };
        if let Some(last) = running.last_index {
            if m.move_index == last {
                return Err(MetricsError::DuplicateIndex {
                    arm: m.arm,
                    index: last,
                });
            }
            if m.move_index < last {
                return Err(MetricsError::OutOfOrder {
                    arm: m.arm,
                    index: m.move_index,
                    last,
                });
            }
        }
        running.last_index = Some(m.move_index);
        running.count += 1;
        running.duration += m.duration;
        running.path += m.path_length;
        self.per_move.push(m);
        Ok(())
    }

    pub fn moves(&self) -> &[MoveMetrics] {
        &self.per_move
    }

    pub fn is_empty(&self) -> bool {
        self.per_move.is_empty()
    }

    /// Mean move time so far for `arm`.
    pub fn mean(&self, arm: ArmId) -> Option<f64> {
        let r = match arm {
            ArmId::Mr1 => &self.white,
            ArmId::Mr2 => &self.black,
        };
        (r.count > 0).then(|| r.duration / r.count as f64)
    }

    pub fn finalize(&self) -> Result<GameReport, MetricsError> {
        if self.per_move.is_empty() {
            return Err(MetricsError::EmptyGame);
        }
        let mut per_move = self.per_move.clone();
        per_move.sort_by_key(|m| m.half_move);
        let series = |arm: ArmId| -> Vec<f64> {
            per_move
                .iter()
                .filter(|m| m.arm == arm)
                .map(|m| m.duration)
                .collect()
        };
        let r12 = paired_correlation(&series(ArmId::Mr1), &series(ArmId::Mr2));
        Ok(GameReport {
            mean_white: self.mean(ArmId::Mr1),
            mean_black: self.mean(ArmId::Mr2),
            r12,
            total_path_white: self.white.path,
            total_path_black: self.black.path,
            per_move,
        })
    }
}

impl GameReport {
    pub fn durations(&self, arm: ArmId) -> Vec<f64> {
        self.per_move
            .iter()
            .filter(|m| m.arm == arm)
            .map(|m| m.duration)
            .collect()
    }

    pub fn moves_by(&self, arm: ArmId) -> usize {
        self.per_move.iter().filter(|m| m.arm == arm).count()
    }

    /// Mean over every half-move regardless of arm.
    pub fn mean_move_time(&self) -> f64 {
        self.per_move.iter().map(|m| m.duration).sum::<f64>() / self.per_move.len() as f64
    }

    /// `half_move,arm,duration_s,path_m`, six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("half_move,arm,duration_s,path_m\n");
        for m in &self.per_move {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6}",
                m.half_move, m.arm, m.duration, m.path_length
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human summary with the three game indicators.
    pub fn summary(&self) -> String {
        let fmt_mean = |m: Option<f64>| m.map_or("n/a".to_string(), |v| format!("{v:.3} s"));
        let r12 = match self.r12 {
            Correlation::Defined(r) => format!("{r:.3}"),
            Correlation::Undefined { undefined } => format!("undefined ({})", undefined.as_str()),
        };
        let counts: BTreeMap<ArmId, usize> = [ArmId::Mr1, ArmId::Mr2]
            .into_iter()
            .map(|a| (a, self.moves_by(a)))
            .collect();
        format!(
            "MR1 (white): {} moves, mean {}, path {:.3} m\n\
             MR2 (black): {} moves, mean {}, path {:.3} m\n\
             r12 = {}\n",
            counts[&ArmId::Mr1],
            fmt_mean(self.mean_white),
            self.total_path_white,
            counts[&ArmId::Mr2],
            fmt_mean(self.mean_black),
            self.total_path_black,
            r12
        )
    }
}
