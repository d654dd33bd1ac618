use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Mode, SimConfig};
use super::sim::Simulation;
use super::EngineError;
use crate::metrics::Correlation;
use crate::notation::DecodedMove;

/// Axes of a parameter sweep, one `key = v1, v2, ...` line per axis.
///
/// Keys are configuration keys; `arms.` applies to both arms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParameterGrid {
    pub axes: Vec<(String, Vec<String>)>,
}

impl ParameterGrid {
    pub fn parse(text: &str) -> Result<Self, EngineError> {
        let mut axes: Vec<(String, Vec<String>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| EngineError::Grid {
                line: i + 1,
                message,
            };
            let (key, values) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = v1, v2, ...`, got {line:?}")))?;
            let key = key.trim().to_string();
            if axes.iter().any(|(k, _)| *k == key) {
                return Err(err(format!("{key} listed twice")));
            }
            let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
            if values.iter().any(String::is_empty) {
                return Err(err(format!("{key} has an empty value")));
            }
            axes.push((key, values));
        }
        Ok(ParameterGrid { axes })
    }

    pub fn len(&self) -> usize {
        if self.axes.is_empty() {
            0
        } else {
            self.axes.iter().map(|(_, v)| v.len()).product()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cartesian product in row-major order (last axis varies fastest).
    pub fn points(&self) -> Vec<Vec<(String, String)>> {
        let mut out: Vec<Vec<(String, String)>> = vec![Vec::new()];
        for (key, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push((key.clone(), v.clone()));
                        q
                    })
                })
                .collect();
        }
        if self.axes.is_empty() {
            Vec::new()
        } else {
            out
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum SweepStatus {
    Ok,
    Unreachable(String),
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: Vec<(String, String)>,
    pub status: SweepStatus,
    /// Mean over every half-move of the game.
    pub mean_move_time: Option<f64>,
    pub mean_white: Option<f64>,
    pub mean_black: Option<f64>,
    pub total_path_white: Option<f64>,
    pub total_path_black: Option<f64>,
    pub r12: Option<Correlation>,
}

fn evaluate(base: &SimConfig, moves: &[DecodedMove], params: Vec<(String, String)>) -> SweepRow {
    let mut row = SweepRow {
        params,
        status: SweepStatus::Ok,
        mean_move_time: None,
        mean_white: None,
        mean_black: None,
        total_path_white: None,
        total_path_black: None,
        r12: None,
    };
    let mut cfg = base.clone();
    cfg.mode = Mode::Virtual;
    cfg.realtime = false;
    if let Some(e) = row.params.iter().find_map(|(k, v)| cfg.set(k, v).err()) {
        row.status = SweepStatus::Invalid(e);
        return row;
    }
    let result = Simulation::new(cfg, moves).and_then(|mut sim| sim.run_to_end(|_| {}));
    match result {
        Ok(r) => {
            row.mean_move_time = Some(r.mean_move_time());
            row.mean_white = r.mean_white;
            row.mean_black = r.mean_black;
            row.total_path_white = Some(r.total_path_white);
            row.total_path_black = Some(r.total_path_black);
            row.r12 = Some(r.r12);
        }
        Err(e @ EngineError::Unreachable { .. }) => {
            row.status = SweepStatus::Unreachable(e.to_string())
        }
        Err(e) => row.status = SweepStatus::Invalid(e.to_string()),
    }
    row
}

/// Plays the game in virtual mode at every grid point. Feasible rows come
/// first, fastest mean move time first; ties keep grid order.
pub fn sweep(
    base: &SimConfig,
    moves: &[DecodedMove],
    grid: &ParameterGrid,
) -> Result<Vec<SweepRow>, EngineError> {
    let points = grid.points();
    if points.is_empty() {
        return Err(EngineError::EmptyGrid);
    }
    let mut rows: Vec<SweepRow> = points
        .into_par_iter()
        .map(|p| evaluate(base, moves, p))
        .collect();
    rows.sort_by(|a, b| {
        let key = |r: &SweepRow| r.mean_move_time.unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b))
    });
    Ok(rows)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.9}")).unwrap_or_default()
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let Some(first) = rows.first() else {
        return out;
    };
    for (k, _) in &first.params {
        out.push_str(k);
        out.push(',');
    }
    out.push_str("status,mean_move_s,mean_white_s,mean_black_s,path_white_m,path_black_m,r12\n");
    for r in rows {
        for (_, v) in &r.params {
            out.push_str(v);
            out.push(',');
        }
        let status = match &r.status {
            SweepStatus::Ok => "ok",
            SweepStatus::Unreachable(_) => "unreachable",
            SweepStatus::Invalid(_) => "invalid",
        };
        let r12 = match r.r12 {
            Some(Correlation::Defined(x)) => format!("{x:.9}"),
            Some(Correlation::Undefined { undefined }) => undefined.as_str().to_string(),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{status},{},{},{},{},{},{r12}",
            cell(r.mean_move_time),
            cell(r.mean_white),
            cell(r.mean_black),
            cell(r.total_path_white),
            cell(r.total_path_black),
        );
    }
    out
}
