//! Synchronized joint-space motion and the pick-and-place phase sequence.
//!
//! A move is executed as ToSource, Grasp, ToTarget, Release, Home. Each
//! motion phase is one [`Segment`] in which every joint interpolates
//! linearly and all joints arrive together; the slowest joint sets the
//! duration. Grasp and Release are stationary dwells.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{
    forward_kinematics, inverse_kinematics, ArmGeometry, JointAngles, KinematicsError, Point3,
};
use crate::notation::Color;

pub const DEFAULT_SPEED_MIN: f64 = 0.25;
pub const DEFAULT_SPEED_MAX: f64 = 4.0;
/// Metrics sampling step, seconds of simulated time.
pub const DEFAULT_METRICS_DT: f64 = 0.010;
pub const DEFAULT_DWELL: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum MotionError {
    #[error("sample time {t} outside [0, {duration}]")]
    OutOfRange { t: f64, duration: f64 },
    #[error("speed factor {s} outside [{min}, {max}]")]
    InvalidSpeed { s: f64, min: f64, max: f64 },
    #[error("{what} point unreachable: {source}")]
    Unreachable {
        what: &'static str,
        #[source]
        source: KinematicsError,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedBounds {
    pub min: f64,
    pub max: f64,
}

impl Default for SpeedBounds {
    fn default() -> Self {
        SpeedBounds {
            min: DEFAULT_SPEED_MIN,
            max: DEFAULT_SPEED_MAX,
        }
    }
}

/// Multiplier on every joint's maximum rate: the operator's speed slider.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpeedFactor(f64);

impl SpeedFactor {
    pub const ONE: SpeedFactor = SpeedFactor(1.0);

    pub fn new(s: f64) -> Result<Self, MotionError> {
        Self::within(s, SpeedBounds::default())
    }

    pub fn within(s: f64, bounds: SpeedBounds) -> Result<Self, MotionError> {
        if s.is_finite() && s > 0.0 && s >= bounds.min && s <= bounds.max {
            Ok(SpeedFactor(s))
        } else {
            Err(MotionError::InvalidSpeed {
                s,
                min: bounds.min,
                max: bounds.max,
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for SpeedFactor {
    fn default() -> Self {
        SpeedFactor::ONE
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionPhase {
    ToSource,
    Grasp,
    ToTarget,
    Release,
    Home,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: JointAngles,
    pub end: JointAngles,
    pub duration: f64,
}

pub fn plan_segment(
    from: JointAngles,
    to: JointAngles,
    geom: &ArmGeometry,
    speed: SpeedFactor,
) -> Segment {
    let slowest = from
        .as_array()
        .iter()
        .zip(to.as_array())
        .zip(geom.joint_speed)
        .map(|((a, b), w)| (b - a).abs() / w)
        .fold(0.0, f64::max);
    Segment {
        start: from,
        end: to,
        duration: slowest / speed.get(),
    }
}

fn lerp(seg: &Segment, fraction: f64) -> JointAngles {
    let (a, b) = (seg.start.as_array(), seg.end.as_array());
    JointAngles::from_array([0, 1, 2].map(|j| a[j] + fraction * (b[j] - a[j])))
}

/// Pose at time `t` into the segment. `t == duration` returns `end` exactly.
pub fn sample(seg: &Segment, t: f64) -> Result<JointAngles, MotionError> {
    if !(0.0..=seg.duration).contains(&t) {
        return Err(MotionError::OutOfRange {
            t,
            duration: seg.duration,
        });
    }
    if t == seg.duration {
        return Ok(seg.end);
    }
    Ok(lerp(seg, t / seg.duration))
}

/// Number of equal sub-steps no longer than `dt` covering the segment.
fn substeps(seg: &Segment, dt: f64) -> usize {
    // 1e-12 slack absorbs rounding in duration / dt.
    ((seg.duration / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Poses at equal time fractions of the segment, both endpoints included.
pub fn segment_poses(seg: &Segment, dt: f64) -> impl Iterator<Item = (f64, JointAngles)> + '_ {
    let n = substeps(seg, dt);
    (0..=n).map(move |k| {
        if k == n {
            (seg.duration, seg.end)
        } else {
            let f = k as f64 / n as f64;
            (f * seg.duration, lerp(seg, f))
        }
    })
}

/// Gripper polyline length over the segments sampled every `dt` or finer.
pub fn path_length(geom: &ArmGeometry, segments: &[Segment], dt: f64) -> f64 {
    assert!(dt > 0.0, "sampling step must be positive");
    segments
        .iter()
        .map(|seg| {
            let mut total = 0.0;
            let mut prev: Option<Point3> = None;
            for (_, q) in segment_poses(seg, dt) {
                let p = forward_kinematics(geom, &q);
                if let Some(last) = prev {
                    total += p.distance(last);
                }
                prev = Some(p);
            }
            total
        })
        .sum()
}

/// Manipulator identity: MR1 plays White, MR2 plays Black.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArmId {
    #[serde(rename = "MR1")]
    Mr1,
    #[serde(rename = "MR2")]
    Mr2,
}

impl ArmId {
    pub fn for_color(color: Color) -> ArmId {
        match color {
            Color::White => ArmId::Mr1,
            Color::Black => ArmId::Mr2,
        }
    }

    pub fn color(self) -> Color {
        match self {
            ArmId::Mr1 => Color::White,
            ArmId::Mr2 => Color::Black,
        }
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArmId::Mr1 => "MR1",
            ArmId::Mr2 => "MR2",
        })
    }
}

/// Time and gripper travel of one executed half-move.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveMetrics {
    /// 1-based half-move number within the game.
    pub half_move: usize,
    pub arm: ArmId,
    /// 0-based index among this arm's own moves.
    pub move_index: usize,
    pub duration: f64,
    pub path_length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Step {
    Move(MotionPhase, JointAngles),
    Dwell(MotionPhase, f64),
}

#[derive(Clone, Copy, Debug)]
enum Active {
    Moving {
        phase: MotionPhase,
        seg: Segment,
        elapsed: f64,
    },
    Dwelling {
        phase: MotionPhase,
        total: f64,
        elapsed: f64,
    },
}

/// Resolved joint targets of one pick-and-place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PickPlaceTargets {
    pub pick: Point3,
    pub place: Point3,
    pub pick_q: JointAngles,
    pub place_q: JointAngles,
    pub home_q: JointAngles,
}

impl PickPlaceTargets {
    pub fn solve(
        geom: &ArmGeometry,
        pick: Point3,
        place: Point3,
        home_q: JointAngles,
    ) -> Result<Self, MotionError> {
        let ik = |what, p| {
            inverse_kinematics(geom, p).map_err(|source| MotionError::Unreachable { what, source })
        };
        Ok(PickPlaceTargets {
            pick,
            place,
            pick_q: ik("pick", pick)?,
            place_q: ik("place", place)?,
            home_q,
        })
    }
}

/// Incremental executor of one pick-and-place, advanced by time budgets.
///
/// Each motion segment is planned when it starts, with whatever speed
/// factor is passed to [`advance`](Self::advance) at that moment.
#[derive(Clone, Debug)]
pub struct PickPlaceRun {
    targets: PickPlaceTargets,
    steps: [Step; 5],
    next: usize,
    active: Option<Active>,
    pose: JointAngles,
    holding: bool,
    released: bool,
    segments: Vec<Segment>,
    duration: f64,
}

impl PickPlaceRun {
    pub fn new(start: JointAngles, targets: PickPlaceTargets, dwell: f64) -> Self {
        PickPlaceRun {
            steps: [
                Step::Move(MotionPhase::ToSource, targets.pick_q),
                Step::Dwell(MotionPhase::Grasp, dwell),
                Step::Move(MotionPhase::ToTarget, targets.place_q),
                Step::Dwell(MotionPhase::Release, dwell),
                Step::Move(MotionPhase::Home, targets.home_q),
            ],
            targets,
            next: 0,
            active: None,
            pose: start,
            holding: false,
            released: false,
            segments: Vec::with_capacity(3),
            duration: 0.0,
        }
    }

    pub fn pose(&self) -> JointAngles {
        self.pose
    }

    pub fn phase(&self) -> Option<MotionPhase> {
        match self.active {
            Some(Active::Moving { phase, .. } | Active::Dwelling { phase, .. }) => Some(phase),
            None => self.steps.get(self.next).map(|s| match *s {
                Step::Move(p, _) | Step::Dwell(p, _) => p,
            }),
        }
    }

    pub fn is_finished(&self) -> bool {
        self.active.is_none() && self.next == self.steps.len()
    }

    /// Where the carried piece is: at the pick point before Grasp, on the
    /// gripper while held, exactly at the place point once released.
    pub fn piece_position(&self, geom: &ArmGeometry) -> Point3 {
        if self.released {
            self.targets.place
        } else if self.holding {
            forward_kinematics(geom, &self.pose)
        } else {
            self.targets.pick
        }
    }

    pub fn is_holding(&self) -> bool {
        self.holding
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Sum of planned segment durations and dwells so far.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Consumes up to `budget` seconds; returns the unused remainder (non-zero
    /// only once the run is finished).
    pub fn advance(&mut self, mut budget: f64, geom: &ArmGeometry, speed: SpeedFactor) -> f64 {
        loop {
            let active = match self.active.take() {
                Some(a) => a,
                None => {
                    let Some(&step) = self.steps.get(self.next) else {
                        return budget;
                    };
                    self.next += 1;
                    self.begin(step, geom, speed)
                }
            };
            match active {
                Active::Moving {
                    phase,
                    seg,
                    elapsed,
                } => {
                    let remaining = seg.duration - elapsed;
                    if budget >= remaining {
                        budget -= remaining;
                        self.pose = seg.end;
                    } else {
                        let elapsed = elapsed + budget;
                        self.pose = sample(&seg, elapsed).unwrap_or(seg.end);
                        self.active = Some(Active::Moving {
                            phase,
                            seg,
                            elapsed,
                        });
                        return 0.0;
                    }
                }
                Active::Dwelling {
                    phase,
                    total,
                    elapsed,
                } => {
                    let remaining = total - elapsed;
                    if budget >= remaining {
                        budget -= remaining;
                        if phase == MotionPhase::Release {
                            self.holding = false;
                            self.released = true;
                        }
                    } else {
                        self.active = Some(Active::Dwelling {
                            phase,
                            total,
                            elapsed: elapsed + budget,
                        });
                        return 0.0;
                    }
                }
            }
        }
    }

    fn begin(&mut self, step: Step, geom: &ArmGeometry, speed: SpeedFactor) -> Active {
        match step {
            Step::Move(phase, target) => {
                let seg = plan_segment(self.pose, target, geom, speed);
                self.duration += seg.duration;
                self.segments.push(seg);
                Active::Moving {
                    phase,
                    seg,
                    elapsed: 0.0,
                }
            }
            Step::Dwell(phase, total) => {
                self.duration += total;
                if phase == MotionPhase::Grasp {
                    self.holding = true;
                }
                Active::Dwelling {
                    phase,
                    total,
                    elapsed: 0.0,
                }
            }
        }
    }
}

/// One sampled instant of an executed pick-and-place.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub time: f64,
    pub phase: MotionPhase,
    pub joints: JointAngles,
    pub gripper: Point3,
    /// Position of the carried piece.
    pub piece: Point3,
    pub holding: bool,
}

/// Totals of one executed pick-and-place.
#[derive(Clone, Debug, PartialEq)]
pub struct PickPlaceOutcome {
    pub duration: f64,
    pub path_length: f64,
    pub segments: Vec<Segment>,
}

/// Runs one pick-and-place to completion at a fixed speed, sampling a trace
/// every `dt`. `arm` is left at the home pose.
pub fn execute_pickplace(
    arm: &mut JointAngles,
    targets: PickPlaceTargets,
    geom: &ArmGeometry,
    speed: SpeedFactor,
    dwell: f64,
    dt: f64,
) -> (PickPlaceOutcome, Vec<TraceSample>) {
    let mut run = PickPlaceRun::new(*arm, targets, dwell);
    let mut trace = Vec::new();
    let mut clock = 0.0;
    let mut record = |run: &PickPlaceRun, clock: f64, phase: MotionPhase| {
        trace.push(TraceSample {
            time: clock,
            phase,
            joints: run.pose(),
            gripper: forward_kinematics(geom, &run.pose()),
            piece: run.piece_position(geom),
            holding: run.is_holding(),
        })
    };
    record(&run, clock, MotionPhase::ToSource);
    while !run.is_finished() {
        let phase = run.phase().expect("unfinished run has a phase");
        let left = run.advance(dt, geom, speed);
        clock += dt - left;
        record(&run, clock, run.phase().unwrap_or(phase));
    }
    *arm = run.pose();
    let outcome = PickPlaceOutcome {
        duration: run.duration(),
        path_length: path_length(geom, run.segments(), dt),
        segments: run.segments().to_vec(),
    };
    (outcome, trace)
}
