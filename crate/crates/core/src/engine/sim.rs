use serde::{Deserialize, Serialize};

use super::config::{Mode, SimConfig};
use super::EngineError;
use crate::kinematics::{forward_kinematics, ArmGeometry, BoardLayout, JointAngles, Point3};
use crate::metrics::GameReport;
use crate::motion::{
    path_length, ArmId, MotionPhase, MoveMetrics, PickPlaceRun, PickPlaceTargets, Segment,
    SpeedFactor,
};
use crate::notation::{decode_game, Color, DecodedMove, GameScript, PieceKind};
use crate::scheduler::{MoveRequest, Scheduler, Tabletop, TurnPhase};

/// Operator commands accepted by a running simulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Start,
    StepOne,
    SetSpeed { arm: ArmId, speed: f64 },
    SetMode { mode: Mode },
    Abort,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Start => "start",
            Command::StepOne => "step_one",
            Command::SetSpeed { .. } => "set_speed",
            Command::SetMode { .. } => "set_mode",
            Command::Abort => "abort",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    pub command: String,
    pub phase: TurnPhase,
    pub sim_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSnapshot {
    pub arm: ArmId,
    pub joints: JointAngles,
    pub gripper: Point3,
    pub motion: Option<MotionPhase>,
    pub holding: bool,
    pub speed: f64,
    /// Duration of this arm's latest completed move.
    pub last_move_time: Option<f64>,
    /// Half-move being executed, 1-based.
    pub executing: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceSnapshot {
    pub id: usize,
    pub kind: PieceKind,
    pub color: Color,
    pub position: Point3,
    pub captured: bool,
}

/// Static geometry needed to draw the scene; sent with full snapshots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub arms: [ArmGeometry; 2],
    pub layout: BoardLayout,
}

/// State of the world after one tick (or after a command).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub tick: u64,
    pub sim_time: f64,
    pub phase: TurnPhase,
    pub mode: Mode,
    pub half_moves_done: usize,
    pub total_half_moves: usize,
    pub awaiting_step: bool,
    pub arms: [ArmSnapshot; 2],
    pub pieces: Vec<PieceSnapshot>,
    /// Set only on the tick a move finished.
    pub last_metrics: Option<MoveMetrics>,
    /// Every move that finished during this tick, oldest first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub completed: Vec<MoveMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<Scene>,
}

impl SimEvent {
    pub fn carries_metrics(&self) -> bool {
        !self.completed.is_empty()
    }
}

struct Execution {
    request: MoveRequest,
    action: usize,
    run: PickPlaceRun,
    segments: Vec<Segment>,
    duration: f64,
}

/// Deterministic simulation of one game, advanced in fixed ticks.
pub struct Simulation {
    config: SimConfig,
    scheduler: Scheduler,
    mode: Mode,
    poses: [JointAngles; 2],
    speeds: [SpeedFactor; 2],
    positions: Vec<Point3>,
    current: Option<Execution>,
    step_credit: bool,
    ticks: u64,
    last_durations: [Option<f64>; 2],
}

fn slot(arm: ArmId) -> usize {
    match arm {
        ArmId::Mr1 => 0,
        ArmId::Mr2 => 1,
    }
}

const ARMS: [ArmId; 2] = [ArmId::Mr1, ArmId::Mr2];

impl Simulation {
    /// Validates the configuration and checks that every pick and place
    /// point of the game is reachable by the arm that needs it.
    pub fn new(config: SimConfig, moves: &[DecodedMove]) -> Result<Self, EngineError> {
        config.validate()?;
        preflight(&config, moves)?;
        let scheduler = Scheduler::new(moves)?;
        let positions = scheduler
            .tabletop()
            .pieces()
            .iter()
            .map(|p| config.layout.point(p.location))
            .collect();
        Ok(Simulation {
            poses: [config.white.home, config.black.home],
            speeds: [config.speed(ArmId::Mr1), config.speed(ArmId::Mr2)],
            mode: config.mode,
            config,
            scheduler,
            positions,
            current: None,
            step_credit: false,
            ticks: 0,
            last_durations: [None; 2],
        })
    }

    pub fn from_script(config: SimConfig, script: &GameScript) -> Result<Self, EngineError> {
        let game = decode_game(script)?;
        Self::new(config, &game.moves)
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn scheduler(&self) -> &Scheduler {
        &self.scheduler
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    pub fn sim_time(&self) -> f64 {
        self.ticks as f64 * self.config.tick
    }

    pub fn speed(&self, arm: ArmId) -> SpeedFactor {
        self.speeds[slot(arm)]
    }

    pub fn pose(&self, arm: ArmId) -> JointAngles {
        self.poses[slot(arm)]
    }

    pub fn phase(&self) -> TurnPhase {
        self.scheduler.state().phase
    }

    pub fn is_finished(&self) -> bool {
        self.phase() == TurnPhase::Finished
    }

    fn to_move(&self) -> bool {
        matches!(
            self.phase(),
            TurnPhase::WhiteToMove | TurnPhase::BlackToMove
        )
    }

    pub fn awaiting_step(&self) -> bool {
        self.mode == Mode::StepByStep
            && self.current.is_none()
            && self.to_move()
            && !self.step_credit
    }

    /// True when a tick would do nothing until a command arrives.
    pub fn is_idle(&self) -> bool {
        matches!(self.phase(), TurnPhase::AwaitStart | TurnPhase::Finished) || self.awaiting_step()
    }

    pub fn control(&mut self, command: Command) -> Result<Ack, EngineError> {
        let invalid = |msg: String| Err(EngineError::InvalidCommand(msg));
        match command {
            Command::Start => {
                if self.phase() != TurnPhase::AwaitStart {
                    return invalid(format!("start: game already started ({:?})", self.phase()));
                }
                self.scheduler.start()?;
            }
            Command::StepOne => {
                if self.mode != Mode::StepByStep {
                    return invalid(format!("step_one: not in step mode ({})", self.mode));
                }
                if !self.awaiting_step() {
                    return invalid(format!(
                        "step_one: not waiting for a step ({:?})",
                        self.phase()
                    ));
                }
                self.step_credit = true;
            }
            Command::SetSpeed { arm, speed } => {
                let s = SpeedFactor::within(speed, self.config.speed_bounds)
                    .map_err(|e| EngineError::InvalidCommand(format!("set_speed: {e}")))?;
                self.speeds[slot(arm)] = s;
            }
            Command::SetMode { mode } => {
                if (mode == Mode::Virtual) != (self.mode == Mode::Virtual) {
                    return invalid("set_mode: virtual mode is fixed at launch".into());
                }
                self.mode = mode;
                if mode != Mode::StepByStep {
                    self.step_credit = false;
                }
            }
            Command::Abort => {
                if self.is_finished() {
                    return invalid("abort: game already finished".into());
                }
                self.scheduler.abort();
                self.current = None;
            }
        }
        Ok(Ack {
            command: command.name().into(),
            phase: self.phase(),
            sim_time: self.sim_time(),
        })
    }

    fn begin_action(
        &self,
        exec_request: &MoveRequest,
        action: usize,
    ) -> Result<PickPlaceRun, EngineError> {
        let arm = exec_request.arm;
        let cfg = self.config.arm(arm);
        let act = exec_request.plan.actions[action];
        let layout = &self.config.layout;
        let targets = PickPlaceTargets::solve(
            &cfg.geometry,
            layout.point(act.pick),
            layout.point(act.place),
            cfg.home,
        )
        .map_err(|source| EngineError::Unreachable {
            half_move: exec_request.half_move,
            arm,
            point: act.pick,
            source,
        })?;
        Ok(PickPlaceRun::new(
            self.poses[slot(arm)],
            targets,
            self.config.dwell,
        ))
    }

    /// Advances simulated time by one tick and returns the moves that
    /// finished during it. Does nothing while idle.
    pub fn tick(&mut self) -> Result<Vec<MoveMetrics>, EngineError> {
        let mut completed = Vec::new();
        if self.is_idle() {
            return Ok(completed);
        }
        let mut budget = self.config.tick;
        loop {
            if self.current.is_none() {
                if !self.to_move() || (self.mode == Mode::StepByStep && !self.step_credit) {
                    break;
                }
                let Some(request) = self.scheduler.next_turn()? else {
                    break;
                };
                self.step_credit = false;
                let run = self.begin_action(&request, 0)?;
                self.current = Some(Execution {
                    request,
                    action: 0,
                    run,
                    segments: Vec::new(),
                    duration: 0.0,
                });
            }
            let exec = self.current.as_mut().expect("execution present");
            let arm = exec.request.arm;
            let geom = &self.config.arm(arm).geometry;
            budget = exec.run.advance(budget, geom, self.speeds[slot(arm)]);
            self.poses[slot(arm)] = exec.run.pose();
            let piece = exec.request.plan.actions[exec.action].piece_id;
            self.positions[piece] = exec.run.piece_position(geom);
            if !exec.run.is_finished() {
                break;
            }
            exec.segments.extend_from_slice(exec.run.segments());
            exec.duration += exec.run.duration();
            if exec.action + 1 < exec.request.plan.actions.len() {
                exec.action += 1;
                let (request, action) = (exec.request.clone(), exec.action);
                let run = self.begin_action(&request, action)?;
                self.current.as_mut().expect("execution present").run = run;
                continue;
            }
            let exec = self.current.take().expect("execution present");
            let metrics = MoveMetrics {
                half_move: exec.request.half_move,
                arm,
                move_index: (exec.request.half_move - 1) / 2,
                duration: exec.duration,
                path_length: path_length(geom, &exec.segments, self.config.metrics_dt),
            };
            self.scheduler.on_move_complete(metrics)?;
            self.last_durations[slot(arm)] = Some(metrics.duration);
            let layout = &self.config.layout;
            for p in self.scheduler.tabletop().pieces() {
                self.positions[p.id] = layout.point(p.location);
            }
            completed.push(metrics);
            if budget <= 0.0 {
                break;
            }
        }
        self.ticks += 1;
        Ok(completed)
    }

    /// World state, tagged with the moves completed on this tick.
    pub fn event(&self, completed: Vec<MoveMetrics>) -> SimEvent {
        let executing = self
            .current
            .as_ref()
            .map(|e| (e.request.arm, e.request.half_move));
        let arms = ARMS.map(|arm| {
            let geom = &self.config.arm(arm).geometry;
            let q = self.poses[slot(arm)];
            let mine = executing.filter(|(a, _)| *a == arm);
            let run = self
                .current
                .as_ref()
                .filter(|_| mine.is_some())
                .map(|e| &e.run);
            ArmSnapshot {
                arm,
                joints: q,
                gripper: forward_kinematics(geom, &q),
                motion: run.and_then(|r| r.phase()),
                holding: run.is_some_and(|r| r.is_holding()),
                speed: self.speeds[slot(arm)].get(),
                last_move_time: self.last_durations[slot(arm)],
                executing: mine.map(|(_, h)| h),
            }
        });
        let pieces = self
            .scheduler
            .tabletop()
            .pieces()
            .iter()
            .map(|p| PieceSnapshot {
                id: p.id,
                kind: p.kind,
                color: p.color,
                position: self.positions[p.id],
                captured: matches!(p.location, crate::kinematics::WorkPoint::Discard { .. }),
            })
            .collect();
        SimEvent {
            tick: self.ticks,
            sim_time: self.sim_time(),
            phase: self.phase(),
            mode: self.mode,
            half_moves_done: self.scheduler.recorder().moves().len(),
            total_half_moves: self.scheduler.streams().total(),
            awaiting_step: self.awaiting_step(),
            arms,
            pieces,
            last_metrics: completed.last().copied(),
            completed,
            scene: None,
        }
    }

    /// Full state including the static scene, for new observers.
    pub fn snapshot(&self) -> SimEvent {
        let mut ev = self.event(Vec::new());
        ev.scene = Some(self.scene());
        ev
    }

    pub fn scene(&self) -> Scene {
        Scene {
            arms: [
                self.config.white.geometry.clone(),
                self.config.black.geometry.clone(),
            ],
            layout: self.config.layout.clone(),
        }
    }

    /// Report over the moves completed so far.
    pub fn report(&self) -> Result<GameReport, EngineError> {
        Ok(self.scheduler.recorder().finalize()?)
    }

    /// Plays the game to the end without an operator: starts it if needed
    /// and releases each step. Events are passed to `on_event` unless the
    /// mode is virtual.
    pub fn run_to_end(
        &mut self,
        mut on_event: impl FnMut(SimEvent),
    ) -> Result<GameReport, EngineError> {
        if self.phase() == TurnPhase::AwaitStart {
            self.control(Command::Start)?;
        }
        let emit = self.mode != Mode::Virtual;
        while !self.is_finished() {
            if self.awaiting_step() {
                self.control(Command::StepOne)?;
            }
            let completed = self.tick()?;
            if emit {
                on_event(self.event(completed));
            }
        }
        self.report()
    }
}

fn preflight(config: &SimConfig, moves: &[DecodedMove]) -> Result<(), EngineError> {
    let mut table = Tabletop::initial();
    for (i, mv) in moves.iter().enumerate() {
        let arm = ArmId::for_color(mv.color);
        let cfg = config.arm(arm);
        let plan = table.plan_actions(mv)?;
        for act in &plan.actions {
            for (what, point) in [("pick", act.pick), ("place", act.place)] {
                crate::kinematics::inverse_kinematics(&cfg.geometry, config.layout.point(point))
                    .map_err(|source| EngineError::Unreachable {
                        half_move: i + 1,
                        arm,
                        point,
                        source: crate::motion::MotionError::Unreachable { what, source },
                    })?;
            }
        }
        table.apply_plan(&plan)?;
    }
    Ok(())
}

/// Decodes and plays a whole game, returning its report.
pub fn run(config: &SimConfig, script: &GameScript) -> Result<GameReport, EngineError> {
    run_with_events(config, script, |_| {})
}

pub fn run_with_events(
    config: &SimConfig,
    script: &GameScript,
    on_event: impl FnMut(SimEvent),
) -> Result<GameReport, EngineError> {
    Simulation::from_script(config.clone(), script)?.run_to_end(on_event)
}
