//! Drives the engine one half-move at a time, changing Black's speed midway
//! and watching the events the engine emits.

use robochess::engine::{Command, Mode, SimConfig, Simulation};
use robochess::motion::ArmId;
use robochess::notation::parse_game_text;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SimConfig {
        mode: Mode::StepByStep,
        ..SimConfig::default()
    };
    let script = parse_game_text("1. e4 e5 2. Qh5 Nc6 3. Bc4 Nf6 4. Qxf7#")?;
    let mut sim = Simulation::from_script(cfg, &script)?;

    let ack = sim.control(Command::Start)?;
    println!("{} -> {:?}", ack.command, ack.phase);
    let mut step = 0;
    while !sim.is_finished() {
        if sim.awaiting_step() {
            step += 1;
            if step == 4 {
                let ack = sim.control(Command::SetSpeed {
                    arm: ArmId::Mr2,
                    speed: 2.0,
                })?;
                println!("{} at t={:.2}", ack.command, ack.sim_time);
            }
            sim.control(Command::StepOne)?;
        }
        let completed = sim.tick()?;
        for m in &completed {
            let event = sim.event(completed.clone());
            println!(
                "t={:6.2} half-move {} by {} took {:.3} s, path {:.3} m; phase now {:?}",
                event.sim_time, m.half_move, m.arm, m.duration, m.path_length, event.phase
            );
        }
    }
    print!("{}", sim.report()?.summary());
    Ok(())
}
