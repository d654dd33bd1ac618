//! One pick-and-place cycle for the White arm, e2 to e4, sampled every
//! 50 ms.

use robochess::engine::default_home;
use robochess::kinematics::{square_center, ArmGeometry, BoardLayout};
use robochess::motion::{execute_pickplace, PickPlaceTargets, SpeedFactor, DEFAULT_DWELL};
use robochess::notation::Color;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = BoardLayout::default();
    let geom = ArmGeometry::default_for(Color::White);
    let home = default_home(&geom, &layout);
    let pick = square_center(&layout, "e2".parse()?);
    let place = square_center(&layout, "e4".parse()?);
    let targets = PickPlaceTargets::solve(&geom, pick, place, home)?;

    for speed in [1.0, 2.0] {
        let mut pose = home;
        let (outcome, trace) = execute_pickplace(
            &mut pose,
            targets,
            &geom,
            SpeedFactor::new(speed)?,
            DEFAULT_DWELL,
            0.05,
        );
        println!(
            "speed {speed}: {:.3} s, gripper path {:.3} m",
            outcome.duration, outcome.path_length
        );
        if speed == 1.0 {
            for s in trace {
                println!(
                    "  t={:6.3} {:<9} gripper ({:.3}, {:.3}, {:.3}) {}",
                    s.time,
                    format!("{:?}", s.phase),
                    s.gripper.x,
                    s.gripper.y,
                    s.gripper.z,
                    if s.holding { "holding" } else { "" }
                );
            }
        }
    }
    Ok(())
}
