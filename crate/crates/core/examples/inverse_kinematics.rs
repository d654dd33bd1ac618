//! Solves the default arms for every square of the board and prints a
//! reach map, then round-trips one target through forward kinematics.

use robochess::kinematics::{
    forward_kinematics, inverse_kinematics, square_center, ArmGeometry, BoardLayout,
};
use robochess::notation::{Color, Square};

fn main() {
    let layout = BoardLayout::default();
    for color in [Color::White, Color::Black] {
        let geom = ArmGeometry::default_for(color);
        println!(
            "{color} arm at {:?}, heading {:.3} rad",
            geom.base, geom.heading
        );
        for rank in (0..8).rev() {
            let row: String = (0..8)
                .map(|file| {
                    let sq = Square::new(file, rank).unwrap();
                    match inverse_kinematics(&geom, square_center(&layout, sq)) {
                        Ok(_) => '#',
                        Err(_) => '.',
                    }
                })
                .collect();
            println!("  {} {row}", rank + 1);
        }
        println!("    abcdefgh\n");
    }

    let geom = ArmGeometry::default_for(Color::White);
    let target = square_center(&layout, "e4".parse().unwrap());
    let q = inverse_kinematics(&geom, target).expect("e4 is reachable");
    let back = forward_kinematics(&geom, &q);
    println!("e4 target {target:?}");
    println!(
        "joints yaw {:.4} shoulder {:.4} elbow {:.4}",
        q.yaw, q.shoulder, q.elbow
    );
    println!("round trip error {:.2e} m", back.distance(target));
}
