//! Geometry of a three-joint arm (base yaw, shoulder, elbow) and the board
//! it works over.
//!
//! Angles follow one convention throughout: yaw is measured about the
//! vertical axis relative to the base heading, shoulder is the elevation of
//! the first link above horizontal, and elbow is the relative angle of the
//! second link (negative bends the forearm down, "elbow up").

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::notation::{Color, Square};

/// Slack used when comparing against reach and joint limits.
const EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, k: f64) -> Point3 {
        Point3::new(self.x * k, self.y * k, self.z * k)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct JointAngles {
    pub yaw: f64,
    pub shoulder: f64,
    pub elbow: f64,
}

impl JointAngles {
    pub const fn new(yaw: f64, shoulder: f64, elbow: f64) -> Self {
        JointAngles {
            yaw,
            shoulder,
            elbow,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.yaw, self.shoulder, self.elbow]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        JointAngles::new(a[0], a[1], a[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointRange {
    pub min: f64,
    pub max: f64,
}

impl JointRange {
    pub const fn new(min: f64, max: f64) -> Self {
        JointRange { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min - EPS && v <= self.max + EPS
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmGeometry {
    pub base: Point3,
    /// World direction (radians about +z, from +x) that yaw = 0 points to.
    pub heading: f64,
    pub mount_height: f64,
    /// Upper arm then forearm, meters.
    pub link_lengths: [f64; 2],
    /// Maximum rate of yaw, shoulder, elbow in rad/s.
    pub joint_speed: [f64; 3],
    pub joint_limits: [JointRange; 3],
}

pub const DEFAULT_LINK_LENGTH: f64 = 0.35;
pub const DEFAULT_MOUNT_HEIGHT: f64 = 0.10;
pub const DEFAULT_JOINT_SPEED: f64 = PI / 2.0;
pub const DEFAULT_LIMITS: [JointRange; 3] = [
    JointRange::new(-PI, PI),
    JointRange::new(0.0, PI),
    JointRange::new(-PI, 0.0),
];

impl ArmGeometry {
    /// Default arm standing at `base`, facing `toward`.
    pub fn facing(base: Point3, toward: Point3) -> Self {
        ArmGeometry {
            base,
            heading: (toward.y - base.y).atan2(toward.x - base.x),
            mount_height: DEFAULT_MOUNT_HEIGHT,
            link_lengths: [DEFAULT_LINK_LENGTH; 2],
            joint_speed: [DEFAULT_JOINT_SPEED; 3],
            joint_limits: DEFAULT_LIMITS,
        }
    }

    /// Default arm for `color` next to the default board.
    pub fn default_for(color: Color) -> Self {
        let layout = BoardLayout::default();
        let base = match color {
            Color::White => Point3::new(0.60, 0.175, 0.0),
            Color::Black => Point3::new(-0.25, 0.175, 0.0),
        };
        Self::facing(base, layout.center())
    }

    pub fn shoulder(&self) -> Point3 {
        self.base + Point3::new(0.0, 0.0, self.mount_height)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !self.base.is_finite() || !self.heading.is_finite() || !self.mount_height.is_finite() {
            errs.push("base position, heading and mount height must be finite".to_string());
        }
        for (name, l) in ["l1", "l2"].iter().zip(self.link_lengths) {
            if !(l > 0.0 && l.is_finite()) {
                errs.push(format!("{name} must be > 0 (got {l})"));
            }
        }
        for (name, w) in JOINT_NAMES.iter().zip(self.joint_speed) {
            if !(w > 0.0 && w.is_finite()) {
                errs.push(format!("joint speed {name} must be > 0 (got {w})"));
            }
        }
        for (name, r) in JOINT_NAMES.iter().zip(self.joint_limits) {
            if r.min.partial_cmp(&r.max) != Some(std::cmp::Ordering::Less) {
                errs.push(format!(
                    "limits for {name}: min {} must be < max {}",
                    r.min, r.max
                ));
            }
        }
        errs
    }

    pub fn within_limits(&self, q: &JointAngles) -> bool {
        self.joint_limits
            .iter()
            .zip(q.as_array())
            .all(|(r, v)| r.contains(v))
    }
}

pub const JOINT_NAMES: [&str; 3] = ["yaw", "shoulder", "elbow"];

#[derive(Clone, Debug, PartialEq, Error)]
pub enum KinematicsError {
    #[error("target ({x:.4}, {y:.4}, {z:.4}) is out of reach")]
    Unreachable { x: f64, y: f64, z: f64 },
    #[error("{joint} angle {value:.6} outside [{min:.6}, {max:.6}]")]
    LimitViolation {
        joint: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("target lies on the yaw axis")]
    Singular,
    #[error("target is not finite")]
    NonFinite,
}

pub fn forward_kinematics(geom: &ArmGeometry, q: &JointAngles) -> Point3 {
    let [l1, l2] = geom.link_lengths;
    let radial = l1 * q.shoulder.cos() + l2 * (q.shoulder + q.elbow).cos();
    let height = l1 * q.shoulder.sin() + l2 * (q.shoulder + q.elbow).sin();
    let world_yaw = geom.heading + q.yaw;
    geom.shoulder() + Point3::new(radial * world_yaw.cos(), radial * world_yaw.sin(), height)
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Analytic solution, elbow-up branch.
pub fn inverse_kinematics(
    geom: &ArmGeometry,
    target: Point3,
) -> Result<JointAngles, KinematicsError> {
    if !target.is_finite() {
        return Err(KinematicsError::NonFinite);
    }
    let [l1, l2] = geom.link_lengths;
    let d = target - geom.shoulder();
    let radial = d.x.hypot(d.y);
    let reach = radial.hypot(d.z);
    if reach > l1 + l2 + EPS || reach < (l1 - l2).abs() - EPS {
        return Err(KinematicsError::Unreachable {
            x: target.x,
            y: target.y,
            z: target.z,
        });
    }
    if radial < EPS {
        return Err(KinematicsError::Singular);
    }

    let yaw = wrap_angle(d.y.atan2(d.x) - geom.heading);
    let cos_elbow = ((reach * reach - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)).clamp(-1.0, 1.0);
    let mut elbow = -cos_elbow.acos();
    if elbow == 0.0 {
        elbow = 0.0; // no negative zero
    }
    let shoulder = d.z.atan2(radial) + (l2 * (-elbow).sin()).atan2(l1 + l2 * elbow.cos());

    let q = JointAngles::new(yaw, shoulder, elbow);
    for ((joint, r), value) in JOINT_NAMES.iter().zip(geom.joint_limits).zip(q.as_array()) {
        if !r.contains(value) {
            return Err(KinematicsError::LimitViolation {
                joint,
                value,
                min: r.min,
                max: r.max,
            });
        }
    }
    Ok(q)
}

pub fn reachable(geom: &ArmGeometry, target: Point3) -> bool {
    inverse_kinematics(geom, target).is_ok()
}

/// Where on the table a piece can be picked or placed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkPoint {
    Square(Square),
    Discard { zone: Color, slot: usize },
}

impl std::fmt::Display for WorkPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WorkPoint::Square(sq) => write!(f, "{sq}"),
            WorkPoint::Discard { zone, slot } => write!(f, "{zone:?} discard slot {slot}"),
        }
    }
}

pub const DISCARD_SLOTS: usize = 16;
const DISCARD_ROW: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoardLayout {
    /// Center of a1, at table height.
    pub origin: Point3,
    pub square_size: f64,
    /// Height above the table where the gripper grasps a piece.
    pub grip_height: f64,
    /// Slots beyond White's edge (below rank 1), filled in capture order.
    pub white_discard: Vec<Point3>,
    /// Slots beyond Black's edge (above rank 8).
    pub black_discard: Vec<Point3>,
}

impl Default for BoardLayout {
    fn default() -> Self {
        BoardLayout::new(Point3::new(0.0, 0.0, 0.0), 0.05, 0.04)
    }
}

impl BoardLayout {
    /// Builds a layout with two rows of eight discard slots past each
    /// player's edge, half a square clear of the board.
    pub fn new(origin: Point3, square_size: f64, grip_height: f64) -> Self {
        let zone = |first_row: f64, step: f64| -> Vec<Point3> {
            (0..DISCARD_SLOTS)
                .map(|i| {
                    let row = (i / DISCARD_ROW) as f64;
                    let col = (i % DISCARD_ROW) as f64;
                    origin
                        + Point3::new(
                            col * square_size,
                            (first_row + step * row) * square_size,
                            grip_height,
                        )
                })
                .collect()
        };
        BoardLayout {
            origin,
            square_size,
            grip_height,
            white_discard: zone(-1.5, -1.0),
            black_discard: zone(8.5, 1.0),
        }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !(self.square_size > 0.0 && self.square_size.is_finite()) {
            errs.push(format!(
                "square_size must be > 0 (got {})",
                self.square_size
            ));
        }
        if !(self.grip_height >= 0.0 && self.grip_height.is_finite()) {
            errs.push(format!(
                "grip_height must be >= 0 (got {})",
                self.grip_height
            ));
        }
        if !self.origin.is_finite() {
            errs.push("board origin must be finite".into());
        }
        for (name, zone) in [
            ("white", &self.white_discard),
            ("black", &self.black_discard),
        ] {
            if zone.len() < 15 {
                errs.push(format!("{name} discard zone needs at least 15 slots"));
            }
        }
        errs
    }

    /// Middle of the board at grip height.
    pub fn center(&self) -> Point3 {
        let half = 3.5 * self.square_size;
        self.origin + Point3::new(half, half, self.grip_height)
    }

    pub fn discard_zone(&self, zone: Color) -> &[Point3] {
        match zone {
            Color::White => &self.white_discard,
            Color::Black => &self.black_discard,
        }
    }

    pub fn point(&self, wp: WorkPoint) -> Point3 {
        match wp {
            WorkPoint::Square(sq) => square_center(self, sq),
            WorkPoint::Discard { zone, slot } => self.discard_zone(zone)[slot],
        }
    }
}

pub fn square_center(layout: &BoardLayout, sq: Square) -> Point3 {
    layout.origin
        + Point3::new(
            sq.file() as f64 * layout.square_size,
            sq.rank() as f64 * layout.square_size,
            layout.grip_height,
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn test_arm() -> ArmGeometry {
        ArmGeometry {
            base: Point3::default(),
            heading: 0.0,
            mount_height: 0.1,
            link_lengths: [0.3, 0.3],
            joint_speed: [1.0; 3],
            joint_limits: DEFAULT_LIMITS,
        }
    }

    fn close(a: Point3, b: Point3) -> bool {
        a.distance(b) < 1e-12
    }

    #[test]
    fn square_centers() {
        let layout = BoardLayout::new(Point3::default(), 0.05, 0.04);
        let at = |s: &str| square_center(&layout, s.parse().unwrap());
        assert!(close(at("a1"), Point3::new(0.0, 0.0, 0.04)));
        assert!(close(at("h8"), Point3::new(0.35, 0.35, 0.04)));
        assert!(close(at("e4"), Point3::new(0.20, 0.15, 0.04)));
    }

    #[test]
    fn forward_examples() {
        let g = test_arm();
        assert!(close(
            forward_kinematics(&g, &JointAngles::new(0.0, 0.0, 0.0)),
            Point3::new(0.6, 0.0, 0.1)
        ));
        assert!(close(
            forward_kinematics(&g, &JointAngles::new(FRAC_PI_2, 0.0, 0.0)),
            Point3::new(0.0, 0.6, 0.1)
        ));
        assert!(close(
            forward_kinematics(&g, &JointAngles::new(0.0, FRAC_PI_2, -FRAC_PI_2)),
            Point3::new(0.3, 0.0, 0.4)
        ));
    }

    #[test]
    fn full_extension_is_reachable_and_zero() {
        let g = test_arm();
        let q = inverse_kinematics(&g, Point3::new(0.6, 0.0, 0.1)).unwrap();
        assert_eq!(q, JointAngles::new(0.0, 0.0, 0.0));
        assert!(q.elbow.is_sign_positive());
        assert!(reachable(&g, Point3::new(0.6, 0.0, 0.1)));
    }

    #[test]
    fn beyond_reach() {
        let g = test_arm();
        assert!(matches!(
            inverse_kinematics(&g, Point3::new(0.7, 0.0, 0.1)),
            Err(KinematicsError::Unreachable { .. })
        ));
        assert!(!reachable(&g, Point3::new(0.7, 0.0, 0.1)));
    }

    #[test]
    fn inside_inner_radius() {
        let mut g = test_arm();
        g.link_lengths = [0.4, 0.2];
        assert!(matches!(
            inverse_kinematics(&g, Point3::new(0.1, 0.0, 0.1)),
            Err(KinematicsError::Unreachable { .. })
        ));
    }

    #[test]
    fn on_yaw_axis_is_singular() {
        let g = test_arm();
        assert_eq!(
            inverse_kinematics(&g, Point3::new(0.0, 0.0, 0.5)),
            Err(KinematicsError::Singular)
        );
    }

    #[test]
    fn limit_violation_below_shoulder_at_full_stretch() {
        // Straight out and slightly down needs a negative shoulder angle.
        let g = test_arm();
        let target = Point3::new(0.59, 0.0, 0.0);
        assert!(matches!(
            inverse_kinematics(&g, target),
            Err(KinematicsError::LimitViolation {
                joint: "shoulder",
                ..
            })
        ));
    }

    #[test]
    fn heading_offsets_yaw() {
        let mut g = test_arm();
        g.heading = PI;
        let q = inverse_kinematics(&g, Point3::new(-0.4, 0.1, 0.1)).unwrap();
        assert!(q.yaw.abs() < 0.5);
        assert!(close(
            forward_kinematics(&g, &q),
            Point3::new(-0.4, 0.1, 0.1)
        ));
    }

    #[test]
    fn default_board_reachable_by_both_arms() {
        let layout = BoardLayout::default();
        for color in [Color::White, Color::Black] {
            let g = ArmGeometry::default_for(color);
            for sq in Square::all() {
                assert!(reachable(&g, square_center(&layout, sq)), "{color} {sq}");
            }
            for &p in layout.discard_zone(color) {
                assert!(reachable(&g, p), "{color} discard {p:?}");
            }
        }
    }

    #[test]
    fn discard_slots_beyond_edges() {
        let layout = BoardLayout::default();
        assert_eq!(layout.white_discard.len(), 16);
        assert!(layout.white_discard.iter().all(|p| p.y < -0.025));
        assert!(layout.black_discard.iter().all(|p| p.y > 0.375));
    }

    #[test]
    fn wrap() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn geometry_validation() {
        let mut g = test_arm();
        g.link_lengths[0] = 0.0;
        g.joint_speed[2] = -1.0;
        g.joint_limits[1] = JointRange::new(1.0, 1.0);
        assert_eq!(g.validate().len(), 3);
    }
}
