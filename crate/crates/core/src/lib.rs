pub mod engine;
pub mod kinematics;
pub mod metrics;
pub mod motion;
pub mod notation;
pub mod scheduler;
pub mod server;
