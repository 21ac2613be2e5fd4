//! Domains, synthetic objective classes, reward noise and environment schedules.

mod conditions;
mod domain;
mod environment;
mod noise;
mod objective;

pub use conditions::{verify_conditions, Condition, ConditionCheck, ConditionReport};
pub use domain::{Domain, Point};
pub use environment::EnvironmentSchedule;
pub use noise::{NoiseKind, NoiseModel};
pub use objective::{ClassConstants, ObjectiveKind, ObjectiveSpec};
