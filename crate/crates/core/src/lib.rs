//! Offline gait recovery for hexapod robots that have lost legs.
//!
//! A damaged robot is described by a [`MorphologyVector`]. The pipeline
//! plans a statically stable swing order for the surviving legs
//! ([`plan_sequence`]), parameterises their tip loops ([`GaitParams`]),
//! walks them in a quasi-static simulator ([`simulate`]) and searches the
//! parameters with differential evolution ([`de::run`]) to maximise
//! straight forward progress.
//!
//! ```
//! use hexapod_recovery::{plan_sequence, MorphologyVector};
//!
//! let m: MorphologyVector = "111011".parse().unwrap();
//! let s = plan_sequence(&m, 2.0).unwrap();
//! assert_eq!(s.sigma(), 3);
//! ```

pub mod artifacts;
pub mod cli;
pub mod de;
mod error;
pub mod gait;
pub mod kinematics;
pub mod morphology;
pub mod objective;
pub mod scenario;
pub mod sim;
pub mod trajectory;

pub use de::{DeConfig, RecoveryResult};
pub use error::{Error, Result};
pub use gait::{check_neighborhood_rule, plan_sequence, GaitKind, GaitSchedule};
pub use kinematics::{forward_kinematics, inverse_kinematics, JointAngles};
pub use morphology::{validate_morphology, DamageClass, MorphologyVector, RobotGeometry};
pub use objective::{evaluate, extract_metrics, Metrics, ObjectiveWeights, RecoveryProblem};
pub use scenario::Scenario;
pub use sim::{simulate, BodyPose, BodyTrajectory, SimConfig};
pub use trajectory::{GaitParams, ParamBounds};
