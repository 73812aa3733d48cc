//! Codes correcting one deletion together with substitutions: error balls,
//! counting bounds, constructions, exhaustive verification and decoding.

pub mod ball;
pub mod binary;
pub mod bounds;
pub mod channel;
pub mod congruent;
pub mod error;
pub mod lab;
pub mod qary;
pub mod rational;
pub mod space;
pub mod word;

pub use ball::{BallSpec, ErrorPattern};
pub use error::{Error, Result};
pub use rational::Rational;
pub use space::Budget;
pub use word::Word;

/// Version tag carried by every JSON document the CLI emits.
pub const SCHEMA: &str = "delsub/1";
