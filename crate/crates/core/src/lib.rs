//! Safety envelope, runtime monitoring and verification for a single-lane
//! car-following controller.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`] and [`envelope`]: constants, car states, stopping distances and
//!   the `safe_back` / `safe_front` acceptance conditions with their invariants.
//! * [`plant`]: acceleration saturation, exact and Euler kinematics, collisions.
//! * [`policy`]: fallback controller, envelope guard, IDM and other
//!   environment drivers, the reference-velocity action controller.
//! * [`nn`]: feed-forward policy networks, observations and action selection.
//! * [`shield`]: per-action controller monitor, model monitor, VeriPhy-style
//!   sandbox and JSC shield.
//! * [`verify`]: interval branch-and-bound verification of policy networks.
//! * [`sim`]: closed-loop episodes, sampling, campaigns, falsification and the
//!   Euler-crash search. [`config`] reads the flat scenario files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod envelope;
pub mod error;
pub mod interval;
pub mod model;
pub mod nn;
pub mod plant;
pub mod policy;
pub mod shield;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use model::{CarState, Constants, DuoState};
pub use nn::{Action, ActionScores, Mlp, ObsVector};
