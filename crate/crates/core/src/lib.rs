//! Classical capacities of qubit channels given in Bloch affine form.
//!
//! A channel acts on Bloch vectors as `w ↦ t + Λw` with diagonal `Λ`. The
//! crate evaluates the Holevo χ quantity, maximizes it over restricted and
//! unrestricted input ensembles, verifies optima through the relative-entropy
//! (divergence radius) characterization, and computes the single-letter
//! Shannon capacity under product measurements for comparison.
//!
//! ```
//! use qubit_capacity::{optimize_vertical, QubitChannel};
//!
//! let ch = QubitChannel::shifted_depolarizing(0.5).unwrap();
//! let r = optimize_vertical(&ch);
//! assert!((r.value - 0.32193).abs() < 5e-5);
//! ```

pub mod bloch;
pub mod capacity;
pub mod channel;
pub mod choi;
pub mod ensemble;
pub mod error;
pub mod optimize;
pub mod shannon;

pub use bloch::{binary_entropy, entropy, relative_entropy, BlochVector};
pub use capacity::{
    chi, divergence_radius_check, equidistance_check, find_crossing, optimize_global,
    optimize_horizontal, optimize_n_state, optimize_vertical, symmetric_triple_solve,
    CapacityResult, Crossing, GlobalCapacity, ParamFamily, SearchConfig, StateSpace,
};
pub use channel::{ChannelSpec, Family, QubitChannel, SqueezedShift, CP_TOL};
pub use choi::ChoiMatrix;
pub use ensemble::{average_ensembles, Ensemble, Member};
pub use error::{Error, Result};
pub use shannon::{
    accessible_information, optimize_shannon, optimize_shannon_with, Povm, PovmElement,
    ShannonMode, ShannonResult,
};
