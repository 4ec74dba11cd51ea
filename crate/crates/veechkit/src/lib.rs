//! Combinatorics and dynamics of interval exchange transformations:
//! Rauzy classes and their diagrams, the induction cocycle with exact
//! arbitrary-precision arithmetic, zippered rectangles and the renormalization
//! flow, exact path-cylinder measures, and a small numerical laboratory for
//! expanding Markov maps, transfer operators and suspension semiflows.
//!
//! Start with [`perm::Permutation`] and [`diagram::RauzyClass`]; the runnable
//! examples under `examples/` walk through every major capability.

pub mod alphabet;
pub mod cli;
pub mod cocycle;
pub mod cone;
pub mod decorated;
pub mod diagram;
pub mod error;
pub mod iet;
pub mod markov;
pub mod measure;
pub mod montecarlo;
pub mod numeric;
pub mod omega;
pub mod path;
pub mod perm;
pub mod positivity;
pub mod report;
pub mod section;
pub mod transfer;
pub mod zippered;

pub use alphabet::{Alphabet, Letter};
pub use cocycle::CocycleMatrix;
pub use cone::ConeSpec;
pub use diagram::RauzyClass;
pub use error::{Error, Result};
pub use path::Path;
pub use perm::{Arrow, Kind, Permutation};
