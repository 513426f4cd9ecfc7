//! Finite effect algebras and the machinery around them: Riesz
//! decomposition, sharp elements, MV structure, exact state polytopes, the
//! canonical representation by fuzzy functions, smearing of observables,
//! spectral measures and extension of states from the sharp part.
//!
//! All arithmetic is exact (`num_rational::BigRational`). Exhaustive searches
//! run on rayon when the `parallel` feature is on (the default) and always
//! return the same first witness as a sequential run.

pub mod algebra;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod mv;
pub mod observables;
pub mod par;
pub mod polytope;
pub mod rational;
pub mod rdp;
pub mod representation;
pub mod sharp;
pub mod spectral;
pub mod states;
pub mod suite;
pub mod zoo;

use serde::Serialize;

pub use algebra::{validate_effect_algebra, AlgebraError, EffectAlgebra, Elem, RawTable};
pub use error::{Error, FormatError};
pub use par::Exec;
pub use rational::Q;
pub use zoo::{generate, Family};

/// Outcome of a property check: either it holds, or here is why not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}
