//! Finite categories, weak equivalences, and transfer of universal
//! structure along them.

pub mod classifier;
pub mod completion;
pub mod exponentials;
pub mod fincat;
pub mod format;
pub mod functor;
pub mod generators;
pub mod lifting;
pub mod limits;
pub mod nno;
pub mod structure;

pub use completion::{skeletize, CompletionResult, Fidelity};
pub use fincat::{FinCat, Iso, MorId, ObjId};
pub use functor::{Functor, NatIso, WeakEquivalenceCert};
pub use lifting::{complete_structured, factor_structured, Kind, PreservationCerts, Structures};
