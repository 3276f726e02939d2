//! Finite commutative rings, finitely generated modules over them, and
//! decision procedures for strongly Gorenstein projective, injective and flat
//! modules.

pub mod caps;
pub mod certificate;
pub mod complex;
pub mod extension;
pub mod error;
pub mod functor;
pub mod gorenstein;
pub mod groebner;
pub mod homological;
pub mod linalg;
pub mod module;
pub mod properties;
pub mod verify;
pub mod ring;

pub use caps::Caps;
pub use certificate::{Certificate, Disproof, Status, Witness};
pub use error::{Error, Result};
pub use linalg::{Howell, ResidueMatrix};
pub use ring::{FiniteRing, RingData};
pub use module::{FiniteModule, ModuleData, ModuleMap, RingMatrix};
