//! Three-valued verdicts with self-contained witnesses and disproofs.
//!
//! Every witness carries the ring and module data it refers to, so it can be
//! re-verified from its serialized form alone (see [`crate::verify`]).

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::ResidueMatrix;
use crate::module::ModuleData;
use crate::ring::RingData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub status: Status,
    pub witness: Option<Witness>,
    pub disproof: Option<Disproof>,
    /// The cap that stopped the computation, for `Unknown`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<String>,
}

impl Certificate {
    pub fn yes(witness: Witness) -> Self {
        Self { status: Status::Yes, witness: Some(witness), disproof: None, cap: None }
    }

    /// `Yes` for checks whose evidence is the checked object itself.
    pub fn yes_plain() -> Self {
        Self { status: Status::Yes, witness: None, disproof: None, cap: None }
    }

    pub fn no(disproof: Disproof) -> Self {
        Self { status: Status::No, witness: None, disproof: Some(disproof), cap: None }
    }

    pub fn unknown(cap: impl Into<String>) -> Self {
        Self { status: Status::Unknown, witness: None, disproof: None, cap: Some(cap.into()) }
    }

    /// Turns a cap error into `Unknown`; other errors pass through.
    pub fn from_cap(err: Error) -> Result<Self, Error> {
        match err {
            Error::CapExceeded { what, needed, cap } => {
                Ok(Self::unknown(format!("{what}: needs {needed}, cap {cap}")))
            }
            other => Err(other),
        }
    }

    pub fn is_yes(&self) -> bool {
        self.status == Status::Yes
    }

    pub fn is_no(&self) -> bool {
        self.status == Status::No
    }

    pub fn is_unknown(&self) -> bool {
        self.status == Status::Unknown
    }
}

/// A period-`p` complex `d_i: P_i → P_{i-1 mod p}` in serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexData {
    pub terms: Vec<ModuleData>,
    pub differentials: Vec<ResidueMatrix>,
}

/// `0 → M → P → M → 0` with evidence about `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgWitness {
    pub ring: RingData,
    pub module: ModuleData,
    pub flavor: Flavor,
    pub middle: ModuleData,
    /// `M → P`
    pub inclusion: ResidueMatrix,
    /// `P → M`
    pub projection: ResidueMatrix,
    /// Projectivity (or flatness) of the middle term.
    pub middle_witness: Box<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Projective,
    Flat,
}

/// A complete projective resolution of period `p` with `M ≅ Im(d_0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GWitness {
    pub ring: RingData,
    pub module: ModuleData,
    pub complex: ComplexData,
    /// Injective map `M → P_{p-1}` with image `Im(d_0)`.
    pub embedding: ResidueMatrix,
}

/// `M` as a direct summand of an SG-projective module `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandWitness {
    pub ring: RingData,
    pub module: ModuleData,
    pub summand_of: ModuleData,
    pub sg: SgWitness,
    pub injection: ResidueMatrix,
    pub retraction: ResidueMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `s: M → R^t` with `Π ∘ s = id` for the cover `Π: R^t → M`.
    Section {
        ring: RingData,
        module: ModuleData,
        cover: ResidueMatrix,
        section: ResidueMatrix,
    },
    /// `Tor_1(M, R/J) = 0`, rechecked by recomputation.
    TorFlat { ring: RingData, module: ModuleData },
    /// `|M| = |R|^rank` with `rank` the minimal number of generators.
    Free { ring: RingData, module: ModuleData, rank: usize },
    /// The property holds for the Matlis dual.
    Dual {
        ring: RingData,
        module: ModuleData,
        dual: ModuleData,
        inner: Box<Witness>,
    },
    SelfExtension(SgWitness),
    Periodic(GWitness),
    Summand(SummandWitness),
    Isomorphism {
        ring: RingData,
        source: ModuleData,
        target: ModuleData,
        matrix: ResidueMatrix,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Disproof {
    /// No `s` with `Π ∘ s = id` exists among the `hom_order` maps `M → R^t`.
    NoSection { free_rank: usize, hom_order: u64 },
    /// The property fails for the Matlis dual.
    ViaDual { inner: Box<Disproof> },
    NotFree { order: u64, free_order: u64 },
    NonvanishingExt { degree: usize, order: u64 },
    NonvanishingTor { degree: usize, order: u64 },
    /// Every class of `Ext^1(M, M)` was examined.
    ExhaustedClasses { classes: u64 },
    NonProjectiveTerm { index: usize },
    InvariantMismatch { invariant: String, left: u64, right: u64 },
    ExhaustedHom { maps: u64 },
    NotExact {
        stage: String,
        index: usize,
        kernel_order: u64,
        image_order: u64,
    },
}

/// Orders are tracked as `u128`; reports store them as `u64`.
pub(crate) fn clamp(x: u128) -> u64 {
    x.min(u64::MAX as u128) as u64
}
