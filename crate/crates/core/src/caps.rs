//! Resource caps shared by every enumeration in the crate.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Caps {
    /// Largest ring that may be enumerated element by element.
    pub ring_elements: u128,
    /// Largest Ext¹ group whose classes may be enumerated.
    pub ext_classes: u128,
    /// Largest Hom group searched exhaustively for isomorphisms.
    pub hom_maps: u128,
    /// Number of syzygy steps explored by resolutions and certificates.
    pub depth: usize,
    /// Longest period tried when building a complete resolution.
    pub period: usize,
    /// Random trials before exhaustive isomorphism search.
    pub iso_trials: usize,
    pub seed: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            ring_elements: 1 << 20,
            ext_classes: 1 << 12,
            hom_maps: 1 << 16,
            depth: 8,
            period: 4,
            iso_trials: 64,
            seed: 0,
        }
    }
}
