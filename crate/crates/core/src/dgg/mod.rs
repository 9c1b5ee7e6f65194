//! Hierarchical grid over the sphere: cube-face projection, Hilbert-curve
//! cell ids, hierarchy, neighbors and geometry coverings.

mod cellid;
mod covering;
mod projection;

pub use cellid::{CellId, FaceIJ, MAX_LEVEL};
pub use covering::{classify_cell, covering, covering_with_cap, CellRelation, COVERING_CAP};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DggError {
    #[error("level {0} outside 0..=30")]
    InvalidLevel(u8),
    #[error("invalid level range {min}..={max}")]
    InvalidRange { min: u8, max: u8 },
    #[error("bits {0:#018x} are not a valid cell id")]
    InvalidCell(u64),
    #[error("face/i/j out of range: {0:?}")]
    InvalidFaceIJ(FaceIJ),
    #[error("cannot take the level-{level} parent of a level-{cell_level} cell")]
    ParentLevel { level: u8, cell_level: u8 },
    #[error("leaf cell {0:?} has no children")]
    LeafHasNoChildren(CellId),
    #[error("level-0 cells have no edge neighbors in the grid hierarchy")]
    NoNeighborsAtLevelZero,
    #[error("malformed cell token {0:?}")]
    MalformedToken(String),
    #[error("geometry is empty")]
    EmptyGeometry,
    #[error("covering exceeds {limit} cells")]
    CoveringTooLarge { limit: usize },
}

/// Inclusive range of grid levels used for coverings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRange")]
pub struct LevelRange {
    pub min_level: u8,
    pub max_level: u8,
}

#[derive(Deserialize)]
struct RawRange {
    min_level: u8,
    max_level: u8,
}

impl TryFrom<RawRange> for LevelRange {
    type Error = DggError;

    fn try_from(r: RawRange) -> Result<Self, DggError> {
        LevelRange::new(r.min_level, r.max_level)
    }
}

impl LevelRange {
    pub fn new(min_level: u8, max_level: u8) -> Result<LevelRange, DggError> {
        if min_level > max_level || max_level > MAX_LEVEL {
            return Err(DggError::InvalidRange { min: min_level, max: max_level });
        }
        Ok(LevelRange { min_level, max_level })
    }

    pub fn contains(self, level: u8) -> bool {
        (self.min_level..=self.max_level).contains(&level)
    }
}

impl Default for LevelRange {
    fn default() -> Self {
        LevelRange { min_level: 8, max_level: 13 }
    }
}
