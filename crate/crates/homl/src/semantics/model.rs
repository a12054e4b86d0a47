//! Finite Kripke models with world-indexed interpretations.
//!
//! Worlds are labeled `i1..iN`, entities `e1..eM`. A property denotation
//! (an intension) is a bit table over (entity, world) pairs packed into a
//! `u64`, bit `e * N + w`, so entity-major order `e1@i1, e1@i2, ..., e2@i1`
//! matches the label-sorted tuple notation used in model files.

use thiserror::Error;

use crate::syntax::Frame;

/// Hard caps keeping every mask in this module inside a `u64` and every
/// intension space enumerable.
pub const MAX_WORLDS: usize = 8;
pub const MAX_ENTITIES: usize = 8;
pub const MAX_INTENSION_BITS: usize = 32;

/// Ceiling on enumerable third-order spaces (sets of properties).
pub const DEFAULT_THIRD_ORDER_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model needs at least one {what}")]
    Empty { what: &'static str },

    #[error("too many {what}: {got} exceeds the cap {max}")]
    TooLarge { what: &'static str, got: usize, max: usize },

    #[error("accessibility mask for {world} has bits outside the world range")]
    SuccOutOfRange { world: String },

    #[error("existence table has bits outside the (entity, world) range")]
    ExistsOutOfRange,

    #[error("interpretation of P at {world} lists an intension outside the (entity, world) range")]
    IntensionOutOfRange { world: String },

    #[error("{line}: {msg}")]
    File { line: u32, msg: String },
}

/// Search-space sizes, plus the ceiling beyond which third-order
/// quantification is refused rather than enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub worlds: usize,
    pub entities: usize,
    pub third_order_limit: u64,
}

impl Bounds {
    pub fn new(worlds: usize, entities: usize) -> Bounds {
        Bounds { worlds, entities, third_order_limit: DEFAULT_THIRD_ORDER_LIMIT }
    }
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds::new(2, 1)
    }
}

/// An immutable finite model: accessibility, per-world existence, and the
/// interpretation of `P` as a per-world set of intensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: usize,
    entities: usize,
    /// `succ[w]` = mask of worlds accessible from `w`.
    succ: Vec<u64>,
    /// Bit `e * worlds + w` set iff entity `e` exists at world `w`.
    exists: u64,
    /// `pos[w]` = sorted, deduplicated intension masks forming P at `w`.
    pos: Vec<Vec<u64>>,
}

impl KripkeModel {
    pub fn new(
        worlds: usize,
        entities: usize,
        succ: Vec<u64>,
        exists: u64,
        mut pos: Vec<Vec<u64>>,
    ) -> Result<KripkeModel, ModelError> {
        if worlds == 0 {
            return Err(ModelError::Empty { what: "world" });
        }
        if entities == 0 {
            return Err(ModelError::Empty { what: "entity" });
        }
        if worlds > MAX_WORLDS {
            return Err(ModelError::TooLarge { what: "worlds", got: worlds, max: MAX_WORLDS });
        }
        if entities > MAX_ENTITIES {
            return Err(ModelError::TooLarge { what: "entities", got: entities, max: MAX_ENTITIES });
        }
        let bits = worlds * entities;
        if bits > MAX_INTENSION_BITS {
            return Err(ModelError::TooLarge {
                what: "intension bits (worlds * entities)",
                got: bits,
                max: MAX_INTENSION_BITS,
            });
        }
        if succ.len() != worlds {
            return Err(ModelError::TooLarge {
                what: "accessibility rows",
                got: succ.len(),
                max: worlds,
            });
        }
        if pos.len() != worlds {
            return Err(ModelError::TooLarge { what: "P rows", got: pos.len(), max: worlds });
        }
        let world_mask = mask(worlds);
        for (w, &row) in succ.iter().enumerate() {
            if row & !world_mask != 0 {
                return Err(ModelError::SuccOutOfRange { world: world_name(w) });
            }
        }
        if exists & !mask(bits) != 0 {
            return Err(ModelError::ExistsOutOfRange);
        }
        let int_mask = mask(bits);
        for (w, row) in pos.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            if row.iter().any(|&ix| ix & !int_mask != 0) {
                return Err(ModelError::IntensionOutOfRange { world: world_name(w) });
            }
        }
        Ok(KripkeModel { worlds, entities, succ, exists, pos })
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn entities(&self) -> usize {
        self.entities
    }

    /// Mask of worlds accessible from `w`.
    pub fn succ(&self, w: usize) -> u64 {
        self.succ[w]
    }

    pub fn succ_rows(&self) -> &[u64] {
        &self.succ
    }

    pub fn exists_bits(&self) -> u64 {
        self.exists
    }

    pub fn exists_at(&self, e: usize, w: usize) -> bool {
        self.exists >> (e * self.worlds) & 1 << w != 0
    }

    /// Worlds where entity `e` exists.
    pub fn exists_worlds(&self, e: usize) -> u64 {
        self.exists >> (e * self.worlds) & self.world_mask()
    }

    /// Entities existing at world `w`.
    pub fn exists_entities(&self, w: usize) -> u64 {
        let mut out = 0;
        for e in 0..self.entities {
            if self.exists_at(e, w) {
                out |= 1 << e;
            }
        }
        out
    }

    /// Sorted intension masks interpreting P at `w`.
    pub fn pos(&self, w: usize) -> &[u64] {
        &self.pos[w]
    }

    pub fn pos_rows(&self) -> &[Vec<u64>] {
        &self.pos
    }

    pub fn pos_contains(&self, w: usize, ix: u64) -> bool {
        self.pos[w].binary_search(&ix).is_ok()
    }

    /// Worlds at which intension `ix` belongs to P.
    pub fn pos_member_worlds(&self, ix: u64) -> u64 {
        let mut out = 0;
        for w in 0..self.worlds {
            if self.pos_contains(w, ix) {
                out |= 1 << w;
            }
        }
        out
    }

    pub fn world_mask(&self) -> u64 {
        mask(self.worlds)
    }

    pub fn entity_mask(&self) -> u64 {
        mask(self.entities)
    }

    pub fn intension_bits(&self) -> usize {
        self.worlds * self.entities
    }

    /// Number of distinct intensions, `2^(M*N)`.
    pub fn intension_count(&self) -> u64 {
        1 << self.intension_bits()
    }

    pub fn full_intension(&self) -> u64 {
        mask(self.intension_bits())
    }

    /// Entities in the extension of intension `ix` at world `w`.
    pub fn extension_at(&self, ix: u64, w: usize) -> u64 {
        let mut out = 0;
        for e in 0..self.entities {
            if ix >> (e * self.worlds) & 1 << w != 0 {
                out |= 1 << e;
            }
        }
        out
    }

    /// Intension true of entity `e` exactly at the worlds in `world_bits`.
    pub fn intension_of_entity_worlds(&self, e: usize, world_bits: u64) -> u64 {
        world_bits << (e * self.worlds)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.worlds).all(|w| self.succ[w] & 1 << w != 0)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.worlds).all(|w| {
            (0..self.worlds).all(|v| (self.succ[w] >> v & 1) == (self.succ[v] >> w & 1))
        })
    }

    pub fn satisfies_frame(&self, frame: Frame) -> bool {
        match frame {
            Frame::K => true,
            Frame::T => self.is_reflexive(),
            Frame::Kb => self.is_symmetric(),
        }
    }
}

pub fn mask(bits: usize) -> u64 {
    debug_assert!(bits <= 64);
    if bits == 64 { u64::MAX } else { (1 << bits) - 1 }
}

pub fn world_name(w: usize) -> String {
    format!("i{}", w + 1)
}

pub fn entity_name(e: usize) -> String {
    format!("e{}", e + 1)
}

/// Parse a label like `i3` or `e1` into its zero-based index.
pub fn parse_label(s: &str, prefix: char, count: usize) -> Option<usize> {
    let rest = s.strip_prefix(prefix)?;
    let n: usize = rest.parse().ok()?;
    if n >= 1 && n <= count {
        Some(n - 1)
    } else {
        None
    }
}
