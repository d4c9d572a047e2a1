use std::fmt;
use std::sync::Arc;

use super::SymMat;

/// Position-dependent symmetric tensor.
pub type TensorFn = Arc<dyn Fn([f64; 2]) -> SymMat + Send + Sync>;

/// Phase tag of a mesh cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Background,
    /// Conductive inclusion `A_n`.
    A,
    /// Insulating inclusion `B_n`.
    B,
}

impl Region {
    pub fn code(self) -> u32 {
        match self {
            Region::Background => 0,
            Region::A => 1,
            Region::B => 2,
        }
    }

    pub fn from_code(c: u32) -> Option<Region> {
        match c {
            0 => Some(Region::Background),
            1 => Some(Region::A),
            2 => Some(Region::B),
            _ => None,
        }
    }

    pub fn is_inclusion(self) -> bool {
        self != Region::Background
    }
}

/// Region-wise conductivity: a background map defined everywhere plus per-region overrides.
#[derive(Clone)]
pub struct MatrixField {
    dim: usize,
    background: TensorFn,
    regions: Vec<(Region, TensorFn)>,
}

impl MatrixField {
    pub fn new(dim: usize, background: TensorFn) -> Self {
        MatrixField { dim, background, regions: Vec::new() }
    }

    pub fn constant(m: SymMat) -> Self {
        Self::new(m.dim(), Arc::new(move |_| m))
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(SymMat::identity(dim))
    }

    pub fn with_region(mut self, region: Region, f: TensorFn) -> Self {
        self.regions.retain(|(r, _)| *r != region);
        self.regions.push((region, f));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn background_at(&self, p: [f64; 2]) -> SymMat {
        (self.background)(p)
    }

    /// Value at `p` for a cell tagged `region`; untagged regions fall back to the background.
    pub fn at(&self, p: [f64; 2], region: Region) -> SymMat {
        if region.is_inclusion() {
            if let Some((_, f)) = self.regions.iter().find(|(r, _)| *r == region) {
                return f(p);
            }
        }
        (self.background)(p)
    }
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags: Vec<Region> = self.regions.iter().map(|(r, _)| *r).collect();
        f.debug_struct("MatrixField").field("dim", &self.dim).field("regions", &tags).finish()
    }
}
