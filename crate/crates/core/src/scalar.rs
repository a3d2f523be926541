//! Scalar abstraction shared by every numeric module.
//!
//! Analyses are written once over [`Real`] and instantiated for `f32` and
//! `f64`. Training additionally needs a lock-free storage cell per parameter,
//! which [`TrainReal`] provides through the matching atomic integer type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar usable by the analysis modules.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; never fails for finite inputs.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable")
    }

    #[inline]
    fn of_count(v: u64) -> Self {
        Self::from_u64(v).expect("count is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A scalar with an interior-mutable, thread-shareable storage cell.
///
/// Loads and stores are relaxed: concurrent workers may overwrite each other's
/// updates (the usual lock-free SGD contract) but never observe torn values.
pub trait TrainReal: Real {
    type Cell: Send + Sync;

    fn new_cell(v: Self) -> Self::Cell;
    fn load(cell: &Self::Cell) -> Self;
    fn store(cell: &Self::Cell, v: Self);
}

impl TrainReal for f32 {
    type Cell = AtomicU32;

    #[inline]
    fn new_cell(v: Self) -> AtomicU32 {
        AtomicU32::new(v.to_bits())
    }
    #[inline]
    fn load(cell: &AtomicU32) -> Self {
        f32::from_bits(cell.load(Ordering::Relaxed))
    }
    #[inline]
    fn store(cell: &AtomicU32, v: Self) {
        cell.store(v.to_bits(), Ordering::Relaxed)
    }
}

impl TrainReal for f64 {
    type Cell = AtomicU64;

    #[inline]
    fn new_cell(v: Self) -> AtomicU64 {
        AtomicU64::new(v.to_bits())
    }
    #[inline]
    fn load(cell: &AtomicU64) -> Self {
        f64::from_bits(cell.load(Ordering::Relaxed))
    }
    #[inline]
    fn store(cell: &AtomicU64, v: Self) {
        cell.store(v.to_bits(), Ordering::Relaxed)
    }
}
