//! Common interface over single-space and tensor shifts, used by the orbit
//! and criterion code.

use std::fmt::Debug;

use crate::basis::CoeffVector;
use crate::error::Result;
use crate::shift::{Direction, ShiftOperator};
use crate::tensor::{TensorOperator, TensorVector};

pub trait LinearShift {
    type Vector: Clone + Debug + PartialEq;
    /// Basis label: `usize` for a single space, `(usize, usize)` for tensors.
    type Index: Copy + Debug;

    fn direction(&self) -> Direction;
    fn step(&self, v: &Self::Vector) -> Result<Self::Vector>;
    fn power(&self, v: &Self::Vector, k: usize) -> Result<Self::Vector>;
    fn with_direction(&self, direction: Direction) -> Self;
    fn log_norm(v: &Self::Vector) -> f64;
    fn is_zero(v: &Self::Vector) -> bool;
    fn difference(a: &Self::Vector, b: &Self::Vector) -> Result<Self::Vector>;
    fn basis_vector(&self, idx: Self::Index) -> Result<Self::Vector>;
    /// Largest `k` with `T^k e_idx != 0` for the backward operator.
    fn nilpotence_excess(&self, idx: Self::Index) -> usize;
    fn index_coords(idx: Self::Index) -> Vec<usize>;
    fn support_len(v: &Self::Vector) -> usize;
}

impl LinearShift for ShiftOperator {
    type Vector = CoeffVector;
    type Index = usize;

    fn direction(&self) -> Direction {
        ShiftOperator::direction(self)
    }

    fn step(&self, v: &CoeffVector) -> Result<CoeffVector> {
        self.apply(v)
    }

    fn power(&self, v: &CoeffVector, k: usize) -> Result<CoeffVector> {
        self.apply_power(v, k)
    }

    fn with_direction(&self, direction: Direction) -> Self {
        Self::with_direction(self, direction)
    }

    fn log_norm(v: &CoeffVector) -> f64 {
        v.log_norm()
    }

    fn is_zero(v: &CoeffVector) -> bool {
        v.is_zero()
    }

    fn difference(a: &CoeffVector, b: &CoeffVector) -> Result<CoeffVector> {
        a.sub(b)
    }

    fn basis_vector(&self, m: usize) -> Result<CoeffVector> {
        CoeffVector::unit(self.offset_p(), m)
    }

    fn nilpotence_excess(&self, m: usize) -> usize {
        m - self.offset_p()
    }

    fn index_coords(m: usize) -> Vec<usize> {
        vec![m]
    }

    fn support_len(v: &CoeffVector) -> usize {
        v.len()
    }
}

impl LinearShift for TensorOperator {
    type Vector = TensorVector;
    type Index = (usize, usize);

    fn direction(&self) -> Direction {
        TensorOperator::direction(self)
    }

    fn step(&self, v: &TensorVector) -> Result<TensorVector> {
        self.apply(v)
    }

    fn power(&self, v: &TensorVector, k: usize) -> Result<TensorVector> {
        self.apply_power(v, k)
    }

    fn with_direction(&self, direction: Direction) -> Self {
        Self::with_direction(self, direction)
    }

    fn log_norm(v: &TensorVector) -> f64 {
        v.log_norm()
    }

    fn is_zero(v: &TensorVector) -> bool {
        v.is_zero()
    }

    fn difference(a: &TensorVector, b: &TensorVector) -> Result<TensorVector> {
        a.sub(b)
    }

    fn basis_vector(&self, (m, n): (usize, usize)) -> Result<TensorVector> {
        let (p1, p2) = self.offsets();
        TensorVector::unit(p1, p2, m, n)
    }

    fn nilpotence_excess(&self, (m, n): (usize, usize)) -> usize {
        let (p1, p2) = self.offsets();
        (m - p1).min(n - p2)
    }

    fn index_coords((m, n): (usize, usize)) -> Vec<usize> {
        vec![m, n]
    }

    fn support_len(v: &TensorVector) -> usize {
        v.len()
    }
}
