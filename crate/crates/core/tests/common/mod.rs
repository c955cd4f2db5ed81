#![allow(dead_code)]

use cgl_core::{ComplexTensor, DenseMatrix, C64};
use proptest::prelude::*;

pub fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

pub fn tensor(shape: Vec<usize>) -> impl Strategy<Value = ComplexTensor> {
    let n: usize = shape.iter().product();
    prop::collection::vec(complex(), n).prop_map(move |data| ComplexTensor::new(shape.clone(), data).unwrap())
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(complex(), rows * cols)
        .prop_map(move |data| DenseMatrix::from_col_major(rows, cols, data).unwrap())
}

/// Shape of order 1..=4 with at most `cap` entries.
pub fn shape(cap: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=12, 1..=4).prop_filter("too many entries", move |s| s.iter().product::<usize>() <= cap)
}

pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |a − b| / max |b|`.
pub fn rel_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let num = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    num / max_abs(b).max(f64::MIN_POSITIVE)
}
