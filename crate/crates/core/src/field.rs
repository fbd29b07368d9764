//! Dense fields on a regular pixel grid.
//!
//! [`ScalarField`] is the workhorse: a `width x height` grid with one or more
//! channels stored planar (channel 0 first, then channel 1, ...), each channel
//! row-major. [`VectorField`] carries a 2-vector per pixel per channel, split
//! into an x-component and a y-component field of identical layout.

use crate::error::{Error, Result};

/// A `width x height (x channels)` grid of real values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ScalarField {
    /// All-zero field.
    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        assert!(channels >= 1, "a field needs at least one channel");
        Self {
            width,
            height,
            channels,
            data: vec![0.0; width * height * channels],
        }
    }

    /// Field filled with a constant.
    pub fn constant(width: usize, height: usize, channels: usize, value: f64) -> Self {
        let mut f = Self::zeros(width, height, channels);
        f.data.fill(value);
        f
    }

    /// Wrap an existing buffer (planar layout, each channel row-major).
    pub fn from_vec(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * channels {
            return Err(Error::Contract(format!(
                "field data length {} does not match {}x{}x{}",
                data.len(),
                width,
                height,
                channels
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Pixels per channel.
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    fn index(&self, x: usize, y: usize, ch: usize) -> usize {
        debug_assert!(x < self.width && y < self.height && ch < self.channels);
        (ch * self.height + y) * self.width + x
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, ch: usize) -> f64 {
        self.data[self.index(x, y, ch)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, ch: usize, value: f64) {
        let i = self.index(x, y, ch);
        self.data[i] = value;
    }

    /// One channel as a flat row-major slice.
    pub fn channel(&self, ch: usize) -> &[f64] {
        let n = self.pixel_count();
        &self.data[ch * n..(ch + 1) * n]
    }

    pub fn channel_mut(&mut self, ch: usize) -> &mut [f64] {
        let n = self.pixel_count();
        &mut self.data[ch * n..(ch + 1) * n]
    }

    /// The full planar buffer.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    /// Apply `f` to every value, in place.
    pub fn map_inplace(&mut self, f: impl Fn(f64) -> f64) {
        for v in &mut self.data {
            *v = f(*v);
        }
    }

    /// New field with `f` applied to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.map_inplace(f);
        out
    }

    /// New field combining two fields of identical shape pointwise.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert!(self.same_shape(other), "shape mismatch in zip_map");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data,
        }
    }

    /// Sum of all values (all channels).
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Standard inner product over all values.
    pub fn dot(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other), "shape mismatch in dot");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Largest absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// A grid of 2-vectors (x- and y-derivative components), one per pixel and
/// channel, stored as two [`ScalarField`]s of identical shape.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        Self {
            x: ScalarField::zeros(width, height, channels),
            y: ScalarField::zeros(width, height, channels),
        }
    }

    pub fn new(x: ScalarField, y: ScalarField) -> Self {
        assert!(x.same_shape(&y), "vector field components must match");
        Self { x, y }
    }

    pub fn width(&self) -> usize {
        self.x.width()
    }

    pub fn height(&self) -> usize {
        self.x.height()
    }

    pub fn channels(&self) -> usize {
        self.x.channels()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.x.same_shape(&other.x)
    }

    /// Inner product summing both components.
    pub fn dot(&self, other: &Self) -> f64 {
        self.x.dot(&other.x) + self.y.dot(&other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Apply `f` to every component value, in place.
    pub fn map_inplace(&mut self, f: impl Fn(f64) -> f64 + Copy) {
        self.x.map_inplace(f);
        self.y.map_inplace(f);
    }
}

/// A per-pixel integer labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    data: Vec<u32>,
}

impl LabelMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Contract(format!(
                "label data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u32 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, label: u32) {
        self.data[y * self.width + x] = label;
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Largest label value, or `None` for an empty map.
    pub fn max_label(&self) -> Option<u32> {
        self.data.iter().copied().max()
    }

    /// Fraction of pixels where the two maps agree exactly.
    pub fn agreement(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other), "shape mismatch in agreement");
        if self.data.is_empty() {
            return 0.0;
        }
        let hits = self
            .data
            .iter()
            .zip(&other.data)
            .filter(|(a, b)| a == b)
            .count();
        hits as f64 / self.data.len() as f64
    }
}
