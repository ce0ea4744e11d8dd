//! Periodic multilevel discrete wavelet transforms in Mallat layout.

use ndarray::{ArrayD, ArrayViewD, ArrayViewMutD, Axis, Dimension, IxDyn, Slice};

use super::wavelet::WaveletSpec;
use crate::error::{Error, Result};

/// One analysis step on a periodic lane: `out[..n/2]` gets the lowpass
/// coefficients, `out[n/2..]` the highpass ones.
pub(crate) fn analysis_step(x: &[f64], h: &[f64], g: &[f64], out: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (j, (hj, gj)) in h.iter().zip(g).enumerate() {
            let v = x[(2 * k + j) % n];
            a += hj * v;
            d += gj * v;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

/// Inverse of [`analysis_step`].
pub(crate) fn synthesis_step(c: &[f64], h: &[f64], g: &[f64], out: &mut [f64]) {
    let n = c.len();
    let half = n / 2;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..half {
        let (a, d) = (c[k], c[half + k]);
        for (j, (hj, gj)) in h.iter().zip(g).enumerate() {
            out[(2 * k + j) % n] += hj * a + gj * d;
        }
    }
}

/// Applies `step` to every segment of length `seg` on every lane along `axis`.
pub(crate) fn transform_segments(
    mut view: ArrayViewMutD<'_, f64>,
    axis: usize,
    seg: usize,
    step: impl Fn(&[f64], &mut [f64]),
) {
    let mut buf = vec![0.0; seg];
    let mut out = vec![0.0; seg];
    for mut lane in view.lanes_mut(Axis(axis)) {
        for start in (0..lane.len()).step_by(seg) {
            for (b, v) in buf.iter_mut().zip(lane.iter().skip(start)) {
                *b = *v;
            }
            step(&buf, &mut out);
            for (v, o) in lane.iter_mut().skip(start).zip(&out) {
                *v = *o;
            }
        }
    }
}

fn leading_block<'a>(a: &'a mut ArrayD<f64>, sizes: &[usize]) -> ArrayViewMutD<'a, f64> {
    a.slice_each_axis_mut(|ax| Slice::from(0..sizes[ax.axis.index()]))
}

/// Coefficients of a separable periodic wavelet transform in Mallat layout.
///
/// Levels are counted on the shortest axis: with `n_min = 2^J` the finest
/// level is `J`, the approximation block is `V_{i_c}` with
/// `i_c = J − levels`, and the detail block `D_j` (`i_c < j ≤ J`) holds what
/// `V_j` adds to `V_{j−1}`. Along an axis of length `n`, `V_j` occupies the
/// leading `n / 2^{J−j}` indices.
#[derive(Debug, Clone, PartialEq)]
pub struct MraDecomposition {
    pub coeffs: ArrayD<f64>,
    pub levels: usize,
    pub coarsest_level: usize,
    pub wavelet: WaveletSpec,
}

fn log2_exact(n: usize) -> Option<usize> {
    n.is_power_of_two().then(|| n.trailing_zeros() as usize)
}

fn check_shape(shape: &[usize], levels: usize) -> Result<usize> {
    if shape.is_empty() || shape.len() > 4 {
        return Err(Error::Dimension(format!("wavelet transforms take 1 to 4 axes (got {})", shape.len())));
    }
    let step = 1usize.checked_shl(levels as u32).unwrap_or(0);
    for &n in shape {
        if step == 0 || n % step != 0 || n < step {
            return Err(Error::Dimension(format!("axis length {n} is not divisible by 2^{levels}")));
        }
    }
    let n_min = *shape.iter().min().unwrap();
    let j = log2_exact(n_min).ok_or_else(|| Error::Dimension(format!("axis length {n_min} is not a power of two")))?;
    Ok(j)
}

/// Forward transform with `levels` analysis steps on every axis.
pub fn dwt_forward(field: ArrayViewD<'_, f64>, spec: &WaveletSpec, levels: usize) -> Result<MraDecomposition> {
    let shape = field.shape().to_vec();
    let finest = check_shape(&shape, levels)?;
    let (h, g) = (spec.lowpass(), spec.highpass());
    let mut coeffs = field.as_standard_layout().into_owned();
    let mut sizes = shape.clone();
    for _ in 0..levels {
        for axis in 0..shape.len() {
            let block = leading_block(&mut coeffs, &sizes);
            transform_segments(block, axis, sizes[axis], |x, o| analysis_step(x, h, g, o));
        }
        sizes.iter_mut().for_each(|s| *s /= 2);
    }
    Ok(MraDecomposition { coeffs, levels, coarsest_level: finest - levels, wavelet: spec.clone() })
}

/// Forward transform down to the approximation level `coarsest`.
pub fn dwt_forward_to(field: ArrayViewD<'_, f64>, spec: &WaveletSpec, coarsest: usize) -> Result<MraDecomposition> {
    let n_min = field.shape().iter().copied().min().unwrap_or(0);
    let finest = log2_exact(n_min).ok_or_else(|| Error::Dimension(format!("axis length {n_min} is not a power of two")))?;
    if coarsest > finest {
        return Err(Error::Argument(format!("coarsest level {coarsest} exceeds finest level {finest}")));
    }
    dwt_forward(field, spec, finest - coarsest)
}

/// Exact inverse of [`dwt_forward`].
pub fn dwt_inverse(decomp: &MraDecomposition) -> Result<ArrayD<f64>> {
    let shape = decomp.coeffs.shape().to_vec();
    let finest = check_shape(&shape, decomp.levels)?;
    if finest != decomp.coarsest_level + decomp.levels {
        return Err(Error::Dimension(format!(
            "coarsest level {} with {} levels does not match coefficient shape {shape:?}",
            decomp.coarsest_level, decomp.levels
        )));
    }
    let (h, g) = (decomp.wavelet.lowpass(), decomp.wavelet.highpass());
    let mut out = decomp.coeffs.as_standard_layout().into_owned();
    for level in (0..decomp.levels).rev() {
        let sizes: Vec<usize> = shape.iter().map(|&n| n >> level).collect();
        for axis in (0..shape.len()).rev() {
            let block = leading_block(&mut out, &sizes);
            transform_segments(block, axis, sizes[axis], |c, o| synthesis_step(c, h, g, o));
        }
    }
    Ok(out)
}

impl MraDecomposition {
    pub fn finest_level(&self) -> usize {
        self.coarsest_level + self.levels
    }

    pub fn shape(&self) -> &[usize] {
        self.coeffs.shape()
    }

    /// Per-axis extent of `V_j` inside the coefficient array.
    pub fn extent(&self, j: usize) -> Vec<usize> {
        let shift = self.finest_level().saturating_sub(j);
        self.shape().iter().map(|&n| n >> shift).collect()
    }

    /// Scale indices of the detail blocks, coarse to fine.
    pub fn detail_levels(&self) -> std::ops::RangeInclusive<usize> {
        self.coarsest_level + 1..=self.finest_level()
    }

    fn for_each_in_block(&self, j: Option<usize>, mut f: impl FnMut(&[usize])) {
        let (outer, inner) = match j {
            None => (self.extent(self.coarsest_level), None),
            Some(j) => (self.extent(j), Some(self.extent(j - 1))),
        };
        let ndim = outer.len();
        let mut idx = vec![0usize; ndim];
        let total: usize = outer.iter().product();
        for _ in 0..total {
            let inside_coarser = inner.as_ref().is_some_and(|inn| idx.iter().zip(inn).all(|(i, n)| i < n));
            if !inside_coarser {
                f(&idx);
            }
            for a in (0..ndim).rev() {
                idx[a] += 1;
                if idx[a] < outer[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    /// Approximation block `V_{i_c}` in row-major order.
    pub fn approximation(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.for_each_in_block(None, |i| out.push(self.coeffs[IxDyn(i)]));
        out
    }

    /// Detail block `D_j` in row-major order over the `V_j` extent.
    pub fn detail(&self, j: usize) -> Result<Vec<f64>> {
        if !self.detail_levels().contains(&j) {
            return Err(Error::Argument(format!("no detail block at level {j}")));
        }
        let mut out = Vec::new();
        self.for_each_in_block(Some(j), |i| out.push(self.coeffs[IxDyn(i)]));
        Ok(out)
    }

    /// Approximation block followed by `D_{i_c+1}, …, D_J`.
    pub fn blocks(&self) -> Vec<Vec<f64>> {
        let mut out = vec![self.approximation()];
        for j in self.detail_levels() {
            out.push(self.detail(j).expect("level in range"));
        }
        out
    }

    /// Rebuilds a decomposition from [`MraDecomposition::blocks`] output.
    pub fn from_blocks(
        shape: &[usize],
        coarsest_level: usize,
        levels: usize,
        wavelet: WaveletSpec,
        blocks: &[Vec<f64>],
    ) -> Result<Self> {
        let finest = check_shape(shape, levels)?;
        if finest != coarsest_level + levels {
            return Err(Error::Dimension(format!(
                "coarsest level {coarsest_level} with {levels} levels does not match shape {shape:?}"
            )));
        }
        if blocks.len() != levels + 1 {
            return Err(Error::Dimension(format!("expected {} blocks, got {}", levels + 1, blocks.len())));
        }
        let mut d = MraDecomposition { coeffs: ArrayD::zeros(IxDyn(shape)), levels, coarsest_level, wavelet };
        let mut positions = Vec::new();
        for (b, block) in blocks.iter().enumerate() {
            positions.clear();
            let j = (b > 0).then(|| coarsest_level + b);
            d.for_each_in_block(j, |i| positions.push(i.to_vec()));
            if positions.len() != block.len() {
                return Err(Error::Dimension(format!(
                    "block {b} holds {} values, expected {}",
                    block.len(),
                    positions.len()
                )));
            }
            for (pos, v) in positions.iter().zip(block) {
                d.coeffs[IxDyn(pos)] = *v;
            }
        }
        Ok(d)
    }

    /// Squared norm of the approximation block.
    pub fn approximation_energy(&self) -> f64 {
        self.approximation().iter().map(|v| v * v).sum()
    }

    /// Squared norm of `D_j`.
    pub fn detail_energy(&self, j: usize) -> Result<f64> {
        Ok(self.detail(j)?.iter().map(|v| v * v).sum())
    }

    /// Sum of squared coefficients.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|v| v * v).sum()
    }
}

/// Zeroes every detail block with `j > level`. Idempotent; identity at the
/// finest level.
pub fn scale_truncate(decomp: &MraDecomposition, level: usize) -> Result<MraDecomposition> {
    if level < decomp.coarsest_level {
        return Err(Error::Argument(format!(
            "truncation level {level} is below the coarsest level {}",
            decomp.coarsest_level
        )));
    }
    let mut out = decomp.clone();
    if level >= decomp.finest_level() {
        return Ok(out);
    }
    let keep = decomp.extent(level);
    for (idx, v) in out.coeffs.indexed_iter_mut() {
        if idx.as_array_view().iter().zip(&keep).any(|(i, k)| i >= k) {
            *v = 0.0;
        }
    }
    Ok(out)
}
