//! Fourier-multiplier derivatives along one axis of an n-dimensional array.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, ArrayD, ArrayViewD, IxDyn};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::phasespace::{Boundary, PhaseGrid};

/// Highest derivative order accepted by default (supports potentials of degree ≤ 8).
pub const DEFAULT_MAX_ORDER: usize = 7;

thread_local! {
    // one planner per worker thread
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(len: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(len), p.plan_fft_inverse(len))
    })
}

/// Phase-space axis selector for 2-D fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseAxis {
    Q,
    P,
}

impl PhaseAxis {
    pub fn index(self) -> usize {
        match self {
            PhaseAxis::Q => 0,
            PhaseAxis::P => 1,
        }
    }
}

/// One derivative to take along an axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeRequest {
    pub order: usize,
    /// Wavenumbers with `|k|` above this value are dropped.
    pub band: Option<f64>,
}

impl DerivativeRequest {
    pub fn order(order: usize) -> Self {
        DerivativeRequest { order, band: None }
    }
}

/// Geometry of the axis being differentiated.
#[derive(Debug, Clone, Copy)]
pub struct AxisGeometry {
    /// Periodic length of the axis.
    pub length: f64,
    /// Zero-pad the lane to twice its length before transforming.
    pub padded: bool,
}

impl AxisGeometry {
    pub fn of(grid: &PhaseGrid, axis: PhaseAxis) -> Self {
        let length = match axis {
            PhaseAxis::Q => grid.q_len(),
            PhaseAxis::P => grid.p_len(),
        };
        AxisGeometry { length, padded: grid.boundary == Boundary::DecayPadded }
    }
}

fn multiplier(j: usize, m: usize, fft_len_phys: f64, req: &DerivativeRequest) -> Complex64 {
    let nyquist = j * 2 == m;
    if nyquist && req.order % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let signed = if j * 2 <= m { j as f64 } else { j as f64 - m as f64 };
    let k = 2.0 * PI * signed / fft_len_phys;
    if let Some(band) = req.band {
        if k.abs() > band {
            return Complex64::new(0.0, 0.0);
        }
    }
    let kn = k.powi(req.order as i32);
    // i^order
    match req.order % 4 {
        0 => Complex64::new(kn, 0.0),
        1 => Complex64::new(0.0, kn),
        2 => Complex64::new(-kn, 0.0),
        _ => Complex64::new(0.0, -kn),
    }
}

/// Derivatives of `values` along `axis`, one output per request, all in
/// standard layout with the input's shape.
///
/// Lanes are packed two at a time into one complex transform; every
/// multiplier maps real lanes to real lanes so the packed halves separate.
pub fn derivatives_along(
    values: ArrayViewD<'_, f64>,
    axis: usize,
    geom: AxisGeometry,
    requests: &[DerivativeRequest],
    max_order: usize,
) -> Result<Vec<ArrayD<f64>>> {
    if axis >= values.ndim() {
        return Err(Error::Dimension(format!("axis {axis} out of range for {}-d array", values.ndim())));
    }
    if let Some(r) = requests.iter().find(|r| r.order > max_order) {
        return Err(Error::Resolution(format!(
            "derivative order {} exceeds spectral safety bound {max_order}",
            r.order
        )));
    }
    if requests.iter().any(|r| r.order == 0) {
        return Err(Error::Argument("derivative order must be positive".into()));
    }
    let shape = values.shape().to_vec();
    let n = shape[axis];
    let ndim = shape.len();
    let mut perm: Vec<usize> = (0..ndim).filter(|&a| a != axis).collect();
    perm.push(axis);
    let lanes_view = values.view().permuted_axes(IxDyn(&perm));
    let lane_major: Vec<f64> = if axis == ndim - 1 && values.is_standard_layout() {
        values.as_slice().map(|s| s.to_vec()).unwrap_or_else(|| lanes_view.iter().copied().collect())
    } else {
        lanes_view.iter().copied().collect()
    };
    let n_lanes = if n == 0 { 0 } else { lane_major.len() / n };

    let m = if geom.padded { 2 * n } else { n };
    let phys = if geom.padded { 2.0 * geom.length } else { geom.length };
    let (fwd, inv) = plans(m);
    let n_pairs = n_lanes.div_ceil(2);

    let mut spectrum = vec![Complex64::new(0.0, 0.0); n_pairs * m];
    for pair in 0..n_pairs {
        let a = &lane_major[2 * pair * n..(2 * pair + 1) * n];
        let b = if 2 * pair + 1 < n_lanes { Some(&lane_major[(2 * pair + 1) * n..(2 * pair + 2) * n]) } else { None };
        let dst = &mut spectrum[pair * m..pair * m + n];
        for (i, d) in dst.iter_mut().enumerate() {
            *d = Complex64::new(a[i], b.map_or(0.0, |b| b[i]));
        }
    }
    if !spectrum.is_empty() {
        fwd.process(&mut spectrum);
    }

    let scale = 1.0 / m as f64;
    let mut outputs = Vec::with_capacity(requests.len());
    let mut work = vec![Complex64::new(0.0, 0.0); spectrum.len()];
    for req in requests {
        let mult: Vec<Complex64> = (0..m).map(|j| multiplier(j, m, phys, req) * scale).collect();
        for (chunk_out, chunk_in) in work.chunks_mut(m).zip(spectrum.chunks(m)) {
            for ((o, s), f) in chunk_out.iter_mut().zip(chunk_in).zip(&mult) {
                *o = s * f;
            }
        }
        if !work.is_empty() {
            inv.process(&mut work);
        }
        let mut out = vec![0.0; lane_major.len()];
        for pair in 0..n_pairs {
            let src = &work[pair * m..pair * m + n];
            for (i, z) in src.iter().enumerate() {
                out[2 * pair * n + i] = z.re;
            }
            if 2 * pair + 1 < n_lanes {
                for (i, z) in src.iter().enumerate() {
                    out[(2 * pair + 1) * n + i] = z.im;
                }
            }
        }
        let permuted_shape: Vec<usize> = perm.iter().map(|&a| shape[a]).collect();
        let arr = ArrayD::from_shape_vec(IxDyn(&permuted_shape), out).expect("lane buffer shape");
        let arr = if axis == ndim - 1 {
            arr
        } else {
            let mut inverse = vec![0usize; ndim];
            for (pos, &a) in perm.iter().enumerate() {
                inverse[a] = pos;
            }
            arr.permuted_axes(IxDyn(&inverse)).as_standard_layout().into_owned()
        };
        outputs.push(arr);
    }
    Ok(outputs)
}

/// `∂^order / ∂axis^order` of a 2-D phase-space field by Fourier multipliers.
pub fn spectral_derivative(values: &Array2<f64>, axis: PhaseAxis, order: usize, grid: &PhaseGrid) -> Result<Array2<f64>> {
    spectral_derivative_bounded(values, axis, order, grid, DEFAULT_MAX_ORDER)
}

pub fn spectral_derivative_bounded(
    values: &Array2<f64>,
    axis: PhaseAxis,
    order: usize,
    grid: &PhaseGrid,
    max_order: usize,
) -> Result<Array2<f64>> {
    if values.dim() != grid.shape() {
        return Err(Error::Dimension("field shape does not match grid".into()));
    }
    let mut out = derivatives_along(
        values.view().into_dyn(),
        axis.index(),
        AxisGeometry::of(grid, axis),
        &[DerivativeRequest::order(order)],
        max_order,
    )?;
    Ok(out.pop().unwrap().into_dimensionality().expect("2-d"))
}

/// Adds `coef[j] * src` to `out`, where `j` is the index along `axis`.
pub(crate) fn axpy_along(out: &mut [f64], src: &[f64], shape: &[usize], axis: usize, coef: &[f64]) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    for o in 0..outer {
        for (j, &c) in coef.iter().enumerate().take(n) {
            if c == 0.0 {
                continue;
            }
            let base = (o * n + j) * inner;
            for (d, s) in out[base..base + inner].iter_mut().zip(&src[base..base + inner]) {
                *d += c * s;
            }
        }
    }
}

/// Multiplies `values` by `coef[j]` along `axis`, in place.
pub(crate) fn scale_along(values: &mut [f64], shape: &[usize], axis: usize, coef: &[f64]) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    for o in 0..outer {
        for (j, &c) in coef.iter().enumerate().take(n) {
            let base = (o * n + j) * inner;
            values[base..base + inner].iter_mut().for_each(|v| *v *= c);
        }
    }
}
