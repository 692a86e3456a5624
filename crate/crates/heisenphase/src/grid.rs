//! Uniform grids, sampled functions, quadrature and spectral operations.
//!
//! A [`GridSpec`] describes the cube `[−L, L)^d` sampled with `N` points per
//! axis. Samples are stored row-major, axis 0 varying slowest.
//!
//! Grids pair up in two ways. A phase grid of `N` points over `[−L, L)^{2n}`
//! is *self-dual* for `ℏ` when `2L²|ℏ| = N`; on such a grid the symplectic
//! Fourier transform is an exact unitary DFT. The configuration grid used for
//! Fourier–Wigner transforms has the same extent and `2N` points, so that the
//! modulations `e^{2πiℏyt}` of the whole phase grid stay below its Nyquist
//! limit. Weyl quantization uses the configuration grid with the phase
//! grid's own spacing instead.

pub mod io;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Geometry of a uniform grid on `[−L, L)^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub extent: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, extent: f64, points: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Grid("dimension must be positive".into()));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::Grid(format!("extent must be positive, got {extent}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::Grid(format!("points must be a power of two >= 8, got {points}")));
        }
        Ok(GridSpec { dim, extent, points })
    }

    /// Phase grid with `2L²|ℏ| = N`.
    pub fn self_dual(dim: usize, points: usize, hbar: f64) -> Result<Self> {
        GridSpec::new(dim, (points as f64 / (2.0 * hbar.abs())).sqrt(), points)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    /// Cell volume `Δ^dim`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Lattice coordinate `t_j = −L + jΔ`.
    pub fn coord(&self, j: usize) -> f64 {
        -self.extent + j as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.coord(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.dim - 1 - axis) as u32)
    }

    pub fn unravel(&self, mut idx: usize, out: &mut [usize]) {
        for a in (0..self.dim).rev() {
            out[a] = idx % self.points;
            idx /= self.points;
        }
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Index of coordinate `t` if it is a lattice point inside the grid.
    pub fn lattice_index(&self, t: f64) -> Option<usize> {
        let r = (t + self.extent) / self.spacing();
        let k = r.round();
        if (r - k).abs() > 1e-9 || k < 0.0 || k >= self.points as f64 {
            None
        } else {
            Some(k as usize)
        }
    }

    /// Configuration grid paired with this phase grid for Fourier–Wigner
    /// transforms: same extent, twice the points.
    pub fn wigner_config(&self) -> Result<GridSpec> {
        if self.dim % 2 != 0 {
            return Err(Error::Grid("phase grids have even dimension".into()));
        }
        GridSpec::new(self.dim / 2, self.extent, 2 * self.points)
    }

    /// Phase grid paired with a Fourier–Wigner configuration grid.
    pub fn wigner_phase(&self) -> Result<GridSpec> {
        GridSpec::new(2 * self.dim, self.extent, self.points / 2)
    }

    /// Configuration grid on which Weyl symbols over this phase grid act.
    pub fn pdo_config(&self) -> Result<GridSpec> {
        if self.dim % 2 != 0 {
            return Err(Error::Grid("phase grids have even dimension".into()));
        }
        GridSpec::new(self.dim / 2, self.extent, self.points)
    }

    /// Whether this grid is self-dual for `ℏ` (to rounding).
    pub fn is_self_dual(&self, hbar: f64) -> bool {
        let r = 2.0 * self.extent * self.extent * hbar.abs() / self.points as f64;
        (r - 1.0).abs() < 1e-9
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && (self.extent - other.extent).abs() <= 1e-12 * self.extent
    }
}

/// A complex function sampled on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub spec: GridSpec,
    pub values: Vec<C64>,
}

/// Function on configuration space `R^n`.
pub type ConfigFn = Field;
/// Function on phase space `R^{2n}`.
pub type PhaseFn = Field;

impl Field {
    pub fn zeros(spec: GridSpec) -> Self {
        Field { spec, values: vec![C64::new(0.0, 0.0); spec.len()] }
    }

    pub fn from_values(spec: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Grid(format!("expected {} samples, got {}", spec.len(), values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Grid("non-finite sample".into()));
        }
        Ok(Field { spec, values })
    }

    /// Samples `f` at every lattice point; `f` receives the coordinates.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&[f64]) -> C64) -> Self {
        let mut idx = vec![0usize; spec.dim];
        let mut t = vec![0.0; spec.dim];
        let values = (0..spec.len())
            .map(|k| {
                spec.unravel(k, &mut idx);
                for (ti, &i) in t.iter_mut().zip(&idx) {
                    *ti = spec.coord(i);
                }
                f(&t)
            })
            .collect();
        Field { spec, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn require_same_grid(&self, other: &Field) -> Result<()> {
        if self.spec.same_as(&other.spec) {
            Ok(())
        } else {
            Err(Error::Grid(format!("{:?} vs {:?}", self.spec, other.spec)))
        }
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.cell()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Field {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Field {
        Field { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: C64, other: &Field) -> Result<Field> {
        self.require_same_grid(other)?;
        Ok(Field {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.require_same_grid(other)?;
        Ok(Field {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// `‖self − other‖ / ‖other‖` (absolute when `other` vanishes).
    pub fn rel_dist(&self, other: &Field) -> Result<f64> {
        let d = self.sub(other)?.norm();
        let n = other.norm();
        Ok(if n > 0.0 { d / n } else { d })
    }

    /// Max absolute pointwise difference.
    pub fn max_dist(&self, other: &Field) -> Result<f64> {
        self.require_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

/// `⟨f, g⟩ = Δ^d Σ f·conj(g)`.
pub fn inner_product(f: &Field, g: &Field) -> Result<C64> {
    f.require_same_grid(g)?;
    let s: C64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum();
    Ok(s * f.spec.cell())
}

/// Visits every 1-D lane of `values` along `axis`.
pub(crate) fn for_each_lane(
    spec: &GridSpec,
    axis: usize,
    values: &mut [C64],
    mut f: impl FnMut(&mut [C64]),
) {
    let n = spec.points;
    let stride = spec.stride(axis);
    let outer = values.len() / (n * stride);
    let mut lane = vec![C64::new(0.0, 0.0); n];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * n * stride + i;
            for (k, l) in lane.iter_mut().enumerate() {
                *l = values[base + k * stride];
            }
            f(&mut lane);
            for (k, l) in lane.iter().enumerate() {
                values[base + k * stride] = *l;
            }
        }
    }
}

/// Signed DFT frequency index; the Nyquist bin maps to `−N/2`.
pub(crate) fn signed_freq(k: usize, n: usize) -> f64 {
    if k < n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Applies the Fourier multiplier `m(ν)` (ν in cycles per unit length) along
/// one axis. `nyquist` overrides the multiplier at the Nyquist bin.
pub(crate) fn fourier_multiplier(
    f: &Field,
    axis: usize,
    m: impl Fn(f64) -> C64,
    nyquist: Option<C64>,
) -> Field {
    let spec = f.spec;
    let n = spec.points;
    let len = n as f64 * spec.spacing();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mult: Vec<C64> = (0..n)
        .map(|k| match (k == n / 2, nyquist) {
            (true, Some(v)) => v,
            _ => m(signed_freq(k, n) / len),
        })
        .collect();
    let mut values = f.values.clone();
    let scale = 1.0 / n as f64;
    for_each_lane(&spec, axis, &mut values, |lane| {
        fwd.process(lane);
        for (v, c) in lane.iter_mut().zip(&mult) {
            *v *= c * scale;
        }
        inv.process(lane);
    });
    Field { spec, values }
}

/// `∂f/∂t_axis` by the Fourier multiplier `2πiν` (Nyquist bin zeroed).
pub fn spectral_derivative(f: &Field, axis: usize) -> Result<Field> {
    if axis >= f.spec.dim {
        return Err(Error::Dimension { expected: f.spec.dim, found: axis + 1 });
    }
    let tau = std::f64::consts::TAU;
    Ok(fourier_multiplier(f, axis, |nu| C64::new(0.0, tau * nu), Some(C64::new(0.0, 0.0))))
}

/// Periodic shift by whole cells: `out[j] = f[j − k]`.
pub(crate) fn roll(f: &Field, axis: usize, k: i64) -> Field {
    let n = f.spec.points as i64;
    let k = k.rem_euclid(n) as usize;
    if k == 0 {
        return f.clone();
    }
    let mut values = f.values.clone();
    for_each_lane(&f.spec, axis, &mut values, |lane| lane.rotate_right(k));
    Field { spec: f.spec, values }
}

/// `f(t − offset)`: a lattice multiple rolls the samples exactly, any other
/// offset goes through a band-limited Fourier phase ramp. Both are periodic
/// on the grid, so inputs should be localized away from the boundary.
pub fn fractional_shift(f: &Field, offset: &[f64]) -> Result<Field> {
    if offset.len() != f.spec.dim {
        return Err(Error::Dimension { expected: f.spec.dim, found: offset.len() });
    }
    let d = f.spec.spacing();
    let mut out = f.clone();
    for (axis, &a) in offset.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let r = a / d;
        if (r - r.round()).abs() < 1e-9 {
            out = roll(&out, axis, r.round() as i64);
        } else {
            let tau = std::f64::consts::TAU;
            out = fourier_multiplier(&out, axis, |nu| C64::from_polar(1.0, -tau * nu * a), None);
        }
    }
    Ok(out)
}

/// `sup_shift (∫_Q |f(·+shift)|^p)^{1/p}` over lattice-aligned cubes `Q` of
/// the given side that fit in the grid.
pub fn johansson_norm(f: &Field, p: f64, cube_side: f64) -> Result<f64> {
    let spec = f.spec;
    if p < 1.0 {
        return Err(Error::Param(format!("p must be >= 1, got {p}")));
    }
    if cube_side > 2.0 * spec.extent * (1.0 + 1e-12) || cube_side <= 0.0 {
        return Err(Error::Param(format!("cube side {cube_side} does not fit in [−L, L)")));
    }
    let m = ((cube_side / spec.spacing()).round() as usize).clamp(1, spec.points);
    let n = spec.points;
    // Box sums along each axis shrink the lattice to the valid window starts.
    let mut dims = vec![n; spec.dim];
    let mut buf: Vec<f64> = f.values.iter().map(|v| v.norm().powf(p)).collect();
    for axis in 0..spec.dim {
        let stride: usize = dims[axis + 1..].iter().product();
        let outer: usize = dims[..axis].iter().product();
        let len = dims[axis];
        let out_len = len - m + 1;
        let mut next = vec![0.0; outer * out_len * stride];
        for o in 0..outer {
            for i in 0..stride {
                let at = |k: usize| buf[(o * len + k) * stride + i];
                let mut acc: f64 = (0..m).map(at).sum();
                next[o * out_len * stride + i] = acc;
                for s in 1..out_len {
                    acc += at(s + m - 1) - at(s - 1);
                    next[(o * out_len + s) * stride + i] = acc;
                }
            }
        }
        dims[axis] = out_len;
        buf = next;
    }
    let best = buf.iter().cloned().fold(0.0, f64::max).max(0.0);
    Ok((best * spec.cell()).powf(1.0 / p))
}

/// Unitary DFT over the whole grid, used for the Parseval check.
pub fn unitary_dft(f: &Field) -> Field {
    let spec = f.spec;
    let n = spec.points;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let mut values = f.values.clone();
    let scale = 1.0 / (n as f64).sqrt();
    for axis in 0..spec.dim {
        for_each_lane(&spec, axis, &mut values, |lane| {
            fwd.process(lane);
            lane.iter_mut().for_each(|v| *v *= scale);
        });
    }
    Field { spec, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn gauss(spec: GridSpec, c: f64) -> Field {
        Field::from_fn(spec, |t| C64::new((-PI * t.iter().map(|x| (x - c) * (x - c)).sum::<f64>()).exp(), 0.0))
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(1, 8.0, 64).is_ok());
        assert!(GridSpec::new(1, 8.0, 4).is_err());
        assert!(GridSpec::new(1, 8.0, 48).is_err());
        assert!(GridSpec::new(1, -1.0, 64).is_err());
        let s = GridSpec::self_dual(2, 64, 1.0).unwrap();
        assert!(s.is_self_dual(1.0));
        assert!((s.extent - 32f64.sqrt()).abs() < 1e-14);
        assert_eq!(s.wigner_config().unwrap().points, 128);
        assert_eq!(s.lattice_index(s.coord(17)), Some(17));
        assert_eq!(s.lattice_index(s.coord(17) + 0.5 * s.spacing()), None);
    }

    #[test]
    fn inner_product_basics() {
        let spec = GridSpec::new(1, 4.0, 32).unwrap();
        let f = Field::from_fn(spec, |t| C64::new(t[0].sin(), t[0].cos() * 0.3));
        let g = gauss(spec, 0.5);
        let ff = inner_product(&f, &f).unwrap();
        assert!(ff.re > 0.0 && ff.im.abs() < 1e-15);
        let a = inner_product(&f, &g).unwrap();
        let b = inner_product(&g, &f).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
        let mut e1 = Field::zeros(spec);
        let mut e2 = Field::zeros(spec);
        e1.values[3] = C64::new(1.0, 0.0);
        e2.values[3] = C64::new(0.0, 2.0);
        assert_eq!(inner_product(&e1, &e2).unwrap(), C64::new(0.0, -2.0) * spec.spacing());
        let other = GridSpec::new(1, 4.0, 64).unwrap();
        assert!(inner_product(&f, &Field::zeros(other)).is_err());
    }

    fn derivative_error(points: usize) -> f64 {
        let spec = GridSpec::new(1, 8.0, points).unwrap();
        let d = spectral_derivative(&gauss(spec, 0.0), 0).unwrap();
        let exact = Field::from_fn(spec, |t| C64::new(-2.0 * PI * t[0] * (-PI * t[0] * t[0]).exp(), 0.0));
        d.max_dist(&exact).unwrap()
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let e: Vec<f64> = [32, 64, 128].iter().map(|&n| derivative_error(n)).collect();
        assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
        // Δ = 1/4 leaves a 1e-5 aliasing error; Δ = 1/8 is at rounding level.
        assert!(e[1] < 1e-4 && e[1] > 1e-8, "{e:?}");
        assert!(e[2] < 1e-12, "{e:?}");
        let spec = GridSpec::new(1, 8.0, 128).unwrap();
        let d = spectral_derivative(&gauss(spec, 0.0), 0).unwrap();
        assert!(d.values[64].norm() < 1e-15);
    }

    #[test]
    fn spectral_derivative_on_second_axis() {
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let f = Field::from_fn(spec, |p| C64::new((-PI * (p[0] * p[0] + 2.0 * p[1] * p[1])).exp(), 0.0));
        let d = spectral_derivative(&f, 1).unwrap();
        let exact = Field::from_fn(spec, |p| {
            C64::new(-4.0 * PI * p[1] * (-PI * (p[0] * p[0] + 2.0 * p[1] * p[1])).exp(), 0.0)
        });
        assert!(d.max_dist(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn shifts() {
        let spec = GridSpec::new(1, 8.0, 128).unwrap();
        let f = gauss(spec, 0.3);
        assert_eq!(fractional_shift(&f, &[0.0]).unwrap(), f);
        let one = fractional_shift(&f, &[spec.spacing()]).unwrap();
        for j in 1..128 {
            assert!((one.values[j] - f.values[j - 1]).norm() < 1e-12);
        }
        let half = fractional_shift(&f, &[0.5 * spec.spacing()]).unwrap();
        let exact = gauss(spec, 0.3 + 0.5 * spec.spacing());
        assert!(half.max_dist(&exact).unwrap() < 1e-8);
        let far = fractional_shift(&f, &[1.2345]).unwrap();
        assert!(far.max_dist(&gauss(spec, 1.5345)).unwrap() < 1e-8);
    }

    #[test]
    fn johansson() {
        let spec = GridSpec::new(2, 4.0, 16).unwrap();
        assert_eq!(johansson_norm(&Field::zeros(spec), 2.0, 1.0).unwrap(), 0.0);
        let ones = Field::from_fn(spec, |_| C64::new(1.0, 0.0));
        let full = johansson_norm(&ones, 2.0, 8.0).unwrap();
        assert!((full - 8.0).abs() < 1e-12);
        let side = 2.0;
        let ind = Field::from_fn(spec, |p| {
            let inside = p.iter().all(|&v| (-1.0..1.0).contains(&v));
            C64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        });
        let v = johansson_norm(&ind, 2.0, side).unwrap();
        assert!((v - side).abs() < 1e-12, "{v}");
        let g = gauss(spec, 0.0);
        let a = johansson_norm(&g, 1.5, 2.0).unwrap();
        let b = johansson_norm(&roll(&roll(&g, 0, 3), 1, -2), 1.5, 2.0).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(johansson_norm(&g, 2.0, 9.0).is_err());
    }

    proptest! {
        #[test]
        fn parseval_and_linearity(
            re in prop::collection::vec(-1.0f64..1.0, 32),
            im in prop::collection::vec(-1.0f64..1.0, 32),
            a in -2.0f64..2.0,
        ) {
            let spec = GridSpec::new(1, 4.0, 32).unwrap();
            let vals: Vec<C64> = re.iter().zip(&im).map(|(&r, &i)| C64::new(r, i)).collect();
            let f = Field::from_values(spec, vals).unwrap();
            let sum_sq = |g: &Field| g.values.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let fhat = unitary_dft(&f);
            prop_assert!((sum_sq(&f) - sum_sq(&fhat)).abs() < 1e-12 * (1.0 + sum_sq(&f)));
            let g = gauss(spec, 0.2);
            let lhs = spectral_derivative(&f.axpy(C64::new(a, 0.0), &g).unwrap(), 0).unwrap();
            let rhs = spectral_derivative(&f, 0).unwrap()
                .axpy(C64::new(a, 0.0), &spectral_derivative(&g, 0).unwrap()).unwrap();
            prop_assert!(lhs.max_dist(&rhs).unwrap() < 1e-12 * (1.0 + lhs.max_abs()));
        }
    }
}
