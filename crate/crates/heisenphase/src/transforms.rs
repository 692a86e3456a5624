//! Covariant and contravariant transforms, the FSB transform with peeling,
//! and the symplectic Fourier transform.
//!
//! Fourier–Wigner transforms of `f ∈ L²(R)` are sampled on a phase grid with
//! `N` points per axis while `f` lives on a configuration grid of the same
//! extent and `2N` points, so that `t − x` stays on the lattice and the
//! `y`-sums are exact on self-dual grids (`2L²|ℏ| = N`). The transforms are
//! implemented for `n = 1`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{for_each_lane, inner_product, spectral_derivative, Field, GridSpec};
use crate::group::Params;
use crate::reps::{ladder, RepTag, Sign};
use crate::C64;

/// An analysing or reconstructing vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub vector: Field,
    pub norm: f64,
}

impl Window {
    pub fn new(vector: Field) -> Result<Self> {
        let norm = vector.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Param("window must have positive finite norm".into()));
        }
        Ok(Window { vector, norm })
    }

    /// The window rescaled to unit norm.
    pub fn unit(vector: Field) -> Result<Self> {
        let w = Window::new(vector)?;
        Ok(Window { vector: w.vector.scale(C64::new(1.0 / w.norm, 0.0)), norm: 1.0 })
    }
}

pub(crate) fn require_config_1d(f: &Field) -> Result<()> {
    if f.spec.dim != 1 {
        return Err(Error::Unsupported(format!("transforms are implemented for n = 1, got dim {}", f.spec.dim)));
    }
    if f.spec.points < 16 {
        return Err(Error::Grid("configuration grid needs at least 16 points".into()));
    }
    Ok(())
}

pub(crate) fn require_phase_2d(f: &Field) -> Result<()> {
    if f.spec.dim != 2 {
        return Err(Error::Unsupported(format!("phase-space operations are implemented for n = 1, got dim {}", f.spec.dim)));
    }
    Ok(())
}

/// `e^{2πiℏ y_j t_k}` for the phase grid `y` and configuration grid `t`.
fn wigner_table(phase: &GridSpec, config: &GridSpec, hbar: f64) -> Vec<C64> {
    let (n, m) = (phase.points, config.points);
    let mut e = Vec::with_capacity(n * m);
    for j in 0..n {
        let y = phase.coord(j);
        e.extend((0..m).map(|k| C64::from_polar(1.0, 2.0 * PI * hbar * y * config.coord(k))));
    }
    e
}

/// `W(f, φ)(x, y) = ⟨f, ρ(0,x,y)φ⟩` on the phase grid attached to `f`'s grid.
pub fn fourier_wigner(f: &Field, phi: &Window, params: &Params) -> Result<Field> {
    require_config_1d(f)?;
    f.require_same_grid(&phi.vector)?;
    let config = f.spec;
    let phase = config.wigner_phase()?;
    let (n, m) = (phase.points, config.points);
    let hb = params.hbar;
    let table = wigner_table(&phase, &config, hb);
    let dc = config.spacing();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            // t_k − x_i sits at configuration index k − 2i + N.
            let g: Vec<C64> = (0..m)
                .map(|k| {
                    let src = k as i64 - 2 * i as i64 + n as i64;
                    if (0..m as i64).contains(&src) {
                        f.values[k] * phi.vector.values[src as usize].conj()
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect();
            let x = phase.coord(i);
            (0..n)
                .map(|j| {
                    let row = &table[j * m..(j + 1) * m];
                    let s: C64 = g.iter().zip(row).map(|(a, b)| a * b).sum();
                    s * dc * C64::from_polar(1.0, -PI * hb * x * phase.coord(j))
                })
                .collect()
        })
        .collect();
    Field::from_values(phase, rows.concat())
}

/// The covariant transform `W_θ f`; equal to `fourier_wigner(f, θ)`.
pub fn covariant(f: &Field, theta: &Window, params: &Params) -> Result<Field> {
    fourier_wigner(f, theta, params)
}

/// `M_ψ F = |ℏ| ∫ F(x,y) ρ(0,x,y)ψ dx dy`; with this measure
/// `M_ψ W_θ = ⟨ψ, θ⟩ I`.
pub fn contravariant(big_f: &Field, psi: &Window, params: &Params) -> Result<Field> {
    require_phase_2d(big_f)?;
    let config = big_f.spec.wigner_config()?;
    if !psi.vector.spec.same_as(&config) {
        return Err(Error::Grid("window must live on the configuration grid of F".into()));
    }
    Ok(integrated_schrodinger(big_f, &psi.vector, params.hbar)?.scale(C64::new(params.hbar.abs(), 0.0)))
}

/// `ρ(k)f = ∫ k(x,y) ρ(0,x,y) f dx dy` for `k` on a phase grid and `f` on a
/// configuration grid of the same extent with `N` or `2N` points.
pub(crate) fn integrated_schrodinger(k: &Field, f: &Field, hbar: f64) -> Result<Field> {
    require_phase_2d(k)?;
    require_config_1d(f)?;
    let phase = k.spec;
    let config = f.spec;
    let n = phase.points;
    let m = config.points;
    let ratio = m / n;
    if (config.extent - phase.extent).abs() > 1e-12 * phase.extent || !(ratio == 1 || ratio == 2) || ratio * n != m {
        return Err(Error::Grid("configuration grid must share the extent and have N or 2N points".into()));
    }
    let table = wigner_table(&phase, &config, hbar);
    let d = phase.spacing();
    // H[i][k] = Σ_j k[i][j] e^{πiℏ x_i y_j} e^{−2πiℏ y_j t_k}
    let h: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = phase.coord(i);
            let mut acc = vec![C64::new(0.0, 0.0); m];
            for j in 0..n {
                let c = k.values[i * n + j] * C64::from_polar(1.0, PI * hbar * x * phase.coord(j));
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for (a, e) in acc.iter_mut().zip(&table[j * m..(j + 1) * m]) {
                    *a += c * e.conj();
                }
            }
            acc
        })
        .collect();
    // t_k − x_i sits at configuration index k − ratio·i + m/2.
    let values = (0..m)
        .map(|kk| {
            let mut s = C64::new(0.0, 0.0);
            for (i, hi) in h.iter().enumerate() {
                let src = kk as i64 - (ratio * i) as i64 + (m / 2) as i64;
                if (0..m as i64).contains(&src) {
                    s += f.values[src as usize] * hi[kk];
                }
            }
            s * d * d
        })
        .collect();
    Field::from_values(config, values)
}

fn centre_offset(i: usize, a: usize, n: usize) -> Option<usize> {
    let v = i as i64 - a as i64 + (n / 2) as i64;
    (0..n as i64).contains(&v).then_some(v as usize)
}

/// `Δ² Σ u(x',y') v(x−x', y−y') e^{πiℏ(x'y − y'x)}` with zero fill outside
/// the grid: the twisted convolution `u ⋆ v`, equivalently `Λ(u)v`.
pub(crate) fn twisted_sum(u: &Field, v: &Field, hbar: f64) -> Result<Field> {
    require_phase_2d(u)?;
    u.require_same_grid(v)?;
    let spec = u.spec;
    let n = spec.points;
    let d = spec.spacing();
    let coords = spec.coords();
    let e1: Vec<C64> = (0..n * n)
        .map(|k| C64::from_polar(1.0, PI * hbar * coords[k / n] * coords[k % n]))
        .collect();
    let tiny = 1e-20 * u.max_abs();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![C64::new(0.0, 0.0); n];
            let mut g = vec![C64::new(0.0, 0.0); n];
            for a in 0..n {
                let Some(ia) = centre_offset(i, a, n) else { continue };
                let urow = &u.values[a * n..(a + 1) * n];
                if urow.iter().all(|z| z.norm() <= tiny) {
                    continue;
                }
                // g[b] = u[a][b] e^{−πiℏ y_b x_i}
                for (b, gb) in g.iter_mut().enumerate() {
                    *gb = urow[b] * e1[i * n + b].conj();
                }
                let vrow = &v.values[ia * n..(ia + 1) * n];
                for (j, o) in out.iter_mut().enumerate() {
                    let mut s = C64::new(0.0, 0.0);
                    for (b, gb) in g.iter().enumerate() {
                        if let Some(jb) = centre_offset(j, b, n) {
                            s += gb * vrow[jb];
                        }
                    }
                    *o += s * e1[a * n + j];
                }
            }
            out.iter_mut().for_each(|o| *o *= d * d);
            out
        })
        .collect();
    Field::from_values(spec, rows.concat())
}

/// `W^Λ_Ψ F(x, y) = ⟨F, Λ(0,x,y)Ψ⟩`.
pub fn covariant_left(big_f: &Field, big_psi: &Field, params: &Params) -> Result<Field> {
    require_phase_2d(big_f)?;
    big_f.require_same_grid(big_psi)?;
    let spec = big_f.spec;
    let n = spec.points;
    let d = spec.spacing();
    let hb = params.hbar;
    let coords = spec.coords();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = coords[i];
            (0..n)
                .map(|j| {
                    let y = coords[j];
                    let mut s = C64::new(0.0, 0.0);
                    for a in 0..n {
                        // Ψ(x' − x, ·) sits at index a − i + N/2.
                        let Some(ai) = centre_offset(a, i, n) else { continue };
                        for b in 0..n {
                            let Some(bj) = centre_offset(b, j, n) else { continue };
                            let ph = PI * hb * (coords[a] * y - coords[b] * x);
                            s += big_f.values[a * n + b]
                                * big_psi.values[ai * n + bj].conj()
                                * C64::from_polar(1.0, ph);
                        }
                    }
                    s * d * d
                })
                .collect()
        })
        .collect();
    Field::from_values(spec, rows.concat())
}

/// `M^Λ_Ψ F = ∫ F(x,y) Λ(0,x,y)Ψ dx dy`, which is the twisted convolution
/// `F ⋆ Ψ`.
pub fn contravariant_left(big_f: &Field, big_psi: &Field, params: &Params) -> Result<Field> {
    twisted_sum(big_f, big_psi, params.hbar)
}

/// Result of peeling: the peeled samples plus the indices whose exponent
/// exceeded the overflow guard (those samples are set to zero).
#[derive(Clone, Debug, PartialEq)]
pub struct Peeled {
    pub field: Field,
    pub flagged: Vec<usize>,
}

pub const PEEL_EXPONENT_CAP: f64 = 700.0;

fn peel_exponent(p: &[f64], tau: f64, hbar: f64) -> f64 {
    let n = p.len() / 2;
    let q: f64 = (0..n).map(|j| p[j] * p[j] + tau * tau * p[n + j] * p[n + j]).sum();
    PI * hbar.abs() / (2.0 * tau) * q
}

fn peel_with(f: &Field, tau: f64, hbar: f64, sign: f64) -> Peeled {
    let spec = f.spec;
    let mut idx = vec![0usize; spec.dim];
    let mut p = vec![0.0; spec.dim];
    let mut flagged = Vec::new();
    let mut out = f.clone();
    for (k, v) in out.values.iter_mut().enumerate() {
        spec.unravel(k, &mut idx);
        for (pi, &i) in p.iter_mut().zip(&idx) {
            *pi = spec.coord(i);
        }
        let e = sign * peel_exponent(&p, tau, hbar);
        if e > PEEL_EXPONENT_CAP {
            flagged.push(k);
            *v = C64::new(0.0, 0.0);
        } else {
            *v *= e.exp();
        }
    }
    Peeled { field: out, flagged }
}

/// Multiplies by `e^{π|ℏ|/(2τ)(x² + τ²y²)}`.
pub fn peel(f: &Field, tau: f64, params: &Params) -> Peeled {
    peel_with(f, tau, params.hbar, 1.0)
}

/// Inverse of [`peel`].
pub fn unpeel(f: &Field, tau: f64, params: &Params) -> Field {
    peel_with(f, tau, params.hbar, -1.0).field
}

/// The FSB transform: the peeled covariant transform with the vacuum `φ_τ`.
pub fn fsb_transform(f: &Field, tau: f64, params: &Params) -> Result<Peeled> {
    let vac = Window::new(crate::fsb::gaussian_vacuum(tau, params, &f.spec)?)?;
    Ok(peel(&covariant(f, &vac, params)?, tau, params))
}

/// `∂̄_z = (τ∂_x + i∂_y)/sqrt(2|h|τ)` for the complex variable of
/// [`crate::group::complexify`] (phase grid, `n = 1`).
pub fn dbar_z(f: &Field, tau: f64, params: &Params) -> Result<Field> {
    require_phase_2d(f)?;
    let c = 1.0 / (2.0 * params.h().abs() * tau).sqrt();
    let dx = spectral_derivative(f, 0)?;
    let dy = spectral_derivative(f, 1)?;
    dx.scale(C64::new(tau * c, 0.0)).axpy(C64::new(0.0, c), &dy)
}

/// Relative Cauchy–Riemann residual of a pre-FSB function `G`:
/// `‖a⁺_R G‖/‖G‖`. Since `unpeel∘∂̄_z∘peel = a⁺_R`, this measures the
/// analyticity of `peel(G)` without amplifying the grid tails.
pub fn cauchy_riemann_residual(g: &Field, tau: f64, params: &Params) -> Result<f64> {
    Ok(ladder(RepTag::RightPulled, Sign::Plus, tau, 0, g, params)?.norm() / g.norm())
}

/// Applies the matrix `m[a][j]` along `axis`: `out[j] = Σ_a in[a] m[a][j]`.
pub(crate) fn apply_axis(f: &mut Field, axis: usize, m: &[C64]) {
    let n = f.spec.points;
    let spec = f.spec;
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    for_each_lane(&spec, axis, &mut f.values, |lane| {
        for (j, t) in tmp.iter_mut().enumerate() {
            *t = lane.iter().enumerate().map(|(a, v)| v * m[a * n + j]).sum();
        }
        lane.copy_from_slice(&tmp);
    });
}

pub(crate) fn swap_axes(f: &Field, p: usize, q: usize) -> Field {
    let spec = f.spec;
    let mut idx = vec![0usize; spec.dim];
    let mut out = Field::zeros(spec);
    for (k, v) in f.values.iter().enumerate() {
        spec.unravel(k, &mut idx);
        idx.swap(p, q);
        out.values[spec.ravel(&idx)] = *v;
    }
    out
}

/// Symplectic Fourier transform over the given `(x-axis, y-axis)` pairs:
/// `⌢ψ(x,y) = (ℏ/2)^n ∫ ψ(x',y') e^{πiℏ(x'y − y'x)} dx' dy'` per pair.
/// An exact involution on self-dual grids.
pub fn symplectic_fourier_pairs(f: &Field, pairs: &[(usize, usize)], hbar: f64) -> Result<Field> {
    let spec = f.spec;
    for &(p, q) in pairs {
        if p >= spec.dim || q >= spec.dim || p == q {
            return Err(Error::Dimension { expected: spec.dim, found: p.max(q) + 1 });
        }
    }
    let n = spec.points;
    let d = spec.spacing();
    let coords = spec.coords();
    // a[x'][y] = e^{πiℏ x' y}, b[y'][x] = e^{−πiℏ y' x}
    let a: Vec<C64> = (0..n * n).map(|k| C64::from_polar(1.0, PI * hbar * coords[k / n] * coords[k % n])).collect();
    let b: Vec<C64> = a.iter().map(|z| z.conj()).collect();
    let mut out = f.clone();
    for &(p, q) in pairs {
        apply_axis(&mut out, p, &a);
        apply_axis(&mut out, q, &b);
        out = swap_axes(&out, p, q);
        out = out.scale(C64::new(hbar / 2.0 * d * d, 0.0));
    }
    Ok(out)
}

/// Symplectic Fourier transform on a phase grid, pairing axis `k` with
/// axis `n + k`.
pub fn symplectic_fourier(f: &Field, params: &Params) -> Result<Field> {
    let n = f.spec.dim / 2;
    if f.spec.dim % 2 != 0 {
        return Err(Error::Grid("symplectic Fourier transform needs an even dimension".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n).map(|k| (k, n + k)).collect();
    symplectic_fourier_pairs(f, &pairs, params.hbar)
}

/// Euclidean shift `S(a)F(p) = F(p − a)` on the phase grid.
pub fn euclidean_shift(f: &Field, a: &[f64]) -> Result<Field> {
    crate::grid::fractional_shift(f, a)
}

/// Multiplication `E(a)F(x',y') = e^{πiℏ(a_x·y' − a_y·x')} F(x',y')`.
pub fn exp_multiplier(f: &Field, a: &[f64], params: &Params) -> Result<Field> {
    crate::error::check_dim(f.spec.dim, a.len())?;
    let n = a.len() / 2;
    let hb = params.hbar;
    let mut out = f.clone();
    crate::reps::modulate(&mut out, |p| {
        PI * hb * (0..n).map(|j| a[j] * p[n + j] - a[n + j] * p[j]).sum::<f64>()
    });
    Ok(out)
}

/// Convention-dependent constants, measured once per `(ℏ, τ, grid)` on the
/// vacuum and compared with their closed forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub hbar: f64,
    pub tau: f64,
    pub points: usize,
    pub extent: f64,
    /// Measure making `M_φ W_φ = I` (closed form `|ℏ|^n`).
    pub contravariant_measure: f64,
    /// `peel(W(φ_τ, φ_τ))(0)`: the FSB measure factor (closed form 1).
    pub fsb_measure: f64,
    /// `Φ_τ(0,0)` recovered by quadrature (closed form 1).
    pub vacuum_overlap: f64,
}

impl CalibrationRecord {
    /// Measures the constants on the phase grid `phase`.
    pub fn measure(phase: &GridSpec, tau: f64, params: &Params) -> Result<Self> {
        let config = phase.wigner_config()?;
        let vac = Window::new(crate::fsb::gaussian_vacuum(tau, params, &config)?)?;
        let w = covariant(&vac.vector, &vac, params)?;
        let raw = contravariant(&w, &vac, params)?;
        let ip = inner_product(&raw, &vac.vector)?.re;
        let contravariant_measure = params.hbar.abs() / ip;
        let centre = phase.ravel(&vec![phase.points / 2; phase.dim]);
        let peeled = peel(&w, tau, params);
        Ok(CalibrationRecord {
            hbar: params.hbar,
            tau,
            points: phase.points,
            extent: phase.extent,
            contravariant_measure,
            fsb_measure: peeled.field.values[centre].re,
            vacuum_overlap: w.values[centre].re,
        })
    }

    /// Largest deviation of the measured constants from their closed forms.
    pub fn deviation(&self) -> f64 {
        let c = self.hbar.abs();
        [
            (self.contravariant_measure - c).abs() / c,
            (self.fsb_measure - 1.0).abs(),
            (self.vacuum_overlap - 1.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
