//! One-sided operator calculus: twisted convolutions and integrated
//! representations, Weyl quantization and its inverse, the Moyal series,
//! localisation and (cross-)Toeplitz operators and the Guillemin symbol map.
//!
//! Weyl symbols are sampled on a phase grid with axis 0 the momentum `ξ` and
//! axis 1 the position `x`; they act on the configuration grid with the
//! phase grid's own spacing ([`GridSpec::pdo_config`]) through
//! `Op(a)f(t) = (|ℏ|/2) ∫∫ a(ξ, (t+r)/2) e^{πiℏξ(t−r)} f(r) dξ dr`.
//! Symbol-level routines require `n = 1`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fsb::{fsb_project, gaussian_vacuum, require_member};
use crate::grid::{fractional_shift, spectral_derivative, Field, GridSpec};
use crate::group::{GroupElement, Params};
use crate::reps::{act, reflect, RepTag};
use crate::transforms::{
    integrated_schrodinger, require_config_1d, require_phase_2d, symplectic_fourier, twisted_sum, Window,
};
use crate::C64;

/// A Weyl symbol `a(ξ, x)`: axis 0 is `ξ`, axis 1 is `x`.
pub type PdoSymbol = Field;

/// Largest matrix side a [`DenseOperator`] may have.
pub const DENSE_CAP: usize = 4096;

/// Membership tolerance for inputs of [`cross_toeplitz_apply`].
pub const TOEPLITZ_MEMBERSHIP_TOL: f64 = 1e-3;

/// Highest order accepted by [`moyal_compose`].
pub const MAX_MOYAL_ORDER: usize = 6;

const ZERO: C64 = C64::new(0.0, 0.0);

fn real(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// An operator on sampled functions, stored as its kernel:
/// `(K f)[i] = Δ^d Σ_j K[i][j] f[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub spec: GridSpec,
    /// Row-major `len × len` kernel samples.
    pub matrix: Vec<C64>,
}

impl DenseOperator {
    fn check_size(spec: &GridSpec) -> Result<usize> {
        let n = spec.len();
        if n > DENSE_CAP {
            return Err(Error::SizeCap(format!("dense operator of side {n} exceeds {DENSE_CAP}")));
        }
        Ok(n)
    }

    pub fn new(spec: GridSpec, matrix: Vec<C64>) -> Result<Self> {
        let n = Self::check_size(&spec)?;
        if matrix.len() != n * n {
            return Err(Error::Dimension { expected: n * n, found: matrix.len() });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Param("dense operator has non-finite entries".into()));
        }
        Ok(DenseOperator { spec, matrix })
    }

    pub fn zeros(spec: GridSpec) -> Result<Self> {
        let n = Self::check_size(&spec)?;
        Ok(DenseOperator { spec, matrix: vec![ZERO; n * n] })
    }

    /// The identity, `I/Δ^d` on the diagonal.
    pub fn identity(spec: GridSpec) -> Result<Self> {
        let mut op = Self::zeros(spec)?;
        let n = spec.len();
        for i in 0..n {
            op.matrix[i * n + i] = real(1.0 / spec.cell());
        }
        Ok(op)
    }

    /// Kernel entries from a function of the row and column indices.
    pub fn from_fn(spec: GridSpec, f: impl Fn(usize, usize) -> C64 + Sync) -> Result<Self> {
        let n = Self::check_size(&spec)?;
        let matrix = (0..n * n).into_par_iter().map(|k| f(k / n, k % n)).collect();
        Ok(DenseOperator { spec, matrix })
    }

    /// Assembles the kernel of a linear map by applying it to unit spikes.
    pub fn from_linear_map(spec: GridSpec, map: impl Fn(&Field) -> Result<Field> + Sync) -> Result<Self> {
        let n = Self::check_size(&spec)?;
        let cols: Vec<Field> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = Field::zeros(spec);
                e.values[j] = real(1.0 / spec.cell());
                map(&e)
            })
            .collect::<Result<_>>()?;
        let mut matrix = vec![ZERO; n * n];
        for (j, c) in cols.iter().enumerate() {
            if !c.spec.same_as(&spec) {
                return Err(Error::Grid("linear map must preserve the grid".into()));
            }
            for i in 0..n {
                matrix[i * n + j] = c.values[i];
            }
        }
        Ok(DenseOperator { spec, matrix })
    }

    pub fn side(&self) -> usize {
        self.spec.len()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[i * self.side() + j]
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        if !f.spec.same_as(&self.spec) {
            return Err(Error::Grid("operand is not on the operator's grid".into()));
        }
        let n = self.side();
        let cell = self.spec.cell();
        let values = (0..n)
            .into_par_iter()
            .map(|i| {
                let row = &self.matrix[i * n..(i + 1) * n];
                row.iter().zip(&f.values).map(|(a, b)| a * b).sum::<C64>() * cell
            })
            .collect();
        Field::from_values(self.spec, values)
    }

    /// The kernel of `self ∘ other`.
    pub fn compose(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if !other.spec.same_as(&self.spec) {
            return Err(Error::Grid("operators live on different grids".into()));
        }
        let n = self.side();
        let cell = self.spec.cell();
        let rows: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut out = vec![ZERO; n];
                for k in 0..n {
                    let a = self.matrix[i * n + k];
                    if a == ZERO {
                        continue;
                    }
                    for (o, b) in out.iter_mut().zip(&other.matrix[k * n..(k + 1) * n]) {
                        *o += a * b;
                    }
                }
                out.iter_mut().for_each(|o| *o *= cell);
                out
            })
            .collect();
        Ok(DenseOperator { spec: self.spec, matrix: rows.concat() })
    }

    pub fn adjoint(&self) -> DenseOperator {
        let n = self.side();
        let matrix = (0..n * n).map(|k| self.matrix[(k % n) * n + k / n].conj()).collect();
        DenseOperator { spec: self.spec, matrix }
    }

    pub fn trace(&self) -> C64 {
        let n = self.side();
        (0..n).map(|i| self.matrix[i * n + i]).sum::<C64>() * self.spec.cell()
    }

    pub fn scale(&self, c: C64) -> DenseOperator {
        DenseOperator { spec: self.spec, matrix: self.matrix.iter().map(|v| v * c).collect() }
    }

    /// Frobenius norm of the kernel samples.
    pub fn frobenius(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_F / ‖other‖_F`.
    pub fn rel_dist(&self, other: &DenseOperator) -> Result<f64> {
        if !other.spec.same_as(&self.spec) {
            return Err(Error::Grid("operators live on different grids".into()));
        }
        let d: f64 = self.matrix.iter().zip(&other.matrix).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(d.sqrt() / other.frobenius())
    }
}

/// `k1 ⋆ k2 (x,y) = ∫ k1(x',y') k2(x−x', y−y') e^{πiℏ(x'y − y'x)} dx'dy'`,
/// the product for which `ρ(k1)ρ(k2) = ρ(k1 ⋆ k2)`.
pub fn twisted_convolution(k1: &Field, k2: &Field, params: &Params) -> Result<Field> {
    twisted_sum(k1, k2, params.hbar)
}

/// `∫ k(x,y) tag(0,x,y) f dx dy`.
///
/// The Schrödinger and pulled cases use their closed forms (for the pulled
/// ones, `Λ(k)f = k ⋆ f` and `R(k)f = f ⋆_{−ℏ} k̆`); the doubled-group
/// representations fall back to [`integrated_direct`].
pub fn integrated(tag: RepTag, k: &Field, f: &Field, params: &Params) -> Result<Field> {
    match tag {
        RepTag::Schrodinger => integrated_schrodinger(k, f, params.hbar),
        RepTag::LeftPulled => twisted_sum(k, f, params.hbar),
        RepTag::RightPulled => twisted_sum(&reflect(k), f, -params.hbar),
        RepTag::XiTilde | RepTag::Xi => integrated_direct(tag, k, f, params),
    }
}

/// Riemann sum `Δ^{2n} Σ_p k(p) tag(0,p) f` over the lattice of `k`, which is
/// ordered `(x_1..x_n, y_1..y_n)`. Costs one group action per nonzero sample.
pub fn integrated_direct(tag: RepTag, k: &Field, f: &Field, params: &Params) -> Result<Field> {
    if k.spec.dim % 2 != 0 {
        return Err(Error::Grid("kernels live on even-dimensional grids".into()));
    }
    let n = k.spec.dim / 2;
    let spec = k.spec;
    let tiny = 1e-300_f64.max(1e-18 * k.max_abs());
    let terms: Vec<(GroupElement, C64)> = k
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > tiny)
        .map(|(idx, v)| {
            let mut multi = vec![0usize; spec.dim];
            spec.unravel(idx, &mut multi);
            let c: Vec<f64> = multi.iter().map(|&i| spec.coord(i)).collect();
            (GroupElement { s: 0.0, x: c[..n].to_vec(), y: c[n..].to_vec() }, *v * spec.cell())
        })
        .collect();
    integrated_terms(tag, &terms, f, params)
}

/// `Σ w_g · tag(g) f` over an explicit list of group elements. Terms are
/// summed in fixed-size chunks and the partial sums folded in order, so the
/// result does not depend on thread scheduling.
pub fn integrated_terms(tag: RepTag, terms: &[(GroupElement, C64)], f: &Field, params: &Params) -> Result<Field> {
    const CHUNK: usize = 64;
    let partial: Vec<Field> = terms
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk.iter().try_fold(Field::zeros(f.spec), |acc, (g, w)| acc.axpy(*w, &act(tag, g, f, params)?))
        })
        .collect::<Result<_>>()?;
    partial.iter().try_fold(Field::zeros(f.spec), |acc, p| acc.add(p))
}

fn require_symbol(a: &Field, params: &Params) -> Result<()> {
    require_phase_2d(a)?;
    if !a.spec.is_self_dual(params.hbar) {
        return Err(Error::Grid("Weyl symbols need a self-dual phase grid".into()));
    }
    Ok(())
}

/// `a(ξ, x + Δ/2)`, the symbol on the half-shifted position lattice.
fn half_shifted(a: &Field) -> Result<Field> {
    fractional_shift(a, &[0.0, -a.spec.spacing() / 2.0])
}

/// The kernel of `Op(a)` on the configuration grid with the symbol's
/// spacing. Midpoints `(t_i + t_j)/2` fall on the lattice for even `i + j`
/// and on the half-shifted lattice otherwise. The discrete `ξ`-sum is
/// periodic in `t − r` with period `2L`; entries with `|t − r| > L` are
/// aliases and are set to zero.
pub fn pdo_kernel(a: &PdoSymbol, params: &Params) -> Result<DenseOperator> {
    require_symbol(a, params)?;
    let phase = a.spec;
    let config = phase.pdo_config()?;
    let n = phase.points;
    let d = phase.spacing();
    let hb = params.hbar;
    let ah = half_shifted(a)?;
    let pre = hb.abs() / 2.0 * d;
    DenseOperator::from_fn(config, |i, j| {
        if i.abs_diff(j) > n / 2 {
            return ZERO;
        }
        let (src, m) = if (i + j) % 2 == 0 { (a, (i + j) / 2) } else { (&ah, (i + j - 1) / 2) };
        let u = config.coord(i) - config.coord(j);
        let s: C64 = (0..n)
            .map(|s| src.values[s * n + m] * C64::from_polar(1.0, PI * hb * phase.coord(s) * u))
            .sum();
        s * pre
    })
}

/// `Op(a) f` through the midpoint kernel.
pub fn pdo_apply(a: &PdoSymbol, f: &Field, params: &Params) -> Result<Field> {
    require_config_1d(f)?;
    let k = pdo_kernel(a, params)?;
    k.apply(f)
}

/// `Op(a) f = ρ(⌢b) f` with `b(p, q) = (ℏ/2) a(−q, p/2)`, the route through
/// the integrated Schrödinger representation.
pub fn pdo_apply_rho(a: &PdoSymbol, f: &Field, params: &Params) -> Result<Field> {
    require_symbol(a, params)?;
    require_config_1d(f)?;
    let spec = a.spec;
    let n = spec.points;
    let ah = half_shifted(a)?;
    let half = n as i64 / 2;
    let c = real(params.hbar / 2.0);
    let mut b = Field::zeros(spec);
    for i in 0..n {
        // p_i / 2 = (i − N/2)Δ/2
        let r = i as i64 - half;
        let (src, m) = if r % 2 == 0 { (a, r / 2 + half) } else { (&ah, (r - 1).div_euclid(2) + half) };
        for j in 1..n {
            b.values[i * n + j] = c * src.values[(n - j) * n + m as usize];
        }
    }
    integrated_schrodinger(&symplectic_fourier(&b, params)?, f, params.hbar)
}

/// The Weyl symbol of a kernel on the configuration grid: the exact
/// discrete inverse of [`pdo_kernel`]. Even diagonals `i − j` carry the
/// `ξ`-transform of `a`, odd diagonals that of the half-shifted symbol, which
/// is shifted back spectrally. Entries that would fall off the matrix are
/// taken as zero.
pub fn weyl_symbol_from_kernel(k: &DenseOperator, params: &Params) -> Result<PdoSymbol> {
    require_config_1d(&Field::zeros(k.spec))?;
    let n = k.spec.points;
    let phase = GridSpec::new(2, k.spec.extent, n)?;
    if !phase.is_self_dual(params.hbar) {
        return Err(Error::Grid("Weyl symbols need a self-dual phase grid".into()));
    }
    let d = phase.spacing();
    let ni = n as i64;
    let scale = 2.0 / (params.hbar.abs() * d);
    // spectrum[r][m] = Σ_s a[s][m] e^{2πiσ s r/N}, σ = sign ℏ
    let mut spectrum = vec![vec![ZERO; n]; n];
    for (r, row) in spectrum.iter_mut().enumerate() {
        let dd = if (r as i64) < ni / 2 { r as i64 } else { r as i64 - ni };
        let sign = if dd % 2 == 0 { 1.0 } else { -1.0 };
        for (m, v) in row.iter_mut().enumerate() {
            let m = m as i64;
            let (i, j) = if dd % 2 == 0 { (m + dd / 2, m - dd / 2) } else { (m + (dd + 1) / 2, m - (dd - 1) / 2) };
            if (0..ni).contains(&i) && (0..ni).contains(&j) {
                *v = k.get(i as usize, j as usize) * (sign * scale);
            }
        }
        if dd % 2 != 0 {
            let line = Field::from_values(GridSpec::new(1, k.spec.extent, n)?, row.clone())?;
            row.copy_from_slice(&fractional_shift(&line, &[d / 2.0])?.values);
        }
    }
    let sigma = params.hbar.signum();
    let mut a = Field::zeros(phase);
    for s in 0..n {
        for r in 0..n {
            let w = C64::from_polar(1.0 / n as f64, -sigma * 2.0 * PI * (s * r % n) as f64 / n as f64);
            for m in 0..n {
                a.values[s * n + m] += spectrum[r][m] * w;
            }
        }
    }
    Ok(a)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Mixed spectral derivatives `∂_x^m ∂_ξ^n a` for `m, n ≤ order`, indexed
/// `[m][n]`.
fn derivative_table(a: &Field, order: usize) -> Result<Vec<Vec<Field>>> {
    let mut table = Vec::with_capacity(order + 1);
    let mut dx = a.clone();
    for _ in 0..=order {
        let mut row = Vec::with_capacity(order + 1);
        let mut cur = dx.clone();
        for _ in 0..=order {
            row.push(cur.clone());
            cur = spectral_derivative(&cur, 0)?;
        }
        table.push(row);
        dx = spectral_derivative(&dx, 1)?;
    }
    Ok(table)
}

/// The Moyal series truncated at total order `order`:
/// `Σ_{m+n ≤ order} i^{m−n}/(m! n! (2πℏ)^{m+n}) ∂_x^m∂_ξ^n a1 · ∂_x^n∂_ξ^m a2`.
pub fn moyal_compose(a1: &PdoSymbol, a2: &PdoSymbol, order: usize, params: &Params) -> Result<PdoSymbol> {
    require_phase_2d(a1)?;
    a1.require_same_grid(a2)?;
    if order > MAX_MOYAL_ORDER {
        return Err(Error::Param(format!("Moyal order {order} exceeds {MAX_MOYAL_ORDER}")));
    }
    let t1 = derivative_table(a1, order)?;
    let t2 = derivative_table(a2, order)?;
    let mut out = Field::zeros(a1.spec);
    let i_pow = [real(1.0), C64::new(0.0, 1.0), real(-1.0), C64::new(0.0, -1.0)];
    for m in 0..=order {
        for n in 0..=order - m {
            let c = i_pow[(m as i64 - n as i64).rem_euclid(4) as usize]
                / (factorial(m) * factorial(n) * (2.0 * PI * params.hbar).powi((m + n) as i32));
            out = out.axpy(c, &t1[m][n].mul(&t2[n][m])?)?;
        }
    }
    Ok(out)
}

/// `a1 # a2` through twisted convolution: with `Op(a) = ρ(⌢b_a)`, the product
/// symbol is read off `⌢(⌢b1 ⋆ ⌢b2)`. Values are recovered for `|x| < L/2`
/// and set to zero elsewhere.
pub fn compose_symbols_exact(a1: &PdoSymbol, a2: &PdoSymbol, params: &Params) -> Result<PdoSymbol> {
    require_symbol(a1, params)?;
    a1.require_same_grid(a2)?;
    let spec = a1.spec;
    let n = spec.points;
    let half = n / 2;
    let to_b = |a: &Field| -> Result<Field> {
        let ah = half_shifted(a)?;
        let mut b = Field::zeros(spec);
        for i in 0..n {
            let r = i as i64 - half as i64;
            let (src, m) = if r % 2 == 0 { (a, r / 2) } else { (&ah, (r - 1).div_euclid(2)) };
            let m = (m + half as i64) as usize;
            for j in 1..n {
                b.values[i * n + j] = real(params.hbar / 2.0) * src.values[(n - j) * n + m];
            }
        }
        symplectic_fourier(&b, params)
    };
    let k = twisted_convolution(&to_b(a1)?, &to_b(a2)?, params)?;
    let b12 = symplectic_fourier(&k, params)?;
    // a(ξ_s, x_m) = (2/ℏ) b12(2x_m, −ξ_s)
    let mut out = Field::zeros(spec);
    for s in 1..n {
        for m in n / 4..3 * n / 4 {
            out.values[s * n + m] = b12.values[(2 * m - half) * n + (n - s)] * (2.0 / params.hbar);
        }
    }
    Ok(out)
}

/// `Ψ̂[i][e] = Δ Σ_j ψ[i][j] e^{−2πiℏ y_j eδ}` for configuration offsets
/// `eδ`, `e ∈ (−M, M)`, stored at `e + M`.
fn momentum_profile(psi: &Field, delta: f64, m: usize, hbar: f64) -> Vec<Vec<C64>> {
    let spec = psi.spec;
    let n = spec.points;
    let d = spec.spacing();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (0..2 * m)
                .map(|e| {
                    let off = (e as f64 - m as f64) * delta;
                    let s: C64 = (0..n)
                        .map(|j| psi.values[i * n + j] * C64::from_polar(1.0, -2.0 * PI * hbar * spec.coord(j) * off))
                        .sum();
                    s * d
                })
                .collect()
        })
        .collect()
}

/// The localisation operator `M_{θ2} ∘ ψ ∘ W_{θ1}` on the Fourier–Wigner
/// configuration grid, assembled from its kernel
/// `|ℏ| ∫∫ ψ(x,y) ρ(0,x,y)θ2(t) conj(ρ(0,x,y)θ1(r)) dx dy`.
pub fn localisation_op(psi: &Field, theta1: &Window, theta2: &Window, params: &Params) -> Result<DenseOperator> {
    require_phase_2d(psi)?;
    let config = psi.spec.wigner_config()?;
    for t in [theta1, theta2] {
        if !t.vector.spec.same_as(&config) {
            return Err(Error::Grid("windows must live on the configuration grid of ψ".into()));
        }
    }
    let n = psi.spec.points;
    let m = config.points;
    let hb = params.hbar;
    let profile = momentum_profile(psi, config.spacing(), m, hb);
    let d = psi.spec.spacing();
    let (t1, t2) = (&theta1.vector.values, &theta2.vector.values);
    DenseOperator::from_fn(config, |k, r| {
        let mut s = ZERO;
        for (i, prof) in profile.iter().enumerate() {
            // t − x_i sits at index k − 2i + N
            let a = k as i64 - 2 * i as i64 + n as i64;
            let b = r as i64 - 2 * i as i64 + n as i64;
            if !(0..m as i64).contains(&a) || !(0..m as i64).contains(&b) {
                continue;
            }
            s += t2[a as usize] * t1[b as usize].conj() * prof[k + m - r];
        }
        s * (hb.abs() * d)
    })
}

/// The cross-Toeplitz operator `T_ψ F = P_ς(ψ F)` on `F ∈ F_τ`.
pub fn cross_toeplitz_apply(psi: &Field, big_f: &Field, tau: f64, sigma: f64, params: &Params) -> Result<Field> {
    psi.require_same_grid(big_f)?;
    require_member(big_f, tau, params, TOEPLITZ_MEMBERSHIP_TOL)?;
    fsb_project(&psi.mul(big_f)?, sigma, params)
}

/// The Toeplitz operator seen after peeling: the Bergman-kernel integral
/// `|ℏ| ∫ ψ(w) G(w) e^{2α(u·conj w − |w|²)} dw` with `u = x + iτy`,
/// `α = π|ℏ|/(2τ)` (conjugated for `ℏ < 0`).
pub fn toeplitz_peeled(psi: &Field, g: &Field, tau: f64, params: &Params) -> Result<Field> {
    require_phase_2d(psi)?;
    psi.require_same_grid(g)?;
    let spec = psi.spec;
    let n = spec.points;
    let d = spec.spacing();
    let hb = params.hbar;
    let alpha = PI * hb.abs() / (2.0 * tau);
    let zeta = |i: usize, j: usize| {
        let z = C64::new(spec.coord(i), tau * spec.coord(j));
        if hb < 0.0 {
            z.conj()
        } else {
            z
        }
    };
    let weights: Vec<(C64, C64)> = (0..n * n)
        .map(|k| {
            let w = zeta(k / n, k % n);
            (w.conj(), psi.values[k] * g.values[k] * (-2.0 * alpha * w.norm_sqr()).exp())
        })
        .collect();
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let u = zeta(k / n, k % n);
            let s: C64 = weights.iter().filter(|(_, c)| *c != ZERO).map(|(wb, c)| c * (u * wb * (2.0 * alpha)).exp()).sum();
            s * (hb.abs() * d * d)
        })
        .collect();
    Field::from_values(spec, values)
}

/// `V(ξ, u) = ∫ φ_ς(u + s/2) conj φ_τ(u − s/2) e^{−πiℏξs} ds`, the Weyl
/// symbol of `|φ_ς⟩⟨φ_τ|` in closed form.
fn vacuum_cross_symbol(xi: f64, u: f64, tau: f64, sigma: f64, hbar: f64) -> C64 {
    let hb = hbar.abs();
    let (al, be) = (PI * hb / sigma, PI * hb / tau);
    let big_a = (al + be) / 4.0;
    let big_b = C64::new((al - be) * u, PI * hbar * xi);
    let pre = (2.0 * hb / sigma).powf(0.25) * (2.0 * hb / tau).powf(0.25) * (PI / big_a).sqrt();
    (big_b * big_b / (4.0 * big_a) - (al + be) * u * u).exp() * pre
}

/// The Weyl symbol `a_ψ` with `⟨T_ψ W_τ f, W_ς g⟩ = ⟨Op(a_ψ) f, g⟩`:
/// `a_ψ(ξ, x) = ∫∫ ψ(q, p) V(ξ + 2p, x − q) dq dp`, a Gaussian smoothing of
/// `ψ` whose kernel is the Weyl symbol `V` of `|φ_ς⟩⟨φ_τ|`.
pub fn guillemin_symbol(psi: &Field, tau: f64, sigma: f64, params: &Params) -> Result<PdoSymbol> {
    require_phase_2d(psi)?;
    let spec = psi.spec;
    let n = spec.points;
    let d = spec.spacing();
    let l = spec.extent;
    // table[a][b] = V(−3L + aΔ, (b − N)Δ)
    let table: Vec<C64> = (0..3 * n * 2 * n)
        .map(|k| {
            let (a, b) = (k / (2 * n), k % (2 * n));
            vacuum_cross_symbol(-3.0 * l + a as f64 * d, (b as f64 - n as f64) * d, tau, sigma, params.hbar)
        })
        .collect();
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (s, xk) = (k / n, k % n);
            let mut acc = ZERO;
            for i in 0..n {
                let b = xk + n - i;
                for j in 0..n {
                    let p = psi.values[i * n + j];
                    if p != ZERO {
                        acc += p * table[(s + 2 * j) * 2 * n + b];
                    }
                }
            }
            acc * (d * d)
        })
        .collect();
    Field::from_values(spec, values)
}

/// `f(2p)` with zero fill where `2p` leaves the grid.
pub(crate) fn dilate2(f: &Field) -> Field {
    let spec = f.spec;
    let n = spec.points as i64;
    let mut idx = vec![0usize; spec.dim];
    let mut out = Field::zeros(spec);
    for (k, v) in out.values.iter_mut().enumerate() {
        spec.unravel(k, &mut idx);
        let mut ok = true;
        for i in idx.iter_mut() {
            let j = 2 * *i as i64 - n / 2;
            ok &= (0..n).contains(&j);
            *i = j.max(0) as usize;
        }
        if ok {
            *v = f.values[spec.ravel(&idx)];
        }
    }
    out
}

/// `k_ψ = (2ℏ)^n Φ_τ ⌢ψ(2·)`, the relative-convolution kernel with
/// `Λ(k_ψ) F = P_τ(ψ F)` on `F_τ`.
pub fn toeplitz_conv_kernel(psi: &Field, tau: f64, params: &Params) -> Result<Field> {
    require_phase_2d(psi)?;
    let phi = crate::fsb::fsb_gaussian(tau, params, &psi.spec)?;
    let dual = dilate2(&symplectic_fourier(psi, params)?);
    Ok(phi.mul(&dual)?.scale(real(2.0 * params.hbar)))
}

/// `⟨φ_ς, φ_τ⟩ = (4τς/(τ+ς)²)^{1/4}`, the value of [`guillemin_symbol`] for
/// `ψ ≡ 1` away from the grid edge.
pub fn guillemin_calibration(tau: f64, sigma: f64) -> f64 {
    (4.0 * tau * sigma / ((tau + sigma) * (tau + sigma))).powf(0.25)
}

/// Unit vacuum window on the Fourier–Wigner configuration grid of `phase`.
pub fn vacuum_window(tau: f64, params: &Params, phase: &GridSpec) -> Result<Window> {
    Window::new(gaussian_vacuum(tau, params, &phase.wigner_config()?)?)
}
