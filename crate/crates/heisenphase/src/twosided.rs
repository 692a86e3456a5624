//! Two-sided relative convolutions `D(k) = ∫∫ k(p1, p2) Λ(0,p1) R(0,p2) dp1 dp2`.
//!
//! Kernels live on `R^4` with axes `(x1, y1, x2, y2)` and act on phase-space
//! functions of one degree of freedom. Kernels carrying a delta are kept in
//! structured forms that collapse to one-sided integrals. Each form also
//! densifies onto the `R^4` lattice, a delta becoming a unit-mass spike; the
//! lattice Riemann sums then collapse exactly, so the dense path serves as
//! the oracle for the structured ones.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::calculus::{dilate2, integrated, integrated_terms, DenseOperator};
use crate::error::{Error, Result};
use crate::fsb::fsb_gaussian;
use crate::grid::{io, spectral_derivative, Field, GridSpec};
use crate::group::{GroupElement, Params};
use crate::reps::RepTag;
use crate::transforms::{apply_axis, require_phase_2d, swap_axes, symplectic_fourier, symplectic_fourier_pairs, twisted_sum};
use crate::C64;

/// Largest `N` for which kernels are densified on `R^4`.
pub const DENSE_TWOSIDED_CAP: usize = 32;
/// Largest `N` for the FFT evaluation of `⊛`.
pub const COMPOSE_CAP: usize = 16;
/// Largest `N` for the direct `O(N^8)` evaluation of `⊛`.
pub const DIRECT_COMPOSE_CAP: usize = 8;
/// Quotients in [`symbol_from_kernel`] use samples whose Gaussian factor
/// exceeds this fraction of its maximum.
pub const QUOTIENT_FLOOR: f64 = 1e-3;
/// Residual below which [`symbol_from_kernel`] accepts a kernel.
pub const RECOVERY_TYPE_TOL: f64 = 1e-4;

const ZERO: C64 = C64::new(0.0, 0.0);

fn real(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn cis(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

fn omega(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// A kernel on `R^4`, dense or in one of the structured forms.
#[derive(Clone, Debug, PartialEq)]
pub enum TwoSidedKernel {
    /// Samples on the `R^4` grid, axes `(x1, y1, x2, y2)`.
    Dense(Field),
    /// `k ⊗ δ`, so that `D = Λ(k)`.
    LeftOnly(Field),
    /// `δ ⊗ k`, so that `D = R(k)`.
    RightOnly(Field),
    /// `w(2p1) δ(p1 − p2)`, a multiplication operator.
    DiagonalDelta(Field),
    /// `w(p1) e^{πiℏ(x1y2 − y1x2)} v(p2 − p1)`, the Toeplitz form.
    ModulatedProduct { w: Field, v: Field },
}

impl TwoSidedKernel {
    /// The phase grid the kernel acts on.
    pub fn phase_grid(&self) -> Result<GridSpec> {
        match self {
            TwoSidedKernel::Dense(k) => {
                if k.spec.dim != 4 {
                    return Err(Error::Dimension { expected: 4, found: k.spec.dim });
                }
                GridSpec::new(2, k.spec.extent, k.spec.points)
            }
            TwoSidedKernel::LeftOnly(k) | TwoSidedKernel::RightOnly(k) | TwoSidedKernel::DiagonalDelta(k) => {
                require_phase_2d(k)?;
                Ok(k.spec)
            }
            TwoSidedKernel::ModulatedProduct { w, v } => {
                require_phase_2d(w)?;
                w.require_same_grid(v)?;
                Ok(w.spec)
            }
        }
    }

    pub fn form_name(&self) -> &'static str {
        match self {
            TwoSidedKernel::Dense(_) => "dense",
            TwoSidedKernel::LeftOnly(_) => "left_only",
            TwoSidedKernel::RightOnly(_) => "right_only",
            TwoSidedKernel::DiagonalDelta(_) => "diagonal_delta",
            TwoSidedKernel::ModulatedProduct { .. } => "modulated_product",
        }
    }

    /// The kernel of multiplication by `ψ`: `DiagonalDelta(2ℏ ⌢ψ)`.
    pub fn multiplication(psi: &Field, params: &Params) -> Result<Self> {
        require_phase_2d(psi)?;
        Ok(TwoSidedKernel::DiagonalDelta(symplectic_fourier(psi, params)?.scale(real(2.0 * params.hbar))))
    }

    /// A spike of unit mass at the origin of the phase grid.
    pub fn delta(phase: GridSpec) -> Result<Field> {
        let n = phase.points;
        let mut f = Field::zeros(phase);
        f.values[phase.ravel(&vec![n / 2; phase.dim])] = real(1.0 / phase.cell());
        Ok(f)
    }

    pub fn scale(&self, c: C64) -> Self {
        match self {
            TwoSidedKernel::Dense(k) => TwoSidedKernel::Dense(k.scale(c)),
            TwoSidedKernel::LeftOnly(k) => TwoSidedKernel::LeftOnly(k.scale(c)),
            TwoSidedKernel::RightOnly(k) => TwoSidedKernel::RightOnly(k.scale(c)),
            TwoSidedKernel::DiagonalDelta(w) => TwoSidedKernel::DiagonalDelta(w.scale(c)),
            TwoSidedKernel::ModulatedProduct { w, v } => TwoSidedKernel::ModulatedProduct { w: w.scale(c), v: v.clone() },
        }
    }

    /// Samples on the `R^4` grid with deltas as unit-mass spikes.
    pub fn densify(&self, params: &Params) -> Result<Field> {
        let phase = self.phase_grid()?;
        let n = phase.points;
        if n > DENSE_TWOSIDED_CAP {
            return Err(Error::SizeCap(format!("dense two-sided kernels need N <= {DENSE_TWOSIDED_CAP}, got {n}")));
        }
        let spec = r4(phase)?;
        let h = n / 2;
        let spike = 1.0 / phase.cell();
        let at = |i1: usize, j1: usize, i2: usize, j2: usize| ((i1 * n + j1) * n + i2) * n + j2;
        let mut out = Field::zeros(spec);
        match self {
            TwoSidedKernel::Dense(k) => return Ok(k.clone()),
            TwoSidedKernel::LeftOnly(k) => {
                for (idx, v) in k.values.iter().enumerate() {
                    out.values[at(idx / n, idx % n, h, h)] = v * spike;
                }
            }
            TwoSidedKernel::RightOnly(k) => {
                for (idx, v) in k.values.iter().enumerate() {
                    out.values[at(h, h, idx / n, idx % n)] = v * spike;
                }
            }
            TwoSidedKernel::DiagonalDelta(w) => {
                for (idx, v) in dilate2(w).values.iter().enumerate() {
                    out.values[at(idx / n, idx % n, idx / n, idx % n)] = v * spike;
                }
            }
            TwoSidedKernel::ModulatedProduct { w, v } => {
                let c = phase.coords();
                let hb = params.hbar;
                out.values.par_chunks_mut(n * n).enumerate().for_each(|(p1, block)| {
                    let (i1, j1) = (p1 / n, p1 % n);
                    let wv = w.values[p1];
                    if wv == ZERO {
                        return;
                    }
                    for (p2, o) in block.iter_mut().enumerate() {
                        let (i2, j2) = (p2 / n, p2 % n);
                        let (a, b) = (i2 + h, j2 + h);
                        if a < i1 || b < j1 || a - i1 >= n || b - j1 >= n {
                            continue;
                        }
                        let ph = PI * hb * omega([c[i1], c[j1]], [c[i2], c[j2]]);
                        *o = wv * cis(ph) * v.values[(a - i1) * n + (b - j1)];
                    }
                });
            }
        }
        Ok(out)
    }
}

fn r4(phase: GridSpec) -> Result<GridSpec> {
    GridSpec::new(4, phase.extent, phase.points)
}

fn require_r4(k: &Field) -> Result<GridSpec> {
    if k.spec.dim != 4 {
        return Err(Error::Dimension { expected: 4, found: k.spec.dim });
    }
    if k.spec.points > DENSE_TWOSIDED_CAP {
        return Err(Error::SizeCap(format!("dense two-sided kernels need N <= {DENSE_TWOSIDED_CAP}")));
    }
    GridSpec::new(2, k.spec.extent, k.spec.points)
}

/// Nonzero samples of a dense kernel as `(i1, j1, i2, j2, value)`.
fn support(k: &Field) -> Vec<([usize; 4], C64)> {
    let n = k.spec.points;
    let tiny = 1e-300_f64.max(1e-18 * k.max_abs());
    k.values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > tiny)
        .map(|(idx, v)| ([idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n], *v))
        .collect()
}

/// `m(q) = Δ² Σ_p w(p) e^{2πiℏ ω(p, q)}`, the multiplier of
/// `Σ_p w(p) Λ(p)R(p)`.
pub(crate) fn doubled_multiplier(w: &Field, hbar: f64) -> Field {
    let spec = w.spec;
    let n = spec.points;
    let c = spec.coords();
    let d = spec.spacing();
    // pass 1 over y: e^{−2πiℏ p_y q_x}; pass 2 over x: e^{2πiℏ p_x q_y}
    let by: Vec<C64> = (0..n * n).map(|k| cis(-2.0 * PI * hbar * c[k / n] * c[k % n])).collect();
    let ax: Vec<C64> = by.iter().map(|z| z.conj()).collect();
    let mut t = w.clone();
    apply_axis(&mut t, 1, &by);
    apply_axis(&mut t, 0, &ax);
    // t[qy][qx] after the passes; swap to (qx, qy)
    swap_axes(&t, 0, 1).scale(real(d * d))
}

/// `D(k) F`. Structured forms use their collapsed fast paths; `Dense`
/// kernels the lattice Riemann sum of [`apply_dense`].
pub fn apply(k: &TwoSidedKernel, big_f: &Field, params: &Params) -> Result<Field> {
    let phase = k.phase_grid()?;
    require_phase_2d(big_f)?;
    if !big_f.spec.same_as(&phase) {
        return Err(Error::Grid("kernel and function live on different grids".into()));
    }
    match k {
        TwoSidedKernel::Dense(d) => apply_dense(d, big_f, params),
        TwoSidedKernel::LeftOnly(a) => integrated(RepTag::LeftPulled, a, big_f, params),
        TwoSidedKernel::RightOnly(a) => integrated(RepTag::RightPulled, a, big_f, params),
        TwoSidedKernel::DiagonalDelta(w) => big_f.mul(&doubled_multiplier(&dilate2(w), params.hbar)),
        // Σ w(p1) Λ(p1) R(v) R(p1) = R(v) ∘ (multiplication by m_w)
        TwoSidedKernel::ModulatedProduct { w, v } => {
            let m = doubled_multiplier(w, params.hbar);
            integrated(RepTag::RightPulled, v, &big_f.mul(&m)?, params)
        }
    }
}

/// `Δ^4 Σ k(p1,p2) [Λ(p1)R(p2)F](q)` with `F` zero off the grid.
pub fn apply_dense(k: &Field, big_f: &Field, params: &Params) -> Result<Field> {
    let phase = require_r4(k)?;
    if !big_f.spec.same_as(&phase) {
        return Err(Error::Grid("kernel and function live on different grids".into()));
    }
    let n = phase.points as i64;
    let c = phase.coords();
    let hb = params.hbar;
    let cell = phase.cell() * phase.cell();
    let terms = support(k);
    let values = (0..(n * n) as usize)
        .into_par_iter()
        .map(|q| {
            let (a, b) = ((q as i64) / n, (q as i64) % n);
            let qc = [c[a as usize], c[b as usize]];
            let mut acc = ZERO;
            for ([i1, j1, i2, j2], v) in &terms {
                let (s, t) = (a - *i1 as i64 + *i2 as i64, b - *j1 as i64 + *j2 as i64);
                if !(0..n).contains(&s) || !(0..n).contains(&t) {
                    continue;
                }
                let p1 = [c[*i1], c[*j1]];
                let p2 = [c[*i2], c[*j2]];
                let ph = omega(p1, qc) + omega(p2, [qc[0] - p1[0], qc[1] - p1[1]]);
                acc += v * cis(PI * hb * ph) * big_f.values[(s * n + t) as usize];
            }
            acc * cell
        })
        .collect();
    Field::from_values(phase, values)
}

/// The Schwartz kernel `K` of `D(k)` on the phase grid:
/// `K(q, q') = Δ² Σ_{p1} k(p1, p1 + q' − q) e^{πiℏ(ω(p1,q) + ω(p2, q − p1))}`.
pub fn schwartz_from_twosided(k: &TwoSidedKernel, params: &Params) -> Result<DenseOperator> {
    let dense = k.densify(params)?;
    let phase = require_r4(&dense)?;
    let n = phase.points;
    let side = n * n;
    if side > crate::calculus::DENSE_CAP {
        return Err(Error::SizeCap(format!("Schwartz kernels need N^2 <= {}", crate::calculus::DENSE_CAP)));
    }
    let c = phase.coords();
    let hb = params.hbar;
    let cell = phase.cell();
    let terms = support(&dense);
    let ni = n as i64;
    let rows: Vec<Vec<C64>> = (0..side)
        .into_par_iter()
        .map(|q| {
            let (a, b) = (q / n, q % n);
            let qc = [c[a], c[b]];
            let mut row = vec![ZERO; side];
            for ([i1, j1, i2, j2], v) in &terms {
                let (s, t) = (a as i64 - *i1 as i64 + *i2 as i64, b as i64 - *j1 as i64 + *j2 as i64);
                if !(0..ni).contains(&s) || !(0..ni).contains(&t) {
                    continue;
                }
                let p1 = [c[*i1], c[*j1]];
                let p2 = [c[*i2], c[*j2]];
                let ph = omega(p1, qc) + omega(p2, [qc[0] - p1[0], qc[1] - p1[1]]);
                row[(s * ni + t) as usize] += v * cis(PI * hb * ph) * cell;
            }
            row
        })
        .collect();
    DenseOperator::new(phase, rows.concat())
}

/// Inverts [`schwartz_from_twosided`] for kernels supported in
/// `|x1|, |y1| < L/2` and `|p2 − p1| ≤ L`.
///
/// Along each diagonal `q' = q + p` the Schwartz kernel is a DFT of
/// `k(·, · + p)` at doubled frequency, which only resolves `p1` modulo `L`;
/// the recovered kernel is placed in the central half of the `p1` range.
/// Needs a self-dual grid.
pub fn twosided_from_schwartz(big_k: &DenseOperator, params: &Params) -> Result<TwoSidedKernel> {
    let phase = big_k.spec;
    if phase.dim != 2 {
        return Err(Error::Dimension { expected: 2, found: phase.dim });
    }
    if phase.points > DENSE_TWOSIDED_CAP {
        return Err(Error::SizeCap(format!("dense two-sided kernels need N <= {DENSE_TWOSIDED_CAP}")));
    }
    if !phase.is_self_dual(params.hbar) {
        return Err(Error::Grid("kernel recovery needs a self-dual grid".into()));
    }
    let n = phase.points;
    let h = n / 2;
    let d = phase.spacing();
    let c = phase.coords();
    let hb = params.hbar;
    let side = n * n;
    let spec = r4(phase)?;
    let norm = 1.0 / (d * d * (h * h) as f64);
    let twiddle = |k: i64| cis(2.0 * PI * k as f64 / h as f64);
    let offsets: Vec<(i64, i64)> = (-(h as i64)..=h as i64)
        .flat_map(|da| (-(h as i64)..=h as i64).map(move |db| (da, db)))
        .collect();
    let blocks: Vec<Vec<(usize, C64)>> = offsets
        .par_iter()
        .map(|&(da, db)| {
            let p = [da as f64 * d, db as f64 * d];
            let a0 = (-da).max(0) as usize;
            let b0 = (-db).max(0) as usize;
            // G(a, b) on an h×h window of the diagonal
            let g: Vec<C64> = (0..h * h)
                .map(|k| {
                    let (a, b) = (a0 + k / h, b0 + k % h);
                    let q = a * n + b;
                    let qp = ((a as i64 + da) * n as i64 + b as i64 + db) as usize;
                    big_k.matrix[q * side + qp] * cis(-PI * hb * omega(p, [c[a], c[b]]))
                })
                .collect();
            let mut out = Vec::new();
            for i in h / 2..h / 2 + h {
                // S[a][i] = Σ_b G(a,b) e^{−2πi·i·b/h}
                let s: Vec<C64> = (0..h)
                    .map(|ka| (0..h).map(|kb| g[ka * h + kb] * twiddle(-((i * (b0 + kb)) as i64))).sum())
                    .collect();
                for j in h / 2..h / 2 + h {
                    let (i2, j2) = (i as i64 + da, j as i64 + db);
                    if !(0..n as i64).contains(&i2) || !(0..n as i64).contains(&j2) {
                        continue;
                    }
                    let hv: C64 = (0..h).map(|ka| s[ka] * twiddle((j * (a0 + ka)) as i64)).sum::<C64>() * norm;
                    let val = hv * cis(-PI * hb * omega([c[i], c[j]], p));
                    out.push((((i * n + j) * n + i2 as usize) * n + j2 as usize, val));
                }
            }
            out
        })
        .collect();
    let mut k = Field::zeros(spec);
    for block in blocks {
        for (idx, v) in block {
            k.values[idx] = v;
        }
    }
    Ok(TwoSidedKernel::Dense(k))
}

/// The kernel of `D(k1) ∘ D(k2)`:
/// `(k1 ⊛ k2)(P1, P2) = ∫∫ k1(p1,p2) k2(P1−p1, P2−p2) e^{πiℏ(ω(p1,P1) − ω(p2,P2))}`,
/// a twisted convolution in the first pair and a conjugate-twisted one in the
/// second. Pure left or pure right pairs stay structured.
pub fn compose(k1: &TwoSidedKernel, k2: &TwoSidedKernel, params: &Params) -> Result<TwoSidedKernel> {
    let phase = k1.phase_grid()?;
    if !k2.phase_grid()?.same_as(&phase) {
        return Err(Error::Grid("kernels live on different grids".into()));
    }
    match (k1, k2) {
        (TwoSidedKernel::LeftOnly(a), TwoSidedKernel::LeftOnly(b)) => {
            return Ok(TwoSidedKernel::LeftOnly(twisted_sum(a, b, params.hbar)?))
        }
        (TwoSidedKernel::RightOnly(a), TwoSidedKernel::RightOnly(b)) => {
            return Ok(TwoSidedKernel::RightOnly(twisted_sum(a, b, -params.hbar)?))
        }
        _ => {}
    }
    if phase.points > COMPOSE_CAP {
        return Err(Error::SizeCap(format!("compose needs N <= {COMPOSE_CAP}, got {}", phase.points)));
    }
    if !phase.is_self_dual(params.hbar) {
        return Err(Error::Grid("compose needs a self-dual grid".into()));
    }
    let d1 = k1.densify(params)?;
    let d2 = k2.densify(params)?;
    Ok(TwoSidedKernel::Dense(compose_fft(&d1, &d2, params.hbar)?))
}

/// 2-d FFT of an `m × m` row-major array in place.
fn fft2(buf: &mut [C64], m: usize, inverse: bool, planner: &mut FftPlanner<f64>) {
    let plan = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
    for row in buf.chunks_mut(m) {
        plan.process(row);
    }
    let mut col = vec![ZERO; m];
    for j in 0..m {
        for i in 0..m {
            col[i] = buf[i * m + j];
        }
        plan.process(&mut col);
        for i in 0..m {
            buf[i * m + j] = col[i];
        }
    }
}

/// `⊛` on dense kernels. For fixed `(X1, X2)` and `(x1, x2)` the sum over
/// `(y1, y2)` is a linear convolution; the modulations in `y` and `Y` are
/// exact bin shifts of a `2N`-point DFT, so all `(x1, x2)` terms accumulate
/// in the frequency domain before one inverse transform.
fn compose_fft(d1: &Field, d2: &Field, hbar: f64) -> Result<Field> {
    let phase = require_r4(d1)?;
    d1.require_same_grid(d2)?;
    let n = phase.points;
    let h = n / 2;
    let m = 2 * n;
    let c = phase.coords();
    let cell2 = phase.cell() * phase.cell();
    // e^{πiℏ c_i c_J} = kk[i] ζ^{(2i−N)J}, ζ = e^{2πi/M}
    let kk: Vec<C64> = (0..n).map(|i| cis(PI * hbar * c[i] * c[0])).collect();
    let shift = |i: usize| (2 * i as i64 - n as i64).rem_euclid(m as i64) as usize;
    let slice_fft = |src: &Field, i1: usize, i2: usize, centred: bool, planner: &mut FftPlanner<f64>| {
        let mut buf = vec![ZERO; m * m];
        for j1 in 0..n {
            for j2 in 0..n {
                let v = src.values[((i1 * n + j1) * n + i2) * n + j2];
                let (r, s) = if centred { ((j1 + m - h) % m, (j2 + m - h) % m) } else { (j1, j2) };
                buf[r * m + s] = v;
            }
        }
        fft2(&mut buf, m, false, planner);
        buf
    };
    let spectra = |src: &Field, centred: bool| -> Vec<Vec<C64>> {
        (0..n * n)
            .into_par_iter()
            .map_init(FftPlanner::new, |pl, idx| slice_fft(src, idx / n, idx % n, centred, pl))
            .collect()
    };
    let a_hat = spectra(d1, false);
    let b_hat = spectra(d2, true);
    let blocks: Vec<Vec<C64>> = (0..n * n)
        .into_par_iter()
        .map_init(FftPlanner::new, |pl, big| {
            let (bi1, bi2) = (big / n, big % n);
            let (s_b1, s_b2) = (shift(bi1), shift(bi2));
            let mut acc = vec![ZERO; m * m];
            for i1 in 0..n {
                let a1 = bi1 as i64 - i1 as i64 + h as i64;
                if !(0..n as i64).contains(&a1) {
                    continue;
                }
                for i2 in 0..n {
                    let a2 = bi2 as i64 - i2 as i64 + h as i64;
                    if !(0..n as i64).contains(&a2) {
                        continue;
                    }
                    let ah = &a_hat[i1 * n + i2];
                    let bh = &b_hat[a1 as usize * n + a2 as usize];
                    let pre = kk[i1] * kk[i2].conj() * kk[bi1].conj() * kk[bi2];
                    let (s1, s2) = (shift(i1), shift(i2));
                    for nu1 in 0..m {
                        let r_b = (nu1 + m - s1) % m;
                        let r_a = (r_b + s_b1) % m;
                        let (row_a, row_b) = (&ah[r_a * m..(r_a + 1) * m], &bh[r_b * m..(r_b + 1) * m]);
                        let out = &mut acc[nu1 * m..(nu1 + 1) * m];
                        for (nu2, o) in out.iter_mut().enumerate() {
                            let c_b = (nu2 + s2) % m;
                            let c_a = (c_b + m - s_b2) % m;
                            *o += pre * row_a[c_a] * row_b[c_b];
                        }
                    }
                }
            }
            fft2(&mut acc, m, true, pl);
            let scale = cell2 / (m * m) as f64;
            let mut block = vec![ZERO; n * n];
            for j1 in 0..n {
                for j2 in 0..n {
                    block[j1 * n + j2] = acc[j1 * m + j2] * scale;
                }
            }
            block
        })
        .collect();
    let mut out = Field::zeros(d1.spec);
    for (big, block) in blocks.into_iter().enumerate() {
        let (bi1, bi2) = (big / n, big % n);
        for j1 in 0..n {
            for j2 in 0..n {
                out.values[((bi1 * n + j1) * n + bi2) * n + j2] = block[j1 * n + j2];
            }
        }
    }
    Ok(out)
}

/// `⊛` as a direct sum with the phase written in the doubled-group
/// coordinates `(x1, x2', y1, y2') = (x1, υy2, y1, x2/υ)`, where it becomes
/// the plain `H^2` twist `e^{πiℏ ω_4}`. Limited to `N ≤ 8`.
pub fn compose_direct(k1: &TwoSidedKernel, k2: &TwoSidedKernel, upsilon: f64, params: &Params) -> Result<Field> {
    let phase = k1.phase_grid()?;
    if phase.points > DIRECT_COMPOSE_CAP {
        return Err(Error::SizeCap(format!("direct compose needs N <= {DIRECT_COMPOSE_CAP}")));
    }
    if !(upsilon.is_finite() && upsilon > 0.0) {
        return Err(Error::Param(format!("upsilon must be positive, got {upsilon}")));
    }
    let d1 = k1.densify(params)?;
    let d2 = k2.densify(params)?;
    d1.require_same_grid(&d2)?;
    let n = phase.points;
    let h = n / 2;
    let c = phase.coords();
    let hb = params.hbar;
    let cell2 = phase.cell() * phase.cell();
    let xi = |i1: usize, j1: usize, i2: usize, j2: usize| [c[i1], upsilon * c[j2], c[j1], c[i2] / upsilon];
    let t1 = support(&d1);
    let values = (0..n.pow(4))
        .into_par_iter()
        .map(|big| {
            let bi = [big / (n * n * n), (big / (n * n)) % n, (big / n) % n, big % n];
            let gb = xi(bi[0], bi[1], bi[2], bi[3]);
            let mut acc = ZERO;
            for (pi, v) in &t1 {
                let mut idx = [0usize; 4];
                let mut ok = true;
                for a in 0..4 {
                    let r = bi[a] as i64 - pi[a] as i64 + h as i64;
                    ok &= (0..n as i64).contains(&r);
                    idx[a] = r.max(0) as usize;
                }
                if !ok {
                    continue;
                }
                let w = d2.values[((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3]];
                if w == ZERO {
                    continue;
                }
                let g = xi(pi[0], pi[1], pi[2], pi[3]);
                let w4 = g[0] * gb[2] - g[2] * gb[0] + g[1] * gb[3] - g[3] * gb[1];
                acc += v * w * cis(PI * hb * w4);
            }
            acc * cell2
        })
        .collect();
    Field::from_values(d1.spec, values)
}

/// `‖D(k)F − Ξ̃(k∘B)F‖ / ‖F‖`, the dense Riemann sum against the integrated
/// doubled-group representation over the same lattice terms.
pub fn xi_reduction_check(k: &TwoSidedKernel, big_f: &Field, params: &Params) -> Result<f64> {
    let dense = k.densify(params)?;
    let phase = require_r4(&dense)?;
    let lhs = apply_dense(&dense, big_f, params)?;
    let c = phase.coords();
    let u = params.upsilon;
    let cell2 = phase.cell() * phase.cell();
    let terms: Vec<(GroupElement, C64)> = support(&dense)
        .into_iter()
        .map(|([i1, j1, i2, j2], v)| {
            let g = GroupElement { s: 0.0, x: vec![c[i1], u * c[j2]], y: vec![c[j1], c[i2] / u] };
            (g, v * cell2)
        })
        .collect();
    let rhs = integrated_terms(RepTag::XiTilde, &terms, big_f, params)?;
    let nf = big_f.norm();
    Ok(if nf == 0.0 { 0.0 } else { lhs.sub(&rhs)?.norm() / nf })
}

/// `k#(p1, p2) = 2ℏ|ℏ| ⌢ψ(2p1) [Λ(p1)Φ_ς](p2)`, the kernel with
/// `D(k#) F = P_ς(ψF)`. It does not depend on `τ`; `F_τ` only enters as the
/// domain.
pub fn cross_toeplitz_kernel(psi: &Field, tau: f64, sigma: f64, params: &Params) -> Result<TwoSidedKernel> {
    require_phase_2d(psi)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Param(format!("tau must be positive, got {tau}")));
    }
    let hb = params.hbar;
    let w = dilate2(&symplectic_fourier(psi, params)?).scale(real(2.0 * hb * hb.abs()));
    let v = fsb_gaussian(sigma, params, &psi.spec)?;
    Ok(TwoSidedKernel::ModulatedProduct { w, v })
}

/// A Weyl symbol for operators on `L²(R²)`, axes `(x1, x2, y1, y2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubledSymbol {
    pub values: Field,
}

impl DoubledSymbol {
    /// `max |self − other| / max |other|`.
    pub fn rel_max_dist(&self, other: &DoubledSymbol) -> Result<f64> {
        Ok(self.values.max_dist(&other.values)? / other.values.max_abs())
    }
}

/// Whether `(υy2, x2/υ)` lies in `[−L, L)²`. A lattice Fourier sum is
/// `2L`-periodic, so doubled symbols are only meaningful there and are
/// set to zero elsewhere.
pub fn in_doubled_chart(spec: &GridSpec, upsilon: f64, x2: f64, y2: f64) -> bool {
    let inside = |t: f64| t >= -spec.extent - 1e-12 && t < spec.extent - 1e-12;
    inside(upsilon * y2) && inside(x2 / upsilon)
}

/// `a(x1, x2, y1, y2) = ⌢k(x1, y1, υy2, x2/υ)` on the chart of
/// [`in_doubled_chart`]. The second pair is transformed straight onto the
/// reparametrized points, so no interpolation is involved for any `υ`.
pub fn doubled_pdo_symbol(k: &TwoSidedKernel, params: &Params) -> Result<DoubledSymbol> {
    let dense = k.densify(params)?;
    let phase = require_r4(&dense)?;
    let n = phase.points;
    let c = phase.coords();
    let d = phase.spacing();
    let (hb, u) = (params.hbar, params.upsilon);
    let mut g = symplectic_fourier_pairs(&dense, &[(0, 1)], hb)?;
    // axis 2 (x2') → index a with Y2 = c_a/υ; axis 3 (y2') → index b with X2 = υ c_b
    let chart = |t: f64| if in_doubled_chart(&phase, 1.0, t, t) { 1.0 } else { 0.0 };
    let along_x: Vec<C64> =
        (0..n * n).map(|k| cis(PI * hb * c[k / n] * c[k % n] / u) * chart(c[k % n] / u)).collect();
    let along_y: Vec<C64> =
        (0..n * n).map(|k| cis(-PI * hb * c[k / n] * c[k % n] * u) * chart(c[k % n] * u)).collect();
    apply_axis(&mut g, 2, &along_x);
    apply_axis(&mut g, 3, &along_y);
    let values = swap_axes(&g, 1, 2).scale(real(hb / 2.0 * d * d));
    Ok(DoubledSymbol { values })
}

/// Band-limited interpolation of a phase-space field onto the grid of half
/// the spacing, with the coordinates of the new grid. Even samples are the
/// originals; the Nyquist bin is split evenly between `±N/2`.
pub fn refine2(f: &Field) -> Result<(Field, Vec<f64>)> {
    require_phase_2d(f)?;
    let n = f.spec.points;
    let m = 2 * n;
    let h = n / 2;
    let mut planner = FftPlanner::new();
    let mut buf = f.values.clone();
    fft2(&mut buf, n, false, &mut planner);
    let mut up = vec![ZERO; m * m];
    // source bin → destination bins with weights
    let place = |s: usize| -> Vec<(usize, f64)> {
        match s.cmp(&h) {
            std::cmp::Ordering::Less => vec![(s, 1.0)],
            std::cmp::Ordering::Equal => vec![(h, 0.5), (m - h, 0.5)],
            std::cmp::Ordering::Greater => vec![(s + n, 1.0)],
        }
    };
    for si in 0..n {
        for sj in 0..n {
            for (di, wi) in place(si) {
                for (dj, wj) in place(sj) {
                    up[di * m + dj] += buf[si * n + sj] * (wi * wj);
                }
            }
        }
    }
    fft2(&mut up, m, true, &mut planner);
    let norm = 1.0 / (n * n) as f64;
    let spec = GridSpec::new(2, f.spec.extent, m)?;
    let coords = spec.coords();
    Ok((Field::from_values(spec, up.into_iter().map(|v| v * norm).collect())?, coords))
}

/// `ψ` folded to its `L`-periodization on the cell `[−L, 0)²`, sampled at
/// half the grid spacing through [`refine2`]. A lattice kernel built from
/// `⌢ψ(2p)` only sees this periodization. Returns the samples (row-major,
/// `N × N`) and the cell coordinates.
fn periodized_cell(psi: &Field) -> Result<(Vec<C64>, Vec<f64>)> {
    let n = psi.spec.points;
    let (fine, cq) = refine2(psi)?;
    let m = 2 * n;
    let cell = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            [(0, 0), (0, n), (n, 0), (n, n)].iter().map(|&(a, b)| fine.values[(i + a) * m + j + b]).sum()
        })
        .collect();
    Ok((cell, cq[..n].to_vec()))
}

/// Number of period images needed on each side so that a Gaussian
/// `e^{−κ(q−c)²}` centred anywhere in `[−L, L)` is summed to below `e^{−40}`.
fn image_count(kappa: f64, period: f64) -> i64 {
    (1.5 + (40.0 / kappa).sqrt() / period).ceil() as i64
}

/// `a#(x1,x2,y1,y2) = ℏ²|ℏ| ∫ ψ(q) [Λ(2q − X1)Φ_ς](X2) dq` with `X1 = (x1,y1)`,
/// `X2 = (υy2, x2/υ)`, the symbol of `D(k#)` evaluated as an integral over
/// `ψ`, zero off the chart of [`in_doubled_chart`]. `ψ` enters through its
/// `L`-periodization (see [`symbol_from_kernel`]): the sum runs over one
/// period cell against the periodized Gaussian factor. The integrand
/// oscillates at `ℏ|X2|`, up to the Nyquist rate of the grid itself, so the
/// cell is sampled at half spacing. Both the Gaussian and the phase split
/// over `q_x` and `q_y`, which brings the cost down to `O(N^5)`.
pub fn cross_toeplitz_pdo_symbol(psi: &Field, tau: f64, sigma: f64, params: &Params) -> Result<DoubledSymbol> {
    require_phase_2d(psi)?;
    if !(tau > 0.0 && sigma > 0.0) {
        return Err(Error::Param("squeezes must be positive".into()));
    }
    let phase = psi.spec;
    let n = phase.points;
    if n > DENSE_TWOSIDED_CAP {
        return Err(Error::SizeCap(format!("doubled symbols need N <= {DENSE_TWOSIDED_CAP}")));
    }
    let c = phase.coords();
    let (cell, cq) = periodized_cell(psi)?;
    let dq = phase.spacing() / 2.0;
    let period = phase.extent;
    let (hb, u) = (params.hbar, params.upsilon);
    let alpha = PI * hb.abs() / (2.0 * sigma);
    let ky = image_count(4.0 * alpha * sigma * sigma, period);
    let kx = image_count(4.0 * alpha, period);
    // X1 = (c[i1], c[j1]), X2 = (u c[b], c[a]/u)
    // B[b][j1][a][qy] = Σ_k e^{−2πiℏ X2x q} e^{−ας²(X1y + X2y − 2q)²}, q = qy + kL
    let bt: Vec<C64> = (0..n.pow(4))
        .into_par_iter()
        .map(|k| {
            let (b, j1, a, qy) = (k / (n * n * n), (k / (n * n)) % n, (k / n) % n, k % n);
            (-ky..=ky)
                .map(|img| {
                    let q = cq[qy] + img as f64 * period;
                    let t = c[j1] + c[a] / u - 2.0 * q;
                    C64::from_polar((-alpha * sigma * sigma * t * t).exp(), -2.0 * PI * hb * u * c[b] * q)
                })
                .sum()
        })
        .collect();
    // T[b][j1][a][qx] = Σ_qy ψ(qx, qy) B[b][j1][a][qy]
    let tt: Vec<C64> = (0..n.pow(4))
        .into_par_iter()
        .map(|k| {
            let (row, qx) = (k / n, k % n);
            let brow = &bt[row * n..(row + 1) * n];
            cell[qx * n..(qx + 1) * n].iter().zip(brow).map(|(p, bb)| p * bb).sum()
        })
        .collect();
    // G[i1][b][a][qx] = Σ_k e^{2πiℏ X2y q} e^{−α(X1x + X2x − 2q)²}, q = qx + kL
    let gt: Vec<C64> = (0..n.pow(4))
        .into_par_iter()
        .map(|k| {
            let (i1, b, a, qx) = (k / (n * n * n), (k / (n * n)) % n, (k / n) % n, k % n);
            (-kx..=kx)
                .map(|img| {
                    let q = cq[qx] + img as f64 * period;
                    let t = c[i1] + u * c[b] - 2.0 * q;
                    C64::from_polar((-alpha * t * t).exp(), 2.0 * PI * hb * c[a] / u * q)
                })
                .sum()
        })
        .collect();
    let pre = hb * hb * hb.abs() * dq * dq;
    let spec4 = r4(phase)?;
    let values = (0..n.pow(4))
        .into_par_iter()
        .map(|k| {
            let (i1, a, j1, b) = (k / (n * n * n), (k / (n * n)) % n, (k / n) % n, k % n);
            let (x1, y1) = (c[i1], c[j1]);
            if !in_doubled_chart(&phase, u, c[a], c[b]) {
                return ZERO;
            }
            let (x2, y2) = (u * c[b], c[a] / u);
            let trow = &tt[((b * n + j1) * n + a) * n..((b * n + j1) * n + a + 1) * n];
            let grow = &gt[((i1 * n + b) * n + a) * n..((i1 * n + b) * n + a + 1) * n];
            let s: C64 = trow.iter().zip(grow).map(|(t, g)| t * g).sum();
            s * cis(PI * hb * omega([x2, y2], [x1, y1])) * pre
        })
        .collect();
    Ok(DoubledSymbol { values: Field::from_values(spec4, values)? })
}

/// `a#` at the given points `(x1, x2, y1, y2)` through the doubled-group
/// form: `ℏ²|ℏ| e^{−πiℏω(X1,X2) + πiℏω(b,a)} ∫ ψ(q) [Ξ̃(g)Φ₂](q) dq` with
/// `Φ₂ = Φ_ς(2·)`, `g = (0, a_x, υb_y, a_y, b_x/υ)`, `m = (X1+X2)/2`,
/// `a = −X2 + m/2`, `b = −X2 − m/2`. Summed over the same periodized,
/// half-spaced cell as [`cross_toeplitz_pdo_symbol`].
pub fn cross_toeplitz_symbol_fsb(psi: &Field, sigma: f64, params: &Params, points: &[[f64; 4]]) -> Result<Vec<C64>> {
    require_phase_2d(psi)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Param(format!("sigma must be positive, got {sigma}")));
    }
    let phase = psi.spec;
    let (cell, c) = periodized_cell(psi)?;
    let n = phase.points;
    let d = phase.spacing() / 2.0;
    let period = phase.extent;
    let (hb, u) = (params.hbar, params.upsilon);
    let alpha = PI * hb.abs() / (2.0 * sigma);
    let phi2 = |x: f64, y: f64| (-alpha * 4.0 * (x * x + sigma * sigma * y * y)).exp();
    let kx = image_count(4.0 * alpha, period);
    let ky = image_count(4.0 * alpha * sigma * sigma, period);
    Ok(points
        .par_iter()
        .map(|&[x1, x2, y1, y2]| {
            let big1 = [x1, y1];
            let big2 = [u * y2, x2 / u];
            let m = [(big1[0] + big2[0]) / 2.0, (big1[1] + big2[1]) / 2.0];
            let a = [-big2[0] + m[0] / 2.0, -big2[1] + m[1] / 2.0];
            let b = [-big2[0] - m[0] / 2.0, -big2[1] - m[1] / 2.0];
            let g = GroupElement { s: 0.0, x: vec![a[0], u * b[1]], y: vec![a[1], b[0] / u] };
            // Ξ̃(g) = Λ(g.x[0], g.y[0]) R(υ g.y[1], g.x[1]/υ)
            let la = [g.x[0], g.y[0]];
            let rb = [u * g.y[1], g.x[1] / u];
            let mut acc = ZERO;
            for qi in 0..n {
                for qj in 0..n {
                    let p = cell[qi * n + qj];
                    if p == ZERO {
                        continue;
                    }
                    for ix in -kx..=kx {
                        for iy in -ky..=ky {
                            let q = [c[qi] + ix as f64 * period, c[qj] + iy as f64 * period];
                            let shifted = [q[0] - la[0] + rb[0], q[1] - la[1] + rb[1]];
                            let ph = omega(la, q) + omega(rb, [q[0] - la[0], q[1] - la[1]]);
                            acc += p * cis(PI * hb * ph) * phi2(shifted[0], shifted[1]);
                        }
                    }
                }
            }
            let lead = cis(PI * hb * (omega(b, a) - omega(big1, big2)));
            acc * lead * (hb * hb * hb.abs() * d * d)
        })
        .collect())
}

/// Residuals of the cross-Toeplitz characterization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossToeplitzCheck {
    pub is_type: bool,
    /// `k = 0`, which passes trivially.
    pub degenerate: bool,
    /// `‖a⁺_{R,ς} k‖ / ‖k‖` on the second pair.
    pub ladder_residual: f64,
    /// `‖(a⁻_{Λ,ς} − sgn(ℏ) conj z1) k‖ / ‖k‖` on the second pair.
    pub shift_residual: f64,
}

fn mul_axis(f: &Field, axis: usize, c: C64) -> Field {
    let spec = f.spec;
    let n = spec.points;
    let stride = spec.stride(axis);
    let coords = spec.coords();
    let values = f.values.iter().enumerate().map(|(k, v)| v * c * coords[(k / stride) % n]).collect();
    Field { spec, values }
}

/// Tests whether `k(p1, ·)` lies in `F_ς` for every `p1` and moves with
/// `p1` as `Λ(p1)` does: (i) the right creation ladder annihilates the second
/// pair; (ii) the left annihilation ladder acts on the second pair as
/// multiplication by `sgn(ℏ) conj z1`, `z1 = sqrt(π|ℏ|/ς)(x1 + iςy1)`.
pub fn is_cross_toeplitz_type(
    k: &TwoSidedKernel,
    tau: f64,
    sigma: f64,
    tol: f64,
    params: &Params,
) -> Result<CrossToeplitzCheck> {
    if !(tau > 0.0 && sigma > 0.0) {
        return Err(Error::Param("squeezes must be positive".into()));
    }
    let dense = k.densify(params)?;
    let norm = dense.norm();
    if norm == 0.0 {
        return Ok(CrossToeplitzCheck { is_type: true, degenerate: true, ladder_residual: 0.0, shift_residual: 0.0 });
    }
    let hb = params.hbar;
    let i = C64::new(0.0, 1.0);
    let ipih = i * (PI * hb);
    let scale = 1.0 / (2.0 * params.h().abs() * sigma).sqrt();
    let dx = spectral_derivative(&dense, 2)?;
    let dy = spectral_derivative(&dense, 3)?;
    let y2k = mul_axis(&dense, 3, ipih);
    let x2k = mul_axis(&dense, 2, -ipih);
    // dR^X = πiℏy + ∂x, dR^Y = −πiℏx + ∂y; dΛ^X = πiℏy − ∂x, dΛ^Y = −πiℏx − ∂y
    let r_x = y2k.add(&dx)?;
    let r_y = x2k.add(&dy)?;
    let l_x = y2k.sub(&dx)?;
    let l_y = x2k.sub(&dy)?;
    let plus = r_x.scale(real(sigma * scale)).axpy(i * scale, &r_y)?;
    let minus = l_x.scale(real(-sigma * scale)).axpy(i * scale, &l_y)?;
    let z = (PI * hb.abs() / sigma).sqrt() * hb.signum();
    let zbar = mul_axis(&dense, 0, real(z)).add(&mul_axis(&dense, 1, C64::new(0.0, -z * sigma)))?;
    let ladder_residual = plus.norm() / norm;
    let shift_residual = minus.sub(&zbar)?.norm() / norm;
    Ok(CrossToeplitzCheck {
        is_type: ladder_residual <= tol && shift_residual <= tol,
        degenerate: false,
        ladder_residual,
        shift_residual,
    })
}

/// The symbol recovered from a cross-Toeplitz kernel, and the spread of the
/// quotient `k / Λ(p1)Φ_ς` over the second pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolRecovery {
    pub psi: Field,
    pub spread: f64,
}

/// Recovers `ψ` from `k = w(p1) [Λ(p1)Φ_ς](p2)`. The factor `w` is the
/// weighted quotient over samples with `|Λ(p1)Φ_ς| > 10^{-3}` of its peak,
/// weights `|Λ(p1)Φ_ς|²`; then `ψ = m_w / |ℏ|` with `m_w` the multiplier of
/// `Σ w(p) Λ(p)R(p)`. The multiplier has period `L` in each variable, so `ψ`
/// is only determined up to periodisation; the result is the copy on the
/// central cell `[−L/2, L/2)²`, zero elsewhere.
pub fn symbol_from_kernel(k: &TwoSidedKernel, tau: f64, sigma: f64, params: &Params) -> Result<SymbolRecovery> {
    let check = is_cross_toeplitz_type(k, tau, sigma, RECOVERY_TYPE_TOL, params)?;
    if !check.is_type {
        return Err(Error::Precondition {
            what: "kernel is not of cross-Toeplitz type".into(),
            residual: check.ladder_residual.max(check.shift_residual),
            limit: RECOVERY_TYPE_TOL,
        });
    }
    let dense = k.densify(params)?;
    let phase = require_r4(&dense)?;
    let n = phase.points;
    let c = phase.coords();
    let hb = params.hbar;
    let alpha = PI * hb.abs() / (2.0 * sigma);
    let rows: Vec<Option<(C64, f64)>> = (0..n * n)
        .into_par_iter()
        .map(|p1| {
            let (x1, y1) = (c[p1 / n], c[p1 % n]);
            let row = &dense.values[p1 * n * n..(p1 + 1) * n * n];
            let den: Vec<C64> = (0..n * n)
                .map(|p2| {
                    let (x2, y2) = (c[p2 / n], c[p2 % n]);
                    let (dx, dy) = (x2 - x1, y2 - y1);
                    C64::from_polar(
                        (-alpha * (dx * dx + sigma * sigma * dy * dy)).exp(),
                        PI * hb * omega([x1, y1], [x2, y2]),
                    )
                })
                .collect();
            let peak = den.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let admissible: Vec<usize> = (0..n * n).filter(|&j| den[j].norm() > QUOTIENT_FLOOR * peak).collect();
            if admissible.is_empty() {
                return None;
            }
            let wsum: f64 = admissible.iter().map(|&j| den[j].norm_sqr()).sum();
            let est: C64 = admissible.iter().map(|&j| row[j] * den[j].conj()).sum::<C64>() / wsum;
            let spread = admissible.iter().map(|&j| (row[j] / den[j] - est).norm()).fold(0.0, f64::max);
            Some((est, spread))
        })
        .collect();
    if rows.iter().any(Option::is_none) {
        return Err(Error::Precondition { what: "empty quotient region".into(), residual: 0.0, limit: QUOTIENT_FLOOR });
    }
    let rows: Vec<(C64, f64)> = rows.into_iter().flatten().collect();
    let w = Field::from_values(phase, rows.iter().map(|r| r.0).collect())?;
    let peak = w.max_abs();
    let spread = if peak == 0.0 { 0.0 } else { rows.iter().map(|r| r.1).fold(0.0, f64::max) / peak };
    let half = phase.extent / 2.0;
    let central = |q: f64| q >= -half - 1e-12 && q < half - 1e-12;
    let mut psi = doubled_multiplier(&w, hb).scale(real(1.0 / hb.abs()));
    for (idx, v) in psi.values.iter_mut().enumerate() {
        if !(central(c[idx / n]) && central(c[idx % n])) {
            *v = ZERO;
        }
    }
    Ok(SymbolRecovery { psi, spread })
}

/// On-disk record of a kernel; sample files sit next to the JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
enum KernelRecord {
    Dense { values: String },
    LeftOnly { k: String },
    RightOnly { k: String },
    DiagonalDelta { w: String },
    ModulatedProduct { w: String, v: String },
}

/// Writes `<stem>.json` plus CSV sample files (binary for `Dense`) into
/// `dir` and returns the JSON path.
pub fn save_kernel(k: &TwoSidedKernel, dir: &Path, stem: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let csv = |name: &str, f: &Field| -> Result<String> {
        let file = format!("{stem}_{name}.csv");
        io::write_csv(f, &dir.join(&file))?;
        Ok(file)
    };
    let record = match k {
        TwoSidedKernel::Dense(v) => {
            let file = format!("{stem}_values.bin");
            io::save_binary(v, &dir.join(&file))?;
            KernelRecord::Dense { values: file }
        }
        TwoSidedKernel::LeftOnly(f) => KernelRecord::LeftOnly { k: csv("k", f)? },
        TwoSidedKernel::RightOnly(f) => KernelRecord::RightOnly { k: csv("k", f)? },
        TwoSidedKernel::DiagonalDelta(f) => KernelRecord::DiagonalDelta { w: csv("w", f)? },
        TwoSidedKernel::ModulatedProduct { w, v } => KernelRecord::ModulatedProduct { w: csv("w", w)?, v: csv("v", v)? },
    };
    let path = dir.join(format!("{stem}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&record)? + "\n")?;
    Ok(path)
}

/// Reads a kernel written by [`save_kernel`].
pub fn load_kernel(path: &Path) -> Result<TwoSidedKernel> {
    let record: KernelRecord = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let csv = |file: &str| io::read_csv(&dir.join(file));
    let k = match record {
        KernelRecord::Dense { values } => TwoSidedKernel::Dense(io::load_binary(&dir.join(values))?),
        KernelRecord::LeftOnly { k } => TwoSidedKernel::LeftOnly(csv(&k)?),
        KernelRecord::RightOnly { k } => TwoSidedKernel::RightOnly(csv(&k)?),
        KernelRecord::DiagonalDelta { w } => TwoSidedKernel::DiagonalDelta(csv(&w)?),
        KernelRecord::ModulatedProduct { w, v } => TwoSidedKernel::ModulatedProduct { w: csv(&w)?, v: csv(&v)? },
    };
    k.phase_grid()?;
    Ok(k)
}
