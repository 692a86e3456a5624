//! Gaussians, Hermite vectors, FSB projections, intertwiners and the
//! poly-Fock lattice.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::calculus::twisted_convolution;
use crate::error::{Error, Result};
use crate::grid::{inner_product, spectral_derivative, Field, GridSpec};
use crate::group::{GroupElement, Params, PhasePoint};
use crate::reps::{act, ladder, RepTag, Sign};
use crate::transforms::{contravariant, covariant, covariant_left, require_phase_2d, Window};
use crate::C64;

/// Largest Hermite index the grids resolve reliably.
pub const MAX_HERMITE: usize = 8;
/// Default bound on poly-Fock lattice indices.
pub const MAX_LATTICE: usize = 8;

/// Samples per standard deviation of `|φ_τ|²`-width required of a grid.
const MIN_SAMPLES_PER_SD: f64 = 1.5;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Param(format!("{name} must be positive, got {v}")))
    }
}

/// `(2|ℏ|/τ)^{n/4} e^{−π|ℏ|t²/τ}`, unit norm.
pub fn gaussian_vacuum(tau: f64, params: &Params, grid: &GridSpec) -> Result<Field> {
    check_positive("tau", tau)?;
    let hb = params.hbar.abs();
    let sd = (tau / (2.0 * PI * hb)).sqrt();
    if sd / grid.spacing() < MIN_SAMPLES_PER_SD || (-PI * hb * grid.extent * grid.extent / tau).exp() > 1e-14 {
        return Err(Error::Grid(format!("grid does not resolve the τ = {tau} vacuum")));
    }
    let c = (2.0 * hb / tau).powf(grid.dim as f64 / 4.0);
    Ok(Field::from_fn(*grid, |t| {
        C64::new(c * (-PI * hb / tau * t.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
    }))
}

/// The normalized Hermite vector `(a⁺)^m φ_τ / sqrt(m!)` on a 1-d grid, from
/// the three-term recurrence.
pub fn hermite_vector(m: usize, tau: f64, params: &Params, grid: &GridSpec) -> Result<Field> {
    if m > MAX_HERMITE {
        return Err(Error::Param(format!("Hermite index {m} exceeds {MAX_HERMITE}")));
    }
    if grid.dim != 1 {
        return Err(Error::Unsupported("Hermite vectors are built on 1-d grids".into()));
    }
    let vac = gaussian_vacuum(tau, params, grid)?;
    let k = (2.0 * PI * params.hbar.abs() / tau).sqrt();
    let values = (0..grid.points)
        .map(|i| {
            let u = k * grid.coord(i);
            let (mut prev, mut cur) = (0.0, 1.0);
            for j in 0..m {
                let next = (2.0 / (j as f64 + 1.0)).sqrt() * u * cur - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
            }
            vac.values[i] * cur
        })
        .collect();
    Field::from_values(*grid, values)
}

/// `Φ_τ(x, y) = e^{−π|ℏ|/(2τ)(x² + τ²y²)}`.
pub fn fsb_gaussian(tau: f64, params: &Params, phase: &GridSpec) -> Result<Field> {
    mixed_gaussian(tau, tau, params, phase)
}

/// Closed form of `Φ_{τς}(x,y) = ⟨φ_ς, ρ(0,x,y)φ_τ⟩` for unit vacua:
/// `(4τς/(τ+ς)²)^{n/4} exp(−π|ℏ|(x² + τςy²)/(τ+ς) + πiℏ(ς−τ)xy/(τ+ς))`.
pub fn mixed_gaussian(tau: f64, sigma: f64, params: &Params, phase: &GridSpec) -> Result<Field> {
    check_positive("tau", tau)?;
    check_positive("sigma", sigma)?;
    if phase.dim % 2 != 0 {
        return Err(Error::Grid("phase grids have even dimension".into()));
    }
    let n = phase.dim / 2;
    let (hb, s) = (params.hbar, tau + sigma);
    let pre = (4.0 * tau * sigma / (s * s)).powf(n as f64 / 4.0);
    Ok(Field::from_fn(*phase, |p| {
        let (mut re, mut im) = (0.0, 0.0);
        for j in 0..n {
            let (x, y) = (p[j], p[n + j]);
            re -= PI * hb.abs() * (x * x + tau * sigma * y * y) / s;
            im += PI * hb * (sigma - tau) * x * y / s;
        }
        C64::from_polar(pre * re.exp(), im)
    }))
}

/// `Φ_{τς}` by quadrature of the matrix coefficient on the configuration
/// grid attached to `phase`.
pub fn mixed_gaussian_quadrature(tau: f64, sigma: f64, params: &Params, phase: &GridSpec) -> Result<Field> {
    let config = phase.wigner_config()?;
    let vt = Window::new(gaussian_vacuum(tau, params, &config)?)?;
    let vs = gaussian_vacuum(sigma, params, &config)?;
    covariant(&vs, &vt, params)
}

/// `K_{(x,y)} = Λ(0,x,y)Φ_τ`; `|ℏ|^n ⟨F, K_{(x,y)}⟩ = F(x,y)` on `F_τ`.
pub fn reproducing_kernel(point: &PhasePoint, tau: f64, params: &Params, phase: &GridSpec) -> Result<Field> {
    act(RepTag::LeftPulled, &GroupElement::from_point(point), &fsb_gaussian(tau, params, phase)?, params)
}

/// The orthogonal FSB projection `P_τ F(x,y) = |ℏ|^n ⟨F, Λ(0,x,y)Φ_τ⟩`.
pub fn fsb_project(big_f: &Field, tau: f64, params: &Params) -> Result<Field> {
    let phi = fsb_gaussian(tau, params, &big_f.spec)?;
    Ok(covariant_left(big_f, &phi, params)?.scale(C64::new(params.hbar.abs(), 0.0)))
}

/// `P_τ F = |ℏ|^n F ⋆ Φ_τ`, the twisted-convolution route.
pub fn fsb_project_twisted(big_f: &Field, tau: f64, params: &Params) -> Result<Field> {
    let phi = fsb_gaussian(tau, params, &big_f.spec)?;
    Ok(twisted_convolution(big_f, &phi, params)?.scale(C64::new(params.hbar.abs(), 0.0)))
}

/// `‖P_τ F − F‖/‖F‖`.
pub fn membership_residual(big_f: &Field, tau: f64, params: &Params) -> Result<f64> {
    let norm = big_f.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(fsb_project(big_f, tau, params)?.sub(big_f)?.norm() / norm)
}

/// Membership tolerance for inputs claimed to lie in `F_τ`.
pub const MEMBERSHIP_TOL: f64 = 1e-4;

pub(crate) fn require_member(big_f: &Field, tau: f64, params: &Params, tol: f64) -> Result<()> {
    let r = membership_residual(big_f, tau, params)?;
    if r > tol {
        return Err(Error::Precondition { what: format!("input not in F_{tau}"), residual: r, limit: tol });
    }
    Ok(())
}

/// The intertwiner `F_τ → F_ς`, `U F = |ℏ|^n ⟨F, Λ(0,x,y)Φ_{τς}⟩`; unitary,
/// equal to `W_{φ_ς} M_{φ_τ}`.
pub fn intertwine(big_f: &Field, tau: f64, sigma: f64, params: &Params) -> Result<Field> {
    require_member(big_f, tau, params, MEMBERSHIP_TOL)?;
    let kernel = mixed_gaussian(tau, sigma, params, &big_f.spec)?;
    Ok(covariant_left(big_f, &kernel, params)?.scale(C64::new(params.hbar.abs(), 0.0)))
}

/// `W_{φ_ς}(M_{φ_τ} F)`, the second route to [`intertwine`].
pub fn intertwine_via_transforms(big_f: &Field, tau: f64, sigma: f64, params: &Params) -> Result<Field> {
    let config = big_f.spec.wigner_config()?;
    let vt = Window::new(gaussian_vacuum(tau, params, &config)?)?;
    let vs = Window::new(gaussian_vacuum(sigma, params, &config)?)?;
    covariant(&contravariant(big_f, &vt, params)?, &vs, params)
}

/// Index `(j, k)` of the lattice vector `Φ_{jk}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeIndex {
    pub j: usize,
    pub k: usize,
}

/// `Φ_{jk}`: normalized `(a⁺_Λ)^j (a⁻_R)^k Φ_τ`.
pub fn lattice_vector(idx: LatticeIndex, tau: f64, params: &Params, phase: &GridSpec) -> Result<Field> {
    if idx.j > MAX_LATTICE || idx.k > MAX_LATTICE {
        return Err(Error::Param(format!("lattice index ({}, {}) exceeds {MAX_LATTICE}", idx.j, idx.k)));
    }
    require_phase_2d(&Field::zeros(*phase))?;
    let mut f = fsb_gaussian(tau, params, phase)?;
    for _ in 0..idx.k {
        f = ladder(RepTag::RightPulled, Sign::Minus, tau, 0, &f, params)?;
    }
    for _ in 0..idx.j {
        f = ladder(RepTag::LeftPulled, Sign::Plus, tau, 0, &f, params)?;
    }
    Ok(f.scale(C64::new(1.0 / f.norm(), 0.0)))
}

/// Projection onto `span{Φ_{jm} : j ≤ jmax}`, orthonormalized by modified
/// Gram–Schmidt.
pub fn polyfock_project(big_f: &Field, m: usize, jmax: usize, tau: f64, params: &Params) -> Result<Field> {
    let mut basis: Vec<Field> = Vec::with_capacity(jmax + 1);
    for j in 0..=jmax {
        let mut v = lattice_vector(LatticeIndex { j, k: m }, tau, params, &big_f.spec)?;
        for b in &basis {
            v = v.axpy(-inner_product(&v, b)?, b)?;
        }
        basis.push(v.scale(C64::new(1.0 / v.norm(), 0.0)));
    }
    let mut out = Field::zeros(big_f.spec);
    for b in &basis {
        out = out.axpy(inner_product(big_f, b)?, b)?;
    }
    Ok(out)
}

/// Dispersions of `Q = sqrt(2π)ℏt` and `P = −i∂_t/sqrt(2π)` (so that
/// `[Q, P] = iℏ`) on a unit-normalized state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub delta_q: f64,
    pub delta_p: f64,
    /// The lower bound `|ℏ|/2` of `Δ(Q)Δ(P)`.
    pub bound: f64,
}

impl Uncertainty {
    pub fn product(&self) -> f64 {
        self.delta_q * self.delta_p
    }
}

fn dispersion(f: &Field, op: &Field) -> Result<f64> {
    let mean = inner_product(op, f)?;
    let second = inner_product(op, op)?.re;
    Ok((second - mean.norm_sqr()).max(0.0).sqrt())
}

pub fn uncertainty(f: &Field, params: &Params) -> Result<Uncertainty> {
    if f.spec.dim != 1 {
        return Err(Error::Unsupported("uncertainty is computed for n = 1".into()));
    }
    let f = f.scale(C64::new(1.0 / f.norm(), 0.0));
    let s = (2.0 * PI).sqrt();
    let q = Field::from_fn(f.spec, |t| C64::new(s * params.hbar * t[0], 0.0)).mul(&f)?;
    let p = spectral_derivative(&f, 0)?.scale(C64::new(0.0, -1.0 / s));
    Ok(Uncertainty { delta_q: dispersion(&f, &q)?, delta_p: dispersion(&f, &p)?, bound: params.hbar.abs() / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::symplectic_fourier;

    fn setup() -> (Params, GridSpec, GridSpec) {
        let p = Params::default();
        let phase = GridSpec::self_dual(2, 64, 1.0).unwrap();
        (p, phase, phase.wigner_config().unwrap())
    }

    #[test]
    fn vacuum() {
        let (p, _, config) = setup();
        let v = gaussian_vacuum(1.0, &p, &config).unwrap();
        assert!((v.values[config.points / 2].re - 2f64.powf(0.25)).abs() < 1e-14);
        for tau in [0.5, 1.0, 2.0] {
            let v = gaussian_vacuum(tau, &p, &config).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-10);
            let m = config.points;
            assert!((1..m).all(|i| (v.values[i] - v.values[m - i]).norm() < 1e-15));
        }
        assert!(gaussian_vacuum(1.0, &p, &GridSpec::new(1, 2.0, 16).unwrap()).is_err());
        assert!(gaussian_vacuum(1.0, &p, &GridSpec::new(1, 8.0, 8).unwrap()).is_err());
    }

    #[test]
    fn hermite_family() {
        let (p, _, config) = setup();
        for tau in [0.5, 1.0, 2.0] {
            let hs: Vec<Field> = (0..=5).map(|m| hermite_vector(m, tau, &p, &config).unwrap()).collect();
            assert_eq!(hs[0], gaussian_vacuum(tau, &p, &config).unwrap());
            for a in 0..5 {
                for b in 0..5 {
                    let ip = inner_product(&hs[a], &hs[b]).unwrap();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - want).norm() < 1e-6);
                }
            }
            for m in 1..5 {
                let lowered = ladder(RepTag::Schrodinger, Sign::Minus, tau, 0, &hs[m], &p).unwrap();
                assert!(lowered.max_dist(&hs[m - 1].scale(C64::new((m as f64).sqrt(), 0.0))).unwrap() < 1e-6);
            }
            let raised = ladder(RepTag::Schrodinger, Sign::Plus, tau, 0, &hs[0], &p).unwrap();
            let raised = raised.scale(C64::new(1.0 / raised.norm(), 0.0));
            assert!(raised.max_dist(&hs[1]).unwrap() < 1e-8);
        }
        assert!(hermite_vector(9, 1.0, &p, &config).is_err());
    }

    #[test]
    fn gaussians() {
        let (p, phase, _) = setup();
        let phi = fsb_gaussian(1.0, &p, &phase).unwrap();
        let centre = phase.ravel(&[32, 32]);
        assert_eq!(phi.values[centre], C64::new(1.0, 0.0));
        let fine = GridSpec::new(2, 4.0, 64).unwrap();
        let k = fine.lattice_index(1.0).unwrap();
        let v = fsb_gaussian(1.0, &p, &fine).unwrap().values[fine.ravel(&[k, 32])];
        assert!((v.re - (-PI / 2.0).exp()).abs() < 1e-12);
        for (tau, sigma) in [(1.0, 2.0), (0.5, 1.0), (2.0, 0.5), (1.0, 1.0)] {
            let closed = mixed_gaussian(tau, sigma, &p, &phase).unwrap();
            let quad = mixed_gaussian_quadrature(tau, sigma, &p, &phase).unwrap();
            assert!(closed.max_dist(&quad).unwrap() < 1e-8, "{tau} {sigma}");
            let swapped = mixed_gaussian(sigma, tau, &p, &phase).unwrap();
            assert!(closed.conj().max_dist(&swapped).unwrap() < 1e-10);
        }
        let m12 = mixed_gaussian_quadrature(1.0, 2.0, &p, &phase).unwrap();
        assert!((m12.values[centre].re - (8f64 / 9.0).powf(0.25)).abs() < 1e-8);
        assert!(mixed_gaussian(1.0, 1.0, &p, &phase).unwrap().max_dist(&phi).unwrap() < 1e-15);
    }

    #[test]
    fn mixed_gaussian_annihilation_and_fourier() {
        let (p, phase, _) = setup();
        for (tau, sigma) in [(1.0, 2.0), (0.5, 2.0), (2.0, 1.0)] {
            let m = mixed_gaussian(tau, sigma, &p, &phase).unwrap();
            assert!(ladder(RepTag::RightPulled, Sign::Plus, tau, 0, &m, &p).unwrap().norm() < 1e-6);
            assert!(ladder(RepTag::LeftPulled, Sign::Minus, sigma, 0, &m, &p).unwrap().norm() < 1e-6);
            assert!(symplectic_fourier(&m, &p).unwrap().max_dist(&m).unwrap() < 1e-8);
            for w in [C64::new(0.5, 0.0), C64::new(-0.2, 0.4)] {
                let e = crate::reps::exp_ladder(RepTag::LeftPulled, Sign::Minus, sigma, 0, w, &m, 10, &p).unwrap();
                assert!(e.max_dist(&m).unwrap() < 1e-5);
            }
        }
    }

    #[test]
    fn reproducing_kernel_properties() {
        let (p, phase, config) = setup();
        let origin = PhasePoint::origin(1);
        assert_eq!(reproducing_kernel(&origin, 1.0, &p, &phase).unwrap(), fsb_gaussian(1.0, &p, &phase).unwrap());
        let vac = Window::new(gaussian_vacuum(1.0, &p, &config).unwrap()).unwrap();
        let f = covariant(&hermite_vector(1, 1.0, &p, &config).unwrap(), &vac, &p).unwrap();
        for (i, j) in [(32, 32), (30, 35), (36, 28), (33, 33), (25, 34)] {
            let pt = PhasePoint::new(vec![phase.coord(i)], vec![phase.coord(j)]).unwrap();
            let k = reproducing_kernel(&pt, 1.0, &p, &phase).unwrap();
            assert!((k.values[i * 64 + j] - 1.0).norm() < 1e-10);
            let val = inner_product(&f, &k).unwrap() * p.hbar.abs();
            let want = f.values[i * 64 + j];
            assert!((val - want).norm() <= 1e-6 * f.max_abs());
        }
    }

    #[test]
    fn projection_paths_and_laws() {
        let (p, phase, _) = setup();
        let f = Field::from_fn(phase, |q| {
            C64::from_polar((-PI * ((q[0] - 0.5).powi(2) + 0.5 * q[1] * q[1])).exp(), 0.7 * q[1] - 0.2 * q[0])
        });
        let g = Field::from_fn(phase, |q| C64::new(q[0] * (-PI * (q[0] * q[0] + q[1] * q[1]) * 0.7).exp(), 0.0));
        for tau in [0.5, 1.0, 2.0] {
            let pf = fsb_project(&f, tau, &p).unwrap();
            let pt = fsb_project_twisted(&f, tau, &p).unwrap();
            assert!(pf.max_dist(&pt).unwrap() < 1e-8 * pf.max_abs().max(1.0));
            assert!(fsb_project(&pf, tau, &p).unwrap().rel_dist(&pf).unwrap() < 1e-8);
            let pg = fsb_project(&g, tau, &p).unwrap();
            let l = inner_product(&pf, &g).unwrap();
            let r = inner_product(&f, &pg).unwrap();
            assert!((l - r).norm() < 1e-8);
            let phi = fsb_gaussian(tau, &p, &phase).unwrap();
            assert!(fsb_project(&phi, tau, &p).unwrap().max_dist(&phi).unwrap() < 1e-8);
            let el = GroupElement::scalar(0.0, 0.3, -0.45);
            let a = fsb_project(&act(RepTag::LeftPulled, &el, &f, &p).unwrap(), tau, &p).unwrap();
            let b = act(RepTag::LeftPulled, &el, &pf, &p).unwrap();
            assert!(a.rel_dist(&b).unwrap() < 1e-6);
        }
    }

    #[test]
    fn intertwiner() {
        let (p, phase, config) = setup();
        let tau = 1.0;
        let vac = Window::new(gaussian_vacuum(tau, &p, &config).unwrap()).unwrap();
        let f = covariant(&hermite_vector(1, 0.5, &p, &config).unwrap(), &vac, &p).unwrap();
        for sigma in [0.5, 1.0, 2.0] {
            let a = intertwine(&f, tau, sigma, &p).unwrap();
            let b = intertwine_via_transforms(&f, tau, sigma, &p).unwrap();
            assert!(a.rel_dist(&b).unwrap() < 1e-6);
            assert!((a.norm() - f.norm()).abs() < 1e-6);
            assert!(membership_residual(&a, sigma, &p).unwrap() < 1e-6);
        }
        assert!(intertwine(&f, tau, tau, &p).unwrap().rel_dist(&f).unwrap() < 1e-6);
        let phi = fsb_gaussian(tau, &p, &phase).unwrap();
        assert!(membership_residual(&intertwine(&phi, tau, 2.0, &p).unwrap(), 2.0, &p).unwrap() < 1e-6);
        assert_eq!(intertwine(&Field::zeros(phase), tau, 2.0, &p).unwrap().max_abs(), 0.0);
        let outside = fsb_gaussian(2.0, &p, &phase).unwrap();
        assert!(matches!(intertwine(&outside, tau, 2.0, &p), Err(Error::Precondition { .. })));
    }

    #[test]
    fn lattice() {
        let (p, phase, _) = setup();
        for tau in [0.5, 1.0, 2.0] {
            let vs: Vec<(LatticeIndex, Field)> = (0..=3)
                .flat_map(|j| (0..=3).map(move |k| LatticeIndex { j, k }))
                .map(|i| (i, lattice_vector(i, tau, &p, &phase).unwrap()))
                .collect();
            assert!(vs[0].1.max_dist(&fsb_gaussian(tau, &p, &phase).unwrap()).unwrap() < 1e-12);
            for (a, fa) in &vs {
                for (b, fb) in &vs {
                    let ip = inner_product(fa, fb).unwrap();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - want).norm() < 1e-6, "{a:?} {b:?} {ip}");
                }
                if a.k == 0 {
                    assert!(ladder(RepTag::RightPulled, Sign::Plus, tau, 0, fa, &p).unwrap().norm() < 1e-6);
                }
            }
        }
        assert!(lattice_vector(LatticeIndex { j: 9, k: 0 }, 1.0, &p, &phase).is_err());
    }

    #[test]
    fn polyfock() {
        let (p, phase, config) = setup();
        let tau = 1.0;
        let vac = Window::new(gaussian_vacuum(tau, &p, &config).unwrap()).unwrap();
        let f = covariant(
            &hermite_vector(2, 1.0, &p, &config).unwrap().add(&hermite_vector(0, 0.9, &p, &config).unwrap()).unwrap(),
            &vac,
            &p,
        )
        .unwrap();
        let p0 = polyfock_project(&f, 0, 8, tau, &p).unwrap();
        assert!(p0.rel_dist(&fsb_project(&f, tau, &p).unwrap()).unwrap() < 1e-5);
        let phi21 = lattice_vector(LatticeIndex { j: 2, k: 1 }, tau, &p, &phase).unwrap();
        assert!(polyfock_project(&phi21, 1, 4, tau, &p).unwrap().max_dist(&phi21).unwrap() < 1e-6);
        assert!(polyfock_project(&phi21, 0, 4, tau, &p).unwrap().max_abs() < 1e-6);
        assert!(polyfock_project(&phi21, 2, 4, tau, &p).unwrap().max_abs() < 1e-6);
        let g = Field::from_fn(phase, |q| C64::new((-PI * (q[0] * q[0] + 2.0 * q[1] * q[1])).exp(), q[0]));
        let parts: Vec<Field> = (0..3).map(|m| polyfock_project(&g, m, 4, tau, &p).unwrap()).collect();
        for a in 0..3 {
            for b in 0..a {
                assert!(inner_product(&parts[a], &parts[b]).unwrap().norm() < 1e-6);
            }
        }
        // Summing the m-components reproduces the projection onto the whole truncated span.
        let total = parts.iter().skip(1).fold(parts[0].clone(), |acc, x| acc.add(x).unwrap());
        let mut basis: Vec<Field> = Vec::new();
        for k in 0..3 {
            for j in 0..=4 {
                let mut v = lattice_vector(LatticeIndex { j, k }, tau, &p, &phase).unwrap();
                for b in &basis {
                    v = v.axpy(-inner_product(&v, b).unwrap(), b).unwrap();
                }
                basis.push(v.scale(C64::new(1.0 / v.norm(), 0.0)));
            }
        }
        let span = basis.iter().fold(Field::zeros(phase), |acc, b| acc.axpy(inner_product(&g, b).unwrap(), b).unwrap());
        assert!(total.rel_dist(&span).unwrap() < 1e-5);
    }

    #[test]
    fn heisenberg_kennard() {
        let (p, _, config) = setup();
        for tau in [0.5, 1.0, 2.0] {
            let u = uncertainty(&gaussian_vacuum(tau, &p, &config).unwrap(), &p).unwrap();
            assert!((u.product() - u.bound).abs() < 1e-8);
            assert!((u.delta_q.powi(2) - tau / 2.0).abs() < 1e-8);
        }
        let pert = gaussian_vacuum(1.0, &p, &config)
            .unwrap()
            .axpy(C64::new(0.3, 0.0), &hermite_vector(2, 1.0, &p, &config).unwrap())
            .unwrap();
        let u = uncertainty(&pert, &p).unwrap();
        assert!(u.product() - u.bound >= 1e-3, "{u:?}");
    }
}
