//! Group actions: the Schrödinger representation, the pulled left and right
//! regular actions on phase space and the doubled actions of `H^{2n}`,
//! together with their derived representations and ladder operators.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fractional_shift, spectral_derivative, Field};
use crate::group::{decomplexify, GroupElement, Params};
use crate::C64;

/// Which representation acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepTag {
    /// `ρ_ℏ` on `L²(R^n)`.
    Schrodinger,
    /// `Λ_ℏ` on `L²(R^{2n})`.
    LeftPulled,
    /// `R_ℏ` on `L²(R^{2n})`.
    RightPulled,
    /// `Ξ̃(s,x1,x2,y1,y2) = Λ(s,x1,y1)R(0,υy2,x2/υ)`.
    XiTilde,
    /// `Ξ = S_υ Ξ̃ S_υ^{-1}` through its explicit formula.
    Xi,
}

/// Basis `S, X_j, Y_j` of the Heisenberg Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraBasis {
    S,
    X(usize),
    Y(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Multiplies every sample by `e^{i·phase(coords)}`.
pub(crate) fn modulate(f: &mut Field, phase: impl Fn(&[f64]) -> f64) {
    let spec = f.spec;
    let mut idx = vec![0usize; spec.dim];
    let mut t = vec![0.0; spec.dim];
    for (k, v) in f.values.iter_mut().enumerate() {
        spec.unravel(k, &mut idx);
        for (ti, &i) in t.iter_mut().zip(&idx) {
            *ti = spec.coord(i);
        }
        *v *= C64::from_polar(1.0, phase(&t));
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn carrier(tag: RepTag, g: &GroupElement, f: &Field) -> Result<()> {
    let want = match tag {
        RepTag::Schrodinger => g.n(),
        RepTag::LeftPulled | RepTag::RightPulled => 2 * g.n(),
        RepTag::XiTilde | RepTag::Xi => {
            if g.n() % 2 != 0 {
                return Err(Error::Dimension { expected: g.n() + 1, found: g.n() });
            }
            g.n()
        }
    };
    if f.spec.dim != want {
        return Err(Error::Grid(format!("{tag:?} with n = {} needs a {want}-d carrier, got {}", g.n(), f.spec.dim)));
    }
    Ok(())
}

/// Applies `tag(g)` to `f`.
///
/// Translations by lattice multiples roll the samples exactly; other offsets
/// use band-limited interpolation. Phases are evaluated at the true lattice
/// coordinates.
pub fn act(tag: RepTag, g: &GroupElement, f: &Field, params: &Params) -> Result<Field> {
    carrier(tag, g, f)?;
    let hb = params.hbar;
    let (s, x, y) = (g.s, &g.x, &g.y);
    match tag {
        RepTag::Schrodinger => {
            let mut out = fractional_shift(f, x)?;
            let c = 2.0 * s + dot(x, y);
            modulate(&mut out, |t| PI * hb * (c - 2.0 * dot(y, t)));
            Ok(out)
        }
        RepTag::LeftPulled => {
            let n = x.len();
            let off: Vec<f64> = x.iter().chain(y).cloned().collect();
            let mut out = fractional_shift(f, &off)?;
            modulate(&mut out, |p| PI * hb * (2.0 * s + dot(x, &p[n..]) - dot(y, &p[..n])));
            Ok(out)
        }
        RepTag::RightPulled => {
            let n = x.len();
            let off: Vec<f64> = x.iter().chain(y).map(|v| -v).collect();
            let mut out = fractional_shift(f, &off)?;
            modulate(&mut out, |p| PI * hb * (-2.0 * s + dot(x, &p[n..]) - dot(y, &p[..n])));
            Ok(out)
        }
        RepTag::XiTilde => {
            let n = x.len() / 2;
            let u = params.upsilon;
            let right = GroupElement {
                s: 0.0,
                x: y[n..].iter().map(|v| u * v).collect(),
                y: x[n..].iter().map(|v| v / u).collect(),
            };
            let left = GroupElement { s, x: x[..n].to_vec(), y: y[..n].to_vec() };
            let r = act(RepTag::RightPulled, &right, f, params)?;
            act(RepTag::LeftPulled, &left, &r, params)
        }
        RepTag::Xi => {
            let n = x.len() / 2;
            let u = params.upsilon;
            let (x1, x2) = x.split_at(n);
            let (y1, y2) = y.split_at(n);
            let off: Vec<f64> = (0..n)
                .map(|j| x1[j] / u - y2[j])
                .chain((0..n).map(|j| y1[j] - x2[j] / u))
                .collect();
            let mut out = fractional_shift(f, &off)?;
            let c = 2.0 * s + dot(x1, x2) / u - u * dot(y1, y2);
            modulate(&mut out, |t| {
                let (t1, t2) = t.split_at(n);
                let lin: f64 = (0..n).map(|j| -(u * y1[j] + x2[j]) * t1[j] + (x1[j] + u * y2[j]) * t2[j]).sum();
                PI * hb * (c + lin)
            });
            Ok(out)
        }
    }
}

/// Partial dilation `S_υ f(t1, t2) = f(υ t1, t2)` for `υ = 2^k`, `k ≥ 0`, by
/// exact index remapping; samples mapped outside the grid become zero.
pub fn partial_dilation(f: &Field, upsilon: f64) -> Result<Field> {
    let k = upsilon.log2().round();
    if k < 0.0 || (upsilon - 2f64.powi(k as i32)).abs() > 1e-12 {
        return Err(Error::Unsupported(format!("partial dilation needs υ = 2^k with k >= 0, got {upsilon}")));
    }
    let spec = f.spec;
    if spec.dim % 2 != 0 {
        return Err(Error::Grid("partial dilation acts on R^{2n}".into()));
    }
    let n = spec.dim / 2;
    let m = 1i64 << (k as i64);
    let big = spec.points as i64;
    let mut out = Field::zeros(spec);
    let mut idx = vec![0usize; spec.dim];
    for (j, v) in out.values.iter_mut().enumerate() {
        spec.unravel(j, &mut idx);
        let mut inside = true;
        for i in idx.iter_mut().take(n) {
            // υ·t_i = −L + (m·i − (m−1)N/2)Δ
            let src = m * *i as i64 - (m - 1) * big / 2;
            if src < 0 || src >= big {
                inside = false;
                break;
            }
            *i = src as usize;
        }
        if inside {
            *v = f.values[spec.ravel(&idx)];
        }
    }
    Ok(out)
}

fn mul_coord(f: &Field, axis: usize, c: C64) -> Field {
    let spec = f.spec;
    let stride = spec.stride(axis);
    let n = spec.points;
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * c * spec.coord((k / stride) % n))
        .collect();
    Field { spec, values }
}

fn combine(a: Field, b: Field) -> Result<Field> {
    a.add(&b)
}

/// The derived representation `d tag(basis)` applied to `f`.
///
/// Multiplication terms are exact; derivatives are spectral.
pub fn derived(tag: RepTag, basis: AlgebraBasis, f: &Field, params: &Params) -> Result<Field> {
    let hb = params.hbar;
    let i = C64::new(0.0, 1.0);
    let ipih = i * (PI * hb);
    let d = f.spec.dim;
    let check = |j: usize, n: usize| -> Result<()> {
        if j < n {
            Ok(())
        } else {
            Err(Error::Dimension { expected: n, found: j + 1 })
        }
    };
    match tag {
        RepTag::Schrodinger => match basis {
            AlgebraBasis::S => Ok(f.scale(2.0 * ipih)),
            AlgebraBasis::X(j) => {
                check(j, d)?;
                Ok(spectral_derivative(f, j)?.scale(C64::new(-1.0, 0.0)))
            }
            AlgebraBasis::Y(j) => {
                check(j, d)?;
                Ok(mul_coord(f, j, -2.0 * ipih))
            }
        },
        RepTag::LeftPulled | RepTag::RightPulled => {
            if d % 2 != 0 {
                return Err(Error::Grid("pulled actions need an even-dimensional carrier".into()));
            }
            let n = d / 2;
            let sg = if tag == RepTag::LeftPulled { 1.0 } else { -1.0 };
            match basis {
                AlgebraBasis::S => Ok(f.scale(2.0 * sg * ipih)),
                // dΛ^X = πiℏy − ∂_x, dR^X = πiℏy + ∂_x
                AlgebraBasis::X(j) => {
                    check(j, n)?;
                    combine(mul_coord(f, n + j, ipih), spectral_derivative(f, j)?.scale(C64::new(-sg, 0.0)))
                }
                // dΛ^Y = −πiℏx − ∂_y, dR^Y = −πiℏx + ∂_y
                AlgebraBasis::Y(j) => {
                    check(j, n)?;
                    combine(mul_coord(f, j, -ipih), spectral_derivative(f, n + j)?.scale(C64::new(-sg, 0.0)))
                }
            }
        }
        RepTag::XiTilde => {
            if d % 2 != 0 {
                return Err(Error::Grid("doubled actions need an even-dimensional carrier".into()));
            }
            let n = d / 2;
            let u = params.upsilon;
            let one = |t, b| derived(t, b, f, params);
            match basis {
                AlgebraBasis::S => one(RepTag::LeftPulled, AlgebraBasis::S),
                AlgebraBasis::X(j) if j < n => one(RepTag::LeftPulled, AlgebraBasis::X(j)),
                AlgebraBasis::X(j) if j < 2 * n => {
                    Ok(one(RepTag::RightPulled, AlgebraBasis::Y(j - n))?.scale(C64::new(1.0 / u, 0.0)))
                }
                AlgebraBasis::Y(j) if j < n => one(RepTag::LeftPulled, AlgebraBasis::Y(j)),
                AlgebraBasis::Y(j) if j < 2 * n => {
                    Ok(one(RepTag::RightPulled, AlgebraBasis::X(j - n))?.scale(C64::new(u, 0.0)))
                }
                AlgebraBasis::X(j) | AlgebraBasis::Y(j) => Err(Error::Dimension { expected: 2 * n, found: j + 1 }),
            }
        }
        RepTag::Xi => Err(Error::Unsupported("derived representation of Xi; use XiTilde".into())),
    }
}

/// Ladder operator `a± = (±τ dX_j + i dY_j)/sqrt(2|h|τ)`.
pub fn ladder(tag: RepTag, sign: Sign, tau: f64, j: usize, f: &Field, params: &Params) -> Result<Field> {
    let c = 1.0 / (2.0 * params.h().abs() * tau).sqrt();
    let dx = derived(tag, AlgebraBasis::X(j), f, params)?;
    let dy = derived(tag, AlgebraBasis::Y(j), f, params)?;
    dx.scale(C64::new(sign.value() * tau * c, 0.0)).axpy(C64::new(0.0, c), &dy)
}

/// Truncated `exp(coeff·a±) f = Σ_{k ≤ order} coeff^k/k! (a±)^k f`.
pub fn exp_ladder(
    tag: RepTag,
    sign: Sign,
    tau: f64,
    j: usize,
    coeff: C64,
    f: &Field,
    order: usize,
    params: &Params,
) -> Result<Field> {
    let mut term = f.clone();
    let mut acc = f.clone();
    for k in 1..=order {
        term = ladder(tag, sign, tau, j, &term, params)?.scale(coeff / k as f64);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Displacement operator: the group action at the decomplexified point.
pub fn displacement(tag: RepTag, z: &[C64], f: &Field, params: &Params) -> Result<Field> {
    let p = decomplexify(z, params);
    act(tag, &GroupElement::from_point(&p), f, params)
}

/// `‖Λ(g)R(h)F − R(h)Λ(g)F‖ / ‖F‖`.
pub fn commutation_defect(g: &GroupElement, h: &GroupElement, f: &Field, params: &Params) -> Result<f64> {
    let a = act(RepTag::LeftPulled, g, &act(RepTag::RightPulled, h, f, params)?, params)?;
    let b = act(RepTag::RightPulled, h, &act(RepTag::LeftPulled, g, f, params)?, params)?;
    Ok(a.sub(&b)?.norm() / f.norm())
}

/// Domain reflection `F(x, y) ↦ F(−x, −y)` about the grid centre; the sample
/// at `−L` has no mirror and is set to zero.
pub fn reflect(f: &Field) -> Field {
    let spec = f.spec;
    let n = spec.points;
    let mut idx = vec![0usize; spec.dim];
    let mut out = Field::zeros(spec);
    for (k, v) in out.values.iter_mut().enumerate() {
        spec.unravel(k, &mut idx);
        if idx.iter().any(|&i| i == 0) {
            continue;
        }
        idx.iter_mut().for_each(|i| *i = n - *i);
        *v = f.values[spec.ravel(&idx)];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::group::{complexify, group_mul, PhasePoint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phase_grid() -> GridSpec {
        GridSpec::self_dual(2, 64, 1.0).unwrap()
    }

    fn bump(spec: GridSpec, c: &[f64]) -> Field {
        Field::from_fn(spec, |p| {
            let r2: f64 = p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            C64::from_polar((-PI * r2 / 2.0).exp(), 0.3 * p[0])
        })
    }

    fn phi_tau(spec: GridSpec, tau: f64) -> Field {
        Field::from_fn(spec, |p| C64::new((-PI / (2.0 * tau) * (p[0] * p[0] + tau * tau * p[1] * p[1])).exp(), 0.0))
    }

    fn lattice_elem(rng: &mut ChaCha8Rng, spec: &GridSpec, n: usize) -> GroupElement {
        let d = spec.spacing();
        let mut c = || rng.gen_range(-6i32..=6) as f64 * d;
        let x = (0..n).map(|_| c()).collect();
        let y = (0..n).map(|_| c()).collect();
        GroupElement { s: 0.37, x, y }
    }

    #[test]
    fn identity_and_central_character() {
        let p = Params::default();
        let spec = phase_grid();
        let f = bump(spec, &[0.3, -0.2]);
        for tag in [RepTag::LeftPulled, RepTag::RightPulled] {
            assert_eq!(act(tag, &GroupElement::identity(1), &f, &p).unwrap(), f);
        }
        let cfg = GridSpec::new(1, 8.0, 128).unwrap();
        let g = bump(cfg, &[0.4]);
        let out = act(RepTag::Schrodinger, &GroupElement::scalar(0.25, 0.0, 0.0), &g, &p).unwrap();
        let want = g.scale(C64::from_polar(1.0, 2.0 * PI * 0.25));
        assert!(out.max_dist(&want).unwrap() < 1e-15);
        assert!(act(RepTag::Schrodinger, &GroupElement::identity(1), &f, &p).is_err());
    }

    #[test]
    fn homomorphism_all_tags() {
        let p = Params { upsilon: 1.0, ..Params::default() };
        let spec = phase_grid();
        let f = bump(spec, &[0.3, -0.2]);
        let cfg = spec.wigner_config().unwrap();
        let h = bump(cfg, &[0.1]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            for (tag, n, carrier) in [
                (RepTag::Schrodinger, 1, &h),
                (RepTag::LeftPulled, 1, &f),
                (RepTag::RightPulled, 1, &f),
                (RepTag::XiTilde, 2, &f),
                (RepTag::Xi, 2, &f),
            ] {
                let g1 = lattice_elem(&mut rng, &spec, n);
                let g2 = lattice_elem(&mut rng, &spec, n);
                let two = act(tag, &g1, &act(tag, &g2, carrier, &p).unwrap(), &p).unwrap();
                let one = act(tag, &group_mul(&g1, &g2).unwrap(), carrier, &p).unwrap();
                assert!(two.rel_dist(&one).unwrap() < 1e-10, "{tag:?}");
                assert!((one.norm() / carrier.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fractional_homomorphism() {
        let p = Params::default();
        let spec = phase_grid();
        let f = bump(spec, &[0.3, -0.2]);
        let g1 = GroupElement::scalar(0.1, 0.313, -0.271);
        let g2 = GroupElement::scalar(-0.4, -0.127, 0.519);
        for tag in [RepTag::LeftPulled, RepTag::RightPulled] {
            let two = act(tag, &g1, &act(tag, &g2, &f, &p).unwrap(), &p).unwrap();
            let one = act(tag, &group_mul(&g1, &g2).unwrap(), &f, &p).unwrap();
            assert!(two.rel_dist(&one).unwrap() < 1e-6, "{tag:?}");
            assert!((act(tag, &g1, &f, &p).unwrap().norm() / f.norm() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn left_and_right_commute() {
        let p = Params::default();
        let spec = phase_grid();
        let f = bump(spec, &[0.3, -0.2]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let g = lattice_elem(&mut rng, &spec, 1);
            let h = lattice_elem(&mut rng, &spec, 1);
            assert!(commutation_defect(&g, &h, &f, &p).unwrap() < 1e-10);
        }
        let id = GroupElement::identity(1);
        assert_eq!(commutation_defect(&id, &id, &f, &p).unwrap(), 0.0);
        let g = GroupElement::scalar(0.0, 0.217, -0.43);
        let h = GroupElement::scalar(0.0, -0.33, 0.151);
        assert!(commutation_defect(&g, &h, &f, &p).unwrap() < 1e-6);
    }

    #[test]
    fn reflection_conjugation_and_swap() {
        let p = Params::default();
        let neg = Params { hbar: -1.0, ..p };
        let spec = phase_grid();
        let f = bump(spec, &[0.3, -0.2]);
        let d = spec.spacing();
        let g = GroupElement::scalar(0.2, 3.0 * d, -5.0 * d);
        let lhs = act(RepTag::LeftPulled, &g, &reflect(&f), &p).unwrap();
        let rhs = reflect(&act(RepTag::RightPulled, &g, &f, &neg).unwrap());
        assert!(lhs.rel_dist(&rhs).unwrap() < 1e-6);

        let gm = GroupElement { s: g.s, x: vec![-g.x[0]], y: vec![-g.y[0]] };
        let lhs = act(RepTag::LeftPulled, &gm, &f.conj(), &p).unwrap();
        let rhs = act(RepTag::RightPulled, &g, &f, &p).unwrap().conj();
        assert!(lhs.rel_dist(&rhs).unwrap() < 1e-10);

        // Λ(−s,−x,−y)f(x',y') = R(s,x',y')f(x,y) at sampled lattice pairs.
        let n = spec.points;
        for &(a, b, c, e) in &[(30usize, 35usize, 28usize, 33usize), (33, 29, 36, 31), (32, 32, 25, 38)] {
            let (x, y, xp, yp) = (spec.coord(a), spec.coord(b), spec.coord(c), spec.coord(e));
            let s = 0.15;
            let l = act(RepTag::LeftPulled, &GroupElement::scalar(-s, -x, -y), &f, &p).unwrap();
            let r = act(RepTag::RightPulled, &GroupElement::scalar(s, xp, yp), &f, &p).unwrap();
            assert!((l.values[c * n + e] - r.values[a * n + b]).norm() < 1e-6);
        }
    }

    #[test]
    fn shift_and_modulation_factorizations() {
        let p = Params::default();
        let spec = phase_grid();
        let f = bump(spec, &[0.3, -0.2]);
        let (x, y) = (0.75, -0.5);
        for s in [0.0, 0.8] {
            let sh = act(
                RepTag::LeftPulled,
                &GroupElement::scalar(s, x / 2.0, y / 2.0),
                &act(RepTag::RightPulled, &GroupElement::scalar(s, -x / 2.0, -y / 2.0), &f, &p).unwrap(),
                &p,
            )
            .unwrap();
            let want = Field::from_fn(spec, |q| {
                let r2 = (q[0] - 0.3 - x).powi(2) + (q[1] + 0.2 - y).powi(2);
                C64::from_polar((-PI * r2 / 2.0).exp(), 0.3 * (q[0] - x))
            });
            assert!(sh.rel_dist(&want).unwrap() < 1e-6);
            let md = act(
                RepTag::LeftPulled,
                &GroupElement::scalar(s, x / 2.0, y / 2.0),
                &act(RepTag::RightPulled, &GroupElement::scalar(s, x / 2.0, y / 2.0), &f, &p).unwrap(),
                &p,
            )
            .unwrap();
            let mut want_m = f.clone();
            modulate(&mut want_m, |q| PI * (x * q[1] - y * q[0]));
            assert!(md.rel_dist(&want_m).unwrap() < 1e-6);
        }
    }

    #[test]
    fn derived_reps() {
        let p = Params::default();
        let spec = phase_grid();
        let phi = phi_tau(spec, 1.0);
        let dy = derived(RepTag::LeftPulled, AlgebraBasis::Y(0), &phi, &p).unwrap();
        let want = Field::from_fn(spec, |q| {
            let g = (-PI / 2.0 * (q[0] * q[0] + q[1] * q[1])).exp();
            C64::new(PI * q[1] * g, -PI * q[0] * g)
        });
        assert!(dy.max_dist(&want).unwrap() < 1e-8);
        let cfg = spec.wigner_config().unwrap();
        let v = bump(cfg, &[0.2]);
        let ds = derived(RepTag::Schrodinger, AlgebraBasis::S, &v, &p).unwrap();
        assert!(ds.max_dist(&v.scale(C64::new(0.0, 2.0 * PI))).unwrap() < 1e-15);
        let f = bump(spec, &[0.3, -0.2]);
        let eps = 1e-4;
        for (tag, basis, g) in [
            (RepTag::LeftPulled, AlgebraBasis::X(0), GroupElement::scalar(0.0, eps, 0.0)),
            (RepTag::LeftPulled, AlgebraBasis::Y(0), GroupElement::scalar(0.0, 0.0, eps)),
            (RepTag::RightPulled, AlgebraBasis::X(0), GroupElement::scalar(0.0, eps, 0.0)),
            (RepTag::RightPulled, AlgebraBasis::Y(0), GroupElement::scalar(0.0, 0.0, eps)),
            (RepTag::LeftPulled, AlgebraBasis::S, GroupElement::scalar(eps, 0.0, 0.0)),
        ] {
            let fd = act(tag, &g, &f, &p).unwrap().sub(&f).unwrap().scale(C64::new(1.0 / eps, 0.0));
            let an = derived(tag, basis, &f, &p).unwrap();
            assert!(fd.rel_dist(&an).unwrap() < 1e-3, "{tag:?} {basis:?}");
            assert!(fd.max_dist(&an).unwrap() < 1e-3 * an.max_abs());
        }
        assert!(derived(RepTag::Xi, AlgebraBasis::S, &f, &p).is_err());
    }

    #[test]
    fn ladders_on_gaussians() {
        let p = Params::default();
        let spec = phase_grid();
        for tau in [0.5, 1.0, 2.0] {
            let phi = phi_tau(spec, tau);
            let lm = ladder(RepTag::LeftPulled, Sign::Minus, tau, 0, &phi, &p).unwrap();
            assert!(lm.max_abs() < 1e-8, "tau {tau}: {}", lm.max_abs());
            let rp = ladder(RepTag::RightPulled, Sign::Plus, tau, 0, &phi, &p).unwrap();
            assert!(rp.max_abs() < 1e-8);
        }
        let f = bump(spec, &[0.3, -0.2]);
        let g = bump(spec, &[-0.5, 0.1]);
        let a = ladder(RepTag::LeftPulled, Sign::Plus, 1.0, 0, &f, &p).unwrap();
        let b = ladder(RepTag::LeftPulled, Sign::Minus, 1.0, 0, &g, &p).unwrap();
        let l = crate::grid::inner_product(&a, &g).unwrap();
        let r = crate::grid::inner_product(&f, &b).unwrap();
        assert!((l - r).norm() < 1e-8);
    }

    #[test]
    fn displacement_composition_phase() {
        let p = Params::default();
        let spec = phase_grid();
        let f = bump(spec, &[0.1, 0.2]);
        let d = spec.spacing();
        let z1 = complexify(&PhasePoint { x: vec![4.0 * d], y: vec![-2.0 * d] }, &p);
        let z2 = complexify(&PhasePoint { x: vec![-3.0 * d], y: vec![5.0 * d] }, &p);
        let sum = [z1[0] + z2[0]];
        assert_eq!(displacement(RepTag::LeftPulled, &[C64::new(0.0, 0.0)], &f, &p).unwrap(), f);
        for tag in [RepTag::LeftPulled, RepTag::RightPulled] {
            let two =
                displacement(tag, &z1, &displacement(tag, &z2, &f, &p).unwrap(), &p).unwrap();
            // [a⁻, a⁺] = ±I fixes the cocycle e^{∓i·Im(z1·conj z2)}.
            let sgn = if tag == RepTag::LeftPulled { 1.0 } else { -1.0 };
            let ph = C64::from_polar(1.0, -sgn * (z1[0] * z2[0].conj()).im);
            let one = displacement(tag, &sum, &f, &p).unwrap().scale(ph);
            assert!(two.rel_dist(&one).unwrap() < 1e-8, "{tag:?}");
        }
    }

    #[test]
    fn kermack_mccrae_on_vacuum() {
        let p = Params::default();
        let spec = phase_grid();
        let phi = phi_tau(spec, 1.0);
        // Truncating both series at order 12 leaves the coherent-state tail
        // sqrt(e^{-|z|²} Σ_{k>12} |z|^{2k}/k!), about 8e-6 at |z| = 1.
        let tail = |r2: f64| {
            let mut term = 1.0;
            let mut sum = 0.0;
            for k in 1..60 {
                term *= r2 / k as f64;
                if k > 12 {
                    sum += term;
                }
            }
            (sum * (-r2).exp()).sqrt()
        };
        for z in [C64::new(0.4, -0.3), C64::new(-0.5, 0.45), C64::new(-0.6, 0.7), C64::new(1.0, 0.0)] {
            let gauss = (-z.norm_sqr() / 2.0).exp();
            let tol = if z.norm() <= 0.7 { 1e-6 } else { 1.05 * tail(z.norm_sqr()) + 1e-8 };
            let r = displacement(RepTag::RightPulled, &[z], &phi, &p).unwrap();
            let inner = exp_ladder(RepTag::RightPulled, Sign::Plus, 1.0, 0, z.conj(), &phi, 12, &p).unwrap();
            let km = exp_ladder(RepTag::RightPulled, Sign::Minus, 1.0, 0, -z, &inner, 12, &p)
                .unwrap()
                .scale(C64::new(gauss, 0.0));
            assert!(r.rel_dist(&km).unwrap() < tol, "R: {}", r.rel_dist(&km).unwrap());
            let l = displacement(RepTag::LeftPulled, &[z], &phi, &p).unwrap();
            let inner = exp_ladder(RepTag::LeftPulled, Sign::Minus, 1.0, 0, -z, &phi, 12, &p).unwrap();
            let km = exp_ladder(RepTag::LeftPulled, Sign::Plus, 1.0, 0, z.conj(), &inner, 12, &p)
                .unwrap()
                .scale(C64::new(gauss, 0.0));
            assert!(l.rel_dist(&km).unwrap() < tol, "Λ: {}", l.rel_dist(&km).unwrap());
        }
    }

    /// Ξ matches the dilated Ξ̃ evaluated from closed forms.
    #[test]
    fn xi_is_dilated_xi_tilde() {
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let gauss = |a: f64, b: f64| C64::from_polar((-PI * 0.5 * (a * a + (b - 0.3) * (b - 0.3))).exp(), 0.4 * b);
        for u in [1.0, 2.0] {
            let p = Params { upsilon: u, ..Params::default() };
            let (s, x1, x2, y1, y2) = (0.3, 0.5, -0.25, 0.75, 0.125);
            let g = GroupElement { s, x: vec![x1, x2], y: vec![y1, y2] };
            // [Ξ̃(g)F](a,b) = Λ(s,x1,y1)R(0,υy2,x2/υ)F in closed form.
            let xi_tilde = |a: f64, b: f64| {
                let (ra, rb) = (u * y2, x2 / u);
                let ph = PI * (2.0 * s + x1 * b - y1 * a + ra * (b - y1) - rb * (a - x1));
                C64::from_polar(1.0, ph) * gauss(a - x1 + ra, b - y1 + rb)
            };
            let dilated = Field::from_fn(spec, |t| gauss(u * t[0], t[1]));
            let lhs = act(RepTag::Xi, &g, &dilated, &p).unwrap();
            let rhs = Field::from_fn(spec, |t| xi_tilde(u * t[0], t[1]));
            assert!(lhs.rel_dist(&rhs).unwrap() < 1e-6, "υ = {u}");
            let sampled = Field::from_fn(spec, |t| gauss(t[0], t[1]));
            let via_grid = partial_dilation(&sampled, u).unwrap();
            assert!(via_grid.rel_dist(&dilated).unwrap() < 1e-12);
        }
        assert!(partial_dilation(&Field::zeros(spec), 0.5).is_err());
    }

    #[test]
    fn xi_is_schrodinger_after_a() {
        // Ξ(g) = ρ(ỹ, −x̃) with (x̃, ỹ) = A g: A followed by the symplectic
        // quarter turn (x, y) ↦ (y, −x) lands on the Schrödinger picture.
        let spec = GridSpec::new(2, 8.0, 128).unwrap();
        let f = Field::from_fn(spec, |t| {
            C64::from_polar((-PI * 0.5 * (t[0] * t[0] + (t[1] - 0.2).powi(2))).exp(), 0.3 * t[0])
        });
        for u in [1.0, 2.0] {
            let p = Params { upsilon: u, ..Params::default() };
            let g = GroupElement { s: 0.2, x: vec![0.375, -0.25], y: vec![0.5, 0.125] };
            let ag = crate::group::automorphism_a(&g, u).unwrap();
            let turned = GroupElement { s: ag.s, x: ag.y.clone(), y: ag.x.iter().map(|v| -v).collect() };
            let xi = act(RepTag::Xi, &g, &f, &p).unwrap();
            let rho = act(RepTag::Schrodinger, &turned, &f, &p).unwrap();
            assert!(rho.rel_dist(&xi).unwrap() < 1e-8, "υ = {u}");
        }
    }
}
