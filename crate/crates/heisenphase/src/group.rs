//! Heisenberg group arithmetic, the symplectic form and the change-of-variable
//! maps used for two-sided convolutions.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::C64;

/// A point `(s, x, y)` of `H^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub s: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// A point `(x, y)` of phase space `R^{2n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Planck parameter, squeezes and the unit adjustment `υ` of the doubled group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub hbar: f64,
    pub tau: f64,
    pub sigma: f64,
    pub upsilon: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { hbar: 1.0, tau: 1.0, sigma: 1.0, upsilon: 1.0 }
    }
}

impl Params {
    pub fn new(hbar: f64, tau: f64, sigma: f64, upsilon: f64) -> Result<Self> {
        let p = Params { hbar, tau, sigma, upsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.hbar.is_finite() || self.hbar == 0.0 {
            return Err(Error::Param(format!("hbar must be finite and nonzero, got {}", self.hbar)));
        }
        for (name, v) in [("tau", self.tau), ("sigma", self.sigma), ("upsilon", self.upsilon)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Param(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `h = 2πℏ`.
    pub fn h(&self) -> f64 {
        std::f64::consts::TAU * self.hbar
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_upsilon(mut self, upsilon: f64) -> Self {
        self.upsilon = upsilon;
        self
    }
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_dim(x.len(), y.len())?;
        Ok(PhasePoint { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn origin(n: usize) -> Self {
        PhasePoint { x: vec![0.0; n], y: vec![0.0; n] }
    }
}

impl GroupElement {
    pub fn new(s: f64, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Param("group elements need n >= 1".into()));
        }
        check_dim(x.len(), y.len())?;
        Ok(GroupElement { s, x, y })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement { s: 0.0, x: vec![0.0; n], y: vec![0.0; n] }
    }

    /// The element `(0, x, y)` over a phase point.
    pub fn from_point(p: &PhasePoint) -> Self {
        GroupElement { s: 0.0, x: p.x.clone(), y: p.y.clone() }
    }

    /// Shorthand for `n = 1`.
    pub fn scalar(s: f64, x: f64, y: f64) -> Self {
        GroupElement { s, x: vec![x], y: vec![y] }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn point(&self) -> PhasePoint {
        PhasePoint { x: self.x.clone(), y: self.y.clone() }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// `ω((x1,y1),(x2,y2)) = x1·y2 − x2·y1`.
pub fn symplectic_form(p1: &PhasePoint, p2: &PhasePoint) -> Result<f64> {
    check_dim(p1.n(), p2.n())?;
    Ok(omega(&p1.x, &p1.y, &p2.x, &p2.y))
}

pub(crate) fn omega(x1: &[f64], y1: &[f64], x2: &[f64], y2: &[f64]) -> f64 {
    dot(x1, y2) - dot(x2, y1)
}

pub fn group_mul(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    check_dim(g1.n(), g2.n())?;
    let w = omega(&g1.x, &g1.y, &g2.x, &g2.y);
    Ok(GroupElement {
        s: g1.s + g2.s + 0.5 * w,
        x: g1.x.iter().zip(&g2.x).map(|(a, b)| a + b).collect(),
        y: g1.y.iter().zip(&g2.y).map(|(a, b)| a + b).collect(),
    })
}

pub fn group_inv(g: &GroupElement) -> GroupElement {
    GroupElement {
        s: -g.s,
        x: g.x.iter().map(|v| -v).collect(),
        y: g.y.iter().map(|v| -v).collect(),
    }
}

/// The symplectic automorphism `A` of `H^{2n}` intertwining the doubled
/// action with the Schrödinger representation.
///
/// `g.x = [x1, x2]`, `g.y = [y1, y2]` (each block of length n).
pub fn automorphism_a(g: &GroupElement, upsilon: f64) -> Result<GroupElement> {
    if g.n() % 2 != 0 {
        return Err(Error::Dimension { expected: 2 * (g.n() / 2 + 1), found: g.n() });
    }
    let n = g.n() / 2;
    let u = upsilon;
    let (x1, x2) = g.x.split_at(n);
    let (y1, y2) = g.y.split_at(n);
    let mut x = vec![0.0; 2 * n];
    let mut y = vec![0.0; 2 * n];
    for j in 0..n {
        x[j] = -0.5 * x2[j] - 0.5 * u * y1[j];
        x[n + j] = 0.5 * x1[j] + 0.5 * u * y2[j];
        y[j] = x1[j] / u - y2[j];
        y[n + j] = -x2[j] / u + y1[j];
    }
    Ok(GroupElement { s: g.s, x, y })
}

/// `B(x1,x2,y1,y2) = (x1, y1, υ·y2, x2/υ)`: doubled-group coordinates to
/// kernel coordinates. Points are flat slices of length `4n`.
pub fn map_b(p: &[f64], upsilon: f64) -> Result<Vec<f64>> {
    let n = quarter(p.len())?;
    let mut out = Vec::with_capacity(4 * n);
    out.extend_from_slice(&p[..n]);
    out.extend_from_slice(&p[2 * n..3 * n]);
    out.extend(p[3 * n..].iter().map(|v| upsilon * v));
    out.extend(p[n..2 * n].iter().map(|v| v / upsilon));
    Ok(out)
}

/// Inverse of [`map_b`].
pub fn map_b_inv(q: &[f64], upsilon: f64) -> Result<Vec<f64>> {
    let n = quarter(q.len())?;
    let mut out = Vec::with_capacity(4 * n);
    out.extend_from_slice(&q[..n]);
    out.extend(q[3 * n..].iter().map(|v| upsilon * v));
    out.extend_from_slice(&q[n..2 * n]);
    out.extend(q[2 * n..3 * n].iter().map(|v| v / upsilon));
    Ok(out)
}

fn quarter(len: usize) -> Result<usize> {
    if len == 0 || len % 4 != 0 {
        return Err(Error::Dimension { expected: 4 * (len / 4).max(1), found: len });
    }
    Ok(len / 4)
}

/// `z = sqrt(|h|/(2τ))·(x + iτy)` componentwise.
pub fn complexify(p: &PhasePoint, params: &Params) -> Vec<C64> {
    let c = (params.h().abs() / (2.0 * params.tau)).sqrt();
    p.x.iter().zip(&p.y).map(|(&x, &y)| C64::new(c * x, c * params.tau * y)).collect()
}

pub fn decomplexify(z: &[C64], params: &Params) -> PhasePoint {
    let c = (params.h().abs() / (2.0 * params.tau)).sqrt();
    PhasePoint {
        x: z.iter().map(|w| w.re / c).collect(),
        y: z.iter().map(|w| w.im / (c * params.tau)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> PhasePoint {
        PhasePoint { x: vec![x], y: vec![y] }
    }

    #[test]
    fn symplectic_form_examples() {
        assert_eq!(symplectic_form(&pt(1.0, 0.0), &pt(0.0, 1.0)).unwrap(), 1.0);
        assert_eq!(symplectic_form(&pt(2.0, 3.0), &pt(5.0, 7.0)).unwrap(), -1.0);
        assert_eq!(symplectic_form(&pt(2.5, -1.0), &pt(2.5, -1.0)).unwrap(), 0.0);
        let q = PhasePoint { x: vec![1.0, 2.0], y: vec![0.0, 1.0] };
        assert!(symplectic_form(&pt(1.0, 1.0), &q).is_err());
    }

    #[test]
    fn group_law_examples() {
        let a = GroupElement::scalar(0.0, 1.0, 0.0);
        let b = GroupElement::scalar(0.0, 0.0, 1.0);
        assert_eq!(group_mul(&a, &b).unwrap(), GroupElement::scalar(0.5, 1.0, 1.0));
        let c = GroupElement::scalar(1.0, 1.0, 1.0);
        assert_eq!(group_mul(&c, &c).unwrap(), GroupElement::scalar(2.0, 2.0, 2.0));
        let g = GroupElement::scalar(1.0, 2.0, 3.0);
        assert_eq!(group_inv(&g), GroupElement::scalar(-1.0, -2.0, -3.0));
        assert_eq!(group_mul(&g, &group_inv(&g)).unwrap(), GroupElement::identity(1));
        let two = GroupElement::identity(2);
        assert!(group_mul(&g, &two).is_err());
    }

    #[test]
    fn automorphism_examples() {
        let g = GroupElement::new(0.0, vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let a = automorphism_a(&g, 1.0).unwrap();
        assert_eq!(a.x, vec![0.0, 0.5]);
        assert_eq!(a.y, vec![1.0, 0.0]);
        let z = automorphism_a(&GroupElement::identity(2), 1.0).unwrap();
        assert_eq!(z, GroupElement::identity(2));
        assert!(automorphism_a(&GroupElement::identity(1), 1.0).is_err());
    }

    #[test]
    fn map_b_examples() {
        assert_eq!(map_b(&[1.0, 2.0, 3.0, 4.0], 1.0).unwrap(), vec![1.0, 3.0, 4.0, 2.0]);
        assert_eq!(map_b(&[0.0, 4.0, 0.0, 1.0], 2.0).unwrap(), vec![0.0, 0.0, 2.0, 2.0]);
        assert!(map_b(&[1.0, 2.0, 3.0], 1.0).is_err());
    }

    #[test]
    fn complexify_examples() {
        let p = Params { hbar: 1.0 / std::f64::consts::TAU, ..Params::default() };
        let z = complexify(&pt(1.0, 0.0), &p);
        assert!((z[0].re - 0.5f64.sqrt()).abs() < 1e-15 && z[0].im == 0.0);
        assert_eq!(complexify(&pt(0.0, 0.0), &p)[0], C64::new(0.0, 0.0));
    }

    fn elem(n: usize) -> impl Strategy<Value = GroupElement> {
        (
            -3.0f64..3.0,
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-3.0f64..3.0, n),
        )
            .prop_map(|(s, x, y)| GroupElement { s, x, y })
    }

    /// 4×4 matrix of `A` applied by plain matrix-vector product.
    fn a_matrix(p: [f64; 4], u: f64) -> [f64; 4] {
        let m = [
            [0.0, -0.5, -u / 2.0, 0.0],
            [0.5, 0.0, 0.0, u / 2.0],
            [1.0 / u, 0.0, 0.0, -1.0],
            [0.0, -1.0 / u, 1.0, 0.0],
        ];
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|j| m[i][j] * p[j]).sum();
        }
        out
    }

    proptest! {
        #[test]
        fn associativity(a in elem(2), b in elem(2), c in elem(2)) {
            let l = group_mul(&group_mul(&a, &b).unwrap(), &c).unwrap();
            let r = group_mul(&a, &group_mul(&b, &c).unwrap()).unwrap();
            prop_assert!((l.s - r.s).abs() <= 1e-12 * (1.0 + l.s.abs()));
            for (u, v) in l.x.iter().chain(&l.y).zip(r.x.iter().chain(&r.y)) {
                prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()));
            }
        }

        #[test]
        fn form_is_bilinear_antisymmetric(
            a in prop::collection::vec(-5.0f64..5.0, 4),
            b in prop::collection::vec(-5.0f64..5.0, 4),
            c in prop::collection::vec(-5.0f64..5.0, 4),
            t in -2.0f64..2.0,
        ) {
            let p = PhasePoint { x: a[..2].to_vec(), y: a[2..].to_vec() };
            let q = PhasePoint { x: b[..2].to_vec(), y: b[2..].to_vec() };
            let r = PhasePoint { x: c[..2].to_vec(), y: c[2..].to_vec() };
            let w = |u: &PhasePoint, v: &PhasePoint| symplectic_form(u, v).unwrap();
            prop_assert!((w(&p, &q) + w(&q, &p)).abs() < 1e-12);
            let lin = PhasePoint {
                x: p.x.iter().zip(&r.x).map(|(u, v)| t * u + v).collect(),
                y: p.y.iter().zip(&r.y).map(|(u, v)| t * u + v).collect(),
            };
            prop_assert!((w(&lin, &q) - t * w(&p, &q) - w(&r, &q)).abs() < 1e-10);
        }

        #[test]
        fn automorphism_matches_matrix_and_is_symplectic(
            p in prop::collection::vec(-4.0f64..4.0, 4),
            q in prop::collection::vec(-4.0f64..4.0, 4),
            u in 0.25f64..4.0,
        ) {
            let g = GroupElement { s: 0.3, x: p[..2].to_vec(), y: p[2..].to_vec() };
            let h = GroupElement { s: -1.1, x: q[..2].to_vec(), y: q[2..].to_vec() };
            let ag = automorphism_a(&g, u).unwrap();
            let m = a_matrix([p[0], p[1], p[2], p[3]], u);
            for (got, want) in ag.x.iter().chain(&ag.y).zip(m) {
                prop_assert!((got - want).abs() < 1e-12);
            }
            let ah = automorphism_a(&h, u).unwrap();
            let w0 = omega(&g.x, &g.y, &h.x, &h.y);
            let w1 = omega(&ag.x, &ag.y, &ah.x, &ah.y);
            prop_assert!((w0 - w1).abs() < 1e-10 * (1.0 + w0.abs()));
            let lhs = automorphism_a(&group_mul(&g, &h).unwrap(), u).unwrap();
            let rhs = group_mul(&ag, &ah).unwrap();
            prop_assert!((lhs.s - rhs.s).abs() < 1e-10 * (1.0 + lhs.s.abs()));
        }

        #[test]
        fn inverses_round_trip(p in prop::collection::vec(-4.0f64..4.0, 4), u in 0.25f64..4.0, g in elem(1)) {
            let back = map_b_inv(&map_b(&p, u).unwrap(), u).unwrap();
            for (a, b) in back.iter().zip(&p) {
                prop_assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
            }
            prop_assert_eq!(group_inv(&group_inv(&g)), g.clone());
            let params = Params { tau: u, ..Params::default() };
            let z = complexify(&g.point(), &params);
            let back = decomplexify(&z, &params);
            prop_assert!((back.x[0] - g.x[0]).abs() < 1e-12 && (back.y[0] - g.y[0]).abs() < 1e-12);
        }
    }
}
