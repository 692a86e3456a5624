//! The identity suites behind `verify`. Each suite is a pure function of
//! the scenario and returns its checks in a fixed order.

use std::f64::consts::PI;

use heisenphase::calculus::{
    compose_symbols_exact, cross_toeplitz_apply, guillemin_symbol, integrated, moyal_compose, pdo_kernel,
    toeplitz_conv_kernel, twisted_convolution, vacuum_window, weyl_symbol_from_kernel,
};
use heisenphase::fsb::{
    fsb_gaussian, fsb_project, fsb_project_twisted, gaussian_vacuum, hermite_vector, lattice_vector, mixed_gaussian,
    uncertainty, LatticeIndex,
};
use heisenphase::grid::inner_product;
use heisenphase::group::group_mul;
use heisenphase::reps::{act, commutation_defect, ladder, RepTag, Sign};
use heisenphase::transforms::{
    contravariant, covariant, euclidean_shift, exp_multiplier, fourier_wigner, symplectic_fourier, Window,
};
use heisenphase::twosided::{
    self, compose, compose_direct, cross_toeplitz_kernel, cross_toeplitz_pdo_symbol, cross_toeplitz_symbol_fsb,
    doubled_pdo_symbol, in_doubled_chart, is_cross_toeplitz_type, schwartz_from_twosided, symbol_from_kernel,
    twosided_from_schwartz, xi_reduction_check, TwoSidedKernel, COMPOSE_CAP, DIRECT_COMPOSE_CAP,
};
use heisenphase::{Field, GridSpec, GroupElement, Params, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ScenarioConfig, Suite, Tier};

/// One measured identity. `scaled` checks follow the tolerance tier;
/// the others encode a structural property (a ratio against 1).
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub scaled: bool,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), residual, tolerance, scaled: true }
    }

    /// Passes iff `value ≥ bound`.
    fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), residual: bound / value.max(f64::MIN_POSITIVE), tolerance: 1.0, scaled: false }
    }

    /// Passes iff `value < other`, i.e. their ratio stays below one.
    fn decreasing(name: impl Into<String>, value: f64, previous: f64) -> Self {
        let r = if previous > 0.0 { value / previous } else { f64::INFINITY };
        Check { name: name.into(), residual: r, tolerance: 1.0 - 1e-12, scaled: false }
    }

    pub fn tolerance_for(&self, tier: Tier) -> f64 {
        if self.scaled {
            tier.apply(self.tolerance)
        } else {
            self.tolerance
        }
    }
}

/// Grids and parameters shared by the suites.
pub struct Context {
    pub params: Params,
    pub phase: GridSpec,
    pub r4: GridSpec,
    pub seed: u64,
    pub squeezes: Vec<f64>,
    pub pairs: Vec<(f64, f64)>,
    pub tau: f64,
    pub sigma: f64,
}

fn push_unique<T: PartialEq + Copy>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}

impl Context {
    pub fn new(cfg: &ScenarioConfig) -> std::result::Result<Self, crate::CliError> {
        let mut squeezes = vec![0.5, 1.0, 2.0];
        push_unique(&mut squeezes, cfg.tau);
        push_unique(&mut squeezes, cfg.sigma);
        let mut pairs = vec![(1.0, 1.0), (0.5, 2.0), (2.0, 1.0)];
        push_unique(&mut pairs, (cfg.tau, cfg.sigma));
        Ok(Context {
            params: cfg.params()?,
            phase: cfg.phase_grid()?,
            r4: cfg.r4_grid()?,
            seed: cfg.seed,
            squeezes,
            pairs,
            tau: cfg.tau,
            sigma: cfg.sigma,
        })
    }

    fn config(&self) -> Result<GridSpec> {
        self.phase.wigner_config()
    }
}

pub fn run_suite(suite: Suite, ctx: &Context) -> Result<Vec<Check>> {
    match suite {
        Suite::Groups => groups(ctx),
        Suite::Sesqui => sesqui(ctx),
        Suite::Reconstruction => reconstruction(ctx),
        Suite::Fourier => fourier(ctx),
        Suite::Projection => projection(ctx),
        Suite::Ladders => ladders(ctx),
        Suite::Twisted => twisted(ctx),
        Suite::Guillemin => guillemin(ctx),
        Suite::Moyal => moyal(ctx),
        Suite::Twosided => two_sided(ctx),
        Suite::CrossToeplitz => cross_toeplitz(ctx),
        Suite::Uncertainty => uncertainty_suite(ctx),
    }
}

fn real(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn gauss(spec: GridSpec, c: [f64; 2], width: f64) -> Field {
    Field::from_fn(spec, |q| real((-PI * ((q[0] - c[0]).powi(2) + (q[1] - c[1]).powi(2)) / width).exp()))
}

fn chirped(spec: GridSpec, c: [f64; 2], width: f64, k: f64) -> Field {
    Field::from_fn(spec, |q| {
        let r2 = (q[0] - c[0]).powi(2) + (q[1] - c[1]).powi(2);
        C64::from_polar((-PI * r2 / width).exp(), k * (q[0] - 0.5 * q[1]))
    })
}

fn rel_max(a: &Field, b: &Field) -> Result<f64> {
    Ok(a.max_dist(b)? / b.max_abs().max(1e-300))
}

// ---------------------------------------------------------------- groups

fn lattice_elem(rng: &mut ChaCha8Rng, d: f64, n: usize) -> GroupElement {
    let s = rng.gen_range(-1.0..1.0);
    let mut c = || rng.gen_range(-6i32..=6) as f64 * d;
    let x = (0..n).map(|_| c()).collect();
    let y = (0..n).map(|_| c()).collect();
    GroupElement { s, x, y }
}

fn fractional_elem(rng: &mut ChaCha8Rng, n: usize) -> GroupElement {
    let s = rng.gen_range(-1.0..1.0);
    let mut c = || rng.gen_range(-0.6..0.6);
    let x = (0..n).map(|_| c()).collect();
    let y = (0..n).map(|_| c()).collect();
    GroupElement { s, x, y }
}

const PAIRS: usize = 20;

fn groups(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let phase = ctx.phase;
    let config = ctx.config()?;
    let d = phase.spacing();
    let f = Field::from_fn(phase, |q| {
        C64::from_polar((-PI * ((q[0] - 0.3).powi(2) + (q[1] + 0.2).powi(2)) / 2.0).exp(), 0.3 * q[0])
    });
    let h = Field::from_fn(config, |t| C64::from_polar((-PI * (t[0] - 0.1).powi(2) / 2.0).exp(), 0.3 * t[0]));
    let reps = [
        (RepTag::Schrodinger, "ρ", 1, &h),
        (RepTag::LeftPulled, "Λ", 1, &f),
        (RepTag::RightPulled, "R", 1, &f),
        (RepTag::XiTilde, "Ξ̃", 2, &f),
    ];
    let mut checks = Vec::new();
    for (lattice, tol) in [(true, 1e-10), (false, 1e-6)] {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        for (tag, label, n, carrier) in reps {
            let mut worst = 0.0_f64;
            for _ in 0..PAIRS {
                let (g1, g2) = if lattice {
                    (lattice_elem(&mut rng, d, n), lattice_elem(&mut rng, d, n))
                } else {
                    (fractional_elem(&mut rng, n), fractional_elem(&mut rng, n))
                };
                let two = act(tag, &g1, &act(tag, &g2, carrier, &p)?, &p)?;
                let one = act(tag, &group_mul(&g1, &g2)?, carrier, &p)?;
                worst = worst.max(two.rel_dist(&one)?);
            }
            let kind = if lattice { "lattice-aligned" } else { "fractional" };
            checks.push(Check::new(format!("homomorphism {label}(g){label}(h) = {label}(gh), {kind}"), worst, tol));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x5eed);
    let mut worst = 0.0_f64;
    for _ in 0..PAIRS {
        let g = lattice_elem(&mut rng, d, 1);
        let k = lattice_elem(&mut rng, d, 1);
        worst = worst.max(commutation_defect(&g, &k, &f, &p)?);
    }
    checks.push(Check::new("left-right commutation Λ(g)R(h) = R(h)Λ(g), lattice-aligned", worst, 1e-10));
    Ok(checks)
}

// ---------------------------------------------------------------- transforms

fn hermites(tau: f64, p: &Params, grid: &GridSpec) -> Result<Vec<Field>> {
    (0..4).map(|m| hermite_vector(m, tau, p, grid)).collect()
}

fn sesqui(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let config = ctx.config()?;
    let mut checks = Vec::new();
    for &tau in &ctx.squeezes {
        let hs = hermites(tau, &p, &config)?;
        let windows: Vec<Window> = hs.iter().cloned().map(Window::new).collect::<Result<_>>()?;
        // w[a][c] = W(h_a, h_c)
        let w: Vec<Vec<Field>> = hs
            .iter()
            .map(|f| windows.iter().map(|phi| fourier_wigner(f, phi, &p)).collect())
            .collect::<Result<_>>()?;
        let (mut num, mut den) = (0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                let fab = inner_product(&hs[a], &hs[b])?;
                for c in 0..4 {
                    for e in 0..4 {
                        let lhs = inner_product(&w[a][c], &w[b][e])?;
                        let rhs = fab * inner_product(&hs[c], &hs[e])?.conj();
                        num += (lhs - rhs).norm_sqr();
                        den += rhs.norm_sqr();
                    }
                }
            }
        }
        checks.push(Check::new(
            format!("sesqui-unitarity ⟨W(f1,φ1),W(f2,φ2)⟩ = ⟨f1,f2⟩⟨φ2,φ1⟩, Hermite ≤ 3 (τ={tau})"),
            (num / den).sqrt(),
            1e-6,
        ));
    }
    Ok(checks)
}

fn reconstruction(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let config = ctx.config()?;
    let phi1 = Window::new(gaussian_vacuum(1.0, &p, &config)?)?;
    let phi2 = Window::new(gaussian_vacuum(2.0, &p, &config)?)?;
    let h1 = Window::new(hermite_vector(1, 1.0, &p, &config)?)?;
    let f = hermite_vector(2, 1.0, &p, &config)?.add(&hermite_vector(0, 0.5, &p, &config)?)?;
    let mut checks = Vec::new();
    for (theta, psi, label) in [(&phi1, &phi1, "(φ1,φ1)"), (&phi1, &phi2, "(φ1,φ2)"), (&phi1, &h1, "(φ1,H1)")] {
        let back = contravariant(&covariant(&f, theta, &p)?, psi, &p)?;
        let want = f.scale(inner_product(&psi.vector, &theta.vector)?);
        checks.push(Check::new(
            format!("reconstruction M_ψ W_θ f = ⟨ψ,θ⟩ f, (θ,ψ) = {label}"),
            back.sub(&want)?.norm() / f.norm(),
            1e-6,
        ));
    }
    Ok(checks)
}

fn fourier(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let phase = ctx.phase;
    let g = Field::from_fn(phase, |q| C64::from_polar((-PI * (q[0] * q[0] + 2.0 * (q[1] - 0.3).powi(2))).exp(), q[0]));
    let sf = |f: &Field| symplectic_fourier(f, &p);
    let mut checks = vec![Check::new("symplectic-fourier involution ⌢⌢f = f", rel_max(&sf(&sf(&g)?)?, &g)?, 1e-12)];
    let mut worst = 0.0_f64;
    for &tau in &ctx.squeezes {
        let phi = fsb_gaussian(tau, &p, &phase)?;
        worst = worst.max(rel_max(&sf(&phi)?, &phi)?);
    }
    checks.push(Check::new("symplectic-fourier fixes Φ_τ", worst, 1e-8));
    let mut worst = 0.0_f64;
    for &(tau, sigma) in &ctx.pairs {
        let m = mixed_gaussian(tau, sigma, &p, &phase)?;
        worst = worst.max(rel_max(&sf(&m)?, &m)?);
    }
    checks.push(Check::new("symplectic-fourier fixes Φ_τς", worst, 1e-8));

    let d = phase.spacing();
    let (a, b) = (4.0 * d, -6.0 * d);
    let lam = |f: &Field, a: f64, b: f64| act(RepTag::LeftPulled, &GroupElement::scalar(0.0, a, b), f, &p);
    let r = |f: &Field, a: f64, b: f64| act(RepTag::RightPulled, &GroupElement::scalar(0.0, a, b), f, &p);
    let hat = sf(&g)?;
    checks.push(Check::new("fourier-intertwining ⌢(Λ(g)f) = Λ(g)⌢f", rel_max(&sf(&lam(&g, a, b)?)?, &lam(&hat, a, b)?)?, 1e-8));
    checks.push(Check::new("fourier-intertwining ⌢(R(g)f) = R(g⁻¹)⌢f", rel_max(&sf(&r(&g, a, b)?)?, &r(&hat, -a, -b)?)?, 1e-8));
    let shift = [8.0 * d, -12.0 * d];
    checks.push(Check::new(
        "fourier-intertwining ⌢(f(·−a)) = e_a ⌢f",
        rel_max(&sf(&euclidean_shift(&g, &shift)?)?, &exp_multiplier(&hat, &shift, &p)?)?,
        1e-8,
    ));
    checks.push(Check::new(
        "fourier-intertwining ⌢(e_a f) = (⌢f)(·−a)",
        rel_max(&sf(&exp_multiplier(&g, &shift, &p)?)?, &euclidean_shift(&hat, &shift)?)?,
        1e-8,
    ));
    Ok(checks)
}

// ---------------------------------------------------------------- fsb

fn projection(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let phase = ctx.phase;
    let d = phase.spacing();
    let f = Field::from_fn(phase, |q| {
        C64::from_polar((-PI * ((q[0] - 0.5).powi(2) + 0.5 * q[1] * q[1])).exp(), 0.7 * q[1] - 0.2 * q[0])
    });
    let g = Field::from_fn(phase, |q| real(q[0] * (-PI * (q[0] * q[0] + q[1] * q[1]) * 0.7).exp()));
    let el = GroupElement::scalar(0.0, 5.0 * d, -7.0 * d);
    let (mut paths, mut idem, mut adj, mut comm) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for &tau in &ctx.squeezes {
        let pf = fsb_project(&f, tau, &p)?;
        let pt = fsb_project_twisted(&f, tau, &p)?;
        paths = paths.max(pf.max_dist(&pt)? / pf.max_abs().max(1.0));
        idem = idem.max(fsb_project(&pf, tau, &p)?.rel_dist(&pf)?);
        let pg = fsb_project(&g, tau, &p)?;
        let l = inner_product(&pf, &g)?;
        let r = inner_product(&f, &pg)?;
        adj = adj.max((l - r).norm() / (f.norm() * g.norm()));
        let a = fsb_project(&act(RepTag::LeftPulled, &el, &f, &p)?, tau, &p)?;
        let b = act(RepTag::LeftPulled, &el, &pf, &p)?;
        comm = comm.max(a.rel_dist(&b)?);
    }
    Ok(vec![
        Check::new("fsb-projection idempotence P_τ² = P_τ", idem, 1e-8),
        Check::new("fsb-projection self-adjointness ⟨P_τF,G⟩ = ⟨F,P_τG⟩", adj, 1e-8),
        Check::new("fsb-projection Λ-covariance P_τΛ(g) = Λ(g)P_τ", comm, 1e-8),
        Check::new("fsb-projection integral = twisted convolution", paths, 1e-8),
    ])
}

fn ladders(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let phase = ctx.phase;
    let config = ctx.config()?;
    let mut checks = Vec::new();

    let mut worst = 0.0_f64;
    for &tau in &ctx.squeezes {
        for h in hermites(tau, &p, &config)? {
            let ud = ladder(RepTag::Schrodinger, Sign::Minus, tau, 0, &ladder(RepTag::Schrodinger, Sign::Plus, tau, 0, &h, &p)?, &p)?;
            let du = ladder(RepTag::Schrodinger, Sign::Plus, tau, 0, &ladder(RepTag::Schrodinger, Sign::Minus, tau, 0, &h, &p)?, &p)?;
            worst = worst.max(ud.sub(&du)?.rel_dist(&h)?);
        }
    }
    checks.push(Check::new("ladder commutator [a⁻,a⁺] = I, Hermite ≤ 3", worst, 1e-6));

    let mut worst = 0.0_f64;
    for &tau in &ctx.squeezes {
        let phi = fsb_gaussian(tau, &p, &phase)?;
        worst = worst.max(ladder(RepTag::LeftPulled, Sign::Minus, tau, 0, &phi, &p)?.max_abs());
    }
    checks.push(Check::new("vacuum annihilation a⁻_Λ Φ_τ = 0", worst, 1e-8));

    let mut worst = 0.0_f64;
    for &(tau, sigma) in &ctx.pairs {
        let m = mixed_gaussian(tau, sigma, &p, &phase)?;
        let a = ladder(RepTag::RightPulled, Sign::Plus, tau, 0, &m, &p)?.norm();
        let b = ladder(RepTag::LeftPulled, Sign::Minus, sigma, 0, &m, &p)?.norm();
        worst = worst.max(a.max(b) / m.norm());
    }
    checks.push(Check::new("mixed-gaussian annihilation a⁺_{R,τ}Φ_τς = a⁻_{Λ,ς}Φ_τς = 0", worst, 1e-6));

    let mut worst = 0.0_f64;
    for &tau in &ctx.squeezes {
        let vs: Vec<Field> = (0..=3)
            .flat_map(|j| (0..=3).map(move |k| LatticeIndex { j, k }))
            .map(|i| lattice_vector(i, tau, &p, &phase))
            .collect::<Result<_>>()?;
        for (a, fa) in vs.iter().enumerate() {
            for (b, fb) in vs.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((inner_product(fa, fb)? - want).norm());
            }
        }
    }
    checks.push(Check::new("lattice orthonormality ⟨Φ_jk,Φ_j'k'⟩ = δ, j,k ≤ 3", worst, 1e-6));
    Ok(checks)
}

// ---------------------------------------------------------------- calculus

fn kernel_family(spec: GridSpec) -> Vec<Field> {
    vec![
        gauss(spec, [0.0, 0.0], 1.0),
        gauss(spec, [0.5, -0.3], 0.8),
        Field::from_fn(spec, |q| C64::new(q[0], 0.5 * q[1]) * (-PI * (q[0] * q[0] + q[1] * q[1]) / 1.2).exp()),
    ]
}

fn twisted(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let fam = kernel_family(ctx.phase);
    let config = ctx.config()?;
    let f = hermite_vector(1, 1.0, &p, &config)?;
    let rho = |k: &Field, f: &Field| integrated(RepTag::Schrodinger, k, f, &p);
    let mut worst = 0.0_f64;
    for k1 in &fam {
        for k2 in &fam {
            let lhs = rho(&twisted_convolution(k1, k2, &p)?, &f)?;
            let rhs = rho(k1, &rho(k2, &f)?)?;
            worst = worst.max(lhs.rel_dist(&rhs)?);
        }
    }
    let (a, b, c) = (&fam[0], &fam[1], &fam[2]);
    let left = twisted_convolution(&twisted_convolution(a, b, &p)?, c, &p)?;
    let right = twisted_convolution(a, &twisted_convolution(b, c, &p)?, &p)?;
    Ok(vec![
        Check::new("twisted-convolution representation ρ(k1⋆k2) = ρ(k1)ρ(k2)", worst, 1e-6),
        Check::new("twisted-convolution associativity (k1⋆k2)⋆k3 = k1⋆(k2⋆k3)", left.rel_dist(&right)?, 1e-6),
    ])
}

/// Relative mismatch of `⟨ψ W_τ f_i, W_ς f_j⟩` against `⟨a(D,X) f_i, f_j⟩`
/// over Hermite states `i, j ≤ 3`.
fn guillemin_mismatch(psi: &Field, tau: f64, sigma: f64, p: &Params) -> Result<f64> {
    let spec = psi.spec;
    let (wt, ws) = (vacuum_window(tau, p, &spec)?, vacuum_window(sigma, p, &spec)?);
    let config = wt.vector.spec;
    let pdo = spec.pdo_config()?;
    let k = pdo_kernel(&guillemin_symbol(psi, tau, sigma, p)?, p)?;
    let (fc, fp) = (hermites(1.0, p, &config)?, hermites(1.0, p, &pdo)?);
    let wtf: Vec<Field> = fc.iter().map(|f| covariant(f, &wt, p)).collect::<Result<_>>()?;
    let wsg: Vec<Field> = fc.iter().map(|f| covariant(f, &ws, p)).collect::<Result<_>>()?;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..4 {
        let opf = k.apply(&fp[i])?;
        let tf = psi.mul(&wtf[i])?;
        for j in 0..4 {
            let lhs = inner_product(&tf, &wsg[j])?;
            let rhs = inner_product(&opf, &fp[j])?;
            num += (lhs - rhs).norm_sqr();
            den += lhs.norm_sqr();
        }
    }
    Ok((num / den).sqrt())
}

fn guillemin(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let spec = ctx.phase;
    let bump = gauss(spec, [0.3, -0.2], 1.0);
    let xb = Field::from_fn(spec, |q| real(q[0])).mul(&bump)?;
    let one = Field::from_fn(spec, |_| real(1.0));
    let mut checks = Vec::new();
    for (psi, label) in [(&one, "ψ=1"), (&bump, "ψ=gaussian"), (&xb, "ψ=x·gaussian")] {
        let mut worst = 0.0_f64;
        for &(tau, sigma) in &ctx.pairs {
            worst = worst.max(guillemin_mismatch(psi, tau, sigma, &p)?);
        }
        checks.push(Check::new(format!("guillemin-equivalence ⟨T_ψW_τf,W_ςg⟩ = ⟨a_ψ(D,X)f,g⟩, {label}"), worst, 1e-5));
    }
    Ok(checks)
}

fn interior_rel(a: &Field, b: &Field) -> f64 {
    let n = a.spec.points;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..n * n {
        if (n / 4..3 * n / 4).contains(&(k % n)) {
            num += (a.values[k] - b.values[k]).norm_sqr();
            den += b.values[k].norm_sqr();
        }
    }
    (num / den).sqrt()
}

fn moyal(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    // The symbols need room in ξ: twice the one-sided resolution.
    let spec = GridSpec::self_dual(2, 2 * ctx.phase.points, p.hbar)?;
    let a1 = Field::from_fn(spec, |q| real((1.0 + 0.5 * q[1]) * (-PI * (q[0] * q[0] / 12.0 + q[1] * q[1] / 4.0)).exp()));
    let a2 = Field::from_fn(spec, |q| {
        real((0.5 - 0.4 * q[0]) * (-PI * (q[0] * q[0] / 12.0 + (q[1] - 0.3).powi(2) / 4.0)).exp())
    });
    let exact = compose_symbols_exact(&a1, &a2, &p)?;
    let k12 = pdo_kernel(&a1, &p)?.compose(&pdo_kernel(&a2, &p)?)?;
    let dense = weyl_symbol_from_kernel(&k12, &p)?;
    let errs: Vec<f64> = [0, 2, 4]
        .iter()
        .map(|&k| Ok(interior_rel(&moyal_compose(&a1, &a2, k, &p)?, &exact)))
        .collect::<Result<_>>()?;
    Ok(vec![
        Check::new("moyal oracle: twisted-convolution symbol = kernel composition", interior_rel(&exact, &dense), 1e-8),
        Check::decreasing("moyal series error decreases, order 2 vs 0", errs[1], errs[0]),
        Check::decreasing("moyal series error decreases, order 4 vs 2", errs[2], errs[1]),
        Check::new("moyal series truncation error, order 4", errs[2], 1e-4),
    ])
}

// ---------------------------------------------------------------- two-sided

fn dense_gauss(spec: GridSpec, c1: [f64; 2], c2: [f64; 2], w1: f64, w2: f64) -> Result<TwoSidedKernel> {
    let s4 = GridSpec::new(4, spec.extent, spec.points)?;
    Ok(TwoSidedKernel::Dense(Field::from_fn(s4, |q| {
        let a = (q[0] - c1[0]).powi(2) + (q[1] - c1[1]).powi(2);
        let b = (q[2] - q[0] - c2[0]).powi(2) + (q[3] - q[1] - c2[1]).powi(2);
        C64::from_polar((-PI * (a / w1 + b / w2)).exp(), 0.7 * q[0] - 0.4 * q[3])
    })))
}

fn structured_kernels(g: GridSpec, p: &Params) -> Result<[TwoSidedKernel; 4]> {
    Ok([
        TwoSidedKernel::LeftOnly(chirped(g, [0.3, -0.2], 0.5, -0.4)),
        TwoSidedKernel::RightOnly(chirped(g, [-0.2, 0.1], 0.5, 0.3)),
        TwoSidedKernel::multiplication(&gauss(g, [0.2, 0.0], 0.8), p)?,
        TwoSidedKernel::ModulatedProduct { w: gauss(g, [0.1, 0.1], 0.4), v: chirped(g, [0.0, 0.0], 0.5, 0.2) },
    ])
}

fn two_sided(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let g = GridSpec::self_dual(2, ctx.r4.points.min(COMPOSE_CAP), p.hbar)?;
    let f = chirped(g, [0.1, 0.2], 0.5, 0.6);
    let kernels = structured_kernels(g, &p)?;
    let mut checks = Vec::new();

    let mut worst = 0.0_f64;
    for k in &kernels {
        let fast = twosided::apply(k, &f, &p)?;
        let slow = twosided::apply_dense(&k.densify(&p)?, &f, &p)?;
        worst = worst.max(fast.rel_dist(&slow)?);
    }
    checks.push(Check::new(format!("two-sided apply: structured = dense (N={})", g.points), worst, 1e-5));

    let narrow = gauss(g, [0.1, -0.1], 0.25);
    let reduced = [
        TwoSidedKernel::LeftOnly(chirped(g, [0.2, 0.1], 0.25, 0.3)),
        TwoSidedKernel::RightOnly(chirped(g, [-0.1, 0.2], 0.25, -0.5)),
        TwoSidedKernel::multiplication(&gauss(g, [0.0, 0.1], 1.0), &p)?,
        TwoSidedKernel::ModulatedProduct { w: gauss(g, [0.1, 0.0], 0.25), v: chirped(g, [0.0, 0.0], 0.25, 0.4) },
    ];
    let mut worst = 0.0_f64;
    for u in [0.5, 1.0, 2.0] {
        let pu = p.with_upsilon(u);
        for k in &reduced {
            worst = worst.max(xi_reduction_check(k, &narrow, &pu)?);
        }
    }
    checks.push(Check::new("Ξ̃-reduction D(k) = restricted Ξ̃(k)", worst, 1e-10));

    let (k1, k2, k3) = (&kernels[3], &kernels[0], &kernels[1]);
    let mut worst = 0.0_f64;
    for (a, b) in [(k1, k2), (k2, k3), (k3, k1), (k1, k1)] {
        let lhs = twosided::apply(&compose(a, b, &p)?, &f, &p)?;
        let rhs = twosided::apply(a, &twosided::apply(b, &f, &p)?, &p)?;
        worst = worst.max(lhs.rel_dist(&rhs)?);
    }
    checks.push(Check::new("two-sided composition D(k1⊛k2) = D(k1)D(k2)", worst, 1e-5));

    let g8 = GridSpec::self_dual(2, DIRECT_COMPOSE_CAP, p.hbar)?;
    let d1 = dense_gauss(g8, [0.1, -0.2], [0.2, 0.1], 0.5, 0.6)?;
    let d2 = dense_gauss(g8, [-0.3, 0.1], [0.0, -0.2], 0.4, 0.5)?;
    let direct = compose_direct(&d1, &d2, 1.0, &p)?;
    let mut worst = 0.0_f64;
    for u in [0.5, 2.0] {
        worst = worst.max(rel_max(&compose_direct(&d1, &d2, u, &p)?, &direct)?);
    }
    checks.push(Check::new("two-sided composition ⊛ independent of υ", worst, 1e-10));
    let fast = compose(&d1, &d2, &p)?.densify(&p)?;
    checks.push(Check::new("two-sided composition FFT = direct sum", rel_max(&fast, &direct)?, 1e-10));

    let k = dense_gauss(g, [0.2, -0.1], [0.3, 0.2], 0.3, 0.5)?;
    let back = twosided_from_schwartz(&schwartz_from_twosided(&k, &p)?, &p)?;
    checks.push(Check::new(
        "schwartz round-trip k → K → k",
        back.densify(&p)?.rel_dist(&k.densify(&p)?)?,
        1e-4,
    ));

    // Lattice multipliers are periodic, so the traced operators keep their
    // mass away from the grid edge.
    let half = g.extent / 2.0;
    let mult = TwoSidedKernel::multiplication(&gauss(g, [half, half], 0.3), &p)?;
    let left = TwoSidedKernel::LeftOnly(chirped(g, [0.0, 0.0], 0.1, 0.5));
    let right = TwoSidedKernel::RightOnly(chirped(g, [0.0, 0.0], 0.1, -0.3));
    let ml = compose(&mult, &left, &p)?;
    let mut worst = 0.0_f64;
    for (a, b) in [(&mult, &left), (&left, &mult), (&ml, &right), (&right, &ml), (&ml, &ml)] {
        let s12 = schwartz_from_twosided(&compose(a, b, &p)?, &p)?;
        let prod = schwartz_from_twosided(a, &p)?.compose(&schwartz_from_twosided(b, &p)?)?;
        worst = worst.max((s12.trace() - prod.trace()).norm() / prod.trace().norm());
    }
    checks.push(Check::new("trace consistency tr K(k1⊛k2) = tr K(k1)K(k2)", worst, 1e-5));
    Ok(checks)
}

fn cross_toeplitz(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let g = ctx.phase;
    let mut checks = Vec::new();

    let psi = chirped(g, [0.4, -0.3], 2.0, 0.4);
    let mut worst = 0.0_f64;
    for &(tau, sigma) in &[(1.0, 1.0), (0.5, 2.0), (2.0, 0.5), (ctx.tau, ctx.sigma)] {
        let k = cross_toeplitz_kernel(&psi, tau, sigma, &p)?;
        for f in [fsb_gaussian(tau, &p, &g)?, lattice_vector(LatticeIndex { j: 1, k: 0 }, tau, &p, &g)?] {
            let via_kernel = twosided::apply(&k, &f, &p)?;
            let direct = cross_toeplitz_apply(&psi, &f, tau, sigma, &p)?;
            worst = worst.max(via_kernel.rel_dist(&direct)?);
        }
    }
    checks.push(Check::new("cross-toeplitz kernel D(k#)F = P_ς(ψF), F ∈ {Φ_τ, Φ_10}", worst, 1e-5));

    let g16 = GridSpec::self_dual(2, ctx.r4.points.min(16), p.hbar)?;
    let psi16 = gauss(g16, [0.2, 0.1], 1.0);
    let dense = cross_toeplitz_kernel(&psi16, 1.0, 1.0, &p)?.densify(&p)?;
    let n = g16.points;
    let slice = Field::from_values(g16, (0..n * n).map(|k| dense.values[k * n * n + (n / 2) * n + n / 2]).collect())?;
    let want = toeplitz_conv_kernel(&psi16, 1.0, &p)?.scale(real(p.hbar.abs()));
    checks.push(Check::new("cross-toeplitz τ=ς slice = toeplitz convolution kernel", slice.rel_dist(&want)?, 1e-8));

    let g4 = ctx.r4;
    let (tau, sigma) = (ctx.tau, ctx.sigma);
    let pu = p.with_upsilon((tau * sigma).sqrt());
    let psi4 = gauss(g4, [0.3, -0.2], 1.0);
    let via_kernel = doubled_pdo_symbol(&cross_toeplitz_kernel(&psi4, tau, sigma, &pu)?, &pu)?;
    let integral = cross_toeplitz_pdo_symbol(&psi4, tau, sigma, &pu)?;
    let scale = integral.values.max_abs();
    let spec = integral.values.spec;
    let c = spec.coords();
    let mut idx = [0usize; 4];
    let picks: Vec<usize> = (0..spec.len())
        .step_by(4099)
        .filter(|&k| {
            spec.unravel(k, &mut idx);
            in_doubled_chart(&g4, pu.upsilon, c[idx[1]], c[idx[3]])
        })
        .collect();
    let points: Vec<[f64; 4]> = picks
        .iter()
        .map(|&k| {
            spec.unravel(k, &mut idx);
            idx.map(|i| c[i])
        })
        .collect();
    let fsb_form = cross_toeplitz_symbol_fsb(&psi4, sigma, &pu, &points)?;
    let fsb_err = picks
        .iter()
        .zip(&fsb_form)
        .map(|(&k, v)| (integral.values.values[k] - v).norm())
        .fold(0.0, f64::max);
    let three = (via_kernel.values.max_dist(&integral.values)?.max(fsb_err)) / scale;
    checks.push(Check::new(format!("cross-toeplitz symbol a#: kernel = integral = FSB form (τ={tau}, ς={sigma})"), three, 1e-6));

    let psi_r = gauss(g4, [0.2, -0.1], 1.0);
    let k = cross_toeplitz_kernel(&psi_r, tau, sigma, &p)?;
    let check = is_cross_toeplitz_type(&k, tau, sigma, 1e-5, &p)?;
    checks.push(Check::new(
        "cross-toeplitz characterization accepts k#",
        check.ladder_residual.max(check.shift_residual),
        1e-5,
    ));
    let decoy = TwoSidedKernel::LeftOnly(gauss(g4, [0.0, 0.0], 1.0));
    let dc = is_cross_toeplitz_type(&decoy, tau, sigma, 1e-5, &p)?;
    checks.push(Check::at_least(
        "cross-toeplitz characterization rejects a LeftOnly decoy",
        dc.ladder_residual.max(dc.shift_residual),
        1e-5,
    ));
    let rec = symbol_from_kernel(&k, tau, sigma, &p)?;
    checks.push(Check::new("cross-toeplitz symbol recovery ψ → k# → ψ", rec.psi.rel_dist(&psi_r)?, 1e-4));
    Ok(checks)
}

fn uncertainty_suite(ctx: &Context) -> Result<Vec<Check>> {
    let p = ctx.params;
    let config = ctx.config()?;
    let mut worst = 0.0_f64;
    for &tau in &ctx.squeezes {
        let u = uncertainty(&gaussian_vacuum(tau, &p, &config)?, &p)?;
        worst = worst.max((u.product() - u.bound).abs());
    }
    let pert = gaussian_vacuum(1.0, &p, &config)?.axpy(real(0.3), &hermite_vector(2, 1.0, &p, &config)?)?;
    let u = uncertainty(&pert, &p)?;
    Ok(vec![
        Check::new("heisenberg-kennard ΔQΔP = |ℏ|/2 on vacua", worst, 1e-8),
        Check::at_least("heisenberg-kennard ΔQΔP − |ℏ|/2 ≥ 1e-3 on a perturbed state", u.product() - u.bound, 1e-3),
    ])
}
