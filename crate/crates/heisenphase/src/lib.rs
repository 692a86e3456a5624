//! Heisenberg-group operator calculus on uniform grids.
//!
//! The crate samples functions on configuration space `R^n` and phase space
//! `R^{2n}`, acts on them by the Schrödinger and pulled regular
//! representations, and builds the transforms and operator classes that live
//! on top: Fourier–Wigner and FSB transforms, twisted convolutions, Weyl
//! quantization, (cross-)Toeplitz operators and two-sided relative
//! convolutions with their doubled symbols.
//!
//! Conventions used throughout:
//!
//! * `⟨f, g⟩ = Δ^d Σ f·conj(g)` (linear in the first slot);
//! * the group law is `(s,x,y)(s',x',y') = (s+s'+ω/2, x+x', y+y')` with
//!   `ω = x·y' − x'·y`;
//! * `ℏ` is stored, `h = 2πℏ` is derived where needed;
//! * phase-space axes are ordered `(x_1..x_n, y_1..y_n)`, two-sided kernels
//!   on `R^4` are ordered `(x1, y1, x2, y2)`.

pub mod calculus;
pub mod error;
pub mod fsb;
pub mod grid;
pub mod group;
pub mod reps;
pub mod transforms;
pub mod twosided;

pub use error::{Error, Result};
pub use grid::{ConfigFn, Field, GridSpec, PhaseFn};
pub use group::{GroupElement, Params, PhasePoint};
pub use num_complex::Complex64 as C64;
