//! Exact arithmetic for modular forms attached to real quadratic fields.
//!
//! The library works with the discriminant form `D` of the even lattice
//! `Z^2 (+) O_F` for a real quadratic field `F = Q(sqrt(N1))`, the Weil
//! representation of `SL_2(Z)` on the group algebra of `D`, and the
//! coefficient-level dictionary between scalar-valued modular forms with an
//! epsilon-condition on their Fourier coefficients and `Aut(D)`-invariant
//! vector-valued modular forms.  Everything is computed over exact rationals
//! and cyclotomic numbers; floating point appears only in the optional
//! numeric transformation self-checks.
//!
//! Module map:
//! - [`exactnum`]: the coefficient ring `Q(zeta_N)[1/sqrt(N)]`.
//! - [`chars`]: the Kronecker character `chi_D`, its p-components, Gauss sums
//!   and the sign vectors `epsilon`, `epsilon*`.
//! - [`discform`]: the discriminant form `D`, its Jordan decomposition,
//!   automorphisms and norm-class bookkeeping.
//! - [`weilrep`]: exact Weil representation matrices built from the images of
//!   the generators `T` and `S`.
//! - [`qseries`]: truncated Fourier expansions, eta quotients, `E_2`, and the
//!   `U(m)` coefficient operator.
//! - [`eisenstein`]: Eisenstein series for `chi_D` and exact L-values via
//!   generalized Bernoulli numbers.
//! - [`correspond`]: the coefficient-level lift/descent between scalar and
//!   vector-valued forms.
//! - [`obstruct`]: the scalar obstruction criterion and the level-12 form
//!   `f_1`.

pub mod chars;
pub mod correspond;
pub mod discform;
pub mod eisenstein;
pub mod exactnum;
pub mod obstruct;
pub mod qseries;
pub mod weilrep;
