//! Eisenstein series of level `N`, weight `w = 2 - k`, character `chi_D`,
//! and exact L-values at nonpositive integers.
//!
//! The basis is `{E_m : m | N, m = N_m}` (unitary divisors), with
//!
//! ```text
//! E_m = delta_{1,m} L(1-w, chi_D)
//!       + 2 sum_{n>=1} ( sum_{d|n} chi_m(n/d) chi'_m(d) d^{w-1} ) q^n
//! ```
//!
//! L-values come from generalized Bernoulli numbers,
//! `L(1-n, chi) = -B_{n,chi}/n` with
//! `B_{n,chi} = N^{n-1} sum_{a=1}^{N} chi(a) B_n(a/N)`.
//!
//! The distinguished combination `E^{eps*} = L^{-1} sum_m E_m` has constant
//! term 1 and satisfies the `epsilon*`-condition on coefficients coprime to
//! the level.

use crate::chars::{CharData, CharError};
use crate::qseries::QExpansion;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EisensteinError {
    #[error("L-value argument must be a nonpositive integer, got {0}")]
    PositiveArgument(i64),
    #[error("weight must be an even integer >= 2, got {0}")]
    InvalidWeight(i64),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("{m} is not a unitary divisor of {n}")]
    NotUnitaryDivisor { m: i64, n: i64 },
    #[error("L(1-w, chi) vanishes; cannot normalize")]
    ZeroLValue,
}

/// An exact special L-value with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LValue {
    pub value: BigRational,
    /// `(N1, s)`: the character's squarefree core and the argument.
    pub provenance: (i64, i64),
}

/// Classical Bernoulli numbers `B_0, ..., B_n` (with `B_1 = -1/2`).
fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(BigRational::one());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            if j > 0 {
                // C(m+1, j) = C(m+1, j-1) * (m+2-j)/j
                binom = &binom * BigInt::from(m + 2 - j) / BigInt::from(j);
            }
            acc += BigRational::from(binom.clone()) * bj;
        }
        let div = BigRational::from(BigInt::from(m as i64 + 1));
        b.push(-acc / div);
    }
    b
}

/// Bernoulli polynomial value `B_n(x) = sum_k C(n,k) B_k x^{n-k}`.
fn bernoulli_poly_at(n: usize, x: &BigRational) -> BigRational {
    let b = bernoulli_numbers(n);
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one();
    let mut xpow = vec![BigRational::one()];
    for i in 1..=n {
        xpow.push(&xpow[i - 1] * x);
    }
    for (k, bk) in b.iter().enumerate() {
        if k > 0 {
            binom = &binom * BigInt::from(n + 1 - k) / BigInt::from(k);
        }
        acc += BigRational::from(binom.clone()) * bk * &xpow[n - k];
    }
    acc
}

/// `B_{n,chi}` for an arbitrary function `chi` on residues mod `modulus`.
pub(crate) fn gen_bernoulli_raw(n: u32, modulus: i64, chi: impl Fn(i64) -> i32) -> BigRational {
    assert!(n >= 1 && modulus >= 1);
    let mut acc = BigRational::zero();
    for a in 1..=modulus {
        let c = chi(a);
        if c == 0 {
            continue;
        }
        let x = BigRational::new(BigInt::from(a), BigInt::from(modulus));
        let term = bernoulli_poly_at(n as usize, &x);
        acc += term * BigRational::from(BigInt::from(c));
    }
    let scale = BigRational::from(BigInt::from(modulus)).pow((n as i32) - 1);
    scale * acc
}

/// Generalized Bernoulli number `B_{n, chi_D}`.
pub fn gen_bernoulli(n: u32, chi: &CharData) -> BigRational {
    gen_bernoulli_raw(n, chi.level(), |a| chi.chi_d(a))
}

/// `L(s, chi_D)` at a nonpositive integer `s = 1 - n`, exactly.
pub fn l_value(s: i64, chi: &CharData) -> Result<LValue, EisensteinError> {
    if s > 0 {
        return Err(EisensteinError::PositiveArgument(s));
    }
    let n = (1 - s) as u32;
    let value = -gen_bernoulli(n, chi) / BigRational::from(BigInt::from(n));
    Ok(LValue {
        value,
        provenance: (chi.n1(), s),
    })
}

fn check_weight(w: i64) -> Result<(), EisensteinError> {
    if w < 2 || w % 2 != 0 {
        return Err(EisensteinError::InvalidWeight(w));
    }
    Ok(())
}

/// The Eisenstein basis element `E_m` for a unitary divisor `m` of the
/// level, at weight `w`, certified below `trunc`.
pub fn eisenstein_m(
    chi: &CharData,
    w: i64,
    m: i64,
    trunc: i64,
) -> Result<QExpansion, EisensteinError> {
    check_weight(w)?;
    let n = chi.level();
    if m <= 0 || n % m != 0 || chi.n_part(m) != m {
        return Err(EisensteinError::NotUnitaryDivisor { m, n });
    }
    let mut coeffs: Vec<(i64, BigRational)> = Vec::new();
    if m == 1 {
        coeffs.push((0, l_value(1 - w, chi)?.value));
    }
    for nn in 1..trunc {
        let mut acc = BigInt::zero();
        let mut d = 1;
        while d <= nn {
            if nn % d == 0 {
                let chi_part = chi.chi_m(m, nn / d)? * chi.chi_m_complement(m, d)?;
                if chi_part != 0 {
                    let mut term = BigInt::from(d).pow(w as u32 - 1);
                    if chi_part < 0 {
                        term = -term;
                    }
                    acc += term;
                }
            }
            d += 1;
        }
        if !acc.is_zero() {
            coeffs.push((nn, BigRational::from(acc * BigInt::from(2))));
        }
    }
    Ok(QExpansion::from_coeffs(1, coeffs, trunc))
}

/// `E^{eps*} = L(1-w, chi_D)^{-1} sum_m E_m`, normalized so `B(0) = 1`.
pub fn e_epsilon_star(chi: &CharData, w: i64, trunc: i64) -> Result<QExpansion, EisensteinError> {
    check_weight(w)?;
    let l = l_value(1 - w, chi)?.value;
    if l.is_zero() {
        return Err(EisensteinError::ZeroLValue);
    }
    let mut acc = QExpansion::zero(1, trunc);
    for m in chi.unitary_divisors() {
        acc = &acc + &eisenstein_m(chi, w, m, trunc)?;
    }
    Ok(acc.scale(&l.recip()))
}

/// True iff the coefficient vectors of `{E_m}` on `q^0 .. q^{trunc-1}` have
/// full rank `2^{omega(N)}` over `Q`.
pub fn basis_independence_check(
    chi: &CharData,
    w: i64,
    trunc: i64,
) -> Result<bool, EisensteinError> {
    let divisors = chi.unitary_divisors();
    let rows: Vec<Vec<BigRational>> = divisors
        .iter()
        .map(|&m| {
            let e = eisenstein_m(chi, w, m, trunc)?;
            Ok((0..trunc).map(|n| e.coeff(n)).collect())
        })
        .collect::<Result<_, EisensteinError>>()?;
    Ok(rational_rank(rows) == divisors.len())
}

/// Rank of a rational matrix by Gaussian elimination.
pub(crate) fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < nrows && col < ncols {
        let pivot = (rank..nrows).find(|&r| !rows[r][col].is_zero());
        let Some(p) = pivot else {
            col += 1;
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].clone().recip();
        for c in col..ncols {
            let v = &rows[rank][c] * &inv;
            rows[rank][c] = v;
        }
        for r in 0..nrows {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let v = &rows[r][c] - &factor * &rows[rank][c];
                    rows[r][c] = v;
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}
