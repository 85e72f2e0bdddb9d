//! The quadratic character `chi_D = (N/.)` of a positive fundamental
//! discriminant `N`, its decomposition into prime components `chi_p`,
//! Gauss-sum data, and the sign vectors `epsilon` and `epsilon*`.
//!
//! For odd `p | N` the component is the Legendre symbol `(./p)`.  The 2-adic
//! component depends on the squarefree core `N1`:
//!
//! ```text
//! N1 = 1 (mod 4):  chi_2 = 1        (2 does not divide N)
//! N1 = 3 (mod 4):  chi_2 = (-4/.),  modulus 4
//! N1 = 2 (mod 8):  chi_2 = (2/.),   modulus 8
//! N1 = 6 (mod 8):  chi_2 = (-2/.),  modulus 8
//! ```
//!
//! Gauss sums are carried as the pair `(epsilon_p, N_p)` with
//! `W(chi_p) = epsilon_p sqrt(N_p)` and `epsilon_p in {1, i}`; the square
//! root itself lives in a different cyclotomic field than `zeta_N` in
//! general, so only the pair is stored.  [`CharData::gauss_sum_check`]
//! recomputes the sum exactly in `Q(zeta_{N_p})` and certifies both
//! `W^2 = chi_p(-1) N_p` and the sign of the numeric embedding.

use crate::exactnum::{root_of_unity, Cyclotomic};
use num::bigint::BigInt;
use num::rational::BigRational;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharError {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("squarefree core must exceed 1, got {0}")]
    OutOfRange(i64),
    #[error("{m} does not divide the level {n}")]
    InvalidDivisor { m: i64, n: i64 },
}

/// Full Kronecker symbol `(a/n)`, defined for all integers, including
/// `n <= 0` and even `n`.
///
/// Conventions for the boundary cases: `(a/0) = 1` iff `a = +-1`;
/// `(a/-1) = 1` iff `a >= 0`; `(a/2) = 0` for even `a` and `+-1` according
/// to `a mod 8` otherwise.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        // (a/2) per a mod 8
        let r = a.rem_euclid(8);
        let two_sym = if r == 1 || r == 7 { 1 } else { -1 };
        while n % 2 == 0 {
            n /= 2;
            result *= two_sym;
        }
    }
    // now n is odd and positive: Jacobi symbol (a/n)
    let mut a = a.rem_euclid(n.max(1));
    loop {
        if n == 1 {
            return result;
        }
        if a == 0 {
            return 0;
        }
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        // quadratic reciprocity for odd positive a, n
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        let t = n % a;
        n = a;
        a = t;
    }
}

pub(crate) fn is_squarefree(n: i64) -> bool {
    let mut n = n.abs();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Distinct prime divisors, ascending.
pub fn prime_divisors(n: i64) -> Vec<i64> {
    let mut n = n.abs();
    let mut ps = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            ps.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    ps
}

/// `omega(n)`: the number of distinct prime divisors.
pub fn omega(n: i64) -> u32 {
    prime_divisors(n).len() as u32
}

/// The shape of a p-component of `chi_D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiKind {
    /// Odd prime: the Legendre symbol `(./p)`.
    OddLegendre,
    /// `chi_2 = (-4/.)`, for `N1 = 3 (mod 4)`.
    TwoMinusFour,
    /// `chi_2 = (2/.)`, for `N1 = 2 (mod 8)`.
    TwoPlusEight,
    /// `chi_2 = (-2/.)`, for `N1 = 6 (mod 8)`.
    TwoMinusEight,
}

/// The fourth root of unity `epsilon_p` in `W(chi_p) = epsilon_p sqrt(N_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussUnit {
    One,
    I,
}

#[derive(Clone, Debug)]
pub struct CharComponent {
    pub prime: i64,
    /// `N_p`: the p-part of `N`.
    pub modulus: i64,
    pub kind: ChiKind,
    pub gauss_unit: GaussUnit,
}

impl CharComponent {
    /// `chi_p(n)`.
    pub fn eval(&self, n: i64) -> i32 {
        match self.kind {
            ChiKind::OddLegendre => kronecker(n, self.prime),
            ChiKind::TwoMinusFour => kronecker(-4, n),
            ChiKind::TwoPlusEight => kronecker(2, n),
            ChiKind::TwoMinusEight => kronecker(-2, n),
        }
    }
}

/// The character `chi_D` for the field of squarefree core `N1 > 1`, with its
/// p-components and Gauss-sum units.
#[derive(Clone, Debug)]
pub struct CharData {
    n1: i64,
    n: i64,
    components: Vec<CharComponent>,
}

/// A vector of signs `delta_p in {+1, -1}`, one per prime dividing `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignVector {
    signs: BTreeMap<i64, i32>,
}

impl SignVector {
    pub fn new(signs: BTreeMap<i64, i32>) -> SignVector {
        assert!(signs.values().all(|&s| s == 1 || s == -1));
        SignVector { signs }
    }

    pub fn sign(&self, p: i64) -> i32 {
        self.signs[&p]
    }

    pub fn primes(&self) -> impl Iterator<Item = (i64, i32)> + '_ {
        self.signs.iter().map(|(&p, &s)| (p, s))
    }

    /// The vector with every sign flipped.
    pub fn negated(&self) -> SignVector {
        SignVector {
            signs: self.signs.iter().map(|(&p, &s)| (p, -s)).collect(),
        }
    }
}

impl CharData {
    pub fn new(n1: i64) -> Result<CharData, CharError> {
        if n1 <= 1 {
            return Err(CharError::OutOfRange(n1));
        }
        if !is_squarefree(n1) {
            return Err(CharError::NotSquarefree(n1));
        }
        let n = if n1 % 4 == 1 { n1 } else { 4 * n1 };
        let mut components = Vec::new();
        for p in prime_divisors(n) {
            if p == 2 {
                let (kind, modulus, gauss_unit) = match n1 % 8 {
                    3 | 7 => (ChiKind::TwoMinusFour, 4, GaussUnit::I),
                    2 => (ChiKind::TwoPlusEight, 8, GaussUnit::One),
                    6 => (ChiKind::TwoMinusEight, 8, GaussUnit::I),
                    _ => unreachable!("n1 = 1 mod 4 has odd N"),
                };
                components.push(CharComponent {
                    prime: 2,
                    modulus,
                    kind,
                    gauss_unit,
                });
            } else {
                components.push(CharComponent {
                    prime: p,
                    modulus: p,
                    kind: ChiKind::OddLegendre,
                    gauss_unit: if p % 4 == 1 {
                        GaussUnit::One
                    } else {
                        GaussUnit::I
                    },
                });
            }
        }
        debug_assert_eq!(components.iter().map(|c| c.modulus).product::<i64>(), n);
        Ok(CharData { n1, n, components })
    }

    pub fn n1(&self) -> i64 {
        self.n1
    }

    /// The fundamental discriminant `N` (= level and character modulus).
    pub fn level(&self) -> i64 {
        self.n
    }

    pub fn components(&self) -> &[CharComponent] {
        &self.components
    }

    pub fn component(&self, p: i64) -> Option<&CharComponent> {
        self.components.iter().find(|c| c.prime == p)
    }

    /// `chi_D(n)`, the product of all components.
    pub fn chi_d(&self, n: i64) -> i32 {
        self.components.iter().map(|c| c.eval(n)).product()
    }

    /// `chi_m(n) = prod_{p | m} chi_p(n)` for a divisor `m | N`.
    pub fn chi_m(&self, m: i64, n: i64) -> Result<i32, CharError> {
        if m <= 0 || self.n % m != 0 {
            return Err(CharError::InvalidDivisor { m, n: self.n });
        }
        Ok(self
            .components
            .iter()
            .filter(|c| m % c.prime == 0)
            .map(|c| c.eval(n))
            .product())
    }

    /// `chi'_m(n) = prod_{p | N, p not | m} chi_p(n)`.
    pub fn chi_m_complement(&self, m: i64, n: i64) -> Result<i32, CharError> {
        if m <= 0 || self.n % m != 0 {
            return Err(CharError::InvalidDivisor { m, n: self.n });
        }
        Ok(self
            .components
            .iter()
            .filter(|c| m % c.prime != 0)
            .map(|c| c.eval(n))
            .product())
    }

    /// `N_m`: the largest divisor of `N` sharing all its primes with `m`
    /// (so `(N/N_m, m) = 1`).  By convention `N_0 = N`.
    pub fn n_part(&self, m: i64) -> i64 {
        if m == 0 {
            return self.n;
        }
        self.components
            .iter()
            .filter(|c| m % c.prime == 0)
            .map(|c| c.modulus)
            .product()
    }

    /// The unitary divisors `m | N` with `m = N_m`, ascending; there are
    /// `2^{omega(N)}` of them.
    pub fn unitary_divisors(&self) -> Vec<i64> {
        let mut ds = vec![1i64];
        for c in &self.components {
            let mut next = Vec::with_capacity(ds.len() * 2);
            for d in &ds {
                next.push(*d);
                next.push(d * c.modulus);
            }
            ds = next;
        }
        ds.sort_unstable();
        ds
    }

    /// The sign vectors `(epsilon, epsilon*)`.
    ///
    /// `epsilon*_p = 1` for every prime; `epsilon_p = chi_p(-1)` for odd `p`;
    /// `epsilon_2 = -1` when `N1 = 3 (mod 4)` and `chi_{N1/2}(-1)` when
    /// `N1 = 2 (mod 4)`.
    pub fn sign_vectors(&self) -> (SignVector, SignVector) {
        let mut eps = BTreeMap::new();
        let mut eps_star = BTreeMap::new();
        for c in &self.components {
            eps_star.insert(c.prime, 1);
            let e = if c.prime != 2 {
                c.eval(-1)
            } else if self.n1 % 4 == 3 {
                -1
            } else {
                // N1 = 2 (mod 4): chi_{N1/2}(-1), the product over odd primes
                self.components
                    .iter()
                    .filter(|d| d.prime != 2)
                    .map(|d| d.eval(-1))
                    .product()
            };
            eps.insert(c.prime, e);
        }
        (SignVector::new(eps), SignVector::new(eps_star))
    }

    /// Recomputes `W(chi_p) = sum_{a mod N_p} chi_p(a) e(a/N_p)` exactly in
    /// `Q(zeta_{N_p})` and certifies `W^2 = chi_p(-1) N_p` together with the
    /// sign of the numeric embedding against `epsilon_p`.
    pub fn gauss_sum_check(&self, p: i64) -> bool {
        let c = match self.component(p) {
            Some(c) => c,
            None => return false,
        };
        let modulus = c.modulus as u64;
        let mut w = Cyclotomic::zero(modulus);
        for a in 0..c.modulus {
            let chi = c.eval(a);
            if chi == 0 {
                continue;
            }
            let term = root_of_unity(a, modulus);
            w = if chi == 1 { &w + &term } else { &w - &term };
        }
        // square identity: W^2 = chi_p(-1) * N_p, exactly
        let w2 = &w * &w;
        let expected = BigRational::from(BigInt::from(c.eval(-1) * c.modulus as i32));
        if w2.as_rational() != Some(expected) {
            return false;
        }
        // embedding sign: W = epsilon_p sqrt(N_p)
        let z = w.embed();
        let root = (c.modulus as f64).sqrt();
        let (want_re, want_im) = match c.gauss_unit {
            GaussUnit::One => (root, 0.0),
            GaussUnit::I => (0.0, root),
        };
        (z.re - want_re).abs() < 1e-9 && (z.im - want_im).abs() < 1e-9
    }
}

/// `s(m) = 2^{omega((m, N))}` as a memoized table on `Z/N`.
///
/// `s` depends only on `gcd(m, N)`; in particular `s(0) = 2^{omega(N)}`.
#[derive(Clone, Debug)]
pub struct SWeight {
    level: i64,
    table: Vec<i64>,
}

impl SWeight {
    pub fn new(level: i64) -> SWeight {
        assert!(level >= 1);
        let table = (0..level)
            .map(|m| {
                let g = num::integer::gcd(m, level);
                let g = if g == 0 { level } else { g };
                1i64 << omega(g)
            })
            .collect();
        SWeight { level, table }
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// `s(m)` for any integer `m` (reduced mod `N`).
    pub fn weight(&self, m: i64) -> i64 {
        self.table[m.rem_euclid(self.level) as usize]
    }
}
