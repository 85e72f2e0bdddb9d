//! Exact arithmetic in the ring `Q(zeta_N)[1/sqrt(N)]`.
//!
//! A [`Cyclotomic`] is an element of `Q(zeta_N)` stored on the power basis
//! `1, zeta, ..., zeta^{phi(N)-1}` and kept fully reduced modulo the N-th
//! cyclotomic polynomial, so equality is plain coefficient comparison.
//! A [`CycExt`] adjoins `1/sqrt(N)`; it is the smallest ring containing every
//! entry of a Weil representation matrix at level `N`.
//!
//! When `N = 0, 1 (mod 4)` the square root of `N` already lies in
//! `Q(zeta_N)` (it is the quadratic Gauss sum `sum_a zeta^{a^2}`, up to a
//! unit).  In that case the pair `a + b/sqrt(N)` is not a faithful
//! representation: distinct pairs can denote the same complex number.  To keep
//! equality canonical, `CycExt` folds the radical part into the cyclotomic
//! part whenever `sqrt(N)` is available in the field; the identity
//! `s^2 = N` is verified exactly when the context is built.  For radicands
//! `N = 2, 3 (mod 4)` the pair `{1, 1/sqrt(N)}` is an honest basis of a
//! quadratic extension and the pair form is kept.
//!
//! Mixed-order arithmetic is a caller error; the operator impls panic on it.
//! Boundary code (JSON intake) should call [`ensure_same_order`] first.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactNumError {
    #[error("division by zero in cyclotomic arithmetic")]
    DivisionByZero,
    #[error("mixed cyclotomic orders: {0} vs {1}")]
    OrderMismatch(u64, u64),
    #[error("invalid value: {0}")]
    Invalid(String),
}

/// Euler's totient, by trial division.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(n: u64) -> Vec<u64> {
    let mut ds = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            ds.push(d);
            if d != n / d {
                ds.push(n / d);
            }
        }
        d += 1;
    }
    ds.sort_unstable();
    ds
}

fn mobius(n: u64) -> i32 {
    let mut n = n;
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            count += 1;
        }
        p += 1;
    }
    if n > 1 {
        count += 1;
    }
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------------------
// Integer polynomial helpers used to build the per-order reduction context.
// Polynomials are dense coefficient vectors, lowest degree first.
// ---------------------------------------------------------------------------

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    poly_trim(&mut out);
    out
}

/// Exact division in Z[x]; the divisor must have leading coefficient +-1.
fn poly_div_exact_int(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    poly_trim(&mut rem);
    let ddeg = den.len() - 1;
    let lead = den.last().unwrap().clone();
    assert!(
        lead.magnitude() == BigInt::one().magnitude(),
        "divisor must have unit leading coefficient"
    );
    if rem.len() < den.len() {
        assert!(
            rem.iter().all(|c| c.is_zero()),
            "inexact polynomial division"
        );
        return vec![BigInt::zero()];
    }
    let qdeg = rem.len() - 1 - ddeg;
    let mut quot = vec![BigInt::zero(); qdeg + 1];
    for k in (0..=qdeg).rev() {
        let c = &rem[k + ddeg] / &lead;
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                let t = &c * dj;
                rem[k + j] -= t;
            }
        }
        quot[k] = c;
    }
    assert!(
        rem.iter().all(|c| c.is_zero()),
        "inexact polynomial division"
    );
    poly_trim(&mut quot);
    quot
}

/// The N-th cyclotomic polynomial via the Moebius product
/// `Phi_N(x) = prod_{d|N} (x^{N/d} - 1)^{mu(d)}`.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut num: Vec<BigInt> = vec![BigInt::one()];
    let mut den: Vec<BigInt> = vec![BigInt::one()];
    for d in divisors(n) {
        let mut factor = vec![BigInt::zero(); (n / d) as usize + 1];
        factor[0] = -BigInt::one();
        *factor.last_mut().unwrap() = BigInt::one();
        match mobius(d) {
            1 => num = poly_mul_int(&num, &factor),
            -1 => den = poly_mul_int(&den, &factor),
            _ => {}
        }
    }
    poly_div_exact_int(&num, &den)
}

// ---------------------------------------------------------------------------
// Per-order context: reduction table for powers of zeta and, when it exists
// in the field, the exact cyclotomic representation of sqrt(order).
// ---------------------------------------------------------------------------

struct CycContext {
    phi: usize,
    /// `zeta^m` reduced mod `Phi_order`, for `0 <= m < table_len`.
    /// Rows have length `phi` and integer entries (`Phi` is monic over Z).
    power_table: Vec<Vec<BigInt>>,
    /// Exact representation of `+sqrt(order)` in `Q(zeta_order)`, present iff
    /// `order = 0, 1 (mod 4)`; verified by squaring at construction.
    sqrt_order: Option<Vec<BigRational>>,
}

impl CycContext {
    fn build(order: u64) -> CycContext {
        let phi = euler_phi(order) as usize;
        let min_poly = cyclotomic_polynomial(order);
        assert_eq!(min_poly.len(), phi + 1);

        // Powers of zeta reduced mod Phi. Enough rows for conjugation
        // (exponents up to order-1) and for products of reduced elements
        // (exponents up to 2*phi-2).
        let table_len = std::cmp::max(order as usize, 2 * phi - 1);
        let mut power_table: Vec<Vec<BigInt>> = Vec::with_capacity(table_len);
        let mut row = vec![BigInt::zero(); phi];
        row[0] = BigInt::one();
        power_table.push(row.clone());
        for _ in 1..table_len {
            // multiply by x, then reduce the degree-phi overflow against Phi
            let carry = row[phi - 1].clone();
            for j in (1..phi).rev() {
                row[j] = row[j - 1].clone();
            }
            row[0] = BigInt::zero();
            if !carry.is_zero() {
                for j in 0..phi {
                    let t = &carry * &min_poly[j];
                    row[j] -= t;
                }
            }
            power_table.push(row.clone());
        }

        let sqrt_order = Self::sqrt_in_field(order, phi, &power_table);
        CycContext {
            phi,
            power_table,
            sqrt_order,
        }
    }

    /// `+sqrt(N)` via the quadratic Gauss sum `g = sum_{a mod N} zeta^{a^2}`:
    /// `g = sqrt(N)` for `N = 1 (mod 4)` and `g = (1+i) sqrt(N)` for
    /// `N = 0 (mod 4)` (with `i = zeta^{N/4}`).  Verified by squaring.
    fn sqrt_in_field(order: u64, phi: usize, table: &[Vec<BigInt>]) -> Option<Vec<BigRational>> {
        if order == 1 {
            return Some(vec![BigRational::one()]);
        }
        if order % 4 == 2 || order % 4 == 3 {
            return None;
        }
        let mut g = vec![BigInt::zero(); phi];
        for a in 0..order {
            let e = ((a as u128 * a as u128) % order as u128) as usize;
            for j in 0..phi {
                g[j] += &table[e][j];
            }
        }
        let to_rat = |v: &[BigInt]| -> Vec<BigRational> {
            v.iter().map(|c| BigRational::from(c.clone())).collect()
        };
        let s: Vec<BigRational> = if order % 4 == 1 {
            to_rat(&g)
        } else {
            // s = g (1 - i) / 2
            let i_row = to_rat(&table[(order / 4) as usize]);
            let g_rat = to_rat(&g);
            let gi = mul_reduced(phi, table, &g_rat, &i_row);
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            g_rat
                .iter()
                .zip(gi.iter())
                .map(|(x, y)| (x - y) * &half)
                .collect()
        };
        // sanity: s^2 must equal the rational `order`
        let s2 = mul_reduced(phi, table, &s, &s);
        let mut expected = vec![BigRational::zero(); phi];
        expected[0] = BigRational::from(BigInt::from(order));
        if s2 == expected {
            Some(s)
        } else {
            None
        }
    }
}

/// Product of two reduced coefficient vectors, reduced again mod `Phi`.
fn mul_reduced(
    phi: usize,
    table: &[Vec<BigInt>],
    a: &[BigRational],
    b: &[BigRational],
) -> Vec<BigRational> {
    let mut prod = vec![BigRational::zero(); 2 * phi - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            prod[i + j] += ai * bj;
        }
    }
    let mut out = vec![BigRational::zero(); phi];
    for (m, c) in prod.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if m < phi {
            out[m] += c;
        } else {
            for j in 0..phi {
                if !table[m][j].is_zero() {
                    out[j] += &c * BigRational::from(table[m][j].clone());
                }
            }
        }
    }
    out
}

fn context(order: u64) -> Arc<CycContext> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CycContext>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(ctx) = cache.read().unwrap().get(&order) {
        return Arc::clone(ctx);
    }
    let ctx = Arc::new(CycContext::build(order));
    cache
        .write()
        .unwrap()
        .entry(order)
        .or_insert_with(|| Arc::clone(&ctx))
        .clone()
}

/// Returns `Ok(order)` when both values live in the same cyclotomic order.
pub fn ensure_same_order(a: &CycExt, b: &CycExt) -> Result<u64, ExactNumError> {
    if a.radicand == b.radicand {
        Ok(a.radicand)
    } else {
        Err(ExactNumError::OrderMismatch(a.radicand, b.radicand))
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic numbers
// ---------------------------------------------------------------------------

/// An element of `Q(zeta_N)` on the power basis, reduced mod `Phi_N`.
#[derive(Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Cyclotomic {
        let phi = euler_phi(order) as usize;
        Cyclotomic {
            order,
            coeffs: vec![BigRational::zero(); phi],
        }
    }

    pub fn one(order: u64) -> Cyclotomic {
        Cyclotomic::from_rational(order, BigRational::one())
    }

    pub fn from_rational(order: u64, r: BigRational) -> Cyclotomic {
        let mut c = Cyclotomic::zero(order);
        c.coeffs[0] = r;
        c
    }

    /// Construct from an arbitrary coefficient list against powers
    /// `zeta^0, zeta^1, ...` (any length), reducing mod `Phi_N`.
    pub fn from_powers(order: u64, coeffs: &[BigRational]) -> Cyclotomic {
        let ctx = context(order);
        let mut out = vec![BigRational::zero(); ctx.phi];
        for (m, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &ctx.power_table[m % order as usize];
            for (k, t) in row.iter().enumerate() {
                if !t.is_zero() {
                    out[k] += c * BigRational::from(t.clone());
                }
            }
        }
        Cyclotomic { order, coeffs: out }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Coefficients over the power basis `1, zeta, ..., zeta^{phi(N)-1}`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value when the element lies in `Q`, else `None`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// `Phi_N` (irreducible over `Q`, so every nonzero element is a unit).
    pub fn inv(&self) -> Result<Cyclotomic, ExactNumError> {
        if self.is_zero() {
            return Err(ExactNumError::DivisionByZero);
        }
        let ctx = context(self.order);
        let min_poly: Vec<BigRational> = cyclotomic_polynomial(self.order)
            .into_iter()
            .map(BigRational::from)
            .collect();
        let inv =
            poly_modular_inverse(&self.coeffs, &min_poly).ok_or(ExactNumError::DivisionByZero)?;
        let mut coeffs = inv;
        coeffs.resize(ctx.phi, BigRational::zero());
        Ok(Cyclotomic {
            order: self.order,
            coeffs,
        })
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Cyclotomic {
        let ctx = context(self.order);
        let n = self.order as usize;
        let mut out = vec![BigRational::zero(); ctx.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (n - j) % n;
            for (k, t) in ctx.power_table[e].iter().enumerate() {
                if !t.is_zero() {
                    out[k] += c * BigRational::from(t.clone());
                }
            }
        }
        Cyclotomic {
            order: self.order,
            coeffs: out,
        }
    }

    /// Numeric embedding `zeta -> exp(2 pi i / N)`.
    pub fn embed(&self) -> Complex64 {
        let n = self.order as f64;
        let mut z = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = std::f64::consts::TAU * (j as f64) / n;
            let cf = rational_to_f64(c);
            z += Complex64::new(cf * angle.cos(), cf * angle.sin());
        }
        z
    }

    fn assert_same_order(&self, other: &Cyclotomic) {
        assert_eq!(
            self.order, other.order,
            "mixed cyclotomic orders ({} vs {})",
            self.order, other.order
        );
    }
}

/// `zeta_N^k` in reduced form; `k` is taken mod `N`.
pub fn root_of_unity(k: i64, order: u64) -> Cyclotomic {
    assert!(order >= 1);
    let ctx = context(order);
    let e = k.rem_euclid(order as i64) as usize;
    let coeffs = ctx.power_table[e]
        .iter()
        .map(|c| BigRational::from(c.clone()))
        .collect();
    Cyclotomic { order, coeffs }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // to_f64 on BigRational handles large numerators/denominators gracefully
    r.to_f64().unwrap_or(f64::NAN)
}

/// Extended Euclid in `Q[x]`: returns `a^{-1} mod m` if `gcd(a, m)` is a
/// nonzero constant.
fn poly_modular_inverse(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    fn deg(p: &[BigRational]) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }
    fn rem_div(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let dd = deg(den).expect("division by zero polynomial");
        let lead = den[dd].clone();
        let mut rem = num.to_vec();
        let nd = match deg(&rem) {
            Some(d) => d,
            None => return (vec![BigRational::zero()], rem),
        };
        if nd < dd {
            return (vec![BigRational::zero()], rem);
        }
        let mut quot = vec![BigRational::zero(); nd - dd + 1];
        for k in (0..=(nd - dd)).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for j in 0..=dd {
                    let t = &c * &den[j];
                    rem[k + j] -= t;
                }
            }
            quot[k] = c;
        }
        (quot, rem)
    }

    // invariant: r0 = t0 * a (mod m), r1 = t1 * a (mod m)
    let mut r0: Vec<BigRational> = m.to_vec();
    let mut r1: Vec<BigRational> = a.to_vec();
    let mut t0: Vec<BigRational> = vec![BigRational::zero()];
    let mut t1: Vec<BigRational> = vec![BigRational::one()];
    while deg(&r1).is_some() {
        let (q, r) = rem_div(&r0, &r1);
        let qt1 = {
            let prod_len = q.len() + t1.len();
            let mut p = vec![BigRational::zero(); prod_len.saturating_sub(1).max(1)];
            for (i, qi) in q.iter().enumerate() {
                if qi.is_zero() {
                    continue;
                }
                for (j, tj) in t1.iter().enumerate() {
                    if !tj.is_zero() {
                        p[i + j] += qi * tj;
                    }
                }
            }
            p
        };
        let mut t2 = t0.clone();
        t2.resize(t2.len().max(qt1.len()), BigRational::zero());
        for (j, c) in qt1.iter().enumerate() {
            t2[j] -= c;
        }
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t2;
        if deg(&r0) == Some(0) {
            break;
        }
    }
    // now r0 should be a nonzero constant (gcd), with r0 = t0 * a mod m
    let d = deg(&r0)?;
    if d != 0 {
        return None;
    }
    let c = r0[0].clone();
    Some(t0.iter().map(|t| t / &c).collect())
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic(order={}, [", self.order)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, "])")
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.assert_same_order(rhs);
        Cyclotomic {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(rhs.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.assert_same_order(rhs);
        Cyclotomic {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(rhs.coeffs.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.assert_same_order(rhs);
        let ctx = context(self.order);
        Cyclotomic {
            order: self.order,
            coeffs: mul_reduced(ctx.phi, &ctx.power_table, &self.coeffs, &rhs.coeffs),
        }
    }
}

impl Mul<&BigRational> for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &BigRational) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * rhs).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// CycExt = Q(zeta_N)[1/sqrt(N)]
// ---------------------------------------------------------------------------

/// An exact number `a + b / sqrt(N)` with `a, b` in `Q(zeta_N)`.
///
/// Canonical form: when `sqrt(N)` lies in `Q(zeta_N)` the `b` part is folded
/// into `a` (so `b = 0`), making derived equality value equality.
#[derive(Clone, PartialEq, Eq)]
pub struct CycExt {
    radicand: u64,
    a: Cyclotomic,
    b: Cyclotomic,
}

impl CycExt {
    pub fn from_parts(a: Cyclotomic, b: Cyclotomic) -> CycExt {
        assert_eq!(a.order(), b.order(), "CycExt parts must share one order");
        let radicand = a.order();
        let mut v = CycExt { radicand, a, b };
        v.canonicalize();
        v
    }

    pub fn from_cyclotomic(a: Cyclotomic) -> CycExt {
        let b = Cyclotomic::zero(a.order());
        CycExt::from_parts(a, b)
    }

    pub fn zero(radicand: u64) -> CycExt {
        CycExt {
            radicand,
            a: Cyclotomic::zero(radicand),
            b: Cyclotomic::zero(radicand),
        }
    }

    pub fn one(radicand: u64) -> CycExt {
        CycExt::from_cyclotomic(Cyclotomic::one(radicand))
    }

    pub fn from_rational(radicand: u64, r: BigRational) -> CycExt {
        CycExt::from_cyclotomic(Cyclotomic::from_rational(radicand, r))
    }

    /// The element `1 / sqrt(N)`.
    pub fn inv_sqrt(radicand: u64) -> CycExt {
        CycExt::from_parts(Cyclotomic::zero(radicand), Cyclotomic::one(radicand))
    }

    fn canonicalize(&mut self) {
        if self.b.is_zero() {
            return;
        }
        let ctx = context(self.radicand);
        if let Some(sqrt) = &ctx.sqrt_order {
            // a + b/sqrt(N) = a + b * sqrt(N)/N
            let s = Cyclotomic {
                order: self.radicand,
                coeffs: sqrt.clone(),
            };
            let scale = BigRational::new(BigInt::one(), BigInt::from(self.radicand));
            let folded = &(&self.b * &s) * &scale;
            self.a = &self.a + &folded;
            self.b = Cyclotomic::zero(self.radicand);
        }
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn part_a(&self) -> &Cyclotomic {
        &self.a
    }

    pub fn part_b(&self) -> &Cyclotomic {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The rational value when the element lies in `Q`, else `None`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.b.is_zero() {
            self.a.as_rational()
        } else {
            None
        }
    }

    /// Complex conjugation: `zeta -> zeta^{-1}`, fixing `1/sqrt(N)`.
    pub fn conj(&self) -> CycExt {
        CycExt {
            radicand: self.radicand,
            a: self.a.conj(),
            b: self.b.conj(),
        }
    }

    pub fn inv(&self) -> Result<CycExt, ExactNumError> {
        if self.is_zero() {
            return Err(ExactNumError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(CycExt {
                radicand: self.radicand,
                a: self.a.inv()?,
                b: Cyclotomic::zero(self.radicand),
            });
        }
        // rationalize by a - b/sqrt(N); the denominator a^2 - b^2/N is a
        // nonzero cyclotomic number because {1, 1/sqrt(N)} is a basis here
        let n_rat = BigRational::new(BigInt::one(), BigInt::from(self.radicand));
        let denom = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &n_rat);
        let denom_inv = denom.inv()?;
        Ok(CycExt {
            radicand: self.radicand,
            a: &self.a * &denom_inv,
            b: &(-&self.b) * &denom_inv,
        })
    }

    /// Numeric embedding with `sqrt(N)` the positive real root.
    pub fn embed(&self) -> Complex64 {
        self.a.embed() + self.b.embed() / (self.radicand as f64).sqrt()
    }

    /// JSON form `{"order": N, "a": [...], "b": [...]}` with rationals as
    /// `"p/q"` strings over the power basis.
    pub fn to_json(&self) -> serde_json::Value {
        let rat_list = |c: &Cyclotomic| -> serde_json::Value {
            serde_json::Value::Array(
                c.coeffs()
                    .iter()
                    .map(|r| serde_json::Value::String(format_rational(r)))
                    .collect(),
            )
        };
        serde_json::json!({
            "order": self.radicand,
            "a": rat_list(&self.a),
            "b": rat_list(&self.b),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<CycExt, ExactNumError> {
        let order = v
            .get("order")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| ExactNumError::Invalid("missing order".into()))?;
        let phi = euler_phi(order) as usize;
        let parse_list = |key: &str| -> Result<Cyclotomic, ExactNumError> {
            let arr = v
                .get(key)
                .and_then(|x| x.as_array())
                .ok_or_else(|| ExactNumError::Invalid(format!("missing {key}")))?;
            if arr.len() != phi {
                return Err(ExactNumError::Invalid(format!(
                    "{key} must have length phi({order}) = {phi}"
                )));
            }
            let mut coeffs = Vec::with_capacity(phi);
            for item in arr {
                let s = item
                    .as_str()
                    .ok_or_else(|| ExactNumError::Invalid("rational must be a string".into()))?;
                coeffs.push(parse_rational(s)?);
            }
            Ok(Cyclotomic { order, coeffs })
        };
        Ok(CycExt::from_parts(parse_list("a")?, parse_list("b")?))
    }
}

/// Renders a rational as `p/q` (or `p` for integers).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<BigRational, ExactNumError> {
    let parts: Vec<&str> = s.split('/').collect();
    let bad = || ExactNumError::Invalid(format!("bad rational: {s}"));
    match parts.as_slice() {
        [p] => {
            let n: BigInt = p.trim().parse().map_err(|_| bad())?;
            Ok(BigRational::from(n))
        }
        [p, q] => {
            let n: BigInt = p.trim().parse().map_err(|_| bad())?;
            let d: BigInt = q.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        _ => Err(bad()),
    }
}

impl fmt::Debug for CycExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CycExt(N={}, a={:?}, b={:?})",
            self.radicand, self.a, self.b
        )
    }
}

impl Add for &CycExt {
    type Output = CycExt;
    fn add(self, rhs: &CycExt) -> CycExt {
        assert_eq!(self.radicand, rhs.radicand, "mixed radicands");
        CycExt {
            radicand: self.radicand,
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &CycExt {
    type Output = CycExt;
    fn sub(self, rhs: &CycExt) -> CycExt {
        assert_eq!(self.radicand, rhs.radicand, "mixed radicands");
        CycExt {
            radicand: self.radicand,
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Neg for &CycExt {
    type Output = CycExt;
    fn neg(self) -> CycExt {
        CycExt {
            radicand: self.radicand,
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Mul for &CycExt {
    type Output = CycExt;
    fn mul(self, rhs: &CycExt) -> CycExt {
        assert_eq!(self.radicand, rhs.radicand, "mixed radicands");
        // (a1 + b1 y)(a2 + b2 y) with y^2 = 1/N
        if self.b.is_zero() && rhs.b.is_zero() {
            return CycExt {
                radicand: self.radicand,
                a: &self.a * &rhs.a,
                b: Cyclotomic::zero(self.radicand),
            };
        }
        let n_rat = BigRational::new(BigInt::one(), BigInt::from(self.radicand));
        let a = &(&self.a * &rhs.a) + &(&(&self.b * &rhs.b) * &n_rat);
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        CycExt::from_parts(a, b)
    }
}

/// Numeric embedding with a requested precision in decimal digits.
///
/// The result is an `(re, im)` pair of doubles; `precision` must be at least
/// 15.  Values up to the f64 ceiling (~16 digits) are honored; the embedding
/// itself sums at most `phi(N)` correctly rounded terms.
pub fn to_complex(x: &CycExt, precision: u32) -> (f64, f64) {
    assert!(precision >= 15, "precision below supported minimum");
    let z = x.embed();
    (z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::FromPrimitive;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn phi_and_cyclotomic_polys() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
        // Phi_12 = x^4 - x^2 + 1
        let p = cyclotomic_polynomial(12);
        let want: Vec<BigInt> = [1i64, 0, -1, 0, 1]
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        assert_eq!(p, want);
        // Phi_8 = x^4 + 1
        let p8 = cyclotomic_polynomial(8);
        let want8: Vec<BigInt> = [1i64, 0, 0, 0, 1]
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        assert_eq!(p8, want8);
    }

    #[test]
    fn root_of_unity_basics() {
        assert_eq!(root_of_unity(0, 12), Cyclotomic::one(12));
        // zeta_12^6 = -1
        let m1 = root_of_unity(6, 12);
        assert_eq!(m1.as_rational(), Some(rat(-1, 1)));
        // negative exponent wraps
        assert_eq!(root_of_unity(-1, 12), root_of_unity(11, 12));
    }

    /// Independent oracle: long division of x^4 by Phi_12 = x^4 - x^2 + 1.
    #[test]
    fn root_of_unity_reduction_oracle() {
        // brute-force remainder of x^k modulo [1, 0, -1, 0, 1]
        fn poly_rem_x_pow(k: usize, modulus: &[i64]) -> Vec<i64> {
            let deg = modulus.len() - 1;
            let mut rem = vec![0i64; k + 1];
            rem[k] = 1;
            for j in (deg..=k).rev() {
                let c = rem[j];
                if c != 0 {
                    for (i, m) in modulus.iter().enumerate() {
                        rem[j - deg + i] -= c * m;
                    }
                }
            }
            rem.truncate(deg);
            rem
        }
        let oracle = poly_rem_x_pow(4, &[1, 0, -1, 0, 1]);
        assert_eq!(oracle, vec![-1, 0, 1, 0]); // zeta^4 = zeta^2 - 1
        let z4 = root_of_unity(4, 12);
        let got: Vec<BigRational> = z4.coeffs().to_vec();
        let want: Vec<BigRational> = oracle.iter().map(|&c| rat(c, 1)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn inv_sqrt_squares_to_reciprocal() {
        let y = CycExt::inv_sqrt(12);
        let y2 = &y * &y;
        assert_eq!(y2.as_rational(), Some(rat(1, 12)));
        // and for a radicand where sqrt(N) is not in the field
        let y = CycExt::inv_sqrt(7);
        let y2 = &y * &y;
        assert_eq!(y2.as_rational(), Some(rat(1, 7)));
    }

    #[test]
    fn inverse_axiom() {
        let y = CycExt::inv_sqrt(12);
        let inv = y.inv().unwrap();
        assert_eq!(&y * &inv, CycExt::one(12));

        let z = CycExt::from_cyclotomic(root_of_unity(5, 12));
        let w = &z + &CycExt::from_rational(12, rat(3, 7));
        assert_eq!(&w * &w.inv().unwrap(), CycExt::one(12));

        // rationalization path: radicand 7 keeps the honest pair basis
        let u = &CycExt::from_cyclotomic(root_of_unity(1, 7)) + &CycExt::inv_sqrt(7);
        assert_eq!(&u * &u.inv().unwrap(), CycExt::one(7));

        assert_eq!(CycExt::zero(12).inv(), Err(ExactNumError::DivisionByZero));
    }

    #[test]
    fn conjugation_is_involutive_inverse_on_units() {
        let z = CycExt::from_cyclotomic(root_of_unity(1, 12));
        assert_eq!(&z.conj() * &z, CycExt::one(12));
        assert_eq!(z.conj().conj(), z);
        // conj fixes 1/sqrt(N)
        let y = CycExt::inv_sqrt(12);
        assert_eq!(y.conj(), y);
    }

    #[test]
    fn embeddings() {
        let one = CycExt::one(12);
        let (re, im) = to_complex(&one, 15);
        assert!((re - 1.0).abs() < 1e-14 && im.abs() < 1e-14);

        // zeta_12^3 = i
        let i = CycExt::from_cyclotomic(root_of_unity(3, 12));
        let (re, im) = to_complex(&i, 15);
        assert!(re.abs() < 1e-14 && (im - 1.0).abs() < 1e-14);

        let y = CycExt::inv_sqrt(12);
        let (re, im) = to_complex(&y, 15);
        assert!((re - 0.28867513459481287).abs() < 1e-12, "got {re}");
        assert!(im.abs() < 1e-12);
    }

    #[test]
    fn sqrt_folding_matches_gauss_sum_sign() {
        // the canonical sqrt must embed to the positive real root
        for n in [5u64, 8, 12, 13, 24, 28] {
            let ctx = context(n);
            let s = ctx.sqrt_order.as_ref().expect("sqrt must exist");
            let c = Cyclotomic {
                order: n,
                coeffs: s.clone(),
            };
            let z = c.embed();
            assert!((z.re - (n as f64).sqrt()).abs() < 1e-9, "order {n}");
            assert!(z.im.abs() < 1e-9, "order {n}");
        }
        // no sqrt for N = 2, 3 mod 4
        for n in [3u64, 6, 7, 11] {
            assert!(context(n).sqrt_order.is_none(), "order {n}");
        }
    }

    #[test]
    fn ring_axioms_sampled() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(0xC1C1_0001);
        let sample = |rng: &mut StdRng| -> CycExt {
            let a_coeffs: Vec<BigRational> = (0..4)
                .map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
                .collect();
            let b_coeffs: Vec<BigRational> = (0..4)
                .map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
                .collect();
            CycExt::from_parts(
                Cyclotomic {
                    order: 12,
                    coeffs: a_coeffs,
                },
                Cyclotomic {
                    order: 12,
                    coeffs: b_coeffs,
                },
            )
        };
        for _ in 0..40 {
            let x = sample(&mut rng);
            let y = sample(&mut rng);
            let z = sample(&mut rng);
            let assoc_l = &(&x * &y) * &z;
            let assoc_r = &x * &(&y * &z);
            assert_eq!(assoc_l, assoc_r);
            let dist_l = &x * &(&y + &z);
            let dist_r = &(&x * &y) + &(&x * &z);
            assert_eq!(dist_l, dist_r);
            assert_eq!(&x * &y, &y * &x);
        }
    }

    #[test]
    fn embedding_is_ring_hom_within_tolerance() {
        let x = &CycExt::from_cyclotomic(root_of_unity(7, 12)) + &CycExt::inv_sqrt(12);
        let y =
            &CycExt::from_rational(12, rat(2, 3)) - &CycExt::from_cyclotomic(root_of_unity(2, 12));
        let lhs = (&x * &y).embed();
        let rhs = x.embed() * y.embed();
        assert!((lhs - rhs).norm() < 1e-12);
        let _ = BigRational::from_f64(0.5); // keep FromPrimitive import exercised
    }

    #[test]
    fn json_round_trip() {
        let x = &CycExt::from_cyclotomic(root_of_unity(7, 12)) + &CycExt::inv_sqrt(12);
        let j = x.to_json();
        let back = CycExt::from_json(&j).unwrap();
        assert_eq!(back, x);

        // mixed orders rejected at the boundary
        let y = CycExt::one(8);
        assert_eq!(
            ensure_same_order(&x, &y),
            Err(ExactNumError::OrderMismatch(12, 8))
        );
    }
}
