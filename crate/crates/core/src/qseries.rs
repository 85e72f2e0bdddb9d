//! Truncated formal Fourier expansions with rational coefficients and
//! fractional exponents `n / den`.
//!
//! A [`QExpansion`] stores only nonzero coefficients, keyed by the exponent
//! numerator, together with an explicit truncation: coefficients are known
//! exactly for all exponents `n / den` with `n < trunc`, and unknown at and
//! beyond `trunc`.  Operations track the tightest provable truncation and
//! never silently lose precision.  Finitely many negative exponents are
//! allowed (weak holomorphy at infinity).
//!
//! Coefficients may carry an `uncertified` flag (a set of exponent
//! numerators); these arise from coefficient-level projections that are only
//! valid away from the level and propagate conservatively through
//! arithmetic.
//!
//! The module also provides the expansion machinery the level-12 example is
//! built from: Dedekind eta quotients with exact integer coefficients, the
//! quasi-modular `E_2`, its holomorphic level-12 combination, the `U(m)`
//! coefficient operator, and the Ligozat cusp-order table for eta quotients
//! on `Gamma_0(N)`.

use crate::exactnum::{format_rational, parse_rational};
use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("division by a series whose lowest known coefficient vanishes")]
    DivisionByNonUnit,
    #[error("operator requires integer exponents (den = 1), got den = {0}")]
    FractionalExponents(i64),
    #[error("invalid series data: {0}")]
    Invalid(String),
}

/// A truncated Fourier expansion `sum a(n) q^{n/den}`.
#[derive(Clone, PartialEq, Eq)]
pub struct QExpansion {
    den: i64,
    coeffs: BTreeMap<i64, BigRational>,
    /// Exponent numerators `n < trunc` are certified; beyond is unknown.
    trunc: i64,
    /// Numerators whose values passed through an uncertified projection.
    uncertified: BTreeSet<i64>,
}

impl QExpansion {
    pub fn zero(den: i64, trunc: i64) -> QExpansion {
        assert!(den >= 1);
        QExpansion {
            den,
            coeffs: BTreeMap::new(),
            trunc,
            uncertified: BTreeSet::new(),
        }
    }

    pub fn one(trunc: i64) -> QExpansion {
        QExpansion::monomial(0, 1, BigRational::one(), trunc)
    }

    /// `c * q^{num/den}`, truncated at `trunc` (numerator units).
    pub fn monomial(num: i64, den: i64, c: BigRational, trunc: i64) -> QExpansion {
        let mut s = QExpansion::zero(den, trunc);
        if !c.is_zero() && num < trunc {
            s.coeffs.insert(num, c);
        }
        s
    }

    pub fn from_coeffs(
        den: i64,
        coeffs: impl IntoIterator<Item = (i64, BigRational)>,
        trunc: i64,
    ) -> QExpansion {
        let mut s = QExpansion::zero(den, trunc);
        for (n, c) in coeffs {
            if !c.is_zero() && n < trunc {
                s.coeffs.insert(n, c);
            }
        }
        s
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at exponent `num/den`, in this series' own denominator.
    /// Panics beyond the certified window.
    pub fn coeff(&self, num: i64) -> BigRational {
        assert!(
            num < self.trunc,
            "coefficient at {num}/{} is beyond the certified window {}",
            self.den,
            self.trunc
        );
        self.coeffs
            .get(&num)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Lowest exponent numerator carrying a nonzero coefficient.
    pub fn min_order(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn uncertified(&self) -> &BTreeSet<i64> {
        &self.uncertified
    }

    pub(crate) fn mark_uncertified(&mut self, num: i64) {
        if num < self.trunc {
            self.uncertified.insert(num);
        }
    }

    /// Reduces `den` to the smallest value representing the same exponents.
    pub fn normalize(mut self) -> QExpansion {
        let mut g = self.den;
        for &k in self.coeffs.keys() {
            g = g.gcd(&k);
        }
        for &k in &self.uncertified {
            g = g.gcd(&k);
        }
        if g <= 1 {
            return self;
        }
        self.den /= g;
        self.coeffs = std::mem::take(&mut self.coeffs)
            .into_iter()
            .map(|(k, v)| (k / g, v))
            .collect();
        self.uncertified = std::mem::take(&mut self.uncertified)
            .into_iter()
            .map(|k| k / g)
            .collect();
        // numerators n with n/g' < trunc/g stay certified
        self.trunc = Integer::div_ceil(&self.trunc, &g);
        self
    }

    /// Rescales to a denominator that `den` divides.
    pub fn with_den(&self, target: i64) -> QExpansion {
        assert!(target >= self.den && target % self.den == 0);
        let f = target / self.den;
        QExpansion {
            den: target,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, v)| (k * f, v.clone()))
                .collect(),
            trunc: self.trunc.saturating_mul(f),
            uncertified: self.uncertified.iter().map(|&k| k * f).collect(),
        }
    }

    fn common_den(x: &QExpansion, y: &QExpansion) -> (QExpansion, QExpansion) {
        let l = x.den.lcm(&y.den);
        (x.with_den(l), y.with_den(l))
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &BigRational) -> QExpansion {
        if c.is_zero() {
            return QExpansion::zero(self.den, self.trunc);
        }
        QExpansion {
            den: self.den,
            coeffs: self.coeffs.iter().map(|(&k, v)| (k, v * c)).collect(),
            trunc: self.trunc,
            uncertified: self.uncertified.clone(),
        }
    }

    /// Substitution `q -> q^m` (realizes `f(tau) -> f(m tau)`).
    pub fn scale_exponents(&self, m: i64) -> QExpansion {
        assert!(m >= 1);
        QExpansion {
            den: self.den,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, v)| (k * m, v.clone()))
                .collect(),
            trunc: self.trunc.saturating_mul(m),
            uncertified: self.uncertified.iter().map(|&k| k * m).collect(),
        }
    }

    /// The `U(m)` coefficient operator `a(n) -> a(m n)`; integer exponents
    /// only.
    pub fn u_operator(&self, m: i64) -> Result<QExpansion, SeriesError> {
        if self.den != 1 {
            return Err(SeriesError::FractionalExponents(self.den));
        }
        assert!(m >= 1);
        let trunc = Integer::div_ceil(&self.trunc, &m);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&k, _)| k.rem_euclid(m) == 0)
            .map(|(&k, v)| (k.div_euclid(m), v.clone()))
            .collect();
        let uncertified = self
            .uncertified
            .iter()
            .filter(|&&k| k.rem_euclid(m) == 0)
            .map(|&k| k.div_euclid(m))
            .collect();
        Ok(QExpansion {
            den: 1,
            coeffs,
            trunc,
            uncertified,
        })
    }

    /// Product, truncated at the tightest provable bound.
    pub fn mul(&self, rhs: &QExpansion) -> QExpansion {
        let (x, y) = QExpansion::common_den(self, rhs);
        let ox = x.min_order().unwrap_or(x.trunc).min(x.trunc);
        let oy = y.min_order().unwrap_or(y.trunc).min(y.trunc);
        let trunc = (x.trunc.saturating_add(oy)).min(y.trunc.saturating_add(ox));
        let mut out = QExpansion::zero(x.den, trunc);
        for (&i, a) in &x.coeffs {
            for (&j, b) in &y.coeffs {
                let k = i + j;
                if k >= trunc {
                    break; // y keys ascend, later j only grow
                }
                let term = a * b;
                match out.coeffs.entry(k) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(term);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += term;
                    }
                }
            }
        }
        out.coeffs.retain(|_, v| !v.is_zero());
        // uncertified output: any sum touched by an uncertified input
        for &i in &x.uncertified {
            for &j in y.coeffs.keys().chain(y.uncertified.iter()) {
                out.mark_uncertified(i + j);
            }
        }
        for &j in &y.uncertified {
            for &i in x.coeffs.keys().chain(x.uncertified.iter()) {
                out.mark_uncertified(i + j);
            }
        }
        out
    }

    /// Quotient; the divisor's lowest certified coefficient must be nonzero.
    pub fn div(&self, rhs: &QExpansion) -> Result<QExpansion, SeriesError> {
        let (x, y) = QExpansion::common_den(self, rhs);
        let vy = match y.min_order() {
            Some(v) => v,
            None => return Err(SeriesError::DivisionByNonUnit),
        };
        let c0 = y.coeff(vy);
        if x.is_zero() {
            return Ok(QExpansion::zero(x.den, x.trunc - vy));
        }
        let vx = x.min_order().unwrap();
        let vz = vx - vy;
        // z_n needs x_{n+vy} (so n + vy < Tx) and y up to index n + vy - vz
        // (so n < Ty - 2 vy + vx)
        let trunc = (x.trunc - vy).min(y.trunc - 2 * vy + vx);
        let mut z: BTreeMap<i64, BigRational> = BTreeMap::new();
        for n in vz..trunc {
            let mut acc = x
                .coeffs
                .get(&(n + vy))
                .cloned()
                .unwrap_or_else(BigRational::zero);
            for (&m, zm) in z.range(vz..n) {
                if let Some(ym) = y.coeffs.get(&(n + vy - m)) {
                    acc -= zm * ym;
                }
            }
            let val = acc / &c0;
            if !val.is_zero() {
                z.insert(n, val);
            }
        }
        let mut out = QExpansion {
            den: x.den,
            coeffs: z,
            trunc,
            uncertified: BTreeSet::new(),
        };
        // a single uncertified input coefficient taints every later output
        let first_taint = x
            .uncertified
            .iter()
            .next()
            .map(|&k| k - vy)
            .into_iter()
            .chain(y.uncertified.iter().next().map(|&k| k - 2 * vy + vx))
            .min();
        if let Some(start) = first_taint {
            for n in start..trunc {
                out.mark_uncertified(n);
            }
        }
        Ok(out)
    }

    /// True when the two series have identical certified coefficients on
    /// their common window (exponents compared as rationals).
    pub fn agrees_on_common_window(&self, other: &QExpansion) -> bool {
        let (x, y) = QExpansion::common_den(self, other);
        let bound = x.trunc.min(y.trunc);
        let zero = BigRational::zero();
        for (&k, v) in &x.coeffs {
            if k < bound && y.coeffs.get(&k).unwrap_or(&zero) != v {
                return false;
            }
        }
        for (&k, v) in &y.coeffs {
            if k < bound && x.coeffs.get(&k).unwrap_or(&zero) != v {
                return false;
            }
        }
        true
    }

    /// JSON form `{"den": d, "trunc": T, "coeffs": [[n, "p/q"], ...]}`,
    /// sorted by `n`; an `"uncertified"` list is added only when nonempty.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(&n, c)| serde_json::json!([n, format_rational(c)]))
            .collect();
        let mut obj = serde_json::json!({
            "den": self.den,
            "trunc": self.trunc,
            "coeffs": coeffs,
        });
        if !self.uncertified.is_empty() {
            obj["uncertified"] =
                serde_json::Value::Array(self.uncertified.iter().map(|&n| n.into()).collect());
        }
        obj
    }

    pub fn from_json(v: &serde_json::Value) -> Result<QExpansion, SeriesError> {
        let bad = |m: &str| SeriesError::Invalid(m.to_string());
        let den = v
            .get("den")
            .and_then(|x| x.as_i64())
            .ok_or_else(|| bad("missing den"))?;
        if den < 1 {
            return Err(bad("den must be positive"));
        }
        let trunc = v
            .get("trunc")
            .and_then(|x| x.as_i64())
            .ok_or_else(|| bad("missing trunc"))?;
        let arr = v
            .get("coeffs")
            .and_then(|x| x.as_array())
            .ok_or_else(|| bad("missing coeffs"))?;
        let mut out = QExpansion::zero(den, trunc);
        for item in arr {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| bad("coeff entries must be [n, \"p/q\"]"))?;
            let n = pair[0]
                .as_i64()
                .ok_or_else(|| bad("exponent must be an integer"))?;
            let s = pair[1]
                .as_str()
                .ok_or_else(|| bad("coefficient must be a string"))?;
            let c = parse_rational(s).map_err(|e| bad(&e.to_string()))?;
            if n >= trunc {
                return Err(bad("coefficient beyond truncation"));
            }
            if !c.is_zero() {
                out.coeffs.insert(n, c);
            }
        }
        if let Some(unc) = v.get("uncertified").and_then(|x| x.as_array()) {
            for item in unc {
                let n = item
                    .as_i64()
                    .ok_or_else(|| bad("uncertified entries must be integers"))?;
                out.uncertified.insert(n);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(q^{}/{})", self, self.trunc, self.den)
    }
}

impl fmt::Display for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&n, c) in &self.coeffs {
            let neg = c < &BigRational::zero();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || n == 0;
            if show_coeff {
                write!(f, "{}", format_rational(&mag))?;
            }
            if n != 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                if self.den == 1 {
                    write!(f, "q^{}", n)?;
                } else {
                    write!(f, "q^({}/{})", n, self.den)?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &QExpansion {
    type Output = QExpansion;
    fn add(self, rhs: &QExpansion) -> QExpansion {
        let (x, mut y) = QExpansion::common_den(self, rhs);
        let trunc = x.trunc.min(y.trunc);
        let mut coeffs = x.coeffs;
        for (k, v) in std::mem::take(&mut y.coeffs) {
            match coeffs.entry(k) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += v;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
        coeffs.retain(|&k, _| k < trunc);
        let mut uncertified: BTreeSet<i64> = x.uncertified.union(&y.uncertified).copied().collect();
        uncertified.retain(|&k| k < trunc);
        QExpansion {
            den: x.den,
            coeffs,
            trunc,
            uncertified,
        }
    }
}

impl Sub for &QExpansion {
    type Output = QExpansion;
    fn sub(self, rhs: &QExpansion) -> QExpansion {
        self + &(-rhs)
    }
}

impl Neg for &QExpansion {
    type Output = QExpansion;
    fn neg(self) -> QExpansion {
        QExpansion {
            den: self.den,
            coeffs: self.coeffs.iter().map(|(&k, v)| (k, -v)).collect(),
            trunc: self.trunc,
            uncertified: self.uncertified.clone(),
        }
    }
}

/// `sigma_1(n)`: sum of positive divisors.
pub fn sigma1(n: i64) -> i64 {
    assert!(n >= 1);
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += d;
            if d != n / d {
                s += n / d;
            }
        }
        d += 1;
    }
    s
}

/// `E_2 = 1 - 24 sum sigma_1(n) q^n`, certified below `trunc`.
pub fn e2_series(trunc: i64) -> QExpansion {
    assert!(trunc >= 1);
    let mut coeffs = BTreeMap::new();
    coeffs.insert(0, BigRational::one());
    for n in 1..trunc {
        coeffs.insert(n, BigRational::from(BigInt::from(-24 * sigma1(n))));
    }
    QExpansion {
        den: 1,
        coeffs,
        trunc,
        uncertified: BTreeSet::new(),
    }
}

/// The holomorphic weight-2 level-12 combination
/// `(E_2(t) - 9 E_2(3t) - 4 E_2(4t) + 36 E_2(12t)) / 24`.
pub fn frak_e2(trunc: i64) -> QExpansion {
    assert!(trunc >= 13);
    let e2 = e2_series(trunc);
    let rat = |p: i64| BigRational::from(BigInt::from(p));
    let combo = &(&e2 - &e2.scale_exponents(3).scale(&rat(9)))
        - &(&e2.scale_exponents(4).scale(&rat(4)) - &e2.scale_exponents(12).scale(&rat(36)));
    combo.scale(&BigRational::new(BigInt::one(), BigInt::from(24)))
}

fn pow_series(base: &QExpansion, e: u64) -> QExpansion {
    // binary exponentiation; trunc bookkeeping rides on mul
    let mut acc: Option<QExpansion> = None;
    let mut sq = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => sq.clone(),
                Some(a) => a.mul(&sq),
            });
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mul(&sq);
        }
    }
    acc.unwrap_or_else(|| QExpansion::one(base.trunc))
}

/// `prod_d eta(d tau)^{r_d}` as a `QExpansion` with `den | 24`; the leading
/// exponent is `sum d r_d / 24` and the eta factors expand by the Euler
/// product with exact integer coefficients.
pub fn eta_quotient(spec: &[(i64, i64)], trunc: i64) -> QExpansion {
    assert!(spec.iter().all(|&(d, _)| d >= 1));
    assert!(trunc >= 1);
    let e24: i64 = spec.iter().map(|&(d, r)| d * r).sum();
    // unit-part window so the shifted result is certified below `trunc`
    let t_unit = (trunc - e24.div_euclid(24) + 1).max(1);
    let mut unit = QExpansion::one(t_unit);
    for &(d, r) in spec {
        if r == 0 {
            continue;
        }
        // P_d = prod_{n >= 1} (1 - q^{d n})
        let mut p = QExpansion::one(t_unit);
        let mut k = d;
        while k < t_unit {
            let factor = QExpansion::from_coeffs(
                1,
                [
                    (0, BigRational::one()),
                    (k, BigRational::from(BigInt::from(-1))),
                ],
                t_unit,
            );
            p = p.mul(&factor);
            k += d;
        }
        let powed = if r > 0 {
            pow_series(&p, r as u64)
        } else {
            let inv = QExpansion::one(t_unit)
                .div(&p)
                .expect("eta unit part is invertible");
            pow_series(&inv, (-r) as u64)
        };
        unit = unit.mul(&powed);
    }
    // shift by q^{e24/24}
    let shifted = QExpansion {
        den: 24,
        coeffs: unit
            .coeffs
            .iter()
            .map(|(&k, v)| (24 * k + e24, v.clone()))
            .collect(),
        trunc: unit.trunc.saturating_mul(24).saturating_add(e24),
        uncertified: BTreeSet::new(),
    };
    let mut out = shifted.normalize();
    // clamp to the requested certification window
    let cap = trunc.saturating_mul(out.den);
    if out.trunc > cap {
        out.trunc = cap;
        out.coeffs.retain(|&k, _| k < cap);
    }
    out
}

/// A cusp of `Gamma_0(N)` represented as `numer/denom` with `denom | N`;
/// `denom = N` is the class of infinity and `denom = 1` the class of 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cusp {
    pub numer: i64,
    pub denom: i64,
}

impl Cusp {
    pub fn label(&self, level: i64) -> String {
        if self.denom == level {
            "oo".to_string()
        } else if self.denom == 1 {
            "0".to_string()
        } else {
            format!("{}/{}", self.numer, self.denom)
        }
    }

    /// Width of the cusp on `Gamma_0(level)`.
    pub fn width(&self, level: i64) -> i64 {
        level / (self.denom * self.denom).gcd(&level)
    }
}

/// Inequivalent cusps of `Gamma_0(level)`: for each `c | N` there are
/// `phi(gcd(c, N/c))` classes `a/c` with `gcd(a, c) = 1`.
pub fn cusps(level: i64) -> Vec<Cusp> {
    assert!(level >= 1);
    let mut out = Vec::new();
    let mut cs: Vec<i64> = (1..=level).filter(|c| level % c == 0).collect();
    cs.sort_unstable();
    for c in cs {
        let g = c.gcd(&(level / c));
        for a0 in 1..=g {
            if a0.gcd(&g) != 1 {
                continue;
            }
            // lift a0 to a residue coprime to c
            let mut a = a0;
            while a.gcd(&c) != 1 {
                a += g;
            }
            let numer = if c == 1 { 0 } else { a };
            out.push(Cusp { numer, denom: c });
        }
    }
    out
}

/// First exponent in the local uniformizer `q_s` of an eta quotient at each
/// cusp of `Gamma_0(level)`: the Ligozat invariant order
/// `(1/24) sum_d gcd(c, d)^2 r_d / d` times the cusp width.
pub fn eta_cusp_orders(spec: &[(i64, i64)], level: i64) -> Vec<(Cusp, BigRational)> {
    assert!(
        spec.iter().all(|&(d, _)| d >= 1 && level % d == 0),
        "eta factors must divide the level"
    );
    cusps(level)
        .into_iter()
        .map(|cusp| {
            let mut ord = BigRational::zero();
            for &(d, r) in spec {
                if r == 0 {
                    continue;
                }
                let g = cusp.denom.gcd(&d);
                ord += BigRational::new(BigInt::from(g * g * r), BigInt::from(24 * d));
            }
            let first_exp = ord * BigRational::from(BigInt::from(cusp.width(level)));
            (cusp, first_exp)
        })
        .collect()
}

/// The eta-quotient data of the level-12 form
/// `H_2 = eta(t)^2 eta(3t)^{-2} eta(4t) eta(6t)^2 eta(12t)`.
pub const H2_SPEC: [(i64, i64); 5] = [(1, 2), (3, -2), (4, 1), (6, 2), (12, 1)];
