//! The discriminant form `D` of the lattice `Z^2 (+) O_F` for a real
//! quadratic field `F = Q(sqrt(N1))`.
//!
//! The hyperbolic plane `Z^2` is unimodular, so `D` is isomorphic to
//! `d^{-1}/O_F` (inverse different mod integers) with the quadratic form
//! `q = field norm (mod 1)`.  Rather than computing with field elements at
//! runtime, `D` is realized by explicit orthogonal generator data:
//!
//! ```text
//! N1 = 1 (mod 4), N = N1:   Z/N1          gen  1/sqrt(N1)
//! N1 = 3 (mod 4), N = 4N1:  (Z/2)^2 x Z/N1
//!                           gens  1/2,  sqrt(N1)/2,  sqrt(N1)/N1
//! N1 = 2 (mod 4), N = 4N1:  Z/2 x Z/4 x Z/(N1/2)
//!                           gens  1/2,  sqrt(N1)/4,  2 sqrt(N1)/N1
//! ```
//!
//! All generator pairs are orthogonal mod 1, so norms and the bilinear form
//! reduce to small integer arithmetic on the scaled values `N q(gen)` mod
//! `N`.  [`DiscriminantForm::validate_generators`] cross-checks the stored
//! data against direct norm/trace computation in `Q(sqrt(N1))`.

use crate::chars::{is_squarefree, prime_divisors};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiscformError {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("squarefree core must exceed 1, got {0}")]
    OutOfRange(i64),
    #[error("norms differ: {0} vs {1} (mod N)")]
    NormMismatch(i64, i64),
    #[error("no automorphism transports the source to the target")]
    NoTransporter,
}

/// The real quadratic field `Q(sqrt(N1))` together with its discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadField {
    pub n1: i64,
    /// Fundamental discriminant: `N1` if `N1 = 1 (mod 4)`, else `4 N1`.
    pub n: i64,
}

impl QuadField {
    pub fn new(n1: i64) -> Result<QuadField, DiscformError> {
        if n1 <= 1 {
            return Err(DiscformError::OutOfRange(n1));
        }
        if !is_squarefree(n1) {
            return Err(DiscformError::NotSquarefree(n1));
        }
        let n = if n1 % 4 == 1 { n1 } else { 4 * n1 };
        Ok(QuadField { n1, n })
    }
}

/// One cyclic factor of `D`: its order, the scaled norm `N q(gen)` of the
/// generator, and the generator as `a + b sqrt(N1)` for cross-checks.
#[derive(Clone, Debug)]
pub struct Generator {
    pub order: i64,
    pub norm_num: i64,
    repr: (BigRational, BigRational),
}

/// An element of `D` as an exponent vector against the generator list,
/// each coordinate reduced mod its cyclic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DElement {
    pub coords: Vec<i64>,
}

/// A Jordan component symbol `p^{+-rank}`, `2_t^{+-rank}` or `4_t^{+-rank}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanSymbol {
    pub prime: i64,
    /// Modulus is `prime^exponent`.
    pub exponent: u32,
    pub rank: u32,
    pub sign: i32,
    /// Oddity tag `t`, present for odd 2-adic components only.
    pub oddity: Option<i64>,
}

impl std::fmt::Display for JordanSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let modulus = self.prime.pow(self.exponent);
        let sign = if self.sign >= 0 { "+" } else { "-" };
        match self.oddity {
            Some(t) => write!(f, "{}_{}^{}{}", modulus, t, sign, self.rank),
            None => write!(f, "{}^{}{}", modulus, sign, self.rank),
        }
    }
}

/// An automorphism of `D`, stored as a permutation of the element
/// enumeration; `label` records which per-prime generators compose it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub label: Vec<i64>,
    images: Vec<usize>,
}

impl Automorphism {
    pub fn apply_index(&self, idx: usize) -> usize {
        self.images[idx]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }
}

/// The discriminant form: generator data plus the precomputed element
/// enumeration and norm table.  Immutable after [`DiscriminantForm::build`].
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    field: QuadField,
    generators: Vec<Generator>,
    /// Mixed-radix strides for coordinate <-> index conversion.
    strides: Vec<i64>,
    /// `N q(element)` mod `N`, indexed by element index.
    norms: Vec<i64>,
}

impl DiscriminantForm {
    pub fn build(n1: i64) -> Result<DiscriminantForm, DiscformError> {
        let field = QuadField::new(n1)?;
        let rat = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        let n = field.n;
        let generators: Vec<Generator> = if n1 % 4 == 1 {
            // single generator 1/sqrt(N1) = sqrt(N1)/N1, norm -1/N1
            vec![Generator {
                order: n1,
                norm_num: (-1i64).rem_euclid(n),
                repr: (rat(0, 1), rat(1, n1)),
            }]
        } else if n1 % 4 == 3 {
            vec![
                // 1/2, norm 1/4
                Generator {
                    order: 2,
                    norm_num: n / 4,
                    repr: (rat(1, 2), rat(0, 1)),
                },
                // sqrt(N1)/2, norm -N1/4
                Generator {
                    order: 2,
                    norm_num: (-n1 * n1).rem_euclid(n),
                    repr: (rat(0, 1), rat(1, 2)),
                },
                // sqrt(N1)/N1, norm -1/N1
                Generator {
                    order: n1,
                    norm_num: (-4i64).rem_euclid(n),
                    repr: (rat(0, 1), rat(1, n1)),
                },
            ]
        } else {
            vec![
                // 1/2, norm 1/4
                Generator {
                    order: 2,
                    norm_num: n / 4,
                    repr: (rat(1, 2), rat(0, 1)),
                },
                // sqrt(N1)/4, norm -N1/16
                Generator {
                    order: 4,
                    norm_num: (-n1 * n1 / 4).rem_euclid(n),
                    repr: (rat(0, 1), rat(1, 4)),
                },
                // 2 sqrt(N1)/N1, norm -4/N1
                Generator {
                    order: n1 / 2,
                    norm_num: (-16i64).rem_euclid(n),
                    repr: (rat(0, 1), rat(2, n1)),
                },
            ]
        };
        // drop trivial factors (N1 = 2 gives an order-1 third factor)
        let generators: Vec<Generator> = generators.into_iter().filter(|g| g.order > 1).collect();

        let mut strides = vec![0i64; generators.len()];
        let mut acc = 1i64;
        for (i, g) in generators.iter().enumerate().rev() {
            strides[i] = acc;
            acc *= g.order;
        }
        debug_assert_eq!(acc, n);

        let size = n as usize;
        let mut norms = Vec::with_capacity(size);
        for idx in 0..size {
            let mut rem = idx as i64;
            let mut norm = 0i64;
            for (g, st) in generators.iter().zip(&strides) {
                let x = rem / st;
                rem %= st;
                norm = (norm + x * x % n * g.norm_num) % n;
            }
            norms.push(norm.rem_euclid(n));
        }

        Ok(DiscriminantForm {
            field,
            generators,
            strides,
            norms,
        })
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    /// `|D| = N`, the level.
    pub fn size(&self) -> i64 {
        self.field.n
    }

    pub fn level(&self) -> i64 {
        self.field.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn zero(&self) -> DElement {
        DElement {
            coords: vec![0; self.generators.len()],
        }
    }

    pub fn element(&self, coords: &[i64]) -> DElement {
        assert_eq!(coords.len(), self.generators.len());
        DElement {
            coords: coords
                .iter()
                .zip(&self.generators)
                .map(|(&x, g)| x.rem_euclid(g.order))
                .collect(),
        }
    }

    pub fn index_of(&self, el: &DElement) -> usize {
        el.coords
            .iter()
            .zip(&self.strides)
            .map(|(&x, &s)| x * s)
            .sum::<i64>() as usize
    }

    pub fn element_at(&self, idx: usize) -> DElement {
        let mut rem = idx as i64;
        let coords = self
            .strides
            .iter()
            .map(|&s| {
                let x = rem / s;
                rem %= s;
                x
            })
            .collect();
        DElement { coords }
    }

    pub fn elements(&self) -> impl Iterator<Item = DElement> + '_ {
        (0..self.size() as usize).map(|i| self.element_at(i))
    }

    pub fn add(&self, a: &DElement, b: &DElement) -> DElement {
        DElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.generators)
                .map(|((&x, &y), g)| (x + y).rem_euclid(g.order))
                .collect(),
        }
    }

    pub fn neg(&self, a: &DElement) -> DElement {
        DElement {
            coords: a
                .coords
                .iter()
                .zip(&self.generators)
                .map(|(&x, g)| (-x).rem_euclid(g.order))
                .collect(),
        }
    }

    /// `N q(el)` as an integer in `[0, N)`.
    pub fn norm_num(&self, el: &DElement) -> i64 {
        self.norms[self.index_of(el)]
    }

    /// `N (a, b)` as an integer in `[0, N)`; generators are orthogonal, so
    /// only the diagonal pairings `(g, g) = 2 q(g)` contribute.
    pub fn bilinear_num(&self, a: &DElement, b: &DElement) -> i64 {
        let n = self.field.n;
        let mut acc = 0i64;
        for ((&x, &y), g) in a.coords.iter().zip(&b.coords).zip(&self.generators) {
            acc = (acc + x * y % n * (2 * g.norm_num % n)) % n;
        }
        acc.rem_euclid(n)
    }

    /// Number of elements with `N q = n (mod N)`.
    pub fn count_norm_class(&self, n: i64) -> usize {
        let target = n.rem_euclid(self.field.n);
        self.norms.iter().filter(|&&v| v == target).count()
    }

    /// The realized norm classes with their multiplicities, ascending.
    pub fn norm_class_counts(&self) -> Vec<(i64, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for &v in &self.norms {
            *counts.entry(v).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    /// Jordan decomposition symbols, one per prime dividing `N`.
    ///
    /// Odd `p`: `p^{+-1}` with sign `((-2 N1/p)/p)`.  The 2-adic component is
    /// `2_2^{+2}` for `N1 = 3 (mod 4)` and `2_1^{+1} (+) 4_t^{+-1}` with
    /// `t = -N1/2` and sign `(2/t)` for `N1 = 2 (mod 4)`.
    pub fn jordan(&self) -> Vec<JordanSymbol> {
        use crate::chars::kronecker;
        let n1 = self.field.n1;
        let mut symbols = Vec::new();
        if n1 % 4 == 3 {
            symbols.push(JordanSymbol {
                prime: 2,
                exponent: 1,
                rank: 2,
                sign: 1,
                oddity: Some(2),
            });
        } else if n1 % 4 == 2 {
            let t = -n1 / 2;
            symbols.push(JordanSymbol {
                prime: 2,
                exponent: 1,
                rank: 1,
                sign: 1,
                oddity: Some(1),
            });
            symbols.push(JordanSymbol {
                prime: 2,
                exponent: 2,
                rank: 1,
                sign: kronecker(2, t),
                oddity: Some(t),
            });
        }
        for p in prime_divisors(n1) {
            if p == 2 {
                continue;
            }
            symbols.push(JordanSymbol {
                prime: p,
                exponent: 1,
                rank: 1,
                sign: kronecker(-2 * (n1 / p), p),
                oddity: None,
            });
        }
        symbols.sort_by_key(|s| (s.prime, s.exponent));
        symbols
    }

    /// Coordinate action of the per-prime generator `sigma_p`.
    fn sigma_p(&self, p: i64, el: &DElement) -> DElement {
        let n1 = self.field.n1;
        let mut coords = el.coords.clone();
        if p == 2 {
            if n1 % 4 == 3 {
                // swap the two order-2 generators 1/2 and sqrt(N1)/2
                coords.swap(0, 1);
            } else {
                // N1 = 2 (mod 4): negate the 2-adic generators (orders 2, 4)
                coords[0] = (-coords[0]).rem_euclid(self.generators[0].order);
                coords[1] = (-coords[1]).rem_euclid(self.generators[1].order);
            }
            return DElement { coords };
        }
        // odd p: negate the p-primary part of each cyclic factor via CRT
        for (i, g) in self.generators.iter().enumerate() {
            let mut pe = 1i64;
            let mut o = g.order;
            while o % p == 0 {
                pe *= p;
                o /= p;
            }
            if pe == 1 {
                continue;
            }
            let rest = g.order / pe;
            let x = coords[i];
            // x' = -x mod pe, x' = x mod rest
            let mut xp = (-x).rem_euclid(pe);
            while xp % rest != x % rest {
                xp += pe;
                assert!(xp < g.order, "CRT lift must exist");
            }
            coords[i] = xp;
        }
        DElement { coords }
    }

    /// All `2^{omega(N)}` automorphisms: products of subsets of the
    /// per-prime involutions `sigma_p`.  Each preserves `q` and the group
    /// law; the identity carries the empty label.
    pub fn automorphisms(&self) -> Vec<Automorphism> {
        let primes = prime_divisors(self.field.n);
        let size = self.size() as usize;
        let mut maps = Vec::with_capacity(1 << primes.len());
        for mask in 0u32..(1 << primes.len()) {
            let mut label = Vec::new();
            for (bit, &p) in primes.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    label.push(p);
                }
            }
            let mut images = Vec::with_capacity(size);
            for idx in 0..size {
                let mut el = self.element_at(idx);
                for (bit, &p) in primes.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        el = self.sigma_p(p, &el);
                    }
                }
                images.push(self.index_of(&el));
            }
            maps.push(Automorphism { label, images });
        }
        maps
    }

    pub fn apply(&self, sigma: &Automorphism, el: &DElement) -> DElement {
        self.element_at(sigma.apply_index(self.index_of(el)))
    }

    /// Finds `sigma` with `sigma(beta) = gamma`; requires equal norms.
    ///
    /// By norm-transitivity this search cannot fail for same-norm pairs;
    /// `NoTransporter` would signal corrupted generator data.
    pub fn find_norm_transporter(
        &self,
        beta: &DElement,
        gamma: &DElement,
    ) -> Result<Automorphism, DiscformError> {
        let nb = self.norm_num(beta);
        let ng = self.norm_num(gamma);
        if nb != ng {
            return Err(DiscformError::NormMismatch(nb, ng));
        }
        let target = self.index_of(gamma);
        let source = self.index_of(beta);
        self.automorphisms()
            .into_iter()
            .find(|s| s.apply_index(source) == target)
            .ok_or(DiscformError::NoTransporter)
    }

    /// Cross-checks the generator data against direct norm/trace arithmetic
    /// in `Q(sqrt(N1))`: scaled norms, pairwise orthogonality mod 1, and
    /// exactness of the claimed orders.
    pub fn validate_generators(&self) -> bool {
        let n1 = BigRational::from(BigInt::from(self.field.n1));
        let n = BigRational::from(BigInt::from(self.field.n));
        let is_int = |r: &BigRational| r.denom().is_one();
        // q(a + b sqrt(N1)) = a^2 - N1 b^2; (x, y) = Tr(x conj(y))
        let norm = |(a, b): &(BigRational, BigRational)| a * a - &n1 * b * b;
        let trace_pair = |x: &(BigRational, BigRational), y: &(BigRational, BigRational)| {
            // Tr((a1 + b1 s)(a2 - b2 s)) = 2 a1 a2 - 2 N1 b1 b2
            let two = BigRational::from(BigInt::from(2));
            &two * (&x.0 * &y.0) - &two * &n1 * (&x.1 * &y.1)
        };
        for (i, g) in self.generators.iter().enumerate() {
            // N q(g) = norm_num (mod N)
            let scaled = &n * norm(&g.repr);
            if !is_int(&scaled) {
                return false;
            }
            let diff = scaled.numer() - BigInt::from(g.norm_num);
            if !(&diff % self.field.n).abs().is_zero() {
                return false;
            }
            // order exactness: k * g integral exactly when order | k
            for k in 1..=g.order {
                let ka = &g.repr.0 * BigRational::from(BigInt::from(k));
                let kb = &g.repr.1 * BigRational::from(BigInt::from(k));
                let integral = if self.field.n1 % 4 == 1 {
                    // O_F = Z[(1 + sqrt(N1))/2]: x + y sqrt(N1) integral iff
                    // x - y and 2y are integers
                    is_int(&(&ka - &kb)) && is_int(&(&kb * BigRational::from(BigInt::from(2))))
                } else {
                    is_int(&ka) && is_int(&kb)
                };
                if integral != (k == g.order) {
                    return false;
                }
            }
            // orthogonality mod 1
            for h in &self.generators[i + 1..] {
                if !is_int(&trace_pair(&g.repr, &h.repr)) {
                    return false;
                }
            }
        }
        true
    }
}
