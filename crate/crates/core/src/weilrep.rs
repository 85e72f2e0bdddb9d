//! Exact Weil representation matrices on the group algebra of `D`.
//!
//! The generators act by
//!
//! ```text
//! rho(T) e_g = e(q(g)) e_g
//! rho(S) e_g = (1/sqrt(N)) sum_d e(-(g, d)) e_d
//! ```
//!
//! and `rho(M)` for a general unimodular `M` is the product of generator
//! images along an `S`, `T^k` word for `M` obtained by continued-fraction
//! reduction.  The lattice behind `D` has signature `(2, 2)`, so no
//! metaplectic phase enters; rather than assuming this, the defining
//! relations (`rho(S)^4 = 1`, `(rho(S) rho(T))^3 = rho(S)^2`,
//! `rho(T)^N = 1`) and the homomorphism property are verified by tests.
//!
//! Entries live in [`CycExt`] with radicand `N`; powers of `1/sqrt(N)`
//! reduce immediately during multiplication.

use crate::discform::DiscriminantForm;
use crate::exactnum::{root_of_unity, CycExt};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeilrepError {
    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(i64),
}

/// A 2x2 integer matrix `[[a, b], [c, d]]`.
pub type Mat2 = [[i64; 2]; 2];

pub const MAT_I: Mat2 = [[1, 0], [0, 1]];
pub const MAT_S: Mat2 = [[0, -1], [1, 0]];
pub const MAT_T: Mat2 = [[1, 1], [0, 1]];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

pub fn mat_det(m: &Mat2) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// One token of an `S`, `T^k` word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sl2Token {
    S,
    T(i64),
}

/// A word in the generators whose product reproduces the source matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Word(pub Vec<Sl2Token>);

impl Sl2Word {
    /// Multiplies the word back out to a 2x2 integer matrix.
    pub fn evaluate(&self) -> Mat2 {
        let mut m = MAT_I;
        for tok in &self.0 {
            let g = match tok {
                Sl2Token::S => MAT_S,
                Sl2Token::T(k) => [[1, *k], [0, 1]],
            };
            m = mat_mul(&m, &g);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Decomposes a determinant-one integer matrix into an `S`, `T^k` word by
/// Euclidean reduction of the left column; word length is `O(log max|entry|)`.
pub fn decompose_word(m: &Mat2) -> Result<Sl2Word, WeilrepError> {
    let det = mat_det(m);
    if det != 1 {
        return Err(WeilrepError::NotUnimodular(det));
    }
    let mut word = Vec::new();
    let mut cur = *m;
    loop {
        let [[a, b], [c, d]] = cur;
        if c == 0 {
            // a d = 1, so a = d = +-1 and cur = +- T^(+-b)
            if a == 1 {
                if b != 0 {
                    word.push(Sl2Token::T(b));
                }
            } else {
                // -T^{-b} = S^2 T^{-b}
                word.push(Sl2Token::S);
                word.push(Sl2Token::S);
                if b != 0 {
                    word.push(Sl2Token::T(-b));
                }
            }
            break;
        }
        // a = q c + r with 0 <= r < |c|; then S^{-1} T^{-q} cur has smaller
        // lower-left entry, and cur = T^q S (S^{-1} T^{-q} cur)
        let q = a.div_euclid(c);
        let r = a.rem_euclid(c);
        if q != 0 {
            word.push(Sl2Token::T(q));
        }
        word.push(Sl2Token::S);
        cur = [[c, d], [-r, -(b - q * d)]];
    }
    Ok(Sl2Word(word))
}

/// A square matrix over `CycExt`, indexed by the element enumeration of `D`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeilMatrix {
    dim: usize,
    radicand: u64,
    entries: Vec<CycExt>,
}

impl WeilMatrix {
    pub fn identity(dim: usize, radicand: u64) -> WeilMatrix {
        let mut entries = vec![CycExt::zero(radicand); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = CycExt::one(radicand);
        }
        WeilMatrix {
            dim,
            radicand,
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn entry(&self, row: usize, col: usize) -> &CycExt {
        &self.entries[row * self.dim + col]
    }

    fn entry_mut(&mut self, row: usize, col: usize) -> &mut CycExt {
        &mut self.entries[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &WeilMatrix) -> WeilMatrix {
        assert_eq!(self.dim, rhs.dim);
        assert_eq!(self.radicand, rhs.radicand);
        let mut out = WeilMatrix {
            dim: self.dim,
            radicand: self.radicand,
            entries: vec![CycExt::zero(self.radicand); self.dim * self.dim],
        };
        for i in 0..self.dim {
            for k in 0..self.dim {
                let aik = self.entry(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    let bkj = rhs.entry(k, j);
                    if bkj.is_zero() {
                        continue;
                    }
                    let sum = &*out.entry_mut(i, j) + &(aik * bkj);
                    *out.entry_mut(i, j) = sum;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> WeilMatrix {
        let mut out = WeilMatrix::identity(self.dim, self.radicand);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> WeilMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                *out.entry_mut(i, j) = self.entry(j, i).conj();
            }
        }
        out
    }

    /// Exact unitarity: `M M^dagger = I`.
    pub fn is_unitary(&self) -> bool {
        self.mul(&self.dagger()) == WeilMatrix::identity(self.dim, self.radicand)
    }

    /// Entrywise numeric embedding.
    pub fn embed(&self) -> Vec<Vec<num::complex::Complex64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entry(i, j).embed()).collect())
            .collect()
    }

    /// JSON as a row-major array of [`CycExt`] values.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..self.dim)
            .map(|i| {
                serde_json::Value::Array(
                    (0..self.dim).map(|j| self.entry(i, j).to_json()).collect(),
                )
            })
            .collect();
        serde_json::json!({
            "dim": self.dim,
            "order": self.radicand,
            "entries": rows,
        })
    }
}

impl fmt::Debug for WeilMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeilMatrix(dim={}, N={})", self.dim, self.radicand)
    }
}

/// `rho(T)`: diagonal with entries `e(q(g)) = zeta_N^{N q(g)}`.
pub fn rho_t(d: &DiscriminantForm) -> WeilMatrix {
    rho_t_power(d, 1)
}

/// `rho(T)^k`, formed directly on the diagonal.
pub fn rho_t_power(d: &DiscriminantForm, k: i64) -> WeilMatrix {
    let n = d.level() as u64;
    let dim = d.size() as usize;
    let mut m = WeilMatrix {
        dim,
        radicand: n,
        entries: vec![CycExt::zero(n); dim * dim],
    };
    for idx in 0..dim {
        let el = d.element_at(idx);
        let phase = root_of_unity(k * d.norm_num(&el), n);
        *m.entry_mut(idx, idx) = CycExt::from_cyclotomic(phase);
    }
    m
}

/// `rho(S)`: entry at `(row d, col g)` is `(1/sqrt(N)) e(-(g, d))`; the
/// matrix is symmetric because the bilinear form is.
pub fn rho_s(d: &DiscriminantForm) -> WeilMatrix {
    let n = d.level() as u64;
    let dim = d.size() as usize;
    let inv_sqrt = CycExt::inv_sqrt(n);
    let mut m = WeilMatrix {
        dim,
        radicand: n,
        entries: vec![CycExt::zero(n); dim * dim],
    };
    for col in 0..dim {
        let g = d.element_at(col);
        for row in 0..dim {
            let del = d.element_at(row);
            let phase = root_of_unity(-d.bilinear_num(&g, &del), n);
            *m.entry_mut(row, col) = &inv_sqrt * &CycExt::from_cyclotomic(phase);
        }
    }
    m
}

/// `rho(M)` for unimodular `M`, via generator images along a word for `M`.
pub fn rho(d: &DiscriminantForm, m: &Mat2) -> Result<WeilMatrix, WeilrepError> {
    let word = decompose_word(m)?;
    let n = d.level() as u64;
    let dim = d.size() as usize;
    let s_mat = rho_s(d);
    let mut out = WeilMatrix::identity(dim, n);
    for tok in &word.0 {
        out = match tok {
            Sl2Token::S => out.mul(&s_mat),
            Sl2Token::T(k) => out.mul(&rho_t_power(d, *k)),
        };
    }
    Ok(out)
}

/// The dual representation: entrywise complex conjugate of `rho(M)`.
pub fn dual_rho(d: &DiscriminantForm, m: &Mat2) -> Result<WeilMatrix, WeilrepError> {
    let r = rho(d, m)?;
    let mut out = r.clone();
    for i in 0..r.dim() {
        for j in 0..r.dim() {
            *out.entry_mut(i, j) = r.entry(i, j).conj();
        }
    }
    Ok(out)
}
