//! Invariant exterior algebra over a fixed (1,0)/(0,1) coframe.
//!
//! Generators `0..n` are `φ_1..φ_n` and `n..2n` are `φ̄_1..φ̄_n`. A monomial
//! is a strictly increasing generator list, stored as a bitmask; a form is a
//! map from monomials to complex coefficients. Coefficients are normalized at
//! insertion, so two forms are equal iff their maps are equal.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::matrix::CMat;
use crate::error::{GeometryError, Result};

/// Largest complex dimension representable (two generators per dimension in a `u32` mask).
pub const MAX_FORM_DIM: usize = 16;

type Mask = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantForm {
    n: usize,
    terms: BTreeMap<Mask, Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Sign of reordering `a ∧ b` into increasing order (masks must be disjoint).
fn merge_sign(a: Mask, b: Mask) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (a >> y >> 1).count_ones();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn mask_indices(m: Mask) -> Vec<usize> {
    (0..32).filter(|&g| m & (1 << g) != 0).collect()
}

impl InvariantForm {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_FORM_DIM, "form dimension {n} exceeds {MAX_FORM_DIM}");
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, value: Complex64) -> Self {
        Self::from_term(n, &[], value)
    }

    /// Single monomial `value · ψ_{g1} ∧ … ∧ ψ_{gp}` in any generator order;
    /// repeated generators give zero.
    pub fn from_term(n: usize, generators: &[usize], value: Complex64) -> Self {
        let mut f = Self::zero(n);
        f.add_term(generators, value);
        f
    }

    /// `φ_i` (zero-based).
    pub fn phi(n: usize, i: usize) -> Self {
        Self::from_term(n, &[i], Complex64::new(1.0, 0.0))
    }

    /// `φ̄_i` (zero-based).
    pub fn phibar(n: usize, i: usize) -> Self {
        Self::from_term(n, &[n + i], Complex64::new(1.0, 0.0))
    }

    /// `Σ v_i φ_i`.
    pub fn one_form(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut f = Self::zero(n);
        for (i, &vi) in v.iter().enumerate() {
            f.add_term(&[i], vi);
        }
        f
    }

    /// `√−1 Σ M_{ij} φ_i ∧ φ̄_j`.
    pub fn from_11_matrix(m: &CMat) -> Self {
        let n = m.nrows();
        let mut f = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                f.add_term(&[i, n + j], Complex64::i() * m[(i, j)]);
            }
        }
        f
    }

    /// The fundamental form `ω = √−1 Σ φ_i ∧ φ̄_i` of the unitary coframe.
    pub fn kahler_form(n: usize) -> Self {
        Self::from_11_matrix(&CMat::identity(n, n))
    }

    /// Adds a monomial, normalizing generator order and sign.
    pub fn add_term(&mut self, generators: &[usize], value: Complex64) {
        assert!(generators.iter().all(|&g| g < 2 * self.n), "generator out of range");
        let mut list = generators.to_vec();
        let mut sign = 1.0;
        // insertion sort, counting transpositions
        for a in 1..list.len() {
            let mut b = a;
            while b > 0 && list[b - 1] > list[b] {
                list.swap(b - 1, b);
                sign = -sign;
                b -= 1;
            }
        }
        if list.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let mask = list.iter().fold(0 as Mask, |m, &g| m | (1 << g));
        self.add_mask(mask, value * sign);
    }

    fn add_mask(&mut self, mask: Mask, value: Complex64) {
        if value == zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(zero);
        *entry += value;
        if *entry == zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as (sorted generator list, coefficient) pairs.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.terms.iter().map(|(&m, &v)| (mask_indices(m), v))
    }

    /// Terms with their bidegree `(p, q)`.
    pub fn terms_with_bidegree(&self) -> impl Iterator<Item = (Vec<usize>, (usize, usize), Complex64)> + '_ {
        self.terms
            .iter()
            .map(|(&m, &v)| (mask_indices(m), self.bidegree_of(m), v))
    }

    /// Coefficient of the monomial with the given generators, in the given order.
    pub fn coefficient(&self, generators: &[usize]) -> Complex64 {
        let probe = Self::from_term(self.n, generators, Complex64::new(1.0, 0.0));
        match probe.terms.iter().next() {
            Some((m, sign)) => self.terms.get(m).copied().unwrap_or_else(zero) * sign,
            None => zero(),
        }
    }

    fn bidegree_of(&self, m: Mask) -> (usize, usize) {
        let low = (1 as Mask).checked_shl(self.n as u32).map_or(Mask::MAX, |x| x - 1);
        ((m & low).count_ones() as usize, (m >> self.n).count_ones() as usize)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.n);
        for (&m, &v) in &self.terms {
            out.add_mask(m, v * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (&m, &v) in &other.terms {
            out.add_mask(m, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(GeometryError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.n);
        for (&ma, &va) in &self.terms {
            for (&mb, &vb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                out.add_mask(ma | mb, va * vb * merge_sign(ma, mb));
            }
        }
        Ok(out)
    }

    /// Complex conjugation: `φ_i ↔ φ̄_i`, coefficients conjugated, reordering sign included.
    pub fn conjugate(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for (&m, &v) in &self.terms {
            let swapped: Vec<usize> = mask_indices(m)
                .into_iter()
                .map(|g| if g < n { g + n } else { g - n })
                .collect();
            out.add_term(&swapped, v.conj());
        }
        out
    }

    /// The `(p, q)` component.
    pub fn bidegree_part(&self, p: usize, q: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (&m, &v) in &self.terms {
            if self.bidegree_of(m) == (p, q) {
                out.terms.insert(m, v);
            }
        }
        out
    }

    /// All bidegrees that occur, sorted.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.terms.keys().map(|&m| self.bidegree_of(m)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Sum of squared coefficient moduli over the monomial basis.
    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    /// Coefficient matrix `M` of a (1,1)-form written `√−1 Σ M_{ij} φ_i ∧ φ̄_j`;
    /// other bidegrees are ignored.
    pub fn coefficient_matrix_11(&self) -> CMat {
        let n = self.n;
        CMat::from_fn(n, n, |i, j| -Complex64::i() * self.coefficient(&[i, n + j]))
    }

    /// Wedge of each generator image: the map `ψ_g ↦ images[g]` extended as a
    /// graded derivation of degree one. Used for the exterior derivative.
    pub(crate) fn derive_with(&self, images: &[InvariantForm]) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for (&m, &v) in &self.terms {
            let gens = mask_indices(m);
            for (pos, &g) in gens.iter().enumerate() {
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let before: Mask = gens[..pos].iter().fold(0, |a, &x| a | (1 << x));
                let after: Mask = gens[pos + 1..].iter().fold(0, |a, &x| a | (1 << x));
                for (&dm, &dv) in &images[g].terms {
                    if dm & (before | after) != 0 {
                        continue;
                    }
                    let s = merge_sign(before, dm) * merge_sign(before | dm, after);
                    out.add_mask(before | dm | after, v * dv * sign * s);
                }
            }
        }
        out
    }
}

impl fmt::Display for InvariantForm {
    /// Renders e.g. `(1+0i) φ1∧φ̄2`; zero renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.n;
        let mut first = true;
        for (gens, v) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let names: Vec<String> = gens
                .iter()
                .map(|&g| if g < n { format!("φ{}", g + 1) } else { format!("φ̄{}", g - n + 1) })
                .collect();
            let coef = format!("({}{:+}i)", v.re, v.im);
            if names.is_empty() {
                write!(f, "{coef}")?;
            } else {
                write!(f, "{coef} {}", names.join("∧"))?;
            }
        }
        Ok(())
    }
}
