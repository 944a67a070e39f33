//! Finite-field arithmetic for `F_q`, `q` a prime power up to 256, backed
//! by precomputed operation tables, plus enumeration of symbol vectors and
//! bounded-weight error patterns.
//!
//! Element codes are integers `0..q-1`; `0` is the additive identity and
//! `1` the multiplicative identity. For prime `q` arithmetic is integer
//! arithmetic mod `q`. For `q = p^k` an element code is the base-`p`
//! expansion of the polynomial's coefficients (code `Σ c_i p^i` for the
//! polynomial `Σ c_i x^i`), and multiplication reduces modulo the
//! lexicographically smallest monic irreducible polynomial of degree `k`
//! over `F_p`. This makes element codes deterministic across runs and
//! platforms.

use crate::{Error, Limits, Result};

/// A field element code in `0..q-1`.
pub type Symbol = u8;

/// A vector of field element codes.
pub type SymbolVector = Vec<Symbol>;

/// Maximum supported field size.
pub const MAX_FIELD_SIZE: u64 = 256;

/// The finite field `F_q` with complete operation tables.
#[derive(Clone)]
pub struct FieldSpec {
    q: usize,
    characteristic: u64,
    degree: u32,
    add_table: Vec<Symbol>,
    mul_table: Vec<Symbol>,
    neg_table: Vec<Symbol>,
    inv_table: Vec<Symbol>,
    irreducible: Vec<u8>, // coefficients c_0..c_k of the reduction polynomial
}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.q)
            .field("characteristic", &self.characteristic)
            .field("degree", &self.degree)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}
impl Eq for FieldSpec {}

/// Builds `F_q`. Fails if `q` is not a prime power or exceeds 256.
pub fn make_field(q: u64) -> Result<FieldSpec> {
    if q > MAX_FIELD_SIZE {
        return Err(Error::TooLarge(q));
    }
    let (p, k) = prime_power_decompose(q).ok_or(Error::NotPrimePower(q))?;
    let qs = q as usize;

    // Reduction polynomial: monic of degree k, lexicographically smallest
    // non-leading coefficient tuple among the irreducible ones.
    let irreducible = smallest_irreducible(p, k);

    let mut add_table = vec![0u8; qs * qs];
    let mut mul_table = vec![0u8; qs * qs];
    for a in 0..qs {
        for b in 0..qs {
            add_table[a * qs + b] = poly_add(a as u64, b as u64, p, k);
            mul_table[a * qs + b] = poly_mul(a as u64, b as u64, p, k, &irreducible);
        }
    }
    let mut neg_table = vec![0u8; qs];
    let mut inv_table = vec![0u8; qs];
    for a in 0..qs {
        neg_table[a] = (0..qs)
            .find(|&b| add_table[a * qs + b] == 0)
            .expect("additive inverse exists") as u8;
        if a != 0 {
            inv_table[a] = (1..qs)
                .find(|&b| mul_table[a * qs + b] == 1)
                .expect("multiplicative inverse exists") as u8;
        }
    }

    Ok(FieldSpec {
        q: qs,
        characteristic: p,
        degree: k,
        add_table,
        mul_table,
        neg_table,
        inv_table,
        irreducible,
    })
}

impl FieldSpec {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Coefficients `c_0..c_k` of the reduction polynomial (`c_k = 1`).
    /// For prime fields this is the trivial `[0, 1]`-style degree-1 poly.
    pub fn reduction_polynomial(&self) -> &[u8] {
        &self.irreducible
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add_table[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        self.mul_table[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        self.neg_table[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        if a == 0 {
            None
        } else {
            Some(self.inv_table[a as usize])
        }
    }

    pub fn contains(&self, a: Symbol) -> bool {
        (a as usize) < self.q
    }

    /// Entrywise sum of two vectors.
    pub fn vec_add(&self, u: &[Symbol], v: &[Symbol]) -> SymbolVector {
        debug_assert_eq!(u.len(), v.len());
        u.iter().zip(v).map(|(&a, &b)| self.add(a, b)).collect()
    }

    /// Entrywise difference of two vectors.
    pub fn vec_sub(&self, u: &[Symbol], v: &[Symbol]) -> SymbolVector {
        debug_assert_eq!(u.len(), v.len());
        u.iter().zip(v).map(|(&a, &b)| self.sub(a, b)).collect()
    }

    /// Entrywise scalar multiple.
    pub fn vec_scale(&self, c: Symbol, v: &[Symbol]) -> SymbolVector {
        v.iter().map(|&a| self.mul(c, a)).collect()
    }

    /// Dot product of two vectors.
    pub fn dot(&self, u: &[Symbol], v: &[Symbol]) -> Symbol {
        debug_assert_eq!(u.len(), v.len());
        u.iter()
            .zip(v)
            .fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Index of a vector in the lexicographic enumeration of `F_q^n`
    /// (first coordinate most significant).
    pub fn vector_index(&self, v: &[Symbol]) -> usize {
        v.iter().fold(0usize, |acc, &s| acc * self.q + s as usize)
    }

    /// Inverse of [`vector_index`](Self::vector_index).
    pub fn vector_from_index(&self, mut idx: usize, n: usize) -> SymbolVector {
        let mut v = vec![0u8; n];
        for slot in v.iter_mut().rev() {
            *slot = (idx % self.q) as u8;
            idx /= self.q;
        }
        v
    }
}

/// Number of nonzero entries.
pub fn hamming_weight(v: &[Symbol]) -> usize {
    v.iter().filter(|&&s| s != 0).count()
}

/// `q^n` as a u128, saturating far above any practical limit.
pub fn vector_space_size(q: usize, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(q as u128);
    }
    acc
}

/// `Σ_{w=0..delta} C(n,w) (q-1)^w`: the number of vectors in `F_q^n` of
/// Hamming weight at most `delta`.
pub fn error_pattern_count(q: usize, n: usize, delta: usize) -> u128 {
    let mut total: u128 = 0;
    for w in 0..=delta.min(n) {
        let mut term = binomial(n, w);
        for _ in 0..w {
            term = term.saturating_mul((q - 1) as u128);
        }
        total = total.saturating_add(term);
    }
    total
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All `q^n` vectors in lexicographic order of entry codes.
pub fn enumerate_vectors(
    field: &FieldSpec,
    n: usize,
    limits: &Limits,
) -> Result<VectorIter> {
    let cost = vector_space_size(field.q, n);
    limits.check(cost)?;
    Ok(VectorIter {
        q: field.q as u8,
        next: Some(vec![0; n]),
    })
}

#[derive(Debug)]
pub struct VectorIter {
    q: u8,
    next: Option<SymbolVector>,
}

impl Iterator for VectorIter {
    type Item = SymbolVector;

    fn next(&mut self) -> Option<SymbolVector> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break; // wrapped: enumeration complete
            }
            i -= 1;
            if succ[i] + 1 < self.q {
                succ[i] += 1;
                for s in succ[i + 1..].iter_mut() {
                    *s = 0;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(current)
    }
}

/// All vectors of Hamming weight at most `delta`, including the zero
/// pattern, each exactly once. Ordered by weight, then support position
/// (lexicographic), then nonzero values (lexicographic).
pub fn enumerate_error_patterns(
    field: &FieldSpec,
    n: usize,
    delta: usize,
    limits: &Limits,
) -> Result<Vec<SymbolVector>> {
    let cost = error_pattern_count(field.q, n, delta);
    limits.check(cost)?;
    let mut out = Vec::with_capacity(cost as usize);
    out.push(vec![0; n]);
    for w in 1..=delta.min(n) {
        for support in combinations(n, w) {
            // nonzero values 1..q-1 per support position, lexicographic
            let mut values = vec![1u8; w];
            loop {
                let mut pat = vec![0u8; n];
                for (slot, &pos) in support.iter().enumerate() {
                    pat[pos] = values[slot];
                }
                out.push(pat);
                if !next_values(&mut values, field.q as u8) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn next_values(values: &mut [u8], q: u8) -> bool {
    for i in (0..values.len()).rev() {
        if values[i] + 1 < q {
            values[i] += 1;
            for v in values[i + 1..].iter_mut() {
                *v = 1;
            }
            return true;
        }
    }
    false
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut comb: Vec<usize> = (0..k).collect();
    loop {
        out.push(comb.clone());
        if !next_combination(&mut comb, n) {
            break;
        }
    }
    out
}

/// Advances a k-combination of `0..n` in lexicographic order.
pub fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    if k == 0 {
        return false;
    }
    for i in (0..k).rev() {
        if comb[i] < n - (k - i) {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn prime_power_decompose(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut rest = q;
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            return if rest == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((q, 1)) // q itself is prime
}

// --- polynomial arithmetic over F_p, elements encoded base-p ---

fn decode_poly(code: u64, p: u64, k: u32) -> Vec<u64> {
    let mut c = code;
    let mut coeffs = vec![0u64; k as usize];
    for slot in coeffs.iter_mut() {
        *slot = c % p;
        c /= p;
    }
    coeffs
}

fn encode_poly(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn poly_add(a: u64, b: u64, p: u64, k: u32) -> u8 {
    let ca = decode_poly(a, p, k);
    let cb = decode_poly(b, p, k);
    let sum: Vec<u64> = ca.iter().zip(&cb).map(|(&x, &y)| (x + y) % p).collect();
    encode_poly(&sum, p) as u8
}

fn poly_mul(a: u64, b: u64, p: u64, k: u32, irreducible: &[u8]) -> u8 {
    let ca = decode_poly(a, p, k);
    let cb = decode_poly(b, p, k);
    let mut prod = vec![0u64; 2 * k as usize];
    for (i, &x) in ca.iter().enumerate() {
        for (j, &y) in cb.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // reduce modulo the monic irreducible of degree k
    for deg in (k as usize..prod.len()).rev() {
        let lead = prod[deg];
        if lead == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &c) in irreducible.iter().enumerate().take(k as usize) {
            let idx = deg - k as usize + i;
            prod[idx] = (prod[idx] + p * p - lead * c as u64 % p) % p;
        }
    }
    encode_poly(&prod[..k as usize], p) as u8
}

/// Lexicographically smallest monic irreducible polynomial of degree `k`
/// over `F_p`, as coefficients `c_0..c_k` with `c_k = 1`. Polynomials are
/// compared by their non-leading coefficient tuple read as a base-`p`
/// number `Σ c_i p^i`.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u8> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = p.pow(k);
    for low in 0..count {
        let mut coeffs: Vec<u8> = decode_poly(low, p, k).iter().map(|&c| c as u8).collect();
        coeffs.push(1);
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

/// Trial division by all monic polynomials of degree 1..=deg/2.
fn is_irreducible(coeffs: &[u8], p: u64) -> bool {
    let deg = coeffs.len() - 1;
    if coeffs[0] == 0 {
        return false; // divisible by x
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut div: Vec<u64> = decode_poly(low, p, d as u32);
            div.push(1);
            if poly_divides(&div, coeffs, p) {
                return false;
            }
        }
    }
    true
}

fn poly_divides(div: &[u64], target: &[u8], p: u64) -> bool {
    let mut rem: Vec<u64> = target.iter().map(|&c| c as u64).collect();
    let dd = div.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - dd;
            for (i, &c) in div.iter().enumerate() {
                let idx = shift + i;
                rem[idx] = (rem[idx] + p * p - lead * c % p) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}
