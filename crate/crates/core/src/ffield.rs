//! Finite fields F_p and F_{p^k}, power-residue counts and multiplicative
//! characters whose values are recorded as exponents of a primitive m-th root
//! of unity.

use crate::error::{Error, Result};

/// Largest extension degree supported by the fixed-width element type.
pub const MAX_DEGREE: usize = 16;

/// Fields with more elements than this never get a full discrete-log table.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 26;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, n);
        }
        b = mul_mod(b, b, n);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (n as i128, (a % n) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(n as i128) as u64)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order of a modulo n (gcd(a, n) = 1).
pub fn mult_order(a: u64, n: u64) -> u64 {
    let a = a % n;
    let mut x = a;
    let mut k = 1;
    while x != 1 % n {
        x = mul_mod(x, a, n);
        k += 1;
    }
    k
}

/// Units of Z/m in increasing order.
pub fn units(m: u64) -> Vec<u64> {
    (1..m).filter(|&k| gcd(k, m) == 1).collect()
}

pub fn euler_phi(m: u64) -> u64 {
    units(m).len() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// Dense polynomials over F_p, lowest degree first. Only what the modulus
/// search and the cyclotomic factor search need.
pub mod poly {
    use super::{inv_mod, mul_mod};

    pub fn trim(a: &mut Vec<u64>) {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        if a.is_empty() {
            a.push(0);
        }
    }

    pub fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p).expect("nonzero leading coefficient");
        while r.len() > db && !is_zero(&r) {
            let dr = r.len() - 1;
            let c = mul_mod(r[dr], lead_inv, p);
            for j in 0..=db {
                let t = mul_mod(c, b[j], p);
                r[dr - db + j] = (r[dr - db + j] + p - t) % p;
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !is_zero(&y) {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        // normalise to monic
        let inv = inv_mod(*x.last().unwrap(), p).unwrap_or(1);
        x.iter().map(|&c| mul_mod(c, inv, p)).collect()
    }

    pub fn powmod(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut b = rem(base, modulus, p);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(&mul(&result, &b, p), modulus, p);
            }
            b = rem(&mul(&b, &b, p), modulus, p);
            e >>= 1;
        }
        result
    }

    /// Rabin-style test: gcd(X^{p^i} - X, f) = 1 for every i <= deg/2.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        if k == 0 {
            return false;
        }
        if k == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        let mut xp = x.clone();
        for _ in 1..=k / 2 {
            xp = powmod(&xp, p, f, p);
            let g = gcd(&sub(&xp, &x, p), f, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

/// Fixed-width coefficient vector of an element of F_{p^k}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fe(pub [u32; MAX_DEGREE]);

impl Fe {
    pub const ZERO: Fe = Fe([0; MAX_DEGREE]);
}

#[derive(Clone, Debug)]
pub struct ExtField {
    p: u64,
    k: usize,
    /// monic, lowest coefficient first, length k + 1
    modulus: Vec<u64>,
    q: u64,
}

/// Least monic irreducible of degree k over F_p, where coefficient vectors are
/// compared with the top coefficient most significant.
pub fn least_irreducible(p: u64, k: usize) -> Vec<u64> {
    let total = p.pow(k as u32);
    for n in 0..total {
        let mut f: Vec<u64> = Vec::with_capacity(k + 1);
        let mut t = n;
        for _ in 0..k {
            f.push(t % p);
            t /= p;
        }
        f.push(1);
        if k > 1 && f[0] == 0 {
            continue;
        }
        if poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub fn build_ext_field(p: u64, k: usize) -> Result<ExtField> {
    ExtField::new(p, k)
}

impl ExtField {
    pub fn new(p: u64, k: usize) -> Result<Self> {
        PrimeField::new(p)?;
        if k == 0 || k > MAX_DEGREE {
            return Err(Error::Budget(format!("extension degree {k} outside 1..={MAX_DEGREE}")));
        }
        let q = (p as u128).pow(k as u32);
        if q > (1u128 << 62) {
            return Err(Error::Budget(format!("field of size {p}^{k} too large")));
        }
        let modulus = least_irreducible(p, k);
        Ok(Self { p, k, modulus, q: q as u64 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> usize {
        self.k
    }
    pub fn size(&self) -> u64 {
        self.q
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u64) -> Fe {
        let mut e = Fe::ZERO;
        e.0[0] = (c % self.p) as u32;
        e
    }

    /// The class of X (the generator of the power basis).
    pub fn x(&self) -> Fe {
        if self.k == 1 {
            // X = -modulus[0]
            return self.scalar((self.p - self.modulus[0]) % self.p);
        }
        let mut e = Fe::ZERO;
        e.0[1] = 1;
        e
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Fe {
        let mut e = Fe::ZERO;
        for (i, &x) in c.iter().take(self.k).enumerate() {
            e.0[i] = (x % self.p) as u32;
        }
        e
    }

    pub fn coeffs(&self, a: &Fe) -> Vec<u64> {
        a.0[..self.k].iter().map(|&c| c as u64).collect()
    }

    pub fn from_index(&self, mut n: u64) -> Fe {
        let mut e = Fe::ZERO;
        for i in 0..self.k {
            e.0[i] = (n % self.p) as u32;
            n /= self.p;
        }
        e
    }

    pub fn index(&self, a: &Fe) -> u64 {
        let mut n = 0u64;
        for i in (0..self.k).rev() {
            n = n * self.p + a.0[i] as u64;
        }
        n
    }

    pub fn is_zero(&self, a: &Fe) -> bool {
        a.0[..self.k].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &Fe, b: &Fe) -> Fe {
        let mut e = Fe::ZERO;
        let p = self.p as u32;
        for i in 0..self.k {
            let s = a.0[i] + b.0[i];
            e.0[i] = if s >= p { s - p } else { s };
        }
        e
    }

    pub fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        let mut e = Fe::ZERO;
        let p = self.p as u32;
        for i in 0..self.k {
            e.0[i] = if a.0[i] >= b.0[i] { a.0[i] - b.0[i] } else { a.0[i] + p - b.0[i] };
        }
        e
    }

    pub fn neg(&self, a: &Fe) -> Fe {
        self.sub(&Fe::ZERO, a)
    }

    pub fn scale(&self, a: &Fe, c: u64) -> Fe {
        let mut e = Fe::ZERO;
        for i in 0..self.k {
            e.0[i] = mul_mod(a.0[i] as u64, c, self.p) as u32;
        }
        e
    }

    pub fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        let k = self.k;
        let p = self.p;
        if k == 1 {
            let mut e = Fe::ZERO;
            e.0[0] = (a.0[0] as u64 * b.0[0] as u64 % p) as u32;
            return e;
        }
        let mut t = [0u64; 2 * MAX_DEGREE];
        for i in 0..k {
            let x = a.0[i] as u64;
            if x == 0 {
                continue;
            }
            for j in 0..k {
                t[i + j] = (t[i + j] + x * b.0[j] as u64) % p;
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c = t[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                let s = c * self.modulus[j] % p;
                t[i - k + j] = (t[i - k + j] + p - s) % p;
            }
        }
        let mut e = Fe::ZERO;
        for i in 0..k {
            e.0[i] = t[i] as u32;
        }
        e
    }

    pub fn square(&self, a: &Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &Fe, mut e: u64) -> Fe {
        let mut r = self.one();
        let mut b = *a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: &Fe) -> Option<Fe> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.q - 2))
    }

    /// Norm to the subfield with p^s elements (s | k).
    pub fn norm_to(&self, a: &Fe, s: usize) -> Fe {
        assert!(self.k % s == 0);
        let qs = self.p.pow(s as u32);
        self.pow(a, (self.q - 1) / (qs - 1))
    }

    pub fn multiplicative_order(&self, a: &Fe) -> u64 {
        let n = self.q - 1;
        let mut ord = n;
        for l in prime_factors(n) {
            while ord % l == 0 && self.pow(a, ord / l) == self.one() {
                ord /= l;
            }
        }
        ord
    }

    /// Least element (by index) generating the multiplicative group.
    pub fn generator(&self) -> Fe {
        let n = self.q - 1;
        let factors = prime_factors(n);
        let one = self.one();
        for idx in 1..self.q {
            let g = self.from_index(idx);
            if factors.iter().all(|&l| self.pow(&g, n / l) != one) {
                return g;
            }
        }
        unreachable!("finite fields have cyclic unit groups")
    }

    /// Evaluate a polynomial with F_p coefficients at an element.
    pub fn eval_fp_poly(&self, f: &[u64], x: &Fe) -> Fe {
        let mut acc = Fe::ZERO;
        for &c in f.iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.scalar(c));
        }
        acc
    }

    /// A root in this field of the conventional factor of Φ_order mod p.
    /// Requires order | q - 1.
    pub fn convention_root(&self, order: u64) -> Result<Fe> {
        if (self.q - 1) % order != 0 {
            return Err(Error::InvalidInput(format!(
                "no primitive {order}-th roots of unity in a field with {} elements",
                self.q
            )));
        }
        if order == 1 {
            return Ok(self.one());
        }
        let g = cyclotomic_factor(self.p, order);
        let r = self.pow(&self.generator(), (self.q - 1) / order);
        for u in units(order) {
            let c = self.pow(&r, u);
            if self.is_zero(&self.eval_fp_poly(&g, &c)) {
                return Ok(c);
            }
        }
        unreachable!("the factor splits in any field containing the m-th roots of unity")
    }
}

/// The least (in the modulus order) monic irreducible factor of the m-th
/// cyclotomic polynomial over F_p. Its degree is the order of p mod m.
pub fn cyclotomic_factor(p: u64, m: u64) -> Vec<u64> {
    assert!(m >= 2 && gcd(p, m) == 1);
    let f = mult_order(p, m) as usize;
    let field = ExtField::new(p, f).expect("small cyclotomic field");
    let r = field.pow(&field.generator(), (field.size() - 1) / m);
    let mut best: Option<Vec<u64>> = None;
    for u in units(m) {
        // minimal polynomial of r^u: product over its Frobenius orbit
        let root = field.pow(&r, u);
        let mut poly: Vec<Fe> = vec![field.one()];
        let mut conj = root;
        for _ in 0..f {
            let mut next = vec![Fe::ZERO; poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = field.add(&next[i + 1], c);
                next[i] = field.sub(&next[i], &field.mul(c, &conj));
            }
            poly = next;
            conj = field.pow(&conj, p);
        }
        let coeffs: Vec<u64> = poly.iter().map(|c| c.0[0] as u64).collect();
        let key: Vec<u64> = coeffs.iter().rev().copied().collect();
        let better = match &best {
            None => true,
            Some(b) => key < b.iter().rev().copied().collect::<Vec<_>>(),
        };
        if better {
            best = Some(coeffs);
        }
    }
    best.unwrap()
}

/// #{y : y^m = c}.
pub fn count_mth_roots(field: &ExtField, c: &Fe, m: u64) -> u64 {
    if field.is_zero(c) {
        return 1;
    }
    let q = field.size();
    let delta = gcd(m, q - 1);
    if field.pow(c, (q - 1) / delta) == field.one() {
        delta
    } else {
        0
    }
}

/// Multiplicative character data for one field and one order m.
///
/// The exponent map e: F* -> Z/m is defined by t^{(q-1)/δ} = ρ^{e_δ(t)} with
/// δ = gcd(m, q-1), ρ the conventional primitive δ-th root, and
/// e(t) = (m/δ)·e_δ(t). Then χ_j(t) = ζ_m^{j·e(t)}.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    field: ExtField,
    m: u64,
    delta: u64,
    generator: Fe,
    unit_exponent: u64,
    /// ρ^i for i < δ, by index
    root_powers: Vec<u64>,
    dlog: Option<Vec<u32>>,
}

impl CharacterTable {
    pub fn new(field: ExtField, m: u64) -> Result<Self> {
        Self::with_cap(field, m, DEFAULT_TABLE_CAP)
    }

    pub fn with_cap(field: ExtField, m: u64, cap: u64) -> Result<Self> {
        let q = field.size();
        let delta = gcd(m, q - 1);
        let generator = field.generator();
        let rho = field.convention_root(delta)?;
        let mut root_powers = Vec::with_capacity(delta as usize);
        let mut cur = field.one();
        for _ in 0..delta {
            root_powers.push(field.index(&cur));
            cur = field.mul(&cur, &rho);
        }
        let gpow = field.index(&field.pow(&generator, (q - 1) / delta));
        let u0 = root_powers.iter().position(|&x| x == gpow).unwrap() as u64;
        let unit_exponent = (m / delta) * u0 % m;
        let dlog = if q <= cap && q <= u32::MAX as u64 {
            let mut table = vec![0u32; q as usize];
            let mut cur = field.one();
            for d in 0..q - 1 {
                table[field.index(&cur) as usize] = d as u32;
                cur = field.mul(&cur, &generator);
            }
            Some(table)
        } else {
            None
        };
        Ok(Self { field, m, delta, generator, unit_exponent, root_powers, dlog })
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }
    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn generator(&self) -> Fe {
        self.generator
    }
    pub fn unit_exponent(&self) -> u64 {
        self.unit_exponent
    }
    pub fn has_table(&self) -> bool {
        self.dlog.is_some()
    }

    pub fn dlog(&self, t: &Fe) -> Option<u64> {
        if self.field.is_zero(t) {
            return None;
        }
        match &self.dlog {
            Some(tab) => Some(tab[self.field.index(t) as usize] as u64),
            None => None,
        }
    }

    /// e(t) in Z/m.
    pub fn exponent(&self, t: &Fe) -> Result<u64> {
        if self.field.is_zero(t) {
            return Err(Error::InvalidInput("character exponent of zero".into()));
        }
        if let Some(d) = self.dlog(t) {
            return Ok(d % self.m * self.unit_exponent % self.m);
        }
        let q = self.field.size();
        let v = self.field.index(&self.field.pow(t, (q - 1) / self.delta));
        let i = self.root_powers.iter().position(|&x| x == v).expect("power lands in μ_δ") as u64;
        Ok((self.m / self.delta) * i % self.m)
    }

    /// Exponent of χ_j(t), i.e. j·e(t) mod m.
    pub fn character_exponent(&self, t: &Fe, j: u64) -> Result<u64> {
        Ok(self.exponent(t)? * (j % self.m) % self.m)
    }

    /// e(t) for every element index (index 0 maps to 0); needs the table.
    pub fn exponent_table(&self) -> Option<Vec<u8>> {
        let tab = self.dlog.as_ref()?;
        let m = self.m;
        let u = self.unit_exponent;
        Some(tab.iter().map(|&d| ((d as u64 % m) * u % m) as u8).collect())
    }
}

pub fn character_exponent(table: &CharacterTable, t: &Fe, j: u64) -> Result<u64> {
    table.character_exponent(t, j)
}
