//! Histograms of e(f(x)) over F_Q for f(x) = Π (x - b_i)^{a_i}, with b_i in F_p.
//!
//! Three layouts, chosen from (p, K, m):
//! - `Table`: a full exponent table of F_Q (odd K, small fields).
//! - `Norm`: F_Q = B[θ]/(θ² - c) with m | |B| - 1; e_Q(t) = e_B(N(t)).
//! - `Projective`: F_Q = B[θ]/(θ² - c) with m | |B| + 1; χ is trivial on B*,
//!   so e(a + bθ) = E[a/b] with E[z] = e(z + θ).
//!
//! Each enumerates F_Q as lines of p consecutive elements differing in the
//! lowest digit, so x - b_i is a cyclic shift within a line.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ffield::{gcd, prime_factors, units, CharacterTable, ExtField, Fe};

const ZERO_MARK: u8 = u8::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Table,
    Norm,
    Projective,
}

#[derive(Clone, Debug)]
struct Quad {
    base: ExtField,
    c: Fe,
}

impl Quad {
    fn mul(&self, x: &(Fe, Fe), y: &(Fe, Fe)) -> (Fe, Fe) {
        let b = &self.base;
        let ac = b.mul(&x.0, &y.0);
        let bd = b.mul(&x.1, &y.1);
        let ad = b.mul(&x.0, &y.1);
        let bc = b.mul(&x.1, &y.0);
        (b.add(&ac, &b.mul(&bd, &self.c)), b.add(&ad, &bc))
    }

    fn pow(&self, x: &(Fe, Fe), mut e: u64) -> (Fe, Fe) {
        let mut r = (self.base.one(), Fe::ZERO);
        let mut b = *x;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    fn one(&self) -> (Fe, Fe) {
        (self.base.one(), Fe::ZERO)
    }

    fn eval_fp_poly(&self, f: &[u64], x: &(Fe, Fe)) -> (Fe, Fe) {
        let b = &self.base;
        let mut acc = (Fe::ZERO, Fe::ZERO);
        for &c in f.iter().rev() {
            let t = self.mul(&acc, x);
            acc = (b.add(&t.0, &b.scalar(c)), t.1);
        }
        acc
    }
}

fn least_nonsquare(b: &ExtField) -> Fe {
    let e = (b.size() - 1) / 2;
    for i in 1..b.size() {
        let x = b.from_index(i);
        if b.pow(&x, e) != b.one() {
            return x;
        }
    }
    unreachable!("odd fields have nonsquares")
}

/// Exponent table of a whole field, ZERO_MARK at index 0.
fn full_exponent_table(field: &ExtField, m: u64) -> Result<Vec<u8>> {
    let ct = CharacterTable::with_cap(field.clone(), m, 0)?;
    let q = field.size();
    let g = ct.generator();
    let u0 = ct.unit_exponent();
    let mut tab = vec![ZERO_MARK; q as usize];
    let mut cur = field.one();
    let mut e = 0u64;
    for _ in 0..q - 1 {
        tab[field.index(&cur) as usize] = e as u8;
        cur = field.mul(&cur, &g);
        e = (e + u0) % m;
    }
    Ok(tab)
}

#[derive(Clone, Debug)]
pub struct CharKernel {
    p: u64,
    k_total: usize,
    m: u64,
    mode: Mode,
    /// Table: exponents of F_Q; Norm: exponents of B; Projective: E[z]
    table: Vec<u8>,
    base: Option<ExtField>,
    c: Fe,
}

impl CharKernel {
    /// Requires m | p^K - 1 and m < 255.
    pub fn new(p: u64, k_total: usize, m: u64, table_cap: u64) -> Result<Self> {
        let q = (p as u128).pow(k_total as u32);
        if q > u64::MAX as u128 || (q as u64 - 1) % m != 0 {
            return Err(Error::InvalidInput(format!("no character of order {m} on F_{p}^{k_total}")));
        }
        if m >= ZERO_MARK as u64 {
            return Err(Error::InvalidInput("character order too large".into()));
        }
        if k_total % 2 == 0 {
            let s = k_total / 2;
            let bs = p.pow(s as u32);
            if (bs - 1) % m == 0 || (bs + 1) % m == 0 {
                let base = ExtField::new(p, s)?;
                let c = least_nonsquare(&base);
                if (bs - 1) % m == 0 {
                    let table = full_exponent_table(&base, m)?;
                    return Ok(Self { p, k_total, m, mode: Mode::Norm, table, base: Some(base), c });
                }
                let quad = Quad { base: base.clone(), c };
                let table = projective_table(&quad, p, m, q as u64)?;
                return Ok(Self { p, k_total, m, mode: Mode::Projective, table, base: Some(base), c });
            }
        }
        if q as u64 > table_cap {
            return Err(Error::Budget(format!("exponent table for F_{p}^{k_total} exceeds the memory cap")));
        }
        let field = ExtField::new(p, k_total)?;
        let table = full_exponent_table(&field, m)?;
        Ok(Self { p, k_total, m, mode: Mode::Table, table, base: None, c: Fe::ZERO })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn field_size(&self) -> u64 {
        self.p.pow(self.k_total as u32)
    }

    /// e(c) for a nonzero c ∈ F_p ⊂ F_Q.
    pub fn scalar_exponent(&self, c: u64) -> u64 {
        let c = c % self.p;
        assert!(c != 0);
        match self.mode {
            // the index of a constant is the constant itself
            Mode::Table => self.table[c as usize] as u64,
            Mode::Norm => 2 * self.table[c as usize] as u64 % self.m,
            Mode::Projective => 0,
        }
    }

    /// counts[e] = #{x ∈ F_Q, x ≠ b_i : e(f(x)) = e}.
    pub fn histogram(&self, points: &[u64], exps: &[u64]) -> Vec<u64> {
        let p = self.p as usize;
        let m = self.m as usize;
        let exps: Vec<u32> = exps.iter().map(|&a| (a % self.m) as u32).collect();
        let pts: Vec<usize> = points.iter().map(|&b| (b % self.p) as usize).collect();
        let max_acc = exps.iter().map(|&a| a as usize * (m - 1)).sum::<usize>() + 1;
        let modtab: Vec<u8> = (0..max_acc).map(|x| (x % m) as u8).collect();
        let ctx = LineCtx { p, m, exps: &exps, modtab: &modtab };
        match self.mode {
            Mode::Table => self.hist_table(&ctx, &pts),
            Mode::Norm => self.hist_norm(&ctx, &pts),
            Mode::Projective => self.hist_projective(&ctx, &pts),
        }
    }

    fn hist_table(&self, ctx: &LineCtx, pts: &[usize]) -> Vec<u64> {
        let p = ctx.p;
        let lines = self.table.len() / p;
        let shifts: Vec<usize> = pts.to_vec();
        let mut h = (1..lines)
            .into_par_iter()
            .fold(
                || (vec![0u64; ctx.m], vec![0u32; p]),
                |(mut h, mut acc), u| {
                    let row = &self.table[u * p..(u + 1) * p];
                    let rows: Vec<&[u8]> = vec![row; shifts.len()];
                    ctx.line(&rows, &shifts, &mut acc, &mut h);
                    (h, acc)
                },
            )
            .map(|(h, _)| h)
            .reduce(|| vec![0u64; ctx.m], add_hist);
        let row = &self.table[0..p];
        let rows: Vec<&[u8]> = vec![row; shifts.len()];
        ctx.line_checked(&rows, &shifts, &mut h);
        h
    }

    fn hist_norm(&self, ctx: &LineCtx, pts: &[usize]) -> Vec<u64> {
        let base = self.base.as_ref().unwrap();
        let p = ctx.p;
        let bsize = base.size() as usize;
        let sub = bsize / p;
        let shifts: Vec<usize> = pts.to_vec();
        let build = |b_idx: usize| -> Vec<u8> {
            let b = base.from_index(b_idx as u64);
            let d = base.mul(&self.c, &base.square(&b));
            (0..bsize)
                .map(|z| {
                    let z = base.from_index(z as u64);
                    let v = base.sub(&base.square(&z), &d);
                    self.table[base.index(&v) as usize]
                })
                .collect()
        };
        let mut h = (1..bsize)
            .into_par_iter()
            .fold(
                || (vec![0u64; ctx.m], vec![0u32; p]),
                |(mut h, mut acc), b_idx| {
                    let tab = build(b_idx);
                    for u in 0..sub {
                        let row = &tab[u * p..(u + 1) * p];
                        let rows: Vec<&[u8]> = vec![row; shifts.len()];
                        ctx.line(&rows, &shifts, &mut acc, &mut h);
                    }
                    (h, acc)
                },
            )
            .map(|(h, _)| h)
            .reduce(|| vec![0u64; ctx.m], add_hist);
        // b = 0: x = a ∈ B, N(x - b_i) = (a - b_i)²
        let tab = build(0);
        let mut acc = vec![0u32; p];
        for u in 1..sub {
            let row = &tab[u * p..(u + 1) * p];
            let rows: Vec<&[u8]> = vec![row; shifts.len()];
            ctx.line(&rows, &shifts, &mut acc, &mut h);
        }
        let rows: Vec<&[u8]> = vec![&tab[0..p]; shifts.len()];
        ctx.line_checked(&rows, &shifts, &mut h);
        h
    }

    fn hist_projective(&self, ctx: &LineCtx, pts: &[usize]) -> Vec<u64> {
        let base = self.base.as_ref().unwrap();
        let p = ctx.p;
        let bsize = base.size() as usize;
        let s = base.degree();
        let sub = bsize / p;
        let mut h = (1..bsize)
            .into_par_iter()
            .fold(
                || (vec![0u64; ctx.m], vec![0u32; p]),
                |(mut h, mut acc), b_idx| {
                    let b = base.from_index(b_idx as u64);
                    let binv = base.inv(&b).unwrap();
                    let ws: Vec<Vec<usize>> = pts
                        .iter()
                        .map(|&bi| base.coeffs(&base.scale(&binv, bi as u64)).into_iter().map(|c| c as usize).collect())
                        .collect();
                    let shifts: Vec<usize> = ws.iter().map(|w| w[0]).collect();
                    for u in 0..sub {
                        let rows: Vec<&[u8]> = ws
                            .iter()
                            .map(|w| {
                                let r = sub_upper_digits(u, &w[1..s], p);
                                &self.table[r * p..(r + 1) * p]
                            })
                            .collect();
                        ctx.line(&rows, &shifts, &mut acc, &mut h);
                    }
                    (h, acc)
                },
            )
            .map(|(h, _)| h)
            .reduce(|| vec![0u64; ctx.m], add_hist);
        // b = 0: χ trivial on B*
        h[0] += (bsize - pts.len()) as u64;
        h
    }
}

fn add_hist(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Index of (upper digits of u) - w, digitwise mod p.
fn sub_upper_digits(mut u: usize, w: &[usize], p: usize) -> usize {
    let mut r = 0;
    let mut scale = 1;
    for &wd in w {
        let d = u % p;
        u /= p;
        r += ((d + p - wd) % p) * scale;
        scale *= p;
    }
    r
}

fn projective_table(quad: &Quad, p: u64, m: u64, q: u64) -> Result<Vec<u8>> {
    let base = &quad.base;
    let g = crate::ffield::cyclotomic_factor(p, m);
    let e = (q - 1) / m;
    // an element of exact order m, then the conventional root among its powers
    let mut root = None;
    'search: for k in 0..base.size() {
        let t = (base.from_index(k), base.one());
        let r = quad.pow(&t, e);
        if prime_factors(m).iter().any(|&l| quad.pow(&r, m / l) == quad.one()) {
            continue;
        }
        for u in units(m) {
            let c = quad.pow(&r, u);
            let v = quad.eval_fp_poly(&g, &c);
            if base.is_zero(&v.0) && base.is_zero(&v.1) {
                root = Some(c);
                break 'search;
            }
        }
    }
    let root = root.ok_or_else(|| Error::InvalidInput("no conventional root of unity".into()))?;
    let mut powers = Vec::with_capacity(m as usize);
    let mut cur = quad.one();
    for _ in 0..m {
        powers.push(cur);
        cur = quad.mul(&cur, &root);
    }
    let bsize = base.size();
    let table: Vec<u8> = (0..bsize)
        .into_par_iter()
        .map(|z| {
            let t = (base.from_index(z), base.one());
            let v = quad.pow(&t, e);
            powers.iter().position(|x| *x == v).expect("power lies in μ_m") as u8
        })
        .collect();
    debug_assert_eq!(gcd(m, q - 1), m);
    Ok(table)
}

struct LineCtx<'a> {
    p: usize,
    m: usize,
    exps: &'a [u32],
    modtab: &'a [u8],
}

impl LineCtx<'_> {
    /// acc[z] = Σ_i a_i·rows_i[z - s_i] for z in 0..p, then bin by acc mod m.
    #[inline]
    fn line(&self, rows: &[&[u8]], shifts: &[usize], acc: &mut [u32], h: &mut [u64]) {
        let p = self.p;
        acc.iter_mut().for_each(|x| *x = 0);
        for ((row, &s), &a) in rows.iter().zip(shifts).zip(self.exps) {
            let (lo, hi) = acc.split_at_mut(s);
            for (x, &r) in lo.iter_mut().zip(&row[p - s..]) {
                *x += a * r as u32;
            }
            for (x, &r) in hi.iter_mut().zip(&row[..p - s]) {
                *x += a * r as u32;
            }
        }
        for &x in acc.iter() {
            h[self.modtab[x as usize] as usize] += 1;
        }
    }

    /// Same as `line` but skips positions where some factor vanishes.
    fn line_checked(&self, rows: &[&[u8]], shifts: &[usize], h: &mut [u64]) {
        let p = self.p;
        'z: for z in 0..p {
            let mut acc = 0u32;
            for ((row, &s), &a) in rows.iter().zip(shifts).zip(self.exps) {
                let v = row[(z + p - s) % p];
                if v == ZERO_MARK {
                    continue 'z;
                }
                acc += a * v as u32;
            }
            h[self.modtab[acc as usize] as usize] += 1;
        }
    }
}
