//! Valuations of elements of Z[ζ_m] at the prime above p fixed by the
//! conventional residue root, via the unramified ring (Z/p^prec)[X]/(g̃).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::counting::EigenspaceCharPoly;
use crate::cyclotomic::{cyclotomic_poly, CycloInt};
use crate::error::{Error, Result};
use crate::ffield::{cyclotomic_factor, gcd, is_prime, mult_order, prime_factors};
use crate::newton::{polygon_from_valuations, NewtonPolygon, Val};

/// v_p of a nonzero element, or a lower bound when it vanishes mod p^prec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PadicVal {
    Exact(u32),
    AtLeast(u32),
}

#[derive(Clone, Debug)]
pub struct UnramifiedContext {
    p: u64,
    m: u64,
    f: usize,
    prec: u32,
    pk: BigInt,
    /// monic lift of the residue modulus, lowest first, length f + 1
    modulus: Vec<BigInt>,
    omega: Vec<BigInt>,
    /// ω^i for i < φ(m)
    omega_pows: Vec<Vec<BigInt>>,
}

impl UnramifiedContext {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }
    pub fn omega(&self) -> &[BigInt] {
        &self.omega
    }

    fn reduce(&self, a: &mut [BigInt]) {
        for c in a.iter_mut() {
            *c = c.mod_floor(&self.pk);
        }
    }

    fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let f = self.f;
        let mut prod = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for i in (f..prod.len()).rev() {
            let c = std::mem::take(&mut prod[i]);
            if c.is_zero() {
                continue;
            }
            for (j, gj) in self.modulus.iter().take(f).enumerate() {
                prod[i - f + j] -= &c * gj;
            }
        }
        prod.truncate(f);
        self.reduce(&mut prod);
        prod
    }

    fn pow(&self, a: &[BigInt], mut e: BigInt) -> Vec<BigInt> {
        let mut r = self.one();
        let mut b = a.to_vec();
        let two = BigInt::from(2);
        while e.is_positive() {
            if e.is_odd() {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e /= &two;
        }
        r
    }

    fn one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.f];
        v[0] = BigInt::one();
        v
    }

    /// Image of x under ζ ↦ ω.
    pub fn evaluate(&self, x: &CycloInt) -> Vec<BigInt> {
        assert_eq!(x.m(), self.m);
        let mut acc = vec![BigInt::zero(); self.f];
        for (c, w) in x.coeffs().iter().zip(&self.omega_pows) {
            if *c == 0 {
                continue;
            }
            let c = BigInt::from(*c);
            for (a, wi) in acc.iter_mut().zip(w) {
                *a += &c * wi;
            }
        }
        self.reduce(&mut acc);
        acc
    }

    pub fn valuation(&self, x: &CycloInt) -> PadicVal {
        let v = self.evaluate(x);
        let p = BigInt::from(self.p);
        let mut best = self.prec;
        for c in v {
            if c.is_zero() {
                continue;
            }
            let mut c = c;
            let mut k = 0;
            while (&c % &p).is_zero() {
                c /= &p;
                k += 1;
            }
            best = best.min(k);
        }
        if best >= self.prec {
            PadicVal::AtLeast(self.prec)
        } else {
            PadicVal::Exact(best)
        }
    }
}

pub fn default_prec(genus: u64, f: u64) -> u32 {
    (genus * f + 4) as u32
}

/// The unramified context of degree f = ord_m(p) with ω the Teichmüller lift
/// of a root of the conventional factor g of Φ_m mod p.
pub fn build_context(p: u64, f: usize, m: u64, prec: u32) -> Result<UnramifiedContext> {
    if !is_prime(p) || gcd(p, m) != 1 || m < 2 {
        return Err(Error::BadPrime(format!("p = {p} is not an unramified prime for m = {m}")));
    }
    if prec == 0 {
        return Err(Error::Precision("precision must be positive".into()));
    }
    if mult_order(p % m, m) as usize != f {
        return Err(Error::InvalidInput(format!("no primitive {m}-th root of unity in the residue field of degree {f}")));
    }
    let pk = BigInt::from(p).pow(prec);
    let g = cyclotomic_factor(p, m);
    let modulus: Vec<BigInt> = g.iter().map(|&c| BigInt::from(c)).collect();
    let mut ctx = UnramifiedContext {
        p,
        m,
        f,
        prec,
        pk,
        modulus,
        omega: Vec::new(),
        omega_pows: Vec::new(),
    };
    // X is a root of g; ω ← ω^{p^f} converges to its Teichmüller lift
    let mut omega = vec![BigInt::zero(); f];
    if f == 1 {
        omega[0] = (-BigInt::from(g[0])).mod_floor(&ctx.pk);
    } else {
        omega[1] = BigInt::one();
    }
    let q = BigInt::from(p).pow(f as u32);
    for _ in 0..prec {
        omega = ctx.pow(&omega, q.clone());
    }
    if ctx.pow(&omega, BigInt::from(m)) != ctx.one() {
        return Err(Error::Precision("Teichmüller iteration did not converge".into()));
    }
    for l in prime_factors(m) {
        let w = ctx.pow(&omega, BigInt::from(m / l));
        let diff: Vec<BigInt> = w.iter().zip(ctx.one()).map(|(a, b)| (a - b).mod_floor(&BigInt::from(p))).collect();
        if diff.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("ω does not have exact order m".into()));
        }
    }
    let n = cyclotomic_poly(m).len() - 1;
    let mut pows = Vec::with_capacity(n);
    let mut cur = ctx.one();
    for _ in 0..n {
        pows.push(cur.clone());
        cur = ctx.mul(&cur, &omega);
    }
    ctx.omega = omega;
    ctx.omega_pows = pows;
    Ok(ctx)
}

/// The Newton polygon of φ on V_T from det(1 - φ^f T | V_T): slopes are
/// valuations over f, multiplicities times f.
pub fn piece_polygon(ctx: &UnramifiedContext, cp: &EigenspaceCharPoly) -> Result<NewtonPolygon> {
    let mut pts = Vec::new();
    for (i, e) in cp.e.iter().enumerate() {
        let Some(e) = e else {
            return Err(Error::Budget(format!("coefficient {i} of the piece is undetermined")));
        };
        if e.is_zero() {
            continue;
        }
        let v = match ctx.valuation(e) {
            PadicVal::Exact(v) => Val::Known(v as i64),
            PadicVal::AtLeast(v) => Val::AtLeast(v as i64),
        };
        pts.push((i as u64, v));
    }
    let hull = polygon_from_valuations(&pts, cp.f)?;
    Ok(NewtonPolygon::new(hull.slopes().iter().map(|&(s, k)| (s, k * cp.f))))
}

/// Retries with doubled precision up to three times.
pub fn piece_polygon_adaptive(p: u64, m: u64, prec: u32, cp: &EigenspaceCharPoly) -> Result<NewtonPolygon> {
    let f = mult_order(p % m, m) as usize;
    let mut prec = prec;
    let mut last = None;
    for _ in 0..4 {
        let ctx = build_context(p, f, m, prec)?;
        match piece_polygon(&ctx, cp) {
            Err(Error::Precision(e)) => {
                last = Some(e);
                prec *= 2;
            }
            other => return other,
        }
    }
    Err(Error::Precision(last.unwrap_or_default()))
}

/// v(e_1)/f, an upper bound for the smallest slope of the piece.
pub fn first_coefficient_slope(ctx: &UnramifiedContext, cp: &EigenspaceCharPoly) -> Option<Rational64> {
    let e1 = cp.e.get(1)?.as_ref()?;
    match ctx.valuation(e1) {
        PadicVal::Exact(v) => Some(Rational64::new(v as i64, cp.f as i64)),
        PadicVal::AtLeast(_) => None,
    }
}
