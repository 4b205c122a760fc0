//! Exact test that every reciprocal root of an L-polynomial has |α| = √q.
//!
//! P(x) = x^{2g} L(1/x) = x^g R(x + q/x); the roots of P lie on the circle
//! iff R has only real roots, all in [-2√q, 2√q]. Sturm sequences of the
//! squarefree part of R count those roots, with signs at ±2√q decided in Z[√q].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Poly = Vec<BigRational>;

fn trim(a: &mut Poly) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

fn deriv(a: &Poly) -> Poly {
    let mut d: Poly = a.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from(BigInt::from(i))).collect();
    trim(&mut d);
    d
}

fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &c * bc;
        }
        q[shift] = c;
        r.pop();
        trim(&mut r);
    }
    (q, r)
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    x
}

/// Sign of P(s·2√q), s = ±1, for P with rational coefficients.
fn sign_at(a: &Poly, q: &BigInt, s: i32) -> i32 {
    // clear denominators with a positive multiplier
    let l = a.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let four_q = BigInt::from(4) * q;
    let (mut e, mut f) = (BigInt::zero(), BigInt::zero());
    for (i, c) in a.iter().enumerate() {
        let c = (c * BigRational::from(l.clone())).to_integer();
        let c = if s < 0 && i % 2 == 1 { -c } else { c };
        let k = (i / 2) as u32;
        if i % 2 == 0 {
            e += c * four_q.pow(k);
        } else {
            f += c * BigInt::from(2) * four_q.pow(k);
        }
    }
    // value = e + f√q
    let se = e.signum();
    let sf = f.signum();
    if sf.is_zero() {
        return sign_of(&se);
    }
    if se.is_zero() || se == sf {
        return sign_of(&sf);
    }
    let cmp = (&e * &e).cmp(&(&f * &f * q));
    match cmp {
        std::cmp::Ordering::Greater => sign_of(&se),
        std::cmp::Ordering::Less => sign_of(&sf),
        std::cmp::Ordering::Equal => 0,
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn variations(seq: &[Poly], q: &BigInt, s: i32) -> usize {
    let signs: Vec<i32> = seq.iter().map(|p| sign_at(p, q, s)).filter(|&x| x != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// R with P(x) = x^g R(x + q/x), from L's coefficients.
fn real_polynomial(l: &[BigInt], q: &BigInt) -> Poly {
    let g = (l.len() - 1) / 2;
    // x^g·L(1/x)/x^g... coefficient of x^{g-i} in P(x)/x^g is l_i
    // P/x^g = l_g + Σ_{k≥1} l_{g-k} (x^k + q^k x^{-k}) = l_g + Σ l_{g-k} D_k(y)
    let mut d_prev: Vec<BigInt> = vec![BigInt::from(2)];
    let mut d_cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    let mut r = vec![BigInt::zero(); g + 1];
    r[0] += &l[g];
    for k in 1..=g {
        for (i, c) in d_cur.iter().enumerate() {
            r[i] += &l[g - k] * c;
        }
        // D_{k+1} = y D_k - q D_{k-1}
        let mut next = vec![BigInt::zero(); d_cur.len() + 1];
        for (i, c) in d_cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in d_prev.iter().enumerate() {
            next[i] -= q * c;
        }
        d_prev = d_cur;
        d_cur = next;
    }
    r.into_iter().map(BigRational::from).collect()
}

pub(super) fn roots_on_circle(l: &[BigInt], q: u64) -> bool {
    let qb = BigInt::from(q);
    if l.len() == 1 {
        return true;
    }
    let mut r = real_polynomial(l, &qb);
    trim(&mut r);
    let deg = r.len() - 1;
    let g = gcd(&r, &deriv(&r));
    let (mut s, _) = divrem(&r, &g);
    trim(&mut s);
    let distinct = s.len() - 1;
    // remove the conjugate pair ±2√q when present
    let mut extra = 0;
    let quad: Poly = vec![BigRational::from(-BigInt::from(4) * &qb), BigRational::zero(), BigRational::one()];
    if s.len() >= 3 {
        let (quo, rem) = divrem(&s, &quad);
        if rem.is_empty() {
            s = quo;
            extra = 2;
        }
    }
    if s.len() == 1 {
        return extra == distinct && deg >= distinct;
    }
    let mut seq = vec![s.clone(), deriv(&s)];
    loop {
        let n = seq.len();
        let (_, r) = divrem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let inside = variations(&seq, &qb, -1) as i64 - variations(&seq, &qb, 1) as i64;
    inside + extra as i64 == distinct as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn weil_polynomials() {
        assert!(roots_on_circle(&big(&[1, 2, 5]), 5));
        assert!(roots_on_circle(&big(&[1, 0, 5]), 5));
        // (1 - 5T²)², reciprocal roots ±√5 twice
        assert!(roots_on_circle(&big(&[1, 0, -10, 0, 25]), 5));
        // 1 + 5T + 5T² has real roots of the wrong size
        assert!(!roots_on_circle(&big(&[1, 5, 5]), 5));
        // (1 + 5T²)² repeated roots
        assert!(roots_on_circle(&big(&[1, 0, 10, 0, 25]), 5));
        // (1 - 2T + 5T²)(1 + 4T + 5T²)
        assert!(roots_on_circle(&big(&[1, 2, 2, 10, 25]), 5));
        assert!(!roots_on_circle(&big(&[1, 7, 2, 35, 25]), 5));
    }
}
