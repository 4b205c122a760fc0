//! Exact arithmetic in Z[ζ_m], stored in the power basis 1, ζ, …, ζ^{φ(m)-1}.

use serde::{Deserialize, Serialize};

use crate::ffield::{gcd, units};

/// Integer coefficients of the m-th cyclotomic polynomial, lowest first.
pub fn cyclotomic_poly(m: u64) -> Vec<i128> {
    // X^m - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i128; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn div_exact(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![0i128; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db] / b[db];
        q[i] = c;
        for j in 0..=db {
            r[i + j] -= c * b[j];
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycloInt {
    m: u64,
    c: Vec<i128>,
}

impl CycloInt {
    pub fn zero(m: u64) -> Self {
        let n = units(m).len();
        Self { m, c: vec![0; n] }
    }

    pub fn from_int(m: u64, x: i128) -> Self {
        let mut z = Self::zero(m);
        z.c[0] = x;
        z
    }

    /// ζ^e.
    pub fn zeta_pow(m: u64, e: u64) -> Self {
        let mut v = vec![0i128; m as usize];
        v[(e % m) as usize] = 1;
        Self::from_dense(m, &v)
    }

    /// Σ_e counts[e] ζ^e for a vector indexed by exponents mod m.
    pub fn from_dense(m: u64, counts: &[i128]) -> Self {
        let phi = cyclotomic_poly(m);
        let n = phi.len() - 1;
        let mut r: Vec<i128> = vec![0; (m as usize).max(counts.len())];
        for (e, &x) in counts.iter().enumerate() {
            r[e % m as usize] += x;
        }
        for i in (n..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            for j in 0..=n {
                r[i - n + j] -= c * phi[j];
            }
        }
        r.truncate(n);
        Self { m, c: r }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.c
    }

    pub fn from_coeffs(m: u64, c: Vec<i128>) -> Self {
        assert_eq!(c.len(), units(m).len());
        Self { m, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// Some(x) when the element is the rational integer x.
    pub fn as_integer(&self) -> Option<i128> {
        if self.c[1..].iter().all(|&x| x == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { m: self.m, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { m: self.m, c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { m: self.m, c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: i128) -> Self {
        Self { m: self.m, c: self.c.iter().map(|a| a.checked_mul(k).expect("cyclotomic coefficient overflow")).collect() }
    }

    /// Exact division by a rational integer; None if not divisible.
    pub fn div_int(&self, k: i128) -> Option<Self> {
        if self.c.iter().any(|a| a % k != 0) {
            return None;
        }
        Some(Self { m: self.m, c: self.c.iter().map(|a| a / k).collect() })
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len();
        let mut prod = vec![0i128; 2 * n - 1];
        for i in 0..n {
            if self.c[i] == 0 {
                continue;
            }
            for j in 0..n {
                let t = self.c[i].checked_mul(o.c[j]).expect("cyclotomic coefficient overflow");
                prod[i + j] = prod[i + j].checked_add(t).expect("cyclotomic coefficient overflow");
            }
        }
        Self::from_dense(self.m, &prod)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::from_int(self.m, 1);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Image under the automorphism ζ ↦ ζ^u.
    pub fn galois(&self, u: u64) -> Self {
        assert_eq!(gcd(u % self.m, self.m), 1);
        let mut v = vec![0i128; self.m as usize];
        for (i, &x) in self.c.iter().enumerate() {
            v[(i as u64 * u % self.m) as usize] += x;
        }
        Self::from_dense(self.m, &v)
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(self.m - 1)
    }

    pub fn norm(&self) -> i128 {
        let mut acc = Self::from_int(self.m, 1);
        for u in units(self.m) {
            acc = acc.mul(&self.galois(u));
        }
        acc.as_integer().expect("norm is rational")
    }

    /// Exact quotient self / o in Z[ζ_m]; None if o = 0 or o does not divide.
    pub fn div_exact(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        let mut cofactor = Self::from_int(self.m, 1);
        for u in units(self.m).into_iter().skip(1) {
            cofactor = cofactor.mul(&o.galois(u));
        }
        let n = o.mul(&cofactor).as_integer().expect("norm is rational");
        self.mul(&cofactor).div_int(n)
    }

    /// Complex value under ζ ↦ exp(2πi·u/m).
    pub fn embed(&self, u: u64) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &x) in self.c.iter().enumerate() {
            let ang = 2.0 * std::f64::consts::PI * ((i as u64 * u) % self.m) as f64 / self.m as f64;
            re += x as f64 * ang.cos();
            im += x as f64 * ang.sin();
        }
        (re, im)
    }

    pub fn abs_max(&self) -> f64 {
        units(self.m)
            .into_iter()
            .map(|u| {
                let (a, b) = self.embed(u);
                (a * a + b * b).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Fixed by ζ ↦ ζ^u for every u in the given subgroup.
    pub fn is_fixed_by(&self, group: &[u64]) -> bool {
        group.iter().all(|&u| &self.galois(u) == self)
    }
}

impl std::fmt::Display for CycloInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, &x) in self.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let sign = if x < 0 { "-" } else if first { "" } else { "+" };
            let a = x.unsigned_abs();
            let sep = if first { "" } else { " " };
            let body = match (i, a) {
                (0, _) => format!("{a}"),
                (1, 1) => "z".to_string(),
                (1, _) => format!("{a}*z"),
                (_, 1) => format!("z^{i}"),
                _ => format!("{a}*z^{i}"),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, "{sep}{sign} {body}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn sum_of_roots_of_unity() {
        let all: Vec<i128> = vec![1; 5];
        assert!(CycloInt::from_dense(5, &all).is_zero());
        let z = CycloInt::zeta_pow(5, 1);
        assert_eq!(z.pow(5), CycloInt::from_int(5, 1));
        assert_eq!(z.norm(), 1);
        assert_eq!(CycloInt::from_int(5, 1).sub(&z).norm(), 5);
    }

    #[test]
    fn gauss_sum_norm() {
        // g = Σ_x (x/5) ζ^x has g^2 = 5
        let g = CycloInt::from_dense(5, &[0, 1, -1, -1, 1]);
        assert_eq!(g.mul(&g), CycloInt::from_int(5, 5));
    }

    fn arb(m: u64) -> impl Strategy<Value = CycloInt> {
        let n = units(m).len();
        proptest::collection::vec(-50i128..50, n).prop_map(move |c| CycloInt::from_coeffs(m, c))
    }

    proptest! {
        #[test]
        fn galois_is_ring_hom(a in arb(12), b in arb(12), ui in 0usize..4) {
            let u = units(12)[ui];
            prop_assert_eq!(a.mul(&b).galois(u), a.galois(u).mul(&b.galois(u)));
            prop_assert_eq!(a.add(&b).galois(u), a.galois(u).add(&b.galois(u)));
        }

        #[test]
        fn exact_division_roundtrip(a in arb(5), b in arb(5)) {
            prop_assume!(!b.is_zero());
            let ab = a.mul(&b);
            prop_assert_eq!(ab.div_exact(&b), Some(a));
        }

        #[test]
        fn norm_is_multiplicative(a in arb(7), b in arb(7)) {
            prop_assert_eq!(a.mul(&b).norm(), a.norm() * b.norm());
        }
    }
}
