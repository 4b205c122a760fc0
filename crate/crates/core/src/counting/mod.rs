//! Point counts and Frobenius characteristic polynomials of y^m = Π (x - b_i)^{a_i}.
//!
//! Two routes to the L-polynomial: naive enumeration of F_{p^k}-points for
//! k ≤ g, and eigenspace decomposition under the μ_m action, where the trace of
//! Frobenius on the χ^j-part is a character sum over F_{p^k}.

pub mod kernel;
mod weil;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cm::MonodromyDatum;
use crate::cyclotomic::CycloInt;
use crate::error::{Error, Result};
use crate::ffield::{count_mth_roots, gcd, is_prime, mult_order, pow_mod, ExtField, Fe, DEFAULT_TABLE_CAP};
use kernel::CharKernel;

/// Largest field size enumerated by default.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

/// A cover y^m = Π (x - b_i)^{a_i} over F_p with branch exponent `a_inf` at ∞.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInstance {
    pub m: u64,
    pub p: u64,
    /// finite branch points, reduced mod p
    pub points: Vec<u64>,
    pub exps: Vec<u64>,
    /// 0 when ∞ is not a branch point
    pub a_inf: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Finite(usize),
    Infinity,
}

impl CurveInstance {
    pub fn new(m: u64, points: &[i64], exps: &[u64], p: u64) -> Result<Self> {
        if points.len() != exps.len() || points.is_empty() {
            return Err(Error::InvalidInput("one exponent per finite branch point".into()));
        }
        if !is_prime(p) || p == 2 {
            return Err(Error::BadPrime(format!("{p} is not an odd prime")));
        }
        if m % p == 0 {
            return Err(Error::BadPrime(format!("p = {p} divides m = {m}")));
        }
        let exps: Vec<u64> = exps.iter().map(|&a| a % m).collect();
        if exps.iter().any(|&a| a == 0) {
            return Err(Error::InvalidInput("finite exponents must be nonzero mod m".into()));
        }
        let pts: Vec<u64> = points.iter().map(|&b| b.rem_euclid(p as i64) as u64).collect();
        for i in 0..pts.len() {
            for j in 0..i {
                if pts[i] == pts[j] {
                    return Err(Error::BadPrime(format!(
                        "branch points {} and {} collide mod {p}",
                        points[j], points[i]
                    )));
                }
            }
        }
        let s: u64 = exps.iter().sum();
        let a_inf = (m - s % m) % m;
        if exps.iter().fold(gcd(a_inf, m), |g, &a| gcd(g, a)) != 1 {
            return Err(Error::InvalidInput("exponents share a factor with m; the cover is not connected".into()));
        }
        Ok(Self { m, p, points: pts, exps, a_inf })
    }

    /// The last entry of the datum is the exponent at ∞.
    pub fn from_datum(datum: &MonodromyDatum, finite_points: &[i64], p: u64) -> Result<Self> {
        let n = datum.a.len() - 1;
        if finite_points.len() != n {
            return Err(Error::InvalidInput(format!("expected {n} finite branch points")));
        }
        Self::new(datum.m, finite_points, &datum.a[..n], p)
    }

    pub fn genus(&self) -> u64 {
        let s: u64 = self.all_exps().map(|a| self.m - gcd(a, self.m)).sum();
        (s + 2 - 2 * self.m) / 2
    }

    fn all_exps(&self) -> impl Iterator<Item = u64> + '_ {
        self.exps.iter().copied().chain(std::iter::once(self.a_inf))
    }

    /// dim of the χ^j-part of H^1, j ≠ 0 mod m.
    pub fn eigen_dim(&self, j: u64) -> u64 {
        let c = self.all_exps().filter(|&a| j * a % self.m != 0).count() as u64;
        c.saturating_sub(2)
    }

    /// Π_{j≠i} (b_i - b_j)^{a_j} ∈ F_p, or 1 at ∞.
    fn branch_constant(&self, b: Branch) -> u64 {
        match b {
            Branch::Infinity => 1,
            Branch::Finite(i) => {
                let p = self.p;
                let mut u = 1u64;
                for (j, (&bj, &aj)) in self.points.iter().zip(&self.exps).enumerate() {
                    if j != i {
                        u = u * pow_mod((self.points[i] + p - bj) % p, aj, p) % p;
                    }
                }
                u
            }
        }
    }

    fn branch_exp(&self, b: Branch) -> u64 {
        match b {
            Branch::Infinity => self.a_inf,
            Branch::Finite(i) => self.exps[i],
        }
    }

    fn branches(&self) -> Vec<Branch> {
        (0..self.points.len()).map(Branch::Finite).chain(std::iter::once(Branch::Infinity)).collect()
    }
}

fn field_size(p: u64, k: usize) -> Option<u64> {
    let q = (p as u128).checked_pow(k as u32)?;
    (q <= u64::MAX as u128).then_some(q as u64)
}

fn check_budget(p: u64, k: usize, budget: u64) -> Result<u64> {
    match field_size(p, k) {
        Some(q) if q <= budget => Ok(q),
        _ => Err(Error::Budget(format!("F_{p}^{k} exceeds the work budget {budget}"))),
    }
}

/// Points over F_{p^k} with x finite and not a branch point.
pub fn count_affine_smooth(curve: &CurveInstance, k: usize, budget: u64) -> Result<u64> {
    check_budget(curve.p, k, budget)?;
    let field = ExtField::new(curve.p, k)?;
    let pts: Vec<Fe> = curve.points.iter().map(|&b| field.scalar(b)).collect();
    let count = (0..field.size())
        .into_par_iter()
        .map(|i| {
            let x = field.from_index(i);
            let mut v = field.one();
            for (b, &a) in pts.iter().zip(&curve.exps) {
                let d = field.sub(&x, b);
                if field.is_zero(&d) {
                    return 0;
                }
                v = field.mul(&v, &field.pow(&d, a));
            }
            count_mth_roots(&field, &v, curve.m)
        })
        .sum();
    Ok(count)
}

/// Points of the smooth model over a branch point: #{s : s^δ = u_b},
/// δ = gcd(m, a_b).
pub fn count_fiber_above_branch(curve: &CurveInstance, b: Branch, k: usize) -> Result<u64> {
    let field = ExtField::new(curve.p, k)?;
    let delta = gcd(curve.m, curve.branch_exp(b));
    let u = field.scalar(curve.branch_constant(b));
    Ok(count_mth_roots(&field, &u, delta))
}

pub fn count_projective(curve: &CurveInstance, k: usize, budget: u64) -> Result<u64> {
    let mut n = count_affine_smooth(curve, k, budget)?;
    for b in curve.branches() {
        n += count_fiber_above_branch(curve, b, k)?;
    }
    Ok(n)
}

/// L(T) = Σ c_i T^i with c_0 = 1, of degree 2g.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolynomial {
    pub p: u64,
    pub coeffs: Vec<BigInt>,
}

impl LPolynomial {
    pub fn genus(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn satisfies_functional_equation(&self) -> bool {
        let g = self.genus();
        let q = BigInt::from(self.p);
        (0..=2 * g).all(|i| {
            let e = g as i64 - i as i64;
            if e >= 0 {
                self.coeffs[2 * g - i] == &self.coeffs[i] * q.pow(e as u32)
            } else {
                &self.coeffs[2 * g - i] * q.pow((-e) as u32) == self.coeffs[i]
            }
        })
    }

    /// |Jac(F_p)|.
    pub fn value_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Functional equation, L(1) > 0 and every reciprocal root of absolute
    /// value √p, the last decided exactly by Sturm sequences.
    pub fn check_weil(&self) -> Result<()> {
        if self.coeffs.first() != Some(&BigInt::one()) {
            return Err(Error::InvalidInput("L(0) ≠ 1".into()));
        }
        if !self.satisfies_functional_equation() {
            return Err(Error::InvalidInput("functional equation fails".into()));
        }
        if !self.value_at_one().is_positive() {
            return Err(Error::InvalidInput("L(1) ≤ 0".into()));
        }
        if !weil::roots_on_circle(&self.coeffs, self.p) {
            return Err(Error::InvalidInput("a root lies off the circle |α| = √p".into()));
        }
        Ok(())
    }

    pub fn to_string_poly(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { " - " } else if out.is_empty() { "" } else { " + " };
            let a = c.abs();
            let body = match i {
                0 => a.to_string(),
                1 if a.is_one() => "T".into(),
                1 => format!("{a}T"),
                _ if a.is_one() => format!("T^{i}"),
                _ => format!("{a}T^{i}"),
            };
            out.push_str(if out.is_empty() && c.is_negative() { "-" } else { sign });
            out.push_str(&body);
        }
        out
    }
}

/// e_k from power sums t_1..t_K via k e_k = Σ (-1)^{i-1} e_{k-i} t_i.
fn elementary_from_power_sums_big(t: &[BigInt]) -> Vec<BigInt> {
    let mut e = vec![BigInt::one()];
    for k in 1..=t.len() {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &t[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        assert!((&acc % k).is_zero(), "Newton identity left a remainder");
        e.push(acc / k);
    }
    e
}

fn elementary_from_power_sums(t: &[CycloInt], m: u64) -> Result<Vec<CycloInt>> {
    let mut e = vec![CycloInt::from_int(m, 1)];
    for k in 1..=t.len() {
        let mut acc = CycloInt::zero(m);
        for i in 1..=k {
            let term = e[k - i].mul(&t[i - 1]);
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        let ek = acc
            .div_int(k as i128)
            .ok_or_else(|| Error::InvalidInput("power sums are not those of algebraic integers".into()))?;
        e.push(ek);
    }
    Ok(e)
}

/// L-polynomial from N_1..N_g by enumeration.
pub fn lpolynomial_naive(curve: &CurveInstance, budget: u64) -> Result<LPolynomial> {
    let g = curve.genus() as usize;
    check_budget(curve.p, g, budget)?;
    let p = BigInt::from(curve.p);
    let mut t = Vec::with_capacity(g);
    for k in 1..=g {
        let n = count_projective(curve, k, budget)?;
        t.push(p.pow(k as u32) + 1 - BigInt::from(n));
    }
    let e = elementary_from_power_sums_big(&t);
    let mut coeffs = vec![BigInt::zero(); 2 * g + 1];
    for i in 0..=g {
        let c = if i % 2 == 0 { e[i].clone() } else { -e[i].clone() };
        coeffs[2 * g - i] = &c * p.pow((g - i) as u32);
        coeffs[i] = c;
    }
    Ok(LPolynomial { p: curve.p, coeffs })
}

/// Character sums over the finite fields F_{p^K}, memoized by (K, order).
pub struct CharSums<'a> {
    curve: &'a CurveInstance,
    budget: u64,
    table_cap: u64,
    cache: HashMap<(usize, u64), (CharKernel, Vec<u64>)>,
}

impl<'a> CharSums<'a> {
    pub fn new(curve: &'a CurveInstance, budget: u64) -> Self {
        Self { curve, budget, table_cap: DEFAULT_TABLE_CAP, cache: HashMap::new() }
    }

    pub fn curve(&self) -> &CurveInstance {
        self.curve
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Whether F_{p^k} lies within the budget.
    pub fn affordable(&self, k: usize) -> bool {
        matches!(field_size(self.curve.p, k), Some(q) if q <= self.budget)
    }

    fn kernel(&mut self, k: usize, order: u64) -> Result<&(CharKernel, Vec<u64>)> {
        check_budget(self.curve.p, k, self.budget)?;
        if !self.cache.contains_key(&(k, order)) {
            let kern = CharKernel::new(self.curve.p, k, order, self.table_cap)?;
            let h = kern.histogram(&self.curve.points, &self.curve.exps);
            self.cache.insert((k, order), (kern, h));
        }
        Ok(&self.cache[&(k, order)])
    }

    /// tr(Frob_{p^k} | V_j) ∈ Z[ζ_m]; needs the order of χ^j to divide p^k - 1.
    pub fn char_power_sum(&mut self, j: u64, k: usize) -> Result<CycloInt> {
        let c = self.curve.clone();
        let m = c.m;
        let j = j % m;
        assert!(j != 0);
        let order = m / gcd(j, m);
        let q = check_budget(c.p, k, self.budget)?;
        if (q - 1) % order != 0 {
            return Err(Error::InvalidInput(format!("χ^{j} is not defined over F_{}^{k}", c.p)));
        }
        let (kern, hist) = self.kernel(k, order)?;
        let mut dense = vec![0i128; m as usize];
        for (e, &n) in hist.iter().enumerate() {
            dense[(j * e as u64 % m) as usize] += n as i128;
        }
        for b in c.branches() {
            if j * c.branch_exp(b) % m == 0 {
                let e = match b {
                    Branch::Infinity => 0,
                    Branch::Finite(_) => kern.scalar_exponent(c.branch_constant(b)),
                };
                dense[(j * e % m) as usize] += 1;
            }
        }
        Ok(CycloInt::from_dense(m, &dense).neg())
    }

    /// Projective point count over F_{p^k} assembled from character sums.
    pub fn count_projective(&mut self, k: usize) -> Result<u64> {
        let c = self.curve.clone();
        let q = check_budget(c.p, k, self.budget)?;
        let mut total = CycloInt::zero(c.m);
        for j in 1..c.m {
            let order = c.m / gcd(j, c.m);
            if (q - 1) % order == 0 {
                total = total.add(&self.char_power_sum(j, k)?);
            }
        }
        let t = total.as_integer().ok_or_else(|| Error::InvalidInput("trace is not rational".into()))?;
        Ok((q as i128 + 1 - t) as u64)
    }
}

/// det(1 - φ^f T | V_j) = Σ (-1)^i e_i T^i, with f the length of the orbit
/// of j under multiplication by p. Coefficients not yet determined are None.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenspaceCharPoly {
    pub m: u64,
    pub p: u64,
    pub j: u64,
    pub f: u64,
    pub n: u64,
    pub self_dual: bool,
    /// t_k = tr(φ^{fk} | V_j), k = 1..
    pub power_sums: Vec<CycloInt>,
    pub e: Vec<Option<CycloInt>>,
}

impl EigenspaceCharPoly {
    pub fn q(&self) -> i128 {
        (self.p as i128).pow(self.f as u32)
    }

    pub fn is_complete(&self) -> bool {
        self.e.iter().all(Option::is_some)
    }

    /// Coefficients of det(1 - φ^f T) in T, when complete.
    pub fn coeffs(&self) -> Option<Vec<CycloInt>> {
        self.e
            .iter()
            .enumerate()
            .map(|(i, e)| e.as_ref().map(|x| if i % 2 == 0 { x.clone() } else { x.neg() }))
            .collect()
    }

    /// e_n·conj(e_n) = q^n.
    pub fn check_determinant(&self) -> bool {
        match self.e.last() {
            Some(Some(en)) => {
                let lhs = en.mul(&en.conj());
                lhs.as_integer() == Some(self.q().pow(self.n as u32))
            }
            _ => false,
        }
    }
}

/// Number of power sums computed before duality completes the polynomial.
fn power_sums_needed(n: u64, self_dual: bool) -> u64 {
    if self_dual {
        n / 2
    } else {
        n.div_ceil(2)
    }
}

/// Characteristic polynomial of φ^f on V_j. With `partial` set, running out
/// of budget yields the coefficients determined so far instead of an error.
pub fn eigen_charpoly(sums: &mut CharSums, j: u64, partial: bool) -> Result<EigenspaceCharPoly> {
    let c = sums.curve().clone();
    let m = c.m;
    let order = m / gcd(j, m);
    let f = mult_order(c.p % order, order);
    let n = c.eigen_dim(j);
    let self_dual = (0..f).any(|i| (order - 1) == pow_mod(c.p, i, order));
    let q = (c.p as i128).checked_pow(f as u32).ok_or_else(|| Error::Budget("residue field too large".into()))?;
    let mut out = EigenspaceCharPoly {
        m,
        p: c.p,
        j,
        f,
        n,
        self_dual,
        power_sums: Vec::new(),
        e: vec![None; n as usize + 1],
    };
    out.e[0] = Some(CycloInt::from_int(m, 1));
    if n == 0 {
        return Ok(out);
    }
    let want = power_sums_needed(n, self_dual);
    loop {
        let have = out.power_sums.len() as u64;
        let known = elementary_from_power_sums(&out.power_sums, m)?;
        for (i, e) in known.into_iter().enumerate() {
            out.e[i] = Some(e);
        }
        if have >= want && complete_by_duality(&mut out, q)? {
            return Ok(out);
        }
        if have >= n {
            return Ok(out);
        }
        let k = ((have + 1) * f) as usize;
        if !sums.affordable(k) {
            if partial {
                complete_by_duality(&mut out, q)?;
                return Ok(out);
            }
            return Err(Error::Budget(format!("power sum {} for χ^{j} needs F_{}^{k}", have + 1, c.p)));
        }
        let t = sums.char_power_sum(j, k)?;
        out.power_sums.push(t);
    }
}

/// Fill e_n and then e_{n-i} = e_n·conj(e_i)/q^i. Returns whether every
/// coefficient is known afterwards.
fn complete_by_duality(cp: &mut EigenspaceCharPoly, q: i128) -> Result<bool> {
    let n = cp.n as usize;
    let m = cp.m;
    if cp.e[n].is_none() {
        if cp.self_dual {
            // the +√q eigenspace carries an alternating form, so it has even
            // dimension and det = (-1)^n q^{n/2}
            let mut v = q.checked_pow(n as u32 / 2).expect("determinant fits");
            if n % 2 == 1 {
                v *= isqrt(q);
            }
            cp.e[n] = Some(CycloInt::from_int(m, sign_pow(n) * v));
        } else {
            for i in 0..=n {
                if let (Some(ei), Some(eni)) = (&cp.e[i], &cp.e[n - i]) {
                    if !ei.is_zero() {
                        let num = eni.scale(q.pow(i as u32));
                        let en = num
                            .div_exact(&ei.conj())
                            .ok_or_else(|| Error::InvalidInput("determinant is not integral".into()))?;
                        cp.e[n] = Some(en);
                        break;
                    }
                }
            }
        }
    }
    let Some(en) = cp.e[n].clone() else { return Ok(false) };
    for i in 0..=n {
        if cp.e[n - i].is_none() {
            if let Some(ei) = cp.e[i].clone() {
                let val = en
                    .mul(&ei.conj())
                    .div_int(q.pow(i as u32))
                    .ok_or_else(|| Error::InvalidInput("dual coefficient is not integral".into()))?;
                cp.e[n - i] = Some(val);
            }
        }
    }
    Ok(cp.is_complete())
}

fn sign_pow(n: usize) -> i128 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

fn isqrt(q: i128) -> i128 {
    let mut r = (q as f64).sqrt() as i128;
    while r * r > q {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= q {
        r += 1;
    }
    assert_eq!(r * r, q, "self-dual residue degree is even");
    r
}

/// Representatives of the orbits of nonzero j under multiplication by p.
pub fn frobenius_orbits(m: u64, p: u64) -> Vec<Vec<u64>> {
    let mut seen = vec![false; m as usize];
    let mut out = Vec::new();
    for j in 1..m {
        if seen[j as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = j;
        while !seen[x as usize] {
            seen[x as usize] = true;
            orbit.push(x);
            x = x * p % m;
        }
        out.push(orbit);
    }
    out
}

/// L(T) = Π over orbits O of det(1 - φ^{|O|} T^{|O|} | V_j), j ∈ O.
pub fn lpolynomial_via_characters(curve: &CurveInstance, budget: u64) -> Result<LPolynomial> {
    let mut sums = CharSums::new(curve, budget);
    let m = curve.m;
    let mut acc: Vec<CycloInt> = vec![CycloInt::from_int(m, 1)];
    for orbit in frobenius_orbits(m, curve.p) {
        let cp = eigen_charpoly(&mut sums, orbit[0], false)?;
        let coeffs = cp.coeffs().ok_or_else(|| Error::Budget("incomplete eigenspace polynomial".into()))?;
        let f = cp.f as usize;
        let mut next = vec![CycloInt::zero(m); acc.len() + (coeffs.len() - 1) * f];
        for (i, a) in acc.iter().enumerate() {
            for (k, c) in coeffs.iter().enumerate() {
                next[i + k * f] = next[i + k * f].add(&a.mul(c));
            }
        }
        acc = next;
    }
    let coeffs = acc
        .iter()
        .map(|c| c.as_integer().map(BigInt::from).ok_or_else(|| Error::InvalidInput("L-polynomial is not rational".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(LPolynomial { p: curve.p, coeffs })
}

/// |Jac(F_p)| as an i128 when it fits.
pub fn jacobian_order(l: &LPolynomial) -> Option<i128> {
    l.value_at_one().to_i128()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::family;

    fn brute_projective(curve: &CurveInstance, k: usize) -> u64 {
        // double loop over (x, y) plus the fibers over branch points
        let f = ExtField::new(curve.p, k).unwrap();
        let mut n = 0;
        for xi in 0..f.size() {
            let x = f.from_index(xi);
            let mut v = f.one();
            let mut branch = false;
            for (&b, &a) in curve.points.iter().zip(&curve.exps) {
                let d = f.sub(&x, &f.scalar(b));
                branch |= f.is_zero(&d);
                v = f.mul(&v, &f.pow(&d, a));
            }
            if branch {
                continue;
            }
            for yi in 0..f.size() {
                if f.pow(&f.from_index(yi), curve.m) == v {
                    n += 1;
                }
            }
        }
        for b in curve.branches() {
            n += count_fiber_above_branch(curve, b, k).unwrap();
        }
        n
    }

    #[test]
    fn elliptic_curve_over_f5() {
        let c = CurveInstance::new(2, &[0, 1, -1], &[1, 1, 1], 5).unwrap();
        assert_eq!(c.genus(), 1);
        assert_eq!(count_projective(&c, 1, DEFAULT_BUDGET).unwrap(), 8);
        let l = lpolynomial_naive(&c, DEFAULT_BUDGET).unwrap();
        assert_eq!(l.coeffs, vec![BigInt::from(1), BigInt::from(2), BigInt::from(5)]);
        assert_eq!(lpolynomial_via_characters(&c, DEFAULT_BUDGET).unwrap(), l);
        l.check_weil().unwrap();
    }

    #[test]
    fn rational_curve_has_q_plus_one_points() {
        let c = CurveInstance::new(5, &[0], &[1], 7).unwrap();
        assert_eq!(c.genus(), 0);
        assert_eq!(count_affine_smooth(&c, 1, DEFAULT_BUDGET).unwrap(), 6);
        assert_eq!(count_projective(&c, 1, DEFAULT_BUDGET).unwrap(), 8);
    }

    #[test]
    fn counts_match_double_loop() {
        let c = CurveInstance::new(5, &[0, 1, 3], &[1, 1, 1], 11).unwrap();
        for k in 1..=2 {
            assert_eq!(count_projective(&c, k, DEFAULT_BUDGET).unwrap(), brute_projective(&c, k));
        }
        let d = CurveInstance::new(5, &[0, 1, 3], &[1, 3, 3], 7).unwrap();
        assert_eq!(count_projective(&d, 2, DEFAULT_BUDGET).unwrap(), brute_projective(&d, 2));
    }

    #[test]
    fn character_counts_match_naive() {
        let curves = [
            CurveInstance::new(5, &[0, 1, 3], &[1, 3, 3], 11).unwrap(),
            CurveInstance::new(5, &[0, 1, 3], &[1, 3, 3], 19).unwrap(),
            CurveInstance::new(6, &[0, 1, 3, 7], &[2, 2, 2, 3], 13).unwrap(),
            CurveInstance::new(4, &[0, 1, 3], &[1, 1, 2], 13).unwrap(),
            CurveInstance::new(3, &[0, 1, 3, 7, 12], &[1, 1, 1, 1, 1], 17).unwrap(),
        ];
        for c in &curves {
            let mut sums = CharSums::new(c, DEFAULT_BUDGET);
            for k in 1..=3 {
                assert_eq!(
                    sums.count_projective(k).unwrap(),
                    count_projective(c, k, DEFAULT_BUDGET).unwrap(),
                    "m = {} p = {} k = {k}",
                    c.m,
                    c.p
                );
            }
        }
    }

    #[test]
    fn m11_lpolynomial_both_routes() {
        let fam = family("M11").unwrap();
        let c = CurveInstance::from_datum(&fam.datum, &[0, 1, 3], 11).unwrap();
        assert_eq!(c.genus(), 4);
        let naive = lpolynomial_naive(&c, DEFAULT_BUDGET).unwrap();
        naive.check_weil().unwrap();
        assert_eq!(naive.coeffs.len(), 9);
        assert_eq!(lpolynomial_via_characters(&c, DEFAULT_BUDGET).unwrap(), naive);
    }

    #[test]
    fn duality_completion_matches_direct_power_sums() {
        // compute every power sum directly and compare with the duality fill
        for (m, pts, exps, p) in [
            (5u64, vec![0i64, 1, 3], vec![1u64, 3, 3], 11u64),
            (5, vec![0, 1, 3], vec![1, 3, 3], 19),
            (5, vec![0, 1, 3], vec![1, 3, 3], 7),
            (3, vec![0, 1, 3, 7, 12], vec![1, 1, 1, 1, 1], 13),
            (3, vec![0, 1, 2, 3, 4], vec![1, 1, 1, 1, 1], 5),
            (6, vec![0, 1, 3, 7], vec![2, 2, 2, 3], 13),
            (6, vec![0, 1, 3, 7], vec![2, 2, 2, 3], 11),
            (7, vec![0, 1, 3], vec![2, 4, 4], 13),
        ] {
            let c = CurveInstance::new(m, &pts, &exps, p).unwrap();
            let mut sums = CharSums::new(&c, DEFAULT_BUDGET);
            for j in 1..m {
                let cp = eigen_charpoly(&mut sums, j, false).unwrap();
                assert!(cp.is_complete());
                assert!(cp.check_determinant(), "m = {m} p = {p} j = {j}");
                let mut t = Vec::new();
                for k in 1..=cp.n {
                    t.push(sums.char_power_sum(j, (k * cp.f) as usize).unwrap());
                }
                let direct = elementary_from_power_sums(&t, m).unwrap();
                let filled: Vec<CycloInt> = cp.e.iter().map(|x| x.clone().unwrap()).collect();
                assert_eq!(direct, filled, "m = {m} p = {p} j = {j}");
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let c = CurveInstance::new(5, &[0, 1, 3], &[1, 3, 3], 19).unwrap();
        assert!(matches!(count_projective(&c, 2, 100), Err(Error::Budget(_))));
        let mut sums = CharSums::new(&c, 100);
        let cp = eigen_charpoly(&mut sums, 4, true).unwrap();
        assert!(!cp.is_complete() || cp.n == 0 || cp.f == 2);
    }

    #[test]
    fn colliding_branch_points_are_bad() {
        assert!(matches!(CurveInstance::new(5, &[0, 1, 12], &[1, 3, 3], 11), Err(Error::BadPrime(_))));
        assert!(matches!(CurveInstance::new(5, &[0, 1, 3], &[1, 3, 3], 5), Err(Error::BadPrime(_))));
    }

    #[test]
    fn disconnected_covers_are_rejected() {
        assert!(matches!(CurveInstance::new(4, &[0, 1], &[2, 2], 7), Err(Error::InvalidInput(_))));
        assert!(CurveInstance::new(4, &[0, 1], &[2, 1], 7).is_ok());
    }
}
