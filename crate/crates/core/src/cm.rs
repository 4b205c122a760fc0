//! Combinatorics of F = Q(ζ_m): signatures of cyclic covers, CM types,
//! the Galois-orbit rank criterion, and the splitting data of a prime.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{gcd, inv_mod, mult_order, units};

/// Sign in f(k) = -1 + Σ frac(ε·k·a_i/m). With ε = -1 and σ_k: ζ ↦ ζ^k the
/// M11 datum gives (f(1), f(2), f(3), f(4)) = (1, 2, 0, 1).
pub const EPSILON: i64 = -1;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonodromyDatum {
    pub m: u64,
    pub a: Vec<u64>,
}

impl MonodromyDatum {
    pub fn new(m: u64, a: Vec<u64>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("cover degree {m} < 2")));
        }
        if a.len() < 3 {
            return Err(Error::InvalidInput("need at least three branch points".into()));
        }
        let a: Vec<u64> = a.into_iter().map(|x| x % m).collect();
        if a.iter().any(|&x| x == 0) {
            return Err(Error::InvalidInput("inertia exponents must be nonzero mod m".into()));
        }
        if a.iter().sum::<u64>() % m != 0 {
            return Err(Error::InvalidInput("inertia exponents must sum to 0 mod m".into()));
        }
        if a.iter().fold(m, |g, &x| gcd(g, x)) != 1 {
            return Err(Error::InvalidInput("cover is disconnected (gcd(m, a) > 1)".into()));
        }
        Ok(Self { m, a })
    }

    pub fn n_points(&self) -> usize {
        self.a.len()
    }

    /// 2g - 2 = -2m + Σ (m - gcd(a_i, m)).
    pub fn genus_riemann_hurwitz(&self) -> u64 {
        let s: u64 = self.a.iter().map(|&x| self.m - gcd(x, self.m)).sum();
        (s + 2 - 2 * self.m) / 2
    }

    /// dim of the ζ^k-eigenspace of H^0(Ω), for any k ≠ 0 mod m.
    pub fn eigen_dim(&self, k: u64) -> i64 {
        let m = self.m as i64;
        let mut num = 0i64;
        for &x in &self.a {
            num += (EPSILON * (k as i64) * (x as i64)).rem_euclid(m);
        }
        num / m - 1
    }

    /// Signature of the part of the Jacobian on which Q(ζ_m) acts faithfully.
    pub fn signature(&self) -> Signature {
        self.signature_at_divisor(self.m)
    }

    /// Signature of the part where ζ_m acts through a primitive e-th root of
    /// unity (e | m), as a signature for Q(ζ_e).
    pub fn signature_at_divisor(&self, e: u64) -> Signature {
        assert!(self.m % e == 0);
        let s = self.m / e;
        let values = units(e).into_iter().map(|u| self.eigen_dim(u * s) as u64).collect();
        Signature { m: e, values }
    }

    /// Divisors e > 2 of m whose part has positive dimension.
    pub fn parts(&self) -> Vec<u64> {
        (3..=self.m).filter(|e| self.m % e == 0 && self.signature_at_divisor(*e).dim() > 0).collect()
    }

    /// Σ over all k ≠ 0 of the eigenspace dimensions, the genus of the curve.
    pub fn genus_from_signature(&self) -> u64 {
        (1..self.m).map(|k| self.eigen_dim(k)).sum::<i64>() as u64
    }
}

pub fn signature_of(datum: &MonodromyDatum) -> Signature {
    datum.signature()
}

/// f(k) for k ∈ (Z/m)^*, stored densely in the order of `units(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub m: u64,
    pub values: Vec<u64>,
}

impl Signature {
    pub fn new(m: u64, values: Vec<u64>) -> Result<Self> {
        let us = units(m);
        if values.len() != us.len() {
            return Err(Error::InvalidInput(format!("signature for m = {m} needs {} values", us.len())));
        }
        let s = Self { m, values };
        let n = s.f(1) + s.f(m - 1);
        if us.iter().any(|&k| s.f(k) + s.f(m - k) != n) {
            return Err(Error::InvalidInput("f(k) + f(-k) is not constant".into()));
        }
        Ok(s)
    }

    pub fn units(&self) -> Vec<u64> {
        units(self.m)
    }

    fn pos(&self, k: u64) -> usize {
        let k = k % self.m;
        self.units().iter().position(|&u| u == k).expect("index must be a unit")
    }

    pub fn f(&self, k: u64) -> u64 {
        self.values[self.pos(k)]
    }

    /// Relative dimension n = f(k) + f(-k).
    pub fn n(&self) -> u64 {
        self.f(1) + self.f(self.m - 1)
    }

    /// d = φ(m)/2.
    pub fn d(&self) -> u64 {
        self.values.len() as u64 / 2
    }

    /// Dimension of the abelian variety carrying this signature.
    pub fn dim(&self) -> u64 {
        self.values.iter().sum()
    }

    /// The same signature seen through the labeling k ↦ σ_{u·k}.
    pub fn relabel(&self, u: u64) -> Signature {
        assert_eq!(gcd(u, self.m), 1);
        let values = self.units().into_iter().map(|k| self.f(k * u % self.m)).collect();
        Signature { m: self.m, values }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleSignature {
    pub phi: Vec<u64>,
    pub sigma1: u64,
}

impl SimpleSignature {
    pub fn phi_star(&self, m: u64) -> Vec<u64> {
        let mut v: Vec<u64> = self.phi.iter().map(|&k| m - k).collect();
        v.sort();
        v
    }
}

/// Find Φ and σ_1 with f(σ_1) = 1 and f = 0 on Φ∖{σ_1}. The least admissible
/// σ_1 is taken; in pairs where both entries vanish the smaller index joins Φ.
pub fn simple_signature_check(sig: &Signature) -> Result<SimpleSignature> {
    let m = sig.m;
    let us = sig.units();
    'cand: for &s1 in &us {
        if sig.f(s1) != 1 {
            continue;
        }
        let mut phi = vec![s1];
        for &k in &us {
            if k > m - k || k == s1 || m - k == s1 {
                continue;
            }
            if sig.f(k) == 0 {
                phi.push(k);
            } else if sig.f(m - k) == 0 {
                phi.push(m - k);
            } else {
                continue 'cand;
            }
        }
        phi.sort();
        return Ok(SimpleSignature { phi, sigma1: s1 });
    }
    Err(Error::Scope("signature is not simple".into()))
}

fn translate(m: u64, values: &[(u64, i64)], tau: u64) -> Vec<i64> {
    // (τ·x)_k = x_{τ^{-1} k}
    let tinv = inv_mod(tau, m).unwrap();
    units(m)
        .into_iter()
        .map(|k| {
            let src = k * tinv % m;
            values.iter().find(|(u, _)| *u == src).unwrap().1
        })
        .collect()
}

fn rank_bigint(rows: Vec<Vec<BigInt>>) -> usize {
    let mut a = rows;
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, piv);
        for r in 0..a.len() {
            if r != rank && !a[r][col].is_zero() {
                let (x, y) = (a[rank][col].clone(), a[r][col].clone());
                for c in 0..ncols {
                    let v = &a[r][c] * &x - &a[rank][c] * &y;
                    a[r][c] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn det_rational(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else { return BigRational::zero() };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col].clone();
        for r in col + 1..n {
            let factor = &a[r][col] / &a[col][col];
            for c in col..n {
                let v = &a[col][c] * &factor;
                a[r][c] -= v;
            }
        }
    }
    det
}

/// Rank criterion for the span of the Galois translates of cf plus the
/// all-ones vector; `values` is indexed by `units(m)`.
pub fn check_assumption_c_values(m: u64, values: &[i64]) -> bool {
    let us = units(m);
    assert_eq!(values.len(), us.len());
    let pairs: Vec<(u64, i64)> = us.iter().copied().zip(values.iter().copied()).collect();
    let mut rows: Vec<Vec<BigInt>> = us
        .iter()
        .map(|&t| translate(m, &pairs, t).into_iter().map(BigInt::from).collect())
        .collect();
    rows.push(vec![BigInt::one(); us.len()]);
    rank_bigint(rows) == us.len() / 2 + 1
}

pub fn check_assumption_c(sig: &Signature) -> bool {
    let v: Vec<i64> = sig.values.iter().map(|&x| x as i64).collect();
    check_assumption_c_values(sig.m, &v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalDims {
    /// det B(n) as integer coefficients, lowest degree first
    pub det_poly: Vec<BigInt>,
    pub roots: Vec<u64>,
}

/// Simple signature with parameter n attached to (Φ, σ_1), evaluated on any
/// unit k (n may be 0 here, giving a formal value -1 at σ_1*).
fn simple_cf(m: u64, phi: &[u64], sigma1: u64, n: i64, k: u64) -> i64 {
    if k == sigma1 {
        1
    } else if phi.contains(&k) {
        0
    } else if m - k == sigma1 {
        n - 1
    } else {
        n
    }
}

fn det_b(m: u64, phi: &[u64], sigma1: u64, n: i64) -> BigRational {
    let rows: Vec<Vec<BigRational>> = phi
        .iter()
        .map(|&tau| {
            let tinv = inv_mod(tau, m).unwrap();
            phi.iter()
                .map(|&sigma| {
                    let v = 2 * simple_cf(m, phi, sigma1, n, sigma * tinv % m) - n;
                    BigRational::from_integer(BigInt::from(v))
                })
                .collect()
        })
        .collect();
    det_rational(rows)
}

/// det B(n) by interpolation through n = 0..=d and its positive integer roots.
pub fn assumption_c_exceptional_dims(m: u64, phi: &[u64], sigma1: u64) -> Result<ExceptionalDims> {
    let d = phi.len();
    if d != units(m).len() / 2 || !phi.contains(&sigma1) {
        return Err(Error::InvalidInput("Φ must be a CM type containing σ_1".into()));
    }
    let xs: Vec<i64> = (0..=d as i64).collect();
    let ys: Vec<BigRational> = xs.iter().map(|&n| det_b(m, phi, sigma1, n)).collect();
    // Lagrange interpolation in the monomial basis
    let mut coeffs = vec![BigRational::zero(); d + 1];
    for (i, yi) in ys.iter().enumerate() {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (t, b) in basis.iter().enumerate() {
                next[t + 1] += b.clone();
                next[t] -= b * BigRational::from_integer(BigInt::from(xj));
            }
            basis = next;
            denom *= BigRational::from_integer(BigInt::from(xs[i] - xj));
        }
        for (t, b) in basis.iter().enumerate() {
            coeffs[t] += b * yi / &denom;
        }
    }
    let det_poly: Vec<BigInt> = coeffs
        .iter()
        .map(|c| {
            assert!(c.is_integer(), "det B(n) has integer coefficients");
            c.to_integer()
        })
        .collect();
    let c0 = det_poly[0].abs();
    let mut roots = Vec::new();
    if c0.is_zero() {
        return Err(Error::InvalidInput("det B(0) vanishes".into()));
    }
    let c0 = c0.to_u64().ok_or_else(|| Error::InvalidInput("constant term too large".into()))?;
    for r in 1..=c0 {
        if c0 % r != 0 {
            continue;
        }
        let mut acc = BigInt::zero();
        for c in det_poly.iter().rev() {
            acc = acc * BigInt::from(r) + c;
        }
        if acc.is_zero() {
            roots.push(r);
        }
    }
    Ok(ExceptionalDims { det_poly, roots })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingDatum {
    pub m: u64,
    pub p: u64,
    /// ⟨p⟩ ⊂ (Z/m)^*, listed as 1, p, p², …
    pub decomposition: Vec<u64>,
    pub f: u64,
    pub r: u64,
    pub d: u64,
    pub k_in_f0: bool,
    /// cosets of D, each sorted; ordered by least element
    pub cosets: Vec<Vec<u64>>,
    /// a_P = |Φ* ∩ T_P| per coset
    pub a: Vec<u64>,
    pub p1: usize,
    pub p1_star: usize,
}

impl SplittingDatum {
    pub fn coset_of(&self, k: u64) -> usize {
        let k = k % self.m;
        self.cosets.iter().position(|c| c.contains(&k)).expect("unit index")
    }

    /// Index of the coset -T.
    pub fn dual(&self, i: usize) -> usize {
        self.coset_of(self.m - self.cosets[i][0])
    }

    pub fn is_self_dual(&self, i: usize) -> bool {
        self.dual(i) == i
    }
}

pub fn splitting_datum(m: u64, p: u64, simple: &SimpleSignature) -> Result<SplittingDatum> {
    if gcd(p, m) != 1 {
        return Err(Error::BadPrime(format!("p = {p} divides m = {m}")));
    }
    let us = units(m);
    let f = mult_order(p, m);
    let mut decomposition = Vec::with_capacity(f as usize);
    let mut x = 1u64;
    for _ in 0..f {
        decomposition.push(x);
        x = x * (p % m) % m;
    }
    let mut cosets: Vec<Vec<u64>> = Vec::new();
    for &u in &us {
        if cosets.iter().any(|c| c.contains(&u)) {
            continue;
        }
        let mut c: Vec<u64> = decomposition.iter().map(|&h| h * u % m).collect();
        c.sort();
        cosets.push(c);
    }
    let phi_star = simple.phi_star(m);
    let a = cosets.iter().map(|c| c.iter().filter(|k| phi_star.contains(k)).count() as u64).collect();
    let k_in_f0 = decomposition.contains(&(m - 1));
    let mut sd = SplittingDatum {
        m,
        p,
        f,
        r: us.len() as u64 / f,
        d: us.len() as u64 / 2,
        k_in_f0,
        decomposition,
        cosets,
        a,
        p1: 0,
        p1_star: 0,
    };
    sd.p1 = sd.coset_of(simple.sigma1);
    sd.p1_star = sd.dual(sd.p1);
    Ok(sd)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub name: String,
    pub datum: MonodromyDatum,
    /// finite branch points beyond 0 and 1 used when none are given
    pub default_points: Vec<i64>,
    pub warning: Option<String>,
}

const REGISTRY: &[(&str, u64, &[u64])] = &[
    ("M6", 3, &[1, 1, 1, 1, 2]),
    ("M8", 4, &[1, 1, 2, 2, 2]),
    ("M10", 3, &[1, 1, 1, 1, 1, 1]),
    ("M11", 5, &[1, 3, 3, 3]),
    ("M14", 6, &[2, 2, 2, 3, 3]),
    ("M15", 8, &[2, 4, 5, 5]),
    ("M16", 5, &[2, 2, 2, 2, 2]),
    ("M17", 7, &[2, 4, 4, 4]),
    ("M18", 10, &[3, 5, 6, 6]),
    ("M19", 9, &[3, 5, 5, 5]),
    ("M20", 12, &[4, 6, 7, 7]),
];

/// Extra finite branch points, in order, after 0 and 1.
const DEFAULT_POINTS: [i64; 3] = [3, 7, 12];

pub fn families() -> Vec<Family> {
    REGISTRY
        .iter()
        .map(|&(name, m, a)| {
            let datum = MonodromyDatum::new(m, a.to_vec()).expect("registry data are valid");
            let extra = a.len() - 3;
            let warning = (name == "M19").then(|| {
                "one simple factor of this Jacobian violates the Galois-orbit rank assumption; results for it are outside the proven range".to_string()
            });
            Family { name: name.to_string(), datum, default_points: DEFAULT_POINTS[..extra].to_vec(), warning }
        })
        .collect()
}

pub fn family(name: &str) -> Result<Family> {
    let key = name.trim().to_ascii_uppercase().replace(['[', ']'], "");
    families()
        .into_iter()
        .find(|f| f.name == key)
        .ok_or_else(|| Error::InvalidInput(format!("unknown family {name}")))
}
