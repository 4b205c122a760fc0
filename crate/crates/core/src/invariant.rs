//! The norm-of-trace invariant a_p and its divisibility and size diagnostics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cm::SplittingDatum;
use crate::counting::EigenspaceCharPoly;
use crate::cyclotomic::CycloInt;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApDiagnostics {
    pub a_p: BigInt,
    /// None when a_p = 0
    pub v: Option<u32>,
    pub div_ok: bool,
    pub bound_ok: bool,
    pub mu_certified: bool,
    pub c: BigInt,
}

/// Π over the r embeddings of K of tr(φ | ∧^f), given per-embedding traces
/// tr(φ^f | V_T). On one embedding φ cycles the f eigenspaces of the coset,
/// so det(1 - φT) = det(1 - φ^f T^f | V_T) and e_f = (-1)^{f+1} tr(φ^f).
pub fn compute_ap_from_traces(traces: &[CycloInt], f: u64) -> Result<BigInt> {
    let m = traces.first().ok_or_else(|| Error::InvalidInput("no cosets".into()))?.m();
    let sign = if f % 2 == 1 { 1 } else { -1 };
    let mut acc = CycloInt::from_int(m, 1);
    for t in traces {
        acc = acc.mul(&t.scale(sign));
    }
    acc.as_integer().map(BigInt::from).ok_or_else(|| Error::InvalidInput(format!("a_p = {acc} is not rational")))
}

/// a_p from one characteristic polynomial per coset of D, in coset order.
pub fn compute_ap(pieces: &[EigenspaceCharPoly], split: &SplittingDatum) -> Result<BigInt> {
    if pieces.len() != split.cosets.len() {
        return Err(Error::InvalidInput("one piece per coset".into()));
    }
    let traces = pieces
        .iter()
        .map(|cp| {
            if cp.n == 0 {
                return Ok(CycloInt::zero(cp.m));
            }
            cp.e.get(1).cloned().flatten().ok_or_else(|| Error::Budget("trace of a piece is unresolved".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    compute_ap_from_traces(&traces, split.f)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn vp(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut k = 0;
    while x.is_multiple_of(&p) {
        x /= &p;
        k += 1;
    }
    Some(k)
}

pub fn diagnostics(a_p: &BigInt, p: u64, split: &SplittingDatum, n: u64) -> ApDiagnostics {
    let d = split.d as u32;
    let c = binomial(n * split.f, split.f).pow(split.r as u32);
    let v = vp(a_p, p);
    let pb = BigInt::from(p);
    let div_ok = a_p.is_multiple_of(&pb.pow(d.saturating_sub(1)));
    let bound_ok = a_p.abs() <= &c * pb.pow(d);
    let mu_certified = !a_p.is_multiple_of(&pb.pow(d));
    ApDiagnostics { a_p: a_p.clone(), v, div_ok, bound_ok, mu_certified, c }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::{family, simple_signature_check, splitting_datum};

    fn m11_split(p: u64) -> SplittingDatum {
        let sig = family("M11").unwrap().datum.signature();
        splitting_datum(5, p, &simple_signature_check(&sig).unwrap()).unwrap()
    }

    #[test]
    fn bound_constants() {
        assert_eq!(diagnostics(&BigInt::from(11), 11, &m11_split(11), 2).c, BigInt::from(16));
        assert_eq!(diagnostics(&BigInt::from(19), 19, &m11_split(19), 2).c, BigInt::from(36));
        assert_eq!(diagnostics(&BigInt::from(7), 7, &m11_split(7), 2).c, BigInt::from(70));
    }

    #[test]
    fn synthetic_spectrum() {
        let p = 11i128;
        let pairs = [(1, p), (p, p), (1, 1), (1, p)];
        let traces: Vec<CycloInt> = pairs.iter().map(|&(a, b)| CycloInt::from_int(5, a + b)).collect();
        let ap = compute_ap_from_traces(&traces, 1).unwrap();
        assert_eq!(ap, BigInt::from((1 + p) * 2 * p * 2 * (1 + p)));
        let diag = diagnostics(&ap, 11, &m11_split(11), 2);
        assert_eq!(diag.v, Some(1));
        // not Weil numbers, so the size bound does not apply
        assert!(diag.div_ok && diag.mu_certified);
    }

    #[test]
    fn certificate_fails_when_divisible() {
        let d = diagnostics(&BigInt::from(121 * 3), 11, &m11_split(11), 2);
        assert!(d.div_ok && !d.mu_certified);
        let z = diagnostics(&BigInt::zero(), 11, &m11_split(11), 2);
        assert_eq!(z.v, None);
        assert!(!z.mu_certified);
    }
}
