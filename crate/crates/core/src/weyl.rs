//! Component trace functions on the monodromy side.
//!
//! Basis conventions: V splits into d blocks of size 2n. In block i the first
//! n vectors span the eigenspace of one embedding of F over τ_i and the last n
//! that of its conjugate; the symplectic form pairs v_j with v_{j+n} inside a
//! block. The generic torus element is diag(x_{i,1..n}, x_{i,1..n}^{-1}) on
//! block i, and a central twist multiplies the two halves by t_i and t_i^{-1}.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cm::{simple_signature_check, MonodromyDatum, Signature};
use crate::error::{Error, Result};
use crate::ffield::{gcd, mult_order, units};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, i64>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: i64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Vec<i32>, c: i64) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn var(nvars: usize, i: usize, e: i32) -> Self {
        let mut v = vec![0; nvars];
        v[i] = e;
        Self::monomial(v, 1)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &i64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Vec<i32>, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (e, &c) in &other.terms {
            r.add_term(e.clone(), c);
        }
        r
    }

    pub fn neg(&self) -> Self {
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, &c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut r = Self::zero(self.nvars);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Apply an integer linear map to every exponent vector.
    pub fn map_exponents(&self, nvars: usize, f: impl Fn(&[i32]) -> Vec<i32>) -> Self {
        let mut r = Self::zero(nvars);
        for (e, &c) in &self.terms {
            r.add_term(f(e), c);
        }
        r
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        // constant last, then by descending total degree of positive exponents
        let mut items: Vec<(&Vec<i32>, &i64)> = self.terms.iter().collect();
        items.sort_by_key(|(e, _)| {
            let pos: i32 = e.iter().filter(|&&x| x > 0).sum();
            let zero = e.iter().all(|&x| x == 0);
            (zero, -pos, e.iter().map(|&x| -x).collect::<Vec<_>>())
        });
        let mut out = String::new();
        for (k, (e, &c)) in items.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| if x == 1 { names[i].clone() } else { format!("{}^{}", names[i], x) })
                .collect();
            let body = mono.join("*");
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if k == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            match (body.is_empty(), mag) {
                (true, _) => out.push_str(&mag.to_string()),
                (false, 1) => out.push_str(&body),
                (false, _) => out.push_str(&format!("{mag}*{body}")),
            }
        }
        out
    }
}

/// Variable layout: d·n torus coordinates x_{i,j}, then d twist weights t_i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusVars {
    pub d: usize,
    pub n: usize,
}

impl TorusVars {
    pub fn nvars(&self) -> usize {
        self.d * self.n + self.d
    }

    pub fn x(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn t(&self, i: usize) -> usize {
        self.d * self.n + i
    }

    pub fn names(&self) -> Vec<String> {
        let mut v = Vec::with_capacity(self.nvars());
        for i in 1..=self.d {
            for j in 0..self.n {
                v.push(if self.n == 2 { format!("{}{i}", ["a", "b"][j]) } else { format!("x{i}_{}", j + 1) });
            }
        }
        v.extend((1..=self.d).map(|i| format!("t{i}")));
        v
    }

    pub fn render(&self, f: &LaurentPoly) -> String {
        f.render(&self.names())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentElement {
    /// entries ±1
    pub eps: Vec<i8>,
    /// γ(i), 0-based
    pub gamma: Vec<usize>,
}

impl ComponentElement {
    pub fn identity(d: usize) -> Self {
        Self { eps: vec![1; d], gamma: (0..d).collect() }
    }

    pub fn d(&self) -> usize {
        self.eps.len()
    }

    /// γ(ε)_i = ε_{γ^{-1}(i)}
    fn act(&self, eps: &[i8]) -> Vec<i8> {
        let mut out = vec![1; eps.len()];
        for (i, &g) in self.gamma.iter().enumerate() {
            out[g] = eps[i];
        }
        out
    }

    /// (ε, γ)(ε′, γ′) = (ε·γ(ε′), γγ′)
    pub fn compose(&self, other: &Self) -> Self {
        let moved = self.act(&other.eps);
        let eps = self.eps.iter().zip(&moved).map(|(a, b)| a * b).collect();
        let gamma = other.gamma.iter().map(|&j| self.gamma[j]).collect();
        Self { eps, gamma }
    }

    pub fn inverse(&self) -> Self {
        let d = self.d();
        let mut ginv = vec![0; d];
        for (i, &g) in self.gamma.iter().enumerate() {
            ginv[g] = i;
        }
        let inv = Self { eps: vec![1; d], gamma: ginv };
        // (ε, γ)^{-1} = (γ^{-1}(ε), γ^{-1}); ε is an involution
        let eps = inv.act(&self.eps);
        Self { eps, gamma: inv.gamma }
    }

    /// The permutation α_γ α_ε of {0, …, 2nd-1}.
    pub fn permutation(&self, n: usize) -> Vec<usize> {
        b_matrix(self, n).perm
    }
}

impl fmt::Display for ComponentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: String = self.eps.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
        let g: Vec<String> = self.gamma.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "eps=({e}) gamma=[{}]", g.join(","))
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..d {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// All of (Z/2)^d ⋊ S_d, ordered by γ lexicographically, then by ε with + before -.
pub fn component_group(d: usize) -> Vec<ComponentElement> {
    let mut out = Vec::with_capacity((1usize << d) * (1..=d).product::<usize>());
    for gamma in permutations(d) {
        for mask in 0..(1u32 << d) {
            let eps = (0..d).map(|i| if mask >> (d - 1 - i) & 1 == 1 { -1 } else { 1 }).collect();
            out.push(ComponentElement { eps, gamma: gamma.clone() });
        }
    }
    out
}

/// Column c of the matrix is sign[c]·e_{perm[c]}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermMatrix {
    pub perm: Vec<usize>,
    pub sign: Vec<i8>,
}

impl SignedPermMatrix {
    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn dense(&self) -> Vec<Vec<i8>> {
        let s = self.size();
        let mut m = vec![vec![0; s]; s];
        for c in 0..s {
            m[self.perm[c]][c] = self.sign[c];
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&k| self.perm[k]).collect();
        let sign = (0..self.size()).map(|c| other.sign[c] * self.sign[other.perm[c]]).collect();
        Self { perm, sign }
    }

    /// BᵀJB = J for the block form pairing v_j with v_{j+n}.
    pub fn is_symplectic(&self, n: usize) -> bool {
        let s = self.size();
        (0..s).all(|a| (0..s).all(|b| symplectic_form(n, self.perm[a], self.perm[b]) * self.sign[a] * self.sign[b] == symplectic_form(n, a, b)))
    }
}

fn symplectic_form(n: usize, a: usize, b: usize) -> i8 {
    let (ba, bb) = (a / (2 * n), b / (2 * n));
    if ba != bb {
        return 0;
    }
    let (ra, rb) = (a % (2 * n), b % (2 * n));
    if ra < n && rb == ra + n {
        1
    } else if rb < n && ra == rb + n {
        -1
    } else {
        0
    }
}

/// B = E_{α_γ}·δ_{α_ε}.
pub fn b_matrix(elem: &ComponentElement, n: usize) -> SignedPermMatrix {
    let d = elem.d();
    let size = 2 * n * d;
    let mut perm = vec![0; size];
    let mut sign = vec![1; size];
    for i in 0..d {
        for j in 0..2 * n {
            let (jj, s) = if elem.eps[i] < 0 {
                if j < n {
                    (2 * n - 1 - j, -1)
                } else {
                    (2 * n - 1 - j, 1)
                }
            } else {
                (j, 1)
            };
            perm[i * 2 * n + j] = elem.gamma[i] * 2 * n + jj;
            sign[i * 2 * n + j] = s;
        }
    }
    let b = SignedPermMatrix { perm, sign };
    debug_assert!(b.is_symplectic(n));
    b
}

/// Cycle notation with 1-based labels, fixed points omitted.
pub fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for s in 0..perm.len() {
        if seen[s] || perm[s] == s {
            continue;
        }
        let mut c = vec![];
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push((x + 1).to_string());
            x = perm[x];
        }
        let sep = if perm.len() > 9 { " " } else { "" };
        out.push_str(&format!("({})", c.join(sep)));
    }
    if out.is_empty() {
        "id".into()
    } else {
        out
    }
}

/// How the eigenspaces of F sit in the basis for one Frobenius class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassLayout {
    pub m: u64,
    pub sigma: u64,
    pub n: usize,
    pub d: usize,
    /// label k of the eigenspace at (block, half), indexed 2·block + half
    pub labels: Vec<u64>,
    /// one entry per embedding of K: basis indices and the wedge degree
    pub factors: Vec<(Vec<usize>, usize)>,
    cosets: Vec<Vec<u64>>,
}

impl ClassLayout {
    pub fn new(m: u64, n: usize, sigma: u64) -> Result<Self> {
        if m < 3 || gcd(sigma, m) != 1 {
            return Err(Error::InvalidInput(format!("class {sigma} is not a unit mod {m}")));
        }
        let us = units(m);
        let f = mult_order(sigma % m, m) as usize;
        let dgrp: Vec<u64> = (0..f).scan(1u64, |x, _| {
            let v = *x;
            *x = *x * (sigma % m) % m;
            Some(v)
        })
        .collect();
        let mut cosets: Vec<Vec<u64>> = Vec::new();
        for &u in &us {
            if !cosets.iter().any(|c| c.contains(&u)) {
                let mut c: Vec<u64> = dgrp.iter().map(|&h| h * u % m).collect();
                c.sort();
                cosets.push(c);
            }
        }
        let d = us.len() / 2;
        let mut labels = Vec::with_capacity(2 * d);
        let mut factors = Vec::new();
        let half = |block: usize, h: usize| (block * 2 * n + h * n..block * 2 * n + (h + 1) * n).collect::<Vec<_>>();
        if dgrp.contains(&(m - 1)) {
            for c in &cosets {
                let start = labels.len() / 2;
                for &k in c.iter().filter(|&&k| k < m - k) {
                    labels.extend([k, m - k]);
                }
                let idx = (start..labels.len() / 2).flat_map(|b| [half(b, 0), half(b, 1)].concat()).collect();
                factors.push((idx, f));
            }
        } else {
            for c in cosets.iter().filter(|c| c[0] < cosets.iter().find(|o| o.contains(&(m - c[0]))).unwrap()[0]) {
                let start = labels.len() / 2;
                for &k in c {
                    labels.extend([k, m - k]);
                }
                let end = labels.len() / 2;
                factors.push(((start..end).flat_map(|b| half(b, 0)).collect(), f));
                factors.push(((start..end).flat_map(|b| half(b, 1)).collect(), f));
            }
        }
        debug_assert_eq!(labels.len(), 2 * d);
        Ok(Self { m, sigma: sigma % m, n, d, labels, factors, cosets })
    }

    fn coset(&self, k: u64) -> usize {
        self.cosets.iter().position(|c| c.contains(&k)).unwrap()
    }

    /// The element commutes with K, i.e. preserves every coset of ⟨σ⟩.
    pub fn is_consistent(&self, elem: &ComponentElement) -> bool {
        elem.d() == self.d
            && (0..self.d).all(|i| {
                (0..2).all(|h| {
                    let h2 = if elem.eps[i] < 0 { 1 - h } else { h };
                    self.coset(self.labels[2 * i + h]) == self.coset(self.labels[2 * elem.gamma[i] + h2])
                })
            })
    }

    pub fn components(&self) -> Vec<ComponentElement> {
        component_group(self.d).into_iter().filter(|e| self.is_consistent(e)).collect()
    }

    pub fn vars(&self) -> TorusVars {
        TorusVars { d: self.d, n: self.n }
    }
}

/// Diagonal weight of M·t at basis index c.
fn weight(vars: TorusVars, c: usize, twist: bool) -> Vec<i32> {
    let n = vars.n;
    let (i, r) = (c / (2 * n), c % (2 * n));
    let mut e = vec![0; vars.nvars()];
    let s = if r < n { 1 } else { -1 };
    e[vars.x(i, r % n)] = s;
    if twist {
        e[vars.t(i)] = s;
    }
    e
}

/// tr(B·t·M | ∧^k) on a B-stable span of basis vectors: sum over unions of
/// cycles of total length k of Π sgn(cycle)·entries.
fn wedge_trace(b: &SignedPermMatrix, idx: &[usize], k: usize, vars: TorusVars, twist: bool) -> Result<LaurentPoly> {
    let nv = vars.nvars();
    if idx.iter().any(|&c| !idx.contains(&b.perm[c])) {
        return Err(Error::InvalidInput("component does not preserve the eigenspaces of K".into()));
    }
    let mut dp = vec![LaurentPoly::zero(nv); k + 1];
    dp[0] = LaurentPoly::constant(nv, 1);
    let mut seen = vec![false; b.size()];
    for &s in idx {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        let mut mono = vec![0; nv];
        let mut sg = 1i64;
        while !seen[x] {
            seen[x] = true;
            len += 1;
            for (a, w) in mono.iter_mut().zip(weight(vars, x, twist)) {
                *a += w;
            }
            sg *= b.sign[x] as i64;
            x = b.perm[x];
        }
        if len % 2 == 0 {
            sg = -sg;
        }
        let contrib = LaurentPoly::monomial(mono, sg);
        for t in (len..=k).rev() {
            let add = dp[t - len].mul(&contrib);
            dp[t] = dp[t].add(&add);
        }
    }
    Ok(dp.swap_remove(k))
}

/// Per-embedding factors tr(B·t·M | ∧^f V^δ) of the trace function.
pub fn trace_factors(layout: &ClassLayout, elem: &ComponentElement, twist: bool) -> Result<Vec<LaurentPoly>> {
    if !layout.is_consistent(elem) {
        return Err(Error::InvalidInput(format!("{elem} does not lie over the class {} mod {}", layout.sigma, layout.m)));
    }
    let b = b_matrix(elem, layout.n);
    layout.factors.iter().map(|(idx, k)| wedge_trace(&b, idx, *k, layout.vars(), twist)).collect()
}

pub fn trace_function(layout: &ClassLayout, elem: &ComponentElement, twist: bool) -> Result<LaurentPoly> {
    let nv = layout.vars().nvars();
    Ok(trace_factors(layout, elem, twist)?.iter().fold(LaurentPoly::constant(nv, 1), |acc, f| acc.mul(f)))
}

/// Restrict to T′ (each A_i of determinant 1) by x_{i,n} = Π_{j<n} x_{i,j}^{-1}.
pub fn restrict_to_tprime(f: &LaurentPoly, vars: TorusVars) -> LaurentPoly {
    f.map_exponents(vars.nvars(), |e| {
        let mut out = e.to_vec();
        for i in 0..vars.d {
            let last = e[vars.x(i, vars.n - 1)];
            for j in 0..vars.n - 1 {
                out[vars.x(i, j)] -= last;
            }
            out[vars.x(i, vars.n - 1)] = 0;
        }
        out
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nonconstancy {
    /// some monomial on T′ has a nonzero torus exponent
    pub nonconstant: bool,
    /// some such torus monomial has a coefficient that is a single twist
    /// monomial, so it survives every specialization of t
    pub uniform_in_twist: bool,
}

pub fn nonconstancy(f: &LaurentPoly, vars: TorusVars) -> Nonconstancy {
    let r = restrict_to_tprime(f, vars);
    let tor = vars.d * vars.n;
    let mut groups: BTreeMap<Vec<i32>, usize> = BTreeMap::new();
    for (e, _) in r.terms() {
        if e[..tor].iter().any(|&x| x != 0) {
            *groups.entry(e[..tor].to_vec()).or_default() += 1;
        }
    }
    Nonconstancy { nonconstant: !groups.is_empty(), uniform_in_twist: groups.values().any(|&c| c == 1) }
}

pub fn nonconstant_on_tprime(f: &LaurentPoly, vars: TorusVars) -> bool {
    nonconstancy(f, vars).nonconstant
}

/// The formula printed for the split identity component when d = n = 2:
/// (a1+b1)(a2+b2)(a1^-1+b1^-1) + (a2^-1+b2^-1). The trace from the
/// definition is the product of all four factors; both are reported.
pub fn split_identity_printed() -> LaurentPoly {
    let v = TorusVars { d: 2, n: 2 };
    let nv = v.nvars();
    let s = |i: usize, e: i32| LaurentPoly::var(nv, v.x(i, 0), e).add(&LaurentPoly::var(nv, v.x(i, 1), e));
    s(0, 1).mul(&s(1, 1)).mul(&s(0, -1)).add(&s(1, -1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub class: u64,
    pub f: usize,
    pub element: ComponentElement,
    pub permutation: String,
    pub trace: String,
    pub trace_on_tprime: String,
    pub verdict: Nonconstancy,
}

/// Torus data of the primitive part of a cyclic cover: (m, n, d).
pub fn weyl_data(datum: &MonodromyDatum) -> Result<(u64, usize, usize)> {
    let sig: Signature = datum.signature();
    simple_signature_check(&sig)?;
    Ok((sig.m, sig.n() as usize, sig.d() as usize))
}

/// Every component over every requested class, with its trace and verdict.
pub fn check_family(datum: &MonodromyDatum, class: Option<u64>, twist: bool) -> Result<Vec<ComponentReport>> {
    let (m, n, _) = weyl_data(datum)?;
    let classes = match class {
        Some(c) => vec![c % m],
        None => units(m),
    };
    let mut jobs = Vec::new();
    for &c in &classes {
        let layout = ClassLayout::new(m, n, c)?;
        for e in layout.components() {
            jobs.push((layout.clone(), e));
        }
    }
    jobs.into_par_iter()
        .map(|(layout, e)| {
            let vars = layout.vars();
            let tr = trace_function(&layout, &e, twist)?;
            let verdict = nonconstancy(&tr, vars);
            Ok(ComponentReport {
                class: layout.sigma,
                f: layout.factors[0].1,
                permutation: cycle_notation(&e.permutation(n)),
                trace: vars.render(&tr),
                trace_on_tprime: vars.render(&restrict_to_tprime(&tr, vars)),
                element: e,
                verdict,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::family;

    fn v22() -> TorusVars {
        TorusVars { d: 2, n: 2 }
    }

    fn mono(v: TorusVars, pairs: &[(usize, i32)]) -> LaurentPoly {
        let mut e = vec![0; v.nvars()];
        for &(i, x) in pairs {
            e[i] = x;
        }
        LaurentPoly::monomial(e, 1)
    }

    #[test]
    fn group_sizes_and_axioms() {
        for d in 1..=4 {
            let g = component_group(d);
            assert_eq!(g.len(), (1 << d) * (1..=d).product::<usize>());
            let id = ComponentElement::identity(d);
            for x in g.iter().step_by(7) {
                assert_eq!(x.compose(&x.inverse()), id);
                assert_eq!(id.compose(x), *x);
                for y in g.iter().step_by(5) {
                    for z in g.iter().step_by(11) {
                        assert_eq!(x.compose(y).compose(z), x.compose(&y.compose(z)));
                    }
                }
            }
        }
    }

    #[test]
    fn permutations_realize_the_quotient() {
        // α_γ α_ε = α_{γ(ε)} α_γ, so the permutations compose under the law
        // transported along (ε, γ) ↦ (γ(ε), γ)
        let n = 2;
        let g = component_group(3);
        let to_std = |x: &ComponentElement| ComponentElement { eps: x.act(&x.eps), gamma: x.gamma.clone() };
        let from_std = |x: &ComponentElement| ComponentElement { eps: x.inverse().act(&x.eps), gamma: x.gamma.clone() };
        for x in &g {
            for y in g.iter().step_by(3) {
                let px = b_matrix(x, n);
                let py = b_matrix(y, n);
                let z = from_std(&to_std(x).compose(&to_std(y)));
                assert_eq!(px.mul(&py).perm, b_matrix(&z, n).perm);
            }
        }
        let mut perms: Vec<Vec<usize>> = g.iter().map(|e| e.permutation(n)).collect();
        perms.sort();
        perms.dedup();
        assert_eq!(perms.len(), 48);
    }

    #[test]
    fn b_matrices_are_symplectic() {
        for (d, n) in [(1, 1), (2, 2), (3, 2), (2, 3), (4, 1)] {
            for e in component_group(d) {
                assert!(b_matrix(&e, n).is_symplectic(n));
            }
        }
        assert_eq!(b_matrix(&ComponentElement::identity(2), 2).dense(), (0..8).map(|r| (0..8).map(|c| (r == c) as i8).collect::<Vec<i8>>()).collect::<Vec<_>>());
    }

    #[test]
    fn flipped_block_matrix() {
        let e = ComponentElement { eps: vec![-1, 1], gamma: vec![0, 1] };
        let m = b_matrix(&e, 2).dense();
        let block: Vec<Vec<i8>> = m[..4].iter().map(|r| r[..4].to_vec()).collect();
        assert_eq!(block, vec![vec![0, 0, 0, 1], vec![0, 0, 1, 0], vec![0, -1, 0, 0], vec![-1, 0, 0, 0]]);
    }

    #[test]
    fn inert_component_permutation() {
        let e = ComponentElement { eps: vec![1, -1], gamma: vec![1, 0] };
        assert_eq!(cycle_notation(&e.permutation(2)), "(1548)(2637)");
    }

    #[test]
    fn half_split_factors() {
        let v = v22();
        let layout = ClassLayout::new(5, 2, 4).unwrap();
        assert_eq!(layout.components().len(), 4);
        let (a, b) = (v.x(0, 0), v.x(0, 1));
        let id = ComponentElement::identity(2);
        let fs = trace_factors(&layout, &id, false).unwrap();
        let expect = [mono(v, &[(a, 1), (b, 1)]), mono(v, &[(a, 1), (b, -1)]), mono(v, &[(a, -1), (b, 1)]), mono(v, &[(a, -1), (b, -1)])]
            .iter()
            .fold(LaurentPoly::constant(v.nvars(), 2), |s, x| s.add(x));
        assert_eq!(fs[0], expect);
        let flip = ComponentElement { eps: vec![-1, 1], gamma: vec![0, 1] };
        let fs = trace_factors(&layout, &flip, false).unwrap();
        assert_eq!(fs[0], mono(v, &[(a, 1), (b, -1)]).add(&mono(v, &[(a, -1), (b, 1)])));
    }

    #[test]
    fn inert_trace() {
        let v = v22();
        let layout = ClassLayout::new(5, 2, 2).unwrap();
        assert_eq!(layout.components().len(), 8);
        let e = ComponentElement { eps: vec![1, -1], gamma: vec![1, 0] };
        let tr = trace_function(&layout, &e, false).unwrap();
        let (a1, b1, a2, b2) = (v.x(0, 0), v.x(0, 1), v.x(1, 0), v.x(1, 1));
        let expect = mono(v, &[(a1, 1), (b1, -1), (a2, 1), (b2, -1)]).add(&mono(v, &[(a1, -1), (b1, 1), (a2, -1), (b2, 1)]));
        assert_eq!(tr, expect);
        let r = restrict_to_tprime(&tr, v);
        assert_eq!(r, mono(v, &[(a1, 2), (a2, 2)]).add(&mono(v, &[(a1, -2), (a2, -2)])));
        assert!(nonconstant_on_tprime(&tr, v));
    }

    #[test]
    fn split_identity_against_printed() {
        let v = v22();
        let layout = ClassLayout::new(5, 2, 1).unwrap();
        assert_eq!(layout.components(), vec![ComponentElement::identity(2)]);
        let tr = trace_function(&layout, &ComponentElement::identity(2), false).unwrap();
        let s = |i: usize, e: i32| mono(v, &[(v.x(i, 0), e)]).add(&mono(v, &[(v.x(i, 1), e)]));
        assert_eq!(tr, s(0, 1).mul(&s(0, -1)).mul(&s(1, 1)).mul(&s(1, -1)));
        assert_ne!(tr, split_identity_printed());
        assert!(nonconstant_on_tprime(&tr, v));
    }

    #[test]
    fn constants_are_constant() {
        let v = v22();
        assert!(!nonconstant_on_tprime(&LaurentPoly::constant(v.nvars(), 5), v));
        // a1·b1 is 1 on T′
        assert!(!nonconstant_on_tprime(&mono(v, &[(0, 1), (1, 1)]), v));
    }

    #[test]
    fn identity_traces_with_f_one_are_sums() {
        // m = 7, p ≡ 1: six one-dimensional factors, each a sum of n weights
        let layout = ClassLayout::new(7, 2, 1).unwrap();
        let fs = trace_factors(&layout, &ComponentElement::identity(3), false).unwrap();
        assert_eq!(fs.len(), 6);
        assert!(fs.iter().all(|f| f.len() == 2));
    }

    #[test]
    fn inconsistent_pairs_are_rejected() {
        let layout = ClassLayout::new(5, 2, 1).unwrap();
        let e = ComponentElement { eps: vec![-1, 1], gamma: vec![0, 1] };
        assert!(trace_function(&layout, &e, false).is_err());
    }

    #[test]
    fn m11_all_components_nonconstant() {
        let reports = check_family(&family("M11").unwrap().datum, None, true).unwrap();
        assert_eq!(reports.len(), 1 + 8 + 8 + 4);
        assert!(reports.iter().all(|r| r.verdict.nonconstant && r.verdict.uniform_in_twist));
    }
}
