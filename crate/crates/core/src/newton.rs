//! Newton polygons as slope multisets, the μ-ordinary predictor, hull
//! extraction from valuations and polygon comparison.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cm::{Signature, SplittingDatum};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct NewtonPolygon {
    /// ascending, merged, positive multiplicities
    slopes: Vec<(Rational64, u64)>,
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl NewtonPolygon {
    pub fn new<I: IntoIterator<Item = (Rational64, u64)>>(items: I) -> Self {
        let mut map: BTreeMap<Rational64, u64> = BTreeMap::new();
        for (s, k) in items {
            if k > 0 {
                *map.entry(s).or_insert(0) += k;
            }
        }
        Self { slopes: map.into_iter().collect() }
    }

    pub fn ordinary(g: u64) -> Self {
        Self::new([(Rational64::zero(), g), (Rational64::one(), g)])
    }

    pub fn supersingular(g: u64) -> Self {
        Self::new([(r(1, 2), 2 * g)])
    }

    pub fn slopes(&self) -> &[(Rational64, u64)] {
        &self.slopes
    }

    pub fn total_mult(&self) -> u64 {
        self.slopes.iter().map(|(_, k)| k).sum()
    }

    pub fn total_rise(&self) -> Rational64 {
        self.slopes.iter().map(|(s, k)| s * Rational64::from(*k as i64)).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.slopes.iter().all(|(s, k)| self.mult(Rational64::one() - s) == *k)
    }

    pub fn mult(&self, s: Rational64) -> u64 {
        self.slopes.iter().find(|(x, _)| *x == s).map(|(_, k)| *k).unwrap_or(0)
    }

    pub fn is_ordinary(&self) -> bool {
        self.slopes.iter().all(|(s, _)| s.is_zero() || *s == Rational64::one())
    }

    pub fn p_rank(&self) -> u64 {
        self.mult(Rational64::zero())
    }

    pub fn smallest_slope(&self) -> Option<Rational64> {
        self.slopes.first().map(|(s, _)| *s)
    }

    pub fn union(&self, o: &Self) -> Self {
        Self::new(self.slopes.iter().chain(o.slopes.iter()).copied())
    }

    /// Slopes divided by `f`, multiplicities multiplied by `f`: turns a
    /// polygon of φ^f-eigenvalues into one of φ-eigenvalues.
    pub fn normalize(&self, f: u64) -> Self {
        Self::new(self.slopes.iter().map(|(s, k)| (s / Rational64::from(f as i64), k * f)))
    }

    /// Height of the polygon at abscissa x (0 ≤ x ≤ total_mult).
    pub fn value_at(&self, x: Rational64) -> Rational64 {
        let mut acc = Rational64::zero();
        let mut pos = Rational64::zero();
        for (s, k) in &self.slopes {
            let run = Rational64::from(*k as i64);
            if x <= pos + run {
                return acc + s * (x - pos);
            }
            acc += s * run;
            pos += run;
        }
        acc
    }

    /// Abscissae of all breakpoints including the endpoints.
    pub fn breakpoints(&self) -> Vec<u64> {
        let mut v = vec![0];
        let mut pos = 0;
        for (_, k) in &self.slopes {
            pos += k;
            v.push(pos);
        }
        v
    }

    pub fn in_unit_range(&self) -> bool {
        self.slopes.iter().all(|(s, _)| *s >= Rational64::zero() && *s <= Rational64::one())
    }

    pub fn to_json_triples(&self) -> Vec<[i64; 3]> {
        self.slopes.iter().map(|(s, k)| [*s.numer(), *s.denom(), *k as i64]).collect()
    }

    pub fn from_json_triples(v: &[[i64; 3]]) -> Result<Self> {
        if v.iter().any(|t| t[1] <= 0 || t[2] < 0) {
            return Err(Error::InvalidInput("bad slope triple".into()));
        }
        Ok(Self::new(v.iter().map(|t| (r(t[0], t[1]), t[2] as u64))))
    }

    /// Parse "0^4 ⊕ 1/2^2 ⊕ 1^4"; "+" is accepted in place of "⊕".
    pub fn parse(s: &str) -> Result<Self> {
        let mut items = Vec::new();
        for part in s.split(['⊕', '+']) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (sl, mult) = match part.split_once('^') {
                Some((a, b)) => (a.trim(), b.trim().parse::<u64>().map_err(|e| Error::InvalidInput(e.to_string()))?),
                None => (part, 1),
            };
            let slope = match sl.split_once('/') {
                Some((n, d)) => {
                    let n: i64 = n.trim().parse().map_err(|_| Error::InvalidInput(format!("bad slope {sl}")))?;
                    let d: i64 = d.trim().parse().map_err(|_| Error::InvalidInput(format!("bad slope {sl}")))?;
                    if d <= 0 {
                        return Err(Error::InvalidInput(format!("bad slope {sl}")));
                    }
                    r(n, d)
                }
                None => Rational64::from(sl.parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad slope {sl}")))?),
            };
            items.push((slope, mult));
        }
        Ok(Self::new(items))
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.slopes.iter().map(|(s, k)| format!("{s}^{k}")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl Serialize for NewtonPolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_triples().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NewtonPolygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<[i64; 3]> = Vec::deserialize(d)?;
        Self::from_json_triples(&v).map_err(serde::de::Error::custom)
    }
}

/// a_j = #{σ ∈ T : f(σ) > n - j}/f for j = 1..n, each with multiplicity f.
pub fn mu_ordinary_piece(sig: &Signature, split: &SplittingDatum, coset: usize) -> NewtonPolygon {
    let n = sig.n();
    let f = split.f as i64;
    let t = &split.cosets[coset];
    NewtonPolygon::new((1..=n).map(|j| {
        let c = t.iter().filter(|&&s| sig.f(s) + j > n).count() as i64;
        (r(c, f), split.f)
    }))
}

/// The explicit case-by-case description of μ_P for a simple signature with
/// n ≥ 2.
pub fn mu_ordinary_piece_closed_form(n: u64, split: &SplittingDatum, coset: usize) -> NewtonPolygon {
    let f = split.f as i64;
    let fu = split.f;
    let half = r(1, 2);
    if split.k_in_f0 {
        if coset != split.p1 {
            NewtonPolygon::new([(half, n * fu)])
        } else {
            NewtonPolygon::new([(half - r(1, f), fu), (half, (n - 2) * fu), (half + r(1, f), fu)])
        }
    } else if coset == split.p1 {
        let a1 = split.a[split.p1] as i64;
        NewtonPolygon::new([(r(a1, f), (n - 1) * fu), (r(a1 + 1, f), fu)])
    } else if coset == split.p1_star {
        let a1 = split.a[split.p1_star] as i64;
        NewtonPolygon::new([(r(a1 - 1, f), fu), (r(a1, f), (n - 1) * fu)])
    } else {
        NewtonPolygon::new([(r(split.a[coset] as i64, f), n * fu)])
    }
}

pub fn mu_ordinary_polygon(sig: &Signature, split: &SplittingDatum) -> NewtonPolygon {
    (0..split.cosets.len()).fold(NewtonPolygon::default(), |acc, i| acc.union(&mu_ordinary_piece(sig, split, i)))
}

/// The smallest slope μ_{P_1^*} starts with.
pub fn smallest_slope_target(split: &SplittingDatum) -> Rational64 {
    let f = split.f as i64;
    if split.k_in_f0 {
        r(1, 2) - r(1, f)
    } else {
        r(split.a[split.p1_star] as i64 - 1, f)
    }
}

/// ν = μ iff the smallest slope of ν_{P_1^*} hits the target.
pub fn smallest_slope_test(piece: &NewtonPolygon, split: &SplittingDatum) -> bool {
    piece.smallest_slope() == Some(smallest_slope_target(split))
}

/// A coefficient valuation that is either exact or only bounded below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Val {
    Known(i64),
    AtLeast(i64),
}

/// Lower convex hull of the known points; bounded-below points must lie on
/// or above it. Slopes are divided by `scale` and must land in [0, 1].
pub fn polygon_from_valuations(points: &[(u64, Val)], scale: u64) -> Result<NewtonPolygon> {
    let known: Vec<(i64, i64)> = points
        .iter()
        .filter_map(|&(i, v)| match v {
            Val::Known(x) => Some((i as i64, x)),
            Val::AtLeast(_) => None,
        })
        .collect();
    let last = points.iter().map(|p| p.0).max().ok_or_else(|| Error::InvalidInput("no points".into()))? as i64;
    if !known.contains(&(0, 0)) && !known.iter().any(|&(i, v)| i == 0 && v == 0) {
        return Err(Error::InvalidInput("hull must start at (0, 0)".into()));
    }
    if !known.iter().any(|&(i, _)| i == last) {
        return Err(Error::Precision("last coefficient has unknown valuation".into()));
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    let mut sorted = known.clone();
    sorted.sort();
    for pt in sorted {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above segment a -> pt
            let cross = (b.0 - a.0) as i128 * (pt.1 - a.1) as i128 - (b.1 - a.1) as i128 * (pt.0 - a.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let height = |x: i64| -> Rational64 {
        for w in hull.windows(2) {
            let (a, b) = (w[0], w[1]);
            if x >= a.0 && x <= b.0 {
                return Rational64::from(a.1) + r(b.1 - a.1, b.0 - a.0) * Rational64::from(x - a.0);
            }
        }
        Rational64::from(hull.last().unwrap().1)
    };
    for &(i, v) in points {
        if let Val::AtLeast(b) = v {
            if Rational64::from(b) < height(i as i64) {
                return Err(Error::Precision(format!("coefficient {i} could lower the hull")));
            }
        }
    }
    let s = scale as i64;
    let poly = NewtonPolygon::new(hull.windows(2).map(|w| {
        let (a, b) = (w[0], w[1]);
        (r(b.1 - a.1, (b.0 - a.0) * s), (b.0 - a.0) as u64)
    }));
    if !poly.in_unit_range() {
        return Err(Error::InvalidInput(format!("slopes {poly} outside [0, 1]")));
    }
    Ok(poly)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Equal,
    /// ν lies on or above μ everywhere and differs somewhere (ν < μ in the
    /// specialization order)
    Above,
    Below,
    Incomparable,
}

pub fn compare(nu: &NewtonPolygon, mu: &NewtonPolygon) -> Result<Comparison> {
    if nu.total_mult() != mu.total_mult() || nu.total_rise() != mu.total_rise() {
        return Err(Error::InvalidInput(format!("endpoint mismatch between {nu} and {mu}")));
    }
    if nu == mu {
        return Ok(Comparison::Equal);
    }
    let mut xs = nu.breakpoints();
    xs.extend(mu.breakpoints());
    let (mut above, mut below) = (false, false);
    for x in xs {
        let x = Rational64::from(x as i64);
        let (a, b) = (nu.value_at(x), mu.value_at(x));
        if a > b {
            above = true;
        }
        if a < b {
            below = true;
        }
    }
    Ok(match (above, below) {
        (true, false) => Comparison::Above,
        (false, true) => Comparison::Below,
        _ => Comparison::Incomparable,
    })
}

/// The basic polygons for m = 5 families of relative dimension 2: ord²⊕ss²
/// when p ≡ 1 mod 5 and ss⁴ otherwise.
pub fn basic_polygon_m5(p_mod_5: u64) -> NewtonPolygon {
    if p_mod_5 == 1 {
        NewtonPolygon::ordinary(2).union(&NewtonPolygon::supersingular(2))
    } else {
        NewtonPolygon::supersingular(4)
    }
}
