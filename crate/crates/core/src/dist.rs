//! Exact finite-distribution machinery.
//!
//! Flat sources, explicit pmfs and joint distributions over bit-string
//! coordinates, with every probability held as an exact rational. The
//! non-malleability experiment lives here: `nm_joint` enumerates the full
//! (source x seed) product and `nm_error` is statistical distance from the
//! first coordinate replaced by an independent uniform string.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::adversary::TableAdversary;
use crate::error::{Error, Result};

/// Exact probability type used everywhere until a report boundary.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_u128(num: u128, den: u128) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Default cap on (source support) x (seed support) pairs for exact
/// enumeration; past this the harness falls back to Monte Carlo.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 28;

// ---------------------------------------------------------------------------

/// Uniform distribution over a support set of n-bit values: the canonical
/// source shape, with min-entropy exactly log2 of the support size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSource {
    n_bits: usize,
    support: Vec<u64>,
}

impl FlatSource {
    pub fn new(n_bits: usize, mut support: Vec<u64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidParam("flat source with empty support".into()));
        }
        if n_bits > 64 {
            return Err(Error::InvalidParam(format!("flat source width {n_bits} > 64")));
        }
        support.sort_unstable();
        support.dedup();
        if let Some(&max) = support.last() {
            if n_bits < 64 && max >= (1u64 << n_bits) {
                return Err(Error::InvalidParam(format!(
                    "support value {max:#x} exceeds {n_bits} bits"
                )));
            }
        }
        Ok(FlatSource { n_bits, support })
    }

    pub fn full_cube(n_bits: usize) -> Self {
        assert!(n_bits <= 26, "full cube only materialized at small widths");
        FlatSource {
            n_bits,
            support: (0..1u64 << n_bits).collect(),
        }
    }

    /// Uniform on a random 2^k-element subset, drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(n_bits: usize, k: u32, rng: &mut R) -> Self {
        assert!((k as usize) <= n_bits && n_bits <= 63);
        let size = 1u64 << k;
        let space = 1u64 << n_bits;
        let support: Vec<u64> = if n_bits <= 20 {
            let mut all: Vec<u64> = (0..space).collect();
            all.shuffle(rng);
            all.truncate(size as usize);
            all
        } else {
            let mut set = std::collections::HashSet::with_capacity(size as usize);
            while (set.len() as u64) < size {
                set.insert(rng.gen_range(0..space));
            }
            set.into_iter().collect()
        };
        FlatSource::new(n_bits, support).unwrap()
    }

    /// All n-bit strings whose top `zeros` bits are zero: the inner-product
    /// counterexample source shape.
    pub fn prefix_zero(n_bits: usize, zeros: usize) -> Self {
        assert!(zeros < n_bits && n_bits - zeros <= 26);
        FlatSource {
            n_bits,
            support: (0..1u64 << (n_bits - zeros)).collect(),
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn min_entropy(&self) -> f64 {
        (self.support.len() as f64).log2()
    }

    pub fn to_explicit(&self) -> ExplicitDist {
        let p = q_u128(1, self.support.len() as u128);
        ExplicitDist {
            n_bits: self.n_bits,
            pmf: self.support.iter().map(|&v| (v, p.clone())).collect(),
        }
    }
}

// ---------------------------------------------------------------------------

/// Finite distribution on n-bit values with exact rational probabilities
/// summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitDist {
    n_bits: usize,
    pmf: BTreeMap<u64, Q>,
}

impl ExplicitDist {
    pub fn new(n_bits: usize, pmf: BTreeMap<u64, Q>) -> Result<Self> {
        let mut total = Q::zero();
        for (&v, p) in &pmf {
            if p.is_negative() {
                return Err(Error::InvalidParam(format!("negative probability at {v}")));
            }
            if n_bits < 64 && v >= (1u64 << n_bits) {
                return Err(Error::InvalidParam(format!("value {v:#x} exceeds {n_bits} bits")));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidParam(format!("pmf sums to {total}, not 1")));
        }
        let pmf = pmf.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Ok(ExplicitDist { n_bits, pmf })
    }

    pub fn uniform(n_bits: usize) -> Self {
        assert!(n_bits <= 26);
        let p = q_u128(1, 1u128 << n_bits);
        ExplicitDist {
            n_bits,
            pmf: (0..1u64 << n_bits).map(|v| (v, p.clone())).collect(),
        }
    }

    pub fn point_mass(n_bits: usize, v: u64) -> Self {
        ExplicitDist {
            n_bits,
            pmf: BTreeMap::from([(v, Q::one())]),
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn pmf(&self) -> &BTreeMap<u64, Q> {
        &self.pmf
    }

    pub fn prob(&self, v: u64) -> Q {
        self.pmf.get(&v).cloned().unwrap_or_else(Q::zero)
    }

    pub fn max_prob(&self) -> Q {
        self.pmf.values().max().cloned().unwrap_or_else(Q::zero)
    }

    /// Min-entropy, -log2 of the maximum point probability.
    pub fn min_entropy(&self) -> f64 {
        -self.max_prob().to_f64().expect("finite rational").log2()
    }

    /// Exact half-L1 distance.
    pub fn stat_dist(&self, other: &ExplicitDist) -> Result<Q> {
        if self.n_bits != other.n_bits {
            return Err(Error::DimensionMismatch(self.n_bits, other.n_bits));
        }
        let mut total = Q::zero();
        for (&v, p) in &self.pmf {
            total += (p - other.prob(v)).abs();
        }
        for (&v, p) in &other.pmf {
            if !self.pmf.contains_key(&v) {
                total += p.abs();
            }
        }
        Ok(total / q(2, 1))
    }

    /// JSON shape used by harness reports: {n_bits, entries: [[value, num, den], ...]}.
    /// Numerator and denominator degrade to decimal strings when they do not
    /// fit in a u64.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .pmf
            .iter()
            .map(|(&v, p)| {
                serde_json::json!([v, big_to_json(p.numer()), big_to_json(p.denom())])
            })
            .collect();
        serde_json::json!({ "n_bits": self.n_bits, "entries": entries })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParam(format!("distribution json: {m}"));
        let n_bits = value["n_bits"].as_u64().ok_or_else(|| bad("missing n_bits"))? as usize;
        let mut pmf = BTreeMap::new();
        for e in value["entries"].as_array().ok_or_else(|| bad("missing entries"))? {
            let v = e[0].as_u64().ok_or_else(|| bad("bad value"))?;
            let num = json_to_big(&e[1]).ok_or_else(|| bad("bad numerator"))?;
            let den = json_to_big(&e[2]).ok_or_else(|| bad("bad denominator"))?;
            pmf.insert(v, Q::new(num, den));
        }
        ExplicitDist::new(n_bits, pmf)
    }
}

fn big_to_json(b: &BigInt) -> serde_json::Value {
    match b.to_u64() {
        Some(v) => serde_json::json!(v),
        None => serde_json::json!(b.to_string()),
    }
}

fn json_to_big(v: &serde_json::Value) -> Option<BigInt> {
    if let Some(u) = v.as_u64() {
        Some(BigInt::from(u))
    } else {
        v.as_str()?.parse().ok()
    }
}

// ---------------------------------------------------------------------------

/// Joint distribution over a tuple of bit-string coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDist {
    widths: Vec<usize>,
    pmf: BTreeMap<Vec<u64>, Q>,
}

impl JointDist {
    pub fn new(widths: Vec<usize>, pmf: BTreeMap<Vec<u64>, Q>) -> Result<Self> {
        let mut total = Q::zero();
        for (key, p) in &pmf {
            if key.len() != widths.len() {
                return Err(Error::InvalidParam("key arity mismatch".into()));
            }
            for (i, (&v, &w)) in key.iter().zip(&widths).enumerate() {
                if w < 64 && v >= (1u64 << w) {
                    return Err(Error::InvalidCoordinate(i));
                }
            }
            if p.is_negative() {
                return Err(Error::InvalidParam("negative probability".into()));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidParam(format!("pmf sums to {total}, not 1")));
        }
        let pmf = pmf.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Ok(JointDist { widths, pmf })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn pmf(&self) -> &BTreeMap<Vec<u64>, Q> {
        &self.pmf
    }

    pub fn arity(&self) -> usize {
        self.widths.len()
    }

    fn check_coords(&self, coords: &[usize]) -> Result<()> {
        for &c in coords {
            if c >= self.arity() {
                return Err(Error::InvalidCoordinate(c));
            }
        }
        Ok(())
    }

    /// Marginal over the selected coordinates, in the order given.
    pub fn marginal(&self, coords: &[usize]) -> Result<JointDist> {
        self.check_coords(coords)?;
        let mut pmf: BTreeMap<Vec<u64>, Q> = BTreeMap::new();
        for (key, p) in &self.pmf {
            let sub: Vec<u64> = coords.iter().map(|&c| key[c]).collect();
            *pmf.entry(sub).or_insert_with(Q::zero) += p;
        }
        Ok(JointDist {
            widths: coords.iter().map(|&c| self.widths[c]).collect(),
            pmf,
        })
    }

    /// Single-coordinate marginal as an explicit distribution.
    pub fn coordinate(&self, c: usize) -> Result<ExplicitDist> {
        self.check_coords(&[c])?;
        let mut pmf: BTreeMap<u64, Q> = BTreeMap::new();
        for (key, p) in &self.pmf {
            *pmf.entry(key[c]).or_insert_with(Q::zero) += p;
        }
        Ok(ExplicitDist {
            n_bits: self.widths[c],
            pmf,
        })
    }

    pub fn stat_dist(&self, other: &JointDist) -> Result<Q> {
        if self.widths != other.widths {
            return Err(Error::DimensionMismatch(self.arity(), other.arity()));
        }
        let mut total = Q::zero();
        for (key, p) in &self.pmf {
            let q2 = other.pmf.get(key).cloned().unwrap_or_else(Q::zero);
            total += (p - q2).abs();
        }
        for (key, p) in &other.pmf {
            if !self.pmf.contains_key(key) {
                total += p.abs();
            }
        }
        Ok(total / q(2, 1))
    }

    /// E_w[max_x Pr[X=x, W=w]] with X = `target`, W = the `given` tuple;
    /// this equals 2^(-avg conditional min-entropy).
    pub fn avg_cond_max_prob(&self, target: usize, given: &[usize]) -> Result<Q> {
        self.check_coords(&[target])?;
        self.check_coords(given)?;
        if given.contains(&target) {
            return Err(Error::InvalidCoordinate(target));
        }
        let mut coords = vec![target];
        coords.extend_from_slice(given);
        let marg = self.marginal(&coords)?;
        // group by the given-projection, take max joint mass over target
        let mut best: HashMap<Vec<u64>, Q> = HashMap::new();
        for (key, p) in &marg.pmf {
            let w: Vec<u64> = key[1..].to_vec();
            let e = best.entry(w).or_insert_with(Q::zero);
            if p > e {
                *e = p.clone();
            }
        }
        Ok(best.into_values().sum())
    }

    /// Average conditional min-entropy in bits.
    pub fn avg_cond_min_entropy(&self, target: usize, given: &[usize]) -> Result<f64> {
        let e = self.avg_cond_max_prob(target, given)?;
        Ok(-e.to_f64().expect("finite rational").log2())
    }
}

// ---------------------------------------------------------------------------
// The non-malleability experiment.

/// Exact joint distribution of (ext(X,Y), ext(X,A_1(Y)), ..., ext(X,A_r(Y)), Y)
/// by enumeration over support(X) x support(Y).
///
/// `ext` maps (source value, seed value) to an m-bit output; adversaries act
/// on the seed values, which must lie inside each adversary's table domain.
pub fn nm_joint<F>(
    ext: &F,
    m_bits: usize,
    x: &FlatSource,
    yd: &ExplicitDist,
    advs: &[&TableAdversary],
    cap: u128,
) -> Result<JointDist>
where
    F: Fn(u64, u64) -> u64 + Sync,
{
    let pairs = x.support.len() as u128 * yd.pmf.len() as u128;
    if pairs > cap {
        return Err(Error::EnumerationBudgetExceeded { needed: pairs, cap });
    }
    for &y in yd.pmf.keys() {
        for a in advs {
            if y >= a.domain_size() as u64 {
                return Err(Error::InvalidParam(format!(
                    "seed value {y} outside adversary domain of size {}",
                    a.domain_size()
                )));
            }
            // fixed-point freeness is structural for TableAdversary; assert anyway
            debug_assert_ne!(a.apply(y), y);
        }
    }
    let r = advs.len();
    let total_bits = (r + 1) * m_bits + yd.n_bits;
    if total_bits > 64 {
        return Err(Error::InvalidParam(format!(
            "joint key needs {total_bits} bits; keep (r+1)*m + seed bits <= 64"
        )));
    }

    // Integer weights over a common denominator keep the hot loop allocation
    // free. Seed y contributes weight numer(P(y) * D); cells divide by D*|X|.
    let mut denom = BigInt::one();
    for p in yd.pmf.values() {
        denom = num_integer::lcm(denom, p.denom().clone());
    }
    let seeds: Vec<(u64, u128)> = yd
        .pmf
        .iter()
        .map(|(&y, p)| {
            let w = (p * Q::from_integer(denom.clone()))
                .to_integer()
                .to_u128()
                .ok_or_else(|| Error::InvalidParam("seed weight exceeds u128".into()))?;
            Ok((y, w))
        })
        .collect::<Result<_>>()?;

    let accumulate = |xs: &[u64]| -> HashMap<u64, u128> {
        let mut acc: HashMap<u64, u128> = HashMap::new();
        for &xv in xs {
            for &(y, w) in &seeds {
                let mut key = ext(xv, y);
                debug_assert!(m_bits == 64 || key < (1u64 << m_bits));
                let mut shift = m_bits;
                for a in advs {
                    key |= ext(xv, a.apply(y)) << shift;
                    shift += m_bits;
                }
                key |= y << shift;
                *acc.entry(key).or_insert(0) += w;
            }
        }
        acc
    };

    let chunk = (x.support.len() / rayon::current_num_threads().max(1)).max(1);
    let merged: HashMap<u64, u128> = x
        .support
        .par_chunks(chunk)
        .map(accumulate)
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let joint_denom = BigInt::from(x.support.len()) * denom;
    let mut widths = vec![m_bits; r + 1];
    widths.push(yd.n_bits);
    let mask = if m_bits == 64 { u64::MAX } else { (1u64 << m_bits) - 1 };
    let mut pmf = BTreeMap::new();
    for (packed, count) in merged {
        let mut key = Vec::with_capacity(r + 2);
        let mut v = packed;
        for _ in 0..=r {
            key.push(v & mask);
            v >>= m_bits;
        }
        key.push(v);
        pmf.insert(key, Q::new(BigInt::from(count), joint_denom.clone()));
    }
    JointDist::new(widths, pmf)
}

/// Statistical distance between the joint and the same joint with its first
/// coordinate replaced by an independent uniform m-bit string.
pub fn nm_error(j: &JointDist) -> Result<Q> {
    let m = *j.widths.first().ok_or(Error::InvalidCoordinate(0))?;
    let rest: Vec<usize> = (1..j.arity()).collect();
    let marg = j.marginal(&rest)?;
    let cells = 1u128 << m;
    let unif = q_u128(1, cells);
    let mut total = Q::zero();
    for (rkey, rp) in &marg.pmf {
        let ideal = rp * &unif;
        for z in 0..cells as u64 {
            let mut key = Vec::with_capacity(j.arity());
            key.push(z);
            key.extend_from_slice(rkey);
            let actual = j.pmf.get(&key).cloned().unwrap_or_else(Q::zero);
            total += (actual - &ideal).abs();
        }
    }
    Ok(total / q(2, 1))
}

/// Per-seed errors: the last coordinate is read as the seed, and for each
/// seed value y the conditional distance of (first coord | y) from
/// (uniform x rest | y) is returned together with Pr[Y = y].
pub fn nm_error_per_seed(j: &JointDist) -> Result<BTreeMap<u64, (Q, Q)>> {
    let seed_coord = j.arity() - 1;
    let m = j.widths[0];
    let cells = 1u128 << m;
    let unif = q_u128(1, cells);

    // conditional pmfs grouped by seed value
    let mut by_seed: BTreeMap<u64, Vec<(&Vec<u64>, &Q)>> = BTreeMap::new();
    let mut seed_mass: BTreeMap<u64, Q> = BTreeMap::new();
    for (key, p) in &j.pmf {
        by_seed.entry(key[seed_coord]).or_default().push((key, p));
        *seed_mass.entry(key[seed_coord]).or_insert_with(Q::zero) += p;
    }

    let mut out = BTreeMap::new();
    for (y, cells_y) in by_seed {
        let py = seed_mass[&y].clone();
        // rest-marginal within this seed slice
        let mut rest_marg: HashMap<Vec<u64>, Q> = HashMap::new();
        for (key, p) in &cells_y {
            let rkey: Vec<u64> = key[1..].to_vec();
            *rest_marg.entry(rkey).or_insert_with(Q::zero) += *p;
        }
        let mut total = Q::zero();
        for (rkey, rp) in &rest_marg {
            let ideal = rp * &unif;
            for z in 0..cells as u64 {
                let mut key = Vec::with_capacity(j.arity());
                key.push(z);
                key.extend_from_slice(rkey);
                let actual = j.pmf.get(&key).cloned().unwrap_or_else(Q::zero);
                total += (actual - &ideal).abs();
            }
        }
        // conditional distance: divide the slice mass out
        out.insert(y, (total / q(2, 1) / &py, py));
    }
    Ok(out)
}

/// Bias of the XOR of chosen bits across the first two coordinates:
/// 2 * |Pr[xor = 0] - 1/2|.
pub fn xor_bias(j: &JointDist, s1: &[usize], s2: &[usize]) -> Result<Q> {
    if s1.is_empty() {
        return Err(Error::EmptySubset);
    }
    if j.arity() < 2 {
        return Err(Error::InvalidCoordinate(1));
    }
    let (m1, m2) = (j.widths[0], j.widths[1]);
    let mask = |bits: &[usize], width: usize| -> Result<u64> {
        let mut m = 0u64;
        for &b in bits {
            if b >= width {
                return Err(Error::InvalidCoordinate(b));
            }
            m |= 1 << b;
        }
        Ok(m)
    };
    let (mask1, mask2) = (mask(s1, m1)?, mask(s2, m2)?);
    let mut p0 = Q::zero();
    for (key, p) in &j.pmf {
        let parity =
            ((key[0] & mask1).count_ones() + (key[1] & mask2).count_ones()) % 2;
        if parity == 0 {
            p0 += p;
        }
    }
    Ok((p0 - q(1, 2)).abs() * q(2, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractors::ip_f2_u64;

    #[test]
    fn min_entropy_examples() {
        let u3 = ExplicitDist::uniform(3);
        assert_eq!(u3.min_entropy(), 3.0);
        let pm = ExplicitDist::point_mass(4, 9);
        assert_eq!(pm.min_entropy(), 0.0);
        let d = ExplicitDist::new(
            2,
            BTreeMap::from([(0, q(1, 2)), (1, q(1, 4)), (2, q(1, 4))]),
        )
        .unwrap();
        assert_eq!(d.min_entropy(), 1.0);
    }

    #[test]
    fn stat_dist_examples() {
        let u1 = ExplicitDist::uniform(1);
        let p0 = ExplicitDist::point_mass(1, 0);
        assert_eq!(u1.stat_dist(&p0).unwrap(), q(1, 2));
        assert!(u1.stat_dist(&u1).unwrap().is_zero());

        let u2 = ExplicitDist::uniform(2);
        let tri = ExplicitDist::new(
            2,
            BTreeMap::from([(0, q(1, 3)), (1, q(1, 3)), (2, q(1, 3))]),
        )
        .unwrap();
        assert_eq!(u2.stat_dist(&tri).unwrap(), q(1, 4));
        assert!(u2.stat_dist(&ExplicitDist::uniform(3)).is_err());
    }

    fn joint_of_fn(
        widths: Vec<usize>,
        entries: Vec<(Vec<u64>, Q)>,
    ) -> JointDist {
        JointDist::new(widths, entries.into_iter().collect()).unwrap()
    }

    #[test]
    fn avg_cond_min_entropy_examples() {
        // X uniform on 2 bits, W = top bit of X
        let mut entries = Vec::new();
        for x in 0..4u64 {
            entries.push((vec![x, x >> 1], q(1, 4)));
        }
        let j = joint_of_fn(vec![2, 1], entries);
        assert_eq!(j.avg_cond_min_entropy(0, &[1]).unwrap(), 1.0);

        // independent W
        let mut entries = Vec::new();
        for x in 0..4u64 {
            for w in 0..2u64 {
                entries.push((vec![x, w], q(1, 8)));
            }
        }
        let j = joint_of_fn(vec![2, 1], entries);
        assert_eq!(j.avg_cond_min_entropy(0, &[1]).unwrap(), 2.0);

        // W = X
        let entries = (0..8u64).map(|x| (vec![x, x], q(1, 8))).collect();
        let j = joint_of_fn(vec![3, 3], entries);
        assert_eq!(j.avg_cond_min_entropy(0, &[1]).unwrap(), 0.0);
    }

    #[test]
    fn nm_joint_smoke_single_bit_parity() {
        // no adversaries, ext = parity of x AND y, X the full cube
        let x = FlatSource::full_cube(3);
        let yd = ExplicitDist::uniform(3);
        let ext = |xv: u64, yv: u64| ip_f2_u64(xv, yv) as u64;
        let j = nm_joint(&ext, 1, &x, &yd, &[], DEFAULT_ENUM_CAP).unwrap();
        // per nonzero seed the output is exactly unbiased; conditioned on
        // y = 0 it is constant, so the error is the y = 0 slice mass / 2
        let err = nm_error(&j).unwrap();
        assert_eq!(err, q(1, 16));
        let per_seed = nm_error_per_seed(&j).unwrap();
        assert_eq!(per_seed[&0].0, q(1, 2));
        for y in 1..8 {
            assert!(per_seed[&y].0.is_zero());
        }
    }

    #[test]
    fn ip_counterexample_is_exactly_half() {
        for n in [4usize, 8] {
            let x = FlatSource::prefix_zero(n, 1);
            let yd = ExplicitDist::uniform(n);
            let adv = TableAdversary::flip_top_bit(n as u32);
            let ext = |xv: u64, yv: u64| ip_f2_u64(xv, yv) as u64;
            let j = nm_joint(&ext, 1, &x, &yd, &[&adv], DEFAULT_ENUM_CAP).unwrap();
            // the tampered copy equals the real output on every sample
            for key in j.pmf().keys() {
                assert_eq!(key[0], key[1]);
            }
            assert_eq!(nm_error(&j).unwrap(), q(1, 2));
        }
    }

    #[test]
    fn nm_joint_single_source_point_is_deterministic_in_y() {
        let x = FlatSource::new(3, vec![0b101]).unwrap();
        let yd = ExplicitDist::uniform(3);
        let adv = TableAdversary::offset(3, 1).unwrap();
        let ext = |xv: u64, yv: u64| ip_f2_u64(xv, yv) as u64;
        let j = nm_joint(&ext, 1, &x, &yd, &[&adv], DEFAULT_ENUM_CAP).unwrap();
        // one (z, z') pair per seed value
        assert_eq!(j.pmf().len(), 8);
    }

    #[test]
    fn nm_joint_enforces_the_enumeration_cap() {
        let x = FlatSource::full_cube(4);
        let yd = ExplicitDist::uniform(4);
        let ext = |xv: u64, yv: u64| ip_f2_u64(xv, yv) as u64;
        assert!(matches!(
            nm_joint(&ext, 1, &x, &yd, &[], 100),
            Err(Error::EnumerationBudgetExceeded { needed: 256, cap: 100 })
        ));
    }

    #[test]
    fn nm_error_of_product_form_is_zero() {
        // (U_1, Y): uniform bit independent of uniform 2-bit Y
        let mut entries = Vec::new();
        for z in 0..2u64 {
            for y in 0..4u64 {
                entries.push((vec![z, y], q(1, 8)));
            }
        }
        let j = joint_of_fn(vec![1, 2], entries);
        assert!(nm_error(&j).unwrap().is_zero());
    }

    #[test]
    fn one_bit_tv_identity() {
        // single-bit output, no conditioning: error = bias / 2
        let j = joint_of_fn(
            vec![1],
            vec![(vec![0], q(3, 4)), (vec![1], q(1, 4))],
        );
        // bias = |E[(-1)^Z]| = 1/2, error = 1/4
        assert_eq!(nm_error(&j).unwrap(), q(1, 4));
    }

    #[test]
    fn xor_bias_examples() {
        // independent uniform blocks
        let mut entries = Vec::new();
        for a in 0..4u64 {
            for b in 0..4u64 {
                entries.push((vec![a, b], q(1, 16)));
            }
        }
        let j = joint_of_fn(vec![2, 2], entries);
        assert!(xor_bias(&j, &[0, 1], &[1]).unwrap().is_zero());

        // Z' = Z, m = 1: XOR is constant zero
        let j = joint_of_fn(
            vec![1, 1],
            vec![(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))],
        );
        assert_eq!(xor_bias(&j, &[0], &[0]).unwrap(), q(1, 1));
        assert_eq!(xor_bias(&j, &[], &[0]).unwrap_err(), Error::EmptySubset);
    }

    #[test]
    fn json_round_trip() {
        let d = ExplicitDist::new(
            2,
            BTreeMap::from([(0, q(1, 3)), (3, q(2, 3))]),
        )
        .unwrap();
        let j = d.to_json();
        assert_eq!(ExplicitDist::from_json(&j).unwrap(), d);
    }
}
