//! Adversary-family generation over finite seed domains.
//!
//! The worst case in the definitions quantifies over every fixed-point-free
//! function; that is enumerable only for domains of at most 8 values, where
//! there are (m-1)^m of them. Larger domains get structured families
//! (offsets, patched affine maps) and seeded random samples, and every
//! report produced from those is labeled family-max rather than worst-case.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::TableAdversary;
use crate::error::{Error, Result};
use crate::fields::Gf2Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversaryDomain {
    /// Seed strings: 0..2^bits.
    Pow2 { bits: u32 },
    /// Dense index space of the given size (field indices, F_p values).
    Dense { size: u64 },
}

impl AdversaryDomain {
    pub fn size(&self) -> u64 {
        match self {
            AdversaryDomain::Pow2 { bits } => 1u64 << bits,
            AdversaryDomain::Dense { size } => *size,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversaryFamily {
    /// Every fixed-point-free function; domains of at most 8 values.
    AllFunctions,
    /// y -> y xor c on power-of-two domains, cyclic shift on dense ones.
    Offset,
    /// z -> a*z + b over GF(2^ell), fixed point redirected to the next
    /// domain value.
    AffinePatched,
    RandomSample { count: u64 },
    /// The single flip-top-bit map that breaks plain inner product.
    Counterexample,
}

impl AdversaryFamily {
    pub fn label(&self) -> &'static str {
        match self {
            AdversaryFamily::AllFunctions => "all-functions",
            AdversaryFamily::Offset => "offset",
            AdversaryFamily::AffinePatched => "affine-patched",
            AdversaryFamily::RandomSample { .. } => "random-sample",
            AdversaryFamily::Counterexample => "counterexample",
        }
    }

    /// Worst-case coverage only holds when the whole function space was
    /// enumerated.
    pub fn is_complete(&self) -> bool {
        matches!(self, AdversaryFamily::AllFunctions)
    }
}

/// Iterator over all (m-1)^m fixed-point-free functions on m points:
/// digit j of the index in base m-1 picks A(j), skipping j itself.
struct AllFunctions {
    m: u64,
    next: u64,
    total: u64,
}

impl Iterator for AllFunctions {
    type Item = TableAdversary;

    fn next(&mut self) -> Option<TableAdversary> {
        if self.next >= self.total {
            return None;
        }
        let mut idx = self.next;
        self.next += 1;
        let mut table = Vec::with_capacity(self.m as usize);
        for j in 0..self.m {
            let d = idx % (self.m - 1);
            idx /= self.m - 1;
            let v = if d < j { d } else { d + 1 };
            table.push(v as u32);
        }
        Some(TableAdversary::new(table).expect("construction avoids the diagonal"))
    }
}

/// Next value in the dense domain after v, wrapping and skipping `avoid`.
fn redirect(v: u64, avoid: u64, size: u64) -> u64 {
    let mut w = (v + 1) % size;
    if w == avoid {
        w = (w + 1) % size;
    }
    w
}

fn offset_family(domain: AdversaryDomain) -> Vec<TableAdversary> {
    match domain {
        AdversaryDomain::Pow2 { bits } => (1..1u64 << bits)
            .map(|c| TableAdversary::offset(bits, c).unwrap())
            .collect(),
        AdversaryDomain::Dense { size } => (1..size)
            .map(|c| {
                TableAdversary::new(
                    (0..size).map(|y| ((y + c) % size) as u32).collect(),
                )
                .unwrap()
            })
            .collect(),
    }
}

/// a*z + b over GF(2^ell); on Pow2 domains the seed strings are the field,
/// on Dense domains of size 2^ell - 1 the indices shift by one to skip
/// zero. Outputs that leave the domain or fix a point are redirected to the
/// following domain value.
type FieldMap = Box<dyn Fn(u64) -> u64>;
type FieldUnmap = Box<dyn Fn(u64) -> Option<u64>>;

fn affine_family(domain: AdversaryDomain) -> Result<Vec<TableAdversary>> {
    let (ell, to_field, from_field): (u32, FieldMap, FieldUnmap) =
        match domain {
            AdversaryDomain::Pow2 { bits } => (
                bits,
                Box::new(|i| i),
                Box::new(Some),
            ),
            AdversaryDomain::Dense { size } => {
                let ell = (size + 1).trailing_zeros();
                if (1u64 << ell) - 1 != size {
                    return Err(Error::InvalidParam(
                        "affine family needs a field-sized dense domain (2^ell - 1)".into(),
                    ));
                }
                (ell, Box::new(|i| i + 1), Box::new(|z| z.checked_sub(1)))
            }
        };
    let ctx = Gf2Ctx::new(ell);
    let size = domain.size();
    let mut out = Vec::new();
    for a in 1..ctx.size() as u64 {
        for b in 0..ctx.size() as u64 {
            if a == 1 && b == 0 {
                continue; // identity
            }
            let table: Vec<u32> = (0..size)
                .map(|i| {
                    let z = to_field(i);
                    let w = ctx.add(ctx.mul(a, z), b);
                    let img = match from_field(w) {
                        Some(j) if j < size && j != i => j,
                        _ => redirect(i, i, size),
                    };
                    img as u32
                })
                .collect();
            out.push(TableAdversary::new(table).expect("patched to avoid the diagonal"));
        }
    }
    Ok(out)
}

fn random_family(domain: AdversaryDomain, count: u64, seed: u64) -> Vec<TableAdversary> {
    let size = domain.size();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let table: Vec<u32> = (0..size)
                .map(|y| {
                    let mut v = rng.gen_range(0..size - 1);
                    if v >= y {
                        v += 1;
                    }
                    v as u32
                })
                .collect();
            TableAdversary::new(table).unwrap()
        })
        .collect()
}

/// Materialize or stream a family over the given domain. AllFunctions
/// streams (it can reach millions of tables); the structured families are
/// small and returned eagerly.
pub fn gen_adversaries(
    family: &AdversaryFamily,
    domain: AdversaryDomain,
    seed: u64,
) -> Result<Box<dyn Iterator<Item = TableAdversary> + Send>> {
    let size = domain.size();
    if size > 1 << 20 {
        return Err(Error::EnumerationBudgetExceeded {
            needed: size as u128,
            cap: 1 << 20,
        });
    }
    if size < 2 {
        return Err(Error::InvalidParam("adversaries need at least two seed values".into()));
    }
    match family {
        AdversaryFamily::AllFunctions => {
            if size > 8 {
                return Err(Error::EnumerationBudgetExceeded {
                    needed: (size as u128 - 1).pow(size as u32),
                    cap: 7u128.pow(8),
                });
            }
            let total = (size - 1).pow(size as u32);
            Ok(Box::new(AllFunctions { m: size, next: 0, total }))
        }
        AdversaryFamily::Offset => Ok(Box::new(offset_family(domain).into_iter())),
        AdversaryFamily::AffinePatched => Ok(Box::new(affine_family(domain)?.into_iter())),
        AdversaryFamily::RandomSample { count } => {
            Ok(Box::new(random_family(domain, *count, seed).into_iter()))
        }
        AdversaryFamily::Counterexample => match domain {
            AdversaryDomain::Pow2 { bits } => {
                Ok(Box::new(std::iter::once(TableAdversary::flip_top_bit(bits))))
            }
            AdversaryDomain::Dense { .. } => Err(Error::InvalidParam(
                "the counterexample map is defined on bit-string domains".into(),
            )),
        },
    }
}
