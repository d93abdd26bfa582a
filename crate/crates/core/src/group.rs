//! The group `G = Z/d ⋊ (Z/d)^×` with `(a1, b1)(a2, b2) = (a1 + a2 b1, b1 b2)`,
//! the Galois group of `K(ζ_d, α)/K` for `α^d ∈ K` when `[K(ζ_d):K] = d - 1`.
//! `(a, b)` acts by `ζ ↦ ζ^b`, `α ↦ ζ^a α`.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::is_prime_u64;

pub const MAX_CENSUS_D: u64 = 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElem {
    pub a: u64,
    pub b: u64,
}

impl GroupElem {
    pub fn new(d: u64, a: u64, b: u64) -> Result<GroupElem> {
        if d < 2 || a >= d || b >= d || gcd(b, d) != 1 {
            return Err(Error::InvalidInput(format!("({a}, {b}) is not an element mod {d}")));
        }
        Ok(GroupElem { a, b })
    }

    pub fn identity() -> GroupElem {
        GroupElem { a: 0, b: 1 }
    }
}

fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

fn pow_mod(mut b: u64, mut e: u64, d: u64) -> u64 {
    let mut r = 1 % d;
    b %= d;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % d;
        }
        b = b * b % d;
        e >>= 1;
    }
    r
}

fn inv_mod(x: u64, d: u64) -> u64 {
    // d is prime in every caller that needs this
    pow_mod(x, d - 2, d)
}

pub fn multiply(d: u64, g1: GroupElem, g2: GroupElem) -> GroupElem {
    GroupElem { a: (g1.a + g2.a * g1.b) % d, b: g1.b * g2.b % d }
}

pub fn inverse(d: u64, g: GroupElem) -> GroupElem {
    let bi = inv_mod(g.b, d);
    GroupElem { a: (d - g.a * bi % d) % d, b: bi }
}

/// `g^s`. For `b ≠ 1` this is `(a (b^s - 1)/(b - 1), b^s)`; for `b = 1` it
/// is `(s a, 1)`. `d` must be prime.
pub fn power(d: u64, g: GroupElem, s: u64) -> GroupElem {
    let bs = pow_mod(g.b, s, d);
    if g.b == 1 {
        return GroupElem { a: g.a * (s % d) % d, b: 1 };
    }
    let geom = (bs + d - 1) % d * inv_mod(g.b + d - 1, d) % d;
    GroupElem { a: g.a * geom % d, b: bs }
}

/// `g^s` by repeated multiplication.
pub fn power_iterated(d: u64, g: GroupElem, s: u64) -> GroupElem {
    (0..s).fold(GroupElem::identity(), |acc, _| multiply(d, acc, g))
}

pub fn elements(d: u64) -> Vec<GroupElem> {
    let mut out = Vec::new();
    for b in 1..d {
        if gcd(b, d) == 1 {
            for a in 0..d {
                out.push(GroupElem { a, b });
            }
        }
    }
    out
}

/// Subset of `G` as a bitset indexed by `a + d b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(d: u64) -> Bits {
        Bits(vec![0; ((d * d) as usize).div_ceil(64)])
    }
    fn idx(d: u64, g: GroupElem) -> usize {
        (g.a + d * g.b) as usize
    }
    fn insert(&mut self, d: u64, g: GroupElem) -> bool {
        let i = Self::idx(d, g);
        let fresh = self.0[i / 64] >> (i % 64) & 1 == 0;
        self.0[i / 64] |= 1 << (i % 64);
        fresh
    }
    fn contains(&self, d: u64, g: GroupElem) -> bool {
        let i = Self::idx(d, g);
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(x, y)| x & !y == 0)
    }
    fn members(&self, d: u64) -> Vec<GroupElem> {
        let mut out = Vec::new();
        for (w, word) in self.0.iter().enumerate() {
            let mut x = *word;
            while x != 0 {
                let i = (w * 64) as u64 + x.trailing_zeros() as u64;
                out.push(GroupElem { a: i % d, b: i / d });
                x &= x - 1;
            }
        }
        out.sort_by_key(|g| (g.b, g.a));
        out
    }
}

/// Closure of a generating set under multiplication (finite group, so this
/// is the generated subgroup).
fn closure(d: u64, gens: &[GroupElem]) -> Bits {
    let mut set = Bits::empty(d);
    let mut queue = vec![GroupElem::identity()];
    set.insert(d, GroupElem::identity());
    while let Some(x) = queue.pop() {
        for &g in gens {
            let y = multiply(d, x, g);
            if set.insert(d, y) {
                queue.push(y);
            }
        }
    }
    set
}

fn check_d(d: u64) -> Result<()> {
    if d.is_multiple_of(2) || !is_prime_u64(d) {
        return Err(Error::UnsupportedD(d));
    }
    if d > MAX_CENSUS_D {
        return Err(Error::BudgetExceeded(format!(
            "census limited to d <= {MAX_CENSUS_D}, got {d}"
        )));
    }
    Ok(())
}

/// All subgroups generated by at most two elements. `G` has a normal cyclic
/// subgroup with cyclic quotient, so this is every subgroup.
fn two_generated_subgroups(d: u64) -> Vec<Bits> {
    let els = elements(d);
    let mut cyclic: Vec<(GroupElem, Bits)> = Vec::new();
    let mut seen = HashSet::new();
    for &g in &els {
        let c = closure(d, &[g]);
        if seen.insert(c.clone()) {
            cyclic.push((g, c));
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..cyclic.len()).flat_map(|i| (i + 1..cyclic.len()).map(move |j| (i, j))).collect();
    let joined: Vec<Bits> = pairs
        .par_iter()
        .map(|&(i, j)| closure(d, &[cyclic[i].0, cyclic[j].0]))
        .collect();
    for s in joined {
        seen.insert(s);
    }
    let mut all: Vec<Bits> = seen.into_iter().collect();
    all.sort_by_key(|s| {
        let m = s.members(d);
        (m.len(), m)
    });
    all
}

/// Every subgroup, by repeatedly adjoining single elements to known
/// subgroups until nothing new appears. Slow; used to cross-check the
/// two-generator census on small `d`.
pub fn all_subgroups_by_extension(d: u64) -> Result<Vec<Vec<GroupElem>>> {
    check_d(d)?;
    let els = elements(d);
    let mut known: HashSet<Bits> = HashSet::new();
    let mut frontier = vec![closure(d, &[])];
    known.insert(frontier[0].clone());
    while let Some(h) = frontier.pop() {
        let gens = h.members(d);
        for &g in &els {
            if h.contains(d, g) {
                continue;
            }
            let mut with = gens.clone();
            with.push(g);
            let k = closure(d, &with);
            if known.insert(k.clone()) {
                frontier.push(k);
            }
        }
    }
    let mut out: Vec<Vec<GroupElem>> = known.iter().map(|s| s.members(d)).collect();
    out.sort_by_key(|m| (m.len(), m.clone()));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusClaims {
    /// Exactly one subgroup of order `d`.
    pub unique_order_d: bool,
    /// That subgroup is the kernel `{(a, 1)}` of `(a, b) ↦ b`.
    pub order_d_is_kernel: bool,
    /// Exactly `d` subgroups of order `d - 1`.
    pub d_subgroups_of_order_d_minus_1: bool,
    /// Every subgroup of order divisible by `d` contains the order-`d` one.
    pub divisible_contains_kernel: bool,
    /// Every subgroup of order prime to `d` lies in one of order `d - 1`.
    pub coprime_in_complement: bool,
}

impl CensusClaims {
    pub fn all(&self) -> bool {
        self.unique_order_d
            && self.order_d_is_kernel
            && self.d_subgroups_of_order_d_minus_1
            && self.divisible_contains_kernel
            && self.coprime_in_complement
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupCensus {
    pub d: u64,
    pub group_order: u64,
    pub subgroups: Vec<Vec<GroupElem>>,
    pub counts_by_order: BTreeMap<u64, usize>,
    pub claims: CensusClaims,
}

pub fn subgroup_census(d: u64) -> Result<SubgroupCensus> {
    check_d(d)?;
    let subs = two_generated_subgroups(d);
    let order = d * (d - 1);
    let sizes: Vec<u64> = subs.iter().map(|s| s.members(d).len() as u64).collect();
    let mut counts_by_order = BTreeMap::new();
    for &n in &sizes {
        *counts_by_order.entry(n).or_insert(0usize) += 1;
    }
    let of_order = |n: u64| -> Vec<&Bits> {
        subs.iter().zip(&sizes).filter(|(_, &m)| m == n).map(|(s, _)| s).collect()
    };
    let normal = of_order(d);
    let complements = of_order(d - 1);
    let mut kernel = Bits::empty(d);
    for a in 0..d {
        kernel.insert(d, GroupElem { a, b: 1 });
    }
    let divisible_contains_kernel = subs
        .iter()
        .zip(&sizes)
        .filter(|(_, &m)| m % d == 0)
        .all(|(s, _)| kernel.is_subset(s));
    let coprime_in_complement = subs
        .iter()
        .zip(&sizes)
        .filter(|(_, &m)| m % d != 0)
        .all(|(s, _)| complements.iter().any(|c| s.is_subset(c)));
    let claims = CensusClaims {
        unique_order_d: normal.len() == 1,
        order_d_is_kernel: normal.len() == 1 && *normal[0] == kernel,
        d_subgroups_of_order_d_minus_1: complements.len() as u64 == d,
        divisible_contains_kernel,
        coprime_in_complement,
    };
    debug_assert!(sizes.iter().all(|m| order.is_multiple_of(*m)));
    Ok(SubgroupCensus {
        d,
        group_order: order,
        subgroups: subs.iter().map(|s| s.members(d)).collect(),
        counts_by_order,
        claims,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum FieldClass {
    /// Fixed field lies inside `K(ζ_d)`.
    InsideCyclotomic,
    /// Fixed field contains `K(ζ_d^k α)`.
    ContainsRadical { k: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldEntry {
    pub subgroup_order: u64,
    /// `[F : K] = [G : H]`.
    pub degree: u64,
    pub label: Option<String>,
    pub class: FieldClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldLattice {
    pub d: u64,
    /// The degree-`d` fields `K(ζ^k α)`, one per subgroup of order `d - 1`.
    pub degree_d_fields: Vec<String>,
    /// The fixed field of the order-`d` subgroup.
    pub cyclotomic_field: String,
    pub cyclotomic_degree: u64,
    pub fields: Vec<FieldEntry>,
    /// Every intermediate field is in one of the two classes.
    pub dichotomy_holds: bool,
}

fn radical_label(k: u64) -> String {
    match k {
        0 => "K(α)".into(),
        1 => "K(ζα)".into(),
        k => format!("K(ζ^{k}α)"),
    }
}

/// `k` with `H = {(k(1 - b), b)}`, the stabiliser of `ζ^k α`.
fn complement_index(d: u64, h: &[GroupElem]) -> Option<u64> {
    let g = h.iter().find(|g| g.b != 1)?;
    let k = g.a * inv_mod((1 + d - g.b) % d, d) % d;
    h.iter().all(|x| x.a == k * ((1 + d - x.b) % d) % d).then_some(k)
}

/// Intermediate fields of `K(ζ_d, α)/K` through the Galois correspondence.
pub fn field_lattice_report(d: u64) -> Result<FieldLattice> {
    let census = subgroup_census(d)?;
    let order = census.group_order;
    let complements: Vec<(u64, &Vec<GroupElem>)> = census
        .subgroups
        .iter()
        .filter(|s| s.len() as u64 == d - 1)
        .map(|s| (complement_index(d, s).expect("order d-1 subgroups fix some ζ^k α"), s))
        .collect();
    let mut labels: Vec<(u64, String)> = complements.iter().map(|(k, _)| (*k, radical_label(*k))).collect();
    labels.sort();
    let mut fields = Vec::new();
    let mut dichotomy_holds = true;
    for s in &census.subgroups {
        let m = s.len() as u64;
        let class = if m.is_multiple_of(d) {
            FieldClass::InsideCyclotomic
        } else {
            match complements.iter().find(|(_, c)| s.iter().all(|g| c.contains(g))) {
                Some((k, _)) => FieldClass::ContainsRadical { k: *k },
                None => {
                    dichotomy_holds = false;
                    continue;
                }
            }
        };
        let label = if m == d - 1 {
            complement_index(d, s).map(radical_label)
        } else if m == d {
            Some("K(ζ)".into())
        } else if m == order {
            Some("K".into())
        } else if m == 1 {
            Some("K(ζ, α)".into())
        } else {
            None
        };
        fields.push(FieldEntry { subgroup_order: m, degree: order / m, label, class });
    }
    Ok(FieldLattice {
        d,
        degree_d_fields: labels.into_iter().map(|(_, l)| l).collect(),
        cyclotomic_field: "K(ζ)".into(),
        cyclotomic_degree: d - 1,
        fields,
        dichotomy_holds,
    })
}
