//! Fuchsian signatures of cocompact groups without cusps or boundary.
//!
//! A signature is stored in compact form: a genus plus one class per
//! distinct elliptic period, each with a multiplicity. All arithmetic is
//! exact; the area measure lives in [`ExactRational`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::to_bigint;
use crate::error::{Error, Result};
use crate::ExactRational;

/// Compact Fuchsian signature `(g; m1^(n1), ..., mk^(nk))` with `s = t = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuchsianSignature {
    genus: BigUint,
    classes: BTreeMap<u64, BigUint>,
}

impl FuchsianSignature {
    /// Builds a signature from `(period, multiplicity)` pairs.
    ///
    /// Pairs with equal periods are merged and period-1 entries are dropped.
    /// A zero period or a zero multiplicity is rejected.
    pub fn new<I>(genus: impl Into<BigUint>, classes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, BigUint)>,
    {
        let mut merged: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (period, multiplicity) in classes {
            if period == 0 {
                return Err(Error::InvalidSignature("period 0".into()));
            }
            if multiplicity.is_zero() {
                return Err(Error::InvalidSignature(format!(
                    "period {period} with multiplicity 0"
                )));
            }
            if period == 1 {
                continue;
            }
            *merged.entry(period).or_default() += multiplicity;
        }
        Ok(FuchsianSignature {
            genus: genus.into(),
            classes: merged,
        })
    }

    /// Signature `(g; -)` of a closed surface group.
    pub fn surface(genus: impl Into<BigUint>) -> Self {
        FuchsianSignature {
            genus: genus.into(),
            classes: BTreeMap::new(),
        }
    }

    /// Full-form constructor `(g; m_1, ..., m_r; s; t)`.
    ///
    /// Only `s = t = 0` is representable.
    pub fn from_periods(
        genus: impl Into<BigUint>,
        periods: &[u64],
        cusps: u64,
        boundary: u64,
    ) -> Result<Self> {
        if cusps != 0 || boundary != 0 {
            return Err(Error::InvalidSignature(format!(
                "cusp count {cusps} and boundary count {boundary} must both be 0"
            )));
        }
        Self::new(genus, periods.iter().map(|&m| (m, BigUint::one())))
    }

    /// `(0; p, q, r)`.
    pub fn triangle(p: u64, q: u64, r: u64) -> Result<Self> {
        if p < 2 || q < 2 || r < 2 {
            return Err(Error::InvalidSignature(format!(
                "triangle periods ({p}, {q}, {r}) must be >= 2"
            )));
        }
        Self::from_periods(0u32, &[p, q, r], 0, 0)
    }

    pub fn genus(&self) -> &BigUint {
        &self.genus
    }

    /// Classes in ascending period order.
    pub fn classes(&self) -> impl Iterator<Item = (u64, &BigUint)> + '_ {
        self.classes.iter().map(|(&m, n)| (m, n))
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn multiplicity(&self, period: u64) -> Option<&BigUint> {
        self.classes.get(&period)
    }

    pub fn periods(&self) -> impl Iterator<Item = u64> + '_ {
        self.classes.keys().copied()
    }

    /// Periods occurring exactly once, ascending.
    pub fn singleton_periods(&self) -> Vec<u64> {
        self.classes
            .iter()
            .filter(|(_, n)| n.is_one())
            .map(|(&m, _)| m)
            .collect()
    }

    /// Periods occurring more than once, ascending.
    pub fn repeated_periods(&self) -> Vec<u64> {
        self.classes
            .iter()
            .filter(|(_, n)| !n.is_one())
            .map(|(&m, _)| m)
            .collect()
    }

    /// Total number of elliptic generators.
    pub fn elliptic_count(&self) -> BigUint {
        self.classes.values().sum()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.classes.is_empty()
    }

    /// Area measure `2g - 2 + sum n (1 - 1/m)`.
    pub fn mu(&self) -> ExactRational {
        let scale = self.period_lcm();
        ExactRational::new(self.scaled_mu(&scale), scale)
    }

    fn period_lcm(&self) -> BigInt {
        self.classes
            .keys()
            .fold(BigInt::one(), |acc, &m| acc.lcm(&BigInt::from(m)))
    }

    /// `mu * scale`, for `scale` divisible by every period. Stays in
    /// integers, which matters once genera run to many thousands of bits.
    fn scaled_mu(&self, scale: &BigInt) -> BigInt {
        let mut acc = (to_bigint(&self.genus) * 2 - 2) * scale;
        for (&m, n) in &self.classes {
            acc += to_bigint(n) * (m - 1) * (scale / m);
        }
        acc
    }
}

/// Index `|parent : sub| = mu(sub) / mu(parent)`.
pub fn rh_index(parent: &FuchsianSignature, sub: &FuchsianSignature) -> Result<BigUint> {
    let scale = parent.period_lcm().lcm(&sub.period_lcm());
    let mu_parent = parent.scaled_mu(&scale);
    if !mu_parent.is_positive() {
        return Err(Error::ZeroAreaParent(parent.mu().to_string()));
    }
    let (index, rem) = sub.scaled_mu(&scale).div_rem(&mu_parent);
    if !rem.is_zero() || !index.is_positive() {
        return Err(Error::NonIntegralIndex(
            (sub.mu() / parent.mu()).to_string(),
        ));
    }
    Ok(index.to_biguint().expect("positive"))
}

/// Signature of a normal subgroup of index `index`, where the elliptic
/// generators of class `j` map to elements of order `image_orders[j]`
/// (classes in ascending period order).
pub fn normal_transfer(
    parent: &FuchsianSignature,
    image_orders: &[u64],
    index: &BigUint,
) -> Result<FuchsianSignature> {
    if image_orders.len() != parent.class_count() {
        return Err(Error::InconsistentData(format!(
            "{} image orders for {} period classes",
            image_orders.len(),
            parent.class_count()
        )));
    }
    let entries: Vec<TransferEntry> = parent
        .classes()
        .zip(image_orders)
        .map(|((period, multiplicity), &image_order)| TransferEntry {
            period,
            multiplicity: multiplicity.clone(),
            image_order,
        })
        .collect();
    transfer_entries(&parent.mu(), &entries, index)
}

/// One elliptic generator class of a parent group, before canonicalisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferEntry {
    pub period: u64,
    pub multiplicity: BigUint,
    pub image_order: u64,
}

/// Normal-subgroup transfer over an order-sensitive entry list.
///
/// Each generator of period `m` whose image has order `e` contributes
/// `N/e` conjugacy classes of period `m/e` to the subgroup; the genus is
/// whatever makes `mu(sub) = N mu(parent)`.
pub fn transfer_entries(
    parent_mu: &ExactRational,
    entries: &[TransferEntry],
    index: &BigUint,
) -> Result<FuchsianSignature> {
    if index.is_zero() {
        return Err(Error::InconsistentData("index 0".into()));
    }
    let mut classes = Vec::with_capacity(entries.len());
    for entry in entries {
        let e = entry.image_order;
        if e == 0 || entry.period % e != 0 {
            return Err(Error::InconsistentData(format!(
                "image order {e} does not divide period {}",
                entry.period
            )));
        }
        let (copies, rem) = index.div_rem(&BigUint::from(e));
        if !rem.is_zero() {
            return Err(Error::InconsistentData(format!(
                "image order {e} does not divide index {index}"
            )));
        }
        classes.push((entry.period / e, &entry.multiplicity * copies));
    }
    let elliptic_only = FuchsianSignature::new(0u32, classes)?;
    // mu(sub) = 2g' - 2 + elliptic part; scaled_mu of the genus-0 part
    // already carries the -2.
    let scale = elliptic_only.period_lcm().lcm(parent_mu.denom());
    let scaled = to_bigint(index) * parent_mu.numer() * (&scale / parent_mu.denom())
        - elliptic_only.scaled_mu(&scale);
    let (twice_genus, rem) = scaled.div_rem(&scale);
    if !rem.is_zero() {
        return Err(Error::InconsistentData(format!(
            "Riemann-Hurwitz gives 2g' = {}",
            ExactRational::new(scaled, scale)
        )));
    }
    if twice_genus.is_negative() || twice_genus.is_odd() {
        return Err(Error::InconsistentData(format!(
            "Riemann-Hurwitz gives 2g' = {twice_genus}"
        )));
    }
    let genus = (twice_genus / 2u32).to_biguint().expect("non-negative");
    Ok(FuchsianSignature {
        genus,
        classes: elliptic_only.classes,
    })
}

/// Renders the compact form: singleton periods ascending, then repeated
/// periods ascending with `^(n)` exponents.
pub fn format_signature(sig: &FuchsianSignature) -> String {
    sig.to_string()
}

impl fmt::Display for FuchsianSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; ", self.genus)?;
        if self.classes.is_empty() {
            return f.write_str("-)");
        }
        let singles = self.classes.iter().filter(|(_, n)| n.is_one());
        let repeated = self.classes.iter().filter(|(_, n)| !n.is_one());
        let mut first = true;
        for (m, n) in singles.chain(repeated) {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            if n.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{m}^({n})")?;
            }
        }
        f.write_str(")")
    }
}

pub fn parse_signature(text: &str) -> Result<FuchsianSignature> {
    Parser { text, pos: 0 }.signature()
}

impl FromStr for FuchsianSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_signature(s)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            self.error(format!("expected {token:?}"))
        }
    }

    fn number(&mut self) -> Result<BigUint> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a decimal integer");
        }
        Ok(self.text[start..self.pos].parse().expect("digits"))
    }

    fn signature(mut self) -> Result<FuchsianSignature> {
        self.expect("(")?;
        let genus = self.number()?;
        self.expect(";")?;
        self.expect(" ")?;
        let mut classes = Vec::new();
        if self.peek() == Some(b'-') {
            self.pos += 1;
        } else {
            loop {
                classes.push(self.class()?);
                if self.peek() == Some(b',') {
                    self.expect(", ")?;
                } else {
                    break;
                }
            }
        }
        self.expect(")")?;
        if self.pos != self.text.len() {
            return self.error("trailing input");
        }
        FuchsianSignature::new(genus, classes)
    }

    fn class(&mut self) -> Result<(u64, BigUint)> {
        let start = self.pos;
        let period = self.number()?;
        let period = match period.to_u64() {
            Some(m) if m >= 2 => m,
            _ => {
                self.pos = start;
                return self.error(format!("period {period} must be an integer in 2..=2^64-1"));
            }
        };
        let multiplicity = if self.text[self.pos..].starts_with("^(") {
            self.pos += 2;
            let at = self.pos;
            let n = self.number()?;
            if n.is_zero() {
                self.pos = at;
                return self.error("multiplicity must be positive");
            }
            self.expect(")")?;
            n
        } else {
            BigUint::one()
        };
        Ok((period, multiplicity))
    }
}
