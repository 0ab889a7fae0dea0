//! Witness towers: iterated `K_m` kernels realising the minimum derived
//! length, and Macbeath extensions realising every larger one.
//!
//! `K_m(H) = H' H^(m)`. For a Fuchsian group `H` the quotient `H / K_m(H)`
//! is the abelianisation reduced mod `m`, and the kernel's signature
//! follows from the image orders of the elliptic generators.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_u64, least_prime_coprime_to, log2_big, to_bigint};
use crate::error::{Error, Result};
use crate::oracle::{fp_abelianisation, signature_relations, ImageOrder};
use crate::signature::{normal_transfer, FuchsianSignature};
use crate::triangle::{
    self, curvature_class, derived_signature, signature_case, CaseForm, Curvature, TriangleParams,
};
use crate::ExactRational;

/// Quotient orders above `2^MAX_ORDER_BITS` are refused rather than
/// materialised.
pub const MAX_ORDER_BITS: u64 = 1 << 20;

/// `count` copies of the invariant factor `factor`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionRun {
    pub factor: BigUint,
    pub count: BigUint,
}

/// `Z^free_rank x C_{d_1} x C_{d_2} x ...` together with the order of the
/// image of every elliptic generator.
///
/// Torsion is stored run-length encoded, ascending, each factor dividing
/// the next. `image_orders` has one entry per period class of the source
/// signature (ascending period): conjugate-free generators in one class
/// are permuted by an automorphism of the presentation, so share an order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianStructure {
    pub free_rank: BigUint,
    pub torsion: Vec<TorsionRun>,
    pub image_orders: Vec<u64>,
}

impl AbelianStructure {
    pub fn trivial(classes: usize) -> Self {
        AbelianStructure {
            free_rank: BigUint::zero(),
            torsion: Vec::new(),
            image_orders: vec![1; classes],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank.is_zero()
    }

    /// `log2` of the torsion order.
    pub fn torsion_bits(&self) -> f64 {
        self.torsion
            .iter()
            .map(|run| {
                let c = run.count.to_f64().unwrap_or(f64::INFINITY);
                c * log2_big(&run.factor)
            })
            .sum()
    }

    /// Exact order, refusing groups larger than `2^MAX_ORDER_BITS`.
    pub fn order(&self) -> Result<BigUint> {
        if !self.is_finite() {
            return Err(Error::InvalidArgument(
                "infinite abelian group has no order".into(),
            ));
        }
        let bits = self.torsion_bits();
        // NaN never happens; infinite bits must also be refused
        if bits.is_nan() || bits > MAX_ORDER_BITS as f64 {
            return Err(Error::OrderTooLarge {
                bits: if bits.is_finite() {
                    bits.ceil() as u64
                } else {
                    u64::MAX
                },
                limit: MAX_ORDER_BITS,
            });
        }
        Ok(self.torsion.iter().fold(BigUint::one(), |acc, run| {
            acc * run
                .factor
                .pow(run.count.to_u32().expect("bounded by MAX_ORDER_BITS"))
        }))
    }

    /// Invariant factors listed one by one. Only sensible for small groups.
    pub fn invariant_factors(&self) -> Vec<BigUint> {
        let mut out = Vec::new();
        for run in &self.torsion {
            let n = run.count.to_usize().expect("small group");
            out.extend(std::iter::repeat_n(run.factor.clone(), n));
        }
        out
    }
}

impl fmt::Display for AbelianStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.free_rank.is_zero() {
            parts.push(if self.free_rank.is_one() {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        for run in &self.torsion {
            parts.push(if run.count.is_one() {
                format!("C{}", run.factor)
            } else {
                format!("C{}^{}", run.factor, run.count)
            });
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" x "))
        }
    }
}

/// Run-length invariant factors of `prod C_d^count`.
fn invariant_runs(cyclic: &[(u64, BigUint)]) -> Vec<TorsionRun> {
    // prime -> exponent -> multiplicity
    let mut by_prime: BTreeMap<u64, BTreeMap<u32, BigUint>> = BTreeMap::new();
    for (d, count) in cyclic {
        if count.is_zero() {
            continue;
        }
        for (p, e) in factor_u64(*d) {
            *by_prime.entry(p).or_default().entry(e).or_default() += count;
        }
    }
    // largest invariant factors first
    let mut stacks: Vec<(u64, Vec<(u32, BigUint)>)> = by_prime
        .into_iter()
        .map(|(p, exps)| (p, exps.into_iter().collect()))
        .collect();
    let mut runs = Vec::new();
    loop {
        stacks.retain(|(_, s)| !s.is_empty());
        if stacks.is_empty() {
            break;
        }
        let take = stacks
            .iter()
            .map(|(_, s)| s.last().unwrap().1.clone())
            .min()
            .expect("non-empty");
        let mut factor = BigUint::one();
        for (p, s) in &mut stacks {
            let top = s.last_mut().unwrap();
            factor *= BigUint::from(*p).pow(top.0);
            top.1 -= &take;
            if top.1.is_zero() {
                s.pop();
            }
        }
        runs.push(TorsionRun {
            factor,
            count: take,
        });
    }
    runs.reverse();
    runs
}

fn class_blocks(sig: &FuchsianSignature) -> Vec<(u64, BigUint)> {
    sig.classes().map(|(m, n)| (m, n.clone())).collect()
}

/// Abelianisation of a signature's standard presentation.
///
/// Within a class of `n` generators of period `m`, the basis change
/// `x_1, ..., x_{n-1}, s = x_1 + ... + x_n` splits off `(C_m)^{n-1}` and
/// leaves one class-sum generator coupled to the others by the long
/// relation. Both blocks are reduced by Smith normal form, so the lattice
/// stays small whatever the multiplicities are.
pub fn fuchsian_abelianisation(sig: &FuchsianSignature) -> Result<AbelianStructure> {
    abelianise(sig, None)
}

fn abelianise(sig: &FuchsianSignature, modulus: Option<u64>) -> Result<AbelianStructure> {
    let blocks = class_blocks(sig);
    let k = blocks.len();
    let mut cyclic: Vec<(u64, BigUint)> = Vec::new();
    let hyperbolic = sig.genus() * 2u32;
    let mut free_rank = BigUint::zero();
    match modulus {
        Some(m) => cyclic.push((m, hyperbolic)),
        None => free_rank = hyperbolic,
    }

    // coupled block: class sums s_i with m_i s_i = 0 and sum s_i = 0
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, (m, _)) in blocks.iter().enumerate() {
        let mut row = vec![BigInt::zero(); k];
        row[i] = BigInt::from(*m);
        rows.push(row);
        if let Some(modulus) = modulus {
            let mut row = vec![BigInt::zero(); k];
            row[i] = BigInt::from(modulus);
            rows.push(row);
        }
    }
    if k > 0 {
        rows.push(vec![BigInt::one(); k]);
    }
    let coupled = fp_abelianisation(k, &rows)?;
    debug_assert_eq!(coupled.free_rank(), 0);
    for d in coupled.invariant_factors() {
        cyclic.push((
            d.to_u64().ok_or(Error::Overflow("invariant factor"))?,
            BigUint::one(),
        ));
    }

    let mut image_orders = Vec::with_capacity(k);
    for (i, (m, n)) in blocks.iter().enumerate() {
        let order = if n.is_one() {
            let mut unit = vec![BigInt::zero(); k];
            unit[i] = BigInt::one();
            coupled.element_order(&unit)?
        } else {
            // split block of n - 1 copies of <x | m x (, modulus x)>
            let mut rows = vec![vec![BigInt::from(*m)]];
            if let Some(modulus) = modulus {
                rows.push(vec![BigInt::from(modulus)]);
            }
            let split = fp_abelianisation(1, &rows)?;
            for d in split.invariant_factors() {
                cyclic.push((d.to_u64().expect("divides the period"), n - 1u32));
            }
            split.element_order(&[BigInt::one()])?
        };
        match order {
            ImageOrder::Finite(e) => image_orders.push(e.to_u64().expect("divides the period")),
            ImageOrder::Infinite => unreachable!("elliptic generators have finite order"),
        }
    }
    Ok(AbelianStructure {
        free_rank,
        torsion: invariant_runs(&cyclic),
        image_orders,
    })
}

/// `Z^{2g} x prod (C_{m_i})^{n_i - 1}`, valid when the periods are pairwise
/// coprime; singleton classes then have trivial image and repeated classes
/// keep their full period. `None` when the periods are not coprime.
pub fn closed_form_abelianisation(sig: &FuchsianSignature) -> Option<AbelianStructure> {
    let periods: Vec<u64> = sig.periods().collect();
    for (i, a) in periods.iter().enumerate() {
        if periods[i + 1..].iter().any(|b| a.gcd(b) != 1) {
            return None;
        }
    }
    let cyclic: Vec<(u64, BigUint)> = sig.classes().map(|(m, n)| (m, n - 1u32)).collect();
    Some(AbelianStructure {
        free_rank: sig.genus() * 2u32,
        torsion: invariant_runs(&cyclic),
        image_orders: sig
            .classes()
            .map(|(m, n)| if n.is_one() { 1 } else { m })
            .collect(),
    })
}

/// Abelianisation computed on the fully expanded presentation (one
/// generator per elliptic element), for cross-checking
/// [`fuchsian_abelianisation`] on small signatures.
pub fn explicit_abelianisation(
    sig: &FuchsianSignature,
    modulus: Option<u64>,
) -> Result<AbelianStructure> {
    match explicit_with::<i64>(sig, modulus) {
        Err(Error::Overflow(_)) => explicit_with::<BigInt>(sig, modulus),
        other => other,
    }
}

fn explicit_with<T: crate::arith::Scalar>(
    sig: &FuchsianSignature,
    modulus: Option<u64>,
) -> Result<AbelianStructure> {
    let enc = signature_relations::<T>(sig, modulus)?;
    let fp = fp_abelianisation(enc.generator_count(), &enc.relations)?;
    let cyclic = fp
        .invariant_factors()
        .iter()
        .map(|d| {
            Ok((
                d.to_u64().ok_or(Error::Overflow("invariant factor"))?,
                BigUint::one(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut image_orders: Vec<u64> = Vec::new();
    let mut last_period = None;
    for (k, &m) in enc.elliptic_periods.iter().enumerate() {
        let order = match &fp.image_orders()[enc.hyperbolic + k] {
            ImageOrder::Finite(e) => e.to_u64().ok_or(Error::Overflow("image order"))?,
            ImageOrder::Infinite => {
                return Err(Error::mismatch(
                    "elliptic image order",
                    "finite",
                    "infinite",
                ))
            }
        };
        if last_period == Some(m) {
            let prev = *image_orders.last().unwrap();
            if prev != order {
                return Err(Error::mismatch(
                    format!("image orders within period class {m}"),
                    prev,
                    order,
                ));
            }
        } else {
            image_orders.push(order);
            last_period = Some(m);
        }
    }
    Ok(AbelianStructure {
        free_rank: BigUint::from(fp.free_rank()),
        torsion: invariant_runs(&cyclic),
        image_orders,
    })
}

/// `H / K_m(H)` and the signature of `K_m(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmKernel {
    pub quotient: AbelianStructure,
    pub quotient_order: BigUint,
    pub kernel: FuchsianSignature,
}

pub fn km_kernel(sig: &FuchsianSignature, m: u64) -> Result<KmKernel> {
    if m == 0 {
        return Err(Error::InvalidArgument("K_m needs m >= 1".into()));
    }
    if m == 1 {
        return Ok(KmKernel {
            quotient: AbelianStructure::trivial(sig.class_count()),
            quotient_order: BigUint::one(),
            kernel: sig.clone(),
        });
    }
    if !sig.mu().is_positive() {
        return Err(Error::ZeroAreaInput(sig.to_string()));
    }
    let quotient = abelianise(sig, Some(m))?;
    let quotient_order = quotient.order()?;
    let kernel = normal_transfer(sig, &quotient.image_orders, &quotient_order)?;
    Ok(KmKernel {
        quotient,
        quotient_order,
        kernel,
    })
}

/// One abelian layer `H / K_m(H)` of a witness chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub exponent: u64,
    pub layer: AbelianStructure,
    pub layer_order: BigUint,
    pub kernel: FuchsianSignature,
}

/// A normal series `G = L_0 > L_1 > ... > L_c` with abelian layers and a
/// torsion-free last term, so `G / L_c` is a smooth finite soluble quotient
/// of derived length at most `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessChain {
    pub params: TriangleParams,
    pub root: FuchsianSignature,
    pub steps: Vec<ChainStep>,
    pub cumulative_order: BigUint,
    pub claimed_derived_length: usize,
}

impl WitnessChain {
    pub fn final_kernel(&self) -> &FuchsianSignature {
        self.steps.last().map_or(&self.root, |s| &s.kernel)
    }

    /// Signatures `L_0, L_1, ..., L_c`.
    pub fn signatures(&self) -> impl Iterator<Item = &FuchsianSignature> {
        std::iter::once(&self.root).chain(self.steps.iter().map(|s| &s.kernel))
    }
}

/// Optional overrides for the exponents of the second and third layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainExponents {
    pub first: Option<u64>,
    pub second: Option<u64>,
}

pub fn witness_chain(t: &TriangleParams) -> Result<WitnessChain> {
    witness_chain_with(t, ChainExponents::default())
}

/// Builds the chain `G > G' > K_m(G') [> K_{m'}(K_m(G'))]`.
///
/// Default exponents: `m` is the product of the repeated periods of `G'`
/// (the least prime coprime to the singleton period when there are none)
/// and `m'` the product of the singleton periods.
pub fn witness_chain_with(t: &TriangleParams, exponents: ChainExponents) -> Result<WitnessChain> {
    let derived = derived_signature(t)?;
    let case = signature_case(&derived)?;
    let root = t.signature();
    let ab = triangle::abelianisation(t);

    // G' = K_e(G) with e the exponent of G/G'
    let first = km_kernel(&root, ab.e)?;
    if first.kernel != derived {
        return Err(Error::mismatch(
            format!("K_e kernel of {t}"),
            &derived,
            &first.kernel,
        ));
    }
    if first.quotient_order != ab.order {
        return Err(Error::mismatch(
            format!("|G/G'| of {t}"),
            &ab.order,
            &first.quotient_order,
        ));
    }
    let mut steps = vec![ChainStep {
        exponent: ab.e,
        layer: first.quotient,
        layer_order: first.quotient_order,
        kernel: first.kernel,
    }];

    let singletons = derived.singleton_periods();
    let repeated = derived.repeated_periods();
    let single_product: u64 = singletons.iter().product();
    let repeated_product: u64 = repeated.iter().product();

    if case == CaseForm::Case1 {
        if exponents.first.is_some() || exponents.second.is_some() {
            return Err(Error::InvalidArgument(format!(
                "{t} has a one-layer chain; no exponents to choose"
            )));
        }
    } else {
        let m = match exponents.first {
            Some(m) => {
                let ok =
                    m > 1 && repeated.iter().all(|p| m % p == 0) && m.gcd(&single_product) == 1;
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "exponent {m} must exceed 1, be a multiple of {repeated:?} and coprime to {singletons:?}"
                    )));
                }
                m
            }
            None if repeated.is_empty() => least_prime_coprime_to(single_product),
            None => repeated_product,
        };
        let second = km_kernel(&derived, m)?;
        steps.push(ChainStep {
            exponent: m,
            layer: second.quotient,
            layer_order: second.quotient_order,
            kernel: second.kernel,
        });

        if singletons.is_empty() {
            if exponents.second.is_some() {
                return Err(Error::InvalidArgument(format!(
                    "{t} has a two-layer chain; no second exponent"
                )));
            }
        } else {
            let m2 = match exponents.second {
                Some(m2) if singletons.iter().all(|p| m2 % p == 0) => m2,
                Some(m2) => {
                    return Err(Error::InvalidArgument(format!(
                        "exponent {m2} must be a multiple of {singletons:?}"
                    )))
                }
                None => single_product,
            };
            let prev = &steps.last().unwrap().kernel;
            let third = km_kernel(prev, m2)?;
            steps.push(ChainStep {
                exponent: m2,
                layer: third.quotient,
                layer_order: third.quotient_order,
                kernel: third.kernel,
            });
        }
    }

    let last = &steps.last().unwrap().kernel;
    if !last.is_torsion_free() {
        return Err(Error::mismatch(
            format!("final kernel of {t}"),
            "torsion-free",
            last,
        ));
    }
    let cumulative_order = steps
        .iter()
        .fold(BigUint::one(), |acc, s| acc * &s.layer_order);
    let claimed_derived_length = steps.len();
    Ok(WitnessChain {
        params: *t,
        root,
        steps,
        cumulative_order,
        claimed_derived_length,
    })
}

/// One application of the Macbeath trick: from a smooth quotient `G` with
/// surface kernel `K` of genus `g`, pass to `G / K_m(K)` of order
/// `m^{2g} |G|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacbeathStep {
    pub exponent: u64,
    pub input_order: BigUint,
    pub input_genus: BigUint,
    pub output_order: BigUint,
    pub output_genus: BigUint,
}

fn euler_defect(t: &TriangleParams) -> ExactRational {
    // 1 - 1/p - 1/q - 1/r, the area measure of (0; p, q, r)
    t.signature().mu()
}

/// Genus `g` with `2 - 2g = order (1/p + 1/q + 1/r - 1)`.
fn surface_genus(t: &TriangleParams, order: &BigUint) -> Result<BigUint> {
    let twice = ExactRational::from_integer(to_bigint(order)) * euler_defect(t)
        + ExactRational::from_integer(2.into());
    if !twice.is_integer() || twice.to_integer().is_odd() || twice.is_negative() {
        return Err(Error::NonIntegralGenus(format!(
            "2g = {twice} for order {order}"
        )));
    }
    let twice: num_bigint::BigInt = twice.to_integer();
    Ok((twice / 2u32).to_biguint().expect("non-negative"))
}

pub fn macbeath_step(
    t: &TriangleParams,
    order: &BigUint,
    genus: &BigUint,
    m: u64,
) -> Result<MacbeathStep> {
    let curvature = curvature_class(t);
    if curvature != Curvature::Hyperbolic {
        return Err(Error::NotHyperbolic(curvature));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("exponent must be positive".into()));
    }
    if genus.is_zero() {
        return Err(Error::GenusZeroKernel);
    }
    let expected = surface_genus(t, order)?;
    if &expected != genus {
        return Err(Error::InconsistentData(format!(
            "a smooth quotient of {t} of order {order} has kernel genus {expected}, not {genus}"
        )));
    }
    let extension = AbelianStructure {
        free_rank: BigUint::zero(),
        torsion: if m > 1 {
            vec![TorsionRun {
                factor: m.into(),
                count: genus * 2u32,
            }]
        } else {
            Vec::new()
        },
        image_orders: Vec::new(),
    };
    let output_order = extension.order()? * order;
    let output_genus = surface_genus(t, &output_order)?;
    Ok(MacbeathStep {
        exponent: m,
        input_order: order.clone(),
        input_genus: genus.clone(),
        output_order,
        output_genus,
    })
}

/// One quotient in a Macbeath tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerLevel {
    pub order: BigUint,
    pub genus: BigUint,
    pub derived_length: usize,
    /// Exponent used to reach this level; `None` for the witness-chain base.
    pub exponent: Option<u64>,
}

/// Starts from the witness chain's quotient and applies `depth` Macbeath
/// steps. A single exponent is reused for every step; otherwise one
/// exponent per step is required.
pub fn macbeath_tower(
    t: &TriangleParams,
    depth: usize,
    exponents: &[u64],
) -> Result<Vec<TowerLevel>> {
    let chain = witness_chain(t)?;
    macbeath_tower_from(&chain, depth, exponents)
}

pub fn macbeath_tower_from(
    chain: &WitnessChain,
    depth: usize,
    exponents: &[u64],
) -> Result<Vec<TowerLevel>> {
    if depth > 0 {
        if exponents.is_empty() || (exponents.len() != 1 && exponents.len() != depth) {
            return Err(Error::InvalidArgument(format!(
                "{} exponents given for depth {depth}",
                exponents.len()
            )));
        }
        if let Some(m) = exponents.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidArgument(format!(
                "Macbeath exponent {m} must be >= 2"
            )));
        }
    }
    let t = &chain.params;
    let mut levels = vec![TowerLevel {
        order: chain.cumulative_order.clone(),
        genus: chain.final_kernel().genus().clone(),
        derived_length: chain.claimed_derived_length,
        exponent: None,
    }];
    for i in 0..depth {
        let m = exponents[if exponents.len() == 1 { 0 } else { i }];
        let prev = levels.last().unwrap();
        let step = macbeath_step(t, &prev.order, &prev.genus, m)?;
        levels.push(TowerLevel {
            order: step.output_order,
            genus: step.output_genus,
            derived_length: prev.derived_length + 1,
            exponent: Some(m),
        });
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(s: &str) -> FuchsianSignature {
        s.parse().unwrap()
    }

    fn t(p: u64, q: u64, r: u64) -> TriangleParams {
        TriangleParams::new(p, q, r).unwrap()
    }

    fn factors(a: &AbelianStructure) -> Vec<u64> {
        a.invariant_factors()
            .iter()
            .map(|d| d.to_u64().unwrap())
            .collect()
    }

    #[test]
    fn abelianisation_examples() {
        let a = fuchsian_abelianisation(&sig("(0; 4^(3))")).unwrap();
        assert_eq!(a.free_rank, BigUint::zero());
        assert_eq!(factors(&a), [4, 4]);
        assert_eq!(a.image_orders, [4]);

        let a = fuchsian_abelianisation(&sig("(1; 2)")).unwrap();
        assert_eq!(a.free_rank, BigUint::from(2u32));
        assert!(a.torsion.is_empty());
        assert_eq!(a.image_orders, [1]);

        let a = fuchsian_abelianisation(&sig("(3; -)")).unwrap();
        assert_eq!(a.to_string(), "Z^6");
    }

    #[test]
    fn abelianisation_with_non_coprime_periods() {
        // (0; 2, 4): x + y = 0, 2x = 0, 4y = 0 gives C2, both images of order 2
        let a = fuchsian_abelianisation(&sig("(0; 2, 4)")).unwrap();
        assert_eq!(factors(&a), [2]);
        assert_eq!(a.image_orders, [2, 2]);
        assert_eq!(a, explicit_abelianisation(&sig("(0; 2, 4)"), None).unwrap());
        assert!(closed_form_abelianisation(&sig("(0; 2, 4)")).is_none());
    }

    #[test]
    fn invariant_runs_merge_primes() {
        let runs = invariant_runs(&[(2, 3u32.into()), (3, 2u32.into()), (4, 1u32.into())]);
        // C2^3 x C3^2 x C4 = C2^2 x C6 x C12
        let flat: Vec<(u64, u64)> = runs
            .iter()
            .map(|r| (r.factor.to_u64().unwrap(), r.count.to_u64().unwrap()))
            .collect();
        assert_eq!(flat, [(2, 2), (6, 1), (12, 1)]);
    }

    #[test]
    fn km_kernel_examples() {
        let k = km_kernel(&sig("(0; 4^(3))"), 4).unwrap();
        assert_eq!(factors(&k.quotient), [4, 4]);
        assert_eq!(k.quotient_order, 16u32.into());
        assert_eq!(k.kernel.to_string(), "(3; -)");

        let k = km_kernel(&sig("(1; 2)"), 3).unwrap();
        assert_eq!(factors(&k.quotient), [3, 3]);
        assert_eq!(k.quotient_order, 9u32.into());
        assert_eq!(k.kernel.to_string(), "(1; 2^(9))");

        let s = sig("(0; 3, 2^(3))");
        let k = km_kernel(&s, 1).unwrap();
        assert_eq!(k.quotient_order, BigUint::one());
        assert_eq!(k.kernel, s);
    }

    #[test]
    fn km_kernel_errors() {
        assert!(matches!(
            km_kernel(&sig("(1; -)"), 2),
            Err(Error::ZeroAreaInput(_))
        ));
        assert!(matches!(
            km_kernel(&sig("(0; 2, 3, 6)"), 6),
            Err(Error::ZeroAreaInput(_))
        ));
        assert!(matches!(
            km_kernel(&sig("(2; -)"), 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn km_kernel_refuses_huge_quotients() {
        let big = FuchsianSignature::new(0u32, [(2, BigUint::from(1u32) << 40u32)]).unwrap();
        assert!(matches!(
            km_kernel(&big, 2),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn witness_chain_examples() {
        let c = witness_chain(&t(3, 3, 4)).unwrap();
        let sigs: Vec<String> = c.signatures().map(|s| s.to_string()).collect();
        assert_eq!(sigs, ["(0; 4, 3^(2))", "(0; 4^(3))", "(3; -)"]);
        assert_eq!(c.cumulative_order, 48u32.into());
        assert_eq!(c.claimed_derived_length, 2);

        let c = witness_chain(&t(4, 4, 4)).unwrap();
        assert_eq!(c.steps.len(), 1);
        assert_eq!(c.cumulative_order, 16u32.into());
        assert_eq!(c.final_kernel().to_string(), "(3; -)");

        let c = witness_chain(&t(2, 3, 12)).unwrap();
        let sigs: Vec<String> = c.signatures().skip(1).map(|s| s.to_string()).collect();
        assert_eq!(&sigs[..2], ["(1; 2)", "(1; 2^(9))"]);
        assert_eq!(c.steps[1].exponent, 3);
        assert_eq!(c.steps[1].layer_order, 9u32.into());
        assert_eq!(c.steps[2].exponent, 2);
        assert_eq!(c.steps[2].layer_order, 1024u32.into());
        assert_eq!(c.cumulative_order, 55296u32.into());
        assert_eq!(c.claimed_derived_length, 3);
        assert!(c.final_kernel().is_torsion_free());
    }

    #[test]
    fn witness_chain_overrides() {
        let base = t(2, 3, 12);
        let c = witness_chain_with(
            &base,
            ChainExponents {
                first: Some(5),
                second: Some(4),
            },
        )
        .unwrap();
        assert_eq!(c.steps[1].layer_order, 25u32.into());
        assert!(c.final_kernel().is_torsion_free());
        // first exponent must be coprime to the singleton period 2
        assert!(matches!(
            witness_chain_with(
                &base,
                ChainExponents {
                    first: Some(6),
                    second: None
                }
            ),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            witness_chain_with(
                &base,
                ChainExponents {
                    first: None,
                    second: Some(3)
                }
            ),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            witness_chain_with(
                &t(4, 4, 4),
                ChainExponents {
                    first: Some(4),
                    second: None
                }
            ),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn witness_chain_errors() {
        assert_eq!(
            witness_chain(&t(2, 3, 7)),
            Err(Error::PerfectGroup(2, 3, 7))
        );
        assert_eq!(
            witness_chain(&t(2, 4, 4)),
            Err(Error::NotHyperbolic(Curvature::Euclidean))
        );
    }

    #[test]
    fn macbeath_examples() {
        let hurwitz = t(2, 3, 7);
        let s = macbeath_step(&hurwitz, &168u32.into(), &3u32.into(), 2).unwrap();
        assert_eq!(s.output_order, 10752u32.into());
        assert_eq!(s.output_genus, 129u32.into());

        let s = macbeath_step(&hurwitz, &168u32.into(), &3u32.into(), 1).unwrap();
        assert_eq!(s.output_order, 168u32.into());
        assert_eq!(s.output_genus, 3u32.into());
    }

    #[test]
    fn macbeath_errors() {
        let h = t(2, 3, 7);
        assert_eq!(
            macbeath_step(&h, &168u32.into(), &0u32.into(), 2),
            Err(Error::GenusZeroKernel)
        );
        assert!(matches!(
            macbeath_step(&h, &100u32.into(), &3u32.into(), 2),
            Err(Error::NonIntegralGenus(_))
        ));
        assert!(matches!(
            macbeath_step(&h, &168u32.into(), &4u32.into(), 2),
            Err(Error::InconsistentData(_))
        ));
        assert!(matches!(
            macbeath_step(&t(3, 3, 3), &9u32.into(), &1u32.into(), 2),
            Err(Error::NotHyperbolic(Curvature::Euclidean))
        ));
    }

    #[test]
    fn macbeath_tower_examples() {
        let levels = macbeath_tower(&t(3, 3, 4), 1, &[2]).unwrap();
        assert_eq!(levels.len(), 2);
        assert_eq!(
            (levels[0].order.clone(), levels[0].genus.clone()),
            (48u32.into(), 3u32.into())
        );
        assert_eq!(levels[1].order, 3072u32.into());
        assert_eq!(levels[1].derived_length, 3);

        let levels = macbeath_tower(&t(3, 3, 4), 0, &[]).unwrap();
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].derived_length, 2);

        let levels = macbeath_tower(&t(3, 3, 4), 2, &[2, 2]).unwrap();
        assert!(levels
            .windows(2)
            .all(|w| w[0].order < w[1].order && w[0].genus < w[1].genus));
        let lengths: Vec<usize> = levels.iter().map(|l| l.derived_length).collect();
        assert_eq!(lengths, [2, 3, 4]);

        assert!(matches!(
            macbeath_tower(&t(3, 3, 4), 2, &[2, 3, 4]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            macbeath_tower(&t(3, 3, 4), 1, &[1]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
