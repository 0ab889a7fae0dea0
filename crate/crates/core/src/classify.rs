//! Minimum derived length of a smooth finite soluble quotient and whether
//! there are finitely or infinitely many such quotients at that length.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signature::FuchsianSignature;
use crate::tower::km_kernel;
use crate::triangle::{
    curvature_class, derived_signature, signature_case, CaseForm, Curvature, TriangleParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Finite,
    Infinite,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Finite => "finite",
            Verdict::Infinite => "infinite",
        })
    }
}

/// How the number of quotients at the minimum derived length depends on
/// the group, per case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfinitudeRule {
    Never,
    Always,
    WheneverPositiveGenus,
    DependsOnParameters,
}

impl InfinitudeRule {
    pub fn for_case(case: CaseForm) -> Self {
        match case {
            CaseForm::Case1 => InfinitudeRule::Never,
            CaseForm::Case2 | CaseForm::Case7 => InfinitudeRule::Always,
            CaseForm::Case3 | CaseForm::Case5 | CaseForm::Case8 => {
                InfinitudeRule::WheneverPositiveGenus
            }
            CaseForm::Case4 | CaseForm::Case6 => InfinitudeRule::DependsOnParameters,
        }
    }
}

impl fmt::Display for InfinitudeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfinitudeRule::Never => "Never",
            InfinitudeRule::Always => "Always",
            InfinitudeRule::WheneverPositiveGenus => "Whenever g > 0",
            InfinitudeRule::DependsOnParameters => "Depends on p, q and r",
        })
    }
}

/// Which clause of the finiteness criterion decided the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// (a): only abelian quotients, all factors of the finite `G/G'`.
    AbelianOnly,
    /// (b): Cases 2 and 7.
    AlwaysInfinite,
    /// (c) with `g = 0`.
    GenusZero,
    /// (c) with `g > 0`.
    PositiveGenus,
    /// (d)(i): `r` coprime to `p` and `q`, `p != q`, `gcd(p, q) = 2`.
    CoprimeGcdTwo,
    /// (d)(ii): `r = 2`, coprime to `p` and `q`, `p != q`, `gcd(p, q) = 3`.
    RTwoGcdThree,
    /// (d): no ordering satisfies (i) or (ii).
    NoFinitePermutation,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::AbelianOnly => "a",
            Branch::AlwaysInfinite => "b",
            Branch::GenusZero => "c, g = 0",
            Branch::PositiveGenus => "c, g > 0",
            Branch::CoprimeGcdTwo => "d(i)",
            Branch::RTwoGcdThree => "d(ii)",
            Branch::NoFinitePermutation => "d, no ordering qualifies",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub case: CaseForm,
    pub c: u8,
    pub verdict_at_c: Verdict,
    pub branch: Branch,
    /// Ordering `(p', q', r')` of the parameters that satisfied clause (d).
    pub witness: Option<TriangleParams>,
}

fn length_for_case(case: CaseForm) -> u8 {
    match case {
        CaseForm::Case1 => 1,
        CaseForm::Case3 | CaseForm::Case5 | CaseForm::Case8 => 2,
        CaseForm::Case2 | CaseForm::Case4 | CaseForm::Case6 | CaseForm::Case7 => 3,
    }
}

/// Minimum derived length of a smooth finite soluble quotient, read off the
/// shape of `G'`: 1 with no periods, 2 when every period is repeated, 3 when
/// some period occurs once (its generator then lies in `G''`).
pub fn min_derived_length(t: &TriangleParams) -> Result<(u8, CaseForm)> {
    let case = signature_case(&derived_signature(t)?)?;
    Ok((length_for_case(case), case))
}

/// Clause (d) search over the six orderings.
pub fn clause_d_witness(t: &TriangleParams) -> Option<(TriangleParams, Branch)> {
    t.permutations().into_iter().find_map(|perm| {
        let [p, q, r] = perm.as_array();
        if r.gcd(&p) != 1 || r.gcd(&q) != 1 || p == q {
            return None;
        }
        match p.gcd(&q) {
            2 => Some((perm, Branch::CoprimeGcdTwo)),
            3 if r == 2 => Some((perm, Branch::RTwoGcdThree)),
            _ => None,
        }
    })
}

pub fn infinitude_at_c(t: &TriangleParams) -> Result<ClassificationReport> {
    let derived = derived_signature(t)?;
    let case = signature_case(&derived)?;
    let c = length_for_case(case);
    let (verdict_at_c, branch, witness) = match InfinitudeRule::for_case(case) {
        InfinitudeRule::Never => (Verdict::Finite, Branch::AbelianOnly, None),
        InfinitudeRule::Always => (Verdict::Infinite, Branch::AlwaysInfinite, None),
        InfinitudeRule::WheneverPositiveGenus => {
            if derived.genus().is_zero() {
                (Verdict::Finite, Branch::GenusZero, None)
            } else {
                (Verdict::Infinite, Branch::PositiveGenus, None)
            }
        }
        InfinitudeRule::DependsOnParameters => match clause_d_witness(t) {
            Some((perm, branch)) => (Verdict::Finite, branch, Some(perm)),
            None => (Verdict::Infinite, Branch::NoFinitePermutation, None),
        },
    };
    Ok(ClassificationReport {
        case,
        c,
        verdict_at_c,
        branch,
        witness,
    })
}

/// Cases 4 and 6 decided from the genus of `K_m(G')`, `m` the repeated
/// period: finitely many quotients at length 3 exactly when that genus is 0.
pub fn verdict_from_kernel_genus(t: &TriangleParams) -> Result<Verdict> {
    let derived = derived_signature(t)?;
    let case = signature_case(&derived)?;
    if !matches!(case, CaseForm::Case4 | CaseForm::Case6) {
        return Err(Error::InvalidArgument(format!(
            "{t} is {case}, not Case4 or Case6"
        )));
    }
    let m: u64 = derived.repeated_periods().iter().product();
    let kernel = km_kernel(&derived, m)?.kernel;
    Ok(if kernel.genus().is_zero() {
        Verdict::Finite
    } else {
        Verdict::Infinite
    })
}

/// Each parameter divides the lcm of the other two.
pub fn has_smooth_abelian_quotient(t: &TriangleParams) -> bool {
    let [p, q, r] = t.as_array();
    let divides_lcm =
        |a: u64, b: u64, c: u64| (BigUint::from(b).lcm(&BigUint::from(c)) % a).is_zero();
    divides_lcm(p, q, r) && divides_lcm(q, p, r) && divides_lcm(r, p, q)
}

/// The family `(m, l u, l)` with `gcd(l, m) = gcd(u, m) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChetiyaReport {
    pub params: TriangleParams,
    /// `|G' : K_m(G')| = m^(l-1)`.
    pub index: BigUint,
    /// Genus of `K_m(G')`, `1 + m^(l-2) (l m - l - 2m) / 2`.
    pub genus: BigUint,
    pub verdict: Verdict,
    /// Expected compact signatures of `G'` and of `K_m(G')`.
    pub derived: FuchsianSignature,
    pub kernel: FuchsianSignature,
}

pub fn chetiya_case(m: u64, l: u64, u: u64) -> Result<ChetiyaReport> {
    if m == 0 || l == 0 || u == 0 {
        return Err(Error::ConstraintViolated(format!(
            "m = {m}, l = {l}, u = {u} must be positive"
        )));
    }
    if l.gcd(&m) != 1 || u.gcd(&m) != 1 {
        return Err(Error::ConstraintViolated(format!(
            "gcd(l, m) = {} and gcd(u, m) = {} must both be 1",
            l.gcd(&m),
            u.gcd(&m)
        )));
    }
    let lu = l
        .checked_mul(u)
        .ok_or_else(|| Error::ConstraintViolated(format!("l u = {l} * {u} overflows")))?;
    let params =
        TriangleParams::new(m, lu, l).map_err(|e| Error::ConstraintViolated(e.to_string()))?;
    let curvature = curvature_class(&params);
    if curvature != Curvature::Hyperbolic {
        return Err(Error::NotHyperbolic(curvature));
    }
    let big_m = BigUint::from(m);
    let exp = |k: u64| -> Result<u32> {
        u32::try_from(k).map_err(|_| Error::ConstraintViolated(format!("l = {l} too large")))
    };
    let index = big_m.pow(exp(l - 1)?);
    // l >= 2 and m >= 2 here; the bracket l m - l - 2m is >= -2
    let bracket: num_bigint::BigInt =
        num_bigint::BigInt::from(l) * m - l - num_bigint::BigInt::from(m) * 2u32;
    let twice: num_bigint::BigInt =
        num_bigint::BigInt::from(big_m.pow(exp(l - 2)?)) * bracket + 2u32;
    if twice.is_odd() || twice < num_bigint::BigInt::zero() {
        return Err(Error::NonIntegralGenus(twice.to_string()));
    }
    let genus = (twice / 2u32).to_biguint().expect("non-negative");
    let verdict = if genus.is_zero() {
        Verdict::Finite
    } else {
        Verdict::Infinite
    };
    let derived = FuchsianSignature::new(0u32, [(u, BigUint::one()), (m, BigUint::from(l))])?;
    let kernel = FuchsianSignature::new(genus.clone(), [(u, index.clone())])?;
    Ok(ChetiyaReport {
        params,
        index,
        genus,
        verdict,
        derived,
        kernel,
    })
}
