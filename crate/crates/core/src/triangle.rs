//! Ordinary triangle groups `<x, y | x^p = y^q = (xy)^r = 1>`: curvature,
//! perfectness, the abelianisation and the signature of the derived
//! subgroup.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, lcm_big};
use crate::error::{Error, Result};
use crate::signature::{transfer_entries, FuchsianSignature, TransferEntry};

/// The ordered triple `(p, q, r)`, each at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriangleParams {
    p: u64,
    q: u64,
    r: u64,
}

impl TriangleParams {
    pub fn new(p: u64, q: u64, r: u64) -> Result<Self> {
        if p < 2 || q < 2 || r < 2 {
            return Err(Error::InvalidParams(format!(
                "({p}, {q}, {r}): every parameter must be >= 2"
            )));
        }
        Ok(TriangleParams { p, q, r })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn as_array(&self) -> [u64; 3] {
        [self.p, self.q, self.r]
    }

    /// All six orderings, in lexicographic order of the index permutation.
    pub fn permutations(&self) -> [TriangleParams; 6] {
        let [a, b, c] = self.as_array();
        [
            (a, b, c),
            (a, c, b),
            (b, a, c),
            (b, c, a),
            (c, a, b),
            (c, b, a),
        ]
        .map(|(p, q, r)| TriangleParams { p, q, r })
    }

    /// `(0; p, q, r)`.
    pub fn signature(&self) -> FuchsianSignature {
        FuchsianSignature::triangle(self.p, self.q, self.r).expect("validated parameters")
    }

    pub fn is_hyperbolic(&self) -> bool {
        curvature_class(self) == Curvature::Hyperbolic
    }
}

impl fmt::Display for TriangleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p, self.q, self.r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Spherical,
    Euclidean,
    Hyperbolic,
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Curvature::Spherical => "spherical",
            Curvature::Euclidean => "euclidean",
            Curvature::Hyperbolic => "hyperbolic",
        })
    }
}

/// Sign of `1/p + 1/q + 1/r - 1`, decided as `qr + pr + pq` against `pqr`.
pub fn curvature_class(t: &TriangleParams) -> Curvature {
    let (p, q, r) = (t.p as u128, t.q as u128, t.r as u128);
    let lhs = BigUint::from(q * r) + BigUint::from(p * r) + BigUint::from(p * q);
    let rhs = BigUint::from(p * q) * BigUint::from(r);
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => Curvature::Spherical,
        std::cmp::Ordering::Equal => Curvature::Euclidean,
        std::cmp::Ordering::Less => Curvature::Hyperbolic,
    }
}

/// Pairwise coprime parameters.
pub fn is_perfect(t: &TriangleParams) -> bool {
    gcd_u64(t.p, t.q) == 1 && gcd_u64(t.q, t.r) == 1 && gcd_u64(t.p, t.r) == 1
}

/// `G/G' = C_e x C_f` and the orders of the images of `x_1, x_2, x_3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianisationReport {
    /// Exponent of `G/G'`.
    pub e: u64,
    pub f: u64,
    /// `|G : G'| = e f`.
    pub order: BigUint,
    pub image_orders: [u64; 3],
    /// `[f, e]` with entries equal to 1 dropped.
    pub invariant_factors: Vec<u64>,
}

pub fn abelianisation(t: &TriangleParams) -> AbelianisationReport {
    let (p, q, r) = (t.p, t.q, t.r);
    let e = lcm_big(gcd_u64(p, q), gcd_u64(q, r)).lcm(&BigUint::from(gcd_u64(p, r)));
    let e = u64::try_from(e).expect("e divides max(p, q, r)");
    let f = gcd_u64(gcd_u64(p, q), r);
    let image = |a: u64, b: u64, c: u64| -> u64 {
        let l = lcm_big(b, c);
        u64::try_from(BigUint::from(a).gcd(&l)).expect("divides a")
    };
    let image_orders = [image(p, q, r), image(q, p, r), image(r, p, q)];
    let invariant_factors = [f, e].into_iter().filter(|&d| d > 1).collect();
    AbelianisationReport {
        e,
        f,
        order: BigUint::from(e) * BigUint::from(f),
        image_orders,
        invariant_factors,
    }
}

/// `|G : G'|` by the product formula `pqr / lcm(p, q, r)`.
pub fn derived_index(t: &TriangleParams) -> BigUint {
    let product = BigUint::from(t.p) * BigUint::from(t.q) * BigUint::from(t.r);
    let l = lcm_big(t.p, t.q).lcm(&BigUint::from(t.r));
    product / l
}

fn require_hyperbolic_non_perfect(t: &TriangleParams) -> Result<()> {
    let curvature = curvature_class(t);
    if curvature != Curvature::Hyperbolic {
        return Err(Error::NotHyperbolic(curvature));
    }
    if is_perfect(t) {
        return Err(Error::PerfectGroup(t.p, t.q, t.r));
    }
    Ok(())
}

/// Signature of `G' = [G, G]`.
///
/// Generator `x_i` acts on the `N` cosets of `G'` with `N / e_i` cycles of
/// length `e_i`, so contributes `N / e_i` periods equal to `m_i / e_i`.
pub fn derived_signature(t: &TriangleParams) -> Result<FuchsianSignature> {
    require_hyperbolic_non_perfect(t)?;
    let ab = abelianisation(t);
    let entries: Vec<TransferEntry> = t
        .as_array()
        .into_iter()
        .zip(ab.image_orders)
        .map(|(period, image_order)| TransferEntry {
            period,
            multiplicity: 1u32.into(),
            image_order,
        })
        .collect();
    transfer_entries(&t.signature().mu(), &entries, &ab.order)
}

/// The eight possible compact shapes of a derived signature, in table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseForm {
    /// `(g; -)`
    Case1,
    /// `(g; m1)`
    Case2,
    /// `(g; m1^(n1))`
    Case3,
    /// `(g; m1, m2^(n2))`
    Case4,
    /// `(g; m1^(n1), m2^(n2))`
    Case5,
    /// `(g; m1, m2, m3^(n3))`
    Case6,
    /// `(g; m1, m2^(n2), m3^(n3))`
    Case7,
    /// `(g; m1^(n1), m2^(n2), m3^(n3))`
    Case8,
}

impl CaseForm {
    pub const ALL: [CaseForm; 8] = [
        CaseForm::Case1,
        CaseForm::Case2,
        CaseForm::Case3,
        CaseForm::Case4,
        CaseForm::Case5,
        CaseForm::Case6,
        CaseForm::Case7,
        CaseForm::Case8,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    /// Number of period classes occurring once and more than once.
    pub fn shape(self) -> (usize, usize) {
        match self {
            CaseForm::Case1 => (0, 0),
            CaseForm::Case2 => (1, 0),
            CaseForm::Case3 => (0, 1),
            CaseForm::Case4 => (1, 1),
            CaseForm::Case5 => (0, 2),
            CaseForm::Case6 => (2, 1),
            CaseForm::Case7 => (1, 2),
            CaseForm::Case8 => (0, 3),
        }
    }

    fn from_shape(singletons: usize, repeated: usize) -> Option<Self> {
        CaseForm::ALL
            .into_iter()
            .find(|c| c.shape() == (singletons, repeated))
    }

    /// Generic compact signature, e.g. `(g; m1, m2^(n2))`.
    pub fn template(self) -> String {
        let (singletons, repeated) = self.shape();
        if singletons + repeated == 0 {
            return "(g; -)".into();
        }
        let parts: Vec<String> = (1..=singletons + repeated)
            .map(|i| {
                if i <= singletons {
                    format!("m{i}")
                } else {
                    format!("m{i}^(n{i})")
                }
            })
            .collect();
        format!("(g; {})", parts.join(", "))
    }
}

impl fmt::Display for CaseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Case{}", self.number())
    }
}

/// Reads off the case from which period classes are singletons.
///
/// Rejects more than three classes, non-coprime periods, and the two
/// shapes `(g; m1, m2)` and `(g; m1, m2, m3)` that no derived subgroup has.
pub fn signature_case(sig: &FuchsianSignature) -> Result<CaseForm> {
    let periods: Vec<u64> = sig.periods().collect();
    let coprime = periods
        .iter()
        .enumerate()
        .all(|(i, &a)| periods[i + 1..].iter().all(|&b| gcd_u64(a, b) == 1));
    if periods.len() > 3 || !coprime {
        return Err(Error::NotADerivedShape(sig.to_string()));
    }
    let singletons = sig.singleton_periods().len();
    CaseForm::from_shape(singletons, periods.len() - singletons)
        .ok_or_else(|| Error::NotADerivedShape(sig.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(p: u64, q: u64, r: u64) -> TriangleParams {
        TriangleParams::new(p, q, r).unwrap()
    }

    #[test]
    fn curvature_examples() {
        assert_eq!(curvature_class(&t(2, 3, 5)), Curvature::Spherical);
        assert_eq!(curvature_class(&t(2, 2, 100)), Curvature::Spherical);
        assert_eq!(curvature_class(&t(3, 3, 3)), Curvature::Euclidean);
        assert_eq!(curvature_class(&t(2, 4, 4)), Curvature::Euclidean);
        assert_eq!(curvature_class(&t(6, 3, 2)), Curvature::Euclidean);
        assert_eq!(curvature_class(&t(2, 3, 7)), Curvature::Hyperbolic);
        assert_eq!(
            curvature_class(&t(u64::MAX, u64::MAX, u64::MAX)),
            Curvature::Hyperbolic
        );
    }

    #[test]
    fn perfectness() {
        assert!(is_perfect(&t(2, 3, 7)));
        assert!(!is_perfect(&t(2, 3, 8)));
        assert!(is_perfect(&t(3, 4, 5)));
    }

    #[test]
    fn rejects_small_parameters() {
        assert!(matches!(
            TriangleParams::new(1, 3, 7),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn abelianisation_examples() {
        let a = abelianisation(&t(2, 3, 9));
        assert_eq!((a.e, a.f, a.order.clone()), (3, 1, 3u32.into()));
        assert_eq!(a.image_orders, [1, 3, 3]);
        assert_eq!(a.invariant_factors, vec![3]);

        let a = abelianisation(&t(4, 4, 4));
        assert_eq!((a.e, a.f, a.order.clone()), (4, 4, 16u32.into()));
        assert_eq!(a.image_orders, [4, 4, 4]);
        assert_eq!(a.invariant_factors, vec![4, 4]);

        let a = abelianisation(&t(2, 3, 7));
        assert_eq!(a.order, 1u32.into());
        assert!(a.invariant_factors.is_empty());
    }

    #[test]
    fn derived_signature_examples() {
        assert_eq!(
            derived_signature(&t(2, 3, 9)).unwrap().to_string(),
            "(0; 3, 2^(3))"
        );
        assert_eq!(
            derived_signature(&t(4, 9, 30)).unwrap().to_string(),
            "(1; 5, 2^(3), 3^(2))"
        );
        assert_eq!(
            derived_signature(&t(2, 9, 15)).unwrap().to_string(),
            "(0; 3, 5, 2^(3))"
        );
    }

    #[test]
    fn derived_signature_errors() {
        assert_eq!(
            derived_signature(&t(3, 3, 3)),
            Err(Error::NotHyperbolic(Curvature::Euclidean))
        );
        assert_eq!(
            derived_signature(&t(2, 4, 3)),
            Err(Error::NotHyperbolic(Curvature::Spherical))
        );
        assert_eq!(
            derived_signature(&t(2, 3, 7)),
            Err(Error::PerfectGroup(2, 3, 7))
        );
    }

    #[test]
    fn case_examples() {
        let case = |s: &str| signature_case(&s.parse().unwrap());
        assert_eq!(case("(3; -)").unwrap(), CaseForm::Case1);
        assert_eq!(case("(1; 2)").unwrap(), CaseForm::Case2);
        assert_eq!(case("(0; 4, 3^(2))").unwrap(), CaseForm::Case4);
        assert_eq!(case("(0; 2^(2), 3^(2), 5^(2))").unwrap(), CaseForm::Case8);
        assert!(matches!(case("(0; 2, 3)"), Err(Error::NotADerivedShape(_))));
        assert!(matches!(
            case("(0; 2, 3, 5)"),
            Err(Error::NotADerivedShape(_))
        ));
        assert!(matches!(
            case("(0; 2, 3, 5, 7^(2))"),
            Err(Error::NotADerivedShape(_))
        ));
        assert!(matches!(
            case("(0; 2^(2), 4^(2))"),
            Err(Error::NotADerivedShape(_))
        ));
    }

    #[test]
    fn templates() {
        let rendered: Vec<String> = CaseForm::ALL.iter().map(|c| c.template()).collect();
        assert_eq!(
            rendered,
            [
                "(g; -)",
                "(g; m1)",
                "(g; m1^(n1))",
                "(g; m1, m2^(n2))",
                "(g; m1^(n1), m2^(n2))",
                "(g; m1, m2, m3^(n3))",
                "(g; m1, m2^(n2), m3^(n3))",
                "(g; m1^(n1), m2^(n2), m3^(n3))",
            ]
        );
    }
}
