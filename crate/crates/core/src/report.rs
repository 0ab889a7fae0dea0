//! Report documents, range scans and the two summary tables, shared by the
//! command-line front end and the acceptance suite.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{infinitude_at_c, min_derived_length, Branch, InfinitudeRule, Verdict};
use crate::error::{Error, Result};
use crate::oracle::cycle_check;
use crate::signature::rh_index;
use crate::tower::{
    closed_form_abelianisation, explicit_abelianisation, fuchsian_abelianisation,
    macbeath_tower_from, witness_chain_with, ChainExponents, TowerLevel, WitnessChain,
};
use crate::triangle::{
    abelianisation, curvature_class, derived_signature, is_perfect, signature_case, CaseForm,
    Curvature, TriangleParams,
};

pub const STATUS_OK: &str = "ok";
pub const STATUS_PERFECT: &str = "perfect: every finite quotient insoluble";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianisationSummary {
    pub e: u64,
    pub f: u64,
    pub order: String,
    pub image_orders: [u64; 3],
    pub invariant_factors: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLevelSummary {
    pub exponent: u64,
    pub layer: String,
    pub layer_order: String,
    pub signature: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub root: String,
    pub levels: Vec<ChainLevelSummary>,
    pub cumulative_order: String,
    pub derived_length: usize,
}

impl From<&WitnessChain> for ChainSummary {
    fn from(chain: &WitnessChain) -> Self {
        ChainSummary {
            root: chain.root.to_string(),
            levels: chain
                .steps
                .iter()
                .map(|s| ChainLevelSummary {
                    exponent: s.exponent,
                    layer: s.layer.to_string(),
                    layer_order: s.layer_order.to_string(),
                    signature: s.kernel.to_string(),
                })
                .collect(),
            cumulative_order: chain.cumulative_order.to_string(),
            derived_length: chain.claimed_derived_length,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerLevelSummary {
    pub order: String,
    pub genus: String,
    pub derived_length: usize,
    pub exponent: Option<u64>,
}

impl From<&TowerLevel> for TowerLevelSummary {
    fn from(level: &TowerLevel) -> Self {
        TowerLevelSummary {
            order: level.order.to_string(),
            genus: level.genus.to_string(),
            derived_length: level.derived_length,
            exponent: level.exponent,
        }
    }
}

/// Everything known about one triangle group.
///
/// Big integers are carried as decimal strings so the JSON form is exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub params: [u64; 3],
    pub curvature: Curvature,
    pub perfect: bool,
    pub status: String,
    pub abelianisation: AbelianisationSummary,
    pub derived_signature: Option<String>,
    pub case: Option<CaseForm>,
    pub c: Option<u8>,
    pub verdict: Option<Verdict>,
    pub branch: Option<Branch>,
    pub witness_permutation: Option<[u64; 3]>,
    pub chain: Option<ChainSummary>,
    pub chain_error: Option<String>,
    pub tower: Option<Vec<TowerLevelSummary>>,
    pub oracle_checked: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ReportOptions {
    pub oracle: bool,
    pub chain_exponents: ChainExponents,
}

fn status_for(t: &TriangleParams) -> (Curvature, bool, &'static str) {
    let curvature = curvature_class(t);
    let perfect = is_perfect(t);
    let status = match (curvature, perfect) {
        (Curvature::Spherical, _) => "spherical",
        (Curvature::Euclidean, _) => "euclidean",
        (Curvature::Hyperbolic, true) => STATUS_PERFECT,
        (Curvature::Hyperbolic, false) => STATUS_OK,
    };
    (curvature, perfect, status)
}

/// Full report; spherical, Euclidean and perfect inputs give a partial
/// report with an explanatory status. Only oracle mismatches are errors.
pub fn build_report(t: &TriangleParams, options: &ReportOptions) -> Result<ReportDocument> {
    let (curvature, perfect, status) = status_for(t);
    let ab = abelianisation(t);
    let mut doc = ReportDocument {
        params: t.as_array(),
        curvature,
        perfect,
        status: status.to_string(),
        abelianisation: AbelianisationSummary {
            e: ab.e,
            f: ab.f,
            order: ab.order.to_string(),
            image_orders: ab.image_orders,
            invariant_factors: ab.invariant_factors.clone(),
        },
        derived_signature: None,
        case: None,
        c: None,
        verdict: None,
        branch: None,
        witness_permutation: None,
        chain: None,
        chain_error: None,
        tower: None,
        oracle_checked: false,
    };
    if options.oracle {
        cycle_check(t)?;
    }
    if status != STATUS_OK {
        doc.oracle_checked = options.oracle;
        return Ok(doc);
    }
    let derived = derived_signature(t)?;
    let class = infinitude_at_c(t)?;
    doc.derived_signature = Some(derived.to_string());
    doc.case = Some(class.case);
    doc.c = Some(class.c);
    doc.verdict = Some(class.verdict_at_c);
    doc.branch = Some(class.branch);
    doc.witness_permutation = class.witness.map(|w| w.as_array());
    match witness_chain_with(t, options.chain_exponents) {
        Ok(chain) => {
            if options.oracle {
                check_chain(&chain)?;
            }
            doc.chain = Some(ChainSummary::from(&chain));
        }
        Err(e @ Error::MismatchDetected { .. }) => return Err(e),
        Err(e) => doc.chain_error = Some(e.to_string()),
    }
    if options.oracle {
        check_triple(t)?;
        doc.oracle_checked = true;
    }
    Ok(doc)
}

/// Report with a Macbeath tower on top of the witness chain. Unlike
/// [`build_report`], fails outright on inputs without a tower.
pub fn build_tower_report(
    t: &TriangleParams,
    depth: usize,
    exponents: &[u64],
    options: &ReportOptions,
) -> Result<ReportDocument> {
    // surfaces NotHyperbolic / PerfectGroup before anything else
    derived_signature(t)?;
    let chain = witness_chain_with(t, options.chain_exponents)?;
    let levels = macbeath_tower_from(&chain, depth, exponents)?;
    let mut doc = build_report(t, options)?;
    doc.chain = Some(ChainSummary::from(&chain));
    doc.chain_error = None;
    doc.tower = Some(levels.iter().map(TowerLevelSummary::from).collect());
    Ok(doc)
}

/// Cross-checks every closed form for one hyperbolic non-perfect triple
/// against the lattice oracle. Checks whose explicit lattice would be too
/// large to expand are skipped.
pub fn check_triple(t: &TriangleParams) -> Result<()> {
    cycle_check(t)?;
    let derived = derived_signature(t)?;
    let ab = abelianisation(t);
    let index = rh_index(&t.signature(), &derived)?;
    if index != ab.order {
        return Err(Error::mismatch(
            format!("Riemann-Hurwitz index of G' in {t}"),
            &ab.order,
            &index,
        ));
    }
    signature_case(&derived)?;
    check_signature_abelianisation(&derived)?;
    Ok(())
}

/// Compressed-lattice abelianisation against the closed form and, when
/// small enough, against the fully expanded lattice.
pub fn check_signature_abelianisation(sig: &crate::FuchsianSignature) -> Result<()> {
    let compressed = fuchsian_abelianisation(sig)?;
    if let Some(closed) = closed_form_abelianisation(sig) {
        if closed != compressed {
            return Err(Error::mismatch(
                format!("abelianisation of {sig}"),
                &closed,
                &compressed,
            ));
        }
    }
    match explicit_abelianisation(sig, None) {
        Ok(explicit) if explicit != compressed => Err(Error::mismatch(
            format!("explicit abelianisation of {sig}"),
            &explicit,
            &compressed,
        )),
        Ok(_) | Err(Error::InvalidArgument(_)) => Ok(()),
        Err(e) => Err(e),
    }
}

fn check_chain(chain: &WitnessChain) -> Result<()> {
    let sigs: Vec<_> = chain.signatures().collect();
    for (step, pair) in chain.steps.iter().zip(sigs.windows(2)) {
        let index = rh_index(pair[0], pair[1])?;
        if index != step.layer_order {
            return Err(Error::mismatch(
                format!("index of {} in {}", pair[1], pair[0]),
                &step.layer_order,
                &index,
            ));
        }
        match explicit_abelianisation(pair[0], Some(step.exponent)) {
            Ok(explicit) if explicit != step.layer => {
                return Err(Error::mismatch(
                    format!(
                        "explicit mod-{} abelianisation of {}",
                        step.exponent, pair[0]
                    ),
                    &explicit,
                    &step.layer,
                ))
            }
            Ok(_) | Err(Error::InvalidArgument(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Column order of the scan CSV.
pub const SCAN_COLUMNS: [&str; 8] = [
    "p",
    "q",
    "r",
    "case",
    "c",
    "verdict",
    "index",
    "derived_signature",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub case: u8,
    pub c: u8,
    pub verdict: Verdict,
    pub index: String,
    pub derived_signature: String,
}

impl ScanRow {
    pub fn record(&self) -> [String; 8] {
        [
            self.p.to_string(),
            self.q.to_string(),
            self.r.to_string(),
            self.case.to_string(),
            self.c.to_string(),
            self.verdict.to_string(),
            self.index.clone(),
            self.derived_signature.clone(),
        ]
    }
}

/// Hyperbolic non-perfect triples `2 <= p <= q <= r <= max`, lexicographic.
pub fn scan_triples(max: u64) -> Vec<TriangleParams> {
    let mut out = Vec::new();
    for p in 2..=max {
        for q in p..=max {
            for r in q..=max {
                let t = TriangleParams::new(p, q, r).expect("parameters >= 2");
                if t.is_hyperbolic() && !is_perfect(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// One row per triple of [`scan_triples`]; rows are computed in parallel
/// and returned in order. With `oracle`, every row is cross-checked first.
pub fn scan(max: u64, oracle: bool) -> Result<Vec<ScanRow>> {
    scan_triples(max)
        .par_iter()
        .map(|t| {
            if oracle {
                check_triple(t)?;
            }
            let derived = derived_signature(t)?;
            let class = infinitude_at_c(t)?;
            Ok(ScanRow {
                p: t.p(),
                q: t.q(),
                r: t.r(),
                case: class.case.number(),
                c: class.c,
                verdict: class.verdict_at_c,
                index: abelianisation(t).order.to_string(),
                derived_signature: derived.to_string(),
            })
        })
        .collect()
}

/// Example group for each case, in case order.
pub const CASE_EXAMPLES: [(u64, u64, u64); 8] = [
    (4, 4, 4),
    (2, 3, 12),
    (3, 3, 4),
    (2, 3, 8),
    (2, 4, 6),
    (2, 9, 15),
    (4, 9, 30),
    (4, 6, 10),
];

fn example_rows() -> Result<Vec<(TriangleParams, crate::FuchsianSignature, CaseForm)>> {
    CASE_EXAMPLES
        .iter()
        .zip(CaseForm::ALL)
        .map(|(&(p, q, r), expected)| {
            let t = TriangleParams::new(p, q, r)?;
            let derived = derived_signature(&t)?;
            let case = signature_case(&derived)?;
            if case != expected {
                return Err(Error::mismatch(format!("case of {t}"), expected, case));
            }
            Ok((t, derived, case))
        })
        .collect()
}

/// Compact signatures of the derived groups of the example triples.
pub fn table1() -> Result<String> {
    let mut out =
        String::from("case | derived signature form | example | derived signature of example\n");
    for (t, derived, case) in example_rows()? {
        writeln!(
            out,
            "{} | {} | {} | {}",
            case.number(),
            case.template(),
            t,
            derived
        )
        .expect("string write");
    }
    Ok(out)
}

/// Minimum derived length and infinitude at that length, per case.
pub fn table2() -> Result<String> {
    let mut out =
        String::from("case | derived signature form | c | infinitely many at derived length c?\n");
    for (t, _, case) in example_rows()? {
        let (c, _) = min_derived_length(&t)?;
        writeln!(
            out,
            "{} | {} | {} | {}",
            case.number(),
            case.template(),
            c,
            InfinitudeRule::for_case(case)
        )
        .expect("string write");
    }
    Ok(out)
}

/// Human-readable rendering of a report.
pub fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let [p, q, r] = doc.params;
    let w = &mut out;
    let _ = writeln!(w, "triangle group: ({p}, {q}, {r})");
    let _ = writeln!(w, "curvature: {}", doc.curvature);
    let _ = writeln!(w, "perfect: {}", doc.perfect);
    let _ = writeln!(w, "status: {}", doc.status);
    let ab = &doc.abelianisation;
    let factors: Vec<String> = ab
        .invariant_factors
        .iter()
        .map(|d| format!("C{d}"))
        .collect();
    let _ = writeln!(
        w,
        "abelianisation: {} (e = {}, f = {}, order {}), generator image orders {:?}",
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join(" x ")
        },
        ab.e,
        ab.f,
        ab.order,
        ab.image_orders
    );
    if let Some(sig) = &doc.derived_signature {
        let _ = writeln!(w, "derived signature: {sig}");
    }
    if let (Some(case), Some(c), Some(verdict), Some(branch)) =
        (doc.case, doc.c, doc.verdict, doc.branch)
    {
        let _ = writeln!(w, "case: {} {}", case.number(), case.template());
        let _ = writeln!(w, "minimum derived length c: {c}");
        let _ = write!(
            w,
            "quotients at derived length c: {verdict} (clause {branch}"
        );
        if let Some([a, b, d]) = doc.witness_permutation {
            let _ = write!(w, ", ordering ({a}, {b}, {d})");
        }
        let _ = writeln!(w, ")");
    }
    if let Some(chain) = &doc.chain {
        let _ = writeln!(w, "witness chain:");
        let _ = writeln!(w, "  L0 = {}", chain.root);
        for (i, level) in chain.levels.iter().enumerate() {
            let _ = writeln!(
                w,
                "  L{} = {}  (m = {}, layer {} of order {})",
                i + 1,
                level.signature,
                level.exponent,
                level.layer,
                level.layer_order
            );
        }
        let _ = writeln!(
            w,
            "  quotient order {}, derived length {}",
            chain.cumulative_order, chain.derived_length
        );
    }
    if let Some(err) = &doc.chain_error {
        let _ = writeln!(w, "witness chain: unavailable ({err})");
    }
    if let Some(tower) = &doc.tower {
        let _ = writeln!(w, "tower:");
        for level in tower {
            let via = level
                .exponent
                .map_or("base".to_string(), |m| format!("m = {m}"));
            let _ = writeln!(
                w,
                "  order {}, genus {}, derived length {} ({via})",
                level.order, level.genus, level.derived_length
            );
        }
    }
    if doc.oracle_checked {
        let _ = writeln!(w, "oracle: all cross-checks passed");
    }
    out
}
