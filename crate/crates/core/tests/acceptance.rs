//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. All comparisons are exact.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use trisol::classify::verdict_from_kernel_genus;
use trisol::oracle::{fp_abelianisation, triangle_relations, ImageOrder};
use trisol::report::{
    build_report, check_signature_abelianisation, scan_triples, table1, table2, ChainSummary,
    ReportOptions,
};
use trisol::{
    abelianisation, chetiya_case, derived_signature, infinitude_at_c, km_kernel, macbeath_step,
    parse_signature, rh_index, signature_case, witness_chain, CaseForm, Error, FuchsianSignature,
    TriangleParams, Verdict,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn t(p: u64, q: u64, r: u64) -> TriangleParams {
    TriangleParams::new(p, q, r).unwrap()
}

fn sig(s: &str) -> FuchsianSignature {
    parse_signature(s).unwrap()
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Reference derived signatures of the eight example groups, one per case.
const TABLE1: [((u64, u64, u64), &str); 8] = [
    ((4, 4, 4), "(3; -)"),
    ((2, 3, 12), "(1; 2)"),
    ((3, 3, 4), "(0; 4^(3))"),
    ((2, 3, 8), "(0; 4, 3^(2))"),
    ((2, 4, 6), "(0; 2^(2), 3^(2))"),
    ((2, 9, 15), "(0; 3, 5, 2^(3))"),
    ((4, 9, 30), "(1; 5, 2^(3), 3^(2))"),
    ((4, 6, 10), "(0; 2^(2), 3^(2), 5^(2))"),
];

fn table1_reproduction() -> Outcome {
    for (case, ((p, q, r), expected)) in CaseForm::ALL.into_iter().zip(TABLE1) {
        let derived = derived_signature(&t(p, q, r)).map_err(|e| e.to_string())?;
        ensure!(
            derived.to_string() == expected,
            "({p}, {q}, {r}): got {derived}, expected {expected}"
        );
        ensure!(
            parse_signature(expected).unwrap() == derived,
            "({p}, {q}, {r}): parse mismatch"
        );
        let got = signature_case(&derived).map_err(|e| e.to_string())?;
        ensure!(got == case, "({p}, {q}, {r}): {got}, expected {case}");
    }
    let rendered = table1().map_err(|e| e.to_string())?;
    ensure!(
        rendered == include_str!("golden/table1.txt"),
        "rendered table differs from golden file"
    );
    Ok("8 rows".into())
}

fn example_239() -> Outcome {
    let g = t(2, 3, 9);
    let mu = g.signature().mu();
    ensure!(mu == BigRational::new(1.into(), 18.into()), "mu = {mu}");
    let ab = abelianisation(&g);
    ensure!(ab.order == BigUint::from(3u32), "index {}", ab.order);
    ensure!(
        ab.invariant_factors == [3],
        "invariant factors {:?}",
        ab.invariant_factors
    );
    ensure!(
        ab.image_orders == [1, 3, 3],
        "image orders {:?}",
        ab.image_orders
    );
    let derived = derived_signature(&g).map_err(|e| e.to_string())?;
    ensure!(
        derived == sig("(0; 2^(3), 3)"),
        "derived signature {derived}"
    );
    let index = rh_index(&g.signature(), &derived).map_err(|e| e.to_string())?;
    ensure!(
        index == BigUint::from(3u32),
        "Riemann-Hurwitz index {index}"
    );
    Ok(format!("mu = {mu}, G/G' = C3, G' = {derived}"))
}

fn order_48() -> Outcome {
    let g = t(3, 3, 4);
    let chain = witness_chain(&g).map_err(|e| e.to_string())?;
    ensure!(
        chain.cumulative_order == BigUint::from(48u32),
        "order {}",
        chain.cumulative_order
    );
    ensure!(
        chain.claimed_derived_length == 2,
        "derived length {}",
        chain.claimed_derived_length
    );
    ensure!(chain.steps.len() == 2, "{} layers", chain.steps.len());
    ensure!(
        chain.final_kernel().elliptic_count().is_zero(),
        "final kernel {} has torsion",
        chain.final_kernel()
    );
    let class = infinitude_at_c(&g).map_err(|e| e.to_string())?;
    ensure!(
        class.c == 2 && class.verdict_at_c == Verdict::Finite,
        "classified {class:?}"
    );
    let report = build_report(&g, &ReportOptions::default()).map_err(|e| e.to_string())?;
    ensure!(
        report.verdict == Some(Verdict::Finite),
        "report verdict {:?}",
        report.verdict
    );
    ensure!(
        report.chain == Some(ChainSummary::from(&chain)),
        "report witness differs from witness_chain"
    );
    Ok(format!(
        "{} -> order 48",
        chain
            .signatures()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" > ")
    ))
}

fn derived_signature_scan() -> Outcome {
    let triples = scan_triples(60);
    for g in &triples {
        let [p, q, r] = g.as_array();
        let derived = derived_signature(g).map_err(|e| format!("{g}: {e}"))?;
        let periods: Vec<u64> = derived.periods().collect();
        for (i, &a) in periods.iter().enumerate() {
            for &b in &periods[i + 1..] {
                ensure!(
                    gcd(a, b) == 1,
                    "{g}: periods {a} and {b} of {derived} share a factor"
                );
            }
        }
        signature_case(&derived).map_err(|e| format!("{g}: {e}"))?;
        let expected = BigUint::from(p) * q * r / lcm(lcm(p, q), r);
        let index = rh_index(&g.signature(), &derived).map_err(|e| format!("{g}: {e}"))?;
        ensure!(index == expected, "{g}: index {index}, expected {expected}");
    }
    Ok(format!("{} triples", triples.len()))
}

fn oracle_equivalence() -> Outcome {
    let triples = scan_triples(60);
    for g in &triples {
        let [p, q, r] = g.as_array();
        let e = lcm(lcm(gcd(p, q), gcd(q, r)), gcd(p, r));
        let f = gcd(gcd(p, q), r);
        let images = [gcd(p, lcm(q, r)), gcd(q, lcm(p, r)), gcd(r, lcm(p, q))];
        let ab = abelianisation(g);
        ensure!(
            ab.e == e && ab.f == f,
            "{g}: closed form e = {}, f = {}",
            ab.e,
            ab.f
        );
        ensure!(
            ab.image_orders == images,
            "{g}: closed form images {:?}",
            ab.image_orders
        );
        let expected: Vec<u64> = [f, e].into_iter().filter(|&d| d > 1).collect();
        ensure!(
            ab.invariant_factors == expected,
            "{g}: closed form factors {:?}",
            ab.invariant_factors
        );

        let relations = triangle_relations::<i64>(g).map_err(|e| e.to_string())?;
        let fp = fp_abelianisation(2, &relations).map_err(|e| format!("{g}: {e}"))?;
        let oracle_factors: Vec<u64> = fp.invariant_factors().iter().map(|&d| d as u64).collect();
        ensure!(
            fp.free_rank() == 0,
            "{g}: oracle free rank {}",
            fp.free_rank()
        );
        ensure!(
            oracle_factors == expected,
            "{g}: oracle factors {oracle_factors:?}, expected {expected:?}"
        );
        let third = fp.element_order(&[-1, -1]).map_err(|e| e.to_string())?;
        let oracle_images = [&fp.image_orders()[0], &fp.image_orders()[1], &third];
        for (k, got) in oracle_images.into_iter().enumerate() {
            ensure!(
                *got == ImageOrder::Finite(images[k] as i64),
                "{g}: oracle image of x{} is {got:?}",
                k + 1
            );
        }

        let derived = derived_signature(g).map_err(|e| e.to_string())?;
        check_signature_abelianisation(&derived).map_err(|e| format!("{g}: {e}"))?;
    }
    Ok(format!("{} triples, 0 mismatches", triples.len()))
}

fn clause_d_consistency() -> Outcome {
    let mut compared = 0usize;
    for g in scan_triples(60) {
        let derived = derived_signature(&g).map_err(|e| e.to_string())?;
        let case = signature_case(&derived).map_err(|e| e.to_string())?;
        if !matches!(case, CaseForm::Case4 | CaseForm::Case6) {
            continue;
        }
        let by_clause = infinitude_at_c(&g).map_err(|e| e.to_string())?.verdict_at_c;
        let by_genus = verdict_from_kernel_genus(&g).map_err(|e| format!("{g}: {e}"))?;
        ensure!(
            by_clause == by_genus,
            "{g}: clause says {by_clause}, kernel genus says {by_genus}"
        );
        compared += 1;
    }
    let v336 = infinitude_at_c(&t(3, 3, 6))
        .map_err(|e| e.to_string())?
        .verdict_at_c;
    ensure!(v336 == Verdict::Infinite, "(3, 3, 6) gave {v336}");
    let v334 = infinitude_at_c(&t(3, 3, 4))
        .map_err(|e| e.to_string())?
        .verdict_at_c;
    ensure!(v334 == Verdict::Finite, "(3, 3, 4) gave {v334}");
    Ok(format!("{compared} Case 4/6 triples agree"))
}

/// Reference c and infinitude column, one row per case.
const TABLE2: [(u8, &str); 8] = [
    (1, "Never"),
    (3, "Always"),
    (2, "Whenever g > 0"),
    (3, "Depends on p, q and r"),
    (2, "Whenever g > 0"),
    (3, "Depends on p, q and r"),
    (3, "Always"),
    (2, "Whenever g > 0"),
];

fn table2_reproduction() -> Outcome {
    let rendered = table2().map_err(|e| e.to_string())?;
    ensure!(
        rendered == include_str!("golden/table2.txt"),
        "rendered table differs from golden file"
    );
    for (line, (case, (c, rule))) in rendered
        .lines()
        .skip(1)
        .zip(CaseForm::ALL.into_iter().zip(TABLE2))
    {
        let cols: Vec<&str> = line.split(" | ").collect();
        ensure!(cols[0] == case.number().to_string(), "row order: {line}");
        ensure!(cols[2] == c.to_string() && cols[3] == rule, "row {line}");
    }
    Ok("8 rows".into())
}

fn macbeath() -> Outcome {
    // Hurwitz anchor: 84 (g - 1) = 168 gives g = 3
    let hurwitz = t(2, 3, 7);
    let hurwitz_genus = 168u32 / 84 + 1;
    ensure!(hurwitz_genus == 3, "genus {hurwitz_genus}");
    let step = macbeath_step(&hurwitz, &168u32.into(), &hurwitz_genus.into(), 2)
        .map_err(|e| e.to_string())?;
    ensure!(
        step.output_order == BigUint::from(10752u32),
        "order {}",
        step.output_order
    );
    ensure!(
        step.output_genus == BigUint::from(129u32),
        "genus {}",
        step.output_genus
    );
    let wrong = macbeath_step(&hurwitz, &168u32.into(), &2u32.into(), 2);
    ensure!(
        matches!(wrong, Err(Error::InconsistentData(_))),
        "genus 2 for order 168 accepted"
    );

    let mut pool = Vec::new();
    for g in scan_triples(12) {
        if let Ok(chain) = witness_chain(&g) {
            // 2g log2(m) must stay below the order guard for every m tried
            let genus = chain.final_kernel().genus();
            if !genus.is_zero() && genus.bits() <= 16 {
                pool.push((
                    g,
                    chain.cumulative_order.clone(),
                    chain.final_kernel().genus().clone(),
                ));
            }
        }
    }
    ensure!(!pool.is_empty(), "no base quotients");
    let mut rng = StdRng::seed_from_u64(0x0072_6961_6e67_6c65);
    for _ in 0..100 {
        let (g, order, genus) = &pool[rng.gen_range(0..pool.len())];
        let m: u64 = rng.gen_range(2..=7);
        let step = macbeath_step(g, order, genus, m).map_err(|e| format!("{g}: {e}"))?;
        let exponent = u32::try_from(genus * 2u32).unwrap();
        let expected = BigUint::from(m).pow(exponent) * order;
        ensure!(
            step.output_order == expected,
            "{g}, m = {m}: order {}",
            step.output_order
        );
        ensure!(
            step.output_genus > *genus,
            "{g}, m = {m}: genus {} <= {genus}",
            step.output_genus
        );
        // 2 - 2g' = |G| (1/p + 1/q + 1/r - 1)
        let [p, q, r] = g.as_array();
        let chi = BigRational::new(1.into(), p.into())
            + BigRational::new(1.into(), q.into())
            + BigRational::new(1.into(), r.into())
            - BigRational::one();
        let lhs = BigRational::from_integer(2.into())
            - BigRational::from_integer((&step.output_genus * 2u32).into());
        ensure!(
            lhs == chi * BigRational::from_integer(step.output_order.clone().into()),
            "{g}: Riemann-Hurwitz"
        );
    }
    Ok(format!(
        "100 instances over {} base quotients; Hurwitz 168 -> genus 3",
        pool.len()
    ))
}

fn chetiya() -> Outcome {
    let mut checked = 0usize;
    for m in 2..=12u64 {
        for l in 2..=12u64 {
            for u in 1..=12u64 {
                if gcd(l, m) != 1 || gcd(u, m) != 1 {
                    continue;
                }
                let g = t(m, l * u, l);
                if !g.is_hyperbolic() {
                    continue;
                }
                let report = chetiya_case(m, l, u).map_err(|e| format!("({m}, {l}, {u}): {e}"))?;
                let n = BigUint::from(m).pow(l as u32 - 1);
                let twice: num_bigint::BigInt = num_bigint::BigInt::from(m).pow(l as u32 - 2)
                    * (l as i64 * m as i64 - l as i64 - 2 * m as i64)
                    + 2;
                let genus = (twice / 2u32).to_biguint().unwrap();
                ensure!(
                    report.index == n && report.genus == genus,
                    "({m}, {l}, {u}): formulas"
                );
                let derived = derived_signature(&g).map_err(|e| e.to_string())?;
                ensure!(
                    derived == report.derived,
                    "({m}, {l}, {u}): derived {derived} vs {}",
                    report.derived
                );
                let km = km_kernel(&derived, m).map_err(|e| format!("({m}, {l}, {u}): {e}"))?;
                ensure!(
                    km.quotient_order == n,
                    "({m}, {l}, {u}): index {}",
                    km.quotient_order
                );
                ensure!(
                    km.kernel == report.kernel,
                    "({m}, {l}, {u}): kernel {} vs {}",
                    km.kernel,
                    report.kernel
                );
                ensure!(
                    *km.kernel.genus() == genus,
                    "({m}, {l}, {u}): pipeline genus {}",
                    km.kernel.genus()
                );
                if l == 2 || (l == 3 && m == 2) {
                    ensure!(
                        genus.is_zero(),
                        "({m}, {l}, {u}): genus {genus}, expected 0"
                    );
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} parameter sets"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 Case table reproduction", table1_reproduction),
        ("2 Example (2,3,9)", example_239),
        ("3 Order-48 witness for (3,3,4)", order_48),
        ("4 Derived-signature scan, r <= 60", derived_signature_scan),
        ("5 Oracle equivalence, r <= 60", oracle_equivalence),
        ("6 Clause (d) vs kernel genus", clause_d_consistency),
        ("7 Derived-length table reproduction", table2_reproduction),
        ("8 Macbeath monotonicity", macbeath),
        ("9 Chetiya family", chetiya),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why} ({secs:.2}s)");
            }
        }
    }
    println!("{} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
