//! Acceptance gate for the whole library: each test is one criterion,
//! verified at exact equality (no tolerances anywhere), and prints a
//! single `[criterion N] PASS` line with the concrete numbers on success.
//!
//! Orbit tables are shared across criteria through per-degree mutexes so
//! the heavy levels (d = 5 up to level 6) are computed once per run.

use misiurewicz::modp::{
    audit, certify_polynomial, certify_with_table, ddf, CertifyOptions, ModPoly, Verdict,
};
use misiurewicz::orbit::{expected_rs_degrees, window_misiurewicz_degree, OrbitTable};
use misiurewicz::padic::{
    coeff_valuations, min_valuation, newton_polygon, newton_polygon_sum, padic_root_count,
    polygon_sum, power_valuation_bound, principal_polygon, qp_factor_degree_bound, NewtonError,
};
use misiurewicz::verify::{
    check_s_polygon, check_tau_product, check_theorem_polygons, CheckReport,
};
use misiurewicz::{IntPoly, Prime};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::{Mutex, OnceLock};

fn table_for(d: u64) -> &'static Mutex<OrbitTable> {
    static D3: OnceLock<Mutex<OrbitTable>> = OnceLock::new();
    static D5: OnceLock<Mutex<OrbitTable>> = OnceLock::new();
    static D7: OnceLock<Mutex<OrbitTable>> = OnceLock::new();
    let cell = match d {
        3 => &D3,
        5 => &D5,
        7 => &D7,
        _ => panic!("no shared table for d = {d}"),
    };
    cell.get_or_init(|| Mutex::new(OrbitTable::new(d).expect("valid family degree")))
}

fn prime(p: u64) -> Prime {
    Prime::new(p).expect("prime")
}

fn assert_all_pass(reports: &[CheckReport], what: &str) {
    for r in reports {
        assert!(
            r.passed,
            "{what}: {} (d={}, index={:?}) expected {} but got {}",
            r.check_id, r.d, r.index, r.expected, r.actual
        );
    }
}

#[test]
fn criterion_1_degree_formulas() {
    let cases = [(3u64, 8u64), (5, 5), (7, 4)];
    let mut levels = 0;
    for (d, max_n) in cases {
        let mut table = table_for(d).lock().unwrap();
        table.extend_to(max_n).unwrap();
        for n in 2..=max_n {
            let closed = expected_rs_degrees(d, n).unwrap();
            let deg_r = table.r(n).degree().finite().unwrap() as u64;
            let deg_s = table.s(n).degree().finite().unwrap() as u64;
            assert_eq!(deg_r, closed.deg_r, "deg r_{n} for d = {d}");
            assert_eq!(deg_s, closed.deg_s, "deg s_{n} for d = {d}");
            levels += 1;
        }
    }
    println!(
        "[criterion 1] PASS: orbit degrees equal their closed forms at {levels} levels \
         (d=3 n<=8, d=5 n<=5, d=7 n<=4)"
    );
}

#[test]
fn criterion_2_s_polygon() {
    let mut total = 0;
    for (d, max_m) in [(3u64, 6u64), (5, 4)] {
        let mut table = table_for(d).lock().unwrap();
        let reports = check_s_polygon(&mut table, max_m).unwrap();
        assert_all_pass(&reports, "s-polygon");
        total += reports.len();
    }
    println!(
        "[criterion 2] PASS: denominator polygons equal L((0,D_m),(d^(m-1),d^(m-1))) \
         in all {total} instances (d=3 m<=6, d=5 m<=4)"
    );
}

#[test]
fn criterion_3_tau_identity() {
    let mut total = 0;
    for (d, max_m) in [(3u64, 6u64), (5, 4)] {
        let mut table = table_for(d).lock().unwrap();
        let reports = check_tau_product(&mut table, max_m).unwrap();
        assert_all_pass(&reports, "tau product identity");
        total += reports.len();
    }
    println!(
        "[criterion 3] PASS: tau_m = -(bd)^m G_(m-1)...G_1 holds exactly in all \
         {total} instances (d=3 m<=6, d=5 m<=4)"
    );
}

#[test]
fn criterion_4_theorem_polygons() {
    let mut total = 0;
    for (d, max_m) in [(3u64, 5u64), (5, 3)] {
        let mut table = table_for(d).lock().unwrap();
        let reports = check_theorem_polygons(&mut table, max_m).unwrap();
        assert_all_pass(&reports, "theorem polygons");
        if d == 3 {
            let headline = reports
                .iter()
                .find(|r| r.check_id == "misiurewicz-polygon" && r.index == Some(4))
                .expect("m = 4 report present");
            assert_eq!(headline.actual, "L((0,80),(53,53))");
        }
        total += reports.len();
    }
    println!(
        "[criterion 4] PASS: Misiurewicz and tau polygons match the theorem in all \
         {total} instances, including N3-(G_4) = L((0,80),(53,53))"
    );
}

#[test]
fn criterion_5_d3_m4_full_analysis() {
    let mut table = table_for(3).lock().unwrap();
    let cert = certify_with_table(&mut table, 4, &CertifyOptions::default()).unwrap();
    let analysis = &cert.analysis;
    assert_eq!(analysis.degree, 55, "deg G_4");
    assert_eq!(analysis.polygon_bound, 53, "forced Q_3 factor degree");
    assert_eq!(analysis.qd_root_count, Some(2), "simple Q_3 roots");
    assert_eq!(analysis.verdict, Verdict::IrreducibleOverQ);
    // The same count through the public root-counting entry point.
    let g4 = table.misiurewicz_direct(4).unwrap();
    assert_eq!(padic_root_count(&g4, prime(3), 20).unwrap(), 2);
    assert_eq!(audit(analysis).unwrap(), Verdict::IrreducibleOverQ);
    println!(
        "[criterion 5] PASS: d=3 m=4 reproduces the expected analysis \
         (degree 55, polygon-forced Q_3 factor of degree 53, 2 simple roots, IrreducibleOverQ)"
    );
}

#[test]
fn criterion_6_main_theorem_small_m() {
    let cases = [(3u64, 2u64), (3, 3), (5, 2), (5, 3), (5, 4), (5, 5)];
    let opts = CertifyOptions::default();
    for (d, m) in cases {
        let mut table = table_for(d).lock().unwrap();
        let cert = certify_with_table(&mut table, m, &opts).unwrap();
        assert_eq!(
            cert.analysis.verdict,
            Verdict::IrreducibleOverQ,
            "certificate verdict for d = {d}, m = {m}"
        );
        assert_eq!(audit(&cert.analysis).unwrap(), Verdict::IrreducibleOverQ);
        if m >= 3 {
            let window = window_misiurewicz_degree(d, m).unwrap();
            assert_eq!(cert.analysis.degree, window, "window degree for d = {d}, m = {m}");
            assert_eq!(
                cert.analysis.polygon_bound, window,
                "polygon-exact bound for d = {d}, m = {m}"
            );
            assert!(
                cert.analysis.per_prime.is_empty(),
                "polygon-exact certificates need no modular evidence"
            );
        }
    }
    println!(
        "[criterion 6] PASS: certificates for (3,2),(3,3),(5,2),(5,3),(5,4),(5,5) all \
         conclude IrreducibleOverQ; the 3<=m<=d cases are polygon-exact with \
         bound = degree = d^m - d^(m-1) - 1"
    );
}

#[test]
fn criterion_7_ratio_reporting() {
    let mut table = table_for(3).lock().unwrap();
    let mut lines = Vec::new();
    for m in [4u64, 5] {
        let g = table.misiurewicz_direct(m).unwrap();
        let (bound, _) = qp_factor_degree_bound(&g, prime(3)).unwrap();
        let deg = g.degree().finite().unwrap() as u64;
        // bound/deg >= 1 - 1/27 - 1/50 = 1273/1350, checked in integers.
        assert!(
            u128::from(bound) * 1350 >= 1273 * u128::from(deg),
            "ratio threshold at m = {m}: {bound}/{deg}"
        );
        let scaled = u128::from(bound) * 1_000_000 / u128::from(deg);
        lines.push(format!(
            "m={m}: {bound}/{deg} ~= {}.{:06}",
            scaled / 1_000_000,
            scaled % 1_000_000
        ));
    }
    println!(
        "[criterion 7] PASS: polygon bound over degree stays above 1 - 1/27 - 0.02 \
         ({})",
        lines.join("; ")
    );
}

/// Random polynomial with p-power-weighted coefficients so polygons have
/// interesting shapes. The leading coefficient is forced nonzero; the
/// constant one optionally too.
fn random_poly(
    rng: &mut ChaCha8Rng,
    p: u64,
    min_deg: usize,
    max_deg: usize,
    unit_constant: bool,
) -> IntPoly {
    let deg = rng.gen_range(min_deg..=max_deg);
    let mut coeffs = Vec::with_capacity(deg + 1);
    for i in 0..=deg {
        let forced = i == deg || (i == 0 && unit_constant);
        if !forced && rng.gen_ratio(1, 5) {
            coeffs.push(BigInt::from(0));
            continue;
        }
        let mut unit = 0i64;
        while unit == 0 {
            unit = rng.gen_range(-9..=9);
        }
        let scale = BigInt::from(p).pow(rng.gen_range(0..5));
        coeffs.push(BigInt::from(unit) * scale);
    }
    IntPoly::new(coeffs)
}

#[test]
fn criterion_8_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x706f_6c79_676f_6e73);

    // Polygon-sum law: product polygons equal summed polygons, both the
    // principal and the full variants, 200 pairs per prime.
    for p in [2u64, 3, 5] {
        let pr = prime(p);
        for _ in 0..200 {
            let f = random_poly(&mut rng, p, 0, 8, false);
            let g = random_poly(&mut rng, p, 0, 8, false);
            let fg = f.mul(&g);
            let summed = polygon_sum(&[
                principal_polygon(&f, pr).unwrap(),
                principal_polygon(&g, pr).unwrap(),
            ]);
            assert_eq!(principal_polygon(&fg, pr).unwrap(), summed, "principal sum at p={p}");
            let full = newton_polygon_sum(&[
                newton_polygon(&f, pr).unwrap(),
                newton_polygon(&g, pr).unwrap(),
            ]);
            assert_eq!(newton_polygon(&fg, pr).unwrap(), full, "full sum at p={p}");
        }
    }

    // Power-valuation lower bound against the actual power, 200 draws.
    let mut bounds_checked = 0;
    while bounds_checked < 200 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let pr = prime(p);
        let k: u32 = rng.gen_range(1..=4);
        let f = random_poly(&mut rng, p, 0, 6, false);
        let deg = f.degree().finite().unwrap();
        let i = rng.gen_range(0..=(k as usize) * deg) as u64;
        match power_valuation_bound(&f, pr, k, i) {
            Ok(bound) => {
                let actual = coeff_valuations(&f.pow(u64::from(k)), pr)[i as usize];
                assert!(
                    actual >= bound,
                    "v_{i}(f^{k}) = {actual} < bound {bound} at p = {p} for f = {f}"
                );
                bounds_checked += 1;
            }
            Err(NewtonError::EnumerationTooLarge { .. }) => continue,
            Err(other) => panic!("unexpected bound failure: {other}"),
        }
    }

    // Valuation algebra: additivity over products, min rule over sums.
    for _ in 0..200 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let pr = prime(p);
        let f = random_poly(&mut rng, p, 0, 8, false);
        let g = random_poly(&mut rng, p, 0, 8, false);
        let vf = min_valuation(&f, pr).unwrap();
        let vg = min_valuation(&g, pr).unwrap();
        assert_eq!(min_valuation(&f.mul(&g), pr).unwrap(), vf + vg, "additivity at p={p}");
        let sum = f.add(&g);
        if !sum.is_zero() {
            assert!(min_valuation(&sum, pr).unwrap() >= vf.min(vg), "min rule at p={p}");
        }
    }

    // DDF conserves total degree on squarefree draws.
    let mut ddf_checked = 0;
    while ddf_checked < 200 {
        let q = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let deg = rng.gen_range(2..9usize);
        let mut coeffs: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..q)).collect();
        coeffs.push(1);
        let f = ModPoly::new(prime(q), coeffs);
        match ddf(&f) {
            Ok(multiset) => {
                assert_eq!(multiset.total(), deg as u64, "degree conservation mod {q}");
                ddf_checked += 1;
            }
            Err(_) => continue,
        }
    }

    // Auditor replay: every certificate the engine emits must replay to
    // the same verdict from its recorded evidence alone.
    let opts = CertifyOptions::default();
    let mut audited = 0;
    let mut trials = 0;
    while audited < 60 && trials < 600 {
        trials += 1;
        let p = [3u64, 5][rng.gen_range(0..2)];
        let f = random_poly(&mut rng, p, 2, 7, false);
        if let Ok(analysis) = certify_polynomial(&f, prime(p), &opts) {
            assert_eq!(audit(&analysis).unwrap(), analysis.verdict, "replay for {f}");
            audited += 1;
        }
    }
    assert!(audited >= 60, "audit replay sample too small: {audited}");

    // Negative control: a visibly reducible product must never be
    // certified irreducible (an inconclusive error is acceptable; a false
    // certificate is not). Constant terms are forced nonzero so the
    // certificate covers the whole product rather than a cofactor.
    let mut controls = 0;
    for _ in 0..110 {
        let p = [3u64, 5][rng.gen_range(0..2)];
        let f = random_poly(&mut rng, p, 1, 5, true);
        let g = random_poly(&mut rng, p, 1, 5, true);
        let product = f.mul(&g);
        if let Ok(analysis) = certify_polynomial(&product, prime(p), &opts) {
            assert_ne!(
                analysis.verdict,
                Verdict::IrreducibleOverQ,
                "false certificate for ({f}) * ({g}) at p = {p}"
            );
        }
        controls += 1;
    }

    println!(
        "[criterion 8] PASS: polygon-sum law (600 pairs), power bound (200 draws), \
         valuation algebra (200 pairs), DDF conservation (200 draws), auditor replay \
         ({audited} certificates), negative controls ({controls} reducible products, \
         zero false certificates)"
    );
}

#[test]
fn criterion_9_dual_route_equality() {
    let mut instances = 0;
    for d in [3u64, 5] {
        let mut table = table_for(d).lock().unwrap();
        for m in 1..=5 {
            let direct = table.misiurewicz_direct(m).unwrap();
            let via_tau = table.misiurewicz_via_tau(m).unwrap();
            assert_eq!(direct, via_tau, "routes disagree at d = {d}, m = {m}");
            instances += 1;
        }
    }
    println!(
        "[criterion 9] PASS: misiurewicz_direct equals misiurewicz_via_tau at all \
         {instances} instances (d = 3 and 5, m <= 5)"
    );
}
