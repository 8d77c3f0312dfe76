//! Instance checkers that compare every computed object — orbit degrees,
//! Newton polygons, product identities, decomposition-term geometry, and
//! irreducibility verdicts — against their closed-form predictions, and
//! emit structured pass/fail reports.
//!
//! Every [`CheckReport`] carries canonical `expected` and `actual`
//! renderings and passes exactly when the two strings are equal, so the
//! report stream is a byte-stable regression oracle: any change in any
//! computed object shows up as a string mismatch. Big polynomials are
//! rendered as degree + digest rather than in full; small ones verbatim.
//!
//! A deliberate negative control is built in: `inject_corruption` perturbs
//! one orbit level before checking, which must flip checks to failed (and
//! demonstrably does — see the tests).

use crate::arith::{big_pow, is_prime_u64, Prime};
use crate::modp::{certify_with_table, CertifyError, CertifyOptions, Verdict};
use crate::orbit::{expected_rs_degrees, repunit, window_misiurewicz_degree, OrbitError, OrbitTable};
use crate::padic::{ord_p, principal_polygon, qp_factor_degree_bound, NewtonError};
use crate::poly::{Degree, IntPoly, SizeGuard};
use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("family degree {d} must be a prime of at least 3")]
    BadFamilyDegree { d: u64 },
    #[error("verification needs max_m >= 2, got {max_m}")]
    BadRange { max_m: u64 },
    #[error("{context} exceeds u64 range")]
    Overflow { context: String },
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

/// One verified claim. `passed` holds exactly when `expected` and
/// `actual` agree byte-for-byte.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub d: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

fn report(
    check_id: &str,
    d: u64,
    index: Option<u64>,
    p: Option<u64>,
    expected: String,
    actual: String,
) -> CheckReport {
    let passed = expected == actual;
    CheckReport {
        check_id: check_id.to_string(),
        d,
        index,
        p,
        expected,
        actual,
        passed,
    }
}

/// Pass/fail totals over a report stream.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifySummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

pub fn summarize(reports: &[CheckReport]) -> VerifySummary {
    let passed = reports.iter().filter(|r| r.passed).count();
    VerifySummary {
        total: reports.len(),
        passed,
        failed: reports.len() - passed,
    }
}

fn pow_u64(base: u64, exp: u64, context: &str) -> Result<u64, VerifyError> {
    let exp = u32::try_from(exp).map_err(|_| VerifyError::Overflow {
        context: context.to_string(),
    })?;
    base.checked_pow(exp).ok_or_else(|| VerifyError::Overflow {
        context: context.to_string(),
    })
}

fn fmt_degree(deg: Degree) -> String {
    match deg.finite() {
        Some(n) => n.to_string(),
        None => "-inf".to_string(),
    }
}

/// Canonical vertex-chain rendering, matching `PrincipalPolygon::render`.
fn render_vertices(vertices: &[(u64, u64)]) -> String {
    let parts: Vec<String> = vertices
        .iter()
        .map(|&(x, y)| format!("({x},{y})"))
        .collect();
    format!("L({})", parts.join(","))
}

/// Canonical polynomial rendering: small polynomials verbatim, large ones
/// as degree plus an order-sensitive digest of the coefficient stream
/// (FNV-1a over decimal strings) plus a coefficient checksum. Two equal
/// polynomials always render identically; unequal ones differ in degree,
/// digest, or checksum except with negligible probability — and every
/// identity rendered this way is also asserted exactly elsewhere.
fn render_poly(f: &IntPoly) -> String {
    let Some(deg) = f.degree().finite() else {
        return "0".to_string();
    };
    if deg <= 12 {
        return f.to_string();
    }
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let modulus = BigInt::from((1u64 << 61) - 1);
    let mut csum = BigInt::from(0u8);
    for c in f.coeffs() {
        for &byte in c.to_string().as_bytes() {
            hash = (hash ^ u64::from(byte)).wrapping_mul(0x0000_0100_0000_01b3);
        }
        hash = (hash ^ u64::from(b',')).wrapping_mul(0x0000_0100_0000_01b3);
        csum = (csum + c).mod_floor(&modulus);
    }
    format!("poly[deg={deg};fnv64={hash:016x};csum={csum}]")
}

fn family_prime(d: u64) -> Result<Prime, VerifyError> {
    if d < 3 {
        return Err(VerifyError::BadFamilyDegree { d });
    }
    Prime::new(d).map_err(|_| VerifyError::BadFamilyDegree { d })
}

/// Orbit degrees against their closed forms, n in [2, max_n].
pub fn check_rs_degrees(table: &mut OrbitTable, max_n: u64) -> Result<Vec<CheckReport>, VerifyError> {
    let d = table.d();
    table.extend_to(max_n)?;
    let mut out = Vec::new();
    for n in 2..=max_n {
        let closed = expected_rs_degrees(d, n)?;
        let expected = format!("deg r = {}, deg s = {}", closed.deg_r, closed.deg_s);
        let actual = format!(
            "deg r = {}, deg s = {}",
            fmt_degree(table.r(n).degree()),
            fmt_degree(table.s(n).degree())
        );
        out.push(report("rs-degrees", d, Some(n), None, expected, actual));
    }
    Ok(out)
}

/// Polygon of the orbit denominator: one segment from (0, D_m) to
/// (d^{m-1}, d^{m-1}), m in [2, max_m].
pub fn check_s_polygon(table: &mut OrbitTable, max_m: u64) -> Result<Vec<CheckReport>, VerifyError> {
    let d = table.d();
    let p = family_prime(d)?;
    table.extend_to(max_m)?;
    let mut out = Vec::new();
    for m in 2..=max_m {
        let corner = pow_u64(d, m - 1, "s-polygon corner")?;
        let expected = render_vertices(&[(0, repunit(d, m)), (corner, corner)]);
        let actual = principal_polygon(table.s(m), p)?.render();
        out.push(report("s-polygon", d, Some(m), Some(d), expected, actual));
    }
    Ok(out)
}

/// Polygon of sigma_m: one segment from (0, D_m) to (d^{m-1}, d^{m-1}+1),
/// m in [3, max_m]. The m = 2 case is excluded by construction: sigma_2
/// is built from the constant s_1, its polygon degenerates, and the
/// closed form genuinely does not apply there.
pub fn check_sigma_polygon(
    table: &mut OrbitTable,
    max_m: u64,
) -> Result<Vec<CheckReport>, VerifyError> {
    let d = table.d();
    let p = family_prime(d)?;
    let mut out = Vec::new();
    for m in 3..=max_m {
        let corner = pow_u64(d, m - 1, "sigma-polygon corner")?;
        let expected = render_vertices(&[(0, repunit(d, m)), (corner, corner + 1)]);
        let sigma = table.sigma_tau(m)?.0;
        let actual = principal_polygon(&sigma, p)?.render();
        out.push(report("sigma-polygon", d, Some(m), Some(d), expected, actual));
    }
    Ok(out)
}

/// The product identity tau_m = -(bd)^m G_{m-1} ... G_1, m in [1, max_m]
/// (m = 1 is the base case tau_1 = -bd with an empty product).
pub fn check_tau_product(table: &mut OrbitTable, max_m: u64) -> Result<Vec<CheckReport>, VerifyError> {
    let d = table.d();
    let mut out = Vec::new();
    let mut product = IntPoly::one();
    for m in 1..=max_m {
        if m >= 2 {
            let g = table.misiurewicz_direct(m - 1)?;
            product = product.mul(&g);
        }
        let lead = IntPoly::monomial(-big_pow(&BigInt::from(d), m), m as usize);
        let rhs = product.mul(&lead);
        let lhs = table.tau(m)?;
        out.push(report(
            "tau-product",
            d,
            Some(m),
            None,
            render_poly(&rhs),
            render_poly(&lhs),
        ));
    }
    Ok(out)
}

/// The two theorem polygons for each m in [1, max_m]: the Misiurewicz
/// polynomial's single segment (0, d^m - 1) -> (deg*, deg*) with
/// deg* = d^m - d^{m-1} - 1, and tau_m's m-vertex chain
/// (d^i + (m-1-i), d^i * D_{m-i}) for i = 0..m-1.
pub fn check_theorem_polygons(
    table: &mut OrbitTable,
    max_m: u64,
) -> Result<Vec<CheckReport>, VerifyError> {
    let d = table.d();
    let p = family_prime(d)?;
    let mut out = Vec::new();
    for m in 1..=max_m {
        let dm = pow_u64(d, m, "theorem polygon d^m")?;
        let dm1 = dm / d;
        let end = dm - dm1 - 1;
        let expected = render_vertices(&[(0, dm - 1), (end, end)]);
        let g = table.misiurewicz_direct(m)?;
        let actual = principal_polygon(&g, p)?.render();
        out.push(report("misiurewicz-polygon", d, Some(m), Some(d), expected, actual));

        let mut vertices = Vec::with_capacity(m as usize);
        for i in 0..m {
            let di = pow_u64(d, i, "tau polygon d^i")?;
            let x = di + (m - 1 - i);
            let y = di
                .checked_mul(repunit(d, m - i))
                .ok_or_else(|| VerifyError::Overflow {
                    context: "tau polygon vertex".to_string(),
                })?;
            vertices.push((x, y));
        }
        let expected = render_vertices(&vertices);
        let tau = table.tau(m)?;
        let actual = principal_polygon(&tau, p)?.render();
        out.push(report("tau-polygon", d, Some(m), Some(d), expected, actual));
    }
    Ok(out)
}

/// Geometry of the decomposition terms F_k whose sum is -bd*G_m: every
/// vertex of every N^-(F_k) must lie on or above the chord through
/// (1, d^m) and (d^m - d^{m-1}, d^m - d^{m-1}); the two coefficient
/// valuations of bd*G_m at those abscissas are pinned exactly; and the
/// window inequality d^m - d^{m-1} - 1 >= D_m * (d-2) holds.
pub fn check_fk_geometry(table: &mut OrbitTable, m: u64) -> Result<Vec<CheckReport>, VerifyError> {
    let d = table.d();
    let p = family_prime(d)?;
    let dm = pow_u64(d, m, "term geometry d^m")?;
    let dm1 = dm / d;
    let chord_a = (1u64, dm);
    let chord_b = (dm - dm1, dm - dm1);
    let on_or_above = |x: u64, y: u64| -> bool {
        // Cross product against the chord direction; chord_b.0 > chord_a.0.
        let run = chord_b.0 as i128 - chord_a.0 as i128;
        let rise = chord_b.1 as i128 - chord_a.1 as i128;
        run * (y as i128 - chord_a.1 as i128) >= rise * (x as i128 - chord_a.0 as i128)
    };

    let mut out = Vec::new();
    let terms = table.decomposition_terms(m)?;
    for (k, term) in terms.iter().enumerate() {
        let polygon = principal_polygon(term, p)?;
        let expected = "all vertices on or above the chord".to_string();
        let actual = match polygon
            .vertices()
            .iter()
            .find(|&&(x, y)| !on_or_above(x, y))
        {
            None => expected.clone(),
            Some(&(x, y)) => format!("vertex ({x},{y}) lies below the chord"),
        };
        out.push(report(&format!("term-chord-k{k}"), d, Some(m), Some(d), expected, actual));
    }

    let g = table.misiurewicz_direct(m)?;
    let bd_g = g.mul(&IntPoly::monomial(BigInt::from(d), 1));
    let coeff_val = |index: u64| -> String {
        bd_g.coeffs()
            .get(index as usize)
            .map_or("absent".to_string(), |c| ord_p(c, p).to_string())
    };
    out.push(report(
        "coefficient-pin-low",
        d,
        Some(m),
        Some(d),
        dm.to_string(),
        coeff_val(1),
    ));
    out.push(report(
        "coefficient-pin-high",
        d,
        Some(m),
        Some(d),
        (dm - dm1).to_string(),
        coeff_val(dm - dm1),
    ));

    let lhs = dm - dm1 - 1;
    let rhs = repunit(d, m)
        .checked_mul(d - 2)
        .ok_or_else(|| VerifyError::Overflow {
            context: "window inequality".to_string(),
        })?;
    let expected = format!("{lhs} >= {rhs}: holds");
    let actual = if lhs >= rhs {
        expected.clone()
    } else {
        format!("{lhs} >= {rhs}: fails")
    };
    out.push(report("window-inequality", d, Some(m), None, expected, actual));
    Ok(out)
}

/// Decimal rendering of bound/deg to six places, floor-rounded, computed
/// in integers only.
fn ratio_line(bound: u64, deg: u64) -> String {
    let scaled = (bound as u128) * 1_000_000 / (deg as u128);
    let whole = scaled / 1_000_000;
    let frac = scaled % 1_000_000;
    format!("bound/deg = {bound}/{deg} ~= {whole}.{frac:06}")
}

/// The headline claims: the polygon bound meets d^m - d^{m-1} - 1 for
/// every m in [1, max_m] (with the exact ratio reported alongside), the
/// certificates for 2 <= m <= min(max_m, d) conclude IrreducibleOverQ,
/// and inside the window 3 <= m <= d the degree matches its closed form.
pub fn check_main_theorem(
    table: &mut OrbitTable,
    max_m: u64,
    copts: &CertifyOptions,
) -> Result<Vec<CheckReport>, VerifyError> {
    let d = table.d();
    let p = family_prime(d)?;
    let mut out = Vec::new();
    for m in 1..=max_m {
        let dm = pow_u64(d, m, "main theorem d^m")?;
        let target = dm - dm / d - 1;
        let g = table.misiurewicz_direct(m)?;
        let (bound, _gap) = qp_factor_degree_bound(&g, p)?;
        let expected = format!("polygon bound >= {target}: holds");
        let actual = if bound >= target {
            expected.clone()
        } else {
            format!("polygon bound = {bound} < {target}: fails")
        };
        out.push(report("main-bound", d, Some(m), Some(d), expected, actual));

        let deg = g.degree().finite().unwrap_or(0) as u64;
        let line = ratio_line(bound, deg.max(1));
        out.push(report("main-ratio", d, Some(m), Some(d), line.clone(), line));

        if m >= 3 && m <= d {
            let window = window_misiurewicz_degree(d, m)?;
            out.push(report(
                "window-degree",
                d,
                Some(m),
                None,
                window.to_string(),
                deg.to_string(),
            ));
        }
        if m >= 2 && m <= d {
            let cert = certify_with_table(table, m, copts)?;
            out.push(report(
                "main-verdict",
                d,
                Some(m),
                Some(d),
                Verdict::IrreducibleOverQ.to_string(),
                cert.analysis.verdict.to_string(),
            ));
        }
    }
    Ok(out)
}

/// Suite configuration. `parallel` > 1 distributes the check families
/// over that many worker threads, each with its own orbit table; reports
/// are merged in the fixed family order, so output is identical to a
/// sequential run. `inject_corruption` perturbs orbit level 2 before
/// checking — the negative control proving the suite can fail.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub parallel: usize,
    pub inject_corruption: bool,
    pub guard: SizeGuard,
    pub certify: CertifyOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            parallel: 1,
            inject_corruption: false,
            guard: SizeGuard::default(),
            certify: CertifyOptions::default(),
        }
    }
}

const FAMILY_IDS: [&str; 7] = [
    "rs-degrees",
    "s-polygon",
    "sigma-polygon",
    "tau-product",
    "theorem-polygons",
    "term-geometry",
    "main-theorem",
];

fn run_family(
    idx: usize,
    table: &mut OrbitTable,
    max_m: u64,
    options: &VerifyOptions,
) -> Vec<CheckReport> {
    let d = table.d();
    let result = match idx {
        0 => check_rs_degrees(table, max_m + 1),
        1 => check_s_polygon(table, max_m),
        2 => check_sigma_polygon(table, max_m),
        3 => check_tau_product(table, max_m),
        4 => check_theorem_polygons(table, max_m),
        5 => (1..=max_m).try_fold(Vec::new(), |mut acc, m| {
            acc.extend(check_fk_geometry(table, m)?);
            Ok(acc)
        }),
        6 => check_main_theorem(table, max_m, &options.certify),
        _ => unreachable!("family index out of range"),
    };
    result.unwrap_or_else(|err| {
        vec![report(
            FAMILY_IDS[idx],
            d,
            None,
            None,
            "checks complete".to_string(),
            format!("error: {err}"),
        )]
    })
}

fn fresh_table(d: u64, options: &VerifyOptions) -> Result<OrbitTable, VerifyError> {
    let mut table = OrbitTable::with_guard(d, options.guard)?;
    if options.inject_corruption {
        table.corrupt_for_negative_control(2)?;
    }
    Ok(table)
}

/// Runs every check family for the degree-d family up to portrait length
/// max_m and returns the full deterministic report stream. Internal
/// computation failures inside a family become failed reports rather than
/// aborting the other families.
pub fn run_all(d: u64, max_m: u64, options: &VerifyOptions) -> Result<Vec<CheckReport>, VerifyError> {
    if d < 3 || !is_prime_u64(d) {
        return Err(VerifyError::BadFamilyDegree { d });
    }
    if max_m < 2 {
        return Err(VerifyError::BadRange { max_m });
    }
    if options.parallel <= 1 {
        let mut table = fresh_table(d, options)?;
        let mut out = Vec::new();
        for idx in 0..FAMILY_IDS.len() {
            out.extend(run_family(idx, &mut table, max_m, options));
        }
        return Ok(out);
    }

    let workers = options.parallel.min(FAMILY_IDS.len());
    let tagged: Vec<(usize, Vec<CheckReport>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut acc = Vec::new();
                    let mut idx = w;
                    while idx < FAMILY_IDS.len() {
                        let reports = match fresh_table(d, options) {
                            Ok(mut table) => run_family(idx, &mut table, max_m, options),
                            Err(err) => vec![report(
                                FAMILY_IDS[idx],
                                d,
                                None,
                                None,
                                "checks complete".to_string(),
                                format!("error: {err}"),
                            )],
                        };
                        acc.push((idx, reports));
                        idx += workers;
                    }
                    acc
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|handle| handle.join().expect("verification worker panicked"))
            .collect()
    });
    let mut tagged = tagged;
    tagged.sort_by_key(|&(idx, _)| idx);
    Ok(tagged.into_iter().flat_map(|(_, reports)| reports).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(d: u64) -> OrbitTable {
        OrbitTable::new(d).unwrap()
    }

    fn assert_all_pass(reports: &[CheckReport]) {
        for r in reports {
            assert!(
                r.passed,
                "{} (d={}, index={:?}): expected {} but got {}",
                r.check_id, r.d, r.index, r.expected, r.actual
            );
        }
    }

    #[test]
    fn rs_degrees_match_closed_forms() {
        let reports = check_rs_degrees(&mut table(3), 8).unwrap();
        assert_eq!(reports.len(), 7);
        assert_all_pass(&reports);
        // n = 2 report carries the concrete degree pair.
        assert_eq!(reports[0].expected, "deg r = 2, deg s = 3");
        let reports = check_rs_degrees(&mut table(5), 5).unwrap();
        assert_all_pass(&reports);
    }

    #[test]
    fn s_polygons_match_closed_forms() {
        let reports = check_s_polygon(&mut table(3), 6).unwrap();
        assert_all_pass(&reports);
        assert_eq!(reports[0].expected, "L((0,4),(3,3))");
        let reports = check_s_polygon(&mut table(5), 3).unwrap();
        assert_all_pass(&reports);
        assert_eq!(reports[0].expected, "L((0,6),(5,5))");
    }

    #[test]
    fn sigma_polygons_match_closed_forms() {
        let reports = check_sigma_polygon(&mut table(3), 6).unwrap();
        assert_all_pass(&reports);
        assert_eq!(reports[0].expected, "L((0,13),(9,10))");
        assert_eq!(reports[0].index, Some(3));
    }

    #[test]
    fn tau_product_identity_holds() {
        let reports = check_tau_product(&mut table(3), 6).unwrap();
        assert_eq!(reports.len(), 6);
        assert_all_pass(&reports);
        let reports = check_tau_product(&mut table(5), 3).unwrap();
        assert_all_pass(&reports);
    }

    #[test]
    fn theorem_polygons_match() {
        let reports = check_theorem_polygons(&mut table(3), 4).unwrap();
        assert_all_pass(&reports);
        // m = 1 Misiurewicz polygon, m = 3 tau polygon, m = 4 headline.
        assert_eq!(reports[0].expected, "L((0,2),(1,1))");
        assert_eq!(reports[5].expected, "L((3,13),(4,12),(9,9))");
        assert_eq!(reports[6].expected, "L((0,80),(53,53))");
    }

    #[test]
    fn decomposition_term_geometry_holds() {
        let mut t = table(3);
        for m in 1..=3 {
            let reports = check_fk_geometry(&mut t, m).unwrap();
            // d chord reports + 2 pins + 1 inequality.
            assert_eq!(reports.len(), 6);
            assert_all_pass(&reports);
        }
    }

    #[test]
    fn main_theorem_reports() {
        let reports = check_main_theorem(&mut table(3), 4, &CertifyOptions::default()).unwrap();
        assert_all_pass(&reports);
        let ratios: Vec<&CheckReport> =
            reports.iter().filter(|r| r.check_id == "main-ratio").collect();
        assert!(ratios[2].actual.contains("17/17"));
        assert!(ratios[3].actual.contains("53/55"));
        let verdicts: Vec<&CheckReport> =
            reports.iter().filter(|r| r.check_id == "main-verdict").collect();
        assert_eq!(verdicts.len(), 2); // m = 2, 3
    }

    #[test]
    fn run_all_is_green_and_parallel_agrees() {
        let sequential = run_all(3, 3, &VerifyOptions::default()).unwrap();
        assert_all_pass(&sequential);
        let parallel = run_all(
            3,
            3,
            &VerifyOptions {
                parallel: 4,
                ..VerifyOptions::default()
            },
        )
        .unwrap();
        let render = |rs: &[CheckReport]| -> Vec<String> {
            rs.iter()
                .map(|r| format!("{}|{:?}|{}|{}", r.check_id, r.index, r.expected, r.actual))
                .collect()
        };
        assert_eq!(render(&sequential), render(&parallel));
    }

    #[test]
    fn corruption_is_detected() {
        let options = VerifyOptions {
            inject_corruption: true,
            ..VerifyOptions::default()
        };
        let reports = run_all(3, 3, &options).unwrap();
        let summary = summarize(&reports);
        assert!(summary.failed > 0, "corrupted orbit must flip checks");
        // The corruption lands in level 2, so the s-polygon check at m = 2
        // specifically must notice.
        let s2 = reports
            .iter()
            .find(|r| r.check_id == "s-polygon" && r.index == Some(2))
            .unwrap();
        assert!(!s2.passed);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(matches!(
            run_all(4, 3, &VerifyOptions::default()),
            Err(VerifyError::BadFamilyDegree { d: 4 })
        ));
        assert!(matches!(
            run_all(2, 3, &VerifyOptions::default()),
            Err(VerifyError::BadFamilyDegree { d: 2 })
        ));
        assert!(matches!(
            run_all(3, 1, &VerifyOptions::default()),
            Err(VerifyError::BadRange { max_m: 1 })
        ));
    }

    #[test]
    fn summary_counts() {
        let reports = vec![
            report("a", 3, None, None, "x".into(), "x".into()),
            report("b", 3, None, None, "x".into(), "y".into()),
        ];
        let summary = summarize(&reports);
        assert_eq!(summary.total, 2);
        assert_eq!(summary.passed, 1);
        assert_eq!(summary.failed, 1);
    }
}
