//! Finite-field reduction, distinct-degree factorization, and the
//! assembly of irreducibility certificates over Q.
//!
//! A certificate combines two independent kinds of evidence about a
//! primitive polynomial f in Z[b]:
//!
//! * the Q_p Newton polygon at the family prime p = d, which forces a
//!   large-degree p-adic factor (and sometimes pins the entire Q_p
//!   factor-degree multiset when combined with a Z_p root count), and
//! * factor-degree multisets of f mod q at auxiliary primes q != p,
//!   obtained by distinct-degree factorization; any true Q-factor degree
//!   must be a subset sum of every one of them.
//!
//! When the intersection of the modular subset sums with the
//! polygon-compatible degrees leaves nothing but the trivial divisors,
//! f has no proper rational factor. The whole chain is recorded in the
//! certificate and can be replayed from the recorded evidence alone by
//! [`audit`].

use crate::arith::{is_prime_u64, mul_mod_u64, pow_mod_u64, Prime, PrimeError};
use crate::orbit::{OrbitError, OrbitTable};
use crate::padic::{
    padic_root_count, principal_polygon, segment_constraints, NewtonError, PolygonJson,
    SegmentConstraint, DEFAULT_ROOT_PRECISION,
};
use crate::poly::{IntPoly, SizeGuard};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FactorError {
    /// q divides the leading coefficient, so reduction mod q drops degree
    /// and the factor bookkeeping would be wrong. Callers skip the prime.
    #[error("reduction mod {q} drops the degree; skip this prime")]
    DegreeDrop { q: u64 },
    /// f mod q shares a factor with its derivative; the degree multiset of
    /// a non-squarefree reduction undercounts, so callers skip the prime.
    #[error("polynomial is not squarefree mod {q}; skip this prime")]
    NotSquarefree { q: u64 },
    #[error("no usable auxiliary prime produced modular evidence")]
    NoUsablePrime,
}

/// Dense polynomial over F_q, coefficients ascending, normalized so the
/// leading residue is nonzero (the zero polynomial has no coefficients).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    q: u64,
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(q: Prime, coeffs: Vec<u64>) -> ModPoly {
        let q = q.get();
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % q).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { q, coeffs }
    }

    fn raw(q: u64, mut coeffs: Vec<u64>) -> ModPoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { q, coeffs }
    }

    /// The monomial b.
    pub fn x(q: Prime) -> ModPoly {
        ModPoly::new(q, vec![0, 1])
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn sub(&self, other: &ModPoly) -> ModPoly {
        let q = self.q;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + q - b) % q;
        }
        ModPoly::raw(q, out)
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        if self.is_zero() || other.is_zero() {
            return ModPoly::raw(self.q, Vec::new());
        }
        let q = self.q;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (k, &b) in other.coeffs.iter().enumerate() {
                out[i + k] = (out[i + k] + mul_mod_u64(a, b, q)) % q;
            }
        }
        ModPoly::raw(q, out)
    }

    pub fn derivative(&self) -> ModPoly {
        let q = self.q;
        let out: Vec<u64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod_u64(i as u64 % q, c, q))
            .collect();
        ModPoly::raw(q, out)
    }

    /// Scales to leading coefficient 1.
    pub fn monic(&self) -> ModPoly {
        let Some(&lead) = self.coeffs.last() else {
            return self.clone();
        };
        if lead == 1 {
            return self.clone();
        }
        let inv = pow_mod_u64(lead, self.q - 2, self.q);
        let out: Vec<u64> = self
            .coeffs
            .iter()
            .map(|&c| mul_mod_u64(c, inv, self.q))
            .collect();
        ModPoly::raw(self.q, out)
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divmod(&self, divisor: &ModPoly) -> (ModPoly, ModPoly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let q = self.q;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (ModPoly::raw(q, Vec::new()), self.clone());
        }
        let inv_lead = pow_mod_u64(divisor.coeffs[dd], q - 2, q);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let factor = mul_mod_u64(c, inv_lead, q);
            quot[i - dd] = factor;
            for (k, &dc) in divisor.coeffs.iter().enumerate() {
                let cell = &mut rem[i - dd + k];
                *cell = (*cell + q - mul_mod_u64(factor, dc, q)) % q;
            }
        }
        rem.truncate(dd);
        (ModPoly::raw(q, quot), ModPoly::raw(q, rem))
    }

    pub fn rem(&self, divisor: &ModPoly) -> ModPoly {
        self.divmod(divisor).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &ModPoly) -> ModPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// self^exp mod modulus by repeated squaring on the exponent.
    pub fn pow_mod(&self, mut exp: u64, modulus: &ModPoly) -> ModPoly {
        let mut base = self.rem(modulus);
        let mut acc = ModPoly::raw(self.q, vec![1]).rem(modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).rem(modulus);
            }
        }
        acc
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (mod {})", self.q);
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "b")?,
                1 => write!(f, "{c}*b")?,
                _ if c == 1 => write!(f, "b^{i}")?,
                _ => write!(f, "{c}*b^{i}")?,
            }
        }
        write!(f, " (mod {})", self.q)
    }
}

/// Coefficientwise reduction of an integer polynomial.
pub fn reduce_mod(f: &IntPoly, q: Prime) -> Result<ModPoly, FactorError> {
    let modulus = num_bigint::BigInt::from(q.get());
    let coeffs: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|c| {
            c.mod_floor(&modulus)
                .to_u64()
                .expect("residue fits in u64")
        })
        .collect();
    let reduced = ModPoly::raw(q.get(), coeffs);
    if !f.is_zero() && reduced.degree() != f.degree().finite() {
        return Err(FactorError::DegreeDrop { q: q.get() });
    }
    Ok(reduced)
}

/// Factor-degree multiset of a squarefree reduction: `entries` lists
/// (irreducible factor degree, count) in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeMultiset {
    pub q: u64,
    pub entries: Vec<(u64, u64)>,
    pub squarefree: bool,
}

impl DegreeMultiset {
    /// Flattened degree list with multiplicity.
    pub fn degrees(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for &(deg, count) in &self.entries {
            for _ in 0..count {
                out.push(deg);
            }
        }
        out
    }

    /// Sum of degree * count; equals the reduced degree when squarefree.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(deg, count)| deg * count).sum()
    }
}

/// Distinct-degree factorization of a squarefree polynomial over F_q.
///
/// For e = 1, 2, ... the product of all irreducible factors of degree e
/// divides gcd(f, b^{q^e} - b); the Frobenius power is maintained by
/// repeated squaring modulo the shrinking cofactor. Counts come from
/// degree division; the factors themselves are never split further, which
/// keeps the routine deterministic.
pub fn ddf(f: &ModPoly) -> Result<DegreeMultiset, FactorError> {
    let q = f.q();
    let deg = f.degree().expect("ddf requires a nonzero polynomial");
    assert!(deg >= 1, "ddf requires degree >= 1");
    let deriv = f.derivative();
    if f.gcd(&deriv).degree() != Some(0) {
        return Err(FactorError::NotSquarefree { q });
    }
    let mut rem = f.monic();
    let x = ModPoly::raw(q, vec![0, 1]);
    let mut h = x.rem(&rem);
    let mut entries: Vec<(u64, u64)> = Vec::new();
    let mut e: u64 = 1;
    while rem.degree().map_or(false, |d| 2 * e <= d as u64) {
        h = h.pow_mod(q, &rem);
        let g = rem.gcd(&h.sub(&x.rem(&rem)));
        if let Some(gd) = g.degree().filter(|&gd| gd >= 1) {
            debug_assert_eq!(gd as u64 % e, 0);
            entries.push((e, gd as u64 / e));
            let (quot, r) = rem.divmod(&g);
            debug_assert!(r.is_zero());
            rem = quot;
            h = h.rem(&rem);
        }
        e += 1;
    }
    if let Some(d) = rem.degree().filter(|&d| d >= 1) {
        entries.push((d as u64, 1));
    }
    entries.sort_unstable();
    Ok(DegreeMultiset {
        q,
        entries,
        squarefree: true,
    })
}

fn shift_or(bits: &mut Vec<u64>, k: usize) {
    let words = bits.len();
    let wshift = k / 64;
    let bshift = k % 64;
    for i in (0..words).rev() {
        let mut v = 0u64;
        if i >= wshift {
            v = bits[i - wshift] << bshift;
            if bshift > 0 && i > wshift {
                v |= bits[i - wshift - 1] >> (64 - bshift);
            }
        }
        bits[i] |= v;
    }
}

/// Every subset sum of the degree multiset: the possible degrees of monic
/// divisors of the reduction, 0 and the full degree included.
pub fn subset_sums(multiset: &DegreeMultiset) -> BTreeSet<u64> {
    let total = multiset.total();
    let words = (total as usize + 1).div_ceil(64);
    let mut bits = vec![0u64; words];
    bits[0] = 1;
    for &(deg, count) in &multiset.entries {
        for _ in 0..count {
            shift_or(&mut bits, deg as usize);
        }
    }
    (0..=total)
        .filter(|&s| bits[(s / 64) as usize] >> (s % 64) & 1 == 1)
        .collect()
}

/// Intersection over primes of the subset-sum sets: any degree of a true
/// Q-factor must survive every prime.
pub fn possible_factor_degrees(
    multisets: &[DegreeMultiset],
) -> Result<BTreeSet<u64>, FactorError> {
    let mut iter = multisets.iter();
    let first = iter.next().ok_or(FactorError::NoUsablePrime)?;
    let mut out = subset_sums(first);
    for ms in iter {
        let sums = subset_sums(ms);
        out = out.intersection(&sums).copied().collect();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    IrreducibleOverQ,
    IrreducibleOverQd,
    LargeFactorOnly,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Verdict::IrreducibleOverQ => "IrreducibleOverQ",
            Verdict::IrreducibleOverQd => "IrreducibleOverQd",
            Verdict::LargeFactorOnly => "LargeFactorOnly",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error(transparent)]
    Prime(#[from] PrimeError),
    #[error("cannot certify: {reason}")]
    BadInput { reason: String },
}

/// Knobs for certificate assembly. `aux_primes: None` scans small primes
/// in order, keeping the first `min_primes` usable ones and widening past
/// them (when `widen`) only if candidate degrees survive.
#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub aux_primes: Option<Vec<u64>>,
    pub min_primes: usize,
    pub precision: u32,
    pub widen: bool,
    pub guard: SizeGuard,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            aux_primes: None,
            min_primes: 8,
            precision: DEFAULT_ROOT_PRECISION,
            widen: true,
            guard: SizeGuard::default(),
        }
    }
}

/// How many extra usable primes widening may add past `min_primes`.
const WIDEN_EXTRA: usize = 16;
/// Prime scan ceiling; certificates are desk-scale objects.
const PRIME_SCAN_LIMIT: u64 = 1000;

/// The full evidence chain for one polynomial. All degree fields refer to
/// the primitive part after the `b^leading_gap` monomial and the integer
/// content are removed.
#[derive(Debug, Clone, Serialize)]
pub struct IrreducibilityAnalysis {
    pub verdict: Verdict,
    pub degree: u64,
    pub leading_gap: u64,
    pub content_removed: String,
    pub polygon_bound: u64,
    pub polygon: PolygonJson,
    pub qd_root_count: Option<u64>,
    pub candidate_degrees: Vec<u64>,
    pub excluded_degrees: Vec<u64>,
    pub surviving_degrees: Vec<u64>,
    pub per_prime: Vec<DegreeMultiset>,
    pub narrative: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IrreducibilityCertificate {
    pub d: u64,
    pub m: u64,
    #[serde(flatten)]
    pub analysis: IrreducibilityAnalysis,
}

fn band_candidates(deg: u64, bound: u64) -> BTreeSet<u64> {
    (1..deg)
        .filter(|&degree| degree <= deg - bound || degree >= bound)
        .collect()
}

fn exact_candidates(deg: u64, bound: u64, roots: u64) -> BTreeSet<u64> {
    // Proper nonzero subset sums of the multiset {bound} + {1; roots}.
    let mut out = BTreeSet::new();
    for big in [0, bound] {
        for linear in 0..=roots {
            let sum = big + linear;
            if sum > 0 && sum < deg {
                out.insert(sum);
            }
        }
    }
    out
}

/// The candidate-degree rule shared by the certifier and the auditor:
/// given only recorded evidence (degree, segment constraints, root count),
/// the set of proper factor degrees not yet excluded by the p = d data.
fn polygon_candidates(
    deg: u64,
    segments: &[SegmentConstraint],
    bound: u64,
    root_count: Option<u64>,
) -> BTreeSet<u64> {
    let single_unit = segments.len() == 1 && segments[0].lattice_length == 1;
    if single_unit && segments[0].reduced_run >= 2 {
        if let Some(roots) = root_count {
            if bound + roots == deg {
                return exact_candidates(deg, bound, roots);
            }
        }
    }
    band_candidates(deg, bound)
}

fn verdict_from_survivors(survivors: &BTreeSet<u64>, deg: u64, bound: u64) -> Verdict {
    if survivors.is_empty() {
        Verdict::IrreducibleOverQ
    } else if 2 * bound > deg {
        Verdict::LargeFactorOnly
    } else {
        Verdict::Inconclusive
    }
}

/// Certifies the primitive part of f using the Newton polygon at p plus
/// distinct-degree factorization at auxiliary primes.
pub fn certify_polynomial(
    f: &IntPoly,
    p: Prime,
    opts: &CertifyOptions,
) -> Result<IrreducibilityAnalysis, CertifyError> {
    if f.is_zero() {
        return Err(CertifyError::BadInput {
            reason: "the zero polynomial".into(),
        });
    }
    let mut narrative: Vec<String> = Vec::new();
    let gap = f.trailing_zeros() as u64;
    let shifted = if gap > 0 {
        narrative.push(format!(
            "split off the monomial factor b^{gap}; the certificate covers the cofactor"
        ));
        IntPoly::new(f.coeffs()[gap as usize..].to_vec())
    } else {
        f.clone()
    };
    let (prim, content) = shifted.primitive_part();
    if !content.is_one() {
        narrative.push(format!(
            "integer content {content} removed; the claim concerns the primitive part"
        ));
    }
    let deg = match prim.degree().finite() {
        Some(deg) if deg >= 1 => deg as u64,
        _ => {
            return Err(CertifyError::BadInput {
                reason: "a constant or monomial has no interesting factorization".into(),
            })
        }
    };

    let polygon = principal_polygon(&prim, p)?;
    let segments = segment_constraints(&polygon);
    let bound = segments.iter().map(|s| s.reduced_run).max().unwrap_or(0);
    narrative.push(format!(
        "Newton polygon of the primitive part at p = {p}: {}",
        polygon.render()
    ));
    narrative.push(format!(
        "largest forced Q_{p}-irreducible factor degree: {bound} of {deg}"
    ));
    let polygon_json = polygon.to_json(p);

    if bound == deg {
        narrative.push(format!(
            "a single unit-lattice segment spans the full degree: irreducible over Q_{p}, hence over Q"
        ));
        return Ok(IrreducibilityAnalysis {
            verdict: Verdict::IrreducibleOverQ,
            degree: deg,
            leading_gap: gap,
            content_removed: content.to_string(),
            polygon_bound: bound,
            polygon: polygon_json,
            qd_root_count: None,
            candidate_degrees: Vec::new(),
            excluded_degrees: Vec::new(),
            surviving_degrees: Vec::new(),
            per_prime: Vec::new(),
            narrative,
        });
    }

    let qd_root_count = match padic_root_count(&prim, p, opts.precision) {
        Ok(count) => {
            narrative.push(format!(
                "simple Q_{p}-rational roots: {count} (lifting precision {})",
                opts.precision
            ));
            Some(count as u64)
        }
        Err(NewtonError::PrecisionTooLow { .. }) => {
            narrative.push(format!(
                "Q_{p} root count is ambiguous at precision {}; only the band constraint is used",
                opts.precision
            ));
            None
        }
        Err(err) => return Err(err.into()),
    };

    let candidates = polygon_candidates(deg, &segments, bound, qd_root_count);
    let single_unit = segments.len() == 1 && segments[0].lattice_length == 1;
    if single_unit
        && segments[0].reduced_run >= 2
        && qd_root_count.map_or(false, |r| bound + r == deg)
    {
        narrative.push(format!(
            "exact Q_{p} factor degrees: one of degree {bound} plus {} linear; \
             proper Q-factor degrees must be subset sums of these",
            deg - bound
        ));
    } else if 2 * bound > deg {
        narrative.push(format!(
            "band constraint: no proper factor degree strictly between {} and {bound}",
            deg - bound
        ));
    } else {
        narrative.push("the polygon does not constrain proper factor degrees".into());
    }

    if candidates.is_empty() {
        narrative.push("no candidate proper factor degrees remain: irreducible over Q".into());
        return Ok(IrreducibilityAnalysis {
            verdict: Verdict::IrreducibleOverQ,
            degree: deg,
            leading_gap: gap,
            content_removed: content.to_string(),
            polygon_bound: bound,
            polygon: polygon_json,
            qd_root_count,
            candidate_degrees: Vec::new(),
            excluded_degrees: Vec::new(),
            surviving_degrees: Vec::new(),
            per_prime: Vec::new(),
            narrative,
        });
    }

    let mut per_prime: Vec<DegreeMultiset> = Vec::new();
    let mut survivors = candidates.clone();
    let try_prime = |q: Prime,
                         per_prime: &mut Vec<DegreeMultiset>,
                         survivors: &mut BTreeSet<u64>,
                         narrative: &mut Vec<String>| {
        match reduce_mod(&prim, q).and_then(|reduced| ddf(&reduced)) {
            Ok(multiset) => {
                let sums = subset_sums(&multiset);
                *survivors = survivors.intersection(&sums).copied().collect();
                narrative.push(format!(
                    "mod {}: factor degrees {:?}",
                    q,
                    multiset.degrees()
                ));
                per_prime.push(multiset);
            }
            Err(err @ (FactorError::DegreeDrop { .. } | FactorError::NotSquarefree { .. })) => {
                narrative.push(format!("skipped q = {q}: {err}"));
            }
            Err(FactorError::NoUsablePrime) => unreachable!("not raised by reduce/ddf"),
        }
    };

    match &opts.aux_primes {
        Some(list) => {
            for &q in list {
                if q == p.get() {
                    narrative.push(format!(
                        "q = {q} is reserved for the polygon analysis; not used as auxiliary"
                    ));
                    continue;
                }
                let q = Prime::new(q)?;
                try_prime(q, &mut per_prime, &mut survivors, &mut narrative);
            }
        }
        None => {
            let mut q = 2u64;
            let mut widened = false;
            while q <= PRIME_SCAN_LIMIT {
                if per_prime.len() >= opts.min_primes {
                    if survivors.is_empty() || !opts.widen {
                        break;
                    }
                    if per_prime.len() >= opts.min_primes + WIDEN_EXTRA {
                        break;
                    }
                    if !widened {
                        widened = true;
                        narrative.push(
                            "candidate degrees survive the default primes; widening the prime set"
                                .into(),
                        );
                    }
                }
                if q != p.get() && is_prime_u64(q) {
                    let prime = Prime::new(q).expect("just tested primality");
                    try_prime(prime, &mut per_prime, &mut survivors, &mut narrative);
                }
                q += 1;
            }
        }
    }

    if per_prime.is_empty() {
        return Err(FactorError::NoUsablePrime.into());
    }

    let excluded: Vec<u64> = candidates.difference(&survivors).copied().collect();
    let verdict = verdict_from_survivors(&survivors, deg, bound);
    match verdict {
        Verdict::IrreducibleOverQ => narrative.push(
            "every candidate proper factor degree is excluded by some prime: irreducible over Q"
                .into(),
        ),
        Verdict::LargeFactorOnly => narrative.push(format!(
            "degrees {:?} not excluded; any factorization still contains a factor of degree >= {bound}",
            survivors.iter().collect::<Vec<_>>()
        )),
        Verdict::Inconclusive => narrative.push(format!(
            "degrees {:?} not excluded and the polygon bound is weak: inconclusive",
            survivors.iter().collect::<Vec<_>>()
        )),
        Verdict::IrreducibleOverQd => unreachable!("not produced by this rule"),
    }

    Ok(IrreducibilityAnalysis {
        verdict,
        degree: deg,
        leading_gap: gap,
        content_removed: content.to_string(),
        polygon_bound: bound,
        polygon: polygon_json,
        qd_root_count,
        candidate_degrees: candidates.into_iter().collect(),
        excluded_degrees: excluded,
        surviving_degrees: survivors.into_iter().collect(),
        per_prime,
        narrative,
    })
}

/// Certifies G_m for the family of degree d, building a fresh orbit table.
pub fn certify(d: u64, m: u64, opts: &CertifyOptions) -> Result<IrreducibilityCertificate, CertifyError> {
    let mut table = OrbitTable::with_guard(d, opts.guard.clone())?;
    certify_with_table(&mut table, m, opts)
}

/// Certifies G_m reusing an existing orbit table (levels accumulate, so
/// certifying several m for one d shares all the heavy products).
pub fn certify_with_table(
    table: &mut OrbitTable,
    m: u64,
    opts: &CertifyOptions,
) -> Result<IrreducibilityCertificate, CertifyError> {
    let d = table.d();
    let p = Prime::new(d).map_err(|_| CertifyError::BadInput {
        reason: format!("family degree {d} must be prime for the Q_d polygon analysis"),
    })?;
    let g = table.misiurewicz_direct(m)?;
    let analysis = certify_polynomial(&g, p, opts)?;
    Ok(IrreducibilityCertificate { d, m, analysis })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("certificate evidence does not support its verdict: {0}")]
    Inconsistent(String),
}

/// Replays the evidence chain of an analysis using only its recorded
/// fields — polygon vertices, root count, per-prime degree multisets —
/// and re-derives the verdict. Any disagreement with the stored conclusion
/// (or internal inconsistency in the evidence) is an error.
pub fn audit(analysis: &IrreducibilityAnalysis) -> Result<Verdict, AuditError> {
    let deg = analysis.degree;
    let vertices = &analysis.polygon.vertices;
    if vertices.is_empty() {
        return Err(AuditError::Inconsistent("empty polygon".into()));
    }
    for w in vertices.windows(2) {
        if w[1][0] <= w[0][0] || w[1][1] >= w[0][1] {
            return Err(AuditError::Inconsistent(
                "polygon vertices are not strictly decreasing".into(),
            ));
        }
    }
    for w in vertices.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let lhs = (b[1] as i128 - a[1] as i128) * (c[0] as i128 - b[0] as i128);
        let rhs = (c[1] as i128 - b[1] as i128) * (b[0] as i128 - a[0] as i128);
        if lhs >= rhs {
            return Err(AuditError::Inconsistent("polygon is not convex".into()));
        }
    }
    let segments: Vec<SegmentConstraint> = vertices
        .windows(2)
        .map(|w| {
            let rise = w[0][1] - w[1][1];
            let run = w[1][0] - w[0][0];
            let g = crate::arith::gcd_u64(rise, run);
            SegmentConstraint {
                rise,
                run,
                reduced_run: run / g,
                lattice_length: g,
            }
        })
        .collect();
    if segments != analysis.polygon.segments {
        return Err(AuditError::Inconsistent(
            "recorded segment constraints disagree with the vertices".into(),
        ));
    }
    let bound = segments.iter().map(|s| s.reduced_run).max().unwrap_or(0);
    if bound != analysis.polygon_bound {
        return Err(AuditError::Inconsistent(format!(
            "recorded polygon bound {} but vertices give {bound}",
            analysis.polygon_bound
        )));
    }

    let derived = if bound == deg {
        if !(analysis.candidate_degrees.is_empty()
            && analysis.surviving_degrees.is_empty()
            && analysis.per_prime.is_empty())
        {
            return Err(AuditError::Inconsistent(
                "polygon-exact certificate carries superfluous evidence".into(),
            ));
        }
        Verdict::IrreducibleOverQ
    } else {
        let candidates = polygon_candidates(deg, &segments, bound, analysis.qd_root_count);
        let stored_candidates: BTreeSet<u64> =
            analysis.candidate_degrees.iter().copied().collect();
        if candidates != stored_candidates {
            return Err(AuditError::Inconsistent(
                "candidate degrees do not follow from the polygon and root count".into(),
            ));
        }
        let mut survivors = candidates.clone();
        for multiset in &analysis.per_prime {
            if !multiset.squarefree {
                return Err(AuditError::Inconsistent(format!(
                    "multiset for q = {} is not marked squarefree",
                    multiset.q
                )));
            }
            if multiset.total() != deg {
                return Err(AuditError::Inconsistent(format!(
                    "degrees mod {} sum to {} instead of {deg}",
                    multiset.q,
                    multiset.total()
                )));
            }
            let sums = subset_sums(multiset);
            survivors = survivors.intersection(&sums).copied().collect();
        }
        if !candidates.is_empty() && analysis.per_prime.is_empty() {
            return Err(AuditError::Inconsistent(
                "candidate degrees remain but no modular evidence is recorded".into(),
            ));
        }
        let stored_survivors: BTreeSet<u64> =
            analysis.surviving_degrees.iter().copied().collect();
        if survivors != stored_survivors {
            return Err(AuditError::Inconsistent(
                "surviving degrees do not match the recorded evidence".into(),
            ));
        }
        let stored_excluded: BTreeSet<u64> = analysis.excluded_degrees.iter().copied().collect();
        let excluded: BTreeSet<u64> = candidates.difference(&survivors).copied().collect();
        if excluded != stored_excluded {
            return Err(AuditError::Inconsistent(
                "excluded degrees do not match the recorded evidence".into(),
            ));
        }
        verdict_from_survivors(&survivors, deg, bound)
    };

    if derived != analysis.verdict {
        return Err(AuditError::Inconsistent(format!(
            "evidence derives {derived} but the certificate claims {}",
            analysis.verdict
        )));
    }
    Ok(derived)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ord_p;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn p(q: u64) -> Prime {
        Prime::new(q).unwrap()
    }

    fn ip(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64s(coeffs)
    }

    #[test]
    fn reduction_examples() {
        // (b^2 - 1) mod 3 = b^2 + 2.
        let f = reduce_mod(&ip(&[-1, 0, 1]), p(3)).unwrap();
        assert_eq!(f.coeffs(), &[2, 0, 1]);
        // tau_2 = 27 b^3 + 81 b^2 reduces to zero mod 3: degree drop.
        assert_eq!(
            reduce_mod(&ip(&[0, 0, 81, 27]), p(3)).unwrap_err(),
            FactorError::DegreeDrop { q: 3 }
        );
        // ...but its primitive part b^3 + 3 b^2 reduces fine.
        let prim = ip(&[0, 0, 81, 27]).primitive_part().0;
        assert_eq!(prim, ip(&[0, 0, 3, 1]));
        assert_eq!(reduce_mod(&prim, p(3)).unwrap().coeffs(), &[0, 0, 0, 1]);
        // Primitive part of G_1 is -(b + 3); mod 5 that is 4b + 2.
        let g1 = ip(&[-9, -3]).primitive_part().0;
        assert_eq!(reduce_mod(&g1, p(5)).unwrap().coeffs(), &[2, 4]);
    }

    #[test]
    fn ddf_small_cases() {
        // b^2 + 1 is irreducible mod 3 (-1 is a non-residue).
        let f = reduce_mod(&ip(&[1, 0, 1]), p(3)).unwrap();
        assert_eq!(ddf(&f).unwrap().entries, vec![(2, 1)]);
        // b^2 - 1 = (b-1)(b+1) mod 3.
        let g = reduce_mod(&ip(&[-1, 0, 1]), p(3)).unwrap();
        assert_eq!(ddf(&g).unwrap().entries, vec![(1, 2)]);
        // Mixed degrees: (b^2 + 1)(b - 1) mod 3.
        let h = reduce_mod(&ip(&[1, 0, 1]).mul(&ip(&[-1, 1])), p(3)).unwrap();
        assert_eq!(ddf(&h).unwrap().entries, vec![(1, 1), (2, 1)]);
        // (b - 1)^2 mod 3 is not squarefree.
        let sq = reduce_mod(&ip(&[-1, 1]).mul(&ip(&[-1, 1])), p(3)).unwrap();
        assert_eq!(ddf(&sq).unwrap_err(), FactorError::NotSquarefree { q: 3 });
    }

    #[test]
    fn subset_sum_examples() {
        let two_linears = DegreeMultiset { q: 3, entries: vec![(1, 2)], squarefree: true };
        let sums: Vec<u64> = subset_sums(&two_linears).into_iter().collect();
        assert_eq!(sums, vec![0, 1, 2]);
        let one_quadratic = DegreeMultiset { q: 7, entries: vec![(2, 1)], squarefree: true };
        let both = possible_factor_degrees(&[one_quadratic, two_linears]).unwrap();
        assert_eq!(both.into_iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(
            possible_factor_degrees(&[]).unwrap_err(),
            FactorError::NoUsablePrime
        );
    }

    /// Factor degrees by exhaustive trial division over F_q, as an oracle.
    fn brute_force_degrees(f: &ModPoly) -> Vec<u64> {
        fn all_monic(q: u64, deg: usize) -> Vec<ModPoly> {
            let prime = Prime::new(q).unwrap();
            let mut out = Vec::new();
            let count = q.pow(deg as u32);
            for idx in 0..count {
                let mut coeffs = Vec::with_capacity(deg + 1);
                let mut rest = idx;
                for _ in 0..deg {
                    coeffs.push(rest % q);
                    rest /= q;
                }
                coeffs.push(1);
                out.push(ModPoly::new(prime, coeffs));
            }
            out
        }
        let mut rem = f.monic();
        let mut degrees = Vec::new();
        let mut deg = 1usize;
        while rem.degree().map_or(false, |d| d >= 1) {
            let remaining = rem.degree().unwrap();
            if deg * 2 > remaining {
                degrees.push(remaining as u64);
                break;
            }
            let mut found = false;
            for cand in all_monic(rem.q(), deg) {
                let (quot, r) = rem.divmod(&cand);
                if r.is_zero() {
                    // cand is irreducible: any factor of smaller degree
                    // would already have been divided out.
                    degrees.push(deg as u64);
                    rem = quot;
                    found = true;
                    break;
                }
            }
            if !found {
                deg += 1;
            }
        }
        degrees.sort_unstable();
        degrees
    }

    #[test]
    fn ddf_matches_brute_force_on_fixed_cases() {
        for coeffs in [
            vec![1i64, 3, 0, 2, 1, 1],
            vec![2, 0, 1, 0, 0, 0, 1],
            vec![1, 1, 1, 1, 1, 1, 1, 1, 1],
            vec![3, 1, 4, 1, 5, 1],
        ] {
            let f = reduce_mod(&ip(&coeffs), p(5)).unwrap();
            match ddf(&f) {
                Ok(multiset) => {
                    let mut degrees = multiset.degrees();
                    degrees.sort_unstable();
                    assert_eq!(degrees, brute_force_degrees(&f));
                    assert_eq!(multiset.total(), f.degree().unwrap() as u64);
                }
                Err(FactorError::NotSquarefree { .. }) => {
                    // acceptable draw; squarefree-ness is input luck
                }
                Err(other) => panic!("unexpected: {other}"),
            }
        }
    }

    #[test]
    fn trivial_linear_certificate() {
        let cert = certify(3, 1, &CertifyOptions::default()).unwrap();
        assert_eq!(cert.analysis.verdict, Verdict::IrreducibleOverQ);
        assert_eq!(cert.analysis.degree, 1);
        assert_eq!(cert.analysis.content_removed, "3");
        assert_eq!(audit(&cert.analysis).unwrap(), Verdict::IrreducibleOverQ);
    }

    #[test]
    fn polygon_exact_certificate() {
        // d=3, m=3: degree 17 equals the polygon bound.
        let cert = certify(3, 3, &CertifyOptions::default()).unwrap();
        assert_eq!(cert.analysis.verdict, Verdict::IrreducibleOverQ);
        assert_eq!(cert.analysis.degree, 17);
        assert_eq!(cert.analysis.polygon_bound, 17);
        assert!(cert.analysis.per_prime.is_empty());
        assert_eq!(audit(&cert.analysis).unwrap(), Verdict::IrreducibleOverQ);
    }

    #[test]
    fn modular_certificate_for_m_two() {
        let cert = certify(3, 2, &CertifyOptions::default()).unwrap();
        assert_eq!(cert.analysis.verdict, Verdict::IrreducibleOverQ);
        assert_eq!(cert.analysis.degree, 6);
        assert!(!cert.analysis.per_prime.is_empty());
        assert_eq!(audit(&cert.analysis).unwrap(), Verdict::IrreducibleOverQ);
    }

    #[test]
    fn certificate_structure_for_m_four() {
        // d=3, m=4: bound 53 of degree 55, two Z_3 roots, modular exclusion.
        let cert = certify(3, 4, &CertifyOptions::default()).unwrap();
        let a = &cert.analysis;
        assert_eq!(a.verdict, Verdict::IrreducibleOverQ);
        assert_eq!(a.degree, 55);
        assert_eq!(a.polygon_bound, 53);
        assert_eq!(a.qd_root_count, Some(2));
        assert_eq!(a.candidate_degrees, vec![1, 2, 53, 54]);
        assert!(a.surviving_degrees.is_empty());
        // The content carries ord_3 = 53 (the polygon of G_4 itself starts
        // at height 80 while the primitive part starts at 27).
        let content: BigInt = a.content_removed.parse().unwrap();
        assert_eq!(ord_p(&content, p(3)).finite(), Some(53));
        assert_eq!(a.polygon.vertices, vec![[0, 27], [53, 0]]);
        assert_eq!(audit(a).unwrap(), Verdict::IrreducibleOverQ);
    }

    #[test]
    fn reducible_product_is_never_certified_irreducible() {
        let f = ip(&[2, 1]); // b + 2
        let g = ip(&[1, 1, 1]); // b^2 + b + 1
        let analysis = certify_polynomial(&f.mul(&g), p(3), &CertifyOptions::default()).unwrap();
        assert_ne!(analysis.verdict, Verdict::IrreducibleOverQ);
        audit(&analysis).unwrap();
    }

    #[test]
    fn audit_rejects_tampering() {
        let cert = certify(3, 2, &CertifyOptions::default()).unwrap();
        let mut tampered = cert.analysis.clone();
        tampered.verdict = Verdict::Inconclusive;
        assert!(audit(&tampered).is_err());
        let mut spoofed = cert.analysis.clone();
        spoofed.polygon_bound += 1;
        assert!(audit(&spoofed).is_err());
        let mut forged = cert.analysis.clone();
        forged.per_prime.clear();
        forged.excluded_degrees.clear();
        forged.surviving_degrees = forged.candidate_degrees.clone();
        assert!(audit(&forged).is_err());
    }

    #[test]
    fn explicit_prime_list_is_respected() {
        let opts = CertifyOptions {
            aux_primes: Some(vec![3, 7, 11, 13]),
            ..CertifyOptions::default()
        };
        let analysis = certify_polynomial(&ip(&[-1, 0, 1]).mul(&ip(&[1, 0, 1])), p(3), &opts)
            .unwrap();
        // 3 is filtered out (reserved for the polygon); the rest are used.
        assert!(analysis.per_prime.iter().all(|ms| ms.q != 3));
        assert!(!analysis.per_prime.is_empty());
        audit(&analysis).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ddf_conserves_degree_and_matches_oracle(
            coeffs in proptest::collection::vec(0u64..5, 2..9),
        ) {
            let prime = p(5);
            let mut c = coeffs;
            c.push(1); // force leading nonzero: monic
            let f = ModPoly::new(prime, c);
            match ddf(&f) {
                Ok(multiset) => {
                    prop_assert_eq!(multiset.total(), f.degree().unwrap() as u64);
                    let mut degrees = multiset.degrees();
                    degrees.sort_unstable();
                    prop_assert_eq!(degrees, brute_force_degrees(&f));
                }
                Err(FactorError::NotSquarefree { .. }) => {}
                Err(other) => return Err(TestCaseError::fail(format!("unexpected: {other}"))),
            }
        }
    }
}
