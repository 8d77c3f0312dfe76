//! The critical-orbit recursion for the one-parameter rational family
//!
//!   phi(z) = a z / (z^d + d - 1),     a = (b + 1) d,
//!
//! whose marked critical point z = 1 has orbit x_n = phi^n(1) = r_n / s_n
//! in lowest-structure numerator/denominator form, and the Misiurewicz
//! polynomials G_m in Z[b] cutting out the parameters where x_m is a fixed
//! point while x_{m-1} is not (orbit portrait (m, 1)).
//!
//! Recursion (r_0 = s_0 = 1):
//!
//!   r_{n+1} = (b + 1) d r_n s_n^{d-1}
//!   s_{n+1} = r_n^d + (d - 1) s_n^d
//!
//! The fixed-point locus of phi is z^d = bd + 1, so the quantity
//!
//!   tau_{n} = r_{n-1}^d - (bd + 1) s_{n-1}^d = s_n - sigma_n,
//!   sigma_n = (b + 1) d s_{n-1}^d,
//!
//! vanishes exactly where x_{n-1} is fixed. Successive tau's divide:
//! tau_{m+1} / tau_m = bd G_m, which defines G_m and gives the product
//! formula tau_m = -(bd)^m G_{m-1} ... G_1.

use crate::arith::binomial;
use crate::poly::{mul_guarded, pow_guarded, IntPoly, PolyError, SizeGuard};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrbitError {
    #[error("family degree must be at least 2, got {d}")]
    BadFamilyDegree { d: u64 },
    #[error("orbit level {m} is not defined for this quantity")]
    BadLevel { m: u64 },
    #[error("expected degree {value} does not fit in a machine word")]
    DegreeOverflow { value: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Branch index j(n) in {2, ..., d+1}: the residue of n - 2 mod d, shifted
/// up by 2. It tracks which leg of the degree-growth cycle level n sits on.
pub fn branch_index(d: u64, n: u64) -> u64 {
    (n as i128 - 2).rem_euclid(d as i128) as u64 + 2
}

/// Repunit base d of length m: (d^m - 1) / (d - 1) = 1 + d + ... + d^{m-1}.
pub fn repunit(d: u64, m: u64) -> u64 {
    let mut acc: u64 = 0;
    for _ in 0..m {
        acc = acc
            .checked_mul(d)
            .and_then(|x| x.checked_add(1))
            .expect("repunit overflows u64");
    }
    acc
}

/// Closed-form degrees of the orbit numerator and denominator at level n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RsDegrees {
    pub n: u64,
    pub j: u64,
    pub deg_r: u64,
    pub deg_s: u64,
}

fn big_to_u64(value: BigInt) -> Result<u64, OrbitError> {
    value
        .to_u64()
        .ok_or_else(|| OrbitError::DegreeOverflow {
            value: value.to_string(),
        })
}

/// deg s_n = (d^{n+d-1} - d^{j-1}) / (d^d - 1) and
/// deg r_n = deg s_n - (d - j), with j = j(n); valid for every n >= 0.
pub fn expected_rs_degrees(d: u64, n: u64) -> Result<RsDegrees, OrbitError> {
    if d < 2 {
        return Err(OrbitError::BadFamilyDegree { d });
    }
    let j = branch_index(d, n);
    let dd = BigInt::from(d);
    let numerator = dd.pow((n + d - 1) as u32) - dd.pow((j - 1) as u32);
    let denominator = dd.pow(d as u32) - BigInt::one();
    let (deg_s, rem) = numerator.div_rem(&denominator);
    debug_assert!(rem.is_zero(), "degree formula divides exactly");
    let deg_r = &deg_s - BigInt::from(d as i128 - j as i128);
    debug_assert!(!deg_r.is_negative());
    Ok(RsDegrees {
        n,
        j,
        deg_s: big_to_u64(deg_s)?,
        deg_r: big_to_u64(deg_r)?,
    })
}

/// Closed-form degrees of sigma_m and tau_m for m >= 1: sigma always has
/// degree 1 + d deg s_{m-1}; tau matches sigma except when m = 2 mod d,
/// where the denominator term dominates and deg tau_m = deg s_m.
pub fn expected_sigma_tau_degrees(d: u64, m: u64) -> Result<(u64, u64), OrbitError> {
    if m == 0 {
        return Err(OrbitError::BadLevel { m });
    }
    let below = expected_rs_degrees(d, m - 1)?;
    let deg_sigma = below
        .deg_s
        .checked_mul(d)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| OrbitError::DegreeOverflow {
            value: format!("{} * {} + 1", below.deg_s, d),
        })?;
    let deg_tau = if m % d == 2 % d {
        expected_rs_degrees(d, m)?.deg_s
    } else {
        deg_sigma
    };
    Ok((deg_sigma, deg_tau))
}

/// Expected degree of G_m for any m >= 1, from the tau quotient:
/// deg G_m = deg tau_{m+1} - deg tau_m - 1.
pub fn expected_misiurewicz_degree(d: u64, m: u64) -> Result<u64, OrbitError> {
    let (_, tau_above) = expected_sigma_tau_degrees(d, m + 1)?;
    let (_, tau_here) = expected_sigma_tau_degrees(d, m)?;
    Ok(tau_above - tau_here - 1)
}

/// The closed form d^m - d^{m-1} - 1, which the quotient formula collapses
/// to exactly in the window 3 <= m <= d.
pub fn window_misiurewicz_degree(d: u64, m: u64) -> Result<u64, OrbitError> {
    if !(3..=d).contains(&m) {
        return Err(OrbitError::BadLevel { m });
    }
    let dm = d
        .checked_pow(m as u32)
        .ok_or_else(|| OrbitError::DegreeOverflow {
            value: format!("{d}^{m}"),
        })?;
    Ok(dm - dm / d - 1)
}

/// Memoized orbit table: levels of (r_n, s_n) plus cached powers s_n^d,
/// which both the next level and sigma_{n+1} consume.
#[derive(Debug)]
pub struct OrbitTable {
    d: u64,
    guard: SizeGuard,
    r: Vec<IntPoly>,
    s: Vec<IntPoly>,
    s_pow_d: Vec<Option<IntPoly>>,
}

impl OrbitTable {
    pub fn new(d: u64) -> Result<Self, OrbitError> {
        Self::with_guard(d, SizeGuard::default())
    }

    pub fn with_guard(d: u64, guard: SizeGuard) -> Result<Self, OrbitError> {
        if d < 2 {
            return Err(OrbitError::BadFamilyDegree { d });
        }
        Ok(OrbitTable {
            d,
            guard,
            r: vec![IntPoly::one()],
            s: vec![IntPoly::one()],
            s_pow_d: vec![None],
        })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Highest computed orbit level.
    pub fn computed_level(&self) -> u64 {
        (self.r.len() - 1) as u64
    }

    /// (b + 1) d as a polynomial: the marked parameter a.
    fn scale_poly(&self) -> IntPoly {
        IntPoly::new(vec![BigInt::from(self.d), BigInt::from(self.d)])
    }

    /// bd as a polynomial.
    fn bd_poly(&self) -> IntPoly {
        IntPoly::monomial(BigInt::from(self.d), 1)
    }

    /// bd + 1 as a polynomial.
    fn bd_plus_one_poly(&self) -> IntPoly {
        IntPoly::new(vec![BigInt::one(), BigInt::from(self.d)])
    }

    fn s_pow_d(&mut self, n: u64) -> Result<IntPoly, OrbitError> {
        self.extend_to(n)?;
        if let Some(cached) = &self.s_pow_d[n as usize] {
            return Ok(cached.clone());
        }
        let power = pow_guarded(&self.s[n as usize], self.d, &self.guard)?;
        self.s_pow_d[n as usize] = Some(power.clone());
        Ok(power)
    }

    /// Computes orbit levels up through n.
    pub fn extend_to(&mut self, n: u64) -> Result<(), OrbitError> {
        while self.computed_level() < n {
            let k = self.r.len() - 1;
            let s_pow_dm1 = pow_guarded(&self.s[k], self.d - 1, &self.guard)?;
            let s_pow_d = mul_guarded(&s_pow_dm1, &self.s[k], &self.guard)?;
            let r_next = mul_guarded(
                &mul_guarded(&self.r[k], &s_pow_dm1, &self.guard)?,
                &self.scale_poly(),
                &self.guard,
            )?;
            let r_pow_d = pow_guarded(&self.r[k], self.d, &self.guard)?;
            let s_next = r_pow_d.add(&s_pow_d.mul_scalar(&BigInt::from(self.d - 1)));
            self.s_pow_d[k] = Some(s_pow_d);
            self.r.push(r_next);
            self.s.push(s_next);
            self.s_pow_d.push(None);
        }
        Ok(())
    }

    /// Orbit numerator r_n. Panics if level n has not been computed.
    pub fn r(&self, n: u64) -> &IntPoly {
        &self.r[n as usize]
    }

    /// Orbit denominator s_n. Panics if level n has not been computed.
    pub fn s(&self, n: u64) -> &IntPoly {
        &self.s[n as usize]
    }

    /// sigma_m = (b + 1) d s_{m-1}^d and tau_m = s_m - sigma_m, for m >= 1.
    pub fn sigma_tau(&mut self, m: u64) -> Result<(IntPoly, IntPoly), OrbitError> {
        if m == 0 {
            return Err(OrbitError::BadLevel { m });
        }
        self.extend_to(m)?;
        let below_pow = self.s_pow_d(m - 1)?;
        let sigma = mul_guarded(&below_pow, &self.scale_poly(), &self.guard)?;
        let tau = self.s(m).sub(&sigma);
        Ok((sigma, tau))
    }

    /// tau_m alone.
    pub fn tau(&mut self, m: u64) -> Result<IntPoly, OrbitError> {
        Ok(self.sigma_tau(m)?.1)
    }

    /// tau_m recomputed from the fixed-point equation of phi,
    /// r_{m-1}^d - (bd + 1) s_{m-1}^d, instead of from s_m - sigma_m.
    /// The two expressions agreeing is a consistency check on the whole
    /// recursion.
    pub fn tau_fixed_point_form(&mut self, m: u64) -> Result<IntPoly, OrbitError> {
        if m == 0 {
            return Err(OrbitError::BadLevel { m });
        }
        self.extend_to(m - 1)?;
        let r_pow = pow_guarded(self.r(m - 1), self.d, &self.guard)?;
        let s_pow = self.s_pow_d(m - 1)?;
        let scaled = mul_guarded(&s_pow, &self.bd_plus_one_poly(), &self.guard)?;
        Ok(r_pow.sub(&scaled))
    }

    /// G_m from sigma_m and tau_m at level m only:
    ///
    ///   bd G_m = (b+1) d sigma^{d-1}
    ///            - (bd+1) sum_{k=0}^{d-1} C(d,k) sigma^k tau^{d-1-k},
    ///
    /// where the sum telescopes to (s_m^d - sigma^d) / tau. The bd factor
    /// divides exactly.
    pub fn misiurewicz_direct(&mut self, m: u64) -> Result<IntPoly, OrbitError> {
        let (sigma, tau) = self.sigma_tau(m)?;
        let mut sum = IntPoly::zero();
        // sigma^k and tau^{d-1-k} built incrementally.
        let mut sigma_pow = IntPoly::one();
        let mut tau_pows = Vec::with_capacity(self.d as usize);
        tau_pows.push(IntPoly::one());
        for _ in 1..self.d {
            let last = tau_pows.last().expect("nonempty");
            tau_pows.push(mul_guarded(last, &tau, &self.guard)?);
        }
        for k in 0..self.d {
            let term = mul_guarded(&sigma_pow, &tau_pows[(self.d - 1 - k) as usize], &self.guard)?
                .mul_scalar(&binomial(self.d, k));
            sum = sum.add(&term);
            if k + 1 < self.d {
                sigma_pow = mul_guarded(&sigma_pow, &sigma, &self.guard)?;
            }
        }
        // sigma_pow now holds sigma^{d-1}.
        let head = mul_guarded(&sigma_pow, &self.scale_poly(), &self.guard)?;
        let tail = mul_guarded(&sum, &self.bd_plus_one_poly(), &self.guard)?;
        let bd_g = head.sub(&tail);
        Ok(bd_g.exact_div(&self.bd_poly())?)
    }

    /// G_m as the exact quotient tau_{m+1} / (bd tau_m).
    pub fn misiurewicz_via_tau(&mut self, m: u64) -> Result<IntPoly, OrbitError> {
        if m == 0 {
            return Err(OrbitError::BadLevel { m });
        }
        let tau_above = self.tau(m + 1)?;
        let tau_here = self.tau(m)?;
        let divisor = mul_guarded(&tau_here, &self.bd_poly(), &self.guard)?;
        Ok(tau_above.exact_div(&divisor)?)
    }

    /// The summands F_0, ..., F_{d-1} with bd G_m = -(F_0 + ... + F_{d-1}):
    ///
    ///   F_k = (bd+1) C(d,k) sigma^k tau^{d-1-k}   for k <= d-2,
    ///   F_{d-1} = bd (d-1) sigma^{d-1}.
    ///
    /// Each term's Newton polygon sits on or above a common line, which is
    /// what pins the polygon of G_m; the terms are exposed so that geometry
    /// can be checked directly.
    pub fn decomposition_terms(&mut self, m: u64) -> Result<Vec<IntPoly>, OrbitError> {
        let (sigma, tau) = self.sigma_tau(m)?;
        let mut terms = Vec::with_capacity(self.d as usize);
        let mut sigma_pow = IntPoly::one();
        let mut tau_pows = Vec::with_capacity(self.d as usize);
        tau_pows.push(IntPoly::one());
        for _ in 1..self.d {
            let last = tau_pows.last().expect("nonempty");
            tau_pows.push(mul_guarded(last, &tau, &self.guard)?);
        }
        for k in 0..self.d - 1 {
            let term = mul_guarded(&sigma_pow, &tau_pows[(self.d - 1 - k) as usize], &self.guard)?
                .mul_scalar(&binomial(self.d, k));
            terms.push(mul_guarded(&term, &self.bd_plus_one_poly(), &self.guard)?);
            sigma_pow = mul_guarded(&sigma_pow, &sigma, &self.guard)?;
        }
        let last = mul_guarded(&sigma_pow, &self.bd_poly(), &self.guard)?
            .mul_scalar(&BigInt::from(self.d - 1));
        terms.push(last);
        Ok(terms)
    }

    /// Negative-control hook: adds the term d*b to s_n and drops every
    /// later level, so subsequent levels follow the recursion from a wrong
    /// seed. Closed-form degree, polygon, and product identities involving
    /// level n and beyond then stop holding, while the perturbation keeps
    /// tau vanishing at b = 0 and mod d (so the exact divisions inside the
    /// direct construction still go through instead of panicking). Used by
    /// the verification suite to prove the checks can fail; never part of
    /// normal operation.
    pub(crate) fn corrupt_for_negative_control(&mut self, n: u64) -> Result<(), OrbitError> {
        self.extend_to(n)?;
        let idx = n as usize;
        self.r.truncate(idx + 1);
        self.s.truncate(idx + 1);
        self.s_pow_d.truncate(idx + 1);
        self.s_pow_d[idx] = None;
        let bump = IntPoly::monomial(BigInt::from(self.d), 1);
        self.s[idx] = self.s[idx].add(&bump);
        Ok(())
    }
}
