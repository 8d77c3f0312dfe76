//! p-adic valuations and Newton polygons of integer polynomials.
//!
//! Conventions: for f = sum a_i b^i, the valuation sequence is
//! v_i = ord_p(a_i). The Newton polygon is the lower convex hull of the
//! points (i, v_i) with a_i nonzero. The principal polygon is the part of
//! the hull with strictly negative slopes, starting at the initial point
//! (i_1, v_{i_1}) where i_1 is the lowest index with a nonzero coefficient.
//! A segment of slope -h/l in lowest terms and lattice length k constrains
//! every Q_p-irreducible factor attached to it to a degree divisible by l;
//! when k = 1 the segment contributes exactly one irreducible factor of
//! degree l.

use crate::arith::{big_prime_power, factorial_valuation, gcd_u64, Prime};
use crate::poly::IntPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NewtonError {
    #[error("the zero polynomial has no Newton polygon")]
    ZeroPolynomial,
    /// Root counting hit a residue class it could not resolve within the
    /// requested precision (a root candidate whose derivative stays
    /// non-invertible through every refinement level).
    #[error("p-adic root counting is ambiguous at p = {p} near residue {residue}; raise the precision")]
    PrecisionTooLow { p: u64, residue: String },
    /// The tuple enumeration behind a power-valuation bound exceeded the
    /// built-in cap; the bound is meant for desk-scale inputs.
    #[error("power valuation bound enumeration visited {visited} tuples, cap is {cap}")]
    EnumerationTooLarge { visited: u64, cap: u64 },
}

/// A p-adic valuation: finite, or infinite for the zero coefficient.
/// `Finite(a) < Infinite` under the derived ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Valuation addition: infinity absorbs.
    pub fn plus(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// ord_p of an integer, stripping prime powers in doubling chunks so huge
/// valuations cost O(log v) big divisions.
pub fn ord_p(x: &BigInt, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let mut n = x.abs();
    let mut total = 0u64;
    let mut powers: Vec<(BigInt, u64)> = vec![(BigInt::from(p.get()), 1)];
    loop {
        let (pw, e) = powers.last().expect("nonempty power stack").clone();
        let (q, r) = n.div_rem(&pw);
        if r.is_zero() {
            n = q;
            total += e;
            powers.push((&pw * &pw, e * 2));
        } else {
            break;
        }
    }
    for (pw, e) in powers.iter().rev().skip(1) {
        let (q, r) = n.div_rem(pw);
        if r.is_zero() {
            n = q;
            total += e;
        }
    }
    Valuation::Finite(total)
}

/// The valuation sequence v_i = ord_p(coefficient of b^i), one entry per
/// coefficient up to the degree.
pub fn coeff_valuations(f: &IntPoly, p: Prime) -> Vec<Valuation> {
    f.coeffs().iter().map(|c| ord_p(c, p)).collect()
}

/// V_p(f): the minimum coefficient valuation, i.e. ord_p of the content.
pub fn min_valuation(f: &IntPoly, p: Prime) -> Result<u64, NewtonError> {
    if f.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    Ok(coeff_valuations(f, p)
        .into_iter()
        .filter_map(Valuation::finite)
        .min()
        .expect("nonzero polynomial has a finite coefficient valuation"))
}

/// Divides out p^{V_p(f)}; returns the p-primitive cofactor and the power.
pub fn strip_p_content(f: &IntPoly, p: Prime) -> Result<(IntPoly, u64), NewtonError> {
    let v = min_valuation(f, p)?;
    if v == 0 {
        return Ok((f.clone(), 0));
    }
    let pv = big_prime_power(p.get(), v);
    let stripped = IntPoly::new(f.coeffs().iter().map(|c| c / &pv).collect());
    Ok((stripped, v))
}

fn lower_hull(points: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut hull: Vec<(u64, u64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 as i128 - a.0 as i128) * (pt.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (pt.0 as i128 - a.0 as i128);
            // Pop b unless the chain turns strictly upward at b; collinear
            // interior points are dropped so only true vertices remain.
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

fn assert_vertex_chain(vertices: &[(u64, u64)], principal: bool) {
    assert!(!vertices.is_empty(), "polygon needs at least one vertex");
    for w in vertices.windows(2) {
        assert!(w[1].0 > w[0].0, "polygon x-coordinates must strictly increase");
        if principal {
            assert!(w[1].1 < w[0].1, "principal polygon slopes must be negative");
        }
    }
    for w in vertices.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        // Strict convexity: slope(a,b) < slope(b,c).
        let lhs = (b.1 as i128 - a.1 as i128) * (c.0 as i128 - b.0 as i128);
        let rhs = (c.1 as i128 - b.1 as i128) * (b.0 as i128 - a.0 as i128);
        assert!(lhs < rhs, "polygon slopes must strictly increase");
    }
}

/// Full Newton polygon: the lower convex hull from the initial point to the
/// degree, slopes of any sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(u64, u64)>,
}

impl NewtonPolygon {
    pub fn new(vertices: Vec<(u64, u64)>) -> Self {
        assert_vertex_chain(&vertices, false);
        NewtonPolygon { vertices }
    }

    pub fn vertices(&self) -> &[(u64, u64)] {
        &self.vertices
    }

    /// Segment list as (dx, dy) pairs, dy possibly nonnegative.
    fn segments_raw(&self) -> Vec<(u64, i128)> {
        self.vertices
            .windows(2)
            .map(|w| (w[1].0 - w[0].0, w[1].1 as i128 - w[0].1 as i128))
            .collect()
    }
}

/// The negative-slope part of the Newton polygon, beginning at the initial
/// point. A polynomial whose hull starts flat or rising has a degenerate
/// principal polygon consisting of the initial point alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalPolygon {
    vertices: Vec<(u64, u64)>,
}

impl PrincipalPolygon {
    pub fn new(vertices: Vec<(u64, u64)>) -> Self {
        assert_vertex_chain(&vertices, true);
        PrincipalPolygon { vertices }
    }

    pub fn vertices(&self) -> &[(u64, u64)] {
        &self.vertices
    }

    /// x-coordinate of the initial point (the multiplicity of b in f times
    /// one, i.e. the index of the lowest nonzero coefficient).
    pub fn leading_gap(&self) -> u64 {
        self.vertices[0].0
    }

    /// Total horizontal length of the negative-slope part.
    pub fn total_run(&self) -> u64 {
        self.vertices.last().expect("nonempty").0 - self.vertices[0].0
    }

    /// Segment list as (rise, run) pairs with rise the valuation drop.
    pub fn segments_raw(&self) -> Vec<(u64, u64)> {
        self.vertices
            .windows(2)
            .map(|w| (w[0].1 - w[1].1, w[1].0 - w[0].0))
            .collect()
    }

    /// Canonical rendering such as `L((0,80),(53,53))`.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .vertices
            .iter()
            .map(|&(x, y)| format!("({x},{y})"))
            .collect();
        format!("L({})", parts.join(","))
    }

    pub fn to_json(&self, p: Prime) -> PolygonJson {
        PolygonJson {
            p: p.get(),
            leading_gap: self.leading_gap(),
            vertices: self.vertices.iter().map(|&(x, y)| [x, y]).collect(),
            segments: segment_constraints(self),
        }
    }

    /// CSV rendering, one vertex per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for &(x, y) in &self.vertices {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

/// Builds the full Newton polygon of a nonzero polynomial.
pub fn newton_polygon(f: &IntPoly, p: Prime) -> Result<NewtonPolygon, NewtonError> {
    if f.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    let points: Vec<(u64, u64)> = coeff_valuations(f, p)
        .into_iter()
        .enumerate()
        .filter_map(|(i, v)| v.finite().map(|v| (i as u64, v)))
        .collect();
    Ok(NewtonPolygon::new(lower_hull(&points)))
}

/// Builds the principal (negative-slope) polygon of a nonzero polynomial.
pub fn principal_polygon(f: &IntPoly, p: Prime) -> Result<PrincipalPolygon, NewtonError> {
    let full = newton_polygon(f, p)?;
    let hull = full.vertices();
    let mut vertices = vec![hull[0]];
    for w in hull.windows(2) {
        if w[1].1 < w[0].1 {
            vertices.push(w[1]);
        } else {
            break;
        }
    }
    Ok(PrincipalPolygon::new(vertices))
}

/// Compare slopes -rise/run exactly: negative result means `a` is steeper.
fn cmp_neg_slopes(a: (u64, u64), b: (u64, u64)) -> std::cmp::Ordering {
    // -a.0/a.1 < -b.0/b.1  <=>  a.0 * b.1 > b.0 * a.1
    (b.0 as u128 * a.1 as u128).cmp(&(a.0 as u128 * b.1 as u128))
}

/// Minkowski-style sum of principal polygons: initial points add, segments
/// concatenate in increasing slope order, equal slopes merge. This is the
/// shape the product polynomial's principal polygon must take.
pub fn polygon_sum(parts: &[PrincipalPolygon]) -> PrincipalPolygon {
    let mut x = 0u64;
    let mut y = 0u64;
    let mut segs: Vec<(u64, u64)> = Vec::new();
    for part in parts {
        x += part.vertices[0].0;
        y += part.vertices[0].1;
        segs.extend(part.segments_raw());
    }
    segs.sort_by(|&a, &b| cmp_neg_slopes(a, b));
    let mut vertices = vec![(x, y)];
    let mut idx = 0;
    while idx < segs.len() {
        let (mut rise, mut run) = segs[idx];
        let mut next = idx + 1;
        while next < segs.len() && cmp_neg_slopes(segs[idx], segs[next]) == std::cmp::Ordering::Equal {
            rise += segs[next].0;
            run += segs[next].1;
            next += 1;
        }
        let (px, py) = *vertices.last().expect("nonempty");
        vertices.push((px + run, py - rise));
        idx = next;
    }
    PrincipalPolygon::new(vertices)
}

/// Sum law for full polygons; slopes of any sign participate.
pub fn newton_polygon_sum(parts: &[NewtonPolygon]) -> NewtonPolygon {
    let mut x = 0u64;
    let mut y = 0u64;
    let mut segs: Vec<(u64, i128)> = Vec::new();
    for part in parts {
        x += part.vertices[0].0;
        y += part.vertices[0].1;
        segs.extend(part.segments_raw());
    }
    // Ascending slope dy/dx: a before b iff a.dy * b.dx < b.dy * a.dx.
    segs.sort_by(|&a, &b| (a.1 * b.0 as i128).cmp(&(b.1 * a.0 as i128)));
    let mut vertices = vec![(x, y)];
    let mut idx = 0;
    while idx < segs.len() {
        let (mut dx, mut dy) = segs[idx];
        let mut next = idx + 1;
        while next < segs.len()
            && segs[idx].1 * segs[next].0 as i128 == segs[next].1 * segs[idx].0 as i128
        {
            dx += segs[next].0;
            dy += segs[next].1;
            next += 1;
        }
        let (px, py) = *vertices.last().expect("nonempty");
        let ny = py as i128 + dy;
        debug_assert!(ny >= 0, "polygon sums of integer polynomials stay nonnegative");
        vertices.push((px + dx, ny as u64));
        idx = next;
    }
    NewtonPolygon::new(vertices)
}

/// Factorization constraint carried by one principal-polygon segment.
/// The slope is -(rise/g)/(reduced_run) with g = gcd(rise, run); the
/// segment decomposes into `lattice_length = g` lattice periods of
/// horizontal length `reduced_run`, and every Q_p-irreducible factor it
/// carries has degree divisible by `reduced_run`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SegmentConstraint {
    pub rise: u64,
    pub run: u64,
    pub reduced_run: u64,
    pub lattice_length: u64,
}

/// Constraints for every segment, left to right.
pub fn segment_constraints(polygon: &PrincipalPolygon) -> Vec<SegmentConstraint> {
    polygon
        .segments_raw()
        .into_iter()
        .map(|(rise, run)| {
            let g = gcd_u64(rise, run);
            SegmentConstraint {
                rise,
                run,
                reduced_run: run / g,
                lattice_length: g,
            }
        })
        .collect()
}

/// Largest single-factor degree the principal polygon forces over Q_p,
/// together with the leading gap (the b-power split off before the
/// polygon starts). A segment with lattice length 1 contributes exactly
/// one irreducible factor of degree `reduced_run`; longer segments still
/// force some factor of degree at least `reduced_run` (a divisor bound),
/// never more.
pub fn qp_factor_degree_bound(f: &IntPoly, p: Prime) -> Result<(u64, u64), NewtonError> {
    let polygon = principal_polygon(f, p)?;
    let bound = segment_constraints(&polygon)
        .iter()
        .map(|s| s.reduced_run)
        .max()
        .unwrap_or(0);
    Ok((bound, polygon.leading_gap()))
}

/// JSON interchange form of a principal polygon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolygonJson {
    pub p: u64,
    pub leading_gap: u64,
    pub vertices: Vec<[u64; 2]>,
    pub segments: Vec<SegmentConstraint>,
}

const ENUMERATION_CAP: u64 = 4_000_000;

/// Lower bound for v_i(f^k) from the valuation sequence of f alone.
///
/// The i-th coefficient of f^k is a sum over nondecreasing k-tuples
/// (a_1 <= ... <= a_k) with sum i of multinomial(k; multiplicities) times
/// the corresponding coefficient product, so
///
///   v_i(f^k) >= min over tuples of [ ord_p(k! / prod c_j!) + sum_j v_{a_j}(f) ]
///
/// where c_j are the multiplicities of the distinct values in the tuple.
/// Returns `Infinite` when every tuple hits a zero coefficient (the power's
/// coefficient is then genuinely zero).
pub fn power_valuation_bound(
    f: &IntPoly,
    p: Prime,
    k: u32,
    i: u64,
) -> Result<Valuation, NewtonError> {
    if f.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    if k == 0 {
        return Ok(if i == 0 {
            Valuation::Finite(0)
        } else {
            Valuation::Infinite
        });
    }
    let n = f.degree().unwrap() as u64;
    if i > k as u64 * n {
        return Ok(Valuation::Infinite);
    }
    let vals = coeff_valuations(f, p);
    let ord_k_factorial = factorial_valuation(k as u64, p.get());

    struct Search<'a> {
        vals: &'a [Valuation],
        p: u64,
        n: u64,
        ord_k_factorial: u64,
        visited: u64,
        best: Option<u64>,
    }

    impl Search<'_> {
        /// groups: run-length encoded tuple prefix; slots: entries left;
        /// lo: smallest value the next entry may take; rem: sum left;
        /// val_sum: accumulated coefficient valuations (finite by
        /// construction, tuples with infinite entries are skipped).
        fn rec(
            &mut self,
            groups: &mut Vec<(u64, u64)>,
            slots: u32,
            lo: u64,
            rem: u64,
            val_sum: u64,
        ) -> Result<(), NewtonError> {
            self.visited += 1;
            if self.visited > ENUMERATION_CAP {
                return Err(NewtonError::EnumerationTooLarge {
                    visited: self.visited,
                    cap: ENUMERATION_CAP,
                });
            }
            if slots == 0 {
                if rem == 0 {
                    let mut ord = self.ord_k_factorial;
                    for &(_, count) in groups.iter() {
                        ord -= factorial_valuation(count, self.p);
                    }
                    let total = ord + val_sum;
                    if self.best.map_or(true, |b| total < b) {
                        self.best = Some(total);
                    }
                }
                return Ok(());
            }
            if let Some(best) = self.best {
                // ord_p of a multinomial coefficient is nonnegative, so the
                // valuation sum alone already rules this branch out.
                if val_sum >= best {
                    return Ok(());
                }
            }
            let slots_u = slots as u64;
            for value in lo..=self.n {
                if value * slots_u > rem {
                    break;
                }
                if rem > value + self.n * (slots_u - 1) {
                    continue;
                }
                let Valuation::Finite(v) = self.vals[value as usize] else {
                    continue;
                };
                if let Some((gv, gc)) = groups.last_mut() {
                    if *gv == value {
                        *gc += 1;
                    } else {
                        groups.push((value, 1));
                    }
                } else {
                    groups.push((value, 1));
                }
                self.rec(groups, slots - 1, value, rem - value, val_sum + v)?;
                let (_, gc) = groups.last_mut().expect("just pushed");
                if *gc == 1 {
                    groups.pop();
                } else {
                    *gc -= 1;
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        vals: &vals,
        p: p.get(),
        n,
        ord_k_factorial,
        visited: 0,
        best: None,
    };
    let mut groups = Vec::new();
    search.rec(&mut groups, k, 0, i, 0)?;
    Ok(match search.best {
        Some(v) => Valuation::Finite(v),
        None => Valuation::Infinite,
    })
}

fn eval_mod(f: &IntPoly, x: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in f.coeffs().iter().rev() {
        acc = (acc * x + c).mod_floor(modulus);
    }
    acc
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    let eg = a.extended_gcd(modulus);
    debug_assert!(eg.gcd == BigInt::from(1), "inverse of a non-unit");
    eg.x.mod_floor(modulus)
}

/// f(r0 + p t) as a polynomial in t.
fn compose_affine(f: &IntPoly, r0: u64, p: u64) -> IntPoly {
    let lin = IntPoly::new(vec![BigInt::from(r0), BigInt::from(p)]);
    let mut acc = IntPoly::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(&lin).add(&IntPoly::constant(c.clone()));
    }
    acc
}

/// Newton-lifts a residue r0 with g(r0) = 0 mod p and g'(r0) a unit mod p
/// up to p^target_exp, doubling precision each step.
fn lift_simple_root(g: &IntPoly, deriv: &IntPoly, r0: u64, p: u64, target_exp: u32) -> BigInt {
    let mut exp = 1u32;
    let mut root = BigInt::from(r0);
    while exp < target_exp {
        let next = (2 * exp).min(target_exp);
        let modulus = big_prime_power(p, next as u64);
        let value = eval_mod(g, &root, &modulus);
        let slope = eval_mod(deriv, &root, &modulus);
        let inv = mod_inverse(&slope, &modulus);
        root = (root - value * inv).mod_floor(&modulus);
        exp = next;
    }
    debug_assert!(eval_mod(g, &root, &big_prime_power(p, target_exp as u64)).is_zero());
    root
}

fn collect_unit_roots(
    g: &IntPoly,
    p: u64,
    base: &BigInt,
    level: u32,
    precision: u32,
    out: &mut Vec<BigInt>,
) -> Result<(), NewtonError> {
    debug_assert!(level < precision);
    let remaining = precision - level;
    let deriv = g.derivative();
    let p_big = BigInt::from(p);
    for r0 in 0..p {
        let r_big = BigInt::from(r0);
        if !eval_mod(g, &r_big, &p_big).is_zero() {
            continue;
        }
        let class_rep = base + big_prime_power(p, level as u64) * &r_big;
        if !eval_mod(&deriv, &r_big, &p_big).is_zero() {
            // t = r0 mod p, so base + p^level * t lands in this class.
            let t = lift_simple_root(g, &deriv, r0, p, remaining);
            let residue = (base + big_prime_power(p, level as u64) * t)
                .mod_floor(&big_prime_power(p, precision as u64));
            out.push(residue);
        } else {
            if remaining <= 1 {
                return Err(NewtonError::PrecisionTooLow {
                    p,
                    residue: class_rep.to_string(),
                });
            }
            // Zoom into the class: substitute b = class_rep + p^{level+1} t,
            // realized on g as t-variable polynomial g(r0 + p t) with its
            // p-content removed (the content is at least p once both g(r0)
            // and g'(r0) vanish mod p).
            let shifted = compose_affine(g, r0, p);
            let (zoomed, shed) = strip_p_content(&shifted, Prime::new(p).expect("prime"))
                .expect("shifted polynomial of a nonzero polynomial is nonzero");
            debug_assert!(shed >= 1);
            collect_unit_roots(&zoomed, p, &class_rep, level + 1, precision, out)?;
        }
    }
    Ok(())
}

/// The roots of f in Z_p that are isolated by unit-derivative lifting,
/// returned as residues mod p^precision in ascending order.
///
/// The p-part of the content is removed first. A residue class whose root
/// candidate keeps a non-invertible derivative is refined by the exact
/// change of variable b = r0 + p t (with the fresh p-content removed) and
/// retried; each refinement consumes one level of precision, and a class
/// still unresolved when the budget runs out raises `PrecisionTooLow`.
/// Every returned residue satisfies f = 0 mod p^precision and lifts to a
/// unique root in Z_p.
pub fn padic_unit_roots(
    f: &IntPoly,
    p: Prime,
    precision: u32,
) -> Result<Vec<BigInt>, NewtonError> {
    if f.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    assert!(precision >= 1, "precision must be at least 1");
    let (g, _) = strip_p_content(f, p)?;
    let mut out = Vec::new();
    collect_unit_roots(&g, p.get(), &BigInt::zero(), 0, precision, &mut out)?;
    out.sort();
    Ok(out)
}

/// Number of simple Q_p-rational roots of f detected by lifting.
///
/// Roots in Z_p (valuation >= 0) come from `padic_unit_roots` directly.
/// A root of negative valuation — possible whenever p divides the leading
/// coefficient, e.g. 81b - 1 at p = 3 with root 1/81 — is the reciprocal
/// of a strictly-positive-valuation root of the reversed coefficient
/// sequence, so those are counted by lifting the reversal inside pZ_p.
/// The split is disjoint (valuation 0 roots are fixed by reciprocation
/// but only searched on the direct side), so nothing is double counted.
/// Whenever this returns at all the count is exhaustive for simple
/// Q_p-rational roots; an ambiguous residue class raises `PrecisionTooLow`
/// rather than undercounting. Roots at b = 0 (a monomial factor) are not
/// counted: they are split off as `leading_gap` by polygon consumers.
pub fn padic_root_count(f: &IntPoly, p: Prime, precision: u32) -> Result<usize, NewtonError> {
    if f.is_zero() {
        return Err(NewtonError::ZeroPolynomial);
    }
    let cofactor = IntPoly::new(f.coeffs()[f.trailing_zeros()..].to_vec());
    let direct = padic_unit_roots(&cofactor, p, precision)?.len();
    let mut reversed: Vec<BigInt> = cofactor.coeffs().to_vec();
    reversed.reverse();
    let reversal = IntPoly::new(reversed);
    if reversal.degree().finite().map_or(true, |deg| deg == 0) {
        return Ok(direct);
    }
    // Roots of the reversal in pZ_p, via the substitution c = p t.
    let shifted = compose_affine(&reversal, 0, p.get());
    let (inner, _) = strip_p_content(&shifted, p)?;
    let negative = padic_unit_roots(&inner, p, precision)?.len();
    Ok(direct + negative)
}

/// Default lifting precision for root counting.
pub const DEFAULT_ROOT_PRECISION: u32 = 20;
