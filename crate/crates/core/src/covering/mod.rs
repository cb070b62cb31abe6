//! Disc coverings of the plane attached to reduced ideals.
//!
//! For a reduced ideal `b` meeting the coefficient set `B`, the family
//! consists of discs `D(a/b, 1/|b|)` with `a` running over the inverse
//! lattice of `b` and `b` over `b ∩ B`, keeping only those `a` whose pair
//! ideal `a*b + b*b^{-1}` is reduced. Membership of the pair ideal is
//! constant on cosets of `b*b^{-1}`, and every per-`b` family is invariant
//! under translating centers by the inverse lattice, so one representative
//! disc per coset plus that translation lattice describes the whole family.
//!
//! Admissibility of `B` is decided by scanning every pair of intersecting
//! discs for the least scale at which their boundary-intersection points
//! stay inside the open scaled family, and maximizing over pairs and ideals.

mod scale;

pub use scale::PairScale;

use crate::numerics::{QuadComplex, Rational};
use crate::ring::{enumerate_reduced_ideals_meeting, IdealLattice, Ring, RingElement};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use scale::{pair_scale, DiscGeom};
use std::fmt::Write as _;

/// One disc `D(a/b, t/|b|)` of a covering family, scale factor `t` pending.
#[derive(Clone, Debug, PartialEq)]
pub struct Disc {
    center: QuadComplex,
    radius_weight_sq: Rational,
    tag: (QuadComplex, RingElement),
}

impl Disc {
    pub fn center(&self) -> &QuadComplex {
        &self.center
    }

    /// Squared radius weight `1/N(b)`; the radius itself is irrational for
    /// non-rational `b`.
    pub fn radius_weight_sq(&self) -> &Rational {
        &self.radius_weight_sq
    }

    pub fn radius_weight(&self) -> f64 {
        self.radius_weight_sq.to_f64().unwrap().sqrt()
    }

    /// The pair `(a, b)` this disc came from.
    pub fn tag(&self) -> (&QuadComplex, &RingElement) {
        (&self.tag.0, &self.tag.1)
    }
}

/// The complete disc family of one reduced ideal, as coset representatives
/// plus the translation lattice of their centers.
#[derive(Clone, Debug)]
pub struct CoveringInstance {
    ideal: IdealLattice,
    discs: Vec<Disc>,
    period_lattice: IdealLattice,
}

impl CoveringInstance {
    pub fn ideal(&self) -> &IdealLattice {
        &self.ideal
    }

    pub fn discs(&self) -> &[Disc] {
        &self.discs
    }

    pub fn period_lattice(&self) -> &IdealLattice {
        &self.period_lattice
    }

    pub fn ring(&self) -> Ring {
        self.ideal.ring()
    }

    /// The representative disc translated by `m1, m2` periods.
    pub fn translated_disc(&self, disc: &Disc, m1: i64, m2: i64) -> Disc {
        let [e1, e2] = self.period_lattice.basis_qc();
        let w = e1.scale(&Rational::from_integer(m1.into()))
            + e2.scale(&Rational::from_integer(m2.into()));
        let b_qc = disc.tag.1.to_quad_complex();
        Disc {
            center: disc.center.clone() + w.clone(),
            radius_weight_sq: disc.radius_weight_sq.clone(),
            tag: (disc.tag.0.clone() + w * b_qc, disc.tag.1.clone()),
        }
    }

    /// Whether the point is within some disc of the family at this scale.
    /// The test is closed with a small float slack.
    pub fn is_point_covered(&self, x: f64, y: f64, scale: f64) -> bool {
        let geo = InstanceGeometry::new(self);
        geo.discs_near(x, y, geo.max_r)
            .iter()
            .any(|(_, _, _, g)| {
                let dx = x - g.fx;
                let dy = y - g.fy;
                dx * dx + dy * dy <= scale * scale * g.fr * g.fr + 1e-12
            })
    }

    /// Boundary-intersection point of some disc pair left uncovered by the
    /// open family at this scale, if any. Pure f64 with a strictness margin;
    /// a hit below the reported critical scale is the geometric witness that
    /// the family cannot yet cover the plane, while grid sampling misses the
    /// sliver. Checks one period of anchor discs, which suffices by
    /// translation invariance.
    pub fn uncovered_intersection_point(&self, scale: f64) -> Option<(f64, f64)> {
        let geo = InstanceGeometry::new(self);
        for (i, g1) in geo.geoms.iter().enumerate() {
            let near = geo.discs_near(g1.fx, g1.fy, g1.fr + geo.max_r + 1e-6);
            let r1 = scale * g1.fr;
            for (j, m1, m2, g2) in &near {
                if (*j == i && *m1 == 0 && *m2 == 0) || g2.same_geometry(g1) {
                    continue;
                }
                let (dx, dy) = (g2.fx - g1.fx, g2.fy - g1.fy);
                let d_sq = dx * dx + dy * dy;
                let r2 = scale * g2.fr;
                if d_sq == 0.0 || d_sq > (r1 + r2) * (r1 + r2) {
                    continue;
                }
                let alpha = (d_sq + r1 * r1 - r2 * r2) / (2.0 * d_sq);
                let g = r1 * r1 / d_sq - alpha * alpha;
                if g < 0.0 {
                    continue;
                }
                let sg = g.sqrt();
                for sigma in [1.0, -1.0] {
                    let px = g1.fx + alpha * dx - sigma * sg * dy;
                    let py = g1.fy + alpha * dy + sigma * sg * dx;
                    let covered = near.iter().any(|(_, _, _, c)| {
                        let ddx = px - c.fx;
                        let ddy = py - c.fy;
                        ddx * ddx + ddy * ddy < (scale * c.fr).powi(2) - 1e-12
                    });
                    if !covered {
                        return Some((px, py));
                    }
                }
            }
        }
        None
    }

    /// First grid sample of the period cell not covered at this scale.
    /// `pitch` is the sample spacing as a fraction of the cell edges.
    pub fn sample_uncovered_point(&self, scale: f64, pitch: f64) -> Option<(f64, f64)> {
        let geo = InstanceGeometry::new(self);
        let (ccx, ccy) = (
            (geo.e1f.0 + geo.e2f.0) / 2.0,
            (geo.e1f.1 + geo.e2f.1) / 2.0,
        );
        let reach = ccx.hypot(ccy) + geo.max_r + 1e-6;
        let discs: Vec<(f64, f64, f64)> = geo
            .discs_near(ccx, ccy, reach)
            .into_iter()
            .map(|(_, _, _, g)| (g.fx, g.fy, (scale * g.fr).powi(2) + 1e-12))
            .collect();
        let n = (1.0 / pitch).round() as usize;
        for i in 0..n {
            for j in 0..n {
                let (u, v) = (i as f64 * pitch, j as f64 * pitch);
                let x = u * geo.e1f.0 + v * geo.e2f.0;
                let y = u * geo.e1f.1 + v * geo.e2f.1;
                let hit = discs
                    .iter()
                    .any(|&(cx, cy, rr)| (x - cx).powi(2) + (y - cy).powi(2) <= rr);
                if !hit {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

/// Splits a field element into `(x, s)` with value `x + s*sqrt(d)*i`. For a
/// perfect-square radicand the surd is stored folded and must be divided out.
fn split_qc(qc: &QuadComplex) -> (Rational, Rational) {
    debug_assert!(qc.re().surd_part().is_zero());
    let s = match crate::numerics::exact_sqrt(qc.radicand()) {
        Some(k) => qc.im().rational_part() / Rational::from_integer(k.into()),
        None => {
            debug_assert!(qc.im().rational_part().is_zero());
            qc.im().surd_part().clone()
        }
    };
    (qc.re().rational_part().clone(), s)
}

/// Geometry tables for one instance: split-coordinate representatives and
/// the period basis, ready for translate enumeration.
struct InstanceGeometry {
    geoms: Vec<DiscGeom>,
    e1: (Rational, Rational),
    e2: (Rational, Rational),
    e1f: (f64, f64),
    e2f: (f64, f64),
    area: f64,
    max_r: f64,
    d_rad: Rational,
    sqrt_d: f64,
}

impl InstanceGeometry {
    fn new(inst: &CoveringInstance) -> InstanceGeometry {
        let ring = inst.ring();
        let sqrt_d = (ring.radicand() as f64).sqrt();
        let d_rad = Rational::from_integer(ring.radicand().into());
        let geoms: Vec<DiscGeom> = inst
            .discs
            .iter()
            .map(|disc| {
                let (cx, cs) = split_qc(&disc.center);
                DiscGeom::new(cx, cs, disc.radius_weight_sq.clone(), sqrt_d)
            })
            .collect();
        let [b1, b2] = inst.period_lattice.basis_qc();
        let e1 = split_qc(&b1);
        let e2 = split_qc(&b2);
        let to_f = |e: &(Rational, Rational)| {
            (e.0.to_f64().unwrap(), e.1.to_f64().unwrap() * sqrt_d)
        };
        let e1f = to_f(&e1);
        let e2f = to_f(&e2);
        let area = (e1f.0 * e2f.1 - e1f.1 * e2f.0).abs();
        let max_r = geoms.iter().map(|g| g.fr).fold(0.0, f64::max);
        InstanceGeometry { geoms, e1, e2, e1f, e2f, area, max_r, d_rad, sqrt_d }
    }

    /// All period translates of representative discs with center within
    /// `bound` of `(px, py)`, keyed by representative index and translation.
    fn discs_near(&self, px: f64, py: f64, bound: f64) -> Vec<(usize, i64, i64, DiscGeom)> {
        let rb = bound + 1e-6;
        let e1len = self.e1f.0.hypot(self.e1f.1);
        let e2len = self.e2f.0.hypot(self.e2f.1);
        let det = self.e1f.0 * self.e2f.1 - self.e1f.1 * self.e2f.0;
        let mut out = Vec::new();
        for (j, rep) in self.geoms.iter().enumerate() {
            let wx = px - rep.fx;
            let wy = py - rep.fy;
            let m1c = (wx * self.e2f.1 - wy * self.e2f.0) / det;
            let m2c = (self.e1f.0 * wy - self.e1f.1 * wx) / det;
            let m1r = rb * e2len / self.area;
            let m2r = rb * e1len / self.area;
            for m1 in (m1c - m1r).floor() as i64..=(m1c + m1r).ceil() as i64 {
                for m2 in (m2c - m2r).floor() as i64..=(m2c + m2r).ceil() as i64 {
                    let mr1 = Rational::from_integer(m1.into());
                    let mr2 = Rational::from_integer(m2.into());
                    let cx = &rep.cx + &mr1 * &self.e1.0 + &mr2 * &self.e2.0;
                    let cs = &rep.cs + &mr1 * &self.e1.1 + &mr2 * &self.e2.1;
                    let g = DiscGeom::new(cx, cs, rep.r_sq.clone(), self.sqrt_d);
                    if (g.fx - px).hypot(g.fy - py) <= rb {
                        out.push((j, m1, m2, g));
                    }
                }
            }
        }
        out
    }
}

/// Builds the disc family of one reduced ideal for the set `B`.
pub fn build_covering_instance(
    ring: Ring,
    bset: &[RingElement],
    ideal: &IdealLattice,
) -> Result<CoveringInstance> {
    let bs = validated_set(ring, bset)?;
    if !ideal.is_reduced() {
        return Err(Error::Precondition("covering ideal must be reduced".into()));
    }
    if !bs.iter().any(|b| ideal.contains_element(b)) {
        return Err(Error::Precondition("covering ideal must meet the set".into()));
    }
    let binv = ideal.inverse_lattice();
    let mut discs = Vec::new();
    for b in &bs {
        if !ideal.contains_element(b) {
            continue;
        }
        let sub = binv.mul_element(b)?;
        let b_qc = b.to_quad_complex();
        let weight_sq = Rational::one() / Rational::from_integer(b.norm());
        for (u, v) in binv.coset_reps_in(&sub)? {
            let pair_ideal = if u.is_zero() && v.is_zero() {
                sub.clone()
            } else {
                ideal.mul_xy(&u, &v)?.sum(&sub)
            };
            if !pair_ideal.is_reduced() {
                continue;
            }
            let a_qc = ring.embed_xy(&u, &v);
            discs.push(Disc {
                center: a_qc.clone() / b_qc.clone(),
                radius_weight_sq: weight_sq.clone(),
                tag: (a_qc, b.clone()),
            });
        }
    }
    Ok(CoveringInstance {
        ideal: ideal.clone(),
        discs,
        period_lattice: binv,
    })
}

fn validated_set(ring: Ring, bset: &[RingElement]) -> Result<Vec<RingElement>> {
    if bset.is_empty() {
        return Err(Error::InvalidSet("the set must be nonempty".into()));
    }
    let mut bs = Vec::with_capacity(bset.len());
    for b in bset {
        if b.ring() != ring {
            return Err(Error::RingMismatch(ring.discriminant(), b.ring().discriminant()));
        }
        if b.is_zero() {
            return Err(Error::InvalidSet("the set must not contain zero".into()));
        }
        bs.push(b.clone());
    }
    bs.sort_by_key(|b| b.canonical_key());
    bs.dedup();
    Ok(bs)
}

/// Least scale at which the boundary-intersection points of the two discs
/// stay covered by the open scaled family, or `None` when the discs never
/// intersect at scale <= 1.
pub fn min_epsilon_pair(
    d1: &Disc,
    d2: &Disc,
    inst: &CoveringInstance,
) -> Option<PairScale> {
    let geo = InstanceGeometry::new(inst);
    let sqrt_d = (inst.ring().radicand() as f64).sqrt();
    let mk = |d: &Disc| {
        let (cx, cs) = split_qc(&d.center);
        DiscGeom::new(cx, cs, d.radius_weight_sq.clone(), sqrt_d)
    };
    let g1 = mk(d1);
    let g2 = mk(d2);
    if g1.same_geometry(&g2) {
        return None;
    }
    let coverers: Vec<DiscGeom> = geo
        .discs_near(g1.fx, g1.fy, g1.fr + geo.max_r + 1e-6)
        .into_iter()
        .map(|(_, _, _, g)| g)
        .filter(|g| !g.same_geometry(&g1) && !g.same_geometry(&g2))
        .collect();
    pair_scale(&g1, &g2, &coverers, &geo.d_rad)
}

/// Result of the admissibility decision, with an exact enclosure of the
/// squared critical scale.
#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    admissible: bool,
    eps_sq_lo: Rational,
    eps_sq_hi: Rational,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.admissible
    }

    pub fn eps_sq_lo(&self) -> &Rational {
        &self.eps_sq_lo
    }

    pub fn eps_sq_hi(&self) -> &Rational {
        &self.eps_sq_hi
    }

    pub fn eps_sq(&self) -> f64 {
        (self.eps_sq_lo.to_f64().unwrap() + self.eps_sq_hi.to_f64().unwrap()) / 2.0
    }

    pub fn eps(&self) -> f64 {
        self.eps_sq().sqrt()
    }

    pub fn eps_lo(&self) -> f64 {
        self.eps_sq_lo.to_f64().unwrap().sqrt()
    }

    pub fn eps_hi(&self) -> f64 {
        self.eps_sq_hi.to_f64().unwrap().sqrt()
    }
}

/// Decides whether `B` is admissible and computes the minimal scale: the
/// maximum of `min_epsilon_pair` over every reduced ideal meeting `B` and
/// every intersecting disc pair of its family.
pub fn check_admissible(ring: Ring, bset: &[RingElement]) -> Result<AdmissibilityReport> {
    let bs = validated_set(ring, bset)?;
    let ideals = enumerate_reduced_ideals_meeting(ring, &bs)?;
    let mut instances = Vec::with_capacity(ideals.len());
    for ideal in &ideals {
        instances.push(build_covering_instance(ring, &bs, ideal)?);
    }
    let geos: Vec<InstanceGeometry> = instances.iter().map(InstanceGeometry::new).collect();
    let anchors: Vec<(usize, usize)> = geos
        .iter()
        .enumerate()
        .flat_map(|(ii, g)| (0..g.geoms.len()).map(move |i| (ii, i)))
        .collect();

    let zero = (Rational::zero(), Rational::zero());
    let (eps_sq_lo, eps_sq_hi) = anchors
        .par_iter()
        .map(|&(ii, i)| {
            let geo = &geos[ii];
            let g1 = &geo.geoms[i];
            let near = geo.discs_near(g1.fx, g1.fy, g1.fr + geo.max_r + 1e-6);
            let mut best = (Rational::zero(), Rational::zero());
            for (j, m1, m2, g2) in &near {
                let keep = *j > i
                    || (*j == i && (*m1 > 0 || (*m1 == 0 && *m2 > 0)));
                if !keep {
                    continue;
                }
                let dist = (g2.fx - g1.fx).hypot(g2.fy - g1.fy);
                if dist > g1.fr + g2.fr + 1e-9 {
                    continue;
                }
                let coverers: Vec<DiscGeom> = near
                    .iter()
                    .filter(|(cj, cm1, cm2, cg)| {
                        !(*cj == i && *cm1 == 0 && *cm2 == 0)
                            && !(cj == j && cm1 == m1 && cm2 == m2)
                            && !cg.same_geometry(g1)
                            && !cg.same_geometry(g2)
                    })
                    .map(|(_, _, _, g)| g.clone())
                    .collect();
                if let Some(ps) = pair_scale(g1, g2, &coverers, &geo.d_rad) {
                    if ps.delta_sq_lo() > &best.0 {
                        best.0 = ps.delta_sq_lo().clone();
                    }
                    if ps.delta_sq_hi() > &best.1 {
                        best.1 = ps.delta_sq_hi().clone();
                    }
                }
            }
            best
        })
        .reduce(
            || zero.clone(),
            |a, b| (a.0.max(b.0), a.1.max(b.1)),
        );

    let admissible = eps_sq_lo.is_positive() && eps_sq_hi < Rational::one();
    Ok(AdmissibilityReport { admissible, eps_sq_lo, eps_sq_hi })
}

/// Admissible parameters ready for the expansion engine.
#[derive(Clone, Debug)]
pub struct AdmissibleParams {
    b_set: Vec<RingElement>,
    eps_sq: Rational,
    mu_sq: Rational,
}

impl AdmissibleParams {
    pub fn new(b_set: Vec<RingElement>, eps_sq: Rational) -> AdmissibleParams {
        assert!(eps_sq.is_positive() && eps_sq < Rational::one());
        assert!(!b_set.is_empty());
        let mu_sq = b_set
            .iter()
            .map(|b| Rational::from_integer(b.norm()))
            .max()
            .unwrap();
        AdmissibleParams { b_set, eps_sq, mu_sq }
    }

    pub fn b_set(&self) -> &[RingElement] {
        &self.b_set
    }

    pub fn eps_sq(&self) -> &Rational {
        &self.eps_sq
    }

    pub fn mu_sq(&self) -> &Rational {
        &self.mu_sq
    }

    pub fn mu(&self) -> f64 {
        self.mu_sq.to_f64().unwrap().sqrt()
    }
}

/// All elements of the order with norm at most `n_max`, zero included.
fn elements_in_disc(ring: Ring, n_max: &BigInt) -> Vec<RingElement> {
    let mut out = Vec::new();
    if n_max.is_negative() {
        return out;
    }
    let abs_delta = BigInt::from(ring.abs_delta());
    let t = BigInt::from(ring.tau_trace());
    let four_n = BigInt::from(4) * n_max;
    let two = BigInt::from(2);
    let y_max = (four_n.clone() / &abs_delta).sqrt();
    let mut y = -y_max.clone();
    while y <= y_max {
        // x^2 + t x y + n y^2 <= n_max puts x between (-ty -+ sqrt(D))/2
        // with D = 4 n_max - |Delta| y^2; widen by one and filter exactly.
        let d = &four_n - &abs_delta * (&y * &y);
        if !d.is_negative() {
            let s = d.sqrt();
            let ty = &t * &y;
            let lo = (-(&ty) - &s - BigInt::one()).div_floor(&two);
            let hi = (-(&ty) + &s + BigInt::one()).div_ceil(&two);
            let mut x = lo;
            while x <= hi {
                let e = ring.from_xy(x.clone(), y.clone());
                if e.norm() <= *n_max {
                    out.push(e);
                }
                x += 1;
            }
        }
        y += 1;
    }
    out.sort_by_key(|e| e.canonical_key());
    out
}

fn prop_radii(ring: Ring, eps_f: f64) -> (f64, f64) {
    let ad = ring.abs_delta() as f64;
    let r0 = (1.0 / eps_f) * (2.0 * ad / (3f64.sqrt() * std::f64::consts::PI)).sqrt();
    let r1 = (1.0 / (eps_f * eps_f)) * (ad / 3.0).sqrt();
    (r0, r1)
}

/// The constructed admissible set: nonzero elements within the interpolated
/// radius `ceil(r0^(1-delta) r1^delta)`.
pub fn generic_admissible_set(ring: Ring, eps: &Rational) -> Result<Vec<RingElement>> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::EpsOutOfRange(format!("eps = {} not in (0, 1)", eps)));
    }
    let m = (Rational::new(4.into(), 3.into()) / eps).floor().to_integer();
    let delta = 1.0 / m.to_f64().unwrap();
    let (r0, r1) = prop_radii(ring, eps.to_f64().unwrap());
    let radius = (r0.powf(1.0 - delta) * r1.powf(delta) - 1e-9).ceil() as i64;
    let n_max = BigInt::from(radius * radius);
    Ok(elements_in_disc(ring, &n_max)
        .into_iter()
        .filter(|e| !e.is_zero())
        .collect())
}

/// Variant of the constructed set at eps = 2/3 that skips the radius
/// ceiling whenever the point quota `|O ∩ D(0, mu/2)| >= sqrt|Delta|/(sqrt3
/// eps^2)` still holds, giving the sharper bound `mu < sqrt(4|Delta|/3)`.
/// Small discriminants fall back to the ceiled set, except `|Delta| = 19`
/// whose covering needs non-rational elements.
pub fn generic_admissible_set_tight(ring: Ring) -> Result<Vec<RingElement>> {
    if ring.abs_delta() == 19 {
        let mut set = vec![ring.one(), ring.el_tau(), ring.element(1, -1)];
        set.sort_by_key(|e| e.canonical_key());
        return Ok(set);
    }
    let eps = Rational::new(2.into(), 3.into());
    let (r0, r1) = prop_radii(ring, 2.0 / 3.0);
    let mu_sq = r0 * r1;
    let quarter = BigInt::from((mu_sq / 4.0 + 1e-9).floor() as i64);
    let count = elements_in_disc(ring, &quarter).len() as u64;
    if 16 * count * count >= 27 * ring.abs_delta() {
        let n_max = BigInt::from((mu_sq + 1e-9).floor() as i64);
        Ok(elements_in_disc(ring, &n_max)
            .into_iter()
            .filter(|e| !e.is_zero())
            .collect())
    } else {
        generic_admissible_set(ring, &eps)
    }
}

/// Candidate enumeration order for the minimal-set search.
#[derive(Clone, Debug)]
pub enum CandidateRule {
    /// Sets {1, 2, ..., m} for m up to the bound.
    IntegerPrefix { max_m: u64 },
    /// Every subset of the nonzero elements with norm at most the bound,
    /// one element kept per sign pair, at most `max_count` subsets.
    Subsets { max_mu_sq: u64, max_count: usize },
}

impl Default for CandidateRule {
    fn default() -> CandidateRule {
        CandidateRule::IntegerPrefix { max_m: 24 }
    }
}

/// Searches candidate sets in nondecreasing `mu` order (ties: fewer
/// elements, then lexicographic norms, then element order) and returns the
/// first admissible one with its minimal scale.
pub fn find_minimal_admissible_set(
    ring: Ring,
    rule: &CandidateRule,
) -> Result<AdmissibleParams> {
    // No set with max |b| below floor(sqrt|Delta|/2) can cover the plane,
    // so candidates under that threshold are skipped outright.
    let mu_floor = ((ring.abs_delta() as f64).sqrt() / 2.0).floor();
    match rule {
        CandidateRule::IntegerPrefix { max_m } => {
            for m in 1..=*max_m {
                if (m as f64) < mu_floor {
                    continue;
                }
                let bs: Vec<RingElement> =
                    (1..=m as i64).map(|v| ring.from_int(v)).collect();
                let report = check_admissible(ring, &bs)?;
                if report.admissible() {
                    return Ok(AdmissibleParams::new(bs, report.eps_sq_hi().clone()));
                }
            }
            Err(Error::SearchBoundExceeded { bound: *max_m })
        }
        CandidateRule::Subsets { max_mu_sq, max_count } => {
            let base: Vec<RingElement> =
                elements_in_disc(ring, &BigInt::from(*max_mu_sq))
                    .into_iter()
                    .filter(|e| {
                        e.y().is_positive()
                            || (e.y().is_zero() && e.x().is_positive())
                    })
                    .collect();
            let k = base.len();
            if k >= usize::BITS as usize || (1usize << k) - 1 > *max_count {
                return Err(Error::SearchBoundExceeded { bound: *max_count as u64 });
            }
            let mut candidates: Vec<Vec<RingElement>> = (1..(1usize << k))
                .map(|mask| {
                    (0..k)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| base[i].clone())
                        .collect()
                })
                .collect();
            candidates.sort_by_cached_key(|bs| {
                let mut norms: Vec<BigInt> = bs.iter().map(|b| b.norm()).collect();
                norms.sort();
                let keys: Vec<_> = bs.iter().map(|b| b.canonical_key()).collect();
                (norms.last().unwrap().clone(), bs.len(), norms.clone(), keys)
            });
            for bs in candidates {
                let mu_sq = bs.iter().map(|b| b.norm()).max().unwrap();
                if mu_sq.to_f64().unwrap().sqrt() < mu_floor {
                    continue;
                }
                let report = check_admissible(ring, &bs)?;
                if report.admissible() {
                    return Ok(AdmissibleParams::new(bs, report.eps_sq_hi().clone()));
                }
            }
            Err(Error::SearchBoundExceeded { bound: *max_mu_sq })
        }
    }
}

/// Deterministic SVG rendering of one instance at the given scale, with the
/// period cell outlined and optional marked points.
pub fn covering_svg(inst: &CoveringInstance, scale: f64, marked: &[(f64, f64)]) -> String {
    assert!(scale > 0.0 && scale <= 1.0, "scale must be in (0, 1]");
    let geo = InstanceGeometry::new(inst);
    let corners = [
        (0.0, 0.0),
        geo.e1f,
        (geo.e1f.0 + geo.e2f.0, geo.e1f.1 + geo.e2f.1),
        geo.e2f,
    ];
    let margin = geo.max_r + 0.25;
    let min_x = corners.iter().map(|c| c.0).fold(f64::MAX, f64::min) - margin;
    let max_x = corners.iter().map(|c| c.0).fold(f64::MIN, f64::max) + margin;
    let min_y = corners.iter().map(|c| c.1).fold(f64::MAX, f64::min) - margin;
    let max_y = corners.iter().map(|c| c.1).fold(f64::MIN, f64::max) + margin;
    let (cx, cy) = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);
    let reach = ((max_x - min_x).hypot(max_y - min_y)) / 2.0 + geo.max_r;
    let mut discs = geo.discs_near(cx, cy, reach);
    discs.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="720" height="{:.0}">"#,
        min_x,
        -max_y,
        max_x - min_x,
        max_y - min_y,
        720.0 * (max_y - min_y) / (max_x - min_x)
    );
    let _ = writeln!(svg, r#"<g transform="scale(1,-1)">"#);
    for (_, _, _, g) in &discs {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="#4a90d9" fill-opacity="0.22" stroke="#1f5fa8" stroke-width="0.012"/>"##,
            g.fx,
            g.fy,
            scale * g.fr
        );
    }
    let _ = writeln!(
        svg,
        r##"<polygon points="0,0 {:.6},{:.6} {:.6},{:.6} {:.6},{:.6}" fill="none" stroke="#333333" stroke-width="0.02"/>"##,
        geo.e1f.0,
        geo.e1f.1,
        geo.e1f.0 + geo.e2f.0,
        geo.e1f.1 + geo.e2f.1,
        geo.e2f.0,
        geo.e2f.1
    );
    for (x, y) in marked {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.6}" cy="{:.6}" r="0.035" fill="#c0392b"/>"##,
            x, y
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(delta: i64) -> Ring {
        Ring::from_discriminant(delta).unwrap()
    }

    fn ints(r: Ring, vals: &[i64]) -> Vec<RingElement> {
        vals.iter().map(|&v| r.from_int(v)).collect()
    }

    #[test]
    fn instance_family_disc23() {
        let r = ring(-23);
        let o = IdealLattice::one(r);
        let inst = build_covering_instance(r, &ints(r, &[1, 2]), &o).unwrap();
        assert_eq!(inst.discs().len(), 4);
        let mut weights: Vec<Rational> = inst
            .discs()
            .iter()
            .map(|d| d.radius_weight_sq().clone())
            .collect();
        weights.sort();
        let q = |n, d| Rational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(weights, vec![q(1, 4), q(1, 4), q(1, 4), q(1, 1)]);
        // The half-radius discs sit on the three odd cosets; none at 0.
        let centers: Vec<(f64, f64)> = inst
            .discs()
            .iter()
            .filter(|d| d.radius_weight_sq() == &q(1, 4))
            .map(|d| d.center().to_f64_pair())
            .collect();
        for (x, y) in centers {
            assert!(x.hypot(y) > 0.4, "half disc at the origin");
        }
        assert_eq!(inst.period_lattice(), &o);
    }

    #[test]
    fn instance_keeps_noninvertible_ideal_family() {
        let r = ring(-12);
        let bs = ints(r, &[1, 2]);
        let ideals = enumerate_reduced_ideals_meeting(r, &bs).unwrap();
        assert_eq!(ideals.len(), 2);
        assert!(!ideals[1].is_invertible());
        let inst = build_covering_instance(r, &bs, &ideals[1]).unwrap();
        assert_eq!(inst.discs().len(), 4);
        for d in inst.discs() {
            assert_eq!(d.radius_weight_sq(), &Rational::new(1.into(), 4.into()));
        }
    }

    #[test]
    fn instance_preconditions() {
        let r = ring(-23);
        let o = IdealLattice::one(r);
        assert!(build_covering_instance(r, &[], &o).is_err());
        assert!(build_covering_instance(r, &[r.zero()], &o).is_err());
        let not_reduced =
            crate::ring::ideal_from_elements(r, &[r.from_int(2)]).unwrap();
        assert!(build_covering_instance(r, &ints(r, &[1, 2]), &not_reduced).is_err());
        let norm_two = crate::ring::ideal_from_elements(r, &[r.from_int(2), r.el_tau()])
            .unwrap();
        // Reduced but disjoint from {1}: precondition fails.
        assert!(build_covering_instance(r, &ints(r, &[1]), &norm_two).is_err());
    }

    #[test]
    fn pair_example_gaussian_unit_discs() {
        let r = ring(-4);
        let o = IdealLattice::one(r);
        let inst = build_covering_instance(r, &ints(r, &[1]), &o).unwrap();
        assert_eq!(inst.discs().len(), 1);
        let d0 = &inst.discs()[0];
        let d1 = inst.translated_disc(d0, 1, 0);
        let ps = min_epsilon_pair(d0, &d1, &inst).unwrap();
        assert!((ps.delta() - 0.5f64.sqrt()).abs() < 1e-12);
        // A pair with gap beyond the radius sum never intersects.
        let far = inst.translated_disc(d0, 3, 0);
        assert!(min_epsilon_pair(d0, &far, &inst).is_none());
    }

    #[test]
    fn pair_example_eisenstein() {
        let r = ring(-3);
        let o = IdealLattice::one(r);
        let inst = build_covering_instance(r, &ints(r, &[1]), &o).unwrap();
        let d0 = &inst.discs()[0];
        let d1 = inst.translated_disc(d0, 1, 0);
        let ps = min_epsilon_pair(d0, &d1, &inst).unwrap();
        let delta_sq = ps.delta().powi(2);
        assert!((delta_sq - 1.0 / 3.0).abs() < 1e-12, "{}", delta_sq);
    }

    #[test]
    fn admissibility_disc23() {
        let r = ring(-23);
        let rep = check_admissible(r, &ints(r, &[1, 2])).unwrap();
        assert!(rep.admissible());
        assert!((rep.eps_sq() - 8.0 / 9.0).abs() < 1e-9, "{}", rep.eps_sq());
        let w = rep.eps_sq_hi().to_f64().unwrap() - rep.eps_sq_lo().to_f64().unwrap();
        assert!(w <= 1e-9, "enclosure width {}", w);
    }

    #[test]
    fn admissibility_disc23_singleton_fails() {
        let r = ring(-23);
        let rep = check_admissible(r, &ints(r, &[1])).unwrap();
        assert!(!rep.admissible());
        assert!(rep.eps_sq_hi().to_f64().unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn admissibility_disc12_needs_noninvertible_family() {
        let r = ring(-12);
        let rep = check_admissible(r, &ints(r, &[1, 2])).unwrap();
        assert!(rep.admissible());
        let expect = (6.0 - 2.0 * 5f64.sqrt()) / 3.0;
        assert!((rep.eps_sq() - expect).abs() < 1e-9, "{}", rep.eps_sq());
    }

    #[test]
    fn admissibility_small_unit_rows() {
        for (delta, expect) in [(-3i64, 1.0 / 3.0), (-4, 0.5)] {
            let r = ring(delta);
            let rep = check_admissible(r, &ints(r, &[1])).unwrap();
            assert!(rep.admissible());
            assert!((rep.eps_sq() - expect).abs() < 1e-9, "delta {}", delta);
        }
    }

    #[test]
    fn coverage_scan_brackets_the_critical_scale() {
        let r = ring(-23);
        let bs = ints(r, &[1, 2]);
        let eps = (8.0f64 / 9.0).sqrt();
        let mut gap_below = false;
        for ideal in enumerate_reduced_ideals_meeting(r, &bs).unwrap() {
            let inst = build_covering_instance(r, &bs, &ideal).unwrap();
            assert!(inst.sample_uncovered_point(eps + 1e-9, 0.002).is_none());
            assert!(inst.uncovered_intersection_point(eps + 1e-9).is_none());
            gap_below |= inst.uncovered_intersection_point(eps - 1e-3).is_some();
        }
        assert!(gap_below, "no family has a gap just below the critical scale");
    }

    #[test]
    fn generic_set_disc23() {
        let r = ring(-23);
        let set = generic_admissible_set(r, &Rational::new(2.into(), 3.into())).unwrap();
        assert!(set.iter().all(|e| !e.is_zero()));
        let max_norm = set.iter().map(|e| e.norm()).max().unwrap();
        assert_eq!(max_norm, BigInt::from(36));
        assert!(set.contains(&r.from_int(6)));
        assert!(!set.contains(&r.from_int(7)));
        assert!(set.contains(&r.el_tau()));
        assert!(generic_admissible_set(r, &Rational::one()).is_err());
    }

    #[test]
    fn tight_set_shaves_the_radius() {
        let r = ring(-23);
        let set = generic_admissible_set_tight(r).unwrap();
        let max_norm = set.iter().map(|e| e.norm()).max().unwrap();
        assert_eq!(max_norm, BigInt::from(27));
        let mu = max_norm.to_f64().unwrap().sqrt();
        assert!(mu < (4.0 * 23.0 / 3.0f64).sqrt());
    }

    #[test]
    fn tight_set_disc19_fallback() {
        let r = ring(-19);
        let set = generic_admissible_set_tight(r).unwrap();
        let mut expect = vec![r.one(), r.el_tau(), r.element(1, -1)];
        expect.sort_by_key(|e| e.canonical_key());
        assert_eq!(set, expect);
    }

    #[test]
    fn minimal_set_search() {
        let r = ring(-3);
        let params =
            find_minimal_admissible_set(r, &CandidateRule::IntegerPrefix { max_m: 4 })
                .unwrap();
        assert_eq!(params.b_set(), &ints(r, &[1])[..]);
        assert!((params.eps_sq().to_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(params.mu_sq(), &Rational::one());
        let bounded = find_minimal_admissible_set(
            ring(-23),
            &CandidateRule::IntegerPrefix { max_m: 1 },
        );
        assert!(matches!(bounded, Err(Error::SearchBoundExceeded { bound: 1 })));
    }

    #[test]
    fn svg_is_deterministic() {
        let r = ring(-23);
        let o = IdealLattice::one(r);
        let inst = build_covering_instance(r, &ints(r, &[1, 2]), &o).unwrap();
        let a = covering_svg(&inst, (8.0f64 / 9.0).sqrt(), &[(0.5, 0.4)]);
        let b = covering_svg(&inst, (8.0f64 / 9.0).sqrt(), &[(0.5, 0.4)]);
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml"));
        assert!(a.contains("<polygon"));
        assert!(a.matches("<circle").count() > inst.discs().len());
        let plain = covering_svg(&inst, 1.0, &[]);
        assert!(!plain.contains("#c0392b"));
    }
}
