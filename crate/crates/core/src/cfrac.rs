//! The expansion engine: candidate-coefficient search (fast coset path and
//! brute-force oracle), step application with invariant checks, pluggable
//! selection policies, termination detection, and rendering of the resulting
//! generalized continued fraction.
//!
//! A step multiplies the working matrix `M` on the right by
//! `S(a/b', b/b') = [[a/b', 1], [b/b', 0]]`, where `b'` is the previous
//! denominator (`det M = +-b'`). A coefficient `(a, b)` is acceptable when
//! `b` lies in the admissible set, `a` is an integer with
//! `|b z_{n-1} - a| <= eps |b'|`, the product matrix is integral, and its
//! left-column ideal is reduced. Admissibility of the parameter set
//! guarantees at least one acceptable coefficient at every step.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::covering::AdmissibleParams;
use crate::numerics::{
    BigFloat, ComplexValue, FloatComplex, QuadComplex, QuadReal, Rational,
};
use crate::ring::{solve_integrality_coset, IdealLattice, IntMatrix2, Ring, RingElement};
use crate::{Error, Result};

/// Default float-mode membership safety margin, as a power of two. The margin
/// is subtracted from `eps^2` when testing disc membership, so borderline
/// coefficients are dropped rather than accepted on rounding noise.
pub const DEFAULT_FLOAT_MARGIN_LOG2: i64 = -64;

/// One accepted step: denominator `b` from the admissible set and an integer
/// numerator `a` with `a/b` close to the current remainder.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coefficient {
    a: RingElement,
    b: RingElement,
}

impl Coefficient {
    pub fn new(a: RingElement, b: RingElement) -> Coefficient {
        assert_eq!(a.ring(), b.ring(), "mismatched rings");
        assert!(!b.is_zero(), "denominator must be nonzero");
        Coefficient { a, b }
    }

    pub fn a(&self) -> &RingElement {
        &self.a
    }

    pub fn b(&self) -> &RingElement {
        &self.b
    }
}

fn fraction_part(e: &RingElement) -> String {
    let s = format!("{}", e);
    if !e.x().is_zero() && !e.y().is_zero() {
        format!("({})", s)
    } else {
        s
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", fraction_part(&self.a), fraction_part(&self.b))
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// One completed step of a run: the coefficient, the new convergent, the
/// approximation quality `|q z - p|`, and the new remainder (`None` exactly
/// when the convergent hit `z` on the nose).
#[derive(Clone, Debug)]
pub struct TrailStep {
    coefficient: Coefficient,
    p: RingElement,
    q: RingElement,
    quality: f64,
    z_n: Option<ComplexValue>,
}

impl TrailStep {
    pub fn coefficient(&self) -> &Coefficient {
        &self.coefficient
    }

    pub fn p(&self) -> &RingElement {
        &self.p
    }

    pub fn q(&self) -> &RingElement {
        &self.q
    }

    pub fn quality(&self) -> f64 {
        self.quality
    }

    pub fn z_n(&self) -> Option<&ComplexValue> {
        self.z_n.as_ref()
    }
}

/// The full state after `n` steps. Immutable: applying a coefficient returns
/// a new state. Maintained invariants: `det M = +-b_prev`, the left-column
/// ideal of `M` is reduced, and `z_n` is the image of `z` under the Moebius
/// transformation of `M^{-1}` (equivalently the recurrence
/// `z_n = b_{n-1} / (b_n z_{n-1} - a_n)`).
#[derive(Clone, Debug)]
pub struct ExpansionState {
    ring: Ring,
    m: IntMatrix2,
    b_prev: RingElement,
    n: u32,
    z: ComplexValue,
    z_n: Option<ComplexValue>,
    trail: Vec<TrailStep>,
    margin_log2: i64,
}

impl ExpansionState {
    /// Fresh state: identity matrix, previous denominator 1, remainder `z`.
    pub fn new(ring: Ring, z: ComplexValue) -> Result<ExpansionState> {
        Self::with_margin(ring, z, DEFAULT_FLOAT_MARGIN_LOG2)
    }

    /// As [`ExpansionState::new`] with an explicit float-mode safety margin
    /// (`2^margin_log2`, subtracted from `eps^2` in disc-membership tests).
    pub fn with_margin(ring: Ring, z: ComplexValue, margin_log2: i64) -> Result<ExpansionState> {
        if let ComplexValue::Exact(q) = &z {
            if q.radicand() != ring.radicand() {
                return Err(Error::RadicandMismatch(q.radicand(), ring.radicand()));
            }
        }
        Ok(ExpansionState {
            ring,
            m: IntMatrix2::identity(ring),
            b_prev: ring.one(),
            n: 0,
            z_n: Some(z.clone()),
            z,
            trail: Vec::new(),
            margin_log2,
        })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn matrix(&self) -> &IntMatrix2 {
        &self.m
    }

    pub fn b_prev(&self) -> &RingElement {
        &self.b_prev
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn z(&self) -> &ComplexValue {
        &self.z
    }

    /// Current remainder `M^{-1}(z)`; `None` once a convergent equals `z`.
    pub fn z_n(&self) -> Option<&ComplexValue> {
        self.z_n.as_ref()
    }

    pub fn trail(&self) -> &[TrailStep] {
        &self.trail
    }

    /// Current convergent numerator and denominator (left column of `M`).
    pub fn convergent(&self) -> (&RingElement, &RingElement) {
        (self.m.p(), self.m.q())
    }
}

/// How `expand` picks among acceptable coefficients at each step.
#[derive(Clone)]
pub enum Policy {
    /// Minimize `|b z_{n-1} - a|` over all candidates; ties go to the smaller
    /// `|b|^2`, then to the lexicographically smaller `(x, y)` of `a`.
    GreedyQuality,
    /// First candidate in enumeration order: `b` by norm ascending, then `a`
    /// by distance to `b z_{n-1}` ascending.
    FirstFound,
    /// Predetermined coefficients, each validated before it is applied.
    Scripted(Vec<Coefficient>),
}

/// Result of a run: final state plus whether it stopped on an exact hit.
#[derive(Clone, Debug)]
pub struct Expansion {
    state: ExpansionState,
    terminated: bool,
}

impl Expansion {
    pub fn state(&self) -> &ExpansionState {
        &self.state
    }

    pub fn trail(&self) -> &[TrailStep] {
        self.state.trail()
    }

    /// True when the run stopped early because `p_n/q_n = z`.
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn convergent(&self) -> (&RingElement, &RingElement) {
        self.state.convergent()
    }
}

/// Exact or floating squared distance, ordered within a single mode.
enum DistKey {
    Exact(QuadReal),
    Float(BigFloat),
}

impl DistKey {
    fn cmp_key(&self, other: &DistKey) -> Ordering {
        match (self, other) {
            (DistKey::Exact(a), DistKey::Exact(b)) => {
                match (a.clone() - b.clone()).sign() {
                    s if s < 0 => Ordering::Less,
                    0 => Ordering::Equal,
                    _ => Ordering::Greater,
                }
            }
            (DistKey::Float(a), DistKey::Float(b)) => a.cmp_exact(b),
            _ => unreachable!("mixed exact/float distance keys"),
        }
    }
}

enum Membership {
    In,
    Ambiguous,
    Out,
}

/// Disc-membership test for one `(state, b)` pair: center `b z_{n-1}`,
/// squared radius `eps^2 |b'|^2`. Exact mode compares in the quadratic
/// tower; float mode brackets the limit with the safety margin.
enum Measure {
    Exact {
        center: QuadComplex,
        limit: QuadReal,
    },
    Float {
        center: FloatComplex,
        lo: BigFloat,
        hi: BigFloat,
    },
}

impl Measure {
    fn new(state: &ExpansionState, b: &RingElement, params: &AdmissibleParams) -> Measure {
        let z_n = state.z_n.as_ref().expect("live state");
        let nb_prev = Rational::from_integer(state.b_prev.norm());
        match z_n {
            ComplexValue::Exact(z) => {
                let center = b.to_quad_complex() * z.clone();
                let d = z.radicand();
                let limit = QuadReal::from_rational(d, params.eps_sq() * &nb_prev);
                Measure::Exact { center, limit }
            }
            ComplexValue::Float(z) => {
                let prec = z.precision();
                let center = b.to_quad_complex().to_float_complex(prec).mul(z);
                let margin = BigFloat::from_i64(1, prec).mul_pow2(state.margin_log2);
                let eps_sq = BigFloat::from_rational(params.eps_sq(), prec);
                let scale = BigFloat::from_rational(&nb_prev, prec);
                let lo = eps_sq.sub(&margin).mul(&scale);
                let hi = eps_sq.add(&margin).mul(&scale);
                Measure::Float { center, lo, hi }
            }
        }
    }

    fn center_f64(&self) -> (f64, f64) {
        match self {
            Measure::Exact { center, .. } => center.to_f64_pair(),
            Measure::Float { center, .. } => center.to_f64_pair(),
        }
    }

    fn radius_f64(&self) -> f64 {
        match self {
            Measure::Exact { limit, .. } => limit.to_f64().max(0.0).sqrt(),
            Measure::Float { hi, .. } => hi.to_f64().max(0.0).sqrt(),
        }
    }

    fn classify(&self, v: &RingElement) -> Membership {
        match self {
            Measure::Exact { center, limit } => {
                let diff = v.to_quad_complex() - center.clone();
                match (limit.clone() - diff.norm_sq()).sign() {
                    s if s >= 0 => Membership::In,
                    _ => Membership::Out,
                }
            }
            Measure::Float { center, lo, hi } => {
                let prec = center.precision();
                let diff = v.to_quad_complex().to_float_complex(prec).sub(center);
                let d2 = diff.norm_sq();
                if d2.cmp_exact(lo) != Ordering::Greater {
                    Membership::In
                } else if d2.cmp_exact(hi) != Ordering::Greater {
                    Membership::Ambiguous
                } else {
                    Membership::Out
                }
            }
        }
    }

    fn dist_key(&self, v: &RingElement) -> DistKey {
        match self {
            Measure::Exact { center, .. } => {
                let diff = v.to_quad_complex() - center.clone();
                DistKey::Exact(diff.norm_sq())
            }
            Measure::Float { center, .. } => {
                let prec = center.precision();
                let diff = v.to_quad_complex().to_float_complex(prec).sub(center);
                DistKey::Float(diff.norm_sq())
            }
        }
    }
}

/// Points of `shift + L` within `radius` of `center`, with slack: a float
/// prefilter over Cramer coefficient ranges followed by no exact test here —
/// callers classify each returned point exactly.
pub(crate) fn coset_points_near(
    ring: Ring,
    shift: &RingElement,
    lat: &IdealLattice,
    center: (f64, f64),
    radius: f64,
) -> Vec<RingElement> {
    let [(e1x, e1y), (e2x, e2y)] = lat.basis_xy();
    let f1 = ring.embed_xy_f64(&e1x, &e1y);
    let f2 = ring.embed_xy_f64(&e2x, &e2y);
    let area = (f1.0 * f2.1 - f1.1 * f2.0).abs();
    let shift_f = ring.embed_xy_f64(
        &Rational::from_integer(shift.x().clone()),
        &Rational::from_integer(shift.y().clone()),
    );
    let (cx, cy) = (center.0 - shift_f.0, center.1 - shift_f.1);
    let bound = radius + 1e-6;
    let a_hat = (cx * f2.1 - cy * f2.0) / (f1.0 * f2.1 - f1.1 * f2.0);
    let b_hat = (f1.0 * cy - f1.1 * cx) / (f1.0 * f2.1 - f1.1 * f2.0);
    let a_span = bound * f2.0.hypot(f2.1) / area + 1.0;
    let b_span = bound * f1.0.hypot(f1.1) / area + 1.0;
    let mut out = Vec::new();
    for i in (a_hat - a_span).floor() as i64..=(a_hat + a_span).ceil() as i64 {
        for j in (b_hat - b_span).floor() as i64..=(b_hat + b_span).ceil() as i64 {
            let px = shift_f.0 + i as f64 * f1.0 + j as f64 * f2.0;
            let py = shift_f.1 + i as f64 * f1.1 + j as f64 * f2.1;
            if (px - center.0).hypot(py - center.1) > bound + 1e-6 {
                continue;
            }
            let x = Rational::from_integer(shift.x().clone())
                + Rational::from_integer(BigInt::from(i)) * &e1x
                + Rational::from_integer(BigInt::from(j)) * &e2x;
            let y = Rational::from_integer(shift.y().clone())
                + Rational::from_integer(BigInt::from(i)) * &e1y
                + Rational::from_integer(BigInt::from(j)) * &e2y;
            debug_assert!(x.is_integer() && y.is_integer());
            out.push(ring.from_xy(x.to_integer(), y.to_integer()));
        }
    }
    out
}

/// `M S(v/b', b/b')` when it is integral, `None` otherwise.
fn stepped_matrix(state: &ExpansionState, v: &RingElement, b: &RingElement) -> Option<IntMatrix2> {
    state.m.apply_step(v, b, &state.b_prev).ok()
}

fn column_reduced(m: &IntMatrix2) -> Result<bool> {
    Ok(m.column_ideal(1)?.is_reduced())
}

struct CandRow {
    c: Coefficient,
    b_norm: BigInt,
    dist: DistKey,
}

fn enumeration_cmp(a: &CandRow, b: &CandRow) -> Ordering {
    a.b_norm
        .cmp(&b.b_norm)
        .then_with(|| a.c.b().x().cmp(b.c.b().x()))
        .then_with(|| a.c.b().y().cmp(b.c.b().y()))
        .then_with(|| a.dist.cmp_key(&b.dist))
        .then_with(|| a.c.a().x().cmp(b.c.a().x()))
        .then_with(|| a.c.a().y().cmp(b.c.a().y()))
}

fn greedy_cmp(a: &CandRow, b: &CandRow) -> Ordering {
    a.dist
        .cmp_key(&b.dist)
        .then_with(|| a.b_norm.cmp(&b.b_norm))
        .then_with(|| a.c.a().x().cmp(b.c.a().x()))
        .then_with(|| a.c.a().y().cmp(b.c.a().y()))
}

fn sorted_b_set(params: &AdmissibleParams) -> Vec<RingElement> {
    let mut bs: Vec<RingElement> = params.b_set().to_vec();
    bs.sort_by(|a, b| {
        a.norm()
            .cmp(&b.norm())
            .then_with(|| a.x().cmp(b.x()))
            .then_with(|| a.y().cmp(b.y()))
    });
    bs
}

fn check_live(state: &ExpansionState, params: &AdmissibleParams) -> Result<()> {
    let pring = params.b_set()[0].ring();
    if pring != state.ring {
        return Err(Error::RingMismatch(
            state.ring.discriminant(),
            pring.discriminant(),
        ));
    }
    if state.z_n.is_none() {
        return Err(Error::Precondition(
            "expansion already terminated: the convergent equals z".into(),
        ));
    }
    Ok(())
}

fn finish_candidates(
    state: &ExpansionState,
    mut rows: Vec<CandRow>,
    any_ambiguous: bool,
) -> Result<Vec<Coefficient>> {
    if rows.is_empty() && any_ambiguous {
        return Err(Error::PrecisionExhausted {
            step: state.n as usize + 1,
            detail: "every acceptable coefficient lies within the safety margin of a disc boundary"
                .into(),
        });
    }
    rows.sort_by(enumeration_cmp);
    Ok(rows.into_iter().map(|r| r.c).collect())
}

/// All acceptable coefficients at the current step, via the integrality
/// coset: for each `b` in the set, either no integer numerator works (`b`
/// outside the left-column ideal) or the numerators form a shifted lattice,
/// of which at most four land in the search disc; those are then filtered by
/// reducedness of the new left-column ideal.
///
/// Ordered by `b`-norm ascending, then distance to `b z_{n-1}` ascending.
/// Float mode drops candidates within the safety margin of the disc boundary
/// and reports precision exhaustion when only such candidates exist.
pub fn candidate_coefficients(
    state: &ExpansionState,
    params: &AdmissibleParams,
) -> Result<Vec<Coefficient>> {
    check_live(state, params)?;
    let mut rows: Vec<CandRow> = Vec::new();
    let mut any_ambiguous = false;
    for b in sorted_b_set(params) {
        let Some((shift, lat)) = solve_integrality_coset(&state.m, &state.b_prev, &b)? else {
            continue;
        };
        let measure = Measure::new(state, &b, params);
        let pts = coset_points_near(
            state.ring,
            &shift,
            &lat,
            measure.center_f64(),
            measure.radius_f64(),
        );
        let mut in_disc = 0usize;
        for v in pts {
            match measure.classify(&v) {
                Membership::Out => {}
                Membership::Ambiguous => {
                    if let Some(m2) = stepped_matrix(state, &v, &b) {
                        if column_reduced(&m2)? {
                            any_ambiguous = true;
                        }
                    }
                }
                Membership::In => {
                    in_disc += 1;
                    let m2 = stepped_matrix(state, &v, &b)
                        .expect("integrality coset must divide");
                    if column_reduced(&m2)? {
                        let dist = measure.dist_key(&v);
                        rows.push(CandRow {
                            b_norm: b.norm(),
                            c: Coefficient::new(v, b.clone()),
                            dist,
                        });
                    }
                }
            }
        }
        debug_assert!(!state.z.is_exact() || in_disc <= 4);
    }
    finish_candidates(state, rows, any_ambiguous)
}

/// Same set as [`candidate_coefficients`], computed the slow way: enumerate
/// every integer in the search disc and test integrality of the product
/// matrix by explicit division. Exists as an independent oracle for the
/// coset path.
pub fn candidate_coefficients_bruteforce(
    state: &ExpansionState,
    params: &AdmissibleParams,
) -> Result<Vec<Coefficient>> {
    check_live(state, params)?;
    let order = IdealLattice::one(state.ring);
    let origin = state.ring.zero();
    let mut rows: Vec<CandRow> = Vec::new();
    let mut any_ambiguous = false;
    for b in sorted_b_set(params) {
        let measure = Measure::new(state, &b, params);
        let pts = coset_points_near(
            state.ring,
            &origin,
            &order,
            measure.center_f64(),
            measure.radius_f64(),
        );
        let mut integral_in_disc = 0usize;
        for v in pts {
            match measure.classify(&v) {
                Membership::Out => {}
                Membership::Ambiguous => {
                    if let Some(m2) = stepped_matrix(state, &v, &b) {
                        if column_reduced(&m2)? {
                            any_ambiguous = true;
                        }
                    }
                }
                Membership::In => {
                    let Some(m2) = stepped_matrix(state, &v, &b) else {
                        continue;
                    };
                    integral_in_disc += 1;
                    if column_reduced(&m2)? {
                        let dist = measure.dist_key(&v);
                        rows.push(CandRow {
                            b_norm: b.norm(),
                            c: Coefficient::new(v, b.clone()),
                            dist,
                        });
                    }
                }
            }
        }
        debug_assert!(!state.z.is_exact() || integral_in_disc <= 4);
    }
    finish_candidates(state, rows, any_ambiguous)
}

fn embed_exact(e: &RingElement) -> QuadComplex {
    e.to_quad_complex()
}

fn next_remainder(state: &ExpansionState, c: &Coefficient) -> Option<ComplexValue> {
    match state.z_n.as_ref().expect("live state") {
        ComplexValue::Exact(z) => {
            let denom = embed_exact(&c.b) * z.clone() - embed_exact(&c.a);
            if denom.is_zero() {
                None
            } else {
                Some(ComplexValue::Exact(
                    embed_exact(&state.b_prev) / denom,
                ))
            }
        }
        ComplexValue::Float(z) => {
            let prec = z.precision();
            let denom = embed_exact(&c.b)
                .to_float_complex(prec)
                .mul(z)
                .sub(&embed_exact(&c.a).to_float_complex(prec));
            if denom.is_zero() {
                None
            } else {
                Some(ComplexValue::Float(
                    embed_exact(&state.b_prev).to_float_complex(prec).div(&denom),
                ))
            }
        }
    }
}

fn quality_of(z: &ComplexValue, p: &RingElement, q: &RingElement) -> f64 {
    match z {
        ComplexValue::Exact(zq) => {
            let err = embed_exact(q) * zq.clone() - embed_exact(p);
            err.norm_sq().to_f64().max(0.0).sqrt()
        }
        ComplexValue::Float(zf) => {
            let prec = zf.precision();
            let err = embed_exact(q)
                .to_float_complex(prec)
                .mul(zf)
                .sub(&embed_exact(p).to_float_complex(prec));
            err.norm_sq().to_f64().max(0.0).sqrt()
        }
    }
}

/// Exact-mode cross-check of the remainder against the matrix: `z_n` is the
/// Moebius image of `z` under the adjugate, `z_n (p_n - q_n z) = q_{n-1} z -
/// p_{n-1}` (the determinant scalar cancels in the Moebius action).
fn remainder_consistent(z: &QuadComplex, z_n: &QuadComplex, m: &IntMatrix2) -> bool {
    let p = embed_exact(m.p());
    let q = embed_exact(m.q());
    let p_prev = embed_exact(m.p_prev());
    let q_prev = embed_exact(m.q_prev());
    z_n.clone() * (p - q * z.clone()) == q_prev * z.clone() - p_prev
}

/// Apply one coefficient: multiply in `S(a/b', b/b')`, recompute the
/// remainder by the recurrence, append to the trail. The determinant and
/// left-column-reducedness invariants are enforced; a vanishing recurrence
/// denominator means the new convergent equals `z` and leaves the remainder
/// empty rather than failing.
pub fn apply_coefficient(state: &ExpansionState, c: &Coefficient) -> Result<ExpansionState> {
    if state.z_n.is_none() {
        return Err(Error::Precondition(
            "expansion already terminated: the convergent equals z".into(),
        ));
    }
    if c.a.ring() != state.ring {
        return Err(Error::RingMismatch(
            state.ring.discriminant(),
            c.a.ring().discriminant(),
        ));
    }
    let m2 = state.m.apply_step(&c.a, &c.b, &state.b_prev)?;
    let det = m2.det();
    assert!(
        det == c.b || det == -c.b.clone(),
        "determinant invariant broken"
    );
    if !column_reduced(&m2)? {
        return Err(Error::Precondition(
            "column ideal of the stepped matrix is not reduced".into(),
        ));
    }
    let z_next = next_remainder(state, c);
    if let (Some(ComplexValue::Exact(zn)), ComplexValue::Exact(z)) = (&z_next, &state.z) {
        debug_assert!(remainder_consistent(z, zn, &m2));
    }
    let n = state.n + 1;
    let quality = quality_of(&state.z, m2.p(), m2.q());
    let mut trail = state.trail.clone();
    trail.push(TrailStep {
        coefficient: c.clone(),
        p: m2.p().clone(),
        q: m2.q().clone(),
        quality,
        z_n: z_next.clone(),
    });
    Ok(ExpansionState {
        ring: state.ring,
        m: m2,
        b_prev: c.b.clone(),
        n,
        z: state.z.clone(),
        z_n: z_next,
        trail,
        margin_log2: state.margin_log2,
    })
}

/// True iff the current convergent equals `z` exactly. Always false in float
/// mode, where termination is by step count only.
pub fn check_termination(state: &ExpansionState) -> bool {
    match &state.z {
        ComplexValue::Exact(z) => {
            embed_exact(state.m.q()) * z.clone() == embed_exact(state.m.p())
        }
        ComplexValue::Float(_) => false,
    }
}

fn validate_scripted(
    state: &ExpansionState,
    params: &AdmissibleParams,
    c: &Coefficient,
    index: usize,
) -> Result<()> {
    let reject = |reason: &str| Error::InvalidScript {
        index,
        reason: reason.into(),
    };
    if !params.b_set().contains(&c.b) {
        return Err(reject("denominator is not in the admissible set"));
    }
    let measure = Measure::new(state, &c.b, params);
    match measure.classify(&c.a) {
        Membership::In => {}
        Membership::Ambiguous => {
            return Err(reject(
                "numerator lies within the float safety margin of the disc boundary",
            ))
        }
        Membership::Out => return Err(reject("numerator lies outside the search disc")),
    }
    let Some(m2) = stepped_matrix(state, &c.a, &c.b) else {
        return Err(reject("stepped matrix is not integral"));
    };
    if !column_reduced(&m2)? {
        return Err(reject("column ideal of the stepped matrix is not reduced"));
    }
    Ok(())
}

fn dist_row(state: &ExpansionState, params: &AdmissibleParams, c: &Coefficient) -> CandRow {
    let measure = Measure::new(state, &c.b, params);
    CandRow {
        b_norm: c.b.norm(),
        dist: measure.dist_key(&c.a),
        c: c.clone(),
    }
}

/// Run the expansion for up to `steps` steps (fewer when a scripted policy
/// runs out of entries or a convergent hits `z` exactly).
pub fn expand(
    z: ComplexValue,
    steps: u32,
    params: &AdmissibleParams,
    policy: &Policy,
) -> Result<Expansion> {
    expand_with_margin(z, steps, params, policy, DEFAULT_FLOAT_MARGIN_LOG2)
}

/// As [`expand`] with an explicit float-mode safety margin.
pub fn expand_with_margin(
    z: ComplexValue,
    steps: u32,
    params: &AdmissibleParams,
    policy: &Policy,
    margin_log2: i64,
) -> Result<Expansion> {
    if steps == 0 {
        return Err(Error::Precondition("step count must be at least 1".into()));
    }
    let ring = params.b_set()[0].ring();
    let mut state = ExpansionState::with_margin(ring, z, margin_log2)?;
    let mut terminated = false;
    for k in 1..=steps {
        let c = match policy {
            Policy::Scripted(script) => {
                let Some(c) = script.get(k as usize - 1) else {
                    break;
                };
                validate_scripted(&state, params, c, k as usize - 1)?;
                c.clone()
            }
            Policy::FirstFound => {
                let cands = candidate_coefficients(&state, params)?;
                cands.into_iter().next().ok_or_else(|| {
                    Error::Precondition(
                        "no acceptable coefficient: parameters are not admissible for this state"
                            .into(),
                    )
                })?
            }
            Policy::GreedyQuality => {
                let cands = candidate_coefficients(&state, params)?;
                if cands.is_empty() {
                    return Err(Error::Precondition(
                        "no acceptable coefficient: parameters are not admissible for this state"
                            .into(),
                    ));
                }
                let mut rows: Vec<CandRow> = cands
                    .iter()
                    .map(|c| dist_row(&state, params, c))
                    .collect();
                rows.sort_by(greedy_cmp);
                rows.remove(0).c
            }
        };
        state = apply_coefficient(&state, &c)?;
        if state.z_n.is_none() || check_termination(&state) {
            terminated = true;
            break;
        }
    }
    Ok(Expansion { state, terminated })
}

/// ASCII rendering of the generalized continued fraction
/// `p_n/q_n = a_1/b_1 + (b_0/b_1)/(a_2/b_2 + (b_1/b_2)/(...))`
/// with `b_0 = 1`.
pub fn render_cf(expansion: &Expansion) -> String {
    let trail = expansion.trail();
    assert!(!trail.is_empty(), "nothing to render before the first step");
    let ring = expansion.state().ring();
    let mut denoms: Vec<RingElement> = vec![ring.one()];
    denoms.extend(trail.iter().map(|s| s.coefficient().b().clone()));
    let n = trail.len();
    let mut acc = format!("{}", trail[n - 1].coefficient());
    for k in (0..n - 1).rev() {
        acc = format!(
            "{} + ({}/{})/({})",
            trail[k].coefficient(),
            fraction_part(&denoms[k]),
            fraction_part(&denoms[k + 1]),
            acc
        );
    }
    acc
}

/// Evaluate the rendered fraction bottom-up, exactly. Exact-mode runs only;
/// the result equals `p_n/q_n`.
pub fn evaluate_cf(expansion: &Expansion) -> Result<QuadComplex> {
    if !expansion.state().z().is_exact() {
        return Err(Error::Precondition(
            "exact evaluation requires an exact-mode run".into(),
        ));
    }
    let trail = expansion.trail();
    if trail.is_empty() {
        return Err(Error::Precondition("nothing to evaluate before the first step".into()));
    }
    let ring = expansion.state().ring();
    let mut denoms: Vec<RingElement> = vec![ring.one()];
    denoms.extend(trail.iter().map(|s| s.coefficient().b().clone()));
    let frac = |c: &Coefficient| -> Result<QuadComplex> {
        let b = embed_exact(c.b());
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(embed_exact(c.a()) / b)
    };
    let n = trail.len();
    let mut acc = frac(trail[n - 1].coefficient())?;
    for k in (0..n - 1).rev() {
        if acc.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ratio = embed_exact(&denoms[k]) / embed_exact(&denoms[k + 1]);
        acc = frac(trail[k].coefficient())? + ratio / acc;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_complex;
    use num_traits::ToPrimitive;

    fn ring23() -> Ring {
        Ring::from_discriminant(-23).unwrap()
    }

    fn params23() -> AdmissibleParams {
        let r = ring23();
        AdmissibleParams::new(vec![r.from_int(1), r.from_int(2)], crate::numerics::ratio(8, 9))
    }

    fn z_table() -> ComplexValue {
        ComplexValue::Exact(parse_complex("-1.26+0.48i", 23).unwrap())
    }

    /// A known-good ten-step coefficient script for z = -1.26 + 0.48i.
    fn table_script() -> Vec<Coefficient> {
        let r = ring23();
        [
            ((-2, 0), 1),
            ((1, 0), 1),
            ((-1, 1), 1),
            ((0, 1), 2),
            ((1, 1), 2),
            ((2, 0), 2),
            ((2, -1), 2),
            ((1, 1), 1),
            ((-2, 2), 1),
            ((1, 0), 1),
        ]
        .iter()
        .map(|&((x, y), b)| Coefficient::new(r.element(x, y), r.from_int(b)))
        .collect()
    }

    fn run_script(n: u32) -> Expansion {
        expand(z_table(), n, &params23(), &Policy::Scripted(table_script())).unwrap()
    }

    #[test]
    fn scripted_run_replays_reference_expansion() {
        let exp = run_script(10);
        assert!(!exp.terminated());
        let r = ring23();
        let expected: [((i64, i64), (i64, i64)); 10] = [
            ((-2, 0), (1, 0)),
            ((-1, 0), (1, 0)),
            ((-1, -1), (0, 1)),
            ((4, -2), (-4, 1)),
            ((7, -1), (-5, 0)),
            ((11, -3), (-9, 1)),
            ((9, -8), (-11, 5)),
            ((34, -5), (-25, 0)),
            ((1, 60), (39, -45)),
            ((35, 55), (14, -45)),
        ];
        let qualities = [
            0.882, 0.5459, 0.4754, 0.2757, 0.2, 0.1096, 0.0451, 0.0104, 0.0085, 0.0061,
        ];
        for (k, step) in exp.trail().iter().enumerate() {
            let ((px, py), (qx, qy)) = expected[k];
            assert_eq!(step.p(), &r.element(px, py), "p at step {}", k + 1);
            assert_eq!(step.q(), &r.element(qx, qy), "q at step {}", k + 1);
            let printed = qualities[k];
            let decimals = format!("{}", printed).split('.').nth(1).unwrap().len() as i32;
            let tol = 0.5 * 10f64.powi(-decimals);
            assert!(
                (step.quality() - printed).abs() <= tol,
                "quality at step {}: {} vs {}",
                k + 1,
                step.quality(),
                printed
            );
        }
        assert_eq!(exp.trail()[8].q().norm(), BigInt::from(11916));
        assert_eq!(exp.trail()[9].q().norm(), BigInt::from(11716));
    }

    #[test]
    fn candidates_after_three_steps_include_the_reference_choice() {
        let exp = run_script(3);
        let r = ring23();
        let cands = candidate_coefficients(exp.state(), &params23()).unwrap();
        let want = Coefficient::new(r.element(0, 1), r.from_int(2));
        assert!(cands.contains(&want), "candidates: {:?}", cands);
        let (zx, zy) = exp.state().z_n().unwrap().to_f64_pair();
        assert!((zx - 0.49).abs() < 0.01 && (zy - 1.04).abs() < 0.01);
    }

    #[test]
    fn candidates_at_zero_contain_the_zero_coefficient() {
        let r = ring23();
        let state =
            ExpansionState::new(r, ComplexValue::Exact(QuadComplex::zero(23))).unwrap();
        let cands = candidate_coefficients(&state, &params23()).unwrap();
        let want = Coefficient::new(r.element(0, 0), r.from_int(1));
        assert!(cands.contains(&want));
    }

    #[test]
    fn root_candidates_for_disc11_singleton_set() {
        let r = Ring::from_discriminant(-11).unwrap();
        let params =
            AdmissibleParams::new(vec![r.from_int(1)], crate::numerics::ratio(9, 11));
        let z = ComplexValue::Exact(parse_complex("3/4+5/4i", 11).unwrap());
        let state = ExpansionState::new(r, z).unwrap();
        let cands = candidate_coefficients(&state, &params).unwrap();
        let mut got: Vec<(i64, i64)> = cands
            .iter()
            .map(|c| {
                (
                    c.a().x().to_i64().unwrap(),
                    c.a().y().to_i64().unwrap(),
                )
            })
            .collect();
        got.sort_unstable();
        assert_eq!(got, vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn oracle_agrees_along_the_reference_run() {
        let params = params23();
        let mut state = ExpansionState::new(ring23(), z_table()).unwrap();
        for c in table_script().iter().take(6) {
            let fast = candidate_coefficients(&state, &params).unwrap();
            let slow = candidate_coefficients_bruteforce(&state, &params).unwrap();
            assert_eq!(fast, slow);
            assert!(fast.contains(c));
            state = apply_coefficient(&state, c).unwrap();
        }
    }

    #[test]
    fn apply_matches_reference_matrices() {
        let r = ring23();
        let state = ExpansionState::new(r, z_table()).unwrap();
        let first = apply_coefficient(
            &state,
            &Coefficient::new(r.element(-2, 0), r.from_int(1)),
        )
        .unwrap();
        assert_eq!(first.convergent(), (&r.element(-2, 0), &r.element(1, 0)));

        let exp = run_script(4);
        let m4 = exp.state().matrix();
        assert_eq!(m4.p(), &r.element(4, -2));
        assert_eq!(m4.q(), &r.element(-4, 1));
        assert_eq!(m4.p_prev(), &r.element(-1, -1));
        assert_eq!(m4.q_prev(), &r.element(0, 1));

        // Recurrence cross-check at step five: p5 = (a5 p4 + b5 p3) / b4.
        let exp5 = run_script(5);
        let a5 = r.element(1, 1);
        let b5 = r.from_int(2);
        let num = a5 * r.element(4, -2) + b5 * r.element(-1, -1);
        let p5 = num.checked_div(&r.from_int(2)).unwrap();
        assert_eq!(&p5, exp5.trail()[4].p());
        assert_eq!(p5, r.element(7, -1));
    }

    #[test]
    fn integer_input_terminates_at_step_one() {
        let r = ring23();
        let z = ComplexValue::Exact(r.element(1, 1).to_quad_complex());
        let exp = expand(z, 5, &params23(), &Policy::GreedyQuality).unwrap();
        assert!(exp.terminated());
        assert_eq!(exp.trail().len(), 1);
        assert_eq!(exp.convergent(), (&r.element(1, 1), &r.from_int(1)));
    }

    #[test]
    fn zero_terminates_immediately() {
        let z = ComplexValue::Exact(QuadComplex::zero(23));
        let exp = expand(z, 3, &params23(), &Policy::FirstFound).unwrap();
        assert!(exp.terminated());
        assert_eq!(exp.trail().len(), 1);
        let (p, q) = exp.convergent();
        assert!(p.is_zero() && q.is_one());
    }

    #[test]
    fn rational_input_terminates_within_the_log_bound() {
        // |q| = 2 and eps^2 = 8/9 give the step bound 1 - log(2)/log(eps).
        let z = ComplexValue::Exact(parse_complex("1/2+0i", 23).unwrap());
        let exp = expand(z, 12, &params23(), &Policy::GreedyQuality).unwrap();
        assert!(exp.terminated(), "no exact hit within 12 steps");
        let (p, q) = exp.convergent();
        let zq = parse_complex("1/2+0i", 23).unwrap();
        assert_eq!(p.to_quad_complex(), zq * q.to_quad_complex());
    }

    #[test]
    fn irrational_exact_input_never_reports_termination() {
        let r = Ring::from_discriminant(-11).unwrap();
        let params =
            AdmissibleParams::new(vec![r.from_int(1)], crate::numerics::ratio(9, 11));
        let z = ComplexValue::Exact(parse_complex("3/4+5/4i", 11).unwrap());
        let exp = expand(z, 15, &params, &Policy::GreedyQuality).unwrap();
        assert!(!exp.terminated());
        assert_eq!(exp.trail().len(), 15);
    }

    #[test]
    fn greedy_qualities_contract_by_eps_each_step() {
        let exp = expand(z_table(), 12, &params23(), &Policy::GreedyQuality).unwrap();
        let eps = (8f64 / 9.0).sqrt();
        let mut prev = 1.0;
        for step in exp.trail() {
            assert!(step.quality() <= eps * prev + 1e-9);
            prev = step.quality();
        }
    }

    #[test]
    fn remainders_stay_outside_the_unit_disc_by_eps() {
        let exp = expand(z_table(), 12, &params23(), &Policy::FirstFound).unwrap();
        let min_abs = (9f64 / 8.0).sqrt();
        for step in exp.trail() {
            let z_n = step.z_n().unwrap();
            assert!(z_n.norm_sq_f64().sqrt() >= min_abs - 1e-9);
        }
    }

    #[test]
    fn scripted_validation_reports_the_failing_index() {
        let r = ring23();
        let mut script = table_script();
        script[2] = Coefficient::new(r.element(40, 0), r.from_int(1));
        let err = expand(z_table(), 10, &params23(), &Policy::Scripted(script)).unwrap_err();
        match err {
            Error::InvalidScript { index, .. } => assert_eq!(index, 2),
            other => panic!("unexpected error {:?}", other),
        }
        let mut script = table_script();
        script[0] = Coefficient::new(r.element(-2, 0), r.from_int(3));
        let err = expand(z_table(), 10, &params23(), &Policy::Scripted(script)).unwrap_err();
        match err {
            Error::InvalidScript { index, .. } => assert_eq!(index, 0),
            other => panic!("unexpected error {:?}", other),
        }
    }

    #[test]
    fn render_and_evaluate_round_trip() {
        let exp1 = run_script(1);
        assert_eq!(render_cf(&exp1), "-2/1");

        let exp2 = run_script(2);
        assert_eq!(render_cf(&exp2), "-2/1 + (1/1)/(1/1)");
        let val = evaluate_cf(&exp2).unwrap();
        let r = ring23();
        let (p, q) = exp2.convergent();
        assert_eq!(
            val,
            p.to_quad_complex() / q.to_quad_complex(),
            "rendered value differs from the convergent"
        );
        assert_eq!(val, r.element(-1, 0).to_quad_complex());

        for n in [3u32, 5, 8, 10] {
            let exp = run_script(n);
            let (p, q) = exp.convergent();
            assert_eq!(
                evaluate_cf(&exp).unwrap(),
                p.to_quad_complex() / q.to_quad_complex(),
                "mismatch at depth {}",
                n
            );
        }
    }

    #[test]
    fn float_mode_tracks_the_exact_run() {
        let zf = ComplexValue::Float(FloatComplex::from_f64_pair(-1.26, 0.48, 128));
        let exp = expand(zf, 10, &params23(), &Policy::GreedyQuality).unwrap();
        assert!(!exp.terminated());
        assert_eq!(exp.trail().len(), 10);
        let eps = (8f64 / 9.0).sqrt();
        let mut prev = 1.0;
        for step in exp.trail() {
            assert!(step.quality() <= eps * prev + 1e-9);
            prev = step.quality();
        }
    }

    #[test]
    fn absurd_margin_exhausts_precision() {
        let zf = ComplexValue::Float(FloatComplex::from_f64_pair(0.5, 0.0, 64));
        let err = expand_with_margin(zf, 3, &params23(), &Policy::GreedyQuality, 0).unwrap_err();
        match err {
            Error::PrecisionExhausted { step, .. } => assert_eq!(step, 1),
            other => panic!("unexpected error {:?}", other),
        }
    }
}
