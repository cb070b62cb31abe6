//! Convergent matrices and the integrality-coset solver behind the fast
//! coefficient search.
//!
//! A state matrix holds the last two convergents as columns,
//! `M = [[p, p_prev], [q, q_prev]]`. One expansion step right-multiplies by
//! `S(a/b', b/b') = [[a/b', 1], [b/b', 0]]`, which stays in the order exactly
//! when `b'` divides both `p*a + p_prev*b` and `q*a + q_prev*b`.

use super::ideal::IdealLattice;
use super::{RingElement, Ring};
use crate::numerics::Rational;
use crate::{Error, Result};
use num_bigint::BigInt;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    p: RingElement,
    p_prev: RingElement,
    q: RingElement,
    q_prev: RingElement,
}

impl IntMatrix2 {
    pub fn identity(ring: Ring) -> IntMatrix2 {
        IntMatrix2 {
            p: ring.one(),
            p_prev: ring.zero(),
            q: ring.zero(),
            q_prev: ring.one(),
        }
    }

    pub fn new(
        p: RingElement,
        p_prev: RingElement,
        q: RingElement,
        q_prev: RingElement,
    ) -> IntMatrix2 {
        assert_eq!(p.ring(), p_prev.ring());
        assert_eq!(p.ring(), q.ring());
        assert_eq!(p.ring(), q_prev.ring());
        IntMatrix2 { p, p_prev, q, q_prev }
    }

    pub fn ring(&self) -> Ring {
        self.p.ring()
    }

    pub fn p(&self) -> &RingElement {
        &self.p
    }

    pub fn p_prev(&self) -> &RingElement {
        &self.p_prev
    }

    pub fn q(&self) -> &RingElement {
        &self.q
    }

    pub fn q_prev(&self) -> &RingElement {
        &self.q_prev
    }

    pub fn det(&self) -> RingElement {
        self.p.clone() * self.q_prev.clone() - self.p_prev.clone() * self.q.clone()
    }

    /// Ideal generated by the entries of column 1 or 2.
    pub fn column_ideal(&self, i: usize) -> Result<IdealLattice> {
        let (top, bottom) = match i {
            1 => (&self.p, &self.q),
            2 => (&self.p_prev, &self.q_prev),
            _ => return Err(Error::Precondition(format!("column index {} out of range", i))),
        };
        if top.is_zero() && bottom.is_zero() {
            return Err(Error::ZeroColumn);
        }
        super::ideal::ideal_from_elements(self.ring(), &[top.clone(), bottom.clone()])
    }

    /// `M * S(a/b_prev, b/b_prev)`; errors when the division leaves the order.
    pub fn apply_step(
        &self,
        a: &RingElement,
        b: &RingElement,
        b_prev: &RingElement,
    ) -> Result<IntMatrix2> {
        let new_p = (self.p.clone() * a.clone() + self.p_prev.clone() * b.clone())
            .checked_div(b_prev);
        let new_q = (self.q.clone() * a.clone() + self.q_prev.clone() * b.clone())
            .checked_div(b_prev);
        match (new_p, new_q) {
            (Some(p), Some(q)) => Ok(IntMatrix2 {
                p,
                p_prev: self.p.clone(),
                q,
                q_prev: self.q.clone(),
            }),
            _ => Err(Error::Precondition(
                "step is not integral: b' does not divide the new column".into(),
            )),
        }
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.p, self.p_prev, self.q, self.q_prev
        )
    }
}

impl fmt::Debug for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Canonical representative of `e` modulo the principal lattice `(modulus)`,
/// reduced to the fundamental box of that lattice.
pub fn reduce_mod(e: &RingElement, modulus: &RingElement) -> RingElement {
    let ring = e.ring();
    let lat = IdealLattice::principal(ring, modulus).expect("nonzero modulus");
    reduce_mod_lattice(e, &lat)
}

/// Canonical representative of `e` modulo an integral lattice.
pub fn reduce_mod_lattice(e: &RingElement, lat: &IdealLattice) -> RingElement {
    let ring = e.ring();
    let [(e1x, e1y), (e2x, e2y)] = lat.basis_xy();
    let u = Rational::from_integer(e.x().clone());
    let v = Rational::from_integer(e.y().clone());
    // Solve (u, v) = alpha*e1 + beta*e2 over the rationals and drop floors.
    let beta = &v / &e2y;
    let alpha = (&u - &beta * &e2x) / &e1x;
    let fa = Rational::from_integer(alpha.floor().to_integer());
    let fb = Rational::from_integer(beta.floor().to_integer());
    let rx = &u - (&fa * &e1x + &fb * &e2x);
    let ry = &v - (&fa * &e1y + &fb * &e2y);
    debug_assert!(rx.is_integer() && ry.is_integer());
    ring.from_xy(rx.to_integer(), ry.to_integer())
}

/// The set of numerators `v` for which `M * S(v/b', b/b')` has entries in the
/// order, described as a shifted lattice `shift + L` with `L = b' * (M)_1^{-1}`,
/// or `None` when no such `v` exists (exactly when `b` lies outside `(M)_1`).
pub fn solve_integrality_coset(
    m: &IntMatrix2,
    b_prev: &RingElement,
    b: &RingElement,
) -> Result<Option<(RingElement, IdealLattice)>> {
    let ring = m.ring();
    if b.is_zero() || b_prev.is_zero() {
        return Err(Error::Precondition("denominators must be nonzero".into()));
    }
    let det = m.det();
    if det != b_prev.clone() && det != -b_prev.clone() {
        return Err(Error::Precondition("det M must equal the previous denominator up to sign".into()));
    }
    let col = m.column_ideal(1)?;
    if !col.is_reduced() {
        return Err(Error::Precondition("column ideal of M is not reduced".into()));
    }

    let o = IdealLattice::one(ring);
    let modulus = IdealLattice::principal(ring, b_prev)?;
    let reps = o.coset_reps_in(&modulus)?;
    let mut satisfying: Vec<RingElement> = Vec::new();
    for (u, v) in reps {
        let cand = ring.from_xy(u.to_integer(), v.to_integer());
        let top = m.p().clone() * cand.clone() + m.p_prev().clone() * b.clone();
        let bottom = m.q().clone() * cand.clone() + m.q_prev().clone() * b.clone();
        if top.checked_div(b_prev).is_some() && bottom.checked_div(b_prev).is_some() {
            satisfying.push(cand);
        }
    }
    if satisfying.is_empty() {
        debug_assert!(!col.contains_element(b));
        return Ok(None);
    }
    debug_assert!(col.contains_element(b));

    let lattice = col.inverse_lattice().mul_element(b_prev)?;
    // Representatives mod b'O of one coset mod the (coarser) lattice: all of
    // them must agree modulo the lattice.
    let first = satisfying[0].clone();
    debug_assert!(satisfying.iter().all(|s| {
        let d = s.clone() - first.clone();
        lattice.contains_element(&d)
    }));
    debug_assert_eq!(
        BigInt::from(satisfying.len()),
        col.norm().to_integer()
    );

    let shift = reduce_mod_lattice(&first, &lattice);
    Ok(Some((shift, lattice)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn ring23() -> Ring {
        Ring::from_discriminant(-23).unwrap()
    }

    /// The worked ten-step expansion matrices for z = -1.26 + 0.48i.
    fn table_matrices() -> Vec<IntMatrix2> {
        let r = ring23();
        let coeffs: [(i64, i64, i64, i64); 5] = [
            (-2, 0, 1, 0),
            (1, 0, 1, 0),
            (-1, 1, 1, 0),
            (0, 1, 2, 0),
            (1, 1, 2, 0),
        ];
        let mut b_prev = r.one();
        let mut m = IntMatrix2::identity(r);
        let mut out = vec![m.clone()];
        for (ax, ay, bx, by) in coeffs {
            let a = r.element(ax, ay);
            let b = r.element(bx, by);
            m = m.apply_step(&a, &b, &b_prev).unwrap();
            b_prev = b;
            out.push(m.clone());
        }
        out
    }

    #[test]
    fn recurrence_reproduces_worked_convergents() {
        let r = ring23();
        let ms = table_matrices();
        assert_eq!(ms[5].p(), &r.element(7, -1));
        assert_eq!(ms[5].q(), &r.element(-5, 0));
        assert_eq!(ms[5].p_prev(), &r.element(4, -2));
        assert_eq!(ms[5].q_prev(), &r.element(-4, 1));
        assert_eq!(ms[4].p(), &r.element(4, -2));
        assert_eq!(ms[4].q(), &r.element(-4, 1));
        assert_eq!(ms[3].p(), &r.element(-1, -1));
        assert_eq!(ms[3].q(), &r.element(0, 1));
    }

    #[test]
    fn determinant_alternates_with_denominator() {
        let r = ring23();
        let ms = table_matrices();
        let bs = [1i64, 1, 1, 1, 2, 2];
        for (n, m) in ms.iter().enumerate() {
            let expect = if n % 2 == 0 { bs[n] } else { -bs[n] };
            assert_eq!(m.det(), r.from_int(expect), "step {}", n);
        }
    }

    #[test]
    fn column_ideals() {
        let ms = table_matrices();
        let o = IdealLattice::one(ring23());
        assert_eq!(ms[3].column_ideal(1).unwrap(), o);
        let col4 = ms[4].column_ideal(1).unwrap();
        assert_eq!(col4.a0().to_i64().unwrap(), 2);
        assert_eq!(col4.b0().to_i64().unwrap(), 0);
        assert_eq!(col4.c0().to_i64().unwrap(), 1);
        assert!(col4.is_reduced());
        assert_eq!(ms[5].column_ideal(1).unwrap(), o);
    }

    #[test]
    fn non_integral_step_is_rejected() {
        let r = ring23();
        let ms = table_matrices();
        // From M4 with b' = 2, coefficient (a, b) = (1, 1) is not integral.
        let err = ms[4].apply_step(&r.one(), &r.one(), &r.from_int(2));
        assert!(err.is_err());
    }

    #[test]
    fn coset_solver_identity() {
        let r = ring23();
        let m = IntMatrix2::identity(r);
        let (shift, lat) = solve_integrality_coset(&m, &r.one(), &r.from_int(2))
            .unwrap()
            .unwrap();
        assert!(shift.is_zero());
        assert_eq!(lat, IdealLattice::one(r));
    }

    #[test]
    fn coset_solver_worked_example() {
        let r = ring23();
        let ms = table_matrices();
        // After stage five (b' = 2), taking b = 1 forces a == tau mod 2.
        let (shift, lat) = solve_integrality_coset(&ms[5], &r.from_int(2), &r.one())
            .unwrap()
            .unwrap();
        assert_eq!(shift, r.element(0, 1));
        let two = super::super::ideal::ideal_from_elements(r, &[r.from_int(2)]).unwrap();
        assert_eq!(lat, two);
        // After stage four, b = 1 admits no integral step at all.
        assert!(solve_integrality_coset(&ms[4], &r.from_int(2), &r.one())
            .unwrap()
            .is_none());
        // b = 2 there is allowed, with the full coset structure.
        let (shift, lat) = solve_integrality_coset(&ms[4], &r.from_int(2), &r.from_int(2))
            .unwrap()
            .unwrap();
        assert!(shift.is_zero());
        assert_eq!(lat.norm(), Rational::from_integer(2.into()));
        assert!(lat.contains_element(&r.element(1, 1)));
        assert!(!lat.contains_element(&r.one()));
    }

    #[test]
    fn coset_solver_checks_preconditions() {
        let r = ring23();
        let m = IntMatrix2::identity(r);
        assert!(solve_integrality_coset(&m, &r.from_int(2), &r.one()).is_err());
        assert!(solve_integrality_coset(&m, &r.zero(), &r.one()).is_err());
    }

    #[test]
    fn reduce_mod_box() {
        let r = ring23();
        let e = r.element(7, 5);
        let m = r.from_int(2);
        let red = reduce_mod(&e, &m);
        assert_eq!(red, r.element(1, 1));
        let diff = e - red;
        assert!(IdealLattice::principal(r, &m)
            .unwrap()
            .contains_element(&diff));
        assert_eq!(reduce_mod(&r.element(0, 1), &m), r.element(0, 1));
        assert_eq!(reduce_mod(&r.element(-1, -1), &m), r.element(1, 1));
    }
}
