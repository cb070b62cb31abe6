//! Critical-scale computation for one disc pair.
//!
//! Points are split Cartesian coordinates `(x, s)` meaning `x + s*sqrt(d)*i`
//! with `x, s` rational, so every squared distance is rational. At a rational
//! squared scale the two boundary-intersection points of a disc pair have
//! coordinates in `Q + Q*sqrt(G*d)` for rational `G >= 0`, which makes the
//! point-in-open-disc test exactly decidable by sign analysis and squaring.
//! The search runs on f64 with a conservative ambiguity margin and falls back
//! to the exact test only near tangency.

use crate::numerics::Rational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Margin below which an f64 comparison defers to exact arithmetic.
const AMBIGUOUS: f64 = 1e-9;
/// Width target for the squared-scale enclosure.
const TARGET_WIDTH: f64 = 1e-13;
/// Samples in the initial scan of the intersection window.
const GRID: usize = 256;

#[derive(Clone, Debug)]
pub(crate) struct DiscGeom {
    /// Center x coordinate.
    pub cx: Rational,
    /// Center y coordinate divided by sqrt(d).
    pub cs: Rational,
    pub r_sq: Rational,
    pub fx: f64,
    pub fy: f64,
    pub fr: f64,
}

impl DiscGeom {
    pub fn new(cx: Rational, cs: Rational, r_sq: Rational, sqrt_d: f64) -> DiscGeom {
        let fx = cx.to_f64().unwrap();
        let fy = cs.to_f64().unwrap() * sqrt_d;
        let fr = r_sq.to_f64().unwrap().sqrt();
        DiscGeom { cx, cs, r_sq, fx, fy, fr }
    }

    pub fn same_geometry(&self, other: &DiscGeom) -> bool {
        self.cx == other.cx && self.cs == other.cs && self.r_sq == other.r_sq
    }
}

/// Enclosure of the critical squared scale of one disc pair.
#[derive(Clone, Debug)]
pub struct PairScale {
    delta_sq_lo: Rational,
    delta_sq_hi: Rational,
}

impl PairScale {
    fn new(delta_sq_lo: Rational, delta_sq_hi: Rational) -> PairScale {
        PairScale { delta_sq_lo, delta_sq_hi }
    }

    fn zero() -> PairScale {
        PairScale::new(Rational::zero(), Rational::zero())
    }

    pub fn delta_sq_lo(&self) -> &Rational {
        &self.delta_sq_lo
    }

    pub fn delta_sq_hi(&self) -> &Rational {
        &self.delta_sq_hi
    }

    pub fn delta(&self) -> f64 {
        let mid = (self.delta_sq_lo.to_f64().unwrap() + self.delta_sq_hi.to_f64().unwrap()) / 2.0;
        mid.sqrt()
    }
}

/// Decides `k*sqrt(c) < r` exactly for rational `k, r` and rational `c >= 0`.
fn sqrt_term_lt(k: &Rational, c: &Rational, r: &Rational) -> bool {
    debug_assert!(!c.is_negative());
    if k.is_positive() {
        !r.is_negative() && !r.is_zero() && k * k * c < r * r
    } else {
        r.is_positive() || k * k * c > r * r
    }
}

pub(crate) struct PairContext<'a> {
    c1: &'a DiscGeom,
    coverers: &'a [DiscGeom],
    d_rad: Rational,
    dx: Rational,
    ds: Rational,
    d_sq: Rational,
    r1_sq: Rational,
    r2_sq: Rational,
    fdx: f64,
    fdy: f64,
    d_sq_f: f64,
    r1_sq_f: f64,
    r2_sq_f: f64,
}

impl<'a> PairContext<'a> {
    fn new(
        c1: &'a DiscGeom,
        c2: &'a DiscGeom,
        coverers: &'a [DiscGeom],
        d_rad: &Rational,
    ) -> PairContext<'a> {
        let dx = &c2.cx - &c1.cx;
        let ds = &c2.cs - &c1.cs;
        let d_sq = &dx * &dx + d_rad * &ds * &ds;
        PairContext {
            c1,
            coverers,
            d_rad: d_rad.clone(),
            d_sq: d_sq.clone(),
            r1_sq: c1.r_sq.clone(),
            r2_sq: c2.r_sq.clone(),
            fdx: c2.fx - c1.fx,
            fdy: c2.fy - c1.fy,
            d_sq_f: d_sq.to_f64().unwrap(),
            r1_sq_f: c1.r_sq.to_f64().unwrap(),
            r2_sq_f: c2.r_sq.to_f64().unwrap(),
            dx,
            ds,
        }
    }

    fn alpha_g_exact(&self, s: &Rational) -> (Rational, Rational) {
        let two = Rational::from_integer(2.into());
        let alpha = (&self.d_sq + s * (&self.r1_sq - &self.r2_sq)) / (&two * &self.d_sq);
        let g = s * &self.r1_sq / &self.d_sq - &alpha * &alpha;
        (alpha, g)
    }

    /// Is the sign-`sigma` boundary-intersection point inside some open disc?
    fn point_covered(
        &self,
        s: &Rational,
        s_f: f64,
        sigma: i32,
        alpha_f: f64,
        g_f: f64,
        exact: &mut Option<(Rational, Rational)>,
    ) -> bool {
        let sg = g_f.max(0.0).sqrt() * sigma as f64;
        let px = self.c1.fx + alpha_f * self.fdx - sg * self.fdy;
        let py = self.c1.fy + alpha_f * self.fdy + sg * self.fdx;
        for c in self.coverers {
            let ddx = px - c.fx;
            let ddy = py - c.fy;
            let margin = s_f * c.fr * c.fr - (ddx * ddx + ddy * ddy);
            if margin > AMBIGUOUS {
                return true;
            }
            if margin < -AMBIGUOUS {
                continue;
            }
            let (alpha, g) =
                exact.get_or_insert_with(|| self.alpha_g_exact(s)).clone();
            let a = &self.c1.cx + &alpha * &self.dx - &c.cx;
            let b = &self.c1.cs + &alpha * &self.ds - &c.cs;
            let p = &a * &a + &self.d_rad * &b * &b + &g * &self.d_sq;
            let w = (&b * &self.dx - &a * &self.ds)
                * Rational::from_integer((2 * sigma).into());
            let rho = s * &c.r_sq;
            if sqrt_term_lt(&w, &(&self.d_rad * &g), &(rho - p)) {
                return true;
            }
        }
        false
    }

    /// True when the boundaries intersect at squared scale `s` and at least
    /// one of the two intersection points lies in no open scaled disc.
    fn uncovered(&self, s: &Rational, s_f: f64) -> bool {
        let alpha_f = (self.d_sq_f + s_f * (self.r1_sq_f - self.r2_sq_f)) / (2.0 * self.d_sq_f);
        let g_f = s_f * self.r1_sq_f / self.d_sq_f - alpha_f * alpha_f;
        if g_f < -AMBIGUOUS * 1e-3 {
            return false;
        }
        if g_f < AMBIGUOUS * 1e-3 {
            let (_, g) = self.alpha_g_exact(s);
            if g.is_negative() {
                return false;
            }
        }
        let mut exact = None;
        !self.point_covered(s, s_f, 1, alpha_f, g_f, &mut exact)
            || !self.point_covered(s, s_f, -1, alpha_f, g_f, &mut exact)
    }
}

/// Critical scale for the pair `(c1, c2)` against the open family `coverers`,
/// capped at scale 1. `None` when the boundaries never meet at scale <= 1;
/// otherwise the least `delta` with every larger scale covered, as an exact
/// squared-scale enclosure.
pub(crate) fn pair_scale(
    c1: &DiscGeom,
    c2: &DiscGeom,
    coverers: &[DiscGeom],
    d_rad: &Rational,
) -> Option<PairScale> {
    let ctx = PairContext::new(c1, c2, coverers, d_rad);
    if ctx.d_sq.is_zero() {
        return None;
    }
    let dist = ctx.d_sq_f.sqrt();
    let r1 = ctx.r1_sq_f.sqrt();
    let r2 = ctx.r2_sq_f.sqrt();
    let delta_lo = dist / (r1 + r2);
    if delta_lo > 1.0 {
        return None;
    }
    let delta_top = if (r1 - r2).abs() < 1e-15 {
        1.0
    } else {
        (dist / (r1 - r2).abs()).min(1.0)
    };
    let lo_f = (delta_lo * delta_lo * (1.0 - 1e-9)).max(0.0);
    let top_f = delta_top * delta_top;
    let top = if delta_top >= 1.0 {
        Rational::one()
    } else {
        Rational::from_float(top_f).unwrap()
    };

    let mut bracket = None;
    let mut above: Option<(Rational, f64)> = None;
    for k in (0..GRID).rev() {
        let s_f = lo_f + (top_f - lo_f) * k as f64 / (GRID - 1) as f64;
        let s = if k == GRID - 1 {
            top.clone()
        } else {
            Rational::from_float(s_f).unwrap()
        };
        let s_f = s.to_f64().unwrap();
        if ctx.uncovered(&s, s_f) {
            bracket = Some(((s, s_f), above));
            break;
        }
        above = Some((s, s_f));
    }
    let ((mut lo, mut lo_fv), above) = match bracket {
        None => return Some(PairScale::zero()),
        Some(b) => b,
    };
    let (mut hi, mut hi_fv) = match above {
        // Uncovered at the top of the window: nothing to refine against.
        None => return Some(PairScale::new(lo.clone(), lo)),
        Some(a) => a,
    };
    while hi_fv - lo_fv > TARGET_WIDTH {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        let mid_f = mid.to_f64().unwrap();
        if ctx.uncovered(&mid, mid_f) {
            lo = mid;
            lo_fv = mid_f;
        } else {
            hi = mid;
            hi_fv = mid_f;
        }
    }
    Some(PairScale::new(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn unit(x: Rational, s: Rational) -> DiscGeom {
        DiscGeom::new(x, s, Rational::one(), 1.0)
    }

    /// Unit discs on the square lattice: adjacent pair goes critical at the
    /// deep hole, delta^2 = 1/2.
    #[test]
    fn square_lattice_adjacent_pair() {
        let d1 = unit(rat(0, 1), rat(0, 1));
        let d2 = unit(rat(1, 1), rat(0, 1));
        let coverers: Vec<DiscGeom> = [
            (0, 1), (1, 1), (0, -1), (1, -1), (-1, 0), (2, 0),
        ]
        .iter()
        .map(|&(x, s)| unit(rat(x, 1), rat(s, 1)))
        .collect();
        let ps = pair_scale(&d1, &d2, &coverers, &Rational::one()).unwrap();
        let lo = ps.delta_sq_lo().to_f64().unwrap();
        let hi = ps.delta_sq_hi().to_f64().unwrap();
        assert!((lo - 0.5).abs() < 1e-12, "lo = {}", lo);
        assert!((hi - 0.5).abs() < 1e-12, "hi = {}", hi);
        assert!(lo <= hi);
        assert!((ps.delta() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn no_coverers_pushes_to_cap() {
        let d1 = unit(rat(0, 1), rat(0, 1));
        let d2 = unit(rat(1, 1), rat(0, 1));
        let ps = pair_scale(&d1, &d2, &[], &Rational::one()).unwrap();
        assert_eq!(ps.delta_sq_hi(), &Rational::one());
    }

    #[test]
    fn distant_pair_never_intersects() {
        let d1 = unit(rat(0, 1), rat(0, 1));
        let d2 = unit(rat(5, 1), rat(0, 1));
        assert!(pair_scale(&d1, &d2, &[], &Rational::one()).is_none());
    }

    #[test]
    fn concentric_pair_never_intersects() {
        let d1 = unit(rat(0, 1), rat(0, 1));
        let d2 = DiscGeom::new(rat(0, 1), rat(0, 1), rat(1, 4), 1.0);
        assert!(pair_scale(&d1, &d2, &[], &Rational::one()).is_none());
    }

    #[test]
    fn dominated_pair_contributes_zero() {
        let d1 = unit(rat(0, 1), rat(0, 1));
        let d2 = unit(rat(1, 1), rat(0, 1));
        let big = DiscGeom::new(rat(1, 2), rat(0, 1), rat(100, 1), 1.0);
        let ps = pair_scale(&d1, &d2, &[big], &Rational::one()).unwrap();
        assert!(ps.delta_sq_hi().is_zero());
    }

    /// Hexagonal lattice of unit discs: critical scale at the circumcenter,
    /// delta^2 = 1/3 with sqrt(3) entering through the split coordinate.
    #[test]
    fn hexagonal_lattice_pair() {
        let d_rad = rat(3, 1);
        let sd = 3f64.sqrt();
        let mk = |x: Rational, s: Rational| DiscGeom::new(x, s, Rational::one(), sd);
        let d1 = mk(rat(0, 1), rat(0, 1));
        let d2 = mk(rat(1, 1), rat(0, 1));
        let coverers = vec![
            mk(rat(1, 2), rat(1, 2)),
            mk(rat(1, 2), rat(-1, 2)),
            mk(rat(-1, 2), rat(1, 2)),
            mk(rat(3, 2), rat(1, 2)),
        ];
        let ps = pair_scale(&d1, &d2, &coverers, &d_rad).unwrap();
        let mid = ps.delta().powi(2);
        assert!((mid - 1.0 / 3.0).abs() < 1e-12, "mid = {}", mid);
    }
}
