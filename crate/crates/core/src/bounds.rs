//! Numerical evaluation of the BSC quantities: binary entropy and its
//! inverse, KL divergence, the random-coding exponent E_0, the Forney /
//! m-level / infinite-level concatenation exponents, and the Zyablov,
//! m-level and Blokh-Zyablov distance bounds.
//!
//! All logarithms are base 2. Maximizations run a coarse grid followed by
//! golden-section refinement; integrals use adaptive Simpson quadrature.
//! `1/E_0` has a non-integrable-looking singularity at capacity, so every
//! optimization over rates stops `sing_margin` short of the right endpoint,
//! where the objectives vanish anyway.

use std::f64::consts::LN_2;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundsError {
    Domain(String),
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::Domain(s) => write!(f, "domain error: {s}"),
        }
    }
}

impl std::error::Error for BoundsError {}

/// Tolerances and grid sizes for the numeric routines.
#[derive(Debug, Clone, Copy)]
pub struct NumericSettings {
    /// Bisection convergence width (entropy inversion, bound inversion).
    pub bisect_tol: f64,
    /// Coarse grid size for maximizations.
    pub grid_points: usize,
    /// Golden-section refinement width.
    pub refine_tol: f64,
    /// Absolute tolerance for adaptive quadrature.
    pub quad_tol: f64,
    /// Distance kept from the singular endpoint (capacity, or rate 1).
    pub sing_margin: f64,
}

impl Default for NumericSettings {
    fn default() -> Self {
        NumericSettings {
            bisect_tol: 1e-12,
            grid_points: 4096,
            refine_tol: 1e-9,
            quad_tol: 1e-9,
            sing_margin: 1e-6,
        }
    }
}

impl NumericSettings {
    fn assert_valid(&self) {
        assert!(
            self.bisect_tol > 0.0
                && self.refine_tol > 0.0
                && self.quad_tol > 0.0
                && self.sing_margin > 0.0
                && self.grid_points >= 2,
            "numeric settings must be positive"
        );
    }
}

/// A maximized value together with its maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximized {
    pub value: f64,
    pub argmax: f64,
}

// ---- fast unchecked kernels ----

/// Binary entropy, with the 0 log 0 = 0 convention.
fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -(x * x.ln() + (1.0 - x) * (1.0 - x).ln()) / LN_2
}

/// Inverse of h on [0, 1/2]: Newton iteration inside a shrinking bracket.
/// Terminates on the residual, the bracket width, or a stalled step, so the
/// worst case stays a handful of iterations.
fn h_inv(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 0.5;
    }
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    // quadratic expansion around x = 1/2 seeds well for y near 1 and the
    // bracket absorbs it elsewhere
    let mut x = (0.5 - ((1.0 - y) * LN_2 / 2.0).sqrt()).clamp(1e-12, 0.5 - 1e-12);
    for _ in 0..64 {
        let fx = h(x) - y;
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if fx.abs() < 1e-15 || hi - lo < 2e-17 {
            break;
        }
        let dfx = ((1.0 - x) / x).ln() / LN_2;
        let mut next = 0.5 * (lo + hi);
        if dfx > 1e-12 {
            let cand = x - fx / dfx;
            if cand > lo && cand < hi {
                next = cand;
            }
        }
        if (next - x).abs() <= 4e-16 * x.max(1e-6) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Base-2 KL divergence D(x || y), with the boundary conventions at x = 0, 1.
fn kl2(x: f64, y: f64) -> f64 {
    let mut d = 0.0;
    if x > 0.0 {
        d += x * (x / y).ln();
    }
    if x < 1.0 {
        d += (1.0 - x) * ((1.0 - x) / (1.0 - y)).ln();
    }
    d / LN_2
}

// ---- checked public scalar operations ----

pub fn entropy(x: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(BoundsError::Domain(format!("entropy argument {x} outside [0,1]")));
    }
    Ok(h(x))
}

/// Unique preimage of `entropy` in [0, 1/2].
pub fn inv_entropy(y: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&y) {
        return Err(BoundsError::Domain(format!("inv_entropy argument {y} outside [0,1]")));
    }
    Ok(h_inv(y))
}

/// Gilbert-Varshamov relative distance `h^{-1}(1 - R)`.
pub fn gv_distance(r: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(BoundsError::Domain(format!("rate {r} outside [0,1]")));
    }
    Ok(h_inv(1.0 - r))
}

pub fn kl(x: f64, y: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(BoundsError::Domain(format!("kl first argument {x} outside [0,1]")));
    }
    if y <= 0.0 || y >= 1.0 {
        return Err(BoundsError::Domain(format!("kl second argument {y} outside (0,1)")));
    }
    Ok(kl2(x, y))
}

/// A binary symmetric channel with its derived rate landmarks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub p: f64,
    /// Capacity `1 - h(p)`.
    pub capacity: f64,
    /// `sqrt(p) / (sqrt(p) + sqrt(1-p))`.
    pub rho0: f64,
    /// Critical rate `1 - h(rho0)`.
    pub r_crit: f64,
    /// Expurgation rate `1 - h(2 rho0 (1 - rho0))`.
    pub r_x: f64,
    /// `-log2(2 sqrt(p(1-p)))`, the slope of the expurgated segment.
    ex_slope: f64,
    /// `D(rho0 || p)`, cached for the straight-line segment.
    d_rho: f64,
}

impl ChannelParams {
    pub fn new(p: f64) -> Result<ChannelParams, BoundsError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(BoundsError::Domain(format!("crossover probability {p} outside (0, 1/2)")));
        }
        let rho0 = p.sqrt() / (p.sqrt() + (1.0 - p).sqrt());
        Ok(ChannelParams {
            p,
            capacity: 1.0 - h(p),
            rho0,
            r_crit: 1.0 - h(rho0),
            r_x: 1.0 - h(2.0 * rho0 * (1.0 - rho0)),
            ex_slope: -(2.0 * (p * (1.0 - p)).sqrt()).ln() / LN_2,
            d_rho: kl2(rho0, p),
        })
    }

    /// The random-coding exponent E_0(R, p), piecewise over
    /// `[0, R_x] / [R_x, R_crit] / [R_crit, C]`.
    pub fn e0(&self, r: f64) -> Result<f64, BoundsError> {
        if r < 0.0 || r > self.capacity + 1e-12 {
            return Err(BoundsError::Domain(format!(
                "rate {r} outside [0, capacity = {}]",
                self.capacity
            )));
        }
        Ok(self.e0_raw(r))
    }

    /// E_0 without the domain check; callers keep `r` in `[0, C]`.
    #[inline]
    pub(crate) fn e0_raw(&self, r: f64) -> f64 {
        if r <= self.r_x {
            h_inv(1.0 - r) * self.ex_slope
        } else if r <= self.r_crit {
            self.d_rho + self.r_crit - r
        } else {
            let r = r.min(self.capacity);
            kl2(h_inv(1.0 - r), self.p)
        }
    }
}

/// Free-function form of E_0.
pub fn e0(r: f64, p: f64) -> Result<f64, BoundsError> {
    ChannelParams::new(p)?.e0(r)
}

// ---- maximization machinery ----

/// Coarse grid over [a, b] followed by golden-section refinement around the
/// best grid point.
fn maximize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, s: &NumericSettings) -> Maximized {
    if b <= a {
        let x = a.min(b);
        return Maximized { value: f(x), argmax: x };
    }
    let g = s.grid_points;
    let step = (b - a) / g as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=g {
        let x = a + step * i as f64;
        let v = f(x);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { a } else { a + step * (best_i - 1) as f64 };
    let hi = if best_i == g { b } else { a + step * (best_i + 1) as f64 };
    let (mut lo, mut hi) = (lo, hi);
    // golden-section search on the bracket
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > s.refine_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    // never report worse than the best grid sample
    if fm >= best_v {
        Maximized { value: fm, argmax: xm }
    } else {
        Maximized { value: best_v, argmax: a + step * best_i as f64 }
    }
}

/// Adaptive Simpson quadrature. A subinterval is accepted when the
/// refinement residual meets the absolute tolerance or a relative one
/// (`rel_tol` of the subinterval's value). The relative floor must sit above
/// the integrand's own noise level or the recursion bottoms out at the depth
/// cap everywhere; integrands built on `h_inv` carry ~1e-15 absolute noise,
/// which `1/E_0` amplifies to ~1e-9 relative near capacity.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, rel_tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        rel_tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        let accept = delta.abs() <= 15.0 * tol.max(rel_tol * (left + right).abs());
        if depth == 0 || accept {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, rel_tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, rel_tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, rel_tol, 20)
}

/// `int_a^b dx / E_0(x)`. Near capacity `E_0` vanishes quadratically, so
/// the integrand grows like `(C - x)^{-2}`; the steep tail is integrated in
/// the variable `s = -ln(C - x)`, where it becomes a tame exponential.
fn quad_inv_e0(ch: &ChannelParams, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let split = ch.capacity - 0.25 * (ch.capacity - ch.r_crit);
    if b <= split {
        return adaptive_simpson(&|x: f64| 1.0 / ch.e0_raw(x), a, b, tol, 3e-9);
    }
    if a >= split {
        let s0 = -(ch.capacity - a).ln();
        let s1 = -(ch.capacity - b).ln();
        let g = |s: f64| {
            let u = (-s).exp();
            u / ch.e0_raw(ch.capacity - u)
        };
        return adaptive_simpson(&g, s0, s1, tol, 3e-9);
    }
    quad_inv_e0(ch, a, split, 0.5 * tol) + quad_inv_e0(ch, split, b, 0.5 * tol)
}

// ---- exponent bounds ----

/// Forney exponent `max_{R <= R0 <= C} E_0(R0)(1 - R/R0)`.
pub fn forney_exponent(
    ch: &ChannelParams,
    r: f64,
    s: &NumericSettings,
) -> Result<Maximized, BoundsError> {
    s.assert_valid();
    if r <= 0.0 {
        return Err(BoundsError::Domain(format!("rate {r} must be positive")));
    }
    if r >= ch.capacity {
        return Ok(Maximized { value: 0.0, argmax: ch.capacity });
    }
    Ok(maximize(|r0| ch.e0_raw(r0) * (1.0 - r / r0), r, ch.capacity, s))
}

/// The m-level concatenation exponent
/// `max_{R <= R0 <= C} (R0 - R) / ((R0/m) sum_i 1/E_0(i R0 / m))`.
pub fn multilevel_exponent(
    ch: &ChannelParams,
    m: u32,
    r: f64,
    s: &NumericSettings,
) -> Result<Maximized, BoundsError> {
    s.assert_valid();
    if m == 0 {
        return Err(BoundsError::Domain("level count m must be >= 1".into()));
    }
    if r <= 0.0 {
        return Err(BoundsError::Domain(format!("rate {r} must be positive")));
    }
    let hi = ch.capacity - s.sing_margin;
    if r >= hi {
        return Ok(Maximized { value: 0.0, argmax: ch.capacity });
    }
    let f = |r0: f64| {
        let mut inv_sum = 0.0;
        for i in 1..=m {
            inv_sum += 1.0 / ch.e0_raw(i as f64 * r0 / m as f64);
        }
        (r0 - r) / (r0 / m as f64 * inv_sum)
    };
    Ok(maximize(f, r, hi, s))
}

/// The infinite-level (Blokh-Zyablov) exponent
/// `max_{R <= R0 <= C} (R0 - R) [ int_0^{R0} dx / E_0(x) ]^{-1}`,
/// with the integral accumulated cumulatively along the search grid.
pub fn bz_exponent(
    ch: &ChannelParams,
    r: f64,
    s: &NumericSettings,
) -> Result<Maximized, BoundsError> {
    s.assert_valid();
    if r <= 0.0 {
        return Err(BoundsError::Domain(format!("rate {r} must be positive")));
    }
    let hi = ch.capacity - s.sing_margin;
    if r >= hi {
        return Ok(Maximized { value: 0.0, argmax: ch.capacity });
    }
    let g = s.grid_points;
    let step = (hi - r) / g as f64;
    let seg_tol = (s.quad_tol / (g as f64 + 1.0)).max(1e-16);
    // cumulative integral from 0 to each grid point
    let mut cumulative = Vec::with_capacity(g + 1);
    let mut acc = quad_inv_e0(ch, 0.0, r, s.quad_tol);
    cumulative.push(acc);
    for i in 1..=g {
        let a = r + step * (i - 1) as f64;
        let b = r + step * i as f64;
        acc += quad_inv_e0(ch, a, b, seg_tol);
        cumulative.push(acc);
    }
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &ci) in cumulative.iter().enumerate() {
        let x = r + step * i as f64;
        let v = (x - r) / ci;
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    // refine in the bracket around the best grid point, anchoring the
    // integral at the bracket's left grid point
    let lo_i = best_i.saturating_sub(1);
    let lo = r + step * lo_i as f64;
    let hi_b = r + step * (best_i + 1).min(g) as f64;
    let anchor = cumulative[lo_i];
    let f = |x: f64| {
        let ix = anchor + quad_inv_e0(ch, lo, x, seg_tol);
        if ix <= 0.0 {
            return 0.0;
        }
        (x - r) / ix
    };
    let refined = maximize(f, lo, hi_b, &NumericSettings { grid_points: 64, ..*s });
    if refined.value >= best_v {
        Ok(refined)
    } else {
        Ok(Maximized { value: best_v, argmax: r + step * best_i as f64 })
    }
}

/// `int_0^{r0} dx / E_0(x)`, exposed for the parametric cross-check of the
/// infinite-level exponent.
pub fn inv_e0_integral(ch: &ChannelParams, r0: f64, s: &NumericSettings) -> Result<f64, BoundsError> {
    if r0 < 0.0 || r0 >= ch.capacity {
        return Err(BoundsError::Domain(format!("upper limit {r0} outside [0, capacity)")));
    }
    Ok(quad_inv_e0(ch, 0.0, r0, s.quad_tol))
}

// ---- distance bounds ----

/// Zyablov bound `max_{R <= R0 <= 1} dGV(R0)(1 - R/R0)`.
pub fn zyablov_distance(r: f64, s: &NumericSettings) -> Result<Maximized, BoundsError> {
    s.assert_valid();
    if !(r > 0.0 && r < 1.0) {
        return Err(BoundsError::Domain(format!("rate {r} outside (0,1)")));
    }
    Ok(maximize(|r0| h_inv(1.0 - r0) * (1.0 - r / r0), r, 1.0, s))
}

/// The m-level distance bound
/// `max_{R <= R0 <= 1} m(R0 - R) / (R0 sum_i 1/dGV(i R0 / m))`.
pub fn m_level_distance(m: u32, r: f64, s: &NumericSettings) -> Result<Maximized, BoundsError> {
    s.assert_valid();
    if m == 0 {
        return Err(BoundsError::Domain("level count m must be >= 1".into()));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(BoundsError::Domain(format!("rate {r} outside (0,1)")));
    }
    let hi = 1.0 - s.sing_margin;
    if r >= hi {
        return Ok(Maximized { value: 0.0, argmax: 1.0 });
    }
    let f = |r0: f64| {
        let mut inv_sum = 0.0;
        for i in 1..=m {
            inv_sum += 1.0 / h_inv(1.0 - i as f64 * r0 / m as f64);
        }
        m as f64 * (r0 - r) / (r0 * inv_sum)
    };
    Ok(maximize(f, r, hi, s))
}

/// Blokh-Zyablov rate as a function of relative distance:
/// `R_BZ(delta) = 1 - h(delta) - delta int_0^{1-h(delta)} dx / dGV(x)`.
pub fn bz_rate(delta: f64, s: &NumericSettings) -> Result<f64, BoundsError> {
    s.assert_valid();
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(BoundsError::Domain(format!("distance {delta} outside (0, 1/2]")));
    }
    let upper = 1.0 - h(delta);
    if upper <= 0.0 {
        return Ok(0.0);
    }
    let integral = adaptive_simpson(&|x: f64| 1.0 / h_inv(1.0 - x), 0.0, upper, s.quad_tol, 1e-10);
    Ok(upper - delta * integral)
}

/// Inverse of [`bz_rate`] by bisection (the rate is strictly decreasing in
/// the distance).
pub fn bz_distance(r: f64, s: &NumericSettings) -> Result<f64, BoundsError> {
    s.assert_valid();
    if !(r > 0.0 && r < 1.0) {
        return Err(BoundsError::Domain(format!("rate {r} outside (0,1)")));
    }
    let mut lo = 1e-12;
    let mut hi = 0.5;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let rm = bz_rate(mid, s)?;
        if rm > r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < s.bisect_tol {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> NumericSettings {
        NumericSettings::default()
    }

    #[test]
    fn entropy_edges() {
        assert_eq!(entropy(0.5).unwrap(), 1.0);
        assert_eq!(entropy(0.0).unwrap(), 0.0);
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        assert!(entropy(-0.1).is_err());
    }

    #[test]
    fn inv_entropy_round_trip() {
        for x in [0.01, 0.11, 0.25, 0.4, 0.49, 0.4999] {
            let y = entropy(x).unwrap();
            assert!((inv_entropy(y).unwrap() - x).abs() < 1e-10, "x = {x}");
        }
        assert_eq!(inv_entropy(0.0).unwrap(), 0.0);
        assert_eq!(inv_entropy(1.0).unwrap(), 0.5);
    }

    #[test]
    fn gv_edges_and_composition() {
        assert!((gv_distance(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(gv_distance(1.0).unwrap() < 1e-15);
        for p in [0.01, 0.05, 0.11] {
            let r = 1.0 - entropy(p).unwrap();
            assert!((gv_distance(r).unwrap() - p).abs() < 1e-10);
        }
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl(0.3, 0.3).unwrap(), 0.0);
        let y = 0.2;
        assert!((kl(0.0, y).unwrap() - -(1.0f64 - y).log2()).abs() < 1e-14);
        // 0.2 log2(2) + 0.8 log2(8/9)
        let expect = 0.2 + 0.8 * (8.0f64 / 9.0).log2();
        assert!((kl(0.2, 0.1).unwrap() - expect).abs() < 1e-13);
        assert!(kl(0.2, 0.1).unwrap() >= 0.0);
        assert!(kl(0.5, 0.0).is_err());
    }

    #[test]
    fn channel_landmark_ordering() {
        for p in [0.01, 0.02, 0.05, 0.11, 0.25, 0.4] {
            let ch = ChannelParams::new(p).unwrap();
            assert!(0.0 < ch.r_x, "p = {p}");
            assert!(ch.r_x < ch.r_crit);
            assert!(ch.r_crit < ch.capacity);
            assert!(ch.capacity < 1.0);
        }
        assert!(ChannelParams::new(0.5).is_err());
        assert!(ChannelParams::new(0.0).is_err());
    }

    #[test]
    fn e0_at_capacity_and_expurgated_origin() {
        let ch = ChannelParams::new(0.05).unwrap();
        assert!(ch.e0(ch.capacity).unwrap().abs() < 1e-9);
        let ch = ChannelParams::new(0.01).unwrap();
        // closed-form expurgated value at R = 0
        let expect = -0.5 * (2.0 * (0.01f64 * 0.99).sqrt()).log2();
        assert!((ch.e0(0.0).unwrap() - expect).abs() < 1e-12);
        assert!(expect > 1.1 && expect < 1.2);
    }

    #[test]
    fn e0_continuous_at_breakpoints() {
        let eps = 1e-8;
        for p in [0.01, 0.05, 0.11] {
            let ch = ChannelParams::new(p).unwrap();
            for b in [ch.r_x, ch.r_crit] {
                let lo = ch.e0(b - eps).unwrap();
                let hi = ch.e0(b + eps).unwrap();
                assert!((lo - hi).abs() < 1e-6, "jump at {b} for p = {p}");
            }
        }
    }

    #[test]
    fn e0_continuous_nonincreasing_dense() {
        for p in [0.01, 0.05, 0.11] {
            let ch = ChannelParams::new(p).unwrap();
            let mut prev = f64::INFINITY;
            let steps = 10_000;
            let step = ch.capacity / steps as f64;
            // the expurgated segment has a sqrt cusp at R = 0 (dGV' blows up
            // where h' vanishes), so the continuity modulus is O(sqrt(step))
            let jump_bound = 5.0 * step.sqrt() + 5.0 * step;
            for i in 0..=steps {
                let r = ch.capacity * i as f64 / steps as f64;
                let v = ch.e0(r).unwrap();
                assert!(v <= prev + 1e-12, "E0 increased at R = {r}, p = {p}");
                assert!(prev == f64::INFINITY || prev - v < jump_bound, "jump at R = {r}, p = {p}");
                prev = v;
            }
        }
    }

    #[test]
    fn bounds_vanish_at_their_boundary_rates() {
        let s = settings();
        let ch = ChannelParams::new(0.05).unwrap();
        let eps = 1e-9;
        let r_top = ch.capacity - eps;
        assert!(forney_exponent(&ch, r_top, &s).unwrap().value <= 1e-8);
        assert!(multilevel_exponent(&ch, 4, r_top, &s).unwrap().value <= 1e-8);
        assert!(bz_exponent(&ch, r_top, &s).unwrap().value <= 1e-8);
        assert!(zyablov_distance(1.0 - eps, &s).unwrap().value <= 1e-8);
        assert!(m_level_distance(4, 1.0 - eps, &s).unwrap().value <= 1e-8);
    }

    #[test]
    fn forney_bounded_by_e0_and_vanishes_at_capacity() {
        let s = settings();
        let ch = ChannelParams::new(0.02).unwrap();
        for r in [0.05, 0.2, 0.4, 0.6] {
            if r >= ch.capacity {
                continue;
            }
            let f = forney_exponent(&ch, r, &s).unwrap();
            assert!(f.value <= ch.e0(r).unwrap() + 1e-12);
            assert!(f.value > 0.0);
            assert!(f.argmax >= r && f.argmax <= ch.capacity);
        }
        let near = forney_exponent(&ch, ch.capacity - 1e-9, &s).unwrap();
        assert!(near.value < 1e-6);
    }

    #[test]
    fn forney_matches_brute_force_grid() {
        let s = settings();
        let ch = ChannelParams::new(0.02).unwrap();
        let r = 0.2;
        let got = forney_exponent(&ch, r, &s).unwrap();
        // independent coarse oracle (the acceptance suite runs 10^6 points)
        let n = 100_000;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=n {
            let r0 = r + (ch.capacity - r) * i as f64 / n as f64;
            let v = ch.e0_raw(r0) * (1.0 - r / r0);
            if v > best.0 {
                best = (v, r0);
            }
        }
        assert!((got.value - best.0).abs() < 1e-9);
        assert!((got.argmax - best.1).abs() < 1e-4);
    }

    #[test]
    fn multilevel_one_equals_forney() {
        let s = settings();
        for p in [0.01, 0.05] {
            let ch = ChannelParams::new(p).unwrap();
            for r in [0.1, 0.3] {
                let f = forney_exponent(&ch, r, &s).unwrap();
                let m1 = multilevel_exponent(&ch, 1, r, &s).unwrap();
                assert!((f.value - m1.value).abs() < 1e-9, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn multilevel_strictly_increasing_in_m() {
        let s = settings();
        let ch = ChannelParams::new(0.02).unwrap();
        let r = 0.2;
        let mut prev = 0.0;
        for m in 1..=8 {
            let v = multilevel_exponent(&ch, m, r, &s).unwrap().value;
            assert!(v > prev, "E^({m}) not above E^({})", m - 1);
            prev = v;
        }
    }

    #[test]
    fn bz_exponent_dominates_finite_m() {
        let s = settings();
        let ch = ChannelParams::new(0.02).unwrap();
        let r = 0.2;
        let inf = bz_exponent(&ch, r, &s).unwrap();
        for m in [1, 4, 16, 32] {
            let v = multilevel_exponent(&ch, m, r, &s).unwrap().value;
            assert!(inf.value >= v - 1e-9, "m = {m}");
        }
        // convergence is O(1/m): measured gaps are 2.2% at m=32, 1.1% at m=64
        let m32 = multilevel_exponent(&ch, 32, r, &s).unwrap().value;
        assert!((inf.value - m32) / inf.value < 0.025, "m=32 should be within 2.5%");
        let m64 = multilevel_exponent(&ch, 64, r, &s).unwrap().value;
        assert!((inf.value - m64) / inf.value < 0.0125, "m=64 should be within 1.25%");
    }

    #[test]
    fn bz_exponent_parametric_cross_check() {
        let s = settings();
        let ch = ChannelParams::new(0.02).unwrap();
        for r in [0.1, 0.25] {
            let got = bz_exponent(&ch, r, &s).unwrap();
            let alpha = got.argmax;
            let integral = inv_e0_integral(&ch, alpha, &s).unwrap();
            let r_back = alpha - ch.e0_raw(alpha) * integral;
            assert!((r_back - r).abs() < 1e-6, "parametric form at r = {r}: {r_back}");
            assert!((got.value - ch.e0_raw(alpha)).abs() < 1e-6);
        }
    }

    #[test]
    fn zyablov_below_gv_and_vanishing() {
        let s = settings();
        for i in 1..=9 {
            let r = i as f64 / 10.0;
            let z = zyablov_distance(r, &s).unwrap();
            assert!(z.value < gv_distance(r).unwrap());
            assert!(z.value > 0.0);
        }
        assert!(zyablov_distance(0.999999, &s).unwrap().value < 1e-5);
    }

    #[test]
    fn bz_exponent_matches_brute_force_at_low_rate() {
        // cumulative-trapezoid oracle over a 10^6-point grid
        let s = settings();
        let ch = ChannelParams::new(0.02).unwrap();
        let r = 0.01;
        let got = bz_exponent(&ch, r, &s).unwrap();
        let n = 1_000_000;
        let hi = ch.capacity - 1e-6;
        let step = (hi - r) / n as f64;
        let mut acc = inv_e0_integral(&ch, r, &s).unwrap();
        let mut prev_f = 1.0 / ch.e0_raw(r);
        let mut best = f64::NEG_INFINITY;
        for i in 1..=n {
            let x = r + step * i as f64;
            let f = 1.0 / ch.e0_raw(x);
            acc += 0.5 * (prev_f + f) * step;
            prev_f = f;
            let v = (x - r) / acc;
            if v > best {
                best = v;
            }
        }
        assert!((got.value - best).abs() < 1e-5, "bz exponent {} vs oracle {best}", got.value);
    }

    #[test]
    fn zyablov_matches_brute_force_grid() {
        let s = settings();
        let r = 0.3;
        let got = zyablov_distance(r, &s).unwrap();
        let n = 1_000_000;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=n {
            let r0 = r + (1.0 - r) * i as f64 / n as f64;
            let v = h_inv(1.0 - r0) * (1.0 - r / r0);
            if v > best {
                best = v;
            }
        }
        assert!((got.value - best).abs() < 1e-6);
    }

    #[test]
    fn m_level_distance_one_is_zyablov_and_monotone() {
        let s = settings();
        let r = 0.3;
        let z = zyablov_distance(r, &s).unwrap().value;
        let m1 = m_level_distance(1, r, &s).unwrap().value;
        assert!((z - m1).abs() < 1e-9);
        let mut prev = 0.0;
        for m in 1..=16 {
            let v = m_level_distance(m, r, &s).unwrap().value;
            assert!(v >= prev - 1e-12, "m = {m}");
            prev = v;
        }
    }

    #[test]
    fn bz_rate_edges_and_round_trip() {
        let s = settings();
        assert!(bz_rate(0.5, &s).unwrap().abs() < 1e-12);
        for delta in [0.05, 0.1, 0.2] {
            let r = bz_rate(delta, &s).unwrap();
            assert!(r > 0.0 && r < 1.0);
            let back = bz_distance(r, &s).unwrap();
            assert!((back - delta).abs() < 1e-8, "round trip at delta = {delta}: {back}");
        }
    }

    #[test]
    fn distance_bound_ordering() {
        let s = settings();
        for i in 1..=9 {
            let r = i as f64 / 10.0;
            let z = zyablov_distance(r, &s).unwrap().value;
            let bz = bz_distance(r, &s).unwrap();
            let gv = gv_distance(r).unwrap();
            assert!(z <= bz + 1e-9, "zyablov above bz at {r}");
            assert!(bz <= gv + 1e-9, "bz above gv at {r}");
        }
    }

    #[test]
    fn m_level_converges_to_bz_curve() {
        let s = settings();
        let r = 0.3;
        let bz = bz_distance(r, &s).unwrap();
        let m64 = m_level_distance(64, r, &s).unwrap().value;
        assert!((bz - m64).abs() / bz < 0.02, "m=64 within 2% of the limit curve");
    }
}
