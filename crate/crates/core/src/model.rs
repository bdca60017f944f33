//! Phase-space vocabulary for the isothermal phase-transition system
//!
//! ```text
//! v_t - u_x = 0,   u_t + p(v, λ)_x = 0,   λ_t = 0,   p = a²(λ) / v
//! ```
//!
//! Everything here is a pure function of its arguments: the pressure law,
//! characteristic speeds, the shock-rarefaction curves of the genuinely
//! nonlinear families, the contact curve of the second family and the
//! signed wave strengths used throughout the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide whether two states lie on a common wave curve.
pub const CURVE_TOL: f64 = 1e-9;

/// A point `(v, u, λ)` of the phase space `(0, ∞) × ℝ × [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub v: f64,
    pub u: f64,
    pub lam: f64,
}

impl State {
    pub fn new(v: f64, u: f64, lam: f64) -> Result<Self> {
        let s = State { v, u, lam };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0) || !self.v.is_finite() {
            return Err(Error::Domain(format!("specific volume must be positive, got {}", self.v)));
        }
        if !self.u.is_finite() {
            return Err(Error::Domain(format!("velocity must be finite, got {}", self.u)));
        }
        if !(0.0..=1.0).contains(&self.lam) {
            return Err(Error::Domain(format!("mass fraction must lie in [0,1], got {}", self.lam)));
        }
        Ok(())
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &State) -> f64 {
        (self.v - other.v)
            .abs()
            .max((self.u - other.u).abs())
            .max((self.lam - other.lam).abs())
    }
}

/// Characteristic family of a wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    One,
    Two,
    Three,
}

impl Family {
    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
            Family::Three => 3,
        }
    }

    pub fn from_index(i: u8) -> Option<Family> {
        match i {
            1 => Some(Family::One),
            2 => Some(Family::Two),
            3 => Some(Family::Three),
            _ => None,
        }
    }

    /// The other genuinely nonlinear family (1 ↔ 3); `Two` maps to itself.
    pub fn opposite(self) -> Family {
        match self {
            Family::One => Family::Three,
            Family::Two => Family::Two,
            Family::Three => Family::One,
        }
    }
}

/// Coefficient law `λ ↦ a(λ)` of the pressure `p = a²(λ)/v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientLaw {
    /// `a²(λ) = k0 + λ (k1 − k0)` with `0 < k0 < k1`.
    AffineSquare { k0: f64, k1: f64 },
    /// Strictly increasing positive samples of `a` on a grid covering `[0, 1]`,
    /// interpolated with a monotone cubic Hermite scheme.
    Table { lam: Vec<f64>, a: Vec<f64> },
}

/// Pressure law together with its cached monotone-interpolation slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoefficientLaw", into = "CoefficientLaw")]
pub struct PressureModel {
    law: CoefficientLaw,
    slopes: Vec<f64>,
}

impl TryFrom<CoefficientLaw> for PressureModel {
    type Error = Error;
    fn try_from(law: CoefficientLaw) -> Result<Self> {
        match law {
            CoefficientLaw::AffineSquare { k0, k1 } => PressureModel::affine(k0, k1),
            CoefficientLaw::Table { lam, a } => PressureModel::table(lam, a),
        }
    }
}

impl From<PressureModel> for CoefficientLaw {
    fn from(m: PressureModel) -> Self {
        m.law
    }
}

impl PressureModel {
    pub fn affine(k0: f64, k1: f64) -> Result<Self> {
        if !(k0 > 0.0 && k1 > k0 && k1.is_finite()) {
            return Err(Error::Domain(format!("need 0 < k0 < k1, got k0={k0}, k1={k1}")));
        }
        Ok(PressureModel { law: CoefficientLaw::AffineSquare { k0, k1 }, slopes: Vec::new() })
    }

    /// Build a tabulated law. The grid must start at 0, end at 1 and be strictly
    /// increasing; the samples must be positive and strictly increasing.
    pub fn table(lam: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if lam.len() != a.len() || lam.len() < 2 {
            return Err(Error::InvalidTable("need at least two (λ, a) samples of equal length".into()));
        }
        if lam[0] != 0.0 || *lam.last().unwrap() != 1.0 {
            return Err(Error::InvalidTable("grid must span exactly [0, 1]".into()));
        }
        if lam.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTable("grid must be strictly increasing".into()));
        }
        if a.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidTable("samples of a must be positive".into()));
        }
        if a.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTable("samples of a must be strictly increasing".into()));
        }
        let slopes = pchip_slopes(&lam, &a);
        Ok(PressureModel { law: CoefficientLaw::Table { lam, a }, slopes })
    }

    pub fn law(&self) -> &CoefficientLaw {
        &self.law
    }

    /// `a(λ)`; `λ` is clamped to `[0, 1]`.
    pub fn a(&self, lam: f64) -> f64 {
        let lam = lam.clamp(0.0, 1.0);
        match &self.law {
            CoefficientLaw::AffineSquare { k0, k1 } => (k0 + lam * (k1 - k0)).sqrt(),
            CoefficientLaw::Table { lam: xs, a: ys } => pchip_eval(xs, ys, &self.slopes, lam).0,
        }
    }

    /// `a'(λ)`.
    pub fn a_prime(&self, lam: f64) -> f64 {
        let lam = lam.clamp(0.0, 1.0);
        match &self.law {
            CoefficientLaw::AffineSquare { k0, k1 } => (k1 - k0) / (2.0 * self.a(lam)),
            CoefficientLaw::Table { lam: xs, a: ys } => pchip_eval(xs, ys, &self.slopes, lam).1,
        }
    }

    pub fn a_min(&self) -> f64 {
        self.a(0.0)
    }

    pub fn a_max(&self) -> f64 {
        self.a(1.0)
    }

    /// `p(v, λ) = a²(λ)/v`.
    pub fn pressure(&self, v: f64, lam: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("specific volume must be positive, got {v}")));
        }
        if !(0.0..=1.0).contains(&lam) {
            return Err(Error::Domain(format!("mass fraction must lie in [0,1], got {lam}")));
        }
        let a = self.a(lam);
        Ok(a * a / v)
    }

    pub fn pressure_of(&self, s: &State) -> f64 {
        let a = self.a(s.lam);
        a * a / s.v
    }

    /// Partial derivatives `(p_v, p_vv, p_λ, p_vλ)` at `(v, λ)`.
    pub fn pressure_derivatives(&self, v: f64, lam: f64) -> [f64; 4] {
        let a = self.a(lam);
        let a2p = 2.0 * a * self.a_prime(lam);
        [-a * a / (v * v), 2.0 * a * a / (v * v * v), a2p / v, -a2p / (v * v)]
    }

    /// `c = √(−p_v) = a(λ)/v`.
    pub fn sound_speed(&self, s: &State) -> f64 {
        self.a(s.lam) / s.v
    }

    /// The three eigenvalues `(−c, 0, c)`.
    pub fn eigenvalues(&self, s: &State) -> [f64; 3] {
        let c = self.sound_speed(s);
        [-c, 0.0, c]
    }

    /// Characteristic speed of `family` at `s`.
    pub fn characteristic_speed(&self, family: Family, s: &State) -> f64 {
        self.eigenvalues(s)[family.index() as usize - 1]
    }

    /// Velocity on the shock-rarefaction curve of family 1 or 3 through `base`,
    /// evaluated branchwise at volume `v`.
    pub fn curve_phi13(&self, family: Family, v: f64, base: &State) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("specific volume must be positive, got {v}")));
        }
        let a = self.a(base.lam);
        let (vo, uo) = (base.v, base.u);
        let shock = (v - vo) / (v * vo).sqrt();
        let rar = (v / vo).ln();
        Ok(match family {
            Family::One if v < vo => uo + a * shock,
            Family::One => uo + a * rar,
            Family::Three if v < vo => uo - a * rar,
            Family::Three => uo - a * shock,
            Family::Two => return Err(Error::Domain("curve_phi13 needs family 1 or 3".into())),
        })
    }

    /// Same curve evaluated through the signed strength: `u_o + 2 a(λ_o) h(ε)`.
    pub fn curve_phi13_by_strength(&self, family: Family, v: f64, base: &State) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("specific volume must be positive, got {v}")));
        }
        let eps = match family {
            Family::One => 0.5 * (v / base.v).ln(),
            Family::Three => 0.5 * (base.v / v).ln(),
            Family::Two => return Err(Error::Domain("curve_phi13 needs family 1 or 3".into())),
        };
        Ok(base.u + 2.0 * self.a(base.lam) * h(eps))
    }

    /// Contact curve: the state reached from `base` across a 2-wave to `lam_target`.
    pub fn curve_phi2(&self, lam_target: f64, base: &State) -> State {
        let ratio = self.a(lam_target) / self.a(base.lam);
        State { v: base.v * ratio * ratio, u: base.u, lam: lam_target }
    }

    /// The state reached from `base` across a wave of `family` with signed `strength`.
    /// For family 2 the strength is ignored in favour of `lam_target`.
    pub fn wave_end_state(&self, family: Family, strength: f64, base: &State) -> State {
        let a = self.a(base.lam);
        match family {
            Family::One => State { v: base.v * (2.0 * strength).exp(), u: base.u + 2.0 * a * h(strength), lam: base.lam },
            Family::Three => {
                State { v: base.v * (-2.0 * strength).exp(), u: base.u + 2.0 * a * h(strength), lam: base.lam }
            }
            Family::Two => *base,
        }
    }

    /// Signed strength of the `family`-wave joining `left` to `right`.
    pub fn strength_from_states(&self, family: Family, left: &State, right: &State) -> Result<f64> {
        match family {
            Family::One | Family::Three => {
                if (left.lam - right.lam).abs() > CURVE_TOL {
                    return Err(Error::NotOnCurve { family: family.index(), residual: (left.lam - right.lam).abs() });
                }
                let u_curve = self.curve_phi13(family, right.v, left)?;
                let scale = 1.0_f64.max(left.u.abs()).max(right.u.abs());
                let residual = (u_curve - right.u).abs();
                if residual > CURVE_TOL * scale {
                    return Err(Error::NotOnCurve { family: family.index(), residual });
                }
                Ok(match family {
                    Family::One => 0.5 * (right.v / left.v).ln(),
                    _ => 0.5 * (left.v / right.v).ln(),
                })
            }
            Family::Two => {
                let scale = 1.0_f64.max(left.u.abs()).max(right.u.abs());
                let du = (left.u - right.u).abs();
                let dp = (self.pressure_of(left) / self.pressure_of(right)).ln().abs();
                if du > CURVE_TOL * scale || dp > CURVE_TOL {
                    return Err(Error::NotOnCurve { family: 2, residual: du.max(dp) });
                }
                Ok(self.contact_strength(left.lam, right.lam))
            }
        }
    }

    /// `2 (a_r − a_ℓ)/(a_r + a_ℓ)`.
    pub fn contact_strength(&self, lam_left: f64, lam_right: f64) -> f64 {
        let (al, ar) = (self.a(lam_left), self.a(lam_right));
        2.0 * (ar - al) / (ar + al)
    }

    /// Upper bound `2 (a(1) − a(0))/(a(1) + a(0))` on any contact strength.
    pub fn max_contact_strength(&self) -> f64 {
        self.contact_strength(0.0, 1.0)
    }

    /// Riemann invariants `(u − a log v, u, u + a log v)` paired with `λ`, `p`, `λ`.
    /// Diagnostic only.
    pub fn riemann_invariants(&self, s: &State) -> [(f64, f64); 3] {
        let a = self.a(s.lam);
        let lv = s.v.ln();
        [(s.u - a * lv, s.lam), (s.u, self.pressure_of(s)), (s.u + a * lv, s.lam)]
    }
}

/// `h(ε) = ε` for `ε ≥ 0`, `sinh ε` for `ε < 0`.
#[inline]
pub fn h(eps: f64) -> f64 {
    if eps >= 0.0 {
        eps
    } else {
        eps.sinh()
    }
}

#[inline]
pub fn h_prime(eps: f64) -> f64 {
    if eps >= 0.0 {
        1.0
    } else {
        eps.cosh()
    }
}

/// Signed strengths of a three-wave fan.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WaveStrengths {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl WaveStrengths {
    pub fn get(&self, family: Family) -> f64 {
        match family {
            Family::One => self.eps1,
            Family::Two => self.eps2,
            Family::Three => self.eps3,
        }
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let hs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let deltas: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / hs[i]).collect();
    if n == 2 {
        return vec![deltas[0]; 2];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (d0, d1) = (deltas[i - 1], deltas[i]);
        let (h0, h1) = (hs[i - 1], hs[i]);
        let w1 = 2.0 * h1 + h0;
        let w2 = h1 + 2.0 * h0;
        d[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(hs[0], hs[1], deltas[0], deltas[1]);
    d[n - 1] = end(hs[n - 2], hs[n - 3], deltas[n - 2], deltas[n - 3]);
    d
}

fn pchip_eval(x: &[f64], y: &[f64], d: &[f64], t: f64) -> (f64, f64) {
    let i = match x.partition_point(|&xi| xi <= t) {
        0 => 0,
        k if k >= x.len() => x.len() - 2,
        k => k - 1,
    };
    let h = x[i + 1] - x[i];
    let s = (t - x[i]) / h;
    let (s2, s3) = (s * s, s * s * s);
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let val = h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let der = dh00 * y[i] + dh10 * d[i] + dh01 * y[i + 1] + dh11 * d[i + 1];
    (val, der)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PressureModel {
        // a ≡ 1 at λ = 0
        PressureModel::affine(1.0, 4.0).unwrap()
    }

    #[test]
    fn pressure_substitution() {
        let m = unit();
        assert_eq!(m.pressure(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(m.pressure(2.0, 1.0).unwrap(), 2.0);
        assert!(m.pressure(0.0, 0.5).is_err());
        assert!(m.pressure(1.0, 1.5).is_err());
    }

    #[test]
    fn pressure_volume_derivative_matches_finite_difference() {
        let m = unit();
        let (v, lam) = (1.3, 0.4);
        let hstep = 1e-5;
        let fd = (m.pressure(v + hstep, lam).unwrap() - m.pressure(v - hstep, lam).unwrap()) / (2.0 * hstep);
        let a2 = m.a(lam).powi(2);
        let exact = -a2 / (v * v);
        assert!(((fd - exact) / exact).abs() < 1e-6);
        assert!((m.pressure_derivatives(v, lam)[0] - exact).abs() < 1e-15);
    }

    #[test]
    fn sign_conditions_on_grid() {
        let m = unit();
        for i in 0..=20 {
            let lam = i as f64 / 20.0;
            for v in [0.1, 0.5, 1.0, 3.0, 10.0] {
                let [pv, pvv, pl, pvl] = m.pressure_derivatives(v, lam);
                assert!(pv < 0.0 && pvv > 0.0 && pl > 0.0 && pvl < 0.0);
            }
        }
    }

    #[test]
    fn eigenvalues_examples() {
        let m = unit();
        assert_eq!(m.eigenvalues(&State::new(1.0, 0.0, 0.0).unwrap()), [-1.0, 0.0, 1.0]);
        assert_eq!(m.eigenvalues(&State::new(2.0, 0.0, 0.0).unwrap()), [-0.5, 0.0, 0.5]);
    }

    #[test]
    fn h_values() {
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h(1.0), 1.0);
        assert!((h(-1.0) + 1.1752011936438014).abs() < 1e-15);
        assert_eq!(h_prime(0.0), 1.0);
        assert!((h_prime(-1e-9) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn curve_examples() {
        let m = unit();
        let base = State::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(m.curve_phi13(Family::One, 1.0, &base).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((m.curve_phi13(Family::One, e, &base).unwrap() - 1.0).abs() < 1e-15);
        let u3 = m.curve_phi13(Family::Three, e, &base).unwrap();
        let u3s = m.curve_phi13_by_strength(Family::Three, e, &base).unwrap();
        assert!((u3 + 2.0 * 0.5f64.sinh()).abs() < 1e-15);
        assert!((u3 - u3s).abs() < 1e-12);
        assert!((u3 + 1.04219).abs() < 1e-5);
        assert!(m.curve_phi13(Family::One, -1.0, &base).is_err());
    }

    #[test]
    fn contact_examples() {
        let m = unit();
        let base = State::new(1.0, 0.3, 0.0).unwrap();
        assert_eq!(m.curve_phi2(0.0, &base), base);
        let out = m.curve_phi2(1.0, &base);
        assert!((out.v - 4.0).abs() < 1e-15);
        assert_eq!(out.u, 0.3);
    }

    #[test]
    fn strengths_examples() {
        let m = PressureModel::affine(1.0, 9.0).unwrap();
        let s = State::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(m.strength_from_states(Family::One, &s, &s).unwrap(), 0.0);
        // a_l = 1, a_r = 3
        let r = m.curve_phi2(1.0, &s);
        assert!((m.strength_from_states(Family::Two, &s, &r).unwrap() - 1.0).abs() < 1e-15);
        let r1 = State { v: (2.0f64).exp(), u: m.curve_phi13(Family::One, 2.0f64.exp(), &s).unwrap(), lam: 0.0 };
        assert!((m.strength_from_states(Family::One, &s, &r1).unwrap() - 1.0).abs() < 1e-15);
        let off = State { u: r1.u + 1e-3, ..r1 };
        assert!(matches!(m.strength_from_states(Family::One, &s, &off), Err(Error::NotOnCurve { .. })));
    }

    #[test]
    fn table_law_validates_and_interpolates_monotonically() {
        assert!(PressureModel::table(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(PressureModel::table(vec![0.0, 0.5], vec![1.0, 2.0]).is_err());
        let m = PressureModel::table(vec![0.0, 0.3, 0.7, 1.0], vec![1.0, 1.1, 1.9, 2.0]).unwrap();
        let mut prev = m.a(0.0);
        for i in 1..=1000 {
            let x = i as f64 / 1000.0;
            let y = m.a(x);
            assert!(y > prev, "not increasing at {x}");
            prev = y;
        }
        assert!((m.a(0.3) - 1.1).abs() < 1e-15);
        assert!((m.a(1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip_through_law() {
        let m = unit();
        let text = serde_json::to_string(&m).unwrap();
        let back: PressureModel = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        let bad = r#"{"kind":"affine_square","k0":2.0,"k1":1.0}"#;
        assert!(serde_json::from_str::<PressureModel>(bad).is_err());
    }
}
