//! First integrals and the Noether machinery for power Lagrangians.
//!
//! Generators act as `ξ(J)∂_J + η(J, T)∂_T` with the independent variable
//! `J` carried by `ξ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::PolarState;
use crate::systems::{real_pow, AngleFunction};

/// `½(r²θ̇)² + V(θ)`.
pub fn lrr_invariant(state: &PolarState, v: &AngleFunction) -> f64 {
    let l = state.angular_momentum();
    0.5 * l * l + v.value(state.theta)
}

/// `½(r²θ̇)² - θ`, conserved under `F_θ = r⁻³`.
pub fn mu3_invariant(state: &PolarState) -> f64 {
    let l = state.angular_momentum();
    0.5 * l * l - state.theta
}

fn nonzero_t(t: f64) -> Result<()> {
    if t == 0.0 || !t.is_finite() {
        Err(Error::Domain(format!("T must be finite and nonzero, got {t}")))
    } else {
        Ok(())
    }
}

/// `(JT' - T)² + J⁴/(2T⁴)`, conserved along `T'' = J²T⁻⁵`.
pub fn ef_integral_m5(j: f64, t: f64, tp: f64) -> Result<f64> {
    nonzero_t(t)?;
    let a = j * tp - t;
    Ok(a * a + j.powi(4) / (2.0 * t.powi(4)))
}

/// The coefficient for which [`ef_integral_m7`] is conserved.
pub const M7_COEFF: f64 = 1.0 / 3.0;

/// `T'(JT' - T) + c·J³/T⁶`. Conserved along `T'' = J²T⁻⁷` only for `c = 1/3`.
pub fn ef_integral_m7(j: f64, t: f64, tp: f64, c: f64) -> Result<f64> {
    nonzero_t(t)?;
    Ok(tp * (j * tp - t) + c * j.powi(3) / t.powi(6))
}

/// `½(T'J - T)² + d·J^{n+2}T^{m+1}/(m+1)`; conserved along `T'' = -d·JⁿT^m` when `n + m = -3`.
pub fn prop31_integral(j: f64, t: f64, tp: f64, n: f64, m: f64, d: f64) -> Result<f64> {
    if m == -1.0 {
        return Err(Error::Argument("m = -1 divides by zero".into()));
    }
    if m + 1.0 < 0.0 {
        nonzero_t(t)?;
    }
    let a = tp * j - t;
    Ok(0.5 * a * a + d * real_pow(j, n + 2.0) * real_pow(t, m + 1.0) / (m + 1.0))
}

/// `L = T'² + k·(2/(m+1))·JⁿT^{m+1}` with coupling `k`.
///
/// The Euler–Lagrange equation is `T'' = k·JⁿT^m`; `k = 1` gives the
/// Emden–Fowler equation and `k = 0` the free Lagrangian `T'²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLagrangian {
    pub n: f64,
    pub m: f64,
    #[serde(default = "unit")]
    pub coupling: f64,
}

fn unit() -> f64 {
    1.0
}

impl PowerLagrangian {
    pub fn new(n: f64, m: f64) -> Result<Self> {
        if m == -1.0 {
            return Err(Error::Argument("m = -1 divides by zero".into()));
        }
        if !(n.is_finite() && m.is_finite()) {
            return Err(Error::Argument("exponents must be finite".into()));
        }
        Ok(Self { n, m, coupling: 1.0 })
    }

    /// `L = T'²`.
    pub fn free() -> Self {
        Self {
            n: 0.0,
            m: 0.0,
            coupling: 0.0,
        }
    }

    fn potential(&self, j: f64, t: f64) -> f64 {
        if self.coupling == 0.0 {
            return 0.0;
        }
        self.coupling * 2.0 / (self.m + 1.0) * real_pow(j, self.n) * real_pow(t, self.m + 1.0)
    }

    pub fn value(&self, j: f64, t: f64, tp: f64) -> f64 {
        tp * tp + self.potential(j, t)
    }

    /// `∂L/∂J`
    pub fn l_j(&self, j: f64, t: f64) -> f64 {
        if self.coupling == 0.0 || self.n == 0.0 {
            return 0.0;
        }
        self.coupling * 2.0 * self.n / (self.m + 1.0) * real_pow(j, self.n - 1.0) * real_pow(t, self.m + 1.0)
    }

    /// `∂L/∂T`
    pub fn l_t(&self, j: f64, t: f64) -> f64 {
        if self.coupling == 0.0 {
            return 0.0;
        }
        self.coupling * 2.0 * real_pow(j, self.n) * real_pow(t, self.m)
    }

    /// `∂L/∂T'`
    pub fn l_tp(&self, tp: f64) -> f64 {
        2.0 * tp
    }

    /// Euler–Lagrange expression `d/dJ(∂L/∂T') - ∂L/∂T` for a given `T''`.
    pub fn euler_lagrange(&self, j: f64, t: f64, tpp: f64) -> f64 {
        2.0 * tpp - self.l_t(j, t)
    }
}

/// Generator `ξ∂_J + η∂_T` with gauge function `V`:
/// `ξ = a₀ + a₁J + a₂J²`, `η = (b₀ + b₁J)T`, `V = cT² + c₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub xi: [f64; 3],
    pub eta: [f64; 2],
    #[serde(default)]
    pub gauge: [f64; 2],
}

impl GeneratorSpec {
    pub fn new(xi: [f64; 3], eta: [f64; 2], gauge: [f64; 2]) -> Self {
        Self { xi, eta, gauge }
    }

    /// `J∂_J + ⅔T∂_T`, no gauge.
    pub fn g1() -> Self {
        Self::new([0.0, 1.0, 0.0], [2.0 / 3.0, 0.0], [0.0, 0.0])
    }

    /// `J²∂_J + JT∂_T` with gauge `V = T²`.
    pub fn g2() -> Self {
        Self::new([0.0, 0.0, 1.0], [0.0, 1.0], [1.0, 0.0])
    }

    /// `J∂_J + ½T∂_T`, no gauge.
    pub fn half_scaling() -> Self {
        Self::new([0.0, 1.0, 0.0], [0.5, 0.0], [0.0, 0.0])
    }

    /// `λJ∂_J - T∂_T`.
    pub fn g3_tilde(lambda: f64) -> Self {
        Self::new([0.0, lambda, 0.0], [-1.0, 0.0], [0.0, 0.0])
    }

    /// Looks up a named preset (`g1`, `g2`, `half`).
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "g1" => Ok(Self::g1()),
            "g2" => Ok(Self::g2()),
            "half" | "half_scaling" => Ok(Self::half_scaling()),
            other => Err(Error::Argument(format!("unknown generator preset '{other}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .xi
            .iter()
            .chain(&self.eta)
            .chain(&self.gauge)
            .all(|c| c.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Argument("generator coefficients must be finite".into()))
        }
    }

    pub fn xi(&self, j: f64) -> f64 {
        let [a0, a1, a2] = self.xi;
        a0 + j * (a1 + j * a2)
    }

    pub fn xi_j(&self, j: f64) -> f64 {
        self.xi[1] + 2.0 * self.xi[2] * j
    }

    pub fn eta(&self, j: f64, t: f64) -> f64 {
        (self.eta[0] + self.eta[1] * j) * t
    }

    pub fn eta_j(&self, t: f64) -> f64 {
        self.eta[1] * t
    }

    pub fn eta_t(&self, j: f64) -> f64 {
        self.eta[0] + self.eta[1] * j
    }

    /// First prolongation coefficient `η_J + (η_T - ξ_J)T'`.
    pub fn eta_hat(&self, j: f64, t: f64, tp: f64) -> f64 {
        self.eta_j(t) + (self.eta_t(j) - self.xi_j(j)) * tp
    }

    pub fn gauge(&self, t: f64) -> f64 {
        self.gauge[0] * t * t + self.gauge[1]
    }

    /// Total derivative `V_J + V_T·T'` of the gauge function.
    pub fn gauge_total_derivative(&self, t: f64, tp: f64) -> f64 {
        2.0 * self.gauge[0] * t * tp
    }
}

/// Noether condition `ξL_J + ηL_T + η̂L_{T'} + Lξ_J - DV` at each grid point.
pub fn noether_residual(l: &PowerLagrangian, g: &GeneratorSpec, grid: &[(f64, f64, f64)]) -> Result<Vec<f64>> {
    g.validate()?;
    grid.iter()
        .map(|&(j, t, tp)| {
            if l.coupling != 0.0 && (l.m < 0.0 || l.m.fract() != 0.0) {
                nonzero_t(t)?;
            }
            Ok(g.xi(j) * l.l_j(j, t)
                + g.eta(j, t) * l.l_t(j, t)
                + g.eta_hat(j, t, tp) * l.l_tp(tp)
                + l.value(j, t, tp) * g.xi_j(j)
                - g.gauge_total_derivative(t, tp))
        })
        .collect()
}

/// A 5×5×5 grid over `J ∈ [0.5, 2.5]`, `T ∈ [0.5, 2.5]`, `T' ∈ [-1, 1]`.
pub fn default_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::with_capacity(125);
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                grid.push((0.5 + 0.5 * a as f64, 0.5 + 0.5 * b as f64, -1.0 + 0.5 * c as f64));
            }
        }
    }
    grid
}

/// Tolerance on the Noether residual, relative to the size of the terms.
pub const NOETHER_TOL: f64 = 1e-10;

/// Closed-form first integral `I = V - ξL - (η - T'ξ)·∂L/∂T'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoetherIntegral {
    pub lagrangian: PowerLagrangian,
    pub generator: GeneratorSpec,
    /// Whether the Noether condition held on the check grid.
    pub noetherian: bool,
    pub max_residual: f64,
    pub warning: Option<String>,
}

impl NoetherIntegral {
    pub fn eval(&self, j: f64, t: f64, tp: f64) -> f64 {
        let (l, g) = (&self.lagrangian, &self.generator);
        let xi = g.xi(j);
        g.gauge(t) - xi * l.value(j, t, tp) - (g.eta(j, t) - tp * xi) * l.l_tp(tp)
    }
}

/// Builds the integral of `(l, g)` and checks the Noether condition on
/// [`default_grid`]; a failed check is flagged, not an error.
pub fn noether_integral(l: &PowerLagrangian, g: &GeneratorSpec) -> Result<NoetherIntegral> {
    let res = noether_residual(l, g, &default_grid())?;
    let max_residual = res.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let noetherian = max_residual <= NOETHER_TOL;
    let warning = (!noetherian).then(|| {
        format!("generator is not a Noether symmetry of this Lagrangian (max residual {max_residual:.3e}); the integral is not conserved")
    });
    Ok(NoetherIntegral {
        lagrangian: *l,
        generator: *g,
        noetherian,
        max_residual,
        warning,
    })
}

/// Invariants of the prolonged `λJ∂_J - T∂_T` and the generator's action on them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbelInvariants {
    pub w: f64,
    pub u: f64,
    pub xw: f64,
    pub xu: f64,
}

/// `w = J^{1/λ}T`, `u = J^{(λ+1)/λ}T'` and `X(w)`, `X(u)` at each sample.
pub fn abel_invariant_check(lambda: f64, samples: &[(f64, f64, f64)]) -> Result<Vec<AbelInvariants>> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Argument("lambda must be finite and nonzero".into()));
    }
    let g = GeneratorSpec::g3_tilde(lambda);
    let p = 1.0 / lambda;
    let q = (lambda + 1.0) / lambda;
    samples
        .iter()
        .map(|&(j, t, tp)| {
            if !(j > 0.0) {
                return Err(Error::Domain(format!("J must be positive, got {j}")));
            }
            let w = j.powf(p) * t;
            let u = j.powf(q) * tp;
            let eta_hat = g.eta_hat(j, t, tp);
            let xw = g.xi(j) * p * j.powf(p - 1.0) * t + g.eta(j, t) * j.powf(p);
            let xu = g.xi(j) * q * j.powf(q - 1.0) * tp + eta_hat * j.powf(q);
            Ok(AbelInvariants { w, u, xw, xu })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn state(r: f64, theta: f64, thetadot: f64) -> PolarState {
        PolarState::new(0.0, r, theta, 0.0, thetadot).unwrap()
    }

    #[test]
    fn lrr_hand_values() {
        let v = AngleFunction::cos();
        assert!(lrr_invariant(&state(1.0, FRAC_PI_2, 0.0), &v).abs() < 1e-16);
        assert_eq!(lrr_invariant(&state(1.0, 0.0, 1.0), &v), 1.5);
    }

    #[test]
    fn mu3_hand_values() {
        assert_eq!(mu3_invariant(&state(1.0, 0.0, 0.0)), 0.0);
        assert_eq!(mu3_invariant(&state(2.0, 1.0, 0.25)), -0.5);
    }

    #[test]
    fn ef_integral_hand_values() {
        assert_eq!(ef_integral_m5(0.0, 2.0, 5.0).unwrap(), 4.0);
        assert_eq!(ef_integral_m5(1.0, 1.0, 1.0).unwrap(), 0.5);
        assert!(ef_integral_m5(1.0, 0.0, 1.0).is_err());
        assert_eq!(ef_integral_m7(0.0, 1.0, 2.0, M7_COEFF).unwrap(), -2.0);
        assert!((ef_integral_m7(1.0, 1.0, 0.0, M7_COEFF).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!(ef_integral_m7(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn prop31_hand_value() {
        assert_eq!(prop31_integral(1.0, 1.0, 1.0, 2.0, -5.0, -1.0).unwrap(), 0.25);
        assert!(prop31_integral(1.0, 1.0, 1.0, 2.0, -1.0, -1.0).is_err());
    }

    #[test]
    fn g2_is_noetherian_for_m5() {
        let l = PowerLagrangian::new(2.0, -5.0).unwrap();
        let res = noether_residual(&l, &GeneratorSpec::g2(), &default_grid()).unwrap();
        assert!(res.iter().all(|r| r.abs() <= 1e-14));
        let integral = noether_integral(&l, &GeneratorSpec::g2()).unwrap();
        assert!(integral.noetherian && integral.warning.is_none());
        for (j, t, tp) in default_grid() {
            let expected = ef_integral_m5(j, t, tp).unwrap();
            assert!((integral.eval(j, t, tp) - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn g1_is_lie_but_not_noether() {
        let l = PowerLagrangian::new(2.0, -5.0).unwrap();
        let res = noether_residual(&l, &GeneratorSpec::g1(), &[(1.0, 1.0, 0.0), (1.3, 0.7, 0.4)]).unwrap();
        assert!((res[0] + 1.0 / 6.0).abs() < 1e-15);
        let (_, t, tp) = (1.3, 0.7f64, 0.4f64);
        let expected = tp * tp / 3.0 - 1.3f64.powi(2) / (6.0 * t.powi(4));
        assert!((res[1] - expected).abs() < 1e-13);
        let integral = noether_integral(&l, &GeneratorSpec::g1()).unwrap();
        assert!(!integral.noetherian);
        assert!(integral.warning.is_some());
    }

    #[test]
    fn half_scaling_gives_third_coefficient_for_m7() {
        let l = PowerLagrangian::new(2.0, -7.0).unwrap();
        let g = GeneratorSpec::half_scaling();
        let res = noether_residual(&l, &g, &default_grid()).unwrap();
        assert!(res.iter().all(|r| r.abs() <= 1e-13));
        let integral = noether_integral(&l, &g).unwrap();
        assert!(integral.noetherian);
        for (j, t, tp) in default_grid() {
            let expected = ef_integral_m7(j, t, tp, M7_COEFF).unwrap();
            assert!((integral.eval(j, t, tp) - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn free_lagrangian() {
        let l = PowerLagrangian::free();
        // pure J-scaling is not a Noether symmetry of T'²; the integral J·T'² drifts
        let plain = noether_integral(&l, &GeneratorSpec::new([0.0, 1.0, 0.0], [0.0, 0.0], [0.0, 0.0])).unwrap();
        assert!(!plain.noetherian);
        assert_eq!(plain.eval(2.0, 5.0, 3.0), 18.0);
        let half = noether_integral(&l, &GeneratorSpec::half_scaling()).unwrap();
        assert!(half.noetherian);
        // T = 1 + 2J: J·T'² - T·T' = 4J - 2(1 + 2J) = -2 for all J
        for j in [0.0, 1.0, 7.5] {
            assert!((half.eval(j, 1.0 + 2.0 * j, 2.0) + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn abel_hand_values() {
        let out = abel_invariant_check(1.0, &[(2.0, 3.0, 1.0)]).unwrap();
        assert_eq!((out[0].w, out[0].u), (6.0, 4.0));
        assert!(out[0].xw.abs() < 1e-14 && out[0].xu.abs() < 1e-14);
        let out = abel_invariant_check(-1.0, &[(3.0, 2.0, 0.7)]).unwrap();
        assert_eq!(out[0].u, 0.7);
        assert!(abel_invariant_check(0.0, &[(1.0, 1.0, 1.0)]).is_err());
        assert!(abel_invariant_check(1.0, &[(0.0, 1.0, 1.0)]).is_err());
    }

    #[test]
    fn rejects_singular_exponent() {
        assert!(PowerLagrangian::new(2.0, -1.0).is_err());
        assert!(GeneratorSpec::preset("nope").is_err());
    }

    proptest! {
        #[test]
        fn prop31_is_half_m5(j in 0.1f64..3.0, t in 0.2f64..3.0, tp in -2.0f64..2.0) {
            let a = prop31_integral(j, t, tp, 2.0, -5.0, -1.0).unwrap();
            let b = ef_integral_m5(j, t, tp).unwrap();
            prop_assert!((a - 0.5 * b).abs() <= 1e-12 * b.abs().max(1.0));
        }

        #[test]
        fn lagrangian_partials_match_differences(
            n in 0.0f64..3.0, m in -6.0f64..2.0, j in 0.5f64..2.0, t in 0.5f64..2.0, tp in -1.0f64..1.0,
        ) {
            prop_assume!((m + 1.0).abs() > 0.2);
            let l = PowerLagrangian::new(n, m).unwrap();
            let h = 1e-6;
            let fd_j = (l.value(j + h, t, tp) - l.value(j - h, t, tp)) / (2.0 * h);
            let fd_t = (l.value(j, t + h, tp) - l.value(j, t - h, tp)) / (2.0 * h);
            let fd_tp = (l.value(j, t, tp + h) - l.value(j, t, tp - h)) / (2.0 * h);
            let scale = 1.0 + l.value(j, t, tp).abs() * 10.0;
            prop_assert!((fd_j - l.l_j(j, t)).abs() < 1e-6 * scale);
            prop_assert!((fd_t - l.l_t(j, t)).abs() < 1e-6 * scale);
            prop_assert!((fd_tp - l.l_tp(tp)).abs() < 1e-6 * scale);
            // Euler–Lagrange vanishes exactly on T'' = JⁿT^m
            let tpp = j.powf(n) * t.powf(m);
            prop_assert!(l.euler_lagrange(j, t, tpp).abs() <= 1e-12 * tpp.abs().max(1.0));
        }

        #[test]
        fn abel_invariants_annihilated(
            lambda in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0],
            j in 0.2f64..3.0, t in -2.0f64..2.0, tp in -2.0f64..2.0,
        ) {
            let out = abel_invariant_check(lambda, &[(j, t, tp)]).unwrap()[0];
            let scale = out.w.abs().max(out.u.abs()).max(1.0) * (1.0 + lambda.abs());
            prop_assert!(out.xw.abs() <= 1e-14 * scale * 4.0);
            prop_assert!(out.xu.abs() <= 1e-14 * scale * 4.0);
        }
    }
}
