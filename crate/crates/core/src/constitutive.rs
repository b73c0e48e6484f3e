//! Pressure and internal-energy laws, the Newtonian stress tensor and the
//! constants of the linearization around `(ρ, θ) = (1, T₀)`.

use serde::{Deserialize, Serialize};

use crate::error::{NsfError, Result};
use crate::grid::{Face, Patch};

pub type Mat3 = [[f64; 3]; 3];

/// `π(ρ, θ)` with its first partial derivatives.
pub trait PressureLaw: Send + Sync + std::fmt::Debug {
    fn pressure(&self, rho: f64, theta: f64) -> f64;
    fn d_rho(&self, rho: f64, theta: f64) -> f64;
    fn d_theta(&self, rho: f64, theta: f64) -> f64;
}

/// The part `e_π` of the internal energy `e = e_π + θ` (unit specific heat).
pub trait EnergyLaw: Send + Sync + std::fmt::Debug {
    fn e_pi(&self, rho: f64, theta: f64) -> f64;
    fn d_rho(&self, rho: f64, theta: f64) -> f64;
    fn d_theta(&self, rho: f64, theta: f64) -> f64;
}

/// `π = p₀ ρ θ / T₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGas {
    pub p0: f64,
    pub t0: f64,
}

impl PressureLaw for IdealGas {
    fn pressure(&self, rho: f64, theta: f64) -> f64 {
        self.p0 * rho * theta / self.t0
    }
    fn d_rho(&self, _rho: f64, theta: f64) -> f64 {
        self.p0 * theta / self.t0
    }
    fn d_theta(&self, rho: f64, _theta: f64) -> f64 {
        self.p0 * rho / self.t0
    }
}

/// `e_π ≡ 0`, the Maxwell-consistent partner of [`IdealGas`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoPotentialEnergy;

impl EnergyLaw for NoPotentialEnergy {
    fn e_pi(&self, _rho: f64, _theta: f64) -> f64 {
        0.0
    }
    fn d_rho(&self, _rho: f64, _theta: f64) -> f64 {
        0.0
    }
    fn d_theta(&self, _rho: f64, _theta: f64) -> f64 {
        0.0
    }
}

/// Ideal gas with a cohesion term and a quadratic thermal correction:
/// `π = p₀ρθ/T₀ + a(ρ² − 1) + bρθ²`.
///
/// The Maxwell relation fixes `e_π` up to a function of `θ`; the partner
/// energy is `e_π = a(ρ + 1/ρ − 2) − bθ² ln ρ + c(θ − T₀)`, so `e₂ = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectedGas {
    pub p0: f64,
    pub t0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PressureLaw for CorrectedGas {
    fn pressure(&self, rho: f64, theta: f64) -> f64 {
        self.p0 * rho * theta / self.t0 + self.a * (rho * rho - 1.0) + self.b * rho * theta * theta
    }
    fn d_rho(&self, rho: f64, theta: f64) -> f64 {
        self.p0 * theta / self.t0 + 2.0 * self.a * rho + self.b * theta * theta
    }
    fn d_theta(&self, rho: f64, theta: f64) -> f64 {
        self.p0 * rho / self.t0 + 2.0 * self.b * rho * theta
    }
}

impl EnergyLaw for CorrectedGas {
    fn e_pi(&self, rho: f64, theta: f64) -> f64 {
        self.a * (rho + 1.0 / rho - 2.0) - self.b * theta * theta * rho.ln() + self.c * (theta - self.t0)
    }
    fn d_rho(&self, rho: f64, theta: f64) -> f64 {
        self.a * (1.0 - 1.0 / (rho * rho)) - self.b * theta * theta / rho
    }
    fn d_theta(&self, rho: f64, theta: f64) -> f64 {
        -2.0 * self.b * theta * rho.ln() + self.c
    }
}

/// Admissible states for constitutive evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateBox {
    pub rho_min: f64,
    pub rho_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl StateBox {
    pub fn around(t0: f64) -> Self {
        Self { rho_min: 0.5, rho_max: 1.5, theta_min: 0.5 * t0, theta_max: 2.0 * t0 }
    }

    pub fn contains(&self, rho: f64, theta: f64) -> bool {
        (self.rho_min..=self.rho_max).contains(&rho) && (self.theta_min..=self.theta_max).contains(&theta)
    }
}

/// Values of the laws and their derivatives at the reference state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConstants {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub e1: f64,
    pub e2: f64,
}

/// Coefficients of the linear system: `r₀ ∂₁η + r₁ div u` in the energy row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizationConstants {
    pub p1: f64,
    pub p2: f64,
    pub e2: f64,
    pub r0: f64,
    pub r1: f64,
}

/// A validated pair of laws with the reference temperature.
#[derive(Debug)]
pub struct Thermo {
    pressure: Box<dyn PressureLaw>,
    energy: Box<dyn EnergyLaw>,
    t0: f64,
    state_box: StateBox,
}

/// Maximum tolerated Maxwell-relation residual on the state box.
pub const MAXWELL_TOL: f64 = 1e-8;

impl Thermo {
    pub fn new(pressure: Box<dyn PressureLaw>, energy: Box<dyn EnergyLaw>, t0: f64) -> Result<Self> {
        if !(t0 > 0.0) {
            return Err(NsfError::InvalidParameter(format!("T0 must be positive, got {t0}")));
        }
        let th = Self { pressure, energy, t0, state_box: StateBox::around(t0) };
        let r = th.reference();
        for (name, v) in [("p0", r.p0), ("p1", r.p1), ("p2", r.p2)] {
            if !(v > 0.0) {
                return Err(NsfError::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        let res = th.maxwell_residual(9);
        if res > MAXWELL_TOL {
            return Err(NsfError::InvalidParameter(format!("Maxwell relation violated (residual {res:.3e})")));
        }
        Ok(th)
    }

    pub fn ideal_gas_defaults(p0: f64, t0: f64) -> Result<Self> {
        if !(p0 > 0.0) {
            return Err(NsfError::InvalidParameter(format!("p0 must be positive, got {p0}")));
        }
        Self::new(Box::new(IdealGas { p0, t0 }), Box::new(NoPotentialEnergy), t0)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn state_box(&self) -> StateBox {
        self.state_box
    }

    pub fn pressure_law(&self) -> &dyn PressureLaw {
        self.pressure.as_ref()
    }

    pub fn energy_law(&self) -> &dyn EnergyLaw {
        self.energy.as_ref()
    }

    pub fn pressure(&self, rho: f64, theta: f64) -> f64 {
        self.pressure.pressure(rho, theta)
    }

    pub fn dp_drho(&self, rho: f64, theta: f64) -> f64 {
        self.pressure.d_rho(rho, theta)
    }

    pub fn dp_dtheta(&self, rho: f64, theta: f64) -> f64 {
        self.pressure.d_theta(rho, theta)
    }

    /// `∂_θ e = c_v + ∂_θ e_π` with `c_v = 1`.
    pub fn de_dtheta(&self, rho: f64, theta: f64) -> f64 {
        1.0 + self.energy.d_theta(rho, theta)
    }

    pub fn reference(&self) -> ReferenceConstants {
        let t0 = self.t0;
        ReferenceConstants {
            p0: self.pressure.pressure(1.0, t0),
            p1: self.pressure.d_rho(1.0, t0),
            p2: self.pressure.d_theta(1.0, t0),
            e1: self.energy.d_rho(1.0, t0),
            e2: self.energy.d_theta(1.0, t0),
        }
    }

    pub fn linearization(&self) -> LinearizationConstants {
        let r = self.reference();
        LinearizationConstants { p1: r.p1, p2: r.p2, e2: r.e2, r0: 1.0 + r.e2, r1: self.t0 * r.p2 }
    }

    /// Largest `|∂_ρ e_π − (π − θ ∂_θ π)/ρ²|` over an `n × n` sample of the state box.
    pub fn maxwell_residual(&self, n: usize) -> f64 {
        let b = self.state_box;
        let mut worst = 0.0f64;
        for i in 0..n {
            let rho = b.rho_min + (b.rho_max - b.rho_min) * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let th = b.theta_min + (b.theta_max - b.theta_min) * j as f64 / (n - 1) as f64;
                let rhs = (self.pressure.pressure(rho, th) - th * self.pressure.d_theta(rho, th)) / (rho * rho);
                worst = worst.max((self.energy.d_rho(rho, th) - rhs).abs());
            }
        }
        worst
    }

    pub fn check_state(&self, node: usize, rho: f64, theta: f64) -> Result<()> {
        if self.state_box.contains(rho, theta) {
            Ok(())
        } else {
            Err(NsfError::OutsideStateBox { node, rho, theta })
        }
    }
}

/// Viscosities, conductivity, friction and heat exchange.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub l_wall: f64,
    pub t0: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self { mu: 1.0, lambda: 0.0, kappa: 50.0, alpha: 10.0, l_wall: 50.0, t0: 1.0 }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [("mu", self.mu), ("kappa", self.kappa), ("alpha", self.alpha), ("T0", self.t0)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(NsfError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("lambda", self.lambda), ("L_wall", self.l_wall)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(NsfError::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// `γ = p₁ / (λ + 4μ/3)`.
    pub fn gamma(&self, p1: f64) -> f64 {
        p1 / (self.lambda + 4.0 * self.mu / 3.0)
    }

    /// Heat-exchange coefficient of a face: `L` on walls, zero on Γ_in and Γ_out.
    pub fn heat_exchange(&self, face: Face) -> f64 {
        match face.patch() {
            Patch::Wall => self.l_wall,
            _ => 0.0,
        }
    }
}

/// `S = μ(∇v + ∇ᵀv − ⅔ div v I) + λ div v I`; `grad[c][a] = ∂_a v_c`.
pub fn stress_tensor(grad: &Mat3, dim: usize, mu: f64, lambda: f64) -> Mat3 {
    let div: f64 = (0..dim).map(|a| grad[a][a]).sum();
    let mut s = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            s[i][j] = mu * (grad[i][j] + grad[j][i]);
        }
        s[i][i] += (lambda - 2.0 * mu / 3.0) * div;
    }
    s
}

/// `S(∇v) : ∇v`.
pub fn dissipation(grad: &Mat3, dim: usize, mu: f64, lambda: f64) -> f64 {
    let s = stress_tensor(grad, dim, mu, lambda);
    let mut acc = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            acc += s[i][j] * grad[i][j];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn stress_examples() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
        let s = stress_tensor(&id, 2, 1.0, 0.0);
        assert!(close(s[0][0], 2.0 / 3.0, 1e-15) && close(s[1][1], 2.0 / 3.0, 1e-15) && s[0][1] == 0.0);
        let skew = [[0.0, 2.0, 0.0], [-2.0, 0.0, 0.0], [0.0; 3]];
        assert!(stress_tensor(&skew, 2, 1.0, 0.5).iter().flatten().all(|v| *v == 0.0));
        let diag = [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]];
        let s = stress_tensor(&diag, 3, 1.0, 1.0);
        assert!(close(s[0][0], 4.0, 1e-14) && close(s[1][1], 6.0, 1e-14) && close(s[2][2], 8.0, 1e-14));
    }

    #[test]
    fn ideal_gas_constants() {
        let th = Thermo::ideal_gas_defaults(1.0, 1.0).unwrap();
        let r = th.reference();
        assert_eq!((r.p1, r.p2, r.e2), (1.0, 1.0, 0.0));
        let lin = th.linearization();
        assert_eq!((lin.r0, lin.r1), (1.0, 1.0));
        let th = Thermo::ideal_gas_defaults(2.0, 4.0).unwrap();
        assert!(close(th.reference().p2, 0.5, 1e-15));
        assert_eq!(th.maxwell_residual(11), 0.0);
    }

    #[test]
    fn linearization_formulas() {
        // e2 = 0.5, T0 = 2, p2 = 3 via a corrected gas with p0/T0 = 3 - 2 b T0
        let law = CorrectedGas { p0: 2.0, t0: 2.0, a: 0.0, b: 0.5, c: 0.5 };
        let th = Thermo::new(Box::new(law), Box::new(law), 2.0).unwrap();
        let lin = th.linearization();
        assert!(close(lin.p2, 3.0, 1e-14));
        assert!(close(lin.r0, 1.5, 1e-14) && close(lin.r1, 6.0, 1e-14));
    }

    #[test]
    fn nonpositive_p2_is_rejected() {
        let law = CorrectedGas { p0: 1.0, t0: 1.0, a: 0.0, b: -1.0, c: 0.0 };
        assert!(Thermo::new(Box::new(law), Box::new(law), 1.0).is_err());
    }

    #[test]
    fn inconsistent_energy_is_rejected() {
        let law = CorrectedGas { p0: 1.0, t0: 1.0, a: 0.3, b: 0.0, c: 0.0 };
        assert!(Thermo::new(Box::new(law), Box::new(NoPotentialEnergy), 1.0).is_err());
    }

    fn probe_laws() -> Vec<Thermo> {
        let corr = CorrectedGas { p0: 1.3, t0: 1.7, a: 0.2, b: 0.05, c: 0.3 };
        vec![
            Thermo::ideal_gas_defaults(1.0, 1.0).unwrap(),
            Thermo::ideal_gas_defaults(2.0, 4.0).unwrap(),
            Thermo::new(Box::new(corr), Box::new(corr), 1.7).unwrap(),
        ]
    }

    #[test]
    fn partials_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1729);
        for th in probe_laws() {
            let b = th.state_box();
            for _ in 0..100 {
                let rho = rng.gen_range(b.rho_min + 0.01..b.rho_max - 0.01);
                let t = rng.gen_range(b.theta_min + 0.01..b.theta_max - 0.01);
                let h = 1e-5;
                let p = th.pressure_law();
                let fd_r = (p.pressure(rho + h, t) - p.pressure(rho - h, t)) / (2.0 * h);
                let fd_t = (p.pressure(rho, t + h) - p.pressure(rho, t - h)) / (2.0 * h);
                assert!(close(p.d_rho(rho, t), fd_r, 1e-6));
                assert!(close(p.d_theta(rho, t), fd_t, 1e-6));
                let e = th.energy_law();
                let fe_r = (e.e_pi(rho + h, t) - e.e_pi(rho - h, t)) / (2.0 * h);
                let fe_t = (e.e_pi(rho, t + h) - e.e_pi(rho, t - h)) / (2.0 * h);
                assert!(close(e.d_rho(rho, t), fe_r, 1e-6));
                assert!(close(e.d_theta(rho, t), fe_t, 1e-6));
            }
            assert!(th.maxwell_residual(21) <= MAXWELL_TOL);
        }
    }

    proptest! {
        #[test]
        fn stress_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0,
                            m in proptest::array::uniform9(-1.0f64..1.0),
                            n in proptest::array::uniform9(-1.0f64..1.0)) {
            let ma = [[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]];
            let mb = [[n[0], n[1], n[2]], [n[3], n[4], n[5]], [n[6], n[7], n[8]]];
            let mut mix = [[0.0; 3]; 3];
            for i in 0..3 { for j in 0..3 { mix[i][j] = a * ma[i][j] + b * mb[i][j]; } }
            let s = stress_tensor(&mix, 3, 1.3, 0.4);
            let sa = stress_tensor(&ma, 3, 1.3, 0.4);
            let sb = stress_tensor(&mb, 3, 1.3, 0.4);
            for i in 0..3 { for j in 0..3 {
                prop_assert!((s[i][j] - a * sa[i][j] - b * sb[i][j]).abs() < 1e-12);
                prop_assert!((s[i][j] - s[j][i]).abs() < 1e-12);
            } }
        }
    }
}
