//! Explicit constants from the proofs, for reports that show a formula
//! constant next to the measured one.

use serde::{Deserialize, Serialize};

pub use crate::hajlasz::checks::zeta_constant;
pub use crate::hajlasz::lipschitz::{a1_constant, a2_constant};

/// `r' = 1/2 min{1/4, 1/2 exp(-C_log(1/gamma) Q^+ / s^-)}`.
pub fn r_prime(c_log_recip_gamma: f64, q_plus: f64, s_minus: f64) -> f64 {
    0.5 * 0.25f64.min(0.5 * libm::exp(-c_log_recip_gamma * q_plus / s_minus))
}

/// `eta = s^-/Q^+ - C_log(1/gamma) / log(1/(2 r'))`; positive by the choice of `r'`.
pub fn eta(c_log_recip_gamma: f64, q_plus: f64, s_minus: f64) -> f64 {
    let r = r_prime(c_log_recip_gamma, q_plus, s_minus);
    s_minus / q_plus - c_log_recip_gamma / libm::log(1.0 / (2.0 * r))
}

/// Inputs of the lower Ahlfors constant obtained from a global embedding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NecessityInputs {
    /// Embedding constant times the Lipschitz cut-off constant.
    pub c_product: f64,
    pub s_minus: f64,
    pub s_plus: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub c_log_s: f64,
    pub c_log_gamma: f64,
    pub c_log_recip_gamma: f64,
    pub c_log_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NecessityConstants {
    pub r_prime: f64,
    pub eta: f64,
    pub c1: f64,
    pub c2: f64,
    /// Valid for `r < r'`.
    pub b: f64,
    /// Valid for every `r <= 1`: `min{1, b (r'/2)^{Q^+}}`.
    pub b_all: f64,
}

pub fn necessity_constants(i: &NecessityInputs) -> NecessityConstants {
    let r_prime = r_prime(i.c_log_recip_gamma, i.q_plus, i.s_minus);
    let eta = eta(i.c_log_recip_gamma, i.q_plus, i.s_minus);
    let base = 1f64.max(i.c_product * libm::pow(4.0, i.s_plus));
    let c1 = 1.0
        / (libm::pow(base, 1.0 / eta)
            * libm::pow(2.0, i.s_plus / (i.gamma_minus * eta * eta) + i.s_plus / eta));
    let c2 = libm::pow(libm::exp(-i.c_log_s) * libm::pow(2.0, -i.s_plus), 1.0 / eta)
        * libm::pow(
            libm::exp(-i.c_log_gamma) * libm::pow(2.0, -i.gamma_plus),
            i.q_plus / (eta * i.gamma_minus * i.gamma_minus),
        );
    let b = c1 * c2 * libm::exp(-i.c_log_q) * libm::pow(2.0, i.q_minus - i.q_plus);
    let b_all = 1f64.min(b * libm::pow(r_prime / 2.0, i.q_plus));
    NecessityConstants { r_prime, eta, c1, c2, b, b_all }
}

/// `D_H = 2^{alpha^+ + 1} C_H (sigma delta / ((sigma - 1) r0))^{alpha^+}`.
pub fn holder_constant(c_h: f64, alpha_plus: f64, sigma: f64, delta: f64, r0: f64) -> f64 {
    libm::pow(2.0, alpha_plus + 1.0) * c_h * libm::pow(sigma * delta / ((sigma - 1.0) * r0), alpha_plus)
}

/// `kappa = 2^{1/gamma^-}`, the working quasi-triangle constant of `L^gamma`.
pub fn kappa(gamma_minus: f64) -> f64 {
    libm::pow(2.0, 1.0 / gamma_minus)
}

/// `max{2, (2/mu)^{1/t}}`, the median lemma factor.
pub fn median_factor(mass: f64, t_minus: f64) -> f64 {
    2f64.max(libm::pow(2.0 / mass, 1.0 / t_minus))
}
