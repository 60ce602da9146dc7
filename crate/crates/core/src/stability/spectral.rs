use serde::{Deserialize, Serialize};

use super::StabilityError;
use crate::linalg::{dist2_tau, hermitian_eigen, identity, op_norm, CMat};

/// The constant `1 + 1/√2` in the sign-rounding bound.
pub const SIGN_ROUND_CONSTANT: f64 = 1.0 + std::f64::consts::FRAC_1_SQRT_2;

const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignRoundReport {
    /// Eigenvalues with `Re λ = 0` (within 1e-12), resolved to +1.
    pub ties: usize,
    /// `‖V − U‖²_τ`.
    pub lhs: f64,
    /// `(1 + 1/√2)² ‖U² − Id‖²_τ`.
    pub rhs: f64,
}

/// `V = sgn Re(U)` through the spectral decomposition of a normal `U`.
///
/// For normal `U = Σ λ P_λ`, the Hermitian part `(U + U*)/2 = Σ Re(λ) P_λ` shares the
/// eigenprojections, so `V` is the sign of the Hermitian part.
pub fn sign_round(u: &CMat) -> (CMat, SignRoundReport) {
    let d = u.nrows();
    let (vals, vecs) = hermitian_eigen(&(u + u.adjoint()).scale(0.5));
    let mut ties = 0;
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let s = if l.abs() <= TIE_TOL {
            ties += 1;
            1.0
        } else {
            l.signum()
        };
        for z in scaled.column_mut(j).iter_mut() {
            *z *= s;
        }
    }
    let v = scaled * vecs.adjoint();
    // symmetrize so that V = V* holds to machine precision
    let v = (&v + v.adjoint()).scale(0.5);
    let lhs = dist2_tau(&v, u);
    let rhs = SIGN_ROUND_CONSTANT.powi(2) * dist2_tau(&(u * u), &identity(d));
    (v, SignRoundReport { ties, lhs, rhs })
}

fn butterfly(items: &mut [CMat]) {
    let n = items.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let a = items[j].clone();
                let b = items[j + h].clone();
                items[j] = &a + &b;
                items[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Products `U_x = Π_i U_i^{x_i}` for every `x ∈ Z_2^k` (bit `i` of `x` selects generator `i`).
fn group_elements(gens: &[CMat]) -> Vec<CMat> {
    let d = gens.first().map_or(1, |g| g.nrows());
    let mut out = vec![identity(d)];
    for g in gens {
        let next: Vec<CMat> = out.iter().map(|u| u * g).collect();
        out.extend(next);
    }
    out
}

/// `P_u = E_x (−1)^{u·x} U_x`, computed by a Walsh-Hadamard butterfly over the `2^k` products.
pub fn pvm_from_commuting_involutions(gens: &[CMat]) -> Result<Vec<CMat>, StabilityError> {
    if gens.len() > 12 {
        return Err(StabilityError::Budget(format!("{} generators exceed 12", gens.len())));
    }
    let d = gens.first().map_or(1, |g| g.nrows());
    let mut residual = 0.0f64;
    for (i, a) in gens.iter().enumerate() {
        if a.nrows() != d || a.ncols() != d {
            return Err(StabilityError::DimensionMismatch { expected: d, found: a.nrows() });
        }
        residual = residual.max(op_norm(&(a * a - identity(d))));
        for b in &gens[i + 1..] {
            residual = residual.max(op_norm(&(a * b - b * a)));
        }
    }
    if residual > 1e-9 {
        return Err(StabilityError::NotCommutingInvolutions(residual));
    }
    let mut items = group_elements(gens);
    butterfly(&mut items);
    let scale = items.len() as f64;
    Ok(items.into_iter().map(|m| m.unscale(scale)).collect())
}

/// `U_x = Σ_u (−1)^{u·x} P_u` for every `x`.
pub fn fourier_observables(pvm: &[CMat]) -> Vec<CMat> {
    let mut items = pvm.to_vec();
    butterfly(&mut items);
    items
}

/// `κ = max_{a≠0} 1/(1 − E_{b∼μ}(−1)^{a·b})` for `μ` on `Z_2^k` given as a length-`2^k` vector.
pub fn inverse_spectral_gap(mu: &[f64]) -> Result<f64, StabilityError> {
    let n = mu.len();
    if !n.is_power_of_two() || n > 1 << 20 {
        return Err(StabilityError::BadDistribution(n));
    }
    let mut f = mu.to_vec();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (f[j], f[j + h]);
                f[j] = a + b;
                f[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let mut kappa = 0.0f64;
    for &c in &f[1..] {
        let gap = 1.0 - c;
        if gap <= 1e-12 {
            return Err(StabilityError::InfiniteKappa);
        }
        kappa = kappa.max(1.0 / gap);
    }
    // k = 0 has no nonzero character
    Ok(if n == 1 { 1.0 } else { kappa })
}
