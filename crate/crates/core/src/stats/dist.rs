//! Tail probabilities for the two reference distributions used by the
//! significance tests.

use statrs::function::beta::beta_reg;
use statrs::function::gamma::gamma_ur;

/// Two-sided p-value of a Student-t statistic with `dof` degrees of freedom,
/// computed through the regularized incomplete beta function
/// `I_x(dof/2, 1/2)` with `x = dof / (dof + t^2)`.
pub fn student_t_two_sided_p(t: f64, dof: usize) -> f64 {
    assert!(dof >= 1, "t distribution needs at least 1 degree of freedom");
    if t.is_infinite() {
        return 0.0;
    }
    let v = dof as f64;
    let x = v / (v + t * t);
    beta_reg(v / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Upper-tail probability of a chi-squared statistic with `dof` degrees of
/// freedom (the regularized upper incomplete gamma `Q(dof/2, x/2)`).
pub fn chi_squared_sf(x: f64, dof: usize) -> f64 {
    assert!(dof >= 1, "chi-squared needs at least 1 degree of freedom");
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    gamma_ur(dof as f64 / 2.0, x / 2.0).clamp(0.0, 1.0)
}
