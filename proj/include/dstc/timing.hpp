#pragma once

// Timing functions of the hybrid Lyapunov bound between two samples.
//
// For a pair (gamma, Lambda) the bound V(x(t)) <= U(xi(t)) <= exp(rate * t) V(x(t_j+))
// is valid on [0, T_max(gamma, Lambda)). U weights W(e)^2 with the solution phi
// of the scalar Riccati comparison equation
//
//     phi' = -2 Lambda phi - gamma (phi^2 + 1),   phi(0) = 1 / lambda,
//
// which stays in [lambda, 1/lambda] up to the horizon T~_max(lambda, gamma, Lambda).

#include <optional>
#include <span>
#include <vector>

namespace dstc {

struct TimingParams {
    double gamma = 1.0;               ///< supply gain, 1/time
    double lambda_cap = 1.0;          ///< Lambda, 1/time
    std::optional<double> lam;        ///< lambda in (0, 1), only for the Riccati horizon

    /// Throws DomainError when an invariant is broken.
    void validate() const;
};

/// Maximal horizon of the hybrid Lyapunov bound (three-branch arctan / 1/Lambda / arctanh form).
[[nodiscard]] double t_max(double gamma, double lambda_cap);

/// Time for phi to travel from 1/lambda down to lambda. Strictly below t_max and
/// increasing towards it as lambda -> 0.
[[nodiscard]] double t_tilde_max(double lam, double gamma, double lambda_cap);

/// Inverse of t_tilde_max in lambda. Bisection; t_tilde_max is strictly decreasing in lambda.
/// Throws DomainError for h <= 0 and NoSolutionError for h >= t_max(gamma, lambda_cap).
[[nodiscard]] double solve_lambda_for_horizon(double h, double gamma, double lambda_cap);

/// Right-hand side of the Riccati comparison equation.
[[nodiscard]] constexpr double phi_rate(double phi, double gamma, double lambda_cap) noexcept {
    return -2.0 * lambda_cap * phi - gamma * (phi * phi + 1.0);
}

/// Dense solution of the Riccati comparison equation on [0, t_tilde_max].
class PhiSolution {
public:
    static constexpr int kSteps = 2048;

    [[nodiscard]] double lam() const noexcept { return lam_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double lambda_cap() const noexcept { return lambda_cap_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }

    /// phi(tau) via cubic Hermite interpolation between RK4 nodes.
    /// Throws DomainError for tau outside [0, horizon].
    [[nodiscard]] double operator()(double tau) const;
    [[nodiscard]] double evaluate(double tau) const { return (*this)(tau); }

    [[nodiscard]] std::span<const double> node_values() const noexcept { return values_; }
    [[nodiscard]] double node_step() const noexcept { return step_; }

private:
    friend PhiSolution phi_solve(double lam, double gamma, double lambda_cap);

    double lam_ = 0.5;
    double gamma_ = 1.0;
    double lambda_cap_ = 1.0;
    double horizon_ = 0.0;
    double step_ = 0.0;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

/// Integrates phi with fixed-step RK4 (horizon / 2048) from phi(0) = 1/lambda.
[[nodiscard]] PhiSolution phi_solve(double lam, double gamma, double lambda_cap);

/// U = V + gamma * phi(tau) * W^2.
[[nodiscard]] constexpr double u_value(double v, double w, double phi_tau, double gamma) noexcept {
    return v + gamma * phi_tau * w * w;
}

}  // namespace dstc
