#include "dstc/timing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dstc/errors.hpp"

namespace dstc {
namespace {

void require_rates(double gamma, double lambda_cap) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("gamma must be finite and > 0, got " + std::to_string(gamma));
    }
    if (!(lambda_cap > 0.0) || !std::isfinite(lambda_cap)) {
        throw DomainError("Lambda must be finite and > 0, got " + std::to_string(lambda_cap));
    }
}

void require_lambda(double lam) {
    if (!(lam > 0.0 && lam < 1.0)) {
        throw DomainError("lambda must lie strictly inside (0, 1), got " + std::to_string(lam));
    }
}

// atanh(arg) where arg = num / den, written so that neither 1 - arg nor 1 + arg is
// formed by subtraction. den_minus_num is den - num computed without cancellation.
double atanh_ratio(double num, double den, double den_minus_num) {
    const double arg = num / den;
    if (arg < 0.5) {
        return std::atanh(arg);
    }
    return 0.5 * std::log((den + num) / den_minus_num);
}

}  // namespace

void TimingParams::validate() const {
    require_rates(gamma, lambda_cap);
    if (lam) {
        require_lambda(*lam);
    }
}

double t_max(double gamma, double lambda_cap) {
    require_rates(gamma, lambda_cap);
    if (gamma == lambda_cap) {
        return 1.0 / lambda_cap;
    }
    const double q = gamma / lambda_cap;
    const double r = std::sqrt(std::abs(q * q - 1.0));
    if (gamma > lambda_cap) {
        return std::atan(r) / (lambda_cap * r);
    }
    // 1 - r^2 = q^2, hence atanh(r) = log((1 + r) / q); exact even when r rounds to 1.
    const double atanh_r = r < 0.5 ? std::atanh(r) : std::log((1.0 + r) / q);
    return atanh_r / (lambda_cap * r);
}

double t_tilde_max(double lam, double gamma, double lambda_cap) {
    require_rates(gamma, lambda_cap);
    require_lambda(lam);
    const double one_minus_sq = (1.0 - lam) * (1.0 + lam);
    if (gamma == lambda_cap) {
        return (1.0 - lam) / ((1.0 + lam) * lambda_cap);
    }
    const double q = gamma / lambda_cap;
    const double r = std::sqrt(std::abs(q * q - 1.0));
    // Argument r(1-lam)/(2 lam/(1+lam) (q-1) + 1 + lam), multiplied through by (1 + lam).
    const double num = r * one_minus_sq;
    const double den = 2.0 * lam * q + 1.0 + lam * lam;
    if (gamma > lambda_cap) {
        return std::atan(num / den) / (lambda_cap * r);
    }
    // den - num = 2 lam q + 2 lam^2 + (1 - r)(1 - lam^2), with 1 - r = q^2 / (1 + r).
    const double den_minus_num = 2.0 * lam * q + 2.0 * lam * lam + q * q / (1.0 + r) * one_minus_sq;
    return atanh_ratio(num, den, den_minus_num) / (lambda_cap * r);
}

double solve_lambda_for_horizon(double h, double gamma, double lambda_cap) {
    require_rates(gamma, lambda_cap);
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("horizon must be finite and > 0, got " + std::to_string(h));
    }
    const double cap = t_max(gamma, lambda_cap);
    if (h >= cap) {
        throw NoSolutionError("horizon " + std::to_string(h) + " is not below T_max = " +
                              std::to_string(cap));
    }

    // t_tilde_max(lo) > h > t_tilde_max(hi); lo = 0 stands for the T_max limit.
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (t_tilde_max(mid, gamma, lambda_cap) > h) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (lo > 0.0 && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            break;
        }
    }
    const double lam = lo > 0.0 ? 0.5 * (lo + hi) : hi;
    const double residual = std::abs(t_tilde_max(lam, gamma, lambda_cap) - h);
    if (residual > 1e-10 * std::max(1.0, h)) {
        throw NoSolutionError("lambda bisection did not converge for horizon " + std::to_string(h));
    }
    return lam;
}

PhiSolution phi_solve(double lam, double gamma, double lambda_cap) {
    require_rates(gamma, lambda_cap);
    require_lambda(lam);

    PhiSolution sol;
    sol.lam_ = lam;
    sol.gamma_ = gamma;
    sol.lambda_cap_ = lambda_cap;
    sol.horizon_ = t_tilde_max(lam, gamma, lambda_cap);
    sol.step_ = sol.horizon_ / PhiSolution::kSteps;

    const auto rhs = [gamma, lambda_cap](double phi) { return phi_rate(phi, gamma, lambda_cap); };
    const double dt = sol.step_;

    sol.values_.resize(PhiSolution::kSteps + 1);
    sol.slopes_.resize(PhiSolution::kSteps + 1);
    double phi = 1.0 / lam;
    sol.values_[0] = phi;
    sol.slopes_[0] = rhs(phi);
    for (int k = 1; k <= PhiSolution::kSteps; ++k) {
        const double k1 = rhs(phi);
        const double k2 = rhs(phi + 0.5 * dt * k1);
        const double k3 = rhs(phi + 0.5 * dt * k2);
        const double k4 = rhs(phi + dt * k3);
        phi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        sol.values_[k] = phi;
        sol.slopes_[k] = rhs(phi);
    }
    return sol;
}

double PhiSolution::operator()(double tau) const {
    const double slack = 1e-12 * std::max(1.0, horizon_);
    if (!(tau >= -slack && tau <= horizon_ + slack)) {
        throw DomainError("phi evaluated at tau = " + std::to_string(tau) + " outside [0, " +
                          std::to_string(horizon_) + "]");
    }
    if (step_ <= 0.0) {
        return values_.front();
    }
    tau = std::clamp(tau, 0.0, horizon_);
    const double pos = tau / step_;
    const auto k = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
    const double s = pos - static_cast<double>(k);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * values_[k] + h10 * step_ * slopes_[k] + h01 * values_[k + 1] +
           h11 * step_ * slopes_[k + 1];
}

}  // namespace dstc
