#pragma once

// Grid certification of the exponential ISS-type hybrid Lyapunov condition
//
//     <grad V(x), f(x, e)> <= -eps V(x) - H(x, e)^2 + gamma^2 W(e)^2     on X x E
//     <dW/de, g(x, e)>    <= L W(e) + H(x, e)
//
// and synthesis of parameter families {(eps_i, gamma_i, L_i)} from it.

#include <cstddef>
#include <span>
#include <vector>

#include "dstc/system.hpp"

namespace dstc {

struct ParameterSet {
    double epsilon = 0.0;   ///< decay rate, may be negative
    double gamma = 1.0;     ///< supply gain, > 0
    double l_const = 0.05;  ///< L, > 0
    double margin = 0.0;    ///< -max residual on the synthesis grid (>= 0 when certified)
    int grid_density = 0;   ///< points per dimension used for certification

    /// Lambda used for the fall-back horizon: L + eps / 2.
    [[nodiscard]] double fallback_lambda() const noexcept { return l_const + 0.5 * epsilon; }
};

struct ParameterFamily {
    std::vector<ParameterSet> sets;
    std::size_t fallback_index = 0;

    /// Non-empty, fall-back set has eps > 0, gamma > 0 and L > 0 everywhere.
    void validate() const;

    [[nodiscard]] const ParameterSet& fallback() const { return sets.at(fallback_index); }

    /// Guaranteed minimal inter-sample time delta * T_max(gamma_1, L_1 + eps_1 / 2).
    [[nodiscard]] double t_min(double delta) const;
};

struct AssumptionReport {
    double max_residual = 0.0;   ///< max of <grad V, f> + eps V + H^2 - gamma^2 W^2
    double scale = 0.0;          ///< max of the absolute size of the terms above
    std::size_t points = 0;
    bool certified = false;      ///< max_residual <= 0
    double w_bound_min_slack = 0.0;  ///< min of L W + H - <dW/de, g> over points with e != 0
    bool w_bound_holds = false;
    Vector worst_x;
    Vector worst_e;

    [[nodiscard]] double margin() const noexcept { return -max_residual; }
    [[nodiscard]] bool certified_within(double rel_tol) const noexcept {
        return max_residual <= rel_tol * scale;
    }
};

/// Uniform box grid on [-radius, radius]^dim with `density` points per axis; points
/// outside the ball are projected radially onto its boundary sphere.
[[nodiscard]] std::vector<Vector> ball_grid(int dim, double radius, int density);

/// <grad V(x), f(x, e)> + eps V(x) + H(x, e)^2 - gamma^2 W(e)^2 at one point.
[[nodiscard]] double assumption_residual(const SystemSpec& spec, const ParameterSet& ps, const Vector& x,
                                         const Vector& e);

/// Evaluates both inequalities on the product grid of X and E (the E grid always
/// contains e = 0).
/// Throws DomainError for density < 8 or parameters out of range, SynthesisError on
/// non-finite evaluations.
[[nodiscard]] AssumptionReport verify_assumption(const SystemSpec& spec, const ParameterSet& ps,
                                                 int grid_density, int jobs = 1);

/// Smallest grid-feasible gamma for (eps, L), inflated by 5%.
/// Throws SynthesisError when a point with W = 0 has a positive residual.
[[nodiscard]] ParameterSet synthesize_gamma(const SystemSpec& spec, double epsilon, double l_const,
                                            int grid_density, int jobs = 1);

/// One set per epsilon. The positive-eps set with the largest fall-back horizon goes
/// first and becomes the fall-back; the others keep their input order.
[[nodiscard]] ParameterFamily build_family(const SystemSpec& spec, std::span<const double> epsilons,
                                           double l_const, int grid_density, int jobs = 1);

/// {fallback_eps} followed by `count - 1` negative values whose magnitudes are
/// geometrically spaced from fallback_eps up to |most_negative|.
[[nodiscard]] std::vector<double> log_spaced_epsilons(double fallback_eps, std::size_t count,
                                                      double most_negative);

inline constexpr double kGammaInflation = 1.05;

}  // namespace dstc
