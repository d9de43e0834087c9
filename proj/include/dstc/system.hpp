#pragma once

// Closed-loop sampled-data systems in emulation form.
//
// x is the combined plant/controller state, e = x_hat - x the sampling-induced error.
// Between samples x' = f(x, e) and e' = g(x, e) = -f(x, e), so g is never stored.

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace dstc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using VectorField = std::function<Vector(const Vector& x, const Vector& e)>;
using ScalarOfState = std::function<double(const Vector&)>;
using GradientOfState = std::function<Vector(const Vector&)>;
using ScalarOfPair = std::function<double(const Vector& x, const Vector& e)>;
using ComparisonFn = std::function<double(double)>;

/// Lower/upper comparison functions alpha(|.|) sandwiching V and W.
struct ComparisonBounds {
    ComparisonFn v_lower;
    ComparisonFn v_upper;
    ComparisonFn w_lower;
    ComparisonFn w_upper;
};

struct SystemSpec {
    std::string name;
    int state_dim = 0;
    int error_dim = 0;

    VectorField f;
    ScalarOfState v;
    GradientOfState grad_v;
    ScalarOfState w;
    ScalarOfPair h_fn;

    double region_c = 1.0;    ///< R = {x : V(x) <= c}
    double x_radius = 1.0;    ///< X = {|x| <= x_radius} contains R
    double e_radius = 2.0;    ///< E = {|e| <= e_radius} contains R - R
    ComparisonBounds bounds;

    /// Quadratic weight of V when V(x) = x' P x (empty otherwise).
    Matrix p_matrix;

    /// Checks dimensions, the origin conditions and that all callables are set.
    void validate() const;
};

/// Closed-loop drift f(x, e). Throws DomainError on dimension mismatch or non-finite input.
[[nodiscard]] Vector eval_f(const SystemSpec& spec, const Vector& x, const Vector& e);

/// True iff V(x) <= c (boundary included).
[[nodiscard]] bool in_region(const SystemSpec& spec, const Vector& x);

/// Installs W(e) = |e| and H(x, e) = |g(x, e)| = |f(x, e)|. With this choice
/// <dW/de, g> <= L W + H holds for every L >= 0.
[[nodiscard]] SystemSpec with_default_w_h(SystemSpec spec);

/// Forced Van der Pol oscillator under the static feedback
/// u = -x2 - (1 - x1^2) x2, V(x) = x' P x, R = {V <= c}.
/// X is the ball of radius sqrt(c / lambda_min(P)), E the ball of twice that radius.
[[nodiscard]] SystemSpec van_der_pol(const Eigen::Matrix2d& p, double c);
[[nodiscard]] SystemSpec van_der_pol();

/// Integrator plant x' = u with u = -x_hat, i.e. f(x, e) = -(x + e), V = |x|^2.
[[nodiscard]] SystemSpec linear_test(int dim = 1, double c = 1.0);

}  // namespace dstc
