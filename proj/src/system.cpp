#include "dstc/system.hpp"

#include <cmath>
#include <string>

#include "dstc/errors.hpp"

namespace dstc {
namespace {

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) {
        throw DomainError(std::string(what) + " has non-finite entries");
    }
}

SystemSpec quadratic_base(std::string name, const Matrix& p, double c) {
    if (!(c > 0.0)) {
        throw DomainError("region level c must be > 0");
    }
    if (p.rows() != p.cols() || !p.isApprox(p.transpose())) {
        throw DomainError("P must be square and symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0)) {
        throw DomainError("P must be positive definite");
    }

    SystemSpec spec;
    spec.name = std::move(name);
    spec.state_dim = static_cast<int>(p.rows());
    spec.error_dim = spec.state_dim;
    spec.p_matrix = p;
    spec.v = [p](const Vector& x) { return x.dot(p * x); };
    spec.grad_v = [p](const Vector& x) -> Vector { return 2.0 * (p * x); };
    spec.region_c = c;
    spec.x_radius = std::sqrt(c / lmin);
    spec.e_radius = 2.0 * spec.x_radius;
    spec.bounds.v_lower = [lmin](double r) { return lmin * r * r; };
    spec.bounds.v_upper = [lmax](double r) { return lmax * r * r; };
    spec.bounds.w_lower = [](double r) { return r; };
    spec.bounds.w_upper = [](double r) { return r; };
    return spec;
}

}  // namespace

void SystemSpec::validate() const {
    if (state_dim <= 0 || error_dim != state_dim) {
        throw DomainError("system '" + name + "': need state_dim = error_dim > 0");
    }
    if (!f || !v || !grad_v || !w || !h_fn) {
        throw DomainError("system '" + name + "': f, V, grad V, W and H must all be set");
    }
    if (!(region_c > 0.0) || !(x_radius > 0.0) || !(e_radius > 0.0)) {
        throw DomainError("system '" + name + "': c and set radii must be > 0");
    }
    const Vector zx = Vector::Zero(state_dim);
    const Vector ze = Vector::Zero(error_dim);
    if (f(zx, ze).norm() != 0.0 || v(zx) != 0.0 || w(ze) != 0.0) {
        throw DomainError("system '" + name + "': origin must be an equilibrium with V(0) = W(0) = 0");
    }
}

Vector eval_f(const SystemSpec& spec, const Vector& x, const Vector& e) {
    if (x.size() != spec.state_dim || e.size() != spec.error_dim) {
        throw DomainError("eval_f: expected dimensions (" + std::to_string(spec.state_dim) + ", " +
                          std::to_string(spec.error_dim) + "), got (" + std::to_string(x.size()) +
                          ", " + std::to_string(e.size()) + ")");
    }
    require_finite(x, "x");
    require_finite(e, "e");
    return spec.f(x, e);
}

bool in_region(const SystemSpec& spec, const Vector& x) {
    return spec.v(x) <= spec.region_c;
}

SystemSpec with_default_w_h(SystemSpec spec) {
    spec.w = [](const Vector& e) { return e.norm(); };
    spec.h_fn = [f = spec.f](const Vector& x, const Vector& e) { return f(x, e).norm(); };
    return spec;
}

SystemSpec van_der_pol(const Eigen::Matrix2d& p, double c) {
    SystemSpec spec = quadratic_base("van_der_pol", p, c);
    spec.f = [](const Vector& x, const Vector& e) -> Vector {
        const double a1 = 2.0 * x(0) * e(1) + e(0) * e(1);
        const double a2 = x(0) * x(0) + 2.0 * x(0) * e(0) + e(0) * e(0);
        Vector dx(2);
        dx(0) = x(1);
        dx(1) = -x(0) - x(1) + a1 * e(0) + (-2.0 + a2) * e(1);
        return dx;
    };
    spec = with_default_w_h(std::move(spec));
    spec.validate();
    return spec;
}

SystemSpec van_der_pol() {
    Eigen::Matrix2d p;
    p << 4.68, 1.10, 1.10, 3.56;
    return van_der_pol(p, 10.0);
}

SystemSpec linear_test(int dim, double c) {
    if (dim <= 0) {
        throw DomainError("linear_test: dimension must be positive");
    }
    SystemSpec spec = quadratic_base("linear_test", Matrix::Identity(dim, dim), c);
    spec.f = [](const Vector& x, const Vector& e) -> Vector { return -(x + e); };
    spec = with_default_w_h(std::move(spec));
    spec.validate();
    return spec;
}

}  // namespace dstc
