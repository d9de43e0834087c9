#include "dstc/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

#include "dstc/errors.hpp"
#include "dstc/timing.hpp"

namespace dstc {
namespace {

constexpr double kGammaFloor = 1e-6;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string format_point(const Vector& x, const Vector& e) {
    std::ostringstream os;
    os.precision(6);
    os << "x = [" << x.transpose() << "], e = [" << e.transpose() << "]";
    return os.str();
}

// Runs body(begin, end, partial) over chunks of [0, n) on up to `jobs` threads and
// returns the partials in chunk order, so reductions are independent of scheduling.
template <typename Partial, typename Body>
std::vector<Partial> chunked(std::size_t n, int jobs, Body body) {
    const std::size_t workers = std::clamp<std::size_t>(jobs > 0 ? jobs : 1, 1, std::max<std::size_t>(n, 1));
    std::vector<Partial> partials(workers);
    const std::size_t per = (n + workers - 1) / workers;
    if (workers == 1) {
        body(std::size_t{0}, n, partials[0]);
        return partials;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, w * per);
        const std::size_t end = std::min(n, begin + per);
        threads.emplace_back([&, w, begin, end] {
            try {
                body(begin, end, partials[w]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
    return partials;
}

struct XSample {
    Vector x;
    double v;
    Vector grad;
};

struct ESample {
    Vector e;
    double w;
};

struct ProductGrid {
    std::vector<XSample> xs;
    std::vector<ESample> es;
};

ProductGrid make_grid(const SystemSpec& spec, int density) {
    if (density < 8) {
        throw DomainError("grid density must be >= 8 per dimension, got " + std::to_string(density));
    }
    ProductGrid grid;
    for (auto& x : ball_grid(spec.state_dim, spec.x_radius, density)) {
        const double v = spec.v(x);
        Vector g = spec.grad_v(x);
        grid.xs.push_back({std::move(x), v, std::move(g)});
    }
    auto es = ball_grid(spec.error_dim, spec.e_radius, density);
    // e = 0 is a grid point only for odd densities; the W = 0 slice is always checked.
    if (std::none_of(es.begin(), es.end(), [](const Vector& e) { return e.isZero(0.0); })) {
        es.push_back(Vector::Zero(spec.error_dim));
    }
    for (auto& e : es) {
        const double w = spec.w(e);
        grid.es.push_back({std::move(e), w});
    }
    if (grid.xs.empty() || grid.es.empty()) {
        throw DomainError("empty verification grid");
    }
    return grid;
}

// Terms of the decrease inequality that do not involve gamma.
struct PointTerms {
    double lie = 0.0;  // <grad V, f>
    double h = 0.0;    // H
    Vector fx;
};

PointTerms evaluate(const SystemSpec& spec, const XSample& xs, const ESample& es) {
    PointTerms t;
    t.fx = spec.f(xs.x, es.e);
    t.lie = xs.grad.dot(t.fx);
    t.h = spec.h_fn(xs.x, es.e);
    return t;
}

}  // namespace

void ParameterFamily::validate() const {
    if (sets.empty()) {
        throw DomainError("parameter family is empty");
    }
    if (fallback_index >= sets.size()) {
        throw DomainError("fall-back index out of range");
    }
    for (const auto& ps : sets) {
        if (!(ps.gamma > 0.0) || !(ps.l_const > 0.0)) {
            throw DomainError("every parameter set needs gamma > 0 and L > 0");
        }
    }
    if (!(fallback().epsilon > 0.0)) {
        throw DomainError("the fall-back parameter set needs eps > 0");
    }
}

double ParameterFamily::t_min(double delta) const {
    const auto& fb = fallback();
    return delta * t_max(fb.gamma, fb.fallback_lambda());
}

double assumption_residual(const SystemSpec& spec, const ParameterSet& ps, const Vector& x, const Vector& e) {
    const double h = spec.h_fn(x, e);
    const double w = spec.w(e);
    return spec.grad_v(x).dot(spec.f(x, e)) + ps.epsilon * spec.v(x) + h * h - ps.gamma * ps.gamma * w * w;
}

std::vector<Vector> ball_grid(int dim, double radius, int density) {
    if (dim <= 0 || density < 2 || !(radius > 0.0)) {
        return {};
    }
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) {
        total *= static_cast<std::size_t>(density);
    }
    const double step = 2.0 * radius / (density - 1);
    std::vector<Vector> pts;
    pts.reserve(total);
    std::vector<int> idx(dim, 0);
    for (std::size_t n = 0; n < total; ++n) {
        Vector p(dim);
        for (int d = 0; d < dim; ++d) {
            p(d) = -radius + step * idx[d];
        }
        const double norm = p.norm();
        if (norm > radius) {
            p *= radius / norm;
        }
        pts.push_back(std::move(p));
        for (int d = 0; d < dim; ++d) {
            if (++idx[d] < density) {
                break;
            }
            idx[d] = 0;
        }
    }
    return pts;
}

AssumptionReport verify_assumption(const SystemSpec& spec, const ParameterSet& ps, int grid_density,
                                   int jobs) {
    if (!(ps.gamma > 0.0)) {
        throw DomainError("verify_assumption: gamma must be > 0");
    }
    if (!(ps.l_const > 0.0)) {
        throw DomainError("verify_assumption: L must be > 0");
    }
    const ProductGrid grid = make_grid(spec, grid_density);
    const double g2 = ps.gamma * ps.gamma;

    struct Partial {
        double max_residual = kNegInf;
        std::size_t worst_x = 0;
        std::size_t worst_e = 0;
        double scale = 0.0;
        double w_slack = std::numeric_limits<double>::infinity();
    };

    const auto partials = chunked<Partial>(grid.xs.size(), jobs, [&](std::size_t b, std::size_t e, Partial& out) {
        for (std::size_t i = b; i < e; ++i) {
            const auto& xs = grid.xs[i];
            for (std::size_t k = 0; k < grid.es.size(); ++k) {
                const auto& es = grid.es[k];
                const PointTerms t = evaluate(spec, xs, es);
                const double residual = t.lie + ps.epsilon * xs.v + t.h * t.h - g2 * es.w * es.w;
                if (!std::isfinite(residual)) {
                    throw SynthesisError("non-finite residual at " + format_point(xs.x, es.e), ps.epsilon);
                }
                if (residual > out.max_residual) {
                    out.max_residual = residual;
                    out.worst_x = i;
                    out.worst_e = k;
                }
                out.scale = std::max(out.scale, std::abs(t.lie) + std::abs(ps.epsilon * xs.v) + t.h * t.h +
                                                    g2 * es.w * es.w);
                if (es.w > 0.0) {
                    // <dW/de, g> by a central difference along g = -f.
                    const double eta = 1e-7 * std::max(1.0, es.e.norm()) / std::max(1.0, t.fx.norm());
                    const double dw = (spec.w(es.e - eta * t.fx) - spec.w(es.e + eta * t.fx)) / (2.0 * eta);
                    out.w_slack = std::min(out.w_slack, ps.l_const * es.w + t.h - dw);
                }
            }
        }
    });

    AssumptionReport rep;
    rep.max_residual = kNegInf;
    rep.w_bound_min_slack = std::numeric_limits<double>::infinity();
    for (const auto& p : partials) {
        if (p.max_residual > rep.max_residual) {
            rep.max_residual = p.max_residual;
            rep.worst_x = grid.xs[p.worst_x].x;
            rep.worst_e = grid.es[p.worst_e].e;
        }
        rep.scale = std::max(rep.scale, p.scale);
        rep.w_bound_min_slack = std::min(rep.w_bound_min_slack, p.w_slack);
    }
    rep.points = grid.xs.size() * grid.es.size();
    rep.certified = rep.max_residual <= 0.0;
    // Central differences carry O(eta^2) error; anything beyond that is a genuine violation.
    rep.w_bound_holds = rep.w_bound_min_slack >= -1e-6 * std::max(1.0, rep.scale);
    return rep;
}

ParameterSet synthesize_gamma(const SystemSpec& spec, double epsilon, double l_const, int grid_density,
                              int jobs) {
    if (!(l_const > 0.0)) {
        throw DomainError("synthesize_gamma: L must be > 0");
    }
    if (!std::isfinite(epsilon)) {
        throw DomainError("synthesize_gamma: epsilon must be finite");
    }
    const ProductGrid grid = make_grid(spec, grid_density);

    struct Partial {
        double max_ratio = kNegInf;
        double zero_w_residual = kNegInf;
        std::size_t zero_w_x = 0;
        std::size_t zero_w_e = 0;
        double scale = 0.0;
    };

    const auto partials = chunked<Partial>(grid.xs.size(), jobs, [&](std::size_t b, std::size_t e, Partial& out) {
        for (std::size_t i = b; i < e; ++i) {
            const auto& xs = grid.xs[i];
            for (std::size_t k = 0; k < grid.es.size(); ++k) {
                const auto& es = grid.es[k];
                const PointTerms t = evaluate(spec, xs, es);
                const double numerator = t.lie + epsilon * xs.v + t.h * t.h;
                if (!std::isfinite(numerator)) {
                    throw SynthesisError("non-finite residual at " + format_point(xs.x, es.e), epsilon);
                }
                out.scale = std::max(out.scale, std::abs(t.lie) + std::abs(epsilon * xs.v) + t.h * t.h);
                if (es.w > 0.0) {
                    out.max_ratio = std::max(out.max_ratio, numerator / (es.w * es.w));
                } else if (numerator > out.zero_w_residual) {
                    out.zero_w_residual = numerator;
                    out.zero_w_x = i;
                    out.zero_w_e = k;
                }
            }
        }
    });

    double max_ratio = kNegInf;
    double scale = 0.0;
    for (const auto& p : partials) {
        max_ratio = std::max(max_ratio, p.max_ratio);
        scale = std::max(scale, p.scale);
    }
    for (const auto& p : partials) {
        // On W = 0 the condition reduces to <grad V, f> <= -eps V - H^2 for every gamma.
        if (p.zero_w_residual > 1e-12 * std::max(1.0, scale)) {
            throw SynthesisError("eps = " + std::to_string(epsilon) +
                                     " infeasible for every gamma: positive residual " +
                                     std::to_string(p.zero_w_residual) + " with W = 0 at " +
                                     format_point(grid.xs[p.zero_w_x].x, grid.es[p.zero_w_e].e),
                                 epsilon);
        }
    }

    ParameterSet ps;
    ps.epsilon = epsilon;
    ps.l_const = l_const;
    ps.grid_density = grid_density;
    ps.gamma = std::max(kGammaFloor, kGammaInflation * std::sqrt(std::max(0.0, max_ratio)));
    ps.margin = verify_assumption(spec, ps, grid_density, jobs).margin();
    return ps;
}

ParameterFamily build_family(const SystemSpec& spec, std::span<const double> epsilons, double l_const,
                             int grid_density, int jobs) {
    if (epsilons.empty()) {
        throw DomainError("build_family: epsilon list is empty");
    }
    if (!(*std::max_element(epsilons.begin(), epsilons.end()) > 0.0)) {
        throw DomainError("build_family: fall-back requirement violated, no epsilon is > 0");
    }

    std::vector<ParameterSet> sets;
    sets.reserve(epsilons.size());
    for (const double eps : epsilons) {
        sets.push_back(synthesize_gamma(spec, eps, l_const, grid_density, jobs));
    }

    std::size_t best = sets.size();
    double best_horizon = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i].epsilon > 0.0) {
            const double horizon = t_max(sets[i].gamma, sets[i].fallback_lambda());
            if (best == sets.size() || horizon > best_horizon) {
                best = i;
                best_horizon = horizon;
            }
        }
    }

    ParameterFamily family;
    family.sets.push_back(sets[best]);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (i != best) {
            family.sets.push_back(sets[i]);
        }
    }
    family.fallback_index = 0;
    family.validate();
    return family;
}

std::vector<double> log_spaced_epsilons(double fallback_eps, std::size_t count, double most_negative) {
    if (!(fallback_eps > 0.0) || !(most_negative < 0.0) || count == 0) {
        throw DomainError("log_spaced_epsilons: need fallback > 0, most_negative < 0, count >= 1");
    }
    std::vector<double> eps{fallback_eps};
    const std::size_t n = count - 1;
    const double lo = std::log(fallback_eps);
    const double hi = std::log(-most_negative);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = n == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        eps.push_back(-std::exp(lo + t * (hi - lo)));
    }
    if (n >= 1) {
        eps.back() = most_negative;
    }
    return eps;
}

}  // namespace dstc
