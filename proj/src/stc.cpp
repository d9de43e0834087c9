#include "dstc/stc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dstc/errors.hpp"
#include "dstc/timing.hpp"

namespace dstc {
namespace {

double fallback_interval(const StcConfig& cfg) {
    const auto& fb = cfg.family.fallback();
    return cfg.delta * t_max(fb.gamma, fb.fallback_lambda());
}

}  // namespace

void StcConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw DomainError("delta must lie strictly inside (0, 1)");
    }
    if (!(eps_ref > 0.0)) {
        throw DomainError("eps_ref must be > 0");
    }
    if (m < 1) {
        throw DomainError("window length m must be >= 1");
    }
    if (!(c > 0.0)) {
        throw DomainError("region level c must be > 0");
    }
    family.validate();
    if (eta_init == EtaInit::explicit_values) {
        if (eta_values.size() != static_cast<std::size_t>(m - 1)) {
            throw DomainError("explicit eta needs exactly m - 1 entries");
        }
        if (std::any_of(eta_values.begin(), eta_values.end(), [](double v) { return !(v >= 0.0); })) {
            throw DomainError("explicit eta entries must be >= 0");
        }
    }
}

double StcConfig::t_cap() const {
    double cap = fallback_interval(*this);
    for (std::size_t i = 0; i < family.sets.size(); ++i) {
        if (i == family.fallback_index) {
            continue;
        }
        const auto& ps = family.sets[i];
        cap = std::max(cap, delta * t_max(ps.gamma, lambda_for_set(ps, delta)));
    }
    return cap;
}

double DynamicVariable::sum() const noexcept {
    return std::accumulate(eta.begin(), eta.end(), 0.0);
}

double DynamicVariable::max() const noexcept {
    return eta.empty() ? 0.0 : *std::max_element(eta.begin(), eta.end());
}

std::string to_string(BoundType b) {
    switch (b) {
        case BoundType::window: return "window";
        case BoundType::fallback: return "fallback";
        case BoundType::none: return "none";
    }
    return "none";
}

double window_average_c(double v_now, const DynamicVariable& dyn, double c, int m) {
    if (m < 1 || dyn.eta.size() != static_cast<std::size_t>(m - 1)) {
        throw DomainError("window_average_c: eta has " + std::to_string(dyn.eta.size()) +
                          " entries, expected m - 1 = " + std::to_string(m - 1));
    }
    if (!(v_now >= 0.0)) {
        throw DomainError("window_average_c: V must be >= 0");
    }
    return std::min(c, (v_now + dyn.sum()) / static_cast<double>(m));
}

DynamicVariable update_eta(const DynamicVariable& dyn, double v_now) {
    if (!(v_now >= 0.0)) {
        throw DomainError("update_eta: V must be >= 0");
    }
    DynamicVariable next;
    if (dyn.eta.empty()) {
        return next;
    }
    next.eta.reserve(dyn.eta.size());
    next.eta.assign(dyn.eta.begin() + 1, dyn.eta.end());
    next.eta.push_back(v_now);
    return next;
}

double lambda_for_set(const ParameterSet& ps, double delta) {
    return std::max(ps.l_const + 0.5 * ps.epsilon, 1.0 - delta);
}

double interval_for_set(double v_now, double c_val, const ParameterSet& ps, double delta, double eps_ref) {
    if (!(v_now >= 0.0)) {
        throw DomainError("interval_for_set: V must be >= 0");
    }
    const double cap = delta * t_max(ps.gamma, lambda_for_set(ps, delta));
    if (v_now == 0.0) {
        // Origin: exp(.) * 0 <= exp(.) * C holds for every h.
        return cap;
    }
    const double rate = -ps.epsilon + eps_ref;
    const double log_ratio = std::log(c_val) - std::log(v_now);
    if (c_val >= v_now) {
        if (rate > 0.0) {
            return std::min(cap, log_ratio / rate);
        }
        return cap;
    }
    if (rate >= 0.0) {
        return 0.0;
    }
    const double t_bar = log_ratio / rate;
    return t_bar < cap ? cap : 0.0;
}

TriggerDecision decide_interval(double v_now, double c_val, const StcConfig& cfg) {
    const auto& family = cfg.family;
    const auto& fb = family.fallback();

    TriggerDecision d;
    d.v = v_now;
    d.c_val = c_val;
    d.h = fallback_interval(cfg);
    d.set_index = static_cast<int>(family.fallback_index);
    d.used_fallback = true;
    d.lambda_cap_used = fb.fallback_lambda();
    d.epsilon = fb.epsilon;
    d.bound_type = BoundType::fallback;

    const double h_fallback = d.h;
    for (std::size_t i = 0; i < family.sets.size(); ++i) {
        if (i == family.fallback_index) {
            continue;
        }
        const auto& ps = family.sets[i];
        const double h_i = interval_for_set(v_now, c_val, ps, cfg.delta, cfg.eps_ref);
        if (h_i > 0.0 && h_i >= h_fallback) {
            d.bound_type = BoundType::window;
        }
        if (h_i > d.h) {
            d.h = h_i;
            d.set_index = static_cast<int>(i);
            d.used_fallback = false;
            d.lambda_cap_used = lambda_for_set(ps, cfg.delta);
            d.epsilon = ps.epsilon;
        }
    }
    return d;
}

TriggerDecision gamma_trigger(const Vector& x, const DynamicVariable& dyn, const StcConfig& cfg,
                              const SystemSpec& spec) {
    const double v = spec.v(x);
    if (v > cfg.c) {
        throw RegionViolation("gamma_trigger: V(x) = " + std::to_string(v) + " exceeds c = " +
                              std::to_string(cfg.c));
    }
    return decide_interval(v, window_average_c(v, dyn, cfg.c, cfg.m), cfg);
}

TriggerDecision static_trigger(const Vector& x, const StcConfig& cfg, const SystemSpec& spec) {
    const double v = spec.v(x);
    if (v > cfg.c) {
        throw RegionViolation("static_trigger: V(x) = " + std::to_string(v) + " exceeds c = " +
                              std::to_string(cfg.c));
    }
    return decide_interval(v, std::min(cfg.c, v), cfg);
}

DynamicVariable initial_eta(const StcConfig& cfg, double v0) {
    DynamicVariable dyn;
    const auto n = static_cast<std::size_t>(std::max(0, cfg.m - 1));
    switch (cfg.eta_init) {
        case EtaInit::current_value: dyn.eta.assign(n, v0); break;
        case EtaInit::zero: dyn.eta.assign(n, 0.0); break;
        case EtaInit::explicit_values: dyn.eta = cfg.eta_values; break;
    }
    return dyn;
}

std::pair<HybridState, TriggerDecision> stc_step(const HybridState& xi, const StcConfig& cfg,
                                                 const SystemSpec& spec) {
    if (std::abs(xi.tau - xi.s) > 1e-12 * std::max(1.0, std::abs(xi.s))) {
        throw ContractViolation("stc_step called off the jump set: tau = " + std::to_string(xi.tau) +
                                ", s = " + std::to_string(xi.s));
    }
    const TriggerDecision decision = gamma_trigger(xi.x, xi.eta, cfg, spec);

    HybridState next;
    next.x = xi.x;
    next.e = Vector::Zero(spec.error_dim);
    next.eta = update_eta(xi.eta, spec.v(xi.x));
    next.tau = 0.0;
    next.s = decision.h;
    return {std::move(next), decision};
}

}  // namespace dstc
