#pragma once

// Dynamic self-triggered sampling.
//
// The dynamic variable eta stores the Lyapunov values of the last m - 1 samples. At a
// sample the next interval h is chosen as large as possible such that, for some
// certified parameter set i,
//
//     V(x(t_{j+1})) <= exp(-eps_ref h) C,     C = min{c, (V + sum eta) / m},
//
// follows from the hybrid Lyapunov bound, with h <= delta T_max(gamma_i, Lambda_i).
// When no set admits such an h, the fall-back interval delta T_max(gamma_1, L_1 + eps_1/2)
// is used, which guarantees V(x(t_{j+1})) <= exp(-eps_1 h) V(x(t_j)).

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dstc/synthesis.hpp"
#include "dstc/system.hpp"

namespace dstc {

/// How eta is seeded at t = 0.
enum class EtaInit {
    current_value,  ///< every entry V(x0)
    zero,
    explicit_values,
};

struct StcConfig {
    double delta = 0.999;
    double eps_ref = 0.01;
    int m = 30;
    double c = 10.0;
    ParameterFamily family;
    EtaInit eta_init = EtaInit::current_value;
    std::vector<double> eta_values;  ///< used with EtaInit::explicit_values, length m - 1

    void validate() const;

    [[nodiscard]] double t_min() const { return family.t_min(delta); }
    /// max_i delta T_max(gamma_i, Lambda_i): no decision exceeds it.
    [[nodiscard]] double t_cap() const;
};

struct DynamicVariable {
    std::vector<double> eta;  ///< oldest first

    [[nodiscard]] double sum() const noexcept;
    [[nodiscard]] double max() const noexcept;
};

enum class BoundType {
    window,    ///< V(t_{j+1}) <= exp(-eps_ref h) C(t_j) is certified
    fallback,  ///< V(t_{j+1}) <= exp(-eps_1 h) V(t_j) is certified
    none,      ///< no trigger logic (periodic sampling)
};

[[nodiscard]] std::string to_string(BoundType b);

inline constexpr int kNoParameterSet = -1;

struct TriggerDecision {
    double h = 0.0;
    int set_index = kNoParameterSet;  ///< 0 is the fall-back set
    bool used_fallback = false;
    double lambda_cap_used = 0.0;
    BoundType bound_type = BoundType::none;
    double epsilon = 0.0;             ///< eps of the winning set
    double v = 0.0;                   ///< V(x(t_j))
    double c_val = 0.0;               ///< C(x(t_j), eta(t_j), c)
};

/// min{c, (v_now + sum eta) / m}. Throws DomainError if |eta| != m - 1 or v_now < 0.
[[nodiscard]] double window_average_c(double v_now, const DynamicVariable& dyn, double c, int m);

/// Shift register: drop the oldest entry, append v_now.
[[nodiscard]] DynamicVariable update_eta(const DynamicVariable& dyn, double v_now);

/// max{L + eps / 2, 1 - delta}.
[[nodiscard]] double lambda_for_set(const ParameterSet& ps, double delta);

/// Largest h <= delta T_max(gamma_i, Lambda_i) with (eps_ref - eps_i) h <= log(c_val / v_now),
/// or 0 when no positive h qualifies. v_now = 0 returns delta T_max.
[[nodiscard]] double interval_for_set(double v_now, double c_val, const ParameterSet& ps, double delta,
                                      double eps_ref);

/// Interval selection given V and C directly (the core of gamma_trigger).
[[nodiscard]] TriggerDecision decide_interval(double v_now, double c_val, const StcConfig& cfg);

/// Next sampling interval for state x and dynamic variable dyn.
/// Throws RegionViolation if V(x) > c.
[[nodiscard]] TriggerDecision gamma_trigger(const Vector& x, const DynamicVariable& dyn,
                                            const StcConfig& cfg, const SystemSpec& spec);

/// Static mechanism: the same selection with C = min{c, V(x)} and no memory.
[[nodiscard]] TriggerDecision static_trigger(const Vector& x, const StcConfig& cfg, const SystemSpec& spec);

/// xi = (x, e, eta, tau, s).
struct HybridState {
    Vector x;
    Vector e;
    DynamicVariable eta;
    double tau = 0.0;
    double s = 0.0;
};

/// eta(t_0) for the configured policy.
[[nodiscard]] DynamicVariable initial_eta(const StcConfig& cfg, double v0);

/// Jump map at a sampling instant: x kept, e <- 0, eta <- S(eta, x), tau <- 0, s <- Gamma(x, eta).
/// Throws ContractViolation off the jump set (tau != s).
[[nodiscard]] std::pair<HybridState, TriggerDecision> stc_step(const HybridState& xi, const StcConfig& cfg,
                                                               const SystemSpec& spec);

}  // namespace dstc
