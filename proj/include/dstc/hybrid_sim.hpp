#pragma once

// Hybrid-time simulation of the sampled-data loop.
//
// Hybrid times are pairs (t, j). Sample j happens at (t_j, j); the jump takes the state
// to (t_j, j + 1) and the flow on [t_j, t_{j+1}] carries jump counter j + 1. The first
// jump is at t = 0. Between samples the held state x(t_j) gives e(t) = x(t_j) - x(t), so
// only x is integrated.

#include <cstddef>
#include <string>
#include <vector>

#include "dstc/stc.hpp"
#include "dstc/system.hpp"

namespace dstc {

struct SampleRecord {
    double t = 0.0;
    int j = 0;
    Vector x;
    double v = 0.0;
    std::vector<double> eta;  ///< eta(t_j), before the jump
};

struct FlowPoint {
    double t = 0.0;
    int j = 0;         ///< jump counter during this flow (sample index + 1)
    double tau = 0.0;  ///< time since the last sample
    Vector x;
    double v = 0.0;
    double w = 0.0;    ///< W(e(t))
    double u = 0.0;    ///< U(xi(t)); NaN where no parameter set backs the interval
};

struct MonitorRecord {
    std::string name;
    int j = 0;
    double slack = 0.0;  ///< bound minus monitored value, >= -tol when the inequality holds
    double tol = 0.0;
    bool pass = true;
};

struct HybridTrajectory {
    std::string mechanism;
    std::vector<SampleRecord> samples;
    std::vector<TriggerDecision> decisions;  ///< decisions[j] issued at samples[j]
    std::vector<FlowPoint> flow_points;
    std::vector<MonitorRecord> monitors;
    double t_min = 0.0;
    double t_cap = 0.0;

    [[nodiscard]] std::size_t violation_count() const;
    /// Number of samples with t_j < t.
    [[nodiscard]] std::size_t samples_before(double t) const;
};

inline constexpr double kRegionTolerance = 1e-6;  ///< relative to c
inline constexpr double kMonitorTolerance = 1e-7; ///< times (1 + bound)
inline constexpr int kFlowRecordsPerInterval = 64;

/// Dynamic STC closed loop from x0 until the first sample at or after t_end.
/// Requires V(x0) <= c and dt_flow <= t_min / 16. Throws RegionViolation if V leaves
/// [0, c + tol] during a flow and IntegrationError on non-finite states.
[[nodiscard]] HybridTrajectory simulate(const Vector& x0, const StcConfig& cfg, const SystemSpec& spec,
                                        double t_end, double dt_flow);

/// Same flow/jump machinery with a constant interval.
[[nodiscard]] HybridTrajectory simulate_periodic(const Vector& x0, const SystemSpec& spec, double period,
                                                 double t_end, double dt_flow);

}  // namespace dstc
