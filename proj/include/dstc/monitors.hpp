#pragma once

// Runtime checks of the inequalities behind the stability guarantee.

#include <span>
#include <string>
#include <vector>

#include "dstc/hybrid_sim.hpp"
#include "dstc/synthesis.hpp"

namespace dstc {

struct FlowBoundReport {
    bool applicable = false;
    std::string reason;         ///< why the monitor could not be applied
    double lam = 0.0;           ///< lambda with t_tilde_max(lambda) = h
    double min_slack = 0.0;     ///< min of envelope - U over the segment
    double end_slack = 0.0;     ///< envelope - U at the last point
    double min_u_minus_v = 0.0; ///< min of U - V
    double min_slack_tol = 0.0; ///< tolerance at the point of min_slack
    double end_slack_tol = 0.0;
    bool pass = false;
    std::vector<double> u;      ///< U at each point of the segment
};

/// Checks V(x(t)) <= U(xi(t)) <= exp(max{-eps, 2(L - Lambda)} tau) V(x(t_j+)) on one
/// inter-sample flow. `segment` holds the flow points (tau from 0 to h) with V and W filled.
[[nodiscard]] FlowBoundReport monitor_flow_bound(std::span<const FlowPoint> segment, double v_start,
                                                 const ParameterSet& ps, double lambda_cap, double h);

/// Sample-level inequalities along a trajectory: per-interval decrease (window or
/// fall-back bound), the combined decrease with eps~ = min{eps_1, eps_ref}, the running
/// cap V(t_j) <= max{V(t_0), eta(t_0)}, the windowed envelope and the interval range.
[[nodiscard]] std::vector<MonitorRecord> monitor_sample_decrease(const HybridTrajectory& traj,
                                                                 const StcConfig& cfg);

}  // namespace dstc
