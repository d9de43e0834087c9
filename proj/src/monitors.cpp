#include "dstc/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dstc/errors.hpp"
#include "dstc/timing.hpp"

namespace dstc {

FlowBoundReport monitor_flow_bound(std::span<const FlowPoint> segment, double v_start, const ParameterSet& ps,
                                   double lambda_cap, double h) {
    FlowBoundReport rep;
    if (segment.empty()) {
        rep.reason = "empty segment";
        return rep;
    }
    try {
        rep.lam = solve_lambda_for_horizon(h, ps.gamma, lambda_cap);
    } catch (const NoSolutionError& err) {
        rep.reason = err.what();
        return rep;
    } catch (const DomainError& err) {
        rep.reason = err.what();
        return rep;
    }
    const PhiSolution phi = phi_solve(rep.lam, ps.gamma, lambda_cap);
    const double rate = std::max(-ps.epsilon, 2.0 * (ps.l_const - lambda_cap));

    rep.applicable = true;
    rep.min_slack = std::numeric_limits<double>::infinity();
    rep.min_u_minus_v = std::numeric_limits<double>::infinity();
    rep.pass = true;
    rep.u.reserve(segment.size());
    for (const auto& p : segment) {
        const double tau = std::min(p.tau, phi.horizon());
        const double u = u_value(p.v, p.w, phi(tau), ps.gamma);
        const double envelope = std::exp(rate * p.tau) * v_start;
        const double tol = kMonitorTolerance * (1.0 + envelope);
        const double slack = envelope - u;
        rep.u.push_back(u);
        if (slack < rep.min_slack) {
            rep.min_slack = slack;
            rep.min_slack_tol = tol;
        }
        rep.min_u_minus_v = std::min(rep.min_u_minus_v, u - p.v);
        if (slack < -tol || u - p.v < -tol) {
            rep.pass = false;
        }
        rep.end_slack = slack;
        rep.end_slack_tol = tol;
    }
    return rep;
}

std::vector<MonitorRecord> monitor_sample_decrease(const HybridTrajectory& traj, const StcConfig& cfg) {
    std::vector<MonitorRecord> out;
    if (traj.samples.empty()) {
        return out;
    }
    const auto tol_for = [](double bound) { return kMonitorTolerance * (1.0 + bound); };
    const auto push = [&out](const char* name, int j, double slack, double tol) {
        out.push_back({name, j, slack, tol, slack >= -tol});
    };

    const double eps_1 = cfg.family.fallback().epsilon;
    const double eps_tilde = std::min(eps_1, cfg.eps_ref);
    const double rho = std::exp(-eps_tilde * traj.t_min);

    const auto& s0 = traj.samples.front();
    const double eta0_max = s0.eta.empty() ? 0.0 : *std::max_element(s0.eta.begin(), s0.eta.end());
    const double cap0 = std::max(s0.v, eta0_max);

    const std::size_t intervals = std::min(traj.decisions.size(), traj.samples.size() - 1);
    for (std::size_t j = 0; j < intervals; ++j) {
        const auto& d = traj.decisions[j];
        const auto& now = traj.samples[j];
        const double v_next = traj.samples[j + 1].v;
        const int jj = static_cast<int>(j);

        const double range_tol = 1e-12 * (1.0 + traj.t_cap);
        push("interval_bounds", jj, std::min(d.h - traj.t_min, traj.t_cap - d.h), range_tol);

        if (d.bound_type == BoundType::window) {
            const double bound = std::exp(-cfg.eps_ref * d.h) * d.c_val;
            push("sample_decrease", jj, bound - v_next, tol_for(bound));
        } else if (d.bound_type == BoundType::fallback) {
            const double bound = std::exp(-eps_1 * d.h) * now.v;
            push("sample_decrease", jj, bound - v_next, tol_for(bound));
        }

        const double eta_max = now.eta.empty() ? 0.0 : *std::max_element(now.eta.begin(), now.eta.end());
        const double combined = rho * std::max(now.v, eta_max);
        push("combined_decrease", jj, combined - v_next, tol_for(combined));
    }

    for (const auto& s : traj.samples) {
        push("running_cap", s.j, cap0 - s.v, tol_for(cap0));
        const auto blocks = static_cast<double>(s.j / std::max(1, cfg.m));
        const double envelope = std::pow(rho, blocks) * cap0;
        push("window_envelope", s.j, envelope - s.v, tol_for(envelope));
    }
    return out;
}

}  // namespace dstc
