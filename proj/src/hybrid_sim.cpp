#include "dstc/hybrid_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>

#include "dstc/errors.hpp"
#include "dstc/monitors.hpp"

namespace dstc {
namespace {

struct FlowResult {
    Vector x_end;
    double v_max = 0.0;
};

std::string where(double t, int j) {
    std::ostringstream os;
    os << "(t = " << t << ", j = " << j << ")";
    return os.str();
}

// Fixed-step RK4 of x' = f(x, x_hold - x) over [0, h]; the last step is shortened to land
// exactly on h. Appends the recorded flow points to `out`.
FlowResult integrate_flow(const SystemSpec& spec, const Vector& x_hold, double h, double dt, double t0,
                          int j_flow, std::vector<FlowPoint>& out) {
    const double c_limit = spec.region_c * (1.0 + kRegionTolerance);
    const auto rhs = [&](const Vector& x) { return spec.f(x, x_hold - x); };
    const auto record = [&](double tau, const Vector& x, double v) {
        out.push_back({t0 + tau, j_flow, tau, x, v, spec.w(x_hold - x), std::numeric_limits<double>::quiet_NaN()});
    };

    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(h / dt - 1e-9)));
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(h / dt / kFlowRecordsPerInterval)));

    Vector x = x_hold;
    double v = spec.v(x);
    FlowResult res;
    res.v_max = v;
    record(0.0, x, v);

    double tau = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double tau_next = k + 1 == steps ? h : static_cast<double>(k + 1) * dt;
        const double step = tau_next - tau;
        const Vector k1 = rhs(x);
        const Vector k2 = rhs(x + 0.5 * step * k1);
        const Vector k3 = rhs(x + 0.5 * step * k2);
        const Vector k4 = rhs(x + step * k3);
        x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau = tau_next;

        if (!x.allFinite()) {
            throw IntegrationError("non-finite state during flow at " + where(t0 + tau, j_flow));
        }
        v = spec.v(x);
        res.v_max = std::max(res.v_max, v);
        if (v > c_limit) {
            std::ostringstream os;
            os << "V = " << v << " left the region V <= " << spec.region_c << " at " << where(t0 + tau, j_flow);
            throw RegionViolation(os.str());
        }
        if (k + 1 == steps || (k + 1) % stride == 0) {
            record(tau, x, v);
        }
    }
    res.x_end = std::move(x);
    return res;
}

void check_start(const Vector& x0, const SystemSpec& spec, double t_end, double dt_flow) {
    if (x0.size() != spec.state_dim) {
        throw DomainError("x0 has dimension " + std::to_string(x0.size()) + ", system expects " +
                          std::to_string(spec.state_dim));
    }
    if (!x0.allFinite()) {
        throw DomainError("x0 has non-finite entries");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw DomainError("t_end must be finite and > 0");
    }
    if (!(dt_flow > 0.0)) {
        throw DomainError("dt_flow must be > 0");
    }
    if (spec.v(x0) > spec.region_c) {
        throw RegionViolation("x0 lies outside the region V <= c");
    }
}

MonitorRecord region_record(const SystemSpec& spec, int j, double v_max) {
    const double tol = kRegionTolerance * spec.region_c;
    const double slack = spec.region_c - v_max;
    return {"region", j, slack, tol, slack >= -tol};
}

}  // namespace

std::size_t HybridTrajectory::violation_count() const {
    return static_cast<std::size_t>(
        std::count_if(monitors.begin(), monitors.end(), [](const MonitorRecord& r) { return !r.pass; }));
}

std::size_t HybridTrajectory::samples_before(double t) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [t](const SampleRecord& s) { return s.t < t; }));
}

HybridTrajectory simulate(const Vector& x0, const StcConfig& cfg, const SystemSpec& spec, double t_end,
                          double dt_flow) {
    cfg.validate();
    check_start(x0, spec, t_end, dt_flow);
    const double t_min = cfg.t_min();
    if (dt_flow > t_min / 16.0) {
        throw DomainError("dt_flow must not exceed t_min / 16 = " + std::to_string(t_min / 16.0));
    }

    HybridTrajectory traj;
    traj.mechanism = cfg.m == 1 ? "static" : "dynamic";
    traj.t_min = t_min;
    traj.t_cap = cfg.t_cap();

    HybridState xi;
    xi.x = x0;
    xi.e = Vector::Zero(spec.error_dim);
    xi.eta = initial_eta(cfg, spec.v(x0));

    double t = 0.0;
    for (int j = 0;; ++j) {
        traj.samples.push_back({t, j, xi.x, spec.v(xi.x), xi.eta.eta});
        if (t >= t_end) {
            break;
        }
        auto [next, decision] = stc_step(xi, cfg, spec);
        traj.decisions.push_back(decision);

        const std::size_t first = traj.flow_points.size();
        const FlowResult flow = integrate_flow(spec, next.x, decision.h, dt_flow, t, j + 1, traj.flow_points);
        const std::span<FlowPoint> segment(traj.flow_points.begin() + static_cast<std::ptrdiff_t>(first),
                                           traj.flow_points.end());

        const auto& ps = cfg.family.sets.at(static_cast<std::size_t>(decision.set_index));
        const double v_start = spec.v(next.x);
        FlowBoundReport fb = monitor_flow_bound(segment, v_start, ps, decision.lambda_cap_used, decision.h);
        if (fb.applicable) {
            for (std::size_t k = 0; k < segment.size(); ++k) {
                segment[k].u = fb.u[k];
            }
            const double tol_u = kMonitorTolerance * (1.0 + v_start);
            traj.monitors.push_back({"flow_v_le_u", j, fb.min_u_minus_v, tol_u, fb.min_u_minus_v >= -tol_u});
            traj.monitors.push_back(
                {"flow_envelope", j, fb.min_slack, fb.min_slack_tol, fb.min_slack >= -fb.min_slack_tol});
            traj.monitors.push_back(
                {"flow_envelope_end", j, fb.end_slack, fb.end_slack_tol, fb.end_slack >= -fb.end_slack_tol});
        } else {
            traj.monitors.push_back({"flow_inapplicable", j, -1.0, 0.0, false});
        }
        traj.monitors.push_back(region_record(spec, j, flow.v_max));

        t += decision.h;
        next.x = flow.x_end;
        next.e = segment.front().x - flow.x_end;
        next.tau = next.s;
        xi = std::move(next);
    }

    auto sample_monitors = monitor_sample_decrease(traj, cfg);
    traj.monitors.insert(traj.monitors.end(), std::make_move_iterator(sample_monitors.begin()),
                         std::make_move_iterator(sample_monitors.end()));
    return traj;
}

HybridTrajectory simulate_periodic(const Vector& x0, const SystemSpec& spec, double period, double t_end,
                                   double dt_flow) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw DomainError("period must be finite and > 0");
    }
    check_start(x0, spec, t_end, dt_flow);

    HybridTrajectory traj;
    traj.mechanism = "periodic";
    traj.t_min = period;
    traj.t_cap = period;

    Vector x = x0;
    double t = 0.0;
    for (int j = 0;; ++j) {
        const double v = spec.v(x);
        traj.samples.push_back({t, j, x, v, {}});
        if (t >= t_end) {
            break;
        }
        TriggerDecision d;
        d.h = period;
        d.v = v;
        d.c_val = std::numeric_limits<double>::quiet_NaN();
        d.bound_type = BoundType::none;
        traj.decisions.push_back(d);

        const FlowResult flow = integrate_flow(spec, x, period, dt_flow, t, j + 1, traj.flow_points);
        traj.monitors.push_back(region_record(spec, j, flow.v_max));
        x = flow.x_end;
        t += period;
    }
    return traj;
}

}  // namespace dstc
