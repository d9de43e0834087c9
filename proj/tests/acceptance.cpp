// Acceptance suite: prints one PASS/FAIL line per criterion.
// Usage: dstc_acceptance [criterion ...]   (default: all of 1..8)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dstc/hybrid_sim.hpp"
#include "dstc/monitors.hpp"
#include "dstc/stc.hpp"
#include "dstc/synthesis.hpp"
#include "dstc/system.hpp"
#include "dstc/timing.hpp"
#include "oracles.hpp"

using namespace dstc;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> failed;
    std::vector<std::string> soft;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failed.push_back(what);
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int worker_count() {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

constexpr double kDelta = 0.999;
constexpr double kEpsRef = 0.01;
constexpr int kWindow = 30;
constexpr double kTEnd = 15.0;
constexpr int kSynthesisDensity = 24;

const SystemSpec& vdp() {
    static const SystemSpec s = van_der_pol();
    return s;
}

const ParameterFamily& vdp_family() {
    static const ParameterFamily f = [] {
        const auto eps = log_spaced_epsilons(0.01, 21, -40.0);
        return build_family(vdp(), eps, 0.05, kSynthesisDensity, worker_count());
    }();
    return f;
}

StcConfig vdp_config(int m) {
    StcConfig cfg;
    cfg.delta = kDelta;
    cfg.eps_ref = kEpsRef;
    cfg.m = m;
    cfg.c = 10.0;
    cfg.family = vdp_family();
    return cfg;
}

Vector vdp_x0() {
    Vector x(2);
    x << -0.3, 1.7;
    return x;
}

// 1. Timing functions.
void criterion_1(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> lg(-2.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double worst_cont = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double cap = std::pow(10.0, lg(rng));
        for (double off : {1e-12, 1e-9, 1e-6}) {
            worst_cont = std::max(worst_cont, std::abs(t_max(cap * (1 + off), cap) - 1.0 / cap) * cap);
            worst_cont = std::max(worst_cont, std::abs(t_max(cap * (1 - off), cap) - 1.0 / cap) * cap);
        }
    }
    o.require(worst_cont <= 1e-4, "t_max continuity at gamma = Lambda");

    int order_fail = 0;
    double worst_rt = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double g = std::pow(10.0, lg(rng));
        const double cap = std::pow(10.0, lg(rng));
        const double l1 = 0.001 + 0.998 * unit(rng);
        const double l2 = 0.001 + 0.998 * unit(rng);
        const double tm = t_max(g, cap);
        const double a = t_tilde_max(l1, g, cap);
        const double b = t_tilde_max(l2, g, cap);
        if (!(a < tm) || !(b < tm) || (l1 < l2 && !(a > b)) || (l1 > l2 && !(a < b))) {
            ++order_fail;
        }
        const double back = solve_lambda_for_horizon(a, g, cap);
        worst_rt = std::max(worst_rt, std::abs(back - l1));
    }
    o.require(order_fail == 0, "t_tilde_max < t_max and decreasing in lambda");
    o.require(worst_rt <= 1e-8, "solve_lambda round trip <= 1e-8");
    const double secs = seconds_since(t0);
    o.require(secs < 1.0, "runtime < 1 s");
    o.detail << "continuity " << worst_cont << "/Lambda, ordering failures " << order_fail << ", round trip "
             << worst_rt << ", " << secs << " s";
}

// 2. Riccati solution.
void criterion_2(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> lg(-2.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int init_fail = 0;
    double worst_range = 0.0;
    double worst_end = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double lam = 0.01 + 0.98 * unit(rng);
        const double g = std::pow(10.0, lg(rng));
        const double cap = std::pow(10.0, lg(rng));
        const PhiSolution phi = phi_solve(lam, g, cap);
        if (phi(0.0) != 1.0 / lam) {
            ++init_fail;
        }
        const int n = 4 * PhiSolution::kSteps;
        for (int i = 0; i <= n; ++i) {
            const double v = phi(phi.horizon() * i / n);
            worst_range = std::max({worst_range, lam - v, v - 1.0 / lam});
        }
        worst_end = std::max(worst_end, std::abs(phi(phi.horizon()) - lam) * lam);
    }
    o.require(init_fail == 0, "phi(0) = 1/lambda exactly");
    o.require(worst_range <= 1e-6, "phi within [lambda - 1e-6, 1/lambda + 1e-6]");
    o.require(worst_end <= 1e-6, "|phi(T~) - lambda| <= 1e-6 / lambda");
    const double secs = seconds_since(t0);
    o.require(secs < 5.0, "runtime < 5 s");
    o.detail << "range excess " << worst_range << ", endpoint error*lambda " << worst_end << ", " << secs << " s";
}

// 3. Algorithm 1 against a brute-force line search.
void criterion_3(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int instances = 0;
    int mismatch = 0;
    int below_tmin = 0;
    int above_cap = 0;
    double worst = 0.0;
    for (int fam = 0; fam < 200; ++fam) {
        StcConfig cfg;
        cfg.delta = kDelta;
        cfg.eps_ref = kEpsRef;
        cfg.m = 1;
        std::vector<oracle::SetData> data;
        const int n = 1 + static_cast<int>(unit(rng) * 21);
        for (int i = 0; i < n; ++i) {
            const double eps = i == 0 ? 0.001 + unit(rng) : 0.1 - std::pow(10.0, 4.0 * unit(rng) - 2.5);
            const double g = std::pow(10.0, 2.5 * unit(rng) - 0.5);
            const double l = 0.01 + 0.2 * unit(rng);
            cfg.family.sets.push_back({eps, g, l, 0.0, 0});
            data.push_back({eps, g, l});
        }
        const double t_min = cfg.t_min();
        std::vector<double> caps;
        for (const auto& s : data) {
            caps.push_back(kDelta * oracle::t_max(s.gamma, std::max(s.l_const + 0.5 * s.epsilon, 1 - kDelta)));
        }
        for (int k = 0; k < 50; ++k) {
            const double v = 10.0 * unit(rng);
            const double c = 10.0 * unit(rng);
            const TriggerDecision d = decide_interval(v, c, cfg);
            const double ref = oracle::trigger_interval(v, c, data, 0, kDelta, kEpsRef);
            const double cap_used = d.used_fallback ? t_min : caps.at(static_cast<std::size_t>(d.set_index));
            const double err = std::abs(d.h - ref) / cap_used;
            worst = std::max(worst, err);
            mismatch += err > 1e-5 ? 1 : 0;
            below_tmin += d.h < t_min ? 1 : 0;
            above_cap += d.h > cap_used * (1 + 1e-5) ? 1 : 0;
            ++instances;
        }
    }
    o.require(instances == 10000, "10 000 instances");
    o.require(mismatch == 0, "h equals the line-search maximizer within 1e-5 dT_max");
    o.require(above_cap == 0, "h <= dT_max");
    o.require(below_tmin == 0, "h >= t_min");
    const double secs = seconds_since(t0);
    o.require(secs < 10.0, "runtime < 10 s");
    o.detail << instances << " instances, worst relative error " << worst << ", " << secs << " s";
}

// 4. Fall-back decrease on the linear system.
void criterion_4(Outcome& o) {
    const auto t0 = Clock::now();
    const SystemSpec s = linear_test(1, 1.0);
    StcConfig cfg;
    cfg.delta = kDelta;
    cfg.eps_ref = kEpsRef;
    cfg.m = 1;
    cfg.c = 1.0;
    cfg.family = build_family(s, std::vector<double>{0.5}, 0.05, 32);
    const double eps = cfg.family.fallback().epsilon;
    const double t_min = cfg.t_min();
    const double factor = std::exp(-eps * kDelta * t_max(cfg.family.fallback().gamma, cfg.family.fallback().fallback_lambda()));
    std::size_t pairs = 0;
    std::size_t bad = 0;
    for (double x0 : {0.99, -0.7, 0.3, -0.05}) {
        const auto traj = simulate(Vector::Constant(1, x0), cfg, s, 5.0, t_min / 32);
        for (std::size_t j = 0; j + 1 < traj.samples.size(); ++j) {
            ++pairs;
            bad += traj.samples[j + 1].v > factor * traj.samples[j].v * (1 + 1e-6) ? 1 : 0;
        }
    }
    o.require(bad == 0, "V(t_{j+1}) <= exp(-eps_1 t_min) V(t_j)");
    const double secs = seconds_since(t0);
    o.require(secs < 1.0, "runtime < 1 s");
    o.detail << pairs << " sample pairs, " << bad << " violations, gamma_1 = " << cfg.family.fallback().gamma << ", "
             << secs << " s";
}

// 5. Van der Pol end to end.
void criterion_5(Outcome& o) {
    const auto t0 = Clock::now();
    const StcConfig cfg = vdp_config(kWindow);
    const double t_min = cfg.t_min();
    const double dt = t_min / 32;
    const auto traj = simulate(vdp_x0(), cfg, vdp(), kTEnd, dt);
    const auto per = simulate_periodic(vdp_x0(), vdp(), t_min, kTEnd, dt);

    o.require(traj.violation_count() == 0, "(a) zero monitor violations");
    std::size_t out_of_range = 0;
    for (const auto& d : traj.decisions) {
        out_of_range += (d.h < t_min || d.h > traj.t_cap) ? 1 : 0;
    }
    o.require(out_of_range == 0, "(b) intervals in [t_min, t_cap]");
    const std::size_t n_dyn = traj.samples_before(5.0);
    const std::size_t n_per = per.samples_before(5.0);
    o.require(static_cast<double>(n_dyn) <= 0.6 * static_cast<double>(n_per),
              "(c) first-5 s count <= 0.6 x periodic-at-t_min count");
    const double secs = seconds_since(t0);
    o.require(secs < 30.0, "runtime < 30 s");

    double h_lo = 1e9, h_hi = 0.0;
    for (std::size_t j = traj.decisions.size() / 2; j < traj.decisions.size(); ++j) {
        h_lo = std::min(h_lo, traj.decisions[j].h);
        h_hi = std::max(h_hi, traj.decisions[j].h);
    }
    o.detail << "violations " << traj.violation_count() << ", intervals out of range " << out_of_range
             << ", first 5 s: dynamic " << n_dyn << " vs periodic " << n_per << " (ratio "
             << static_cast<double>(n_dyn) / static_cast<double>(n_per) << "), t_cap/t_min "
             << traj.t_cap / t_min << ", " << secs << " s";

    char buf[256];
    std::snprintf(buf, sizeof(buf), "t_min = %.4f s, target [0.01, 0.05] s: %s", t_min,
                  t_min >= 0.01 && t_min <= 0.05 ? "met" : "missed");
    o.soft.emplace_back(buf);
    std::snprintf(buf, sizeof(buf), "samples in first 5 s = %zu, target [45, 180]: %s", n_dyn,
                  n_dyn >= 45 && n_dyn <= 180 ? "met" : "missed");
    o.soft.emplace_back(buf);
    std::snprintf(buf, sizeof(buf), "late-run interval band [%.4f, %.4f] s (reference band 0.05-0.07 s)", h_lo, h_hi);
    o.soft.emplace_back(buf);
    std::snprintf(buf, sizeof(buf), "gamma_1 = %.4f, first interval = %.4f s", cfg.family.fallback().gamma,
                  traj.decisions.front().h);
    o.soft.emplace_back(buf);
}

// 6. m = 1 reduces to the static mechanism; dynamic samples no more than static.
void criterion_6(Outcome& o) {
    const StcConfig one = vdp_config(1);
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(-1.9, 1.9);
    int checked = 0;
    int differ = 0;
    while (checked < 1000) {
        Vector x(2);
        x << u(rng), u(rng);
        if (!in_region(vdp(), x)) {
            continue;
        }
        const TriggerDecision a = gamma_trigger(x, DynamicVariable{}, one, vdp());
        const TriggerDecision b = static_trigger(x, one, vdp());
        const bool same = a.h == b.h && a.set_index == b.set_index && a.used_fallback == b.used_fallback &&
                          a.bound_type == b.bound_type && a.lambda_cap_used == b.lambda_cap_used &&
                          a.c_val == b.c_val;
        differ += same ? 0 : 1;
        ++checked;
    }
    o.require(differ == 0, "m = 1 decisions bit-match the static mechanism");

    const double dt = one.t_min() / 32;
    const auto dyn = simulate(vdp_x0(), vdp_config(kWindow), vdp(), kTEnd, dt);
    const auto sta = simulate(vdp_x0(), one, vdp(), kTEnd, dt);
    const std::size_t n_dyn = dyn.samples_before(kTEnd);
    const std::size_t n_sta = sta.samples_before(kTEnd);
    o.require(n_dyn <= n_sta, "dynamic 15 s count <= static count");
    o.detail << checked << " states, " << differ << " mismatches; 15 s counts dynamic " << n_dyn << ", static "
             << n_sta;
}

// 7. Re-verification on a 2x finer grid; corrupted set rejected.
void criterion_7(Outcome& o) {
    const auto& fam = vdp_family();
    const int jobs = worker_count();
    int failed = 0;
    double worst = -1e300;
    for (const auto& ps : fam.sets) {
        const AssumptionReport rep = verify_assumption(vdp(), ps, 2 * kSynthesisDensity, jobs);
        worst = std::max(worst, rep.max_residual / rep.scale);
        failed += rep.certified_within(1e-6) ? 0 : 1;
    }
    ParameterSet corrupted = fam.fallback();
    corrupted.gamma *= 0.5;
    const AssumptionReport bad = verify_assumption(vdp(), corrupted, 2 * kSynthesisDensity, jobs);
    o.require(failed == 0, "every set re-verifies at 2x density");
    o.require(!bad.certified_within(1e-6), "halved gamma is rejected");
    o.detail << fam.sets.size() << " sets, worst residual/scale " << worst << ", corrupted residual/scale "
             << bad.max_residual / bad.scale;
}

// 8. Halving dt_flow leaves slacks and decisions unchanged.
void criterion_8(Outcome& o) {
    const StcConfig cfg = vdp_config(kWindow);
    const double dt = cfg.t_min() / 32;
    const auto a = simulate(vdp_x0(), cfg, vdp(), kTEnd, dt);
    const auto b = simulate(vdp_x0(), cfg, vdp(), kTEnd, dt / 2);

    bool same_shape = a.decisions.size() == b.decisions.size();
    std::size_t decision_changes = 0;
    for (std::size_t j = 0; same_shape && j < a.decisions.size(); ++j) {
        const auto& p = a.decisions[j];
        const auto& q = b.decisions[j];
        const bool same = p.set_index == q.set_index && p.used_fallback == q.used_fallback &&
                          p.bound_type == q.bound_type && std::abs(p.h - q.h) <= 1e-9 * a.t_cap;
        decision_changes += same ? 0 : 1;
    }
    std::map<std::pair<std::string, int>, const MonitorRecord*> ref;
    for (const auto& m : a.monitors) {
        ref[{m.name, m.j}] = &m;
    }
    std::size_t compared = 0;
    std::size_t unstable = 0;
    double worst = 0.0;
    for (const auto& m : b.monitors) {
        const auto it = ref.find({m.name, m.j});
        if (it == ref.end()) {
            same_shape = false;
            continue;
        }
        const double tol = std::max(m.tol, it->second->tol);
        const double diff = std::abs(m.slack - it->second->slack);
        worst = std::max(worst, tol > 0 ? diff / tol : 0.0);
        unstable += diff < 10.0 * tol ? 0 : 1;
        ++compared;
    }
    same_shape = same_shape && compared == a.monitors.size();
    o.require(same_shape, "same hybrid time domain and monitor set");
    o.require(decision_changes == 0, "no trigger decision changes");
    o.require(unstable == 0, "slack changes < 10 x tolerance");
    o.detail << a.decisions.size() << " decisions, " << decision_changes << " changed; " << compared
             << " monitor slacks, worst change " << worst << " x tol";
}

const std::map<int, std::pair<const char*, std::function<void(Outcome&)>>>& criteria() {
    static const std::map<int, std::pair<const char*, std::function<void(Outcome&)>>> all = {
        {1, {"timing functions", criterion_1}},
        {2, {"Riccati solution", criterion_2}},
        {3, {"trigger vs line-search oracle", criterion_3}},
        {4, {"fall-back decrease (linear system)", criterion_4}},
        {5, {"Van der Pol end to end", criterion_5}},
        {6, {"m = 1 degeneracy and static dominance", criterion_6}},
        {7, {"re-verification soundness", criterion_7}},
        {8, {"refinement stability", criterion_8}},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::atoi(argv[i]));
    }
    if (selected.empty()) {
        for (const auto& [id, _] : criteria()) {
            selected.insert(id);
        }
    }
    int failures = 0;
    for (int id : selected) {
        const auto it = criteria().find(id);
        if (it == criteria().end()) {
            std::printf("FAIL criterion %d: unknown criterion\n", id);
            ++failures;
            continue;
        }
        Outcome o;
        try {
            it->second.second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, it->second.first,
                    o.detail.str().c_str());
        for (const auto& f : o.failed) {
            std::printf("  not met: %s\n", f.c_str());
        }
        for (const auto& s : o.soft) {
            std::printf("SOFT criterion %d: %s\n", id, s.c_str());
        }
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
