#include "dstc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "dstc/errors.hpp"
#include "dstc/hybrid_sim.hpp"
#include "dstc/timing.hpp"

namespace dstc {
namespace fs = std::filesystem;

namespace {

constexpr double kVerifyRelTol = 1e-6;

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

template <typename T>
T field(const json& obj, const char* key, T fallback) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return fallback;
    }
    try {
        return it->get<T>();
    } catch (const json::exception& err) {
        throw ConfigError(std::string("field '") + key + "': " + err.what());
    }
}

const json& block(const json& doc, const char* key) {
    static const json empty = json::object();
    const auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return empty;
    }
    if (!it->is_object()) {
        throw ConfigError(std::string("'") + key + "' must be an object");
    }
    return *it;
}

std::vector<double> parse_epsilons(const json& node) {
    try {
        if (node.is_array()) {
            return node.get<std::vector<double>>();
        }
        if (node.is_object()) {
            const double fb = node.value("fallback", 0.01);
            const auto count = node.value("count", std::size_t{21});
            const double most_negative = node.value("most_negative", -40.0);
            if (count < 1) {
                throw ConfigError("synthesis.epsilons.count must be >= 1");
            }
            if (count > 1 && !(most_negative < 0.0)) {
                throw ConfigError("synthesis.epsilons.most_negative must be < 0");
            }
            if (!(fb > 0.0)) {
                throw ConfigError("synthesis.epsilons.fallback must be > 0");
            }
            return log_spaced_epsilons(fb, count, most_negative);
        }
    } catch (const json::exception& err) {
        throw ConfigError(std::string("synthesis.epsilons: ") + err.what());
    } catch (const DomainError& err) {
        throw ConfigError(std::string("synthesis.epsilons: ") + err.what());
    }
    throw ConfigError("synthesis.epsilons must be a list or a {fallback, count, most_negative} object");
}

fs::path output_dir(const ExperimentConfig& cfg, const CommandOptions& opt) {
    return fs::path(opt.out.value_or(cfg.output_dir));
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

template <typename Fn>
void for_each_parallel(std::size_t n, int jobs, Fn fn) {
    const std::size_t workers = std::clamp<std::size_t>(jobs > 0 ? jobs : 1, 1, std::max<std::size_t>(n, 1));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

ParameterFamily synthesize_family(const ExperimentConfig& cfg, int jobs) {
    return build_family(cfg.system, cfg.synthesis.epsilons, cfg.synthesis.l_const, cfg.synthesis.grid_density,
                        jobs);
}

// Manifest from <out>/family.json if present, otherwise synthesized (and written).
ParameterFamily obtain_family(const ExperimentConfig& cfg, const fs::path& dir, int jobs, std::ostream& out) {
    const fs::path manifest = dir / "family.json";
    if (fs::exists(manifest)) {
        out << "using parameter family " << manifest.string() << "\n";
        return family_from_json(read_json_file(manifest.string()));
    }
    if (!cfg.has_synthesis) {
        throw ConfigError("no manifest at '" + manifest.string() + "' and no synthesis block in the config");
    }
    ParameterFamily family = synthesize_family(cfg, jobs);
    ensure_dir(dir);
    write_text_file(manifest.string(), family_to_json(family).dump(2) + "\n");
    out << "synthesized parameter family -> " << manifest.string() << "\n";
    return family;
}

double flow_step(const ExperimentConfig& cfg, double t_min) {
    const double dt = cfg.run.dt_flow.value_or(t_min / 32.0);
    if (!(dt > 0.0) || dt > t_min / 16.0) {
        throw ConfigError("run.dt_flow = " + format_double(dt) + " must lie in (0, t_min / 16 = " +
                          format_double(t_min / 16.0) + "]");
    }
    return dt;
}

// Preconditions that need the family (t_min, region check of x0).
void validate_for_family(const ExperimentConfig& cfg, const ParameterFamily& family) {
    try {
        family.validate();
        cfg.stc(family, cfg.m).validate();
        cfg.stc(family, 1).validate();
    } catch (const DomainError& err) {
        throw ConfigError(err.what());
    }
    (void)flow_step(cfg, family.t_min(cfg.delta));
}

std::string run_stem(std::size_t index, const std::string& mechanism) {
    return "run" + std::to_string(index) + "_" + mechanism;
}

struct RunTask {
    std::size_t x0_index;
    std::string mechanism;
};

json interval_stats(const HybridTrajectory& traj) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double sum = 0.0;
    for (const auto& d : traj.decisions) {
        lo = std::min(lo, d.h);
        hi = std::max(hi, d.h);
        sum += d.h;
    }
    const auto n = static_cast<double>(traj.decisions.size());
    return {{"min", traj.decisions.empty() ? 0.0 : lo},
            {"mean", traj.decisions.empty() ? 0.0 : sum / n},
            {"max", hi}};
}

std::string summary_table(const json& runs, double window) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof(line), "%-5s %-9s %10s %10s %10s %10s %10s %10s\n", "x0", "mechanism", "samples",
                  "first_win", "h_min", "h_mean", "h_max", "violations");
    os << "window = " << format_double(window) << " s\n" << line;
    for (const auto& r : runs) {
        std::snprintf(line, sizeof(line), "%-5zu %-9s %10zu %10zu %10.5f %10.5f %10.5f %10zu\n",
                      r.at("x0_index").get<std::size_t>(), r.at("mechanism").get<std::string>().c_str(),
                      r.at("samples").get<std::size_t>(), r.at("samples_in_window").get<std::size_t>(),
                      r.at("interval").at("min").get<double>(), r.at("interval").at("mean").get<double>(),
                      r.at("interval").at("max").get<double>(), r.at("violations").get<std::size_t>());
        os << line;
    }
    return os.str();
}

}  // namespace

StcConfig ExperimentConfig::stc(const ParameterFamily& family, int window) const {
    StcConfig s;
    s.delta = delta;
    s.eps_ref = eps_ref;
    s.m = window;
    s.c = c;
    s.family = family;
    s.eta_init = eta_init;
    if (window == m) {
        s.eta_values = eta_values;
    } else if (eta_init == EtaInit::explicit_values) {
        s.eta_init = EtaInit::current_value;
    }
    return s;
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    ExperimentConfig cfg;
    if (!doc.contains("system")) {
        throw ConfigError("config needs a 'system' block");
    }
    cfg.system_doc = block(doc, "system");
    cfg.system = system_from_json(cfg.system_doc);

    const json& stc = block(doc, "stc");
    cfg.delta = field(stc, "delta", cfg.delta);
    cfg.eps_ref = field(stc, "eps_ref", cfg.eps_ref);
    cfg.m = field(stc, "m", cfg.m);
    cfg.c = field(stc, "c", cfg.system.region_c);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
        throw ConfigError("stc.delta must lie strictly inside (0, 1)");
    }
    if (!(cfg.eps_ref > 0.0) || !std::isfinite(cfg.eps_ref)) {
        throw ConfigError("stc.eps_ref must be finite and > 0");
    }
    if (cfg.m < 1) {
        throw ConfigError("stc.m must be >= 1");
    }
    if (!(cfg.c > 0.0) || cfg.c > cfg.system.region_c) {
        throw ConfigError("stc.c must lie in (0, " + format_double(cfg.system.region_c) +
                          "], the level the system sets were built for");
    }
    if (stc.contains("eta_init")) {
        const json& ei = stc.at("eta_init");
        if (ei.is_string() && ei.get<std::string>() == "current") {
            cfg.eta_init = EtaInit::current_value;
        } else if (ei.is_string() && ei.get<std::string>() == "zero") {
            cfg.eta_init = EtaInit::zero;
        } else if (ei.is_array()) {
            cfg.eta_init = EtaInit::explicit_values;
            cfg.eta_values = field(stc, "eta_init", std::vector<double>{});
            if (cfg.eta_values.size() != static_cast<std::size_t>(cfg.m - 1)) {
                throw ConfigError("stc.eta_init list must have m - 1 = " + std::to_string(cfg.m - 1) + " entries");
            }
            for (double v : cfg.eta_values) {
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    throw ConfigError("stc.eta_init entries must be finite and >= 0");
                }
            }
        } else {
            throw ConfigError("stc.eta_init must be \"current\", \"zero\" or a list of m - 1 values");
        }
    }

    if (doc.contains("synthesis")) {
        const json& syn = block(doc, "synthesis");
        cfg.has_synthesis = true;
        cfg.synthesis.epsilons = parse_epsilons(syn.contains("epsilons") ? syn.at("epsilons") : json::object());
        cfg.synthesis.l_const = field(syn, "L", cfg.synthesis.l_const);
        cfg.synthesis.grid_density = field(syn, "grid_density", cfg.synthesis.grid_density);
        cfg.synthesis.verify_density = field(syn, "verify_density", cfg.synthesis.verify_density);
        cfg.synthesis.random_points = field(syn, "random_points", cfg.synthesis.random_points);
        if (cfg.synthesis.epsilons.empty()) {
            throw ConfigError("synthesis.epsilons is empty");
        }
        for (double e : cfg.synthesis.epsilons) {
            if (!std::isfinite(e)) {
                throw ConfigError("synthesis.epsilons must be finite");
            }
        }
        if (std::none_of(cfg.synthesis.epsilons.begin(), cfg.synthesis.epsilons.end(),
                         [](double e) { return e > 0.0; })) {
            throw ConfigError(
                "stability needs a fall-back parameter set with epsilon > 0, but no epsilon in the list is positive");
        }
        if (!(cfg.synthesis.l_const > 0.0) || !std::isfinite(cfg.synthesis.l_const)) {
            throw ConfigError("synthesis.L must be finite and > 0");
        }
        if (cfg.synthesis.grid_density < 8) {
            throw ConfigError("synthesis.grid_density must be >= 8");
        }
        if (cfg.synthesis.verify_density != 0 && cfg.synthesis.verify_density < 8) {
            throw ConfigError("synthesis.verify_density must be 0 (auto) or >= 8");
        }
        if (cfg.synthesis.random_points < 0) {
            throw ConfigError("synthesis.random_points must be >= 0");
        }
    }

    const json& run = block(doc, "run");
    try {
        for (const auto& p : run.value("x0", json::array())) {
            const auto v = p.get<std::vector<double>>();
            cfg.run.x0.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
    } catch (const json::exception& err) {
        throw ConfigError(std::string("run.x0: ") + err.what());
    }
    cfg.run.t_end = field(run, "t_end", cfg.run.t_end);
    if (run.contains("dt_flow") && !run.at("dt_flow").is_null()) {
        cfg.run.dt_flow = field(run, "dt_flow", 0.0);
    }
    cfg.run.count_window = field(run, "count_window", cfg.run.count_window);
    const json& baselines = block(run, "baselines");
    cfg.run.static_baseline = field(baselines, "static", true);
    cfg.run.periodic_baseline = field(baselines, "periodic", true);
    if (!(cfg.run.t_end > 0.0) || !std::isfinite(cfg.run.t_end)) {
        throw ConfigError("run.t_end must be finite and > 0");
    }
    if (!(cfg.run.count_window > 0.0)) {
        throw ConfigError("run.count_window must be > 0");
    }
    if (cfg.run.dt_flow && !(*cfg.run.dt_flow > 0.0)) {
        throw ConfigError("run.dt_flow must be > 0");
    }
    for (std::size_t i = 0; i < cfg.run.x0.size(); ++i) {
        const Vector& x = cfg.run.x0[i];
        if (x.size() != cfg.system.state_dim || !x.allFinite()) {
            throw ConfigError("run.x0[" + std::to_string(i) + "] must have " +
                              std::to_string(cfg.system.state_dim) + " finite entries");
        }
        if (cfg.system.v(x) > cfg.c) {
            throw ConfigError("run.x0[" + std::to_string(i) + "] lies outside the region V <= c (V = " +
                              format_double(cfg.system.v(x)) + ")");
        }
    }

    cfg.output_dir = field<std::string>(doc, "output", cfg.output_dir);
    if (cfg.output_dir.empty()) {
        throw ConfigError("output must be a non-empty path");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_json_file(path));
}

int cmd_synthesize(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out) {
    if (!cfg.has_synthesis) {
        throw ConfigError("the config has no synthesis block");
    }
    const fs::path dir = output_dir(cfg, opt);
    ParameterFamily family = synthesize_family(cfg, opt.jobs);
    validate_for_family(cfg, family);
    ensure_dir(dir);
    const fs::path manifest = dir / "family.json";
    write_text_file(manifest.string(), family_to_json(family).dump(2) + "\n");

    const StcConfig stc = cfg.stc(family, cfg.m);
    out << "system " << cfg.system.name << ", " << family.sets.size() << " parameter sets -> " << manifest.string()
        << "\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%3s %12s %12s %8s %10s %12s %12s\n", "i", "epsilon", "gamma", "L",
                  "Lambda", "dT_max", "margin");
    out << line;
    for (std::size_t i = 0; i < family.sets.size(); ++i) {
        const auto& ps = family.sets[i];
        const double lam = i == family.fallback_index ? ps.fallback_lambda() : lambda_for_set(ps, cfg.delta);
        std::snprintf(line, sizeof(line), "%3zu %12.6g %12.6g %8.4g %10.6g %12.6g %12.6g%s\n", i, ps.epsilon,
                      ps.gamma, ps.l_const, lam, cfg.delta * t_max(ps.gamma, lam), ps.margin,
                      i == family.fallback_index ? "  (fall-back)" : "");
        out << line;
    }
    out << "t_min = " << fmt("%.6g", stc.t_min()) << " s\n";
    out << "t_cap = " << fmt("%.6g", stc.t_cap()) << " s\n";
    return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out) {
    const fs::path dir = output_dir(cfg, opt);
    const ParameterFamily family = obtain_family(cfg, dir, opt.jobs, out);
    validate_for_family(cfg, family);
    const StcConfig dynamic_cfg = cfg.stc(family, cfg.m);
    const StcConfig static_cfg = cfg.stc(family, 1);
    const double t_min = dynamic_cfg.t_min();
    const double dt = flow_step(cfg, t_min);
    ensure_dir(dir);

    std::vector<RunTask> tasks;
    for (std::size_t i = 0; i < cfg.run.x0.size(); ++i) {
        tasks.push_back({i, "dynamic"});
        if (cfg.run.static_baseline) {
            tasks.push_back({i, "static"});
        }
        if (cfg.run.periodic_baseline) {
            tasks.push_back({i, "periodic"});
        }
    }

    std::vector<json> results(tasks.size());
    for_each_parallel(tasks.size(), opt.jobs, [&](std::size_t k) {
        const RunTask& task = tasks[k];
        const Vector& x0 = cfg.run.x0[task.x0_index];
        HybridTrajectory traj;
        try {
            if (task.mechanism == "dynamic") {
                traj = simulate(x0, dynamic_cfg, cfg.system, cfg.run.t_end, dt);
            } else if (task.mechanism == "static") {
                traj = simulate(x0, static_cfg, cfg.system, cfg.run.t_end, dt);
            } else {
                traj = simulate_periodic(x0, cfg.system, t_min, cfg.run.t_end, dt);
            }
        } catch (const RegionViolation& err) {
            throw RegionViolation("run " + std::to_string(task.x0_index) + " (" + task.mechanism + "): " + err.what());
        } catch (const IntegrationError& err) {
            throw IntegrationError("run " + std::to_string(task.x0_index) + " (" + task.mechanism +
                                   "): " + err.what());
        }

        const std::string stem = run_stem(task.x0_index, task.mechanism);
        std::ostringstream trajectory_csv;
        std::ostringstream decisions_csv;
        std::ostringstream monitors_csv;
        write_trajectory_csv(trajectory_csv, traj);
        write_decisions_csv(decisions_csv, traj);
        write_monitors_csv(monitors_csv, traj);
        write_text_file((dir / (stem + "_trajectory.csv")).string(), trajectory_csv.str());
        write_text_file((dir / (stem + "_decisions.csv")).string(), decisions_csv.str());
        write_text_file((dir / (stem + "_monitors.csv")).string(), monitors_csv.str());

        json x0_json = json::array();
        for (Eigen::Index i = 0; i < x0.size(); ++i) {
            x0_json.push_back(x0(i));
        }
        json failed = json::array();
        for (const auto& m : traj.monitors) {
            if (!m.pass) {
                failed.push_back({{"monitor", m.name}, {"j", m.j}, {"slack", m.slack}, {"tol", m.tol}});
                if (failed.size() >= 20) {
                    break;
                }
            }
        }
        results[k] = {{"x0_index", task.x0_index},
                      {"x0", x0_json},
                      {"mechanism", task.mechanism},
                      {"samples", traj.samples_before(cfg.run.t_end)},
                      {"samples_in_window", traj.samples_before(cfg.run.count_window)},
                      {"fallback_decisions",
                       std::count_if(traj.decisions.begin(), traj.decisions.end(),
                                     [](const TriggerDecision& d) { return d.used_fallback; })},
                      {"interval", interval_stats(traj)},
                      {"monitor_checks", traj.monitors.size()},
                      {"violations", traj.violation_count()},
                      {"first_violations", failed},
                      {"files",
                       {{"trajectory", stem + "_trajectory.csv"},
                        {"decisions", stem + "_decisions.csv"},
                        {"monitors", stem + "_monitors.csv"}}}};
    });

    json runs = json::array();
    std::size_t violations = 0;
    for (auto& r : results) {
        violations += r.at("violations").get<std::size_t>();
        runs.push_back(std::move(r));
    }
    const json summary = {{"system", cfg.system.name},
                          {"t_min", t_min},
                          {"t_cap", dynamic_cfg.t_cap()},
                          {"t_end", cfg.run.t_end},
                          {"dt_flow", dt},
                          {"count_window", cfg.run.count_window},
                          {"m", cfg.m},
                          {"eps_ref", cfg.eps_ref},
                          {"delta", cfg.delta},
                          {"total_violations", violations},
                          {"runs", runs}};
    write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");

    out << "t_min = " << fmt("%.6g", t_min) << " s, dt_flow = " << fmt("%.6g", dt) << " s\n";
    out << summary_table(runs, cfg.run.count_window);
    if (violations > 0) {
        out << violations << " monitor violation(s); see the *_monitors.csv files\n";
        return kExitMonitor;
    }
    return kExitOk;
}

int cmd_compare(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out) {
    const fs::path dir = output_dir(cfg, opt);
    json runs = json::array();
    double window = cfg.run.count_window;
    if (!cfg.run.x0.empty()) {
        const fs::path summary_path = dir / "summary.json";
        if (!fs::exists(summary_path)) {
            throw ConfigError("missing run artifacts: '" + summary_path.string() + "' (run `dstc run` first)");
        }
        const json summary = read_json_file(summary_path.string());
        runs = summary.value("runs", json::array());
        window = summary.value("count_window", window);
    }

    std::map<std::size_t, std::map<std::string, json>> by_x0;
    for (const auto& r : runs) {
        by_x0[r.at("x0_index").get<std::size_t>()][r.at("mechanism").get<std::string>()] = r;
    }

    std::ostringstream report;
    report << "comparison of sampling mechanisms (counts over the first " << format_double(window)
           << " s and the full run)\n";
    char line[256];
    for (const auto& [index, mechs] : by_x0) {
        report << "\nx0[" << index << "]\n";
        std::snprintf(line, sizeof(line), "  %-9s %10s %10s %10s %10s %10s\n", "mechanism", "first_win", "total",
                      "h_min", "h_mean", "h_max");
        report << line;
        for (const char* name : {"dynamic", "static", "periodic"}) {
            const auto it = mechs.find(name);
            if (it == mechs.end()) {
                continue;
            }
            const json& r = it->second;
            std::snprintf(line, sizeof(line), "  %-9s %10zu %10zu %10.5f %10.5f %10.5f\n", name,
                          r.at("samples_in_window").get<std::size_t>(), r.at("samples").get<std::size_t>(),
                          r.at("interval").at("min").get<double>(), r.at("interval").at("mean").get<double>(),
                          r.at("interval").at("max").get<double>());
            report << line;
        }
        const auto count = [&](const char* name, const char* key) -> std::optional<double> {
            const auto it = mechs.find(name);
            if (it == mechs.end()) {
                return std::nullopt;
            }
            return it->second.at(key).get<double>();
        };
        const auto dyn = count("dynamic", "samples");
        const auto sta = count("static", "samples");
        const auto per = count("periodic", "samples");
        if (dyn && sta && per) {
            report << "  dynamic <= static <= periodic (total): " << (*dyn <= *sta && *sta <= *per ? "yes" : "no")
                   << "\n";
        }
        const auto dyn_w = count("dynamic", "samples_in_window");
        const auto per_w = count("periodic", "samples_in_window");
        if (dyn_w && per_w && *dyn_w > 0) {
            report << "  periodic / dynamic (first window): " << fmt("%.3f", *per_w / *dyn_w) << "\n";
        }
    }
    const std::string text = report.str();

    std::ostringstream gp;
    gp << "# gnuplot script: sampling intervals and state trajectories\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n";
    for (const auto& [index, mechs] : by_x0) {
        gp << "\nset terminal pngcairo size 900,600\n"
           << "set output 'run" << index << "_intervals.png'\n"
           << "set xlabel 't [s]'\nset ylabel 'h [s]'\n"
           << "plot";
        bool first = true;
        for (const auto& [name, r] : mechs) {
            gp << (first ? " " : ", \\\n     ") << "'" << r.at("files").at("decisions").get<std::string>()
               << "' using 2:3 with steps title '" << name << "'";
            first = false;
        }
        gp << "\n";
        const auto dyn = mechs.find("dynamic");
        if (dyn != mechs.end()) {
            const std::string file = dyn->second.at("files").at("trajectory").get<std::string>();
            gp << "set output 'run" << index << "_state.png'\n";
            if (dyn->second.at("x0").size() >= 2) {
                gp << "set xlabel 'x1'\nset ylabel 'x2'\n"
                   << "plot '" << file << "' using 3:4 with lines title 'dynamic'\n";
            } else {
                gp << "set xlabel 't [s]'\nset ylabel 'x1'\n"
                   << "plot '" << file << "' using 1:3 with lines title 'dynamic'\n";
            }
        }
    }

    ensure_dir(dir);
    write_text_file((dir / "comparison.txt").string(), text);
    write_text_file((dir / "comparison.gp").string(), gp.str());
    out << text;
    return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out) {
    const fs::path dir = output_dir(cfg, opt);
    const ParameterFamily family = obtain_family(cfg, dir, opt.jobs, out);
    try {
        family.validate();
    } catch (const DomainError& err) {
        throw ConfigError(err.what());
    }
    const int random_points = cfg.has_synthesis ? cfg.synthesis.random_points : SynthesisBlock{}.random_points;

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto ball_point = [&](int dim, double radius) {
        Vector d(dim);
        for (int i = 0; i < dim; ++i) {
            d(i) = normal(rng);
        }
        const double n = d.norm();
        if (n == 0.0) {
            return Vector(Vector::Zero(dim));
        }
        return Vector(d / n * radius * std::pow(unit(rng), 1.0 / dim));
    };
    std::vector<std::pair<Vector, Vector>> samples;
    samples.reserve(static_cast<std::size_t>(random_points));
    for (int k = 0; k < random_points; ++k) {
        Vector x = ball_point(cfg.system.state_dim, cfg.system.x_radius);
        Vector e = ball_point(cfg.system.error_dim, cfg.system.e_radius);
        samples.emplace_back(std::move(x), std::move(e));
    }

    json sets = json::array();
    bool all_ok = true;
    char line[256];
    std::snprintf(line, sizeof(line), "%3s %12s %12s %8s %14s %14s %14s %6s\n", "i", "epsilon", "gamma", "grid",
                  "max_residual", "scale", "random_max", "ok");
    out << line;
    for (std::size_t i = 0; i < family.sets.size(); ++i) {
        const auto& ps = family.sets[i];
        int density = cfg.has_synthesis && cfg.synthesis.verify_density > 0 ? cfg.synthesis.verify_density : 0;
        if (density == 0) {
            const int base = ps.grid_density > 0 ? ps.grid_density
                                                 : (cfg.has_synthesis ? cfg.synthesis.grid_density : 24);
            density = 2 * base;
        }
        const AssumptionReport rep = verify_assumption(cfg.system, ps, density, opt.jobs);
        double random_max = -std::numeric_limits<double>::infinity();
        for (const auto& [x, e] : samples) {
            random_max = std::max(random_max, assumption_residual(cfg.system, ps, x, e));
        }
        const bool ok = rep.certified_within(kVerifyRelTol) && rep.w_bound_holds;
        all_ok = all_ok && ok;
        std::snprintf(line, sizeof(line), "%3zu %12.6g %12.6g %8d %14.6g %14.6g %14.6g %6s\n", i, ps.epsilon,
                      ps.gamma, density, rep.max_residual, rep.scale, random_points > 0 ? random_max : 0.0,
                      ok ? "yes" : "NO");
        out << line;
        sets.push_back({{"index", i},
                        {"epsilon", ps.epsilon},
                        {"gamma", ps.gamma},
                        {"grid_density", density},
                        {"points", rep.points},
                        {"max_residual", rep.max_residual},
                        {"scale", rep.scale},
                        {"w_bound_min_slack", rep.w_bound_min_slack},
                        {"random_points", random_points},
                        {"random_max_residual", random_points > 0 ? random_max : 0.0},
                        {"certified", ok}});
    }
    ensure_dir(dir);
    write_text_file((dir / "verify.json").string(),
                    json({{"seed", opt.seed}, {"rel_tol", kVerifyRelTol}, {"sets", sets}}).dump(2) + "\n");
    if (!all_ok) {
        out << "at least one parameter set failed re-verification\n";
        return kExitSynthesis;
    }
    out << "all " << family.sets.size() << " parameter sets re-verified\n";
    return kExitOk;
}

int run_command(const std::string& command, const std::string& config_path, const CommandOptions& opt,
                std::ostream& out, std::ostream& err) {
    try {
        if (opt.jobs < 1) {
            throw ConfigError("--jobs must be >= 1");
        }
        const ExperimentConfig cfg = load_config(config_path);
        if (command == "synthesize") {
            return cmd_synthesize(cfg, opt, out);
        }
        if (command == "run") {
            return cmd_run(cfg, opt, out);
        }
        if (command == "compare") {
            return cmd_compare(cfg, opt, out);
        }
        if (command == "verify") {
            return cmd_verify(cfg, opt, out);
        }
        throw ConfigError("unknown command '" + command + "'");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SynthesisError& e) {
        err << "synthesis failed for epsilon = " << format_double(e.epsilon()) << ": " << e.what() << "\n";
        return kExitSynthesis;
    } catch (const RegionViolation& e) {
        err << "region escape: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const IntegrationError& e) {
        err << "integration failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NoSolutionError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ContractViolation& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace dstc
