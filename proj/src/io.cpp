#include "dstc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dstc/errors.hpp"

namespace dstc {
namespace {

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
    const auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return fallback;
    }
    try {
        return it->get<T>();
    } catch (const json::exception& err) {
        throw ConfigError(std::string("field '") + key + "': " + err.what());
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

SystemSpec system_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("system definition must be a JSON object");
    }
    const auto name = get_or<std::string>(doc, "name", "");
    try {
        if (name == "van_der_pol") {
            Eigen::Matrix2d p;
            p << 4.68, 1.10, 1.10, 3.56;
            if (doc.contains("P")) {
                const auto rows = doc.at("P").get<std::vector<std::vector<double>>>();
                if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) {
                    throw ConfigError("van_der_pol: P must be 2x2");
                }
                p << rows[0][0], rows[0][1], rows[1][0], rows[1][1];
            }
            const int dim = get_or<int>(doc, "dimension", 2);
            if (dim != 2) {
                throw ConfigError("van_der_pol: dimension must be 2");
            }
            return van_der_pol(p, get_or<double>(doc, "c", 10.0));
        }
        if (name == "linear_test") {
            return linear_test(get_or<int>(doc, "dimension", 1), get_or<double>(doc, "c", 1.0));
        }
    } catch (const DomainError& err) {
        throw ConfigError(std::string("system '") + name + "': " + err.what());
    } catch (const json::exception& err) {
        throw ConfigError(std::string("system '") + name + "': " + err.what());
    }
    throw ConfigError("unknown system name '" + name + "' (expected van_der_pol or linear_test)");
}

json family_to_json(const ParameterFamily& family) {
    json sets = json::array();
    for (const auto& ps : family.sets) {
        sets.push_back({{"epsilon", ps.epsilon},
                        {"gamma", ps.gamma},
                        {"L", ps.l_const},
                        {"margin", ps.margin},
                        {"grid_density", ps.grid_density}});
    }
    return {{"fallback_index", family.fallback_index}, {"sets", sets}};
}

ParameterFamily family_from_json(const json& doc) {
    ParameterFamily family;
    try {
        family.fallback_index = doc.value("fallback_index", std::size_t{0});
        for (const auto& s : doc.at("sets")) {
            ParameterSet ps;
            ps.epsilon = s.at("epsilon").get<double>();
            ps.gamma = s.at("gamma").get<double>();
            ps.l_const = s.at("L").get<double>();
            ps.margin = s.value("margin", 0.0);
            ps.grid_density = s.value("grid_density", 0);
            family.sets.push_back(ps);
        }
    } catch (const json::exception& err) {
        throw ConfigError(std::string("malformed parameter-family manifest: ") + err.what());
    }
    try {
        family.validate();
    } catch (const DomainError& err) {
        throw ConfigError(std::string("invalid parameter-family manifest: ") + err.what());
    }
    return family;
}

void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj) {
    const std::size_t n = traj.samples.empty() ? 0 : static_cast<std::size_t>(traj.samples.front().x.size());
    os << "t,j";
    for (std::size_t i = 0; i < n; ++i) {
        os << ",x" << (i + 1);
    }
    os << ",V,U,interval,set_index,fallback\n";
    for (const auto& p : traj.flow_points) {
        const auto& d = traj.decisions.at(static_cast<std::size_t>(p.j - 1));
        os << format_double(p.t) << ',' << p.j;
        for (Eigen::Index i = 0; i < p.x.size(); ++i) {
            os << ',' << format_double(p.x(i));
        }
        os << ',' << format_double(p.v) << ',' << format_double(p.u) << ',' << format_double(d.h) << ','
           << d.set_index << ',' << (d.used_fallback ? 1 : 0) << '\n';
    }
}

void write_decisions_csv(std::ostream& os, const HybridTrajectory& traj) {
    os << "j,t_j,h,set_index,epsilon_i,used_fallback,V,C\n";
    for (std::size_t j = 0; j < traj.decisions.size(); ++j) {
        const auto& d = traj.decisions[j];
        os << j << ',' << format_double(traj.samples[j].t) << ',' << format_double(d.h) << ',' << d.set_index
           << ',' << format_double(d.epsilon) << ',' << (d.used_fallback ? 1 : 0) << ',' << format_double(d.v)
           << ',' << format_double(d.c_val) << '\n';
    }
}

void write_monitors_csv(std::ostream& os, const HybridTrajectory& traj) {
    os << "monitor,j,slack,pass\n";
    for (const auto& m : traj.monitors) {
        os << m.name << ',' << m.j << ',' << format_double(m.slack) << ',' << (m.pass ? 1 : 0) << '\n';
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError("'" + path + "' is not valid JSON: " + err.what());
    }
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << contents;
}

}  // namespace dstc
