#include "cmc/branch_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace cmc {

std::string format_double(double v) {
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

namespace {

const std::array<std::pair<const char*, ShootingPoint>, 10> kPresets{{
    {"Z1", {0.577096, -0.707791, 2.30054}},
    {"Z2", {0.514328, -0.844304, 2.26274}},
    {"Z3", {0.433855, -0.947962, 2.22231}},
    {"Z4", {0.635046, -0.258674, 2.37217}},
    {"Z5", {0.707096, -0.0899734, 2.45894}},
    {"Z6", {0.73801, 0.0, 2.51519}},
    {"Z7", {0.745402, 0.0299556, 2.54038}},
    {"Z8", {0.743855, 0.0565645, 2.5915}},
    {"Z9", {0.720997, 0.0299491, 2.64565}},
    {"Z10", {0.703734, 0.000563715, 2.70305}},
}};

}  // namespace

ShootingPoint preset_point(const std::string& name) {
    for (const auto& [key, Z] : kPresets)
        if (name == key) return Z;
    throw DomainError("unknown preset '" + name + "' (expected Z1..Z10)");
}

std::span<const std::pair<const char*, ShootingPoint>> preset_table() {
    return kPresets;
}

std::string branch_jsonl(const Branch& branch) {
    std::string out;
    out.reserve(branch.points.size() * 256);
    for (size_t i = 0; i < branch.points.size(); ++i) {
        const BranchPoint& p = branch.points[i];
        out += "{\"index\":" + std::to_string(i);
        out += ",\"s\":" + format_double(p.s);
        out += ",\"a\":" + format_double(p.Z.a);
        out += ",\"H\":" + format_double(p.Z.H);
        out += ",\"T\":" + format_double(p.Z.T);
        out += ",\"r_f1\":" + format_double(p.r_f1);
        out += ",\"r_theta\":" + format_double(p.r_theta);
        out += ",\"tangent\":[" + format_double(p.tangent[0]) + "," +
               format_double(p.tangent[1]) + "," + format_double(p.tangent[2]) +
               "]";
        out += ",\"min_f2\":" + format_double(p.min_f2);
        out += ",\"min_f3\":" + format_double(p.min_f3);
        out += std::string(",\"embedded\":") + (p.embedded ? "true" : "false");
        out += "}\n";
    }
    return out;
}

std::string events_json(std::span<const BranchEvent> events) {
    std::string out = "{\"events\":[";
    for (size_t i = 0; i < events.size(); ++i) {
        const BranchEvent& e = events[i];
        if (i) out += ",";
        out += "\n  {\"kind\":\"";
        out += to_string(e.kind);
        out += "\",\"s\":" + format_double(e.s_at);
        out += ",\"a\":" + format_double(e.Z_at.a);
        out += ",\"H\":" + format_double(e.Z_at.H);
        out += ",\"T\":" + format_double(e.Z_at.T) + "}";
    }
    out += "\n]}\n";
    return out;
}

void write_profile_csv(std::ostream& os, const ClosedProfile& profile) {
    os << "t,f1,f2,theta,f3\n";
    for (size_t i = 0; i < profile.points.size(); ++i) {
        const double f1 = profile.points[i][0], f2 = profile.points[i][1];
        const double f3sq = std::max(0.0, 1.0 - f1 * f1 - f2 * f2);
        os << format_double(profile.ts[i]) << ',' << format_double(f1) << ','
           << format_double(f2) << ',' << format_double(profile.thetas[i])
           << ',' << format_double(std::sqrt(f3sq)) << '\n';
    }
}

void write_branch_csv(std::ostream& os, const Branch& branch) {
    os << "s,a,H,T\n";
    for (const BranchPoint& p : branch.points)
        os << format_double(p.s) << ',' << format_double(p.Z.a) << ','
           << format_double(p.Z.H) << ',' << format_double(p.Z.T) << '\n';
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = val;
    }
    return out;
}

}  // namespace cmc
