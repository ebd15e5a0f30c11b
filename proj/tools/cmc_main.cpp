// Command-line driver for the CMC family toolkit: solve one closure point,
// trace the family branch, reproduce the published table, and dump the
// closed-form objects.  All file output is deterministic (no timestamps).

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cmc/branch_io.hpp"
#include "cmc/closed_form.hpp"
#include "cmc/continuation.hpp"
#include "cmc/profile_geometry.hpp"
#include "cmc/shooting.hpp"
#include "cmc/svg.hpp"

namespace fs = std::filesystem;
using namespace cmc;

namespace {

constexpr int kExitBadInput = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitSingular = 3;
constexpr int kExitToleranceFailed = 4;

struct Settings {
    int ell = 1, m = 1;
    IntegratorConfig integrator{};
    NewtonConfig newton{};
    ContinuationConfig continuation{};
    std::string out_dir;
    std::set<std::string> formats{"json", "csv", "svg"};
    bool show_config = false;

    ModelParams params() const { return {ell, m, 0.0}; }

    ContinuationConfig cont() const {
        ContinuationConfig cc = continuation;
        cc.newton = newton;
        cc.integrator = integrator;
        return cc;
    }

    bool wants(const std::string& fmt) const { return formats.count(fmt) > 0; }
};

void apply_config_file(Settings& s, const std::string& path) {
    const auto kv = read_config_file(path);
    auto get = [&](const char* key, auto& slot) {
        const auto it = kv.find(key);
        if (it == kv.end()) return;
        if constexpr (std::is_same_v<std::decay_t<decltype(slot)>, int>)
            slot = std::stoi(it->second);
        else if constexpr (std::is_same_v<std::decay_t<decltype(slot)>, long>)
            slot = std::stol(it->second);
        else
            slot = std::stod(it->second);
    };
    get("ell", s.ell);
    get("m", s.m);
    get("integrator.abs_tol", s.integrator.abs_tol);
    get("integrator.rel_tol", s.integrator.rel_tol);
    get("integrator.max_step", s.integrator.max_step);
    get("integrator.f2_floor", s.integrator.f2_floor);
    get("integrator.f3sq_floor", s.integrator.f3sq_floor);
    get("integrator.max_steps", s.integrator.max_steps);
    get("newton.res_tol", s.newton.res_tol);
    get("newton.max_iter", s.newton.max_iter);
    get("newton.fd_step", s.newton.fd_step);
    get("newton.damping", s.newton.damping);
    get("newton.max_step", s.newton.max_step);
    get("continuation.ds_init", s.continuation.ds_init);
    get("continuation.ds_min", s.continuation.ds_min);
    get("continuation.ds_max", s.continuation.ds_max);
    get("continuation.grow", s.continuation.grow);
    get("continuation.max_points", s.continuation.max_points);
    get("continuation.endpoint_f_floor", s.continuation.endpoint_f_floor);
    get("continuation.profile_samples_per_half",
        s.continuation.profile_samples_per_half);
}

void print_config(const Settings& s) {
    auto line = [](const char* key, const std::string& v) {
        std::cout << key << " = " << v << "\n";
    };
    line("ell", std::to_string(s.ell));
    line("m", std::to_string(s.m));
    line("integrator.abs_tol", format_double(s.integrator.abs_tol));
    line("integrator.rel_tol", format_double(s.integrator.rel_tol));
    line("integrator.max_step", format_double(s.integrator.max_step));
    line("integrator.f2_floor", format_double(s.integrator.f2_floor));
    line("integrator.f3sq_floor", format_double(s.integrator.f3sq_floor));
    line("integrator.max_steps", std::to_string(s.integrator.max_steps));
    line("newton.res_tol", format_double(s.newton.res_tol));
    line("newton.max_iter", std::to_string(s.newton.max_iter));
    line("newton.fd_step", format_double(s.newton.fd_step));
    line("newton.damping", format_double(s.newton.damping));
    line("newton.max_step", format_double(s.newton.max_step));
    line("continuation.ds_init", format_double(s.continuation.ds_init));
    line("continuation.ds_min", format_double(s.continuation.ds_min));
    line("continuation.ds_max", format_double(s.continuation.ds_max));
    line("continuation.grow", format_double(s.continuation.grow));
    line("continuation.max_points", std::to_string(s.continuation.max_points));
    line("continuation.endpoint_f_floor",
         format_double(s.continuation.endpoint_f_floor));
    line("continuation.profile_samples_per_half",
         std::to_string(s.continuation.profile_samples_per_half));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot write " + path.string());
    f << text;
}

// Profile curve inside the unit half disk.
std::string profile_svg(const ClosedProfile& prof, const std::string& title) {
    svg::Chart chart(title, 420, 420);
    chart.set_window(-1.05, 1.05, -0.05, 1.1);
    chart.add_circle(0.0, 0.0, 1.0, "#aaaaaa");
    chart.add_series(prof.points, "#1f4e8c", 1.3);
    chart.add_marker(prof.points.front()[0], prof.points.front()[1], "#c03020");
    return chart.str();
}

std::string curves_svg(const ClosedProfile& prof, const std::string& title) {
    std::vector<Point2> f1s, f2s;
    for (size_t i = 0; i < prof.points.size(); ++i) {
        f1s.push_back({prof.ts[i], prof.points[i][0]});
        f2s.push_back({prof.ts[i], prof.points[i][1]});
    }
    svg::Chart chart(title + "  f1 (blue), f2 (green)", 480, 320);
    chart.add_series(f1s, "#1f4e8c", 1.2);
    chart.add_series(f2s, "#2c8c3c", 1.2);
    return chart.str();
}

std::string theta_svg(const ClosedProfile& prof, const std::string& title) {
    std::vector<Point2> th;
    for (size_t i = 0; i < prof.points.size(); ++i)
        th.push_back({prof.ts[i], prof.thetas[i]});
    svg::Chart chart(title + "  theta(t)", 480, 320);
    chart.add_series(th, "#8c2c6e", 1.2);
    return chart.str();
}

void write_profile_outputs(const Settings& s, const ClosedProfile& prof,
                           const std::string& stem) {
    if (s.out_dir.empty()) return;
    fs::create_directories(s.out_dir);
    const fs::path dir(s.out_dir);
    if (s.wants("csv")) {
        std::ofstream csv(dir / (stem + "_profile.csv"), std::ios::binary);
        write_profile_csv(csv, prof);
    }
    if (s.wants("svg")) {
        write_text(dir / (stem + "_profile.svg"), profile_svg(prof, stem));
        write_text(dir / (stem + "_curves.svg"), curves_svg(prof, stem));
        write_text(dir / (stem + "_theta.svg"), theta_svg(prof, stem));
    }
}

ShootingPoint resolve_point(const std::string& preset, double a, double H,
                            double T, bool have_aht) {
    if (!preset.empty()) return preset_point(preset);
    if (!have_aht)
        throw DomainError("give either --preset or all of -a, -H, -T");
    return {a, H, T};
}

int cmd_solve(const Settings& s, const ShootingPoint& guess,
              const std::string& mode, const std::string& stem) {
    const ModelParams params = s.params();
    ShootingPoint Z;
    if (mode == "plane") {
        const Vec3 tan = tangent_at(params, guess, s.newton, s.integrator);
        Z = newton_correct(params, guess, tan, guess, s.newton, s.integrator);
    } else {
        Z = refine_fixed_H(params, guess.H, guess.a, guess.T, s.newton,
                           s.integrator);
    }
    const ResidualReport rep = shoot(params, Z, s.integrator);
    const ClosedProfile prof = extend_periodic(
        rep.trajectory, s.continuation.profile_samples_per_half);
    const bool embedded =
        is_embedded(prof, 1e-9, Execution::Parallel, false).embedded;

    std::cout << "a = " << format_double(Z.a) << "\n"
              << "H = " << format_double(Z.H) << "\n"
              << "T = " << format_double(Z.T) << "\n"
              << "r_f1 = " << format_double(rep.r_f1) << "\n"
              << "r_theta = " << format_double(rep.r_theta) << "\n"
              << "min_f2 = " << format_double(rep.min_f2) << "\n"
              << "min_f3 = " << format_double(rep.min_f3) << "\n"
              << "embedded = " << (embedded ? "true" : "false") << "\n";
    write_profile_outputs(s, prof, stem);
    return 0;
}

std::string terminus_name(BranchTerminus t) {
    switch (t) {
        case BranchTerminus::SingularM: return "singular-limit-M";
        case BranchTerminus::SingularMf: return "singular-limit-Mf";
        case BranchTerminus::LeftOmega: return "left-omega";
        case BranchTerminus::MaxPoints: return "max-points";
        case BranchTerminus::Stalled: return "stalled";
        default: return "none";
    }
}

void write_branch_outputs(const Settings& s, const Branch& branch,
                          const std::vector<BranchEvent>& events) {
    if (s.out_dir.empty()) return;
    fs::create_directories(s.out_dir);
    const fs::path dir(s.out_dir);
    if (s.wants("json")) {
        write_text(dir / "branch.jsonl", branch_jsonl(branch));
        write_text(dir / "events.json", events_json(events));
    }
    if (s.wants("csv")) {
        std::ofstream csv(dir / "branch_3d.csv", std::ios::binary);
        write_branch_csv(csv, branch);
    }
    if (s.wants("svg")) {
        std::vector<Point2> aH;
        for (const BranchPoint& p : branch.points) aH.push_back({p.Z.a, p.Z.H});
        svg::Chart chart("family branch, a-H projection", 480, 360);
        chart.add_series(aH, "#1f4e8c", 1.4);
        for (const BranchEvent& e : events)
            chart.add_marker(e.Z_at.a, e.Z_at.H, "#c03020");
        write_text(dir / "branch_aH.svg", chart.str());
    }
}

int cmd_trace(const Settings& s, const ShootingPoint& seed,
              const std::string& direction) {
    const ModelParams params = s.params();
    const ContinuationConfig cfg = s.cont();

    Branch branch;
    if (direction == "both") {
        branch = trace_full(params, seed, cfg);
    } else {
        branch = trace(params, seed, direction == "up" ? +1 : -1, cfg);
    }
    const auto events = detect_events(params, branch, cfg);

    std::cout << "points = " << branch.points.size() << "\n";
    std::cout << "start = " << terminus_name(branch.start_terminus)
              << "  end = " << terminus_name(branch.end_terminus) << "\n";
    const BranchPoint& p0 = branch.points.front();
    const BranchPoint& pe = branch.points.back();
    std::printf("first (a,H,T) = (%.9f, %.9f, %.9f)\n", p0.Z.a, p0.Z.H, p0.Z.T);
    std::printf("last  (a,H,T) = (%.9f, %.9f, %.9f)\n", pe.Z.a, pe.Z.H, pe.Z.T);
    for (const BranchEvent& e : events)
        std::printf("event %-22s s=%.6f  (a,H,T)=(%.9f, %.9f, %.9f)\n",
                    to_string(e.kind), e.s_at, e.Z_at.a, e.Z_at.H, e.Z_at.T);

    write_branch_outputs(s, branch, events);
    return 0;
}

int cmd_closed_form(const Settings& s) {
    const int ell = s.ell, m = s.m;
    const PwcmcConsistency cons = pwcmc_consistency(ell, m);

    std::string json = "{\n  \"ell\": " + std::to_string(ell) +
                       ", \"m\": " + std::to_string(m) + ",\n";
    json += std::string("  \"feasible\": ") + (cons.feasible ? "true" : "false");
    if (cons.feasible) {
        json += ",\n  \"pwcmc\": {\"H\": " + format_double(cons.witness.H) +
                ", \"r1\": " + format_double(cons.witness.r1) +
                ", \"r2\": " + format_double(cons.witness.r2) +
                ", \"n\": " + std::to_string(cons.witness.n) + "}";
    } else {
        json += ",\n  \"residual\": " + format_double(cons.residual);
    }

    json += ",\n  \"explicit_H_grid\": [";
    bool first = true;
    for (int i = 1; i <= 19; ++i) {
        const double r = 0.05 * i;
        using Tag = ExplicitSolutionKind::Tag;
        json += first ? "\n" : ",\n";
        first = false;
        json += "    {\"r\": " + format_double(r) + ", \"horizontal\": " +
                format_double(explicit_solution_H({Tag::HorizontalF2, r}, ell, m)) +
                ", \"vertical\": " +
                format_double(explicit_solution_H({Tag::VerticalF1Plus, r}, ell, m)) +
                ", \"circle\": " +
                format_double(explicit_solution_H({Tag::CircleF3, r}, ell, m)) + "}";
    }
    json += "\n  ]";
    if (cons.feasible) {
        const PiecewiseCurve M = singular_generator_M(ell);
        json += ",\n  \"generator_M\": {\"period\": " + format_double(M.period) +
                ", \"breakpoints\": [" + format_double(M.breakpoints[0]) + ", " +
                format_double(M.breakpoints[1]) + ", " +
                format_double(M.breakpoints[2]) + ", " +
                format_double(M.breakpoints[3]) + "]}";
        if (ell == 1) {
            const PiecewiseCurve Mf = singular_generator_Mf();
            json += ",\n  \"generator_Mf\": {\"period\": " +
                    format_double(Mf.period) +
                    ", \"T1\": " + format_double(Mf.breakpoints[0]) + "}";
        }
    }
    json += "\n}\n";
    std::cout << json;

    if (!s.out_dir.empty() && cons.feasible) {
        fs::create_directories(s.out_dir);
        const fs::path dir(s.out_dir);
        auto dump_generator = [&](const PiecewiseCurve& c,
                                  const std::string& stem) {
            ClosedProfile prof;
            prof.period = c.period;
            const int n = 2000;
            for (int i = 0; i <= n; ++i) {
                const double t = c.period * i / n;
                prof.ts.push_back(t);
                prof.points.push_back(c.point_at(t));
                prof.thetas.push_back(c.theta_at(t));
            }
            if (s.wants("csv")) {
                std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
                write_profile_csv(csv, prof);
            }
            if (s.wants("svg")) {
                write_text(dir / (stem + "_profile.svg"), profile_svg(prof, stem));
                write_text(dir / (stem + "_curves.svg"), curves_svg(prof, stem));
                write_text(dir / (stem + "_theta.svg"), theta_svg(prof, stem));
            }
        };
        dump_generator(singular_generator_M(ell), "generator_M");
        if (ell == 1) dump_generator(singular_generator_Mf(), "generator_Mf");
    }
    return 0;
}

int cmd_geometry(const Settings&, double r1, double r2) {
    const auto comps = assemble_M_components();
    std::cout << "piecewise-CMC hypersurface components (r^2 = 2/3):\n";
    for (const auto& c : comps) {
        const char* kind = "";
        switch (c.kind) {
            case ComponentSpec::Kind::UmbilicalPlus: kind = "umbilical+"; break;
            case ComponentSpec::Kind::UmbilicalMinus: kind = "umbilical-"; break;
            case ComponentSpec::Kind::CliffordM2: kind = "clifford-M2"; break;
            case ComponentSpec::Kind::CliffordM3: kind = "clifford-M3"; break;
            case ComponentSpec::Kind::GammaCircle: kind = "gamma"; break;
        }
        std::printf("  %-12s", kind);
        if (c.kind == ComponentSpec::Kind::GammaCircle)
            std::printf(" index=%d", c.gamma_index);
        std::printf(" r=%s level=%s", format_double(c.r).c_str(),
                    format_double(c.level).c_str());
        if (c.H) std::printf(" |H|=%s", format_double(*c.H).c_str());
        std::printf("\n");
    }

    auto classify = [&](double u, double v) {
        const auto res = sphere_cylinder_intersection(u, v);
        std::printf("  intersection(r1=%s, r2=%s): ", format_double(u).c_str(),
                    format_double(v).c_str());
        switch (res.kind) {
            case IntersectionResult::Kind::Empty:
                std::printf("empty\n");
                break;
            case IntersectionResult::Kind::Circle:
                std::printf("circle radius %s\n",
                            format_double(res.radius_a).c_str());
                break;
            case IntersectionResult::Kind::Torus:
                std::printf("torus radii (%s, %s)\n",
                            format_double(res.radius_a).c_str(),
                            format_double(res.radius_b).c_str());
                break;
        }
    };
    std::cout << "umbilical/Clifford intersections:\n";
    if (r1 > 0.0 && r2 > 0.0) {
        classify(r1, r2);
    } else {
        classify(0.5, 0.6);
        classify(0.6, 0.6);
        classify(0.8, 0.6);
    }
    return 0;
}

struct ReproduceRow {
    std::string name;
    ShootingPoint published;
    bool published_embedded;
    ShootingPoint computed{};
    bool computed_embedded = false;
    bool located = false;
    std::string how;
};

int cmd_reproduce(const Settings& s) {
    const ModelParams params = s.params();
    const ContinuationConfig cfg = s.cont();

    std::cout << "tracing the family branch from Z1...\n";
    const Branch branch = trace_full(params, preset_point("Z1"), cfg);
    const auto events = detect_events(params, branch, cfg);

    const BranchEvent* hmin = nullptr;
    const BranchEvent* hmax = nullptr;
    for (const auto& e : events) {
        if (e.kind == BranchEventKind::HMin) hmin = &e;
        if (e.kind == BranchEventKind::HMax) hmax = &e;
    }

    // Embeddedness as published, for side-by-side comparison.
    const bool published_embedded[10] = {true,  true,  true,  true,  false,
                                         false, false, false, false, false};
    // Occurrence of each published H along the branch ordered from the
    // piecewise-CMC end; the last two sit past the curvature maximum.
    const int occurrence[10] = {1, 1, 1, 1, 1, 1, 1, 1, 2, 2};

    std::vector<ReproduceRow> rows;
    int idx = 0;
    for (const auto& [name, Z] : preset_table()) {
        ReproduceRow row{name, Z, published_embedded[idx], {}, false, false, ""};
        try {
            row.computed = locate_by_H(params, branch, Z.H, occurrence[idx], cfg);
            row.located = true;
            row.how = "H-crossing";
        } catch (const NotBracketed&) {
            // Published extrema can fall just outside the traced H range;
            // the refined extremum event is the matching member.
            const BranchEvent* ev =
                std::abs(Z.H - (hmin ? hmin->Z_at.H : 1e9)) <
                        std::abs(Z.H - (hmax ? hmax->Z_at.H : 1e9))
                    ? hmin
                    : hmax;
            if (ev && std::abs(ev->Z_at.H - Z.H) < 2e-3) {
                row.computed = ev->Z_at;
                row.located = true;
                row.how = ev->kind == BranchEventKind::HMin ? "HMin event"
                                                            : "HMax event";
            }
        }
        if (row.located) {
            const ClosedProfile prof =
                closed_profile_for(params, row.computed, cfg);
            row.computed_embedded =
                is_embedded(prof, 1e-9, Execution::Parallel, false).embedded;
            write_profile_outputs(s, prof, row.name);
        }
        rows.push_back(row);
        ++idx;
    }

    std::string table;
    table +=
        "point  a_pub     T_pub     a_comp      T_comp      |da|      |dT|   "
        "   emb  emb_pub  via\n";
    bool tolerance_failed = false;
    for (const auto& r : rows) {
        char buf[256];
        if (!r.located) {
            std::snprintf(buf, sizeof buf, "%-5s  %-8.6g  %-8.6g  NOT LOCATED\n",
                          r.name.c_str(), r.published.a, r.published.T);
            tolerance_failed = true;
            table += buf;
            continue;
        }
        const double da = std::abs(r.computed.a - r.published.a);
        const double dT = std::abs(r.computed.T - r.published.T);
        if (da > 2e-3 || dT > 2e-3) tolerance_failed = true;
        std::snprintf(
            buf, sizeof buf,
            "%-5s  %-8.6g  %-8.6g  %-10.8g  %-10.8g  %-8.2e  %-8.2e  %-3s  "
            "%-5s%s  %s\n",
            r.name.c_str(), r.published.a, r.published.T, r.computed.a,
            r.computed.T, da, dT, r.computed_embedded ? "yes" : "no",
            r.published_embedded ? "yes" : "no",
            r.computed_embedded == r.published_embedded ? " " : "*",
            r.how.c_str());
        table += buf;
    }
    table += "(* computed embeddedness differs from the published claim)\n";

    char line[256];
    std::snprintf(line, sizeof line, "H min = %.9f   H max = %.9f\n",
                  hmin ? hmin->Z_at.H : 0.0, hmax ? hmax->Z_at.H : 0.0);
    table += line;
    std::snprintf(line, sizeof line,
                  "branch ends: (%.6f, %.6f, %.6f) .. (%.6f, %.6f, %.6f)\n",
                  branch.points.front().Z.a, branch.points.front().Z.H,
                  branch.points.front().Z.T, branch.points.back().Z.a,
                  branch.points.back().Z.H, branch.points.back().Z.T);
    table += line;

    const PwcmcValues v = pwcmc_values(1);
    table += "closed form: r^2 = " +
             format_double(equal_H_radius() * equal_H_radius()) +
             ", |H| = " + format_double(umbilical_H(std::sqrt(2.0 / 3.0))) + "\n";
    table += "pwcmc(1): H = " + format_double(v.H) +
             ", r1 = " + format_double(v.r1) + ", r2 = " + format_double(v.r2) +
             "\n";
    table += "2T(M_f) = " + format_double(singular_generator_Mf().period) + "\n";

    std::cout << table;
    if (!s.out_dir.empty()) {
        fs::create_directories(s.out_dir);
        write_text(fs::path(s.out_dir) / "report.txt", table);
        write_branch_outputs(s, branch, events);
    }
    return tolerance_failed ? kExitToleranceFailed : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "numerical family of constant-mean-curvature hypersurfaces in the "
        "4-sphere"};
    app.require_subcommand(0, 1);

    Settings s;
    std::string config_path;
    double tol = 0.0;
    std::string format_list;

    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_flag("--show-config", s.show_config,
                 "print the effective configuration");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--ell", s.ell, "first sphere dimension (>= 1)");
        cmd->add_option("--m", s.m, "second sphere dimension (>= 1)");
        cmd->add_option("--tol", tol, "integrator absolute and relative tolerance");
        cmd->add_option("--res-tol", s.newton.res_tol, "Newton residual tolerance");
        cmd->add_option("--out", s.out_dir, "output directory for files");
        cmd->add_option("--format", format_list, "comma list of json,csv,svg");
        cmd->add_flag("--show-config", s.show_config,
                      "print the effective configuration");
    };

    auto* solve = app.add_subcommand("solve", "refine one closure solution");
    std::string preset, mode = "fixed-h", stem = "solution";
    double a = 0, H = 0, T = 0;
    solve->add_option("--preset", preset, "published point name Z1..Z10");
    auto* opt_a = solve->add_option("-a", a, "initial height f2(0)");
    auto* opt_H = solve->add_option("-H", H, "mean curvature");
    auto* opt_T = solve->add_option("-T", T, "half period");
    solve->add_option("--mode", mode, "fixed-h (default) or plane")
        ->check(CLI::IsMember({"fixed-h", "plane"}));
    solve->add_option("--stem", stem, "output file stem");
    add_common(solve);

    auto* tracec = app.add_subcommand("trace", "trace the solution branch");
    std::string direction = "both";
    tracec->add_option("--preset", preset, "seed preset (default Z1)");
    auto* topt_a = tracec->add_option("-a", a, "seed a");
    auto* topt_H = tracec->add_option("-H", H, "seed H");
    auto* topt_T = tracec->add_option("-T", T, "seed T");
    tracec->add_option("--direction", direction, "both, up or down")
        ->check(CLI::IsMember({"both", "up", "down"}));
    tracec->add_option("--ds", s.continuation.ds_init, "initial arclength step");
    tracec->add_option("--ds-max", s.continuation.ds_max, "maximum arclength step");
    tracec->add_option("--max-points", s.continuation.max_points,
                       "stop after this many accepted points");
    tracec->add_option("--floor", s.continuation.endpoint_f_floor,
                       "singular endpoint floor on min f2/f3");
    add_common(tracec);

    auto* repro = app.add_subcommand(
        "reproduce", "trace the branch and compare against the published table");
    add_common(repro);

    auto* cf =
        app.add_subcommand("closed-form", "closed-form constants and generators");
    add_common(cf);

    auto* geo = app.add_subcommand("geometry",
                                   "component assembly and intersection cases");
    double gr1 = 0, gr2 = 0;
    geo->add_option("--r1", gr1, "umbilical radius for classification");
    geo->add_option("--r2", gr2, "Clifford radius for classification");
    add_common(geo);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) apply_config_file(s, config_path);
        if (tol > 0.0) s.integrator.abs_tol = s.integrator.rel_tol = tol;
        if (!format_list.empty()) {
            s.formats.clear();
            std::stringstream ss(format_list);
            std::string item;
            while (std::getline(ss, item, ',')) s.formats.insert(item);
        }
        if (s.ell < 1 || s.m < 1) throw DomainError("ell and m must be >= 1");

        if (s.show_config) {
            print_config(s);
            if (app.get_subcommands().empty()) return 0;
        }

        if (solve->parsed()) {
            const bool have_aht =
                opt_a->count() && opt_H->count() && opt_T->count();
            const ShootingPoint guess = resolve_point(preset, a, H, T, have_aht);
            if (!(guess.a > 0.0 && guess.a < 1.0))
                throw DomainError("a must lie in (0,1)");
            if (!(guess.T > 0.0)) throw DomainError("T must be positive");
            const std::string name = !preset.empty() ? preset : stem;
            return cmd_solve(s, guess, mode, name);
        }
        if (tracec->parsed()) {
            const bool have_aht =
                topt_a->count() && topt_H->count() && topt_T->count();
            const ShootingPoint seed =
                (preset.empty() && !have_aht)
                    ? preset_point("Z1")
                    : resolve_point(preset, a, H, T, have_aht);
            return cmd_trace(s, seed, direction);
        }
        if (repro->parsed()) return cmd_reproduce(s);
        if (cf->parsed()) return cmd_closed_form(s);
        if (geo->parsed()) return cmd_geometry(s, gr1, gr2);

        std::cout << app.help();
        return 0;
    } catch (const SeedInvalid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const StallAtDsMin& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const SingularEncounter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSingular;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}
