// twistmap: command-line front end for the time-map bifurcation engine.
//
// Exit status: 0 success, 1 verification or numerical failure, 2 usage or domain error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "twistmap/continuation.hpp"
#include "twistmap/errors.hpp"
#include "twistmap/io.hpp"
#include "twistmap/oracles.hpp"
#include "twistmap/stability.hpp"

using namespace twistmap;

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel g_log = LogLevel::Error;

void init_log() {
    const char* env = std::getenv("TWISTMAP_LOG");
    if (!env)
        return;
    const std::string v(env);
    if (v == "info")
        g_log = LogLevel::Info;
    else if (v == "debug")
        g_log = LogLevel::Debug;
    else if (v != "error")
        std::cerr << "twistmap: ignoring TWISTMAP_LOG=" << v << " (expected error, info or debug)\n";
}

void log(LogLevel level, const std::string& msg) {
    if (level > g_log)
        return;
    static const char* names[] = {"error", "info", "debug"};
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

std::string g15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

constexpr double kDeg = std::numbers::pi / 180.0;

struct CellFlags {
    double phi0 = std::numbers::pi / 6;
    double phi1 = std::numbers::pi / 4;
    CLI::Option* phi0_opt = nullptr;
    CLI::Option* phi1_opt = nullptr;

    void add(CLI::App* app) {
        phi0_opt = app->add_option("--phi0", phi0, "Left boundary angle (x(-L) = -phi0)");
        phi1_opt = app->add_option("--phi1", phi1, "Right boundary angle (x(L) = phi1)");
    }
};

struct BranchFlags {
    std::string kind = "A";
    int k = 0;

    void add(CLI::App* app, bool required) {
        auto* o = app->add_option("--branch", kind, "Branch family: A, Cr, Cl or D");
        if (required)
            o->required();
        app->add_option("--k", k, "Number of extra half-turns")->check(CLI::NonNegativeNumber);
    }
    BranchId id() const { return {parse_branch_kind(kind), k}; }
};

// Shared state for all subcommands; filled by CLI11 and consumed by the handlers.
struct Options {
    bool degrees = false;
    std::string config_path;

    // timemap
    std::string map = "T";
    std::optional<double> alpha, beta, phi;
    bool verify_oracle = false;

    CellFlags cell;
    BranchFlags branch;

    // diagram / branch
    int k_max = 4;
    double L_max = 4.0;
    int n_points = 100;
    double beta_max = kDefaultBetaMax;
    std::string csv, json, svg, output;
    bool overlay = false;
    std::string ordinate = "yminus";
    CLI::Option* k_max_opt = nullptr;
    CLI::Option* L_max_opt = nullptr;
    CLI::Option* n_points_opt = nullptr;
    CLI::Option* beta_max_opt = nullptr;
    CLI::Option* csv_opt = nullptr;
    CLI::Option* json_opt = nullptr;
    CLI::Option* svg_opt = nullptr;
    CLI::Option* overlay_opt = nullptr;
    CLI::Option* ordinate_opt = nullptr;

    // stability / relax
    double L = 0.0;
    int root = 0;
    RelaxOptions relax;

    // verify
    std::string input;
    double tolerance = kShootTolerance;
};

double angle(double v, bool degrees) { return degrees ? v * kDeg : v; }

CellParams cell_from(const Options& o) {
    if (!o.config_path.empty()) {
        RunConfig rc = load_config(o.config_path);
        const double p0 = o.cell.phi0_opt->count() ? angle(o.cell.phi0, o.degrees) : rc.phi0;
        const double p1 = o.cell.phi1_opt->count() ? angle(o.cell.phi1, o.degrees) : rc.phi1;
        return {p0, p1};
    }
    const double p0 = o.cell.phi0_opt->count() ? angle(o.cell.phi0, o.degrees) : o.cell.phi0;
    const double p1 = o.cell.phi1_opt->count() ? angle(o.cell.phi1, o.degrees) : o.cell.phi1;
    return {p0, p1};
}

double need(const std::optional<double>& v, const char* flag, const std::string& map) {
    if (!v)
        throw DomainError("--map " + map + " requires " + flag);
    return *v;
}

int cmd_timemap(const Options& o) {
    TimeMap map;
    TimeMapArgs args;
    double value;
    if (o.map == "T") {
        map = TimeMap::T;
        args.alpha = angle(need(o.alpha, "--alpha", o.map), o.degrees);
        value = quarter_period(args.alpha);
    } else if (o.map == "T1") {
        map = TimeMap::T1;
        args.alpha = angle(need(o.alpha, "--alpha", o.map), o.degrees);
        args.phi = angle(need(o.phi, "--phi", o.map), o.degrees);
        value = time_to_line(args.alpha, args.phi);
    } else if (o.map == "T2") {
        map = TimeMap::T2;
        args.beta = need(o.beta, "--beta", o.map);
        args.phi = angle(need(o.phi, "--phi", o.map), o.degrees);
        value = time_above(args.beta, args.phi);
    } else {
        throw DomainError("--map must be T, T1 or T2");
    }
    std::cout << g15(value) << '\n';
    if (o.verify_oracle) {
        const double ref = quad_oracle(map, args);
        const double delta = std::abs(value - ref) / std::max(std::abs(ref), 1e-300);
        std::cout << "oracle " << g15(ref) << " rel_delta " << g15(delta) << '\n';
        if (delta > 1e-8) {
            log(LogLevel::Error, "kernel and oracle disagree beyond 1e-8");
            return 1;
        }
    }
    return 0;
}

RunConfig effective_config(const Options& o) {
    RunConfig rc = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.cell.phi0_opt->count())
        rc.phi0 = angle(o.cell.phi0, o.degrees);
    if (o.cell.phi1_opt->count())
        rc.phi1 = angle(o.cell.phi1, o.degrees);
    if (o.k_max_opt->count())
        rc.k_max = o.k_max;
    if (o.L_max_opt->count())
        rc.L_max = o.L_max;
    if (o.n_points_opt->count())
        rc.n_points = o.n_points;
    if (o.beta_max_opt->count())
        rc.continuation.beta_max = o.beta_max;
    if (o.csv_opt->count())
        rc.csv_path = o.csv;
    if (o.json_opt->count())
        rc.json_path = o.json;
    if (o.svg_opt->count())
        rc.svg_path = o.svg;
    if (o.overlay_opt->count())
        rc.overlay_symmetric = o.overlay;
    if (o.ordinate_opt->count())
        rc.ordinate = parse_ordinate(o.ordinate);
    rc.validate();
    return rc;
}

int cmd_diagram(const Options& o) {
    const RunConfig rc = effective_config(o);
    log(LogLevel::Info, "diagram phi0=" + g15(rc.phi0) + " phi1=" + g15(rc.phi1) +
                            " k_max=" + std::to_string(rc.k_max) + " L_max=" + g15(rc.L_max));
    const Diagram d = build_diagram({rc.phi0, rc.phi1}, rc.k_max, rc.L_max, rc.n_points,
                                    rc.overlay_symmetric, rc.continuation);
    log(LogLevel::Info, std::to_string(d.point_count()) + " points, " +
                            std::to_string(d.saddles.size()) + " saddle-nodes");
    for (const auto& b : d.branches)
        log(LogLevel::Debug, to_string(b.branch) + ": " + std::to_string(b.points.size()) + " points");

    const std::string csv = diagram_csv(d);
    if (rc.csv_path.empty() && rc.json_path.empty() && rc.svg_path.empty()) {
        std::cout << csv;
        return 0;
    }
    std::vector<std::pair<std::string, std::string>> outputs;
    if (!rc.csv_path.empty())
        outputs.emplace_back(rc.csv_path, csv);
    if (!rc.json_path.empty())
        outputs.emplace_back(rc.json_path, diagram_json(d, rc).dump(2) + "\n");
    if (!rc.svg_path.empty())
        outputs.emplace_back(rc.svg_path, diagram_svg(d, rc.ordinate));
    for (const auto& [path, content] : outputs) {
        write_file_atomic(path, content);
        log(LogLevel::Info, "wrote " + path);
    }
    return 0;
}

int cmd_branch(const Options& o) {
    const CellParams cell = cell_from(o);
    ContinuationConfig cfg;
    cfg.beta_max = o.beta_max;
    Diagram d;
    d.cell = cell;
    d.L_max = o.L_max;
    d.n_points = o.n_points;
    d.branches.push_back({o.branch.id(), trace_branch(cell, o.branch.id(), o.n_points, o.L_max, cfg)});
    const std::string csv = diagram_csv(d);
    if (o.output.empty())
        std::cout << csv;
    else
        write_file_atomic(o.output, csv);
    return 0;
}

int cmd_saddle(const Options& o) {
    const CellParams cell = cell_from(o);
    const SaddleNode sn = find_saddle_node(cell, o.branch.id());
    std::cout << "branch " << to_string(sn.branch) << '\n'
              << "alpha_sn " << g15(sn.param_at_min.alpha()) << '\n'
              << "alpha_tilde_sn " << g15(sn.param_at_min.alpha_tilde()) << '\n'
              << "L_sn " << g15(sn.L_sn) << '\n'
              << "lambda_sn " << g15(lambda_of_L(sn.L_sn)) << '\n';
    return 0;
}

std::string_view rule_name(StabilityRule r) {
    switch (r) {
    case StabilityRule::NoZeros: return "no-zeros";
    case StabilityRule::TwoOrMore: return "two-or-more-zeros";
    case StabilityRule::SingleZeroSlope: return "single-zero-slope";
    }
    return "?";
}

int cmd_stability(const Options& o) {
    const CellParams cell = cell_from(o);
    if (!(o.L > 0.0))
        throw DomainError("--L must be positive");
    std::printf("%-6s %-7s %-20s %-20s %-20s %-6s %-18s %s\n", "branch", "regime", "param", "y_minus",
                "y_plus", "zeros", "rule", "verdict");
    for (auto kind : {BranchKind::A, BranchKind::Cr, BranchKind::Cl, BranchKind::D}) {
        for (int k = 0; k <= o.k_max; ++k) {
            const BranchId id{kind, k};
            for (const auto& p : solve_at_L(cell, id, o.L)) {
                const auto [ym, yp] = endpoint_ordinates(cell, id, p);
                const StabilityVerdict v = classify(cell, id, p);
                std::printf("%-6s %-7s %-20s %-20s %-20s %-6d %-18s %s\n", to_string(id).c_str(),
                            p.is_closed() ? "closed" : "open", g15(p.value()).c_str(),
                            g15(ym).c_str(), g15(yp).c_str(), v.zero_count,
                            std::string(rule_name(v.rule)).c_str(),
                            std::string(to_string(v.verdict)).c_str());
            }
        }
    }
    return 0;
}

int cmd_verify(const Options& o) {
    const CellParams cell = cell_from(o);
    const auto points = parse_diagram_csv(read_file(o.input));
    double worst = 0.0;
    std::string worst_at = "-";
    for (const auto& p : points) {
        const double r = shoot_check(cell, p);
        log(LogLevel::Debug, to_string(p.branch) + " L=" + g15(p.L) + " residual " + g15(r));
        if (!(r <= worst)) {
            worst = r;
            worst_at = to_string(p.branch) + " L=" + g15(p.L);
        }
    }
    std::cout << "points " << points.size() << '\n'
              << "max_residual " << g15(worst) << " at " << worst_at << '\n';
    if (!(worst <= o.tolerance)) {
        std::cout << "FAIL residual exceeds " << g15(o.tolerance) << '\n';
        return 1;
    }
    std::cout << "OK\n";
    return 0;
}

int cmd_relax(const Options& o) {
    const CellParams cell = cell_from(o);
    const BranchId id = o.branch.id();
    const auto roots = solve_at_L(cell, id, o.L);
    if (roots.empty())
        throw DomainError("branch " + to_string(id) + " has no equilibrium at L = " + g15(o.L));
    if (o.root < 0 || o.root >= static_cast<int>(roots.size()))
        throw DomainError("--root out of range: branch has " + std::to_string(roots.size()) +
                          " equilibria at this L");
    BranchPoint pt;
    pt.branch = id;
    pt.param = roots[static_cast<std::size_t>(o.root)];
    pt.L = o.L;
    pt.lambda = lambda_of_L(o.L);
    const auto [ym, yp] = endpoint_ordinates(cell, id, pt.param);
    pt.y_minus = ym;
    pt.y_plus = yp;
    pt.stability = classify(cell, id, pt.param).verdict;
    const RelaxationRun run = relax(cell, pt, o.relax);
    std::cout << "branch " << to_string(id) << " param " << g15(pt.param.value()) << " L " << g15(o.L)
              << '\n'
              << "classifier " << to_string(pt.stability) << '\n'
              << "steps " << run.steps << " distance " << g15(run.distance) << '\n'
              << "outcome " << to_string(run.outcome) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    init_log();
    Options o;
    CLI::App app{"Time-map bifurcation engine for x'' + sin 2x = 0 with twisted boundary angles"};
    app.require_subcommand(1);
    app.add_flag("--degrees", o.degrees, "Read angle flags in degrees");
    app.add_option("--config", o.config_path, "JSON run configuration (flags win)")
        ->check(CLI::ExistingFile);

    auto* timemap = app.add_subcommand("timemap", "Evaluate T, T1 or T2");
    timemap->add_option("--map", o.map, "T, T1 or T2")->check(CLI::IsMember({"T", "T1", "T2"}));
    timemap->add_option("--alpha", o.alpha, "Amplitude of a closed orbit");
    timemap->add_option("--beta", o.beta, "Speed at x = 0 of an open orbit");
    timemap->add_option("--phi", o.phi, "Target angle");
    timemap->add_flag("--verify", o.verify_oracle, "Cross-check against the brute-force oracle");

    auto* diagram = app.add_subcommand("diagram", "Build a bifurcation diagram");
    o.cell.add(diagram);
    o.k_max_opt = diagram->add_option("--k-max", o.k_max, "Largest k traced");
    o.L_max_opt = diagram->add_option("--L-max", o.L_max, "Largest half-length");
    o.n_points_opt = diagram->add_option("--n-points", o.n_points, "Samples per branch");
    o.beta_max_opt = diagram->add_option("--beta-max", o.beta_max, "Sampling bound on the open A branch");
    o.csv_opt = diagram->add_option("--csv", o.csv, "CSV output path");
    o.json_opt = diagram->add_option("--json", o.json, "JSON output path");
    o.svg_opt = diagram->add_option("--svg", o.svg, "SVG output path");
    o.overlay_opt = diagram->add_flag("--overlay-symmetric", o.overlay, "Dashed symmetric-cell overlay");
    o.ordinate_opt = diagram->add_option("--ordinate", o.ordinate, "yminus (default) or yL");

    auto* branch = app.add_subcommand("branch", "Trace a single branch as CSV");
    branch->add_option("--phi0", o.cell.phi0, "Left boundary angle");
    branch->add_option("--phi1", o.cell.phi1, "Right boundary angle");
    o.branch.add(branch, true);
    branch->add_option("--L-max", o.L_max, "Largest half-length");
    branch->add_option("--n-points", o.n_points, "Samples");
    branch->add_option("--beta-max", o.beta_max, "Sampling bound on the open A branch");
    branch->add_option("-o,--output", o.output, "Output path (stdout if omitted)");

    auto* saddle = app.add_subcommand("saddle", "Locate the fold of a convex branch");
    saddle->add_option("--phi0", o.cell.phi0, "Left boundary angle");
    saddle->add_option("--phi1", o.cell.phi1, "Right boundary angle");
    o.branch.add(saddle, true);

    auto* stability = app.add_subcommand("stability", "Verdict table at one half-length");
    stability->add_option("--phi0", o.cell.phi0, "Left boundary angle");
    stability->add_option("--phi1", o.cell.phi1, "Right boundary angle");
    stability->add_option("--L", o.L, "Half-length")->required();
    stability->add_option("--k-max", o.k_max, "Largest k listed");

    auto* verify = app.add_subcommand("verify", "Shooting residuals of a diagram CSV");
    verify->add_option("--phi0", o.cell.phi0, "Left boundary angle the CSV was built for");
    verify->add_option("--phi1", o.cell.phi1, "Right boundary angle the CSV was built for");
    verify->add_option("--input", o.input, "Diagram CSV")->required();
    verify->add_option("--tolerance", o.tolerance, "Largest acceptable residual");

    auto* relaxc = app.add_subcommand("relax", "Gradient-flow run from a perturbed equilibrium");
    relaxc->add_option("--phi0", o.cell.phi0, "Left boundary angle");
    relaxc->add_option("--phi1", o.cell.phi1, "Right boundary angle");
    o.branch.add(relaxc, true);
    relaxc->add_option("--L", o.L, "Half-length")->required();
    relaxc->add_option("--root", o.root, "Which equilibrium when the branch folds (0 = lower energy)");
    relaxc->add_option("--perturbation", o.relax.perturbation, "Amplitude of the sin(pi zeta) kick");
    relaxc->add_option("--t-final", o.relax.t_final, "Flow time");
    relaxc->add_option("--grid", o.relax.grid_size, "Interior grid nodes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    // The cell values are shared; take the option handles from the subcommand that ran.
    for (auto* sub : {diagram, branch, saddle, stability, verify, relaxc}) {
        if (sub->parsed()) {
            o.cell.phi0_opt = sub->get_option("--phi0");
            o.cell.phi1_opt = sub->get_option("--phi1");
        }
    }

    try {
        if (timemap->parsed())
            return cmd_timemap(o);
        if (diagram->parsed())
            return cmd_diagram(o);
        if (branch->parsed())
            return cmd_branch(o);
        if (saddle->parsed())
            return cmd_saddle(o);
        if (stability->parsed())
            return cmd_stability(o);
        if (verify->parsed())
            return cmd_verify(o);
        if (relaxc->parsed())
            return cmd_relax(o);
    } catch (const DomainError& e) {
        std::cerr << "twistmap: " << e.what() << '\n';
        return 2;
    } catch (const AccuracyError& e) {
        std::cerr << "twistmap: accuracy: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "twistmap: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
