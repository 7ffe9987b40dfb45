#include "twistmap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "twistmap/errors.hpp"

namespace twistmap {

using nlohmann::json;

std::string_view to_string(Ordinate o) { return o == Ordinate::YMinus ? "yminus" : "yL"; }

Ordinate parse_ordinate(std::string_view text) {
    if (text == "yminus" || text == "y-L")
        return Ordinate::YMinus;
    if (text == "yL" || text == "yplus")
        return Ordinate::YPlus;
    throw DomainError("unknown ordinate '" + std::string(text) + "' (expected yminus or yL)");
}

void RunConfig::validate() const {
    CellParams cell(phi0, phi1);
    (void)cell;
    continuation.quad.validate();
    if (k_max < 0)
        throw DomainError("k_max must be non-negative");
    if (!(L_max > 0.0))
        throw DomainError("L_max must be positive");
    if (n_points < 2)
        throw DomainError("n_points must be at least 2");
    if (!(continuation.beta_max > kSqrt2))
        throw DomainError("beta_max must exceed sqrt(2)");
    const std::vector<std::string> paths{csv_path, json_path, svg_path};
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t j = i + 1; j < paths.size(); ++j)
            if (!paths[i].empty() && paths[i] == paths[j])
                throw DomainError("output paths must be distinct: " + paths[i]);
}

json to_json(const RunConfig& cfg) {
    const QuadConfig& q = cfg.continuation.quad;
    return json{
        {"phi0", cfg.phi0},
        {"phi1", cfg.phi1},
        {"k_max", cfg.k_max},
        {"L_max", cfg.L_max},
        {"n_points", cfg.n_points},
        {"beta_max", cfg.continuation.beta_max},
        {"tolerances",
         {{"rel_tol", q.rel_tol},
          {"abs_tol", q.abs_tol},
          {"max_subdivisions", q.max_subdivisions},
          {"alpha_cap", q.alpha_cap}}},
        {"csv", cfg.csv_path},
        {"json", cfg.json_path},
        {"svg", cfg.svg_path},
        {"overlay_symmetric", cfg.overlay_symmetric},
        {"ordinate", std::string(to_string(cfg.ordinate))},
    };
}

void apply_json(RunConfig& cfg, const json& j) {
    if (!j.is_object())
        throw DomainError("config: top level must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "phi0") cfg.phi0 = value.get<double>();
            else if (key == "phi1") cfg.phi1 = value.get<double>();
            else if (key == "k_max") cfg.k_max = value.get<int>();
            else if (key == "L_max") cfg.L_max = value.get<double>();
            else if (key == "n_points") cfg.n_points = value.get<int>();
            else if (key == "beta_max") cfg.continuation.beta_max = value.get<double>();
            else if (key == "csv") cfg.csv_path = value.get<std::string>();
            else if (key == "json") cfg.json_path = value.get<std::string>();
            else if (key == "svg") cfg.svg_path = value.get<std::string>();
            else if (key == "overlay_symmetric") cfg.overlay_symmetric = value.get<bool>();
            else if (key == "ordinate") cfg.ordinate = parse_ordinate(value.get<std::string>());
            else if (key == "tolerances") {
                QuadConfig& q = cfg.continuation.quad;
                for (const auto& [tk, tv] : value.items()) {
                    if (tk == "rel_tol") q.rel_tol = tv.get<double>();
                    else if (tk == "abs_tol") q.abs_tol = tv.get<double>();
                    else if (tk == "max_subdivisions") q.max_subdivisions = tv.get<int>();
                    else if (tk == "alpha_cap") q.alpha_cap = tv.get<double>();
                    else throw DomainError("config: unknown tolerance key '" + tk + "'");
                }
            } else {
                throw DomainError("config: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw DomainError("config " + path.string() + ": " + e.what());
    }
    apply_json(base, j);
    return base;
}

// CSV -------------------------------------------------------------------------

namespace {

std::string fmt15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(std::string_view s, std::size_t line_no) {
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size())
        throw DomainError("csv line " + std::to_string(line_no) + ": bad number '" + tmp + "'");
    return v;
}

}  // namespace

std::string diagram_csv(const Diagram& diagram) {
    std::vector<const BranchPoint*> rows;
    rows.reserve(diagram.point_count());
    for (const auto& b : diagram.branches)
        for (const auto& p : b.points)
            rows.push_back(&p);
    std::stable_sort(rows.begin(), rows.end(), [](const BranchPoint* a, const BranchPoint* b) {
        if (a->branch != b->branch)
            return a->branch < b->branch;
        return a->param.energy() < b->param.energy();
    });
    std::string out(kCsvHeader);
    out += '\n';
    for (const BranchPoint* p : rows) {
        out += to_string(p->branch.kind);
        out += ',' + std::to_string(p->branch.k);
        out += p->param.is_closed() ? ",closed," : ",open,";
        out += fmt15(p->param.value()) + ',' + fmt15(p->param.energy()) + ',' + fmt15(p->L) + ',' +
               fmt15(p->lambda) + ',' + fmt15(p->y_minus) + ',' + fmt15(p->y_plus) + ',';
        out += to_string(p->stability);
        out += '\n';
    }
    return out;
}

std::vector<BranchPoint> parse_diagram_csv(std::string_view text) {
    std::vector<BranchPoint> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw DomainError("csv: unexpected header '" + std::string(line) + "'");
            header_seen = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 10)
            throw DomainError("csv line " + std::to_string(line_no) + ": expected 10 fields");
        BranchPoint p;
        p.branch.kind = parse_branch_kind(f[0]);
        p.branch.k = static_cast<int>(parse_double(f[1], line_no));
        const double value = parse_double(f[3], line_no);
        if (f[2] == "closed")
            p.param = OrbitParam::closed(value);
        else if (f[2] == "open")
            p.param = OrbitParam::open(value);
        else
            throw DomainError("csv line " + std::to_string(line_no) + ": bad regime");
        p.L = parse_double(f[5], line_no);
        p.lambda = parse_double(f[6], line_no);
        p.y_minus = parse_double(f[7], line_no);
        p.y_plus = parse_double(f[8], line_no);
        p.stability = parse_stability(f[9]);
        rows.push_back(p);
    }
    if (!header_seen)
        throw DomainError("csv: missing header");
    return rows;
}

// JSON ------------------------------------------------------------------------

namespace {

json param_json(const OrbitParam& p) {
    json j{{"regime", p.is_closed() ? "closed" : "open"},
           {"param", p.value()},
           {"energy", p.energy()}};
    if (p.is_closed())
        j["alpha_tilde"] = p.alpha_tilde();
    return j;
}

}  // namespace

json diagram_json(const Diagram& d) {
    json branches = json::array();
    for (const auto& b : d.branches) {
        json pts = json::array();
        for (const auto& p : b.points) {
            json jp = param_json(p.param);
            jp["L"] = p.L;
            jp["lambda"] = p.lambda;
            jp["y_minus"] = p.y_minus;
            jp["y_plus"] = p.y_plus;
            jp["stability"] = std::string(to_string(p.stability));
            pts.push_back(std::move(jp));
        }
        branches.push_back({{"branch", std::string(to_string(b.branch.kind))},
                            {"k", b.branch.k},
                            {"points", std::move(pts)}});
    }
    json criticals = json::array();
    for (const auto& c : d.criticals)
        criticals.push_back({{"k", c.k},
                             {"T_star", c.T_star},
                             {"T_upper", c.T_upper},
                             {"L_star", 0.5 * c.T_star},
                             {"L_upper", 0.5 * c.T_upper},
                             {"y_abs", c.y_abs}});
    json saddles = json::array();
    for (const auto& s : d.saddles) {
        json js = param_json(s.param_at_min);
        js["branch"] = std::string(to_string(s.branch.kind));
        js["k"] = s.branch.k;
        js["L_sn"] = s.L_sn;
        js["T_min"] = s.T_min;
        saddles.push_back(std::move(js));
    }
    return json{
        {"cell", {{"phi0", d.cell.phi0()}, {"phi1", d.cell.phi1()}}},
        {"k_max", d.k_max},
        {"L_max", d.L_max},
        {"n_points", d.n_points},
        {"branches", std::move(branches)},
        {"criticals", std::move(criticals)},
        {"saddles", std::move(saddles)},
        {"symmetric_overlay", d.symmetric_overlay ? diagram_json(*d.symmetric_overlay) : json(nullptr)},
    };
}

json diagram_json(const Diagram& diagram, const RunConfig& effective) {
    json j = diagram_json(diagram);
    j["config"] = to_json(effective);
    return j;
}

// SVG -------------------------------------------------------------------------

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 40.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

std::string_view kind_color(BranchKind k) {
    switch (k) {
    case BranchKind::A: return "#1f77b4";
    case BranchKind::Cr: return "#2ca02c";
    case BranchKind::Cl: return "#d62728";
    case BranchKind::D: return "#9467bd";
    }
    return "#000000";
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Frame {
    double x_max;
    double y_abs;
    double px(double L) const { return kLeft + (kWidth - kLeft - kRight) * L / x_max; }
    double py(double y) const {
        return kTop + (kHeight - kTop - kBottom) * (0.5 - 0.5 * y / y_abs);
    }
};

double ordinate_of(const BranchPoint& p, Ordinate o) {
    return o == Ordinate::YMinus ? p.y_minus : p.y_plus;
}

struct Marker {
    double L;
    double y;
    std::string label;
};

// gamma_*k closes A_k (and Cr_k), gamma^*_k closes D_k (and Cl_k).
std::vector<Marker> critical_markers(const Diagram& d, Ordinate o) {
    std::vector<Marker> out;
    const OrbitParam crit = OrbitParam::closed(d.cell.phi_max());
    for (const auto& c : d.criticals) {
        for (bool upper : {false, true}) {
            if (0.5 * (upper ? c.T_upper : c.T_star) > d.L_max)
                continue;
            const BranchId owner{upper ? BranchKind::D : BranchKind::A, c.k};
            const auto [ym, yp] = endpoint_ordinates(d.cell, owner, crit);
            out.push_back({0.5 * (upper ? c.T_upper : c.T_star), o == Ordinate::YMinus ? ym : yp,
                           (upper ? "gamma^*_" : "gamma_*") + std::to_string(c.k)});
        }
    }
    return out;
}

std::vector<Marker> saddle_markers(const Diagram& d, Ordinate o) {
    std::vector<Marker> out;
    for (const auto& s : d.saddles) {
        if (s.L_sn > d.L_max)
            continue;
        const auto [ym, yp] = endpoint_ordinates(d.cell, s.branch, s.param_at_min);
        out.push_back({s.L_sn, o == Ordinate::YMinus ? ym : yp, "SN"});
    }
    return out;
}

std::string points_attr(const std::vector<BranchPoint>& pts, std::size_t from, std::size_t to,
                        const Frame& f, Ordinate o) {
    std::string s;
    for (std::size_t i = from; i < to; ++i) {
        if (!s.empty())
            s += ' ';
        s += fmt2(f.px(pts[i].L)) + ',' + fmt2(f.py(ordinate_of(pts[i], o)));
    }
    return s;
}

struct EndLabel {
    double x;
    double y;
    std::string name;
    int k;
};

void emit_branches(std::ostringstream& out, const Diagram& d, const Frame& f, Ordinate o,
                   bool overlay) {
    std::vector<EndLabel> labels;
    for (const auto& b : d.branches) {
        if (b.points.empty())
            continue;
        const std::string name = std::string(to_string(b.branch.kind));
        if (overlay) {
            out << "  <polyline class=\"overlay\" data-branch=\"" << name << "\" data-k=\""
                << b.branch.k << "\" points=\"" << points_attr(b.points, 0, b.points.size(), f, o)
                << "\"/>\n";
            continue;
        }
        out << "  <polyline class=\"branch\" data-branch=\"" << name << "\" data-k=\"" << b.branch.k
            << "\" stroke=\"" << kind_color(b.branch.kind) << "\" points=\""
            << points_attr(b.points, 0, b.points.size(), f, o) << "\"/>\n";
        // Maximal runs of equal stability; each run shares its end point with the next.
        std::size_t start = 0;
        while (start < b.points.size()) {
            std::size_t end = start + 1;
            while (end < b.points.size() && b.points[end].stability == b.points[start].stability)
                ++end;
            const Stability s = b.points[start].stability;
            if (s != Stability::Undetermined && end - start >= 1) {
                const std::size_t stop = std::min(end + 1, b.points.size());
                const bool stable = s == Stability::AsymptoticallyStable;
                out << "  <path class=\"" << (stable ? "stab-s" : "stab-u") << "\" d=\"M "
                    << points_attr(b.points, start, stop, f, o) << "\"/>\n";
                const auto& mid = b.points[(start + end - 1) / 2];
                out << "  <text class=\"stab-label\" x=\"" << fmt2(f.px(mid.L) + 4) << "\" y=\""
                    << fmt2(f.py(ordinate_of(mid, o)) - 4) << "\">" << (stable ? 's' : 'u')
                    << "</text>\n";
            }
            start = end;
        }
        const auto& last = b.points.back();
        labels.push_back({f.px(last.L) + 4, f.py(ordinate_of(last, o)) + 4, name, b.branch.k});
    }
    // Branches ending together at L_max would print on top of each other; keep
    // labels with nearly the same x at least one line apart.
    std::stable_sort(labels.begin(), labels.end(),
                     [](const EndLabel& a, const EndLabel& b) { return a.y < b.y; });
    for (std::size_t i = 1; i < labels.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(labels[i].x - labels[j].x) < 30.0 && labels[i].y < labels[j].y + 12.0)
                labels[i].y = labels[j].y + 12.0;
    for (const auto& l : labels)
        out << "  <text class=\"branch-label\" x=\"" << fmt2(l.x) << "\" y=\"" << fmt2(l.y) << "\">"
            << l.name << "<tspan baseline-shift=\"sub\">" << l.k << "</tspan></text>\n";
}

}  // namespace

std::string diagram_svg(const Diagram& d, Ordinate o) {
    const auto crit = critical_markers(d, o);
    const auto sadd = saddle_markers(d, o);
    Frame f{d.L_max, 0.0};
    auto widen = [&f](double L, double y) {
        f.x_max = std::max(f.x_max, L);
        f.y_abs = std::max(f.y_abs, std::abs(y));
    };
    auto widen_diagram = [&](const Diagram& dd) {
        for (const auto& b : dd.branches)
            for (const auto& p : b.points)
                widen(p.L, ordinate_of(p, o));
    };
    widen_diagram(d);
    if (d.symmetric_overlay)
        widen_diagram(*d.symmetric_overlay);
    for (const auto& m : crit)
        widen(m.L, m.y);
    for (const auto& m : sadd)
        widen(m.L, m.y);
    if (!(f.x_max > 0.0))
        f.x_max = 1.0;
    f.y_abs = f.y_abs > 0.0 ? 1.1 * f.y_abs : 1.0;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "  <style>\n"
        << "    polyline.branch { fill: none; stroke-width: 1.2; }\n"
        << "    polyline.overlay { fill: none; stroke: #7f7f7f; stroke-width: 1; stroke-dasharray: 6 4; }\n"
        << "    path.stab-s { fill: none; stroke: #000000; stroke-opacity: 0.35; stroke-width: 4; }\n"
        << "    path.stab-u { fill: none; stroke: #000000; stroke-opacity: 0.6; stroke-width: 1; stroke-dasharray: 1 3; }\n"
        << "    circle.critical { fill: #ffffff; stroke: #000000; stroke-width: 1.2; }\n"
        << "    g.saddle circle { fill: #000000; }\n"
        << "    text { font-family: sans-serif; font-size: 11px; }\n"
        << "  </style>\n"
        << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"#ffffff\"/>\n";

    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y_mid = f.py(0.0);
    out << "  <line class=\"axis\" x1=\"" << fmt2(x0) << "\" y1=\"" << fmt2(y_mid) << "\" x2=\""
        << fmt2(x1) << "\" y2=\"" << fmt2(y_mid) << "\" stroke=\"#000000\"/>\n"
        << "  <line class=\"axis\" x1=\"" << fmt2(x0) << "\" y1=\"" << fmt2(kTop) << "\" x2=\""
        << fmt2(x0) << "\" y2=\"" << fmt2(kHeight - kBottom) << "\" stroke=\"#000000\"/>\n";
    const int ticks = static_cast<int>(std::floor(f.x_max));
    const int tick_step = ticks > 12 ? 2 : 1;
    for (int t = 0; t <= ticks; t += tick_step) {
        out << "  <text class=\"tick\" x=\"" << fmt2(f.px(t) - 3) << "\" y=\""
            << fmt2(kHeight - kBottom + 16) << "\">" << t << "</text>\n";
    }
    // y ticks at a 1-2-5 step giving at most five labels above the axis
    double y_step = 1e-3;
    for (int i = 0; y_step * 5.0 < f.y_abs; ++i)
        y_step *= (i % 3 == 1) ? 2.5 : 2.0;
    for (int t = -static_cast<int>(f.y_abs / y_step); t * y_step <= f.y_abs; ++t) {
        const double y = t * y_step;
        char label[32];
        std::snprintf(label, sizeof label, "%g", std::abs(y) < 0.5 * y_step ? 0.0 : y);
        out << "  <line class=\"grid\" x1=\"" << fmt2(x0 - 4) << "\" y1=\"" << fmt2(f.py(y)) << "\" x2=\""
            << fmt2(x0) << "\" y2=\"" << fmt2(f.py(y)) << "\" stroke=\"#000000\"/>\n"
            << "  <text class=\"tick\" x=\"" << fmt2(x0 - 8) << "\" y=\"" << fmt2(f.py(y) + 4)
            << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    out << "  <text x=\"" << fmt2(0.5 * (x0 + x1)) << "\" y=\"" << fmt2(kHeight - 15) << "\">L</text>\n"
        << "  <text x=\"12\" y=\"" << fmt2(kTop - 10) << "\">"
        << (o == Ordinate::YMinus ? "y(-L)" : "y(L)") << "</text>\n"
        << "  <text x=\"" << fmt2(x0 + 80) << "\" y=\"22\">phi0 = " << d.cell.phi0()
        << ", phi1 = " << d.cell.phi1() << "</text>\n";

    if (d.symmetric_overlay)
        emit_branches(out, *d.symmetric_overlay, f, o, true);
    emit_branches(out, d, f, o, false);

    for (const auto& m : crit) {
        out << "  <circle class=\"critical\" cx=\"" << fmt2(f.px(m.L)) << "\" cy=\"" << fmt2(f.py(m.y))
            << "\" r=\"3.5\"><title>" << m.label << "</title></circle>\n";
    }
    for (const auto& m : sadd) {
        out << "  <g class=\"saddle\"><circle cx=\"" << fmt2(f.px(m.L)) << "\" cy=\"" << fmt2(f.py(m.y))
            << "\" r=\"3\"/><text x=\"" << fmt2(f.px(m.L) - 22) << "\" y=\"" << fmt2(f.py(m.y) + 4)
            << "\">SN</text></g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

// Files -----------------------------------------------------------------------

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            f.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace twistmap
