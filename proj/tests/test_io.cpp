#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <regex>

#include "twistmap/errors.hpp"
#include "twistmap/io.hpp"

using namespace twistmap;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

const CellParams kRef(pi / 6, pi / 4);

const Diagram& small_diagram() {
    static const Diagram d = build_diagram(kRef, 1, 3.0, 30);
    return d;
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
        ++n;
    return n;
}

std::vector<std::string> polyline_points(const std::string& svg, const std::string& cls) {
    std::vector<std::string> out;
    const std::regex re("<polyline class=\"" + cls + "\"[^>]*points=\"([^\"]*)\"");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        out.push_back((*it)[1].str());
    std::sort(out.begin(), out.end());
    return out;
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "twistmap_test_io";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("CSV round trip") {
    const Diagram& d = small_diagram();
    const std::string csv = diagram_csv(d);
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    const auto rows = parse_diagram_csv(csv);
    REQUIRE(rows.size() == d.point_count());

    std::vector<BranchPoint> all;
    for (const auto& b : d.branches)
        all.insert(all.end(), b.points.begin(), b.points.end());
    for (const auto& r : rows) {
        const auto match = std::find_if(all.begin(), all.end(), [&](const BranchPoint& p) {
            return p.branch == r.branch && std::abs(p.L - r.L) <= 1e-12 * p.L &&
                   std::abs(p.y_minus - r.y_minus) <= 1e-12;
        });
        REQUIRE(match != all.end());
        CHECK(std::abs(match->lambda - r.lambda) <= 1e-12 * match->lambda);
        CHECK(std::abs(match->y_plus - r.y_plus) <= 1e-12);
        CHECK(std::abs(match->param.energy() - r.param.energy()) <= 1e-12);
        CHECK(match->stability == r.stability);
    }
}

TEST_CASE("CSV rows are sorted by branch then energy") {
    const auto rows = parse_diagram_csv(diagram_csv(small_diagram()));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        const auto& b = rows[i];
        CHECK(!(b.branch < a.branch));
        if (a.branch == b.branch)
            CHECK(a.param.energy() <= b.param.energy());
    }
}

TEST_CASE("malformed CSV") {
    CHECK_THROWS_AS(parse_diagram_csv(""), DomainError);
    CHECK_THROWS_AS(parse_diagram_csv("a,b,c\n"), DomainError);
    const std::string h = std::string(kCsvHeader) + "\n";
    CHECK(parse_diagram_csv(h).empty());
    CHECK_THROWS_AS(parse_diagram_csv(h + "A,0,closed,0.9,0.1\n"), DomainError);
    CHECK_THROWS_AS(parse_diagram_csv(h + "Q,0,closed,0.9,0.1,1,8,0.5,0.1,stable\n"), DomainError);
    CHECK_THROWS_AS(parse_diagram_csv(h + "A,0,closed,abc,0.1,1,8,0.5,0.1,stable\n"), DomainError);
    CHECK_THROWS_AS(parse_diagram_csv(h + "A,0,sideways,0.9,0.1,1,8,0.5,0.1,stable\n"), DomainError);
}

TEST_CASE("JSON document") {
    const Diagram& d = small_diagram();
    RunConfig cfg;
    cfg.k_max = 1;
    cfg.L_max = 3.0;
    cfg.n_points = 30;
    const nlohmann::json j = diagram_json(d, cfg);
    CHECK(j.at("k_max") == 1);
    CHECK(j.at("branches").size() == d.branches.size());
    CHECK(j.at("criticals").size() == 2);
    // only Cl_0 folds below L = 3
    REQUIRE(j.at("saddles").size() == d.saddles.size());
    CHECK(j.at("config").at("n_points") == 30);
    CHECK(j.at("symmetric_overlay").is_null());
    std::size_t pts = 0;
    for (const auto& b : j.at("branches"))
        pts += b.at("points").size();
    CHECK(pts == d.point_count());
    CHECK_FALSE(diagram_json(d).contains("config"));
}

TEST_CASE("config JSON") {
    RunConfig cfg;
    cfg.phi0 = 0.3;
    cfg.ordinate = Ordinate::YPlus;
    cfg.continuation.quad.rel_tol = 1e-11;
    RunConfig back;
    apply_json(back, to_json(cfg));
    CHECK(back.phi0 == 0.3);
    CHECK(back.ordinate == Ordinate::YPlus);
    CHECK(back.continuation.quad.rel_tol == 1e-11);
    CHECK(to_json(back) == to_json(cfg));

    CHECK_THROWS_AS(apply_json(back, nlohmann::json{{"phi2", 0.1}}), DomainError);
    CHECK_THROWS_AS(apply_json(back, nlohmann::json{{"tolerances", {{"eps", 1}}}}), DomainError);
    CHECK_THROWS_AS(apply_json(back, nlohmann::json{{"k_max", "four"}}), DomainError);
}

TEST_CASE("config validation") {
    RunConfig cfg;
    cfg.validate();
    cfg.csv_path = "out.csv";
    cfg.json_path = "out.csv";
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.k_max = -1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.L_max = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.n_points = 1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.phi1 = pi / 2;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("SVG structure") {
    const Diagram& d = small_diagram();
    const std::string svg = diagram_svg(d);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    // tag balance for the container elements
    CHECK(count(svg, "<g") == count(svg, "</g>"));
    CHECK(count(svg, "<text") == count(svg, "</text>"));
    CHECK(count(svg, "<title>") == count(svg, "</title>"));

    std::size_t nonempty = 0;
    for (const auto& b : d.branches)
        nonempty += !b.points.empty();
    CHECK(polyline_points(svg, "branch").size() == nonempty);
    // markers are drawn only inside the L window
    std::size_t crit_in = 0, sn_in = 0;
    for (const auto& c : d.criticals)
        crit_in += (c.T_star / 2 <= d.L_max) + (c.T_upper / 2 <= d.L_max);
    for (const auto& s : d.saddles)
        sn_in += s.L_sn <= d.L_max;
    CHECK(crit_in == 2);
    CHECK(count(svg, "class=\"critical\"") == crit_in);
    CHECK(count(svg, ">SN</text>") == sn_in);
    CHECK(count(svg, "class=\"overlay\"") == 0);
    CHECK(svg.find(">s</text>") != std::string::npos);
    CHECK(svg.find(">u</text>") != std::string::npos);

    const Diagram with_overlay = build_diagram(kRef, 0, 3.0, 20, true);
    CHECK(count(diagram_svg(with_overlay), "class=\"overlay\"") > 0);
}

TEST_CASE("SVG of the mirrored cell") {
    const Diagram& d = small_diagram();
    const Diagram m = build_diagram(mirror(kRef), 1, 3.0, 30);
    CHECK(polyline_points(diagram_svg(m, Ordinate::YPlus), "branch") ==
          polyline_points(diagram_svg(d, Ordinate::YMinus), "branch"));
}

TEST_CASE("atomic file writes") {
    const fs::path dir = scratch_dir();
    const fs::path target = dir / "out.txt";
    write_file_atomic(target, "hello\n");
    CHECK(read_file(target) == "hello\n");
    write_file_atomic(target, "again\n");
    CHECK(read_file(target) == "again\n");
    CHECK_FALSE(fs::exists(dir / "out.txt.tmp"));

    const fs::path missing = dir / "no_such_dir" / "out.txt";
    CHECK_THROWS(write_file_atomic(missing, "x"));
    CHECK_FALSE(fs::exists(missing));
    CHECK_FALSE(fs::exists(dir / "no_such_dir"));
    CHECK_THROWS(read_file(missing));
    fs::remove_all(dir);
}

TEST_CASE("serialisation is deterministic") {
    const Diagram a = build_diagram(kRef, 1, 3.0, 30);
    const Diagram b = build_diagram(kRef, 1, 3.0, 30);
    CHECK(diagram_csv(a) == diagram_csv(b));
    CHECK(diagram_json(a).dump() == diagram_json(b).dump());
    CHECK(diagram_svg(a) == diagram_svg(b));
}
