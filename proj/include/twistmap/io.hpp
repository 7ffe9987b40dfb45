#pragma once

// Run configuration and diagram serialisation (CSV, JSON, SVG).

#include <filesystem>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "twistmap/continuation.hpp"

namespace twistmap {

/// Which endpoint slope is plotted on the vertical axis.
enum class Ordinate { YMinus, YPlus };

std::string_view to_string(Ordinate o);
Ordinate parse_ordinate(std::string_view text);

struct RunConfig {
    double phi0 = std::numbers::pi / 6;
    double phi1 = std::numbers::pi / 4;
    int k_max = 4;
    double L_max = 4.0;
    int n_points = 100;
    ContinuationConfig continuation;
    std::string csv_path;
    std::string json_path;
    std::string svg_path;
    bool overlay_symmetric = false;
    Ordinate ordinate = Ordinate::YMinus;

    /// Throws DomainError on out-of-range fields or clashing output paths.
    void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Overwrites the fields present in `j`; unknown keys are rejected.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

// CSV -------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "branch,k,regime,param,energy,L,lambda,y_minus,y_plus,stability";

/// One row per BranchPoint, sorted by (branch, k, energy), 15 significant digits.
std::string diagram_csv(const Diagram& diagram);

/// Parses text produced by diagram_csv. Throws DomainError on malformed input.
std::vector<BranchPoint> parse_diagram_csv(std::string_view text);

// JSON ------------------------------------------------------------------------

nlohmann::json diagram_json(const Diagram& diagram);
/// Same, with the effective run configuration echoed under "config".
nlohmann::json diagram_json(const Diagram& diagram, const RunConfig& effective);

// SVG -------------------------------------------------------------------------

/// Self-contained plot of y(-L) (or y(L)) against L: one polyline per branch,
/// stable/unstable runs as distinct strokes labelled s/u, markers for the
/// critical orbits and SN markers for the saddle-nodes, and a dashed overlay
/// of the symmetric cell when present.
std::string diagram_svg(const Diagram& diagram, Ordinate ordinate = Ordinate::YMinus);

// Files -----------------------------------------------------------------------

/// Writes through a temporary sibling and renames; nothing is left behind on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace twistmap
