#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace heatcurve {

inline constexpr std::string_view kToolVersion = "heatcurve 1.0.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// %.17g, enough to round-trip a double.
std::string format_number(double x);

struct Section {
    std::string title;  // empty for single-table reports
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
};

struct Provenance {
    std::uint64_t seed = 0;
    std::string config_canonical;
};

/// Comma-separated tables followed by '#' footer lines. The footer ends
/// with a content hash over every preceding byte.
struct Report {
    std::vector<Section> sections;
    std::vector<std::pair<std::string, std::string>> notes;
    bool partial = false;
    std::string partial_reason;

    Section& add_section(std::string title, std::vector<std::string> columns);
    void note(std::string key, std::string value);
    void note(std::string key, double value);

    std::string render(const Provenance& provenance) const;
};

struct ReportCheck {
    bool ok = false;
    std::string reason;
};

/// Recomputes the content hash; if config_canonical is non-empty the
/// config hash must match it as well.
ReportCheck verify_report(std::string_view text, std::string_view config_canonical = {});

struct PlotSeries {
    std::string name;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::vector<double> x;
    std::vector<PlotSeries> curves;
    std::vector<PlotSeries> residuals;  // lower panel; omitted when empty
};

/// Static log-log SVG. Non-positive values are skipped.
std::string render_svg(const PlotSpec& plot);

}  // namespace heatcurve
