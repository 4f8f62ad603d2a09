#include "heatcurve/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "heatcurve/errors.hpp"

namespace heatcurve {

namespace {

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

constexpr std::string_view kConfigKey = "# config_hash=fnv1a64:";
constexpr std::string_view kContentKey = "# content_hash=fnv1a64:";

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void Section::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw InvalidParameter("Section::add_row: width mismatch in '" + title + "'");
    rows.push_back(std::move(row));
}

Section& Report::add_section(std::string title, std::vector<std::string> columns) {
    sections.push_back(Section{std::move(title), std::move(columns), {}});
    return sections.back();
}

void Report::note(std::string key, std::string value) { notes.emplace_back(std::move(key), std::move(value)); }

void Report::note(std::string key, double value) { note(std::move(key), format_number(value)); }

std::string Report::render(const Provenance& provenance) const {
    std::ostringstream out;
    for (const Section& s : sections) {
        if (!s.title.empty()) out << "# section=" << s.title << '\n';
        for (std::size_t j = 0; j < s.columns.size(); ++j) out << (j ? "," : "") << s.columns[j];
        out << '\n';
        for (const auto& row : s.rows) {
            for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
            out << '\n';
        }
    }
    for (const auto& [k, v] : notes) out << "# " << k << '=' << v << '\n';
    if (partial) out << "# status=PARTIAL " << partial_reason << '\n';
    out << "# tool=" << kToolVersion << '\n';
    out << "# seed=" << provenance.seed << '\n';
    out << kConfigKey << hex64(fnv1a64(provenance.config_canonical)) << '\n';
    std::string body = out.str();
    body += std::string(kContentKey) + hex64(fnv1a64(body)) + '\n';
    return body;
}

ReportCheck verify_report(std::string_view text, std::string_view config_canonical) {
    const std::size_t pos = text.rfind(kContentKey);
    if (pos == std::string_view::npos || (pos > 0 && text[pos - 1] != '\n')) return {false, "missing content hash"};
    std::string_view stated = text.substr(pos + kContentKey.size());
    if (stated.size() != 17 || stated.back() != '\n') return {false, "malformed content hash line"};
    stated.remove_suffix(1);
    if (stated != hex64(fnv1a64(text.substr(0, pos)))) return {false, "content hash mismatch"};
    if (!config_canonical.empty()) {
        const std::size_t cpos = text.rfind(kConfigKey, pos);
        if (cpos == std::string_view::npos) return {false, "missing config hash"};
        const std::string_view ch = text.substr(cpos + kConfigKey.size(), 16);
        if (ch != hex64(fnv1a64(config_canonical))) return {false, "config hash mismatch"};
    }
    return {true, ""};
}

std::string render_svg(const PlotSpec& plot) {
    const double width = 720, panel_h = 300, left = 80, right = 180, top = 40, gap = 50;
    const bool two = !plot.residuals.empty();
    const double height = top + panel_h + (two ? gap + 200 : 0) + 50;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << escape_xml(plot.title) << "</text>\n";

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    auto panel = [&](const std::vector<PlotSeries>& series, double y0, double h, const std::string& y_label) {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (double x : plot.x) {
            if (x > 0) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
        }
        for (const auto& s : series) {
            for (double y : s.y) {
                if (y > 0 && std::isfinite(y)) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
            }
        }
        const double pw = width - left - right;
        svg << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\"" << h
            << "\" fill=\"none\" stroke=\"black\"/>\n";
        svg << "<text x=\"10\" y=\"" << y0 + h / 2 << "\">" << escape_xml(y_label) << "</text>\n";
        if (!(xmax > xmin) || !(ymax >= ymin)) return;
        const double lx0 = std::floor(std::log10(xmin)), lx1 = std::max(lx0 + 1, std::ceil(std::log10(xmax)));
        const double ly0 = std::floor(std::log10(ymin)), ly1 = std::max(ly0 + 1, std::ceil(std::log10(ymax)));
        auto px = [&](double x) { return left + pw * (std::log10(x) - lx0) / (lx1 - lx0); };
        auto py = [&](double y) { return y0 + h - h * (std::log10(y) - ly0) / (ly1 - ly0); };
        for (double e = lx0; e <= lx1; e += 1) {
            svg << "<text x=\"" << fmt_coord(px(std::pow(10, e)) - 10) << "\" y=\"" << y0 + h + 15 << "\">1e"
                << static_cast<int>(e) << "</text>\n";
        }
        const double ystep = std::max(1.0, std::ceil((ly1 - ly0) / 8));
        for (double e = ly0; e <= ly1; e += ystep) {
            svg << "<text x=\"" << left - 40 << "\" y=\"" << fmt_coord(py(std::pow(10, e)) + 4) << "\">1e"
                << static_cast<int>(e) << "</text>\n";
        }
        for (std::size_t i = 0; i < series.size(); ++i) {
            const char* color = colors[i % std::size(colors)];
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t j = 0; j < plot.x.size() && j < series[i].y.size(); ++j) {
                const double y = series[i].y[j];
                if (plot.x[j] > 0 && y > 0 && std::isfinite(y)) svg << fmt_coord(px(plot.x[j])) << ',' << fmt_coord(py(y)) << ' ';
            }
            svg << "\"/>\n";
            svg << "<text x=\"" << width - right + 10 << "\" y=\"" << y0 + 15 + 16 * static_cast<double>(i)
                << "\" fill=\"" << color << "\">" << escape_xml(series[i].name) << "</text>\n";
        }
    };

    panel(plot.curves, top, panel_h, "value");
    if (two) panel(plot.residuals, top + panel_h + gap, 200, "residual");
    svg << "<text x=\"" << left + 200 << "\" y=\"" << height - 10 << "\">" << escape_xml(plot.x_label) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace heatcurve
