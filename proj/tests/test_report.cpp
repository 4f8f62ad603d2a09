#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "heatcurve/errors.hpp"
#include "heatcurve/report.hpp"

using namespace heatcurve;

namespace {

Report sample() {
    Report r;
    Section& s = r.add_section("", {"t", "value"});
    s.add_row({0.1, 1.0 / 3.0});
    s.add_row({1e-300, -2.5});
    r.note("length", 6.283185307179586);
    return r;
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("numbers use 17 significant digits and round-trip") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    for (double x : {1.0 / 3.0, 6.283185307179586, 1e-300, -2.5e17, std::numeric_limits<double>::denorm_min()}) {
        CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("render layout") {
    const Provenance p{7, "a=1\n"};
    const std::string text = sample().render(p);
    CHECK(text.rfind("t,value\n0.10000000000000001,0.33333333333333331\n", 0) == 0);
    CHECK(text.find("# length=6.2831853071795862\n") != std::string::npos);
    CHECK(text.find("# tool=heatcurve 1.0.0\n# seed=7\n# config_hash=fnv1a64:") != std::string::npos);
    CHECK(text.find("# content_hash=fnv1a64:") != std::string::npos);
    CHECK(text.back() == '\n');
    CHECK(text == sample().render(p));
}

TEST_CASE("sections and partial marker") {
    Report r;
    r.add_section("heat", {"t"}).add_row({1.0});
    r.add_section("laplace", {"lambda"}).add_row({2.0});
    r.partial = true;
    r.partial_reason = "stalled";
    const std::string text = r.render({});
    CHECK(text.find("# section=heat\nt\n1\n# section=laplace\nlambda\n2\n") == 0);
    CHECK(text.find("# status=PARTIAL stalled\n") != std::string::npos);
    CHECK(verify_report(text).ok);
}

TEST_CASE("row width is checked") {
    Section s{"x", {"a", "b"}, {}};
    CHECK_THROWS_AS(s.add_row({1.0}), InvalidParameter);
}

TEST_CASE("tamper detection") {
    const Provenance p{1, "curve=circle\n"};
    const std::string text = sample().render(p);
    CHECK(verify_report(text).ok);
    CHECK(verify_report(text, "curve=circle\n").ok);

    const auto other = verify_report(text, "curve=ellipse\n");
    CHECK_FALSE(other.ok);
    CHECK(other.reason == "config hash mismatch");

    std::string edited = text;
    edited[edited.find("0.3333")] = '9';
    const auto bad = verify_report(edited);
    CHECK_FALSE(bad.ok);
    CHECK(bad.reason == "content hash mismatch");

    std::string seed = text;
    seed.replace(seed.find("# seed=1"), 8, "# seed=2");
    CHECK_FALSE(verify_report(seed).ok);

    CHECK_FALSE(verify_report(text.substr(0, text.size() - 5)).ok);
    CHECK_FALSE(verify_report("t\n1\n").ok);
}

TEST_CASE("svg output") {
    PlotSpec plot;
    plot.title = "a < b";
    plot.x = {1e-3, 1e-2, 1e-1};
    plot.curves = {{"H", {3.0, 2.0, 1.0}}};
    plot.residuals = {{"r", {1e-9, 0.0, 1e-7}}};
    const std::string svg = render_svg(plot);
    CHECK(svg.rfind("<svg ", 0) == 0);
    CHECK(svg.find("a &lt; b") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg == render_svg(plot));
}
