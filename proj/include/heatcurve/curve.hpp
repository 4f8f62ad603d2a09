#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace heatcurve {

using Vec3 = Eigen::Vector3d;

enum class CurveFamily { circle, ellipse, trefoil, custom };

std::string to_string(CurveFamily family);
CurveFamily parse_family(std::string_view name);

/// Cosine/sine coefficients of one harmonic n for x, y, z:
/// x(u) = ax cos(nu) + bx sin(nu), and likewise for y and z.
struct Harmonic {
    double ax = 0.0, bx = 0.0;
    double ay = 0.0, by = 0.0;
    double az = 0.0, bz = 0.0;
};

/// A closed curve u -> gamma(u), u in [0, 2 pi), as a finite Fourier sum.
/// Harmonic n sits at harmonics[n].
struct CurveSpec {
    std::vector<Harmonic> harmonics;
    CurveFamily family = CurveFamily::custom;
    std::vector<double> params;  // builtin family parameters, empty for custom

    Vec3 point(double u) const;
};

CurveSpec make_builtin(CurveFamily family, std::span<const double> params = {});

/// Parses the plain-text coefficient format: one line per harmonic 0..N,
/// six numbers "ax bx ay by az bz". Blank lines and '#' comments are skipped.
/// Throws InvalidParameter naming the offending line.
CurveSpec parse_curve_text(std::string_view text);
CurveSpec load_curve_file(const std::filesystem::path& path);

/// gamma(u), gamma'(u), ..., gamma^(order)(u). order <= 8.
std::vector<Vec3> derivatives(const CurveSpec& curve, double u, int order);

/// gamma(u + du) - gamma(u) without cancellation for small du.
Vec3 chord(const CurveSpec& curve, double u, double du);

/// The same geometric curve with parameter u replaced by u + shift.
CurveSpec shifted(const CurveSpec& curve, double shift);

/// The curve scaled by factor about the origin.
CurveSpec scaled(const CurveSpec& curve, double factor);

/// Throws DegenerateCurve unless |g' x g''| >= 1e-8 |g'|^3 on a 4096-point grid.
void check_biregular(const CurveSpec& curve);

/// Frenet frame and curvature in the Fourier parameter. Cheap; used in inner loops.
struct LocalFrame {
    Vec3 point;
    Vec3 tangent;
    Vec3 normal;
    Vec3 binormal;
    double speed = 0.0;      // |gamma'(u)|
    double curvature = 0.0;
};

LocalFrame local_frame(const CurveSpec& curve, double u);

/// max over a uniform grid of the curvature.
double max_curvature(const CurveSpec& curve, int grid = 4096);

/// Arc-length parametrization of a closed curve. Holds its own copy of the
/// curve; immutable after construction.
class ArcLengthTable {
public:
    ArcLengthTable(CurveSpec curve, int n_samples);

    double total_length() const noexcept { return length_; }
    int samples() const noexcept { return static_cast<int>(u_.size()) - 1; }
    const CurveSpec& curve() const noexcept { return curve_; }

    /// Arc length from u = 0; extended quasi-periodically to all of R.
    double s_of_u(double u) const;

    /// Inverse of s_of_u, extended quasi-periodically.
    double u_of_s(double s) const;

    /// du such that the arc from u to u + du has signed length ds. Keeps
    /// full relative precision for small ds.
    double u_offset(double u, double ds) const;

private:
    double cell_integral(double a, double b) const;

    CurveSpec curve_;
    std::vector<double> u_;
    std::vector<double> s_;
    std::vector<double> speed_;
    double length_ = 0.0;
};

/// Builds the arc-length table. Throws DegenerateCurve if not biregular,
/// InvalidParameter if n_samples < 64.
ArcLengthTable arclength_reparam(const CurveSpec& curve, int n_samples = 1024);

struct FrenetData {
    double s = 0.0;
    Vec3 point;
    Vec3 tangent;
    Vec3 normal;
    Vec3 binormal;
    double curvature = 0.0;
    // k^2, d/ds k^2, d^2/ds^2 k^2
    std::array<double, 3> curvature_jet{};
    double third_deriv_sq = 0.0;  // |gamma'''(s)|^2 in arc length
};

/// Frenet data at arc length s, with the curvature jet obtained by exact
/// series differentiation through u(s). Throws DegenerateFrame if k < min_curvature.
FrenetData frenet(const CurveSpec& curve, const ArcLengthTable& table, double s,
                  double min_curvature = 1e-10);

/// Arc-length derivatives gamma_s^(j)(s), j = 0..order (order <= 8), exact
/// up to rounding.
std::vector<Vec3> arclength_derivatives(const CurveSpec& curve, const ArcLengthTable& table, double s,
                                        int order);

struct EmbeddingInfo {
    double min_self_distance = 0.0;
    double reach_bound = 0.0;  // eps_0
    double max_curvature = 0.0;
};

/// Minimum chord over pairs whose arc separation exceeds min(pi/k_max, l/2),
/// refined from a grid of `grid` points, and eps_0 = 0.9 min(1/k_max, d/2).
/// Throws NotSimple if the minimum chord vanishes.
EmbeddingInfo check_embedded(const CurveSpec& curve, const ArcLengthTable& table, int grid = 1000);

}  // namespace heatcurve
