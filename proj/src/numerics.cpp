#include "heatcurve/numerics.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace heatcurve {

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidParameter("quadrature tolerances must be positive");
    if (max_depth < 1 || max_depth > 60) throw InvalidParameter("quadrature max_depth must lie in [1, 60]");
    if (panel_order != 15) throw InvalidParameter("only the 15-point Gauss-Kronrod panel is available");
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw InvalidParameter("gauss_legendre: n must be positive");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
        return cache.emplace(n, std::move(rule)).first->second;
    }
    // Legendre P_n and its derivative by the three-term recurrence
    auto legendre = [n](double x, double& deriv) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        deriv = n * (x * p1 - p0) / (x * x - 1.0);
        return p1;
    };
    for (int i = 0; i < n / 2 + n % 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            const double dx = legendre(x, dp) / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre(x, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

// Power series and the large-argument expansion meet at x = 20: the series
// has only positive terms there, and the smallest asymptotic term is ~1e-17.
constexpr double kBesselSplit = 20.0;

double i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double i1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// sqrt(2 pi x) e^{-x} I_nu(x) ~ sum_k (-1)^k prod_j (4nu^2 - (2j-1)^2) / (k! (8x)^k)
double scaled_asymptotic(double x, double nu) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i0_scaled(double x) {
    if (!(x >= 0.0)) throw InvalidParameter("bessel_i0_scaled: x must be nonnegative");
    if (x <= kBesselSplit) return i0_series(x) * std::exp(-x);
    if (std::isinf(x)) return 0.0;
    return scaled_asymptotic(x, 0.0);
}

double bessel_i1_scaled(double x) {
    if (!(x >= 0.0)) throw InvalidParameter("bessel_i1_scaled: x must be nonnegative");
    if (x <= kBesselSplit) return i1_series(x) * std::exp(-x);
    if (std::isinf(x)) return 0.0;
    return scaled_asymptotic(x, 1.0);
}

Extrapolation richardson(std::span<const double> values, std::span<const double> steps, int order) {
    if (values.size() != steps.size()) throw InvalidParameter("richardson: values and steps differ in length");
    if (values.empty()) throw InvalidParameter("richardson: no values");
    if (order < 1) throw InvalidParameter("richardson: order must be positive");
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (!(steps[i] < steps[i - 1])) throw InvalidParameter("richardson: steps must be strictly decreasing");
    }
    const std::size_t n = values.size();
    if (n == 1) return {values[0], std::numeric_limits<double>::infinity()};

    std::vector<std::vector<double>> table(n);
    for (std::size_t i = 0; i < n; ++i) {
        table[i].resize(i + 1);
        table[i][0] = values[i];
        for (std::size_t j = 1; j <= i; ++j) {
            const double ratio = std::pow(steps[i - j] / steps[i], static_cast<double>(order));
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (ratio - 1.0);
        }
    }
    const double limit = table[n - 1][n - 1];
    return {limit, std::abs(limit - table[n - 2][n - 2])};
}

PowerFit powerbasis_fit(std::span<const double> t, std::span<const double> y,
                        std::span<const double> exponents, double max_condition) {
    const auto m = static_cast<Eigen::Index>(t.size());
    const auto p = static_cast<Eigen::Index>(exponents.size());
    if (t.size() != y.size()) throw InvalidParameter("powerbasis_fit: t and y differ in length");
    if (p == 0) throw InvalidParameter("powerbasis_fit: empty basis");
    if (m < p + 2) throw InvalidParameter("powerbasis_fit: need at least len(exponents) + 2 samples");
    for (double ti : t) {
        if (!(ti > 0.0)) throw InvalidParameter("powerbasis_fit: abscissae must be positive");
    }

    Eigen::MatrixXd a(m, p);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        rhs(i) = y[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < p; ++j) {
            a(i, j) = std::pow(t[static_cast<std::size_t>(i)], exponents[static_cast<std::size_t>(j)]);
        }
    }
    Eigen::VectorXd scale = a.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(scale(j) > 0.0)) throw FitFailure("powerbasis_fit: zero column", std::numeric_limits<double>::infinity());
        a.col(j) /= scale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    const double cond = sv(p - 1) > 0.0 ? sv(0) / sv(p - 1) : std::numeric_limits<double>::infinity();
    if (!(cond <= max_condition)) throw FitFailure("powerbasis_fit: design matrix is ill-conditioned", cond);

    Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd resid = rhs - a * c;
    PowerFit fit;
    fit.coeffs.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) fit.coeffs[static_cast<std::size_t>(j)] = c(j) / scale(j);
    fit.max_residual = resid.cwiseAbs().maxCoeff();
    fit.condition_number = cond;
    return fit;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > 0.0)) throw InvalidParameter("geometric_grid: bounds must be positive");
    if (n < 1) throw InvalidParameter("geometric_grid: need at least one point");
    if (n == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace heatcurve
