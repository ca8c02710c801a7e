#include "ils/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ils/error.hpp"

namespace ils::special {

namespace {

constexpr int kMaxIterations = 10'000;
constexpr double kEps = 1e-16;

double gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the modified Lentz method.
double gamma_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw DomainError("regularized_gamma_p needs a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_continued_fraction(a, x);
}

double chi_square_cdf(double x, int dof) {
    if (dof < 1) throw DomainError("chi-square needs at least one degree of freedom");
    if (!(x >= 0.0)) throw DomainError("chi-square argument must be non-negative");
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double log_unit_ball_volume(int k) {
    if (k < 0) throw DomainError("ball dimension must be non-negative");
    return 0.5 * k * std::log(std::numbers::pi) - std::lgamma(0.5 * k + 1.0);
}

double log_erf(double x) {
    if (!(x > 0.0)) throw DomainError("log_erf needs a positive argument");
    if (x > 0.5) return std::log1p(-std::erfc(x));
    return std::log(std::erf(x));
}

}  // namespace ils::special
