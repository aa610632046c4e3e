#include "curvebound/numerics.hpp"

#include "curvebound/types.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cstdint>
#include <limits>

namespace curvebound {

double integrate_gl(const ScalarFn& f, double a, double b, int panels) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        total += Rule::integrate(f, lo, lo + h);
    }
    return total;
}

namespace {

template <unsigned Points>
double gk(const ScalarFn& f, double a, double b, double tol, double* err_out) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, Points>::integrate(
        f, a, b, 20, tol, &err, &l1);
    if (err_out) *err_out = err;
    if (!std::isfinite(v) || err > std::max(1e3 * tol * std::max(1.0, l1), 1e-12 * l1))
        throw SolverError("adaptive quadrature did not converge");
    return v;
}

}  // namespace

double integrate_adaptive(const ScalarFn& f, double a, double b, double tol, double* error_estimate) {
    return gk<61>(f, a, b, tol, error_estimate);
}

double integrate_adaptive_gk31(const ScalarFn& f, double a, double b, double tol) {
    return gk<31>(f, a, b, tol, nullptr);
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double p = std::exp(-1.0 / t);
    const double q = std::exp(-1.0 / (1.0 - t));
    return p / (p + q);
}

double Cutoff::operator()(double r) const {
    r = std::abs(r);
    if (r <= plateau) return 1.0;
    if (r >= support) return 0.0;
    return 1.0 - smooth_step((r - plateau) / (support - plateau));
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ValidationError("fit_line needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

double bisect_root(const ScalarFn& f, double a, double b, double tol) {
    double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw SolverError("root not bracketed");
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> x(n + 1);
    for (int j = 0; j <= n; ++j) x[j] = a + (b - a) * j / n;
    return x;
}

}  // namespace curvebound
