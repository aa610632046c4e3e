#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace curvebound {

using ScalarFn = std::function<double(double)>;

// Composite 20-point Gauss-Legendre on `panels` equal panels.
double integrate_gl(const ScalarFn& f, double a, double b, int panels);

// Adaptive Gauss-Kronrod (61 points); throws SolverError above tol.
double integrate_adaptive(const ScalarFn& f, double a, double b, double tol = 1e-13,
                          double* error_estimate = nullptr);

// Same with the 31-point rule, used as the lower-order partner in checks.
double integrate_adaptive_gk31(const ScalarFn& f, double a, double b, double tol = 1e-13);

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

// Radial cutoff: 1 on |r| <= plateau, 0 on |r| >= support.
struct Cutoff {
    double plateau = 0.5;
    double support = 0.9;
    double operator()(double r) const;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Richardson extrapolation for a method of the given order with step ratio 2.
inline double richardson(double coarse, double fine, double order = 2.0) {
    const double f = std::pow(2.0, order);
    return fine + (fine - coarse) / (f - 1.0);
}

// Root of f on [a,b] with f(a), f(b) of opposite sign.
double bisect_root(const ScalarFn& f, double a, double b, double tol = 1e-15);

template <class Real>
class CompensatedSum {
public:
    void add(Real x) {
        Real t = sum_ + x;
        using std::abs;
        if (abs(sum_) >= abs(x))
            c_ += (sum_ - t) + x;
        else
            c_ += (x - t) + sum_;
        sum_ = t;
    }
    Real value() const { return sum_ + c_; }

private:
    Real sum_ = 0;
    Real c_ = 0;
};

// Uniform nodes x_j = a + j (b-a)/n, j = 0..n.
std::vector<double> linspace(double a, double b, int n);

}  // namespace curvebound
