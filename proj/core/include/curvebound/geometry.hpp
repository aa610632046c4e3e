#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace curvebound {

struct EllipseSpec {
    double a = 2.0;
    double b = 1.0;
};

// x(θ) = Σ_k xc[k] cos kθ + xs[k] sin kθ, same for y.
struct FourierSpec {
    std::vector<double> xc, xs, yc, ys;
};

struct CurveSpec {
    std::variant<EllipseSpec, FourierSpec> kind = EllipseSpec{};
    int samples_per_period = 512;
};

using Vec2 = std::array<double, 2>;

class ClosedCurve {
public:
    ClosedCurve(std::string kind, FourierSpec coeffs, int samples, bool flipped);

    const std::string& kind() const { return kind_; }
    int samples_per_period() const { return samples_; }
    // True when the input was clockwise and θ was reversed.
    bool flipped() const { return flipped_; }

    Vec2 point(double theta) const { return derivative(theta, 0); }
    Vec2 derivative(double theta, int order) const;
    double speed(double theta) const;
    // Signed curvature, positive on convex counter-clockwise curves.
    double curvature(double theta) const;
    double curvature_dtheta(double theta) const;
    double signed_area() const;
    // x(π − θ) = −x(θ), y(π − θ) = y(θ) coefficientwise.
    bool mirror_symmetric() const;

private:
    std::string kind_;
    FourierSpec c_;
    int samples_;
    bool flipped_;
};

ClosedCurve build_curve(const CurveSpec& spec);

class ArcLengthTable {
public:
    ArcLengthTable(std::shared_ptr<const ClosedCurve> curve, int n);

    double total_length() const { return total_; }
    double half_length() const { return 0.5 * total_; }
    double theta_origin() const { return theta0_; }
    int nodes() const { return n_; }
    // s in (−L, L], s = 0 at the origin point, increasing counter-clockwise.
    double s_of_theta(double theta) const;
    double theta_of_s(double s) const;
    const ClosedCurve& curve() const { return *curve_; }
    std::shared_ptr<const ClosedCurve> curve_ptr() const { return curve_; }

private:
    double arc_from_origin(double theta) const;  // in [0, 2L)

    std::shared_ptr<const ClosedCurve> curve_;
    int n_;
    double theta0_;
    double total_;
    std::vector<double> cum_;
};

ArcLengthTable arclength_parametrize(const ClosedCurve& curve, int n);

// Curvature sampled on the shared uniform grid s_j = −L + (j + 1) Δ, j = 0..n−1.
struct CurvatureSamples {
    double half_length = 0.0;
    std::vector<double> kappa;

    int size() const { return static_cast<int>(kappa.size()); }
    double delta() const { return 2.0 * half_length / size(); }
    double s(int j) const { return -half_length + (j + 1) * delta(); }
    // Node index of s = 0 and of s = L.
    int origin_index() const { return size() / 2 - 1; }
    int seam_index() const { return size() - 1; }
    // Index of −s_j.
    int mirror(int j) const { return ((size() - j - 2) % size() + size()) % size(); }
    int wrap(int j) const { return ((j % size()) + size()) % size(); }
};

CurvatureSamples constant_samples(double kappa, double half_length, int n);

struct Well {
    double s = 0.0;
    double kappa = 0.0;
    double kappa_second = 0.0;  // d²κ/ds²
    double gamma = 0.0;
};

class CurvatureProfile {
public:
    CurvatureProfile(std::shared_ptr<const ArcLengthTable> table, CurvatureSamples samples,
                     std::vector<Well> wells, double kappa_max, bool symmetric);

    const CurvatureSamples& samples() const { return samples_; }
    double half_length() const { return samples_.half_length; }
    int size() const { return samples_.size(); }
    double kappa_max() const { return kappa_max_; }
    const std::vector<Well>& wells() const { return wells_; }
    double s_r() const { return wells_.front().s; }
    double s_l() const { return wells_.back().s; }
    double gamma() const { return wells_.front().gamma; }
    bool symmetric() const { return symmetric_; }

    double kappa_at(double s) const;
    double kappa_prime_at(double s) const;  // dκ/ds
    const ArcLengthTable& table() const { return *table_; }

private:
    std::shared_ptr<const ArcLengthTable> table_;
    CurvatureSamples samples_;
    std::vector<Well> wells_;
    double kappa_max_;
    bool symmetric_;
};

// expected_wells: 2 for the double-well setting, 1 for single-well curves.
CurvatureProfile curvature_profile(const ClosedCurve& curve, const ArcLengthTable& table, int n_s,
                                   int expected_wells = 2);

// Convenience: curve spec to profile with the default table size.
CurvatureProfile make_profile(const CurveSpec& spec, int n_s, int expected_wells = 2, int table_nodes = 512);

// 5-point centered second derivative with step h.
double second_derivative_5pt(const std::function<double(double)>& f, double x, double h);

}  // namespace curvebound
