#include "curvebound/geometry.hpp"

#include "curvebound/numerics.hpp"
#include "curvebound/types.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace curvebound {

namespace {

using GL20 = boost::math::quadrature::gauss<double, 20>;

double series(const std::vector<double>& cc, const std::vector<double>& ss, double theta, int order) {
    double v = 0.0;
    const double shift = order * 0.5 * pi;
    for (std::size_t k = 0; k < std::max(cc.size(), ss.size()); ++k) {
        const double kk = static_cast<double>(k);
        const double scale = order == 0 ? 1.0 : std::pow(kk, order);
        if (scale == 0.0) continue;
        const double arg = kk * theta + shift;
        if (k < cc.size()) v += cc[k] * scale * std::cos(arg);
        if (k < ss.size()) v += ss[k] * scale * std::sin(arg);
    }
    return v;
}

double wrap_angle(double phi) {
    phi = std::fmod(phi, 2.0 * pi);
    if (phi < 0.0) phi += 2.0 * pi;
    return phi;
}

}  // namespace

ClosedCurve::ClosedCurve(std::string kind, FourierSpec coeffs, int samples, bool flipped)
    : kind_(std::move(kind)), c_(std::move(coeffs)), samples_(samples), flipped_(flipped) {}

Vec2 ClosedCurve::derivative(double theta, int order) const {
    return {series(c_.xc, c_.xs, theta, order), series(c_.yc, c_.ys, theta, order)};
}

double ClosedCurve::speed(double theta) const {
    const Vec2 d = derivative(theta, 1);
    return std::hypot(d[0], d[1]);
}

double ClosedCurve::curvature(double theta) const {
    const Vec2 d1 = derivative(theta, 1);
    const Vec2 d2 = derivative(theta, 2);
    const double sp = std::hypot(d1[0], d1[1]);
    return (d1[0] * d2[1] - d1[1] * d2[0]) / (sp * sp * sp);
}

double ClosedCurve::curvature_dtheta(double theta) const {
    const Vec2 d1 = derivative(theta, 1);
    const Vec2 d2 = derivative(theta, 2);
    const Vec2 d3 = derivative(theta, 3);
    const double sp2 = d1[0] * d1[0] + d1[1] * d1[1];
    const double sp = std::sqrt(sp2);
    const double cross = d1[0] * d2[1] - d1[1] * d2[0];
    const double dcross = d1[0] * d3[1] - d1[1] * d3[0];
    const double dot = d1[0] * d2[0] + d1[1] * d2[1];
    return dcross / (sp2 * sp) - 3.0 * cross * dot / (sp2 * sp2 * sp);
}

double ClosedCurve::signed_area() const {
    auto f = [this](double t) {
        const Vec2 p = point(t);
        const Vec2 d = derivative(t, 1);
        return 0.5 * (p[0] * d[1] - p[1] * d[0]);
    };
    return integrate_gl(f, 0.0, 2.0 * pi, 64);
}

bool ClosedCurve::mirror_symmetric() const {
    const double tol = 1e-14;
    for (std::size_t k = 0; k < c_.xc.size(); ++k)
        if (k % 2 == 0 && std::abs(c_.xc[k]) > tol) return false;
    for (std::size_t k = 0; k < c_.xs.size(); ++k)
        if (k % 2 == 1 && std::abs(c_.xs[k]) > tol) return false;
    for (std::size_t k = 0; k < c_.yc.size(); ++k)
        if (k % 2 == 1 && std::abs(c_.yc[k]) > tol) return false;
    for (std::size_t k = 0; k < c_.ys.size(); ++k)
        if (k % 2 == 0 && std::abs(c_.ys[k]) > tol) return false;
    return true;
}

ClosedCurve build_curve(const CurveSpec& spec) {
    if (spec.samples_per_period < 16) throw ValidationError("samples_per_period must be at least 16");
    FourierSpec c;
    std::string kind;
    if (const auto* e = std::get_if<EllipseSpec>(&spec.kind)) {
        if (!(e->a > 0.0 && e->b > 0.0)) throw ValidationError("ellipse semi-axes must be positive");
        if (e->a <= e->b)
            throw ValidationError("ellipse requires 0 < b < a: maximum-curvature points would sit on the symmetry axis");
        c.xc = {0.0, e->a};
        c.ys = {0.0, e->b};
        kind = "ellipse";
    } else {
        c = std::get<FourierSpec>(spec.kind);
        kind = "fourier";
        for (const auto* v : {&c.xc, &c.xs, &c.yc, &c.ys})
            for (double x : *v)
                if (!std::isfinite(x)) throw ValidationError("fourier coefficients must be finite");
    }
    double scale = 0.0;
    for (const auto* v : {&c.xc, &c.xs, &c.yc, &c.ys})
        for (std::size_t k = 1; k < v->size(); ++k) scale = std::max(scale, std::abs((*v)[k]));
    if (scale == 0.0) throw ValidationError("curve is a single point");

    ClosedCurve probe(kind, c, spec.samples_per_period, false);
    for (int j = 0; j < spec.samples_per_period; ++j) {
        const double t = 2.0 * pi * j / spec.samples_per_period;
        if (!(probe.speed(t) > 1e-10 * scale)) throw ValidationError("non-regular parametrization: |M'(θ)| vanishes");
    }
    const double area = probe.signed_area();
    if (std::abs(area) < 1e-12 * scale * scale) throw ValidationError("curve encloses no area");
    if (area > 0.0) return probe;
    for (auto& x : c.xs) x = -x;
    for (auto& y : c.ys) y = -y;
    return ClosedCurve(kind, c, spec.samples_per_period, true);
}

ArcLengthTable::ArcLengthTable(std::shared_ptr<const ClosedCurve> curve, int n)
    : curve_(std::move(curve)), n_(n), theta0_(0.5 * pi), total_(0.0) {
    if (n < 64) throw ValidationError("arc-length table needs at least 64 nodes");
    if (curve_->mirror_symmetric() && curve_->point(1.5 * pi)[1] > curve_->point(0.5 * pi)[1]) theta0_ = 1.5 * pi;
    const ClosedCurve& c = *curve_;
    auto speed = [&c](double t) { return c.speed(t); };
    cum_.assign(n_ + 1, 0.0);
    const double dt = 2.0 * pi / n_;
    for (int p = 0; p < n_; ++p) {
        const double a = theta0_ + p * dt;
        cum_[p + 1] = cum_[p] + GL20::integrate(speed, a, a + dt);
    }
    total_ = integrate_adaptive(speed, theta0_, theta0_ + 2.0 * pi, 1e-14);
    if (std::abs(total_ - cum_[n_]) > 1e-10 * total_) throw SolverError("arc-length quadrature non-convergence");
    // Make the table end exactly at the adaptive total.
    const double fix = total_ / cum_[n_];
    for (auto& v : cum_) v *= fix;
}

double ArcLengthTable::arc_from_origin(double theta) const {
    const double phi = wrap_angle(theta - theta0_);
    const double dt = 2.0 * pi / n_;
    const int p = std::min(n_ - 1, static_cast<int>(phi / dt));
    const ClosedCurve& c = *curve_;
    const double a = theta0_ + p * dt;
    const double part = GL20::integrate([&c](double t) { return c.speed(t); }, a, theta0_ + phi);
    return cum_[p] + part;
}

double ArcLengthTable::s_of_theta(double theta) const {
    const double a = arc_from_origin(theta);
    return a > half_length() ? a - total_ : a;
}

double ArcLengthTable::theta_of_s(double s) const {
    double a = std::fmod(s, total_);
    if (a < 0.0) a += total_;
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), a);
    const int p = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, n_ - 1);
    const double dt = 2.0 * pi / n_;
    const double lo = theta0_ + p * dt;
    double t = lo + dt * (a - cum_[p]) / (cum_[p + 1] - cum_[p]);
    const ClosedCurve& c = *curve_;
    auto speed = [&c](double x) { return c.speed(x); };
    for (int it2 = 0; it2 < 20; ++it2) {
        const double g = cum_[p] + GL20::integrate(speed, lo, t) - a;
        const double step = g / c.speed(t);
        t -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return t;
}

ArcLengthTable arclength_parametrize(const ClosedCurve& curve, int n) {
    return ArcLengthTable(std::make_shared<const ClosedCurve>(curve), n);
}

CurvatureSamples constant_samples(double kappa, double half_length, int n) {
    CurvatureSamples s;
    s.half_length = half_length;
    s.kappa.assign(n, kappa);
    return s;
}

CurvatureProfile::CurvatureProfile(std::shared_ptr<const ArcLengthTable> table, CurvatureSamples samples,
                                   std::vector<Well> wells, double kappa_max, bool symmetric)
    : table_(std::move(table)), samples_(std::move(samples)), wells_(std::move(wells)),
      kappa_max_(kappa_max), symmetric_(symmetric) {}

double CurvatureProfile::kappa_at(double s) const {
    return table_->curve().curvature(table_->theta_of_s(s));
}

double CurvatureProfile::kappa_prime_at(double s) const {
    const double t = table_->theta_of_s(s);
    return table_->curve().curvature_dtheta(t) / table_->curve().speed(t);
}

double second_derivative_5pt(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

CurvatureProfile curvature_profile(const ClosedCurve& curve, const ArcLengthTable& table, int n_s,
                                   int expected_wells) {
    if (n_s < 16 || n_s % 2 != 0) throw ValidationError("n_s must be even and at least 16");
    auto tab = std::make_shared<const ArcLengthTable>(table);
    (void)curve;
    const ClosedCurve& c = tab->curve();
    CurvatureSamples samples;
    samples.half_length = tab->half_length();
    samples.kappa.resize(n_s);
    for (int j = 0; j < n_s; ++j) samples.kappa[j] = c.curvature(tab->theta_of_s(samples.s(j)));

    auto kappa = [&](double s) { return c.curvature(tab->theta_of_s(s)); };
    auto kappa_p = [&](double s) {
        const double t = tab->theta_of_s(s);
        return c.curvature_dtheta(t) / c.speed(t);
    };
    const double hi = *std::max_element(samples.kappa.begin(), samples.kappa.end());
    const double lo = *std::min_element(samples.kappa.begin(), samples.kappa.end());
    if (hi - lo <= 1e-9 * std::abs(hi)) throw ValidationError("no non-degenerate maxima: curvature is constant");

    const double L = samples.half_length;
    const double ds = samples.delta();
    const double h = L / 1000.0;
    std::vector<Well> cands;
    for (int j = 0; j < n_s; ++j) {
        const double km = samples.kappa[samples.wrap(j - 1)];
        const double k0 = samples.kappa[j];
        const double kp = samples.kappa[samples.wrap(j + 1)];
        if (!(k0 > km && k0 >= kp)) continue;
        const double denom = km - 2 * k0 + kp;
        double s = samples.s(j) + (denom < 0.0 ? ds * (km - kp) / (2.0 * denom) : 0.0);
        for (int it = 0; it < 4; ++it) {
            const double k2 = second_derivative_5pt(kappa, s, h);
            if (!(k2 < 0.0)) break;
            const double step = kappa_p(s) / k2;
            if (std::abs(step) > ds) break;
            s -= step;
        }
        if (s > L) s -= 2 * L;
        if (s <= -L) s += 2 * L;
        Well w;
        w.s = s;
        w.kappa = kappa(s);
        cands.push_back(w);
    }
    double kmax = 0.0;
    for (const auto& w : cands) kmax = std::max(kmax, w.kappa);
    std::vector<Well> wells;
    for (const auto& w : cands)
        if (kmax - w.kappa <= 1e-6 * std::abs(kmax)) wells.push_back(w);
    if (static_cast<int>(wells.size()) != expected_wells)
        throw ValidationError("expected " + std::to_string(expected_wells) + " curvature maxima, found " +
                              std::to_string(wells.size()));
    for (auto& w : wells) {
        const double c1 = second_derivative_5pt(kappa, w.s, h);
        const double c2 = second_derivative_5pt(kappa, w.s, 0.5 * h);
        if (std::abs(c1 - c2) > 1e-5 * std::abs(c2)) throw SolverError("curvature second derivative failed Richardson check");
        w.kappa_second = c2 + (c2 - c1) / 15.0;
        if (!(w.kappa_second < -1e-6 * std::abs(kmax) / (L * L)))
            throw ValidationError("degenerate curvature maximum: kappa'' vanishes");
        w.gamma = std::sqrt(-0.5 * w.kappa_second);
    }
    std::sort(wells.begin(), wells.end(), [](const Well& a, const Well& b) { return a.s < b.s; });

    double asym = 0.0;
    for (int j = 0; j < n_s; ++j)
        asym = std::max(asym, std::abs(samples.kappa[j] - samples.kappa[samples.mirror(j)]));
    const bool symmetric = asym <= 1e-8 * std::abs(kmax);
    return CurvatureProfile(tab, std::move(samples), std::move(wells), kmax, symmetric);
}

CurvatureProfile make_profile(const CurveSpec& spec, int n_s, int expected_wells, int table_nodes) {
    const ClosedCurve curve = build_curve(spec);
    const ArcLengthTable table = arclength_parametrize(curve, table_nodes);
    return curvature_profile(curve, table, n_s, expected_wells);
}

}  // namespace curvebound
