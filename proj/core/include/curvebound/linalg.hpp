#pragma once

#include "curvebound/types.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace curvebound {

// Symmetric block tridiagonal matrix K with diagonal mass M.
// Diagonal blocks are tridiagonal, coupling blocks are diagonal.
// Index (k, i): block k, inner index i; flat index k * width + i.
template <class Real>
class BlockTridiagonal {
public:
    BlockTridiagonal() = default;
    BlockTridiagonal(int blocks, int width)
        : blocks_(blocks), width_(width),
          d_(std::size_t(blocks) * width, Real(0)),
          e_(std::size_t(blocks) * width, Real(0)),
          c_(std::size_t(blocks) * width, Real(0)),
          m_(std::size_t(blocks) * width, Real(0)) {}

    int blocks() const { return blocks_; }
    int width() const { return width_; }
    std::size_t size() const { return d_.size(); }

    Real& diag(int k, int i) { return d_[idx(k, i)]; }
    // Entry between (k, i) and (k, i + 1).
    Real& inner(int k, int i) { return e_[idx(k, i)]; }
    // Entry between (k - 1, i) and (k, i), k >= 1.
    Real& coupling(int k, int i) { return c_[idx(k, i)]; }
    Real& mass(int k, int i) { return m_[idx(k, i)]; }
    Real diag(int k, int i) const { return d_[idx(k, i)]; }
    Real inner(int k, int i) const { return e_[idx(k, i)]; }
    Real coupling(int k, int i) const { return c_[idx(k, i)]; }
    Real mass(int k, int i) const { return m_[idx(k, i)]; }
    const std::vector<Real>& mass_vector() const { return m_; }

    std::vector<Real> apply(const std::vector<Real>& x) const {
        std::vector<Real> y(size(), Real(0));
        for (int k = 0; k < blocks_; ++k) {
            for (int i = 0; i < width_; ++i) {
                const std::size_t p = idx(k, i);
                Real acc = d_[p] * x[p];
                if (i + 1 < width_) acc += e_[p] * x[p + 1];
                if (i > 0) acc += e_[p - 1] * x[p - 1];
                if (k > 0) acc += c_[p] * x[p - width_];
                if (k + 1 < blocks_) acc += c_[p + width_] * x[p + width_];
                y[p] = acc;
            }
        }
        return y;
    }

    Real mass_dot(const std::vector<Real>& x, const std::vector<Real>& y) const {
        Real s = 0;
        for (std::size_t p = 0; p < size(); ++p) s += m_[p] * x[p] * y[p];
        return s;
    }

    // Block LDL^T of K - shift M. Returns false if not positive definite.
    bool factor(Real shift) {
        const int w = width_;
        sinv_.assign(std::size_t(blocks_) * w * w, Real(0));
        std::vector<Real> s(std::size_t(w) * w), linv(std::size_t(w) * w);
        for (int k = 0; k < blocks_; ++k) {
            std::fill(s.begin(), s.end(), Real(0));
            for (int i = 0; i < w; ++i) {
                const std::size_t p = idx(k, i);
                s[i * w + i] = d_[p] - shift * m_[p];
                if (i + 1 < w) {
                    s[i * w + i + 1] = e_[p];
                    s[(i + 1) * w + i] = e_[p];
                }
            }
            if (k > 0) {
                const Real* prev = &sinv_[std::size_t(k - 1) * w * w];
                for (int a = 0; a < w; ++a) {
                    const Real ca = c_[idx(k, a)];
                    for (int b = 0; b < w; ++b) s[a * w + b] -= ca * prev[a * w + b] * c_[idx(k, b)];
                }
            }
            // Cholesky, lower triangle in place.
            for (int j = 0; j < w; ++j) {
                Real djj = s[j * w + j];
                for (int q = 0; q < j; ++q) djj -= s[j * w + q] * s[j * w + q];
                if (!(djj > 0)) return false;
                using std::sqrt;
                const Real ljj = sqrt(djj);
                s[j * w + j] = ljj;
                for (int i = j + 1; i < w; ++i) {
                    Real v = s[i * w + j];
                    for (int q = 0; q < j; ++q) v -= s[i * w + q] * s[j * w + q];
                    s[i * w + j] = v / ljj;
                }
            }
            // L^{-1}, lower triangular.
            std::fill(linv.begin(), linv.end(), Real(0));
            for (int j = 0; j < w; ++j) {
                linv[j * w + j] = Real(1) / s[j * w + j];
                for (int i = j + 1; i < w; ++i) {
                    Real v = 0;
                    for (int q = j; q < i; ++q) v -= s[i * w + q] * linv[q * w + j];
                    linv[i * w + j] = v / s[i * w + i];
                }
            }
            // S^{-1} = L^{-T} L^{-1}.
            Real* out = &sinv_[std::size_t(k) * w * w];
            for (int a = 0; a < w; ++a) {
                for (int b = 0; b <= a; ++b) {
                    Real v = 0;
                    for (int q = a; q < w; ++q) v += linv[q * w + a] * linv[q * w + b];
                    out[a * w + b] = v;
                    out[b * w + a] = v;
                }
            }
        }
        factored_ = true;
        return true;
    }

    // Solves (K - shift M) x = b using the last factorization.
    std::vector<Real> solve(const std::vector<Real>& b) const {
        if (!factored_) throw SolverError("block solve before factorization");
        const int w = width_;
        std::vector<Real> z(size()), x(size()), y(w), t(w);
        for (int k = 0; k < blocks_; ++k) {
            for (int i = 0; i < w; ++i) {
                y[i] = b[idx(k, i)];
                if (k > 0) y[i] -= c_[idx(k, i)] * z[idx(k - 1, i)];
            }
            block_apply(k, y, &z[idx(k, 0)]);
        }
        for (int k = blocks_ - 1; k >= 0; --k) {
            if (k + 1 == blocks_) {
                for (int i = 0; i < w; ++i) x[idx(k, i)] = z[idx(k, i)];
                continue;
            }
            for (int i = 0; i < w; ++i) t[i] = c_[idx(k + 1, i)] * x[idx(k + 1, i)];
            block_apply(k, t, &y[0]);
            for (int i = 0; i < w; ++i) x[idx(k, i)] = z[idx(k, i)] - y[i];
        }
        return x;
    }

private:
    std::size_t idx(int k, int i) const { return std::size_t(k) * width_ + i; }

    void block_apply(int k, const std::vector<Real>& in, Real* out) const {
        const int w = width_;
        const Real* s = &sinv_[std::size_t(k) * w * w];
        std::vector<Real> tmp(w);
        for (int a = 0; a < w; ++a) {
            Real v = 0;
            for (int b = 0; b < w; ++b) v += s[a * w + b] * in[b];
            tmp[a] = v;
        }
        for (int a = 0; a < w; ++a) out[a] = tmp[a];
    }

    int blocks_ = 0;
    int width_ = 0;
    std::vector<Real> d_, e_, c_, m_;
    std::vector<Real> sinv_;
    bool factored_ = false;
};

template <class Real>
struct GroundState {
    Real eigenvalue = 0;
    std::vector<Real> vector;  // M-normalized, positive sum
    int iterations = 0;
};

// Lowest eigenpair of K x = lambda M x by shifted inverse iteration.
// shift_guess should lie below the lowest eigenvalue; gap_hint is the
// expected distance to the next one.
template <class Real>
GroundState<Real> ground_state(BlockTridiagonal<Real>& a, double shift_guess, double gap_hint,
                               std::vector<Real> start = {}, int max_iter = 400) {
    using std::abs;
    using std::sqrt;
    const std::size_t n = a.size();
    std::vector<Real> x = start.empty() ? std::vector<Real>(n, Real(1)) : std::move(start);
    auto normalize = [&](std::vector<Real>& v) {
        const Real nrm = sqrt(a.mass_dot(v, v));
        for (auto& e : v) e /= nrm;
    };
    auto rayleigh = [&](const std::vector<Real>& v) {
        const std::vector<Real> kv = a.apply(v);
        Real num = 0;
        for (std::size_t p = 0; p < n; ++p) num += kv[p] * v[p];
        return num / a.mass_dot(v, v);
    };
    auto mx = [&](const std::vector<Real>& v) {
        std::vector<Real> out(n);
        const auto& m = a.mass_vector();
        for (std::size_t p = 0; p < n; ++p) out[p] = m[p] * v[p];
        return out;
    };
    auto factor_below = [&](double s) {
        for (int tries = 0; tries < 40; ++tries) {
            if (a.factor(Real(s))) return s;
            s -= gap_hint;
        }
        throw SolverError("no positive definite shift found");
    };

    GroundState<Real> out;
    normalize(x);
    factor_below(shift_guess);
    Real lam = rayleigh(x);
    int it = 0;
    for (; it < max_iter; ++it) {
        x = a.solve(mx(x));
        normalize(x);
        const Real next = rayleigh(x);
        const bool done = abs(next - lam) < Real(1e-9 * gap_hint);
        lam = next;
        if (done) break;
    }
    factor_below(static_cast<double>(lam) - 0.05 * gap_hint);
    const Real tol = std::numeric_limits<Real>::epsilon() * Real(1e4);
    for (; it < 2 * max_iter; ++it) {
        std::vector<Real> y = a.solve(mx(x));
        normalize(y);
        Real sign = a.mass_dot(x, y) < 0 ? Real(-1) : Real(1);
        Real diff = 0;
        for (std::size_t p = 0; p < n; ++p) {
            y[p] *= sign;
            const Real d = y[p] - x[p];
            diff += a.mass_vector()[p] * d * d;
        }
        x = std::move(y);
        if (sqrt(diff) < tol) break;
    }
    if (it >= 2 * max_iter) throw SolverError("inverse iteration did not converge");
    Real total = 0;
    for (const auto& e : x) total += e;
    if (total < 0)
        for (auto& e : x) e = -e;
    out.eigenvalue = rayleigh(x);
    out.vector = std::move(x);
    out.iterations = it;
    return out;
}

}  // namespace curvebound
