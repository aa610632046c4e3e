#include "curvebound/tubular2d.hpp"

#include "curvebound/numerics.hpp"
#include "curvebound/types.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace curvebound {

double TauMap::g(double xi, double T) const {
    if (kind == Kind::uniform) return T * xi;
    const double beta = std::asinh(T / scale);
    return scale * std::sinh(beta * xi);
}

double TauMap::dg(double xi, double T) const {
    if (kind == Kind::uniform) return T;
    const double beta = std::asinh(T / scale);
    return scale * beta * std::cosh(beta * xi);
}

Domain Domain::single_well(double excluded, double eta, double half_length) {
    auto wrap = [half_length](double s) {
        while (s > half_length) s -= 2 * half_length;
        while (s <= -half_length) s += 2 * half_length;
        return s;
    };
    return {DomainKind::single_well, wrap(excluded + eta), wrap(excluded - eta)};
}

double truncation_length(double hbar, double D, double kappa_min, double kappa_max) {
    if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
    if (!(D > 0.0)) throw ValidationError("truncation constant D must be positive");
    double T = D / hbar;
    const double h2 = hbar * hbar;
    if (kappa_max > 0.0) T = std::min(T, (1.0 - 1e-12) / (2.0 * h2 * kappa_max));
    if (kappa_min < 0.0) T = std::min(T, (1.0 - 1e-12) / (2.0 * h2 * -kappa_min));
    return T;
}

namespace {

struct Layout {
    std::vector<int> columns;
    std::vector<double> weight;
    bool periodic = false;
    bool dirichlet_left = false;
    bool dirichlet_right = false;
    int left_neighbor = -1;  // excluded node beyond each Dirichlet end
    int right_neighbor = -1;
};

bool in_arc(double s, double a, double b) {
    if (a < b) return s > a && s < b;
    return s > a || s < b;
}

Layout layout(const CurvatureSamples& smp, const Domain& dom) {
    const int n = smp.size();
    Layout lay;
    switch (dom.kind) {
    case DomainKind::full:
        for (int j = 0; j < n; ++j) lay.columns.push_back(j);
        lay.weight.assign(n, 1.0);
        lay.periodic = true;
        break;
    case DomainKind::even_sector: {
        const int h = n / 2;
        for (int k = 0; k <= h; ++k) {
            lay.columns.push_back(smp.origin_index() + k);
            lay.weight.push_back(k == 0 || k == h ? 0.5 : 1.0);
        }
        break;
    }
    case DomainKind::odd_sector: {
        const int h = n / 2;
        for (int k = 1; k < h; ++k) lay.columns.push_back(smp.origin_index() + k);
        lay.weight.assign(lay.columns.size(), 1.0);
        lay.dirichlet_left = lay.dirichlet_right = true;
        lay.left_neighbor = smp.origin_index();
        lay.right_neighbor = smp.seam_index();
        break;
    }
    case DomainKind::single_well: {
        int start = -1;
        for (int j = 0; j < n; ++j) {
            const bool here = in_arc(smp.s(j), dom.arc_begin, dom.arc_end);
            const bool prev = in_arc(smp.s(smp.wrap(j - 1)), dom.arc_begin, dom.arc_end);
            if (here && !prev) start = j;
        }
        if (start < 0) throw ValidationError("single-well domain must be a proper arc");
        for (int j = start; in_arc(smp.s(smp.wrap(j)), dom.arc_begin, dom.arc_end); ++j)
            lay.columns.push_back(smp.wrap(j));
        lay.weight.assign(lay.columns.size(), 1.0);
        lay.dirichlet_left = lay.dirichlet_right = true;
        lay.left_neighbor = smp.wrap(lay.columns.front() - 1);
        lay.right_neighbor = smp.wrap(lay.columns.back() + 1);
        break;
    }
    }
    if (lay.columns.size() < 3) throw ValidationError("domain has too few columns");
    return lay;
}

}  // namespace

double RobinOperator2D::weight(int column, double tau) const {
    const double h2 = grid.hbar * grid.hbar;
    return 1.0 - h2 * tau * grid.samples.kappa[grid.columns[column]];
}

RobinOperator2D assemble(const CurvatureSamples& samples_in, double hbar, const GridDims& dims, const Domain& domain) {
    if (samples_in.size() < 16 || samples_in.size() % 2 != 0) throw ValidationError("σ-grid must be even and at least 16");
    if (dims.n_tau < 4) throw ValidationError("n_tau must be at least 4");
    const CurvatureSamples& smp = samples_in;
    const double kmin = *std::min_element(smp.kappa.begin(), smp.kappa.end());
    const double kmax = *std::max_element(smp.kappa.begin(), smp.kappa.end());

    RobinOperator2D op;
    TubularGrid& g = op.grid;
    g.hbar = hbar;
    g.T = truncation_length(hbar, dims.D, kmin, kmax);
    g.D = g.T * hbar;
    g.n_tau = dims.n_tau;
    g.map = dims.map;
    g.samples = smp;
    if (g.T < 1.5) throw ValidationError("truncated normal length T is too small");
    const int nt = dims.n_tau;
    const double dxi = 1.0 / nt;
    g.tau.resize(nt + 1);
    g.tau_cell.resize(nt + 1);
    for (int i = 0; i <= nt; ++i) {
        g.tau[i] = g.map.g(i * dxi, g.T);
        g.tau_cell[i] = g.map.dg(i * dxi, g.T) * dxi * (i == 0 ? 0.5 : 1.0);
    }
    std::vector<double> tau_mid(nt), mid_coef(nt);
    for (int i = 0; i < nt; ++i) {
        const double xi = (i + 0.5) * dxi;
        tau_mid[i] = g.map.g(xi, g.T);
        mid_coef[i] = 1.0 / (g.map.dg(xi, g.T) * dxi);
    }

    const Layout lay = layout(smp, domain);
    g.columns = lay.columns;
    g.col_weight = lay.weight;
    op.kind = domain.kind;
    op.blocks = static_cast<int>(lay.columns.size());
    op.width = nt;
    const std::size_t N = std::size_t(op.blocks) * nt;
    op.diag.assign(N, 0.0);
    op.inner.assign(N, 0.0);
    op.coupling.assign(N, 0.0);
    op.mass.assign(N, 0.0);
    if (lay.periodic) op.wrap.assign(nt, 0.0);

    const double h2 = hbar * hbar;
    const double h4 = h2 * h2;
    const double ds = smp.delta();
    auto ahat = [h2](double kappa, double tau) { return 1.0 - h2 * tau * kappa; };
    for (int c = 0; c < op.blocks; ++c)
        for (int i = 0; i <= nt; ++i) {
            const double a = ahat(smp.kappa[lay.columns[c]], g.tau[i]);
            if (a < 0.5 - 1e-9 || a > 1.5 + 1e-9) throw ValidationError("weight â leaves [1/2, 3/2]");
        }

    // σ-edge coefficient between nodes j and j2 (midpoint curvature) at row i.
    auto sigma_coef = [&](int j, int j2, int i) {
        const double km = 0.5 * (smp.kappa[j] + smp.kappa[j2]);
        return h4 * g.tau_cell[i] / (ahat(km, g.tau[i]) * ds);
    };
    for (int c = 0; c < op.blocks; ++c) {
        const int j = lay.columns[c];
        const double w = lay.weight[c];
        const double kc = smp.kappa[j];
        for (int i = 0; i < nt; ++i) {
            const std::size_t p = op.index(c, i);
            op.mass[p] = w * ds * ahat(kc, g.tau[i]) * g.tau_cell[i];
            const double t = w * ds * ahat(kc, tau_mid[i]) * mid_coef[i];
            op.diag[p] += t;
            if (i + 1 < nt) {
                op.diag[p + 1] += t;
                op.inner[p] = -t;
            }
        }
        op.diag[op.index(c, 0)] -= w * ds;
        if (c + 1 < op.blocks) {
            const int j2 = lay.columns[c + 1];
            for (int i = 0; i < nt; ++i) {
                const double e = sigma_coef(j, j2, i);
                op.diag[op.index(c, i)] += e;
                op.diag[op.index(c + 1, i)] += e;
                op.coupling[op.index(c + 1, i)] = -e;
            }
        }
    }
    if (lay.periodic) {
        const int j = lay.columns.back(), j2 = lay.columns.front();
        for (int i = 0; i < nt; ++i) {
            const double e = sigma_coef(j, j2, i);
            op.diag[op.index(op.blocks - 1, i)] += e;
            op.diag[op.index(0, i)] += e;
            op.wrap[i] = -e;
        }
    }
    if (lay.dirichlet_left)
        for (int i = 0; i < nt; ++i) op.diag[op.index(0, i)] += sigma_coef(lay.left_neighbor, lay.columns.front(), i);
    if (lay.dirichlet_right)
        for (int i = 0; i < nt; ++i)
            op.diag[op.index(op.blocks - 1, i)] += sigma_coef(lay.columns.back(), lay.right_neighbor, i);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * N);
    for (int c = 0; c < op.blocks; ++c)
        for (int i = 0; i < nt; ++i) {
            const auto p = static_cast<int>(op.index(c, i));
            trip.emplace_back(p, p, op.diag[p]);
            if (i + 1 < nt) {
                trip.emplace_back(p, p + 1, op.inner[p]);
                trip.emplace_back(p + 1, p, op.inner[p]);
            }
            if (c > 0) {
                trip.emplace_back(p, p - nt, op.coupling[p]);
                trip.emplace_back(p - nt, p, op.coupling[p]);
            }
        }
    if (lay.periodic)
        for (int i = 0; i < nt; ++i) {
            const auto p = static_cast<int>(op.index(op.blocks - 1, i));
            trip.emplace_back(p, i, op.wrap[i]);
            trip.emplace_back(i, p, op.wrap[i]);
        }
    op.K.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    op.K.setFromTriplets(trip.begin(), trip.end());
    op.K.makeCompressed();
    op.M = Eigen::Map<const Eigen::VectorXd>(op.mass.data(), static_cast<Eigen::Index>(N));
    return op;
}

RobinOperator2D assemble(const CurvatureProfile& profile, double hbar, const GridDims& dims, const Domain& domain) {
    CurvatureSamples smp = profile.samples();
    if (profile.symmetric()) {
        const CurvatureSamples raw = smp;
        for (int j = 0; j < smp.size(); ++j) smp.kappa[j] = 0.5 * (raw.kappa[j] + raw.kappa[raw.mirror(j)]);
    }
    if (domain.kind == DomainKind::single_well) {
        int inside = 0;
        for (const auto& w : profile.wells())
            if (in_arc(w.s, domain.arc_begin, domain.arc_end)) ++inside;
        if (inside != 1) throw ValidationError("single-well domain must contain exactly one well");
    }
    if ((domain.kind == DomainKind::even_sector || domain.kind == DomainKind::odd_sector) && !profile.symmetric())
        throw ValidationError("sector domains need a reflection-symmetric profile");
    return assemble(smp, hbar, dims, domain);
}

BlockTridiagonal<quad> RobinOperator2D::to_block_quad() const {
    if (!wrap.empty()) throw ValidationError("periodic operator is not block tridiagonal");
    BlockTridiagonal<quad> b(blocks, width);
    for (int c = 0; c < blocks; ++c)
        for (int i = 0; i < width; ++i) {
            const std::size_t p = index(c, i);
            b.diag(c, i) = diag[p];
            b.inner(c, i) = inner[p];
            b.coupling(c, i) = coupling[p];
            b.mass(c, i) = mass[p];
        }
    return b;
}

double RobinOperator2D::form_value(const Eigen::VectorXd& u) const {
    const TubularGrid& g = grid;
    const int nt = width;
    const double h2 = g.hbar * g.hbar, h4 = h2 * h2;
    const double ds = g.delta_sigma();
    const double dxi = 1.0 / nt;
    auto val = [&](int c, int i) { return i < nt ? u[static_cast<Eigen::Index>(index(c, i))] : 0.0; };
    double q = 0.0;
    for (int c = 0; c < blocks; ++c) {
        const double kc = g.samples.kappa[g.columns[c]];
        const double w = g.col_weight[c];
        for (int i = 0; i < nt; ++i) {
            const double xi = (i + 0.5) * dxi;
            const double tm = g.map.g(xi, g.T);
            const double dtau = g.map.dg(xi, g.T) * dxi;
            const double du = (val(c, i + 1) - val(c, i)) / dtau;
            q += w * ds * (1.0 - h2 * tm * kc) * du * du * dtau;
        }
        q -= w * ds * val(c, 0) * val(c, 0);
    }
    auto edge = [&](int jl, int jr, int cl, int cr) {
        const double km = 0.5 * (g.samples.kappa[jl] + g.samples.kappa[jr]);
        double e = 0.0;
        for (int i = 0; i < nt; ++i) {
            const double ul = cl >= 0 ? val(cl, i) : 0.0;
            const double ur = cr >= 0 ? val(cr, i) : 0.0;
            const double d = (ur - ul) / ds;
            e += h4 / (1.0 - h2 * g.tau[i] * km) * d * d * g.tau_cell[i] * ds;
        }
        return e;
    };
    for (int c = 0; c + 1 < blocks; ++c) q += edge(g.columns[c], g.columns[c + 1], c, c + 1);
    const int n = g.samples.size();
    if (kind == DomainKind::full) q += edge(g.columns.back(), g.columns.front(), blocks - 1, 0);
    if (kind == DomainKind::odd_sector || kind == DomainKind::single_well) {
        q += edge((g.columns.front() - 1 + n) % n, g.columns.front(), -1, 0);
        q += edge(g.columns.back(), (g.columns.back() + 1) % n, blocks - 1, -1);
    }
    return q;
}

namespace {

double base_shift(const RobinOperator2D& op) {
    const double h = op.grid.hbar;
    const auto& k = op.grid.samples.kappa;
    const double kmax = *std::max_element(k.begin(), k.end());
    return -1.0 - kmax * h * h;
}

}  // namespace

EigenSolveResult solve_lowest(const RobinOperator2D& op, int k, bool dense) {
    if (k < 1 || k > 10) throw ValidationError("solve_lowest supports 1 <= k <= 10");
    if (dense) {
        if (op.size() > 5000) throw ValidationError("dense fallback limited to 5000 unknowns");
        return dense_lowest(op.K, op.M, k);
    }
    const double h = op.grid.hbar;
    double shift = base_shift(op);
    for (int attempt = 0; attempt < 6; ++attempt) {
        try {
            return lowest_eigenpairs(op.K, op.M, k, shift);
        } catch (const SolverError&) {
            if (attempt == 5) throw;
            shift -= 4.0 * h * h * h * std::max(1.0, std::abs(shift));
        }
    }
    throw SolverError("unreachable");
}

EigenSolveResult solve_lowest_fallback(const RobinOperator2D& op, int k, bool fallback) {
    try {
        return solve_lowest(op, k);
    } catch (const SolverError&) {
        if (!fallback || op.size() > 5000) throw;
        return solve_lowest(op, k, true);
    }
}

SectorSplitting symmetric_splitting(const CurvatureProfile& profile, double hbar, const GridDims& dims) {
    if (!profile.symmetric()) throw ValidationError("symmetric_splitting needs a symmetric profile");
    if (profile.size() % 4 != 0) throw ValidationError("σ-grid size must be a multiple of 4");
    const RobinOperator2D even = assemble(profile, hbar, dims, Domain::even_sector());
    const RobinOperator2D odd = assemble(profile, hbar, dims, Domain::odd_sector());
    BlockTridiagonal<quad> be = even.to_block_quad();
    BlockTridiagonal<quad> bo = odd.to_block_quad();
    const double h3 = hbar * hbar * hbar;
    const double gap = 2.0 * profile.gamma() * h3;
    const double shift = base_shift(even) - profile.gamma() * h3;
    const GroundState<quad> ge = ground_state(be, shift, gap);
    const int nt = even.width;
    std::vector<quad> start(bo.size());
    for (int c = 0; c < bo.blocks(); ++c)
        for (int i = 0; i < nt; ++i) start[odd.index(c, i)] = ge.vector[even.index(c + 1, i)];
    const GroundState<quad> go = ground_state(bo, static_cast<double>(ge.eigenvalue), gap, start);

    quad overlap = 0;
    for (int c = 0; c < bo.blocks(); ++c)
        for (int i = 0; i < nt; ++i)
            overlap += bo.mass(c, i) * ge.vector[even.index(c + 1, i)] * go.vector[odd.index(c, i)];
    quad up = 0, low = 0;
    const int last = be.blocks() - 1;
    for (int i = 0; i < nt; ++i) {
        up -= ge.vector[even.index(0, i)] * be.coupling(1, i) * go.vector[odd.index(0, i)];
        low -= ge.vector[even.index(last, i)] * be.coupling(last, i) * go.vector[odd.index(bo.blocks() - 1, i)];
    }
    SectorSplitting out;
    out.upper = static_cast<double>(up / overlap);
    out.lower = static_cast<double>(low / overlap);
    out.splitting = static_cast<double>((up + low) / overlap);
    out.mu_even = static_cast<double>(ge.eigenvalue);
    out.mu_odd = static_cast<double>(go.eigenvalue);
    out.direct_difference = static_cast<double>(go.eigenvalue - ge.eigenvalue);
    out.even = ge.vector;
    out.odd = go.vector;
    return out;
}

Eigen::VectorXd unfold_sector(const RobinOperator2D& full, const RobinOperator2D& sector, const std::vector<quad>& v) {
    if (full.kind != DomainKind::full) throw ValidationError("unfold target must be the full domain");
    if (sector.kind != DomainKind::even_sector && sector.kind != DomainKind::odd_sector)
        throw ValidationError("unfold source must be a reflection sector");
    if (v.size() != sector.size() || full.width != sector.width) throw ValidationError("sector vector and grids differ");
    const CurvatureSamples& smp = full.grid.samples;
    const double parity = sector.kind == DomainKind::odd_sector ? -1.0 : 1.0;
    const int nt = full.width;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full.size()));
    for (int c = 0; c < sector.blocks; ++c) {
        const int j = sector.grid.columns[c];
        const int m = smp.mirror(j);
        for (int i = 0; i < nt; ++i) {
            const double x = static_cast<double>(v[sector.index(c, i)]);
            out[static_cast<Eigen::Index>(full.index(j, i))] = x;
            if (m != j) out[static_cast<Eigen::Index>(full.index(m, i))] = parity * x;
        }
    }
    out /= std::sqrt(out.dot(full.M.cwiseProduct(out)));
    return out;
}

SingleWellResult single_well_ground(const CurvatureProfile& profile, double hbar, const Domain& omega,
                                    const GridDims& dims, bool dense_fallback) {
    if (omega.kind != DomainKind::single_well) throw ValidationError("omega must be a single-well domain");
    SingleWellResult out;
    out.op = assemble(profile, hbar, dims, omega);
    BlockTridiagonal<quad> b = out.op.to_block_quad();
    const double h3 = hbar * hbar * hbar;
    const double gap = 2.0 * profile.gamma() * h3;
    const GroundState<quad> g = ground_state(b, base_shift(out.op) - profile.gamma() * h3, gap);
    out.mu = static_cast<double>(g.eigenvalue);
    out.phi = g.vector;
    const EigenSolveResult two = solve_lowest_fallback(out.op, 2, dense_fallback);
    out.mu2 = two.eigenvalues[1];
    out.gap = out.mu2 - two.eigenvalues[0];
    return out;
}

DecayReport decay_diagnostics(const RobinOperator2D& op, const Eigen::VectorXd& vec, double well,
                              const std::function<double(double)>& phase, double S, const DecayOptions& opts) {
    if (op.kind != DomainKind::full) throw ValidationError("decay diagnostics expect a full-domain vector");
    const TubularGrid& g = op.grid;
    const int nt = op.width;
    int wc = 0;
    double best = 1e300;
    for (int c = 0; c < op.blocks; ++c) {
        double d = std::abs(g.samples.s(g.columns[c]) - well);
        d = std::min(d, 2 * g.samples.half_length - d);
        if (d < best) {
            best = d;
            wc = c;
        }
    }
    DecayReport rep;
    std::vector<double> xs, ys;
    double peak = 0.0;
    for (int i = 0; i < nt; ++i) peak = std::max(peak, std::abs(vec[static_cast<Eigen::Index>(op.index(wc, i))]));
    for (int i = 0; i < nt; ++i) {
        const double t = g.tau[i];
        const double u = std::abs(vec[static_cast<Eigen::Index>(op.index(wc, i))]);
        if (t < opts.tau_min || t > std::min(opts.tau_max, 0.6 * g.T) || u < opts.floor * peak) continue;
        xs.push_back(t);
        ys.push_back(std::log(u));
    }
    if (xs.size() < 3) throw SolverError("normal profile underflow: too few samples for the fit");
    rep.normal_slope = fit_line(xs, ys).slope;
    rep.normal_points = static_cast<int>(xs.size());

    std::vector<double> f(op.blocks);
    double fmax = 0.0;
    for (int c = 0; c < op.blocks; ++c) {
        double acc = 0.0;
        for (int i = 0; i < nt; ++i) {
            const auto p = static_cast<Eigen::Index>(op.index(c, i));
            acc += op.M[p] * vec[p] * vec[p];
        }
        f[c] = std::sqrt(acc / g.delta_sigma());
        fmax = std::max(fmax, f[c]);
    }
    xs.clear();
    ys.clear();
    for (int c = 0; c < op.blocks; ++c) {
        const double ph = phase(g.samples.s(g.columns[c]));
        if (ph < opts.phi_min || ph > 0.5 * S - opts.phi_margin || f[c] < opts.floor * fmax) continue;
        xs.push_back(ph);
        ys.push_back(-g.hbar * std::log(f[c]));
    }
    if (xs.size() < 3) throw SolverError("tangential profile underflow: too few samples for the fit");
    const LinearFit fit = fit_line(xs, ys);
    rep.tangential_slope = fit.slope;
    rep.tangential_intercept = fit.intercept;
    rep.tangential_points = static_cast<int>(xs.size());
    return rep;
}

namespace {
constexpr char kMagic[8] = {'C', 'B', 'S', 'P', 'M', 'A', 'T', '1'};

template <class T>
void put(std::ofstream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!is) throw ValidationError("truncated matrix dump");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}
}  // namespace

void write_matrix_dump(const SpMat& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open " + path);
    os.write(kMagic, 8);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            put<std::uint64_t>(os, static_cast<std::uint64_t>(it.row()));
            put<std::uint64_t>(os, static_cast<std::uint64_t>(it.col()));
            put<double>(os, it.value());
        }
}

SpMat read_matrix_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw ValidationError("bad matrix dump magic");
    const auto rows = get<std::uint64_t>(is);
    const auto cols = get<std::uint64_t>(is);
    std::vector<Eigen::Triplet<double>> trip;
    while (is.peek() != EOF) {
        const auto r = get<std::uint64_t>(is);
        const auto c = get<std::uint64_t>(is);
        const auto v = get<double>(is);
        trip.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
    }
    SpMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

}  // namespace curvebound
