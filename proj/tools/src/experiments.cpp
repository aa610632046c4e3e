#include "experiments.hpp"

#include "curvebound/effective1d.hpp"
#include "curvebound/interaction.hpp"
#include "curvebound/numerics.hpp"
#include "curvebound/types.hpp"
#include "curvebound/weyl.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef CURVEBOUND_VERSION
#define CURVEBOUND_VERSION "unknown"
#endif

namespace curvebound::cli {

using nlohmann::json;

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct Point {
    std::vector<std::vector<double>> rows;
    std::string line;
    double seconds = 0.0;
};

struct Setup {
    CurvatureProfile profile;
    std::optional<EffectivePotential> pot;
    double S = nan_value;
    GridDims dims;
    json derived;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double kappa_min(const CurvatureProfile& p) {
    const auto& k = p.samples().kappa;
    return *std::min_element(k.begin(), k.end());
}

Setup prepare(const ExperimentConfig& c) {
    Setup s{make_profile(c.curve, c.grids.n_s, c.expected_wells), std::nullopt, nan_value, {}, json::object()};
    const CurvatureProfile& p = s.profile;
    s.derived["perimeter"] = 2.0 * p.half_length();
    s.derived["kappa_max"] = p.kappa_max();
    s.derived["gamma"] = p.gamma();
    s.derived["wells"] = json::array();
    for (const Well& w : p.wells()) s.derived["wells"].push_back({{"s", w.s}, {"kappa", w.kappa}, {"gamma", w.gamma}});
    s.derived["symmetric"] = p.symmetric();
    if (c.expected_wells == 2) {
        s.pot = effective_potential(p);
        const AgmonActions a = agmon_actions(*s.pot);
        s.S = a.S;
        s.derived["S_u"] = a.S_u;
        s.derived["S_d"] = a.S_d;
        s.derived["S"] = a.S;
    }
    s.dims.n_tau = c.grids.n_tau;
    s.dims.map.scale = c.grids.tau_scale;
    if (c.kind == ExperimentKind::weyl) {
        s.dims.map.kind = c.grids.map.value_or(TauMap::Kind::uniform);
        s.dims.D = c.grids.D.value_or(8.0);
    } else {
        s.dims.map.kind = c.grids.map.value_or(TauMap::Kind::sinh);
        s.dims.D = c.grids.D ? *c.grids.D : c.grids.D_factor * s.S;
    }
    s.derived["D"] = s.dims.D;
    if ((c.kind == ExperimentKind::splitting || c.kind == ExperimentKind::decay) && !p.symmetric())
        throw ValidationError(kind_name(c.kind) + " needs a reflection-symmetric curve");
    if (c.kind == ExperimentKind::splitting || c.kind == ExperimentKind::decay) {
        const double L = p.half_length();
        const double arc = std::abs(p.s_l() - p.s_r());
        if (!(c.cutoffs.eta < 0.25 * std::min(arc, 2.0 * L - arc)))
            throw ValidationError("cutoffs.eta must be below a quarter of the inter-well arcs");
    }
    return s;
}

double tau_depth(const Setup& s, double hbar) {
    return truncation_length(hbar, s.dims.D, kappa_min(s.profile), s.profile.kappa_max());
}

double excluded_point(const CurvatureProfile& p, int well) {
    if (p.wells().size() == 2) return p.wells()[1 - well].s;
    const double L = p.half_length();
    const double x = p.wells()[0].s + L;
    return x > L ? x - 2.0 * L : x;
}

Point splitting_point(const ExperimentConfig& c, const Setup& s, double hb) {
    const CurvatureProfile& p = s.profile;
    SectorSplitting sp = symmetric_splitting(p, hb, s.dims);
    double split = sp.splitting;
    if (c.splitting.richardson) {
        GridDims fine = s.dims;
        fine.n_tau *= 2;
        sp = symmetric_splitting(p, hb, fine);
        split = richardson(split, sp.splitting);
    }
    const double h2 = hb * hb;
    const double eff = h2 * tunneling_splitting(*s.pot, hb, c.splitting.n_s_effective).splitting;
    const double formula = h2 * predicted_splitting(*s.pot, std::pow(hb, 4)).lambda_gap;
    double inter = nan_value;
    if (c.splitting.interaction) {
        WellPairConfig w;
        w.eta = c.cutoffs.eta;
        w.dims = s.dims;
        inter = interaction_splitting(p, build_interaction_basis(p, hb, w)).splitting_estimate;
    }
    if (!(split > 0.0) || !(eff > 0.0)) throw SolverError("non-positive splitting");
    Point pt;
    pt.rows.push_back({hb, std::pow(hb, 4), tau_depth(s, hb), sp.mu_even, split, eff, formula, inter, split / eff,
                       formula / eff, inter / split});
    pt.line = "splitting hbar=" + fmt(hb) + " split_2d=" + fmt(split) + " split_eff1d=" + fmt(eff) +
              " ratio_2d_eff1d=" + fmt(split / eff) + " ratio_formula_eff1d=" + fmt(formula / eff) +
              " ratio_interaction_2d=" + fmt(inter / split);
    return pt;
}

Point single_well_point(const ExperimentConfig& c, const Setup& s, double hb, bool dense) {
    const CurvatureProfile& p = s.profile;
    const Domain omega = Domain::single_well(excluded_point(p, c.well), c.cutoffs.eta, p.half_length());
    const SingleWellResult r = single_well_ground(p, hb, omega, s.dims, dense);
    const double h3 = hb * hb * hb;
    const double series = eigenvalue_series(p.kappa_max(), p.gamma()).value(hb);
    const double scaled = (r.mu + 1.0 + p.kappa_max() * hb * hb) / h3;
    Point pt;
    pt.rows.push_back({hb, tau_depth(s, hb), r.mu, r.mu2, r.gap, r.gap / h3, series, scaled});
    pt.line = "single-well hbar=" + fmt(hb) + " mu=" + fmt(r.mu) + " gap=" + fmt(r.gap) + " gap/hbar^3=" +
              fmt(r.gap / h3) + " (mu+1+kmax*hbar^2)/hbar^3=" + fmt(scaled);
    return pt;
}

Point wkb_point(const ExperimentConfig& c, const Setup& s, double hb) {
    const CurvatureProfile& p = s.profile;
    const double mu = eigenvalue_series(p.kappa_max(), p.gamma()).value(hb);
    const ContinuumResidual r = continuum_residual(p, hb, s.dims, c.well, c.cutoffs, mu);
    Point pt;
    pt.rows.push_back({hb, mu, r.coarse.residual, r.coarse.interior, r.fine.interior, r.extrapolated, r.cutoff_part,
                       r.core_part, r.weighted_core, std::pow(hb, 4)});
    pt.line = "wkb-residual hbar=" + fmt(hb) + " residual=" + fmt(r.extrapolated) + " raw=" + fmt(r.coarse.residual) +
              " hbar^4=" + fmt(std::pow(hb, 4));
    return pt;
}

Point weyl_point(const ExperimentConfig& c, const Setup& s, double h, bool dense) {
    const CurvatureProfile& p = s.profile;
    CountingOptions o;
    o.dims = s.dims;
    o.budget = c.weyl.budget;
    o.dense_fallback = dense;
    const CountingReport neg = counting_check(p, h, ThresholdKind::negative, c.weyl.Lambda, o);
    const CountingReport low = counting_check(p, h, ThresholdKind::low_lying, c.weyl.E, o);
    double cp = nan_value, cm = nan_value, cpc = nan_value, cmc = nan_value;
    if (c.weyl.bracket) {
        const BracketSpec b = bracket_check(p, {h}, c.weyl.n_max, o).fits.front();
        cp = b.C_plus;
        cm = b.C_minus;
        cpc = b.C_plus_corrected;
        cmc = b.C_minus_corrected;
    }
    Point pt;
    pt.rows.push_back({h, neg.T, c.weyl.Lambda, double(neg.observed), neg.predicted, neg.relative_error, c.weyl.E,
                       double(low.observed), low.predicted, low.observed - low.predicted, cp, cm, cpc, cmc});
    pt.line = "weyl h=" + fmt(h) + " negative=" + std::to_string(neg.observed) + " predicted=" + fmt(neg.predicted) +
              " low_lying=" + std::to_string(low.observed) + " predicted=" + fmt(low.predicted);
    return pt;
}

Point decay_point(const ExperimentConfig& c, const Setup& s, double hb) {
    const CurvatureProfile& p = s.profile;
    const SectorSplitting sp = symmetric_splitting(p, hb, s.dims);
    const RobinOperator2D full = assemble(p, hb, s.dims, Domain::full());
    const Eigen::VectorXd even = unfold_sector(full, assemble(p, hb, s.dims, Domain::even_sector()), sp.even);
    const Eigen::VectorXd odd = unfold_sector(full, assemble(p, hb, s.dims, Domain::odd_sector()), sp.odd);
    const CurvatureSamples& smp = p.samples();
    Point pt;
    pt.line = "decay hbar=" + fmt(hb);
    for (int w = 0; w < 2; ++w) {
        const EikonalPhase ph = eikonal_phase(*s.pot, w, s.pot->wells[1 - w], c.cutoffs.eta, smp);
        auto phase = [&](double x) {
            const int j = smp.wrap(static_cast<int>(std::lround((x + smp.half_length) / smp.delta())) - 1);
            return std::isnan(ph.phi[j]) ? 1e300 : ph.phi[j];
        };
        for (int parity : {1, -1}) {
            const DecayReport r = decay_diagnostics(full, parity > 0 ? even : odd, s.pot->wells[w], phase, s.S);
            pt.rows.push_back({hb, double(w), double(parity), r.normal_slope, double(r.normal_points),
                               r.tangential_slope, r.tangential_intercept, double(r.tangential_points)});
            pt.line += " w" + std::to_string(w) + (parity > 0 ? "+" : "-") + " normal=" + fmt(r.normal_slope) +
                       " tangential=" + fmt(r.tangential_slope);
        }
    }
    return pt;
}

Point run_point(const ExperimentConfig& c, const Setup& s, double x, bool dense) {
    switch (c.kind) {
        case ExperimentKind::splitting: return splitting_point(c, s, x);
        case ExperimentKind::single_well: return single_well_point(c, s, x, dense);
        case ExperimentKind::wkb_residual: return wkb_point(c, s, x);
        case ExperimentKind::weyl: return weyl_point(c, s, x, dense);
        case ExperimentKind::decay: return decay_point(c, s, x);
    }
    throw ValidationError("unknown experiment kind");
}

json summarize(const ExperimentConfig& c, const std::vector<std::vector<double>>& rows) {
    json out = json::object();
    auto fit = [&](int xcol, int ycol, bool log_x, bool inv_x) {
        std::vector<double> x, y;
        for (const auto& r : rows) {
            if (!(r[ycol] > 0.0)) continue;
            x.push_back(inv_x ? 1.0 / r[xcol] : (log_x ? std::log(r[xcol]) : r[xcol]));
            y.push_back(std::log(r[ycol]));
        }
        return x.size() >= 2 ? fit_line(x, y).slope : nan_value;
    };
    switch (c.kind) {
        case ExperimentKind::splitting:
            out["log_split_2d_vs_inverse_hbar"] = fit(0, 4, false, true);
            out["log_split_eff1d_vs_inverse_hbar"] = fit(0, 5, false, true);
            break;
        case ExperimentKind::wkb_residual:
            out["log_residual_vs_log_hbar"] = fit(0, 5, true, false);
            break;
        case ExperimentKind::weyl:
            if (c.weyl.bracket && !rows.empty()) {
                auto spread = [&](int col) {
                    double lo = INFINITY, hi = 0.0;
                    for (const auto& r : rows) lo = std::min(lo, r[col]), hi = std::max(hi, r[col]);
                    return lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 1.0);
                };
                out["C_plus_spread"] = spread(10);
                out["C_minus_spread"] = spread(11);
            }
            break;
        default:
            break;
    }
    for (auto& [k, v] : out.items())
        if (v.is_number_float() && !std::isfinite(v.get<double>())) v = nullptr;
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

std::vector<std::string> csv_columns(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::splitting:
            return {"hbar", "h", "T", "mu1", "split_2d", "split_eff1d", "split_formula", "split_interaction",
                    "ratio_2d_eff1d", "ratio_formula_eff1d", "ratio_interaction_2d"};
        case ExperimentKind::single_well:
            return {"hbar", "T", "mu1", "mu2", "gap", "gap_over_hbar3", "series_mu", "scaled_mu"};
        case ExperimentKind::wkb_residual:
            return {"hbar", "mu", "residual_raw", "residual_interior", "residual_interior_fine", "residual",
                    "residual_cutoff", "residual_core", "residual_weighted_core", "hbar4"};
        case ExperimentKind::weyl:
            return {"h", "T", "Lambda", "negative_count", "negative_predicted", "negative_relative_error", "E",
                    "low_count", "low_predicted", "low_difference", "C_plus", "C_minus", "C_plus_corrected",
                    "C_minus_corrected"};
        case ExperimentKind::decay:
            return {"hbar", "well", "parity", "normal_slope", "normal_points", "tangential_slope",
                    "tangential_intercept", "tangential_points"};
    }
    return {};
}

std::string format_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
    out += '\n';
    char buf[40];
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", r[k]);
            if (k) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

json version_info() {
    return {
        {"curvebound", CURVEBOUND_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"spdlog", std::to_string(SPDLOG_VER_MAJOR) + "." + std::to_string(SPDLOG_VER_MINOR) + "." +
                       std::to_string(SPDLOG_VER_PATCH)},
        {"compiler", __VERSION__},
    };
}

int run_experiment(const ExperimentConfig& c, const RunOptions& opts, std::ostream& summary) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    if (opts.threads < 1) throw ValidationError("--threads must be at least 1");
    Setup setup = prepare(c);
    spdlog::info("{}: {} ladder points, n_s = {}, n_tau = {}, D = {}", c.name, c.ladder.size(), c.grids.n_s,
                 setup.dims.n_tau, setup.dims.D);

    const std::size_t n = c.ladder.size();
    std::vector<std::optional<Point>> points(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::mutex m;
    std::size_t printed = 0;
    auto flush_lines = [&] {
        while (printed < n && (points[printed] || errors[printed])) {
            if (points[printed]) summary << points[printed]->line << '\n' << std::flush;
            ++printed;
        }
    };
    auto worker = [&] {
        for (std::size_t k; (k = next++) < n;) {
            const auto start = clock::now();
            std::optional<Point> pt;
            std::exception_ptr err;
            try {
                pt = run_point(c, setup, c.ladder[k], opts.dense_fallback);
                pt->seconds = std::chrono::duration<double>(clock::now() - start).count();
                spdlog::debug("point {} done in {:.2f} s", c.ladder[k], pt->seconds);
            } catch (...) {
                err = std::current_exception();
            }
            std::lock_guard<std::mutex> lock(m);
            points[k] = std::move(pt);
            errors[k] = err;
            flush_lines();
        }
    };
    const int nthreads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.threads), n));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::size_t done = 0;
    while (done < n && !errors[done]) ++done;
    std::string status = "ok", message;
    int code = exit_ok;
    if (done < n) {
        try {
            std::rethrow_exception(errors[done]);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            message = e.what();
        }
        for (std::size_t k = done + 1; k < n; ++k)
            if (errors[k]) try {
                    std::rethrow_exception(errors[k]);
                } catch (const ValidationError&) {
                    throw;
                } catch (...) {
                }
        status = "solver_failure";
        code = exit_solver;
        spdlog::error("{} at ladder point {}: {}", kind_name(c.kind), c.ladder[done], message);
    }

    std::vector<std::vector<double>> rows;
    json timings = json::object();
    timings["points"] = json::array();
    for (std::size_t k = 0; k < done; ++k) {
        for (auto& r : points[k]->rows) rows.push_back(r);
        timings["points"].push_back({{"value", c.ladder[k]}, {"seconds", points[k]->seconds}});
    }

    json meta;
    meta["experiment"] = c.name;
    meta["kind"] = kind_name(c.kind);
    meta["status"] = status;
    if (!message.empty()) {
        meta["error"] = message;
        meta["failed_at"] = c.ladder[done];
    }
    meta["config"] = c.echo;
    meta["versions"] = version_info();
    meta["run"] = {{"threads", opts.threads}, {"dense_fallback", opts.dense_fallback}};
    meta["derived"] = setup.derived;
    meta["columns"] = csv_columns(c.kind);
    meta["summary"] = summarize(c, rows);
    timings["total_seconds"] = std::chrono::duration<double>(clock::now() - t0).count();
    if (!c.deterministic) meta["timings"] = timings;

    const std::filesystem::path dir(opts.out);
    std::filesystem::create_directories(dir);
    write_file(dir / (c.name + ".csv"), format_csv(csv_columns(c.kind), rows));
    write_file(dir / (c.name + ".json"), meta.dump(2) + "\n");
    spdlog::info("wrote {} rows to {}", rows.size(), (dir / (c.name + ".csv")).string());
    return code;
}

}  // namespace curvebound::cli
