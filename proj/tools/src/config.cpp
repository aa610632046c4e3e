#include "config.hpp"

#include "curvebound/types.hpp"

#include <fstream>
#include <set>

namespace curvebound::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ValidationError(where + " must be an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + "." + key + " has the wrong type");
    }
}

template <class T>
T require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError("missing " + where + "." + key);
    return get<T>(j, key, where, T{});
}

void check(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

CurveSpec parse_curve(const json& j, int& wells) {
    only_keys(j, "curve", {"type", "a", "b", "xc", "xs", "yc", "ys", "samples_per_period", "wells"});
    CurveSpec spec;
    const std::string type = require<std::string>(j, "type", "curve");
    if (type == "ellipse") {
        spec.kind = EllipseSpec{require<double>(j, "a", "curve"), require<double>(j, "b", "curve")};
    } else if (type == "fourier") {
        FourierSpec f;
        f.xc = get<std::vector<double>>(j, "xc", "curve", {});
        f.xs = get<std::vector<double>>(j, "xs", "curve", {});
        f.yc = get<std::vector<double>>(j, "yc", "curve", {});
        f.ys = get<std::vector<double>>(j, "ys", "curve", {});
        spec.kind = f;
    } else {
        throw ValidationError("curve.type must be 'ellipse' or 'fourier'");
    }
    spec.samples_per_period = get<int>(j, "samples_per_period", "curve", spec.samples_per_period);
    wells = get<int>(j, "wells", "curve", 2);
    check(wells == 1 || wells == 2, "curve.wells must be 1 or 2");
    // Geometry preconditions (a > b, non-degenerate Fourier data) are checked here.
    build_curve(spec);
    return spec;
}

void parse_experiment(const json& j, ExperimentConfig& c) {
    if (j.is_string()) {
        c.kind = parse_kind(j.get<std::string>());
        return;
    }
    only_keys(j, "experiment",
              {"kind", "well", "interaction", "richardson", "n_s_effective", "Lambda", "E", "budget", "bracket", "n_max"});
    c.kind = parse_kind(require<std::string>(j, "kind", "experiment"));
    auto allow = [&](std::initializer_list<const char*> keys, ExperimentKind k) {
        for (const char* key : keys)
            if (j.contains(key) && c.kind != k)
                throw ValidationError(std::string("experiment.") + key + " does not apply to " + kind_name(c.kind));
    };
    allow({"interaction", "richardson", "n_s_effective"}, ExperimentKind::splitting);
    allow({"Lambda", "E", "budget", "bracket", "n_max"}, ExperimentKind::weyl);
    if (j.contains("well") && c.kind != ExperimentKind::single_well && c.kind != ExperimentKind::wkb_residual)
        throw ValidationError("experiment.well does not apply to " + kind_name(c.kind));

    c.well = get<int>(j, "well", "experiment", 0);
    c.splitting.interaction = get<bool>(j, "interaction", "experiment", c.splitting.interaction);
    c.splitting.richardson = get<bool>(j, "richardson", "experiment", c.splitting.richardson);
    c.splitting.n_s_effective = get<int>(j, "n_s_effective", "experiment", c.splitting.n_s_effective);
    c.weyl.Lambda = get<double>(j, "Lambda", "experiment", c.weyl.Lambda);
    c.weyl.E = get<double>(j, "E", "experiment", c.weyl.E);
    c.weyl.budget = get<int>(j, "budget", "experiment", c.weyl.budget);
    c.weyl.bracket = get<bool>(j, "bracket", "experiment", c.weyl.bracket);
    c.weyl.n_max = get<int>(j, "n_max", "experiment", c.weyl.n_max);
    check(c.splitting.n_s_effective >= 64 && c.splitting.n_s_effective % 2 == 0,
          "experiment.n_s_effective must be an even integer >= 64");
    check(c.weyl.Lambda > 0.0 && c.weyl.Lambda < 1.0, "experiment.Lambda must lie in (0, 1)");
    check(c.weyl.budget >= 1, "experiment.budget must be positive");
    check(c.weyl.n_max >= 1 && c.weyl.n_max <= 20, "experiment.n_max must lie in [1, 20]");
}

void parse_grids(const json& j, GridConfig& g) {
    only_keys(j, "grids", {"n_s", "n_tau", "tau_map", "tau_scale", "D_factor", "D"});
    g.n_s = get<int>(j, "n_s", "grids", g.n_s);
    g.n_tau = get<int>(j, "n_tau", "grids", g.n_tau);
    if (j.contains("tau_map")) {
        const std::string map = get<std::string>(j, "tau_map", "grids", "");
        if (map == "sinh") g.map = TauMap::Kind::sinh;
        else if (map == "uniform") g.map = TauMap::Kind::uniform;
        else throw ValidationError("grids.tau_map must be 'sinh' or 'uniform'");
    }
    g.tau_scale = get<double>(j, "tau_scale", "grids", g.tau_scale);
    check(!(j.contains("D") && j.contains("D_factor")), "grids.D and grids.D_factor are exclusive");
    g.D_factor = get<double>(j, "D_factor", "grids", g.D_factor);
    if (j.contains("D")) g.D = get<double>(j, "D", "grids", 0.0);
    check(g.n_s >= 64 && g.n_s % 2 == 0, "grids.n_s must be an even integer >= 64");
    check(g.n_tau >= 4, "grids.n_tau must be at least 4");
    check(g.tau_scale > 0.0, "grids.tau_scale must be positive");
    check(g.D_factor > 0.0, "grids.D_factor must be positive");
    check(!g.D || *g.D > 0.0, "grids.D must be positive");
}

void parse_cutoffs(const json& j, WkbCutoffs& c) {
    only_keys(j, "cutoffs", {"eta", "sigma_ramp", "transverse", "tau_plateau", "tau_support"});
    c.eta = get<double>(j, "eta", "cutoffs", c.eta);
    c.sigma_ramp = get<double>(j, "sigma_ramp", "cutoffs", c.sigma_ramp);
    const std::string t = get<std::string>(j, "transverse", "cutoffs", "interval");
    if (t == "interval") c.transverse = TransverseProfile::interval;
    else if (t == "halfline") c.transverse = TransverseProfile::halfline;
    else throw ValidationError("cutoffs.transverse must be 'interval' or 'halfline'");
    c.tau_plateau = get<double>(j, "tau_plateau", "cutoffs", c.tau_plateau);
    c.tau_support = get<double>(j, "tau_support", "cutoffs", c.tau_support);
    check(c.eta > 0.0, "cutoffs.eta must be positive");
    check(c.sigma_ramp > 0.0, "cutoffs.sigma_ramp must be positive");
    check(c.tau_plateau > 0.0 && c.tau_plateau < c.tau_support && c.tau_support <= 1.0,
          "cutoffs need 0 < tau_plateau < tau_support <= 1");
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::splitting: return "splitting";
        case ExperimentKind::single_well: return "single-well";
        case ExperimentKind::wkb_residual: return "wkb-residual";
        case ExperimentKind::weyl: return "weyl";
        case ExperimentKind::decay: return "decay";
    }
    return "";
}

ExperimentKind parse_kind(const std::string& name) {
    for (ExperimentKind k : {ExperimentKind::splitting, ExperimentKind::single_well, ExperimentKind::wkb_residual,
                             ExperimentKind::weyl, ExperimentKind::decay})
        if (kind_name(k) == name) return k;
    throw ValidationError("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config(const json& j) {
    only_keys(j, "config", {"curve", "experiment", "ladder", "grids", "cutoffs", "output"});
    ExperimentConfig c;
    c.echo = j;
    if (!j.contains("curve")) throw ValidationError("missing curve");
    if (!j.contains("experiment")) throw ValidationError("missing experiment");
    if (!j.contains("ladder")) throw ValidationError("missing ladder");
    c.curve = parse_curve(j.at("curve"), c.expected_wells);
    parse_experiment(j.at("experiment"), c);
    c.ladder = require<std::vector<double>>(j, "ladder", "config");
    check(!c.ladder.empty(), "ladder must not be empty");
    for (std::size_t k = 0; k < c.ladder.size(); ++k) {
        check(c.ladder[k] > 0.0 && c.ladder[k] < 1.0, "ladder values must lie in (0, 1)");
        check(k == 0 || c.ladder[k] < c.ladder[k - 1], "ladder must be strictly decreasing");
    }
    if (j.contains("grids")) parse_grids(j.at("grids"), c.grids);
    if (j.contains("cutoffs")) parse_cutoffs(j.at("cutoffs"), c.cutoffs);
    c.name = kind_name(c.kind);
    if (j.contains("output")) {
        const json& o = j.at("output");
        only_keys(o, "output", {"name", "deterministic"});
        c.name = get<std::string>(o, "name", "output", c.name);
        c.deterministic = get<bool>(o, "deterministic", "output", false);
        check(!c.name.empty() && c.name.find_first_of("/\\") == std::string::npos && c.name != "." && c.name != "..",
              "output.name must be a plain file stem");
    }

    const bool two_wells = c.expected_wells == 2;
    switch (c.kind) {
        case ExperimentKind::splitting:
        case ExperimentKind::decay:
            check(two_wells, kind_name(c.kind) + " needs a two-well curve");
            break;
        case ExperimentKind::single_well:
        case ExperimentKind::wkb_residual:
            check(c.well >= 0 && c.well < c.expected_wells, "experiment.well out of range");
            break;
        case ExperimentKind::weyl:
            break;
    }
    if (!two_wells && !c.grids.D && c.kind != ExperimentKind::weyl)
        throw ValidationError("single-well curves need an absolute grids.D");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, false);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace curvebound::cli
