#pragma once

#include "curvebound/geometry.hpp"
#include "curvebound/tubular2d.hpp"
#include "curvebound/wkb.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace curvebound::cli {

enum class ExperimentKind { splitting, single_well, wkb_residual, weyl, decay };

std::string kind_name(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

struct SplittingOptions {
    bool interaction = true;
    bool richardson = false;  // 2D splitting from n_tau and 2 n_tau
    int n_s_effective = 16384;
};

struct WeylOptions {
    double Lambda = 0.5;
    double E = 1.0;
    int budget = 200;
    bool bracket = false;
    int n_max = 20;
};

struct GridConfig {
    int n_s = 1024;
    int n_tau = 48;
    std::optional<TauMap::Kind> map;  // default: sinh, uniform for weyl
    double tau_scale = 2.0;
    double D_factor = 1.5;       // D = D_factor · S
    std::optional<double> D;     // absolute depth, overrides D_factor (weyl default 8)
};

struct ExperimentConfig {
    CurveSpec curve;
    int expected_wells = 2;
    ExperimentKind kind = ExperimentKind::splitting;
    int well = 0;  // single-well, wkb-residual
    SplittingOptions splitting;
    WeylOptions weyl;
    std::vector<double> ladder;  // ħ, or h for weyl
    GridConfig grids;
    WkbCutoffs cutoffs;
    std::string name;            // output file stem
    bool deterministic = false;  // omit timings from the JSON metadata
    nlohmann::json echo;         // config as read
};

// Throws ValidationError on schema or range violations.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace curvebound::cli
