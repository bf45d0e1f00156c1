#ifndef QFC_CONFIG_HPP
#define QFC_CONFIG_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qfc/model.hpp"

namespace qfc {

// Run-wide numerical settings carried by the config file.
struct RunSettings {
    DriveConvention drive = DriveConvention::PhotonFlux;
    int truncation_order = 3;
    double eps_ne = 1e-3;
    double omega = 0.0;              // analysis frequency / Gamma
    double residual_tolerance = 1e-9;
    double f_max = 100.0;            // threshold search ceiling
    int mi_margin_cells = 2;
    std::vector<double> bucket_edges{-0.5, -0.3, -0.2, -0.1, -0.05, -0.02, -0.001};

    bool operator==(const RunSettings&) const = default;
};

struct Config {
    ResonatorSpec resonator;
    RunSettings run;
    std::vector<std::string> warnings; // e.g. tabulated eta far from the formula
};

/// Parses and validates a config document. `source` names it in diagnostics.
/// Throws Error(Parse) with line and key, or Error(Validation) listing every
/// violated invariant.
Config parse_config(std::string_view text, const std::string& source = "<config>");

Config load_config(const std::filesystem::path& path);

/// Canonical document in SI-suffixed keys; parse_config(dump) reproduces the
/// same objects bit for bit.
nlohmann::ordered_json to_json(const Config& config);

/// FNV-1a 64 of the canonical document, as 16 hex digits.
std::string config_hash(const Config& config);

bool same_resonator(const ResonatorSpec& a, const ResonatorSpec& b);

} // namespace qfc

#endif // QFC_CONFIG_HPP
