#ifndef QFC_IO_HPP
#define QFC_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qfc/phases.hpp"

namespace qfc::io {

inline constexpr std::string_view kVersion = "1.0.0";

/// FNV-1a 64 as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Shortest text that reads back to the same double ("nan", "inf" for non-finite).
std::string number(double value);

class Csv {
public:
    explicit Csv(std::vector<std::string> header);
    Csv& row(const std::vector<std::string>& cells);
    const std::string& str() const { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

/// Amplitude column name for a drive convention, unit included.
std::string amplitude_column(DriveConvention convention);

/// delta_p0_hz, <amplitude_column>, phase, c_min, n_branches, n_parametric,
/// max_eig_re_norm, error
std::string phase_csv(const SweepGrid& grid, const std::string& amplitude_column = "a_pin_sqrt_photons_per_s");

struct HeatMapStyle {
    std::vector<double> bucket_edges;
    std::string title;
    std::string amplitude_label = "a_pin";
};

/// Bucketed C_min heat map; MI cells hatched, failed cells grey.
std::string phase_svg(const SweepGrid& grid, const HeatMapStyle& style, const std::string& config_hash);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

std::string line_plot_svg(const std::vector<Series>& series, const std::string& x_label,
                          const std::string& y_label, const std::string& title,
                          const std::string& config_hash);

// Files produced by one run. Contents stay in memory until write() so the
// manifest checksums describe exactly what lands on disk.
class Bundle {
public:
    Bundle(std::string command, std::string config_hash);

    void add(const std::string& name, std::string content);
    /// Manifest JSON: command, config hash, version, per-file FNV-1a.
    nlohmann::ordered_json manifest() const;
    /// Writes every file plus manifest.json under `dir`.
    void write(const std::filesystem::path& dir) const;

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    std::string command_;
    std::string config_hash_;
    std::vector<std::pair<std::string, std::string>> files_;
};

} // namespace qfc::io

#endif // QFC_IO_HPP
