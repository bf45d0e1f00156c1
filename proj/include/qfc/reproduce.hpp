#ifndef QFC_REPRODUCE_HPP
#define QFC_REPRODUCE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfc/config.hpp"
#include "qfc/io.hpp"
#include "qfc/phases.hpp"

namespace qfc {

enum class Figure { Fig2, Fig3, Fig4, Fig5, Fig6, Fig7 };

std::optional<Figure> parse_figure(std::string_view text);
std::string_view to_string(Figure figure);

struct SweepAxes {
    double delta_min_hz = -0.4e9;
    double delta_max_hz = 1.2e9;
    int delta_points = 64;
    double amplitude_min = 0.0;
    double amplitude_max = 5e9;
    int amplitude_points = 64;
};

ClassifyOptions classify_options(const Config& config);

/// CSV + SVG per L and a run.json with settings, axes and per-phase counts.
/// Failed cells are listed in run.json and counted into `failed_cells`.
io::Bundle phase_diagram_bundle(const Config& config, FamilyLabel family, const std::vector<int>& pair_indices,
                                const SweepAxes& axes, int workers, std::size_t* failed_cells = nullptr,
                                const std::string& command = "phase-diagram");

struct ReproduceOptions {
    int workers = 1;
    SweepAxes axes;
};

/// One desk-scale driver per figure. Cells that fail are recorded in the
/// bundle; `failed_cells` receives their count.
io::Bundle reproduce(Figure figure, const Config& config, const ReproduceOptions& options = {},
                     std::size_t* failed_cells = nullptr);

} // namespace qfc

#endif // QFC_REPRODUCE_HPP
