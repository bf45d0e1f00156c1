#ifndef QFC_PHASES_HPP
#define QFC_PHASES_HPP

#include <string>
#include <string_view>
#include <vector>

#include "qfc/model.hpp"
#include "qfc/steady.hpp"

namespace qfc {

enum class Phase { NE, ET, MI };

std::string_view to_string(Phase phase);

struct PhasePoint {
    double delta_p0_hz = 0.0;
    double a_pin = 0.0;
    Phase phase = Phase::NE;
    double c_min = 0.0;      // NaN for MI cells
    int n_branches = 0;      // pump-only roots
    int n_parametric = 0;    // parametric solutions
    double max_eig_re = 0.0; // of M at the pump-only root (NaN when not formed)
    bool failed = false;
    std::string error;       // solver message of a failed cell
};

struct ClassifyOptions {
    double eps_ne = 1e-3;
    double omega = 0.0;
    NormalizeOptions normalize;
    SolverOptions solver;
};

/// Classifies one normalized drive. coupling_fraction is gamma / Gamma.
PhasePoint classify_normalized(const NormalizedDrive& drive, double coupling_fraction,
                               const ClassifyOptions& options = {});

/// normalize + classify_normalized. Solver failures mark the cell instead of throwing.
PhasePoint classify_point(const OperatingPoint& op, const ResonatorSpec& resonator,
                          const ClassifyOptions& options = {});

// points are row-major: amplitude index outer, detuning index inner.
struct SweepGrid {
    FamilyLabel family = FamilyLabel::TE00;
    int pair_index = 1;
    std::vector<double> delta_axis_hz;
    std::vector<double> amplitude_axis;
    std::vector<PhasePoint> points;

    const PhasePoint& at(std::size_t i_amp, std::size_t i_delta) const {
        return points[i_amp * delta_axis_hz.size() + i_delta];
    }
    std::size_t count(Phase phase) const;
};

/// Evenly spaced axis of n points on [lo, hi].
std::vector<double> linear_axis(double lo, double hi, int n);

/// One grid per entry of `pair_indices`. Output does not depend on `workers`.
/// Throws InvalidArgument for empty or non-monotone axes.
std::vector<SweepGrid> sweep(const ResonatorSpec& resonator, FamilyLabel family,
                             const std::vector<int>& pair_indices,
                             const std::vector<double>& delta_axis_hz,
                             const std::vector<double>& amplitude_axis,
                             const ClassifyOptions& options = {}, int workers = 1);

struct FamilyPump {
    FamilyLabel family = FamilyLabel::TE00;
    double a_pin = 0.0;
    double worst_c_min = 0.0; // max over the requested L
};

struct JointPump {
    double delta_p0_hz = 0.0;
    std::vector<FamilyPump> families;
    double worst_c_min = 0.0; // max over families
};

struct JointPumpOptions {
    ClassifyOptions classify;
    int mi_margin_cells = 2;
    int workers = 1;
};

/// Shared detuning (each family relative to its own f0) and per-family
/// amplitudes minimizing the worst C_min, keeping `mi_margin_cells` away from
/// MI in every requested L. Throws NoFeasiblePoint.
JointPump best_joint_pump(const ResonatorSpec& resonator, const std::vector<FamilyLabel>& families,
                          const std::vector<int>& pair_indices,
                          const std::vector<double>& delta_axis_hz,
                          const std::vector<double>& amplitude_axis,
                          const JointPumpOptions& options = {});

/// Same search over grids that were already swept; grids[f][l] belongs to
/// families[f] and pair_indices[l].
JointPump best_joint_pump(const std::vector<std::vector<SweepGrid>>& grids, double eps_ne,
                          int mi_margin_cells);

} // namespace qfc

#endif // QFC_PHASES_HPP
