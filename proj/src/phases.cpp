#include "qfc/phases.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "qfc/duan.hpp"
#include "qfc/error.hpp"
#include "qfc/fluct.hpp"

namespace qfc {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw Error(Errc::InvalidArgument, std::string(name) + " axis is empty");
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1])) {
            throw Error(Errc::InvalidArgument, std::string(name) + " axis is not increasing");
        }
    }
}

// Runs job(i) for i in [0, n) on `workers` threads. Each index writes only its
// own slot, so the result is independent of scheduling.
template <typename Job>
void parallel_for(std::size_t n, int workers, Job&& job) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) job(i);
        });
    }
}

bool near_mi(const SweepGrid& grid, std::size_t ia, std::size_t id, int margin) {
    const auto na = static_cast<long>(grid.amplitude_axis.size());
    const auto nd = static_cast<long>(grid.delta_axis_hz.size());
    for (long a = static_cast<long>(ia) - margin; a <= static_cast<long>(ia) + margin; ++a) {
        for (long d = static_cast<long>(id) - margin; d <= static_cast<long>(id) + margin; ++d) {
            if (a < 0 || d < 0 || a >= na || d >= nd) continue;
            const PhasePoint& p = grid.at(static_cast<std::size_t>(a), static_cast<std::size_t>(d));
            if (p.phase == Phase::MI || p.failed) return true;
        }
    }
    return false;
}

} // namespace

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::NE: return "NE";
        case Phase::ET: return "ET";
        case Phase::MI: return "MI";
    }
    return "?";
}

PhasePoint classify_normalized(const NormalizedDrive& drive, double coupling_fraction,
                               const ClassifyOptions& options) {
    PhasePoint out;
    out.c_min = nan;
    out.max_eig_re = nan;

    const std::vector<SteadyState> pumps = pump_only_branches(drive.f_norm, drive.dtp);
    out.n_branches = static_cast<int>(pumps.size());
    if (drive.f_norm > 0.0) {
        out.n_parametric =
            static_cast<int>(parametric_branch(drive.f_norm, drive.dtp, drive.dtl, options.solver).size());
    }

    const FluctuationSystem<double> sys = build_m<double>(pumps.front(), drive.dtl, coupling_fraction);
    out.max_eig_re = max_real_eigenvalue(sys.m);
    if (out.n_branches > 1 || out.n_parametric > 0 || out.max_eig_re >= 0.0) {
        out.phase = Phase::MI;
        return out;
    }

    const Matrix4r<double> sigma = quadrature_covariance(noise_spectrum(sys, options.omega));
    out.c_min = minimize_duan(sigma).c_min;
    out.phase = out.c_min < -options.eps_ne ? Phase::ET : Phase::NE;
    return out;
}

PhasePoint classify_point(const OperatingPoint& op, const ResonatorSpec& resonator,
                          const ClassifyOptions& options) {
    PhasePoint out;
    try {
        const NormalizedDrive drive = normalize(op, resonator, options.normalize);
        out = classify_normalized(drive, damping_rates(resonator.family(op.family)).coupling_fraction(),
                                  options);
    } catch (const Error& e) {
        out = PhasePoint{};
        out.phase = Phase::MI;
        out.c_min = nan;
        out.max_eig_re = nan;
        out.failed = true;
        out.error = e.what();
    }
    out.delta_p0_hz = op.delta_p0_hz;
    out.a_pin = op.a_pin;
    return out;
}

std::size_t SweepGrid::count(Phase phase) const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(),
                                                  [&](const PhasePoint& p) { return p.phase == phase; }));
}

std::vector<double> linear_axis(double lo, double hi, int n) {
    if (n < 1) throw Error(Errc::InvalidArgument, "axis needs at least one point");
    std::vector<double> axis(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        axis[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    return axis;
}

std::vector<SweepGrid> sweep(const ResonatorSpec& resonator, FamilyLabel family,
                             const std::vector<int>& pair_indices,
                             const std::vector<double>& delta_axis_hz,
                             const std::vector<double>& amplitude_axis,
                             const ClassifyOptions& options, int workers) {
    check_axis(delta_axis_hz, "detuning");
    check_axis(amplitude_axis, "amplitude");
    if (pair_indices.empty()) throw Error(Errc::InvalidArgument, "no pair index requested");
    resonator.family(family);

    const std::size_t cells = delta_axis_hz.size() * amplitude_axis.size();
    std::vector<SweepGrid> grids(pair_indices.size());
    for (std::size_t k = 0; k < grids.size(); ++k) {
        grids[k].family = family;
        grids[k].pair_index = pair_indices[k];
        grids[k].delta_axis_hz = delta_axis_hz;
        grids[k].amplitude_axis = amplitude_axis;
        grids[k].points.resize(cells);
    }

    parallel_for(cells * grids.size(), workers, [&](std::size_t job) {
        const std::size_t k = job / cells;
        const std::size_t cell = job % cells;
        OperatingPoint op;
        op.family = family;
        op.pair_index = pair_indices[k];
        op.delta_p0_hz = delta_axis_hz[cell % delta_axis_hz.size()];
        op.a_pin = amplitude_axis[cell / delta_axis_hz.size()];
        grids[k].points[cell] = classify_point(op, resonator, options);
    });
    return grids;
}

JointPump best_joint_pump(const std::vector<std::vector<SweepGrid>>& grids, double eps_ne,
                          int mi_margin_cells) {
    if (grids.empty() || grids.front().empty()) {
        throw Error(Errc::InvalidArgument, "no grids to search");
    }
    const SweepGrid& ref = grids.front().front();
    const std::size_t nd = ref.delta_axis_hz.size();
    const std::size_t na = ref.amplitude_axis.size();
    for (const auto& per_family : grids) {
        for (const SweepGrid& g : per_family) {
            if (g.delta_axis_hz != ref.delta_axis_hz || g.amplitude_axis != ref.amplitude_axis) {
                throw Error(Errc::InvalidArgument, "joint pump search needs shared axes");
            }
        }
    }

    constexpr double inf = std::numeric_limits<double>::infinity();
    JointPump best;
    best.worst_c_min = inf;
    for (std::size_t id = 0; id < nd; ++id) {
        JointPump candidate;
        candidate.delta_p0_hz = ref.delta_axis_hz[id];
        candidate.worst_c_min = -inf;
        bool feasible = true;
        for (const auto& per_family : grids) {
            FamilyPump pick{per_family.front().family, 0.0, inf};
            for (std::size_t ia = 0; ia < na; ++ia) {
                double worst = -inf;
                bool usable = true;
                for (const SweepGrid& g : per_family) {
                    if (near_mi(g, ia, id, mi_margin_cells)) {
                        usable = false;
                        break;
                    }
                    worst = std::max(worst, g.at(ia, id).c_min);
                }
                if (usable && worst < pick.worst_c_min) {
                    pick.a_pin = ref.amplitude_axis[ia];
                    pick.worst_c_min = worst;
                }
            }
            if (!(pick.worst_c_min < -eps_ne)) {
                feasible = false;
                break;
            }
            candidate.worst_c_min = std::max(candidate.worst_c_min, pick.worst_c_min);
            candidate.families.push_back(pick);
        }
        if (feasible && candidate.worst_c_min < best.worst_c_min) best = candidate;
    }
    if (best.families.empty()) {
        throw Error(Errc::NoFeasiblePoint, "every candidate detuning is MI or NE for some family");
    }
    return best;
}

JointPump best_joint_pump(const ResonatorSpec& resonator, const std::vector<FamilyLabel>& families,
                          const std::vector<int>& pair_indices,
                          const std::vector<double>& delta_axis_hz,
                          const std::vector<double>& amplitude_axis,
                          const JointPumpOptions& options) {
    if (families.empty()) throw Error(Errc::InvalidArgument, "no family requested");
    std::vector<std::vector<SweepGrid>> grids;
    for (FamilyLabel label : families) {
        grids.push_back(sweep(resonator, label, pair_indices, delta_axis_hz, amplitude_axis,
                              options.classify, options.workers));
    }
    return best_joint_pump(grids, options.classify.eps_ne, options.mi_margin_cells);
}

} // namespace qfc
