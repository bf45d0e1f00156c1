#ifndef QFC_ORACLE_HPP
#define QFC_ORACLE_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qfc/model.hpp"
#include "qfc/steady.hpp"

// Verification engines. Nothing here calls into the steady/fluct/duan
// numerics; only the plain domain structs are shared.
namespace qfc::oracle {

struct MeanFieldState {
    std::complex<double> pump;
    std::complex<double> minus;
    std::complex<double> plus;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<MeanFieldState> states;
};

/// Noise-free three-mode flow in normalized units, real drive F on the pump.
MeanFieldState vector_field(const MeanFieldState& s, const NormalizedDrive& drive);

/// Fixed-step RK4 from `init` to t_end; keeps every `sample_every`-th step.
/// Throws NonFinite on blow-up.
Trajectory integrate_mean_field(const MeanFieldState& init, const NormalizedDrive& drive,
                                double t_end, double dt, int sample_every = 1);

/// Amplitudes encoded by a steady state (input phase zero, symmetric pair phases).
MeanFieldState amplitudes_of(const SteadyState& state);

/// Largest |component| of the vector field evaluated at the steady state.
double steady_residual(const SteadyState& state, const NormalizedDrive& drive);

/// Central-difference Jacobian of the signal/idler flow (pump frozen) in the
/// phase-rotated basis (da_-, da_-^dag, da_+, da_+^dag). h in [1e-8, 1e-4].
Eigen::Matrix4cd fd_jacobian(const SteadyState& state, const NormalizedDrive& drive, double h);

struct LangevinOptions {
    int n_samples = 10000;     // trajectories
    int batches = 50;          // batch means for standard errors
    double dt = 2e-3;
    double burn_in = 0.0;      // <= 0 picks 6 / slowest decay rate
    double window = 10.0;      // averaging window after burn-in
    std::uint64_t seed = 1;
    double coupling_fraction = 0.55; // gamma / Gamma
};

struct CovarianceEstimate {
    Eigen::Matrix4d intracavity = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d intracavity_se = Eigen::Matrix4d::Zero();
    // Window-averaged output quadratures; tends to the omega = 0 spectrum only
    // as window * (slowest decay rate) grows.
    Eigen::Matrix4d output = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d output_se = Eigen::Matrix4d::Zero();
    Eigen::Matrix4cd drift = Eigen::Matrix4cd::Zero();   // linearized generator used
};

/// Euler-Maruyama ensemble of the linearized fluctuations around the mean-field
/// state reached by relaxing from vacuum. Covariances are over (X1, Y1, X2, Y2).
/// Throws Unstable when the linearization has a non-decaying mode.
CovarianceEstimate langevin_covariance(const NormalizedDrive& drive, const LangevinOptions& options);

struct BruteDuan {
    double c_min = 0.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
};

/// Exhaustive minimum of the rotated Duan combination on a grid_n x grid_n grid.
BruteDuan brute_force_duan(const Eigen::Matrix4d& sigma, int grid_n);

} // namespace qfc::oracle

#endif // QFC_ORACLE_HPP
