#ifndef QFC_STEADY_HPP
#define QFC_STEADY_HPP

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qfc {

enum class Branch { PumpOnly, Parametric };

// Normalized mean-field steady state of one pump / signal-idler triple.
// ap2 = A_p^2, a2 = A^2 (A_-L = A_+L = A), phi = theta_- + theta_+ - 2 theta_p,
// psi = theta_in - theta_p. Below threshold phi is undefined and stored as 0.
struct SteadyState {
    double ap2 = 0.0;
    double a2 = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    Branch branch = Branch::PumpOnly;
    bool stable = false;
    bool phi_defined = false;
    double growth_rate = 0.0; // largest real part of the linearization behind `stable`
};

struct ThresholdReport {
    double f_threshold = 0.0;
    bool exists = false;
};

struct SolverOptions {
    int scan_points = 2048;
    double step_tolerance = 1e-12;
    double residual_tolerance = 1e-9;
    int max_iterations = 100;
};

/// Real nonnegative roots x = A_p^2 of F^2 = x (1 + (dtp - x)^2), ascending.
std::vector<SteadyState> pump_only_branches(double f_norm, double dtp);

/// Signal/idler-carrying solutions (A^2 > 0) at drive f_norm. Throws NoConvergence.
std::vector<SteadyState> parametric_branch(double f_norm, double dtp, double dtl,
                                           const SolverOptions& options = {});

/// Smallest drive admitting a parametric solution; exists = false when none
/// is found below f_max.
ThresholdReport threshold(double dtp, double dtl, double f_max = 100.0,
                          const SolverOptions& options = {});

/// Residual of the pump-only cubic, F^2 - x (1 + (dtp - x)^2).
double pump_only_residual(const SteadyState& state, double f_norm, double dtp);

/// Residuals of the two amplitude equations of the parametric branch.
std::array<double, 2> parametric_residual(const SteadyState& state, double f_norm, double dtp,
                                          double dtl);

using Matrix6c = Eigen::Matrix<std::complex<double>, 6, 6>;

/// Complex mean-field amplitudes (pump, -L, +L) in the frame where the input
/// field is real; the -L/+L phase split is chosen symmetric.
std::array<std::complex<double>, 3> mean_field_amplitudes(const SteadyState& state);

/// Linearization of the full three-mode mean-field flow in the basis
/// (a_p, a_p*, a_-, a_-*, a_+, a_+*).
Matrix6c mean_field_jacobian(const SteadyState& state, double dtp, double dtl);

/// Largest real part of mean_field_jacobian, ignoring the neutral mode of the
/// signal/idler phase difference on the parametric branch.
double growth_rate(const SteadyState& state, double dtp, double dtl);

} // namespace qfc

#endif // QFC_STEADY_HPP
