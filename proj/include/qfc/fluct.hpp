#ifndef QFC_FLUCT_HPP
#define QFC_FLUCT_HPP

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qfc/error.hpp"
#include "qfc/steady.hpp"

namespace qfc {

template <typename Real>
using Matrix4c = Eigen::Matrix<std::complex<Real>, 4, 4>;
template <typename Real>
using Matrix4r = Eigen::Matrix<Real, 4, 4>;

// Linearized signal/idler fluctuations in the basis
// (da_-, da_-^dag, da_+, da_+^dag), each rotated by its mean-field phase.
// Time is in units of 1/Gamma; the coupling matrices are multiples of I.
template <typename Real>
struct FluctuationSystem {
    Matrix4c<Real> m = Matrix4c<Real>::Zero();
    Real t_in = 0;   // sqrt(2 gamma / Gamma)
    Real t_loss = 0; // sqrt(2 mu / Gamma)
    Real t_out = 0;  // sqrt(2 gamma / Gamma)
};

template <typename Real>
struct NoiseSpectrum {
    Real omega = 0;
    Matrix4c<Real> s = Matrix4c<Real>::Zero();     // S(omega)
    Matrix4c<Real> s_neg = Matrix4c<Real>::Zero(); // S(-omega)
};

/// Vacuum input correlations <dA(w) dA^T(-w)>: only <a a^dag> = 1 survives.
template <typename Real>
Matrix4c<Real> vacuum_correlation() {
    Matrix4c<Real> c = Matrix4c<Real>::Zero();
    c(0, 1) = 1;
    c(2, 3) = 1;
    return c;
}

/// Maps (a_-, a_-^dag, a_+, a_+^dag) to quadratures (X1, Y1, X2, Y2) with
/// X = (a + a^dag)/sqrt2 and Y = -i (a - a^dag)/sqrt2. Unitary.
template <typename Real>
Matrix4c<Real> quadrature_map() {
    using C = std::complex<Real>;
    const Real h = Real(1) / std::sqrt(Real(2));
    const C i(0, 1);
    Matrix4c<Real> u = Matrix4c<Real>::Zero();
    u(0, 0) = h;      u(0, 1) = h;
    u(1, 0) = -i * h; u(1, 1) = i * h;
    u(2, 2) = h;      u(2, 3) = h;
    u(3, 2) = -i * h; u(3, 3) = i * h;
    return u;
}

/// Linearization around `state` with the pump held classical. coupling_fraction
/// is gamma / Gamma.
template <typename Real = double>
FluctuationSystem<Real> build_m(const SteadyState& state, Real dtl, Real coupling_fraction) {
    using C = std::complex<Real>;
    const C i(0, 1);
    const Real ap2 = static_cast<Real>(state.ap2);
    const Real a2 = static_cast<Real>(state.a2);
    const C pump_pair = ap2 * std::exp(-i * static_cast<Real>(state.phi));

    const C diag = C(-1, 0) + i * (Real(2) * ap2 + Real(4) * a2 - dtl);
    const C self = i * a2;
    const C cross = Real(2) * i * a2;
    const C pair = i * (Real(2) * a2 + pump_pair);

    FluctuationSystem<Real> sys;
    auto& m = sys.m;
    // Row blocks for -L; +L follows by the -L <-> +L exchange.
    m(0, 0) = diag;             m(0, 1) = self;             m(0, 2) = cross;            m(0, 3) = pair;
    m(1, 0) = std::conj(self);  m(1, 1) = std::conj(diag);  m(1, 2) = std::conj(pair);  m(1, 3) = std::conj(cross);
    m(2, 0) = cross;            m(2, 1) = pair;             m(2, 2) = diag;             m(2, 3) = self;
    m(3, 0) = std::conj(pair);  m(3, 1) = std::conj(cross); m(3, 2) = std::conj(self);  m(3, 3) = std::conj(diag);

    sys.t_in = std::sqrt(Real(2) * coupling_fraction);
    sys.t_loss = std::sqrt(Real(2) * (Real(1) - coupling_fraction));
    sys.t_out = sys.t_in;
    return sys;
}

template <typename Real>
Real max_real_eigenvalue(const Matrix4c<Real>& m) {
    const Eigen::ComplexEigenSolver<Matrix4c<Real>> solver(m, false);
    Real best = -std::numeric_limits<Real>::infinity();
    for (int k = 0; k < 4; ++k) best = std::max(best, solver.eigenvalues()(k).real());
    return best;
}

namespace detail {

template <typename Real>
Matrix4c<Real> output_spectrum(const FluctuationSystem<Real>& sys, Real omega) {
    using C = std::complex<Real>;
    const Matrix4c<Real> id = Matrix4c<Real>::Identity();
    auto resolvent = [&](Real w) {
        const Matrix4c<Real> a = C(0, w) * id - sys.m;
        const Eigen::FullPivLU<Matrix4c<Real>> lu(a);
        if (!lu.isInvertible() || lu.rcond() < Real(1e-13)) {
            throw Error(Errc::SingularResolvent, "i omega - M is singular");
        }
        return Matrix4c<Real>(lu.inverse());
    };
    const Matrix4c<Real> r_pos = resolvent(omega);
    const Matrix4c<Real> r_neg = resolvent(-omega);
    const Matrix4c<Real> g_in_pos = sys.t_out * sys.t_in * r_pos - id;
    const Matrix4c<Real> g_in_neg = sys.t_out * sys.t_in * r_neg - id;
    const Matrix4c<Real> g_loss_pos = sys.t_out * sys.t_loss * r_pos;
    const Matrix4c<Real> g_loss_neg = sys.t_out * sys.t_loss * r_neg;
    const Matrix4c<Real> c = vacuum_correlation<Real>();
    return g_in_pos * c * g_in_neg.transpose() + g_loss_pos * c * g_loss_neg.transpose();
}

} // namespace detail

/// Output spectral noise density at +omega and -omega (omega in units of Gamma).
template <typename Real>
NoiseSpectrum<Real> noise_spectrum(const FluctuationSystem<Real>& sys, Real omega) {
    NoiseSpectrum<Real> out;
    out.omega = omega;
    out.s = detail::output_spectrum(sys, omega);
    out.s_neg = omega == Real(0) ? out.s : detail::output_spectrum(sys, -omega);
    return out;
}

/// Drift of the quadrature vector (X1, Y1, X2, Y2): U M U^dag, real by the
/// conjugation symmetry of M.
template <typename Real>
Matrix4r<Real> quadrature_drift(const FluctuationSystem<Real>& sys) {
    const Matrix4c<Real> u = quadrature_map<Real>();
    return (u * sys.m * u.adjoint()).real();
}

/// Stationary symmetrized intracavity quadrature covariance, solving
/// R S + S R^T + D = 0 with vacuum inputs (D = (t_in^2 + t_loss^2)/2 I).
/// Throws UnstableState when M is not Hurwitz.
template <typename Real>
Matrix4r<Real> intracavity_covariance(const FluctuationSystem<Real>& sys) {
    if (!(max_real_eigenvalue(sys.m) < Real(0))) {
        throw Error(Errc::UnstableState, "fluctuation matrix has a non-decaying mode");
    }
    const Matrix4r<Real> r = quadrature_drift(sys);
    const Real d = (sys.t_in * sys.t_in + sys.t_loss * sys.t_loss) / Real(2);
    using Mat16 = Eigen::Matrix<Real, 16, 16>;
    Mat16 k = Mat16::Zero();
    const Matrix4r<Real> id = Matrix4r<Real>::Identity();
    // Column-major vec: vec(R S) = (I (x) R) vec S, vec(S R^T) = (R (x) I) vec S.
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            k.template block<4, 4>(4 * a, 4 * b) = id(a, b) * r + r(a, b) * id;
        }
    }
    Eigen::Matrix<Real, 16, 1> rhs;
    for (int c = 0; c < 4; ++c) {
        for (int rr = 0; rr < 4; ++rr) rhs(4 * c + rr) = rr == c ? -d : Real(0);
    }
    const Eigen::Matrix<Real, 16, 1> v = k.fullPivLu().solve(rhs);
    Matrix4r<Real> sigma;
    for (int c = 0; c < 4; ++c) {
        for (int rr = 0; rr < 4; ++rr) sigma(rr, c) = v(4 * c + rr);
    }
    return Real(0.5) * (sigma + sigma.transpose());
}

/// <da_-^dag da_-> of the intracavity signal mode.
template <typename Real>
Real intracavity_pair_photons(const FluctuationSystem<Real>& sys) {
    const Matrix4r<Real> sigma = intracavity_covariance(sys);
    return (sigma(0, 0) + sigma(1, 1) - Real(1)) / Real(2);
}

} // namespace qfc

#endif // QFC_FLUCT_HPP
