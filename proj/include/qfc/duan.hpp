#ifndef QFC_DUAN_HPP
#define QFC_DUAN_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qfc/fluct.hpp"

namespace qfc {

template <typename Real>
struct DuanResult {
    Real c_min = 0;
    Real theta_plus = 0;  // [0, 2 pi)
    Real theta_minus = 0; // [0, 2 pi)
    bool entangled = false;
};

/// Symmetrized quadrature covariance over (X1, Y1, X2, Y2) of an output
/// spectrum: Re of 1/2 (S_Q(w) + S_Q(-w)^T) with S_Q = U S U^T. Throws
/// NotSymmetric when S_Q(w) is not Hermitian to 1e-6.
template <typename Real>
Matrix4r<Real> quadrature_covariance(const NoiseSpectrum<Real>& spec) {
    const Matrix4c<Real> u = quadrature_map<Real>();
    const Matrix4c<Real> sq_pos = u * spec.s * u.transpose();
    const Matrix4c<Real> sq_neg = u * spec.s_neg * u.transpose();
    const Real scale = std::max(Real(1), sq_pos.cwiseAbs().maxCoeff());
    if ((sq_pos - sq_pos.adjoint()).cwiseAbs().maxCoeff() > Real(1e-6) * scale) {
        throw Error(Errc::NotSymmetric, "quadrature spectrum is not Hermitian");
    }
    const Matrix4c<Real> sym = Real(0.5) * (sq_pos + sq_neg.transpose());
    const Matrix4r<Real> sigma = sym.real();
    return Real(0.5) * (sigma + sigma.transpose());
}

namespace detail {

// Rotated-quadrature coefficient vectors over (X1, Y1, X2, Y2).
template <typename Real>
Eigen::Matrix<Real, 4, 1> rotated_x_minus(Real theta_minus) {
    const Real h = Real(1) / std::sqrt(Real(2));
    const Real c = std::cos(theta_minus);
    const Real s = std::sin(theta_minus);
    // X_-^rot = -sin * Y_- + cos * X_-, with X_- = (X1 - X2)/sqrt2 and Y_- = (Y1 - Y2)/sqrt2.
    return Eigen::Matrix<Real, 4, 1>(c * h, -s * h, -c * h, s * h);
}

template <typename Real>
Eigen::Matrix<Real, 4, 1> rotated_y_plus(Real theta_plus) {
    const Real h = Real(1) / std::sqrt(Real(2));
    const Real c = std::cos(theta_plus);
    const Real s = std::sin(theta_plus);
    // Y_+^rot = cos * Y_+ + sin * X_+.
    return Eigen::Matrix<Real, 4, 1>(s * h, c * h, s * h, c * h);
}

template <typename Real>
Real wrap_angle(Real theta) {
    const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
    theta = std::fmod(theta, two_pi);
    return theta < Real(0) ? theta + two_pi : theta;
}

} // namespace detail

/// C = Var(X_-^rot) + Var(Y_+^rot) - |cos(theta_+ - theta_-)|.
template <typename Real>
Real duan_value(const Matrix4r<Real>& sigma, Real theta_plus, Real theta_minus) {
    const auto wm = detail::rotated_x_minus(theta_minus);
    const auto wp = detail::rotated_y_plus(theta_plus);
    return wm.dot(sigma * wm) + wp.dot(sigma * wp) - std::abs(std::cos(theta_plus - theta_minus));
}

/// Minimizes duan_value over both angles: 64 x 64 coarse grid, then a
/// shrinking-step coordinate descent from the best few grid cells.
template <typename Real>
DuanResult<Real> minimize_duan(const Matrix4r<Real>& sigma) {
    constexpr int coarse = 64;
    constexpr int seeds = 4;
    const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
    const Real cell = two_pi / coarse;

    struct Candidate {
        Real value;
        Real tp;
        Real tm;
    };
    std::array<Candidate, seeds> best;
    best.fill({std::numeric_limits<Real>::infinity(), 0, 0});
    for (int a = 0; a < coarse; ++a) {
        for (int b = 0; b < coarse; ++b) {
            const Real tp = cell * a;
            const Real tm = cell * b;
            const Real v = duan_value(sigma, tp, tm);
            if (v < best[seeds - 1].value) {
                int k = seeds - 1;
                while (k > 0 && best[k - 1].value > v) {
                    best[k] = best[k - 1];
                    --k;
                }
                best[k] = {v, tp, tm};
            }
        }
    }

    Candidate winner = best[0];
    for (const Candidate& start : best) {
        Candidate cur = start;
        Real step = cell;
        while (step >= Real(1e-7)) {
            bool moved = false;
            for (const auto& [dp, dm] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1},
                                        std::pair{1, 1}, std::pair{-1, -1}, std::pair{1, -1}, std::pair{-1, 1}}) {
                const Real tp = cur.tp + dp * step;
                const Real tm = cur.tm + dm * step;
                const Real v = duan_value(sigma, tp, tm);
                if (v < cur.value) {
                    cur = {v, tp, tm};
                    moved = true;
                    break;
                }
            }
            if (!moved) step *= Real(0.5);
        }
        if (cur.value < winner.value) winner = cur;
    }

    DuanResult<Real> out;
    out.c_min = winner.value;
    out.theta_plus = detail::wrap_angle(winner.tp);
    out.theta_minus = detail::wrap_angle(winner.tm);
    // Vacuum lands a few ulps below zero; that is not entanglement.
    out.entangled = out.c_min < -Real(1e-12);
    return out;
}

} // namespace qfc

#endif // QFC_DUAN_HPP
