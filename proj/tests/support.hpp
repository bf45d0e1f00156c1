#ifndef QFC_TESTS_SUPPORT_HPP
#define QFC_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qfc/config.hpp"

namespace qfc::test {

inline const Config& default_config() {
    static const Config config = load_config(QFC_DEFAULT_CONFIG);
    return config;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// Random symmetric covariance of a physical two-mode Gaussian state:
// sigma = S S^T / 2 with S a product of random squeezers and rotations,
// plus a nonnegative thermal part.
template <typename Rng>
Eigen::Matrix4d random_physical_covariance(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto rotation = [&](int a, int b) {
        // Passive beam splitter / phase shifter acting on modes a and b (0 or 1).
        const double t = 2.0 * std::acos(-1.0) * u(rng);
        Eigen::Matrix4d r = Eigen::Matrix4d::Identity();
        if (a == b) {
            const int i = 2 * a;
            r(i, i) = std::cos(t);  r(i, i + 1) = -std::sin(t);
            r(i + 1, i) = std::sin(t); r(i + 1, i + 1) = std::cos(t);
        } else {
            for (int q = 0; q < 2; ++q) {
                r(q, q) = std::cos(t);  r(q, 2 + q) = -std::sin(t);
                r(2 + q, q) = std::sin(t); r(2 + q, 2 + q) = std::cos(t);
            }
        }
        return r;
    };
    auto squeezer = [&]() {
        const double s1 = 1.5 * (2.0 * u(rng) - 1.0);
        const double s2 = 1.5 * (2.0 * u(rng) - 1.0);
        Eigen::Vector4d d(std::exp(s1), std::exp(-s1), std::exp(s2), std::exp(-s2));
        return Eigen::Matrix4d(d.asDiagonal());
    };
    const Eigen::Matrix4d s = rotation(0, 1) * rotation(0, 0) * rotation(1, 1) * squeezer()
                              * rotation(0, 1) * rotation(0, 0) * squeezer();
    Eigen::Matrix4d sigma = 0.5 * s * s.transpose();
    const double thermal = 0.3 * u(rng);
    sigma += thermal * Eigen::Matrix4d::Identity();
    return 0.5 * (sigma + sigma.transpose());
}

} // namespace qfc::test

#endif // QFC_TESTS_SUPPORT_HPP
