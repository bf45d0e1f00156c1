#include "qfc/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "qfc/error.hpp"

namespace qfc::oracle {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

MeanFieldState add(const MeanFieldState& a, const MeanFieldState& b, double scale) {
    return {a.pump + scale * b.pump, a.minus + scale * b.minus, a.plus + scale * b.plus};
}

bool finite(const MeanFieldState& s) {
    auto ok = [](cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(s.pump) && ok(s.minus) && ok(s.plus);
}

double max_abs(const MeanFieldState& s) {
    return std::max({std::abs(s.pump), std::abs(s.minus), std::abs(s.plus)});
}

MeanFieldState rk4_step(const MeanFieldState& s, const NormalizedDrive& drive, double dt) {
    const MeanFieldState k1 = vector_field(s, drive);
    const MeanFieldState k2 = vector_field(add(s, k1, 0.5 * dt), drive);
    const MeanFieldState k3 = vector_field(add(s, k2, 0.5 * dt), drive);
    const MeanFieldState k4 = vector_field(add(s, k3, dt), drive);
    MeanFieldState out = s;
    out.pump += dt / 6.0 * (k1.pump + 2.0 * k2.pump + 2.0 * k3.pump + k4.pump);
    out.minus += dt / 6.0 * (k1.minus + 2.0 * k2.minus + 2.0 * k3.minus + k4.minus);
    out.plus += dt / 6.0 * (k1.plus + 2.0 * k2.plus + 2.0 * k3.plus + k4.plus);
    return out;
}

// Signal/idler part of the flow with the pump frozen at its mean value.
std::array<cd, 2> pair_field(cd pump, cd minus, cd plus, double dtl) {
    const double np = std::norm(pump);
    const double nm = std::norm(minus);
    const double nq = std::norm(plus);
    const cd fm = I * ((2.0 * np + nm + 2.0 * nq) * minus + pump * pump * std::conj(plus)) -
                  cd(1.0, dtl) * minus;
    const cd fq = I * ((2.0 * np + 2.0 * nm + nq) * plus + pump * pump * std::conj(minus)) -
                  cd(1.0, dtl) * plus;
    return {fm, fq};
}

Eigen::Matrix4cd fd_jacobian_at(const MeanFieldState& s, double theta_minus, double theta_plus,
                                double dtl, double h) {
    const cd rot_m = std::polar(1.0, theta_minus);
    const cd rot_q = std::polar(1.0, theta_plus);
    // g(eps) = rotated pair field with a_k = a_k0 + e^{i theta_k} eps_k.
    auto g = [&](cd eps_m, cd eps_q) {
        const auto f = pair_field(s.pump, s.minus + rot_m * eps_m, s.plus + rot_q * eps_q, dtl);
        return std::array<cd, 2>{std::conj(rot_m) * f[0], std::conj(rot_q) * f[1]};
    };
    // Wirtinger derivatives d/d eps and d/d eps* from real/imaginary differences.
    std::array<std::array<cd, 2>, 2> d_eps{};      // [output][variable]
    std::array<std::array<cd, 2>, 2> d_eps_conj{};
    for (int v = 0; v < 2; ++v) {
        const cd hr = h;
        const cd hi = I * h;
        auto shifted = [&](cd delta) { return v == 0 ? g(delta, 0.0) : g(0.0, delta); };
        const auto fr_p = shifted(hr);
        const auto fr_m = shifted(-hr);
        const auto fi_p = shifted(hi);
        const auto fi_m = shifted(-hi);
        for (int o = 0; o < 2; ++o) {
            const cd d_re = (fr_p[o] - fr_m[o]) / (2.0 * h);
            const cd d_im = (fi_p[o] - fi_m[o]) / (2.0 * h);
            d_eps[o][v] = 0.5 * (d_re - I * d_im);
            d_eps_conj[o][v] = 0.5 * (d_re + I * d_im);
        }
    }
    Eigen::Matrix4cd jac;
    for (int o = 0; o < 2; ++o) {
        const int row = 2 * o;
        for (int v = 0; v < 2; ++v) {
            const int col = 2 * v;
            jac(row, col) = d_eps[o][v];
            jac(row, col + 1) = d_eps_conj[o][v];
            jac(row + 1, col) = std::conj(d_eps_conj[o][v]);
            jac(row + 1, col + 1) = std::conj(d_eps[o][v]);
        }
    }
    return jac;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct BatchMoments {
    Eigen::Matrix4d intracavity = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d output = Eigen::Matrix4d::Zero();
};

} // namespace

MeanFieldState vector_field(const MeanFieldState& s, const NormalizedDrive& drive) {
    const double np = std::norm(s.pump);
    const double nm = std::norm(s.minus);
    const double nq = std::norm(s.plus);
    MeanFieldState f;
    f.pump = I * ((np + 2.0 * nm + 2.0 * nq) * s.pump + 2.0 * std::conj(s.pump) * s.minus * s.plus) -
             cd(1.0, drive.dtp) * s.pump + drive.f_norm;
    const auto pair = pair_field(s.pump, s.minus, s.plus, drive.dtl);
    f.minus = pair[0];
    f.plus = pair[1];
    return f;
}

Trajectory integrate_mean_field(const MeanFieldState& init, const NormalizedDrive& drive,
                                double t_end, double dt, int sample_every) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw Error(Errc::InvalidArgument, "dt and t_end must be > 0");
    const long steps = std::lround(std::ceil(t_end / dt));
    sample_every = std::max(1, sample_every);
    Trajectory traj;
    MeanFieldState s = init;
    traj.times.push_back(0.0);
    traj.states.push_back(s);
    for (long k = 1; k <= steps; ++k) {
        s = rk4_step(s, drive, dt);
        if (!finite(s) || max_abs(s) > 1e8) {
            throw Error(Errc::NonFinite, "mean-field integration blew up at t = " + std::to_string(k * dt));
        }
        if (k % sample_every == 0 || k == steps) {
            traj.times.push_back(k * dt);
            traj.states.push_back(s);
        }
    }
    return traj;
}

MeanFieldState amplitudes_of(const SteadyState& state) {
    const double theta_p = -state.psi;
    const double theta_pair = theta_p + 0.5 * state.phi;
    const double a = std::sqrt(std::max(state.a2, 0.0));
    return {std::polar(std::sqrt(state.ap2), theta_p), std::polar(a, theta_pair), std::polar(a, theta_pair)};
}

double steady_residual(const SteadyState& state, const NormalizedDrive& drive) {
    return max_abs(vector_field(amplitudes_of(state), drive));
}

Eigen::Matrix4cd fd_jacobian(const SteadyState& state, const NormalizedDrive& drive, double h) {
    if (!(h >= 1e-8 && h <= 1e-4)) throw Error(Errc::InvalidArgument, "h must lie in [1e-8, 1e-4]");
    const MeanFieldState s = amplitudes_of(state);
    const double theta_pair = -state.psi + 0.5 * state.phi;
    return fd_jacobian_at(s, theta_pair, theta_pair, drive.dtl, h);
}

CovarianceEstimate langevin_covariance(const NormalizedDrive& drive, const LangevinOptions& options) {
    if (options.n_samples < 1000) throw Error(Errc::InvalidArgument, "n_samples must be >= 1000");
    if (options.batches < 2 || options.n_samples % options.batches != 0) {
        throw Error(Errc::InvalidArgument, "n_samples must split evenly into >= 2 batches");
    }

    // Relax the classical flow from vacuum to its attractor.
    MeanFieldState s{};
    double t = 0.0;
    const double relax_dt = 0.01;
    while (max_abs(vector_field(s, drive)) > 1e-12) {
        s = rk4_step(s, drive, relax_dt);
        t += relax_dt;
        if (!finite(s) || t > 1e4) throw Error(Errc::Unstable, "mean field did not settle");
    }
    double theta_m = std::arg(s.pump);
    double theta_q = theta_m;
    if (std::abs(s.minus) > 1e-9) {
        theta_m = std::arg(s.minus);
        theta_q = std::arg(s.plus);
    }

    CovarianceEstimate est;
    est.drift = fd_jacobian_at(s, theta_m, theta_q, drive.dtl, 1e-6);
    const Eigen::ComplexEigenSolver<Eigen::Matrix4cd> eig(est.drift, false);
    double slowest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) slowest = std::min(slowest, -eig.eigenvalues()(k).real());
    if (!(slowest > 0.0)) throw Error(Errc::Unstable, "linearized fluctuations do not decay");

    const double dt = options.dt;
    const double burn = options.burn_in > 0.0 ? options.burn_in : 6.0 / slowest;
    const long burn_steps = std::lround(std::ceil(burn / dt));
    const long window_steps = std::max(1L, std::lround(std::ceil(options.window / dt)));
    const double window = window_steps * dt;
    const double t_in = std::sqrt(2.0 * options.coupling_fraction);
    const double t_loss = std::sqrt(2.0 * (1.0 - options.coupling_fraction));
    const double noise_sd = std::sqrt(dt / 4.0); // each real part; E|dW|^2 = dt/2
    const Eigen::Matrix4cd j = est.drift;
    const int per_batch = options.n_samples / options.batches;
    const double sqrt2 = std::numbers::sqrt2;

    std::vector<BatchMoments> batches(static_cast<std::size_t>(options.batches));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int b = next++; b < options.batches; b = next++) {
            std::mt19937_64 rng(splitmix64(options.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(b)));
            std::normal_distribution<double> normal(0.0, noise_sd);
            auto noise = [&]() { return cd(normal(rng), normal(rng)); };
            BatchMoments acc;
            for (int n = 0; n < per_batch; ++n) {
                cd bm = 0.0;
                cd bq = 0.0;
                Eigen::Matrix4d prod = Eigen::Matrix4d::Zero();
                cd zm = 0.0;
                cd zq = 0.0;
                for (long k = 0; k < burn_steps + window_steps; ++k) {
                    const cd win_m = noise();
                    const cd win_q = noise();
                    const cd loss_m = noise();
                    const cd loss_q = noise();
                    const bool sampling = k >= burn_steps;
                    if (sampling) {
                        zm += t_in * bm * dt - win_m;
                        zq += t_in * bq * dt - win_q;
                    }
                    const cd dm = j(0, 0) * bm + j(0, 1) * std::conj(bm) + j(0, 2) * bq + j(0, 3) * std::conj(bq);
                    const cd dq = j(2, 0) * bm + j(2, 1) * std::conj(bm) + j(2, 2) * bq + j(2, 3) * std::conj(bq);
                    bm += dm * dt + t_in * win_m + t_loss * loss_m;
                    bq += dq * dt + t_in * win_q + t_loss * loss_q;
                    if (sampling) {
                        const Eigen::Vector4d x(sqrt2 * bm.real(), sqrt2 * bm.imag(), sqrt2 * bq.real(),
                                                sqrt2 * bq.imag());
                        prod.noalias() += x * x.transpose();
                    }
                }
                acc.intracavity += prod / static_cast<double>(window_steps);
                const Eigen::Vector4d z = sqrt2 / std::sqrt(window) *
                                          Eigen::Vector4d(zm.real(), zm.imag(), zq.real(), zq.imag());
                acc.output.noalias() += z * z.transpose();
            }
            acc.intracavity /= per_batch;
            acc.output /= per_batch;
            batches[static_cast<std::size_t>(b)] = acc;
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                               static_cast<unsigned>(options.batches)));
    {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    }

    // Batches are combined in index order, so the result does not depend on scheduling.
    const double nb = static_cast<double>(options.batches);
    for (const auto& b : batches) {
        est.intracavity += b.intracavity / nb;
        est.output += b.output / nb;
    }
    for (const auto& b : batches) {
        est.intracavity_se += (b.intracavity - est.intracavity).cwiseAbs2();
        est.output_se += (b.output - est.output).cwiseAbs2();
    }
    est.intracavity_se = (est.intracavity_se / (nb * (nb - 1.0))).cwiseSqrt();
    est.output_se = (est.output_se / (nb * (nb - 1.0))).cwiseSqrt();
    return est;
}

BruteDuan brute_force_duan(const Eigen::Matrix4d& sigma, int grid_n) {
    if (grid_n < 64) throw Error(Errc::InvalidArgument, "grid_n must be >= 64");
    const double step = 2.0 * std::numbers::pi / grid_n;
    std::vector<double> c(static_cast<std::size_t>(grid_n));
    std::vector<double> s(static_cast<std::size_t>(grid_n));
    for (int k = 0; k < grid_n; ++k) {
        c[k] = std::cos(k * step);
        s[k] = std::sin(k * step);
    }
    // Var(a X_- + b Y_-) and Var(a X_+ + b Y_+) as quadratic forms in (a, b).
    const double xm_xm = 0.5 * (sigma(0, 0) + sigma(2, 2) - 2.0 * sigma(0, 2));
    const double ym_ym = 0.5 * (sigma(1, 1) + sigma(3, 3) - 2.0 * sigma(1, 3));
    const double xm_ym = 0.5 * (sigma(0, 1) - sigma(0, 3) - sigma(2, 1) + sigma(2, 3));
    const double xp_xp = 0.5 * (sigma(0, 0) + sigma(2, 2) + 2.0 * sigma(0, 2));
    const double yp_yp = 0.5 * (sigma(1, 1) + sigma(3, 3) + 2.0 * sigma(1, 3));
    const double xp_yp = 0.5 * (sigma(0, 1) + sigma(0, 3) + sigma(2, 1) + sigma(2, 3));

    BruteDuan best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (int a = 0; a < grid_n; ++a) {
        // Y_+^rot = cos(tp) Y_+ + sin(tp) X_+
        const double var_y = c[a] * c[a] * yp_yp + s[a] * s[a] * xp_xp + 2.0 * c[a] * s[a] * xp_yp;
        for (int b = 0; b < grid_n; ++b) {
            // X_-^rot = cos(tm) X_- - sin(tm) Y_-
            const double var_x = c[b] * c[b] * xm_xm + s[b] * s[b] * ym_ym - 2.0 * c[b] * s[b] * xm_ym;
            const double g = std::abs(c[a] * c[b] + s[a] * s[b]);
            const double v = var_x + var_y - g;
            if (v < best.c_min) best = {v, a * step, b * step};
        }
    }
    return best;
}

} // namespace qfc::oracle
