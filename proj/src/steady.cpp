#include "qfc/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qfc/error.hpp"

namespace qfc {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double cubic_value(double x, double f2, double dtp) {
    const double u = dtp - x;
    return x * (1.0 + u * u) - f2;
}

// d/dx of x (1 + (dtp - x)^2)
double cubic_slope(double x, double dtp) {
    return 1.0 + dtp * dtp - 4.0 * dtp * x + 3.0 * x * x;
}

// Newton polish of a closed-form root. Where the slope nearly vanishes (close
// to the triple root) the residual is rounding noise and a free step would
// scatter the roots, so there only ulp-sized nudges are allowed.
double polish_cubic(double x, double f2, double dtp) {
    double g = cubic_value(x, f2, dtp);
    for (int it = 0; it < 50 && g != 0.0; ++it) {
        const double s = cubic_slope(x, dtp);
        if (s == 0.0) break;
        const double step = g / s;
        if (std::abs(s) < 1e-6 && std::abs(step) > 1e-9 * std::max(1.0, std::abs(x))) break;
        const double g_next = cubic_value(x - step, f2, dtp);
        if (!(std::abs(g_next) < std::abs(g))) break;
        x -= step;
        g = g_next;
    }
    return x;
}

// Pump 2x2 block: lambda = -1 + Re sqrt(x^2 - (dtp - 2x)^2).
double pump_growth_rate(double x, double dtp) {
    const double detune = dtp - 2.0 * x;
    const double disc = x * x - detune * detune;
    return disc > 0.0 ? -1.0 + std::sqrt(disc) : -1.0;
}

// Parametric curve parameterized by phi in (0, pi): sin(phi) = 1/x and
// cos(phi) = (dtl - 2x - 3y) / x.
struct CurvePoint {
    double x;
    double y;
};

CurvePoint curve_point(double phi, double dtl) {
    const double s = std::sin(phi);
    const double x = 1.0 / s;
    const double y = (dtl - 2.0 * x - std::cos(phi) / s) / 3.0;
    return {x, y};
}

double drive_squared(double x, double y, double dtp, double dtl) {
    const double r = 2.0 * y / x;
    const double re = 1.0 + r;
    const double im = dtp - x - r * (dtl - 3.0 * y);
    return x * (re * re + im * im);
}

// h(phi) = (2 + cos phi) / sin phi is the dtl at which y = 0; its minimum is
// sqrt(3) at phi = 2 pi / 3.
double curve_edge(double phi) { return (2.0 + std::cos(phi)) / std::sin(phi); }

double bisect_edge(double dtl, double lo, double hi, bool decreasing) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool above = curve_edge(mid) > dtl;
        if (above == decreasing) lo = mid; else hi = mid;
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

struct ValidInterval {
    bool exists = false;
    double lo = 0.0;
    double hi = 0.0;
};

ValidInterval valid_interval(double dtl) {
    const double apex = 2.0 * kPi / 3.0;
    if (!(dtl > curve_edge(apex))) return {};
    return {true, bisect_edge(dtl, 1e-12, apex, true), bisect_edge(dtl, apex, kPi - 1e-12, false)};
}

double golden_min(auto&& fn, double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    while (std::abs(b - a) > tol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a); fc = fn(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a); fd = fn(d);
        }
    }
    return 0.5 * (a + b);
}

double bisect_root(auto&& fn, double a, double b) {
    double fa = fn(a);
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = fn(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) { a = m; fa = fm; } else { b = m; }
        if (b - a < 1e-16) break;
    }
    return 0.5 * (a + b);
}

SteadyState make_parametric(double x, double y, double f_norm, double dtp, double dtl) {
    SteadyState s;
    s.branch = Branch::Parametric;
    s.ap2 = x;
    s.a2 = y;
    s.phi_defined = true;
    s.phi = std::atan2(1.0 / x, (dtl - 3.0 * y - 2.0 * x) / x);
    const double ap = std::sqrt(x);
    const double r = 2.0 * y / x;
    s.psi = std::atan2(ap / f_norm * (dtp - x - r * (dtl - 3.0 * y)), ap / f_norm * (1.0 + r));
    s.growth_rate = growth_rate(s, dtp, dtl);
    s.stable = s.growth_rate < 0.0;
    return s;
}

// Damped Newton on the two amplitude equations in (x, y).
CurvePoint polish_parametric(CurvePoint p, double f2, double dtp, double dtl,
                             const SolverOptions& options) {
    auto residual = [&](double x, double y) {
        const double s = dtl - 2.0 * x - 3.0 * y;
        return Eigen::Vector2d(x * x - 1.0 - s * s, drive_squared(x, y, dtp, dtl) - f2);
    };
    Eigen::Vector2d r = residual(p.x, p.y);
    for (int it = 0; it < options.max_iterations; ++it) {
        if (r.norm() <= 1e-14 * std::max(1.0, f2)) break;
        Eigen::Matrix2d jac;
        const double hx = 1e-7 * std::max(1.0, p.x);
        const double hy = 1e-7 * std::max(1.0, p.y);
        jac.col(0) = (residual(p.x + hx, p.y) - residual(p.x - hx, p.y)) / (2.0 * hx);
        jac.col(1) = (residual(p.x, p.y + hy) - residual(p.x, p.y - hy)) / (2.0 * hy);
        const Eigen::Vector2d step = jac.fullPivLu().solve(-r);
        if (!step.allFinite()) break;
        double damp = 1.0;
        bool improved = false;
        for (int k = 0; k < 30; ++k, damp *= 0.5) {
            const CurvePoint trial{p.x + damp * step(0), p.y + damp * step(1)};
            if (trial.y <= 0.0 || trial.x < 1.0) continue;
            const Eigen::Vector2d rt = residual(trial.x, trial.y);
            if (rt.norm() < r.norm()) {
                p = trial;
                r = rt;
                improved = true;
                break;
            }
        }
        if (!improved || damp * step.norm() < options.step_tolerance) break;
    }
    if (!(r.norm() <= options.residual_tolerance * std::max(1.0, f2))) {
        throw Error(Errc::NoConvergence, "parametric root polishing did not reach the residual cap");
    }
    return p;
}

} // namespace

std::vector<SteadyState> pump_only_branches(double f_norm, double dtp) {
    if (!(f_norm >= 0.0)) throw Error(Errc::InvalidArgument, "f_norm must be >= 0");
    const double f2 = f_norm * f_norm;
    // x^3 - 2 dtp x^2 + (1 + dtp^2) x - F^2 = 0, shifted by x = t + 2 dtp / 3.
    const double shift = 2.0 * dtp / 3.0;
    const double p = 1.0 - dtp * dtp / 3.0;
    const double q = 2.0 * dtp * dtp * dtp / 27.0 + 2.0 * dtp / 3.0 - f2;

    std::vector<double> roots;
    const double disc = 4.0 * p * p * p + 27.0 * q * q;
    if (p < 0.0 && disc < 0.0) {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) roots.push_back(shift + m * std::cos(theta - 2.0 * kPi * k / 3.0));
    } else {
        const double s = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
        roots.push_back(shift + std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s));
    }
    for (double& r : roots) r = std::max(0.0, polish_cubic(r, f2, dtp));
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, b); }),
                roots.end());

    std::vector<SteadyState> out;
    for (double x : roots) {
        SteadyState s;
        s.branch = Branch::PumpOnly;
        s.ap2 = x;
        s.a2 = 0.0;
        s.phi = 0.0;
        s.phi_defined = false;
        if (f_norm > 0.0) {
            const double ap = std::sqrt(x);
            s.psi = std::atan2(ap * (dtp - x) / f_norm, ap / f_norm);
        }
        s.growth_rate = pump_growth_rate(x, dtp);
        s.stable = cubic_slope(x, dtp) > 0.0;
        out.push_back(s);
    }
    return out;
}

std::vector<SteadyState> parametric_branch(double f_norm, double dtp, double dtl,
                                           const SolverOptions& options) {
    if (!(f_norm > 0.0)) throw Error(Errc::InvalidArgument, "f_norm must be > 0");
    const ValidInterval span = valid_interval(dtl);
    if (!span.exists) return {};
    const double f2 = f_norm * f_norm;
    auto g = [&](double phi) {
        const CurvePoint c = curve_point(phi, dtl);
        return drive_squared(c.x, std::max(c.y, 0.0), dtp, dtl) - f2;
    };

    const int n = std::max(16, options.scan_points);
    std::vector<double> phis(static_cast<std::size_t>(n));
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        phis[i] = span.lo + (span.hi - span.lo) * i / (n - 1);
        vals[i] = g(phis[i]);
    }

    std::vector<double> root_phis;
    auto add_bracket = [&](double a, double b) { root_phis.push_back(bisect_root(g, a, b)); };
    for (int i = 0; i + 1 < n; ++i) {
        if ((vals[i] < 0.0) != (vals[i + 1] < 0.0)) add_bracket(phis[i], phis[i + 1]);
    }
    // A pair of roots can hide between samples around a local extremum.
    for (int i = 1; i + 1 < n; ++i) {
        const bool local_min = vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] && vals[i] > 0.0;
        const bool local_max = vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] && vals[i] < 0.0;
        if (!local_min && !local_max) continue;
        const double sign = local_min ? 1.0 : -1.0;
        const double ext = golden_min([&](double phi) { return sign * g(phi); }, phis[i - 1],
                                      phis[i + 1], 1e-15);
        if (sign * g(ext) < 0.0) {
            add_bracket(phis[i - 1], ext);
            add_bracket(ext, phis[i + 1]);
        }
    }
    std::sort(root_phis.begin(), root_phis.end());

    std::vector<SteadyState> out;
    for (double phi : root_phis) {
        CurvePoint c = curve_point(phi, dtl);
        if (!(c.y > 0.0)) continue;
        c = polish_parametric(c, f2, dtp, dtl, options);
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const SteadyState& s) {
            return std::abs(s.ap2 - c.x) < 1e-10 * c.x && std::abs(s.a2 - c.y) < 1e-10 * std::max(1.0, c.y);
        });
        if (!duplicate) out.push_back(make_parametric(c.x, c.y, f_norm, dtp, dtl));
    }
    std::sort(out.begin(), out.end(),
              [](const SteadyState& a, const SteadyState& b) { return a.ap2 < b.ap2; });
    return out;
}

ThresholdReport threshold(double dtp, double dtl, double f_max, const SolverOptions& options) {
    const ValidInterval span = valid_interval(dtl);
    if (!span.exists) return {};
    auto f2_of = [&](double phi) {
        const CurvePoint c = curve_point(phi, dtl);
        return drive_squared(c.x, std::max(c.y, 0.0), dtp, dtl);
    };
    const int n = std::max(16, options.scan_points);
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> phis(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        phis[i] = span.lo + (span.hi - span.lo) * i / (n - 1);
        const double v = f2_of(phis[i]);
        if (v < best_val) { best_val = v; best = i; }
    }
    const double a = phis[static_cast<std::size_t>(std::max(0, best - 1))];
    const double b = phis[static_cast<std::size_t>(std::min(n - 1, best + 1))];
    const double phi_min = golden_min(f2_of, a, b, 1e-15);
    best_val = std::min(best_val, f2_of(phi_min));
    const double f_th = std::sqrt(best_val);
    if (!(f_th <= f_max)) return {f_th, false};
    return {f_th, true};
}

double pump_only_residual(const SteadyState& state, double f_norm, double dtp) {
    return -cubic_value(state.ap2, f_norm * f_norm, dtp);
}

std::array<double, 2> parametric_residual(const SteadyState& state, double f_norm, double dtp,
                                          double dtl) {
    const double x = state.ap2;
    const double y = state.a2;
    const double s = dtl - 2.0 * x - 3.0 * y;
    return {x * x - 1.0 - s * s, drive_squared(x, y, dtp, dtl) - f_norm * f_norm};
}

std::array<std::complex<double>, 3> mean_field_amplitudes(const SteadyState& state) {
    const double theta_p = -state.psi;
    const double theta_pair = 0.5 * state.phi + theta_p;
    const double ap = std::sqrt(state.ap2);
    const double a = std::sqrt(state.a2);
    return {std::polar(ap, theta_p), std::polar(a, theta_pair), std::polar(a, theta_pair)};
}

Matrix6c mean_field_jacobian(const SteadyState& state, double dtp, double dtl) {
    const auto [p, m, q] = mean_field_amplitudes(state);
    const cd i(0.0, 1.0);
    const double np = std::norm(p);
    const double nm = std::norm(m);
    const double nq = std::norm(q);

    // Rows hold d f / d(p, p*, m, m*, q, q*) for f in (f_p, f_m, f_q); the
    // conjugate rows follow from the real-valued flow.
    Eigen::Matrix<cd, 3, 6> rows;
    rows << i * (2.0 * np + 2.0 * nm + 2.0 * nq) - cd(1.0, dtp), i * (p * p + 2.0 * m * q),
        i * (2.0 * std::conj(m) * p + 2.0 * std::conj(p) * q), i * 2.0 * m * p,
        i * (2.0 * std::conj(q) * p + 2.0 * std::conj(p) * m), i * 2.0 * q * p,
        // signal (-L)
        i * (2.0 * std::conj(p) * m + 2.0 * p * std::conj(q)), i * 2.0 * p * m,
        i * (2.0 * np + 2.0 * nm + 2.0 * nq) - cd(1.0, dtl), i * m * m,
        i * 2.0 * std::conj(q) * m, i * (2.0 * q * m + p * p),
        // idler (+L)
        i * (2.0 * std::conj(p) * q + 2.0 * p * std::conj(m)), i * 2.0 * p * q,
        i * 2.0 * std::conj(m) * q, i * (2.0 * m * q + p * p),
        i * (2.0 * np + 2.0 * nm + 2.0 * nq) - cd(1.0, dtl), i * q * q;

    Matrix6c jac;
    for (int k = 0; k < 3; ++k) {
        for (int c = 0; c < 3; ++c) {
            jac(2 * k, 2 * c) = rows(k, 2 * c);
            jac(2 * k, 2 * c + 1) = rows(k, 2 * c + 1);
            jac(2 * k + 1, 2 * c) = std::conj(rows(k, 2 * c + 1));
            jac(2 * k + 1, 2 * c + 1) = std::conj(rows(k, 2 * c));
        }
    }
    return jac;
}

double growth_rate(const SteadyState& state, double dtp, double dtl) {
    const Eigen::ComplexEigenSolver<Matrix6c> solver(mean_field_jacobian(state, dtp, dtl), false);
    const auto& ev = solver.eigenvalues();
    int neutral = -1;
    if (state.a2 > 0.0) {
        double smallest = std::numeric_limits<double>::infinity();
        for (int k = 0; k < ev.size(); ++k) {
            if (std::abs(ev(k)) < smallest) { smallest = std::abs(ev(k)); neutral = k; }
        }
        if (smallest > 1e-6) neutral = -1;
    }
    double rate = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < ev.size(); ++k) {
        if (k != neutral) rate = std::max(rate, ev(k).real());
    }
    return rate;
}

} // namespace qfc
