#include <doctest.h>

#include <cmath>
#include <random>

#include "qfc/duan.hpp"
#include "qfc/fluct.hpp"
#include "qfc/steady.hpp"

using namespace qfc;
using C = std::complex<double>;

namespace {

SteadyState pump_only(double ap2) {
    SteadyState s;
    s.ap2 = ap2;
    return s;
}

} // namespace

TEST_SUITE("fluct") {

TEST_CASE("M entries below threshold") {
    const auto sys = build_m<double>(pump_only(0.5), 1.0, 0.55);
    const auto& m = sys.m;
    CHECK(std::abs(m(0, 0) - C(-1, 0)) < 1e-15);
    CHECK(std::abs(m(0, 3) - C(0, 0.5)) < 1e-15); // phi stored as 0
    CHECK(m(0, 1) == C(0, 0));
    CHECK(m(0, 2) == C(0, 0));

    SteadyState shifted = pump_only(0.5);
    shifted.phi = 0.7;
    const auto rot = build_m<double>(shifted, 1.0, 0.55);
    CHECK(std::abs(rot.m(0, 3) - C(0, 0.5) * std::exp(C(0, -0.7))) < 1e-15);
}

TEST_CASE("empty cavity is diagonal") {
    const double dtl = 0.8;
    const auto sys = build_m<double>(pump_only(0.0), dtl, 0.55);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (r != c) CHECK(sys.m(r, c) == C(0, 0));
        }
    }
    CHECK(sys.m(0, 0) == C(-1, -dtl));
    CHECK(sys.m(1, 1) == C(-1, dtl));
    CHECK(sys.t_in * sys.t_in + sys.t_loss * sys.t_loss == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("conjugation symmetry") {
    const auto sols = parametric_branch(1.75, 2.5, 2.5);
    REQUIRE_FALSE(sols.empty());
    for (const auto& s : sols) {
        const auto m = build_m<double>(s, 2.5, 0.55).m;
        for (int r = 0; r < 4; r += 2) {
            for (int c = 0; c < 4; c += 2) {
                CHECK(m(r + 1, c + 1) == std::conj(m(r, c)));
                CHECK(m(r + 1, c) == std::conj(m(r, c + 1)));
            }
        }
    }
}

TEST_CASE("vacuum output without drive") {
    const auto sys = build_m<double>(pump_only(0.0), 1.3, 0.55);
    const auto vac = vacuum_correlation<double>();
    for (int k = 0; k < 1000; ++k) {
        const double w = -50.0 + 0.1 * k;
        const auto spec = noise_spectrum(sys, w);
        CHECK((spec.s - vac).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((spec.s_neg - vac).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK(intracavity_pair_photons(sys) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum stays finite for stable states") {
    const auto roots = pump_only_branches(1.0, 1.0);
    const auto sys = build_m<double>(roots.front(), 1.2, 0.55);
    REQUIRE(max_real_eigenvalue(sys.m) < 0.0);
    for (int k = 0; k < 1000; ++k) {
        const auto spec = noise_spectrum(sys, -20.0 + 0.04 * k);
        CHECK(spec.s.allFinite());
        CHECK(spec.s_neg.allFinite());
    }
}

TEST_CASE("quadrature covariance is real symmetric PSD") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int tested = 0;
    while (tested < 200) {
        const double dtp = -1.0 + 4.0 * u(rng);
        const double dtl = dtp - 0.01 * u(rng);
        const double f = 2.0 * u(rng);
        const auto sys = build_m<double>(pump_only_branches(f, dtp).front(), dtl, 0.55);
        if (!(max_real_eigenvalue(sys.m) < -1e-3)) continue;
        ++tested;
        const double w = 2.0 * u(rng);
        const Matrix4r<double> sigma = quadrature_covariance(noise_spectrum(sys, w));
        CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::SelfAdjointEigenSolver<Matrix4r<double>> es(sigma);
        CHECK(es.eigenvalues().minCoeff() > -1e-9);
        const Matrix4r<double> intra = intracavity_covariance(sys);
        const Eigen::SelfAdjointEigenSolver<Matrix4r<double>> ei(intra);
        CHECK(ei.eigenvalues().minCoeff() > -1e-9);
    }
}

TEST_CASE("Lyapunov solution satisfies its equation") {
    const auto sys = build_m<double>(pump_only_branches(0.8, 1.0).front(), 1.0, 0.55);
    const Matrix4r<double> r = quadrature_drift(sys);
    const Matrix4r<double> s = intracavity_covariance(sys);
    const Matrix4r<double> lhs = r * s + s * r.transpose() + Matrix4r<double>::Identity();
    CHECK(lhs.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unstable states are rejected") {
    const auto sys = build_m<double>(pump_only(2.0), 4.0, 0.55);
    REQUIRE(max_real_eigenvalue(sys.m) > 0.0);
    CHECK_THROWS_AS(intracavity_covariance(sys), Error);
}

TEST_CASE("pair photons grow with pump power at zero pair detuning") {
    double prev = -1.0;
    for (int k = 1; k <= 50; ++k) {
        const double ap2 = 0.06 * k;
        const auto sys = build_m<double>(pump_only(ap2), 0.0, 0.55);
        REQUIRE(max_real_eigenvalue(sys.m) < 0.0);
        const double n = intracavity_pair_photons(sys);
        CHECK(n > prev);
        prev = n;
    }
}

TEST_CASE("pair photons diverge at threshold") {
    // Tight pair detuning just above sqrt 3 makes the onset supercritical.
    const double dtp = 0.0;
    const double dtl = 1.75;
    const auto t = threshold(dtp, dtl);
    REQUIRE(t.exists);
    const auto roots = pump_only_branches(0.999 * t.f_threshold, dtp);
    REQUIRE(roots.size() == 1);
    const double n = intracavity_pair_photons(build_m<double>(roots[0], dtl, 0.55));
    CHECK(n > 1e3);
    const auto farther = pump_only_branches(0.99 * t.f_threshold, dtp);
    CHECK(intracavity_pair_photons(build_m<double>(farther[0], dtl, 0.55)) < n);
}

TEST_CASE("long double instantiation agrees") {
    const auto s = pump_only_branches(0.9, 1.2).front();
    const auto sd = build_m<double>(s, 1.1, 0.55);
    const auto sl = build_m<long double>(s, 1.1L, 0.55L);
    const auto a = intracavity_covariance(sd);
    const auto b = intracavity_covariance(sl);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) CHECK(std::abs(a(r, c) - static_cast<double>(b(r, c))) < 1e-12);
    }
}

}
