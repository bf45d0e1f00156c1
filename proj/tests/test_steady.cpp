#include <doctest.h>

#include <cmath>
#include <random>

#include "qfc/fluct.hpp"
#include "qfc/oracle.hpp"
#include "qfc/steady.hpp"

using namespace qfc;

namespace {

const double sqrt3 = std::sqrt(3.0);

NormalizedDrive drive(double f, double dtp, double dtl) { return {f, dtp, dtl, dtp - dtl}; }

} // namespace

TEST_SUITE("steady") {

TEST_CASE("undriven cavity has a single empty root") {
    for (double dtp : {-2.0, 0.0, 1.0, 5.0}) {
        const auto roots = pump_only_branches(0.0, dtp);
        REQUIRE(roots.size() == 1);
        CHECK(roots[0].ap2 == 0.0);
        CHECK(roots[0].a2 == 0.0);
        CHECK_FALSE(roots[0].phi_defined);
    }
}

TEST_CASE("pump-only roots satisfy the cubic and are sorted") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const double dtp = -3.0 + 9.0 * u(rng);
        const double f = 4.0 * u(rng);
        const auto roots = pump_only_branches(f, dtp);
        REQUIRE(!roots.empty());
        CHECK(roots.size() <= 3);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            CHECK(roots[i].branch == Branch::PumpOnly);
            CHECK(std::abs(pump_only_residual(roots[i], f, dtp)) < 1e-10 * std::max(1.0, f * f));
            if (i > 0) CHECK(roots[i - 1].ap2 <= roots[i].ap2);
        }
    }
}

TEST_CASE("bistability needs dtp above sqrt 3") {
    for (double dtp : {-1.0, 0.0, 1.0, 1.7, sqrt3}) {
        for (int k = 0; k <= 400; ++k) {
            CHECK(pump_only_branches(0.01 * k, dtp).size() == 1);
        }
    }
    // Just above the onset a narrow three-root window opens around the
    // inflection drive F^2 = g(2 dtp / 3).
    const double dtp = sqrt3 + 1e-3;
    const double x = 2.0 * dtp / 3.0;
    const double f = std::sqrt(x * (1.0 + (dtp - x) * (dtp - x)));
    int three = 0;
    for (int k = -200; k <= 200; ++k) three += pump_only_branches(f * (1 + 1e-6 * k), dtp).size() == 3;
    CHECK(three > 0);
}

TEST_CASE("middle bistable root is unstable") {
    const double dtp = 3.0;
    const auto roots = pump_only_branches(1.8, dtp);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].stable);
    CHECK_FALSE(roots[1].stable);
    CHECK(roots[1].growth_rate > 0);
}

TEST_CASE("stable root is continuous along a detuning sweep") {
    // F^2 below 8 sqrt3 / 9 keeps the cubic monostable for every detuning.
    const double f = 1.1;
    const double step = 0.01;
    double prev = pump_only_branches(f, -3.0).front().ap2;
    double prev_jump = 0.0;
    for (int k = 1; k <= 800; ++k) {
        const auto roots = pump_only_branches(f, -3.0 + step * k);
        REQUIRE(roots.size() == 1);
        const double jump = std::abs(roots[0].ap2 - prev);
        if (k > 1) CHECK(jump < 10.0 * std::max(prev_jump, 1e-3 * step));
        prev_jump = jump;
        prev = roots[0].ap2;
    }
}

TEST_CASE("parametric branch") {
    SUBCASE("needs dtl above sqrt 3") {
        for (double dtl : {-2.0, 0.0, 1.0, 1.7}) {
            for (double f : {0.5, 1.5, 3.0, 8.0}) CHECK(parametric_branch(f, dtl, dtl).empty());
        }
    }
    SUBCASE("solutions clamp the pump and solve the flow") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int found = 0;
        for (int k = 0; k < 400; ++k) {
            const double dtp = -1.0 + 6.0 * u(rng);
            const double dtl = dtp - 0.01 * u(rng);
            const double f = 4.0 * u(rng);
            for (const auto& s : parametric_branch(f, dtp, dtl)) {
                ++found;
                CHECK(s.branch == Branch::Parametric);
                CHECK(s.a2 > 0.0);
                CHECK(s.phi_defined);
                CHECK(s.ap2 >= 1.0 - 1e-12);
                const double lhs = s.ap2 * s.ap2 - 1.0;
                const double rhs = std::pow(dtl - 2 * s.ap2 - 3 * s.a2, 2);
                CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, lhs));
                const auto res = parametric_residual(s, f, dtp, dtl);
                CHECK(std::abs(res[0]) < 1e-9);
                CHECK(std::abs(res[1]) < 1e-9);
                CHECK(oracle::steady_residual(s, drive(f, dtp, dtl)) < 1e-8);
            }
        }
        CHECK(found > 50);
    }
}

TEST_CASE("threshold") {
    SUBCASE("far-detuned pair never oscillates") {
        CHECK_FALSE(threshold(0.0, 1e5).exists);
        CHECK_FALSE(threshold(1e5, 1e5).exists);
    }
    SUBCASE("zero detuning has no simple-branch solution") {
        const auto t = threshold(0.0, 0.0);
        CHECK_FALSE(t.exists);
        for (double f : {0.5, 1.0, 2.0, 10.0}) CHECK(parametric_branch(f, 0.0, 0.0).empty());
    }
    SUBCASE("bracketing") {
        for (auto [dtp, dtl] : {std::pair{2.0, 2.0}, {2.5, 2.5}, {3.0, 3.0}, {0.0, 1.75}, {1.0, 2.0}, {1.8, 1.79}}) {
            CAPTURE(dtp);
            CAPTURE(dtl);
            const auto t = threshold(dtp, dtl);
            REQUIRE(t.exists);
            CHECK(parametric_branch(0.999 * t.f_threshold, dtp, dtl).empty());
            CHECK_FALSE(parametric_branch(1.001 * t.f_threshold, dtp, dtl).empty());
        }
    }
    SUBCASE("frozen values") {
        CHECK(threshold(2.0, 2.0).f_threshold == doctest::Approx(1.3608276349).epsilon(1e-9));
        CHECK(threshold(2.5, 2.5).f_threshold == doctest::Approx(1.5459859416).epsilon(1e-9));
        CHECK(threshold(3.0, 3.0).f_threshold == doctest::Approx(1.706264309).epsilon(1e-9));
    }
    SUBCASE("supercritical onset meets the pump-only instability") {
        // On the lower pump-only root, M loses stability once
        // x^2 = 1 + (dtl - 2x)^2; for these detunings that is the threshold.
        const double dtl = 1.75;
        const double x = (2 * dtl - std::sqrt(dtl * dtl - 3)) / 3;
        const double f_inst = std::sqrt(x * (1 + x * x));
        CHECK(threshold(0.0, dtl).f_threshold == doctest::Approx(f_inst).epsilon(1e-8));
    }
}

TEST_CASE("phases of the parametric solution") {
    const auto sols = parametric_branch(1.75, 2.5, 2.5);
    REQUIRE_FALSE(sols.empty());
    for (const auto& s : sols) {
        const auto amps = mean_field_amplitudes(s);
        CHECK(std::norm(amps[0]) == doctest::Approx(s.ap2).epsilon(1e-12));
        CHECK(std::norm(amps[1]) == doctest::Approx(s.a2).epsilon(1e-12));
        CHECK(std::norm(amps[2]) == doctest::Approx(s.a2).epsilon(1e-12));
        const double phi = std::arg(amps[1] * amps[2] * std::conj(amps[0] * amps[0]));
        CHECK(std::abs(std::remainder(phi - s.phi, 2 * M_PI)) < 1e-10);
    }
}

TEST_CASE("pump-only linearization splits into pump and pair blocks") {
    // With A = 0 the 6x6 flow is block diagonal: the pump block decides the
    // branch flag, the signal/idler block is the fluctuation matrix M.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double dtp = -2.0 + 6.0 * u(rng);
        const double dtl = dtp - 0.01 * u(rng);
        const double f = 3.0 * u(rng);
        for (const auto& s : pump_only_branches(f, dtp)) {
            const double m_rate = max_real_eigenvalue(build_m<double>(s, dtl, 0.55).m);
            const double full = growth_rate(s, dtp, dtl);
            CHECK(full == doctest::Approx(std::max(s.growth_rate, m_rate)).epsilon(1e-9));
            CHECK(s.stable == (s.growth_rate < 0.0));
        }
    }
}

}
