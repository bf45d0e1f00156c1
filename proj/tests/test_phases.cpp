#include <doctest.h>

#include <cmath>
#include <limits>

#include "qfc/error.hpp"
#include "qfc/phases.hpp"
#include "qfc/steady.hpp"
#include "support.hpp"

using namespace qfc;
using qfc::test::default_config;

namespace {

const ResonatorSpec& res() { return default_config().resonator; }

bool same(const PhasePoint& a, const PhasePoint& b) {
    auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.phase == b.phase && eq(a.c_min, b.c_min) && a.n_branches == b.n_branches &&
           a.n_parametric == b.n_parametric && eq(a.max_eig_re, b.max_eig_re) && a.failed == b.failed &&
           a.delta_p0_hz == b.delta_p0_hz && a.a_pin == b.a_pin;
}

} // namespace

TEST_SUITE("phases") {

TEST_CASE("vacuum point is NE") {
    const auto p = classify_point({FamilyLabel::TE00, 1, 0.2e9, 0.0}, res());
    CHECK(p.phase == Phase::NE);
    CHECK(std::abs(p.c_min) < 1e-9);
    CHECK_FALSE(p.failed);
}

TEST_CASE("bistable window is MI") {
    const double dtp = 3.0;
    const double f = 1.8;
    REQUIRE(pump_only_branches(f, dtp).size() == 3);
    const auto p = classify_normalized({f, dtp, dtp - 0.001, 0.001}, 0.55);
    CHECK(p.phase == Phase::MI);
    CHECK(p.n_branches == 3);
    CHECK(std::isnan(p.c_min));
}

TEST_CASE("star points") {
    const auto et = classify_point({FamilyLabel::TE00, 1, 0.36e9, 1.1e9}, res());
    CHECK(et.phase == Phase::ET);
    CHECK(et.c_min == doctest::Approx(-0.16884000429426482).epsilon(1e-9));
    const auto mi = classify_point({FamilyLabel::TE00, 1, 1.0e9, 4.5e9}, res());
    CHECK(mi.phase == Phase::MI);
}

TEST_CASE("classification depends only on the normalized drive") {
    for (double a : {0.5e9, 1.5e9, 3e9}) {
        for (double d : {-0.2e9, 0.3e9, 0.9e9}) {
            const OperatingPoint op{FamilyLabel::TM10, 2, d, a};
            const auto direct = classify_point(op, res());
            const double frac = damping_rates(res().family(op.family)).coupling_fraction();
            auto via = classify_normalized(normalize(op, res()), frac);
            via.delta_p0_hz = d;
            via.a_pin = a;
            CHECK(same(direct, via));
        }
    }
}

TEST_CASE("single-cell sweep equals classify_point") {
    const auto grids = sweep(res(), FamilyLabel::TE10, {3}, {0.4e9}, {2e9});
    REQUIRE(grids.size() == 1);
    REQUIRE(grids[0].points.size() == 1);
    CHECK(same(grids[0].points[0], classify_point({FamilyLabel::TE10, 3, 0.4e9, 2e9}, res())));
}

TEST_CASE("small sweep") {
    const auto delta = linear_axis(-0.4e9, 1.2e9, 12);
    const auto amp = linear_axis(0.0, 5e9, 10);
    const auto serial = sweep(res(), FamilyLabel::TE00, {1, 2}, delta, amp, {}, 1);

    SUBCASE("layout") {
        REQUIRE(serial.size() == 2);
        CHECK(serial[1].pair_index == 2);
        const auto& p = serial[0].at(3, 7);
        CHECK(p.a_pin == amp[3]);
        CHECK(p.delta_p0_hz == delta[7]);
        CHECK(serial[0].count(Phase::NE) + serial[0].count(Phase::ET) + serial[0].count(Phase::MI) == 120);
    }
    SUBCASE("every MI cell records its cause") {
        for (const auto& g : serial) {
            for (const auto& p : g.points) {
                if (p.phase != Phase::MI) {
                    CHECK(p.n_branches == 1);
                    CHECK(p.n_parametric == 0);
                    CHECK(p.max_eig_re < 0.0);
                    continue;
                }
                CHECK((p.failed || p.n_branches > 1 || p.n_parametric > 0 || p.max_eig_re >= 0.0));
            }
        }
    }
    SUBCASE("worker count does not matter") {
        for (int workers : {2, 4, 8}) {
            const auto par = sweep(res(), FamilyLabel::TE00, {1, 2}, delta, amp, {}, workers);
            for (std::size_t k = 0; k < serial.size(); ++k) {
                for (std::size_t i = 0; i < serial[k].points.size(); ++i) {
                    CHECK(same(serial[k].points[i], par[k].points[i]));
                }
            }
        }
    }
}

TEST_CASE("axes are validated") {
    CHECK_THROWS_AS(sweep(res(), FamilyLabel::TE00, {1}, {}, {1.0}), Error);
    CHECK_THROWS_AS(sweep(res(), FamilyLabel::TE00, {1}, {2.0, 1.0}, {1.0}), Error);
    CHECK_THROWS_AS(sweep(res(), FamilyLabel::TE00, {}, {1.0}, {1.0}), Error);
    CHECK(linear_axis(1.0, 2.0, 1) == std::vector<double>{1.0});
    CHECK(linear_axis(0.0, 1.0, 5).back() == 1.0);
}

TEST_CASE("joint pump with one family and one L is the plain argmin") {
    const auto delta = linear_axis(0.0, 0.8e9, 9);
    const auto amp = linear_axis(0.0, 3e9, 13);
    const auto grids = sweep(res(), FamilyLabel::TE00, {1}, delta, amp);
    const auto best = best_joint_pump({grids}, 1e-3, 0);

    double lowest = std::numeric_limits<double>::infinity();
    std::size_t ia_best = 0, id_best = 0;
    for (std::size_t ia = 0; ia < amp.size(); ++ia) {
        for (std::size_t id = 0; id < delta.size(); ++id) {
            const auto& p = grids[0].at(ia, id);
            if (p.phase != Phase::MI && p.c_min < lowest) {
                lowest = p.c_min;
                ia_best = ia;
                id_best = id;
            }
        }
    }
    REQUIRE(best.families.size() == 1);
    CHECK(best.worst_c_min == lowest);
    CHECK(best.delta_p0_hz == delta[id_best]);
    CHECK(best.families[0].a_pin == amp[ia_best]);
}

TEST_CASE("joint pump keeps its distance from MI") {
    const auto delta = linear_axis(-0.4e9, 1.2e9, 12);
    const auto amp = linear_axis(0.0, 5e9, 12);
    const auto grids = sweep(res(), FamilyLabel::TE00, {1}, delta, amp);
    const auto best = best_joint_pump({grids}, 1e-3, 2);
    const auto& g = grids[0];
    const auto id = static_cast<long>(std::find(delta.begin(), delta.end(), best.delta_p0_hz) - delta.begin());
    const auto ia = static_cast<long>(std::find(amp.begin(), amp.end(), best.families[0].a_pin) - amp.begin());
    for (long a = std::max(0L, ia - 2); a <= std::min<long>(11, ia + 2); ++a) {
        for (long d = std::max(0L, id - 2); d <= std::min<long>(11, id + 2); ++d) {
            CHECK(g.at(static_cast<std::size_t>(a), static_cast<std::size_t>(d)).phase != Phase::MI);
        }
    }
}

TEST_CASE("no feasible joint pump") {
    const auto grids = sweep(res(), FamilyLabel::TE00, {1}, {0.2e9}, {0.0, 1e3});
    CHECK_THROWS_AS(best_joint_pump({grids}, 1e-3, 0), Error);
}

}
