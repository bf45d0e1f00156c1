#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qfc/dispersion.hpp"
#include "qfc/error.hpp"
#include "support.hpp"

using namespace qfc;
using qfc::test::default_config;
using qfc::test::rel_err;

namespace {

const ModalFamily& te00() { return default_config().resonator.family(FamilyLabel::TE00); }

std::vector<ModalFamily> pick(std::initializer_list<FamilyLabel> labels) {
    std::vector<ModalFamily> out;
    for (auto l : labels) out.push_back(default_config().resonator.family(l));
    return out;
}

} // namespace

TEST_SUITE("dispersion") {

TEST_CASE("resonance frequency") {
    CHECK(resonance_frequency(te00(), 0) == constants::two_pi * 214.59326262711363e12);
    const double w = resonance_frequency(te00(), 1, 2);
    CHECK(rel_err(w, 1348930925278746.4) < 1e-15);
    CHECK(rel_err(w - te00().omega0(), 601689235338.8215 + 1284996.967) < 1e-9);
}

TEST_CASE("FSR rows match D1") {
    CHECK(rel_err(te00().fsr_hz(), 95.76181600935617e9) < 1e-12);
    for (const auto& f : default_config().resonator.families) {
        REQUIRE(f.fsr_table_ghz.has_value());
        CHECK(rel_err(f.fsr_hz(), *f.fsr_table_ghz * 1e9) < 1e-9);
    }
}

TEST_CASE("integrated dispersion") {
    const double d1 = integrated_dispersion(te00(), 1, 3);
    CHECK(rel_err(d1, 1284273.3589997006) < 1e-12);
    CHECK(d1 == doctest::Approx(2569993.9342 / 2 - 4341.6487 / 6).epsilon(1e-9));

    for (const auto& f : default_config().resonator.families) {
        CHECK(integrated_dispersion(f, 0, 3) == 0.0);
        for (int l = 1; l <= 40; ++l) {
            const double sum = integrated_dispersion(f, l, 3) + integrated_dispersion(f, -l, 3);
            CHECK(rel_err(sum, f.d[1] * l * l) < 1e-12);
            CHECK(integrated_dispersion(f, l, 3) != integrated_dispersion(f, -l, 3));
        }
    }
}

TEST_CASE("integrated dispersion is the nonlinear part of the grid") {
    for (const auto& f : default_config().resonator.families) {
        for (int order : {2, 3, 4, 5}) {
            for (int l = -60; l <= 60; l += 7) {
                const double w = resonance_frequency(f, l, order);
                const double rest = w - f.omega0() - f.d[0] * l;
                // Cancellation of ~1e15 rad/s leaves a few ulps of absolute error.
                CHECK(std::abs(integrated_dispersion(f, l, order) - rest) < 1e-15 * w * 4);
            }
        }
    }
}

TEST_CASE("second-order grid is a parabola") {
    for (const auto& f : default_config().resonator.families) {
        for (int l = -50; l <= 50; l += 5) {
            const double dd = resonance_frequency(f, l + 1, 2) - 2 * resonance_frequency(f, l, 2) +
                              resonance_frequency(f, l - 1, 2);
            CHECK(std::abs(dd - f.d[1]) < 1e-10 * resonance_frequency(f, l, 2));
            const double di = integrated_dispersion(f, l + 1, 2) - 2 * integrated_dispersion(f, l, 2) +
                              integrated_dispersion(f, l - 1, 2);
            CHECK(rel_err(di, f.d[1]) < 1e-8);
        }
    }
}

TEST_CASE("resonance grids") {
    const auto g = resonance_grid(te00(), -5, 5);
    REQUIRE(g.omegas.size() == 11);
    CHECK(g.omega(0) == te00().omega0());
    CHECK(std::is_sorted(g.omegas.begin(), g.omegas.end()));
    const auto r = resonance_grid_in_range(te00(), 214.0e12, 215.0e12);
    for (double w : r.omegas) {
        CHECK(w / constants::two_pi >= 214.0e12);
        CHECK(w / constants::two_pi <= 215.0e12);
    }
    CHECK(r.omegas.size() >= 10);
}

TEST_CASE("through-port dip") {
    const auto rates = damping_rates(te00());
    // Depth 1 - T; on resonance T = 1 - 4 (gamma/Gamma)(mu/Gamma) = 0.01.
    CHECK(1.0 - through_port_dip(rates, 0.0) == doctest::Approx(0.01).epsilon(1e-12));
    const double depth0 = through_port_dip(rates, 0.0);
    const double half = through_port_dip(rates, rates.total / 2);
    CHECK(rel_err(half, depth0 / 2) < 1e-12);

    ModalFamily crit = te00();
    crit.intrinsic_fraction = 0.5;
    CHECK(std::abs(1.0 - through_port_dip(damping_rates(crit), 0.0)) < 1e-15);
}

TEST_CASE("transmission spectrum") {
    const auto fams = default_config().resonator.families;
    const auto spectra = transmission_spectrum(fams, 214.4e12, 214.8e12, 4001);
    REQUIRE(spectra.size() == fams.size());
    for (const auto& s : spectra) {
        REQUIRE(s.samples.size() == 4001);
        double lowest = 1.0;
        for (const auto& p : s.samples) {
            CHECK(p.transmission >= 0.0);
            CHECK(p.transmission <= 1.0);
            lowest = std::min(lowest, p.transmission);
        }
        CHECK(lowest < 0.9); // at least one dip lands in a 0.4 THz span
    }
    CHECK_THROWS_AS(transmission_spectrum(fams, 2e14, 1e14, 10), Error);
    CHECK_THROWS_AS(transmission_spectrum(fams, 1e14, 2e14, 1), Error);
}

TEST_CASE("overlap windows") {
    const auto three = pick({FamilyLabel::TE00, FamilyLabel::TE10, FamilyLabel::TM10});
    const auto windows = find_overlap_windows(three, 214.5e12, 214.7e12, 2e9);
    REQUIRE_FALSE(windows.empty());
    const auto& best = windows.front();
    CHECK(std::abs(best.center_hz - 214.593e12) < 1e9);
    CHECK(rel_err(best.center_hz, 214593026976868.0) < 1e-12);
    CHECK(best.width_hz == doctest::Approx(0.471e9).epsilon(1e-3));
    CHECK(best.families.size() == 3);
    CHECK(best.max_detuning_hz() <= 2e9);

    SUBCASE("permutation invariant") {
        const auto shuffled = pick({FamilyLabel::TM10, FamilyLabel::TE00, FamilyLabel::TE10});
        const auto other = find_overlap_windows(shuffled, 214.5e12, 214.7e12, 2e9);
        REQUIRE(other.size() == windows.size());
        for (std::size_t i = 0; i < other.size(); ++i) {
            CHECK(other[i].center_hz == windows[i].center_hz);
            CHECK(other[i].families == windows[i].families);
            CHECK(other[i].pair_indices == windows[i].pair_indices);
            CHECK(other[i].detunings_hz == windows[i].detunings_hz);
        }
    }
    SUBCASE("single family") {
        const auto one = find_overlap_windows(pick({FamilyLabel::TE00}), 214.0e12, 215.0e12, 1e9);
        const auto grid = resonance_grid_in_range(te00(), 214.0e12, 215.0e12);
        CHECK(one.size() == grid.omegas.size());
    }
    SUBCASE("zero tolerance") {
        CHECK(find_overlap_windows(three, 214.5e12, 214.7e12, 0.0).empty());
    }
}

TEST_CASE("composite pump weights") {
    using W = std::map<FamilyLabel, double>;
    CHECK(composite_pump_weights(W{{FamilyLabel::TE00, 1}}).at(FamilyLabel::TE00) == 1.0);
    const auto eq = composite_pump_weights(W{{FamilyLabel::TE00, 1}, {FamilyLabel::TE10, 1}, {FamilyLabel::TM10, 1}});
    for (const auto& [k, v] : eq) CHECK(v == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
    const auto pyth = composite_pump_weights(W{{FamilyLabel::TE00, 3}, {FamilyLabel::TE10, 4}});
    CHECK(pyth.at(FamilyLabel::TE00) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(pyth.at(FamilyLabel::TE10) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(composite_pump_weights(W{{FamilyLabel::TE00, 0}}), Error);
}

}
