#include <doctest.h>

#include <cmath>
#include <limits>

#include "qfc/error.hpp"
#include "qfc/model.hpp"
#include "support.hpp"

using namespace qfc;
using qfc::test::default_config;
using qfc::test::rel_err;

TEST_SUITE("model") {

TEST_CASE("TE00 damping rates") {
    const auto rates = damping_rates(default_config().resonator.family(FamilyLabel::TE00));
    CHECK(rel_err(rates.total, 1348329234.7584106) < 1e-12);
    CHECK(rel_err(rates.loss, 606748155.64128478) < 1e-12);
    CHECK(rel_err(rates.coupling, 741581079.11712585) < 1e-12);
    // Loose cross-check against the rounded hand values.
    CHECK(rel_err(rates.total, 1.34832e9) < 1e-5);
    CHECK(rel_err(rates.loss, 6.0674e8) < 1e-4);
    CHECK(rel_err(rates.coupling, 7.4158e8) < 1e-4);
}

TEST_CASE("rate identities hold for every family") {
    for (const auto& f : default_config().resonator.families) {
        CAPTURE(to_string(f.label));
        const auto r = damping_rates(f);
        CHECK(rel_err(r.coupling + r.loss, r.total) < 1e-12);
        const double w = f.omega0();
        const double inv_q = 1.0 / (w / r.coupling) + 1.0 / (w / r.loss);
        CHECK(rel_err(inv_q, 1.0 / f.q_total) < 1e-12);
    }
}

TEST_CASE("infinite Q and critical coupling") {
    ModalFamily f = default_config().resonator.family(FamilyLabel::TE00);
    f.q_total = std::numeric_limits<double>::infinity();
    const auto lossless = damping_rates(f);
    CHECK(lossless.total == 0.0);
    CHECK(lossless.loss == 0.0);
    CHECK(lossless.coupling == 0.0);

    f.q_total = 1e6;
    f.intrinsic_fraction = 0.5;
    const auto crit = damping_rates(f);
    CHECK(rel_err(crit.coupling, crit.loss) < 1e-15);
}

TEST_CASE("nonlinear rate from geometry") {
    const ResonatorSpec& res = default_config().resonator;
    const ModalFamily& te00 = res.family(FamilyLabel::TE00);
    const double eta = nonlinear_rate(te00, res);
    CHECK(rel_err(eta, 2.5329063031887644) < 1e-12);

    ResonatorSpec wider = res;
    wider.radius_m *= 2.0;
    CHECK(rel_err(nonlinear_rate(te00, wider), eta / 2.0) < 1e-14);

    ResonatorSpec linear = res;
    linear.n2 = 0.0;
    CHECK(nonlinear_rate(te00, linear) == 0.0);

    ModalFamily flat = te00;
    flat.a_eff_m2 = 0.0;
    CHECK_THROWS_AS(nonlinear_rate(flat, res), Error);
}

TEST_CASE("tabulated eta disagrees with the formula") {
    // The loader keeps the table value and flags the gap.
    const Config& cfg = default_config();
    for (const auto& f : cfg.resonator.families) {
        CHECK(nonlinear_rate_mismatch(f, cfg.resonator) > 0.2);
    }
    CHECK(cfg.warnings.size() == cfg.resonator.families.size());
}

TEST_CASE("normalize") {
    const ResonatorSpec& res = default_config().resonator;

    SUBCASE("zero drive") {
        const auto d = normalize({FamilyLabel::TE10, 2, 0.4e9, 0.0}, res);
        CHECK(d.f_norm == 0.0);
    }
    SUBCASE("cold resonance") {
        for (int l = 1; l <= 6; ++l) {
            const auto d = normalize({FamilyLabel::TE00, l, 0.0, 1e9}, res);
            CHECK(d.dtp == 0.0);
            CHECK(d.dtl == -d.dint_norm);
        }
    }
    SUBCASE("Fig. 7 detuning") {
        const auto d = normalize({FamilyLabel::TE00, 1, 0.36e9, 1.1e9}, res);
        CHECK(rel_err(d.dtp, 1.6775922766296316) < 1e-12);
        CHECK(d.dtp == doctest::Approx(1.6776).epsilon(1e-4));
    }
    SUBCASE("dtl is dtp minus the scaled integrated dispersion") {
        for (auto fam : {FamilyLabel::TE00, FamilyLabel::TM00, FamilyLabel::TE10, FamilyLabel::TM10}) {
            for (int l = 1; l <= 8; ++l) {
                const auto d = normalize({fam, l, -0.2e9 + 0.1e9 * l, 2e9}, res);
                CHECK(d.dtl == d.dtp - d.dint_norm);
            }
        }
    }
    SUBCASE("homogeneous in amplitude") {
        for (auto conv : {DriveConvention::PhotonFlux, DriveConvention::PlaneWaveField}) {
            NormalizeOptions opts;
            opts.convention = conv;
            const auto base = normalize({FamilyLabel::TM10, 1, 0.3e9, 1e9}, res, opts);
            for (double k : {0.5, 2.0, 7.0}) {
                const auto scaled = normalize({FamilyLabel::TM10, 1, 0.3e9, k * 1e9}, res, opts);
                CHECK(rel_err(scaled.f_norm, k * base.f_norm) < 1e-13);
            }
        }
    }
    SUBCASE("photon flux closed form") {
        const ModalFamily& f = res.family(FamilyLabel::TE00);
        const auto r = damping_rates(f);
        const double a = 1.1e9;
        const auto d = normalize({FamilyLabel::TE00, 1, 0.36e9, a}, res);
        CHECK(rel_err(d.f_norm, a * std::sqrt(2.0 * r.coupling * f.eta / std::pow(r.total, 3))) < 1e-14);
        CHECK(rel_err(d.f_norm, 0.8377252570382784) < 1e-12);
    }
    SUBCASE("pair index must be positive") {
        CHECK_THROWS_AS(normalize({FamilyLabel::TE00, 0, 0.0, 1.0}, res), Error);
    }
}

TEST_CASE("validation names the offending field") {
    ModalFamily f = default_config().resonator.family(FamilyLabel::TE00);
    CHECK(validate(f).empty());
    f.intrinsic_fraction = 1.2;
    const auto issues = validate(f);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("intrinsic_fraction") != std::string::npos);
}

TEST_CASE("labels round trip") {
    for (auto fam : {FamilyLabel::TE00, FamilyLabel::TM00, FamilyLabel::TE10, FamilyLabel::TM10}) {
        CHECK(parse_family(to_string(fam)) == fam);
    }
    CHECK_FALSE(parse_family("TE01").has_value());
    for (auto conv : {DriveConvention::PhotonFlux, DriveConvention::PlaneWaveField}) {
        CHECK(parse_drive_convention(to_string(conv)) == conv);
    }
}

}
