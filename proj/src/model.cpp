#include "qfc/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "qfc/dispersion.hpp"
#include "qfc/error.hpp"

namespace qfc {

std::string_view to_string(FamilyLabel label) {
    switch (label) {
        case FamilyLabel::TE00: return "TE00";
        case FamilyLabel::TM00: return "TM00";
        case FamilyLabel::TE10: return "TE10";
        case FamilyLabel::TM10: return "TM10";
    }
    return "?";
}

std::optional<FamilyLabel> parse_family(std::string_view text) {
    for (auto label : {FamilyLabel::TE00, FamilyLabel::TM00, FamilyLabel::TE10, FamilyLabel::TM10}) {
        if (to_string(label) == text) return label;
    }
    return std::nullopt;
}

std::string_view to_string(DriveConvention convention) {
    switch (convention) {
        case DriveConvention::PhotonFlux: return "photon_flux";
        case DriveConvention::PlaneWaveField: return "plane_wave_field";
    }
    return "?";
}

std::optional<DriveConvention> parse_drive_convention(std::string_view text) {
    if (text == "photon_flux") return DriveConvention::PhotonFlux;
    if (text == "plane_wave_field") return DriveConvention::PlaneWaveField;
    return std::nullopt;
}

const ModalFamily& ResonatorSpec::family(FamilyLabel label) const {
    for (const auto& f : families) {
        if (f.label == label) return f;
    }
    throw Error(Errc::InvalidArgument,
                "resonator has no modal family " + std::string(to_string(label)));
}

std::vector<std::string> validate(const ModalFamily& family) {
    std::vector<std::string> issues;
    const std::string prefix = std::string(to_string(family.label)) + ".";
    auto require = [&](bool ok, const char* field, const char* rule) {
        if (!ok) issues.push_back(prefix + field + ": " + rule);
    };
    require(std::isfinite(family.f0_hz) && family.f0_hz > 0.0, "f0", "must be > 0");
    require(std::isfinite(family.q_total) && family.q_total > 0.0, "q_total", "must be > 0");
    require(family.intrinsic_fraction > 0.0 && family.intrinsic_fraction < 1.0,
            "intrinsic_fraction", "must lie in (0, 1)");
    require(std::isfinite(family.a_eff_m2) && family.a_eff_m2 > 0.0, "a_eff", "must be > 0");
    require(std::isfinite(family.n_eff) && family.n_eff >= 1.0, "n_eff", "must be >= 1");
    require(std::isfinite(family.eta) && family.eta > 0.0, "eta", "must be > 0");
    for (std::size_t n = 0; n < family.d.size(); ++n) {
        if (!std::isfinite(family.d[n])) {
            issues.push_back(prefix + "d" + std::to_string(n + 1) + ": must be finite");
        }
    }
    require(family.d[0] > 0.0, "d1", "must be > 0 (free spectral range)");

    if (family.fsr_table_ghz && family.d[0] > 0.0) {
        const double fsr = family.fsr_hz() * 1e-9;
        if (std::abs(fsr - *family.fsr_table_ghz) > 1e-9 * std::abs(*family.fsr_table_ghz)) {
            std::ostringstream os;
            os.precision(17);
            os << prefix << "fsr: transcribed " << *family.fsr_table_ghz
               << " GHz differs from D1/2pi = " << fsr << " GHz";
            issues.push_back(os.str());
        }
    }
    if (family.lambda0_table_nm && family.f0_hz > 0.0) {
        const double lam = family.lambda0_m() * 1e9;
        if (std::abs(lam - *family.lambda0_table_nm) > 1e-9 * std::abs(*family.lambda0_table_nm)) {
            std::ostringstream os;
            os.precision(17);
            os << prefix << "lambda0: transcribed " << *family.lambda0_table_nm
               << " nm differs from c/f0 = " << lam << " nm";
            issues.push_back(os.str());
        }
    }
    return issues;
}

std::vector<std::string> validate(const ResonatorSpec& spec) {
    std::vector<std::string> issues;
    if (!(spec.radius_m > 0.0)) issues.push_back("resonator.radius: must be > 0");
    if (!(spec.n2 > 0.0)) issues.push_back("resonator.n2: must be > 0");
    if (spec.n0 && !(*spec.n0 >= 1.0)) issues.push_back("resonator.n0: must be >= 1");
    if (spec.families.empty()) issues.push_back("resonator.families: must not be empty");
    std::set<FamilyLabel> seen;
    for (const auto& f : spec.families) {
        if (!seen.insert(f.label).second) {
            issues.push_back("resonator.families: duplicate label " + std::string(to_string(f.label)));
        }
        auto sub = validate(f);
        issues.insert(issues.end(), sub.begin(), sub.end());
    }
    return issues;
}

DampingRates damping_rates(const ModalFamily& family) {
    DampingRates rates;
    rates.total = family.omega0() / family.q_total;
    rates.loss = family.intrinsic_fraction * rates.total;
    rates.coupling = rates.total - rates.loss;
    return rates;
}

double nonlinear_rate(const ModalFamily& family, const ResonatorSpec& resonator) {
    const double volume = family.a_eff_m2 * constants::two_pi * resonator.radius_m;
    if (volume == 0.0) throw Error(Errc::ZeroVolume, "A_eff * radius is zero");
    const double n0 = resonator.n0.value_or(family.n_eff);
    const double w0 = family.omega0();
    return constants::hbar * w0 * w0 * constants::c * resonator.n2 / (n0 * n0 * volume);
}

double nonlinear_rate_mismatch(const ModalFamily& family, const ResonatorSpec& resonator) {
    const double formula = nonlinear_rate(family, resonator);
    return std::abs(family.eta - formula) / formula;
}

double input_power(const OperatingPoint& op, const ModalFamily& family,
                   DriveConvention convention) {
    const double amp2 = op.a_pin * op.a_pin;
    switch (convention) {
        case DriveConvention::PhotonFlux: {
            const double pump_omega = constants::two_pi * (family.f0_hz - op.delta_p0_hz);
            return constants::hbar * pump_omega * amp2;
        }
        case DriveConvention::PlaneWaveField:
            return 0.5 * family.n_eff * constants::epsilon0 * constants::c * family.a_eff_m2 * amp2;
    }
    return 0.0;
}

NormalizedDrive normalize(const OperatingPoint& op, const ResonatorSpec& resonator,
                          const NormalizeOptions& options) {
    if (op.pair_index < 1) throw Error(Errc::InvalidArgument, "pair index L must be >= 1");
    const ModalFamily& family = resonator.family(op.family);
    const DampingRates rates = damping_rates(family);

    NormalizedDrive drive;
    switch (options.convention) {
        case DriveConvention::PhotonFlux:
            // P_in / (hbar Omega0) = |a_pin|^2, so Omega0 drops out.
            drive.f_norm = std::abs(op.a_pin) *
                           std::sqrt(2.0 * rates.coupling * family.eta / std::pow(rates.total, 3));
            break;
        case DriveConvention::PlaneWaveField: {
            const double pump_omega = constants::two_pi * (family.f0_hz - op.delta_p0_hz);
            const double power = input_power(op, family, options.convention);
            drive.f_norm = std::sqrt(2.0 * rates.coupling * family.eta * power /
                                     (constants::hbar * pump_omega * std::pow(rates.total, 3)));
            break;
        }
    }
    drive.dtp = constants::two_pi * op.delta_p0_hz / rates.total;
    drive.dint_norm = integrated_dispersion(family, op.pair_index, options.truncation_order) / rates.total;
    drive.dtl = drive.dtp - drive.dint_norm;
    return drive;
}

} // namespace qfc
