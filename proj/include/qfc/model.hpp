#ifndef QFC_MODEL_HPP
#define QFC_MODEL_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfc {

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double c = 299792458.0;            // m/s
inline constexpr double epsilon0 = 8.8541878128e-12; // F/m
} // namespace constants

enum class FamilyLabel { TE00, TM00, TE10, TM10 };

std::string_view to_string(FamilyLabel label);
std::optional<FamilyLabel> parse_family(std::string_view text);

// One spatial mode family of the ring. Dispersion coefficients are angular
// (rad/s); d[0] is D1, d[4] is D5.
struct ModalFamily {
    FamilyLabel label = FamilyLabel::TE00;
    std::array<double, 5> d{};
    double f0_hz = 0.0;
    double q_total = 0.0;
    double intrinsic_fraction = 0.0; // mu / (gamma + mu)
    double a_eff_m2 = 0.0;
    double n_eff = 1.0;
    double eta = 0.0;                // rad/s per photon
    double g0 = 0.0;                 // tabulated figure, opaque metadata

    // Transcribed derived rows, checked against d[0] and f0 on load.
    std::optional<double> fsr_table_ghz;
    std::optional<double> lambda0_table_nm;

    double omega0() const { return constants::two_pi * f0_hz; }
    double fsr_hz() const { return d[0] / constants::two_pi; }
    double lambda0_m() const { return constants::c / f0_hz; }
};

struct Geometry {
    double ww_um = 0.0;
    double wh_um = 0.0;
    double theta_deg = 0.0;
    double cb_um = 0.0;
    double ch_um = 0.0;
    double cw_um = 0.0;
    double gap_nm = 0.0;
};

struct ResonatorSpec {
    double radius_m = 0.0;
    double n2 = 0.0;            // m^2/W
    std::optional<double> n0;   // bulk index; the family n_eff is used when absent
    std::vector<ModalFamily> families;
    Geometry geometry;

    const ModalFamily& family(FamilyLabel label) const;
};

/// List of violated invariants; empty when the object is valid.
std::vector<std::string> validate(const ModalFamily& family);
std::vector<std::string> validate(const ResonatorSpec& spec);

struct DampingRates {
    double total = 0.0;    // Gamma
    double coupling = 0.0; // gamma (external)
    double loss = 0.0;     // mu (intrinsic)

    double coupling_fraction() const { return coupling / total; }
};

DampingRates damping_rates(const ModalFamily& family);

/// Per-photon Kerr frequency shift from the ring geometry, using the
/// V_eff ~ A_eff * 2 pi R approximation. Throws ZeroVolume.
double nonlinear_rate(const ModalFamily& family, const ResonatorSpec& resonator);

/// Relative mismatch |tabulated - formula| / formula, used to flag suspicious rows.
double nonlinear_rate_mismatch(const ModalFamily& family, const ResonatorSpec& resonator);

struct OperatingPoint {
    FamilyLabel family = FamilyLabel::TE00;
    int pair_index = 1;        // L >= 1
    double delta_p0_hz = 0.0;  // (omega_p0 - Omega_p0) / 2 pi
    double a_pin = 0.0;        // input amplitude, see DriveConvention
};

// How the laboratory amplitude a_pin maps to input power.
//  PhotonFlux:     a_pin is the input field in sqrt(photons/s); P_in = hbar Omega0 |a_pin|^2,
//                  so F = a_pin * sqrt(2 gamma eta / Gamma^3).
//  PlaneWaveField: a_pin is an RMS field in V/m through A_eff;
//                  P_in = 1/2 n_eff eps0 c A_eff |a_pin|^2.
enum class DriveConvention { PhotonFlux, PlaneWaveField };

std::string_view to_string(DriveConvention convention);
std::optional<DriveConvention> parse_drive_convention(std::string_view text);

struct NormalizedDrive {
    double f_norm = 0.0;
    double dtp = 0.0;       // pump detuning / Gamma
    double dtl = 0.0;       // pair detuning / Gamma
    double dint_norm = 0.0; // D_int(L) / Gamma
};

struct NormalizeOptions {
    DriveConvention convention = DriveConvention::PhotonFlux;
    int truncation_order = 3;
};

/// Input power in watts for the given amplitude.
double input_power(const OperatingPoint& op, const ModalFamily& family,
                   DriveConvention convention);

NormalizedDrive normalize(const OperatingPoint& op, const ResonatorSpec& resonator,
                          const NormalizeOptions& options = {});

} // namespace qfc

#endif // QFC_MODEL_HPP
