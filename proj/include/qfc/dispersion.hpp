#ifndef QFC_DISPERSION_HPP
#define QFC_DISPERSION_HPP

#include <map>
#include <utility>
#include <vector>

#include "qfc/model.hpp"

namespace qfc {

/// omega_L = omega_0 + sum_{n=1..order} D_n L^n / n!   (rad/s)
double resonance_frequency(const ModalFamily& family, int l, int truncation_order = 3);

/// D_int(L) = sum_{n=2..order} D_n L^n / n!   (rad/s)
double integrated_dispersion(const ModalFamily& family, int l, int truncation_order = 3);

struct ResonanceGrid {
    FamilyLabel family = FamilyLabel::TE00;
    int l_min = 0;
    int l_max = 0;
    int truncation_order = 3;
    std::vector<double> omegas; // omegas[i] belongs to L = l_min + i

    double omega(int l) const { return omegas.at(static_cast<std::size_t>(l - l_min)); }
};

/// Builds the grid over [l_min, l_max]; throws InvalidArgument if it is not
/// strictly increasing (truncated expansion outside its validity window).
ResonanceGrid resonance_grid(const ModalFamily& family, int l_min, int l_max,
                             int truncation_order = 3);

/// Grid covering every resonance whose frequency lies in [f_min, f_max] (Hz).
ResonanceGrid resonance_grid_in_range(const ModalFamily& family, double f_min_hz,
                                      double f_max_hz, int truncation_order = 3);

struct SpectrumSample {
    double f_hz = 0.0;
    double transmission = 1.0;
};

struct FamilySpectrum {
    FamilyLabel family = FamilyLabel::TE00;
    std::vector<SpectrumSample> samples;
};

/// Lorentzian through-port dip of one resonance at angular offset `detuning`.
double through_port_dip(const DampingRates& rates, double detuning_rad_s);

/// Through-port transmission per family; dips of distinct resonances multiply.
/// Throws EmptyRange for an empty interval or fewer than two samples.
std::vector<FamilySpectrum> transmission_spectrum(const std::vector<ModalFamily>& families,
                                                  double f_min_hz, double f_max_hz,
                                                  int samples, int truncation_order = 3);

struct OverlapWindow {
    double center_hz = 0.0;
    double width_hz = 0.0;
    std::vector<FamilyLabel> families;     // sorted by label
    std::vector<int> pair_indices;         // resonance index L of each family
    std::vector<double> detunings_hz;      // resonance minus center, per family

    double max_detuning_hz() const;
};

/// All windows where one resonance per family sits within `tolerance_hz` of a
/// common center. Sorted by max per-family detuning, then center.
std::vector<OverlapWindow> find_overlap_windows(const std::vector<ModalFamily>& families,
                                                double f_min_hz, double f_max_hz,
                                                double tolerance_hz, int truncation_order = 3);

/// Scales nonnegative weights so their squares sum to one. Throws AllZero.
std::map<FamilyLabel, double> composite_pump_weights(const std::map<FamilyLabel, double>& weights);

} // namespace qfc

#endif // QFC_DISPERSION_HPP
