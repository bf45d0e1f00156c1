#include "qfc/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qfc/error.hpp"

namespace qfc {

namespace {

void check_order(int truncation_order) {
    if (truncation_order < 1 || truncation_order > 5) {
        throw Error(Errc::InvalidArgument,
                    "truncation order must be in [1, 5], got " + std::to_string(truncation_order));
    }
}

// sum_{n=first..order} D_n L^n / n!
double taylor_tail(const ModalFamily& family, int l, int first, int order) {
    double sum = 0.0;
    double term = 1.0; // L^n / n!
    for (int n = 1; n <= order; ++n) {
        term *= static_cast<double>(l) / n;
        if (n >= first) sum += family.d[static_cast<std::size_t>(n - 1)] * term;
    }
    return sum;
}

} // namespace

double resonance_frequency(const ModalFamily& family, int l, int truncation_order) {
    check_order(truncation_order);
    return family.omega0() + taylor_tail(family, l, 1, truncation_order);
}

double integrated_dispersion(const ModalFamily& family, int l, int truncation_order) {
    check_order(truncation_order);
    return taylor_tail(family, l, 2, truncation_order);
}

ResonanceGrid resonance_grid(const ModalFamily& family, int l_min, int l_max, int truncation_order) {
    if (l_max < l_min) throw Error(Errc::EmptyRange, "l_max < l_min");
    ResonanceGrid grid;
    grid.family = family.label;
    grid.l_min = l_min;
    grid.l_max = l_max;
    grid.truncation_order = truncation_order;
    grid.omegas.reserve(static_cast<std::size_t>(l_max - l_min + 1));
    for (int l = l_min; l <= l_max; ++l) {
        const double w = resonance_frequency(family, l, truncation_order);
        if (!grid.omegas.empty() && !(w > grid.omegas.back())) {
            throw Error(Errc::InvalidArgument,
                        "resonance grid of " + std::string(to_string(family.label)) +
                            " is not monotone at L = " + std::to_string(l));
        }
        grid.omegas.push_back(w);
    }
    return grid;
}

ResonanceGrid resonance_grid_in_range(const ModalFamily& family, double f_min_hz, double f_max_hz,
                                      int truncation_order) {
    if (!(f_max_hz > f_min_hz)) throw Error(Errc::EmptyRange, "empty frequency range");
    // Bracket with the linear estimate, then trim against the exact grid.
    const double fsr = family.fsr_hz();
    int lo = static_cast<int>(std::floor((f_min_hz - family.f0_hz) / fsr)) - 2;
    int hi = static_cast<int>(std::ceil((f_max_hz - family.f0_hz) / fsr)) + 2;
    const double w_min = constants::two_pi * f_min_hz;
    const double w_max = constants::two_pi * f_max_hz;
    while (resonance_frequency(family, lo, truncation_order) > w_min) --lo;
    while (resonance_frequency(family, hi, truncation_order) < w_max) ++hi;
    ResonanceGrid wide = resonance_grid(family, lo, hi, truncation_order);

    ResonanceGrid grid;
    grid.family = family.label;
    grid.truncation_order = truncation_order;
    for (int l = lo; l <= hi; ++l) {
        const double w = wide.omega(l);
        if (w < w_min || w > w_max) continue;
        if (grid.omegas.empty()) grid.l_min = l;
        grid.l_max = l;
        grid.omegas.push_back(w);
    }
    return grid;
}

double through_port_dip(const DampingRates& rates, double detuning_rad_s) {
    const double depth = 4.0 * rates.coupling * rates.loss / (rates.total * rates.total);
    const double u = 2.0 * detuning_rad_s / rates.total;
    return depth / (1.0 + u * u);
}

std::vector<FamilySpectrum> transmission_spectrum(const std::vector<ModalFamily>& families,
                                                  double f_min_hz, double f_max_hz, int samples,
                                                  int truncation_order) {
    if (!(f_max_hz > f_min_hz) || samples < 2) {
        throw Error(Errc::EmptyRange, "transmission needs f_max > f_min and at least two samples");
    }
    std::vector<FamilySpectrum> out;
    out.reserve(families.size());
    for (const auto& family : families) {
        const DampingRates rates = damping_rates(family);
        // Resonances just outside the window still shape its edges.
        const double margin_hz = 50.0 * rates.total / constants::two_pi;
        const ResonanceGrid grid = resonance_grid_in_range(family, f_min_hz - margin_hz,
                                                           f_max_hz + margin_hz, truncation_order);
        FamilySpectrum spectrum;
        spectrum.family = family.label;
        spectrum.samples.reserve(static_cast<std::size_t>(samples));
        for (int i = 0; i < samples; ++i) {
            const double f = f_min_hz + (f_max_hz - f_min_hz) * i / (samples - 1);
            const double w = constants::two_pi * f;
            double t = 1.0;
            for (double wl : grid.omegas) t *= 1.0 - through_port_dip(rates, w - wl);
            spectrum.samples.push_back({f, t});
        }
        out.push_back(std::move(spectrum));
    }
    return out;
}

double OverlapWindow::max_detuning_hz() const {
    double m = 0.0;
    for (double d : detunings_hz) m = std::max(m, std::abs(d));
    return m;
}

std::vector<OverlapWindow> find_overlap_windows(const std::vector<ModalFamily>& families,
                                                double f_min_hz, double f_max_hz,
                                                double tolerance_hz, int truncation_order) {
    if (families.empty()) return {};
    std::vector<const ModalFamily*> sorted;
    for (const auto& f : families) sorted.push_back(&f);
    std::sort(sorted.begin(), sorted.end(),
              [](const ModalFamily* a, const ModalFamily* b) { return a->label < b->label; });

    struct Line {
        int l;
        double f_hz;
    };
    std::vector<std::vector<Line>> lines;
    for (const ModalFamily* f : sorted) {
        const ResonanceGrid grid = resonance_grid_in_range(*f, f_min_hz, f_max_hz, truncation_order);
        std::vector<Line> ls;
        for (int l = grid.l_min; !grid.omegas.empty() && l <= grid.l_max; ++l) {
            ls.push_back({l, grid.omega(l) / constants::two_pi});
        }
        lines.push_back(std::move(ls));
    }

    std::vector<OverlapWindow> windows;
    const double span_limit = 2.0 * tolerance_hz;
    // Anchor on each line of the first family; every combination contains
    // exactly one anchor, so no window is produced twice.
    for (const Line& anchor : lines[0]) {
        std::vector<std::vector<Line>> candidates(lines.size());
        candidates[0] = {anchor};
        bool feasible = true;
        for (std::size_t k = 1; k < lines.size() && feasible; ++k) {
            for (const Line& line : lines[k]) {
                if (std::abs(line.f_hz - anchor.f_hz) <= span_limit) candidates[k].push_back(line);
            }
            feasible = !candidates[k].empty();
        }
        if (!feasible) continue;

        std::vector<std::size_t> idx(lines.size(), 0);
        while (true) {
            double lo = candidates[0][idx[0]].f_hz;
            double hi = lo;
            for (std::size_t k = 1; k < lines.size(); ++k) {
                lo = std::min(lo, candidates[k][idx[k]].f_hz);
                hi = std::max(hi, candidates[k][idx[k]].f_hz);
            }
            if (hi - lo <= span_limit) {
                OverlapWindow w;
                w.center_hz = 0.5 * (lo + hi);
                w.width_hz = hi - lo;
                for (std::size_t k = 0; k < lines.size(); ++k) {
                    w.families.push_back(sorted[k]->label);
                    w.pair_indices.push_back(candidates[k][idx[k]].l);
                    w.detunings_hz.push_back(candidates[k][idx[k]].f_hz - w.center_hz);
                }
                windows.push_back(std::move(w));
            }
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == candidates[k].size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }
    std::sort(windows.begin(), windows.end(), [](const OverlapWindow& a, const OverlapWindow& b) {
        const double da = a.max_detuning_hz();
        const double db = b.max_detuning_hz();
        if (da != db) return da < db;
        return a.center_hz < b.center_hz;
    });
    return windows;
}

std::map<FamilyLabel, double> composite_pump_weights(const std::map<FamilyLabel, double>& weights) {
    double norm2 = 0.0;
    for (const auto& [label, w] : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(Errc::InvalidArgument, "pump weights must be finite and nonnegative");
        }
        norm2 += w * w;
    }
    if (norm2 == 0.0) throw Error(Errc::AllZero, "at least one pump weight must be positive");
    const double norm = std::sqrt(norm2);
    std::map<FamilyLabel, double> out;
    for (const auto& [label, w] : weights) out[label] = w / norm;
    return out;
}

} // namespace qfc
