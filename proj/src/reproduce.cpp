#include "qfc/reproduce.hpp"

#include <cmath>

#include "qfc/dispersion.hpp"
#include "qfc/duan.hpp"
#include "qfc/error.hpp"
#include "qfc/fluct.hpp"

namespace qfc {

namespace {

using oj = nlohmann::ordered_json;

std::string lower(FamilyLabel f) {
    std::string s(to_string(f));
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

std::size_t failed_count(const SweepGrid& g) {
    std::size_t n = 0;
    for (const PhasePoint& p : g.points) n += p.failed ? 1 : 0;
    return n;
}

oj axes_json(const SweepAxes& a) {
    return {{"delta_min_hz", a.delta_min_hz}, {"delta_max_hz", a.delta_max_hz}, {"delta_points", a.delta_points},
            {"amplitude_min", a.amplitude_min}, {"amplitude_max", a.amplitude_max},
            {"amplitude_points", a.amplitude_points}};
}

oj settings_json(const Config& config) {
    return {{"eps_ne", config.run.eps_ne},
            {"omega_norm", config.run.omega},
            {"residual_tolerance", config.run.residual_tolerance},
            {"drive_convention", std::string(to_string(config.run.drive))},
            {"truncation_order", config.run.truncation_order}};
}

oj grid_summary(const SweepGrid& g) {
    return {{"family", std::string(to_string(g.family))}, {"pair_index", g.pair_index},
            {"ne_cells", g.count(Phase::NE)},           {"et_cells", g.count(Phase::ET)},
            {"mi_cells", g.count(Phase::MI)},           {"failed_cells", failed_count(g)}};
}

void add_grid(io::Bundle& bundle, const Config& config, const SweepGrid& g, const std::string& hash) {
    const std::string stem = "phase_" + lower(g.family) + "_L" + std::to_string(g.pair_index);
    bundle.add(stem + ".csv", io::phase_csv(g, io::amplitude_column(config.run.drive)));
    io::HeatMapStyle style;
    style.bucket_edges = config.run.bucket_edges;
    style.title = std::string(to_string(g.family)) + " L=" + std::to_string(g.pair_index) + " C_min";
    style.amplitude_label = config.run.drive == DriveConvention::PhotonFlux ? "a_pin (sqrt(photons/s))"
                                                                           : "a_pin (V/m)";
    bundle.add(stem + ".svg", io::phase_svg(g, style, hash));
}

std::vector<SweepGrid> sweep_axes(const Config& config, FamilyLabel family, const std::vector<int>& ls,
                                  const SweepAxes& axes, int workers) {
    return sweep(config.resonator, family, ls,
                 linear_axis(axes.delta_min_hz, axes.delta_max_hz, axes.delta_points),
                 linear_axis(axes.amplitude_min, axes.amplitude_max, axes.amplitude_points),
                 classify_options(config), workers);
}

// Lowest pump-only root and the pair photon number it feeds, if stable.
struct TuningSample {
    PhasePoint point;
    double ap2 = 0.0;
    double a2 = 0.0;
    double pair_photons = std::nan("");
};

TuningSample tuning_sample(const Config& config, const OperatingPoint& op) {
    TuningSample s;
    s.point = classify_point(op, config.resonator, classify_options(config));
    if (s.point.failed) return s;
    const NormalizedDrive drive = normalize(op, config.resonator, classify_options(config).normalize);
    const auto pumps = pump_only_branches(drive.f_norm, drive.dtp);
    s.ap2 = pumps.front().ap2;
    const auto par = parametric_branch(drive.f_norm, drive.dtp, drive.dtl);
    if (!par.empty()) s.a2 = par.front().a2;
    const double cf = damping_rates(config.resonator.family(op.family)).coupling_fraction();
    const auto sys = build_m<double>(pumps.front(), drive.dtl, cf);
    if (max_real_eigenvalue(sys.m) < 0.0) s.pair_photons = intracavity_pair_photons(sys);
    return s;
}

io::Bundle fig2(const Config& config, const std::string& hash) {
    io::Bundle b("reproduce fig2", hash);
    io::Csv csv({"family", "L", "f_Hz", "Dint_rad_s"});
    std::vector<io::Series> series;
    for (const ModalFamily& f : config.resonator.families) {
        const ResonanceGrid g = resonance_grid_in_range(f, 130e12, 260e12, config.run.truncation_order);
        io::Series s{std::string(to_string(f.label)), {}, {}};
        for (int l = g.l_min; l <= g.l_max; ++l) {
            const double dint = integrated_dispersion(f, l, config.run.truncation_order);
            csv.row({std::string(to_string(f.label)), std::to_string(l), io::number(g.omega(l) / constants::two_pi),
                     io::number(dint)});
            s.x.push_back(g.omega(l) / constants::two_pi * 1e-12);
            s.y.push_back(dint / constants::two_pi * 1e-9);
        }
        series.push_back(std::move(s));
    }
    b.add("fig2_dint.csv", csv.str());
    b.add("fig2_dint.svg", io::line_plot_svg(series, "frequency (THz)", "D_int / 2 pi (GHz)",
                                             "Integrated dispersion", hash));
    return b;
}

io::Bundle fig3(const Config& config, const std::string& hash) {
    io::Bundle b("reproduce fig3", hash);
    const double f_min = 214.585e12;
    const double f_max = 214.615e12;
    const auto spectra = transmission_spectrum(config.resonator.families, f_min, f_max, 3001,
                                               config.run.truncation_order);
    std::vector<std::string> header{"f_Hz"};
    for (const auto& s : spectra) header.push_back("transmission_" + lower(s.family));
    io::Csv csv(header);
    for (std::size_t i = 0; i < spectra.front().samples.size(); ++i) {
        std::vector<std::string> row{io::number(spectra.front().samples[i].f_hz)};
        for (const auto& s : spectra) row.push_back(io::number(s.samples[i].transmission));
        csv.row(row);
    }
    b.add("fig3_transmission.csv", csv.str());

    std::vector<io::Series> series;
    for (const auto& s : spectra) {
        io::Series line{std::string(to_string(s.family)), {}, {}};
        for (const auto& p : s.samples) {
            line.x.push_back((p.f_hz - 214.6e12) * 1e-9);
            line.y.push_back(p.transmission);
        }
        series.push_back(std::move(line));
    }
    b.add("fig3_transmission.svg", io::line_plot_svg(series, "f - 214.6 THz (GHz)", "transmission",
                                                     "Through-port transmission", hash));

    std::vector<ModalFamily> pumped;
    for (FamilyLabel l : {FamilyLabel::TE00, FamilyLabel::TE10, FamilyLabel::TM10}) {
        pumped.push_back(config.resonator.family(l));
    }
    const auto windows = find_overlap_windows(pumped, 214.0e12, 215.2e12, 2e9, config.run.truncation_order);
    io::Csv ov({"center_Hz", "width_Hz", "families", "pair_indices", "detunings_Hz"});
    for (const auto& w : windows) {
        std::string fams, idx, det;
        for (std::size_t k = 0; k < w.families.size(); ++k) {
            const char* sep = k ? ";" : "";
            fams += sep + std::string(to_string(w.families[k]));
            idx += sep + std::to_string(w.pair_indices[k]);
            det += sep + io::number(w.detunings_hz[k]);
        }
        ov.row({io::number(w.center_hz), io::number(w.width_hz), fams, idx, det});
    }
    b.add("fig3_overlap.csv", ov.str());
    return b;
}

io::Bundle fig4(const Config& config, const ReproduceOptions& opt, std::size_t& failed) {
    std::size_t f = 0;
    io::Bundle b = phase_diagram_bundle(config, FamilyLabel::TE00, {1}, opt.axes, opt.workers, &f,
                                        "reproduce fig4");
    failed += f;

    // Star points: one inside ET, one inside MI; cross sections through the ET star.
    const OperatingPoint et{FamilyLabel::TE00, 1, 0.36e9, 1.1e9};
    const OperatingPoint mi{FamilyLabel::TE00, 1, 1.0e9, 4.5e9};
    oj stars = oj::array();
    for (const auto& [name, op] : {std::pair{"et_star", et}, std::pair{"mi_star", mi}}) {
        const PhasePoint p = classify_point(op, config.resonator, classify_options(config));
        failed += p.failed ? 1 : 0;
        stars.push_back({{"name", name},
                         {"delta_p0_hz", op.delta_p0_hz},
                         {"a_pin", op.a_pin},
                         {"phase", std::string(to_string(p.phase))},
                         {"c_min", std::isfinite(p.c_min) ? oj(p.c_min) : oj(nullptr)}});
    }
    b.add("fig4_stars.json", stars.dump(2) + "\n");

    auto section = [&](bool along_delta, const OperatingPoint& centre) {
        io::Csv csv({along_delta ? "delta_p0_hz" : io::amplitude_column(config.run.drive), "phase", "c_min", "ap2_norm", "n_branches"});
        const auto axis = along_delta ? linear_axis(opt.axes.delta_min_hz, opt.axes.delta_max_hz, 128)
                                      : linear_axis(opt.axes.amplitude_min, opt.axes.amplitude_max, 128);
        for (double v : axis) {
            OperatingPoint op = centre;
            (along_delta ? op.delta_p0_hz : op.a_pin) = v;
            const TuningSample s = tuning_sample(config, op);
            failed += s.point.failed ? 1 : 0;
            csv.row({io::number(v), std::string(to_string(s.point.phase)), io::number(s.point.c_min),
                     io::number(s.ap2), std::to_string(s.point.n_branches)});
        }
        return csv.str();
    };
    b.add("fig4_section_delta_et.csv", section(true, et));
    b.add("fig4_section_amplitude_et.csv", section(false, et));
    b.add("fig4_section_delta_mi.csv", section(true, mi));
    b.add("fig4_section_amplitude_mi.csv", section(false, mi));
    return b;
}

io::Bundle fig5(const Config& config, const ReproduceOptions& opt, std::size_t& failed) {
    std::size_t f = 0;
    io::Bundle b = phase_diagram_bundle(config, FamilyLabel::TE00, {1, 2, 3, 4, 5, 6}, opt.axes, opt.workers, &f,
                                        "reproduce fig5");
    failed += f;
    return b;
}

io::Bundle fig6(const Config& config, const std::string& hash, std::size_t& failed) {
    io::Bundle b("reproduce fig6", hash);
    // Amplitudes from the joint optimum quoted with the figure; L = 1.
    const std::pair<FamilyLabel, double> pumps[] = {
        {FamilyLabel::TE00, 1.1e9}, {FamilyLabel::TE10, 2.45e9}, {FamilyLabel::TM10, 1.65e9}};
    io::Csv csv({"family", io::amplitude_column(config.run.drive), "delta_p0_hz", "phase", "c_min", "ap2_norm", "a2_norm", "pair_photons"});
    std::vector<io::Series> power, cmin;
    for (const auto& [family, amp] : pumps) {
        io::Series p{std::string(to_string(family)), {}, {}};
        io::Series c{std::string(to_string(family)), {}, {}};
        for (double d : linear_axis(-0.4e9, 1.2e9, 128)) {
            const TuningSample s = tuning_sample(config, {family, 1, d, amp});
            failed += s.point.failed ? 1 : 0;
            csv.row({std::string(to_string(family)), io::number(amp), io::number(d),
                     std::string(to_string(s.point.phase)), io::number(s.point.c_min), io::number(s.ap2),
                     io::number(s.a2), io::number(s.pair_photons)});
            p.x.push_back(d * 1e-9);
            p.y.push_back(s.ap2);
            c.x.push_back(d * 1e-9);
            c.y.push_back(s.point.c_min);
        }
        power.push_back(std::move(p));
        cmin.push_back(std::move(c));
    }
    b.add("fig6_tuning.csv", csv.str());
    b.add("fig6_pump_power.svg", io::line_plot_svg(power, "pump detuning (GHz)", "A_p^2", "Intracavity pump", hash));
    b.add("fig6_cmin.svg", io::line_plot_svg(cmin, "pump detuning (GHz)", "C_min", "Entanglement", hash));
    return b;
}

io::Bundle fig7(const Config& config, const ReproduceOptions& opt, const std::string& hash,
                std::size_t& failed) {
    io::Bundle b("reproduce fig7", hash);
    const std::vector<FamilyLabel> families{FamilyLabel::TE00, FamilyLabel::TE10, FamilyLabel::TM10};
    const std::vector<int> ls{1, 2, 3};
    std::vector<std::vector<SweepGrid>> grids;
    oj summary = oj::array();
    for (FamilyLabel fam : families) {
        grids.push_back(sweep_axes(config, fam, ls, opt.axes, opt.workers));
        for (const SweepGrid& g : grids.back()) {
            failed += failed_count(g);
            add_grid(b, config, g, hash);
            summary.push_back(grid_summary(g));
        }
    }
    oj result;
    try {
        const JointPump best = best_joint_pump(grids, config.run.eps_ne, config.run.mi_margin_cells);
        result["delta_p0_hz"] = best.delta_p0_hz;
        result["worst_c_min"] = best.worst_c_min;
        oj fams = oj::array();
        io::Csv csv({"family", "delta_p0_hz", io::amplitude_column(config.run.drive), "worst_c_min"});
        for (const FamilyPump& f : best.families) {
            fams.push_back({{"family", std::string(to_string(f.family))}, {"a_pin", f.a_pin},
                            {"worst_c_min", f.worst_c_min}});
            csv.row({std::string(to_string(f.family)), io::number(best.delta_p0_hz), io::number(f.a_pin),
                     io::number(f.worst_c_min)});
        }
        result["families"] = fams;
        b.add("fig7_best_pump.csv", csv.str());
    } catch (const Error& e) {
        ++failed;
        result["error"] = e.what();
    }
    oj meta;
    meta["config_hash"] = hash;
    meta["settings"] = settings_json(config);
    meta["mi_margin_cells"] = config.run.mi_margin_cells;
    meta["pair_indices"] = ls;
    meta["axes"] = axes_json(opt.axes);
    meta["grids"] = summary;
    meta["best_pump"] = result;
    b.add("fig7_run.json", meta.dump(2) + "\n");
    return b;
}

} // namespace

std::optional<Figure> parse_figure(std::string_view text) {
    for (Figure f : {Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7}) {
        if (to_string(f) == text) return f;
    }
    return std::nullopt;
}

std::string_view to_string(Figure figure) {
    switch (figure) {
        case Figure::Fig2: return "fig2";
        case Figure::Fig3: return "fig3";
        case Figure::Fig4: return "fig4";
        case Figure::Fig5: return "fig5";
        case Figure::Fig6: return "fig6";
        case Figure::Fig7: return "fig7";
    }
    return "?";
}

ClassifyOptions classify_options(const Config& config) {
    ClassifyOptions o;
    o.eps_ne = config.run.eps_ne;
    o.omega = config.run.omega;
    o.normalize.convention = config.run.drive;
    o.normalize.truncation_order = config.run.truncation_order;
    o.solver.residual_tolerance = config.run.residual_tolerance;
    return o;
}

io::Bundle phase_diagram_bundle(const Config& config, FamilyLabel family, const std::vector<int>& pair_indices,
                                const SweepAxes& axes, int workers, std::size_t* failed_cells,
                                const std::string& command) {
    const std::string hash = config_hash(config);
    io::Bundle b(command, hash);
    const auto grids = sweep_axes(config, family, pair_indices, axes, workers);
    oj summary = oj::array();
    std::size_t failed = 0;
    for (const SweepGrid& g : grids) {
        add_grid(b, config, g, hash);
        summary.push_back(grid_summary(g));
        failed += failed_count(g);
    }
    oj meta;
    meta["config_hash"] = hash;
    meta["family"] = std::string(to_string(family));
    meta["pair_indices"] = pair_indices;
    meta["settings"] = settings_json(config);
    meta["axes"] = axes_json(axes);
    meta["grids"] = summary;
    b.add("run.json", meta.dump(2) + "\n");
    if (failed_cells) *failed_cells = failed;
    return b;
}

io::Bundle reproduce(Figure figure, const Config& config, const ReproduceOptions& options,
                     std::size_t* failed_cells) {
    const std::string hash = config_hash(config);
    std::size_t failed = 0;
    io::Bundle b = [&] {
        switch (figure) {
            case Figure::Fig2: return fig2(config, hash);
            case Figure::Fig3: return fig3(config, hash);
            case Figure::Fig4: return fig4(config, options, failed);
            case Figure::Fig5: return fig5(config, options, failed);
            case Figure::Fig6: return fig6(config, hash, failed);
            case Figure::Fig7: return fig7(config, options, hash, failed);
        }
        throw Error(Errc::InvalidArgument, "unknown figure");
    }();
    if (failed_cells) *failed_cells = failed;
    return b;
}

} // namespace qfc
