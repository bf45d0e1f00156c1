// qfc: command-line front end. Every subcommand loads the resonator config,
// runs one pipeline and prints to stdout, or writes a bundle with a manifest
// when --out is given.
//
// Exit codes: 0 ok, 1 computation error (including failed sweep cells),
// 2 config or usage error.

#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfc/config.hpp"
#include "qfc/dispersion.hpp"
#include "qfc/duan.hpp"
#include "qfc/error.hpp"
#include "qfc/fluct.hpp"
#include "qfc/io.hpp"
#include "qfc/oracle.hpp"
#include "qfc/phases.hpp"
#include "qfc/reproduce.hpp"
#include "qfc/steady.hpp"

#ifndef QFC_DEFAULT_CONFIG
#define QFC_DEFAULT_CONFIG "data/resonator_default.json"
#endif

using namespace qfc;
using oj = nlohmann::ordered_json;

namespace {

struct Globals {
    std::string config = QFC_DEFAULT_CONFIG;
    std::string out;
    int workers = 1;
    std::optional<double> omega;
    std::uint64_t seed = 1;
    std::string format;
};

// An operating point given either physically or directly in normalized form.
struct PointArgs {
    std::string family = "TE00";
    int pair_index = 1;
    double detuning_ghz = 0.0;
    double a_pin = 0.0;
    std::optional<double> f_norm;
    std::optional<double> dtp;
    std::optional<double> dtl;
    double coupling_fraction = 0.55;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family, "modal family (TE00, TM00, TE10, TM10)");
        cmd->add_option("--L", pair_index, "mode-pair index L >= 1");
        cmd->add_option("--detuning-ghz", detuning_ghz, "pump detuning (omega_p0 - Omega_p0)/2pi in GHz");
        cmd->add_option("--apin", a_pin, "input amplitude (unit set by run.drive_convention)");
        cmd->add_option("--apin-v-per-m", a_pin, "input amplitude, alias of --apin");
        cmd->add_option("--f-norm", f_norm, "raw mode: normalized drive F");
        cmd->add_option("--dtp", dtp, "raw mode: pump detuning / Gamma");
        cmd->add_option("--dtl", dtl, "raw mode: pair detuning / Gamma");
        cmd->add_option("--coupling-fraction", coupling_fraction, "raw mode: gamma / Gamma");
    }

    bool raw() const { return f_norm || dtp || dtl; }

    FamilyLabel label() const {
        const auto l = parse_family(family);
        if (!l) throw Error(Errc::InvalidArgument, "unknown family '" + family + "'");
        return *l;
    }

    std::pair<NormalizedDrive, double> resolve(const Config& cfg) const {
        if (raw()) {
            if (!(f_norm && dtp && dtl)) throw Error(Errc::InvalidArgument, "raw mode needs --f-norm, --dtp and --dtl");
            return {{*f_norm, *dtp, *dtl, *dtp - *dtl}, coupling_fraction};
        }
        const OperatingPoint op{label(), pair_index, detuning_ghz * 1e9, a_pin};
        const NormalizeOptions no{cfg.run.drive, cfg.run.truncation_order};
        return {normalize(op, cfg.resonator, no),
                damping_rates(cfg.resonator.family(op.family)).coupling_fraction()};
    }
};

std::vector<FamilyLabel> parse_families(const std::vector<std::string>& names) {
    std::vector<FamilyLabel> out;
    for (const auto& n : names) {
        const auto l = parse_family(n);
        if (!l) throw Error(Errc::InvalidArgument, "unknown family '" + n + "'");
        out.push_back(*l);
    }
    return out;
}

oj state_json(const SteadyState& s) {
    return {{"branch", s.branch == Branch::PumpOnly ? "pump_only" : "parametric"},
            {"ap2_norm", s.ap2},
            {"a2_norm", s.a2},
            {"phi", s.phi_defined ? oj(s.phi) : oj(nullptr)},
            {"psi", s.psi},
            {"stable", s.stable},
            {"growth_rate_norm", s.growth_rate}};
}

oj matrix_json(const Eigen::Matrix4d& m) {
    oj rows = oj::array();
    for (int i = 0; i < 4; ++i) {
        oj r = oj::array();
        for (int j = 0; j < 4; ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

oj complex_matrix_json(const Eigen::Matrix4cd& m) {
    oj flat = oj::array();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) flat.push_back({m(i, j).real(), m(i, j).imag()});
    }
    return flat;
}

// A table printable as CSV or as JSON records.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string render(const std::string& format) const {
        if (format == "json") {
            oj arr = oj::array();
            for (const auto& r : rows) {
                oj rec;
                for (std::size_t i = 0; i < header.size(); ++i) rec[header[i]] = r[i];
                arr.push_back(rec);
            }
            return arr.dump(2) + "\n";
        }
        io::Csv csv(header);
        for (const auto& r : rows) csv.row(r);
        return csv.str();
    }
};

class Runner {
public:
    explicit Runner(Globals& g) : g_(g) {}

    const Config& config() {
        if (!cfg_) {
            cfg_ = load_config(g_.config);
            if (g_.omega) cfg_->run.omega = *g_.omega;
            for (const auto& w : cfg_->warnings) std::cerr << "warning: " << w << "\n";
        }
        return *cfg_;
    }

    // Prints a single document, or stores it in a bundle under --out.
    void emit(const std::string& command, const std::string& name, const std::string& body) {
        if (g_.out.empty()) {
            std::cout << body;
            return;
        }
        io::Bundle b(command, config_hash(config()));
        b.add(name, body);
        b.write(g_.out);
    }

    void emit(const io::Bundle& bundle) {
        if (g_.out.empty()) {
            std::cout << bundle.manifest().dump(2) << "\n";
            std::cerr << "note: pass --out DIR to write the bundle files\n";
            return;
        }
        bundle.write(g_.out);
    }

    std::string format(const char* fallback) const { return g_.format.empty() ? fallback : g_.format; }

    Globals& g_;

private:
    std::optional<Config> cfg_;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum frequency comb simulator for multi-family Kerr microrings"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "resonator config JSON")->capture_default_str();
    app.add_option("--out", g.out, "output directory (bundle + manifest); stdout when omitted");
    app.add_option("--workers", g.workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--omega", g.omega, "analysis frequency in units of Gamma (overrides config)");
    app.add_option("--seed", g.seed, "seed for stochastic oracles");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    Runner run(g);
    int exit_code = 0;

    // dispersion
    auto* disp = app.add_subcommand("dispersion", "resonance grid and integrated dispersion");
    std::vector<std::string> disp_fams;
    int l_min = -20, l_max = 20;
    std::optional<int> order;
    bool table = false;
    disp->add_option("--family", disp_fams, "families (default: all)");
    disp->add_option("--l-min", l_min);
    disp->add_option("--l-max", l_max);
    disp->add_option("--order", order, "truncation order 2..5 (default from config)");
    disp->add_flag("--table", table, "check the transcribed FSR and lambda0 rows instead");
    disp->callback([&] {
        const Config& cfg = run.config();
        const int ord = order.value_or(cfg.run.truncation_order);
        Table t;
        if (table) {
            // Derived from D1 and f0 next to the transcribed table rows.
            t.header = {"family", "fsr_ghz", "fsr_table_ghz", "fsr_rel_err", "lambda0_nm", "lambda0_table_nm",
                        "lambda0_rel_err"};
            for (const auto& f : cfg.resonator.families) {
                const double fsr = f.fsr_hz() / 1e9;
                const double fsr_t = f.fsr_table_ghz.value_or(NAN);
                const double lam = f.lambda0_m() * 1e9;
                const double lam_t = f.lambda0_table_nm.value_or(NAN);
                t.rows.push_back({std::string(to_string(f.label)), io::number(fsr), io::number(fsr_t),
                                  io::number(std::abs(fsr - fsr_t) / fsr_t), io::number(lam), io::number(lam_t),
                                  io::number(std::abs(lam - lam_t) / lam_t)});
            }
        } else {
            t.header = {"family", "L", "f_Hz", "Dint_rad_s"};
            const auto fams = disp_fams.empty() ? std::vector<FamilyLabel>{} : parse_families(disp_fams);
            for (const auto& f : cfg.resonator.families) {
                if (!fams.empty() && std::find(fams.begin(), fams.end(), f.label) == fams.end()) continue;
                const ResonanceGrid grid = resonance_grid(f, l_min, l_max, ord);
                for (int l = l_min; l <= l_max; ++l) {
                    t.rows.push_back({std::string(to_string(f.label)), std::to_string(l),
                                      io::number(grid.omega(l) / constants::two_pi),
                                      io::number(integrated_dispersion(f, l, ord))});
                }
            }
        }
        const std::string fmt = run.format("csv");
        run.emit("dispersion", fmt == "json" ? "dispersion.json" : "dispersion.csv", t.render(fmt));
    });

    // overlap
    auto* overlap = app.add_subcommand("overlap", "cross-family resonance overlap windows");
    std::vector<std::string> ov_fams{"TE00", "TE10", "TM10"};
    double ov_fmin = 214.0, ov_fmax = 215.2, ov_tol = 2.0;
    overlap->add_option("--family", ov_fams)->capture_default_str();
    overlap->add_option("--f-min-thz", ov_fmin)->capture_default_str();
    overlap->add_option("--f-max-thz", ov_fmax)->capture_default_str();
    overlap->add_option("--tolerance-ghz", ov_tol)->capture_default_str();
    overlap->callback([&] {
        const Config& cfg = run.config();
        std::vector<ModalFamily> fams;
        for (FamilyLabel l : parse_families(ov_fams)) fams.push_back(cfg.resonator.family(l));
        Table t{{"center_Hz", "width_Hz", "families", "pair_indices", "detunings_Hz"}, {}};
        for (const auto& w : find_overlap_windows(fams, ov_fmin * 1e12, ov_fmax * 1e12, ov_tol * 1e9,
                                                  cfg.run.truncation_order)) {
            std::string names, idx, det;
            for (std::size_t k = 0; k < w.families.size(); ++k) {
                const char* sep = k ? ";" : "";
                names += sep + std::string(to_string(w.families[k]));
                idx += sep + std::to_string(w.pair_indices[k]);
                det += sep + io::number(w.detunings_hz[k]);
            }
            t.rows.push_back({io::number(w.center_hz), io::number(w.width_hz), names, idx, det});
        }
        const std::string fmt = run.format("csv");
        run.emit("overlap", fmt == "json" ? "overlap.json" : "overlap.csv", t.render(fmt));
    });

    // transmission
    auto* trans = app.add_subcommand("transmission", "through-port Lorentzian transmission");
    double tr_fmin = 214.585, tr_fmax = 214.615;
    int tr_samples = 2001;
    trans->add_option("--f-min-thz", tr_fmin)->capture_default_str();
    trans->add_option("--f-max-thz", tr_fmax)->capture_default_str();
    trans->add_option("--samples", tr_samples)->capture_default_str();
    trans->callback([&] {
        const Config& cfg = run.config();
        const auto spectra = transmission_spectrum(cfg.resonator.families, tr_fmin * 1e12, tr_fmax * 1e12,
                                                   tr_samples, cfg.run.truncation_order);
        Table t{{"family", "f_Hz", "transmission"}, {}};
        for (const auto& s : spectra) {
            for (const auto& p : s.samples) {
                t.rows.push_back({std::string(to_string(s.family)), io::number(p.f_hz), io::number(p.transmission)});
            }
        }
        const std::string fmt = run.format("csv");
        run.emit("transmission", fmt == "json" ? "transmission.json" : "transmission.csv", t.render(fmt));
    });

    // steady
    auto* steady = app.add_subcommand("steady", "steady-state branches of one operating point");
    PointArgs st_pt;
    st_pt.attach(steady);
    steady->callback([&] {
        const Config& cfg = run.config();
        const auto [drive, cf] = st_pt.resolve(cfg);
        (void)cf;
        SolverOptions so;
        so.residual_tolerance = cfg.run.residual_tolerance;
        oj out;
        out["f_norm"] = drive.f_norm;
        out["dtp"] = drive.dtp;
        out["dtl"] = drive.dtl;
        oj branches = oj::array();
        for (const auto& s : pump_only_branches(drive.f_norm, drive.dtp)) branches.push_back(state_json(s));
        if (drive.f_norm > 0.0) {
            for (const auto& s : parametric_branch(drive.f_norm, drive.dtp, drive.dtl, so)) {
                branches.push_back(state_json(s));
            }
        }
        out["branches"] = branches;
        const ThresholdReport th = threshold(drive.dtp, drive.dtl, cfg.run.f_max);
        out["threshold"] = {{"exists", th.exists}, {"f_threshold", th.exists ? oj(th.f_threshold) : oj(nullptr)}};
        run.emit("steady", "steady.json", out.dump(2) + "\n");
    });

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "output noise spectrum S(omega) at the lowest pump root");
    PointArgs sp_pt;
    sp_pt.attach(spectrum);
    spectrum->callback([&] {
        const Config& cfg = run.config();
        const auto [drive, cf] = sp_pt.resolve(cfg);
        const auto pumps = pump_only_branches(drive.f_norm, drive.dtp);
        const auto sys = build_m<double>(pumps.front(), drive.dtl, cf);
        const auto spec = noise_spectrum(sys, cfg.run.omega);
        oj out;
        out["omega"] = spec.omega;
        out["s"] = complex_matrix_json(spec.s);
        out["sigma"] = matrix_json(quadrature_covariance(spec));
        out["max_eig_re_norm"] = max_real_eigenvalue(sys.m);
        run.emit("spectrum", "spectrum.json", out.dump(2) + "\n");
    });

    // duan
    auto* duan = app.add_subcommand("duan", "minimized Duan criterion for an operating point or a covariance");
    PointArgs du_pt;
    du_pt.attach(duan);
    std::string sigma_json;
    duan->add_option("--sigma", sigma_json, "4x4 covariance over (X1,Y1,X2,Y2) as a JSON array of rows");
    duan->callback([&] {
        Eigen::Matrix4d sigma;
        if (!sigma_json.empty()) {
            const auto j = nlohmann::json::parse(sigma_json);
            if (!j.is_array() || j.size() != 4) throw Error(Errc::InvalidArgument, "--sigma needs 4 rows");
            for (int i = 0; i < 4; ++i) {
                if (!j[i].is_array() || j[i].size() != 4) throw Error(Errc::InvalidArgument, "--sigma needs 4 columns");
                for (int k = 0; k < 4; ++k) sigma(i, k) = j[i][k].get<double>();
            }
        } else {
            const Config& cfg = run.config();
            const auto [drive, cf] = du_pt.resolve(cfg);
            const auto pumps = pump_only_branches(drive.f_norm, drive.dtp);
            sigma = quadrature_covariance(noise_spectrum(build_m<double>(pumps.front(), drive.dtl, cf),
                                                         cfg.run.omega));
        }
        const auto r = minimize_duan(sigma);
        oj out{{"c_min", r.c_min}, {"theta_plus", r.theta_plus}, {"theta_minus", r.theta_minus},
               {"entangled", r.entangled}};
        if (g.out.empty()) {
            std::cout << out.dump(2) << "\n";
        } else {
            io::Bundle b("duan", sigma_json.empty() ? config_hash(run.config()) : io::fnv1a_hex(sigma_json));
            b.add("duan.json", out.dump(2) + "\n");
            b.write(g.out);
        }
    });

    // phase-diagram
    auto* phase = app.add_subcommand("phase-diagram", "NE/ET/MI sweep over detuning and amplitude");
    std::string ph_family = "TE00";
    std::vector<int> ph_ls{1};
    SweepAxes axes;
    double dmin_ghz = axes.delta_min_hz * 1e-9, dmax_ghz = axes.delta_max_hz * 1e-9;
    auto add_axes = [&](CLI::App* cmd) {
        cmd->add_option("--delta-min-ghz", dmin_ghz)->capture_default_str();
        cmd->add_option("--delta-max-ghz", dmax_ghz)->capture_default_str();
        cmd->add_option("--delta-points", axes.delta_points)->capture_default_str();
        cmd->add_option("--apin-min", axes.amplitude_min)->capture_default_str();
        cmd->add_option("--apin-max", axes.amplitude_max)->capture_default_str();
        cmd->add_option("--apin-points", axes.amplitude_points)->capture_default_str();
    };
    auto final_axes = [&] {
        SweepAxes a = axes;
        a.delta_min_hz = dmin_ghz * 1e9;
        a.delta_max_hz = dmax_ghz * 1e9;
        return a;
    };
    phase->add_option("--family", ph_family)->capture_default_str();
    phase->add_option("--L", ph_ls, "pair indices")->capture_default_str();
    add_axes(phase);
    phase->callback([&] {
        std::size_t failed = 0;
        const io::Bundle b = phase_diagram_bundle(run.config(), parse_families({ph_family}).front(), ph_ls,
                                                  final_axes(), g.workers, &failed);
        run.emit(b);
        if (failed > 0) {
            std::cerr << failed << " cell(s) failed; see the error column\n";
            exit_code = 1;
        }
    });

    // best-pump
    auto* best = app.add_subcommand("best-pump", "shared detuning and per-family amplitudes");
    std::vector<std::string> bp_fams{"TE00", "TE10", "TM10"};
    std::vector<int> bp_ls{1, 2, 3};
    best->add_option("--family", bp_fams)->capture_default_str();
    best->add_option("--L", bp_ls)->capture_default_str();
    add_axes(best);
    best->callback([&] {
        const Config& cfg = run.config();
        const SweepAxes a = final_axes();
        JointPumpOptions jo;
        jo.classify = classify_options(cfg);
        jo.mi_margin_cells = cfg.run.mi_margin_cells;
        jo.workers = g.workers;
        const JointPump r = best_joint_pump(cfg.resonator, parse_families(bp_fams), bp_ls,
                                            linear_axis(a.delta_min_hz, a.delta_max_hz, a.delta_points),
                                            linear_axis(a.amplitude_min, a.amplitude_max, a.amplitude_points), jo);
        oj out;
        out["delta_p0_hz"] = r.delta_p0_hz;
        out["worst_c_min"] = r.worst_c_min;
        oj fams = oj::array();
        for (const auto& f : r.families) {
            fams.push_back({{"family", std::string(to_string(f.family))}, {"a_pin", f.a_pin},
                            {"worst_c_min", f.worst_c_min}});
        }
        out["families"] = fams;
        run.emit("best-pump", "best_pump.json", out.dump(2) + "\n");
    });

    // oracle
    auto* orc = app.add_subcommand("oracle", "independent verification engines");
    std::string orc_op = "ode";
    PointArgs orc_pt;
    orc_pt.attach(orc);
    double t_end = 200.0, dt = 0.01, fd_h = 1e-6;
    int n_samples = 2000, grid_n = 1024;
    orc->add_option("op", orc_op, "ode | jacobian | langevin | brute-duan")
        ->check(CLI::IsMember({"ode", "jacobian", "langevin", "brute-duan"}));
    orc->add_option("--t-end", t_end)->capture_default_str();
    orc->add_option("--dt", dt)->capture_default_str();
    orc->add_option("--fd-step", fd_h, "finite-difference step")->capture_default_str();
    orc->add_option("--samples", n_samples, "Langevin trajectories")->capture_default_str();
    orc->add_option("--grid", grid_n, "brute-force Duan grid size")->capture_default_str();
    orc->callback([&] {
        const Config& cfg = run.config();
        const auto [drive, cf] = orc_pt.resolve(cfg);
        oj out;
        out["op"] = orc_op;
        if (orc_op == "ode") {
            const auto tr = oracle::integrate_mean_field({}, drive, t_end, dt, std::max(1, static_cast<int>(1.0 / dt)));
            oj samples = oj::array();
            for (std::size_t i = 0; i < tr.times.size(); ++i) {
                const auto& s = tr.states[i];
                samples.push_back({{"t", tr.times[i]}, {"ap2_norm", std::norm(s.pump)},
                                   {"a_minus2_norm", std::norm(s.minus)}, {"a_plus2_norm", std::norm(s.plus)}});
            }
            out["trajectory"] = samples;
        } else if (orc_op == "jacobian") {
            const auto pumps = pump_only_branches(drive.f_norm, drive.dtp);
            out["fd_jacobian"] = complex_matrix_json(oracle::fd_jacobian(pumps.front(), drive, fd_h));
            out["analytic"] = complex_matrix_json(build_m<double>(pumps.front(), drive.dtl, cf).m);
        } else if (orc_op == "langevin") {
            oracle::LangevinOptions lo;
            lo.n_samples = n_samples;
            lo.seed = g.seed;
            lo.coupling_fraction = cf;
            const auto est = oracle::langevin_covariance(drive, lo);
            out["intracavity"] = matrix_json(est.intracavity);
            out["intracavity_se"] = matrix_json(est.intracavity_se);
            out["output"] = matrix_json(est.output);
            out["output_se"] = matrix_json(est.output_se);
        } else {
            const auto pumps = pump_only_branches(drive.f_norm, drive.dtp);
            const Eigen::Matrix4d sigma = quadrature_covariance(
                noise_spectrum(build_m<double>(pumps.front(), drive.dtl, cf), cfg.run.omega));
            const auto r = oracle::brute_force_duan(sigma, grid_n);
            out["c_min"] = r.c_min;
            out["theta_plus"] = r.theta_plus;
            out["theta_minus"] = r.theta_minus;
        }
        run.emit("oracle", "oracle.json", out.dump(2) + "\n");
    });

    // reproduce
    auto* repro = app.add_subcommand("reproduce", "figure drivers (fig2 .. fig7)");
    std::string fig_name;
    repro->add_option("figure", fig_name)->required()->check(
        CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}));
    add_axes(repro);
    repro->callback([&] {
        ReproduceOptions ro;
        ro.workers = g.workers;
        ro.axes = final_axes();
        std::size_t failed = 0;
        const io::Bundle b = reproduce(*parse_figure(fig_name), run.config(), ro, &failed);
        run.emit(b);
        if (failed > 0) {
            std::cerr << failed << " computation(s) failed; see the bundle\n";
            exit_code = 1;
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::Parse || e.code() == Errc::Validation ? 2 : 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
