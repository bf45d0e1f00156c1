#include "qfc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qfc/error.hpp"
#include "qfc/io.hpp"

namespace qfc {

namespace {

using json = nlohmann::json;

struct Unit {
    const char* suffix;
    double scale; // to SI
};

constexpr Unit kFrequency[] = {{"hz", 1.0}, {"ghz", 1e9}, {"thz", 1e12}};
constexpr Unit kLength[] = {{"m", 1.0}, {"um", 1e-6}, {"nm", 1e-9}};
constexpr Unit kArea[] = {{"m2", 1.0}, {"um2", 1e-12}};
constexpr Unit kAngular[] = {{"rad_s", 1.0}};
constexpr Unit kIndex[] = {{"m2_per_w", 1.0}};

// 1-based line of the first occurrence of "key" in the document, or 0.
std::size_t line_of_key(std::string_view text, const std::string& key) {
    const std::string quoted = "\"" + key + "\"";
    const auto pos = text.find(quoted);
    if (pos == std::string_view::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

// Walks one JSON object, consuming keys and remembering which were read so
// leftovers can be rejected.
class Reader {
public:
    Reader(const json& obj, std::string path, std::string_view text, const std::string& source)
        : obj_(obj), path_(std::move(path)), text_(text), source_(source) {
        if (!obj_.is_object()) fail(path_, "expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        std::ostringstream os;
        os << source_;
        const std::string leaf = key.substr(key.rfind('.') + 1);
        if (const auto line = line_of_key(text_, leaf); line > 0) os << ":" << line;
        os << ": key '" << key << "': " << what;
        throw Error(Errc::Parse, os.str());
    }

    std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return obj_.at(key);
    }

    double number(const std::string& key) {
        if (!has(key)) fail(full(key), "missing");
        const json& v = raw(key);
        if (!v.is_number()) fail(full(key), "expected a number");
        return v.get<double>();
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(full(key), "expected an integer");
        return v.get<int>();
    }

    std::string string(const std::string& key) {
        if (!has(key)) fail(full(key), "missing");
        const json& v = raw(key);
        if (!v.is_string()) fail(full(key), "expected a string");
        return v.get<std::string>();
    }

    // Exactly one of base_<suffix> may appear; value is returned in SI.
    template <std::size_t N>
    std::optional<double> quantity(const std::string& base, const Unit (&units)[N], bool required) {
        std::optional<double> out;
        std::string found;
        for (const Unit& u : units) {
            const std::string key = base + "_" + u.suffix;
            if (!has(key)) continue;
            if (out) fail(full(key), "conflicts with " + full(found));
            out = number(key) * u.scale;
            found = key;
        }
        if (!out && required) {
            std::string options;
            for (const Unit& u : units) options += (options.empty() ? "" : ", ") + base + "_" + u.suffix;
            fail(full(base), "missing (expected one of " + options + ")");
        }
        return out;
    }

    void finish() const {
        for (const auto& item : obj_.items()) {
            if (!used_.count(item.key())) fail(full(item.key()), "unknown key");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::string_view text_;
    const std::string& source_;
    std::set<std::string> used_;
};

ModalFamily read_family(Reader& r) {
    ModalFamily f;
    const std::string label = r.string("label");
    const auto parsed = parse_family(label);
    if (!parsed) r.fail(r.full("label"), "unknown modal family '" + label + "'");
    f.label = *parsed;
    for (std::size_t n = 0; n < f.d.size(); ++n) {
        f.d[n] = *r.quantity("d" + std::to_string(n + 1), kAngular, true);
    }
    f.f0_hz = *r.quantity("f0", kFrequency, true);
    f.q_total = r.number("q_total");
    f.intrinsic_fraction = r.number("intrinsic_fraction");
    f.a_eff_m2 = *r.quantity("a_eff", kArea, true);
    f.n_eff = r.number("n_eff");
    f.eta = *r.quantity("eta", kAngular, true);
    f.g0 = r.optional_number("g0").value_or(0.0);
    // Transcribed check rows keep their table units.
    f.fsr_table_ghz = r.optional_number("fsr_ghz");
    f.lambda0_table_nm = r.optional_number("lambda0_nm");
    r.finish();
    return f;
}

Geometry read_geometry(Reader& r) {
    Geometry g;
    auto field = [&](const char* key) { return r.optional_number(key).value_or(0.0); };
    g.ww_um = field("ww_um");
    g.wh_um = field("wh_um");
    g.theta_deg = field("theta_deg");
    g.cb_um = field("cb_um");
    g.ch_um = field("ch_um");
    g.cw_um = field("cw_um");
    g.gap_nm = field("gap_nm");
    r.finish();
    return g;
}

RunSettings read_run(Reader& r) {
    RunSettings s;
    if (r.has("drive_convention")) {
        const std::string name = r.string("drive_convention");
        const auto conv = parse_drive_convention(name);
        if (!conv) r.fail(r.full("drive_convention"), "unknown convention '" + name + "'");
        s.drive = *conv;
    }
    s.truncation_order = r.integer("truncation_order", s.truncation_order);
    s.eps_ne = r.optional_number("eps_ne").value_or(s.eps_ne);
    s.omega = r.optional_number("omega_norm").value_or(s.omega);
    s.residual_tolerance = r.optional_number("residual_tolerance").value_or(s.residual_tolerance);
    s.f_max = r.optional_number("f_max_norm").value_or(s.f_max);
    s.mi_margin_cells = r.integer("mi_margin_cells", s.mi_margin_cells);
    if (r.has("bucket_edges")) {
        const json& edges = r.raw("bucket_edges");
        if (!edges.is_array()) r.fail(r.full("bucket_edges"), "expected an array of numbers");
        s.bucket_edges.clear();
        for (const json& e : edges) {
            if (!e.is_number()) r.fail(r.full("bucket_edges"), "expected an array of numbers");
            s.bucket_edges.push_back(e.get<double>());
        }
    }
    r.finish();
    return s;
}

std::vector<std::string> validate(const RunSettings& s) {
    std::vector<std::string> issues;
    if (s.truncation_order < 2 || s.truncation_order > 5) issues.push_back("run.truncation_order: must lie in [2, 5]");
    if (!(s.eps_ne > 0.0)) issues.push_back("run.eps_ne: must be > 0");
    if (!std::isfinite(s.omega)) issues.push_back("run.omega_norm: must be finite");
    if (!(s.residual_tolerance > 0.0)) issues.push_back("run.residual_tolerance: must be > 0");
    if (!(s.f_max > 0.0)) issues.push_back("run.f_max_norm: must be > 0");
    if (s.mi_margin_cells < 0) issues.push_back("run.mi_margin_cells: must be >= 0");
    for (std::size_t i = 1; i < s.bucket_edges.size(); ++i) {
        if (!(s.bucket_edges[i] > s.bucket_edges[i - 1])) {
            issues.push_back("run.bucket_edges: must be strictly increasing");
            break;
        }
    }
    return issues;
}

} // namespace

Config parse_config(std::string_view text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto byte = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n');
        throw Error(Errc::Parse, source + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
    }

    Config cfg;
    Reader top(doc, "", text, source);
    if (top.has("schema")) {
        const std::string schema = top.string("schema");
        if (schema != "qfc.config/1") top.fail("schema", "unsupported schema '" + schema + "'");
    }

    if (!top.has("resonator")) top.fail("resonator", "missing");
    Reader res(top.raw("resonator"), "resonator", text, source);
    cfg.resonator.radius_m = *res.quantity("radius", kLength, true);
    cfg.resonator.n2 = *res.quantity("n2", kIndex, true);
    cfg.resonator.n0 = res.optional_number("n0");
    if (res.has("geometry")) {
        Reader geo(res.raw("geometry"), "resonator.geometry", text, source);
        cfg.resonator.geometry = read_geometry(geo);
    }
    if (!res.has("families")) res.fail("resonator.families", "missing");
    const json& fams = res.raw("families");
    if (!fams.is_array()) res.fail("resonator.families", "expected an array");
    for (std::size_t i = 0; i < fams.size(); ++i) {
        Reader fr(fams[i], "resonator.families[" + std::to_string(i) + "]", text, source);
        cfg.resonator.families.push_back(read_family(fr));
    }
    res.finish();

    if (top.has("run")) {
        Reader run(top.raw("run"), "run", text, source);
        cfg.run = read_run(run);
    }
    top.finish();

    auto issues = validate(cfg.resonator);
    auto run_issues = validate(cfg.run);
    issues.insert(issues.end(), run_issues.begin(), run_issues.end());
    if (!issues.empty()) {
        std::string msg = source + ": " + std::to_string(issues.size()) + " invalid field(s)";
        for (const auto& issue : issues) msg += "\n  " + issue;
        throw Error(Errc::Validation, msg);
    }

    for (const auto& f : cfg.resonator.families) {
        const double mismatch = nonlinear_rate_mismatch(f, cfg.resonator);
        if (mismatch > 0.2) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s: tabulated eta differs from the geometric estimate by %.0f%%",
                          std::string(to_string(f.label)).c_str(), 100.0 * mismatch);
            cfg.warnings.emplace_back(buf);
        }
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Parse, path.string() + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

nlohmann::ordered_json to_json(const Config& config) {
    using oj = nlohmann::ordered_json;
    const ResonatorSpec& r = config.resonator;
    oj res;
    res["radius_m"] = r.radius_m;
    res["n2_m2_per_w"] = r.n2;
    if (r.n0) res["n0"] = *r.n0;
    oj geo;
    geo["ww_um"] = r.geometry.ww_um;
    geo["wh_um"] = r.geometry.wh_um;
    geo["theta_deg"] = r.geometry.theta_deg;
    geo["cb_um"] = r.geometry.cb_um;
    geo["ch_um"] = r.geometry.ch_um;
    geo["cw_um"] = r.geometry.cw_um;
    geo["gap_nm"] = r.geometry.gap_nm;
    res["geometry"] = geo;
    oj fams = oj::array();
    for (const auto& f : r.families) {
        oj j;
        j["label"] = std::string(to_string(f.label));
        for (std::size_t n = 0; n < f.d.size(); ++n) j["d" + std::to_string(n + 1) + "_rad_s"] = f.d[n];
        j["f0_hz"] = f.f0_hz;
        j["q_total"] = f.q_total;
        j["intrinsic_fraction"] = f.intrinsic_fraction;
        j["a_eff_m2"] = f.a_eff_m2;
        j["n_eff"] = f.n_eff;
        j["eta_rad_s"] = f.eta;
        j["g0"] = f.g0;
        if (f.fsr_table_ghz) j["fsr_ghz"] = *f.fsr_table_ghz;
        if (f.lambda0_table_nm) j["lambda0_nm"] = *f.lambda0_table_nm;
        fams.push_back(j);
    }
    res["families"] = fams;

    const RunSettings& s = config.run;
    oj run;
    run["drive_convention"] = std::string(to_string(s.drive));
    run["truncation_order"] = s.truncation_order;
    run["eps_ne"] = s.eps_ne;
    run["omega_norm"] = s.omega;
    run["residual_tolerance"] = s.residual_tolerance;
    run["f_max_norm"] = s.f_max;
    run["mi_margin_cells"] = s.mi_margin_cells;
    run["bucket_edges"] = s.bucket_edges;

    oj doc;
    doc["schema"] = "qfc.config/1";
    doc["resonator"] = res;
    doc["run"] = run;
    return doc;
}

std::string config_hash(const Config& config) { return io::fnv1a_hex(to_json(config).dump()); }

bool same_resonator(const ResonatorSpec& a, const ResonatorSpec& b) {
    if (a.radius_m != b.radius_m || a.n2 != b.n2 || a.n0 != b.n0) return false;
    const Geometry& ga = a.geometry;
    const Geometry& gb = b.geometry;
    if (ga.ww_um != gb.ww_um || ga.wh_um != gb.wh_um || ga.theta_deg != gb.theta_deg ||
        ga.cb_um != gb.cb_um || ga.ch_um != gb.ch_um || ga.cw_um != gb.cw_um || ga.gap_nm != gb.gap_nm) {
        return false;
    }
    if (a.families.size() != b.families.size()) return false;
    for (std::size_t i = 0; i < a.families.size(); ++i) {
        const ModalFamily& x = a.families[i];
        const ModalFamily& y = b.families[i];
        if (x.label != y.label || x.d != y.d || x.f0_hz != y.f0_hz || x.q_total != y.q_total ||
            x.intrinsic_fraction != y.intrinsic_fraction || x.a_eff_m2 != y.a_eff_m2 ||
            x.n_eff != y.n_eff || x.eta != y.eta || x.g0 != y.g0 ||
            x.fsr_table_ghz != y.fsr_table_ghz || x.lambda0_table_nm != y.lambda0_table_nm) {
            return false;
        }
    }
    return true;
}

} // namespace qfc
