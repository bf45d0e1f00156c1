#include "qfc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qfc/error.hpp"

namespace qfc::io {

namespace {

std::string escape_xml(std::string_view text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string short_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Dark (strong entanglement) to pale (none); indexes are interpolated when the
// config asks for more buckets than listed.
constexpr const char* kPalette[] = {"#2c0b4d", "#4c1d7a", "#6a3d9a", "#3f66b2", "#2f8fbf",
                                    "#3bb3a0", "#7fcf7a", "#c4e69a", "#e8f5d0"};

std::string bucket_colour(std::size_t bucket, std::size_t buckets) {
    constexpr std::size_t n = std::size(kPalette);
    if (buckets <= 1) return kPalette[n - 1];
    const std::size_t idx = bucket * (n - 1) / (buckets - 1);
    return kPalette[std::min(idx, n - 1)];
}

std::string svg_header(int width, int height, const std::string& title, const std::string& config_hash) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "<metadata>{\"config_hash\":\"" << config_hash << "\",\"version\":\"" << kVersion
       << "\"}</metadata>\n"
       << "<title>" << escape_xml(title) << "</title>\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"14\">" << escape_xml(title) << "</text>\n";
    return os.str();
}

} // namespace

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

Csv& Csv::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error(Errc::InvalidArgument, "CSV row has the wrong column count");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
        if (!quote) {
            text_ += cells[i];
            continue;
        }
        text_ += '"';
        for (char ch : cells[i]) text_ += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        text_ += '"';
    }
    text_ += '\n';
    return *this;
}

std::string amplitude_column(DriveConvention convention) {
    return convention == DriveConvention::PlaneWaveField ? "a_pin_v_per_m" : "a_pin_sqrt_photons_per_s";
}

std::string phase_csv(const SweepGrid& grid, const std::string& amplitude_column) {
    Csv csv({"delta_p0_hz", amplitude_column, "phase", "c_min", "n_branches", "n_parametric", "max_eig_re_norm", "error"});
    for (const PhasePoint& p : grid.points) {
        csv.row({number(p.delta_p0_hz), number(p.a_pin), std::string(to_string(p.phase)), number(p.c_min),
                 std::to_string(p.n_branches), std::to_string(p.n_parametric), number(p.max_eig_re), p.error});
    }
    return csv.str();
}

std::string phase_svg(const SweepGrid& grid, const HeatMapStyle& style, const std::string& config_hash) {
    const std::size_t nd = grid.delta_axis_hz.size();
    const std::size_t na = grid.amplitude_axis.size();
    const double left = 80, top = 40, plot_w = 480, plot_h = 400;
    const int width = 760, height = 520;
    const double cw = plot_w / static_cast<double>(nd);
    const double ch = plot_h / static_cast<double>(na);
    const std::size_t buckets = style.bucket_edges.size() + 1;

    std::ostringstream os;
    os << svg_header(width, height, style.title, config_hash);
    os << "<defs><pattern id=\"mi\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
          "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#f3d6d6\"/>"
          "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#b03030\" stroke-width=\"2\"/></pattern></defs>\n";
    os << "<g shape-rendering=\"crispEdges\">\n";
    for (std::size_t ia = 0; ia < na; ++ia) {
        for (std::size_t id = 0; id < nd; ++id) {
            const PhasePoint& p = grid.at(ia, id);
            std::string fill;
            if (p.failed) {
                fill = "#999999";
            } else if (p.phase == Phase::MI) {
                fill = "url(#mi)";
            } else {
                const auto it = std::upper_bound(style.bucket_edges.begin(), style.bucket_edges.end(), p.c_min);
                fill = bucket_colour(static_cast<std::size_t>(it - style.bucket_edges.begin()), buckets);
            }
            const double x = left + cw * static_cast<double>(id);
            const double y = top + plot_h - ch * static_cast<double>(ia + 1);
            os << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(cw + 0.05)
               << "\" height=\"" << fixed(ch + 0.05) << "\" fill=\"" << fill << "\"/>\n";
        }
    }
    os << "</g>\n";

    // Axes and tick labels at the ends of each axis.
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        os << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" text-anchor=\"" << anchor
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(text) << "</text>\n";
    };
    label(left, top + plot_h + 16, short_number(grid.delta_axis_hz.front() * 1e-9), "start");
    label(left + plot_w, top + plot_h + 16, short_number(grid.delta_axis_hz.back() * 1e-9), "end");
    label(left + plot_w / 2, top + plot_h + 34, "pump detuning (GHz)", "middle");
    label(left - 6, top + plot_h, short_number(grid.amplitude_axis.front()), "end");
    label(left - 6, top + 10, short_number(grid.amplitude_axis.back()), "end");
    os << "<text transform=\"translate(20," << fixed(top + plot_h / 2) << ") rotate(-90)\" "
       << "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << escape_xml(style.amplitude_label) << "</text>\n";

    // Legend: one swatch per bucket, then MI.
    const double lx = left + plot_w + 30;
    double ly = top;
    for (std::size_t b = 0; b < buckets; ++b) {
        std::string range;
        if (b == 0) range = "< " + short_number(style.bucket_edges.empty() ? 0.0 : style.bucket_edges.front());
        else if (b == buckets - 1) range = ">= " + short_number(style.bucket_edges.back());
        else range = short_number(style.bucket_edges[b - 1]) + " .. " + short_number(style.bucket_edges[b]);
        os << "<rect x=\"" << lx << "\" y=\"" << fixed(ly) << "\" width=\"14\" height=\"14\" fill=\""
           << bucket_colour(b, buckets) << "\"/>\n";
        label(lx + 20, ly + 11, "C_min " + range, "start");
        ly += 20;
    }
    os << "<rect x=\"" << lx << "\" y=\"" << fixed(ly) << "\" width=\"14\" height=\"14\" fill=\"url(#mi)\"/>\n";
    label(lx + 20, ly + 11, "MI", "start");
    os << "</svg>\n";
    return os.str();
}

std::string line_plot_svg(const std::vector<Series>& series, const std::string& x_label,
                          const std::string& y_label, const std::string& title,
                          const std::string& config_hash) {
    const double left = 90, top = 40, plot_w = 520, plot_h = 380;
    const int width = 760, height = 500;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const Series& s : series) {
        for (double v : s.x) if (std::isfinite(v)) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
        for (double v : s.y) if (std::isfinite(v)) { y0 = std::min(y0, v); y1 = std::max(y1, v); }
    }
    if (!(x1 > x0)) { x0 -= 1; x1 += 1; }
    if (!(y1 > y0)) { y0 -= 1; y1 += 1; }
    auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * plot_w; };
    auto py = [&](double v) { return top + plot_h - (v - y0) / (y1 - y0) * plot_h; };

    constexpr const char* colours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    std::ostringstream os;
    os << svg_header(width, height, title, config_hash);
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        os << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << colours[k % std::size(colours)]
           << "\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << left + plot_w + 12 << "\" y=\"" << top + 14 + 18 * static_cast<double>(k)
           << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colours[k % std::size(colours)]
           << "\">" << escape_xml(s.name) << "</text>\n";
    }
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        os << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" text-anchor=\"" << anchor
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(text) << "</text>\n";
    };
    label(left, top + plot_h + 16, short_number(x0), "start");
    label(left + plot_w, top + plot_h + 16, short_number(x1), "end");
    label(left + plot_w / 2, top + plot_h + 34, x_label, "middle");
    label(left - 6, top + plot_h, short_number(y0), "end");
    label(left - 6, top + 10, short_number(y1), "end");
    os << "<text transform=\"translate(24," << fixed(top + plot_h / 2) << ") rotate(-90)\" "
       << "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(y_label)
       << "</text>\n</svg>\n";
    return os.str();
}

Bundle::Bundle(std::string command, std::string config_hash)
    : command_(std::move(command)), config_hash_(std::move(config_hash)) {}

void Bundle::add(const std::string& name, std::string content) {
    for (auto& [existing, body] : files_) {
        if (existing == name) {
            body = std::move(content);
            return;
        }
    }
    files_.emplace_back(name, std::move(content));
}

nlohmann::ordered_json Bundle::manifest() const {
    nlohmann::ordered_json m;
    m["command"] = command_;
    m["version"] = std::string(kVersion);
    m["config_hash"] = config_hash_;
    // Wall-clock time would break byte-identical reruns; a pinned build epoch is honoured.
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) m["source_date_epoch"] = std::string(epoch);
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    for (const auto& [name, body] : files_) {
        outputs.push_back({{"file", name}, {"bytes", body.size()}, {"fnv1a64", fnv1a_hex(body)}});
    }
    m["outputs"] = outputs;
    return m;
}

void Bundle::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error(Errc::InvalidArgument, "cannot write " + (dir / name).string());
        out << body;
    };
    for (const auto& [name, body] : files_) put(name, body);
    put("manifest.json", manifest().dump(2) + "\n");
}

} // namespace qfc::io
