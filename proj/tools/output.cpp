#include "output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gbafs/errors.hpp"

namespace gbafs::cli {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 50.0;

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, end);
}

struct Scale {
    double lo, hi, out_lo, out_hi;
    double operator()(double v) const {
        if (hi == lo) return 0.5 * (out_lo + out_hi);
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

std::string svg_open() {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return s.str();
}

std::string axes(const Scale& x, const Scale& y, const std::string& x_label, const std::string& y_label) {
    std::ostringstream s;
    const double x0 = kMargin, x1 = kWidth - kMargin, y0 = kHeight - kMargin, y1 = kMargin;
    s << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = x.lo + (x.hi - x.lo) * t / 4.0;
        const double yv = y.lo + (y.hi - y.lo) * t / 4.0;
        s << "<text x=\"" << fixed(x(xv)) << "\" y=\"" << y0 + 15 << "\" text-anchor=\"middle\">"
          << format_number(std::round(xv * 100.0) / 100.0) << "</text>\n";
        s << "<text x=\"" << x0 - 5 << "\" y=\"" << fixed(y(yv) + 4) << "\" text-anchor=\"end\">"
          << format_number(std::round(yv * 100.0) / 100.0) << "</text>\n";
    }
    s << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << xml_escape(x_label)
      << "</text>\n";
    s << "<text x=\"14\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << kHeight / 2
      << ")\">" << xml_escape(y_label) << "</text>\n";
    return s.str();
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + path.string());
    out << text;
    if (!out) throw DataError("failed writing output file: " + path.string());
}

std::string curve_csv(const MSSCurve& curve) {
    std::string s = "k,silhouette,simplified_silhouette,mss\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < curve.ks.size(); ++j) {
        const double sil = curve.averaged_silhouette.empty() ? nan : curve.averaged_silhouette[j];
        const double ss = curve.averaged_simplified.empty() ? nan : curve.averaged_simplified[j];
        s += std::to_string(curve.ks[j]) + "," + format_number(sil) + "," + format_number(ss) + "," +
             format_number(curve.averaged[j]) + "\n";
    }
    return s;
}

std::string embedding_csv(const Matrix& coords, const std::vector<std::string>& names,
                          const std::vector<std::size_t>& medoids) {
    static const char* axis_names[] = {"x", "y", "z"};
    std::string s = "feature";
    for (std::size_t d = 0; d < coords.cols(); ++d) {
        s += ",";
        s += d < 3 ? std::string(axis_names[d]) : "dim" + std::to_string(d);
    }
    s += ",medoid\n";
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        s += csv_field(names[i]);
        for (double v : coords.row(i)) s += "," + format_number(v);
        const bool is_medoid = std::binary_search(medoids.begin(), medoids.end(), i);
        s += is_medoid ? ",1\n" : ",0\n";
    }
    return s;
}

std::string feature_space_csv(const SeparabilityMatrix& z, const std::vector<std::string>& names,
                              const std::vector<std::string>& class_ids) {
    std::string s = "feature";
    for (const auto& h : feature_space_header(class_ids)) s += "," + csv_field(h);
    s += "\n";
    for (std::size_t i = 0; i < z.features(); ++i) {
        s += csv_field(names[i]);
        for (double v : z.z.row(i)) s += "," + format_number(v);
        s += "\n";
    }
    return s;
}

std::string curve_svg(const MSSCurve& curve, std::optional<std::size_t> k_marked) {
    struct Series {
        const std::vector<double>* values;
        const char* name;
        const char* color;
    };
    std::vector<Series> series{{&curve.averaged, "MSS", "#d62728"}};
    if (!curve.averaged_simplified.empty()) series.push_back({&curve.averaged_simplified, "SS", "#1f77b4"});
    if (!curve.averaged_silhouette.empty()) series.push_back({&curve.averaged_silhouette, "Silhouette", "#2ca02c"});

    double lo = 0.0, hi = 1.0;
    for (const auto& sr : series) {
        for (double v : *sr.values) {
            if (std::isnan(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const Scale x{static_cast<double>(curve.ks.front()), static_cast<double>(curve.ks.back()), kMargin,
                  kWidth - kMargin};
    const Scale y{lo, hi, kHeight - kMargin, kMargin};

    std::string s = svg_open() + axes(x, y, "number of clusters k", "index value");
    for (std::size_t n = 0; n < series.size(); ++n) {
        const auto& sr = series[n];
        // Undefined values break the line.
        std::string points;
        auto flush = [&] {
            if (!points.empty()) {
                s += "<polyline fill=\"none\" stroke=\"" + std::string(sr.color) + "\" stroke-width=\"1.5\" points=\"" +
                     points + "\"/>\n";
            }
            points.clear();
        };
        for (std::size_t j = 0; j < curve.ks.size(); ++j) {
            const double v = (*sr.values)[j];
            if (std::isnan(v)) {
                flush();
                continue;
            }
            if (!points.empty()) points += " ";
            points += fixed(x(static_cast<double>(curve.ks[j]))) + "," + fixed(y(v));
        }
        flush();
        const double ly = kMargin + 14.0 * static_cast<double>(n);
        s += "<line x1=\"" + fixed(kWidth - kMargin - 90) + "\" y1=\"" + fixed(ly) + "\" x2=\"" +
             fixed(kWidth - kMargin - 70) + "\" y2=\"" + fixed(ly) + "\" stroke=\"" + sr.color +
             "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + fixed(kWidth - kMargin - 65) + "\" y=\"" + fixed(ly + 4) + "\">" + sr.name + "</text>\n";
    }
    if (k_marked) {
        const std::string kx = fixed(x(static_cast<double>(*k_marked)));
        s += "<line x1=\"" + kx + "\" y1=\"" + fixed(kMargin) + "\" x2=\"" + kx + "\" y2=\"" +
             fixed(kHeight - kMargin) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
        s += "<text x=\"" + kx + "\" y=\"" + fixed(kMargin - 6) + "\" text-anchor=\"middle\">k_min = " +
             std::to_string(*k_marked) + "</text>\n";
    }
    return s + "</svg>\n";
}

std::string embedding_svg(const Matrix& coords, const std::vector<std::string>& names,
                          const std::vector<std::size_t>& medoids) {
    if (coords.cols() < 2) throw ConfigError("embedding plot needs at least 2 dimensions");
    double x_lo = coords(0, 0), x_hi = x_lo, y_lo = coords(0, 1), y_hi = y_lo;
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        x_lo = std::min(x_lo, coords(i, 0));
        x_hi = std::max(x_hi, coords(i, 0));
        y_lo = std::min(y_lo, coords(i, 1));
        y_hi = std::max(y_hi, coords(i, 1));
    }
    const Scale x{x_lo, x_hi, kMargin, kWidth - kMargin};
    const Scale y{y_lo, y_hi, kHeight - kMargin, kMargin};
    std::string s = svg_open() + axes(x, y, "embedding dimension 1", "embedding dimension 2");
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        if (std::binary_search(medoids.begin(), medoids.end(), i)) continue;
        s += "<circle cx=\"" + fixed(x(coords(i, 0))) + "\" cy=\"" + fixed(y(coords(i, 1))) +
             "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.6\"><title>" + xml_escape(names[i]) + "</title></circle>\n";
    }
    for (auto m : medoids) {
        const std::string cx = fixed(x(coords(m, 0))), cy = fixed(y(coords(m, 1)));
        s += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"6\" fill=\"#d62728\" stroke=\"black\"><title>" +
             xml_escape(names[m]) + "</title></circle>\n";
        s += "<text x=\"" + cx + "\" y=\"" + fixed(y(coords(m, 1)) - 9) + "\" text-anchor=\"middle\">" +
             xml_escape(names[m]) + "</text>\n";
    }
    return s + "</svg>\n";
}

}  // namespace gbafs::cli
