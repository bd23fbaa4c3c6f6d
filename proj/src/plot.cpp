#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vpfp/error.hpp"
#include "vpfp/harness.hpp"

namespace vpfp {

namespace fs = std::filesystem;

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Table read_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw IoError(path.string() + ": empty file");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw IoError(path.string() + ": row " + std::to_string(t.rows.size() + 1) + " has " +
                          std::to_string(cells.size()) + " cells, header has " + std::to_string(t.header.size()));
        std::vector<double> row;
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != c.size()) throw IoError(path.string() + ": non-numeric cell '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty()) throw IoError(path.string() + ": no data rows");
    return t;
}

// 1-2-5 ticks inside [lo, hi]; decades only when the range is wide.
std::vector<double> log_ticks(double lo, double hi)
{
    const bool wide = std::log10(hi / lo) > 3.0;
    std::vector<double> ticks;
    for (int e = static_cast<int>(std::floor(std::log10(lo))) - 1; e <= static_cast<int>(std::ceil(std::log10(hi))); ++e)
        for (double m : {1.0, 2.0, 5.0}) {
            if (wide && m != 1.0) continue;
            const double v = m * std::pow(10.0, e);
            if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) ticks.push_back(v);
        }
    return ticks;
}

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string label(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void emit_plot(const fs::path& csv_path, const fs::path& svg_path)
{
    const Table t = read_csv(csv_path);
    const auto eps_it = std::find(t.header.begin(), t.header.end(), "epsilon");
    if (eps_it == t.header.end()) throw IoError(csv_path.string() + ": missing epsilon column");
    const std::size_t eps_col = static_cast<std::size_t>(eps_it - t.header.begin());

    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> pts;
    };
    std::vector<Series> series;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        const std::string& h = t.header[c];
        if (c == eps_col || (h.rfind("err_", 0) != 0 && h.rfind("field_disc", 0) != 0)) continue;
        Series s{h, {}};
        for (const auto& row : t.rows)
            if (row[eps_col] > 0.0 && row[c] > 0.0 && std::isfinite(row[c])) s.pts.emplace_back(row[eps_col], row[c]);
        if (!s.pts.empty()) series.push_back(std::move(s));
    }
    if (series.empty()) throw IoError(csv_path.string() + ": no positive error series to plot");

    double xlo = INFINITY, xhi = 0, ylo = INFINITY, yhi = 0;
    for (const auto& s : series)
        for (const auto& [x, y] : s.pts) {
            xlo = std::min(xlo, x), xhi = std::max(xhi, x);
            ylo = std::min(ylo, y), yhi = std::max(yhi, y);
        }
    // Pad so single points and flat series still get a range.
    xlo /= 1.25, xhi *= 1.25, ylo /= 2.0, yhi *= 2.0;

    const double W = 720, H = 520, left = 80, right = 180, top = 30, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + pw * (std::log(x) - std::log(xlo)) / (std::log(xhi) - std::log(xlo)); };
    auto py = [&](double y) { return top + ph * (1 - (std::log(y) - std::log(ylo)) / (std::log(yhi) - std::log(ylo))); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : log_ticks(xlo, xhi)) {
        svg << "<line class=\"xtick\" x1=\"" << num(px(v)) << "\" y1=\"" << top + ph << "\" x2=\"" << num(px(v))
            << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>";
        svg << "<text x=\"" << num(px(v)) << "\" y=\"" << top + ph + 20 << "\" text-anchor=\"middle\">" << label(v)
            << "</text>\n";
    }
    for (double v : log_ticks(ylo, yhi)) {
        svg << "<line class=\"ytick\" x1=\"" << left - 5 << "\" y1=\"" << num(py(v)) << "\" x2=\"" << left
            << "\" y2=\"" << num(py(v)) << "\" stroke=\"black\"/>";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">" << label(v)
            << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">epsilon</text>\n";
    svg << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << top + ph / 2 << ")\">error</text>\n";

    // Reference slope: beta = 1 for d = 1 (all p), anchored at the largest total error.
    {
        const auto& s = series.front();
        const auto& [x0, y0] = *std::max_element(s.pts.begin(), s.pts.end());
        const double beta = beta_exponent(2.0, 1);
        double xa = xlo * 1.1, xb = xhi / 1.1;
        double ya = y0 * std::pow(xa / x0, beta) * 0.5, yb = y0 * std::pow(xb / x0, beta) * 0.5;
        svg << "<line class=\"reference\" x1=\"" << num(px(xa)) << "\" y1=\"" << num(py(std::clamp(ya, ylo, yhi)))
            << "\" x2=\"" << num(px(xb)) << "\" y2=\"" << num(py(std::clamp(yb, ylo, yhi)))
            << "\" stroke=\"gray\" stroke-dasharray=\"2,4\"/>\n";
        svg << "<text x=\"" << left + pw + 10 << "\" y=\"" << top + 12
            << "\" fill=\"gray\">slope " << label(beta) << " reference</text>\n";
    }

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* col = kColors[i % std::size(kColors)];
        for (const auto& [x, y] : s.pts)
            svg << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"4\" fill=\"" << col
                << "\"/>\n";
        std::string slope_text;
        if (s.pts.size() >= 2) {
            // Plain least squares; fit_rate insists on three points.
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (const auto& [x, y] : s.pts) {
                sx += std::log(x), sy += std::log(y);
                sxx += std::log(x) * std::log(x), sxy += std::log(x) * std::log(y);
            }
            const double n = static_cast<double>(s.pts.size());
            const double den = n * sxx - sx * sx;
            if (den > 0) {
                const double b = (n * sxy - sx * sy) / den, a = (sy - b * sx) / n;
                const auto [mn, mx] = std::minmax_element(s.pts.begin(), s.pts.end());
                const double x1 = mn->first, x2 = mx->first;
                svg << "<line class=\"fit\" x1=\"" << num(px(x1)) << "\" y1=\"" << num(py(std::exp(a + b * std::log(x1))))
                    << "\" x2=\"" << num(px(x2)) << "\" y2=\"" << num(py(std::exp(a + b * std::log(x2))))
                    << "\" stroke=\"" << col << "\"/>\n";
                char buf[32];
                std::snprintf(buf, sizeof buf, " (slope %.2f)", b);
                slope_text = buf;
            }
        }
        svg << "<text x=\"" << left + pw + 10 << "\" y=\"" << top + 32 + 18 * i << "\" fill=\"" << col << "\">"
            << s.name << slope_text << "</text>\n";
    }
    svg << "</svg>\n";

    if (svg_path.has_parent_path()) fs::create_directories(svg_path.parent_path());
    std::ofstream out(svg_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + svg_path.string() + " for writing");
    out << svg.str();
}

}  // namespace vpfp
