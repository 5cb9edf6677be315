#include "driftband/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <locale>
#include <sstream>

#include "driftband/errors.hpp"

namespace driftband {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 60.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct Series {
    std::string title;
    std::vector<double> t, mean, ci, bound;
};

void write_svg(const Series& s, const std::string& path,
               const std::vector<std::string>& preamble) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out.imbue(std::locale::classic());
    if (!preamble.empty()) {
        out << "<!--\n";
        for (const auto& line : preamble) {
            out << line << "\n";
        }
        out << "-->\n";
    }

    double max_t = 1.0, max_y = 1.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        max_t = std::max(max_t, s.t[i]);
        max_y = std::max({max_y, s.mean[i] + s.ci[i], s.bound[i]});
    }
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double t) { return kMarginLeft + plot_w * t / max_t; };
    auto py = [&](double y) { return kMarginTop + plot_h * (1.0 - y / max_y); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << s.title << "</text>\n";

    // axes
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double ft = max_t * i / 5.0;
        const double fy = max_y * i / 5.0;
        out << "<text x=\"" << fmt(px(ft)) << "\" y=\"" << fmt(kMarginTop + plot_h + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(ft) << "</text>\n";
        out << "<text x=\"" << fmt(kMarginLeft - 6) << "\" y=\"" << fmt(py(fy) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(fy) << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">t</text>\n";
    out << "<text x=\"20\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 "
        << kHeight / 2 << ")\">cumulative value</text>\n";

    if (!s.t.empty()) {
        // CI band
        std::ostringstream band;
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            band << fmt(px(s.t[i])) << ',' << fmt(py(s.mean[i] + s.ci[i])) << ' ';
        }
        for (std::size_t i = s.t.size(); i-- > 0;) {
            band << fmt(px(s.t[i])) << ',' << fmt(py(std::max(0.0, s.mean[i] - s.ci[i])))
                 << ' ';
        }
        out << "<polygon points=\"" << band.str()
            << "\" fill=\"#aec6e8\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";

        // bound, dotted
        std::ostringstream bnd;
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            bnd << fmt(px(s.t[i])) << ',' << fmt(py(std::min(s.bound[i], max_y))) << ' ';
        }
        out << "<polyline points=\"" << bnd.str()
            << "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1.5\" "
               "stroke-dasharray=\"4 3\"/>\n";

        // mean
        std::ostringstream mean;
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            mean << fmt(px(s.t[i])) << ',' << fmt(py(s.mean[i])) << ' ';
        }
        out << "<polyline points=\"" << mean.str()
            << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
        if (s.t.size() == 1) {
            out << "<circle cx=\"" << fmt(px(s.t[0])) << "\" cy=\"" << fmt(py(s.mean[0]))
                << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
        }
    }
    out << "</svg>\n";
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open summary CSV: " + path);
    }
    std::vector<SummaryRow> rows;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("checkpoint_t,", 0) != 0) {
                throw ConfigError("summary CSV: unexpected header on line "
                                  + std::to_string(line_no));
            }
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 8) {
            throw ConfigError("summary CSV: too few columns on line "
                              + std::to_string(line_no));
        }
        try {
            SummaryRow row;
            row.t = std::stoull(cells[0]);
            row.mean_pseudo_regret = std::stod(cells[1]);
            row.ci_pseudo_regret = std::stod(cells[2]);
            row.mean_realized_regret = std::stod(cells[3]);
            row.ci_realized_regret = std::stod(cells[4]);
            row.mean_compensation = std::stod(cells[5]);
            row.ci_compensation = std::stod(cells[6]);
            row.bound_value = std::stod(cells[7]);
            rows.push_back(row);
        } catch (const std::exception&) {
            throw ConfigError("summary CSV: bad numeric field on line "
                              + std::to_string(line_no));
        }
    }
    if (!header_seen) {
        throw ConfigError("summary CSV: missing header in " + path);
    }
    return rows;
}

void write_plots(const std::vector<SummaryRow>& rows, const std::string& out_dir,
                 const std::vector<std::string>& preamble) {
    struct Metric {
        const char* file;
        const char* title;
        double SummaryRow::* mean;
        double SummaryRow::* ci;
        bool with_bound;
    };
    const Metric metrics[] = {
        {"pseudo_regret.svg", "cumulative pseudo-regret", &SummaryRow::mean_pseudo_regret,
         &SummaryRow::ci_pseudo_regret, true},
        {"realized_regret.svg", "cumulative realized regret",
         &SummaryRow::mean_realized_regret, &SummaryRow::ci_realized_regret, true},
        {"compensation.svg", "cumulative compensation", &SummaryRow::mean_compensation,
         &SummaryRow::ci_compensation, true},
    };
    for (const auto& metric : metrics) {
        Series s;
        s.title = metric.title;
        for (const auto& row : rows) {
            s.t.push_back(static_cast<double>(row.t));
            s.mean.push_back(row.*metric.mean);
            s.ci.push_back(row.*metric.ci);
            s.bound.push_back(metric.with_bound ? row.bound_value : 0.0);
        }
        write_svg(s, out_dir + "/" + metric.file, preamble);
    }
}

} // namespace driftband
