#include "pmqkd/cli/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace pmqkd::cli {

std::string format_sig(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    return buf;
}

void write_sweep_csv(const std::vector<rates::SweepRow>& rows, int precision, std::ostream& os,
                     bool clamp_rates) {
    os << "mu,eta_db,eta,gain,ep_upper,ep_lower,p_usd,gap_ratio,rate_lower,rate_upper\n";
    for (const rates::SweepRow& r : rows) {
        const double lo = clamp_rates ? std::max(0.0, r.rate_lower) : r.rate_lower;
        const double hi = clamp_rates ? std::max(0.0, r.rate_upper) : r.rate_upper;
        os << format_sig(r.point.mu, precision) << ',' << format_sig(r.point.eta_db, precision)
           << ',' << format_sig(r.point.eta, precision) << ',' << format_sig(r.q_gain, precision)
           << ',' << format_sig(r.ep_upper, precision) << ',' << format_sig(r.ep_lower, precision)
           << ',' << format_sig(r.p_usd, precision) << ',' << format_sig(r.gap_ratio, precision)
           << ',' << format_sig(lo, precision) << ',' << format_sig(hi, precision) << '\n';
    }
}

void write_parity_csv(const circuit::ParityTable& table, int precision, std::ostream& os) {
    os << "k,j,N,weight,p_xx_disagree\n";
    for (const circuit::ParityRow& r : table.rows)
        os << r.k << ',' << r.j << ',' << r.total_n << ',' << format_sig(r.weight, precision)
           << ',' << format_sig(r.p_xx_disagree, precision) << '\n';
}

namespace {

struct LogAxis {
    int dec_min = 0;
    int dec_max = 0;

    static LogAxis fit(const std::vector<double>& positives) {
        double lo = 1.0, hi = 1.0;
        bool any = false;
        for (double v : positives) {
            if (v <= 0.0) continue;
            lo = any ? std::min(lo, v) : v;
            hi = any ? std::max(hi, v) : v;
            any = true;
        }
        if (!any) throw std::invalid_argument("emit_svg: no positive values for log axis");
        LogAxis axis;
        axis.dec_min = static_cast<int>(std::floor(std::log10(lo)));
        axis.dec_max = static_cast<int>(std::ceil(std::log10(hi)));
        if (axis.dec_max == axis.dec_min) ++axis.dec_max;
        return axis;
    }

    double unit(double v) const {  // 0 at dec_min, 1 at dec_max
        return (std::log10(v) - dec_min) / double(dec_max - dec_min);
    }
};

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

void emit_svg(const std::vector<rates::SweepRow>& rows, const SvgOptions& options,
              std::ostream& os) {
    if (rows.size() < 2) throw std::invalid_argument("emit_svg: need at least 2 rows");

    const double width = 880, height = 560;
    const double x0 = 80, x1 = 780, y0 = 500, y1 = 60;  // plot box (y grows downward)

    const bool x_is_db = options.x_label.find("dB") != std::string::npos;
    std::vector<double> xs, upper, lower, gaps;
    for (const rates::SweepRow& r : rows) {
        xs.push_back(x_is_db ? r.point.eta_db : r.point.mu);
        upper.push_back(r.ep_upper);
        lower.push_back(r.ep_lower);
        gaps.push_back(r.gap_ratio);
    }
    const double xmin = *std::min_element(xs.begin(), xs.end());
    const double xmax = *std::max_element(xs.begin(), xs.end());
    if (xmax == xmin) throw std::invalid_argument("emit_svg: degenerate x range");

    std::vector<double> ep_all = upper;
    ep_all.insert(ep_all.end(), lower.begin(), lower.end());
    const LogAxis left = LogAxis::fit(ep_all);
    const LogAxis right = LogAxis::fit(gaps);

    const auto x_of = [&](double v) { return x0 + (v - xmin) / (xmax - xmin) * (x1 - x0); };
    const auto y_left = [&](double v) { return y0 + left.unit(v) * (y1 - y0); };
    const auto y_right = [&](double v) { return y0 + right.unit(v) * (y1 - y0); };

    const auto polyline = [&](const std::vector<double>& ys, const auto& y_of,
                              const char* style) {
        std::string points;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (ys[i] <= 0.0) continue;  // log axis: skip nonpositive points
            points += fmt2(x_of(xs[i])) + "," + fmt2(y_of(ys[i])) + " ";
        }
        if (!points.empty())
            os << "  <polyline fill=\"none\" " << style << " points=\"" << points << "\"/>\n";
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "  <text x=\"" << (width / 2) << "\" y=\"30\" text-anchor=\"middle\" font-size=\"18\" "
          "font-family=\"sans-serif\">" << options.title << "</text>\n";
    os << "  <rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << (x1 - x0) << "\" height=\""
       << (y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";

    // decade ticks, left axis
    for (int dec = left.dec_min; dec <= left.dec_max; ++dec) {
        const double v = std::pow(10.0, dec);
        const double y = y_left(v);
        os << "  <line x1=\"" << fmt2(x0 - 5) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(x0)
           << "\" y2=\"" << fmt2(y) << "\" stroke=\"black\"/>\n";
        os << "  <text x=\"" << fmt2(x0 - 9) << "\" y=\"" << fmt2(y + 4)
           << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">1e" << dec
           << "</text>\n";
    }
    // decade ticks, right axis (gap ratio)
    for (int dec = right.dec_min; dec <= right.dec_max; ++dec) {
        const double v = std::pow(10.0, dec);
        const double y = y_right(v);
        os << "  <line x1=\"" << fmt2(x1) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(x1 + 5)
           << "\" y2=\"" << fmt2(y) << "\" stroke=\"gray\"/>\n";
        os << "  <text x=\"" << fmt2(x1 + 9) << "\" y=\"" << fmt2(y + 4)
           << "\" text-anchor=\"start\" font-size=\"12\" fill=\"gray\" "
              "font-family=\"sans-serif\">1e" << dec << "</text>\n";
    }
    // x ticks
    for (int i = 0; i <= 5; ++i) {
        const double v = xmin + (xmax - xmin) * i / 5.0;
        const double x = x_of(v);
        os << "  <line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(y0) << "\" x2=\"" << fmt2(x)
           << "\" y2=\"" << fmt2(y0 + 5) << "\" stroke=\"black\"/>\n";
        os << "  <text x=\"" << fmt2(x) << "\" y=\"" << fmt2(y0 + 20)
           << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
           << fmt_tick(v) << "</text>\n";
    }
    os << "  <text x=\"" << (x0 + (x1 - x0) / 2) << "\" y=\"" << (y0 + 42)
       << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">"
       << options.x_label << "</text>\n";
    os << "  <text x=\"22\" y=\"" << (y1 + (y0 - y1) / 2)
       << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
          "transform=\"rotate(-90 22 " << (y1 + (y0 - y1) / 2) << ")\">phase error rate</text>\n";
    os << "  <text x=\"" << (width - 18) << "\" y=\"" << (y1 + (y0 - y1) / 2)
       << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"gray\" font-family=\"sans-serif\" "
          "transform=\"rotate(90 " << (width - 18) << " " << (y1 + (y0 - y1) / 2)
       << ")\">gap ratio (e_p^u - e_p^L)/e_p^u</text>\n";

    polyline(upper, y_left, "stroke=\"#1f77b4\" stroke-width=\"2\"");
    polyline(lower, y_left, "stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"7 4\"");
    polyline(gaps, y_right, "stroke=\"#555555\" stroke-width=\"1.5\" stroke-dasharray=\"2 3\"");

    // legend
    os << "  <line x1=\"" << (x0 + 14) << "\" y1=\"" << (y1 + 16) << "\" x2=\"" << (x0 + 54)
       << "\" y2=\"" << (y1 + 16) << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n"
       << "  <text x=\"" << (x0 + 60) << "\" y=\"" << (y1 + 20)
       << "\" font-size=\"12\" font-family=\"sans-serif\">e_p^u (security-proof upper bound)</text>\n"
       << "  <line x1=\"" << (x0 + 14) << "\" y1=\"" << (y1 + 34) << "\" x2=\"" << (x0 + 54)
       << "\" y2=\"" << (y1 + 34)
       << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"7 4\"/>\n"
       << "  <text x=\"" << (x0 + 60) << "\" y=\"" << (y1 + 38)
       << "\" font-size=\"12\" font-family=\"sans-serif\">e_p^L (beam-splitting attack lower bound)"
          "</text>\n";
    os << "</svg>\n";
}

}  // namespace pmqkd::cli
