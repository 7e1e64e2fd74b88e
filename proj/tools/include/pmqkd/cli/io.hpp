#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pmqkd/circuit.hpp"
#include "pmqkd/rates.hpp"

namespace pmqkd::cli {

// %.*g formatting: shortest representation at the given significant digits.
std::string format_sig(double value, int precision);

// Columns: mu,eta_db,eta,gain,ep_upper,ep_lower,p_usd,gap_ratio,rate_lower,rate_upper.
// Key rates are written unclamped by default; clamp_rates floors the two
// rate columns at 0 for display.
void write_sweep_csv(const std::vector<rates::SweepRow>& rows, int precision, std::ostream& os,
                     bool clamp_rates = false);

// Columns: k,j,N,weight,p_xx_disagree.
void write_parity_csv(const circuit::ParityTable& table, int precision, std::ostream& os);

struct SvgOptions {
    std::string title;
    std::string x_label;
    int precision = 12;
};

// Self-contained SVG chart: ep_upper and ep_lower polylines on a log left
// axis, gap_ratio on a log right axis, numeric labels at decade ticks.
// Deterministic bytes for fixed input. Throws std::invalid_argument with
// fewer than 2 rows.
void emit_svg(const std::vector<rates::SweepRow>& rows, const SvgOptions& options, std::ostream& os);

}  // namespace pmqkd::cli
