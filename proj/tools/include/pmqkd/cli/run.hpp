#pragma once

#include <iosfwd>

#include "pmqkd/cli/config.hpp"

namespace pmqkd::cli {

struct VerifyTolerances {
    double parity = 1e-9;        // |p_xx_disagree - parity(N)|
    double modular = 1e-20;      // weight of rows with N != k (mod d)
    double weight_sum = 1e-9;    // |sum of weights - 1|
    double obs1_pseudo = 1e-12;  // 1 - fidelity vs pseudo-Fock
    double obs1_fock = 1e-10;    // 1 - fidelity vs Fock (d >= 16, mu <= 0.05)
    double cross_ep = 1e-9;      // parity-table e_p vs closed-form e_p^u
};

// Runs the circuit-verifier invariants, prints one report line per check,
// and returns 0 iff all pass. The parity table is written to parity_os when
// provided.
int run_verify_checks(const VerifyOptions& options, const VerifyTolerances& tolerances,
                      std::ostream& report, std::ostream* parity_os, int csv_precision);

// Executes a parsed configuration. Returns the process exit code: 0 on
// success, 1 on check failure or runtime error (partially written outputs
// are removed). Progress and reports go to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pmqkd::cli
