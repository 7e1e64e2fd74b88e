#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

// Monte Carlo simulation of protocol rounds: honest interfering measurer at
// the middle node, optional beam-splitting adversary with quantum-memory
// unambiguous state discrimination after the phase announcement. Rounds draw
// from independent counter-derived substreams of one master seed, so results
// are reproducible regardless of execution order.

namespace pmqkd::sim {

struct ProtocolParams {
    double mu_a = 0.05;
    double mu_b = 0.05;
    double eta = 0.1;          // per-arm transmittance
    int d = 16;                // phase-slice count; must be even
    double dark_count = 0.0;   // per-detector per-round probability
    double misalignment = 0.0; // probability of an L/R label flip
    double f = 1.15;
    std::uint64_t rounds = 100000;
    std::uint64_t seed = 1;

    void validate() const;
};

enum class Adversary { none, beamsplit };
enum class Click : std::uint8_t { none, left, right, both };
enum class EveUsd : std::uint8_t { absent, inconclusive, bit0, bit1 };

struct RoundRecord {
    std::uint64_t round = 0;
    std::uint8_t kappa_a = 0, kappa_b = 0;
    int ja = 0, jb = 0;
    Click clicks = Click::none;
    bool sifted = false;
    bool flip_applied = false;
    std::int8_t key_a = -1, key_b = -1;  // -1 when unsifted
    EveUsd eve_usd = EveUsd::absent;
};

struct ClickProbs {
    double p_left_only = 0.0;
    double p_right_only = 0.0;
    double p_both = 0.0;
    double p_none = 0.0;
};

// Threshold-detector outcome probabilities for the single-photon
// interference of the two transmitted pulses:
//   mu_L = (eta/2) |sqrt(mu_a) e^{i theta_a} + sqrt(mu_b) e^{i theta_b}|^2,
//   mu_R likewise with a relative minus sign,
//   p_click = 1 - (1 - dark) e^{-mu_det}, detectors independent.
ClickProbs charlie_click_probabilities(double theta_a, double theta_b, double mu_a, double mu_b,
                                       double eta, double dark_count);

struct SimStats {
    std::uint64_t rounds = 0;
    std::uint64_t detected = 0;       // single-click rounds, any phase slice
    std::uint64_t phase_matched = 0;  // rounds with |phi_a - phi_b| in {0, pi}
    std::uint64_t sifted = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t usd_attempts = 0;
    std::uint64_t usd_successes = 0;

    double gain_hat = 0.0;  // sifted / phase_matched
    double gain_se = 0.0;
    double qber_hat = 0.0;  // bit_errors / sifted
    double qber_se = 0.0;
    double sift_fraction = 0.0;  // sifted / rounds
    double usd_success_fraction = 0.0;
    double ep_lower_hat = 0.0;

    Adversary adversary = Adversary::none;
    std::uint64_t seed = 0;
};

// Applies the sifting rule ((ja - jb) mod d in {0, d/2}, single click) and
// the key mapping with Bob's flips (R click XOR pi phase difference) to a
// record whose kappas, phase indices, and clicks are filled in.
void sift(RoundRecord& record, int d);

SimStats run_rounds(const ProtocolParams& params, Adversary adversary,
                    std::vector<RoundRecord>* round_log = nullptr);

// 1/2 * usd_success_fraction; requires stats from an attack run.
double estimate_attack_phase_error(const SimStats& stats);

// CSV round log (round, kappa_a, kappa_b, ja, jb, click, sifted, key_a,
// key_b, eve_usd) and the flat key-value stats block.
void write_round_log_csv(const std::vector<RoundRecord>& log, std::ostream& os);
void write_stats(const SimStats& stats, std::ostream& os);

}  // namespace pmqkd::sim
