#include "pmqkd/sim.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pmqkd::sim {

namespace {

// SplitMix64 steps; each round owns an independent stream keyed by
// (master seed, round index), so sharding cannot change the results.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct RoundRng {
    std::uint64_t state;

    RoundRng(std::uint64_t seed, std::uint64_t round) {
        std::uint64_t s = seed;
        state = splitmix64(s) ^ (round * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        (void)splitmix64(state);  // decorrelate nearby round keys
    }

    std::uint64_t next_u64() { return splitmix64(state); }
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }
    int below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }
    bool bit() { return (next_u64() >> 63) != 0; }
};

double detector_click_probability(double intensity, double dark_count) {
    return 1.0 - (1.0 - dark_count) * std::exp(-intensity);
}

}  // namespace

void ProtocolParams::validate() const {
    if (mu_a < 0.0 || mu_b < 0.0) throw std::domain_error("sim: intensities must be >= 0");
    if (!(eta > 0.0) || eta > 1.0) throw std::domain_error("sim: eta must lie in (0, 1]");
    if (d < 2) throw std::invalid_argument("sim: d must be >= 2");
    if (d % 2 != 0)
        throw std::invalid_argument("sim: d must be even so the pi phase-difference slice exists");
    if (dark_count < 0.0 || dark_count >= 1.0)
        throw std::domain_error("sim: dark_count must lie in [0, 1)");
    if (misalignment < 0.0 || misalignment > 0.5)
        throw std::domain_error("sim: misalignment must lie in [0, 0.5]");
    if (f < 1.0) throw std::domain_error("sim: f must be >= 1");
    if (rounds < 1) throw std::invalid_argument("sim: rounds must be >= 1");
}

ClickProbs charlie_click_probabilities(double theta_a, double theta_b, double mu_a, double mu_b,
                                       double eta, double dark_count) {
    if (mu_a < 0.0 || mu_b < 0.0) throw std::domain_error("click probabilities: intensities >= 0");
    if (!(eta >= 0.0) || eta > 1.0) throw std::domain_error("click probabilities: eta in [0, 1]");
    if (dark_count < 0.0 || dark_count >= 1.0)
        throw std::domain_error("click probabilities: dark_count in [0, 1)");

    const std::complex<double> amp_sum = std::polar(std::sqrt(mu_a), theta_a) +
                                         std::polar(std::sqrt(mu_b), theta_b);
    const std::complex<double> amp_diff = std::polar(std::sqrt(mu_a), theta_a) -
                                          std::polar(std::sqrt(mu_b), theta_b);
    const double mu_left = 0.5 * eta * std::norm(amp_sum);
    const double mu_right = 0.5 * eta * std::norm(amp_diff);

    const double p_left = detector_click_probability(mu_left, dark_count);
    const double p_right = detector_click_probability(mu_right, dark_count);
    ClickProbs probs;
    probs.p_left_only = p_left * (1.0 - p_right);
    probs.p_right_only = p_right * (1.0 - p_left);
    probs.p_both = p_left * p_right;
    probs.p_none = (1.0 - p_left) * (1.0 - p_right);
    return probs;
}

void sift(RoundRecord& record, int d) {
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("sift: d must be even and >= 2");
    record.sifted = false;
    record.flip_applied = false;
    record.key_a = -1;
    record.key_b = -1;
    if (record.clicks != Click::left && record.clicks != Click::right) return;
    const int slice = ((record.ja - record.jb) % d + d) % d;
    const bool matched_0 = slice == 0;
    const bool matched_pi = slice == d / 2;
    if (!matched_0 && !matched_pi) return;

    record.sifted = true;
    const bool flip = (record.clicks == Click::right) != matched_pi;  // XOR of the two flip rules
    record.flip_applied = flip;
    record.key_a = static_cast<std::int8_t>(record.kappa_a);
    record.key_b = static_cast<std::int8_t>(record.kappa_b ^ (flip ? 1 : 0));
}

SimStats run_rounds(const ProtocolParams& params, Adversary adversary,
                    std::vector<RoundRecord>* round_log) {
    params.validate();
    if (adversary == Adversary::beamsplit && params.mu_a != params.mu_b)
        throw std::domain_error("beamsplit attack model assumes mu_a == mu_b");

    const double p_usd =
        adversary == Adversary::beamsplit
            ? 1.0 - std::exp(-4.0 * (1.0 - params.eta) * params.mu_a)
            : 0.0;

    SimStats stats;
    stats.rounds = params.rounds;
    stats.adversary = adversary;
    stats.seed = params.seed;
    if (round_log) {
        round_log->clear();
        round_log->reserve(params.rounds);
    }

    const double slice_angle = 2.0 * std::numbers::pi / params.d;
    for (std::uint64_t i = 0; i < params.rounds; ++i) {
        RoundRng rng(params.seed, i);
        RoundRecord rec;
        rec.round = i;
        rec.kappa_a = rng.bit() ? 1 : 0;
        rec.kappa_b = rng.bit() ? 1 : 0;
        rec.ja = rng.below(params.d);
        rec.jb = rng.below(params.d);

        // Eve's splitter transmits the same fraction eta the honest channel
        // would, so the interference statistics are identical by design.
        const double theta_a = std::numbers::pi * rec.kappa_a + slice_angle * rec.ja;
        const double theta_b = std::numbers::pi * rec.kappa_b + slice_angle * rec.jb;
        const ClickProbs probs = charlie_click_probabilities(theta_a, theta_b, params.mu_a,
                                                             params.mu_b, params.eta,
                                                             params.dark_count);
        const double u = rng.next_double();
        if (u < probs.p_left_only)
            rec.clicks = Click::left;
        else if (u < probs.p_left_only + probs.p_right_only)
            rec.clicks = Click::right;
        else if (u < probs.p_left_only + probs.p_right_only + probs.p_both)
            rec.clicks = Click::both;
        else
            rec.clicks = Click::none;

        const double u_mis = rng.next_double();
        if (params.misalignment > 0.0 && u_mis < params.misalignment) {
            if (rec.clicks == Click::left)
                rec.clicks = Click::right;
            else if (rec.clicks == Click::right)
                rec.clicks = Click::left;
        }

        sift(rec, params.d);

        const int slice = ((rec.ja - rec.jb) % params.d + params.d) % params.d;
        if (slice == 0 || slice == params.d / 2) ++stats.phase_matched;
        if (rec.clicks == Click::left || rec.clicks == Click::right) ++stats.detected;
        if (rec.sifted) {
            ++stats.sifted;
            if (rec.key_a != rec.key_b) ++stats.bit_errors;
            if (adversary == Adversary::beamsplit) {
                ++stats.usd_attempts;
                const double u_eve = rng.next_double();
                if (u_eve < p_usd) {
                    ++stats.usd_successes;
                    rec.eve_usd = rec.key_a ? EveUsd::bit1 : EveUsd::bit0;
                } else {
                    rec.eve_usd = EveUsd::inconclusive;
                }
            }
        }
        if (round_log) round_log->push_back(rec);
    }

    const auto ratio = [](std::uint64_t num, std::uint64_t den) {
        return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };
    const auto binomial_se = [](double p, std::uint64_t n) {
        return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
    };
    stats.gain_hat = ratio(stats.sifted, stats.phase_matched);
    stats.gain_se = binomial_se(stats.gain_hat, stats.phase_matched);
    stats.qber_hat = ratio(stats.bit_errors, stats.sifted);
    stats.qber_se = binomial_se(stats.qber_hat, stats.sifted);
    stats.sift_fraction = ratio(stats.sifted, stats.rounds);
    stats.usd_success_fraction = ratio(stats.usd_successes, stats.usd_attempts);
    stats.ep_lower_hat = 0.5 * stats.usd_success_fraction;
    return stats;
}

double estimate_attack_phase_error(const SimStats& stats) {
    if (stats.adversary != Adversary::beamsplit)
        throw std::logic_error("estimate_attack_phase_error: stats are not from an attack run");
    return 0.5 * stats.usd_success_fraction;
}

namespace {

const char* click_name(Click c) {
    switch (c) {
        case Click::none: return "none";
        case Click::left: return "L";
        case Click::right: return "R";
        case Click::both: return "both";
    }
    return "?";
}

const char* eve_name(EveUsd e) {
    switch (e) {
        case EveUsd::absent: return "absent";
        case EveUsd::inconclusive: return "inconclusive";
        case EveUsd::bit0: return "bit0";
        case EveUsd::bit1: return "bit1";
    }
    return "?";
}

}  // namespace

void write_round_log_csv(const std::vector<RoundRecord>& log, std::ostream& os) {
    os << "round,kappa_a,kappa_b,ja,jb,click,sifted,key_a,key_b,eve_usd\n";
    for (const RoundRecord& r : log) {
        os << r.round << ',' << int(r.kappa_a) << ',' << int(r.kappa_b) << ',' << r.ja << ','
           << r.jb << ',' << click_name(r.clicks) << ',' << (r.sifted ? 1 : 0) << ',';
        if (r.sifted)
            os << int(r.key_a) << ',' << int(r.key_b);
        else
            os << ',';
        os << ',' << eve_name(r.eve_usd) << '\n';
    }
}

void write_stats(const SimStats& stats, std::ostream& os) {
    os.precision(12);
    os << "rounds = " << stats.rounds << '\n'
       << "seed = " << stats.seed << '\n'
       << "adversary = " << (stats.adversary == Adversary::beamsplit ? "beamsplit" : "none") << '\n'
       << "detected = " << stats.detected << '\n'
       << "phase_matched = " << stats.phase_matched << '\n'
       << "sifted = " << stats.sifted << '\n'
       << "bit_errors = " << stats.bit_errors << '\n'
       << "gain_hat = " << stats.gain_hat << '\n'
       << "gain_se = " << stats.gain_se << '\n'
       << "qber_hat = " << stats.qber_hat << '\n'
       << "qber_se = " << stats.qber_se << '\n'
       << "sift_fraction = " << stats.sift_fraction << '\n'
       << "usd_attempts = " << stats.usd_attempts << '\n'
       << "usd_successes = " << stats.usd_successes << '\n'
       << "usd_success_fraction = " << stats.usd_success_fraction << '\n'
       << "ep_lower_hat = " << stats.ep_lower_hat << '\n';
}

}  // namespace pmqkd::sim
