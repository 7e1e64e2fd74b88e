#pragma once

#include <string>
#include <vector>

// Closed-form and series implementations of the analytic protocol
// quantities: per-photon-number yields and detection fractions, gain, the
// phase-error upper bound from encoding parity, the beam-splitting-attack
// USD probability and the phase-error lower bound it implies, key rates,
// and parameter sweeps over intensity or channel attenuation.

namespace pmqkd::rates {

struct ChannelPoint {
    double mu = 0.05;      // mean photon number per pulse per side
    double eta = 0.01;     // per-arm transmittance in (0, 1]
    double eta_db = 20.0;  // per-arm attenuation in dB, eta = 10^(-eta_db/10)
    double f = 1.15;       // error-correction efficiency
    double e_bit = 0.0;    // observed bit error rate

    static ChannelPoint from_eta(double mu, double eta, double f = 1.15, double e_bit = 0.0);
    static ChannelPoint from_eta_db(double mu, double eta_db, double f = 1.15, double e_bit = 0.0);
    void validate() const;
};

struct SweepRow {
    ChannelPoint point;
    double q_gain = 0.0;
    double ep_upper = 0.0;
    double ep_lower = 0.0;
    double p_usd = 0.0;
    double gap_ratio = 0.0;
    double rate_lower = 0.0;  // key rate with e_p = ep_upper (security proof)
    double rate_upper = 0.0;  // key rate with e_p = ep_lower (attack bound)
};

// Y_k = 1 - (1-eta)^k.
double yield_k(int k, double eta);

// Q_mu = 1 - e^{-2 eta mu}.
double gain(double mu, double eta);

// q_k = Y_k (2 mu)^k e^{-2 mu} / (k! Q_mu), evaluated in log space.
double photon_fraction(int k, double mu, double eta);

// Series truncation index guaranteeing Poisson tail < 1e-12 for mu <= 1.
int series_cutoff(double mu);

// e_p^u = 1 - sum_odd q_k. Closed form via
// sinh(a)-sinh(b) = 2 cosh((a+b)/2) sinh((a-b)/2); the truncated series is
// exposed separately as the cross-check path.
double phase_error_upper(double mu, double eta);
double phase_error_upper_series(double mu, double eta);

// Binary entropy, base 2, with h(0) = h(1) = 0.
double binary_entropy(double x);

// R >= Q_mu [1 - h(e_p) - f h(E_mu)]; may be negative.
double key_rate(const ChannelPoint& point, double e_p);

// p_usd = 1 - e^{-4 (1-eta) mu}, the optimal unambiguous-discrimination
// success probability for the two stored two-mode coherent states.
double usd_probability(double mu, double eta);

// e_p^L = p_usd / 2.
double phase_error_lower(double mu, double eta);

// (e_p^u - e_p^L) / e_p^u.
double gap_ratio(double mu, double eta);

enum class SweepAxis { mu, eta_db };

struct SweepSpec {
    SweepAxis axis = SweepAxis::mu;
    std::vector<double> values;  // grid along the axis
    double fixed_mu = 0.05;      // used when axis == eta_db
    double fixed_eta_db = 20.0;  // used when axis == mu
    double f = 1.15;
    double e_bit = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> errors;  // per-point domain errors, not fatal
};

SweepResult sweep(const SweepSpec& spec);

// Fig. 4 presets: (a) mu in [0.005, 0.5] step 0.005 at eta = 0.01,
// (b) 0..50 dB per-arm step 0.5 at mu = 0.05.
SweepSpec fig4a_grid(double f = 1.15, double e_bit = 0.0);
SweepSpec fig4b_grid(double f = 1.15, double e_bit = 0.0);

double eta_from_db(double eta_db);
double db_from_eta(double eta);

}  // namespace pmqkd::rates
