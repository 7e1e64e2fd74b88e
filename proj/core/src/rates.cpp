#include "pmqkd/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace pmqkd::rates {

namespace {

void check_eta(double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::domain_error("eta = " + std::to_string(eta) + " outside (0, 1]");
}

void check_mu(double mu) {
    if (!(mu >= 0.0)) throw std::domain_error("mu = " + std::to_string(mu) + " must be >= 0");
}

}  // namespace

double eta_from_db(double eta_db) { return std::pow(10.0, -eta_db / 10.0); }

double db_from_eta(double eta) {
    const double db = -10.0 * std::log10(eta);
    return db == 0.0 ? 0.0 : db;  // avoid -0 in output
}

ChannelPoint ChannelPoint::from_eta(double mu, double eta, double f, double e_bit) {
    ChannelPoint p{mu, eta, db_from_eta(eta), f, e_bit};
    p.validate();
    return p;
}

ChannelPoint ChannelPoint::from_eta_db(double mu, double eta_db, double f, double e_bit) {
    ChannelPoint p{mu, eta_from_db(eta_db), eta_db, f, e_bit};
    p.validate();
    return p;
}

void ChannelPoint::validate() const {
    check_mu(mu);
    check_eta(eta);
    if (std::abs(eta - eta_from_db(eta_db)) > 1e-12 * std::max(1.0, eta))
        throw std::domain_error("eta and eta_db are inconsistent");
    if (f < 1.0) throw std::domain_error("error-correction efficiency f must be >= 1");
    if (e_bit < 0.0 || e_bit > 0.5) throw std::domain_error("e_bit must lie in [0, 0.5]");
}

double yield_k(int k, double eta) {
    check_eta(eta);
    if (k < 0) throw std::domain_error("yield_k: k must be >= 0");
    if (k == 0) return 0.0;
    if (eta == 1.0) return 1.0;
    // 1 - (1-eta)^k without cancellation for small eta
    return -std::expm1(k * std::log1p(-eta));
}

double gain(double mu, double eta) {
    check_mu(mu);
    check_eta(eta);
    return -std::expm1(-2.0 * eta * mu);
}

int series_cutoff(double mu) {
    const double lambda = 2.0 * mu;
    return std::max(20, static_cast<int>(std::ceil(lambda + 10.0 * std::sqrt(lambda))));
}

double photon_fraction(int k, double mu, double eta) {
    const double q = gain(mu, eta);
    if (q <= 0.0) throw std::domain_error("photon_fraction: gain is zero");
    if (k < 0) throw std::domain_error("photon_fraction: k must be >= 0");
    if (k == 0) return 0.0;  // Y_0 = 0
    const double lambda = 2.0 * mu;
    const double log_pmf = k * std::log(lambda) - std::lgamma(k + 1.0) - lambda;
    return yield_k(k, eta) * std::exp(log_pmf) / q;
}

double phase_error_upper(double mu, double eta) {
    const double q = gain(mu, eta);
    if (q <= 0.0) throw std::domain_error("phase_error_upper: gain is zero");
    // sum_odd q_k = e^{-2mu} [sinh(2mu) - sinh(2mu(1-eta))] / Q_mu
    const double odd = std::exp(-2.0 * mu) * 2.0 * std::cosh(mu * (2.0 - eta)) *
                       std::sinh(mu * eta) / q;
    return 1.0 - odd;
}

double phase_error_upper_series(double mu, double eta) {
    const double q = gain(mu, eta);
    if (q <= 0.0) throw std::domain_error("phase_error_upper_series: gain is zero");
    double odd = 0.0;
    const int cut = series_cutoff(mu);
    for (int k = 1; k <= cut; k += 2) odd += photon_fraction(k, mu, eta);
    return 1.0 - odd;
}

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0) throw std::domain_error("binary_entropy: x outside [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double key_rate(const ChannelPoint& point, double e_p) {
    point.validate();
    if (e_p < 0.0 || e_p > 0.5) throw std::domain_error("key_rate: e_p outside [0, 0.5]");
    const double q = gain(point.mu, point.eta);
    return q * (1.0 - binary_entropy(e_p) - point.f * binary_entropy(point.e_bit));
}

double usd_probability(double mu, double eta) {
    check_mu(mu);
    check_eta(eta);
    return -std::expm1(-4.0 * (1.0 - eta) * mu);
}

double phase_error_lower(double mu, double eta) { return 0.5 * usd_probability(mu, eta); }

double gap_ratio(double mu, double eta) {
    const double upper = phase_error_upper(mu, eta);
    if (upper <= 0.0) throw std::domain_error("gap_ratio: phase-error upper bound is zero");
    return (upper - phase_error_lower(mu, eta)) / upper;
}

SweepResult sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("sweep: empty grid");
    SweepResult result;
    result.rows.reserve(spec.values.size());
    for (double v : spec.values) {
        try {
            const ChannelPoint point =
                spec.axis == SweepAxis::mu
                    ? ChannelPoint::from_eta_db(v, spec.fixed_eta_db, spec.f, spec.e_bit)
                    : ChannelPoint::from_eta_db(spec.fixed_mu, v, spec.f, spec.e_bit);
            SweepRow row;
            row.point = point;
            row.q_gain = gain(point.mu, point.eta);
            row.ep_upper = phase_error_upper(point.mu, point.eta);
            row.ep_lower = phase_error_lower(point.mu, point.eta);
            row.p_usd = usd_probability(point.mu, point.eta);
            row.gap_ratio = gap_ratio(point.mu, point.eta);
            row.rate_lower = key_rate(point, std::min(row.ep_upper, 0.5));
            row.rate_upper = key_rate(point, std::min(row.ep_lower, 0.5));
            result.rows.push_back(row);
        } catch (const std::domain_error& e) {
            result.errors.push_back("grid value " + std::to_string(v) + ": " + e.what());
        }
    }
    return result;
}

SweepSpec fig4a_grid(double f, double e_bit) {
    SweepSpec spec;
    spec.axis = SweepAxis::mu;
    for (int i = 1; i <= 100; ++i) spec.values.push_back(0.005 * i);
    spec.fixed_eta_db = db_from_eta(0.01);
    spec.f = f;
    spec.e_bit = e_bit;
    return spec;
}

SweepSpec fig4b_grid(double f, double e_bit) {
    SweepSpec spec;
    spec.axis = SweepAxis::eta_db;
    for (int i = 0; i <= 100; ++i) spec.values.push_back(0.5 * i);
    spec.fixed_mu = 0.05;
    spec.f = f;
    spec.e_bit = e_bit;
    return spec;
}

}  // namespace pmqkd::rates
