#include "pmqkd/rates.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pmqkd/fock.hpp"

using namespace pmqkd;

TEST(YieldK, FormulaAndDomain) {
    EXPECT_EQ(rates::yield_k(0, 0.3), 0.0);
    EXPECT_NEAR(rates::yield_k(1, 0.3), 0.3, 1e-15);
    EXPECT_NEAR(rates::yield_k(2, 0.1), 0.19, 1e-12);
    EXPECT_THROW(rates::yield_k(1, 0.0), std::domain_error);
    EXPECT_THROW(rates::yield_k(1, 1.2), std::domain_error);
    EXPECT_THROW(rates::yield_k(-1, 0.5), std::domain_error);
}

TEST(Gain, FormulaAndLimits) {
    EXPECT_EQ(rates::gain(0.0, 0.5), 0.0);
    EXPECT_NEAR(rates::gain(50.0, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(rates::gain(0.05, 0.01), 9.995e-4, 1e-9);
    EXPECT_THROW(rates::gain(-0.1, 0.5), std::domain_error);
}

TEST(PhotonFraction, ValuesAndNormalization) {
    EXPECT_EQ(rates::photon_fraction(0, 0.05, 0.01), 0.0);
    // Oracle: direct evaluation of Y_1 * pmf(1; 2 mu) / Q.
    const double q1 = 0.01 * 0.1 * std::exp(-0.1) / rates::gain(0.05, 0.01);
    EXPECT_NEAR(rates::photon_fraction(1, 0.05, 0.01), q1, 1e-12);
    EXPECT_NEAR(rates::photon_fraction(1, 0.05, 0.01), 0.9053, 1e-4);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double mu = 1e-3 + uni(rng) * (1.0 - 1e-3);
        const double eta = std::pow(10.0, -6.0 * uni(rng));  // [1e-6, 1]
        double total = 0.0;
        for (int k = 0; k <= rates::series_cutoff(mu); ++k)
            total += rates::photon_fraction(k, mu, eta);
        EXPECT_NEAR(total, 1.0, 1e-12) << "mu=" << mu << " eta=" << eta;
    }
}

TEST(PhaseErrorUpper, ClosedFormMatchesSeriesEverywhere) {
    EXPECT_NEAR(rates::phase_error_upper(0.05, 0.01), 0.0902, 1e-3);
    // eta = 1 collapses to (1 - e^{-2 mu})/2.
    for (double mu : {0.01, 0.05, 0.3}) {
        EXPECT_NEAR(rates::phase_error_upper(mu, 1.0), 0.5 * (1.0 - std::exp(-2.0 * mu)), 1e-12);
    }
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double mu = 1e-4 + uni(rng) * (1.0 - 1e-4);
        const double eta = std::pow(10.0, -5.0 * uni(rng));
        EXPECT_NEAR(rates::phase_error_upper(mu, eta), rates::phase_error_upper_series(mu, eta),
                    1e-10)
            << "mu=" << mu << " eta=" << eta;
    }
}

TEST(BinaryEntropy, ValuesAndDomain) {
    EXPECT_EQ(rates::binary_entropy(0.0), 0.0);
    EXPECT_EQ(rates::binary_entropy(1.0), 0.0);
    EXPECT_NEAR(rates::binary_entropy(0.5), 1.0, 1e-15);
    EXPECT_NEAR(rates::binary_entropy(0.11), 0.4999, 1e-3);
    EXPECT_THROW(rates::binary_entropy(-0.01), std::domain_error);
    EXPECT_THROW(rates::binary_entropy(1.01), std::domain_error);
}

TEST(KeyRate, ComposesGainAndEntropies) {
    const auto p1 = rates::ChannelPoint::from_eta(0.05, 0.01, 1.0, 0.0);
    EXPECT_NEAR(rates::key_rate(p1, 0.0), rates::gain(0.05, 0.01), 1e-15);

    // e_p = 0.5 kills the rate regardless of f.
    const auto p2 = rates::ChannelPoint::from_eta(0.05, 0.01, 1.15, 0.02);
    EXPECT_LT(rates::key_rate(p2, 0.5), 0.0);

    // Composition of the prior oracles at the reference point.
    const auto p3 = rates::ChannelPoint::from_eta(0.05, 0.01, 1.15, 0.0);
    const double ep = rates::phase_error_upper(0.05, 0.01);
    const double expect = rates::gain(0.05, 0.01) * (1.0 - rates::binary_entropy(ep));
    EXPECT_NEAR(rates::key_rate(p3, ep), expect, 1e-15);
    EXPECT_NEAR(expect / rates::gain(0.05, 0.01), 0.5627, 1e-3);

    EXPECT_THROW(rates::key_rate(p3, 0.7), std::domain_error);
}

TEST(UsdProbability, FormulaAndFockOracle) {
    EXPECT_EQ(rates::usd_probability(0.05, 1.0), 0.0);
    EXPECT_EQ(rates::usd_probability(0.0, 0.3), 0.0);
    EXPECT_NEAR(rates::usd_probability(0.05, 0.01), 0.17963, 1e-5);

    // Fock-space oracle: 1 - |<phi0|phi1>| for the stored two-mode coherent
    // states (Eve's memory after the splitter).
    for (const auto& [mu, eta] : std::vector<std::pair<double, double>>{
             {0.05, 0.01}, {0.05, 0.1}, {0.2, 0.5}, {0.4, 0.9}}) {
        const double amp = std::sqrt((1.0 - eta) * mu);
        const int cutoff = 14;
        const auto phi0 = fock::tensor(fock::coherent_state(amp, cutoff),
                                       fock::coherent_state(amp, cutoff));
        const auto phi1 = fock::tensor(fock::coherent_state(-amp, cutoff),
                                       fock::coherent_state(-amp, cutoff));
        const double oracle = 1.0 - std::abs(fock::inner_product(phi0, phi1));
        EXPECT_NEAR(rates::usd_probability(mu, eta), oracle, 1e-9)
            << "mu=" << mu << " eta=" << eta;
    }
}

TEST(PhaseErrorLower, HalfUsdAndBounded) {
    EXPECT_EQ(rates::phase_error_lower(0.05, 1.0), 0.0);
    EXPECT_NEAR(rates::phase_error_lower(0.05, 0.01), 0.089815, 1e-5);
    for (double mu : {0.01, 0.5, 5.0})
        EXPECT_LE(rates::phase_error_lower(mu, 0.2), 0.5);
}

TEST(GapRatio, ValuesAndMonotoneTrend) {
    EXPECT_NEAR(rates::gap_ratio(0.05, 0.01), 0.0044, 5e-4);
    EXPECT_NEAR(rates::gap_ratio(0.05, 1.0), 1.0, 1e-12);  // lower bound vanishes
    double prev = 2.0;
    for (double mu = 0.01; mu <= 0.5 + 1e-9; mu += 0.01) {
        const double g = rates::gap_ratio(mu, 0.01);
        EXPECT_LT(g, prev) << "mu=" << mu;
        prev = g;
    }
}

TEST(Monotonicity, GainAndUsd) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double mu = uni(rng);
        const double eta = 0.05 + 0.9 * uni(rng);
        const double d_mu = 0.01 + uni(rng) * 0.1;
        const double d_eta = std::min(1.0 - eta, 0.05);
        EXPECT_GE(rates::gain(mu + d_mu, eta), rates::gain(mu, eta));
        EXPECT_GE(rates::gain(mu, eta + d_eta), rates::gain(mu, eta));
        EXPECT_GE(rates::usd_probability(mu + d_mu, eta), rates::usd_probability(mu, eta));
        EXPECT_LE(rates::usd_probability(mu, eta + d_eta), rates::usd_probability(mu, eta));
    }
}

TEST(Sweep, SinglePointMatchesIndividualOperations) {
    rates::SweepSpec spec;
    spec.axis = rates::SweepAxis::mu;
    spec.values = {0.05};
    spec.fixed_eta_db = rates::db_from_eta(0.01);
    const auto result = rates::sweep(spec);
    ASSERT_EQ(result.rows.size(), 1u);
    ASSERT_TRUE(result.errors.empty());
    const auto& row = result.rows[0];
    EXPECT_NEAR(row.q_gain, rates::gain(0.05, 0.01), 1e-15);
    EXPECT_NEAR(row.ep_upper, rates::phase_error_upper(0.05, 0.01), 1e-15);
    EXPECT_NEAR(row.ep_lower, rates::phase_error_lower(0.05, 0.01), 1e-15);
    EXPECT_NEAR(row.p_usd, rates::usd_probability(0.05, 0.01), 1e-15);
    EXPECT_NEAR(row.gap_ratio, rates::gap_ratio(0.05, 0.01), 1e-15);
}

TEST(Sweep, Fig4aTrendsAndOrdering) {
    const auto result = rates::sweep(rates::fig4a_grid());
    ASSERT_EQ(result.rows.size(), 100u);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        EXPECT_LE(row.ep_lower, row.ep_upper);
        if (i > 0) {
            EXPECT_GT(row.ep_upper, result.rows[i - 1].ep_upper);  // monotone in mu
            EXPECT_GT(row.ep_lower, result.rows[i - 1].ep_lower);
        }
    }
}

TEST(Sweep, Fig4bTrendsAndOrdering) {
    const auto result = rates::sweep(rates::fig4b_grid());
    ASSERT_EQ(result.rows.size(), 101u);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        EXPECT_LE(row.ep_lower, row.ep_upper);
        if (i > 0) {
            EXPECT_LT(row.gap_ratio, result.rows[i - 1].gap_ratio);
        }
    }
}

TEST(Sweep, PerPointErrorsAreCollectedNotFatal) {
    rates::SweepSpec spec;
    spec.axis = rates::SweepAxis::mu;
    spec.values = {-0.5, 0.05, 0.1};  // first point is invalid
    spec.fixed_eta_db = 10.0;
    const auto result = rates::sweep(spec);
    EXPECT_EQ(result.rows.size(), 2u);
    EXPECT_EQ(result.errors.size(), 1u);
    rates::SweepSpec empty;
    empty.values = {};
    EXPECT_THROW(rates::sweep(empty), std::invalid_argument);
}

TEST(ChannelPoint, DbConsistencyEnforced) {
    const auto p = rates::ChannelPoint::from_eta_db(0.05, 30.0);
    EXPECT_NEAR(p.eta, 1e-3, 1e-15);
    rates::ChannelPoint bad = p;
    bad.eta = 0.5;  // now inconsistent with eta_db = 30
    EXPECT_THROW(bad.validate(), std::domain_error);
    EXPECT_THROW(rates::ChannelPoint::from_eta(0.05, 0.01, 0.9), std::domain_error);   // f < 1
    EXPECT_THROW(rates::ChannelPoint::from_eta(0.05, 0.01, 1.1, 0.7), std::domain_error);
}
