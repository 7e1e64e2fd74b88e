#include "pmqkd/fock.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace pmqkd;
using fock::CompositeState;
using fock::cplx;
using fock::SubsystemSpec;

namespace {

double poisson_pmf(double lambda, int n) {
    return std::exp(n * std::log(lambda) - std::lgamma(n + 1.0) - lambda);
}

// Random state on the given layout (normal amplitudes, normalized).
CompositeState random_state(std::vector<SubsystemSpec> specs, std::mt19937_64& rng) {
    std::size_t dim = 1;
    for (const auto& s : specs) dim *= s.dimension;
    std::normal_distribution<double> normal;
    std::vector<cplx> amps(dim);
    double norm = 0.0;
    for (cplx& a : amps) {
        a = {normal(rng), normal(rng)};
        norm += std::norm(a);
    }
    for (cplx& a : amps) a /= std::sqrt(norm);
    return CompositeState(std::move(specs), std::move(amps));
}

CompositeState plus_qudit(int d) {
    return CompositeState({SubsystemSpec::qudit(d)},
                          std::vector<cplx>(d, 1.0 / std::sqrt(double(d))));
}

}  // namespace

TEST(CoherentState, VacuumIsExact) {
    const auto state = fock::coherent_state(0.0, 8);
    EXPECT_EQ(state.amplitudes()[0], cplx(1.0));
    for (std::size_t n = 1; n < state.dimension(); ++n) EXPECT_EQ(state.amplitudes()[n], cplx(0.0));
    EXPECT_EQ(state.truncation_tail(), 0.0);
}

TEST(CoherentState, MatchesPoissonProbabilities) {
    const double mu = 0.05;
    const auto state = fock::coherent_state(std::sqrt(mu), 16);
    // Oracle: direct Poisson evaluation (tail is ~1e-22, far below tolerance).
    EXPECT_NEAR(std::norm(state.amplitudes()[0]), poisson_pmf(mu, 0), 1e-12);
    EXPECT_NEAR(std::norm(state.amplitudes()[0]), 0.951229424501, 1e-10);
    EXPECT_NEAR(std::norm(state.amplitudes()[1]), poisson_pmf(mu, 1), 1e-12);
    EXPECT_NEAR(std::norm(state.amplitudes()[1]), 0.0475614712, 1e-9);
    EXPECT_NEAR(state.norm_sq(), 1.0, 1e-12);
    EXPECT_LT(state.truncation_tail(), 1e-12);
}

TEST(CoherentState, GuardViolationThrows) {
    EXPECT_THROW(fock::coherent_state(1.0, 2), TruncationError);  // |alpha|^2 > cutoff/4
    EXPECT_THROW(fock::coherent_state(std::sqrt(3.0), 12), TruncationError);  // tail >= 1e-9
    EXPECT_NO_THROW(fock::coherent_state(std::sqrt(0.2), 12));
}

TEST(FockState, BasisVectorsAndRangeCheck) {
    const auto zero = fock::fock_state(0, 5);
    EXPECT_EQ(zero.amplitudes()[0], cplx(1.0));
    const auto top = fock::fock_state(5, 5);
    EXPECT_EQ(top.amplitudes()[5], cplx(1.0));
    EXPECT_THROW(fock::fock_state(6, 5), std::out_of_range);
}

TEST(Tensor, BasisAndPlusProducts) {
    const auto zz = fock::tensor(fock::fock_state(0, 1), fock::fock_state(0, 1));
    EXPECT_EQ(zz.dimension(), 4u);
    EXPECT_EQ(zz.amplitudes()[0], cplx(1.0));

    const auto plus0 = fock::tensor(plus_qudit(2), fock::fock_state(0, 1));
    // (|00> + |10>)/sqrt(2)
    EXPECT_NEAR(std::abs(plus0.amplitudes()[0] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_EQ(plus0.amplitudes()[1], cplx(0.0));
    EXPECT_NEAR(std::abs(plus0.amplitudes()[2] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(Tensor, NormMultiplicativity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_state({SubsystemSpec::qudit(3)}, rng);
        const auto b = random_state({SubsystemSpec::mode(4), SubsystemSpec::qudit(2)}, rng);
        const auto ab = fock::tensor(a, b);
        EXPECT_NEAR(ab.norm_sq(), a.norm_sq() * b.norm_sq(), 1e-12);
    }
    EXPECT_THROW(fock::tensor(std::span<const CompositeState>{}), std::invalid_argument);
}

TEST(PhaseShift, IdentityRotationAndSign) {
    const auto alpha = fock::coherent_state(0.4, 8);
    const auto same = fock::phase_shift(alpha, 0, 0.0);
    EXPECT_NEAR(fock::fidelity(alpha, same), 1.0, 1e-15);

    // Coherent rotation law: phase_shift(theta)|alpha> = |alpha e^{i theta}>.
    const double theta = 0.73;
    const auto rotated = fock::phase_shift(alpha, 0, theta);
    const auto direct = fock::coherent_state(std::polar(0.4, theta), 8);
    EXPECT_NEAR(fock::fidelity(rotated, direct), 1.0, 1e-12);

    const auto one = fock::fock_state(1, 3);
    const auto flipped = fock::phase_shift(one, 0, std::numbers::pi);
    EXPECT_NEAR(std::abs(flipped.amplitudes()[1] + 1.0), 0.0, 1e-15);

    EXPECT_THROW(fock::phase_shift(plus_qudit(2), 0, 1.0), std::invalid_argument);
}

TEST(ControlledPhase, ZeroControlIsIdentityAndTypeChecks) {
    const auto state = fock::tensor(fock::fock_state(0, 3), fock::coherent_state(0.5, 8));
    // control is a mode here -> must throw
    EXPECT_THROW(fock::controlled_phase(state, 0, 1, 1.0), std::invalid_argument);

    auto qc = fock::tensor(CompositeState({SubsystemSpec::qudit(4)}, {1, 0, 0, 0}),
                           fock::coherent_state(0.5, 8));
    const auto out = fock::controlled_phase(qc, 0, 1, 2.0 * std::numbers::pi / 4);
    EXPECT_NEAR(fock::fidelity(qc, out), 1.0, 1e-15);
}

TEST(ControlledPhase, KeyEncodingProducesPlusMinusAlpha) {
    const double mu = 0.05;
    const cplx a = std::sqrt(mu);
    const auto state = fock::tensor(plus_qudit(2), fock::coherent_state(a, 12));
    const auto encoded = fock::controlled_phase(state, 0, 1, std::numbers::pi);
    // Oracle: (|0>|alpha> + |1>|-alpha>)/sqrt(2) built directly.
    const auto plus = fock::coherent_state(a, 12);
    const auto minus = fock::coherent_state(-a, 12);
    std::vector<cplx> expect(encoded.dimension());
    for (int n = 0; n <= 12; ++n) {
        expect[n] = plus.amplitudes()[n] / std::sqrt(2.0);
        expect[13 + n] = minus.amplitudes()[n] / std::sqrt(2.0);
    }
    const CompositeState oracle(encoded.specs(), std::move(expect));
    EXPECT_NEAR(fock::fidelity(encoded, oracle), 1.0, 1e-13);
}

TEST(ControlledPhase, DiscretePhaseRandomization) {
    const int d = 8;
    const cplx a = 0.3;
    const int cutoff = 10;
    const auto state = fock::tensor(plus_qudit(d), fock::coherent_state(a, cutoff));
    const auto encoded = fock::controlled_phase(state, 0, 1, 2.0 * std::numbers::pi / d);
    // Oracle: (1/sqrt d) sum_j |j>|e^{2 pi i j/d} alpha>.
    std::vector<cplx> expect;
    for (int j = 0; j < d; ++j) {
        const auto rot =
            fock::coherent_state(a * std::polar(1.0, 2.0 * std::numbers::pi * j / d), cutoff);
        for (const cplx& amp : rot.amplitudes()) expect.push_back(amp / std::sqrt(double(d)));
    }
    const CompositeState oracle(encoded.specs(), std::move(expect));
    EXPECT_NEAR(fock::fidelity(encoded, oracle), 1.0, 1e-12);
}

TEST(ControlledMinus, ModularArithmeticAndInverse) {
    const int d = 16;
    std::vector<cplx> amps(d * d);
    amps[3 * d + 1] = 1.0;  // |3>|1>
    const CompositeState state({SubsystemSpec::qudit(d), SubsystemSpec::qudit(d)}, std::move(amps));
    const auto out = fock::controlled_minus(state, 0, 1);
    EXPECT_NEAR(std::abs(out.amplitudes()[3 * d + 14] - 1.0), 0.0, 1e-15);  // |3>|(1-3) mod 16>

    std::vector<cplx> amps2(d * d);
    amps2[0 * d + 5] = 1.0;  // control |0> leaves the target alone
    const CompositeState state2({SubsystemSpec::qudit(d), SubsystemSpec::qudit(d)},
                                std::move(amps2));
    const auto out2 = fock::controlled_minus(state2, 0, 1);
    EXPECT_NEAR(std::abs(out2.amplitudes()[5] - 1.0), 0.0, 1e-15);

    // Applying the swapped-sign permutation restores a random state.
    std::mt19937_64 rng(5);
    const auto psi = random_state({SubsystemSpec::qudit(6), SubsystemSpec::qudit(6)}, rng);
    const auto once = fock::controlled_minus(psi, 0, 1);
    EXPECT_NEAR(once.norm_sq(), 1.0, 1e-12);
    std::vector<cplx> restored(once.dimension());
    for (std::size_t i = 0; i < once.dimension(); ++i) {
        const int jc = int(i) / 6, jt = int(i) % 6;
        restored[jc * 6 + (jt + jc) % 6] = once.amplitudes()[i];
    }
    const CompositeState back(psi.specs(), std::move(restored));
    EXPECT_NEAR(fock::fidelity(psi, back), 1.0, 1e-13);

    const CompositeState mismatched({SubsystemSpec::qudit(4), SubsystemSpec::qudit(6)},
                                    std::vector<cplx>(24, 0.0));
    EXPECT_THROW(fock::controlled_minus(mismatched, 0, 1), DimensionMismatch);
}

TEST(InverseQft, QubitCaseIsHadamard) {
    const CompositeState zero({SubsystemSpec::qudit(2)}, {1, 0});
    const CompositeState one({SubsystemSpec::qudit(2)}, {0, 1});
    const auto h0 = fock::inverse_qft(zero, 0);
    const auto h1 = fock::inverse_qft(one, 0);
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(h0.amplitudes()[0] - s), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h0.amplitudes()[1] - s), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h1.amplitudes()[0] - s), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h1.amplitudes()[1] + s), 0.0, 1e-15);
}

TEST(InverseQft, UnitaryMatrix) {
    const int d = 8;
    // Build the matrix from basis images and check U U^dagger = I.
    std::vector<std::vector<cplx>> u(d, std::vector<cplx>(d));
    for (int j = 0; j < d; ++j) {
        std::vector<cplx> e(d);
        e[j] = 1.0;
        const auto img =
            fock::inverse_qft(CompositeState({SubsystemSpec::qudit(d)}, std::move(e)), 0);
        for (int k = 0; k < d; ++k) u[k][j] = img.amplitudes()[k];
    }
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            cplx dot = 0.0;
            for (int k = 0; k < d; ++k) dot += u[r][k] * std::conj(u[c][k]);
            EXPECT_NEAR(std::abs(dot - (r == c ? 1.0 : 0.0)), 0.0, 1e-12);
        }
    }
}

TEST(InverseQft, CharacterOrthogonality) {
    // In the implemented convention, (1/sqrt d) sum_j e^{+2 pi i kj/d}|j>
    // maps to |k>.
    const int d = 16;
    for (int k : {0, 1, 7, 15}) {
        std::vector<cplx> amps(d);
        for (int j = 0; j < d; ++j)
            amps[j] = std::polar(1.0 / std::sqrt(double(d)), 2.0 * std::numbers::pi * k * j / d);
        const auto out =
            fock::inverse_qft(CompositeState({SubsystemSpec::qudit(d)}, std::move(amps)), 0);
        EXPECT_NEAR(std::abs(out.amplitudes()[k]), 1.0, 1e-12) << "k=" << k;
    }
    EXPECT_THROW(fock::inverse_qft(fock::fock_state(0, 2), 0), std::invalid_argument);
}

TEST(Measure, PlusStateBothBases) {
    const auto plus = plus_qudit(2);
    const auto comp = fock::measure(plus, 0, fock::MeasureBasis::computational);
    ASSERT_EQ(comp.size(), 2u);
    EXPECT_NEAR(comp[0].probability, 0.5, 1e-12);
    EXPECT_NEAR(comp[1].probability, 0.5, 1e-12);

    const auto four = fock::measure(plus, 0, fock::MeasureBasis::fourier);
    EXPECT_NEAR(four[0].probability, 1.0, 1e-12);
    EXPECT_NEAR(four[1].probability, 0.0, 1e-12);
}

TEST(Measure, CoherentPhotonNumberIsTruncatedPoisson) {
    const double mu = 0.05;
    const int cutoff = 16;
    const auto outcomes = fock::measure(fock::coherent_state(std::sqrt(mu), cutoff), 0,
                                        fock::MeasureBasis::computational);
    double renorm = 0.0;
    for (int n = 0; n <= cutoff; ++n) renorm += poisson_pmf(mu, n);
    for (int n = 0; n <= cutoff; ++n)
        EXPECT_NEAR(outcomes[n].probability, poisson_pmf(mu, n) / renorm, 1e-12) << "n=" << n;
}

TEST(Measure, CompletenessAndOrthogonalPostStates) {
    std::mt19937_64 rng(23);
    const std::vector<SubsystemSpec> layout = {SubsystemSpec::qudit(4), SubsystemSpec::mode(3),
                                               SubsystemSpec::qudit(2)};
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi = random_state(layout, rng);
        for (std::size_t sub = 0; sub < layout.size(); ++sub) {
            for (auto basis : {fock::MeasureBasis::computational, fock::MeasureBasis::fourier}) {
                const auto outcomes = fock::measure(psi, sub, basis);
                double total = 0.0;
                for (const auto& o : outcomes) total += o.probability;
                EXPECT_NEAR(total, 1.0, 1e-10);
                for (std::size_t i = 0; i < outcomes.size(); ++i) {
                    if (outcomes[i].post_state.is_flagged_zero()) continue;
                    EXPECT_NEAR(outcomes[i].post_state.norm_sq(), 1.0, 1e-10);
                    for (std::size_t j = i + 1; j < outcomes.size(); ++j) {
                        if (outcomes[j].post_state.is_flagged_zero()) continue;
                        EXPECT_LT(fock::fidelity(outcomes[i].post_state, outcomes[j].post_state),
                                  1e-10);
                    }
                }
            }
        }
    }
}

TEST(TotalPhotonProjector, VacuumAndSingleExcitation) {
    const auto vac2 = fock::tensor(fock::fock_state(0, 2), fock::fock_state(0, 2));
    const std::vector<std::size_t> modes = {0, 1};
    const auto [p0, post0] = fock::total_photon_projector(vac2, modes, 0);
    EXPECT_NEAR(p0, 1.0, 1e-15);
    EXPECT_NEAR(fock::fidelity(post0, vac2), 1.0, 1e-15);

    const auto zero_one = fock::tensor(fock::fock_state(0, 2), fock::fock_state(1, 2));
    const auto [p, post] = fock::total_photon_projector(zero_one, modes, 0);
    EXPECT_EQ(p, 0.0);
    EXPECT_TRUE(post.is_flagged_zero());
}

TEST(TotalPhotonProjector, TwoCoherentModesSingleTotalPhoton) {
    const double mu = 0.05;
    const int cutoff = 16;
    const auto pair = fock::tensor(fock::coherent_state(std::sqrt(mu), cutoff),
                                   fock::coherent_state(std::sqrt(mu), cutoff));
    const std::vector<std::size_t> modes = {0, 1};
    const auto [p, post] = fock::total_photon_projector(pair, modes, 1);
    // Oracle: Poisson sum over n+m = 1 with both modes of intensity mu.
    EXPECT_NEAR(p, 2.0 * mu * std::exp(-2.0 * mu), 1e-10);
    EXPECT_NEAR(post.norm_sq(), 1.0, 1e-12);
    EXPECT_THROW(fock::total_photon_projector(pair, modes, 33), std::out_of_range);
}

TEST(BeamSplitter, IdentityAtFullTransmission) {
    std::mt19937_64 rng(31);
    const auto psi = random_state({SubsystemSpec::mode(5), SubsystemSpec::mode(5)}, rng);
    // Restrict the random state to totals within the shared cutoff first.
    std::vector<cplx> amps(psi.amplitudes().begin(), psi.amplitudes().end());
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (psi.digit(i, 0) + psi.digit(i, 1) > 5) amps[i] = 0.0;
    CompositeState safe(psi.specs(), std::move(amps));
    const auto out = fock::beam_splitter(safe, 0, 1, 1.0);
    EXPECT_NEAR(fock::fidelity(out, safe), safe.norm_sq(), 1e-12);
}

TEST(BeamSplitter, CoherentSplittingLaw) {
    const double mu = 0.16;
    const double eta = 0.3;
    const int cutoff = 12;
    const auto in = fock::tensor(fock::coherent_state(std::sqrt(mu), cutoff),
                                 fock::coherent_state(0.0, cutoff));
    const auto out = fock::beam_splitter(in, 0, 1, eta);
    const auto oracle = fock::tensor(fock::coherent_state(std::sqrt(eta * mu), cutoff),
                                     fock::coherent_state(std::sqrt((1.0 - eta) * mu), cutoff));
    EXPECT_GT(fock::fidelity(out, oracle), 1.0 - 1e-10);
}

TEST(BeamSplitter, SinglePhotonCase) {
    const auto in = fock::tensor(fock::fock_state(1, 2), fock::fock_state(0, 2));
    const auto out = fock::beam_splitter(in, 0, 1, 0.5);
    // sqrt(1/2)(|10> + |01>) in the fixed sign convention.
    const double s = std::sqrt(0.5);
    EXPECT_NEAR(std::abs(out.amplitudes()[1 * 3 + 0] - s), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(out.amplitudes()[0 * 3 + 1] - s), 0.0, 1e-12);

    // Second input port picks up the minus sign.
    const auto in2 = fock::tensor(fock::fock_state(0, 2), fock::fock_state(1, 2));
    const auto out2 = fock::beam_splitter(in2, 0, 1, 0.5);
    EXPECT_NEAR(std::abs(out2.amplitudes()[1 * 3 + 0] + s), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(out2.amplitudes()[0 * 3 + 1] - s), 0.0, 1e-12);
}

TEST(BeamSplitter, ErrorsOnBadTargets) {
    const auto over = fock::tensor(fock::fock_state(1, 1), fock::fock_state(1, 1));
    EXPECT_THROW(fock::beam_splitter(over, 0, 1, 0.5), TruncationError);

    const auto uneven = fock::tensor(fock::fock_state(0, 2), fock::fock_state(0, 3));
    EXPECT_THROW(fock::beam_splitter(uneven, 0, 1, 0.5), DimensionMismatch);

    const auto with_qudit = fock::tensor(plus_qudit(2), fock::fock_state(0, 2));
    EXPECT_THROW(fock::beam_splitter(with_qudit, 0, 1, 0.5), std::invalid_argument);
}

TEST(BeamSplitter, CoherencePropertyRandomized) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    // cutoff 28 keeps the constructor's 1e-9 tail rule satisfied across the
    // whole |alpha|^2 <= cutoff/4 guard domain (minus a small margin).
    const int cutoff = 28;
    for (int trial = 0; trial < 25; ++trial) {
        const double mag = std::sqrt(uni(rng) * 6.5);
        const cplx alpha = std::polar(mag, 2.0 * std::numbers::pi * uni(rng));
        const double eta = uni(rng);
        CompositeState in =
            fock::tensor(fock::coherent_state(alpha, cutoff), fock::coherent_state(0.0, cutoff));
        CompositeState out = fock::beam_splitter(in, 0, 1, eta);
        CompositeState oracle =
            fock::tensor(fock::coherent_state(std::sqrt(eta) * alpha, cutoff),
                         fock::coherent_state(std::sqrt(1.0 - eta) * alpha, cutoff));
        EXPECT_GT(fock::fidelity(out, oracle), 1.0 - 1e-9) << "alpha=" << alpha << " eta=" << eta;
    }
}

TEST(InnerProduct, SelfCoherentOverlapAndErrors) {
    const auto psi = fock::coherent_state(0.5, 10);
    EXPECT_NEAR(std::abs(fock::inner_product(psi, psi) - 1.0), 0.0, 1e-12);

    // <alpha|-alpha> = e^{-2|alpha|^2}.
    const double a = 0.55;
    const auto plus = fock::coherent_state(a, 16);
    const auto minus = fock::coherent_state(-a, 16);
    EXPECT_NEAR(std::abs(fock::inner_product(plus, minus)), std::exp(-2.0 * a * a), 1e-10);

    EXPECT_NEAR(std::abs(fock::inner_product(fock::fock_state(0, 4), fock::fock_state(3, 4))), 0.0,
                1e-15);
    EXPECT_THROW(fock::inner_product(fock::fock_state(0, 4), fock::fock_state(0, 5)),
                 DimensionMismatch);
}

TEST(PseudoFock, NearVacuumAndSmallAlphaLimit) {
    const auto pf = fock::pseudo_fock(0.3, 16, 0, 20);
    EXPECT_GT(fock::fidelity(pf, fock::fock_state(0, 20)), 1.0 - 1e-15);

    const auto pf1 = fock::pseudo_fock(1e-8, 8, 1, 20);
    EXPECT_GT(fock::fidelity(pf1, fock::fock_state(1, 20)), 1.0 - 1e-15);

    EXPECT_THROW(fock::pseudo_fock(0.1, 4, 4, 10), std::out_of_range);
    EXPECT_THROW(fock::pseudo_fock(0.1, 12, 9, 6), std::out_of_range);
}

TEST(PseudoFock, SupportIsExactlyModular) {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 2 + int(uni(rng) * 14);
        const int cutoff = 12 + int(uni(rng) * 8);
        const int k = int(uni(rng) * std::min(d, cutoff));
        const cplx alpha =
            std::polar(std::sqrt(uni(rng) * cutoff / 4.0), 2.0 * std::numbers::pi * uni(rng));
        const auto pf = fock::pseudo_fock(alpha, d, k, cutoff);
        for (int n = 0; n <= cutoff; ++n) {
            if ((n - k) % d != 0) {
                EXPECT_EQ(pf.amplitudes()[n], cplx(0.0));
            }
        }
        EXPECT_NEAR(pf.norm_sq(), 1.0, 1e-12);
    }
}

TEST(Unitarity, AllGatesPreserveNorm) {
    std::mt19937_64 rng(71);
    const std::vector<SubsystemSpec> layout = {SubsystemSpec::qudit(4), SubsystemSpec::qudit(4),
                                               SubsystemSpec::mode(6)};
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 15; ++trial) {
        const auto psi = random_state(layout, rng);
        EXPECT_NEAR(fock::phase_shift(psi, 2, uni(rng) * 7).norm_sq(), 1.0, 1e-12);
        EXPECT_NEAR(fock::controlled_phase(psi, 0, 2, uni(rng) * 7).norm_sq(), 1.0, 1e-12);
        EXPECT_NEAR(fock::controlled_minus(psi, 0, 1).norm_sq(), 1.0, 1e-12);
        EXPECT_NEAR(fock::inverse_qft(psi, 1).norm_sq(), 1.0, 1e-12);
    }
}

TEST(GateCommutation, MeasureBeforeOrAfterControlledPhase) {
    // Measuring the control qudit computationally commutes with the
    // controlled phase: joint (control outcome, photon number) statistics
    // agree whether the control collapses before or after the gate.
    const int d = 6;
    const int cutoff = 8;
    const double unit = 2.0 * std::numbers::pi / d;
    const auto start = fock::tensor(plus_qudit(d), fock::coherent_state(0.45, cutoff));

    std::vector<std::vector<double>> joint_a(d), joint_b(d);
    const auto gated = fock::controlled_phase(start, 0, 1, unit);
    for (const auto& ctrl : fock::measure(gated, 0, fock::MeasureBasis::computational)) {
        joint_a[ctrl.outcome_index].assign(cutoff + 1, 0.0);
        if (ctrl.post_state.is_flagged_zero()) continue;
        for (const auto& ph : fock::measure(ctrl.post_state, 1, fock::MeasureBasis::computational))
            joint_a[ctrl.outcome_index][ph.outcome_index] = ctrl.probability * ph.probability;
    }
    for (const auto& ctrl : fock::measure(start, 0, fock::MeasureBasis::computational)) {
        joint_b[ctrl.outcome_index].assign(cutoff + 1, 0.0);
        if (ctrl.post_state.is_flagged_zero()) continue;
        const auto gated_b = fock::controlled_phase(ctrl.post_state, 0, 1, unit);
        for (const auto& ph : fock::measure(gated_b, 1, fock::MeasureBasis::computational))
            joint_b[ctrl.outcome_index][ph.outcome_index] = ctrl.probability * ph.probability;
    }
    for (int c = 0; c < d; ++c)
        for (int n = 0; n <= cutoff; ++n)
            EXPECT_NEAR(joint_a[c][n], joint_b[c][n], 1e-10) << "c=" << c << " n=" << n;
}

TEST(DumpCsv, RowPerBasisState) {
    std::ostringstream os;
    fock::dump_csv(fock::tensor(plus_qudit(2), fock::fock_state(0, 1)), os);
    const std::string text = os.str();
    EXPECT_NE(text.find("basis_index,digits,re,im"), std::string::npos);
    EXPECT_NE(text.find("0,0:0,"), std::string::npos);
    EXPECT_NE(text.find("2,1:0,"), std::string::npos);
}
