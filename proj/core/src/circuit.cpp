#include "pmqkd/circuit.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pmqkd::circuit {

using fock::CompositeState;
using fock::cplx;
using fock::SubsystemSpec;

void CircuitParams::validate() const {
    if (d < 2) throw std::invalid_argument("circuit: d must be >= 2");
    if (mu_a < 0.0 || mu_b < 0.0) throw std::domain_error("circuit: intensities must be >= 0");
    if (cutoff < 4.0 * std::max(mu_a, mu_b))
        throw TruncationError("circuit: cutoff " + std::to_string(cutoff) +
                              " below 4*max(mu_a, mu_b)");
}

namespace {

CompositeState uniform_qudit(int d) {
    std::vector<cplx> amps(d, 1.0 / std::sqrt(double(d)));
    return CompositeState({SubsystemSpec::qudit(d)}, std::move(amps));
}

void check_layout(const CompositeState& state) {
    const auto& specs = state.specs();
    const bool ok = specs.size() == 6 && specs[kA0].is_qudit() && specs[kB0].is_qudit() &&
                    specs[kA0].dimension == specs[kB0].dimension && specs[kA1].is_qudit() &&
                    specs[kA1].dimension == 2 && specs[kB1].is_qudit() && specs[kB1].dimension == 2 &&
                    specs[kA].is_mode() && specs[kB].is_mode() &&
                    specs[kA].dimension == specs[kB].dimension;
    if (!ok)
        throw DimensionMismatch(
            "expected layout (qudit d, qubit, mode, qudit d, qubit, mode) with matching dimensions");
}

}  // namespace

CompositeState build_encoded_state(const CircuitParams& params) {
    params.validate();
    const double two_pi = 2.0 * std::numbers::pi;
    const cplx alpha = std::polar(std::sqrt(params.mu_a), params.alpha_phase);
    const cplx beta = std::polar(std::sqrt(params.mu_b), params.beta_phase);

    const std::array<CompositeState, 6> parts = {
        uniform_qudit(params.d),          // A0 = |+_d>
        uniform_qudit(2),                 // A1 = |+>
        fock::coherent_state(alpha, params.cutoff),
        uniform_qudit(params.d),          // B0 = |+_d>
        uniform_qudit(2),                 // B1 = |+>
        fock::coherent_state(beta, params.cutoff),
    };
    CompositeState state = fock::tensor(std::span<const CompositeState>(parts));

    state = fock::controlled_phase(state, kA0, kA, two_pi / params.d);
    state = fock::controlled_phase(state, kA1, kA, std::numbers::pi);
    state = fock::controlled_phase(state, kB0, kB, two_pi / params.d);
    state = fock::controlled_phase(state, kB1, kB, std::numbers::pi);
    return state;
}

CompositeState apply_virtual_block(const CompositeState& state) {
    check_layout(state);
    return fock::inverse_qft(fock::controlled_minus(state, kA0, kB0), kA0);
}

ParityTable joint_readout_distribution(const CompositeState& state) {
    check_layout(state);
    const auto& specs = state.specs();
    const int d = specs[kA0].dimension;
    const int cutoff = specs[kA].cutoff();
    const int n_max = 2 * cutoff;

    // One pass over the amplitudes. For fixed (k, nA, j, nB) the four key-
    // qubit amplitudes carry the X (x) X coherence; a 2x2 Hadamard transform
    // yields the joint X-outcome amplitudes. Distinct (nA, nB) branches are
    // orthogonal, so their outcome weights add.
    //
    // agree[k][j][N] / disagree[k][j][N] accumulate the X (x) X outcome mass.
    const std::size_t cells = static_cast<std::size_t>(d) * d * (n_max + 1);
    std::vector<double> agree(cells, 0.0), disagree(cells, 0.0);
    const auto cell = [d, n_max](int k, int j, int n) {
        return (static_cast<std::size_t>(k) * d + j) * (n_max + 1) + n;
    };

    const auto amps = state.amplitudes();
    const std::size_t s_a1 = state.stride(kA1);
    const std::size_t s_b1 = state.stride(kB1);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (state.digit(i, kA1) != 0 || state.digit(i, kB1) != 0) continue;
        const cplx c00 = amps[i];
        const cplx c01 = amps[i + s_b1];
        const cplx c10 = amps[i + s_a1];
        const cplx c11 = amps[i + s_a1 + s_b1];
        if (c00 == cplx{} && c01 == cplx{} && c10 == cplx{} && c11 == cplx{}) continue;
        // <~xa ~xb|psi> = (1/2) sum_{a,b} (-1)^{a xa + b xb} c_ab
        const cplx x00 = 0.5 * (c00 + c01 + c10 + c11);
        const cplx x01 = 0.5 * (c00 - c01 + c10 - c11);
        const cplx x10 = 0.5 * (c00 + c01 - c10 - c11);
        const cplx x11 = 0.5 * (c00 - c01 - c10 + c11);
        const int k = state.digit(i, kA0);
        const int j = state.digit(i, kB0);
        const int n = state.digit(i, kA) + state.digit(i, kB);
        agree[cell(k, j, n)] += std::norm(x00) + std::norm(x11);
        disagree[cell(k, j, n)] += std::norm(x01) + std::norm(x10);
    }

    const double total = state.norm_sq();
    ParityTable table;
    for (int k = 0; k < d; ++k) {
        for (int j = 0; j < d; ++j) {
            for (int n = 0; n <= n_max; ++n) {
                const double w = agree[cell(k, j, n)] + disagree[cell(k, j, n)];
                if (w <= 0.0) continue;
                const double weight = w / total;
                if (weight < fock::kProbabilityFloor) {
                    table.dropped_weight += weight;
                    continue;
                }
                table.rows.push_back({k, j, n, weight, disagree[cell(k, j, n)] / w});
            }
        }
    }
    return table;
}

Observation1Result verify_observation1(std::complex<double> alpha, int d, int k, int cutoff) {
    if (d < 2) throw std::invalid_argument("verify_observation1: d must be >= 2");
    if (k < 0 || k >= d) throw std::out_of_range("verify_observation1: k must satisfy 0 <= k < d");

    CompositeState state = fock::tensor(uniform_qudit(d), fock::coherent_state(alpha, cutoff));
    state = fock::controlled_phase(state, 0, 1, 2.0 * std::numbers::pi / d);
    state = fock::inverse_qft(state, 0);
    const auto outcomes = fock::measure(state, 0, fock::MeasureBasis::computational);

    const auto& branch = outcomes[static_cast<std::size_t>(k)];
    Observation1Result result;
    result.probability = branch.probability;
    if (branch.post_state.is_flagged_zero()) return result;

    // The branch is |k> (x) |psi_mode|; slice out the mode amplitudes.
    const std::size_t stride = branch.post_state.stride(0);
    const auto amps = branch.post_state.amplitudes();
    std::vector<cplx> mode(amps.begin() + k * stride, amps.begin() + (k + 1) * stride);
    const CompositeState conditional({SubsystemSpec::mode(cutoff)}, std::move(mode));

    result.fidelity_pseudo = fock::fidelity(conditional, fock::pseudo_fock(alpha, d, k, cutoff));
    result.fidelity_fock = fock::fidelity(conditional, fock::fock_state(k, cutoff));
    return result;
}

double phase_error_rate_from_parity(const ParityTable& table,
                                    const std::function<double(int)>& yields) {
    if (table.rows.empty()) throw std::invalid_argument("phase_error_rate_from_parity: empty table");
    double even_mass = 0.0, total_mass = 0.0;
    for (const ParityRow& row : table.rows) {
        const double w = row.weight * yields(row.total_n);
        if (w < 0.0) throw std::domain_error("phase_error_rate_from_parity: negative yield");
        total_mass += w;
        if (row.total_n % 2 == 0) even_mass += w;
    }
    if (total_mass <= 0.0)
        throw std::domain_error("phase_error_rate_from_parity: zero detection mass");
    return even_mass / total_mass;
}

}  // namespace pmqkd::circuit
