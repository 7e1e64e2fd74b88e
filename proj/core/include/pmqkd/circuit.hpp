#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "pmqkd/fock.hpp"

// Source-replaced entanglement-based encoding circuit and the numerical
// certification of its parity <-> phase-error structure: the joint
// total-photon-number / phase-difference readout assigns X-basis
// disagreement 1 to odd total photon number and 0 to even.

namespace pmqkd::circuit {

struct CircuitParams {
    double mu_a = 0.05;
    double mu_b = 0.05;
    int d = 16;
    int cutoff = 12;
    double alpha_phase = 0.0;
    double beta_phase = 0.0;

    void validate() const;
};

// Subsystem order of the encoded state.
inline constexpr std::size_t kA0 = 0;  // Alice's phase qudit (dimension d)
inline constexpr std::size_t kA1 = 1;  // Alice's key qubit
inline constexpr std::size_t kA = 2;   // Alice's optical mode
inline constexpr std::size_t kB0 = 3;  // Bob's phase qudit
inline constexpr std::size_t kB1 = 4;  // Bob's key qubit
inline constexpr std::size_t kB = 5;   // Bob's optical mode

struct ParityRow {
    int k = 0;       // total-photon-number readout on A0
    int j = 0;       // phase-difference readout on B0
    int total_n = 0; // projected total photon number over (A, B)
    double weight = 0.0;
    double p_xx_disagree = 0.0;
};

struct ParityTable {
    std::vector<ParityRow> rows;   // ordered by (k, j, total_n)
    double dropped_weight = 0.0;   // mass of branches below the floor
};

// The six-subsystem state (A0, A1, A, B0, B1, B) after the controlled-phase
// encodings, before the virtual CNOT / inverse QFT.
fock::CompositeState build_encoded_state(const CircuitParams& params);

// controlled_minus(A0 -> B0) followed by inverse_qft(A0).
fock::CompositeState apply_virtual_block(const fock::CompositeState& state);

// Full joint readout: measure A0 and B0 computationally, project (A, B) on
// each total photon number of nonzero weight, and record the X (x) X
// disagreement probability of the key qubits per branch. Enumerates exact
// distributions; rows below the probability floor are dropped and their mass
// reported in dropped_weight.
ParityTable joint_readout_distribution(const fock::CompositeState& state);

struct Observation1Result {
    double probability = 0.0;     // P(readout = k)
    double fidelity_pseudo = 0.0; // vs pseudo_fock(alpha, d, k)
    double fidelity_fock = 0.0;   // vs fock_state(k)
};

// Runs the single-sided chain (controlled phase randomization, inverse QFT,
// computational readout k) and compares the conditional mode state against
// the pseudo-Fock and Fock references.
Observation1Result verify_observation1(std::complex<double> alpha, int d, int k, int cutoff);

// Detection-weighted even-total-photon-number fraction: the phase-error
// upper bound for relative per-photon-number yields, marginalized over
// (k, j). Matches rates::phase_error_upper when yields(N) = 1-(1-eta)^N and
// mu_a = mu_b.
double phase_error_rate_from_parity(const ParityTable& table,
                                    const std::function<double(int)>& yields);

}  // namespace pmqkd::circuit
