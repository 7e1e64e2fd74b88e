#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pmqkd/errors.hpp"

// Dense state-vector kernel for tensor products of finite-dimensional
// ancillas (qudits) and photon-number-truncated optical modes, with the
// gates and measurements used by the entanglement-based encoding circuit.
//
// States are immutable values: every operation returns a new state. Safe to
// share read-only across threads; parallelism belongs to callers.

namespace pmqkd::fock {

using cplx = std::complex<double>;

struct SubsystemSpec {
    enum class Kind { qudit, mode };

    Kind kind = Kind::qudit;
    int dimension = 2;  // d for qudits, cutoff+1 for modes

    static SubsystemSpec qudit(int d);
    static SubsystemSpec mode(int cutoff);
    static SubsystemSpec qubit() { return qudit(2); }

    bool is_qudit() const { return kind == Kind::qudit; }
    bool is_mode() const { return kind == Kind::mode; }
    int cutoff() const { return dimension - 1; }

    bool operator==(const SubsystemSpec&) const = default;
};

class CompositeState {
  public:
    // Validates that amplitudes.size() == product of subsystem dimensions
    // and caches the squared norm.
    CompositeState(std::vector<SubsystemSpec> specs, std::vector<cplx> amplitudes);

    const std::vector<SubsystemSpec>& specs() const { return specs_; }
    std::span<const cplx> amplitudes() const { return amplitudes_; }
    std::size_t dimension() const { return amplitudes_.size(); }
    std::size_t subsystem_count() const { return specs_.size(); }

    double norm_sq() const { return norm_sq_; }
    // Post-selected branches whose weight fell below the probability floor
    // are returned as all-zero states and flagged here.
    bool is_flagged_zero() const { return norm_sq_ < 1e-30; }
    // Probability mass discarded by a truncating constructor (coherent_state,
    // pseudo_fock); zero for states built any other way.
    double truncation_tail() const { return truncation_tail_; }

    // Row-major indexing, last subsystem fastest.
    std::size_t stride(std::size_t subsystem) const { return strides_[subsystem]; }
    int digit(std::size_t basis_index, std::size_t subsystem) const {
        return static_cast<int>(basis_index / strides_[subsystem]) % specs_[subsystem].dimension;
    }

  private:
    friend CompositeState with_truncation_tail(CompositeState state, double tail);

    std::vector<SubsystemSpec> specs_;
    std::vector<cplx> amplitudes_;
    std::vector<std::size_t> strides_;
    double norm_sq_ = 0.0;
    double truncation_tail_ = 0.0;
};

enum class MeasureBasis { computational, fourier };

struct MeasurementOutcome {
    int outcome_index = 0;
    double probability = 0.0;
    CompositeState post_state;
};

// Probability below which post-selected branches are flagged zero instead of
// normalized (avoids 0/0 in conditional probabilities).
inline constexpr double kProbabilityFloor = 1e-30;

// --- State constructors -----------------------------------------------------

// Truncated coherent state, renormalized over the kept basis. Requires
// |alpha|^2 <= cutoff/4 and discarded Poisson tail mass < 1e-9; the actual
// tail mass is recorded on the state (truncation_tail()).
CompositeState coherent_state(cplx alpha, int cutoff);

CompositeState fock_state(int k, int cutoff);

// Superposition of Fock states with photon number congruent to k mod d,
// amplitude proportional to alpha^n/sqrt(n!); renormalized after truncation.
CompositeState pseudo_fock(cplx alpha, int d, int k, int cutoff);

CompositeState tensor(std::span<const CompositeState> parts);
CompositeState tensor(const CompositeState& a, const CompositeState& b);

// --- Gates -------------------------------------------------------------------

// |n> -> e^{i n theta}|n> on one mode.
CompositeState phase_shift(const CompositeState& state, std::size_t mode_index, double theta);

// Component with control digit c applies phase_shift(c * unit_angle) to the
// mode. unit_angle = 2*pi/d realizes the discrete phase randomization,
// unit_angle = pi on a qubit control realizes the key encoding.
CompositeState controlled_phase(const CompositeState& state, std::size_t control_index,
                                std::size_t mode_index, double unit_angle);

// |j_c>|j_t> -> |j_c>|(j_t - j_c) mod d> on two equal-dimension qudits.
CompositeState controlled_minus(const CompositeState& state, std::size_t control_index,
                                std::size_t target_index);

// Inverse quantum Fourier transform on one qudit, in the convention of the
// encoding-circuit derivation: |j> -> (1/sqrt d) sum_k e^{-2 pi i jk/d}|k>,
// so that outcome k after a computational measurement tags photon numbers
// n = k (mod d).
CompositeState inverse_qft(const CompositeState& state, std::size_t qudit_index);

// Two-mode beam-splitter unitary with transmittance eta, convention
// a -> sqrt(eta) a + sqrt(1-eta) b,  b -> -sqrt(1-eta) a + sqrt(eta) b.
// Both targets must be modes with equal cutoff; any populated component whose
// total photon number exceeds the shared cutoff raises TruncationError.
CompositeState beam_splitter(const CompositeState& state, std::size_t mode_a,
                             std::size_t mode_b, double eta);

// --- Measurements & contractions ----------------------------------------------

// Full projective outcome distribution on one subsystem. Outcomes are ordered
// by index; probabilities sum to 1 for a normalized input; post-states are
// normalized (or flagged zero below the probability floor).
std::vector<MeasurementOutcome> measure(const CompositeState& state, std::size_t subsystem_index,
                                        MeasureBasis basis);

// Projects the listed modes onto total photon number N. Returns the branch
// probability and the normalized branch (flagged zero below the floor).
std::pair<double, CompositeState> total_photon_projector(const CompositeState& state,
                                                         std::span<const std::size_t> mode_indices,
                                                         int total_n);

// Probability weight per total photon number over the listed modes.
std::vector<double> total_photon_distribution(const CompositeState& state,
                                              std::span<const std::size_t> mode_indices);

cplx inner_product(const CompositeState& a, const CompositeState& b);

// |<a|b>|, the overlap magnitude used as fidelity for pure states.
double fidelity(const CompositeState& a, const CompositeState& b);

// Debug dump: one CSV row per basis state (basis_index, digits joined by ':',
// re, im).
void dump_csv(const CompositeState& state, std::ostream& os);

}  // namespace pmqkd::fock
