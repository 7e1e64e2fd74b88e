#include "pmqkd/fock.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

namespace pmqkd::fock {

namespace {

double norm_sq_of(std::span<const cplx> amps) {
    double s = 0.0;
    for (const cplx& a : amps) s += std::norm(a);
    return s;
}

void check_subsystem(const CompositeState& state, std::size_t index) {
    if (index >= state.subsystem_count())
        throw std::out_of_range("subsystem index " + std::to_string(index) + " out of range");
}

std::vector<cplx> normalized(std::vector<cplx> amps) {
    const double n = std::sqrt(norm_sq_of(amps));
    for (cplx& a : amps) a /= n;
    return amps;
}

// Unnormalized coherent amplitudes alpha^n/sqrt(n!), built iteratively.
std::vector<cplx> coherent_amplitudes(cplx alpha, int cutoff) {
    std::vector<cplx> amps(static_cast<std::size_t>(cutoff) + 1);
    amps[0] = 1.0;
    for (int n = 1; n <= cutoff; ++n) amps[n] = amps[n - 1] * alpha / std::sqrt(double(n));
    return amps;
}

// Poisson(lambda) mass above the cutoff.
double poisson_tail(double lambda, int cutoff) {
    double term = std::exp(-lambda);
    double kept = term;
    for (int n = 1; n <= cutoff; ++n) {
        term *= lambda / n;
        kept += term;
    }
    return std::max(0.0, 1.0 - kept);
}

}  // namespace

SubsystemSpec SubsystemSpec::qudit(int d) {
    if (d < 2) throw std::invalid_argument("qudit dimension must be >= 2");
    return {Kind::qudit, d};
}

SubsystemSpec SubsystemSpec::mode(int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("mode cutoff must be >= 0");
    return {Kind::mode, cutoff + 1};
}

CompositeState::CompositeState(std::vector<SubsystemSpec> specs, std::vector<cplx> amplitudes)
    : specs_(std::move(specs)), amplitudes_(std::move(amplitudes)) {
    if (specs_.empty()) throw std::invalid_argument("state needs at least one subsystem");
    std::size_t dim = 1;
    for (const auto& s : specs_) {
        if (s.dimension < 1) throw std::invalid_argument("subsystem dimension must be >= 1");
        dim *= static_cast<std::size_t>(s.dimension);
    }
    if (amplitudes_.size() != dim)
        throw DimensionMismatch("amplitude vector length " + std::to_string(amplitudes_.size()) +
                                " does not match layout dimension " + std::to_string(dim));
    strides_.resize(specs_.size());
    std::size_t stride = 1;
    for (std::size_t i = specs_.size(); i-- > 0;) {
        strides_[i] = stride;
        stride *= static_cast<std::size_t>(specs_[i].dimension);
    }
    norm_sq_ = norm_sq_of(amplitudes_);
}

CompositeState with_truncation_tail(CompositeState state, double tail) {
    state.truncation_tail_ = tail;
    return state;
}

CompositeState coherent_state(cplx alpha, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("mode cutoff must be >= 0");
    const double lambda = std::norm(alpha);
    if (lambda > cutoff / 4.0)
        throw TruncationError("coherent_state: |alpha|^2 = " + std::to_string(lambda) +
                              " exceeds cutoff/4 = " + std::to_string(cutoff / 4.0));
    const double tail = poisson_tail(lambda, cutoff);
    if (tail >= 1e-9) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", tail);
        throw TruncationError(std::string("coherent_state: truncated tail mass ") + buf +
                              " >= 1e-9");
    }
    CompositeState state({SubsystemSpec::mode(cutoff)}, normalized(coherent_amplitudes(alpha, cutoff)));
    return with_truncation_tail(std::move(state), tail);
}

CompositeState fock_state(int k, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("mode cutoff must be >= 0");
    if (k < 0 || k > cutoff)
        throw std::out_of_range("fock_state: k = " + std::to_string(k) + " exceeds cutoff " +
                                std::to_string(cutoff));
    std::vector<cplx> amps(static_cast<std::size_t>(cutoff) + 1);
    amps[k] = 1.0;
    return CompositeState({SubsystemSpec::mode(cutoff)}, std::move(amps));
}

CompositeState pseudo_fock(cplx alpha, int d, int k, int cutoff) {
    if (d < 2) throw std::invalid_argument("pseudo_fock: d must be >= 2");
    if (k < 0 || k >= d)
        throw std::out_of_range("pseudo_fock: k = " + std::to_string(k) + " must satisfy 0 <= k < d");
    if (k > cutoff)
        throw std::out_of_range("pseudo_fock: cutoff " + std::to_string(cutoff) +
                                " below photon number " + std::to_string(k));
    auto amps = coherent_amplitudes(alpha, cutoff);
    for (int n = 0; n <= cutoff; ++n)
        if ((n - k) % d != 0) amps[n] = 0.0;  // exact zeros off the k (mod d) ladder
    if (norm_sq_of(amps) == 0.0) return fock_state(k, cutoff);  // alpha -> 0 limit
    const double lambda = std::norm(alpha);
    if (lambda == 0.0)
        return CompositeState({SubsystemSpec::mode(cutoff)}, normalized(std::move(amps)));
    // Ladder mass beyond the cutoff, relative to the untruncated ladder.
    double kept = 0.0, extended = 0.0;
    for (int n = k; n <= cutoff + 8 * d; n += d) {
        const double w = std::exp(n * std::log(lambda) - std::lgamma(n + 1.0));
        extended += w;
        if (n <= cutoff) kept += w;
    }
    const double tail = extended > 0.0 ? std::max(0.0, 1.0 - kept / extended) : 0.0;
    return with_truncation_tail(CompositeState({SubsystemSpec::mode(cutoff)}, normalized(std::move(amps))),
                                tail);
}

CompositeState tensor(std::span<const CompositeState> parts) {
    if (parts.empty()) throw std::invalid_argument("tensor: empty sequence");
    std::vector<SubsystemSpec> specs;
    std::size_t dim = 1;
    for (const auto& p : parts) {
        specs.insert(specs.end(), p.specs().begin(), p.specs().end());
        dim *= p.dimension();
    }
    std::vector<cplx> amps{1.0};
    amps.reserve(dim);
    for (const auto& p : parts) {
        std::vector<cplx> next(amps.size() * p.dimension());
        std::size_t w = 0;
        for (const cplx& left : amps)
            for (const cplx& right : p.amplitudes()) next[w++] = left * right;
        amps = std::move(next);
    }
    return CompositeState(std::move(specs), std::move(amps));
}

CompositeState tensor(const CompositeState& a, const CompositeState& b) {
    const CompositeState parts[] = {a, b};
    return tensor(std::span<const CompositeState>(parts));
}

CompositeState phase_shift(const CompositeState& state, std::size_t mode_index, double theta) {
    check_subsystem(state, mode_index);
    if (!state.specs()[mode_index].is_mode())
        throw std::invalid_argument("phase_shift: target subsystem is not a mode");
    std::vector<cplx> amps(state.amplitudes().begin(), state.amplitudes().end());
    const int dim = state.specs()[mode_index].dimension;
    std::vector<cplx> phase(dim);
    for (int n = 0; n < dim; ++n) phase[n] = std::polar(1.0, n * theta);
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= phase[state.digit(i, mode_index)];
    return CompositeState(state.specs(), std::move(amps));
}

CompositeState controlled_phase(const CompositeState& state, std::size_t control_index,
                                std::size_t mode_index, double unit_angle) {
    check_subsystem(state, control_index);
    check_subsystem(state, mode_index);
    if (!state.specs()[control_index].is_qudit())
        throw std::invalid_argument("controlled_phase: control subsystem is not a qudit");
    if (!state.specs()[mode_index].is_mode())
        throw std::invalid_argument("controlled_phase: target subsystem is not a mode");
    std::vector<cplx> amps(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const int c = state.digit(i, control_index);
        const int n = state.digit(i, mode_index);
        amps[i] *= std::polar(1.0, c * n * unit_angle);
    }
    return CompositeState(state.specs(), std::move(amps));
}

CompositeState controlled_minus(const CompositeState& state, std::size_t control_index,
                                std::size_t target_index) {
    check_subsystem(state, control_index);
    check_subsystem(state, target_index);
    const auto& cs = state.specs()[control_index];
    const auto& ts = state.specs()[target_index];
    if (!cs.is_qudit() || !ts.is_qudit())
        throw std::invalid_argument("controlled_minus: both subsystems must be qudits");
    if (cs.dimension != ts.dimension)
        throw DimensionMismatch("controlled_minus: qudit dimensions differ (" +
                                std::to_string(cs.dimension) + " vs " + std::to_string(ts.dimension) + ")");
    const int d = cs.dimension;
    const std::size_t tstride = state.stride(target_index);
    std::vector<cplx> amps(state.dimension());
    const auto in = state.amplitudes();
    for (std::size_t i = 0; i < in.size(); ++i) {
        const int jc = state.digit(i, control_index);
        const int jt = state.digit(i, target_index);
        const int jt_out = ((jt - jc) % d + d) % d;
        const std::size_t base = i - static_cast<std::size_t>(jt) * tstride;
        amps[base + static_cast<std::size_t>(jt_out) * tstride] = in[i];
    }
    return CompositeState(state.specs(), std::move(amps));
}

CompositeState inverse_qft(const CompositeState& state, std::size_t qudit_index) {
    check_subsystem(state, qudit_index);
    if (!state.specs()[qudit_index].is_qudit())
        throw std::invalid_argument("inverse_qft: target subsystem is not a qudit");
    const int d = state.specs()[qudit_index].dimension;
    const std::size_t stride = state.stride(qudit_index);
    // U[k][j] = e^{-2 pi i jk/d}/sqrt(d)
    std::vector<cplx> u(static_cast<std::size_t>(d) * d);
    const double unit = -2.0 * std::numbers::pi / d;
    const double scale = 1.0 / std::sqrt(double(d));
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) u[k * d + j] = std::polar(scale, unit * ((j * k) % d));
    const auto in = state.amplitudes();
    std::vector<cplx> amps(state.dimension());
    // Iterate over all indices with qudit digit 0; transform each fiber.
    for (std::size_t base = 0; base < in.size(); ++base) {
        if (state.digit(base, qudit_index) != 0) continue;
        for (int k = 0; k < d; ++k) {
            cplx acc = 0.0;
            for (int j = 0; j < d; ++j) acc += u[k * d + j] * in[base + j * stride];
            amps[base + k * stride] = acc;
        }
    }
    return CompositeState(state.specs(), std::move(amps));
}

CompositeState beam_splitter(const CompositeState& state, std::size_t mode_a, std::size_t mode_b,
                             double eta) {
    check_subsystem(state, mode_a);
    check_subsystem(state, mode_b);
    if (mode_a == mode_b) throw std::invalid_argument("beam_splitter: modes must be distinct");
    const auto& sa = state.specs()[mode_a];
    const auto& sb = state.specs()[mode_b];
    if (!sa.is_mode() || !sb.is_mode())
        throw std::invalid_argument("beam_splitter: both targets must be modes");
    if (sa.dimension != sb.dimension)
        throw DimensionMismatch("beam_splitter: mode cutoffs differ (" + std::to_string(sa.cutoff()) +
                                " vs " + std::to_string(sb.cutoff()) + ")");
    if (eta < 0.0 || eta > 1.0) throw std::domain_error("beam_splitter: eta must lie in [0, 1]");

    const int cutoff = sa.cutoff();
    const double t = std::sqrt(eta);
    const double r = std::sqrt(1.0 - eta);

    std::vector<double> sqrt_fact(2 * cutoff + 2);
    for (int n = 0; n < static_cast<int>(sqrt_fact.size()); ++n)
        sqrt_fact[n] = std::exp(0.5 * std::lgamma(n + 1.0));

    // out[(n,m)][p] = <p, n+m-p| U |n, m>, from the binomial expansion of
    // (t a+ + r b+)^n (-r a+ + t b+)^m / sqrt(n! m!).
    const int dm = cutoff + 1;
    std::vector<std::vector<double>> table(static_cast<std::size_t>(dm) * dm);
    for (int n = 0; n <= cutoff; ++n) {
        for (int m = 0; n + m <= cutoff; ++m) {
            std::vector<double> out(n + m + 1, 0.0);
            for (int i = 0; i <= n; ++i) {
                for (int j = 0; j <= m; ++j) {
                    const int p = i + j;
                    const int q = n + m - p;
                    const double binoms = std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                                                   std::lgamma(n - i + 1.0) + std::lgamma(m + 1.0) -
                                                   std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0));
                    double amp = binoms * std::pow(t, i + m - j) * std::pow(r, n - i + j) *
                                 ((j % 2 == 0) ? 1.0 : -1.0);
                    amp *= sqrt_fact[p] * sqrt_fact[q] / (sqrt_fact[n] * sqrt_fact[m]);
                    out[p] += amp;
                }
            }
            table[n * dm + m] = std::move(out);
        }
    }

    const std::size_t stride_a = state.stride(mode_a);
    const std::size_t stride_b = state.stride(mode_b);
    const auto in = state.amplitudes();
    std::vector<cplx> amps(state.dimension());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == cplx{}) continue;
        const int n = state.digit(i, mode_a);
        const int m = state.digit(i, mode_b);
        if (n + m > cutoff) {
            if (std::norm(in[i]) >= kProbabilityFloor)
                throw TruncationError("beam_splitter: populated component with total photon number " +
                                      std::to_string(n + m) + " exceeds cutoff " + std::to_string(cutoff));
            continue;
        }
        const std::size_t base = i - n * stride_a - m * stride_b;
        const auto& row = table[n * dm + m];
        for (int p = 0; p <= n + m; ++p)
            amps[base + p * stride_a + (n + m - p) * stride_b] += row[p] * in[i];
    }
    return CompositeState(state.specs(), std::move(amps));
}

std::vector<MeasurementOutcome> measure(const CompositeState& state, std::size_t subsystem_index,
                                        MeasureBasis basis) {
    check_subsystem(state, subsystem_index);
    const int d = state.specs()[subsystem_index].dimension;
    const std::size_t stride = state.stride(subsystem_index);
    const auto in = state.amplitudes();
    const double total = state.norm_sq();

    // Rotated per-fiber amplitudes b[outcome]; computational basis is the
    // identity rotation, fourier projects onto |~j> = (1/sqrt d) sum_k
    // e^{2 pi i jk/d}|k>.
    std::vector<cplx> rot;
    if (basis == MeasureBasis::fourier) {
        rot.resize(static_cast<std::size_t>(d) * d);
        const double unit = 2.0 * std::numbers::pi / d;
        const double scale = 1.0 / std::sqrt(double(d));
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) rot[j * d + k] = std::polar(scale, -unit * ((j * k) % d));
    }

    std::vector<std::vector<cplx>> posts(d, std::vector<cplx>(state.dimension()));
    std::vector<double> weights(d, 0.0);
    for (std::size_t base = 0; base < in.size(); ++base) {
        if (state.digit(base, subsystem_index) != 0) continue;
        for (int out = 0; out < d; ++out) {
            if (basis == MeasureBasis::computational) {
                const cplx a = in[base + out * stride];
                weights[out] += std::norm(a);
                posts[out][base + out * stride] = a;
            } else {
                cplx b = 0.0;
                for (int k = 0; k < d; ++k) b += rot[out * d + k] * in[base + k * stride];
                weights[out] += std::norm(b);
                // Post state |~out><~out|psi expanded back in the
                // computational basis of the subsystem.
                const double unit = 2.0 * std::numbers::pi / d;
                for (int k = 0; k < d; ++k)
                    posts[out][base + k * stride] +=
                        b * std::polar(1.0 / std::sqrt(double(d)), unit * ((out * k) % d));
            }
        }
    }

    std::vector<MeasurementOutcome> outcomes;
    outcomes.reserve(d);
    for (int out = 0; out < d; ++out) {
        const double p = total > 0.0 ? weights[out] / total : 0.0;
        std::vector<cplx> amps = std::move(posts[out]);
        if (weights[out] >= kProbabilityFloor) {
            const double inv = 1.0 / std::sqrt(weights[out]);
            for (cplx& a : amps) a *= inv;
        } else {
            std::fill(amps.begin(), amps.end(), cplx{});
        }
        outcomes.push_back({out, p, CompositeState(state.specs(), std::move(amps))});
    }
    return outcomes;
}

std::vector<double> total_photon_distribution(const CompositeState& state,
                                              std::span<const std::size_t> mode_indices) {
    int max_total = 0;
    for (std::size_t idx : mode_indices) {
        check_subsystem(state, idx);
        if (!state.specs()[idx].is_mode())
            throw std::invalid_argument("total photon number: subsystem " + std::to_string(idx) +
                                        " is not a mode");
        max_total += state.specs()[idx].cutoff();
    }
    std::vector<double> dist(max_total + 1, 0.0);
    const auto in = state.amplitudes();
    const double total = state.norm_sq();
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == cplx{}) continue;
        int n = 0;
        for (std::size_t idx : mode_indices) n += state.digit(i, idx);
        dist[n] += std::norm(in[i]);
    }
    if (total > 0.0)
        for (double& w : dist) w /= total;
    return dist;
}

std::pair<double, CompositeState> total_photon_projector(const CompositeState& state,
                                                         std::span<const std::size_t> mode_indices,
                                                         int total_n) {
    int max_total = 0;
    for (std::size_t idx : mode_indices) {
        check_subsystem(state, idx);
        if (!state.specs()[idx].is_mode())
            throw std::invalid_argument("total_photon_projector: subsystem " + std::to_string(idx) +
                                        " is not a mode");
        max_total += state.specs()[idx].cutoff();
    }
    if (total_n < 0 || total_n > max_total)
        throw std::out_of_range("total_photon_projector: N = " + std::to_string(total_n) +
                                " outside [0, " + std::to_string(max_total) + "]");
    const auto in = state.amplitudes();
    std::vector<cplx> amps(state.dimension());
    double weight = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == cplx{}) continue;
        int n = 0;
        for (std::size_t idx : mode_indices) n += state.digit(i, idx);
        if (n != total_n) continue;
        amps[i] = in[i];
        weight += std::norm(in[i]);
    }
    const double total = state.norm_sq();
    const double p = total > 0.0 ? weight / total : 0.0;
    if (weight >= kProbabilityFloor) {
        const double inv = 1.0 / std::sqrt(weight);
        for (cplx& a : amps) a *= inv;
    } else {
        std::fill(amps.begin(), amps.end(), cplx{});
    }
    return {p, CompositeState(state.specs(), std::move(amps))};
}

cplx inner_product(const CompositeState& a, const CompositeState& b) {
    if (a.specs() != b.specs())
        throw DimensionMismatch("inner_product: states have different subsystem layouts");
    cplx acc = 0.0;
    const auto av = a.amplitudes();
    const auto bv = b.amplitudes();
    for (std::size_t i = 0; i < av.size(); ++i) acc += std::conj(av[i]) * bv[i];
    return acc;
}

double fidelity(const CompositeState& a, const CompositeState& b) {
    return std::abs(inner_product(a, b));
}

void dump_csv(const CompositeState& state, std::ostream& os) {
    os << "basis_index,digits,re,im\n";
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        os << i << ',';
        for (std::size_t s = 0; s < state.subsystem_count(); ++s) {
            if (s) os << ':';
            os << state.digit(i, s);
        }
        const cplx a = state.amplitudes()[i];
        os << ',' << a.real() << ',' << a.imag() << '\n';
    }
}

}  // namespace pmqkd::fock
