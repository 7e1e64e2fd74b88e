#include "pmqkd/cli/run.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>

#include "pmqkd/cli/io.hpp"

namespace pmqkd::cli {

namespace fs = std::filesystem;

namespace {

// Tracks files written by one invocation so a failure can remove partial
// output.
class OutputSet {
  public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    std::ofstream open(const std::string& name) {
        fs::create_directories(dir_);
        const fs::path path = dir_ / name;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        written_.push_back(path);
        return os;
    }

    void remove_all() {
        for (const fs::path& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        written_.clear();
    }

    const std::vector<fs::path>& written() const { return written_; }

  private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

rates::SweepSpec sweep_spec_from(const RatesOptions& opt) {
    if (opt.fig4a) return rates::fig4a_grid(opt.f, opt.e_bit);
    if (opt.fig4b) return rates::fig4b_grid(opt.f, opt.e_bit);
    rates::SweepSpec spec;
    spec.f = opt.f;
    spec.e_bit = opt.e_bit;
    const GridSpec mu = opt.mu.value_or(GridSpec{{0.05}, false});
    const GridSpec db = opt.eta_db.value_or(GridSpec{{20.0}, false});
    if (db.is_range) {
        spec.axis = rates::SweepAxis::eta_db;
        spec.values = db.values;
        spec.fixed_mu = mu.values.front();
    } else {
        spec.axis = rates::SweepAxis::mu;
        spec.values = mu.values;
        spec.fixed_eta_db = db.values.front();
    }
    return spec;
}

int run_rates(const RunConfig& config, const RatesOptions& opt, OutputSet& out_files,
              std::ostream& out, std::ostream& err) {
    const rates::SweepSpec spec = sweep_spec_from(opt);
    const rates::SweepResult result = rates::sweep(spec);
    for (const std::string& e : result.errors) err << "warning: " << e << '\n';
    if (result.rows.empty()) throw std::runtime_error("sweep produced no valid rows");

    {
        auto os = out_files.open("sweep.csv");
        write_sweep_csv(result.rows, config.csv_precision, os, config.clamp_rates);
    }
    if (config.emit_svg) {
        SvgOptions svg;
        svg.precision = config.csv_precision;
        std::string name = "sweep.svg";
        if (opt.fig4a) {
            name = "figure4a.svg";
            svg.title = "Phase error bounds vs intensity (eta = 0.01)";
            svg.x_label = "intensity mu";
        } else if (opt.fig4b) {
            name = "figure4b.svg";
            svg.title = "Phase error bounds vs per-arm attenuation (mu = 0.05)";
            svg.x_label = "per-arm attenuation (dB)";
        } else {
            svg.title = "Phase error bounds";
            svg.x_label = spec.axis == rates::SweepAxis::mu ? "intensity mu"
                                                            : "per-arm attenuation (dB)";
        }
        auto os = out_files.open(name);
        emit_svg(result.rows, svg, os);
    }
    out << "wrote " << result.rows.size() << " sweep rows\n";
    return 0;
}

int run_simulate(const SimulateOptions& opt, OutputSet& out_files, std::ostream& out) {
    std::vector<sim::RoundRecord> log;
    const sim::SimStats stats =
        sim::run_rounds(opt.params, opt.adversary, opt.round_log ? &log : nullptr);
    {
        auto os = out_files.open("sim_stats.txt");
        sim::write_stats(stats, os);
    }
    if (opt.round_log) {
        auto os = out_files.open("rounds.csv");
        sim::write_round_log_csv(log, os);
    }
    out << "simulated " << stats.rounds << " rounds: gain_hat = " << stats.gain_hat
        << ", qber_hat = " << stats.qber_hat;
    if (opt.adversary == sim::Adversary::beamsplit)
        out << ", usd_success_fraction = " << stats.usd_success_fraction;
    out << '\n';
    return 0;
}

int run_attack_sweep(const RunConfig& config, const AttackSweepOptions& opt, OutputSet& out_files,
                     std::ostream& out) {
    auto os = out_files.open("attack_sweep.csv");
    os << "mu,eta_db,eta,rounds,sifted,gain,gain_hat,qber_hat,ep_upper,ep_lower,p_usd,"
          "usd_success_fraction,ep_lower_hat\n";
    const int precision = config.csv_precision;
    for (std::size_t i = 0; i < opt.values.size(); ++i) {
        sim::ProtocolParams p = opt.base;
        if (opt.axis == rates::SweepAxis::mu)
            p.mu_a = p.mu_b = opt.values[i];
        else
            p.eta = rates::eta_from_db(opt.values[i]);
        p.seed = opt.base.seed + i;  // deterministic per-point stream
        const sim::SimStats stats = sim::run_rounds(p, sim::Adversary::beamsplit);
        const double mu = p.mu_a;
        os << format_sig(mu, precision) << ',' << format_sig(rates::db_from_eta(p.eta), precision)
           << ',' << format_sig(p.eta, precision) << ',' << stats.rounds << ',' << stats.sifted
           << ',' << format_sig(rates::gain(mu, p.eta), precision) << ','
           << format_sig(stats.gain_hat, precision) << ',' << format_sig(stats.qber_hat, precision)
           << ',' << format_sig(rates::phase_error_upper(mu, p.eta), precision) << ','
           << format_sig(rates::phase_error_lower(mu, p.eta), precision) << ','
           << format_sig(rates::usd_probability(mu, p.eta), precision) << ','
           << format_sig(stats.usd_success_fraction, precision) << ','
           << format_sig(stats.ep_lower_hat, precision) << '\n';
    }
    out << "wrote " << opt.values.size() << " attack-sweep rows\n";
    return 0;
}

}  // namespace

int run_verify_checks(const VerifyOptions& options, const VerifyTolerances& tolerances,
                      std::ostream& report, std::ostream* parity_os, int csv_precision) {
    const circuit::CircuitParams& p = options.params;
    report << "verify: d = " << p.d << ", mu_a = " << p.mu_a << ", mu_b = " << p.mu_b
           << ", cutoff = " << p.cutoff << ", eta = " << options.eta << '\n';

    const auto state = circuit::apply_virtual_block(circuit::build_encoded_state(p));
    const circuit::ParityTable table = circuit::joint_readout_distribution(state);
    if (parity_os) write_parity_csv(table, csv_precision, *parity_os);

    bool all_pass = true;
    const auto check = [&](const std::string& name, double measured, double tolerance) {
        const bool pass = measured <= tolerance;
        all_pass = all_pass && pass;
        report << (pass ? "PASS " : "FAIL ") << name << ": " << std::scientific
               << std::setprecision(3) << measured << " (tolerance " << tolerance << ")\n"
               << std::defaultfloat << std::setprecision(6);
        return pass;
    };

    double max_parity_dev = 0.0, max_modular_weight = 0.0, weight_sum = table.dropped_weight;
    for (const circuit::ParityRow& row : table.rows) {
        const double parity = row.total_n % 2 == 0 ? 0.0 : 1.0;
        max_parity_dev = std::max(max_parity_dev, std::abs(row.p_xx_disagree - parity));
        if ((row.total_n - row.k) % p.d != 0)
            max_modular_weight = std::max(max_modular_weight, row.weight);
        weight_sum += row.weight;
    }
    check("max |p_xx_disagree - parity(N)|", max_parity_dev, tolerances.parity);
    check("max weight of N != k (mod d) rows", max_modular_weight, tolerances.modular);
    check("|sum of weights - 1|", std::abs(weight_sum - 1.0), tolerances.weight_sum);

    double worst_pseudo = 0.0, worst_fock = 0.0;
    const std::complex<double> alpha = std::polar(std::sqrt(p.mu_a), p.alpha_phase);
    for (int k = 0; k < p.d; ++k) {
        const auto obs = circuit::verify_observation1(alpha, p.d, k, p.cutoff);
        if (obs.probability < 1e-18) continue;  // below the double-precision noise floor
        worst_pseudo = std::max(worst_pseudo, 1.0 - obs.fidelity_pseudo);
        worst_fock = std::max(worst_fock, 1.0 - obs.fidelity_fock);
    }
    check("observation 1: max (1 - fidelity vs pseudo-Fock)", worst_pseudo, tolerances.obs1_pseudo);
    if (p.d >= 16 && std::max(p.mu_a, p.mu_b) <= 0.05 + 1e-12)
        check("observation 1: max (1 - fidelity vs Fock)", worst_fock, tolerances.obs1_fock);
    else
        report << "info observation 1: max (1 - fidelity vs Fock) = " << std::scientific
               << std::setprecision(3) << worst_fock << std::defaultfloat << std::setprecision(6)
               << " (checked only for d >= 16, mu <= 0.05)\n";

    if (p.mu_a == p.mu_b) {
        const double eta = options.eta;
        const double from_table = circuit::phase_error_rate_from_parity(
            table, [eta](int n) { return rates::yield_k(n, eta); });
        const double closed_form = rates::phase_error_upper(p.mu_a, eta);
        check("|parity-table e_p - closed-form e_p^u|", std::abs(from_table - closed_form),
              tolerances.cross_ep);
    } else {
        report << "info: cross-module e_p^u check skipped (mu_a != mu_b)\n";
    }

    report << (all_pass ? "verify: all checks passed\n" : "verify: CHECK FAILURES\n");
    return all_pass ? 0 : 1;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    OutputSet out_files(config.output_dir);
    try {
        switch (config.command) {
            case Command::rates:
                return run_rates(config, std::get<RatesOptions>(config.options), out_files, out,
                                 err);
            case Command::simulate:
                return run_simulate(std::get<SimulateOptions>(config.options), out_files, out);
            case Command::attack_sweep:
                return run_attack_sweep(config, std::get<AttackSweepOptions>(config.options),
                                        out_files, out);
            case Command::verify: {
                const auto& opt = std::get<VerifyOptions>(config.options);
                auto parity = out_files.open("parity.csv");
                return run_verify_checks(opt, VerifyTolerances{}, out, &parity,
                                         config.csv_precision);
            }
        }
        return 1;
    } catch (const std::exception& e) {
        out_files.remove_all();
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace pmqkd::cli
