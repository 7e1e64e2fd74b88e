#include "pmqkd/cli/config.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pmqkd::cli {

namespace {

struct FileValue {
    std::string value;
    std::string where;  // "path:line:col" for diagnostics
};

using SectionMap = std::map<std::string, FileValue>;

struct ConfigFile {
    SectionMap global;
    std::map<std::string, SectionMap> sections;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"", {"output_dir", "csv_precision", "emit_svg", "clamp_rates"}},
        {"rates", {"mu", "eta", "eta_db", "f", "e_bit", "fig4a", "fig4b"}},
        {"simulate",
         {"mu", "mu_a", "mu_b", "eta", "eta_db", "d", "dark_count", "misalignment", "f", "rounds",
          "seed", "adversary", "round_log"}},
        {"attack-sweep", {"mu", "eta_db", "d", "rounds", "seed", "f"}},
        {"verify", {"mu", "mu_a", "mu_b", "d", "cutoff", "eta"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

ConfigFile parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    ConfigFile file;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        std::string body = comment == std::string::npos ? line : line.substr(0, comment);
        const std::string stripped = trim(body);
        if (stripped.empty()) continue;
        const int col = static_cast<int>(body.find_first_not_of(" \t")) + 1;
        const std::string where =
            path.string() + ":" + std::to_string(line_no) + ":" + std::to_string(col);

        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError(where + ": unterminated section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (!known_keys().count(section))
                throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (!known_keys().at(section).count(key))
            throw ConfigError(where + ": unknown key '" + key + "' in section [" +
                              (section.empty() ? "global" : section) + "]");
        SectionMap& target = section.empty() ? file.global : file.sections[section];
        target[key] = FileValue{value, where};
    }
    return file;
}

double to_double(const FileValue& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v.value, &used);
    } catch (const std::exception&) {
        throw ConfigError(v.where + ": '" + v.value + "' is not a number");
    }
    if (used != v.value.size())
        throw ConfigError(v.where + ": '" + v.value + "' is not a number");
    return out;
}

int to_int(const FileValue& v) {
    const double d = to_double(v);
    const int i = static_cast<int>(d);
    if (double(i) != d) throw ConfigError(v.where + ": '" + v.value + "' is not an integer");
    return i;
}

std::uint64_t to_u64(const FileValue& v) {
    try {
        std::size_t used = 0;
        const unsigned long long out = std::stoull(v.value, &used);
        if (used != v.value.size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        throw ConfigError(v.where + ": '" + v.value + "' is not a non-negative integer");
    }
}

bool to_bool(const FileValue& v) {
    if (v.value == "true" || v.value == "1" || v.value == "yes" || v.value == "on") return true;
    if (v.value == "false" || v.value == "0" || v.value == "no" || v.value == "off") return false;
    throw ConfigError(v.where + ": '" + v.value + "' is not a boolean");
}

const FileValue* find(const SectionMap* map, const std::string& key) {
    if (!map) return nullptr;
    const auto it = map->find(key);
    return it == map->end() ? nullptr : &it->second;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    const auto parse_num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ConfigError("'" + text + "' is not a value or start:stop:step range");
        }
        if (used != s.size())
            throw ConfigError("'" + text + "' is not a value or start:stop:step range");
        return v;
    };
    GridSpec grid;
    if (parts.size() == 1) {
        grid.values.push_back(parse_num(parts[0]));
        return grid;
    }
    if (parts.size() != 3)
        throw ConfigError("'" + text + "' is not a value or start:stop:step range");
    const double start = parse_num(parts[0]);
    const double stop = parse_num(parts[1]);
    const double step = parse_num(parts[2]);
    if (step <= 0.0) throw ConfigError("range step must be positive in '" + text + "'");
    if (stop < start) throw ConfigError("range stop below start in '" + text + "'");
    grid.is_range = true;
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) grid.values.push_back(start + i * step);
    return grid;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"pmqkd: phase-matching QKD rate analysis, circuit verification, and protocol simulation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    int csv_precision = 0;
    bool emit_svg = false;
    bool clamp_rates = false;
    app.add_option("--config", config_path, "flat key=value config file with per-command sections");
    auto* opt_outdir = app.add_option("--output-dir", output_dir,
                                      "output directory (default: $PMQKD_OUTPUT_DIR or .)");
    auto* opt_prec =
        app.add_option("--csv-precision", csv_precision, "significant digits in CSV output")
            ->check(CLI::Range(1, 17));
    auto* opt_svg = app.add_flag("--emit-svg", emit_svg, "also write SVG charts");
    auto* opt_clamp = app.add_flag("--clamp-rates", clamp_rates, "floor rate CSV columns at 0");

    // rates
    auto* rates_cmd = app.add_subcommand("rates", "analytic bound sweep over mu or attenuation");
    rates_cmd->fallthrough();
    std::string rates_mu, rates_eta_db;
    double rates_eta = 0.0, rates_f = 1.15, rates_e_bit = 0.0;
    bool fig4a = false, fig4b = false;
    auto* r_mu = rates_cmd->add_option("--mu", rates_mu, "intensity value or start:stop:step");
    auto* r_db = rates_cmd->add_option("--eta-db", rates_eta_db,
                                       "per-arm attenuation in dB, value or start:stop:step");
    auto* r_eta = rates_cmd->add_option("--eta", rates_eta, "per-arm transmittance in (0,1]");
    auto* r_f = rates_cmd->add_option("--f", rates_f, "error-correction efficiency");
    auto* r_ebit = rates_cmd->add_option("--e-bit", rates_e_bit, "observed bit error rate");
    auto* r_4a = rates_cmd->add_flag("--fig4a", fig4a, "preset: mu 0.005:0.5:0.005 at eta = 0.01");
    auto* r_4b = rates_cmd->add_flag("--fig4b", fig4b, "preset: 0:50:0.5 dB at mu = 0.05");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo protocol rounds");
    sim_cmd->fallthrough();
    double sim_mu = 0.05, sim_mu_a = 0.05, sim_mu_b = 0.05, sim_eta = 0.1, sim_eta_db = 0.0;
    double sim_dark = 0.0, sim_mis = 0.0, sim_f = 1.15;
    std::uint64_t sim_rounds = 100000, sim_seed = 1;
    int sim_d = 16;
    std::string sim_adversary = "none";
    bool round_log = false;
    auto* s_mu = sim_cmd->add_option("--mu", sim_mu, "intensity for both arms");
    auto* s_mu_a = sim_cmd->add_option("--mu-a", sim_mu_a, "Alice's intensity");
    auto* s_mu_b = sim_cmd->add_option("--mu-b", sim_mu_b, "Bob's intensity");
    auto* s_eta = sim_cmd->add_option("--eta", sim_eta, "per-arm transmittance");
    auto* s_db = sim_cmd->add_option("--eta-db", sim_eta_db, "per-arm attenuation in dB");
    auto* s_d = sim_cmd->add_option("--d", sim_d, "phase-slice count (even)");
    auto* s_dark = sim_cmd->add_option("--dark", sim_dark, "per-detector dark-count probability");
    auto* s_mis = sim_cmd->add_option("--misalignment", sim_mis, "L/R label flip probability");
    auto* s_f = sim_cmd->add_option("--f", sim_f, "error-correction efficiency");
    auto* s_rounds = sim_cmd->add_option("--rounds", sim_rounds, "number of protocol rounds");
    auto* s_seed = sim_cmd->add_option("--seed", sim_seed, "master RNG seed");
    auto* s_adv = sim_cmd->add_option("--adversary", sim_adversary, "none | beamsplit")
                      ->check(CLI::IsMember({"none", "beamsplit"}));
    auto* s_log = sim_cmd->add_flag("--round-log", round_log, "write per-round CSV log");

    // attack-sweep
    auto* atk_cmd = app.add_subcommand("attack-sweep",
                                       "beam-splitting attack Monte Carlo across a grid");
    atk_cmd->fallthrough();
    std::string atk_mu = "0.05", atk_eta_db;
    std::uint64_t atk_rounds = 200000, atk_seed = 1;
    int atk_d = 16;
    double atk_f = 1.15;
    auto* a_mu = atk_cmd->add_option("--mu", atk_mu, "intensity value or start:stop:step");
    auto* a_db = atk_cmd->add_option("--eta-db", atk_eta_db,
                                     "per-arm attenuation in dB, value or start:stop:step");
    auto* a_d = atk_cmd->add_option("--d", atk_d, "phase-slice count (even)");
    auto* a_rounds = atk_cmd->add_option("--rounds", atk_rounds, "rounds per grid point");
    auto* a_seed = atk_cmd->add_option("--seed", atk_seed, "master RNG seed");
    auto* a_f = atk_cmd->add_option("--f", atk_f, "error-correction efficiency");

    // verify
    auto* ver_cmd = app.add_subcommand("verify", "certify the circuit parity / phase-error law");
    ver_cmd->fallthrough();
    double ver_mu = 0.05, ver_mu_a = 0.05, ver_mu_b = 0.05, ver_eta = 0.1;
    int ver_d = 16, ver_cutoff = 12;
    auto* v_mu = ver_cmd->add_option("--mu", ver_mu, "intensity for both arms");
    auto* v_mu_a = ver_cmd->add_option("--mu-a", ver_mu_a, "Alice's intensity");
    auto* v_mu_b = ver_cmd->add_option("--mu-b", ver_mu_b, "Bob's intensity");
    auto* v_d = ver_cmd->add_option("--d", ver_d, "phase-slice count");
    auto* v_cutoff = ver_cmd->add_option("--cutoff", ver_cutoff, "Fock cutoff per mode");
    auto* v_eta = ver_cmd->add_option("--eta", ver_eta, "channel for the cross-module check");

    // CLI11's vector overload consumes arguments back to front.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string(e.what()) + "\n\n" + app.help());
    }

    ConfigFile file;
    if (!config_path.empty()) file = parse_config_file(config_path);

    // Global settings: flag > file > environment > default.
    RunConfig config;
    if (opt_outdir->count() > 0) {
        config.output_dir = output_dir;
    } else if (const FileValue* v = find(&file.global, "output_dir")) {
        config.output_dir = v->value;
    } else if (const char* env = std::getenv("PMQKD_OUTPUT_DIR")) {
        config.output_dir = env;
    }
    if (opt_prec->count() > 0)
        config.csv_precision = csv_precision;
    else if (const FileValue* v = find(&file.global, "csv_precision"))
        config.csv_precision = to_int(*v);
    if (config.csv_precision < 1 || config.csv_precision > 17)
        throw ConfigError("csv_precision must lie in [1, 17]");
    if (opt_svg->count() > 0)
        config.emit_svg = emit_svg;
    else if (const FileValue* v = find(&file.global, "emit_svg"))
        config.emit_svg = to_bool(*v);
    if (opt_clamp->count() > 0)
        config.clamp_rates = clamp_rates;
    else if (const FileValue* v = find(&file.global, "clamp_rates"))
        config.clamp_rates = to_bool(*v);

    const auto section = [&file](const char* name) -> const SectionMap* {
        const auto it = file.sections.find(name);
        return it == file.sections.end() ? nullptr : &it->second;
    };

    if (app.got_subcommand(rates_cmd)) {
        config.command = Command::rates;
        const SectionMap* sec = section("rates");
        RatesOptions opt;
        if (r_4a->count() > 0) opt.fig4a = fig4a;
        else if (const FileValue* v = find(sec, "fig4a")) opt.fig4a = to_bool(*v);
        if (r_4b->count() > 0) opt.fig4b = fig4b;
        else if (const FileValue* v = find(sec, "fig4b")) opt.fig4b = to_bool(*v);

        std::optional<std::string> mu_text, db_text;
        std::optional<double> eta_value;
        if (r_mu->count() > 0) mu_text = rates_mu;
        else if (const FileValue* v = find(sec, "mu")) mu_text = v->value;
        if (r_db->count() > 0) db_text = rates_eta_db;
        else if (const FileValue* v = find(sec, "eta_db")) db_text = v->value;
        if (r_eta->count() > 0) eta_value = rates_eta;
        else if (const FileValue* v = find(sec, "eta")) eta_value = to_double(*v);
        if (r_f->count() > 0) opt.f = rates_f;
        else if (const FileValue* v = find(sec, "f")) opt.f = to_double(*v);
        if (r_ebit->count() > 0) opt.e_bit = rates_e_bit;
        else if (const FileValue* v = find(sec, "e_bit")) opt.e_bit = to_double(*v);

        if (eta_value && db_text)
            throw ConfigError("conflicting --eta and --eta-db; give one of them");
        if (opt.fig4a && opt.fig4b) throw ConfigError("presets --fig4a and --fig4b conflict");
        if ((opt.fig4a || opt.fig4b) && (mu_text || db_text || eta_value))
            throw ConfigError("presets fix the grid; drop --mu/--eta/--eta-db");
        if (eta_value) {
            if (!(*eta_value > 0.0) || *eta_value > 1.0)
                throw ConfigError("--eta must lie in (0, 1]");
            opt.eta_db = GridSpec{{rates::db_from_eta(*eta_value)}, false};
        }
        if (mu_text) opt.mu = parse_grid(*mu_text);
        if (db_text) opt.eta_db = parse_grid(*db_text);
        if (opt.mu && opt.eta_db && opt.mu->is_range && opt.eta_db->is_range)
            throw ConfigError("only one of --mu/--eta-db may be a range");
        config.options = opt;
    } else if (app.got_subcommand(sim_cmd)) {
        config.command = Command::simulate;
        const SectionMap* sec = section("simulate");
        SimulateOptions opt;
        sim::ProtocolParams& p = opt.params;

        std::optional<double> mu_both;
        if (s_mu->count() > 0) mu_both = sim_mu;
        else if (const FileValue* v = find(sec, "mu")) mu_both = to_double(*v);
        if (mu_both) p.mu_a = p.mu_b = *mu_both;
        if (s_mu_a->count() > 0) p.mu_a = sim_mu_a;
        else if (const FileValue* v = find(sec, "mu_a")) p.mu_a = to_double(*v);
        if (s_mu_b->count() > 0) p.mu_b = sim_mu_b;
        else if (const FileValue* v = find(sec, "mu_b")) p.mu_b = to_double(*v);

        std::optional<double> eta_value, db_value;
        if (s_eta->count() > 0) eta_value = sim_eta;
        else if (const FileValue* v = find(sec, "eta")) eta_value = to_double(*v);
        if (s_db->count() > 0) db_value = sim_eta_db;
        else if (const FileValue* v = find(sec, "eta_db")) db_value = to_double(*v);
        if (eta_value && db_value)
            throw ConfigError("conflicting --eta and --eta-db; give one of them");
        if (db_value) p.eta = rates::eta_from_db(*db_value);
        else if (eta_value) p.eta = *eta_value;

        if (s_d->count() > 0) p.d = sim_d;
        else if (const FileValue* v = find(sec, "d")) p.d = to_int(*v);
        if (s_dark->count() > 0) p.dark_count = sim_dark;
        else if (const FileValue* v = find(sec, "dark_count")) p.dark_count = to_double(*v);
        if (s_mis->count() > 0) p.misalignment = sim_mis;
        else if (const FileValue* v = find(sec, "misalignment")) p.misalignment = to_double(*v);
        if (s_f->count() > 0) p.f = sim_f;
        else if (const FileValue* v = find(sec, "f")) p.f = to_double(*v);
        if (s_rounds->count() > 0) p.rounds = sim_rounds;
        else if (const FileValue* v = find(sec, "rounds")) p.rounds = to_u64(*v);
        if (s_seed->count() > 0) p.seed = sim_seed;
        else if (const FileValue* v = find(sec, "seed")) p.seed = to_u64(*v);

        std::string adversary = sim_adversary;
        if (s_adv->count() == 0)
            if (const FileValue* v = find(sec, "adversary")) adversary = v->value;
        if (adversary == "none") opt.adversary = sim::Adversary::none;
        else if (adversary == "beamsplit") opt.adversary = sim::Adversary::beamsplit;
        else throw ConfigError("adversary must be 'none' or 'beamsplit'");

        if (s_log->count() > 0) opt.round_log = round_log;
        else if (const FileValue* v = find(sec, "round_log")) opt.round_log = to_bool(*v);

        try {
            p.validate();
            if (opt.adversary == sim::Adversary::beamsplit && p.mu_a != p.mu_b)
                throw std::domain_error("beamsplit attack model assumes mu_a == mu_b");
        } catch (const std::exception& e) {
            throw ConfigError(std::string("simulate: ") + e.what());
        }
        config.options = opt;
    } else if (app.got_subcommand(atk_cmd)) {
        config.command = Command::attack_sweep;
        const SectionMap* sec = section("attack-sweep");
        AttackSweepOptions opt;

        std::string mu_text = atk_mu, db_text;
        if (a_mu->count() == 0)
            if (const FileValue* v = find(sec, "mu")) mu_text = v->value;
        if (a_db->count() > 0) db_text = atk_eta_db;
        else if (const FileValue* v = find(sec, "eta_db")) db_text = v->value;
        if (a_d->count() > 0) opt.base.d = atk_d;
        else if (const FileValue* v = find(sec, "d")) opt.base.d = to_int(*v);
        if (a_rounds->count() > 0) opt.base.rounds = atk_rounds;
        else if (const FileValue* v = find(sec, "rounds")) opt.base.rounds = to_u64(*v);
        if (a_seed->count() > 0) opt.base.seed = atk_seed;
        else if (const FileValue* v = find(sec, "seed")) opt.base.seed = to_u64(*v);
        if (a_f->count() > 0) opt.base.f = atk_f;
        else if (const FileValue* v = find(sec, "f")) opt.base.f = to_double(*v);

        const GridSpec mu_grid = parse_grid(mu_text);
        GridSpec db_grid{{rates::db_from_eta(0.1)}, false};
        if (!db_text.empty()) db_grid = parse_grid(db_text);
        if (mu_grid.is_range && db_grid.is_range)
            throw ConfigError("only one of --mu/--eta-db may be a range");
        if (mu_grid.is_range || !db_grid.is_range) {
            opt.axis = rates::SweepAxis::mu;
            opt.values = mu_grid.values;
            opt.base.eta = rates::eta_from_db(db_grid.values.front());
            opt.base.mu_a = opt.base.mu_b = mu_grid.values.front();
        } else {
            opt.axis = rates::SweepAxis::eta_db;
            opt.values = db_grid.values;
            opt.base.mu_a = opt.base.mu_b = mu_grid.values.front();
            opt.base.eta = rates::eta_from_db(db_grid.values.front());
        }
        try {
            opt.base.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("attack-sweep: ") + e.what());
        }
        config.options = opt;
    } else {
        config.command = Command::verify;
        const SectionMap* sec = section("verify");
        VerifyOptions opt;
        std::optional<double> mu_both;
        if (v_mu->count() > 0) mu_both = ver_mu;
        else if (const FileValue* v = find(sec, "mu")) mu_both = to_double(*v);
        if (mu_both) opt.params.mu_a = opt.params.mu_b = *mu_both;
        if (v_mu_a->count() > 0) opt.params.mu_a = ver_mu_a;
        else if (const FileValue* v = find(sec, "mu_a")) opt.params.mu_a = to_double(*v);
        if (v_mu_b->count() > 0) opt.params.mu_b = ver_mu_b;
        else if (const FileValue* v = find(sec, "mu_b")) opt.params.mu_b = to_double(*v);
        if (v_d->count() > 0) opt.params.d = ver_d;
        else if (const FileValue* v = find(sec, "d")) opt.params.d = to_int(*v);
        if (v_cutoff->count() > 0) opt.params.cutoff = ver_cutoff;
        else if (const FileValue* v = find(sec, "cutoff")) opt.params.cutoff = to_int(*v);
        if (v_eta->count() > 0) opt.eta = ver_eta;
        else if (const FileValue* v = find(sec, "eta")) opt.eta = to_double(*v);
        try {
            opt.params.validate();
            if (!(opt.eta > 0.0) || opt.eta > 1.0)
                throw std::domain_error("eta must lie in (0, 1]");
        } catch (const std::exception& e) {
            throw ConfigError(std::string("verify: ") + e.what());
        }
        config.options = opt;
    }
    return config;
}

}  // namespace pmqkd::cli
