#include "nocp/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <system_error>

#include "nocp/analysis.hpp"
#include "nocp/validation.hpp"

namespace nocp::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        s.remove_prefix(comma + 1);
    }
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view expected, std::string_view got) {
    throw ConfigError(std::string(key) + ": expected " + std::string(expected) + ", got '" + std::string(got) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view text, std::string_view expected) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        bad_value(key, expected, text);
    }
    return v;
}

std::size_t parse_size(std::string_view key, std::string_view text) {
    return parse_number<std::size_t>(key, text, "a nonnegative integer");
}

double parse_real(std::string_view key, std::string_view text) {
    return parse_number<double>(key, text, "a real number");
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") {
        return true;
    }
    if (text == "false" || text == "0") {
        return false;
    }
    bad_value(key, "true or false", text);
}

std::optional<std::size_t> parse_optional_size(std::string_view key, std::string_view text) {
    if (text == "auto") {
        return std::nullopt;
    }
    return parse_size(key, text);
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view key, std::string_view text, Parse parse) {
    std::vector<T> out;
    for (auto item : split_list(text)) {
        out.push_back(parse(key, item));
    }
    return out;
}

std::string format_real(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

template <typename T, typename Format>
std::string join(const std::vector<T>& items, Format format) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        out += format(items[i]);
    }
    return out;
}

std::string optional_text(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "auto"; }

std::pair<std::string, std::string> split_assignment(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(std::string(trim(text)) + ": expected key = value");
    }
    return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

}  // namespace

void apply_setting(SimConfig& cfg, std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    if (value.empty() && key != "pdp_file") {
        bad_value(key, "a value", value);
    }
    if (key == "N") {
        cfg.N = parse_size(key, value);
    } else if (key == "L") {
        cfg.L = parse_size(key, value);
    } else if (key == "alpha") {
        cfg.alpha = parse_real(key, value);
    } else if (key == "K") {
        cfg.K = parse_size(key, value);
    } else if (key == "Q") {
        cfg.Q = parse_size(key, value);
    } else if (key == "M_list" || key == "M") {
        cfg.M_list = parse_list<std::size_t>(key, value, parse_size);
    } else if (key == "snr_db_list" || key == "snr_db") {
        cfg.snr_db_list = parse_list<double>(key, value, parse_real);
    } else if (key == "trials") {
        cfg.trials = parse_size(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, value, "a 64-bit unsigned integer");
    } else if (key == "receivers" || key == "receiver") {
        cfg.receivers = parse_list<Receiver>(key, value, [](std::string_view k, std::string_view item) {
            try {
                return parse_receiver(item);
            } catch (const std::exception&) {
                bad_value(k, "one of mrc, zf, tr-mrc, tr-zf, cp-zf", item);
            }
        });
    } else if (key == "constellation") {
        try {
            cfg.constellation = parse_constellation(value);
        } catch (const std::exception&) {
            bad_value(key, "qpsk or qam16", value);
        }
    } else if (key == "cp_len") {
        cfg.cp_len = parse_optional_size(key, value);
    } else if (key == "interior_only") {
        cfg.interior_only = parse_bool(key, value);
    } else if (key == "tx_power") {
        cfg.tx_power = parse_real(key, value);
    } else if (key == "min_errors") {
        cfg.min_errors = parse_size(key, value);
    } else if (key == "tr_delay") {
        cfg.tr_delay = parse_optional_size(key, value);
    } else if (key == "pdp_file") {
        cfg.pdp_file = std::string(value);
    } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
}

SimConfig parse_config(std::istream& in, const std::vector<std::string>& overrides) {
    SimConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        const std::string_view body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto [key, value] = split_assignment(body);
        apply_setting(cfg, key, value);
    }
    for (const auto& o : overrides) {
        const auto [key, value] = split_assignment(o);
        apply_setting(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides) {
    if (!path) {
        std::istringstream empty;
        return parse_config(empty, overrides);
    }
    std::ifstream in(*path);
    if (!in) {
        throw ConfigError("config: cannot open " + path->string());
    }
    return parse_config(in, overrides);
}

std::string dump_config(const SimConfig& cfg) {
    std::ostringstream out;
    out << "N = " << cfg.N << '\n'
        << "L = " << cfg.L << '\n'
        << "alpha = " << format_real(cfg.alpha) << '\n'
        << "K = " << cfg.K << '\n'
        << "Q = " << cfg.Q << '\n'
        << "M_list = " << join(cfg.M_list, [](std::size_t m) { return std::to_string(m); }) << '\n'
        << "snr_db_list = " << join(cfg.snr_db_list, format_real) << '\n'
        << "trials = " << cfg.trials << '\n'
        << "seed = " << cfg.seed << '\n'
        << "receivers = " << join(cfg.receivers, [](Receiver r) { return std::string(to_string(r)); }) << '\n'
        << "constellation = " << to_string(cfg.constellation) << '\n'
        << "cp_len = " << optional_text(cfg.cp_len) << '\n'
        << "interior_only = " << (cfg.interior_only ? "true" : "false") << '\n'
        << "tx_power = " << format_real(cfg.tx_power) << '\n'
        << "min_errors = " << cfg.min_errors << '\n'
        << "tr_delay = " << optional_text(cfg.tr_delay) << '\n'
        << "pdp_file = " << cfg.pdp_file << '\n';
    return out.str();
}

void write_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        try {
            writer(out);
            out.flush();
            if (!out) {
                throw std::runtime_error("write failed for " + tmp.string());
            }
        } catch (...) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw;
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

struct SweepArgs {
    std::optional<std::filesystem::path> config;
    std::vector<std::string> overrides;
    std::string receivers;
    std::string antennas;
    std::string users;
    std::string snr;
    std::string trials;
    std::string seed;
    unsigned threads = 0;
    std::string output;
};

void add_sweep_options(CLI::App* sub, SweepArgs& a) {
    sub->add_option("--config", a.config, "flat key = value config file");
    sub->add_option("--set", a.overrides, "override, key=value (repeatable)");
    sub->add_option("--receivers", a.receivers, "comma list of mrc, zf, tr-mrc, tr-zf, cp-zf");
    sub->add_option("--M", a.antennas, "comma list of antenna counts");
    sub->add_option("--K", a.users, "number of users");
    sub->add_option("--snr", a.snr, "comma list of SNRs in dB");
    sub->add_option("--trials", a.trials, "trials per point (BER: cap)");
    sub->add_option("--seed", a.seed, "64-bit seed");
    sub->add_option("--threads", a.threads, "worker threads (0 = SIM_THREADS or all cores)");
    sub->add_option("-o,--output", a.output, "CSV path (default: stdout)");
}

SimConfig sweep_config(const SweepArgs& a) {
    std::vector<std::string> overrides = a.overrides;
    auto push = [&](const char* key, const std::string& value) {
        if (!value.empty()) {
            overrides.push_back(std::string(key) + "=" + value);
        }
    };
    push("receivers", a.receivers);
    push("M_list", a.antennas);
    push("K", a.users);
    push("snr_db_list", a.snr);
    push("trials", a.trials);
    push("seed", a.seed);
    return load_config(a.config, overrides);
}

int run_sweep(const SweepArgs& a, bool ber, std::ostream& out, std::ostream& err) {
    const SimConfig cfg = sweep_config(a);
    SweepOptions options;
    options.threads = a.threads;
    options.log = &err;
    const SweepResult result = ber ? sweep_ber(cfg, options) : sweep_sinr(cfg, options);
    if (a.output.empty()) {
        write_csv(result, out);
    } else {
        write_file_atomically(a.output, [&](std::ostream& o) { write_csv(result, o); });
    }
    const double failures = result.max_failure_fraction();
    if (failures > 0.5) {
        err << "error: singular systems in " << failures * 100.0 << "% of trials at the worst point\n";
        return kExitTooManyFailures;
    }
    return kExitOk;
}

struct SirArgs {
    std::size_t L = 15;
    double alpha = 0.1;
    std::size_t N = 256;
    std::string pdp_file;
    std::string output;
    bool table = false;
};

int run_analyze(const SirArgs& a, std::ostream& out, std::ostream& err) {
    PowerDelayProfile pdp = [&] {
        if (a.pdp_file.empty()) {
            try {
                return exp_pdp(a.L, a.alpha);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("pdp: ") + e.what());
            }
        }
        try {
            return load_pdp_file(a.pdp_file, err);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("pdp_file: ") + e.what());
        }
    }();
    if (pdp.length() > a.N || a.N < 2) {
        throw ConfigError("N: must be at least 2 and no shorter than the channel");
    }
    const SirTerms terms = asymptotic_sir(pdp, a.N);
    const double tau = avg_delay_spread(pdp);
    out << "tau_bar = " << format_real(tau) << '\n'
        << "P_s = " << format_real(terms.p_signal) << '\n'
        << "sum P_ICI = " << format_real(terms.total_ici()) << '\n'
        << "sum P_ISI = " << format_real(terms.total_isi()) << '\n'
        << "SIR = " << format_real(terms.sir_db) << " dB\n";
    auto table = [&](std::ostream& o) {
        o << "d,p_ici,p_isi\n";
        for (std::size_t d = 0; d < a.N; ++d) {
            o << d << ',' << (d == 0 ? std::string() : format_real(terms.p_ici[d - 1])) << ','
              << format_real(terms.p_isi[d]) << '\n';
        }
    };
    if (a.table) {
        table(out);
    }
    if (!a.output.empty()) {
        write_file_atomically(a.output, [&](std::ostream& o) {
            o << "# tau_bar=" << format_real(tau) << '\n'
              << "# p_s=" << format_real(terms.p_signal) << '\n'
              << "# sir_db=" << format_real(terms.sir_db) << '\n';
            table(o);
        });
    }
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Uplink massive MIMO OFDM without cyclic prefix: receivers, SIR analysis and sweeps"};
    app.require_subcommand(1);

    SirArgs sir;
    auto* analyze = app.add_subcommand("analyze-sir", "closed-form large-M SIR of conventional MRC");
    analyze->add_option("--L", sir.L, "channel taps");
    analyze->add_option("--alpha", sir.alpha, "exponential PDP decay");
    analyze->add_option("--N", sir.N, "subcarriers");
    analyze->add_option("--pdp-file", sir.pdp_file, "PDP file (one tap power per line)");
    analyze->add_option("-o,--output", sir.output, "per-distance CSV (d,p_ici,p_isi)");
    analyze->add_flag("--table", sir.table, "print the per-distance table");

    SweepArgs sinr_args;
    auto* sinr = app.add_subcommand("sweep-sinr", "mean SINR per (receiver, M, SNR)");
    add_sweep_options(sinr, sinr_args);

    SweepArgs ber_args;
    auto* ber = app.add_subcommand("sweep-ber", "uncoded BER per (receiver, M, SNR)");
    add_sweep_options(ber, ber_args);

    ValidationOptions vopt;
    auto* validate = app.add_subcommand("validate", "run the oracle-equivalence self-test");
    validate->add_option("--seed", vopt.seed, "seed for the random shapes");
    validate->add_option("--cases", vopt.cases, "random cases per check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadConfig;
    }

    try {
        if (*analyze) {
            return run_analyze(sir, out, err);
        }
        if (*sinr) {
            return run_sweep(sinr_args, false, out, err);
        }
        if (*ber) {
            return run_sweep(ber_args, true, out, err);
        }
        const auto results = run_validation_suite(vopt);
        print_results(results, out);
        const bool ok = std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
        return ok ? kExitOk : kExitFailure;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace nocp::cli
