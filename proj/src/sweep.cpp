#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "nocp/montecarlo.hpp"

namespace nocp {

const char* const kSnrDefinition =
    "per-antenna input SNR = 1/noise_var; unit-energy symbols; unitary IDFT; normalized PDP; unit transmit "
    "power per user";

const char* const kCsvColumns = "receiver,M,K,N,L,alpha,snr_db,trials,failed_trials,metric_name,metric_value,stderr";

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
}

// Runs fn(trial) for trial in [begin, end) on up to `threads` workers and
// returns the results in trial order. The first exception is rethrown after
// all workers stop.
template <typename Result, typename Fn>
std::vector<Result> run_trials(std::size_t begin, std::size_t end, unsigned threads, Fn fn) {
    const std::size_t count = end - begin;
    std::vector<Result> results(count);
    if (count == 0) {
        return results;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = fn(begin + i);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = count;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    const unsigned env = threads_from_environment();
    if (env != 0) {
        return env;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

Rng trial_rng(std::uint64_t seed, std::size_t M, std::size_t trial) {
    return Rng(seed).derive(M).derive(trial);
}

struct MeanStat {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    [[nodiscard]] double mean() const { return n == 0 ? std::nan("") : sum / static_cast<double>(n); }
    [[nodiscard]] double standard_error() const {
        if (n < 2) {
            return std::nan("");
        }
        const double nd = static_cast<double>(n);
        const double var = std::max(0.0, (sum_sq - sum * sum / nd) / (nd - 1.0));
        return std::sqrt(var / nd);
    }
};

SweepRow base_row(const SimConfig& cfg, Receiver receiver, std::size_t M, double snr_db) {
    SweepRow row;
    row.receiver = receiver;
    row.M = M;
    row.K = cfg.K;
    row.N = cfg.N;
    row.L = cfg.L;
    row.alpha = cfg.alpha;
    row.snr_db = snr_db;
    return row;
}

void log_row(const SweepOptions& options, const SweepRow& row) {
    if (options.log == nullptr) {
        return;
    }
    *options.log << "point receiver=" << to_string(row.receiver) << " M=" << row.M << " snr_db=" << row.snr_db
                 << " trials=" << row.trials << " failed=" << row.failed_trials << " " << row.metric_name << "="
                 << row.metric_value << " stderr=" << row.std_error << '\n';
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& column) {
    if (s == "nan") {
        return std::nan("");
    }
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("csv: bad number '" + s + "' in column " + column);
    }
    return v;
}

std::size_t parse_count(const std::string& s, const std::string& column) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("csv: bad integer '" + s + "' in column " + column);
    }
    return v;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

}  // namespace

void SimConfig::validate() const {
    if (N < 2) {
        config_error("N", "must be at least 2");
    }
    if (L < 1) {
        config_error("L", "must be at least 1");
    }
    if (L > N) {
        config_error("L", "channel longer than symbol (L > N)");
    }
    if (!std::isfinite(alpha) || alpha < 0.0) {
        config_error("alpha", "must be finite and nonnegative");
    }
    if (K < 1) {
        config_error("K", "must be at least 1");
    }
    if (Q < 1) {
        config_error("Q", "must be at least 1");
    }
    if (interior_only && Q < 3) {
        config_error("Q", "interior_only needs at least 3 symbols per frame");
    }
    if (M_list.empty()) {
        config_error("M_list", "must not be empty");
    }
    if (snr_db_list.empty()) {
        config_error("snr_db_list", "must not be empty");
    }
    for (double s : snr_db_list) {
        if (!std::isfinite(s)) {
            config_error("snr_db_list", "entries must be finite");
        }
    }
    if (trials < 1) {
        config_error("trials", "must be at least 1");
    }
    if (receivers.empty()) {
        config_error("receivers", "must not be empty");
    }
    for (Receiver r : receivers) {
        for (std::size_t m : M_list) {
            if (m < 1) {
                config_error("M_list", "entries must be at least 1");
            }
            if ((r == Receiver::zf || r == Receiver::tr_zf || r == Receiver::cp_zf) && m < K) {
                config_error("M_list", "M >= K required for " + std::string(to_string(r)));
            }
        }
        if (r == Receiver::cp_zf) {
            const std::size_t cp = cp_len.value_or(L - 1);
            if (cp + 1 < L) {
                config_error("cp_len", "must be at least L - 1 for cp-zf");
            }
            if (cp >= N) {
                config_error("cp_len", "must be below N");
            }
        }
    }
    if (!std::isfinite(tx_power) || tx_power < 0.0) {
        config_error("tx_power", "must be finite and nonnegative");
    }
    if (tr_delay && *tr_delay > 2 * (L - 1)) {
        config_error("tr_delay", "must lie in 0 .. 2(L - 1)");
    }
    if (tr_delay && 2 * L - 1 - *tr_delay > N) {
        config_error("tr_delay", "time-reversal response does not fit one symbol");
    }
    if (!pdp_file.empty()) {
        (void)pdp();
    }
}

PowerDelayProfile SimConfig::pdp() const {
    if (pdp_file.empty()) {
        return exp_pdp(L, alpha);
    }
    PowerDelayProfile profile = [&] {
        try {
            return load_pdp_file(pdp_file, std::cerr);
        } catch (const std::exception& e) {
            config_error("pdp_file", e.what());
        }
    }();
    if (profile.length() != L) {
        config_error("pdp_file", "has " + std::to_string(profile.length()) + " taps but L = " + std::to_string(L));
    }
    return profile;
}

FrameConfig SimConfig::frame(Receiver receiver) const {
    FrameConfig f;
    f.subcarriers = N;
    f.symbols = Q;
    f.cp_len = needs_cyclic_prefix(receiver) ? cp_len.value_or(L - 1) : 0;
    return f;
}

double noise_variance_for_snr(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

void SweepResult::sort() {
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.receiver != b.receiver) {
            return a.receiver < b.receiver;
        }
        if (a.M != b.M) {
            return a.M < b.M;
        }
        return a.snr_db < b.snr_db;
    });
}

double SweepResult::max_failure_fraction() const {
    double worst = 0.0;
    for (const auto& r : rows) {
        if (r.trials > 0) {
            worst = std::max(worst, static_cast<double>(r.failed_trials) / static_cast<double>(r.trials));
        }
    }
    return worst;
}

const SweepRow* SweepResult::find(Receiver receiver, std::size_t M, double snr_db) const {
    for (const auto& r : rows) {
        if (r.receiver == receiver && r.M == M && std::abs(r.snr_db - snr_db) < 1e-9) {
            return &r;
        }
    }
    return nullptr;
}

void write_csv(const SweepResult& result, std::ostream& out) {
    out << "# snr_definition=" << result.snr_definition << '\n';
    out << "# seed=" << result.seed << '\n';
    out << kCsvColumns << '\n';
    for (const auto& r : result.rows) {
        out << to_string(r.receiver) << ',' << r.M << ',' << r.K << ',' << r.N << ',' << r.L << ','
            << format_double(r.alpha) << ',' << format_double(r.snr_db) << ',' << r.trials << ','
            << r.failed_trials << ',' << r.metric_name << ',' << format_double(r.metric_value) << ','
            << format_double(r.std_error) << '\n';
    }
}

SweepResult read_csv(std::istream& in) {
    SweepResult result;
    std::string line;
    std::map<std::string, std::size_t> column;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                continue;
            }
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = line.substr(eq + 1);
            if (key == "seed") {
                result.seed = std::stoull(value);
            } else if (key == "snr_definition") {
                result.snr_definition = value;
            }
            continue;
        }
        const auto cells = split_commas(line);
        if (column.empty()) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                column[cells[i]] = i;
            }
            for (const auto& name : split_commas(kCsvColumns)) {
                if (!column.contains(name)) {
                    throw std::runtime_error("csv: missing column " + name);
                }
            }
            continue;
        }
        if (cells.size() != column.size()) {
            throw std::runtime_error("csv: malformed line '" + line + "'");
        }
        auto cell = [&](const char* name) -> const std::string& { return cells[column.at(name)]; };
        SweepRow row;
        row.receiver = parse_receiver(cell("receiver"));
        row.M = parse_count(cell("M"), "M");
        row.K = parse_count(cell("K"), "K");
        row.N = parse_count(cell("N"), "N");
        row.L = parse_count(cell("L"), "L");
        row.alpha = parse_double(cell("alpha"), "alpha");
        row.snr_db = parse_double(cell("snr_db"), "snr_db");
        row.trials = parse_count(cell("trials"), "trials");
        row.failed_trials = parse_count(cell("failed_trials"), "failed_trials");
        row.metric_name = cell("metric_name");
        row.metric_value = parse_double(cell("metric_value"), "metric_value");
        row.std_error = parse_double(cell("stderr"), "stderr");
        result.rows.push_back(std::move(row));
    }
    if (column.empty()) {
        throw std::runtime_error("csv: missing header line");
    }
    return result;
}

unsigned threads_from_environment() {
    const char* env = std::getenv("SIM_THREADS");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    unsigned v = 0;
    const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    return res.ec == std::errc{} ? v : 0;
}

SweepResult sweep_sinr(const SimConfig& cfg, const SweepOptions& options) {
    cfg.validate();
    const PowerDelayProfile pdp = cfg.pdp();
    const unsigned threads = resolve_threads(options.threads);
    const std::size_t nrx = cfg.receivers.size();
    const std::size_t nsnr = cfg.snr_db_list.size();
    std::vector<double> noise_var(nsnr);
    std::transform(cfg.snr_db_list.begin(), cfg.snr_db_list.end(), noise_var.begin(), noise_variance_for_snr);

    // Per trial: linear SINR per (receiver, snr), NaN when the receiver failed.
    using TrialSinr = std::vector<double>;

    SweepResult result;
    result.seed = cfg.seed;
    for (std::size_t M : cfg.M_list) {
        const auto per_trial = run_trials<TrialSinr>(0, cfg.trials, threads, [&](std::size_t trial) {
            Rng rng = trial_rng(cfg.seed, M, trial);
            const ChannelSet channels = sample_channels(pdp, cfg.K, M, rng);
            TrialSinr out(nrx * nsnr, std::nan(""));
            for (std::size_t r = 0; r < nrx; ++r) {
                const Receiver rx = cfg.receivers[r];
                try {
                    const ResponsePowers powers =
                        response_powers(rx, channels, cfg.frame(rx), cfg.effective_tr_delay(), cfg.tx_power);
                    for (std::size_t s = 0; s < nsnr; ++s) {
                        out[r * nsnr + s] = summarize(powers, noise_var[s], cfg.Q, cfg.interior_only).sinr_linear;
                    }
                } catch (const SingularSystemError&) {
                }
            }
            return out;
        });
        for (std::size_t r = 0; r < nrx; ++r) {
            for (std::size_t s = 0; s < nsnr; ++s) {
                MeanStat stat;
                for (const auto& t : per_trial) {
                    if (!std::isnan(t[r * nsnr + s])) {
                        stat.add(t[r * nsnr + s]);
                    }
                }
                SweepRow row = base_row(cfg, cfg.receivers[r], M, cfg.snr_db_list[s]);
                row.trials = cfg.trials;
                row.failed_trials = cfg.trials - stat.n;
                row.metric_name = "sinr_db";
                const double mean = stat.mean();
                row.metric_value = 10.0 * std::log10(mean);
                row.std_error = 10.0 / std::log(10.0) * stat.standard_error() / mean;
                log_row(options, row);
                result.rows.push_back(std::move(row));
            }
        }
    }
    result.sort();
    return result;
}

namespace {

constexpr std::size_t kBerBatch = 4;

struct BerTrial {
    std::vector<std::size_t> errors;  // (receiver, snr)
    std::vector<bool> failed;         // per receiver
    std::size_t bits = 0;             // counted bits per (receiver, snr)
};

std::vector<std::uint8_t> random_bits(std::size_t count, Rng& rng) {
    std::vector<std::uint8_t> bits(count);
    for (std::size_t i = 0; i < count; i += 64) {
        std::uint64_t word = rng.next_u64();
        for (std::size_t b = i; b < std::min(count, i + 64); ++b) {
            bits[b] = static_cast<std::uint8_t>(word & 1U);
            word >>= 1;
        }
    }
    return bits;
}

}  // namespace

SweepResult sweep_ber(const SimConfig& cfg, const SweepOptions& options) {
    cfg.validate();
    const PowerDelayProfile pdp = cfg.pdp();
    const unsigned threads = resolve_threads(options.threads);
    const std::size_t nrx = cfg.receivers.size();
    const std::size_t nsnr = cfg.snr_db_list.size();
    const std::size_t bps = bits_per_symbol(cfg.constellation);
    const std::size_t first_symbol = cfg.interior_only ? 1 : 0;
    const std::size_t last_symbol = cfg.interior_only ? cfg.Q - 1 : cfg.Q;  // exclusive
    const double amplitude = std::sqrt(cfg.tx_power);

    auto run_one = [&](std::size_t M, std::size_t trial) {
        Rng rng = trial_rng(cfg.seed, M, trial);
        const ChannelSet channels = sample_channels(pdp, cfg.K, M, rng);
        std::vector<std::vector<std::uint8_t>> bits(cfg.K);
        std::vector<DataGrid> grids;
        grids.reserve(cfg.K);
        for (std::size_t k = 0; k < cfg.K; ++k) {
            bits[k] = random_bits(cfg.Q * cfg.N * bps, rng);
            const ComplexVector symbols = qam_map(bits[k], cfg.constellation);
            DataGrid grid(cfg.Q, cfg.N);
            std::copy(symbols.begin(), symbols.end(), grid.row(0).data());
            grids.push_back(std::move(grid));
        }

        BerTrial out;
        out.errors.assign(nrx * nsnr, 0);
        out.failed.assign(nrx, false);
        out.bits = cfg.K * (last_symbol - first_symbol) * cfg.N * bps;

        // Received signal and a unit-variance noise realization per frame layout.
        std::map<std::size_t, std::pair<std::vector<ComplexVector>, std::vector<ComplexVector>>> layouts;
        for (Receiver rx : cfg.receivers) {
            const FrameConfig frame = cfg.frame(rx);
            if (layouts.contains(frame.cp_len)) {
                continue;
            }
            std::vector<ComplexVector> tx;
            tx.reserve(cfg.K);
            for (const auto& g : grids) {
                ComplexVector x = modulate(g, frame);
                for (auto& v : x) {
                    v *= amplitude;
                }
                tx.push_back(std::move(x));
            }
            Rng silent(0);
            auto clean = apply_uplink(channels, tx, 0.0, silent);
            Rng noise_rng = rng.derive(1 + frame.cp_len);
            std::vector<ComplexVector> noise;
            noise.reserve(M);
            for (std::size_t m = 0; m < M; ++m) {
                noise.push_back(awgn(clean[m].size(), 1.0, noise_rng));
            }
            layouts.emplace(frame.cp_len, std::make_pair(std::move(clean), std::move(noise)));
        }

        ComplexVector est(cfg.N);
        for (std::size_t r = 0; r < nrx; ++r) {
            const Receiver rx = cfg.receivers[r];
            const FrameConfig frame = cfg.frame(rx);
            const auto& [clean, noise] = layouts.at(frame.cp_len);
            std::vector<DataGrid> clean_est;
            std::vector<DataGrid> noise_est;
            try {
                clean_est = detect_frame(rx, clean, channels, frame, cfg.tr_delay);
                noise_est = detect_frame(rx, noise, channels, frame, cfg.tr_delay);
            } catch (const SingularSystemError&) {
                out.failed[r] = true;
                continue;
            }
            for (std::size_t s = 0; s < nsnr; ++s) {
                const double sigma = std::sqrt(noise_variance_for_snr(cfg.snr_db_list[s]));
                std::size_t errors = 0;
                for (std::size_t k = 0; k < cfg.K; ++k) {
                    for (std::size_t i = first_symbol; i < last_symbol; ++i) {
                        const auto c = clean_est[k].row(i);
                        const auto n = noise_est[k].row(i);
                        for (std::size_t p = 0; p < cfg.N; ++p) {
                            est[p] = c[p] + sigma * n[p];
                            if (amplitude > 0.0) {
                                est[p] /= amplitude;
                            }
                        }
                        const auto decided = qam_demap(est, cfg.constellation);
                        const std::uint8_t* sent = bits[k].data() + i * cfg.N * bps;
                        for (std::size_t b = 0; b < decided.size(); ++b) {
                            errors += decided[b] != sent[b] ? 1U : 0U;
                        }
                    }
                }
                out.errors[r * nsnr + s] = errors;
            }
        }
        return out;
    };

    SweepResult result;
    result.seed = cfg.seed;
    for (std::size_t M : cfg.M_list) {
        std::vector<BerTrial> trials;
        std::vector<std::size_t> total_errors(nrx * nsnr, 0);
        while (trials.size() < cfg.trials) {
            const std::size_t begin = trials.size();
            const std::size_t end = std::min(cfg.trials, begin + kBerBatch);
            auto batch = run_trials<BerTrial>(begin, end, threads, [&](std::size_t t) { return run_one(M, t); });
            for (auto& t : batch) {
                for (std::size_t i = 0; i < total_errors.size(); ++i) {
                    total_errors[i] += t.errors[i];
                }
                trials.push_back(std::move(t));
            }
            const bool enough = std::all_of(total_errors.begin(), total_errors.end(),
                                            [&](std::size_t e) { return e >= cfg.min_errors; });
            if (enough) {
                break;
            }
        }
        for (std::size_t r = 0; r < nrx; ++r) {
            for (std::size_t s = 0; s < nsnr; ++s) {
                MeanStat stat;
                std::size_t errors = 0;
                std::size_t bits = 0;
                for (const auto& t : trials) {
                    if (t.failed[r]) {
                        continue;
                    }
                    stat.add(static_cast<double>(t.errors[r * nsnr + s]) / static_cast<double>(t.bits));
                    errors += t.errors[r * nsnr + s];
                    bits += t.bits;
                }
                SweepRow row = base_row(cfg, cfg.receivers[r], M, cfg.snr_db_list[s]);
                row.trials = trials.size();
                row.failed_trials = trials.size() - stat.n;
                row.metric_name = errors >= cfg.min_errors ? "ber" : "ber_capped";
                row.metric_value = bits == 0 ? std::nan("") : static_cast<double>(errors) / static_cast<double>(bits);
                row.std_error = stat.standard_error();
                log_row(options, row);
                result.rows.push_back(std::move(row));
            }
        }
    }
    result.sort();
    return result;
}

}  // namespace nocp
