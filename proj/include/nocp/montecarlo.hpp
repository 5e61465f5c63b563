// Monte Carlo experiment harness: exact per-subcarrier power decomposition
// of every receiver's output, SINR-vs-M sweeps and BER-vs-SNR sweeps.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nocp/channel.hpp"
#include "nocp/equalizers.hpp"
#include "nocp/ofdm.hpp"
#include "nocp/qam.hpp"

namespace nocp {

/// Raised for invalid simulation configurations; the message names the key.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SimConfig {
    std::size_t N = 256;
    std::size_t L = 15;
    double alpha = 0.1;
    std::size_t K = 10;
    std::size_t Q = 10;
    std::vector<std::size_t> M_list{64, 128, 256, 512};
    std::vector<double> snr_db_list{10.0};
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::vector<Receiver> receivers{Receiver::tr_zf};
    Constellation constellation = Constellation::qam16;
    std::optional<std::size_t> cp_len;    // cp-zf only; unset = L - 1
    bool interior_only = true;
    double tx_power = 1.0;                // per-user transmit power; SNR is defined for 1.0
    std::size_t min_errors = 100;         // BER sweeps stop once every point has this many
    std::optional<std::size_t> tr_delay;  // TR window delay; unset = L - 1
    std::string pdp_file;                 // empty = exponential PDP from (L, alpha)

    /// Throws ConfigError naming the offending key.
    void validate() const;

    /// Exponential PDP, or the file's PDP when pdp_file is set.
    [[nodiscard]] PowerDelayProfile pdp() const;
    [[nodiscard]] FrameConfig frame(Receiver receiver) const;
    [[nodiscard]] std::size_t effective_tr_delay() const { return tr_delay.value_or(L - 1); }
};

/// Noise variance for a per-antenna input SNR in dB: unit-energy symbols,
/// unitary IDFT and a normalized PDP give unit received power per user.
double noise_variance_for_snr(double snr_db);

/// Text recorded in CSV headers.
extern const char* const kSnrDefinition;

/// Expected output powers of one receiver output (user k, subcarrier p) for
/// an interior symbol, conditioned on the channel realization, with i.i.d.
/// unit-variance data. ISI/MUI are split by the neighbouring symbol they come
/// from so frame-edge symbols can drop the missing neighbour.
struct SubcarrierPowers {
    double signal = 0.0;
    double ici = 0.0;
    double isi_prev = 0.0;
    double isi_next = 0.0;
    double mui_prev = 0.0;
    double mui_cur = 0.0;
    double mui_next = 0.0;
    double noise_gain = 0.0;       // output noise power per unit input noise variance
    double total_reference = 0.0;  // data-driven output power via the autocorrelation route

    [[nodiscard]] double component_sum() const {
        return signal + ici + isi_prev + isi_next + mui_prev + mui_cur + mui_next;
    }
};

class ResponsePowers {
public:
    ResponsePowers(std::size_t users, std::size_t subcarriers);

    [[nodiscard]] std::size_t users() const noexcept { return users_; }
    [[nodiscard]] std::size_t subcarriers() const noexcept { return subcarriers_; }
    [[nodiscard]] SubcarrierPowers& at(std::size_t k, std::size_t p) { return data_[k * subcarriers_ + p]; }
    [[nodiscard]] const SubcarrierPowers& at(std::size_t k, std::size_t p) const {
        return data_[k * subcarriers_ + p];
    }

    /// Max over (k, p) of |component_sum - total_reference| / total_reference.
    [[nodiscard]] double audit_error() const;

private:
    std::size_t users_;
    std::size_t subcarriers_;
    std::vector<SubcarrierPowers> data_;
};

/// Linear-response decomposition of `receiver` for the given channels.
/// Throws SingularSystemError for singular per-subcarrier systems.
ResponsePowers response_powers(Receiver receiver, const ChannelSet& channels, const FrameConfig& frame,
                               std::size_t tr_delay, double tx_power = 1.0);

struct SinrBreakdown {
    double p_signal = 0.0;
    double p_ici = 0.0;
    double p_isi = 0.0;
    double p_mui = 0.0;
    double p_noise = 0.0;
    double p_total = 0.0;  // reference route, including noise
    double sinr_linear = 0.0;
    double sir_linear = 0.0;
    double sinr_db = 0.0;
    double sir_db = 0.0;
    double audit_error = 0.0;
};

/// Averages a decomposition over users, subcarriers and the counted symbols
/// (interior symbols only, or all Q with frame-edge neighbours absent).
SinrBreakdown summarize(const ResponsePowers& powers, double noise_var, std::size_t symbols, bool interior_only);

/// response_powers + summarize for cfg's frame.
SinrBreakdown decompose(const SimConfig& cfg, Receiver receiver, const ChannelSet& channels, double noise_var);

struct SweepRow {
    Receiver receiver = Receiver::mrc;
    std::size_t M = 0;
    std::size_t K = 0;
    std::size_t N = 0;
    std::size_t L = 0;
    double alpha = 0.0;
    double snr_db = 0.0;
    std::size_t trials = 0;
    std::size_t failed_trials = 0;
    std::string metric_name;
    double metric_value = 0.0;
    double std_error = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::uint64_t seed = 0;
    std::string snr_definition = kSnrDefinition;

    /// Orders rows by (receiver, M, snr_db).
    void sort();
    [[nodiscard]] double max_failure_fraction() const;
    [[nodiscard]] const SweepRow* find(Receiver receiver, std::size_t M, double snr_db) const;
};

extern const char* const kCsvColumns;

void write_csv(const SweepResult& result, std::ostream& out);
/// Parses the CSV written by write_csv; throws std::runtime_error naming a
/// missing column or malformed line.
SweepResult read_csv(std::istream& in);

struct SweepOptions {
    unsigned threads = 0;          // 0 = hardware concurrency
    std::ostream* log = nullptr;   // one line per sweep point
};

/// Mean per-subcarrier SINR (dB) per (receiver, M, SNR), from the exact
/// decomposition of each trial's channel realization.
SweepResult sweep_sinr(const SimConfig& cfg, const SweepOptions& options = {});

/// Uncoded hard-decision BER per (receiver, M, SNR) from full signal-level
/// simulation. All receivers see the same channels, data and noise shape.
SweepResult sweep_ber(const SimConfig& cfg, const SweepOptions& options = {});

/// Number of worker threads honouring SIM_THREADS (0 or unset = auto).
unsigned threads_from_environment();

}  // namespace nocp
