#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "otfsma/config.hpp"

namespace otfsma {

/// One point of a BER or NMSE curve.
struct ResultRecord {
    static constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

    std::string curve;  ///< label shared by all points of one curve
    std::string waveform;
    std::string scheme;  ///< "1".."3" for OTFS-MA, empty for the baselines
    int K_u = 0;
    int N = 0;
    int M = 0;
    double snr_db = kNone;
    double pilot_snr_db = kNone;  ///< NaN: perfect CSI / not an estimation run

    long frames = 0;
    long bit_errors = 0;
    long total_bits = 0;
    double ber = kNone;
    double ber_std_error = kNone;
    std::vector<long> user_bit_errors;
    std::vector<long> user_bits;
    std::vector<double> per_user_ber;

    double nmse = kNone;
    double nmse_half_width = kNone;  ///< 95% confidence half-width

    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string failure;  ///< non-empty when the point could not be simulated

    bool ok() const { return failure.empty(); }
};

struct RunOptions {
    int threads = 0;  ///< 0: OTFSMA_THREADS, else hardware concurrency
    /// Called after each finished point.
    std::function<void(const ResultRecord&)> progress;
};

/// Worker count: explicit request, else OTFSMA_THREADS, else hardware concurrency.
int resolve_threads(int requested);

/// Bit error rate per SNR point until target_errors or max_frames (never below min_frames).
std::vector<ResultRecord> run_ber_sweep(const ExperimentConfig& cfg, const RunOptions& opts = {});

/**
 * NMSE per pilot SNR over cfg.mse_trials channel draws. With cfg.chain_ber
 * the BER sweep is also run with perfect CSI and with the estimate at each
 * pilot SNR.
 */
std::vector<ResultRecord> run_mse_sweep(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// The same channel configuration with OTFS-MA, OFDMA and SC-FDMA.
std::vector<ResultRecord> run_compare(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// SNR at which a curve crosses target_ber, by linear interpolation of log10(BER); NaN if it never does.
double snr_at_ber(const std::vector<ResultRecord>& curve, double target_ber);

/// Records whose curve label equals `label`, in order.
std::vector<ResultRecord> select_curve(const std::vector<ResultRecord>& records, const std::string& label);

/// Fixed-schema CSV: waveform,scheme,K_u,N,M,snr_db,pilot_snr_db,frames,bit_errors,ber,nmse,seed,config_hash
void write_csv(std::ostream& os, const std::vector<ResultRecord>& records);

/// Plot-ready long format: figure,curve,x_name,x,y_name,y,frames,y_err
void write_long_csv(std::ostream& os, const std::vector<ResultRecord>& records, const std::string& figure);

// ---------------------------------------------------------------------------
// Canned figure configurations

enum class Scale { Smoke, Desk, Full };

Scale scale_from_string(const std::string& s);

struct FigureSpec {
    std::string name;
    std::string kind;  ///< "ber" or "mse"
    std::vector<ExperimentConfig> curves;
};

std::vector<std::string> figure_names();
FigureSpec figure_spec(const std::string& name, Scale scale);
std::vector<ResultRecord> run_figure(const FigureSpec& fig, const RunOptions& opts = {});

}  // namespace otfsma
