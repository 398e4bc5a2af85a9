#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "otfsma/allocation.hpp"
#include "otfsma/baselines.hpp"
#include "otfsma/channel_model.hpp"
#include "otfsma/detectors.hpp"

namespace otfsma {

enum class Waveform { OtfsMa, Ofdma, ScFdma };

std::string to_string(Waveform w);
/// Accepts otfs / otfsma / otfs-ma, ofdma, scfdma / sc-fdma.
Waveform waveform_from_string(const std::string& s);

/**
 * One simulated curve. See README for the JSON schema; every field except
 * grid, K_u and the channel has a default.
 */
struct ExperimentConfig {
    static constexpr int kVersion = 1;

    std::string name;
    GridSpec grid;
    Waveform waveform = Waveform::OtfsMa;
    Scheme scheme = Scheme::DelayAxis;
    int K_u = 1;
    int g1 = 0;  ///< interleaving factors; 0 picks g1 = 2 (or K_u when odd), g2 = K_u/g1
    int g2 = 0;
    std::string alphabet = "bpsk";

    std::vector<double> delays_us;  ///< tap delays in microseconds
    double pdp_decay_us = 0.0;      ///< 0 = largest tap delay
    double nu_max_hz = 0.0;

    DetectorKind detector = DetectorKind::ML;
    int max_search_bits = 20;
    int mp_n_max = 30;
    double mp_delta = 0.7;
    double mp_epsilon = 1e-3;
    double support_threshold = 1e-3;  ///< relative column threshold for MP supports

    int cp_len = -1;  ///< -1 = largest tap delay index
    SubcarrierMapping mapping = SubcarrierMapping::Localized;

    std::vector<double> snr_db;
    std::vector<double> pilot_snr_db;
    int alpha_max = -1;  ///< -1 = largest tap delay index
    double estimate_threshold = 0.0;
    int mse_trials = 1000;
    bool chain_ber = false;  ///< also run BER with the estimated channel at each pilot SNR

    long min_frames = 10;
    long max_frames = 1000;
    long target_errors = 100;
    int batch_frames = 16;
    std::uint64_t seed = 1;

    ChannelProfile profile() const;
    Alphabet make_alphabet() const;
    /// Resolved interleaving factors (g1, g2).
    std::pair<int, int> interleaving() const;
    int resolved_cp_len() const;
    int resolved_alpha_max() const;
    MpConfig mp_config(double noise_var) const;

    /// Every violated constraint, one message each; empty when valid.
    std::vector<std::string> violations() const;
    /// Throws ConfigError listing all violations.
    void validate() const;

    std::string to_json() const;
    /// FNV-1a hash of the canonical JSON, as 16 hex digits.
    std::string hash() const;

    /// Parses JSON text; structural errors (types, unknown enum names) are all collected.
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig load(const std::string& path);
};

}  // namespace otfsma
