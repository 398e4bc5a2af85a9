#pragma once

#include <span>
#include <string>
#include <vector>

#include "otfsma/channel_model.hpp"
#include "otfsma/rng.hpp"
#include "otfsma/system_model.hpp"

namespace otfsma {

enum class Precoding { None, Dft };  ///< OFDMA, SC-FDMA
enum class SubcarrierMapping { Localized, Interleaved };

/**
 * Uplink CP-OFDM frame: N symbols of M subcarriers at sampling rate M*delta_f,
 * each user on M/K_u subcarriers.
 */
struct McFrameSpec {
    GridSpec grid;
    int K_u = 1;
    int cp_len = 0;
    Precoding precoding = Precoding::None;
    SubcarrierMapping mapping = SubcarrierMapping::Localized;

    int block() const { return grid.M / K_u; }
    int symbol_len() const { return grid.M + cp_len; }
    int frame_len() const { return grid.N * symbol_len(); }
    int payload_len() const { return grid.N * block(); }
    /// Subcarriers of user u, in payload order.
    std::vector<int> subcarriers(int user) const;

    /// Throws ConfigError if K_u does not divide M or the CP is negative.
    void validate() const;
    /// Additionally requires cp_len >= every tap delay index.
    void validate_for(std::span<const UserChannel> channels) const;
};

std::string waveform_name(Precoding p);

/**
 * Per-user transmit streams. Payload u holds N*M/K_u symbols, symbol-major:
 * payload[n * block + j] rides subcarrier subcarriers(u)[j] of OFDM symbol n.
 * Transforms are unitary, so unit-energy symbols give unit useful-sample energy
 * summed over users.
 */
std::vector<CVector> mc_modulate(const McFrameSpec& spec, std::span<const CVector> payloads);

/**
 * Sample-level doubly dispersive channel:
 *   y[n] = sum_u sum_i h_{u,i} x_u[n - alpha] e^{j2pi nu (n - alpha)/(M delta_f)} + CN(0, noise_var).
 * Delays are linear (not circular). Pass rng == nullptr for a noiseless channel.
 */
CVector mc_apply_channel(const McFrameSpec& spec, std::span<const CVector> streams,
                         std::span<const UserChannel> channels, double noise_var, Rng* rng);

/// CP removal, unitary DFT, de-mapping (and de-spreading for SC-FDMA); per-user payload estimates.
std::vector<CVector> mc_demodulate(const McFrameSpec& spec, const CVector& received);

/// Rows and columns ordered as the stacked payloads (user-major).
CVector stack_payloads(std::span<const CVector> payloads);

/**
 * Effective matrix from stacked payloads to stacked demodulated outputs,
 * built by probing the noiseless chain with unit payloads. Supports keep
 * entries at or above support_threshold times the column maximum.
 */
SystemModel mc_effective_model(const McFrameSpec& spec, std::span<const UserChannel> channels,
                               double support_threshold = 1e-3);

}  // namespace otfsma
