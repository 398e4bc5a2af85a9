#pragma once

#include <span>
#include <vector>

#include "otfsma/allocation.hpp"
#include "otfsma/channel_model.hpp"
#include "otfsma/rng.hpp"

namespace otfsma {

/// Impulse pilot per user, placed so the readout windows never overlap.
struct PilotPlan {
    GridSpec grid;
    Scheme scheme = Scheme::DelayAxis;
    int K_u = 1;
    int alpha_max = 0;
    std::vector<int> k_p;  ///< Doppler coordinate per user
    std::vector<int> l_p;  ///< delay coordinate per user

    int users() const { return K_u; }
};

/**
 * Pilot for user u on row 0 of its allocation:
 *   delay axis:   (0, u M/K_u), requires M/K_u > alpha_max;
 *   Doppler axis: (u N/K_u, u (alpha_max + 1)), requires M >= K_u (alpha_max + 1).
 * Throws ConfigError naming the violated inequality.
 */
PilotPlan place_pilots(Scheme scheme, const GridSpec& grid, int K_u, int alpha_max);

/// One frame per user: a unit impulse at its pilot position, zeros elsewhere.
std::vector<DDFrame> pilot_frames(const PilotPlan& plan);

/// Raw sampled-kernel estimate h~[q, alpha], N x (alpha_max + 1).
struct ChannelEstimate {
    CMatrix kernel;
    double pilot_snr_db = 0.0;
};

/// Noise-free received pilot frame: all users transmit their pilots at once.
DDFrame pilot_response(const PilotPlan& plan, std::span<const UserChannel> channels);

/// Received pilot frame with CN(0, noise_var) added per bin.
DDFrame received_pilots(const PilotPlan& plan, std::span<const UserChannel> channels, double noise_var,
                        Rng& rng);

/**
 * Reads each user's kernel from its window:
 *   h~_est[(k' - k_p)_N, l' - l_p] = MN y[k', l'],  l' in [l_p, l_p + alpha_max].
 * Entries below magnitude_threshold (if > 0) are zeroed.
 */
std::vector<ChannelEstimate> estimate(const DDFrame& received, const PilotPlan& plan,
                                      double pilot_snr_db = 0.0, double magnitude_threshold = 0.0);

/// True kernel restricted to the estimation window, N x (alpha_max + 1).
CMatrix true_kernel(const UserChannel& channel, const GridSpec& grid, int alpha_max);

/// MN x MN matrix H[(k,l),(k_in,l_in)] = h~[(k - k_in)_N, (l - l_in)_M] / MN.
SparseCMatrix rebuild_user_matrix(const ChannelEstimate& est, const GridSpec& grid);

std::vector<SparseCMatrix> rebuild_model(std::span<const ChannelEstimate> estimates, const GridSpec& grid);

/// Sum |est - truth|^2 / sum |truth|^2. Throws InvalidInput on zero-energy truth or shape mismatch.
double nmse(const CMatrix& estimate, const CMatrix& truth);

/// Per-user NMSE averaged over users.
double nmse(std::span<const ChannelEstimate> estimates, std::span<const UserChannel> channels,
            const GridSpec& grid, int alpha_max);

}  // namespace otfsma
