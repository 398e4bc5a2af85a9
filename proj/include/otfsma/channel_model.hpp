#pragma once

#include <span>
#include <vector>

#include "otfsma/grid.hpp"
#include "otfsma/rng.hpp"

namespace otfsma {

/**
 * One propagation path on the grid.
 *
 * Delay tau = alpha / (M delta_f); Doppler nu = (beta + b) / (N T) with
 * b in (-1/2, 1/2] the fractional part.
 */
struct ChannelTap {
    cplx gain{0.0, 0.0};
    int alpha = 0;
    int beta = 0;
    double b = 0.0;
};

struct UserChannel {
    int user_id = 0;
    std::vector<ChannelTap> taps;
};

/// Tap delays, exponential PDP and Jakes Doppler parameters.
struct ChannelProfile {
    std::vector<double> delays_s;
    double pdp_decay_s = 0.0;  ///< tau_P in exp(-tau/tau_P); 0 selects the largest tap delay
    double nu_max_hz = 0.0;

    int P() const { return static_cast<int>(delays_s.size()); }

    /// Normalized tap powers, summing to one.
    std::vector<double> tap_powers() const;

    /// Delay indices after rounding to the nearest grid point.
    std::vector<int> delay_indices(const GridSpec& grid) const;

    int max_delay_index(const GridSpec& grid) const;

    /// Throws ConfigError if the profile does not fit the grid.
    void validate(const GridSpec& grid) const;

    /// Profile whose taps sit exactly on the given delay indices.
    static ChannelProfile from_delay_indices(const GridSpec& grid, std::span<const int> indices,
                                             double nu_max_hz, double pdp_decay_s = 0.0);
};

/// Splits a Doppler shift in grid units (nu*N*T) into beta + b with b in (-1/2, 1/2].
void decompose_doppler(double nu_grid_units, int& beta, double& b);

double tap_delay_s(const ChannelTap& tap, const GridSpec& grid);
double tap_doppler_hz(const ChannelTap& tap, const GridSpec& grid);

/// exp(-j2pi tau nu) for one tap.
cplx tap_phase(const ChannelTap& tap, const GridSpec& grid);

/**
 * Draws one user's channel: CN(0, p_i) gains from the exponential PDP,
 * Jakes Doppler nu_i = nu_max cos(theta_i) with theta_i ~ U[-pi, pi], and
 * delays rounded to the nearest delay bin.
 */
UserChannel draw_channel(const ChannelProfile& profile, const GridSpec& grid, Rng& rng,
                         int user_id = 0);

/**
 * Fractional-Doppler spreading coefficient
 *
 *   (e^{-j2pi(-q-b)} - 1) / (N e^{-j(2pi/N)(-q-b)} - N)
 *
 * Integer Doppler (|b| < 1e-12) takes the analytic branch: 1 at q = 0, else 0.
 */
cplx dirichlet_coeff(int qp, double b, int N);

/// Sparse MN x MN matrix of one user's delay-Doppler input-output relation.
SparseCMatrix build_user_matrix(const UserChannel& channel, const GridSpec& grid);

/// One matrix per user; y = sum_u H_u x_u.
std::vector<SparseCMatrix> build_system_matrix(std::span<const UserChannel> channels,
                                               const GridSpec& grid);

/// Literal triple-sum evaluation of the input-output relation, summed over users.
DDFrame apply_channel_direct(std::span<const UserChannel> channels, const GridSpec& grid,
                             std::span<const DDFrame> frames);

/**
 * Sampled delay-Doppler kernel h~[q, l] (N x M), scaled so that
 *   y[k, l'] = 1/(MN) sum_{k_in, l_in} x[k_in, l_in] h~[(k - k_in)_N, (l' - l_in)_M].
 */
CMatrix sampled_kernel(const UserChannel& channel, const GridSpec& grid);

/**
 * Reduced (MN/K_u) x (MN/K_u) matrix of user u under interleaved allocation.
 * Flat index k' + (N/g2) l' on the reduced grid.
 */
CMatrix build_scheme3_matrix(const UserChannel& channel, const GridSpec& grid, int g1, int g2,
                             int user);

}  // namespace otfsma
