#pragma once

#include "otfsma/grid.hpp"

namespace otfsma {

/**
 * ISFFT: delay-Doppler -> time-frequency.
 *
 *   X[n,m] = 1/sqrt(MN) sum_k sum_l x[k,l] exp(j2pi(nk/N - ml/M))
 *
 * Computed as an inverse DFT down the Doppler axis followed by a forward DFT
 * along the delay axis. Unitary.
 */
TFFrame isfft(const DDFrame& frame);

/**
 * SFFT: time-frequency -> delay-Doppler, the inverse of isfft.
 *
 *   y[k,l] = 1/sqrt(MN) sum_n sum_m Y[n,m] exp(-j2pi(nk/N - ml/M))
 */
DDFrame sfft(const TFFrame& frame);

/// Time-frequency block owned by one user under interleaved allocation.
struct TfRegion {
    int n0 = 0;      ///< first time index
    int n_len = 0;   ///< N / g2
    int m0 = 0;      ///< first subcarrier
    int m_len = 0;   ///< M / g1
};

/// Checks K_u = g1*g2 with g1 | M and g2 | N; throws ConfigError naming the failure.
void check_interleaving(const GridSpec& grid, int g1, int g2);

/// User u's region: time [(N/g2)(u mod g2), +N/g2), frequency [(M/g1)floor(u/g2), +M/g1).
TfRegion tf_region(const GridSpec& grid, int user, int g1, int g2);

/// Grid of the reduced (N/g2) x (M/g1) delay-Doppler plane of one user.
GridSpec reduced_grid(const GridSpec& grid, int g1, int g2);

/**
 * SFFT over a single user's TF region only:
 *
 *   y_u[k',l'] = 1/sqrt(MN) sum_{n<N/g2} sum_{m<M/g1} Y[n0+n, m0+m]
 *                exp(-j2pi(nk'/(N/g2) - ml'/(M/g1)))
 *
 * The normalization stays 1/sqrt(MN) of the full grid.
 */
DDFrame restricted_sfft(const TFFrame& frame, int user, int g1, int g2);

}  // namespace otfsma
