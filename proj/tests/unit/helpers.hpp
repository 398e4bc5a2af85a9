#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "otfsma/channel_model.hpp"
#include "otfsma/grid.hpp"
#include "otfsma/rng.hpp"

namespace testutil {

using namespace otfsma;

inline CMatrix random_matrix(Rng& rng, int rows, int cols) {
    const CVector v = complex_gaussian_vector(rng, static_cast<Eigen::Index>(rows) * cols, 1.0);
    return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

inline DDFrame random_frame(const GridSpec& g, Rng& rng) { return DDFrame(g, random_matrix(rng, g.N, g.M)); }

// Random taps anywhere on the grid; fractional Doppler unless integer_doppler.
inline UserChannel random_channel(const GridSpec& g, Rng& rng, int taps, bool integer_doppler = false,
                                  int max_alpha = -1) {
    std::uniform_int_distribution<int> alpha(0, max_alpha < 0 ? g.M - 1 : max_alpha);
    std::uniform_int_distribution<int> beta(-g.N / 2, g.N / 2);
    std::uniform_real_distribution<double> frac(-0.49, 0.5);
    UserChannel ch;
    for (int i = 0; i < taps; ++i) {
        ChannelTap t;
        t.gain = complex_gaussian(rng, 1.0 / taps);
        t.alpha = alpha(rng);
        t.beta = beta(rng);
        t.b = integer_doppler ? 0.0 : frac(rng);
        ch.taps.push_back(t);
    }
    return ch;
}

inline double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Plain O((MN)^2) double-sum ISFFT straight from the definition.
inline CMatrix isfft_reference(const CMatrix& x) {
    const int N = static_cast<int>(x.rows());
    const int M = static_cast<int>(x.cols());
    CMatrix X = CMatrix::Zero(N, M);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < N; ++k)
                for (int l = 0; l < M; ++l) {
                    const double ph = 2.0 * std::numbers::pi * (double(n) * k / N - double(m) * l / M);
                    X(n, m) += x(k, l) * std::polar(1.0, ph);
                }
    return X / std::sqrt(double(N) * M);
}

// Time-frequency channel: X[n,m] multiplied by sum_i h_i e^{-j2pi tau nu} e^{j2pi nu n T} e^{-j2pi m df tau}.
inline CMatrix tf_channel_reference(const UserChannel& ch, const GridSpec& g, const CMatrix& X) {
    CMatrix Y = CMatrix::Zero(g.N, g.M);
    for (const auto& tap : ch.taps) {
        const double tau = tap.alpha / (g.M * g.delta_f);
        const double nu = (tap.beta + tap.b) / (g.N * g.T);
        for (int n = 0; n < g.N; ++n)
            for (int m = 0; m < g.M; ++m) {
                const double ph = 2.0 * std::numbers::pi * (-tau * nu + nu * n * g.T - m * g.delta_f * tau);
                Y(n, m) += tap.gain * std::polar(1.0, ph) * X(n, m);
            }
    }
    return Y;
}

}  // namespace testutil
