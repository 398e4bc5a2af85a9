#include "otfsma/estimation.hpp"

#include <string>

namespace otfsma {

PilotPlan place_pilots(Scheme scheme, const GridSpec& grid, int K_u, int alpha_max) {
    grid.validate();
    if (K_u < 1) throw ConfigError("pilots: K_u must be >= 1");
    if (alpha_max < 0 || alpha_max >= grid.M) throw ConfigError("pilots: alpha_max must be in [0, M)");

    PilotPlan plan;
    plan.grid = grid;
    plan.scheme = scheme;
    plan.K_u = K_u;
    plan.alpha_max = alpha_max;
    plan.k_p.resize(K_u);
    plan.l_p.resize(K_u);

    switch (scheme) {
        case Scheme::DelayAxis: {
            if (grid.M % K_u != 0) {
                throw ConfigError("pilots: K_u=" + std::to_string(K_u) + " does not divide M=" + std::to_string(grid.M));
            }
            const int width = grid.M / K_u;
            if (width <= alpha_max) {
                throw ConfigError("pilots (delay axis): need M/K_u > alpha_max, got M/K_u=" + std::to_string(width) +
                                  ", alpha_max=" + std::to_string(alpha_max));
            }
            for (int u = 0; u < K_u; ++u) {
                plan.k_p[u] = 0;
                plan.l_p[u] = u * width;
            }
            break;
        }
        case Scheme::DopplerAxis: {
            if (grid.N % K_u != 0) {
                throw ConfigError("pilots: K_u=" + std::to_string(K_u) + " does not divide N=" + std::to_string(grid.N));
            }
            if (grid.M < K_u * (alpha_max + 1)) {
                throw ConfigError("pilots (Doppler axis): need M >= K_u*(alpha_max+1), got M=" +
                                  std::to_string(grid.M) + ", K_u*(alpha_max+1)=" +
                                  std::to_string(K_u * (alpha_max + 1)));
            }
            for (int u = 0; u < K_u; ++u) {
                plan.k_p[u] = u * (grid.N / K_u);
                plan.l_p[u] = u * (alpha_max + 1);
            }
            break;
        }
        case Scheme::Interleaved:
            throw ConfigError("pilots: channel estimation supports the delay- and Doppler-axis schemes only");
    }
    return plan;
}

std::vector<DDFrame> pilot_frames(const PilotPlan& plan) {
    std::vector<DDFrame> frames;
    frames.reserve(plan.K_u);
    for (int u = 0; u < plan.K_u; ++u) {
        DDFrame f(plan.grid);
        f.symbols(plan.k_p[u], plan.l_p[u]) = 1.0;
        frames.push_back(std::move(f));
    }
    return frames;
}

DDFrame pilot_response(const PilotPlan& plan, std::span<const UserChannel> channels) {
    if (static_cast<int>(channels.size()) != plan.K_u) throw InvalidInput("pilots: need one channel per user");
    const auto frames = pilot_frames(plan);
    CVector y = CVector::Zero(plan.grid.size());
    for (int u = 0; u < plan.K_u; ++u) y += build_user_matrix(channels[u], plan.grid) * frames[u].vectorized();
    return DDFrame::from_vector(plan.grid, y);
}

DDFrame received_pilots(const PilotPlan& plan, std::span<const UserChannel> channels, double noise_var,
                        Rng& rng) {
    DDFrame y = pilot_response(plan, channels);
    if (noise_var > 0.0) {
        const CVector v = complex_gaussian_vector(rng, plan.grid.size(), noise_var);
        y.symbols += Eigen::Map<const CMatrix>(v.data(), plan.grid.N, plan.grid.M);
    }
    return y;
}

std::vector<ChannelEstimate> estimate(const DDFrame& received, const PilotPlan& plan, double pilot_snr_db,
                                      double magnitude_threshold) {
    const GridSpec& g = plan.grid;
    if (!(received.grid == g)) throw InvalidInput("estimate: received frame grid does not match the pilot plan");
    const double mn = g.size();
    std::vector<ChannelEstimate> out(plan.K_u);
    for (int u = 0; u < plan.K_u; ++u) {
        CMatrix h = CMatrix::Zero(g.N, plan.alpha_max + 1);
        for (int a = 0; a <= plan.alpha_max; ++a) {
            const int l = positive_mod(plan.l_p[u] + a, g.M);
            for (int k = 0; k < g.N; ++k) {
                cplx v = mn * received.symbols(k, l);
                if (magnitude_threshold > 0.0 && std::abs(v) < magnitude_threshold) v = 0.0;
                h(positive_mod(k - plan.k_p[u], g.N), a) = v;
            }
        }
        out[u] = ChannelEstimate{std::move(h), pilot_snr_db};
    }
    return out;
}

CMatrix true_kernel(const UserChannel& channel, const GridSpec& grid, int alpha_max) {
    return sampled_kernel(channel, grid).leftCols(alpha_max + 1);
}

SparseCMatrix rebuild_user_matrix(const ChannelEstimate& est, const GridSpec& grid) {
    const int N = grid.N;
    const int M = grid.M;
    if (est.kernel.rows() != N || est.kernel.cols() > M) throw InvalidInput("rebuild: kernel shape does not fit the grid");
    const double inv_mn = 1.0 / grid.size();
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int a = 0; a < est.kernel.cols(); ++a) {
        for (int q = 0; q < N; ++q) {
            const cplx v = est.kernel(q, a);
            if (v == cplx{0.0, 0.0}) continue;
            for (int l_in = 0; l_in < M; ++l_in) {
                const int l = (l_in + a) % M;
                for (int k_in = 0; k_in < N; ++k_in) {
                    trips.emplace_back(grid.flat((k_in + q) % N, l), grid.flat(k_in, l_in), inv_mn * v);
                }
            }
        }
    }
    SparseCMatrix H(grid.size(), grid.size());
    H.setFromTriplets(trips.begin(), trips.end());
    return H;
}

std::vector<SparseCMatrix> rebuild_model(std::span<const ChannelEstimate> estimates, const GridSpec& grid) {
    std::vector<SparseCMatrix> out;
    out.reserve(estimates.size());
    for (const auto& e : estimates) out.push_back(rebuild_user_matrix(e, grid));
    return out;
}

double nmse(const CMatrix& estimate, const CMatrix& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw InvalidInput("nmse: estimate and truth have different shapes");
    }
    const double energy = truth.squaredNorm();
    if (energy == 0.0) throw InvalidInput("nmse: true channel has zero energy");
    return (estimate - truth).squaredNorm() / energy;
}

double nmse(std::span<const ChannelEstimate> estimates, std::span<const UserChannel> channels,
            const GridSpec& grid, int alpha_max) {
    if (estimates.size() != channels.size() || estimates.empty()) throw InvalidInput("nmse: one estimate per user");
    double sum = 0.0;
    for (std::size_t u = 0; u < estimates.size(); ++u) {
        sum += nmse(estimates[u].kernel, true_kernel(channels[u], grid, alpha_max));
    }
    return sum / static_cast<double>(estimates.size());
}

}  // namespace otfsma
