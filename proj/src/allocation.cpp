#include "otfsma/allocation.hpp"

#include <algorithm>

#include "otfsma/dd_transforms.hpp"

namespace otfsma {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::DelayAxis: return "delay";
        case Scheme::DopplerAxis: return "doppler";
        case Scheme::Interleaved: return "interleaved";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "delay" || s == "1" || s == "scheme1") return Scheme::DelayAxis;
    if (s == "doppler" || s == "2" || s == "scheme2") return Scheme::DopplerAxis;
    if (s == "interleaved" || s == "3" || s == "scheme3") return Scheme::Interleaved;
    throw ConfigError("unknown allocation scheme '" + s + "'");
}

int scheme_number(Scheme s) {
    switch (s) {
        case Scheme::DelayAxis: return 1;
        case Scheme::DopplerAxis: return 2;
        case Scheme::Interleaved: return 3;
    }
    return 0;
}

AllocationPlan make_plan(Scheme scheme, const GridSpec& grid, int K_u, int g1, int g2) {
    grid.validate();
    if (K_u < 1) throw ConfigError("allocation: K_u must be >= 1");

    AllocationPlan plan;
    plan.scheme = scheme;
    plan.grid = grid;
    plan.K_u = K_u;

    const int N = grid.N;
    const int M = grid.M;
    std::vector<std::vector<int>> bins(K_u);
    switch (scheme) {
        case Scheme::DelayAxis: {
            if (M % K_u != 0) {
                throw ConfigError("scheme 1 (delay axis): K_u=" + std::to_string(K_u) +
                                  " does not divide M=" + std::to_string(M));
            }
            const int width = M / K_u;
            for (int l = 0; l < M; ++l) {
                for (int k = 0; k < N; ++k) bins[l / width].push_back(grid.flat(k, l));
            }
            break;
        }
        case Scheme::DopplerAxis: {
            if (N % K_u != 0) {
                throw ConfigError("scheme 2 (Doppler axis): K_u=" + std::to_string(K_u) +
                                  " does not divide N=" + std::to_string(N));
            }
            const int height = N / K_u;
            for (int l = 0; l < M; ++l) {
                for (int k = 0; k < N; ++k) bins[k / height].push_back(grid.flat(k, l));
            }
            break;
        }
        case Scheme::Interleaved: {
            if (g1 * g2 != K_u) {
                throw ConfigError("scheme 3 (interleaved): K_u=" + std::to_string(K_u) +
                                  " must equal g1*g2=" + std::to_string(g1 * g2));
            }
            check_interleaving(grid, g1, g2);
            plan.g1 = g1;
            plan.g2 = g2;
            // user u holds k = floor(u/g1) + g2 p, l = (u mod g1) + g1 q
            for (int l = 0; l < M; ++l) {
                for (int k = 0; k < N; ++k) {
                    const int u = (l % g1) + g1 * (k % g2);
                    bins[u].push_back(grid.flat(k, l));
                }
            }
            break;
        }
    }

    plan.bins = std::move(bins);
    plan.masks.assign(K_u, BoolMask::Constant(N, M, false));
    for (int u = 0; u < K_u; ++u) {
        for (int f : plan.bins[u]) plan.masks[u](f % N, f / N) = true;
    }
    return plan;
}

DDFrame pack(const AllocationPlan& plan, int user, std::span<const cplx> payload) {
    if (user < 0 || user >= plan.K_u) throw InvalidInput("pack: user index out of range");
    const auto& bins = plan.bins[user];
    if (payload.size() != bins.size()) {
        throw InvalidInput("pack: payload length " + std::to_string(payload.size()) + " != MN/K_u = " +
                           std::to_string(bins.size()));
    }
    DDFrame frame(plan.grid);
    for (std::size_t i = 0; i < bins.size(); ++i) frame.symbols.data()[bins[i]] = payload[i];
    return frame;
}

CVector unpack(const AllocationPlan& plan, int user, const DDFrame& frame) {
    if (user < 0 || user >= plan.K_u) throw InvalidInput("unpack: user index out of range");
    const auto& bins = plan.bins[user];
    CVector out(static_cast<Eigen::Index>(bins.size()));
    for (std::size_t i = 0; i < bins.size(); ++i) out[static_cast<Eigen::Index>(i)] = frame.symbols.data()[bins[i]];
    return out;
}

SystemModel composite_model(const AllocationPlan& plan, std::span<const SparseCMatrix> matrices,
                            double relative_threshold) {
    if (static_cast<int>(matrices.size()) != plan.K_u) {
        throw InvalidInput("composite_model: need one matrix per user");
    }
    const int MN = plan.grid.size();
    int total = 0;
    for (const auto& b : plan.bins) total += static_cast<int>(b.size());

    CMatrix H = CMatrix::Zero(MN, total);
    std::vector<int> column_user;
    column_user.reserve(total);
    int col = 0;
    for (int u = 0; u < plan.K_u; ++u) {
        const SparseCMatrix& Hu = matrices[u];
        if (Hu.rows() != MN || Hu.cols() != MN) throw InvalidInput("composite_model: matrix is not MN x MN");
        for (int bin : plan.bins[u]) {
            for (SparseCMatrix::InnerIterator it(Hu, bin); it; ++it) H(it.row(), col) = it.value();
            column_user.push_back(u);
            ++col;
        }
    }
    return SystemModel::from_dense(std::move(H), std::move(column_user), relative_threshold);
}

TFFrame scheme3_transmit(const AllocationPlan& plan, int user, std::span<const cplx> payload) {
    if (plan.scheme != Scheme::Interleaved) throw InvalidInput("scheme3_transmit: plan is not interleaved");
    const TFFrame full = isfft(pack(plan, user, payload));
    const TfRegion r = tf_region(plan.grid, user, plan.g1, plan.g2);
    TFFrame out(plan.grid);
    out.samples.block(r.n0, r.m0, r.n_len, r.m_len) = full.samples.block(0, 0, r.n_len, r.m_len);
    return out;
}

}  // namespace otfsma
