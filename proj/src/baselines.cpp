#include "otfsma/baselines.hpp"

#include <cmath>
#include <numbers>

#include "otfsma/dft.hpp"

namespace otfsma {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// One OFDM symbol (CP + M samples) carrying a user's block of symbols.
CVector modulate_symbol(const McFrameSpec& spec, const std::vector<int>& subcarriers, CVector block) {
    const int M = spec.grid.M;
    if (spec.precoding == Precoding::Dft) block = unitary_dft(block, DftSign::Forward);
    CVector freq = CVector::Zero(M);
    for (int j = 0; j < static_cast<int>(subcarriers.size()); ++j) freq[subcarriers[j]] = block[j];
    const CVector time = unitary_dft(freq, DftSign::Inverse);
    CVector sym(spec.symbol_len());
    sym.head(spec.cp_len) = time.tail(spec.cp_len);
    sym.tail(M) = time;
    return sym;
}

// Per-user blocks recovered from the M useful samples of one symbol.
std::vector<CVector> demodulate_symbol(const McFrameSpec& spec, const CVector& useful) {
    const CVector freq = unitary_dft(useful, DftSign::Forward);
    std::vector<CVector> blocks(spec.K_u);
    for (int u = 0; u < spec.K_u; ++u) {
        const auto sc = spec.subcarriers(u);
        CVector b(spec.block());
        for (int j = 0; j < spec.block(); ++j) b[j] = freq[sc[j]];
        if (spec.precoding == Precoding::Dft) b = unitary_dft(b, DftSign::Inverse);
        blocks[u] = std::move(b);
    }
    return blocks;
}

cplx doppler_rotation(const ChannelTap& tap, const GridSpec& grid, long sample) {
    const double phase = kTwoPi * tap_doppler_hz(tap, grid) * static_cast<double>(sample) /
                         (grid.M * grid.delta_f);
    return {std::cos(phase), std::sin(phase)};
}

}  // namespace

std::vector<int> McFrameSpec::subcarriers(int user) const {
    std::vector<int> sc(block());
    for (int j = 0; j < block(); ++j) {
        sc[j] = mapping == SubcarrierMapping::Localized ? user * block() + j : user + K_u * j;
    }
    return sc;
}

void McFrameSpec::validate() const {
    grid.validate();
    if (K_u < 1 || grid.M % K_u != 0) {
        throw ConfigError("multicarrier: K_u=" + std::to_string(K_u) + " does not divide M=" +
                          std::to_string(grid.M));
    }
    if (cp_len < 0 || cp_len > grid.M) throw ConfigError("multicarrier: cp_len must be in [0, M]");
}

void McFrameSpec::validate_for(std::span<const UserChannel> channels) const {
    validate();
    for (const auto& ch : channels) {
        for (const auto& tap : ch.taps) {
            if (tap.alpha > cp_len) {
                throw ConfigError("multicarrier: cp_len=" + std::to_string(cp_len) +
                                  " is shorter than tap delay index " + std::to_string(tap.alpha));
            }
        }
    }
}

std::string waveform_name(Precoding p) { return p == Precoding::None ? "ofdma" : "scfdma"; }

std::vector<CVector> mc_modulate(const McFrameSpec& spec, std::span<const CVector> payloads) {
    spec.validate();
    if (static_cast<int>(payloads.size()) != spec.K_u) throw InvalidInput("mc_modulate: need one payload per user");
    const int B = spec.block();
    const int L = spec.symbol_len();
    std::vector<CVector> streams;
    streams.reserve(payloads.size());
    for (int u = 0; u < spec.K_u; ++u) {
        if (payloads[u].size() != spec.payload_len()) {
            throw InvalidInput("mc_modulate: payload of user " + std::to_string(u) + " has length " +
                               std::to_string(payloads[u].size()) + ", expected N*M/K_u=" +
                               std::to_string(spec.payload_len()));
        }
        const auto sc = spec.subcarriers(u);
        CVector s(spec.frame_len());
        for (int n = 0; n < spec.grid.N; ++n) {
            s.segment(n * L, L) = modulate_symbol(spec, sc, payloads[u].segment(n * B, B));
        }
        streams.push_back(std::move(s));
    }
    return streams;
}

CVector mc_apply_channel(const McFrameSpec& spec, std::span<const CVector> streams,
                         std::span<const UserChannel> channels, double noise_var, Rng* rng) {
    if (streams.size() != channels.size()) throw InvalidInput("mc_apply_channel: one channel per stream");
    const int len = spec.frame_len();
    CVector y = CVector::Zero(len);
    for (std::size_t u = 0; u < streams.size(); ++u) {
        if (streams[u].size() != len) throw InvalidInput("mc_apply_channel: stream length mismatch");
        for (const auto& tap : channels[u].taps) {
            for (int n = tap.alpha; n < len; ++n) {
                y[n] += tap.gain * streams[u][n - tap.alpha] * doppler_rotation(tap, spec.grid, n - tap.alpha);
            }
        }
    }
    if (rng != nullptr && noise_var > 0.0) y += complex_gaussian_vector(*rng, len, noise_var);
    return y;
}

std::vector<CVector> mc_demodulate(const McFrameSpec& spec, const CVector& received) {
    spec.validate();
    if (received.size() != spec.frame_len()) throw InvalidInput("mc_demodulate: frame length mismatch");
    const int B = spec.block();
    const int L = spec.symbol_len();
    std::vector<CVector> out(spec.K_u, CVector(spec.payload_len()));
    for (int n = 0; n < spec.grid.N; ++n) {
        const auto blocks = demodulate_symbol(spec, received.segment(n * L + spec.cp_len, spec.grid.M));
        for (int u = 0; u < spec.K_u; ++u) out[u].segment(n * B, B) = blocks[u];
    }
    return out;
}

CVector stack_payloads(std::span<const CVector> payloads) {
    Eigen::Index total = 0;
    for (const auto& p : payloads) total += p.size();
    CVector x(total);
    Eigen::Index off = 0;
    for (const auto& p : payloads) {
        x.segment(off, p.size()) = p;
        off += p.size();
    }
    return x;
}

SystemModel mc_effective_model(const McFrameSpec& spec, std::span<const UserChannel> channels,
                               double support_threshold) {
    spec.validate_for(channels);
    if (static_cast<int>(channels.size()) != spec.K_u) throw InvalidInput("mc_effective_model: one channel per user");
    const int B = spec.block();
    const int L = spec.symbol_len();
    const int M = spec.grid.M;
    const int per_user = spec.payload_len();
    const int dim = spec.K_u * per_user;

    // A unit payload in OFDM symbol n only reaches the useful samples of symbol n
    // (the CP absorbs the delay spread), so each probe runs on one symbol window.
    CMatrix H = CMatrix::Zero(dim, dim);
    std::vector<int> column_user(dim);
    for (int u = 0; u < spec.K_u; ++u) {
        const auto sc = spec.subcarriers(u);
        for (int n = 0; n < spec.grid.N; ++n) {
            for (int j = 0; j < B; ++j) {
                CVector unit = CVector::Zero(B);
                unit[j] = 1.0;
                const CVector tx = modulate_symbol(spec, sc, unit);
                CVector useful = CVector::Zero(M);
                const long start = static_cast<long>(n) * L;
                for (const auto& tap : channels[u].taps) {
                    for (int t = spec.cp_len; t < L; ++t) {
                        const int src = t - tap.alpha;
                        useful[t - spec.cp_len] +=
                            tap.gain * tx[src] * doppler_rotation(tap, spec.grid, start + src);
                    }
                }
                const auto blocks = demodulate_symbol(spec, useful);
                const int col = u * per_user + n * B + j;
                column_user[col] = u;
                for (int v = 0; v < spec.K_u; ++v) H.col(col).segment(v * per_user + n * B, B) = blocks[v];
            }
        }
    }
    return SystemModel::from_dense(std::move(H), std::move(column_user), support_threshold);
}

}  // namespace otfsma
