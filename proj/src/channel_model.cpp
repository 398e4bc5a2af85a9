#include "otfsma/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "otfsma/dd_transforms.hpp"

namespace otfsma {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kIntegerDopplerTol = 1e-12;

cplx expj(double phase) { return {std::cos(phase), std::sin(phase)}; }

// tau * nu in units where the grid normalization cancels: alpha (beta + b) / (MN).
double tau_nu(const ChannelTap& tap, const GridSpec& grid) {
    return tap.alpha * (tap.beta + tap.b) / static_cast<double>(grid.size());
}

}  // namespace

std::vector<double> ChannelProfile::tap_powers() const {
    std::vector<double> p(delays_s.size(), 0.0);
    if (p.empty()) return p;
    double tau_p = pdp_decay_s;
    if (tau_p <= 0.0) tau_p = *std::max_element(delays_s.begin(), delays_s.end());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = tau_p > 0.0 ? std::exp(-delays_s[i] / tau_p) : 1.0;
        total += p[i];
    }
    for (auto& v : p) v /= total;
    return p;
}

std::vector<int> ChannelProfile::delay_indices(const GridSpec& grid) const {
    std::vector<int> idx;
    idx.reserve(delays_s.size());
    for (double d : delays_s) idx.push_back(static_cast<int>(std::lround(d * grid.M * grid.delta_f)));
    return idx;
}

int ChannelProfile::max_delay_index(const GridSpec& grid) const {
    const auto idx = delay_indices(grid);
    return idx.empty() ? 0 : *std::max_element(idx.begin(), idx.end());
}

void ChannelProfile::validate(const GridSpec& grid) const {
    if (delays_s.empty()) throw ConfigError("channel: profile needs at least one tap");
    if (delays_s.front() != 0.0) throw ConfigError("channel: first tap delay must be 0");
    for (std::size_t i = 1; i < delays_s.size(); ++i) {
        if (delays_s[i] < delays_s[i - 1]) throw ConfigError("channel: tap delays must be nondecreasing");
    }
    if (nu_max_hz < 0.0) throw ConfigError("channel: nu_max must be nonnegative");
    if (nu_max_hz >= grid.delta_f) {
        throw ConfigError("channel: nu_max (" + std::to_string(nu_max_hz) +
                          " Hz) must be below delta_f (" + std::to_string(grid.delta_f) + " Hz)");
    }
    if (pdp_decay_s < 0.0) throw ConfigError("channel: pdp_decay must be nonnegative");
    const int amax = max_delay_index(grid);
    if (amax > grid.M - 1) {
        throw ConfigError("channel: largest delay index " + std::to_string(amax) +
                          " exceeds grid span M-1=" + std::to_string(grid.M - 1));
    }
}

ChannelProfile ChannelProfile::from_delay_indices(const GridSpec& grid, std::span<const int> indices,
                                                  double nu_max_hz, double pdp_decay_s) {
    ChannelProfile p;
    for (int i : indices) p.delays_s.push_back(i * grid.delay_resolution());
    p.nu_max_hz = nu_max_hz;
    p.pdp_decay_s = pdp_decay_s;
    return p;
}

void decompose_doppler(double nu_grid_units, int& beta, double& b) {
    beta = static_cast<int>(std::lround(nu_grid_units));
    b = nu_grid_units - beta;
    if (b <= -0.5) {
        b += 1.0;
        beta -= 1;
    }
}

double tap_delay_s(const ChannelTap& tap, const GridSpec& grid) {
    return tap.alpha * grid.delay_resolution();
}

double tap_doppler_hz(const ChannelTap& tap, const GridSpec& grid) {
    return (tap.beta + tap.b) * grid.doppler_resolution();
}

cplx tap_phase(const ChannelTap& tap, const GridSpec& grid) {
    return expj(-kTwoPi * tau_nu(tap, grid));
}

UserChannel draw_channel(const ChannelProfile& profile, const GridSpec& grid, Rng& rng, int user_id) {
    profile.validate(grid);
    const auto powers = profile.tap_powers();
    const auto alphas = profile.delay_indices(grid);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

    UserChannel ch;
    ch.user_id = user_id;
    ch.taps.reserve(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i) {
        ChannelTap tap;
        tap.gain = complex_gaussian(rng, powers[i]);
        tap.alpha = alphas[i];
        const double nu = profile.nu_max_hz * std::cos(angle(rng));
        decompose_doppler(nu * grid.N * grid.T, tap.beta, tap.b);
        ch.taps.push_back(tap);
    }
    return ch;
}

cplx dirichlet_coeff(int qp, double b, int N) {
    if (std::abs(b) < kIntegerDopplerTol) return positive_mod(qp, N) == 0 ? cplx{1.0} : cplx{0.0};
    // e^{j2pi q} = 1 for integer q, so the numerator only depends on b.
    const cplx num = expj(kTwoPi * b) - 1.0;
    const cplx den = static_cast<double>(N) * (expj(kTwoPi * (qp + b) / N) - 1.0);
    if (std::abs(den) < 1e-12) return {1.0, 0.0};
    return num / den;
}

SparseCMatrix build_user_matrix(const UserChannel& channel, const GridSpec& grid) {
    const int N = grid.N;
    const int M = grid.M;
    std::vector<Eigen::Triplet<cplx>> triplets;
    triplets.reserve(static_cast<std::size_t>(grid.size()) * channel.taps.size() * N);

    for (const auto& tap : channel.taps) {
        if (tap.alpha < 0 || tap.alpha >= M) throw InvalidInput("build_system_matrix: delay index off grid");
        const cplx scale = tap.gain * tap_phase(tap, grid);
        std::vector<cplx> coeff(N);
        for (int q = 0; q < N; ++q) coeff[q] = dirichlet_coeff(q, tap.b, N) * scale;

        for (int l = 0; l < M; ++l) {
            const int l_in = positive_mod(l - tap.alpha, M);
            for (int k = 0; k < N; ++k) {
                const int row = grid.flat(k, l);
                for (int q = 0; q < N; ++q) {
                    if (coeff[q] == cplx{0.0}) continue;
                    const int k_in = positive_mod(k - tap.beta + q, N);
                    triplets.emplace_back(row, grid.flat(k_in, l_in), coeff[q]);
                }
            }
        }
    }
    SparseCMatrix H(grid.size(), grid.size());
    H.setFromTriplets(triplets.begin(), triplets.end());
    return H;
}

std::vector<SparseCMatrix> build_system_matrix(std::span<const UserChannel> channels, const GridSpec& grid) {
    std::vector<SparseCMatrix> out;
    out.reserve(channels.size());
    for (const auto& ch : channels) out.push_back(build_user_matrix(ch, grid));
    return out;
}

DDFrame apply_channel_direct(std::span<const UserChannel> channels, const GridSpec& grid,
                             std::span<const DDFrame> frames) {
    if (channels.size() != frames.size()) {
        throw InvalidInput("apply_channel_direct: need one frame per user");
    }
    const int N = grid.N;
    const int M = grid.M;
    DDFrame out(grid);
    for (std::size_t u = 0; u < channels.size(); ++u) {
        const CMatrix& x = frames[u].symbols;
        if (x.rows() != N || x.cols() != M) throw InvalidInput("apply_channel_direct: frame shape mismatch");
        for (const auto& tap : channels[u].taps) {
            const cplx scale = tap.gain * std::exp(cplx(0.0, -kTwoPi * tap_delay_s(tap, grid) *
                                                                 tap_doppler_hz(tap, grid)));
            for (int k = 0; k < N; ++k) {
                for (int l = 0; l < M; ++l) {
                    cplx acc{0.0, 0.0};
                    for (int q = 0; q < N; ++q) {
                        acc += dirichlet_coeff(q, tap.b, N) *
                               x(positive_mod(k - tap.beta + q, N), positive_mod(l - tap.alpha, M));
                    }
                    out.symbols(k, l) += scale * acc;
                }
            }
        }
    }
    return out;
}

CMatrix sampled_kernel(const UserChannel& channel, const GridSpec& grid) {
    const int N = grid.N;
    CMatrix h = CMatrix::Zero(N, grid.M);
    for (const auto& tap : channel.taps) {
        const cplx scale = static_cast<double>(grid.size()) * tap.gain * tap_phase(tap, grid);
        for (int q = 0; q < N; ++q) {
            // input bin k - beta + q lands on output k: Doppler offset beta - q
            h(positive_mod(tap.beta - q, N), tap.alpha) += scale * dirichlet_coeff(q, tap.b, N);
        }
    }
    return h;
}

CMatrix build_scheme3_matrix(const UserChannel& channel, const GridSpec& grid, int g1, int g2, int user) {
    check_interleaving(grid, g1, g2);
    if (user < 0 || user >= g1 * g2) throw ConfigError("scheme 3: user index outside [0, g1*g2)");
    const int N = grid.N;
    const int M = grid.M;
    const int Nr = N / g2;
    const int Mr = M / g1;

    CMatrix hhat = CMatrix::Zero(Nr, Mr);
    for (const auto& tap : channel.taps) {
        const double tau_over_T = static_cast<double>(tap.alpha) / M;  // tau * delta_f
        const double nu_over_df = (tap.beta + tap.b) / N;             // nu * T
        const double nu_tau = tau_nu(tap, grid);
        const cplx phase = expj(-kTwoPi * (nu_tau + tau_over_T * Mr * (user / g2) -
                                           nu_over_df * Nr * (user % g2)));

        std::vector<cplx> F(Mr), G(Nr);
        for (int s = 0; s < Mr; ++s) {
            cplx acc{0.0, 0.0};
            const double f = static_cast<double>(user % g1) / M - static_cast<double>(s) / Mr + tau_over_T;
            for (int m = 0; m < Mr; ++m) acc += expj(-kTwoPi * m * f);
            F[s] = acc / static_cast<double>(M);
        }
        for (int r = 0; r < Nr; ++r) {
            cplx acc{0.0, 0.0};
            const double f = static_cast<double>(user / g1) / N - static_cast<double>(r) / Nr + nu_over_df;
            for (int n = 0; n < Nr; ++n) acc += expj(kTwoPi * n * f);
            G[r] = acc / static_cast<double>(N);
        }
        for (int r = 0; r < Nr; ++r) {
            for (int s = 0; s < Mr; ++s) hhat(r, s) += tap.gain * phase * F[s] * G[r];
        }
    }

    const int D = Nr * Mr;
    CMatrix H(D, D);
    for (int lo = 0; lo < Mr; ++lo) {
        for (int ko = 0; ko < Nr; ++ko) {
            for (int q = 0; q < Mr; ++q) {
                for (int p = 0; p < Nr; ++p) {
                    H(ko + Nr * lo, p + Nr * q) = hhat(positive_mod(ko - p, Nr), positive_mod(lo - q, Mr));
                }
            }
        }
    }
    return H;
}

}  // namespace otfsma
