#include "otfsma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <thread>

#include "otfsma/estimation.hpp"

namespace otfsma {

namespace {

// Per-frame random streams, keyed by (seed, frame, stream) only, so every SNR
// point, waveform and thread count sees the same channels, bits and unit noise.
constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kPilotStream = 3;

double noise_var_for(double snr_db) {
    if (std::isinf(snr_db)) return snr_db > 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(10.0, -snr_db / 10.0);
}

struct Setup {
    ExperimentConfig cfg;
    Alphabet alphabet;
    ChannelProfile profile;
    int g1 = 1;
    int g2 = 1;
    std::optional<AllocationPlan> plan;
    std::optional<McFrameSpec> mc;
    std::optional<PilotPlan> pilots;

    explicit Setup(const ExperimentConfig& c) : cfg(c), alphabet(c.make_alphabet()), profile(c.profile()) {
        cfg.validate();
        std::tie(g1, g2) = cfg.interleaving();
        if (cfg.waveform == Waveform::OtfsMa) {
            plan = make_plan(cfg.scheme, cfg.grid, cfg.K_u, g1, g2);
            if (!cfg.pilot_snr_db.empty()) pilots = place_pilots(cfg.scheme, cfg.grid, cfg.K_u, cfg.resolved_alpha_max());
        } else {
            McFrameSpec s;
            s.grid = cfg.grid;
            s.K_u = cfg.K_u;
            s.cp_len = cfg.resolved_cp_len();
            s.precoding = cfg.waveform == Waveform::ScFdma ? Precoding::Dft : Precoding::None;
            s.mapping = cfg.mapping;
            s.validate();
            mc = s;
        }
    }

    int per_user() const { return cfg.grid.size() / cfg.K_u; }
};

struct FrameOutcome {
    std::vector<long> user_errors;
    std::vector<long> user_bits;
    double nmse = ResultRecord::kNone;
    std::string failure;
};

std::vector<UserChannel> draw_channels(const Setup& s, std::uint64_t frame) {
    Rng rng = make_stream(s.cfg.seed, frame, kChannelStream);
    std::vector<UserChannel> ch;
    ch.reserve(s.cfg.K_u);
    for (int u = 0; u < s.cfg.K_u; ++u) ch.push_back(draw_channel(s.profile, s.cfg.grid, rng, u));
    return ch;
}

std::vector<std::vector<int>> draw_symbols(const Setup& s, std::uint64_t frame) {
    Rng rng = make_stream(s.cfg.seed, frame, kDataStream);
    std::uniform_int_distribution<int> pick(0, s.alphabet.size() - 1);
    std::vector<std::vector<int>> idx(s.cfg.K_u, std::vector<int>(s.per_user()));
    for (auto& user : idx)
        for (auto& v : user) v = pick(rng);
    return idx;
}

CVector to_symbols(const Alphabet& A, const std::vector<int>& idx) {
    CVector x(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) x[static_cast<Eigen::Index>(i)] = A.points[idx[i]];
    return x;
}

std::vector<int> detect(const Setup& s, const SystemModel& m, const CVector& y, double noise_var) {
    if (s.cfg.detector == DetectorKind::ML) {
        MlOptions o;
        o.max_search_bits = s.cfg.max_search_bits;
        return ml_detect(m, y, s.alphabet, o);
    }
    return mp_detect(m, y, s.alphabet, s.cfg.mp_config(noise_var)).decisions;
}

std::vector<ChannelEstimate> estimate_channels(const Setup& s, std::span<const UserChannel> ch,
                                               double pilot_snr_db, std::uint64_t frame) {
    Rng rng = make_stream(s.cfg.seed, frame, kPilotStream);
    const DDFrame y = received_pilots(*s.pilots, ch, noise_var_for(pilot_snr_db), rng);
    return estimate(y, *s.pilots, pilot_snr_db, s.cfg.estimate_threshold);
}

FrameOutcome simulate_frame(const Setup& s, double snr_db, double pilot_snr_db, std::uint64_t frame) {
    const int K = s.cfg.K_u;
    const int per_user = s.per_user();
    const double nv = noise_var_for(snr_db);
    const double sigma = std::sqrt(nv);

    const auto ch = draw_channels(s, frame);
    const auto sent = draw_symbols(s, frame);
    std::vector<CVector> payload;
    for (const auto& idx : sent) payload.push_back(to_symbols(s.alphabet, idx));

    std::vector<int> decided;  // user-major
    const auto& cfg = s.cfg;
    if (cfg.waveform == Waveform::OtfsMa && cfg.scheme == Scheme::Interleaved) {
        Rng noise = make_stream(cfg.seed, frame, kNoiseStream);
        const double reduced_sigma = sigma / std::sqrt(static_cast<double>(s.g1 * s.g2));
        std::vector<CMatrix> models;
        std::vector<CVector> ys;
        for (int u = 0; u < K; ++u) {
            models.push_back(build_scheme3_matrix(ch[u], cfg.grid, s.g1, s.g2, u));
            ys.push_back(models.back() * payload[u] + reduced_sigma * complex_gaussian_vector(noise, per_user, 1.0));
        }
        MlOptions o;
        o.max_search_bits = cfg.max_search_bits;
        const auto det = detect_per_user_scheme3(models, ys, s.alphabet, cfg.detector, cfg.mp_config(nv), s.g1, s.g2, o);
        for (const auto& d : det) decided.insert(decided.end(), d.begin(), d.end());
    } else if (cfg.waveform == Waveform::OtfsMa) {
        const SystemModel truth = composite_model(*s.plan, build_system_matrix(ch, cfg.grid), cfg.support_threshold);
        Rng noise = make_stream(cfg.seed, frame, kNoiseStream);
        const CVector y = truth.H * stack_payloads(payload) + sigma * complex_gaussian_vector(noise, truth.rows(), 1.0);
        if (std::isnan(pilot_snr_db)) {
            decided = detect(s, truth, y, nv);
        } else {
            const auto est = estimate_channels(s, ch, pilot_snr_db, frame);
            const SystemModel assumed = composite_model(*s.plan, rebuild_model(est, cfg.grid), cfg.support_threshold);
            decided = detect(s, assumed, y, nv);
        }
    } else {
        const McFrameSpec& spec = *s.mc;
        Rng noise = make_stream(cfg.seed, frame, kNoiseStream);
        const CVector rx = mc_apply_channel(spec, mc_modulate(spec, payload), ch, nv, &noise);
        const CVector y = stack_payloads(mc_demodulate(spec, rx));
        decided = detect(s, mc_effective_model(spec, ch, cfg.support_threshold), y, nv);
    }

    FrameOutcome out;
    out.user_errors.assign(K, 0);
    out.user_bits.assign(K, static_cast<long>(per_user) * s.alphabet.bits_per_symbol);
    for (int u = 0; u < K; ++u)
        for (int i = 0; i < per_user; ++i) out.user_errors[u] += s.alphabet.bit_errors(sent[u][i], decided[u * per_user + i]);
    return out;
}

// Runs fn(first + i) for i in [0, count) on up to `threads` workers; results in index order.
template <typename Fn>
std::vector<FrameOutcome> parallel_frames(long first, long count, int threads, Fn fn) {
    std::vector<FrameOutcome> out(static_cast<std::size_t>(count));
    auto guarded = [&](long i) {
        try {
            out[i] = fn(static_cast<std::uint64_t>(first + i));
        } catch (const std::exception& e) {
            out[i].failure = e.what();
        }
    };
    const int workers = static_cast<int>(std::min<long>(threads, count));
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) guarded(i);
        return out;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (long i = next++; i < count; i = next++) guarded(i);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

std::string curve_label(const ExperimentConfig& c, double pilot_snr_db) {
    std::string s = to_string(c.waveform);
    if (c.waveform == Waveform::OtfsMa) s += "-s" + std::to_string(scheme_number(c.scheme));
    s += "-K" + std::to_string(c.K_u);
    if (!std::isnan(pilot_snr_db)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "-pilot%gdB", pilot_snr_db);
        s += buf;
    }
    return s;
}

ResultRecord blank_record(const Setup& s, double snr_db, double pilot_snr_db) {
    ResultRecord r;
    r.curve = curve_label(s.cfg, pilot_snr_db);
    r.waveform = to_string(s.cfg.waveform);
    if (s.cfg.waveform == Waveform::OtfsMa) r.scheme = std::to_string(scheme_number(s.cfg.scheme));
    r.K_u = s.cfg.K_u;
    r.N = s.cfg.grid.N;
    r.M = s.cfg.grid.M;
    r.snr_db = snr_db;
    r.pilot_snr_db = pilot_snr_db;
    r.seed = s.cfg.seed;
    r.config_hash = s.cfg.hash();
    return r;
}

ResultRecord run_ber_point(const Setup& s, double snr_db, double pilot_snr_db, int threads) {
    const auto start = std::chrono::steady_clock::now();
    const auto& cfg = s.cfg;
    ResultRecord r = blank_record(s, snr_db, pilot_snr_db);
    r.user_bit_errors.assign(cfg.K_u, 0);
    r.user_bits.assign(cfg.K_u, 0);

    bool done = false;
    for (long first = 0; !done && first < cfg.max_frames; first += cfg.batch_frames) {
        const long count = std::min<long>(cfg.batch_frames, cfg.max_frames - first);
        const auto batch = parallel_frames(first, count, threads, [&](std::uint64_t f) {
            return simulate_frame(s, snr_db, pilot_snr_db, f);
        });
        // sequential reduction in frame order keeps the stopping point thread-independent
        for (const auto& o : batch) {
            if (!o.failure.empty()) {
                r.failure = o.failure;
                done = true;
                break;
            }
            for (int u = 0; u < cfg.K_u; ++u) {
                r.user_bit_errors[u] += o.user_errors[u];
                r.user_bits[u] += o.user_bits[u];
                r.bit_errors += o.user_errors[u];
                r.total_bits += o.user_bits[u];
            }
            ++r.frames;
            if ((r.bit_errors >= cfg.target_errors && r.frames >= cfg.min_frames) || r.frames >= cfg.max_frames) {
                done = true;
                break;
            }
        }
    }

    if (r.ok() && r.total_bits > 0) {
        r.ber = static_cast<double>(r.bit_errors) / static_cast<double>(r.total_bits);
        r.ber_std_error = std::sqrt(r.ber * (1.0 - r.ber) / static_cast<double>(r.total_bits));
        for (int u = 0; u < cfg.K_u; ++u)
            r.per_user_ber.push_back(static_cast<double>(r.user_bit_errors[u]) / static_cast<double>(r.user_bits[u]));
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

ResultRecord run_mse_point(const Setup& s, double pilot_snr_db, int threads) {
    const auto start = std::chrono::steady_clock::now();
    const auto& cfg = s.cfg;
    ResultRecord r = blank_record(s, ResultRecord::kNone, pilot_snr_db);
    r.curve = "nmse-" + curve_label(cfg, ResultRecord::kNone);
    const int alpha_max = cfg.resolved_alpha_max();

    double sum = 0.0, sum_sq = 0.0;
    for (long first = 0; first < cfg.mse_trials && r.ok(); first += cfg.batch_frames) {
        const long count = std::min<long>(cfg.batch_frames, cfg.mse_trials - first);
        const auto batch = parallel_frames(first, count, threads, [&](std::uint64_t f) {
            const auto ch = draw_channels(s, f);
            FrameOutcome o;
            o.nmse = nmse(estimate_channels(s, ch, pilot_snr_db, f), ch, cfg.grid, alpha_max);
            return o;
        });
        for (const auto& o : batch) {
            if (!o.failure.empty()) {
                r.failure = o.failure;
                break;
            }
            sum += o.nmse;
            sum_sq += o.nmse * o.nmse;
            ++r.frames;
        }
    }
    if (r.ok() && r.frames > 0) {
        const double n = static_cast<double>(r.frames);
        r.nmse = sum / n;
        const double var = r.frames > 1 ? std::max(0.0, (sum_sq - n * r.nmse * r.nmse) / (n - 1.0)) : 0.0;
        r.nmse_half_width = 1.96 * std::sqrt(var / n);
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OTFSMA_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<ResultRecord> run_ber_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
    if (cfg.snr_db.empty()) throw ConfigError("ber sweep: snr_db list is empty");
    const Setup s(cfg);
    const int threads = resolve_threads(opts.threads);
    std::vector<ResultRecord> out;
    for (double snr : cfg.snr_db) {
        out.push_back(run_ber_point(s, snr, ResultRecord::kNone, threads));
        if (opts.progress) opts.progress(out.back());
    }
    return out;
}

std::vector<ResultRecord> run_mse_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
    if (cfg.pilot_snr_db.empty()) throw ConfigError("mse sweep: estimation.pilot_snr_db list is empty");
    if (cfg.chain_ber && cfg.snr_db.empty()) throw ConfigError("mse sweep: chain_ber needs a snr_db list");
    const Setup s(cfg);
    const int threads = resolve_threads(opts.threads);
    std::vector<ResultRecord> out;
    for (double p : cfg.pilot_snr_db) {
        out.push_back(run_mse_point(s, p, threads));
        if (opts.progress) opts.progress(out.back());
    }
    if (cfg.chain_ber) {
        for (double snr : cfg.snr_db) {
            out.push_back(run_ber_point(s, snr, ResultRecord::kNone, threads));
            if (opts.progress) opts.progress(out.back());
        }
        for (double p : cfg.pilot_snr_db) {
            for (double snr : cfg.snr_db) {
                out.push_back(run_ber_point(s, snr, p, threads));
                if (opts.progress) opts.progress(out.back());
            }
        }
    }
    return out;
}

std::vector<ResultRecord> run_compare(const ExperimentConfig& cfg, const RunOptions& opts) {
    std::vector<ResultRecord> out;
    for (Waveform w : {Waveform::OtfsMa, Waveform::ScFdma, Waveform::Ofdma}) {
        ExperimentConfig c = cfg;
        c.waveform = w;
        c.pilot_snr_db.clear();
        const auto part = run_ber_sweep(c, opts);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

double snr_at_ber(const std::vector<ResultRecord>& curve, double target_ber) {
    std::vector<const ResultRecord*> pts;
    for (const auto& r : curve)
        if (r.ok() && !std::isnan(r.ber) && std::isfinite(r.snr_db)) pts.push_back(&r);
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->snr_db < b->snr_db; });
    // a point with no errors is floored at half an error so the crossing stays finite
    auto log_ber = [](const ResultRecord& r) {
        return std::log10(std::max(r.ber, 0.5 / static_cast<double>(std::max<long>(r.total_bits, 1))));
    };
    const double lt = std::log10(target_ber);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = log_ber(*pts[i]);
        const double b = log_ber(*pts[i + 1]);
        if (a >= lt && b < lt) {
            const double t = (a - lt) / (a - b);
            return pts[i]->snr_db + t * (pts[i + 1]->snr_db - pts[i]->snr_db);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<ResultRecord> select_curve(const std::vector<ResultRecord>& records, const std::string& label) {
    std::vector<ResultRecord> out;
    for (const auto& r : records)
        if (r.curve == label) out.push_back(r);
    return out;
}

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
    os << "waveform,scheme,K_u,N,M,snr_db,pilot_snr_db,frames,bit_errors,ber,nmse,seed,config_hash\n";
    for (const auto& r : records) {
        const bool ber_row = !std::isnan(r.snr_db);
        os << r.waveform << ',' << r.scheme << ',' << r.K_u << ',' << r.N << ',' << r.M << ',' << fmt(r.snr_db) << ','
           << fmt(r.pilot_snr_db) << ',' << r.frames << ',' << (ber_row ? std::to_string(r.bit_errors) : "") << ','
           << fmt(r.ber) << ',' << fmt(r.nmse) << ',' << r.seed << ',' << r.config_hash << '\n';
    }
}

void write_long_csv(std::ostream& os, const std::vector<ResultRecord>& records, const std::string& figure) {
    os << "figure,curve,x_name,x,y_name,y,frames,y_err\n";
    for (const auto& r : records) {
        if (std::isnan(r.snr_db)) {
            os << figure << ',' << r.curve << ",pilot_snr_db," << fmt(r.pilot_snr_db) << ",nmse," << fmt(r.nmse) << ','
               << r.frames << ',' << fmt(r.nmse_half_width) << '\n';
        } else {
            os << figure << ',' << r.curve << ",snr_db," << fmt(r.snr_db) << ",ber," << fmt(r.ber) << ',' << r.frames
               << ',' << fmt(r.ber_std_error) << '\n';
        }
    }
}

}  // namespace otfsma
