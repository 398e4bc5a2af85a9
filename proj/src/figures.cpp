#include <cmath>

#include "otfsma/harness.hpp"

namespace otfsma {

namespace {

std::vector<double> range(double from, double to, double step) {
    std::vector<double> v;
    for (double x = from; x <= to + 1e-9; x += step) v.push_back(x);
    return v;
}

// 10-tap profile used for the large-grid figures (microseconds)
const std::vector<double> kTenTaps = {0, 1.04, 2.08, 3.12, 4.16, 5.2, 6.25, 7.29, 8.33, 9.37};

struct Budget {
    long min_frames, max_frames, target_errors;
    int mse_trials;
};

Budget budget(Scale s, bool large) {
    switch (s) {
        case Scale::Smoke: return {2, 4, 100, 20};
        case Scale::Desk: return large ? Budget{20, 2000, 100, 1000} : Budget{50, 20000, 100, 1000};
        case Scale::Full: return large ? Budget{100, 20000, 200, 10000} : Budget{200, 200000, 200, 10000};
    }
    return {};
}

ExperimentConfig base(const std::string& name, Scale s, bool large) {
    ExperimentConfig c;
    c.name = name;
    c.alphabet = "bpsk";
    c.nu_max_hz = 1000.0;
    c.seed = 2024;
    const Budget b = budget(s, large);
    c.min_frames = b.min_frames;
    c.max_frames = b.max_frames;
    c.target_errors = b.target_errors;
    c.mse_trials = b.mse_trials;
    if (large) {
        c.grid = s == Scale::Full ? GridSpec::make(16, 64) : GridSpec::make(8, 32);
        c.delays_us = kTenTaps;
        c.detector = DetectorKind::MP;
    } else {
        c.grid = GridSpec::make(4, 4);
        // four taps on consecutive delay bins of the 4 x 4 grid
        for (int i = 0; i < 4; ++i) c.delays_us.push_back(i * 1e6 * c.grid.delay_resolution());
        c.detector = DetectorKind::ML;
    }
    return c;
}

ExperimentConfig otfs(ExperimentConfig c, Scheme s, int K) {
    c.waveform = Waveform::OtfsMa;
    c.scheme = s;
    c.K_u = K;
    if (s == Scheme::Interleaved) {
        c.g1 = K >= 2 ? 2 : 1;
        c.g2 = K / c.g1;
    }
    return c;
}

ExperimentConfig baseline(ExperimentConfig c, Waveform w, int K) {
    c.waveform = w;
    c.K_u = K;
    return c;
}

}  // namespace

Scale scale_from_string(const std::string& s) {
    if (s == "smoke") return Scale::Smoke;
    if (s == "desk") return Scale::Desk;
    if (s == "full") return Scale::Full;
    throw ConfigError("unknown scale '" + s + "' (expected smoke, desk or full)");
}

std::vector<std::string> figure_names() { return {"fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"}; }

FigureSpec figure_spec(const std::string& name, Scale scale) {
    const bool smoke = scale == Scale::Smoke;
    FigureSpec f;
    f.name = name;
    f.kind = "ber";

    if (name == "fig4") {
        ExperimentConfig b = base(name, scale, false);
        b.snr_db = smoke ? std::vector<double>{0, 10} : range(0, 20, 2);
        f.curves = {otfs(b, Scheme::DelayAxis, 2), otfs(b, Scheme::DopplerAxis, 2), otfs(b, Scheme::Interleaved, 2)};
    } else if (name == "fig5") {
        ExperimentConfig b = base(name, scale, false);
        b.snr_db = smoke ? std::vector<double>{0, 10} : range(0, 20, 4);
        // K_u = 8 does not divide M = N = 4, so only the interleaved scheme reaches it
        for (int K : {2, 4}) {
            f.curves.push_back(otfs(b, Scheme::DelayAxis, K));
            f.curves.push_back(otfs(b, Scheme::DopplerAxis, K));
        }
        for (int K : {2, 4, 8}) f.curves.push_back(otfs(b, Scheme::Interleaved, K));
    } else if (name == "fig6") {
        ExperimentConfig b = base(name, scale, false);
        b.snr_db = smoke ? std::vector<double>{0, 10} : range(0, 40, 4);
        f.curves = {otfs(b, Scheme::DelayAxis, 2), baseline(b, Waveform::ScFdma, 2), baseline(b, Waveform::Ofdma, 2)};
    } else if (name == "fig7") {
        ExperimentConfig b = base(name, scale, true);
        b.snr_db = smoke ? std::vector<double>{0, 10} : range(0, 16, 2);
        for (int K : {4, 8}) {
            f.curves.push_back(otfs(b, Scheme::DelayAxis, K));
            f.curves.push_back(otfs(b, Scheme::Interleaved, K));
        }
    } else if (name == "fig8") {
        ExperimentConfig b = base(name, scale, true);
        b.snr_db = smoke ? std::vector<double>{0, 10} : range(0, 20, 2);
        f.curves = {otfs(b, Scheme::DelayAxis, 8), baseline(b, Waveform::ScFdma, 8), baseline(b, Waveform::Ofdma, 8)};
    } else if (name == "fig9" || name == "fig10") {
        ExperimentConfig b = otfs(base(name, scale, true), Scheme::DelayAxis, 4);
        b.alpha_max = scale == Scale::Full ? 9 : 7;
        if (name == "fig9") {
            f.kind = "mse";
            b.pilot_snr_db = smoke ? std::vector<double>{20, 40} : std::vector<double>{20, 25, 30, 35, 36, 40, 45, 50};
        } else {
            f.kind = "mse";
            b.chain_ber = true;
            b.mse_trials = smoke ? 4 : 200;
            b.pilot_snr_db = smoke ? std::vector<double>{40} : std::vector<double>{30, 40, 50};
            b.snr_db = smoke ? std::vector<double>{0, 10} : range(0, 16, 2);
        }
        f.curves = {b};
    } else {
        throw ConfigError("unknown figure '" + name + "' (expected fig4 .. fig10)");
    }
    return f;
}

std::vector<ResultRecord> run_figure(const FigureSpec& fig, const RunOptions& opts) {
    std::vector<ResultRecord> out;
    for (const auto& c : fig.curves) {
        const auto part = fig.kind == "mse" ? run_mse_sweep(c, opts) : run_ber_sweep(c, opts);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

}  // namespace otfsma
