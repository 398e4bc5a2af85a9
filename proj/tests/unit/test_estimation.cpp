#include <doctest.h>

#include "helpers.hpp"
#include "otfsma/allocation.hpp"
#include "otfsma/estimation.hpp"

using namespace otfsma;
using namespace testutil;

TEST_CASE("pilot placement") {
    const GridSpec g = GridSpec::make(8, 32);
    const PilotPlan p = place_pilots(Scheme::DelayAxis, g, 4, 7);
    CHECK(p.l_p == std::vector<int>{0, 8, 16, 24});
    CHECK(p.k_p == std::vector<int>{0, 0, 0, 0});

    const PilotPlan one = place_pilots(Scheme::DelayAxis, g, 1, 7);
    CHECK(one.k_p[0] == 0);
    CHECK(one.l_p[0] == 0);

    CHECK_THROWS_WITH_AS(place_pilots(Scheme::DelayAxis, g, 4, 8), doctest::Contains("M/K_u > alpha_max"),
                         ConfigError);

    const PilotPlan d = place_pilots(Scheme::DopplerAxis, g, 4, 7);
    CHECK(d.k_p == std::vector<int>{0, 2, 4, 6});
    CHECK(d.l_p == std::vector<int>{0, 8, 16, 24});
    CHECK_THROWS_AS(place_pilots(Scheme::DopplerAxis, GridSpec::make(8, 16), 4, 7), ConfigError);
    CHECK_THROWS_AS(place_pilots(Scheme::Interleaved, g, 4, 1), ConfigError);
}

TEST_CASE("pilots sit inside their user's allocation") {
    const GridSpec g = GridSpec::make(8, 32);
    for (Scheme s : {Scheme::DelayAxis, Scheme::DopplerAxis}) {
        const PilotPlan p = place_pilots(s, g, 4, 7);
        const AllocationPlan plan = make_plan(s, g, 4);
        const auto frames = pilot_frames(p);
        for (int u = 0; u < 4; ++u) {
            CHECK(plan.masks[u](p.k_p[u], p.l_p[u]));
            CHECK(frames[u].symbols.squaredNorm() == 1.0);
            CHECK(frames[u].symbols(p.k_p[u], p.l_p[u]) == cplx{1.0});
        }
    }
}

TEST_CASE("noiseless single tap estimate is exact") {
    const GridSpec g = GridSpec::make(8, 16);
    UserChannel ch;
    ch.taps.push_back({cplx{0.6, -0.2}, 3, 2, 0.0});
    const PilotPlan p = place_pilots(Scheme::DelayAxis, g, 1, 4);
    const auto est = estimate(pilot_response(p, std::vector<UserChannel>{ch}), p);
    const cplx expect = double(g.size()) * ch.taps[0].gain * tap_phase(ch.taps[0], g);
    CHECK(std::abs(est[0].kernel(2, 3) - expect) < 1e-12);
    CMatrix rest = est[0].kernel;
    rest(2, 3) = 0.0;
    CHECK(max_abs(rest) < 1e-12);
}

TEST_CASE("noiseless estimates rebuild the true matrices") {
    Rng rng(61);
    const GridSpec g = GridSpec::make(8, 32);
    for (Scheme s : {Scheme::DelayAxis, Scheme::DopplerAxis}) {
        const PilotPlan p = place_pilots(s, g, 4, 7);
        std::vector<UserChannel> ch;
        for (int u = 0; u < 4; ++u) ch.push_back(random_channel(g, rng, 4, false, 7));
        const auto est = estimate(pilot_response(p, ch), p);
        const auto H = build_system_matrix(ch, g);
        const auto Hr = rebuild_model(est, g);
        for (int u = 0; u < 4; ++u) {
            CHECK(max_abs(CMatrix(Hr[u]) - CMatrix(H[u])) < 1e-10);
            CHECK(nmse(est[u].kernel, true_kernel(ch[u], g, 7)) < 1e-20);
            const CVector x = complex_gaussian_vector(rng, g.size(), 1.0);
            CHECK(max_abs(Hr[u] * x - H[u] * x) < 1e-10);
        }
    }
}

TEST_CASE("simultaneous pilots do not leak across users") {
    Rng rng(62);
    const GridSpec g = GridSpec::make(8, 32);
    const PilotPlan p = place_pilots(Scheme::DelayAxis, g, 4, 7);
    std::vector<UserChannel> ch;
    for (int u = 0; u < 4; ++u) ch.push_back(random_channel(g, rng, 5, false, 7));
    const auto joint = estimate(pilot_response(p, ch), p);
    for (int u = 0; u < 4; ++u) {
        std::vector<UserChannel> alone(4);
        alone[u] = ch[u];
        const auto solo = estimate(pilot_response(p, alone), p);
        CHECK(max_abs(joint[u].kernel - solo[u].kernel) < 1e-10);
    }
}

TEST_CASE("nmse edge cases") {
    const CMatrix t = CMatrix::Constant(2, 3, cplx{1.0, 1.0});
    CHECK(nmse(t, t) == 0.0);
    CHECK(nmse(CMatrix::Zero(2, 3).eval(), t) == doctest::Approx(1.0));
    CHECK_THROWS_AS(nmse(t, CMatrix::Zero(2, 3).eval()), InvalidInput);
    CHECK_THROWS_AS(nmse(t, CMatrix::Zero(3, 3).eval()), InvalidInput);
}

TEST_CASE("zero estimate rebuilds a zero matrix") {
    const GridSpec g = GridSpec::make(4, 8);
    const ChannelEstimate e{CMatrix::Zero(4, 3), 30.0};
    CHECK(rebuild_user_matrix(e, g).nonZeros() == 0);
}

TEST_CASE("nmse falls as pilot SNR rises") {
    const GridSpec g = GridSpec::make(8, 32);
    const PilotPlan p = place_pilots(Scheme::DelayAxis, g, 4, 7);
    ChannelProfile prof = ChannelProfile::from_delay_indices(g, std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}, 1000.0);
    double prev = 1e9;
    for (double snr : {20.0, 30.0, 40.0, 50.0}) {
        Rng rng(63);
        double acc = 0.0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t) {
            std::vector<UserChannel> ch;
            for (int u = 0; u < 4; ++u) ch.push_back(draw_channel(prof, g, rng, u));
            const DDFrame y = received_pilots(p, ch, std::pow(10.0, -snr / 10.0), rng);
            acc += nmse(estimate(y, p, snr), ch, g, 7);
        }
        const double mean = acc / trials;
        CHECK(mean < prev);
        prev = mean;
    }
}

TEST_CASE("magnitude threshold zeroes small readouts") {
    const GridSpec g = GridSpec::make(4, 8);
    const PilotPlan p = place_pilots(Scheme::DelayAxis, g, 1, 2);
    DDFrame y(g);
    y.symbols(0, 0) = 1.0;
    y.symbols(1, 1) = 1e-4;
    const auto e = estimate(y, p, 0.0, 0.01);
    CHECK(e[0].kernel(0, 0) == cplx{32.0});
    CHECK(e[0].kernel(1, 1) == cplx{0.0});
}
