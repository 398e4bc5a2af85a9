#include <doctest.h>

#include "helpers.hpp"
#include "otfsma/allocation.hpp"
#include "otfsma/detectors.hpp"

using namespace otfsma;
using namespace testutil;

namespace {

SystemModel single_user(const CMatrix& H, double threshold = 0.0) {
    return SystemModel::from_dense(H, std::vector<int>(H.cols(), 0), threshold);
}

CVector symbols_of(const Alphabet& A, const std::vector<int>& idx) {
    CVector x(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) x[Eigen::Index(i)] = A.points[idx[i]];
    return x;
}

std::vector<int> random_indices(Rng& rng, const Alphabet& A, int d) {
    std::uniform_int_distribution<int> pick(0, A.size() - 1);
    std::vector<int> v(d);
    for (auto& s : v) s = pick(rng);
    return v;
}

// Exhaustive minimum by plain enumeration, ties to the lowest lexicographic index.
std::vector<int> brute_force(const CMatrix& H, const CVector& y, const Alphabet& A) {
    const int d = int(H.cols());
    const int Q = A.size();
    std::vector<int> cur(d, 0), best;
    double best_f = std::numeric_limits<double>::infinity();
    while (true) {
        const double f = (y - H * symbols_of(A, cur)).squaredNorm();
        if (f < best_f - 1e-12) {
            best_f = f;
            best = cur;
        }
        int v = d - 1;
        while (v >= 0 && ++cur[v] == Q) cur[v--] = 0;
        if (v < 0) break;
    }
    return best;
}

}  // namespace

TEST_CASE("alphabets have unit energy and Gray labels") {
    for (const auto& A : {Alphabet::bpsk(), Alphabet::qpsk(), Alphabet::qam16()}) {
        double e = 0.0;
        for (cplx p : A.points) e += std::norm(p);
        CHECK(e / A.size() == doctest::Approx(1.0));
        CHECK(A.size() == (1 << A.bits_per_symbol));
        // nearest neighbours differ in one bit
        for (int i = 0; i < A.size(); ++i) {
            double dmin = 1e9;
            for (int j = 0; j < A.size(); ++j)
                if (j != i) dmin = std::min(dmin, std::abs(A.points[i] - A.points[j]));
            for (int j = 0; j < A.size(); ++j)
                if (j != i && std::abs(A.points[i] - A.points[j]) < dmin + 1e-9) CHECK(A.bit_errors(i, j) == 1);
        }
    }
    CHECK(Alphabet::bpsk().points[0] == cplx{1.0});
    CHECK(Alphabet::bpsk().is_real());
    CHECK_FALSE(Alphabet::qpsk().is_real());
}

TEST_CASE("ML recovers a clean vector through the identity") {
    const Alphabet A = Alphabet::bpsk();
    Rng rng(41);
    const auto x = random_indices(rng, A, 8);
    const SystemModel m = single_user(CMatrix::Identity(8, 8));
    CHECK(ml_detect(m, symbols_of(A, x), A) == x);
}

TEST_CASE("ML matches plain enumeration") {
    Rng rng(42);
    for (const auto& A : {Alphabet::bpsk(), Alphabet::qpsk()}) {
        for (int t = 0; t < 20; ++t) {
            const int d = A.size() == 2 ? 6 : 4;
            const CMatrix H = random_matrix(rng, d + 2, d);
            const CVector y = H * symbols_of(A, random_indices(rng, A, d)) + complex_gaussian_vector(rng, d + 2, 0.5);
            CHECK(ml_detect(single_user(H), y, A) == brute_force(H, y, A));
        }
    }
}

TEST_CASE("ML noiseless recovery on random full-rank models") {
    Rng rng(43);
    const Alphabet A = Alphabet::bpsk();
    for (int t = 0; t < 100; ++t) {
        const CMatrix H = random_matrix(rng, 4, 4);
        const auto x = random_indices(rng, A, 4);
        CHECK(ml_detect(single_user(H), H * symbols_of(A, x), A) == x);
    }
}

TEST_CASE("ML ties go to the lowest lexicographic candidate") {
    const Alphabet A = Alphabet::bpsk();
    const SystemModel m = single_user(CMatrix::Zero(2, 2));
    CHECK(ml_detect(m, CVector::Zero(2), A) == std::vector<int>{0, 0});
}

TEST_CASE("ML refuses oversized searches") {
    const Alphabet A = Alphabet::qpsk();
    const SystemModel m = single_user(CMatrix::Identity(11, 11));
    CHECK_THROWS_AS(ml_detect(m, CVector::Zero(11), A), SearchSpaceExceeded);
    MlOptions wide;
    wide.max_search_bits = 22;
    CHECK_NOTHROW(ml_detect(m, CVector::Zero(11), A, wide));
}

TEST_CASE("MP on an identity model decides the sign in one iteration") {
    const Alphabet A = Alphabet::bpsk();
    CVector y(4);
    y << 0.9, -1.1, 0.2, -0.05;
    MpConfig cfg;
    cfg.noise_var = 1e-6;
    cfg.delta = 1.0;
    const MpResult r = mp_detect(single_user(CMatrix::Identity(4, 4)), y, A, cfg);
    CHECK(r.decisions == std::vector<int>{0, 1, 0, 1});
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
}

TEST_CASE("MP messages stay valid pmfs") {
    Rng rng(44);
    const GridSpec g = GridSpec::make(4, 4);
    const AllocationPlan plan = make_plan(Scheme::DelayAxis, g, 2);
    std::vector<UserChannel> ch = {random_channel(g, rng, 4, false, 3), random_channel(g, rng, 4, false, 3)};
    const SystemModel m = composite_model(plan, build_system_matrix(ch, g), 1e-3);
    const Alphabet A = Alphabet::qpsk();
    const CVector y = m.H * symbols_of(A, random_indices(rng, A, 16)) + complex_gaussian_vector(rng, 16, 0.1);
    MpConfig cfg;
    cfg.noise_var = 0.1;
    int calls = 0;
    const MpResult r = mp_detect(m, y, A, cfg, [&](int, const std::vector<double>& msg) {
        ++calls;
        REQUIRE(msg.size() % 4 == 0);
        for (std::size_t e = 0; e < msg.size(); e += 4) {
            double s = 0.0;
            for (int j = 0; j < 4; ++j) {
                REQUIRE(msg[e + j] >= 0.0);
                s += msg[e + j];
            }
            REQUIRE(std::abs(s - 1.0) < 1e-9);
        }
    });
    CHECK(calls == r.iterations);
    for (const auto& p : r.pmfs) {
        double s = 0.0;
        for (double v : p) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("MP damping blends fresh and current pmfs") {
    Rng rng(45);
    const CMatrix H = random_matrix(rng, 6, 6);
    const Alphabet A = Alphabet::bpsk();
    const CVector y = H * symbols_of(A, random_indices(rng, A, 6)) + complex_gaussian_vector(rng, 6, 0.2);
    const SystemModel m = single_user(H);

    // first iteration starts from uniform, so undamped and damped messages relate linearly
    auto first = [&](double delta) {
        MpConfig cfg;
        cfg.noise_var = 0.2;
        cfg.delta = delta;
        cfg.n_max = 1;
        std::vector<double> out;
        mp_detect(m, y, A, cfg, [&](int, const std::vector<double>& msg) { out = msg; });
        return out;
    };
    const auto fresh = first(1.0);
    const auto damped = first(0.7);
    for (std::size_t i = 0; i < fresh.size(); ++i) CHECK(damped[i] == doctest::Approx(0.7 * fresh[i] + 0.15));
}

TEST_CASE("MP is deterministic") {
    Rng rng(46);
    const CMatrix H = random_matrix(rng, 8, 8);
    const Alphabet A = Alphabet::bpsk();
    const CVector y = H * symbols_of(A, random_indices(rng, A, 8)) + complex_gaussian_vector(rng, 8, 0.3);
    MpConfig cfg;
    cfg.noise_var = 0.3;
    const MpResult a = mp_detect(single_user(H), y, A, cfg);
    const MpResult b = mp_detect(single_user(H), y, A, cfg);
    CHECK(a.decisions == b.decisions);
    CHECK(a.pmfs == b.pmfs);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("MP configuration is validated") {
    MpConfig cfg;
    cfg.delta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.delta = 1.0;
    cfg.n_max = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("per-user reduced detection recovers noiseless payloads") {
    Rng rng(47);
    const GridSpec g = GridSpec::make(4, 4);
    const Alphabet A = Alphabet::bpsk();
    std::vector<CMatrix> models;
    std::vector<CVector> ys;
    std::vector<std::vector<int>> truth;
    for (int u = 0; u < 4; ++u) {
        models.push_back(build_scheme3_matrix(random_channel(g, rng, 3), g, 2, 2, u));
        truth.push_back(random_indices(rng, A, 4));
        ys.push_back(models.back() * symbols_of(A, truth.back()));
    }
    MpConfig cfg;
    cfg.noise_var = 1e-4;
    CHECK(detect_per_user_scheme3(models, ys, A, DetectorKind::ML, cfg, 2, 2) == truth);
}
