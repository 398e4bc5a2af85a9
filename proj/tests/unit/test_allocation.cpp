#include <doctest.h>

#include "helpers.hpp"
#include "otfsma/allocation.hpp"

using namespace otfsma;
using namespace testutil;

namespace {

void check_partition(const AllocationPlan& plan) {
    Eigen::ArrayXXi count = Eigen::ArrayXXi::Zero(plan.grid.N, plan.grid.M);
    for (const auto& m : plan.masks) count += m.cast<int>();
    CHECK((count == 1).all());
}

std::span<const cplx> as_span(const CVector& v) { return {v.data(), std::size_t(v.size())}; }

}  // namespace

TEST_CASE("delay axis plan matches the four-user layout") {
    const GridSpec g = GridSpec::make(8, 8);
    const AllocationPlan plan = make_plan(Scheme::DelayAxis, g, 4);
    check_partition(plan);
    for (int u = 0; u < 4; ++u)
        for (int l = 0; l < 8; ++l)
            for (int k = 0; k < 8; ++k) CHECK(plan.masks[u](k, l) == (l / 2 == u));
}

TEST_CASE("Doppler axis plan owns contiguous rows") {
    const GridSpec g = GridSpec::make(8, 4);
    const AllocationPlan plan = make_plan(Scheme::DopplerAxis, g, 2);
    check_partition(plan);
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 8; ++k) CHECK(plan.masks[1](k, l) == (k >= 4));
    const AllocationPlan one = make_plan(Scheme::DopplerAxis, g, 1);
    CHECK(one.masks[0].all());
}

TEST_CASE("interleaved plan follows the periodic lattice") {
    const GridSpec g = GridSpec::make(8, 8);
    const AllocationPlan plan = make_plan(Scheme::Interleaved, g, 4, 2, 2);
    check_partition(plan);
    for (int l = 0; l < 8; ++l)
        for (int k = 0; k < 8; ++k) CHECK(plan.masks[0](k, l) == (k % 2 == 0 && l % 2 == 0));
    for (int u = 0; u < 4; ++u)
        for (int l = 0; l < 8; ++l)
            for (int k = 0; k < 8; ++k)
                CHECK(plan.masks[u](k, l) == (k % 2 == u / 2 && l % 2 == u % 2));
}

TEST_CASE("divisibility failures are named") {
    const GridSpec g = GridSpec::make(4, 4);
    CHECK_THROWS_WITH_AS(make_plan(Scheme::DelayAxis, g, 3), doctest::Contains("does not divide M=4"), ConfigError);
    CHECK_THROWS_WITH_AS(make_plan(Scheme::DopplerAxis, g, 3), doctest::Contains("does not divide N=4"), ConfigError);
    CHECK_THROWS_WITH_AS(make_plan(Scheme::Interleaved, g, 4, 2, 1), doctest::Contains("g1*g2"), ConfigError);
    CHECK_THROWS_AS(make_plan(Scheme::Interleaved, g, 3, 3, 1), ConfigError);
}

TEST_CASE("pack and unpack round trip") {
    Rng rng(31);
    const GridSpec g = GridSpec::make(4, 8);
    std::vector<AllocationPlan> plans = {make_plan(Scheme::DelayAxis, g, 4), make_plan(Scheme::DopplerAxis, g, 2),
                                         make_plan(Scheme::Interleaved, g, 4, 2, 2)};
    for (const auto& plan : plans) {
        CMatrix sum = CMatrix::Zero(g.N, g.M);
        for (int u = 0; u < plan.K_u; ++u) {
            const CVector p = complex_gaussian_vector(rng, plan.symbols_per_user(), 1.0);
            const DDFrame f = pack(plan, u, as_span(p));
            CHECK(max_abs(unpack(plan, u, f) - p) == 0.0);
            for (int l = 0; l < g.M; ++l)
                for (int k = 0; k < g.N; ++k)
                    if (!plan.masks[u](k, l)) CHECK(f.symbols(k, l) == cplx{0.0});
            sum += f.symbols;
        }
        CHECK((sum.array() != cplx{0.0}).all());
    }
}

TEST_CASE("pack places user 1 on its delay columns and rejects bad lengths") {
    const GridSpec g = GridSpec::make(4, 4);
    const AllocationPlan plan = make_plan(Scheme::DelayAxis, g, 2);
    const CVector p = CVector::Ones(8);
    const DDFrame f = pack(plan, 1, as_span(p));
    CHECK(f.symbols.leftCols(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.symbols.rightCols(2).cwiseAbs().minCoeff() == 1.0);
    CHECK(max_abs(pack(plan, 0, as_span(CVector::Zero(8).eval())).symbols) == 0.0);
    const CVector short_p = CVector::Ones(7);
    CHECK_THROWS_AS(pack(plan, 0, as_span(short_p)), InvalidInput);
}

TEST_CASE("composite model matches the direct channel on packed frames") {
    Rng rng(32);
    const GridSpec g = GridSpec::make(4, 4);
    const AllocationPlan plan = make_plan(Scheme::DelayAxis, g, 2);
    std::vector<UserChannel> ch = {random_channel(g, rng, 3), random_channel(g, rng, 3)};
    const auto H = build_system_matrix(ch, g);
    const SystemModel model = composite_model(plan, H);
    CHECK(model.rows() == 16);
    CHECK(model.cols() == 16);

    std::vector<CVector> payloads;
    std::vector<DDFrame> frames;
    for (int u = 0; u < 2; ++u) {
        payloads.push_back(complex_gaussian_vector(rng, 8, 1.0));
        frames.push_back(pack(plan, u, as_span(payloads.back())));
    }
    CVector x(16);
    x << payloads[0], payloads[1];
    CHECK(max_abs(model.H * x - apply_channel_direct(ch, g, frames).vectorized()) < 1e-10);
    for (int c = 0; c < 16; ++c) CHECK(model.column_user[c] == c / 8);

    // multi-tap channels couple users: some observation sees both
    bool mixed = false;
    for (const auto& row : model.row_support) {
        bool u0 = false, u1 = false;
        for (int c : row) (c < 8 ? u0 : u1) = true;
        mixed = mixed || (u0 && u1);
    }
    CHECK(mixed);
}

TEST_CASE("identity channels give a column permutation of the identity") {
    const GridSpec g = GridSpec::make(4, 4);
    const AllocationPlan plan = make_plan(Scheme::DopplerAxis, g, 2);
    UserChannel id;
    id.taps.push_back({cplx{1.0}, 0, 0, 0.0});
    const std::vector<UserChannel> ch = {id, id};
    const SystemModel model = composite_model(plan, build_system_matrix(ch, g));
    const CMatrix P = model.H;
    CHECK(max_abs(P.adjoint() * P - CMatrix::Identity(16, 16)) < 1e-15);
    for (int c = 0; c < 16; ++c) CHECK(model.col_support[c].size() == 1);
}

TEST_CASE("single user full mask leaves H unrestricted") {
    Rng rng(33);
    const GridSpec g = GridSpec::make(4, 4);
    const AllocationPlan plan = make_plan(Scheme::DelayAxis, g, 1);
    const std::vector<UserChannel> ch = {random_channel(g, rng, 2)};
    const auto H = build_system_matrix(ch, g);
    CHECK(max_abs(composite_model(plan, H).H - CMatrix(H[0])) == 0.0);
}

TEST_CASE("scheme names parse") {
    CHECK(scheme_from_string("1") == Scheme::DelayAxis);
    CHECK(scheme_from_string("doppler") == Scheme::DopplerAxis);
    CHECK(scheme_from_string("scheme3") == Scheme::Interleaved);
    CHECK_THROWS_AS(scheme_from_string("4"), ConfigError);
}
