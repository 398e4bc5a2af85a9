#include "otfsma/dd_transforms.hpp"

#include <cmath>
#include <string>

#include "otfsma/dft.hpp"

namespace otfsma {

TFFrame isfft(const DDFrame& frame) {
    const GridSpec& g = frame.grid;
    if (frame.symbols.rows() != g.N || frame.symbols.cols() != g.M) {
        throw InvalidInput("isfft: frame dimensions do not match grid");
    }
    CMatrix tf = dft_rows(dft_columns(frame.symbols, DftSign::Inverse), DftSign::Forward);
    tf /= std::sqrt(static_cast<double>(g.size()));
    return TFFrame(g, std::move(tf));
}

DDFrame sfft(const TFFrame& frame) {
    const GridSpec& g = frame.grid;
    if (frame.samples.rows() != g.N || frame.samples.cols() != g.M) {
        throw InvalidInput("sfft: frame dimensions do not match grid");
    }
    CMatrix dd = dft_rows(dft_columns(frame.samples, DftSign::Forward), DftSign::Inverse);
    dd /= std::sqrt(static_cast<double>(g.size()));
    return DDFrame(g, std::move(dd));
}

void check_interleaving(const GridSpec& grid, int g1, int g2) {
    if (g1 < 1 || g2 < 1) {
        throw ConfigError("interleaving: g1 and g2 must be >= 1");
    }
    if (grid.M % g1 != 0) {
        throw ConfigError("interleaving: g1=" + std::to_string(g1) + " does not divide M=" +
                          std::to_string(grid.M));
    }
    if (grid.N % g2 != 0) {
        throw ConfigError("interleaving: g2=" + std::to_string(g2) + " does not divide N=" +
                          std::to_string(grid.N));
    }
}

TfRegion tf_region(const GridSpec& grid, int user, int g1, int g2) {
    check_interleaving(grid, g1, g2);
    if (user < 0 || user >= g1 * g2) {
        throw ConfigError("interleaving: user index " + std::to_string(user) + " outside [0, g1*g2)");
    }
    TfRegion r;
    r.n_len = grid.N / g2;
    r.m_len = grid.M / g1;
    r.n0 = r.n_len * (user % g2);
    r.m0 = r.m_len * (user / g2);
    return r;
}

GridSpec reduced_grid(const GridSpec& grid, int g1, int g2) {
    check_interleaving(grid, g1, g2);
    GridSpec r = grid;
    r.N = grid.N / g2;
    r.M = grid.M / g1;
    return r;
}

DDFrame restricted_sfft(const TFFrame& frame, int user, int g1, int g2) {
    const GridSpec& g = frame.grid;
    if (frame.samples.rows() != g.N || frame.samples.cols() != g.M) {
        throw InvalidInput("restricted_sfft: frame dimensions do not match grid");
    }
    const TfRegion r = tf_region(g, user, g1, g2);
    const CMatrix block = frame.samples.block(r.n0, r.m0, r.n_len, r.m_len);
    CMatrix dd = dft_rows(dft_columns(block, DftSign::Forward), DftSign::Inverse);
    dd /= std::sqrt(static_cast<double>(g.size()));
    return DDFrame(reduced_grid(g, g1, g2), std::move(dd));
}

}  // namespace otfsma
