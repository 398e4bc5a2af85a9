#include "otfsma/grid.hpp"

#include <cmath>

namespace otfsma {

GridSpec GridSpec::make(int N, int M, double delta_f_hz, double carrier_freq_hz) {
    GridSpec g;
    g.N = N;
    g.M = M;
    g.delta_f = delta_f_hz;
    g.T = delta_f_hz > 0 ? 1.0 / delta_f_hz : 0.0;
    g.carrier_freq_hz = carrier_freq_hz;
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (N < 1 || M < 1) {
        throw ConfigError("grid: N and M must be >= 1 (got N=" + std::to_string(N) +
                          ", M=" + std::to_string(M) + ")");
    }
    if (!(delta_f > 0)) throw ConfigError("grid: delta_f must be positive");
    if (std::abs(T * delta_f - 1.0) > 1e-12) throw ConfigError("grid: T * delta_f must equal 1");
}

bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.N == b.N && a.M == b.M && a.delta_f == b.delta_f && a.T == b.T;
}

DDFrame::DDFrame(const GridSpec& g, CMatrix s) : grid(g), symbols(std::move(s)) {
    if (symbols.rows() != g.N || symbols.cols() != g.M) {
        throw InvalidInput("DDFrame: symbol array is not N x M");
    }
}

CVector DDFrame::vectorized() const {
    return Eigen::Map<const CVector>(symbols.data(), symbols.size());
}

DDFrame DDFrame::from_vector(const GridSpec& g, const CVector& v) {
    if (v.size() != g.size()) throw InvalidInput("DDFrame::from_vector: length is not M*N");
    return DDFrame(g, Eigen::Map<const CMatrix>(v.data(), g.N, g.M));
}

TFFrame::TFFrame(const GridSpec& g, CMatrix s) : grid(g), samples(std::move(s)) {
    if (samples.rows() != g.N || samples.cols() != g.M) {
        throw InvalidInput("TFFrame: sample array is not N x M");
    }
}

}  // namespace otfsma
