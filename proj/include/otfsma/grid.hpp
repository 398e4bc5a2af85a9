#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace otfsma {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseCMatrix = Eigen::SparseMatrix<cplx>;

/// Raised when a configuration or geometry constraint is violated.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an argument has the wrong shape or length.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Delay-Doppler grid geometry.
 *
 * N Doppler bins of width 1/(N*T) and M delay bins of width 1/(M*delta_f),
 * with T*delta_f = 1. Element (k, l) of a frame vectorizes to k + N*l, which
 * is exactly Eigen's column-major layout of an N x M matrix.
 */
struct GridSpec {
    int N = 1;
    int M = 1;
    double delta_f = 15e3;
    double T = 1.0 / 15e3;
    double carrier_freq_hz = 4e9;

    static GridSpec make(int N, int M, double delta_f_hz = 15e3, double carrier_freq_hz = 4e9);

    void validate() const;

    int size() const { return N * M; }
    int flat(int k, int l) const { return k + N * l; }
    double doppler_resolution() const { return 1.0 / (N * T); }
    double delay_resolution() const { return 1.0 / (M * delta_f); }
};

bool operator==(const GridSpec& a, const GridSpec& b);

/// Delay-Doppler symbols, indexed (k, l) = (Doppler, delay).
struct DDFrame {
    GridSpec grid;
    CMatrix symbols;

    DDFrame() = default;
    explicit DDFrame(const GridSpec& g) : grid(g), symbols(CMatrix::Zero(g.N, g.M)) {}
    DDFrame(const GridSpec& g, CMatrix s);

    CVector vectorized() const;
    static DDFrame from_vector(const GridSpec& g, const CVector& v);
};

/// Time-frequency samples, indexed (n, m) = (time, subcarrier).
struct TFFrame {
    GridSpec grid;
    CMatrix samples;

    TFFrame() = default;
    explicit TFFrame(const GridSpec& g) : grid(g), samples(CMatrix::Zero(g.N, g.M)) {}
    TFFrame(const GridSpec& g, CMatrix s);
};

inline int positive_mod(int a, int n) {
    const int r = a % n;
    return r < 0 ? r + n : r;
}

}  // namespace otfsma
