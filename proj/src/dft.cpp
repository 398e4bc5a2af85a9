#include "otfsma/dft.hpp"

#include <cmath>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace otfsma {

namespace {

// Eigen::FFT caches twiddles per instance; one instance per thread.
Eigen::FFT<double>& engine() {
    thread_local Eigen::FFT<double> fft = [] {
        Eigen::FFT<double> f;
        f.SetFlag(Eigen::FFT<double>::Unscaled);
        return f;
    }();
    return fft;
}

void run_fft(const cplx* in, cplx* out, int len, DftSign sign) {
    if (len == 1) {
        out[0] = in[0];
        return;
    }
    if (sign == DftSign::Forward) {
        engine().fwd(out, in, len);
    } else {
        engine().inv(out, in, len);
    }
}

}  // namespace

CVector dft(const CVector& x, DftSign sign) {
    CVector out(x.size());
    if (x.size() > 0) run_fft(x.data(), out.data(), static_cast<int>(x.size()), sign);
    return out;
}

CVector unitary_dft(const CVector& x, DftSign sign) {
    CVector out = dft(x, sign);
    if (x.size() > 0) out /= std::sqrt(static_cast<double>(x.size()));
    return out;
}

CMatrix dft_columns(const CMatrix& x, DftSign sign) {
    CMatrix out(x.rows(), x.cols());
    const int len = static_cast<int>(x.rows());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        run_fft(x.col(c).data(), out.col(c).data(), len, sign);
    }
    return out;
}

CMatrix dft_rows(const CMatrix& x, DftSign sign) {
    const int len = static_cast<int>(x.cols());
    std::vector<cplx> in(len), res(len);
    CMatrix out(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (int c = 0; c < len; ++c) in[c] = x(r, c);
        run_fft(in.data(), res.data(), len, sign);
        for (int c = 0; c < len; ++c) out(r, c) = res[c];
    }
    return out;
}

}  // namespace otfsma
