#pragma once

#include "otfsma/grid.hpp"

namespace otfsma {

/// Direction of the complex exponential in a DFT: Forward uses e^{-j2pi nk/L}.
enum class DftSign { Forward, Inverse };

/// Unnormalized length-L DFT of a vector, any L (mixed-radix).
CVector dft(const CVector& x, DftSign sign);

/// Unitary DFT (1/sqrt(L) scaling).
CVector unitary_dft(const CVector& x, DftSign sign);

/// Unnormalized DFT applied along every column (down the rows) of a matrix.
CMatrix dft_columns(const CMatrix& x, DftSign sign);

/// Unnormalized DFT applied along every row of a matrix.
CMatrix dft_rows(const CMatrix& x, DftSign sign);

}  // namespace otfsma
