#pragma once

#include <vector>

#include "otfsma/grid.hpp"

namespace otfsma {

/**
 * Effective linear model y = H x + v seen by the detectors.
 *
 * row_support[s] lists the columns coupled to observation s and col_support[r]
 * the rows coupled to variable r; both are ascending. column_user[r] names the
 * user that transmits variable r.
 */
struct SystemModel {
    CMatrix H;
    std::vector<std::vector<int>> row_support;
    std::vector<std::vector<int>> col_support;
    std::vector<int> column_user;

    int rows() const { return static_cast<int>(H.rows()); }
    int cols() const { return static_cast<int>(H.cols()); }
    int users() const;

    /**
     * Builds a model and its supports. An entry is kept when it is nonzero and,
     * for relative_threshold > 0, at least relative_threshold times its
     * column's largest magnitude.
     */
    static SystemModel from_dense(CMatrix H, std::vector<int> column_user,
                                  double relative_threshold = 0.0);
};

}  // namespace otfsma
