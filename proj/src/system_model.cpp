#include "otfsma/system_model.hpp"

#include <algorithm>

namespace otfsma {

int SystemModel::users() const {
    if (column_user.empty()) return 0;
    return *std::max_element(column_user.begin(), column_user.end()) + 1;
}

SystemModel SystemModel::from_dense(CMatrix H, std::vector<int> column_user, double relative_threshold) {
    if (static_cast<Eigen::Index>(column_user.size()) != H.cols()) {
        throw InvalidInput("SystemModel: column_user length differs from column count");
    }
    SystemModel m;
    m.H = std::move(H);
    m.column_user = std::move(column_user);
    m.row_support.assign(m.H.rows(), {});
    m.col_support.assign(m.H.cols(), {});
    for (Eigen::Index r = 0; r < m.H.cols(); ++r) {
        const double col_max = m.H.col(r).cwiseAbs().maxCoeff();
        const double floor = relative_threshold > 0.0 ? relative_threshold * col_max : 0.0;
        for (Eigen::Index s = 0; s < m.H.rows(); ++s) {
            const double mag = std::abs(m.H(s, r));
            if (mag > 0.0 && mag >= floor) {
                m.col_support[r].push_back(static_cast<int>(s));
                m.row_support[s].push_back(static_cast<int>(r));
            }
        }
    }
    return m;
}

}  // namespace otfsma
