#pragma once

#include <span>
#include <string>
#include <vector>

#include "otfsma/grid.hpp"
#include "otfsma/system_model.hpp"

namespace otfsma {

/// DDRB allocation: contiguous delay columns, contiguous Doppler rows, or interleaved.
enum class Scheme { DelayAxis, DopplerAxis, Interleaved };

std::string to_string(Scheme s);
/// Accepts "delay"/"1", "doppler"/"2", "interleaved"/"3".
Scheme scheme_from_string(const std::string& s);
/// 1, 2 or 3.
int scheme_number(Scheme s);

using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct AllocationPlan {
    Scheme scheme = Scheme::DelayAxis;
    GridSpec grid;
    int K_u = 1;
    int g1 = 1;
    int g2 = 1;
    std::vector<BoolMask> masks;         ///< per user, N x M
    std::vector<std::vector<int>> bins;  ///< per user, ascending flat indices k + N l

    int symbols_per_user() const { return grid.size() / K_u; }
};

/// Throws ConfigError naming the violated divisibility constraint.
AllocationPlan make_plan(Scheme scheme, const GridSpec& grid, int K_u, int g1 = 0, int g2 = 0);

/// Places a user's payload on its bins (ascending flat index), zeros elsewhere.
/// For interleaved plans this order is the reduced-grid vectorization p + (N/g2) q.
DDFrame pack(const AllocationPlan& plan, int user, std::span<const cplx> payload);

/// Reads a user's symbols back out of a frame, in packing order.
CVector unpack(const AllocationPlan& plan, int user, const DDFrame& frame);

/**
 * Composite y = H x + v over the occupied support: x stacks user 0's payload,
 * then user 1's, ..., and H holds the matching columns of each user's matrix.
 */
SystemModel composite_model(const AllocationPlan& plan, std::span<const SparseCMatrix> matrices,
                            double relative_threshold = 0.0);

/**
 * Interleaved-allocation transmit signal of one user: the base
 * (N/g2) x (M/g1) block of the user's full-grid ISFFT, placed on the user's TF
 * region with zeros elsewhere.
 */
TFFrame scheme3_transmit(const AllocationPlan& plan, int user, std::span<const cplx> payload);

}  // namespace otfsma
