#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otfsma/system_model.hpp"

namespace otfsma {

/// Unit-average-energy constellation with Gray bit labels.
struct Alphabet {
    std::string name;
    std::vector<cplx> points;
    std::vector<unsigned> labels;  ///< bit pattern carried by points[i]
    int bits_per_symbol = 1;

    int size() const { return static_cast<int>(points.size()); }
    bool is_real() const;

    static Alphabet bpsk();   ///< bit 0 -> +1
    static Alphabet qpsk();
    static Alphabet qam16();
    static Alphabet from_name(const std::string& name);

    /// Number of differing bits between the labels of two points.
    int bit_errors(int sent, int detected) const;
};

/// Explicit refusal when the exhaustive search would be too large.
class SearchSpaceExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MlOptions {
    int max_search_bits = 20;  ///< refuse when d*log2|A| exceeds this
};

/**
 * Exhaustive joint ML: argmin over x in A^d of ||y - Hx||^2.
 *
 * Candidates are visited in reflected Gray order so each step changes one
 * symbol and the metric is updated in O(d). Ties go to the candidate with the
 * lowest lexicographic index (x_0 most significant). Returns alphabet indices.
 */
std::vector<int> ml_detect(const SystemModel& model, const CVector& y, const Alphabet& alphabet,
                           const MlOptions& options = {});

struct MpConfig {
    int n_max = 30;
    double delta = 0.7;     ///< damping factor in (0, 1]
    double epsilon = 1e-3;  ///< stop when the largest pmf change is below this
    double noise_var = 1.0;

    void validate() const;
};

struct MpResult {
    std::vector<int> decisions;             ///< alphabet index per variable
    std::vector<std::vector<double>> pmfs;  ///< final p_r over the alphabet, per variable
    int iterations = 0;
    bool converged = false;
};

/// Called after every iteration with the damped variable-to-observation pmfs,
/// flattened edge-major (|A| entries per edge, edges grouped by variable).
using MpObserver = std::function<void(int iteration, const std::vector<double>& messages)>;

/**
 * Message-passing detection on the factor graph of y = Hx + v.
 *
 * Observation-to-variable messages are Gaussian approximations of the
 * interference plus noise; variable-to-observation pmfs are leave-one-out
 * likelihood products (log domain, max-normalized), damped as
 *   p_next = delta * fresh + (1 - delta) * p_current.
 * Decisions use the full product over each variable's observations.
 */
MpResult mp_detect(const SystemModel& model, const CVector& y, const Alphabet& alphabet,
                   const MpConfig& cfg, const MpObserver& observer = {});

enum class DetectorKind { ML, MP };

std::string to_string(DetectorKind d);
DetectorKind detector_from_string(const std::string& s);

/**
 * Independent detection of each user's reduced interleaved-allocation model.
 * cfg.noise_var is the per-bin data noise variance; it is scaled by 1/(g1 g2)
 * for the reduced models.
 */
std::vector<std::vector<int>> detect_per_user_scheme3(std::span<const CMatrix> models,
                                                      std::span<const CVector> received,
                                                      const Alphabet& alphabet, DetectorKind method,
                                                      const MpConfig& cfg, int g1, int g2,
                                                      const MlOptions& ml_options = {});

}  // namespace otfsma
