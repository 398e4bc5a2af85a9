#include "otfsma/detectors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace otfsma {

bool Alphabet::is_real() const {
    return std::all_of(points.begin(), points.end(), [](cplx p) { return p.imag() == 0.0; });
}

Alphabet Alphabet::bpsk() {
    return {"bpsk", {cplx{1.0, 0.0}, cplx{-1.0, 0.0}}, {0u, 1u}, 1};
}

Alphabet Alphabet::qpsk() {
    Alphabet a{"qpsk", {}, {}, 2};
    const double s = 1.0 / std::sqrt(2.0);
    for (unsigned bits = 0; bits < 4; ++bits) {
        const double re = (bits & 2u) ? -s : s;
        const double im = (bits & 1u) ? -s : s;
        a.points.emplace_back(re, im);
        a.labels.push_back(bits);
    }
    return a;
}

Alphabet Alphabet::qam16() {
    // Gray per axis: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    auto level = [](unsigned two_bits) {
        switch (two_bits) {
            case 0u: return -3.0;
            case 1u: return -1.0;
            case 3u: return 1.0;
            default: return 3.0;
        }
    };
    Alphabet a{"qam16", {}, {}, 4};
    const double s = 1.0 / std::sqrt(10.0);
    for (unsigned bits = 0; bits < 16; ++bits) {
        a.points.emplace_back(s * level(bits >> 2), s * level(bits & 3u));
        a.labels.push_back(bits);
    }
    return a;
}

Alphabet Alphabet::from_name(const std::string& name) {
    if (name == "bpsk") return bpsk();
    if (name == "qpsk") return qpsk();
    if (name == "qam16" || name == "16qam") return qam16();
    throw std::invalid_argument("unknown alphabet '" + name + "'");
}

int Alphabet::bit_errors(int sent, int detected) const {
    return std::popcount(labels[sent] ^ labels[detected]);
}

// ---------------------------------------------------------------------------
// ML

namespace {

double real_part(double v) { return v; }
double real_part(cplx v) { return v.real(); }
double conj_mul_re(double a, double b) { return a * b; }
double conj_mul_re(cplx a, cplx b) { return (std::conj(a) * b).real(); }
double norm2(double v) { return v * v; }
double norm2(cplx v) { return std::norm(v); }

template <typename Scalar>
std::vector<int> gray_search(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& G,
                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                             const std::vector<Scalar>& pts) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const int d = static_cast<int>(b.size());
    const int Q = static_cast<int>(pts.size());

    std::vector<int> digit(d, 0);
    std::vector<int> dir(d, 1);
    Vec x = Vec::Constant(d, pts[0]);

    auto full_metric = [&](Vec& z) {
        z = G * x;
        double f = 0.0;
        for (int v = 0; v < d; ++v) f += -2.0 * conj_mul_re(b[v], x[v]) + conj_mul_re(x[v], z[v]);
        return f;
    };
    auto lex_index_less = [&](const std::vector<int>& a, const std::vector<int>& c) {
        return std::lexicographical_compare(a.begin(), a.end(), c.begin(), c.end());
    };

    Vec z;
    double f = full_metric(z);
    double best = f;
    std::vector<int> best_digits = digit;

    long double total = std::pow(static_cast<long double>(Q), d);
    const auto steps = static_cast<std::uint64_t>(total);
    for (std::uint64_t t = 1; t < steps; ++t) {
        // the digit that moves at step t is the number of trailing base-Q zeros of t
        std::uint64_t tt = t;
        int j = 0;
        while (tt % Q == 0) {
            tt /= Q;
            ++j;
        }
        const int v = d - 1 - j;  // least significant digit is the last variable
        const int old = digit[v];
        const int nxt = old + dir[v];
        digit[v] = nxt;
        if (nxt == 0 || nxt == Q - 1) dir[v] = -dir[v];

        const Scalar delta = pts[nxt] - pts[old];
        f += -2.0 * conj_mul_re(delta, b[v]) + 2.0 * conj_mul_re(delta, z[v]) + norm2(delta) * real_part(G(v, v));
        z += G.col(v) * delta;
        x[v] = pts[nxt];

        if ((t & 4095u) == 0) f = full_metric(z);

        if (f < best || (f == best && lex_index_less(digit, best_digits))) {
            best = f;
            best_digits = digit;
        }
    }
    return best_digits;
}

}  // namespace

std::vector<int> ml_detect(const SystemModel& model, const CVector& y, const Alphabet& alphabet,
                           const MlOptions& options) {
    if (y.size() != model.H.rows()) throw InvalidInput("ml_detect: y length differs from H rows");
    const int d = model.cols();
    if (d == 0) return {};
    const double bits = d * std::log2(static_cast<double>(alphabet.size()));
    if (bits > options.max_search_bits + 1e-9) {
        throw SearchSpaceExceeded("ml_detect: search space of 2^" + std::to_string(bits) +
                                  " hypotheses exceeds the limit 2^" + std::to_string(options.max_search_bits));
    }

    const CMatrix G = model.H.adjoint() * model.H;
    const CVector b = model.H.adjoint() * y;
    if (alphabet.is_real()) {
        std::vector<double> pts;
        for (cplx p : alphabet.points) pts.push_back(p.real());
        return gray_search<double>(G.real(), b.real(), pts);
    }
    return gray_search<cplx>(G, b, alphabet.points);
}

// ---------------------------------------------------------------------------
// Message passing

void MpConfig::validate() const {
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("mp: damping factor must be in (0, 1]");
    if (!(epsilon > 0.0)) throw ConfigError("mp: epsilon must be positive");
    if (n_max < 1) throw ConfigError("mp: n_max must be >= 1");
    if (!(noise_var > 0.0)) throw ConfigError("mp: noise variance must be positive");
}

namespace {

struct FactorGraph {
    // edges grouped by variable; edge e couples variable edge_var[e] with observation edge_obs[e]
    std::vector<int> edge_var, edge_obs;
    std::vector<cplx> edge_h;
    std::vector<int> var_begin;              // edges of variable r: [var_begin[r], var_begin[r+1])
    std::vector<std::vector<int>> obs_edges; // edges touching observation s
};

FactorGraph make_graph(const SystemModel& model) {
    FactorGraph g;
    const int R = model.cols();
    g.var_begin.assign(R + 1, 0);
    g.obs_edges.assign(model.rows(), {});
    for (int r = 0; r < R; ++r) {
        g.var_begin[r] = static_cast<int>(g.edge_var.size());
        for (int s : model.col_support[r]) {
            g.obs_edges[s].push_back(static_cast<int>(g.edge_var.size()));
            g.edge_var.push_back(r);
            g.edge_obs.push_back(s);
            g.edge_h.push_back(model.H(s, r));
        }
    }
    g.var_begin[R] = static_cast<int>(g.edge_var.size());
    return g;
}

// Log-likelihoods log Pr(y_s | x_r = a_j) for every edge, given the current pmfs.
void edge_loglik(const FactorGraph& g, const CVector& y, const Alphabet& A, double noise_var,
                 const std::vector<double>& p, std::vector<double>& L) {
    const int Q = A.size();
    const std::size_t E = g.edge_var.size();
    std::vector<cplx> mean_e(E);
    std::vector<double> var_e(E);
    for (std::size_t e = 0; e < E; ++e) {
        cplx m{0.0, 0.0};
        double m2 = 0.0;
        for (int j = 0; j < Q; ++j) {
            m += p[e * Q + j] * A.points[j];
            m2 += p[e * Q + j] * std::norm(A.points[j]);
        }
        const cplx hm = g.edge_h[e] * m;
        mean_e[e] = hm;
        var_e[e] = std::norm(g.edge_h[e]) * m2 - std::norm(hm);
    }
    for (std::size_t s = 0; s < g.obs_edges.size(); ++s) {
        cplx mt{0.0, 0.0};
        double vt = 0.0;
        for (int e : g.obs_edges[s]) {
            mt += mean_e[e];
            vt += var_e[e];
        }
        for (int e : g.obs_edges[s]) {
            const cplx mu = mt - mean_e[e];
            const double var = std::max(vt - var_e[e], 0.0) + noise_var;
            const cplx base = y[static_cast<Eigen::Index>(s)] - mu;
            for (int j = 0; j < Q; ++j) {
                L[static_cast<std::size_t>(e) * Q + j] = -std::norm(base - g.edge_h[e] * A.points[j]) / var;
            }
        }
    }
}

}  // namespace

MpResult mp_detect(const SystemModel& model, const CVector& y, const Alphabet& alphabet,
                   const MpConfig& cfg, const MpObserver& observer) {
    cfg.validate();
    if (y.size() != model.H.rows()) throw InvalidInput("mp_detect: y length differs from H rows");
    const FactorGraph g = make_graph(model);
    const int Q = alphabet.size();
    const int R = model.cols();
    const std::size_t E = g.edge_var.size();

    std::vector<double> p(E * Q, 1.0 / Q);
    std::vector<double> next(E * Q);
    std::vector<double> L(E * Q);
    std::vector<double> S(Q);

    MpResult result;
    for (int it = 1; it <= cfg.n_max; ++it) {
        edge_loglik(g, y, alphabet, cfg.noise_var, p, L);
        double max_change = 0.0;
        for (int r = 0; r < R; ++r) {
            std::fill(S.begin(), S.end(), 0.0);
            for (int e = g.var_begin[r]; e < g.var_begin[r + 1]; ++e) {
                for (int j = 0; j < Q; ++j) S[j] += L[static_cast<std::size_t>(e) * Q + j];
            }
            for (int e = g.var_begin[r]; e < g.var_begin[r + 1]; ++e) {
                const std::size_t off = static_cast<std::size_t>(e) * Q;
                double mx = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < Q; ++j) mx = std::max(mx, S[j] - L[off + j]);
                double sum = 0.0;
                for (int j = 0; j < Q; ++j) {
                    next[off + j] = std::exp(S[j] - L[off + j] - mx);
                    sum += next[off + j];
                }
                for (int j = 0; j < Q; ++j) {
                    const double fresh = next[off + j] / sum;
                    next[off + j] = cfg.delta * fresh + (1.0 - cfg.delta) * p[off + j];
                    max_change = std::max(max_change, std::abs(next[off + j] - p[off + j]));
                }
            }
        }
        p.swap(next);
        result.iterations = it;
        if (observer) observer(it, p);
        if (max_change < cfg.epsilon) {
            result.converged = true;
            break;
        }
    }

    edge_loglik(g, y, alphabet, cfg.noise_var, p, L);
    result.decisions.assign(R, 0);
    result.pmfs.assign(R, std::vector<double>(Q, 1.0 / Q));
    for (int r = 0; r < R; ++r) {
        std::fill(S.begin(), S.end(), 0.0);
        for (int e = g.var_begin[r]; e < g.var_begin[r + 1]; ++e) {
            for (int j = 0; j < Q; ++j) S[j] += L[static_cast<std::size_t>(e) * Q + j];
        }
        const double mx = *std::max_element(S.begin(), S.end());
        double sum = 0.0;
        auto& pr = result.pmfs[r];
        for (int j = 0; j < Q; ++j) {
            pr[j] = std::exp(S[j] - mx);
            sum += pr[j];
        }
        for (auto& v : pr) v /= sum;
        result.decisions[r] = static_cast<int>(std::max_element(pr.begin(), pr.end()) - pr.begin());
    }
    return result;
}

std::string to_string(DetectorKind d) { return d == DetectorKind::ML ? "ml" : "mp"; }

DetectorKind detector_from_string(const std::string& s) {
    if (s == "ml") return DetectorKind::ML;
    if (s == "mp") return DetectorKind::MP;
    throw ConfigError("unknown detector '" + s + "' (expected ml or mp)");
}

std::vector<std::vector<int>> detect_per_user_scheme3(std::span<const CMatrix> models,
                                                      std::span<const CVector> received,
                                                      const Alphabet& alphabet, DetectorKind method,
                                                      const MpConfig& cfg, int g1, int g2,
                                                      const MlOptions& ml_options) {
    if (models.size() != received.size()) throw InvalidInput("detect_per_user_scheme3: one y per model");
    MpConfig scaled = cfg;
    scaled.noise_var = cfg.noise_var / (g1 * g2);
    std::vector<std::vector<int>> out;
    out.reserve(models.size());
    for (std::size_t u = 0; u < models.size(); ++u) {
        const SystemModel m =
            SystemModel::from_dense(models[u], std::vector<int>(models[u].cols(), static_cast<int>(u)));
        if (method == DetectorKind::ML) {
            out.push_back(ml_detect(m, received[u], alphabet, ml_options));
        } else {
            out.push_back(mp_detect(m, received[u], alphabet, scaled).decisions);
        }
    }
    return out;
}

}  // namespace otfsma
