#include "omega/rotary.hpp"

#include <cmath>

namespace omega {

RotaryConfig RotaryConfig::with_default_split(int head_dim, double base) {
    RotaryConfig cfg;
    cfg.head_dim = head_dim;
    cfg.base = base;
    const int half = head_dim / 2;
    cfg.split_s = (half + 1) / 2;
    const int rest = half - cfg.split_s;
    cfg.split_r = (rest + 1) / 2;
    cfg.split_c = rest - cfg.split_r;
    return cfg;
}

void RotaryConfig::validate() const {
    if (head_dim < 2 || head_dim % 2 != 0)
        throw_error(errc::config_mismatch, "head_dim must be a positive even number");
    if (split_s < 0 || split_r < 0 || split_c < 0 ||
        split_s + split_r + split_c != head_dim / 2)
        throw_error(errc::config_mismatch,
                    "channel split must be nonnegative and sum to head_dim/2");
    if (!(base > 1.0)) throw_error(errc::config_mismatch, "base must be > 1");
}

HeadVector rotate(const HeadVector& v, const PositionIndex3& p, const RotaryConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(v.size()) != cfg.head_dim)
        throw_error(errc::config_mismatch, "vector length does not match head_dim");

    HeadVector out(v.size());
    const int half = cfg.head_dim / 2;
    for (int k = 0; k < half; ++k) {
        const double coord =
            k < cfg.split_s ? p.s : (k < cfg.split_s + cfg.split_r ? p.r : p.c);
        const double freq = std::pow(cfg.base, -2.0 * k / cfg.head_dim);
        const double angle = coord * freq;
        const double cs = std::cos(angle);
        const double sn = std::sin(angle);
        out[2 * k] = v[2 * k] * cs - v[2 * k + 1] * sn;
        out[2 * k + 1] = v[2 * k] * sn + v[2 * k + 1] * cs;
    }
    return out;
}

double attention_logit(const HeadVector& q, const HeadVector& k, const PositionIndex3& pq,
                       const PositionIndex3& pk, const RotaryConfig& cfg) {
    const HeadVector rq = rotate(q, pq, cfg);
    const HeadVector rk = rotate(k, pk, cfg);
    double dot = 0.0;
    for (std::size_t i = 0; i < rq.size(); ++i) dot += rq[i] * rk[i];
    return dot / std::sqrt(static_cast<double>(cfg.head_dim));
}

std::vector<std::vector<double>> score_matrix(const std::vector<HeadVector>& qs,
                                              const std::vector<HeadVector>& ks,
                                              const IndexAssignment& assignment,
                                              const RotaryConfig& cfg) {
    const std::size_t n = assignment.entries.size();
    if (qs.size() != n || ks.size() != n)
        throw_error(errc::length_mismatch,
                    "query/key counts must match the assignment entry count");

    // Rotate each side once, then take pairwise dots.
    std::vector<HeadVector> rq(n), rk(n);
    for (std::size_t i = 0; i < n; ++i) {
        rq[i] = rotate(qs[i], assignment.entries[i].index, cfg);
        rk[i] = rotate(ks[i], assignment.entries[i].index, cfg);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.head_dim));
    std::vector<std::vector<double>> scores(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int d = 0; d < cfg.head_dim; ++d) dot += rq[i][d] * rk[j][d];
            scores[i][j] = dot * scale;
        }
    }
    return scores;
}

} // namespace omega
