#pragma once

#include <vector>

#include "omega/derive.hpp"
#include "omega/seq.hpp"

namespace omega {

/// Rotary applicator driven by 3-component indices. The head_dim/2 channel
/// pairs are partitioned across the three index axes: the first split_s
/// pairs rotate by the s component, the next split_r by r, the last split_c
/// by c. Frequencies use the global pair number k (angle for pair k is
/// coord * base^(-2k/head_dim)), so with split (half,0,0) this reduces to
/// standard 1D rotary embedding.
struct RotaryConfig {
    int head_dim = 16;
    int split_s = 4;
    int split_r = 2;
    int split_c = 2;
    double base = 10000.0;

    /// Allocates ceil(half/2) pairs to s and splits the rest between r and c
    /// (r gets the odd one).
    static RotaryConfig with_default_split(int head_dim, double base = 10000.0);

    void validate() const; // throws config_mismatch
};

using HeadVector = std::vector<double>;

/// Rotates each channel pair (2k, 2k+1) by its axis coordinate times the
/// pair frequency. Norm-preserving.
HeadVector rotate(const HeadVector& v, const PositionIndex3& p, const RotaryConfig& cfg);

/// dot(rotate(q,pq), rotate(k,pk)) / sqrt(head_dim). Depends only on the
/// per-axis index differences pq - pk.
double attention_logit(const HeadVector& q, const HeadVector& k,
                       const PositionIndex3& pq, const PositionIndex3& pk,
                       const RotaryConfig& cfg);

/// Full pairwise logit matrix (row i: query i against every key) using the
/// assignment's index for both sides. Raw logits, no softmax.
std::vector<std::vector<double>> score_matrix(const std::vector<HeadVector>& qs,
                                              const std::vector<HeadVector>& ks,
                                              const IndexAssignment& assignment,
                                              const RotaryConfig& cfg);

} // namespace omega
