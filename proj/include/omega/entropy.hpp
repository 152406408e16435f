#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "omega/error.hpp"

namespace omega {

/// Row-major N x d matrix of token embeddings.
struct EmbeddingMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values; // n_rows * n_cols, row-major

    double at(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * n_cols + j]; }

    static EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows);
};

/// Histogram bin count and clamp bounds for the adaptive scaling factor.
struct GaessConfig {
    int bins = 256;
    double gamma_min = 0.25;
    double gamma_max = 3.0;

    void validate() const;
};

/// Mean per-dimension histogram entropy, in bits per dimension.
struct EntropyReport {
    double h_bits = 0.0;
    std::vector<double> per_dim;
};

/// Histogram entropy of one embedding dimension: the value range is split
/// into `bins` uniform bins (a value equal to the maximum falls in the last
/// bin), counts are normalized to probabilities and -sum p*log2(p) is
/// returned. A constant column has zero entropy.
double dimension_entropy(std::span<const double> column, int bins);

/// Per-column dimension_entropy plus the arithmetic mean over columns.
/// Throws non_finite_input on NaN/Inf entries.
EntropyReport embedding_entropy(const EmbeddingMatrix& z, int bins);

/// Information density ratio sqrt(h_vis / h_txt): the per-step scaling that
/// equates visual information per unit grid area with textual information
/// per unit sequence length. Throws zero_text_entropy when h_txt == 0.
double density_ratio(double h_vis, double h_txt);

/// Clamped scaling factor: clamp(density_ratio, gamma_min, gamma_max).
/// Total function: h_txt == 0 with h_vis > 0 yields gamma_max; both zero
/// yields clamp(1).
double compute_gamma(double h_vis, double h_txt, const GaessConfig& cfg = {});

} // namespace omega
