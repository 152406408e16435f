#include "omega/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace omega {

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    EmbeddingMatrix m;
    m.n_rows = rows.size();
    m.n_cols = rows.empty() ? 0 : rows[0].size();
    m.values.reserve(m.n_rows * m.n_cols);
    for (const auto& row : rows) {
        if (row.size() != m.n_cols)
            throw_error(errc::non_finite_input, "ragged embedding rows");
        m.values.insert(m.values.end(), row.begin(), row.end());
    }
    return m;
}

void GaessConfig::validate() const {
    if (bins < 1) throw_error(errc::bad_bins, "bins must be >= 1");
    if (!(gamma_min > 0.0))
        throw_error(errc::bad_config, "gamma_min must be > 0");
    if (!(gamma_max >= gamma_min))
        throw_error(errc::bad_config, "gamma_max must be >= gamma_min");
}

double dimension_entropy(std::span<const double> column, int bins) {
    if (bins < 1) throw_error(errc::bad_bins, "bins must be >= 1");
    if (column.empty()) throw_error(errc::non_finite_input, "empty column");

    double lo = column[0], hi = column[0];
    for (double v : column) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = hi - lo;
    if (range == 0.0) return 0.0; // constant dimension carries no information

    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (double v : column) {
        // Uniform bins over [lo, hi]; the top edge belongs to the last bin.
        auto k = static_cast<std::int64_t>((v - lo) / range * bins);
        k = std::clamp<std::int64_t>(k, 0, bins - 1);
        ++counts[static_cast<std::size_t>(k)];
    }

    const double n = static_cast<double>(column.size());
    double h = 0.0;
    for (std::int64_t count : counts) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h;
}

EntropyReport embedding_entropy(const EmbeddingMatrix& z, int bins) {
    if (z.n_rows < 1 || z.n_cols < 1)
        throw_error(errc::non_finite_input, "embedding matrix must be at least 1x1");
    for (double v : z.values)
        if (!std::isfinite(v))
            throw_error(errc::non_finite_input, "embedding matrix has non-finite entries");

    EntropyReport report;
    report.per_dim.resize(z.n_cols);
    std::vector<double> column(z.n_rows);
    for (std::size_t j = 0; j < z.n_cols; ++j) {
        for (std::size_t i = 0; i < z.n_rows; ++i) column[i] = z.at(i, j);
        report.per_dim[j] = dimension_entropy(column, bins);
    }
    double total = 0.0;
    for (double h : report.per_dim) total += h;
    report.h_bits = total / static_cast<double>(z.n_cols);
    return report;
}

double density_ratio(double h_vis, double h_txt) {
    if (h_vis < 0.0 || h_txt < 0.0)
        throw_error(errc::non_finite_input, "entropies must be nonnegative");
    if (h_txt == 0.0)
        throw_error(errc::zero_text_entropy, "text entropy is zero, ratio undefined");
    return std::sqrt(h_vis / h_txt);
}

double compute_gamma(double h_vis, double h_txt, const GaessConfig& cfg) {
    cfg.validate();
    if (h_vis < 0.0 || h_txt < 0.0)
        throw_error(errc::non_finite_input, "entropies must be nonnegative");
    double rho;
    if (h_txt == 0.0) {
        rho = h_vis > 0.0 ? cfg.gamma_max : 1.0;
    } else {
        rho = std::sqrt(h_vis / h_txt);
    }
    return std::clamp(rho, cfg.gamma_min, cfg.gamma_max);
}

} // namespace omega
