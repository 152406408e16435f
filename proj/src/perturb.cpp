#include "omega/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "omega/rng.hpp"

namespace omega {

namespace {

// First `take` elements of a seeded Fisher-Yates pass over `values`:
// a uniform draw of `take` distinct elements, order included.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> values,
                                                    std::size_t take, SplitMix64& rng) {
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.bounded(values.size() - i);
        std::swap(values[i], values[j]);
    }
    values.resize(take);
    return values;
}

std::vector<std::size_t> uniform_permutation(std::size_t n, SplitMix64& rng) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t j = i + rng.bounded(n - i);
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

double frobenius(const std::vector<std::vector<double>>& m) {
    double sum = 0.0;
    for (const auto& row : m)
        for (double v : row) sum += v * v;
    return std::sqrt(sum);
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ (a + 0x9E3779B97F4A7C15ull));
    h = mix64(h ^ (b + 0xBF58476D1CE4E5B9ull));
    return h;
}

HeadVector random_unit_vector(SplitMix64& rng, int dim) {
    HeadVector v(dim);
    double norm2 = 0.0;
    for (auto& x : v) {
        x = rng.next_gaussian();
        norm2 += x * x;
    }
    if (norm2 == 0.0) {
        v[0] = 1.0;
        return v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

} // namespace

IndexAssignment insert_visual_gaps(const IndexAssignment& assignment, const PerturbSpec& spec) {
    if (spec.kind != PerturbKind::visual_gaps)
        throw_error(errc::bad_config, "spec kind is not visual_gaps");
    if (spec.n_gaps < 0) throw_error(errc::bad_config, "n_gaps must be nonnegative");
    if (spec.gap_size < 1) throw_error(errc::bad_config, "gap_size must be positive");
    for (const auto& e : assignment.entries)
        if (e.modality != Modality::text)
            throw_error(errc::not_text_only,
                        "gap insertion requires a text-only assignment");

    const std::size_t n = assignment.entries.size();
    // Insertion slots sit before each token, so every gap shifts at least one
    // token and the final token accumulates all of them.
    if (static_cast<std::size_t>(spec.n_gaps) > n)
        throw_error(errc::too_many_gaps, "more gaps than insertion slots");

    SplitMix64 rng(spec.seed);
    std::vector<std::size_t> slots(n);
    for (std::size_t i = 0; i < n; ++i) slots[i] = i;
    auto chosen = sample_without_replacement(std::move(slots),
                                             static_cast<std::size_t>(spec.n_gaps), rng);
    std::sort(chosen.begin(), chosen.end());

    IndexAssignment out = assignment;
    std::size_t gaps_before = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (gaps_before < chosen.size() && chosen[gaps_before] <= i) ++gaps_before;
        out.entries[i].index.s +=
            static_cast<double>(gaps_before) * static_cast<double>(spec.gap_size);
    }
    return out;
}

IndexAssignment shuffle_visual_indices(const IndexAssignment& assignment,
                                       const PerturbSpec& spec) {
    if (spec.kind != PerturbKind::shuffle)
        throw_error(errc::bad_config, "spec kind is not shuffle");
    if (!(spec.proportion >= 0.0 && spec.proportion <= 1.0))
        throw_error(errc::bad_config, "proportion must lie in [0, 1]");

    std::vector<std::size_t> visual;
    for (std::size_t i = 0; i < assignment.entries.size(); ++i)
        if (assignment.entries[i].modality == Modality::visual) visual.push_back(i);

    // Round half up.
    const auto selected_count = static_cast<std::size_t>(
        std::floor(spec.proportion * static_cast<double>(visual.size()) + 0.5));

    SplitMix64 rng(spec.seed);
    auto selected = sample_without_replacement(std::move(visual), selected_count, rng);
    std::sort(selected.begin(), selected.end());
    const auto perm = uniform_permutation(selected.size(), rng);

    IndexAssignment out = assignment;
    for (std::size_t i = 0; i < selected.size(); ++i)
        out.entries[selected[i]].index = assignment.entries[selected[perm[i]]].index;
    return out;
}

IndexAssignment perturb(const IndexAssignment& assignment, const PerturbSpec& spec) {
    return spec.kind == PerturbKind::visual_gaps ? insert_visual_gaps(assignment, spec)
                                                 : shuffle_visual_indices(assignment, spec);
}

std::vector<SweepRow> run_sweep(const MultimodalSequence& seq, const SweepConfig& cfg) {
    cfg.rotary.validate();
    if (cfg.trials < 1) throw_error(errc::bad_config, "trials must be >= 1");
    if (cfg.levels.empty()) throw_error(errc::bad_config, "no perturbation levels given");

    const IndexAssignment clean = derive(seq, cfg.strategy, cfg.derive_opts);
    const std::size_t n = clean.entries.size();

    std::vector<SweepRow> rows;
    rows.reserve(cfg.levels.size() * static_cast<std::size_t>(cfg.trials));
    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
        const double level = cfg.levels[li];
        for (int trial = 0; trial < cfg.trials; ++trial) {
            SplitMix64 rng(sub_seed(cfg.seed, li, static_cast<std::uint64_t>(trial)));

            PerturbSpec pspec;
            pspec.kind = cfg.kind;
            pspec.seed = rng.next();
            if (cfg.kind == PerturbKind::visual_gaps) {
                const double rounded = std::floor(level + 0.5);
                if (rounded != level || level < 0.0 || level > 1e9)
                    throw_error(errc::bad_config,
                                "gap levels must be small nonnegative integers");
                pspec.n_gaps = static_cast<int>(rounded);
                pspec.gap_size = cfg.gap_size;
            } else {
                pspec.proportion = level;
            }

            std::vector<HeadVector> qs(n), ks(n);
            for (std::size_t i = 0; i < n; ++i) qs[i] = random_unit_vector(rng, cfg.rotary.head_dim);
            for (std::size_t i = 0; i < n; ++i) ks[i] = random_unit_vector(rng, cfg.rotary.head_dim);

            const auto perturbed = perturb(clean, pspec);
            const auto base = score_matrix(qs, ks, clean, cfg.rotary);
            const auto moved = score_matrix(qs, ks, perturbed, cfg.rotary);

            std::vector<std::vector<double>> diff(n, std::vector<double>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) diff[i][j] = moved[i][j] - base[i][j];
            const double denom = frobenius(base);
            const double divergence = denom == 0.0 ? 0.0 : frobenius(diff) / denom;
            rows.push_back({level, trial, divergence});
        }
    }
    return rows;
}

} // namespace omega
