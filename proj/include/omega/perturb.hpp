#pragma once

#include <cstdint>
#include <vector>

#include "omega/derive.hpp"
#include "omega/rotary.hpp"

namespace omega {

enum class PerturbKind { visual_gaps, shuffle };

/// Seeded perturbation of an index assignment. Only the fields of the chosen
/// kind are read; the seed always is.
struct PerturbSpec {
    PerturbKind kind = PerturbKind::visual_gaps;
    int n_gaps = 0;      // visual_gaps
    int gap_size = 1;    // visual_gaps: index-space width of one gap
    double proportion = 0.0; // shuffle: fraction of visual tokens, in [0,1]
    std::uint64_t seed = 0;
};

/// Simulates images interleaved into a text-only sequence: n_gaps distinct
/// insertion slots are drawn (seeded, uniform, without replacement) from the
/// n slots preceding each token, and every token after a slot has its
/// s component shifted by gap_size per preceding gap. With a dense 1D input
/// the last token always ends at (n-1) + n_gaps*gap_size.
/// Throws not_text_only / too_many_gaps.
IndexAssignment insert_visual_gaps(const IndexAssignment& assignment, const PerturbSpec& spec);

/// Selects round(proportion * n_visual) visual tokens (seeded, uniform,
/// without replacement; half-up rounding) and permutes their index triples
/// among themselves with a seeded uniform permutation. Everything else is
/// untouched.
IndexAssignment shuffle_visual_indices(const IndexAssignment& assignment, const PerturbSpec& spec);

/// Dispatch on spec.kind.
IndexAssignment perturb(const IndexAssignment& assignment, const PerturbSpec& spec);

struct SweepRow {
    double level = 0.0; // n_gaps for gap sweeps, proportion for shuffles
    int trial = 0;
    double divergence = 0.0;
};

struct SweepConfig {
    Strategy strategy = Strategy::one_d;
    DeriveOptions derive_opts;
    PerturbKind kind = PerturbKind::visual_gaps;
    std::vector<double> levels;
    int gap_size = 1; // visual_gaps only
    int trials = 1;
    std::uint64_t seed = 0;
    RotaryConfig rotary;
};

/// For each (level, trial): draws random unit query/key vectors from a
/// per-trial sub-seed, scores the clean and the perturbed assignment, and
/// records divergence = ||S_pert - S_clean||_F / ||S_clean||_F.
/// Fully deterministic in (config, seed); rows ordered by (level, trial).
std::vector<SweepRow> run_sweep(const MultimodalSequence& seq, const SweepConfig& cfg);

} // namespace omega
