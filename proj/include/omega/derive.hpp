#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omega/entropy.hpp"
#include "omega/seq.hpp"

namespace omega {

enum class Strategy { no_pe, one_d, two_d, mipe, v2pe, mspe, omega };

/// Canonical tags: "nope", "1d", "2d", "mipe", "v2pe", "mspe", "omega".
const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& name);

/// Fractional sequence-axis increment assigned to visual tokens. Text tokens
/// always advance the counter by 1.
struct V2peConfig {
    double visual_step = 1.0 / 16.0;

    void validate() const; // throws non_positive_step / step_out_of_range
};

struct IndexEntry {
    std::size_t seq_pos = 0;
    Modality modality = Modality::text;
    PositionIndex3 index;
};

/// Anchor position of one image's placeholder in the reduced sequence.
/// Reported as metadata: placeholders are bookkeeping, not output tokens.
struct PlaceholderIndex {
    int image_id = 0;
    std::size_t mprime_pos = 0;
};

/// Per-token strategy output, one entry per input token in seq_pos order.
/// `strategy` is absent only on assignments parsed from files that do not
/// record it (the CSV format stores entries and gamma, nothing else).
struct IndexAssignment {
    std::optional<Strategy> strategy;
    std::vector<IndexEntry> entries;
    std::optional<double> gamma_used;          // present iff strategy == omega
    std::vector<PlaceholderIndex> placeholders; // mspe/omega only
};

/// Every index is (0,0,0).
IndexAssignment derive_no_pe(const MultimodalSequence& seq);

/// Token at seq_pos i gets (i,0,0) regardless of modality.
IndexAssignment derive_1d(const MultimodalSequence& seq);

/// Text token i gets (i,i,0); a visual patch at grid (r,c) gets its grid
/// coordinates plus the index of the nearest preceding text token,
/// element-wise. A leading image has no preceding text; its offset is (0,0).
IndexAssignment derive_2d(const MultimodalSequence& seq);

/// Disjoint index spaces: text token i gets (i,i,0); a visual patch gets its
/// raw grid coordinates (r,c,0) with no cross-modal offset.
IndexAssignment derive_mipe(const MultimodalSequence& seq);

/// Shared 1D space with a running counter: each token is assigned the
/// current counter value on the sequence axis; text advances it by 1, visual
/// by cfg.visual_step.
IndexAssignment derive_v2pe(const MultimodalSequence& seq, const V2peConfig& cfg);

/// Modality-specific 3D indices. The reduced sequence (text + one
/// placeholder per image) occupies the sequence axis densely; a visual patch
/// at grid (r,c) of the image anchored at reduced position a gets (a,r,c).
/// Note that the anchor's own index (a,0,0) coincides with the index of
/// patch (0,0); anchors are reported in `placeholders`, not as entries.
IndexAssignment derive_mspe(const MultimodalSequence& seq);

/// As derive_mspe but visual grid coordinates are scaled: (a, gamma*r,
/// gamma*c). gamma must lie within [bounds.gamma_min, bounds.gamma_max];
/// throws gamma_out_of_bounds otherwise. gamma_used records the factor.
IndexAssignment derive_omega(const MultimodalSequence& seq, double gamma,
                             const GaessConfig& bounds = {});

struct DeriveOptions {
    V2peConfig v2pe;
    double gamma = 1.0;   // omega only
    GaessConfig gaess;    // omega bounds
};

/// Strategy dispatch for callers that hold a tag at runtime.
IndexAssignment derive(const MultimodalSequence& seq, Strategy strategy,
                       const DeriveOptions& opts = {});

} // namespace omega
