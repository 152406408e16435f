#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "omega/error.hpp"

namespace omega {

enum class Modality { text, visual, placeholder };

const char* modality_name(Modality m);
std::optional<Modality> modality_from_name(const std::string& name);

/// A patch grid for one image. Patches are enumerated row-major:
/// patch l sits at (l / cols, l % cols).
struct ImageGrid {
    int image_id = 0;
    int rows = 0;
    int cols = 0;
};

struct GridRef {
    int image_id = 0;
    int row = 0;
    int col = 0;

    bool operator==(const GridRef&) const = default;
};

struct Token {
    std::size_t seq_pos = 0;
    Modality modality = Modality::text;
    std::optional<GridRef> grid; // present iff modality == visual
};

/// Ordered multimodal token sequence. Visual tokens of one image are
/// contiguous and in row-major patch order; every referenced grid exists and
/// is fully covered.
struct MultimodalSequence {
    std::vector<Token> tokens;
    std::vector<ImageGrid> grids;

    const ImageGrid& grid(int image_id) const;
    std::size_t size() const { return tokens.size(); }
};

/// Declarative description of a sequence: a run of text tokens or an image.
struct SequenceSpec {
    struct Item {
        enum class Kind { text, image };
        Kind kind = Kind::text;
        int count = 1; // text: number of consecutive tokens
        int rows = 0;  // image dimensions
        int cols = 0;
    };
    std::vector<Item> items;

    static SequenceSpec::Item text(int count = 1);
    static SequenceSpec::Item image(int rows, int cols);
};

/// Expands a spec into a token sequence. Images become rows*cols visual
/// tokens in row-major order; seq_pos is dense from 0.
/// Throws zero_dim_grid / empty_sequence.
MultimodalSequence build_sequence(const SequenceSpec& spec);

/// One placeholder substitution: the placeholder's position in the reduced
/// sequence, the image it stands for, and the original positions of that
/// image's visual tokens (row-major).
struct PlaceholderEntry {
    std::size_t mprime_pos = 0;
    int image_id = 0;
    std::vector<std::size_t> visual_positions;
};

struct PlaceholderMap {
    std::vector<PlaceholderEntry> entries;
};

struct PhiResult {
    std::vector<Token> mprime; // text + placeholder tokens, re-numbered densely
    PlaceholderMap map;
};

/// Replaces each image's contiguous visual-token run with a single
/// placeholder token, keeping text tokens in order.
PhiResult apply_phi(const MultimodalSequence& seq);

/// Checks every MultimodalSequence invariant; throws invalid_sequence with a
/// description of the first violation.
void validate(const MultimodalSequence& seq);

/// Real-valued 3-component positional index: sequence, row and column axes.
/// 1D strategies use (s,0,0); 2D strategies use (s,r,0); scaled strategies
/// may produce fractional components, hence doubles.
struct PositionIndex3 {
    double s = 0.0;
    double r = 0.0;
    double c = 0.0;

    bool operator==(const PositionIndex3&) const = default;
};

inline PositionIndex3 operator+(const PositionIndex3& a, const PositionIndex3& b) {
    return {a.s + b.s, a.r + b.r, a.c + b.c};
}

inline PositionIndex3 operator-(const PositionIndex3& a, const PositionIndex3& b) {
    return {a.s - b.s, a.r - b.r, a.c - b.c};
}

} // namespace omega
