#include "omega/seq.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace omega {

const char* modality_name(Modality m) {
    switch (m) {
        case Modality::text: return "text";
        case Modality::visual: return "visual";
        case Modality::placeholder: return "placeholder";
    }
    return "?";
}

std::optional<Modality> modality_from_name(const std::string& name) {
    if (name == "text") return Modality::text;
    if (name == "visual") return Modality::visual;
    if (name == "placeholder") return Modality::placeholder;
    return std::nullopt;
}

const ImageGrid& MultimodalSequence::grid(int image_id) const {
    for (const auto& g : grids)
        if (g.image_id == image_id) return g;
    throw_error(errc::invalid_sequence, "unknown image id " + std::to_string(image_id));
}

SequenceSpec::Item SequenceSpec::text(int count) {
    Item item;
    item.kind = Item::Kind::text;
    item.count = count;
    return item;
}

SequenceSpec::Item SequenceSpec::image(int rows, int cols) {
    Item item;
    item.kind = Item::Kind::image;
    item.rows = rows;
    item.cols = cols;
    return item;
}

MultimodalSequence build_sequence(const SequenceSpec& spec) {
    MultimodalSequence seq;
    int next_image = 0;
    for (const auto& item : spec.items) {
        if (item.kind == SequenceSpec::Item::Kind::text) {
            if (item.count < 0)
                throw_error(errc::invalid_sequence, "negative text count");
            for (int i = 0; i < item.count; ++i)
                seq.tokens.push_back({seq.tokens.size(), Modality::text, std::nullopt});
        } else {
            if (item.rows < 1 || item.cols < 1)
                throw_error(errc::zero_dim_grid,
                            "image grid needs rows >= 1 and cols >= 1, got " +
                                std::to_string(item.rows) + "x" + std::to_string(item.cols));
            const int id = next_image++;
            seq.grids.push_back({id, item.rows, item.cols});
            for (int r = 0; r < item.rows; ++r)
                for (int c = 0; c < item.cols; ++c)
                    seq.tokens.push_back(
                        {seq.tokens.size(), Modality::visual, GridRef{id, r, c}});
        }
    }
    if (seq.tokens.empty()) throw_error(errc::empty_sequence, "sequence has no tokens");
    return seq;
}

PhiResult apply_phi(const MultimodalSequence& seq) {
    PhiResult out;
    std::size_t i = 0;
    while (i < seq.tokens.size()) {
        const Token& tok = seq.tokens[i];
        if (tok.modality == Modality::text) {
            out.mprime.push_back({out.mprime.size(), Modality::text, std::nullopt});
            ++i;
            continue;
        }
        // Maximal run of visual tokens from one image becomes one placeholder.
        const int image_id = tok.grid->image_id;
        PlaceholderEntry entry;
        entry.mprime_pos = out.mprime.size();
        entry.image_id = image_id;
        while (i < seq.tokens.size() && seq.tokens[i].modality == Modality::visual &&
               seq.tokens[i].grid->image_id == image_id) {
            entry.visual_positions.push_back(i);
            ++i;
        }
        out.mprime.push_back({entry.mprime_pos, Modality::placeholder, std::nullopt});
        out.map.entries.push_back(std::move(entry));
    }
    return out;
}

void validate(const MultimodalSequence& seq) {
    if (seq.tokens.empty()) throw_error(errc::empty_sequence, "sequence has no tokens");

    std::unordered_map<int, const ImageGrid*> grids;
    for (const auto& g : seq.grids) {
        if (g.rows < 1 || g.cols < 1)
            throw_error(errc::zero_dim_grid, "grid " + std::to_string(g.image_id) +
                                                 " has a zero dimension");
        if (!grids.emplace(g.image_id, &g).second)
            throw_error(errc::invalid_sequence,
                        "duplicate grid id " + std::to_string(g.image_id));
    }

    std::unordered_map<int, int> seen_patches;
    std::unordered_set<int> finished_images;
    int current_image = -1;
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        const Token& tok = seq.tokens[i];
        if (tok.seq_pos != i)
            throw_error(errc::invalid_sequence,
                        "seq_pos not dense at position " + std::to_string(i));
        if (tok.modality == Modality::visual) {
            if (!tok.grid)
                throw_error(errc::invalid_sequence,
                            "visual token without grid ref at " + std::to_string(i));
            auto it = grids.find(tok.grid->image_id);
            if (it == grids.end())
                throw_error(errc::invalid_sequence,
                            "token references unknown grid " + std::to_string(tok.grid->image_id));
            const ImageGrid& g = *it->second;
            if (tok.grid->row < 0 || tok.grid->row >= g.rows || tok.grid->col < 0 ||
                tok.grid->col >= g.cols)
                throw_error(errc::invalid_sequence,
                            "grid ref out of range at position " + std::to_string(i));
            const int id = tok.grid->image_id;
            if (id != current_image) {
                if (finished_images.count(id))
                    throw_error(errc::invalid_sequence,
                                "image " + std::to_string(id) + " is not contiguous");
                if (current_image >= 0) finished_images.insert(current_image);
                current_image = id;
            }
            // Row-major order within the image.
            const int expect = seen_patches[id]++;
            if (tok.grid->row * g.cols + tok.grid->col != expect)
                throw_error(errc::invalid_sequence,
                            "patches of image " + std::to_string(id) + " are not row-major");
        } else {
            if (tok.grid)
                throw_error(errc::invalid_sequence,
                            "non-visual token carries a grid ref at " + std::to_string(i));
            if (current_image >= 0) finished_images.insert(current_image);
            current_image = -1;
        }
    }

    for (const auto& [id, g] : grids) {
        const auto it = seen_patches.find(id);
        const int got = it == seen_patches.end() ? 0 : it->second;
        if (got != g->rows * g->cols)
            throw_error(errc::invalid_sequence,
                        "image " + std::to_string(id) + " has " + std::to_string(got) +
                            " visual tokens, grid wants " + std::to_string(g->rows * g->cols));
    }
}

} // namespace omega
