#include "omega/derive.hpp"

#include <cmath>

namespace omega {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::no_pe: return "nope";
        case Strategy::one_d: return "1d";
        case Strategy::two_d: return "2d";
        case Strategy::mipe: return "mipe";
        case Strategy::v2pe: return "v2pe";
        case Strategy::mspe: return "mspe";
        case Strategy::omega: return "omega";
    }
    return "?";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
    if (name == "nope") return Strategy::no_pe;
    if (name == "1d") return Strategy::one_d;
    if (name == "2d") return Strategy::two_d;
    if (name == "mipe") return Strategy::mipe;
    if (name == "v2pe") return Strategy::v2pe;
    if (name == "mspe") return Strategy::mspe;
    if (name == "omega") return Strategy::omega;
    return std::nullopt;
}

void V2peConfig::validate() const {
    if (!(visual_step > 0.0))
        throw_error(errc::non_positive_step, "visual step must be positive");
    if (visual_step > 1.0)
        throw_error(errc::step_out_of_range, "visual step must be <= 1");
}

namespace {

IndexAssignment make_assignment(Strategy strategy, const MultimodalSequence& seq) {
    IndexAssignment a;
    a.strategy = strategy;
    a.entries.resize(seq.tokens.size());
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        a.entries[i].seq_pos = i;
        a.entries[i].modality = seq.tokens[i].modality;
    }
    return a;
}

// Shared body of mspe and omega: anchor each image's patches at its
// placeholder position and scale grid coordinates by gamma.
IndexAssignment derive_anchored(Strategy strategy, const MultimodalSequence& seq,
                                double gamma) {
    IndexAssignment a = make_assignment(strategy, seq);
    const PhiResult phi = apply_phi(seq);

    // Text tokens take their reduced-sequence position.
    std::size_t next_text = 0;
    std::vector<std::size_t> text_mprime_pos;
    for (const auto& t : phi.mprime)
        if (t.modality == Modality::text) text_mprime_pos.push_back(t.seq_pos);
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        if (seq.tokens[i].modality != Modality::text) continue;
        a.entries[i].index = {static_cast<double>(text_mprime_pos[next_text++]), 0.0, 0.0};
    }

    for (const auto& entry : phi.map.entries) {
        const double anchor = static_cast<double>(entry.mprime_pos);
        for (std::size_t pos : entry.visual_positions) {
            const GridRef& g = *seq.tokens[pos].grid;
            a.entries[pos].index = {anchor, gamma * g.row, gamma * g.col};
        }
        a.placeholders.push_back({entry.image_id, entry.mprime_pos});
    }
    return a;
}

} // namespace

IndexAssignment derive_no_pe(const MultimodalSequence& seq) {
    return make_assignment(Strategy::no_pe, seq);
}

IndexAssignment derive_1d(const MultimodalSequence& seq) {
    IndexAssignment a = make_assignment(Strategy::one_d, seq);
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        a.entries[i].index = {static_cast<double>(i), 0.0, 0.0};
    return a;
}

IndexAssignment derive_2d(const MultimodalSequence& seq) {
    IndexAssignment a = make_assignment(Strategy::two_d, seq);
    // Offset for images with no preceding text token is zero.
    double prev_s = 0.0, prev_r = 0.0;
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        if (seq.tokens[i].modality == Modality::text) {
            const double d = static_cast<double>(i);
            a.entries[i].index = {d, d, 0.0};
            prev_s = d;
            prev_r = d;
        } else {
            const GridRef& g = *seq.tokens[i].grid;
            a.entries[i].index = {g.row + prev_s, g.col + prev_r, 0.0};
        }
    }
    return a;
}

IndexAssignment derive_mipe(const MultimodalSequence& seq) {
    IndexAssignment a = make_assignment(Strategy::mipe, seq);
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        if (seq.tokens[i].modality == Modality::text) {
            const double d = static_cast<double>(i);
            a.entries[i].index = {d, d, 0.0};
        } else {
            const GridRef& g = *seq.tokens[i].grid;
            a.entries[i].index = {static_cast<double>(g.row), static_cast<double>(g.col), 0.0};
        }
    }
    return a;
}

IndexAssignment derive_v2pe(const MultimodalSequence& seq, const V2peConfig& cfg) {
    cfg.validate();
    IndexAssignment a = make_assignment(Strategy::v2pe, seq);
    double counter = 0.0;
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        a.entries[i].index = {counter, 0.0, 0.0};
        counter += seq.tokens[i].modality == Modality::text ? 1.0 : cfg.visual_step;
    }
    return a;
}

IndexAssignment derive_mspe(const MultimodalSequence& seq) {
    return derive_anchored(Strategy::mspe, seq, 1.0);
}

IndexAssignment derive_omega(const MultimodalSequence& seq, double gamma,
                             const GaessConfig& bounds) {
    bounds.validate();
    if (!std::isfinite(gamma) || gamma < bounds.gamma_min || gamma > bounds.gamma_max)
        throw_error(errc::gamma_out_of_bounds,
                    "gamma must lie in [" + std::to_string(bounds.gamma_min) + ", " +
                        std::to_string(bounds.gamma_max) + "]");
    IndexAssignment a = derive_anchored(Strategy::omega, seq, gamma);
    a.gamma_used = gamma;
    return a;
}

IndexAssignment derive(const MultimodalSequence& seq, Strategy strategy,
                       const DeriveOptions& opts) {
    switch (strategy) {
        case Strategy::no_pe: return derive_no_pe(seq);
        case Strategy::one_d: return derive_1d(seq);
        case Strategy::two_d: return derive_2d(seq);
        case Strategy::mipe: return derive_mipe(seq);
        case Strategy::v2pe: return derive_v2pe(seq, opts.v2pe);
        case Strategy::mspe: return derive_mspe(seq);
        case Strategy::omega: return derive_omega(seq, opts.gamma, opts.gaess);
    }
    throw_error(errc::bad_config, "unknown strategy");
}

} // namespace omega
