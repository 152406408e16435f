#include "omega/cli.hpp"

#include <cstdlib>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "omega/derive.hpp"
#include "omega/entropy.hpp"
#include "omega/io.hpp"
#include "omega/perturb.hpp"
#include "omega/rotary.hpp"
#include "omega/seq.hpp"

namespace omega {

namespace {

using ordered_json = nlohmann::ordered_json;

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<int> bins;
    std::optional<double> gamma_min;
    std::optional<double> gamma_max;
    std::optional<double> visual_step;
    std::optional<int> head_dim;
    std::optional<double> rope_base;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "key=value configuration file");
    cmd->add_option("--out", f.out_path, "write the result here instead of stdout");
    cmd->add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--bins", f.bins, "histogram bin count");
    cmd->add_option("--gamma-min", f.gamma_min, "lower clamp for the scaling factor");
    cmd->add_option("--gamma-max", f.gamma_max, "upper clamp for the scaling factor");
    cmd->add_option("--visual-step", f.visual_step, "v2pe increment for visual tokens");
    cmd->add_option("--head-dim", f.head_dim, "rotary head dimension");
    cmd->add_option("--rope-base", f.rope_base, "rotary frequency base");
}

// Precedence: built-in defaults, then the config file (--config, or the one
// named by OMEGA_PE_CONFIG), then explicit flags.
CliConfig resolve_config(const CommonFlags& f) {
    CliConfig cfg;
    if (!f.config_path.empty()) {
        apply_config_file(cfg, f.config_path);
    } else if (const char* env = std::getenv("OMEGA_PE_CONFIG"); env && *env) {
        apply_config_file(cfg, env);
    }
    if (f.bins) cfg.gaess.bins = *f.bins;
    if (f.gamma_min) cfg.gaess.gamma_min = *f.gamma_min;
    if (f.gamma_max) cfg.gaess.gamma_max = *f.gamma_max;
    if (f.visual_step) cfg.v2pe.visual_step = *f.visual_step;
    if (f.head_dim)
        cfg.rotary = RotaryConfig::with_default_split(
            *f.head_dim, f.rope_base.value_or(cfg.rotary.base));
    else if (f.rope_base)
        cfg.rotary.base = *f.rope_base;
    if (f.format == "csv") cfg.format = OutputFormat::csv;
    if (f.format == "json") cfg.format = OutputFormat::json;

    cfg.gaess.validate();
    cfg.v2pe.validate();
    cfg.rotary.validate();
    return cfg;
}

void emit(const std::string& payload, const std::string& out_path, std::ostream& out) {
    if (out_path.empty())
        out << payload;
    else
        write_file(out_path, payload);
}

struct GammaFlags {
    std::optional<double> gamma;
    std::string text_path;
    std::string vision_path;
};

void add_gamma_flags(CLI::App* cmd, GammaFlags& f) {
    cmd->add_option("--gamma", f.gamma, "explicit scaling factor");
    cmd->add_option("--text", f.text_path, "text embedding matrix file");
    cmd->add_option("--vision", f.vision_path, "vision embedding matrix file");
}

// Explicit --gamma wins; otherwise the factor is computed from the two
// embedding files and echoed to stdout.
double resolve_gamma(const GammaFlags& f, const CliConfig& cfg, std::ostream& out) {
    if (f.gamma) return *f.gamma;
    if (f.text_path.empty() || f.vision_path.empty())
        throw_error(errc::bad_config,
                    "omega needs --gamma or both --text and --vision files");
    const double h_txt =
        embedding_entropy(read_embedding(f.text_path), cfg.gaess.bins).h_bits;
    const double h_vis =
        embedding_entropy(read_embedding(f.vision_path), cfg.gaess.bins).h_bits;
    const double gamma = compute_gamma(h_vis, h_txt, cfg.gaess);
    out << "gamma=" << format_real(gamma) << "\n";
    return gamma;
}

Strategy parse_strategy(const std::string& name) {
    const auto strat = strategy_from_name(name);
    if (!strat)
        throw_error(errc::parse,
                    "unknown strategy '" + name +
                        "' (expected nope, 1d, 2d, mipe, v2pe, mspe or omega)");
    return *strat;
}

std::vector<std::string> split_list(const std::string& csv, const char* what) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t pos = csv.find(',', start);
        const std::string tok = csv.substr(
            start, pos == std::string::npos ? std::string::npos : pos - start);
        if (tok.empty()) throw_error(errc::parse, std::string("bad ") + what + " list");
        items.push_back(tok);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (items.empty()) throw_error(errc::parse, std::string("empty ") + what + " list");
    return items;
}

std::vector<double> parse_levels(const std::string& csv) {
    std::vector<double> levels;
    for (const auto& tok : split_list(csv, "--levels")) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size())
            throw_error(errc::parse, "bad level '" + tok + "'");
        levels.push_back(v);
    }
    return levels;
}

std::string assignment_payload(const IndexAssignment& a, const CliConfig& cfg) {
    return cfg.format == OutputFormat::csv ? assignment_to_csv(a)
                                           : assignment_to_json(a, cfg);
}

std::string compare_csv(const MultimodalSequence& seq,
                        const std::vector<Strategy>& strategies,
                        const std::vector<IndexAssignment>& assignments) {
    std::string out = "seq_pos,modality";
    for (Strategy s : strategies) {
        const std::string tag = strategy_name(s);
        out += "," + tag + "_s," + tag + "_r," + tag + "_c";
    }
    out += '\n';
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += modality_name(seq.tokens[i].modality);
        for (const auto& a : assignments) {
            out += ',';
            out += format_real(a.entries[i].index.s);
            out += ',';
            out += format_real(a.entries[i].index.r);
            out += ',';
            out += format_real(a.entries[i].index.c);
        }
        out += '\n';
    }
    return out;
}

std::string compare_json(const MultimodalSequence& seq,
                         const std::vector<Strategy>& strategies,
                         const std::vector<IndexAssignment>& assignments) {
    ordered_json doc;
    doc["strategies"] = ordered_json::array();
    for (Strategy s : strategies) doc["strategies"].push_back(strategy_name(s));
    doc["rows"] = ordered_json::array();
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        ordered_json row;
        row["seq_pos"] = i;
        row["modality"] = modality_name(seq.tokens[i].modality);
        for (std::size_t k = 0; k < strategies.size(); ++k) {
            const auto& idx = assignments[k].entries[i].index;
            row[strategy_name(strategies[k])] = {{"s", idx.s}, {"r", idx.r}, {"c", idx.c}};
        }
        doc["rows"].push_back(row);
    }
    return doc.dump(2) + "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Positional-index derivation toolkit for multimodal token sequences"};
    app.name("omega-pe");
    app.require_subcommand(1);

    // derive ------------------------------------------------------------
    auto* derive_cmd =
        app.add_subcommand("derive", "assign positional indices to a sequence");
    std::string derive_strategy, derive_seq;
    CommonFlags derive_common;
    GammaFlags derive_gamma;
    derive_cmd->add_option("--strategy", derive_strategy, "index derivation strategy")
        ->required();
    derive_cmd->add_option("--seq", derive_seq, "sequence spec JSON file")->required();
    add_gamma_flags(derive_cmd, derive_gamma);
    add_common(derive_cmd, derive_common);
    derive_cmd->callback([&] {
        const CliConfig cfg = resolve_config(derive_common);
        const Strategy strat = parse_strategy(derive_strategy);
        const auto seq = build_sequence(read_sequence_spec(derive_seq));
        DeriveOptions opts;
        opts.v2pe = cfg.v2pe;
        opts.gaess = cfg.gaess;
        if (strat == Strategy::omega) opts.gamma = resolve_gamma(derive_gamma, cfg, out);
        emit(assignment_payload(derive(seq, strat, opts), cfg), derive_common.out_path, out);
    });

    // entropy -------------------------------------------------------------
    auto* entropy_cmd =
        app.add_subcommand("entropy", "histogram entropy of an embedding matrix");
    std::string entropy_file;
    bool entropy_per_dim = false;
    CommonFlags entropy_common;
    entropy_cmd->add_option("file", entropy_file, "embedding matrix (EMB1 or CSV)")
        ->required();
    entropy_cmd->add_flag("--per-dim", entropy_per_dim, "include per-dimension entropies");
    add_common(entropy_cmd, entropy_common);
    entropy_cmd->callback([&] {
        const CliConfig cfg = resolve_config(entropy_common);
        const auto report = embedding_entropy(read_embedding(entropy_file), cfg.gaess.bins);
        ordered_json doc;
        doc["h_bits"] = report.h_bits;
        if (entropy_per_dim) doc["per_dim"] = report.per_dim;
        emit(doc.dump() + "\n", entropy_common.out_path, out);
    });

    // gamma ---------------------------------------------------------------
    auto* gamma_cmd =
        app.add_subcommand("gamma", "adaptive scaling factor from two embedding files");
    GammaFlags gamma_flags;
    CommonFlags gamma_common;
    gamma_cmd->add_option("--text", gamma_flags.text_path, "text embedding file")
        ->required();
    gamma_cmd->add_option("--vision", gamma_flags.vision_path, "vision embedding file")
        ->required();
    add_common(gamma_cmd, gamma_common);
    gamma_cmd->callback([&] {
        const CliConfig cfg = resolve_config(gamma_common);
        const double h_txt =
            embedding_entropy(read_embedding(gamma_flags.text_path), cfg.gaess.bins).h_bits;
        const double h_vis =
            embedding_entropy(read_embedding(gamma_flags.vision_path), cfg.gaess.bins)
                .h_bits;
        emit(format_real(compute_gamma(h_vis, h_txt, cfg.gaess)) + "\n",
             gamma_common.out_path, out);
    });

    // perturb ---------------------------------------------------------------
    auto* perturb_cmd = app.add_subcommand("perturb", "perturb a derived index file");
    perturb_cmd->require_subcommand(1);

    auto* gaps_cmd = perturb_cmd->add_subcommand("gaps", "insert index gaps into text");
    std::string gaps_input;
    PerturbSpec gaps_spec;
    gaps_spec.kind = PerturbKind::visual_gaps;
    CommonFlags gaps_common;
    gaps_cmd->add_option("input", gaps_input, "index file from derive")->required();
    gaps_cmd->add_option("--n-gaps", gaps_spec.n_gaps, "number of gaps")->required();
    gaps_cmd->add_option("--gap-size", gaps_spec.gap_size, "index width of one gap");
    gaps_cmd->add_option("--seed", gaps_spec.seed, "PRNG seed")->required();
    add_common(gaps_cmd, gaps_common);
    gaps_cmd->callback([&] {
        const CliConfig cfg = resolve_config(gaps_common);
        const auto assignment = read_assignment(gaps_input);
        emit(assignment_payload(insert_visual_gaps(assignment, gaps_spec), cfg),
             gaps_common.out_path, out);
    });

    auto* shuffle_cmd =
        perturb_cmd->add_subcommand("shuffle", "shuffle visual index triples");
    std::string shuffle_input;
    PerturbSpec shuffle_spec;
    shuffle_spec.kind = PerturbKind::shuffle;
    CommonFlags shuffle_common;
    shuffle_cmd->add_option("input", shuffle_input, "index file from derive")->required();
    shuffle_cmd->add_option("--proportion", shuffle_spec.proportion,
                            "fraction of visual tokens to shuffle")
        ->required();
    shuffle_cmd->add_option("--seed", shuffle_spec.seed, "PRNG seed")->required();
    add_common(shuffle_cmd, shuffle_common);
    shuffle_cmd->callback([&] {
        const CliConfig cfg = resolve_config(shuffle_common);
        const auto assignment = read_assignment(shuffle_input);
        emit(assignment_payload(shuffle_visual_indices(assignment, shuffle_spec), cfg),
             shuffle_common.out_path, out);
    });

    // sweep ---------------------------------------------------------------
    auto* sweep_cmd =
        app.add_subcommand("sweep", "score-matrix divergence across perturbation levels");
    std::string sweep_seq, sweep_strategy, sweep_kind, sweep_levels;
    SweepConfig sweep_cfg;
    CommonFlags sweep_common;
    GammaFlags sweep_gamma;
    sweep_cmd->add_option("--seq", sweep_seq, "sequence spec JSON file")->required();
    sweep_cmd->add_option("--strategy", sweep_strategy, "index derivation strategy")
        ->required();
    sweep_cmd->add_option("--perturb", sweep_kind, "perturbation kind")
        ->required()
        ->check(CLI::IsMember({"gaps", "shuffle"}));
    sweep_cmd->add_option("--levels", sweep_levels, "comma-separated perturbation levels")
        ->required();
    sweep_cmd->add_option("--gap-size", sweep_cfg.gap_size, "index width of one gap");
    sweep_cmd->add_option("--trials", sweep_cfg.trials, "trials per level");
    sweep_cmd->add_option("--seed", sweep_cfg.seed, "PRNG seed")->required();
    add_gamma_flags(sweep_cmd, sweep_gamma);
    add_common(sweep_cmd, sweep_common);
    sweep_cmd->callback([&] {
        const CliConfig cfg = resolve_config(sweep_common);
        sweep_cfg.strategy = parse_strategy(sweep_strategy);
        sweep_cfg.kind = sweep_kind == "gaps" ? PerturbKind::visual_gaps
                                              : PerturbKind::shuffle;
        sweep_cfg.levels = parse_levels(sweep_levels);
        sweep_cfg.rotary = cfg.rotary;
        sweep_cfg.derive_opts.v2pe = cfg.v2pe;
        sweep_cfg.derive_opts.gaess = cfg.gaess;
        if (sweep_cfg.strategy == Strategy::omega)
            sweep_cfg.derive_opts.gamma = resolve_gamma(sweep_gamma, cfg, out);
        const auto seq = build_sequence(read_sequence_spec(sweep_seq));
        emit(sweep_to_csv(run_sweep(seq, sweep_cfg)), sweep_common.out_path, out);
    });

    // compare ---------------------------------------------------------------
    auto* compare_cmd =
        app.add_subcommand("compare", "side-by-side indices for several strategies");
    std::string compare_seq, compare_strategies;
    CommonFlags compare_common;
    GammaFlags compare_gamma;
    compare_cmd->add_option("--seq", compare_seq, "sequence spec JSON file")->required();
    compare_cmd
        ->add_option("--strategies", compare_strategies, "comma-separated strategy tags")
        ->required();
    add_gamma_flags(compare_cmd, compare_gamma);
    add_common(compare_cmd, compare_common);
    compare_cmd->callback([&] {
        const CliConfig cfg = resolve_config(compare_common);
        std::vector<Strategy> strategies;
        for (const auto& tag : split_list(compare_strategies, "--strategies"))
            strategies.push_back(parse_strategy(tag));
        const auto seq = build_sequence(read_sequence_spec(compare_seq));
        DeriveOptions opts;
        opts.v2pe = cfg.v2pe;
        opts.gaess = cfg.gaess;
        const bool wants_omega =
            std::find(strategies.begin(), strategies.end(), Strategy::omega) !=
            strategies.end();
        if (wants_omega) opts.gamma = resolve_gamma(compare_gamma, cfg, out);
        std::vector<IndexAssignment> assignments;
        for (Strategy s : strategies) assignments.push_back(derive(seq, s, opts));
        emit(cfg.format == OutputFormat::csv
                 ? compare_csv(seq, strategies, assignments)
                 : compare_json(seq, strategies, assignments),
             compare_common.out_path, out);
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        return 0;
    } catch (const CLI::ParseError& e) {
        // Covers --help (exit 0) as well as genuine usage errors.
        return app.exit(e, out, err) == 0 ? 0 : 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == errc::parse ? 2 : 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace omega
