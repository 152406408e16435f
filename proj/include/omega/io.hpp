#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "omega/derive.hpp"
#include "omega/entropy.hpp"
#include "omega/perturb.hpp"
#include "omega/rotary.hpp"

namespace omega {

enum class OutputFormat { csv, json };

/// Tool-wide configuration. Defaults < config file < command-line flags.
struct CliConfig {
    GaessConfig gaess;
    V2peConfig v2pe;
    RotaryConfig rotary;
    OutputFormat format = OutputFormat::csv;
};

/// Reals in text outputs carry 9 significant digits ("%.9g"); negative zero
/// is normalized to "0".
std::string format_real(double x);

// --- sequence spec, JSON ---------------------------------------------------
// {"items":[{"kind":"text","count":N} | {"kind":"image","rows":R,"cols":C}, ...]}

SequenceSpec parse_sequence_spec(const std::string& json_text);
SequenceSpec read_sequence_spec(const std::filesystem::path& path);

// --- embedding matrices ----------------------------------------------------
// Binary EMB1: magic "EMB1", u32le N, u32le d, then N*d f32le row-major.
// CSV: d comma-separated floats per line, N lines, no header.
// read_embedding sniffs the format from the first four bytes.

EmbeddingMatrix read_embedding(const std::filesystem::path& path);
EmbeddingMatrix parse_embedding_emb1(const std::string& bytes);
EmbeddingMatrix parse_embedding_csv(const std::string& text);
std::string embedding_to_emb1(const EmbeddingMatrix& m);
std::string embedding_to_csv(const EmbeddingMatrix& m);
void write_embedding(const std::filesystem::path& path, const EmbeddingMatrix& m,
                     bool binary);

// --- index assignments -----------------------------------------------------
// CSV: header "seq_pos,modality,s,r,c", one row per token, plus a trailing
// "# gamma=<value>" comment when a scaling factor was used. JSON mirrors the
// columns and adds metadata (strategy, gamma, placeholder anchors, config).

std::string assignment_to_csv(const IndexAssignment& a);
IndexAssignment assignment_from_csv(const std::string& text);
std::string assignment_to_json(const IndexAssignment& a, const CliConfig& cfg);
IndexAssignment assignment_from_json(const std::string& text);
IndexAssignment read_assignment(const std::filesystem::path& path);

// --- sweep tables ----------------------------------------------------------

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// --- tool configuration file -----------------------------------------------
// Flat key=value lines; '#' starts a comment. Keys: bins, gamma_min,
// gamma_max, visual_step, head_dim, split_s, split_r, split_c, rope_base,
// format.

void apply_config_text(CliConfig& cfg, const std::string& text);
void apply_config_file(CliConfig& cfg, const std::filesystem::path& path);

// --- small file helpers ----------------------------------------------------

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace omega
