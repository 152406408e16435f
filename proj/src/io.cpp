#include "omega/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace omega {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& token, const char* what) {
    const std::string t = trim(token);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw_error(errc::parse, std::string("bad ") + what + ": '" + token + "'");
    return value;
}

std::uint64_t parse_uint(const std::string& token, const char* what) {
    const std::string t = trim(token);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw_error(errc::parse, std::string("bad ") + what + ": '" + token + "'");
    return value;
}

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32le(const std::string& bytes, std::size_t offset) {
    const auto b = [&](std::size_t i) {
        return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i]));
    };
    return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

} // namespace

std::string format_real(double x) {
    if (x == 0.0) x = 0.0; // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

// --- sequence spec ----------------------------------------------------------

SequenceSpec parse_sequence_spec(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw_error(errc::parse, std::string("sequence spec: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_array())
        throw_error(errc::parse, "sequence spec: expected an object with an 'items' array");

    SequenceSpec spec;
    for (const auto& item : doc["items"]) {
        if (!item.is_object() || !item.contains("kind") || !item["kind"].is_string())
            throw_error(errc::parse, "sequence spec: every item needs a 'kind' string");
        const std::string kind = item["kind"].get<std::string>();
        if (kind == "text") {
            int count = 1;
            if (item.contains("count")) {
                if (!item["count"].is_number_integer())
                    throw_error(errc::parse, "sequence spec: 'count' must be an integer");
                count = item["count"].get<int>();
            }
            spec.items.push_back(SequenceSpec::text(count));
        } else if (kind == "image") {
            if (!item.contains("rows") || !item.contains("cols") ||
                !item["rows"].is_number_integer() || !item["cols"].is_number_integer())
                throw_error(errc::parse, "sequence spec: images need integer 'rows' and 'cols'");
            spec.items.push_back(
                SequenceSpec::image(item["rows"].get<int>(), item["cols"].get<int>()));
        } else {
            throw_error(errc::parse, "sequence spec: unknown kind '" + kind + "'");
        }
    }
    return spec;
}

SequenceSpec read_sequence_spec(const std::filesystem::path& path) {
    return parse_sequence_spec(read_file(path));
}

// --- embedding matrices ------------------------------------------------------

EmbeddingMatrix parse_embedding_emb1(const std::string& bytes) {
    if (bytes.size() < 12 || bytes.compare(0, 4, "EMB1") != 0)
        throw_error(errc::parse, "embedding file: bad magic, expected EMB1");
    const std::uint64_t n = get_u32le(bytes, 4);
    const std::uint64_t d = get_u32le(bytes, 8);
    if (n == 0 || d == 0) throw_error(errc::parse, "embedding file: empty matrix");
    const std::uint64_t payload = n * d * 4;
    if (bytes.size() < 12 + payload)
        throw_error(errc::parse, "embedding file: truncated payload");
    if (bytes.size() > 12 + payload)
        throw_error(errc::parse, "embedding file: trailing bytes after payload");

    EmbeddingMatrix m;
    m.n_rows = n;
    m.n_cols = d;
    m.values.resize(n * d);
    for (std::uint64_t i = 0; i < n * d; ++i) {
        const std::uint32_t bits = get_u32le(bytes, 12 + i * 4);
        float f;
        std::memcpy(&f, &bits, sizeof f);
        if (!std::isfinite(f))
            throw_error(errc::parse, "embedding file: non-finite value");
        m.values[i] = static_cast<double>(f);
    }
    return m;
}

EmbeddingMatrix parse_embedding_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    for (const auto& raw : split(text, '\n')) {
        const std::string line = trim(raw);
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line, ','))
            row.push_back(parse_double(cell, "embedding value"));
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw_error(errc::parse, "embedding csv: ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw_error(errc::parse, "embedding csv: no rows");
    auto m = EmbeddingMatrix::from_rows(rows);
    for (double v : m.values)
        if (!std::isfinite(v)) throw_error(errc::parse, "embedding csv: non-finite value");
    return m;
}

EmbeddingMatrix read_embedding(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 4 && bytes.compare(0, 4, "EMB1") == 0)
        return parse_embedding_emb1(bytes);
    return parse_embedding_csv(bytes);
}

std::string embedding_to_emb1(const EmbeddingMatrix& m) {
    std::string out = "EMB1";
    put_u32le(out, static_cast<std::uint32_t>(m.n_rows));
    put_u32le(out, static_cast<std::uint32_t>(m.n_cols));
    for (double v : m.values) {
        const auto f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        put_u32le(out, bits);
    }
    return out;
}

std::string embedding_to_csv(const EmbeddingMatrix& m) {
    std::string out;
    char buf[40];
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        for (std::size_t j = 0; j < m.n_cols; ++j) {
            // Shortest round-trip representation keeps the format lossless.
            auto res = std::to_chars(buf, buf + sizeof buf, m.at(i, j));
            out.append(buf, res.ptr);
            out.push_back(j + 1 == m.n_cols ? '\n' : ',');
        }
    }
    return out;
}

void write_embedding(const std::filesystem::path& path, const EmbeddingMatrix& m,
                     bool binary) {
    write_file(path, binary ? embedding_to_emb1(m) : embedding_to_csv(m));
}

// --- index assignments -------------------------------------------------------

std::string assignment_to_csv(const IndexAssignment& a) {
    std::string out = "seq_pos,modality,s,r,c\n";
    for (const auto& e : a.entries) {
        out += std::to_string(e.seq_pos);
        out += ',';
        out += modality_name(e.modality);
        out += ',';
        out += format_real(e.index.s);
        out += ',';
        out += format_real(e.index.r);
        out += ',';
        out += format_real(e.index.c);
        out += '\n';
    }
    if (a.gamma_used) out += "# gamma=" + format_real(*a.gamma_used) + "\n";
    return out;
}

IndexAssignment assignment_from_csv(const std::string& text) {
    IndexAssignment a;
    bool saw_header = false;
    for (const auto& raw : split(text, '\n')) {
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string comment = trim(line.substr(1));
            if (comment.rfind("gamma=", 0) == 0)
                a.gamma_used = parse_double(comment.substr(6), "gamma");
            continue;
        }
        if (!saw_header) {
            if (line != "seq_pos,modality,s,r,c")
                throw_error(errc::parse, "index csv: bad header '" + line + "'");
            saw_header = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 5) throw_error(errc::parse, "index csv: expected 5 columns");
        IndexEntry e;
        e.seq_pos = parse_uint(cells[0], "seq_pos");
        const auto modality = modality_from_name(trim(cells[1]));
        if (!modality) throw_error(errc::parse, "index csv: bad modality '" + cells[1] + "'");
        e.modality = *modality;
        e.index.s = parse_double(cells[2], "s");
        e.index.r = parse_double(cells[3], "r");
        e.index.c = parse_double(cells[4], "c");
        a.entries.push_back(e);
    }
    if (!saw_header) throw_error(errc::parse, "index csv: missing header");
    // The CSV format records the scaling factor but not the strategy tag;
    // a scaling factor implies the adaptive strategy.
    if (a.gamma_used) a.strategy = Strategy::omega;
    return a;
}

std::string assignment_to_json(const IndexAssignment& a, const CliConfig& cfg) {
    ordered_json doc;
    doc["strategy"] = a.strategy ? ordered_json(strategy_name(*a.strategy)) : ordered_json(nullptr);
    if (a.gamma_used) doc["gamma"] = *a.gamma_used;
    doc["config"] = {
        {"bins", cfg.gaess.bins},
        {"gamma_min", cfg.gaess.gamma_min},
        {"gamma_max", cfg.gaess.gamma_max},
        {"visual_step", cfg.v2pe.visual_step},
        {"head_dim", cfg.rotary.head_dim},
        {"split_s", cfg.rotary.split_s},
        {"split_r", cfg.rotary.split_r},
        {"split_c", cfg.rotary.split_c},
        {"rope_base", cfg.rotary.base},
    };
    doc["placeholders"] = ordered_json::array();
    for (const auto& ph : a.placeholders)
        doc["placeholders"].push_back(
            {{"image_id", ph.image_id}, {"mprime_pos", ph.mprime_pos}});
    doc["entries"] = ordered_json::array();
    for (const auto& e : a.entries)
        doc["entries"].push_back({{"seq_pos", e.seq_pos},
                                  {"modality", modality_name(e.modality)},
                                  {"s", e.index.s},
                                  {"r", e.index.r},
                                  {"c", e.index.c}});
    return doc.dump(2) + "\n";
}

IndexAssignment assignment_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw_error(errc::parse, std::string("index json: ") + e.what());
    }
    try {
        IndexAssignment a;
        if (doc.contains("strategy") && doc["strategy"].is_string()) {
            a.strategy = strategy_from_name(doc["strategy"].get<std::string>());
            if (!a.strategy)
                throw_error(errc::parse, "index json: unknown strategy tag");
        }
        if (doc.contains("gamma")) a.gamma_used = doc["gamma"].get<double>();
        if (doc.contains("placeholders"))
            for (const auto& ph : doc["placeholders"])
                a.placeholders.push_back({ph.at("image_id").get<int>(),
                                          ph.at("mprime_pos").get<std::size_t>()});
        for (const auto& e : doc.at("entries")) {
            IndexEntry entry;
            entry.seq_pos = e.at("seq_pos").get<std::size_t>();
            const auto modality = modality_from_name(e.at("modality").get<std::string>());
            if (!modality) throw_error(errc::parse, "index json: bad modality");
            entry.modality = *modality;
            entry.index.s = e.at("s").get<double>();
            entry.index.r = e.at("r").get<double>();
            entry.index.c = e.at("c").get<double>();
            a.entries.push_back(entry);
        }
        return a;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw_error(errc::parse, std::string("index json: ") + e.what());
    }
}

IndexAssignment read_assignment(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return assignment_from_json(text);
    return assignment_from_csv(text);
}

// --- sweep tables -------------------------------------------------------------

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "level,trial,divergence\n";
    for (const auto& row : rows) {
        out += format_real(row.level);
        out += ',';
        out += std::to_string(row.trial);
        out += ',';
        out += format_real(row.divergence);
        out += '\n';
    }
    return out;
}

// --- tool configuration file ----------------------------------------------------

void apply_config_text(CliConfig& cfg, const std::string& text) {
    for (const auto& raw : split(text, '\n')) {
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw_error(errc::parse, "config: expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "bins") {
            cfg.gaess.bins = static_cast<int>(parse_uint(value, "bins"));
        } else if (key == "gamma_min") {
            cfg.gaess.gamma_min = parse_double(value, "gamma_min");
        } else if (key == "gamma_max") {
            cfg.gaess.gamma_max = parse_double(value, "gamma_max");
        } else if (key == "visual_step") {
            cfg.v2pe.visual_step = parse_double(value, "visual_step");
        } else if (key == "head_dim") {
            cfg.rotary = RotaryConfig::with_default_split(
                static_cast<int>(parse_uint(value, "head_dim")), cfg.rotary.base);
        } else if (key == "split_s") {
            cfg.rotary.split_s = static_cast<int>(parse_uint(value, "split_s"));
        } else if (key == "split_r") {
            cfg.rotary.split_r = static_cast<int>(parse_uint(value, "split_r"));
        } else if (key == "split_c") {
            cfg.rotary.split_c = static_cast<int>(parse_uint(value, "split_c"));
        } else if (key == "rope_base") {
            cfg.rotary.base = parse_double(value, "rope_base");
        } else if (key == "format") {
            if (value == "csv") cfg.format = OutputFormat::csv;
            else if (value == "json") cfg.format = OutputFormat::json;
            else throw_error(errc::parse, "config: format must be csv or json");
        } else {
            throw_error(errc::parse, "config: unknown key '" + key + "'");
        }
    }
}

void apply_config_file(CliConfig& cfg, const std::filesystem::path& path) {
    apply_config_text(cfg, read_file(path));
}

// --- small file helpers -----------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(errc::parse, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_error(errc::parse, "cannot write " + path.string());
    out << contents;
    if (!out) throw_error(errc::parse, "write failed for " + path.string());
}

} // namespace omega
