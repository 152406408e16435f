// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line with its runtime. Returns nonzero if any fail.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "omega/cli.hpp"
#include "omega/derive.hpp"
#include "omega/entropy.hpp"
#include "omega/io.hpp"
#include "omega/perturb.hpp"
#include "omega/rng.hpp"
#include "omega/rotary.hpp"
#include "omega/seq.hpp"
#include "test_util.hpp"

using namespace omega;

namespace {

int failures_in_criterion = 0;

void expect(bool ok, const char* what) {
    if (!ok) {
        ++failures_in_criterion;
        std::printf("      check failed: %s\n", what);
    }
}

// --- criterion 1: entropy oracle equivalence --------------------------------
// Independent brute-force histogram entropy: explicit scan over bins and
// values, no code shared with the library implementation.

double oracle_column_entropy(const std::vector<double>& col, int bins) {
    double lo = col[0], hi = col[0];
    for (double v : col) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    const double range = hi - lo;
    if (range == 0.0) return 0.0;
    std::vector<long> counts(bins, 0);
    for (double v : col) {
        int assigned = bins - 1;
        for (int k = 0; k < bins; ++k) {
            if (v < lo + range * (k + 1) / bins) {
                assigned = k;
                break;
            }
        }
        ++counts[assigned];
    }
    double h = 0.0;
    for (int k = 0; k < bins; ++k) {
        if (counts[k] == 0) continue;
        const double p = static_cast<double>(counts[k]) / static_cast<double>(col.size());
        h -= p * std::log2(p);
    }
    return h;
}

double oracle_matrix_entropy(const EmbeddingMatrix& z, int bins) {
    double total = 0.0;
    for (std::size_t j = 0; j < z.n_cols; ++j) {
        std::vector<double> col(z.n_rows);
        for (std::size_t i = 0; i < z.n_rows; ++i) col[i] = z.at(i, j);
        total += oracle_column_entropy(col, bins);
    }
    return total / static_cast<double>(z.n_cols);
}

EmbeddingMatrix random_matrix(SplitMix64& rng) {
    EmbeddingMatrix m;
    m.n_rows = 1 + rng.bounded(64);
    m.n_cols = 1 + rng.bounded(32);
    m.values.resize(m.n_rows * m.n_cols);
    for (auto& v : m.values) v = (rng.next_double() - 0.5) * 17.0;
    return m;
}

void criterion_entropy_oracle() {
    SplitMix64 rng(0xACCE57);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto m = random_matrix(rng);
        for (int bins : {2, 16, 256}) {
            const double got = embedding_entropy(m, bins).h_bits;
            const double want = oracle_matrix_entropy(m, bins);
            expect(std::abs(got - want) <= 1e-9, "oracle equivalence within 1e-9");
        }
        if (failures_in_criterion) return;
    }
}

// --- criterion 2: entropy bounds and invariances -----------------------------

void criterion_entropy_invariances() {
    SplitMix64 rng(0xB0B5);
    const double scales[] = {-2.0, 0.5, 3.0};
    const double offsets[] = {-1.0, 0.0, 7.0};
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> col(2 + rng.bounded(63));
        for (auto& v : col) v = rng.next_double() * 40.0 - 20.0;
        const int bins = trial % 2 == 0 ? 16 : 256;
        const double h = dimension_entropy(col, bins);
        expect(h >= 0.0 && h <= std::log2(static_cast<double>(bins)) + 1e-12,
               "0 <= H <= log2(K)");

        for (double a : scales) {
            for (double b : offsets) {
                auto transformed = col;
                for (auto& v : transformed) v = a * v + b;
                expect(std::abs(dimension_entropy(transformed, bins) - h) <= 1e-12,
                       "affine invariance within 1e-12");
            }
        }

        auto shuffled = col;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.bounded(i)]);
        expect(std::abs(dimension_entropy(shuffled, bins) - h) <= 1e-12,
               "permutation invariance within 1e-12");
        if (failures_in_criterion) return;
    }
}

// --- criterion 3: gamma contract ---------------------------------------------

void criterion_gamma_contract() {
    const GaessConfig cfg; // bins 256, bounds [0.25, 3.0]
    expect(compute_gamma(4, 1, cfg) == 2.0, "gamma(4,1) == 2");
    expect(compute_gamma(1, 100, cfg) == 0.25, "gamma(1,100) clamps to 0.25");
    expect(compute_gamma(16, 1, cfg) == 3.0, "gamma(16,1) clamps to 3.0");

    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double hv = 0.5 * i, ht = 0.5 * j;
            const double g = compute_gamma(hv, ht, cfg);
            expect(g >= cfg.gamma_min && g <= cfg.gamma_max, "gamma within bounds");
            expect(compute_gamma(hv + 0.5, ht, cfg) >= g, "nondecreasing in h_vis");
            expect(compute_gamma(hv, ht + 0.5, cfg) <= g, "nonincreasing in h_txt");
        }
    }
}

// --- criterion 4: mspe structural invariants -----------------------------------

void criterion_mspe_structure() {
    SplitMix64 rng(0x5EED);
    for (int trial = 0; trial < 200; ++trial) {
        const auto seq = build_sequence(testutil::random_spec(rng, 8, 256));
        const double gamma = 0.25 + rng.next_double() * 2.75;
        const auto mspe = derive_mspe(seq);
        const auto omega_a = derive_omega(seq, gamma);

        // Text continuity: text s-components plus placeholder anchors tile
        // 0..m densely.
        std::set<long long> axis;
        std::size_t n_text = 0;
        for (const auto& e : mspe.entries) {
            if (e.modality == Modality::text) {
                axis.insert(static_cast<long long>(e.index.s));
                ++n_text;
                expect(e.index.r == 0.0 && e.index.c == 0.0, "text r=c=0");
            }
        }
        for (const auto& ph : mspe.placeholders)
            axis.insert(static_cast<long long>(ph.mprime_pos));
        expect(axis.size() == n_text + mspe.placeholders.size(),
               "anchors and text positions are distinct");
        long long next = 0;
        bool dense = true;
        for (long long v : axis) dense = dense && v == next++;
        expect(dense, "reduced axis is dense from 0");

        // Modality separation and grid preservation, scaled and unscaled.
        for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
            for (std::size_t j = 0; j < seq.tokens.size(); ++j) {
                const auto& ti = seq.tokens[i];
                const auto& tj = seq.tokens[j];
                if (ti.modality != Modality::visual || tj.modality != Modality::visual)
                    continue;
                if (ti.grid->image_id != tj.grid->image_id) continue;
                const double dr = ti.grid->row - tj.grid->row;
                const double dc = ti.grid->col - tj.grid->col;
                const auto dm = mspe.entries[i].index - mspe.entries[j].index;
                expect(dm.s == 0.0, "one image shares one s");
                expect(dm.r == dr && dm.c == dc, "mspe deltas equal grid deltas");
                const auto dg = omega_a.entries[i].index - omega_a.entries[j].index;
                expect(std::abs(dg.r - gamma * dr) <= 1e-12 &&
                           std::abs(dg.c - gamma * dc) <= 1e-12,
                       "omega deltas equal gamma * grid deltas");
            }
        }
        if (failures_in_criterion) return;
    }
}

// --- criterion 5: strategy cross-checks ----------------------------------------

bool same_entries(const IndexAssignment& a, const IndexAssignment& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        if (a.entries[i].seq_pos != b.entries[i].seq_pos) return false;
        if (a.entries[i].modality != b.entries[i].modality) return false;
        if (!(a.entries[i].index == b.entries[i].index)) return false;
    }
    return true;
}

bool indices_are(const IndexAssignment& a, const std::vector<PositionIndex3>& want) {
    if (a.entries.size() != want.size()) return false;
    for (std::size_t i = 0; i < want.size(); ++i)
        if (!(a.entries[i].index == want[i])) return false;
    return true;
}

void criterion_cross_checks() {
    using testutil::IMG;
    using testutil::T;
    SplitMix64 rng(0xC05);
    for (int trial = 0; trial < 50; ++trial) {
        const auto seq = build_sequence(testutil::random_spec(rng, 4, 64));
        expect(same_entries(derive_omega(seq, 1.0), derive_mspe(seq)),
               "unit-gamma scaling equals mspe");
    }
    const auto text_only = testutil::seq({T(9)});
    expect(same_entries(derive_v2pe(text_only, V2peConfig{1.0 / 16.0}),
                        derive_1d(text_only)),
           "v2pe equals 1d on text-only input");

    // Worked examples, exact.
    expect(indices_are(derive_1d(testutil::seq({T(), IMG(2, 2), T()})),
                       {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}, {5, 0, 0}}),
           "linear example");
    expect(indices_are(derive_2d(testutil::seq({T(2), IMG(2, 2), T()})),
                       {{0, 0, 0},
                        {1, 1, 0},
                        {1, 1, 0},
                        {1, 2, 0},
                        {2, 1, 0},
                        {2, 2, 0},
                        {6, 6, 0}}),
           "2d example");
    expect(indices_are(derive_mipe(testutil::seq({T(2), IMG(2, 2)})),
                       {{0, 0, 0}, {1, 1, 0}, {0, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 0}}),
           "independent-space example");
    expect(indices_are(derive_mspe(testutil::seq({T(2), IMG(2, 2), T()})),
                       {{0, 0, 0},
                        {1, 0, 0},
                        {2, 0, 0},
                        {2, 0, 1},
                        {2, 1, 0},
                        {2, 1, 1},
                        {3, 0, 0}}),
           "anchored example");
    expect(indices_are(derive_omega(testutil::seq({T(), IMG(2, 2)}), 2.0),
                       {{0, 0, 0}, {1, 0, 0}, {1, 0, 2}, {1, 2, 0}, {1, 2, 2}}),
           "scaled example");
    expect(indices_are(derive_omega(testutil::seq({T(), IMG(1, 2)}), 0.25),
                       {{0, 0, 0}, {1, 0, 0}, {1, 0, 0.25}}),
           "fractional scaled example");
    expect(indices_are(derive_v2pe(testutil::seq({T(), IMG(1, 2), T()}),
                                   V2peConfig{1.0 / 16.0}),
                       {{0, 0, 0}, {1, 0, 0}, {1.0625, 0, 0}, {1.125, 0, 0}}),
           "fractional-step example");
}

// --- criterion 6: rotary properties ----------------------------------------------

HeadVector random_unit(SplitMix64& rng, int dim) {
    HeadVector v(dim);
    double norm2 = 0.0;
    for (auto& x : v) {
        x = rng.next_gaussian();
        norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

void criterion_rotary() {
    SplitMix64 rng(0x707A);
    const auto cfg = RotaryConfig::with_default_split(16);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto q = random_unit(rng, 16);
        const auto k = random_unit(rng, 16);
        const PositionIndex3 pq{rng.next_double() * 64, rng.next_double() * 16,
                                rng.next_double() * 16};
        const PositionIndex3 pk{rng.next_double() * 64, rng.next_double() * 16,
                                rng.next_double() * 16};
        const PositionIndex3 delta{rng.next_double() * 32, rng.next_double() * 32,
                                   rng.next_double() * 32};

        double norm2 = 0.0;
        for (double x : rotate(q, pq, cfg)) norm2 += x * x;
        expect(std::abs(std::sqrt(norm2) - 1.0) <= 1e-12, "norm preserved to 1e-12");

        const double a = attention_logit(q, k, pq, pk, cfg);
        const double b = attention_logit(q, k, pq + delta, pk + delta, cfg);
        expect(std::abs(a - b) <= 1e-9, "shift invariance within 1e-9");
        if (failures_in_criterion) return;
    }

    // s-only configuration against an independent complex-arithmetic rotary.
    RotaryConfig s_only;
    s_only.head_dim = 16;
    s_only.split_s = 8;
    s_only.split_r = 0;
    s_only.split_c = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = random_unit(rng, 16);
        const double pos = rng.next_double() * 128.0;
        const auto got = rotate(v, {pos, 0, 0}, s_only);
        for (int k = 0; k < 8; ++k) {
            const double theta = pos * std::pow(s_only.base, -2.0 * k / 16.0);
            const auto z = std::complex<double>(v[2 * k], v[2 * k + 1]) *
                           std::polar(1.0, theta);
            expect(std::abs(got[2 * k] - z.real()) <= 1e-9 &&
                       std::abs(got[2 * k + 1] - z.imag()) <= 1e-9,
                   "matches 1d rotary reference within 1e-9");
        }
        if (failures_in_criterion) return;
    }
}

// --- criterion 7: perturbation contracts ------------------------------------------

void criterion_perturbation() {
    using testutil::IMG;
    using testutil::T;
    SplitMix64 rng(0x9E7);

    for (int trial = 0; trial < 50; ++trial) {
        const auto seq = build_sequence(testutil::random_spec(rng, 4, 96));
        const auto base = derive_mspe(seq);
        PerturbSpec spec;
        spec.kind = PerturbKind::shuffle;
        spec.proportion = rng.next_double();
        spec.seed = rng.next();
        const auto shuffled = shuffle_visual_indices(base, spec);
        std::multiset<std::tuple<double, double, double>> before, after;
        for (std::size_t i = 0; i < base.entries.size(); ++i) {
            if (base.entries[i].modality != Modality::visual) {
                expect(shuffled.entries[i].index == base.entries[i].index,
                       "non-visual entries untouched");
                continue;
            }
            const auto& x = base.entries[i].index;
            const auto& y = shuffled.entries[i].index;
            before.emplace(x.s, x.r, x.c);
            after.emplace(y.s, y.r, y.c);
        }
        expect(before == after, "shuffle preserves the index multiset exactly");
        if (failures_in_criterion) return;
    }

    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.bounded(60));
        const int n_gaps = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n) + 1));
        const int gap_size = 1 + static_cast<int>(rng.bounded(6));
        const auto base = derive_1d(testutil::seq({T(n)}));
        PerturbSpec spec;
        spec.kind = PerturbKind::visual_gaps;
        spec.n_gaps = n_gaps;
        spec.gap_size = gap_size;
        spec.seed = rng.next();
        const auto gapped = insert_visual_gaps(base, spec);
        for (std::size_t i = 1; i < gapped.entries.size(); ++i)
            expect(gapped.entries[i].index.s > gapped.entries[i - 1].index.s,
                   "gaps preserve s order");
        const double total_shift =
            gapped.entries.back().index.s - base.entries.back().index.s;
        expect(total_shift == static_cast<double>(n_gaps) * gap_size,
               "total shift equals n_gaps * gap_size");
        if (failures_in_criterion) return;
    }

    SweepConfig cfg;
    cfg.strategy = Strategy::mspe;
    cfg.kind = PerturbKind::shuffle;
    cfg.levels = {0.0, 0.5, 1.0};
    cfg.trials = 4;
    cfg.seed = 2027;
    cfg.rotary = RotaryConfig::with_default_split(8);
    const auto seq = testutil::seq({T(2), IMG(2, 2), T()});
    const auto rows_a = run_sweep(seq, cfg);
    const auto rows_b = run_sweep(seq, cfg);
    expect(sweep_to_csv(rows_a) == sweep_to_csv(rows_b),
           "sweep is seed-deterministic across runs");
    for (const auto& row : rows_a)
        if (row.level == 0.0)
            expect(row.divergence == 0.0, "level-0 divergence is exactly zero");
}

// --- criterion 8: cli round trips ----------------------------------------------------

struct CliOutput {
    int code;
    std::string out;
};

CliOutput cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str()};
}

void criterion_cli_round_trips() {
    testutil::TempDir dir;
    write_file(dir.path("s.json"),
               R"({"items":[{"kind":"text","count":2},{"kind":"image","rows":2,"cols":3},{"kind":"text"}]})");

    const auto seq = build_sequence(read_sequence_spec(dir.path("s.json")));
    const auto want = derive_omega(seq, 0.5);

    const std::vector<std::string> args{
        "derive", "--strategy", "omega", "--seq", dir.path("s.json").string(),
        "--gamma", "0.5",      "--out", dir.path("a.csv").string()};
    expect(cli(args).code == 0, "derive succeeds");
    const auto parsed = read_assignment(dir.path("a.csv"));
    expect(parsed.entries.size() == want.entries.size(), "row per token");
    for (std::size_t i = 0; i < want.entries.size(); ++i) {
        const auto& a = parsed.entries[i];
        const auto& b = want.entries[i];
        expect(a.seq_pos == b.seq_pos && a.modality == b.modality,
               "integer fields are exact");
        // Reals round-trip through the 9-significant-digit format.
        expect(format_real(a.index.s) == format_real(b.index.s) &&
                   format_real(a.index.r) == format_real(b.index.r) &&
                   format_real(a.index.c) == format_real(b.index.c),
               "reals round-trip at format precision");
    }
    expect(parsed.gamma_used.has_value() && *parsed.gamma_used == 0.5,
           "gamma survives the file");

    // Same matrix through both embedding encodings gives identical reports.
    EmbeddingMatrix m;
    m.n_rows = 8;
    m.n_cols = 2;
    m.values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
    write_embedding(dir.path("m.emb"), m, true);
    write_embedding(dir.path("m.csv"), m, false);
    const auto ent_a = cli({"entropy", dir.path("m.emb").string()});
    const auto ent_b = cli({"entropy", dir.path("m.csv").string()});
    expect(ent_a.code == 0 && ent_b.code == 0 && ent_a.out == ent_b.out,
           "emb1 and csv encodings agree");

    // Byte-identical repeated invocations.
    const std::vector<std::string> sweep_args{
        "sweep",    "--seq",     dir.path("s.json").string(),
        "--strategy", "mspe",    "--perturb", "shuffle",
        "--levels", "0,0.5,1",   "--trials",  "3",
        "--seed",   "17"};
    const auto sweep_a = cli(sweep_args);
    const auto sweep_b = cli(sweep_args);
    expect(sweep_a.code == 0 && sweep_a.out == sweep_b.out,
           "repeated invocations are byte-identical");
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void()> fn;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "entropy-oracle-equivalence", 10.0, criterion_entropy_oracle},
        {2, "entropy-bounds-invariances", 10.0, criterion_entropy_invariances},
        {3, "gamma-contract", 1.0, criterion_gamma_contract},
        {4, "mspe-structural-invariants", 5.0, criterion_mspe_structure},
        {5, "strategy-cross-checks", 1.0, criterion_cross_checks},
        {6, "rotary-properties", 10.0, criterion_rotary},
        {7, "perturbation-contracts", 10.0, criterion_perturbation},
        {8, "cli-round-trips", 5.0, criterion_cli_round_trips},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        failures_in_criterion = 0;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.fn();
        } catch (const std::exception& e) {
            ++failures_in_criterion;
            std::printf("      exception: %s\n", e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        const bool in_budget = elapsed < criterion.budget_seconds;
        if (!in_budget)
            std::printf("      over budget: %.2fs (limit %.0fs)\n", elapsed,
                        criterion.budget_seconds);
        const bool ok = failures_in_criterion == 0 && in_budget;
        std::printf("%s  %d %-28s (%.2fs)\n", ok ? "PASS" : "FAIL", criterion.id,
                    criterion.name, elapsed);
        if (!ok) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
