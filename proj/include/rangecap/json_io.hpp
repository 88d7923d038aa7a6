#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rangecap/backtrack.hpp"
#include "rangecap/capacity.hpp"
#include "rangecap/equilibrium.hpp"
#include "rangecap/experiments.hpp"
#include "rangecap/green.hpp"
#include "rangecap/group.hpp"
#include "rangecap/kernel.hpp"
#include "rangecap/walk.hpp"
#include "rangecap/word_metric.hpp"

namespace rangecap {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// {"backend": ..., "dim": ..., "arity": ..., "generators": [[...], ...]}
Json group_to_json(const Group& group);
/// Accepts the same shape; "generators" may be omitted for the standard set.
/// Throws ValidationError on malformed input.
Group group_from_json(const Json& j);
/// `spec` is either inline JSON (starts with '{') or a path to a JSON file.
Group load_group(std::string_view spec);
/// Parse text as JSON; throws ValidationError with the parser message.
Json parse_json_text(std::string_view text, std::string_view what);

Json element_to_json(const GroupElement& g);
GroupElement element_from_json(const Json& j);

Json to_json(const CapacityConfig& c);
CapacityConfig capacity_config_from_json(const Json& j);

Json to_json(const CapacityEstimate& c);
Json to_json(const GreenEstimate& g);
Json to_json(const GrowthProfile& p);
Json to_json(const KernelTable& k);
Json to_json(const WalkPath& p);
Json to_json(const SimplexMeasure& m);
Json to_json(const EquilibriumResult& r);
Json to_json(const FitSummary& f);
Json to_json(const SeriesRow& r);
Json to_json(const SandwichReport& r);
Json to_json(const CapacitySeriesReport& r);
Json to_json(const CltReport& r);
Json to_json(const KernelDecayReport& r);
Json to_json(const ExitTailReport& r);
Json to_json(const PairGreenReport& r);
Json to_json(const DyadicReport& r);

/// Experiment configuration
///   {"experiment": id, "group": {...}, "grid": [...], "seeds": [...],
///    "estimator": {...}, "params": {...}}
struct ExperimentConfig {
    std::string experiment;
    Json group;
    std::vector<std::uint64_t> grid;
    std::vector<std::uint64_t> seeds;
    CapacityConfig estimator;
    /// Experiment-specific scalars (n, replications, levels, trials, ...).
    Json params = Json::object();
};

Json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const Json& j);

/// Canonical text form: two-space indent, sorted keys, trailing newline.
std::string dump_canonical(const Json& j);

/// Flat rows for plotting: one row per (n, seed, statistic).
struct CsvRow {
    double n = 0.0;
    std::string seed;
    std::string statistic;
    double value = 0.0;
};
std::string to_csv(const std::vector<CsvRow>& rows);
std::vector<CsvRow> csv_rows(const CapacitySeriesReport& r);
std::vector<CsvRow> csv_rows(const CltReport& r);
std::vector<CsvRow> csv_rows(const KernelDecayReport& r);
std::vector<CsvRow> csv_rows(const ExitTailReport& r);
std::vector<CsvRow> csv_rows(const PairGreenReport& r);
std::vector<CsvRow> csv_rows(const DyadicReport& r);
std::vector<CsvRow> csv_rows(const GrowthProfile& p);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace rangecap
