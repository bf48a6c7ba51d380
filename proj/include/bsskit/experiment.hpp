#pragma once

// Declarative experiment runner: scenario files, algorithm dispatch and
// per-repetition result records.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bsskit/linalg.hpp"
#include "bsskit/signals.hpp"

namespace bsskit {

/// Parsed scenario. Text form is one `key = value` per line, `#` comments:
///
///   id = demo
///   samples = 20000
///   seed = 7
///   repetitions = 5
///   sources.kinds = bpsk, bpsk, bpsk
///   sources.ar_coefficients = 0.9, 0.1     (one per ar1 source, in order)
///   mixing.kind = random | random_orthogonal | random_condition | identity | convolutive
///   mixing.condition = 10                  (random_condition)
///   mixing.sensors = 4                     (defaults to the source count)
///   mixing.noise_std = 0
///   mixing.order = 5                       (convolutive)
///   algorithm.name = jade
///   algorithm.<parameter> = value
struct Scenario {
    std::string id = "scenario";
    Eigen::Index samples = 10000;
    std::uint64_t seed = 0;
    int repetitions = 1;
    std::vector<SourceKind> source_kinds;
    std::vector<double> ar_coefficients;
    std::string mixing_kind = "random";
    double condition = 10.0;
    std::optional<Eigen::Index> sensors;
    double noise_std = 0.0;
    Eigen::Index order = 0;
    std::string algorithm;
    std::map<std::string, std::string> parameters;  // algorithm.* without the prefix

    /// Checks every field and the algorithm parameters; throws ConfigError.
    void validate() const;
    Eigen::Index source_count() const { return static_cast<Eigen::Index>(source_kinds.size()); }
    Eigen::Index sensor_count() const { return sensors.value_or(source_count()); }
};

const std::vector<std::string>& algorithm_names();

/// Strict parse (unknown keys, duplicates and bad values are ConfigError)
/// followed by validate().
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Sets one dotted key. Unknown paths throw InvalidPath, bad values
/// ConfigError. Does not validate the whole scenario.
void set_scenario_value(Scenario& scenario, std::string_view key, std::string_view value);

/// Seed of repetition `rep`.
std::uint64_t repetition_seed(std::uint64_t scenario_seed, int rep);

struct GeneratedData {
    std::uint64_t seed = 0;
    SignalMatrix sources;
    SignalMatrix mixture;
    Matrix mixing;             // static mixing matrix (empty for convolutive)
    std::vector<Matrix> taps;  // convolutive taps (empty otherwise)
};

GeneratedData generate_data(const Scenario& scenario, int rep);

struct StabilityVerdict {
    bool stable = false;
    std::vector<std::string> violations;
};

struct RunRecord {
    std::string scenario_id;
    int rep = 0;
    std::uint64_t seed = 0;
    std::string algorithm;
    std::string status = "ok";  // "ok" or the error code name
    std::string message;
    std::optional<double> index_db;
    int iterations = 0;
    std::optional<StabilityVerdict> stability;
    double wall_time_ms = 0.0;
    std::optional<std::string> sweep_parameter;
    std::optional<std::string> sweep_value;

    bool ok() const { return status == "ok"; }
};

/// One record per repetition, in repetition order. Per-repetition failures
/// are recorded, not thrown.
std::vector<RunRecord> run_experiment(const Scenario& scenario);

/// Cross product of `values` for `path` with the repetitions; rows ordered
/// by (value, repetition).
std::vector<RunRecord> sweep(const Scenario& scenario, std::string_view path,
                             const std::vector<std::string>& values);

nlohmann::ordered_json to_json(const RunRecord& record, bool include_timing = true);

const std::vector<std::string>& csv_columns();
std::string to_csv_row(const RunRecord& record);

/// Full round-trip precision, independent of the global locale.
std::string format_double(double v);

}  // namespace bsskit
