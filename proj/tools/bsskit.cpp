// bsskit: synthetic-mixture experiments from scenario files.
//
//   bsskit run scenario.cfg [--out records.jsonl] [--csv table.csv]
//   bsskit sweep scenario.cfg --param algorithm.step_size --values 0,0.001,0.01
//   bsskit generate scenario.cfg --sources s.txt --mixture x.txt [--mixing h.txt]
//   bsskit eval --separator g.txt --mixing h.txt
//
// Exit codes: 0 success, 2 configuration error, 3 every repetition failed.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsskit/error.hpp"
#include "bsskit/eval.hpp"
#include "bsskit/experiment.hpp"
#include "bsskit/signal_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAllFailed = 3;

bsskit::Scenario load_with_env(const std::string& path) {
    bsskit::Scenario s = bsskit::load_scenario(path);
    if (const char* env = std::getenv("BSSKIT_SEED"); env != nullptr && *env != '\0') {
        const std::string text(env);
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw bsskit::Error(bsskit::ErrorCode::ConfigError, "BSSKIT_SEED must be an unsigned integer");
        s.seed = seed;
    }
    return s;
}

struct OutputOptions {
    std::string out;
    std::string csv;
    bool no_timing = false;
};

int emit(const std::vector<bsskit::RunRecord>& records, const OutputOptions& opts) {
    std::ofstream file;
    if (!opts.out.empty()) {
        file.open(opts.out);
        if (!file) throw bsskit::Error(bsskit::ErrorCode::IoError, "cannot open " + opts.out);
    }
    std::ostream& out = opts.out.empty() ? std::cout : file;
    for (const auto& r : records) out << bsskit::to_json(r, !opts.no_timing).dump() << '\n';

    if (!opts.csv.empty()) {
        std::ofstream csv(opts.csv);
        if (!csv) throw bsskit::Error(bsskit::ErrorCode::IoError, "cannot open " + opts.csv);
        const auto& cols = bsskit::csv_columns();
        for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
        csv << '\n';
        for (const auto& r : records) csv << bsskit::to_csv_row(r) << '\n';
    }

    if (records.empty()) return 0;
    for (const auto& r : records)
        if (r.ok()) return 0;
    return kExitAllFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind source separation experiments"};
    app.require_subcommand(1);

    std::string scenario_path;
    OutputOptions output;

    auto* run = app.add_subcommand("run", "Run every repetition of a scenario");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("--out", output.out, "JSON lines output (default stdout)");
    run->add_option("--csv", output.csv, "Optional CSV table");
    run->add_flag("--no-timing", output.no_timing, "Omit wall_time_ms");

    std::string param;
    std::vector<std::string> values;
    auto* sw = app.add_subcommand("sweep", "Run a scenario for each value of one parameter");
    sw->add_option("scenario", scenario_path, "Scenario file")->required();
    sw->add_option("--param", param, "Dotted scenario key")->required();
    sw->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
    sw->add_option("--out", output.out, "JSON lines output (default stdout)");
    sw->add_option("--csv", output.csv, "Optional CSV table");
    sw->add_flag("--no-timing", output.no_timing, "Omit wall_time_ms");

    int rep = 0;
    std::string sources_path, mixture_path, mixing_path;
    auto* gen = app.add_subcommand("generate", "Write sources and mixtures of one repetition");
    gen->add_option("scenario", scenario_path, "Scenario file")->required();
    gen->add_option("--rep", rep, "Repetition index")->check(CLI::NonNegativeNumber);
    gen->add_option("--sources", sources_path, "Source signal file")->required();
    gen->add_option("--mixture", mixture_path, "Sensor signal file")->required();
    gen->add_option("--mixing", mixing_path, "Mixing matrix file (static mixing only)");

    std::string separator_path;
    auto* ev = app.add_subcommand("eval", "Score a stored separator against a stored mixing matrix");
    ev->add_option("--separator", separator_path, "Separator matrix file")->required();
    ev->add_option("--mixing", mixing_path, "Mixing matrix file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return emit(bsskit::run_experiment(load_with_env(scenario_path)), output);
        if (*sw) return emit(bsskit::sweep(load_with_env(scenario_path), param, values), output);
        if (*gen) {
            const bsskit::Scenario s = load_with_env(scenario_path);
            const bsskit::GeneratedData d = bsskit::generate_data(s, rep);
            bsskit::save_matrix(sources_path, d.sources.data());
            bsskit::save_matrix(mixture_path, d.mixture.data());
            if (!mixing_path.empty()) {
                if (d.mixing.size() == 0)
                    throw bsskit::Error(bsskit::ErrorCode::ConfigError, "convolutive scenarios have no mixing matrix");
                bsskit::save_matrix(mixing_path, d.mixing);
            }
            return 0;
        }
        if (*ev) {
            const bsskit::GlobalSystem g =
                bsskit::global_system(bsskit::load_matrix(separator_path), bsskit::load_matrix(mixing_path));
            nlohmann::ordered_json j;
            j["index_db"] = bsskit::separation_index(g.s);
            j["residual"] = g.assignment.residual;
            j["permutation"] = g.assignment.permutation;
            j["scales"] = std::vector<double>(g.assignment.scales.data(),
                                              g.assignment.scales.data() + g.assignment.scales.size());
            std::cout << j.dump() << '\n';
            return 0;
        }
    } catch (const bsskit::Error& e) {
        std::cerr << "bsskit: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "bsskit: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
