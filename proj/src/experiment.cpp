#include "bsskit/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bsskit/adaptive.hpp"
#include "bsskit/algebraic.hpp"
#include "bsskit/error.hpp"
#include "bsskit/eval.hpp"
#include "bsskit/fixedpoint.hpp"
#include "bsskit/moments.hpp"
#include "bsskit/random.hpp"
#include "bsskit/sos.hpp"

namespace bsskit {

namespace {

const std::map<std::string, std::vector<std::string>>& allowed_parameters() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"amuse", {"lag", "gap_tolerance", "rank_tolerance"}},
        {"adaptive", {"step_size", "score", "mode", "epochs", "init", "prewhiten", "tolerance"}},
        {"fastica", {"variant", "score", "step_size", "max_iterations", "tolerance", "count", "rank_tolerance"}},
        {"sea", {"max_iterations", "tolerance", "count", "rank_tolerance"}},
        {"jade", {"rank_tolerance"}},
        {"jacobi", {"rank_tolerance", "sweep_tolerance"}},
        {"cma", {"step_size", "epochs", "rank_tolerance"}},
        {"rank1_sea", {"max_iterations", "tolerance", "rank_tolerance"}},
        {"unimodal", {"length", "mu1", "mu2", "epochs", "rank_tolerance"}},
        {"det_cm", {"block"}},
    };
    return table;
}

const std::set<std::string>& mixing_kinds() {
    static const std::set<std::string> kinds = {"random", "random_orthogonal", "random_condition", "identity",
                                                "convolutive"};
    return kinds;
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.size() == 1 && out.front().empty()) out.clear();
    return out;
}

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        config_error(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    return v;
}

template <class Int>
Int to_integer(std::string_view key, std::string_view text) {
    Int v{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        config_error(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    if (text == "true") return true;
    if (text == "false") return false;
    config_error(std::string(key) + ": expected true or false");
}

// Typed access to algorithm.* parameters with range checks.
class Params {
public:
    explicit Params(const std::map<std::string, std::string>& raw) : raw_(raw) {}

    double real(const std::string& name, double fallback, double lo, double hi, bool lo_open = false) const {
        const auto it = raw_.find(name);
        const double v = it == raw_.end() ? fallback : to_double("algorithm." + name, it->second);
        if (v < lo || v > hi || (lo_open && v == lo))
            config_error("algorithm." + name + " out of range");
        return v;
    }
    long long integer(const std::string& name, long long fallback, long long lo, long long hi) const {
        const auto it = raw_.find(name);
        const auto v = it == raw_.end() ? fallback : to_integer<long long>("algorithm." + name, it->second);
        if (v < lo || v > hi) config_error("algorithm." + name + " out of range");
        return v;
    }
    std::string choice(const std::string& name, const std::string& fallback,
                       const std::vector<std::string>& choices) const {
        const auto it = raw_.find(name);
        const std::string v = it == raw_.end() ? fallback : it->second;
        if (std::find(choices.begin(), choices.end(), v) == choices.end())
            config_error("algorithm." + name + ": unsupported value '" + v + "'");
        return v;
    }
    bool flag(const std::string& name, bool fallback) const {
        const auto it = raw_.find(name);
        return it == raw_.end() ? fallback : to_bool("algorithm." + name, it->second);
    }

private:
    const std::map<std::string, std::string>& raw_;
};

struct AlgoParams {
    Eigen::Index lag = kDefaultAmuseLag;
    double gap_tolerance = kDefaultGapTolerance;
    double rank_tolerance = kDefaultRankTolerance;
    double step_size = 0.0;
    ScoreKind score = ScoreKind::Cubic;
    UpdateMode mode = UpdateMode::Relative;
    int epochs = 5;
    InitKind init = InitKind::Identity;
    bool prewhiten = true;
    double tolerance = 0.0;
    FastIcaVariant variant = FastIcaVariant::newton();
    int max_iterations = 200;
    Eigen::Index count = 0;  // 0: every sphered channel
    double sweep_tolerance = 1e-14;
    Eigen::Index length = 16;
    double mu1 = 0.5;
    double mu2 = 0.05;
    Eigen::Index block = 0;
};

constexpr long long kMaxInt = 1'000'000'000;

AlgoParams parse_params(const Scenario& s) {
    const auto& table = allowed_parameters();
    const auto entry = table.find(s.algorithm);
    if (entry == table.end()) config_error("algorithm.name: unknown algorithm '" + s.algorithm + "'");
    for (const auto& [name, value] : s.parameters)
        if (std::find(entry->second.begin(), entry->second.end(), name) == entry->second.end())
            config_error("algorithm." + name + " is not a parameter of " + s.algorithm);

    const Params p(s.parameters);
    AlgoParams a;
    const std::string& alg = s.algorithm;
    if (alg == "unimodal") a.rank_tolerance = 1e-9;
    a.rank_tolerance = p.real("rank_tolerance", a.rank_tolerance, 0.0, 1.0, true);
    if (a.rank_tolerance >= 1.0) config_error("algorithm.rank_tolerance must be < 1");

    if (alg == "amuse") {
        a.lag = p.integer("lag", kDefaultAmuseLag, 1, s.samples - 1);
        a.gap_tolerance = p.real("gap_tolerance", kDefaultGapTolerance, 0.0, 1e300);
    } else if (alg == "adaptive") {
        a.step_size = p.real("step_size", 0.005, 0.0, 1e300);
        a.score = *parse_score_kind(p.choice("score", "cubic", {"cubic", "tanh", "sign_switching"}));
        const auto mode = p.choice("mode", "relative", {"plain", "relative", "nonlinear_pca", "anti_hebbian"});
        a.mode = mode == "plain"           ? UpdateMode::Plain
                 : mode == "relative"      ? UpdateMode::Relative
                 : mode == "nonlinear_pca" ? UpdateMode::NonlinearPca
                                           : UpdateMode::AntiHebbian;
        a.epochs = static_cast<int>(p.integer("epochs", 5, 1, kMaxInt));
        a.init = p.choice("init", "identity", {"identity", "random_orthogonal"}) == "identity" ? InitKind::Identity
                                                                                              : InitKind::RandomOrthogonal;
        a.prewhiten = p.flag("prewhiten", true);
        a.tolerance = p.real("tolerance", 1e-6, 0.0, 1e300, true);
    } else if (alg == "fastica" || alg == "sea") {
        if (alg == "fastica") {
            const auto v = p.choice("variant", "newton", {"newton", "fixed_point", "gradient"});
            const double mu = p.real("step_size", 0.1, 0.0, 1e300, true);
            a.variant = v == "newton"        ? FastIcaVariant::newton()
                        : v == "fixed_point" ? FastIcaVariant::fixed_point()
                                             : FastIcaVariant::gradient(mu);
            a.score = *parse_score_kind(p.choice("score", "cubic", {"cubic", "tanh"}));
        } else {
            // E[u y^3] - 3g on sphered data: the cumulant power step C * g * g * g.
            a.variant = FastIcaVariant::newton();
            a.score = ScoreKind::Cubic;
        }
        a.max_iterations = static_cast<int>(p.integer("max_iterations", 200, 1, kMaxInt));
        a.tolerance = p.real("tolerance", 1e-8, 0.0, 1.0, true);
        a.count = p.integer("count", 0, 0, s.source_count());
    } else if (alg == "jacobi") {
        a.sweep_tolerance = p.real("sweep_tolerance", 1e-14, 0.0, 1e300, true);
    } else if (alg == "cma") {
        a.step_size = p.real("step_size", 0.01, 0.0, 1e300);
        a.epochs = static_cast<int>(p.integer("epochs", 5, 1, kMaxInt));
    } else if (alg == "rank1_sea") {
        a.max_iterations = static_cast<int>(p.integer("max_iterations", 500, 1, kMaxInt));
        a.tolerance = p.real("tolerance", 1e-12, 0.0, 1.0, true);
    } else if (alg == "unimodal") {
        a.length = p.integer("length", 16, 1, s.samples);
        a.mu1 = p.real("mu1", 0.5, 0.0, 1e300, true);
        a.mu2 = p.real("mu2", 0.05, 0.0, 1e300);
        a.epochs = static_cast<int>(p.integer("epochs", 5, 1, kMaxInt));
    } else if (alg == "det_cm") {
        const Eigen::Index m = s.sensor_count();
        a.block = p.integer("block", s.samples, m * m + 1, s.samples);
    }
    return a;
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return Rng::substream(seed, tag).next(); }

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
    return m;
}

std::vector<ScoreFunction> output_scores(const SignalMatrix& y, ScoreKind kind) {
    auto scores = uniform_scores(y.channels(), kind);
    if (kind == ScoreKind::SignSwitching)
        for (Eigen::Index i = 0; i < y.channels(); ++i)
            scores[static_cast<std::size_t>(i)].set_sign(kurtosis(y.row(i)) >= 0.0 ? 1.0 : -1.0);
    return scores;
}

void run_algorithm(const Scenario& s, const AlgoParams& a, const GeneratedData& d, RunRecord& rec) {
    const SignalMatrix& x = d.mixture;
    const std::string& alg = s.algorithm;
    const std::uint64_t algo_seed = derive(d.seed, 4);

    auto score_separator = [&](const Separator& sep) {
        rec.index_db = separation_index(sep.demixing() * d.mixing);
    };
    auto score_row = [&](const Eigen::RowVectorXd& combined) { rec.index_db = extraction_index(combined.transpose()); };

    if (alg == "amuse") {
        score_separator(amuse(x, a.lag, a.gap_tolerance, a.rank_tolerance));
    } else if (alg == "adaptive") {
        AdaptConfig cfg;
        cfg.step_size = a.step_size;
        cfg.mode = a.mode;
        cfg.max_iterations = a.epochs;
        cfg.convergence_tolerance = a.tolerance;
        cfg.init = a.init;
        cfg.init_seed = algo_seed;
        cfg.prewhiten = a.prewhiten;
        const SeparationRun run = run_separation(x, {ScoreFunction(a.score)}, cfg);
        rec.iterations = run.iterations;
        score_separator(run.separator);
        const SignalMatrix y = run.separator.apply(x);
        if (y.channels() >= 2) {
            const StabilityReport report = stability_check(y, output_scores(y, a.score));
            rec.stability = StabilityVerdict{report.stable, report.violations};
        }
    } else if (alg == "fastica" || alg == "sea") {
        auto w = whiten(x, a.rank_tolerance);
        const Eigen::Index count = a.count == 0 ? w.sphered.channels() : a.count;
        DeflationOptions opts{a.variant, a.max_iterations, a.tolerance, algo_seed};
        Separator rows = deflate_extract(w.sphered, ScoreFunction(a.score), count, opts);
        score_separator(Separator{std::move(rows.rotation), std::move(w.whitener)});
    } else if (alg == "jade") {
        score_separator(jade(x, a.rank_tolerance));
    } else if (alg == "jacobi") {
        auto w = whiten(x, a.rank_tolerance);
        Matrix q = jacobi_diagonalize(estimate_cum4(w.sphered), a.sweep_tolerance);
        score_separator(Separator{std::move(q), std::move(w.whitener)});
    } else if (alg == "cma") {
        auto w = whiten(x, a.rank_tolerance);
        Vector g = Vector::Unit(w.sphered.channels(), 0);
        for (int e = 0; e < a.epochs; ++e) {
            for (Eigen::Index t = 0; t < w.sphered.samples(); ++t) g = cma_step(g, w.sphered.sample(t), a.step_size);
            if (!g.allFinite() || g.norm() > 1e6) throw Error(ErrorCode::Diverged, "CMA weights diverged");
        }
        rec.iterations = a.epochs;
        score_row(g.transpose() * w.whitener.matrix * d.mixing);
    } else if (alg == "rank1_sea") {
        auto w = whiten(x, a.rank_tolerance);
        const Cumulant4Tensor c = estimate_cum4(w.sphered);
        const Rank1Init init = rank1_init(c);
        const HopmResult h = hopm(c, init.g0, a.max_iterations, a.tolerance);
        rec.iterations = h.iterations;
        score_row(h.g.transpose() * w.whitener.matrix * d.mixing);
    } else if (alg == "unimodal") {
        EqualizerOptions opts;
        opts.mu1 = a.mu1;
        opts.mu2 = a.mu2;
        opts.epochs = a.epochs;
        const EqualizerResult res = unimodal_equalizer(x, a.length, opts, a.rank_tolerance);
        rec.iterations = a.epochs;
        score_row(res.equalizer() * lift_convolutive(d.taps, a.length));
    } else if (alg == "det_cm") {
        const CmSolution sol = deterministic_cm(SignalMatrix(x.data().leftCols(a.block)));
        score_row(sol.g.transpose() * d.mixing);
    }
}

RunRecord run_repetition(const Scenario& s, const AlgoParams& a, int rep) {
    RunRecord rec;
    rec.scenario_id = s.id;
    rec.rep = rep;
    rec.seed = repetition_seed(s.seed, rep);
    rec.algorithm = s.algorithm;
    const auto start = std::chrono::steady_clock::now();
    try {
        const GeneratedData d = generate_data(s, rep);
        run_algorithm(s, a, d, rec);
    } catch (const Error& e) {
        rec.status = std::string(to_string(e.code()));
        rec.message = e.what();
        rec.index_db.reset();
        rec.stability.reset();
    } catch (const std::exception& e) {
        rec.status = "Internal";
        rec.message = e.what();
        rec.index_db.reset();
        rec.stability.reset();
    }
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, params] : allowed_parameters()) out.push_back(name);
        return out;
    }();
    return names;
}

void set_scenario_value(Scenario& s, std::string_view key, std::string_view value) {
    const std::string k(key);
    const std::string v = trim(value);
    if (k == "id") {
        if (v.empty()) config_error("id must be nonempty");
        s.id = v;
    } else if (k == "samples") {
        s.samples = to_integer<Eigen::Index>(k, v);
    } else if (k == "seed") {
        s.seed = to_integer<std::uint64_t>(k, v);
    } else if (k == "repetitions") {
        s.repetitions = to_integer<int>(k, v);
    } else if (k == "sources.kinds") {
        s.source_kinds.clear();
        for (const auto& item : split_list(v)) {
            const auto kind = parse_source_kind(item);
            if (!kind) config_error("sources.kinds: unknown source kind '" + item + "'");
            s.source_kinds.push_back(*kind);
        }
    } else if (k == "sources.ar_coefficients") {
        s.ar_coefficients.clear();
        for (const auto& item : split_list(v)) s.ar_coefficients.push_back(to_double(k, item));
    } else if (k == "mixing.kind") {
        s.mixing_kind = v;
    } else if (k == "mixing.condition") {
        s.condition = to_double(k, v);
    } else if (k == "mixing.sensors") {
        s.sensors = to_integer<Eigen::Index>(k, v);
    } else if (k == "mixing.noise_std") {
        s.noise_std = to_double(k, v);
    } else if (k == "mixing.order") {
        s.order = to_integer<Eigen::Index>(k, v);
    } else if (k == "algorithm.name") {
        s.algorithm = v;
    } else if (k.rfind("algorithm.", 0) == 0 && k.size() > 10) {
        s.parameters[k.substr(10)] = v;
    } else {
        throw Error(ErrorCode::InvalidPath, "unknown scenario key '" + k + "'");
    }
}

void Scenario::validate() const {
    if (samples < 1) config_error("samples must be >= 1");
    if (repetitions < 0) config_error("repetitions must be >= 0");
    if (source_kinds.empty()) config_error("sources.kinds must list at least one source");
    const auto ar_count = std::count(source_kinds.begin(), source_kinds.end(), SourceKind::Ar1);
    if (static_cast<std::size_t>(ar_count) != ar_coefficients.size())
        config_error("sources.ar_coefficients needs one value per ar1 source");
    for (double rho : ar_coefficients)
        if (!(std::abs(rho) < 1.0)) config_error("ar coefficients must lie in (-1, 1)");
    if (!mixing_kinds().contains(mixing_kind)) config_error("mixing.kind: unknown kind '" + mixing_kind + "'");
    if (sensor_count() < 1) config_error("mixing.sensors must be >= 1");
    if ((mixing_kind == "random_orthogonal" || mixing_kind == "random_condition") && sensor_count() != source_count())
        config_error("mixing.kind " + mixing_kind + " needs as many sensors as sources");
    if (!(condition >= 1.0)) config_error("mixing.condition must be >= 1");
    if (!(noise_std >= 0.0)) config_error("mixing.noise_std must be >= 0");
    if (order < 0) config_error("mixing.order must be >= 0");
    if (order > 0 && mixing_kind != "convolutive") config_error("mixing.order needs mixing.kind = convolutive");
    if (algorithm.empty()) config_error("algorithm.name is required");
    if ((algorithm == "unimodal") != (mixing_kind == "convolutive"))
        config_error("the unimodal equalizer runs exactly on convolutive mixtures");
    parse_params(*this);
}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) config_error("line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (!seen.insert(key).second) config_error("line " + std::to_string(number) + ": duplicate key " + key);
        try {
            set_scenario_value(s, key, std::string_view(body).substr(eq + 1));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::InvalidPath) config_error("line " + std::to_string(number) + ": unknown key " + key);
            throw;
        }
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open scenario " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::uint64_t repetition_seed(std::uint64_t scenario_seed, int rep) {
    return derive(scenario_seed, static_cast<std::uint64_t>(rep));
}

GeneratedData generate_data(const Scenario& s, int rep) {
    GeneratedData d;
    d.seed = repetition_seed(s.seed, rep);
    std::vector<SourceSpec> specs;
    std::size_t ar_next = 0;
    for (SourceKind kind : s.source_kinds) {
        SourceSpec spec{kind, std::nullopt, d.seed};
        if (kind == SourceKind::Ar1) spec.ar_coefficient = s.ar_coefficients.at(ar_next++);
        specs.push_back(spec);
    }
    d.sources = generate_sources(specs, s.samples);

    const Eigen::Index n = s.source_count();
    const Eigen::Index m = s.sensor_count();
    const std::uint64_t mix_seed = derive(d.seed, 1);
    const std::uint64_t noise_seed = derive(d.seed, 3);

    if (s.mixing_kind == "convolutive") {
        const double scale = 1.0 / std::sqrt(static_cast<double>(s.order + 1));
        for (Eigen::Index k = 0; k <= s.order; ++k)
            d.taps.push_back(gaussian_matrix(m, n, derive(mix_seed, static_cast<std::uint64_t>(k)), scale));
        d.mixture = mix(ConvolutiveMixing{d.taps}, d.sources);
        if (s.noise_std > 0.0) {
            const SignalMatrix noisy = mix(NoisyMixing{Matrix::Identity(m, m), s.noise_std, noise_seed}, d.mixture);
            d.mixture = SignalMatrix(noisy.data(), d.mixture.seed(), d.mixture.transient());
        }
        return d;
    }

    if (s.mixing_kind == "random") {
        d.mixing = gaussian_matrix(m, n, mix_seed);
    } else if (s.mixing_kind == "random_orthogonal") {
        d.mixing = random_orthogonal(n, mix_seed);
    } else if (s.mixing_kind == "random_condition") {
        Vector sv(n);
        for (Eigen::Index i = 0; i < n; ++i)
            sv(i) = n == 1 ? 1.0 : std::pow(s.condition, -static_cast<double>(i) / static_cast<double>(n - 1));
        d.mixing = random_orthogonal(n, mix_seed) * sv.asDiagonal() * random_orthogonal(n, derive(mix_seed, 1)).transpose();
    } else {
        d.mixing = Matrix::Identity(m, n);
    }
    d.mixture = s.noise_std > 0.0 ? mix(NoisyMixing{d.mixing, s.noise_std, noise_seed}, d.sources)
                                  : mix(StaticMixing{d.mixing}, d.sources);
    return d;
}

std::vector<RunRecord> run_experiment(const Scenario& scenario) {
    scenario.validate();
    const AlgoParams a = parse_params(scenario);
    std::vector<RunRecord> out;
    out.reserve(static_cast<std::size_t>(scenario.repetitions));
    for (int rep = 0; rep < scenario.repetitions; ++rep) out.push_back(run_repetition(scenario, a, rep));
    return out;
}

std::vector<RunRecord> sweep(const Scenario& scenario, std::string_view path, const std::vector<std::string>& values) {
    const std::string key(path);
    if (key.rfind("algorithm.", 0) == 0 && key != "algorithm.name") {
        const auto& allowed = allowed_parameters().at(scenario.algorithm);
        if (std::find(allowed.begin(), allowed.end(), key.substr(10)) == allowed.end())
            throw Error(ErrorCode::InvalidPath, "'" + key + "' is not a parameter of " + scenario.algorithm);
    }
    std::vector<Scenario> variants;
    for (const auto& value : values) {
        Scenario s = scenario;
        set_scenario_value(s, key, value);
        s.validate();
        variants.push_back(std::move(s));
    }
    std::vector<RunRecord> out;
    for (std::size_t i = 0; i < variants.size(); ++i)
        for (auto& rec : run_experiment(variants[i])) {
            rec.sweep_parameter = key;
            rec.sweep_value = values[i];
            out.push_back(std::move(rec));
        }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

nlohmann::ordered_json to_json(const RunRecord& r, bool include_timing) {
    nlohmann::ordered_json j;
    j["scenario_id"] = r.scenario_id;
    j["rep"] = r.rep;
    j["seed"] = r.seed;
    j["algorithm"] = r.algorithm;
    if (r.sweep_parameter) {
        j["parameter"] = *r.sweep_parameter;
        j["value"] = r.sweep_value.value_or("");
    }
    j["status"] = r.status;
    j["message"] = r.message;
    j["index_db"] = r.index_db ? nlohmann::ordered_json(*r.index_db) : nlohmann::ordered_json(nullptr);
    j["iterations"] = r.iterations;
    if (r.stability) {
        j["stability"] = {{"stable", r.stability->stable}, {"violations", r.stability->violations}};
    } else {
        j["stability"] = nullptr;
    }
    if (include_timing) j["wall_time_ms"] = r.wall_time_ms;
    return j;
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {"scenario_id", "rep", "seed", "algorithm", "index_db", "iters", "status"};
    return cols;
}

std::string to_csv_row(const RunRecord& r) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    };
    return quote(r.scenario_id) + ',' + std::to_string(r.rep) + ',' + std::to_string(r.seed) + ',' +
           quote(r.algorithm) + ',' + (r.index_db ? format_double(*r.index_db) : std::string()) + ',' +
           std::to_string(r.iterations) + ',' + quote(r.status);
}

}  // namespace bsskit
