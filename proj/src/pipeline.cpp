#include "fimpkit/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "fimpkit/covote_network.hpp"
#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"

namespace fimpkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

double num(double v) { return csv::round_significant(v); }

template <class F>
auto in_stage(const char* stage, F&& body) {
    try {
        return body();
    } catch (Error& e) {
        if (e.stage().empty()) {
            e.set_stage(stage);
        }
        throw;
    }
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
    }
}

class Fnv1a {
public:
    void add(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ull;
        }
        // Length separator keeps ("ab","c") and ("a","bc") apart.
        const auto n = bytes.size();
        for (int i = 0; i < 8; ++i) {
            state_ ^= static_cast<unsigned char>(n >> (8 * i));
            state_ *= 0x100000001b3ull;
        }
    }
    [[nodiscard]] std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::vector<fs::path> landmark_files(const std::string& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        fail(ErrorCode::Io, "landmark directory '" + dir + "' does not exist");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

ordered_json with_hash(const std::string& json_text, const std::string& hash) {
    ordered_json out;
    out["config_hash"] = hash;
    const auto parsed = ordered_json::parse(json_text);
    for (const auto& [key, value] : parsed.items()) {
        out[key] = value;
    }
    return out;
}

std::string csv_with_hash(const std::string& body, const std::string& hash) {
    return "# config_hash=" + hash + "\n" + body;
}

ordered_json outcome_json(const stats::TestOutcome& t) {
    return {{"statistic", num(t.statistic)}, {"p", num(t.p)}, {"pass", t.pass}};
}

ordered_json normality_json(std::span<const double> sample, const PipelineConfig& config) {
    try {
        const auto r = stats::normality_suite(sample, config.alpha, config.lilliefors);
        ordered_json j;
        j["n"] = r.n;
        j["alpha"] = config.alpha;
        j["dagostino_k2"] = outcome_json(r.dagostino);
        j["jarque_bera"] = outcome_json(r.jarque_bera);
        j["kolmogorov_smirnov"] = {{"statistic", num(r.kolmogorov_smirnov.statistic)},
                                   {"p", num(r.kolmogorov_smirnov.p)},
                                   {"p_method", "lilliefors-monte-carlo"},
                                   {"replicates", config.lilliefors.replicates},
                                   {"p_naive", num(r.kolmogorov_smirnov.p_naive)},
                                   {"p_naive_approximate", true},
                                   {"pass", r.kolmogorov_smirnov.pass}};
        j["shapiro_wilk"] = outcome_json(r.shapiro_wilk);
        j["verdict"] = std::string(stats::to_string(r.verdict));
        return j;
    } catch (const Error& e) {
        return {{"n", sample.size()}, {"error", e.what()}};
    }
}

ordered_json t_test_json(const stats::TTestResult& t) {
    return {{"t", num(t.t)},
            {"df", num(t.df)},
            {"p", num(t.p)},
            {"variant", std::string(stats::to_string(t.variant))},
            {"x", "fwhr_fol"},
            {"y", "fwhr_act"}};
}

ordered_json null_json(const NullModelResult& r) {
    ordered_json quantiles = ordered_json::object();
    for (const auto& [level, t] : r.quantiles) {
        quantiles[csv::format_number(level)] = num(t);
    }
    return {{"n_sims", r.n_sims},
            {"seed", r.seed},
            {"scheme", std::string(to_string(r.scheme))},
            {"variant", std::string(stats::to_string(r.variant))},
            {"t_observed", num(r.t_observed)},
            {"p_empirical", num(r.p_empirical)},
            {"quantiles", quantiles}};
}

std::string canonical_config(const PipelineConfig& c) {
    std::ostringstream out;
    out << "version=" << kVersion << '\n';
    out << "delimiter=" << static_cast<int>(c.delimiter) << '\n';
    for (const auto& [token, vote] : c.vote_aliases) {
        out << "alias=" << token << ':' << to_string(vote) << '\n';
    }
    out << "bill_types=";
    for (auto t : c.bill_types) {
        out << to_string(t) << ';';
    }
    out << "\nallow_unknown_bills=" << c.allow_unknown_bills << "\nexclude_zero_rows=" << c.exclude_zero_rows;
    out << "\nk=" << to_string(c.k) << "\nvariant=" << stats::to_string(c.variant) << "\npaired=" << c.paired;
    out << "\nalpha=" << csv::format_number(c.alpha) << "\nlilliefors=" << c.lilliefors.replicates << ':'
        << c.lilliefors.seed;
    out << "\nnull=" << to_string(c.null_scheme) << ':' << c.null_sims << "\nseed=" << c.seed;
    out << "\nkde=" << (c.kde.bandwidth ? csv::format_number(*c.kde.bandwidth) : std::string("silverman")) << ':'
        << c.kde.grid_points;
    out << "\nquality=" << csv::format_number(c.quality.min_confidence) << ':'
        << csv::format_number(c.quality.margin_px);
    out << "\nfwhr=" << static_cast<int>(c.fwhr.reference) << ':' << static_cast<int>(c.fwhr.eyelid_line) << ':'
        << csv::format_number(c.fwhr.level_tolerance_deg) << '\n';
    return out.str();
}

void validate(const PipelineConfig& c) {
    if (c.rollcall.empty()) {
        fail(ErrorCode::Config, "a roll-call file is required");
    }
    if (c.traits.empty() == c.landmarks.empty()) {
        fail(ErrorCode::Config, "exactly one of a traits file or a landmark directory is required");
    }
    if (c.out_dir.empty()) {
        fail(ErrorCode::Config, "an output directory is required");
    }
    if (!c.bill_types.empty() && c.bills.empty()) {
        fail(ErrorCode::Config, "a bill-type filter needs the bills file");
    }
    if (c.k.mode == KMode::Fixed && c.k.fixed_k < 1) {
        fail(ErrorCode::Config, "fixed K must be at least 1");
    }
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
        fail(ErrorCode::Config, "alpha must lie in (0, 1)");
    }
}

}  // namespace

std::optional<KPolicy> parse_k_policy(std::string_view text) {
    const auto lower = csv::to_lower(csv::trim(text));
    if (lower == "elbow") {
        return KPolicy{KMode::Elbow, 0};
    }
    if (lower == "sqrt") {
        return KPolicy{KMode::Sqrt, 0};
    }
    constexpr std::string_view prefix = "fixed:";
    if (lower.starts_with(prefix)) {
        const std::string_view digits = std::string_view(lower).substr(prefix.size());
        std::size_t k = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty() && k >= 1) {
            return KPolicy{KMode::Fixed, k};
        }
    }
    return std::nullopt;
}

std::string to_string(const KPolicy& policy) {
    switch (policy.mode) {
        case KMode::Elbow: return "elbow";
        case KMode::Sqrt: return "sqrt";
        case KMode::Fixed: return "fixed:" + std::to_string(policy.fixed_k);
    }
    return "?";
}

std::string config_hash(const PipelineConfig& config) {
    Fnv1a h;
    h.add(canonical_config(config));
    for (const auto* path : {&config.rollcall, &config.bills, &config.actors, &config.traits}) {
        // Unreadable inputs are reported by the stage that reads them.
        if (path->empty()) {
            h.add("<none>");
        } else if (!fs::is_regular_file(*path)) {
            h.add("<missing>");
        } else {
            h.add(read_bytes(*path));
        }
    }
    if (!config.landmarks.empty() && fs::is_directory(config.landmarks)) {
        for (const auto& file : landmark_files(config.landmarks)) {
            h.add(file.filename().string());
            h.add(read_bytes(file.string()));
        }
    }
    return h.hex();
}

std::string stats_report_json(std::span<const double> actual, std::span<const double> followed,
                              const PipelineConfig& config, const NullModelResult* null_model,
                              const std::string& hash) {
    ordered_json j;
    j["config_hash"] = hash;
    j["n"] = actual.size();
    j["t_test"] = t_test_json(stats::two_sample_t_test(followed, actual, config.variant));
    if (config.paired && config.variant != stats::TTestVariant::Paired) {
        j["paired"] = t_test_json(stats::two_sample_t_test(followed, actual, stats::TTestVariant::Paired));
    }
    j["normality_act"] = normality_json(actual, config);
    j["normality_fol"] = normality_json(followed, config);
    j["null_model"] = null_model ? null_json(*null_model) : ordered_json(nullptr);
    return j.dump(2) + "\n";
}

FimpTable read_fimp_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) {
        fail(ErrorCode::EmptyInput, "'" + path + "' has no rows");
    }
    const auto& header = rows.front();
    auto column = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (csv::to_lower(csv::trim(header[i])) == name) {
                return i;
            }
        }
        fail(ErrorCode::InvalidValue, "'" + path + "' lacks a '" + std::string(name) + "' column");
    };
    const std::size_t id_col = column("actor_id");
    const std::size_t act_col = column("fwhr_act");
    const std::size_t fol_col = column("fwhr_fol");
    FimpTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            fail(ErrorCode::RaggedRow, "'" + path + "' row " + std::to_string(r + 1) + " has " +
                                           std::to_string(row.size()) + " fields");
        }
        auto parse = [&](std::size_t col) {
            const std::string text = csv::trim(row[col]);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
                fail(ErrorCode::InvalidValue, "'" + path + "' row " + std::to_string(r + 1) + ": bad number '" +
                                                  text + "'");
            }
            return v;
        };
        table.actors.push_back(csv::trim(row[id_col]));
        table.actual.push_back(parse(act_col));
        table.followed.push_back(parse(fol_col));
    }
    return table;
}

RunReport run_pipeline(const PipelineConfig& config) {
    in_stage("config", [&] {
        validate(config);
        return 0;
    });
    RunReport report;
    report.config_hash = in_stage("config", [&] { return config_hash(config); });
    const std::string& hash = report.config_hash;

    const fs::path out_dir(config.out_dir);
    in_stage("output", [&] {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) {
            fail(ErrorCode::Io, "cannot create output directory '" + config.out_dir + "': " + ec.message());
        }
        return 0;
    });
    auto emit = [&](const std::string& name, const std::string& text) {
        in_stage("output", [&] {
            write_text(out_dir / name, text);
            return 0;
        });
        report.outputs.push_back(name);
    };

    // ingest
    RollcallOptions rollcall_options;
    rollcall_options.delimiter = config.delimiter;
    for (const auto& [token, vote] : config.vote_aliases) {
        rollcall_options.vocabulary.add_alias(token, vote);
    }
    const VoteMatrix all_votes = in_stage("ingest", [&] { return parse_rollcall_file(config.rollcall, rollcall_options); });
    const auto bills = in_stage("ingest", [&] {
        return config.bills.empty() ? std::vector<BillRecord>{} : parse_bills_file(config.bills, config.delimiter);
    });
    const auto actors = in_stage("ingest", [&] {
        return config.actors.empty() ? std::vector<ActorRecord>{} : parse_actors_file(config.actors, config.delimiter);
    });

    TraitTable traits;
    if (!config.traits.empty()) {
        traits = in_stage("traits", [&] { return parse_traits_file(config.traits, config.delimiter); });
    } else {
        const auto records =
            in_stage("traits", [&] { return face::measure_directory(config.landmarks, config.quality, config.fwhr); });
        emit("traits.csv", csv_with_hash(face::traits_csv(records), hash));
        in_stage("traits", [&] {
            for (const auto& r : records) {
                if (r.quality == face::QualityStatus::Pass) {
                    traits.insert(r.actor_id, r.fwhr);
                }
            }
            return 0;
        });
    }

    const VoteMatrix votes = in_stage("filter", [&] {
        if (config.bill_types.empty()) {
            return all_votes;
        }
        FilterOptions options;
        options.allow_unknown_bills = config.allow_unknown_bills;
        return filter_by_bill_type(all_votes, bills, config.bill_types, options);
    });

    const auto summary = in_stage("summary", [&] { return summary_stats(votes, actors, traits, bills); });
    emit("summary.json", with_hash(summary_to_json(summary), hash).dump(2) + "\n");

    // Cohort: actors with a trait value (and a Yes vote, in strict mode).
    const VoteMatrix cohort = in_stage("join", [&] {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < votes.actor_count(); ++i) {
            const auto& id = votes.actors()[i];
            if (!traits.contains(id) || (config.exclude_zero_rows && votes.encoded().row_count(i) == 0)) {
                report.excluded.push_back(id);
                continue;
            }
            keep.push_back(i);
        }
        if (keep.size() < 2) {
            fail(ErrorCode::EmptyActorSet, std::to_string(keep.size()) + " actor(s) have both votes and a trait");
        }
        return votes.select_actors(keep);
    });
    std::vector<double> values;
    for (const auto& id : cohort.actors()) {
        values.push_back(*traits.find(id));
    }
    report.actor_count = cohort.actor_count();
    report.bill_count = cohort.bill_count();

    const auto graph = in_stage("network", [&] { return build_covote_graph(cohort); });
    const auto net = in_stage("network", [&] { return network_stats(graph, config.threads); });
    emit("network_stats.json", with_hash(network_stats_to_json(net), hash).dump(2) + "\n");
    emit("edges.csv", csv_with_hash(graph.edge_list_csv(), hash));

    const auto communities = in_stage("communities", [&] { return leading_eigen_communities(graph); });
    report.community_count = communities.community_count;
    report.modularity = communities.modularity;
    emit("communities.csv", csv_with_hash(communities_csv(communities), hash));

    const std::size_t n = cohort.actor_count();
    report.k_selection = in_stage("k-selection", [&] {
        KSelection s;
        switch (config.k.mode) {
            case KMode::Elbow: {
                const auto range = default_k_range(n);
                return knn_elbow_select_k(cohort.encoded(), communities.labels, range);
            }
            case KMode::Sqrt:
                s.chosen_k = sqrt_k_heuristic(n);
                s.method = KMethod::SqrtHeuristic;
                break;
            case KMode::Fixed:
                if (config.k.fixed_k >= n) {
                    fail(ErrorCode::KOutOfRange, "fixed K = " + std::to_string(config.k.fixed_k) +
                                                     " needs at most n - 1 = " + std::to_string(n - 1));
                }
                s.chosen_k = config.k.fixed_k;
                s.method = KMethod::Fixed;
                break;
        }
        s.k_range = {s.chosen_k};
        return s;
    });
    const std::size_t k = report.k_selection.chosen_k;
    emit("k_selection.json",
         with_hash(k_selection_to_json(report.k_selection, communities.community_count, sqrt_k_heuristic(n)), hash)
                 .dump(2) +
             "\n");

    auto fimp_result = in_stage("fimp", [&] {
        FimpOptions options;
        options.threads = config.threads;
        return fimp(cohort.encoded(), values, k, options);
    });
    fimp_result.actors = cohort.actors();
    fimp_result.excluded = report.excluded;
    emit("fimp.csv", csv_with_hash(fimp_csv(fimp_result), hash));
    emit("neighbors.csv", csv_with_hash(neighbors_csv(fimp_result), hash));

    report.t_test = in_stage("stats", [&] {
        return stats::two_sample_t_test(fimp_result.trait_followed, fimp_result.trait_actual, config.variant);
    });
    if (config.null_sims > 0) {
        report.null_model = in_stage("null-model", [&] {
            NullModelOptions options;
            options.scheme = config.null_scheme;
            options.n_sims = config.null_sims;
            options.seed = config.seed;
            options.variant = config.variant;
            options.threads = config.threads;
            return simulate_null(cohort.encoded(), values, k, options);
        });
    }
    emit("stats.json", in_stage("stats", [&] {
             return stats_report_json(fimp_result.trait_actual, fimp_result.trait_followed, config,
                                      report.null_model ? &*report.null_model : nullptr, hash);
         }));

    in_stage("density", [&] {
        const auto curves = kde_pair(fimp_result.trait_actual, fimp_result.trait_followed, config.kde);
        emit("density.csv", csv_with_hash(density_csv(curves), hash));
        emit("density.svg", density_svg(curves, "Density of actual vs followed fWHR", "config_hash=" + hash));
        return 0;
    });

    ordered_json run;
    run["config_hash"] = hash;
    run["tool"] = "fimpkit";
    run["version"] = std::string(kVersion);
    run["modules"] = {{"core_data", kVersion},   {"face_geometry", kVersion}, {"covote_network", kVersion},
                      {"community_k", kVersion}, {"fimp", kVersion},          {"stats", kVersion},
                      {"pipeline", kVersion}};
    run["config"] = {{"k_mode", to_string(config.k)},
                     {"bill_types", [&] {
                          std::vector<std::string> names;
                          for (auto t : config.bill_types) {
                              names.emplace_back(to_string(t));
                          }
                          return names;
                      }()},
                     {"t_test_variant", std::string(stats::to_string(config.variant))},
                     {"null_scheme", std::string(to_string(config.null_scheme))},
                     {"null_sims", config.null_sims},
                     {"seed", config.seed},
                     {"alpha", config.alpha},
                     {"exclude_zero_rows", config.exclude_zero_rows}};
    run["actors"] = report.actor_count;
    run["bills"] = report.bill_count;
    run["excluded_actors"] = report.excluded;
    run["communities"] = report.community_count;
    run["modularity"] = num(report.modularity);
    run["k"] = k;
    run["k_method"] = std::string(to_string(report.k_selection.method));
    run["t_test"] = t_test_json(report.t_test);
    run["null_p_empirical"] = report.null_model ? ordered_json(num(report.null_model->p_empirical)) : ordered_json();
    report.outputs.push_back("run_report.json");
    run["outputs"] = report.outputs;
    in_stage("output", [&] {
        write_text(out_dir / "run_report.json", run.dump(2) + "\n");
        return 0;
    });
    return report;
}

}  // namespace fimpkit
