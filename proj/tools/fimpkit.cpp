// fimpkit command-line front end: run, fwhr, stats-only.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"
#include "fimpkit/face_geometry.hpp"
#include "fimpkit/kernels.hpp"
#include "fimpkit/pipeline.hpp"

namespace {

using namespace fimpkit;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::Config: return kExitConfig;
        case ErrorCode::ConvergenceFailure: return kExitNumeric;
        default: return kExitData;
    }
}

std::optional<RawVote> parse_vote_name(const std::string& text) {
    const auto lower = csv::to_lower(csv::trim(text));
    for (auto v : kAllVotes) {
        if (csv::to_lower(to_string(v)) == lower) {
            return v;
        }
    }
    return std::nullopt;
}

std::optional<stats::TTestVariant> parse_variant(const std::string& text) {
    const auto lower = csv::to_lower(csv::trim(text));
    if (lower == "welch") return stats::TTestVariant::Welch;
    if (lower == "pooled" || lower == "student") return stats::TTestVariant::Pooled;
    if (lower == "paired") return stats::TTestVariant::Paired;
    return std::nullopt;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (char c : text + ",") {
        if (c == ',' || c == ';') {
            if (auto t = csv::trim(item); !t.empty()) {
                out.push_back(t);
            }
            item.clear();
        } else {
            item += c;
        }
    }
    return out;
}

struct RunArgs {
    std::string k_mode = "elbow";
    std::string bill_types;
    std::string variant = "welch";
    std::string null_scheme = "bernoulli";
    std::vector<std::string> aliases;
    std::string delimiter = ",";
    std::string height_reference = "eyelid";
    std::string eyelid_line = "mean";
    double bandwidth = 0.0;
    bool no_paired = false;
};

// Converts string-valued flags into the typed config; failures are config errors.
void finish_config(PipelineConfig& cfg, const RunArgs& args) {
    if (auto k = parse_k_policy(args.k_mode)) {
        cfg.k = *k;
    } else {
        fail(ErrorCode::Config, "--k-mode must be elbow, sqrt or fixed:N, got '" + args.k_mode + "'");
    }
    for (const auto& name : split_list(args.bill_types)) {
        if (csv::to_lower(name) == "all") {
            continue;
        }
        auto type = parse_bill_type(name);
        if (!type) {
            fail(ErrorCode::Config, "unknown bill type '" + name + "'");
        }
        cfg.bill_types.insert(*type);
    }
    if (auto v = parse_variant(args.variant)) {
        cfg.variant = *v;
    } else {
        fail(ErrorCode::Config, "--t-test must be welch, pooled or paired");
    }
    cfg.paired = !args.no_paired;
    if (auto s = parse_null_scheme(args.null_scheme)) {
        cfg.null_scheme = *s;
    } else {
        fail(ErrorCode::Config, "--null-scheme must be bernoulli or column-permutation");
    }
    for (const auto& alias : args.aliases) {
        const auto eq = alias.rfind('=');
        const auto vote = eq == std::string::npos ? std::nullopt : parse_vote_name(alias.substr(eq + 1));
        if (!vote) {
            fail(ErrorCode::Config, "--vote-alias expects TOKEN=Yes|No|DidNotVote|Abstain|Absent, got '" + alias + "'");
        }
        cfg.vote_aliases.emplace_back(alias.substr(0, eq), *vote);
    }
    if (args.delimiter == "\\t" || args.delimiter == "tab") {
        cfg.delimiter = '\t';
    } else if (args.delimiter.size() == 1) {
        cfg.delimiter = args.delimiter[0];
    } else {
        fail(ErrorCode::Config, "--delimiter must be a single character");
    }
    if (args.bandwidth > 0.0) {
        cfg.kde.bandwidth = args.bandwidth;
    }
    cfg.fwhr.reference =
        args.height_reference == "brow" ? face::HeightReference::Brow : face::HeightReference::Eyelid;
    cfg.fwhr.eyelid_line = args.eyelid_line == "highest" ? face::EyelidLine::Highest : face::EyelidLine::Mean;
}

void add_geometry_options(CLI::App* cmd, PipelineConfig& cfg, RunArgs& args) {
    cmd->add_option("--min-confidence", cfg.quality.min_confidence, "Landmark confidence gate")
        ->capture_default_str();
    cmd->add_option("--margin-px", cfg.quality.margin_px, "Required distance of points from the image border")
        ->capture_default_str();
    cmd->add_option("--height-ref", args.height_reference, "Upper-face height reference: eyelid or brow")
        ->check(CLI::IsMember({"eyelid", "brow"}))
        ->capture_default_str();
    cmd->add_option("--eyelid-line", args.eyelid_line, "Eyelid line: mean or highest")
        ->check(CLI::IsMember({"mean", "highest"}))
        ->capture_default_str();
}

void add_stats_options(CLI::App* cmd, PipelineConfig& cfg, RunArgs& args) {
    cmd->add_option("--t-test", args.variant, "welch, pooled or paired")->capture_default_str();
    cmd->add_flag("--no-paired", args.no_paired, "Skip the supplementary paired t-test");
    cmd->add_option("--alpha", cfg.alpha, "Significance level of the normality tests")->capture_default_str();
    cmd->add_option("--lilliefors-replicates", cfg.lilliefors.replicates,
                    "Monte Carlo replicates for the Lilliefors KS p-value")
        ->capture_default_str();
    cmd->add_option("--lilliefors-seed", cfg.lilliefors.seed)->capture_default_str();
}

void print_run(const RunReport& r, const std::string& out_dir) {
    std::printf("config_hash  %s\n", r.config_hash.c_str());
    std::printf("actors       %zu (excluded %zu)\n", r.actor_count, r.excluded.size());
    std::printf("bills        %zu\n", r.bill_count);
    std::printf("communities  %zu (Q = %s)\n", r.community_count, csv::format_number(r.modularity).c_str());
    std::printf("K            %zu (%s)\n", r.k_selection.chosen_k, std::string(to_string(r.k_selection.method)).c_str());
    std::printf("t-test       t = %s, df = %s, p = %s\n", csv::format_number(r.t_test.t).c_str(),
                csv::format_number(r.t_test.df).c_str(), csv::format_number(r.t_test.p).c_str());
    if (r.null_model) {
        std::printf("null model   %zu sims, empirical p = %s\n", r.null_model->n_sims,
                    csv::format_number(r.null_model->p_empirical).c_str());
    }
    std::printf("outputs      %s/{", out_dir.c_str());
    for (std::size_t i = 0; i < r.outputs.size(); ++i) {
        std::printf("%s%s", i ? "," : "", r.outputs[i].c_str());
    }
    std::printf("}\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fimpkit: co-voting networks, follow-trait importance and its statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    bool force_scalar = false;
    app.add_flag("--scalar", force_scalar, "Disable SIMD kernels");

    PipelineConfig cfg;
    RunArgs args;

    auto* run = app.add_subcommand("run", "Full pipeline on one convocation");
    run->add_option("--rollcall", cfg.rollcall, "Roll-call CSV (actor_id then one column per bill)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--bills", cfg.bills, "Bill metadata CSV (bill_id,type,date,passed)");
    run->add_option("--actors", cfg.actors, "Actor metadata CSV");
    auto* traits_opt = run->add_option("--traits", cfg.traits, "Traits CSV (actor_id,fwhr[,quality])");
    auto* landmarks_opt = run->add_option("--landmarks", cfg.landmarks, "Directory of landmark JSON files");
    traits_opt->excludes(landmarks_opt);
    run->add_option("--k-mode", args.k_mode, "elbow, sqrt or fixed:N")->capture_default_str();
    run->add_option("--bill-types", args.bill_types, "Comma-separated bill types to keep (default all)");
    run->add_flag("--allow-unknown-bills", cfg.allow_unknown_bills, "Keep columns missing from the bills file");
    run->add_flag("--exclude-zero-rows", cfg.exclude_zero_rows, "Drop actors without a single Yes vote");
    run->add_option("--null-sims", cfg.null_sims, "Null-model replications (0 disables)")->capture_default_str();
    run->add_option("--null-scheme", args.null_scheme, "bernoulli or column-permutation")->capture_default_str();
    run->add_option("--seed", cfg.seed, "Null-model seed")->capture_default_str();
    run->add_option("--vote-alias", args.aliases, "Extra vote token, TOKEN=Yes|No|DidNotVote|Abstain|Absent");
    run->add_option("--delimiter", args.delimiter, "Input field delimiter (use \\t for tab)")->capture_default_str();
    run->add_option("--kde-bandwidth", args.bandwidth, "Fixed KDE bandwidth (default Silverman)");
    run->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
    run->add_option("--out", cfg.out_dir, "Output directory")->required();
    add_stats_options(run, cfg, args);
    add_geometry_options(run, cfg, args);

    std::string fwhr_dir;
    std::string fwhr_out;
    auto* fwhr = app.add_subcommand("fwhr", "Measure fWHR for a directory of landmark JSON files");
    fwhr->add_option("--landmarks", fwhr_dir, "Landmark directory")->required();
    fwhr->add_option("--out", fwhr_out, "Output traits CSV")->required();
    add_geometry_options(fwhr, cfg, args);

    std::string fimp_csv_path;
    std::string stats_out;
    auto* stats_only = app.add_subcommand("stats-only", "Re-run the tests on an existing fimp.csv");
    stats_only->add_option("--fimp-csv", fimp_csv_path, "fimp.csv from a previous run")->required();
    stats_only->add_option("--out", stats_out, "Write the JSON report here instead of stdout");
    add_stats_options(stats_only, cfg, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    std::optional<kernels::ScopedIsa> isa_override;
    if (force_scalar) {
        isa_override.emplace(kernels::Isa::Scalar);
    }

    try {
        finish_config(cfg, args);
        if (run->parsed()) {
            const auto report = run_pipeline(cfg);
            print_run(report, cfg.out_dir);
        } else if (fwhr->parsed()) {
            const auto records = face::measure_directory(fwhr_dir, cfg.quality, cfg.fwhr);
            std::ofstream out(fwhr_out, std::ios::binary);
            if (!out) {
                fail(ErrorCode::Io, "cannot write '" + fwhr_out + "'");
            }
            out << face::traits_csv(records);
            std::size_t passed = 0;
            for (const auto& r : records) {
                passed += r.quality == face::QualityStatus::Pass;
            }
            std::printf("%zu landmark sets, %zu passed the quality gate\n", records.size(), passed);
        } else if (stats_only->parsed()) {
            const auto table = read_fimp_csv(fimp_csv_path);
            // The hash covers the fimp file bytes and the statistics options.
            PipelineConfig hashed = cfg;
            hashed.traits = fimp_csv_path;
            const auto text = stats_report_json(table.actual, table.followed, cfg, nullptr, config_hash(hashed));
            if (stats_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(stats_out, std::ios::binary);
                if (!out) {
                    fail(ErrorCode::Io, "cannot write '" + stats_out + "'");
                }
                out << text;
            }
        }
    } catch (const Error& e) {
        if (e.stage().empty()) {
            std::fprintf(stderr, "fimpkit: %s\n", e.what());
        } else {
            std::fprintf(stderr, "fimpkit: [%s] %s\n", e.stage().c_str(), e.what());
        }
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fimpkit: %s\n", e.what());
        return kExitData;
    }
    return kExitOk;
}
