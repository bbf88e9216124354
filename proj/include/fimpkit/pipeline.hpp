#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fimpkit/community.hpp"
#include "fimpkit/core_data.hpp"
#include "fimpkit/face_geometry.hpp"
#include "fimpkit/fimp.hpp"
#include "fimpkit/kde.hpp"
#include "fimpkit/null_model.hpp"
#include "fimpkit/stats.hpp"

namespace fimpkit {

inline constexpr std::string_view kVersion = "0.1.0";

enum class KMode { Elbow, Sqrt, Fixed };

struct KPolicy {
    KMode mode = KMode::Elbow;
    std::size_t fixed_k = 0;
};

/// "elbow", "sqrt" or "fixed:N" with N >= 1.
std::optional<KPolicy> parse_k_policy(std::string_view text);
std::string to_string(const KPolicy& policy);

struct PipelineConfig {
    std::string rollcall;
    std::string bills;      // optional unless bill_types is set
    std::string actors;     // optional
    std::string traits;     // traits CSV, or
    std::string landmarks;  // directory of landmark JSON files
    std::string out_dir;

    char delimiter = ',';
    std::vector<std::pair<std::string, RawVote>> vote_aliases;
    std::set<BillType> bill_types;  // empty keeps every bill
    bool allow_unknown_bills = false;
    bool exclude_zero_rows = false;

    KPolicy k;
    stats::TTestVariant variant = stats::TTestVariant::Welch;
    bool paired = true;  // also report the actor-aligned paired test
    double alpha = 0.05;
    stats::LillieforsOptions lilliefors;

    NullScheme null_scheme = NullScheme::Bernoulli;
    std::size_t null_sims = 1000;
    std::uint64_t seed = 1;

    KdeOptions kde;
    face::QualityOptions quality;
    face::FwhrOptions fwhr;
    std::size_t threads = 0;
};

struct RunReport {
    std::string config_hash;
    std::size_t actor_count = 0;
    std::size_t bill_count = 0;
    std::vector<std::string> excluded;
    std::size_t community_count = 0;
    double modularity = 0.0;
    KSelection k_selection;
    stats::TTestResult t_test;
    std::optional<NullModelResult> null_model;
    std::vector<std::string> outputs;
};

/// 16 hex digits of FNV-1a over the canonical config text and the bytes of
/// every input. The output directory is not part of the hash.
std::string config_hash(const PipelineConfig& config);

/// End-to-end run. Errors carry the name of the stage that raised them.
RunReport run_pipeline(const PipelineConfig& config);

/// The stats report for an actual/followed pair: t-test, optional paired
/// test, both normality suites and, when given, the null model.
std::string stats_report_json(std::span<const double> actual, std::span<const double> followed,
                              const PipelineConfig& config, const NullModelResult* null_model,
                              const std::string& hash);

struct FimpTable {
    std::vector<std::string> actors;
    std::vector<double> actual;
    std::vector<double> followed;
};

/// Reads `actor_id,fwhr_act,fwhr_fol` as written by the run command.
FimpTable read_fimp_csv(const std::string& path);

}  // namespace fimpkit
