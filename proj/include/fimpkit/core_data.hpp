#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fimpkit/bit_matrix.hpp"

namespace fimpkit {

enum class RawVote : std::uint8_t { Yes, No, DidNotVote, Abstain, Absent };

inline constexpr std::array<RawVote, 5> kAllVotes = {
    RawVote::Yes, RawVote::No, RawVote::DidNotVote, RawVote::Abstain, RawVote::Absent};

std::string_view to_string(RawVote vote);

/// Case-insensitive vote token lookup. The canonical English tokens are always
/// accepted; `aliases` adds native-language or export-specific spellings.
class VoteVocabulary {
public:
    VoteVocabulary();
    void add_alias(std::string_view token, RawVote vote);
    [[nodiscard]] std::optional<RawVote> lookup(std::string_view token) const;

private:
    std::unordered_map<std::string, RawVote> tokens_;
};

/// Roll-call matrix: actors x bills with the raw categorical votes and the
/// binary Yes-encoding side by side. Immutable after construction.
class VoteMatrix {
public:
    VoteMatrix() = default;
    VoteMatrix(std::vector<std::string> actors, std::vector<std::string> bills,
               std::vector<RawVote> cells);

    [[nodiscard]] std::size_t actor_count() const noexcept { return actors_.size(); }
    [[nodiscard]] std::size_t bill_count() const noexcept { return bills_.size(); }
    [[nodiscard]] const std::vector<std::string>& actors() const noexcept { return actors_; }
    [[nodiscard]] const std::vector<std::string>& bills() const noexcept { return bills_; }

    [[nodiscard]] RawVote cell(std::size_t actor, std::size_t bill) const noexcept {
        return cells_[actor * bills_.size() + bill];
    }
    [[nodiscard]] bool encoded(std::size_t actor, std::size_t bill) const noexcept {
        return encoded_.get(actor, bill);
    }
    [[nodiscard]] const BitMatrix& encoded() const noexcept { return encoded_; }
    [[nodiscard]] std::span<const RawVote> cells() const noexcept { return cells_; }

    [[nodiscard]] std::optional<std::size_t> actor_index(std::string_view id) const;

    /// Column subset; the encoded layer is sliced from the existing bits.
    [[nodiscard]] VoteMatrix select_bills(std::span<const std::size_t> columns) const;
    /// Row subset in the given order.
    [[nodiscard]] VoteMatrix select_actors(std::span<const std::size_t> rows) const;

private:
    VoteMatrix(std::vector<std::string> actors, std::vector<std::string> bills,
               std::vector<RawVote> cells, BitMatrix encoded);

    std::vector<std::string> actors_;
    std::vector<std::string> bills_;
    std::vector<RawVote> cells_;
    BitMatrix encoded_;
    std::unordered_map<std::string, std::size_t> actor_lookup_;
};

/// Binary encoding: Yes -> 1, every other category -> 0.
BitMatrix encode_votes(std::span<const RawVote> cells, std::size_t rows, std::size_t cols);

struct RollcallOptions {
    char delimiter = ',';
    VoteVocabulary vocabulary;
};

VoteMatrix parse_rollcall(std::istream& in, const RollcallOptions& options = {});
VoteMatrix parse_rollcall_file(const std::string& path, const RollcallOptions& options = {});

enum class BillType : std::uint8_t {
    Amendments,
    FinalVoting,
    NotClassified,
    Agenda,
    ShortProcedure,
    Cancel,
    SignalVoting,
    SecondVoting,
    Revision,
    President,
    Alternative,
};

inline constexpr std::array<BillType, 11> kAllBillTypes = {
    BillType::Amendments,   BillType::FinalVoting,  BillType::NotClassified, BillType::Agenda,
    BillType::ShortProcedure, BillType::Cancel,     BillType::SignalVoting,  BillType::SecondVoting,
    BillType::Revision,     BillType::President,    BillType::Alternative};

std::string_view to_string(BillType type);
/// Accepts the display name ("Final voting") or a compact form ("final_voting",
/// "FinalVoting"), case-insensitively.
std::optional<BillType> parse_bill_type(std::string_view text);

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
    friend auto operator<=>(const Date&, const Date&) = default;
};

/// ISO-8601 (YYYY-MM-DD, optional time suffix) with a DD.MM.YYYY / DD-MM-YYYY
/// / DD/MM/YYYY fallback. Returns nullopt on anything else.
std::optional<Date> parse_date(std::string_view text);

struct BillRecord {
    std::string id;
    BillType type = BillType::NotClassified;
    std::optional<Date> date;
    std::optional<bool> passed;
};

std::vector<BillRecord> parse_bills(std::istream& in, char delimiter = ',');
std::vector<BillRecord> parse_bills_file(const std::string& path, char delimiter = ',');

struct ActorRecord {
    std::string id;
    std::string name;
    std::string gender;
    std::optional<Date> birth_date;
    std::string party;
    std::string faction;
    std::string faction_position;
    std::string election_mode;
    /// Remaining columns, keyed by header name, kept verbatim.
    std::map<std::string, std::string> extra;
};

std::vector<ActorRecord> parse_actors(std::istream& in, char delimiter = ',');
std::vector<ActorRecord> parse_actors_file(const std::string& path, char delimiter = ',');

/// Per-actor trait values (fWHR). Values are finite and positive.
class TraitTable {
public:
    void insert(const std::string& actor, double value);
    [[nodiscard]] std::optional<double> find(std::string_view actor) const;
    [[nodiscard]] bool contains(std::string_view actor) const { return find(actor).has_value(); }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const std::map<std::string, double, std::less<>>& values() const noexcept { return values_; }

private:
    std::map<std::string, double, std::less<>> values_;
};

/// Reads `actor_id,fwhr[,quality,reason]`. Rows whose quality column is
/// present and not "pass" are skipped.
TraitTable parse_traits(std::istream& in, char delimiter = ',');
TraitTable parse_traits_file(const std::string& path, char delimiter = ',');

struct FilterOptions {
    /// Keep matrix columns with no bill record instead of failing.
    bool allow_unknown_bills = false;
};

VoteMatrix filter_by_bill_type(const VoteMatrix& votes, std::span<const BillRecord> bills,
                               const std::set<BillType>& keep, const FilterOptions& options = {});

/// Actors in the matrix that have no trait value, in matrix order.
std::vector<std::string> actors_without_traits(const VoteMatrix& votes, const TraitTable& traits);

struct DatasetSummary {
    std::size_t actor_count = 0;
    std::size_t bill_count = 0;
    std::array<double, 5> vote_percent{};  // indexed by RawVote
    std::optional<double> mean_age;
    std::optional<double> sd_age;
    std::optional<double> male_female_ratio;
    std::optional<std::size_t> party_count;
    std::optional<std::size_t> faction_count;
    std::optional<double> bill_passed_ratio;
    std::optional<double> mean_trait;
    std::optional<double> sd_trait;
    std::size_t trait_coverage = 0;
};

/// Table-style dataset description. Ages are measured at the earliest bill
/// date when bill dates are supplied, otherwise omitted.
DatasetSummary summary_stats(const VoteMatrix& votes, std::span<const ActorRecord> actors,
                             const TraitTable& traits, std::span<const BillRecord> bills = {});

std::string summary_to_json(const DatasetSummary& summary);

}  // namespace fimpkit
