#include "fimpkit/core_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "fimpkit/csv.hpp"
#include "fimpkit/error.hpp"

namespace fimpkit {
namespace {

std::string compact(std::string_view s) {
    std::string out;
    for (char c : csv::to_lower(csv::trim(s))) {
        if (c != ' ' && c != '_' && c != '-') {
            out.push_back(c);
        }
    }
    return out;
}

std::optional<int> parse_int(std::string_view s) {
    int value = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return value;
}

bool valid_calendar_date(int y, int m, int d) {
    if (m < 1 || m > 12 || d < 1) {
        return false;
    }
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    const int limit = days[m - 1] + (m == 2 && leap ? 1 : 0);
    return d <= limit;
}

std::vector<std::string> header_of(const std::vector<csv::Row>& rows, const char* what) {
    if (rows.empty()) {
        fail(ErrorCode::EmptyInput, std::string(what) + " has no header row");
    }
    std::vector<std::string> header;
    for (const auto& h : rows.front()) {
        header.push_back(csv::to_lower(csv::trim(h)));
    }
    return header;
}

std::optional<std::size_t> column(const std::vector<std::string>& header, std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - header.begin());
}

std::size_t require_column(const std::vector<std::string>& header, std::string_view name, const char* what) {
    auto c = column(header, name);
    if (!c) {
        fail(ErrorCode::InvalidValue, std::string(what) + " is missing column '" + std::string(name) + "'");
    }
    return *c;
}

std::string field(const csv::Row& row, std::optional<std::size_t> col) {
    if (!col || *col >= row.size()) {
        return {};
    }
    return csv::trim(row[*col]);
}

std::optional<bool> parse_bool(std::string_view text) {
    const auto t = csv::to_lower(csv::trim(text));
    if (t == "1" || t == "true" || t == "yes" || t == "passed" || t == "y") {
        return true;
    }
    if (t == "0" || t == "false" || t == "no" || t == "failed" || t == "n") {
        return false;
    }
    return std::nullopt;
}

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double mu = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mu) * (x - mu);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::string_view to_string(RawVote vote) {
    switch (vote) {
        case RawVote::Yes: return "Yes";
        case RawVote::No: return "No";
        case RawVote::DidNotVote: return "Did not vote";
        case RawVote::Abstain: return "Abstain";
        case RawVote::Absent: return "Absent";
    }
    return "?";
}

VoteVocabulary::VoteVocabulary() {
    for (RawVote v : kAllVotes) {
        tokens_[compact(to_string(v))] = v;
    }
}

void VoteVocabulary::add_alias(std::string_view token, RawVote vote) {
    tokens_[compact(token)] = vote;
}

std::optional<RawVote> VoteVocabulary::lookup(std::string_view token) const {
    auto it = tokens_.find(compact(token));
    if (it == tokens_.end()) {
        return std::nullopt;
    }
    return it->second;
}

BitMatrix encode_votes(std::span<const RawVote> cells, std::size_t rows, std::size_t cols) {
    if (cells.size() != rows * cols) {
        fail(ErrorCode::DimensionMismatch, "cell count does not match matrix shape");
    }
    BitMatrix out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (cells[r * cols + c] == RawVote::Yes) {
                out.set(r, c, true);
            }
        }
    }
    return out;
}

VoteMatrix::VoteMatrix(std::vector<std::string> actors, std::vector<std::string> bills,
                       std::vector<RawVote> cells)
    : VoteMatrix(actors, bills, cells, encode_votes(cells, actors.size(), bills.size())) {}

VoteMatrix::VoteMatrix(std::vector<std::string> actors, std::vector<std::string> bills,
                       std::vector<RawVote> cells, BitMatrix encoded)
    : actors_(std::move(actors)), bills_(std::move(bills)), cells_(std::move(cells)), encoded_(std::move(encoded)) {
    if (cells_.size() != actors_.size() * bills_.size()) {
        fail(ErrorCode::DimensionMismatch, "cell count does not match matrix shape");
    }
    for (std::size_t i = 0; i < actors_.size(); ++i) {
        if (!actor_lookup_.emplace(actors_[i], i).second) {
            fail(ErrorCode::DuplicateActor, "actor '" + actors_[i] + "' appears twice");
        }
    }
    std::unordered_set<std::string> seen;
    for (const auto& b : bills_) {
        if (!seen.insert(b).second) {
            fail(ErrorCode::DuplicateBill, "bill '" + b + "' appears twice");
        }
    }
}

std::optional<std::size_t> VoteMatrix::actor_index(std::string_view id) const {
    auto it = actor_lookup_.find(std::string(id));
    if (it == actor_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

VoteMatrix VoteMatrix::select_bills(std::span<const std::size_t> columns) const {
    std::vector<std::string> bills;
    bills.reserve(columns.size());
    std::vector<RawVote> cells;
    cells.reserve(actors_.size() * columns.size());
    for (auto c : columns) {
        bills.push_back(bills_[c]);
    }
    for (std::size_t r = 0; r < actors_.size(); ++r) {
        for (auto c : columns) {
            cells.push_back(cell(r, c));
        }
    }
    return VoteMatrix(actors_, std::move(bills), std::move(cells), encoded_.select_columns(columns));
}

VoteMatrix VoteMatrix::select_actors(std::span<const std::size_t> rows) const {
    std::vector<std::string> actors;
    std::vector<RawVote> cells;
    cells.reserve(rows.size() * bills_.size());
    for (auto r : rows) {
        actors.push_back(actors_[r]);
        const auto begin = cells_.begin() + static_cast<std::ptrdiff_t>(r * bills_.size());
        cells.insert(cells.end(), begin, begin + static_cast<std::ptrdiff_t>(bills_.size()));
    }
    return VoteMatrix(std::move(actors), bills_, std::move(cells), encoded_.select_rows(rows));
}

VoteMatrix parse_rollcall(std::istream& in, const RollcallOptions& options) {
    const auto rows = csv::read(in, options.delimiter);
    if (rows.empty()) {
        fail(ErrorCode::EmptyInput, "roll-call input is empty");
    }
    const auto& header = rows.front();
    if (header.size() < 2) {
        fail(ErrorCode::EmptyInput, "roll-call header has no bill columns");
    }
    std::vector<std::string> bills;
    for (std::size_t c = 1; c < header.size(); ++c) {
        bills.push_back(csv::trim(header[c]));
    }
    std::vector<std::string> actors;
    std::vector<RawVote> cells;
    cells.reserve((rows.size() - 1) * bills.size());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            fail(ErrorCode::RaggedRow, "row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                           " fields, header has " + std::to_string(header.size()));
        }
        actors.push_back(csv::trim(row[0]));
        for (std::size_t c = 1; c < row.size(); ++c) {
            auto vote = options.vocabulary.lookup(row[c]);
            if (!vote) {
                fail(ErrorCode::UnknownVoteToken, "row " + std::to_string(r + 1) + ", column " +
                                                      std::to_string(c + 1) + ": '" + row[c] + "'");
            }
            cells.push_back(*vote);
        }
    }
    return VoteMatrix(std::move(actors), std::move(bills), std::move(cells));
}

VoteMatrix parse_rollcall_file(const std::string& path, const RollcallOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path + "'");
    }
    return parse_rollcall(in, options);
}

std::string_view to_string(BillType type) {
    switch (type) {
        case BillType::Amendments: return "Amendments";
        case BillType::FinalVoting: return "Final voting";
        case BillType::NotClassified: return "Not classified";
        case BillType::Agenda: return "Agenda";
        case BillType::ShortProcedure: return "Short procedure";
        case BillType::Cancel: return "Cancel";
        case BillType::SignalVoting: return "Signal voting";
        case BillType::SecondVoting: return "Second voting";
        case BillType::Revision: return "Revision";
        case BillType::President: return "President";
        case BillType::Alternative: return "Alternative";
    }
    return "?";
}

std::optional<BillType> parse_bill_type(std::string_view text) {
    const auto key = compact(text);
    for (BillType t : kAllBillTypes) {
        if (compact(to_string(t)) == key) {
            return t;
        }
    }
    return std::nullopt;
}

std::optional<Date> parse_date(std::string_view raw) {
    const auto text = csv::trim(raw);
    if (text.size() >= 10 && text[4] == '-' && text[7] == '-') {
        auto y = parse_int(std::string_view(text).substr(0, 4));
        auto m = parse_int(std::string_view(text).substr(5, 2));
        auto d = parse_int(std::string_view(text).substr(8, 2));
        const bool tail_ok = text.size() == 10 || text[10] == 'T' || text[10] == ' ';
        if (y && m && d && tail_ok && valid_calendar_date(*y, *m, *d)) {
            return Date{*y, *m, *d};
        }
        return std::nullopt;
    }
    if (text.size() == 10 && (text[2] == '.' || text[2] == '-' || text[2] == '/') && text[5] == text[2]) {
        auto d = parse_int(std::string_view(text).substr(0, 2));
        auto m = parse_int(std::string_view(text).substr(3, 2));
        auto y = parse_int(std::string_view(text).substr(6, 4));
        if (y && m && d && valid_calendar_date(*y, *m, *d)) {
            return Date{*y, *m, *d};
        }
    }
    return std::nullopt;
}

std::vector<BillRecord> parse_bills(std::istream& in, char delimiter) {
    const auto rows = csv::read(in, delimiter);
    const auto header = header_of(rows, "bills file");
    const auto id_col = require_column(header, "bill_id", "bills file");
    const auto type_col = require_column(header, "type", "bills file");
    const auto date_col = column(header, "date");
    const auto passed_col = column(header, "passed");

    std::vector<BillRecord> out;
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        BillRecord rec;
        rec.id = field(row, id_col);
        if (!seen.insert(rec.id).second) {
            fail(ErrorCode::DuplicateBill, "bill '" + rec.id + "' listed twice in bills file");
        }
        const auto type_text = field(row, type_col);
        auto type = parse_bill_type(type_text);
        if (!type) {
            fail(ErrorCode::UnknownBillType, "bill '" + rec.id + "' has type '" + type_text + "'");
        }
        rec.type = *type;
        rec.date = parse_date(field(row, date_col));
        rec.passed = parse_bool(field(row, passed_col));
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<BillRecord> parse_bills_file(const std::string& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path + "'");
    }
    return parse_bills(in, delimiter);
}

std::vector<ActorRecord> parse_actors(std::istream& in, char delimiter) {
    const auto rows = csv::read(in, delimiter);
    const auto header = header_of(rows, "actors file");
    const auto id_col = require_column(header, "actor_id", "actors file");
    static constexpr std::string_view known[] = {"actor_id", "name", "gender", "birth_date", "party",
                                                 "faction", "faction_position", "election_mode"};
    std::vector<ActorRecord> out;
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        ActorRecord rec;
        rec.id = field(row, id_col);
        if (!seen.insert(rec.id).second) {
            fail(ErrorCode::DuplicateActor, "actor '" + rec.id + "' listed twice in actors file");
        }
        rec.name = field(row, column(header, "name"));
        rec.gender = field(row, column(header, "gender"));
        rec.birth_date = parse_date(field(row, column(header, "birth_date")));
        rec.party = field(row, column(header, "party"));
        rec.faction = field(row, column(header, "faction"));
        rec.faction_position = field(row, column(header, "faction_position"));
        rec.election_mode = field(row, column(header, "election_mode"));
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (std::find(std::begin(known), std::end(known), header[c]) == std::end(known)) {
                rec.extra[header[c]] = c < row.size() ? row[c] : std::string{};
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ActorRecord> parse_actors_file(const std::string& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path + "'");
    }
    return parse_actors(in, delimiter);
}

void TraitTable::insert(const std::string& actor, double value) {
    if (!std::isfinite(value) || value <= 0.0) {
        fail(ErrorCode::InvalidValue, "trait for '" + actor + "' must be finite and positive");
    }
    if (!values_.emplace(actor, value).second) {
        fail(ErrorCode::DuplicateActor, "trait for '" + actor + "' given twice");
    }
}

std::optional<double> TraitTable::find(std::string_view actor) const {
    auto it = values_.find(actor);
    if (it == values_.end()) {
        return std::nullopt;
    }
    return it->second;
}

TraitTable parse_traits(std::istream& in, char delimiter) {
    const auto rows = csv::read(in, delimiter);
    const auto header = header_of(rows, "traits file");
    const auto id_col = require_column(header, "actor_id", "traits file");
    const auto value_col = require_column(header, "fwhr", "traits file");
    const auto quality_col = column(header, "quality");
    TraitTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (quality_col && csv::to_lower(field(row, quality_col)) != "pass") {
            continue;
        }
        const auto id = field(row, id_col);
        const auto text = field(row, value_col);
        char* end = nullptr;
        const double value = std::strtod(text.c_str(), &end);
        if (text.empty() || end != text.c_str() + text.size()) {
            fail(ErrorCode::InvalidValue, "trait for '" + id + "' is not a number: '" + text + "'");
        }
        table.insert(id, value);
    }
    return table;
}

TraitTable parse_traits_file(const std::string& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path + "'");
    }
    return parse_traits(in, delimiter);
}

VoteMatrix filter_by_bill_type(const VoteMatrix& votes, std::span<const BillRecord> bills,
                               const std::set<BillType>& keep, const FilterOptions& options) {
    std::unordered_map<std::string_view, BillType> type_of;
    for (const auto& b : bills) {
        type_of.emplace(b.id, b.type);
    }
    std::vector<std::size_t> columns;
    for (std::size_t c = 0; c < votes.bill_count(); ++c) {
        auto it = type_of.find(votes.bills()[c]);
        if (it == type_of.end()) {
            if (!options.allow_unknown_bills) {
                fail(ErrorCode::UnknownBillId, "bill '" + votes.bills()[c] + "' has no bill record");
            }
            continue;
        }
        if (keep.contains(it->second)) {
            columns.push_back(c);
        }
    }
    if (columns.empty()) {
        fail(ErrorCode::EmptyResult, "no bill columns survive the type filter");
    }
    return votes.select_bills(columns);
}

std::vector<std::string> actors_without_traits(const VoteMatrix& votes, const TraitTable& traits) {
    std::vector<std::string> out;
    for (const auto& a : votes.actors()) {
        if (!traits.contains(a)) {
            out.push_back(a);
        }
    }
    return out;
}

DatasetSummary summary_stats(const VoteMatrix& votes, std::span<const ActorRecord> actors,
                             const TraitTable& traits, std::span<const BillRecord> bills) {
    DatasetSummary s;
    s.actor_count = votes.actor_count();
    s.bill_count = votes.bill_count();

    std::array<std::size_t, 5> counts{};
    for (RawVote v : votes.cells()) {
        ++counts[static_cast<std::size_t>(v)];
    }
    const auto total = votes.cells().size();
    if (total > 0) {
        for (std::size_t k = 0; k < counts.size(); ++k) {
            s.vote_percent[k] = 100.0 * static_cast<double>(counts[k]) / static_cast<double>(total);
        }
    }

    std::unordered_set<std::string_view> bill_ids(votes.bills().begin(), votes.bills().end());
    std::optional<Date> reference;
    std::size_t known_pass = 0;
    std::size_t passed = 0;
    for (const auto& b : bills) {
        if (!bill_ids.contains(b.id)) {
            continue;
        }
        if (b.date && (!reference || *b.date < *reference)) {
            reference = b.date;
        }
        if (b.passed) {
            ++known_pass;
            passed += *b.passed ? 1 : 0;
        }
    }
    if (known_pass > 0) {
        s.bill_passed_ratio = static_cast<double>(passed) / static_cast<double>(known_pass);
    }

    std::vector<double> ages;
    std::size_t males = 0;
    std::size_t females = 0;
    std::set<std::string> parties;
    std::set<std::string> factions;
    bool any_actor = false;
    for (const auto& a : actors) {
        if (!votes.actor_index(a.id)) {
            continue;
        }
        any_actor = true;
        if (reference && a.birth_date) {
            int age = reference->year - a.birth_date->year;
            if (std::pair(reference->month, reference->day) < std::pair(a.birth_date->month, a.birth_date->day)) {
                --age;
            }
            ages.push_back(age);
        }
        const auto g = csv::to_lower(a.gender);
        if (g == "m" || g == "male") {
            ++males;
        } else if (g == "f" || g == "female") {
            ++females;
        }
        if (!a.party.empty()) {
            parties.insert(a.party);
        }
        if (!a.faction.empty()) {
            factions.insert(a.faction);
        }
    }
    if (!ages.empty()) {
        s.mean_age = mean_of(ages);
        s.sd_age = sample_sd(ages);
    }
    if (females > 0) {
        s.male_female_ratio = static_cast<double>(males) / static_cast<double>(females);
    }
    if (any_actor) {
        s.party_count = parties.size();
        s.faction_count = factions.size();
    }

    std::vector<double> tv;
    for (const auto& a : votes.actors()) {
        if (auto t = traits.find(a)) {
            tv.push_back(*t);
        }
    }
    s.trait_coverage = tv.size();
    if (!tv.empty()) {
        s.mean_trait = mean_of(tv);
        s.sd_trait = sample_sd(tv);
    }
    return s;
}

std::string summary_to_json(const DatasetSummary& s) {
    using nlohmann::ordered_json;
    auto num = [](double v) { return csv::round_significant(v); };
    ordered_json j;
    j["Number of MPs"] = s.actor_count;
    j["Number of Parties"] = s.party_count ? ordered_json(*s.party_count) : ordered_json(nullptr);
    j["Number of Fraction"] = s.faction_count ? ordered_json(*s.faction_count) : ordered_json(nullptr);
    j["MPs mean Age"] = s.mean_age ? ordered_json(num(*s.mean_age)) : ordered_json(nullptr);
    j["MPs sd Age"] = s.sd_age ? ordered_json(num(*s.sd_age)) : ordered_json(nullptr);
    j["Male/Female ratio"] = s.male_female_ratio ? ordered_json(num(*s.male_female_ratio)) : ordered_json(nullptr);
    j["Number of Bills"] = s.bill_count;
    j["Bill Passed Ratio"] = s.bill_passed_ratio ? ordered_json(num(*s.bill_passed_ratio)) : ordered_json(nullptr);
    j["Yes %"] = num(s.vote_percent[0]);
    j["No %"] = num(s.vote_percent[1]);
    j["Did not vote %"] = num(s.vote_percent[2]);
    j["Abstain %"] = num(s.vote_percent[3]);
    j["Absent %"] = num(s.vote_percent[4]);
    j["MPs mean fWHR"] = s.mean_trait ? ordered_json(num(*s.mean_trait)) : ordered_json(nullptr);
    j["MPs sd fWHR"] = s.sd_trait ? ordered_json(num(*s.sd_trait)) : ordered_json(nullptr);
    j["fWHR coverage"] = s.trait_coverage;
    return j.dump(2) + "\n";
}

}  // namespace fimpkit
