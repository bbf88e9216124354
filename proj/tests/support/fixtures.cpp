#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "fimpkit/csv.hpp"
#include "fimpkit/distributions.hpp"

namespace fimpkit::testing {

double Rng::uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal(double mean, double sd) {
    return mean + sd * dist::normal_quantile(uniform());
}

std::size_t Rng::below(std::size_t bound) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(bound)) % bound;
}

BitMatrix random_bit_matrix(std::size_t rows, std::size_t cols, double density, Rng& rng) {
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m.set(r, c, rng.bernoulli(density));
        }
    }
    return m;
}

CovoteGraph random_graph(std::size_t n, double edge_probability, std::uint32_t max_weight, bool connected,
                         Rng& rng) {
    std::vector<std::uint32_t> w(n * n, 0);
    auto put = [&](std::size_t i, std::size_t j, std::uint32_t v) {
        w[i * n + j] = v;
        w[j * n + i] = v;
    };
    if (connected) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = i;
        }
        shuffle(order, rng);
        for (std::size_t i = 1; i < n; ++i) {
            put(order[i - 1], order[i], 1 + static_cast<std::uint32_t>(rng.below(max_weight)));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.bernoulli(edge_probability)) {
                put(i, j, 1 + static_cast<std::uint32_t>(rng.below(max_weight)));
            }
        }
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("v" + std::to_string(i));
    }
    return CovoteGraph(std::move(names), std::move(w));
}

TraitTable MiniRada::trait_table() const {
    TraitTable t;
    for (const auto& [id, v] : traits) {
        t.insert(id, v);
    }
    return t;
}

MiniRada make_mini_rada(std::uint64_t seed, const MiniRadaOptions& o) {
    Rng rng(seed);
    MiniRada r;
    const std::size_t group = 1 + o.followers_per_leader;
    const std::size_t per_bloc = o.leaders_per_bloc * group;
    const std::size_t n = 2 * per_bloc;
    const std::size_t m = o.bills;

    for (std::size_t j = 0; j < m; ++j) {
        char id[32];
        std::snprintf(id, sizeof id, "b%03zu", j + 1);
        r.bills.emplace_back(id);
    }

    // Bloc stances: one bloc alone, the other alone, both, or neither.
    std::vector<std::array<bool, 2>> stance(m);
    for (auto& s : stance) {
        const double u = rng.uniform();
        s = u < 0.35 ? std::array{true, false}
            : u < 0.70 ? std::array{false, true}
            : u < 0.90 ? std::array{true, true}
                       : std::array{false, false};
    }

    std::vector<std::vector<bool>> yes(n, std::vector<bool>(m));
    for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t l = 0; l < o.leaders_per_bloc; ++l) {
            const std::size_t leader = b * per_bloc + l * group;
            for (std::size_t j = 0; j < m; ++j) {
                yes[leader][j] = stance[j][b] != rng.bernoulli(o.leader_flip);
            }
            for (std::size_t f = 1; f < group; ++f) {
                for (std::size_t j = 0; j < m; ++j) {
                    yes[leader + f][j] = yes[leader][j] != rng.bernoulli(o.follower_flip);
                }
            }
        }
    }

    // Actor order is shuffled so the planted structure is not visible in ids.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    shuffle(order, rng);

    static constexpr RawVote other[] = {RawVote::No, RawVote::No, RawVote::Abstain, RawVote::DidNotVote,
                                        RawVote::Absent};
    static constexpr const char* factions[] = {"North", "South"};
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t i = order[pos];
        char id[32];
        std::snprintf(id, sizeof id, "mp%02zu", pos + 1);
        r.actors.emplace_back(id);
        const std::size_t b = i / per_bloc;
        const bool is_leader = (i % per_bloc) % group == 0;
        r.bloc.push_back(b);
        r.leader.push_back(is_leader);
        for (std::size_t j = 0; j < m; ++j) {
            r.cells.push_back(yes[i][j] ? RawVote::Yes : other[rng.below(std::size(other))]);
        }
        const double mean = is_leader ? o.leader_trait : o.follower_trait;
        r.traits.emplace_back(id, std::max(1.0, rng.normal(mean, o.trait_sd)));

        ActorRecord a;
        a.id = id;
        a.name = "Member " + std::to_string(pos + 1);
        a.gender = rng.bernoulli(0.8) ? "male" : "female";
        a.birth_date = Date{1950 + static_cast<int>(rng.below(40)), 1 + static_cast<int>(rng.below(12)),
                            1 + static_cast<int>(rng.below(28))};
        a.party = factions[b];
        a.faction = factions[b];
        a.faction_position = is_leader ? "leader" : "member";
        a.election_mode = rng.bernoulli(0.5) ? "list" : "district";
        r.actor_records.push_back(std::move(a));
    }

    for (std::size_t j = 0; j < m; ++j) {
        BillRecord b;
        b.id = r.bills[j];
        b.type = kAllBillTypes[rng.below(kAllBillTypes.size())];
        b.date = Date{2019, 9 + static_cast<int>(j / 60), 1 + static_cast<int>(j % 28)};
        std::size_t ayes = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ayes += r.cells[i * m + j] == RawVote::Yes;
        }
        b.passed = 2 * ayes > n;
        r.bill_records.push_back(std::move(b));
    }
    return r;
}

void shuffle_traits(MiniRada& rada, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> values;
    for (const auto& t : rada.traits) {
        values.push_back(t.second);
    }
    shuffle(values, rng);
    for (std::size_t i = 0; i < values.size(); ++i) {
        rada.traits[i].second = values[i];
    }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::string date_text(const std::optional<Date>& d) {
    if (!d) {
        return {};
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d->year, d->month, d->day);
    return buf;
}

}  // namespace

void write_mini_rada(const MiniRada& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::size_t m = r.bills.size();
    {
        auto out = open_out(dir / "rollcall.csv");
        csv::Row header{"actor_id"};
        header.insert(header.end(), r.bills.begin(), r.bills.end());
        csv::write_row(out, header);
        for (std::size_t i = 0; i < r.actors.size(); ++i) {
            csv::Row row{r.actors[i]};
            for (std::size_t j = 0; j < m; ++j) {
                row.emplace_back(to_string(r.cells[i * m + j]));
            }
            csv::write_row(out, row);
        }
    }
    {
        auto out = open_out(dir / "bills.csv");
        csv::write_row(out, {"bill_id", "type", "date", "passed"});
        for (const auto& b : r.bill_records) {
            csv::write_row(out, {b.id, std::string(to_string(b.type)), date_text(b.date),
                                 b.passed ? (*b.passed ? "true" : "false") : ""});
        }
    }
    {
        auto out = open_out(dir / "actors.csv");
        csv::write_row(out, {"actor_id", "name", "gender", "birth_date", "party", "faction", "faction_position",
                             "election_mode"});
        for (const auto& a : r.actor_records) {
            csv::write_row(out, {a.id, a.name, a.gender, date_text(a.birth_date), a.party, a.faction,
                                 a.faction_position, a.election_mode});
        }
    }
    {
        auto out = open_out(dir / "traits.csv");
        csv::write_row(out, {"actor_id", "fwhr"});
        for (const auto& [id, v] : r.traits) {
            csv::write_row(out, {id, csv::format_number(v)});
        }
    }
}

void write_rollcall(const BitMatrix& m, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "actor_id";
    for (std::size_t j = 0; j < m.cols(); ++j) {
        out << ",b" << j;
    }
    out << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << 'a' << i;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out << (m.get(i, j) ? ",Yes" : ",No");
        }
        out << '\n';
    }
}

face::LandmarkSet synthetic_landmarks(const std::string& id, double width, double height, Rng& rng) {
    using face::Landmark;
    face::LandmarkSet s;
    s.image_id = id;
    s.image_width = 1000.0;
    s.image_height = 1000.0;
    s.confidence = 0.99;
    const double cx = 500.0;
    const double cy = 450.0;
    const double half_eyes = rng.uniform(30.0, 45.0);
    s.set(Landmark::LeftEye, {cx - half_eyes, cy});
    s.set(Landmark::RightEye, {cx + half_eyes, cy});
    s.set(Landmark::LeftBoundary, {cx - width / 2.0, cy + rng.uniform(5.0, 25.0)});
    s.set(Landmark::RightBoundary, {cx + width / 2.0, cy + rng.uniform(5.0, 25.0)});
    const double lid = rng.uniform(8.0, 14.0);
    const double skew = rng.uniform(-2.0, 2.0);
    s.set(Landmark::LeftEyelidTop, {cx - half_eyes, cy - lid - skew});
    s.set(Landmark::RightEyelidTop, {cx + half_eyes, cy - lid + skew});
    s.set(Landmark::UpperLipTop, {cx + rng.uniform(-3.0, 3.0), cy - lid + height});
    s.set(Landmark::LeftBrowInner, {cx - 15.0, cy - lid - 12.0});
    s.set(Landmark::RightBrowInner, {cx + 15.0, cy - lid - 12.0});
    return s;
}

face::LandmarkSet transform_landmarks(const face::LandmarkSet& set, double degrees, face::Point pivot,
                                      face::Point shift, double scale) {
    face::LandmarkSet out = set;
    const double a = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(a);
    const double s = std::sin(a);
    for (auto& p : out.points) {
        if (!p) {
            continue;
        }
        const double dx = p->x - pivot.x;
        const double dy = p->y - pivot.y;
        p = face::Point{(pivot.x + c * dx - s * dy) * scale + shift.x, (pivot.y + s * dx + c * dy) * scale + shift.y};
    }
    out.image_width = set.image_width * scale * 4.0;
    out.image_height = set.image_height * scale * 4.0;
    return out;
}

}  // namespace fimpkit::testing
