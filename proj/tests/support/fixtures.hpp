#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fimpkit/bit_matrix.hpp"
#include "fimpkit/core_data.hpp"
#include "fimpkit/covote_network.hpp"
#include "fimpkit/face_geometry.hpp"

namespace fimpkit::testing {

/// Portable draws on top of mt19937_64 (std distributions differ across
/// standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();                        // (0, 1)
    double uniform(double lo, double hi);
    double normal(double mean = 0.0, double sd = 1.0);
    std::size_t below(std::size_t bound);    // [0, bound)
    bool bernoulli(double p) { return uniform() < p; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.below(i)]);
    }
}

BitMatrix random_bit_matrix(std::size_t rows, std::size_t cols, double density, Rng& rng);

/// Symmetric integer weights with a zero diagonal; connected when requested
/// (a random spanning path is added first).
CovoteGraph random_graph(std::size_t n, double edge_probability, std::uint32_t max_weight, bool connected, Rng& rng);

/// Two-bloc parliament with planted leaders and followers. Every bloc has
/// `leaders_per_bloc` leaders; each leader has `followers_per_leader`
/// followers that copy its votes with a small flip rate. Leaders carry the
/// high trait, followers the low one.
struct MiniRadaOptions {
    std::size_t leaders_per_bloc = 5;
    std::size_t followers_per_leader = 3;
    std::size_t bills = 200;
    double leader_flip = 0.10;
    double follower_flip = 0.05;
    double leader_trait = 2.2;
    double follower_trait = 1.85;
    double trait_sd = 0.05;
};

struct MiniRada {
    std::vector<std::string> actors;
    std::vector<std::string> bills;
    std::vector<RawVote> cells;  // actors x bills
    std::vector<BillRecord> bill_records;
    std::vector<ActorRecord> actor_records;
    std::vector<std::pair<std::string, double>> traits;
    std::vector<std::size_t> bloc;  // planted partition
    std::vector<bool> leader;

    [[nodiscard]] VoteMatrix votes() const { return VoteMatrix(actors, bills, cells); }
    [[nodiscard]] TraitTable trait_table() const;
};

MiniRada make_mini_rada(std::uint64_t seed, const MiniRadaOptions& options = {});

/// Permutes the trait values across actors.
void shuffle_traits(MiniRada& rada, std::uint64_t seed);

/// Writes rollcall.csv, bills.csv, actors.csv and traits.csv into `dir`.
void write_mini_rada(const MiniRada& rada, const std::filesystem::path& dir);

/// Writes a roll-call CSV of the given encoded matrix (Yes / No tokens).
void write_rollcall(const BitMatrix& m, const std::filesystem::path& path);

/// Frontal landmark set in image coordinates with the given width/height
/// ratio (eyelid-mean reference), before any rotation.
face::LandmarkSet synthetic_landmarks(const std::string& id, double width, double height, Rng& rng);

/// Rigid rotation by `degrees` about `pivot`, then translation and uniform
/// scaling; applied to every present point.
face::LandmarkSet transform_landmarks(const face::LandmarkSet& set, double degrees, face::Point pivot,
                                      face::Point shift, double scale);

}  // namespace fimpkit::testing
