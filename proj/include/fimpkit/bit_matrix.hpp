#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fimpkit {

/// Row-major binary matrix, each row packed into 64-bit words. Padding bits
/// past `cols()` are always zero so word-level popcounts stay exact.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t words_per_row() const noexcept { return words_; }

    [[nodiscard]] bool get(std::size_t row, std::size_t col) const noexcept {
        return (data_[row * words_ + col / 64] >> (col % 64)) & 1u;
    }
    void set(std::size_t row, std::size_t col, bool value) noexcept {
        auto& word = data_[row * words_ + col / 64];
        const std::uint64_t mask = std::uint64_t{1} << (col % 64);
        word = value ? (word | mask) : (word & ~mask);
    }

    [[nodiscard]] std::span<const std::uint64_t> row(std::size_t r) const noexcept {
        return {data_.data() + r * words_, words_};
    }
    [[nodiscard]] std::span<std::uint64_t> row(std::size_t r) noexcept {
        return {data_.data() + r * words_, words_};
    }

    /// Number of set bits in row `r`.
    [[nodiscard]] std::uint64_t row_count(std::size_t r) const;

    /// New matrix keeping the given columns, in the given order.
    [[nodiscard]] BitMatrix select_columns(std::span<const std::size_t> cols) const;
    /// New matrix keeping the given rows, in the given order.
    [[nodiscard]] BitMatrix select_rows(std::span<const std::size_t> rows) const;

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Symmetric n x n matrix of pairwise co-occurrence counts,
/// counts[i*n + j] = popcount(row_i & row_j); the diagonal holds row counts.
std::vector<std::uint32_t> gram_counts(const BitMatrix& m);

}  // namespace fimpkit
