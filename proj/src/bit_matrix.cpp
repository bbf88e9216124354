#include "fimpkit/bit_matrix.hpp"

#include <algorithm>

#include "fimpkit/kernels.hpp"

namespace fimpkit {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(rows * words_, 0) {}

std::uint64_t BitMatrix::row_count(std::size_t r) const {
    return kernels::popcount(row(r));
}

BitMatrix BitMatrix::select_columns(std::span<const std::size_t> cols) const {
    BitMatrix out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (get(r, cols[c])) {
                out.set(r, c, true);
            }
        }
    }
    return out;
}

BitMatrix BitMatrix::select_rows(std::span<const std::size_t> rows) const {
    BitMatrix out(rows.size(), cols_);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = row(rows[r]);
        auto dst = out.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

std::vector<std::uint32_t> gram_counts(const BitMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<std::uint32_t> counts(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ri = m.row(i);
        counts[i * n + i] = static_cast<std::uint32_t>(kernels::popcount(ri));
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto c = static_cast<std::uint32_t>(kernels::and_popcount(ri, m.row(j)));
            counts[i * n + j] = c;
            counts[j * n + i] = c;
        }
    }
    return counts;
}

}  // namespace fimpkit
