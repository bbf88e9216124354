#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2 variant. The variant is picked once at runtime from CPUID; setting
// FIMPKIT_FORCE_SCALAR=1 in the environment pins the scalar path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace fimpkit::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// True when the AVX2 variant was compiled in and the CPU supports it.
bool avx2_available();

/// ISA used by the dispatching entry points below.
Isa active_isa();

/// Overrides the dispatch choice for the lifetime of the object. Used by the
/// equivalence tests; not thread-safe against concurrent kernel calls.
class ScopedIsa {
public:
    explicit ScopedIsa(Isa isa);
    ~ScopedIsa();
    ScopedIsa(const ScopedIsa&) = delete;
    ScopedIsa& operator=(const ScopedIsa&) = delete;

private:
    Isa previous_;
};

/// popcount(a & b) over equal-length word spans.
std::uint64_t and_popcount(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// popcount(a) over a word span.
std::uint64_t popcount(std::span<const std::uint64_t> a);

/// Inner product of two equal-length double spans.
double dot(std::span<const double> a, std::span<const double> b);

namespace scalar {
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
std::uint64_t popcount(const std::uint64_t* a, std::size_t words);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
std::uint64_t popcount(const std::uint64_t* a, std::size_t words);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace fimpkit::kernels
