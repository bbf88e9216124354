#include <atomic>
#include <cstdlib>
#include <string>

#include "fimpkit/error.hpp"
#include "fimpkit/kernels.hpp"

namespace fimpkit::kernels {
namespace {

bool detect_avx2() {
#if defined(FIMPKIT_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
           __builtin_cpu_supports("popcnt");
#else
    return false;
#endif
}

Isa initial_isa() {
    if (const char* force = std::getenv("FIMPKIT_FORCE_SCALAR"); force && std::string(force) != "0") {
        return Isa::Scalar;
    }
    return detect_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) {
        fail(ErrorCode::DimensionMismatch,
             "kernel operands have " + std::to_string(a) + " and " + std::to_string(b) + " elements");
    }
}

}  // namespace

std::string_view to_string(Isa isa) {
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

bool avx2_available() {
    static const bool available = detect_avx2();
    return available;
}

Isa active_isa() {
    return current().load(std::memory_order_relaxed);
}

ScopedIsa::ScopedIsa(Isa isa) : previous_(active_isa()) {
    if (isa == Isa::Avx2 && !avx2_available()) {
        isa = Isa::Scalar;
    }
    current().store(isa, std::memory_order_relaxed);
}

ScopedIsa::~ScopedIsa() {
    current().store(previous_, std::memory_order_relaxed);
}

std::uint64_t and_popcount(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    check_sizes(a.size(), b.size());
#if defined(FIMPKIT_BUILD_AVX2)
    if (active_isa() == Isa::Avx2) {
        return avx2::and_popcount(a.data(), b.data(), a.size());
    }
#endif
    return scalar::and_popcount(a.data(), b.data(), a.size());
}

std::uint64_t popcount(std::span<const std::uint64_t> a) {
#if defined(FIMPKIT_BUILD_AVX2)
    if (active_isa() == Isa::Avx2) {
        return avx2::popcount(a.data(), a.size());
    }
#endif
    return scalar::popcount(a.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
#if defined(FIMPKIT_BUILD_AVX2)
    if (active_isa() == Isa::Avx2) {
        return avx2::dot(a.data(), b.data(), a.size());
    }
#endif
    return scalar::dot(a.data(), b.data(), a.size());
}

}  // namespace fimpkit::kernels
