#include "tables.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace swingsafe::kernels {
namespace {

Isa detect_best() noexcept {
#if defined(SWINGSAFE_BUILD_AVX2)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
    return Isa::Scalar;
}

Isa initial_isa() noexcept {
    const Isa best = detect_best();
    if (const char* env = std::getenv("SWINGSAFE_ISA")) {
        const std::string v(env);
        if (v == "scalar") return Isa::Scalar;
        if (v == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    }
    return best;
}

std::atomic<Isa>& active() noexcept {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

} // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    if (isa == Isa::Scalar) return true;
#if defined(SWINGSAFE_BUILD_AVX2)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa))
        throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
    active().store(isa, std::memory_order_relaxed);
}

const Table& table(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return scalar::kTable;
    case Isa::Avx2:
#if defined(SWINGSAFE_BUILD_AVX2)
        if (isa_available(Isa::Avx2)) return avx2::kTable;
#endif
        break;
    }
    throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
}

} // namespace swingsafe::kernels
