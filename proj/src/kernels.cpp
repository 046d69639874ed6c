#include "plmix/kernels.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace plmix::kernels {
namespace {

std::atomic<const Ops*> g_forced{nullptr};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* resolve() {
    const char* env = std::getenv("PLMIX_ISA");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
        if (std::strcmp(env, "avx2") == 0) {
            const Ops* ops = avx2_ops();
            if (ops != nullptr && cpu_has_avx2()) return ops;
            std::fprintf(stderr, "plmix: PLMIX_ISA=avx2 unavailable, using scalar kernels\n");
            return &scalar_ops();
        }
        std::fprintf(stderr, "plmix: unknown PLMIX_ISA value '%s' ignored\n", env);
    }
    const Ops* ops = avx2_ops();
    if (ops != nullptr && cpu_has_avx2()) return ops;
    return &scalar_ops();
}

}  // namespace

const Ops& active() {
    const Ops* forced = g_forced.load(std::memory_order_acquire);
    if (forced != nullptr) return *forced;
    static const Ops* const resolved = resolve();
    return *resolved;
}

void force(const Ops* ops) { g_forced.store(ops, std::memory_order_release); }

}  // namespace plmix::kernels
