#include "patternzip/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace patternzip::simd {

#if defined(PATTERNZIP_HAVE_AVX2)
const KernelTable* avx2_kernels_impl();
#endif

const KernelTable* avx2_kernels()
{
#if defined(PATTERNZIP_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    if (supported)
        return avx2_kernels_impl();
#endif
    return nullptr;
}

const KernelTable& kernels()
{
    static const KernelTable* chosen = [] {
        const char* env = std::getenv("PATTERNZIP_SIMD");
        if (env && std::strcmp(env, "scalar") == 0)
            return &scalar_kernels();
        if (const KernelTable* t = avx2_kernels())
            return t;
        return &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace patternzip::simd
