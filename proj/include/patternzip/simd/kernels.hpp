#pragma once

// Hot loops with a scalar reference and an AVX2 variant chosen at runtime.
// Floating-point kernels accumulate in four interleaved lanes (element t
// goes to lane t % 4) and combine them as (l0 + l1) + (l2 + l3) in every
// variant, so the results are bit-identical across dispatch targets.

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace patternzip::simd {

// Weights below this are flushed to zero to keep the mixture free of
// denormals.
inline constexpr double kWeightFloor = 1e-300;

struct MixtureSums {
    double weight = 0;    // sum of updated weights
    double inv_den = 0;   // sum of w / (den + 1)
    double new_mass = 0;  // sum of w * (next_num_base + t/2) / (den + 1)
};

// For t in [0, count):
//   num = num_base + num_slope * t,  den = den_base + t/2
//   w[t] = ((w[t] * num) / den) * scale, flushed below kWeightFloor
// and the sums above are taken over the updated weights.
using MixtureStepFn = MixtureSums (*)(double* w, std::size_t count, double num_base, double num_slope,
                                      double den_base, double scale, double next_num_base);

// Unevaluated sum hi + lo with |lo| <= ulp(hi) / 2.
struct DoubleDouble {
    double hi = 0;
    double lo = 0;
};

inline DoubleDouble quick_two_sum(double a, double b)
{
    double s = a + b;
    return {s, b - (s - a)};
}

inline DoubleDouble dd_add(DoubleDouble a, double b)
{
    double s = a.hi + b;
    double bb = s - a.hi;
    double e = (a.hi - (s - bb)) + (b - bb);
    return quick_two_sum(s, e + a.lo);
}

inline DoubleDouble dd_add(DoubleDouble a, DoubleDouble b)
{
    double s = a.hi + b.hi;
    double bb = s - a.hi;
    double e = (a.hi - (s - bb)) + (b.hi - bb);
    return quick_two_sum(s, e + (a.lo + b.lo));
}

inline DoubleDouble dd_mul(DoubleDouble a, DoubleDouble b)
{
    double p = a.hi * b.hi;
    double e = std::fma(a.hi, b.hi, -p);
    e += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p, e);
}

// (hi[j], lo[j]) += sign * column[j] in double-double, sign = +-1; returns
// the double-double product of the updated rowsums.
using RowsumUpdateFn = DoubleDouble (*)(double* hi, double* lo, const double* column, double sign, std::size_t rows);

// dst[t] += src[t]
using AccumulateU64Fn = void (*)(std::uint64_t* dst, const std::uint64_t* src, std::size_t count);

struct KernelTable {
    const char* name;
    MixtureStepFn mixture_step;
    RowsumUpdateFn rowsum_update;
    AccumulateU64Fn accumulate_u64;
};

const KernelTable& scalar_kernels();
// Null when the build or the CPU lacks AVX2 and FMA.
const KernelTable* avx2_kernels();

// Selected once: AVX2 when available unless PATTERNZIP_SIMD=scalar.
const KernelTable& kernels();

}  // namespace patternzip::simd
