#include "patternzip/simd/kernels.hpp"

#include <immintrin.h>

namespace patternzip::simd {

namespace {

MixtureSums mixture_step_avx2(double* w, std::size_t count, double num_base, double num_slope, double den_base,
                              double scale, double next_num_base)
{
    const __m256d vnum_base = _mm256_set1_pd(num_base);
    const __m256d vnum_slope = _mm256_set1_pd(num_slope);
    const __m256d vden_base = _mm256_set1_pd(den_base);
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d vnext = _mm256_set1_pd(next_num_base);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d floor = _mm256_set1_pd(kWeightFloor);
    const __m256d four = _mm256_set1_pd(4.0);
    __m256d td = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    __m256d acc_w = _mm256_setzero_pd();
    __m256d acc_a = _mm256_setzero_pd();
    __m256d acc_n = _mm256_setzero_pd();

    std::size_t t = 0;
    for (; t + 4 <= count; t += 4) {
        __m256d num = _mm256_add_pd(vnum_base, _mm256_mul_pd(vnum_slope, td));
        __m256d den = _mm256_add_pd(vden_base, _mm256_mul_pd(half, td));
        __m256d v = _mm256_mul_pd(_mm256_div_pd(_mm256_mul_pd(_mm256_loadu_pd(w + t), num), den), vscale);
        v = _mm256_and_pd(v, _mm256_cmp_pd(v, floor, _CMP_GE_OQ));
        _mm256_storeu_pd(w + t, v);
        __m256d q = _mm256_div_pd(v, _mm256_add_pd(den, one));
        acc_w = _mm256_add_pd(acc_w, v);
        acc_a = _mm256_add_pd(acc_a, q);
        acc_n = _mm256_add_pd(acc_n, _mm256_mul_pd(q, _mm256_add_pd(vnext, _mm256_mul_pd(half, td))));
        td = _mm256_add_pd(td, four);
    }

    alignas(32) double lw[4], la[4], ln[4];
    _mm256_store_pd(lw, acc_w);
    _mm256_store_pd(la, acc_a);
    _mm256_store_pd(ln, acc_n);
    for (; t < count; ++t) {
        double tt = static_cast<double>(t);
        double num = num_base + num_slope * tt;
        double den = den_base + 0.5 * tt;
        double v = ((w[t] * num) / den) * scale;
        if (v < kWeightFloor)
            v = 0;
        w[t] = v;
        double q = v / (den + 1.0);
        std::size_t lane = t & 3;
        lw[lane] += v;
        la[lane] += q;
        ln[lane] += q * (next_num_base + 0.5 * tt);
    }
    MixtureSums s;
    s.weight = (lw[0] + lw[1]) + (lw[2] + lw[3]);
    s.inv_den = (la[0] + la[1]) + (la[2] + la[3]);
    s.new_mass = (ln[0] + ln[1]) + (ln[2] + ln[3]);
    return s;
}

// Lane-wise double-double with the same operation order as the scalar helpers.
inline void quick_two_sum4(__m256d a, __m256d b, __m256d& s, __m256d& e)
{
    s = _mm256_add_pd(a, b);
    e = _mm256_sub_pd(b, _mm256_sub_pd(s, a));
}

DoubleDouble rowsum_update_avx2(double* hi, double* lo, const double* column, double sign, std::size_t rows)
{
    const __m256d vs = _mm256_set1_pd(sign);
    __m256d ph = _mm256_set1_pd(1.0);
    __m256d pl = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= rows; j += 4) {
        __m256d ah = _mm256_loadu_pd(hi + j);
        __m256d al = _mm256_loadu_pd(lo + j);
        __m256d b = _mm256_mul_pd(vs, _mm256_loadu_pd(column + j));
        __m256d s = _mm256_add_pd(ah, b);
        __m256d bb = _mm256_sub_pd(s, ah);
        __m256d e = _mm256_add_pd(_mm256_sub_pd(ah, _mm256_sub_pd(s, bb)), _mm256_sub_pd(b, bb));
        __m256d rh, rl;
        quick_two_sum4(s, _mm256_add_pd(e, al), rh, rl);
        _mm256_storeu_pd(hi + j, rh);
        _mm256_storeu_pd(lo + j, rl);

        __m256d p = _mm256_mul_pd(ph, rh);
        __m256d pe = _mm256_fmsub_pd(ph, rh, p);
        pe = _mm256_add_pd(pe, _mm256_add_pd(_mm256_mul_pd(ph, rl), _mm256_mul_pd(pl, rh)));
        quick_two_sum4(p, pe, ph, pl);
    }
    alignas(32) double lh[4], ll[4];
    _mm256_store_pd(lh, ph);
    _mm256_store_pd(ll, pl);
    DoubleDouble prod[4];
    for (int t = 0; t < 4; ++t)
        prod[t] = {lh[t], ll[t]};
    for (; j < rows; ++j) {
        DoubleDouble r = dd_add(DoubleDouble{hi[j], lo[j]}, sign * column[j]);
        hi[j] = r.hi;
        lo[j] = r.lo;
        prod[j & 3] = dd_mul(prod[j & 3], r);
    }
    return dd_mul(dd_mul(prod[0], prod[1]), dd_mul(prod[2], prod[3]));
}

void accumulate_u64_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t count)
{
    std::size_t t = 0;
    for (; t + 4 <= count; t += 4) {
        __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + t));
        __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + t));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + t), _mm256_add_epi64(a, b));
    }
    for (; t < count; ++t)
        dst[t] += src[t];
}

}  // namespace

const KernelTable* avx2_kernels_impl()
{
    static const KernelTable table{"avx2", mixture_step_avx2, rowsum_update_avx2, accumulate_u64_avx2};
    return &table;
}

}  // namespace patternzip::simd
