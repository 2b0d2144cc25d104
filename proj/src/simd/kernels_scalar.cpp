#include "patternzip/simd/kernels.hpp"

namespace patternzip::simd {

namespace {

MixtureSums mixture_step_scalar(double* w, std::size_t count, double num_base, double num_slope, double den_base,
                                double scale, double next_num_base)
{
    double acc_w[4] = {0, 0, 0, 0};
    double acc_a[4] = {0, 0, 0, 0};
    double acc_n[4] = {0, 0, 0, 0};
    for (std::size_t t = 0; t < count; ++t) {
        double td = static_cast<double>(t);
        double num = num_base + num_slope * td;
        double den = den_base + 0.5 * td;
        double v = ((w[t] * num) / den) * scale;
        if (v < kWeightFloor)
            v = 0;
        w[t] = v;
        double den2 = den + 1.0;
        double q = v / den2;
        std::size_t lane = t & 3;
        acc_w[lane] += v;
        acc_a[lane] += q;
        acc_n[lane] += q * (next_num_base + 0.5 * td);
    }
    MixtureSums s;
    s.weight = (acc_w[0] + acc_w[1]) + (acc_w[2] + acc_w[3]);
    s.inv_den = (acc_a[0] + acc_a[1]) + (acc_a[2] + acc_a[3]);
    s.new_mass = (acc_n[0] + acc_n[1]) + (acc_n[2] + acc_n[3]);
    return s;
}

DoubleDouble rowsum_update_scalar(double* hi, double* lo, const double* column, double sign, std::size_t rows)
{
    DoubleDouble prod[4] = {{1, 0}, {1, 0}, {1, 0}, {1, 0}};
    for (std::size_t j = 0; j < rows; ++j) {
        DoubleDouble r = dd_add(DoubleDouble{hi[j], lo[j]}, sign * column[j]);
        hi[j] = r.hi;
        lo[j] = r.lo;
        prod[j & 3] = dd_mul(prod[j & 3], r);
    }
    return dd_mul(dd_mul(prod[0], prod[1]), dd_mul(prod[2], prod[3]));
}

void accumulate_u64_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t count)
{
    for (std::size_t t = 0; t < count; ++t)
        dst[t] += src[t];
}

}  // namespace

const KernelTable& scalar_kernels()
{
    static const KernelTable table{"scalar", mixture_step_scalar, rowsum_update_scalar, accumulate_u64_scalar};
    return table;
}

}  // namespace patternzip::simd
