#include "patternzip/container.hpp"

#include <cmath>

#include "patternzip/bitio.hpp"
#include "patternzip/range_coder.hpp"
#include "patternzip/twopart.hpp"

namespace patternzip {

namespace {

constexpr std::uint8_t kMagic[4] = {0x50, 0x41, 0x54, 0x43};
constexpr std::uint8_t kVersion = 0x01;

}  // namespace

ModelId parse_model_id(std::string_view name)
{
    if (name == "known-k")
        return ModelId::KnownK;
    if (name == "mixture")
        return ModelId::Mixture;
    if (name == "unknown-k")
        return ModelId::UnknownK;
    if (name == "two-part")
        return ModelId::TwoPart;
    throw Error("unknown model '" + std::string(name) + "' (known-k, mixture, unknown-k, two-part)");
}

std::string model_name(ModelId id)
{
    switch (id) {
    case ModelId::KnownK: return "known-k";
    case ModelId::Mixture: return "mixture";
    case ModelId::UnknownK: return "unknown-k";
    case ModelId::TwoPart: return "two-part";
    }
    throw Error("unknown model id");
}

std::uint16_t parse_eps_fixed(std::string_view s)
{
    // [0].ddd... scaled by 2^16 with round-half-up, exactly.
    std::size_t i = 0;
    std::uint64_t whole = 0;
    bool any = false;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        whole = whole * 10 + static_cast<std::uint64_t>(s[i] - '0');
        if (whole > 1)
            throw Error("eps must lie in (0, 1)");
        ++i;
        any = true;
    }
    std::vector<int> digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
            digits.push_back(s[i] - '0');
            ++i;
            any = true;
        }
    }
    if (!any || i != s.size())
        throw Error("eps must be a decimal number such as 0.1");
    if (whole >= 1)
        throw Error("eps must lie in (0, 1)");
    // numerator = round(0.d1d2... * 2^16); multiply the digit string by 2^16.
    std::vector<int> prod = digits;
    std::uint64_t carry = 0;
    for (std::size_t j = prod.size(); j-- > 0;) {
        std::uint64_t v = static_cast<std::uint64_t>(prod[j]) * kEpsDenominator + carry;
        prod[j] = static_cast<int>(v % 10);
        carry = v / 10;
    }
    std::uint64_t num = carry;
    if (!prod.empty() && prod[0] >= 5)
        ++num;
    if (num == 0 || num >= kEpsDenominator)
        throw Error("eps must lie in (0, 1) at 2^-16 resolution");
    return static_cast<std::uint16_t>(num);
}

std::uint16_t eps_to_fixed(double eps)
{
    double v = std::floor(eps * kEpsDenominator + 0.5);
    if (!(v >= 1 && v < kEpsDenominator))
        throw Error("eps must lie in (0, 1) at 2^-16 resolution");
    return static_cast<std::uint16_t>(v);
}

std::unique_ptr<SequentialModel> container_model(ModelId id, std::size_t n, std::size_t k, std::uint16_t eps_fixed,
                                                 std::size_t mixture_cap)
{
    switch (id) {
    case ModelId::KnownK: return pattern_known_k_model(k);
    case ModelId::Mixture: return pattern_mixture_model(n, mixture_cap);
    case ModelId::UnknownK: return pattern_unknown_k_model(fixed_to_eps(eps_fixed));
    case ModelId::TwoPart: break;
    }
    throw Error("model has no sequential form");
}

CompressResult compress_sequence(const Sequence& seq, const CompressOptions& opt)
{
    if (seq.empty())
        throw Error("empty input");
    Pattern p = extract_pattern(seq);
    const std::size_t n = p.size();
    const std::size_t k = distinct_count(p);

    BitWriter w;
    for (auto b : kMagic)
        w.put_byte(b);
    w.put_byte(kVersion);
    w.put_byte(static_cast<std::uint8_t>(opt.model));
    switch (opt.model) {
    case ModelId::KnownK: elias_delta_encode(w, k); break;
    case ModelId::Mixture: elias_delta_encode(w, opt.mixture_cap + 1); break;
    case ModelId::UnknownK:
    case ModelId::TwoPart: w.put_bits(opt.eps_fixed, 16); break;
    default: throw Error("unknown model id");
    }
    elias_delta_encode(w, n);
    elias_delta_encode(w, k);
    std::vector<const Token*> dict(k, nullptr);
    for (std::size_t i = 0; i < n; ++i)
        if (!dict[p[i] - 1])
            dict[p[i] - 1] = &seq[i];
    for (const Token* t : dict) {
        if (t->empty())
            throw Error("empty token");
        elias_delta_encode(w, t->size());
        for (char c : *t)
            w.put_byte(static_cast<std::uint8_t>(c));
    }

    CompressResult res;
    res.header_bits = w.bit_count();
    while (w.bit_count() % 8)
        w.put_bit(false);
    if (opt.model == ModelId::TwoPart) {
        res.payload_bits = twopart_encode_into(p, fixed_to_eps(opt.eps_fixed), w).bits;
        res.ideal_bits = static_cast<double>(res.payload_bits);
    } else {
        auto model = container_model(opt.model, n, k, opt.eps_fixed, opt.mixture_cap);
        res.ideal_bits = assign_log_prob(*model, p);
        res.payload_bits = arith_encode_into(*model, p, w);
    }
    res.report = modified_redundancy(static_cast<double>(res.payload_bits), p);
    res.bytes = w.finish().bytes;
    return res;
}

CompressResult compress(std::string_view data, const CompressOptions& opt)
{
    return compress_sequence(tokenize(data, opt.tokens), opt);
}

Sequence decompress_sequence(std::span<const std::uint8_t> bytes)
{
    BitReader r(bytes, bytes.size() * 8);
    if (bytes.size() < 6)
        throw Error("not a pattern container (too short)");
    for (auto b : kMagic)
        if (r.read_bits(8) != b)
            throw Error("not a pattern container (bad magic)");
    auto version = r.read_bits(8);
    if (version != kVersion)
        throw Error("unsupported container version " + std::to_string(version));
    auto id_byte = r.read_bits(8);
    if (id_byte < 1 || id_byte > 4)
        throw Error("unknown model id " + std::to_string(id_byte));
    auto id = static_cast<ModelId>(id_byte);

    std::uint64_t param_k = 0;
    std::size_t cap = 0;
    std::uint16_t eps_fixed = 0;
    switch (id) {
    case ModelId::KnownK: param_k = elias_delta_decode(r); break;
    case ModelId::Mixture: cap = elias_delta_decode(r) - 1; break;
    default:
        eps_fixed = static_cast<std::uint16_t>(r.read_bits(16));
        if (eps_fixed == 0)
            throw Error("corrupt container (eps)");
    }
    std::uint64_t n = elias_delta_decode(r);
    std::uint64_t k = elias_delta_decode(r);
    if (k > n || (id == ModelId::KnownK && param_k != k))
        throw Error("corrupt container (dictionary size)");
    if (n > (std::uint64_t{1} << 36))
        throw Error("corrupt container (length)");
    Sequence dict(k);
    for (auto& t : dict) {
        std::uint64_t len = elias_delta_decode(r);
        if (len * 8 > r.remaining())
            throw Error("unexpected end of stream");
        t.resize(len);
        for (auto& c : t)
            c = static_cast<char>(r.read_bits(8));
    }
    r.seek((r.position() + 7) / 8 * 8);

    Pattern p;
    if (id == ModelId::TwoPart) {
        p = twopart_decode_from(r, n, fixed_to_eps(eps_fixed));
    } else {
        auto model = container_model(id, n, k, eps_fixed, cap);
        p = arith_decode_from(*model, r, n);
    }
    if (distinct_count(p) != k)
        throw Error("corrupt container (index count mismatch)");
    Sequence out;
    out.reserve(n);
    for (auto v : p)
        out.push_back(dict[v - 1]);
    return out;
}

std::string decompress(std::span<const std::uint8_t> bytes)
{
    return join_tokens(decompress_sequence(bytes));
}

}  // namespace patternzip
