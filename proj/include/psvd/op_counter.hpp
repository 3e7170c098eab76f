#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace psvd {

// Billable operation kinds. The first six are digital-controller work,
// the last two are photonic-chip actions (one full mesh reprogram / one
// vector pass).
enum class OpKind : std::uint8_t {
    add = 0,
    mul,
    div,
    sqrt,
    add_gpu,
    mul_gpu,
    chip_config,
    chip_op,
};

inline constexpr std::size_t kOpKindCount = 8;

inline constexpr std::array<std::string_view, kOpKindCount> kOpKindNames = {
    "add", "mul", "div", "sqrt", "add_gpu", "mul_gpu", "chip_config", "chip_op",
};

inline std::string_view to_string(OpKind k) { return kOpKindNames[static_cast<std::size_t>(k)]; }

inline OpKind op_kind_from_string(std::string_view name)
{
    for (std::size_t i = 0; i < kOpKindCount; ++i) {
        if (kOpKindNames[i] == name) return static_cast<OpKind>(i);
    }
    throw std::invalid_argument("unknown operation kind: " + std::string(name));
}

// Monotone tallies of elementary operations, one counter per kind.
// Index and storage operations are never tallied.
struct OpCounter {
    std::uint64_t add = 0;
    std::uint64_t mul = 0;
    std::uint64_t div = 0;
    std::uint64_t sqrt = 0;
    std::uint64_t add_gpu = 0;
    std::uint64_t mul_gpu = 0;
    std::uint64_t chip_config = 0;
    std::uint64_t chip_op = 0;

    std::uint64_t get(OpKind k) const
    {
        switch (k) {
        case OpKind::add: return add;
        case OpKind::mul: return mul;
        case OpKind::div: return div;
        case OpKind::sqrt: return sqrt;
        case OpKind::add_gpu: return add_gpu;
        case OpKind::mul_gpu: return mul_gpu;
        case OpKind::chip_config: return chip_config;
        case OpKind::chip_op: return chip_op;
        }
        throw std::invalid_argument("bad OpKind");
    }

    void set(OpKind k, std::uint64_t v)
    {
        switch (k) {
        case OpKind::add: add = v; return;
        case OpKind::mul: mul = v; return;
        case OpKind::div: div = v; return;
        case OpKind::sqrt: sqrt = v; return;
        case OpKind::add_gpu: add_gpu = v; return;
        case OpKind::mul_gpu: mul_gpu = v; return;
        case OpKind::chip_config: chip_config = v; return;
        case OpKind::chip_op: chip_op = v; return;
        }
        throw std::invalid_argument("bad OpKind");
    }

    // Merge is component-wise sum.
    OpCounter& operator+=(const OpCounter& o)
    {
        add += o.add;
        mul += o.mul;
        div += o.div;
        sqrt += o.sqrt;
        add_gpu += o.add_gpu;
        mul_gpu += o.mul_gpu;
        chip_config += o.chip_config;
        chip_op += o.chip_op;
        return *this;
    }

    friend OpCounter operator+(OpCounter a, const OpCounter& b) { return a += b; }

    // Delta since an earlier snapshot; counters are monotone so this never wraps.
    OpCounter delta_since(const OpCounter& snap) const
    {
        OpCounter d;
        d.add = add - snap.add;
        d.mul = mul - snap.mul;
        d.div = div - snap.div;
        d.sqrt = sqrt - snap.sqrt;
        d.add_gpu = add_gpu - snap.add_gpu;
        d.mul_gpu = mul_gpu - snap.mul_gpu;
        d.chip_config = chip_config - snap.chip_config;
        d.chip_op = chip_op - snap.chip_op;
        return d;
    }

    std::uint64_t total() const
    {
        return add + mul + div + sqrt + add_gpu + mul_gpu + chip_config + chip_op;
    }

    friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

}  // namespace psvd
