#pragma once

#include <cstdint>

#include "psvd/op_counter.hpp"

namespace psvd {

inline std::uint64_t ceil_log2(std::uint64_t n)
{
    std::uint64_t steps = 0, cap = 1;
    while (cap < n) {
        cap <<= 1;
        ++steps;
    }
    return steps;
}

// Attribution of elementary work to counters. In the single-core model all
// arithmetic lands in the CPU kinds. In the multi-core (D-MC) model, vector
// and matrix work is billed as idealized parallel steps in the GPU kinds
// (one step covers arbitrarily many independent elementary operations,
// reductions cost log2 steps) while the elementary totals are recorded
// separately as the actual GPU work for energy accounting. Scalar control
// arithmetic (ratios, shifts; see scalar()) always stays on the CPU.
struct Tally {
    OpCounter& ops;
    bool gpu = false;
    OpCounter* gpu_actual = nullptr;

    explicit Tally(OpCounter& counter) : ops(counter) {}
    Tally(OpCounter& counter, bool gpu_mode, OpCounter* actual)
        : ops(counter), gpu(gpu_mode), gpu_actual(actual)
    {
    }

    void scalar(std::uint64_t adds, std::uint64_t muls, std::uint64_t divs, std::uint64_t sqrts)
    {
        ops.add += adds;
        ops.mul += muls;
        ops.div += divs;
        ops.sqrt += sqrts;
    }

    // Fully parallel elementary multiplications (one step on the GPU).
    void mul_work(std::uint64_t count)
    {
        if (count == 0) return;
        if (gpu) {
            ops.mul_gpu += 1;
            if (gpu_actual) gpu_actual->mul += count;
        } else {
            ops.mul += count;
        }
    }

    // Fully parallel elementary additions; `steps` parallel rounds on the GPU
    // (1 for elementwise updates, ceil_log2 for reductions).
    void add_work(std::uint64_t count, std::uint64_t steps = 1)
    {
        if (count == 0) return;
        if (gpu) {
            ops.add_gpu += steps;
            if (gpu_actual) gpu_actual->add += count;
        } else {
            ops.add += count;
        }
    }

    // A 2x2 rotation block applied to `pairs` two-vectors: 4 mul + 2 add each.
    // On the GPU the pairs are independent, so the whole update is 4 mul and
    // 2 add parallel steps.
    void rot_apply(std::uint64_t pairs)
    {
        if (pairs == 0) return;
        if (gpu) {
            ops.mul_gpu += 4;
            ops.add_gpu += 2;
            if (gpu_actual) {
                gpu_actual->mul += 4 * pairs;
                gpu_actual->add += 2 * pairs;
            }
        } else {
            ops.mul += 4 * pairs;
            ops.add += 2 * pairs;
        }
    }

    void dot(std::uint64_t len)
    {
        if (len == 0) return;
        mul_work(len);
        add_work(len - 1, ceil_log2(len));
    }
};

}  // namespace psvd
