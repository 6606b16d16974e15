#pragma once

#include "quls/kernel.hpp"

#include <cstdint>

namespace quls {

/**
 * Counter-based random stream: the i-th 64-bit output is a pure function of
 * (key, i), so a stream is reproducible from its seed on any platform and
 * independent streams are obtained from distinct keys.
 */
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double standard_normal() noexcept;
    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape) noexcept;
    /// One draw from the given kernel.
    double draw(const SymmetricKernel& kernel) noexcept;

    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace quls
