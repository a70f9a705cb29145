#pragma once

#include <array>
#include <cstdint>

namespace gbmpath {

/// One block of the Philox 4x32 counter-based generator, 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Quantile function of the standard normal distribution (Wichura's AS 241,
/// double-precision branch). p must lie in (0, 1).
double inverse_normal_cdf(double p);

/// Counter-based random stream. The key is the 64-bit seed and the high half
/// of the counter is the 64-bit stream id, so identical (seed, stream_id)
/// reproduce identical draws and distinct stream ids give statistically
/// independent streams without any skipping discipline. Each Philox block
/// yields two doubles; draws within a stream advance the low counter half.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    /// Uniform on the open interval (0, 1): (k + 0.5) * 2^-53.
    double uniform();

    /// Standard normal via inverse-CDF of uniform().
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<double, 2> buf_{};
    int avail_ = 0;
};

} // namespace gbmpath
