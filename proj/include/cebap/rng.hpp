#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace cebap {

// Counter-seeded xoshiro256++ stream. State is expanded from (seed, stream,
// attempt) with splitmix64, so substreams are cheap to construct on the fly
// and a given triple always produces the same bits on every platform and
// thread count. Monte-Carlo code keys `stream` by sample index and bumps
// `attempt` when a draw has to be repeated.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t attempt = 0);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53-bit resolution.
    double next_unit();

    double uniform(double lo, double hi);

    // Standard normal via Box-Muller; the log argument is kept in (0, 1].
    double normal();

    // Circularly symmetric CN(0, 1): variance 1/2 per real component.
    std::complex<double> cnormal();

  private:
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Fixed-shape pairwise summation. The reduction tree depends only on the
// length, so sums of values produced in parallel are reproducible.
double pairwise_sum(const double* v, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

} // namespace cebap
