// Timing harness for the two data-parallel kernels: the Monte Carlo
// histogram and the likelihood-column fill. Each kernel runs in its
// OpenMP form and in the serial reference form; results are checked to
// match before times are reported, so a divergence shows up here long
// before it would corrupt a benchmark number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "clickstat/likelihood.hpp"
#include "clickstat/simulate.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

int threads_in_use() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-24s serial %8.3fs   parallel %8.3fs   ratio %.2fx\n", name,
              serial_s, parallel_s, serial_s / parallel_s);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", threads_in_use());

  {
    clickstat::TrialConfig config;
    config.bank = {8, 0.6, 0.01};
    config.photons = 5;
    config.trials = 2'000'000;
    config.seed = 12345;

    auto t0 = std::chrono::steady_clock::now();
    clickstat::EmpiricalPmf serial = clickstat::estimate_pmf_serial(config);
    double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    clickstat::EmpiricalPmf parallel = clickstat::estimate_pmf(config);
    double parallel_s = seconds_since(t0);

    for (std::size_t c = 0; c < serial.counts.size(); ++c)
      if (serial.counts[c] != parallel.counts[c]) {
        std::fprintf(stderr, "monte carlo kernels disagree at bin %zu\n", c);
        return 1;
      }
    report("monte carlo 2e6 trials", serial_s, parallel_s);
  }

  {
    clickstat::DetectorBank bank{64, 0.75, 1e-5};
    clickstat::LikelihoodEvaluator evaluator(bank, 3, 200'000);
    std::vector<double> serial(200'000);
    std::vector<double> parallel(200'000);

    auto t0 = std::chrono::steady_clock::now();
    evaluator.fill_serial(0, serial);
    double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    evaluator.fill(0, parallel);
    double parallel_s = seconds_since(t0);

    for (std::size_t n = 0; n < serial.size(); ++n)
      if (serial[n] != parallel[n]) {
        std::fprintf(stderr, "likelihood kernels disagree at n=%zu\n", n);
        return 1;
      }
    report("likelihood 2e5 column", serial_s, parallel_s);
  }

  return 0;
}
