// SPDX-License-Identifier: Apache-2.0
// Kernel benchmark: parallel apply vs the serial reference, per container.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "evopiezo/coefficient_block.hpp"
#include "evopiezo/discrete_operators.hpp"
#include "evopiezo/grid.hpp"
#include "evopiezo/linalg.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double best_ms(int reps, const std::function<void()>& fn) {
  fn();  // warm caches and the OpenMP pool
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    fn();
    auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 32;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 7;
  if (n < 2 || reps < 1) {
    std::fprintf(stderr, "usage: %s [cells-per-axis >= 2] [reps >= 1]\n", argv[0]);
    return 1;
  }

  const evopiezo::Grid g = evopiezo::make_grid({n, n, n}, {1.0, 1.0, 1.0});
  const std::int64_t nc = g.num_cells();
  std::printf("grid %d^3, %lld cells, best of %d\n\n", n, static_cast<long long>(nc), reps);
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    auto blk = evopiezo::CoefficientBlock::identity(nc, 6, 1.25);
    auto x = random_vector(std::size_t(blk.global_cols()), 1);
    std::vector<double> y(std::size_t(blk.global_rows()));
    double s = best_ms(reps, [&] { blk.apply_serial(x.data(), y.data()); });
    double p = best_ms(reps, [&] { blk.apply(x.data(), y.data()); });
    row("per-cell block (6x6)", s, p);
  }

  {
    evopiezo::CsrMatrix a = evopiezo::assemble_spatial_block(g).finalize();
    auto x = random_vector(std::size_t(a.cols), 2);
    std::vector<double> y(std::size_t(a.rows));
    double s = best_ms(reps, [&] { a.apply_serial(x.data(), y.data()); });
    double p = best_ms(reps, [&] { a.apply(x.data(), y.data()); });
    row("spatial block (csr)", s, p);
  }

  {
    const std::int64_t dn = 1536;
    evopiezo::DenseMatrix d(dn, dn);
    d.a = random_vector(std::size_t(dn * dn), 3);
    auto x = random_vector(std::size_t(dn), 4);
    std::vector<double> y(static_cast<std::size_t>(dn));
    double s = best_ms(reps, [&] { d.apply_serial(x.data(), y.data()); });
    double p = best_ms(reps, [&] { d.apply(x.data(), y.data()); });
    row("dense matrix (1536^2)", s, p);
  }

  return 0;
}
