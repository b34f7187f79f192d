#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "raca/protocol.hpp"

using namespace raca;

namespace {

// Running signaling cost of k coherence windows when the relay-hop CSI is
// refreshed once and reused k-1 times.
long long distributed_cost(const OverheadReport& r, long long k) {
  return k * r.distributed - (k - 1) * r.async_saving;
}

}  // namespace

TEST_CASE("default antenna layout yields the documented scalar counts") {
  const OverheadReport r = overhead_counts(2, 4, 4, 2);
  CHECK(r.centralized == 32);
  CHECK(r.distributed == 56);
  CHECK(r.async_saving == 32);
  CHECK(r.breakeven_coherence_ratio == 4.0);
  CHECK(r.csv_row() == "32,56,32,4");
  CHECK(std::string(OverheadReport::csv_header()) ==
        "centralized,distributed,async_saving,breakeven_coherence_ratio");
}

TEST_CASE("hand-computed small layout") {
  const OverheadReport r = overhead_counts(1, 2, 3, 1);
  CHECK(r.centralized == 8);    // 2 + 4 + 2
  CHECK(r.distributed == 19);   // 4 + 3 + 12
  CHECK(r.async_saving == 12);
  CHECK(r.breakeven_coherence_ratio == 12.0);
  // Equality holds exactly at the breakeven window count.
  CHECK(distributed_cost(r, 12) == 12 * r.centralized);
  CHECK(distributed_cost(r, 11) > 11 * r.centralized);
}

TEST_CASE("breakeven is the first window count where reuse pays off") {
  for (long long nu = 1; nu <= 4; ++nu)
    for (long long nr = 1; nr <= 4; ++nr)
      for (long long na = 1; na <= 4; ++na)
        for (long long ns = 1; ns <= 4; ++ns) {
          const OverheadReport r = overhead_counts(nu, nr, na, ns);
          CAPTURE(nu);
          CAPTURE(nr);
          CAPTURE(na);
          CAPTURE(ns);
          CHECK(r.centralized > 0);
          CHECK(r.distributed > 0);
          CHECK(r.async_saving > 0);
          const double k = r.breakeven_coherence_ratio;
          if (r.distributed <= r.centralized) {
            CHECK(k == 1.0);
          } else if (std::isinf(k)) {
            // Reuse never amortizes the extra per-window cost.
            CHECK(distributed_cost(r, 1000) > 1000 * r.centralized);
          } else {
            const long long kk = static_cast<long long>(k);
            CHECK(kk >= 1);
            CHECK(distributed_cost(r, kk) <= kk * r.centralized);
            if (kk > 1)
              CHECK(distributed_cost(r, kk - 1) > (kk - 1) * r.centralized);
          }
        }
}

TEST_CASE("a stale relay hop can lose forever") {
  const OverheadReport r = overhead_counts(4, 1, 4, 1);
  CHECK(r.distributed > r.centralized);
  CHECK(std::isinf(r.breakeven_coherence_ratio));
  CHECK(r.table().find("never") != std::string::npos);
  CHECK(r.csv_row().find("inf") != std::string::npos);
}

TEST_CASE("counts must be positive") {
  CHECK_THROWS_AS(overhead_counts(0, 4, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(overhead_counts(2, -1, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(overhead_counts(2, 4, 4, 0), std::invalid_argument);
}

TEST_CASE("config-level report follows the antenna fields") {
  SystemConfig cfg;
  cfg.n_ap = 6;
  const OverheadReport r = overhead(cfg);
  CHECK(r.centralized == 32);   // unchanged: no AP term in this count
  CHECK(r.distributed == 76);   // 16 + 12 + 48
  CHECK(r.async_saving == 48);
  CHECK(r.breakeven_coherence_ratio == 12.0);
  CHECK(distributed_cost(r, 12) <= 12 * r.centralized);
  CHECK(distributed_cost(r, 11) > 11 * r.centralized);
}
