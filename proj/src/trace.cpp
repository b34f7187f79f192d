#include "raca/trace.hpp"

#include <cstdio>
#include <ostream>

namespace raca {

const char* OptimizerTrace::csv_header() {
  return "iteration,rate_bits,objective,slack_ua,slack_ur,slack_r";
}

void OptimizerTrace::write_csv(std::ostream& out) const {
  out << csv_header() << '\n';
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  r.iteration, r.rate_bits, r.objective, r.slack_ua, r.slack_ur,
                  r.slack_r);
    out << buf;
  }
}

}  // namespace raca
