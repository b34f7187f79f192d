#include "raca/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace raca {

OverheadReport overhead_counts(long long n_ue, long long n_relay,
                               long long n_ap, long long n_streams) {
  if (n_ue < 1 || n_relay < 1 || n_ap < 1 || n_streams < 1)
    throw std::invalid_argument("overhead_counts: counts must be positive");
  OverheadReport r;
  r.centralized = n_relay * n_ue + n_relay * n_relay + 2 * n_ue * n_streams;
  r.distributed = 2 * n_relay * n_ue + n_ap * n_ue + 2 * n_ap * n_relay;
  r.async_saving = 2 * n_ap * n_relay;
  if (r.distributed <= r.centralized) {
    r.breakeven_coherence_ratio = 1.0;
  } else {
    // k windows cost k*dist - (k-1)*saving distributed vs k*cent centralized.
    const long long denom = r.centralized + r.async_saving - r.distributed;
    if (denom <= 0) {
      r.breakeven_coherence_ratio = std::numeric_limits<double>::infinity();
    } else {
      r.breakeven_coherence_ratio = static_cast<double>(
          (r.async_saving + denom - 1) / denom);  // ceil division
    }
  }
  return r;
}

OverheadReport overhead(const SystemConfig& config) {
  config.validate();
  return overhead_counts(config.n_ue, config.n_relay, config.n_ap,
                         config.n_streams);
}

const char* OverheadReport::csv_header() {
  return "centralized,distributed,async_saving,breakeven_coherence_ratio";
}

std::string OverheadReport::csv_row() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%.10g", centralized,
                distributed, async_saving, breakeven_coherence_ratio);
  return buf;
}

std::string OverheadReport::table() const {
  std::ostringstream os;
  os << "signaling overhead (complex scalars per coherence window)\n"
     << "  centralized:  " << centralized << '\n'
     << "  distributed:  " << distributed << '\n'
     << "  async saving: " << async_saving << '\n'
     << "  breakeven relay-hop coherence factor: ";
  if (std::isinf(breakeven_coherence_ratio))
    os << "never";
  else
    os << breakeven_coherence_ratio;
  os << '\n';
  return os.str();
}

}  // namespace raca
