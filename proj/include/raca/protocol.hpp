#pragma once

#include <string>

#include "raca/system.hpp"

namespace raca {

/// Per-coherence-window CSI signaling cost, in complex scalars.
struct OverheadReport {
  long long centralized = 0;  // relay-hop CSI hauled to the AP plus precoder feedback
  long long distributed = 0;  // local exchanges when the relay computes its own weights
  long long async_saving = 0; // scalars an unchanged relay-AP hop saves per reuse window
  // Smallest number of coherence windows per relay-hop update for which the
  // distributed scheme's running cost drops to the centralized one;
  // +inf when stale-CSI reuse can never catch up.
  double breakeven_coherence_ratio = 0.0;

  std::string csv_row() const;
  static const char* csv_header();
  std::string table() const;
};

/// Raw-count version usable for any antenna/stream tuple.
OverheadReport overhead_counts(long long n_ue, long long n_relay,
                               long long n_ap, long long n_streams);

OverheadReport overhead(const SystemConfig& config);

}  // namespace raca
