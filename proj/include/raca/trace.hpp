#pragma once

#include <iosfwd>
#include <vector>

namespace raca {

/// One row of an optimizer trace. Slacks are budget minus usage for the
/// three power constraints (UE low band, UE high band, relay forward).
struct IterationRecord {
  int iteration = 0;
  double rate_bits = 0.0;
  double objective = 0.0;
  double slack_ua = 0.0;
  double slack_ur = 0.0;
  double slack_r = 0.0;
};

struct OptimizerTrace {
  std::vector<IterationRecord> records;

  static const char* csv_header();  // "iteration,rate_bits,objective,..."
  void write_csv(std::ostream& out) const;
};

}  // namespace raca
