#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "arld/harness/aggregate.hpp"
#include "arld/harness/trial.hpp"

namespace arld::harness {

/// step,median,seed_<a>,seed_<b>,...
void write_curve_csv(std::ostream& out, std::span<const RunRecord> records, const Summary& summary);

struct SummaryRow {
  std::string label;  // e.g. "ADQN-B"
  std::string task;
  Summary summary;
};

/// Median steps-to-solve table: one row per method label, one column per task.
std::string format_summary_table(std::span<const SummaryRow> rows);

std::string record_to_json(const RunRecord& record);

}  // namespace arld::harness
