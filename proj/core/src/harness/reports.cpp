#include "arld/harness/reports.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace arld::harness {

namespace {

std::string format_steps(double steps) {
  if (std::isinf(steps)) return "unsolved";
  std::ostringstream out;
  out << std::fixed << std::setprecision(0) << steps;
  return out.str();
}

}  // namespace

void write_curve_csv(std::ostream& out, std::span<const RunRecord> records,
                     const Summary& summary) {
  out << "step,median";
  for (const auto& r : records) out << ",seed_" << r.seed;
  out << '\n';
  for (std::size_t i = 0; i < summary.steps.size(); ++i) {
    const std::size_t step = summary.steps[i];
    out << step << ',' << summary.median_curve[i];
    for (const auto& r : records) {
      out << ',';
      for (const auto& p : r.curve) {
        if (p.step == step) {
          out << p.mean_score;
          break;
        }
      }
    }
    out << '\n';
  }
}

std::string format_summary_table(std::span<const SummaryRow> rows) {
  std::vector<std::string> tasks;
  std::vector<std::string> labels;
  std::map<std::pair<std::string, std::string>, const Summary*> cells;
  for (const auto& row : rows) {
    if (std::find(tasks.begin(), tasks.end(), row.task) == tasks.end()) tasks.push_back(row.task);
    if (std::find(labels.begin(), labels.end(), row.label) == labels.end()) {
      labels.push_back(row.label);
    }
    cells[{row.label, row.task}] = &row.summary;
  }

  std::ostringstream out;
  out << "| Method |";
  for (const auto& t : tasks) out << ' ' << t << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < tasks.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& label : labels) {
    out << "| " << label << " |";
    for (const auto& t : tasks) {
      auto it = cells.find({label, t});
      if (it == cells.end()) {
        out << " - |";
        continue;
      }
      const Summary& s = *it->second;
      out << ' ' << format_steps(s.median_steps_to_solve);
      if (s.solved < s.trials) {
        out << " (clamped " << format_steps(s.clamped_median_steps_to_solve) << ", " << s.solved
            << '/' << s.trials << " solved)";
      }
      out << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string record_to_json(const RunRecord& r) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : r.curve) curve.push_back({{"step", p.step}, {"score", p.mean_score}});
  nlohmann::json queries = nlohmann::json::array();
  for (const auto& q : r.query_events) {
    queries.push_back({{"step", q.step},
                       {"uncertainty", q.uncertainty},
                       {"threshold", q.threshold ? nlohmann::json(*q.threshold) : nullptr},
                       {"budget_left", q.budget_left}});
  }
  nlohmann::json j = {{"seed", r.seed},
                      {"label", r.label},
                      {"curve", curve},
                      {"queries", queries},
                      {"pretrain_demos", r.pretrain_demos},
                      {"online_budget", r.online_budget},
                      {"charged_demos", r.charged_demos},
                      {"abandoned_queries", r.abandoned_queries},
                      {"aborted", r.aborted}};
  j["steps_to_solve"] = r.steps_to_solve ? nlohmann::json(*r.steps_to_solve) : nullptr;
  if (r.aborted) j["error"] = r.error;
  return j.dump();
}

}  // namespace arld::harness
