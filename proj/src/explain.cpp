#include "namegender/explain.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace namegender {

IncrementalTrace incremental_trace(const LstmNetwork& net, const CharIndexer& indexer,
                                   std::string_view name, std::string model_id) {
  IncrementalTrace trace{std::move(model_id), std::string(name), {}};
  for (std::size_t k = 1; k <= name.size(); ++k) {
    const auto prefix = name.substr(0, k);
    trace.rows.push_back({std::string(prefix), predict_proba(net, indexer.index_and_pad(prefix))});
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const IncrementalTrace& trace) {
  out << "prefix,p_male,p_female\n";
  for (const auto& row : trace.rows) {
    out << fmt::format("{},{:.6f},{:.6f}\n", row.prefix, row.p_male, row.p_female());
  }
}

void render_trace_bars(std::ostream& out, const IncrementalTrace& trace, std::size_t width) {
  std::size_t label_width = 0;
  for (const auto& row : trace.rows) label_width = std::max(label_width, row.prefix.size());
  for (const auto& row : trace.rows) {
    const auto male = static_cast<std::size_t>(
        std::clamp(std::lround(row.p_male * static_cast<double>(width)), 0L, static_cast<long>(width)));
    out << fmt::format("{:<{}} |{}{}| M {:.3f}  F {:.3f}\n", row.prefix, label_width,
                       std::string(male, 'M'), std::string(width - male, 'F'), row.p_male,
                       row.p_female());
  }
}

}  // namespace namegender
