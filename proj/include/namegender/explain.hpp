#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "namegender/char_lstm.hpp"
#include "namegender/features.hpp"

namespace namegender {

struct TraceRow {
  std::string prefix;
  double p_male = 0.5;

  double p_female() const { return 1.0 - p_male; }
};

// Class probability after each additional character of a name.
struct IncrementalTrace {
  std::string model_id;
  std::string name;
  std::vector<TraceRow> rows;  // rows[k] scores the first k+1 characters
};

IncrementalTrace incremental_trace(const LstmNetwork& net, const CharIndexer& indexer,
                                   std::string_view name, std::string model_id = {});

// prefix,p_male,p_female
void write_trace_csv(std::ostream& out, const IncrementalTrace& trace);

// One line per prefix: a bar split into male ('M') and female ('F') parts
// proportional to the two probabilities.
void render_trace_bars(std::ostream& out, const IncrementalTrace& trace, std::size_t width = 40);

}  // namespace namegender
