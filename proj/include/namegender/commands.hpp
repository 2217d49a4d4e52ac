#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "namegender/artifact.hpp"
#include "namegender/corpus.hpp"
#include "namegender/error.hpp"
#include "namegender/pipeline.hpp"
#include "namegender/run_config.hpp"

namespace namegender {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitTraining = 4;

int exit_code_for(ErrorCode code);

struct TrainOutcome {
  ExperimentResult result;
  ModelArtifact artifact;
};

// Trains the configured variant, method and features on `corpus`.
TrainOutcome train_from_config(const Corpus& corpus, const RunConfig& config,
                               const EpochCallback& on_epoch = {});

// epoch,train_acc,test_acc,train_loss
void write_curve_csv(std::ostream& out, const std::vector<EpochMetrics>& curve);

// One row per candidate: parameter columns, mean, std, then one column per fold.
void write_grid_csv(std::ostream& out, const std::vector<CandidateScore>& scores);

// embed,hidden,final_test_acc,best_test_acc,best_epoch
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Parses `args` (program name first) and runs one subcommand. Errors are
// printed to `err` and mapped to the documented exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace namegender
