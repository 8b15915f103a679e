#pragma once

#include <string>

#include "gbre/run_config.hpp"
#include "gbre/synth.hpp"

namespace gbre {

// Command bodies shared by the binary and the acceptance suite. Each writes
// its artifacts under config.out_dir and throws Usage/Data/NumericError on
// failure.

// trains, writes checkpoint.json, history.jsonl and config.json
void cmd_train(const RunConfig& config);

// scores a checkpoint on test_path, writes metrics.json, pr_curve.csv,
// eval_config.json and (optionally) attention.jsonl
void cmd_eval(const RunConfig& config);

// per-bag relation scores for test_path into predictions.jsonl
void cmd_predict(const RunConfig& config);

void cmd_synth(const SynthSpec& spec, const std::string& out_dir);

}  // namespace gbre
