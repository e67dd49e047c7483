#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nest/config.hpp"
#include "nest/stats.hpp"
#include "nest/world.hpp"

namespace nest::harness {

struct TrialRecord {
    world::TrialSpec spec;
    stats::StepTrace trace;  // pose after each step; length = duration_steps
};

struct TrainResult {
    std::string checkpoint_path;
    std::string metrics_path;
    std::int64_t env_steps = 0;
    int updates = 0;
};

// The Training Phase: rearing under the configured stimulus with intrinsic
// reward only. Writes checkpoint.bin, metrics.csv, episodes.csv and
// manifest.json into out_dir.
TrainResult run_training(const config::RunConfig& cfg, const std::string& out_dir);

// The Test Phase: frozen weights, stochastic policy (argmax with greedy),
// per-trial seeded RNG streams. Writes trials/trial_NNNN.csv, trials.csv and
// manifest.json into out_dir. The run config is recovered from the manifest
// stored next to the checkpoint.
std::vector<TrialRecord> run_test(const std::string& checkpoint_path, const std::string& out_dir,
                                  bool greedy);

// mean absolute angle between heading and movement direction over all moving
// steps; throws std::invalid_argument when nothing moved
double heading_alignment(const std::vector<TrialRecord>& records);

// read back what run_test wrote (trials.csv + per-trial files)
std::vector<TrialRecord> read_trial_records(const std::string& run_dir);

struct PopulationOptions {
    int agents = 26;  // seeds per (algorithm, condition) cell
    int jobs = 1;
};

// agents x 4 conditions x 3 algorithms, each train + test, into
// out_dir/<algo>_c<condition>_s<seed>/{train,test}
void run_population(const config::RunConfig& base, const PopulationOptions& opt,
                    const std::string& out_dir);

// debug helper behind the `frame` CLI verb: the observation a freshly spawned
// agent would see, plus both display textures, dumped as PPM
void dump_debug_frames(const config::RunConfig& cfg, const std::string& out_dir);

}  // namespace nest::harness
