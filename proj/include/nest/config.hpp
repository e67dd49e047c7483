#pragma once

#include <cstdint>
#include <string>

#include "nest/intrinsic.hpp"
#include "nest/ppo.hpp"

namespace nest::config {

// Everything an experiment needs beyond its identity. Identity (seed,
// condition, algorithm, output dir) comes from the command line; the JSON
// config carries the experiment shape. Unknown JSON keys are rejected.
struct RunConfig {
    // identity, filled from CLI
    std::uint64_t seed = 1;
    int condition = 1;
    intrinsic::Algorithm algorithm = intrinsic::Algorithm::Icm;

    // phases
    int episodes = 1000;
    int episode_steps = 1000;
    int test_trial_steps = 1000;
    int imprinting_trials = 40;
    int trials_per_viewpoint = 40;
    int stimulus_period_steps = 60;  // one full rock = 6 s at 10 steps/s

    ppo::PpoConfig ppo;
    intrinsic::IntrinsicConfig intrinsic;
};

std::int64_t planned_env_steps(const RunConfig& cfg);
std::int64_t planned_update_count(const RunConfig& cfg);

// parse the JSON text; throws ConfigError on syntax errors, unknown keys at
// any level, or invariant violations
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);  // IoError / ConfigError

// parse a config snapshot as embedded in a run manifest: the same shape plus
// the mandatory identity keys seed / condition / algorithm
RunConfig parse_full_config(const std::string& json_text);

// canonical JSON snapshot (sorted keys) of the full merged config, identity
// included; embedded verbatim in the run manifest
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace nest::config
