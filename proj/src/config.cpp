#include "nest/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nest/errors.hpp"
#include "nest/world.hpp"

using nlohmann::json;

namespace nest::config {

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (allowed.find(it.key()) == allowed.end())
            throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
}

template <typename T>
void read_num(const json& obj, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number()) throw ConfigError(std::string("key \"") + key + "\" must be a number");
    out = it->get<T>();
}

void read_positive_int(const json& obj, const char* key, int& out) {
    read_num(obj, key, out);
    if (out <= 0) throw ConfigError(std::string("key \"") + key + "\" must be positive");
}

}  // namespace

std::int64_t planned_env_steps(const RunConfig& cfg) {
    return static_cast<std::int64_t>(cfg.episodes) * cfg.episode_steps;
}

std::int64_t planned_update_count(const RunConfig& cfg) {
    return planned_env_steps(cfg) / cfg.ppo.buffer_size;
}

namespace {

RunConfig parse_object(const json& root, bool with_identity) {
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    RunConfig cfg;
    std::set<std::string> top = {"episodes", "episode_steps", "test", "stimulus", "ppo",
                                 "intrinsic"};
    if (with_identity) {
        top.insert("seed");
        top.insert("condition");
        top.insert("algorithm");
        for (const char* key : {"seed", "condition", "algorithm"})
            if (!root.contains(key))
                throw ConfigError(std::string("config snapshot is missing \"") + key + "\"");
        if (!root["seed"].is_number_unsigned()) throw ConfigError("\"seed\" must be unsigned");
        cfg.seed = root["seed"].get<std::uint64_t>();
        read_num(root, "condition", cfg.condition);
        world::condition_from_index(cfg.condition);  // validates 1..4
        if (!root["algorithm"].is_string()) throw ConfigError("\"algorithm\" must be a string");
        cfg.algorithm = intrinsic::algorithm_from_string(root["algorithm"].get<std::string>());
    }
    reject_unknown(root, top, "config root");
    read_positive_int(root, "episodes", cfg.episodes);
    read_positive_int(root, "episode_steps", cfg.episode_steps);

    if (root.contains("test")) {
        const json& t = root["test"];
        if (!t.is_object()) throw ConfigError("\"test\" must be an object");
        reject_unknown(t, {"trial_steps", "imprinting_trials", "trials_per_viewpoint"}, "test");
        read_positive_int(t, "trial_steps", cfg.test_trial_steps);
        read_num(t, "imprinting_trials", cfg.imprinting_trials);
        read_num(t, "trials_per_viewpoint", cfg.trials_per_viewpoint);
        if (cfg.imprinting_trials < 2 || cfg.imprinting_trials % 2 != 0)
            throw ConfigError("test.imprinting_trials must be even and >= 2");
        if (cfg.trials_per_viewpoint < 2 || cfg.trials_per_viewpoint % 2 != 0)
            throw ConfigError("test.trials_per_viewpoint must be even and >= 2");
    }
    if (root.contains("stimulus")) {
        const json& s = root["stimulus"];
        if (!s.is_object()) throw ConfigError("\"stimulus\" must be an object");
        reject_unknown(s, {"period_steps"}, "stimulus");
        read_positive_int(s, "period_steps", cfg.stimulus_period_steps);
    }
    if (root.contains("ppo")) {
        const json& p = root["ppo"];
        if (!p.is_object()) throw ConfigError("\"ppo\" must be an object");
        reject_unknown(p,
                       {"learning_rate", "batch_size", "buffer_size", "beta", "epsilon", "lambda",
                        "gamma", "max_steps", "epochs_per_update"},
                       "ppo");
        read_num(p, "learning_rate", cfg.ppo.learning_rate);
        read_positive_int(p, "batch_size", cfg.ppo.batch_size);
        read_positive_int(p, "buffer_size", cfg.ppo.buffer_size);
        read_num(p, "beta", cfg.ppo.beta);
        read_num(p, "epsilon", cfg.ppo.epsilon);
        read_num(p, "lambda", cfg.ppo.lambda);
        read_num(p, "gamma", cfg.ppo.gamma);
        read_num(p, "max_steps", cfg.ppo.max_steps);
        read_positive_int(p, "epochs_per_update", cfg.ppo.epochs_per_update);
        if (!(cfg.ppo.gamma > 0.0 && cfg.ppo.gamma <= 1.0))
            throw ConfigError("ppo.gamma must be in (0, 1]");
        if (!(cfg.ppo.lambda >= 0.0 && cfg.ppo.lambda <= 1.0))
            throw ConfigError("ppo.lambda must be in [0, 1]");
        if (!(cfg.ppo.epsilon > 0.0)) throw ConfigError("ppo.epsilon must be positive");
        if (cfg.ppo.buffer_size < cfg.ppo.batch_size)
            throw ConfigError("ppo.buffer_size must be >= ppo.batch_size");
        if (cfg.ppo.max_steps <= 0) throw ConfigError("ppo.max_steps must be positive");
    }
    if (root.contains("intrinsic")) {
        const json& i = root["intrinsic"];
        if (!i.is_object()) throw ConfigError("\"intrinsic\" must be an object");
        reject_unknown(i,
                       {"strength", "gamma", "learning_rate", "beta_fwd", "memory_k", "tau",
                        "update_period", "pair_batch", "replay_capacity"},
                       "intrinsic");
        read_num(i, "strength", cfg.intrinsic.strength);
        read_num(i, "gamma", cfg.intrinsic.gamma);
        read_num(i, "learning_rate", cfg.intrinsic.learning_rate);
        read_num(i, "beta_fwd", cfg.intrinsic.beta_fwd);
        read_positive_int(i, "memory_k", cfg.intrinsic.memory_k);
        read_num(i, "tau", cfg.intrinsic.tau);
        read_positive_int(i, "update_period", cfg.intrinsic.update_period);
        read_positive_int(i, "pair_batch", cfg.intrinsic.pair_batch);
        read_positive_int(i, "replay_capacity", cfg.intrinsic.replay_capacity);
        if (cfg.intrinsic.strength < 0.0) throw ConfigError("intrinsic.strength must be >= 0");
        if (!(cfg.intrinsic.tau > 0.0)) throw ConfigError("intrinsic.tau must be positive");
        if (cfg.intrinsic.beta_fwd < 0.0 || cfg.intrinsic.beta_fwd > 1.0)
            throw ConfigError("intrinsic.beta_fwd must be in [0, 1]");
    }
    return cfg;
}

json parse_text(const std::string& json_text) {
    try {
        return json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    return parse_object(parse_text(json_text), false);
}

RunConfig parse_full_config(const std::string& json_text) {
    return parse_object(parse_text(json_text), true);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open config: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
    json root;
    root["seed"] = cfg.seed;
    root["condition"] = cfg.condition;
    root["algorithm"] = intrinsic::algorithm_name(cfg.algorithm);
    root["episodes"] = cfg.episodes;
    root["episode_steps"] = cfg.episode_steps;
    root["test"] = {{"trial_steps", cfg.test_trial_steps},
                    {"imprinting_trials", cfg.imprinting_trials},
                    {"trials_per_viewpoint", cfg.trials_per_viewpoint}};
    root["stimulus"] = {{"period_steps", cfg.stimulus_period_steps}};
    root["ppo"] = {{"learning_rate", cfg.ppo.learning_rate},
                   {"batch_size", cfg.ppo.batch_size},
                   {"buffer_size", cfg.ppo.buffer_size},
                   {"beta", cfg.ppo.beta},
                   {"epsilon", cfg.ppo.epsilon},
                   {"lambda", cfg.ppo.lambda},
                   {"gamma", cfg.ppo.gamma},
                   {"max_steps", cfg.ppo.max_steps},
                   {"epochs_per_update", cfg.ppo.epochs_per_update}};
    root["intrinsic"] = {{"strength", cfg.intrinsic.strength},
                         {"gamma", cfg.intrinsic.gamma},
                         {"learning_rate", cfg.intrinsic.learning_rate},
                         {"beta_fwd", cfg.intrinsic.beta_fwd},
                         {"memory_k", cfg.intrinsic.memory_k},
                         {"tau", cfg.intrinsic.tau},
                         {"update_period", cfg.intrinsic.update_period},
                         {"pair_batch", cfg.intrinsic.pair_batch},
                         {"replay_capacity", cfg.intrinsic.replay_capacity}};
    return root.dump(2);
}

}  // namespace nest::config
