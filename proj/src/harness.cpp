#include "nest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "nest/checkpoint.hpp"
#include "nest/errors.hpp"
#include "nest/intrinsic.hpp"
#include "nest/ppo.hpp"
#include "nest/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace nest::harness {

namespace {

constexpr float kFovDeg = 60.0f;
constexpr float kNearPlane = 0.1f;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t trial_seed(std::uint64_t run_seed, int trial_id) {
    unsigned char b[4];
    auto u = static_cast<std::uint32_t>(trial_id);
    b[0] = static_cast<unsigned char>(u & 0xff);
    b[1] = static_cast<unsigned char>((u >> 8) & 0xff);
    b[2] = static_cast<unsigned char>((u >> 16) & 0xff);
    b[3] = static_cast<unsigned char>((u >> 24) & 0xff);
    return mix_seed(run_seed, fnv1a64(b, 4));
}

// what a display wall shows for a whole trial or rearing phase
struct WallShow {
    world::ObjectId object = world::ObjectId::Blank;
    world::ViewpointRange range;  // ignored for Blank
};

// display textures repeat with the stimulus period, so cache by exact pose
struct TexKey {
    std::uint8_t object;
    std::uint64_t az_bits, el_bits;
    bool operator<(const TexKey& o) const {
        if (object != o.object) return object < o.object;
        if (az_bits != o.az_bits) return az_bits < o.az_bits;
        return el_bits < o.el_bits;
    }
};

class TexCache {
  public:
    const render::DisplayTexture& get(world::ObjectId obj, double azimuth_deg,
                                      double elevation_deg) {
        if (obj == world::ObjectId::Blank) {
            if (!blank_) blank_ = render::render_display_texture(obj, 0.0, 0.0);
            return *blank_;
        }
        TexKey key{static_cast<std::uint8_t>(obj), std::bit_cast<std::uint64_t>(azimuth_deg),
                   std::bit_cast<std::uint64_t>(elevation_deg)};
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, render::render_display_texture(obj, azimuth_deg, elevation_deg))
                     .first;
        return it->second;
    }

    const render::DisplayTexture& at_step(const WallShow& show, std::int64_t t, int period) {
        if (show.object == world::ObjectId::Blank) return get(show.object, 0.0, 0.0);
        double az = world::stimulus_azimuth(t, show.range, period);
        return get(show.object, az, show.range.elevation_deg);
    }

  private:
    std::map<TexKey, render::DisplayTexture> cache_;
    std::optional<render::DisplayTexture> blank_;
};

void render_obs_chw(const world::ChamberSpec& chamber, const world::AgentBody& body,
                    const world::Pose& pose, const render::DisplayTexture& x0,
                    const render::DisplayTexture& xl, float* chw) {
    render::Camera cam = render::agent_camera(pose, body.camera_height, kFovDeg, kNearPlane);
    render::Frame f = render::render_observation(chamber, x0, xl, cam);
    render::frame_to_chw(f, chw);
}

class CsvWriter {
  public:
    CsvWriter(const fs::path& path, const std::string& header) : path_(path.string()) {
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) throw IoError("cannot write " + path_);
        out_ << header << '\n';
    }
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }
    void close() {
        out_.close();
        if (out_.fail()) throw IoError("write failed: " + path_);
    }

  private:
    std::string path_;
    std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.close();
    if (out.fail()) throw IoError("write failed: " + path.string());
}

// manifest: written once per phase directory, inventory checksums last
void write_manifest(const fs::path& dir, const config::RunConfig& cfg, const char* phase,
                    json extra, const std::vector<std::string>& files, double seconds,
                    const std::string& error) {
    json m;
    m["version"] = kVersionString;
    m["phase"] = phase;
    m["status"] = error.empty() ? "complete" : "incomplete";
    if (!error.empty()) m["error"] = error;
    m["config"] = json::parse(config::run_config_to_json(cfg));
    m["timing_seconds"] = seconds;
    for (auto& [k, v] : extra.items()) m[k] = v;
    json inv = json::object();
    for (const std::string& f : files) {
        std::uint64_t sum = checkpoint::file_checksum((dir / f).string());
        inv[f] = hex64(sum);
    }
    m["files"] = inv;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::size_t min_fields) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {  // header
            first = false;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() < min_fields)
            throw IoError("malformed row in " + path.string() + ": " + line);
        rows.push_back(std::move(fields));
    }
    return rows;
}

double parse_f64(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

// ---------------------------------------------------------------------------
// training

TrainResult run_training(const config::RunConfig& cfg, const std::string& out_dir) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    world::ChamberSpec chamber;
    world::AgentBody body;
    world::RearingCondition cond = world::condition_from_index(cfg.condition);
    auto ranges = world::viewpoint_ranges(cond);
    const world::ViewpointRange& fam = world::familiar_range(ranges);

    TrainResult result;
    try {
        nn::PolicyNet<float> policy;
        {
            Rng init_rng(mix_seed(cfg.seed, fnv1a64("policy-init")));
            policy.init(init_rng);
        }
        nn::ParamSet<float> policy_params;
        policy.collect(policy_params, "policy");
        nn::Adam<float> opt;
        opt.attach(policy_params);

        intrinsic::IntrinsicConfig icfg = cfg.intrinsic;
        icfg.algorithm = cfg.algorithm;
        auto intr = intrinsic::make_intrinsic(icfg, cfg.seed);

        Rng act_rng(mix_seed(cfg.seed, fnv1a64("train-actions")));
        Rng spawn_rng(mix_seed(cfg.seed, fnv1a64("train-spawn")));
        Rng shuffle_rng(mix_seed(cfg.seed, fnv1a64("train-shuffle")));

        // rearing: the familiar view on the x0 display wall, the other blank
        WallShow show_x0{cond.object, fam};
        WallShow show_xl{world::ObjectId::Blank, {}};
        TexCache tex;
        // the stimulus pose repeats every period; warm the whole cycle up front
        for (int t = 0; t < cfg.stimulus_period_steps; ++t)
            tex.at_step(show_x0, t, cfg.stimulus_period_steps);

        ppo::RolloutBuffer buffer(cfg.ppo.buffer_size);
        CsvWriter metrics(dir / "metrics.csv",
                          "update,env_step,lr,mean_reward,policy_loss,value_loss,entropy");
        CsvWriter episodes(dir / "episodes.csv",
                           "episode,steps,reward_mean,reward_min,reward_max,reward_std");

        std::vector<float> obs(3 * render::kFramePixels), next_obs(3 * render::kFramePixels);
        std::vector<double> ep_rewards;
        std::int64_t env_steps = 0;
        int updates = 0;

        for (int ep = 0; ep < cfg.episodes; ++ep) {
            world::Pose pose = world::spawn(spawn_rng, chamber, body);
            render_obs_chw(chamber, body, pose,
                           tex.at_step(show_x0, 0, cfg.stimulus_period_steps),
                           tex.at_step(show_xl, 0, cfg.stimulus_period_steps), obs.data());
            ep_rewards.clear();

            for (int t = 0; t < cfg.episode_steps; ++t) {
                ppo::ActionSample s = ppo::select_action(policy, obs.data(), act_rng);
                pose = world::step_pose(pose, s.action, body, chamber);
                render_obs_chw(chamber, body, pose,
                               tex.at_step(show_x0, t + 1, cfg.stimulus_period_steps),
                               tex.at_step(show_xl, t + 1, cfg.stimulus_period_steps),
                               next_obs.data());
                float r = intr->step(obs.data(), s.action, next_obs.data());
                bool done = t + 1 == cfg.episode_steps;
                buffer.push(obs.data(), s.action, s.log_prob, s.value, r, done);
                ++env_steps;
                ep_rewards.push_back(static_cast<double>(r));

                if (buffer.full()) {
                    float bootstrap = 0.0f;
                    if (!done) {
                        nn::PolicyNet<float>::Acts acts;
                        policy.forward(next_obs.data(), acts);
                        bootstrap = acts.value;
                    }
                    double mean_reward = 0.0;
                    for (float br : buffer.rewards) mean_reward += static_cast<double>(br);
                    mean_reward /= static_cast<double>(buffer.size);
                    ppo::UpdateDiagnostics diag = ppo::ppo_update(
                        policy, policy_params, opt, buffer, bootstrap, cfg.ppo, env_steps,
                        shuffle_rng);
                    ++updates;
                    metrics.row({std::to_string(updates), std::to_string(env_steps),
                                 g9(ppo::lr_schedule(env_steps, cfg.ppo)), g9(mean_reward),
                                 g9(diag.policy_loss), g9(diag.value_loss), g9(diag.entropy)});
                    buffer.reset();
                }
                obs.swap(next_obs);
            }

            intrinsic::RewardStats st = intrinsic::reward_stats(ep_rewards);
            episodes.row({std::to_string(ep), std::to_string(ep_rewards.size()), g9(st.mean),
                          g9(st.min), g9(st.max), g9(st.std_dev)});
        }
        // a partial rollout at the end is dropped, not trained on

        metrics.close();
        episodes.close();

        nn::ParamSet<float> all;
        policy.collect(all, "policy");
        intr->collect(all);
        checkpoint::save((dir / "checkpoint.bin").string(), all);

        result.checkpoint_path = (dir / "checkpoint.bin").string();
        result.metrics_path = (dir / "metrics.csv").string();
        result.env_steps = env_steps;
        result.updates = updates;

        json extra;
        extra["checkpoint"] = "checkpoint.bin";
        extra["env_steps"] = env_steps;
        extra["updates"] = updates;
        write_manifest(dir, cfg, "train", extra,
                       {"checkpoint.bin", "metrics.csv", "episodes.csv"}, elapsed(), "");
    } catch (const std::exception& e) {
        // leave a marker behind so the run directory is never mistaken for a
        // finished one, then let the error surface
        try {
            write_manifest(dir, cfg, "train", json::object(), {}, elapsed(), e.what());
        } catch (...) {
        }
        throw;
    }
    return result;
}

// ---------------------------------------------------------------------------
// test

namespace {

config::RunConfig config_from_manifest(const fs::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + manifest_path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    json m;
    try {
        m = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!m.is_object() || !m.contains("config"))
        throw ConfigError("manifest has no config snapshot: " + manifest_path.string());
    return config::parse_full_config(m["config"].dump());
}

const char* wall_name(world::Wall w) { return w == world::Wall::X0 ? "x0" : "xl"; }

world::Wall wall_from_name(const std::string& s) {
    if (s == "x0") return world::Wall::X0;
    if (s == "xl") return world::Wall::XL;
    throw IoError("unknown wall name: " + s);
}

const char* kind_name(world::TrialKind k) {
    return k == world::TrialKind::Imprinting ? "imprinting" : "recognition";
}

world::TrialKind kind_from_name(const std::string& s) {
    if (s == "imprinting") return world::TrialKind::Imprinting;
    if (s == "recognition") return world::TrialKind::Recognition;
    throw IoError("unknown trial kind: " + s);
}

std::string trial_file_name(int trial_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "trials/trial_%04d.csv", trial_id);
    return buf;
}

}  // namespace

std::vector<TrialRecord> run_test(const std::string& checkpoint_path, const std::string& out_dir,
                                  bool greedy) {
    fs::path ckpt(checkpoint_path);
    config::RunConfig cfg = config_from_manifest(ckpt.parent_path() / "manifest.json");

    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir / "trials", ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    world::ChamberSpec chamber;
    world::AgentBody body;
    world::RearingCondition cond = world::condition_from_index(cfg.condition);
    auto ranges = world::viewpoint_ranges(cond);
    const world::ViewpointRange& fam = world::familiar_range(ranges);
    world::ObjectId other =
        cond.object == world::ObjectId::A ? world::ObjectId::B : world::ObjectId::A;

    std::vector<TrialRecord> records;
    try {
        // weights come in frozen; only the policy tensors are needed here
        nn::PolicyNet<float> policy;
        {
            Rng init_rng(mix_seed(cfg.seed, fnv1a64("policy-init")));
            policy.init(init_rng);
        }
        nn::ParamSet<float> policy_params;
        policy.collect(policy_params, "policy");
        checkpoint::restore(policy_params, checkpoint::load(checkpoint_path));

        auto schedule = world::make_trial_schedule(cond, cfg.imprinting_trials,
                                                   cfg.trials_per_viewpoint, cfg.test_trial_steps,
                                                   cfg.seed);
        TexCache tex;
        CsvWriter index(dir / "trials.csv",
                        "trial_id,kind,viewpoint_index,imprint_wall,duration_steps,file");

        std::vector<float> obs(3 * render::kFramePixels);
        for (const world::TrialSpec& spec : schedule) {
            Rng trng(trial_seed(cfg.seed, spec.trial_id));
            world::Pose pose = world::spawn(trng, chamber, body);

            WallShow on_imprint, on_other;
            if (spec.kind == world::TrialKind::Imprinting) {
                on_imprint = {cond.object, fam};
                on_other = {world::ObjectId::Blank, {}};
            } else {
                on_imprint = {cond.object, ranges[static_cast<std::size_t>(spec.viewpoint_index)]};
                on_other = {other, fam};
            }
            const WallShow& x0 = spec.imprint_wall == world::Wall::X0 ? on_imprint : on_other;
            const WallShow& xl = spec.imprint_wall == world::Wall::X0 ? on_other : on_imprint;

            TrialRecord rec;
            rec.spec = spec;
            for (int t = 0; t < spec.duration_steps; ++t) {
                render_obs_chw(chamber, body, pose,
                               tex.at_step(x0, t, cfg.stimulus_period_steps),
                               tex.at_step(xl, t, cfg.stimulus_period_steps), obs.data());
                ppo::ActionSample s = ppo::select_action(policy, obs.data(), trng, greedy);
                pose = world::step_pose(pose, s.action, body, chamber);
                rec.trace.x.push_back(pose.x);
                rec.trace.y.push_back(pose.y);
                rec.trace.heading_deg.push_back(pose.heading_deg);
            }

            std::string fname = trial_file_name(spec.trial_id);
            CsvWriter tw(dir / fname, "step,x,y,heading_deg");
            for (int t = 0; t < spec.duration_steps; ++t)
                tw.row({std::to_string(t), g17(rec.trace.x[static_cast<std::size_t>(t)]),
                        g17(rec.trace.y[static_cast<std::size_t>(t)]),
                        g17(rec.trace.heading_deg[static_cast<std::size_t>(t)])});
            tw.close();
            index.row({std::to_string(spec.trial_id), kind_name(spec.kind),
                       std::to_string(spec.viewpoint_index), wall_name(spec.imprint_wall),
                       std::to_string(spec.duration_steps), fname});
            records.push_back(std::move(rec));
        }
        index.close();

        std::vector<std::string> files = {"trials.csv"};
        for (const auto& rec : records) files.push_back(trial_file_name(rec.spec.trial_id));
        json extra;
        extra["checkpoint"] = checkpoint_path;
        extra["greedy"] = greedy;
        extra["trials"] = records.size();
        write_manifest(dir, cfg, "test", extra, files, elapsed(), "");
    } catch (const std::exception& e) {
        try {
            write_manifest(dir, cfg, "test", json::object(), {}, elapsed(), e.what());
        } catch (...) {
        }
        throw;
    }
    return records;
}

std::vector<TrialRecord> read_trial_records(const std::string& run_dir) {
    fs::path dir(run_dir);
    auto rows = read_csv(dir / "trials.csv", 6);
    std::vector<TrialRecord> records;
    records.reserve(rows.size());
    for (const auto& row : rows) {
        TrialRecord rec;
        rec.spec.trial_id = std::stoi(row[0]);
        rec.spec.kind = kind_from_name(row[1]);
        rec.spec.viewpoint_index = std::stoi(row[2]);
        rec.spec.imprint_wall = wall_from_name(row[3]);
        rec.spec.duration_steps = std::stoi(row[4]);
        auto steps = read_csv(dir / row[5], 4);
        if (static_cast<int>(steps.size()) != rec.spec.duration_steps)
            throw IoError("trial file row count mismatch: " + row[5]);
        for (const auto& srow : steps) {
            rec.trace.x.push_back(parse_f64(srow[1]));
            rec.trace.y.push_back(parse_f64(srow[2]));
            rec.trace.heading_deg.push_back(parse_f64(srow[3]));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

double heading_alignment(const std::vector<TrialRecord>& records) {
    double sum = 0.0;
    std::int64_t moving = 0;
    for (const TrialRecord& rec : records) {
        const auto& tr = rec.trace;
        for (std::size_t i = 1; i < tr.x.size(); ++i) {
            double dx = tr.x[i] - tr.x[i - 1];
            double dy = tr.y[i] - tr.y[i - 1];
            if (std::hypot(dx, dy) <= 1e-12) continue;
            double move_deg = std::atan2(dy, dx) * 180.0 / 3.14159265358979323846;
            double d = std::fmod(std::fabs(move_deg - tr.heading_deg[i]), 360.0);
            if (d > 180.0) d = 360.0 - d;
            sum += d;
            ++moving;
        }
    }
    if (moving == 0) throw std::invalid_argument("no moving steps in any trace");
    return sum / static_cast<double>(moving);
}

// ---------------------------------------------------------------------------
// population

void run_population(const config::RunConfig& base, const PopulationOptions& opt,
                    const std::string& out_dir) {
    if (opt.agents < 1) throw ConfigError("population size must be at least 1");
    if (opt.jobs < 1) throw ConfigError("jobs must be at least 1");

    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    struct Job {
        config::RunConfig cfg;
        std::string name;
    };
    std::vector<Job> jobs;
    for (intrinsic::Algorithm algo :
         {intrinsic::Algorithm::Icm, intrinsic::Algorithm::Rnd, intrinsic::Algorithm::Contrastive}) {
        for (int condition = 1; condition <= 4; ++condition) {
            for (int agent = 1; agent <= opt.agents; ++agent) {
                Job job;
                job.cfg = base;
                job.cfg.algorithm = algo;
                job.cfg.condition = condition;
                job.cfg.seed = static_cast<std::uint64_t>(agent);
                char buf[64];
                std::snprintf(buf, sizeof buf, "%s_c%d_s%03d",
                              intrinsic::algorithm_name(algo).c_str(), condition, agent);
                job.name = buf;
                jobs.push_back(std::move(job));
            }
        }
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(jobs.size());
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            fs::path jdir = dir / job.name;
            try {
                TrainResult tr = run_training(job.cfg, (jdir / "train").string());
                run_test(tr.checkpoint_path, (jdir / "test").string(), false);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    int nthreads = std::min<int>(opt.jobs, static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    json m;
    m["version"] = kVersionString;
    m["phase"] = "population";
    m["agents_per_cell"] = opt.agents;
    json runs = json::array();
    int failed = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        json r;
        r["dir"] = jobs[i].name;
        r["algorithm"] = intrinsic::algorithm_name(jobs[i].cfg.algorithm);
        r["condition"] = jobs[i].cfg.condition;
        r["seed"] = jobs[i].cfg.seed;
        r["status"] = errors[i].empty() ? "complete" : "failed";
        if (!errors[i].empty()) {
            r["error"] = errors[i];
            ++failed;
        }
        runs.push_back(std::move(r));
    }
    m["runs"] = runs;
    m["status"] = failed == 0 ? "complete" : "incomplete";
    write_text(dir / "manifest.json", m.dump(2) + "\n");
    if (failed > 0)
        throw IoError(std::to_string(failed) + " population run(s) failed; see " +
                      (dir / "manifest.json").string());
}

// ---------------------------------------------------------------------------
// debug frames

void dump_debug_frames(const config::RunConfig& cfg, const std::string& out_dir) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    world::ChamberSpec chamber;
    world::AgentBody body;
    world::RearingCondition cond = world::condition_from_index(cfg.condition);
    auto ranges = world::viewpoint_ranges(cond);
    const world::ViewpointRange& fam = world::familiar_range(ranges);

    render::DisplayTexture stim =
        render::render_display_texture(cond.object, fam.azimuth_center_deg, fam.elevation_deg);
    render::DisplayTexture blank = render::render_display_texture(world::ObjectId::Blank, 0, 0);
    render::write_ppm(stim, (dir / "display_x0.ppm").string());
    render::write_ppm(blank, (dir / "display_xl.ppm").string());

    Rng rng(mix_seed(cfg.seed, fnv1a64("debug-frame")));
    world::Pose pose = world::spawn(rng, chamber, body);
    render::Camera cam = render::agent_camera(pose, body.camera_height, kFovDeg, kNearPlane);
    render::Frame obs = render::render_observation(chamber, stim, blank, cam);
    render::write_ppm(obs, (dir / "observation.ppm").string());
}

}  // namespace nest::harness
