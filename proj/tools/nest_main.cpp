#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nest/analysis.hpp"
#include "nest/config.hpp"
#include "nest/errors.hpp"
#include "nest/harness.hpp"
#include "nest/intrinsic.hpp"
#include "nest/world.hpp"

namespace {

// 0 ok, 1 usage, 2 bad config, 3 I/O, 4 corrupt checkpoint
int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const nest::CheckpointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const nest::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nest::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"digital twin of a controlled-rearing experiment"};
    app.set_version_flag("--version", std::string(nest::kVersionString));
    app.require_subcommand(1);

    // train
    std::string train_config, train_algo = "icm", train_out;
    std::uint64_t train_seed = 1;
    int train_condition = 1;
    CLI::App* train = app.add_subcommand("train", "rear one agent and write a checkpoint");
    train->add_option("--config", train_config, "run config JSON")->required();
    train->add_option("--seed", train_seed, "agent seed");
    train->add_option("--algo", train_algo, "icm | rnd | contrastive");
    train->add_option("--condition", train_condition, "rearing condition 1..4");
    train->add_option("--out", train_out, "output directory")->required();

    // test
    std::string test_checkpoint, test_out;
    bool test_greedy = false;
    CLI::App* test = app.add_subcommand("test", "run the frozen-weight test battery");
    test->add_option("--checkpoint", test_checkpoint, "checkpoint file")->required();
    test->add_option("--out", test_out, "output directory")->required();
    test->add_flag("--greedy", test_greedy, "argmax actions instead of sampling");

    // population
    std::string pop_config, pop_out;
    int pop_agents = 26, pop_jobs = 1;
    CLI::App* population =
        app.add_subcommand("population", "train + test a full population grid");
    population->add_option("--config", pop_config, "run config JSON")->required();
    population->add_option("--agents", pop_agents, "agents per algorithm x condition cell");
    population->add_option("--out", pop_out, "output directory")->required();
    population->add_option("--jobs", pop_jobs, "parallel workers");

    // analyze
    std::string an_runs, an_ref, an_out;
    double an_perplexity = 10.0;
    std::uint64_t an_seed = 1;
    CLI::App* analyze = app.add_subcommand("analyze", "aggregate runs into report + figures");
    analyze->add_option("--runs", an_runs, "directory tree of test runs")->required();
    analyze->add_option("--ref", an_ref, "chick reference JSON")->required();
    analyze->add_option("--out", an_out, "output directory")->required();
    analyze->add_option("--perplexity", an_perplexity, "embedding perplexity");
    analyze->add_option("--seed", an_seed, "embedding seed");

    // frame (debug)
    std::string fr_config, fr_out;
    std::uint64_t fr_seed = 1;
    int fr_condition = 1;
    CLI::App* frame = app.add_subcommand("frame", "dump debug PPM frames");
    frame->add_option("--config", fr_config, "run config JSON (optional)");
    frame->add_option("--seed", fr_seed, "spawn seed");
    frame->add_option("--condition", fr_condition, "rearing condition 1..4");
    frame->add_option("--out", fr_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*train) {
        return run_guarded([&] {
            nest::world::condition_from_index(train_condition);
            nest::config::RunConfig cfg = nest::config::load_run_config(train_config);
            cfg.seed = train_seed;
            cfg.condition = train_condition;
            cfg.algorithm = nest::intrinsic::algorithm_from_string(train_algo);
            nest::harness::TrainResult res = nest::harness::run_training(cfg, train_out);
            std::cout << "trained " << res.env_steps << " env steps, " << res.updates
                      << " updates -> " << res.checkpoint_path << "\n";
        });
    }
    if (*test) {
        return run_guarded([&] {
            auto records = nest::harness::run_test(test_checkpoint, test_out, test_greedy);
            std::cout << "ran " << records.size() << " trials -> " << test_out << "\n";
        });
    }
    if (*population) {
        return run_guarded([&] {
            nest::config::RunConfig cfg = nest::config::load_run_config(pop_config);
            nest::harness::PopulationOptions opt;
            opt.agents = pop_agents;
            opt.jobs = pop_jobs;
            nest::harness::run_population(cfg, opt, pop_out);
            std::cout << "population complete -> " << pop_out << "\n";
        });
    }
    if (*analyze) {
        return run_guarded([&] {
            nest::analysis::ChickReference ref = nest::analysis::load_reference(an_ref);
            nest::analysis::AnalyzeOptions opt;
            opt.perplexity = an_perplexity;
            opt.tsne_seed = an_seed;
            int n = nest::analysis::emit_report(an_runs, ref, an_out, opt);
            std::cout << "analyzed " << n << " agents -> " << an_out << "/report.json\n";
        });
    }
    if (*frame) {
        return run_guarded([&] {
            nest::world::condition_from_index(fr_condition);
            nest::config::RunConfig cfg;
            if (!fr_config.empty()) cfg = nest::config::load_run_config(fr_config);
            cfg.seed = fr_seed;
            cfg.condition = fr_condition;
            nest::harness::dump_debug_frames(cfg, fr_out);
            std::cout << "wrote debug frames -> " << fr_out << "\n";
        });
    }
    return 1;
}
