#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nest::tsne {

struct TsneConfig {
    double perplexity = 10.0;
    int iterations = 1000;
    double learning_rate = 100.0;
    double early_exaggeration = 4.0;
    int exaggeration_iters = 100;
    double momentum_start = 0.5;
    double momentum_late = 0.8;
    int momentum_switch_iter = 250;
};

struct EmbeddingResult {
    std::vector<std::array<double, 2>> coords;  // rows align with input rows
    std::vector<std::string> labels;            // attached by the caller
    double kl_initial = 0.0;  // against the un-exaggerated P, at the initial layout
    double kl_final = 0.0;
    int iterations = 0;
    std::uint64_t seed = 0;
};

// Exact O(N^2) t-SNE. Gaussian input affinities binary-searched per row until
// the conditional entropy matches log(perplexity) within 1e-5 nats, then
// symmetrized; Student-t output kernel; plain momentum gradient descent with
// per-iteration mean centering and no adaptive gains.
//
// Every reduction over rows runs through a sort-then-add so the result is
// independent of row order: permuting input rows permutes output rows
// identically, and equal rows embed to equal points (the initial layout is
// derived from each row's content hash mixed with the seed, not its index).
EmbeddingResult run_tsne(const std::vector<std::vector<double>>& rows, const TsneConfig& cfg,
                         std::uint64_t seed);

// spec'd entry point: defaults with perplexity/iterations overridden
EmbeddingResult run_tsne(const std::vector<std::vector<double>>& rows, double perplexity,
                         int iterations, std::uint64_t seed);

}  // namespace nest::tsne
