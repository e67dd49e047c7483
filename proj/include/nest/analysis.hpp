#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nest/stats.hpp"

namespace nest::analysis {

// published group numbers the comparison runs against
struct ReferenceGroup {
    double imprinting_mean = 88.0;
    double imprinting_sd = 7.0;
    int n = 23;
    double imprinting_min = 72.0;
    double imprinting_max = 97.0;
    double fraction_view_invariant = 0.87;
};

struct ChickReference {
    bool synthetic = true;
    ReferenceGroup group;
    // optional per-bird 12-viewpoint recognition vectors (percent)
    std::vector<std::array<double, 12>> individuals;
    std::string source_file;
};

ChickReference parse_reference(const std::string& json_text);  // ConfigError
ChickReference load_reference(const std::string& path);        // IoError / ConfigError

struct MetricComparison {
    std::string metric;  // "imprinting" or "recognition"
    double machine_mean = 0.0;
    bool has_band = false;
    stats::NoiseBand band;
    bool inside = false;
    double gap = 0.0;  // |machine mean - band center|, sign-free
};

struct AdequacyReport {
    std::vector<MetricComparison> metrics;
    bool adequate = false;  // every banded metric inside its band
};

// The imprinting band center/halfwidth come from the published summary (the
// halfwidth is the expected mean absolute deviation of a normal with the
// published sd); the recognition band needs individual vectors and is skipped
// without them. Uses the pooled "all" group.
AdequacyReport compare_to_reference(const std::vector<stats::GroupReport>& groups,
                                    const ChickReference& ref);

struct AnalyzeOptions {
    double perplexity = 10.0;
    int tsne_iterations = 1000;
    std::uint64_t tsne_seed = 1;
};

// Scans runs_root for completed test runs, aggregates them, and writes
// report.json, agents.csv, groups.csv, imprinting.svg, recognition.svg and
// tsne.svg into out_dir. Unusable runs are listed in the report and warned
// about on stderr, never fatal. Returns the number of agents included.
int emit_report(const std::string& runs_root, const ChickReference& ref,
                const std::string& out_dir, const AnalyzeOptions& opt);

}  // namespace nest::analysis
