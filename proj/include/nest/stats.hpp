#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nest/world.hpp"

namespace nest::stats {

struct StatsSummary {
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;   // sample, n-1 denominator
    double sem = 0.0;  // sd / sqrt(n)
};

struct TTestResult {
    double t = 0.0;
    int df = 0;
    double p = 1.0;  // two-sided
};

struct NoiseBand {
    double center = 0.0;     // mean
    double halfwidth = 0.0;  // mean absolute deviation from the mean
    bool contains(double v) const { return v >= center - halfwidth && v <= center + halfwidth; }
};

enum class Label { ViewInvariant, ViewDependent, Neither };
const char* label_name(Label l);

// per-trial score or missing (no scored steps)
using TrialScore = std::optional<double>;

struct ScoredTrial {
    world::TrialKind kind = world::TrialKind::Imprinting;
    int viewpoint_index = -1;
    TrialScore preference;  // percent of scored steps on the imprint side
};

struct AgentSummary {
    double imprinting_pct = 0.0;                   // mean over scored imprinting trials
    std::array<std::optional<double>, 12> behavior;  // per-viewpoint recognition means
    double overall_recognition_pct = 0.0;          // unweighted mean of present viewpoint means
    double imprinting_sem = 0.0;                   // SEM over imprinting trials
    double recognition_sem = 0.0;                  // SEM over all scored recognition trials
};

StatsSummary summarize(const std::vector<double>& values);

// 100 * imprint-side steps / (imprint-side + opposite-side steps); neutral
// steps excluded; missing when no step falls on either side.
struct StepTrace {
    std::vector<double> x, y, heading_deg;
};
TrialScore trial_preference(const StepTrace& trace, world::Wall imprint_wall,
                            const world::ChamberSpec& chamber);

AgentSummary agent_summary(const std::vector<ScoredTrial>& trials);

// one-sample two-sided t-test; n >= 2 required. sd == 0 degenerates to
// t = 0, p = 1 when mean == mu0, else t = +/-inf, p = 0.
TTestResult one_sample_t(const std::vector<double>& values, double mu0);

// the same statistic from published summary numbers
double t_from_summary(double mean, double sd, int n, double mu0);

// two-sided p for a t statistic via the regularized incomplete beta function
double t_test_p_two_sided(double t, int df);

NoiseBand noise_band(const std::vector<double>& values);

// t-test of all scored recognition trials against 50%
Label classify_agent(const std::vector<double>& recognition_trial_pcts);

// same rule applied to imprinting trials: imprinted iff mean > 50 and p < .05
bool classify_imprinted(const std::vector<double>& imprinting_trial_pcts);

// one agent's scored trial percentages plus its group key, ready for rollup
struct AgentClassified {
    std::string group;                     // algorithm name
    std::vector<double> imprinting_pcts;   // scored imprinting trials
    std::vector<double> recognition_pcts;  // scored recognition trials
    AgentSummary summary;
};

struct GroupReport {
    std::string group;  // "all" or an algorithm name
    int n = 0;
    StatsSummary imprinting, recognition;  // across per-agent means
    bool has_tests = false;                // n >= 2
    TTestResult imprinting_t, recognition_t;  // vs 50, valid when has_tests
    double fraction_imprinted = 0;
    double fraction_view_invariant = 0, fraction_view_dependent = 0, fraction_neither = 0;
    double mean_imprinting_sem = 0, mean_recognition_sem = 0;
};

// pooled "all" group first, then per-group rows (icm, rnd, contrastive order,
// any other names after, alphabetically). Agents with too few scored trials
// for a test count as neither / not imprinted.
std::vector<GroupReport> population_report(const std::vector<AgentClassified>& agents);

// regularized incomplete beta I_x(a,b), continued-fraction evaluation
double incomplete_beta(double a, double b, double x);

}  // namespace nest::stats
