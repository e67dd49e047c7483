#include "nest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nest::stats {

const char* label_name(Label l) {
    switch (l) {
        case Label::ViewInvariant: return "view_invariant";
        case Label::ViewDependent: return "view_dependent";
        default: return "neither";
    }
}

StatsSummary summarize(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty input");
    StatsSummary s;
    s.n = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.n;
    if (s.n >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / (s.n - 1));
        s.sem = s.sd / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

TrialScore trial_preference(const StepTrace& trace, world::Wall imprint_wall,
                            const world::ChamberSpec& chamber) {
    long on_imprint = 0, on_opposite = 0;
    world::Zone imprint_zone =
        imprint_wall == world::Wall::X0 ? world::Zone::SideX0 : world::Zone::SideXL;
    for (std::size_t i = 0; i < trace.x.size(); ++i) {
        world::Pose p{trace.x[i], trace.y[i], 0.0};
        world::Zone z = world::zone_of(p, chamber);
        if (z == world::Zone::Neutral) continue;
        if (z == imprint_zone) ++on_imprint;
        else ++on_opposite;
    }
    long denom = on_imprint + on_opposite;
    if (denom == 0) return std::nullopt;
    return 100.0 * static_cast<double>(on_imprint) / static_cast<double>(denom);
}

AgentSummary agent_summary(const std::vector<ScoredTrial>& trials) {
    AgentSummary out;
    std::vector<double> imprint;
    std::array<std::vector<double>, 12> per_view;
    std::vector<double> recog_all;
    for (const auto& t : trials) {
        if (!t.preference.has_value()) continue;
        if (t.kind == world::TrialKind::Imprinting) {
            imprint.push_back(*t.preference);
        } else {
            if (t.viewpoint_index < 0 || t.viewpoint_index >= 12)
                throw std::invalid_argument("agent_summary: viewpoint index out of range");
            per_view[t.viewpoint_index].push_back(*t.preference);
            recog_all.push_back(*t.preference);
        }
    }
    if (imprint.empty()) throw std::invalid_argument("agent_summary: no scored imprinting trials");
    if (recog_all.empty()) throw std::invalid_argument("agent_summary: no scored recognition trials");

    StatsSummary si = summarize(imprint);
    out.imprinting_pct = si.mean;
    out.imprinting_sem = si.sem;
    StatsSummary sr = summarize(recog_all);
    out.recognition_sem = sr.sem;

    double sum = 0.0;
    int present = 0;
    for (int v = 0; v < 12; ++v) {
        if (per_view[v].empty()) {
            out.behavior[v] = std::nullopt;
            continue;
        }
        double m = summarize(per_view[v]).mean;
        out.behavior[v] = m;
        sum += m;
        ++present;
    }
    out.overall_recognition_pct = sum / present;
    return out;
}

double t_from_summary(double mean, double sd, int n, double mu0) {
    if (n < 2) throw std::invalid_argument("t_from_summary: n must be >= 2");
    if (sd == 0.0) {
        if (mean == mu0) return 0.0;
        return mean > mu0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
    }
    return (mean - mu0) / (sd / std::sqrt(static_cast<double>(n)));
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // continued fraction converges fast for x < (a+1)/(a+b+2); use the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front) / a;

    // modified Lentz's algorithm
    const double tiny = 1e-300;
    const double eps = 1e-15;
    double f = 1.0, c = 1.0, d = 0.0;
    for (int i = 0; i <= 400; ++i) {
        int m = i / 2;
        double numerator;
        if (i == 0) numerator = 1.0;
        else if (i % 2 == 0)
            numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        else
            numerator = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));

        d = 1.0 + numerator * d;
        if (std::fabs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::fabs(c) < tiny) c = tiny;
        double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < eps) break;
    }
    return front * (f - 1.0);
}

double t_test_p_two_sided(double t, int df) {
    if (df < 1) throw std::invalid_argument("t_test_p_two_sided: df must be >= 1");
    if (std::isinf(t)) return 0.0;
    double x = df / (df + t * t);
    double p = incomplete_beta(df * 0.5, 0.5, x);
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

TTestResult one_sample_t(const std::vector<double>& values, double mu0) {
    if (values.size() < 2) throw std::invalid_argument("one_sample_t: need n >= 2");
    StatsSummary s = summarize(values);
    TTestResult r;
    r.df = s.n - 1;
    r.t = t_from_summary(s.mean, s.sd, s.n, mu0);
    r.p = std::isinf(r.t) ? 0.0 : t_test_p_two_sided(r.t, r.df);
    return r;
}

NoiseBand noise_band(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("noise_band: empty input");
    double sum = 0.0;
    for (double v : values) sum += v;
    double mean = sum / values.size();
    double dev = 0.0;
    for (double v : values) dev += std::fabs(v - mean);
    return NoiseBand{mean, dev / values.size()};
}

Label classify_agent(const std::vector<double>& recognition_trial_pcts) {
    if (recognition_trial_pcts.size() < 2)
        throw std::invalid_argument("classify_agent: need >= 2 scored trials");
    TTestResult r = one_sample_t(recognition_trial_pcts, 50.0);
    double mean = summarize(recognition_trial_pcts).mean;
    if (r.p < 0.05) {
        if (mean > 50.0) return Label::ViewInvariant;
        if (mean < 50.0) return Label::ViewDependent;
    }
    return Label::Neither;
}

bool classify_imprinted(const std::vector<double>& imprinting_trial_pcts) {
    if (imprinting_trial_pcts.size() < 2)
        throw std::invalid_argument("classify_imprinted: need >= 2 scored trials");
    TTestResult r = one_sample_t(imprinting_trial_pcts, 50.0);
    double mean = summarize(imprinting_trial_pcts).mean;
    return r.p < 0.05 && mean > 50.0;
}

namespace {

GroupReport group_from(const std::string& name, const std::vector<const AgentClassified*>& agents) {
    GroupReport g;
    g.group = name;
    g.n = static_cast<int>(agents.size());
    std::vector<double> imp_means, rec_means;
    double imp_sem = 0, rec_sem = 0;
    int n_imprinted = 0, n_inv = 0, n_dep = 0, n_neither = 0;
    for (const AgentClassified* a : agents) {
        imp_means.push_back(a->summary.imprinting_pct);
        rec_means.push_back(a->summary.overall_recognition_pct);
        imp_sem += a->summary.imprinting_sem;
        rec_sem += a->summary.recognition_sem;
        bool imprinted =
            a->imprinting_pcts.size() >= 2 && classify_imprinted(a->imprinting_pcts);
        Label label = a->recognition_pcts.size() >= 2 ? classify_agent(a->recognition_pcts)
                                                      : Label::Neither;
        if (imprinted) ++n_imprinted;
        if (label == Label::ViewInvariant) ++n_inv;
        else if (label == Label::ViewDependent) ++n_dep;
        else ++n_neither;
    }
    g.imprinting = summarize(imp_means);
    g.recognition = summarize(rec_means);
    if (g.n >= 2) {
        g.has_tests = true;
        g.imprinting_t = one_sample_t(imp_means, 50.0);
        g.recognition_t = one_sample_t(rec_means, 50.0);
    }
    double n = static_cast<double>(g.n);
    g.fraction_imprinted = n_imprinted / n;
    g.fraction_view_invariant = n_inv / n;
    g.fraction_view_dependent = n_dep / n;
    g.fraction_neither = n_neither / n;
    g.mean_imprinting_sem = imp_sem / n;
    g.mean_recognition_sem = rec_sem / n;
    return g;
}

}  // namespace

std::vector<GroupReport> population_report(const std::vector<AgentClassified>& agents) {
    if (agents.empty()) throw std::invalid_argument("population_report: no agents");
    std::vector<const AgentClassified*> all;
    for (const auto& a : agents) all.push_back(&a);

    std::vector<std::string> order;
    for (const char* known : {"icm", "rnd", "contrastive"})
        for (const auto& a : agents)
            if (a.group == known) {
                order.push_back(known);
                break;
            }
    std::vector<std::string> extra;
    for (const auto& a : agents)
        if (std::find(order.begin(), order.end(), a.group) == order.end() &&
            std::find(extra.begin(), extra.end(), a.group) == extra.end())
            extra.push_back(a.group);
    std::sort(extra.begin(), extra.end());
    order.insert(order.end(), extra.begin(), extra.end());

    std::vector<GroupReport> out;
    out.push_back(group_from("all", all));
    for (const std::string& name : order) {
        std::vector<const AgentClassified*> members;
        for (const auto& a : agents)
            if (a.group == name) members.push_back(&a);
        out.push_back(group_from(name, members));
    }
    return out;
}

}  // namespace nest::stats
