#include "nest/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "nest/config.hpp"
#include "nest/errors.hpp"
#include "nest/harness.hpp"
#include "nest/tsne.hpp"
#include "nest/world.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace nest::analysis {

namespace {

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.close();
    if (out.fail()) throw IoError("write failed: " + path.string());
}

// expected mean absolute deviation of a normal with this sd
double mad_of_normal(double sd) { return sd * std::sqrt(2.0 / 3.14159265358979323846); }

}  // namespace

// ---------------------------------------------------------------------------
// chick reference

ChickReference parse_reference(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("reference is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("reference root must be a JSON object");

    ChickReference ref;
    if (root.contains("synthetic")) {
        if (!root["synthetic"].is_boolean()) throw ConfigError("\"synthetic\" must be a boolean");
        ref.synthetic = root["synthetic"].get<bool>();
    }
    if (!root.contains("group") || !root["group"].is_object())
        throw ConfigError("reference needs a \"group\" object");
    const json& g = root["group"];
    if (!g.contains("imprinting") || !g["imprinting"].is_object())
        throw ConfigError("reference group needs an \"imprinting\" object");
    const json& imp = g["imprinting"];
    for (const char* key : {"mean", "sd", "n"})
        if (!imp.contains(key) || !imp[key].is_number())
            throw ConfigError(std::string("group.imprinting needs numeric \"") + key + "\"");
    ref.group.imprinting_mean = imp["mean"].get<double>();
    ref.group.imprinting_sd = imp["sd"].get<double>();
    ref.group.n = imp["n"].get<int>();
    if (ref.group.n < 1) throw ConfigError("group.imprinting.n must be >= 1");
    if (ref.group.imprinting_sd < 0) throw ConfigError("group.imprinting.sd must be >= 0");
    if (imp.contains("range")) {
        const json& r = imp["range"];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
            throw ConfigError("group.imprinting.range must be [min, max]");
        ref.group.imprinting_min = r[0].get<double>();
        ref.group.imprinting_max = r[1].get<double>();
        if (ref.group.imprinting_min > ref.group.imprinting_max)
            throw ConfigError("group.imprinting.range must be ordered");
    }
    if (!g.contains("fraction_view_invariant") || !g["fraction_view_invariant"].is_number())
        throw ConfigError("reference group needs numeric \"fraction_view_invariant\"");
    ref.group.fraction_view_invariant = g["fraction_view_invariant"].get<double>();
    if (ref.group.fraction_view_invariant < 0.0 || ref.group.fraction_view_invariant > 1.0)
        throw ConfigError("fraction_view_invariant must be in [0, 1]");

    if (root.contains("individuals")) {
        const json& ind = root["individuals"];
        if (!ind.is_array()) throw ConfigError("\"individuals\" must be an array");
        for (const json& row : ind) {
            if (!row.is_array() || row.size() != 12)
                throw ConfigError("each individual must be a 12-element array");
            std::array<double, 12> v{};
            for (int i = 0; i < 12; ++i) {
                if (!row[static_cast<std::size_t>(i)].is_number())
                    throw ConfigError("individual entries must be numeric");
                v[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i)].get<double>();
            }
            ref.individuals.push_back(v);
        }
    }
    return ref;
}

ChickReference load_reference(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open reference: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    ChickReference ref = parse_reference(ss.str());
    ref.source_file = path;
    return ref;
}

// ---------------------------------------------------------------------------
// adequacy

AdequacyReport compare_to_reference(const std::vector<stats::GroupReport>& groups,
                                    const ChickReference& ref) {
    const stats::GroupReport* all = nullptr;
    for (const auto& g : groups)
        if (g.group == "all") all = &g;
    if (all == nullptr) throw std::invalid_argument("compare_to_reference: no pooled group");

    AdequacyReport out;
    {
        MetricComparison m;
        m.metric = "imprinting";
        m.machine_mean = all->imprinting.mean;
        m.has_band = true;
        m.band = stats::NoiseBand{ref.group.imprinting_mean, mad_of_normal(ref.group.imprinting_sd)};
        m.inside = m.band.contains(m.machine_mean);
        m.gap = std::fabs(m.machine_mean - m.band.center);
        out.metrics.push_back(m);
    }
    {
        MetricComparison m;
        m.metric = "recognition";
        m.machine_mean = all->recognition.mean;
        if (!ref.individuals.empty()) {
            std::vector<double> overall;
            for (const auto& v : ref.individuals) {
                double s = 0.0;
                for (double x : v) s += x;
                overall.push_back(s / 12.0);
            }
            m.has_band = true;
            m.band = stats::noise_band(overall);
            m.inside = m.band.contains(m.machine_mean);
            m.gap = std::fabs(m.machine_mean - m.band.center);
        }
        out.metrics.push_back(m);
    }
    out.adequate = true;
    for (const auto& m : out.metrics)
        if (m.has_band && !m.inside) out.adequate = false;
    return out;
}

// ---------------------------------------------------------------------------
// run aggregation

namespace {

struct AgentResult {
    std::string dir;  // relative to the runs root
    std::string algorithm = "unknown";
    int condition = 0;
    std::uint64_t seed = 0;
    stats::AgentSummary summary;
    std::vector<double> imprinting_pcts, recognition_pcts;
    bool imprinted = false;
    stats::Label label = stats::Label::Neither;
    std::optional<double> heading_deg;
    int imputed = 0;  // viewpoint entries imputed as chance for the embedding
};

struct AbsentRun {
    std::string dir;
    std::string reason;
};

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + " is not valid JSON: " + e.what());
    }
}

std::vector<fs::path> find_test_runs(const fs::path& root) {
    std::vector<fs::path> dirs;
    if (fs::exists(root / "trials.csv")) dirs.push_back(root);
    std::error_code ec;
    for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
        if (ec) break;
        if (it->is_regular_file(ec) && it->path().filename() == "trials.csv") {
            fs::path dir = it->path().parent_path();
            if (dir != root) dirs.push_back(dir);
        }
    }
    std::sort(dirs.begin(), dirs.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
    return dirs;
}

AgentResult load_agent(const fs::path& run_dir, const fs::path& root) {
    AgentResult agent;
    agent.dir = fs::relative(run_dir, root).generic_string();

    json manifest = read_json_file(run_dir / "manifest.json");
    if (!manifest.is_object() || !manifest.contains("config"))
        throw ConfigError("manifest has no config snapshot");
    if (manifest.value("phase", "") != "test") throw ConfigError("manifest phase is not \"test\"");
    if (manifest.value("status", "") != "complete") throw ConfigError("run is incomplete");
    config::RunConfig cfg = config::parse_full_config(manifest["config"].dump());
    agent.algorithm = intrinsic::algorithm_name(cfg.algorithm);
    agent.condition = cfg.condition;
    agent.seed = cfg.seed;

    auto records = harness::read_trial_records(run_dir.string());
    world::ChamberSpec chamber;
    std::vector<stats::ScoredTrial> scored;
    for (const auto& rec : records) {
        stats::ScoredTrial st;
        st.kind = rec.spec.kind;
        st.viewpoint_index = rec.spec.viewpoint_index;
        st.preference = stats::trial_preference(rec.trace, rec.spec.imprint_wall, chamber);
        if (st.preference.has_value()) {
            if (st.kind == world::TrialKind::Imprinting)
                agent.imprinting_pcts.push_back(*st.preference);
            else
                agent.recognition_pcts.push_back(*st.preference);
        }
        scored.push_back(st);
    }
    agent.summary = stats::agent_summary(scored);
    agent.imprinted =
        agent.imprinting_pcts.size() >= 2 && stats::classify_imprinted(agent.imprinting_pcts);
    agent.label = agent.recognition_pcts.size() >= 2 ? stats::classify_agent(agent.recognition_pcts)
                                                     : stats::Label::Neither;
    try {
        agent.heading_deg = harness::heading_alignment(records);
    } catch (const std::invalid_argument&) {
        // an agent that never translated has no movement direction to compare
    }
    for (const auto& e : agent.summary.behavior)
        if (!e.has_value()) ++agent.imputed;
    return agent;
}

// ---------------------------------------------------------------------------
// SVG rendering (plain shapes, no external references)

const char* label_color(const std::string& label) {
    if (label == "chick") return "#d1342f";
    if (label == "icm") return "#4c78a8";
    if (label == "rnd") return "#59a14f";
    if (label == "contrastive") return "#e49444";
    if (label == "all") return "#6b6b6b";
    return "#9c755f";
}

struct Bar {
    std::string name;
    double mean = 0.0, sem = 0.0;
    std::vector<double> dots;
};

std::string bar_figure_svg(const std::string& title, const std::vector<Bar>& bars,
                           const std::optional<stats::NoiseBand>& band) {
    const double width = 640, height = 420;
    const double left = 70, right = 610, top = 40, bottom = 370;
    auto sy = [&](double v) { return bottom - (std::clamp(v, 0.0, 100.0) / 100.0) * (bottom - top); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"" << f2(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"16\" fill=\"#222222\">" << title << "</text>\n";

    if (band.has_value()) {
        double y1 = sy(band->center + band->halfwidth);
        double y2 = sy(band->center - band->halfwidth);
        s << "<rect x=\"" << f2(left) << "\" y=\"" << f2(y1) << "\" width=\"" << f2(right - left)
          << "\" height=\"" << f2(std::max(1.0, y2 - y1))
          << "\" fill=\"#d1342f\" fill-opacity=\"0.18\"/>\n";
    }
    // chance line
    s << "<line x1=\"" << f2(left) << "\" y1=\"" << f2(sy(50)) << "\" x2=\"" << f2(right)
      << "\" y2=\"" << f2(sy(50)) << "\" stroke=\"#555555\" stroke-dasharray=\"5,4\"/>\n";

    // axes and ticks
    s << "<line x1=\"" << f2(left) << "\" y1=\"" << f2(top) << "\" x2=\"" << f2(left) << "\" y2=\""
      << f2(bottom) << "\" stroke=\"#222222\"/>\n";
    s << "<line x1=\"" << f2(left) << "\" y1=\"" << f2(bottom) << "\" x2=\"" << f2(right)
      << "\" y2=\"" << f2(bottom) << "\" stroke=\"#222222\"/>\n";
    for (int v = 0; v <= 100; v += 20) {
        s << "<line x1=\"" << f2(left - 5) << "\" y1=\"" << f2(sy(v)) << "\" x2=\"" << f2(left)
          << "\" y2=\"" << f2(sy(v)) << "\" stroke=\"#222222\"/>\n";
        s << "<text x=\"" << f2(left - 10) << "\" y=\"" << f2(sy(v) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">"
          << v << "</text>\n";
    }

    const double slot = (right - left) / static_cast<double>(std::max<std::size_t>(bars.size(), 1));
    for (std::size_t b = 0; b < bars.size(); ++b) {
        const Bar& bar = bars[b];
        double cx = left + slot * (static_cast<double>(b) + 0.5);
        double bw = slot * 0.55;
        double ytop = sy(bar.mean);
        s << "<rect x=\"" << f2(cx - bw / 2) << "\" y=\"" << f2(ytop) << "\" width=\"" << f2(bw)
          << "\" height=\"" << f2(bottom - ytop) << "\" fill=\"" << label_color(bar.name)
          << "\" fill-opacity=\"0.85\"/>\n";
        if (bar.sem > 0) {
            double ylo = sy(bar.mean - bar.sem), yhi = sy(bar.mean + bar.sem);
            s << "<line x1=\"" << f2(cx) << "\" y1=\"" << f2(yhi) << "\" x2=\"" << f2(cx)
              << "\" y2=\"" << f2(ylo) << "\" stroke=\"#222222\"/>\n";
            s << "<line x1=\"" << f2(cx - 6) << "\" y1=\"" << f2(yhi) << "\" x2=\"" << f2(cx + 6)
              << "\" y2=\"" << f2(yhi) << "\" stroke=\"#222222\"/>\n";
            s << "<line x1=\"" << f2(cx - 6) << "\" y1=\"" << f2(ylo) << "\" x2=\"" << f2(cx + 6)
              << "\" y2=\"" << f2(ylo) << "\" stroke=\"#222222\"/>\n";
        }
        for (std::size_t i = 0; i < bar.dots.size(); ++i) {
            double off = static_cast<double>((i * 53) % 21) - 10.0;
            s << "<circle cx=\"" << f2(cx + off * (bw / 28.0)) << "\" cy=\"" << f2(sy(bar.dots[i]))
              << "\" r=\"2.5\" fill=\"#111111\" fill-opacity=\"0.55\"/>\n";
        }
        s << "<text x=\"" << f2(cx) << "\" y=\"" << f2(bottom + 20)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#222222\">"
          << bar.name << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string scatter_svg(const tsne::EmbeddingResult& emb) {
    const double width = 640, height = 480;
    const double left = 50, right = 470, top = 50, bottom = 440;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    if (!emb.coords.empty()) {
        xmin = xmax = emb.coords[0][0];
        ymin = ymax = emb.coords[0][1];
        for (const auto& c : emb.coords) {
            xmin = std::min(xmin, c[0]);
            xmax = std::max(xmax, c[0]);
            ymin = std::min(ymin, c[1]);
            ymax = std::max(ymax, c[1]);
        }
    }
    double xspan = std::max(xmax - xmin, 1e-9), yspan = std::max(ymax - ymin, 1e-9);
    xmin -= 0.06 * xspan;
    xmax += 0.06 * xspan;
    ymin -= 0.06 * yspan;
    ymax += 0.06 * yspan;
    auto sx = [&](double v) { return left + (v - xmin) / (xmax - xmin) * (right - left); };
    auto sy = [&](double v) { return bottom - (v - ymin) / (ymax - ymin) * (bottom - top); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"" << f2((left + right) / 2)
      << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\" "
         "fill=\"#222222\">Behavior embedding</text>\n";
    s << "<rect x=\"" << f2(left) << "\" y=\"" << f2(top) << "\" width=\"" << f2(right - left)
      << "\" height=\"" << f2(bottom - top) << "\" fill=\"none\" stroke=\"#222222\"/>\n";

    for (std::size_t i = 0; i < emb.coords.size(); ++i) {
        const std::string& label = i < emb.labels.size() ? emb.labels[i] : std::string("unknown");
        s << "<circle cx=\"" << f2(sx(emb.coords[i][0])) << "\" cy=\"" << f2(sy(emb.coords[i][1]))
          << "\" r=\"4\" fill=\"" << label_color(label) << "\" fill-opacity=\"0.8\"/>\n";
    }

    // legend with per-label counts, in first-appearance order
    std::vector<std::pair<std::string, int>> legend;
    for (const auto& l : emb.labels) {
        bool found = false;
        for (auto& e : legend)
            if (e.first == l) {
                ++e.second;
                found = true;
            }
        if (!found) legend.emplace_back(l, 1);
    }
    double ly = top + 10;
    for (const auto& [label, count] : legend) {
        s << "<circle cx=\"" << f2(right + 20) << "\" cy=\"" << f2(ly) << "\" r=\"5\" fill=\""
          << label_color(label) << "\"/>\n";
        s << "<text x=\"" << f2(right + 32) << "\" y=\"" << f2(ly + 4)
          << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#222222\">" << label << " ("
          << count << ")</text>\n";
        ly += 22;
    }
    s << "</svg>\n";
    return s.str();
}

json band_json(const stats::NoiseBand& b) {
    return json{{"center", b.center}, {"halfwidth", b.halfwidth}};
}

json summary_json(const stats::StatsSummary& s) {
    return json{{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"sem", s.sem}};
}

json ttest_json(const stats::TTestResult& t) {
    return json{{"t", t.t}, {"df", t.df}, {"p", t.p}};
}

}  // namespace

// ---------------------------------------------------------------------------
// report emission

int emit_report(const std::string& runs_root, const ChickReference& ref,
                const std::string& out_dir, const AnalyzeOptions& opt) {
    fs::path root(runs_root);
    if (!fs::exists(root)) throw IoError("runs directory does not exist: " + runs_root);
    fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    std::vector<AgentResult> agents;
    std::vector<AbsentRun> absent;
    std::vector<std::string> warnings;

    for (const fs::path& dir : find_test_runs(root)) {
        try {
            agents.push_back(load_agent(dir, root));
        } catch (const std::exception& e) {
            absent.push_back({fs::relative(dir, root).generic_string(), e.what()});
        }
    }
    for (const auto& a : absent) {
        std::cerr << "warning: skipping run " << a.dir << ": " << a.reason << "\n";
        warnings.push_back("skipped run " + a.dir + ": " + a.reason);
    }
    if (agents.empty()) {
        std::cerr << "warning: no usable test runs under " << runs_root << "\n";
        warnings.push_back("no usable test runs");
    }
    for (const auto& a : agents) {
        if (a.imputed > 0)
            warnings.push_back("agent " + a.dir + ": " + std::to_string(a.imputed) +
                               " viewpoint(s) imputed as chance for the embedding");
        if (!a.heading_deg.has_value())
            warnings.push_back("agent " + a.dir + ": no moving steps, heading alignment undefined");
    }

    // population rollup + adequacy
    std::vector<stats::GroupReport> groups;
    AdequacyReport adequacy;
    bool have_groups = false;
    if (!agents.empty()) {
        std::vector<stats::AgentClassified> rows;
        for (const auto& a : agents)
            rows.push_back({a.algorithm, a.imprinting_pcts, a.recognition_pcts, a.summary});
        groups = stats::population_report(rows);
        adequacy = compare_to_reference(groups, ref);
        have_groups = true;
    }

    // embedding: machine behavior vectors (chance-imputed) plus chick individuals
    std::vector<std::vector<double>> emb_rows;
    std::vector<std::string> emb_labels;
    for (const auto& a : agents) {
        std::vector<double> v(12, 50.0);
        for (int i = 0; i < 12; ++i)
            if (a.summary.behavior[static_cast<std::size_t>(i)].has_value())
                v[static_cast<std::size_t>(i)] = *a.summary.behavior[static_cast<std::size_t>(i)];
        emb_rows.push_back(std::move(v));
        emb_labels.push_back(a.algorithm);
    }
    for (const auto& bird : ref.individuals) {
        emb_rows.emplace_back(bird.begin(), bird.end());
        emb_labels.emplace_back("chick");
    }

    tsne::EmbeddingResult emb;
    bool have_embedding = false;
    std::string embedding_skip_reason;
    if (emb_rows.size() >= 3 && opt.perplexity < static_cast<double>(emb_rows.size())) {
        tsne::TsneConfig tcfg;
        tcfg.perplexity = opt.perplexity;
        tcfg.iterations = opt.tsne_iterations;
        emb = tsne::run_tsne(emb_rows, tcfg, opt.tsne_seed);
        emb.labels = emb_labels;
        have_embedding = true;
    } else {
        embedding_skip_reason = "too few rows for the configured perplexity";
        warnings.push_back("embedding skipped: " + embedding_skip_reason);
    }

    // ---- report.json
    json report;
    report["version"] = kVersionString;
    report["runs_root"] = runs_root;
    {
        json r;
        r["file"] = ref.source_file;
        r["synthetic"] = ref.synthetic;
        r["group"] = {{"imprinting",
                       {{"mean", ref.group.imprinting_mean},
                        {"sd", ref.group.imprinting_sd},
                        {"n", ref.group.n},
                        {"range", {ref.group.imprinting_min, ref.group.imprinting_max}}}},
                      {"fraction_view_invariant", ref.group.fraction_view_invariant}};
        r["individuals"] = ref.individuals.size();
        report["reference"] = r;
    }
    {
        json arr = json::array();
        for (const auto& a : agents) {
            json j;
            j["dir"] = a.dir;
            j["algorithm"] = a.algorithm;
            j["condition"] = a.condition;
            j["seed"] = a.seed;
            j["imprinting_pct"] = a.summary.imprinting_pct;
            j["overall_recognition_pct"] = a.summary.overall_recognition_pct;
            j["imprinting_sem"] = a.summary.imprinting_sem;
            j["recognition_sem"] = a.summary.recognition_sem;
            json beh = json::array();
            for (const auto& e : a.summary.behavior) {
                if (e.has_value()) beh.push_back(*e);
                else beh.push_back(nullptr);
            }
            j["behavior"] = beh;
            j["imprinted"] = a.imprinted;
            j["label"] = stats::label_name(a.label);
            if (a.heading_deg.has_value()) j["heading_alignment_deg"] = *a.heading_deg;
            else j["heading_alignment_deg"] = nullptr;
            j["imputed_viewpoints"] = a.imputed;
            j["n_imprinting_scored"] = a.imprinting_pcts.size();
            j["n_recognition_scored"] = a.recognition_pcts.size();
            arr.push_back(std::move(j));
        }
        report["agents"] = arr;
    }
    {
        json arr = json::array();
        for (const auto& g : groups) {
            json j;
            j["group"] = g.group;
            j["n"] = g.n;
            j["imprinting"] = summary_json(g.imprinting);
            j["recognition"] = summary_json(g.recognition);
            if (g.has_tests) {
                j["imprinting_test"] = ttest_json(g.imprinting_t);
                j["recognition_test"] = ttest_json(g.recognition_t);
            } else {
                j["imprinting_test"] = nullptr;
                j["recognition_test"] = nullptr;
            }
            j["fraction_imprinted"] = g.fraction_imprinted;
            j["fraction_view_invariant"] = g.fraction_view_invariant;
            j["fraction_view_dependent"] = g.fraction_view_dependent;
            j["fraction_neither"] = g.fraction_neither;
            j["mean_imprinting_sem"] = g.mean_imprinting_sem;
            j["mean_recognition_sem"] = g.mean_recognition_sem;
            arr.push_back(std::move(j));
        }
        report["groups"] = arr;
    }
    if (have_groups) {
        json metrics = json::array();
        for (const auto& m : adequacy.metrics) {
            json j;
            j["metric"] = m.metric;
            j["machine_mean"] = m.machine_mean;
            j["band"] = m.has_band ? band_json(m.band) : json(nullptr);
            j["inside"] = m.inside;
            j["gap"] = m.has_band ? json(m.gap) : json(nullptr);
            metrics.push_back(std::move(j));
        }
        report["comparison"] = {{"adequate", adequacy.adequate}, {"metrics", metrics}};
    } else {
        report["comparison"] = nullptr;
    }
    if (have_embedding) {
        json points = json::array();
        for (std::size_t i = 0; i < emb.coords.size(); ++i)
            points.push_back(
                {{"x", emb.coords[i][0]}, {"y", emb.coords[i][1]}, {"label", emb.labels[i]}});
        report["embedding"] = {{"seed", emb.seed},
                               {"perplexity", opt.perplexity},
                               {"iterations", emb.iterations},
                               {"kl_initial", emb.kl_initial},
                               {"kl_final", emb.kl_final},
                               {"points", points}};
    } else {
        report["embedding"] = nullptr;
    }
    {
        json arr = json::array();
        for (const auto& a : absent) arr.push_back({{"dir", a.dir}, {"reason", a.reason}});
        report["absent_runs"] = arr;
    }
    report["warnings"] = warnings;
    write_text(out / "report.json", report.dump(2) + "\n");

    // ---- CSVs
    {
        std::ostringstream s;
        s << "dir,algorithm,condition,seed,imprinting_pct,overall_recognition_pct,imprinted,label,"
             "heading_alignment_deg,imprinting_sem,recognition_sem,imputed_viewpoints";
        for (int i = 0; i < 12; ++i) s << ",vp" << (i < 10 ? "0" : "") << i;
        s << "\n";
        for (const auto& a : agents) {
            s << a.dir << ',' << a.algorithm << ',' << a.condition << ',' << a.seed << ','
              << g9(a.summary.imprinting_pct) << ',' << g9(a.summary.overall_recognition_pct) << ','
              << (a.imprinted ? 1 : 0) << ',' << stats::label_name(a.label) << ','
              << (a.heading_deg.has_value() ? g9(*a.heading_deg) : std::string()) << ','
              << g9(a.summary.imprinting_sem) << ',' << g9(a.summary.recognition_sem) << ','
              << a.imputed;
            for (const auto& e : a.summary.behavior)
                s << ',' << (e.has_value() ? g9(*e) : std::string());
            s << "\n";
        }
        write_text(out / "agents.csv", s.str());
    }
    {
        std::ostringstream s;
        s << "group,n,imprinting_mean,imprinting_sd,imprinting_sem,imprinting_t,imprinting_df,"
             "imprinting_p,recognition_mean,recognition_sd,recognition_sem,recognition_t,"
             "recognition_df,recognition_p,fraction_imprinted,fraction_view_invariant,"
             "fraction_view_dependent,fraction_neither,mean_imprinting_sem,mean_recognition_sem\n";
        for (const auto& g : groups) {
            s << g.group << ',' << g.n << ',' << g9(g.imprinting.mean) << ',' << g9(g.imprinting.sd)
              << ',' << g9(g.imprinting.sem) << ','
              << (g.has_tests ? g9(g.imprinting_t.t) : std::string()) << ','
              << (g.has_tests ? std::to_string(g.imprinting_t.df) : std::string()) << ','
              << (g.has_tests ? g9(g.imprinting_t.p) : std::string()) << ','
              << g9(g.recognition.mean) << ',' << g9(g.recognition.sd) << ','
              << g9(g.recognition.sem) << ','
              << (g.has_tests ? g9(g.recognition_t.t) : std::string()) << ','
              << (g.has_tests ? std::to_string(g.recognition_t.df) : std::string()) << ','
              << (g.has_tests ? g9(g.recognition_t.p) : std::string()) << ','
              << g9(g.fraction_imprinted) << ',' << g9(g.fraction_view_invariant) << ','
              << g9(g.fraction_view_dependent) << ',' << g9(g.fraction_neither) << ','
              << g9(g.mean_imprinting_sem) << ',' << g9(g.mean_recognition_sem) << "\n";
        }
        write_text(out / "groups.csv", s.str());
    }

    // ---- figures
    {
        std::vector<Bar> bars;
        {
            Bar chick;
            chick.name = "chick";
            chick.mean = ref.group.imprinting_mean;
            chick.sem = ref.group.n > 0
                            ? ref.group.imprinting_sd / std::sqrt(static_cast<double>(ref.group.n))
                            : 0.0;
            bars.push_back(std::move(chick));
        }
        for (const auto& g : groups) {
            Bar b;
            b.name = g.group;
            b.mean = g.imprinting.mean;
            b.sem = g.imprinting.sem;
            for (const auto& a : agents)
                if (g.group == "all" || a.algorithm == g.group)
                    b.dots.push_back(a.summary.imprinting_pct);
            bars.push_back(std::move(b));
        }
        stats::NoiseBand band{ref.group.imprinting_mean, mad_of_normal(ref.group.imprinting_sd)};
        write_text(out / "imprinting.svg",
                   bar_figure_svg("Imprinting preference (%)", bars, band));
    }
    {
        std::vector<Bar> bars;
        std::optional<stats::NoiseBand> band;
        if (!ref.individuals.empty()) {
            std::vector<double> overall;
            for (const auto& v : ref.individuals) {
                double s = 0.0;
                for (double x : v) s += x;
                overall.push_back(s / 12.0);
            }
            band = stats::noise_band(overall);
            Bar chick;
            chick.name = "chick";
            stats::StatsSummary cs = stats::summarize(overall);
            chick.mean = cs.mean;
            chick.sem = cs.sem;
            chick.dots = overall;
            bars.push_back(std::move(chick));
        }
        for (const auto& g : groups) {
            Bar b;
            b.name = g.group;
            b.mean = g.recognition.mean;
            b.sem = g.recognition.sem;
            for (const auto& a : agents)
                if (g.group == "all" || a.algorithm == g.group)
                    b.dots.push_back(a.summary.overall_recognition_pct);
            bars.push_back(std::move(b));
        }
        write_text(out / "recognition.svg",
                   bar_figure_svg("View-invariant recognition (%)", bars, band));
    }
    {
        tsne::EmbeddingResult for_plot = have_embedding ? emb : tsne::EmbeddingResult{};
        write_text(out / "tsne.svg", scatter_svg(for_plot));
    }

    return static_cast<int>(agents.size());
}

}  // namespace nest::analysis
