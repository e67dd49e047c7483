#include "nest/world.hpp"

#include <algorithm>
#include <cmath>

#include "nest/detmath.hpp"
#include "nest/errors.hpp"

namespace nest::world {

RearingCondition condition_from_index(int idx) {
    switch (idx) {
        case 1: return {ObjectId::A, RearingView::Front};
        case 2: return {ObjectId::A, RearingView::Side};
        case 3: return {ObjectId::B, RearingView::Front};
        case 4: return {ObjectId::B, RearingView::Side};
        default: throw ConfigError("condition index must be 1..4");
    }
}

int condition_to_index(const RearingCondition& c) {
    int base = c.object == ObjectId::A ? 1 : 3;
    return base + (c.view == RearingView::Side ? 1 : 0);
}

std::string condition_label(const RearingCondition& c) {
    std::string s = c.object == ObjectId::A ? "A_" : "B_";
    s += c.view == RearingView::Front ? "front" : "side";
    return s;
}

std::array<ViewpointRange, 12> viewpoint_ranges(const RearingCondition& c) {
    std::array<ViewpointRange, 12> out;
    for (int row = 0; row < 2; ++row) {
        for (int col = 0; col < 6; ++col) {
            int idx = row * 6 + col;
            out[idx] = ViewpointRange{idx, 60.0 * col, row == 0 ? 0.0 : 45.0, false};
        }
    }
    if (c.view == RearingView::Front) {
        out[0].is_familiar = true;
    } else {
        // side rearing: 90-degree azimuth replaces the nearest grid entry
        out[1].azimuth_center_deg = 90.0;
        out[1].is_familiar = true;
    }
    return out;
}

const ViewpointRange& familiar_range(const std::array<ViewpointRange, 12>& ranges) {
    for (const auto& r : ranges)
        if (r.is_familiar) return r;
    throw ConfigError("viewpoint ranges have no familiar entry");
}

Pose step_pose(const Pose& pose, const Action& action, const AgentBody& body, const ChamberSpec& chamber) {
    Pose next = pose;
    next.heading_deg = detmath::wrap_deg(pose.heading_deg + action.rotation * body.rotation_step_deg);
    double d = action.translation * body.translation_step;
    next.x = pose.x + d * detmath::cos_deg(next.heading_deg);
    next.y = pose.y + d * detmath::sin_deg(next.heading_deg);
    next.x = std::clamp(next.x, body.radius, chamber.length_x - body.radius);
    next.y = std::clamp(next.y, body.radius, chamber.width_y - body.radius);
    return next;
}

double stimulus_azimuth(std::int64_t time_step, const ViewpointRange& range, int period_steps) {
    // triangle wave: center -> +30 -> center -> -30 -> center over one period
    std::int64_t t = time_step % period_steps;
    double u = static_cast<double>(t) / static_cast<double>(period_steps);
    double offset;
    if (u < 0.25) offset = 120.0 * u;
    else if (u < 0.75) offset = 60.0 - 120.0 * u;
    else offset = 120.0 * u - 120.0;
    return range.azimuth_center_deg + offset;
}

Zone zone_of(const Pose& pose, const ChamberSpec& chamber) {
    double split = chamber.zone_split();
    if (pose.x < split) return Zone::SideX0;
    if (pose.x > split) return Zone::SideXL;
    return Zone::Neutral;
}

Pose spawn(Rng& rng, const ChamberSpec& chamber, const AgentBody& body) {
    Pose p;
    p.x = body.radius + rng.next_f64() * (chamber.length_x - 2.0 * body.radius);
    p.y = body.radius + rng.next_f64() * (chamber.width_y - 2.0 * body.radius);
    p.heading_deg = rng.next_f64() * 360.0;
    return p;
}

std::vector<TrialSpec> make_trial_schedule(const RearingCondition& condition, int n_imprinting,
                                           int trials_per_viewpoint, int duration_steps,
                                           std::uint64_t seed) {
    (void)condition;  // the condition fixes which viewpoint is familiar, not the counts
    if (n_imprinting < 0 || n_imprinting % 2 != 0)
        throw ConfigError("imprinting trial count must be even");
    if (trials_per_viewpoint < 0 || trials_per_viewpoint % 2 != 0)
        throw ConfigError("trials per viewpoint must be even (half per wall)");

    Rng rng(mix_seed(seed, fnv1a64("trial-schedule")));

    std::vector<TrialSpec> imprint;
    imprint.reserve(n_imprinting);
    for (int i = 0; i < n_imprinting; ++i) {
        TrialSpec t;
        t.kind = TrialKind::Imprinting;
        t.imprint_wall = i < n_imprinting / 2 ? Wall::X0 : Wall::XL;
        t.duration_steps = duration_steps;
        imprint.push_back(t);
    }
    rng.shuffle(imprint);

    std::vector<TrialSpec> recog;
    recog.reserve(12 * trials_per_viewpoint);
    for (int v = 0; v < 12; ++v) {
        for (int i = 0; i < trials_per_viewpoint; ++i) {
            TrialSpec t;
            t.kind = TrialKind::Recognition;
            t.viewpoint_index = v;
            t.imprint_wall = i < trials_per_viewpoint / 2 ? Wall::X0 : Wall::XL;
            t.duration_steps = duration_steps;
            recog.push_back(t);
        }
    }
    rng.shuffle(recog);

    std::vector<TrialSpec> out;
    out.reserve(imprint.size() + recog.size());
    out.insert(out.end(), imprint.begin(), imprint.end());
    out.insert(out.end(), recog.begin(), recog.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i].trial_id = static_cast<int>(i);
    return out;
}

}  // namespace nest::world
