#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nest/rng.hpp"

namespace nest::world {

// Rearing chamber: a box with display walls at x = 0 and x = length_x.
// The floor is [0, length_x] x [0, width_y]; z is up.
struct ChamberSpec {
    double length_x = 20.0;  // distance between the two display walls
    double width_y = 14.0;
    double wall_height = 10.0;
    double display_width = 8.0;   // display rectangle, centered on each display wall
    double display_height = 8.0;
    double zone_split() const { return length_x * 0.5; }
};

struct AgentBody {
    double height = 3.5;
    double radius = 1.2;
    double camera_height = 3.2;
    double translation_step = 0.2;    // units per step
    double rotation_step_deg = 10.0;  // degrees per step
};

// heading in degrees, [0,360), 0 = +x, counterclockwise
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading_deg = 0.0;
};

// the nine legal (translation, rotation) pairs; each component in {-1,0,+1}
struct Action {
    int translation = 0;
    int rotation = 0;
    int joint_index() const { return (translation + 1) * 3 + (rotation + 1); }
    static Action from_joint(int idx) { return Action{idx / 3 - 1, idx % 3 - 1}; }
};

enum class ObjectId : std::uint8_t { A, B, Blank };
enum class RearingView : std::uint8_t { Front, Side };

struct RearingCondition {
    ObjectId object = ObjectId::A;
    RearingView view = RearingView::Front;
};

// 1..4 as exposed on the CLI: (A,front), (A,side), (B,front), (B,side)
RearingCondition condition_from_index(int idx);
int condition_to_index(const RearingCondition& c);
std::string condition_label(const RearingCondition& c);

struct ViewpointRange {
    int index = 0;
    double azimuth_center_deg = 0.0;
    double elevation_deg = 0.0;
    bool is_familiar = false;
};

// The 12 test viewpoint ranges for a rearing condition: azimuth centers
// {0,60,...,300} x elevations {0,45}. For side rearing the (60,0) grid entry
// is replaced by (90,0), which becomes the familiar range; for front the
// familiar range is (0,0).
std::array<ViewpointRange, 12> viewpoint_ranges(const RearingCondition& c);
const ViewpointRange& familiar_range(const std::array<ViewpointRange, 12>& ranges);

enum class Wall : std::uint8_t { X0, XL };
enum class Zone : std::uint8_t { SideX0, SideXL, Neutral };

enum class TrialKind : std::uint8_t { Imprinting, Recognition };

struct TrialSpec {
    TrialKind kind = TrialKind::Imprinting;
    int viewpoint_index = -1;  // recognition only
    Wall imprint_wall = Wall::X0;
    int duration_steps = 1000;
    int trial_id = 0;
};

// Kinematics: rotation is applied before translation; the final position is
// clamped so the agent circle stays inside the walls. Pure function.
Pose step_pose(const Pose& pose, const Action& action, const AgentBody& body, const ChamberSpec& chamber);

// Rocking stimulus azimuth: triangle wave centered on the range's azimuth
// center, amplitude 30 degrees, given period in steps. At t=0 the wave is at
// the center moving up.
double stimulus_azimuth(std::int64_t time_step, const ViewpointRange& range, int period_steps);

Zone zone_of(const Pose& pose, const ChamberSpec& chamber);

// uniform over the interior shrunk by the agent radius; heading uniform [0,360)
Pose spawn(Rng& rng, const ChamberSpec& chamber, const AgentBody& body);

// n_imprinting imprinting trials (half per wall, shuffled) followed by
// 12*trials_per_viewpoint recognition trials (half per wall per viewpoint,
// shuffled). Both counts must be even. Deterministic given seed.
std::vector<TrialSpec> make_trial_schedule(const RearingCondition& condition, int n_imprinting,
                                           int trials_per_viewpoint, int duration_steps,
                                           std::uint64_t seed);

}  // namespace nest::world
