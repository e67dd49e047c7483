#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nest/world.hpp"

namespace nest::render {

inline constexpr int kFrameSize = 96;
inline constexpr int kFramePixels = kFrameSize * kFrameSize;
inline constexpr int kFrameFloats = kFramePixels * 3;

// 96x96 RGB, floats in [0,1], row-major interleaved (y, x, channel)
struct Frame {
    std::vector<float> data;
    Frame() : data(kFrameFloats, 0.0f) {}
    float* pixel(int x, int y) { return data.data() + (y * kFrameSize + x) * 3; }
    const float* pixel(int x, int y) const { return data.data() + (y * kFrameSize + x) * 3; }
    bool operator==(const Frame& o) const { return data == o.data; }
};

// the stimulus scene as shown on a display wall
using DisplayTexture = Frame;

struct Vec3 {
    float x = 0, y = 0, z = 0;
};
Vec3 operator+(Vec3 a, Vec3 b);
Vec3 operator-(Vec3 a, Vec3 b);
Vec3 operator*(Vec3 a, float s);
float dot(Vec3 a, Vec3 b);
Vec3 cross(Vec3 a, Vec3 b);
Vec3 normalize(Vec3 a);

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    Vec3 base_color{0.8f, 0.15f, 0.15f};
};

// procedural stimulus objects; A and B share height, maximal span, and color
Mesh object_mesh(world::ObjectId id);

struct Camera {
    Vec3 eye;
    Vec3 right, up, forward;  // orthonormal
    float fov_deg = 60.0f;
    float near_plane = 0.1f;
};

Camera agent_camera(const world::Pose& pose, double camera_height, float fov_deg, float near_plane);
Camera look_at(Vec3 eye, Vec3 target, float fov_deg, float near_plane);

// Screen-space vertex for the rasterizer core. x,y in pixels (top-left
// origin), inv_w = 1/depth; u_over_w/v_over_w carry texture coordinates
// premultiplied for perspective correction.
struct ScreenVertex {
    float x = 0, y = 0;
    float inv_w = 1;
    float u_over_w = 0, v_over_w = 0;
};

struct RasterTarget {
    Frame frame;
    std::vector<float> zinv;  // per pixel 1/depth, 0 = infinitely far
    RasterTarget() : zinv(kFramePixels, 0.0f) {}
    void clear(float r, float g, float b);
};

// Coverage rule: a pixel is covered iff its center (x+0.5, y+0.5) lies
// inside or on the edge of the triangle (all three edge functions share a
// sign or are zero). Depth test is strict: only a nearer fragment overwrites.
void raster_triangle(RasterTarget& target, const ScreenVertex v[3], const Frame* texture,
                     const float color[3]);

// near-plane clip + perspective projection + rasterization of one
// world-space triangle; uv used only when texture is non-null
void draw_world_triangle(RasterTarget& target, const Camera& cam, const Vec3 p[3],
                         const float uv[3][2], const Frame* texture, const float color[3]);

// The object rotated to the given azimuth, seen from the given elevation,
// flat-shaded with one fixed directional light on a white background.
// Blank renders all white. Deterministic.
DisplayTexture render_display_texture(world::ObjectId id, double azimuth_deg, double elevation_deg);

// The agent's observation: matte room surfaces at fixed shade 0.9 plus the
// two textured display rectangles centered on the display walls.
Frame render_observation(const world::ChamberSpec& chamber, const DisplayTexture& display_x0,
                         const DisplayTexture& display_xl, const Camera& cam);

// binary P6, 8-bit, value = round(255 * v)
void write_ppm(const Frame& frame, const std::string& path);

// interleaved frame -> planar [3][96][96] network input
inline void frame_to_chw(const Frame& f, float* dst) {
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < kFramePixels; ++i) dst[c * kFramePixels + i] = f.data[i * 3 + c];
}

}  // namespace nest::render
