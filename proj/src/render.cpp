#include "nest/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "nest/detmath.hpp"
#include "nest/errors.hpp"

namespace nest::render {

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(Vec3 a, float s) { return {a.x * s, a.y * s, a.z * s}; }
float dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
Vec3 normalize(Vec3 a) {
    float n = std::sqrt(dot(a, a));
    if (n == 0.0f) return {0, 0, 0};
    return a * (1.0f / n);
}

namespace {

// axis-aligned-free box: center plus three orthogonal half-axis vectors
void add_box(Mesh& m, Vec3 center, Vec3 ax, Vec3 ay, Vec3 az) {
    std::uint32_t base = static_cast<std::uint32_t>(m.vertices.size());
    for (int i = 0; i < 8; ++i) {
        float sx = (i & 1) ? 1.0f : -1.0f;
        float sy = (i & 2) ? 1.0f : -1.0f;
        float sz = (i & 4) ? 1.0f : -1.0f;
        m.vertices.push_back(center + ax * sx + ay * sy + az * sz);
    }
    auto quad = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
        m.triangles.push_back({base + a, base + b, base + c});
        m.triangles.push_back({base + a, base + c, base + d});
    };
    quad(1, 3, 7, 5);  // +x of local frame
    quad(0, 4, 6, 2);  // -x
    quad(2, 6, 7, 3);  // +y
    quad(0, 1, 5, 4);  // -y
    quad(4, 5, 7, 6);  // +z
    quad(0, 2, 3, 1);  // -z
}

constexpr float kHalfHeight = 2.0f;
constexpr float kHalfSpan = 2.1f;

}  // namespace

Mesh object_mesh(world::ObjectId id) {
    Mesh m;
    m.base_color = {0.85f, 0.20f, 0.10f};
    if (id == world::ObjectId::A) {
        // vertical column with two fins tilted out of the column's plane
        add_box(m, {0, 0, 0}, {0.6f, 0, 0}, {0, 0.6f, 0}, {0, 0, kHalfHeight});
        float c35 = static_cast<float>(detmath::cos_deg(35.0));
        float s35 = static_cast<float>(detmath::sin_deg(35.0));
        float fin_len = (kHalfSpan - 1.0f) / c35;  // outer reach ~= kHalfSpan
        Vec3 chord{0.5f, 0, 0};
        Vec3 along{0, fin_len * c35, fin_len * s35};
        Vec3 thick{0, -0.08f * s35, 0.08f * c35};
        add_box(m, {0, 1.0f, 0}, chord, along, thick);
        Vec3 along2{0, -along.y, along.z};
        Vec3 thick2{0, -thick.y, thick.z};
        add_box(m, {0, -1.0f, 0}, chord, along2, thick2);
    } else if (id == world::ObjectId::B) {
        // low slab carried by two square posts
        add_box(m, {0, 0, -1.6f}, {kHalfSpan, 0, 0}, {0, 0.8f, 0}, {0, 0, 0.4f});
        add_box(m, {1.2f, 0, 0.4f}, {0.4f, 0, 0}, {0, 0.4f, 0}, {0, 0, 1.6f});
        add_box(m, {-1.2f, 0, 0.4f}, {0.4f, 0, 0}, {0, 0.4f, 0}, {0, 0, 1.6f});
    }
    return m;
}

Camera look_at(Vec3 eye, Vec3 target, float fov_deg, float near_plane) {
    Camera c;
    c.eye = eye;
    c.forward = normalize(target - eye);
    c.right = normalize(cross(c.forward, Vec3{0, 0, 1}));
    c.up = cross(c.right, c.forward);
    c.fov_deg = fov_deg;
    c.near_plane = near_plane;
    return c;
}

Camera agent_camera(const world::Pose& pose, double camera_height, float fov_deg,
                    float near_plane) {
    double ch = detmath::cos_deg(pose.heading_deg);
    double sh = detmath::sin_deg(pose.heading_deg);
    Camera c;
    c.eye = {static_cast<float>(pose.x), static_cast<float>(pose.y),
             static_cast<float>(camera_height)};
    c.forward = {static_cast<float>(ch), static_cast<float>(sh), 0.0f};
    c.right = {static_cast<float>(sh), static_cast<float>(-ch), 0.0f};
    c.up = {0, 0, 1};
    c.fov_deg = fov_deg;
    c.near_plane = near_plane;
    return c;
}

void RasterTarget::clear(float r, float g, float b) {
    for (int i = 0; i < kFramePixels; ++i) {
        frame.data[i * 3 + 0] = r;
        frame.data[i * 3 + 1] = g;
        frame.data[i * 3 + 2] = b;
        zinv[i] = 0.0f;
    }
}

void raster_triangle(RasterTarget& target, const ScreenVertex v[3], const Frame* texture,
                     const float color[3]) {
    const float ax = v[0].x, ay = v[0].y;
    const float bx = v[1].x, by = v[1].y;
    const float cx = v[2].x, cy = v[2].y;
    float area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if (area == 0.0f) return;
    float sign = area > 0.0f ? 1.0f : -1.0f;
    float inv_area = 1.0f / area;

    float minx = std::min(ax, std::min(bx, cx));
    float maxx = std::max(ax, std::max(bx, cx));
    float miny = std::min(ay, std::min(by, cy));
    float maxy = std::max(ay, std::max(by, cy));
    int px0 = std::max(0, static_cast<int>(std::ceil(minx - 0.5f)));
    int px1 = std::min(kFrameSize - 1, static_cast<int>(std::floor(maxx - 0.5f)));
    int py0 = std::max(0, static_cast<int>(std::ceil(miny - 0.5f)));
    int py1 = std::min(kFrameSize - 1, static_cast<int>(std::floor(maxy - 0.5f)));

    for (int y = py0; y <= py1; ++y) {
        float py = static_cast<float>(y) + 0.5f;
        for (int x = px0; x <= px1; ++x) {
            float px = static_cast<float>(x) + 0.5f;
            float e0 = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
            float e1 = (cx - bx) * (py - by) - (cy - by) * (px - bx);
            float e2 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx);
            if (sign * e0 < 0.0f || sign * e1 < 0.0f || sign * e2 < 0.0f) continue;
            float l0 = e1 * inv_area;
            float l1 = e2 * inv_area;
            float l2 = e0 * inv_area;
            float inv_w = l0 * v[0].inv_w + l1 * v[1].inv_w + l2 * v[2].inv_w;
            int idx = y * kFrameSize + x;
            if (!(inv_w > target.zinv[idx])) continue;  // strictly nearer wins
            target.zinv[idx] = inv_w;
            float* out = target.frame.data.data() + idx * 3;
            if (texture != nullptr) {
                float uw = l0 * v[0].u_over_w + l1 * v[1].u_over_w + l2 * v[2].u_over_w;
                float vw = l0 * v[0].v_over_w + l1 * v[1].v_over_w + l2 * v[2].v_over_w;
                float w = 1.0f / inv_w;
                float u = uw * w;
                float vv = vw * w;
                int tx = std::clamp(static_cast<int>(u * kFrameSize), 0, kFrameSize - 1);
                int ty = std::clamp(static_cast<int>(vv * kFrameSize), 0, kFrameSize - 1);
                const float* texel = texture->pixel(tx, ty);
                out[0] = texel[0];
                out[1] = texel[1];
                out[2] = texel[2];
            } else {
                out[0] = color[0];
                out[1] = color[1];
                out[2] = color[2];
            }
        }
    }
}

namespace {

struct ClipVert {
    Vec3 cam;  // camera-space position: x right, y up, z forward
    float u = 0, v = 0;
};

ClipVert clip_lerp(const ClipVert& a, const ClipVert& b, float t) {
    ClipVert r;
    r.cam = a.cam + (b.cam - a.cam) * t;
    r.u = a.u + (b.u - a.u) * t;
    r.v = a.v + (b.v - a.v) * t;
    return r;
}

int clip_near(const ClipVert* in, int n, ClipVert* out, float znear) {
    int m = 0;
    for (int i = 0; i < n; ++i) {
        const ClipVert& a = in[i];
        const ClipVert& b = in[(i + 1) % n];
        bool a_in = a.cam.z >= znear;
        bool b_in = b.cam.z >= znear;
        if (a_in) out[m++] = a;
        if (a_in != b_in) {
            float t = (znear - a.cam.z) / (b.cam.z - a.cam.z);
            out[m++] = clip_lerp(a, b, t);
        }
    }
    return m;
}

float focal_length(float fov_deg) {
    double half = 0.5 * static_cast<double>(fov_deg);
    double t = detmath::sin_deg(half) / detmath::cos_deg(half);
    return static_cast<float>((kFrameSize / 2) / t);
}

}  // namespace

void draw_world_triangle(RasterTarget& target, const Camera& cam, const Vec3 p[3],
                         const float uv[3][2], const Frame* texture, const float color[3]) {
    ClipVert in[3];
    for (int i = 0; i < 3; ++i) {
        Vec3 d = p[i] - cam.eye;
        in[i].cam = {dot(d, cam.right), dot(d, cam.up), dot(d, cam.forward)};
        if (uv != nullptr) {
            in[i].u = uv[i][0];
            in[i].v = uv[i][1];
        }
    }
    ClipVert clipped[4];
    int n = clip_near(in, 3, clipped, cam.near_plane);
    if (n < 3) return;

    float f = focal_length(cam.fov_deg);
    ScreenVertex sv[4];
    const float half = kFrameSize / 2.0f;
    for (int i = 0; i < n; ++i) {
        float inv_w = 1.0f / clipped[i].cam.z;
        sv[i].x = half + f * clipped[i].cam.x * inv_w;
        sv[i].y = half - f * clipped[i].cam.y * inv_w;
        sv[i].inv_w = inv_w;
        sv[i].u_over_w = clipped[i].u * inv_w;
        sv[i].v_over_w = clipped[i].v * inv_w;
    }
    for (int i = 2; i < n; ++i) {
        ScreenVertex tri[3] = {sv[0], sv[i - 1], sv[i]};
        raster_triangle(target, tri, texture, color);
    }
}

DisplayTexture render_display_texture(world::ObjectId id, double azimuth_deg,
                                      double elevation_deg) {
    RasterTarget rt;
    rt.clear(1.0f, 1.0f, 1.0f);
    if (id == world::ObjectId::Blank) return rt.frame;

    Mesh mesh = object_mesh(id);
    double ca = detmath::cos_deg(azimuth_deg);
    double sa = detmath::sin_deg(azimuth_deg);
    double ce = detmath::cos_deg(elevation_deg);
    double se = detmath::sin_deg(elevation_deg);
    const float view_dist = 7.5f;
    Vec3 eye{static_cast<float>(view_dist * ce), 0.0f, static_cast<float>(view_dist * se)};
    Camera cam = look_at(eye, {0, 0, 0}, 45.0f, 0.1f);
    Vec3 light = normalize({0.35f, -0.5f, 0.8f});

    for (const auto& tri : mesh.triangles) {
        Vec3 p[3];
        for (int i = 0; i < 3; ++i) {
            Vec3 v = mesh.vertices[tri[i]];
            p[i] = {static_cast<float>(ca * v.x - sa * v.y),
                    static_cast<float>(sa * v.x + ca * v.y), v.z};
        }
        Vec3 n = normalize(cross(p[1] - p[0], p[2] - p[0]));
        float lambert = std::fabs(dot(n, light));
        float shade = 0.3f + 0.7f * lambert;
        float rgb[3] = {mesh.base_color.x * shade, mesh.base_color.y * shade,
                        mesh.base_color.z * shade};
        draw_world_triangle(rt, cam, p, nullptr, nullptr, rgb);
    }
    return rt.frame;
}

namespace {

void draw_quad(RasterTarget& rt, const Camera& cam, Vec3 a, Vec3 b, Vec3 c, Vec3 d,
               const float uvs[4][2], const Frame* tex, const float color[3]) {
    Vec3 t1[3] = {a, b, c};
    Vec3 t2[3] = {a, c, d};
    if (uvs != nullptr) {
        float uv1[3][2] = {{uvs[0][0], uvs[0][1]}, {uvs[1][0], uvs[1][1]}, {uvs[2][0], uvs[2][1]}};
        float uv2[3][2] = {{uvs[0][0], uvs[0][1]}, {uvs[2][0], uvs[2][1]}, {uvs[3][0], uvs[3][1]}};
        draw_world_triangle(rt, cam, t1, uv1, tex, color);
        draw_world_triangle(rt, cam, t2, uv2, tex, color);
    } else {
        draw_world_triangle(rt, cam, t1, nullptr, tex, color);
        draw_world_triangle(rt, cam, t2, nullptr, tex, color);
    }
}

}  // namespace

Frame render_observation(const world::ChamberSpec& chamber, const DisplayTexture& display_x0,
                         const DisplayTexture& display_xl, const Camera& cam) {
    RasterTarget rt;
    const float shade = 0.9f;
    rt.clear(shade, shade, shade);
    float wall[3] = {shade, shade, shade};

    const float lx = static_cast<float>(chamber.length_x);
    const float wy = static_cast<float>(chamber.width_y);
    const float h = static_cast<float>(chamber.wall_height);

    draw_quad(rt, cam, {0, 0, 0}, {lx, 0, 0}, {lx, wy, 0}, {0, wy, 0}, nullptr, nullptr, wall);
    draw_quad(rt, cam, {0, 0, h}, {lx, 0, h}, {lx, wy, h}, {0, wy, h}, nullptr, nullptr, wall);
    draw_quad(rt, cam, {0, 0, 0}, {0, wy, 0}, {0, wy, h}, {0, 0, h}, nullptr, nullptr, wall);
    draw_quad(rt, cam, {lx, 0, 0}, {lx, wy, 0}, {lx, wy, h}, {lx, 0, h}, nullptr, nullptr, wall);
    draw_quad(rt, cam, {0, 0, 0}, {lx, 0, 0}, {lx, 0, h}, {0, 0, h}, nullptr, nullptr, wall);
    draw_quad(rt, cam, {0, wy, 0}, {lx, wy, 0}, {lx, wy, h}, {0, wy, h}, nullptr, nullptr, wall);

    const float dw = static_cast<float>(chamber.display_width);
    const float dh = static_cast<float>(chamber.display_height);
    const float y0 = (wy - dw) / 2.0f, y1 = y0 + dw;
    const float z0 = (h - dh) / 2.0f, z1 = z0 + dh;
    const float inset = 0.01f;  // nudged into the room so the depth test favors it

    // x = 0 wall: a viewer facing it has +y on their right
    {
        float uvs[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        draw_quad(rt, cam, {inset, y0, z1}, {inset, y1, z1}, {inset, y1, z0}, {inset, y0, z0},
                  uvs, &display_x0, nullptr);
    }
    // x = L wall: mirrored, so the image is upright for a viewer facing +x
    {
        float uvs[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        draw_quad(rt, cam, {lx - inset, y1, z1}, {lx - inset, y0, z1}, {lx - inset, y0, z0},
                  {lx - inset, y1, z0}, uvs, &display_xl, nullptr);
    }
    return rt.frame;
}

void write_ppm(const Frame& frame, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw IoError("cannot open for writing: " + path);
    std::fprintf(f, "P6\n%d %d\n255\n", kFrameSize, kFrameSize);
    std::vector<unsigned char> bytes(kFrameFloats);
    for (int i = 0; i < kFrameFloats; ++i) {
        float v = std::clamp(frame.data[i], 0.0f, 1.0f);
        bytes[i] = static_cast<unsigned char>(v * 255.0f + 0.5f);
    }
    std::size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
    if (written != bytes.size()) throw IoError("short write: " + path);
}

}  // namespace nest::render
