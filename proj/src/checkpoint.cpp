#include "nest/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <unordered_map>

#include "nest/errors.hpp"
#include "nest/rng.hpp"

namespace nest::checkpoint {

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_f32(std::vector<unsigned char>& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(out, v);
}

struct Reader {
    const unsigned char* p;
    std::size_t len, pos = 0;

    void need(std::size_t n) {
        if (pos + n > len) throw CheckpointError("corrupt: short read");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = static_cast<std::uint32_t>(p[pos]) |
                          (static_cast<std::uint32_t>(p[pos + 1]) << 8) |
                          (static_cast<std::uint32_t>(p[pos + 2]) << 16) |
                          (static_cast<std::uint32_t>(p[pos + 3]) << 24);
        pos += 4;
        return v;
    }
    float f32() {
        std::uint32_t v = u32();
        float f;
        std::memcpy(&f, &v, 4);
        return f;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(p + pos), n);
        pos += n;
        return s;
    }
};

}  // namespace

std::vector<unsigned char> serialize(const nn::ParamSet<float>& params) {
    std::vector<unsigned char> out;
    out.insert(out.end(), kMagic, kMagic + 8);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(params.params.size()));
    for (const auto& p : params.params) {
        put_u32(out, static_cast<std::uint32_t>(p.name.size()));
        out.insert(out.end(), p.name.begin(), p.name.end());
        put_u32(out, static_cast<std::uint32_t>(p.shape.size()));
        for (int d : p.shape) put_u32(out, static_cast<std::uint32_t>(d));
        for (float f : *p.value) put_f32(out, f);
    }
    return out;
}

std::vector<TensorRecord> parse(const unsigned char* bytes, std::size_t len) {
    Reader r{bytes, len};
    r.need(8);
    if (std::memcmp(bytes, kMagic, 8) != 0) throw CheckpointError("corrupt: bad magic");
    r.pos = 8;
    std::uint32_t version = r.u32();
    if (version != kVersion) throw CheckpointError("unsupported version");
    std::uint32_t count = r.u32();
    std::vector<TensorRecord> records;
    records.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        TensorRecord rec;
        std::uint32_t name_len = r.u32();
        rec.name = r.str(name_len);
        std::uint32_t rank = r.u32();
        if (rank > 8) throw CheckpointError("corrupt: implausible tensor rank");
        std::size_t total = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            std::uint32_t dim = r.u32();
            if (dim == 0 || dim > (1u << 26)) throw CheckpointError("corrupt: implausible dim");
            rec.shape.push_back(static_cast<int>(dim));
            total *= dim;
        }
        rec.data.resize(total);
        for (std::size_t j = 0; j < total; ++j) rec.data[j] = r.f32();
        records.push_back(std::move(rec));
    }
    return records;
}

void save(const std::string& path, const nn::ParamSet<float>& params) {
    std::vector<unsigned char> bytes = serialize(params);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw IoError("cannot open for writing: " + path);
    std::size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
    if (written != bytes.size()) throw IoError("short write: " + path);
}

std::vector<TensorRecord> load(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (f == nullptr) throw IoError("cannot open: " + path);
    std::vector<unsigned char> bytes;
    unsigned char buf[65536];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) bytes.insert(bytes.end(), buf, buf + n);
    bool err = std::ferror(f) != 0;
    std::fclose(f);
    if (err) throw IoError("read failed: " + path);
    return parse(bytes.data(), bytes.size());
}

void restore(nn::ParamSet<float>& params, const std::vector<TensorRecord>& records) {
    std::unordered_map<std::string, const TensorRecord*> by_name;
    for (const auto& r : records) by_name[r.name] = &r;
    for (auto& p : params.params) {
        auto it = by_name.find(p.name);
        if (it == by_name.end()) throw CheckpointError("missing tensor: " + p.name);
        const TensorRecord& rec = *it->second;
        if (rec.shape != p.shape || rec.data.size() != p.value->size())
            throw CheckpointError("shape mismatch: " + p.name);
        std::copy(rec.data.begin(), rec.data.end(), p.value->begin());
    }
}

std::uint64_t file_checksum(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (f == nullptr) throw IoError("cannot open: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    unsigned char buf[65536];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) h = fnv1a64(buf, n, h);
    bool err = std::ferror(f) != 0;
    std::fclose(f);
    if (err) throw IoError("read failed: " + path);
    return h;
}

}  // namespace nest::checkpoint
