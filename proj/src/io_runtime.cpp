#include "nlps/io_runtime.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <numbers>

#include <json.hpp>

namespace nlps {

using nlohmann::json;

namespace {

[[noreturn]] void fail_key(const std::string& key, const std::string& constraint) {
    throw ConfigError("config key \"" + key + "\": " + constraint);
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

double require_number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail_key(where + "." + key, "missing required key");
    const json& v = obj.at(key);
    if (!v.is_number()) fail_key(where + "." + key, "must be a number");
    return v.get<double>();
}

long require_integer(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail_key(where + "." + key, "missing required key");
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail_key(where + "." + key, "must be an integer");
    return v.get<long>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail_key(where + "." + key, "must be a number");
    return v.get<double>();
}

long integer_or(const json& obj, const std::string& where, const char* key, long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail_key(where + "." + key, "must be an integer");
    return v.get<long>();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    expect_keys(root, "config root", {"grid", "kernel", "physics", "time", "init", "output"});

    RunConfig cfg;

    if (!root.contains("grid")) throw ConfigError("config key \"grid\": missing required key");
    const json& grid = root.at("grid");
    expect_keys(grid, "grid", {"n", "length"});
    const long n = require_integer(grid, "grid", "n");
    const double length = require_number(grid, "grid", "length");
    if (n < 4) fail_key("grid.n", "must be >= 4");
    if (!(length > 0.0)) fail_key("grid.length", "must be > 0");
    cfg.grid = make_grid(static_cast<int>(n), length);

    cfg.kernel_radius = 0.05 * length;
    if (root.contains("kernel")) {
        const json& kernel = root.at("kernel");
        expect_keys(kernel, "kernel", {"radius"});
        cfg.kernel_radius = number_or(kernel, "kernel", "radius", cfg.kernel_radius);
    }
    if (!(cfg.kernel_radius > 0.0)) fail_key("kernel.radius", "must be > 0");
    if (!(cfg.kernel_radius < length / 2.0)) {
        fail_key("kernel.radius", "must be < length/2 (compact support in the periodic cell)");
    }

    if (!root.contains("physics")) throw ConfigError("config key \"physics\": missing required key");
    const json& physics = root.at("physics");
    expect_keys(physics, "physics", {"beta", "evaporation"});
    cfg.physics.beta = require_number(physics, "physics", "beta");
    if (!(cfg.physics.beta > 0.0)) fail_key("physics.beta", "must be > 0");
    cfg.physics.evap = EvaporationModel::none();
    if (physics.contains("evaporation")) {
        const json& evap = physics.at("evaporation");
        expect_keys(evap, "physics.evaporation", {"kind", "alpha"});
        if (!evap.contains("kind") || !evap.at("kind").is_string()) {
            fail_key("physics.evaporation.kind", "must be \"none\" or \"linear\"");
        }
        const std::string kind = evap.at("kind").get<std::string>();
        const double alpha = number_or(evap, "physics.evaporation", "alpha", 0.0);
        if (alpha < 0.0) fail_key("physics.evaporation.alpha", "must be >= 0");
        if (kind == "none") {
            cfg.physics.evap = EvaporationModel::none();
        } else if (kind == "linear") {
            cfg.physics.evap = EvaporationModel::linear(alpha);
        } else {
            fail_key("physics.evaporation.kind", "must be \"none\" or \"linear\"");
        }
    }

    if (!root.contains("time")) throw ConfigError("config key \"time\": missing required key");
    const json& time = root.at("time");
    expect_keys(time, "time", {"dt", "t_end", "snapshot_every", "diagnostics_every"});
    cfg.time.dt = std::nullopt;
    if (time.contains("dt")) {
        const json& dt = time.at("dt");
        if (dt.is_string()) {
            if (dt.get<std::string>() != "auto") fail_key("time.dt", "must be a number or \"auto\"");
        } else if (dt.is_number()) {
            const double v = dt.get<double>();
            if (!(v > 0.0)) fail_key("time.dt", "must be > 0");
            cfg.time.dt = v;
        } else {
            fail_key("time.dt", "must be a number or \"auto\"");
        }
    }
    cfg.time.t_end = require_number(time, "time", "t_end");
    if (!(cfg.time.t_end >= 0.0)) fail_key("time.t_end", "must be >= 0");
    cfg.time.snapshot_every = integer_or(time, "time", "snapshot_every", 0);
    if (cfg.time.snapshot_every < 0) fail_key("time.snapshot_every", "must be >= 0");
    cfg.time.diagnostics_every = integer_or(time, "time", "diagnostics_every", 100);
    if (cfg.time.diagnostics_every < 1) fail_key("time.diagnostics_every", "must be >= 1");

    if (!root.contains("init")) throw ConfigError("config key \"init\": missing required key");
    const json& init = root.at("init");
    if (!init.contains("type") || !init.at("type").is_string()) {
        fail_key("init.type", "must be \"spin_random\", \"sinusoid\" or \"file\"");
    }
    const std::string type = init.at("type").get<std::string>();
    if (type == "spin_random") {
        expect_keys(init, "init", {"type", "solvent_ratio", "seed"});
        cfg.init.type = InitType::SpinRandom;
        cfg.init.solvent_ratio = require_number(init, "init", "solvent_ratio");
        if (!(cfg.init.solvent_ratio >= 0.0 && cfg.init.solvent_ratio <= 1.0)) {
            fail_key("init.solvent_ratio", "must lie in [0, 1]");
        }
        if (init.contains("seed")) {
            const json& seed = init.at("seed");
            if (!seed.is_number_integer() ||
                (!seed.is_number_unsigned() && seed.get<long long>() < 0)) {
                fail_key("init.seed", "must be a non-negative integer");
            }
            cfg.init.seed = seed.get<std::uint64_t>();
        }
    } else if (type == "sinusoid") {
        expect_keys(init, "init", {"type", "m_amplitude", "phi_mean", "phi_amplitude"});
        cfg.init.type = InitType::Sinusoid;
        cfg.init.m_amplitude = number_or(init, "init", "m_amplitude", 0.2);
        cfg.init.phi_mean = number_or(init, "init", "phi_mean", 0.6);
        cfg.init.phi_amplitude = number_or(init, "init", "phi_amplitude", 0.2);
        if (cfg.init.m_amplitude < 0.0) fail_key("init.m_amplitude", "must be >= 0");
        if (cfg.init.phi_amplitude < 0.0) fail_key("init.phi_amplitude", "must be >= 0");
        if (cfg.init.phi_mean + cfg.init.phi_amplitude > 1.0) {
            fail_key("init.phi_mean", "phi_mean + phi_amplitude must be <= 1");
        }
        if (cfg.init.m_amplitude > cfg.init.phi_mean - cfg.init.phi_amplitude) {
            fail_key("init.m_amplitude",
                     "must be <= phi_mean - phi_amplitude so that |m| <= phi");
        }
    } else if (type == "file") {
        expect_keys(init, "init", {"type", "path"});
        cfg.init.type = InitType::File;
        if (!init.contains("path") || !init.at("path").is_string()) {
            fail_key("init.path", "must be a string path");
        }
        cfg.init.path = init.at("path").get<std::string>();
    } else {
        fail_key("init.type", "must be \"spin_random\", \"sinusoid\" or \"file\"");
    }

    if (root.contains("output")) {
        const json& output = root.at("output");
        expect_keys(output, "output", {"dir"});
        if (output.contains("dir")) {
            if (!output.at("dir").is_string()) fail_key("output.dir", "must be a string path");
            cfg.output_dir = output.at("dir").get<std::string>();
        }
    }

    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

State make_initial_state(const RunConfig& cfg) {
    switch (cfg.init.type) {
        case InitType::SpinRandom:
            return random_ternary_init(cfg.init.solvent_ratio, cfg.init.seed, cfg.grid);
        case InitType::Sinusoid: {
            const double L = cfg.grid.length;
            const double two_pi = 2.0 * std::numbers::pi;
            State st;
            st.m = sample_field(
                [&](double x, double y) {
                    return cfg.init.m_amplitude * std::sin(two_pi * x / L) * std::sin(two_pi * y / L);
                },
                cfg.grid);
            st.phi = sample_field(
                [&](double x, double y) {
                    return cfg.init.phi_mean +
                           cfg.init.phi_amplitude * std::cos(two_pi * x / L) * std::cos(two_pi * y / L);
                },
                cfg.grid);
            return st;
        }
        case InitType::File: {
            State st = read_snapshot(cfg.init.path);
            if (!(st.m.spec == cfg.grid)) {
                throw ConfigError("init.path snapshot grid (n=" + std::to_string(st.m.spec.n) +
                                  ", L=" + std::to_string(st.m.spec.length) +
                                  ") does not match config grid (n=" + std::to_string(cfg.grid.n) +
                                  ", L=" + std::to_string(cfg.grid.length) + ")");
            }
            st.time = 0.0;
            st.step = 0;
            return st;
        }
    }
    throw ConfigError("unhandled init type");
}

// --- snapshot format --------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'N', 'L', 'P', 'S'};
constexpr unsigned char kVersion = 0x01;

void put_u32le(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_u64le(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_f64le(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64le(out, bits);
}

class ByteReader {
public:
    ByteReader(const std::string& bytes) : bytes_(bytes) {}

    std::size_t offset() const { return offset_; }

    void need(std::size_t count, const char* what) {
        if (offset_ + count > bytes_.size()) {
            throw FormatError(offset_, std::string("snapshot truncated while reading ") + what +
                                           " at byte offset " + std::to_string(offset_));
        }
    }

    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(bytes_[offset_++]);
    }

    std::uint32_t u32le(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) {
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[offset_ + b])) << (8 * b);
        }
        offset_ += 4;
        return v;
    }

    std::uint64_t u64le(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) {
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[offset_ + b])) << (8 * b);
        }
        offset_ += 8;
        return v;
    }

    double f64le(const char* what) {
        const std::uint64_t bits = u64le(what);
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

private:
    const std::string& bytes_;
    std::size_t offset_ = 0;
};

}  // namespace

void write_snapshot(const State& s, const std::filesystem::path& path) {
    std::string out;
    out.reserve(33 + 16 * s.m.size());
    out.append(kMagic, 4);
    out.push_back(static_cast<char>(kVersion));
    put_u32le(out, static_cast<std::uint32_t>(s.m.spec.n));
    put_f64le(out, s.m.spec.length);
    put_f64le(out, s.time);
    put_u64le(out, static_cast<std::uint64_t>(s.step));
    for (double v : s.m.data) put_f64le(out, v);
    for (double v : s.phi.data) put_f64le(out, v);

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open snapshot for writing: " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file.good()) throw IoError("failed writing snapshot: " + path.string());
}

State read_snapshot(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open snapshot for reading: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    ByteReader r(bytes);
    r.need(4, "magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError(0, "bad snapshot magic at byte offset 0 (expected \"NLPS\")");
    }
    for (int b = 0; b < 4; ++b) r.u8("magic");
    const std::uint8_t version = r.u8("version");
    if (version != kVersion) {
        throw FormatError(4, "unsupported snapshot version " + std::to_string(version) +
                                 " at byte offset 4");
    }
    const std::uint32_t n = r.u32le("grid size");
    const double length = r.f64le("domain length");
    if (n < 4 || n > (1u << 20)) {
        throw FormatError(5, "invalid snapshot grid size n = " + std::to_string(n));
    }
    if (!std::isfinite(length) || !(length > 0.0)) {
        throw FormatError(9, "invalid snapshot domain length");
    }
    State s;
    s.time = r.f64le("time");
    const std::uint64_t step = r.u64le("step");
    s.step = static_cast<long>(step);

    // size check up front so a corrupt header cannot trigger a huge allocation
    const std::uint64_t expected = 33ull + 16ull * n * n;
    if (bytes.size() != expected) {
        throw FormatError(r.offset(), "snapshot size " + std::to_string(bytes.size()) +
                                          " does not match header (expected " +
                                          std::to_string(expected) + " bytes for n = " +
                                          std::to_string(n) + ")");
    }

    const GridSpec spec = make_grid(static_cast<int>(n), length);
    s.m = Field(spec);
    s.phi = Field(spec);
    const std::size_t n2 = s.m.size();
    for (std::size_t k = 0; k < n2; ++k) s.m.data[k] = r.f64le("m payload");
    for (std::size_t k = 0; k < n2; ++k) s.phi.data[k] = r.f64le("phi payload");
    for (std::size_t k = 0; k < n2; ++k) {
        if (!std::isfinite(s.m.data[k]) || !std::isfinite(s.phi.data[k])) {
            throw FormatError(33 + 8 * k, "non-finite value in snapshot payload");
        }
    }
    return s;
}

// --- diagnostics CSV ----------------------------------------------------------

std::string diagnostics_csv_header() {
    return "step,time,solvent_ratio,l1_m_scaled,l1_phi_scaled,spin_balance,free_energy,"
           "mass_m,mass_phi,viol_m_phi,viol_phi_hi,viol_phi_lo";
}

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

void append_optional(std::string& out, const std::optional<double>& v) {
    if (v) append_double(out, *v);
}

}  // namespace

std::string format_diagnostics_row(const DiagnosticsRow& row) {
    std::string out;
    out += std::to_string(row.step);
    out += ',';
    append_double(out, row.time);
    out += ',';
    append_double(out, row.solvent_ratio);
    out += ',';
    append_optional(out, row.l1_m_scaled);
    out += ',';
    append_optional(out, row.l1_phi_scaled);
    out += ',';
    append_optional(out, row.spin_balance);
    out += ',';
    append_double(out, row.free_energy);
    out += ',';
    append_double(out, row.mass_m);
    out += ',';
    append_double(out, row.mass_phi);
    out += ',';
    append_double(out, row.viol_m_phi);
    out += ',';
    append_double(out, row.viol_phi_hi);
    out += ',';
    append_double(out, row.viol_phi_lo);
    return out;
}

void append_diagnostics_row(const DiagnosticsRow& row, const std::filesystem::path& path) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream file(path, std::ios::app);
    if (!file) throw IoError("cannot open diagnostics CSV for append: " + path.string());
    if (fresh) file << diagnostics_csv_header() << '\n';
    file << format_diagnostics_row(row) << '\n';
    if (!file.good()) throw IoError("failed writing diagnostics CSV: " + path.string());
}

// --- field rendering ----------------------------------------------------------

namespace {

unsigned char to_byte(double t) {
    const double v = std::lround(255.0 * std::min(1.0, std::max(0.0, t)));
    return static_cast<unsigned char>(v);
}

}  // namespace

void render_ppm(const Field& f, Palette palette, const std::filesystem::path& path) {
    const int n = f.spec.n;
    std::string out = "P6\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    out.reserve(out.size() + 3 * f.size());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double v = f.at(i, j);
            unsigned char r, g, b;
            if (palette == Palette::Spin) {
                const double t = std::min(1.0, std::max(-1.0, v));
                if (t >= 0.0) {
                    r = to_byte(1.0 - t);  // red -> blue
                    g = 0;
                    b = to_byte(t);
                } else {
                    r = 255;               // red -> yellow
                    g = to_byte(-t);
                    b = 0;
                }
            } else {
                const double t = std::min(1.0, std::max(0.0, v));
                r = to_byte(1.0 - t);  // red -> blue
                g = 0;
                b = to_byte(t);
            }
            out.push_back(static_cast<char>(r));
            out.push_back(static_cast<char>(g));
            out.push_back(static_cast<char>(b));
        }
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open image for writing: " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file.good()) throw IoError("failed writing image: " + path.string());
}

}  // namespace nlps
