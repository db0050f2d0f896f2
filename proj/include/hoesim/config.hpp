#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hoesim/errors.hpp"
#include "hoesim/grating.hpp"
#include "hoesim/io.hpp"
#include "hoesim/paraxial.hpp"
#include "hoesim/pipeline.hpp"
#include "hoesim/scene.hpp"
#include "hoesim/units.hpp"

namespace hoesim {

// Run configuration. The file format is a sectioned key = value text file
// (full schema in the README); lengths are centimetres and wavelengths
// nanometres at this boundary, converted to metres exactly once, here.
// Unknown sections or keys are rejected with the offending line number.

struct ChannelConfig {
    WavelengthChannel channel; // q in metres after parsing
    double theta = 0.0;        // rad
    std::optional<double> r0;  // m, optional override of the derived focal length
};

struct SceneConfig {
    enum class Kind { BuiltinLetters, BuiltinPoint, Files };
    Kind kind = Kind::BuiltinLetters;
    std::map<std::string, std::string> files; // channel -> PGM path
    double letter_height = 112e-6;            // m
    std::vector<double> offsets_x;            // m, per channel
    std::optional<std::uint64_t> random_phase_seed;
};

struct DetuningSweepConfig {
    bool by_lambda = true;
    double min = 0.0; // m or rad
    double max = 0.0;
    int steps = 1;
};

struct GratingConfig {
    SharedGratingMaterial material;
    std::optional<LayerStack> stack;
    bool compensate = false;
    std::optional<DetuningSweepConfig> sweep;
};

struct RunConfig {
    SystemGeometry geometry; // m
    GridSpec grid;
    std::vector<ChannelConfig> channels;
    SceneConfig scene;
    std::vector<double> distances; // m
    int tradeoff_steps = 25;
    GratingConfig grating;
    std::string output_dir = "out";

    static RunConfig desk_default() {
        RunConfig cfg;
        DeskPreset pre = desk_preset();
        cfg.geometry = pre.geometry;
        cfg.grid = pre.grid;
        for (const auto &ch : pre.channels)
            cfg.channels.push_back(ChannelConfig{ch, 0.0, std::nullopt});
        cfg.distances = pre.distances;
        cfg.scene.offsets_x = {-0.25e-3, 0.05e-3, 0.0};
        return cfg;
    }
};

namespace cfgdetail {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct Section {
    std::string name;
    int line = 0;
    std::map<std::string, Entry> entries;
};

inline std::string trim(const std::string &s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

class Parsed {
public:
    Parsed(const std::string &path) : path_(path) {
        std::ifstream is(path);
        if (!is)
            throw ConfigError(path, 0, "cannot open configuration file");
        std::string line;
        int lineno = 0;
        Section *cur = nullptr;
        while (std::getline(is, line)) {
            ++lineno;
            // Full-line comments and trailing " #"/" ;" comments.
            std::string s = line;
            if (size_t pos = s.find_first_not_of(" \t"); pos != std::string::npos &&
                                                         (s[pos] == '#' || s[pos] == ';'))
                s.clear();
            for (const char *marker : {" #", "\t#", " ;", "\t;"})
                if (size_t pos = s.find(marker); pos != std::string::npos)
                    s = s.substr(0, pos);
            s = trim(s);
            if (s.empty())
                continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError(path_, lineno, "malformed section header");
                sections_.push_back(Section{trim(s.substr(1, s.size() - 2)), lineno, {}});
                cur = &sections_.back();
                continue;
            }
            size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path_, lineno, "expected 'key = value'");
            if (!cur)
                throw ConfigError(path_, lineno, "key outside of any [section]");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError(path_, lineno, "empty key");
            if (cur->entries.count(key))
                throw ConfigError(path_, lineno, "duplicate key '" + key + "' in [" + cur->name + "]");
            cur->entries[key] = Entry{value, lineno, false};
        }
    }

    const std::string &path() const { return path_; }
    std::vector<Section> &sections() { return sections_; }

    Section *find(const std::string &name) {
        for (auto &s : sections_)
            if (s.name == name)
                return &s;
        return nullptr;
    }

    // After consuming everything we know, any untouched key is a schema error.
    void reject_unknown(const Section &s, const std::set<std::string> &allowed) const {
        for (const auto &[key, entry] : s.entries)
            if (!allowed.count(key))
                throw ConfigError(path_, entry.line,
                                  "unknown key '" + key + "' in [" + s.name + "]");
    }

    double number(const Section &s, const std::string &key, int line_for_missing) const {
        const Entry &e = require(s, key, line_for_missing);
        return to_number(e);
    }

    double number_or(const Section &s, const std::string &key, double fallback) const {
        auto it = s.entries.find(key);
        if (it == s.entries.end())
            return fallback;
        return to_number(it->second);
    }

    int integer(const Section &s, const std::string &key, int line_for_missing) const {
        const double v = number(s, key, line_for_missing);
        if (v != static_cast<long long>(v))
            throw ConfigError(path_, s.entries.at(key).line, "'" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    int integer_or(const Section &s, const std::string &key, int fallback) const {
        auto it = s.entries.find(key);
        if (it == s.entries.end())
            return fallback;
        const double v = to_number(it->second);
        if (v != static_cast<long long>(v))
            throw ConfigError(path_, it->second.line, "'" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    std::string text_or(const Section &s, const std::string &key,
                        const std::string &fallback) const {
        auto it = s.entries.find(key);
        return it == s.entries.end() ? fallback : it->second.value;
    }

    std::vector<double> number_list(const Section &s, const std::string &key,
                                    int line_for_missing) const {
        const Entry &e = require(s, key, line_for_missing);
        std::vector<double> out;
        for (const std::string &tok : split(e.value, ',')) {
            if (tok.empty())
                throw ConfigError(path_, e.line, "empty element in list '" + key + "'");
            out.push_back(to_number_token(tok, e.line, key));
        }
        return out;
    }

    bool has(const Section &s, const std::string &key) const { return s.entries.count(key) > 0; }
    int line_of(const Section &s, const std::string &key) const { return s.entries.at(key).line; }

private:
    const Entry &require(const Section &s, const std::string &key, int line_for_missing) const {
        auto it = s.entries.find(key);
        if (it == s.entries.end())
            throw ConfigError(path_, line_for_missing,
                              "missing required key '" + key + "' in [" + s.name + "]");
        return it->second;
    }

    double to_number(const Entry &e) const { return to_number_token(e.value, e.line, ""); }

    double to_number_token(const std::string &tok, int line, const std::string &key) const {
        try {
            size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception &) {
            throw ConfigError(path_, line,
                              "'" + tok + "' is not a number" +
                                  (key.empty() ? "" : " (key '" + key + "')"));
        }
    }

    std::string path_;
    std::vector<Section> sections_;
};

} // namespace cfgdetail

// Parse and validate a configuration file. Missing sections fall back to the
// built-in desk-scale preset so a minimal file stays runnable.
inline RunConfig load_config(const std::string &path) {
    using namespace cfgdetail;
    RunConfig cfg = RunConfig::desk_default();
    Parsed p(path);

    static const std::set<std::string> known_sections = {
        "geometry", "grid", "scene", "simulate", "sweep.tradeoff", "sweep.detuning",
        "grating",  "output"};

    bool saw_channel_section = false;
    for (auto &s : p.sections()) {
        if (s.name.rfind("channel.", 0) == 0) {
            saw_channel_section = true;
            continue;
        }
        if (!known_sections.count(s.name))
            throw ConfigError(p.path(), s.line, "unknown section [" + s.name + "]");
    }

    if (auto *s = p.find("geometry")) {
        p.reject_unknown(*s, {"p_cm", "d_cm", "aperture_w_cm", "aperture_h_cm", "diffuser_w_cm",
                              "diffuser_h_cm"});
        cfg.geometry.p = cm_to_m(p.number(*s, "p_cm", s->line));
        cfg.geometry.d = cm_to_m(p.number(*s, "d_cm", s->line));
        cfg.geometry.aperture_w = cm_to_m(p.number(*s, "aperture_w_cm", s->line));
        cfg.geometry.aperture_h = cm_to_m(p.number(*s, "aperture_h_cm", s->line));
        cfg.geometry.diffuser_w = cm_to_m(p.number(*s, "diffuser_w_cm", s->line));
        cfg.geometry.diffuser_h = cm_to_m(p.number(*s, "diffuser_h_cm", s->line));
        try {
            cfg.geometry.validate();
        } catch (const DomainError &e) {
            throw ConfigError(p.path(), s->line, e.what());
        }
    }

    if (auto *s = p.find("grid")) {
        p.reject_unknown(*s, {"nx", "ny", "pitch_cm"});
        cfg.grid.nx = p.integer(*s, "nx", s->line);
        cfg.grid.ny = p.integer(*s, "ny", s->line);
        cfg.grid.pitch = cm_to_m(p.number(*s, "pitch_cm", s->line));
        try {
            cfg.grid.validate();
        } catch (const DomainError &e) {
            throw ConfigError(p.path(), s->line, e.what());
        }
    }

    if (saw_channel_section) {
        cfg.channels.clear();
        for (auto &s : p.sections()) {
            if (s.name.rfind("channel.", 0) != 0)
                continue;
            p.reject_unknown(s, {"lambda_record_nm", "lambda_replay_nm", "q_cm", "theta_deg",
                                 "r0_cm"});
            ChannelConfig cc;
            cc.channel.name = s.name.substr(8);
            if (cc.channel.name.empty())
                throw ConfigError(p.path(), s.line, "channel section needs a name suffix");
            cc.channel.lambda_record = p.number(s, "lambda_record_nm", s.line);
            cc.channel.lambda_replay = p.number(s, "lambda_replay_nm", s.line);
            cc.channel.q = cm_to_m(p.number(s, "q_cm", s.line));
            cc.theta = deg_to_rad(p.number_or(s, "theta_deg", 0.0));
            if (p.has(s, "r0_cm"))
                cc.r0 = cm_to_m(p.number(s, "r0_cm", s.line));
            try {
                cc.channel.validate();
            } catch (const DomainError &e) {
                throw ConfigError(p.path(), s.line, e.what());
            }
            cfg.channels.push_back(std::move(cc));
        }
        if (cfg.channels.empty())
            throw ConfigError(p.path(), 0, "no [channel.*] sections define a channel");
    }

    if (auto *s = p.find("scene")) {
        p.reject_unknown(*s, {"image", "image_red", "image_green", "image_blue",
                              "letter_height_cm", "offsets_x_cm", "random_phase"});
        const std::string image = p.text_or(*s, "image", "builtin:letters");
        if (image == "builtin:letters") {
            cfg.scene.kind = SceneConfig::Kind::BuiltinLetters;
        } else if (image == "builtin:point") {
            cfg.scene.kind = SceneConfig::Kind::BuiltinPoint;
        } else if (image == "files") {
            cfg.scene.kind = SceneConfig::Kind::Files;
            for (const auto &cc : cfg.channels) {
                const std::string key = "image_" + cc.channel.name;
                if (!p.has(*s, key))
                    throw ConfigError(p.path(), s->line,
                                      "scene 'files' needs key '" + key + "'");
                cfg.scene.files[cc.channel.name] = p.text_or(*s, key, "");
            }
        } else {
            throw ConfigError(p.path(), s->line,
                              "scene image must be builtin:letters, builtin:point or files");
        }
        cfg.scene.letter_height = cm_to_m(p.number_or(*s, "letter_height_cm", 0.0112));
        if (p.has(*s, "offsets_x_cm")) {
            std::vector<double> off = p.number_list(*s, "offsets_x_cm", s->line);
            if (off.size() != cfg.channels.size())
                throw ConfigError(p.path(), p.line_of(*s, "offsets_x_cm"),
                                  "offsets_x_cm needs one value per channel");
            cfg.scene.offsets_x.clear();
            for (double v : off)
                cfg.scene.offsets_x.push_back(cm_to_m(v));
        }
        const std::string rp = p.text_or(*s, "random_phase", "off");
        if (rp != "off") {
            try {
                size_t used = 0;
                cfg.scene.random_phase_seed = std::stoull(rp, &used);
                if (used != rp.size())
                    throw std::invalid_argument("junk");
            } catch (const std::exception &) {
                throw ConfigError(p.path(), p.line_of(*s, "random_phase"),
                                  "random_phase must be 'off' or an unsigned seed");
            }
        }
    }
    if (cfg.scene.offsets_x.size() != cfg.channels.size())
        cfg.scene.offsets_x.assign(cfg.channels.size(), 0.0);

    if (auto *s = p.find("simulate")) {
        p.reject_unknown(*s, {"distances_cm"});
        cfg.distances.clear();
        for (double v : p.number_list(*s, "distances_cm", s->line))
            cfg.distances.push_back(cm_to_m(v));
        if (cfg.distances.empty())
            throw ConfigError(p.path(), s->line, "distances_cm must not be empty");
        for (size_t i = 1; i < cfg.distances.size(); ++i)
            if (cfg.distances[i] <= cfg.distances[i - 1])
                throw ConfigError(p.path(), p.line_of(*s, "distances_cm"),
                                  "distances_cm must be strictly increasing");
    }

    if (auto *s = p.find("sweep.tradeoff")) {
        p.reject_unknown(*s, {"steps"});
        cfg.tradeoff_steps = p.integer_or(*s, "steps", 25);
        if (cfg.tradeoff_steps < 2)
            throw ConfigError(p.path(), s->line, "tradeoff steps must be >= 2");
    }

    if (auto *s = p.find("sweep.detuning")) {
        p.reject_unknown(*s, {"kind", "min_nm", "max_nm", "min_deg", "max_deg", "steps"});
        DetuningSweepConfig sw;
        const std::string kind = p.text_or(*s, "kind", "lambda");
        sw.steps = p.integer_or(*s, "steps", 81);
        if (sw.steps < 1)
            throw ConfigError(p.path(), s->line, "detuning steps must be >= 1");
        if (kind == "lambda") {
            sw.by_lambda = true;
            sw.min = nm_to_m(p.number(*s, "min_nm", s->line));
            sw.max = nm_to_m(p.number(*s, "max_nm", s->line));
        } else if (kind == "theta") {
            sw.by_lambda = false;
            sw.min = deg_to_rad(p.number(*s, "min_deg", s->line));
            sw.max = deg_to_rad(p.number(*s, "max_deg", s->line));
        } else {
            throw ConfigError(p.path(), s->line, "detuning kind must be lambda or theta");
        }
        if (sw.max < sw.min)
            throw ConfigError(p.path(), s->line, "detuning sweep needs min <= max");
        cfg.grating.sweep = sw;
    }

    if (auto *s = p.find("grating")) {
        p.reject_unknown(*s, {"nu", "n0", "thickness_cm", "grating_tilt_deg", "theta0_deg", "c_r",
                              "c_s", "t_glass", "t_layer", "n_layers", "compensate"});
        SharedGratingMaterial &m = cfg.grating.material;
        m.nu = p.number_or(*s, "nu", m.nu);
        m.n0 = p.number_or(*s, "n0", m.n0);
        m.thickness = cm_to_m(p.number_or(*s, "thickness_cm", m_to_cm(m.thickness)));
        m.grating_tilt = deg_to_rad(p.number_or(*s, "grating_tilt_deg", rad_to_deg(m.grating_tilt)));
        m.theta0 = deg_to_rad(p.number_or(*s, "theta0_deg", rad_to_deg(m.theta0)));
        m.c_r = p.number_or(*s, "c_r", std::cos(m.theta0));
        m.c_s = p.number_or(*s, "c_s", std::cos(m.theta0));
        if (p.has(*s, "t_glass") || p.has(*s, "t_layer") || p.has(*s, "n_layers")) {
            LayerStack stack;
            stack.t_glass = p.number(*s, "t_glass", s->line);
            stack.t_layer = p.number(*s, "t_layer", s->line);
            stack.n_layers = p.integer(*s, "n_layers", s->line);
            try {
                stack.validate();
            } catch (const DomainError &e) {
                throw ConfigError(p.path(), s->line, e.what());
            }
            cfg.grating.stack = stack;
        }
        const std::string comp = p.text_or(*s, "compensate", "off");
        if (comp == "on")
            cfg.grating.compensate = true;
        else if (comp == "off")
            cfg.grating.compensate = false;
        else
            throw ConfigError(p.path(), p.line_of(*s, "compensate"),
                              "compensate must be on or off");
    }

    if (auto *s = p.find("output")) {
        p.reject_unknown(*s, {"dir"});
        cfg.output_dir = p.text_or(*s, "dir", cfg.output_dir);
    }

    return cfg;
}

// Scene construction from a validated configuration.
inline SceneSpec build_scene(const RunConfig &cfg) {
    std::vector<std::string> names;
    for (const auto &cc : cfg.channels)
        names.push_back(cc.channel.name);
    SceneSpec scene;
    switch (cfg.scene.kind) {
    case SceneConfig::Kind::BuiltinLetters:
        scene = letters_scene(cfg.geometry.diffuser_w, cfg.geometry.diffuser_h, cfg.grid.pitch,
                              cfg.scene.letter_height, names, cfg.scene.offsets_x);
        break;
    case SceneConfig::Kind::BuiltinPoint:
        scene = point_scene(cfg.grid.pitch, names);
        break;
    case SceneConfig::Kind::Files: {
        scene.diffuser_w = cfg.geometry.diffuser_w;
        scene.diffuser_h = cfg.geometry.diffuser_h;
        size_t i = 0;
        for (const auto &cc : cfg.channels) {
            SceneSpec::ChannelImage ci;
            ci.channel = cc.channel.name;
            ci.image = io::read_pgm(cfg.scene.files.at(cc.channel.name));
            ci.offset_x = i < cfg.scene.offsets_x.size() ? cfg.scene.offsets_x[i] : 0.0;
            scene.images.push_back(std::move(ci));
            ++i;
        }
        break;
    }
    }
    scene.random_phase_seed = cfg.scene.random_phase_seed;
    return scene;
}

} // namespace hoesim
