#include "npos/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "npos/errors.hpp"
#include "npos/rng.hpp"

namespace npos::cfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
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

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": not a number: '" + v + "'");
    }
}

long parse_long(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": not an integer: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& section, const std::string& key,
                        const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long d = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": not an unsigned integer: '" + v + "'");
    }
}

Vec2 parse_point(const std::string& section, const std::string& key, const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != 2) throw ConfigError("[" + section + "] " + key + ": expected 'x,y'");
    return {parse_double(section, key, parts[0]), parse_double(section, key, parts[1])};
}

std::vector<Vec2> parse_points(const std::string& section, const std::string& key,
                               const std::string& v) {
    std::vector<Vec2> out;
    if (trim(v).empty()) return out;
    for (const std::string& item : split(v, ';'))
        if (!item.empty()) out.push_back(parse_point(section, key, item));
    return out;
}

std::vector<Segment> parse_segments(const std::string& section, const std::string& key,
                                    const std::string& v) {
    std::vector<Segment> out;
    if (trim(v).empty()) return out;
    for (const std::string& item : split(v, ';')) {
        if (item.empty()) continue;
        const auto parts = split(item, ',');
        if (parts.size() != 4)
            throw ConfigError("[" + section + "] " + key + ": expected 'x1,y1,x2,y2'");
        out.push_back({{parse_double(section, key, parts[0]), parse_double(section, key, parts[1])},
                       {parse_double(section, key, parts[2]), parse_double(section, key, parts[3])}});
    }
    return out;
}

}  // namespace

Ini Ini::parse_string(const std::string& text, const std::string& origin) {
    Ini ini;
    std::istringstream in(text);
    std::string line, section;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            ini.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        ini.sections_[section][key] = value;
    }
    return ini;
}

Ini Ini::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw MissingFileError("missing config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str(), path);
}

bool Ini::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Ini::get(const std::string& section, const std::string& key) const {
    return sections_.at(section).at(key);
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.run = RunConfig{};

    c.world.area_polygon = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    c.world.ap_positions = {{-0.2, -0.2}, {2.2, -0.2}, {1.0, 2.2}};
    c.world.ap_antenna_offsets = {{0, 0}, {0.029, 0}, {0.058, 0}, {0.087, 0}};
    c.world.blocker_segments = {};
    c.world.dock_position = {0.2, 0.2};
    c.world.dock_heading = M_PI / 4.0;
    c.world.scatterer_positions = {{-0.4, 1.0}, {2.4, 0.8},  {1.1, -0.4},
                                   {0.9, 2.4},  {2.3, 2.3},  {-0.3, -0.3}};
    c.world.rng_seed = 1001;

    c.motion.forward_min = 0.05;
    c.motion.forward_max = 0.25;
    c.motion.rotate_min = -M_PI / 4.0;
    c.motion.rotate_max = M_PI / 4.0;
    c.motion.forward_bias = 0.95;
    c.motion.bias_compensation = 0.97;
    c.motion.forward_noise_std = 0.01;
    c.motion.rotate_noise_std = 0.02;
    c.motion.dock_return_period = 1000;

    c.channel.carrier_freq = 5.18e9;
    c.channel.bandwidth = 20e6;
    c.channel.n_subcarriers = 52;
    c.channel.noise_snr_db = 20.0;
    c.channel.scatterer_gain = 0.6;
    c.channel.rng_seed = 2002;
    c.downsample_factor = 1;

    c.averaging.mode = feat::AveragingMode::DisplacementDependent;
    c.averaging.fixed_len = 100;
    c.averaging.scale = 12.0;
    c.averaging.epsilon = 1e-3;

    c.leap = 100;
    c.anchor_variance = 1.0;
    c.split_seed = 3003;

    c.train.epochs = 15;
    c.train.batch_size = 256;
    c.train.adam = mlp::AdamConfig{};
    c.train.hidden_dims = {512, 256, 64};
    c.train.init_seed = 4004;
    c.train.shuffle_seed = 5005;
    c.train.vbar = 200;
    c.train.ref_ap = 0;
    c.train.tdoa_variance_ns2 = 3.0;
    c.train.tdoa_seed = 6006;

    c.methods = {"ours", "baseline1", "baseline2", "baseline3"};
    return c;
}

namespace {

// Section -> allowed keys; anything else is a schema violation.
const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"run", {"name", "n_samples", "out_dir", "threads"}},
        {"world",
         {"area_polygon", "ap_positions", "ap_antenna_offsets", "blockers", "scatterers", "dock",
          "dock_heading", "seed"}},
        {"motion",
         {"forward_range", "rotate_range", "forward_bias", "bias_compensation",
          "forward_noise_std", "rotate_noise_std", "dock_return_period"}},
        {"channel",
         {"carrier_freq", "bandwidth", "subcarriers", "downsample_factor", "noise_snr_db",
          "scatterer_gain", "seed"}},
        {"features", {"averaging", "fixed_window", "scale_a", "epsilon"}},
        {"dataset", {"leap", "anchor_variance", "split_seed"}},
        {"train",
         {"epochs", "batch_size", "learning_rate", "adam_beta1", "adam_beta2", "adam_eps",
          "decay_factor", "decay_every", "init_seed", "shuffle_seed", "methods"}},
        {"baseline2", {"vbar", "ref_ap", "tdoa_variance_ns2", "tdoa_seed"}},
    };
    return s;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_ini(const Ini& ini) {
    for (const auto& [section, keys] : ini.sections()) {
        const auto it = schema().find(section);
        if (it == schema().end()) throw ConfigError("unknown config section [" + section + "]");
        for (const auto& [key, value] : keys)
            if (!it->second.count(key))
                throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    }

    ExperimentConfig c = defaults();
    auto str = [&](const char* s, const char* k, std::string& out) {
        if (ini.has(s, k)) out = ini.get(s, k);
    };
    auto num = [&](const char* s, const char* k, double& out) {
        if (ini.has(s, k)) out = parse_double(s, k, ini.get(s, k));
    };
    auto integer = [&](const char* s, const char* k, auto& out) {
        if (ini.has(s, k)) out = static_cast<std::decay_t<decltype(out)>>(parse_long(s, k, ini.get(s, k)));
    };
    auto seed = [&](const char* s, const char* k, std::uint64_t& out) {
        if (ini.has(s, k)) out = parse_u64(s, k, ini.get(s, k));
    };
    auto pts = [&](const char* s, const char* k, std::vector<Vec2>& out) {
        if (ini.has(s, k)) out = parse_points(s, k, ini.get(s, k));
    };

    str("run", "name", c.run.name);
    integer("run", "n_samples", c.run.n_samples);
    str("run", "out_dir", c.run.out_dir);
    integer("run", "threads", c.run.threads);

    pts("world", "area_polygon", c.world.area_polygon);
    pts("world", "ap_positions", c.world.ap_positions);
    pts("world", "ap_antenna_offsets", c.world.ap_antenna_offsets);
    if (ini.has("world", "blockers"))
        c.world.blocker_segments = parse_segments("world", "blockers", ini.get("world", "blockers"));
    pts("world", "scatterers", c.world.scatterer_positions);
    if (ini.has("world", "dock"))
        c.world.dock_position = parse_point("world", "dock", ini.get("world", "dock"));
    num("world", "dock_heading", c.world.dock_heading);
    seed("world", "seed", c.world.rng_seed);

    if (ini.has("motion", "forward_range")) {
        const auto parts = split(ini.get("motion", "forward_range"), ',');
        if (parts.size() != 2) throw ConfigError("[motion] forward_range: expected 'min,max'");
        c.motion.forward_min = parse_double("motion", "forward_range", parts[0]);
        c.motion.forward_max = parse_double("motion", "forward_range", parts[1]);
    }
    if (ini.has("motion", "rotate_range")) {
        const auto parts = split(ini.get("motion", "rotate_range"), ',');
        if (parts.size() != 2) throw ConfigError("[motion] rotate_range: expected 'min,max'");
        c.motion.rotate_min = parse_double("motion", "rotate_range", parts[0]);
        c.motion.rotate_max = parse_double("motion", "rotate_range", parts[1]);
    }
    num("motion", "forward_bias", c.motion.forward_bias);
    num("motion", "bias_compensation", c.motion.bias_compensation);
    num("motion", "forward_noise_std", c.motion.forward_noise_std);
    num("motion", "rotate_noise_std", c.motion.rotate_noise_std);
    integer("motion", "dock_return_period", c.motion.dock_return_period);

    num("channel", "carrier_freq", c.channel.carrier_freq);
    num("channel", "bandwidth", c.channel.bandwidth);
    integer("channel", "subcarriers", c.channel.n_subcarriers);
    integer("channel", "downsample_factor", c.downsample_factor);
    if (ini.has("channel", "noise_snr_db")) {
        const std::string v = ini.get("channel", "noise_snr_db");
        c.channel.noise_snr_db = (v == "inf" || v == "off")
                                     ? std::numeric_limits<double>::infinity()
                                     : parse_double("channel", "noise_snr_db", v);
    }
    num("channel", "scatterer_gain", c.channel.scatterer_gain);
    seed("channel", "seed", c.channel.rng_seed);

    if (ini.has("features", "averaging")) {
        const std::string v = ini.get("features", "averaging");
        if (v == "none") c.averaging.mode = feat::AveragingMode::None;
        else if (v == "fixed") c.averaging.mode = feat::AveragingMode::Fixed;
        else if (v == "disp_dep") c.averaging.mode = feat::AveragingMode::DisplacementDependent;
        else throw ConfigError("[features] averaging: expected none|fixed|disp_dep, got '" + v + "'");
    }
    integer("features", "fixed_window", c.averaging.fixed_len);
    num("features", "scale_a", c.averaging.scale);
    num("features", "epsilon", c.averaging.epsilon);

    integer("dataset", "leap", c.leap);
    num("dataset", "anchor_variance", c.anchor_variance);
    seed("dataset", "split_seed", c.split_seed);

    integer("train", "epochs", c.train.epochs);
    integer("train", "batch_size", c.train.batch_size);
    num("train", "learning_rate", c.train.adam.lr0);
    num("train", "adam_beta1", c.train.adam.beta1);
    num("train", "adam_beta2", c.train.adam.beta2);
    num("train", "adam_eps", c.train.adam.eps);
    num("train", "decay_factor", c.train.adam.decay_factor);
    integer("train", "decay_every", c.train.adam.decay_every);
    seed("train", "init_seed", c.train.init_seed);
    seed("train", "shuffle_seed", c.train.shuffle_seed);
    if (ini.has("train", "methods")) {
        c.methods.clear();
        for (const std::string& m : split(ini.get("train", "methods"), ','))
            if (!m.empty()) c.methods.push_back(m);
    }

    integer("baseline2", "vbar", c.train.vbar);
    integer("baseline2", "ref_ap", c.train.ref_ap);
    num("baseline2", "tdoa_variance_ns2", c.train.tdoa_variance_ns2);
    seed("baseline2", "tdoa_seed", c.train.tdoa_seed);

    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_ini(Ini::parse_file(path));
}

void ExperimentConfig::override_seeds(std::uint64_t master) {
    world.rng_seed = mix_seed(master, 1);
    channel.rng_seed = mix_seed(master, 2);
    split_seed = mix_seed(master, 3);
    train.init_seed = mix_seed(master, 4);
    train.shuffle_seed = mix_seed(master, 5);
    train.tdoa_seed = mix_seed(master, 6);
}

void ExperimentConfig::validate() const {
    try {
        world.validate();
        motion.validate();
        channel.validate();
        averaging.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (run.n_samples < 5) throw ConfigError("[run] n_samples must be >= 5");
    if (run.threads < 1) throw ConfigError("[run] threads must be >= 1");
    if (downsample_factor < 1) throw ConfigError("[channel] downsample_factor must be >= 1");
    if (leap < 1) throw ConfigError("[dataset] leap must be >= 1");
    if (!(anchor_variance > 0.0)) throw ConfigError("[dataset] anchor_variance must be > 0");
    if (train.epochs < 1) throw ConfigError("[train] epochs must be >= 1");
    if (train.batch_size < 1) throw ConfigError("[train] batch_size must be >= 1");
    if (train.vbar < 1) throw ConfigError("[baseline2] vbar must be >= 1");
    if (train.ref_ap < 0 || train.ref_ap >= static_cast<int>(world.ap_positions.size()))
        throw ConfigError("[baseline2] ref_ap out of range");
    if (methods.empty()) throw ConfigError("[train] methods must not be empty");
    for (const std::string& m : methods)
        if (m != "ours" && m != "baseline1" && m != "baseline2" && m != "baseline3")
            throw UnknownMethodError("unknown method '" + m + "'");
}

std::string ExperimentConfig::canonical_string() const {
    std::ostringstream os;
    char buf[160];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, v);
        os << buf;
    };
    auto put_pts = [&](const char* key, const std::vector<Vec2>& pts) {
        os << key << '=';
        for (const Vec2& p : pts) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g;", p.x, p.y);
            os << buf;
        }
        os << '\n';
    };
    os << "name=" << run.name << '\n';
    os << "n_samples=" << run.n_samples << '\n';
    put_pts("area_polygon", world.area_polygon);
    put_pts("ap_positions", world.ap_positions);
    put_pts("ap_antenna_offsets", world.ap_antenna_offsets);
    os << "blockers=";
    for (const Segment& s : world.blocker_segments) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g;", s.a.x, s.a.y, s.b.x, s.b.y);
        os << buf;
    }
    os << '\n';
    put_pts("scatterers", world.scatterer_positions);
    put("dock_x", world.dock_position.x);
    put("dock_y", world.dock_position.y);
    put("dock_heading", world.dock_heading);
    os << "world_seed=" << world.rng_seed << '\n';
    put("forward_min", motion.forward_min);
    put("forward_max", motion.forward_max);
    put("rotate_min", motion.rotate_min);
    put("rotate_max", motion.rotate_max);
    put("forward_bias", motion.forward_bias);
    put("bias_compensation", motion.bias_compensation);
    put("forward_noise_std", motion.forward_noise_std);
    put("rotate_noise_std", motion.rotate_noise_std);
    os << "dock_return_period=" << motion.dock_return_period << '\n';
    put("carrier_freq", channel.carrier_freq);
    put("bandwidth", channel.bandwidth);
    os << "subcarriers=" << channel.n_subcarriers << '\n';
    os << "downsample_factor=" << downsample_factor << '\n';
    put("noise_snr_db", channel.noise_snr_db);
    put("scatterer_gain", channel.scatterer_gain);
    os << "channel_seed=" << channel.rng_seed << '\n';
    os << "averaging=" << static_cast<int>(averaging.mode) << '\n';
    os << "fixed_window=" << averaging.fixed_len << '\n';
    put("scale_a", averaging.scale);
    put("epsilon", averaging.epsilon);
    os << "leap=" << leap << '\n';
    put("anchor_variance", anchor_variance);
    os << "split_seed=" << split_seed << '\n';
    os << "epochs=" << train.epochs << '\n';
    os << "batch_size=" << train.batch_size << '\n';
    put("learning_rate", train.adam.lr0);
    put("adam_beta1", train.adam.beta1);
    put("adam_beta2", train.adam.beta2);
    put("adam_eps", train.adam.eps);
    put("decay_factor", train.adam.decay_factor);
    os << "decay_every=" << train.adam.decay_every << '\n';
    os << "hidden=";
    for (int h : train.hidden_dims) os << h << ',';
    os << '\n';
    os << "init_seed=" << train.init_seed << '\n';
    os << "shuffle_seed=" << train.shuffle_seed << '\n';
    os << "vbar=" << train.vbar << '\n';
    os << "ref_ap=" << train.ref_ap << '\n';
    put("tdoa_variance_ns2", train.tdoa_variance_ns2);
    os << "tdoa_seed=" << train.tdoa_seed << '\n';
    os << "methods=";
    for (const std::string& m : methods) os << m << ',';
    os << '\n';
    return os.str();
}

std::uint64_t ExperimentConfig::config_hash() const {
    const std::string s = canonical_string();
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string ExperimentConfig::hash_tag() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%08x",
                  static_cast<unsigned>(config_hash() & 0xFFFFFFFFu));
    return buf;
}

}  // namespace npos::cfg
