#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "npos/baselines.hpp"
#include "npos/channel.hpp"
#include "npos/features.hpp"
#include "npos/sim.hpp"

namespace npos::cfg {

/// INI-style key/value file: [section] headers, key = value lines, '#' or ';'
/// comments. Unknown sections or keys are schema violations.
class Ini {
public:
    static Ini parse_file(const std::string& path);
    static Ini parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct RunConfig {
    std::string name = "small_room";
    long n_samples = 30001;  // N + 1
    std::string out_dir = "out";
    int threads = 1;
};

/// Everything one experiment needs, resolvable to a stable hash. Seeds are
/// explicit; nothing is derived from the clock.
struct ExperimentConfig {
    RunConfig run;
    sim::WorldConfig world;
    sim::MotionModel motion;
    chan::ChannelConfig channel;
    int downsample_factor = 1;
    feat::AveragingPolicy averaging;
    int leap = 100;  // V
    double anchor_variance = 1.0;
    std::uint64_t split_seed = 3003;
    train::TrainConfig train;
    std::vector<std::string> methods = {"ours", "baseline1", "baseline2", "baseline3"};

    /// The default synthetic small-room scenario (B=3, A=4, W=52).
    static ExperimentConfig defaults();

    /// defaults() overlaid with the file's sections; unknown keys throw.
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_ini(const Ini& ini);

    /// Replaces every seed with a value derived from the master seed.
    void override_seeds(std::uint64_t master);

    void validate() const;

    /// Deterministic serialization of every semantic field.
    std::string canonical_string() const;
    /// FNV-1a over canonical_string().
    std::uint64_t config_hash() const;
    /// First 8 hex digits of the hash, used to tag artifacts.
    std::string hash_tag() const;
};

}  // namespace npos::cfg
