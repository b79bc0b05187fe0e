#include "npos/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "npos/binio.hpp"
#include "npos/constants.hpp"
#include "npos/errors.hpp"
#include "npos/kernels.hpp"
#include "npos/rng.hpp"

namespace npos::chan {

void ChannelConfig::validate() const {
    if (n_subcarriers < 1) throw ConfigError("n_subcarriers must be >= 1");
    if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be > 0");
    if (!(carrier_freq > 0.0)) throw ConfigError("carrier_freq must be > 0");
}

namespace {

constexpr double kMinPathLength = 1e-9;  // m
constexpr std::size_t kPhasorBlock = 256;  // recurrence restart interval

bool los_blocked(const Vec2& ue, const Vec2& antenna, const std::vector<Segment>& blockers) {
    for (const Segment& s : blockers)
        if (segments_intersect(ue, antenna, s.a, s.b)) return true;
    return false;
}

// acc[w] += (g / len) * exp(-j 2 pi f_w len / c) for all w.
void add_path(double* acc, int n_sub, double spacing, double carrier, double gain_numer,
              double len, long sample_index) {
    if (len < kMinPathLength)
        throw std::runtime_error("degenerate propagation path (UE coincides with an antenna or "
                                 "scatterer) at sample " +
                                 std::to_string(sample_index));
    const double gain = gain_numer / len;
    const double tau = len / kSpeedOfLight;
    const double theta0 = -2.0 * M_PI * tau * (carrier - 0.5 * n_sub * spacing);
    const double dtheta = -2.0 * M_PI * tau * spacing;
    const double rot_re = std::cos(dtheta);
    const double rot_im = std::sin(dtheta);
    for (std::size_t w0 = 0; w0 < static_cast<std::size_t>(n_sub); w0 += kPhasorBlock) {
        const std::size_t len_block =
            std::min(kPhasorBlock, static_cast<std::size_t>(n_sub) - w0);
        const double theta = theta0 + static_cast<double>(w0) * dtheta;
        kern::rotacc(acc + 2 * w0, len_block, gain, std::cos(theta), std::sin(theta), rot_re,
                     rot_im);
    }
}

}  // namespace

CsiSample synthesize_csi_sample(const sim::WorldConfig& world, const ChannelConfig& chan,
                                const Vec2& ue, long sample_index) {
    const int b_count = static_cast<int>(world.num_aps());
    const int a_count = static_cast<int>(world.num_antennas());
    const int w_count = chan.n_subcarriers;

    CsiSample sample;
    sample.n_aps = b_count;
    sample.n_antennas = a_count;
    sample.n_subcarriers = w_count;
    sample.sample_index = sample_index;
    sample.tensor.assign(static_cast<std::size_t>(b_count) * a_count * w_count, {0.0, 0.0});

    const double spacing = chan.subcarrier_spacing();
    double* raw = reinterpret_cast<double*>(sample.tensor.data());

    for (int b = 0; b < b_count; ++b) {
        for (int a = 0; a < a_count; ++a) {
            const Vec2 antenna = world.ap_positions[b] + world.ap_antenna_offsets[a];
            double* acc = raw + 2 * ((static_cast<std::size_t>(b) * a_count + a) * w_count);
            if (!los_blocked(ue, antenna, world.blocker_segments)) {
                add_path(acc, w_count, spacing, chan.carrier_freq, 1.0, (antenna - ue).norm(),
                         sample_index);
            }
            for (const Vec2& sc : world.scatterer_positions) {
                const double len = (sc - ue).norm() + (antenna - sc).norm();
                add_path(acc, w_count, spacing, chan.carrier_freq, chan.scatterer_gain, len,
                         sample_index);
            }
        }
    }

    if (std::isfinite(chan.noise_snr_db)) {
        const std::size_t n = sample.tensor.size();
        const double power = kern::sumsq(raw, 2 * n) / static_cast<double>(n);
        if (power > 0.0) {
            const double noise_var = power / std::pow(10.0, chan.noise_snr_db / 10.0);
            const double sigma = std::sqrt(0.5 * noise_var);  // per real component
            Rng rng(mix_seed(chan.rng_seed, static_cast<std::uint64_t>(sample_index)));
            for (std::size_t i = 0; i < 2 * n; ++i) raw[i] += sigma * rng.normal();
        }
    }
    return sample;
}

std::vector<CsiSample> synthesize_csi(const sim::WorldConfig& world, const ChannelConfig& chan,
                                      const sim::Trajectory& traj) {
    world.validate();
    chan.validate();
    std::vector<CsiSample> out;
    out.reserve(traj.positions.size());
    for (std::size_t n = 0; n < traj.positions.size(); ++n)
        out.push_back(synthesize_csi_sample(world, chan, traj.positions[n], static_cast<long>(n)));
    return out;
}

CsiSample downsample_subcarriers(const CsiSample& s, int factor) {
    if (factor < 1) throw std::invalid_argument("downsampling factor must be >= 1");
    if (factor == 1) return s;
    const int w_out = (s.n_subcarriers + factor - 1) / factor;
    CsiSample out;
    out.n_aps = s.n_aps;
    out.n_antennas = s.n_antennas;
    out.n_subcarriers = w_out;
    out.sample_index = s.sample_index;
    out.tensor.reserve(static_cast<std::size_t>(s.n_aps) * s.n_antennas * w_out);
    for (int b = 0; b < s.n_aps; ++b)
        for (int a = 0; a < s.n_antennas; ++a)
            for (int w = 0; w < s.n_subcarriers; w += factor) out.tensor.push_back(s.at(b, a, w));
    return out;
}

std::vector<CsiSample> downsample_subcarriers(const std::vector<CsiSample>& csi, int factor) {
    std::vector<CsiSample> out;
    out.reserve(csi.size());
    for (const CsiSample& s : csi) out.push_back(downsample_subcarriers(s, factor));
    return out;
}

CsiFileWriter::CsiFileWriter(const std::string& path, std::uint32_t n_samples, std::uint32_t b,
                             std::uint32_t a, std::uint32_t w)
    : file_(io::open_out(path)), expected_(n_samples), b_(b), a_(a), w_(w) {
    file_.write("NPOS", 4);
    io::write_u32(file_, 1);  // format version
    io::write_u32(file_, n_samples);
    io::write_u32(file_, b);
    io::write_u32(file_, a);
    io::write_u32(file_, w);
}

void CsiFileWriter::append(const CsiSample& sample) {
    if (written_ >= expected_) throw std::logic_error("CSI writer: too many samples");
    if (sample.n_aps != static_cast<int>(b_) || sample.n_antennas != static_cast<int>(a_) ||
        sample.n_subcarriers != static_cast<int>(w_))
        throw std::logic_error("CSI writer: sample shape mismatch");
    std::vector<float> buf(2 * sample.tensor.size());
    for (std::size_t i = 0; i < sample.tensor.size(); ++i) {
        buf[2 * i] = static_cast<float>(sample.tensor[i].real());
        buf[2 * i + 1] = static_cast<float>(sample.tensor[i].imag());
    }
    io::write_f32_array(file_, buf.data(), buf.size());
    ++written_;
}

CsiFileWriter::~CsiFileWriter() = default;

void save_csi_file(const std::string& path, const std::vector<CsiSample>& csi) {
    if (csi.empty()) throw std::invalid_argument("cannot save an empty CSI sequence");
    CsiFileWriter w(path, static_cast<std::uint32_t>(csi.size()),
                    static_cast<std::uint32_t>(csi[0].n_aps),
                    static_cast<std::uint32_t>(csi[0].n_antennas),
                    static_cast<std::uint32_t>(csi[0].n_subcarriers));
    for (const CsiSample& s : csi) w.append(s);
}

CsiFileReader::CsiFileReader(const std::string& path) : file_(io::open_in(path)) {
    io::expect_magic(file_, "NPOS", "CSI");
    const std::uint32_t version = io::read_u32(file_);
    if (version != 1) throw std::runtime_error("unsupported CSI file version");
    count_ = io::read_u32(file_);
    b_ = io::read_u32(file_);
    a_ = io::read_u32(file_);
    w_ = io::read_u32(file_);
    buf_.resize(2 * static_cast<std::size_t>(b_) * a_ * w_);
}

bool CsiFileReader::next(CsiSample& out) {
    if (read_ >= count_) return false;
    io::read_f32_array(file_, buf_.data(), buf_.size());
    const std::size_t entries = buf_.size() / 2;
    out.n_aps = static_cast<int>(b_);
    out.n_antennas = static_cast<int>(a_);
    out.n_subcarriers = static_cast<int>(w_);
    out.sample_index = static_cast<long>(read_);
    out.tensor.resize(entries);
    for (std::size_t k = 0; k < entries; ++k)
        out.tensor[k] = {static_cast<double>(buf_[2 * k]), static_cast<double>(buf_[2 * k + 1])};
    ++read_;
    return true;
}

std::vector<CsiSample> load_csi_file(const std::string& path) {
    CsiFileReader reader(path);
    std::vector<CsiSample> out;
    out.reserve(reader.count());
    CsiSample s;
    while (reader.next(s)) out.push_back(s);
    return out;
}

}  // namespace npos::chan
