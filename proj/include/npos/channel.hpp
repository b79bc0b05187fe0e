#pragma once

#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "npos/sim.hpp"

namespace npos::chan {

struct ChannelConfig {
    double carrier_freq = 5.18e9;  // Hz
    double bandwidth = 20e6;       // Hz
    int n_subcarriers = 52;        // W
    // Per-sample SNR in dB (mean tensor power over noise power). Infinity
    // disables the noise term.
    double noise_snr_db = std::numeric_limits<double>::infinity();
    double scatterer_gain = 1.0;
    std::uint64_t rng_seed = 2;

    double subcarrier_spacing() const { return bandwidth / n_subcarriers; }
    void validate() const;
};

struct CsiSample {
    int n_aps = 0;       // B
    int n_antennas = 0;  // A
    int n_subcarriers = 0;  // W
    // row-major over (b, a, w)
    std::vector<std::complex<double>> tensor;
    long sample_index = 0;

    std::size_t size() const { return tensor.size(); }
    std::complex<double>& at(int b, int a, int w) {
        return tensor[(static_cast<std::size_t>(b) * n_antennas + a) * n_subcarriers + w];
    }
    const std::complex<double>& at(int b, int a, int w) const {
        return tensor[(static_cast<std::size_t>(b) * n_antennas + a) * n_subcarriers + w];
    }
};

/// Geometric multipath response at one UE position: the LoS path (unless a
/// blocker segment cuts it) plus one single-bounce path per scatterer, with
/// optional complex Gaussian noise at the configured per-sample SNR. Pure in
/// (configs, position, sample_index); noise comes from a per-index substream
/// so samples can be produced in any order.
CsiSample synthesize_csi_sample(const sim::WorldConfig& world, const ChannelConfig& chan,
                                const Vec2& ue_position, long sample_index);

std::vector<CsiSample> synthesize_csi(const sim::WorldConfig& world, const ChannelConfig& chan,
                                      const sim::Trajectory& traj);

/// Keeps every factor-th subcarrier starting at index 0; W' = ceil(W/factor).
std::vector<CsiSample> downsample_subcarriers(const std::vector<CsiSample>& csi, int factor);
CsiSample downsample_subcarriers(const CsiSample& sample, int factor);

// Binary CSI container: magic "NPOS", version u32 LE, N+1, B, A, W u32 LE,
// then samples in time order, row-major over (b,a,w), interleaved re/im f32.
class CsiFileWriter {
public:
    CsiFileWriter(const std::string& path, std::uint32_t n_samples, std::uint32_t b,
                  std::uint32_t a, std::uint32_t w);
    void append(const CsiSample& sample);
    ~CsiFileWriter();

private:
    std::ofstream file_;
    std::uint32_t expected_;
    std::uint32_t written_ = 0;
    std::uint32_t b_, a_, w_;
};

/// Streaming reader; keeps one sample in memory at a time.
class CsiFileReader {
public:
    explicit CsiFileReader(const std::string& path);
    std::uint32_t count() const { return count_; }
    std::uint32_t aps() const { return b_; }
    std::uint32_t antennas() const { return a_; }
    std::uint32_t subcarriers() const { return w_; }
    /// False once all samples were read.
    bool next(CsiSample& out);

private:
    std::ifstream file_;
    std::uint32_t count_, b_, a_, w_;
    std::uint32_t read_ = 0;
    std::vector<float> buf_;
};

std::vector<CsiSample> load_csi_file(const std::string& path);
void save_csi_file(const std::string& path, const std::vector<CsiSample>& csi);

}  // namespace npos::chan
