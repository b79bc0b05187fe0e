#include "npos/evalrep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "npos/binio.hpp"

namespace npos::eval {

std::vector<Vec2> predict(const mlp::Mlp<float>& model, const feat::FeatureMatrix& features,
                          std::span<const long> indices) {
    std::vector<Vec2> out;
    out.reserve(indices.size());
    mlp::MlpWorkspace<float> ws;
    std::vector<float> input;
    const int dim = features.dim;
    constexpr std::size_t kBatch = 512;
    for (std::size_t at = 0; at < indices.size(); at += kBatch) {
        const std::size_t end = std::min(indices.size(), at + kBatch);
        const std::size_t k = end - at;
        input.resize(k * static_cast<std::size_t>(dim));
        for (std::size_t i = 0; i < k; ++i)
            std::copy_n(features.row(indices[at + i]), dim,
                        input.data() + i * static_cast<std::size_t>(dim));
        const float* preds = mlp::forward(model, input.data(), static_cast<int>(k), ws);
        for (std::size_t i = 0; i < k; ++i)
            out.push_back({static_cast<double>(preds[2 * i]), static_cast<double>(preds[2 * i + 1])});
    }
    return out;
}

ErrorReport make_report(std::vector<double> errors, const std::string& method) {
    if (errors.empty()) throw std::invalid_argument("empty error list");
    ErrorReport r;
    r.method = method;
    r.per_sample_errors = std::move(errors);

    double sum = 0.0;
    for (double e : r.per_sample_errors) sum += e;
    r.mean = sum / static_cast<double>(r.per_sample_errors.size());

    std::vector<double> sorted = r.per_sample_errors;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    r.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    r.p95 = sorted[std::max<std::size_t>(rank, 1) - 1];
    return r;
}

ErrorReport evaluate(const mlp::Mlp<float>& model, const feat::FeatureMatrix& features,
                     std::span<const long> test_indices, std::span<const Vec2> ground_truth,
                     const std::string& method) {
    if (test_indices.empty()) throw std::invalid_argument("empty test set");
    const std::vector<Vec2> preds = predict(model, features, test_indices);
    std::vector<double> errors(test_indices.size());
    for (std::size_t i = 0; i < test_indices.size(); ++i)
        errors[i] = (preds[i] - ground_truth[static_cast<std::size_t>(test_indices[i])]).norm();
    return make_report(std::move(errors), method);
}

std::vector<std::pair<double, double>> empirical_cdf(const ErrorReport& report) {
    if (report.per_sample_errors.empty()) throw std::invalid_argument("empty error list");
    std::vector<double> sorted = report.per_sample_errors;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> cdf;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        // one step per distinct value, at the last occurrence
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
    }
    return cdf;
}

void save_results_csv(const std::string& path, std::span<const ErrorReport> reports) {
    auto f = io::open_out(path, false);
    f << "method,mean_m,median_m,p95_m\n";
    char buf[192];
    for (const ErrorReport& r : reports) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g\n", r.method.c_str(), r.mean, r.median,
                      r.p95);
        f << buf;
    }
}

void save_cdf_csv(const std::string& path, const ErrorReport& report) {
    auto f = io::open_out(path, false);
    f << "error_m,cum_prob\n";
    char buf[96];
    for (const auto& [err, prob] : empirical_cdf(report)) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", err, prob);
        f << buf;
    }
}

void save_sweep_csv(const std::string& path, const std::string& param,
                    std::span<const SweepRow> rows) {
    auto f = io::open_out(path, false);
    f << "param,value,mean_m,p95_m\n";
    char buf[160];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g\n", param.c_str(), r.value, r.mean,
                      r.p95);
        f << buf;
    }
}

namespace {

struct Bounds {
    double min_x = 0, max_x = 1, min_y = 0, max_y = 1;
    void grow(const Vec2& p) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
};

// error magnitude -> green..red
void error_color(double t, int& red, int& green) {
    t = std::clamp(t, 0.0, 1.0);
    red = static_cast<int>(255.0 * t);
    green = static_cast<int>(200.0 * (1.0 - t));
}

}  // namespace

void write_error_map_svg(const std::string& path, std::span<const Vec2> positions,
                         std::span<const double> errors, std::span<const Vec2> area_polygon) {
    if (positions.size() != errors.size()) throw std::invalid_argument("size mismatch");
    constexpr double kW = 640.0, kH = 640.0, kPad = 40.0;
    Bounds b;
    bool first = true;
    for (const Vec2& p : area_polygon) {
        if (first) {
            b = {p.x, p.x, p.y, p.y};
            first = false;
        } else {
            b.grow(p);
        }
    }
    for (const Vec2& p : positions) {
        if (first) {
            b = {p.x, p.x, p.y, p.y};
            first = false;
        } else {
            b.grow(p);
        }
    }
    const double span_x = std::max(1e-9, b.max_x - b.min_x);
    const double span_y = std::max(1e-9, b.max_y - b.min_y);
    const double scale = std::min((kW - 2 * kPad) / span_x, (kH - 2 * kPad) / span_y);
    auto sx = [&](double x) { return kPad + (x - b.min_x) * scale; };
    auto sy = [&](double y) { return kH - kPad - (y - b.min_y) * scale; };

    double max_err = 0.0;
    for (double e : errors) max_err = std::max(max_err, e);
    if (max_err <= 0.0) max_err = 1.0;

    auto f = io::open_out(path, false);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                  "viewBox=\"0 0 %g %g\">\n",
                  kW, kH, kW, kH);
    f << buf << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!area_polygon.empty()) {
        f << "<polygon points=\"";
        for (const Vec2& p : area_polygon) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(p.x), sy(p.y));
            f << buf;
        }
        f << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1.5\"/>\n";
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        int red = 0, green = 0;
        error_color(errors[i] / max_err, red, green);
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"rgb(%d,%d,40)\" "
                      "fill-opacity=\"0.7\"/>\n",
                      sx(positions[i].x), sy(positions[i].y), red, green);
        f << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.0f\" y=\"20\" font-size=\"13\">max error %.3f m</text>\n", kPad,
                  max_err);
    f << buf << "</svg>\n";
}

void write_cdf_svg(const std::string& path, std::span<const ErrorReport> reports) {
    constexpr double kW = 640.0, kH = 420.0, kPad = 50.0;
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    double max_err = 1e-9;
    for (const ErrorReport& r : reports)
        for (double e : r.per_sample_errors) max_err = std::max(max_err, e);

    auto f = io::open_out(path, false);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                  "viewBox=\"0 0 %g %g\">\n",
                  kW, kH, kW, kH);
    f << buf << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                  kPad, kH - kPad, kW - kPad, kH - kPad, kPad, kPad, kPad, kH - kPad);
    f << buf;
    auto sx = [&](double e) { return kPad + (e / max_err) * (kW - 2 * kPad); };
    auto sy = [&](double p) { return kH - kPad - p * (kH - 2 * kPad); };
    int color_i = 0;
    for (const ErrorReport& r : reports) {
        const auto cdf = empirical_cdf(r);
        f << "<polyline fill=\"none\" stroke=\"" << kColors[color_i % 5]
          << "\" stroke-width=\"1.5\" points=\"";
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(0.0), sy(0.0));
        f << buf;
        for (const auto& [err, prob] : cdf) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(err), sy(prob));
            f << buf;
        }
        f << "\"/>\n";
        std::snprintf(buf, sizeof(buf), "<text x=\"%g\" y=\"%g\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                      kW - kPad - 130.0, kPad + 16.0 * (color_i + 1), kColors[color_i % 5],
                      r.method.c_str());
        f << buf;
        ++color_i;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" font-size=\"12\">positioning error [m], max %.3f</text>\n",
                  kW / 2 - 80.0, kH - 14.0, max_err);
    f << buf << "</svg>\n";
}

}  // namespace npos::eval
