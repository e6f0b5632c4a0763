#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "beamtrack/harness.hpp"

namespace beamtrack {

namespace {

using nlohmann::json;

std::vector<std::vector<std::string>> read_csv_file(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string sanitize_label(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (c == ':' || c == '=' || c == '/' || c == ' ') c = '_';
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

// Minimal line-chart writer; one panel per metric, slot index on the x axis.
class SvgChart {
 public:
  SvgChart(double width, double height) : width_(width), height_(height) {
    svg_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
         << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
         << height << "\">\n";
    svg_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  void panel(double x0, double y0, double w, double h, const std::string& title,
             const std::map<std::string, std::vector<double>>& curves) {
    double lo = 1e300, hi = -1e300;
    std::size_t max_len = 0;
    for (const auto& [name, ys] : curves) {
      for (double v : ys) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      max_len = std::max(max_len, ys.size());
    }
    if (max_len == 0) return;
    if (hi - lo < 1e-12) {
      hi += 0.5;
      lo -= 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    svg_ << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w
         << "\" height=\"" << h
         << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    svg_ << "<text x=\"" << x0 + 4 << "\" y=\"" << y0 - 6
         << "\" font-size=\"13\" font-family=\"sans-serif\">" << title
         << "</text>\n";
    svg_ << "<text x=\"" << x0 << "\" y=\"" << y0 + h + 14
         << "\" font-size=\"10\" font-family=\"sans-serif\">slot</text>\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", hi);
    svg_ << "<text x=\"" << x0 - 2 << "\" y=\"" << y0 + 10
         << "\" font-size=\"10\" text-anchor=\"end\" "
            "font-family=\"sans-serif\">"
         << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", lo);
    svg_ << "<text x=\"" << x0 - 2 << "\" y=\"" << y0 + h
         << "\" font-size=\"10\" text-anchor=\"end\" "
            "font-family=\"sans-serif\">"
         << buf << "</text>\n";

    int color = 0;
    double legend_y = y0 + 14;
    for (const auto& [name, ys] : curves) {
      const char* stroke = kPalette[color % 6];
      svg_ << "<polyline fill=\"none\" stroke=\"" << stroke
           << "\" stroke-width=\"1.3\" points=\"";
      for (std::size_t i = 0; i < ys.size(); ++i) {
        const double px = x0 + w * double(i) / double(max_len - 1 ? max_len - 1 : 1);
        const double py = y0 + h * (1.0 - (ys[i] - lo) / (hi - lo));
        svg_ << px << "," << py << " ";
      }
      svg_ << "\"/>\n";
      svg_ << "<text x=\"" << x0 + w - 4 << "\" y=\"" << legend_y
           << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << stroke
           << "\" font-family=\"sans-serif\">" << name << "</text>\n";
      legend_y += 13;
      ++color;
    }
  }

  void heatmap(double x0, double y0, double cell, int h_count, int v_count,
               const std::string& title, const std::vector<double>& values,
               const std::vector<int>& marked, int star_beam,
               const char* star_color) {
    double lo = 1e300, hi = -1e300;
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;

    svg_ << "<text x=\"" << x0 << "\" y=\"" << y0 - 6
         << "\" font-size=\"13\" font-family=\"sans-serif\">" << title
         << "</text>\n";
    for (int v = 0; v < v_count; ++v) {
      for (int h = 0; h < h_count; ++h) {
        const double val = values[v * h_count + h];
        const double t = (val - lo) / (hi - lo);
        const int r = int(255 * t);
        const int b = int(255 * (1.0 - t));
        const int g = int(80 + 60 * (1 - std::abs(2 * t - 1)));
        // elevation row 0 drawn at the bottom
        const double px = x0 + h * cell;
        const double py = y0 + (v_count - 1 - v) * cell;
        svg_ << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell
             << "\" height=\"" << cell << "\" fill=\"rgb(" << r << "," << g
             << "," << b << ")\"/>\n";
      }
    }
    for (int beam : marked) {
      const int h = beam % h_count;
      const int v = beam / h_count;
      const double cx = x0 + (h + 0.5) * cell;
      const double cy = y0 + (v_count - 1 - v + 0.5) * cell;
      svg_ << "<text x=\"" << cx << "\" y=\"" << cy + 4
           << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"white\" "
              "font-family=\"sans-serif\">x</text>\n";
    }
    if (star_beam >= 0) {
      const int h = star_beam % h_count;
      const int v = star_beam / h_count;
      const double cx = x0 + (h + 0.5) * cell;
      const double cy = y0 + (v_count - 1 - v + 0.5) * cell;
      svg_ << "<circle cx=\"" << cx << "\" cy=\"" << cy
           << "\" r=\"5\" fill=\"none\" stroke=\"" << star_color
           << "\" stroke-width=\"2\"/>\n";
    }
  }

  void write(const std::filesystem::path& file) {
    svg_ << "</svg>\n";
    std::ofstream out(file);
    out << svg_.str();
  }

 private:
  double width_, height_;
  std::ostringstream svg_;
};

std::vector<double> rolling_mean(const std::vector<double>& xs, int window) {
  std::vector<double> out(xs.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc += xs[i];
    if (i >= static_cast<std::size_t>(window)) acc -= xs[i - window];
    const int n = std::min<int>(window, static_cast<int>(i) + 1);
    out[i] = acc / n;
  }
  return out;
}

}  // namespace

std::filesystem::path emit_convergence_plot(const std::filesystem::path& run_dir,
                                            const std::string& policy_label,
                                            int rolling_window) {
  json manifest;
  {
    std::ifstream in(run_dir / "manifest.json");
    if (!in) throw std::runtime_error("plot: missing manifest.json");
    in >> manifest;
  }
  const int num_beams = manifest.at("num_beams").get<int>();
  const auto seeds = manifest.at("seeds").get<std::vector<std::uint64_t>>();
  const auto speeds = manifest.at("speed_classes").get<std::vector<std::string>>();
  const int horizon = manifest.at("horizon").get<int>();

  std::map<std::string, std::vector<double>> acc_curves, ovh_curves, err_curves;
  for (const auto& speed : speeds) {
    std::vector<double> acc(horizon, 0.0), ovh(horizon, 0.0), err(horizon, 0.0);
    int episodes = 0;
    for (auto seed : seeds) {
      const auto file = run_dir / "slots" /
                        (sanitize_label(policy_label) + "__" + speed +
                         "__seed" + std::to_string(seed) + ".csv");
      if (!std::filesystem::exists(file)) continue;
      const auto rows = read_csv_file(file);
      if (rows.size() < 2 || rows[0].size() < 6) {
        throw std::runtime_error("plot: missing columns in " + file.string());
      }
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const int slot = std::stoi(rows[i][0]);
        if (slot >= horizon) continue;
        const int chosen = std::stoi(rows[i][2]);
        const int true_best = std::stoi(rows[i][3]);
        const double chosen_rsrp = std::stod(rows[i][4]);
        const double best_rsrp = std::stod(rows[i][5]);
        acc[slot] +=
            (chosen == true_best || chosen_rsrp == best_rsrp) ? 1.0 : 0.0;
        ovh[slot] += std::stod(rows[i][1]) / num_beams;
        err[slot] += best_rsrp - chosen_rsrp;
      }
      ++episodes;
    }
    if (episodes == 0) continue;
    for (int t = 0; t < horizon; ++t) {
      acc[t] /= episodes;
      ovh[t] /= episodes;
      err[t] /= episodes;
    }
    acc_curves[speed] = rolling_mean(acc, rolling_window);
    ovh_curves[speed] = ovh;
    err_curves[speed] = rolling_mean(err, rolling_window);
  }
  if (acc_curves.empty()) {
    throw std::runtime_error("plot: no per-slot CSVs found for policy " +
                             policy_label);
  }

  SvgChart chart(760, 700);
  chart.panel(70, 40, 650, 170, "rolling accuracy: " + policy_label, acc_curves);
  chart.panel(70, 270, 650, 170, "per-slot overhead", ovh_curves);
  chart.panel(70, 500, 650, 170, "rolling RSRP error (dB)", err_curves);
  const auto file =
      run_dir / ("convergence_" + sanitize_label(policy_label) + ".svg");
  chart.write(file);
  return file;
}

std::vector<std::filesystem::path> emit_landscape_plots(
    const std::filesystem::path& run_dir,
    const std::vector<std::int64_t>& slots) {
  const auto snap_dir = run_dir / "snapshots";
  if (!std::filesystem::exists(snap_dir)) {
    throw std::runtime_error("plot: no snapshots/ directory in " +
                             run_dir.string());
  }
  std::vector<std::filesystem::path> written;
  for (auto slot : slots) {
    const std::string suffix = "__slot" + std::to_string(slot) + ".csv";
    std::filesystem::path found;
    for (const auto& entry : std::filesystem::directory_iterator(snap_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        found = entry.path();
        break;
      }
    }
    if (found.empty()) {
      throw std::runtime_error("plot: slot " + std::to_string(slot) +
                               " was not logged");
    }
    const auto rows = read_csv_file(found);
    int h_count = 0, v_count = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      h_count = std::max(h_count, std::stoi(rows[i][1]) + 1);
      v_count = std::max(v_count, std::stoi(rows[i][2]) + 1);
    }
    const int nb = h_count * v_count;
    std::vector<double> ei(nb), mean(nb), truth(nb);
    std::vector<int> proposed;
    int predicted_best = -1, true_best = -1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const int b = std::stoi(rows[i][0]);
      ei[b] = std::stod(rows[i][3]);
      mean[b] = std::stod(rows[i][4]);
      truth[b] = std::stod(rows[i][6]);
      if (std::stoi(rows[i][7]) != 0) proposed.push_back(b);
      if (std::stoi(rows[i][8]) != 0) predicted_best = b;
      if (std::stoi(rows[i][9]) != 0) true_best = b;
    }

    const double cell = 28.0;
    SvgChart chart(40 + h_count * cell, 3 * (v_count * cell + 50) + 20);
    double y = 40;
    chart.heatmap(20, y, cell, h_count, v_count,
                  "expected improvement (x = sampled)", ei, proposed, -1, "");
    y += v_count * cell + 50;
    chart.heatmap(20, y, cell, h_count, v_count,
                  "posterior mean (o = predicted best)", mean, {}, predicted_best,
                  "#00d000");
    y += v_count * cell + 50;
    chart.heatmap(20, y, cell, h_count, v_count, "true RSRP (o = true best)",
                  truth, {}, true_best, "#00c0ff");
    const auto file = run_dir / ("landscape_slot" + std::to_string(slot) + ".svg");
    chart.write(file);
    written.push_back(file);
  }
  return written;
}

}  // namespace beamtrack
