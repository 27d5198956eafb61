#include "specflow/cli/plot.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace specflow::cli {

namespace {

constexpr double kWidth = 640, kHeight = 400, kMargin = 48;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

SpectrumTrack sample_spectra(const OperatorCurve& curve, const Tolerances& tol) {
  SpectrumTrack track;
  track.t = curve.samples();
  for (const auto& op : curve.operators()) track.spectra.push_back(eigvalsh(op.matrix, tol));
  return track;
}

std::vector<Crossing> sampled_crossings(const SpectrumTrack& track) {
  std::vector<Crossing> out;
  auto negatives = [](const RealVector& s) {
    int n = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) n += s[i] < 0.0;
    return n;
  };
  for (std::size_t j = 0; j + 1 < track.t.size(); ++j) {
    const RealVector& a = track.spectra[j];
    const RealVector& b = track.spectra[j + 1];
    const int na = negatives(a), nb = negatives(b);
    const int lo = std::min(na, nb), hi = std::max(na, nb);
    for (int i = lo; i < hi; ++i) {
      const double denom = a[i] - b[i];
      const double s = denom != 0.0 ? std::clamp(a[i] / denom, 0.0, 1.0) : 0.5;
      out.push_back({track.t[j] + s * (track.t[j + 1] - track.t[j]), nb < na ? 1 : -1});
    }
  }
  return out;
}

std::string spectrum_svg(const SpectrumTrack& track, double window) {
  const double pw = kWidth - 2 * kMargin, ph = kHeight - 2 * kMargin;
  auto x = [&](double t) { return kMargin + t * pw; };
  auto y = [&](double v) { return kMargin + (window - v) / (2 * window) * ph; };
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  s += "<defs><clipPath id=\"plot\"><rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" +
       num(pw) + "\" height=\"" + num(ph) + "\"/></clipPath></defs>\n";
  s += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"#444\"/>\n";
  s += "<line x1=\"" + num(x(0)) + "\" y1=\"" + num(y(0)) + "\" x2=\"" + num(x(1)) + "\" y2=\"" + num(y(0)) +
       "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\" font-size=\"12\">t</text>\n";
  s += "<text x=\"" + num(kMargin - 6) + "\" y=\"" + num(y(window) + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
       num(window) + "</text>\n";
  s += "<text x=\"" + num(kMargin - 6) + "\" y=\"" + num(y(-window) + 4) +
       "\" text-anchor=\"end\" font-size=\"11\">" + num(-window) + "</text>\n";
  s += "<g clip-path=\"url(#plot)\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\">\n";
  if (!track.t.empty()) {
    const Eigen::Index n = track.spectra.front().size();
    for (Eigen::Index i = 0; i < n; ++i) {
      bool visible = false;
      for (const auto& sp : track.spectra) visible = visible || std::abs(sp[i]) <= window;
      if (!visible) continue;
      s += "<polyline points=\"";
      for (std::size_t j = 0; j < track.t.size(); ++j) {
        if (j) s += ' ';
        const double v = std::clamp(track.spectra[j][i], -2 * window, 2 * window);
        s += num(x(track.t[j])) + "," + num(y(v));
      }
      s += "\"/>\n";
    }
  }
  s += "</g>\n";
  for (const Crossing& c : sampled_crossings(track))
    s += "<circle cx=\"" + num(x(c.t)) + "\" cy=\"" + num(y(0)) + "\" r=\"4\" fill=\"" +
         (c.direction > 0 ? "#2166ac" : "#b2182b") + "\" class=\"" + (c.direction > 0 ? "up" : "down") + "\"/>\n";
  s += "</svg>\n";
  return s;
}

std::string spectrum_csv(const SpectrumTrack& track) {
  std::string s = "t";
  const Eigen::Index n = track.spectra.empty() ? 0 : track.spectra.front().size();
  for (Eigen::Index i = 0; i < n; ++i) s += ",lambda" + std::to_string(i);
  s += '\n';
  char buf[40];
  for (std::size_t j = 0; j < track.t.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", track.t[j]);
    s += buf;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", track.spectra[j][i]);
      s += buf;
    }
    s += '\n';
  }
  return s;
}

void plot_spectrum(const OperatorCurve& curve, const std::string& path, double window, const Tolerances& tol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << spectrum_svg(sample_spectra(curve, tol), window);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace specflow::cli
