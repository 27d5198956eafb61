#pragma once

// Eigenvalue trajectories of a curve as SVG and CSV.

#include <string>
#include <vector>

#include "specflow/flow.hpp"

namespace specflow::cli {

struct SpectrumTrack {
  std::vector<double> t;
  std::vector<RealVector> spectra;  // ascending at each t
};

SpectrumTrack sample_spectra(const OperatorCurve& curve, const Tolerances& tol = Tolerances::defaults());

/// Sampled sign changes of the sorted eigenvalues: direction +1 when an
/// eigenvalue goes from < 0 to >= 0. t is the linear-interpolated zero.
struct Crossing {
  double t = 0.0;
  int direction = 0;
};
std::vector<Crossing> sampled_crossings(const SpectrumTrack& track);

/// Trajectories in [-window, window], the zero line, and crossing markers
/// (upward blue, downward red). Output depends only on the input.
std::string spectrum_svg(const SpectrumTrack& track, double window);

/// One row per sample: t, then the eigenvalues.
std::string spectrum_csv(const SpectrumTrack& track);

/// Writes spectrum_svg of the sampled curve; throws std::runtime_error on I/O failure.
void plot_spectrum(const OperatorCurve& curve, const std::string& path, double window = 4.0,
                   const Tolerances& tol = Tolerances::defaults());

}  // namespace specflow::cli
