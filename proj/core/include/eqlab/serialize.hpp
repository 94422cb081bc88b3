#pragma once

#include <string>

#include "eqlab/couplings.hpp"
#include "eqlab/divergence.hpp"
#include "eqlab/harness.hpp"
#include "eqlab/two_sample.hpp"
#include "eqlab/wavelet.hpp"

namespace eqlab {

// JSON text for the report types. `indent` < 0 gives compact output.
// Non-finite numbers are written as null.
[[nodiscard]] std::string to_json(const HaarLadder& ladder, int indent = -1);
[[nodiscard]] std::string to_json(const ExperimentDraw& draw, int indent = -1);
[[nodiscard]] std::string to_json(const CouplingOutput& out, int indent = -1);
[[nodiscard]] std::string to_json(const DivergenceBreakdown& b, int indent = -1);
[[nodiscard]] std::string to_json(const BoundsReport& b, int indent = -1);
[[nodiscard]] std::string to_json(const SweepReport& s, int indent = -1);
[[nodiscard]] std::string to_json(const TwoSampleReport& r, int indent = -1);

// Inverse maps for the observation records; throw std::invalid_argument on
// malformed input.
[[nodiscard]] HaarLadder ladder_from_json(const std::string& text);
[[nodiscard]] ExperimentDraw draw_from_json(const std::string& text);

// One header line plus one line per grid point.
[[nodiscard]] std::string sweep_csv(const SweepReport& s);

}  // namespace eqlab
