#pragma once

#include <iosfwd>

#include "json.hpp"
#include "mpsim/config.hpp"
#include "mpsim/dynamics.hpp"
#include "mpsim/error.hpp"

namespace mpsim {

/// Builds the initial state described by cfg (initial data, vector
/// potential) and passes it through the model's band projection.
SimState build_initial_state(const Model& model, const RunConfig& cfg);

/// Divergence-free pair A = curl(g e_z) with a Gaussian profile g of the given
/// width centred at the origin, scaled so ||curl A||^2/(8 pi alpha^2) equals
/// field_energy.
VectorField make_scaling_field(const Spectral& spectral, double width, double alpha, double field_energy);

/// Runs cfg.experiment, writing manifest.json, series.csv, summary.json (and
/// the experiment's extra artifacts) into cfg.output_dir.  Returns the summary.
/// Progress lines go to log when non-null.
nlohmann::json run_experiment(const RunConfig& cfg, std::ostream* log = nullptr);

/// Process exit code for an error class (0 is success, 1 unclassified).
int exit_code(ErrorClass c);

/// {"error_class": ..., "message": ...}
nlohmann::json error_json(ErrorClass c, const std::string& message);

}  // namespace mpsim
