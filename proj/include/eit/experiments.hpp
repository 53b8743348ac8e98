#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eit/hamiltonian.hpp"
#include "eit/lindblad.hpp"

namespace eit {

// Detection intensity shared by all presets [W/cm^2].
inline constexpr double kDetectionIntensity = 12.7e-6;
// Protection intensity used by presets and loop/sweep experiments unless
// overridden [W/cm^2].
inline constexpr double kDefaultProtectionIntensity = 1e3;
// Photons needed to detect one atom.
inline constexpr double kPhotonsPerDetection = 100.0;

SchemeConfig scheme1();
SchemeConfig scheme2();
SchemeConfig scheme3();

// Scheme 1 fields on a truncated basis: {|4,0>, |5',1'>, |4'',1''>} (n = 3),
// plus |4',1'> (4), |3'',1''> (5) and |3',1'> (6). The cycling pair
// |4,4>, |5',5'> is always kept so that R has its denominator.
SchemeConfig toy_model(int n_levels);

// "scheme1", "scheme2", "scheme3", "toy3" ... "toy6"; ConfigError otherwise.
SchemeConfig scheme_preset(std::string_view name);
std::vector<std::string> preset_names();

// Suppression factor over a protection-intensity grid. The detected-state
// rate does not depend on the protection beam for the presets but is
// recomputed per point so each point stands alone.
struct SuppressionPoint {
  double intensity = 0.0;  // W/cm^2
  SuppressionResult result;
};

std::vector<SuppressionPoint> suppression_curve(const SchemeConfig& config,
                                                const std::vector<double>& intensities,
                                                const SuppressionOptions& options = {},
                                                unsigned threads = 1,
                                                const std::optional<StateLabel>& target = std::nullopt);

// Smallest R among points with intensity >= threshold (the plateau value).
double saturated_r(const std::vector<SuppressionPoint>& curve, double threshold = 1e3);

// Imaging interval that scatters `photons` detection photons at the
// detected state's steady rate.
double default_tau(const SchemeConfig& config, double photons = 10.0,
                   const SuppressionOptions& options = {});

struct ImagingLoopConfig {
  double tau = 0.0;  // s; 0 selects default_tau
  int inner_repeats = 3;
  int outer_cycles = 3;
  double pulse_fidelity = 1.0;
  double sample_every = 2e-9;
  EvolveOptions evolve{};

  void validate() const;
};

struct ImagingCycle {
  int cycle = 0;
  double photons = 0.0;          // detection photons in this outer cycle
  double p33 = 0.0, p43 = 0.0, p44 = 0.0;
  double leaked = 0.0;           // population outside {|3,3>,|4,3>,|4,4>}
  double trace = 0.0;
  // |4,4> share of the population retained in {|3,3>,|4,3>,|4,4>} right
  // before the closing |4,4> <-> |3,3> exchange.
  double pumped_fraction = 0.0;
};

struct ImagingLoopReport {
  double tau = 0.0;
  std::vector<ImagingCycle> cycles;
  double total_photons = 0.0;
  DensityMatrix final_state = DensityMatrix::unchecked(MatrixXc());
};

// Scheme 2 sequence: image for tau; `inner_repeats` times exchange
// |4,3> <-> |3,3> and image again; exchange |4,4> <-> |3,3>; repeat.
ImagingLoopReport imaging_loop(const SchemeConfig& config, const ImagingLoopConfig& loop);

struct SweepOptions {
  double duration = 3e-6;
  double sample_every = 2e-9;
  double photons = kPhotonsPerDetection;
  EvolveOptions evolve{};
};

struct SweepPoint {
  double x = 0.0;
  double error_per_detection = 0.0;  // transferred population per `photons` photons
  double transferred = 0.0;          // population in the error state at the end
  double photons_scattered = 0.0;
  double unprotected_population = 0.0;  // detected state at the end
};

struct SweepResult {
  std::string x_name;
  std::vector<SweepPoint> points;
};

enum class ImpureBeam { Protection, Detection };

// Moves `fraction` of the chosen beam's power into spherical component
// `wrong_q`, evolves the detected state and reports population transferred
// into `error_state` (|3,2> for Scheme 2) per detection.
SweepResult polarization_sweep(const SchemeConfig& config, ImpureBeam beam, int wrong_q,
                               const std::vector<double>& fractions, double magnetic_field,
                               const StateLabel& error_state, const SweepOptions& options = {},
                               unsigned threads = 1);

SweepResult field_sweep(const SchemeConfig& config, ImpureBeam beam, int wrong_q,
                        double fraction, const std::vector<double>& fields,
                        const StateLabel& error_state, const SweepOptions& options = {},
                        unsigned threads = 1);

struct Scheme3Point {
  double intensity = 0.0;
  double r_pi = 0.0;
  double r_sigma = 0.0;
  double leakage_error = 0.0;  // mF < 3 loss from |4,3> per detection
  double leaked = 0.0;         // mF < 3 population after tau
  double photons = 0.0;        // detection photons from |4,4> in tau
};

struct Scheme3Options {
  SuppressionOptions suppression{};
  double tau = 0.0;  // s; 0 selects default_tau
  double sigma_plus_share = 0.5;
  double photons = kPhotonsPerDetection;
};

std::vector<Scheme3Point> scheme3_analysis(const std::vector<double>& intensities,
                                           const Scheme3Options& options = {},
                                           unsigned threads = 1);

// Ideal-permutation bookkeeping for the qubit mapping sequence.
struct MappingReport {
  std::array<double, 2> initial{};  // (|3,0>, |4,0>)
  // Populations keyed by state after each named stage.
  struct Stage {
    std::string name;
    std::vector<std::pair<StateLabel, double>> populations;
  };
  std::vector<Stage> stages;
  std::array<double, 2> round_trip{};  // (|3,0>, |4,0>) after the reverse map
  bool stayed_in_protected_set = true;
};

// `populations` = (P(|3,0>), P(|4,0>)); must be non-negative and sum to 1.
MappingReport mapping_sequence_check(std::array<double, 2> populations);

// Swap list taking the clock states to the detection basis, applied in
// order; the reverse map applies it backwards.
std::vector<std::pair<StateLabel, StateLabel>> mapping_swaps();

}  // namespace eit
