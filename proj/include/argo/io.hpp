#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "argo/dataset.hpp"
#include "argo/empirical.hpp"
#include "argo/fit.hpp"
#include "argo/predict.hpp"
#include "argo/simulate.hpp"

namespace argo {

// Shortest decimal string that parses back to the identical double.
std::string format_double(double v);

// 64-bit FNV-1a of the bytes, lowercase hex.
std::string fnv1a_hex(std::string_view bytes);

struct IngestReport {
  std::size_t data_rows = 0;   // non-empty lines after the header
  std::size_t dropped = 0;     // rows with non-finite or out-of-range values
  std::size_t unparsable = 0;  // rows with wrong arity or unparsable numbers
  std::vector<std::pair<std::size_t, std::string>> notes;  // line -> reason
};

// Reads the core CSV schema float_id,lat,lon,pres,temp,psal (header
// required, extra columns ignored).  Rows with invalid values are dropped
// and reported; unparsable rows beyond 1% of the data rows raise
// ingest_error.
ProfileDataset ingest_csv(const std::string& path,
                          IngestReport* report = nullptr);

void write_dataset_csv(const std::string& path, const ProfileDataset& data);

// Content hash of the canonical CSV serialization.
std::string dataset_hash(const ProfileDataset& data);

struct Provenance {
  std::string data_hash;
  std::uint64_t seed = 0;
  GeoPoint ref{0.0, 0.0, 0.0};
};

// Human-readable fitted-model file with an embedded content hash; lossless
// round-trip (save -> load -> save is byte-identical).
void save_fit(const std::string& path, const FitResult& fit,
              const Provenance& prov);

struct LoadedFit {
  FitResult fit;
  Provenance prov;
};

LoadedFit load_fit(const std::string& path);

// Report schema: model,loglik,aic,mse_T,mse_S,jitter,knots_T,knots_S.
void write_report_csv(const std::string& path,
                      const std::vector<ComparisonRow>& rows);

// Per-variable prediction schema: pres,truth,pred,var.
void write_prediction_csv(const std::string& path,
                          const std::vector<PredictionRow>& rows);

// Moment lattice schema: lat,lon,pres,sig2_T,sig2_S,rho.
void write_moments_csv(const std::string& path, const MomentsGrid& grid);

// Colocated-correlation curve schema: pres,rho.
void write_curve_csv(const std::string& path,
                     const std::vector<std::pair<double, double>>& curve);

// Structured (JSON) simulation configuration.
SyntheticConfig parse_sim_config(const std::string& path);

}  // namespace argo
