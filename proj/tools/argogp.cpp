#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "argo/error.hpp"
#include "argo/fit.hpp"
#include "argo/io.hpp"
#include "argo/kernels.hpp"
#include "argo/predict.hpp"
#include "argo/simulate.hpp"
#include "argo/trend.hpp"
#include "argo/version.hpp"

namespace fs = std::filesystem;
using namespace argo;

namespace {

std::vector<ModelId> parse_model_list(const std::string& csv) {
  std::vector<ModelId> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!tok.empty()) out.push_back(model_from_string(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw config_error("empty model list");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> parse_pressure_range(const std::string& text) {
  // "a:b:step" (inclusive endpoints where the step lands on b).
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw config_error("pressure range must be start:stop:step, got '" + text +
                       "'");
  const double a = std::stod(text.substr(0, c1));
  const double b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (!(step > 0.0) || b < a)
    throw config_error("pressure range must have stop >= start and step > 0");
  std::vector<double> out;
  for (double p = a; p <= b + 1e-9; p += step) out.push_back(p);
  return out;
}

struct FitCliOptions {
  std::string data_path;
  std::string models = "I1,I2,I3,B1,B2,B3,B4";
  double ref_lat = 0.0;
  double ref_lon = 0.0;
  std::string out_dir;
  std::uint64_t seed = 0;
  double nugget = 0.0;
  std::vector<double> knots = {0.0, 100.0, 1000.0, 2000.0};
  double bw_h_km = 300.0;
  double bw_v_db = 50.0;
  std::size_t wls_anchors = 40;
  std::size_t mle_evals = 600;
  std::size_t wls_evals = 1500;
  int restarts = 2;
  bool detrend = false;
};

FitConfig make_fit_config(const FitCliOptions& opt) {
  FitConfig cfg;
  cfg.seed = opt.seed;
  cfg.nugget = opt.nugget;
  cfg.initial_spline = SplineSpec{3, opt.knots};
  cfg.initial_spline.validate();
  cfg.bw.lambda_h = opt.bw_h_km * opt.bw_h_km;
  cfg.bw.lambda_v = opt.bw_v_db * opt.bw_v_db;
  cfg.bw.validate();
  cfg.wls_max_anchors = opt.wls_anchors;
  cfg.mle_opt.max_evals = opt.mle_evals;
  cfg.mle_opt.restarts = opt.restarts;
  cfg.wls_opt.max_evals = opt.wls_evals;
  cfg.wls_opt.restarts = opt.restarts;
  return cfg;
}

int cmd_fit(const FitCliOptions& opt) {
  const std::vector<ModelId> models = parse_model_list(opt.models);
  IngestReport ingest;
  ProfileDataset data = ingest_csv(opt.data_path, &ingest);
  if (ingest.dropped + ingest.unparsable > 0)
    std::cerr << "ingest: dropped " << ingest.dropped << " and skipped "
              << ingest.unparsable << " of " << ingest.data_rows << " rows\n";
  const GeoPoint ref{opt.ref_lat, opt.ref_lon, 0.0};
  validate_point(ref);
  if (opt.detrend) data = fit_local_trend(data, ref);

  const FitConfig cfg = make_fit_config(opt);
  const Provenance prov{dataset_hash(data), opt.seed, ref};
  fs::create_directories(opt.out_dir);

  std::map<ModelId, FitResult> fits;
  std::map<ModelId, std::string> failures;
  const bool needs_staged =
      std::any_of(models.begin(), models.end(), [](ModelId id) {
        return id == ModelId::B1 || is_diffop(id);
      });
  if (needs_staged) {
    StagedFits staged = staged_fit_bivariate(data, cfg);
    fits = std::move(staged.fits);
    failures = std::move(staged.failures);
  } else if (std::find(models.begin(), models.end(), ModelId::I1) !=
             models.end()) {
    ModelSpec i1;
    i1.id = ModelId::I1;
    fits[ModelId::I1] = two_step_fit(i1, data, cfg);
  }
  for (const ModelId id : models) {
    if (!is_semiparametric(id)) continue;
    ModelSpec spec;
    spec.id = id;
    try {
      fits[id] = fit_semiparametric(spec, data, cfg);
    } catch (const std::exception& e) {
      failures[id] = e.what();
    }
  }

  int missing = 0;
  for (const ModelId id : models) {
    const auto it = fits.find(id);
    if (it == fits.end()) {
      ++missing;
      const auto why = failures.find(id);
      std::cerr << "fit " << to_string(id) << " failed: "
                << (why != failures.end() ? why->second : "not attempted")
                << "\n";
      continue;
    }
    const FitResult& fit = it->second;
    const std::string path =
        (fs::path(opt.out_dir) / (to_string(id) + ".model")).string();
    save_fit(path, fit, prov);
    std::cout << to_string(id) << " loglik=" << format_double(fit.loglik)
              << " aic=" << format_double(fit.aic) << " saved " << path
              << "\n";
    for (const std::string& w : fit.warnings)
      std::cerr << to_string(id) << ": " << w << "\n";
  }
  if (missing > 0)
    throw numerical_error(std::to_string(missing) +
                          " requested model(s) failed to fit");
  return 0;
}

std::map<ModelId, LoadedFit> load_fits_dir(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw config_error("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".model")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw config_error("no .model files in " + dir);
  std::map<ModelId, LoadedFit> out;
  for (const fs::path& f : files) {
    LoadedFit lf = load_fit(f.string());
    out[lf.fit.spec.id] = std::move(lf);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bivariate nonstationary Gaussian-process modelling of ocean "
               "temperature/salinity profiles"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // --- simulate ---
  std::string sim_config, sim_out;
  CLI::App* sim = app.add_subcommand("simulate", "Generate synthetic data");
  sim->add_option("--config", sim_config, "JSON simulation config")
      ->required();
  sim->add_option("--out", sim_out, "Output CSV path")->required();

  // --- empirical ---
  std::string emp_data, emp_out;
  double emp_bw_h = 300.0, emp_bw_v = 50.0;
  double emp_step_lat = 1.0, emp_step_lon = 1.0, emp_step_pres = 10.0;
  CLI::App* emp = app.add_subcommand(
      "empirical", "Smoothed moment lattice (variances, colocated rho)");
  emp->add_option("--data", emp_data, "Input CSV")->required();
  emp->add_option("--out", emp_out, "Output CSV path")->required();
  emp->add_option("--bw-h-km", emp_bw_h, "Horizontal smoothing bandwidth, km");
  emp->add_option("--bw-v-db", emp_bw_v, "Vertical smoothing bandwidth, dbar");
  emp->add_option("--step-lat", emp_step_lat, "Lattice step, degrees");
  emp->add_option("--step-lon", emp_step_lon, "Lattice step, degrees");
  emp->add_option("--step-pres", emp_step_pres, "Lattice step, dbar");

  // --- fit ---
  FitCliOptions fopt;
  CLI::App* fit = app.add_subcommand("fit", "Fit covariance models");
  fit->add_option("--data", fopt.data_path, "Input CSV")->required();
  fit->add_option("--models", fopt.models, "Comma-separated model list");
  fit->add_option("--ref-lat", fopt.ref_lat, "Reference latitude")->required();
  fit->add_option("--ref-lon", fopt.ref_lon, "Reference longitude")
      ->required();
  fit->add_option("--out", fopt.out_dir, "Output directory for .model files")
      ->required();
  fit->add_option("--seed", fopt.seed, "Optimizer seed");
  fit->add_option("--nugget", fopt.nugget, "Observation-noise nugget");
  fit->add_option("--knots", fopt.knots, "Spline breakpoints, dbar")
      ->delimiter(',');
  fit->add_option("--bw-h-km", fopt.bw_h_km, "Moment smoother bandwidth, km");
  fit->add_option("--bw-v-db", fopt.bw_v_db, "Moment smoother bandwidth, dbar");
  fit->add_option("--wls-anchors", fopt.wls_anchors, "Max WLS anchor points");
  fit->add_option("--mle-evals", fopt.mle_evals, "MLE evaluation budget");
  fit->add_option("--wls-evals", fopt.wls_evals, "WLS evaluation budget");
  fit->add_option("--restarts", fopt.restarts, "Optimizer restarts");
  fit->add_flag("--detrend", fopt.detrend,
                "Remove a local quadratic mean surface first");

  // --- predict ---
  std::string pr_fits, pr_data, pr_holdout = "nearest", pr_report;
  std::string pr_pred_dir;
  double pr_ref_lat = 0.0, pr_ref_lon = 0.0;
  bool pr_no_refit = false;
  std::uint64_t pr_seed = 0;
  CLI::App* pred = app.add_subcommand(
      "predict", "Leave-one-float-out cokriging evaluation");
  pred->add_option("--fits", pr_fits, "Directory of .model files")->required();
  pred->add_option("--data", pr_data, "Input CSV")->required();
  pred->add_option("--holdout", pr_holdout, "Holdout rule (only: nearest)");
  pred->add_option("--report", pr_report, "Comparison report CSV")->required();
  pred->add_option("--pred-out", pr_pred_dir,
                   "Directory for per-variable prediction CSVs");
  pred->add_option("--ref-lat", pr_ref_lat, "Override reference latitude");
  pred->add_option("--ref-lon", pr_ref_lon, "Override reference longitude");
  pred->add_option("--seed", pr_seed, "Refit optimizer seed");
  pred->add_flag("--no-refit", pr_no_refit,
                 "Reuse the stored parameters instead of refitting");

  // --- compare ---
  std::string cm_fits, cm_report;
  CLI::App* cmp = app.add_subcommand("compare", "Tabulate fitted models");
  cmp->add_option("--fits", cm_fits, "Directory of .model files")->required();
  cmp->add_option("--report", cm_report, "Output CSV path")->required();

  // --- curve ---
  std::string cv_fit, cv_pres = "0:2000:10", cv_out;
  double cv_lat = 0.0;
  CLI::App* curve = app.add_subcommand(
      "curve", "Colocated correlation vs depth for a fitted model");
  curve->add_option("--fit", cv_fit, "Fitted .model file")->required();
  curve->add_option("--lat", cv_lat, "Latitude of the curve");
  curve->add_option("--pres", cv_pres, "Pressure grid start:stop:step");
  curve->add_option("--out", cv_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      const SyntheticConfig cfg = parse_sim_config(sim_config);
      const ProfileDataset data = simulate(cfg);
      write_dataset_csv(sim_out, data);
      std::cout << "wrote " << data.size() << " observations ("
                << data.n_floats() << " floats) to " << sim_out << "\n";
    } else if (emp->parsed()) {
      const ProfileDataset data = ingest_csv(emp_data);
      KernelBandwidths bw{emp_bw_h * emp_bw_h, emp_bw_v * emp_bw_v};
      bw.validate();
      const MomentsGrid grid(data, bw, emp_step_lat, emp_step_lon,
                             emp_step_pres);
      write_moments_csv(emp_out, grid);
      std::cout << "wrote moment lattice to " << emp_out << "\n";
    } else if (fit->parsed()) {
      return cmd_fit(fopt);
    } else if (pred->parsed()) {
      if (pr_holdout != "nearest")
        throw config_error("unsupported holdout rule: " + pr_holdout);
      const ProfileDataset data = ingest_csv(pr_data);
      std::map<ModelId, LoadedFit> loaded = load_fits_dir(pr_fits);
      GeoPoint ref = loaded.begin()->second.prov.ref;
      if (pred->count("--ref-lat") > 0) ref.lat = pr_ref_lat;
      if (pred->count("--ref-lon") > 0) ref.lon = pr_ref_lon;
      ref.pres = 0.0;
      std::map<ModelId, FitResult> fits;
      for (auto& [id, lf] : loaded) fits[id] = std::move(lf.fit);
      FitConfig cfg;
      cfg.seed = pr_seed;
      const auto reports =
          leave_one_float_out(fits, data, ref, cfg, !pr_no_refit);
      std::vector<ComparisonRow> rows = compare_models(reports);
      write_report_csv(pr_report, rows);
      if (!pr_pred_dir.empty()) {
        fs::create_directories(pr_pred_dir);
        for (const auto& [id, rep] : reports) {
          write_prediction_csv((fs::path(pr_pred_dir) /
                                (to_string(id) + "_T.csv")).string(),
                               rep.rows_T);
          write_prediction_csv((fs::path(pr_pred_dir) /
                                (to_string(id) + "_S.csv")).string(),
                               rep.rows_S);
        }
      }
      for (const auto& [id, rep] : reports)
        std::cout << to_string(id) << " held_out=" << rep.target_float
                  << " dist_km=" << format_double(rep.distance_km)
                  << " mse_T=" << format_double(rep.mse_T)
                  << " mse_S=" << format_double(rep.mse_S) << "\n";
      std::cout << "wrote report to " << pr_report << "\n";
    } else if (cmp->parsed()) {
      std::map<ModelId, LoadedFit> loaded = load_fits_dir(cm_fits);
      std::map<ModelId, FitResult> fits;
      for (auto& [id, lf] : loaded) fits[id] = std::move(lf.fit);
      const std::vector<ComparisonRow> rows =
          compare_models(fits, std::map<ModelId, PredictionReport>{});
      write_report_csv(cm_report, rows);
      for (const ComparisonRow& r : rows)
        std::cout << to_string(r.model)
                  << " loglik=" << format_double(r.loglik)
                  << " aic=" << format_double(r.aic)
                  << (r.best_loglik ? " [best loglik]" : "")
                  << (r.best_aic ? " [best aic]" : "") << "\n";
      std::cout << "wrote report to " << cm_report << "\n";
    } else if (curve->parsed()) {
      const LoadedFit lf = load_fit(cv_fit);
      const std::vector<double> pressures = parse_pressure_range(cv_pres);
      std::vector<std::pair<double, double>> rows;
      if (is_diffop(lf.fit.spec.id)) {
        rows = colocated_curve(lf.fit.spec.diffop_params(lf.fit.theta),
                               cv_lat, pressures);
      } else if (lf.fit.spec.id == ModelId::I1 ||
                 lf.fit.spec.id == ModelId::B1) {
        const double rho =
            lf.fit.spec.matern_params(lf.fit.theta).rho12();
        for (const double p : pressures) rows.emplace_back(p, rho);
      } else {
        throw config_error(
            "curve requires a parametric fit (I1, B1, I3, B3, B4); the "
            "semi-parametric correlation field lives in the moment lattice");
      }
      write_curve_csv(cv_out, rows);
      std::cout << "wrote curve to " << cv_out << "\n";
    }
    return 0;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
