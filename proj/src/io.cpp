#include "argo/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "argo/error.hpp"
#include "argo/version.hpp"

namespace argo {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  for (int k = 15; k >= 0; --k) {
    buf[k] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(
        trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_number(const std::string& tok, double* out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc{} && res.ptr == last && !tok.empty();
}

void serialize_dataset(const ProfileDataset& data, std::string* out) {
  out->append("float_id,lat,lon,pres,temp,psal\n");
  for (const Observation& o : data.observations()) {
    out->append(o.float_id);
    out->push_back(',');
    out->append(format_double(o.point.lat));
    out->push_back(',');
    out->append(format_double(o.point.lon));
    out->push_back(',');
    out->append(format_double(o.point.pres));
    out->push_back(',');
    out->append(format_double(o.temp));
    out->push_back(',');
    out->append(format_double(o.psal));
    out->push_back('\n');
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw data_error("write failed: " + path);
}

std::string transform_name(Transform t) {
  switch (t) {
    case Transform::kLog: return "log";
    case Transform::kTanh: return "tanh";
    case Transform::kIdentity: return "identity";
  }
  throw config_error("unknown transform");
}

Transform transform_from_name(const std::string& name) {
  if (name == "log") return Transform::kLog;
  if (name == "tanh") return Transform::kTanh;
  if (name == "identity") return Transform::kIdentity;
  throw data_error("fit file: unknown transform '" + name + "'");
}

json spline_to_json(const SplineSpec& s) {
  return json{{"degree", s.degree}, {"knots", s.knots}};
}

SplineSpec spline_from_json(const json& j) {
  SplineSpec s;
  s.degree = j.at("degree").get<int>();
  s.knots = j.at("knots").get<std::vector<double>>();
  s.validate();
  return s;
}

json fit_to_json(const FitResult& fit, const Provenance& prov) {
  json spec;
  spec["model"] = to_string(fit.spec.id);
  spec["dim_d"] = fit.spec.dim_d;
  spec["nugget"] = fit.spec.nugget;
  spec["spline_T"] = spline_to_json(fit.spec.spline_T);
  spec["spline_S"] = spline_to_json(fit.spec.spline_S);
  spec["fixed_a_h"] = fit.spec.fixed_a_h;
  spec["fixed_a_v"] = fit.spec.fixed_a_v;
  spec["base_nu"] = fit.spec.base_nu;
  spec["direct_nu"] = fit.spec.direct_nu;
  spec["moment_bw"] = json{{"lambda_h", fit.spec.moment_bw.lambda_h},
                           {"lambda_v", fit.spec.moment_bw.lambda_v}};

  json params = json::array();
  for (const Param& p : fit.theta.params())
    params.push_back(json{{"name", p.name},
                          {"value", p.value},
                          {"transform", transform_name(p.transform)},
                          {"fixed", p.fixed}});

  json j;
  j["format"] = "argogp-fit";
  j["version"] = kModelFileVersion;
  j["software"] = kVersion;
  j["spec"] = std::move(spec);
  j["params"] = std::move(params);
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["wls_objective"] = fit.wls_objective;
  j["trace"] = fit.trace;
  j["jitter"] = fit.jitter_used;
  j["pd_fix"] = fit.pd_fix_applied;
  j["evals"] = fit.evals;
  j["warnings"] = fit.warnings;
  j["provenance"] = json{{"data_hash", prov.data_hash},
                         {"seed", prov.seed},
                         {"ref_lat", prov.ref.lat},
                         {"ref_lon", prov.ref.lon},
                         {"ref_pres", prov.ref.pres}};
  return j;
}

}  // namespace

ProfileDataset ingest_csv(const std::string& path, IngestReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ingest_error("cannot open data file: " + path);

  IngestReport local;
  IngestReport& rep = report != nullptr ? *report : local;
  rep = IngestReport{};

  std::string line;
  if (!std::getline(in, line))
    throw ingest_error(path + ": empty file (header required)");
  const std::vector<std::string> header = split_csv(line);
  const auto col = [&header, &path](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ingest_error(path + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_id = col("float_id");
  const std::size_t c_lat = col("lat");
  const std::size_t c_lon = col("lon");
  const std::size_t c_pres = col("pres");
  const std::size_t c_temp = col("temp");
  const std::size_t c_psal = col("psal");

  std::vector<Observation> obs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++rep.data_rows;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != header.size()) {
      ++rep.unparsable;
      rep.notes.emplace_back(line_no, "wrong field count");
      continue;
    }
    Observation o;
    o.float_id = f[c_id];
    double vals[5];
    const std::size_t cols[5] = {c_lat, c_lon, c_pres, c_temp, c_psal};
    bool ok = !o.float_id.empty();
    for (int k = 0; ok && k < 5; ++k) ok = parse_number(f[cols[k]], &vals[k]);
    if (!ok) {
      ++rep.unparsable;
      rep.notes.emplace_back(line_no, "unparsable field");
      continue;
    }
    o.point = GeoPoint{vals[0], vals[1], vals[2]};
    o.temp = vals[3];
    o.psal = vals[4];

    bool finite = true;
    for (const double v : vals) finite = finite && std::isfinite(v);
    if (!finite) {
      ++rep.dropped;
      rep.notes.emplace_back(line_no, "non-finite value");
      continue;
    }
    try {
      validate_point(o.point);
    } catch (const out_of_domain& e) {
      ++rep.dropped;
      rep.notes.emplace_back(line_no, e.what());
      continue;
    }
    obs.push_back(std::move(o));
  }

  if (rep.data_rows > 0 &&
      static_cast<double>(rep.unparsable) >
          0.01 * static_cast<double>(rep.data_rows))
    throw ingest_error(path + ": " + std::to_string(rep.unparsable) + " of " +
                       std::to_string(rep.data_rows) +
                       " rows unparsable (over the 1% threshold)");
  if (rep.data_rows == 0) rep.notes.emplace_back(1, "no data rows");
  return ProfileDataset(std::move(obs));
}

void write_dataset_csv(const std::string& path, const ProfileDataset& data) {
  std::string out;
  serialize_dataset(data, &out);
  write_text_file(path, out);
}

std::string dataset_hash(const ProfileDataset& data) {
  std::string bytes;
  serialize_dataset(data, &bytes);
  return fnv1a_hex(bytes);
}

void save_fit(const std::string& path, const FitResult& fit,
              const Provenance& prov) {
  json j = fit_to_json(fit, prov);
  j["checksum"] = fnv1a_hex(j.dump());
  write_text_file(path, j.dump(2) + "\n");
}

LoadedFit load_fit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open fit file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw data_error(path + ": corrupt fit file (" + e.what() + ")");
  }

  try {
    if (j.value("format", "") != "argogp-fit")
      throw data_error(path + ": not a fitted-model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFileVersion)
      throw data_error(path + ": fit file version " +
                       std::to_string(version) + " is not supported (want " +
                       std::to_string(kModelFileVersion) + ")");

    const std::string checksum = j.at("checksum").get<std::string>();
    j.erase("checksum");
    if (fnv1a_hex(j.dump()) != checksum)
      throw data_error(path + ": checksum mismatch (file was modified)");

    LoadedFit out;
    const json& spec = j.at("spec");
    out.fit.spec.id = model_from_string(spec.at("model").get<std::string>());
    out.fit.spec.dim_d = spec.at("dim_d").get<int>();
    out.fit.spec.nugget = spec.at("nugget").get<double>();
    out.fit.spec.spline_T = spline_from_json(spec.at("spline_T"));
    out.fit.spec.spline_S = spline_from_json(spec.at("spline_S"));
    out.fit.spec.fixed_a_h = spec.at("fixed_a_h").get<double>();
    out.fit.spec.fixed_a_v = spec.at("fixed_a_v").get<double>();
    out.fit.spec.base_nu = spec.at("base_nu").get<double>();
    out.fit.spec.direct_nu = spec.at("direct_nu").get<double>();
    out.fit.spec.moment_bw.lambda_h =
        spec.at("moment_bw").at("lambda_h").get<double>();
    out.fit.spec.moment_bw.lambda_v =
        spec.at("moment_bw").at("lambda_v").get<double>();

    std::vector<Param> params;
    for (const json& p : j.at("params"))
      params.push_back(
          Param{p.at("name").get<std::string>(), p.at("value").get<double>(),
                transform_from_name(p.at("transform").get<std::string>()),
                p.at("fixed").get<bool>()});
    out.fit.theta = ParamVector(std::move(params));

    out.fit.loglik = j.at("loglik").get<double>();
    out.fit.aic = j.at("aic").get<double>();
    out.fit.wls_objective = j.at("wls_objective").get<double>();
    out.fit.trace = j.at("trace").get<std::vector<double>>();
    out.fit.jitter_used = j.at("jitter").get<double>();
    out.fit.pd_fix_applied = j.at("pd_fix").get<bool>();
    out.fit.evals = j.at("evals").get<std::size_t>();
    out.fit.warnings = j.at("warnings").get<std::vector<std::string>>();

    const json& prov = j.at("provenance");
    out.prov.data_hash = prov.at("data_hash").get<std::string>();
    out.prov.seed = prov.at("seed").get<std::uint64_t>();
    out.prov.ref = GeoPoint{prov.at("ref_lat").get<double>(),
                            prov.at("ref_lon").get<double>(),
                            prov.at("ref_pres").get<double>()};
    return out;
  } catch (const json::exception& e) {
    throw data_error(path + ": malformed fit file (" + e.what() + ")");
  }
}

void write_report_csv(const std::string& path,
                      const std::vector<ComparisonRow>& rows) {
  std::string out = "model,loglik,aic,mse_T,mse_S,jitter,knots_T,knots_S\n";
  for (const ComparisonRow& r : rows) {
    out += to_string(r.model) + ',' + format_double(r.loglik) + ',' +
           format_double(r.aic) + ',' + format_double(r.mse_T) + ',' +
           format_double(r.mse_S) + ',' + format_double(r.jitter) + ',' +
           r.knots_T + ',' + r.knots_S + '\n';
  }
  write_text_file(path, out);
}

void write_prediction_csv(const std::string& path,
                          const std::vector<PredictionRow>& rows) {
  std::string out = "pres,truth,pred,var\n";
  for (const PredictionRow& r : rows) {
    out += format_double(r.pres) + ',' + format_double(r.truth) + ',' +
           format_double(r.pred) + ',' + format_double(r.variance) + '\n';
  }
  write_text_file(path, out);
}

void write_moments_csv(const std::string& path, const MomentsGrid& grid) {
  std::string out = "lat,lon,pres,sig2_T,sig2_S,rho\n";
  for (const MomentsGrid::Node& n : grid.nodes()) {
    out += format_double(n.s.lat) + ',' + format_double(n.s.lon) + ',' +
           format_double(n.s.pres) + ',' + format_double(n.sig2_T) + ',' +
           format_double(n.sig2_S) + ',' + format_double(n.beta) + '\n';
  }
  write_text_file(path, out);
}

void write_curve_csv(const std::string& path,
                     const std::vector<std::pair<double, double>>& curve) {
  std::string out = "pres,rho\n";
  for (const auto& [pres, rho] : curve)
    out += format_double(pres) + ',' + format_double(rho) + '\n';
  write_text_file(path, out);
}

SyntheticConfig parse_sim_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error(path + ": invalid JSON (" + e.what() + ")");
  }

  try {
    SyntheticConfig cfg;
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.n_floats = j.value("n_floats", std::size_t{16});
    if (j.contains("depths")) {
      cfg.depths = j.at("depths").get<std::vector<double>>();
    } else if (j.contains("depth_zones")) {
      const json& z = j.at("depth_zones");
      cfg.depths = stratified_depths(z.value("mlz", std::size_t{3}),
                                     z.value("pcz", std::size_t{4}),
                                     z.value("imz", std::size_t{3}));
    } else {
      cfg.depths = stratified_depths(3, 4, 3);
    }
    cfg.depth_jitter_db = j.value("depth_jitter_db", 0.0);
    cfg.max_total_obs = j.value("max_total_obs", std::size_t{4000});

    if (j.contains("region")) {
      const json& r = j.at("region");
      cfg.region.lat_min = r.value("lat_min", cfg.region.lat_min);
      cfg.region.lat_max = r.value("lat_max", cfg.region.lat_max);
      cfg.region.lon_min = r.value("lon_min", cfg.region.lon_min);
      cfg.region.lon_max = r.value("lon_max", cfg.region.lon_max);
      cfg.region.ref.lat = r.value("ref_lat", cfg.region.ref.lat);
      cfg.region.ref.lon = r.value("ref_lon", cfg.region.ref.lon);
    }

    if (!j.contains("model"))
      throw config_error(path + ": 'model' is required");
    cfg.model.id = model_from_string(j.at("model").get<std::string>());
    cfg.model.nugget = j.value("nugget", 0.0);
    cfg.model.base_nu = j.value("base_nu", 2.0);
    cfg.model.direct_nu = j.value("direct_nu", 1.0);
    cfg.model.fixed_a_h = j.value("fixed_a_h", cfg.model.fixed_a_h);
    cfg.model.fixed_a_v = j.value("fixed_a_v", cfg.model.fixed_a_v);
    if (j.contains("knots")) {
      const auto knots = j.at("knots").get<std::vector<double>>();
      cfg.model.spline_T.knots = knots;
      cfg.model.spline_S.knots = knots;
    }

    cfg.theta_true = cfg.model.default_params();
    if (j.contains("theta")) {
      for (const auto& [name, val] : j.at("theta").items())
        cfg.theta_true.set(name, val.get<double>());
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw config_error(path + ": malformed config (" + e.what() + ")");
  }
}

}  // namespace argo
