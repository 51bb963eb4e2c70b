// Command-line front end: synthetic data, compression, completion and tensor measures.

#include <tsvd.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kInputError = 2, kDivergence = 3, kInfeasible = 4 };

// Numbers go out as JSON numbers; -infinity uses the string sentinel "-inf".
json number(double v) {
  if (std::isinf(v) && v < 0) {
    return "-inf";
  }
  if (!std::isfinite(v)) {
    throw tsvd::Error("non-finite metric value");
  }
  return v;
}

json numbers(const std::vector<double>& vs) {
  json out = json::array();
  for (double v : vs) {
    out.push_back(number(v));
  }
  return out;
}

tsvd::Shape parse_dims(const std::string& text) {
  tsvd::Shape dims;
  std::string cur;
  auto flush = [&] {
    if (cur.empty() || cur.find_first_not_of("0123456789") != std::string::npos) {
      throw tsvd::ContractError("bad dims '" + text + "', expected e.g. 30x30x10");
    }
    dims.push_back(std::stoul(cur));
    cur.clear();
  };
  for (char c : text) {
    if (c == 'x' || c == 'X' || c == ',') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  tsvd::Tensor probe(dims); // shape validation
  return dims;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const json& metrics, const std::string& path) {
  if (path.empty()) {
    std::cout << metrics.dump(2) << '\n';
    return;
  }
  std::ofstream os(path);
  if (!os) {
    throw tsvd::FormatError("cannot open " + path + " for writing");
  }
  os << metrics.dump(2) << '\n';
}

// --- gen ----------------------------------------------------------------

struct GenOptions {
  std::string dims;
  std::size_t rank = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string metrics;
};

json cmd_gen(const GenOptions& o) {
  Stopwatch clock;
  const tsvd::Shape dims = parse_dims(o.dims);
  const tsvd::Tensor t = tsvd::low_tubal_rank(dims, o.rank, o.seed);
  tsvd::save_tensor(o.out, t);
  json m;
  m["command"] = "gen";
  m["dims"] = dims;
  m["parameters"] = {{"tubal_rank", o.rank}, {"seed", o.seed}};
  m["output"] = o.out;
  m["frobenius"] = number(tsvd::frobenius(t));
  m["wall_time_s"] = clock.seconds();
  return m;
}

// --- compress -----------------------------------------------------------

struct CompressOptions {
  std::string in;
  std::string method;
  std::optional<std::size_t> k;
  std::optional<double> target_ratio;
  std::vector<std::size_t> k_list;
  std::string out;
  std::string compressed;
  std::string metrics;
};

json cmd_compress(const CompressOptions& o) {
  Stopwatch clock;
  const auto method = tsvd::parse_method(o.method);
  if (!method) {
    throw tsvd::ContractError("unknown method '" + o.method + "' (svd | tsvd | tsvd-tubal)");
  }
  const tsvd::Tensor m = tsvd::load_tensor(o.in);
  tsvd::detail::require_order3(m.dims());

  std::vector<std::size_t> ks = o.k_list;
  if (o.k) {
    ks = {*o.k};
  } else if (o.target_ratio) {
    ks = {tsvd::k_for_ratio(*method, m.dims(), *o.target_ratio)};
  }
  if (ks.empty()) {
    throw tsvd::ContractError("compress needs one of --k, --target-ratio, --k-list");
  }

  json records = json::array();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const tsvd::CompressionResult r = tsvd::compress(*method, m, ks[i]);
    records.push_back({{"k", r.k},
                       {"ratio", number(r.ratio)},
                       {"achieved_ratio", number(r.achieved_ratio)},
                       {"stored_scalars", r.form.scalar_count()},
                       {"rse_db", number(r.rse_db)}});
    if (i + 1 == ks.size()) {
      if (!o.out.empty()) {
        tsvd::save_tensor(o.out, r.reconstruction);
      }
      if (!o.compressed.empty()) {
        std::ofstream os(o.compressed, std::ios::binary | std::ios::trunc);
        if (!os) {
          throw tsvd::FormatError("cannot open " + o.compressed + " for writing");
        }
        tsvd::write_compressed(os, r.form);
      }
    }
  }

  json params;
  params["method"] = std::string(tsvd::to_string(*method));
  params["k"] = o.k ? json(*o.k) : json(nullptr);
  params["target_ratio"] = o.target_ratio ? number(*o.target_ratio) : json(nullptr);
  params["k_list"] = o.k_list;
  json m_out;
  m_out["command"] = "compress";
  m_out["dims"] = m.dims();
  m_out["parameters"] = params;
  m_out["records"] = records;
  m_out["wall_time_s"] = clock.seconds();
  return m_out;
}

// --- complete -----------------------------------------------------------

struct CompleteOptions {
  std::string in;
  std::string mask;
  std::string mask_coords;
  std::optional<double> sample_rate;
  std::uint64_t seed = 0;
  double rho = 1.0;
  double tol = 1e-7;
  double tol_fit = 1e-6;
  std::size_t max_iter = 1000;
  bool positivity = false;
  std::string truth;
  std::string out;
  std::string metrics;
};

json cmd_complete(const CompleteOptions& o) {
  Stopwatch clock;
  const tsvd::Tensor input = tsvd::load_tensor(o.in);
  const int sources = !o.mask.empty() + !o.mask_coords.empty() + o.sample_rate.has_value();
  if (sources != 1) {
    throw tsvd::ContractError("give exactly one of --mask, --mask-coords, --sample-rate");
  }
  tsvd::Mask mask;
  if (!o.mask.empty()) {
    mask = tsvd::load_mask(o.mask);
  } else if (!o.mask_coords.empty()) {
    std::ifstream is(o.mask_coords);
    if (!is) {
      throw tsvd::FormatError("cannot open " + o.mask_coords);
    }
    mask = tsvd::read_mask_coordinates(is, input.dims());
  } else {
    mask = tsvd::Mask::bernoulli(input.dims(), *o.sample_rate, o.seed);
  }
  if (mask.dims() != input.dims()) {
    throw tsvd::DimensionError("mask " + tsvd::to_string(mask.dims()) + " vs input " +
                               tsvd::to_string(input.dims()));
  }

  std::optional<tsvd::Tensor> truth;
  if (!o.truth.empty()) {
    truth = tsvd::load_tensor(o.truth);
  }
  tsvd::AdmmConfig cfg;
  cfg.rho = o.rho;
  cfg.tol_primal = o.tol;
  cfg.tol_fit = o.tol_fit;
  cfg.max_iter = o.max_iter;
  cfg.positivity = o.positivity;

  const tsvd::Tensor y = tsvd::apply_sampling(tsvd::SamplingOperator(mask), input);
  const auto result = tsvd::complete(y, mask, cfg, truth ? &*truth : nullptr);
  if (!o.out.empty()) {
    tsvd::save_tensor(o.out, result.X);
  }

  const auto& rep = result.report;
  json params;
  params["mask"] = o.mask.empty() ? json(nullptr) : json(o.mask);
  params["mask_coords"] = o.mask_coords.empty() ? json(nullptr) : json(o.mask_coords);
  params["sample_rate"] = o.sample_rate ? number(*o.sample_rate) : json(nullptr);
  params["seed"] = o.seed;
  params["rho"] = number(o.rho);
  params["tol"] = number(o.tol);
  params["tol_fit"] = number(o.tol_fit);
  params["max_iter"] = o.max_iter;
  params["positivity"] = o.positivity;
  json m;
  m["command"] = "complete";
  m["dims"] = input.dims();
  m["parameters"] = params;
  m["observed_fraction"] = static_cast<double>(mask.observed()) / static_cast<double>(mask.size());
  m["iterations"] = rep.iterations;
  m["converged"] = rep.converged;
  m["final_residual"] = number(rep.primal_residuals.empty() ? 0.0 : rep.primal_residuals.back());
  m["rse_db"] = rep.final_rse_db ? number(*rep.final_rse_db) : json(nullptr);
  m["residual_trace"] = numbers(rep.primal_residuals);
  m["tnn_trace"] = numbers(rep.tnn_values);
  m["wall_time_s"] = clock.seconds();
  return m;
}

// --- info ---------------------------------------------------------------

json cmd_info(const std::string& in, double tol) {
  Stopwatch clock;
  const tsvd::Tensor t = tsvd::load_tensor(in);
  const tsvd::TSvdFactors f = tsvd::t_svd(t);
  json m;
  m["command"] = "info";
  m["dims"] = t.dims();
  m["parameters"] = {{"tol", number(tol)}};
  m["frobenius"] = number(tsvd::frobenius(t));
  m["multi_rank"] = tsvd::multi_rank(t, tol).ranks;
  m["tubal_rank"] = tsvd::tubal_rank(f, tol);
  m["tnn"] = number(tsvd::tnn(t));
  m["ttn"] = number(tsvd::ttn(f));
  m["wall_time_s"] = clock.seconds();
  return m;
}

// --- import-pgm ---------------------------------------------------------

json cmd_import_pgm(const std::string& dir, const std::string& out) {
  Stopwatch clock;
  const tsvd::Tensor t = tsvd::import_pgm_directory(dir);
  tsvd::save_tensor(out, t);
  json m;
  m["command"] = "import-pgm";
  m["dims"] = t.dims();
  m["parameters"] = {{"dir", dir}};
  m["output"] = out;
  m["wall_time_s"] = clock.seconds();
  return m;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"t-SVD tensor toolkit: compression, completion and tensor measures"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a random tensor X * Y of given tubal rank");
  gen_cmd->add_option("--dims", gen.dims, "Extents, e.g. 30x30x10")->required();
  gen_cmd->add_option("--rank,-r", gen.rank, "Tubal rank (inner extent)")->required();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out,-o", gen.out, "Output tensor file")->required();
  gen_cmd->add_option("--metrics", gen.metrics, "Metrics JSON path (default stdout)");

  CompressOptions comp;
  auto* comp_cmd = app.add_subcommand("compress", "Truncated SVD / t-SVD compression");
  comp_cmd->add_option("--in,-i", comp.in, "Input tensor file")->required();
  comp_cmd->add_option("--method,-m", comp.method, "svd | tsvd | tsvd-tubal")->required();
  auto* k_opt = comp_cmd->add_option("--k,-k", comp.k, "Truncation parameter");
  auto* ratio_opt = comp_cmd->add_option("--target-ratio", comp.target_ratio,
                                         "Pick the largest k whose ratio reaches this value");
  auto* list_opt = comp_cmd->add_option("--k-list", comp.k_list, "Sweep over several k")->delimiter(',');
  k_opt->excludes(ratio_opt)->excludes(list_opt);
  ratio_opt->excludes(list_opt);
  comp_cmd->add_option("--out,-o", comp.out, "Reconstruction tensor file (last k of a sweep)");
  comp_cmd->add_option("--compressed", comp.compressed, "Write the retained factors here");
  comp_cmd->add_option("--metrics", comp.metrics, "Metrics JSON path (default stdout)");

  CompleteOptions cpl;
  auto* cpl_cmd = app.add_subcommand("complete", "TNN-penalized ADMM completion");
  cpl_cmd->add_option("--in,-i", cpl.in, "Input tensor file (entries off the mask are ignored)")->required();
  cpl_cmd->add_option("--mask", cpl.mask, "Mask tensor file with 0/1 entries");
  cpl_cmd->add_option("--mask-coords", cpl.mask_coords, "Text file of 1-based observed coordinates");
  cpl_cmd->add_option("--sample-rate", cpl.sample_rate, "Bernoulli sampling rate in [0, 1]");
  cpl_cmd->add_option("--seed", cpl.seed, "Seed for --sample-rate masks");
  cpl_cmd->add_option("--rho", cpl.rho, "ADMM penalty (threshold 1/rho)");
  cpl_cmd->add_option("--tol", cpl.tol, "Relative primal residual tolerance");
  cpl_cmd->add_option("--tol-fit", cpl.tol_fit, "Relative fit tolerance on observed entries");
  cpl_cmd->add_option("--max-iter", cpl.max_iter, "Iteration cap");
  cpl_cmd->add_flag("--positivity", cpl.positivity, "Project unobserved entries onto x >= 0");
  cpl_cmd->add_option("--truth", cpl.truth, "Ground truth tensor for RSE");
  cpl_cmd->add_option("--out,-o", cpl.out, "Recovered tensor file");
  cpl_cmd->add_option("--metrics", cpl.metrics, "Metrics JSON path (default stdout)");

  std::string info_in;
  double info_tol = tsvd::kRankTolerance;
  std::string info_metrics;
  auto* info_cmd = app.add_subcommand("info", "Multi-rank, tubal rank, TNN and TTN of a tensor");
  info_cmd->add_option("--in,-i", info_in, "Input tensor file")->required();
  info_cmd->add_option("--tol", info_tol, "Relative rank tolerance");
  info_cmd->add_option("--metrics", info_metrics, "Metrics JSON path (default stdout)");

  std::string pgm_dir;
  std::string pgm_out;
  std::string pgm_metrics;
  auto* pgm_cmd = app.add_subcommand("import-pgm", "Stack a directory of P2 frames into a tensor");
  pgm_cmd->add_option("--dir,-d", pgm_dir, "Directory of .pgm frames")->required();
  pgm_cmd->add_option("--out,-o", pgm_out, "Output tensor file")->required();
  pgm_cmd->add_option("--metrics", pgm_metrics, "Metrics JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*gen_cmd) {
      emit(cmd_gen(gen), gen.metrics);
    } else if (*comp_cmd) {
      emit(cmd_compress(comp), comp.metrics);
    } else if (*cpl_cmd) {
      emit(cmd_complete(cpl), cpl.metrics);
    } else if (*info_cmd) {
      emit(cmd_info(info_in, info_tol), info_metrics);
    } else if (*pgm_cmd) {
      emit(cmd_import_pgm(pgm_dir, pgm_out), pgm_metrics);
    }
  } catch (const tsvd::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const tsvd::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDivergence;
  } catch (const tsvd::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kDivergence;
  } catch (const tsvd::SymmetryError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
