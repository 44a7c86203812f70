#include "rdslab.h"

#include <json.hpp>

#include <cstring>
#include <optional>
#include <string>

#include "rds/experiment.hpp"
#include "rds/measures.hpp"
#include "rds/noise_kernels.hpp"
#include "rds/version.hpp"

namespace {

thread_local std::string g_last_error;

int code_of(const rds::Error& e) {
  switch (e.code()) {
    case rds::ErrorCode::InvalidArgument: return RDS_ERR_INVALID_ARGUMENT;
    case rds::ErrorCode::Parse: return RDS_ERR_PARSE;
    case rds::ErrorCode::Domain: return RDS_ERR_DOMAIN;
    case rds::ErrorCode::NoDensity: return RDS_ERR_NO_DENSITY;
    case rds::ErrorCode::NotConverged: return RDS_ERR_NOT_CONVERGED;
    case rds::ErrorCode::Unsupported: return RDS_ERR_UNSUPPORTED;
    case rds::ErrorCode::InsufficientSamples: return RDS_ERR_INSUFFICIENT_SAMPLES;
    case rds::ErrorCode::Overflow: return RDS_ERR_OVERFLOW;
    case rds::ErrorCode::Io: return RDS_ERR_IO;
    case rds::ErrorCode::AnalysisFailed: return RDS_ERR_ANALYSIS_FAILED;
    case rds::ErrorCode::Internal: return RDS_ERR_INTERNAL;
  }
  return RDS_ERR_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const rds::Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RDS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return RDS_ERR_INTERNAL;
  }
}

int fill_name(const std::vector<std::string>& names, int index, char* buf, size_t cap) {
  if (!buf || index < 0 || index >= static_cast<int>(names.size())) {
    g_last_error = "index out of range";
    return RDS_ERR_INVALID_ARGUMENT;
  }
  const std::string& name = names[index];
  if (cap < name.size() + 1) {
    g_last_error = "buffer too small";
    return RDS_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, name.c_str(), name.size() + 1);
  return RDS_OK;
}

std::map<std::string, double> parse_params(const char* params_json) {
  std::map<std::string, double> params;
  if (!params_json || !*params_json) return params;
  nlohmann::json j = nlohmann::json::parse(params_json, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    rds::fail(rds::ErrorCode::Parse, "params_json must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number())
      rds::fail(rds::ErrorCode::Parse, "params_json values must be numbers");
    params[it.key()] = it.value().get<double>();
  }
  return params;
}

}  // namespace

struct rds_kernel {
  rds::TransitionKernel kernel;
};

struct rds_experiment {
  rds::ExperimentConfig config;
  std::optional<rds::RunManifest> manifest;
};

extern "C" {

int rds_api_version(void) { return rds::kApiVersion; }

const char* rds_version_string(void) { return rds::kVersionString; }

const char* rds_last_error(void) { return g_last_error.c_str(); }

int rds_map_count(void) { return static_cast<int>(rds::builtin_map_names().size()); }

int rds_map_name(int index, char* buf, size_t cap) {
  return fill_name(rds::builtin_map_names(), index, buf, cap);
}

int rds_sde_count(void) { return static_cast<int>(rds::builtin_sde_names().size()); }

int rds_sde_name(int index, char* buf, size_t cap) {
  return fill_name(rds::builtin_sde_names(), index, buf, cap);
}

int rds_kernel_variant_count(void) {
  return static_cast<int>(rds::kernel_variant_names().size());
}

int rds_kernel_variant_name(int index, char* buf, size_t cap) {
  return fill_name(rds::kernel_variant_names(), index, buf, cap);
}

int rds_kernel_create(const char* variant, const char* map_name, const char* params_json,
                      double epsilon, rds_kernel** out) {
  return guarded([&]() {
    if (!variant || !out) {
      g_last_error = "variant and out must be non-null";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    *out = nullptr;
    std::string v = variant;
    std::optional<rds::TransitionKernel> kernel;
    if (v == "degenerate_trap") {
      kernel = rds::TransitionKernel::degenerate_trap(epsilon);
    } else {
      if (!map_name) {
        g_last_error = "map_name must be non-null for this variant";
        return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
      }
      rds::BaseMap map = rds::make_map(map_name, parse_params(params_json));
      if (v == "additive_map")
        kernel = rds::TransitionKernel::additive(map, epsilon);
      else if (v == "random_jump")
        kernel = rds::TransitionKernel::random_jump(map, epsilon);
      else if (v == "parametric")
        kernel = rds::TransitionKernel::parametric(rds::RandomMapLaw::additive(map), epsilon);
      else if (v == "delta")
        kernel = rds::TransitionKernel::delta(map);
      else
        rds::fail(rds::ErrorCode::InvalidArgument, "unknown kernel variant '" + v + "'");
    }
    *out = new rds_kernel{std::move(*kernel)};
    return static_cast<int>(RDS_OK);
  });
}

void rds_kernel_free(rds_kernel* kernel) { delete kernel; }

int rds_kernel_dim(const rds_kernel* kernel, int* out_dim) {
  if (!kernel || !out_dim) {
    g_last_error = "null argument";
    return RDS_ERR_INVALID_ARGUMENT;
  }
  *out_dim = kernel->kernel.space().dim();
  return RDS_OK;
}

int rds_kernel_sample(const rds_kernel* kernel, const double* x, int dim, uint64_t seed,
                      int count, double* out) {
  return guarded([&]() {
    if (!kernel || !x || !out || count < 1) {
      g_last_error = "null argument or non-positive count";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    const rds::StateSpace& space = kernel->kernel.space();
    if (dim != space.dim()) {
      g_last_error = "dimension mismatch";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    rds::Vec point(dim);
    for (int i = 0; i < dim; ++i) point(i) = x[i];
    if (!space.contains(point)) {
      g_last_error = "point outside the space";
      return static_cast<int>(RDS_ERR_DOMAIN);
    }
    rds::RngStream stream(seed, 0);
    for (int c = 0; c < count; ++c) {
      rds::Vec y = kernel->kernel.sample(point, stream);
      for (int i = 0; i < dim; ++i) out[c * dim + i] = y(i);
    }
    return static_cast<int>(RDS_OK);
  });
}

int rds_kernel_density(const rds_kernel* kernel, const double* x, const double* y, int dim,
                       double* out_density) {
  return guarded([&]() {
    if (!kernel || !x || !y || !out_density) {
      g_last_error = "null argument";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    if (dim != kernel->kernel.space().dim()) {
      g_last_error = "dimension mismatch";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    rds::Vec xv(dim), yv(dim);
    for (int i = 0; i < dim; ++i) {
      xv(i) = x[i];
      yv(i) = y[i];
    }
    *out_density = kernel->kernel.density(xv, yv);
    return static_cast<int>(RDS_OK);
  });
}

int rds_kernel_stationary(const rds_kernel* kernel, int bins, double* weights) {
  return guarded([&]() {
    if (!kernel || !weights || bins < 2) {
      g_last_error = "null argument or bins < 2";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    rds::UlamOperator op = rds::build_ulam(kernel->kernel, bins);
    rds::BinnedMeasure mu = rds::stationary_vector(op);
    for (int j = 0; j < bins; ++j) weights[j] = mu.weight(j);
    return static_cast<int>(RDS_OK);
  });
}

int rds_trap_map(double epsilon, double z, double* out) {
  return guarded([&]() {
    if (!out) {
      g_last_error = "null output";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    *out = rds::trap_map(epsilon, z);
    return static_cast<int>(RDS_OK);
  });
}

int rds_experiment_create(const char* config_json, rds_experiment** out) {
  return guarded([&]() {
    if (!config_json || !out) {
      g_last_error = "null argument";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    *out = new rds_experiment{rds::ExperimentConfig::from_json_text(config_json), {}};
    return static_cast<int>(RDS_OK);
  });
}

int rds_experiment_create_from_file(const char* path, rds_experiment** out) {
  return guarded([&]() {
    if (!path || !out) {
      g_last_error = "null argument";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    *out = new rds_experiment{rds::ExperimentConfig::from_file(path), {}};
    return static_cast<int>(RDS_OK);
  });
}

int rds_experiment_set_seed(rds_experiment* exp, uint64_t seed) {
  if (!exp) {
    g_last_error = "null experiment";
    return RDS_ERR_INVALID_ARGUMENT;
  }
  exp->config.seed = seed;
  return RDS_OK;
}

int rds_experiment_set_output_dir(rds_experiment* exp, const char* dir) {
  if (!exp || !dir || !*dir) {
    g_last_error = "null experiment or empty directory";
    return RDS_ERR_INVALID_ARGUMENT;
  }
  exp->config.output_dir = dir;
  return RDS_OK;
}

int rds_experiment_run(rds_experiment* exp) {
  return guarded([&]() {
    if (!exp) {
      g_last_error = "null experiment";
      return static_cast<int>(RDS_ERR_INVALID_ARGUMENT);
    }
    exp->manifest = rds::run_experiment(exp->config);
    if (!exp->manifest->all_ok) {
      g_last_error = "one or more analyses failed; see the manifest";
      return static_cast<int>(RDS_ERR_ANALYSIS_FAILED);
    }
    return static_cast<int>(RDS_OK);
  });
}

int rds_experiment_manifest_json(const rds_experiment* exp, char* buf, size_t cap,
                                 size_t* needed) {
  if (!exp || !exp->manifest) {
    g_last_error = "experiment has not been run";
    return RDS_ERR_INVALID_ARGUMENT;
  }
  std::string json = exp->manifest->to_json();
  if (needed) *needed = json.size() + 1;
  if (!buf || cap < json.size() + 1) {
    g_last_error = "buffer too small";
    return RDS_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, json.c_str(), json.size() + 1);
  return RDS_OK;
}

void rds_experiment_free(rds_experiment* exp) { delete exp; }

}  // extern "C"
