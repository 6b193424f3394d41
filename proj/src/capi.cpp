#include "fvsm.h"

#include <cstring>
#include <span>
#include <string>

#include "fvsm/pipeline.hpp"
#include "fvsm/space.hpp"
#include "fvsm/stemmer.hpp"
#include "fvsm/util.hpp"

struct fvsm_pipeline {
  fvsm::Pipeline pipeline;
  std::string last_error;
};

namespace {

fvsm_status classify_exception(const std::exception& e) {
  if (dynamic_cast<const fvsm::IoError*>(&e)) return FVSM_ERR_IO;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return FVSM_ERR_INVALID_ARGUMENT;
  return FVSM_ERR_INTERNAL;
}

template <class Fn>
fvsm_status guarded(fvsm_pipeline* pipeline, Fn&& fn) {
  try {
    fn();
    if (pipeline) pipeline->last_error.clear();
    return FVSM_OK;
  } catch (const std::exception& e) {
    if (pipeline) pipeline->last_error = e.what();
    return classify_exception(e);
  } catch (...) {
    if (pipeline) pipeline->last_error = "unknown error";
    return FVSM_ERR_INTERNAL;
  }
}

fvsm_status copy_out(const std::string& value, char* buffer, size_t buffer_size,
                     size_t* out_size) {
  if (buffer == nullptr) return FVSM_ERR_INVALID_ARGUMENT;
  if (buffer_size < value.size() + 1) {
    if (out_size) *out_size = value.size() + 1;
    return FVSM_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buffer, value.data(), value.size());
  buffer[value.size()] = '\0';
  if (out_size) *out_size = value.size();
  return FVSM_OK;
}

}  // namespace

extern "C" {

const char* fvsm_version(void) { return fvsm::kToolVersion; }

const char* fvsm_status_name(fvsm_status status) {
  switch (status) {
    case FVSM_OK: return "FVSM_OK";
    case FVSM_ERR_INVALID_ARGUMENT: return "FVSM_ERR_INVALID_ARGUMENT";
    case FVSM_ERR_IO: return "FVSM_ERR_IO";
    case FVSM_ERR_BUFFER_TOO_SMALL: return "FVSM_ERR_BUFFER_TOO_SMALL";
    case FVSM_ERR_INTERNAL: return "FVSM_ERR_INTERNAL";
  }
  return "FVSM_ERR_UNKNOWN";
}

fvsm_status fvsm_pipeline_new(fvsm_pipeline** out_pipeline) {
  if (out_pipeline == nullptr) return FVSM_ERR_INVALID_ARGUMENT;
  try {
    *out_pipeline = new fvsm_pipeline();
    return FVSM_OK;
  } catch (...) {
    return FVSM_ERR_INTERNAL;
  }
}

void fvsm_pipeline_free(fvsm_pipeline* pipeline) { delete pipeline; }

fvsm_status fvsm_pipeline_load_config(fvsm_pipeline* pipeline, const char* path) {
  if (pipeline == nullptr || path == nullptr) return FVSM_ERR_INVALID_ARGUMENT;
  return guarded(pipeline, [&] { pipeline->pipeline.load_config(path); });
}

fvsm_status fvsm_pipeline_set(fvsm_pipeline* pipeline, const char* key, const char* value) {
  if (pipeline == nullptr || key == nullptr || value == nullptr)
    return FVSM_ERR_INVALID_ARGUMENT;
  return guarded(pipeline, [&] { pipeline->pipeline.set(key, value); });
}

fvsm_status fvsm_pipeline_get(const fvsm_pipeline* pipeline, const char* key, char* buffer,
                              size_t buffer_size, size_t* out_size) {
  if (pipeline == nullptr || key == nullptr) return FVSM_ERR_INVALID_ARGUMENT;
  try {
    return copy_out(pipeline->pipeline.get(key), buffer, buffer_size, out_size);
  } catch (const std::exception& e) {
    const_cast<fvsm_pipeline*>(pipeline)->last_error = e.what();
    return FVSM_ERR_INVALID_ARGUMENT;
  }
}

fvsm_status fvsm_pipeline_run(fvsm_pipeline* pipeline, const char* stage) {
  if (pipeline == nullptr || stage == nullptr) return FVSM_ERR_INVALID_ARGUMENT;
  return guarded(pipeline, [&] { pipeline->pipeline.run(stage); });
}

const char* fvsm_pipeline_last_error(const fvsm_pipeline* pipeline) {
  return pipeline ? pipeline->last_error.c_str() : "";
}

fvsm_status fvsm_porter_stem(const char* word, char* buffer, size_t buffer_size,
                             size_t* out_size) {
  if (word == nullptr) return FVSM_ERR_INVALID_ARGUMENT;
  try {
    return copy_out(fvsm::porter_stem(word), buffer, buffer_size, out_size);
  } catch (const std::exception&) {
    return FVSM_ERR_INVALID_ARGUMENT;
  }
}

fvsm_status fvsm_similarity(const char* measure, const double* x, const double* y, size_t dim,
                            double* out_value) {
  if (measure == nullptr || x == nullptr || y == nullptr || out_value == nullptr || dim == 0)
    return FVSM_ERR_INVALID_ARGUMENT;
  try {
    *out_value = fvsm::measure_value(fvsm::measure_from_name(measure),
                                     std::span<const double>(x, dim),
                                     std::span<const double>(y, dim));
    return FVSM_OK;
  } catch (const std::exception&) {
    return FVSM_ERR_INVALID_ARGUMENT;
  }
}

}  // extern "C"
