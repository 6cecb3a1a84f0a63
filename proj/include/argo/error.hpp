#pragma once

#include <stdexcept>
#include <string>

namespace argo {

// Error taxonomy, grouped by CLI exit code:
//   config errors -> 2, data errors -> 3, numerical failures -> 4.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ingest_error : data_error {
  using data_error::data_error;
};

struct insufficient_data : data_error {
  using data_error::data_error;
};

struct insufficient_variance : data_error {
  using data_error::data_error;
};

struct out_of_domain : data_error {
  using data_error::data_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct not_positive_definite : numerical_error {
  using numerical_error::numerical_error;
};

struct degenerate_variance : numerical_error {
  using numerical_error::numerical_error;
};

struct degenerate_design : numerical_error {
  using numerical_error::numerical_error;
};

}  // namespace argo
